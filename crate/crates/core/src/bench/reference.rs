use crate::mesh::Dim;

/// Implementation labels, in published row order.
pub const LABELS: [&str; 7] = [
    "S-NR naïve",
    "O-NR naïve",
    "S-ST naïve",
    "O-ST naïve",
    "CPU 1 thread",
    "CPU 4 threads",
    "CPU 8 threads",
];

/// Column order: 2D then 3D, each at 200K, 400K, 600K points.
pub const CONFIGS: [(Dim, usize); 6] = [
    (Dim::Two, 200_000),
    (Dim::Two, 400_000),
    (Dim::Two, 600_000),
    (Dim::Three, 200_000),
    (Dim::Three, 400_000),
    (Dim::Three, 600_000),
];

const TIMES_MS: [[f64; 6]; 7] = [
    [11.1, 22.3, 33.7, 371.7, 803.1, 1364.9],
    [10.7, 21.5, 32.5, 359.4, 777.6, 1275.7],
    [6635.5, 13316.5, 6281.4, 26892.7, 54207.4, 34863.8],
    [2085.7, 4116.1, 20034.4, 9194.2, 18455.6, 92703.2],
    [30.1, 51.1, 75.5, 71.5, 172.6, 240.1],
    [20.7, 32.5, 39.0, 41.3, 64.0, 90.1],
    [17.2, 23.1, 31.6, 33.0, 51.3, 70.6],
];

/// Published execution times (ms) of the naïve FPGA ports (SYCL/OpenCL,
/// ND-range/single-task) and an OpenMP CPU reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceTable {
    times: &'static [[f64; 6]; 7],
}

impl ReferenceTable {
    pub fn labels(&self) -> &'static [&'static str] {
        &LABELS
    }

    pub fn configs(&self) -> &'static [(Dim, usize)] {
        &CONFIGS
    }

    pub fn lookup(&self, label: &str, dim: Dim, npoints: usize) -> Option<f64> {
        let row = LABELS.iter().position(|&l| l == label)?;
        let col = CONFIGS.iter().position(|&c| c == (dim, npoints))?;
        Some(self.times[row][col])
    }

    /// Row-major `(label, dim, npoints, ms)` entries.
    pub fn entries(&self) -> impl Iterator<Item = (&'static str, Dim, usize, f64)> + '_ {
        LABELS.iter().enumerate().flat_map(move |(r, &label)| {
            CONFIGS
                .iter()
                .enumerate()
                .map(move |(c, &(dim, n))| (label, dim, n, self.times[r][c]))
        })
    }
}

pub fn reference_table1() -> ReferenceTable {
    ReferenceTable { times: &TIMES_MS }
}

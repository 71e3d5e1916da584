//! Binary flowmap (`.ftlm`) and FTLE field (`.ftlf`) files.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! offset  size        field
//! 0       4           magic "FTLM"
//! 4       4   u32     version (1)
//! 8       4   u32     dim (2 or 3)
//! 12      8   u64     npoints
//! 20      4   u32     kind: 0 structured, 1 unstructured,
//!                           2 unstructured with a symmetric neighbor relation
//! 24      ...         structured only: dims (u64 × dim), spacing (f64 × dim),
//!                     origin (f64 × dim)
//!         8   f64     t0
//!         8   f64     T (horizon)
//!         ...         unstructured only: coords (f64 × npoints·dim),
//!                     neighbors (i64 × npoints·dim·2; per point, per axis:
//!                     forward then backward; -1 = absent)
//!         ...         flowmap values (f64 × npoints·dim), canonical point order
//! ```
//!
//! A neighbor-table file is the same layout with `t0 = T = 0` and no values.
//!
//! ```text
//! .ftlf: magic "FTLF", u32 version, u32 dim, u64 npoints,
//!        u64 degenerate_count, f64 × npoints
//! ```

use std::fs;
use std::path::Path;

use crate::field::{FlowmapField, FtleField};
use crate::mesh::{make_structured_grid, AxisNeighbors, Dim, MeshKind, MeshTopology, MAX_POINTS};

use super::FormatError;

pub const FLOWMAP_MAGIC: [u8; 4] = *b"FTLM";
pub const FTLE_MAGIC: [u8; 4] = *b"FTLF";
pub const FORMAT_VERSION: u32 = 1;

const KIND_STRUCTURED: u32 = 0;
const KIND_UNSTRUCTURED: u32 = 1;
const KIND_UNSTRUCTURED_SYMMETRIC: u32 = 2;

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn i64(&mut self, v: i64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s(&mut self, vs: &[f64]) {
        self.0.reserve(vs.len() * 8);
        for &v in vs {
            self.f64(v);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: u64) -> Result<&'a [u8], FormatError> {
        let available = self.buf.len() - self.pos;
        if n > available as u64 {
            return Err(FormatError::Truncated {
                offset: self.pos,
                needed: n,
                available,
            });
        }
        let s = &self.buf[self.pos..self.pos + n as usize];
        self.pos += n as usize;
        Ok(s)
    }
    fn array<const N: usize>(&mut self) -> Result<[u8; N], FormatError> {
        Ok(self.take(N as u64)?.try_into().expect("length checked"))
    }
    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.array()?))
    }
    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.array()?))
    }
    fn f64(&mut self) -> Result<f64, FormatError> {
        Ok(f64::from_le_bytes(self.array()?))
    }
    /// Reads `count` 8-byte words, checking the length before allocating.
    fn words(&mut self, count: u64) -> Result<impl Iterator<Item = [u8; 8]> + 'a, FormatError> {
        let bytes = count.checked_mul(8).ok_or(FormatError::Truncated {
            offset: self.pos,
            needed: u64::MAX,
            available: self.buf.len() - self.pos,
        })?;
        let s = self.take(bytes)?;
        Ok(s.chunks_exact(8).map(|c| c.try_into().expect("8 bytes")))
    }
    fn f64s(&mut self, count: u64) -> Result<Vec<f64>, FormatError> {
        Ok(self.words(count)?.map(f64::from_le_bytes).collect())
    }
    fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }
}

fn write_header(w: &mut Writer, mesh: &MeshTopology, t0: f64, horizon: f64) {
    w.0.extend_from_slice(&FLOWMAP_MAGIC);
    w.u32(FORMAT_VERSION);
    w.u32(mesh.dim().n() as u32);
    w.u64(mesh.npoints() as u64);
    match mesh.kind() {
        MeshKind::Structured(g) => {
            w.u32(KIND_STRUCTURED);
            for &n in &g.dims {
                w.u64(n as u64);
            }
            w.f64s(&g.spacing);
            w.f64s(&g.origin);
        }
        MeshKind::Unstructured { symmetric } => {
            w.u32(if *symmetric {
                KIND_UNSTRUCTURED_SYMMETRIC
            } else {
                KIND_UNSTRUCTURED
            });
        }
    }
    w.f64(t0);
    w.f64(horizon);
    if let MeshKind::Unstructured { .. } = mesh.kind() {
        w.f64s(mesh.coords());
        let idx = |i: Option<usize>| i.map_or(-1, |i| i as i64);
        for nb in mesh.neighbor_table() {
            w.i64(idx(nb.forward()));
            w.i64(idx(nb.backward()));
        }
    }
}

struct Header {
    mesh: MeshTopology,
    t0: f64,
    horizon: f64,
}

fn read_header(r: &mut Reader<'_>, magic: [u8; 4]) -> Result<(Dim, u64), FormatError> {
    let got: [u8; 4] = r.array()?;
    if got != magic {
        return Err(FormatError::BadMagic(got));
    }
    let version = r.u32()?;
    if version != FORMAT_VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    let raw_dim = r.u32()?;
    let dim = Dim::new(raw_dim as usize).map_err(|_| FormatError::BadDim(raw_dim))?;
    let npoints = r.u64()?;
    Ok((dim, npoints))
}

fn read_mesh_section(r: &mut Reader<'_>) -> Result<Header, FormatError> {
    let (dim, npoints) = read_header(r, FLOWMAP_MAGIC)?;
    let d = dim.n();
    let kind = r.u32()?;
    match kind {
        KIND_STRUCTURED => {
            let mut dims = Vec::with_capacity(d);
            for _ in 0..d {
                dims.push(r.u64()?);
            }
            let spacing = r.f64s(d as u64)?;
            let origin = r.f64s(d as u64)?;
            let t0 = r.f64()?;
            let horizon = r.f64()?;
            let grid = dims
                .iter()
                .fold(1u128, |acc, &n| acc.saturating_mul(n as u128));
            if grid != npoints as u128 {
                return Err(FormatError::NpointsMismatch {
                    header: npoints,
                    grid,
                });
            }
            if npoints > MAX_POINTS as u64 {
                return Err(crate::mesh::MeshError::TooLarge(grid).into());
            }
            // values must be present before the grid is built
            let values_bytes = npoints as u128 * d as u128 * 8;
            if values_bytes > r.remaining() as u128 {
                return Err(FormatError::Truncated {
                    offset: r.pos,
                    needed: values_bytes.min(u64::MAX as u128) as u64,
                    available: r.remaining(),
                });
            }
            let dims: Vec<usize> = dims.iter().map(|&n| n as usize).collect();
            let mesh = make_structured_grid(&dims, &spacing, &origin)?;
            Ok(Header { mesh, t0, horizon })
        }
        KIND_UNSTRUCTURED | KIND_UNSTRUCTURED_SYMMETRIC => {
            let t0 = r.f64()?;
            let horizon = r.f64()?;
            let count = npoints
                .checked_mul(d as u64)
                .ok_or(FormatError::Truncated {
                    offset: r.pos,
                    needed: u64::MAX,
                    available: r.remaining(),
                })?;
            let coords = r.f64s(count)?;
            let nb_words = count.checked_mul(2).ok_or(FormatError::Truncated {
                offset: r.pos,
                needed: u64::MAX,
                available: r.remaining(),
            })?;
            let raw: Vec<i64> = r.words(nb_words)?.map(i64::from_le_bytes).collect();
            let n = npoints as usize;
            let mut table = Vec::with_capacity(count as usize);
            for (k, pair) in raw.chunks_exact(2).enumerate() {
                let index = |v: i64| -> Result<Option<usize>, FormatError> {
                    if v == -1 {
                        Ok(None)
                    } else if v < 0 || v as u64 >= npoints {
                        Err(crate::mesh::MeshError::NeighborOutOfRange {
                            point: k / d,
                            axis: k % d,
                            index: v,
                            npoints: n,
                        }
                        .into())
                    } else {
                        Ok(Some(v as usize))
                    }
                };
                table.push(AxisNeighbors::new(index(pair[0])?, index(pair[1])?));
            }
            let mesh = MeshTopology::unstructured(
                dim,
                coords,
                table,
                kind == KIND_UNSTRUCTURED_SYMMETRIC,
            )?;
            Ok(Header { mesh, t0, horizon })
        }
        other => Err(FormatError::BadKind(other)),
    }
}

pub fn encode_flowmap(field: &FlowmapField, mesh: &MeshTopology) -> Result<Vec<u8>, FormatError> {
    if field.dim != mesh.dim() {
        return Err(FormatError::DimMismatch {
            header: field.dim.n(),
            mesh: mesh.dim().n(),
        });
    }
    if field.npoints != mesh.npoints() || field.values.len() != mesh.npoints() * mesh.dim().n() {
        return Err(FormatError::Invalid(format!(
            "field has {} values for {} points",
            field.values.len(),
            mesh.npoints()
        )));
    }
    let mut w = Writer(Vec::new());
    write_header(&mut w, mesh, field.t0, field.horizon);
    w.f64s(&field.values);
    Ok(w.0)
}

pub fn decode_flowmap(bytes: &[u8]) -> Result<(FlowmapField, MeshTopology), FormatError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let Header { mesh, t0, horizon } = read_mesh_section(&mut r)?;
    let values = r.f64s((mesh.npoints() * mesh.dim().n()) as u64)?;
    if r.remaining() != 0 {
        return Err(FormatError::TrailingBytes(r.remaining()));
    }
    let field = FlowmapField {
        dim: mesh.dim(),
        npoints: mesh.npoints(),
        values,
        t0,
        horizon,
    };
    Ok((field, mesh))
}

/// Topology-only file: header (`t0 = T = 0`), coordinates and neighbor
/// table. Structured meshes are written as explicit (symmetric) tables.
pub fn encode_neighbor_table(mesh: &MeshTopology) -> Vec<u8> {
    let mut w = Writer(Vec::new());
    match mesh.kind() {
        MeshKind::Structured(_) => write_header(&mut w, &mesh.to_unstructured(), 0.0, 0.0),
        MeshKind::Unstructured { .. } => write_header(&mut w, mesh, 0.0, 0.0),
    }
    w.0
}

/// Reads the mesh section of a `.ftlm` stream. Any flowmap values that
/// follow are ignored. A structured header is only accepted when the
/// values it implies are present (i.e. from a full flowmap file).
pub fn decode_neighbor_table(bytes: &[u8]) -> Result<MeshTopology, FormatError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    Ok(read_mesh_section(&mut r)?.mesh)
}

pub fn encode_ftle_field(field: &FtleField) -> Vec<u8> {
    let mut w = Writer(Vec::with_capacity(32 + field.values.len() * 8));
    w.0.extend_from_slice(&FTLE_MAGIC);
    w.u32(FORMAT_VERSION);
    w.u32(field.dim.n() as u32);
    w.u64(field.values.len() as u64);
    w.u64(field.degenerate_count as u64);
    w.f64s(&field.values);
    w.0
}

pub fn decode_ftle_field(bytes: &[u8]) -> Result<FtleField, FormatError> {
    let mut r = Reader { buf: bytes, pos: 0 };
    let (dim, npoints) = read_header(&mut r, FTLE_MAGIC)?;
    let degenerate = r.u64()?;
    let values = r.f64s(npoints)?;
    if r.remaining() != 0 {
        return Err(FormatError::TrailingBytes(r.remaining()));
    }
    if degenerate > npoints {
        return Err(FormatError::Invalid(format!(
            "degenerate count {degenerate} exceeds {npoints} points"
        )));
    }
    Ok(FtleField {
        dim,
        values,
        degenerate_count: degenerate as usize,
    })
}

pub fn write_flowmap(
    path: impl AsRef<Path>,
    field: &FlowmapField,
    mesh: &MeshTopology,
) -> Result<(), FormatError> {
    fs::write(path, encode_flowmap(field, mesh)?)?;
    Ok(())
}

pub fn read_flowmap(path: impl AsRef<Path>) -> Result<(FlowmapField, MeshTopology), FormatError> {
    decode_flowmap(&fs::read(path)?)
}

pub fn write_neighbor_table(
    path: impl AsRef<Path>,
    mesh: &MeshTopology,
) -> Result<(), FormatError> {
    fs::write(path, encode_neighbor_table(mesh))?;
    Ok(())
}

pub fn read_neighbor_table(path: impl AsRef<Path>) -> Result<MeshTopology, FormatError> {
    decode_neighbor_table(&fs::read(path)?)
}

pub fn write_ftle_field(path: impl AsRef<Path>, field: &FtleField) -> Result<(), FormatError> {
    fs::write(path, encode_ftle_field(field))?;
    Ok(())
}

pub fn read_ftle_field(path: impl AsRef<Path>) -> Result<FtleField, FormatError> {
    decode_ftle_field(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_3x3() -> (FlowmapField, MeshTopology) {
        let m = make_structured_grid(&[3, 3], &[1.0, 1.0], &[0.0, 0.0]).unwrap();
        (FlowmapField::identity(&m, 1.0), m)
    }

    #[test]
    fn identity_round_trip() {
        let (f, m) = identity_3x3();
        let bytes = encode_flowmap(&f, &m).unwrap();
        let (f2, m2) = decode_flowmap(&bytes).unwrap();
        assert_eq!(m2, m);
        assert!(f2
            .values
            .iter()
            .zip(&f.values)
            .all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!((f2.t0, f2.horizon), (f.t0, f.horizon));
        assert_eq!(encode_flowmap(&f2, &m2).unwrap(), bytes);
    }

    #[test]
    fn bad_magic() {
        let (f, m) = identity_3x3();
        let mut bytes = encode_flowmap(&f, &m).unwrap();
        bytes[..4].copy_from_slice(b"XXXX");
        assert!(matches!(decode_flowmap(&bytes), Err(FormatError::BadMagic(m)) if &m == b"XXXX"));
    }

    #[test]
    fn distinct_errors() {
        let (f, m) = identity_3x3();
        let bytes = encode_flowmap(&f, &m).unwrap();

        let mut v = bytes.clone();
        v[4] = 2;
        assert!(matches!(
            decode_flowmap(&v),
            Err(FormatError::UnsupportedVersion(2))
        ));

        assert!(matches!(
            decode_flowmap(&bytes[..bytes.len() - 1]),
            Err(FormatError::Truncated { .. })
        ));

        let mut v = bytes.clone();
        v[8] = 4;
        assert!(matches!(decode_flowmap(&v), Err(FormatError::BadDim(4))));

        let mut v = bytes.clone();
        v.push(0);
        assert!(matches!(
            decode_flowmap(&v),
            Err(FormatError::TrailingBytes(1))
        ));

        let mut v = bytes.clone();
        v[12] = 10;
        assert!(matches!(
            decode_flowmap(&v),
            Err(FormatError::NpointsMismatch { .. })
        ));

        let mut v = bytes;
        v[20] = 7;
        assert!(matches!(decode_flowmap(&v), Err(FormatError::BadKind(7))));

        let other = make_structured_grid(&[3, 3, 3], &[1.0; 3], &[0.0; 3]).unwrap();
        assert!(matches!(
            encode_flowmap(&f, &other),
            Err(FormatError::DimMismatch { .. })
        ));
    }

    #[test]
    fn header_bytes_by_hand() {
        let mut b = Vec::new();
        b.extend_from_slice(b"FTLM");
        b.extend_from_slice(&1u32.to_le_bytes());
        b.extend_from_slice(&2u32.to_le_bytes());
        b.extend_from_slice(&200_000u64.to_le_bytes());
        b.extend_from_slice(&0u32.to_le_bytes());
        b.extend_from_slice(&500u64.to_le_bytes());
        b.extend_from_slice(&400u64.to_le_bytes());
        for v in [0.004f64, 0.0025, 0.0, 0.0, 0.0, 15.0] {
            b.extend_from_slice(&v.to_le_bytes());
        }
        assert_eq!(u64::from_le_bytes(b[12..20].try_into().unwrap()), 200_000);
        // a structured header without its values is rejected before the grid is built
        let mesh = decode_neighbor_table(&b[..]).unwrap_err();
        assert!(matches!(mesh, FormatError::Truncated { .. }));
        b.extend(std::iter::repeat_n(0u8, 200_000 * 2 * 8));
        let (f, m) = decode_flowmap(&b).unwrap();
        assert_eq!(m.npoints(), 200_000);
        assert_eq!(f.npoints, 200_000);
        assert_eq!(f.horizon, 15.0);
        assert_eq!(m.structured().unwrap().dims, vec![500, 400]);
    }

    #[test]
    fn huge_dims_do_not_overflow() {
        let mut b = Vec::new();
        b.extend_from_slice(b"FTLM");
        b.extend_from_slice(&1u32.to_le_bytes());
        b.extend_from_slice(&3u32.to_le_bytes());
        b.extend_from_slice(&27u64.to_le_bytes());
        b.extend_from_slice(&0u32.to_le_bytes());
        for _ in 0..3 {
            b.extend_from_slice(&u64::MAX.to_le_bytes());
        }
        b.extend(std::iter::repeat_n(0u8, 8 * 8));
        assert!(matches!(
            decode_flowmap(&b),
            Err(FormatError::NpointsMismatch {
                grid: u128::MAX,
                ..
            })
        ));
        assert_eq!(
            make_structured_grid(&[usize::MAX; 3], &[1.0; 3], &[0.0; 3]),
            Err(crate::mesh::MeshError::TooLarge(u128::MAX))
        );
    }

    #[test]
    fn structured_exported_as_table() {
        let (_, m) = identity_3x3();
        let u = m.to_unstructured();
        let back = decode_neighbor_table(&encode_neighbor_table(&u)).unwrap();
        assert_eq!(back.neighbor_table(), m.neighbor_table());
        assert_eq!(back.coords(), m.coords());
        assert_eq!(back.kind(), &MeshKind::Unstructured { symmetric: true });
    }

    #[test]
    fn table_index_out_of_range() {
        let (_, m) = identity_3x3();
        let mut bytes = encode_neighbor_table(&m.to_unstructured());
        // first neighbor word sits after header (24), t0/T (16) and coords (9*2*8)
        let at = 24 + 16 + 9 * 2 * 8;
        bytes[at..at + 8].copy_from_slice(&9i64.to_le_bytes());
        assert!(matches!(
            decode_neighbor_table(&bytes),
            Err(FormatError::Topology(
                crate::mesh::MeshError::NeighborOutOfRange { index: 9, .. }
            ))
        ));
    }

    #[test]
    fn ftle_field_round_trip() {
        let f = FtleField {
            dim: Dim::Three,
            values: vec![0.0, f64::NAN, -1.5, 2.25],
            degenerate_count: 1,
        };
        let back = decode_ftle_field(&encode_ftle_field(&f)).unwrap();
        assert!(back.bit_eq(&f));
        let mut bytes = encode_ftle_field(&f);
        bytes[0] = b'X';
        assert!(matches!(
            decode_ftle_field(&bytes),
            Err(FormatError::BadMagic(_))
        ));
    }
}

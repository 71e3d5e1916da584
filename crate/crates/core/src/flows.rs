//! Analytic velocity fields and RK4 particle advection, used to fabricate
//! flowmap inputs.

use std::f64::consts::PI;

use thiserror::Error;

use crate::field::FlowmapField;
use crate::kernels::{run_chunked, DEFAULT_CHUNK};
use crate::mesh::{Dim, MeshTopology};

/// Slack allowed outside the double-gyre domain. The boundary is invariant
/// in exact arithmetic; round-off in `sin(π·f)` near `x = 2`, `y = 1` nudges
/// boundary particles by ~1e-17 per step.
pub const DOMAIN_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("position {position:?} is outside the double-gyre domain [0,2]x[0,1]")]
    OutsideDomain { position: Vec<f64> },
    #[error("trajectory left the flow domain at step {step}")]
    DomainExit { step: usize },
    #[error("{flow} flow is not defined in {dim} dimensions")]
    WrongDim { flow: &'static str, dim: usize },
    #[error("time step must be non-zero and finite")]
    ZeroStep,
    #[error("time step and horizon must have the same sign")]
    StepSign,
    #[error("flow parameters must be finite")]
    NonFiniteParameter,
    #[error("point {point}: {source}")]
    AtPoint {
        point: usize,
        #[source]
        source: Box<FlowError>,
    },
}

/// Built-in velocity fields.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowSpec {
    /// Time-periodic double gyre on `[0,2]×[0,1]`. Three-dimensional
    /// positions are accepted with the `z` component left at rest.
    DoubleGyre {
        amplitude: f64,
        epsilon: f64,
        omega: f64,
    },
    /// Arnold–Beltrami–Childress flow (3D only).
    Abc {
        a: f64,
        b: f64,
        c: f64,
    },
    Identity,
    ConstantDrift {
        velocity: Vec<f64>,
    },
}

impl FlowSpec {
    /// `A = 0.1`, `ε = 0.25`, `ω = 2π/10`.
    pub fn double_gyre() -> Self {
        FlowSpec::DoubleGyre {
            amplitude: 0.1,
            epsilon: 0.25,
            omega: 2.0 * PI / 10.0,
        }
    }

    /// `A = √3`, `B = √2`, `C = 1`.
    pub fn abc() -> Self {
        FlowSpec::Abc {
            a: 3f64.sqrt(),
            b: 2f64.sqrt(),
            c: 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FlowSpec::DoubleGyre { .. } => "double-gyre",
            FlowSpec::Abc { .. } => "abc",
            FlowSpec::Identity => "identity",
            FlowSpec::ConstantDrift { .. } => "drift",
        }
    }

    fn check(&self, dim: usize) -> Result<(), FlowError> {
        let params: &[f64] = match self {
            FlowSpec::DoubleGyre {
                amplitude,
                epsilon,
                omega,
            } => &[*amplitude, *epsilon, *omega],
            FlowSpec::Abc { a, b, c } => &[*a, *b, *c],
            FlowSpec::Identity => &[],
            FlowSpec::ConstantDrift { velocity } => velocity,
        };
        if params.iter().any(|v| !v.is_finite()) {
            return Err(FlowError::NonFiniteParameter);
        }
        let ok = match self {
            FlowSpec::Abc { .. } => dim == 3,
            FlowSpec::ConstantDrift { velocity } => velocity.len() == dim,
            _ => dim == 2 || dim == 3,
        };
        if ok {
            Ok(())
        } else {
            Err(FlowError::WrongDim {
                flow: self.name(),
                dim,
            })
        }
    }

    /// Velocity at position `x` (length 2 or 3) and time `t`. Entries past
    /// `x.len()` are zero.
    pub fn velocity(&self, x: &[f64], t: f64) -> Result<[f64; 3], FlowError> {
        self.check(x.len())?;
        self.velocity_unchecked(x, t)
    }

    #[inline]
    fn velocity_unchecked(&self, x: &[f64], t: f64) -> Result<[f64; 3], FlowError> {
        match self {
            FlowSpec::DoubleGyre {
                amplitude,
                epsilon,
                omega,
            } => {
                let (px, py) = (x[0], x[1]);
                if !((-DOMAIN_SLACK..=2.0 + DOMAIN_SLACK).contains(&px)
                    && (-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&py))
                {
                    return Err(FlowError::OutsideDomain {
                        position: x.to_vec(),
                    });
                }
                let a = epsilon * (omega * t).sin();
                let b = 1.0 - 2.0 * a;
                let f = a * px * px + b * px;
                let dfdx = 2.0 * a * px + b;
                let u = -PI * amplitude * (PI * f).sin() * (PI * py).cos();
                let v = PI * amplitude * (PI * f).cos() * (PI * py).sin() * dfdx;
                Ok([u, v, 0.0])
            }
            FlowSpec::Abc { a, b, c } => {
                let (px, py, pz) = (x[0], x[1], x[2]);
                Ok([
                    a * pz.sin() + c * py.cos(),
                    b * px.sin() + a * pz.cos(),
                    c * py.sin() + b * px.cos(),
                ])
            }
            FlowSpec::Identity => Ok([0.0; 3]),
            FlowSpec::ConstantDrift { velocity } => {
                let mut out = [0.0; 3];
                out[..velocity.len()].copy_from_slice(velocity);
                Ok(out)
            }
        }
    }
}

/// Number of RK4 steps for `horizon / dt`; a ratio within 1e-9 of an integer
/// counts as that integer.
fn step_count(horizon: f64, dt: f64) -> usize {
    let ratio = horizon / dt;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Classical fourth-order Runge–Kutta from `t0` to `t0 + horizon`.
///
/// Step `k` starts at `t0 + k·dt`; the final step is shortened so the
/// trajectory lands exactly at `t0 + horizon`.
pub fn advect_rk4(
    spec: &FlowSpec,
    x0: &[f64],
    t0: f64,
    horizon: f64,
    dt: f64,
) -> Result<Vec<f64>, FlowError> {
    spec.check(x0.len())?;
    check_step(horizon, dt)?;
    let mut x = [0.0; 3];
    x[..x0.len()].copy_from_slice(x0);
    advect_in_place(spec, x0.len(), &mut x, t0, horizon, dt)?;
    Ok(x[..x0.len()].to_vec())
}

fn check_step(horizon: f64, dt: f64) -> Result<(), FlowError> {
    if dt == 0.0 || !dt.is_finite() || !horizon.is_finite() {
        return Err(FlowError::ZeroStep);
    }
    if horizon != 0.0 && horizon.signum() != dt.signum() {
        return Err(FlowError::StepSign);
    }
    Ok(())
}

#[inline]
fn advect_in_place(
    spec: &FlowSpec,
    d: usize,
    x: &mut [f64; 3],
    t0: f64,
    horizon: f64,
    dt: f64,
) -> Result<(), FlowError> {
    let n = step_count(horizon, dt);
    let t_end = t0 + horizon;
    let at = |step: usize| move |_| FlowError::DomainExit { step };
    for step in 0..n {
        let t = t0 + step as f64 * dt;
        let h = if step + 1 == n { t_end - t } else { dt };
        let k1 = spec.velocity_unchecked(&x[..d], t).map_err(at(step))?;
        let y = offset(x, &k1, 0.5 * h);
        let k2 = spec
            .velocity_unchecked(&y[..d], t + 0.5 * h)
            .map_err(at(step))?;
        let y = offset(x, &k2, 0.5 * h);
        let k3 = spec
            .velocity_unchecked(&y[..d], t + 0.5 * h)
            .map_err(at(step))?;
        let y = offset(x, &k3, h);
        let k4 = spec.velocity_unchecked(&y[..d], t + h).map_err(at(step))?;
        for i in 0..d {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    if let FlowSpec::DoubleGyre { .. } = spec {
        spec.velocity_unchecked(&x[..d], t_end).map_err(at(n))?;
    }
    Ok(())
}

#[inline]
fn offset(x: &[f64; 3], k: &[f64; 3], h: f64) -> [f64; 3] {
    [x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2]]
}

/// Advects every mesh point; `values[p] = advect_rk4(coords[p])`.
///
/// Points are processed in chunks across the available cores; each point
/// is integrated independently, so the result does not depend on the
/// scheduling.
pub fn generate_flowmap(
    mesh: &MeshTopology,
    spec: &FlowSpec,
    t0: f64,
    horizon: f64,
    dt: f64,
) -> Result<FlowmapField, FlowError> {
    let d = mesh.dim().n();
    spec.check(d)?;
    check_step(horizon, dt)?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut values = mesh.coords().to_vec();
    run_chunked(&mut values, d, workers, DEFAULT_CHUNK, |start, run| {
        for (k, pos) in run.chunks_mut(d).enumerate() {
            let mut x = [0.0; 3];
            x[..d].copy_from_slice(pos);
            advect_in_place(spec, d, &mut x, t0, horizon, dt).map_err(|e| (start + k, e))?;
            pos.copy_from_slice(&x[..d]);
        }
        Ok(0)
    })
    .map_err(|(point, e)| FlowError::AtPoint {
        point,
        source: Box::new(e),
    })?;
    Ok(FlowmapField {
        dim: mesh.dim(),
        npoints: mesh.npoints(),
        values,
        t0,
        horizon,
    })
}

/// Default spatial domain for a flow: `[lo, hi]` per axis.
pub fn default_domain(spec: &FlowSpec, dim: Dim) -> Vec<(f64, f64)> {
    match (spec, dim) {
        (FlowSpec::DoubleGyre { .. }, Dim::Two) => vec![(0.0, 2.0), (0.0, 1.0)],
        (FlowSpec::DoubleGyre { .. }, Dim::Three) => vec![(0.0, 2.0), (0.0, 1.0), (0.0, 1.0)],
        (FlowSpec::Abc { .. }, _) => vec![(0.0, 2.0 * PI); dim.n()],
        _ => vec![(0.0, 1.0); dim.n()],
    }
}

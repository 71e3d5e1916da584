use super::KernelError;

/// Largest-eigenvalue threshold below which a point is reported degenerate.
pub const DEGENERACY_FLOOR: f64 = 1e-30;

/// `ln(λ_max) / (2|T|)`, or `NaN` when `λ_max` is below
/// [`DEGENERACY_FLOOR`] (or is itself NaN). Backward-time horizons use `|T|`.
#[inline]
pub fn ftle_point(lambda_max: f64, horizon: f64) -> Result<f64, KernelError> {
    if horizon == 0.0 {
        return Err(KernelError::ZeroHorizon);
    }
    Ok(exponent(lambda_max, horizon))
}

#[inline]
pub(crate) fn exponent(lambda_max: f64, horizon: f64) -> f64 {
    if lambda_max >= DEGENERACY_FLOOR {
        lambda_max.ln() / (2.0 * horizon.abs())
    } else {
        f64::NAN
    }
}

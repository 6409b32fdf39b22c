use rayon::prelude::*;

use super::grid::CylGrid;
use super::NumericsError;

/// `2π ∬ f(ρ, z) ρ dρ dz` for an azimuthally symmetric integrand, assumed
/// smooth through the axis.
///
/// Rows are evaluated in parallel and summed in a fixed order, so the result
/// does not depend on the thread count.
pub fn integrate_cylindrical<F>(f: F, grid: &CylGrid) -> Result<f64, NumericsError>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    let (rho, wr) = (grid.rho.nodes(), grid.rho.radial_weights());
    let (z, wz) = (grid.z.nodes(), grid.z.weights());
    let rows: Vec<f64> = rho
        .par_iter()
        .zip(wr.par_iter())
        .map(|(&r, &w)| {
            let inner: f64 = z.iter().zip(wz).map(|(&zj, &wj)| wj * f(r, zj)).sum();
            w * inner
        })
        .collect();
    let total = 2.0 * std::f64::consts::PI * rows.iter().sum::<f64>();
    if total.is_finite() {
        Ok(total)
    } else {
        Err(NumericsError::NonFinite("cylindrical integrand"))
    }
}

/// Same as [`integrate_cylindrical`] for precomputed samples, row-major in ρ.
pub fn integrate_samples(values: &[f64], grid: &CylGrid) -> Result<f64, NumericsError> {
    let n = grid.n_rho() * grid.n_z();
    if values.len() != n {
        return Err(NumericsError::LengthMismatch {
            expected: n,
            got: values.len(),
        });
    }
    let nz = grid.n_z();
    let (wr, wz) = (grid.rho.radial_weights(), grid.z.weights());
    let mut total = 0.0;
    for (i, w) in wr.iter().enumerate() {
        let row = &values[i * nz..(i + 1) * nz];
        let inner: f64 = row.iter().zip(wz).map(|(v, w)| v * w).sum();
        total += w * inner;
    }
    let total = 2.0 * std::f64::consts::PI * total;
    if total.is_finite() {
        Ok(total)
    } else {
        Err(NumericsError::NonFinite("cylindrical integrand"))
    }
}

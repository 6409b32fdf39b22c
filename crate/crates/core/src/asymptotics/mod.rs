//! Radial profiles at fixed time, power-law fits and exponent scans.

pub mod fit;
pub mod profile;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Branch, EdeptParams, FieldError};

pub use fit::{fit_power_law, FitWindow, PowerLawFit, MIN_FIT_SAMPLES};
pub use profile::{log_radii, polar_direction, sample_radial_profile, Quantity, RadialProfile, SampleFlag};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AsymptoticsError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("invalid radii: {0}")]
    InvalidRadii(String),
    #[error("direction {0:?} has no length")]
    InvalidDirection([f64; 3]),
    #[error("only {usable} usable samples in the window ({excluded} excluded), need {needed}")]
    TooFewSamples {
        usable: usize,
        excluded: usize,
        needed: usize,
    },
}

/// Exponents the closed form is expected to show.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Prediction {
    pub alpha: u32,
    pub potential_exponent: f64,
    pub branch: Branch,
    /// Known only for α = 1.
    pub detection_rate_exponent: Option<f64>,
    pub energy_density_exponent: Option<f64>,
}

pub fn predicted_exponents(alpha: u32) -> Prediction {
    let (rate, energy) = if alpha == 1 { (Some(10.0), Some(10.0)) } else { (None, None) };
    Prediction {
        alpha,
        potential_exponent: alpha as f64 + 2.0,
        branch: Branch::parity_default(alpha),
        detection_rate_exponent: rate,
        energy_density_exponent: energy,
    }
}

/// Which real view a column is measured on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum View {
    /// The parity-rule branch for each α.
    Parity,
    /// Complex magnitudes of the closed form.
    Analytic,
}

impl View {
    pub fn branch(&self, alpha: u32) -> Branch {
        match self {
            View::Parity => Branch::parity_default(alpha),
            View::Analytic => Branch::Analytic,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanColumn {
    pub quantity: Quantity,
    pub view: View,
}

/// Radii and windows are in units of `max(g1, g2)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub t: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
    pub window: FitWindow,
    /// Second window; the two fits must agree within `window_tolerance`.
    pub check_window: FitWindow,
    pub window_tolerance: f64,
    pub r2_floor: f64,
    pub columns: Vec<ScanColumn>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        let col = |quantity, view| ScanColumn { quantity, view };
        ScanConfig {
            t: 0.0,
            r_min: 50.0,
            r_max: 1000.0,
            samples: 97,
            window: FitWindow::new(50.0, 500.0),
            check_window: FitWindow::new(100.0, 1000.0),
            window_tolerance: 0.1,
            r2_floor: 0.999,
            columns: vec![
                col(Quantity::AbsA, View::Parity),
                col(Quantity::AbsE, View::Analytic),
                col(Quantity::UTotal, View::Parity),
                col(Quantity::UElectric, View::Analytic),
                col(Quantity::DetectionRate, View::Parity),
            ],
        }
    }
}

/// One fitted cell of the scan table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanCell {
    pub column: ScanColumn,
    pub branch: Branch,
    pub fit: Option<PowerLawFit>,
    pub check_fit: Option<PowerLawFit>,
    /// `|p(window) − p(check_window)|`.
    pub window_gap: Option<f64>,
    /// The fit is usable: both windows fitted, R² above the floor and the
    /// windows agree.
    pub reliable: bool,
    pub note: Option<String>,
    #[serde(skip)]
    pub profile: RadialProfile,
}

impl ScanCell {
    pub fn exponent(&self) -> Option<f64> {
        self.fit.map(|f| f.exponent)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub alpha: u32,
    pub prediction: Prediction,
    pub cells: Vec<ScanCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanTable {
    pub direction: [f64; 3],
    pub t: f64,
    pub rows: Vec<ScanRow>,
    /// Per column: `p(α_{i+1}) − p(α_i)` for consecutive rows.
    pub differences: Vec<Vec<Option<f64>>>,
}

impl ScanTable {
    pub fn column(&self, q: Quantity, view: View) -> Option<usize> {
        self.rows
            .first()?
            .cells
            .iter()
            .position(|c| c.column.quantity == q && c.column.view == view)
    }
}

/// Fits one quantity along one ray for the given parameters.
pub fn fit_cell(params: &EdeptParams, column: ScanColumn, direction: [f64; 3], cfg: &ScanConfig) -> Result<ScanCell, AsymptoticsError> {
    let l = params.max_g();
    let p = (*params).with_branch(column.view.branch(params.alpha()));
    let radii = log_radii(cfg.r_min * l, cfg.r_max * l, cfg.samples)?;
    let profile = sample_radial_profile(&p, column.quantity, direction, cfg.t, &radii)?;
    let a = fit_power_law(&profile, cfg.window.scaled(l), cfg.r2_floor);
    let b = fit_power_law(&profile, cfg.check_window.scaled(l), cfg.r2_floor);
    let note = match (&a, &b) {
        (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
        _ => None,
    };
    let (fit, check_fit) = (a.ok(), b.ok());
    let window_gap = match (fit, check_fit) {
        (Some(x), Some(y)) => Some((x.exponent - y.exponent).abs()),
        _ => None,
    };
    let reliable = fit.is_some_and(|f| f.reliable) && window_gap.is_some_and(|g| g <= cfg.window_tolerance);
    Ok(ScanCell {
        column,
        branch: p.branch(),
        fit,
        check_fit,
        window_gap,
        reliable,
        note,
        profile,
    })
}

/// Fitted exponents for every α and column along one direction. Each α uses
/// the geometry of `template` with its own parity branch; unreliable cells
/// are flagged, not fatal.
pub fn exponent_scan(
    template: &EdeptParams,
    alphas: &[u32],
    direction: [f64; 3],
    cfg: &ScanConfig,
) -> Result<ScanTable, AsymptoticsError> {
    let rows: Vec<Result<ScanRow, AsymptoticsError>> = alphas
        .par_iter()
        .map(|&alpha| {
            let p = EdeptParams::new(alpha, template.g0(), template.g1(), template.g2())?
                .with_branch(Branch::parity_default(alpha));
            let cells = cfg
                .columns
                .iter()
                .map(|&c| fit_cell(&p, c, direction, cfg))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(ScanRow {
                alpha,
                prediction: predicted_exponents(alpha),
                cells,
            })
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    let differences = (0..cfg.columns.len())
        .map(|c| {
            rows.windows(2)
                .map(|w| Some(w[1].cells[c].exponent()? - w[0].cells[c].exponent()?))
                .collect()
        })
        .collect();
    Ok(ScanTable {
        direction,
        t: cfg.t,
        rows,
        differences,
    })
}

/// Largest deviation of a sequence of increments from their mean, and the
/// mean itself. `None` if any increment is missing.
pub fn increment_spread(diffs: &[Option<f64>]) -> Option<(f64, f64)> {
    let d: Vec<f64> = diffs.iter().copied().collect::<Option<Vec<_>>>()?;
    if d.is_empty() {
        return None;
    }
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    let lo = d.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Some((hi - lo, mean))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictions() {
        let p = predicted_exponents(1);
        assert_eq!((p.potential_exponent, p.branch), (3.0, Branch::RealPart));
        assert_eq!(p.detection_rate_exponent, Some(10.0));
        let p = predicted_exponents(2);
        assert_eq!((p.potential_exponent, p.branch), (4.0, Branch::ImagPart));
        assert_eq!(p.detection_rate_exponent, None);
    }

    #[test]
    fn profile_shape_and_values() {
        let p = EdeptParams::unit(1).unwrap();
        let radii = log_radii(50.0, 5000.0, 40).unwrap();
        let d = polar_direction(std::f64::consts::FRAC_PI_4);
        let prof = sample_radial_profile(&p, Quantity::AbsA, d, 0.0, &radii).unwrap();
        assert_eq!(prof.values.len(), radii.len());
        assert!(prof.radii.windows(2).all(|w| w[1] > w[0]));
        let pt = crate::field::SpacetimePoint::cartesian(0.0, 50.0 * d[0], 0.0, 50.0 * d[2]).unwrap();
        let direct = p.branch().project(crate::field::vector_potential(&p, &pt).unwrap()).abs();
        assert!((prof.values[0] - direct).abs() <= 1e-15 * direct);
        let rate = sample_radial_profile(&p, Quantity::DetectionRate, d, 0.0, &radii).unwrap();
        assert!(rate.values.iter().all(|v| *v >= 0.0));
    }

    #[test]
    fn on_axis_potential_is_flagged_zero() {
        let p = EdeptParams::unit(1).unwrap();
        let radii = log_radii(50.0, 500.0, 20).unwrap();
        let prof = sample_radial_profile(&p, Quantity::AbsA, [0.0, 0.0, 1.0], 0.0, &radii).unwrap();
        assert!(prof.flags.iter().all(|f| *f == SampleFlag::Zero));
        assert!(fit_power_law(&prof, FitWindow::new(50.0, 500.0), 0.9).is_err());
    }

    #[test]
    fn bad_inputs_rejected() {
        let p = EdeptParams::unit(1).unwrap();
        assert!(sample_radial_profile(&p, Quantity::AbsA, [0.0; 3], 0.0, &[1.0, 2.0]).is_err());
        assert!(sample_radial_profile(&p, Quantity::AbsA, [1.0, 0.0, 0.0], 0.0, &[2.0, 1.0]).is_err());
        assert!(log_radii(0.0, 1.0, 5).is_err());
    }

    #[test]
    fn single_alpha_scan_has_one_row() {
        let p = EdeptParams::unit(1).unwrap();
        let t = exponent_scan(&p, &[1], polar_direction(0.7), &ScanConfig::default()).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert!(t.differences.iter().all(|d| d.is_empty()));
        let c = t.column(Quantity::AbsA, View::Parity).unwrap();
        assert!((t.rows[0].cells[c].exponent().unwrap() - 3.0).abs() < 0.15);
    }

    #[test]
    fn exponent_ignores_g0() {
        let cfg = ScanConfig::default();
        let col = ScanColumn {
            quantity: Quantity::UTotal,
            view: View::Parity,
        };
        let d = polar_direction(0.7);
        let a = fit_cell(&EdeptParams::unit(2).unwrap(), col, d, &cfg).unwrap();
        let b = fit_cell(&EdeptParams::unit(2).unwrap().with_g0(3.7).unwrap(), col, d, &cfg).unwrap();
        assert!((a.exponent().unwrap() - b.exponent().unwrap()).abs() < 0.01);
    }
}

use serde::{Deserialize, Serialize};

use super::{AsymptoticsError, RadialProfile, SampleFlag};

/// Inclusive radial window `[r_min, r_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitWindow {
    pub r_min: f64,
    pub r_max: f64,
}

impl FitWindow {
    pub fn new(r_min: f64, r_max: f64) -> Self {
        FitWindow { r_min, r_max }
    }

    pub fn scaled(&self, s: f64) -> Self {
        FitWindow::new(self.r_min * s, self.r_max * s)
    }

    fn contains(&self, r: f64) -> bool {
        r >= self.r_min * (1.0 - 1e-12) && r <= self.r_max * (1.0 + 1e-12)
    }
}

pub const MIN_FIT_SAMPLES: usize = 8;

/// `value ≈ prefactor · r^(−exponent)` over a window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub window: FitWindow,
    pub r_squared: f64,
    pub used: usize,
    /// Samples in the window left out because they were zero or flagged.
    pub excluded: usize,
    /// Largest |log residual| of the line.
    pub max_log_residual: f64,
    /// `r_squared` reached the floor the fit was asked to meet.
    pub reliable: bool,
}

/// Least-squares line through `(log r, log value)` on the window.
pub fn fit_power_law(profile: &RadialProfile, window: FitWindow, r2_floor: f64) -> Result<PowerLawFit, AsymptoticsError> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut excluded = 0;
    for ((r, v), f) in profile.radii.iter().zip(&profile.values).zip(&profile.flags) {
        if !window.contains(*r) {
            continue;
        }
        if *f == SampleFlag::Ok && *v > 0.0 {
            xs.push(r.ln());
            ys.push(v.ln());
        } else {
            excluded += 1;
        }
    }
    if xs.len() < MIN_FIT_SAMPLES {
        return Err(AsymptoticsError::TooFewSamples {
            usable: xs.len(),
            excluded,
            needed: MIN_FIT_SAMPLES,
        });
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icept = my - slope * mx;
    let resid: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y - (icept + slope * x)).collect();
    let ss_res: f64 = resid.iter().map(|r| r * r).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    // A flat profile is fitted exactly by slope zero.
    let r2 = if ss_tot <= 1e-28 * n { 1.0 } else { (1.0 - ss_res / ss_tot).clamp(0.0, 1.0) };
    Ok(PowerLawFit {
        exponent: -slope,
        prefactor: icept.exp(),
        window,
        r_squared: r2,
        used: xs.len(),
        excluded,
        max_log_residual: resid.iter().fold(0.0, |m, r| m.max(r.abs())),
        reliable: r2 >= r2_floor,
    })
}

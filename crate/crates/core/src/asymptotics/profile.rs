use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::AsymptoticsError;
use crate::field::{em_fields, Branch, EdeptParams, EnergyDensitySample, FieldError, SpacetimePoint};
use crate::numerics::DifferentiationScheme;

/// A field quantity sampled along a ray.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "abs_A")]
    AbsA,
    #[serde(rename = "abs_E")]
    AbsE,
    #[serde(rename = "abs_B")]
    AbsB,
    #[serde(rename = "u_total")]
    UTotal,
    #[serde(rename = "u_electric")]
    UElectric,
    #[serde(rename = "detection_rate")]
    DetectionRate,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::AbsA,
        Quantity::AbsE,
        Quantity::AbsB,
        Quantity::UTotal,
        Quantity::UElectric,
        Quantity::DetectionRate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::AbsA => "abs_A",
            Quantity::AbsE => "abs_E",
            Quantity::AbsB => "abs_B",
            Quantity::UTotal => "u_total",
            Quantity::UElectric => "u_electric",
            Quantity::DetectionRate => "detection_rate",
        }
    }

    /// Value at one point. Real branches use the projected fields, the
    /// analytic branch uses complex magnitudes.
    pub fn evaluate(&self, params: &EdeptParams, point: &SpacetimePoint) -> Result<f64, FieldError> {
        let f = em_fields(params, point, DifferentiationScheme::DualNumber)?;
        let mag = |real: &[f64; 3], cplx: &[num_complex::Complex64; 3]| match f.branch {
            Branch::Analytic => cplx.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt(),
            _ => real.iter().map(|x| x * x).sum::<f64>().sqrt(),
        };
        Ok(match self {
            Quantity::AbsA => mag(&f.real_a, &f.a),
            Quantity::AbsE => mag(&f.real_e, &f.e),
            Quantity::AbsB => mag(&f.real_b, &f.b),
            q => {
                let u = EnergyDensitySample::from_fields(params, &f);
                match q {
                    Quantity::UTotal => u.u_total,
                    Quantity::UElectric => u.u_electric,
                    _ => u.detection_rate,
                }
            }
        })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown quantity `{s}`"))
    }
}

/// Status of one profile sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleFlag {
    Ok,
    /// Exactly zero, e.g. by symmetry or underflow.
    Zero,
    /// The field engine refused the point; the stored value is 0.
    OutOfRange,
}

/// A quantity sampled at `r·direction` for increasing `r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialProfile {
    pub quantity: Quantity,
    pub branch: Branch,
    pub direction: [f64; 3],
    pub t: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub flags: Vec<SampleFlag>,
}

/// `n` log-spaced radii from `min` to `max` inclusive.
pub fn log_radii(min: f64, max: f64, n: usize) -> Result<Vec<f64>, AsymptoticsError> {
    if !(min > 0.0 && max > min && max.is_finite() && n >= 2) {
        return Err(AsymptoticsError::InvalidRadii(format!(
            "need 0 < min < max and n >= 2, got [{min}, {max}] with n = {n}"
        )));
    }
    let (a, b) = (min.ln(), max.ln());
    let mut r: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    r[0] = min;
    r[n - 1] = max;
    Ok(r)
}

/// Unit vector at polar angle `theta` from the z axis, in the x–z plane.
pub fn polar_direction(theta: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    [s, 0.0, c]
}

pub fn sample_radial_profile(
    params: &EdeptParams,
    quantity: Quantity,
    direction: [f64; 3],
    t: f64,
    radii: &[f64],
) -> Result<RadialProfile, AsymptoticsError> {
    let n = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
    if !(n.is_finite() && n > 0.0) {
        return Err(AsymptoticsError::InvalidDirection(direction));
    }
    let dir = direction.map(|d| d / n);
    if radii.is_empty() || radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) || radii.windows(2).any(|w| !(w[1] > w[0]))
    {
        return Err(AsymptoticsError::InvalidRadii("radii must be positive and strictly increasing".into()));
    }
    let samples: Vec<Result<(f64, SampleFlag), AsymptoticsError>> = radii
        .par_iter()
        .map(|&r| {
            let point = SpacetimePoint::cartesian(t, r * dir[0], r * dir[1], r * dir[2])?;
            match quantity.evaluate(params, &point) {
                Ok(v) if v == 0.0 => Ok((0.0, SampleFlag::Zero)),
                Ok(v) if v.is_finite() => Ok((v, SampleFlag::Ok)),
                Ok(_) | Err(FieldError::OutOfRange(_)) => Ok((0.0, SampleFlag::OutOfRange)),
                Err(e) => Err(e.into()),
            }
        })
        .collect();
    let mut values = Vec::with_capacity(radii.len());
    let mut flags = Vec::with_capacity(radii.len());
    for s in samples {
        let (v, f) = s?;
        values.push(v);
        flags.push(f);
    }
    Ok(RadialProfile {
        quantity,
        branch: params.branch(),
        direction: dir,
        t,
        radii: radii.to_vec(),
        values,
        flags,
    })
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scalar::{ComplexScalar, Dual, Scalar};
use super::NumericsError;

/// How derivatives are taken.
///
/// `DualNumber` is exact to roundoff and is the default everywhere; the other
/// two are kept as independent oracles.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DifferentiationScheme {
    #[default]
    DualNumber,
    /// `Im f(x + i h) / h`; only valid for real-analytic, real-valued maps.
    ComplexStep { step: f64 },
    /// Second-order central differences.
    CentralDifference { step: f64 },
}

impl DifferentiationScheme {
    pub fn central(step: f64) -> Self {
        DifferentiationScheme::CentralDifference { step }
    }

    pub fn complex_step(step: f64) -> Self {
        DifferentiationScheme::ComplexStep { step }
    }

    pub fn validate(&self) -> Result<(), NumericsError> {
        match *self {
            DifferentiationScheme::DualNumber => Ok(()),
            DifferentiationScheme::ComplexStep { step }
            | DifferentiationScheme::CentralDifference { step } => {
                if step.is_finite() && step > 0.0 {
                    Ok(())
                } else {
                    Err(NumericsError::InvalidStep(step))
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DifferentiationScheme::DualNumber => "dual_number",
            DifferentiationScheme::ComplexStep { .. } => "complex_step",
            DifferentiationScheme::CentralDifference { .. } => "central_difference",
        }
    }
}

/// A real-valued map of one real variable, evaluable on any [`Scalar`].
pub trait RealMap {
    fn eval<T: Scalar>(&self, x: T) -> T;
}

/// A complex-valued map of one real variable.
pub trait ComplexMap {
    fn eval<T: ComplexScalar>(&self, x: T) -> T;
}

/// Checks that `x ± h` are distinct from `x` in floating point.
pub fn checked_step(x: f64, step: f64) -> Result<f64, NumericsError> {
    if !(step.is_finite() && step > 0.0) {
        return Err(NumericsError::InvalidStep(step));
    }
    if x + step == x || x - step == x {
        return Err(NumericsError::StepUnderflow { x, step });
    }
    Ok(step)
}

pub fn derivative<F: RealMap>(
    f: &F,
    x: f64,
    scheme: DifferentiationScheme,
) -> Result<f64, NumericsError> {
    scheme.validate()?;
    let d = match scheme {
        DifferentiationScheme::DualNumber => f.eval(Dual::variable(x)).eps,
        DifferentiationScheme::ComplexStep { step } => {
            if step < f64::MIN_POSITIVE {
                return Err(NumericsError::StepUnderflow { x, step });
            }
            f.eval(Complex64::new(x, step)).im / step
        }
        DifferentiationScheme::CentralDifference { step } => {
            let h = checked_step(x, step)?;
            (f.eval(x + h) - f.eval(x - h)) / (2.0 * h)
        }
    };
    if d.is_finite() {
        Ok(d)
    } else {
        Err(NumericsError::NonFinite("derivative"))
    }
}

/// Derivative of a complex-valued map of a real variable. Complex step is
/// rejected: the map's own imaginary unit collides with the step direction.
pub fn derivative_complex<F: ComplexMap>(
    f: &F,
    x: f64,
    scheme: DifferentiationScheme,
) -> Result<Complex64, NumericsError> {
    scheme.validate()?;
    let d = match scheme {
        DifferentiationScheme::DualNumber => f.eval(Dual::variable(Complex64::new(x, 0.0))).eps,
        DifferentiationScheme::ComplexStep { .. } => {
            return Err(NumericsError::SchemeNotApplicable {
                scheme: scheme.name(),
                reason: "map is complex-valued",
            })
        }
        DifferentiationScheme::CentralDifference { step } => {
            let h = checked_step(x, step)?;
            let fp: Complex64 = f.eval(Complex64::new(x + h, 0.0));
            let fm: Complex64 = f.eval(Complex64::new(x - h, 0.0));
            (fp - fm) / (2.0 * h)
        }
    };
    if Scalar::is_finite(&d) {
        Ok(d)
    } else {
        Err(NumericsError::NonFinite("derivative"))
    }
}

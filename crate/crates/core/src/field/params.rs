use serde::{Deserialize, Serialize};

use super::FieldError;

/// Physical constants in natural units. Immutable once built.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    c: f64,
    eps0: f64,
    mu0: f64,
    hbar: f64,
}

impl PhysicalConstants {
    pub const NATURAL: PhysicalConstants = PhysicalConstants {
        c: 1.0,
        eps0: 1.0,
        mu0: 1.0,
        hbar: 1.0,
    };

    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn eps0(&self) -> f64 {
        self.eps0
    }
    pub fn mu0(&self) -> f64 {
        self.mu0
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::NATURAL
    }
}

/// Which real solution is read off the complex closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    RealPart,
    ImagPart,
    /// Keep the complex field. Real views use its real part; energy
    /// densities use complex magnitudes.
    Analytic,
}

impl Branch {
    /// Real part for odd α, imaginary part for even α.
    pub fn parity_default(alpha: u32) -> Branch {
        if alpha % 2 == 1 {
            Branch::RealPart
        } else {
            Branch::ImagPart
        }
    }

    pub fn project(&self, v: num_complex::Complex64) -> f64 {
        match self {
            Branch::RealPart | Branch::Analytic => v.re,
            Branch::ImagPart => v.im,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Branch::RealPart => "real_part",
            Branch::ImagPart => "imag_part",
            Branch::Analytic => "analytic",
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "real_part" | "real" | "re" => Ok(Branch::RealPart),
            "imag_part" | "imag" | "im" => Ok(Branch::ImagPart),
            "analytic" => Ok(Branch::Analytic),
            other => Err(format!("unknown branch `{other}` (expected real_part, imag_part or analytic)")),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    alpha: u32,
    g0: f64,
    g1: f64,
    g2: f64,
    #[serde(default)]
    branch: Option<Branch>,
}

/// Parameters of the pulse family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct EdeptParams {
    alpha: u32,
    g0: f64,
    g1: f64,
    g2: f64,
    branch: Branch,
    #[serde(skip)]
    prefactor: f64,
}

impl TryFrom<RawParams> for EdeptParams {
    type Error = FieldError;
    fn try_from(r: RawParams) -> Result<Self, FieldError> {
        let p = EdeptParams::new(r.alpha, r.g0, r.g1, r.g2)?;
        Ok(match r.branch {
            Some(b) => p.with_branch(b),
            None => p,
        })
    }
}

impl EdeptParams {
    /// Builds validated parameters with the parity-rule branch.
    pub fn new(alpha: u32, g0: f64, g1: f64, g2: f64) -> Result<Self, FieldError> {
        if alpha < 1 {
            return Err(FieldError::InvalidParams(format!("alpha must be >= 1, got {alpha}")));
        }
        if alpha > 64 {
            return Err(FieldError::InvalidParams(format!("alpha {alpha} is unreasonably large (max 64)")));
        }
        for (name, g) in [("g0", g0), ("g1", g1), ("g2", g2)] {
            if !(g.is_finite() && g > 0.0) {
                return Err(FieldError::InvalidParams(format!("{name} must be positive and finite, got {g}")));
            }
        }
        let mu0 = PhysicalConstants::NATURAL.mu0();
        let prefactor = 2.0 * alpha as f64 * mu0 * g0.powi(alpha as i32);
        if !(prefactor.is_finite() && prefactor > 0.0) {
            return Err(FieldError::OutOfRange("amplitude prefactor 2αμ0·g0^α"));
        }
        Ok(EdeptParams {
            alpha,
            g0,
            g1,
            g2,
            branch: Branch::parity_default(alpha),
            prefactor,
        })
    }

    /// The α = 1, g0 = g1 = g2 = 1 reference pulse.
    pub fn unit(alpha: u32) -> Result<Self, FieldError> {
        Self::new(alpha, 1.0, 1.0, 1.0)
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn with_g0(self, g0: f64) -> Result<Self, FieldError> {
        Ok(Self::new(self.alpha, g0, self.g1, self.g2)?.with_branch(self.branch))
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }
    pub fn g0(&self) -> f64 {
        self.g0
    }
    pub fn g1(&self) -> f64 {
        self.g1
    }
    pub fn g2(&self) -> f64 {
        self.g2
    }
    pub fn branch(&self) -> Branch {
        self.branch
    }
    pub fn constants(&self) -> PhysicalConstants {
        PhysicalConstants::NATURAL
    }

    /// `2αμ0·g0^α`.
    pub fn prefactor(&self) -> f64 {
        self.prefactor
    }

    pub fn max_g(&self) -> f64 {
        self.g1.max(self.g2)
    }

    pub fn min_g(&self) -> f64 {
        self.g1.min(self.g2)
    }
}

/// A point in spacetime, stored in cylindrical form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimePoint {
    pub t: f64,
    rho: f64,
    theta: f64,
    pub z: f64,
}

impl SpacetimePoint {
    pub fn cylindrical(t: f64, rho: f64, theta: f64, z: f64) -> Result<Self, FieldError> {
        if !(rho >= 0.0) || !rho.is_finite() {
            return Err(FieldError::InvalidPoint(format!("rho must be finite and >= 0, got {rho}")));
        }
        if !(t.is_finite() && theta.is_finite() && z.is_finite()) {
            return Err(FieldError::InvalidPoint("coordinates must be finite".into()));
        }
        Ok(SpacetimePoint {
            t,
            rho,
            theta: theta.rem_euclid(std::f64::consts::TAU),
            z,
        })
    }

    pub fn cartesian(t: f64, x: f64, y: f64, z: f64) -> Result<Self, FieldError> {
        if !(x.is_finite() && y.is_finite()) {
            return Err(FieldError::InvalidPoint("coordinates must be finite".into()));
        }
        Self::cylindrical(t, x.hypot(y), y.atan2(x), z)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn x(&self) -> f64 {
        self.rho * self.theta.cos()
    }
    pub fn y(&self) -> f64 {
        self.rho * self.theta.sin()
    }
    pub fn tau(&self, c: f64) -> f64 {
        c * self.t
    }
    pub fn r(&self) -> f64 {
        self.rho.hypot(self.z)
    }

    /// `ê_ρ` and `ê_θ` in Cartesian components.
    pub fn frame(&self) -> ([f64; 3], [f64; 3]) {
        let (s, c) = self.theta.sin_cos();
        ([c, s, 0.0], [-s, c, 0.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_consistent() {
        let k = PhysicalConstants::NATURAL;
        assert_eq!(k.eps0() * k.mu0() * k.c() * k.c(), 1.0);
    }

    #[test]
    fn parity_rule() {
        assert_eq!(Branch::parity_default(1), Branch::RealPart);
        assert_eq!(Branch::parity_default(2), Branch::ImagPart);
        assert_eq!(EdeptParams::unit(3).unwrap().branch(), Branch::RealPart);
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(EdeptParams::new(0, 1.0, 1.0, 1.0).is_err());
        assert!(EdeptParams::new(1, -1.0, 1.0, 1.0).is_err());
        assert!(EdeptParams::new(1, 1.0, 0.0, 1.0).is_err());
        assert!(EdeptParams::new(1, 1.0, 1.0, f64::NAN).is_err());
        assert!(EdeptParams::new(40, 1e300, 1.0, 1.0).is_err());
    }

    #[test]
    fn params_round_trip_through_json() {
        let p = EdeptParams::new(2, 0.5, 1.5, 2.0).unwrap().with_branch(Branch::Analytic);
        let s = serde_json::to_string(&p).unwrap();
        let q: EdeptParams = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(serde_json::from_str::<EdeptParams>(r#"{"alpha":0,"g0":1,"g1":1,"g2":1}"#).is_err());
    }

    #[test]
    fn cartesian_and_cylindrical_views_agree() {
        let p = SpacetimePoint::cartesian(0.3, -1.2, 0.7, 2.0).unwrap();
        assert!((p.x() + 1.2).abs() < 1e-15);
        assert!((p.y() - 0.7).abs() < 1e-15);
        assert!((p.r() - (1.2f64 * 1.2 + 0.49 + 4.0).sqrt()).abs() < 1e-15);
        assert!(SpacetimePoint::cylindrical(0.0, -1.0, 0.0, 0.0).is_err());
    }
}

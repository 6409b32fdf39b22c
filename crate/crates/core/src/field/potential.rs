use num_complex::Complex64;

use super::params::{EdeptParams, SpacetimePoint};
use super::FieldError;
use crate::numerics::{ComplexScalar, Dual};

type C = Complex64;
type Hyper = Dual<Dual<C>>;

/// `D = ρ² + z² − τ² + i(g2−g1)z − i(g2+g1)τ + g1·g2`.
pub fn denominator(params: &EdeptParams, tau: f64, rho: f64, z: f64) -> C {
    C::new(
        rho * rho + z * z - tau * tau + params.g1() * params.g2(),
        (params.g2() - params.g1()) * z - (params.g2() + params.g1()) * tau,
    )
}

/// `ψ = A_θ/ρ` as a function of `(τ, s = ρ², z)`.
///
/// Written as `w^{α-1} q²` with `q = 1/D` and `w = (g1 + i(z−τ))·q`, which
/// keeps every intermediate bounded where the result is.
pub(crate) fn psi<T: ComplexScalar>(params: &EdeptParams, tau: T, s: T, z: T) -> T {
    let i = T::i();
    let n = T::from_f64(params.g1()) + i * (z - tau);
    let m = T::from_f64(params.g2()) - i * (z + tau);
    let q = (s + n * m).recip();
    let w = n * q;
    let mut out = q * q.scale(params.prefactor());
    if params.alpha() > 1 {
        out = out * w.powi(params.alpha() as i32 - 1);
    }
    out
}

fn guard(params: &EdeptParams, tau: f64, s: f64, z: f64) -> Result<(), FieldError> {
    let d = C::new(
        s + z * z - tau * tau + params.g1() * params.g2(),
        (params.g2() - params.g1()) * z - (params.g2() + params.g1()) * tau,
    );
    if d.re.is_finite() && d.im.is_finite() {
        Ok(())
    } else {
        Err(FieldError::OutOfRange("denominator"))
    }
}

/// Complex azimuthal potential `A_θ` at a point.
pub fn vector_potential(params: &EdeptParams, point: &SpacetimePoint) -> Result<C, FieldError> {
    let tau = point.tau(params.constants().c());
    let s = point.rho() * point.rho();
    guard(params, tau, s, point.z)?;
    let a = C::new(point.rho(), 0.0) * psi(params, C::new(tau, 0.0), C::new(s, 0.0), C::new(point.z, 0.0));
    if a.re.is_finite() && a.im.is_finite() {
        Ok(a)
    } else {
        Err(FieldError::OutOfRange("vector potential"))
    }
}

/// `ψ` and the derivatives the fields and their time derivatives need.
/// Subscripts are partials in `τ`, `s = ρ²` and `z`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiJet {
    pub psi: C,
    pub psi_t: C,
    pub psi_s: C,
    pub psi_z: C,
    pub psi_tt: C,
    pub psi_ts: C,
    pub psi_tz: C,
}

fn seeded(v: f64, outer: bool, inner: bool) -> Hyper {
    let one = |b: bool| C::new(if b { 1.0 } else { 0.0 }, 0.0);
    Dual::new(Dual::new(C::new(v, 0.0), one(inner)), Dual::new(one(outer), C::new(0.0, 0.0)))
}

impl PsiJet {
    /// Exact jet from three hyper-dual evaluations.
    pub fn at(params: &EdeptParams, tau: f64, s: f64, z: f64) -> Result<Self, FieldError> {
        guard(params, tau, s, z)?;
        let tt = psi(params, seeded(tau, true, true), seeded(s, false, false), seeded(z, false, false));
        let ts = psi(params, seeded(tau, true, false), seeded(s, false, true), seeded(z, false, false));
        let tz = psi(params, seeded(tau, true, false), seeded(s, false, false), seeded(z, false, true));
        let jet = PsiJet {
            psi: tt.re.re,
            psi_t: tt.eps.re,
            psi_tt: tt.eps.eps,
            psi_s: ts.re.eps,
            psi_ts: ts.eps.eps,
            psi_z: tz.re.eps,
            psi_tz: tz.eps.eps,
        };
        let all = [jet.psi, jet.psi_t, jet.psi_s, jet.psi_z, jet.psi_tt, jet.psi_ts, jet.psi_tz];
        if all.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            Ok(jet)
        } else {
            Err(FieldError::OutOfRange("potential derivatives"))
        }
    }
}

/// Complex cylindrical field components and their time derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CylFields {
    pub a_theta: C,
    pub dt_a_theta: C,
    pub e_theta: C,
    pub dt_e_theta: C,
    pub b_rho: C,
    pub dt_b_rho: C,
    pub b_z: C,
    pub dt_b_z: C,
}

/// Fields of the purely azimuthal potential from the exact jet. `B_z` uses
/// `2ψ + 2sψ_s`, which is regular on the axis.
pub fn cylindrical_fields(params: &EdeptParams, t: f64, rho: f64, z: f64) -> Result<CylFields, FieldError> {
    let c = params.constants().c();
    let s = rho * rho;
    let j = PsiJet::at(params, c * t, s, z)?;
    let r = C::new(rho, 0.0);
    Ok(CylFields {
        a_theta: r * j.psi,
        dt_a_theta: r * j.psi_t * c,
        e_theta: -r * j.psi_t * c,
        dt_e_theta: -r * j.psi_tt * (c * c),
        b_rho: -r * j.psi_z,
        dt_b_rho: -r * j.psi_tz * c,
        b_z: (j.psi + j.psi_s * s) * 2.0,
        dt_b_z: (j.psi_t + j.psi_ts * s) * (2.0 * c),
    })
}

/// Cartesian potential `(−yψ, xψ, 0)` on any complex scalar.
pub(crate) fn cartesian_potential<T: ComplexScalar>(params: &EdeptParams, v: [T; 4]) -> [T; 3] {
    let [tau, x, y, z] = v;
    let p = psi(params, tau, x * x + y * y, z);
    [-(y * p), x * p, T::from_f64(0.0)]
}

pub(crate) fn guard_cartesian(params: &EdeptParams, v: [f64; 4]) -> Result<(), FieldError> {
    guard(params, v[0], v[1] * v[1] + v[2] * v[2], v[3])
}

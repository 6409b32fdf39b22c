use num_complex::Complex64;

use super::params::{Branch, EdeptParams, SpacetimePoint};
use super::potential::{cartesian_potential, cylindrical_fields, guard_cartesian};
use super::{local_length, FieldError};
use crate::numerics::diff::checked_step;
use crate::numerics::{DifferentiationScheme, NumericsError};

type C = Complex64;

/// Complex fields at a point plus their branch-projected real views.
/// Vectors are Cartesian `(x, y, z)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample {
    pub point: SpacetimePoint,
    pub branch: Branch,
    pub a: [C; 3],
    pub e: [C; 3],
    pub b: [C; 3],
    pub real_a: [f64; 3],
    pub real_e: [f64; 3],
    pub real_b: [f64; 3],
}

fn dot(v: &[C; 3], u: &[f64; 3]) -> C {
    v[0] * u[0] + v[1] * u[1] + v[2] * u[2]
}

fn norm2(v: &[C; 3]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

impl FieldSample {
    fn build(point: SpacetimePoint, branch: Branch, a: [C; 3], e: [C; 3], b: [C; 3]) -> Self {
        let proj = |v: [C; 3]| v.map(|c| branch.project(c));
        FieldSample {
            point,
            branch,
            a,
            e,
            b,
            real_a: proj(a),
            real_e: proj(e),
            real_b: proj(b),
        }
    }

    /// `(ρ, θ, z)` components of a Cartesian vector at this point.
    pub fn cylindrical(&self, v: &[C; 3]) -> [C; 3] {
        let (er, et) = self.point.frame();
        [dot(v, &er), dot(v, &et), v[2]]
    }

    pub fn a_theta(&self) -> C {
        self.cylindrical(&self.a)[1]
    }

    pub fn e_theta(&self) -> C {
        self.cylindrical(&self.e)[1]
    }

    pub fn b_rho(&self) -> C {
        self.cylindrical(&self.b)[0]
    }

    pub fn b_z(&self) -> C {
        self.b[2]
    }
}

/// `E = −∂A/∂t` and `B = ∇×A`.
///
/// Dual numbers use the exact cylindrical jet. Central differences work on
/// the Cartesian potential with steps `step·ℓ` (see [`local_length`]), an
/// independent route. Complex step is rejected: the potential is already
/// complex-valued.
pub fn em_fields(
    params: &EdeptParams,
    point: &SpacetimePoint,
    scheme: DifferentiationScheme,
) -> Result<FieldSample, FieldError> {
    scheme.validate()?;
    let c = params.constants().c();
    let (er, et) = point.frame();
    let along = |u: &[f64; 3], s: C| [s * u[0], s * u[1], s * u[2]];
    match scheme {
        DifferentiationScheme::DualNumber => {
            let f = cylindrical_fields(params, point.t, point.rho(), point.z)?;
            let a = along(&et, f.a_theta);
            let e = along(&et, f.e_theta);
            let mut b = along(&er, f.b_rho);
            b[2] = f.b_z;
            Ok(FieldSample::build(*point, params.branch(), a, e, b))
        }
        DifferentiationScheme::ComplexStep { .. } => Err(NumericsError::SchemeNotApplicable {
            scheme: scheme.name(),
            reason: "the potential is complex-valued",
        }
        .into()),
        DifferentiationScheme::CentralDifference { step } => {
            let x = [point.tau(c), point.x(), point.y(), point.z];
            guard_cartesian(params, x)?;
            let h = step * local_length(params, point);
            let mut d = [[C::new(0.0, 0.0); 3]; 4];
            for (k, dk) in d.iter_mut().enumerate() {
                checked_step(x[k], h)?;
                let mut p = x.map(|v| C::new(v, 0.0));
                let mut m = p;
                p[k] += h;
                m[k] -= h;
                let (fp, fm) = (cartesian_potential(params, p), cartesian_potential(params, m));
                for i in 0..3 {
                    dk[i] = (fp[i] - fm[i]) / (2.0 * h);
                }
            }
            let a = cartesian_potential(params, x.map(|v| C::new(v, 0.0)));
            let e = d[0].map(|v| -v * c);
            let b = [d[2][2] - d[3][1], d[3][0] - d[1][2], d[1][1] - d[2][0]];
            let out = FieldSample::build(*point, params.branch(), a, e, b);
            if [a, e, b].iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite()) {
                Ok(out)
            } else {
                Err(FieldError::OutOfRange("finite-difference fields"))
            }
        }
    }
}

/// Energy densities at a point.
///
/// For the real branches `u_e = ε0·E²/2` and `u_m = B²/(2μ0)` on the
/// projected fields. The complex closed form is purely negative-frequency, so
/// the positive-frequency part of either real projection has magnitude
/// `|E_c|/2` and the detection rate is `ε0·|E_c|²/4`, up to the detector
/// constant. On the analytic branch the complex field is itself taken as the
/// signal: magnitudes replace projections and the rate is `ε0·|E_c|²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyDensitySample {
    pub u_total: f64,
    pub u_electric: f64,
    pub u_magnetic: f64,
    pub detection_rate: f64,
}

impl EnergyDensitySample {
    pub fn from_fields(params: &EdeptParams, f: &FieldSample) -> Self {
        let k = params.constants();
        let sq = |v: &[f64; 3]| v.iter().map(|x| x * x).sum::<f64>();
        let (ue, um, rate) = match f.branch {
            Branch::RealPart | Branch::ImagPart => (
                0.5 * k.eps0() * sq(&f.real_e),
                0.5 / k.mu0() * sq(&f.real_b),
                0.25 * k.eps0() * norm2(&f.e),
            ),
            Branch::Analytic => (
                0.5 * k.eps0() * norm2(&f.e),
                0.5 / k.mu0() * norm2(&f.b),
                k.eps0() * norm2(&f.e),
            ),
        };
        EnergyDensitySample {
            u_total: ue + um,
            u_electric: ue,
            u_magnetic: um,
            detection_rate: rate,
        }
    }
}

pub fn energy_density(
    params: &EdeptParams,
    point: &SpacetimePoint,
    scheme: DifferentiationScheme,
) -> Result<EnergyDensitySample, FieldError> {
    let f = em_fields(params, point, scheme)?;
    Ok(EnergyDensitySample::from_fields(params, &f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng) -> SpacetimePoint {
        SpacetimePoint::cylindrical(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(0.0..6.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
            rng.gen_range(-6.0..6.0),
        )
        .unwrap()
    }

    #[test]
    fn reference_fields() {
        let p = EdeptParams::unit(1).unwrap();
        let pt = SpacetimePoint::cylindrical(0.0, 1.0, 0.0, 0.0).unwrap();
        let f = em_fields(&p, &pt, DifferentiationScheme::DualNumber).unwrap();
        assert!((f.e_theta() - C::new(0.0, -1.0)).norm() < 1e-15);
        assert!(f.real_e.iter().all(|v| v.abs() < 1e-15));
        let fd = em_fields(&p, &pt, DifferentiationScheme::central(1e-5)).unwrap();
        assert!((fd.e_theta() - C::new(0.0, -1.0)).norm() < 1e-8);
        let u = energy_density(&p.with_branch(Branch::ImagPart), &pt, DifferentiationScheme::DualNumber).unwrap();
        assert!((u.u_electric - 0.5).abs() < 1e-15);
    }

    #[test]
    fn azimuthal_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for alpha in 1..=4 {
            let p = EdeptParams::unit(alpha).unwrap();
            for _ in 0..200 {
                let pt = random_point(&mut rng);
                let f = em_fields(&p, &pt, DifferentiationScheme::DualNumber).unwrap();
                let (a, e, b) = (f.cylindrical(&f.a), f.cylindrical(&f.e), f.cylindrical(&f.b));
                let scale = |v: &[C; 3]| norm2(v).sqrt().max(f64::MIN_POSITIVE);
                assert!(a[0].norm() <= 1e-15 * scale(&a) && a[2].norm() == 0.0);
                assert!(e[0].norm() <= 1e-15 * scale(&e) && e[2].norm() == 0.0);
                assert!(b[1].norm() <= 1e-15 * scale(&b));

                let g = em_fields(&p, &pt, DifferentiationScheme::central(1e-5)).unwrap();
                let (e, b) = (g.cylindrical(&g.e), g.cylindrical(&g.b));
                assert!(e[0].norm() <= 1e-9 * scale(&e) && e[2].norm() == 0.0);
                assert!(b[1].norm() <= 1e-8 * scale(&b));
            }
        }
    }

    #[test]
    fn finite_differences_agree_with_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for alpha in 1..=4 {
            let p = EdeptParams::unit(alpha).unwrap();
            for _ in 0..200 {
                let pt = random_point(&mut rng);
                let f = em_fields(&p, &pt, DifferentiationScheme::DualNumber).unwrap();
                let g = em_fields(&p, &pt, DifferentiationScheme::central(1e-5)).unwrap();
                for (u, v) in [(&f.e, &g.e), (&f.b, &g.b)] {
                    let d: f64 = u.iter().zip(v).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                    assert!(d <= 1e-5 * norm2(u).sqrt(), "alpha {alpha} at {pt:?}");
                }
            }
        }
    }

    #[test]
    fn axis_is_regular() {
        let p = EdeptParams::unit(2).unwrap();
        let on = em_fields(&p, &SpacetimePoint::cylindrical(0.4, 0.0, 0.0, 0.3).unwrap(), DifferentiationScheme::DualNumber).unwrap();
        let near = em_fields(&p, &SpacetimePoint::cylindrical(0.4, 1e-7, 0.0, 0.3).unwrap(), DifferentiationScheme::DualNumber).unwrap();
        assert!(on.b_z().norm() > 0.0);
        assert!((on.b_z() - near.b_z()).norm() < 1e-10 * on.b_z().norm());
        assert_eq!(on.e, [C::new(0.0, 0.0); 3]);
    }

    #[test]
    fn complex_step_rejected_and_bad_step_reported() {
        let p = EdeptParams::unit(1).unwrap();
        let pt = SpacetimePoint::cylindrical(0.0, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            em_fields(&p, &pt, DifferentiationScheme::complex_step(1e-20)),
            Err(FieldError::Numerics(NumericsError::SchemeNotApplicable { .. }))
        ));
        assert!(em_fields(&p, &pt, DifferentiationScheme::central(1e-30)).is_err());
        assert!(em_fields(&p, &pt, DifferentiationScheme::central(0.0)).is_err());
    }

    #[test]
    fn energy_bookkeeping() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for branch in [Branch::RealPart, Branch::ImagPart, Branch::Analytic] {
            let p = EdeptParams::unit(2).unwrap().with_branch(branch);
            for _ in 0..100 {
                let u = energy_density(&p, &random_point(&mut rng), DifferentiationScheme::DualNumber).unwrap();
                assert!(u.u_electric >= 0.0 && u.u_magnetic >= 0.0 && u.detection_rate >= 0.0);
                assert_eq!(u.u_total, u.u_electric + u.u_magnetic);
            }
        }
    }

    #[test]
    fn homogeneity_in_g0() {
        // The amplitude carries g0^α, so densities scale as s^{2α}.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for alpha in 1..=3u32 {
            let p = EdeptParams::unit(alpha).unwrap();
            let s: f64 = 2.0;
            let q = p.with_g0(s).unwrap();
            let factor = s.powi(2 * alpha as i32);
            for _ in 0..50 {
                let pt = random_point(&mut rng);
                let a = energy_density(&p, &pt, DifferentiationScheme::DualNumber).unwrap();
                let b = energy_density(&q, &pt, DifferentiationScheme::DualNumber).unwrap();
                for (x, y) in [(a.u_total, b.u_total), (a.u_electric, b.u_electric), (a.u_magnetic, b.u_magnetic), (a.detection_rate, b.detection_rate)] {
                    assert!((y - factor * x).abs() <= 1e-14 * y.abs().max(f64::MIN_POSITIVE));
                }
            }
        }
    }
}

use num_complex::Complex64;

use super::params::{EdeptParams, SpacetimePoint};
use super::potential::{cartesian_potential, guard_cartesian};
use super::{local_length, FieldError};
use crate::numerics::diff::checked_step;
use crate::numerics::{Dual, DifferentiationScheme, NumericsError};

type C = Complex64;
type V = [C; 3];

/// Relative residual on the complex fields and on each real projection.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ResidualTriple {
    pub complex: f64,
    pub real_part: f64,
    pub imag_part: f64,
}

impl ResidualTriple {
    pub fn max(&self) -> f64 {
        self.complex.max(self.real_part).max(self.imag_part)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct MaxwellResiduals {
    pub wave: ResidualTriple,
    pub gauss: ResidualTriple,
    pub faraday: ResidualTriple,
    pub ampere: ResidualTriple,
}

impl MaxwellResiduals {
    pub fn worst(&self) -> f64 {
        [self.wave, self.gauss, self.faraday, self.ampere]
            .iter()
            .map(ResidualTriple::max)
            .fold(0.0, f64::max)
    }
}

/// Second-order jet of the Cartesian potential in `(τ, x, y, z)`.
struct Jet {
    d1: [V; 4],
    d2: [[V; 4]; 4],
}

const ZERO: C = C::new(0.0, 0.0);

fn exact_jet(params: &EdeptParams, x: [f64; 4]) -> Jet {
    let mut jet = Jet {
        d1: [[ZERO; 3]; 4],
        d2: [[[ZERO; 3]; 4]; 4],
    };
    let one = C::new(1.0, 0.0);
    for i in 0..4 {
        for j in i..4 {
            let v: [Dual<Dual<C>>; 4] = std::array::from_fn(|k| {
                let inner = if k == j { one } else { ZERO };
                let outer = if k == i { one } else { ZERO };
                Dual::new(Dual::new(C::new(x[k], 0.0), inner), Dual::new(outer, ZERO))
            });
            let f = cartesian_potential(params, v);
            for c in 0..3 {
                jet.d2[i][j][c] = f[c].eps.eps;
                jet.d2[j][i][c] = f[c].eps.eps;
                jet.d1[i][c] = f[c].eps.re;
                jet.d1[j][c] = f[c].re.eps;
            }
        }
    }
    jet
}

fn fd_jet(params: &EdeptParams, x: [f64; 4], h: f64) -> Result<Jet, NumericsError> {
    for &v in &x {
        checked_step(v, h)?;
    }
    let at = |di: [f64; 4]| {
        let p: [C; 4] = std::array::from_fn(|k| C::new(x[k] + di[k], 0.0));
        cartesian_potential(params, p)
    };
    let shift = |k: usize, s: f64| {
        let mut d = [0.0; 4];
        d[k] = s;
        d
    };
    let f0 = at([0.0; 4]);
    let mut jet = Jet {
        d1: [[ZERO; 3]; 4],
        d2: [[[ZERO; 3]; 4]; 4],
    };
    for i in 0..4 {
        let (p, m) = (at(shift(i, h)), at(shift(i, -h)));
        for c in 0..3 {
            jet.d1[i][c] = (p[c] - m[c]) / (2.0 * h);
            jet.d2[i][i][c] = (p[c] - f0[c] * 2.0 + m[c]) / (h * h);
        }
        for j in i + 1..4 {
            let mut d = [[0.0; 4]; 4];
            for (n, (si, sj)) in [(h, h), (h, -h), (-h, h), (-h, -h)].into_iter().enumerate() {
                d[n][i] = si;
                d[n][j] = sj;
            }
            let (pp, pm, mp, mm) = (at(d[0]), at(d[1]), at(d[2]), at(d[3]));
            for c in 0..3 {
                let v = (pp[c] - pm[c] - mp[c] + mm[c]) / (4.0 * h * h);
                jet.d2[i][j][c] = v;
                jet.d2[j][i][c] = v;
            }
        }
    }
    Ok(jet)
}

/// A residual `R = Σ ± T_k` together with the terms that make it up.
struct Balance {
    residual: V,
    terms: Vec<V>,
}

fn scale(v: &V, s: f64) -> V {
    v.map(|c| c * s)
}

fn add(a: &V, b: &V) -> V {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: &V, b: &V) -> V {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn relative(b: &Balance) -> ResidualTriple {
    let norm = |v: &V, f: &dyn Fn(C) -> f64| v.iter().map(|c| f(*c).powi(2)).sum::<f64>().sqrt();
    let size: f64 = b.terms.iter().map(|t| norm(t, &|c| c.norm())).sum();
    if size == 0.0 {
        return ResidualTriple {
            complex: 0.0,
            real_part: 0.0,
            imag_part: 0.0,
        };
    }
    ResidualTriple {
        complex: norm(&b.residual, &|c| c.norm()) / size,
        real_part: norm(&b.residual, &|c| c.re) / size,
        imag_part: norm(&b.residual, &|c| c.im) / size,
    }
}

/// Relative residuals of the wave equation, Gauss, Faraday and Ampère laws.
///
/// Each residual is `|R| / Σ|T_k|` over the terms `T_k` that make it up
/// (curls are split into their two products), so roundoff sits near machine
/// precision regardless of the field magnitude.
pub fn maxwell_residuals(
    params: &EdeptParams,
    point: &SpacetimePoint,
    scheme: DifferentiationScheme,
) -> Result<MaxwellResiduals, FieldError> {
    scheme.validate()?;
    let c = params.constants().c();
    let x = [point.tau(c), point.x(), point.y(), point.z];
    guard_cartesian(params, x)?;
    let jet = match scheme {
        DifferentiationScheme::DualNumber => exact_jet(params, x),
        DifferentiationScheme::CentralDifference { step } => fd_jet(params, x, step * local_length(params, point))?,
        DifferentiationScheme::ComplexStep { .. } => {
            return Err(NumericsError::SchemeNotApplicable {
                scheme: scheme.name(),
                reason: "the potential is complex-valued",
            }
            .into())
        }
    };
    let all = jet.d1.iter().chain(jet.d2.iter().flatten()).flatten();
    if all.into_iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(FieldError::OutOfRange("potential derivatives"));
    }
    let (t, dx, dy, dz) = (0, 1, 2, 3);
    let d2 = &jet.d2;

    // ∂_k E = −c ∂_τ∂_k A ; ∂_k B = ∇×(∂_k A)
    let de = |k: usize| scale(&d2[t][k], -c);
    let curl_parts = |g: &dyn Fn(usize) -> V| -> (V, V) {
        let (gx, gy, gz) = (g(dx), g(dy), g(dz));
        ([gy[2], gz[0], gx[1]], [gz[1], gx[2], gy[0]])
    };
    let db = |k: usize| -> V {
        let (p, q) = curl_parts(&|j| d2[k][j]);
        sub(&p, &q)
    };

    let wave = Balance {
        residual: sub(&sub(&sub(&d2[t][t], &d2[dx][dx]), &d2[dy][dy]), &d2[dz][dz]),
        terms: vec![d2[t][t], d2[dx][dx], d2[dy][dy], d2[dz][dz]],
    };

    // The divergence terms alone can all be small (E_x ∝ y near θ = 0), so
    // Gauss is measured against the whole Jacobian of E.
    let (gx, gy, gz) = (de(dx), de(dy), de(dz));
    let gauss = Balance {
        residual: [gx[0] + gy[1] + gz[2], ZERO, ZERO],
        terms: vec![gx, gy, gz],
    };

    let (pe, qe) = curl_parts(&de);
    let dt_b = scale(&db(t), c);
    let faraday = Balance {
        residual: add(&sub(&pe, &qe), &dt_b),
        terms: vec![pe, qe, dt_b],
    };

    let (pb, qb) = curl_parts(&db);
    let (pb, qb) = (scale(&pb, c * c), scale(&qb, c * c));
    let dt_e = scale(&d2[t][t], -c * c);
    let ampere = Balance {
        residual: sub(&sub(&pb, &qb), &dt_e),
        terms: vec![pb, qb, dt_e],
    };

    Ok(MaxwellResiduals {
        wave: relative(&wave),
        gauss: relative(&gauss),
        faraday: relative(&faraday),
        ampere: relative(&ampere),
    })
}

/// Points with `r` log-uniform in `[r_min, r_max]`, isotropic directions
/// and `t` uniform in `[-t_half, t_half]`, drawn from a seeded stream.
pub fn random_cloud(n: usize, seed: u64, r_min: f64, r_max: f64, t_half: f64) -> Vec<SpacetimePoint> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = (r_min.log10(), r_max.log10());
    (0..n)
        .map(|_| {
            let r = 10f64.powf(rng.gen_range(a..=b));
            let ct: f64 = rng.gen_range(-1.0..=1.0);
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let t = if t_half > 0.0 { rng.gen_range(-t_half..=t_half) } else { 0.0 };
            let st = (1.0 - ct * ct).sqrt();
            SpacetimePoint::cartesian(t, r * st * phi.cos(), r * st * phi.sin(), r * ct).expect("finite point")
        })
        .collect()
}

/// Componentwise worst residuals over a set of points.
pub fn worst_residuals(
    params: &EdeptParams,
    points: &[SpacetimePoint],
    scheme: DifferentiationScheme,
) -> Result<MaxwellResiduals, FieldError> {
    use rayon::prelude::*;
    let all = points
        .par_iter()
        .map(|p| maxwell_residuals(params, p, scheme))
        .collect::<Result<Vec<_>, _>>()?;
    let zero = ResidualTriple {
        complex: 0.0,
        real_part: 0.0,
        imag_part: 0.0,
    };
    let up = |a: ResidualTriple, b: ResidualTriple| ResidualTriple {
        complex: a.complex.max(b.complex),
        real_part: a.real_part.max(b.real_part),
        imag_part: a.imag_part.max(b.imag_part),
    };
    Ok(all.into_iter().fold(
        MaxwellResiduals {
            wave: zero,
            gauss: zero,
            faraday: zero,
            ampere: zero,
        },
        |m, r| MaxwellResiduals {
            wave: up(m.wave, r.wave),
            gauss: up(m.gauss, r.gauss),
            faraday: up(m.faraday, r.faraday),
            ampere: up(m.ampere, r.ampere),
        },
    ))
}

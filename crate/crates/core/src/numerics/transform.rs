use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{AxisGrid, CylGrid};
use super::NumericsError;

/// Bessel function of the first kind, integer order.
pub fn bessel_j(n: i32, x: f64) -> f64 {
    match n {
        0 => libm::j0(x),
        1 => libm::j1(x),
        -1 => -libm::j1(x),
        n if n < 0 => {
            let v = libm::jn(-n, x);
            if n % 2 == 0 {
                v
            } else {
                -v
            }
        }
        n => libm::jn(n, x),
    }
}

/// How strictly sample decay at the grid edge is enforced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationPolicy {
    /// Largest tolerated edge/peak magnitude ratio.
    pub edge_fraction: f64,
    /// When false the ratio is only reported.
    pub enforce: bool,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            edge_fraction: 1e-4,
            enforce: true,
        }
    }
}

impl TruncationPolicy {
    pub fn lenient() -> Self {
        TruncationPolicy {
            enforce: false,
            ..Default::default()
        }
    }

    /// Checks an edge/peak ratio; returns it when acceptable.
    pub fn check(&self, edge: f64, peak: f64) -> Result<f64, NumericsError> {
        if !edge.is_finite() || !peak.is_finite() {
            return Err(NumericsError::NonFinite("transform samples"));
        }
        let ratio = if peak > 0.0 { edge / peak } else { 0.0 };
        if self.enforce && ratio > self.edge_fraction {
            Err(NumericsError::Truncation {
                ratio,
                limit: self.edge_fraction,
            })
        } else {
            Ok(ratio)
        }
    }
}

fn check_len(grid: &AxisGrid, n: usize) -> Result<(), NumericsError> {
    if grid.len() == n {
        Ok(())
    } else {
        Err(NumericsError::LengthMismatch {
            expected: grid.len(),
            got: n,
        })
    }
}

fn peak(samples: &[Complex64]) -> f64 {
    samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
}

/// `∫₀^∞ f(ρ) J_m(kρ) ρ dρ` on a radial grid.
pub fn hankel_transform(
    order: i32,
    samples: &[Complex64],
    grid: &AxisGrid,
    k: f64,
    policy: &TruncationPolicy,
) -> Result<Complex64, NumericsError> {
    check_len(grid, samples.len())?;
    if samples.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    policy.check(samples[samples.len() - 1].norm(), peak(samples))?;
    let s: Complex64 = samples
        .iter()
        .zip(grid.nodes().iter().zip(grid.radial_weights()))
        .map(|(f, (&r, &w))| f * (w * bessel_j(order, k * r)))
        .sum();
    if s.re.is_finite() && s.im.is_finite() {
        Ok(s)
    } else {
        Err(NumericsError::NonFinite("hankel transform"))
    }
}

pub fn hankel_transform_order1(
    samples: &[Complex64],
    grid: &AxisGrid,
    k: f64,
    policy: &TruncationPolicy,
) -> Result<Complex64, NumericsError> {
    hankel_transform(1, samples, grid, k, policy)
}

/// `∫ f(z) e^{-i k z} dz` on a z grid. No 2π on the forward transform.
pub fn fourier_axis(
    samples: &[Complex64],
    grid: &AxisGrid,
    k: f64,
    policy: &TruncationPolicy,
) -> Result<Complex64, NumericsError> {
    check_len(grid, samples.len())?;
    if samples.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let edge = samples[0].norm().max(samples[samples.len() - 1].norm());
    policy.check(edge, peak(samples))?;
    let s: Complex64 = samples
        .iter()
        .zip(grid.nodes().iter().zip(grid.weights()))
        .map(|(f, (&z, &w))| f * Complex64::from_polar(w, -k * z))
        .sum();
    if s.re.is_finite() && s.im.is_finite() {
        Ok(s)
    } else {
        Err(NumericsError::NonFinite("fourier transform"))
    }
}

/// Real samples on a `(ρ, z)` grid, row-major in ρ.
#[derive(Clone, Debug, PartialEq)]
pub struct CylSamples {
    pub n_rho: usize,
    pub n_z: usize,
    pub values: Vec<f64>,
}

impl CylSamples {
    pub fn zeros(grid: &CylGrid) -> Self {
        CylSamples {
            n_rho: grid.n_rho(),
            n_z: grid.n_z(),
            values: vec![0.0; grid.n_rho() * grid.n_z()],
        }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_z + j]
    }

    /// Largest magnitude on the outer boundary (last ρ row, first and last z
    /// columns) and over the whole grid.
    pub fn edge_and_peak(&self) -> (f64, f64) {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut edge = 0.0f64;
        for i in 0..self.n_rho {
            edge = edge.max(self.at(i, 0).abs()).max(self.at(i, self.n_z - 1).abs());
        }
        for j in 0..self.n_z {
            edge = edge.max(self.at(self.n_rho - 1, j).abs());
        }
        (edge, peak)
    }
}

/// Precomputed kernels for `∬ f(ρ,z) J_m(k_ρ ρ) e^{-i k_z z} ρ dρ dz` from
/// one position grid to one set of `(k_ρ, k_z)` nodes, for `m ∈ {0, 1}`.
///
/// The z transform of real samples is split into cosine and sine parts so
/// both stages are real matrix products.
#[derive(Clone, Debug)]
pub struct SeparableTransform {
    cos: DMatrix<f64>,
    sin: DMatrix<f64>,
    hankel0: DMatrix<f64>,
    hankel1: DMatrix<f64>,
    n_rho: usize,
    n_z: usize,
}

impl SeparableTransform {
    pub fn new(grid: &CylGrid, k_rho: &[f64], k_z: &[f64]) -> Self {
        let (rho, wr) = (grid.rho.nodes(), grid.rho.radial_weights());
        let (z, wz) = (grid.z.nodes(), grid.z.weights());
        let cos = DMatrix::from_fn(z.len(), k_z.len(), |j, b| wz[j] * (k_z[b] * z[j]).cos());
        let sin = DMatrix::from_fn(z.len(), k_z.len(), |j, b| wz[j] * (k_z[b] * z[j]).sin());
        let hankel = |m: i32| {
            DMatrix::from_fn(k_rho.len(), rho.len(), |a, i| {
                wr[i] * bessel_j(m, k_rho[a] * rho[i])
            })
        };
        SeparableTransform {
            cos,
            sin,
            hankel0: hankel(0),
            hankel1: hankel(1),
            n_rho: rho.len(),
            n_z: z.len(),
        }
    }

    pub fn n_k_rho(&self) -> usize {
        self.hankel0.nrows()
    }

    pub fn n_k_z(&self) -> usize {
        self.cos.ncols()
    }

    /// Transform of order `m ∈ {0, 1}`, returned row-major in `k_ρ`.
    pub fn apply(
        &self,
        order: u8,
        f: &CylSamples,
        policy: &TruncationPolicy,
    ) -> Result<Vec<Complex64>, NumericsError> {
        if f.n_rho != self.n_rho || f.n_z != self.n_z {
            return Err(NumericsError::LengthMismatch {
                expected: self.n_rho * self.n_z,
                got: f.n_rho * f.n_z,
            });
        }
        let (edge, peak) = f.edge_and_peak();
        policy.check(edge, peak)?;
        let h = match order {
            0 => &self.hankel0,
            1 => &self.hankel1,
            _ => {
                return Err(NumericsError::SchemeNotApplicable {
                    scheme: "separable transform",
                    reason: "only orders 0 and 1 are tabulated",
                })
            }
        };
        let m = DMatrix::from_row_slice(self.n_rho, self.n_z, &f.values);
        let (re, im) = rayon::join(|| h * (&m * &self.cos), || h * (&m * &self.sin));
        let (nk, nkz) = (re.nrows(), re.ncols());
        let out: Vec<Complex64> = (0..nk * nkz)
            .into_par_iter()
            .map(|idx| {
                let (a, b) = (idx / nkz, idx % nkz);
                Complex64::new(re[(a, b)], -im[(a, b)])
            })
            .collect();
        if out.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(NumericsError::NonFinite("separable transform"));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grid::AxisRecipe;
    use crate::numerics::oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn radial() -> AxisGrid {
        AxisGrid::new(AxisRecipe::RadialSinh { scale: 0.5, max: 60.0, n: 800 }).unwrap()
    }

    fn axial() -> AxisGrid {
        AxisGrid::new(AxisRecipe::SymmetricSinh { scale: 1.0, half_width: 12.0, n: 400 }).unwrap()
    }

    #[test]
    fn bessel_reflection() {
        for &x in &[0.3, 2.0, 17.5] {
            assert_eq!(bessel_j(-1, x), -bessel_j(1, x));
            assert_eq!(bessel_j(-2, x), bessel_j(2, x));
            assert!((bessel_j(2, x) - (2.0 / x * bessel_j(1, x) - bessel_j(0, x))).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_in_zero_out() {
        let g = radial();
        let zeros = vec![Complex64::new(0.0, 0.0); g.len()];
        let p = TruncationPolicy::default();
        assert_eq!(hankel_transform_order1(&zeros, &g, 2.0, &p).unwrap(), Complex64::new(0.0, 0.0));
        let g = axial();
        let zeros = vec![Complex64::new(0.0, 0.0); g.len()];
        assert_eq!(fourier_axis(&zeros, &g, 1.0, &p).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn hankel_of_exponential() {
        let g = radial();
        let f: Vec<Complex64> = g.nodes().iter().map(|r| Complex64::new((-r).exp(), 0.0)).collect();
        let h = hankel_transform_order1(&f, &g, 2.0, &TruncationPolicy::default()).unwrap();
        // closed form k / (1 + k²)^{3/2}
        let exact = 2.0 / 5f64.powf(1.5);
        let adaptive = oracle::integrate(|r| (-r).exp() * libm::j1(2.0 * r) * r, 0.0, 60.0, 1e-13);
        assert!((adaptive - exact).abs() < 1e-11);
        assert!(((h.re - adaptive) / adaptive).abs() < 1e-6, "{} vs {}", h.re, adaptive);
        assert_eq!(h.im, 0.0);
    }

    #[test]
    fn hankel_family_matches_adaptive_quadrature() {
        let g = radial();
        let p = TruncationPolicy::default();
        let family: Vec<(&str, Box<dyn Fn(f64) -> f64>)> = vec![
            ("exp", Box::new(|r: f64| (-r).exp())),
            ("gauss", Box::new(|r: f64| (-r * r).exp())),
            ("r_gauss", Box::new(|r: f64| r * (-0.5 * r * r).exp())),
        ];
        for (name, f) in &family {
            for order in [0, 1] {
                for &k in &[0.5, 1.0, 3.0] {
                    let s: Vec<Complex64> = g.nodes().iter().map(|&r| Complex64::new(f(r), 0.0)).collect();
                    let h = hankel_transform(order, &s, &g, k, &p).unwrap().re;
                    let o = oracle::integrate(|r| f(r) * bessel_j(order, k * r) * r, 0.0, 60.0, 1e-13);
                    assert!(((h - o) / o).abs() < 1e-6, "{name} m={order} k={k}: {h} vs {o}");
                }
            }
        }
    }

    #[test]
    fn fourier_of_gaussian() {
        let g = axial();
        let f: Vec<Complex64> = g.nodes().iter().map(|z| Complex64::new((-z * z).exp(), 0.0)).collect();
        let t = fourier_axis(&f, &g, 1.0, &TruncationPolicy::default()).unwrap();
        let exact = std::f64::consts::PI.sqrt() * (-0.25f64).exp();
        let adaptive = oracle::integrate(|z| (-z * z).exp() * z.cos(), -12.0, 12.0, 1e-14);
        assert!((adaptive - exact).abs() < 1e-12);
        assert!((t.re - adaptive).abs() < 1e-8 * adaptive);
        assert!(t.im.abs() < 1e-14);
    }

    #[test]
    fn linearity_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = radial();
        let z = axial();
        let p = TruncationPolicy::lenient();
        for _ in 0..20 {
            let f: Vec<Complex64> = (0..g.len()).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
            let h: Vec<Complex64> = (0..g.len()).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
            let sum: Vec<Complex64> = f.iter().zip(&h).map(|(a, b)| a + b).collect();
            let k = rng.gen_range(0.1..5.0);
            let lhs = hankel_transform_order1(&sum, &g, k, &p).unwrap();
            let rhs = hankel_transform_order1(&f, &g, k, &p).unwrap() + hankel_transform_order1(&h, &g, k, &p).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));

            let f: Vec<Complex64> = (0..z.len()).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
            let h: Vec<Complex64> = (0..z.len()).map(|_| Complex64::new(rng.gen(), rng.gen())).collect();
            let sum: Vec<Complex64> = f.iter().zip(&h).map(|(a, b)| a + b).collect();
            let lhs = fourier_axis(&sum, &z, k, &p).unwrap();
            let rhs = fourier_axis(&f, &z, k, &p).unwrap() + fourier_axis(&h, &z, k, &p).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn shift_theorem_on_uniform_grid() {
        // Grid-aligned shifts of a compactly decaying profile.
        let h = 0.05;
        let g = AxisGrid::new(AxisRecipe::SymmetricLinear { half_width: 40.0, n: 800 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = TruncationPolicy::default();
        for _ in 0..10 {
            let shift = rng.gen_range(-100i32..100) as f64 * h;
            let k = rng.gen_range(-3.0..3.0);
            let f = |z: f64| Complex64::new((-(z * z)).exp() * (1.0 + 0.3 * z), 0.2 * (-(z * z) / 2.0).exp());
            let base: Vec<Complex64> = g.nodes().iter().map(|&z| f(z)).collect();
            let moved: Vec<Complex64> = g.nodes().iter().map(|&z| f(z - shift)).collect();
            let a = fourier_axis(&base, &g, k, &p).unwrap();
            let b = fourier_axis(&moved, &g, k, &p).unwrap();
            let expect = Complex64::from_polar(1.0, -k * shift) * a;
            assert!((b - expect).norm() < 1e-8, "shift {shift} k {k}");
        }
    }

    #[test]
    fn truncation_detected() {
        let g = AxisGrid::new(AxisRecipe::RadialLinear { max: 5.0, n: 100 }).unwrap();
        let slow: Vec<Complex64> = g.nodes().iter().map(|&r| Complex64::new(1.0 / (1.0 + r), 0.0)).collect();
        let err = hankel_transform_order1(&slow, &g, 1.0, &TruncationPolicy::default()).unwrap_err();
        assert!(matches!(err, NumericsError::Truncation { .. }));
        assert!(hankel_transform_order1(&slow, &g, 1.0, &TruncationPolicy::lenient()).is_ok());
    }

    #[test]
    fn separable_matches_one_dimensional_kernels() {
        let grid = CylGrid::new(
            AxisRecipe::RadialSinh { scale: 0.5, max: 30.0, n: 200 },
            AxisRecipe::SymmetricSinh { scale: 0.5, half_width: 30.0, n: 150 },
        )
        .unwrap();
        let f = |r: f64, z: f64| r * (-(r * r) - (z - 0.3) * (z - 0.3)).exp();
        let mut s = CylSamples::zeros(&grid);
        for (i, &r) in grid.rho.nodes().iter().enumerate() {
            for (j, &z) in grid.z.nodes().iter().enumerate() {
                s.values[i * grid.n_z() + j] = f(r, z);
            }
        }
        let kr = [0.4, 1.3];
        let kz = [-2.0, 0.0, 0.7];
        let plan = SeparableTransform::new(&grid, &kr, &kz);
        let p = TruncationPolicy::default();
        for order in [0u8, 1] {
            let out = plan.apply(order, &s, &p).unwrap();
            for (a, &k1) in kr.iter().enumerate() {
                for (b, &k2) in kz.iter().enumerate() {
                    let rows: Vec<Complex64> = grid
                        .rho
                        .nodes()
                        .iter()
                        .map(|&r| {
                            let col: Vec<Complex64> =
                                grid.z.nodes().iter().map(|&z| Complex64::new(f(r, z), 0.0)).collect();
                            fourier_axis(&col, &grid.z, k2, &TruncationPolicy::lenient()).unwrap()
                        })
                        .collect();
                    let direct = hankel_transform(order as i32, &rows, &grid.rho, k1, &TruncationPolicy::lenient()).unwrap();
                    let got = out[a * kz.len() + b];
                    assert!((got - direct).norm() < 1e-12 * direct.norm().max(1e-3), "{got} vs {direct}");
                }
            }
        }
    }
}

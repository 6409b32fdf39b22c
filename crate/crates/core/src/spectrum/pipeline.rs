use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::basis::{hdot, PolarizationBasis};
use super::SpectrumError;
use crate::field::{cylindrical_fields, Branch, EdeptParams};
use crate::numerics::quadrature::integrate_samples;
use crate::numerics::transform::CylSamples;
use crate::numerics::{bessel_j, AxisGrid, AxisRecipe, CylGrid, SeparableTransform, TruncationPolicy};

type C = Complex64;
const ZERO: C = C::new(0.0, 0.0);

/// Cylindrical mode grid in `(k_ρ, k_z)`. Nodes are stored `k_ρ`-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeGrid {
    k_rho: AxisGrid,
    k_z: AxisGrid,
    weights: Vec<f64>,
    omega: Vec<f64>,
}

/// One mode-grid node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeNode {
    pub k_rho: f64,
    pub k_z: f64,
    pub k: f64,
    pub omega: f64,
    /// Weight of `∫ d³k/(2π)³` for a φ-independent integrand.
    pub weight: f64,
}

impl ModeGrid {
    pub fn new(k_rho: AxisRecipe, k_z: AxisRecipe) -> Result<Self, SpectrumError> {
        let grid = CylGrid::new(k_rho, k_z)?;
        let c = crate::field::PhysicalConstants::NATURAL.c();
        let (kr, wr) = (grid.rho.nodes(), grid.rho.radial_weights());
        let (kz, wz) = (grid.z.nodes(), grid.z.weights());
        let mut weights = Vec::with_capacity(kr.len() * kz.len());
        let mut omega = Vec::with_capacity(kr.len() * kz.len());
        for (a, &k1) in kr.iter().enumerate() {
            for (b, &k2) in kz.iter().enumerate() {
                weights.push(wr[a] * wz[b] / (4.0 * PI * PI));
                omega.push(c * k1.hypot(k2));
            }
        }
        if omega.iter().any(|w| !(*w > 0.0)) {
            return Err(SpectrumError::Grid("mode grid contains ω = 0".into()));
        }
        Ok(ModeGrid {
            k_rho: grid.rho,
            k_z: grid.z,
            weights,
            omega,
        })
    }

    /// Sinh-mapped grid resolving scales between `max(g)` and
    /// `min(g)/(8 + 4α)`; higher α pushes weight to larger `|k|`.
    pub fn default_for(params: &EdeptParams) -> Self {
        let k_max = (8.0 + 4.0 * params.alpha() as f64) / params.min_g();
        Self::new(
            AxisRecipe::RadialSinh {
                scale: 0.5 / params.max_g(),
                max: k_max,
                n: 300,
            },
            AxisRecipe::SymmetricSinh {
                scale: 0.5 / params.max_g(),
                half_width: k_max,
                n: 300,
            },
        )
        .expect("default mode grid is valid")
    }

    pub fn doubled(&self) -> Self {
        Self::new(self.k_rho.recipe().refined(), self.k_z.recipe().refined()).expect("refinement stays valid")
    }

    pub fn recipes(&self) -> (AxisRecipe, AxisRecipe) {
        (self.k_rho.recipe(), self.k_z.recipe())
    }

    pub fn k_rho(&self) -> &[f64] {
        self.k_rho.nodes()
    }

    pub fn k_z(&self) -> &[f64] {
        self.k_z.nodes()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omega
    }

    pub fn node(&self, idx: usize) -> ModeNode {
        let nz = self.k_z.len();
        let (k1, k2) = (self.k_rho.nodes()[idx / nz], self.k_z.nodes()[idx % nz]);
        ModeNode {
            k_rho: k1,
            k_z: k2,
            k: k1.hypot(k2),
            omega: self.omega[idx],
            weight: self.weights[idx],
        }
    }

    /// Smallest `|k|` on the grid; everything below it is excluded.
    pub fn k_min(&self) -> f64 {
        let kz_min = self.k_z.nodes().iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        self.k_rho.nodes()[0].hypot(kz_min)
    }
}

/// Default position grid: fine near the origin at `min(g)`, spacing capped
/// beyond `8·max(g)` so high `k` stays resolved in the tails, reaching
/// `100·max(g)` in ρ and ±z.
pub fn default_position_grid(params: &EdeptParams) -> CylGrid {
    let r = 100.0 * params.max_g();
    let width = 8.0 * params.max_g();
    CylGrid::new(
        AxisRecipe::RadialGraded {
            scale: params.min_g(),
            width,
            max: r,
            n: 600,
        },
        AxisRecipe::SymmetricGraded {
            scale: params.min_g(),
            width,
            half_width: r,
            n: 600,
        },
    )
    .expect("default position grid is valid")
}

/// Position grid, mode grid and the precomputed transform between them.
#[derive(Clone, Debug)]
pub struct SpectralSetup {
    pub grid: CylGrid,
    pub modes: ModeGrid,
    pub policy: TruncationPolicy,
    plan: SeparableTransform,
}

impl SpectralSetup {
    pub fn new(grid: CylGrid, modes: ModeGrid, policy: TruncationPolicy) -> Self {
        let plan = SeparableTransform::new(&grid, modes.k_rho(), modes.k_z());
        SpectralSetup {
            grid,
            modes,
            policy,
            plan,
        }
    }

    pub fn default_for(params: &EdeptParams) -> Self {
        Self::new(default_position_grid(params), ModeGrid::default_for(params), TruncationPolicy::default())
    }

    pub fn with_doubled_modes(&self) -> Self {
        Self::new(self.grid.clone(), self.modes.doubled(), self.policy)
    }
}

/// Which field a spectrum was taken from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Potential,
    Electric,
    Magnetic,
}

/// Branch-projected real fields and their time derivatives on a position
/// grid at one instant.
#[derive(Clone, Debug)]
pub struct FieldSlice {
    pub t: f64,
    pub branch: Branch,
    pub a_theta: CylSamples,
    pub dt_a_theta: CylSamples,
    pub e_theta: CylSamples,
    pub dt_e_theta: CylSamples,
    pub b_rho: CylSamples,
    pub dt_b_rho: CylSamples,
    pub b_z: CylSamples,
    pub dt_b_z: CylSamples,
}

impl FieldSlice {
    /// Samples the real branch (the analytic branch falls back to the real
    /// part, whose spectrum is the one of physical interest).
    pub fn sample(params: &EdeptParams, t: f64, grid: &CylGrid) -> Result<Self, SpectrumError> {
        let branch = match params.branch() {
            Branch::Analytic => Branch::RealPart,
            b => b,
        };
        let (nr, nz) = (grid.n_rho(), grid.n_z());
        let z = grid.z.nodes();
        let rows: Vec<Result<Vec<[f64; 8]>, SpectrumError>> = grid
            .rho
            .nodes()
            .par_iter()
            .map(|&rho| {
                z.iter()
                    .map(|&zj| {
                        let f = cylindrical_fields(params, t, rho, zj)?;
                        Ok([
                            f.a_theta,
                            f.dt_a_theta,
                            f.e_theta,
                            f.dt_e_theta,
                            f.b_rho,
                            f.dt_b_rho,
                            f.b_z,
                            f.dt_b_z,
                        ]
                        .map(|c| branch.project(c)))
                    })
                    .collect()
            })
            .collect();
        let mut cols: Vec<CylSamples> = (0..8)
            .map(|_| CylSamples {
                n_rho: nr,
                n_z: nz,
                values: Vec::with_capacity(nr * nz),
            })
            .collect();
        for row in rows {
            for v in row? {
                for (k, col) in cols.iter_mut().enumerate() {
                    col.values.push(v[k]);
                }
            }
        }
        let mut it = cols.into_iter();
        let mut next = || it.next().expect("eight components");
        Ok(FieldSlice {
            t,
            branch,
            a_theta: next(),
            dt_a_theta: next(),
            e_theta: next(),
            dt_e_theta: next(),
            b_rho: next(),
            dt_b_rho: next(),
            b_z: next(),
            dt_b_z: next(),
        })
    }

    /// Classical energy density `ε0E²/2 + B²/(2μ0)` at every node.
    pub fn energy_density(&self, params: &EdeptParams) -> Vec<f64> {
        let k = params.constants();
        (0..self.e_theta.values.len())
            .map(|i| {
                let e = self.e_theta.values[i];
                let (br, bz) = (self.b_rho.values[i], self.b_z.values[i]);
                0.5 * k.eps0() * e * e + 0.5 / k.mu0() * (br * br + bz * bz)
            })
            .collect()
    }

    /// Position-space total energy `∫ u d³r`.
    pub fn total_energy(&self, params: &EdeptParams, grid: &CylGrid) -> Result<f64, SpectrumError> {
        Ok(integrate_samples(&self.energy_density(params), grid)?)
    }
}

/// Positive-frequency amplitude on a mode grid.
///
/// Stored as azimuthal sectors at `φ = 0`: a field with cylindrical profile
/// `(F_ρ, F_θ, F_z)` has `A_x ± iA_y = (F_ρ ± iF_θ)e^{±iθ}`, whose transforms
/// are `e^{±iφ}S_±`, and `A_z` gives `S₀`. At `φ = 0` the Cartesian amplitude
/// is `((S₊+S₋)/2, (S₊−S₋)/(2i), S₀)`.
#[derive(Clone, Debug)]
pub struct SpectralAmplitude {
    pub source: FieldKind,
    pub t0: f64,
    pub branch: Branch,
    pub plus: Vec<C>,
    pub minus: Vec<C>,
    pub axial: Vec<C>,
    /// Smallest `|k|` retained; the zero mode is excluded.
    pub k_min: f64,
    /// Largest edge/peak ratio seen by the transforms.
    pub edge_ratio: f64,
}

impl SpectralAmplitude {
    pub fn len(&self) -> usize {
        self.plus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty()
    }

    /// Cartesian amplitude at `φ = 0`.
    pub fn cartesian(&self, idx: usize) -> [C; 3] {
        let (p, m) = (self.plus[idx], self.minus[idx]);
        [(p + m) * 0.5, (p - m) / C::new(0.0, 2.0), self.axial[idx]]
    }

    /// Cartesian amplitude at azimuth `φ` of the wavevector.
    pub fn cartesian_at(&self, idx: usize, phi: f64) -> [C; 3] {
        let e = C::from_polar(1.0, phi);
        let (p, m) = (self.plus[idx] * e, self.minus[idx] * e.conj());
        [(p + m) * 0.5, (p - m) / C::new(0.0, 2.0), self.axial[idx]]
    }

    /// `|Ã|²`, independent of φ.
    pub fn norm_sqr(&self, idx: usize) -> f64 {
        0.5 * (self.plus[idx].norm_sqr() + self.minus[idx].norm_sqr()) + self.axial[idx].norm_sqr()
    }

    pub fn zero_like(other: &SpectralAmplitude) -> Self {
        SpectralAmplitude {
            plus: vec![ZERO; other.len()],
            minus: vec![ZERO; other.len()],
            axial: vec![ZERO; other.len()],
            ..other.clone()
        }
    }
}

/// Profiles `(F_ρ, F_θ, F_z)` with their time derivatives; `None` is zero.
pub struct SectorProfiles<'a> {
    pub rho: Option<(&'a CylSamples, &'a CylSamples)>,
    pub theta: Option<(&'a CylSamples, &'a CylSamples)>,
    pub z: Option<(&'a CylSamples, &'a CylSamples)>,
}

struct Transforms {
    plus: Vec<C>,
    minus: Vec<C>,
    axial: Vec<C>,
    edge: f64,
}

fn sector_transforms(setup: &SpectralSetup, f: [Option<&CylSamples>; 3]) -> Result<Transforms, SpectrumError> {
    let n = setup.modes.len();
    let mut edge = 0.0f64;
    let mut run = |order: u8, s: Option<&CylSamples>| -> Result<Vec<C>, SpectrumError> {
        match s {
            None => Ok(vec![ZERO; n]),
            Some(s) => {
                let (e, p) = s.edge_and_peak();
                if p > 0.0 {
                    edge = edge.max(e / p);
                }
                Ok(setup.plan.apply(order, s, &setup.policy)?)
            }
        }
    };
    let h_rho = run(1, f[0])?;
    let h_theta = run(1, f[1])?;
    let h_z = run(0, f[2])?;
    let mi = C::new(0.0, -2.0 * PI);
    let i = C::new(0.0, 1.0);
    let plus = (0..n).map(|k| mi * (h_rho[k] + i * h_theta[k])).collect();
    let minus = (0..n).map(|k| mi * (h_rho[k] - i * h_theta[k])).collect();
    let axial = h_z.iter().map(|h| h * (2.0 * PI)).collect();
    Ok(Transforms { plus, minus, axial, edge })
}

/// Positive-frequency spectrum from Cauchy data: `Ã = ½[Â₀ + (i/ω)∂ₜÂ₀]`.
pub fn sector_spectrum(
    setup: &SpectralSetup,
    profiles: &SectorProfiles,
    source: FieldKind,
    t0: f64,
    branch: Branch,
) -> Result<SpectralAmplitude, SpectrumError> {
    let f0 = sector_transforms(setup, [profiles.rho.map(|p| p.0), profiles.theta.map(|p| p.0), profiles.z.map(|p| p.0)])?;
    let ft = sector_transforms(setup, [profiles.rho.map(|p| p.1), profiles.theta.map(|p| p.1), profiles.z.map(|p| p.1)])?;
    let om = setup.modes.omegas();
    let combine = |a: &[C], b: &[C]| -> Vec<C> {
        a.iter()
            .zip(b)
            .zip(om)
            .map(|((x, y), w)| (x + C::new(0.0, 1.0 / w) * y) * 0.5)
            .collect()
    };
    Ok(SpectralAmplitude {
        source,
        t0,
        branch,
        plus: combine(&f0.plus, &ft.plus),
        minus: combine(&f0.minus, &ft.minus),
        axial: combine(&f0.axial, &ft.axial),
        k_min: setup.modes.k_min(),
        edge_ratio: f0.edge.max(ft.edge),
    })
}

impl FieldSlice {
    pub fn spectrum(&self, setup: &SpectralSetup, kind: FieldKind) -> Result<SpectralAmplitude, SpectrumError> {
        let profiles = match kind {
            FieldKind::Potential => SectorProfiles {
                rho: None,
                theta: Some((&self.a_theta, &self.dt_a_theta)),
                z: None,
            },
            FieldKind::Electric => SectorProfiles {
                rho: None,
                theta: Some((&self.e_theta, &self.dt_e_theta)),
                z: None,
            },
            FieldKind::Magnetic => SectorProfiles {
                rho: Some((&self.b_rho, &self.dt_b_rho)),
                theta: None,
                z: Some((&self.b_z, &self.dt_b_z)),
            },
        };
        sector_spectrum(setup, &profiles, kind, self.t, self.branch)
    }
}

/// Spectrum of the branch-projected potential at `t0`.
pub fn positive_frequency_spectrum(
    params: &EdeptParams,
    t0: f64,
    setup: &SpectralSetup,
) -> Result<SpectralAmplitude, SpectrumError> {
    if !t0.is_finite() {
        return Err(SpectrumError::Grid(format!("t0 must be finite, got {t0}")));
    }
    FieldSlice::sample(params, t0, &setup.grid)?.spectrum(setup, FieldKind::Potential)
}

/// Photon amplitudes `f_λ = √(ε0ω/ħ)·ε_λ*·Ã` at `φ = 0`, with cached scalars.
#[derive(Clone, Debug)]
pub struct HelicityAmplitudes {
    pub plus: Vec<C>,
    pub minus: Vec<C>,
    pub norm: f64,
    pub spectral_energy: f64,
    /// `Σ ∫|f_λ|²` split by helicity `(+1, −1)`.
    pub helicity_content: [f64; 2],
    pub max_transversality: f64,
}

/// Relative weight below which a node is too small to judge transversality.
const FLOOR: f64 = 1e-12;

pub fn transversality_residuals(spec: &SpectralAmplitude, modes: &ModeGrid) -> Vec<Option<f64>> {
    let peak = (0..spec.len()).map(|i| spec.norm_sqr(i)).fold(0.0, f64::max).sqrt();
    (0..spec.len())
        .map(|i| {
            let a = spec.cartesian(i);
            let n = modes.node(i);
            let size = spec.norm_sqr(i).sqrt();
            if size <= FLOOR * peak || size == 0.0 {
                return None;
            }
            let kd = (a[0] * n.k_rho + a[2] * n.k_z) / n.k;
            Some(kd.norm() / size)
        })
        .collect()
}

pub fn helicity_amplitudes(
    spec: &SpectralAmplitude,
    modes: &ModeGrid,
    basis: &PolarizationBasis,
    tolerance: f64,
) -> Result<HelicityAmplitudes, SpectrumError> {
    if spec.len() != modes.len() {
        return Err(SpectrumError::Mismatch {
            expected: modes.len(),
            got: spec.len(),
        });
    }
    let res = transversality_residuals(spec, modes);
    let mut worst = (0usize, 0.0f64);
    for (i, r) in res.iter().enumerate() {
        if let Some(r) = r {
            if *r > worst.1 {
                worst = (i, *r);
            }
        }
    }
    if worst.1 > tolerance {
        let n = modes.node(worst.0);
        return Err(SpectrumError::Transversality {
            k_rho: n.k_rho,
            k_z: n.k_z,
            residual: worst.1,
            tolerance,
        });
    }
    let k = crate::field::PhysicalConstants::NATURAL;
    let mut plus = Vec::with_capacity(spec.len());
    let mut minus = Vec::with_capacity(spec.len());
    for i in 0..spec.len() {
        let n = modes.node(i);
        let (ep, em) = basis.at([n.k_rho, 0.0, n.k_z])?;
        let a = spec.cartesian(i);
        let s = (k.eps0() * n.omega / k.hbar()).sqrt();
        plus.push(hdot(&ep, &a) * s);
        minus.push(hdot(&em, &a) * s);
    }
    let mut h = HelicityAmplitudes {
        plus,
        minus,
        norm: 0.0,
        spectral_energy: 0.0,
        helicity_content: [0.0, 0.0],
        max_transversality: worst.1,
    };
    let (norm, energy) = norm_and_energy(&h, modes);
    h.norm = norm;
    h.spectral_energy = energy;
    h.helicity_content = [
        weighted(&h.plus, modes, |_| 1.0),
        weighted(&h.minus, modes, |_| 1.0),
    ];
    Ok(h)
}

fn weighted(v: &[C], modes: &ModeGrid, f: impl Fn(usize) -> f64) -> f64 {
    v.iter().enumerate().map(|(i, c)| modes.weights()[i] * f(i) * c.norm_sqr()).sum()
}

/// `norm = Σ_λ ∫ d³k/(2π)³ |f_λ|²` and
/// `spectral_energy = 2 Σ_λ ∫ d³k/(2π)³ ħω|f_λ|² = 2ε0 ∫ d³k/(2π)³ ω²|Ã_⊥|²`.
pub fn norm_and_energy(h: &HelicityAmplitudes, modes: &ModeGrid) -> (f64, f64) {
    let hbar = crate::field::PhysicalConstants::NATURAL.hbar();
    let om = modes.omegas();
    let norm = weighted(&h.plus, modes, |_| 1.0) + weighted(&h.minus, modes, |_| 1.0);
    let energy = 2.0 * hbar * (weighted(&h.plus, modes, |i| om[i]) + weighted(&h.minus, modes, |i| om[i]));
    (norm, energy)
}

/// `2ε0 ∫ d³k/(2π)³ ω²|Ã|²` straight from the amplitude.
pub fn spectral_energy(spec: &SpectralAmplitude, modes: &ModeGrid) -> f64 {
    let eps0 = crate::field::PhysicalConstants::NATURAL.eps0();
    let om = modes.omegas();
    2.0 * eps0 * (0..spec.len()).map(|i| modes.weights()[i] * om[i] * om[i] * spec.norm_sqr(i)).sum::<f64>()
}

/// A reconstructed field at one `(ρ, z)` point with `θ = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reconstructed {
    /// Positive-frequency part, `(ρ, θ, z)` components.
    pub positive: [C; 3],
    /// `2·Re` of the above.
    pub real: [f64; 3],
}

/// Evolves every mode by `e^{−iω(t−t0)}`, optionally multiplied by a per-node
/// factor, and sums the modes at the given `(ρ, z)` points.
pub fn evolve_reconstruct(
    spec: &SpectralAmplitude,
    modes: &ModeGrid,
    t: f64,
    points: &[(f64, f64)],
    multiplier: Option<&(dyn Fn(&ModeNode) -> C + Sync)>,
) -> Result<Vec<Reconstructed>, SpectrumError> {
    if spec.len() != modes.len() {
        return Err(SpectrumError::Mismatch {
            expected: modes.len(),
            got: spec.len(),
        });
    }
    let dt = t - spec.t0;
    let coeff = |s: &[C]| -> Vec<C> {
        (0..s.len())
            .map(|i| {
                let n = modes.node(i);
                let m = multiplier.map_or(C::new(1.0, 0.0), |f| f(&n));
                s[i] * m * C::from_polar(n.weight, -n.omega * dt)
            })
            .collect()
    };
    let (cp, cm, c0) = (coeff(&spec.plus), coeff(&spec.minus), coeff(&spec.axial));
    let any = |v: &[C]| v.iter().any(|c| *c != ZERO);
    let (use_pm, use_0) = (any(&cp) || any(&cm), any(&c0));
    let (kr, kz) = (modes.k_rho(), modes.k_z());
    let nz = kz.len();
    let i = C::new(0.0, 1.0);
    let out: Vec<Reconstructed> = points
        .par_iter()
        .map(|&(rho, z)| {
            let phase: Vec<C> = kz.iter().map(|&k| C::from_polar(1.0, k * z)).collect();
            let (mut gp, mut gm, mut g0) = (ZERO, ZERO, ZERO);
            for (a, &k1) in kr.iter().enumerate() {
                let row = a * nz..(a + 1) * nz;
                let dotp = |c: &[C]| -> C { c[row.clone()].iter().zip(&phase).map(|(x, y)| x * y).sum() };
                if use_pm {
                    let j1 = i * bessel_j(1, k1 * rho);
                    gp += j1 * dotp(&cp);
                    gm += j1 * dotp(&cm);
                }
                if use_0 {
                    g0 += bessel_j(0, k1 * rho) * dotp(&c0);
                }
            }
            let positive = [(gp + gm) * 0.5, (gp - gm) / C::new(0.0, 2.0), g0];
            Reconstructed {
                positive,
                real: positive.map(|c| 2.0 * c.re),
            }
        })
        .collect();
    if out.iter().flat_map(|r| r.real).any(|v| !v.is_finite()) {
        return Err(SpectrumError::Numerics(crate::numerics::NumericsError::NonFinite("reconstruction")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Branch;

    fn small_setup(params: &EdeptParams) -> SpectralSetup {
        let g = params.max_g();
        let grid = CylGrid::new(
            AxisRecipe::RadialGraded {
                scale: params.min_g(),
                width: 8.0 * g,
                max: 60.0 * g,
                n: 200,
            },
            AxisRecipe::SymmetricGraded {
                scale: params.min_g(),
                width: 8.0 * g,
                half_width: 60.0 * g,
                n: 200,
            },
        )
        .unwrap();
        let modes = ModeGrid::new(
            AxisRecipe::RadialSinh {
                scale: 0.5 / g,
                max: 10.0 / params.min_g(),
                n: 100,
            },
            AxisRecipe::SymmetricSinh {
                scale: 0.5 / g,
                half_width: 10.0 / params.min_g(),
                n: 100,
            },
        )
        .unwrap();
        SpectralSetup::new(grid, modes, TruncationPolicy::lenient())
    }

    #[test]
    fn mode_grid_excludes_zero_mode() {
        let p = EdeptParams::unit(1).unwrap();
        let m = ModeGrid::default_for(&p);
        assert!(m.omegas().iter().all(|w| *w > 0.0));
        assert!(m.weights().iter().all(|w| *w > 0.0));
        assert!(m.k_min() > 0.0);
        assert_eq!(m.doubled().len(), 600 * 1201);
    }

    #[test]
    fn zero_field_gives_zero_state() {
        let p = EdeptParams::unit(1).unwrap();
        let setup = small_setup(&p);
        let z = CylSamples::zeros(&setup.grid);
        let prof = SectorProfiles {
            rho: None,
            theta: Some((&z, &z)),
            z: None,
        };
        let spec = sector_spectrum(&setup, &prof, FieldKind::Potential, 0.0, Branch::RealPart).unwrap();
        assert!(spec.plus.iter().chain(&spec.minus).all(|c| *c == ZERO));
        let h = helicity_amplitudes(&spec, &setup.modes, &PolarizationBasis::default(), 1e-6).unwrap();
        assert_eq!(norm_and_energy(&h, &setup.modes), (0.0, 0.0));
    }

    #[test]
    fn monochromatic_packet_sits_at_its_wavevector() {
        // Azimuthal packet ~ cos(ω0 t − k0 z) with a wide z envelope.
        let (k0, sigma) = (8.0, 6.0);
        let grid = CylGrid::new(
            AxisRecipe::RadialLinear { max: 8.0, n: 160 },
            AxisRecipe::SymmetricLinear { half_width: 40.0, n: 800 },
        )
        .unwrap();
        let modes = ModeGrid::new(
            AxisRecipe::RadialLinear { max: 4.0, n: 40 },
            AxisRecipe::SymmetricLinear { half_width: 12.0, n: 120 },
        )
        .unwrap();
        let setup = SpectralSetup::new(grid, modes, TruncationPolicy::default());
        let mut f = CylSamples::zeros(&setup.grid);
        let mut ft = f.clone();
        for (i, &r) in setup.grid.rho.nodes().iter().enumerate() {
            for (j, &z) in setup.grid.z.nodes().iter().enumerate() {
                let env = r * (-0.5 * r * r - z * z / (2.0 * sigma * sigma)).exp();
                f.values[i * f.n_z + j] = env * (k0 * z).cos();
                ft.values[i * f.n_z + j] = k0 * env * (k0 * z).sin();
            }
        }
        let prof = SectorProfiles {
            rho: None,
            theta: Some((&f, &ft)),
            z: None,
        };
        let spec = sector_spectrum(&setup, &prof, FieldKind::Potential, 0.0, Branch::RealPart).unwrap();
        let (mut neg, mut tot, mut mean) = (0.0, 0.0, 0.0);
        for i in 0..spec.len() {
            let n = setup.modes.node(i);
            let e = n.weight * spec.norm_sqr(i);
            tot += e;
            mean += e * n.k_z;
            if n.k_z < 0.0 {
                neg += e;
            }
        }
        assert!(neg / tot < 1e-3, "negative-k_z share {}", neg / tot);
        assert!((mean / tot - k0).abs() < 0.05 * k0, "mean k_z {}", mean / tot);
    }

    #[test]
    fn helicity_projection_round_trips() {
        let p = EdeptParams::unit(1).unwrap();
        let setup = small_setup(&p);
        let spec = positive_frequency_spectrum(&p, 0.0, &setup).unwrap();
        let basis = PolarizationBasis::default();
        let h = helicity_amplitudes(&spec, &setup.modes, &basis, 1e-6).unwrap();
        let k = crate::field::PhysicalConstants::NATURAL;
        for i in (0..spec.len()).step_by(97) {
            let n = setup.modes.node(i);
            let (ep, em) = basis.at([n.k_rho, 0.0, n.k_z]).unwrap();
            let s = (k.hbar() / (k.eps0() * n.omega)).sqrt();
            let a = spec.cartesian(i);
            let size = spec.norm_sqr(i).sqrt();
            for c in 0..3 {
                let back = (h.plus[i] * ep[c] + h.minus[i] * em[c]) * s;
                assert!((back - a[c]).norm() <= 1e-13 * size.max(1e-300));
            }
        }
    }

    #[test]
    fn aligned_amplitude_has_no_opposite_helicity() {
        let p = EdeptParams::unit(1).unwrap();
        let setup = small_setup(&p);
        let mut spec = positive_frequency_spectrum(&p, 0.0, &setup).unwrap();
        // Replace Ã by ε₊ at every node, written back in sector form.
        let basis = PolarizationBasis::default();
        for i in 0..spec.len() {
            let n = setup.modes.node(i);
            let (ep, _) = basis.at([n.k_rho, 0.0, n.k_z]).unwrap();
            spec.plus[i] = ep[0] + C::new(0.0, 1.0) * ep[1];
            spec.minus[i] = ep[0] - C::new(0.0, 1.0) * ep[1];
            spec.axial[i] = ep[2];
        }
        let h = helicity_amplitudes(&spec, &setup.modes, &basis, 1e-6).unwrap();
        assert!(h.minus.iter().all(|c| c.norm() < 1e-14));
        assert!(h.plus.iter().all(|c| c.norm() > 0.0));
    }

    #[test]
    fn scalars_ignore_the_basis_convention() {
        let p = EdeptParams::unit(1).unwrap();
        let setup = small_setup(&p);
        let spec = positive_frequency_spectrum(&p, 0.0, &setup).unwrap();
        let a = helicity_amplitudes(&spec, &setup.modes, &PolarizationBasis::default(), 1e-6).unwrap();
        let b = helicity_amplitudes(
            &spec,
            &setup.modes,
            &PolarizationBasis::with_axis([0.6, 0.0, 0.8]).unwrap(),
            1e-6,
        )
        .unwrap();
        assert!((a.norm - b.norm).abs() <= 1e-10 * a.norm);
        assert!((a.spectral_energy - b.spectral_energy).abs() <= 1e-10 * a.spectral_energy);
    }

    #[test]
    fn parseval_and_round_trip_on_a_small_grid() {
        let p = EdeptParams::unit(1).unwrap();
        let setup = small_setup(&p);
        let slice = FieldSlice::sample(&p, 0.0, &setup.grid).unwrap();
        let spec = slice.spectrum(&setup, FieldKind::Potential).unwrap();
        let pos = slice.total_energy(&p, &setup.grid).unwrap();
        let e = spectral_energy(&spec, &setup.modes);
        assert!((e - pos).abs() < 1e-2 * pos, "{e} vs {pos}");
        let pts = [(0.5, 0.0), (1.0, 0.3), (2.0, -1.0), (0.2, 2.5)];
        let rec = evolve_reconstruct(&spec, &setup.modes, 0.0, &pts, None).unwrap();
        for (pt, r) in pts.iter().zip(&rec) {
            let direct = p.branch().project(cylindrical_fields(&p, 0.0, pt.0, pt.1).unwrap().a_theta);
            assert!((r.real[1] - direct).abs() < 1e-2 * 0.5, "{} vs {direct}", r.real[1]);
            assert!(r.real[0].abs() < 1e-12 && r.real[2].abs() < 1e-12);
        }
    }

    #[test]
    fn transversality_violation_is_reported() {
        let p = EdeptParams::unit(1).unwrap();
        let setup = small_setup(&p);
        let mut spec = positive_frequency_spectrum(&p, 0.0, &setup).unwrap();
        let i = spec.len() / 2 + 7;
        spec.axial[i] = spec.plus[i] + C::new(1.0, 0.0);
        match helicity_amplitudes(&spec, &setup.modes, &PolarizationBasis::default(), 1e-6) {
            Err(SpectrumError::Transversality { residual, k_rho, .. }) => {
                assert!(residual > 1e-3);
                assert_eq!(k_rho, setup.modes.node(i).k_rho);
            }
            other => panic!("expected a transversality error, got {other:?}"),
        }
    }
}

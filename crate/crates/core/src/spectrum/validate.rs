use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pipeline::{
    evolve_reconstruct, helicity_amplitudes, spectral_energy, transversality_residuals, FieldKind, FieldSlice,
    HelicityAmplitudes, ModeGrid, SpectralAmplitude, SpectralSetup,
};
use super::{PolarizationBasis, SpectrumError};
use crate::check::Check;
use crate::field::{cylindrical_fields, Branch, EdeptParams};
use crate::numerics::transform::CylSamples;

type C = Complex64;

/// Tolerances for the spectral checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumTolerances {
    pub transversality: f64,
    pub electric_relation: f64,
    pub magnetic_relation: f64,
    pub round_trip: f64,
    pub parseval: f64,
    pub conservation: f64,
    pub norm_convergence: f64,
}

impl Default for SpectrumTolerances {
    fn default() -> Self {
        SpectrumTolerances {
            transversality: 1e-6,
            electric_relation: 1e-4,
            magnetic_relation: 1e-4,
            round_trip: 1e-3,
            parseval: 1e-2,
            conservation: 5e-3,
            norm_convergence: 5e-3,
        }
    }
}

/// Everything `validate_spectrum` measured, as named checks.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub checks: Vec<Check>,
    pub norm: f64,
    pub spectral_energy: f64,
    pub position_energy: f64,
    pub helicity_content: [f64; 2],
}

impl SpectrumReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Energy-weighted mean of the nodewise relative difference `|got − want|/|want|`.
fn weighted_relative(modes: &ModeGrid, want: &[[C; 3]], got: &[[C; 3]]) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..modes.len() {
        let n2 = |v: &[C; 3]| v.iter().map(|c| c.norm_sqr()).sum::<f64>();
        let w = n2(&want[i]);
        if w == 0.0 {
            continue;
        }
        let d: [C; 3] = std::array::from_fn(|c| got[i][c] - want[i][c]);
        let weight = modes.weights()[i] * w;
        num += weight * (n2(&d) / w).sqrt();
        den += weight;
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Mean relative residuals of `Ẽ = iωÃ` and `cB̃ = iω k̂×Ã`.
pub fn spectral_relations(
    a: &SpectralAmplitude,
    e: &SpectralAmplitude,
    b: &SpectralAmplitude,
    modes: &ModeGrid,
) -> (f64, f64) {
    let c = crate::field::PhysicalConstants::NATURAL.c();
    let mut want_e = Vec::with_capacity(modes.len());
    let mut want_b = Vec::with_capacity(modes.len());
    let mut got_e = Vec::with_capacity(modes.len());
    let mut got_b = Vec::with_capacity(modes.len());
    for i in 0..modes.len() {
        let n = modes.node(i);
        let iw = C::new(0.0, n.omega);
        let av = a.cartesian(i);
        let kh = [n.k_rho / n.k, 0.0, n.k_z / n.k];
        let cross = [
            av[2] * kh[1] - av[1] * kh[2],
            av[0] * kh[2] - av[2] * kh[0],
            av[1] * kh[0] - av[0] * kh[1],
        ];
        want_e.push(av.map(|v| v * iw));
        want_b.push(cross.map(|v| v * iw));
        got_e.push(e.cartesian(i));
        got_b.push(b.cartesian(i).map(|v| v * c));
    }
    (weighted_relative(modes, &want_e, &got_e), weighted_relative(modes, &want_b, &got_b))
}

/// Direct 3D transform of the azimuthal profile at selected nodes with
/// `φ ≠ 0`, by quadrature over θ on the position grid. Returns the largest
/// transversality residual and the largest relative mismatch against the
/// sector bookkeeping.
pub fn direct_transform_check(slice: &FieldSlice, setup: &SpectralSetup, spec: &SpectralAmplitude) -> (f64, f64) {
    let modes = &setup.modes;
    let (nkr, nkz) = (modes.k_rho().len(), modes.k_z().len());
    let mut picks = Vec::new();
    for (m, fa) in [0.15, 0.3, 0.5, 0.7].iter().enumerate() {
        for (l, fb) in [0.3, 0.45, 0.55, 0.75].iter().enumerate() {
            let a = ((nkr as f64 * fa) as usize).min(nkr - 1);
            let b = ((nkz as f64 * fb) as usize).min(nkz - 1);
            picks.push((a * nkz + b, 0.3 + 0.7 * (m * 4 + l) as f64));
        }
    }
    let grid = &setup.grid;
    let (rho, rw) = (grid.rho.nodes(), grid.rho.radial_weights());
    let (z, wz) = (grid.z.nodes(), grid.z.weights());
    let rho_max = rho[rho.len() - 1];
    let om = modes.omegas();
    let z_transform = |f: &CylSamples, kz: f64| -> Vec<C> {
        (0..rho.len())
            .map(|i| (0..z.len()).map(|j| C::from_polar(wz[j] * f.at(i, j), -kz * z[j])).sum())
            .collect()
    };
    let results: Vec<(f64, f64)> = picks
        .par_iter()
        .map(|&(idx, phi)| {
            let n = modes.node(idx);
            let g0 = z_transform(&slice.a_theta, n.k_z);
            let gt = z_transform(&slice.dt_a_theta, n.k_z);
            let n_theta = (1.2 * n.k_rho * rho_max) as usize + 64;
            let dth = 2.0 * PI / n_theta as f64;
            let mut hat = [C::new(0.0, 0.0); 2];
            for i in 0..rho.len() {
                let g = (g0[i] + C::new(0.0, 1.0 / om[idx]) * gt[i]) * 0.5;
                let (mut sx, mut sy) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
                for l in 0..n_theta {
                    let th = (l as f64 + 0.5) * dth;
                    let e = C::from_polar(dth, -n.k_rho * rho[i] * (th - phi).cos());
                    sx -= e * th.sin();
                    sy += e * th.cos();
                }
                hat[0] += g * sx * rw[i];
                hat[1] += g * sy * rw[i];
            }
            let size = (hat[0].norm_sqr() + hat[1].norm_sqr()).sqrt();
            let kd = (hat[0] * phi.cos() + hat[1] * phi.sin()) * (n.k_rho / n.k);
            let sector = spec.cartesian_at(idx, phi);
            let diff = ((sector[0] - hat[0]).norm_sqr() + (sector[1] - hat[1]).norm_sqr() + sector[2].norm_sqr()).sqrt();
            if size == 0.0 {
                (0.0, 0.0)
            } else {
                (kd.norm() / size, diff / size)
            }
        })
        .collect();
    results.iter().fold((0.0f64, 0.0f64), |(a, b), (x, y)| (a.max(*x), b.max(*y)))
}

/// `max|reconstructed − direct| / max|direct|` for the branch-projected
/// `A_θ` over `points`.
pub fn round_trip_error(
    params: &EdeptParams,
    spec: &SpectralAmplitude,
    modes: &ModeGrid,
    t: f64,
    points: &[(f64, f64)],
) -> Result<f64, SpectrumError> {
    let rec = evolve_reconstruct(spec, modes, t, points, None)?;
    let mut worst = 0.0f64;
    let mut peak = 0.0f64;
    for (p, r) in points.iter().zip(&rec) {
        let direct = spec.branch.project(cylindrical_fields(params, t, p.0, p.1)?.a_theta);
        worst = worst.max((r.real[1] - direct).abs() + r.real[0].abs() + r.real[2].abs());
        peak = peak.max(direct.abs());
    }
    Ok(if peak > 0.0 { worst / peak } else { worst })
}

/// Cloud of `(ρ, z)` points with `ρ ∈ [0, 5]·max(g)` and `z ∈ [−5, 5]·max(g)`.
pub fn point_cloud(params: &EdeptParams, n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = 5.0 * params.max_g();
    (0..n).map(|_| (rng.gen_range(0.0..l), rng.gen_range(-l..l))).collect()
}

/// Largest relative gap between the closed-form detection rate and
/// `ε0|E⁺|²` with `E⁺` reconstructed from the extracted spectrum.
pub fn detection_rate_discrepancy(
    params: &EdeptParams,
    spec: &SpectralAmplitude,
    modes: &ModeGrid,
    points: &[(f64, f64)],
) -> Result<f64, SpectrumError> {
    let mult = |n: &super::ModeNode| C::new(0.0, n.omega);
    let rec = evolve_reconstruct(spec, modes, spec.t0, points, Some(&mult))?;
    let k = params.constants();
    let scale = match params.branch() {
        Branch::Analytic => 1.0,
        _ => 0.25,
    };
    let (mut worst, mut peak) = (0.0f64, 0.0f64);
    for (p, r) in points.iter().zip(&rec) {
        let ec = cylindrical_fields(params, spec.t0, p.0, p.1)?.e_theta;
        let closed = scale * k.eps0() * ec.norm_sqr();
        let extracted = k.eps0() * r.positive.iter().map(|c| c.norm_sqr()).sum::<f64>();
        worst = worst.max((closed - extracted).abs());
        peak = peak.max(closed);
    }
    Ok(if peak > 0.0 { worst / peak } else { worst })
}

/// Norm on a mode grid and on its doubling.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct NormStudy {
    pub coarse: f64,
    pub fine: f64,
    pub relative_change: f64,
}

/// Norm under mode-grid doubling; errors when the change exceeds `tolerance`.
pub fn converged_norm(
    params: &EdeptParams,
    t0: f64,
    setup: &SpectralSetup,
    tolerance: f64,
) -> Result<NormStudy, SpectrumError> {
    let slice = FieldSlice::sample(params, t0, &setup.grid)?;
    let norm_on = |s: &SpectralSetup| -> Result<f64, SpectrumError> {
        let spec = slice.spectrum(s, FieldKind::Potential)?;
        Ok(helicity_amplitudes(&spec, &s.modes, &PolarizationBasis::default(), f64::INFINITY)?.norm)
    };
    let coarse = norm_on(setup)?;
    let fine = norm_on(&setup.with_doubled_modes())?;
    let rel = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
    if !(rel <= tolerance) || !fine.is_finite() {
        return Err(SpectrumError::NotConverged { coarse, fine, rel });
    }
    Ok(NormStudy {
        coarse,
        fine,
        relative_change: rel,
    })
}

/// Runs every spectral check on the state at `t0`.
pub fn validate_spectrum(
    params: &EdeptParams,
    t0: f64,
    setup: &SpectralSetup,
    tol: &SpectrumTolerances,
    seed: u64,
) -> Result<(SpectrumReport, SpectralAmplitude, HelicityAmplitudes), SpectrumError> {
    let modes = &setup.modes;
    let slice = FieldSlice::sample(params, t0, &setup.grid)?;
    let spec = slice.spectrum(setup, FieldKind::Potential)?;
    let h = helicity_amplitudes(&spec, modes, &PolarizationBasis::default(), f64::INFINITY)?;
    let mut checks = Vec::new();

    let structural = transversality_residuals(&spec, modes).into_iter().flatten().fold(0.0, f64::max);
    checks.push(Check::at_most("transversality", structural, tol.transversality));
    let (direct, sectors) = direct_transform_check(&slice, setup, &spec);
    checks.push(Check::at_most("transversality_direct", direct, tol.transversality));
    checks.push(Check::info("sector_vs_direct_transform", sectors));

    let e = slice.spectrum(setup, FieldKind::Electric)?;
    let b = slice.spectrum(setup, FieldKind::Magnetic)?;
    let (re, rb) = spectral_relations(&spec, &e, &b, modes);
    checks.push(Check::at_most("electric_relation", re, tol.electric_relation));
    checks.push(Check::at_most("magnetic_relation", rb, tol.magnetic_relation));

    let cloud = point_cloud(params, 1000, seed);
    let t1 = t0 + 2.0 * params.g1() / params.constants().c();
    checks.push(Check::at_most("round_trip_t0", round_trip_error(params, &spec, modes, t0, &cloud)?, tol.round_trip));
    checks.push(Check::at_most("round_trip_t1", round_trip_error(params, &spec, modes, t1, &cloud)?, tol.round_trip));

    let position_energy = slice.total_energy(params, &setup.grid)?;
    let energy = spectral_energy(&spec, modes);
    let parseval = (energy - position_energy).abs() / position_energy.abs().max(f64::MIN_POSITIVE);
    checks.push(Check::at_most("parseval", parseval, tol.parseval));
    let helicity_gap = (h.spectral_energy - energy).abs() / energy.abs().max(f64::MIN_POSITIVE);
    checks.push(Check::at_most("helicity_energy_consistency", helicity_gap, tol.parseval));

    let total = h.helicity_content[0] + h.helicity_content[1];
    checks.push(Check::info("helicity_plus_fraction", h.helicity_content[0] / total));
    checks.push(Check::info("helicity_minus_fraction", h.helicity_content[1] / total));

    let near: Vec<(f64, f64)> = cloud.iter().take(200).copied().collect();
    checks.push(Check::info(
        "detection_rate_discrepancy",
        detection_rate_discrepancy(params, &spec, modes, &near)?,
    ));
    checks.push(Check::info("k_min", spec.k_min));
    checks.push(Check::info("edge_to_peak", spec.edge_ratio));

    let report = SpectrumReport {
        checks,
        norm: h.norm,
        spectral_energy: energy,
        position_energy,
        helicity_content: h.helicity_content,
    };
    Ok((report, spec, h))
}

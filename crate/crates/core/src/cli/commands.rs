use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Format, RunConfig};
use super::output::{num, prepare_dir, print_check, write_csv, write_json};
use super::CliError;
use crate::asymptotics::{exponent_scan, polar_direction, Quantity, ScanTable, View};
use crate::check::Check;
use crate::field::{em_fields, random_cloud, worst_residuals, EnergyDensitySample, FieldSample, SpacetimePoint};
use crate::numerics::{AxisGrid, DifferentiationScheme};
use crate::spectrum::{
    converged_norm, helicity_amplitudes, spectral_energy, validate_spectrum, write_spectrum_csv, FieldKind,
    FieldSlice, PolarizationBasis,
};

pub const HISTORICAL_NOTE: &str = "For comparison: the one-photon state obtained from the generalized-imprimitivity \
construction has an energy density falling as 1/r^7. No explicit construction is available, so it is quoted \
here as a historical reference and not computed.";

#[derive(Serialize)]
struct Summary<'a, T: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    checks: &'a [Check],
    results: T,
}

fn summarize<T: Serialize>(cfg: &RunConfig, command: &str, checks: &[Check], results: T) -> Result<(), CliError> {
    if cfg.output.wants(Format::Json) {
        let s = Summary {
            command,
            config: cfg,
            checks,
            results,
        };
        write_json(&cfg.output.dir, "summary.json", &s)?;
    }
    Ok(())
}

/// Returns whether every check passed.
pub fn dispatch(command: &str, cfg: &RunConfig) -> Result<bool, CliError> {
    prepare_dir(&cfg.output.dir)?;
    match command {
        "fields" => fields(cfg),
        "falloff" => falloff(cfg),
        "spectrum" => spectrum(cfg),
        "validate" => validate(cfg),
        "energy" => energy(cfg),
        other => Err(CliError::Usage(format!("unknown command `{other}`"))),
    }
}

pub const FIELDS_HEADER: &str = "t,rho,z,re_A_theta,im_A_theta,re_E_theta,im_E_theta,re_B_rho,im_B_rho,re_B_z,im_B_z,u_e,u_m,u_total,detection_rate";

fn fields(cfg: &RunConfig) -> Result<bool, CliError> {
    let p = &cfg.params;
    let grid = |r| AxisGrid::new(r).map_err(|e| CliError::Config(format!("fields grid: {e}")));
    let (rho, z) = (grid(cfg.fields.rho)?, grid(cfg.fields.z)?);
    if rho.nodes()[0] < 0.0 {
        return Err(CliError::Config("at `fields.rho`: rho must be >= 0".into()));
    }
    let mut rows: Vec<String> = Vec::new();
    for &t in &cfg.fields.times {
        let block: Vec<Result<Vec<String>, CliError>> = rho
            .nodes()
            .par_iter()
            .map(|&r| {
                z.nodes()
                    .iter()
                    .map(|&zz| {
                        let pt = SpacetimePoint::cylindrical(t, r, 0.0, zz)?;
                        let f: FieldSample = em_fields(p, &pt, DifferentiationScheme::DualNumber)?;
                        let u = EnergyDensitySample::from_fields(p, &f);
                        let (a, e, br, bz) = (f.a_theta(), f.e_theta(), f.b_rho(), f.b_z());
                        let vals = [
                            t, r, zz, a.re, a.im, e.re, e.im, br.re, br.im, bz.re, bz.im, u.u_electric, u.u_magnetic,
                            u.u_total, u.detection_rate,
                        ];
                        Ok(vals.iter().map(|v| num(*v)).collect::<Vec<_>>().join(","))
                    })
                    .collect()
            })
            .collect();
        for b in block {
            rows.extend(b?);
        }
    }
    if cfg.output.wants(Format::Csv) {
        write_csv(&cfg.output.dir, "fields.csv", FIELDS_HEADER, |w| {
            rows.iter().try_for_each(|r| writeln!(w, "{r}"))
        })?;
    }
    println!("fields: {} rows", rows.len());
    summarize(cfg, "fields", &[], serde_json::json!({ "rows": rows.len() }))?;
    Ok(true)
}

pub const EXPONENTS_HEADER: &str = "direction_deg,alpha,quantity,view,branch,exponent,prefactor,r_squared,check_exponent,window_gap,predicted,reliable";
pub const PROFILES_HEADER: &str = "direction_deg,alpha,quantity,view,r,value,flag";
pub const INCREMENTS_HEADER: &str = "direction_deg,quantity,view,alpha_from,alpha_to,increment";

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn view_name(v: View) -> &'static str {
    match v {
        View::Parity => "parity",
        View::Analytic => "analytic",
    }
}

/// The exponent a column is expected to show, where one is known.
pub fn predicted_for(q: Quantity, alpha: u32) -> Option<f64> {
    let p = crate::asymptotics::predicted_exponents(alpha);
    match q {
        Quantity::AbsA => Some(p.potential_exponent),
        Quantity::DetectionRate => p.detection_rate_exponent,
        Quantity::UElectric => p.energy_density_exponent,
        _ => None,
    }
}

#[derive(Serialize)]
struct FalloffResults<'a> {
    tables: Vec<(f64, &'a ScanTable)>,
    historical_comparison: &'static str,
}

fn falloff(cfg: &RunConfig) -> Result<bool, CliError> {
    let f = &cfg.falloff;
    if f.alphas.is_empty() || f.directions_deg.is_empty() {
        return Err(CliError::Config("at `falloff`: need at least one alpha and one direction".into()));
    }
    let mut tables = Vec::new();
    for &deg in &f.directions_deg {
        let dir = polar_direction(deg.to_radians());
        tables.push((deg, exponent_scan(&cfg.params, &f.alphas, dir, &f.scan)?));
    }
    let mut exps = Vec::new();
    let mut profs = Vec::new();
    let mut incs = Vec::new();
    for (deg, table) in &tables {
        for row in &table.rows {
            for cell in &row.cells {
                let (q, v) = (cell.column.quantity, view_name(cell.column.view));
                let fit = cell.fit;
                exps.push(format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    num(*deg),
                    row.alpha,
                    q,
                    v,
                    cell.branch.name(),
                    opt(fit.map(|f| f.exponent)),
                    opt(fit.map(|f| f.prefactor)),
                    opt(fit.map(|f| f.r_squared)),
                    opt(cell.check_fit.map(|f| f.exponent)),
                    opt(cell.window_gap),
                    opt(predicted_for(q, row.alpha)),
                    cell.reliable
                ));
                for ((r, val), flag) in cell.profile.radii.iter().zip(&cell.profile.values).zip(&cell.profile.flags) {
                    let flag = serde_json::to_value(flag).expect("flag serializes");
                    profs.push(format!(
                        "{},{},{},{},{},{},{}",
                        num(*deg),
                        row.alpha,
                        q,
                        v,
                        num(*r),
                        num(*val),
                        flag.as_str().unwrap_or_default()
                    ));
                }
            }
        }
        for (c, diffs) in table.differences.iter().enumerate() {
            let col = f.scan.columns[c];
            for (i, d) in diffs.iter().enumerate() {
                incs.push(format!(
                    "{},{},{},{},{},{}",
                    num(*deg),
                    col.quantity,
                    view_name(col.view),
                    table.rows[i].alpha,
                    table.rows[i + 1].alpha,
                    opt(*d)
                ));
            }
        }
    }
    if cfg.output.wants(Format::Csv) {
        let dir = &cfg.output.dir;
        write_csv(dir, "falloff_exponents.csv", EXPONENTS_HEADER, |w| exps.iter().try_for_each(|r| writeln!(w, "{r}")))?;
        write_csv(dir, "falloff_profiles.csv", PROFILES_HEADER, |w| profs.iter().try_for_each(|r| writeln!(w, "{r}")))?;
        write_csv(dir, "falloff_increments.csv", INCREMENTS_HEADER, |w| incs.iter().try_for_each(|r| writeln!(w, "{r}")))?;
    }
    for (deg, table) in &tables {
        println!("direction {deg}° from the z axis, t = {}", table.t);
        for row in &table.rows {
            let mut parts = Vec::new();
            for cell in &row.cells {
                let got = cell.exponent().map_or("n/a".to_string(), |e| format!("{e:.3}"));
                let mark = if cell.reliable { "" } else { "?" };
                let pred = predicted_for(cell.column.quantity, row.alpha)
                    .map_or(String::new(), |p| format!(" (predicted {p})"));
                parts.push(format!("{}[{}] {got}{mark}{pred}", cell.column.quantity, view_name(cell.column.view)));
            }
            println!("  alpha {}: {}", row.alpha, parts.join(", "));
        }
    }
    println!("note: {HISTORICAL_NOTE}");
    let results = FalloffResults {
        tables: tables.iter().map(|(d, t)| (*d, t)).collect(),
        historical_comparison: HISTORICAL_NOTE,
    };
    summarize(cfg, "falloff", &[], results)?;
    Ok(true)
}

#[derive(Serialize)]
struct SpectrumResults {
    t0: f64,
    modes: usize,
    norm: f64,
    spectral_energy: f64,
    position_energy: f64,
    helicity_content: [f64; 2],
    k_min: f64,
    edge_to_peak: f64,
}

fn spectrum(cfg: &RunConfig) -> Result<bool, CliError> {
    let p = &cfg.params;
    let setup = cfg.grids.setup(p)?;
    let t0 = cfg.spectrum.t0;
    let slice = FieldSlice::sample(p, t0, &setup.grid)?;
    let spec = slice.spectrum(&setup, FieldKind::Potential)?;
    let h = helicity_amplitudes(
        &spec,
        &setup.modes,
        &PolarizationBasis::default(),
        cfg.tolerances.spectrum.transversality,
    )?;
    let position_energy = slice.total_energy(p, &setup.grid)?;
    if cfg.output.wants(Format::Csv) {
        let path = cfg.output.dir.join("spectrum.csv");
        let file = std::fs::File::create(&path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        let mut w = std::io::BufWriter::new(file);
        write_spectrum_csv(&mut w, &spec, &h, &setup.modes)
            .and_then(|_| w.flush())
            .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
    }
    let r = SpectrumResults {
        t0,
        modes: setup.modes.len(),
        norm: h.norm,
        spectral_energy: spectral_energy(&spec, &setup.modes),
        position_energy,
        helicity_content: h.helicity_content,
        k_min: spec.k_min,
        edge_to_peak: spec.edge_ratio,
    };
    println!("norm             {}", num(r.norm));
    println!("spectral energy  {}", num(r.spectral_energy));
    println!("position energy  {}", num(r.position_energy));
    summarize(cfg, "spectrum", &[], r)?;
    Ok(true)
}

fn report(cfg: &RunConfig, command: &str, checks: &[Check], results: impl Serialize) -> Result<bool, CliError> {
    for c in checks {
        print_check(c);
    }
    if cfg.output.wants(Format::Csv) {
        write_csv(&cfg.output.dir, &format!("{command}_checks.csv"), "name,value,tolerance,pass", |w| {
            checks.iter().try_for_each(|c| {
                writeln!(w, "{},{},{},{}", c.name, num(c.value), num(c.tolerance), c.pass)
            })
        })?;
    }
    summarize(cfg, command, checks, results)?;
    Ok(checks.iter().all(|c| c.pass))
}

fn validate(cfg: &RunConfig) -> Result<bool, CliError> {
    let p = &cfg.params;
    let v = &cfg.validation;
    let (l, tg) = (p.max_g(), p.g1() / p.constants().c());
    let cloud = random_cloud(v.points, cfg.seed, v.r_min * l, v.r_max * l, v.t_half * tg);
    let worst = worst_residuals(p, &cloud, DifferentiationScheme::DualNumber)?;
    let tol = cfg.tolerances.maxwell;
    let mut checks = vec![
        Check::at_most("maxwell_wave", worst.wave.max(), tol),
        Check::at_most("maxwell_gauss", worst.gauss.max(), tol),
        Check::at_most("maxwell_faraday", worst.faraday.max(), tol),
        Check::at_most("maxwell_ampere", worst.ampere.max(), tol),
    ];
    let setup = cfg.grids.setup(p)?;
    let st = &cfg.tolerances.spectrum;
    let (rep, _, _) = validate_spectrum(p, cfg.spectrum.t0, &setup, st, cfg.seed)?;
    checks.extend(rep.checks.iter().cloned());
    if v.norm_doubling {
        let study = converged_norm(p, cfg.spectrum.t0, &setup, f64::INFINITY)?;
        checks.push(Check::at_most("norm_mode_doubling", study.relative_change, st.norm_convergence));
    }
    let results = serde_json::json!({
        "maxwell": worst,
        "norm": rep.norm,
        "spectral_energy": rep.spectral_energy,
        "position_energy": rep.position_energy,
        "helicity_content": rep.helicity_content,
    });
    report(cfg, "validate", &checks, results)
}

pub const ENERGY_HEADER: &str = "t,position_energy,spectral_energy,relative_gap";

fn energy(cfg: &RunConfig) -> Result<bool, CliError> {
    let p = &cfg.params;
    let setup = cfg.grids.setup(p)?;
    let tg = p.g1() / p.constants().c();
    let mut rows = Vec::new();
    for &s in &cfg.energy.times {
        let t = s * tg;
        let slice = FieldSlice::sample(p, t, &setup.grid)?;
        let pos = slice.total_energy(p, &setup.grid)?;
        let spec = slice.spectrum(&setup, FieldKind::Potential)?;
        let e = spectral_energy(&spec, &setup.modes);
        rows.push((t, pos, e, (e - pos).abs() / pos.abs().max(f64::MIN_POSITIVE)));
    }
    let st = &cfg.tolerances.spectrum;
    let drift = |v: Vec<f64>| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(*x), b.max(*x)));
        (hi - lo) / mean.abs().max(f64::MIN_POSITIVE)
    };
    let mut checks: Vec<Check> = rows
        .iter()
        .map(|r| Check::at_most(format!("parseval_t={}", r.0), r.3, st.parseval))
        .collect();
    checks.push(Check::at_most(
        "position_energy_drift",
        drift(rows.iter().map(|r| r.1).collect()),
        st.conservation,
    ));
    checks.push(Check::info("spectral_energy_drift", drift(rows.iter().map(|r| r.2).collect())));
    if cfg.output.wants(Format::Csv) {
        write_csv(&cfg.output.dir, "energy.csv", ENERGY_HEADER, |w| {
            rows.iter()
                .try_for_each(|r| writeln!(w, "{},{},{},{}", num(r.0), num(r.1), num(r.2), num(r.3)))
        })?;
    }
    let results: Vec<_> = rows
        .iter()
        .map(|r| serde_json::json!({"t": r.0, "position_energy": r.1, "spectral_energy": r.2}))
        .collect();
    report(cfg, "energy", &checks, results)
}

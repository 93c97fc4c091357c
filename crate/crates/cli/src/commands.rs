//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use gradperc::arms::{arm_sweep, ArmSweepRow};
use gradperc::front::{edge_dump, extract_front, stats::WIDTH_EXPONENT};
use gradperc::sample;
use gradperc::scaling::{
    characteristic_length, check_near_critical_relations, fit_exponent, fit_scaling, measure_fronts,
    CharLengthParams, ExperimentTable, FitOptions, NearCriticalParams,
};
use gradperc::StripSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::manifest::{unix_now, RunManifest};
use crate::oracle_tables::{arm_rows, boundary_rows, crossing_rows, two_arm_rows, OracleRow};
use crate::output::{read_json, sibling, write_csv, write_json, write_text};
use crate::render::{render_svg, RenderOptions};
use crate::{
    ArmsArgs, CharlenArgs, Command, FrontArgs, NearCriticalArgs, OracleArgs, RenderArgs, ReplayArgs,
    SweepArgs,
};

/// Largest strip `render` will draw, in sites.
pub const RENDER_SITE_CAP: u64 = 4_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NearCriticalRecipe {
    pub p: Vec<f64>,
    pub seed: u64,
    pub params: NearCriticalParams,
    /// Free-form record of how the gates were calibrated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<String>,
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Replay(args) => replay(args),
        mut other => run_recorded(&mut other),
    }
}

fn run_recorded(command: &mut Command) -> CliResult<()> {
    let started = unix_now();
    let outputs = run(command)?;
    let manifest = RunManifest::new(command.clone(), started, outputs);
    if let Some(path) = command.manifest_path() {
        manifest.save(&path)?;
    }
    Ok(())
}

fn replay(args: ReplayArgs) -> CliResult<()> {
    let manifest = RunManifest::load(&args.manifest)?;
    let mut command = manifest.params;
    if matches!(command, Command::Replay(_)) {
        return Err(CliError::Validation("a manifest cannot record a replay".into()));
    }
    if let Some(dir) = &args.out_dir {
        command.redirect(dir);
    }
    run_recorded(&mut command)
}

/// Runs `command`, returning the files written (manifest excluded).
pub fn run(command: &mut Command) -> CliResult<Vec<PathBuf>> {
    match command {
        Command::Front(a) => front(a),
        Command::Sweep(a) => sweep(a),
        Command::Arms(a) => arms(a),
        Command::Charlen(a) => charlen(a),
        Command::NearCritical(a) => near_critical(a),
        Command::Render(a) => render(a),
        Command::EnumerateOracle(a) => enumerate_oracle(a),
        Command::Replay(_) => Err(CliError::Usage("nested replay".into())),
    }
}

fn front(a: &FrontArgs) -> CliResult<Vec<PathBuf>> {
    let spec = StripSpec::new(a.n, a.ell)?;
    let records = measure_fronts(&spec, a.seed, 0..a.replicas)?;
    write_csv(&a.out, &records)?;
    let mut outputs = vec![a.out.clone()];
    if let Some(dir) = &a.edges_dir {
        for k in 0..a.replicas {
            let c = sample(&spec.field(), spec.region(), a.seed, k);
            let f = extract_front(&c)?;
            let path = dir.join(format!("replica_{k}.json"));
            write_json(&path, &edge_dump(&f.edges))?;
            outputs.push(path);
        }
    }
    Ok(outputs)
}

fn sweep(a: &mut SweepArgs) -> CliResult<Vec<PathBuf>> {
    let mut spec = match a.resolved.take() {
        Some(s) => s,
        None => read_json(&a.spec)?,
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    spec.validate()?;
    a.resolved = Some(spec.clone());
    let clock = Instant::now();
    let mut table = ExperimentTable::default();
    for &n in &spec.sweep {
        let strip = StripSpec::new(n, spec.ell_rule.ell(n))?;
        for r in measure_fronts(&strip, spec.seed, 0..spec.replicas)? {
            table.insert(r);
        }
        if let Some(limit) = a.max_seconds {
            let spent = clock.elapsed().as_secs_f64();
            if spent > limit {
                return Err(CliError::Budget(format!(
                    "{spent:.1} s spent after N = {n}, limit {limit} s"
                )));
            }
        }
    }
    let records: Vec<_> = table.records.values().cloned().collect();
    let records_path = sibling(&a.out, "records.csv");
    let fits_path = sibling(&a.out, "fits.json");
    write_csv(&a.out, &table.summaries())?;
    write_csv(&records_path, &records)?;
    let fits = if spec.sweep.len() >= 3 {
        Some(table.fits(&FitOptions::default())?)
    } else {
        None
    };
    write_json(&fits_path, &fits)?;
    Ok(vec![a.out.clone(), records_path, fits_path])
}

fn arms(a: &ArmsArgs) -> CliResult<Vec<PathBuf>> {
    let rows = arm_sweep(a.p, &a.j, &a.radii, a.samples, a.seed)?;
    write_csv(&a.out, &rows)?;
    let mut fits = BTreeMap::new();
    for &j in &a.j {
        let pts: Vec<(f64, f64, f64)> = rows
            .iter()
            .filter(|r: &&ArmSweepRow| r.j == j && r.successes > 0 && r.successes < r.trials)
            .map(|r| (r.n as f64, r.estimate, r.stderr))
            .collect();
        let fit = if pts.len() >= 3 {
            Some(fit_scaling(&pts, &FitOptions::default())?)
        } else {
            None
        };
        fits.insert(j.to_string(), fit);
    }
    let fits_path = sibling(&a.out, "fits.json");
    write_json(&fits_path, &fits)?;
    Ok(vec![a.out.clone(), fits_path])
}

#[derive(Serialize)]
struct CharlenRow {
    p: f64,
    length: u32,
    beyond_horizon: bool,
    probes: usize,
    estimate_at_length: Option<f64>,
    stderr_at_length: Option<f64>,
    estimate_at_previous: Option<f64>,
    stderr_at_previous: Option<f64>,
}

fn charlen(a: &CharlenArgs) -> CliResult<Vec<PathBuf>> {
    let params = CharLengthParams {
        eps0: a.eps0,
        samples: a.samples,
        confidence: a.confidence,
        max_n: a.max_n,
    };
    let mut rows = Vec::new();
    let mut pts = Vec::new();
    for &p in &a.p {
        let l = characteristic_length(p, &params, a.seed)?;
        if !l.beyond_horizon {
            pts.push(((p - 0.5).abs(), l.length as f64));
        }
        rows.push(CharlenRow {
            p,
            length: l.length,
            beyond_horizon: l.beyond_horizon,
            probes: l.probes.len(),
            estimate_at_length: l.at_length.map(|t| t.estimate()),
            stderr_at_length: l.at_length.map(|t| t.stderr()),
            estimate_at_previous: l.at_previous.map(|t| t.estimate()),
            stderr_at_previous: l.at_previous.map(|t| t.stderr()),
        });
    }
    write_csv(&a.out, &rows)?;
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    pts.dedup_by(|x, y| x.0 == y.0);
    let fit = if pts.len() >= 3 {
        Some(fit_exponent(&pts, &FitOptions::default())?)
    } else {
        None
    };
    let fit_path = sibling(&a.out, "fit.json");
    write_json(&fit_path, &fit)?;
    Ok(vec![a.out.clone(), fit_path])
}

fn near_critical(a: &mut NearCriticalArgs) -> CliResult<Vec<PathBuf>> {
    let mut recipe: NearCriticalRecipe = match a.resolved.take() {
        Some(r) => r,
        None => read_json(&a.recipe)?,
    };
    if let Some(seed) = a.seed {
        recipe.seed = seed;
    }
    a.resolved = Some(recipe.clone());
    let report = check_near_critical_relations(&recipe.p, &recipe.params, recipe.seed)?;
    write_json(&a.out, &report)?;
    for c in &report.checks {
        let hi = if c.hi == f64::MAX {
            "inf".to_string()
        } else {
            c.hi.to_string()
        };
        eprintln!(
            "{} {}: {:.4} in [{}, {hi}]",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.value,
            c.lo
        );
    }
    Ok(vec![a.out.clone()])
}

fn render(a: &RenderArgs) -> CliResult<Vec<PathBuf>> {
    let sites = (a.ell as u64 + 1) * (2 * a.n as u64 + 1);
    if sites > RENDER_SITE_CAP {
        return Err(CliError::Budget(format!(
            "strip has {sites} sites; render is capped at {RENDER_SITE_CAP}"
        )));
    }
    let spec = StripSpec::new(a.n, a.ell)?;
    let c = sample(&spec.field(), spec.region(), a.seed, a.replica);
    let f = extract_front(&c)?;
    let band = (!a.no_band).then(|| (a.n as f64).powf(WIDTH_EXPONENT));
    write_text(&a.out, &render_svg(&c, Some(&f), &RenderOptions { band }))?;
    Ok(vec![a.out.clone()])
}

fn enumerate_oracle(a: &OracleArgs) -> CliResult<Vec<PathBuf>> {
    let tables: [(&str, Vec<OracleRow>); 4] = [
        ("crossing.csv", crossing_rows()),
        ("two_arm.csv", two_arm_rows()),
        ("arms.csv", arm_rows(a.seed)),
        ("outer_boundary.csv", boundary_rows()),
    ];
    let mut outputs = Vec::new();
    let mut disagreements = 0;
    for (name, rows) in &tables {
        let path = a.out_dir.join(name);
        write_csv(&path, rows)?;
        disagreements += rows.iter().map(|r| r.disagreements).sum::<u64>();
        outputs.push(path);
    }
    if disagreements > 0 {
        return Err(CliError::Validation(format!(
            "{disagreements} detector/oracle disagreements; see {}",
            a.out_dir.display()
        )));
    }
    Ok(outputs)
}

//! The experiment subcommands. Each writes its files into an output
//! directory and returns whether every recorded property held.

use std::collections::BTreeSet;
use std::path::Path;

use brs_core::brs::{
    character_volume_identity, chi_along_orbit, construct_brs, construct_volume, discrepancy_series,
    enumerate_volumes, plateau_holds, strictly_growing, volume_xi, BrsConstruction, WeightedBoxSet,
};
use brs_core::cutproject::{weighted_multiplicity, CutProjectConfig};
use brs_core::exact::prime_power;
use brs_core::solenoid::{character_phase, weyl_bound, weyl_sum};
use brs_core::{rat, Execution, ExactReal, GammaElement, Rational, SolenoidPoint};
use num_bigint::BigInt;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{merge, Experiment, Overrides};
use crate::report::{csv, svg_polyline, write_atomic, CliError, EXIT_PASS, EXIT_PROPERTY};

pub const VERIFY_MARKS: [u64; 3] = [1_000, 10_000, 100_000];
pub const WEYL_MARKS: [u64; 3] = [100, 1_000, 10_000];
pub const DEFAULT_LEN: u64 = 1_000;
pub const DEFAULT_BOUND: u32 = 2;
const DIGITS: usize = 30;
const HORIZON: &str = "finite horizon: discrepancy is only checked up to the last checkpoint; \
                       the plateau flag is an empirical substitute for boundedness, not a proof";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Volumes,
    Construct,
    Verify,
    Cutproject,
    Weyl,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Volumes => "volumes",
            Command::Construct => "construct",
            Command::Verify => "verify",
            Command::Cutproject => "cutproject",
            Command::Weyl => "weyl",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Command::Volumes, Command::Construct, Command::Verify, Command::Cutproject, Command::Weyl]
            .into_iter()
            .find(|c| c.name() == s)
    }
}

pub fn run(cmd: Command, exp: &Experiment, out: &Path, svg: bool) -> Result<bool, CliError> {
    match cmd {
        Command::Volumes => volumes(exp, out),
        Command::Construct => construct(exp, out),
        Command::Verify => verify(exp, out, svg),
        Command::Cutproject => cutproject(exp, out),
        Command::Weyl => weyl(exp, out),
    }
}

fn exact(x: &ExactReal) -> Value {
    json!({ "exact": x.to_string(), "decimal": x.to_decimal(DIGITS) })
}

fn write_verdict(out: &Path, mut verdict: Value, flags: Value) -> Result<bool, CliError> {
    let pass = flags.as_object().is_some_and(|m| m.values().all(|v| v.as_bool() == Some(true)));
    verdict["flags"] = flags;
    verdict["pass"] = json!(pass);
    let mut text = serde_json::to_string_pretty(&verdict).map_err(|e| CliError::config(e.to_string()))?;
    text.push('\n');
    write_atomic(&out.join("verdict.json"), text.as_bytes())?;
    Ok(pass)
}

fn header(cmd: Command, exp: &Experiment) -> Value {
    json!({
        "command": cmd.name(),
        "name": exp.name,
        "alpha": exp.alpha.to_string(),
        "primes": exp.primes().to_string(),
        "seed": exp.seed,
    })
}

/// n' defaults to the smallest integer making the volume nonnegative.
fn n_prime(exp: &Experiment, gamma: &GammaElement) -> Result<BigInt, CliError> {
    match &exp.n {
        Some(n) => Ok(n.clone()),
        None => Ok(-volume_xi(&exp.alpha, gamma, &BigInt::from(0))?.floor()),
    }
}

/// The construction for (gamma', n'), or just the set when gamma' = 0.
fn build(exp: &Experiment) -> Result<(WeightedBoxSet, Option<BrsConstruction>), CliError> {
    let gamma = exp.require_gamma()?;
    let n = n_prime(exp, gamma)?;
    if gamma.is_zero() {
        return Ok((construct_volume(&exp.alpha, gamma, &n)?, None));
    }
    let c = construct_brs(&exp.alpha, gamma, &n)?;
    Ok((c.result.clone(), Some(c)))
}

fn set_summary(set: &WeightedBoxSet) -> Value {
    json!({
        "claimed_volume": exact(set.claimed_volume()),
        "certificate": set.certificate().to_string(),
        "negative_weight": set.negative_weight().to_string(),
        "terms": set.terms().len(),
    })
}

fn construction_summary(c: &BrsConstruction) -> Value {
    json!({
        "gamma_prime": c.gamma_prime.to_string(),
        "n_prime": c.n_prime.to_string(),
        "gamma_special": c.gamma_special.to_string(),
        "sign": c.sign,
        "ell": c.ell,
        "n": c.n.to_string(),
        "lambda1": c.lambda1.to_string(),
        "lambda2": c.lambda2.to_string(),
        "lambda": c.lambda.to_string(),
        "M": c.big_m.to_string(),
        "xi": exact(&c.xi),
        "xi_prime": exact(&c.xi_prime),
        "m": c.m,
        "m_prime": c.m_prime,
        "window": c.window.to_string(),
        "base_box": c.base_box.to_string(),
    })
}

pub fn volumes(exp: &Experiment, out: &Path) -> Result<bool, CliError> {
    let bound = exp.bound.unwrap_or(DEFAULT_BOUND);
    let list = enumerate_volumes(&exp.alpha, bound)?;
    let mut rows = Vec::with_capacity(list.len());
    let mut identities = true;
    for v in &list {
        let ok = character_volume_identity(&exp.alpha, &v.gamma, &v.xi)?;
        identities &= ok;
        rows.push(vec![v.gamma.to_string(), v.n.to_string(), v.xi.to_string(), v.xi.to_decimal(DIGITS), ok.to_string()]);
    }
    let sorted = list.windows(2).all(|w| w[0].xi <= w[1].xi);
    let in_range = list.iter().all(|v| !v.xi.is_negative() && v.xi <= ExactReal::from(i64::from(bound)));
    write_atomic(
        &out.join("volumes.csv"),
        csv(&["gamma", "n", "volume", "volume_decimal", "character_identity"], &rows).as_bytes(),
    )?;
    let mut verdict = header(Command::Volumes, exp);
    verdict["bound"] = json!(bound);
    verdict["count"] = json!(list.len());
    write_verdict(
        out,
        verdict,
        json!({ "character_identity": identities, "sorted": sorted, "in_range": in_range }),
    )
}

pub fn construct(exp: &Experiment, out: &Path) -> Result<bool, CliError> {
    let gamma = exp.require_gamma()?;
    let (set, c) = build(exp)?;
    write_atomic(&out.join("boxes.txt"), set.to_text().as_bytes())?;
    let mut verdict = header(Command::Construct, exp);
    verdict["set"] = set_summary(&set);
    let mut flags = json!({
        "certificate_covers_negative_weight": set.certificate() >= &set.negative_weight(),
        "character_identity": character_volume_identity(&exp.alpha, gamma, set.claimed_volume())?,
    });
    if let Some(c) = &c {
        verdict["construction"] = construction_summary(c);
        flags["construction_identities"] = json!(c.verify().is_ok());
    }
    write_verdict(out, verdict, flags)
}

fn load_set(exp: &Experiment) -> Result<(WeightedBoxSet, Option<BrsConstruction>), CliError> {
    match &exp.box_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            let set = WeightedBoxSet::from_text(&text)?;
            Ok((set, None))
        }
        None => build(exp),
    }
}

pub fn verify(exp: &Experiment, out: &Path, svg: bool) -> Result<bool, CliError> {
    let marks = exp.checkpoints.clone().unwrap_or_else(|| VERIFY_MARKS.to_vec());
    if marks.len() < 2 {
        return Err(CliError::config("verify needs at least two checkpoints"));
    }
    let (set, c) = load_set(exp)?;
    let x0 = exp.start()?;
    let rows = discrepancy_series(&set, &exp.alpha, &x0, &marks, Execution::Sequential)?;
    let factor = rat(11, 10);
    let (prev, last) = (&rows[rows.len() - 2], &rows[rows.len() - 1]);
    let plateau = plateau_holds(&prev.running_sup, &last.running_sup, &factor);

    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                r.discrepancy.to_decimal(DIGITS),
                r.running_sup.to_decimal(DIGITS),
                r.discrepancy.to_string(),
                r.running_sup.to_string(),
            ]
        })
        .collect();
    write_atomic(
        &out.join("discrepancy.csv"),
        csv(&["N", "D_N", "running_sup", "D_N_exact", "running_sup_exact"], &table).as_bytes(),
    )?;
    if svg {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.discrepancy.to_f64())).collect();
        write_atomic(&out.join("discrepancy.svg"), svg_polyline("D_N against N", &pts).as_bytes())?;
    }

    let mut verdict = header(Command::Verify, exp);
    verdict["horizon"] = json!(HORIZON);
    verdict["x0"] = json!(x0.as_adele().to_string());
    verdict["set"] = set_summary(&set);
    verdict["plateau_factor"] = json!(factor.to_string());
    verdict["checkpoints"] = rows
        .iter()
        .map(|r| json!({ "N": r.n, "D_N": exact(&r.discrepancy), "running_sup": exact(&r.running_sup), "sup_at": r.sup_at }))
        .collect();
    verdict["growth_detected"] = json!(!plateau && strictly_growing(&rows));
    let mut flags = json!({
        "plateau": plateau,
        "certificate_covers_negative_weight": set.certificate() >= &set.negative_weight(),
    });
    if let Some(c) = &c {
        verdict["construction"] = construction_summary(c);
        flags["construction_identities"] = json!(c.verify().is_ok());
        flags["character_identity"] = json!(character_volume_identity(&exp.alpha, &c.gamma_prime, set.claimed_volume())?);
    }
    write_verdict(out, verdict, flags)
}

pub fn cutproject(exp: &Experiment, out: &Path) -> Result<bool, CliError> {
    let len = exp.len.unwrap_or(DEFAULT_LEN);
    let (set, c) = build(exp)?;
    let c = c.ok_or_else(|| CliError::infeasible("cut-and-project needs gamma != 0"))?;
    let config = CutProjectConfig::from_construction(&c)?;
    let origin = SolenoidPoint::origin(exp.primes());
    let chi = chi_along_orbit(&set, &exp.alpha, &origin, len, Execution::Sequential)?;
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    let mut total = 0i64;
    for (g1, &count) in chi.iter().enumerate() {
        let g1 = i64::try_from(g1).map_err(|e| CliError::config(e.to_string()))?;
        let mult = weighted_multiplicity(&set, &exp.alpha, g1)?;
        total += mult;
        if mult != 0 || count != 0 {
            rows.push(vec![g1.to_string(), mult.to_string(), count.to_string()]);
        }
        if mult < 0 || mult as u64 != count {
            mismatches.push(json!({ "gamma1": g1, "cut_project": mult, "chi": count }));
        }
    }
    write_atomic(&out.join("points.csv"), csv(&["gamma1", "multiplicity", "chi"], &rows).as_bytes())?;
    let mut verdict = header(Command::Cutproject, exp);
    verdict["N"] = json!(len);
    verdict["lambda"] = json!(config.lambda().to_string());
    verdict["window"] = json!(config.window()?.to_string());
    verdict["window_volume"] = exact(&config.window_volume());
    verdict["set"] = set_summary(&set);
    verdict["points"] = json!(rows.len());
    verdict["total_multiplicity"] = json!(total);
    verdict["mismatches"] = Value::Array(mismatches.iter().take(20).cloned().collect());
    verdict["mismatch_count"] = json!(mismatches.len());
    write_verdict(out, verdict, json!({ "correspondence": mismatches.is_empty() }))
}

fn random_gamma(exp: &Experiment) -> Result<GammaElement, CliError> {
    let mut r = exp.rng();
    let mut k = 0i64;
    while k == 0 {
        k = r.gen_range(-9..=9);
    }
    let mut g = Rational::from_integer(BigInt::from(k));
    for p in exp.primes().iter() {
        g *= prime_power(p, -r.gen_range(0..=3));
    }
    Ok(GammaElement::new(g, exp.primes())?)
}

pub fn weyl(exp: &Experiment, out: &Path) -> Result<bool, CliError> {
    let gamma = match &exp.gamma {
        Some(g) => g.clone(),
        None => random_gamma(exp)?,
    };
    let marks = exp.checkpoints.clone().unwrap_or_else(|| WEYL_MARKS.to_vec());
    let theta = character_phase(&gamma, &exp.alpha)?;
    let mut rows = Vec::new();
    let mut within = true;
    let mut table = Vec::new();
    for &n in &marks {
        let s = weyl_sum(&gamma, &exp.alpha, n)?.norm();
        let bound = weyl_bound(&theta, n);
        // float slack only; the bound itself is analytic
        within &= s <= bound + 1e-12;
        table.push(vec![n.to_string(), format!("{s:.17e}"), format!("{bound:.17e}")]);
        rows.push(json!({ "N": n, "abs_S_N": s, "bound": bound }));
    }
    write_atomic(&out.join("weyl.csv"), csv(&["N", "abs_S_N", "bound"], &table).as_bytes())?;
    let mut verdict = header(Command::Weyl, exp);
    verdict["gamma"] = json!(gamma.to_string());
    verdict["theta"] = exact(theta.theta());
    verdict["rows"] = Value::Array(rows);
    write_verdict(out, verdict, json!({ "within_bound": within }))
}

#[derive(Clone, Debug)]
pub struct BatchResult {
    pub name: String,
    pub command: String,
    pub code: i32,
    pub message: String,
}

/// Runs every entry of `experiments` concurrently, each in its own
/// subdirectory of `out`. Entries inherit the top-level fields.
pub fn batch(root: &Value, base: &Path, ov: &Overrides, out: &Path, svg: bool) -> Result<Vec<BatchResult>, CliError> {
    let entries = root
        .get("experiments")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::config("batch config needs an \"experiments\" array"))?;
    let mut jobs = Vec::with_capacity(entries.len());
    let mut names = BTreeSet::new();
    for (i, entry) in entries.iter().enumerate() {
        let exp = Experiment::from_value(merge(root, entry)?, base, ov)?;
        let cmd_name = exp.command.clone().ok_or_else(|| CliError::config(format!("experiment {i} has no command")))?;
        let cmd = Command::parse(&cmd_name).ok_or_else(|| CliError::config(format!("unknown command {cmd_name:?}")))?;
        let name = exp.name.clone().unwrap_or_else(|| format!("{i:02}-{cmd_name}"));
        if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') || !names.insert(name.clone()) {
            return Err(CliError::config(format!("bad or duplicate experiment name {name:?}")));
        }
        jobs.push((name, cmd, exp));
    }
    let results = jobs
        .par_iter()
        .map(|(name, cmd, exp)| {
            let (code, message) = match run(*cmd, exp, &out.join(name), svg) {
                Ok(true) => (EXIT_PASS, "pass".to_string()),
                Ok(false) => (EXIT_PROPERTY, "property failure".to_string()),
                Err(e) => (e.code, e.message),
            };
            BatchResult { name: name.clone(), command: cmd.name().to_string(), code, message }
        })
        .collect::<Vec<_>>();
    let summary: Vec<Value> = results
        .iter()
        .map(|r| json!({ "name": r.name, "command": r.command, "exit_code": r.code, "message": r.message }))
        .collect();
    let mut text = serde_json::to_string_pretty(&json!({ "experiments": summary })).map_err(|e| CliError::config(e.to_string()))?;
    text.push('\n');
    write_atomic(&out.join("batch.json"), text.as_bytes())?;
    Ok(results)
}

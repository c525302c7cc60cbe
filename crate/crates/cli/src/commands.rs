use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use zalm_core::analytics::{
    any_herald_prob, bsm_bell_fraction, herald_prob_island, islands_required, metric_bundle,
    solve_gain, true_herald_prob, GainTarget, GaussianBlocks,
};
use zalm_core::fock::{compare_with_analytics, Comparison, OracleConfig};
use zalm_core::montecarlo::{spci_diagnostic, McConfig, McRun};
use zalm_core::{HeraldMode, HeraldPattern, SourceParams};

use crate::args::{AxisVar, Format, McArgs, OracleArgs, SweepArgs};
use crate::config::resolve_params;
use crate::presets::{self, linspace, Cell, Table, FIGURE_IDS};
use crate::CliError;

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    writeln!(out, "{text}").map_err(|e| CliError::Io(e.to_string()))
}

pub fn metrics(out: &mut dyn Write, params: &SourceParams, format: Format) -> Result<(), CliError> {
    let bundle = metric_bundle(params);
    match format {
        Format::Json => print_json(out, &bundle),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.serialize(bundle)
                .map_err(|e| CliError::Io(e.to_string()))?;
            w.flush().map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn solve_failed(e: impl std::fmt::Display) -> CliError {
    CliError::Unachievable(e.to_string())
}

pub fn solve_gain_cmd(
    out: &mut dyn Write,
    params: &SourceParams,
    target: GainTarget,
) -> Result<(), CliError> {
    let g = solve_gain(target, params.eta_t(), params.eta_r()).map_err(solve_failed)?;
    let (name, achieved) = match target {
        GainTarget::Fraction(_) => (
            "fraction",
            target.evaluate(g, params.eta_t(), params.eta_r()),
        ),
        GainTarget::Fidelity(_) => (
            "fidelity",
            target.evaluate(g, params.eta_t(), params.eta_r()),
        ),
    };
    print_json(
        out,
        &json!({
            "gain_minus_one": g,
            "eta_t": params.eta_t(),
            "eta_r": params.eta_r(),
            "target": { "metric": name, "value": target.value() },
            "achieved": achieved,
        }),
    )
}

/// How the gain is chosen before counting islands.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GainChoice {
    AsGiven,
    /// Re-solve for this source Bell-state fraction.
    Fraction(f64),
    /// Re-solve for the source fraction reached at (G - 1, this η_T).
    MatchReference(f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct IslandSolution {
    pub gain_minus_one: f64,
    pub eta_t: f64,
    pub source_fraction: f64,
    pub herald_mode: HeraldMode,
    pub target_p_true: f64,
    pub islands: u64,
    pub p_true: f64,
}

pub fn solve_islands(
    params: &SourceParams,
    target: f64,
    choice: GainChoice,
) -> Result<IslandSolution, CliError> {
    let eta_t = params.eta_t();
    let g = match choice {
        GainChoice::AsGiven => params.gain_minus_one(),
        GainChoice::Fraction(b) => {
            solve_gain(GainTarget::Fraction(b), eta_t, 1.0).map_err(solve_failed)?
        }
        GainChoice::MatchReference(reference) => {
            let b = bsm_bell_fraction(
                GaussianBlocks::new(params.gain_minus_one(), reference, 1.0).n_s(),
            );
            solve_gain(GainTarget::Fraction(b), eta_t, 1.0).map_err(solve_failed)?
        }
    };
    let p = herald_prob_island(g, eta_t);
    let mode = params.herald_mode();
    let n = islands_required(p, target, mode).ok_or_else(|| {
        CliError::Unachievable(format!(
            "no island count reaches p_true = {target} at G-1 = {g}"
        ))
    })?;
    Ok(IslandSolution {
        gain_minus_one: g,
        eta_t,
        source_fraction: bsm_bell_fraction(GaussianBlocks::new(g, eta_t, 1.0).n_s()),
        herald_mode: mode,
        target_p_true: target,
        islands: n,
        p_true: true_herald_prob(p, n, mode),
    })
}

pub fn solve_islands_cmd(
    out: &mut dyn Write,
    params: &SourceParams,
    target: f64,
    choice: GainChoice,
) -> Result<(), CliError> {
    print_json(out, &solve_islands(params, target, choice)?)
}

fn custom_sweep(
    params: &SourceParams,
    args: &SweepArgs,
    axis: AxisVar,
    metric: &str,
) -> Result<Table, CliError> {
    let (min, max) = match (args.min, args.max) {
        (Some(a), Some(b)) if a < b => (a, b),
        _ => {
            return Err(CliError::BadParams(
                "custom sweeps need --min < --max".into(),
            ))
        }
    };
    if args.steps < 2 {
        return Err(CliError::BadParams(
            "custom sweeps need --steps >= 2".into(),
        ));
    }
    let column: &'static str = match metric {
        "p_herald_island" => "p_herald_island",
        "p_herald_any" => "p_herald_any",
        "p_true" => "p_true",
        "n_s" => "n_s",
        "n_s_prime" => "n_s_prime",
        "s" => "s",
        "e" => "e",
        "p_bell" => "p_bell",
        "p_loadable" => "p_loadable",
        "fraction" => "fraction",
        "fidelity" => "fidelity",
        "purity" => "purity",
        "rate" => "rate",
        other => return Err(CliError::BadParams(format!("unknown metric `{other}`"))),
    };
    let mut rows = Vec::with_capacity(args.steps);
    for x in linspace(min, max, args.steps) {
        let v = if args.log { 10f64.powf(x) } else { x };
        let p = params
            .modified(|r| match axis {
                AxisVar::GainMinusOne => r.gain_minus_one = v,
                AxisVar::EtaT => r.eta_t = v,
                AxisVar::EtaR => r.eta_r = v,
            })
            .map_err(|e| CliError::BadParams(e.to_string()))?;
        let bundle = serde_json::to_value(metric_bundle(&p)).expect("bundle serializes");
        let y = bundle[column].as_f64().unwrap_or(f64::NAN);
        rows.push(vec![Cell::Float(x), Cell::Float(y)]);
    }
    Ok(Table {
        columns: vec![axis.column(args.log), column],
        rows,
    })
}

pub fn sweep(out: &mut dyn Write, args: &SweepArgs) -> Result<(), CliError> {
    if let Some(id) = args.figure {
        let spec = presets::spec(id).ok_or_else(|| {
            CliError::BadParams(format!("figure {id} is not one of {FIGURE_IDS:?}"))
        })?;
        let table = presets::evaluate(&spec);
        presets::write_figure(&spec, &table, &args.out)?;
        return writeln!(out, "{} rows -> {}", table.rows.len(), args.out.display())
            .map_err(|e| CliError::Io(e.to_string()));
    }
    let (Some(axis), Some(metric)) = (args.axis, args.metric.as_deref()) else {
        return Err(CliError::BadParams(
            "give --figure or --axis with --metric".into(),
        ));
    };
    let params = resolve_params(args.params.config.as_deref(), &args.params.overrides())?;
    let table = custom_sweep(&params, args, axis, metric)?;
    table.write_csv(&args.out)?;
    writeln!(out, "{} rows -> {}", table.rows.len(), args.out.display())
        .map_err(|e| CliError::Io(e.to_string()))
}

/// Writes every preset into `dir` and returns the CSV paths in figure order.
pub fn figures(dir: &Path) -> Result<Vec<std::path::PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for id in FIGURE_IDS {
        let spec = presets::spec(id).expect("preset exists");
        let path = dir.join(&spec.file);
        presets::write_figure(&spec, &presets::evaluate(&spec), &path)?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn mc_report(params: &SourceParams, args: &McArgs) -> Value {
    let config = McConfig {
        n_pulses: args.pulses,
        seed: args.seed,
        policy: args.policy.into(),
        counting: args.counting.into(),
    };
    let run = McRun::new(params, config);
    let p = herald_prob_island(params.gain_minus_one(), params.eta_t());
    let n = params.n_islands();
    let c = run.counts;
    let ratio = if c.false_heralds > 0 {
        json!(c.true_heralds as f64 / c.false_heralds as f64)
    } else {
        Value::Null
    };
    let mut report = json!({
        "config": config,
        "herald_mode": params.herald_mode(),
        "true_herald": run.true_herald(),
        "any_herald": run.any_herald(),
        "pair_rate": run.pair_rate(params),
        "true_false_ratio": ratio,
        "closed_forms": {
            "p_true_same_island": true_herald_prob(p, n, HeraldMode::SameIsland),
            "p_true_spci_paper": true_herald_prob(p, n, HeraldMode::SpciPaper),
            "p_true_spci_exact": true_herald_prob(p, n, HeraldMode::SpciExact),
            "p_any_selected_mode": any_herald_prob(p, n, params.herald_mode()),
        },
    });
    if params.herald_mode().is_spci() {
        report["spci"] = serde_json::to_value(spci_diagnostic(params, &run)).expect("serializes");
    }
    report
}

pub fn oracle(
    out: &mut dyn Write,
    params: &SourceParams,
    args: &OracleArgs,
) -> Result<(), CliError> {
    let patterns: Vec<HeraldPattern> = if args.pattern.eq_ignore_ascii_case("all") {
        HeraldPattern::ALL.to_vec()
    } else {
        vec![args.pattern.parse().map_err(CliError::BadParams)?]
    };
    let config = OracleConfig {
        cutoff: args.cutoff,
        tail_budget: args.tail_budget,
    };
    let comparisons: Vec<Comparison> = patterns
        .iter()
        .map(|&p| {
            compare_with_analytics(
                params.gain_minus_one(),
                params.eta_t(),
                params.eta_r(),
                p,
                config,
            )
        })
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::BadParams(e.to_string()))?;
    let worst = comparisons
        .iter()
        .map(Comparison::max_delta)
        .fold(0.0, f64::max);
    let worst_off = comparisons
        .iter()
        .filter_map(|c| c.off_diagonal_max)
        .fold(0.0, f64::max);
    print_json(
        out,
        &json!({
            "gain_minus_one": params.gain_minus_one(),
            "eta_t": params.eta_t(),
            "eta_r": params.eta_r(),
            "tolerance": args.tolerance,
            "max_delta": worst,
            "off_diagonal_max": worst_off,
            "comparisons": comparisons,
        }),
    )?;
    if worst > args.tolerance || worst_off > args.off_diagonal_tolerance {
        return Err(CliError::ToleranceExceeded(format!(
            "max delta {worst:.3e} (tolerance {:.1e}), off-diagonal {worst_off:.3e} (tolerance {:.1e})",
            args.tolerance, args.off_diagonal_tolerance
        )));
    }
    Ok(())
}

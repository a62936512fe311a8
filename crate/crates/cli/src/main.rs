mod args;
mod parse;

use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Command, Common, Format, ModelFlags, NoiseChoice, PurifyCommand, SearchArgs};
use ionsurgery_core::collection::{
    cross_validate, empirical_min_attempts, simulate_collection, smoke_grid, GridPoint, TrialConfig,
};
use ionsurgery_core::ga::{
    benchmark_sweep, load_candidates, mean_success_by_n, search_detailed, select_high_yield,
    BenchmarkRow, GaConfig, RankedCircuit, SearchInput, F_IDEAL, F_REQ,
};
use ionsurgery_core::resource::{
    log_space, min_attempts, min_ions_table, rate_table, sweep_coupling, SurgeryQuery,
};
use ionsurgery_core::{simulate, DeviceParams, NoiseModel, PurificationCircuit};

enum Failure {
    Usage(String),
    Run(String),
}

impl From<ionsurgery_core::Error> for Failure {
    fn from(e: ionsurgery_core::Error) -> Self {
        match e {
            ionsurgery_core::Error::InvalidParameter(m) => Failure::Usage(m),
            other => Failure::Run(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type Outcome = Result<bool, Failure>;

fn usage(msg: String) -> Failure {
    Failure::Usage(msg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(if cli.common.strict { 1 } else { 0 }),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

/// Returns `Ok(false)` when the results would fail `--strict`.
fn run(cli: &Cli) -> Outcome {
    let common = &cli.common;
    match &cli.command {
        Command::MinIons(a) => {
            let device = device(common, &a.model)?;
            let distances: Vec<u32> = parse::int_list(&a.distance).map_err(usage)?;
            let us = match (&a.cycle_time_us, a.paradigm) {
                (Some(list), _) => parse::float_list(list).map_err(usage)?,
                (None, Some(p)) => p.cycle_times_us(),
                (None, None) => args::Paradigm::All.cycle_times_us(),
            };
            let seconds: Vec<f64> = us.iter().map(|t| t * 1e-6).collect();
            let rows = min_ions_table(&distances, &seconds, &device, a.model.paper_compat)?;
            emit(common, &rows)?;
            Ok(rows.iter().any(|r| r.feasible))
        }
        Command::Rate(a) => {
            let device = device(common, &a.model)?;
            let distances: Vec<u32> = parse::int_list(&a.distance).map_err(usage)?;
            let ions: Vec<u64> = parse::int_list(&a.ions).map_err(usage)?;
            let rows = rate_table(&distances, &ions, &device, a.model.paper_compat)?;
            emit(common, &rows)?;
            Ok(rows.iter().any(|r| r.feasible))
        }
        Command::Sweep(a) => {
            let device = device(
                common,
                &ModelFlags {
                    paper_compat: a.paper_compat,
                    pc: None,
                },
            )?;
            let distances: Vec<u32> = parse::int_list(&a.distances).map_err(usage)?;
            let seconds: Vec<f64> = parse::float_list(&a.cycle_times_us)
                .map_err(usage)?
                .iter()
                .map(|t| t * 1e-6)
                .collect();
            let grid = log_space(a.pc_from, a.pc_to, a.points)?;
            if grid.iter().any(|&p| p > 1.0) {
                return Err(usage("p_c grid must stay within (0, 1]".into()));
            }
            let rows = sweep_coupling(&distances, &seconds, &grid, &device, a.paper_compat)?;
            emit(common, &rows)?;
            Ok(rows.iter().any(|r| r.feasible))
        }
        Command::Purify { command } => purify(common, command),
        Command::Validate(a) => validate(common, a),
    }
}

fn device(common: &Common, flags: &ModelFlags) -> Result<DeviceParams, Failure> {
    let mut d = match &common.device {
        Some(path) => DeviceParams::load(path)
            .map_err(|e| usage(format!("device file {}: {e}", path.display())))?,
        None => DeviceParams::default(),
    };
    if let Some(pc) = flags.pc {
        d = d.with_p_entangle(pc);
        d.validate()?;
    }
    Ok(d)
}

fn noise_model(choice: NoiseChoice) -> NoiseModel {
    match choice {
        NoiseChoice::Paper => NoiseModel::trapped_ion(),
        NoiseChoice::None => NoiseModel::noiseless(),
    }
}

fn sink(common: &Common) -> io::Result<Box<dyn Write>> {
    Ok(match &common.output {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit<T: Serialize>(common: &Common, rows: &[T]) -> Result<(), Failure> {
    let mut out = sink(common)?;
    match common.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r).map_err(|e| Failure::Run(e.to_string()))?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, rows)
                .map_err(|e| Failure::Run(e.to_string()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn report_thresholds(rows: &[BenchmarkRow]) {
    let ideal = rows.iter().filter(|r| r.meets_f_ideal()).count();
    let req = rows.iter().filter(|r| r.meets_f_req()).count();
    eprintln!(
        "{ideal}/{n} circuit(s) reach F_ideal = {F_IDEAL}; {req}/{n} reach F_req = {F_REQ}",
        n = rows.len()
    );
}

fn purify(common: &Common, command: &PurifyCommand) -> Outcome {
    match command {
        PurifyCommand::Simulate {
            circuit,
            input,
            noise,
        } => {
            let c = PurificationCircuit::load(circuit)
                .map_err(|e| usage(format!("{}: {e}", circuit.display())))?;
            let (state, _) = parse::input_state(input).map_err(usage)?;
            let o = simulate(&c, &state, &noise_model(*noise))?;
            let row = BenchmarkRow {
                n_pairs: c.n_pairs,
                success_probability: o.success_probability,
                output_fidelity: o.output_fidelity,
                circuit_path: circuit.display().to_string(),
            };
            emit(common, std::slice::from_ref(&row))?;
            report_thresholds(std::slice::from_ref(&row));
            Ok(true)
        }
        PurifyCommand::Benchmark { circuits, noise } => {
            let candidates = load_candidates(circuits)?;
            let rows = benchmark_sweep(&candidates, &noise_model(*noise))?;
            emit(common, &rows)?;
            for (n, p) in mean_success_by_n(&rows) {
                eprintln!("n = {n}: mean success probability {p:.6}");
            }
            report_thresholds(&rows);
            Ok(true)
        }
        PurifyCommand::Search(a) => search(common, a),
    }
}

#[derive(Serialize)]
struct SearchRow {
    seed: u64,
    n_pairs: usize,
    fitness: f64,
    success_probability: f64,
    output_fidelity: f64,
    circuit_path: String,
}

fn search(common: &Common, a: &SearchArgs) -> Outcome {
    let (_, input) = parse::input_state(&a.input).map_err(usage)?;
    let input = match input {
        parse::BellOrStephenson::Bell(b) => SearchInput::BellDiagonal(b),
        parse::BellOrStephenson::Stephenson => SearchInput::Stephenson,
    };
    let noise = noise_model(a.noise);
    if let Some(dir) = &a.save_dir {
        std::fs::create_dir_all(dir)?;
    }
    let mut rows = Vec::new();
    let mut pool: Vec<RankedCircuit> = Vec::new();
    for seed in a.seed..a.seed + a.seeds.max(1) {
        let cfg = GaConfig {
            population_size: a.pop,
            generations: a.gens,
            n_pairs: a.n,
            seed,
            mutation_rate: a.mutation_rate,
            crossover_rate: a.crossover_rate,
            max_ops: a.max_ops,
            elite_fraction: a.elite_fraction,
            ..GaConfig::default()
        };
        let report = search_detailed(&cfg, &input, &noise)?;
        let best = &report.ranked[0];
        let circuit_path = match &a.save_dir {
            Some(dir) => {
                let path = dir.join(format!("ga_{}to1_seed{seed}.json", a.n));
                best.circuit.save(&path)?;
                path.display().to_string()
            }
            None => String::new(),
        };
        rows.push(SearchRow {
            seed,
            n_pairs: a.n,
            fitness: best.fitness,
            success_probability: best.outcome.success_probability,
            output_fidelity: best.outcome.output_fidelity,
            circuit_path,
        });
        pool.extend(report.archive);
    }
    emit(common, &rows)?;
    if let (Some(threshold), Some(out)) = (a.select_fidelity, &a.select_out) {
        match select_high_yield(&pool, threshold, &noise)? {
            Some(pick) => {
                pick.circuit.save(out)?;
                eprintln!(
                    "selected {}: F = {:.6}, p = {:.6} on Stephenson pairs",
                    out.display(),
                    pick.outcome.output_fidelity,
                    pick.outcome.success_probability
                );
            }
            None => {
                eprintln!("no archived circuit reaches F = {threshold} on Stephenson pairs");
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Serialize)]
struct TrialRow {
    trial: u64,
    entangled: u64,
}

/// Same seed as the first grid point of `cross_validate`, so the counts match the report.
fn write_collection(a: &args::ValidateArgs, point: GridPoint) -> Result<(), Failure> {
    let summary = simulate_collection(&TrialConfig {
        n_ions: point.n_ions,
        p_entangle: point.p_c,
        attempts: point.attempts,
        trials: a.trials,
        seed: a.seed,
    })?;
    let run = |e: Box<dyn std::error::Error>| Failure::Run(e.to_string());
    if let Some(path) = &a.tails_json {
        let ks: Vec<u64> = (0..=point.n_ions).collect();
        let file = File::create(path)?;
        serde_json::to_writer_pretty(file, &summary.tails(&ks)).map_err(|e| run(e.into()))?;
    }
    if let Some(path) = &a.per_trial {
        let mut w = csv::Writer::from_path(path).map_err(|e| run(e.into()))?;
        for (trial, &entangled) in summary.counts.iter().enumerate() {
            w.serialize(TrialRow {
                trial: trial as u64,
                entangled,
            })
            .map_err(|e| run(e.into()))?;
        }
        w.flush()?;
    }
    Ok(())
}

#[derive(Serialize)]
struct AttemptsRow {
    n_ions: u64,
    p_c: f64,
    k_star: u64,
    analytic: u64,
    empirical: u64,
    bracket_low: u64,
    bracket_high: u64,
    pass: bool,
}

fn validate(common: &Common, a: &args::ValidateArgs) -> Outcome {
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1".into()));
    }
    let grid = match (a.ions, a.attempts, a.pc) {
        (Some(n_ions), Some(attempts), Some(p_c)) => vec![GridPoint {
            n_ions,
            p_c,
            attempts,
        }],
        _ => smoke_grid(),
    };
    let rows = cross_validate(&grid, a.trials, a.seed)?;
    let passed = rows.iter().filter(|r| r.pass).count();
    emit(common, &rows)?;
    eprintln!(
        "{passed}/{} tail checks within 3 standard errors",
        rows.len()
    );
    let mut ok = passed == rows.len();
    if let [point] = grid[..] {
        if a.tails_json.is_some() || a.per_trial.is_some() {
            write_collection(a, point)?;
        }
    }
    if a.ions.is_none() {
        // attempt-minimum bracket on the all-ions case
        let device = DeviceParams::default();
        let analytic = min_attempts(&SurgeryQuery::ions(3, 45), &device)?;
        let e = empirical_min_attempts(
            45,
            device.p_entangle,
            analytic.k_star,
            device.p_ls_confidence,
            a.trials,
            a.seed,
        )?;
        let row = AttemptsRow {
            n_ions: 45,
            p_c: device.p_entangle,
            k_star: analytic.k_star,
            analytic: analytic.answer,
            empirical: e.estimate,
            bracket_low: e.low,
            bracket_high: e.high,
            pass: e.brackets(analytic.answer),
        };
        eprintln!(
            "A_min: analytic {} empirical {} bracket [{}, {}] {}",
            row.analytic,
            row.empirical,
            row.bracket_low,
            row.bracket_high,
            if row.pass { "pass" } else { "FAIL" }
        );
        ok &= row.pass;
    }
    Ok(ok)
}

use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use log::info;

use ptmc_core::ising::{generate_layered, problem_to_string};
use ptmc_core::parallel::{plan_packing, Executor, PackingRequest};
use ptmc_core::persist;
use ptmc_core::ptmc::{
    format_ladder, run, CheckpointPolicy, Ensemble, NoObserver, PhaseObserver, RunOptions,
    RunReport,
};
use ptmc_core::rng::RngStream;

use crate::args::{GenerateArgs, PackPlanArgs, ResumeArgs, RunArgs, ScalingArgs, ThroughputArgs};
use crate::bench::{mean_std, speedup_table, throughput};
use crate::config::{self, Problem, ProblemSource, RunConfig};
use crate::report::{
    stats_rows, write_rows, write_text, PackingRow, PhaseCsv, ScalingRow, SizeRow, StatsRow,
    SummaryRow, ThroughputRow,
};

/// `27648` as `27,648`.
pub fn group_thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (k, c) in digits.chars().enumerate() {
        if k > 0 && (digits.len() - k).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<SizeRow> {
    let params = config::layered_params(&args.generator);
    let problem = generate_layered(&params, &mut RngStream::new(args.generator.problem_seed))?;
    let temps = config::ladder(&args.ladder)?;
    write_text(
        &args.output,
        &problem_to_string(&problem.model, Some(&problem.partition)),
    )?;
    write_text(&args.ladder_output, &format_ladder(&temps))?;
    let row = SizeRow {
        qubits: params.qubits,
        copies: params.copies,
        chains: temps.len(),
        total_variables: (problem.model.num_sites() * temps.len()) as u64,
    };
    println!(
        "qubits {} | chains {} | total variables {} ({} x {} x {})",
        row.qubits,
        row.chains,
        group_thousands(row.total_variables),
        row.copies,
        row.qubits,
        row.chains
    );
    Ok(row)
}

/// One timed execution of a configuration.
pub struct Execution {
    pub ensemble: Ensemble,
    pub report: RunReport,
    /// Wall time from ensemble construction to the end of the run.
    pub total_seconds: f64,
}

pub fn execute(
    config: &RunConfig,
    problem: &Problem,
    executor: &Executor,
    checkpoint: Option<CheckpointPolicy>,
    observer: Option<&mut dyn PhaseObserver>,
) -> Result<Execution> {
    let started = Instant::now();
    let mut ensemble = Ensemble::new(
        &problem.model,
        &config.temperatures,
        config.seed,
        config.sweeps_per_swap,
        config.mode,
        problem.partition.as_ref(),
    )?;
    let options = RunOptions {
        total_sweeps: config.total_sweeps,
        throttle: config.throttle,
        checkpoint,
    };
    let report = match observer {
        Some(obs) => run(
            &mut ensemble,
            &problem.model,
            problem.partition.as_ref(),
            executor,
            &options,
            obs,
        )?,
        None => run(
            &mut ensemble,
            &problem.model,
            problem.partition.as_ref(),
            executor,
            &options,
            &mut NoObserver,
        )?,
    };
    Ok(Execution {
        ensemble,
        report,
        total_seconds: started.elapsed().as_secs_f64(),
    })
}

fn summary(label: String, report: &RunReport, total_seconds: f64) -> SummaryRow {
    SummaryRow {
        label,
        pt_time_s: report.pt_time.as_secs_f64(),
        pt_std_s: 0.0,
        total_time_s: total_seconds,
        total_std_s: 0.0,
        phases: report.phases,
        sweeps: report.target_sweeps,
    }
}

fn aggregate(rows: &[SummaryRow]) -> SummaryRow {
    let pt: Vec<f64> = rows.iter().map(|r| r.pt_time_s).collect();
    let total: Vec<f64> = rows.iter().map(|r| r.total_time_s).collect();
    let (pt_mean, pt_std) = mean_std(&pt);
    let (total_mean, total_std) = mean_std(&total);
    SummaryRow {
        label: "aggregate".into(),
        pt_time_s: pt_mean,
        pt_std_s: pt_std,
        total_time_s: total_mean,
        total_std_s: total_std,
        phases: rows.last().map_or(0, |r| r.phases),
        sweeps: rows.last().map_or(0, |r| r.sweeps),
    }
}

pub struct RunOutcome {
    pub summary: Vec<SummaryRow>,
    pub stats: Vec<StatsRow>,
    pub ensemble: Ensemble,
}

/// Runs `config.repetitions` times with the same seed; every repetition
/// produces the same ensemble, only the timings differ.
pub fn repeat(
    config: &RunConfig,
    problem: &Problem,
    executor: &Executor,
    checkpoint: Option<CheckpointPolicy>,
    mut phases: Option<&mut PhaseCsv>,
) -> Result<RunOutcome> {
    let mut rows = Vec::with_capacity(config.repetitions + 1);
    let mut last = None;
    for rep in 0..config.repetitions {
        let observer = if rep == 0 {
            phases.take().map(|p| p as &mut dyn PhaseObserver)
        } else {
            None
        };
        let exec = execute(config, problem, executor, checkpoint.clone(), observer)?;
        info!(
            "repetition {}: {} phases, pt {:.3}s, total {:.3}s",
            rep + 1,
            exec.report.phases,
            exec.report.pt_time.as_secs_f64(),
            exec.total_seconds
        );
        rows.push(summary(
            format!("run-{}", rep + 1),
            &exec.report,
            exec.total_seconds,
        ));
        last = Some(exec.ensemble);
    }
    let ensemble = last.expect("at least one repetition");
    rows.push(aggregate(&rows));
    Ok(RunOutcome {
        stats: stats_rows(&ensemble),
        summary: rows,
        ensemble,
    })
}

pub fn cmd_run(args: &RunArgs) -> Result<RunOutcome> {
    let config = RunConfig::new(&args.problem, &args.sim, config::throttle(&args.exec)?)?;
    let problem = config.problem.load()?;
    let executor = config::executor(&args.exec)?;
    let checkpoint = match &args.checkpoint {
        Some(path) => Some(CheckpointPolicy {
            path: path.clone(),
            interval: config::interval(args.checkpoint_interval)?,
        }),
        None => None,
    };

    let outcome = match &args.phases {
        Some(path) => {
            let probe = Ensemble::new(
                &problem.model,
                &config.temperatures,
                config.seed,
                config.sweeps_per_swap,
                config.mode,
                problem.partition.as_ref(),
            )?;
            let mut csv = PhaseCsv::create(path, &probe)?;
            let outcome = repeat(&config, &problem, &executor, checkpoint, Some(&mut csv))?;
            csv.finish()?;
            outcome
        }
        None => repeat(&config, &problem, &executor, checkpoint, None)?,
    };
    write_rows(&args.summary, &outcome.summary)?;
    write_rows(&args.stats, &outcome.stats)?;
    let agg = outcome.summary.last().expect("aggregate row");
    println!(
        "{} phases, {} sweeps; PT time {:.3}s (std {:.3}), total time {:.3}s (std {:.3})",
        agg.phases, agg.sweeps, agg.pt_time_s, agg.pt_std_s, agg.total_time_s, agg.total_std_s
    );
    Ok(outcome)
}

pub fn cmd_scaling(args: &ScalingArgs) -> Result<Vec<ScalingRow>> {
    ensure!(!args.worker_counts.is_empty(), "no worker counts given");
    ensure!(
        args.worker_counts.contains(&1),
        "worker counts must include 1 to compute speedups"
    );
    let config = RunConfig::new(
        &args.problem,
        &args.sim,
        ptmc_core::parallel::ThrottleConfig::new(1.0, args.priority)?,
    )?;
    let problem = config.problem.load()?;

    let mut measured = Vec::new();
    let mut reference: Option<Vec<u8>> = None;
    for &workers in &args.worker_counts {
        let executor = Executor::new(workers, args.priority)?;
        let outcome = repeat(&config, &problem, &executor, None, None)?;
        let bytes = outcome.ensemble.to_bytes();
        let agg = outcome.summary.last().expect("aggregate row").clone();
        println!(
            "workers {workers}: PT time {:.3}s (std {:.3})",
            agg.pt_time_s, agg.pt_std_s
        );
        measured.push((workers, agg, bytes));
        if workers == 1 {
            reference = Some(measured.last().unwrap().2.clone());
        }
    }
    let reference = reference.expect("worker count 1 present");
    let times: Vec<(usize, f64)> = measured.iter().map(|(w, a, _)| (*w, a.pt_time_s)).collect();
    let speedups = speedup_table(&times)?;
    let rows: Vec<ScalingRow> = measured
        .iter()
        .zip(&speedups)
        .map(|((workers, agg, bytes), s)| ScalingRow {
            workers: *workers,
            pt_time_s: agg.pt_time_s,
            pt_std_s: agg.pt_std_s,
            total_time_s: agg.total_time_s,
            total_std_s: agg.total_std_s,
            speedup: s.speedup,
            linear: s.linear,
            stats_match: *bytes == reference,
        })
        .collect();
    write_rows(&args.output, &rows)?;
    for r in &rows {
        println!(
            "workers {} speedup {:.2} (linear {:.0}) stats match: {}",
            r.workers, r.speedup, r.linear, r.stats_match
        );
    }
    if let Some(r) = rows.iter().find(|r| !r.stats_match) {
        bail!(
            "final ensemble at {} workers differs from the single-worker run",
            r.workers
        );
    }
    Ok(rows)
}

/// Parses `qubits:chains`.
pub fn parse_problem_size(text: &str) -> Result<(usize, usize)> {
    let (q, c) = text
        .split_once(':')
        .with_context(|| format!("expected qubits:chains, got '{text}'"))?;
    let q = q
        .trim()
        .parse()
        .with_context(|| format!("bad qubit count in '{text}'"))?;
    let c = c
        .trim()
        .parse()
        .with_context(|| format!("bad chain count in '{text}'"))?;
    Ok((q, c))
}

pub fn cmd_throughput(args: &ThroughputArgs) -> Result<Vec<ThroughputRow>> {
    ensure!(!args.problems.is_empty(), "no problems given");
    let sizes = args
        .problems
        .iter()
        .map(|p| parse_problem_size(p))
        .collect::<Result<Vec<_>>>()?;
    let executor = config::executor(&args.exec)?;
    let throttle = config::throttle(&args.exec)?;

    let mut rows = Vec::new();
    for (qubits, chains) in sizes {
        let mut generator = args.generator.clone();
        generator.qubits = qubits;
        let config = RunConfig {
            problem: ProblemSource::Generated {
                params: config::layered_params(&generator),
                seed: generator.problem_seed,
            },
            temperatures: ptmc_core::ptmc::geometric_ladder(args.tmin, args.tmax, chains)?,
            total_sweeps: args.sweeps,
            sweeps_per_swap: args.sweeps_per_swap,
            seed: args.seed,
            mode: args.mode,
            throttle,
            repetitions: args.repetitions,
        };
        config.validate()?;
        let problem = config.problem.load()?;
        let variables = (problem.model.num_sites() * chains) as u64;
        let outcome = repeat(&config, &problem, &executor, None, None)?;
        let pt = outcome.summary.last().expect("aggregate row").pt_time_s;
        let row = ThroughputRow {
            qubits,
            copies: generator.copies,
            chains,
            variables,
            pt_time_s: pt,
            variables_per_s: throughput(variables, pt),
        };
        println!(
            "{} qubits, {} chains: {} variables, PT time {:.3}s, {:.1} variables/s",
            qubits,
            chains,
            group_thousands(variables),
            pt,
            row.variables_per_s
        );
        rows.push(row);
    }
    write_rows(&args.output, &rows)?;
    Ok(rows)
}

pub fn cmd_pack_plan(args: &PackPlanArgs) -> Result<Vec<PackingRow>> {
    ensure!(!args.registers.is_empty(), "no register budgets given");
    println!("chains | processors | block | registers | packed | blocks | threads/block | parallel chains");
    let mut rows = Vec::new();
    for &registers in &args.registers {
        let req = PackingRequest {
            num_chains: args.chains,
            processor_count: args.processors,
            block_size: args.block_size,
            max_threads_per_block: args.max_threads_per_block,
            registers_available: registers,
            registers_needed_per_chain_block: args.registers_per_chain_block,
        };
        let plan = plan_packing(&req).with_context(|| format!("register budget {registers}"))?;
        let row = PackingRow {
            chains: args.chains,
            processors: args.processors,
            block_size: plan.block_size,
            registers,
            packed_chains: plan.packed_chains,
            num_blocks: plan.num_blocks,
            threads_per_block: plan.threads_per_block(),
            parallel_chains: plan.parallel_chains(args.processors, args.chains),
        };
        println!(
            "{} | {} | {} | {} | {} | {} | {} | {}",
            row.chains,
            row.processors,
            row.block_size,
            row.registers,
            row.packed_chains,
            row.num_blocks,
            row.threads_per_block,
            row.parallel_chains
        );
        rows.push(row);
    }
    if let Some(path) = &args.output {
        write_rows(path, &rows)?;
    }
    Ok(rows)
}

pub fn cmd_resume(args: &ResumeArgs) -> Result<RunOutcome> {
    let problem = ProblemSource::from_args(&args.problem).load()?;
    let loaded = persist::load(&args.resume, &problem.model)
        .with_context(|| format!("loading checkpoint {}", args.resume.display()))?;
    let total_sweeps = args.sweeps.unwrap_or(loaded.total_sweeps);
    let mut ensemble = loaded.ensemble;
    info!(
        "resuming at sweep {} of {}",
        ensemble.sweep_counter(),
        total_sweeps
    );
    let executor = config::executor(&args.exec)?;
    let options = RunOptions {
        total_sweeps,
        throttle: config::throttle(&args.exec)?,
        checkpoint: Some(CheckpointPolicy {
            path: args.resume.clone(),
            interval: config::interval(args.checkpoint_interval)?,
        }),
    };
    let started = Instant::now();
    let report = run(
        &mut ensemble,
        &problem.model,
        problem.partition.as_ref(),
        &executor,
        &options,
        &mut NoObserver,
    )?;
    let mut summary_rows = vec![summary(
        "run-1".into(),
        &report,
        started.elapsed().as_secs_f64(),
    )];
    summary_rows.push(aggregate(&summary_rows));
    let outcome = RunOutcome {
        stats: stats_rows(&ensemble),
        summary: summary_rows,
        ensemble,
    };
    write_rows(&args.summary, &outcome.summary)?;
    write_rows(&args.stats, &outcome.stats)?;
    println!(
        "resumed run finished at sweep {} after {} phases",
        outcome.ensemble.sweep_counter(),
        report.phases
    );
    Ok(outcome)
}

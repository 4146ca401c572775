use clap::Args;
use rayon::prelude::*;

use spinorbit::experiment::{run_bell_pipeline, write_counts_csv};
use spinorbit::quantum::DEFAULT_OAM_TRUNCATION;
use spinorbit::tomography::{mle_reconstruct, MleInit, MleOptions, TomographyResult};
use spinorbit::{BellState, CountRecord, ExperimentConfig, NoiseModel};

use super::{finish, median, resolver, InitArg};
use crate::config::Flag;
use crate::error::{CliError, CliResult};
use crate::Common;

#[derive(Args, Debug)]
pub struct BellArgs {
    /// Bell state to generate: psi+, psi-, phi+ or phi- [default: psi+].
    #[arg(long)]
    target: Option<String>,
    /// Expected coincidences per window without projection [default: 1000].
    #[arg(long)]
    counts: Option<String>,
    /// Metasurface conversion efficiency [default: 0.72].
    #[arg(long)]
    eta: Option<String>,
    /// none or poisson [default: poisson].
    #[arg(long)]
    noise: Option<String>,
    /// Base RNG seed; trial i uses seed + i [default: 0].
    #[arg(long)]
    seed: Option<String>,
    /// Number of independent trials [default: 1].
    #[arg(long)]
    trials: Option<String>,
    /// Keep only the converted l = +-1 light [default: true].
    #[arg(long)]
    post_select: Option<String>,
    /// Integration window per setting in seconds [default: 10].
    #[arg(long)]
    duration: Option<String>,
    /// OAM truncation of the simulated space [default: 1].
    #[arg(long)]
    l_max: Option<String>,
    /// MLE starting point: linear or identity [default: linear].
    #[arg(long)]
    init: Option<String>,
    /// MLE budget of cost evaluations [default: 100000].
    #[arg(long)]
    max_evals: Option<String>,
    #[command(flatten)]
    common: Common,
}

const COUNTS_FILE: &str = "counts.csv";
const RESULT_FILE: &str = "result.json";
const TRIALS_FILE: &str = "trials.csv";
const SUMMARY_FILE: &str = "summary.txt";

struct Trial {
    seed: u64,
    counts: Vec<CountRecord>,
    result: TomographyResult,
    fidelity: f64,
}

fn run_trial(config: &ExperimentConfig, options: &MleOptions, init: MleInit) -> CliResult<Trial> {
    let run = run_bell_pipeline(config)?;
    let result = mle_reconstruct(&run.counts, init, options)?.with_target(config.target)?;
    let fidelity = result.fidelity_vs_target.unwrap_or(0.0);
    Ok(Trial {
        seed: config.seed,
        counts: run.counts,
        result,
        fidelity,
    })
}

pub fn run(args: BellArgs) -> CliResult<()> {
    let defaults = ExperimentConfig::default();
    let mut r = resolver("bell", &args.common)?;
    let target: BellState = r.get("target", args.target, defaults.target)?;
    let n_total: f64 = r.get("counts", args.counts, defaults.n_total)?;
    let efficiency: f64 = r.get("eta", args.eta, defaults.efficiency)?;
    let noise: NoiseModel = r.get("noise", args.noise, defaults.noise)?;
    let seed: u64 = r.get("seed", args.seed, defaults.seed)?;
    let trials: usize = r.get("trials", args.trials, 1)?;
    let post_select: Flag = r.get("post_select", args.post_select, Flag(defaults.post_select))?;
    let duration_s: f64 = r.get("duration", args.duration, defaults.duration_s)?;
    let l_max: usize = r.get("l_max", args.l_max, DEFAULT_OAM_TRUNCATION)?;
    let init: InitArg = r.get("init", args.init, InitArg(MleInit::Linear))?;
    let max_evals: usize = r.get("max_evals", args.max_evals, MleOptions::default().max_evals)?;

    if !(n_total > 0.0 && n_total.is_finite()) {
        return Err(CliError::usage(format!(
            "--counts must be positive, got {n_total}"
        )));
    }
    if trials == 0 {
        return Err(CliError::usage("--trials must be at least 1"));
    }
    let base = ExperimentConfig {
        target,
        n_total,
        efficiency,
        noise,
        seed,
        post_select: post_select.0,
        duration_s,
        l_max,
    };
    base.validate()?;
    let seeds: Vec<u64> = (0..trials as u64)
        .map(|i| seed.checked_add(i))
        .collect::<Option<_>>()
        .ok_or_else(|| CliError::usage("seed + trials overflows a 64-bit seed"))?;
    let options = MleOptions {
        max_evals,
        ..Default::default()
    };

    let mut files = vec![COUNTS_FILE, RESULT_FILE, SUMMARY_FILE];
    if trials > 1 {
        files.push(TRIALS_FILE);
    }
    let (manifest, out) = finish(r, &args.common, &files)?;

    let outcomes: Vec<CliResult<Trial>> = seeds
        .par_iter()
        .map(|&s| {
            let cfg = ExperimentConfig {
                seed: s,
                ..base.clone()
            };
            run_trial(&cfg, &options, init.0)
        })
        .collect();
    let trials_done: Vec<Trial> = outcomes.into_iter().collect::<CliResult<_>>()?;

    let first = &trials_done[0];
    let mut counts_csv = Vec::new();
    write_counts_csv(&mut counts_csv, &first.counts)?;
    out.write(COUNTS_FILE, &counts_csv)?;
    out.write(RESULT_FILE, first.result.to_json()?.as_bytes())?;

    let fidelities: Vec<f64> = trials_done.iter().map(|t| t.fidelity).collect();
    let converged = trials_done.iter().filter(|t| t.result.converged).count();
    let med = median(&fidelities);
    let mut summary = format!(
        "target={target} fidelity={med:.6} converged={}\n",
        converged == trials
    );
    if trials > 1 {
        let min = fidelities.iter().copied().fold(f64::INFINITY, f64::min);
        let max = fidelities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        summary.push_str(&format!(
            "trials={trials} min={min:.6} median={med:.6} max={max:.6} converged_trials={converged}\n"
        ));
        let mut table = String::from("trial,seed,fidelity,converged,nll,iterations\n");
        for (i, t) in trials_done.iter().enumerate() {
            table.push_str(&format!(
                "{i},{},{},{},{},{}\n",
                t.seed,
                t.fidelity,
                t.result.converged,
                t.result.nll.unwrap_or(f64::NAN),
                t.result.iterations.unwrap_or(0)
            ));
        }
        out.write(TRIALS_FILE, table.as_bytes())?;
    }
    out.write(SUMMARY_FILE, summary.as_bytes())?;
    out.write_manifest(&manifest)?;
    print!("{summary}");

    if converged == 0 {
        return Err(CliError::numerical(format!(
            "maximum-likelihood fit did not converge in any of {trials} trial(s)"
        )));
    }
    Ok(())
}

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use clap::Args;

use spinorbit::experiment::read_counts_csv;
use spinorbit::quantum::trace_distance;
use spinorbit::tomography::{linear_inversion, mle_reconstruct, MleInit, MleOptions};
use spinorbit::BellState;

use super::{finish, resolver, InitArg};
use crate::error::{CliError, CliResult};
use crate::Common;

#[derive(Args, Debug)]
pub struct TomoArgs {
    /// Counts CSV with header setting_id,label,counts,duration_s.
    #[arg(long)]
    counts_file: Option<String>,
    /// Bell state to compare against: psi+, psi-, phi+ or phi-.
    #[arg(long)]
    target: Option<String>,
    /// MLE starting point: linear or identity [default: linear].
    #[arg(long)]
    init: Option<String>,
    /// MLE budget of cost evaluations [default: 100000].
    #[arg(long)]
    max_evals: Option<String>,
    #[command(flatten)]
    common: Common,
}

const LINEAR_FILE: &str = "linear.json";
const MLE_FILE: &str = "mle.json";

pub fn run(args: TomoArgs) -> CliResult<()> {
    let mut r = resolver("tomo", &args.common)?;
    let counts_file: Option<String> = r.get_opt("counts_file", args.counts_file)?;
    let target: Option<BellState> = r.get_opt("target", args.target)?;
    let init: InitArg = r.get("init", args.init, InitArg(MleInit::Linear))?;
    let max_evals: usize = r.get("max_evals", args.max_evals, MleOptions::default().max_evals)?;
    let counts_file =
        PathBuf::from(counts_file.ok_or_else(|| CliError::usage("--counts-file is required"))?);

    let file = File::open(&counts_file)
        .map_err(|e| CliError::usage(format!("cannot open {}: {e}", counts_file.display())))?;
    let records = read_counts_csv(BufReader::new(file))
        .map_err(|e| CliError::usage(format!("{}: {e}", counts_file.display())))?;

    let (manifest, out) = finish(r, &args.common, &[LINEAR_FILE, MLE_FILE])?;

    let options = MleOptions {
        max_evals,
        ..Default::default()
    };
    let mut linear = linear_inversion(&records)?;
    let mut mle = mle_reconstruct(&records, init.0, &options)?;
    if let Some(t) = target {
        linear = linear.with_target(t)?;
        mle = mle.with_target(t)?;
    }
    out.write(LINEAR_FILE, linear.to_json()?.as_bytes())?;
    out.write(MLE_FILE, mle.to_json()?.as_bytes())?;
    out.write_manifest(&manifest)?;

    let distance = trace_distance(&linear.rho, &mle.rho)?;
    let fid = |f: Option<f64>| f.map_or("n/a".to_string(), |v| format!("{v:.6}"));
    println!(
        "linear fidelity={} physical={}",
        fid(linear.fidelity_vs_target),
        linear.physical
    );
    println!(
        "mle fidelity={} converged={} nll={:.6}",
        fid(mle.fidelity_vs_target),
        mle.converged,
        mle.nll.unwrap_or(f64::NAN)
    );
    println!("trace_distance={distance:.3e}");

    if !mle.converged {
        return Err(CliError::numerical(
            "maximum-likelihood fit did not reach a stationary point",
        ));
    }
    Ok(())
}

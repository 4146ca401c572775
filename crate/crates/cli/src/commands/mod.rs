pub mod bell;
pub mod design;
pub mod farfield;
pub mod tomo;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use spinorbit::tomography::MleInit;

use crate::config::{Manifest, Resolver};
use crate::error::CliResult;
use crate::output::{default_out_dir, OutputDir};
use crate::Common;

/// Starts resolution for `command`, loading `--config` if given.
fn resolver(command: &'static str, common: &Common) -> CliResult<Resolver> {
    Resolver::new(command, common.config.as_deref())
}

/// Resolves the output directory last so it closes the manifest.
fn finish(
    mut resolver: Resolver,
    common: &Common,
    files: &[&str],
) -> CliResult<(Manifest, OutputDir)> {
    let out: String = resolver.get("out", common.out.clone(), default_out_dir())?;
    let manifest = resolver.finish()?;
    let dir = OutputDir::prepare(&PathBuf::from(out), common.force, files)?;
    Ok((manifest, dir))
}

/// MLE starting point as written on the command line.
#[derive(Clone, Copy, Debug)]
pub struct InitArg(pub MleInit);

impl FromStr for InitArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(InitArg(MleInit::Linear)),
            "identity" => Ok(InitArg(MleInit::Identity)),
            _ => Err("expected linear or identity".into()),
        }
    }
}

impl fmt::Display for InitArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            MleInit::Linear => "linear",
            MleInit::Identity => "identity",
        })
    }
}

/// Median of a non-empty slice; the mean of the middle pair for even lengths.
fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

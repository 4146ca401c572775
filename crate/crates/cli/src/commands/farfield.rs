use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use clap::Args;

use spinorbit::design::far_field;
use spinorbit::design::pgm::{intensity_to_pgm, phase_mask_from_pgm, MaskSidecar, Pgm};

use super::design::{pretty, resolve_beam};
use super::{finish, resolver};
use crate::error::{CliError, CliResult};
use crate::Common;

#[derive(Args, Debug)]
pub struct FarfieldArgs {
    /// Phase-mask PGM written by `design`.
    #[arg(long)]
    mask: Option<String>,
    /// Aperture sidecar JSON [default: the mask path with a .json extension].
    #[arg(long)]
    sidecar: Option<String>,
    /// gaussian or uniform illumination [default: gaussian].
    #[arg(long)]
    beam: Option<String>,
    /// Gaussian waist in micrometres [default: aperture / 4].
    #[arg(long)]
    waist_um: Option<String>,
    #[command(flatten)]
    common: Common,
}

const FARFIELD_FILE: &str = "farfield.pgm";
const FARFIELD_META: &str = "farfield.json";

fn open(path: &PathBuf) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))
}

pub fn run(args: FarfieldArgs) -> CliResult<()> {
    let mut r = resolver("farfield", &args.common)?;
    let mask: Option<String> = r.get_opt("mask", args.mask)?;
    let mask = PathBuf::from(mask.ok_or_else(|| CliError::usage("--mask is required"))?);
    let default_sidecar = mask.with_extension("json").display().to_string();
    let sidecar_path = PathBuf::from(r.get("sidecar", args.sidecar, default_sidecar)?);

    let sidecar_text = std::fs::read_to_string(&sidecar_path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", sidecar_path.display())))?;
    let sidecar = MaskSidecar::from_json(&sidecar_text)
        .map_err(|e| CliError::usage(format!("{}: {e}", sidecar_path.display())))?;
    let pgm =
        Pgm::read(open(&mask)?).map_err(|e| CliError::usage(format!("{}: {e}", mask.display())))?;
    let phase = phase_mask_from_pgm(&pgm, &sidecar)
        .map_err(|e| CliError::usage(format!("{}: {e}", mask.display())))?;

    let beam = resolve_beam(&mut r, args.beam, args.waist_um, 2.0 * sidecar.radius_nm)?;
    let far = far_field(&phase, &beam)?;
    let (manifest, out) = finish(r, &args.common, &[FARFIELD_FILE, FARFIELD_META])?;

    let mut bytes = Vec::new();
    intensity_to_pgm(&far).write(&mut bytes)?;
    out.write(FARFIELD_FILE, &bytes)?;
    let ratio = far.on_axis() / far.peak();
    let meta = serde_json::json!({
        "grid_n": far.grid_n,
        "peak": far.peak(),
        "on_axis": far.on_axis(),
        "on_axis_ratio": ratio,
        "total_power": far.total(),
    });
    out.write(FARFIELD_META, pretty(&meta).as_bytes())?;
    out.write_manifest(&manifest)?;
    println!("peak={:.6e} on_axis_ratio={ratio:.3e}", far.peak());
    Ok(())
}

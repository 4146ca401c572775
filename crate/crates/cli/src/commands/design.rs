use std::fmt;
use std::str::FromStr;

use clap::Args;

use spinorbit::design::pgm::{intensity_to_pgm, phase_mask_to_pgm, MaskSidecar};
use spinorbit::design::{
    far_field, generate_layout, near_field, oam_spectrum, phase_mask, write_layout_csv, Beam,
    LayoutSpec, MaskKind, OamSpectrum, DEFAULT_GRID,
};
use spinorbit::Spin;

use super::{finish, resolver};
use crate::error::CliResult;
use crate::Common;

#[derive(Args, Debug)]
pub struct DesignArgs {
    /// Topological charge of the orientation pattern [default: 1].
    #[arg(long)]
    winding: Option<String>,
    /// Spin (+1 or -1) used for the far field and spectrum [default: +1].
    #[arg(long)]
    spin: Option<String>,
    /// Grid size in pixels, even and at least 64 [default: 1024].
    #[arg(long)]
    grid: Option<String>,
    /// ideal or block (orientation held per 700 nm block) [default: block].
    #[arg(long)]
    kind: Option<String>,
    /// Aperture diameter in micrometres [default: 200].
    #[arg(long)]
    aperture_um: Option<String>,
    /// Block edge in nm [default: 700].
    #[arg(long)]
    block_nm: Option<String>,
    /// Rod width in nm [default: 105].
    #[arg(long)]
    rod_width_nm: Option<String>,
    /// Rod depth in nm [default: 300].
    #[arg(long)]
    rod_depth_nm: Option<String>,
    /// Rod pitch in nm [default: 233].
    #[arg(long)]
    rod_pitch_nm: Option<String>,
    /// gaussian or uniform illumination [default: gaussian].
    #[arg(long)]
    beam: Option<String>,
    /// Gaussian waist in micrometres [default: aperture / 4].
    #[arg(long)]
    waist_um: Option<String>,
    /// Largest |l| reported in the spectrum [default: 4].
    #[arg(long)]
    l_max: Option<String>,
    #[command(flatten)]
    common: Common,
}

const LAYOUT_FILE: &str = "layout.csv";
const LAYOUT_META: &str = "layout.json";
const MASK_PLUS: &str = "mask_sigma_plus.pgm";
const MASK_PLUS_META: &str = "mask_sigma_plus.json";
const MASK_MINUS: &str = "mask_sigma_minus.pgm";
const MASK_MINUS_META: &str = "mask_sigma_minus.json";
const FARFIELD_FILE: &str = "farfield.pgm";
const SPECTRUM_FILE: &str = "spectrum.json";

/// Spin written as +1 or -1.
#[derive(Clone, Copy, Debug)]
pub struct SpinArg(pub Spin);

impl FromStr for SpinArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "+1" | "1" | "+" => Ok(SpinArg(Spin::Plus)),
            "-1" | "-" => Ok(SpinArg(Spin::Minus)),
            _ => Err("expected +1 or -1".into()),
        }
    }
}

impl fmt::Display for SpinArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.0.sign())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KindArg(pub MaskKind);

impl FromStr for KindArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ideal" => Ok(KindArg(MaskKind::Ideal)),
            "block" | "block_quantized" => Ok(KindArg(MaskKind::BlockQuantized)),
            _ => Err("expected ideal or block".into()),
        }
    }
}

impl fmt::Display for KindArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            MaskKind::Ideal => "ideal",
            MaskKind::BlockQuantized => "block",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BeamKind {
    Gaussian,
    Uniform,
}

impl FromStr for BeamKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" => Ok(BeamKind::Gaussian),
            "uniform" => Ok(BeamKind::Uniform),
            _ => Err("expected gaussian or uniform".into()),
        }
    }
}

impl fmt::Display for BeamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BeamKind::Gaussian => "gaussian",
            BeamKind::Uniform => "uniform",
        })
    }
}

/// Resolves `beam` and `waist_um` into a beam; the waist defaults to a
/// quarter of the aperture and is only echoed for Gaussian beams.
pub fn resolve_beam(
    r: &mut crate::config::Resolver,
    beam: Option<String>,
    waist_um: Option<String>,
    aperture_nm: f64,
) -> CliResult<Beam> {
    let kind: BeamKind = r.get("beam", beam, BeamKind::Gaussian)?;
    Ok(match kind {
        BeamKind::Gaussian => {
            let waist: f64 = r.get("waist_um", waist_um, aperture_nm / 4.0 / 1000.0)?;
            Beam::Gaussian {
                waist_nm: waist * 1000.0,
            }
        }
        BeamKind::Uniform => Beam::Uniform,
    })
}

/// `{"l": power}` for every order, lowest first.
fn spectrum_json(spectrum: &OamSpectrum) -> String {
    let body: Vec<String> = spectrum
        .orders()
        .map(|(l, p)| format!("  \"{l}\": {}", serde_json::Value::from(p)))
        .collect();
    format!("{{\n{}\n}}\n", body.join(",\n"))
}

pub fn run(args: DesignArgs) -> CliResult<()> {
    let defaults = LayoutSpec::default();
    let mut r = resolver("design", &args.common)?;
    let winding: i32 = r.get("winding", args.winding, defaults.winding)?;
    let spin: SpinArg = r.get("spin", args.spin, SpinArg(Spin::Plus))?;
    let grid: usize = r.get("grid", args.grid, DEFAULT_GRID)?;
    let kind: KindArg = r.get("kind", args.kind, KindArg(MaskKind::BlockQuantized))?;
    let aperture_um: f64 = r.get(
        "aperture_um",
        args.aperture_um,
        defaults.aperture_diameter_nm / 1000.0,
    )?;
    let spec = LayoutSpec {
        winding,
        aperture_diameter_nm: aperture_um * 1000.0,
        block_size_nm: r.get("block_nm", args.block_nm, defaults.block_size_nm)?,
        rod_width_nm: r.get("rod_width_nm", args.rod_width_nm, defaults.rod_width_nm)?,
        rod_depth_nm: r.get("rod_depth_nm", args.rod_depth_nm, defaults.rod_depth_nm)?,
        rod_pitch_nm: r.get("rod_pitch_nm", args.rod_pitch_nm, defaults.rod_pitch_nm)?,
    };
    let beam = resolve_beam(&mut r, args.beam, args.waist_um, spec.aperture_diameter_nm)?;
    let l_max: usize = r.get("l_max", args.l_max, 4)?;
    spec.validate()?;

    // Everything that can fail on bad geometry runs before any file is written.
    let rods = generate_layout(&spec)?;
    let plus = phase_mask(&spec, Spin::Plus, grid, kind.0)?;
    let minus = phase_mask(&spec, Spin::Minus, grid, kind.0)?;
    let chosen = if spin.0 == Spin::Plus { &plus } else { &minus };
    let far = far_field(chosen, &beam)?;
    let spectrum = oam_spectrum(
        &near_field(chosen, &beam)?,
        spec.aperture_diameter_nm / 4.0,
        l_max,
    )?;

    let files = [
        LAYOUT_FILE,
        LAYOUT_META,
        MASK_PLUS,
        MASK_PLUS_META,
        MASK_MINUS,
        MASK_MINUS_META,
        FARFIELD_FILE,
        SPECTRUM_FILE,
    ];
    let (manifest, out) = finish(r, &args.common, &files)?;

    let mut csv = Vec::new();
    write_layout_csv(&mut csv, &rods)?;
    out.write(LAYOUT_FILE, &csv)?;
    let meta = serde_json::json!({
        "spec": spec,
        "rod_length_nm": spec.rod_length_nm(),
        "rods": rods.len(),
    });
    out.write(LAYOUT_META, pretty(&meta).as_bytes())?;

    for (mask, pgm_name, meta_name) in [
        (&plus, MASK_PLUS, MASK_PLUS_META),
        (&minus, MASK_MINUS, MASK_MINUS_META),
    ] {
        let mut bytes = Vec::new();
        phase_mask_to_pgm(mask).write(&mut bytes)?;
        out.write(pgm_name, &bytes)?;
        out.write(meta_name, MaskSidecar::for_mask(mask).to_json()?.as_bytes())?;
    }

    let mut bytes = Vec::new();
    intensity_to_pgm(&far).write(&mut bytes)?;
    out.write(FARFIELD_FILE, &bytes)?;
    out.write(SPECTRUM_FILE, spectrum_json(&spectrum).as_bytes())?;
    out.write_manifest(&manifest)?;

    let (l, power) = spectrum.dominant();
    println!(
        "winding={winding} spin={spin} rods={} dominant_l={l} power={power:.6} on_axis_ratio={:.3e}",
        rods.len(),
        far.on_axis() / far.peak()
    );
    Ok(())
}

pub fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

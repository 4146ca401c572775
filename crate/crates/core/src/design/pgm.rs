//! 16-bit binary PGM (P5) images for masks and intensities.
//!
//! Image row 0 is the top of the grid (largest `y`). Samples are big-endian.
//! Phase `phi` is stored as `round(phi / 2pi * 65536) mod 65536`; opaque
//! pixels are stored as 0 and the aperture is described by a JSON sidecar.

use std::f64::consts::TAU;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::fourier::IntensityGrid;
use super::layout::ROD_LENGTH_FRACTION;
use super::mask::{check_grid, MaskKind, PhaseMask};
use crate::quantum::Spin;
use crate::{Error, Result};

pub const MAX_VALUE: u16 = 65535;

/// Geometry needed to turn a phase PGM back into a [`PhaseMask`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaskSidecar {
    pub grid_n: usize,
    pub pixel_pitch_nm: f64,
    /// Optical axis in pixel coordinates (column, row) of the image.
    pub center_px: [f64; 2],
    pub radius_nm: f64,
    pub radius_px: f64,
    pub spin: Spin,
    pub winding: i32,
    pub kind: MaskKind,
    pub block_size_nm: f64,
    pub rod_length_nm: f64,
}

impl MaskSidecar {
    pub fn for_mask(mask: &PhaseMask) -> Self {
        // Pixel centres sit at half-integers, so the axis falls on a corner.
        let c = mask.grid_n as f64 / 2.0;
        MaskSidecar {
            grid_n: mask.grid_n,
            pixel_pitch_nm: mask.pixel_pitch_nm,
            center_px: [c, c],
            radius_nm: mask.aperture_radius_nm,
            radius_px: mask.aperture_radius_nm / mask.pixel_pitch_nm,
            spin: mask.spin,
            winding: mask.winding,
            kind: mask.kind,
            block_size_nm: mask.block_size_nm,
            rod_length_nm: ROD_LENGTH_FRACTION * mask.block_size_nm,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn encode_phase(phi: f64) -> u16 {
    ((phi / TAU * 65536.0).round() as i64).rem_euclid(65536) as u16
}

pub fn decode_phase(v: u16) -> f64 {
    v as f64 / 65536.0 * TAU
}

/// Raw contents of a 16-bit PGM.
#[derive(Clone, Debug, PartialEq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    /// Row-major, top row first.
    pub data: Vec<u16>,
}

impl Pgm {
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "P5\n{} {}\n{}\n", self.width, self.height, MAX_VALUE)?;
        let mut bytes = Vec::with_capacity(self.data.len() * 2);
        for v in &self.data {
            bytes.extend_from_slice(&v.to_be_bytes());
        }
        w.write_all(&bytes)?;
        w.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(mut r: R) -> Result<Pgm> {
        let mut fields = Vec::new();
        while fields.len() < 4 {
            let mut line = String::new();
            if r.read_line(&mut line)? == 0 {
                return Err(pgm_error("truncated header"));
            }
            let content = line.split('#').next().unwrap_or("");
            fields.extend(content.split_whitespace().map(str::to_owned));
        }
        if fields.len() > 4 {
            return Err(pgm_error("unexpected data on the maxval line"));
        }
        if fields[0] != "P5" {
            return Err(pgm_error(format!(
                "expected magic P5, found '{}'",
                fields[0]
            )));
        }
        let num = |s: &str, what: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| pgm_error(format!("invalid {what} '{s}'")))
        };
        let width = num(&fields[1], "width")?;
        let height = num(&fields[2], "height")?;
        if num(&fields[3], "maxval")? != MAX_VALUE as usize {
            return Err(pgm_error(format!("maxval must be {MAX_VALUE}")));
        }
        let len = width
            .checked_mul(height)
            .filter(|&l| l <= 1 << 28)
            .ok_or_else(|| pgm_error("image too large"))?;
        let mut bytes = vec![0u8; len * 2];
        r.read_exact(&mut bytes)
            .map_err(|_| pgm_error(format!("expected {} bytes of pixel data", len * 2)))?;
        let data = bytes
            .chunks_exact(2)
            .map(|b| u16::from_be_bytes([b[0], b[1]]))
            .collect();
        Ok(Pgm {
            width,
            height,
            data,
        })
    }
}

fn pgm_error(message: impl Into<String>) -> Error {
    Error::Parse {
        location: "PGM".into(),
        message: message.into(),
    }
}

/// Flips between grid rows (bottom first) and image rows (top first).
fn flip_rows<T: Copy>(data: &[T], n: usize) -> Vec<T> {
    data.chunks_exact(n).rev().flatten().copied().collect()
}

pub fn phase_mask_to_pgm(mask: &PhaseMask) -> Pgm {
    let encoded: Vec<u16> = mask
        .values
        .iter()
        .zip(&mask.opaque)
        .map(|(v, o)| if *o { 0 } else { encode_phase(*v) })
        .collect();
    Pgm {
        width: mask.grid_n,
        height: mask.grid_n,
        data: flip_rows(&encoded, mask.grid_n),
    }
}

/// Rebuilds a mask from its image and sidecar. Phases come back quantized
/// to 2pi/65536.
pub fn phase_mask_from_pgm(pgm: &Pgm, sidecar: &MaskSidecar) -> Result<PhaseMask> {
    let n = sidecar.grid_n;
    check_grid(n)?;
    if pgm.width != n || pgm.height != n {
        return Err(pgm_error(format!(
            "image is {}x{} but the sidecar declares {n}x{n}",
            pgm.width, pgm.height
        )));
    }
    if !(sidecar.pixel_pitch_nm > 0.0 && sidecar.radius_nm > 0.0 && sidecar.block_size_nm > 0.0) {
        return Err(Error::InvalidParameter(
            "sidecar lengths must be positive".into(),
        ));
    }
    let opaque = PhaseMask::aperture_flags(
        n,
        sidecar.pixel_pitch_nm,
        sidecar.radius_nm,
        sidecar.kind,
        sidecar.block_size_nm,
    );
    let values = flip_rows(&pgm.data, n)
        .into_iter()
        .zip(&opaque)
        .map(|(v, o)| if *o { 0.0 } else { decode_phase(v) })
        .collect();
    Ok(PhaseMask {
        grid_n: n,
        pixel_pitch_nm: sidecar.pixel_pitch_nm,
        spin: sidecar.spin,
        winding: sidecar.winding,
        kind: sidecar.kind,
        aperture_radius_nm: sidecar.radius_nm,
        block_size_nm: sidecar.block_size_nm,
        values,
        opaque,
    })
}

/// Linear intensity scale with the maximum mapped to 65535.
pub fn intensity_to_pgm(grid: &IntensityGrid) -> Pgm {
    let peak = grid.peak();
    let scale = if peak > 0.0 {
        MAX_VALUE as f64 / peak
    } else {
        0.0
    };
    let encoded: Vec<u16> = grid
        .data
        .iter()
        .map(|v| (v * scale).round().clamp(0.0, MAX_VALUE as f64) as u16)
        .collect();
    Pgm {
        width: grid.grid_n,
        height: grid.grid_n,
        data: flip_rows(&encoded, grid.grid_n),
    }
}

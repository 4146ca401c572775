use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::layout::{orientation_field, LayoutSpec};
use crate::quantum::Spin;
use crate::{Error, Result};

pub const DEFAULT_GRID: usize = 1024;
pub const MIN_GRID: usize = 64;
/// Fraction of the grid width covered by the aperture diameter.
pub const PADDING_FILL: f64 = 0.875;

/// How the orientation field is sampled onto pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskKind {
    /// Orientation evaluated at every pixel centre.
    Ideal,
    /// Orientation held constant over each layout block, as fabricated.
    BlockQuantized,
}

/// Spin-dependent geometric phase `-2 * spin * theta` on a square grid.
///
/// `values` is row-major with row `iy` at `y = (iy - n/2 + 0.5) * pitch`.
/// Pixels outside the aperture are flagged opaque and carry phase 0.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMask {
    pub grid_n: usize,
    pub pixel_pitch_nm: f64,
    pub spin: Spin,
    pub winding: i32,
    pub kind: MaskKind,
    pub aperture_radius_nm: f64,
    pub block_size_nm: f64,
    pub values: Vec<f64>,
    pub opaque: Vec<bool>,
}

/// Pixel-centre coordinate for index `i` on an `n`-pixel axis.
pub(crate) fn pixel_coord(i: usize, n: usize, pitch: f64) -> f64 {
    (i as f64 - (n / 2) as f64 + 0.5) * pitch
}

pub(crate) fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

pub(crate) fn check_grid(grid_n: usize) -> Result<()> {
    if grid_n < MIN_GRID || grid_n % 2 != 0 {
        return Err(Error::GridTooSmall(format!(
            "grid must be even and at least {MIN_GRID}, got {grid_n}"
        )));
    }
    Ok(())
}

impl PhaseMask {
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.grid_n + ix
    }

    pub fn coord(&self, i: usize) -> f64 {
        pixel_coord(i, self.grid_n, self.pixel_pitch_nm)
    }

    pub fn transparent_count(&self) -> usize {
        self.opaque.iter().filter(|o| !**o).count()
    }

    /// Rebuilds the opacity flags from the aperture geometry.
    pub(crate) fn aperture_flags(
        grid_n: usize,
        pitch: f64,
        radius: f64,
        kind: MaskKind,
        block: f64,
    ) -> Vec<bool> {
        let mut opaque = vec![false; grid_n * grid_n];
        for iy in 0..grid_n {
            let y = pixel_coord(iy, grid_n, pitch);
            for ix in 0..grid_n {
                let x = pixel_coord(ix, grid_n, pitch);
                let (px, py) = match kind {
                    MaskKind::Ideal => (x, y),
                    MaskKind::BlockQuantized => block_center(x, y, block),
                };
                opaque[iy * grid_n + ix] = px.hypot(py) > radius;
            }
        }
        opaque
    }
}

fn block_center(x: f64, y: f64, block: f64) -> (f64, f64) {
    (
        ((x / block).floor() + 0.5) * block,
        ((y / block).floor() + 0.5) * block,
    )
}

/// Renders the geometric phase seen by `spin` on a `grid_n` square grid.
///
/// The aperture fills `PADDING_FILL` of the grid, so the pitch is
/// `aperture / (0.875 * grid_n)`.
pub fn phase_mask(
    spec: &LayoutSpec,
    spin: Spin,
    grid_n: usize,
    kind: MaskKind,
) -> Result<PhaseMask> {
    spec.validate()?;
    check_grid(grid_n)?;
    let pitch = spec.aperture_diameter_nm / (PADDING_FILL * grid_n as f64);
    let radius = spec.aperture_radius_nm();
    let block = spec.block_size_nm;
    let opaque = PhaseMask::aperture_flags(grid_n, pitch, radius, kind, block);
    let sign = -2.0 * spin.sign() as f64;
    let mut values = vec![0.0; grid_n * grid_n];
    for iy in 0..grid_n {
        let y = pixel_coord(iy, grid_n, pitch);
        for ix in 0..grid_n {
            let k = iy * grid_n + ix;
            if opaque[k] {
                continue;
            }
            let x = pixel_coord(ix, grid_n, pitch);
            let (px, py) = match kind {
                MaskKind::Ideal => (x, y),
                MaskKind::BlockQuantized => block_center(x, y, block),
            };
            let theta = orientation_field(px, py, spec.winding)?;
            values[k] = wrap_phase(sign * theta);
        }
    }
    debug_assert!(values.iter().all(|v| (0.0..TAU).contains(v)));
    Ok(PhaseMask {
        grid_n,
        pixel_pitch_nm: pitch,
        spin,
        winding: spec.winding,
        kind,
        aperture_radius_nm: radius,
        block_size_nm: block,
        values,
        opaque,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(winding: i32) -> LayoutSpec {
        LayoutSpec::with_winding(winding)
    }

    #[test]
    fn default_pitch() {
        let m = phase_mask(&spec(1), Spin::Plus, 1024, MaskKind::Ideal).unwrap();
        assert!((m.pixel_pitch_nm - 200_000.0 / 896.0).abs() < 1e-9);
        let r_px = m.aperture_radius_nm / m.pixel_pitch_nm;
        assert!((r_px - 448.0).abs() < 1e-9);
    }

    #[test]
    fn grid_checks() {
        assert!(phase_mask(&spec(1), Spin::Plus, 32, MaskKind::Ideal).is_err());
        assert!(phase_mask(&spec(1), Spin::Plus, 65, MaskKind::Ideal).is_err());
        assert!(phase_mask(&spec(1), Spin::Plus, 64, MaskKind::Ideal).is_ok());
    }

    #[test]
    fn opposite_spins_cancel() {
        for kind in [MaskKind::Ideal, MaskKind::BlockQuantized] {
            let a = phase_mask(&spec(1), Spin::Plus, 256, kind).unwrap();
            let b = phase_mask(&spec(1), Spin::Minus, 256, kind).unwrap();
            assert_eq!(a.opaque, b.opaque);
            for (x, y) in a.values.iter().zip(&b.values) {
                let s = (x + y).rem_euclid(TAU);
                assert!(s.min(TAU - s) < 1e-12);
            }
        }
    }

    #[test]
    fn flat_without_winding() {
        let m = phase_mask(&spec(0), Spin::Plus, 128, MaskKind::Ideal).unwrap();
        assert!(m.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn values_wrapped() {
        let m = phase_mask(&spec(3), Spin::Minus, 128, MaskKind::Ideal).unwrap();
        assert!(m.values.iter().all(|v| (0.0..TAU).contains(v)));
    }

    /// Net phase advance around a circle of radius aperture/4, from the
    /// pixels nearest to 4096 sample points.
    fn loop_winding(m: &PhaseMask) -> f64 {
        let r = m.aperture_radius_nm / 2.0;
        let n = m.grid_n;
        let to_index = |c: f64| ((c / m.pixel_pitch_nm) + (n / 2) as f64 - 0.5).round() as usize;
        let steps = 4096;
        let samples: Vec<f64> = (0..steps)
            .map(|k| {
                let phi = TAU * k as f64 / steps as f64;
                m.values[m.index(to_index(r * phi.cos()), to_index(r * phi.sin()))]
            })
            .collect();
        let mut total = 0.0;
        for k in 0..steps {
            let mut d = samples[(k + 1) % steps] - samples[k];
            d -= TAU * (d / TAU).round();
            total += d;
        }
        total / TAU
    }

    #[test]
    fn winding_matches_minus_spin_times_charge() {
        for winding in [-2, -1, 1, 2, 3] {
            for spin in Spin::BOTH {
                let m = phase_mask(&spec(winding), spin, 512, MaskKind::Ideal).unwrap();
                let w = loop_winding(&m);
                let expected = -(spin.sign() * winding) as f64;
                assert!((w - expected).abs() < 1e-9, "{winding} {spin:?}: {w}");
            }
        }
    }

    #[test]
    fn quantized_mask_is_blockwise_constant() {
        let m = phase_mask(&spec(1), Spin::Plus, 1024, MaskKind::BlockQuantized).unwrap();
        let b = m.block_size_nm;
        let mut seen = std::collections::HashMap::new();
        for iy in 0..m.grid_n {
            for ix in 0..m.grid_n {
                let k = m.index(ix, iy);
                if m.opaque[k] {
                    continue;
                }
                let key = (
                    (m.coord(ix) / b).floor() as i64,
                    (m.coord(iy) / b).floor() as i64,
                );
                let v = *seen.entry(key).or_insert(m.values[k]);
                assert_eq!(v, m.values[k]);
            }
        }
    }
}

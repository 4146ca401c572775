use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Rod length as a fraction of the block edge.
pub const ROD_LENGTH_FRACTION: f64 = 0.9;

pub const LAYOUT_CSV_HEADER: &str = "x_nm,y_nm,angle_mrad";

/// Geometry of a winding-number metasurface built from rod blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayoutSpec {
    pub winding: i32,
    pub aperture_diameter_nm: f64,
    pub block_size_nm: f64,
    pub rod_width_nm: f64,
    pub rod_depth_nm: f64,
    pub rod_pitch_nm: f64,
}

impl Default for LayoutSpec {
    fn default() -> Self {
        LayoutSpec {
            winding: 1,
            aperture_diameter_nm: 200_000.0,
            block_size_nm: 700.0,
            rod_width_nm: 105.0,
            rod_depth_nm: 300.0,
            rod_pitch_nm: 233.0,
        }
    }
}

impl LayoutSpec {
    pub fn with_winding(winding: i32) -> Self {
        LayoutSpec {
            winding,
            ..Default::default()
        }
    }

    pub fn aperture_radius_nm(&self) -> f64 {
        0.5 * self.aperture_diameter_nm
    }

    pub fn rod_length_nm(&self) -> f64 {
        ROD_LENGTH_FRACTION * self.block_size_nm
    }

    pub fn validate(&self) -> Result<()> {
        let lengths = [
            ("aperture_diameter_nm", self.aperture_diameter_nm),
            ("block_size_nm", self.block_size_nm),
            ("rod_width_nm", self.rod_width_nm),
            ("rod_depth_nm", self.rod_depth_nm),
            ("rod_pitch_nm", self.rod_pitch_nm),
        ];
        for (name, v) in lengths {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.rod_pitch_nm > self.block_size_nm {
            return Err(Error::InvalidParameter(format!(
                "rod pitch {} nm exceeds block size {} nm",
                self.rod_pitch_nm, self.block_size_nm
            )));
        }
        if self.rod_width_nm > self.rod_pitch_nm {
            return Err(Error::InvalidParameter(format!(
                "rod width {} nm exceeds rod pitch {} nm",
                self.rod_width_nm, self.rod_pitch_nm
            )));
        }
        if self.aperture_diameter_nm < 10.0 * self.block_size_nm {
            return Err(Error::InvalidParameter(format!(
                "aperture {} nm must span at least 10 blocks of {} nm",
                self.aperture_diameter_nm, self.block_size_nm
            )));
        }
        Ok(())
    }

    /// Integer block indices whose centres lie inside the aperture, row by row.
    pub(crate) fn blocks(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let b = self.block_size_nm;
        let r = self.aperture_radius_nm();
        let reach = (r / b).ceil() as i64 + 1;
        (-reach..reach).flat_map(move |j| {
            (-reach..reach).filter_map(move |i| {
                let (x, y) = self.block_center(i, j);
                (x.hypot(y) <= r).then_some((i, j))
            })
        })
    }

    pub(crate) fn block_center(&self, i: i64, j: i64) -> (f64, f64) {
        let b = self.block_size_nm;
        ((i as f64 + 0.5) * b, (j as f64 + 0.5) * b)
    }
}

/// Rod orientation `winding * atan2(y, x) / 2`, reduced to `[0, pi)`.
pub fn orientation_field(x: f64, y: f64, winding: i32) -> Result<f64> {
    if x == 0.0 && y == 0.0 {
        return Err(Error::SingularOrigin);
    }
    let theta = (winding as f64 * y.atan2(x) / 2.0).rem_euclid(PI);
    // rem_euclid can round up to exactly pi.
    Ok(if theta >= PI { 0.0 } else { theta })
}

/// One nanorod: centre position and orientation of its long axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rod {
    pub x_nm: i64,
    pub y_nm: i64,
    pub angle: f64,
}

impl Rod {
    pub fn angle_mrad(&self) -> i64 {
        (self.angle * 1000.0).round() as i64
    }
}

/// Whether `count` rods at angle `theta` stay inside a centred block.
fn rods_fit(spec: &LayoutSpec, theta: f64, count: usize) -> bool {
    let half_block = 0.5 * spec.block_size_nm;
    let (s, c) = theta.sin_cos();
    let (half_len, half_w) = (0.5 * spec.rod_length_nm(), 0.5 * spec.rod_width_nm);
    // Extent of one rod around its own centre, then shifted by the offset.
    let ext_x = half_len * c.abs() + half_w * s.abs();
    let ext_y = half_len * s.abs() + half_w * c.abs();
    rod_offsets(spec, count).all(|d| {
        let (cx, cy) = (-d * s, d * c);
        cx.abs() + ext_x <= half_block + 1e-9 && cy.abs() + ext_y <= half_block + 1e-9
    })
}

fn rod_offsets(spec: &LayoutSpec, count: usize) -> impl Iterator<Item = f64> + '_ {
    let mid = (count as f64 - 1.0) / 2.0;
    (0..count).map(move |k| (k as f64 - mid) * spec.rod_pitch_nm)
}

/// Number of rods placed in a block at orientation `theta`.
pub(crate) fn rod_count(spec: &LayoutSpec, theta: f64) -> usize {
    let mut n = (spec.block_size_nm / spec.rod_pitch_nm).floor() as usize;
    while n > 0 && !rods_fit(spec, theta, n) {
        n -= 1;
    }
    n
}

/// Places rods in every block whose centre lies inside the aperture.
///
/// All rods in a block share the orientation at the block centre and are
/// stacked at `rod_pitch_nm` perpendicular to their axis. Output is sorted by
/// `(y, x)`.
pub fn generate_layout(spec: &LayoutSpec) -> Result<Vec<Rod>> {
    spec.validate()?;
    let mut rods = Vec::new();
    for (i, j) in spec.blocks() {
        let (cx, cy) = spec.block_center(i, j);
        let theta = orientation_field(cx, cy, spec.winding)?;
        let (s, c) = theta.sin_cos();
        for d in rod_offsets(spec, rod_count(spec, theta)) {
            rods.push(Rod {
                x_nm: (cx - d * s).round() as i64,
                y_nm: (cy + d * c).round() as i64,
                angle: theta,
            });
        }
    }
    rods.sort_by(|a, b| {
        (a.y_nm, a.x_nm)
            .cmp(&(b.y_nm, b.x_nm))
            .then(a.angle.total_cmp(&b.angle))
    });
    Ok(rods)
}

pub fn write_layout_csv<W: Write>(mut w: W, rods: &[Rod]) -> Result<()> {
    writeln!(w, "{LAYOUT_CSV_HEADER}")?;
    for r in rods {
        writeln!(w, "{},{},{}", r.x_nm, r.y_nm, r.angle_mrad())?;
    }
    w.flush()?;
    Ok(())
}

use std::f64::consts::TAU;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::mask::{pixel_coord, PhaseMask};
use crate::quantum::C64;
use crate::{Error, Result};

/// Smallest Gaussian waist, in pixels, that the grid must resolve.
const MIN_WAIST_PX: f64 = 4.0;

/// Azimuthal samples taken around the analysis circle.
const OAM_SAMPLES: usize = 4096;

/// Illumination in front of the mask.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Beam {
    /// Amplitude `exp(-r^2 / w^2)`.
    Gaussian {
        waist_nm: f64,
    },
    Uniform,
}

impl Beam {
    /// Gaussian with a waist of a quarter of the aperture diameter.
    pub fn default_gaussian(aperture_diameter_nm: f64) -> Beam {
        Beam::Gaussian {
            waist_nm: aperture_diameter_nm / 4.0,
        }
    }

    fn check(&self, mask: &PhaseMask) -> Result<()> {
        if let Beam::Gaussian { waist_nm } = *self {
            if !(waist_nm > 0.0 && waist_nm < mask.aperture_radius_nm) {
                return Err(Error::InvalidParameter(format!(
                    "waist {waist_nm} nm must be positive and below the aperture radius {} nm",
                    mask.aperture_radius_nm
                )));
            }
            let px = waist_nm / mask.pixel_pitch_nm;
            if px < MIN_WAIST_PX {
                return Err(Error::GridTooSmall(format!(
                    "waist spans {px:.2} pixels, need at least {MIN_WAIST_PX}"
                )));
            }
        }
        Ok(())
    }

    fn amplitude(&self, r: f64) -> f64 {
        match *self {
            Beam::Gaussian { waist_nm } => (-(r / waist_nm).powi(2)).exp(),
            Beam::Uniform => 1.0,
        }
    }
}

/// Complex field on the mask grid (same pixel layout as [`PhaseMask`]).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGrid {
    pub grid_n: usize,
    pub pixel_pitch_nm: f64,
    pub data: Vec<C64>,
}

impl ComplexGrid {
    pub fn from_fn(grid_n: usize, pixel_pitch_nm: f64, f: impl Fn(f64, f64) -> C64) -> Self {
        let mut data = Vec::with_capacity(grid_n * grid_n);
        for iy in 0..grid_n {
            let y = pixel_coord(iy, grid_n, pixel_pitch_nm);
            for ix in 0..grid_n {
                data.push(f(pixel_coord(ix, grid_n, pixel_pitch_nm), y));
            }
        }
        ComplexGrid {
            grid_n,
            pixel_pitch_nm,
            data,
        }
    }

    pub fn power(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Bilinear interpolation at `(x, y)` in nm; `None` outside the grid.
    fn sample(&self, x: f64, y: f64) -> Option<C64> {
        let n = self.grid_n;
        let fx = x / self.pixel_pitch_nm + (n / 2) as f64 - 0.5;
        let fy = y / self.pixel_pitch_nm + (n / 2) as f64 - 0.5;
        if !(fx >= 0.0 && fy >= 0.0 && fx <= (n - 1) as f64 && fy <= (n - 1) as f64) {
            return None;
        }
        let (x0, y0) = (
            (fx.floor() as usize).min(n - 2),
            (fy.floor() as usize).min(n - 2),
        );
        let (tx, ty) = (fx - x0 as f64, fy - y0 as f64);
        let at = |ix: usize, iy: usize| self.data[iy * n + ix];
        Some(
            at(x0, y0) * ((1.0 - tx) * (1.0 - ty))
                + at(x0 + 1, y0) * (tx * (1.0 - ty))
                + at(x0, y0 + 1) * ((1.0 - tx) * ty)
                + at(x0 + 1, y0 + 1) * (tx * ty),
        )
    }
}

/// Far-field intensity, zero frequency at `(grid_n/2, grid_n/2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntensityGrid {
    pub grid_n: usize,
    pub data: Vec<f64>,
}

impl IntensityGrid {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.data[iy * self.grid_n + ix]
    }

    pub fn on_axis(&self) -> f64 {
        self.at(self.grid_n / 2, self.grid_n / 2)
    }

    pub fn peak(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }
}

/// Field just behind the mask, `beam * exp(i phase) * aperture`, scaled to
/// unit total power.
pub fn near_field(mask: &PhaseMask, beam: &Beam) -> Result<ComplexGrid> {
    beam.check(mask)?;
    let n = mask.grid_n;
    let mut data = vec![C64::new(0.0, 0.0); n * n];
    for iy in 0..n {
        let y = mask.coord(iy);
        for ix in 0..n {
            let k = mask.index(ix, iy);
            if mask.opaque[k] {
                continue;
            }
            let a = beam.amplitude(mask.coord(ix).hypot(y));
            data[k] = C64::from_polar(a, mask.values[k]);
        }
    }
    let power: f64 = data.iter().map(|z| z.norm_sqr()).sum();
    if !(power > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let scale = power.sqrt().recip();
    data.iter_mut().for_each(|z| *z *= scale);
    Ok(ComplexGrid {
        grid_n: n,
        pixel_pitch_nm: mask.pixel_pitch_nm,
        data,
    })
}

fn fft2(data: &mut [C64], n: usize) {
    let fft = FftPlanner::new().plan_fft_forward(n);
    let transpose = |d: &mut [C64]| {
        for i in 0..n {
            for j in i + 1..n {
                d.swap(i * n + j, j * n + i);
            }
        }
    };
    fft.process(data);
    transpose(data);
    fft.process(data);
    transpose(data);
}

/// Fraunhofer intensity of the masked beam.
///
/// The DFT is scaled by `1/n` so the output sums to the unit input power.
pub fn far_field(mask: &PhaseMask, beam: &Beam) -> Result<IntensityGrid> {
    let field = near_field(mask, beam)?;
    let n = field.grid_n;
    let mut data = field.data;
    fft2(&mut data, n);
    let norm = 1.0 / (n * n) as f64;
    let half = n / 2;
    let mut out = vec![0.0; n * n];
    for ky in 0..n {
        for kx in 0..n {
            let (sx, sy) = ((kx + half) % n, (ky + half) % n);
            out[sy * n + sx] = data[ky * n + kx].norm_sqr() * norm;
        }
    }
    Ok(IntensityGrid {
        grid_n: n,
        data: out,
    })
}

/// Share of the sampled power in each azimuthal order `-l_max..=l_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct OamSpectrum {
    pub l_max: usize,
    pub powers: Vec<f64>,
}

impl OamSpectrum {
    pub fn power(&self, l: i32) -> f64 {
        let i = l + self.l_max as i32;
        if i < 0 || i as usize >= self.powers.len() {
            return 0.0;
        }
        self.powers[i as usize]
    }

    pub fn orders(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        let l_max = self.l_max as i32;
        self.powers
            .iter()
            .enumerate()
            .map(move |(i, p)| (i as i32 - l_max, *p))
    }

    /// Order carrying the most power; ties go to the lower order.
    pub fn dominant(&self) -> (i32, f64) {
        self.orders().fold(
            (0, f64::NEG_INFINITY),
            |best, o| if o.1 > best.1 { o } else { best },
        )
    }

    pub fn total(&self) -> f64 {
        self.powers.iter().sum()
    }
}

/// Azimuthal decomposition of equally spaced samples around a closed loop.
pub fn oam_spectrum_of_samples(samples: &[C64], l_max: usize) -> Result<OamSpectrum> {
    let m = samples.len();
    let total: f64 = samples.iter().map(|z| z.norm_sqr()).sum::<f64>() / m.max(1) as f64;
    if m == 0 || !(total > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let l = l_max as i32;
    let powers = (-l..=l)
        .map(|order| {
            let c: C64 = samples
                .iter()
                .enumerate()
                .map(|(k, z)| z * C64::from_polar(1.0, -(order as f64) * TAU * k as f64 / m as f64))
                .sum::<C64>()
                / m as f64;
            c.norm_sqr() / total
        })
        .collect();
    Ok(OamSpectrum { l_max, powers })
}

/// Samples `field` on a centred circle and decomposes it into orders `e^{i l phi}`.
pub fn oam_spectrum(field: &ComplexGrid, radius_nm: f64, l_max: usize) -> Result<OamSpectrum> {
    if !(radius_nm > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "sampling radius must be positive, got {radius_nm}"
        )));
    }
    let samples = (0..OAM_SAMPLES)
        .map(|k| {
            let phi = TAU * k as f64 / OAM_SAMPLES as f64;
            field.sample(radius_nm * phi.cos(), radius_nm * phi.sin())
        })
        .collect::<Option<Vec<_>>>()
        .ok_or(Error::CircleOutsideGrid { radius_nm })?;
    oam_spectrum_of_samples(&samples, l_max)
}

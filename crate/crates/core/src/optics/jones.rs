//! Jones calculus in the `{H, V}` basis.
//!
//! Retarders use `diag(1, -1)` (half wave) and `diag(1, i)` (quarter wave) in
//! their fast-axis frame, rotated counter-clockwise by the axis angle.

use nalgebra::Matrix2;

use crate::quantum::{SpinKet, C64};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementKind {
    HalfWavePlate,
    QuarterWavePlate,
    Polarizer,
    Rotation,
}

/// A 2x2 Jones matrix acting on `(E_H, E_V)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizationOperator {
    kind: ElementKind,
    mat: Matrix2<C64>,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn rot(theta: f64) -> Matrix2<C64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(re(c), re(-s), re(s), re(c))
}

fn in_frame(theta: f64, diag: Matrix2<C64>) -> Matrix2<C64> {
    rot(theta) * diag * rot(-theta)
}

/// Half-wave plate with fast axis at `theta` radians from H.
pub fn hwp(theta: f64) -> PolarizationOperator {
    PolarizationOperator {
        kind: ElementKind::HalfWavePlate,
        mat: in_frame(theta, Matrix2::new(re(1.0), re(0.0), re(0.0), re(-1.0))),
    }
}

/// Quarter-wave plate with fast axis at `theta` radians from H.
pub fn qwp(theta: f64) -> PolarizationOperator {
    PolarizationOperator {
        kind: ElementKind::QuarterWavePlate,
        mat: in_frame(theta, Matrix2::new(re(1.0), re(0.0), re(0.0), C64::i())),
    }
}

/// Linear polarizer transmitting along `theta` radians from H.
pub fn linear_polarizer(theta: f64) -> PolarizationOperator {
    PolarizationOperator {
        kind: ElementKind::Polarizer,
        mat: in_frame(theta, Matrix2::new(re(1.0), re(0.0), re(0.0), re(0.0))),
    }
}

/// Rotation of the polarization plane by `theta` radians.
pub fn rotation(theta: f64) -> PolarizationOperator {
    PolarizationOperator {
        kind: ElementKind::Rotation,
        mat: rot(theta),
    }
}

impl PolarizationOperator {
    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.mat
    }

    pub fn adjoint(&self) -> Self {
        PolarizationOperator {
            kind: self.kind,
            mat: self.mat.adjoint(),
        }
    }

    /// `self` after `first` in propagation order, i.e. `self * first`.
    pub fn after(&self, first: &PolarizationOperator) -> Matrix2<C64> {
        self.mat * first.mat
    }

    /// Raw Jones-vector product.
    pub fn apply_jones(&self, jones: [C64; 2]) -> [C64; 2] {
        let v = self.mat * nalgebra::Vector2::new(jones[0], jones[1]);
        [v[0], v[1]]
    }

    /// Probability that `ket` is transmitted.
    pub fn transmission(&self, ket: &SpinKet) -> f64 {
        self.apply_jones(ket.jones())
            .iter()
            .map(|z| z.norm_sqr())
            .sum()
    }

    /// Output state for input `ket`.
    ///
    /// Unitary elements keep the phase exactly; for a polarizer the
    /// transmitted state is renormalized, and a fully blocked input is an error.
    pub fn apply(&self, ket: &SpinKet) -> Result<SpinKet> {
        let out = SpinKet::from_jones_unnormalized(self.apply_jones(ket.jones()));
        if out.iter().all(|z| z.norm_sqr() < 1e-24) {
            return Err(Error::ZeroNorm);
        }
        SpinKet::new(out[0], out[1])
    }
}

/// The polarization state transmitted with certainty by the analyzer chain
/// QWP -> HWP -> H polarizer (propagation order), angles in degrees.
///
/// This is `QWP(q)^dagger HWP(h)^dagger |H>`.
pub fn polarization_projector_from_waveplates(qwp_deg: f64, hwp_deg: f64) -> SpinKet {
    let h = [re(1.0), re(0.0)];
    let after_hwp = hwp(hwp_deg.to_radians()).adjoint().apply_jones(h);
    let ket = qwp(qwp_deg.to_radians()).adjoint().apply_jones(after_hwp);
    SpinKet::from_jones(ket[0], ket[1]).expect("unitary image of |H> is nonzero")
}

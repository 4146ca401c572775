use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::quantum::{OamKet, C64};

/// Hologram programmed on the SLM, named by the OAM state it projects onto.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlmProfile {
    /// Fork hologram selecting a single OAM index.
    Vortex(i32),
    /// `(|+1> + |-1>)/sqrt2`.
    Plus,
    /// `(|+1> + i|-1>)/sqrt2`.
    Right,
}

impl fmt::Display for SlmProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SlmProfile::Vortex(l) => write!(f, "ℓ={l}"),
            SlmProfile::Plus => write!(f, "+"),
            SlmProfile::Right => write!(f, "r"),
        }
    }
}

/// The OAM ket an SLM profile projects onto, at truncation `L = max(1, |l|)`.
pub fn slm_projection_ket(profile: SlmProfile) -> OamKet {
    let a = C64::new(FRAC_1_SQRT_2, 0.0);
    match profile {
        SlmProfile::Vortex(l) => {
            OamKet::basis((l.unsigned_abs() as usize).max(1), l).expect("|l| within truncation")
        }
        SlmProfile::Plus => OamKet::superposition(1, &[(1, a), (-1, a)]).expect("nonzero"),
        SlmProfile::Right => {
            OamKet::superposition(1, &[(1, a), (-1, C64::i() * a)]).expect("nonzero")
        }
    }
}

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use crate::quantum::{DensityMatrix, Mode, PureState, Spin, C64};
use crate::{Error, Result};

/// The `l = +-1` block the tomography works in, spin-major.
pub const BLOCK_MODES: [Mode; 4] = [
    Mode::new(Spin::Plus, -1),
    Mode::new(Spin::Plus, 1),
    Mode::new(Spin::Minus, -1),
    Mode::new(Spin::Minus, 1),
];

/// Spin-OAM Bell states:
/// `Psi(+-) = (|s+,-1> +- |s-,+1>)/sqrt2`, `Phi(+-) = (|s+,+1> +- |s-,-1>)/sqrt2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BellState {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PsiPlus,
        BellState::PsiMinus,
        BellState::PhiPlus,
        BellState::PhiMinus,
    ];

    fn terms(self) -> [(Mode, C64); 2] {
        let a = C64::new(FRAC_1_SQRT_2, 0.0);
        let (first, second, sign) = match self {
            BellState::PsiPlus => (Mode::new(Spin::Plus, -1), Mode::new(Spin::Minus, 1), 1.0),
            BellState::PsiMinus => (Mode::new(Spin::Plus, -1), Mode::new(Spin::Minus, 1), -1.0),
            BellState::PhiPlus => (Mode::new(Spin::Plus, 1), Mode::new(Spin::Minus, -1), 1.0),
            BellState::PhiMinus => (Mode::new(Spin::Plus, 1), Mode::new(Spin::Minus, -1), -1.0),
        };
        [(first, a), (second, a * sign)]
    }

    /// The Bell state at OAM truncation `l_max` (at least 1).
    pub fn ket(self, l_max: usize) -> Result<PureState> {
        PureState::superposition(l_max.max(1), &self.terms())
    }

    /// Density matrix on the `l = +-1` block.
    pub fn block_density(self) -> DensityMatrix {
        let psi = self.ket(1).expect("L = 1 is valid");
        DensityMatrix::from_pure_on(&psi, &BLOCK_MODES).expect("Bell states live in the block")
    }

    /// Whether the metasurface must be mounted flipped to produce this state.
    pub fn needs_flipped_gpm(self) -> bool {
        matches!(self, BellState::PhiPlus | BellState::PhiMinus)
    }

    pub fn name(self) -> &'static str {
        match self {
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "psi+" | "psiplus" => Ok(BellState::PsiPlus),
            "psi-" | "psiminus" => Ok(BellState::PsiMinus),
            "phi+" | "phiplus" => Ok(BellState::PhiPlus),
            "phi-" | "phiminus" => Ok(BellState::PhiMinus),
            other => Err(Error::InvalidParameter(format!(
                "unknown Bell state '{other}' (expected psi+, psi-, phi+ or phi-)"
            ))),
        }
    }
}

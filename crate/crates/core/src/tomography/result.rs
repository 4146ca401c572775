use serde::{Deserialize, Serialize};

use crate::experiment::BellState;
use crate::quantum::{fidelity, DensityMatrix, PSD_TOLERANCE};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TomographyMethod {
    Linear,
    Mle,
}

/// A reconstructed block density matrix and how it was obtained.
///
/// Serialized as `{method, converged, iterations, nll, fidelity_vs_target,
/// physical, rho}`; `iterations` and `nll` are `null` for linear inversion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TomographyResult {
    pub method: TomographyMethod,
    pub converged: bool,
    pub iterations: Option<usize>,
    /// Final value of the count cost (maximum likelihood only).
    pub nll: Option<f64>,
    pub fidelity_vs_target: Option<f64>,
    /// False when a linear estimate has an eigenvalue below `-1e-6`.
    pub physical: bool,
    pub rho: DensityMatrix,
}

impl TomographyResult {
    /// Fills in `fidelity_vs_target` for `target`.
    pub fn with_target(mut self, target: BellState) -> Result<Self> {
        self.fidelity_vs_target = Some(fidelity_report(&self, target)?);
        Ok(self)
    }

    /// The state used for fidelities: `rho`, or its clamped version if it
    /// has eigenvalues below `-1e-9`. A linear estimate can need this even
    /// when flagged physical.
    pub fn physical_rho(&self) -> Result<DensityMatrix> {
        if self.rho.is_physical(PSD_TOLERANCE) {
            Ok(self.rho.clone())
        } else {
            self.rho.clamped()
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Root fidelity of the reconstruction against the ideal Bell state.
pub fn fidelity_report(result: &TomographyResult, target: BellState) -> Result<f64> {
    let rho = result.physical_rho()?;
    fidelity(&target.block_density(), &rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::block_labels;

    fn wrap(rho: DensityMatrix) -> TomographyResult {
        TomographyResult {
            method: TomographyMethod::Mle,
            converged: true,
            iterations: Some(3),
            nll: Some(1.5),
            fidelity_vs_target: None,
            physical: true,
            rho,
        }
    }

    #[test]
    fn exact_target_scores_one() {
        let r = wrap(BellState::PsiPlus.block_density());
        assert!((fidelity_report(&r, BellState::PsiPlus).unwrap() - 1.0).abs() < 1e-9);
        assert!(fidelity_report(&r, BellState::PsiMinus).unwrap() < 1e-9);
    }

    #[test]
    fn maximally_mixed_scores_one_half() {
        // sqrt(<psi| I/4 |psi>) = 1/2 for any pure target.
        let r = wrap(DensityMatrix::maximally_mixed(block_labels()));
        for b in BellState::ALL {
            assert!((fidelity_report(&r, b).unwrap() - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn json_fields() {
        let r = wrap(BellState::PhiMinus.block_density())
            .with_target(BellState::PhiMinus)
            .unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(v["method"], "mle");
        assert_eq!(v["converged"], true);
        assert_eq!(v["iterations"], 3);
        assert_eq!(v["rho"]["dim"], 4);
        assert!(v["fidelity_vs_target"].as_f64().unwrap() > 0.999_999);
        assert_eq!(
            TomographyResult::from_json(&r.to_json().unwrap()).unwrap(),
            r
        );
    }
}

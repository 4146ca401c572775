use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use super::{block_labels, standard_measurement_set, BellState, CountRecord, MeasurementSetting};
use crate::optics::{gpm_channel, GpmSpec, MEASURED_EFFICIENCY};
use crate::quantum::{
    DensityMatrix, OamKet, PureState, SpinKet, DEFAULT_OAM_TRUNCATION, MAX_OAM_TRUNCATION,
};
use crate::{Error, Result};

/// Coincidences per 10 s window without any projection.
pub const NOMINAL_COINCIDENCES: f64 = 1000.0;

/// Polarization of the heralded signal photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourcePolarization {
    H,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseModel {
    /// Counts are the rounded expectation.
    None,
    /// Independent Poisson draws per setting.
    Poisson,
}

impl std::str::FromStr for NoiseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(NoiseModel::None),
            "poisson" => Ok(NoiseModel::Poisson),
            other => Err(Error::InvalidParameter(format!(
                "unknown noise model '{other}' (expected none or poisson)"
            ))),
        }
    }
}

impl std::fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NoiseModel::None => "none",
            NoiseModel::Poisson => "poisson",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub target: BellState,
    /// Expected coincidences per window with no projection.
    pub n_total: f64,
    /// Metasurface conversion efficiency.
    pub efficiency: f64,
    pub noise: NoiseModel,
    pub seed: u64,
    /// Keep only the converted `l = +-1` light before measuring.
    pub post_select: bool,
    pub duration_s: f64,
    pub l_max: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            target: BellState::PsiPlus,
            n_total: NOMINAL_COINCIDENCES,
            efficiency: MEASURED_EFFICIENCY,
            noise: NoiseModel::Poisson,
            seed: 0,
            post_select: true,
            duration_s: 10.0,
            l_max: DEFAULT_OAM_TRUNCATION,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.n_total > 0.0 && self.n_total.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "n_total must be positive, got {}",
                self.n_total
            )));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::InvalidParameter(format!(
                "efficiency must lie in [0, 1], got {}",
                self.efficiency
            )));
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "duration must be positive, got {}",
                self.duration_s
            )));
        }
        if self.l_max < 1 || self.l_max > MAX_OAM_TRUNCATION {
            return Err(Error::InvalidParameter(format!(
                "OAM truncation must lie in [1, {MAX_OAM_TRUNCATION}], got {}",
                self.l_max
            )));
        }
        Ok(())
    }
}

/// `|pol> (x) |l = 0>` at truncation `l_max`.
pub fn prepare_source_state(pol: SourcePolarization, l_max: usize) -> Result<PureState> {
    let spin = match pol {
        SourcePolarization::H => SpinKet::horizontal(),
        SourcePolarization::V => SpinKet::vertical(),
    };
    Ok(PureState::tensor(&spin, &OamKet::basis(l_max, 0)?))
}

/// Detection probability `<pol, oam| rho |pol, oam>` for a projective setting.
pub fn expected_probability(rho: &DensityMatrix, setting: &MeasurementSetting) -> Result<f64> {
    let ket = setting.projector_ket(rho.labels())?;
    Ok(rho.expectation(&ket).re.clamp(0.0, 1.0))
}

fn draw(mean: f64, noise: NoiseModel, rng: &mut ChaCha8Rng) -> u64 {
    match noise {
        NoiseModel::None => mean.round().max(0.0) as u64,
        NoiseModel::Poisson if mean > 0.0 => Poisson::new(mean)
            .expect("positive finite mean")
            .sample(rng) as u64,
        NoiseModel::Poisson => 0,
    }
}

/// Coincidence counts for all 17 settings, drawn in setting order from a
/// generator seeded with `config.seed`.
pub fn simulate_counts(rho: &DensityMatrix, config: &ExperimentConfig) -> Result<Vec<CountRecord>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    standard_measurement_set()
        .iter()
        .map(|setting| {
            let mean = if setting.is_intensity() {
                config.n_total
            } else {
                config.n_total * expected_probability(rho, setting)?
            };
            Ok(CountRecord {
                setting_id: setting.id,
                label: setting.label.clone(),
                counts: draw(mean, config.noise, &mut rng),
                duration_s: config.duration_s,
            })
        })
        .collect()
}

/// Output of [`run_bell_pipeline`].
#[derive(Clone, Debug)]
pub struct BellRun {
    /// The target Bell state.
    pub ideal: PureState,
    /// State that reached the analyzer (the `l = +-1` block when
    /// post-selecting, the full space otherwise).
    pub measured: DensityMatrix,
    /// Population converted into the `l = +-1` block by the metasurface.
    pub converted_fraction: f64,
    pub counts: Vec<CountRecord>,
}

/// Source -> metasurface -> (post-selection) -> simulated tomography counts.
///
/// H input yields the `+` states and V input the `-` states; the `Phi`
/// states use the flipped metasurface.
pub fn run_bell_pipeline(config: &ExperimentConfig) -> Result<BellRun> {
    config.validate()?;
    let target = config.target;
    let pol = match target {
        BellState::PsiPlus | BellState::PhiPlus => SourcePolarization::H,
        BellState::PsiMinus | BellState::PhiMinus => SourcePolarization::V,
    };
    let spec = GpmSpec::new(1, target.needs_flipped_gpm(), config.efficiency)?;
    let source = prepare_source_state(pol, config.l_max)?;
    let out = gpm_channel(&spec, &DensityMatrix::from_pure(&source))?;
    let block = block_labels();
    let converted_fraction = out.weight_on(&block);
    let measured = if config.post_select {
        out.post_select(&block)?.0
    } else {
        out
    };
    let counts = simulate_counts(&measured, config)?;
    Ok(BellRun {
        ideal: target.ket(config.l_max)?,
        measured,
        converted_fraction,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::BLOCK_MODES;
    use crate::quantum::{angular_momentum_expectations, fidelity, BasisLabel, C64};

    fn setting(id: usize) -> MeasurementSetting {
        standard_measurement_set()[id].clone()
    }

    #[test]
    fn source_states_carry_no_angular_momentum() {
        for pol in [SourcePolarization::H, SourcePolarization::V] {
            let psi = prepare_source_state(pol, 1).unwrap();
            let (s, l) = angular_momentum_expectations(&psi);
            assert!(s.abs() < 1e-12 && l.abs() < 1e-12);
        }
    }

    #[test]
    fn psi_plus_probabilities() {
        // Psi+ amplitudes 1/sqrt2 at (s+,-1) and (s-,+1). For H (x) l=1 only
        // (s-,+1) contributes: <H|s-> = 1/sqrt2, so amplitude 1/2, p = 1/4.
        let rho = BellState::PsiPlus.block_density();
        assert!((expected_probability(&rho, &setting(1)).unwrap() - 0.25).abs() < 1e-12);
        // sigma+ (x) l=1 probes (s+,+1), which is empty.
        assert!(expected_probability(&rho, &setting(3)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_gives_quarter_everywhere() {
        let rho = DensityMatrix::maximally_mixed(block_labels());
        for s in standard_measurement_set().iter().skip(1) {
            assert!((expected_probability(&rho, s).unwrap() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn intensity_setting_is_rejected() {
        let rho = BellState::PsiPlus.block_density();
        assert!(expected_probability(&rho, &setting(0)).is_err());
    }

    #[test]
    fn hv_sum_over_opposite_oam_is_one() {
        for b in BellState::ALL {
            let rho = b.block_density();
            let p: f64 = [1, 2, 7, 8]
                .iter()
                .map(|&i| expected_probability(&rho, &setting(i)).unwrap())
                .sum();
            assert!((p - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn noiseless_counts() {
        let cfg = ExperimentConfig {
            noise: NoiseModel::None,
            ..Default::default()
        };
        let counts = simulate_counts(&BellState::PsiPlus.block_density(), &cfg).unwrap();
        assert_eq!(counts.len(), 17);
        assert_eq!(counts[0].counts, 1000);
        assert_eq!(counts[1].counts, 250);
        assert_eq!(counts[3].counts, 0);
    }

    #[test]
    fn seeded_runs_repeat() {
        let cfg = ExperimentConfig {
            seed: 42,
            ..Default::default()
        };
        let rho = BellState::PhiMinus.block_density();
        assert_eq!(
            simulate_counts(&rho, &cfg).unwrap(),
            simulate_counts(&rho, &cfg).unwrap()
        );
        let other = ExperimentConfig { seed: 43, ..cfg };
        assert_ne!(
            simulate_counts(&rho, &cfg).unwrap(),
            simulate_counts(&rho, &other).unwrap()
        );
    }

    #[test]
    fn pipeline_targets() {
        for target in BellState::ALL {
            let run = run_bell_pipeline(&ExperimentConfig {
                target,
                efficiency: 1.0,
                noise: NoiseModel::None,
                ..Default::default()
            })
            .unwrap();
            let ideal = DensityMatrix::from_pure_on(&run.ideal, &BLOCK_MODES).unwrap();
            assert!((fidelity(&ideal, &run.measured).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn partial_conversion_splits_population() {
        let run = run_bell_pipeline(&ExperimentConfig {
            post_select: false,
            noise: NoiseModel::None,
            ..Default::default()
        })
        .unwrap();
        assert!((run.converted_fraction - 0.72).abs() < 1e-12);
        let zero: Vec<BasisLabel> = crate::quantum::Spin::BOTH
            .iter()
            .map(|&s| BasisLabel::Mode(crate::quantum::Mode::new(s, 0)))
            .collect();
        assert!((run.measured.weight_on(&zero) - 0.28).abs() < 1e-12);
        let (block, _) = run.measured.post_select(&block_labels()).unwrap();
        let ideal = BellState::PsiPlus.block_density();
        assert!(fidelity(&ideal, &block).unwrap() >= 1.0 - 1e-10);
        // Off-block coherences between converted and unconverted light vanish.
        assert!(
            run.measured.max_imaginary() < 1e-15 || run.measured.entry(0, 1) == C64::new(0.0, 0.0)
        );
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            ExperimentConfig {
                n_total: 0.0,
                ..Default::default()
            },
            ExperimentConfig {
                efficiency: 1.5,
                ..Default::default()
            },
            ExperimentConfig {
                duration_s: -1.0,
                ..Default::default()
            },
            ExperimentConfig {
                l_max: 9,
                ..Default::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err());
        }
    }
}

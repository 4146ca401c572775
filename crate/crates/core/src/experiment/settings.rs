use std::fmt;

use crate::optics::{polarization_projector_from_waveplates, slm_projection_ket, SlmProfile};
use crate::quantum::{BasisLabel, OamKet, SpinKet, C64};
use crate::{Error, Result};

/// Polarization states selected by the analyzer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolarizationLabel {
    H,
    V,
    SigmaPlus,
    D,
}

impl PolarizationLabel {
    pub fn ideal_ket(self) -> SpinKet {
        match self {
            PolarizationLabel::H => SpinKet::horizontal(),
            PolarizationLabel::V => SpinKet::vertical(),
            PolarizationLabel::SigmaPlus => SpinKet::sigma_plus(),
            PolarizationLabel::D => SpinKet::diagonal(),
        }
    }

    /// `(QWP, HWP)` fast-axis angles in degrees.
    pub fn waveplates_deg(self) -> (f64, f64) {
        match self {
            PolarizationLabel::H => (0.0, 0.0),
            PolarizationLabel::V => (0.0, 45.0),
            PolarizationLabel::SigmaPlus => (0.0, 22.5),
            PolarizationLabel::D => (45.0, 22.5),
        }
    }
}

impl fmt::Display for PolarizationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolarizationLabel::H => "H",
            PolarizationLabel::V => "V",
            PolarizationLabel::SigmaPlus => "σ+",
            PolarizationLabel::D => "D",
        })
    }
}

/// One row of the tomography protocol.
///
/// Setting 0 is the unprojected intensity and carries no projector.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSetting {
    pub id: u8,
    pub label: String,
    pub polarization: Option<PolarizationLabel>,
    pub slm: Option<SlmProfile>,
    /// State passed by the waveplate chain at the listed angles.
    pub pol_ket: Option<SpinKet>,
    pub oam_ket: Option<OamKet>,
    pub qwp_deg: Option<f64>,
    pub hwp_deg: Option<f64>,
}

impl MeasurementSetting {
    fn intensity() -> Self {
        MeasurementSetting {
            id: 0,
            label: "Intensity".to_string(),
            polarization: None,
            slm: None,
            pol_ket: None,
            oam_ket: None,
            qwp_deg: None,
            hwp_deg: None,
        }
    }

    fn projective(id: u8, pol: PolarizationLabel, slm: SlmProfile) -> Self {
        let (q, h) = pol.waveplates_deg();
        MeasurementSetting {
            id,
            label: format!("{pol} ⊗ {slm}"),
            polarization: Some(pol),
            slm: Some(slm),
            pol_ket: Some(polarization_projector_from_waveplates(q, h)),
            oam_ket: Some(slm_projection_ket(slm)),
            qwp_deg: Some(q),
            hwp_deg: Some(h),
        }
    }

    pub fn is_intensity(&self) -> bool {
        self.pol_ket.is_none()
    }

    /// The projector ket `|pol> (x) |oam>` expressed in the basis `labels`.
    pub fn projector_ket(&self, labels: &[BasisLabel]) -> Result<Vec<C64>> {
        let (Some(pol), Some(oam)) = (&self.pol_ket, &self.oam_ket) else {
            return Err(Error::NoProjector(self.id));
        };
        labels
            .iter()
            .map(|l| {
                let mode = l.mode().ok_or(Error::NotProductBasis)?;
                Ok(pol.amplitude(mode.spin) * oam.amplitude(mode.oam))
            })
            .collect()
    }
}

/// The 17 settings: intensity, then four polarizations for each of the SLM
/// profiles `l=1`, `l=-1`, `+`, `r`.
pub fn standard_measurement_set() -> Vec<MeasurementSetting> {
    use PolarizationLabel::*;
    let forward = [H, V, SigmaPlus, D];
    let backward = [D, SigmaPlus, V, H];
    let groups = [
        (SlmProfile::Vortex(1), forward),
        (SlmProfile::Vortex(-1), backward),
        (SlmProfile::Plus, forward),
        (SlmProfile::Right, backward),
    ];
    let mut out = vec![MeasurementSetting::intensity()];
    for (slm, pols) in groups {
        for pol in pols {
            let id = out.len() as u8;
            out.push(MeasurementSetting::projective(id, pol, slm));
        }
    }
    out
}

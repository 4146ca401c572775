use nalgebra::Vector4;

use crate::experiment::{block_labels, standard_measurement_set, CountRecord};
use crate::quantum::C64;
use crate::{Error, Result};

/// Validated counts paired with the projector kets of the 16 settings, all
/// expressed on the `l = +-1` block.
#[derive(Clone, Debug)]
pub struct CountsTable {
    /// Unprojected reference counts (setting 0).
    pub n_ref: f64,
    /// Counts of settings 1..=16.
    pub counts: [f64; 16],
    /// Projector kets of settings 1..=16.
    pub kets: [Vector4<C64>; 16],
}

impl CountsTable {
    /// Requires every setting 0..=16 exactly once, in any order.
    pub fn from_records(records: &[CountRecord]) -> Result<Self> {
        let mut slots: [Option<u64>; 17] = [None; 17];
        for r in records {
            let slot = slots.get_mut(r.setting_id as usize).ok_or_else(|| {
                Error::InvalidParameter(format!("unknown setting {}", r.setting_id))
            })?;
            if slot.is_some() {
                return Err(Error::DuplicateSetting(r.setting_id));
            }
            *slot = Some(r.counts);
        }
        for (id, s) in slots.iter().enumerate() {
            if s.is_none() {
                return Err(Error::MissingSetting(id as u8));
            }
        }
        let n_ref = slots[0].unwrap() as f64;
        if n_ref <= 0.0 {
            return Err(Error::EmptyReference);
        }
        let labels = block_labels();
        let settings = standard_measurement_set();
        let mut kets = [Vector4::zeros(); 16];
        let mut counts = [0.0; 16];
        for k in 0..16 {
            let v = settings[k + 1].projector_ket(&labels)?;
            kets[k] = Vector4::new(v[0], v[1], v[2], v[3]);
            counts[k] = slots[k + 1].unwrap() as f64;
        }
        Ok(CountsTable {
            n_ref,
            counts,
            kets,
        })
    }

    /// Observed frequencies `n_k / n_ref`.
    pub fn frequencies(&self) -> [f64; 16] {
        self.counts.map(|n| n / self.n_ref)
    }
}

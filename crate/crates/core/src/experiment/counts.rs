//! Counts CSV: `setting_id,label,counts,duration_s`, one row per setting,
//! setting 0 first. The same file carries simulated and measured data.

use std::io::{Read, Write};

use serde::Serialize;

use crate::{Error, Result};

pub const COUNTS_CSV_HEADER: [&str; 4] = ["setting_id", "label", "counts", "duration_s"];

const SETTINGS: u8 = 17;

/// Coincidences recorded for one setting over one integration window.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountRecord {
    pub setting_id: u8,
    pub label: String,
    pub counts: u64,
    pub duration_s: f64,
}

pub fn write_counts_csv<W: Write>(w: W, records: &[CountRecord]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(r).map_err(|e| Error::Parse {
            location: format!("setting {}", r.setting_id),
            message: e.to_string(),
        })?;
    }
    out.flush()?;
    Ok(())
}

fn parse_err(row: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        location: format!("row {row}"),
        message: message.into(),
    }
}

/// Reads and validates a counts file; all 17 settings must appear exactly once.
///
/// Records come back ordered by setting id. Row numbers in errors count the
/// header as row 1.
pub fn read_counts_csv<R: Read>(r: R) -> Result<Vec<CountRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(r);
    let header = reader.headers().map_err(|e| parse_err(1, e.to_string()))?;
    if header.iter().ne(COUNTS_CSV_HEADER) {
        return Err(parse_err(
            1,
            format!("expected header '{}'", COUNTS_CSV_HEADER.join(",")),
        ));
    }

    let mut slots: Vec<Option<CountRecord>> = vec![None; SETTINGS as usize];
    for (k, rec) in reader.records().enumerate() {
        let row = k + 2;
        let rec = rec.map_err(|e| parse_err(row, e.to_string()))?;
        if rec.len() != 4 {
            return Err(parse_err(
                row,
                format!("expected 4 fields, found {}", rec.len()),
            ));
        }
        let setting_id: u8 = rec[0]
            .parse()
            .ok()
            .filter(|&id| id < SETTINGS)
            .ok_or_else(|| parse_err(row, format!("invalid setting_id '{}'", &rec[0])))?;
        let counts: u64 = rec[2].parse().map_err(|_| {
            parse_err(
                row,
                format!("counts '{}' is not a non-negative integer", &rec[2]),
            )
        })?;
        let duration_s: f64 = rec[3]
            .parse()
            .ok()
            .filter(|d: &f64| *d > 0.0 && d.is_finite())
            .ok_or_else(|| parse_err(row, format!("duration_s '{}' must be positive", &rec[3])))?;
        let slot = &mut slots[setting_id as usize];
        if slot.is_some() {
            return Err(Error::DuplicateSetting(setting_id));
        }
        *slot = Some(CountRecord {
            setting_id,
            label: rec[1].to_string(),
            counts,
            duration_s,
        });
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(id, r)| r.ok_or(Error::MissingSetting(id as u8)))
        .collect()
}

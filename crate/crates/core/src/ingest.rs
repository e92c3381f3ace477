//! CSV import of pin data onto an existing reactor layout.
//!
//! Expected header: `row_label,col_label,z_cm,time_s,feature,value,uncertainty,units`.
//! Each line becomes one [`DataEntry`] on the pin named by the two labels.

use std::io::Read;

use thiserror::Error;

use crate::model::{AssemblyType, DataEntry, ModelError, Reactor};

pub const CSV_HEADER: [&str; 8] = [
    "row_label",
    "col_label",
    "z_cm",
    "time_s",
    "feature",
    "value",
    "uncertainty",
    "units",
];

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {reason}")]
    Parse { line: u64, reason: String },
    #[error("{0}")]
    Model(#[from] ModelError),
}

/// Index of the assembly def that receives imported data: the first fuel
/// def, otherwise the first def.
pub fn target_def(reactor: &Reactor) -> Option<usize> {
    let defs = reactor.assembly_defs();
    defs.iter()
        .position(|d| d.assembly_type() == AssemblyType::Fuel)
        .or(if defs.is_empty() { None } else { Some(0) })
}

/// Returns a copy of `skeleton` with every CSV line added as pin data on
/// the [`target_def`] assembly.
pub fn ingest_csv<R: Read>(skeleton: &Reactor, source: R) -> Result<Reactor, IngestError> {
    let def_index = target_def(skeleton)
        .ok_or_else(|| ModelError::NotFound(format!("reactor {:?} has no assembly definitions", skeleton.name())))?;
    let view = skeleton.assembly_view(def_index).expect("index from target_def");
    let (reactor_type, pitch) = (skeleton.reactor_type(), view.def().rod_pitch());
    let labels = view.def().labels().clone();

    let mut builder = skeleton.to_builder();
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(source);
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(IngestError::Parse {
            line: 1,
            reason: format!("header must be {:?}", CSV_HEADER.join(",")),
        });
    }
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let err = |reason: String| IngestError::Parse { line, reason };
        let num = |i: usize| -> Result<f64, IngestError> {
            record[i]
                .parse::<f64>()
                .map_err(|_| err(format!("{} {:?} is not a number", CSV_HEADER[i], &record[i])))
        };
        let row = labels
            .rows()
            .iter()
            .position(|l| l == &record[0])
            .ok_or_else(|| err(format!("unknown row label {:?}", &record[0])))?;
        let col = labels
            .cols()
            .iter()
            .position(|l| l == &record[1])
            .ok_or_else(|| err(format!("unknown column label {:?}", &record[1])))?;
        let (z, time, value, uncertainty) = (num(2)?, num(3)?, num(5)?, num(6)?);
        let units = builder.add_unit(&record[7]).map_err(|e| err(e.to_string()))?;
        let (x, y) = crate::model::pin_center(reactor_type, pitch, row, col);
        let entry = DataEntry::new(value, uncertainty, units, [x, y, z], time);
        builder
            .assembly_def_mut(def_index as u32)
            .expect("index from target_def")
            .add_pin_data(row, col, &record[4], entry)
            .map_err(|e| err(e.to_string()))?;
    }
    Ok(builder.freeze()?)
}

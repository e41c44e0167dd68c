use std::io::{self, Write};

use crate::config::Experiment;
use crate::experiments::{PointOutput, Record};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// CSV: one header, then every point's rows in sweep order. JSON: an array of records.
pub fn write(_experiment: Experiment, outs: &[PointOutput], format: Format, sink: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
            if let Some(first) = outs.first() {
                w.write_record(&first.columns)?;
            }
            for o in outs {
                for r in &o.rows {
                    w.write_record(r)?;
                }
            }
            w.flush()
        }
        Format::Json => {
            let records: Vec<&Record> = outs.iter().map(|o| &o.record).collect();
            serde_json::to_writer_pretty(&mut *sink, &records)?;
            sink.write_all(b"\n")
        }
    }
}

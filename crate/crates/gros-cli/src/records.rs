//! Result rows and the deterministic CSV writer.

use std::io::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub experiment: &'static str,
    pub replicate: usize,
    pub method: String,
    pub metric: String,
    pub value: f64,
}

impl Record {
    pub fn new(
        experiment: &'static str,
        replicate: usize,
        method: impl Into<String>,
        metric: impl Into<String>,
        value: f64,
    ) -> Self {
        Self {
            experiment,
            replicate,
            method: method.into(),
            metric: metric.into(),
            value,
        }
    }
}

/// Stable sort by (replicate, method); rows of one method keep the order
/// their experiment emitted them in, so output bytes are schedule
/// independent.
pub fn normalize(records: &mut [Record]) {
    records.sort_by(|a, b| {
        a.replicate
            .cmp(&b.replicate)
            .then_with(|| a.method.cmp(&b.method))
    });
}

/// Shortest round-trip float formatting, LF line endings.
pub fn write_csv<W: Write>(records: &[Record], mut out: W) -> std::io::Result<()> {
    out.write_all(b"experiment,replicate,method,metric,value\n")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.experiment, r.replicate, r.method, r.metric, r.value
        )?;
    }
    Ok(())
}

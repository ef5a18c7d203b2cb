//! Attachment records and the per-step sample log consumed by the estimators.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// In-degree of one selected target together with the network's edge and
/// node counts just before the step that selected it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttachmentRecord {
    pub k: u64,
    pub e_prev: u64,
    pub n_prev: u64,
}

impl AttachmentRecord {
    pub fn new(k: u64, e_prev: u64, n_prev: u64) -> Self {
        Self { k, e_prev, n_prev }
    }

    /// `k * n_prev == e_prev`: both attachment components give the same
    /// probability, so the record's likelihood factor does not depend on alpha.
    pub fn is_degenerate(&self) -> bool {
        self.k as u128 * self.n_prev as u128 == self.e_prev as u128
    }

    /// Preferential component `k / e_prev`.
    #[inline]
    pub fn preferential(&self) -> f64 {
        self.k as f64 / self.e_prev as f64
    }

    /// Uniform component `1 / n_prev`.
    #[inline]
    pub fn uniform(&self) -> f64 {
        1.0 / self.n_prev as f64
    }

    /// Slope of the likelihood factor in alpha, `(k n - e) / (e n)`, computed
    /// from the exact integer numerator.
    #[inline]
    pub fn slope(&self) -> f64 {
        let num = self.k as i128 * self.n_prev as i128 - self.e_prev as i128;
        num as f64 / (self.e_prev as f64 * self.n_prev as f64)
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.e_prev == 0 {
            return Err("e_prev must be positive".into());
        }
        if self.n_prev == 0 {
            return Err("n_prev must be positive".into());
        }
        if self.k > self.e_prev {
            return Err(format!("k={} exceeds e_prev={}", self.k, self.e_prev));
        }
        Ok(())
    }
}

/// The collection of per-step attachment multisets `A_1, ..., A_t`.
///
/// Records are stored flat; `offsets[i]..offsets[i + 1]` is step `i + 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SampleLog {
    records: Vec<AttachmentRecord>,
    offsets: Vec<usize>,
}

impl SampleLog {
    pub fn new() -> Self {
        Self {
            records: Vec::new(),
            offsets: vec![0],
        }
    }

    pub fn with_capacity(steps: usize, records: usize) -> Self {
        let mut offsets = Vec::with_capacity(steps + 1);
        offsets.push(0);
        Self {
            records: Vec::with_capacity(records),
            offsets,
        }
    }

    pub fn push_step(&mut self, step: &[AttachmentRecord]) {
        if self.offsets.is_empty() {
            self.offsets.push(0);
        }
        self.records.extend_from_slice(step);
        self.offsets.push(self.records.len());
    }

    pub fn num_steps(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn num_records(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[AttachmentRecord] {
        &self.records
    }

    /// Records of step `t` (1-based).
    pub fn step(&self, t: usize) -> &[AttachmentRecord] {
        assert!(t >= 1 && t <= self.num_steps(), "step {t} out of range");
        &self.records[self.offsets[t - 1]..self.offsets[t]]
    }

    pub fn steps(&self) -> impl ExactSizeIterator<Item = &[AttachmentRecord]> + '_ {
        self.offsets.windows(2).map(move |w| &self.records[w[0]..w[1]])
    }

    /// All records of steps `1..=t`, i.e. the cumulative sample `B_t`.
    pub fn prefix(&self, t: usize) -> &[AttachmentRecord] {
        assert!(t <= self.num_steps(), "prefix {t} out of range");
        &self.records[..self.offsets[t]]
    }

    /// Writes the `step,k,e_prev,n_prev` CSV form.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "step,k,e_prev,n_prev")?;
        for (i, step) in self.steps().enumerate() {
            for r in step {
                writeln!(out, "{},{},{},{}", i + 1, r.k, r.e_prev, r.n_prev)?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the CSV form. Step numbers must be non-decreasing and start at 1;
    /// skipped step numbers become empty steps.
    pub fn read_csv<R: BufRead>(input: R, source_name: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(input);
        {
            let headers = reader.headers().map_err(|e| csv_error(e, source_name))?;
            let expected = ["step", "k", "e_prev", "n_prev"];
            if headers.len() != 4 || headers.iter().zip(expected).any(|(h, e)| h != e) {
                return Err(Error::parse(source_name, 1, "expected header `step,k,e_prev,n_prev`"));
            }
        }
        let mut log = SampleLog::new();
        let mut current: Vec<AttachmentRecord> = Vec::new();
        let mut current_step = 0usize;
        for (i, row) in reader.records().enumerate() {
            let line = i + 2;
            let row = row.map_err(|e| csv_error(e, source_name))?;
            let field = |j: usize| -> Result<u64> {
                row.get(j)
                    .ok_or_else(|| Error::parse(source_name, line, "expected 4 fields"))?
                    .parse::<u64>()
                    .map_err(|e| Error::parse(source_name, line, format!("field {}: {e}", j + 1)))
            };
            let step = field(0)? as usize;
            let rec = AttachmentRecord::new(field(1)?, field(2)?, field(3)?);
            rec.check().map_err(|m| Error::parse(source_name, line, m))?;
            if step == 0 || step < current_step {
                return Err(Error::parse(
                    source_name,
                    line,
                    format!("step {step} out of order (previous {current_step})"),
                ));
            }
            if step != current_step {
                if current_step > 0 {
                    log.push_step(&current);
                    current.clear();
                }
                while log.num_steps() + 1 < step {
                    log.push_step(&[]);
                }
                current_step = step;
            }
            current.push(rec);
        }
        if current_step > 0 {
            log.push_step(&current);
        }
        Ok(log)
    }
}

fn csv_error(e: csv::Error, source_name: &str) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse(source_name, line, format!("{other:?}")),
    }
}

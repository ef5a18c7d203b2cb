#![allow(dead_code)]

pub mod gamma_forms;
pub mod poly;

use pamix::netmodel::AttachmentRecord;
use rand::Rng;

/// Small random log with deliberate repeats and degenerate records.
pub fn random_records<R: Rng>(rng: &mut R, max_len: usize) -> Vec<AttachmentRecord> {
    let len = rng.random_range(1..=max_len);
    let mut out: Vec<AttachmentRecord> = Vec::with_capacity(len);
    while out.len() < len {
        let roll = rng.random_range(0..10);
        if roll < 2 && !out.is_empty() {
            let i = rng.random_range(0..out.len());
            out.push(out[i]);
        } else if roll < 3 {
            let n = rng.random_range(2..20u64);
            let k = rng.random_range(1..10u64);
            out.push(AttachmentRecord::new(k, k * n, n));
        } else {
            let n = rng.random_range(2..40u64);
            let e = rng.random_range(1..120u64);
            let k = rng.random_range(0..=e.min(30));
            out.push(AttachmentRecord::new(k, e, n));
        }
    }
    out
}

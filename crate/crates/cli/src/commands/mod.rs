pub mod cite;
pub mod dist;
pub mod estimate;
pub mod simulate;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::Failure;

pub(crate) fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

pub(crate) fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Failure> {
    let mut out = create(dir, name)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(Failure::from_json)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

pub(crate) fn write_trace(dir: &Path, name: &str, trace: &[(usize, f64)]) -> Result<(), Failure> {
    let mut out = create(dir, name)?;
    writeln!(out, "t,alpha_hat")?;
    for (t, a) in trace {
        writeln!(out, "{t},{a}")?;
    }
    out.flush()?;
    Ok(())
}

pub(crate) fn resolve_rng_seed(slot: &mut Option<u64>) -> u64 {
    let seed = *slot.get_or_insert_with(rand::random);
    println!("rng seed: {seed}");
    seed
}

/// Inputs named by a seed spec: the file, unless it is a builtin.
pub(crate) fn seed_inputs(spec: &str) -> Vec<std::path::PathBuf> {
    if spec.starts_with("complete:") {
        Vec::new()
    } else {
        vec![spec.into()]
    }
}

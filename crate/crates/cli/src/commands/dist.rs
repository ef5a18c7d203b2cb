use std::io::Write;

use pamix::degree_dist::{
    default_support_cap, ensemble_mean_ccdf, sup_distance, total_variation, EmpiricalDistribution,
    ExpectedDegreeEvolution, SeedStats, StationaryDistribution,
};
use pamix::netmodel::{GrowthOptions, ModelParams, SeedSpec};
use serde::Serialize;

use super::{create, resolve_rng_seed, seed_inputs, write_json};
use crate::cli::DistArgs;
use crate::{Failure, Outcome};

/// The theoretical table and comparisons stop searching for a percentile here.
const QUANTILE_LIMIT: u64 = 100_000_000;

#[derive(Debug, Default, Serialize)]
struct DistSummary {
    k_max: u64,
    k99: u64,
    sup_distance: Option<f64>,
    finite_t_total_variation: Option<f64>,
}

fn write_empirical(dir: &std::path::Path, ccdf: &[f64]) -> Result<(), Failure> {
    let mut out = create(dir, "empirical.csv")?;
    writeln!(out, "k,ccdf_empirical")?;
    for (k, c) in ccdf.iter().enumerate() {
        writeln!(out, "{k},{c}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn run(args: &mut DistArgs) -> Result<Outcome, Failure> {
    if args.ensemble.is_some() && args.graph.is_some() {
        return Err(Failure::Invalid("--ensemble and --graph are alternatives".into()));
    }
    let params = ModelParams::new(args.model.m, args.model.m_hat, args.model.alpha)?;
    let theory = StationaryDistribution::new(params)?;
    let k_max = match args.k_max {
        Some(k) => k,
        None => theory.quantile(0.999, QUANTILE_LIMIT)?,
    };
    let pmf = theory.pmf_table(k_max)?;
    let ccdf = theory.ccdf_table(k_max)?;
    let dir = args.out.out_dir.clone();
    let mut outputs = vec!["theory.csv".to_string()];
    let mut inputs = Vec::new();
    let mut out = create(&dir, "theory.csv")?;
    writeln!(out, "k,pmf,ccdf")?;
    for (i, (p, c)) in pmf.iter().zip(&ccdf).enumerate() {
        writeln!(out, "{},{p},{c}", theory.support_start() + i as u64)?;
    }
    out.flush()?;

    let mut summary = DistSummary {
        k_max,
        k99: theory.quantile(0.99, QUANTILE_LIMIT)?,
        ..Default::default()
    };
    let mut rng_seed = None;

    let empirical = if let Some(runs) = args.ensemble {
        let seed = SeedSpec::from_spec_str(&args.seed)?;
        inputs.extend(seed_inputs(&args.seed));
        let s = resolve_rng_seed(&mut args.rng_seed);
        rng_seed = Some(s);
        Some(ensemble_mean_ccdf(&seed, &params, args.steps, runs, s, GrowthOptions::default())?)
    } else if let Some(path) = &args.graph {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let graph = SeedSpec::read_edge_list(file, &path.display().to_string())?;
        inputs.push(path.clone());
        Some(EmpiricalDistribution::from_in_degrees(&graph.in_degrees()).ccdf())
    } else {
        None
    };
    if let Some(emp) = empirical {
        write_empirical(&dir, &emp)?;
        outputs.push("empirical.csv".into());
        let d = sup_distance(&emp, &theory, theory.support_start(), summary.k99)?;
        println!("sup distance to theory over [{}, {}]: {d:.5}", theory.support_start(), summary.k99);
        summary.sup_distance = Some(d);
    }

    if args.finite_t {
        let seed = SeedSpec::from_spec_str(&args.seed)?;
        if inputs.is_empty() {
            inputs.extend(seed_inputs(&args.seed));
        }
        let stats = SeedStats::from_seed(&seed);
        let cap = default_support_cap(&params, &stats, args.steps as u64);
        let mut evo = ExpectedDegreeEvolution::new(params, stats, cap)?;
        evo.advance(args.steps as u64)?;
        let mut out = create(&dir, "finite_t.csv")?;
        writeln!(out, "k,pmf")?;
        for (k, p) in evo.pmf().iter().enumerate() {
            writeln!(out, "{k},{p}")?;
        }
        out.flush()?;
        outputs.push("finite_t.csv".into());
        let tv = total_variation(evo.pmf(), &theory)?;
        println!("total variation after {} steps: {tv:.3e}", args.steps);
        summary.finite_t_total_variation = Some(tv);
    }

    write_json(&dir, "summary.json", &summary)?;
    outputs.push("summary.json".into());
    Ok(Outcome {
        rng_seed,
        inputs,
        outputs,
    })
}

use std::io::Write;

use pamix::netmodel::{grow_sequence, rng_from_seed, GrowthOptions, ModelParams, SeedSpec, ShortfallPolicy};

use super::{create, resolve_rng_seed, seed_inputs};
use crate::cli::SimulateArgs;
use crate::{Failure, Outcome};

pub fn run(args: &mut SimulateArgs) -> Result<Outcome, Failure> {
    let spec = args.seed_spec().to_string();
    args.seed = Some(spec.clone());
    args.seed_positional = None;
    let seed = SeedSpec::from_spec_str(&spec)?;
    let params = ModelParams::new(args.model.m, args.model.m_hat, args.model.alpha)?;
    let rng_seed = resolve_rng_seed(&mut args.rng_seed);

    let options = GrowthOptions {
        shortfall: if args.strict_seed {
            ShortfallPolicy::Reject
        } else {
            ShortfallPolicy::Replace
        },
        keep_edges: args.export_graph,
    };
    let growth = grow_sequence(&seed, &params, args.steps, options, &mut rng_from_seed(rng_seed))?;
    for w in growth.seed_report.warnings(&params, seed.node_count()) {
        eprintln!("warning: {w}");
    }

    let dir = &args.out.out_dir;
    let mut outputs = vec!["samplelog.csv".to_string()];
    let mut out = create(dir, "samplelog.csv")?;
    growth.log.write_csv(&mut out)?;
    out.flush()?;
    if args.export_graph {
        let mut out = create(dir, "graph.txt")?;
        growth.network.write_edge_list(&mut out)?;
        out.flush()?;
        outputs.push("graph.txt".into());
    }
    println!(
        "{} nodes, {} edges, {} attachment records",
        growth.network.node_count(),
        growth.network.edge_count(),
        growth.log.num_records()
    );
    Ok(Outcome {
        rng_seed: Some(rng_seed),
        inputs: seed_inputs(&spec),
        outputs,
    })
}

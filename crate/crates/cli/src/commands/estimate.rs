use std::fs::File;
use std::io::{BufReader, Write};

use pamix::em::{self, EmConfig, EmTrace, ZeroInDegreePolicy};
use pamix::likelihood::{self, MleReport};
use pamix::netmodel::SampleLog;
use serde::Serialize;

use super::{create, write_json, write_trace};
use crate::cli::{EmArgs, EstimateArgs, Method};
use crate::{Failure, Outcome};

#[derive(Debug, Serialize)]
pub struct EmSummary {
    pub final_alpha: f64,
    pub converged: bool,
    pub iterations: usize,
    pub record_count: usize,
    pub zero_in_degree: ZeroInDegreePolicy,
}

impl EmSummary {
    pub fn new(trace: &EmTrace, policy: ZeroInDegreePolicy) -> Self {
        Self {
            final_alpha: trace.final_alpha,
            converged: trace.converged,
            iterations: trace.updates(),
            record_count: trace.record_count,
            zero_in_degree: policy,
        }
    }
}

#[derive(Debug, Serialize)]
struct EstimateReport {
    steps: usize,
    records: usize,
    mle: Option<MleReport>,
    em: Option<EmSummary>,
}

pub fn em_config(args: &EmArgs) -> Result<EmConfig, Failure> {
    let cfg = EmConfig {
        alpha_init: args.alpha_init,
        epsilon: args.epsilon,
        max_iter: args.max_iter,
        zero_in_degree: if args.keep_zero_indegree {
            ZeroInDegreePolicy::Keep
        } else {
            ZeroInDegreePolicy::Drop
        },
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(args: &mut EstimateArgs) -> Result<Outcome, Failure> {
    if args.stride == 0 {
        return Err(Failure::Invalid("--stride must be positive".into()));
    }
    let cfg = em_config(&args.em)?;
    let name = args.log.display().to_string();
    let log = SampleLog::read_csv(BufReader::new(File::open(&args.log)?), &name)?;
    let dir = &args.out.out_dir;
    let mut outputs = Vec::new();
    let want_mle = args.method != Method::Em;
    let want_em = args.method != Method::Mle;
    let tracing = args.trace || args.snapshot_mode;

    let mle = if want_mle {
        let report = likelihood::mle_estimate(log.records())?;
        println!("mle alpha_hat = {:.6}", report.alpha_hat);
        if !report.theorem1_satisfied {
            eprintln!("warning: root conditions for an interior maximum do not hold; estimate is flagged");
        }
        Some(report)
    } else {
        None
    };

    let em = if want_em {
        let trace = em::em_estimate(log.records(), &cfg)?;
        println!("em alpha = {:.6} after {} iterations", trace.final_alpha, trace.updates());
        if !trace.converged {
            eprintln!("warning: EM stopped at --max-iter {} without converging", cfg.max_iter);
        }
        let mut out = create(dir, "em_trace.csv")?;
        trace.write_csv(&mut out)?;
        out.flush()?;
        outputs.push("em_trace.csv".to_string());
        Some(EmSummary::new(&trace, cfg.zero_in_degree))
    } else {
        None
    };

    if tracing && want_mle {
        write_trace(dir, "prefix_trace_mle.csv", &likelihood::cumulative_trace(&log, args.stride))?;
        outputs.push("prefix_trace_mle.csv".into());
    }
    if tracing && want_em {
        write_trace(dir, "prefix_trace_em.csv", &em::cumulative_trace(&log, args.stride, &cfg)?)?;
        outputs.push("prefix_trace_em.csv".into());
    }
    if args.snapshot_mode {
        write_trace(dir, "snapshot_trace.csv", &likelihood::snapshot_trace(&log, args.stride))?;
        outputs.push("snapshot_trace.csv".into());
    }

    let report = EstimateReport {
        steps: log.num_steps(),
        records: log.num_records(),
        mle,
        em,
    };
    write_json(dir, "estimate.json", &report)?;
    outputs.insert(0, "estimate.json".into());
    Ok(Outcome {
        rng_seed: None,
        inputs: vec![args.log.clone()],
        outputs,
    })
}

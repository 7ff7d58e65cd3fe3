//! The `verify` subcommand: suites of numerical checks, reported as JSON lines.

use std::io::Write;
use std::sync::Arc;

use kplane::extremal::extremizer_profile;
use kplane::verify::{
    check_compactness, check_interaction, check_superadditivity, check_truncation_pipeline, random_decaying_profile,
    rational_grid, sweep_concentration_k1, sweep_concentration_k2, sweep_slide, BoundReport,
};
use kplane::{Grid, Params};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::io::{sink, Provenance};
use crate::{Failure, Suite, VerifyArgs};

const ORDER: [Suite; 8] = [
    Suite::ConcentrationK2,
    Suite::ConcentrationK2Weighted,
    Suite::ConcentrationK1,
    Suite::Slide,
    Suite::Superadd,
    Suite::Compactness,
    Suite::Truncation,
    Suite::Interaction,
];

/// Random profiles per pair in the truncation suite.
const TRUNCATION_PROFILES: usize = 5;

fn name(suite: Suite) -> &'static str {
    match suite {
        Suite::ConcentrationK2 => "concentration-k2",
        Suite::ConcentrationK2Weighted => "concentration-k2-weighted",
        Suite::ConcentrationK1 => "concentration-k1",
        Suite::Slide => "slide",
        Suite::Superadd => "superadd",
        Suite::Compactness => "compactness",
        Suite::Truncation => "truncation",
        Suite::Interaction => "interaction",
        Suite::All => "all",
    }
}

fn default_pairs(suite: Suite) -> &'static [(u32, u32)] {
    match suite {
        Suite::ConcentrationK2 | Suite::ConcentrationK2Weighted => &[(2, 3), (2, 4), (3, 4), (2, 5), (3, 5)],
        Suite::ConcentrationK1 => &[(1, 2), (1, 3), (1, 4), (1, 5)],
        Suite::Slide => &[(1, 3)],
        Suite::Superadd => &[(1, 3), (2, 3), (3, 4)],
        Suite::Compactness | Suite::Truncation | Suite::Interaction => &[(1, 3), (2, 3)],
        Suite::All => &[],
    }
}

fn grid(n: usize) -> Result<Arc<Grid>, Failure> {
    Ok(Arc::new(Grid::new(n, f64::INFINITY)?))
}

fn run(suite: Suite, params: &Params, seed: u64, trials: usize) -> Result<Vec<BoundReport>, Failure> {
    let reports = match suite {
        Suite::ConcentrationK2 => sweep_concentration_k2(params, trials, seed, false)?,
        Suite::ConcentrationK2Weighted => sweep_concentration_k2(params, trials, seed, true)?,
        Suite::ConcentrationK1 => sweep_concentration_k1(params, &[1.0, 4.0, 16.0, 64.0])?,
        Suite::Slide => sweep_slide(params, trials, seed)?,
        Suite::Superadd => vec![check_superadditivity(params, &rational_grid(99))?],
        Suite::Compactness => vec![check_compactness(params, 1.0, &[64, 128, 256])?],
        Suite::Truncation => {
            let g = grid(1024)?;
            let levels = [1.0, 2.0, 4.0, 8.0, 16.0];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = vec![check_truncation_pipeline(params, &extremizer_profile(params, 1.0, g.clone())?, &levels)?];
            for _ in 0..TRUNCATION_PROFILES.min(trials) {
                let f = random_decaying_profile(params, g.clone(), &mut rng)?;
                out.push(check_truncation_pipeline(params, &f, &levels)?);
            }
            out
        }
        Suite::Interaction => {
            let orders: Vec<u32> = (1..params.q_int()).collect();
            check_interaction(params, grid(2048)?, 1.0, &[1.0, 2.0, 4.0, 8.0, 16.0, 32.0], &orders)?
        }
        Suite::All => unreachable!("expanded by the caller"),
    };
    Ok(reports)
}

struct Tally {
    suite: &'static str,
    k: u32,
    d: u32,
    checks: usize,
    failed: usize,
    worst_margin: f64,
}

pub fn verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let explicit = match (args.k, args.d) {
        (Some(k), Some(d)) => Some(Params::new(k, d)?),
        _ => None,
    };
    let suites: Vec<Suite> = if args.suite == Suite::All {
        if explicit.is_some() {
            return Err(Failure::Usage("--k/--d select parameters for a single suite; omit them with --suite all".into()));
        }
        ORDER.to_vec()
    } else {
        vec![args.suite]
    };
    if args.trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    let mut out = sink(args.out.as_deref())?;
    let prov = Provenance { params: explicit, seed: Some(args.seed), grid: None };
    let header = json!({ "schema": 1, "header": prov.json(), "suite": name(args.suite), "trials": args.trials });
    writeln!(out, "{header}").map_err(Failure::io)?;
    let mut tallies = Vec::new();
    for suite in suites {
        let pairs: Vec<Params> = match explicit {
            Some(p) => vec![p],
            None => default_pairs(suite).iter().map(|(k, d)| Params::new(*k, *d)).collect::<Result<_, _>>()?,
        };
        for params in pairs {
            let reports = run(suite, &params, args.seed, args.trials)?;
            let mut tally = Tally {
                suite: name(suite),
                k: params.k,
                d: params.d,
                checks: reports.len(),
                failed: 0,
                worst_margin: f64::INFINITY,
            };
            for rep in &reports {
                tally.failed += usize::from(!rep.passed);
                tally.worst_margin = tally.worst_margin.min(rep.margin);
                let line = json!({ "suite": tally.suite, "k": params.k, "d": params.d, "report": rep });
                writeln!(out, "{line}").map_err(Failure::io)?;
            }
            eprintln!(
                "{:<26} k={} d={}  {}/{} pass  worst margin {:.3e}",
                tally.suite,
                tally.k,
                tally.d,
                tally.checks - tally.failed,
                tally.checks,
                tally.worst_margin
            );
            tallies.push(tally);
        }
    }
    out.flush().map_err(Failure::io)?;
    if let Some(path) = &args.summary {
        let mut s = sink(Some(path))?;
        for line in prov.comment_lines() {
            writeln!(s, "# {line}").map_err(Failure::io)?;
        }
        writeln!(s, "suite,k,d,checks,failed,worst_margin").map_err(Failure::io)?;
        for t in &tallies {
            writeln!(s, "{},{},{},{},{},{:e}", t.suite, t.k, t.d, t.checks, t.failed, t.worst_margin)
                .map_err(Failure::io)?;
        }
        s.flush().map_err(Failure::io)?;
    }
    let failed: usize = tallies.iter().map(|t| t.failed).sum();
    Ok(if failed == 0 { 0 } else { 1 })
}

//! The `transform`, `constant`, `search` and `diagnose` subcommands.

use std::sync::Arc;

use kplane::cc::{classify_trichotomy, synthetic, TrichotomyOptions};
use kplane::extremal::{constant_a, constant_b, extremizer_profile, search_extremizer_with, SearchOptions};
use kplane::transform::{apply_t_checked, apply_t_indicator};
use kplane::verify::random_decaying_profile;
use kplane::{Grid, Intervals, Params, Profile};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::io::{read_profile, write_json, write_profile, Provenance};
use crate::{ConstantArgs, DiagnoseArgs, Failure, SearchArgs, TransformArgs, Which};

const SCHEMA: u32 = 1;

fn number(raw: &str, what: &str) -> Result<f64, Failure> {
    raw.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Failure::Usage(format!("{what}: '{raw}' is not a finite number")))
}

fn preset(params: &Params, grid: Arc<Grid>, spec: &str) -> Result<Profile, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["extremizer"] => Ok(extremizer_profile(params, 1.0, grid)?),
        ["indicator", a] => {
            let a = number(a, "indicator radius")?;
            Ok(Profile::indicator(grid, &Intervals::single(0.0, a)?))
        }
        ["bump", c, w] => {
            let (c, w) = (number(c, "bump center")?, number(w, "bump width")?);
            if !(w > 0.0) || c - w / 2.0 < 0.0 {
                return Err(Failure::Usage(format!("bump needs width > 0 and center >= width/2, got {c}:{w}")));
            }
            Ok(synthetic::bump(params, grid, c - w / 2.0, c + w / 2.0, 1.0)?)
        }
        _ => Err(Failure::Usage(format!(
            "unknown preset '{spec}'; expected extremizer, indicator:<a> or bump:<center>:<width>"
        ))),
    }
}

pub fn transform(args: &TransformArgs) -> Result<u8, Failure> {
    let params = Params::new(args.k, args.d)?;
    let spec = args.grid.spec();
    let grid = spec.build()?;
    let out = match (&args.input, &args.preset) {
        (_, Some(p)) if p.starts_with("indicator:") => {
            // closed form rather than quadrature of a discontinuous sample
            let a = number(&p["indicator:".len()..], "indicator radius")?;
            apply_t_indicator(&params, &Intervals::single(0.0, a)?, grid)
        }
        (_, Some(p)) => transformed(&params, &preset(&params, grid, p)?),
        (Some(path), None) => transformed(&params, &read_profile(path, grid)?),
        (None, None) => return Err(Failure::Usage("give --input or --preset".into())),
    };
    let prov = Provenance { params: Some(params), seed: None, grid: Some(spec) };
    write_profile(args.out.as_deref(), &out, &prov)?;
    Ok(0)
}

fn transformed(params: &Params, f: &Profile) -> Profile {
    let (tf, diag) = apply_t_checked(params, f);
    if diag.warning {
        eprintln!(
            "warning: slow decay, estimated tail fraction {:.2e}; the transform may not have converged",
            diag.tail_fraction
        );
    }
    tf
}

pub fn constant(args: &ConstantArgs) -> Result<u8, Failure> {
    let params = Params::new(args.k, args.d)?;
    let (which, value, error, grid_n) = match args.which {
        Which::A => ("A", constant_a::<f64>(&params), 0.0, None),
        Which::B => {
            let est = constant_b::<f64>(&params, args.grid_n)?;
            ("B", est.value, est.error, Some(est.resolution))
        }
    };
    write_json(
        None,
        &json!({
            "schema": SCHEMA,
            "version": kplane::VERSION,
            "k": params.k,
            "d": params.d,
            "which": which,
            "value": value,
            "est_error": error,
            "grid_n": grid_n,
        }),
    )?;
    Ok(0)
}

pub fn search(args: &SearchArgs) -> Result<u8, Failure> {
    let params = Params::new(args.k, args.d)?;
    let spec = args.grid.spec();
    let grid = spec.build()?;
    let mut seed = None;
    let init = match args.init.split_once(':') {
        None if args.init == "indicator" => Profile::indicator(grid, &Intervals::single(0.0, 1.0)?),
        Some(("random", s)) => {
            let s: u64 = s.parse().map_err(|_| Failure::Usage(format!("random seed must be an integer, got '{s}'")))?;
            seed = Some(s);
            random_decaying_profile(&params, grid, &mut ChaCha8Rng::seed_from_u64(s))?
        }
        Some(("file", path)) => read_profile(&path.into(), grid)?,
        _ => {
            return Err(Failure::Usage(format!(
                "unknown init '{}'; expected indicator, random:<seed> or file:<path>",
                args.init
            )))
        }
    };
    let opts = SearchOptions { max_iter: args.max_iter, tol: args.tol, recenter: !args.no_recenter };
    let trace = search_extremizer_with(&params, &init, &opts)?;
    let prov = Provenance { params: Some(params), seed, grid: Some(spec) };
    let b = constant_b::<f64>(&params, spec.n.max(1024))?.value;
    write_json(
        args.out.as_deref(),
        &json!({
            "schema": SCHEMA,
            "header": prov.json(),
            "init": args.init,
            "max_iter": args.max_iter,
            "tol": args.tol,
            "constant_b": b,
            "final_ratio": trace.final_ratio(),
            "trace": trace,
        }),
    )?;
    if let Some(path) = &args.profile_out {
        write_profile(Some(path), &trace.final_profile, &prov)?;
    }
    if trace.converged {
        Ok(0)
    } else {
        eprintln!("search stopped after {} iterations without converging", trace.iterations_used);
        Ok(3)
    }
}

fn synthetic_sequence(params: &Params, grid: Arc<Grid>, spec: &str, len: Option<usize>) -> Result<Vec<Profile>, Failure> {
    match spec.split_once(':') {
        None if spec == "tight" => Ok(synthetic::tight(params, grid, len.unwrap_or(5))?),
        None if spec == "vanishing" => Ok(synthetic::vanishing(params, grid, len.unwrap_or(9))?),
        Some(("dichotomy", a)) => {
            Ok(synthetic::dichotomy(params, grid, number(a, "dichotomy mass fraction")?, len.unwrap_or(6))?)
        }
        _ => Err(Failure::Usage(format!(
            "unknown synthetic family '{spec}'; expected tight, vanishing or dichotomy:<alpha>"
        ))),
    }
}

pub fn diagnose(args: &DiagnoseArgs) -> Result<u8, Failure> {
    let params = Params::new(args.k, args.d)?;
    let spec = args.grid.spec();
    let grid = spec.build()?;
    if args.len == Some(0) {
        return Err(Failure::Usage("--len must be positive".into()));
    }
    let seq = match &args.synthetic {
        Some(s) => synthetic_sequence(&params, grid, s, args.len)?,
        None => {
            let raw = args
                .inputs
                .iter()
                .map(|p| read_profile(p, grid.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            if args.auto_normalize {
                raw.iter()
                    .map(|f| synthetic::rescale_mass(&params, f, 1.0))
                    .collect::<Result<Vec<_>, _>>()?
            } else {
                raw
            }
        }
    };
    if !(args.eps > 0.0 && args.eps < 1.0) {
        return Err(Failure::Usage(format!("--eps must lie in (0, 1), got {}", args.eps)));
    }
    let report = classify_trichotomy(&params, &seq, &TrichotomyOptions::new(args.eps)).map_err(|e| match e {
        kplane::Error::Domain(msg) => {
            Failure::Usage(format!("{msg}; pass --auto-normalize to rescale inputs to unit L^p mass"))
        }
        other => other.into(),
    })?;
    let prov = Provenance { params: Some(params), seed: None, grid: Some(spec) };
    write_json(
        args.out.as_deref(),
        &json!({ "schema": SCHEMA, "header": prov.json(), "eps": args.eps, "report": report }),
    )?;
    Ok(0)
}

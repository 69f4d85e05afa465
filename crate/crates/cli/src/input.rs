//! Parsing of inline datum specs, numbers with `pi`, and comma lists.

use std::path::Path;

use nls_periodic_rh::{Complex64, InitialDatum, Lambda};

/// `3`, `-0.5`, `pi`, `2pi`, `2*pi`, `pi/2`, `3pi/4`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace(' ', "");
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.to_string(), parse_number(b)?),
        None => (t.clone(), 1.0),
    };
    let Some(head) = num.strip_suffix("pi") else {
        return Err(format!("not a number: {s:?}"));
    };
    let head = head.strip_suffix('*').unwrap_or(head);
    let factor = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| format!("not a number: {s:?}"))?,
    };
    Ok(factor * std::f64::consts::PI / den)
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(parse_number).collect()
}

pub fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    match parse_list(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected two comma-separated numbers, got {s:?}")),
    }
}

pub fn parse_lambda(v: f64) -> Result<Lambda, String> {
    Lambda::from_value(v).map_err(|e| e.to_string())
}

/// Parameters of an inline `constant(q0=..,L=..,lambda=..)` spec.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantSpec {
    pub q0: f64,
    pub period: f64,
    pub lambda: Lambda,
}

pub fn parse_constant(s: &str) -> Result<Option<ConstantSpec>, String> {
    let t = s.trim();
    let Some(inner) = t.strip_prefix("constant(").and_then(|r| r.strip_suffix(')')) else {
        return Ok(None);
    };
    let (mut q0, mut period, mut lambda) = (None, None, None);
    for part in inner.split(',').filter(|p| !p.trim().is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| format!("expected key=value in {part:?}"))?;
        let v = parse_number(value)?;
        match key.trim() {
            "q0" => q0 = Some(v),
            "L" => period = Some(v),
            "lambda" => lambda = Some(parse_lambda(v)?),
            k => return Err(format!("unknown constant-datum key {k:?}")),
        }
    }
    Ok(Some(ConstantSpec {
        q0: q0.ok_or("constant datum needs q0")?,
        period: period.ok_or("constant datum needs L")?,
        lambda: lambda.ok_or("constant datum needs lambda")?,
    }))
}

/// Resolves `--datum` (inline constant or JSON path) or the random generator.
pub fn load_datum(
    spec: Option<&str>,
    random: bool,
    seed: u64,
    modes: usize,
    period: f64,
    lambda: f64,
) -> Result<InitialDatum, String> {
    match (spec, random) {
        (Some(_), true) => Err("--datum and --random are mutually exclusive".into()),
        (None, false) => Err("a datum is required: --datum SPEC|PATH or --random".into()),
        (None, true) => InitialDatum::random_band_limited(seed, modes, period, parse_lambda(lambda)?)
            .map_err(|e| e.to_string()),
        (Some(s), false) => match parse_constant(s)? {
            Some(c) => InitialDatum::constant(Complex64::new(c.q0, 0.0), c.period, c.lambda)
                .map_err(|e| e.to_string()),
            None => InitialDatum::read_json(Path::new(s)).map_err(|e| format!("{s}: {e}")),
        },
    }
}

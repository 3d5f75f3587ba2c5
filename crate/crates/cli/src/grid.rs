//! Sweep-axis syntax: comma lists, `start:stop:step` float ranges and
//! inclusive `a..b` integer ranges.

use locsched::{Error, Result, StrategyKind};

// Range values are snapped to this grid so 0.1:1.0:0.1 yields 0.3, not
// 0.30000000000000004.
const SNAP: f64 = 1e9;

fn float(key: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::config(key, format!("{s:?} is not a number")))
}

pub fn floats(key: &str, text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let fields: Vec<&str> = part.split(':').collect();
        match fields[..] {
            [one] => out.push(float(key, one)?),
            [start, stop, step] => {
                let (start, stop, step) =
                    (float(key, start)?, float(key, stop)?, float(key, step)?);
                if !step.is_finite() || step <= 0.0 || stop < start {
                    return Err(Error::config(key, format!("bad range {part:?}")));
                }
                let n = ((stop - start) / step + 1e-9).floor() as u64;
                for i in 0..=n {
                    out.push(((start + i as f64 * step) * SNAP).round() / SNAP);
                }
            }
            _ => return Err(Error::config(key, format!("bad value {part:?}"))),
        }
    }
    if out.is_empty() {
        return Err(Error::config(key, "no values given"));
    }
    Ok(out)
}

pub fn seeds(text: &str) -> Result<Vec<u64>> {
    let int = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| Error::config("seeds", format!("{s:?} is not an unsigned integer")))
    };
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (int(a)?, int(b)?);
                if b < a {
                    return Err(Error::config("seeds", format!("empty range {part:?}")));
                }
                out.extend(a..=b);
            }
            None => out.push(int(part)?),
        }
    }
    if out.is_empty() {
        return Err(Error::config("seeds", "no values given"));
    }
    Ok(out)
}

pub fn kinds(text: &str) -> Result<Vec<StrategyKind>> {
    let out = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse()
                .map_err(|_| Error::config("kinds", format!("bad kind {p:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        return Err(Error::config("kinds", "no values given"));
    }
    Ok(out)
}

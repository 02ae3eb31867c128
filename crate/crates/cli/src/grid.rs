//! Grid syntax for sweep arguments: comma lists, `start:stop:step` ranges for
//! head probabilities and `start:stop:count` linspaces for rate parameters.

use coin_duel::rational::{parse_rational, Rational};
use num_traits::{Signed, Zero};

/// Comma-separated list of integers (negative values allowed).
pub fn parse_int_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>, String> {
    let values: Result<Vec<T>, _> = text.split(',').map(|s| s.trim().parse::<T>()).collect();
    match values {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(format!(
            "expected a comma-separated list of integers, got `{text}`"
        )),
    }
}

/// `start:stop:step` (inclusive of `stop` when it lands on the grid) or a
/// comma list, evaluated in exact decimal arithmetic.
pub fn parse_step_grid(text: &str) -> Result<Vec<Rational>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || format!("expected start:stop:step or a comma list, got `{text}`");
    match parts.as_slice() {
        [single] => single
            .split(',')
            .map(|s| parse_rational(s).ok_or_else(bad))
            .collect(),
        [start, stop, step] => {
            let start = parse_rational(start).ok_or_else(bad)?;
            let stop = parse_rational(stop).ok_or_else(bad)?;
            let step = parse_rational(step).ok_or_else(bad)?;
            if !step.is_positive() || stop < start {
                return Err(bad());
            }
            let mut out = Vec::new();
            let mut x = start;
            while x <= stop {
                out.push(x.clone());
                x += &step;
            }
            Ok(out)
        }
        _ => Err(bad()),
    }
}

/// `start:stop:count` evenly spaced points including both ends, or a comma list.
pub fn parse_count_grid(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || format!("expected start:stop:count or a comma list, got `{text}`");
    match parts.as_slice() {
        [single] => single
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
            .collect(),
        [start, stop, count] => {
            let start: f64 = start.trim().parse().map_err(|_| bad())?;
            let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
            let count: usize = count.trim().parse().map_err(|_| bad())?;
            Ok(linspace(start, stop, count))
        }
        _ => Err(bad()),
    }
}

/// Evenly spaced values with the last point pinned to `stop`.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let step = (stop - start) / (count - 1) as f64;
            let mut values: Vec<f64> = (0..count).map(|i| start + i as f64 * step).collect();
            values[count - 1] = stop;
            values
        }
    }
}

pub fn all_in_unit_interval(values: &[Rational]) -> bool {
    values
        .iter()
        .all(|p| !p.is_zero() && p.is_positive() && *p <= Rational::from_integer(1.into()))
}

//! Command-line numbers: angles written as fractions of π, lists and ranges.
//!
//! An angle is a plain number (`0.3`, `-1e-2`) or a multiple of π with an
//! optional integer denominator: `pi`, `2pi`, `-pi/2`, `7pi/4`, `0.5*pi`.
//! `π` is accepted for `pi`. Lists are comma separated; an item `a..b`
//! expands to 9 evenly spaced values and `a..b:n` to `n` of them, both ends
//! included. Each value keeps the text it was parsed from, so configurations
//! can be echoed exactly.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Points in a range item without an explicit count.
pub const DEFAULT_RANGE_POINTS: usize = 9;

pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.replace('π', "pi");
    let bad = || format!("invalid angle '{s}' (expected e.g. 0.5, pi/4, -2pi, 7pi/4)");
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad()).and_then(finite(s));
    };
    let coef = match t[..at].trim_end_matches('*') {
        "" | "+" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    let rest = &t[at + 2..];
    let den = if rest.is_empty() {
        1.0
    } else {
        let d = rest.strip_prefix('/').ok_or_else(bad)?;
        let d: u64 = d.parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(format!("angle '{s}' divides by zero"));
        }
        d as f64
    };
    finite(s)(coef * PI / den)
}

fn finite(s: &str) -> impl Fn(f64) -> Result<f64, String> + '_ {
    move |x| {
        if x.is_finite() {
            Ok(x)
        } else {
            Err(format!("'{s}' is not a finite number"))
        }
    }
}

fn split_range(item: &str) -> Option<(&str, &str, Option<&str>)> {
    let (a, rest) = item.split_once("..")?;
    Some(match rest.split_once(':') {
        Some((b, n)) => (a, b, Some(n)),
        None => (a, rest, None),
    })
}

fn range_points(item: &str, n: Option<&str>) -> Result<usize, String> {
    let n = match n {
        None => DEFAULT_RANGE_POINTS,
        Some(n) => n
            .parse::<usize>()
            .map_err(|_| format!("range '{item}': point count must be an integer"))?,
    };
    if n < 2 {
        return Err(format!("range '{item}' needs at least 2 points"));
    }
    Ok(n)
}

/// A single angle together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Angle {
    pub value: f64,
    text: String,
}

impl Angle {
    pub fn new(text: &str) -> Result<Self, String> {
        text.parse()
    }
}

impl FromStr for Angle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(Angle {
            value: parse_angle(s)?,
            text: s.split_whitespace().collect(),
        })
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Comma-separated angles; ranges are evenly spaced.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleList {
    pub values: Vec<f64>,
    text: String,
}

impl FromStr for AngleList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let text: String = s.split_whitespace().collect();
        let mut values = Vec::new();
        for item in text.split(',') {
            match split_range(item) {
                Some((a, b, n)) => {
                    let (a, b) = (parse_angle(a)?, parse_angle(b)?);
                    let n = range_points(item, n)?;
                    let step = (b - a) / (n - 1) as f64;
                    values.extend((0..n).map(|k| if k == n - 1 { b } else { a + step * k as f64 }));
                }
                None => values.push(parse_angle(item)?),
            }
        }
        Ok(AngleList { values, text })
    }
}

impl fmt::Display for AngleList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Comma-separated positive numbers; ranges are geometric, which suits
/// energy offsets spanning many decades (`1e-12..1e-2:11`).
#[derive(Debug, Clone, PartialEq)]
pub struct LogList {
    pub values: Vec<f64>,
    text: String,
}

impl FromStr for LogList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let text: String = s.split_whitespace().collect();
        let positive = |x: &str| -> Result<f64, String> {
            let v = parse_angle(x)?;
            if v > 0.0 {
                Ok(v)
            } else {
                Err(format!("'{x}' must be positive"))
            }
        };
        let mut values = Vec::new();
        for item in text.split(',') {
            match split_range(item) {
                Some((a, b, n)) => {
                    let (a, b) = (positive(a)?, positive(b)?);
                    let n = range_points(item, n)?;
                    // Spaced in log10 so whole decades come out exact.
                    let (la, lb) = (decade(a), decade(b));
                    let step = (lb - la) / (n - 1) as f64;
                    values.extend((0..n).map(|k| match k {
                        0 => a,
                        k if k == n - 1 => b,
                        k => 10f64.powf(la + step * k as f64),
                    }));
                }
                None => values.push(positive(item)?),
            }
        }
        Ok(LogList { values, text })
    }
}

fn decade(x: f64) -> f64 {
    let l = x.log10();
    if (l - l.round()).abs() < 1e-9 {
        l.round()
    } else {
        l
    }
}

impl fmt::Display for LogList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

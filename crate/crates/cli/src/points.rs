//! Point files: one `x,y` pair per line, `#` comments.

use conicsub::{Error, Point64, Polyline64, Topology};
use log::warn;

use crate::CliError;

/// Parsed input together with the warnings raised while cleaning it.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedPoints {
    pub poly: Polyline64,
    pub warnings: Vec<String>,
}

fn parse_coord(s: &str) -> Option<f64> {
    let v: f64 = s.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

/// Parses a point file. Blank lines and lines starting with `#` are skipped.
/// Consecutive duplicates are collapsed, and for closed input a last vertex
/// equal to the first is dropped.
pub fn parse_points(text: &str, topology: Topology) -> Result<ParsedPoints, CliError> {
    let mut points: Vec<Point64> = Vec::new();
    let mut warnings = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = idx + 1;
        let mut fields = line.split(',');
        let (x, y) = match (fields.next(), fields.next(), fields.next()) {
            (Some(x), Some(y), None) => (x, y),
            _ => return Err(CliError::Parse { line: lineno, message: format!("expected `x,y`, got `{line}`") }),
        };
        let p = match (parse_coord(x), parse_coord(y)) {
            (Some(x), Some(y)) => Point64::new(x, y),
            _ => return Err(CliError::Parse { line: lineno, message: format!("not a finite number pair: `{line}`") }),
        };
        if points.last() == Some(&p) {
            let msg = format!("line {lineno}: duplicate point ({}, {}) collapsed", p.x, p.y);
            warn!("{msg}");
            warnings.push(msg);
            continue;
        }
        points.push(p);
    }
    if topology == Topology::Closed && points.len() > 1 && points.first() == points.last() {
        points.pop();
        let msg = "closing vertex equal to the first one dropped".to_string();
        warn!("{msg}");
        warnings.push(msg);
    }
    if points.len() < 2 {
        return Err(CliError::Input(Error::TooFewPoints { needed: 2, got: points.len() }));
    }
    Ok(ParsedPoints { poly: Polyline64::new(points, topology), warnings })
}

/// Formats `x` like C's `%.17g`: 17 significant digits, trailing zeros
/// removed, scientific notation for exponents below -4 or above 16.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp) as usize;
    strip_zeros(&format!("{x:.decimals$}")).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Serializes vertices in the input format, one `x,y` per line.
pub fn points_csv(poly: &Polyline64) -> String {
    let mut out = String::with_capacity(poly.len() * 40);
    for p in &poly.points {
        out.push_str(&format_g17(p.x));
        out.push(',');
        out.push_str(&format_g17(p.y));
        out.push('\n');
    }
    out
}

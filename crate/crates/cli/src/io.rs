//! Curve CSV and signature JSON files.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, ErrorKind, Write};
use std::path::Path;

use nullsim::analysis::{CartanProfile, ShapeSignature};
use nullsim::curve::SampledCurve;
use nullsim::mink::MinkVector4;

use crate::error::{CliError, CliResult};

pub const CURVE_HEADER: [&str; 5] = ["t", "x0", "x1", "x2", "x3"];
pub const MIN_ROWS: usize = 10;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Open a fresh output file; existing files are never replaced.
pub fn create_output(path: &Path) -> CliResult<BufWriter<File>> {
    match OpenOptions::new().write(true).create_new(true).open(path) {
        Ok(f) => Ok(BufWriter::new(f)),
        Err(e) if e.kind() == ErrorKind::AlreadyExists => Err(CliError::OutputExists(path.display().to_string())),
        Err(e) => Err(io_err(path, e)),
    }
}

fn finish(path: &Path, mut w: BufWriter<File>) -> CliResult<()> {
    w.flush().map_err(|e| io_err(path, e))
}

pub fn read_curve(path: &Path) -> CliResult<SampledCurve> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    let parse_err = |line: u64, msg: String| CliError::Parse(format!("{}: line {line}: {msg}", path.display()));
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?;
    if header.iter().ne(CURVE_HEADER) {
        return Err(parse_err(1, format!("expected header {}", CURVE_HEADER.join(","))));
    }
    let mut t = Vec::new();
    let mut x = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut v = [0.0; 5];
        for (slot, field) in v.iter_mut().zip(rec.iter()) {
            *slot = field
                .parse::<f64>()
                .ok()
                .filter(|f| f.is_finite())
                .ok_or_else(|| parse_err(line, format!("not a finite number: '{field}'")))?;
        }
        if let Some(&prev) = t.last() {
            if !(v[0] > prev) {
                return Err(parse_err(line, format!("t = {} does not increase", v[0])));
            }
        }
        t.push(v[0]);
        x.push(MinkVector4([v[1], v[2], v[3], v[4]]));
    }
    if t.len() < MIN_ROWS {
        return Err(CliError::Core(nullsim::Error::InsufficientSamples { got: t.len(), need: MIN_ROWS }));
    }
    Ok(SampledCurve::new(t, x)?)
}

pub fn write_curve(path: &Path, t: &[f64], x: &[MinkVector4]) -> CliResult<()> {
    let mut w = create_output(path)?;
    let mut body = String::with_capacity(100 * t.len());
    body.push_str(&CURVE_HEADER.join(","));
    body.push('\n');
    for (ti, xi) in t.iter().zip(x) {
        body.push_str(&num(*ti));
        for c in xi.0 {
            body.push(',');
            body.push_str(&num(c));
        }
        body.push('\n');
    }
    w.write_all(body.as_bytes()).map_err(|e| io_err(path, e))?;
    finish(path, w)
}

pub fn read_signature(path: &Path) -> CliResult<ShapeSignature> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let raw: ShapeSignature = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: line {}: {e}", path.display(), e.line())))?;
    Ok(ShapeSignature::new(raw.sigma, raw.kappa_tilde, raw.tau_tilde)?)
}

fn json_array(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| num(x)).collect();
    format!("[{}]", items.join(", "))
}

pub fn signature_json(sig: &ShapeSignature) -> String {
    format!(
        "{{\n  \"sigma\": {},\n  \"kappa_tilde\": {},\n  \"tau_tilde\": {}\n}}\n",
        json_array(&sig.sigma),
        json_array(&sig.kappa_tilde),
        json_array(&sig.tau_tilde)
    )
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    let mut w = create_output(path)?;
    w.write_all(text.as_bytes()).map_err(|e| io_err(path, e))?;
    finish(path, w)
}

/// Plot-ready table `s,sigma,kappa,tau_mag`.
pub fn write_profile(path: &Path, profile: &CartanProfile, sigma: &[f64]) -> CliResult<()> {
    let mut text = String::from("s,sigma,kappa,tau_mag\n");
    for (i, s) in sigma.iter().enumerate() {
        text.push_str(&format!(
            "{},{},{},{}\n",
            num(profile.s[i]),
            num(*s),
            num(profile.kappa[i]),
            num(profile.tau_mag[i])
        ));
    }
    write_text(path, &text)
}

/// Comma-separated four-vector, e.g. `1,0,-2.5,0`.
pub fn parse_vec4(text: &str) -> Result<MinkVector4, String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(format!("expected 4 comma-separated numbers, got '{text}'"));
    }
    let mut c = [0.0; 4];
    for (slot, p) in c.iter_mut().zip(&parts) {
        *slot = p.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("not a finite number: '{p}'"))?;
    }
    Ok(MinkVector4(c))
}

/// `a,b` with `a < b`.
pub fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || format!("expected 'start,end' with start < end, got '{text}'");
    let [a, b] = parts.as_slice() else { return Err(bad()) };
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() && a < b => Ok((a, b)),
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, -0.0, f64::MIN_POSITIVE, f64::MAX] {
            let s = num(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
    }

    #[test]
    fn vectors_and_ranges() {
        assert_eq!(parse_vec4("1, 0,-2.5,3e1").unwrap(), MinkVector4([1.0, 0.0, -2.5, 30.0]));
        assert!(parse_vec4("1,2,3").is_err());
        assert!(parse_vec4("1,2,3,nan").is_err());
        assert_eq!(parse_range("-1,2").unwrap(), (-1.0, 2.0));
        assert!(parse_range("2,1").is_err());
        assert!(parse_range("1").is_err());
    }
}

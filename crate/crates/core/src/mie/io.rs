use std::fmt::Write as _;
use std::path::Path;

use super::{Family, MieMode};
use crate::error::{Error, Result};
use crate::specfun::HarmonicIndex;

pub fn write_mode(mode: &MieMode) -> String {
    let mut s = String::from("enzmode 1\n");
    let _ = writeln!(s, "family {}", mode.family.name());
    let _ = writeln!(s, "n {}", mode.idx.n);
    let _ = writeln!(s, "m {}", mode.idx.m);
    let _ = writeln!(s, "index {}", mode.index);
    let _ = writeln!(s, "k {:.16e}", mode.k);
    let _ = writeln!(s, "lambda {:.16e}", mode.lambda());
    let _ = writeln!(s, "R {:.16e}", mode.r_outer);
    let _ = writeln!(s, "coeffs {:.16e} {:.16e}", mode.coeffs[0], mode.coeffs[1]);
    s
}

pub fn parse_mode(text: &str, name: &str) -> Result<MieMode> {
    let err = |line: usize, msg: String| Error::Parse {
        path: name.to_string(),
        line,
        msg,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, "enzmode 1")) => {}
        Some((ln, l)) => return Err(err(ln, format!("expected `enzmode 1`, got `{l}`"))),
        None => return Err(err(1, "empty mode file".into())),
    }
    let mut field = |key: &str| -> Result<(usize, Vec<&str>)> {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(0, format!("missing `{key}` line")))?;
        let mut tok = l.split_whitespace();
        if tok.next() != Some(key) {
            return Err(err(ln, format!("expected `{key}`, got `{l}`")));
        }
        Ok((ln, tok.collect()))
    };
    fn one<T: std::str::FromStr>(
        ln: usize,
        v: &[&str],
        err: &dyn Fn(usize, String) -> Error,
    ) -> Result<T> {
        match v {
            [x] => x
                .parse()
                .map_err(|_| err(ln, format!("invalid value `{x}`"))),
            _ => Err(err(ln, format!("expected one value, got {}", v.len()))),
        }
    }
    let (ln, v) = field("family")?;
    let family = match v.as_slice() {
        ["electrostatic"] => Family::Electrostatic,
        ["nonelectrostatic"] => Family::NonElectrostatic,
        _ => return Err(err(ln, format!("unknown family `{}`", v.join(" ")))),
    };
    let (ln, v) = field("n")?;
    let n: usize = one(ln, &v, &err)?;
    let (ln, v) = field("m")?;
    let m: i32 = one(ln, &v, &err)?;
    let idx = HarmonicIndex::new(n, m).map_err(|e| err(ln, e.to_string()))?;
    let (ln, v) = field("index")?;
    let index: usize = one(ln, &v, &err)?;
    let (ln, v) = field("k")?;
    let k: f64 = one(ln, &v, &err)?;
    let (ln_l, v) = field("lambda")?;
    let lambda: f64 = one(ln_l, &v, &err)?;
    let (ln, v) = field("R")?;
    let r_outer: f64 = one(ln, &v, &err)?;
    let (ln, v) = field("coeffs")?;
    let coeffs = match v.as_slice() {
        [a, b] => [
            a.parse()
                .map_err(|_| err(ln, format!("invalid value `{a}`")))?,
            b.parse()
                .map_err(|_| err(ln, format!("invalid value `{b}`")))?,
        ],
        _ => return Err(err(ln, "expected two coefficients".into())),
    };
    if let Some((ln, l)) = lines.next() {
        return Err(err(ln, format!("trailing content `{l}`")));
    }
    let mode = MieMode {
        family,
        idx,
        index,
        k,
        r_outer,
        coeffs,
    };
    if (mode.lambda() - lambda).abs() > 1e-12 * lambda.abs().max(1.0) {
        return Err(err(
            ln_l,
            format!("lambda {lambda} is not k^2 = {}", mode.lambda()),
        ));
    }
    Ok(mode)
}

pub fn save_mode(mode: &MieMode, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_mode(mode)).map_err(|e| Error::io(path, e))
}

pub fn load_mode(path: impl AsRef<Path>) -> Result<MieMode> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mode(&text, &path.display().to_string())
}

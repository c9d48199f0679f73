//! JSON and CSV artifacts with fixed float formatting, so that equal inputs
//! give byte-identical files.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::error::Result;

/// Environment variable overriding the output directory.
pub const OUT_DIR_ENV: &str = "PME_OUT_DIR";

/// Default output directory when neither a flag nor the env var is set.
pub const DEFAULT_OUT_DIR: &str = "pme-out";

pub fn out_dir(flag: Option<&Path>) -> PathBuf {
    match flag {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
    }
}

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Pretty printer that writes every float with 17 significant digits.
struct FixedFloat<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloat<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(fmt_f64(v).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, FixedFloat(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

/// `t,x1,...,xn,value` rows.
pub fn write_csv(path: &Path, n: usize, rows: impl IntoIterator<Item = (f64, Vec<f64>, f64)>) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",value\n");
    for (t, x, v) in rows {
        out.push_str(&fmt_f64(t));
        for xi in x {
            out.push(',');
            out.push_str(&fmt_f64(xi));
        }
        out.push(',');
        out.push_str(&fmt_f64(v));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// The sign conventions every report carries.
#[derive(Debug, Clone, Serialize)]
pub struct Conventions {
    pub lorentz_form: &'static str,
    pub bruhat_cell: &'static str,
    pub character: &'static str,
    pub action: &'static str,
    pub algebra_action: &'static str,
    pub conformal_flow: &'static str,
    pub correspondence: &'static str,
    pub sl2_character: &'static str,
}

pub fn conventions() -> Conventions {
    Conventions {
        lorentz_form: "J = diag(1, ..., 1, -1); light-cone coordinates are the last two",
        bruhat_cell: "g = n_{t,x} m a n^-, requires SL(2) entry d != 0 and w_(n+1) > w_(n+2) for w = g(e_(n+1) - e_(n+2))",
        character: "chi(m_j a_{a,y} n^-) = (-1)^(jp) a^r e^(sy)",
        action: "(g.f)(t,x) = chi(q^-)^(-1) f(t',x') where g^(-1) n_{t,x} = n_{t',x'} q^-",
        algebra_action: "pi(X) f = d/de exp(eX).f at e = 0; E acts by -d_t",
        conformal_flow: "exp(e nu_i^-) = n^-_{0,-e e_i}",
        correspondence: "E -> -X1, H -> 2 X3, H01 -> X2, nu+_i -> -Y_i, nu-_i -> -W_i, R_ij -> Z_ij; F has no image",
        sl2_character: "default r = s = 2/(m-1); the SL(2) factor maps time-dependent solutions to solutions only for r = -2/(m-1)",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        a: f64,
        b: Vec<f64>,
        c: Option<f64>,
    }

    #[test]
    fn fixed_digits() {
        let s = to_json(&Sample { a: 0.1, b: vec![1.0, -2.5e-300], c: Some(f64::NAN) }).unwrap();
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("-2.5000000000000000e-300"));
        assert!(s.contains("\"c\": null"));
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        write_csv(&p, 2, vec![(0.5, vec![1.0, 2.0], 3.0)]).unwrap();
        let s = std::fs::read_to_string(p).unwrap();
        assert!(s.starts_with("t,x1,x2,value\n5.0000000000000000e-1,"));
    }
}

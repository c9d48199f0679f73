//! The `pme` command line: verification jobs writing JSON reports and CSV grids.
//!
//! Exit codes: 0 when every check holds, 1 when a check fails (the report is
//! still written), 2 on configuration errors.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decomp::{bruhat_factor, iwasawa_factor, BruhatParams, IwasawaParams};
use crate::error::{Error, Result};
use crate::exact_poly::{parse_rational, MultiPoly, Rational};
use crate::matgroup::{make_n, BasisKey, GroupElement};
use crate::pde::{
    harmonic_basis, residual, stationary_solution, symmetry_check, PmeInstance, ResidualPoint, SampleSpec,
    SymmetryInput, SymmetryReport, SymmetryStep,
};
use crate::repn::{
    char_eval, compact_restrict, one_parameter_transform, CharacterParams, CompactPoint, Field, InducedSection,
    StationarySection1d, StationarySection2d, Transform,
};
use crate::report::{conventions, out_dir, write_csv, write_json, Conventions};
use crate::sample::{random_symmetry_word, seeded_rng, SampleRng};
use crate::vecfields::{check_homomorphism, CheckMode, HomomorphismReport};

#[derive(Debug, Parser)]
#[command(name = "pme", version, about = "Symmetry group actions on the porous medium equation")]
pub struct Cli {
    /// Output directory (overrides PME_OUT_DIR).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact bracket check of the algebra-to-vector-field correspondence.
    AlgebraCheck(AlgebraCheckArgs),
    /// Bruhat and Iwasawa factors of a group element given as JSON.
    Decompose(DecomposeArgs),
    /// Act with a group word on a base field over a grid.
    Act(ActArgs),
    /// Finite-difference residual of a stationary solution.
    Residual(ResidualArgs),
    /// Residuals before and after random symmetry words.
    VerifySymmetry(VerifySymmetryArgs),
    /// A one-parameter orbit of a point and the field values along it.
    Orbit(OrbitArgs),
    /// Parity of the compact restriction of a stationary section.
    Compact(CompactArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AlgebraCheckArgs {
    #[arg(long)]
    pub n: usize,
    /// Exponent as "p/q".
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    /// Full algebra; needs m = (n-2)/(n+2). Default when m has that value.
    #[arg(long, conflicts_with = "parabolic")]
    pub full: bool,
    #[arg(long)]
    pub parabolic: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DecomposeArgs {
    /// GroupElement JSON: {"n", "sl2", "lorentz"}.
    #[arg(long)]
    pub input: PathBuf,
    /// Reconstruction tolerance, scaled by max(1, |g|)^2.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ActArgs {
    /// Act job JSON (see README).
    #[arg(long)]
    pub input: PathBuf,
    /// Relative tolerance of the action law.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

/// Equation and character flags shared by the numerical jobs.
#[derive(Debug, Clone, Args, Serialize)]
pub struct EquationArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub m: String,
    #[arg(long, default_value_t = 0)]
    pub p: u8,
    /// Defaults to 2/(m-1).
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Defaults to 2/(m-1).
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

/// Seed `(k + shift)^{1/m}` with `k` a harmonic basis polynomial.
#[derive(Debug, Clone, Args, Serialize)]
pub struct HarmonicArgs {
    #[arg(long, default_value_t = 1)]
    pub degree: u32,
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Rational constant added to the harmonic polynomial.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub shift: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ResidualArgs {
    #[command(flatten)]
    pub eq: EquationArgs,
    #[command(flatten)]
    pub harmonic: HarmonicArgs,
    #[arg(long, default_value_t = 200)]
    pub count: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    /// Sampling range of x1 as "lo,hi".
    #[arg(long, default_value = "0.5,1.5", allow_hyphen_values = true)]
    pub x1_range: String,
    /// Sampling range of the other coordinates as "lo,hi".
    #[arg(long, default_value = "-0.5,0.5", allow_hyphen_values = true)]
    pub x_range: String,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifySymmetryArgs {
    #[command(flatten)]
    pub eq: EquationArgs,
    #[arg(long, default_value_t = 20)]
    pub words: usize,
    #[arg(long, default_value_t = 4)]
    pub len: usize,
    /// Stencil centers per word.
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    /// Insert a lower-triangular SL(2) step into every word (negative control).
    #[arg(long)]
    pub allow_lower: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub eq: EquationArgs,
    #[command(flatten)]
    pub harmonic: HarmonicArgs,
    /// Basis direction: H, E, F, H01, nu+i, nu-i or Ri,j.
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 41)]
    pub steps: usize,
    /// Base point "t,x1,...,xn"; defaults to t = 0, x = (1, 0, ..., 0).
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompactArgs {
    #[command(flatten)]
    pub eq: EquationArgs,
    /// Harmonic polynomial of the two-dimensional section.
    #[command(flatten)]
    pub harmonic: HarmonicArgs,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

/// Common report envelope.
#[derive(Debug, Serialize)]
struct Envelope<'a, C: Serialize, R: Serialize> {
    subcommand: &'static str,
    config: &'a C,
    conventions: Conventions,
    passed: bool,
    result: R,
}

fn emit<C: Serialize, R: Serialize>(
    dir: &Path,
    name: &'static str,
    config: &C,
    passed: bool,
    result: R,
) -> Result<bool> {
    let env = Envelope { subcommand: name, config, conventions: conventions(), passed, result };
    write_json(&dir.join(format!("{}.json", name.replace('-', "_"))), &env)?;
    Ok(passed)
}

/// Parses `argv` (program name first), runs the job and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let dir = out_dir(cli.out_dir.as_deref());
    let outcome = match &cli.command {
        Command::AlgebraCheck(a) => algebra_check(&dir, a),
        Command::Decompose(a) => decompose(&dir, a),
        Command::Act(a) => act(&dir, a),
        Command::Residual(a) => residual_job(&dir, a),
        Command::VerifySymmetry(a) => verify_symmetry(&dir, a),
        Command::Orbit(a) => orbit(&dir, a),
        Command::Compact(a) => compact(&dir, a),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("pme: {e}");
            2
        }
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn parse_m(s: &str) -> Result<Rational> {
    parse_rational(s).map_err(config_err)
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let v = parse_floats(s)?;
    match v[..] {
        [lo, hi] if lo < hi => Ok((lo, hi)),
        _ => Err(Error::Config(format!("expected a range \"lo,hi\" with lo < hi, got {s:?}"))),
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| Error::Config(format!("not a number: {p:?}"))))
        .collect()
}

impl EquationArgs {
    fn instance(&self) -> Result<PmeInstance> {
        PmeInstance::new(self.n, parse_m(&self.m)?).map_err(config_err)
    }

    fn params(&self, inst: &PmeInstance) -> Result<CharacterParams> {
        let e = inst.symmetric_exponent();
        CharacterParams::new(self.p, self.r.unwrap_or(e), self.s.unwrap_or(e)).map_err(config_err)
    }
}

impl HarmonicArgs {
    fn polynomial(&self, n: usize) -> Result<MultiPoly> {
        let basis = harmonic_basis(n, self.degree);
        let k = basis.get(self.index).ok_or_else(|| {
            Error::Config(format!("harmonic index {} out of range (dimension {})", self.index, basis.len()))
        })?;
        let c = parse_rational(&self.shift).map_err(config_err)?;
        Ok(k + &MultiPoly::constant(n, c))
    }
}

fn algebra_check(dir: &Path, a: &AlgebraCheckArgs) -> Result<bool> {
    let m = parse_m(&a.m)?;
    let mode = if a.full {
        CheckMode::Full
    } else if a.parabolic || !crate::vecfields::is_special(a.n, &m) {
        CheckMode::Parabolic
    } else {
        CheckMode::Full
    };
    let report: HomomorphismReport = check_homomorphism(a.n, &m, mode).map_err(config_err)?;
    let passed = report.passed;
    emit(dir, "algebra-check", a, passed, report)
}

#[derive(Debug, Serialize)]
struct BruhatOut {
    params: BruhatParams,
    n_part: GroupElement,
    m_part: GroupElement,
    a_part: GroupElement,
    nminus_part: GroupElement,
    residual: f64,
}

#[derive(Debug, Serialize)]
struct IwasawaOut {
    params: IwasawaParams,
    k_part: GroupElement,
    a_part: GroupElement,
    nminus_part: GroupElement,
    residual: f64,
}

#[derive(Debug, Serialize)]
struct DecomposeOut {
    element: GroupElement,
    bruhat: Option<BruhatOut>,
    outside_cell: Option<String>,
    iwasawa: Option<IwasawaOut>,
    iwasawa_error: Option<String>,
    tolerance: f64,
}

fn decompose(dir: &Path, a: &DecomposeArgs) -> Result<bool> {
    let text = std::fs::read_to_string(&a.input).map_err(|e| Error::Config(format!("{}: {e}", a.input.display())))?;
    let g: GroupElement = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", a.input.display())))?;
    let scale = g.sl2().abs().max().max(g.lorentz().abs().max()).max(1.0);
    let tolerance = a.tol * scale * scale;
    let mut passed = true;
    let (bruhat, outside_cell) = match bruhat_factor(&g) {
        Ok(f) => {
            let residual = f.residual(&g)?;
            passed &= residual <= tolerance;
            let out = BruhatOut {
                params: f.params,
                n_part: f.n_part,
                m_part: f.m_part,
                a_part: f.a_part,
                nminus_part: f.nminus_part,
                residual,
            };
            (Some(out), None)
        }
        Err(Error::OutsideCell(c)) => (None, Some(c.to_string())),
        Err(e) => return Err(e),
    };
    let (iwasawa, iwasawa_error) = match iwasawa_factor(&g) {
        Ok(f) => {
            let residual = f.residual(&g)?;
            passed &= residual <= tolerance;
            (Some(IwasawaOut { params: f.params, k_part: f.k_part, a_part: f.a_part, nminus_part: f.nminus_part, residual }), None)
        }
        Err(e) => {
            passed = false;
            (None, Some(e.to_string()))
        }
    };
    emit(dir, "decompose", a, passed, DecomposeOut { element: g, bruhat, outside_cell, iwasawa, iwasawa_error, tolerance })
}

/// One polynomial term `coeff * t^t * x^x`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermSpec {
    pub coeff: String,
    #[serde(default)]
    pub t: u32,
    #[serde(default)]
    pub x: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseSpec {
    /// The polynomial itself.
    Polynomial { terms: Vec<TermSpec> },
    /// `k^{1/m}` for a harmonic polynomial `k`; needs `m`.
    Stationary { terms: Vec<TermSpec> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WordItem {
    Step(SymmetryStep),
    Element(GroupElement),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    /// `[lo, hi, points]`.
    pub t: (f64, f64, usize),
    pub x: Vec<(f64, f64, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActJob {
    pub n: usize,
    #[serde(default)]
    pub m: Option<String>,
    #[serde(default)]
    pub params: Option<CharacterParams>,
    pub base: BaseSpec,
    pub word: Vec<WordItem>,
    pub grid: GridSpec,
}

fn build_poly(n: usize, terms: &[TermSpec]) -> Result<MultiPoly> {
    let mut p = MultiPoly::zero(n);
    for term in terms {
        if term.x.len() != n {
            return Err(Error::Config(format!("term exponent list has length {}, expected {n}", term.x.len())));
        }
        let mut e = vec![term.t];
        e.extend(&term.x);
        e.push(0);
        p = &p + &MultiPoly::monomial(n, e, parse_rational(&term.coeff).map_err(config_err)?)?;
    }
    Ok(p)
}

fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => vec![],
        1 => vec![lo],
        _ => (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect(),
    }
}

fn grid_points(g: &GridSpec) -> Vec<(f64, Vec<f64>)> {
    let mut pts: Vec<(f64, Vec<f64>)> = linspace(g.t.0, g.t.1, g.t.2).into_iter().map(|t| (t, vec![])).collect();
    for &(lo, hi, k) in &g.x {
        let axis = linspace(lo, hi, k);
        pts = pts
            .into_iter()
            .flat_map(|(t, x)| {
                axis.iter().map(move |&v| {
                    let mut x = x.clone();
                    x.push(v);
                    (t, x)
                })
            })
            .collect();
    }
    pts
}

#[derive(Debug, Serialize)]
struct Undefined {
    t: f64,
    x: Vec<f64>,
    reason: String,
}

#[derive(Debug, Serialize)]
struct ActOut {
    grid_points: usize,
    defined: usize,
    undefined_count: usize,
    /// First 100 undefined points.
    undefined: Vec<Undefined>,
    action_law_max_rel: f64,
    tolerance: f64,
}

const MAX_LISTED: usize = 100;

fn act(dir: &Path, a: &ActArgs) -> Result<bool> {
    let text = std::fs::read_to_string(&a.input).map_err(|e| Error::Config(format!("{}: {e}", a.input.display())))?;
    let job: ActJob = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", a.input.display())))?;
    let n = job.n;
    if n == 0 || job.grid.x.len() != n {
        return Err(Error::Config(format!("grid needs one x axis per dimension (n = {n})")));
    }
    let m = job.m.as_deref().map(parse_m).transpose()?;
    let params = match (job.params, &m) {
        (Some(p), _) => CharacterParams::new(p.p, p.r, p.s).map_err(config_err)?,
        (None, Some(m)) => CharacterParams::symmetric(0, m).map_err(config_err)?,
        (None, None) => return Err(Error::Config("either params or m is required".into())),
    };
    let base = match &job.base {
        BaseSpec::Polynomial { terms } => Field::from_poly(&build_poly(n, terms)?, params),
        BaseSpec::Stationary { terms } => {
            let m = m.clone().ok_or_else(|| Error::Config("stationary base needs m".into()))?;
            let inst = PmeInstance::new(n, m).map_err(config_err)?;
            stationary_solution(&build_poly(n, terms)?, &inst).map_err(config_err)?.with_params(params)
        }
    };
    let mut transforms = Vec::with_capacity(job.word.len());
    for item in &job.word {
        let tr = match item {
            WordItem::Step(s) => s.transform(),
            WordItem::Element(g) => Transform::generic(g.clone()),
        };
        tr.group_element(n).map_err(config_err)?;
        transforms.push(tr);
    }
    let mut stepwise = base.clone();
    for tr in transforms.iter().rev() {
        stepwise = stepwise.act(tr.clone()).map_err(config_err)?;
    }
    let mut g = GroupElement::identity(n);
    for tr in &transforms {
        g = g.mul(&tr.group_element(n)?).map_err(config_err)?;
    }
    let whole = base.act(Transform::generic(g)).map_err(config_err)?;

    let pts = grid_points(&job.grid);
    let mut rows = Vec::with_capacity(pts.len());
    let mut undefined = Vec::new();
    let mut undefined_count = 0;
    let mut law = 0.0_f64;
    for (t, x) in pts.iter() {
        match stepwise.eval(*t, x) {
            Ok(v) => {
                if let Ok(w) = whole.eval(*t, x) {
                    law = law.max((v - w).abs() / v.abs().max(1.0));
                }
                rows.push((*t, x.clone(), v));
            }
            Err(e) => {
                undefined_count += 1;
                if undefined.len() < MAX_LISTED {
                    undefined.push(Undefined { t: *t, x: x.clone(), reason: e.to_string() });
                }
                rows.push((*t, x.clone(), f64::NAN));
            }
        }
    }
    write_csv(&dir.join("act.csv"), n, rows)?;
    let passed = law <= a.tol;
    let out = ActOut {
        grid_points: pts.len(),
        defined: pts.len() - undefined_count,
        undefined_count,
        undefined,
        action_law_max_rel: law,
        tolerance: a.tol,
    };
    emit(dir, "act", &(a, &job), passed, out)
}

fn sample_spec(n: usize, x1: (f64, f64), rest: (f64, f64), count: usize, h: f64, seed: u64) -> SampleSpec {
    let mut x = vec![x1];
    x.extend(std::iter::repeat_n(rest, n - 1));
    SampleSpec { t: (0.0, 1.0), x, count, h, seed }
}

#[derive(Debug, Serialize)]
struct ResidualOut {
    seed_polynomial: String,
    max_abs: f64,
    mean_abs: f64,
    h: f64,
    count: usize,
    seed: u64,
    tolerance: f64,
    error: Option<String>,
}

fn residual_job(dir: &Path, a: &ResidualArgs) -> Result<bool> {
    let inst = a.eq.instance()?;
    let n = inst.n();
    let k = a.harmonic.polynomial(n)?;
    let f = stationary_solution(&k, &inst).map_err(config_err)?.with_params(a.eq.params(&inst)?);
    let spec = sample_spec(n, parse_range(&a.x1_range)?, parse_range(&a.x_range)?, a.count, a.h, a.eq.seed);
    spec.validate().map_err(config_err)?;
    let mut out = ResidualOut {
        seed_polynomial: k.to_string(),
        max_abs: f64::NAN,
        mean_abs: f64::NAN,
        h: a.h,
        count: 0,
        seed: a.eq.seed,
        tolerance: a.tol,
        error: None,
    };
    let mut rows: Vec<ResidualPoint> = Vec::new();
    match residual(&f, &inst, &spec) {
        Ok(r) => {
            out.max_abs = r.max_abs;
            out.mean_abs = r.mean_abs;
            out.count = r.count;
            rows = r.points;
        }
        Err(e) => out.error = Some(e.to_string()),
    }
    write_csv(&dir.join("residual.csv"), n, rows.into_iter().map(|p| (p.t, p.x, p.value)))?;
    let passed = out.error.is_none() && out.max_abs <= a.tol;
    emit(dir, "residual", a, passed, out)
}

/// Positive harmonic seeds on `x1 in [0.5, 1.5]`, `|x_i| <= 0.5`.
fn symmetry_seeds(n: usize) -> Vec<MultiPoly> {
    let x = |i| MultiPoly::x(n, i);
    let c = |p, q| MultiPoly::constant(n, crate::exact_poly::rat(p, q));
    let mut seeds = vec![x(1), &c(1, 1) + &x(1)];
    if n >= 2 {
        seeds.push(&x(1) + &(&c(1, 5) * &(&(&x(1) * &x(1)) - &(&x(2) * &x(2)))));
        seeds.push(&x(1) + &(&c(3, 10) * &(&x(1) * &x(2))));
    }
    seeds
}

#[derive(Debug, Serialize)]
struct WordOutcome {
    seed_polynomial: String,
    word: Vec<SymmetryStep>,
    report: Option<SymmetryReport>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct VerifyOut {
    special_exponent: bool,
    negative_control: bool,
    words_checked: usize,
    words_failed: usize,
    max_residual_before: f64,
    max_residual_after: f64,
    words: Vec<WordOutcome>,
}

/// Symmetry word with an optional lower-triangular step at a random position.
fn control_word(rng: &mut SampleRng, inst: &PmeInstance, len: usize, lower: bool) -> Vec<SymmetryStep> {
    let mut w = random_symmetry_word(rng, inst.n(), len, inst.special());
    if lower {
        let c = rng.gen_range(0.3..0.8) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let at = rng.gen_range(0..=w.len());
        w.insert(at, SymmetryStep::Sl2Lower { c });
    }
    w
}

fn verify_symmetry(dir: &Path, a: &VerifySymmetryArgs) -> Result<bool> {
    let inst = a.eq.instance()?;
    let n = inst.n();
    let params = a.eq.params(&inst)?;
    let seeds = symmetry_seeds(n);
    let mut rng = seeded_rng(a.eq.seed);
    let mut words = Vec::with_capacity(a.words);
    let mut rows = Vec::new();
    for w in 0..a.words {
        let k = &seeds[w % seeds.len()];
        let f = stationary_solution(k, &inst).map_err(config_err)?.with_params(params);
        let word = control_word(&mut rng, &inst, a.len, a.allow_lower);
        let spec = sample_spec(n, (0.5, 1.5), (-0.5, 0.5), a.count, a.h, a.eq.seed.wrapping_add(w as u64));
        let input = SymmetryInput::Word(word.clone());
        let outcome = match symmetry_check(&input, &f, &inst, &spec, a.allow_lower) {
            Ok(r) => {
                rows.extend(r.points_after.iter().map(|p| (p.t, p.x.clone(), p.value)));
                WordOutcome { seed_polynomial: k.to_string(), word, report: Some(r), error: None }
            }
            Err(e @ (Error::InvalidParameter(_) | Error::RejectedElement(_))) => return Err(config_err(e)),
            Err(e) => WordOutcome { seed_polynomial: k.to_string(), word, report: None, error: Some(e.to_string()) },
        };
        words.push(outcome);
    }
    write_csv(&dir.join("verify_symmetry.csv"), n, rows)?;
    let failed = words.iter().filter(|w| !w.report.as_ref().is_some_and(|r| r.passed)).count();
    let reports = || words.iter().filter_map(|w| w.report.as_ref());
    let out = VerifyOut {
        special_exponent: inst.special(),
        negative_control: a.allow_lower,
        words_checked: words.len(),
        words_failed: failed,
        max_residual_before: reports().fold(0.0, |m, r| m.max(r.residual_before)),
        max_residual_after: reports().fold(0.0, |m, r| m.max(r.residual_after)),
        words,
    };
    emit(dir, "verify-symmetry", a, failed == 0, out)
}

#[derive(Debug, Serialize)]
struct OrbitRow {
    eps: f64,
    t: f64,
    x: Vec<f64>,
    value: f64,
    expected: f64,
}

#[derive(Debug, Serialize)]
struct OrbitSkip {
    eps: f64,
    reason: String,
}

#[derive(Debug, Serialize)]
struct OrbitOut {
    family: String,
    base_point: (f64, Vec<f64>),
    base_value: f64,
    rows: Vec<OrbitRow>,
    skipped: Vec<OrbitSkip>,
    max_rel_discrepancy: f64,
    tolerance: f64,
}

fn orbit(dir: &Path, a: &OrbitArgs) -> Result<bool> {
    let inst = a.eq.instance()?;
    let n = inst.n();
    let key = BasisKey::from_str(&a.family).map_err(config_err)?;
    key.validate(n).map_err(config_err)?;
    let (t0, x0) = match &a.point {
        Some(s) => {
            let v = parse_floats(s)?;
            if v.len() != n + 1 {
                return Err(Error::Config(format!("point needs {} coordinates, got {}", n + 1, v.len())));
            }
            (v[0], v[1..].to_vec())
        }
        None => {
            let mut x = vec![0.0; n];
            x[0] = 1.0;
            (0.0, x)
        }
    };
    if !(a.eps_min <= a.eps_max) || a.steps == 0 {
        return Err(Error::Config("need eps-min <= eps-max and at least one step".into()));
    }
    let k = a.harmonic.polynomial(n)?;
    let params = a.eq.params(&inst)?;
    let f = stationary_solution(&k, &inst).map_err(config_err)?.with_params(params);
    let base_value = f.eval(t0, &x0).map_err(config_err)?;
    let n0 = make_n(t0, &x0);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut worst = 0.0_f64;
    for eps in linspace(a.eps_min, a.eps_max, a.steps) {
        let tr = one_parameter_transform(key, eps, n)?;
        let step = || -> Result<OrbitRow> {
            let b = bruhat_factor(&tr.group_element(n)?.mul(&n0)?)?;
            let expected = char_eval(&params, &b.m_part, &b.a_part, &b.nminus_part)? * base_value;
            let value = f.act(tr.clone())?.eval(b.params.t, &b.params.x)?;
            Ok(OrbitRow { eps, t: b.params.t, x: b.params.x, value, expected })
        };
        match step() {
            Ok(row) => {
                worst = worst.max((row.value - row.expected).abs() / row.expected.abs().max(1.0));
                rows.push(row);
            }
            Err(e) => skipped.push(OrbitSkip { eps, reason: e.to_string() }),
        }
    }
    write_csv(&dir.join("orbit.csv"), n, rows.iter().map(|r| (r.t, r.x.clone(), r.value)))?;
    let passed = worst <= a.tol && !rows.is_empty();
    let out = OrbitOut {
        family: key.to_string(),
        base_point: (t0, x0),
        base_value,
        rows,
        skipped,
        max_rel_discrepancy: worst,
        tolerance: a.tol,
    };
    emit(dir, "orbit", a, passed, out)
}

#[derive(Debug, Serialize)]
struct CompactSample {
    theta: f64,
    z: Vec<f64>,
    value: f64,
    shifted: f64,
}

#[derive(Debug, Serialize)]
struct CompactOut {
    section: String,
    defined: usize,
    undefined: usize,
    max_parity_error: f64,
    tolerance: f64,
    samples: Vec<CompactSample>,
}

/// Uniform point on the unit sphere in R^{n+1} by rejection from the cube.
fn sphere_point(rng: &mut SampleRng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if r > 0.1 && r <= 1.0 {
            return v.into_iter().map(|c| c / r).collect();
        }
    }
}

fn compact(dir: &Path, a: &CompactArgs) -> Result<bool> {
    let inst = a.eq.instance()?;
    let n = inst.n();
    let m = inst.m().clone();
    CharacterParams::new(a.eq.p, 0.0, 0.0).map_err(config_err)?;
    let section: Box<dyn InducedSection> = match n {
        1 => Box::new(StationarySection1d { p: a.eq.p, m }),
        2 => {
            let k = a.harmonic.polynomial(2)?;
            if !k.laplacian().is_zero() {
                return Err(Error::Config("polynomial is not harmonic".into()));
            }
            Box::new(StationarySection2d { k, p: a.eq.p, m })
        }
        _ => return Err(Error::Config(format!("closed-form sections exist for n = 1, 2 only, got n = {n}"))),
    };
    let label = if n == 1 { "1d".to_string() } else { format!("2d, k = {}", a.harmonic.polynomial(2)?) };
    let mut rng = seeded_rng(a.eq.seed);
    let sign = if a.eq.p == 1 { -1.0 } else { 1.0 };
    let mut samples = Vec::new();
    let mut undefined = 0;
    let mut worst = 0.0_f64;
    for _ in 0..a.count {
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let pt = CompactPoint::new(theta, sphere_point(&mut rng, n))?;
        match (compact_restrict(section.as_ref(), &pt), compact_restrict(section.as_ref(), &pt.shifted(std::f64::consts::PI))) {
            (Ok(value), Ok(shifted)) => {
                worst = worst.max((shifted - sign * value).abs() / value.abs().max(1.0));
                samples.push(CompactSample { theta, z: pt.z().to_vec(), value, shifted });
            }
            _ => undefined += 1,
        }
    }
    let passed = worst <= a.tol && !samples.is_empty();
    let out = CompactOut { section: label, defined: samples.len(), undefined, max_parity_error: worst, tolerance: a.tol, samples };
    emit(dir, "compact", a, passed, out)
}

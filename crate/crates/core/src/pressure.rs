//! Level-n pressure sums, certified Hausdorff-dimension brackets and the
//! similarity dimension of ratio families.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bracket::{DimBracket, Witness};
use crate::digits::{modulus, DigitSet};
use crate::error::{domain, spec, Result};
use crate::ifs::{MapSpec, SystemSpec};

pub const BISECTION_LO: f64 = 1e-9;
pub const MAX_ITER: usize = 200;
pub const DEFAULT_TOL: f64 = 1e-10;

const TABLE_LIMIT: usize = 1 << 23;
const CHUNK: usize = 1 << 14;
const RESCALE: f64 = 1e150;

/// Lower and upper level-n sums at one exponent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiSums {
    /// Sum of `r_w^t` over the truncated alphabet.
    pub lower: f64,
    /// Sum of `R_w^t` over the truncated alphabet.
    pub upper: f64,
    /// `upper` plus a rigorous bound for every word using an omitted digit.
    pub upper_with_tail: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureEstimate {
    pub t: f64,
    pub level: usize,
    pub truncation: usize,
    pub lower_value: f64,
    pub upper_value: f64,
}

pub fn finiteness_parameter(digits: &DigitSet) -> f64 {
    digits.finiteness_parameter()
}

/// Finiteness parameter of the full alphabet `ℕ` (the power family at `p = 1`).
pub fn finiteness_parameter_full_alphabet() -> f64 {
    0.5
}

enum Letters {
    Real(Vec<Vec<f64>>),
    Complex(Vec<Vec<Complex64>>),
    Ratio(Vec<f64>),
}

/// Word enumerator producing `(ln r_w, ln R_w)` for every word of a level.
struct Engine {
    letters: Letters,
    lo: f64,
    hi: f64,
}

impl Engine {
    fn new(alphabet: &[MapSpec], lo: f64, hi: f64) -> Self {
        let letters = match alphabet.first() {
            Some(MapSpec::Similarity(_)) => Letters::Ratio(
                alphabet
                    .iter()
                    .map(|m| match m {
                        MapSpec::Similarity(s) => s.ratio.ln(),
                        _ => unreachable!(),
                    })
                    .collect(),
            ),
            Some(MapSpec::CfComplex { .. }) => Letters::Complex(
                alphabet
                    .iter()
                    .map(|m| {
                        m.raw_complex_digits()
                            .iter()
                            .map(|d| Complex64::new(d.re as f64, d.im as f64))
                            .collect()
                    })
                    .collect(),
            ),
            _ => Letters::Real(
                alphabet
                    .iter()
                    .map(|m| m.raw_real_digits().iter().map(|&d| d as f64).collect())
                    .collect(),
            ),
        };
        Engine { letters, lo, hi }
    }

    fn n_letters(&self) -> usize {
        match &self.letters {
            Letters::Real(v) => v.len(),
            Letters::Complex(v) => v.len(),
            Letters::Ratio(v) => v.len(),
        }
    }

    fn word_count(&self, level: usize) -> Option<usize> {
        let n = self.n_letters();
        let mut acc: usize = 1;
        for _ in 0..level {
            acc = acc.checked_mul(n)?;
        }
        Some(acc)
    }

    /// Visits every word starting with `first`, calling `f(ln_lower, ln_upper)`.
    fn visit(&self, level: usize, first: usize, f: &mut dyn FnMut(f64, f64)) {
        match &self.letters {
            Letters::Real(ls) => {
                let (qp, q, s) = real_step(&ls[first], 0.0, 1.0, 0.0);
                self.dfs_real(ls, level - 1, qp, q, s, f);
            }
            Letters::Complex(ls) => {
                let zero = Complex64::new(0.0, 0.0);
                let one = Complex64::new(1.0, 0.0);
                let (qp, q, s) = complex_step(&ls[first], zero, one, 0.0);
                dfs_complex(ls, level - 1, qp, q, s, f);
            }
            Letters::Ratio(ls) => dfs_ratio(ls, level - 1, ls[first], f),
        }
    }

    fn dfs_real(
        &self,
        ls: &[Vec<f64>],
        left: usize,
        qp: f64,
        q: f64,
        scale: f64,
        f: &mut dyn FnMut(f64, f64),
    ) {
        if left == 0 {
            let up = -2.0 * ((qp * self.lo + q).ln() + scale);
            let dn = -2.0 * ((qp * self.hi + q).ln() + scale);
            f(dn, up);
            return;
        }
        for l in ls {
            let (a, b, s) = real_step(l, qp, q, scale);
            self.dfs_real(ls, left - 1, a, b, s, f);
        }
    }

    fn table(&self, level: usize) -> Table {
        let n = self.n_letters();
        let parts: Vec<Vec<(f64, f64)>> = (0..n)
            .into_par_iter()
            .map(|first| {
                let mut v = Vec::new();
                self.visit(level, first, &mut |a, b| v.push((a, b)));
                v
            })
            .collect();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for part in parts {
            for (a, b) in part {
                lower.push(a);
                upper.push(b);
            }
        }
        Table { lower, upper }
    }

    /// Streams the lower and upper sums at `t` without materialising a table.
    fn stream_sums(&self, level: usize, t: f64) -> (f64, f64) {
        let n = self.n_letters();
        let parts: Vec<(f64, f64)> = (0..n)
            .into_par_iter()
            .map(|first| {
                let (mut a, mut b) = (0.0, 0.0);
                self.visit(level, first, &mut |lo, hi| {
                    a += (t * lo).exp();
                    b += (t * hi).exp();
                });
                (a, b)
            })
            .collect();
        parts
            .iter()
            .fold((0.0, 0.0), |acc, x| (acc.0 + x.0, acc.1 + x.1))
    }
}

fn real_step(digits: &[f64], mut qp: f64, mut q: f64, mut scale: f64) -> (f64, f64, f64) {
    for &d in digits {
        let next = d * q + qp;
        qp = q;
        q = next;
    }
    if q > RESCALE {
        qp /= RESCALE;
        q /= RESCALE;
        scale += RESCALE.ln();
    }
    (qp, q, scale)
}

fn complex_step(
    digits: &[Complex64],
    mut qp: Complex64,
    mut q: Complex64,
    mut scale: f64,
) -> (Complex64, Complex64, f64) {
    for &d in digits {
        let next = d * q + qp;
        qp = q;
        q = next;
    }
    if q.norm() > RESCALE {
        qp /= RESCALE;
        q /= RESCALE;
        scale += RESCALE.ln();
    }
    (qp, q, scale)
}

fn dfs_complex(
    ls: &[Vec<Complex64>],
    left: usize,
    qp: Complex64,
    q: Complex64,
    scale: f64,
    f: &mut dyn FnMut(f64, f64),
) {
    if left == 0 {
        let c = (qp * 0.5 + q).norm();
        let r = 0.5 * qp.norm();
        let up = -2.0 * ((c - r).ln() + scale);
        let dn = -2.0 * ((c + r).ln() + scale);
        f(dn, up);
        return;
    }
    for l in ls {
        let (a, b, s) = complex_step(l, qp, q, scale);
        dfs_complex(ls, left - 1, a, b, s, f);
    }
}

fn dfs_ratio(ls: &[f64], left: usize, acc: f64, f: &mut dyn FnMut(f64, f64)) {
    if left == 0 {
        f(acc, acc);
        return;
    }
    for &l in ls {
        dfs_ratio(ls, left - 1, acc + l, f);
    }
}

struct Table {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

fn exp_sum(v: &[f64], t: f64) -> f64 {
    let parts: Vec<f64> = v
        .par_chunks(CHUNK)
        .map(|c| c.iter().map(|x| (t * x).exp()).sum::<f64>())
        .collect();
    parts.iter().sum()
}

/// Level sums for one level, either tabulated or streamed.
struct LevelSums<'a> {
    engine: &'a Engine,
    level: usize,
    table: Option<Table>,
}

impl<'a> LevelSums<'a> {
    fn new(engine: &'a Engine, level: usize) -> Self {
        let table = match engine.word_count(level) {
            Some(c) if c <= TABLE_LIMIT => Some(engine.table(level)),
            _ => None,
        };
        LevelSums {
            engine,
            level,
            table,
        }
    }

    fn sums(&self, t: f64) -> (f64, f64) {
        match &self.table {
            Some(tb) => (exp_sum(&tb.lower, t), exp_sum(&tb.upper, t)),
            None => self.engine.stream_sums(self.level, t),
        }
    }

    fn lower(&self, t: f64) -> f64 {
        match &self.table {
            Some(tb) => exp_sum(&tb.lower, t),
            None => self.engine.stream_sums(self.level, t).0,
        }
    }

    fn upper(&self, t: f64) -> f64 {
        match &self.table {
            Some(tb) => exp_sum(&tb.upper, t),
            None => self.engine.stream_sums(self.level, t).1,
        }
    }
}

/// Rigorous bound on the level-one tail sum of omitted digits.
struct Tail<'a> {
    digits: Option<&'a DigitSet>,
    included: usize,
    last_modulus: f64,
}

impl Tail<'_> {
    fn bound(&self, t: f64) -> f64 {
        match self.digits {
            None => 0.0,
            Some(d) if d.is_finite() => 0.0,
            Some(d) if d.is_complex() => d.complex_tail_bound(self.last_modulus, t),
            Some(d) => d.real_tail_bound(self.included, t),
        }
    }
}

fn tail_for<'a>(system: &'a SystemSpec, alphabet: &[MapSpec]) -> Tail<'a> {
    let last_modulus = match alphabet.last() {
        Some(MapSpec::CfComplex { digit, .. }) => modulus(digit),
        _ => 0.0,
    };
    Tail {
        digits: system.digits(),
        included: alphabet.len(),
        last_modulus,
    }
}

/// Combines truncated level-n sums with the tail: `S + (A+T)^n - A^n`.
fn with_tail(sum: f64, level_one: f64, tail: f64, level: usize) -> f64 {
    if tail == 0.0 {
        return sum;
    }
    if !tail.is_finite() {
        return f64::INFINITY;
    }
    let n = level as i32;
    let extra: f64 = (0..n)
        .map(|k| (level_one + tail).powi(k) * level_one.powi(n - 1 - k))
        .sum();
    sum + tail * extra
}

fn check_args(system: &SystemSpec, level: usize, truncation: usize) -> Result<()> {
    system.validate()?;
    if level == 0 {
        return spec("level must be at least 1");
    }
    if truncation == 0 {
        return spec("truncation must be at least 1");
    }
    Ok(())
}

/// Lower and upper sums of derivative-norm bounds over all words of length
/// `level` on the truncated alphabet, with bounds taken over the whole domain.
pub fn phi_level(system: &SystemSpec, level: usize, t: f64, truncation: usize) -> Result<PhiSums> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("t must be positive, got {t}"));
    }
    check_args(system, level, truncation)?;
    let alphabet = system.truncated_alphabet(truncation)?;
    let engine = Engine::new(&alphabet, 0.0, 1.0);
    let (lower, upper) = LevelSums::new(&engine, level).sums(t);
    let tail = tail_for(system, &alphabet).bound(t);
    let level_one = if tail == 0.0 {
        0.0
    } else {
        LevelSums::new(&engine, 1).upper(t)
    };
    Ok(PhiSums {
        lower,
        upper,
        upper_with_tail: with_tail(upper, level_one, tail, level),
    })
}

pub fn pressure_estimate(
    system: &SystemSpec,
    t: f64,
    level: usize,
    truncation: usize,
) -> Result<PressureEstimate> {
    let s = phi_level(system, level, t, truncation)?;
    let n = level as f64;
    Ok(PressureEstimate {
        t,
        level,
        truncation,
        lower_value: s.lower.ln() / n,
        upper_value: s.upper_with_tail.ln() / n,
    })
}

/// Result of bisecting a decreasing function against 1.
#[derive(Clone, Copy, Debug)]
struct Root {
    /// Largest point known to satisfy `f >= 1` (or 0).
    below: f64,
    /// Smallest point known to satisfy `f < 1` (or `d`).
    above: f64,
    converged: bool,
}

fn bisect(f: &dyn Fn(f64) -> f64, d: f64, tol: f64, trivial: bool) -> Root {
    if trivial {
        return Root {
            below: 0.0,
            above: 0.0,
            converged: true,
        };
    }
    if f(BISECTION_LO) < 1.0 {
        return Root {
            below: 0.0,
            above: BISECTION_LO,
            converged: true,
        };
    }
    if f(d) >= 1.0 {
        return Root {
            below: d,
            above: d,
            converged: true,
        };
    }
    let (mut lo, mut hi) = (BISECTION_LO, d);
    let mut it = 0;
    while hi - lo > tol && it < MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        it += 1;
    }
    Root {
        below: lo,
        above: hi,
        converged: hi - lo <= tol,
    }
}

/// Certified bracket for the Hausdorff dimension of the limit set.
///
/// The upper end solves `Σ R_w^t = 1` over the full alphabet (truncated
/// enumeration plus a rigorous tail bound); the lower end solves
/// `Σ r_w^t = 1` over the truncated subsystem. Derivative bounds are taken
/// over a forward-invariant interval containing the limit set, and the
/// roots of every level up to `level` are intersected.
pub fn hausdorff_bracket(
    system: &SystemSpec,
    level: usize,
    truncation: usize,
    tol: f64,
) -> Result<DimBracket> {
    check_args(system, level, truncation)?;
    if !(tol > 0.0) {
        return domain("tolerance must be positive");
    }
    let d = system.ambient_dim() as f64;
    let alphabet = system.truncated_alphabet(truncation)?;
    let (lo, hi) = match system {
        SystemSpec::CfReal { digits } => digits.real_hull()?,
        _ => (0.0, 1.0),
    };
    let engine = Engine::new(&alphabet, lo, hi);
    let tail = tail_for(system, &alphabet);
    let finite_tail = tail.digits.is_none_or(|ds| ds.is_finite());
    let trivial = alphabet.len() <= 1 && finite_tail;
    let level_one = LevelSums::new(&engine, 1);

    let mut lower: f64 = 0.0;
    let mut upper: f64 = d;
    let mut converged = true;
    for k in 1..=level {
        let sums = LevelSums::new(&engine, k);
        let up = |t: f64| {
            let s = sums.upper(t);
            let tb = tail.bound(t);
            if tb == 0.0 {
                s
            } else {
                with_tail(s, level_one.upper(t), tb, k)
            }
        };
        let dn = |t: f64| sums.lower(t);
        let ru = bisect(&up, d, tol, trivial);
        let rl = bisect(&dn, d, tol, trivial);
        converged &= ru.converged && rl.converged;
        upper = upper.min(ru.above);
        lower = lower.max(rl.below);
    }
    let lower = lower.min(upper);
    Ok(DimBracket {
        lower,
        upper,
        witness: Some(Witness { level, truncation }),
        converged,
    })
}

/// Contraction ratios of a similarity system, finite or parametric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum RatioFamily {
    Finite {
        ratios: Vec<f64>,
    },
    /// `first * factor^k`, `k >= 0`.
    Geometric {
        first: f64,
        factor: f64,
    },
    /// Block `j >= 0` holds `2^j` ratios equal to `2^-(first_exponent + j)`.
    DyadicBlocks {
        first_exponent: u32,
    },
    /// `scale * i^-exponent`, `i >= 1`.
    PowerLaw {
        scale: f64,
        exponent: f64,
    },
}

impl RatioFamily {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            RatioFamily::Finite { ratios } => {
                !ratios.is_empty() && ratios.iter().all(|c| *c > 0.0 && *c < 1.0)
            }
            RatioFamily::Geometric { first, factor } => {
                *first > 0.0 && *first < 1.0 && *factor > 0.0 && *factor < 1.0
            }
            RatioFamily::DyadicBlocks { first_exponent } => {
                *first_exponent >= 1 && *first_exponent < 1000
            }
            RatioFamily::PowerLaw { scale, exponent } => {
                *scale > 0.0 && *scale < 1.0 && *exponent > 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            spec(format!("invalid ratio family {self:?}"))
        }
    }

    /// Ratio of the map with zero-based index `k`.
    pub fn ratio(&self, k: usize) -> Option<f64> {
        match self {
            RatioFamily::Finite { ratios } => ratios.get(k).copied(),
            RatioFamily::Geometric { first, factor } => Some(first * factor.powi(k as i32)),
            RatioFamily::DyadicBlocks { first_exponent } => {
                let block = usize::BITS - 1 - (k + 1).leading_zeros();
                Some(2f64.powi(-((*first_exponent + block) as i32)))
            }
            RatioFamily::PowerLaw { scale, exponent } => {
                Some(scale * ((k + 1) as f64).powf(-exponent))
            }
        }
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            RatioFamily::Finite { ratios } => Some(ratios.len()),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn max_ratio(&self) -> f64 {
        match self {
            RatioFamily::Finite { ratios } => ratios.iter().cloned().fold(0.0, f64::max),
            _ => self.ratio(0).unwrap_or(0.0),
        }
    }

    /// `Σ c_i^t`, `+∞` where divergent.
    pub fn power_sum(&self, t: f64) -> f64 {
        match self {
            RatioFamily::Finite { ratios } => ratios.iter().map(|c| c.powf(t)).sum(),
            RatioFamily::Geometric { first, factor } => first.powf(t) / (1.0 - factor.powf(t)),
            RatioFamily::DyadicBlocks { first_exponent } => {
                if t <= 1.0 {
                    f64::INFINITY
                } else {
                    2f64.powf(-(*first_exponent as f64) * t) / (1.0 - 2f64.powf(1.0 - t))
                }
            }
            RatioFamily::PowerLaw { scale, exponent } => {
                let s = exponent * t;
                if s <= 1.0 {
                    f64::INFINITY
                } else {
                    scale.powf(t) * zeta(s)
                }
            }
        }
    }
}

/// Riemann zeta for `s > 1` by Euler–Maclaurin summation.
pub fn zeta(s: f64) -> f64 {
    const N: usize = 64;
    let n = N as f64;
    let head: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    head + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0
}

/// Similarity dimension and whether it saturated at the ambient dimension.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityDim {
    pub value: f64,
    pub saturated: bool,
}

/// `inf { t > 0 : Σ c_i^t < 1 }` by bisection.
pub fn similarity_h(family: &RatioFamily, ambient_dim: usize) -> Result<SimilarityDim> {
    family.validate()?;
    let d = ambient_dim as f64;
    if family.len() == Some(1) {
        return Ok(SimilarityDim {
            value: 0.0,
            saturated: false,
        });
    }
    if family.power_sum(d) >= 1.0 {
        return Ok(SimilarityDim {
            value: d,
            saturated: true,
        });
    }
    let (mut lo, mut hi) = (0.0, d);
    for _ in 0..MAX_ITER {
        if hi - lo <= 1e-14 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if family.power_sum(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SimilarityDim {
        value: 0.5 * (lo + hi),
        saturated: false,
    })
}

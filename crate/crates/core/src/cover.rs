//! Box counting, chord-slope regression and the two-scale lattice cover cost.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bracket::DimBracket;
use crate::error::{domain, Error, Result};

pub const GRID_CONVENTION: &str = "origin-anchored half-open cells, max coordinate clamped";

/// Input of a box count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SetDescriptor {
    Points {
        points: Vec<Vec<f64>>,
    },
    /// `{ n^-p : n >= 1 } ∪ {0}`.
    Sequence {
        p: f64,
    },
    /// Inversion `x/|x|^2` of the lattice `{ n^p : n >= 1 }^d`, plus the origin.
    Lattice {
        p: f64,
        d: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxEntry {
    pub delta: f64,
    pub count: u64,
}

/// Box counts at strictly decreasing scales.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxCountSeries {
    pub entries: Vec<BoxEntry>,
    pub grid_convention: String,
}

impl BoxCountSeries {
    pub fn new(entries: Vec<BoxEntry>) -> Result<Self> {
        if entries.windows(2).any(|w| !(w[1].delta < w[0].delta)) {
            return domain("scales must be strictly decreasing");
        }
        if entries.iter().any(|e| e.count == 0) {
            return domain("counts must be positive");
        }
        if entries.windows(2).any(|w| w[1].count < w[0].count) {
            return domain("counts must not decrease as the scale shrinks");
        }
        Ok(BoxCountSeries {
            entries,
            grid_convention: GRID_CONVENTION.to_string(),
        })
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return domain(format!("scale {delta} outside (0,1)"));
    }
    Ok(())
}

/// Number of grid cells of side `delta` meeting a finite point set.
pub fn box_count_points(points: &[Vec<f64>], delta: f64) -> Result<u64> {
    check_delta(delta)?;
    let first = points
        .first()
        .ok_or_else(|| Error::EmptyInput("no points to count".into()))?;
    let d = first.len();
    let mut max = vec![f64::NEG_INFINITY; d];
    for p in points {
        for (m, x) in max.iter_mut().zip(p) {
            *m = m.max(*x);
        }
    }
    let last: Vec<i64> = max
        .iter()
        .map(|m| ((m / delta).ceil() as i64 - 1).max(0))
        .collect();
    let mut cells: Vec<Vec<i64>> = points
        .iter()
        .map(|p| {
            p.iter()
                .zip(&last)
                .map(|(x, l)| ((x / delta).floor() as i64).min(*l))
                .collect()
        })
        .collect();
    cells.sort_unstable();
    cells.dedup();
    Ok(cells.len() as u64)
}

fn sequence_count(p: f64, delta: f64) -> u64 {
    let last = ((1.0 / delta).ceil() as i64 - 1).max(0);
    let cell = |x: f64| ((x / delta).floor() as i64).min(last);
    let x = |n: f64| n.powf(-p);
    let mut n = 1.0;
    let mut cells = Vec::new();
    while x(n) - x(n + 1.0) >= delta {
        cells.push(cell(x(n)));
        n += 1.0;
    }
    let fill = cell(x(n));
    cells.retain(|&c| c > fill);
    cells.dedup();
    (fill + 1) as u64 + cells.len() as u64
}

fn lattice_count(p: f64, d: usize, delta: f64) -> u64 {
    if d == 1 {
        return sequence_count(p, delta);
    }
    // Beyond radius r0 neighbouring images are closer than delta.
    let r0 = (p / delta).powf(p / (p + 1.0));
    let r_max = 4.0 * r0;
    let mut coords = Vec::new();
    let mut n = 1.0f64;
    while n.powf(p) <= r_max {
        coords.push(n.powf(p));
        n += 1.0;
    }
    let last = ((1.0 / d as f64 / delta).ceil() as i64 - 1).max(0);
    let mut cells: Vec<Vec<i64>> = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        let x: Vec<f64> = idx.iter().map(|&i| coords[i]).collect();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2.sqrt() <= r_max {
            cells.push(
                x.iter()
                    .map(|v| ((v / r2 / delta).floor() as i64).min(last))
                    .collect(),
            );
        }
        let mut k = 0;
        loop {
            if k == d {
                break;
            }
            idx[k] += 1;
            if idx[k] < coords.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    // Points with |x| > r_max fill the orthant sector of radius 1/r_max.
    let rt = 1.0 / r_max;
    let kmax = (rt / delta).ceil() as i64;
    let mut idx = vec![0i64; d];
    loop {
        let r2: f64 = idx.iter().map(|&i| (i as f64 * delta).powi(2)).sum();
        if r2.sqrt() < rt {
            cells.push(idx.clone());
        }
        let mut k = 0;
        loop {
            if k == d {
                break;
            }
            idx[k] += 1;
            if idx[k] <= kmax {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    cells.sort_unstable();
    cells.dedup();
    cells.len() as u64
}

/// Grid-cell count of a point set or an analytic reference set.
pub fn box_count(set: &SetDescriptor, delta: f64) -> Result<u64> {
    check_delta(delta)?;
    match set {
        SetDescriptor::Points { points } => box_count_points(points, delta),
        SetDescriptor::Sequence { p } => {
            if !(*p > 0.0) {
                return domain("sequence exponent must be positive");
            }
            Ok(sequence_count(*p, delta))
        }
        SetDescriptor::Lattice { p, d } => {
            if !(*p > 0.0) || *d == 0 {
                return domain("lattice needs p > 0 and d >= 1");
            }
            Ok(lattice_count(*p, *d, delta))
        }
    }
}

pub fn box_count_series(set: &SetDescriptor, deltas: &[f64]) -> Result<BoxCountSeries> {
    let mut ds = deltas.to_vec();
    ds.sort_by(|a, b| b.total_cmp(a));
    ds.dedup();
    let counts = ds
        .par_iter()
        .map(|&d| box_count(set, d))
        .collect::<Result<Vec<_>>>()?;
    BoxCountSeries::new(
        ds.into_iter()
            .zip(counts)
            .map(|(delta, count)| BoxEntry { delta, count })
            .collect(),
    )
}

/// `per_decade` log-spaced scales from `from` down to `to`, both included.
pub fn log_spaced(from: f64, to: f64, per_decade: usize) -> Vec<f64> {
    let (hi, lo) = if from >= to { (from, to) } else { (to, from) };
    let decades = (hi / lo).log10();
    let steps = ((decades * per_decade as f64).round() as usize).max(1);
    (0..=steps)
        .map(|i| hi * 10f64.powf(-decades * i as f64 / steps as f64))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionConfig {
    pub min_entries: usize,
    pub min_decades: f64,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        RegressionConfig {
            min_entries: 4,
            min_decades: 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub bracket: DimBracket,
    pub estimate: f64,
    pub least_squares: f64,
}

/// Range of chord slopes of `log N` against `−log δ` over the deepest half.
pub fn box_dim_regression(series: &BoxCountSeries) -> Result<RegressionResult> {
    box_dim_regression_with(series, RegressionConfig::default())
}

pub fn box_dim_regression_with(
    series: &BoxCountSeries,
    config: RegressionConfig,
) -> Result<RegressionResult> {
    let e = &series.entries;
    let min_entries = config.min_entries.max(2);
    if e.len() < min_entries {
        return Err(Error::InsufficientSpan(format!(
            "{} entries, need at least {}",
            e.len(),
            min_entries
        )));
    }
    let decades = (e[0].delta / e[e.len() - 1].delta).log10();
    if decades + 1e-9 < config.min_decades {
        return Err(Error::InsufficientSpan(format!(
            "scales span {decades:.3} decades, need {}",
            config.min_decades
        )));
    }
    let xs: Vec<f64> = e.iter().map(|b| -b.delta.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|b| (b.count as f64).ln()).collect();
    let m = e.len().div_ceil(2).max(2);
    let start = e.len() - m;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in start..e.len() {
        for j in i + 1..e.len() {
            let s = (ys[j] - ys[i]) / (xs[j] - xs[i]);
            lo = lo.min(s);
            hi = hi.max(s);
        }
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let bracket = DimBracket::new(lo, hi);
    Ok(RegressionResult {
        bracket,
        estimate: bracket.midpoint(),
        least_squares: sxy / sxx,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverCost {
    pub p: f64,
    pub d: usize,
    pub theta: f64,
    pub s: f64,
    pub delta: f64,
    pub cost: f64,
    pub ln_cost: f64,
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `(n^-p/δ^θ + 1)^d δ^{θs} + n^d δ^s` with `n = ⌈δ^{-θ/(p+θ)}⌉`, evaluated in
/// log space.
pub fn lattice_cover_cost(p: f64, d: usize, theta: f64, s: f64, delta: f64) -> Result<CoverCost> {
    if !(p > 0.0) || d == 0 {
        return domain("need p > 0 and d >= 1");
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return domain(format!("theta {theta} outside (0,1]"));
    }
    if !(s >= 0.0) {
        return domain("s must be non-negative");
    }
    if !(delta > 0.0 && delta < 0.1) {
        return domain(format!("delta {delta} outside (0, 0.1)"));
    }
    let ld = delta.ln();
    let n = (-theta / (p + theta) * ld).exp().ceil();
    let ln_n = n.ln();
    let ln_x = -p * ln_n - theta * ld;
    let ln_x1 = ln_x.max(0.0) + (-ln_x.abs()).exp().ln_1p();
    let dd = d as f64;
    let t1 = dd * ln_x1 + theta * s * ld;
    let t2 = dd * ln_n + s * ld;
    let ln_cost = log_add_exp(t1, t2);
    Ok(CoverCost {
        p,
        d,
        theta,
        s,
        delta,
        cost: ln_cost.exp(),
        ln_cost,
    })
}

pub const FIT_S_STEP: f64 = 0.005;
pub const FIT_RATIO: f64 = 1e3;

/// Scales `10^-3, 10^-4, ..., 10^-300`.
pub fn default_fit_deltas() -> Vec<f64> {
    (3..=300).map(|k| 10f64.powi(-k)).collect()
}

/// Smallest `s` on a grid of step 0.005 for which the cover cost stays within
/// a factor `10^3` across all scales.
pub fn fit_dim_theta(p: f64, d: usize, theta: f64, deltas: &[f64]) -> Result<f64> {
    if deltas.is_empty() {
        return Err(Error::EmptyInput("no scales".into()));
    }
    let hi = deltas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = deltas.iter().cloned().fold(f64::INFINITY, f64::min);
    if (hi / lo).log10() < 3.0 - 1e-9 {
        return Err(Error::InsufficientSpan(format!(
            "scales span {:.3} decades, need 3",
            (hi / lo).log10()
        )));
    }
    let steps = (d as f64 / FIT_S_STEP).round() as usize;
    let limit = FIT_RATIO.ln();
    for k in 0..=steps {
        let s = k as f64 * FIT_S_STEP;
        let mut mn = f64::INFINITY;
        let mut mx = f64::NEG_INFINITY;
        for &delta in deltas {
            let c = lattice_cover_cost(p, d, theta, s, delta)?.ln_cost;
            mn = mn.min(c);
            mx = mx.max(c);
        }
        if mx - mn < limit {
            return Ok(s);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no s in [0, {d}] keeps the cover cost bounded"
    )))
}

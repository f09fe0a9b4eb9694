//! Closed-form intermediate-dimension curves, the max-combine rule, phase
//! transitions, Hölder-exponent bounds and fractional Brownian images.

use serde::{Deserialize, Serialize};

use crate::bracket::DimBracket;
use crate::error::{domain, Error, Result};

pub const DEFAULT_GRID_POINTS: usize = 513;

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&theta) {
        return domain(format!("theta {theta} outside [0,1]"));
    }
    Ok(())
}

/// `θ/(p+θ)`: intermediate dimension of `{ n^-p }`.
pub fn seq_dim_theta(p: f64, theta: f64) -> Result<f64> {
    if !(p > 0.0) {
        return domain(format!("p must be positive, got {p}"));
    }
    check_theta(theta)?;
    Ok(theta / (p + theta))
}

/// `dθ/(p+θ)`: intermediate dimension of the inverted lattice `G_{p,d}`.
pub fn lattice_dim_theta(p: f64, d: usize, theta: f64) -> Result<f64> {
    if d == 0 {
        return domain("d must be at least 1");
    }
    Ok(d as f64 * seq_dim_theta(p, theta)?)
}

/// `θ·A·B / (A − (1−θ)·B)`.
pub fn interpolation_lower_bound(theta: f64, dim_a: f64, dim_b: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return domain(format!("theta {theta} outside (0,1]"));
    }
    if !(dim_b > 0.0 && dim_b <= dim_a) {
        return domain(format!("need 0 < dimB <= dimA, got {dim_b}, {dim_a}"));
    }
    let den = dim_a - (1.0 - theta) * dim_b;
    if !(den > 0.0) {
        return domain("denominator is not positive");
    }
    Ok(theta * dim_a * dim_b / den)
}

/// `θ* = ph/(d−h)`, where `dθ/(p+θ)` crosses `h`.
pub fn phase_transition_theta(h: f64, p: f64, d: usize) -> Result<f64> {
    if !(p > 0.0) || d == 0 {
        return domain("need p > 0 and d >= 1");
    }
    let d = d as f64;
    if !(h >= 0.0) {
        return domain(format!("h must be non-negative, got {h}"));
    }
    if h >= d / (p + 1.0) {
        return Err(Error::NoTransition(format!(
            "h = {h} is not below the box dimension {}",
            d / (p + 1.0)
        )));
    }
    Ok(p * h / (d - h))
}

/// Uniform grid of `n` points on `[0, 1]` with `extra` points inserted.
pub fn theta_grid(n: usize, extra: &[f64]) -> Vec<f64> {
    let n = n.max(2);
    let mut g: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    g.extend(extra.iter().copied().filter(|t| (0.0..=1.0).contains(t)));
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// A θ-grid of dimension brackets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimCurve {
    pub theta: Vec<f64>,
    pub values: Vec<DimBracket>,
    pub source: String,
}

impl DimCurve {
    pub fn new(
        theta: Vec<f64>,
        values: Vec<DimBracket>,
        source: impl Into<String>,
    ) -> Result<Self> {
        if theta.len() != values.len() || theta.is_empty() {
            return Err(Error::GridMismatch(
                "grid and values differ in length".into(),
            ));
        }
        if theta.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("theta grid must be strictly increasing");
        }
        Ok(DimCurve {
            theta,
            values,
            source: source.into(),
        })
    }

    pub fn from_fn(
        theta: &[f64],
        source: impl Into<String>,
        f: impl Fn(f64) -> Result<DimBracket>,
    ) -> Result<Self> {
        let values = theta.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
        DimCurve::new(theta.to_vec(), values, source)
    }

    pub fn constant(theta: &[f64], value: f64) -> Result<Self> {
        DimCurve::from_fn(theta, format!("constant {value}"), |_| {
            Ok(DimBracket::point(value))
        })
    }

    pub fn uppers(&self) -> Vec<f64> {
        self.values.iter().map(|b| b.upper).collect()
    }

    pub fn lowers(&self) -> Vec<f64> {
        self.values.iter().map(|b| b.lower).collect()
    }

    pub fn same_grid(&self, other: &DimCurve) -> Result<()> {
        if self.theta != other.theta {
            return Err(Error::GridMismatch(format!(
                "'{}' and '{}' use different grids",
                self.source, other.source
            )));
        }
        Ok(())
    }

    /// Linear interpolation of the upper endpoint.
    pub fn upper_at(&self, theta: f64) -> f64 {
        interpolate(&self.theta, &self.uppers(), theta)
    }

    pub fn index_of(&self, theta: f64) -> Option<usize> {
        self.theta.iter().position(|&t| t == theta)
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    let (x0, x1) = (xs[i], xs[i + 1]);
    let w = (x - x0) / (x1 - x0);
    ys[i] + w * (ys[i + 1] - ys[i])
}

pub fn seq_curve(p: f64, theta: &[f64]) -> Result<DimCurve> {
    DimCurve::from_fn(theta, format!("sequence p={p}"), |t| {
        seq_dim_theta(p, t).map(DimBracket::point)
    })
}

pub fn lattice_curve(p: f64, d: usize, theta: &[f64]) -> Result<DimCurve> {
    DimCurve::from_fn(theta, format!("lattice p={p} d={d}"), |t| {
        lattice_dim_theta(p, d, t).map(DimBracket::point)
    })
}

/// Pointwise `max(h, curve)` on both endpoints.
pub fn combine_max(h: &DimBracket, curve: &DimCurve) -> DimCurve {
    DimCurve {
        theta: curve.theta.clone(),
        values: curve.values.iter().map(|b| h.max(b)).collect(),
        source: format!("max(h=[{}, {}], {})", h.lower, h.upper, curve.source),
    }
}

/// Grid points where the slope of the upper endpoint jumps by more than ten
/// grid steps' worth of the largest slope. Consecutive flags are merged.
pub fn slope_breaks(curve: &DimCurve) -> Vec<f64> {
    let x = &curve.theta;
    let y = curve.uppers();
    if x.len() < 3 {
        return Vec::new();
    }
    let slopes: Vec<f64> = (0..x.len() - 1)
        .map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i]))
        .collect();
    let max_slope = slopes.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let step = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
    let thresh = 10.0 * step * max_slope;
    let mut out = Vec::new();
    let mut run: Option<(usize, f64)> = None;
    for i in 1..slopes.len() {
        let jump = (slopes[i] - slopes[i - 1]).abs();
        if jump > thresh && max_slope > 0.0 {
            run = match run {
                Some((j, best)) if jump <= best => Some((j, best)),
                _ => Some((i, jump)),
            };
        } else if let Some((j, _)) = run.take() {
            out.push(x[j]);
        }
    }
    if let Some((j, _)) = run {
        out.push(x[j]);
    }
    out
}

/// Outcome of checking `lim_{θ→0+} curve(θ) = h.upper`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub passed: bool,
    pub limit: f64,
    /// `(eps, |curve(eps) − h.upper|)` from the coarsest to the finest eps.
    pub deviations: Vec<(f64, f64)>,
    pub tolerance: f64,
}

pub fn default_eps_grid() -> Vec<f64> {
    (1..=9).map(|k| 2f64.powi(-k)).collect()
}

pub fn continuity_at_zero_check(
    curve: &DimCurve,
    h: &DimBracket,
    eps_grid: &[f64],
    tolerance: f64,
) -> ContinuityReport {
    let mut eps: Vec<f64> = eps_grid.iter().copied().filter(|e| *e > 0.0).collect();
    eps.sort_by(|a, b| b.total_cmp(a));
    let deviations: Vec<(f64, f64)> = eps
        .iter()
        .map(|&e| (e, (curve.upper_at(e) - h.upper).abs()))
        .collect();
    let shrinking = deviations.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
    let last_ok = deviations.last().is_some_and(|d| d.1 <= tolerance);
    ContinuityReport {
        passed: shrinking && last_ok,
        limit: h.upper,
        deviations,
        tolerance,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderRow {
    pub theta: f64,
    pub dim_p: f64,
    pub dim_q: f64,
    pub alpha_bound: f64,
}

/// Upper bounds for the Hölder exponent of a map between two real
/// continued-fraction sets with power-family digits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderReport {
    pub p: f64,
    pub q: f64,
    pub h_p: f64,
    pub h_q: f64,
    pub theta_opt: f64,
    pub argmin_theta: f64,
    pub bound_intermediate: f64,
    pub bound_closed_form: f64,
    pub bound_hausdorff: f64,
    pub bound_box: f64,
    pub curve: Vec<HolderRow>,
}

fn regime(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Regime(what.to_string()))
    }
}

/// Checks `1 < p < q < 2p−1`, `1/(2p) < h_p < 1/(p+1)` and
/// `p·h_p/(q − q·h_p + p·h_p) < h_q < 1/(q+1)`.
pub fn holder_regime(p: f64, q: f64, h_p: f64, h_q: f64) -> Result<()> {
    regime(1.0 < p, "1 < p")?;
    regime(p < q, "p < q")?;
    regime(q < 2.0 * p - 1.0, "q < 2p - 1")?;
    regime(1.0 / (2.0 * p) < h_p, "1/(2p) < h_p")?;
    regime(h_p < 1.0 / (p + 1.0), "h_p < 1/(p+1)")?;
    regime(
        p * h_p / (q - q * h_p + p * h_p) < h_q,
        "p*h_p/(q - q*h_p + p*h_p) < h_q",
    )?;
    regime(h_q < 1.0 / (q + 1.0), "h_q < 1/(q+1)")?;
    Ok(())
}

pub fn holder_bounds(
    p: f64,
    q: f64,
    h_p: f64,
    h_q: f64,
    grid: Option<&[f64]>,
) -> Result<HolderReport> {
    holder_regime(p, q, h_p, h_q)?;
    let theta_opt = q * h_q / (1.0 - h_q);
    let theta_p = phase_transition_theta(h_p, p, 1)?;
    let theta = match grid {
        Some(g) => g.to_vec(),
        None => theta_grid(DEFAULT_GRID_POINTS, &[theta_opt, theta_p]),
    };
    let cp = combine_max(&DimBracket::point(h_p), &seq_curve(p, &theta)?);
    let cq = combine_max(&DimBracket::point(h_q), &seq_curve(q, &theta)?);
    cp.same_grid(&cq)?;
    let curve: Vec<HolderRow> = theta
        .iter()
        .zip(cp.values.iter().zip(&cq.values))
        .map(|(&t, (a, b))| HolderRow {
            theta: t,
            dim_p: a.upper,
            dim_q: b.upper,
            alpha_bound: b.upper / a.upper,
        })
        .collect();
    let best = curve
        .iter()
        .min_by(|a, b| a.alpha_bound.total_cmp(&b.alpha_bound))
        .expect("non-empty grid");
    Ok(HolderReport {
        p,
        q,
        h_p,
        h_q,
        theta_opt,
        argmin_theta: best.theta,
        bound_intermediate: best.alpha_bound,
        bound_closed_form: (p - p * h_q + q * h_q) / q,
        bound_hausdorff: h_q / h_p,
        bound_box: (p + 1.0) / (q + 1.0),
        curve,
    })
}

/// Dimensions of the image of a continued-fraction set under index-α
/// fractional Brownian motion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FbmReport {
    pub hausdorff_image: f64,
    pub box_image_strictly_below_ambient: bool,
    pub all_equal_ambient: bool,
}

pub fn fbm_image_dims(h: f64, alpha: f64, ambient: usize) -> Result<FbmReport> {
    if ambient != 1 && ambient != 2 {
        return domain("ambient dimension must be 1 or 2");
    }
    let d = ambient as f64;
    if !(h > 0.0 && h <= d) {
        return domain(format!("h = {h} outside (0, {d}]"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("alpha = {alpha} outside (0,1)"));
    }
    Ok(if alpha * d > h {
        FbmReport {
            hausdorff_image: (h / alpha).min(d),
            box_image_strictly_below_ambient: true,
            all_equal_ambient: false,
        }
    } else {
        FbmReport {
            hausdorff_image: d,
            box_image_strictly_below_ambient: false,
            all_equal_ambient: true,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_forms() {
        assert_eq!(seq_dim_theta(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(seq_dim_theta(2.0, 0.0).unwrap(), 0.0);
        assert_abs_diff_eq!(seq_dim_theta(2.0, 0.5).unwrap(), 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(
            lattice_dim_theta(2.0, 2, 1.0).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        assert_eq!(lattice_dim_theta(1.0, 2, 1.0).unwrap(), 1.0);
        assert!(seq_dim_theta(2.0, 1.5).is_err());
        assert!(seq_dim_theta(2.0, -0.1).is_err());
    }

    #[test]
    fn interpolation_lower_bound_examples() {
        assert_abs_diff_eq!(
            interpolation_lower_bound(1.0, 2.0, 0.7).unwrap(),
            0.7,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            interpolation_lower_bound(0.5, 2.0, 1.0).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        assert!(interpolation_lower_bound(0.5, 1.0, 2.0).is_err());
    }

    #[test]
    fn phase_transitions() {
        let h: f64 = 0.3;
        assert_abs_diff_eq!(
            phase_transition_theta(h, 2.0, 1).unwrap(),
            2.0 * h / (1.0 - h),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            phase_transition_theta(0.25, 2.0, 1).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        assert_eq!(phase_transition_theta(0.0, 2.0, 1).unwrap(), 0.0);
        assert!(matches!(
            phase_transition_theta(0.4, 2.0, 1),
            Err(Error::NoTransition(_))
        ));
    }

    #[test]
    fn combine_examples() {
        let g = theta_grid(513, &[]);
        let c = combine_max(&DimBracket::point(0.3), &seq_curve(2.0, &g).unwrap());
        assert_eq!(c.values[0], DimBracket::point(0.3));
        assert_abs_diff_eq!(c.values[512].upper, 1.0 / 3.0, epsilon = 1e-15);
        let s = seq_curve(2.0, &g).unwrap();
        assert_eq!(combine_max(&DimBracket::point(0.0), &s).values, s.values);
        let sat = combine_max(&DimBracket::point(1.0), &s);
        assert!(sat.values.iter().all(|b| b.upper == 1.0 && b.lower == 1.0));
    }

    #[test]
    fn single_kink_at_transition() {
        let g = theta_grid(513, &[]);
        let c = combine_max(&DimBracket::point(0.3), &seq_curve(2.0, &g).unwrap());
        let k = slope_breaks(&c);
        assert_eq!(k.len(), 1);
        assert!((k[0] - 6.0 / 7.0).abs() <= 1.0 / 512.0);
        assert!(slope_breaks(&seq_curve(2.0, &g).unwrap()).is_empty());
    }

    #[test]
    fn continuity_examples() {
        let g = theta_grid(513, &[]);
        let h = DimBracket::point(0.3);
        let c = combine_max(&h, &seq_curve(2.0, &g).unwrap());
        assert!(continuity_at_zero_check(&c, &h, &default_eps_grid(), 1e-2).passed);
        let flat = DimCurve::constant(&g, 0.5).unwrap();
        assert!(!continuity_at_zero_check(&flat, &h, &default_eps_grid(), 1e-2).passed);
        let lat = lattice_curve(1.0, 2, &g).unwrap();
        let zero = DimBracket::point(0.0);
        assert!(continuity_at_zero_check(&lat, &zero, &default_eps_grid(), 1e-2).passed);
    }

    #[test]
    fn holder_reference_parameters() {
        let r = holder_bounds(2.0, 2.9, 0.26, 0.22, None).unwrap();
        assert_abs_diff_eq!(
            r.bound_closed_form,
            (2.0 - 0.44 + 0.638) / 2.9,
            epsilon = 1e-15
        );
        assert!((r.bound_intermediate - r.bound_closed_form).abs() < 1e-12);
        assert_abs_diff_eq!(r.bound_box, 3.0 / 3.9, epsilon = 1e-15);
        assert_abs_diff_eq!(r.bound_hausdorff, 0.22 / 0.26, epsilon = 1e-15);
        assert!(r.bound_intermediate < r.bound_box && r.bound_box < r.bound_hausdorff);
        assert_eq!(r.argmin_theta, r.theta_opt);
    }

    #[test]
    fn holder_regime_errors_name_the_inequality() {
        match holder_bounds(2.0, 3.5, 0.26, 0.22, None) {
            Err(Error::Regime(m)) => assert_eq!(m, "q < 2p - 1"),
            other => panic!("{other:?}"),
        }
        match holder_bounds(2.0, 2.9, 0.26, 0.3, None) {
            Err(Error::Regime(m)) => assert_eq!(m, "h_q < 1/(q+1)"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fbm_branches() {
        let a = fbm_image_dims(0.3, 0.5, 1).unwrap();
        assert_abs_diff_eq!(a.hausdorff_image, 0.6, epsilon = 1e-15);
        assert!(a.box_image_strictly_below_ambient && !a.all_equal_ambient);
        let b = fbm_image_dims(0.3, 0.2, 1).unwrap();
        assert!(b.all_equal_ambient && b.hausdorff_image == 1.0);
        let c = fbm_image_dims(0.8, 0.5, 2).unwrap();
        assert_abs_diff_eq!(c.hausdorff_image, 1.6, epsilon = 1e-15);
        assert!(c.box_image_strictly_below_ambient);
        let at = fbm_image_dims(0.5, 0.5, 1).unwrap();
        assert_eq!(at.hausdorff_image, 0.5 / 0.5);
        let at2 = fbm_image_dims(0.8, 0.4, 2).unwrap();
        assert_eq!(at2.hausdorff_image, 0.8 / 0.4);
    }
}

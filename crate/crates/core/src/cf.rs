//! Dimension reports for real and complex continued-fraction sets with
//! restricted digits.

use serde::{Deserialize, Serialize};

use crate::bracket::DimBracket;
use crate::curves::{
    combine_max, lattice_curve, phase_transition_theta, seq_curve, theta_grid, DimCurve,
    DEFAULT_GRID_POINTS,
};
use crate::digits::DigitSet;
use crate::error::{spec, Error, Result};
use crate::generic::{sample_words, Sample};
use crate::ifs::SystemSpec;
use crate::pressure::{hausdorff_bracket, DEFAULT_TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CfReportOptions {
    pub level: usize,
    pub truncation: usize,
    pub tol: f64,
    pub grid_points: usize,
    /// Use this value of `h` instead of computing a bracket.
    pub h_override: Option<f64>,
}

impl CfReportOptions {
    /// Deep enumeration for finite sets, wide truncation for infinite ones.
    pub fn for_digits(digits: &DigitSet) -> Self {
        let (level, truncation) = if digits.is_finite() {
            (8, 1)
        } else {
            (1, 10_000)
        };
        CfReportOptions {
            level,
            truncation,
            tol: DEFAULT_TOL,
            grid_points: DEFAULT_GRID_POINTS,
            h_override: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CfReport {
    pub digit_set: DigitSet,
    pub h_bracket: DimBracket,
    pub theta_s: f64,
    pub fixed_point_box_dim: f64,
    /// Where the family curve overtakes `h` (upper and lower ends of `h`).
    pub phase_transition: Option<DimBracket>,
    pub curve: DimCurve,
}

pub fn system_for(digits: &DigitSet) -> SystemSpec {
    if digits.is_complex() {
        SystemSpec::cf_complex(digits.clone())
    } else {
        SystemSpec::cf_real(digits.clone())
    }
}

/// Box dimension of `{1/b : b ∈ I}`.
pub fn fixed_point_box_dim(digits: &DigitSet) -> f64 {
    match digits {
        DigitSet::Power { p, .. } => 1.0 / (p + 1.0),
        DigitSet::ComplexPower { p, .. } => 2.0 / (p + 1.0),
        _ => 0.0,
    }
}

pub fn cf_report(digits: &DigitSet, opts: &CfReportOptions) -> Result<CfReport> {
    digits.validate()?;
    let h = match opts.h_override {
        Some(v) => {
            let d = digits.ambient_dim() as f64;
            if !(0.0..=d).contains(&v) {
                return spec(format!("supplied h = {v} outside [0, {d}]"));
            }
            DimBracket::point(v)
        }
        None => hausdorff_bracket(&system_for(digits), opts.level, opts.truncation, opts.tol)?,
    };
    let family = match digits {
        DigitSet::Power { p, .. } => Some((*p, 1usize)),
        DigitSet::ComplexPower { p, .. } => Some((*p, 2usize)),
        _ => None,
    };
    let transitions = family.map(|(p, d)| {
        (
            phase_transition_theta(h.lower, p, d).ok(),
            phase_transition_theta(h.upper, p, d).ok(),
        )
    });
    let mut extra = Vec::new();
    if let Some((a, b)) = transitions {
        extra.extend(a);
        extra.extend(b);
    }
    let grid = theta_grid(opts.grid_points, &extra);
    let base = match family {
        Some((p, 1)) => seq_curve(p, &grid)?,
        Some((p, d)) => lattice_curve(p, d, &grid)?,
        None => DimCurve::constant(&grid, 0.0)?,
    };
    let phase_transition = match transitions {
        Some((Some(a), Some(b))) => Some(DimBracket::new(a, b)),
        Some((Some(a), None)) => Some(DimBracket::new(a, 1.0)),
        _ => None,
    };
    Ok(CfReport {
        digit_set: digits.clone(),
        h_bracket: h,
        theta_s: digits.finiteness_parameter(),
        fixed_point_box_dim: fixed_point_box_dim(digits),
        phase_transition,
        curve: combine_max(&h, &base),
    })
}

/// Reciprocals of the first `count` digits by modulus; complex points are `[re, im]`.
pub fn cf_fixed_points(digits: &DigitSet, count: usize) -> Result<Vec<Vec<f64>>> {
    digits.validate()?;
    if count == 0 {
        return spec("count must be at least 1");
    }
    if digits.is_complex() {
        Ok(digits
            .complex_digits(count)?
            .iter()
            .map(|b| {
                let m2 = (b.re as f64).powi(2) + (b.im as f64).powi(2);
                vec![b.re as f64 / m2, -(b.im as f64) / m2]
            })
            .collect())
    } else {
        Ok(digits
            .real_digits(count)?
            .iter()
            .map(|&b| vec![1.0 / b as f64])
            .collect())
    }
}

/// Images of the anchor `0` under uniform random words of the truncated alphabet.
pub fn cf_sample_points(
    digits: &DigitSet,
    num_points: usize,
    depth: usize,
    truncation: usize,
    seed: u64,
) -> Result<Vec<Sample>> {
    digits.validate()?;
    let sys = system_for(digits);
    let letters = sys.truncated_alphabet(truncation)?;
    let anchor = vec![0.0; sys.ambient_dim()];
    sample_words(&letters, num_points, depth, seed, &anchor)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LSearch {
    pub l: u64,
    pub bracket: DimBracket,
    pub target: f64,
}

/// Doubles `l` from 2 until the bracket for `{⌊n^p⌋ : n ≥ l}` lies below
/// `1/(p+1) − margin`.
pub fn search_power_l(p: f64, level: usize, truncation: usize, margin: f64) -> Result<LSearch> {
    let target = 1.0 / (p + 1.0) - margin;
    if target <= 1.0 / (2.0 * p) {
        return spec(format!(
            "margin {margin} leaves no room above the finiteness parameter"
        ));
    }
    let mut l = 2u64;
    while l <= 1 << 24 {
        let b = hausdorff_bracket(
            &SystemSpec::cf_real(DigitSet::Power { p, l }),
            level,
            truncation,
            DEFAULT_TOL,
        )?;
        if b.upper < target {
            return Ok(LSearch {
                l,
                bracket: b,
                target,
            });
        }
        l *= 2;
    }
    Err(Error::SearchExhausted(format!(
        "no l up to 2^24 brings h below {target}"
    )))
}

//! Digit sets for real and complex continued-fraction systems.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{spec, Error, Result};

/// Gaussian integer digit `re + im i`.
pub type Gaussian = Complex<i64>;

/// Symbolic description of the index set of a continued-fraction system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum DigitSet {
    /// Finite list of positive integer digits.
    Explicit { digits: Vec<u64> },
    /// Finite list of Gaussian digits with real part at least one.
    ExplicitComplex { digits: Vec<Gaussian> },
    /// `{ floor(n^p) : n >= l }`.
    Power { p: f64, l: u64 },
    /// `{ floor(m^p) + floor(n^p) i : m, n >= 1 }` with `|b| >= R`.
    ComplexPower {
        p: f64,
        #[serde(rename = "R", alias = "r")]
        radius: f64,
    },
    /// `{1, ..., N}`.
    FullTruncated {
        #[serde(alias = "N")]
        n: u64,
    },
}

const MAX_EXACT: f64 = 9.007_199_254_740_992e15;

/// `floor(n^p)`, exact for integral `p`.
pub fn floor_pow(n: u64, p: f64) -> Result<u64> {
    if p.fract() == 0.0 && p > 0.0 && p < 64.0 {
        let mut acc: u64 = 1;
        for _ in 0..(p as u32) {
            acc = acc
                .checked_mul(n)
                .ok_or_else(|| Error::Domain(format!("digit {n}^{p} overflows")))?;
        }
        return Ok(acc);
    }
    let v = (n as f64).powf(p);
    if !(v < MAX_EXACT) {
        return Err(Error::Domain(format!("digit {n}^{p} exceeds exact range")));
    }
    Ok(v.floor() as u64)
}

fn gaussian_key(b: &Gaussian) -> (i128, f64) {
    let m2 = (b.re as i128) * (b.re as i128) + (b.im as i128) * (b.im as i128);
    (m2, (b.im as f64).atan2(b.re as f64))
}

/// Sorts Gaussian digits by modulus, then argument.
pub fn sort_gaussian(digits: &mut [Gaussian]) {
    digits.sort_by(|a, b| {
        let (ma, aa) = gaussian_key(a);
        let (mb, ab) = gaussian_key(b);
        ma.cmp(&mb).then(aa.total_cmp(&ab))
    });
}

pub fn modulus(b: &Gaussian) -> f64 {
    (b.re as f64).hypot(b.im as f64)
}

impl DigitSet {
    pub fn validate(&self) -> Result<()> {
        match self {
            DigitSet::Explicit { digits } => {
                if digits.is_empty() {
                    return spec("explicit digit set is empty");
                }
                if digits.contains(&0) {
                    return spec("digits must be positive");
                }
                let mut s = digits.clone();
                s.sort_unstable();
                if s.windows(2).any(|w| w[0] == w[1]) {
                    return spec("explicit digits must be distinct");
                }
            }
            DigitSet::ExplicitComplex { digits } => {
                if digits.is_empty() {
                    return spec("explicit complex digit set is empty");
                }
                if digits.iter().any(|d| d.re < 1) {
                    return spec("complex digits need real part >= 1");
                }
                let mut s = digits.clone();
                sort_gaussian(&mut s);
                if s.windows(2).any(|w| w[0] == w[1]) {
                    return spec("explicit digits must be distinct");
                }
            }
            DigitSet::Power { p, l } => {
                if !(p.is_finite() && *p > 1.0) {
                    return spec(format!("power family needs p > 1, got {p}"));
                }
                if *l < 2 {
                    return spec(format!("power family needs l >= 2, got {l}"));
                }
            }
            DigitSet::ComplexPower { p, radius } => {
                if !(p.is_finite() && *p > 1.0) {
                    return spec(format!("complex power family needs p > 1, got {p}"));
                }
                if !(radius.is_finite() && *radius >= 0.0) {
                    return spec(format!("complex power family needs R >= 0, got {radius}"));
                }
            }
            DigitSet::FullTruncated { n } => {
                if *n == 0 {
                    return spec("full truncated alphabet needs N >= 1");
                }
            }
        }
        Ok(())
    }

    pub fn is_complex(&self) -> bool {
        matches!(
            self,
            DigitSet::ExplicitComplex { .. } | DigitSet::ComplexPower { .. }
        )
    }

    pub fn is_finite(&self) -> bool {
        self.cardinality().is_some()
    }

    pub fn cardinality(&self) -> Option<usize> {
        match self {
            DigitSet::Explicit { digits } => Some(digits.len()),
            DigitSet::ExplicitComplex { digits } => Some(digits.len()),
            DigitSet::FullTruncated { n } => Some(*n as usize),
            _ => None,
        }
    }

    /// Smallest `count` real digits in increasing order (all of them for finite sets).
    pub fn real_digits(&self, count: usize) -> Result<Vec<u64>> {
        match self {
            DigitSet::Explicit { digits } => {
                let mut d = digits.clone();
                d.sort_unstable();
                d.truncate(count);
                Ok(d)
            }
            DigitSet::FullTruncated { n } => Ok((1..=*n).take(count).collect()),
            DigitSet::Power { p, l } => (0..count as u64).map(|k| floor_pow(l + k, *p)).collect(),
            _ => spec("real digits requested from a complex digit set"),
        }
    }

    /// Smallest `count` Gaussian digits ordered by modulus then argument.
    pub fn complex_digits(&self, count: usize) -> Result<Vec<Gaussian>> {
        match self {
            DigitSet::ExplicitComplex { digits } => {
                let mut d = digits.clone();
                sort_gaussian(&mut d);
                d.truncate(count);
                Ok(d)
            }
            DigitSet::ComplexPower { p, radius } => complex_power_digits(*p, *radius, count),
            _ => spec("complex digits requested from a real digit set"),
        }
    }

    /// Whether digit one is present, which triggers the two-step rewrite.
    pub fn contains_one(&self) -> bool {
        match self {
            DigitSet::Explicit { digits } => digits.contains(&1),
            DigitSet::FullTruncated { .. } => true,
            DigitSet::ExplicitComplex { digits } => digits.contains(&Gaussian::new(1, 0)),
            _ => false,
        }
    }

    /// Infimum of `t` for which the level-one sum converges.
    pub fn finiteness_parameter(&self) -> f64 {
        match self {
            DigitSet::Power { p, .. } => 1.0 / (2.0 * p),
            DigitSet::ComplexPower { p, .. } => 1.0 / p,
            _ => 0.0,
        }
    }

    /// Ambient dimension of the limit set.
    pub fn ambient_dim(&self) -> usize {
        if self.is_complex() {
            2
        } else {
            1
        }
    }

    /// Interval `[lo, hi]` mapped into itself by every real digit map and
    /// containing the limit set.
    pub fn real_hull(&self) -> Result<(f64, f64)> {
        let all = match self {
            DigitSet::Power { p, l } => {
                let a = floor_pow(*l, *p)? as f64;
                return Ok((0.0, 1.0 / a));
            }
            _ => self.real_digits(usize::MAX)?,
        };
        let a = all[0] as f64;
        let b = *all.last().expect("non-empty") as f64;
        let ab = a * b;
        let x_max = 2.0 * b / (ab + (ab * ab + 4.0 * ab).sqrt());
        let x_min = 1.0 / (b + x_max);
        let lo = (x_min * (1.0 - 1e-12)).max(0.0);
        let hi = (x_max * (1.0 + 1e-12)).min(1.0);
        Ok((lo, hi))
    }

    /// Upper bound on the sum of `R_b^t` over real digits beyond the first
    /// `included` ones; zero for finite sets.
    pub fn real_tail_bound(&self, included: usize, t: f64) -> f64 {
        match self {
            DigitSet::Power { p, l } => {
                let n0 = (*l + included as u64) as f64;
                let e = 2.0 * p * t;
                if e <= 1.0 {
                    return f64::INFINITY;
                }
                let np = n0.powf(*p);
                let first = (np - 1.0).powf(-2.0 * t);
                let integral = (1.0 - 1.0 / np).powf(-2.0 * t) * n0.powf(1.0 - e) / (e - 1.0);
                first + integral
            }
            _ => 0.0,
        }
    }

    /// Upper bound on the sum of `R_b^t` over all complex digits with
    /// modulus at least `m`; zero for finite sets.
    pub fn complex_tail_bound(&self, m: f64, t: f64) -> f64 {
        match self {
            DigitSet::ComplexPower { p, .. } => {
                let k = 2.0 / p;
                if 2.0 * t <= k {
                    return f64::INFINITY;
                }
                let kappa = (m + 1.0) / (m - 0.5);
                2.0 * t * kappa.powf(k) * (m - 0.5).powf(k - 2.0 * t) / (2.0 * t - k)
            }
            _ => 0.0,
        }
    }
}

fn complex_power_digits(p: f64, radius: f64, count: usize) -> Result<Vec<Gaussian>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let r2 = radius * radius;
    let mut k = (2.0f64).max(radius * 2.0);
    loop {
        let mut coords = Vec::new();
        let mut n = 1u64;
        loop {
            let v = floor_pow(n, p)?;
            if v as f64 > k {
                break;
            }
            coords.push(v as i64);
            n += 1;
        }
        let mut found: Vec<Gaussian> = Vec::new();
        for &re in &coords {
            for &im in &coords {
                let m2 = (re as f64) * (re as f64) + (im as f64) * (im as f64);
                if m2 >= r2 && m2 <= k * k {
                    found.push(Gaussian::new(re, im));
                }
            }
        }
        if found.len() >= count {
            sort_gaussian(&mut found);
            found.truncate(count);
            return Ok(found);
        }
        k *= 2.0;
    }
}

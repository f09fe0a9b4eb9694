//! Contraction systems, words and exact per-word geometry.

use num_bigint::{BigInt, BigUint};
use num_complex::{Complex, Complex64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::digits::{DigitSet, Gaussian};
use crate::error::{domain, spec, Error, Result};

const DOMAIN_EPS: f64 = 1e-12;

/// Similarity `x -> ratio * x + translation`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub ratio: f64,
    pub translation: Vec<f64>,
}

impl Similarity {
    pub fn new(ratio: f64, translation: Vec<f64>) -> Result<Self> {
        let s = Similarity { ratio, translation };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return domain(format!("similarity ratio {} not in (0,1)", self.ratio));
        }
        if self.translation.iter().any(|a| !a.is_finite()) {
            return domain("similarity translation must be finite");
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.translation)
            .map(|(xi, ai)| self.ratio * xi + ai)
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        Similarity {
            ratio: self.ratio * inner.ratio,
            translation: self.apply(&inner.translation),
        }
    }

    pub fn fixed_point(&self) -> Result<Vec<f64>> {
        self.validate()?;
        Ok(self
            .translation
            .iter()
            .map(|a| a / (1.0 - self.ratio))
            .collect())
    }
}

/// One contraction of a system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "map", rename_all = "kebab-case")]
pub enum MapSpec {
    Similarity(Similarity),
    /// `x -> 1/(digit + x)`, or `S_1 ∘ S_digit` when prefixed.
    CfReal {
        digit: u64,
        #[serde(default)]
        prefixed: bool,
    },
    /// `z -> 1/(digit + z)`, or `S_1 ∘ S_digit` when prefixed.
    CfComplex {
        digit: Gaussian,
        #[serde(default)]
        prefixed: bool,
    },
}

impl MapSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            MapSpec::Similarity(s) => s.validate(),
            MapSpec::CfReal { digit, prefixed } => {
                if *digit == 0 {
                    return domain("continued-fraction digit must be positive");
                }
                if *digit == 1 && !prefixed {
                    return domain("digit 1 is only a contraction inside a prefixed map");
                }
                Ok(())
            }
            MapSpec::CfComplex { digit, prefixed } => {
                if digit.re < 1 {
                    return domain(format!("complex digit {digit} needs real part >= 1"));
                }
                if *digit == Gaussian::new(1, 0) && !prefixed {
                    return domain("digit 1 is only a contraction inside a prefixed map");
                }
                Ok(())
            }
        }
    }

    /// Raw digits from outermost to innermost.
    pub fn raw_real_digits(&self) -> Vec<u64> {
        match self {
            MapSpec::CfReal {
                digit,
                prefixed: true,
            } => vec![1, *digit],
            MapSpec::CfReal { digit, .. } => vec![*digit],
            _ => Vec::new(),
        }
    }

    pub fn raw_complex_digits(&self) -> Vec<Gaussian> {
        match self {
            MapSpec::CfComplex {
                digit,
                prefixed: true,
            } => vec![Gaussian::new(1, 0), *digit],
            MapSpec::CfComplex { digit, .. } => vec![*digit],
            _ => Vec::new(),
        }
    }

    /// Applies the map to a point (complex points are `[re, im]`).
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            MapSpec::Similarity(s) => s.apply(x),
            MapSpec::CfReal { .. } => {
                let mut v = x[0];
                for d in self.raw_real_digits().iter().rev() {
                    v = 1.0 / (*d as f64 + v);
                }
                vec![v]
            }
            MapSpec::CfComplex { .. } => {
                let mut z = Complex64::new(x[0], x[1]);
                for d in self.raw_complex_digits().iter().rev() {
                    z = (Complex64::new(d.re as f64, d.im as f64) + z).inv();
                }
                vec![z.re, z.im]
            }
        }
    }

    pub fn composite(&self) -> Composite {
        match self {
            MapSpec::Similarity(s) => Composite::Similarity(s.clone()),
            MapSpec::CfReal { .. } => Composite::CfReal(real_continuants(&self.raw_real_digits())),
            MapSpec::CfComplex { .. } => {
                Composite::CfComplex(complex_continuants(&self.raw_complex_digits()))
            }
        }
    }

    pub fn fixed_point(&self) -> Result<Vec<f64>> {
        self.validate()?;
        fixed_point(&self.composite())
    }
}

/// Non-empty sequence of map indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::InvalidWord("empty word".into()));
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

/// Inf and sup bounds of the derivative norm of a composite map.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderBounds {
    pub lower: f64,
    pub upper: f64,
}

fn one() -> usize {
    1
}

fn one_f64() -> f64 {
    1.0
}

/// A contraction system on its compact domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SystemSpec {
    /// Similarities on the cube `[0, domain_side]^ambient_dim`.
    Similarity {
        maps: Vec<Similarity>,
        #[serde(default = "one")]
        ambient_dim: usize,
        #[serde(default = "one_f64")]
        domain_side: f64,
    },
    /// Real continued fractions on `[0, 1]`.
    CfReal { digits: DigitSet },
    /// Complex continued fractions on the disc of centre 1/2 and radius 1/2.
    CfComplex { digits: DigitSet },
}

impl SystemSpec {
    pub fn cf_real(digits: DigitSet) -> Self {
        SystemSpec::CfReal { digits }
    }

    pub fn cf_complex(digits: DigitSet) -> Self {
        SystemSpec::CfComplex { digits }
    }

    pub fn similarity(ratios: &[f64]) -> Result<Self> {
        let maps = ratios
            .iter()
            .map(|&c| Similarity::new(c, vec![0.0]))
            .collect::<Result<Vec<_>>>()?;
        let s = SystemSpec::Similarity {
            maps,
            ambient_dim: 1,
            domain_side: 1.0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SystemSpec::Similarity {
                maps,
                ambient_dim,
                domain_side,
            } => {
                if maps.is_empty() {
                    return spec("similarity system has no maps");
                }
                if *ambient_dim == 0 {
                    return spec("ambient dimension must be at least 1");
                }
                if !(domain_side.is_finite() && *domain_side > 0.0) {
                    return spec("domain side must be positive");
                }
                for (i, m) in maps.iter().enumerate() {
                    m.validate()?;
                    if m.translation.len() != *ambient_dim {
                        return spec(format!("map {i} has wrong translation length"));
                    }
                    for a in &m.translation {
                        if *a < -DOMAIN_EPS || m.ratio * domain_side + a > domain_side + DOMAIN_EPS
                        {
                            return spec(format!("map {i} does not map the domain into itself"));
                        }
                    }
                }
                Ok(())
            }
            SystemSpec::CfReal { digits } => {
                digits.validate()?;
                if digits.is_complex() {
                    return spec("real system given a complex digit set");
                }
                Ok(())
            }
            SystemSpec::CfComplex { digits } => {
                digits.validate()?;
                if !digits.is_complex() {
                    return spec("complex system given a real digit set");
                }
                Ok(())
            }
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            SystemSpec::Similarity { ambient_dim, .. } => *ambient_dim,
            SystemSpec::CfReal { .. } => 1,
            SystemSpec::CfComplex { .. } => 2,
        }
    }

    pub fn digits(&self) -> Option<&DigitSet> {
        match self {
            SystemSpec::CfReal { digits } | SystemSpec::CfComplex { digits } => Some(digits),
            SystemSpec::Similarity { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            SystemSpec::Similarity { .. } => true,
            SystemSpec::CfReal { digits } | SystemSpec::CfComplex { digits } => digits.is_finite(),
        }
    }

    /// Letters generated by the smallest `count` digits (or maps), with the
    /// digit-one rewrite applied.
    pub fn alphabet(&self, count: usize) -> Result<Vec<MapSpec>> {
        match self {
            SystemSpec::Similarity { maps, .. } => Ok(maps
                .iter()
                .take(count)
                .cloned()
                .map(MapSpec::Similarity)
                .collect()),
            SystemSpec::CfReal { digits } => {
                let ds = digits.real_digits(count)?;
                if ds.contains(&1) {
                    let mut out: Vec<MapSpec> = ds
                        .iter()
                        .filter(|&&b| b != 1)
                        .map(|&b| MapSpec::CfReal {
                            digit: b,
                            prefixed: false,
                        })
                        .collect();
                    out.extend(ds.iter().map(|&b| MapSpec::CfReal {
                        digit: b,
                        prefixed: true,
                    }));
                    Ok(out)
                } else {
                    Ok(ds
                        .into_iter()
                        .map(|b| MapSpec::CfReal {
                            digit: b,
                            prefixed: false,
                        })
                        .collect())
                }
            }
            SystemSpec::CfComplex { digits } => {
                let ds = digits.complex_digits(count)?;
                let unit = Gaussian::new(1, 0);
                if ds.contains(&unit) {
                    let mut out: Vec<MapSpec> = ds
                        .iter()
                        .filter(|&&b| b != unit)
                        .map(|&b| MapSpec::CfComplex {
                            digit: b,
                            prefixed: false,
                        })
                        .collect();
                    out.extend(ds.iter().map(|&b| MapSpec::CfComplex {
                        digit: b,
                        prefixed: true,
                    }));
                    Ok(out)
                } else {
                    Ok(ds
                        .into_iter()
                        .map(|b| MapSpec::CfComplex {
                            digit: b,
                            prefixed: false,
                        })
                        .collect())
                }
            }
        }
    }

    /// Alphabet used for a given digit truncation: finite systems ignore it.
    pub fn truncated_alphabet(&self, truncation: usize) -> Result<Vec<MapSpec>> {
        if self.is_finite() {
            self.alphabet(usize::MAX)
        } else {
            self.alphabet(truncation)
        }
    }

    fn letters_for(&self, word: &Word) -> Result<Vec<MapSpec>> {
        let need = word.letters().iter().max().map_or(0, |m| m + 1);
        let letters = self.truncated_alphabet(need)?;
        if need > letters.len() {
            return Err(Error::InvalidWord(format!(
                "index {} outside alphabet of size {}",
                need - 1,
                letters.len()
            )));
        }
        Ok(letters)
    }

    pub fn domain_contains(&self, x: &[f64]) -> bool {
        if x.len() != self.ambient_dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self {
            SystemSpec::Similarity { domain_side, .. } => x
                .iter()
                .all(|v| *v >= -DOMAIN_EPS && *v <= domain_side + DOMAIN_EPS),
            SystemSpec::CfReal { .. } => x[0] >= -DOMAIN_EPS && x[0] <= 1.0 + DOMAIN_EPS,
            SystemSpec::CfComplex { .. } => (x[0] - 0.5).hypot(x[1]) <= 0.5 + DOMAIN_EPS,
        }
    }

    pub fn domain_center(&self) -> Vec<f64> {
        match self {
            SystemSpec::Similarity {
                ambient_dim,
                domain_side,
                ..
            } => vec![domain_side / 2.0; *ambient_dim],
            SystemSpec::CfReal { .. } => vec![0.5],
            SystemSpec::CfComplex { .. } => vec![0.5, 0.0],
        }
    }
}

/// Continuants of a composite Möbius map `(p_prev x + p)/(q_prev x + q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Continuants<T> {
    pub p_prev: T,
    pub p: T,
    pub q_prev: T,
    pub q: T,
}

/// Parameters of a composite map `S_w`.
#[derive(Clone, Debug, PartialEq)]
pub enum Composite {
    Similarity(Similarity),
    CfReal(Continuants<BigUint>),
    CfComplex(Continuants<Complex<BigInt>>),
}

pub fn real_continuants(raw: &[u64]) -> Continuants<BigUint> {
    let mut c = Continuants {
        p_prev: BigUint::one(),
        p: BigUint::zero(),
        q_prev: BigUint::zero(),
        q: BigUint::one(),
    };
    for &a in raw {
        let a = BigUint::from(a);
        let p_next = &a * &c.p + &c.p_prev;
        let q_next = &a * &c.q + &c.q_prev;
        c.p_prev = std::mem::replace(&mut c.p, p_next);
        c.q_prev = std::mem::replace(&mut c.q, q_next);
    }
    c
}

pub fn complex_continuants(raw: &[Gaussian]) -> Continuants<Complex<BigInt>> {
    let one = Complex::new(BigInt::one(), BigInt::zero());
    let zero = Complex::new(BigInt::zero(), BigInt::zero());
    let mut c = Continuants {
        p_prev: one.clone(),
        p: zero.clone(),
        q_prev: zero,
        q: one,
    };
    for a in raw {
        let a = Complex::new(BigInt::from(a.re), BigInt::from(a.im));
        let p_next = &a * &c.p + &c.p_prev;
        let q_next = &a * &c.q + &c.q_prev;
        c.p_prev = std::mem::replace(&mut c.p, p_next);
        c.q_prev = std::mem::replace(&mut c.q, q_next);
    }
    c
}

/// Converts integers sharing a common scale to `f64` after dividing by
/// `2^shift`; returns the scaled values and `shift`.
fn scaled(values: &[&BigInt]) -> (Vec<f64>, u64) {
    let bits = values.iter().map(|v| v.bits()).max().unwrap_or(0);
    let shift = bits.saturating_sub(500);
    let vals = values
        .iter()
        .map(|v| {
            let s: BigInt = (*v).clone() >> shift;
            s.to_f64().unwrap_or(f64::NAN)
        })
        .collect();
    (vals, shift)
}

impl Continuants<BigUint> {
    fn scaled(&self) -> ([f64; 4], u64) {
        let v: Vec<BigInt> = [&self.p_prev, &self.p, &self.q_prev, &self.q]
            .iter()
            .map(|x| BigInt::from((*x).clone()))
            .collect();
        let (s, shift) = scaled(&v.iter().collect::<Vec<_>>());
        ([s[0], s[1], s[2], s[3]], shift)
    }
}

impl Continuants<Complex<BigInt>> {
    fn scaled(&self) -> ([Complex64; 4], u64) {
        let parts = [
            &self.p_prev.re,
            &self.p_prev.im,
            &self.p.re,
            &self.p.im,
            &self.q_prev.re,
            &self.q_prev.im,
            &self.q.re,
            &self.q.im,
        ];
        let (s, shift) = scaled(&parts);
        (
            [
                Complex64::new(s[0], s[1]),
                Complex64::new(s[2], s[3]),
                Complex64::new(s[4], s[5]),
                Complex64::new(s[6], s[7]),
            ],
            shift,
        )
    }
}

impl Composite {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Composite::Similarity(s) => s.apply(x),
            Composite::CfReal(c) => {
                let ([pp, p, qp, q], _) = c.scaled();
                vec![(pp * x[0] + p) / (qp * x[0] + q)]
            }
            Composite::CfComplex(c) => {
                let ([pp, p, qp, q], _) = c.scaled();
                let z = Complex64::new(x[0], x[1]);
                let w = (pp * z + p) / (qp * z + q);
                vec![w.re, w.im]
            }
        }
    }
}

fn resolve(letters: &[MapSpec], word: &Word) -> Vec<MapSpec> {
    word.letters().iter().map(|&i| letters[i].clone()).collect()
}

/// Composite parameters of `S_w = S_{w_1} ∘ ... ∘ S_{w_n}`.
pub fn compose_word(system: &SystemSpec, word: &Word) -> Result<Composite> {
    let letters = system.letters_for(word)?;
    let maps = resolve(&letters, word);
    Ok(match system {
        SystemSpec::Similarity { ambient_dim, .. } => {
            let mut acc = Similarity {
                ratio: 1.0,
                translation: vec![0.0; *ambient_dim],
            };
            for m in maps.iter().rev() {
                if let MapSpec::Similarity(s) = m {
                    acc = s.compose(&acc);
                }
            }
            Composite::Similarity(acc)
        }
        SystemSpec::CfReal { .. } => {
            let raw: Vec<u64> = maps.iter().flat_map(|m| m.raw_real_digits()).collect();
            Composite::CfReal(real_continuants(&raw))
        }
        SystemSpec::CfComplex { .. } => {
            let raw: Vec<Gaussian> = maps.iter().flat_map(|m| m.raw_complex_digits()).collect();
            Composite::CfComplex(complex_continuants(&raw))
        }
    })
}

/// Derivative-norm bounds of a composite over an interval `[lo, hi] ⊂ [0, 1]`
/// (real), the disc (complex) or anywhere (similarity).
pub fn composite_bounds(c: &Composite, lo: f64, hi: f64) -> CylinderBounds {
    match c {
        Composite::Similarity(s) => CylinderBounds {
            lower: s.ratio,
            upper: s.ratio,
        },
        Composite::CfReal(k) => {
            let ([_, _, qp, q], shift) = k.scaled();
            let ln2 = std::f64::consts::LN_2;
            let at = |x: f64| (-2.0 * ((qp * x + q).ln() + shift as f64 * ln2)).exp();
            CylinderBounds {
                lower: at(hi),
                upper: at(lo),
            }
        }
        Composite::CfComplex(k) => {
            let ([_, _, qp, q], shift) = k.scaled();
            let centre = (qp * 0.5 + q).norm();
            let r = qp.norm() * 0.5;
            let ln2 = std::f64::consts::LN_2;
            let f = |m: f64| (-2.0 * (m.ln() + shift as f64 * ln2)).exp();
            CylinderBounds {
                lower: f(centre + r),
                upper: f(centre - r),
            }
        }
    }
}

/// Inf and sup of `|S_w'|` over the system's domain.
pub fn word_norm_bounds(system: &SystemSpec, word: &Word) -> Result<CylinderBounds> {
    let c = compose_word(system, word)?;
    Ok(composite_bounds(&c, 0.0, 1.0))
}

/// Fixed point of a contraction given by composite parameters.
pub fn fixed_point(map: &Composite) -> Result<Vec<f64>> {
    match map {
        Composite::Similarity(s) => s.fixed_point(),
        Composite::CfReal(k) => {
            if k.q_prev.is_zero() {
                return domain("identity composite has no unique fixed point");
            }
            let ([pp, p, qp, q], _) = k.scaled();
            if qp == 1.0 && q == 1.0 && pp == 0.0 {
                return domain("the map 1/(1+x) is not a contraction on [0,1]");
            }
            let b = q - pp;
            let disc = b * b + 4.0 * qp * p;
            Ok(vec![2.0 * p / (b + disc.sqrt())])
        }
        Composite::CfComplex(k) => {
            if k.q_prev.re.is_zero() && k.q_prev.im.is_zero() {
                return domain("identity composite has no unique fixed point");
            }
            if k.q == Complex::new(BigInt::one(), BigInt::zero())
                && k.q_prev == k.q
                && k.p_prev.re.is_zero()
                && k.p_prev.im.is_zero()
            {
                return domain("the map 1/(1+z) is not a contraction on the disc");
            }
            let ([pp, p, qp, q], _) = k.scaled();
            let b = q - pp;
            let s = (b * b + qp * p * 4.0).sqrt();
            let centre = Complex64::new(0.5, 0.0);
            let cands = [p * 2.0 / (b + s), p * 2.0 / (b - s)];
            let best = cands
                .iter()
                .filter(|z| z.is_finite())
                .min_by(|a, b| (*a - centre).norm().total_cmp(&(*b - centre).norm()))
                .copied()
                .ok_or_else(|| Error::Domain("no finite fixed point".into()))?;
            Ok(vec![best.re, best.im])
        }
    }
}

/// `S_w(anchor)`, evaluated letter by letter.
pub fn evaluate_point(system: &SystemSpec, word: &Word, anchor: &[f64]) -> Result<Vec<f64>> {
    if !system.domain_contains(anchor) {
        return domain(format!("anchor {anchor:?} outside the system domain"));
    }
    let letters = system.letters_for(word)?;
    Ok(apply_word(&letters, word.letters(), anchor))
}

/// Applies `letters[w_1] ∘ ... ∘ letters[w_n]` to `x`.
pub fn apply_word(letters: &[MapSpec], word: &[usize], x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    for &i in word.iter().rev() {
        v = letters[i].apply(&v);
    }
    v
}

/// Sign-aware helper used by tests of complex continuants.
pub fn gaussian_to_f64(z: &Complex<BigInt>) -> Complex64 {
    let sign = |b: &BigInt| if b.is_negative() { -1.0 } else { 1.0 };
    Complex64::new(
        sign(&z.re) * z.re.abs().to_f64().unwrap_or(f64::INFINITY),
        sign(&z.im) * z.im.abs().to_f64().unwrap_or(f64::INFINITY),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two() -> SystemSpec {
        SystemSpec::cf_real(DigitSet::Explicit { digits: vec![2, 3] })
    }

    #[test]
    fn similarity_composition() {
        let sys = SystemSpec::similarity(&[0.5]).unwrap();
        let c = compose_word(&sys, &Word::new(vec![0, 0]).unwrap()).unwrap();
        assert_eq!(
            c,
            Composite::Similarity(Similarity {
                ratio: 0.25,
                translation: vec![0.0]
            })
        );
    }

    #[test]
    fn cf_word_two_two() {
        let c = compose_word(&two(), &Word::new(vec![0, 0]).unwrap()).unwrap();
        match &c {
            Composite::CfReal(k) => {
                assert_eq!(k.q_prev, BigUint::from(2u32));
                assert_eq!(k.q, BigUint::from(5u32));
                assert_eq!(k.p_prev, BigUint::from(1u32));
                assert_eq!(k.p, BigUint::from(2u32));
            }
            _ => panic!("wrong composite"),
        }
        for x in [0.0, 0.3, 1.0] {
            assert_abs_diff_eq!(
                c.apply(&[x])[0],
                (2.0 + x) / (5.0 + 2.0 * x),
                epsilon = 1e-15
            );
        }
        let b = word_norm_bounds(&two(), &Word::new(vec![0, 0]).unwrap()).unwrap();
        assert_abs_diff_eq!(b.lower, 1.0 / 49.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.upper, 1.0 / 25.0, epsilon = 1e-15);
    }

    #[test]
    fn cf_single_digit() {
        let c = compose_word(&two(), &Word::new(vec![1]).unwrap()).unwrap();
        assert_abs_diff_eq!(c.apply(&[0.25])[0], 1.0 / 3.25, epsilon = 1e-15);
        let b = word_norm_bounds(&two(), &Word::new(vec![0]).unwrap()).unwrap();
        assert_abs_diff_eq!(b.lower, 1.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.upper, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn similarity_bounds_are_products() {
        let sys = SystemSpec::similarity(&[1.0 / 3.0, 1.0 / 3.0]).unwrap();
        let b = word_norm_bounds(&sys, &Word::new(vec![0, 1]).unwrap()).unwrap();
        assert_abs_diff_eq!(b.lower, 1.0 / 9.0, epsilon = 1e-15);
        assert_eq!(b.lower, b.upper);
    }

    #[test]
    fn unknown_index_is_invalid_word() {
        let err = compose_word(&two(), &Word::new(vec![2]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InvalidWord(_)));
        assert!(Word::new(vec![]).is_err());
    }

    #[test]
    fn fixed_points() {
        let s = MapSpec::Similarity(Similarity::new(0.5, vec![0.3]).unwrap());
        assert_abs_diff_eq!(s.fixed_point().unwrap()[0], 0.6, epsilon = 1e-15);
        let s = MapSpec::Similarity(Similarity::new(0.25, vec![0.0]).unwrap());
        assert_eq!(s.fixed_point().unwrap()[0], 0.0);
        let cf = MapSpec::CfReal {
            digit: 2,
            prefixed: false,
        };
        assert_abs_diff_eq!(
            cf.fixed_point().unwrap()[0],
            2f64.sqrt() - 1.0,
            epsilon = 1e-15
        );
        assert!(MapSpec::CfReal {
            digit: 1,
            prefixed: false
        }
        .fixed_point()
        .is_err());
        assert!(MapSpec::Similarity(Similarity {
            ratio: 1.0,
            translation: vec![0.0]
        })
        .fixed_point()
        .is_err());
    }

    #[test]
    fn complex_fixed_point_is_fixed() {
        let m = MapSpec::CfComplex {
            digit: Gaussian::new(2, 1),
            prefixed: false,
        };
        let z = m.fixed_point().unwrap();
        let w = m.apply(&z);
        assert_abs_diff_eq!(z[0], w[0], epsilon = 1e-14);
        assert_abs_diff_eq!(z[1], w[1], epsilon = 1e-14);
        assert!((z[0] - 0.5).hypot(z[1]) <= 0.5);
    }

    #[test]
    fn evaluate_examples() {
        let sys = SystemSpec::cf_real(DigitSet::Explicit { digits: vec![2] });
        let w = Word::new(vec![0; 20]).unwrap();
        let x = evaluate_point(&sys, &w, &[0.0]).unwrap()[0];
        assert!((x - (2f64.sqrt() - 1.0)).abs() < 1e-8);
        let sim = SystemSpec::similarity(&[0.5]).unwrap();
        let y = evaluate_point(&sim, &Word::new(vec![0; 10]).unwrap(), &[1.0]).unwrap()[0];
        assert_eq!(y, 2f64.powi(-10));
        assert!(evaluate_point(&sys, &w, &[1.5]).is_err());
    }

    #[test]
    fn digit_one_rewrite() {
        let sys = SystemSpec::cf_real(DigitSet::Explicit { digits: vec![1, 2] });
        let a = sys.alphabet(usize::MAX).unwrap();
        assert_eq!(
            a,
            vec![
                MapSpec::CfReal {
                    digit: 2,
                    prefixed: false
                },
                MapSpec::CfReal {
                    digit: 1,
                    prefixed: true
                },
                MapSpec::CfReal {
                    digit: 2,
                    prefixed: true
                },
            ]
        );
        // S_1 ∘ S_2 (x) = 1/(1 + 1/(2+x)) = (2+x)/(3+x)
        let c = compose_word(&sys, &Word::new(vec![2]).unwrap()).unwrap();
        assert_abs_diff_eq!(c.apply(&[0.5])[0], 2.5 / 3.5, epsilon = 1e-15);
        assert!(a.iter().all(|m| m.validate().is_ok()));
    }

    #[test]
    fn complex_bounds_single_digit() {
        let sys = SystemSpec::cf_complex(DigitSet::ExplicitComplex {
            digits: vec![Gaussian::new(2, 0)],
        });
        let b = word_norm_bounds(&sys, &Word::new(vec![0]).unwrap()).unwrap();
        assert_abs_diff_eq!(b.upper, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(b.lower, 1.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn json_roundtrip() {
        let s: SystemSpec =
            serde_json::from_str(r#"{"kind":"cf-real","digits":{"type":"power","p":2.0,"l":5}}"#)
                .unwrap();
        assert_eq!(s, SystemSpec::cf_real(DigitSet::Power { p: 2.0, l: 5 }));
        let sim = SystemSpec::similarity(&[0.25, 0.25]).unwrap();
        let back: SystemSpec = serde_json::from_str(&serde_json::to_string(&sim).unwrap()).unwrap();
        assert_eq!(back, sim);
    }

    #[test]
    fn deep_words_keep_positive_bounds() {
        let sys = SystemSpec::cf_real(DigitSet::Explicit { digits: vec![7] });
        let b = word_norm_bounds(&sys, &Word::new(vec![0; 500]).unwrap()).unwrap();
        assert!(b.lower <= b.upper && !b.lower.is_nan());
        let c = compose_word(&sys, &Word::new(vec![0; 500]).unwrap()).unwrap();
        let fp = fixed_point(&c).unwrap()[0];
        let single = MapSpec::CfReal {
            digit: 7,
            prefixed: false,
        }
        .fixed_point()
        .unwrap()[0];
        assert_abs_diff_eq!(fp, single, epsilon = 1e-12);
    }

    #[test]
    fn complex_continuant_values() {
        let k = complex_continuants(&[Gaussian::new(1, 1), Gaussian::new(2, 0)]);
        assert_eq!(gaussian_to_f64(&k.q), Complex64::new(3.0, 2.0));
    }
}

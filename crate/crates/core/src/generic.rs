//! Random-translation similarity systems and Monte Carlo density and
//! box-dimension experiments on their attractors.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bracket::DimBracket;
use crate::cover::{
    box_count_points, box_dim_regression_with, BoxCountSeries, BoxEntry, RegressionConfig,
};
use crate::error::{spec, Error, Result};
use crate::ifs::{MapSpec, Similarity, SystemSpec};
use crate::pressure::RatioFamily;

/// Random-translation system `S_i(x) = c_i x + t_i` with `t_i` uniform on
/// `[0, window)^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomSystemSpec {
    pub ratios: RatioFamily,
    pub ambient_dim: usize,
    pub window: f64,
    pub truncation: usize,
    pub seed: u64,
}

pub const DEFAULT_MAPS: usize = 20_000;

impl Default for RandomSystemSpec {
    fn default() -> Self {
        RandomSystemSpec {
            ratios: RatioFamily::DyadicBlocks { first_exponent: 3 },
            ambient_dim: 2,
            window: 1.0,
            truncation: DEFAULT_MAPS,
            seed: 0,
        }
    }
}

impl RandomSystemSpec {
    pub fn validate(&self) -> Result<()> {
        self.ratios.validate()?;
        if self.ambient_dim == 0 {
            return spec("ambient dimension must be at least 1");
        }
        if !(self.window > 0.0 && self.window <= 1.0) {
            return spec(format!("window {} outside (0,1]", self.window));
        }
        if self.truncation == 0 {
            return spec("at least one map must be realised");
        }
        Ok(())
    }
}

/// Samples the translations and returns the similarity system on
/// `[0, 1 + window]^d`.
pub fn realize_system(rs: &RandomSystemSpec) -> Result<SystemSpec> {
    rs.validate()?;
    let n = rs
        .ratios
        .len()
        .map_or(rs.truncation, |l| l.min(rs.truncation));
    let side = 1.0 + rs.window;
    let mut rng = ChaCha8Rng::seed_from_u64(rs.seed);
    let mut maps = Vec::with_capacity(n);
    for i in 0..n {
        let c = rs.ratios.ratio(i).expect("index within family");
        if !(c > 0.0 && c < 1.0) {
            return spec(format!("map {i}: ratio {c} not in (0,1)"));
        }
        if c * side > 1.0 {
            return spec(format!(
                "map {i}: ratio {c} does not send [0,{side}]^d into [0,1]^d"
            ));
        }
        let t: Vec<f64> = (0..rs.ambient_dim)
            .map(|_| rng.gen::<f64>() * rs.window)
            .collect();
        maps.push(Similarity {
            ratio: c,
            translation: t,
        });
    }
    let sys = SystemSpec::Similarity {
        maps,
        ambient_dim: rs.ambient_dim,
        domain_side: side,
    };
    sys.validate()?;
    Ok(sys)
}

/// Both sides of `fix(g+u) ∈ B(q,δ) ⟺ u ∈ B(q − g(fix(g+u)), δ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub left: bool,
    pub right: bool,
    pub fixed_point: Vec<f64>,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn fixed_point_lemma_check(
    g: &Similarity,
    u: &[f64],
    q: &[f64],
    delta: f64,
) -> Result<LemmaCheck> {
    g.validate()?;
    if u.len() != g.translation.len() || q.len() != u.len() {
        return spec("g, u and q must share the ambient dimension");
    }
    let shifted = Similarity {
        ratio: g.ratio,
        translation: g.translation.iter().zip(u).map(|(a, b)| a + b).collect(),
    };
    let fix = shifted.fixed_point()?;
    let g_fix = g.apply(&fix);
    let centre: Vec<f64> = q.iter().zip(&g_fix).map(|(a, b)| a - b).collect();
    Ok(LemmaCheck {
        left: dist(&fix, q) < delta,
        right: dist(u, &centre) < delta,
        fixed_point: fix,
    })
}

/// Generator for sample `index` of the stream seeded by `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A sampled word with its image of the anchor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub word: Vec<usize>,
    pub point: Vec<f64>,
}

/// Draws `num` i.i.d. uniform words of length `depth` over `letters` and
/// evaluates each at `anchor`. Sample `k` depends only on `(seed, k)`.
pub fn sample_words(
    letters: &[MapSpec],
    num: usize,
    depth: usize,
    seed: u64,
    anchor: &[f64],
) -> Result<Vec<Sample>> {
    if letters.is_empty() {
        return Err(Error::EmptyInput("empty alphabet".into()));
    }
    if depth == 0 {
        return spec("depth must be at least 1");
    }
    Ok((0..num)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k as u64);
            let word: Vec<usize> = (0..depth)
                .map(|_| rng.gen_range(0..letters.len()))
                .collect();
            let point = crate::ifs::apply_word(letters, &word, anchor);
            Sample { word, point }
        })
        .collect())
}

pub const DEFAULT_DEPTH: usize = 40;

/// Points `S_{w_1} ∘ ... ∘ S_{w_depth}(centre)` for uniform random words.
pub fn sample_attractor(
    system: &SystemSpec,
    num: usize,
    depth: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let letters = system.alphabet(usize::MAX)?;
    let anchor = system.domain_center();
    Ok(sample_words(&letters, num, depth, seed, &anchor)?
        .into_iter()
        .map(|s| s.point)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub delta: f64,
    pub fraction_hit: f64,
    pub num_samples: usize,
    pub cells_hit: usize,
    pub cells_total: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn cells_per_axis(window: f64, delta: f64) -> Result<usize> {
    if !(delta > 0.0 && window > 0.0) {
        return Err(Error::Misaligned(
            "scale and window must be positive".into(),
        ));
    }
    let k = window / delta;
    let r = k.round();
    if r < 1.0 || (k - r).abs() > 1e-9 * k.max(1.0) {
        return Err(Error::Misaligned(format!(
            "scale {delta} does not divide window {window}"
        )));
    }
    Ok(r as usize)
}

/// Grid cells of `z + [0, window)^d` at scale `delta` met by `points`.
fn window_cells(points: &[Vec<f64>], z: &[f64], delta: f64, k: usize) -> HashSet<Vec<usize>> {
    let window = k as f64 * delta;
    points
        .iter()
        .filter_map(|p| {
            let mut cell = Vec::with_capacity(z.len());
            for (x, zc) in p.iter().zip(z) {
                let r = x - zc;
                if !(r >= 0.0 && r < window) {
                    return None;
                }
                cell.push(((r / delta).floor() as usize).min(k - 1));
            }
            Some(cell)
        })
        .collect()
}

/// Fraction of the `delta`-cells of `z + [0, window)^d` holding a point.
pub fn density_fraction(
    points: &[Vec<f64>],
    z: &[f64],
    delta: f64,
    window: f64,
) -> Result<DensityReport> {
    let k = cells_per_axis(window, delta)?;
    let total = k
        .checked_pow(z.len() as u32)
        .ok_or_else(|| Error::Misaligned("too many cells".into()))?;
    let hit = window_cells(points, z, delta, k).len();
    Ok(DensityReport {
        delta,
        fraction_hit: hit as f64 / total as f64,
        num_samples: points.len(),
        cells_hit: hit,
        cells_total: total,
        seed: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Box-counting scales; each must divide the window.
    pub scales: Vec<f64>,
    pub num_samples: usize,
    pub seeds: Vec<u64>,
    pub depth: usize,
    /// Scale of the separate density measurement.
    pub density_delta: f64,
    pub density_threshold: f64,
    /// Corner of the observation window; the origin when absent.
    pub z: Option<Vec<f64>>,
    /// A seed passes the box test when its lower slope is at least `d − slack`.
    pub slack: f64,
}

pub const MIN_SPAN_DECADES: f64 = 0.5;
pub const MIN_SCALES: usize = 3;

impl ExperimentConfig {
    /// Defaults for ambient dimension `d`.
    pub fn for_dim(d: usize) -> Self {
        let scales = if d == 1 {
            (2..=8).map(|k| 2f64.powi(-k)).collect()
        } else {
            (1..=4).map(|k| 2f64.powi(-k)).collect()
        };
        ExperimentConfig {
            scales,
            num_samples: 100_000,
            seeds: (0..10).collect(),
            depth: DEFAULT_DEPTH,
            density_delta: 1.0 / 32.0,
            density_threshold: 0.99,
            z: None,
            slack: 0.1 * d as f64,
        }
    }

    fn guard(&self, d: usize, window: f64) -> Result<()> {
        if self.scales.len() < MIN_SCALES {
            return Err(Error::Guard(format!("need at least {MIN_SCALES} scales")));
        }
        let hi = self
            .scales
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let lo = self.scales.iter().cloned().fold(f64::INFINITY, f64::min);
        if (hi / lo).log10() + 1e-9 < MIN_SPAN_DECADES {
            return Err(Error::Guard(format!(
                "scales must span at least {MIN_SPAN_DECADES} decades"
            )));
        }
        let need = 100.0 * lo.powf(-(d as f64));
        if (self.num_samples as f64) < need {
            return Err(Error::Guard(format!(
                "{} samples is below 100 x delta_min^-d = {need}; use more samples or coarser scales",
                self.num_samples
            )));
        }
        for s in &self.scales {
            cells_per_axis(window, *s)?;
        }
        cells_per_axis(window, self.density_delta)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedResult {
    pub seed: u64,
    pub bracket: DimBracket,
    pub series: BoxCountSeries,
    pub density: DensityReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub ambient_dim: usize,
    pub maps: usize,
    pub per_seed: Vec<SeedResult>,
    pub box_threshold: f64,
    pub box_pass_fraction: f64,
    pub density_pass_fraction: f64,
    pub joint_pass_fraction: f64,
}

fn relaxed() -> RegressionConfig {
    RegressionConfig {
        min_entries: MIN_SCALES,
        min_decades: MIN_SPAN_DECADES,
    }
}

/// Box-counting slope and density of one realised system inside `z + [0, window)^d`.
pub fn seed_experiment(
    system: &SystemSpec,
    window: f64,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<SeedResult> {
    let d = system.ambient_dim();
    let z = config.z.clone().unwrap_or_else(|| vec![0.0; d]);
    let points = sample_attractor(system, config.num_samples, config.depth, seed)?;
    let inside: Vec<Vec<f64>> = points
        .iter()
        .filter(|p| {
            p.iter()
                .zip(&z)
                .all(|(x, zc)| *x >= *zc && *x < zc + window)
        })
        .map(|p| p.iter().zip(&z).map(|(x, zc)| x - zc).collect())
        .collect();
    let mut scales = config.scales.clone();
    scales.sort_by(|a, b| b.total_cmp(a));
    let entries = scales
        .iter()
        .map(|&delta| {
            let count = if inside.is_empty() {
                1
            } else {
                box_count_points(&inside, delta)?
            };
            Ok(BoxEntry { delta, count })
        })
        .collect::<Result<Vec<_>>>()?;
    let series = BoxCountSeries::new(entries)?;
    let bracket = box_dim_regression_with(&series, relaxed())?.bracket;
    let mut density = density_fraction(&points, &z, config.density_delta, window)?;
    density.seed = Some(seed);
    Ok(SeedResult {
        seed,
        bracket,
        series,
        density,
    })
}

/// Seed ensemble: one realised system and one sample cloud per seed.
pub fn generic_box_dim_experiment(
    rs: &RandomSystemSpec,
    config: &ExperimentConfig,
) -> Result<ExperimentReport> {
    rs.validate()?;
    let d = rs.ambient_dim;
    config.guard(d, rs.window)?;
    if config.seeds.is_empty() {
        return Err(Error::Guard("no seeds".into()));
    }
    let per_seed = config
        .seeds
        .par_iter()
        .map(|&seed| {
            let spec = RandomSystemSpec { seed, ..rs.clone() };
            let system = realize_system(&spec)?;
            seed_experiment(&system, rs.window, config, seed.wrapping_add(0x9e37_79b9))
        })
        .collect::<Result<Vec<_>>>()?;
    let threshold = d as f64 - config.slack;
    let n = per_seed.len() as f64;
    let box_ok = |r: &SeedResult| r.bracket.lower >= threshold;
    let dens_ok = |r: &SeedResult| r.density.fraction_hit >= config.density_threshold;
    let maps = match &rs.ratios {
        RatioFamily::Finite { ratios } => ratios.len().min(rs.truncation),
        _ => rs.truncation,
    };
    Ok(ExperimentReport {
        ambient_dim: d,
        maps,
        box_threshold: threshold,
        box_pass_fraction: per_seed.iter().filter(|r| box_ok(r)).count() as f64 / n,
        density_pass_fraction: per_seed.iter().filter(|r| dens_ok(r)).count() as f64 / n,
        joint_pass_fraction: per_seed.iter().filter(|r| box_ok(r) && dens_ok(r)).count() as f64 / n,
        per_seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn realisation_is_deterministic_and_contained() {
        let rs = RandomSystemSpec {
            ratios: RatioFamily::Geometric {
                first: 0.125,
                factor: 0.5,
            },
            ambient_dim: 1,
            window: 1.0,
            truncation: 10,
            seed: 7,
        };
        let a = realize_system(&rs).unwrap();
        let b = realize_system(&rs).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        match a {
            SystemSpec::Similarity { maps, .. } => {
                assert_eq!(maps.len(), 10);
                assert!(maps.iter().all(|m| m.ratio <= 0.125));
            }
            _ => unreachable!(),
        }
        let half = RandomSystemSpec {
            window: 0.5,
            ambient_dim: 2,
            ..rs
        };
        match realize_system(&half).unwrap() {
            SystemSpec::Similarity { maps, .. } => assert!(maps
                .iter()
                .all(|m| m.translation.iter().all(|t| *t >= 0.0 && *t < 0.5))),
            _ => unreachable!(),
        }
    }

    #[test]
    fn containment_violation_names_index() {
        let rs = RandomSystemSpec {
            ratios: RatioFamily::Finite {
                ratios: vec![0.25, 0.6],
            },
            ambient_dim: 1,
            window: 1.0,
            truncation: 5,
            seed: 0,
        };
        match realize_system(&rs) {
            Err(Error::Spec(m)) => assert!(m.starts_with("map 1")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lemma_examples() {
        let g = Similarity::new(0.5, vec![0.0]).unwrap();
        let a = fixed_point_lemma_check(&g, &[0.3], &[0.6], 0.01).unwrap();
        assert!(a.left && a.right);
        assert_eq!(a.fixed_point, vec![0.6]);
        let b = fixed_point_lemma_check(&g, &[0.3], &[0.0], 0.1).unwrap();
        assert!(!b.left && !b.right);
    }

    #[test]
    fn density_examples() {
        let centres: Vec<Vec<f64>> = (0..4)
            .flat_map(|i| (0..4).map(move |j| vec![(i as f64 + 0.5) / 4.0, (j as f64 + 0.5) / 4.0]))
            .collect();
        let r = density_fraction(&centres, &[0.0, 0.0], 0.25, 1.0).unwrap();
        assert_eq!(r.fraction_hit, 1.0);
        let e = density_fraction(&[], &[0.0, 0.0], 0.25, 1.0).unwrap();
        assert_eq!(e.fraction_hit, 0.0);
        assert!(matches!(
            density_fraction(&centres, &[0.0, 0.0], 0.3, 1.0),
            Err(Error::Misaligned(_))
        ));
    }

    #[test]
    fn single_map_samples_collapse() {
        let sys = SystemSpec::similarity(&[0.5]).unwrap();
        let pts = sample_attractor(&sys, 20, 30, 1).unwrap();
        assert!(pts.iter().all(|p| p[0].abs() <= 0.5f64.powi(30)));
    }

    #[test]
    fn samples_reproducible_by_index() {
        let rs = RandomSystemSpec {
            ratios: RatioFamily::Geometric {
                first: 0.125,
                factor: 0.5,
            },
            ambient_dim: 1,
            truncation: 10,
            ..Default::default()
        };
        let sys = realize_system(&rs).unwrap();
        let all = sample_attractor(&sys, 50, DEFAULT_DEPTH, 3).unwrap();
        let letters = sys.alphabet(usize::MAX).unwrap();
        let mut rng = sample_rng(3, 17);
        let word: Vec<usize> = (0..DEFAULT_DEPTH)
            .map(|_| rng.gen_range(0..letters.len()))
            .collect();
        let again = crate::ifs::apply_word(&letters, &word, &sys.domain_center());
        assert_eq!(all[17], again);
    }

    #[test]
    fn guard_rejects_thin_sampling() {
        let mut cfg = ExperimentConfig::for_dim(2);
        cfg.num_samples = 1000;
        let rs = RandomSystemSpec::default();
        assert!(matches!(
            generic_box_dim_experiment(&rs, &cfg),
            Err(Error::Guard(_))
        ));
    }
}

//! Brute-force maximisation of `|a_2|`, `|a_3|`, `|a_3 - μ a_2²|` over
//! Carathéodory data, compared against the closed-form bounds.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_fs, BoundReport, Branch};
use crate::caratheodory::{CaratheodoryPair, Family, FamilyDraw};
use crate::classes::{
    synthesis_weights, synthesize_with, ClassSpec, ClassTag, SynthesisResult, SynthesisWeights,
};
use crate::error::{Error, Result};
use crate::series::C64;

/// Samples per parallel work unit; each unit owns one ChaCha stream.
pub const CHUNK: usize = 4096;
pub const MAX_GRID_STEPS: usize = 64;
/// Truncation length of sampled pairs. Only `c_1, c_2, d_1, d_2` enter the
/// synthesis.
pub const PROBE_PAIR_LEN: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub spec: ClassSpec,
    pub samples: u64,
    pub max_a2: f64,
    pub max_a3: f64,
    pub max_fs: f64,
    pub ratio_a2: f64,
    pub ratio_a3: f64,
    pub ratio_fs: f64,
    /// Pair attaining `max_a2`.
    pub argmax: CaratheodoryPair,
    pub argmax_a3: CaratheodoryPair,
    pub argmax_fs: CaratheodoryPair,
}

impl ProbeResult {
    pub fn max_ratio(&self) -> f64 {
        self.ratio_a2.max(self.ratio_a3).max(self.ratio_fs)
    }
}

/// One row of a `--dump` file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: u64,
    pub a2: f64,
    pub a3: f64,
    pub fs: f64,
}

/// Running maxima; `None` argmax means nothing has been seen yet.
#[derive(Debug, Clone)]
struct Best<P> {
    a2: (f64, Option<P>),
    a3: (f64, Option<P>),
    fs: (f64, Option<P>),
}

impl<P: Clone> Best<P> {
    fn new() -> Self {
        Self {
            a2: (0.0, None),
            a3: (0.0, None),
            fs: (0.0, None),
        }
    }

    fn offer(&mut self, r: &SynthesisResult, key: impl Fn() -> P) {
        let (a2, a3, fs) = (r.a2.norm(), r.a3.norm(), r.fs.norm());
        if self.a2.1.is_none() || a2 > self.a2.0 {
            self.a2 = (a2, Some(key()));
        }
        if self.a3.1.is_none() || a3 > self.a3.0 {
            self.a3 = (a3, Some(key()));
        }
        if self.fs.1.is_none() || fs > self.fs.0 {
            self.fs = (fs, Some(key()));
        }
    }

    /// Ties keep `self`, so folding in a fixed order is deterministic.
    fn merge(mut self, other: Self) -> Self {
        for (mine, theirs) in [
            (&mut self.a2, other.a2),
            (&mut self.a3, other.a3),
            (&mut self.fs, other.fs),
        ] {
            if theirs.1.is_some() && (mine.1.is_none() || theirs.0 > mine.0) {
                *mine = theirs;
            }
        }
        self
    }
}

fn finish(
    spec: &ClassSpec,
    samples: u64,
    best: Best<CaratheodoryPair>,
    report: &BoundReport,
) -> ProbeResult {
    let take = |x: (f64, Option<CaratheodoryPair>)| {
        (
            x.0,
            x.1.unwrap_or_else(|| CaratheodoryPair::zero(PROBE_PAIR_LEN)),
        )
    };
    let (max_a2, argmax) = take(best.a2);
    let (max_a3, argmax_a3) = take(best.a3);
    let (max_fs, argmax_fs) = take(best.fs);
    ProbeResult {
        spec: *spec,
        samples,
        max_a2,
        max_a3,
        max_fs,
        ratio_a2: max_a2 / report.a2_bound,
        ratio_a3: max_a3 / report.a3_bound,
        ratio_fs: max_fs / report.fs_bound,
        argmax,
        argmax_a3,
        argmax_fs,
    }
}

fn prepare(spec: &ClassSpec) -> Result<(SynthesisWeights, BoundReport)> {
    Ok((synthesis_weights(spec)?, bound_fs(spec, spec.mu)?))
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn chunk_ranges(samples: u64) -> Vec<(usize, u64, u64)> {
    let n_chunks = samples.div_ceil(CHUNK as u64) as usize;
    (0..n_chunks)
        .map(|i| {
            let start = i as u64 * CHUNK as u64;
            (i, start, (start + CHUNK as u64).min(samples))
        })
        .collect()
}

/// Random probe over `samples` pairs of `family`. The stream for sample `i`
/// depends only on `seed` and `i / CHUNK`, and chunk results are folded in
/// index order, so the result is independent of the thread count.
pub fn probe(spec: &ClassSpec, samples: u64, seed: u64, family: Family) -> Result<ProbeResult> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let (w, report) = prepare(spec)?;
    let partial: Vec<Best<FamilyDraw>> = chunk_ranges(samples)
        .into_par_iter()
        .map(|(chunk, start, end)| {
            let mut rng = chunk_rng(seed, chunk);
            let mut best = Best::new();
            for _ in start..end {
                let draw = FamilyDraw::sample(&mut rng, family);
                let (_, c2, d2) = draw.leading();
                best.offer(&synthesize_with(&w, spec.mu, c2, d2), || draw);
            }
            best
        })
        .collect();
    let best = partial.into_iter().fold(Best::new(), Best::merge);
    let to_pair = |x: (f64, Option<FamilyDraw>)| -> Result<(f64, Option<CaratheodoryPair>)> {
        Ok((x.0, x.1.map(|d| d.pair(PROBE_PAIR_LEN)).transpose()?))
    };
    let best = Best {
        a2: to_pair(best.a2)?,
        a3: to_pair(best.a3)?,
        fs: to_pair(best.fs)?,
    };
    Ok(finish(spec, samples, best, &report))
}

/// Per-sample moduli for the same stream [`probe`] consumes.
pub fn probe_records(
    spec: &ClassSpec,
    samples: u64,
    seed: u64,
    family: Family,
) -> Result<Vec<SampleRecord>> {
    let (w, _) = prepare(spec)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be >= 1".into()));
    }
    let chunks: Vec<Vec<SampleRecord>> = chunk_ranges(samples)
        .into_par_iter()
        .map(|(chunk, start, end)| {
            let mut rng = chunk_rng(seed, chunk);
            (start..end)
                .map(|index| {
                    let (_, c2, d2) = FamilyDraw::sample(&mut rng, family).leading();
                    let r = synthesize_with(&w, spec.mu, c2, d2);
                    SampleRecord {
                        index,
                        a2: r.a2.norm(),
                        a3: r.a3.norm(),
                        fs: r.fs.norm(),
                    }
                })
                .collect()
        })
        .collect();
    Ok(chunks.concat())
}

/// Probe over an explicit list of pairs.
pub fn probe_pairs(spec: &ClassSpec, pairs: &[CaratheodoryPair]) -> Result<ProbeResult> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no pairs to probe".into()));
    }
    let (w, report) = prepare(spec)?;
    let mut best = Best::new();
    for pair in pairs {
        let r = synthesize_with(&w, spec.mu, pair.c2(), pair.d2());
        best.offer(&r, || pair.clone());
    }
    Ok(finish(spec, pairs.len() as u64, best, &report))
}

/// Points of the disk `|z - centre| ≤ radius` on a polar grid with `steps`
/// radii (including 0 and `radius`) and `steps` angles. One step gives the
/// centre alone.
pub fn disk_grid(centre: f64, radius: f64, steps: usize) -> Vec<C64> {
    let mut pts = vec![C64::new(centre, 0.0)];
    if steps < 2 {
        return pts;
    }
    for i in 1..steps {
        let r = radius * i as f64 / (steps - 1) as f64;
        for j in 0..steps {
            let theta = 2.0 * PI * j as f64 / steps as f64;
            pts.push(C64::new(centre, 0.0) + C64::from_polar(r, theta));
        }
    }
    pts
}

fn linspace_c1(steps: usize) -> Vec<f64> {
    if steps < 2 {
        return vec![0.0];
    }
    (0..steps)
        .map(|i| 2.0 * i as f64 / (steps - 1) as f64)
        .collect()
}

/// Exhaustive sweep: `c_1` over `[0, 2]` (rotation makes `c_1 ≥ 0` real
/// without loss), `c_2` and `d_2` over polar grids of the body disk
/// `|x - c_1²/2| ≤ 2 - c_1²/2`.
pub fn grid_oracle(spec: &ClassSpec, steps: usize) -> Result<ProbeResult> {
    if steps == 0 || steps > MAX_GRID_STEPS {
        return Err(Error::InvalidArgument(format!(
            "grid steps must be in 1..={MAX_GRID_STEPS}, got {steps}"
        )));
    }
    let (w, report) = prepare(spec)?;
    let c1s = linspace_c1(steps);
    let partial: Vec<(u64, Best<(f64, C64, C64)>)> = c1s
        .par_iter()
        .map(|&c1| {
            let centre = c1 * c1 / 2.0;
            let disk = disk_grid(centre, 2.0 - centre, steps);
            // squared moduli of a2², a3, fs; monotone in |a2|, |a3|, |fs|
            let mut top = [-1.0f64; 3];
            let mut arg = [(C64::default(), C64::default()); 3];
            for &c2 in &disk {
                for &d2 in &disk {
                    let a2sq = (c2 + d2) * w.sum_weight;
                    let a3 = (c2 - d2) * w.diff_weight + a2sq;
                    let fs = a3 - a2sq * spec.mu;
                    for (k, v) in [a2sq.norm_sqr(), a3.norm_sqr(), fs.norm_sqr()]
                        .into_iter()
                        .enumerate()
                    {
                        if v > top[k] {
                            top[k] = v;
                            arg[k] = (c2, d2);
                        }
                    }
                }
            }
            // re-evaluate the winners so reported values match `synthesize`
            let mut best = Best::new();
            for (c2, d2) in arg {
                best.offer(&synthesize_with(&w, spec.mu, c2, d2), || (c1, c2, d2));
            }
            ((disk.len() * disk.len()) as u64, best)
        })
        .collect();
    let mut total = 0;
    let mut best = Best::new();
    for (n, b) in partial {
        total += n;
        best = best.merge(b);
    }
    let to_pair = |x: (f64, Option<(f64, C64, C64)>)| -> Result<(f64, Option<CaratheodoryPair>)> {
        let pair = match x.1 {
            Some((c1, c2, d2)) => Some(CaratheodoryPair::from_body(C64::new(c1, 0.0), c2, d2)?),
            None => None,
        };
        Ok((x.0, pair))
    };
    let best = Best {
        a2: to_pair(best.a2)?,
        a3: to_pair(best.a3)?,
        fs: to_pair(best.fs)?,
    };
    Ok(finish(spec, total, best, &report))
}

/// `max(||a_2| - |a_2'||, ||a_3 - μa_2²| - |a_3' - μa_2'²||)` between a pair and
/// its rotation by `theta`.
pub fn rotation_invariance_defect(
    spec: &ClassSpec,
    pair: &CaratheodoryPair,
    theta: f64,
) -> Result<f64> {
    let w = synthesis_weights(spec)?;
    let rot = pair.rotated(theta);
    let a = synthesize_with(&w, spec.mu, pair.c2(), pair.d2());
    let b = synthesize_with(&w, spec.mu, rot.c2(), rot.d2());
    Ok((a.a2.norm() - b.a2.norm())
        .abs()
        .max((a.fs.norm() - b.fs.norm()).abs()))
}

pub const GRID_GAMMAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const GRID_LAMBDAS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
pub const GRID_ALPHAS: [f64; 3] = [0.0, 1.0, 3.0];
pub const GRID_MUS: [f64; 5] = [-1.0, 0.0, 0.5, 1.0, 2.0];

/// The parameter grid restricted to each class's validity region and to
/// specs whose bounds are defined. Classes without `γ` or `α` appear once
/// per remaining parameter combination.
pub fn dominance_grid() -> Vec<ClassSpec> {
    let mut base = Vec::new();
    for &g in &GRID_GAMMAS {
        for &l in &GRID_LAMBDAS {
            for &a in &GRID_ALPHAS {
                base.push(ClassSpec::wsl(g, l, a));
            }
            base.push(ClassSpec::rsl(g, l));
        }
    }
    for &l in &GRID_LAMBDAS {
        base.push(ClassSpec::slb(l));
        base.push(ClassSpec::psl(l));
    }
    let mut out = Vec::new();
    for spec in base {
        for &mu in &GRID_MUS {
            let s = spec.with_mu(mu);
            if s.validate().is_ok() && bound_fs(&s, mu).is_ok() {
                out.push(s);
            }
        }
    }
    out
}

/// Classes that the sharpness probes must resolve to `ratio_a2 ≥ 0.99`.
pub fn sharpness_specs() -> Vec<ClassSpec> {
    let mut v = vec![ClassSpec::sl(), ClassSpec::ksl(), ClassSpec::hsl(1.0)];
    for a in [0.0, 1.0] {
        for l in [0.0, 1.0] {
            v.push(ClassSpec::wsl(1.0, l, a));
        }
    }
    v
}

/// Number of grid specs per class tag, for reporting.
pub fn grid_census(grid: &[ClassSpec]) -> [(ClassTag, usize); 4] {
    ClassTag::ALL.map(|t| (t, grid.iter().filter(|s| s.tag == t).count()))
}

/// One row of a `μ` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeketeRow {
    pub mu: f64,
    pub h_mu: f64,
    pub branch: Branch,
    pub fs_bound: f64,
    /// Grid-oracle maximum of `|a_3 - μ a_2²|`.
    pub achieved: f64,
}

/// `μ = mu_min + i·step` for `i = 0, 1, …` up to `mu_max` (inclusive within
/// half a step).
pub fn mu_grid(mu_min: f64, mu_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !mu_min.is_finite() || !mu_max.is_finite() || mu_max < mu_min {
        return Err(Error::InvalidArgument(format!(
            "bad mu range [{mu_min}, {mu_max}] with step {step}"
        )));
    }
    let n = ((mu_max - mu_min) / step + 0.5).floor() as usize;
    if n > 10_000_000 {
        return Err(Error::InvalidArgument(format!("{n} mu values requested")));
    }
    Ok((0..=n).map(|i| mu_min + i as f64 * step).collect())
}

/// Bound and grid-oracle maximum of the FS functional along a `μ` grid.
/// `grid_steps = 0` skips the oracle and reports `achieved = NaN`.
pub fn fekete_sweep(spec: &ClassSpec, mus: &[f64], grid_steps: usize) -> Result<Vec<FeketeRow>> {
    mus.par_iter()
        .map(|&mu| {
            let s = spec.with_mu(mu);
            let report = bound_fs(&s, mu)?;
            let achieved = if grid_steps == 0 {
                f64::NAN
            } else {
                grid_oracle(&s, grid_steps)?.max_fs
            };
            Ok(FeketeRow {
                mu,
                h_mu: report.h_mu,
                branch: report.branch,
                fs_bound: report.fs_bound,
                achieved,
            })
        })
        .collect()
}

/// Largest `|f(μ_{i+1}) - f(μ_i)|` of the `fs_bound` column.
pub fn max_adjacent_jump(rows: &[FeketeRow]) -> f64 {
    rows.windows(2)
        .map(|w| (w[1].fs_bound - w[0].fs_bound).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::bound_a2;
    use crate::caratheodory::rotation_pair;

    #[test]
    fn zero_pairs_give_zero_maxima() {
        let pairs = vec![CaratheodoryPair::zero(3); 5];
        let r = probe_pairs(&ClassSpec::wsl(2.0, 1.0, 3.0).with_mu(0.5), &pairs).unwrap();
        assert_eq!((r.max_a2, r.max_a3, r.max_fs), (0.0, 0.0, 0.0));
        assert_eq!((r.ratio_a2, r.ratio_a3, r.ratio_fs), (0.0, 0.0, 0.0));
    }

    #[test]
    fn rotation_extremal_attains_sl_bound() {
        let spec = ClassSpec::sl();
        let pair = rotation_pair(C64::new(1.0, 0.0), 3).unwrap();
        let r = probe_pairs(&spec, &[pair]).unwrap();
        assert!((r.max_a2 - bound_a2(&spec).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn disk_grid_shape() {
        assert_eq!(disk_grid(0.0, 2.0, 1), vec![C64::new(0.0, 0.0)]);
        let g = disk_grid(0.5, 1.5, 4);
        assert_eq!(g.len(), 1 + 3 * 4);
        assert!(g.iter().all(|z| (z - 0.5).norm() <= 1.5 + 1e-15));
        assert!(g.iter().any(|z| (z - 2.0).norm() < 1e-15));
    }

    #[test]
    fn grid_steps_guard() {
        assert!(grid_oracle(&ClassSpec::sl(), 0).is_err());
        assert!(grid_oracle(&ClassSpec::sl(), 65).is_err());
    }

    #[test]
    fn two_step_grid_hits_the_corner() {
        for spec in sharpness_specs() {
            let r = grid_oracle(&spec, 2).unwrap();
            assert!((r.ratio_a2 - 1.0).abs() < 1e-12, "{spec}: {}", r.ratio_a2);
        }
    }

    #[test]
    fn one_step_grid_is_the_centre() {
        let r = grid_oracle(&ClassSpec::sl().with_mu(1.0), 1).unwrap();
        assert_eq!(r.samples, 1);
        assert_eq!(r.max_fs, 0.0);
    }

    #[test]
    fn probe_is_deterministic() {
        let spec = ClassSpec::rsl(0.5, 2.0).with_mu(-1.0);
        let a = probe(&spec, 10_000, 7, Family::QuadraticBlaschke).unwrap();
        let b = probe(&spec, 10_000, 7, Family::QuadraticBlaschke).unwrap();
        assert_eq!(a, b);
        let c = probe(&spec, 10_000, 8, Family::QuadraticBlaschke).unwrap();
        assert_ne!(a.max_a2, c.max_a2);
    }

    #[test]
    fn records_agree_with_probe() {
        let spec = ClassSpec::psl(0.5).with_mu(2.0);
        let recs = probe_records(&spec, 5000, 3, Family::BodyDirect).unwrap();
        let r = probe(&spec, 5000, 3, Family::BodyDirect).unwrap();
        assert_eq!(recs.len(), 5000);
        assert_eq!(recs.iter().map(|x| x.fs).fold(0.0, f64::max), r.max_fs);
        assert!(recs.iter().enumerate().all(|(i, x)| x.index == i as u64));
    }

    #[test]
    fn mu_grid_endpoints() {
        let g = mu_grid(-1.0, 1.0, 0.5).unwrap();
        assert_eq!(g, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert!(mu_grid(1.0, 0.0, 0.1).is_err());
        assert!(mu_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn sweep_achieved_never_exceeds_bound() {
        let rows = fekete_sweep(
            &ClassSpec::wsl(1.0, 0.0, 0.0),
            &mu_grid(-2.0, 4.0, 0.25).unwrap(),
            6,
        )
        .unwrap();
        assert!(rows.iter().all(|r| r.achieved <= r.fs_bound + 1e-12));
        let at_one = rows.iter().find(|r| r.mu == 1.0).unwrap();
        assert_eq!(at_one.branch, Branch::Inner);
        assert!((at_one.fs_bound - crate::shell::TAU.abs()).abs() < 1e-15);
    }

    #[test]
    fn grid_covers_every_class() {
        let grid = dominance_grid();
        for (tag, n) in grid_census(&grid) {
            assert!(n > 0, "{tag}");
        }
        assert!(grid.iter().all(|s| s.validate().is_ok()));
    }
}

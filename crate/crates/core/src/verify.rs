//! Self-check suite over every module, sized to run in a few seconds.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{
    bound_a2, bound_a3, bound_fs, bound_fs_m_form, branch_values_at_threshold, reduction_check,
    Corollary,
};
use crate::caratheodory::{schwarz_to_caratheodory, Family};
use crate::classes::{
    class_operator, recover_caratheodory, synthesis_weights, synthesize_coeffs, ClassSpec,
};
use crate::error::Result;
use crate::search::{
    dominance_grid, grid_oracle, probe, rotation_invariance_defect, sharpness_specs,
};
use crate::series::{TruncatedSeries, C64};
use crate::shell::{
    curve_sample, is_loop_free, min_real_part, ptilde_coeffs, ptilde_rational, tau_power_decompose,
    tau_power_defect, trisectrix_residual, BETA, R0, TAU,
};

/// Tolerance on every bound comparison.
pub const DOMINANCE_TOL: f64 = 1e-9;
pub const SHARPNESS_RATIO: f64 = 0.99;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Samples per spec and family in the dominance check.
    pub samples: u64,
    /// Random series in the reversion check.
    pub series_trials: usize,
    pub grid_steps: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 2_000,
            series_trials: 50,
            grid_steps: 16,
        }
    }
}

fn outcome(name: &str, r: Result<(bool, String)>) -> CheckOutcome {
    match r {
        Ok((passed, detail)) => CheckOutcome {
            name: name.into(),
            passed,
            detail,
        },
        Err(e) => CheckOutcome {
            name: name.into(),
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn below(name: &str, value: f64, tol: f64) -> (bool, String) {
    (value < tol, format!("{name} = {value:.3e} (tol {tol:.0e})"))
}

/// A normalized random series `z + Σ a_k z^k` with `|a_k| ≤ 1/2`.
pub fn random_normalized<R: Rng>(rng: &mut R, order: usize) -> Result<TruncatedSeries> {
    let tail: Vec<C64> = (2..=order)
        .map(|_| C64::from_polar(0.5 * rng.gen::<f64>(), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    TruncatedSeries::normalized(&tail, order)
}

/// Largest deviation of the first three reversion coefficients from
/// `-a_2`, `2a_2² - a_3`, `-5a_2³ + 5a_2a_3 - a_4`.
pub fn reversion_closed_form_defect(f: &TruncatedSeries) -> Result<f64> {
    let g = f.revert()?;
    let (a2, a3, a4) = (f.coeff(2), f.coeff(3), f.coeff(4));
    let want = [
        -a2,
        2.0 * a2 * a2 - a3,
        -5.0 * a2 * a2 * a2 + 5.0 * a2 * a3 - a4,
    ];
    Ok((0..3)
        .map(|i| (g.coeff(i + 2) - want[i]).norm())
        .fold(0.0, f64::max))
}

/// Builds `f = z + a_2 z² + a_3 z³`, reads `(c_1, c_2)` off the class operator
/// of `f` and `(d_1, d_2)` off that of `f⁻¹`, and returns the largest error of
/// the synthesis in reproducing `a_2²` and `a_3`.
pub fn operator_round_trip_defect(spec: &ClassSpec, a2: C64, a3: C64) -> Result<f64> {
    let f = TruncatedSeries::normalized(&[a2, a3], 6)?;
    let g = f.revert()?;
    let (_, c2) = recover_caratheodory(&class_operator(spec, &f)?)?;
    let (_, d2) = recover_caratheodory(&class_operator(spec, &g)?)?;
    let r = synthesize_coeffs(spec, c2, d2)?;
    Ok((r.a2sq - a2 * a2).norm().max((r.a3 - a3).norm()))
}

/// Specs exercised by the class-level checks.
pub fn sample_specs() -> Vec<ClassSpec> {
    vec![
        ClassSpec::wsl(1.0, 0.0, 0.0),
        ClassSpec::wsl(0.5, 2.0, 3.0),
        ClassSpec::wsl(2.0, 0.5, 1.0),
        ClassSpec::rsl(1.0, 0.0),
        ClassSpec::rsl(0.7, 1.5),
        ClassSpec::slb(1.0),
        ClassSpec::slb(2.5),
        ClassSpec::psl(0.0),
        ClassSpec::psl(0.4),
        ClassSpec::psl(1.0),
    ]
}

/// Pairs of specs that describe the same class.
pub fn reduction_pairs() -> Vec<(&'static str, ClassSpec, ClassSpec)> {
    let mut v: Vec<(&'static str, ClassSpec, ClassSpec)> = vec![
        (
            "hsl: rsl(l=1) vs wsl(l=0,a=1)",
            ClassSpec::rsl(1.0, 1.0),
            ClassSpec::wsl(1.0, 0.0, 1.0),
        ),
        (
            "hsl(g=2): rsl(l=1) vs wsl(l=0,a=1)",
            ClassSpec::rsl(2.0, 1.0),
            ClassSpec::wsl(2.0, 0.0, 1.0),
        ),
        (
            "sl: rsl(g=1,l=0) vs psl(0)",
            ClassSpec::rsl(1.0, 0.0),
            ClassSpec::psl(0.0),
        ),
        (
            "sl: slb(1) vs psl(0)",
            ClassSpec::slb(1.0),
            ClassSpec::psl(0.0),
        ),
    ];
    for l in [0.0, 0.5, 2.0] {
        v.push((
            "fsl vs wsl(a=1+2l)",
            ClassSpec::fsl(0.5, l),
            ClassSpec::wsl(0.5, l, 1.0 + 2.0 * l),
        ));
    }
    v
}

pub fn corollaries() -> Vec<Corollary> {
    let mut v = vec![Corollary::Sl, Corollary::Ksl];
    for g in [0.5, 1.0, 2.0] {
        v.push(Corollary::Hsl { gamma: g });
        for x in [0.0, 0.5, 1.0, 2.0] {
            v.push(Corollary::Fsl {
                gamma: g,
                lambda: x,
            });
            v.push(Corollary::Bsl { gamma: g, alpha: x });
        }
    }
    v
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    out.push(outcome(
        "generator coefficients vs long division (order 40)",
        (|| {
            let (num, den) = ptilde_rational(40)?;
            let e = ptilde_coeffs(40)?.max_abs_diff(&num.div(&den)?);
            Ok(below("max error", e, 1e-12))
        })(),
    ));

    out.push(outcome(
        "tau powers decompose into Fibonacci numbers",
        (|| {
            let mut worst: f64 = 0.0;
            for n in 1..=40 {
                let (un, prev) = tau_power_decompose(n)?;
                worst = worst.max(tau_power_defect(n, un, prev) / (1.0 + un as f64));
            }
            Ok(below("relative defect", worst, 1e-9))
        })(),
    ));

    out.push(outcome(
        "compose(f, revert(f)) = z",
        (|| {
            let mut worst: f64 = 0.0;
            for _ in 0..cfg.series_trials {
                let f = random_normalized(&mut rng, 10)?;
                let id = f.compose(&f.revert()?)?;
                worst = worst.max(id.max_abs_diff(&TruncatedSeries::identity(10)));
            }
            Ok(below("max error", worst, 1e-10))
        })(),
    ));

    out.push(outcome(
        "reversion closed forms for g2, g3, g4",
        (|| {
            let mut worst: f64 = 0.0;
            for _ in 0..cfg.series_trials {
                worst = worst.max(reversion_closed_form_defect(&random_normalized(
                    &mut rng, 6,
                )?)?);
            }
            Ok(below("max error", worst, 1e-12))
        })(),
    ));

    out.push(outcome(
        "unit-circle image lies on the trisectrix",
        (|| {
            let pts = curve_sample(1.0, 4096)?;
            let worst = pts
                .iter()
                .map(|p| trisectrix_residual(p.w))
                .fold(0.0, f64::max);
            Ok(below("max residual", worst, 1e-8))
        })(),
    ));

    out.push(outcome(
        "no loop at r0, loop at r = 0.7",
        (|| {
            let a = is_loop_free(R0, 4096)?;
            let b = is_loop_free(0.7, 4096)?;
            Ok((
                a && !b,
                format!("loop_free(r0) = {a}, loop_free(0.7) = {b}"),
            ))
        })(),
    ));

    out.push(outcome(
        "real part stays above beta",
        (|| {
            let mut worst = f64::INFINITY;
            for r in [0.5, 0.9, 0.99, 0.999] {
                worst = worst.min(min_real_part(r, 4096)?);
            }
            Ok((
                worst >= BETA - 1e-3,
                format!("min Re = {worst:.6} vs beta = {BETA:.6}"),
            ))
        })(),
    ));

    out.push(outcome(
        "Schwarz to Caratheodory respects |c_k| <= 2",
        (|| {
            let mut worst: f64 = 0.0;
            for _ in 0..200 {
                let a =
                    C64::from_polar(0.8 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI));
                // z (a + z)/(1 + conj(a) z)
                let num =
                    TruncatedSeries::from_prefix(&[C64::new(0.0, 0.0), a, C64::new(1.0, 0.0)], 40)?;
                let den = TruncatedSeries::from_prefix(&[C64::new(1.0, 0.0), a.conj()], 40)?;
                let h = schwarz_to_caratheodory(&num.div(&den)?)?;
                worst = worst.max(h.coeffs()[1..].iter().map(|c| c.norm()).fold(0.0, f64::max));
            }
            Ok((worst <= 2.0 + 1e-12, format!("max |c_k| = {worst:.15}")))
        })(),
    ));

    out.push(outcome(
        "class operators reproduce the synthesis",
        (|| {
            let mut worst: f64 = 0.0;
            for spec in sample_specs() {
                for _ in 0..20 {
                    let a2 = C64::from_polar(0.3 * rng.gen::<f64>(), rng.gen_range(0.0..2.0 * PI));
                    let a3 = C64::from_polar(0.3 * rng.gen::<f64>(), rng.gen_range(0.0..2.0 * PI));
                    worst = worst.max(operator_round_trip_defect(&spec, a2, a3)?);
                }
            }
            Ok(below("max error", worst, 1e-9))
        })(),
    ));

    out.push(outcome(
        "a3 - a2^2 equals the difference term",
        (|| {
            let mut worst: f64 = 0.0;
            for spec in sample_specs() {
                let c2 = C64::new(1.3, -0.4);
                let d2 = C64::new(-0.2, 1.1);
                let r = synthesize_coeffs(&spec, c2, d2)?;
                let want = (c2 - d2) * (spec.effective_gamma() * TAU / (4.0 * spec.scale()));
                worst = worst.max((r.a3 - r.a2sq - want).norm());
            }
            Ok(below("max error", worst, 1e-12))
        })(),
    ));

    out.push(outcome(
        "synthesis agrees across equivalent specs",
        (|| {
            let (c2, d2) = (C64::new(1.1, 0.7), C64::new(-0.5, 0.9));
            let mut worst: f64 = 0.0;
            let lam = 0.75;
            let pairs = [
                (
                    ClassSpec::fsl(1.5, lam),
                    ClassSpec::wsl(1.5, lam, 1.0 + 2.0 * lam),
                ),
                (ClassSpec::hsl(1.5), ClassSpec::rsl(1.5, 1.0)),
                (ClassSpec::rsl(1.0, 0.0), ClassSpec::slb(1.0)),
                (ClassSpec::slb(1.0), ClassSpec::psl(0.0)),
            ];
            for (a, b) in pairs {
                let (x, y) = (
                    synthesize_coeffs(&a, c2, d2)?,
                    synthesize_coeffs(&b, c2, d2)?,
                );
                worst = worst
                    .max((x.a2sq - y.a2sq).norm())
                    .max((x.a3 - y.a3).norm());
            }
            Ok(below("max difference", worst, 1e-12))
        })(),
    ));

    out.push(outcome(
        "bound spot values",
        (|| {
            let checks = [
                (bound_a2(&ClassSpec::sl())?, 0.413304),
                (bound_a3(&ClassSpec::sl())?, 0.479838),
                (bound_a2(&ClassSpec::ksl())?, 0.193701),
                (bound_a3(&ClassSpec::ksl())?, 0.140526),
                (bound_a2(&ClassSpec::hsl(1.0))?, 0.199862),
            ];
            let worst = checks
                .iter()
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            Ok(below("max deviation", worst, 1e-6))
        })(),
    ));

    out.push(outcome(
        "FS branches meet at the threshold",
        (|| {
            let mut worst: f64 = 0.0;
            for spec in dominance_grid() {
                let (inner, outer) = branch_values_at_threshold(&spec)?;
                worst = worst.max((inner - outer).abs());
            }
            Ok(below("max gap", worst, 1e-15))
        })(),
    ));

    out.push(outcome(
        "FS bound: h-form equals |mu - 1|-form",
        (|| {
            let mut worst: f64 = 0.0;
            for spec in dominance_grid() {
                for mu in [-3.0, -1.0, 0.0, 0.5, 1.0, 1.5, 2.0, 5.0, 20.0] {
                    let a = bound_fs(&spec, mu)?.fs_bound;
                    worst = worst.max((a - bound_fs_m_form(&spec, mu)?).abs() / a.max(1.0));
                }
            }
            Ok(below("max relative difference", worst, 1e-12))
        })(),
    ));

    out.push(outcome(
        "corollaries equal their parent theorems",
        (|| {
            let mut worst: f64 = 0.0;
            for c in corollaries() {
                worst = worst.max(c.parent_discrepancy()?);
            }
            Ok(below("max difference", worst, 1e-12))
        })(),
    ));

    out.push(outcome(
        "documented reductions agree",
        (|| {
            let mut worst: f64 = 0.0;
            for (_, a, b) in reduction_pairs() {
                worst = worst.max(reduction_check(&a, &b)?);
            }
            Ok(below("max difference", worst, 1e-12))
        })(),
    ));

    out.push(outcome(
        "wsl a2 bound decreases in alpha",
        (|| {
            let vals: Vec<f64> = (0..50)
                .map(|i| bound_a2(&ClassSpec::wsl(1.0, 0.0, 5.0 * i as f64 / 49.0)))
                .collect::<Result<_>>()?;
            let ok = vals.windows(2).all(|w| w[1] < w[0]);
            Ok((ok, format!("from {:.6} to {:.6}", vals[0], vals[49])))
        })(),
    ));

    out.push(outcome(
        "sampled coefficients stay below the bounds",
        (|| {
            let grid = dominance_grid();
            let mut worst: f64 = 0.0;
            for (i, spec) in grid.iter().enumerate() {
                for family in Family::ALL {
                    let seed = cfg.seed.wrapping_add(i as u64);
                    worst = worst.max(probe(spec, cfg.samples, seed, family)?.max_ratio());
                }
            }
            Ok((
                worst <= 1.0 + DOMINANCE_TOL,
                format!("{} specs, max ratio {worst:.12}", grid.len()),
            ))
        })(),
    ));

    out.push(outcome(
        "grid oracle resolves the a2 bound",
        (|| {
            let mut worst = f64::INFINITY;
            for spec in sharpness_specs() {
                let r = grid_oracle(&spec, cfg.grid_steps)?;
                if r.ratio_a2 > 1.0 + DOMINANCE_TOL {
                    return Ok((false, format!("{spec}: ratio {} above 1", r.ratio_a2)));
                }
                worst = worst.min(r.ratio_a2);
            }
            Ok((
                worst >= SHARPNESS_RATIO,
                format!("min ratio_a2 {worst:.12}"),
            ))
        })(),
    ));

    out.push(outcome(
        "rotation leaves |a2| and FS unchanged",
        (|| {
            let pair = crate::caratheodory::sample_pair(&mut rng, 3, Family::QuadraticBlaschke)?;
            let mut worst: f64 = 0.0;
            for spec in sample_specs() {
                for _ in 0..100 {
                    let spec = spec.with_mu(rng.gen_range(-2.0..3.0));
                    worst = worst.max(rotation_invariance_defect(
                        &spec,
                        &pair,
                        rng.gen_range(0.0..2.0 * PI),
                    )?);
                }
            }
            Ok(below("max change", worst, 1e-12))
        })(),
    ));

    out.push(outcome(
        "probe is reproducible",
        (|| {
            let spec = ClassSpec::wsl(2.0, 0.5, 1.0).with_mu(0.5);
            let a = probe(&spec, 3 * 4096 + 17, cfg.seed, Family::BodyDirect)?;
            let b = probe(&spec, 3 * 4096 + 17, cfg.seed, Family::BodyDirect)?;
            Ok((a == b, "two identical runs compared field by field".into()))
        })(),
    ));

    out.push(outcome(
        "degenerate parameters are reported, not NaN",
        (|| {
            let mut rejected = 0;
            let mut total = 0;
            for g in (1..=40).map(|i| i as f64 * 0.25) {
                for l in [0.0, 1.0, 2.0, 4.0] {
                    let spec = ClassSpec::wsl(g, l, 0.0);
                    total += 1;
                    match bound_fs(&spec, 0.0) {
                        Ok(r) if r.a2_bound.is_finite() && r.fs_bound.is_finite() => {}
                        Ok(_) => return Ok((false, format!("{spec}: non-finite bound"))),
                        Err(_) => {
                            rejected += 1;
                            if synthesis_weights(&spec)
                                .map(|w| w.denominator > 0.0)
                                .unwrap_or(false)
                            {
                                return Ok((
                                    false,
                                    format!("{spec}: bound rejected with positive denominator"),
                                ));
                            }
                        }
                    }
                }
            }
            Ok((
                true,
                format!("{rejected} of {total} wsl specs outside the defined region"),
            ))
        })(),
    ));

    out
}

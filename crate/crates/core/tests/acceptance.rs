//! Acceptance gate. One PASS/FAIL line per criterion, each with its time
//! budget; the process exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shellbound::bounds::{
    bound_a2, bound_a3, bound_fs, branch_values_at_threshold, radicand, reduction_check, Corollary,
};
use shellbound::caratheodory::Family;
use shellbound::classes::ClassSpec;
use shellbound::search::{
    dominance_grid, fekete_sweep, grid_oracle, max_adjacent_jump, mu_grid, probe, sharpness_specs,
};
use shellbound::series::{TruncatedSeries, C64};
use shellbound::shell::{curve_sample, is_loop_free, min_real_part, ptilde_coeffs, R0};

struct Outcome {
    passed: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(passed: bool, detail: String) -> Self {
        Self {
            passed,
            detail,
            notes: Vec::new(),
        }
    }
}

fn tau() -> f64 {
    (1.0 - 5f64.sqrt()) / 2.0
}

fn random_normalized(rng: &mut ChaCha8Rng, order: usize) -> TruncatedSeries {
    let tail: Vec<C64> = (2..=order)
        .map(|_| C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
        .collect();
    TruncatedSeries::normalized(&tail, order).unwrap()
}

fn generator_identity() -> Outcome {
    let t = tau();
    let p = ptilde_coeffs(40).unwrap();
    // p_n = τ p_{n-1} + τ² p_{n-2} + [n = 0] + τ² [n = 2]
    let mut oracle = vec![0.0f64; 41];
    for n in 0..=40 {
        let mut v = match n {
            0 => 1.0,
            2 => t * t,
            _ => 0.0,
        };
        if n >= 1 {
            v += t * oracle[n - 1];
        }
        if n >= 2 {
            v += t * t * oracle[n - 2];
        }
        oracle[n] = v;
    }
    let err = (0..=40)
        .map(|n| (p.coeff(n).re - oracle[n]).abs())
        .fold(0.0, f64::max);
    let imag = p.coeffs().iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let exact = [1.0, 3.0, 4.0, 7.0, 11.0]
        .iter()
        .enumerate()
        .all(|(i, m)| p.coeff(i + 1).re == m * (0..=i).fold(1.0, |x, _| x * t));
    Outcome::new(
        err < 1e-12 && imag == 0.0 && exact,
        format!("max |p_n - recurrence| = {err:.2e} over n <= 40; n = 1..5 exact: {exact}"),
    )
}

fn reversion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut id_err: f64 = 0.0;
    let mut closed_err: f64 = 0.0;
    for _ in 0..200 {
        let f = random_normalized(&mut rng, 10);
        let g = f.revert().unwrap();
        id_err = id_err.max(
            f.compose(&g)
                .unwrap()
                .max_abs_diff(&TruncatedSeries::identity(10)),
        );
        let (a2, a3, a4) = (f.coeff(2), f.coeff(3), f.coeff(4));
        let want = [
            -a2,
            2.0 * a2 * a2 - a3,
            -5.0 * a2 * a2 * a2 + 5.0 * a2 * a3 - a4,
        ];
        for (k, w) in want.iter().enumerate() {
            closed_err = closed_err.max((g.coeff(k + 2) - w).norm());
        }
    }
    Outcome::new(
        id_err < 1e-10 && closed_err < 1e-12,
        format!("200 series: |f(g(z)) - z| = {id_err:.2e}, g2..g4 closed forms {closed_err:.2e}"),
    )
}

fn dominance() -> Outcome {
    let grid = dominance_grid();
    let mut worst: f64 = 0.0;
    let mut worst_spec = String::new();
    for (i, spec) in grid.iter().enumerate() {
        for family in Family::ALL {
            let r = probe(spec, 100_000, 1000 + i as u64, family).unwrap();
            if r.max_ratio() > worst {
                worst = r.max_ratio();
                worst_spec = format!("{spec} mu={} {family}", spec.mu);
            }
        }
    }
    Outcome::new(
        worst <= 1.0 + 1e-9,
        format!(
            "{} specs x 3 families x 1e5 samples; max achieved/bound = {worst:.12} ({worst_spec})",
            grid.len()
        ),
    )
}

fn sharpness() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for spec in sharpness_specs() {
        let r = grid_oracle(&spec, 32).unwrap();
        ok &= r.ratio_a2 >= 0.99 && r.ratio_a2 <= 1.0 + 1e-9;
        lines.push(format!("{spec}: {:.9}", r.ratio_a2));
    }
    Outcome::new(ok, format!("ratio_a2 at 32 steps: {}", lines.join("; ")))
}

fn spot_values() -> Outcome {
    let t = tau();
    let at = t.abs();
    // (label, library, hand-arithmetic oracle, printed 6-digit target)
    let rows = [
        (
            "SL a2",
            bound_a2(&ClassSpec::sl()).unwrap(),
            at / (1.0 - 2.0 * t).sqrt(),
            0.413304,
        ),
        (
            "SL a3",
            bound_a3(&ClassSpec::sl()).unwrap(),
            at * (1.0 - 4.0 * t) / (2.0 - 4.0 * t),
            0.479838,
        ),
        (
            "KSL a2",
            bound_a2(&ClassSpec::ksl()).unwrap(),
            at / (4.0 - 10.0 * t).sqrt(),
            0.193701,
        ),
        (
            "KSL a3",
            bound_a3(&ClassSpec::ksl()).unwrap(),
            at * (1.0 - 4.0 * t) / (6.0 - 15.0 * t),
            0.140527,
        ),
        (
            "HSL a2",
            bound_a2(&ClassSpec::hsl(1.0)).unwrap(),
            at / (3.0 * t + 4.0 * (1.0 - 3.0 * t)).sqrt(),
            0.199862,
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    let mut notes = Vec::new();
    for (label, lib, oracle, printed) in rows {
        let e = (lib - oracle).abs();
        ok &= e < 1e-6;
        parts.push(format!("{label} {lib:.9}"));
        if (oracle - printed).abs() >= 1e-6 {
            notes.push(format!(
                "{label}: oracle {oracle:.12} differs from the 6-digit target {printed} by {:.2e}; \
                 the target is a rounding slip (the oracle rounds to {oracle:.6})",
                (oracle - printed).abs()
            ));
        }
    }
    Outcome {
        passed: ok,
        detail: format!("library vs oracle within 1e-6: {}", parts.join(", ")),
        notes,
    }
}

fn random_valid_spec(rng: &mut ChaCha8Rng) -> ClassSpec {
    loop {
        let spec = match rng.gen_range(0..4) {
            0 => ClassSpec::wsl(
                rng.gen_range(0.01..4.0),
                rng.gen_range(0.0..4.0),
                rng.gen_range(0.0..6.0),
            ),
            1 => ClassSpec::rsl(rng.gen_range(0.01..4.0), rng.gen_range(0.0..4.0)),
            2 => ClassSpec::slb(rng.gen_range(1.0..6.0)),
            _ => ClassSpec::psl(rng.gen_range(0.0..=1.0)),
        };
        if radicand(&spec).is_ok() {
            return spec;
        }
    }
}

fn fs_continuity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut gap: f64 = 0.0;
    for _ in 0..1000 {
        let (inner, outer) = branch_values_at_threshold(&random_valid_spec(&mut rng)).unwrap();
        gap = gap.max((inner - outer).abs());
    }
    let dmu = 1e-3;
    let mus = mu_grid(-2.0, 4.0, dmu).unwrap();
    let mut jump: f64 = 0.0;
    let mut excess: f64 = 0.0;
    for spec in sharpness_specs() {
        let rows = fekete_sweep(&spec, &mus, 0).unwrap();
        jump = jump.max(max_adjacent_jump(&rows));
        // outer-branch slope 4|dh/dμ| = 4|h(0) - h(1)|
        let slope =
            4.0 * (bound_fs(&spec, 0.0).unwrap().h_mu - bound_fs(&spec, 1.0).unwrap().h_mu).abs();
        let e = rows
            .windows(2)
            .map(|w| (w[1].fs_bound - w[0].fs_bound).abs() - slope * (w[1].mu - w[0].mu))
            .fold(f64::NEG_INFINITY, f64::max);
        excess = excess.max(e);
    }
    let passed = gap < 1e-15 && jump < 1e-6;
    let mut o = Outcome::new(
        passed,
        format!(
            "1000 specs: |inner - outer| at threshold = {gap:.1e}; sweep mu in [-2, 4] step 1e-3: \
             max adjacent jump = {jump:.3e} (required < 1e-6)"
        ),
    );
    if jump >= 1e-6 {
        o.notes.push(format!(
            "the outer branch 4|h(mu)| has slope 4|h'| > 1e-3 for these specs, so any correct sweep \
             moves by more than 1e-6 per step of 1e-3; jump in excess of the Lipschitz bound = {excess:.2e}"
        ));
    }
    o
}

fn reductions() -> Outcome {
    let mut worst: f64 = 0.0;
    for g in [0.25, 0.5, 1.0, 2.0] {
        worst = worst.max(Corollary::Hsl { gamma: g }.parent_discrepancy().unwrap());
        for x in [0.0, 0.5, 1.0, 3.0] {
            worst = worst.max(
                Corollary::Fsl {
                    gamma: g,
                    lambda: x,
                }
                .parent_discrepancy()
                .unwrap(),
            );
            worst = worst.max(
                Corollary::Bsl { gamma: g, alpha: x }
                    .parent_discrepancy()
                    .unwrap(),
            );
        }
        worst = worst
            .max(reduction_check(&ClassSpec::rsl(g, 1.0), &ClassSpec::wsl(g, 0.0, 1.0)).unwrap());
    }
    worst = worst.max(Corollary::Sl.parent_discrepancy().unwrap());
    worst = worst.max(Corollary::Ksl.parent_discrepancy().unwrap());
    let sl = ClassSpec::psl(0.0);
    worst = worst.max(reduction_check(&sl, &ClassSpec::rsl(1.0, 0.0)).unwrap());
    worst = worst.max(reduction_check(&sl, &ClassSpec::slb(1.0)).unwrap());
    Outcome::new(
        worst < 1e-12,
        format!("max difference over a2, a3 and FS bounds = {worst:.2e}"),
    )
}

fn curve() -> Outcome {
    let s5 = 5f64.sqrt();
    let pts = curve_sample(1.0, 4096).unwrap();
    let residual = pts
        .iter()
        .map(|p| {
            let (x, y) = (p.w.re, p.w.im);
            ((10.0 * x - s5) * y * y - (s5 - 2.0 * x) * (s5 * x - 1.0).powi(2)).abs()
        })
        .fold(0.0, f64::max);
    let at_r0 = is_loop_free(R0, 4096).unwrap();
    let at_07 = is_loop_free(0.7, 4096).unwrap();
    Outcome::new(
        residual < 1e-8 && at_r0 && !at_07,
        format!(
            "{} points, max residual {residual:.2e}; loop-free at r0: {at_r0}, at 0.7: {at_07}",
            pts.len()
        ),
    )
}

fn beta() -> Outcome {
    let b = 5f64.sqrt() / 10.0;
    let t = tau();
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [0.5, 0.9, 0.99, 0.999] {
        let lib = min_real_part(r, 4096).unwrap();
        let direct = (0..4096)
            .map(|k| {
                let z = C64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / 4096.0);
                ((1.0 + t * t * z * z) / (1.0 - t * z - t * t * z * z)).re
            })
            .fold(f64::INFINITY, f64::min);
        ok &= lib >= b - 1e-3 && (lib - direct).abs() < 1e-12;
        parts.push(format!("r={r}: {lib:.6}"));
    }
    Outcome::new(ok, format!("min Re vs beta = {b:.6}: {}", parts.join(", ")))
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(u32, &str, Duration, Check); 9] = [
        (
            1,
            "generator identity",
            Duration::from_secs(1),
            generator_identity,
        ),
        (2, "series reversion", Duration::from_secs(1), reversion),
        (3, "dominance suite", Duration::from_secs(60), dominance),
        (4, "sharpness probes", Duration::from_secs(10), sharpness),
        (
            5,
            "derived spot values",
            Duration::from_secs(1),
            spot_values,
        ),
        (
            6,
            "FS branch continuity",
            Duration::from_secs(60),
            fs_continuity,
        ),
        (7, "reduction matrix", Duration::from_secs(1), reductions),
        (8, "curve check", Duration::from_secs(5), curve),
        (9, "beta claim", Duration::from_secs(1), beta),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let o = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = o.passed && in_time;
        if !passed {
            failed += 1;
        }
        println!(
            "[{}] {id}. {name} ({:.2}s / {}s): {}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
        if !in_time {
            println!("    over time budget");
        }
        for n in o.notes {
            println!("    note: {n}");
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

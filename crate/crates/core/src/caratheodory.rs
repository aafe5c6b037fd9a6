//! Carathéodory-class coefficient data.
//!
//! Every proof instance uses two functions `h = (1+u)/(1-u)` and
//! `k = (1+v)/(1-v)` with Schwarz functions `u`, `v`; their coefficients
//! `c_k`, `d_k` are bounded by 2 and tied together by `c_1 = -d_1`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{TruncatedSeries, C64};

/// Slack allowed on `|c_i| <= 2` and on the coefficient-body radius.
pub const LEMMA_TOL: f64 = 1e-12;

/// Radius and grid size of the Schwarz check in [`schwarz_to_caratheodory`].
pub const SCHWARZ_CHECK_RADIUS: f64 = 0.95;
pub const SCHWARZ_CHECK_POINTS: usize = 64;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// `|c1| <= 2` and `c2` lies in the disk of radius `2 - |c1|²/2` about `c1²/2`.
pub fn body_check(c1: C64, c2: C64) -> bool {
    let n1 = c1.norm();
    n1 <= 2.0 + LEMMA_TOL && (c2 - c1 * c1 / 2.0).norm() <= 2.0 - n1 * n1 / 2.0 + LEMMA_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaratheodoryPair {
    c: Vec<C64>,
    d: Vec<C64>,
}

impl CaratheodoryPair {
    /// Validates `|c_i|, |d_i| <= 2`, `c_1 = -d_1` and the two-coefficient body.
    pub fn new(c: Vec<C64>, d: Vec<C64>) -> Result<Self> {
        if c.len() < 2 || c.len() != d.len() {
            return Err(Error::InvalidPair(format!(
                "need K >= 2 coefficients on both sides (got {} and {})",
                c.len(),
                d.len()
            )));
        }
        if let Some((i, x)) = c
            .iter()
            .chain(&d)
            .enumerate()
            .find(|(_, x)| x.norm() > 2.0 + LEMMA_TOL)
        {
            return Err(Error::InvalidPair(format!(
                "coefficient #{i} has modulus {} > 2",
                x.norm()
            )));
        }
        if (c[0] + d[0]).norm() > LEMMA_TOL {
            return Err(Error::InvalidPair(format!(
                "c1 = {} is not -d1 = {}",
                c[0], -d[0]
            )));
        }
        if !body_check(c[0], c[1]) || !body_check(d[0], d[1]) {
            return Err(Error::InvalidPair(
                "(c1, c2) or (d1, d2) outside the coefficient body".into(),
            ));
        }
        Ok(Self { c, d })
    }

    /// Two-coefficient pair with `d_1 = -c_1`.
    pub fn from_body(c1: C64, c2: C64, d2: C64) -> Result<Self> {
        Self::new(vec![c1, c2], vec![-c1, d2])
    }

    pub fn zero(k: usize) -> Self {
        let k = k.max(2);
        Self {
            c: vec![zero(); k],
            d: vec![zero(); k],
        }
    }

    /// `K`, the number of stored coefficients per side.
    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn c(&self) -> &[C64] {
        &self.c
    }

    pub fn d(&self) -> &[C64] {
        &self.d
    }

    pub fn c1(&self) -> C64 {
        self.c[0]
    }

    pub fn c2(&self) -> C64 {
        self.c[1]
    }

    pub fn d1(&self) -> C64 {
        self.d[0]
    }

    pub fn d2(&self) -> C64 {
        self.d[1]
    }

    /// `c_k -> e^{ikθ} c_k` (same for `d`), the coefficient action of `z -> e^{iθ} z`.
    pub fn rotated(&self, theta: f64) -> Self {
        let rot = |v: &[C64]| {
            v.iter()
                .enumerate()
                .map(|(i, &x)| x * Complex64::from_polar(1.0, theta * (i + 1) as f64))
                .collect()
        };
        Self {
            c: rot(&self.c),
            d: rot(&self.d),
        }
    }
}

/// `(1 + w) / (1 - w)` after checking that `w(0) = 0` and that the stored
/// polynomial stays inside the unit disk on a grid at `|z| = 0.95`.
pub fn schwarz_to_caratheodory(w: &TruncatedSeries) -> Result<TruncatedSeries> {
    if w.coeff(0).norm() > LEMMA_TOL {
        return Err(Error::NotSchwarz {
            index: 0,
            modulus: w.coeff(0).norm(),
        });
    }
    for index in 0..SCHWARZ_CHECK_POINTS {
        let t = 2.0 * PI * index as f64 / SCHWARZ_CHECK_POINTS as f64;
        let modulus = w
            .evaluate(Complex64::from_polar(SCHWARZ_CHECK_RADIUS, t))
            .norm();
        if modulus >= 1.0 {
            return Err(Error::NotSchwarz { index, modulus });
        }
    }
    cayley(w)
}

fn cayley(w: &TruncatedSeries) -> Result<TruncatedSeries> {
    let one = TruncatedSeries::constant(C64::new(1.0, 0.0), w.order());
    (&one + w).div(&(&one - w))
}

/// `u = (h - 1) / (h + 1)`, the Schwarz function behind a Carathéodory series.
pub fn caratheodory_to_schwarz(h: &TruncatedSeries) -> Result<TruncatedSeries> {
    let one = TruncatedSeries::constant(C64::new(1.0, 0.0), h.order());
    (h - &one).div(&(h + &one))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `w(z) = ηz`, `|η| = 1`.
    Rotation,
    /// `w(z) = e^{iψ} z (a + z) / (1 + ā z)`, `|a| <= 1`.
    QuadraticBlaschke,
    /// `(c1, c2)` and `(d1, d2)` drawn directly from the coefficient body.
    BodyDirect,
}

impl Family {
    pub const ALL: [Family; 3] = [
        Family::Rotation,
        Family::QuadraticBlaschke,
        Family::BodyDirect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Rotation => "rotation",
            Family::QuadraticBlaschke => "quadratic-blaschke",
            Family::BodyDirect => "body-direct",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown sampling family '{s}'")))
    }
}

fn coefficients_of(w: &TruncatedSeries) -> Result<Vec<C64>> {
    Ok(cayley(w)?.coeffs()[1..].to_vec())
}

/// Pair generated by `u(z) = ηz` and `v(z) = -ηz`.
pub fn rotation_pair(eta: C64, k: usize) -> Result<CaratheodoryPair> {
    if (eta.norm() - 1.0).abs() > LEMMA_TOL {
        return Err(Error::InvalidArgument(format!(
            "rotation |η| = {} is not 1",
            eta.norm()
        )));
    }
    let u = TruncatedSeries::from_prefix(&[zero(), eta], k)?;
    CaratheodoryPair::new(coefficients_of(&u)?, coefficients_of(&(-&u))?)
}

fn blaschke_series(a: C64, psi: f64, order: usize) -> Result<TruncatedSeries> {
    // e^{iψ} z (a + z) / (1 + ā z)
    let num = TruncatedSeries::from_prefix(&[zero(), a, C64::new(1.0, 0.0)], order)?;
    let den = TruncatedSeries::from_prefix(&[C64::new(1.0, 0.0), a.conj()], order)?;
    Ok(num.div(&den)?.scale(Complex64::from_polar(1.0, psi)))
}

/// Pair generated by two quadratic Blaschke products. The `c`-side uses
/// `(a, ψ)`; the `d`-side uses rotation `ψ_d` and `b = -a e^{i(ψ - ψ_d)}`, the
/// unique choice with the same `|b| = |a|` that enforces `d_1 = -c_1`.
pub fn blaschke_pair(a: C64, psi: f64, psi_d: f64, k: usize) -> Result<CaratheodoryPair> {
    if a.norm() > 1.0 + LEMMA_TOL {
        return Err(Error::InvalidArgument(format!(
            "Blaschke parameter |a| = {} > 1",
            a.norm()
        )));
    }
    let b = -a * Complex64::from_polar(1.0, psi - psi_d);
    let u = blaschke_series(a, psi, k)?;
    let v = blaschke_series(b, psi_d, k)?;
    CaratheodoryPair::new(coefficients_of(&u)?, coefficients_of(&v)?)
}

/// Body-direct pair from real `c1 ∈ [-2, 2]` and polar offsets inside the two
/// body disks; `rho_*` is the fraction of the disk radius. Coefficients past
/// index 2 are not sampled and stay zero.
pub fn body_direct_pair(
    c1: f64,
    rho_c: f64,
    theta_c: f64,
    rho_d: f64,
    theta_d: f64,
    k: usize,
) -> Result<CaratheodoryPair> {
    if !(-2.0..=2.0).contains(&c1) || !(0.0..=1.0).contains(&rho_c) || !(0.0..=1.0).contains(&rho_d)
    {
        return Err(Error::InvalidArgument(format!(
            "body-direct parameters out of range (c1 = {c1}, rho_c = {rho_c}, rho_d = {rho_d})"
        )));
    }
    let center = C64::new(c1 * c1 / 2.0, 0.0);
    let radius = 2.0 - c1 * c1 / 2.0;
    let mut c = vec![zero(); k.max(2)];
    let mut d = vec![zero(); k.max(2)];
    c[0] = C64::new(c1, 0.0);
    c[1] = center + Complex64::from_polar(radius * rho_c, theta_c);
    d[0] = -c[0];
    d[1] = center + Complex64::from_polar(radius * rho_d, theta_d);
    CaratheodoryPair::new(c, d)
}

/// Raw parameters of one draw from a sampling family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum FamilyDraw {
    Rotation {
        eta: C64,
    },
    QuadraticBlaschke {
        a: C64,
        psi: f64,
        psi_d: f64,
    },
    BodyDirect {
        c1: f64,
        rho_c: f64,
        theta_c: f64,
        rho_d: f64,
        theta_d: f64,
    },
}

impl FamilyDraw {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, family: Family) -> Self {
        match family {
            Family::Rotation => FamilyDraw::Rotation {
                eta: Complex64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI)),
            },
            Family::QuadraticBlaschke => FamilyDraw::QuadraticBlaschke {
                // uniform in the closed unit disk
                a: Complex64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..2.0 * PI)),
                psi: rng.gen_range(0.0..2.0 * PI),
                psi_d: rng.gen_range(0.0..2.0 * PI),
            },
            Family::BodyDirect => FamilyDraw::BodyDirect {
                c1: rng.gen_range(-2.0..=2.0),
                rho_c: rng.gen::<f64>().sqrt(),
                theta_c: rng.gen_range(0.0..2.0 * PI),
                rho_d: rng.gen::<f64>().sqrt(),
                theta_d: rng.gen_range(0.0..2.0 * PI),
            },
        }
    }

    /// The full pair, built through the series machinery.
    pub fn pair(&self, k: usize) -> Result<CaratheodoryPair> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("K = {k} < 2")));
        }
        match *self {
            FamilyDraw::Rotation { eta } => rotation_pair(eta, k),
            FamilyDraw::QuadraticBlaschke { a, psi, psi_d } => blaschke_pair(a, psi, psi_d, k),
            FamilyDraw::BodyDirect {
                c1,
                rho_c,
                theta_c,
                rho_d,
                theta_d,
            } => body_direct_pair(c1, rho_c, theta_c, rho_d, theta_d, k),
        }
    }

    /// `(c_1, c_2, d_2)` in closed form, without building series.
    pub fn leading(&self) -> (C64, C64, C64) {
        match *self {
            FamilyDraw::Rotation { eta } => (2.0 * eta, 2.0 * eta * eta, 2.0 * eta * eta),
            FamilyDraw::QuadraticBlaschke { a, psi, psi_d } => {
                // w = e^{iψ}(a z + (1 - |a|²) z² + …), and h_2 = 2 w_2 + 2 w_1²
                let b = -a * Complex64::from_polar(1.0, psi - psi_d);
                let side = |x: C64, rot: f64| {
                    let e = Complex64::from_polar(1.0, rot);
                    let (w1, w2) = (e * x, e * (1.0 - x.norm_sqr()));
                    (2.0 * w1, 2.0 * w2 + 2.0 * w1 * w1)
                };
                let (c1, c2) = side(a, psi);
                let (_, d2) = side(b, psi_d);
                (c1, c2, d2)
            }
            FamilyDraw::BodyDirect {
                c1,
                rho_c,
                theta_c,
                rho_d,
                theta_d,
            } => {
                let center = C64::new(c1 * c1 / 2.0, 0.0);
                let radius = 2.0 - c1 * c1 / 2.0;
                (
                    C64::new(c1, 0.0),
                    center + Complex64::from_polar(radius * rho_c, theta_c),
                    center + Complex64::from_polar(radius * rho_d, theta_d),
                )
            }
        }
    }
}

/// Draws one pair of the given family from `rng`.
pub fn sample_pair<R: Rng + ?Sized>(
    rng: &mut R,
    k: usize,
    family: Family,
) -> Result<CaratheodoryPair> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("K = {k} < 2")));
    }
    FamilyDraw::sample(rng, family).pair(k)
}

/// [`sample_pair`] with a fresh ChaCha8 generator seeded from `seed`.
pub fn sample_pair_seeded(seed: u64, k: usize, family: Family) -> Result<CaratheodoryPair> {
    sample_pair(&mut ChaCha8Rng::seed_from_u64(seed), k, family)
}

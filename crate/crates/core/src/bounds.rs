//! Closed-form coefficient and Fekete–Szegő bounds.
//!
//! These are closed forms written out directly, not derived from
//! [`crate::classes::synthesis_weights`], so the two can be checked against
//! each other. The corollaries in [`Corollary`] are separate code paths again.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::classes::{ClassSpec, ClassTag};
use crate::error::{Error, Result};
use crate::shell::TAU;

/// `μ` values used by [`reduction_check`].
pub const REDUCTION_MUS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `|h(μ)| ≤ threshold`; the bound does not depend on `μ`.
    Inner,
    /// `|h(μ)| > threshold`; the bound is `4|h(μ)|`.
    Outer,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::Inner => "inner",
            Branch::Outer => "outer",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub a2_bound: f64,
    pub a3_bound: f64,
    pub fs_bound: f64,
    pub h_mu: f64,
    pub threshold: f64,
    pub branch: Branch,
    /// Denominator of `h(μ)`, e.g. `4[γτ(1+2α+2λ) + (1-3τ)(1+α)²]`.
    pub denominator: f64,
    /// Radicand of the `|a_2|` bound. For WSL this is the bracket of the
    /// denominator, for the other classes the quantity called `M`.
    #[serde(rename = "M")]
    pub m: f64,
}

fn degenerate(what: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::DegenerateDenominator { what, value })
    }
}

/// The radicand under the `|a_2|` bound, required positive.
pub fn radicand(spec: &ClassSpec) -> Result<f64> {
    spec.validate()?;
    let (g, l, a, t) = (spec.gamma, spec.lambda, spec.alpha, TAU);
    let value = match spec.tag {
        ClassTag::Wsl => {
            g * t * (1.0 + 2.0 * a + 2.0 * l) + (1.0 - 3.0 * t) * (1.0 + a) * (1.0 + a)
        }
        ClassTag::Rsl => {
            g * t * (2.0 + l) * (1.0 + l) + 2.0 * (1.0 - 3.0 * t) * (1.0 + l) * (1.0 + l)
        }
        ClassTag::Slb => (2.0 * l - 1.0) * (t * (3.0 - 5.0 * l) + 2.0 * l - 1.0),
        ClassTag::Psl => (1.0 + l) * (1.0 + l) - 2.0 * t * (2.0 * l * l + 2.0 * l + 1.0),
    };
    degenerate("a2 bound radicand", value)
}

pub fn bound_a2(spec: &ClassSpec) -> Result<f64> {
    let m = radicand(spec)?;
    let (g, at) = (spec.gamma, TAU.abs());
    Ok(match spec.tag {
        ClassTag::Wsl => g.abs() * at / m.sqrt(),
        ClassTag::Rsl => std::f64::consts::SQRT_2 * g.abs() * at / m.sqrt(),
        ClassTag::Slb | ClassTag::Psl => at / m.sqrt(),
    })
}

pub fn bound_a3(spec: &ClassSpec) -> Result<f64> {
    let m = radicand(spec)?;
    let (g, l, a, t) = (spec.gamma, spec.lambda, spec.alpha, TAU);
    let at = t.abs();
    Ok(match spec.tag {
        ClassTag::Wsl => {
            let s = 1.0 + 2.0 * a + 2.0 * l;
            g.abs() * at * (1.0 - 3.0 * t) * (1.0 + a) * (1.0 + a) / (s * m)
        }
        ClassTag::Rsl => g.abs() * at * (m - 2.0 * (2.0 + l) * g * t) / ((2.0 + l) * m),
        ClassTag::Slb => {
            let num = (2.0 * l - 1.0).powi(2) - 2.0 * (5.0 * l * l - 4.0 * l + 1.0) * t;
            at * num / ((3.0 * l - 1.0) * m)
        }
        ClassTag::Psl => at * (1.0 - 4.0 * t) * (1.0 + l) * (1.0 + l) / (2.0 * (1.0 + 2.0 * l) * m),
    })
}

/// `(h(μ), denominator of h, threshold)` for a spec.
fn h_parts(spec: &ClassSpec, mu: f64, m: f64) -> (f64, f64, f64) {
    let (g, l, a, t) = (spec.gamma, spec.lambda, spec.alpha, TAU);
    let at = t.abs();
    let (num, den, threshold) = match spec.tag {
        ClassTag::Wsl => (
            g * g * t * t,
            4.0 * m,
            g * at / (4.0 * (1.0 + 2.0 * a + 2.0 * l)),
        ),
        ClassTag::Rsl => (g * g * t * t, 2.0 * m, g * at / (4.0 * (2.0 + l))),
        ClassTag::Slb => (t * t, 4.0 * m, at / (4.0 * (3.0 * l - 1.0))),
        ClassTag::Psl => (t * t, 4.0 * m, at / (8.0 * (1.0 + 2.0 * l))),
    };
    ((1.0 - mu) * num / den, den, threshold)
}

/// Full report: the `|a_2|`, `|a_3|` bounds and the piecewise Fekete–Szegő
/// bound at `mu`.
pub fn bound_fs(spec: &ClassSpec, mu: f64) -> Result<BoundReport> {
    if !mu.is_finite() {
        return Err(Error::InvalidArgument(format!("mu = {mu} is not finite")));
    }
    let m = radicand(spec)?;
    let (h_mu, denominator, threshold) = h_parts(spec, mu, m);
    let (branch, fs_bound) = if h_mu.abs() <= threshold {
        (Branch::Inner, 4.0 * threshold)
    } else {
        (Branch::Outer, 4.0 * h_mu.abs())
    };
    Ok(BoundReport {
        a2_bound: bound_a2(spec)?,
        a3_bound: bound_a3(spec)?,
        fs_bound,
        h_mu,
        threshold,
        branch,
        denominator,
        m,
    })
}

/// Both branches of the FS bound evaluated at `|h| = threshold`:
/// `(inner value, 4·threshold)`.
pub fn branch_values_at_threshold(spec: &ClassSpec) -> Result<(f64, f64)> {
    let r = bound_fs(spec, 1.0)?;
    Ok((r.fs_bound, 4.0 * r.threshold))
}

/// The `μ` (above 1) at which `|h(μ)|` meets the threshold.
pub fn breakpoint_mu(spec: &ClassSpec) -> Result<f64> {
    let m = radicand(spec)?;
    let (h0, _, threshold) = h_parts(spec, 0.0, m);
    Ok(1.0 + threshold / h0.abs())
}

/// The FS bound phrased through `|μ - 1|` and `M`, as the theorems for RSL,
/// SLB and PSL state it (and Th1 for WSL with `M` the bracket).
pub fn bound_fs_m_form(spec: &ClassSpec, mu: f64) -> Result<f64> {
    let m = radicand(spec)?;
    let (g, l, a, t) = (spec.gamma, spec.lambda, spec.alpha, TAU);
    let at = t.abs();
    let d = (mu - 1.0).abs();
    Ok(match spec.tag {
        ClassTag::Wsl => {
            let s = 1.0 + 2.0 * a + 2.0 * l;
            if d <= m / (g * at * s) {
                g * at / s
            } else {
                g * g * t * t * d / m
            }
        }
        ClassTag::Rsl => {
            if d <= m / (2.0 * g * at * (2.0 + l)) {
                g * at / (2.0 + l)
            } else {
                2.0 * g * g * t * t * d / m
            }
        }
        ClassTag::Slb => {
            if d <= m / (at * (3.0 * l - 1.0)) {
                at / (3.0 * l - 1.0)
            } else {
                t * t * d / m
            }
        }
        ClassTag::Psl => {
            if d <= m / (2.0 * at * (1.0 + 2.0 * l)) {
                at / (2.0 * (1.0 + 2.0 * l))
            } else {
                t * t * d / m
            }
        }
    })
}

/// Largest absolute difference between the two specs' `|a_2|`, `|a_3|` and
/// FS bounds (the latter at each of [`REDUCTION_MUS`]).
pub fn reduction_check(a: &ClassSpec, b: &ClassSpec) -> Result<f64> {
    let mut worst = (bound_a2(a)? - bound_a2(b)?).abs();
    worst = worst.max((bound_a3(a)? - bound_a3(b)?).abs());
    for mu in REDUCTION_MUS {
        worst = worst.max((bound_fs(a, mu)?.fs_bound - bound_fs(b, mu)?.fs_bound).abs());
    }
    Ok(worst)
}

/// Named special cases with their own closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Corollary {
    /// WSL with `α = 1 + 2λ`.
    Fsl { gamma: f64, lambda: f64 },
    /// WSL with `λ = 0`.
    Bsl { gamma: f64, alpha: f64 },
    /// WSL with `λ = 0, α = 1`.
    Hsl { gamma: f64 },
    /// PSL with `λ = 0`.
    Sl,
    /// PSL with `λ = 1`.
    Ksl,
}

impl Corollary {
    /// The theorem-level spec this corollary specialises.
    pub fn parent(&self) -> ClassSpec {
        match *self {
            Corollary::Fsl { gamma, lambda } => ClassSpec::fsl(gamma, lambda),
            Corollary::Bsl { gamma, alpha } => ClassSpec::bsl(gamma, alpha),
            Corollary::Hsl { gamma } => ClassSpec::hsl(gamma),
            Corollary::Sl => ClassSpec::sl(),
            Corollary::Ksl => ClassSpec::ksl(),
        }
    }

    pub fn bound_a2(&self) -> Result<f64> {
        let (t, at) = (TAU, TAU.abs());
        Ok(match *self {
            Corollary::Fsl { gamma, lambda } => {
                let r = 3.0 * gamma * t * (1.0 + 2.0 * lambda)
                    + 4.0 * (1.0 - 3.0 * t) * (1.0 + lambda).powi(2);
                gamma * at / degenerate("fsl radicand", r)?.sqrt()
            }
            Corollary::Bsl { gamma, alpha } => {
                let r = gamma * t * (1.0 + 2.0 * alpha) + (1.0 - 3.0 * t) * (1.0 + alpha).powi(2);
                gamma * at / degenerate("bsl radicand", r)?.sqrt()
            }
            Corollary::Hsl { gamma } => {
                let r = 3.0 * gamma * t + 4.0 * (1.0 - 3.0 * t);
                gamma * at / degenerate("hsl radicand", r)?.sqrt()
            }
            Corollary::Sl => at / (1.0 - 2.0 * t).sqrt(),
            Corollary::Ksl => at / (4.0 - 10.0 * t).sqrt(),
        })
    }

    pub fn bound_a3(&self) -> Result<f64> {
        let (t, at) = (TAU, TAU.abs());
        Ok(match *self {
            Corollary::Fsl { gamma, lambda } => {
                let r = 3.0 * gamma * t * (1.0 + 2.0 * lambda)
                    + 4.0 * (1.0 - 3.0 * t) * (1.0 + lambda).powi(2);
                let r = degenerate("fsl radicand", r)?;
                4.0 * gamma * at * (1.0 - 3.0 * t) * (1.0 + lambda).powi(2)
                    / (3.0 * (1.0 + 2.0 * lambda) * r)
            }
            Corollary::Bsl { gamma, alpha } => {
                let r = gamma * t * (1.0 + 2.0 * alpha) + (1.0 - 3.0 * t) * (1.0 + alpha).powi(2);
                let r = degenerate("bsl radicand", r)?;
                gamma * at * (1.0 - 3.0 * t) * (1.0 + alpha).powi(2) / ((1.0 + 2.0 * alpha) * r)
            }
            Corollary::Hsl { gamma } => {
                let r = degenerate("hsl radicand", 3.0 * gamma * t + 4.0 * (1.0 - 3.0 * t))?;
                4.0 * gamma * at * (1.0 - 3.0 * t) / (3.0 * r)
            }
            Corollary::Sl => at * (1.0 - 4.0 * t) / (2.0 - 4.0 * t),
            Corollary::Ksl => at * (1.0 - 4.0 * t) / (6.0 - 15.0 * t),
        })
    }

    /// Piecewise FS bound in the `|μ - 1|` phrasing.
    pub fn bound_fs(&self, mu: f64) -> Result<f64> {
        let (t, at) = (TAU, TAU.abs());
        let d = (mu - 1.0).abs();
        let piecewise = |cut: f64, inner: f64, outer: f64| if d <= cut { inner } else { outer };
        Ok(match *self {
            Corollary::Fsl { gamma, lambda } => {
                let r = 3.0 * gamma * t * (1.0 + 2.0 * lambda)
                    + 4.0 * (1.0 - 3.0 * t) * (1.0 + lambda).powi(2);
                let r = degenerate("fsl radicand", r)?;
                let s = 3.0 * (1.0 + 2.0 * lambda);
                piecewise(
                    r / (gamma * at * s),
                    gamma * at / s,
                    gamma * gamma * t * t * d / r,
                )
            }
            Corollary::Bsl { gamma, alpha } => {
                let r = gamma * t * (1.0 + 2.0 * alpha) + (1.0 - 3.0 * t) * (1.0 + alpha).powi(2);
                let r = degenerate("bsl radicand", r)?;
                let s = 1.0 + 2.0 * alpha;
                piecewise(
                    r / (gamma * at * s),
                    gamma * at / s,
                    gamma * gamma * t * t * d / r,
                )
            }
            Corollary::Hsl { gamma } => {
                let r = degenerate("hsl radicand", 3.0 * gamma * t + 4.0 * (1.0 - 3.0 * t))?;
                piecewise(
                    r / (3.0 * gamma * at),
                    gamma * at / 3.0,
                    gamma * gamma * t * t * d / r,
                )
            }
            Corollary::Sl => piecewise(
                (1.0 - 2.0 * t) / (2.0 * at),
                at / 2.0,
                t * t * d / (1.0 - 2.0 * t),
            ),
            Corollary::Ksl => piecewise(
                (2.0 - 5.0 * t) / (3.0 * at),
                at / 6.0,
                t * t * d / (4.0 - 10.0 * t),
            ),
        })
    }

    /// Largest difference against the parent theorem over `|a_2|`, `|a_3|`
    /// and the FS bound at [`REDUCTION_MUS`].
    pub fn parent_discrepancy(&self) -> Result<f64> {
        let p = self.parent();
        let mut worst = (self.bound_a2()? - bound_a2(&p)?).abs();
        worst = worst.max((self.bound_a3()? - bound_a3(&p)?).abs());
        for mu in REDUCTION_MUS {
            worst = worst.max((self.bound_fs(mu)? - bound_fs(&p, mu)?.fs_bound).abs());
        }
        Ok(worst)
    }
}

//! The four bi-univalent classes as executable operators, and the map from
//! Carathéodory coefficients to `(a_2², a_3)` that their coefficient proofs
//! go through.
//!
//! Each class is characterised by an operator `Φ[f]` with `Φ[f](0) = 1`, and
//! membership means `Φ[f] ≺ p` and `Φ[f⁻¹] ≺ p` for the shell-like generator
//! `p`. Matching the first two coefficients of `Φ[f] = p(u)` and
//! `Φ[f⁻¹] = p(v)` gives four linear equations, from which
//!
//! ```text
//! a_2² = W · (c_2 + d_2)          a_3 = a_2² + K · (c_2 - d_2)
//! ```
//!
//! with class-specific weights `W` and `K` (see [`SynthesisWeights`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::caratheodory::CaratheodoryPair;
use crate::error::{Error, Result};
use crate::series::{TruncatedSeries, C64};
use crate::shell::TAU;

/// Denominators with magnitude at or below this are rejected as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassTag {
    /// `1 + ((1-α+2λ) f/z + (α-2λ) f' + λ z f'' - 1)/γ`
    Wsl,
    /// `1 + (z^{1-λ} f' / f^{1-λ} - 1)/γ`
    Rsl,
    /// `z (f')^λ / f`
    Slb,
    /// `(z f' + λ z² f'') / ((1-λ) f + λ z f')`
    Psl,
}

impl ClassTag {
    pub const ALL: [ClassTag; 4] = [ClassTag::Wsl, ClassTag::Rsl, ClassTag::Slb, ClassTag::Psl];

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::Wsl => "wsl",
            ClassTag::Rsl => "rsl",
            ClassTag::Slb => "slb",
            ClassTag::Psl => "psl",
        }
    }

    /// Whether the class carries the `γ` parameter.
    pub fn has_gamma(self) -> bool {
        matches!(self, ClassTag::Wsl | ClassTag::Rsl)
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        ClassTag::ALL
            .into_iter()
            .find(|t| t.name() == lower)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown class '{s}'")))
    }
}

/// Class tag plus parameters. Parameters a class does not use are ignored;
/// `gamma` must stay 1 for the classes without it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub tag: ClassTag,
    pub gamma: f64,
    pub lambda: f64,
    pub alpha: f64,
    /// Fekete–Szegő parameter; only read by the FS functional and bound.
    pub mu: f64,
}

impl ClassSpec {
    pub fn new(tag: ClassTag, gamma: f64, lambda: f64, alpha: f64) -> Self {
        Self {
            tag,
            gamma,
            lambda,
            alpha,
            mu: 0.0,
        }
    }

    pub fn wsl(gamma: f64, lambda: f64, alpha: f64) -> Self {
        Self::new(ClassTag::Wsl, gamma, lambda, alpha)
    }

    pub fn rsl(gamma: f64, lambda: f64) -> Self {
        Self::new(ClassTag::Rsl, gamma, lambda, 0.0)
    }

    pub fn slb(lambda: f64) -> Self {
        Self::new(ClassTag::Slb, 1.0, lambda, 0.0)
    }

    pub fn psl(lambda: f64) -> Self {
        Self::new(ClassTag::Psl, 1.0, lambda, 0.0)
    }

    /// `α = 1 + 2λ` in the WSL family.
    pub fn fsl(gamma: f64, lambda: f64) -> Self {
        Self::wsl(gamma, lambda, 1.0 + 2.0 * lambda)
    }

    /// `λ = 0` in the WSL family.
    pub fn bsl(gamma: f64, alpha: f64) -> Self {
        Self::wsl(gamma, 0.0, alpha)
    }

    /// `λ = 0, α = 1` in the WSL family, operator `1 + (f' - 1)/γ`.
    pub fn hsl(gamma: f64) -> Self {
        Self::wsl(gamma, 0.0, 1.0)
    }

    /// Shell-like starlike functions, `z f'/f ≺ p`.
    pub fn sl() -> Self {
        Self::psl(0.0)
    }

    /// Convex shell-like functions, `1 + z f''/f' ≺ p`.
    pub fn ksl() -> Self {
        Self::psl(1.0)
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(format!("{}: {msg}", self.tag)));
        for (name, v) in [
            ("gamma", self.gamma),
            ("lambda", self.lambda),
            ("alpha", self.alpha),
            ("mu", self.mu),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} = {v} is not finite"));
            }
        }
        if self.tag.has_gamma() {
            if self.gamma <= 0.0 {
                return bad(format!("gamma = {} must be a positive real", self.gamma));
            }
        } else if self.gamma != 1.0 {
            return bad(format!("class has no gamma parameter (got {})", self.gamma));
        }
        let l = self.lambda;
        match self.tag {
            ClassTag::Wsl if self.alpha < 0.0 || l < 0.0 => {
                bad("requires alpha >= 0 and lambda >= 0".into())
            }
            ClassTag::Rsl if l < 0.0 => bad("requires lambda >= 0".into()),
            ClassTag::Slb if l < 1.0 => bad("requires lambda >= 1".into()),
            ClassTag::Psl if !(0.0..=1.0).contains(&l) => bad("requires 0 <= lambda <= 1".into()),
            _ => Ok(()),
        }
    }

    /// `γ` for WSL/RSL, 1 otherwise.
    pub fn effective_gamma(&self) -> f64 {
        if self.tag.has_gamma() {
            self.gamma
        } else {
            1.0
        }
    }

    /// The factor `s` in `a_3 - a_2² = γ (c_2 - d_2) τ / (4 s)`.
    pub fn scale(&self) -> f64 {
        let (a, l) = (self.alpha, self.lambda);
        match self.tag {
            ClassTag::Wsl => 1.0 + 2.0 * a + 2.0 * l,
            ClassTag::Rsl => 2.0 + l,
            ClassTag::Slb => 3.0 * l - 1.0,
            ClassTag::Psl => 2.0 * (1.0 + 2.0 * l),
        }
    }
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            ClassTag::Wsl => write!(
                f,
                "wsl(gamma={}, lambda={}, alpha={})",
                self.gamma, self.lambda, self.alpha
            ),
            ClassTag::Rsl => write!(f, "rsl(gamma={}, lambda={})", self.gamma, self.lambda),
            ClassTag::Slb => write!(f, "slb(lambda={})", self.lambda),
            ClassTag::Psl => write!(f, "psl(lambda={})", self.lambda),
        }
    }
}

/// Linear weights of the synthesis: `a_2² = sum_weight (c_2 + d_2)` and
/// `a_3 - a_2² = diff_weight (c_2 - d_2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisWeights {
    pub sum_weight: f64,
    pub diff_weight: f64,
    /// Full denominator of `sum_weight`.
    pub denominator: f64,
}

/// Weights obtained by adding and subtracting the second-coefficient equations.
pub fn synthesis_weights(spec: &ClassSpec) -> Result<SynthesisWeights> {
    spec.validate()?;
    let (g, l, a, t) = (spec.effective_gamma(), spec.lambda, spec.alpha, TAU);
    let s = spec.scale();
    let denominator = match spec.tag {
        ClassTag::Wsl => 4.0 * (g * t * s + (1.0 - 3.0 * t) * (1.0 + a).powi(2)),
        ClassTag::Rsl => {
            2.0 * (g * t * (2.0 + l) * (1.0 + l) + 2.0 * (1.0 - 3.0 * t) * (1.0 + l).powi(2))
        }
        ClassTag::Slb => 4.0 * (2.0 * l - 1.0) * (t * (3.0 - 5.0 * l) + 2.0 * l - 1.0),
        ClassTag::Psl => 4.0 * ((1.0 + l).powi(2) - 2.0 * t * (2.0 * l * l + 2.0 * l + 1.0)),
    };
    if denominator.abs() <= DEGENERATE_TOL {
        return Err(Error::DegenerateDenominator {
            what: "a2^2 synthesis",
            value: denominator,
        });
    }
    if s.abs() <= DEGENERATE_TOL {
        return Err(Error::DegenerateDenominator {
            what: "a3 scale",
            value: s,
        });
    }
    Ok(SynthesisWeights {
        sum_weight: g * g * t * t / denominator,
        diff_weight: g * t / (4.0 * s),
        denominator,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub a2sq: C64,
    /// Principal square root of `a2sq`.
    pub a2: C64,
    pub a3: C64,
    /// `a_3 - μ a_2²`.
    pub fs: C64,
}

/// `(a_2², a_3, a_3 - μ a_2²)` from the second Carathéodory coefficients alone.
pub fn synthesize_coeffs(spec: &ClassSpec, c2: C64, d2: C64) -> Result<SynthesisResult> {
    let w = synthesis_weights(spec)?;
    Ok(synthesize_with(&w, spec.mu, c2, d2))
}

#[inline]
pub(crate) fn synthesize_with(w: &SynthesisWeights, mu: f64, c2: C64, d2: C64) -> SynthesisResult {
    let a2sq = (c2 + d2) * w.sum_weight;
    let a3 = (c2 - d2) * w.diff_weight + a2sq;
    SynthesisResult {
        a2sq,
        a2: a2sq.sqrt(),
        a3,
        fs: a3 - a2sq * mu,
    }
}

pub fn synthesize(spec: &ClassSpec, pair: &CaratheodoryPair) -> Result<SynthesisResult> {
    synthesize_coeffs(spec, pair.c2(), pair.d2())
}

/// `a_2` from the first-coefficient equation, e.g. `(1+α) a_2 / γ = c_1 τ / 2` for WSL.
pub fn first_order_a2(spec: &ClassSpec, c1: C64) -> Result<C64> {
    spec.validate()?;
    let (g, l, a) = (spec.effective_gamma(), spec.lambda, spec.alpha);
    let factor = match spec.tag {
        ClassTag::Wsl => 1.0 + a,
        ClassTag::Rsl | ClassTag::Psl => 1.0 + l,
        ClassTag::Slb => 2.0 * l - 1.0,
    };
    Ok(c1 * (g * TAU / (2.0 * factor)))
}

/// `|first_order_a2² - a2sq|`. Zero exactly when the pair is consistent with
/// a single `f`: the four coefficient equations are then simultaneously
/// solvable. Independently drawn `u`, `v` generally are not.
pub fn linear_consistency_defect(spec: &ClassSpec, pair: &CaratheodoryPair) -> Result<f64> {
    let a2 = first_order_a2(spec, pair.c1())?;
    let syn = synthesize(spec, pair)?;
    Ok((a2 * a2 - syn.a2sq).norm())
}

/// `|a_3 - μ a_2²|`.
pub fn fs_functional(a2: C64, a3: C64, mu: f64) -> f64 {
    (a3 - a2 * a2 * mu).norm()
}

/// The left-hand side `Φ[f]` of the class definition as a series with
/// constant term 1. The order drops by one relative to `f`.
pub fn class_operator(spec: &ClassSpec, f: &TruncatedSeries) -> Result<TruncatedSeries> {
    spec.validate()?;
    if !f.is_normalized() {
        return Err(Error::NotNormalized);
    }
    if f.order() < 2 {
        return Err(Error::InvalidArgument(
            "class operator needs f of order >= 2".into(),
        ));
    }
    let (g, l, a) = (spec.effective_gamma(), spec.lambda, spec.alpha);
    let re = |x: f64| C64::new(x, 0.0);
    let f_over_z = f.shift_down()?;
    let fp = f.differentiate();
    let z_fpp = fp.differentiate().shift_up();
    let one = TruncatedSeries::constant(re(1.0), f_over_z.order());

    let gamma_form = |inner: TruncatedSeries| &one + &(&inner - &one).scale(re(1.0 / g));
    match spec.tag {
        ClassTag::Wsl => {
            let inner = &(&f_over_z.scale(re(1.0 - a + 2.0 * l)) + &fp.scale(re(a - 2.0 * l)))
                + &z_fpp.scale(re(l));
            Ok(gamma_form(inner))
        }
        ClassTag::Rsl => {
            // z^{1-λ} f' / f^{1-λ} = f' · (f/z)^{λ-1}
            let inner = &fp * &f_over_z.powf(l - 1.0)?;
            Ok(gamma_form(inner))
        }
        ClassTag::Slb => fp.powf(l)?.div(&f_over_z),
        ClassTag::Psl => {
            // numerator and denominator both divided by z
            let num = &fp + &z_fpp.scale(re(l));
            let den = &f_over_z.scale(re(1.0 - l)) + &fp.scale(re(l));
            num.div(&den)
        }
    }
}

/// Inverts the first two coefficients of `p(u(z))` for the generator `p`:
/// given `Φ = 1 + q_1 z + q_2 z² + ...` returns `(c_1, c_2)` of
/// `h = (1+u)/(1-u)`, using `q_1 = c_1 τ/2` and
/// `q_2 = (c_2 - c_1²/2) τ/2 + 3 c_1² τ²/4`.
pub fn recover_caratheodory(phi: &TruncatedSeries) -> Result<(C64, C64)> {
    if phi.order() < 2 {
        return Err(Error::InvalidArgument(
            "need the z and z^2 coefficients".into(),
        ));
    }
    let (q1, q2) = (phi.coeff(1), phi.coeff(2));
    let c1 = q1 * (2.0 / TAU);
    let c2 = (q2 - c1 * c1 * (0.75 * TAU * TAU)) * (2.0 / TAU) + c1 * c1 / 2.0;
    Ok((c1, c2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn f3(a2: C64, a3: C64, order: usize) -> TruncatedSeries {
        TruncatedSeries::normalized(&[a2, a3], order).unwrap()
    }

    #[test]
    fn validation_domains() {
        assert!(ClassSpec::wsl(1.0, 0.0, 0.0).validate().is_ok());
        assert!(ClassSpec::wsl(1.0, -0.1, 0.0).validate().is_err());
        assert!(ClassSpec::wsl(1.0, 0.0, -0.1).validate().is_err());
        assert!(ClassSpec::wsl(0.0, 0.0, 0.0).validate().is_err());
        assert!(ClassSpec::wsl(-1.0, 0.0, 0.0).validate().is_err());
        assert!(ClassSpec::rsl(1.0, -1.0).validate().is_err());
        assert!(ClassSpec::slb(0.9).validate().is_err());
        assert!(ClassSpec::slb(1.0).validate().is_ok());
        assert!(ClassSpec::psl(1.1).validate().is_err());
        assert!(ClassSpec::psl(0.5).validate().is_ok());
        let mut s = ClassSpec::psl(0.5);
        s.gamma = 2.0;
        assert!(s.validate().is_err());
        assert!(ClassSpec::sl().with_mu(f64::NAN).validate().is_err());
    }

    #[test]
    fn tag_parsing() {
        assert_eq!("PSL".parse::<ClassTag>().unwrap(), ClassTag::Psl);
        assert!("xyz".parse::<ClassTag>().is_err());
    }

    #[test]
    fn identity_is_a_fixed_point_of_every_operator() {
        let z = TruncatedSeries::identity(6);
        for spec in [
            ClassSpec::wsl(1.5, 0.5, 2.0),
            ClassSpec::rsl(0.7, 1.5),
            ClassSpec::slb(2.0),
            ClassSpec::psl(0.3),
        ] {
            let phi = class_operator(&spec, &z).unwrap();
            assert!((phi.coeff(0) - 1.0).norm() < 1e-15);
            for k in 1..=phi.order() {
                assert!(phi.coeff(k).norm() < 1e-15, "{spec} k={k}");
            }
        }
    }

    #[test]
    fn hsl_operator_is_derivative_form() {
        let (a2, a3) = (C64::new(0.2, 0.1), c(-0.3));
        let phi = class_operator(&ClassSpec::hsl(1.0), &f3(a2, a3, 3)).unwrap();
        assert!((phi.coeff(0) - 1.0).norm() < 1e-15);
        assert!((phi.coeff(1) - 2.0 * a2).norm() < 1e-15);
        assert!((phi.coeff(2) - 3.0 * a3).norm() < 1e-15);
    }

    #[test]
    fn slb_at_one_is_starlike_quotient() {
        let a2 = c(0.4);
        let phi = class_operator(&ClassSpec::slb(1.0), &f3(a2, c(0.0), 4)).unwrap();
        assert!((phi.coeff(1) - a2).norm() < 1e-15);
        assert!((phi.coeff(2) + a2 * a2).norm() < 1e-15);
    }

    #[test]
    fn operator_rejects_unnormalized_input() {
        let f = TruncatedSeries::from_real(&[0.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(
            class_operator(&ClassSpec::sl(), &f),
            Err(Error::NotNormalized)
        );
    }

    #[test]
    fn wsl_extremal_synthesis() {
        let t = TAU;
        let r =
            synthesize_coeffs(&ClassSpec::wsl(1.0, 0.0, 0.0).with_mu(1.0), c(2.0), c(2.0)).unwrap();
        let want = t * t / (1.0 - 2.0 * t);
        assert!((r.a2sq.re - want).abs() < 1e-15);
        assert!((r.a2sq.re - 0.170820).abs() < 1e-6);
        assert!(r.fs.norm() < 1e-15);
    }

    #[test]
    fn zero_pair_synthesizes_zero() {
        for spec in [
            ClassSpec::wsl(2.0, 1.0, 3.0),
            ClassSpec::rsl(0.5, 2.0),
            ClassSpec::slb(2.0),
            ClassSpec::ksl(),
        ] {
            let r = synthesize(&spec, &CaratheodoryPair::zero(2)).unwrap();
            assert_eq!(r.a2sq, c(0.0));
            assert_eq!(r.a3, c(0.0));
        }
    }

    #[test]
    fn sl_matches_wsl_base_case_on_a2sq() {
        let a = synthesize_coeffs(&ClassSpec::sl(), c(2.0), c(2.0)).unwrap();
        let b = synthesize_coeffs(&ClassSpec::wsl(1.0, 0.0, 0.0), c(2.0), c(2.0)).unwrap();
        assert!((a.a2sq - b.a2sq).norm() < 1e-15);
    }

    #[test]
    fn fs_functional_examples() {
        assert_eq!(fs_functional(c(0.0), C64::new(0.3, 0.4), 5.0), 0.5);
        let a2 = C64::new(0.3, 0.2);
        assert!(fs_functional(a2, a2 * a2, 1.0) < 1e-16);
        let a2 = c(0.1708f64.sqrt());
        assert!((fs_functional(a2, c(0.1708 + 0.309), 0.0) - 0.4798).abs() < 1e-12);
    }

    #[test]
    fn degenerate_denominator_is_reported() {
        // 4[γτ(1+2α+2λ) + (1-3τ)(1+α)²] crosses zero between γ = 1 and γ = 2 at α = 0, λ = 2.
        let t = TAU;
        let gamma = -(1.0 - 3.0 * t) / (t * 5.0);
        let err = synthesis_weights(&ClassSpec::wsl(gamma, 2.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateDenominator { .. }));
    }

    #[test]
    fn recover_inverts_the_generator_expansion() {
        // h = (1+z)/(1-z) gives u = z and p(u) = p: q1 = τ, q2 = 3τ².
        let p = crate::shell::ptilde_coeffs(4).unwrap();
        let (c1, c2) = recover_caratheodory(&p).unwrap();
        assert!((c1 - 2.0).norm() < 1e-14);
        assert!((c2 - 2.0).norm() < 1e-14);
    }
}

//! Concentration factor families.
//!
//! A concentration factor is a weight profile `sigma(xi)`, sampled at
//! `xi = k/N`, normalized so that `int_0^1 sigma(xi)/xi dxi = 1`. The
//! families here:
//!
//! - `classical_linear`: `sigma(xi) = xi`, the clean-data choice.
//! - `noise_adapted`: `sigma(xi) = C * sqrt(eta)*beta*N*xi / (1 + eta*beta^2*N^2*xi^2)`
//!   with `C = 1/atan(sqrt(eta)*beta*N)` — the minimizer of the jump+noise
//!   energy under the normalization constraint. De-emphasizes both the low
//!   modes (dominated by the jump) and the high modes (dominated by noise).
//! - `truncated_optimal`: the band form `C * (k - k0)_+ / (1 + eta*beta^2*k^2)`
//!   supported on `k0 < k <= N0`, which additionally suppresses leakage from
//!   the smooth part of the signal; `C` comes from the exact normalization
//!   integral.
//! - `regularized_optimal`: the mollified-sign variant of the truncated
//!   factor; strictly positive and converging to it as the mollifier width
//!   drops to zero.
//! - `custom_table`: user-supplied samples, optionally renormalized.

use alloc::format;
use alloc::vec::Vec;

use crate::error::Error;
use crate::quad::{integrate, SIMPSON_TOL};

/// Tolerance on the normalization defect `|int sigma/xi - 1|`.
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// Relative tolerance between the closed-form normalization integral and its
/// quadrature cross-check.
pub const INTEGRAL_CHECK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorFamily {
    ClassicalLinear,
    NoiseAdapted,
    TruncatedOptimal,
    RegularizedOptimal,
    CustomTable,
}

impl FactorFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            FactorFamily::ClassicalLinear => "classical_linear",
            FactorFamily::NoiseAdapted => "noise_adapted",
            FactorFamily::TruncatedOptimal => "truncated_optimal",
            FactorFamily::RegularizedOptimal => "regularized_optimal",
            FactorFamily::CustomTable => "custom_table",
        }
    }
}

/// Parameters of the factor; fields that a family does not use are zero
/// (`eta`, `beta`, `k0`, `epsilon_reg`) or `N` (`n0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorParams {
    pub eta: f64,
    pub beta: f64,
    /// Lower mode cutoff, in mode units; may be non-integer.
    pub k0: f64,
    /// Upper mode cutoff.
    pub n0: usize,
    pub epsilon_reg: f64,
}

/// Closed-form value and quadrature cross-check of
/// `int_{k0/N}^1 (1/xi) * (N xi - k0) / (eta beta^2 N^2 xi^2 + 1) dxi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationIntegral {
    pub closed_form: f64,
    pub quadrature: f64,
}

/// Exact normalization integral of the truncated rational profile:
///
/// ```text
/// k0 ln(k0/N) + (k0/2) ln((eta beta^2 N^2 + 1)/(eta beta^2 k0^2 + 1))
///   + (1/(sqrt(eta) beta)) (atan(sqrt(eta) beta N) - atan(sqrt(eta) beta k0))
/// ```
///
/// The quadrature of the defining integral is evaluated alongside and must
/// agree to [`INTEGRAL_CHECK_TOL`] relative.
pub fn exact_normalization_integral(
    eta: f64,
    beta: f64,
    k0: f64,
    n_eff: usize,
) -> Result<NormalizationIntegral, Error> {
    if !(eta.is_finite() && eta > 0.0) || !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid(
            "eta/beta",
            format!("need finite eta > 0 and beta > 0, got eta = {eta}, beta = {beta}"),
        ));
    }
    let n = n_eff as f64;
    if !(k0.is_finite() && k0 >= 0.0 && k0 < n) {
        return Err(Error::invalid(
            "k0",
            format!("need 0 <= k0 < N_eff, got k0 = {k0}, N_eff = {n_eff}"),
        ));
    }
    let a = libm::sqrt(eta) * beta;
    let log_term = if k0 == 0.0 { 0.0 } else { k0 * libm::log(k0 / n) };
    let closed_form = log_term
        + 0.5 * k0 * libm::log((eta * beta * beta * n * n + 1.0) / (eta * beta * beta * k0 * k0 + 1.0))
        + (libm::atan(a * n) - libm::atan(a * k0)) / a;

    let lo = k0 / n;
    let quadrature = integrate(
        |xi| {
            if xi <= lo {
                return 0.0;
            }
            let w = if k0 == 0.0 { n } else { n - k0 / xi };
            w / (a * a * n * n * xi * xi + 1.0)
        },
        lo,
        1.0,
        SIMPSON_TOL,
    );

    let rel = libm::fabs(closed_form - quadrature) / libm::fabs(closed_form).max(1e-300);
    if rel > INTEGRAL_CHECK_TOL {
        return Err(Error::numeric(
            "exact_normalization_integral",
            format!(
                "closed form {closed_form} vs quadrature {quadrature}: relative gap {rel:e}"
            ),
        ));
    }
    Ok(NormalizationIntegral {
        closed_form,
        quadrature,
    })
}

/// A sampled, normalized concentration factor.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationFactor {
    family: FactorFamily,
    params: FactorParams,
    n: usize,
    /// `s_k = sigma(k/N)` for `k = 1..=N` (index `k - 1`).
    values: Vec<f64>,
    norm_constant: f64,
}

impl ConcentrationFactor {
    /// `sigma(xi) = xi`; already normalized since `int_0^1 (xi/xi) dxi = 1`.
    pub fn classical(n: usize) -> Result<Self, Error> {
        check_n(n)?;
        let values = (1..=n).map(|k| k as f64 / n as f64).collect();
        Ok(ConcentrationFactor {
            family: FactorFamily::ClassicalLinear,
            params: FactorParams {
                eta: 0.0,
                beta: 0.0,
                k0: 0.0,
                n0: n,
                epsilon_reg: 0.0,
            },
            n,
            values,
            norm_constant: 1.0,
        })
    }

    /// Noise-adapted rational factor
    /// `sigma(k/N) = (1/atan(sqrt(eta) beta N)) * sqrt(eta) beta k / (1 + eta beta^2 k^2)`.
    ///
    /// As `sqrt(eta)*beta*N -> 0` this recovers the classical factor.
    pub fn noise_adapted(eta: f64, beta: f64, n: usize) -> Result<Self, Error> {
        check_n(n)?;
        if !(eta.is_finite() && eta > 0.0) || !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid(
                "eta/beta",
                format!("need finite eta > 0 and beta > 0, got eta = {eta}, beta = {beta}"),
            ));
        }
        let a = libm::sqrt(eta) * beta;
        let norm = 1.0 / libm::atan(a * n as f64);
        let values = (1..=n)
            .map(|k| {
                let ak = a * k as f64;
                norm * ak / (1.0 + ak * ak)
            })
            .collect();
        let factor = ConcentrationFactor {
            family: FactorFamily::NoiseAdapted,
            params: FactorParams {
                eta,
                beta,
                k0: 0.0,
                n0: n,
                epsilon_reg: 0.0,
            },
            n,
            values,
            norm_constant: norm,
        };
        factor.check_normalization()?;
        Ok(factor)
    }

    /// Truncated optimal factor `C (k - k0)_+ / (1 + eta beta^2 k^2)` on
    /// `k0 < k <= n0`, zero elsewhere, with `C` the reciprocal of the exact
    /// normalization integral over the support.
    pub fn truncated(eta: f64, beta: f64, k0: f64, n0: usize, n: usize) -> Result<Self, Error> {
        check_n(n)?;
        if !(k0.is_finite() && k0 >= 0.0) || k0 >= n0 as f64 || n0 > n {
            return Err(Error::invalid(
                "k0/N0",
                format!("need 0 <= k0 < N0 <= N, got k0 = {k0}, N0 = {n0}, N = {n}"),
            ));
        }
        let c = 1.0 / exact_normalization_integral(eta, beta, k0, n0)?.closed_form;
        let values = (1..=n)
            .map(|k| {
                let kf = k as f64;
                if kf > k0 && k <= n0 {
                    c * (kf - k0) / (1.0 + eta * beta * beta * kf * kf)
                } else {
                    0.0
                }
            })
            .collect();
        Ok(ConcentrationFactor {
            family: FactorFamily::TruncatedOptimal,
            params: FactorParams {
                eta,
                beta,
                k0,
                n0,
                epsilon_reg: 0.0,
            },
            n,
            values,
            norm_constant: c,
        })
    }

    /// Mollified variant of [`Self::truncated`] (with `N0 = N`): for
    /// `k - k0 > epsilon_reg` it equals the truncated branch; below, the
    /// mollified sign replaces the positive part by
    /// `C eps k / (eps (1 + eta beta^2 k^2) + C k0)`, keeping the factor
    /// strictly positive. Uses the truncated factor's `C`, so its
    /// normalization holds only in the `epsilon_reg -> 0` limit.
    pub fn regularized(
        eta: f64,
        beta: f64,
        k0: f64,
        n: usize,
        epsilon_reg: f64,
    ) -> Result<Self, Error> {
        check_n(n)?;
        if !(epsilon_reg.is_finite() && epsilon_reg > 0.0) {
            return Err(Error::invalid(
                "epsilon_reg",
                format!("mollifier width must be > 0, got {epsilon_reg}"),
            ));
        }
        if !(k0.is_finite() && k0 >= 0.0) || k0 >= n as f64 {
            return Err(Error::invalid(
                "k0",
                format!("need 0 <= k0 < N, got k0 = {k0}, N = {n}"),
            ));
        }
        let c = 1.0 / exact_normalization_integral(eta, beta, k0, n)?.closed_form;
        let values = (1..=n)
            .map(|k| {
                let kf = k as f64;
                let denom = 1.0 + eta * beta * beta * kf * kf;
                if kf - k0 > epsilon_reg {
                    c * (kf - k0) / denom
                } else {
                    c * epsilon_reg * kf / (epsilon_reg * denom + c * k0)
                }
            })
            .collect();
        Ok(ConcentrationFactor {
            family: FactorFamily::RegularizedOptimal,
            params: FactorParams {
                eta,
                beta,
                k0,
                n0: n,
                epsilon_reg,
            },
            n,
            values,
            norm_constant: c,
        })
    }

    /// User-supplied table of `sigma(k/N)`, `k = 1..=N`. With `normalize`
    /// set, the table is rescaled by the reciprocal of the trapezoid-rule
    /// normalization integral (the `xi -> 0` node takes the first ratio, as
    /// `sigma/xi` extends continuously).
    pub fn custom(table: Vec<f64>, normalize: bool) -> Result<Self, Error> {
        let n = table.len();
        check_n(n)?;
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("table", "non-finite entry".into()));
        }
        let mut values = table;
        let mut norm_constant = 1.0;
        if normalize {
            let integral = trapezoid_ratio_integral(&values);
            if libm::fabs(integral) < 1e-12 {
                return Err(Error::invalid(
                    "table",
                    format!("normalization integral {integral:e} too small to rescale"),
                ));
            }
            norm_constant = 1.0 / integral;
            for v in &mut values {
                *v *= norm_constant;
            }
        }
        Ok(ConcentrationFactor {
            family: FactorFamily::CustomTable,
            params: FactorParams {
                eta: 0.0,
                beta: 0.0,
                k0: 0.0,
                n0: n,
                epsilon_reg: 0.0,
            },
            n,
            values,
            norm_constant,
        })
    }

    pub fn family(&self) -> FactorFamily {
        self.family
    }

    pub fn params(&self) -> &FactorParams {
        &self.params
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    /// Sampled values `s_k`, `k = 1..=N`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `sigma(k/N)` for `k` in `1..=N`.
    pub fn value(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn norm_constant(&self) -> f64 {
        self.norm_constant
    }

    /// The continuous profile `sigma(xi)` behind the samples; `None` for
    /// custom tables.
    pub fn profile(&self, xi: f64) -> Option<f64> {
        if !(0.0..=1.0).contains(&xi) {
            return None;
        }
        let n = self.n as f64;
        let p = &self.params;
        let a = libm::sqrt(p.eta) * p.beta;
        match self.family {
            FactorFamily::ClassicalLinear => Some(xi),
            FactorFamily::NoiseAdapted => {
                let t = a * n * xi;
                Some(self.norm_constant * t / (1.0 + t * t))
            }
            FactorFamily::TruncatedOptimal => {
                let k = n * xi;
                if k > p.k0 && k <= p.n0 as f64 {
                    Some(self.norm_constant * (k - p.k0) / (1.0 + a * a * k * k))
                } else {
                    Some(0.0)
                }
            }
            FactorFamily::RegularizedOptimal => {
                let k = n * xi;
                let denom = 1.0 + a * a * k * k;
                if k - p.k0 > p.epsilon_reg {
                    Some(self.norm_constant * (k - p.k0) / denom)
                } else {
                    Some(
                        self.norm_constant * p.epsilon_reg * k
                            / (p.epsilon_reg * denom + self.norm_constant * p.k0),
                    )
                }
            }
            FactorFamily::CustomTable => None,
        }
    }

    /// `sigma(xi)/xi`, extended continuously to `xi = 0`; `None` for custom
    /// tables.
    pub fn profile_over_xi(&self, xi: f64) -> Option<f64> {
        if xi > 0.0 {
            return self.profile(xi).map(|s| s / xi);
        }
        let n = self.n as f64;
        let p = &self.params;
        let a = libm::sqrt(p.eta) * p.beta;
        match self.family {
            FactorFamily::ClassicalLinear => Some(1.0),
            FactorFamily::NoiseAdapted => Some(self.norm_constant * a * n),
            FactorFamily::TruncatedOptimal => {
                Some(if p.k0 > 0.0 { 0.0 } else { self.norm_constant * n })
            }
            FactorFamily::RegularizedOptimal => Some(
                self.norm_constant * p.epsilon_reg * n
                    / (p.epsilon_reg + self.norm_constant * p.k0),
            ),
            FactorFamily::CustomTable => None,
        }
    }

    /// Support of the continuous profile as a `xi` interval.
    pub(crate) fn support(&self) -> (f64, f64) {
        let n = self.n as f64;
        match self.family {
            FactorFamily::TruncatedOptimal => (self.params.k0 / n, (self.params.n0 as f64 / n).min(1.0)),
            _ => (0.0, 1.0),
        }
    }

    /// Quadrature of `int_0^1 sigma(xi)/xi dxi` over the continuous profile
    /// (trapezoid rule on the samples for custom tables).
    pub fn normalization_integral(&self) -> f64 {
        match self.family {
            FactorFamily::CustomTable => trapezoid_ratio_integral(&self.values),
            _ => {
                let (lo, hi) = self.support();
                integrate(
                    |xi| self.profile_over_xi(xi).unwrap_or(0.0),
                    lo,
                    hi,
                    SIMPSON_TOL,
                )
            }
        }
    }

    fn check_normalization(&self) -> Result<(), Error> {
        let integral = self.normalization_integral();
        if libm::fabs(integral - 1.0) > NORMALIZATION_TOL {
            return Err(Error::numeric(
                "normalization",
                format!(
                    "{} factor: int sigma/xi = {integral}, defect {:e}",
                    self.family.as_str(),
                    libm::fabs(integral - 1.0)
                ),
            ));
        }
        Ok(())
    }
}

fn check_n(n: usize) -> Result<(), Error> {
    if n == 0 {
        return Err(Error::invalid("N", "mode count must be >= 1".into()));
    }
    Ok(())
}

/// Trapezoid rule for `int_0^1 sigma/xi` on the sample grid `xi_k = k/N`,
/// with the `xi = 0` node carried by the first ratio (continuous extension).
fn trapezoid_ratio_integral(values: &[f64]) -> f64 {
    let n = values.len();
    let nf = n as f64;
    let ratio = |k: usize| values[k - 1] * nf / k as f64;
    if n == 1 {
        return ratio(1);
    }
    let mut acc = 1.5 * ratio(1) + 0.5 * ratio(n);
    for k in 2..n {
        acc += ratio(k);
    }
    acc / nf
}

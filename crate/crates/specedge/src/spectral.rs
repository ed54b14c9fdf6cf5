//! Fourier coefficients of test signals — exact, by quadrature, and with
//! injected spectral white noise — plus partial-sum evaluation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Error;
use crate::quad::KahanSum;
use crate::signal::SignalSpec;
use crate::{cis, PI, TAU};

/// Relative tolerance for the conjugate-symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Complex Fourier coefficients `c_k` for `|k| <= N` plus noise metadata.
///
/// Conjugate symmetry `c_{-k} = conj(c_k)` holds for every construction in
/// this crate (real-valued signals, symmetric noise); consumers re-check it
/// before trusting the one-sided algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    n: usize,
    /// Index `i` holds `c_{i - N}`; length `2N + 1`.
    coeffs: Vec<Complex64>,
    noise_variance: Option<f64>,
    seed: Option<u64>,
}

impl SpectralData {
    pub fn from_coeffs(n: usize, coeffs: Vec<Complex64>) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::invalid("N", "mode count must be >= 1".into()));
        }
        if coeffs.len() != 2 * n + 1 {
            return Err(Error::invalid(
                "coeffs",
                format!("expected {} coefficients, got {}", 2 * n + 1, coeffs.len()),
            ));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("coeffs", "non-finite coefficient".into()));
        }
        Ok(SpectralData {
            n,
            coeffs,
            noise_variance: None,
            seed: None,
        })
    }

    fn zero(n: usize) -> Self {
        SpectralData {
            n,
            coeffs: vec![Complex64::ZERO; 2 * n + 1],
            noise_variance: None,
            seed: None,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs[(k + self.n as i64) as usize]
    }

    fn coeff_mut(&mut self, k: i64) -> &mut Complex64 {
        &mut self.coeffs[(k + self.n as i64) as usize]
    }

    pub fn noise_variance(&self) -> Option<f64> {
        self.noise_variance
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Largest violation of `c_{-k} = conj(c_k)`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for k in 0..=self.n as i64 {
            let d = (self.coeff(-k) - self.coeff(k).conj()).norm();
            if d > worst {
                worst = d;
            }
        }
        worst
    }

    pub(crate) fn check_symmetry(&self) -> Result<(), Error> {
        let scale = 1.0 + self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tol = SYMMETRY_TOL * scale;
        let defect = self.symmetry_defect();
        if defect > tol {
            return Err(Error::SymmetryViolation {
                defect,
                tolerance: tol,
            });
        }
        Ok(())
    }

    /// `a * lhs + rhs`, coefficientwise. Noise metadata does not survive
    /// linear combination.
    pub fn linear_combination(a: f64, lhs: &SpectralData, rhs: &SpectralData) -> Result<Self, Error> {
        if lhs.n != rhs.n {
            return Err(Error::invalid(
                "N",
                format!("mode counts differ: {} vs {}", lhs.n, rhs.n),
            ));
        }
        let coeffs = lhs
            .coeffs
            .iter()
            .zip(&rhs.coeffs)
            .map(|(l, r)| a * l + r)
            .collect();
        Ok(SpectralData {
            n: lhs.n,
            coeffs,
            noise_variance: None,
            seed: None,
        })
    }
}

/// Exact coefficients of the jump part plus the catalog smooth part.
///
/// The jump part contributes `amplitude * e^{-ik location} / (2 pi i k)` for
/// `k != 0` and nothing at `k = 0` (the jump basis wave is zero-mean).
pub fn analytic_coefficients(signal: &SignalSpec, n: usize) -> Result<SpectralData, Error> {
    if n == 0 {
        return Err(Error::invalid("N", "mode count must be >= 1".into()));
    }
    let mut data = SpectralData::zero(n);
    for k in -(n as i64)..=n as i64 {
        let mut c = signal.smooth_part().coefficient(k);
        if k != 0 {
            let denom = Complex64::new(0.0, TAU * k as f64);
            for j in signal.jumps() {
                c += j.amplitude * cis(-(k as f64) * j.location) / denom;
            }
        }
        *data.coeff_mut(k) = c;
    }
    Ok(data)
}

/// Default sample count for [`quadrature_coefficients`]; keeps aliasing of
/// the catalog smooth parts below test tolerances.
pub fn default_sample_count(n: usize) -> usize {
    (8 * n).max(1024)
}

/// Coefficients by midpoint discretization of `(1/2π) ∫ f(ξ) e^{-ikξ} dξ`
/// with `m` samples. Midpoint sampling keeps samples off the catalog jump
/// locations, which sit on the uniform grid itself.
///
/// Serves as the independent oracle for [`analytic_coefficients`]: exact (to
/// rounding) for band-limited smooth parts once `m > 2N`, first-order for
/// jump parts.
pub fn quadrature_coefficients(
    signal: &SignalSpec,
    n: usize,
    m: usize,
) -> Result<SpectralData, Error> {
    if n == 0 {
        return Err(Error::invalid("N", "mode count must be >= 1".into()));
    }
    if m < 2 * n + 1 {
        return Err(Error::invalid(
            "M",
            format!("sample count {m} aliases: need M >= 2N+1 = {}", 2 * n + 1),
        ));
    }
    let h = TAU / m as f64;
    let samples: Vec<f64> = (0..m)
        .map(|q| signal.eval(-PI + (q as f64 + 0.5) * h))
        .collect();

    let mut data = SpectralData::zero(n);
    for k in 0..=n as i64 {
        let mut re = KahanSum::default();
        let mut im = KahanSum::default();
        // e^{-ik x_q} advanced by recurrence, re-anchored periodically so the
        // phase error stays at a few ulps over M ~ 1e6 samples.
        let step = cis(-(k as f64) * h);
        let mut phase = Complex64::ZERO;
        for (q, &f) in samples.iter().enumerate() {
            if q % 128 == 0 {
                phase = cis(-(k as f64) * (-PI + (q as f64 + 0.5) * h));
            }
            re.add(f * phase.re);
            im.add(f * phase.im);
            phase *= step;
        }
        let c = Complex64::new(re.value(), im.value()) / m as f64;
        *data.coeff_mut(k) = c;
        *data.coeff_mut(-k) = c.conj();
    }
    Ok(data)
}

/// Add spectral white noise of per-mode mean-square power `eta`:
/// `n_hat(k)` for `k >= 1` is complex Gaussian with independent real and
/// imaginary parts of variance `eta/2` each, `n_hat(-k) = conj(n_hat(k))`,
/// and `n_hat(0)` is real Gaussian of variance `eta`. Deterministic for a
/// fixed seed.
pub fn add_white_noise(data: &SpectralData, eta: f64, seed: u64) -> Result<SpectralData, Error> {
    if !eta.is_finite() || eta < 0.0 {
        return Err(Error::invalid("eta", format!("variance {eta} must be >= 0")));
    }
    let mut out = data.clone();
    out.noise_variance = Some(eta);
    out.seed = Some(seed);
    if eta == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = Normal::new(0.0, libm::sqrt(eta / 2.0)).expect("finite std");
    let full = Normal::new(0.0, libm::sqrt(eta)).expect("finite std");
    *out.coeff_mut(0) += Complex64::new(full.sample(&mut rng), 0.0);
    for k in 1..=data.n as i64 {
        let noise = Complex64::new(half.sample(&mut rng), half.sample(&mut rng));
        *out.coeff_mut(k) += noise;
        *out.coeff_mut(-k) += noise.conj();
    }
    Ok(out)
}

/// Evaluate the partial sum `S_N f(x) = sum_{|k| <= N} c_k e^{ikx}` on a
/// grid. Requires conjugate-symmetric data; the residual imaginary part is
/// checked against `SYMMETRY_TOL * sum |c_k|`.
pub fn partial_sum_eval(data: &SpectralData, grid: &[f64]) -> Result<Vec<f64>, Error> {
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::GridError {
            details: "non-finite grid point".into(),
        });
    }
    data.check_symmetry()?;
    let n = data.n as i64;
    let abs_sum: f64 = (-n..=n).map(|k| data.coeff(k).norm()).sum();
    let imag_tol = SYMMETRY_TOL * abs_sum;

    let mut out = Vec::with_capacity(grid.len());
    for &x in grid {
        // c_0 + 2 Re sum_{k>=1} c_k e^{ikx}, accumulated two-sided to expose
        // any symmetry defect in the imaginary residue.
        let mut acc = data.coeff(0);
        let step = cis(x);
        let mut phase = Complex64::new(1.0, 0.0);
        for k in 1..=n {
            if k % 256 == 0 {
                phase = cis(k as f64 * x);
            } else {
                phase *= step;
            }
            acc += data.coeff(k) * phase + data.coeff(-k) * phase.conj();
        }
        if libm::fabs(acc.im) > imag_tol {
            return Err(Error::numeric(
                "partial_sum_eval",
                format!("imaginary residue {:e} exceeds {:e}", acc.im, imag_tol),
            ));
        }
        out.push(acc.re);
    }
    Ok(out)
}

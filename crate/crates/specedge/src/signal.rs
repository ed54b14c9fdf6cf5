//! Piecewise-smooth 2π-periodic test signals: a list of jumps plus a smooth
//! part drawn from a catalog with closed-form Fourier coefficients.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::Error;
use crate::{cis, periodic_distance, PI, TAU};

/// One jump discontinuity: `amplitude = f(location+) - f(location-)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    /// Position in the period cell (−π, π].
    pub location: f64,
    /// Signed jump height; must be nonzero.
    pub amplitude: f64,
}

/// A single real harmonic `cos_amp * cos(mode x) + sin_amp * sin(mode x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Harmonic {
    pub mode: u32,
    pub cos_amp: f64,
    pub sin_amp: f64,
}

/// Smooth-part catalog. Every entry has closed-form Fourier coefficients and
/// a closed-form point evaluation, so both coefficient paths can be checked
/// against each other exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothPart {
    Zero,
    /// Trigonometric polynomial with explicit coefficients `s_hat(k)` for
    /// `k = -K ..= K` (index 0 holds `k = -K`). Must be conjugate-symmetric
    /// so the signal is real-valued.
    TrigPoly { coeffs: Vec<Complex64> },
    /// Scaled sine/cosine combination.
    Harmonics { terms: Vec<Harmonic> },
}

impl SmoothPart {
    /// Coefficient `s_hat(k)`; zero outside the catalog entry's band.
    pub fn coefficient(&self, k: i64) -> Complex64 {
        match self {
            SmoothPart::Zero => Complex64::ZERO,
            SmoothPart::TrigPoly { coeffs } => {
                let half = (coeffs.len() as i64 - 1) / 2;
                if k < -half || k > half {
                    Complex64::ZERO
                } else {
                    coeffs[(k + half) as usize]
                }
            }
            SmoothPart::Harmonics { terms } => {
                let mut c = Complex64::ZERO;
                for t in terms {
                    let m = t.mode as i64;
                    // a cos(mx) + b sin(mx) = ((a - ib)/2) e^{imx} + ((a + ib)/2) e^{-imx}
                    if k == m && m != 0 {
                        c += Complex64::new(t.cos_amp / 2.0, -t.sin_amp / 2.0);
                    } else if k == -m && m != 0 {
                        c += Complex64::new(t.cos_amp / 2.0, t.sin_amp / 2.0);
                    } else if k == 0 && m == 0 {
                        c += Complex64::new(t.cos_amp, 0.0);
                    }
                }
                c
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SmoothPart::Zero => 0.0,
            SmoothPart::TrigPoly { coeffs } => {
                let half = (coeffs.len() as i64 - 1) / 2;
                let mut acc = Complex64::ZERO;
                for (i, c) in coeffs.iter().enumerate() {
                    let k = i as i64 - half;
                    acc += c * cis(k as f64 * x);
                }
                acc.re
            }
            SmoothPart::Harmonics { terms } => terms
                .iter()
                .map(|t| {
                    let mx = t.mode as f64 * x;
                    t.cos_amp * libm::cos(mx) + t.sin_amp * libm::sin(mx)
                })
                .sum(),
        }
    }

    fn validate(&self) -> Result<(), Error> {
        if let SmoothPart::TrigPoly { coeffs } = self {
            if coeffs.len() % 2 == 0 {
                return Err(Error::invalid(
                    "smooth_part",
                    format!("TrigPoly needs an odd coefficient count, got {}", coeffs.len()),
                ));
            }
            let half = (coeffs.len() - 1) / 2;
            for k in 0..=half {
                let pos = coeffs[half + k];
                let neg = coeffs[half - k];
                if (neg - pos.conj()).norm() > 1e-12 {
                    return Err(Error::invalid(
                        "smooth_part",
                        format!("coefficients not conjugate-symmetric at k = {k}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// A test signal: jump list plus smooth part.
///
/// The jump basis function is the zero-mean unit sawtooth `w(x) = 1/2 - x/2π`
/// on (0, 2π), periodized; it has the exact coefficients `1/(2πik)` and an
/// upward unit jump at 0, so a signal built from it has coefficients
///
/// ```text
/// c_k = sum_j amplitude_j * e^{-ik location_j} / (2 pi i k) + s_hat(k),  k != 0
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSpec {
    jumps: Vec<Jump>,
    smooth: SmoothPart,
}

impl SignalSpec {
    pub fn new(jumps: Vec<Jump>, smooth: SmoothPart) -> Result<Self, Error> {
        for (i, j) in jumps.iter().enumerate() {
            if !j.location.is_finite() || j.location <= -PI || j.location > PI {
                return Err(Error::invalid(
                    "jumps",
                    format!("location {} outside (-pi, pi]", j.location),
                ));
            }
            if !j.amplitude.is_finite() || j.amplitude == 0.0 {
                return Err(Error::invalid(
                    "jumps",
                    format!("amplitude at {} must be finite and nonzero", j.location),
                ));
            }
            for other in &jumps[..i] {
                if periodic_distance(j.location, other.location) < 1e-12 {
                    return Err(Error::invalid(
                        "jumps",
                        format!("duplicate jump location {}", j.location),
                    ));
                }
            }
        }
        smooth.validate()?;
        Ok(SignalSpec { jumps, smooth })
    }

    /// Canonical sawtooth: a single unit jump at 0, no smooth part, exact
    /// coefficients `1/(2πik)`.
    pub fn sawtooth() -> Self {
        SignalSpec {
            jumps: vec![Jump {
                location: 0.0,
                amplitude: 1.0,
            }],
            smooth: SmoothPart::Zero,
        }
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn smooth_part(&self) -> &SmoothPart {
        &self.smooth
    }

    /// Point evaluation; at a jump location the midpoint value is returned.
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.smooth.eval(x);
        for j in &self.jumps {
            v += j.amplitude * sawtooth_wave(x - j.location);
        }
        v
    }
}

/// Zero-mean unit sawtooth: `1/2 - u/2π` for `u = x mod 2π` in (0, 2π); the
/// discontinuity at 0 takes the midpoint value 0.
fn sawtooth_wave(x: f64) -> f64 {
    let mut u = libm::fmod(x, TAU);
    if u < 0.0 {
        u += TAU;
    }
    if u == 0.0 {
        return 0.0;
    }
    0.5 - u / TAU
}

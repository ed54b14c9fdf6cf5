//! Adaptive Simpson quadrature and compensated summation.

/// Absolute tolerance for the adaptive rule.
pub(crate) const SIMPSON_TOL: f64 = 1e-10;

const MAX_DEPTH: u32 = 40;

/// Floor on the acceptance test relative to the local panel value, so that
/// integrals much larger than the absolute tolerance terminate once they hit
/// the rounding plateau instead of recursing to the depth cap.
const REL_FLOOR: f64 = 1e-13;

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    let accept = 15.0 * libm::fmax(tol, REL_FLOOR * libm::fabs(left + right));
    if depth >= MAX_DEPTH || libm::fabs(delta) <= accept {
        // Richardson extrapolation term
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)
        + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
}

/// Integrate `f` over `[a, b]` with adaptive Simpson to absolute tolerance
/// `tol`.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    // Seed the recursion with a few panels so that integrands peaked away
    // from the midpoint are not mistaken for quadratics on the first split.
    let panels = 8;
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        let hi = if i == panels - 1 { b } else { lo + h };
        let mid = 0.5 * (lo + hi);
        let flo = f(lo);
        let fmid = f(mid);
        let fhi = f(hi);
        let whole = simpson(flo, fmid, fhi, hi - lo);
        total += adaptive(
            &f,
            lo,
            hi,
            flo,
            fmid,
            fhi,
            whole,
            tol / panels as f64,
            0,
        );
    }
    total
}

/// Compensated (Kahan) accumulator; keeps long uniform-weight sums accurate
/// to a few ulps independent of length.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum
    }
}

//! Independent oracle for the exact normalization integral: a plain
//! composite Simpson rule written here, with no code shared with the
//! library's adaptive quadrature.

use specedge::factor::exact_normalization_integral;

const PI: f64 = std::f64::consts::PI;

fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let x = a + i as f64 * h;
        acc += if i % 2 == 0 { 2.0 } else { 4.0 } * f(x);
    }
    acc * h / 3.0
}

#[test]
fn closed_form_matches_a_plain_simpson_rule() {
    for (eta, beta, k0, n) in [
        (2e-5f64, PI * (2e-5f64).powf(-1.0 / 6.0), 8.0 * PI, 1000usize),
        (4.5e-5, PI * (4.5e-5f64).powf(-1.0 / 6.0), 6.0 * PI, 1000),
        (1e-4, 3.0, 0.0, 500),
        (1e-3, 1.0, 2.0 * PI, 200),
    ] {
        let nf = n as f64;
        let a = eta.sqrt() * beta;
        let lo = k0 / nf;
        let oracle = composite_simpson(
            |xi| {
                if xi <= lo {
                    return if k0 == 0.0 { nf } else { 0.0 };
                }
                (nf - k0 / xi) / (a * a * nf * nf * xi * xi + 1.0)
            },
            lo,
            1.0,
            400_000,
        );
        let closed = exact_normalization_integral(eta, beta, k0, n)
            .unwrap()
            .closed_form;
        let rel = (closed - oracle).abs() / closed.abs();
        assert!(
            rel <= 1e-9,
            "eta = {eta}, beta = {beta}, k0 = {k0}, N = {n}: closed {closed} vs oracle {oracle}"
        );
    }
}

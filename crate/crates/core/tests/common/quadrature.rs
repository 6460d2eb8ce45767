//! Adaptive Simpson quadrature, used as an oracle for the closed-form areas.

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &dyn Fn(f64) -> f64,
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
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Integral of `f` over `[a, b]` to roughly `rel_tol` relative accuracy.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    // coarse pass for the magnitude, then the real tolerance
    let scale = refine(f, a, b, fa, fm, fb, whole, 1e-3 * whole.abs().max(1e-300), 20).abs();
    refine(f, a, b, fa, fm, fb, whole, rel_tol * scale.max(1e-300), 48)
}

/// Area under `1 - e^(-beta u)` on `[0, upper]`, by quadrature.
pub fn score_area(upper: f64, beta: f64) -> f64 {
    integrate(&|u| 1.0 - (-beta * u).exp(), 0.0, upper, 1e-10)
}

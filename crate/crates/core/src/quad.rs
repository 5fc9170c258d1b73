//! Adaptive panel quadrature.
//!
//! Scheme: the integration interval is first split into panels no wider than a
//! caller-supplied bound (a fixed fraction of the local oscillation wavelength
//! for oscillatory integrands), then each panel is integrated by the
//! interpolatory rule at 11 Gauss–Legendre nodes (the integral of the local
//! degree-10 polynomial interpolant). The error estimate is the Richardson
//! difference between a panel and its two halves; panels with a too-large
//! difference are bisected. Summation happens in the fixed left-to-right
//! recursion order, so results are deterministic regardless of execution
//! environment.

use num_complex::Complex64;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("evaluation budget exhausted after {evaluations} integrand evaluations (requested accuracy unreachable within budget)")]
    BudgetExceeded { evaluations: u64 },
    #[error("invalid interval [{a}, {b}]")]
    BadInterval { a: f64, b: f64 },
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOpts {
    /// Per-panel relative tolerance (against the panel value).
    pub rel_tol: f64,
    /// Absolute tolerance distributed over the interval proportionally to width.
    pub abs_tol: f64,
    /// Upper bound on initial panel width (oscillation control); `f64::INFINITY`
    /// for smooth integrands.
    pub max_width: f64,
    /// Maximum bisection depth below the initial panels.
    pub max_depth: u32,
}

impl Default for QuadOpts {
    fn default() -> Self {
        QuadOpts {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_width: f64::INFINITY,
            max_depth: 40,
        }
    }
}

/// Shared evaluation budget for one query (possibly spanning many nested calls).
#[derive(Debug)]
pub struct Budget {
    pub used: u64,
    pub cap: u64,
}

impl Budget {
    pub fn new(cap: u64) -> Self {
        Budget { used: 0, cap }
    }
    #[inline]
    fn charge(&mut self, n: u64) -> Result<(), QuadError> {
        self.used += n;
        if self.used > self.cap {
            Err(QuadError::BudgetExceeded {
                evaluations: self.used,
            })
        } else {
            Ok(())
        }
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], computed once by Newton
/// iteration on the Legendre recurrence (deterministic, ~1e-15 accurate).
pub fn gauss_legendre(n: usize) -> &'static [(f64, f64)] {
    static CACHE11: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static CACHE32: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    static CACHE64: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    match n {
        11 => CACHE11.get_or_init(|| compute_gl(11)),
        32 => CACHE32.get_or_init(|| compute_gl(32)),
        64 => CACHE64.get_or_init(|| compute_gl(64)),
        _ => panic!("gauss_legendre cache supports n ∈ {{11, 32, 64}}"),
    }
}

fn compute_gl(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess for the i-th root of P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0f64;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn panel_gl11<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    budget: &mut Budget,
) -> Result<Complex64, QuadError> {
    budget.charge(11)?;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, w) in gauss_legendre(11) {
        acc += f(mid + half * x) * w;
    }
    Ok(acc * half)
}

/// Adaptive complex-valued quadrature over [a, b].
/// Returns (value, error estimate); the estimate is the accumulated Richardson
/// difference of the accepted panels.
pub fn adaptive<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    opts: &QuadOpts,
    budget: &mut Budget,
) -> Result<(Complex64, f64), QuadError> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(QuadError::BadInterval { a, b });
    }
    let width = b - a;
    let n0 = if opts.max_width.is_finite() {
        ((width / opts.max_width).ceil() as usize).max(1)
    } else {
        1
    };
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0f64;
    for i in 0..n0 {
        let pa = a + width * (i as f64) / (n0 as f64);
        let pb = a + width * ((i + 1) as f64) / (n0 as f64);
        let coarse = panel_gl11(f, pa, pb, budget)?;
        refine(f, pa, pb, coarse, opts, (pb - pa) / width, 0, budget, &mut value, &mut err)?;
    }
    Ok((value, err))
}

#[allow(clippy::too_many_arguments)]
fn refine<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    coarse: Complex64,
    opts: &QuadOpts,
    width_fraction: f64,
    depth: u32,
    budget: &mut Budget,
    value: &mut Complex64,
    err: &mut f64,
) -> Result<(), QuadError> {
    let m = 0.5 * (a + b);
    let left = panel_gl11(f, a, m, budget)?;
    let right = panel_gl11(f, m, b, budget)?;
    let fine = left + right;
    let diff = (fine - coarse).norm();
    let tol = opts.abs_tol * width_fraction + opts.rel_tol * fine.norm();
    if diff <= tol || depth >= opts.max_depth {
        *value += fine;
        *err += diff;
        return Ok(());
    }
    refine(f, a, m, left, opts, width_fraction * 0.5, depth + 1, budget, value, err)?;
    refine(f, m, b, right, opts, width_fraction * 0.5, depth + 1, budget, value, err)
}

/// Fixed-order Gauss–Legendre integration (64 nodes) on [a, b]; used for the
/// parametrix transport recursion where the integrand is smooth.
pub fn gl64<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for &(x, w) in gauss_legendre(64) {
        acc += f(mid + half * x) * w;
    }
    acc * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        // GL11 is exact through degree 21
        let mut f = |x: f64| Complex64::new(x.powi(10) - 3.0 * x.powi(4) + 1.0, 0.0);
        let mut budget = Budget::new(10_000);
        let (v, e) = adaptive(&mut f, -1.0, 1.0, &QuadOpts::default(), &mut budget).unwrap();
        let exact = 2.0 / 11.0 - 6.0 / 5.0 + 2.0;
        assert!((v.re - exact).abs() < 1e-13, "got {v}, want {exact}");
        assert!(e < 1e-12);
    }

    #[test]
    fn oscillatory_integral_matches_closed_form() {
        // antiderivative of x e^{ikx} is F(x) = e^{ikx}(−ix/k + 1/k²);
        // over [0, 2π] with integer k this collapses to −2πi/k
        let k = 40.0;
        let mut f = |x: f64| Complex64::new(0.0, k * x).exp() * x;
        let mut budget = Budget::new(10_000_000);
        let opts = QuadOpts {
            max_width: 2.0 * std::f64::consts::PI / k / 4.0,
            ..Default::default()
        };
        let (v, _) = adaptive(&mut f, 0.0, 2.0 * std::f64::consts::PI, &opts, &mut budget).unwrap();
        let big_f = |x: f64| {
            Complex64::new(0.0, k * x).exp()
                * Complex64::new(1.0 / (k * k), -x / k)
        };
        let exact = big_f(2.0 * std::f64::consts::PI) - big_f(0.0);
        assert!((v - exact).norm() < 1e-10, "got {v}, want {exact}");
        assert!((exact - Complex64::new(0.0, -2.0 * std::f64::consts::PI / k)).norm() < 1e-14);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut f = |x: f64| Complex64::new((1e6 * x).sin(), 0.0);
        let mut budget = Budget::new(500);
        let opts = QuadOpts {
            max_width: 1e-5,
            ..Default::default()
        };
        let res = adaptive(&mut f, 0.0, 1.0, &opts, &mut budget);
        assert!(matches!(res, Err(QuadError::BudgetExceeded { .. })));
    }

    #[test]
    fn gl64_matches_smooth_integral() {
        let mut f = |x: f64| (x * x).exp();
        let v = gl64(&mut f, 0.0, 1.0);
        // ∫₀¹ e^{x²} dx = 1.4626517459071816… (erfi(1)·√π/2)
        assert!((v - 1.462651745907181).abs() < 1e-12);
    }
}

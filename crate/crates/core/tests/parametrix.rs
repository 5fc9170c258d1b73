//! Hadamard parametrix: exponential-map Jacobian, the potential ω, the
//! cancellation sums, the transport recursion U₀…U_K, Riesz distributions,
//! the a_τ leading expansion, and the two integral lemmas.
//!
//! Derived oracles (all closed-form):
//!   U₀ = π^{(1−d)/2}: fixed by the Euclidean delta limit — on ℝ¹ the
//!     expansion reduces to |v|R₊⁰(v²−x²) = ½[δ(x−v)+δ(x+v)], d'Alembert's
//!     solution, and on ℝ³ the term π^{−1}|v|δ′(v²−|x|²) sifts spherical
//!     means into Kirchhoff's ∂_v[v·M_φ(v)].  Frozen: d=2 → π^{−1/2},
//!     d=3 → 1/π, d=5 → π^{−2}.
//!   H³ (A1, m=2): J^{−1/2} = r/sinh r obeys (∂_r² + 2coth r ∂_r)(r/sinh r)
//!     = −(r/sinh r), hence ω ≡ −1 = −|ρ|² and U₁ ≡ −U₀ = −1/π.
//!   H² (A1, m=1): g = (r/sinh r)^{1/2} gives
//!     ω(r) = −¼(1/r² − 1/sinh²r) − ¼  (→ −1/3 as r → 0),
//!     and since ∫₀¹ ds [1/(sr)² − 1/sinh²(sr)] = (coth r − 1/r)/r,
//!     U₁(r) = U₀·[−¼(coth r − 1/r)/r − ¼].
//!   ω at infinity: with S = ln J^{1/2} the chain rule gives
//!     ω = |∇S|² − ΔS − Σ m_α coth⟨α,H⟩⟨α,∇S⟩, and expanding along an
//!     interior ray shows (the non-proportional cross terms cancel exactly)
//!     ω(H) + |ρ|² = Σ_α |α|²(m_α/2)(m_α/2−1)[⟨α,H⟩⁻² − sinh⁻²⟨α,H⟩]
//!                   + Σ_{α,2α} m_α m_{2α}|α|²[½⟨α,H⟩⁻² − coth⟨α,H⟩coth⟨2α,H⟩ + 1],
//!     an O(1/r²) approach — and identically zero when every m_α = 2
//!     (complex systems, no double roots).
//!   a_τ (H³, |H| = 1, τ = 0.5−0.5i): |H|²+τ² = 1−0.5i, whose inverse powers
//!     are exactly 0.48+0.64i and 0.8+0.4i, so the K=1 parametrix sum is
//!     (τ/π)(1/sinh 1)(1/π)[(0.48+0.64i) − ¼(0.8+0.4i)] ≈
//!     0.0353486 + 0.0112081i; against the frozen Poisson value
//!     0.03839912+0.00915502i (C₀ = 1/(4π²)) the relative gap is ≈ 0.093.
//!   Lemma B2: ε=1 sifts exactly; ε=1/2, z=1, u=0 → 1/√π = 0.564189583548.

use num_complex::Complex64;
use rand::Rng;
use symmwave_core::chamber::dual_basis;
use symmwave_core::geom::Vector;
use symmwave_core::kernels::{poisson_kernel, EvalContext};
use symmwave_core::parametrix::{
    a_tau_leading, cancellation_check, jacobian_j, j_inv_sqrt, lemma_b1_spotcheck,
    lemma_b2_check, omega_fn, riesz_r, transport_residual, uk_recursion, ParametrixError,
    RadialGrid, RieszParams,
};
use symmwave_core::plancherel::PlancherelDensity;
use symmwave_core::rootsys::{build_root_system, dims, half_sum_rho, Catalog, Multiplicities, RootSystem};
use symmwave_core::sampling::rng_for;

fn h3() -> RootSystem {
    build_root_system(Catalog::A1, Multiplicities::RealHyperbolic { d: 3 }).unwrap()
}

fn h2() -> RootSystem {
    build_root_system(Catalog::A1, Multiplicities::RealHyperbolic { d: 2 }).unwrap()
}

/// Random point strictly inside the positive chamber: a positive combination
/// of the dual basis vectors.
fn chamber_point(rs: &RootSystem, rng: &mut rand_chacha::ChaCha12Rng) -> Vector {
    let basis = dual_basis(rs).unwrap();
    let mut h = Vector::zeros(rs.rank);
    for lam in &basis.lambdas {
        let c: f64 = 0.2 + 1.6 * rng.gen::<f64>();
        h = h.axpy(c, lam);
    }
    h
}

fn ray_dir(rs: &RootSystem) -> Vector {
    let basis = dual_basis(rs).unwrap();
    let mut h = Vector::zeros(rs.rank);
    for lam in &basis.lambdas {
        h = h.axpy(1.0, lam);
    }
    h.normalized()
}

#[test]
fn jacobian_matches_h3_closed_form_and_envelope() {
    let rs = h3();
    let udir = ray_dir(&rs);
    assert_eq!(jacobian_j(&rs, &Vector::zeros(1)), 1.0);
    assert_eq!(j_inv_sqrt(&rs, &Vector::zeros(1)), 1.0);
    for &r in &[1e-9, 1e-4, 0.3, 1.0, 2.0, 10.0, 45.0] {
        let h = udir.scale(r);
        let exact = (r.sinh() / r).powi(2);
        let got = jacobian_j(&rs, &h);
        assert!(
            (got - exact).abs() <= 1e-12 * exact,
            "J({r}) = {got} vs (sinh r/r)² = {exact}"
        );
        let ji = j_inv_sqrt(&rs, &h);
        assert!((ji - 1.0 / got.sqrt()).abs() <= 1e-13 * ji);
    }

    // J ≥ 1 with equality only at 0, and the e^{−⟨ρ,H⟩} envelope of J^{−1/2}
    for label in ["A2", "B2"] {
        let rs = build_root_system(label.parse().unwrap(), Multiplicities::Normal).unwrap();
        let rho = half_sum_rho(&rs);
        let msum: u32 = rs.positive_roots.iter().map(|r| r.mult).sum();
        let cap = 2.0f64.powf(msum as f64 / 2.0);
        let mut rng = rng_for(41, "jacobian-envelope");
        for _ in 0..200 {
            let h = chamber_point(&rs, &mut rng);
            let j = jacobian_j(&rs, &h);
            assert!(j > 1.0, "J = {j} at |H| = {}", h.norm());
            let mut poly = 1.0;
            for root in &rs.positive_roots {
                poly *= (1.0 + root.vector.dot(&h)).powf(root.mult as f64 / 2.0);
            }
            let ratio = j_inv_sqrt(&rs, &h) * rho.dot(&h).exp() / poly;
            assert!(
                ratio >= 0.99 && ratio <= cap * 1.01,
                "envelope ratio {ratio} outside [1, 2^(Σm/2) = {cap}]"
            );
        }
    }
}

#[test]
fn omega_h3_is_minus_one_and_h2_matches_closed_form() {
    let rs3 = h3();
    let u3 = ray_dir(&rs3);
    for &r in &[0.05, 0.3, 1.0, 2.5, 6.0] {
        let w = omega_fn(&rs3, &u3.scale(r)).unwrap();
        assert!((w + 1.0).abs() <= 1e-8, "H³ ω({r}) = {w}, expected −1");
    }

    let rs2 = h2();
    let u2 = ray_dir(&rs2);
    let closed = |r: f64| -> f64 {
        -0.25 * (1.0 / (r * r) - 1.0 / r.sinh().powi(2)) - 0.25
    };
    for &r in &[0.3, 1.0, 2.0, 5.0] {
        let w = omega_fn(&rs2, &u2.scale(r)).unwrap();
        let c = closed(r);
        assert!((w - c).abs() <= 1e-8, "H² ω({r}) = {w} vs closed {c}");
    }
    // smooth extension across the origin: the limit is −1/3
    let w_small = omega_fn(&rs2, &u2.scale(1e-3)).unwrap();
    assert!(
        (w_small + 1.0 / 3.0).abs() <= 1e-5,
        "H² ω(0⁺) = {w_small}, expected −1/3"
    );

    // the wall (here the origin) is rejected
    assert!(matches!(
        omega_fn(&rs2, &Vector::zeros(1)),
        Err(ParametrixError::WallPoint { .. })
    ));
}

#[test]
fn omega_tends_to_minus_rho_sq_at_infinity() {
    for (label, mults) in [
        ("A2", Multiplicities::Normal),
        ("B2", Multiplicities::Normal),
        ("A2", Multiplicities::Complex),
        ("BC1", Multiplicities::Explicit(vec![4, 3])),
    ] {
        let is_complex = matches!(mults, Multiplicities::Complex);
        let rs = build_root_system(label.parse().unwrap(), mults).unwrap();
        let rho_sq = half_sum_rho(&rs).norm_sq();
        let udir = ray_dir(&rs);
        let dev = |r: f64| omega_fn(&rs, &udir.scale(r)).unwrap() + rho_sq;
        let (d40, d80) = (dev(40.0), dev(80.0));
        // the limit, with the O(1/r²) approach rate
        assert!(d40.abs() <= 1e-2, "{label}: ω(40û)+|ρ|² = {d40}");
        assert!(d80.abs() <= 2.6e-3, "{label}: ω(80û)+|ρ|² = {d80}");
        assert!(
            d80.abs() <= 0.3 * d40.abs() + 1e-9,
            "{label}: deviation not O(1/r²): {d40} → {d80}"
        );
        if is_complex {
            // every m_α = 2 kills the diagonal terms: ω ≡ −|ρ|² exactly
            assert!(d40.abs() <= 1e-9, "complex {label}: ω+|ρ|² = {d40}");
        }
    }

    // boundedness: max |ω| along a chamber ray is finite and stable when the
    // sampling is refined
    let rs = build_root_system(Catalog::A2, Multiplicities::Normal).unwrap();
    let udir = ray_dir(&rs);
    let max_on = |n: usize| -> f64 {
        (0..n)
            .map(|i| {
                let r = 0.05 + 8.0 * i as f64 / n as f64;
                omega_fn(&rs, &udir.scale(r)).unwrap().abs()
            })
            .fold(0.0, f64::max)
    };
    let coarse = max_on(160);
    let fine = max_on(320);
    assert!(coarse.is_finite() && fine.is_finite());
    assert!((coarse - fine).abs() <= 1e-3 * (1.0 + fine));
}

#[test]
fn cancellation_sums_vanish_on_the_chamber() {
    // rank one: no non-proportional pairs at all
    let (r1, r2) = cancellation_check(&h3(), &ray_dir(&h3()).scale(0.7)).unwrap();
    assert_eq!((r1, r2), (0.0, 0.0));

    for (label, tol) in [("A2", 1e-10), ("B2", 1e-10), ("G2", 1e-9)] {
        let rs = build_root_system(label.parse().unwrap(), Multiplicities::Normal).unwrap();
        let mut rng = rng_for(59, "cancellations");
        for _ in 0..20 {
            let h = chamber_point(&rs, &mut rng);
            let (r1, r2) = cancellation_check(&rs, &h).unwrap();
            assert!(r1.abs() <= tol, "{label}: first sum {r1}");
            assert!(r2.abs() <= tol, "{label}: coth sum {r2}");
        }
    }

    // a wall point is rejected: the dual vector Λ₂ lies on the α₁ wall
    let rs = build_root_system(Catalog::A2, Multiplicities::Normal).unwrap();
    let wall = dual_basis(&rs).unwrap().lambdas[1].clone();
    assert!(matches!(
        cancellation_check(&rs, &wall),
        Err(ParametrixError::WallPoint { .. })
    ));
}

#[test]
fn u0_is_frozen_and_recursion_reproduces_closed_forms() {
    // frozen U₀ = π^{(1−d)/2}
    for (rs, expect) in [
        (h2(), std::f64::consts::PI.powf(-0.5)),
        (h3(), 1.0 / std::f64::consts::PI),
        (
            build_root_system(Catalog::A2, Multiplicities::Normal).unwrap(),
            std::f64::consts::PI.powi(-2),
        ),
    ] {
        let dir = ray_dir(&rs);
        let grid = RadialGrid::along_ray(&rs, &dir, 1e-2, 50).unwrap();
        let table = uk_recursion(&rs, &grid, 0).unwrap();
        let u0 = table.u[0][0];
        assert!((u0 - expect).abs() <= 1e-15 * expect, "U₀ = {u0} ≠ {expect}");
        assert!(table.u[0].iter().all(|&v| v == u0), "U₀ row not constant");
        assert_eq!(table.k_max, 0);
        assert_eq!(table.omega.len(), table.grid.radii.len());
    }

    // H³: U₁ ≡ −1/π because ω ≡ −1
    let rs = h3();
    let grid = RadialGrid::along_ray(&rs, &ray_dir(&rs), 1e-3, 1600).unwrap();
    let table = uk_recursion(&rs, &grid, 1).unwrap();
    for (j, &u1) in table.u[1].iter().enumerate() {
        assert!(
            (u1 + 1.0 / std::f64::consts::PI).abs() <= 1e-7,
            "H³ U₁(r_{j}) = {u1}"
        );
    }

    // H²: U₁(r) = U₀·[−¼(coth r − 1/r)/r − ¼]
    let rs = h2();
    let grid = RadialGrid::along_ray(&rs, &ray_dir(&rs), 1e-3, 2200).unwrap();
    let table = uk_recursion(&rs, &grid, 1).unwrap();
    let u0 = std::f64::consts::PI.powf(-0.5);
    for (j, &r) in table.grid.radii.iter().enumerate() {
        let coth = 1.0 / r.tanh();
        let closed = u0 * (-0.25 * (coth - 1.0 / r) / r - 0.25);
        assert!(
            (table.u[1][j] - closed).abs() <= 1e-7,
            "H² U₁({r}) = {} vs {closed}",
            table.u[1][j]
        );
    }
    // small-H limit U₁ → ω(0)U₀ = −U₀/3
    let at0 = table.u_at(1, 0.0).unwrap();
    assert!((at0 + u0 / 3.0).abs() <= 1e-5, "U₁(0) = {at0}");

    // truncation guard and higher-rank restriction
    assert!(matches!(
        uk_recursion(&rs, &grid, 2),
        Err(ParametrixError::BadParameter { .. })
    )); // ⌊d/2⌋ = 1 for H²
    let a2 = build_root_system(Catalog::A2, Multiplicities::Normal).unwrap();
    let g2d = RadialGrid::along_ray(&a2, &ray_dir(&a2), 1e-2, 60).unwrap();
    assert!(matches!(
        uk_recursion(&a2, &g2d, 1),
        Err(ParametrixError::Unsupported { .. })
    ));
    // a ray on a wall is rejected at grid construction
    let wall = dual_basis(&a2).unwrap().lambdas[1].clone();
    assert!(RadialGrid::along_ray(&a2, &wall, 1e-2, 60).is_err());
}

#[test]
fn transport_identity_residual_is_second_order() {
    // [(k+1) + r∂_r]U_{k+1} = [Δ_rad^p + ω]U_k, checked by central differences
    let rs = h2();
    let dir = ray_dir(&rs);
    let res_at = |h: f64| -> f64 {
        let n = (2.0 / h).round() as usize;
        let grid = RadialGrid::along_ray(&rs, &dir, h, n).unwrap();
        let table = uk_recursion(&rs, &grid, 1).unwrap();
        transport_residual(&rs, &table, 0).unwrap()
    };
    let coarse = res_at(1e-3);
    assert!(coarse <= 1e-4, "relative transport residual {coarse} > 1e-4");
    let fine = res_at(5e-4);
    let ratio = coarse / fine;
    assert!(
        (2.5..=6.5).contains(&ratio),
        "expected ≈4× second-order reduction, got {ratio} ({coarse} → {fine})"
    );

    // H³ as well (here U₁ is constant, so the residual is near roundoff)
    let rs3 = h3();
    let grid = RadialGrid::along_ray(&rs3, &ray_dir(&rs3), 1e-3, 2000).unwrap();
    let table = uk_recursion(&rs3, &grid, 1).unwrap();
    assert!(transport_residual(&rs3, &table, 0).unwrap() <= 1e-6);
}

#[test]
fn riesz_distribution_basics() {
    let one = RieszParams::new(Complex64::new(1.0, 0.0)).unwrap();
    assert_eq!(riesz_r(&one, -0.5), Complex64::new(0.0, 0.0));
    assert_eq!(riesz_r(&one, 0.0), Complex64::new(0.0, 0.0));
    assert_eq!(riesz_r(&one, 2.0), Complex64::new(1.0, 0.0));

    let two = RieszParams::new(Complex64::new(2.0, 0.0)).unwrap();
    assert!((riesz_r(&two, 3.0) - Complex64::new(3.0, 0.0)).norm() <= 1e-14);

    let half = RieszParams::new(Complex64::new(0.5, 0.0)).unwrap();
    let expect = 0.28209479177387814; // 1/(2√π)
    assert!((riesz_r(&half, 4.0).re - expect).abs() <= 1e-14);
    assert!(riesz_r(&half, 4.0).im.abs() <= 1e-16);

    assert!(RieszParams::new(Complex64::new(0.0, 1.0)).is_err());
    assert!(RieszParams::new(Complex64::new(-0.2, 0.0)).is_err());

    // continuity in z against a fixed smooth bump on [1, 3]
    let bump = |r: f64| -> f64 {
        let w = 1.0 - (r - 2.0) * (r - 2.0);
        if w > 0.0 {
            (-1.0 / w).exp()
        } else {
            0.0
        }
    };
    let pair = |z: Complex64| -> Complex64 {
        let p = RieszParams::new(z).unwrap();
        let mut acc = Complex64::new(0.0, 0.0);
        let n = 4000;
        for i in 0..n {
            let r = 1.0 + 2.0 * (i as f64 + 0.5) / n as f64;
            acc += riesz_r(&p, r) * bump(r) * (2.0 / n as f64);
        }
        acc
    };
    let z = Complex64::new(0.8, 0.3);
    let d1 = (pair(z + 1e-3) - pair(z)).norm();
    let d2 = (pair(z + 1e-4) - pair(z)).norm();
    assert!(d1 <= 1e-2, "not continuous: step 1e-3 moved the pairing by {d1}");
    assert!(d2 <= 0.2 * d1, "pairing not locally Lipschitz: {d2} vs {d1}");
}

#[test]
fn lemma_b2_exact_sift_and_quadrature() {
    // ε = 1: R₊⁰ is the Dirac measure — both sides identical by construction
    let z = Complex64::new(0.7, 1.3);
    let (lhs, rhs) = lemma_b2_check(z, 1.4, 1.0).unwrap();
    assert_eq!(lhs, rhs);
    let expect = z / (std::f64::consts::PI * (1.4 * 1.4 + z * z));
    assert!((rhs - expect).norm() <= 1e-15 * expect.norm());

    // ε = 1/2, z = 1, u = 0: rhs = 1/√π
    let (lhs, rhs) = lemma_b2_check(Complex64::new(1.0, 0.0), 0.0, 0.5).unwrap();
    assert!((rhs.re - 0.5641895835477563).abs() <= 1e-15);
    assert!((lhs - rhs).norm() <= 1e-8, "lhs {lhs} vs rhs {rhs}");

    // ε = 1/2, z = 1 + i, u = 2
    let (lhs, rhs) = lemma_b2_check(Complex64::new(1.0, 1.0), 2.0, 0.5).unwrap();
    assert!(
        (lhs - rhs).norm() <= 1e-6 * rhs.norm(),
        "lhs {lhs} vs rhs {rhs}"
    );

    // seeded sweep
    let mut rng = rng_for(23, "lemma-b2");
    for _ in 0..8 {
        let z = Complex64::new(0.1 + 2.0 * rng.gen::<f64>(), -2.0 + 4.0 * rng.gen::<f64>());
        let u = 3.0 * rng.gen::<f64>();
        let (lhs, rhs) = lemma_b2_check(z, u, 0.5).unwrap();
        assert!(
            (lhs - rhs).norm() <= 1e-6 * rhs.norm(),
            "z = {z}, u = {u}: lhs {lhs} vs rhs {rhs}"
        );
    }

    assert!(lemma_b2_check(Complex64::new(1.0, 0.0), 1.0, 0.7).is_err());
    assert!(lemma_b2_check(Complex64::new(-1.0, 0.0), 1.0, 0.5).is_err());
}

#[test]
fn lemma_b1_envelopes_and_ratio_window() {
    // γ = 1, n = 2: envelope 1 + log(T/Re z)
    let t_big = 5.0;
    let z = Complex64::new(0.3, 0.8);
    let (integral, envelope) = lemma_b1_spotcheck(z, 2.0, 1.0, t_big).unwrap();
    assert!((envelope - (1.0 + (t_big / 0.3).ln())).abs() <= 1e-14);
    assert!(integral.is_finite() && integral > 0.0);

    // z real with |z| = T, γ = 1, n = 1: envelope 1 + log(|z|/Re z) = 1
    let (_, envelope) = lemma_b1_spotcheck(Complex64::new(2.0, 0.0), 1.0, 1.0, 2.0).unwrap();
    assert_eq!(envelope, 1.0);

    // γ = 1, n = 3 (> 2): envelope (T/|z|)^{n−2} + log(|z|/Re z)
    let z = Complex64::new(0.5, 0.5);
    let (integral, envelope) = lemma_b1_spotcheck(z, 3.0, 1.0, 4.0).unwrap();
    let zn = z.norm();
    assert!((envelope - ((4.0 / zn) + (zn / 0.5).ln())).abs() <= 1e-12);
    assert!(integral / envelope > 0.05 && integral / envelope < 20.0);

    // γ = 2 > 1, n = 2 < 2γ: ratio to (|z|/Re z)^{γ−1} stays in a fixed window
    // across an angular sweep toward the wall θ → π/2
    for &theta in &[0.0f64, 0.7, 1.2, 1.45, 1.55] {
        let z = Complex64::new(theta.cos(), theta.sin());
        let (integral, envelope) = lemma_b1_spotcheck(z, 2.0, 2.0, 3.0).unwrap();
        let ratio = integral / envelope;
        assert!(
            (0.1..=10.0).contains(&ratio),
            "θ = {theta}: ratio {ratio} left the window [0.1, 10]"
        );
    }

    // case mismatches are rejected
    assert!(matches!(
        lemma_b1_spotcheck(Complex64::new(1.0, 0.0), 5.0, 2.0, 3.0),
        Err(ParametrixError::CaseMismatch { .. })
    )); // n ≥ 2γ
    assert!(matches!(
        lemma_b1_spotcheck(Complex64::new(1.0, 0.0), 1.0, 0.5, 3.0),
        Err(ParametrixError::CaseMismatch { .. })
    )); // γ < 1
    assert!(lemma_b1_spotcheck(Complex64::new(1.0, 0.0), 1.0, 1.0, 0.5).is_err()); // |z| > T
}

#[test]
fn a_tau_leading_matches_closed_form_and_poisson() {
    let rs = h3();
    let dir = ray_dir(&rs);
    let grid = RadialGrid::along_ray(&rs, &dir, 1e-3, 1500).unwrap();
    let table = uk_recursion(&rs, &grid, 1).unwrap();
    let tau = Complex64::new(0.5, -0.5);
    let h = dir.scale(1.0);

    // closed form: (τ/π)(1/sinh 1)(1/π)[(0.48+0.64i) − ¼(0.8+0.4i)]
    let pi = std::f64::consts::PI;
    let closed = tau / pi * (1.0 / 1.0f64.sinh()) * (1.0 / pi)
        * (Complex64::new(0.48, 0.64) - 0.25 * Complex64::new(0.8, 0.4));
    let got = a_tau_leading(&rs, &table, tau, &h).unwrap();
    assert!(
        (got - closed).norm() <= 1e-6 * closed.norm(),
        "a_τ = {got} vs closed form {closed}"
    );

    // against the frozen Poisson oracle: the neglected remainder is ≈ 9%
    let frozen_p = Complex64::new(0.03839912018908407, 0.009155021058902575);
    let gap = (got - frozen_p).norm() / frozen_p.norm();
    assert!(
        (0.02..=0.2).contains(&gap),
        "a_τ vs Poisson relative gap {gap} outside [0.02, 0.2]"
    );

    // and against the live kernel evaluator
    let pd = PlancherelDensity::new(&rs).unwrap();
    let ctx = EvalContext {
        c0: 1.0 / (4.0 * pi * pi),
        rel_tol: 1e-8,
        ..Default::default()
    };
    let p = poisson_kernel(&rs, &pd, &ctx, tau, &h).unwrap();
    let live_gap = (got - p.value).norm() / p.value.norm();
    assert!((0.02..=0.2).contains(&live_gap), "live gap {live_gap}");

    // τ real, H = 0: real positive
    let v = a_tau_leading(&rs, &table, Complex64::new(0.7, 0.0), &Vector::zeros(1)).unwrap();
    assert!(v.re > 0.0 && v.im.abs() <= 1e-12 * v.re, "a_τ(0) = {v}");

    // analyticity in τ: Cauchy–Riemann residual of a central-difference
    // Wirtinger derivative ∂a/∂τ̄
    let tau0 = Complex64::new(0.6, -0.4);
    let d = 1e-4;
    let at = |t: Complex64| a_tau_leading(&rs, &table, t, &h).unwrap();
    let ds = (at(tau0 + d) - at(tau0 - d)) / (2.0 * d);
    let dt = (at(tau0 + Complex64::new(0.0, d)) - at(tau0 - Complex64::new(0.0, d))) / (2.0 * d);
    let cr = (ds + Complex64::i() * dt).norm() / 2.0;
    assert!(cr <= 1e-6, "Cauchy–Riemann residual {cr}");

    // guards: off-grid radius, off-ray point, bad τ
    assert!(matches!(
        a_tau_leading(&rs, &table, tau, &dir.scale(2.5)),
        Err(ParametrixError::OffGrid { .. })
    ));
    assert!(a_tau_leading(&rs, &table, Complex64::new(0.0, 1.0), &h).is_err());
    let a2 = build_root_system(Catalog::A2, Multiplicities::Normal).unwrap();
    let dir2 = ray_dir(&a2);
    let grid2 = RadialGrid::along_ray(&a2, &dir2, 1e-2, 120).unwrap();
    let table2 = uk_recursion(&a2, &grid2, 0).unwrap();
    let off_ray = Vector::new(vec![dir2.coords[0], -dir2.coords[1]]).scale(0.5);
    assert!(a_tau_leading(&a2, &table2, tau, &off_ray).is_err());
    // on-ray rank-two leading term works (K = 0)
    let v2 = a_tau_leading(&a2, &table2, tau, &dir2.scale(0.5)).unwrap();
    assert!(v2.norm().is_finite() && v2.norm() > 0.0);
    let (d_a2, _) = dims(&a2);
    assert_eq!(d_a2, 5);
}

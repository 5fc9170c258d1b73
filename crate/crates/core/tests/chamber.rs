//! Barycentric chamber partition: dual-basis identities, extracted constants,
//! cutoff support/partition properties, and the phase-derivative lower bound.
//! Frozen oracles: A2 dual basis and constants derived by hand (unit roots at
//! 120°: Λ₁ = (1, 1/√3), Λ₂ = (0, 2/√3), c₃ raw = √3/2, L₁ = 2, and the exact
//! relations c₁ = c₂/4, c₄ = c₂/2, c₅ = 2c₂/3).

use num_complex::Complex64;
use symmwave_core::chamber::{
    dual_basis, extract_constants, phase_derivative_lower_bound, support_properties_check,
    Partition, TileId,
};
use symmwave_core::geom::Vector;
use symmwave_core::rootsys::{build_root_system, half_sum_rho, Catalog, Multiplicities};
use symmwave_core::sampling::{rng_for, shell_vector, unit_vector};

fn a2() -> symmwave_core::rootsys::RootSystem {
    build_root_system(Catalog::A2, Multiplicities::Normal).unwrap()
}

#[test]
fn dual_basis_identities_all_systems() {
    for (cat, mult) in [
        (Catalog::A1, Multiplicities::Explicit(vec![2])),
        (Catalog::Bc1, Multiplicities::Explicit(vec![2, 1])),
        (Catalog::A2, Multiplicities::Normal),
        (Catalog::A3, Multiplicities::Normal),
        (Catalog::B2, Multiplicities::Normal),
        (Catalog::G2, Multiplicities::Normal),
    ] {
        let rs = build_root_system(cat, mult).unwrap();
        let db = dual_basis(&rs).unwrap();
        let simples = rs.simple_roots();
        for (j, a) in simples.iter().enumerate() {
            for (k, l) in db.lambdas.iter().enumerate() {
                let want = if j == k { 1.0 } else { 0.0 };
                assert!(
                    (a.dot(l) - want).abs() <= 1e-12,
                    "⟨α_{j}, Λ_{k}⟩ ≠ δ in {}",
                    rs.label
                );
            }
        }
        for lj in &db.lambdas {
            for lk in &db.lambdas {
                assert!(lj.dot(lk) >= -1e-12, "⟨Λ_j,Λ_k⟩ ≥ 0 in {}", rs.label);
            }
        }
    }
}

#[test]
fn a2_dual_basis_frozen_values() {
    let rs = a2();
    let db = dual_basis(&rs).unwrap();
    let s3 = 3f64.sqrt();
    assert!(db.lambdas[0].sub(&Vector::new(vec![1.0, 1.0 / s3])).norm() < 1e-12);
    assert!(db.lambdas[1].sub(&Vector::new(vec![0.0, 2.0 / s3])).norm() < 1e-12);
}

#[test]
fn a1_constants_frozen() {
    let rs = build_root_system(Catalog::A1, Multiplicities::Explicit(vec![2])).unwrap();
    let c = extract_constants(&rs).unwrap();
    assert!((c.c3_raw - 1.0).abs() < 1e-12); // = |α| exactly
    assert!((c.c3 - 0.99).abs() < 1e-12); // 1% safety margin
    assert!((c.c2 - c.c3 / 2.0).abs() < 1e-15);
    assert_eq!(c.l1, 1);
    assert!((c.l2 - 1.0).abs() < 1e-12);
    assert!((c.m1 - 1.0).abs() < 1e-12 && (c.m2 - 1.0).abs() < 1e-12);
    assert!((c.c1 - c.c2 / 2.0).abs() < 1e-14);
    assert!((c.c4 - c.c2 / 2.0).abs() < 1e-14);
    assert!((c.c5 - c.c2 / 2.0).abs() < 1e-14);
    assert!((c.c_sigma - c.c5 / 2.0).abs() < 1e-14); // c5/(2M2) < 1/2 here
}

#[test]
fn a2_constants_frozen() {
    let rs = a2();
    let c = extract_constants(&rs).unwrap();
    let want_raw = 3f64.sqrt() / 2.0; // min of |cosθ| + |cos(θ−120°)|, attained ⊥ a root
    assert!(
        (c.c3_raw - want_raw).abs() < 1e-6,
        "c3 raw {} vs {}",
        c.c3_raw,
        want_raw
    );
    assert!((c.c3 - 0.99 * c.c3_raw).abs() < 1e-15);
    assert_eq!(c.l1, 2);
    let s3 = 3f64.sqrt();
    assert!((c.m1 - 2.0 / s3).abs() < 1e-12);
    assert!((c.m2 - 2.0 / s3).abs() < 1e-12);
    assert!((c.l2 - 4.0 / s3).abs() < 1e-12);
    // min{1/L₁, M₁²/(M₂L₂)} = min{1/2, 1/2} ⇒ c₁ = c₂/4, c₄ = c₂/2, c₅ = 2c₂/3
    assert!((c.c1 - c.c2 / 4.0).abs() < 1e-14);
    assert!((c.c4 - c.c2 / 2.0).abs() < 1e-14);
    assert!((c.c5 - 2.0 * c.c2 / 3.0).abs() < 1e-14);
    assert!((c.c_sigma - (c.c5 / (2.0 * c.m2)).min(0.5)).abs() < 1e-15);
}

#[test]
fn constants_positivity_all_catalog_systems() {
    for cat in [Catalog::A2, Catalog::A3, Catalog::B2, Catalog::G2] {
        let rs = build_root_system(cat, Multiplicities::Normal).unwrap();
        let c = extract_constants(&rs).unwrap();
        assert!(c.c4 > 0.0 && c.c5 > 0.0 && c.c1 < c.c2, "{}", rs.label);
        assert!(c.l1 >= 1);
        assert!((c.c2 - c.c3 / (2.0 * rs.rank as f64)).abs() < 1e-15);
    }
    // frozen highest-root heights (counting 2α in BC1)
    let heights = [
        (Catalog::A2, 2u32),
        (Catalog::A3, 3),
        (Catalog::B2, 3),
        (Catalog::G2, 5),
    ];
    for (cat, h) in heights {
        let rs = build_root_system(cat, Multiplicities::Normal).unwrap();
        assert_eq!(extract_constants(&rs).unwrap().l1, h, "{:?}", cat);
    }
    let bc1 = build_root_system(Catalog::Bc1, Multiplicities::Explicit(vec![2, 1])).unwrap();
    assert_eq!(extract_constants(&bc1).unwrap().l1, 2);
}

#[test]
fn c3_is_a_true_lower_bound_by_sampling() {
    // 10⁵ random unit vectors per system: Σ|⟨α_k,λ⟩| never dips below c3 (post-margin).
    for cat in [Catalog::A2, Catalog::A3, Catalog::B2, Catalog::G2] {
        let rs = build_root_system(cat, Multiplicities::Normal).unwrap();
        let c = extract_constants(&rs).unwrap();
        let simples = rs.simple_roots();
        let mut rng = rng_for(2024, &format!("c3-sample-{cat:?}"));
        let mut min_seen = f64::INFINITY;
        for _ in 0..100_000 {
            let u = unit_vector(&mut rng, rs.rank);
            let f: f64 = simples.iter().map(|a| a.dot(&u).abs()).sum();
            min_seen = min_seen.min(f);
        }
        assert!(
            min_seen >= c.c3,
            "{}: sampled min {} below c3 {}",
            rs.label,
            min_seen,
            c.c3
        );
        assert!(min_seen >= c.c3_raw - 1e-6, "raw minimum missed by sampler");
    }
}

#[test]
fn cutoff_profile_endpoints_and_range() {
    let rs = a2();
    let p = Partition::new(&rs).unwrap();
    let c1 = p.consts.c1;
    assert_eq!(p.chi_profile(0.0), 1.0);
    assert_eq!(p.chi_profile(1e-18), 1.0);
    assert_eq!(p.chi_profile(5.0), 1.0);
    assert_eq!(p.chi_profile(-c1), 0.0);
    assert_eq!(p.chi_profile(-2.0 * c1), 0.0);
    for k in 1..40 {
        let r = -c1 * (k as f64) / 40.0;
        let v = p.chi_profile(r);
        assert!((0.0..=1.0).contains(&v));
    }
    // smooth and nondecreasing on the transition (sampled)
    let mut prev = 0.0;
    for k in 0..=400 {
        let r = -c1 + c1 * (k as f64) / 400.0;
        let v = p.chi_profile(r);
        assert!(v + 1e-12 >= prev, "profile must be nondecreasing");
        prev = v;
    }
}

#[test]
fn tile_of_vertices_barycenter_and_brute_force() {
    let rs = a2();
    let p = Partition::new(&rs).unwrap();
    let db = dual_basis(&rs).unwrap();
    // λ = Λ_j → tile (identity, j)
    for (j, l) in db.lambdas.iter().enumerate() {
        let t = p.tile_of(l).unwrap();
        assert_eq!((t.w, t.j), (0, j));
    }
    // barycenter → (identity, 0) under the tie-break
    let bary = db.lambdas[0].add(&db.lambdas[1]).scale(0.5);
    let t = p.tile_of(&bary).unwrap();
    assert_eq!((t.w, t.j), (0, 0));
    // zero vector is an error
    assert!(p.tile_of(&Vector::zeros(2)).is_err());
    // random λ: membership consistent with direct evaluation of all predicates
    let mut rng = rng_for(11, "tile-brute-force");
    for _ in 0..500 {
        let lam = shell_vector(&mut rng, 2, 0.5, 2.0);
        let t = p.tile_of(&lam).unwrap();
        let mut best: Option<(usize, usize)> = None;
        for j in 0..p.rank() {
            for w in 0..p.weyl_order() {
                let mu = p.weyl_element(w).apply_transpose(&lam);
                let pair_ok = p
                    .simple_roots()
                    .iter()
                    .all(|a| a.dot(&mu) >= -1e-12 * lam.norm());
                if !pair_ok {
                    continue;
                }
                let coords: Vec<f64> = p.simple_roots().iter().map(|a| a.dot(&mu)).collect();
                let maxc = coords.iter().cloned().fold(f64::MIN, f64::max);
                if coords[j] >= maxc - 1e-12 * lam.norm() && best.is_none() {
                    best = Some((w, j));
                }
            }
        }
        let (bw, bj) = best.expect("every λ lies in some closed chamber");
        assert_eq!((t.w, t.j), (bw, bj));
    }
}

#[test]
fn chi_tilde_is_one_on_tile_and_w_equivariant() {
    let rs = a2();
    let p = Partition::new(&rs).unwrap();
    let db = dual_basis(&rs).unwrap();
    // interior point of S_j: strictly inside where all defining inequalities are slack
    for j in 0..2 {
        let lam = db.lambdas[j].scale(1.0); // vertex: ⟨α_k,λ⟩ = δ_jk ≥ 0, ⟨α_j⟩−⟨α_k⟩ = 1 > 0
        let v = p.chi_tilde(TileId { w: 0, j }, &lam).unwrap();
        assert_eq!(v, 1.0);
    }
    // deep in the opposite chamber a factor vanishes exactly
    let far = db.lambdas[0].add(&db.lambdas[1]).scale(-1.0);
    let v = p.chi_tilde(TileId { w: 0, j: 0 }, &far).unwrap();
    assert_eq!(v, 0.0);
    // W-equivariance: χ̃_{w.S_j}(w.λ) = χ̃_{S_j}(λ)
    let mut rng = rng_for(12, "chi-equivariance");
    for _ in 0..200 {
        let lam = shell_vector(&mut rng, 2, 0.5, 3.0);
        for w in 0..p.weyl_order() {
            for j in 0..2 {
                let wl = p.weyl_element(w).apply(&lam);
                let a = p.chi_tilde(TileId { w, j }, &wl).unwrap();
                let b = p.chi_tilde(TileId { w: 0, j }, &lam).unwrap();
                assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn partition_of_unity_and_homogeneity() {
    for (cat, mult) in [
        (Catalog::A2, Multiplicities::Normal),
        (Catalog::B2, Multiplicities::Complex),
    ] {
        let rs = build_root_system(cat, mult).unwrap();
        let p = Partition::new(&rs).unwrap();
        let mut rng = rng_for(13, &format!("partition-{}", rs.label));
        for _ in 0..2_000 {
            let lam = shell_vector(&mut rng, rs.rank, 0.1, 10.0);
            let mut sum = 0.0;
            for tile in p.tiles() {
                sum += p.chi(tile, &lam).unwrap();
            }
            assert!((sum - 1.0).abs() <= 1e-10, "partition sum {} at {lam}", sum);
            // the unnormalized family dominates 1, so the quotient never blows up
            assert!(p.chi_tilde_sum(&lam).unwrap() >= 1.0 - 1e-12);
            // degree-0 homogeneity
            let t0 = p.tiles().next().unwrap();
            let a = p.chi(t0, &lam).unwrap();
            let b = p.chi(t0, &lam.scale(10.0)).unwrap();
            assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn chi_at_vertex_has_guaranteed_mass() {
    let rs = a2();
    let p = Partition::new(&rs).unwrap();
    let db = dual_basis(&rs).unwrap();
    let n_tiles = (p.weyl_order() * p.rank()) as f64;
    for (j, l) in db.lambdas.iter().enumerate() {
        let v = p.chi(TileId { w: 0, j }, l).unwrap();
        assert!(v >= 1.0 / n_tiles);
    }
}

#[test]
fn tile_vertex_pairing_bound() {
    // On the compact simplex tile (convex combinations Σb_kΛ_k with b_j maximal)
    // the vertex pairing obeys ⟨w.Λ_j, λ⟩ ≥ |Λ_j|²/ℓ.
    let rs = build_root_system(Catalog::A3, Multiplicities::Normal).unwrap();
    let p = Partition::new(&rs).unwrap();
    let db = dual_basis(&rs).unwrap();
    let mut rng = rng_for(14, "tile-lemma");
    let ell = rs.rank;
    for _ in 0..2_000 {
        // sample barycentric coordinates with b_j maximal
        let j = (rng_next(&mut rng) * ell as f64) as usize % ell;
        let mut b: Vec<f64> = (0..ell).map(|_| rng_next(&mut rng)).collect();
        let s: f64 = b.iter().sum();
        b.iter_mut().for_each(|x| *x /= s);
        let (maxk, _) = b
            .iter()
            .enumerate()
            .max_by(|a, c| a.1.partial_cmp(c.1).unwrap())
            .unwrap();
        b.swap(j, maxk);
        let mut lam = Vector::zeros(ell);
        for (k, lk) in db.lambdas.iter().enumerate() {
            lam = lam.axpy(b[k], lk);
        }
        for w in [0usize, 3, 7] {
            let wl = p.weyl_element(w).apply(&lam);
            let wlj = p.weyl_element(w).apply(&db.lambdas[j]);
            assert!(
                wlj.dot(&wl) >= db.lambdas[j].norm_sq() / ell as f64 - 1e-12,
                "tile vertex bound failed"
            );
        }
    }
}

fn rng_next(rng: &mut rand_chacha::ChaCha12Rng) -> f64 {
    use rand::Rng;
    rng.gen::<f64>()
}

#[test]
fn band_hypothesis_implies_wall_separation() {
    // If every other simple pairing sits in the band [−c₂, ⟨α_j,λ⟩ + c₂] on the
    // unit sphere, then ⟨α_j, λ⟩ ≥ c₂ (this is what makes c₂ a wall separation).
    let rs = a2();
    let c = extract_constants(&rs).unwrap();
    let simples = rs.simple_roots();
    let mut rng = rng_for(15, "band-separation");
    let mut hits = 0;
    for _ in 0..200_000 {
        let u = unit_vector(&mut rng, 2);
        for j in 0..2 {
            let band_ok = (0..2).filter(|&k| k != j).all(|k| {
                let ak = simples[k].dot(&u);
                -c.c2 <= ak && ak <= simples[j].dot(&u) + c.c2
            });
            if band_ok {
                hits += 1;
                assert!(
                    simples[j].dot(&u) >= c.c2 - 1e-12,
                    "band hypothesis held but wall separation failed at {u}"
                );
            }
        }
    }
    assert!(hits > 1000, "sampler never hit the hypothesis band");
}

#[test]
fn support_properties_hold_on_samples() {
    let rs = a2();
    let p = Partition::new(&rs).unwrap();
    for tile in p.tiles() {
        let report = support_properties_check(&p, tile, 2_000, 77);
        assert_eq!(
            report.violations.len(),
            0,
            "support property violated on tile {:?}: {:?}",
            tile,
            report.violations.first()
        );
        assert!(report.checked > 0);
    }
}

#[test]
fn symbol_difference_quotients_scale() {
    // first and second directional difference quotients of χ decay like |λ|^{-k}
    // across two decades (within a factor 10), at points where they are visible
    let rs = a2();
    let p = Partition::new(&rs).unwrap();
    let tile = TileId { w: 0, j: 0 };
    // direction with ⟨α₂, dir⟩ = −c₁/2 exactly: squarely inside the transition
    // zone of a factor of χ̃_{S₁}, hence a visible derivative (α₂ sits at 120°,
    // so solve cos(θ − 120°) = −c₁/2 for the branch with ⟨α₁, dir⟩ > 0)
    let theta = 2.0 * std::f64::consts::PI / 3.0
        - std::f64::consts::FRAC_PI_2
        - (p.consts.c1 / 2.0).asin();
    let dir = Vector::new(vec![theta.cos(), theta.sin()]);
    let e = Vector::new(vec![0.8, -0.6]).normalized();
    let h = 1e-4;
    let quot = |scale: f64, k: usize| -> f64 {
        let base = dir.scale(scale);
        let f = |v: &Vector| p.chi(tile, v).unwrap();
        match k {
            1 => (f(&base.axpy(h, &e)) - f(&base.axpy(-h, &e))) / (2.0 * h),
            2 => {
                (f(&base.axpy(h, &e)) - 2.0 * f(&base) + f(&base.axpy(-h, &e))) / (h * h)
            }
            _ => unreachable!(),
        }
    };
    for k in [1usize, 2] {
        let q1 = quot(1.0, k).abs();
        let q100 = quot(100.0, k).abs();
        assert!(q1 > 1e-6, "need a visible derivative at scale 1 (k={k})");
        let expected_ratio = 100f64.powi(k as i32);
        let ratio = q1 / q100;
        assert!(
            ratio > expected_ratio / 10.0 && ratio < expected_ratio * 10.0,
            "k={k}: ratio {ratio} vs |λ|^k scaling {expected_ratio}"
        );
    }
}

#[test]
fn phase_derivative_bound_a2() {
    let rs = a2();
    let p = Partition::new(&rs).unwrap();
    let _rho = half_sum_rho(&rs);
    let tau = Complex64::new(0.3, -1.0); // τ = s − it with t = 1
    let x_dir = rs.chamber_interior_direction();
    let x = x_dir.scale(p.consts.c_sigma * 0.5); // |x|/|t| = C_Σ/2
    for tile in p.tiles() {
        let rep =
            phase_derivative_lower_bound(&rs, &p, tile, tau, &x, 500, 99).unwrap();
        assert!(
            !rep.flagged,
            "min |∂ψ| = {} below bound {} on tile {:?}",
            rep.min_abs, rep.bound, tile
        );
    }
    // x = 0 degenerate direction also fine
    let rep = phase_derivative_lower_bound(
        &rs,
        &p,
        TileId { w: 0, j: 0 },
        tau,
        &Vector::zeros(2),
        200,
        100,
    )
    .unwrap();
    assert!(rep.min_abs >= rep.bound);
    assert!((rep.bound - (2f64.sqrt() - 1.0) / 2.0 * p.consts.c5).abs() < 1e-15);
    // precondition violation: |x|/|t| > C_Σ
    let too_far = x_dir.scale(p.consts.c_sigma * 2.0);
    assert!(phase_derivative_lower_bound(
        &rs,
        &p,
        TileId { w: 0, j: 0 },
        tau,
        &too_far,
        10,
        1
    )
    .is_err());
}

#[test]
fn rank_one_support_is_half_line() {
    let rs = build_root_system(Catalog::A1, Multiplicities::Explicit(vec![2])).unwrap();
    let p = Partition::new(&rs).unwrap();
    // ⟨Λ₁, λ⟩ = |Λ₁||λ| on the positive support
    let report = support_properties_check(&p, TileId { w: 0, j: 0 }, 500, 5);
    assert_eq!(report.violations.len(), 0);
    let lam = Vector::new(vec![2.5]);
    assert_eq!(p.chi(TileId { w: 0, j: 0 }, &lam).unwrap(), 1.0);
}

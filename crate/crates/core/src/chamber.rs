//! Smooth homogeneous partition of unity on 𝔞 ∖ {0} subordinated to the
//! barycentric tiling of the unit sphere by Weyl translates w.𝔖_j of the
//! chamber tiles, together with the geometric constants c₁–c₅, C_Σ extracted
//! from the root system and the phase-derivative lower bound they guarantee.
//!
//! The tiles are indexed by pairs (w, j): w a Weyl element, j a simple-root
//! index. The cutoff χ_{w.S_j} is supported where, in the w-frame, all simple
//! pairings ⟨α_k, λ⟩ exceed −c₁|λ| and the j-th pairing is maximal up to
//! c₁|λ|; on that support the separation bounds ⟨α_j, λ⟩ ≥ c₂|λ|,
//! |⟨α, λ⟩| ≥ c₄|λ| (for roots α not orthogonal to w.Λ_j) and
//! ⟨w.Λ_j, λ⟩ ≥ c₅|λ| all hold.

use crate::geom::{solve, SquareMat, Vector};
use crate::rootsys::{half_sum_rho, weyl_group, RootSysError, RootSystem, WeylGroup};
use crate::sampling::{rng_for, shell_vector};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChamberError {
    #[error("simple roots do not form a basis (singular matrix)")]
    SingularGram,
    #[error("λ = 0 does not belong to any tile")]
    ZeroLambda,
    #[error("tile (w = {w}, j = {j}) out of range")]
    BadTile { w: usize, j: usize },
    #[error("|x| = {x_norm:.6e} exceeds the cone aperture C_Σ·|Im τ| = {limit:.6e}")]
    OutsideCone { x_norm: f64, limit: f64 },
    #[error("τ must be nonzero")]
    ZeroTau,
    #[error(transparent)]
    RootSys(#[from] RootSysError),
}

/// Dual basis of the simple roots: ⟨α_j, Λ_k⟩ = δ_jk. The closed positive
/// chamber is exactly the cone of nonnegative combinations of the Λ_k, and
/// ⟨Λ_j, Λ_k⟩ ≥ 0 entrywise for every catalog system.
#[derive(Clone, Debug)]
pub struct DualBasis {
    pub lambdas: Vec<Vector>,
}

pub fn dual_basis(rs: &RootSystem) -> Result<DualBasis, ChamberError> {
    let rows: Vec<Vec<f64>> = rs
        .simple_roots()
        .iter()
        .map(|a| a.coords.clone())
        .collect();
    let m = SquareMat::from_rows(&rows);
    let mut lambdas = Vec::with_capacity(rs.rank);
    for j in 0..rs.rank {
        let mut e = Vector::zeros(rs.rank);
        e.coords[j] = 1.0;
        lambdas.push(solve(&m, &e).ok_or(ChamberError::SingularGram)?);
    }
    Ok(DualBasis { lambdas })
}

/// Geometric constants of the partition. All are determined by the root
/// geometry alone (multiplicities play no role here).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartitionConstants {
    /// Transition width of the cutoff profile: c₁ = ½ c₂ min{1/L₁, M₁²/(M₂L₂)},
    /// i.e. half the allowed supremum, so c₄ and c₅ stay away from 0.
    pub c1: f64,
    /// c₂ = c₃ / (2ℓ).
    pub c2: f64,
    /// Margined lower bound for Σ_k |⟨α_k, λ⟩| on the unit sphere (0.99 × raw).
    pub c3: f64,
    /// Raw numerical minimum of Σ_k |⟨α_k, λ⟩| before the 1% safety margin.
    pub c3_raw: f64,
    /// Root separation on tile supports: c₄ = c₂ − L₁c₁ > 0.
    pub c4: f64,
    /// Vertex pairing on tile supports: c₅ = M₁²c₂ − M₂L₂c₁ > 0.
    pub c5: f64,
    /// Space-time cone aperture |x| ≤ C_Σ|t|: C_Σ = min{c₅/(2M₂), 1/2}.
    pub c_sigma: f64,
    /// Highest-root height max_{α∈Σ⁺} Σ_k ⟨α, Λ_k⟩ (a positive integer).
    pub l1: u32,
    /// Sum of dual-basis lengths Σ_k |Λ_k|.
    pub l2: f64,
    /// Shortest dual-basis length min_k |Λ_k|.
    pub m1: f64,
    /// Longest dual-basis length max_k |Λ_k|.
    pub m2: f64,
}

/// Minimize f(u) = Σ_k |⟨α_k, u⟩| over the unit sphere: dense angular grid at
/// ~2⁻¹⁰ resolution followed by deterministic local refinement. f is even and
/// piecewise smooth with a possibly kinked minimum, so the refinement uses
/// bracketing (rank 2) respectively compass descent (rank 3).
fn minimize_pairing_sum(simples: &[Vector]) -> f64 {
    let f = |u: &Vector| -> f64 { simples.iter().map(|a| a.dot(u).abs()).sum() };
    match simples[0].dim() {
        1 => f(&Vector::new(vec![1.0])),
        2 => {
            let eval = |t: f64| f(&Vector::new(vec![t.cos(), t.sin()]));
            let n = 1usize << 13;
            let step = PI / n as f64;
            let (mut best_t, mut best) = (0.0, f64::INFINITY);
            for i in 0..n {
                let t = i as f64 * step;
                let v = eval(t);
                if v < best {
                    best = v;
                    best_t = t;
                }
            }
            let (mut lo, mut hi) = (best_t - step, best_t + step);
            for _ in 0..200 {
                let t1 = lo + (hi - lo) / 3.0;
                let t2 = hi - (hi - lo) / 3.0;
                if eval(t1) < eval(t2) {
                    hi = t2;
                } else {
                    lo = t1;
                }
            }
            best.min(eval(0.5 * (lo + hi)))
        }
        3 => {
            let eval = |th: f64, ph: f64| {
                f(&Vector::new(vec![
                    th.sin() * ph.cos(),
                    th.sin() * ph.sin(),
                    th.cos(),
                ]))
            };
            let (nt, np) = (4096usize, 8192usize);
            let (mut bt, mut bp, mut best) = (0.0f64, 0.0f64, f64::INFINITY);
            for i in 0..=nt {
                let th = PI * i as f64 / nt as f64;
                for k in 0..np {
                    let ph = 2.0 * PI * k as f64 / np as f64;
                    let v = eval(th, ph);
                    if v < best {
                        best = v;
                        bt = th;
                        bp = ph;
                    }
                }
            }
            let (mut st, mut sp) = (PI / nt as f64, 2.0 * PI / np as f64);
            for _ in 0..120 {
                let mut improved = false;
                for (dt, dp) in [(st, 0.0), (-st, 0.0), (0.0, sp), (0.0, -sp)] {
                    let v = eval(bt + dt, bp + dp);
                    if v < best {
                        best = v;
                        bt += dt;
                        bp += dp;
                        improved = true;
                    }
                }
                if !improved {
                    st *= 0.5;
                    sp *= 0.5;
                }
            }
            best
        }
        n => panic!("catalog rank is at most 3 (got {n})"),
    }
}

pub fn extract_constants(rs: &RootSystem) -> Result<PartitionConstants, ChamberError> {
    let db = dual_basis(rs)?;
    let simples: Vec<Vector> = rs.simple_roots().into_iter().cloned().collect();
    let c3_raw = minimize_pairing_sum(&simples);
    let c3 = 0.99 * c3_raw;
    let ell = rs.rank as f64;
    let c2 = c3 / (2.0 * ell);

    let mut l1 = 0u32;
    for r in &rs.positive_roots {
        let height: f64 = db.lambdas.iter().map(|l| r.vector.dot(l)).sum();
        debug_assert!(
            (height - height.round()).abs() < 1e-9,
            "root heights must be integers"
        );
        l1 = l1.max(height.round() as u32);
    }
    let norms: Vec<f64> = db.lambdas.iter().map(|l| l.norm()).collect();
    let l2: f64 = norms.iter().sum();
    let m1 = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let m2 = norms.iter().cloned().fold(0.0f64, f64::max);

    let c1 = 0.5 * c2 * (1.0 / l1 as f64).min(m1 * m1 / (m2 * l2));
    let c4 = c2 - l1 as f64 * c1;
    let c5 = m1 * m1 * c2 - m2 * l2 * c1;
    let c_sigma = (c5 / (2.0 * m2)).min(0.5);
    Ok(PartitionConstants {
        c1,
        c2,
        c3,
        c3_raw,
        c4,
        c5,
        c_sigma,
        l1,
        l2,
        m1,
        m2,
    })
}

/// One tile of the spherical tiling: Weyl element index `w` (into the BFS
/// enumeration, 0 = identity) and simple-root index `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TileId {
    pub w: usize,
    pub j: usize,
}

/// Smooth nondecreasing profile with χ(r) = 0 for r ≤ −c₁ and χ(r) = 1 for
/// r ≥ 0, built from the classical bump g(r) = e^{−1/r}:
/// χ(r) = g((r+c₁)/c₁) / (g((r+c₁)/c₁) + g(−r/c₁)), clamped exactly outside
/// the transition interval.
#[derive(Clone, Copy, Debug)]
pub struct CutoffProfile {
    pub c1: f64,
}

impl CutoffProfile {
    fn g(r: f64) -> f64 {
        if r > 0.0 {
            (-1.0 / r).exp()
        } else {
            0.0
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r >= 0.0 {
            1.0
        } else if r <= -self.c1 {
            0.0
        } else {
            let a = Self::g((r + self.c1) / self.c1);
            let b = Self::g(-r / self.c1);
            // the two arguments sum to 1, so at least one term is ≥ g(1/2) > 0
            a / (a + b)
        }
    }
}

struct TileData {
    /// w.α_k for every simple root α_k.
    walpha: Vec<Vector>,
    /// w.Λ_j.
    wlambda: Vector,
}

/// The full partition machinery for one root system: dual basis, constants,
/// per-tile transported frames, and the cutoff evaluators.
pub struct Partition {
    rank: usize,
    simples: Vec<Vector>,
    lambdas: Vec<Vector>,
    /// All positive roots (for the support separation checks).
    roots: Vec<Vector>,
    weyl: WeylGroup,
    pub consts: PartitionConstants,
    profile: CutoffProfile,
    tiles: Vec<TileData>,
}

impl Partition {
    pub fn new(rs: &RootSystem) -> Result<Self, ChamberError> {
        let db = dual_basis(rs)?;
        let consts = extract_constants(rs)?;
        let weyl = weyl_group(rs)?;
        let simples: Vec<Vector> = rs.simple_roots().into_iter().cloned().collect();
        let roots: Vec<Vector> = rs.positive_roots.iter().map(|r| r.vector.clone()).collect();
        let mut tiles = Vec::with_capacity(weyl.order() * rs.rank);
        for m in &weyl.elements {
            for lam in &db.lambdas {
                tiles.push(TileData {
                    walpha: simples.iter().map(|a| m.apply(a)).collect(),
                    wlambda: m.apply(lam),
                });
            }
        }
        Ok(Partition {
            rank: rs.rank,
            simples,
            lambdas: db.lambdas,
            roots,
            weyl,
            consts,
            profile: CutoffProfile { c1: consts.c1 },
            tiles,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn weyl_order(&self) -> usize {
        self.weyl.order()
    }

    pub fn weyl_element(&self, w: usize) -> &SquareMat {
        &self.weyl.elements[w]
    }

    pub fn simple_roots(&self) -> &[Vector] {
        &self.simples
    }

    pub fn lambdas(&self) -> &[Vector] {
        &self.lambdas
    }

    /// The scalar cutoff profile (exposed for smoothness tests and plots).
    pub fn chi_profile(&self, r: f64) -> f64 {
        self.profile.eval(r)
    }

    /// All tiles in (w-major, j-minor) order.
    pub fn tiles(&self) -> impl Iterator<Item = TileId> {
        let (n, ell) = (self.weyl.order(), self.rank);
        (0..n).flat_map(move |w| (0..ell).map(move |j| TileId { w, j }))
    }

    fn tile_data(&self, t: TileId) -> Result<&TileData, ChamberError> {
        if t.w >= self.weyl.order() || t.j >= self.rank {
            return Err(ChamberError::BadTile { w: t.w, j: t.j });
        }
        Ok(&self.tiles[t.w * self.rank + t.j])
    }

    /// The transported vertex direction w.Λ_j of a tile.
    pub fn tile_lambda(&self, t: TileId) -> Result<&Vector, ChamberError> {
        Ok(&self.tile_data(t)?.wlambda)
    }

    /// Unnormalized cutoff χ̃_{w.S_j}(λ): product over the simple directions in
    /// the w-frame of χ(⟨w.α_k, λ⟩/|λ|) · χ((⟨w.α_j, λ⟩ − ⟨w.α_k, λ⟩)/|λ|) for
    /// k ≠ j, times the wall factor χ(⟨w.α_j, λ⟩/|λ|). The wall factor is
    /// identically 1 on the support when ℓ ≥ 2 (the band argument forces
    /// ⟨α_j, λ⟩ ≥ c₂|λ| there) and makes the rank-one partition cut the line
    /// into its two half-lines instead of degenerating to a constant.
    pub fn chi_tilde(&self, t: TileId, lam: &Vector) -> Result<f64, ChamberError> {
        let td = self.tile_data(t)?;
        let n = lam.norm();
        if n == 0.0 {
            return Err(ChamberError::ZeroLambda);
        }
        let pj = td.walpha[t.j].dot(lam);
        let mut prod = self.profile.eval(pj / n);
        for k in 0..self.rank {
            if k == t.j || prod == 0.0 {
                continue;
            }
            let pk = td.walpha[k].dot(lam);
            prod *= self.profile.eval(pk / n) * self.profile.eval((pj - pk) / n);
        }
        Ok(prod)
    }

    /// Σ over all tiles of χ̃; always ≥ 1 away from the origin.
    pub fn chi_tilde_sum(&self, lam: &Vector) -> Result<f64, ChamberError> {
        let mut s = 0.0;
        for t in self.tiles() {
            s += self.chi_tilde(t, lam)?;
        }
        Ok(s)
    }

    /// Normalized cutoff χ_{w.S_j} = χ̃_{w.S_j} / Σ χ̃; the family sums to 1 on
    /// 𝔞 ∖ {0} and each factor is homogeneous of degree 0.
    pub fn chi(&self, t: TileId, lam: &Vector) -> Result<f64, ChamberError> {
        let num = self.chi_tilde(t, lam)?;
        if num == 0.0 {
            return Ok(0.0);
        }
        Ok(num / self.chi_tilde_sum(lam)?)
    }

    /// The tile containing λ: w⁻¹λ lies in the closed positive chamber and the
    /// j-th simple pairing is maximal; ties are broken by smallest j, then
    /// smallest Weyl index (the tiling is almost-everywhere disjoint, so ties
    /// occur only on a null set but must be deterministic).
    pub fn tile_of(&self, lam: &Vector) -> Result<TileId, ChamberError> {
        let n = lam.norm();
        if n == 0.0 {
            return Err(ChamberError::ZeroLambda);
        }
        let tol = 1e-12 * n;
        for j in 0..self.rank {
            for w in 0..self.weyl.order() {
                let mu = self.weyl.elements[w].apply_transpose(lam);
                let coords: Vec<f64> = self.simples.iter().map(|a| a.dot(&mu)).collect();
                if coords.iter().any(|&c| c < -tol) {
                    continue;
                }
                let maxc = coords.iter().cloned().fold(f64::MIN, f64::max);
                if coords[j] >= maxc - tol {
                    return Ok(TileId { w, j });
                }
            }
        }
        unreachable!("the closed Weyl chambers cover 𝔞, so every λ ≠ 0 has a tile")
    }
}

#[derive(Clone, Debug)]
pub struct SupportViolation {
    pub lambda: Vector,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct SupportReport {
    /// Number of sampled λ that landed in the support and were checked.
    pub checked: usize,
    /// Total rejection-sampling attempts.
    pub attempts: usize,
    pub violations: Vec<SupportViolation>,
}

/// Sample points of supp χ̃_{w.S_j} and verify the separation bounds that hold
/// there: every positive root α with ⟨α, w.Λ_j⟩ ≠ 0 satisfies |⟨α, λ⟩| ≥ c₄|λ|,
/// and ⟨w.Λ_j, λ⟩ ≥ c₅|λ|. Violations are collected into the report (with the
/// witnessing λ), never raised as errors.
pub fn support_properties_check(
    p: &Partition,
    tile: TileId,
    samples: usize,
    seed: u64,
) -> SupportReport {
    let td = p.tile_data(tile).expect("valid tile id");
    let wlj = &td.wlambda;
    let mut rng = rng_for(seed, &format!("chamber-support-w{}-j{}", tile.w, tile.j));
    let mut report = SupportReport {
        checked: 0,
        attempts: 0,
        violations: Vec::new(),
    };
    let max_attempts = samples.saturating_mul(2000).max(10_000);
    while report.checked < samples && report.attempts < max_attempts {
        report.attempts += 1;
        let lam = shell_vector(&mut rng, p.rank, 1.0, 10.0);
        if p.chi_tilde(tile, &lam).expect("λ ≠ 0 by construction") <= 0.0 {
            continue;
        }
        report.checked += 1;
        let n = lam.norm();
        let tol = 1e-12 * n;
        for (i, alpha) in p.roots.iter().enumerate() {
            if alpha.dot(wlj).abs() <= 1e-12 {
                continue; // roots orthogonal to the vertex are exempt
            }
            let v = alpha.dot(&lam).abs();
            if v + tol < p.consts.c4 * n {
                report.violations.push(SupportViolation {
                    lambda: lam.clone(),
                    message: format!(
                        "positive root #{i}: |⟨α, λ⟩| = {v:.6e} < c₄|λ| = {:.6e}",
                        p.consts.c4 * n
                    ),
                });
            }
        }
        let vp = wlj.dot(&lam);
        if vp + tol < p.consts.c5 * n {
            report.violations.push(SupportViolation {
                lambda: lam.clone(),
                message: format!(
                    "vertex pairing ⟨w.Λ_j, λ⟩ = {vp:.6e} < c₅|λ| = {:.6e}",
                    p.consts.c5 * n
                ),
            });
        }
    }
    report
}

#[derive(Clone, Copy, Debug)]
pub struct PhaseBoundReport {
    /// Minimum sampled |⟨w.Λ_j, λ/√(|λ|²+|ρ|²) − iA/τ⟩|.
    pub min_abs: f64,
    /// The guaranteed floor (√2 − 1)/2 · c₅.
    pub bound: f64,
    /// true iff the sampled minimum dipped below the floor.
    pub flagged: bool,
    pub checked: usize,
}

/// Sample the modulus of the directional phase derivative
/// ∂_{w.Λ_j} ψ_{iτ}(λ) = ⟨w.Λ_j, λ⟩/√(|λ|²+|ρ|²) − i⟨w.Λ_j, A⟩/τ
/// over (supp χ_{w.S_j}) ∩ {|λ| ≥ |ρ|} and compare with the floor
/// (√2−1)/2 · c₅, which is guaranteed whenever |A| ≤ C_Σ|Im τ| (the wave-cone
/// precondition; violating it is an error, not a flag).
pub fn phase_derivative_lower_bound(
    rs: &RootSystem,
    p: &Partition,
    tile: TileId,
    tau: Complex64,
    x: &Vector,
    samples: usize,
    seed: u64,
) -> Result<PhaseBoundReport, ChamberError> {
    if tau == Complex64::new(0.0, 0.0) {
        return Err(ChamberError::ZeroTau);
    }
    let x_norm = x.norm();
    let limit = p.consts.c_sigma * tau.im.abs();
    if x_norm > limit * (1.0 + 1e-12) {
        return Err(ChamberError::OutsideCone { x_norm, limit });
    }
    let rho_norm = half_sum_rho(rs).norm();
    let wlj = p.tile_data(tile)?.wlambda.clone();
    let b = wlj.dot(x);
    let mut rng = rng_for(seed, &format!("chamber-phase-w{}-j{}", tile.w, tile.j));
    let bound = 0.5 * (2f64.sqrt() - 1.0) * p.consts.c5;
    let mut min_abs = f64::INFINITY;
    let mut checked = 0usize;
    let mut attempts = 0usize;
    let max_attempts = samples.saturating_mul(2000).max(10_000);
    while checked < samples && attempts < max_attempts {
        attempts += 1;
        let lam = shell_vector(&mut rng, p.rank, rho_norm, 10.0 * rho_norm);
        if p.chi_tilde(tile, &lam)? <= 0.0 {
            continue;
        }
        checked += 1;
        let a = wlj.dot(&lam) / (lam.norm_sq() + rho_norm * rho_norm).sqrt();
        let z = Complex64::new(a, 0.0) - Complex64::new(0.0, b) / tau;
        min_abs = min_abs.min(z.norm());
    }
    Ok(PhaseBoundReport {
        min_abs,
        bound,
        flagged: min_abs < bound,
        checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootsys::{build_root_system, Catalog, Multiplicities};

    #[test]
    fn profile_transition_is_strictly_between_endpoints() {
        let p = CutoffProfile { c1: 0.2 };
        let mid = p.eval(-0.1);
        assert!(mid > 0.0 && mid < 1.0);
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.eval(-0.2), 0.0);
    }

    #[test]
    fn rank_one_tiles_are_half_lines() {
        let rs = build_root_system(Catalog::A1, Multiplicities::RealHyperbolic { d: 4 }).unwrap();
        let p = Partition::new(&rs).unwrap();
        let plus = Vector::new(vec![3.0]);
        let minus = Vector::new(vec![-3.0]);
        assert_eq!(p.tile_of(&plus).unwrap().j, 0);
        let sum_p = p.chi_tilde_sum(&plus).unwrap();
        let sum_m = p.chi_tilde_sum(&minus).unwrap();
        assert_eq!(sum_p, 1.0);
        assert_eq!(sum_m, 1.0);
    }
}

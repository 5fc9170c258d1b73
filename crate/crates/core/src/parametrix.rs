//! Hadamard parametrix machinery: the exponential-map Jacobian J, the
//! potential ω relating the two radial Laplacians, the folkloric cancellation
//! sums, the transport recursion for the Hadamard coefficients U_k, Riesz
//! distributions, the leading expansion of the truncated Poisson kernel a_τ,
//! and the two closed integral identities used to control it.
//!
//! The Jacobian of exp: 𝔭 → X satisfies
//!
//!   J(H)^{−1/2} = ∏_{α∈Σ⁺} (⟨α,H⟩/sinh⟨α,H⟩)^{m_α/2}
//!              ≍ {∏ (1+⟨α,H⟩)^{m_α/2}} e^{−⟨ρ,H⟩},
//!
//! an even analytic function of each ⟨α,H⟩, so both J and J^{−1/2} extend
//! smoothly across the chamber walls.  Conjugating the radial Laplacian
//!
//!   Δ_rad = Δ_𝔞 + Σ m_α coth⟨α,H⟩ ∂_α
//!
//! by J^{1/2} produces its flat counterpart Δ_rad^p = Δ_𝔞 + Σ m_α ⟨α,H⟩⁻¹∂_α
//! plus the multiplication operator
//!
//!   ω(H) = J(H)^{1/2} (Δ_rad J^{−1/2})(H),
//!
//! which this module evaluates from that defining identity by the chain
//! rule on S = ln J^{1/2} (so the result is exact up to roundoff and never
//! forms e^{−⟨ρ,H⟩}); the closed form displayed alongside it
//! in the source material is treated as a rank-one cross-check only, with
//! the bracket read as 1/⟨α,H⟩² − 1/sinh²⟨α,H⟩ — the unsquared variant is
//! inconsistent with the asserted boundedness.  ω is smooth, W-invariant,
//! uniformly bounded, and tends to −|ρ|² along interior rays.
//!
//! The wave kernel Φ_v = cos(v√−Δ)δ_e has the Hadamard expansion
//!
//!   Φ_v(exp H) = J(H)^{−1/2} Σ_k 4^{−k} |v| U_k(H) R₊^{k−(d−1)/2}(v²−|H|²),
//!
//! where R₊^z(r) = Γ(z)⁻¹ r^{z−1} on r > 0 and the coefficients solve the
//! transport identity [(k+1) + ∂_H] U_{k+1} = [Δ_rad^p + ω] U_k, ∂_H being
//! the radial Euler operator H·∇ — the reading forced by the equivalent
//! integral form U_{k+1}(H) = ∫₀¹ ds s^k [Δ_rad^p + ω](U_k)(sH).  U₀ is the
//! constant fixed by the Euclidean delta limit, U₀ = π^{(1−d)/2}: on ℝ¹ the
//! k = 0 term is d'Alembert's ½[δ(x−v)+δ(x+v)] and on ℝ³ it sifts into
//! Kirchhoff's formula.  Truncating at K = ⌊d/2⌋ and integrating against the
//! Euclidean Poisson kernel in v yields the leading expansion
//!
//!   a_τ(exp H) ≈ (τ/π) J(H)^{−1/2} Σ_{k≤⌊d/2⌋} 4^{−k} U_k(H)
//!                 Γ((d+1)/2 − k) (|H|²+τ²)^{k−(d+1)/2},
//!
//! with the principal branch of the complex power (Re τ > 0 keeps |H|²+τ²
//! off the negative real axis).  The recursion is radialized, hence exact
//! transport tables are produced in rank one; higher-rank grids tabulate ω
//! and the constant U₀ term.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use thiserror::Error;

use crate::geom::Vector;
use crate::plancherel::{log_gamma, PlancherelError};
use crate::quad::{adaptive, gauss_legendre, Budget, QuadError, QuadOpts};
use crate::rootsys::{dims, RootSystem};

#[derive(Debug, Error)]
pub enum ParametrixError {
    #[error("H lies on the wall of root #{index}: ⟨α,H⟩ = {value:.3e}")]
    WallPoint { index: usize, value: f64 },
    #[error("radius {r} lies outside the tabulated range [0, {r_max}]")]
    OffGrid { r: f64, r_max: f64 },
    #[error("unsupported configuration for {label}: {reason}")]
    Unsupported { label: String, reason: String },
    #[error("bad parameter for {what}: {why}")]
    BadParameter { what: &'static str, why: String },
    #[error("no displayed case matches n = {n}, γ = {gamma}")]
    CaseMismatch { n: f64, gamma: f64 },
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Plancherel(#[from] PlancherelError),
}

// ---------------------------------------------------------------------------
// Jacobian and the potential ω
// ---------------------------------------------------------------------------

/// ln(sinh x / x) for x ≥ 0, stable from the origin (series) to large x
/// (x − ln 2 − ln x plus the exponentially small correction).
fn ln_sinh_over_x(x: f64) -> f64 {
    if x < 1e-3 {
        let x2 = x * x;
        x2 / 6.0 - x2 * x2 / 180.0
    } else if x < 20.0 {
        (x.sinh() / x).ln()
    } else {
        x - LN_2 - x.ln() + (-2.0 * x).exp().ln_1p()
    }
}

/// Jacobian of the exponential map, J(H) = ∏_{α∈Σ⁺} (sinh⟨α,H⟩/⟨α,H⟩)^{m_α}.
/// Smooth and ≥ 1 on all of 𝔞, with equality exactly at H = 0.
pub fn jacobian_j(rs: &RootSystem, h: &Vector) -> f64 {
    let mut s = 0.0;
    for root in &rs.positive_roots {
        s += root.mult as f64 * ln_sinh_over_x(root.vector.dot(h).abs());
    }
    s.exp()
}

/// J(H)^{−1/2} = ∏ (⟨α,H⟩/sinh⟨α,H⟩)^{m_α/2} ≍ ∏(1+⟨α,H⟩)^{m_α/2} e^{−⟨ρ,H⟩}.
pub fn j_inv_sqrt(rs: &RootSystem, h: &Vector) -> f64 {
    let mut s = 0.0;
    for root in &rs.positive_roots {
        s += 0.5 * root.mult as f64 * ln_sinh_over_x(root.vector.dot(h).abs());
    }
    (-s).exp()
}

fn wall_check(rs: &RootSystem, h: &Vector, tol: f64) -> Result<(), ParametrixError> {
    for (index, root) in rs.positive_roots.iter().enumerate() {
        let value = root.vector.dot(h);
        if value.abs() <= tol {
            return Err(ParametrixError::WallPoint { index, value });
        }
    }
    Ok(())
}

/// d/dx ln(sinh x/x) = coth x − 1/x, odd, analytic through 0; the series
/// branch avoids the 1/x cancellation.
fn l_prime(u: f64) -> f64 {
    if u.abs() < 0.05 {
        let u2 = u * u;
        u * (1.0 / 3.0 - u2 / 45.0 + 2.0 * u2 * u2 / 945.0)
    } else {
        1.0 / u.tanh() - 1.0 / u
    }
}

/// d²/dx² ln(sinh x/x) = 1/x² − 1/sinh²x, even, analytic through 0.
fn l_second(u: f64) -> f64 {
    if u.abs() < 0.05 {
        let u2 = u * u;
        1.0 / 3.0 - u2 / 15.0 + 2.0 * u2 * u2 / 189.0
    } else {
        let s = u.sinh();
        1.0 / (u * u) - 1.0 / (s * s)
    }
}

/// ω(H) = J^{1/2}(Δ_rad J^{−1/2})(H) on the open chamber.  Writing
/// J^{−1/2} = e^{−S} with S = ½ Σ m_α ln(sinh⟨α,H⟩/⟨α,H⟩), the chain rule
/// turns the defining identity into the closed form
///   ω = |∇S|² − ΔS − Σ m_α coth⟨α,H⟩ ⟨α,∇S⟩,
/// with ∇S = ½ Σ m_α L′(⟨α,H⟩) α and ΔS = ½ Σ m_α L″(⟨α,H⟩)|α|², so no
/// exponential of −⟨ρ,H⟩ is ever formed and the evaluation stays exact
/// arbitrarily far out.  Smooth, uniformly bounded, ω → −|ρ|² along interior
/// rays at rate O(|H|⁻²).
pub fn omega_fn(rs: &RootSystem, h: &Vector) -> Result<f64, ParametrixError> {
    if h.dim() != rs.rank {
        return Err(ParametrixError::BadParameter {
            what: "ω",
            why: format!("point dimension {} ≠ rank {}", h.dim(), rs.rank),
        });
    }
    wall_check(rs, h, 1e-6 * (1.0 + h.norm()))?;
    let mut grad_s = Vector::zeros(rs.rank);
    let mut lap_s = 0.0;
    for root in &rs.positive_roots {
        let u = root.vector.dot(h);
        let m = root.mult as f64;
        grad_s = grad_s.axpy(0.5 * m * l_prime(u), &root.vector);
        lap_s += 0.5 * m * l_second(u) * root.vector.norm_sq();
    }
    let mut total = grad_s.norm_sq() - lap_s;
    for root in &rs.positive_roots {
        let u = root.vector.dot(h);
        total -= root.mult as f64 / u.tanh() * root.vector.dot(&grad_s);
    }
    Ok(total)
}

/// The two folkloric cancellation sums over non-proportional pairs of
/// positive roots,
///   r₁ = Σ m_α m_β ⟨α,β⟩ / (⟨α,H⟩⟨β,H⟩),
///   r₂ = Σ m_α m_β ⟨α,β⟩ (coth⟨α,H⟩ coth⟨β,H⟩ − 1),
/// both identically zero on the open chamber.  Rank one has no such pairs.
pub fn cancellation_check(rs: &RootSystem, h: &Vector) -> Result<(f64, f64), ParametrixError> {
    if h.dim() != rs.rank {
        return Err(ParametrixError::BadParameter {
            what: "cancellation sums",
            why: format!("point dimension {} ≠ rank {}", h.dim(), rs.rank),
        });
    }
    wall_check(rs, h, 1e-9 * (1.0 + h.norm()))?;
    let roots = &rs.positive_roots;
    let mut r1 = 0.0;
    let mut r2 = 0.0;
    for (i, a) in roots.iter().enumerate() {
        let ua = a.vector.dot(h);
        let ca = 1.0 / ua.tanh();
        for (j, b) in roots.iter().enumerate() {
            if i == j {
                continue;
            }
            let ab = a.vector.dot(&b.vector);
            if ab * ab >= (1.0 - 1e-10) * a.vector.norm_sq() * b.vector.norm_sq() {
                continue; // ℝα = ℝβ (the root itself or its double)
            }
            let ub = b.vector.dot(h);
            let mm = (a.mult * b.mult) as f64;
            r1 += mm * ab / (ua * ub);
            r2 += mm * ab * (ca / ub.tanh() - 1.0);
        }
    }
    Ok((r1, r2))
}

// ---------------------------------------------------------------------------
// radial grids, tables, and the transport recursion
// ---------------------------------------------------------------------------

/// Uniform radial grid along an interior chamber ray, offset from the origin
/// (where every wall meets) by half a step.
#[derive(Clone, Debug)]
pub struct RadialGrid {
    /// unit direction of the ray, strictly inside the chamber
    pub direction: Vector,
    /// radii (i + ½)h, strictly increasing
    pub radii: Vec<f64>,
    /// grid spacing
    pub h: f64,
}

impl RadialGrid {
    pub fn along_ray(
        rs: &RootSystem,
        direction: &Vector,
        h: f64,
        n: usize,
    ) -> Result<RadialGrid, ParametrixError> {
        if direction.dim() != rs.rank {
            return Err(ParametrixError::BadParameter {
                what: "ray direction",
                why: format!("dimension {} ≠ rank {}", direction.dim(), rs.rank),
            });
        }
        if !(h.is_finite() && (1e-5..=1.0).contains(&h)) {
            return Err(ParametrixError::BadParameter {
                what: "grid spacing",
                why: format!("h = {h} outside [1e-5, 1]"),
            });
        }
        if n < 8 {
            return Err(ParametrixError::BadParameter {
                what: "grid size",
                why: format!("need at least 8 points, got {n}"),
            });
        }
        if !(direction.norm() > 0.0) || !direction.is_finite() {
            return Err(ParametrixError::BadParameter {
                what: "ray direction",
                why: "must be a nonzero finite vector".into(),
            });
        }
        let unit = direction.normalized();
        for (index, root) in rs.positive_roots.iter().enumerate() {
            let value = root.vector.dot(&unit);
            if value <= 1e-9 {
                return Err(ParametrixError::WallPoint { index, value });
            }
        }
        let radii = (0..n).map(|i| (i as f64 + 0.5) * h).collect();
        Ok(RadialGrid {
            direction: unit,
            radii,
            h,
        })
    }
}

/// Hadamard coefficients U₀…U_K and the potential ω tabulated on one ray.
#[derive(Clone, Debug)]
pub struct ParametrixTable {
    pub grid: RadialGrid,
    /// ω at the grid radii
    pub omega: Vec<f64>,
    /// u[k][j] = U_k(r_j û); u[0] is the constant π^{(1−d)/2}
    pub u: Vec<Vec<f64>>,
    /// truncation order K
    pub k_max: usize,
}

/// Reflected index for the even extension across r = 0 of a half-grid
/// r_i = (i+½)h: the virtual node −1−m coincides with the mirror of node m.
fn refl(i: isize) -> usize {
    if i < 0 {
        (-1 - i) as usize
    } else {
        i as usize
    }
}

/// Cubic Lagrange interpolation on the uniform half-grid, using the even
/// extension near the origin; exact on cubics.
fn interp_even(values: &[f64], r0: f64, h: f64, x: f64) -> f64 {
    let n = values.len() as isize;
    let xi = (x.abs() - r0) / h;
    let mut i0 = xi.floor() as isize - 1;
    if i0 + 3 > n - 1 {
        i0 = n - 4;
    }
    let t = xi - i0 as f64;
    let f = |k: isize| values[refl(i0 + k).min((n - 1) as usize)];
    let w0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let w1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let w2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let w3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    w0 * f(0) + w1 * f(1) + w2 * f(2) + w3 * f(3)
}

/// Second-order first derivative on the half-grid (even reflection at the
/// origin, one-sided at the outer edge).
fn d1(values: &[f64], i: usize, h: f64) -> f64 {
    let n = values.len();
    if i < n - 1 {
        (values[i + 1] - values[refl(i as isize - 1)]) / (2.0 * h)
    } else {
        (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h)
    }
}

/// Second-order second derivative, same edge conventions.
fn d2(values: &[f64], i: usize, h: f64) -> f64 {
    let n = values.len();
    if i < n - 1 {
        (values[i + 1] - 2.0 * values[i] + values[refl(i as isize - 1)]) / (h * h)
    } else {
        (2.0 * values[n - 1] - 5.0 * values[n - 2] + 4.0 * values[n - 3] - values[n - 4])
            / (h * h)
    }
}

/// [Δ_rad^p + ω] applied to a tabulated radial function: in rank one the flat
/// radial Laplacian is ∂_r² + (d−1)r⁻¹∂_r.
fn flat_rhs_row(u_row: &[f64], omega: &[f64], radii: &[f64], h: f64, d: u32) -> Vec<f64> {
    let dm1 = d as f64 - 1.0;
    (0..u_row.len())
        .map(|i| d2(u_row, i, h) + dm1 / radii[i] * d1(u_row, i, h) + omega[i] * u_row[i])
        .collect()
}

impl ParametrixTable {
    /// U_k at an arbitrary radius within the tabulated range.
    pub fn u_at(&self, k: usize, r: f64) -> Result<f64, ParametrixError> {
        if k > self.k_max {
            return Err(ParametrixError::BadParameter {
                what: "coefficient order",
                why: format!("k = {k} exceeds the table order {}", self.k_max),
            });
        }
        let r_max = *self.grid.radii.last().unwrap();
        if !(r.abs() <= r_max + 0.5 * self.grid.h) {
            return Err(ParametrixError::OffGrid {
                r,
                r_max,
            });
        }
        Ok(interp_even(
            &self.u[k],
            self.grid.radii[0],
            self.grid.h,
            r,
        ))
    }
}

/// Build the table U₀…U_K by the integral recursion
/// U_{k+1}(H) = ∫₀¹ ds s^k [Δ_rad^p + ω](U_k)(sH), Gauss–Legendre in s on
/// the interpolated right-hand side.  K must not exceed ⌊d/2⌋, and the
/// radialized recursion requires rank one for K ≥ 1 (the flat Laplacian of
/// a W-invariant function on a single higher-rank ray is underdetermined);
/// K = 0 tabulates ω and the constant U₀ for any rank.
pub fn uk_recursion(
    rs: &RootSystem,
    grid: &RadialGrid,
    k_max: usize,
) -> Result<ParametrixTable, ParametrixError> {
    let (d, _) = dims(rs);
    if k_max > (d / 2) as usize {
        return Err(ParametrixError::BadParameter {
            what: "truncation order",
            why: format!("K = {k_max} exceeds ⌊d/2⌋ = {}", d / 2),
        });
    }
    if k_max >= 1 && rs.rank != 1 {
        return Err(ParametrixError::Unsupported {
            label: rs.label.clone(),
            reason: "the transport recursion is radialized in rank one; higher-rank tables carry K = 0".into(),
        });
    }
    if grid.radii.len() < 8 {
        return Err(ParametrixError::BadParameter {
            what: "grid",
            why: "need at least 8 points".into(),
        });
    }
    let h = grid.h;
    if (grid.radii[0] - 0.5 * h).abs() > 1e-9 * h {
        return Err(ParametrixError::BadParameter {
            what: "grid",
            why: "first radius must sit at h/2".into(),
        });
    }
    for w in grid.radii.windows(2) {
        if (w[1] - w[0] - h).abs() > 1e-9 * h {
            return Err(ParametrixError::BadParameter {
                what: "grid",
                why: "radii must be uniform with the declared spacing".into(),
            });
        }
    }
    let unit = grid.direction.normalized();
    let n = grid.radii.len();
    let omega: Vec<f64> = grid
        .radii
        .iter()
        .map(|&r| omega_fn(rs, &unit.scale(r)))
        .collect::<Result<_, _>>()?;
    let u0 = PI.powf((1.0 - d as f64) / 2.0);
    let mut u: Vec<Vec<f64>> = vec![vec![u0; n]];
    for k in 0..k_max {
        let rhs = flat_rhs_row(&u[k], &omega, &grid.radii, h, d);
        let sk = k as i32;
        let next: Vec<f64> = grid
            .radii
            .iter()
            .map(|&rj| {
                let mut acc = 0.0;
                for &(x, w) in gauss_legendre(64) {
                    let s = 0.5 + 0.5 * x;
                    acc += w * s.powi(sk) * interp_even(&rhs, grid.radii[0], h, s * rj);
                }
                0.5 * acc
            })
            .collect();
        u.push(next);
    }
    Ok(ParametrixTable {
        grid: grid.clone(),
        omega,
        u,
        k_max,
    })
}

/// Maximum relative residual of the transport identity
/// [(k+1) + r∂_r] U_{k+1} = [Δ_rad^p + ω] U_k over the interior grid points,
/// with second-order stencils; refining the grid should shrink it at second
/// order.
pub fn transport_residual(
    rs: &RootSystem,
    table: &ParametrixTable,
    k: usize,
) -> Result<f64, ParametrixError> {
    if k + 1 > table.k_max {
        return Err(ParametrixError::BadParameter {
            what: "transport residual",
            why: format!("needs U_{} in a table of order {}", k + 1, table.k_max),
        });
    }
    let (d, _) = dims(rs);
    let h = table.grid.h;
    let radii = &table.grid.radii;
    let rhs = flat_rhs_row(&table.u[k], &table.omega, radii, h, d);
    let scale = rhs.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let n = radii.len();
    let mut worst = 0.0f64;
    for i in 2..n.saturating_sub(3) {
        let lhs = (k as f64 + 1.0) * table.u[k + 1][i] + radii[i] * d1(&table.u[k + 1], i, h);
        worst = worst.max((lhs - rhs[i]).abs());
    }
    Ok(worst / scale)
}

// ---------------------------------------------------------------------------
// Riesz distributions and the a_τ expansion
// ---------------------------------------------------------------------------

/// Parameter of the Riesz distribution R₊^z in its direct-formula regime.
#[derive(Clone, Copy, Debug)]
pub struct RieszParams {
    pub z: Complex64,
}

impl RieszParams {
    pub fn new(z: Complex64) -> Result<RieszParams, ParametrixError> {
        if !(z.re > 0.0) || !z.is_finite() {
            return Err(ParametrixError::BadParameter {
                what: "Riesz parameter",
                why: format!("requires Re z > 0, got {z}"),
            });
        }
        Ok(RieszParams { z })
    }
}

/// R₊^z(r) = Γ(z)⁻¹ r^{z−1} for r > 0, zero for r ≤ 0.
pub fn riesz_r(params: &RieszParams, r: f64) -> Complex64 {
    if r <= 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let lg = log_gamma(params.z).expect("Re z > 0 has no Gamma pole");
    ((params.z - 1.0) * r.ln() - lg).exp()
}

/// Leading Hadamard expansion of the truncated Poisson kernel at H = r·û on
/// the tabulated ray:
/// a_τ ≈ (τ/π) J^{−1/2} Σ_{k=0}^{min(K,⌊d/2⌋)} 4^{−k} U_k Γ((d+1)/2 − k)
/// (|H|²+τ²)^{k−(d+1)/2}, principal branch.
pub fn a_tau_leading(
    rs: &RootSystem,
    table: &ParametrixTable,
    tau: Complex64,
    h: &Vector,
) -> Result<Complex64, ParametrixError> {
    if !(tau.re > 0.0) || !tau.is_finite() {
        return Err(ParametrixError::BadParameter {
            what: "Poisson parameter τ",
            why: format!("requires Re τ > 0, got {tau}"),
        });
    }
    if h.dim() != rs.rank {
        return Err(ParametrixError::BadParameter {
            what: "a_τ evaluation point",
            why: format!("dimension {} ≠ rank {}", h.dim(), rs.rank),
        });
    }
    let r = h.norm();
    if r > 1e-12 {
        let unit = table.grid.direction.normalized();
        if h.sub(&unit.scale(r)).norm() > 1e-9 * (1.0 + r) {
            return Err(ParametrixError::BadParameter {
                what: "a_τ evaluation point",
                why: "H does not lie on the tabulated ray".into(),
            });
        }
    }
    let (d, _) = dims(rs);
    let kk = table.k_max.min((d / 2) as usize);
    let half = (d as f64 + 1.0) / 2.0;
    let lc = (tau * tau + r * r).ln();
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..=kk {
        let uk = table.u_at(k, r)?;
        let gam = log_gamma(Complex64::new(half - k as f64, 0.0))?.exp().re;
        let power = (lc * (k as f64 - half)).exp();
        sum += 0.25f64.powi(k as i32) * uk * gam * power;
    }
    Ok(tau / PI * j_inv_sqrt(rs, h) * sum)
}

// ---------------------------------------------------------------------------
// the two integral identities
// ---------------------------------------------------------------------------

/// Both sides of the identity
/// ∫₀^∞ d(w²) R₊^{1−ε}(w²−u²) (1/π) z/(w²+z²) with Re z > 0:
/// ε = 1 sifts the Dirac measure R₊⁰ exactly onto z/(π(u²+z²)); ε = ½ is
/// evaluated by quadrature after the substitutions w² = u² + x², x = tan θ,
/// which flatten  it to 2π^{−3/2} z ∫₀^{π/2} dθ (sin²θ + (u²+z²)cos²θ)^{−1},
/// against the closed right side z/(√π √(u²+z²)).
pub fn lemma_b2_check(
    z: Complex64,
    u: f64,
    epsilon: f64,
) -> Result<(Complex64, Complex64), ParametrixError> {
    if !(z.re > 0.0) || !z.is_finite() || !u.is_finite() {
        return Err(ParametrixError::BadParameter {
            what: "Lemma B2",
            why: format!("requires Re z > 0 and finite u, got z = {z}, u = {u}"),
        });
    }
    let c = z * z + u * u;
    if (epsilon - 1.0).abs() <= 1e-12 {
        let v = z / (PI * c);
        Ok((v, v))
    } else if (epsilon - 0.5).abs() <= 1e-12 {
        let rhs = z / (PI.sqrt() * c.sqrt());
        let mut budget = Budget::new(2_000_000);
        let opts = QuadOpts {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_width: PI / 16.0,
            max_depth: 36,
        };
        let (integral, _) = adaptive(
            &mut |th: f64| {
                let (s, co) = th.sin_cos();
                Complex64::new(1.0, 0.0) / (c * (co * co) + s * s)
            },
            0.0,
            PI / 2.0,
            &opts,
            &mut budget,
        )?;
        let lhs = 2.0 * PI.powf(-1.5) * z * integral;
        Ok((lhs, rhs))
    } else {
        Err(ParametrixError::BadParameter {
            what: "Lemma B2",
            why: format!("ε must be 1 or 1/2, got {epsilon}"),
        })
    }
}

/// Numeric left side |z|^{2γ−n} ∫₀^{3T} r^{n−1}|r²+z²|^{−γ} dr together with
/// the displayed envelope for the matching case:
///   γ > 1, n < 2γ:   (|z|/Re z)^{γ−1}
///   γ = 1, n > 2:    (T/|z|)^{n−2} + log(|z|/Re z)
///   γ = 1, n = 2:    1 + log(T/Re z)
///   γ = 1, n < 2:    1 + log(|z|/Re z)
/// The lemma asserts two-sided comparability, so the ratio of the returned
/// pair stays within a fixed window as parameters sweep.
pub fn lemma_b1_spotcheck(
    z: Complex64,
    n: f64,
    gamma: f64,
    t_big: f64,
) -> Result<(f64, f64), ParametrixError> {
    if !(z.re > 0.0) || !z.is_finite() || !(t_big > 0.0) || !t_big.is_finite() {
        return Err(ParametrixError::BadParameter {
            what: "Lemma B1",
            why: format!("requires Re z > 0 and T > 0, got z = {z}, T = {t_big}"),
        });
    }
    if !(n >= 1.0) || !(gamma > 0.0) {
        return Err(ParametrixError::BadParameter {
            what: "Lemma B1",
            why: format!("requires n ≥ 1 and γ > 0, got n = {n}, γ = {gamma}"),
        });
    }
    let zn = z.norm();
    if zn > t_big * (1.0 + 1e-12) {
        return Err(ParametrixError::BadParameter {
            what: "Lemma B1",
            why: format!("requires |z| ≤ T, got |z| = {zn}, T = {t_big}"),
        });
    }
    let envelope = if gamma > 1.0 + 1e-12 {
        if n < 2.0 * gamma - 1e-9 {
            (zn / z.re).powf(gamma - 1.0)
        } else {
            return Err(ParametrixError::CaseMismatch { n, gamma });
        }
    } else if (gamma - 1.0).abs() <= 1e-12 {
        if n > 2.0 + 1e-9 {
            (t_big / zn).powf(n - 2.0) + (zn / z.re).ln()
        } else if (n - 2.0).abs() <= 1e-9 {
            1.0 + (t_big / z.re).ln()
        } else {
            1.0 + (zn / z.re).ln()
        }
    } else {
        return Err(ParametrixError::CaseMismatch { n, gamma });
    };

    let z2 = z * z;
    let mut budget = Budget::new(4_000_000);
    let opts = QuadOpts {
        rel_tol: 1e-9,
        abs_tol: 0.0,
        max_width: 3.0 * t_big / 24.0,
        max_depth: 36,
    };
    let (val, _) = adaptive(
        &mut |r: f64| {
            let m = (z2 + r * r).norm();
            Complex64::new(r.powf(n - 1.0) * m.powf(-gamma), 0.0)
        },
        0.0,
        3.0 * t_big,
        &opts,
        &mut budget,
    )?;
    Ok((zn.powf(2.0 * gamma - n) * val.re, envelope))
}

//! Closed-form exponent calculators for the Strichartz inequality and the
//! global well-posedness of the semilinear wave equation.
//!
//! A couple (p,q) is admissible when (1/p, 1/q) lies in the triangle
//!
//!   { (1/p, 1/q) ∈ (0, 1/2] × (0, 1/2) : 1/p ≥ (d−1)/2 (1/2 − 1/q) }
//!     ∪ { (0, 1/2) },
//!
//! a full two-dimensional region (the Euclidean admissible set is just its
//! lower edge — large-scale dispersion in negative curvature buys the rest).
//! Sobolev embedding extends the Strichartz inequality from the triangle to
//! the square [0, 1/2] × (0, 1/2) ∪ {(0, 1/2)} at the cost of the regularity
//!
//!   σ(p,q) = (d+1)/2 (1/2 − 1/q) + max{0, (d−1)/2 (1/2 − 1/q) − 1/p}.
//!
//! For the semilinear problem with |F(u)| ≲ |u|^γ the relevant powers are
//! the conformal power γ_c = 1 + 4/(d−1), the Strauss number γ₀ (positive
//! root of (d−1)γ² − (d+1)γ − 2 = 0 — global existence holds here for every
//! γ ∈ (1, γ_c], so no Strauss phenomenon occurs), and
//!
//!   γ₁ = 1 + 3/d,   γ₂ = 1 + 2/((d−1)/2 + 2/(d−1)),
//!   γ₃ = 1 + 4/(d−2) for d ≤ 5,
//!   γ₃ = (d−1)/2 + 3/(d+1) − √(((d−3)/2 + 3/(d+1))² − 4(d−1)/(d+1)) for d ≥ 6.
//!
//! Global well-posedness in H^{σ,2} × H^{σ−1,2} holds provided σ clears the
//! piecewise threshold
//!
//!   σ > 0        on 1 < γ ≤ γ₁,
//!   σ ≥ σ₁(γ)    on γ₁ < γ ≤ γ₂,   σ₁ = (d+1)/4 − (d+1)(d+5)/(8d) · 1/(γ − (d+1)/(2d)),
//!   σ ≥ σ₂(γ)    on γ₂ ≤ γ ≤ γ_c,  σ₂ = (d+1)/4 − 1/(γ−1),
//!   σ ≥ σ₃(γ)    on γ_c ≤ γ ≤ γ₃,  σ₃ = d/2 − 2/(γ−1),
//!
//! the curves matching at the junctions: σ₁(γ₁) = 0, σ₁(γ₂) = σ₂(γ₂) =
//! 1/2 − 1/(d−1), σ₂(γ_c) = σ₃(γ_c) = 1/2.  Where two ranges overlap the
//! smaller threshold is returned.  Everything here is stateless arithmetic.

use thiserror::Error;

use crate::kernels::KernelQuery;
use crate::rootsys::{half_sum_rho, RootSystem};

#[derive(Debug, Error)]
pub enum StrichartzError {
    #[error("(1/p, 1/q) = ({inv_p}, {inv_q}) lies outside [0,1/2] × (0,1/2) ∪ {{(0,1/2)}}")]
    OutOfSquare { inv_p: f64, inv_q: f64 },
    #[error("γ = {gamma} outside the theorem range (1, {gamma_3}]")]
    GammaOutOfRange { gamma: f64, gamma_3: f64 },
    #[error("bad parameter for {what}: {why}")]
    BadParameter { what: &'static str, why: String },
}

/// The five powers of §5.2 for a given dimension.
#[derive(Clone, Copy, Debug)]
pub struct ExponentFamily {
    pub d: u32,
    /// conformal power 1 + 4/(d−1)
    pub gamma_c: f64,
    /// Strauss number: positive root of (d−1)γ² − (d+1)γ − 2 = 0
    pub gamma_0: f64,
    pub gamma_1: f64,
    pub gamma_2: f64,
    pub gamma_3: f64,
    /// d = 3 sits outside the §5 standing assumption d ≥ 4 (rank one only)
    pub low_dimension_warning: bool,
}

/// Which branch of the GWP case table produced the threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GwpCase {
    Subcritical,
    Sigma1,
    Sigma2,
    Sigma3,
}

impl GwpCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            GwpCase::Subcritical => "subcritical",
            GwpCase::Sigma1 => "sigma1",
            GwpCase::Sigma2 => "sigma2",
            GwpCase::Sigma3 => "sigma3",
        }
    }
}

/// Regularity threshold of the GWP theorem.  On the subcritical range the
/// constraint is the open "σ > 0": the returned 0 is an infimum, not an
/// attained minimum.
#[derive(Clone, Copy, Debug)]
pub struct GwpThreshold {
    pub sigma: f64,
    pub attained: bool,
    pub case: GwpCase,
}

/// Symbol descriptor for the Klein–Gordon shift: replace the wave dispersion
/// √(|λ|² + |ρ|²) by √(|λ|² + κ²).  κ ≥ |ρ| is the D̃ regime in which the
/// L^q Sobolev spaces are defined.
#[derive(Clone, Copy, Debug)]
pub struct KgShiftDescriptor {
    pub kappa: f64,
    pub rho_norm: f64,
    /// κ ≥ |ρ|
    pub sobolev_regime: bool,
}

impl KgShiftDescriptor {
    /// Rewire a kernel query's dispersion relation to this κ.
    pub fn apply_to(&self, query: &mut KernelQuery) {
        query.kg_kappa = Some(self.kappa);
    }
}

fn inverse(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        1.0 / x
    }
}

/// Membership of (1/p, 1/q) in the admissibility triangle, with the
/// displayed boundary semantics: 1/p ∈ (0, 1/2] closed at 1/2, 1/q ∈
/// (0, 1/2) open, the lower edge 1/p = (d−1)/2(1/2 − 1/q) included, plus
/// the isolated apex (0, 1/2).
pub fn is_admissible(d: u32, p: f64, q: f64) -> bool {
    if !(p > 0.0) || !(q > 0.0) || p.is_nan() || q.is_nan() {
        return false;
    }
    let ip = inverse(p);
    let iq = inverse(q);
    if ip == 0.0 && iq == 0.5 {
        return true; // the apex
    }
    ip > 0.0
        && ip <= 0.5
        && iq > 0.0
        && iq < 0.5
        && ip >= (d as f64 - 1.0) / 2.0 * (0.5 - iq)
}

/// Regularity threshold σ(p,q) of the extended (square) Strichartz corollary:
/// σ = (d+1)/2(1/2 − 1/q) + max{0, (d−1)/2(1/2 − 1/q) − 1/p} on
/// [0, 1/2] × (0, 1/2) ∪ {(0, 1/2)}.
pub fn sigma_pq(d: u32, p: f64, q: f64) -> Result<f64, StrichartzError> {
    let ip = inverse(p);
    let iq = inverse(q);
    let apex = ip == 0.0 && iq == 0.5;
    let in_square = (0.0..=0.5).contains(&ip) && iq > 0.0 && iq < 0.5;
    if !(apex || in_square) {
        return Err(StrichartzError::OutOfSquare { inv_p: ip, inv_q: iq });
    }
    let gap = 0.5 - iq;
    let df = d as f64;
    Ok((df + 1.0) / 2.0 * gap + ((df - 1.0) / 2.0 * gap - ip).max(0.0))
}

/// The exponent family γ_c, γ₀, γ₁, γ₂, γ₃ for dimension d ≥ 3.
pub fn exponent_family(d: u32) -> Result<ExponentFamily, StrichartzError> {
    if d < 3 {
        return Err(StrichartzError::BadParameter {
            what: "exponent family",
            why: format!("needs d ≥ 3, got {d}"),
        });
    }
    let df = d as f64;
    let gamma_c = 1.0 + 4.0 / (df - 1.0);
    let half_plus = 0.5 + 1.0 / (df - 1.0);
    let gamma_0 = half_plus + (half_plus * half_plus + 2.0 / (df - 1.0)).sqrt();
    let gamma_1 = 1.0 + 3.0 / df;
    let gamma_2 = 1.0 + 2.0 / ((df - 1.0) / 2.0 + 2.0 / (df - 1.0));
    let gamma_3 = if d <= 5 {
        1.0 + 4.0 / (df - 2.0)
    } else {
        let b = (df - 3.0) / 2.0 + 3.0 / (df + 1.0);
        (df - 1.0) / 2.0 + 3.0 / (df + 1.0)
            - (b * b - 4.0 * (df - 1.0) / (df + 1.0)).sqrt()
    };
    Ok(ExponentFamily {
        d,
        gamma_c,
        gamma_0,
        gamma_1,
        gamma_2,
        gamma_3,
        low_dimension_warning: d == 3,
    })
}

fn sigma_1(df: f64, g: f64) -> f64 {
    (df + 1.0) / 4.0 - (df + 1.0) * (df + 5.0) / (8.0 * df) / (g - (df + 1.0) / (2.0 * df))
}

fn sigma_2(df: f64, g: f64) -> f64 {
    (df + 1.0) / 4.0 - 1.0 / (g - 1.0)
}

fn sigma_3(df: f64, g: f64) -> f64 {
    df / 2.0 - 2.0 / (g - 1.0)
}

/// The piecewise GWP regularity threshold.  Every case range containing γ is
/// evaluated and the smallest value returned (the junction equalities make
/// overlaps unambiguous); ties prefer an attained (closed-inequality)
/// branch.
pub fn sigma_required(d: u32, gamma: f64) -> Result<GwpThreshold, StrichartzError> {
    let fam = exponent_family(d)?;
    if !gamma.is_finite() || gamma <= 1.0 || gamma > fam.gamma_3 {
        return Err(StrichartzError::GammaOutOfRange {
            gamma,
            gamma_3: fam.gamma_3,
        });
    }
    let df = d as f64;
    let mut candidates: Vec<GwpThreshold> = Vec::new();
    if gamma <= fam.gamma_1 {
        candidates.push(GwpThreshold {
            sigma: 0.0,
            attained: false,
            case: GwpCase::Subcritical,
        });
    }
    if gamma > fam.gamma_1 && gamma <= fam.gamma_2 {
        candidates.push(GwpThreshold {
            sigma: sigma_1(df, gamma),
            attained: true,
            case: GwpCase::Sigma1,
        });
    }
    if gamma >= fam.gamma_2 && gamma <= fam.gamma_c {
        candidates.push(GwpThreshold {
            sigma: sigma_2(df, gamma),
            attained: true,
            case: GwpCase::Sigma2,
        });
    }
    if gamma >= fam.gamma_c {
        candidates.push(GwpThreshold {
            sigma: sigma_3(df, gamma),
            attained: true,
            case: GwpCase::Sigma3,
        });
    }
    candidates
        .into_iter()
        .min_by(|a, b| {
            a.sigma
                .partial_cmp(&b.sigma)
                .unwrap()
                .then(b.attained.cmp(&a.attained))
        })
        .ok_or(StrichartzError::GammaOutOfRange {
            gamma,
            gamma_3: fam.gamma_3,
        })
}

/// Klein–Gordon spectral-shift descriptor for D = √(−Δ − |ρ|² + κ²).
pub fn kg_spectral_shift(
    rs: &RootSystem,
    kappa: f64,
) -> Result<KgShiftDescriptor, StrichartzError> {
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(StrichartzError::BadParameter {
            what: "Klein–Gordon shift",
            why: format!("requires κ > 0, got {kappa}"),
        });
    }
    let rho_norm = half_sum_rho(rs).norm();
    Ok(KgShiftDescriptor {
        kappa,
        rho_norm,
        sobolev_regime: kappa >= rho_norm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_break_prefers_attained_branch() {
        // d = 3 at γ = 2: subcritical (0, open) and σ₂ (0, closed) coincide
        let t = sigma_required(3, 2.0).unwrap();
        assert_eq!(t.sigma, 0.0);
        assert!(t.attained);
        assert_eq!(t.case, GwpCase::Sigma2);
    }

    #[test]
    fn square_accepts_closed_left_edge() {
        // 1/p = 0 (p = ∞) with 1/q interior is in the square but not the
        // triangle
        assert!(!is_admissible(4, f64::INFINITY, 4.0));
        assert!(sigma_pq(4, f64::INFINITY, 4.0).is_ok());
    }

    #[test]
    fn gamma_ordering_strict_above_three() {
        for d in 4..=30 {
            let f = exponent_family(d).unwrap();
            assert!(f.gamma_1 < f.gamma_2);
            assert!(f.gamma_2 < f.gamma_c);
            assert!(f.gamma_c < f.gamma_3, "d = {d}: γ_c ≥ γ₃");
        }
    }
}

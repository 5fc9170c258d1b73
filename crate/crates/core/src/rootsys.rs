//! Root-system catalog and elementary geometric quantities: roots with
//! multiplicities, the Weyl group, ρ, the Cartan density δ, and the two
//! dimensions d (manifold) and D (dimension at infinity).
//!
//! Catalog normalization: A-series roots have unit length; B2 uses short
//! length 1 / long length √2, G2 short 1 / long √3. All downstream formulas
//! evaluate explicit inner products, so any fixed normalization is consistent;
//! this one is chosen for reproducibility of the extracted constants.

use crate::geom::{SquareMat, Vector};
use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RootSysError {
    #[error("unknown catalog label `{label}` (expected A1, BC1, A2, A3, B2 or G2)")]
    UnknownCatalog { label: String },
    #[error("multiplicity of root #{index} must be ≥ 1 (got {got})")]
    BadMultiplicity { index: usize, got: u32 },
    #[error("catalog {catalog:?} has {expected} positive roots, got {got} multiplicities")]
    WrongMultiplicityCount {
        catalog: Catalog,
        expected: usize,
        got: usize,
    },
    #[error("preset `{preset}` needs a reduced root system; {catalog:?} has a non-reduced root — pass explicit multiplicities")]
    PresetUnsupported { catalog: Catalog, preset: &'static str },
    #[error("real-hyperbolic preset needs d ≥ 2 (got d = {d}) and applies to A1 only")]
    BadHyperbolicDimension { d: u32 },
    #[error("Weyl closure exceeded the safety cap of {cap} elements (malformed root system?)")]
    WeylCapExceeded { cap: usize },
    #[error("H lies outside the closed positive chamber: ⟨α, H⟩ = {value:.3e} < 0 for root #{index}")]
    OutsideChamber { index: usize, value: f64 },
}

/// Catalog identifiers. BC1 is the only non-reduced entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Catalog {
    A1,
    Bc1,
    A2,
    A3,
    B2,
    G2,
}

impl FromStr for Catalog {
    type Err = RootSysError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A1" => Ok(Catalog::A1),
            "BC1" => Ok(Catalog::Bc1),
            "A2" => Ok(Catalog::A2),
            "A3" => Ok(Catalog::A3),
            "B2" => Ok(Catalog::B2),
            "G2" => Ok(Catalog::G2),
            other => Err(RootSysError::UnknownCatalog {
                label: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for Catalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Catalog::A1 => "A1",
            Catalog::Bc1 => "BC1",
            Catalog::A2 => "A2",
            Catalog::A3 => "A3",
            Catalog::B2 => "B2",
            Catalog::G2 => "G2",
        };
        f.write_str(s)
    }
}

/// Multiplicity assignment: the paper's three named regimes plus explicit lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Multiplicities {
    /// A1 with m = d − 1: the real hyperbolic space H^d.
    RealHyperbolic { d: u32 },
    /// All (reduced) roots carry m = 2: G complex.
    Complex,
    /// All roots carry m = 1: normal real form.
    Normal,
    /// One multiplicity per positive root, in catalog order.
    Explicit(Vec<u32>),
}

/// A positive root with its multiplicity.
#[derive(Clone, Debug)]
pub struct Root {
    pub vector: Vector,
    pub mult: u32,
    /// true iff α/2 is not a root (i.e. α is *indivisible*); the BC1 root 2α is
    /// the only catalog entry with `is_reduced == false`.
    pub is_reduced: bool,
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    pub rank: usize,
    pub positive_roots: Vec<Root>,
    pub simple_indices: Vec<usize>,
    pub label: String,
    pub catalog: Catalog,
}

#[derive(Clone, Debug)]
pub struct WeylGroup {
    /// Orthogonal ℓ×ℓ matrices; element 0 is the identity.
    pub elements: Vec<SquareMat>,
    /// Indices (into `elements`) of the ℓ simple reflections.
    pub generators: Vec<usize>,
}

/// Positive-root geometry for each catalog entry, as (simple roots, all positive
/// roots in simple-root coordinates). Simple roots come first in the root list.
fn catalog_geometry(catalog: Catalog) -> (Vec<Vector>, Vec<Vec<i32>>) {
    match catalog {
        Catalog::A1 => (vec![Vector::new(vec![1.0])], vec![vec![1]]),
        Catalog::Bc1 => (vec![Vector::new(vec![1.0])], vec![vec![1], vec![2]]),
        Catalog::A2 => {
            let s = vec![
                Vector::new(vec![1.0, 0.0]),
                Vector::new(vec![-0.5, 3f64.sqrt() / 2.0]),
            ];
            (s, vec![vec![1, 0], vec![0, 1], vec![1, 1]])
        }
        Catalog::A3 => {
            // Gram–Schmidt realization of the A3 Cartan matrix with unit roots:
            // ⟨α_i,α_i⟩ = 1, ⟨α_1,α_2⟩ = ⟨α_2,α_3⟩ = −1/2, ⟨α_1,α_3⟩ = 0.
            let s = vec![
                Vector::new(vec![1.0, 0.0, 0.0]),
                Vector::new(vec![-0.5, 3f64.sqrt() / 2.0, 0.0]),
                Vector::new(vec![0.0, -1.0 / 3f64.sqrt(), (2f64 / 3.0).sqrt()]),
            ];
            (
                s,
                vec![
                    vec![1, 0, 0],
                    vec![0, 1, 0],
                    vec![0, 0, 1],
                    vec![1, 1, 0],
                    vec![0, 1, 1],
                    vec![1, 1, 1],
                ],
            )
        }
        Catalog::B2 => {
            // α₁ = e₁ − e₂ (long, |·|² = 2), α₂ = e₂ (short, |·|² = 1).
            let s = vec![
                Vector::new(vec![1.0, -1.0]),
                Vector::new(vec![0.0, 1.0]),
            ];
            (
                s,
                vec![vec![1, 0], vec![0, 1], vec![1, 1], vec![1, 2]],
            )
        }
        Catalog::G2 => {
            // α₁ short (|·|² = 1), α₂ long (|·|² = 3), angle 150°.
            let s = vec![
                Vector::new(vec![1.0, 0.0]),
                Vector::new(vec![-1.5, 3f64.sqrt() / 2.0]),
            ];
            (
                s,
                vec![
                    vec![1, 0],
                    vec![0, 1],
                    vec![1, 1],
                    vec![2, 1],
                    vec![3, 1],
                    vec![3, 2],
                ],
            )
        }
    }
}

/// Instantiate a catalog root system with the given multiplicity assignment.
pub fn build_root_system(
    catalog: Catalog,
    multiplicities: Multiplicities,
) -> Result<RootSystem, RootSysError> {
    let (simples, coeff_list) = catalog_geometry(catalog);
    let n_roots = coeff_list.len();
    let non_reduced_present = matches!(catalog, Catalog::Bc1);

    let (mults, label): (Vec<u32>, String) = match &multiplicities {
        Multiplicities::RealHyperbolic { d } => {
            if catalog != Catalog::A1 || *d < 2 {
                return Err(RootSysError::BadHyperbolicDimension { d: *d });
            }
            (vec![d - 1], format!("A1 real-hyperbolic H^{d}"))
        }
        Multiplicities::Complex => {
            if non_reduced_present {
                return Err(RootSysError::PresetUnsupported {
                    catalog,
                    preset: "complex",
                });
            }
            (vec![2; n_roots], format!("{catalog} complex"))
        }
        Multiplicities::Normal => {
            if non_reduced_present {
                return Err(RootSysError::PresetUnsupported {
                    catalog,
                    preset: "normal real form",
                });
            }
            (vec![1; n_roots], format!("{catalog} normal real form"))
        }
        Multiplicities::Explicit(ms) => {
            if ms.len() != n_roots {
                return Err(RootSysError::WrongMultiplicityCount {
                    catalog,
                    expected: n_roots,
                    got: ms.len(),
                });
            }
            (ms.clone(), format!("{catalog} m={ms:?}"))
        }
    };
    for (i, &m) in mults.iter().enumerate() {
        if m == 0 {
            return Err(RootSysError::BadMultiplicity { index: i, got: m });
        }
    }

    let rank = simples.len();
    let mut positive_roots = Vec::with_capacity(n_roots);
    for (coeffs, &m) in coeff_list.iter().zip(&mults) {
        let mut v = Vector::zeros(rank);
        for (k, &c) in coeffs.iter().enumerate() {
            v = v.axpy(c as f64, &simples[k]);
        }
        // BC1: [2] is 2·α₁, the non-reduced root.
        let is_reduced = !(catalog == Catalog::Bc1 && coeffs == &vec![2]);
        positive_roots.push(Root {
            vector: v,
            mult: m,
            is_reduced,
        });
    }

    Ok(RootSystem {
        rank,
        positive_roots,
        simple_indices: (0..rank).collect(),
        label,
        catalog,
    })
}

impl RootSystem {
    pub fn simple_roots(&self) -> Vec<&Vector> {
        self.simple_indices
            .iter()
            .map(|&i| &self.positive_roots[i].vector)
            .collect()
    }

    /// Reduced positive roots (Σ_r⁺).
    pub fn reduced_positive_roots(&self) -> Vec<&Root> {
        self.positive_roots.iter().filter(|r| r.is_reduced).collect()
    }

    /// Multiplicity of 2α if 2α is a listed root, else 0.
    pub fn double_mult(&self, alpha: &Vector) -> u32 {
        let target = alpha.scale(2.0);
        self.positive_roots
            .iter()
            .find(|r| r.vector.sub(&target).norm() < 1e-10)
            .map(|r| r.mult)
            .unwrap_or(0)
    }

    /// Coordinates of v in the simple-root basis (solves the ℓ×ℓ system).
    pub fn simple_coordinates(&self, v: &Vector) -> Vec<f64> {
        let simples = self.simple_roots();
        let cols: Vec<Vec<f64>> = (0..self.rank)
            .map(|i| (0..self.rank).map(|j| simples[j].coords[i]).collect())
            .collect();
        let m = SquareMat::from_rows(&cols);
        crate::geom::solve(&m, v)
            .expect("simple roots are linearly independent")
            .coords
    }

    /// A fixed interior direction of the positive chamber (normalized ρ of the
    /// all-multiplicities-one system; any interior point works).
    pub fn chamber_interior_direction(&self) -> Vector {
        let mut v = Vector::zeros(self.rank);
        for r in &self.positive_roots {
            v = v.add(&r.vector);
        }
        // Dual-basis correction: Σα is interior for the catalog systems,
        // but guard against near-wall degeneracy anyway.
        let min_pairing = self
            .simple_roots()
            .iter()
            .map(|a| a.dot(&v))
            .fold(f64::INFINITY, f64::min);
        assert!(min_pairing > 0.0, "Σα must lie in the open chamber");
        v.normalized()
    }

    /// Test hook: permute the positive-root list (keeping simple_indices valid).
    pub fn permute_roots_for_test(&mut self, perm: &[usize]) {
        assert_eq!(perm.len(), self.positive_roots.len());
        let old = self.positive_roots.clone();
        for (new_pos, &old_pos) in perm.iter().enumerate() {
            self.positive_roots[new_pos] = old[old_pos].clone();
        }
        self.simple_indices = self
            .simple_indices
            .iter()
            .map(|&si| perm.iter().position(|&p| p == si).unwrap())
            .collect();
    }
}

/// d = ℓ + Σ m_α (manifold dimension) and D = ℓ + 2|Σ_r⁺| (dimension at infinity).
pub fn dims(rs: &RootSystem) -> (u32, u32) {
    let ell = rs.rank as u32;
    let d = ell + rs.positive_roots.iter().map(|r| r.mult).sum::<u32>();
    let big_d = ell + 2 * rs.positive_roots.iter().filter(|r| r.is_reduced).count() as u32;
    (d, big_d)
}

/// ρ = ½ Σ_{α∈Σ⁺} m_α α.
pub fn half_sum_rho(rs: &RootSystem) -> Vector {
    let mut rho = Vector::zeros(rs.rank);
    for r in &rs.positive_roots {
        rho = rho.axpy(r.mult as f64 / 2.0, &r.vector);
    }
    rho
}

/// Cartan density δ(x⁺) = ∏_{α∈Σ⁺} (sinh ⟨α, x⁺⟩)^{m_α} on the closed chamber.
pub fn cartan_density(rs: &RootSystem, h: &Vector) -> Result<f64, RootSysError> {
    let mut prod = 1.0f64;
    for (i, r) in rs.positive_roots.iter().enumerate() {
        let a = r.vector.dot(h);
        if a < -1e-12 {
            return Err(RootSysError::OutsideChamber { index: i, value: a });
        }
        prod *= a.max(0.0).sinh().powi(r.mult as i32);
    }
    Ok(prod)
}

const WEYL_CAP: usize = 10_000;

/// Breadth-first closure of the simple reflections, deduplicated by a hash on
/// matrix entries rounded to 12 decimal digits.
pub fn weyl_group(rs: &RootSystem) -> Result<WeylGroup, RootSysError> {
    let gens: Vec<SquareMat> = rs
        .simple_roots()
        .iter()
        .map(|a| SquareMat::reflection(a))
        .collect();

    let mut elements = vec![SquareMat::identity(rs.rank)];
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    seen.insert(elements[0].rounded_key());

    let mut frontier = 0usize;
    while frontier < elements.len() {
        let current = elements[frontier].clone();
        for g in &gens {
            let next = g.mul(&current);
            if seen.insert(next.rounded_key()) {
                elements.push(next);
                if elements.len() > WEYL_CAP {
                    return Err(RootSysError::WeylCapExceeded { cap: WEYL_CAP });
                }
            }
        }
        frontier += 1;
    }

    // locate the generators in the element list (they were inserted early)
    let generators = gens
        .iter()
        .map(|g| {
            let key = g.rounded_key();
            elements
                .iter()
                .position(|e| e.rounded_key() == key)
                .expect("generator must appear in its own closure")
        })
        .collect();

    Ok(WeylGroup {
        elements,
        generators,
    })
}

impl WeylGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// det(w) — ±1 for orthogonal elements.
    pub fn det(&self, idx: usize) -> f64 {
        self.elements[idx].det()
    }
}

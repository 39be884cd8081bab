//! The flat torus `R^{4n}/Z^{4n}`: rational subtori, their Poincaré duals,
//! couplings against constant forms, and the torus-level checks built on
//! the linear algebra modules.

pub mod lattice;
mod scan;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior_algebra::{exterior_basis, integrate_over_torus, restrict, Blade, Multivector};
use crate::linalg::Matrix;
use crate::quaternion_space::{kaehler_form, Generator, InducedComplexStructure, QuaternionicSpace};
use crate::scalar::{rat, ComplexField, Field, GaussRat, Rational, Real};
use crate::su2_action::is_su2_invariant;
use crate::wirtinger::{is_trianalytic_subspace, LinearSubspace};

pub use scan::{genericity_scan, invariant_degree_profile, DegreeProfileEntry, ScanReport, SCAN_GUARD};

/// Cohomology is modelled by constant forms, `H^p(T) = Λ^p(R^{4n})*`.
#[derive(Clone, Debug)]
pub struct FlatTorus {
    space: QuaternionicSpace,
}

impl FlatTorus {
    pub fn new(space: QuaternionicSpace) -> Self {
        FlatTorus { space }
    }

    pub fn space(&self) -> &QuaternionicSpace {
        &self.space
    }

    pub fn dim_r(&self) -> usize {
        self.space.dim_r()
    }
}

/// A closed subtorus, given by a primitive basis of its lattice. The basis
/// order fixes the orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subtorus {
    dim_r: usize,
    basis: Vec<Vec<i64>>,
    covolume_sq: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubtorusJson {
    pub dim_r: usize,
    pub basis: Vec<Vec<i64>>,
}

impl Subtorus {
    /// Validate a primitive lattice basis.
    pub fn new(dim_r: usize, basis: Vec<Vec<i64>>) -> Result<Self> {
        if let Some(v) = basis.iter().find(|v| v.len() != dim_r) {
            return Err(Error::DimensionMismatch { left: v.len(), right: dim_r });
        }
        match lattice::sublattice_index(&basis, dim_r)? {
            None => {
                let rank =
                    Matrix::from_rows(basis.iter().map(|v| v.iter().map(|&x| rat(x, 1)).collect()).collect()).rank();
                Err(Error::DegenerateBasis { rank, expected: basis.len() })
            }
            Some(index) if index != 1.into() => {
                Err(Error::NotPrimitive(format!("basis spans a sublattice of index {index} in its saturation")))
            }
            Some(_) => {
                let b = Matrix::from_rows(basis.iter().map(|v| v.iter().map(|&x| rat(x, 1)).collect()).collect());
                let covolume_sq =
                    if basis.is_empty() { Rational::from_i64(1) } else { b.mul(&b.transpose()).determinant() };
                Ok(Subtorus { dim_r, basis, covolume_sq })
            }
        }
    }

    /// The subtorus whose tangent space is spanned by `vectors`.
    pub fn from_span(dim_r: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        let sat = lattice::saturate(vectors, dim_r)?;
        Subtorus::new(dim_r, sat)
    }

    pub fn coordinate(dim_r: usize, indices: &[usize]) -> Result<Self> {
        let basis = indices
            .iter()
            .map(|&i| {
                if i >= dim_r {
                    return Err(Error::DimensionMismatch { left: i + 1, right: dim_r });
                }
                Ok((0..dim_r).map(|j| i64::from(j == i)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Subtorus::new(dim_r, basis)
    }

    /// The whole torus.
    pub fn full(dim_r: usize) -> Self {
        Subtorus::coordinate(dim_r, &(0..dim_r).collect::<Vec<_>>()).expect("standard basis is primitive")
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    /// Squared covolume of the lattice in the tangent space.
    pub fn covolume_squared(&self) -> &Rational {
        &self.covolume_sq
    }

    pub fn tangent<R: Real>(&self) -> Result<LinearSubspace<R>> {
        LinearSubspace::new(
            self.dim_r,
            self.basis.iter().map(|v| v.iter().map(|&x| R::from_i64(x)).collect()).collect(),
        )
    }

    pub fn to_json(&self) -> SubtorusJson {
        SubtorusJson { dim_r: self.dim_r, basis: self.basis.clone() }
    }

    pub fn from_json(json: &SubtorusJson) -> Result<Self> {
        Subtorus::new(json.dim_r, json.basis.clone())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("subtorus serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: SubtorusJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Subtorus::from_json(&json)
    }
}

fn check_torus(torus: &FlatTorus, n: &Subtorus) -> Result<()> {
    if n.dim_r() != torus.dim_r() {
        return Err(Error::DimensionMismatch { left: n.dim_r(), right: torus.dim_r() });
    }
    Ok(())
}

/// `⟨N⟩ ∈ Λ^{d-k}` with `∫_T ⟨N⟩ ∧ β = coupling(N, β)` for all `β ∈ Λ^k`.
///
/// On the blade basis the pairing matches `e^{J^c}` with `e^J` up to the
/// sign of `e^{J^c} ∧ e^J`, so the system is solved coefficientwise.
pub fn poincare_dual<C: ComplexField<Re = Rational>>(torus: &FlatTorus, n: &Subtorus) -> Result<Multivector<C>> {
    check_torus(torus, n)?;
    let d = torus.dim_r();
    let k = n.dim();
    let mut terms = Vec::new();
    for &blade in exterior_basis(d).blades(k) {
        let value: C = coupling(torus, n, &Multivector::from_terms(d, [(blade, C::one())]))?;
        if value.is_zero() {
            continue;
        }
        let complement = blade.complement(d);
        let (negative, _) = complement.wedge(blade).expect("complementary blades");
        terms.push((complement, if negative { value.neg() } else { value }));
    }
    Ok(Multivector::from_terms(d, terms))
}

/// `∫_N α|_N`: the value of `α` on the oriented lattice basis of `N`.
///
/// This is the covolume times the top coefficient in an orthonormal frame of
/// the tangent space, computed without square roots.
pub fn coupling<C: ComplexField<Re = Rational>>(torus: &FlatTorus, n: &Subtorus, alpha: &Multivector<C>) -> Result<C> {
    check_torus(torus, n)?;
    if alpha.is_zero() {
        return Ok(C::zero());
    }
    let k = alpha.degree_or(0)?;
    if k != n.dim() {
        return Err(Error::DegreeMismatch(format!(
            "form of degree {k} paired with a {}-dimensional subtorus",
            n.dim()
        )));
    }
    if k == 0 {
        return Ok(alpha.coefficient(Blade::EMPTY));
    }
    Ok(restrict(alpha, &n.tangent()?)?.top_coefficient())
}

/// `∫_T ⟨N⟩ ∧ α`, the other side of Poincaré duality.
pub fn dual_pairing<C: ComplexField<Re = Rational>>(
    torus: &FlatTorus,
    n: &Subtorus,
    alpha: &Multivector<C>,
) -> Result<C> {
    let dual: Multivector<C> = poincare_dual(torus, n)?;
    integrate_over_torus(torus.space(), &dual.wedge(alpha)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MainIdentityReport {
    pub dual_invariant: bool,
    pub trianalytic: bool,
    /// `dual_invariant ⟹ trianalytic`.
    pub implication_holds: bool,
    /// `trianalytic ⟹ dual_invariant`, which holds on flat tori.
    pub converse_holds: bool,
}

/// Invariance of the dual class and tri-analyticity of the tangent space,
/// computed independently.
pub fn check_trianalyticity(torus: &FlatTorus, n: &Subtorus) -> Result<MainIdentityReport> {
    let dual: Multivector<GaussRat> = poincare_dual(torus, n)?;
    let dual_invariant = is_su2_invariant(&torus.space().su2(), &dual)?;
    let trianalytic = is_trianalytic_subspace::<Rational>(torus.space(), &n.tangent()?)?;
    Ok(MainIdentityReport {
        dual_invariant,
        trianalytic,
        implication_holds: !dual_invariant || trianalytic,
        converse_holds: !trianalytic || dual_invariant,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CouplingComparison {
    /// Whether `⟨N⟩` is `su(2)`-invariant.
    pub hypothesis_holds: bool,
    pub lhs: Rational,
    pub rhs: Rational,
    pub equal: bool,
}

/// Compare `⟨N, ω_{L1}^k⟩` with `⟨N, ω_{L2}^k⟩`, `2k = dim N`.
pub fn compare_couplings(
    torus: &FlatTorus,
    n: &Subtorus,
    l1: &InducedComplexStructure<Rational>,
    l2: &InducedComplexStructure<Rational>,
) -> Result<CouplingComparison> {
    if n.dim() % 2 == 1 {
        return Err(Error::OddDimension(n.dim()));
    }
    let dual: Multivector<GaussRat> = poincare_dual(torus, n)?;
    let hypothesis_holds = is_su2_invariant(&torus.space().su2(), &dual)?;
    let side = |l: &InducedComplexStructure<Rational>| -> Result<Rational> {
        let w: Multivector<GaussRat> = kaehler_form(torus.space(), l);
        Ok(coupling(torus, n, &w.wedge_power(n.dim() / 2))?.re)
    };
    let (lhs, rhs) = (side(l1)?, side(l2)?);
    Ok(CouplingComparison { hypothesis_holds, equal: lhs == rhs, lhs, rhs })
}

/// All coordinate subtori of the given dimensions, in lexicographic order.
pub fn coordinate_subtori(dim_r: usize, dims: &[usize]) -> Result<Vec<Subtorus>> {
    let basis = exterior_basis(dim_r);
    let mut out = Vec::new();
    for &k in dims {
        if k > dim_r {
            return Err(Error::DegreeOverflow { requested: k, max: dim_r });
        }
        for blade in basis.blades(k) {
            out.push(Subtorus::coordinate(dim_r, &blade.indices())?);
        }
    }
    Ok(out)
}

fn random_vector(rng: &mut ChaCha8Rng, dim_r: usize, bound: i64) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..dim_r).map(|_| rng.random_range(-bound..=bound)).collect();
        if v.iter().any(|&x| x != 0) {
            return v;
        }
    }
}

fn apply_generator(space: &QuaternionicSpace, g: Generator, v: &[i64]) -> Vec<i64> {
    let m = space.generator_matrix(g);
    (0..v.len())
        .map(|i| {
            let q =
                (0..v.len()).fold(Rational::from_i64(0), |acc, j| acc.add(&m[(i, j)].mul(&Rational::from_i64(v[j]))));
            q.to_integer().try_into().expect("generator matrices are signed permutations")
        })
        .collect()
}

/// Seeded primitive subtori with coordinates in `[-bound, bound]`.
///
/// The population cycles through quaternionic spans `H·v`, `I`-complex
/// spans `{v, Iv}` and spans of random vectors of even dimension.
pub fn random_subtori(space: &QuaternionicSpace, seed: u64, count: usize, bound: i64) -> Result<Vec<Subtorus>> {
    if bound < 1 {
        return Err(Error::Precondition("coordinate bound must be positive".into()));
    }
    let d = space.dim_r();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let seeds: Vec<Vec<i64>> = match out.len() % 3 {
            0 => {
                let lines = rng.random_range(1..=space.n().max(1));
                (0..lines).map(|_| random_vector(&mut rng, d, bound)).collect()
            }
            1 => vec![random_vector(&mut rng, d, bound)],
            _ => {
                let k = 2 * rng.random_range(1..=d / 2);
                (0..k).map(|_| random_vector(&mut rng, d, bound)).collect()
            }
        };
        let vectors: Vec<Vec<i64>> = match out.len() % 3 {
            0 => seeds
                .iter()
                .flat_map(|v| {
                    let mut span = vec![v.clone()];
                    span.extend(Generator::ALL.iter().map(|&g| apply_generator(space, g, v)));
                    span
                })
                .collect(),
            1 => vec![seeds[0].clone(), apply_generator(space, Generator::I, &seeds[0])],
            _ => seeds,
        };
        let rank = Matrix::from_rows(vectors.iter().map(|v| v.iter().map(|&x| rat(x, 1)).collect()).collect()).rank();
        if rank == 0 || rank % 2 == 1 {
            continue;
        }
        out.push(Subtorus::from_span(d, &vectors)?);
    }
    Ok(out)
}

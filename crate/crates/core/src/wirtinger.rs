//! Real subspaces of a quaternionic space and the Wirtinger test for
//! complex subspaces.
//!
//! For an even-dimensional subspace `W` with basis `b_1, .., b_2k`,
//! `η_L(W)² = Pf(A)² / det(G)` where `A_ij = ω_L(b_i, b_j)` and `G` is the
//! Gram matrix. This is basis independent, bounded by 1, and equals 1
//! exactly when `L(W) = W`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quaternion_space::{Generator, InducedComplexStructure, QuaternionicSpace};
use crate::scalar::{ComplexField, Field, Real, FLOAT_ZERO_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSubspace<R> {
    ambient_dim: usize,
    basis: Vec<Vec<R>>,
}

impl<R: Real> LinearSubspace<R> {
    /// A subspace from linearly independent basis vectors.
    pub fn new(ambient_dim: usize, basis: Vec<Vec<R>>) -> Result<Self> {
        if let Some(bad) = basis.iter().find(|v| v.len() != ambient_dim) {
            return Err(Error::DimensionMismatch { left: bad.len(), right: ambient_dim });
        }
        if !basis.is_empty() {
            let rank = Matrix::from_rows(basis.clone()).rank();
            if rank < basis.len() {
                return Err(Error::DegenerateBasis { rank, expected: basis.len() });
            }
        }
        Ok(LinearSubspace { ambient_dim, basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<R>] {
        &self.basis
    }

    pub fn contains(&self, v: &[R]) -> bool {
        if self.basis.is_empty() {
            return v.iter().all(Field::is_zero);
        }
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        Matrix::from_rows(rows).rank() == self.dim()
    }

    pub fn same_span(&self, other: &Self) -> bool {
        self.dim() == other.dim() && other.basis.iter().all(|v| self.contains(v))
    }

    pub fn gram(&self) -> Matrix<R> {
        let n = self.dim();
        let mut g = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] = dot(&self.basis[i], &self.basis[j]);
            }
        }
        g
    }

    /// `A_ij = ω_L(b_i, b_j) = g(L b_i, b_j)`.
    pub fn kaehler_matrix(&self, l: &InducedComplexStructure<R>) -> Matrix<R> {
        let n = self.dim();
        let images: Vec<Vec<R>> = self.basis.iter().map(|b| l.apply(b)).collect();
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = dot(&images[i], &self.basis[j]);
            }
        }
        a
    }

    pub fn to_json(&self) -> SubspaceJson {
        SubspaceJson {
            dim_r: self.ambient_dim,
            basis: self.basis.iter().map(|v| v.iter().map(Real::to_string_repr).collect()).collect(),
        }
    }

    pub fn from_json(json: &SubspaceJson) -> Result<Self> {
        let basis = json
            .basis
            .iter()
            .map(|v| v.iter().map(|s| R::parse_repr(s)).collect::<Result<Vec<R>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.dim_r, basis)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceJson {
    pub dim_r: usize,
    pub basis: Vec<Vec<String>>,
}

fn dot<R: Real>(u: &[R], v: &[R]) -> R {
    let mut acc = R::zero();
    for (a, b) in u.iter().zip(v) {
        if !a.is_zero() && !b.is_zero() {
            acc.add_assign(&a.mul(b));
        }
    }
    acc
}

/// Pfaffian of a skew-symmetric matrix; zero for odd size. Uses cofactor
/// expansion up to size 8 and skew elimination above.
pub fn pfaffian<T: Field>(m: &Matrix<T>) -> T {
    if m.rows() <= 8 {
        pfaffian_expansion(m)
    } else {
        pfaffian_elimination(m)
    }
}

/// `Pf(A) = Σ_{j≥1} (-1)^{j-1} a_{0j} Pf(A without rows/cols 0, j)`.
pub fn pfaffian_expansion<T: Field>(m: &Matrix<T>) -> T {
    assert_eq!(m.rows(), m.cols());
    let idx: Vec<usize> = (0..m.rows()).collect();
    fn rec<T: Field>(m: &Matrix<T>, idx: &[usize]) -> T {
        match idx.len() {
            0 => return T::one(),
            n if n % 2 == 1 => return T::zero(),
            _ => {}
        }
        let first = idx[0];
        let mut acc = T::zero();
        for (pos, &j) in idx.iter().enumerate().skip(1) {
            let a = &m[(first, j)];
            if a.is_zero() {
                continue;
            }
            let rest: Vec<usize> = idx[1..].iter().copied().filter(|&x| x != j).collect();
            let term = a.mul(&rec(m, &rest));
            if pos % 2 == 1 {
                acc.add_assign(&term);
            } else {
                acc.sub_assign(&term);
            }
        }
        acc
    }
    rec(m, &idx)
}

/// Pfaffian by repeated Schur complement on a nonzero `2×2` pivot block.
pub fn pfaffian_elimination<T: Field>(m: &Matrix<T>) -> T {
    assert_eq!(m.rows(), m.cols());
    let n = m.rows();
    if n % 2 == 1 {
        return T::zero();
    }
    let mut a = m.clone();
    let mut result = T::one();
    let mut size = n;
    while size > 0 {
        // pivot in row 0
        let mut best = None;
        let mut best_score = 0.0;
        for j in 1..size {
            let s = a[(0, j)].pivot_score();
            if !a[(0, j)].is_zero() && s > best_score {
                best = Some(j);
                best_score = s;
                if T::EXACT {
                    break;
                }
            }
        }
        let Some(p) = best else { return T::zero() };
        if p != 1 {
            a = swap_symmetric(&a, 1, p);
            result = result.neg();
        }
        let pivot = a[(0, 1)].clone();
        result = result.mul(&pivot);
        let mut next = Matrix::zeros(size - 2, size - 2);
        for i in 2..size {
            for k in 2..size {
                let corr = a[(1, i)].mul(&a[(0, k)]).sub(&a[(0, i)].mul(&a[(1, k)])).div(&pivot);
                next[(i - 2, k - 2)] = a[(i, k)].add(&corr);
            }
        }
        a = next;
        size -= 2;
    }
    result
}

fn swap_symmetric<T: Field>(a: &Matrix<T>, i: usize, j: usize) -> Matrix<T> {
    let n = a.rows();
    let perm = |x: usize| {
        if x == i {
            j
        } else if x == j {
            i
        } else {
            x
        }
    };
    let mut out = Matrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(r, c)] = a[(perm(r), perm(c))].clone();
        }
    }
    out
}

fn check_subspace<R: Real>(space: &QuaternionicSpace, w: &LinearSubspace<R>) -> Result<()> {
    if w.ambient_dim() != space.dim_r() {
        return Err(Error::DimensionMismatch { left: w.ambient_dim(), right: space.dim_r() });
    }
    Ok(())
}

/// `η_L(W)² = Pf(A)² / det G`.
pub fn eta_squared<R: Real>(
    space: &QuaternionicSpace,
    w: &LinearSubspace<R>,
    l: &InducedComplexStructure<R>,
) -> Result<R> {
    check_subspace(space, w)?;
    if w.dim() % 2 == 1 {
        return Err(Error::OddDimension(w.dim()));
    }
    let pf = pfaffian(&w.kaehler_matrix(l));
    Ok(pf.mul(&pf).div(&w.gram().determinant()))
}

/// `L(W) ⊆ W`. For even `dim W` the membership test is cross-checked
/// against the saturation `η² = 1`.
pub fn is_complex_subspace<R: Real>(
    space: &QuaternionicSpace,
    w: &LinearSubspace<R>,
    l: &InducedComplexStructure<R>,
) -> Result<bool> {
    check_subspace(space, w)?;
    let closed = w.basis().iter().all(|b| w.contains(&l.apply(b)));
    if w.dim().is_multiple_of(2) {
        let saturated = eta_squared(space, w, l)?.approx_eq(&R::one(), FLOAT_ZERO_TOL);
        if saturated != closed {
            return Err(Error::Disagreement(format!("membership test says complex = {closed}, η² = 1 is {saturated}")));
        }
    }
    Ok(closed)
}

/// Complex for `I`, `J` and `K`.
pub fn is_trianalytic_subspace<R: Real>(space: &QuaternionicSpace, w: &LinearSubspace<R>) -> Result<bool> {
    for g in Generator::ALL {
        if !is_complex_subspace(space, w, &space.structure(g))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `W` is `I`-complex and the restriction of `Ω = ω_J + i ω_K` to it is
/// nondegenerate, i.e. has complex rank `dim_C W = dim_R W / 2`.
pub fn is_nondegenerately_symplectic_subspace<R: Real>(
    space: &QuaternionicSpace,
    w: &LinearSubspace<R>,
) -> Result<bool> {
    check_subspace(space, w)?;
    if w.dim() % 2 == 1 {
        return Err(Error::OddDimension(w.dim()));
    }
    if !is_complex_subspace(space, w, &space.structure(Generator::I))? {
        return Ok(false);
    }
    let aj = w.kaehler_matrix(&space.structure(Generator::J));
    let ak = w.kaehler_matrix(&space.structure(Generator::K));
    let n = w.dim();
    let rows: Vec<Vec<R::Complex>> = (0..n)
        .map(|i| (0..n).map(|j| R::Complex::from_parts(aj[(i, j)].clone(), ak[(i, j)].clone())).collect())
        .collect();
    if n == 0 {
        return Ok(true);
    }
    Ok(Matrix::from_rows(rows).rank() == n / 2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct WirtingerReport<R> {
    pub eta_squared: R,
    pub complex: bool,
    /// `η² = 1` exactly when `W` is complex (tolerance in float mode).
    pub consistent: bool,
    pub within_bound: bool,
}

/// Evaluate `η²` and the direct complexity test and cross-check them.
pub fn wirtinger_report<R: Real>(
    space: &QuaternionicSpace,
    w: &LinearSubspace<R>,
    l: &InducedComplexStructure<R>,
) -> Result<WirtingerReport<R>> {
    let eta = eta_squared(space, w, l)?;
    let complex = is_complex_subspace(space, w, l)?;
    let saturated = eta.approx_eq(&R::one(), FLOAT_ZERO_TOL);
    let within_bound = eta <= R::one() || saturated;
    Ok(WirtingerReport { eta_squared: eta, complex, consistent: saturated == complex, within_bound })
}

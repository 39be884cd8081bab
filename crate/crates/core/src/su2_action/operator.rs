//! Homogeneous linear operators on `Λ^*`, stored block by block.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exterior_algebra::{exterior_basis, Blade, Multivector};
use crate::linalg::{Matrix, SparseMatrix, SparseVec};
use crate::scalar::{ComplexField, Real};

/// A real linear map `Λ^* → Λ^*` raising degree by `shift`. Block `k` maps
/// `Λ^k` to `Λ^{k+shift}`; blocks whose target degree falls outside
/// `[0, dim_r]` have zero rows.
#[derive(Clone, Debug, PartialEq)]
pub struct FormOperator<R> {
    dim_r: usize,
    shift: i32,
    blocks: Vec<SparseMatrix<R>>,
}

fn shifted(k: usize, shift: i32, dim_r: usize) -> Option<usize> {
    let t = k as i64 + shift as i64;
    (0..=dim_r as i64).contains(&t).then_some(t as usize)
}

impl<R: Real> FormOperator<R> {
    pub fn zero(dim_r: usize, shift: i32) -> Self {
        let basis = exterior_basis(dim_r);
        let blocks = (0..=dim_r)
            .map(|k| {
                let rows = shifted(k, shift, dim_r).map_or(0, |t| basis.dim(t));
                SparseMatrix::zeros(rows, basis.dim(k))
            })
            .collect();
        FormOperator { dim_r, shift, blocks }
    }

    pub fn identity(dim_r: usize) -> Self {
        let basis = exterior_basis(dim_r);
        FormOperator { dim_r, shift: 0, blocks: (0..=dim_r).map(|k| SparseMatrix::identity(basis.dim(k))).collect() }
    }

    pub fn from_blocks(dim_r: usize, shift: i32, blocks: Vec<SparseMatrix<R>>) -> Result<Self> {
        let basis = exterior_basis(dim_r);
        if blocks.len() != dim_r + 1 {
            return Err(Error::DimensionMismatch { left: blocks.len(), right: dim_r + 1 });
        }
        for (k, b) in blocks.iter().enumerate() {
            let rows = shifted(k, shift, dim_r).map_or(0, |t| basis.dim(t));
            if b.rows() != rows || b.cols() != basis.dim(k) {
                return Err(Error::DimensionMismatch { left: b.rows(), right: rows });
            }
        }
        Ok(FormOperator { dim_r, shift, blocks })
    }

    /// The derivation extending the degree-1 map `e^a ↦ Σ_b m[b][a] e^b`.
    pub fn derivation(m: &Matrix<R>) -> Self {
        let d = m.rows();
        assert_eq!(d, m.cols());
        let basis = exterior_basis(d);
        let blocks = (0..=d)
            .map(|k| {
                let mut triplets = Vec::new();
                for (col, blade) in basis.blades(k).iter().enumerate() {
                    let idx = blade.indices();
                    for (t, &s) in idx.iter().enumerate() {
                        let left = Blade::from_sorted(&idx[..t]);
                        let right = Blade::from_sorted(&idx[t + 1..]);
                        for b in 0..d {
                            let coef = &m[(b, s)];
                            if coef.is_zero() {
                                continue;
                            }
                            let Some((n1, lb)) = left.wedge(Blade::from_sorted(&[b])) else { continue };
                            let Some((n2, target)) = lb.wedge(right) else { continue };
                            let v = if n1 != n2 { coef.neg() } else { coef.clone() };
                            triplets.push((basis.index_of(target), col, v));
                        }
                    }
                }
                SparseMatrix::from_triplets(basis.dim(k), basis.dim(k), triplets)
            })
            .collect();
        FormOperator { dim_r: d, shift: 0, blocks }
    }

    /// The algebra automorphism extending `e^a ↦ Σ_b m[b][a] e^b`.
    pub fn multiplicative(m: &Matrix<R>) -> Self {
        let d = m.rows();
        assert_eq!(d, m.cols());
        let basis = exterior_basis(d);
        let images: Vec<Vec<(usize, R)>> = (0..d)
            .map(|a| (0..d).filter(|&b| !m[(b, a)].is_zero()).map(|b| (b, m[(b, a)].clone())).collect())
            .collect();
        let blocks = (0..=d)
            .map(|k| {
                let mut triplets = Vec::new();
                for (col, blade) in basis.blades(k).iter().enumerate() {
                    let mut acc: BTreeMap<Blade, R> = BTreeMap::from([(Blade::EMPTY, R::one())]);
                    for s in blade.indices() {
                        let mut next: BTreeMap<Blade, R> = BTreeMap::new();
                        for (cur, x) in &acc {
                            for (b, y) in &images[s] {
                                if let Some((neg, t)) = cur.wedge(Blade::from_sorted(&[*b])) {
                                    let p = x.mul(y);
                                    let e = next.entry(t).or_insert_with(R::zero);
                                    if neg {
                                        e.sub_assign(&p);
                                    } else {
                                        e.add_assign(&p);
                                    }
                                }
                            }
                        }
                        next.retain(|_, v| !v.is_zero());
                        acc = next;
                    }
                    for (t, v) in acc {
                        triplets.push((basis.index_of(t), col, v));
                    }
                }
                SparseMatrix::from_triplets(basis.dim(k), basis.dim(k), triplets)
            })
            .collect();
        FormOperator { dim_r: d, shift: 0, blocks }
    }

    /// Left exterior multiplication by the homogeneous real form `Σ c_B e^B`
    /// of degree `degree`.
    pub fn wedge_with(dim_r: usize, degree: usize, terms: &[(Blade, R)]) -> Self {
        assert!(terms.iter().all(|(b, _)| b.degree() == degree));
        let basis = exterior_basis(dim_r);
        let shift = degree as i32;
        let blocks = (0..=dim_r)
            .map(|k| {
                let Some(t) = shifted(k, shift, dim_r) else {
                    return SparseMatrix::zeros(0, basis.dim(k));
                };
                let mut triplets = Vec::new();
                for (col, blade) in basis.blades(k).iter().enumerate() {
                    for (b, c) in terms {
                        if let Some((neg, target)) = b.wedge(*blade) {
                            triplets.push((basis.index_of(target), col, if neg { c.neg() } else { c.clone() }));
                        }
                    }
                }
                SparseMatrix::from_triplets(basis.dim(t), basis.dim(k), triplets)
            })
            .collect();
        FormOperator { dim_r, shift, blocks }
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn block(&self, k: usize) -> &SparseMatrix<R> {
        &self.blocks[k]
    }

    pub fn target_degree(&self, k: usize) -> Option<usize> {
        shifted(k, self.shift, self.dim_r)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(SparseMatrix::is_zero)
    }

    pub fn nnz(&self) -> usize {
        self.blocks.iter().map(SparseMatrix::nnz).sum()
    }

    /// Apply to the degree-`k` coefficient vector.
    pub fn apply_vector<C: ComplexField<Re = R>>(&self, k: usize, v: &[C]) -> Vec<C> {
        self.blocks[k].apply_complex(v)
    }

    pub fn apply<C: ComplexField<Re = R>>(&self, alpha: &Multivector<C>) -> Result<Multivector<C>> {
        if alpha.dim_r() != self.dim_r {
            return Err(Error::DimensionMismatch { left: alpha.dim_r(), right: self.dim_r });
        }
        let mut out = Multivector::zero(self.dim_r);
        for k in alpha.degrees() {
            let Some(t) = self.target_degree(k) else { continue };
            let image = self.apply_vector(k, &alpha.to_vector(k));
            out = out.add(&Multivector::from_vector(self.dim_r, t, &image));
        }
        Ok(out)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim_r != other.dim_r {
            return Err(Error::DimensionMismatch { left: self.dim_r, right: other.dim_r });
        }
        Ok(())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let shift = self.shift + other.shift;
        let mut out = Self::zero(self.dim_r, shift);
        for k in 0..=self.dim_r {
            let (Some(mid), Some(_)) = (other.target_degree(k), shifted(k, shift, self.dim_r)) else { continue };
            out.blocks[k] = self.blocks[mid].mul(&other.blocks[k]);
        }
        Ok(out)
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&SparseMatrix<R>, &SparseMatrix<R>) -> SparseMatrix<R>,
    ) -> Result<Self> {
        self.check_dim(other)?;
        if self.shift != other.shift {
            return Err(Error::ShiftMismatch(self.shift, other.shift));
        }
        Ok(FormOperator {
            dim_r: self.dim_r,
            shift: self.shift,
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, SparseMatrix::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, SparseMatrix::sub)
    }

    pub fn scale(&self, s: &R) -> Self {
        FormOperator { dim_r: self.dim_r, shift: self.shift, blocks: self.blocks.iter().map(|b| b.scale(s)).collect() }
    }

    /// Adjoint for the metric in which the blade basis is orthonormal.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.dim_r, -self.shift);
        for k in 0..=self.dim_r {
            if let Some(t) = self.target_degree(k) {
                out.blocks[t] = self.blocks[k].transpose();
            }
        }
        out
    }

    /// `tr(self ∘ other)`; zero unless the shifts cancel.
    pub fn trace_of_composition(&self, other: &Self) -> R {
        let mut acc = R::zero();
        if self.shift + other.shift != 0 || self.dim_r != other.dim_r {
            return acc;
        }
        for k in 0..=self.dim_r {
            if let Some(mid) = other.target_degree(k) {
                acc.add_assign(&self.blocks[mid].trace_of_product(&other.blocks[k]));
            }
        }
        acc
    }

    /// Coordinates in the space of all homogeneous operators. Distinct
    /// shifts occupy disjoint index ranges.
    pub fn flatten(&self) -> SparseVec<R> {
        let basis = exterior_basis(self.dim_r);
        let d = self.dim_r as i32;
        let mut offset = 0usize;
        for s in -d..self.shift {
            for k in 0..=self.dim_r {
                offset += shifted(k, s, self.dim_r).map_or(0, |t| basis.dim(t)) * basis.dim(k);
            }
        }
        let mut out = SparseVec::new();
        for block in &self.blocks {
            for (i, j, v) in block.iter() {
                out.insert(offset + i * block.cols() + j, v.clone());
            }
            offset += block.rows() * block.cols();
        }
        out
    }

    /// `Σ c_i ops_i`; all operators must share a shift.
    pub fn linear_combination(dim_r: usize, shift: i32, ops: &[&FormOperator<R>], coeffs: &[R]) -> Result<Self> {
        let mut acc = Self::zero(dim_r, shift);
        for (op, c) in ops.iter().zip(coeffs) {
            if !c.is_zero() {
                acc = acc.add(&op.scale(c))?;
            }
        }
        Ok(acc)
    }

    /// Dense copy of block `k`.
    pub fn dense_block(&self, k: usize) -> Matrix<R> {
        self.blocks[k].to_dense()
    }

    pub fn map<S: Real>(&self, f: impl Fn(&R) -> S) -> FormOperator<S> {
        FormOperator {
            dim_r: self.dim_r,
            shift: self.shift,
            blocks: self
                .blocks
                .iter()
                .map(|b| SparseMatrix::from_triplets(b.rows(), b.cols(), b.iter().map(|(i, j, v)| (i, j, f(v)))))
                .collect(),
        }
    }
}

//! The submodule `H_o` generated by the unit class and the projection onto
//! it along the other isotypic components.
//!
//! Primary path: the Casimir `C = Σ (B^{-1})_{ab} X_a X_b` of the closure,
//! with `B` the trace form, acts on each isotypic component by a scalar.
//! Per degree block we split `ker(C - c_o) ⊕ im(C - c_o)`, where `c_o` is
//! the Casimir value on `𝕀`, and certify that the kernel is exactly `H_o`.
//! Fallback: the common eigenvectors of the stabilizer of the line `R𝕀`
//! with the same character generate the full isotypic component; if that
//! equals `H_o`, the orthogonal projection onto `H_o` is the equivariant one
//! (the closure is stable under transposition).

use crate::error::{Error, Result};
use crate::exterior_algebra::{exterior_basis, Multivector};
use crate::linalg::{to_sparse, EchelonBasis, Matrix, SparseMatrix};
use crate::quaternion_space::QuaternionicSpace;
use crate::scalar::{ComplexField, Real};
use crate::su2_action::{FormOperator, Su2Action};

use super::{unit_orbit_form, LieClosure};

/// Largest degree block the split will densify.
const MAX_BLOCK_DIM: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitStrategy {
    /// Casimir first, stabilizer refinement if the Casimir eigenspace is
    /// too large.
    Auto,
    /// Skip the Casimir path.
    WeightRefinement,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SplitCertificate<R> {
    /// The Casimir eigenspace for `eigenvalue` equals `H_o` in every degree.
    Casimir { eigenvalue: R },
    /// The module generated by the stabilizer eigenvectors equals `H_o`.
    WeightRefinement { stabilizer_dim: usize, generating_vectors: usize },
}

#[derive(Clone, Debug)]
pub struct IsotypicSplit<R> {
    dim_r: usize,
    h_o: Vec<Vec<Vec<R>>>,
    projection: FormOperator<R>,
    certificate: SplitCertificate<R>,
}

impl<R: Real> IsotypicSplit<R> {
    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    /// Basis of `H_o ∩ Λ^k` as coefficient vectors.
    pub fn h_o_basis(&self, k: usize) -> &[Vec<R>] {
        &self.h_o[k]
    }

    pub fn h_o_dim(&self) -> usize {
        self.h_o.iter().map(Vec::len).sum()
    }

    pub fn h_o_dims(&self) -> Vec<usize> {
        self.h_o.iter().map(Vec::len).collect()
    }

    pub fn projection(&self) -> &FormOperator<R> {
        &self.projection
    }

    pub fn certificate(&self) -> &SplitCertificate<R> {
        &self.certificate
    }
}

/// Span the submodule generated by `seeds` under `ops`, degree by degree.
fn generate_module<R: Real>(dim_r: usize, ops: &[FormOperator<R>], seeds: Vec<(usize, Vec<R>)>) -> Vec<Vec<Vec<R>>> {
    let mut spans: Vec<EchelonBasis<R>> = vec![EchelonBasis::new(); dim_r + 1];
    let mut vectors: Vec<Vec<Vec<R>>> = vec![Vec::new(); dim_r + 1];
    let mut queue = std::collections::VecDeque::new();
    for (k, v) in seeds {
        if spans[k].insert(&to_sparse(&v)) {
            vectors[k].push(v.clone());
            queue.push_back((k, v));
        }
    }
    while let Some((k, v)) = queue.pop_front() {
        for op in ops {
            let Some(t) = op.target_degree(k) else { continue };
            let image = op.block(k).apply(&v);
            if spans[t].insert(&to_sparse(&image)) {
                vectors[t].push(image.clone());
                queue.push_back((t, image));
            }
        }
    }
    vectors
}

fn unit_seed<R: Real>() -> Vec<(usize, Vec<R>)> {
    vec![(0, vec![R::one()])]
}

fn span_rank<R: Real>(vs: &[Vec<R>]) -> usize {
    if vs.is_empty() {
        0
    } else {
        Matrix::from_rows(vs.to_vec()).rank()
    }
}

/// Split with [`SplitStrategy::Auto`].
pub fn isotypic_split<R: Real>(space: &QuaternionicSpace, closure: &LieClosure<R>) -> Result<IsotypicSplit<R>> {
    isotypic_split_with(space, closure, SplitStrategy::Auto)
}

pub fn isotypic_split_with<R: Real>(
    space: &QuaternionicSpace,
    closure: &LieClosure<R>,
    strategy: SplitStrategy,
) -> Result<IsotypicSplit<R>> {
    let d = space.dim_r();
    if closure.dim_r() != d {
        return Err(Error::DimensionMismatch { left: closure.dim_r(), right: d });
    }
    let basis = exterior_basis(d);
    let largest = (0..=d).map(|k| basis.dim(k)).max().unwrap_or(1);
    if largest > MAX_BLOCK_DIM {
        return Err(Error::Precondition(format!(
            "degree blocks of size {largest} exceed the isotypic split limit {MAX_BLOCK_DIM}"
        )));
    }
    let h_o = generate_module(d, closure.generators(), unit_seed());

    let split = match strategy {
        SplitStrategy::Auto => match casimir_projection(d, closure, &h_o)? {
            Some((projection, eigenvalue)) => {
                IsotypicSplit { dim_r: d, h_o, projection, certificate: SplitCertificate::Casimir { eigenvalue } }
            }
            None => weight_refinement(d, closure, h_o)?,
        },
        SplitStrategy::WeightRefinement => weight_refinement(d, closure, h_o)?,
    };
    verify_split(&split, closure)?;
    Ok(split)
}

/// The Casimir projector, or `None` when its `c_o`-eigenspace is not `H_o`.
fn casimir_projection<R: Real>(
    d: usize,
    closure: &LieClosure<R>,
    h_o: &[Vec<Vec<R>>],
) -> Result<Option<(FormOperator<R>, R)>> {
    let xs = closure.basis();
    let n = xs.len();
    let mut trace_form = Matrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            trace_form[(a, b)] = xs[a].trace_of_composition(&xs[b]);
        }
    }
    let Some(inv) = trace_form.inverse() else {
        return Ok(None);
    };
    let mut casimir = FormOperator::zero(d, 0);
    for a in 0..n {
        for b in 0..n {
            let c = &inv[(a, b)];
            if c.is_zero() || xs[a].shift() + xs[b].shift() != 0 {
                continue;
            }
            casimir = casimir.add(&xs[a].compose(&xs[b])?.scale(c))?;
        }
    }
    let c_o = casimir.block(0).get(0, 0);
    let mut blocks = Vec::with_capacity(d + 1);
    for (k, h_k) in h_o.iter().enumerate() {
        let size = casimir.block(k).rows();
        let shifted = casimir.dense_block(k).sub(&Matrix::identity(size).scale(&c_o));
        let kernel = shifted.kernel();
        if kernel.len() != h_k.len()
            || (!h_k.is_empty() && span_rank(&[kernel.clone(), h_k.clone()].concat()) != h_k.len())
        {
            return Ok(None);
        }
        let (_, pivots) = shifted.rref();
        let image: Vec<Vec<R>> = pivots.iter().map(|&p| shifted.column(p)).collect();
        let frame = Matrix::from_columns(&[kernel.clone(), image].concat());
        if size == 0 {
            blocks.push(SparseMatrix::zeros(0, 0));
            continue;
        }
        let Some(frame_inv) = frame.inverse() else {
            return Ok(None);
        };
        let m = kernel.len();
        let mut keep = Matrix::zeros(size, size);
        for i in 0..m {
            keep[(i, i)] = R::one();
        }
        blocks.push(SparseMatrix::from_dense(&frame.mul(&keep).mul(&frame_inv)));
    }
    Ok(Some((FormOperator::from_blocks(d, 0, blocks)?, c_o)))
}

fn weight_refinement<R: Real>(d: usize, closure: &LieClosure<R>, h_o: Vec<Vec<Vec<R>>>) -> Result<IsotypicSplit<R>> {
    let unit = [R::one()];
    // Stabilizer of the line R𝕀 together with its character.
    let mut stabilizer: Vec<(FormOperator<R>, R)> = Vec::new();
    let xs = closure.basis();
    let mut shifts: Vec<i32> = xs.iter().map(FormOperator::shift).collect();
    shifts.sort_unstable();
    shifts.dedup();
    for s in shifts {
        let group: Vec<&FormOperator<R>> = xs.iter().filter(|x| x.shift() == s).collect();
        match s.cmp(&0) {
            std::cmp::Ordering::Less => stabilizer.extend(group.into_iter().map(|x| (x.clone(), R::zero()))),
            std::cmp::Ordering::Equal => {
                stabilizer.extend(group.into_iter().map(|x| (x.clone(), x.block(0).apply(&unit)[0].clone())))
            }
            std::cmp::Ordering::Greater => {
                let images: Vec<Vec<R>> = group.iter().map(|x| x.block(0).apply(&unit)).collect();
                let combos = Matrix::from_columns(&images).kernel();
                for c in combos {
                    let op = FormOperator::linear_combination(d, s, &group, &c)?;
                    stabilizer.push((op, R::zero()));
                }
            }
        }
    }
    let mut seeds = Vec::new();
    for k in 0..=d {
        let size = exterior_basis(d).dim(k);
        let mut rows: Vec<Vec<R>> = Vec::new();
        for (op, chi) in &stabilizer {
            let mut block = op.dense_block(k);
            if op.shift() == 0 {
                block = block.sub(&Matrix::identity(size).scale(chi));
            }
            rows.extend((0..block.rows()).map(|i| block.row(i).to_vec()));
        }
        let solutions = if rows.is_empty() { identity_columns(size) } else { Matrix::from_rows(rows).kernel() };
        seeds.extend(solutions.into_iter().map(|v| (k, v)));
    }
    let generating_vectors = seeds.len();
    let component = generate_module(d, closure.generators(), seeds);
    for k in 0..=d {
        let joint = span_rank(&[component[k].clone(), h_o[k].clone()].concat());
        if component[k].len() != h_o[k].len() || joint != h_o[k].len() {
            return Err(Error::CertificateFailure(format!(
                "isotypic component has dimension {} in degree {k}, H_o has {}",
                component[k].len(),
                h_o[k].len()
            )));
        }
    }
    let mut blocks = Vec::with_capacity(d + 1);
    for h_k in &h_o {
        let size = exterior_basis(d).dim(blocks.len());
        if h_k.is_empty() {
            blocks.push(SparseMatrix::zeros(size, size));
            continue;
        }
        let v = Matrix::from_columns(h_k);
        let gram_inv = v
            .transpose()
            .mul(&v)
            .inverse()
            .ok_or_else(|| Error::CertificateFailure("H_o basis is dependent".into()))?;
        blocks.push(SparseMatrix::from_dense(&v.mul(&gram_inv).mul(&v.transpose())));
    }
    Ok(IsotypicSplit {
        dim_r: d,
        h_o,
        projection: FormOperator::from_blocks(d, 0, blocks)?,
        certificate: SplitCertificate::WeightRefinement { stabilizer_dim: stabilizer.len(), generating_vectors },
    })
}

fn identity_columns<R: Real>(size: usize) -> Vec<Vec<R>> {
    (0..size).map(|i| (0..size).map(|j| if i == j { R::one() } else { R::zero() }).collect()).collect()
}

fn verify_split<R: Real>(split: &IsotypicSplit<R>, closure: &LieClosure<R>) -> Result<()> {
    let p = &split.projection;
    if !p.compose(p)?.sub(p)?.is_zero() {
        return Err(Error::CertificateFailure("projection is not idempotent".into()));
    }
    for x in closure.basis() {
        if !p.compose(x)?.sub(&x.compose(p)?)?.is_zero() {
            return Err(Error::CertificateFailure("projection does not commute with the closure".into()));
        }
    }
    for (k, h_k) in split.h_o.iter().enumerate() {
        for h in h_k {
            let image = p.block(k).apply(h);
            if image.iter().zip(h).any(|(a, b)| !a.sub(b).is_zero()) {
                return Err(Error::CertificateFailure(format!("projection moves an H_o vector in degree {k}")));
            }
        }
        let rank = p.dense_block(k).rank();
        if rank != h_k.len() {
            return Err(Error::CertificateFailure(format!(
                "projection has rank {rank} in degree {k}, H_o has {}",
                h_k.len()
            )));
        }
    }
    Ok(())
}

/// `α_o`, the `H_o` component of `α`.
pub fn isotypic_component<C: ComplexField>(
    split: &IsotypicSplit<C::Re>,
    alpha: &Multivector<C>,
) -> Result<Multivector<C>> {
    split.projection.apply(alpha)
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitOrbitFit<C> {
    pub degree: usize,
    /// Dimension of the `su(2)`-invariant part of `H_o ∩ Λ^degree`.
    pub line_dim: usize,
    /// `c` with `α_o = c·(L_I² + L_J² + L_K²)^{degree/4} 𝕀`, when it exists.
    pub constant: Option<C>,
}

/// Fit `α_o` against the closed form of degree `deg α`.
pub fn fit_unit_orbit_constant<C: ComplexField>(
    space: &QuaternionicSpace,
    split: &IsotypicSplit<C::Re>,
    su2: &Su2Action<C::Re>,
    alpha: &Multivector<C>,
) -> Result<UnitOrbitFit<C>> {
    let k = alpha.degree_or(0)?;
    let h_k = split.h_o_basis(k);
    let line_dim = if h_k.is_empty() {
        0
    } else {
        let mut rows: Vec<Vec<C::Re>> = Vec::new();
        for op in su2.operators() {
            let images: Vec<Vec<C::Re>> = h_k.iter().map(|h| op.block(k).apply(h)).collect();
            let len = images[0].len();
            rows.extend((0..len).map(|i| images.iter().map(|img| img[i].clone()).collect::<Vec<_>>()));
        }
        Matrix::from_rows(rows).kernel().len()
    };
    if k % 4 != 0 {
        return Ok(UnitOrbitFit { degree: k, line_dim, constant: None });
    }
    let alpha_o = isotypic_component(split, alpha)?;
    let form: Multivector<C> = unit_orbit_form(space, k / 4)?;
    let constant = match form.terms().next() {
        None => None,
        Some((blade, f)) => {
            let c = alpha_o.coefficient(*blade).div(f);
            form.scale(&c).approx_eq(&alpha_o, 1e-9).then_some(c)
        }
    };
    Ok(UnitOrbitFit { degree: k, line_dim, constant })
}

//! The `SU(2)` action on forms induced by the hypercomplex structure, its
//! Lie algebra action, Hodge types and invariance tests.
//!
//! Sign convention: the unit quaternion `L` acts on forms by pulling back
//! along `L^{-1}`, so on 1-forms `ξ ↦ -ξ∘L` (matrix `-Lᵀ`). The induced
//! derivations `ad L` then satisfy `[ad I, ad J] = 2 ad K`. Hodge types for
//! `L` are the eigenspaces of the derivation extending `ξ ↦ ξ∘L`, which is
//! `-ad L`; it acts on `(p,q)`-forms by `(p-q)·i`.

mod operator;

pub use operator::FormOperator;

use crate::error::{Error, Result};
use crate::exterior_algebra::Multivector;
use crate::linalg::Matrix;
use crate::quaternion_space::{holomorphic_symplectic_form, Generator, InducedComplexStructure, QuaternionicSpace};
use crate::scalar::{ComplexField, Field, Real, FLOAT_ZERO_TOL};

fn minus_transpose<R: Real>(l: &InducedComplexStructure<R>) -> Matrix<R> {
    l.matrix().transpose().map(Field::neg)
}

fn check_space<R: Real>(space: &QuaternionicSpace, l: &InducedComplexStructure<R>) -> Result<()> {
    if l.dim_r() != space.dim_r() {
        return Err(Error::DimensionMismatch { left: l.dim_r(), right: space.dim_r() });
    }
    Ok(())
}

/// The Lie algebra action of `L ∈ su(2)` on `Λ^*`: the derivation
/// extending `ξ ↦ -ξ∘L`.
pub fn ad_operator<R: Real>(space: &QuaternionicSpace, l: &InducedComplexStructure<R>) -> Result<FormOperator<R>> {
    check_space(space, l)?;
    Ok(FormOperator::derivation(&minus_transpose(l)))
}

/// The group action of the unit quaternion `L` on `Λ^*`: the algebra
/// automorphism extending `ξ ↦ -ξ∘L = ξ∘L^{-1}`.
pub fn group_action<R: Real>(space: &QuaternionicSpace, l: &InducedComplexStructure<R>) -> Result<FormOperator<R>> {
    check_space(space, l)?;
    Ok(FormOperator::multiplicative(&minus_transpose(l)))
}

/// The derivation extending `ξ ↦ ξ∘L`, whose eigenvalues label Hodge types.
pub fn complex_structure_action<R: Real>(
    space: &QuaternionicSpace,
    l: &InducedComplexStructure<R>,
) -> Result<FormOperator<R>> {
    check_space(space, l)?;
    Ok(FormOperator::derivation(&l.matrix().transpose()))
}

/// `ad I`, `ad J`, `ad K` for one space, checked on construction.
#[derive(Clone, Debug)]
pub struct Su2Action<R> {
    dim_r: usize,
    ad: [FormOperator<R>; 3],
}

impl<R: Real> Su2Action<R> {
    /// Build and self-test: `[ad I, ad J] = 2 ad K` on 1-forms and
    /// `ad I (Ω) = -2i Ω`.
    pub fn new(space: &QuaternionicSpace) -> Result<Self> {
        let ad = Generator::ALL.map(|g| ad_operator(space, &space.structure::<R>(g)).expect("same space"));
        let action = Su2Action { dim_r: space.dim_r(), ad };
        action.self_test(space)?;
        Ok(action)
    }

    fn self_test(&self, space: &QuaternionicSpace) -> Result<()> {
        let [i, j, k] = &self.ad;
        let lhs =
            i.block(1).to_dense().mul(&j.block(1).to_dense()).sub(&j.block(1).to_dense().mul(&i.block(1).to_dense()));
        let rhs = k.block(1).to_dense().scale(&R::from_i64(2));
        if !lhs.sub(&rhs).is_zero() {
            return Err(Error::InvariantViolation("[ad I, ad J] != 2 ad K on 1-forms".into()));
        }
        let omega: Multivector<R::Complex> = holomorphic_symplectic_form(space);
        let image = i.apply(&omega)?;
        let expected = omega.scale(&<R::Complex as ComplexField>::from_parts(R::zero(), R::from_i64(-2)));
        if !image.approx_eq(&expected, FLOAT_ZERO_TOL) {
            return Err(Error::InvariantViolation(
                "ad I does not act on the holomorphic symplectic form by -2i".into(),
            ));
        }
        Ok(())
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn ad(&self, g: Generator) -> &FormOperator<R> {
        &self.ad[g as usize]
    }

    pub fn operators(&self) -> &[FormOperator<R>; 3] {
        &self.ad
    }

    /// `ad L` for `L = aI + bJ + cK`, by linearity.
    pub fn ad_along(&self, l: &InducedComplexStructure<R>) -> FormOperator<R> {
        let ops: Vec<&FormOperator<R>> = self.ad.iter().collect();
        FormOperator::linear_combination(self.dim_r, 0, &ops, l.coefficients()).expect("shift 0")
    }

    /// Basis of `(Λ^k)^{su(2)}`: the common real kernel of `ad I, ad J, ad K`.
    pub fn invariant_basis(&self, k: usize) -> Vec<Vec<R>> {
        let blocks: Vec<Matrix<R>> = self.ad.iter().map(|op| op.dense_block(k)).collect();
        let cols = blocks[0].cols();
        let rows: Vec<Vec<R>> = blocks.iter().flat_map(|b| (0..b.rows()).map(|i| b.row(i).to_vec())).collect();
        if rows.is_empty() {
            return (0..cols).map(|c| (0..cols).map(|i| if i == c { R::one() } else { R::zero() }).collect()).collect();
        }
        Matrix::from_rows(rows).kernel()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HodgeComponent<C> {
    pub p: usize,
    pub q: usize,
    pub form: Multivector<C>,
}

/// Split a homogeneous form into its `(p, q)` parts for `L`, with an exact
/// reconstruction check.
pub fn hodge_decomposition<C: ComplexField>(
    space: &QuaternionicSpace,
    l: &InducedComplexStructure<C::Re>,
    alpha: &Multivector<C>,
) -> Result<Vec<HodgeComponent<C>>> {
    if alpha.dim_r() != space.dim_r() {
        return Err(Error::DimensionMismatch { left: alpha.dim_r(), right: space.dim_r() });
    }
    if alpha.is_zero() {
        return Ok(Vec::new());
    }
    let k = alpha.degree_or(0)?;
    let d = space.dim_r();
    let t = complex_structure_action(space, l)?;
    let span = k.min(d - k) as i64;
    let weights: Vec<i64> = (-span..=span).step_by(2).collect();
    let v = alpha.to_vector(k);
    let i_times = |m: i64| C::from_parts(<C::Re as Field>::zero(), <C::Re as Field>::from_i64(m));

    let mut parts = Vec::new();
    let mut total = Multivector::zero(d);
    for &m in weights.iter().rev() {
        let lambda = i_times(m);
        let mut w = v.clone();
        for &other in weights.iter().filter(|&&o| o != m) {
            let mu = i_times(other);
            let denom = lambda.sub(&mu);
            let tw = t.apply_vector(k, &w);
            w = tw.iter().zip(&w).map(|(a, b)| a.sub(&b.mul(&mu)).div(&denom)).collect();
        }
        let form = Multivector::from_vector(d, k, &w);
        if form.is_zero() {
            continue;
        }
        let eigen_check = Multivector::from_vector(d, k, &t.apply_vector(k, &w));
        if !eigen_check.approx_eq(&form.scale(&lambda), FLOAT_ZERO_TOL * 10.0) {
            return Err(Error::InvariantViolation(format!("projected component fails the weight {m} eigen test")));
        }
        total = total.add(&form);
        let p = ((k as i64 + m) / 2) as usize;
        parts.push(HodgeComponent { p, q: k - p, form });
    }
    if !total.approx_eq(alpha, FLOAT_ZERO_TOL * 10.0) {
        return Err(Error::InvariantViolation("Hodge components do not sum to the input".into()));
    }
    Ok(parts)
}

/// `ad I α = ad J α = ad K α = 0`.
pub fn is_su2_invariant<C: ComplexField>(su2: &Su2Action<C::Re>, alpha: &Multivector<C>) -> Result<bool> {
    for op in su2.operators() {
        if !op.apply(alpha)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Which induced complex structures `L` satisfy `ad L α = 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Annihilator<R> {
    /// Every `L` on the sphere (`α` is `SU(2)`-invariant).
    AllSphere,
    /// Exactly `±direction/|direction|`.
    AntipodalPair([R; 3]),
    /// No `L` annihilates `α`.
    Empty,
}

impl<R: Real> Annihilator<R> {
    pub fn label(&self) -> &'static str {
        match self {
            Annihilator::AllSphere => "ALL_SPHERE",
            Annihilator::AntipodalPair(_) => "ANTIPODAL_PAIR",
            Annihilator::Empty => "EMPTY",
        }
    }
}

/// Solve `a·ad I α + b·ad J α + c·ad K α = 0` over the reals. The solution
/// space is 0, 1 or 3 dimensional because the annihilator of `α` in
/// `su(2)` is a subalgebra; dimension 2 signals a broken action.
pub fn annihilator_structures<C: ComplexField>(
    su2: &Su2Action<C::Re>,
    alpha: &Multivector<C>,
) -> Result<Annihilator<C::Re>> {
    let images: Vec<Multivector<C>> = su2.operators().iter().map(|op| op.apply(alpha)).collect::<Result<_>>()?;
    let mut blades: Vec<_> = images.iter().flat_map(|m| m.terms().map(|(b, _)| *b)).collect();
    blades.sort();
    blades.dedup();
    let mut rows = Vec::with_capacity(2 * blades.len());
    for b in &blades {
        let coeffs: Vec<C> = images.iter().map(|m| m.coefficient(*b)).collect();
        rows.push(coeffs.iter().map(|c| c.re()).collect::<Vec<_>>());
        rows.push(coeffs.iter().map(|c| c.im()).collect::<Vec<_>>());
    }
    let kernel = if rows.is_empty() {
        return Ok(Annihilator::AllSphere);
    } else {
        Matrix::from_rows(rows).kernel()
    };
    match kernel.len() {
        3 => Ok(Annihilator::AllSphere),
        1 => {
            let mut dir = kernel.into_iter().next().unwrap();
            <C::Re as Real>::normalize_direction(&mut dir);
            Ok(Annihilator::AntipodalPair([dir[0].clone(), dir[1].clone(), dir[2].clone()]))
        }
        0 => Ok(Annihilator::Empty),
        n => Err(Error::InvariantViolation(format!("annihilator in su(2) has dimension {n}"))),
    }
}

//! Lefschetz operators, their adjoints and the Lie algebra they generate
//! (isomorphic to `so(5)`), degree functionals, and the degree identities
//! for invariant classes.

mod isotypic;

pub use isotypic::{
    fit_unit_orbit_constant, isotypic_component, isotypic_split, isotypic_split_with, IsotypicSplit, SplitCertificate,
    SplitStrategy, UnitOrbitFit,
};

use crate::error::{Error, Result};
use crate::exterior_algebra::{integrate_over_torus, Multivector};
use crate::linalg::EchelonBasis;
use crate::quaternion_space::{
    holomorphic_symplectic_form, kaehler_coefficients, kaehler_form, Generator, InducedComplexStructure,
    QuaternionicSpace,
};
use crate::scalar::{ComplexField, Real};
use crate::su2_action::{is_su2_invariant, FormOperator, Su2Action};

/// `L_L(η) = ω_L ∧ η`.
pub fn lefschetz<R: Real>(space: &QuaternionicSpace, l: &InducedComplexStructure<R>) -> Result<FormOperator<R>> {
    if l.dim_r() != space.dim_r() {
        return Err(Error::DimensionMismatch { left: l.dim_r(), right: space.dim_r() });
    }
    Ok(FormOperator::wedge_with(space.dim_r(), 2, &kaehler_coefficients(l)))
}

/// `Λ_L`, the metric adjoint of [`lefschetz`].
pub fn dual_lefschetz<R: Real>(space: &QuaternionicSpace, l: &InducedComplexStructure<R>) -> Result<FormOperator<R>> {
    Ok(lefschetz(space, l)?.transpose())
}

/// `L_I, Λ_I, L_J, Λ_J, L_K, Λ_K`.
pub fn so5_generators<R: Real>(space: &QuaternionicSpace) -> Vec<FormOperator<R>> {
    Generator::ALL
        .iter()
        .flat_map(|&g| {
            let l = lefschetz(space, &space.structure::<R>(g)).expect("same space");
            let lt = l.transpose();
            [l, lt]
        })
        .collect()
}

/// A Lie algebra of homogeneous operators, closed under commutators.
#[derive(Clone, Debug)]
pub struct LieClosure<R> {
    generators: Vec<FormOperator<R>>,
    basis: Vec<FormOperator<R>>,
    echelon: EchelonBasis<R>,
    /// Echelon insertion index -> position in `basis` (rejected inserts map
    /// to `None`).
    slots: Vec<Option<usize>>,
}

impl<R: Real> LieClosure<R> {
    pub fn generators(&self) -> &[FormOperator<R>] {
        &self.generators
    }

    pub fn basis(&self) -> &[FormOperator<R>] {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn dim_r(&self) -> usize {
        self.generators.first().map_or(0, FormOperator::dim_r)
    }

    pub fn contains(&self, op: &FormOperator<R>) -> bool {
        op.dim_r() == self.dim_r() && self.echelon.contains(&op.flatten())
    }

    /// Coefficients of `op` over [`Self::basis`], if it lies in the span.
    pub fn coordinates(&self, op: &FormOperator<R>) -> Option<Vec<R>> {
        if op.dim_r() != self.dim_r() {
            return None;
        }
        let combo = self.echelon.coordinates(&op.flatten())?;
        let mut out = vec![R::zero(); self.basis.len()];
        for (c, slot) in combo.into_iter().zip(&self.slots) {
            if let Some(i) = slot {
                out[*i].add_assign(&c);
            }
        }
        Some(out)
    }

    /// `Σ c_i basis_i`; the nonzero coefficients must sit on one shift.
    pub fn combine(&self, coeffs: &[R]) -> Result<FormOperator<R>> {
        let mut acc: Option<FormOperator<R>> = None;
        for (op, c) in self.basis.iter().zip(coeffs) {
            if c.is_zero() {
                continue;
            }
            let term = op.scale(c);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        Ok(acc.unwrap_or_else(|| FormOperator::zero(self.dim_r(), 0)))
    }

    fn push(&mut self, op: FormOperator<R>) -> bool {
        if op.is_zero() {
            return false;
        }
        let accepted = self.echelon.insert(&op.flatten());
        if accepted {
            self.slots.push(Some(self.basis.len()));
            self.basis.push(op);
        } else {
            self.slots.push(None);
        }
        accepted
    }

    /// Every commutator of basis elements lies in the span.
    pub fn is_closed(&self) -> Result<bool> {
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                if !self.contains(&a.commutator(b)?) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Breadth-first commutator closure of homogeneous generators.
pub fn lie_closure<R: Real>(generators: Vec<FormOperator<R>>) -> Result<LieClosure<R>> {
    let Some(first) = generators.first() else {
        return Err(Error::Precondition("lie closure needs at least one generator".into()));
    };
    let dim_r = first.dim_r();
    if let Some(bad) = generators.iter().find(|g| g.dim_r() != dim_r) {
        return Err(Error::DimensionMismatch { left: bad.dim_r(), right: dim_r });
    }
    let mut closure = LieClosure {
        generators: generators.clone(),
        basis: Vec::new(),
        echelon: EchelonBasis::new(),
        slots: Vec::new(),
    };
    for g in generators {
        closure.push(g);
    }
    // Dimension can never exceed that of End(Λ^*).
    let limit = 1usize << (2 * dim_r).min(60);
    let mut i = 0;
    while i < closure.basis.len() {
        for j in 0..i {
            let c = closure.basis[i].commutator(&closure.basis[j])?;
            closure.push(c);
            if closure.basis.len() > limit {
                return Err(Error::InvariantViolation("lie closure exceeded the ambient dimension".into()));
            }
        }
        i += 1;
    }
    Ok(closure)
}

/// Closure of the six Lefschetz and dual Lefschetz operators.
pub fn so5_closure<R: Real>(space: &QuaternionicSpace) -> Result<LieClosure<R>> {
    lie_closure(so5_generators(space))
}

/// `deg_L(α) = ∫ α ∧ ω_L^{(dim_r - deg α)/2}`.
pub fn degree_functional<C: ComplexField>(
    space: &QuaternionicSpace,
    l: &InducedComplexStructure<C::Re>,
    alpha: &Multivector<C>,
) -> Result<C> {
    if alpha.dim_r() != space.dim_r() {
        return Err(Error::DimensionMismatch { left: alpha.dim_r(), right: space.dim_r() });
    }
    if alpha.is_zero() {
        return Ok(C::zero());
    }
    let k = alpha.degree_or(0)?;
    if k % 2 == 1 {
        return Err(Error::OddDegree(k));
    }
    let omega: Multivector<C> = kaehler_form(space, l);
    let power = omega.wedge_power((space.dim_r() - k) / 2);
    integrate_over_torus(space, &alpha.wedge(&power)?)
}

#[derive(Clone, Debug, PartialEq)]
pub enum IdentityCheck {
    /// `∫ Ω^n ∧ Ω̄^n ∧ α` against `2^n deg(α)`.
    DegreeIdentity { n_exp: usize },
    /// Degree not congruent to `dim_r` mod 4: `deg(α)` must vanish.
    DegreeVanishes,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport<C> {
    pub check: IdentityCheck,
    pub degree: usize,
    pub lhs: C,
    pub rhs: C,
    pub equal: bool,
    /// `lhs / deg(α)` when `deg(α) ≠ 0`; the constant that actually holds.
    pub observed_constant: Option<C>,
}

impl<C> IdentityReport<C> {
    pub fn check_name(&self) -> &'static str {
        match self.check {
            IdentityCheck::DegreeIdentity { .. } => "integral_identity",
            IdentityCheck::DegreeVanishes => "degree_vanishes",
        }
    }
}

/// Compare `∫ Ω^n ∧ Ω̄^n ∧ α` with `2^n deg_I(α)` for an invariant `α`,
/// where `4n = dim_r - deg α`. When `dim_r - deg α` is not divisible by 4
/// the report instead checks `deg_I(α) = 0`.
pub fn verify_integral_identity<C: ComplexField>(
    space: &QuaternionicSpace,
    su2: &Su2Action<C::Re>,
    alpha: &Multivector<C>,
    n_exp: Option<usize>,
) -> Result<IdentityReport<C>> {
    if !is_su2_invariant(su2, alpha)? {
        return Err(Error::Precondition("class is not su(2)-invariant".into()));
    }
    let d = space.dim_r();
    let k = alpha.degree_or(0)?;
    let deg = degree_functional(space, &space.structure(Generator::I), alpha)?;
    if !(d - k).is_multiple_of(4) {
        if let Some(n) = n_exp {
            return Err(Error::Precondition(format!(
                "n_exp = {n} given but dim_r - degree = {} is not divisible by 4",
                d - k
            )));
        }
        let zero = C::zero();
        return Ok(IdentityReport {
            check: IdentityCheck::DegreeVanishes,
            degree: k,
            equal: deg.sub(&zero).is_zero(),
            lhs: deg,
            rhs: zero,
            observed_constant: None,
        });
    }
    let n = (d - k) / 4;
    if let Some(given) = n_exp {
        if given != n {
            return Err(Error::Precondition(format!("n_exp = {given} but (dim_r - degree)/4 = {n}")));
        }
    }
    let omega: Multivector<C> = holomorphic_symplectic_form(space);
    let both = omega.wedge_power(n).wedge(&omega.conj().wedge_power(n))?;
    let lhs = integrate_over_torus(space, &both.wedge(alpha)?)?;
    let rhs = deg.mul(&C::from_i64(1 << n));
    let observed_constant = (!deg.is_zero()).then(|| lhs.div(&deg));
    Ok(IdentityReport {
        check: IdentityCheck::DegreeIdentity { n_exp: n },
        degree: k,
        equal: lhs.sub(&rhs).is_zero(),
        lhs,
        rhs,
        observed_constant,
    })
}

/// `(L_I² + L_J² + L_K²)^d 𝕀`.
pub fn unit_orbit_form<C: ComplexField>(space: &QuaternionicSpace, d: usize) -> Result<Multivector<C>> {
    if 4 * d > space.dim_r() {
        return Err(Error::DegreeOverflow { requested: 4 * d, max: space.dim_r() });
    }
    let squares: Vec<Multivector<C>> = Generator::ALL
        .iter()
        .map(|&g| {
            let w: Multivector<C> = kaehler_form(space, &space.structure(g));
            w.wedge(&w).expect("same space")
        })
        .collect();
    let sum = squares[0].add(&squares[1]).add(&squares[2]);
    Ok(sum.wedge_power(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior_algebra::inner_product;
    use crate::quaternion_space::{induced_structure, make_standard_space};
    use crate::scalar::Field;
    use crate::scalar::{rat, GaussRat, Rational};

    type M = Multivector<GaussRat>;

    fn vol(d: usize) -> M {
        M::basis(d, &(0..d).collect::<Vec<_>>())
    }

    #[test]
    fn lefschetz_examples() {
        let s = make_standard_space(1).unwrap();
        let li = lefschetz(&s, &s.structure::<Rational>(Generator::I)).unwrap();
        let wi: M = kaehler_form(&s, &s.structure(Generator::I));
        assert_eq!(li.apply(&M::one(4)).unwrap(), wi);
        assert_eq!(li.apply(&wi).unwrap(), vol(4).scale(&GaussRat::int(2, 0)));
        assert!(li.apply(&vol(4)).unwrap().is_zero());
    }

    #[test]
    fn dual_lefschetz_examples() {
        let s = make_standard_space(1).unwrap();
        let i = s.structure::<Rational>(Generator::I);
        let lam = dual_lefschetz(&s, &i).unwrap();
        let wi: M = kaehler_form(&s, &i);
        assert_eq!(lam.apply(&wi).unwrap(), M::scalar(4, GaussRat::int(2, 0)));
        assert!(lam.apply(&M::one(4)).unwrap().is_zero());
        let a = M::basis(4, &[0]).add(&M::basis(4, &[2]).scale(&GaussRat::int(0, 3)));
        let b = M::basis(4, &[0, 1, 2]).add(&M::basis(4, &[1, 2, 3]).scale(&GaussRat::int(2, -1)));
        let li = lefschetz(&s, &i).unwrap();
        assert_eq!(
            inner_product(&li.apply(&a).unwrap(), &b).unwrap(),
            inner_product(&a, &lam.apply(&b).unwrap()).unwrap()
        );
    }

    #[test]
    fn sl2_triple_from_one_structure() {
        let s = make_standard_space(1).unwrap();
        let i = s.structure::<Rational>(Generator::I);
        let c = lie_closure(vec![lefschetz(&s, &i).unwrap(), dual_lefschetz(&s, &i).unwrap()]).unwrap();
        assert_eq!(c.dimension(), 3);
        assert!(c.is_closed().unwrap());
    }

    #[test]
    fn so5_on_r4_contains_su2() {
        let s = make_standard_space(1).unwrap();
        let c = so5_closure::<Rational>(&s).unwrap();
        assert_eq!(c.dimension(), 10);
        for op in s.su2().operators() {
            let coords = c.coordinates(op).expect("ad operator lies in the closure");
            assert_eq!(&c.combine(&coords).unwrap(), op);
        }
    }

    #[test]
    fn degree_functional_examples() {
        let s = make_standard_space(1).unwrap();
        let i = s.structure::<Rational>(Generator::I);
        assert_eq!(degree_functional(&s, &i, &M::one(4)).unwrap(), GaussRat::int(2, 0));
        let wj: M = kaehler_form(&s, &s.structure(Generator::J));
        assert_eq!(degree_functional(&s, &i, &wj).unwrap(), GaussRat::zero());
        let asd = M::basis(4, &[0, 1]).sub(&M::basis(4, &[2, 3]));
        assert_eq!(degree_functional(&s, &i, &asd).unwrap(), GaussRat::zero());
        assert_eq!(degree_functional(&s, &i, &M::basis(4, &[0])), Err(Error::OddDegree(1)));
    }

    #[test]
    fn integral_identity_on_small_tori() {
        let s = make_standard_space(1).unwrap();
        let su2 = s.su2();
        let r = verify_integral_identity(&s, &su2, &M::one(4), Some(1)).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone(), r.equal), (GaussRat::int(4, 0), GaussRat::int(4, 0), true));
        let asd = M::basis(4, &[0, 2]).add(&M::basis(4, &[1, 3]));
        let r = verify_integral_identity(&s, &su2, &asd, None).unwrap();
        assert_eq!(r.check, IdentityCheck::DegreeVanishes);
        assert!(r.equal);
        let wi: M = kaehler_form(&s, &s.structure(Generator::I));
        assert!(matches!(verify_integral_identity(&s, &su2, &wi, None), Err(Error::Precondition(_))));
        assert!(verify_integral_identity(&s, &su2, &M::one(4), Some(2)).is_err());
    }

    #[test]
    fn unit_orbit_form_examples() {
        let s = make_standard_space(1).unwrap();
        assert_eq!(unit_orbit_form::<GaussRat>(&s, 0).unwrap(), M::one(4));
        assert_eq!(unit_orbit_form::<GaussRat>(&s, 1).unwrap(), vol(4).scale(&GaussRat::int(6, 0)));
        assert!(unit_orbit_form::<GaussRat>(&s, 2).is_err());
        let s8 = make_standard_space(2).unwrap();
        let f: M = unit_orbit_form(&s8, 1).unwrap();
        let degs: Vec<GaussRat> =
            Generator::ALL.iter().map(|&g| degree_functional(&s8, &s8.structure(g), &f).unwrap()).collect();
        assert_eq!(degs[0], degs[1]);
        assert_eq!(degs[1], degs[2]);
        let l = induced_structure(&s8, rat(3, 5), rat(0, 1), rat(4, 5)).unwrap();
        assert_eq!(degree_functional(&s8, &l, &f).unwrap(), degs[0]);
    }
}

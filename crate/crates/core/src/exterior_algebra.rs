//! Exterior algebra of `(R^d)^*` with complex coefficients.
//!
//! A [`Blade`] is a strictly increasing index set stored as a bitmask.
//! Within a degree, blades are ordered lexicographically; across degrees
//! by degree. [`ExteriorBasis`] fixes that ordering and is shared through a
//! process-wide cache.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quaternion_space::{QuaternionicSpace, HARD_DIM_LIMIT};
use crate::scalar::{ComplexField, Field, Mode, Real};
use crate::wirtinger::LinearSubspace;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Blade(u32);

impl Blade {
    pub const EMPTY: Blade = Blade(0);

    /// Build from strictly increasing indices; panics otherwise.
    pub fn from_sorted(indices: &[usize]) -> Blade {
        Self::from_indices(indices).expect("blade indices must be strictly increasing and < 32")
    }

    pub fn from_indices(indices: &[usize]) -> Result<Blade> {
        let mut mask = 0u32;
        let mut last: Option<usize> = None;
        for &i in indices {
            if i >= 32 || last.is_some_and(|l| l >= i) {
                return Err(Error::Parse(format!("blade indices {indices:?} are not strictly increasing")));
            }
            mask |= 1 << i;
            last = Some(i);
        }
        Ok(Blade(mask))
    }

    pub fn from_mask(mask: u32) -> Blade {
        Blade(mask)
    }

    pub fn mask(self) -> u32 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|i| self.0 & (1 << i) != 0).collect()
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn max_index(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    /// Complement inside `{0, .., dim_r - 1}`.
    pub fn complement(self, dim_r: usize) -> Blade {
        let full = if dim_r == 32 { u32::MAX } else { (1u32 << dim_r) - 1 };
        Blade(full & !self.0)
    }

    /// `e^A ∧ e^B = sign · e^{A∪B}`, or `None` when the blades overlap.
    /// The flag is `true` for a minus sign.
    pub fn wedge(self, other: Blade) -> Option<(bool, Blade)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0u32;
        let mut rest = other.0;
        while rest != 0 {
            let b = rest.trailing_zeros();
            let above = if b == 31 { 0 } else { self.0 >> (b + 1) };
            swaps += above.count_ones();
            rest &= rest - 1;
        }
        Some((swaps % 2 == 1, Blade(self.0 | other.0)))
    }
}

impl Ord for Blade {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            // Same degree: lexicographic on the sorted index lists. The first
            // differing index belongs to the lowest bit of the symmetric
            // difference; whoever owns it is smaller.
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Blade {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{:?}", self.indices())
    }
}

/// Ordered blades of every degree for a fixed ambient dimension.
#[derive(Debug)]
pub struct ExteriorBasis {
    dim_r: usize,
    by_degree: Vec<Vec<Blade>>,
    position: Vec<u32>,
}

impl ExteriorBasis {
    fn build(dim_r: usize) -> Self {
        assert!(dim_r <= HARD_DIM_LIMIT, "exterior basis dimension {dim_r} above hard limit");
        let mut by_degree = vec![Vec::new(); dim_r + 1];
        let mut current = Vec::new();
        fn rec(start: usize, dim_r: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<Blade>>) {
            out[current.len()].push(Blade::from_sorted(current));
            for i in start..dim_r {
                current.push(i);
                rec(i + 1, dim_r, current, out);
                current.pop();
            }
        }
        rec(0, dim_r, &mut current, &mut by_degree);
        for blades in by_degree.iter_mut() {
            blades.sort();
        }
        let mut position = vec![0u32; 1 << dim_r];
        for blades in &by_degree {
            for (i, b) in blades.iter().enumerate() {
                position[b.mask() as usize] = i as u32;
            }
        }
        ExteriorBasis { dim_r, by_degree, position }
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn blades(&self, degree: usize) -> &[Blade] {
        self.by_degree.get(degree).map_or(&[], Vec::as_slice)
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.blades(degree).len()
    }

    /// Position of `blade` within its degree.
    pub fn index_of(&self, blade: Blade) -> usize {
        self.position[blade.mask() as usize] as usize
    }

    pub fn total_dim(&self) -> usize {
        1 << self.dim_r
    }
}

/// Shared basis for `dim_r`, built on first use.
pub fn exterior_basis(dim_r: usize) -> Arc<ExteriorBasis> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ExteriorBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry(dim_r).or_insert_with(|| Arc::new(ExteriorBasis::build(dim_r))).clone()
}

/// A (possibly inhomogeneous) form with coefficients in `C`. No stored
/// coefficient is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector<C> {
    dim_r: usize,
    terms: BTreeMap<Blade, C>,
}

impl<C: ComplexField> Multivector<C> {
    pub fn zero(dim_r: usize) -> Self {
        Multivector { dim_r, terms: BTreeMap::new() }
    }

    pub fn scalar(dim_r: usize, c: C) -> Self {
        Self::from_terms(dim_r, [(Blade::EMPTY, c)])
    }

    pub fn one(dim_r: usize) -> Self {
        Self::scalar(dim_r, C::one())
    }

    /// `e^{i_1} ∧ ... ∧ e^{i_k}` for strictly increasing indices.
    pub fn basis(dim_r: usize, indices: &[usize]) -> Self {
        assert!(indices.iter().all(|&i| i < dim_r), "index out of range");
        Self::from_terms(dim_r, [(Blade::from_sorted(indices), C::one())])
    }

    /// Sum the given terms; duplicate blades accumulate.
    pub fn from_terms(dim_r: usize, terms: impl IntoIterator<Item = (Blade, C)>) -> Self {
        let mut map: BTreeMap<Blade, C> = BTreeMap::new();
        for (b, c) in terms {
            debug_assert!(b.max_index().is_none_or(|m| m < dim_r));
            map.entry(b).or_insert_with(C::zero).add_assign(&c);
        }
        map.retain(|_, c| !c.is_zero());
        Multivector { dim_r, terms: map }
    }

    pub fn dim_r(&self) -> usize {
        self.dim_r
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, blade: Blade) -> C {
        self.terms.get(&blade).cloned().unwrap_or_else(C::zero)
    }

    pub fn degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(|b| b.degree()).collect()
    }

    /// The common degree of all terms; `None` for zero or mixed forms.
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let degrees = self.degrees();
        (degrees.len() == 1).then(|| *degrees.iter().next().unwrap())
    }

    /// Degree of a homogeneous form, or `fallback` for zero.
    pub fn degree_or(&self, fallback: usize) -> Result<usize> {
        if self.is_zero() {
            return Ok(fallback);
        }
        self.homogeneous_degree()
            .ok_or_else(|| Error::DegreeMismatch(format!("form has mixed degrees {:?}", self.degrees())))
    }

    pub fn part(&self, degree: usize) -> Self {
        Multivector {
            dim_r: self.dim_r,
            terms: self.terms.iter().filter(|(b, _)| b.degree() == degree).map(|(b, c)| (*b, c.clone())).collect(),
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim_r != other.dim_r {
            return Err(Error::DimensionMismatch { left: self.dim_r, right: other.dim_r });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.add(other))
    }

    /// Panics on dimension mismatch; see [`Self::checked_add`].
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim_r, other.dim_r, "multivector dimension mismatch");
        let mut terms = self.terms.clone();
        for (b, c) in &other.terms {
            let e = terms.entry(*b).or_insert_with(C::zero);
            e.add_assign(c);
            if e.is_zero() {
                terms.remove(b);
            }
        }
        Multivector { dim_r: self.dim_r, terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim_r);
        }
        self.map(|c| c.mul(s))
    }

    pub fn scale_re(&self, s: &C::Re) -> Self {
        self.map(|c| c.scale(s))
    }

    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    /// Apply `f` coefficientwise, dropping resulting zeros.
    pub fn map<D: ComplexField>(&self, f: impl Fn(&C) -> D) -> Multivector<D> {
        Multivector {
            dim_r: self.dim_r,
            terms: self.terms.iter().map(|(b, c)| (*b, f(c))).filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut acc: BTreeMap<Blade, C> = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some((negative, blade)) = a.wedge(*b) {
                    let p = x.mul(y);
                    let e = acc.entry(blade).or_insert_with(C::zero);
                    if negative {
                        e.sub_assign(&p);
                    } else {
                        e.add_assign(&p);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Multivector { dim_r: self.dim_r, terms: acc })
    }

    /// `self^k`, with `self^0 = 1`.
    pub fn wedge_power(&self, k: usize) -> Self {
        let mut acc = Self::one(self.dim_r);
        for _ in 0..k {
            acc = acc.wedge(self).expect("same dimension");
        }
        acc
    }

    /// Coefficient of the volume form `e^0 ∧ ... ∧ e^{d-1}`.
    pub fn top_coefficient(&self) -> C {
        self.coefficient(Blade::EMPTY.complement(self.dim_r))
    }

    /// Coefficients of the degree-`k` part in basis order.
    pub fn to_vector(&self, k: usize) -> Vec<C> {
        let basis = exterior_basis(self.dim_r);
        let mut v = vec![C::zero(); basis.dim(k)];
        for (b, c) in self.terms.iter().filter(|(b, _)| b.degree() == k) {
            v[basis.index_of(*b)] = c.clone();
        }
        v
    }

    pub fn from_vector(dim_r: usize, k: usize, v: &[C]) -> Self {
        let basis = exterior_basis(dim_r);
        assert_eq!(v.len(), basis.dim(k), "coefficient vector has the wrong length");
        Multivector {
            dim_r,
            terms: basis.blades(k).iter().zip(v).filter(|(_, c)| !c.is_zero()).map(|(b, c)| (*b, c.clone())).collect(),
        }
    }

    /// Coefficientwise comparison with a tolerance (exact equality in exact
    /// mode).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if self.dim_r != other.dim_r {
            return false;
        }
        let blades: BTreeSet<Blade> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        blades.into_iter().all(|b| {
            let d = self.coefficient(b).sub(&other.coefficient(b));
            d.re().approx_eq(&<C::Re as Field>::zero(), tol) && d.im().approx_eq(&<C::Re as Field>::zero(), tol)
        })
    }

    pub fn mode() -> Mode {
        if C::EXACT {
            Mode::Exact
        } else {
            Mode::Float
        }
    }

    pub fn to_json(&self) -> MultivectorJson {
        MultivectorJson {
            dim_r: self.dim_r,
            mode: Self::mode(),
            terms: self
                .terms
                .iter()
                .map(|(b, c)| TermJson { idx: b.indices(), re: c.re().to_string_repr(), im: c.im().to_string_repr() })
                .collect(),
        }
    }

    pub fn from_json(json: &MultivectorJson) -> Result<Self> {
        if json.mode != Self::mode() {
            return Err(Error::ModeMismatch);
        }
        if json.dim_r > HARD_DIM_LIMIT {
            return Err(Error::DimensionCap { dim_r: json.dim_r, cap: HARD_DIM_LIMIT });
        }
        let mut terms = BTreeMap::new();
        for t in &json.terms {
            if t.idx.iter().any(|&i| i >= json.dim_r) {
                return Err(Error::Parse(format!("index out of range in {:?}", t.idx)));
            }
            let blade = Blade::from_indices(&t.idx)?;
            let c = C::from_parts(C::Re::parse_repr(&t.re)?, C::Re::parse_repr(&t.im)?);
            if terms.insert(blade, c).is_some() {
                return Err(Error::Parse(format!("duplicate term {:?}", t.idx)));
            }
        }
        terms.retain(|_, c: &mut C| !c.is_zero());
        Ok(Multivector { dim_r: json.dim_r, terms })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("multivector serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let json: MultivectorJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json(&json)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultivectorJson {
    pub dim_r: usize,
    pub mode: Mode,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub idx: Vec<usize>,
    pub re: String,
    pub im: String,
}

pub fn wedge<C: ComplexField>(alpha: &Multivector<C>, beta: &Multivector<C>) -> Result<Multivector<C>> {
    alpha.wedge(beta)
}

/// Hermitian inner product induced by the flat metric: blades are
/// orthonormal, linear in the first slot.
pub fn inner_product<C: ComplexField>(alpha: &Multivector<C>, beta: &Multivector<C>) -> Result<C> {
    alpha.check_dim(beta)?;
    let mut acc = C::zero();
    for (b, x) in alpha.terms() {
        if let Some(y) = beta.terms.get(b) {
            acc.add_assign(&x.mul(&y.conj()));
        }
    }
    Ok(acc)
}

/// `∫_T α` for the unit-covolume torus `R^d / Z^d`: the coefficient of the
/// volume form.
pub fn integrate_over_torus<C: ComplexField>(space: &QuaternionicSpace, alpha: &Multivector<C>) -> Result<C> {
    if alpha.dim_r() != space.dim_r() {
        return Err(Error::DimensionMismatch { left: alpha.dim_r(), right: space.dim_r() });
    }
    Ok(alpha.top_coefficient())
}

/// Pull `α` back along the inclusion `W → R^d`, expressed in the dual of the
/// given basis of `W`. The coefficient of `f^T` is `Σ_S α_S det(M[S, T])`
/// where `M[s][j]` is coordinate `s` of basis vector `j`.
pub fn restrict<C: ComplexField>(alpha: &Multivector<C>, w: &LinearSubspace<C::Re>) -> Result<Multivector<C>> {
    if alpha.dim_r() != w.ambient_dim() {
        return Err(Error::DimensionMismatch { left: alpha.dim_r(), right: w.ambient_dim() });
    }
    let m = w.dim();
    if let Some(max) = alpha.degrees().into_iter().max() {
        if max > m {
            return Err(Error::DegreeOverflow { requested: max, max: m });
        }
    }
    let target = exterior_basis(m);
    let basis = w.basis();
    let mut acc: BTreeMap<Blade, C> = BTreeMap::new();
    for (s, c) in alpha.terms() {
        let rows = s.indices();
        let k = rows.len();
        for t in target.blades(k) {
            let cols = t.indices();
            let minor =
                Matrix::from_rows(rows.iter().map(|&r| cols.iter().map(|&j| basis[j][r].clone()).collect()).collect());
            let det = if k == 0 { <C::Re as Field>::one() } else { minor.determinant() };
            if !det.is_zero() {
                acc.entry(*t).or_insert_with(C::zero).add_assign(&c.scale(&det));
            }
        }
    }
    Ok(Multivector::from_terms(m, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion_space::make_standard_space;
    use crate::scalar::{rat, GaussRat};
    use num_complex::Complex64;

    type M = Multivector<GaussRat>;

    #[test]
    fn blade_order_is_degree_then_lex() {
        let b = exterior_basis(4);
        let two: Vec<Vec<usize>> = b.blades(2).iter().map(|x| x.indices()).collect();
        assert_eq!(two, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        for k in 0..=4 {
            for (i, blade) in b.blades(k).iter().enumerate() {
                assert_eq!(b.index_of(*blade), i);
            }
        }
        assert_eq!(b.dim(2), 6);
        assert!(Blade::from_indices(&[2, 1]).is_err());
    }

    #[test]
    fn wedge_signs() {
        let e01 = M::basis(4, &[0, 1]);
        let e23 = M::basis(4, &[2, 3]);
        assert_eq!(e01.wedge(&e23).unwrap(), M::basis(4, &[0, 1, 2, 3]));
        let e1 = M::basis(4, &[1]);
        let e0 = M::basis(4, &[0]);
        assert_eq!(e1.wedge(&e0).unwrap(), M::basis(4, &[0, 1]).neg());
        let e13 = M::basis(4, &[1, 3]);
        let e02 = M::basis(4, &[0, 2]);
        assert_eq!(e13.wedge(&e02).unwrap(), M::basis(4, &[0, 1, 2, 3]).neg());
        assert!(e01.wedge(&e0).unwrap().is_zero());
    }

    #[test]
    fn kaehler_square_is_twice_volume() {
        let w = M::basis(4, &[0, 1]).add(&M::basis(4, &[2, 3]));
        assert_eq!(w.wedge(&w).unwrap(), M::basis(4, &[0, 1, 2, 3]).scale(&GaussRat::int(2, 0)));
        let s = make_standard_space(1).unwrap();
        assert_eq!(integrate_over_torus(&s, &w.wedge(&w).unwrap()).unwrap(), GaussRat::int(2, 0));
    }

    #[test]
    fn inner_product_is_hermitian() {
        let a = M::from_terms(4, [(Blade::from_sorted(&[0]), GaussRat::int(1, 2))]);
        let b = M::from_terms(4, [(Blade::from_sorted(&[0]), GaussRat::int(0, 1))]);
        assert_eq!(inner_product(&a, &b).unwrap(), GaussRat::int(2, -1));
        assert_eq!(inner_product(&a, &a).unwrap(), GaussRat::int(5, 0));
        assert!(inner_product(&a, &M::zero(8)).is_err());
    }

    #[test]
    fn restriction_to_coordinate_plane() {
        let w = LinearSubspace::new(
            4,
            vec![vec![rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1), rat(0, 1), rat(0, 1)]],
        )
        .unwrap();
        let omega = M::basis(4, &[0, 1]).add(&M::basis(4, &[2, 3]));
        assert_eq!(restrict(&omega, &w).unwrap(), M::basis(2, &[0, 1]));
        let vol = M::basis(4, &[0, 1, 2, 3]);
        assert!(matches!(restrict(&vol, &w), Err(Error::DegreeOverflow { requested: 4, max: 2 })));
    }

    #[test]
    fn restriction_of_one_form_is_evaluation() {
        let w = LinearSubspace::new(3, vec![vec![rat(1, 1), rat(2, 1), rat(3, 1)]]).unwrap();
        let xi = M::from_terms(
            3,
            [(Blade::from_sorted(&[0]), GaussRat::int(1, 0)), (Blade::from_sorted(&[2]), GaussRat::int(0, 1))],
        );
        assert_eq!(restrict(&xi, &w).unwrap(), M::from_terms(1, [(Blade::from_sorted(&[0]), GaussRat::int(1, 3))]));
    }

    #[test]
    fn json_round_trip_exact_and_float() {
        let a = M::from_terms(
            4,
            [
                (Blade::from_sorted(&[1, 3]), GaussRat::new(rat(-1, 3), rat(2, 1))),
                (Blade::from_sorted(&[0]), GaussRat::int(5, 0)),
            ],
        );
        let s = a.to_json_string();
        assert!(s.find("[0]").unwrap() < s.find("[1,3]").unwrap());
        assert_eq!(M::from_json_str(&s).unwrap(), a);
        assert_eq!(Multivector::<Complex64>::from_json_str(&s), Err(Error::ModeMismatch));
        let f = a.map(GaussRat::to_complex64);
        let fs = f.to_json_string();
        assert_eq!(Multivector::<Complex64>::from_json_str(&fs).unwrap(), f);
        let bad = r#"{"dim_r":4,"mode":"exact","terms":[{"idx":[1,0],"re":"1","im":"0"}]}"#;
        assert!(M::from_json_str(bad).is_err());
    }

    #[test]
    fn vector_round_trip() {
        let a = M::from_terms(5, [(Blade::from_sorted(&[1, 4]), GaussRat::int(3, 1))]);
        let v = a.to_vector(2);
        assert_eq!(v.len(), 10);
        assert_eq!(M::from_vector(5, 2, &v), a);
    }
}

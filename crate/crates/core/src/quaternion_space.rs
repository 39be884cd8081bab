//! Quaternionic vector spaces `R^{4n} = H^n` with the standard hypercomplex
//! structure.
//!
//! Basis convention: each quaternion block is ordered `(1, i, j, k)` and
//! `I`, `J`, `K` act by left multiplication, so all three matrices are
//! integer valued and `I∘J = K`.

use std::sync::{Arc, OnceLock};

use rand::Rng;

use crate::error::{Error, Result};
use crate::exterior_algebra::{Blade, Multivector};
use crate::linalg::Matrix;
use crate::scalar::{rat, ComplexField, Field, Rational, Real, FLOAT_NORM_TOL};
use crate::su2_action::Su2Action;

/// Default guard on the real dimension (`n ≤ 4`).
pub const DEFAULT_DIM_CAP: usize = 16;
/// Absolute ceiling for any configured cap; blades are stored as bitmasks
/// and the basis lookup table has `2^dim_r` entries.
pub const HARD_DIM_LIMIT: usize = 20;
/// Environment variable overriding the real-dimension guard.
pub const DIM_CAP_ENV: &str = "TRIANALYTIC_DIM_CAP";

/// Left multiplication by `i`, `j`, `k` on a quaternion `(1, i, j, k)`,
/// as `(target, sign)` per source basis vector.
const LEFT_MUL: [[(usize, i64); 4]; 3] = [
    // i·1 = i, i·i = -1, i·j = k, i·k = -j
    [(1, 1), (0, -1), (3, 1), (2, -1)],
    // j·1 = j, j·i = -k, j·j = -1, j·k = i
    [(2, 1), (3, -1), (0, -1), (1, 1)],
    // k·1 = k, k·i = j, k·j = -i, k·k = -1
    [(3, 1), (2, 1), (1, -1), (0, -1)],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    I,
    J,
    K,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::I, Generator::J, Generator::K];

    pub fn coefficients(self) -> [i64; 3] {
        match self {
            Generator::I => [1, 0, 0],
            Generator::J => [0, 1, 0],
            Generator::K => [0, 0, 1],
        }
    }
}

#[derive(Debug)]
pub struct QuaternionicSpace {
    n: usize,
    structures: [Matrix<Rational>; 3],
    su2: OnceLock<Arc<Su2Action<Rational>>>,
}

impl Clone for QuaternionicSpace {
    fn clone(&self) -> Self {
        QuaternionicSpace { n: self.n, structures: self.structures.clone(), su2: OnceLock::new() }
    }
}

impl PartialEq for QuaternionicSpace {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

/// Read the real-dimension cap from the environment, falling back to the
/// default.
pub fn dim_cap_from_env() -> Result<usize> {
    match std::env::var(DIM_CAP_ENV) {
        Ok(v) => {
            let cap: usize =
                v.trim().parse().map_err(|_| Error::Parse(format!("{DIM_CAP_ENV}={v:?} is not a dimension")))?;
            if cap > HARD_DIM_LIMIT {
                return Err(Error::DimensionCap { dim_r: cap, cap: HARD_DIM_LIMIT });
            }
            Ok(cap)
        }
        Err(_) => Ok(DEFAULT_DIM_CAP),
    }
}

/// `make_standard_space` with the default cap.
pub fn make_standard_space(n: usize) -> Result<QuaternionicSpace> {
    QuaternionicSpace::with_cap(n, DEFAULT_DIM_CAP)
}

impl QuaternionicSpace {
    pub fn with_cap(n: usize, dim_cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let cap = dim_cap.min(HARD_DIM_LIMIT);
        if 4 * n > cap {
            return Err(Error::DimensionCap { dim_r: 4 * n, cap });
        }
        let structures = [0, 1, 2].map(|g| {
            let mut m = Matrix::zeros(4 * n, 4 * n);
            for block in 0..n {
                for (src, &(dst, sign)) in LEFT_MUL[g].iter().enumerate() {
                    m[(4 * block + dst, 4 * block + src)] = Rational::from_i64(sign);
                }
            }
            m
        });
        Ok(QuaternionicSpace { n, structures, su2: OnceLock::new() })
    }

    /// Build from a real dimension (must be a positive multiple of 4).
    pub fn from_real_dim(dim_r: usize, dim_cap: usize) -> Result<Self> {
        if dim_r == 0 || !dim_r.is_multiple_of(4) {
            return Err(Error::NotQuaternionic(dim_r));
        }
        Self::with_cap(dim_r / 4, dim_cap)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim_r(&self) -> usize {
        4 * self.n
    }

    pub fn generator_matrix(&self, g: Generator) -> &Matrix<Rational> {
        &self.structures[g as usize]
    }

    /// The flat metric on the standard basis.
    pub fn metric<R: Real>(&self, u: &[R], v: &[R]) -> R {
        assert_eq!(u.len(), self.dim_r());
        assert_eq!(v.len(), self.dim_r());
        let mut acc = R::zero();
        for (a, b) in u.iter().zip(v) {
            acc.add_assign(&a.mul(b));
        }
        acc
    }

    pub fn structure<R: Real>(&self, g: Generator) -> InducedComplexStructure<R> {
        let [a, b, c] = g.coefficients().map(R::from_i64);
        induced_structure(self, a, b, c).expect("basis structures lie on the sphere")
    }

    /// Exact operators for the su(2) action, built once per space.
    pub fn su2(&self) -> Arc<Su2Action<Rational>> {
        self.su2
            .get_or_init(|| Arc::new(Su2Action::new(self).expect("su(2) self-test failed on the standard space")))
            .clone()
    }

    /// `I² = J² = K² = −Id` and `I∘J = −J∘I = K`, exactly.
    pub fn quaternion_relations_hold(&self) -> bool {
        let [i, j, k] = &self.structures;
        let minus_id = Matrix::identity(self.dim_r()).scale(&Rational::from_i64(-1));
        i.mul(i) == minus_id
            && j.mul(j) == minus_id
            && k.mul(k) == minus_id
            && i.mul(j) == *k
            && j.mul(i) == k.scale(&Rational::from_i64(-1))
    }

    /// `g(Lu, Lv) = g(u, v)` on all basis pairs for `I`, `J`, `K`.
    pub fn structures_are_orthogonal(&self) -> bool {
        self.structures.iter().all(|m| m.transpose().mul(m) == Matrix::identity(self.dim_r()))
    }
}

/// An induced complex structure `L = aI + bJ + cK` with `a² + b² + c² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedComplexStructure<R> {
    coefficients: [R; 3],
    matrix: Matrix<R>,
}

impl<R: Real> InducedComplexStructure<R> {
    pub fn coefficients(&self) -> &[R; 3] {
        &self.coefficients
    }

    pub fn matrix(&self) -> &Matrix<R> {
        &self.matrix
    }

    pub fn dim_r(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &[R]) -> Vec<R> {
        self.matrix.apply(v)
    }

    /// `L² = −Id` within the mode tolerance.
    pub fn squares_to_minus_identity(&self) -> bool {
        let sq = self.matrix.mul(&self.matrix);
        let n = sq.rows();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let target = if i == j { R::from_i64(-1) } else { R::zero() };
                sq[(i, j)].approx_eq(&target, FLOAT_NORM_TOL * 10.0)
            })
        })
    }
}

pub fn induced_structure<R: Real>(space: &QuaternionicSpace, a: R, b: R, c: R) -> Result<InducedComplexStructure<R>> {
    let norm = a.mul(&a).add(&b.mul(&b)).add(&c.mul(&c));
    if !norm.approx_eq(&R::one(), FLOAT_NORM_TOL) {
        return Err(Error::NormViolation(norm.to_string_repr()));
    }
    let d = space.dim_r();
    let mut matrix = Matrix::zeros(d, d);
    for (coef, g) in [&a, &b, &c].into_iter().zip(Generator::ALL) {
        if coef.is_zero() && R::EXACT {
            continue;
        }
        let m = space.generator_matrix(g).map(R::from_rational);
        matrix = matrix.add(&m.scale(coef));
    }
    Ok(InducedComplexStructure { coefficients: [a, b, c], matrix })
}

/// Coefficients `ω_L(e_a, e_b) = g(L e_a, e_b)` on increasing pairs.
pub fn kaehler_coefficients<R: Real>(l: &InducedComplexStructure<R>) -> Vec<(Blade, R)> {
    let d = l.dim_r();
    let mut out = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            let v = l.matrix()[(b, a)].clone();
            if !v.is_zero() {
                out.push((Blade::from_sorted(&[a, b]), v));
            }
        }
    }
    out
}

/// The Kähler form `ω_L(u, v) = g(Lu, v)`.
pub fn kaehler_form<C: ComplexField>(space: &QuaternionicSpace, l: &InducedComplexStructure<C::Re>) -> Multivector<C> {
    assert_eq!(space.dim_r(), l.dim_r());
    Multivector::from_terms(space.dim_r(), kaehler_coefficients(l).into_iter().map(|(blade, v)| (blade, C::from_re(v))))
}

/// `Ω = ω_J + i·ω_K`.
pub fn holomorphic_symplectic_form<C: ComplexField>(space: &QuaternionicSpace) -> Multivector<C> {
    let omega_j: Multivector<C> = kaehler_form(space, &space.structure(Generator::J));
    let omega_k: Multivector<C> = kaehler_form(space, &space.structure(Generator::K));
    omega_j.add(&omega_k.scale(&C::imag_unit()))
}

/// Inverse stereographic projection of the rational point `(p, q)`: a
/// rational point on the unit sphere.
pub fn rational_sphere_point(p: &Rational, q: &Rational) -> [Rational; 3] {
    let s = p * p + q * q;
    let denom = &s + Rational::from_i64(1);
    [Rational::from_i64(2) * p / &denom, Rational::from_i64(2) * q / &denom, (&s - Rational::from_i64(1)) / &denom]
}

/// A deterministic list of distinct rational points on the unit sphere,
/// skipping the coordinate poles.
pub fn sample_rational_sphere(count: usize) -> Vec<[Rational; 3]> {
    let mut out: Vec<[Rational; 3]> = Vec::with_capacity(count);
    let mut radius = 1i64;
    while out.len() < count {
        for num in -radius..=radius {
            for (p, q) in
                [(rat(num, radius), rat(radius - num.abs(), radius + 1)), (rat(radius, num.abs() + 2), rat(num, 3))]
            {
                let pt = rational_sphere_point(&p, &q);
                let is_pole = pt.iter().filter(|x| Field::is_zero(*x)).count() == 2;
                if !is_pole && !out.contains(&pt) {
                    out.push(pt);
                    if out.len() == count {
                        return out;
                    }
                }
            }
        }
        radius += 1;
    }
    out
}

pub fn sample_rational_structures(space: &QuaternionicSpace, count: usize) -> Vec<InducedComplexStructure<Rational>> {
    sample_rational_sphere(count)
        .into_iter()
        .map(|[a, b, c]| induced_structure(space, a, b, c).expect("sampled point lies on the sphere"))
        .collect()
}

/// A uniformly random float point on the unit sphere (rejection sampling).
pub fn random_float_sphere_point<G: Rng + ?Sized>(rng: &mut G) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if n2 > 1e-6 && n2 <= 1.0 {
            let n = n2.sqrt();
            return v.map(|x| x / n);
        }
    }
}

/// The rows of the rotation matrix of the rational quaternion `q`: a
/// positively oriented rational orthonormal frame of `R^3`.
pub fn rational_frame(q: [i64; 4]) -> Result<[[Rational; 3]; 3]> {
    let [w, x, y, z] = q.map(Rational::from_i64);
    let n = &w * &w + &x * &x + &y * &y + &z * &z;
    if Field::is_zero(&n) {
        return Err(Error::Precondition("zero quaternion has no rotation".into()));
    }
    let two = Rational::from_i64(2);
    let m = [
        [&w * &w + &x * &x - &y * &y - &z * &z, &two * (&x * &y - &w * &z), &two * (&x * &z + &w * &y)],
        [&two * (&x * &y + &w * &z), &w * &w - &x * &x + &y * &y - &z * &z, &two * (&y * &z - &w * &x)],
        [&two * (&x * &z - &w * &y), &two * (&y * &z + &w * &x), &w * &w - &x * &x - &y * &y + &z * &z],
    ];
    Ok(m.map(|row| row.map(|v| v / &n)))
}

/// An induced triple `(L1, L2, L3)` with `L1∘L2 = −L2∘L1 = L3`, from the
/// rotation of `q`.
pub fn rational_triple(space: &QuaternionicSpace, q: [i64; 4]) -> Result<[InducedComplexStructure<Rational>; 3]> {
    let frame = rational_frame(q)?;
    let [r0, r1, r2] = frame;
    let build = |r: [Rational; 3]| {
        let [a, b, c] = r;
        induced_structure(space, a, b, c)
    };
    Ok([build(r0)?, build(r1)?, build(r2)?])
}

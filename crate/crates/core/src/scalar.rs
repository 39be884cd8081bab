//! Coefficient fields.
//!
//! Exact mode works over the rationals (real coefficients) and the Gaussian
//! rationals (complex coefficients); float mode over `f64` and `Complex64`.
//! Generic code is written against [`Field`], [`Real`] and [`ComplexField`],
//! so exact and float values can never be combined by accident. The dynamic
//! [`Scalar`] carries an explicit mode tag for I/O and reports.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Absolute tolerance used by float mode for zero tests.
pub const FLOAT_ZERO_TOL: f64 = 1e-9;
/// Tolerance used by float mode for the unit-sphere check.
pub const FLOAT_NORM_TOL: f64 = 1e-12;

pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    /// Exact zero test in exact mode, tolerance test in float mode.
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_rational(q: &Rational) -> Self;
    /// Larger is a better pivot. Exact fields take the first nonzero entry.
    fn pivot_score(&self) -> f64;

    fn add_assign(&mut self, other: &Self) {
        *self = Field::add(self, other);
    }
    fn sub_assign(&mut self, other: &Self) {
        *self = Field::sub(self, other);
    }
}

pub trait Real: Field + PartialOrd {
    /// The complexification used for complex-valued forms.
    type Complex: ComplexField<Re = Self>;

    fn to_f64(&self) -> f64;
    /// Equality up to `tol` in float mode; `tol` is ignored in exact mode.
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;
    /// Rescale a nonzero direction to a canonical representative.
    fn normalize_direction(v: &mut [Self]);
    fn to_string_repr(&self) -> String;
    fn parse_repr(s: &str) -> Result<Self>;
}

pub trait ComplexField: Field {
    type Re: Real;

    fn from_parts(re: Self::Re, im: Self::Re) -> Self;
    fn re(&self) -> Self::Re;
    fn im(&self) -> Self::Re;
    fn conj(&self) -> Self;
    fn scale(&self, r: &Self::Re) -> Self;

    fn from_re(re: Self::Re) -> Self {
        Self::from_parts(re, <Self::Re as Field>::zero())
    }
    fn imag_unit() -> Self {
        Self::from_parts(<Self::Re as Field>::zero(), <Self::Re as Field>::one())
    }
}

// ---------------------------------------------------------------------------
// Rationals

impl Field for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        if Zero::is_zero(self) || Zero::is_zero(other) {
            return Zero::zero();
        }
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }
    fn pivot_score(&self) -> f64 {
        if Zero::is_zero(self) {
            0.0
        } else {
            1.0
        }
    }
    fn add_assign(&mut self, other: &Self) {
        if !Zero::is_zero(other) {
            *self += other;
        }
    }
    fn sub_assign(&mut self, other: &Self) {
        if !Zero::is_zero(other) {
            *self -= other;
        }
    }
}

impl Real for Rational {
    type Complex = GaussRat;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn normalize_direction(v: &mut [Self]) {
        // Clear denominators, divide by the content, make the first nonzero
        // entry positive.
        let mut lcm = BigInt::one();
        for x in v.iter() {
            lcm = lcm.lcm(x.denom());
        }
        let mut ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
        let mut g = BigInt::zero();
        for x in &ints {
            g = g.gcd(x);
        }
        if g.is_zero() {
            return;
        }
        let first_negative = ints.iter().find(|x| !x.is_zero()).map(|x| x.is_negative()).unwrap_or(false);
        if first_negative {
            g = -g;
        }
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
        for (slot, x) in v.iter_mut().zip(ints) {
            *slot = Rational::from_integer(x);
        }
    }
    fn to_string_repr(&self) -> String {
        format_rational(self)
    }
    fn parse_repr(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        let q = BigInt::from_str(q.trim()).map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Rational::new(p, q))
    } else {
        BigInt::from_str(t).map(Rational::from_integer).map_err(|_| Error::Parse(format!("bad rational {s:?}")))
    }
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

// ---------------------------------------------------------------------------
// f64

impl Field for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        self.abs() <= FLOAT_ZERO_TOL
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_rational(q: &Rational) -> Self {
        Real::to_f64(q)
    }
    fn pivot_score(&self) -> f64 {
        self.abs()
    }
}

impl Real for f64 {
    type Complex = Complex64;

    fn to_f64(&self) -> f64 {
        *self
    }
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
    fn normalize_direction(v: &mut [Self]) {
        let pivot = v.iter().copied().fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
        if pivot != 0.0 {
            for x in v.iter_mut() {
                *x /= pivot;
            }
        }
    }
    fn to_string_repr(&self) -> String {
        format!("{self}")
    }
    fn parse_repr(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains('/') {
            return parse_rational(t).map(|q| Real::to_f64(&q));
        }
        t.parse::<f64>().map_err(|_| Error::Parse(format!("bad float {s:?}")))
    }
}

// ---------------------------------------------------------------------------
// Gaussian rationals

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRat {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussRat { re, im }
    }

    pub fn int(re: i64, im: i64) -> Self {
        GaussRat { re: Rational::from_i64(re), im: Rational::from_i64(im) }
    }

    pub fn is_real(&self) -> bool {
        Zero::is_zero(&self.im)
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(Real::to_f64(&self.re), Real::to_f64(&self.im))
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let re_zero = Zero::is_zero(&self.re);
        let im_zero = Zero::is_zero(&self.im);
        match (re_zero, im_zero) {
            (_, true) => write!(f, "{}", format_rational(&self.re)),
            (true, false) => write!(f, "{}i", format_rational(&self.im)),
            (false, false) => {
                if self.im.is_negative() {
                    write!(f, "{}-{}i", format_rational(&self.re), format_rational(&-&self.im))
                } else {
                    write!(f, "{}+{}i", format_rational(&self.re), format_rational(&self.im))
                }
            }
        }
    }
}

impl Field for GaussRat {
    const EXACT: bool = true;

    fn zero() -> Self {
        GaussRat { re: Zero::zero(), im: Zero::zero() }
    }
    fn one() -> Self {
        GaussRat { re: One::one(), im: Zero::zero() }
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.re) && Zero::is_zero(&self.im)
    }
    fn add(&self, o: &Self) -> Self {
        GaussRat { re: Field::add(&self.re, &o.re), im: Field::add(&self.im, &o.im) }
    }
    fn sub(&self, o: &Self) -> Self {
        GaussRat { re: Field::sub(&self.re, &o.re), im: Field::sub(&self.im, &o.im) }
    }
    fn mul(&self, o: &Self) -> Self {
        if self.is_real() && o.is_real() {
            return GaussRat { re: Field::mul(&self.re, &o.re), im: Zero::zero() };
        }
        let re = Field::sub(&Field::mul(&self.re, &o.re), &Field::mul(&self.im, &o.im));
        let im = Field::add(&Field::mul(&self.re, &o.im), &Field::mul(&self.im, &o.re));
        GaussRat { re, im }
    }
    fn div(&self, o: &Self) -> Self {
        if o.is_real() {
            return GaussRat { re: &self.re / &o.re, im: &self.im / &o.re };
        }
        let norm = &o.re * &o.re + &o.im * &o.im;
        let num = Field::mul(self, &o.conj());
        GaussRat { re: num.re / &norm, im: num.im / &norm }
    }
    fn neg(&self) -> Self {
        GaussRat { re: -&self.re, im: -&self.im }
    }
    fn from_i64(v: i64) -> Self {
        GaussRat { re: Rational::from_i64(v), im: Zero::zero() }
    }
    fn from_rational(q: &Rational) -> Self {
        GaussRat { re: q.clone(), im: Zero::zero() }
    }
    fn pivot_score(&self) -> f64 {
        if Field::is_zero(self) {
            0.0
        } else {
            1.0
        }
    }
    fn add_assign(&mut self, o: &Self) {
        Field::add_assign(&mut self.re, &o.re);
        Field::add_assign(&mut self.im, &o.im);
    }
    fn sub_assign(&mut self, o: &Self) {
        Field::sub_assign(&mut self.re, &o.re);
        Field::sub_assign(&mut self.im, &o.im);
    }
}

impl ComplexField for GaussRat {
    type Re = Rational;

    fn from_parts(re: Rational, im: Rational) -> Self {
        GaussRat { re, im }
    }
    fn re(&self) -> Rational {
        self.re.clone()
    }
    fn im(&self) -> Rational {
        self.im.clone()
    }
    fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -&self.im }
    }
    fn scale(&self, r: &Rational) -> Self {
        GaussRat { re: Field::mul(&self.re, r), im: Field::mul(&self.im, r) }
    }
}

// ---------------------------------------------------------------------------
// Complex64

impl Field for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.norm() <= FLOAT_ZERO_TOL
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_rational(q: &Rational) -> Self {
        Complex64::new(Real::to_f64(q), 0.0)
    }
    fn pivot_score(&self) -> f64 {
        self.norm()
    }
}

impl ComplexField for Complex64 {
    type Re = f64;

    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn re(&self) -> f64 {
        self.re
    }
    fn im(&self) -> f64 {
        self.im
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn scale(&self, r: &f64) -> Self {
        self * r
    }
}

/// Format a complex coefficient the way reports print it.
pub fn format_complex<C: ComplexField>(c: &C) -> String {
    let re = c.re();
    let im = c.im();
    if Field::is_zero(&im) {
        return re.to_string_repr();
    }
    if Field::is_zero(&re) {
        return format!("{}i", im.to_string_repr());
    }
    if im < <C::Re as Field>::zero() {
        format!("{}-{}i", re.to_string_repr(), Field::neg(&im).to_string_repr())
    } else {
        format!("{}+{}i", re.to_string_repr(), im.to_string_repr())
    }
}

// ---------------------------------------------------------------------------
// Mode-tagged scalar

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float => f.write_str("float"),
        }
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// A coefficient carrying its arithmetic mode.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(GaussRat),
    Float(Complex64),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    /// Explicit downgrade from exact to float.
    pub fn to_float(&self) -> Scalar {
        match self {
            Scalar::Exact(q) => Scalar::Float(q.to_complex64()),
            Scalar::Float(z) => Scalar::Float(*z),
        }
    }

    fn combine(
        &self,
        other: &Scalar,
        exact: impl Fn(&GaussRat, &GaussRat) -> GaussRat,
        float: impl Fn(&Complex64, &Complex64) -> Complex64,
    ) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(exact(a, b))),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(float(a, b))),
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.combine(other, Field::add, Field::add)
    }
    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.combine(other, Field::sub, Field::sub)
    }
    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.combine(other, Field::mul, Field::mul)
    }
    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        let divisor_zero = match other {
            Scalar::Exact(b) => Field::is_zero(b),
            Scalar::Float(b) => b.norm() == 0.0,
        };
        if divisor_zero {
            return Err(Error::Precondition("division by zero".into()));
        }
        self.combine(other, Field::div, Field::div)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(q) => write!(f, "{q}"),
            Scalar::Float(z) => write!(f, "{}", format_complex(z)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings_round_trip() {
        for s in ["1", "-3/4", "0", "123456789012345678901234567891/2"] {
            let q = parse_rational(s).unwrap();
            assert_eq!(format_rational(&q), s);
        }
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&parse_rational("2/4").unwrap()), "1/2");
    }

    #[test]
    fn gaussian_arithmetic_is_exact() {
        let a = GaussRat::new(rat(1, 2), rat(1, 3));
        let b = GaussRat::new(rat(-2, 5), rat(3, 7));
        let q = Field::div(&Field::mul(&a, &b), &b);
        assert_eq!(q, a);
        let i = GaussRat::imag_unit();
        assert_eq!(Field::mul(&i, &i), GaussRat::int(-1, 0));
        assert_eq!(format!("{}", GaussRat::new(rat(1, 2), rat(-1, 1))), "1/2-1i");
    }

    #[test]
    fn modes_never_mix_silently() {
        let e = Scalar::Exact(GaussRat::int(1, 0));
        let f = Scalar::Float(Complex64::new(1.0, 0.0));
        assert_eq!(e.checked_add(&f), Err(Error::ModeMismatch));
        assert_eq!(e.to_float().checked_add(&f).unwrap(), Scalar::Float(Complex64::new(2.0, 0.0)));
        assert!(e.checked_div(&Scalar::Exact(GaussRat::zero())).is_err());
    }

    #[test]
    fn direction_normalization() {
        let mut v = vec![rat(-1, 2), rat(0, 1), rat(3, 4)];
        Rational::normalize_direction(&mut v);
        assert_eq!(v, vec![rat(2, 1), rat(0, 1), rat(-3, 1)]);
    }
}

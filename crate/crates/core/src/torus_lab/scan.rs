use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior_algebra::{exterior_basis, Multivector};
use crate::lefschetz_so5::degree_functional;
use crate::quaternion_space::Generator;
use crate::scalar::{format_rational, Field, GaussRat, Rational};
use crate::su2_action::{annihilator_structures, Annihilator};

use super::FlatTorus;

/// Largest number of lattice classes a scan will enumerate.
pub const SCAN_GUARD: u128 = 1_000_000;

const CHUNK: u64 = 256;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    pub degree: usize,
    pub bound: i64,
    pub invariant: u64,
    pub antipodal: u64,
    pub empty: u64,
    pub violations: u64,
    pub directions: Vec<[i64; 3]>,
}

#[derive(Default)]
struct Tally {
    invariant: u64,
    antipodal: u64,
    empty: u64,
    violations: u64,
    directions: BTreeSet<[i64; 3]>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.invariant += other.invariant;
        self.antipodal += other.antipodal;
        self.empty += other.empty;
        self.violations += other.violations;
        self.directions.extend(other.directions);
        self
    }
}

fn integral(q: &Rational) -> i64 {
    i64::try_from(q.to_integer()).expect("normalized directions have small integer entries")
}

/// Classify every class in the degree slice with coefficients in
/// `[-bound, bound]` by its annihilator in `su(2)`.
pub fn genericity_scan(torus: &FlatTorus, degree: usize, bound: i64) -> Result<ScanReport> {
    let d = torus.dim_r();
    if degree > d {
        return Err(Error::DegreeOverflow { requested: degree, max: d });
    }
    if degree % 2 == 1 {
        return Err(Error::OddDegree(degree));
    }
    if bound < 0 {
        return Err(Error::Precondition("bound must be non-negative".into()));
    }
    let blades = exterior_basis(d).blades(degree).to_vec();
    let base = 2 * bound as u128 + 1;
    let size = u32::try_from(blades.len()).ok().and_then(|n| base.checked_pow(n)).filter(|&s| s <= SCAN_GUARD).ok_or(
        Error::GuardExceeded {
            size: base.saturating_pow(blades.len().min(u32::MAX as usize) as u32),
            limit: SCAN_GUARD,
        },
    )? as u64;
    let su2 = torus.space().su2();
    let chunks = size.div_ceil(CHUNK);
    let tally = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut tally = Tally::default();
            for index in c * CHUNK..((c + 1) * CHUNK).min(size) {
                let mut rest = index;
                let mut terms = Vec::with_capacity(blades.len());
                for &b in &blades {
                    let digit = (rest % base as u64) as i64 - bound;
                    rest /= base as u64;
                    if digit != 0 {
                        terms.push((b, GaussRat::int(digit, 0)));
                    }
                }
                let alpha = Multivector::from_terms(d, terms);
                match annihilator_structures(&su2, &alpha) {
                    Ok(Annihilator::AllSphere) => tally.invariant += 1,
                    Ok(Annihilator::Empty) => tally.empty += 1,
                    Ok(Annihilator::AntipodalPair(v)) => {
                        tally.antipodal += 1;
                        tally.directions.insert([integral(&v[0]), integral(&v[1]), integral(&v[2])]);
                    }
                    Err(e) if e.is_property_failure() => tally.violations += 1,
                    Err(e) => return Err(e),
                }
            }
            Ok(tally)
        })
        .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))?;
    Ok(ScanReport {
        degree,
        bound,
        invariant: tally.invariant,
        antipodal: tally.antipodal,
        empty: tally.empty,
        violations: tally.violations,
        directions: tally.directions.into_iter().collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeProfileEntry {
    pub degree: usize,
    pub invariant_dim: usize,
    /// `deg_I` on the invariant basis, as exact rationals.
    pub degrees: Vec<String>,
    pub any_nonzero: bool,
    /// Nonzero values occur only when the degree is divisible by 4.
    pub consistent: bool,
}

/// `deg_I` on a basis of the invariant classes of each even degree.
pub fn invariant_degree_profile(torus: &FlatTorus) -> Result<Vec<DegreeProfileEntry>> {
    let space = torus.space();
    let su2 = space.su2();
    let i = space.structure(Generator::I);
    let d = torus.dim_r();
    (0..=d)
        .step_by(2)
        .map(|k| {
            let basis = su2.invariant_basis(k);
            let degrees = basis
                .iter()
                .map(|v| {
                    let alpha = Multivector::from_vector(
                        d,
                        k,
                        &v.iter().map(|x| GaussRat::new(x.clone(), Rational::zero())).collect::<Vec<_>>(),
                    );
                    degree_functional(space, &i, &alpha).map(|c| c.re)
                })
                .collect::<Result<Vec<_>>>()?;
            let any_nonzero = degrees.iter().any(|q| !q.is_zero());
            Ok(DegreeProfileEntry {
                degree: k,
                invariant_dim: basis.len(),
                degrees: degrees.iter().map(format_rational).collect(),
                any_nonzero,
                consistent: !any_nonzero || k % 4 == 0,
            })
        })
        .collect()
}

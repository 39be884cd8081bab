//! Exact integer lattice helpers: kernels by unimodular column reduction and
//! saturation of sublattices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{rat, Rational};

/// Lattice basis of `{x ∈ Z^cols : A x = 0}`.
///
/// Column operations with determinant ±1 bring `A` to lower echelon form;
/// the accumulated transform's trailing columns span the kernel lattice.
pub fn integer_kernel(rows: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut u: Vec<Vec<BigInt>> =
        (0..cols).map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    let mut pivot = 0;
    for r in 0..a.len() {
        if pivot == cols {
            break;
        }
        for j in pivot + 1..cols {
            if a[r][j].is_zero() {
                continue;
            }
            let (p, q) = (a[r][pivot].clone(), a[r][j].clone());
            let eg = p.extended_gcd(&q);
            let (pg, qg) = (&p / &eg.gcd, &q / &eg.gcd);
            // [col_pivot, col_j] ← [x·col_pivot + y·col_j, -q/g·col_pivot + p/g·col_j]
            let combine = |m: &mut Vec<Vec<BigInt>>| {
                for row in m.iter_mut() {
                    let (cp, cj) = (row[pivot].clone(), row[j].clone());
                    row[pivot] = &eg.x * &cp + &eg.y * &cj;
                    row[j] = &pg * &cj - &qg * &cp;
                }
            };
            combine(&mut a);
            combine(&mut u);
        }
        if !a[r][pivot].is_zero() {
            pivot += 1;
        }
    }
    (pivot..cols).map(|j| u.iter().map(|row| row[j].clone()).collect()).collect()
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn to_small(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().ok_or_else(|| Error::Precondition(format!("lattice coordinate {x} exceeds 64 bits"))))
        .collect()
}

/// Basis of `span(vectors) ∩ Z^n`, obtained as the kernel of the kernel.
pub fn saturate(vectors: &[Vec<i64>], n: usize) -> Result<Vec<Vec<i64>>> {
    let rows: Vec<Vec<BigInt>> = vectors.iter().map(|v| to_big(v)).collect();
    let complement = integer_kernel(&rows, n);
    let mut basis = integer_kernel(&complement, n);
    for v in &mut basis {
        // Sign-normalize so the output does not depend on reduction order.
        if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            v.iter_mut().for_each(|x| *x = -x.clone());
        }
    }
    basis.iter().map(|v| to_small(v)).collect()
}

/// Index of the lattice spanned by `basis` inside its saturation; 1 exactly
/// when the basis is primitive. `None` if the vectors are dependent.
pub fn sublattice_index(basis: &[Vec<i64>], n: usize) -> Result<Option<BigInt>> {
    let sat = saturate(basis, n)?;
    if sat.len() != basis.len() {
        return Ok(None);
    }
    // Coordinates of each basis vector in the saturated basis; integral
    // because the spans agree.
    let k = basis.len();
    if k == 0 {
        return Ok(Some(BigInt::one()));
    }
    let frame = Matrix::from_columns(&sat.iter().map(|v| v.iter().map(|&x| rat(x, 1)).collect()).collect::<Vec<_>>());
    let mut coords: Vec<Vec<Rational>> = Vec::with_capacity(k);
    for b in basis {
        let target: Vec<Rational> = b.iter().map(|&x| rat(x, 1)).collect();
        let x =
            frame.solve(&target).ok_or_else(|| Error::Precondition("saturation does not contain the basis".into()))?;
        coords.push(x);
    }
    let det: Rational = Matrix::from_rows(coords).determinant();
    Ok(Some(det.numer().abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| to_big(r)).collect()
    }

    #[test]
    fn kernel_of_simple_row() {
        let k = integer_kernel(&big(&[&[2, 4, 6]]), 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let dot: BigInt = v.iter().zip([2, 4, 6]).map(|(x, c)| x * c).sum();
            assert!(dot.is_zero());
        }
    }

    #[test]
    fn saturation_divides_out_content() {
        let s = saturate(&[vec![2, 0, 0, 0], vec![0, 3, 3, 0]], 4).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(sublattice_index(&s, 4).unwrap(), Some(BigInt::one()));
        assert_eq!(sublattice_index(&[vec![2, 0, 0, 0], vec![0, 3, 3, 0]], 4).unwrap(), Some(BigInt::from(6)));
        assert_eq!(sublattice_index(&[vec![1, 1, 0], vec![1, -1, 0]], 3).unwrap(), Some(BigInt::from(2)));
        assert_eq!(sublattice_index(&[vec![1, 1, 0], vec![2, 2, 0]], 3).unwrap(), None);
    }
}

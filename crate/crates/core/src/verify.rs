//! Exact linear algebra: orthogonality sweeps, completeness, and rank over
//! the cyclotomic integers.
//!
//! Rank and determinants use fraction-free elimination; the only divisions
//! performed are the exact ones the algorithm guarantees, so no field
//! inversion is ever needed.

use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::states::{product_inner, LocalVector, StateLabel, StateSet};

/// Outcome of a pairwise orthogonality sweep.
#[derive(Debug, Clone, Serialize)]
pub struct OrthoReport {
    pub total_pairs: usize,
    pub violations: Vec<OrthoViolation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrthoViolation {
    pub a: StateLabel,
    pub b: StateLabel,
    pub witness: CycNum,
}

impl OrthoReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn pair_of_index(n: usize, idx: usize) -> (usize, usize) {
    // Row-major upper triangle: idx = i*n - i*(i+1)/2 + (j - i - 1).
    let mut i = 0usize;
    let mut base = 0usize;
    loop {
        let row = n - i - 1;
        if idx < base + row {
            return (i, i + 1 + idx - base);
        }
        base += row;
        i += 1;
    }
}

/// Exhaustive pairwise sweep with exact zero tests. Factors with disjoint
/// supports short-circuit without any ring arithmetic.
pub fn check_pairwise_orthogonal(set: &StateSet) -> OrthoReport {
    let states = set.states();
    let n = states.len();
    let total = if n < 2 { 0 } else { n * (n - 1) / 2 };
    let mut violations: Vec<OrthoViolation> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let (i, j) = pair_of_index(n, idx);
            let g = product_inner(&states[i], &states[j]).expect("same shape within a set");
            if g.is_zero() {
                None
            } else {
                Some(OrthoViolation {
                    a: states[i].label.clone(),
                    b: states[j].label.clone(),
                    witness: g,
                })
            }
        })
        .collect();
    violations.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    OrthoReport {
        total_pairs: total,
        violations,
    }
}

/// Same sweep on the floating-point backend: an inner product counts as
/// zero when its magnitude is below `tol`. Cross-check only.
pub fn check_pairwise_orthogonal_float(set: &StateSet, tol: f64) -> OrthoReport {
    let states = set.states();
    let n = states.len();
    let total = if n < 2 { 0 } else { n * (n - 1) / 2 };
    let mut violations: Vec<OrthoViolation> = (0..total)
        .into_par_iter()
        .filter_map(|idx| {
            let (i, j) = pair_of_index(n, idx);
            let (re, im) = float_product_inner(&states[i], &states[j]);
            if (re * re + im * im).sqrt() < tol {
                None
            } else {
                let g = product_inner(&states[i], &states[j]).expect("same shape");
                Some(OrthoViolation {
                    a: states[i].label.clone(),
                    b: states[j].label.clone(),
                    witness: g,
                })
            }
        })
        .collect();
    violations.sort_by(|x, y| (&x.a, &x.b).cmp(&(&y.a, &y.b)));
    OrthoReport {
        total_pairs: total,
        violations,
    }
}

fn float_product_inner(
    a: &crate::states::ProductState,
    b: &crate::states::ProductState,
) -> (f64, f64) {
    let mut acc = (1.0f64, 0.0f64);
    for (fa, fb) in a.factors.iter().zip(&b.factors) {
        let mut f = (0.0f64, 0.0f64);
        for (x, y) in fa.amps.iter().zip(&fb.amps) {
            let (xr, xi) = x.to_complex();
            let (yr, yi) = y.to_complex();
            // conj(x) * y
            f.0 += xr * yr + xi * yi;
            f.1 += xr * yi - xi * yr;
        }
        acc = (acc.0 * f.0 - acc.1 * f.1, acc.0 * f.1 + acc.1 * f.0);
    }
    acc
}

/// An orthogonal set of full cardinality is a basis: checks that the set
/// size equals the total dimension. Errors if the set is not pairwise
/// orthogonal, so the precondition failure is reported distinctly.
pub fn check_completeness(set: &StateSet, dims: &[u32]) -> Result<bool> {
    let report = check_pairwise_orthogonal(set);
    if !report.is_clean() {
        return Err(Error::NotOrthogonal {
            violations: report.violations.len(),
        });
    }
    let full: u64 = dims.iter().map(|&d| d as u64).product();
    Ok(set.len() as u64 == full)
}

/// Fraction-free row echelon pass. Returns (rank, pivot columns, original
/// indices of the pivot rows).
fn bareiss_echelon(mut m: Vec<Vec<CycNum>>) -> (usize, Vec<usize>, Vec<usize>) {
    if m.is_empty() {
        return (0, Vec::new(), Vec::new());
    }
    let rows = m.len();
    let cols = m[0].len();
    let mut row_ids: Vec<usize> = (0..rows).collect();
    let mut prev = CycNum::one();
    let mut rank = 0usize;
    let mut pivot_cols = Vec::new();
    for col in 0..cols {
        let Some(pr) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pr);
        row_ids.swap(rank, pr);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let num = &(&m[i][j] * &m[rank][col]) - &(&m[i][col] * &m[rank][j]);
                m[i][j] = num.div_exact(&prev);
            }
            m[i][col] = CycNum::zero(1);
        }
        prev = m[rank][col].clone();
        pivot_cols.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    (rank, pivot_cols, row_ids[..rank].to_vec())
}

/// Rank of a set of local vectors over the cyclotomic field, via
/// fraction-free elimination with exact zero tests.
pub fn exact_rank(vectors: &[LocalVector]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    debug_assert!(vectors.iter().all(|v| v.dim() == vectors[0].dim()));
    let m: Vec<Vec<CycNum>> = vectors.iter().map(|v| v.amps.clone()).collect();
    bareiss_echelon(m).0
}

/// Determinant of a square matrix by fraction-free elimination.
pub(crate) fn bareiss_det(mut m: Vec<Vec<CycNum>>) -> CycNum {
    let n = m.len();
    if n == 0 {
        return CycNum::one();
    }
    debug_assert!(m.iter().all(|r| r.len() == n));
    let mut prev = CycNum::one();
    let mut sign = 1i64;
    for col in 0..n {
        let Some(pr) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return CycNum::zero(1);
        };
        if pr != col {
            m.swap(col, pr);
            sign = -sign;
        }
        for i in col + 1..n {
            for j in col + 1..n {
                let num = &(&m[i][j] * &m[col][col]) - &(&m[i][col] * &m[col][j]);
                m[i][j] = num.div_exact(&prev);
            }
            m[i][col] = CycNum::zero(1);
        }
        prev = m[col][col].clone();
    }
    if sign < 0 {
        &CycNum::zero(1) - &prev
    } else {
        prev
    }
}

/// A nonzero solution of `rows * x = 0` with entries in the ring, or `None`
/// when the rows have full column rank. Entries are signed maximal minors,
/// so no fractions ever appear.
pub(crate) fn nullspace_vector(rows: &[Vec<CycNum>], cols: usize) -> Option<Vec<CycNum>> {
    let m: Vec<Vec<CycNum>> = rows.to_vec();
    let (rank, pivot_cols, pivot_rows) = bareiss_echelon(m);
    if rank >= cols {
        return None;
    }
    let free = (0..cols)
        .find(|c| !pivot_cols.contains(c))
        .expect("rank < cols");
    let sub = |col_map: &dyn Fn(usize) -> usize| -> Vec<Vec<CycNum>> {
        pivot_rows
            .iter()
            .map(|&r| (0..rank).map(|c| rows[r][col_map(c)].clone()).collect())
            .collect()
    };
    let base = sub(&|c| pivot_cols[c]);
    let det = bareiss_det(base);
    let mut x = vec![CycNum::zero(1); cols];
    x[free] = det;
    for i in 0..rank {
        let replaced = sub(&|c| if c == i { free } else { pivot_cols[c] });
        x[pivot_cols[i]] = &CycNum::zero(1) - &bareiss_det(replaced);
    }
    debug_assert!(rows.iter().all(|r| {
        let mut acc = CycNum::zero(1);
        for (a, b) in r.iter().zip(&x) {
            acc = &acc + &(a * b);
        }
        acc.is_zero()
    }));
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::PartyDims;
    use crate::states::{build_opb, build_ops, build_upb};
    use proptest::prelude::*;

    fn lv(amps: Vec<i64>) -> LocalVector {
        LocalVector::new(1, amps.into_iter().map(CycNum::integer).collect())
    }

    fn dims(v: &[u32]) -> PartyDims {
        PartyDims::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(exact_rank(&[lv(vec![1, 1, 0]), lv(vec![1, -1, 0])]), 2);
        assert_eq!(
            exact_rank(&[lv(vec![1, 0, 0]), lv(vec![0, 1, 0]), lv(vec![1, 1, 0])]),
            2
        );
        assert_eq!(exact_rank(&[]), 0);
        assert_eq!(exact_rank(&[lv(vec![0, 0, 0])]), 0);
    }

    #[test]
    fn rank_of_upb_factors() {
        let upb = build_upb(&dims(&[3, 3, 3]));
        let mut distinct: Vec<LocalVector> = Vec::new();
        for s in upb.states() {
            let f = s.factor(1);
            if !distinct.iter().any(|g| g.proportional(f)) {
                distinct.push(f.clone());
            }
        }
        assert_eq!(distinct.len(), 7);
        assert_eq!(exact_rank(&distinct), 3);
    }

    #[test]
    fn sweep_counts() {
        let opb = build_opb(&dims(&[3, 3, 3]));
        let report = check_pairwise_orthogonal(&opb);
        assert_eq!(report.total_pairs, 351);
        assert!(report.is_clean());

        let upb = build_upb(&dims(&[3, 3, 3]));
        let report = check_pairwise_orthogonal(&upb);
        assert_eq!(report.total_pairs, 171);
        assert!(report.is_clean());

        let mut states = opb.states().to_vec();
        states.push(states[0].clone());
        let dup = StateSet::from_parts(vec![3, 3, 3], crate::states::Role::Custom, states).unwrap();
        assert!(!check_pairwise_orthogonal(&dup).is_clean());
    }

    #[test]
    fn completeness_examples() {
        let opb = build_opb(&dims(&[3, 4, 5]));
        assert!(check_completeness(&opb, &[3, 4, 5]).unwrap());

        let ops = build_ops(&dims(&[3, 3, 3]));
        assert!(!check_completeness(&ops, &[3, 3, 3]).unwrap());

        let empty =
            StateSet::from_parts(vec![3, 3, 3], crate::states::Role::Custom, vec![]).unwrap();
        assert!(!check_completeness(&empty, &[3, 3, 3]).unwrap());

        let mut states = opb.states().to_vec();
        states.push(states[0].clone());
        let dup = StateSet::from_parts(vec![3, 4, 5], crate::states::Role::Custom, states).unwrap();
        assert!(matches!(
            check_completeness(&dup, &[3, 4, 5]),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn float_backend_agrees_on_small_sets() {
        for set in [build_opb(&dims(&[3, 3, 3])), build_upb(&dims(&[3, 4, 5]))] {
            let exact = check_pairwise_orthogonal(&set);
            let float = check_pairwise_orthogonal_float(&set, 1e-9);
            assert_eq!(exact.is_clean(), float.is_clean());
        }
    }

    #[test]
    fn nullspace_is_orthogonal_to_rows() {
        let rows = vec![
            vec![CycNum::integer(1), CycNum::integer(-1), CycNum::integer(0)],
            vec![CycNum::integer(0), CycNum::integer(1), CycNum::integer(-1)],
        ];
        let x = nullspace_vector(&rows, 3).unwrap();
        assert!(x.iter().any(|c| !c.is_zero()));
        assert!(nullspace_vector(
            &[
                vec![CycNum::integer(1), CycNum::integer(0)],
                vec![CycNum::integer(0), CycNum::integer(1)]
            ],
            2
        )
        .is_none());
    }

    proptest! {
        #[test]
        fn rank_invariances(perm_seed in 0usize..24, scale in prop::sample::select(vec![1i64, -1, 2, 5])) {
            let vs = vec![
                lv(vec![1, 1, 0, 0]),
                lv(vec![0, 1, 1, 0]),
                lv(vec![1, 2, 1, 0]),
                lv(vec![0, 0, 0, 1]),
            ];
            let base = exact_rank(&vs);
            let mut permuted = vs.clone();
            permuted.rotate_left(perm_seed % vs.len());
            if perm_seed % 2 == 1 {
                permuted.swap(0, 1);
            }
            prop_assert_eq!(exact_rank(&permuted), base);

            let scaled: Vec<LocalVector> = vs
                .iter()
                .map(|v| LocalVector::new(
                    v.party,
                    v.amps.iter().map(|a| a * &CycNum::integer(scale)).collect(),
                ))
                .collect();
            prop_assert_eq!(exact_rank(&scaled), base);
        }
    }
}

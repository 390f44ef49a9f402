//! Exact Gaussian elimination.

use num_traits::Zero;

use super::HomologyVector;
use crate::rational::Rational;

/// Row-reduces `rows` in place and returns the pivot column of each
/// nonzero row, in order. The rank is the number of pivots.
pub(crate) fn echelon(rows: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][col].clone();
        for v in rows[r].iter_mut() {
            *v /= &lead;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

pub fn rank<'a>(vectors: impl IntoIterator<Item = &'a HomologyVector>) -> usize {
    let mut rows: Vec<Vec<Rational>> = vectors.into_iter().map(|v| v.coords().to_vec()).collect();
    echelon(&mut rows).len()
}

/// Columns on which projection is injective over the affine hull of `points`.
pub(crate) fn affine_pivots(points: &[HomologyVector]) -> Vec<usize> {
    let Some(base) = points.first() else {
        return Vec::new();
    };
    let mut rows: Vec<Vec<Rational>> = points[1..].iter().map(|p| p.sub(base).into_coords()).collect();
    echelon(&mut rows)
}

/// Inverse of a square matrix, or `None` when singular.
pub(crate) fn inverse(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    num_traits::One::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !aug[i][col].is_zero())?;
        aug.swap(col, p);
        let lead = aug[col][col].clone();
        for v in aug[col].iter_mut() {
            *v /= &lead;
        }
        let pivot_row = aug[col].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn rank_of_dependent_set() {
        let vs = [
            HomologyVector::from_ints(&[1, 2, 3]),
            HomologyVector::from_ints(&[2, 4, 6]),
            HomologyVector::from_ints(&[0, 1, 0]),
        ];
        assert_eq!(rank(&vs), 2);
        assert_eq!(rank(&[]), 0);
        assert_eq!(rank(&[HomologyVector::zeros(4)]), 0);
    }

    #[test]
    fn inverse_round_trips() {
        let m = vec![vec![int(2), int(1)], vec![int(1), int(1)]];
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![int(1), int(-1)], vec![int(-1), int(2)]]);
        assert!(inverse(&[vec![int(1), int(2)], vec![int(2), int(4)]]).is_none());
    }
}

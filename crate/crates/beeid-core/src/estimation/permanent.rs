//! Exact matrix permanents in scaled arithmetic.
//!
//! [`permanent`] is Glynn's formula with Gray-code updates, O(M 2^(M-1));
//! [`permanent_bruteforce`] is the direct sum over all M! permutations and
//! exists as an independent oracle for the former.

use alloc::vec;
use alloc::vec::Vec;

use super::scaled::ScaledReal;
use super::EstimationError;

/// Largest M accepted by [`permanent`].
pub const PERMANENT_GUARD: usize = 30;
/// Largest M accepted by [`permanent_bruteforce`].
pub const PERMANENT_BRUTEFORCE_GUARD: usize = 9;

/// Dense square matrix of [`ScaledReal`] entries.
#[derive(Clone, Debug)]
pub struct SquareMatrix {
    m: usize,
    data: Vec<ScaledReal>,
}

impl SquareMatrix {
    pub fn from_rows(rows: Vec<Vec<ScaledReal>>) -> Result<Self, EstimationError> {
        let m = rows.len();
        if m == 0 {
            return Err(EstimationError::EmptyMatrix);
        }
        let mut data = Vec::with_capacity(m * m);
        for row in rows {
            if row.len() != m {
                return Err(EstimationError::NonSquare);
            }
            data.extend(row);
        }
        Ok(SquareMatrix { m, data })
    }

    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Result<Self, EstimationError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| ScaledReal::from_f64(x)).collect())
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn get(&self, row: usize, col: usize) -> ScaledReal {
        self.data[row * self.m + col]
    }

    pub fn scaled_by(&self, c: ScaledReal) -> SquareMatrix {
        SquareMatrix { m: self.m, data: self.data.iter().map(|e| e.mul(&c)).collect() }
    }
}

/// per(T) = sum over permutations sigma of prod_i T[i][sigma(i)], via
/// Glynn's formula with Gray-code iteration. Rows are pre-scaled by their
/// largest-magnitude entry, with the scale folded back into the exponent of
/// the result.
pub fn permanent(t: &SquareMatrix) -> Result<ScaledReal, EstimationError> {
    let m = t.order();
    if m > PERMANENT_GUARD {
        return Err(EstimationError::SizeGuard { m, guard: PERMANENT_GUARD });
    }
    // Row scaling keeps the Gray-code accumulator near mantissa scale.
    let mut scale = ScaledReal::ONE;
    let mut a = vec![vec![ScaledReal::ZERO; m]; m];
    for i in 0..m {
        let mut row_max = ScaledReal::ZERO;
        for j in 0..m {
            let e = t.get(i, j).abs();
            if e > row_max {
                row_max = e;
            }
        }
        if row_max.is_zero() {
            return Ok(ScaledReal::ZERO); // a zero row kills every product
        }
        scale = scale.mul(&row_max);
        for j in 0..m {
            a[i][j] = t.get(i, j).div(&row_max);
        }
    }

    // col_sums[j] = sum_i delta_i a[i][j]; delta_0 is pinned to +1 and the
    // Gray code walks the remaining 2^(m-1) sign vectors.
    let mut col_sums: Vec<ScaledReal> = (0..m)
        .map(|j| (0..m).fold(ScaledReal::ZERO, |acc, i| acc.add(&a[i][j])))
        .collect();
    let product = |cols: &[ScaledReal]| cols.iter().fold(ScaledReal::ONE, |acc, c| acc.mul(c));
    let mut acc = product(&col_sums);
    let mut delta = vec![1i8; m];
    let mut sign = 1i8;
    let two = ScaledReal::from_f64(2.0);
    for k in 1u64..1 << (m - 1) {
        let flip = k.trailing_zeros() as usize + 1;
        let old = delta[flip];
        delta[flip] = -old;
        sign = -sign;
        for j in 0..m {
            // new sum = old sum - 2 * old_delta * a[flip][j]
            let step = two.mul(&a[flip][j]);
            col_sums[j] = if old == 1 { col_sums[j].sub(&step) } else { col_sums[j].add(&step) };
        }
        let term = product(&col_sums);
        acc = if sign == 1 { acc.add(&term) } else { acc.sub(&term) };
    }
    // divide by 2^(m-1): exact on the exponent
    let half_pow = ScaledReal::from_f64(0.5).powi(m as u64 - 1);
    Ok(acc.mul(&half_pow).mul(&scale))
}

/// Permutation-enumeration permanent; the independent oracle for
/// [`permanent`].
pub fn permanent_bruteforce(t: &SquareMatrix) -> Result<ScaledReal, EstimationError> {
    let m = t.order();
    if m > PERMANENT_BRUTEFORCE_GUARD {
        return Err(EstimationError::SizeGuard { m, guard: PERMANENT_BRUTEFORCE_GUARD });
    }
    let mut total = ScaledReal::ZERO;
    for_each_permutation(m, |perm| {
        let mut prod = ScaledReal::ONE;
        for (i, &j) in perm.iter().enumerate() {
            prod = prod.mul(&t.get(i, j));
        }
        total = total.add(&prod);
    });
    Ok(total)
}

/// Calls `f` with every permutation of 0..m (Heap's algorithm).
pub(crate) fn for_each_permutation(m: usize, mut f: impl FnMut(&[usize])) {
    fn rec(perm: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k <= 1 {
            f(perm);
            return;
        }
        for i in 0..k {
            rec(perm, k - 1, f);
            if k % 2 == 0 {
                perm.swap(i, k - 1);
            } else {
                perm.swap(0, k - 1);
            }
        }
    }
    let mut perm: Vec<usize> = (0..m).collect();
    rec(&mut perm, m, &mut f);
}

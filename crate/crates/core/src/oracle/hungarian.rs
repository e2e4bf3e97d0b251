//! Assignment by the Hungarian method with row/column potentials.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Matrix, Result};

/// Minimum-cost perfect assignment of a square matrix. Returns the cost and
/// the column assigned to each row.
pub fn hungarian(cost: &Matrix) -> Result<(f64, Vec<usize>)> {
    let n = cost.rows();
    cost.check_shape((n, n))?;
    if cost.as_slice().iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidConfig("assignment costs must be finite"));
    }
    // 1-based arrays, column 0 is a virtual start
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost.get(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        assignment[owner[j] - 1] = j - 1;
    }
    let total = assignment.iter().enumerate().map(|(i, &j)| cost.get(i, j)).sum();
    Ok((total, assignment))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_by_three() {
        let c = Matrix::from_rows(&[vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]]).unwrap();
        let (v, a) = hungarian(&c).unwrap();
        assert_eq!(v, 5.0);
        assert_eq!(a, vec![1, 0, 2]);
    }

    #[test]
    fn empty() {
        assert_eq!(hungarian(&Matrix::zeros(0, 0)).unwrap(), (0.0, vec![]));
    }
}

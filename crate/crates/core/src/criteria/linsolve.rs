//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::number::Rational;

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Inconsistent { rank: usize },
    /// A particular solution with every free column set to zero, the pivot
    /// columns, and a basis of the null space.
    Solved {
        particular: Vec<Rational>,
        pivots: Vec<usize>,
        null_space: Vec<Vec<Rational>>,
    },
}

/// Reduced row echelon form of the augmented system `[A | b]`.
pub fn solve(a: &[Vec<Rational>], b: &[Rational], cols: usize) -> LinearSolution {
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.resize(cols, Rational::zero());
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Rational::one() / &m[row][col];
        for v in m[row].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (v, w) in m[r].iter_mut().zip(&pivot_row).take(cols + 1) {
                    *v = &*v - w * &f;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let rank = pivots.len();
    if m[rank..].iter().any(|r| !r[cols].is_zero()) {
        return LinearSolution::Inconsistent { rank };
    }
    let mut particular = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = m[r][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let null_space = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -m[r][f].clone();
            }
            v
        })
        .collect();
    LinearSolution::Solved {
        particular,
        pivots,
        null_space,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::{int, rat};

    #[test]
    fn unique() {
        // x + y = 3, x - y = 1
        let a = vec![vec![int(1), int(1)], vec![int(1), int(-1)]];
        let s = solve(&a, &[int(3), int(1)], 2);
        match s {
            LinearSolution::Solved { particular, null_space, .. } => {
                assert_eq!(particular, vec![int(2), int(1)]);
                assert!(null_space.is_empty());
            }
            _ => panic!(),
        }
    }

    #[test]
    fn inconsistent() {
        let a = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(solve(&a, &[int(1), int(3)], 2), LinearSolution::Inconsistent { rank: 1 });
    }

    #[test]
    fn free_column() {
        let a = vec![vec![int(2), int(4)]];
        match solve(&a, &[int(1)], 2) {
            LinearSolution::Solved { particular, null_space, pivots } => {
                assert_eq!(particular, vec![rat(1, 2), int(0)]);
                assert_eq!(pivots, vec![0]);
                assert_eq!(null_space, vec![vec![int(-2), int(1)]]);
            }
            _ => panic!(),
        }
    }
}

//! Minimum-cost perfect matching on a square cost matrix (Hungarian method
//! with row/column potentials, O(n^3)).

use num_complex::Complex64;

/// Returns `col_of_row` minimising `sum_i cost[i][col_of_row[i]]`.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    debug_assert!(cost.iter().all(|row| row.len() == n));

    // 1-based indices; row 0 / column 0 are sentinels
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut row_of_col = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
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
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        col_of_row[row_of_col[j] - 1] = j - 1;
    }
    col_of_row
}

/// Matches `from[i]` to `to[result[i]]` minimising the total distance.
pub fn match_points(from: &[Complex64], to: &[Complex64]) -> Vec<usize> {
    let cost: Vec<Vec<f64>> = from
        .iter()
        .map(|a| to.iter().map(|b| (a - b).norm()).collect())
        .collect();
    min_cost_assignment(&cost)
}

/// True when some point of `from` has two candidates in `to` whose distances differ by at most `tol`.
pub fn has_ambiguous_match(from: &[Complex64], to: &[Complex64], tol: f64) -> bool {
    from.iter().any(|a| {
        let mut best = f64::INFINITY;
        let mut second = f64::INFINITY;
        for b in to {
            let d = (a - b).norm();
            if d < best {
                second = best;
                best = d;
            } else if d < second {
                second = d;
            }
        }
        second - best <= tol
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn total(cost: &[Vec<f64>], assignment: &[usize]) -> f64 {
        assignment.iter().enumerate().map(|(i, &j)| cost[i][j]).sum()
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn small_example() {
        let cost = vec![
            vec![4.0, 1.0, 3.0],
            vec![2.0, 0.0, 5.0],
            vec![3.0, 2.0, 2.0],
        ];
        let a = min_cost_assignment(&cost);
        assert_eq!(total(&cost, &a), 5.0);
        assert!(min_cost_assignment(&[]).is_empty());
    }

    proptest! {
        #[test]
        fn matches_brute_force(n in 1usize..6, seed in proptest::collection::vec(0.0f64..10.0, 36)) {
            let cost: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| seed[i * 6 + j]).collect()).collect();
            let a = min_cost_assignment(&cost);
            let mut seen = a.clone();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
            let best = permutations(n).iter().map(|p| total(&cost, p)).fold(f64::INFINITY, f64::min);
            prop_assert!((total(&cost, &a) - best).abs() < 1e-9);
        }
    }

    #[test]
    fn point_matching_follows_shift() {
        let from: Vec<Complex64> = (0..5).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let to: Vec<Complex64> = from.iter().rev().map(|z| z + 0.1).collect();
        assert_eq!(match_points(&from, &to), vec![4, 3, 2, 1, 0]);
        assert!(!has_ambiguous_match(&from, &to, 1e-12));
        let pair = [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        assert!(has_ambiguous_match(&[Complex64::new(0.0, 0.0)], &pair, 1e-12));
    }
}

//! Maximum-weight linear assignment on small dense square matrices.

use serde::Serialize;

/// Bijection `beta[row] = column` and its total weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assignment {
    pub value: f64,
    pub beta: Vec<usize>,
}

pub fn assignment_value(m: &[Vec<f64>], beta: &[usize]) -> f64 {
    beta.iter().enumerate().map(|(r, &c)| m[r][c]).sum()
}

/// Hungarian algorithm with potentials, O(n^3), minimizing `cost`.
/// Returns `col_of_row`.
fn hungarian_min(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
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
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of_row = vec![0; n];
    for j in 1..=n {
        col_of_row[p[j] - 1] = j - 1;
    }
    col_of_row
}

fn max_on(m: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let cost: Vec<Vec<f64>> = rows.iter().map(|&r| cols.iter().map(|&c| -m[r][c]).collect()).collect();
    let sub = hungarian_min(&cost);
    sub.iter().enumerate().map(|(i, &j)| m[rows[i]][cols[j]]).sum()
}

fn tie_tolerance(value: f64) -> f64 {
    1e-9 * value.abs().max(1.0)
}

/// Maximum-weight assignment. Among optimal bijections (within a relative
/// 1e-9 tolerance) the lexicographically smallest `beta` is returned.
pub fn max_assignment(m: &[Vec<f64>]) -> Assignment {
    let n = m.len();
    if n == 0 {
        return Assignment { value: 0.0, beta: vec![] };
    }
    let all: Vec<usize> = (0..n).collect();
    let opt = max_on(m, &all, &all);
    let tol = tie_tolerance(opt);

    let mut beta = Vec::with_capacity(n);
    let mut free: Vec<usize> = all.clone();
    let mut fixed = 0.0;
    for r in 0..n {
        let rest_rows: Vec<usize> = (r + 1..n).collect();
        let mut chosen = None;
        for (k, &c) in free.iter().enumerate() {
            let rest_cols: Vec<usize> = free.iter().copied().filter(|&x| x != c).collect();
            let total = fixed + m[r][c] + max_on(m, &rest_rows, &rest_cols);
            if total >= opt - tol {
                chosen = Some(k);
                break;
            }
        }
        // The Hungarian optimum guarantees some column passes; fall back to the
        // best remaining one if rounding says otherwise.
        let k = chosen.unwrap_or_else(|| {
            (0..free.len())
                .max_by(|&a, &b| m[r][free[a]].total_cmp(&m[r][free[b]]))
                .unwrap()
        });
        let c = free.remove(k);
        fixed += m[r][c];
        beta.push(c);
    }
    let value = assignment_value(m, &beta);
    Assignment { value, beta }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Exhaustive search over all `n!` bijections in lexicographic order.
pub fn brute_force_assignment(m: &[Vec<f64>]) -> Assignment {
    let n = m.len();
    let mut p: Vec<usize> = (0..n).collect();
    let mut values = Vec::new();
    loop {
        values.push((assignment_value(m, &p), p.clone()));
        if !next_permutation(&mut p) {
            break;
        }
    }
    let opt = values.iter().map(|(v, _)| *v).fold(f64::NEG_INFINITY, f64::max);
    let tol = tie_tolerance(opt);
    let (value, beta) = values.into_iter().find(|(v, _)| *v >= opt - tol).unwrap();
    Assignment { value, beta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_known_case() {
        let m = vec![vec![1.0, 5.0, 2.0], vec![4.0, 1.0, 1.0], vec![2.0, 2.0, 6.0]];
        let a = max_assignment(&m);
        assert_eq!(a.beta, vec![1, 0, 2]);
        assert_eq!(a.value, 15.0);
    }

    #[test]
    fn ties_pick_lexicographic_smallest() {
        let m = vec![vec![1.0; 4]; 4];
        assert_eq!(max_assignment(&m).beta, vec![0, 1, 2, 3]);
        assert_eq!(brute_force_assignment(&m).beta, vec![0, 1, 2, 3]);
        let anti = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(max_assignment(&anti).beta, vec![1, 0]);
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 1..=6 {
            for _ in 0..30 {
                let m: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
                let h = max_assignment(&m);
                let b = brute_force_assignment(&m);
                assert!((h.value - b.value).abs() < 1e-12);
                assert_eq!(h.beta, b.beta);
            }
        }
    }

    #[test]
    fn integer_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let m: Vec<Vec<f64>> = (0..5).map(|_| (0..5).map(|_| rng.random_range(0..3) as f64).collect()).collect();
            assert_eq!(max_assignment(&m), brute_force_assignment(&m));
        }
    }
}

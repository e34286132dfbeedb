//! Minimum-cost assignment on a square matrix.
//!
//! Used to align community labels between two labelings when the number of
//! classes is too large for factorial enumeration. The solver is the classic
//! Jonker–Volgenant / Hungarian shortest-augmenting-path scheme with row and
//! column potentials, O(K^3).

/// Returns `assign` with `assign[row] = column` minimizing the total cost.
pub fn min_cost_assignment(cost: &[Vec<i64>]) -> Vec<usize> {
    let n = cost.len();
    assert!(cost.iter().all(|r| r.len() == n), "matrix must be square");
    if n == 0 {
        return Vec::new();
    }
    let inf = i64::MAX / 4;
    // 1-based with a virtual column 0.
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1]; // row matched to each column
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
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
    let mut assign = vec![0usize; n];
    for j in 1..=n {
        if p[j] != 0 {
            assign[p[j] - 1] = j - 1;
        }
    }
    assign
}

pub fn assignment_cost(cost: &[Vec<i64>], assign: &[usize]) -> i64 {
    assign.iter().enumerate().map(|(i, &j)| cost[i][j]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_min(cost: &[Vec<i64>]) -> i64 {
        let n = cost.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = i64::MAX;
        permute(&mut perm, 0, cost, &mut best);
        best
    }

    fn permute(perm: &mut Vec<usize>, k: usize, cost: &[Vec<i64>], best: &mut i64) {
        if k == perm.len() {
            *best = (*best).min(assignment_cost(cost, perm));
            return;
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            permute(perm, k + 1, cost, best);
            perm.swap(k, i);
        }
    }

    #[test]
    fn known_instance() {
        let cost = vec![vec![4, 1, 3], vec![2, 0, 5], vec![3, 2, 2]];
        let assign = min_cost_assignment(&cost);
        assert_eq!(assignment_cost(&cost, &assign), 5); // 1 + 2 + 2
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for n in 1..=6 {
            for _ in 0..60 {
                let cost: Vec<Vec<i64>> = (0..n)
                    .map(|_| (0..n).map(|_| (next() % 100) as i64).collect())
                    .collect();
                let assign = min_cost_assignment(&cost);
                let mut sorted = assign.clone();
                sorted.sort_unstable();
                assert_eq!(sorted, (0..n).collect::<Vec<_>>(), "not a permutation");
                assert_eq!(assignment_cost(&cost, &assign), brute_force_min(&cost));
            }
        }
    }
}

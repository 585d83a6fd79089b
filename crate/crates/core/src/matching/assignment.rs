use crate::error::{Error, Result};

/// Non-negative `k x l` edge weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightMatrix {
    k: usize,
    l: usize,
    w: Vec<u64>,
}

impl WeightMatrix {
    pub fn zeros(k: usize, l: usize) -> Self {
        WeightMatrix {
            k,
            l,
            w: vec![0; k * l],
        }
    }

    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let k = rows.len();
        let l = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != l) {
            return Err(Error::InvalidInput("ragged weight rows".into()));
        }
        Ok(WeightMatrix {
            k,
            l,
            w: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.k
    }

    pub fn cols(&self) -> usize {
        self.l
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.w[i * self.l + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        self.w[i * self.l + j] = value;
    }
}

/// Maximum total weight over matchings that saturate the left side. When
/// `k > l` the matrix is padded with zero-weight columns first, so the value
/// equals the maximum-weight matching.
pub fn max_weight_left_saturating(w: &WeightMatrix) -> u64 {
    max_weight_matching(w).0
}

/// Maximum-weight matching by the Hungarian method with potentials,
/// O(n^3) for `n = max(k, l)`. Returns the weight and the matched pairs that
/// carry positive weight.
pub fn max_weight_matching(w: &WeightMatrix) -> (u64, Vec<(usize, usize)>) {
    let n = w.k.max(w.l);
    if n == 0 {
        return (0, Vec::new());
    }
    let max_w = w.w.iter().copied().max().unwrap_or(0) as i128;
    // Minimize cost = max_w - weight on the zero-padded square matrix.
    let cost = |i: usize, j: usize| -> i128 {
        let weight = if i < w.k && j < w.l { w.get(i, j) as i128 } else { 0 };
        max_w - weight
    };

    // 1-indexed rows/columns, column 0 is the virtual start.
    let mut u = vec![0i128; n + 1];
    let mut v = vec![0i128; n + 1];
    let mut row_of = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        row_of[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i128::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = row_of[j0];
            let mut delta = i128::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
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
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if row_of[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            row_of[j0] = row_of[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut total = 0u64;
    let mut pairs = Vec::new();
    for j in 1..=n {
        let i = row_of[j] - 1;
        let (i, j) = (i, j - 1);
        if i < w.k && j < w.l && w.get(i, j) > 0 {
            total += w.get(i, j);
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();
    (total, pairs)
}

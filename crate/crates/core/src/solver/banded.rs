//! Banded storage with partial-pivoting LU, and reverse Cuthill–McKee node
//! ordering to keep the band narrow.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals. Row `i` keeps
/// columns `i − kl ..= i + ku + kl`; the extra `kl` columns absorb fill from
/// row interchanges.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    w: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let w = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, w, data: vec![0.0; n * w] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let off = j as isize - i as isize + self.kl as isize;
        if off < 0 || off >= self.w as isize {
            None
        } else {
            Some(i * self.w + off as usize)
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Accumulate into `(i, j)`; entries outside the declared band are a
    /// programming error.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).filter(|_| j + self.kl >= i && j <= i + self.ku);
        match s {
            Some(s) => self.data[s] += v,
            None => panic!("entry ({i}, {j}) outside band kl={} ku={}", self.kl, self.ku),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + self.kl).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// In-place LU factorization with row pivoting.
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let scale = self.max_abs();
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::SingularTangent);
        }
        let reach = self.ku + self.kl;
        let mut piv = vec![0; n];
        for k in 0..n {
            let last = (k + self.kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for i in k + 1..=last {
                let v = self.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if !(best > 1e-14 * scale) {
                return Err(Error::SingularTangent);
            }
            piv[k] = p;
            let jmax = (k + reach).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    let a = self.slot(k, j).unwrap();
                    let b = self.slot(p, j).unwrap();
                    self.data.swap(a, b);
                }
            }
            let d = self.get(k, k);
            for i in k + 1..=last {
                let si = self.slot(i, k).unwrap();
                let l = self.data[si] / d;
                self.data[si] = l;
                if l == 0.0 {
                    continue;
                }
                for j in k + 1..=jmax {
                    let u = self.data[self.slot(k, j).unwrap()];
                    let s = self.slot(i, j).unwrap();
                    self.data[s] -= l * u;
                }
            }
        }
        Ok(BandLu { m: self, piv })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    m: BandMatrix,
    piv: Vec<usize>,
}

impl BandLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let m = &self.m;
        let n = m.n;
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.piv[k]);
            let last = (k + m.kl).min(n - 1);
            for i in k + 1..=last {
                x[i] -= m.get(i, k) * x[k];
            }
        }
        let reach = m.ku + m.kl;
        for k in (0..n).rev() {
            let hi = (k + reach).min(n - 1);
            let mut s = x[k];
            for j in k + 1..=hi {
                s -= m.get(k, j) * x[j];
            }
            x[k] = s / m.get(k, k);
        }
        x
    }
}

/// Reverse Cuthill–McKee ordering of a graph given by adjacency lists.
/// Returns `order[k]` = vertex placed at position `k`.
pub fn rcm(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        // start each component from a minimum-degree vertex
        let start = (0..n).filter(|&v| !seen[v]).min_by_key(|&v| (adj[v].len(), v)).unwrap();
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nb: Vec<usize> = adj[v].iter().copied().filter(|&u| !seen[u]).collect();
            nb.sort_by_key(|&u| (adj[u].len(), u));
            nb.dedup();
            for u in nb {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    order.reverse();
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal_with_pivoting() {
        let n = 6;
        let mut a = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.add(i, i, if i % 2 == 0 { 1e-3 } else { 4.0 });
            if i + 1 < n {
                a.add(i, i + 1, 1.0);
                a.add(i + 1, i, 2.0);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| i as f64 - 2.5).collect();
        let b = a.mul_vec(&x);
        let y = a.clone().factor().unwrap().solve(&b);
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_band_detected() {
        let mut a = BandMatrix::zeros(3, 1, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, 1.0);
        assert_eq!(a.factor().unwrap_err(), Error::SingularTangent);
    }

    #[test]
    fn rcm_path_graph() {
        let adj = vec![vec![2], vec![2], vec![0, 1]];
        let o = rcm(&adj);
        let mut s = o.clone();
        s.sort();
        assert_eq!(s, vec![0, 1, 2]);
    }
}

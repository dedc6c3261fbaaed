use crate::error::{ensure, Result};

/// Bijection between spin vectors `η ∈ {-1, +1}^n` and `0..2^n`: bit `k` is
/// set iff site `k` carries `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinBasisIndex {
    sites: usize,
}

impl SpinBasisIndex {
    pub fn new(sites: usize) -> Result<Self> {
        ensure!(sites <= 30, "basis over {sites} sites does not fit in an index");
        Ok(SpinBasisIndex { sites })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dimension(&self) -> usize {
        1 << self.sites
    }

    pub fn index(&self, eta: &[i8]) -> Result<usize> {
        ensure!(eta.len() == self.sites, "spin vector has {} entries, expected {}", eta.len(), self.sites);
        let mut i = 0;
        for (k, &s) in eta.iter().enumerate() {
            match s {
                1 => i |= 1 << k,
                -1 => {}
                _ => return Err(crate::Error::invalid(format!("spin {s} is not ±1"))),
            }
        }
        Ok(i)
    }

    pub fn spins(&self, index: usize) -> Vec<i8> {
        (0..self.sites).map(|k| if index >> k & 1 == 1 { 1 } else { -1 }).collect()
    }
}

/// Spin of site `k` in basis state `i`.
pub(crate) fn spin(i: usize, k: usize) -> f64 {
    if i >> k & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Splits a full index into the bits on `w` (packed in the order of `w`) and
/// the bits on `rest`.
pub(crate) fn split_index(i: usize, w: &[usize], rest: &[usize]) -> (usize, usize) {
    let pack = |sites: &[usize]| sites.iter().enumerate().fold(0, |acc, (k, &x)| acc | (i >> x & 1) << k);
    (pack(w), pack(rest))
}

/// Inverse of [`split_index`].
pub(crate) fn join_index(a: usize, r: usize, w: &[usize], rest: &[usize]) -> usize {
    let mut i = 0;
    for (k, &x) in w.iter().enumerate() {
        i |= (a >> k & 1) << x;
    }
    for (k, &x) in rest.iter().enumerate() {
        i |= (r >> k & 1) << x;
    }
    i
}

//! Cached per-bandwidth tables: Wigner d at the grid colatitudes, Legendre
//! values, and DFT twiddles.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::groups::{QuadratureGrid, Space};
use crate::harmonics::{legendre_table, wigner_d_all};

pub(crate) struct Tables {
    pub bandwidth: usize,
    /// `[j][l]` small-d matrices at `β_j`, `l < B`.
    pub d: Vec<Vec<DMatrix<f64>>>,
    /// `[j][l][m]` normalized Legendre values, `0 ≤ m ≤ l < B`.
    pub p: Vec<Vec<Vec<f64>>>,
    pub beta_weights: Vec<f64>,
    /// `e^{2πi r / 2B}` for `r = 0 .. 2B`.
    pub roots: Vec<Complex64>,
}

impl Tables {
    fn build(bandwidth: usize) -> Self {
        let grid = QuadratureGrid::new(Space::S2, bandwidth).expect("bandwidth ≥ 1");
        let n = 2 * bandwidth;
        Self {
            bandwidth,
            d: grid.betas().iter().map(|&b| wigner_d_all(bandwidth - 1, b)).collect(),
            p: grid.betas().iter().map(|&b| legendre_table(bandwidth - 1, b)).collect(),
            beta_weights: grid.beta_weights().to_vec(),
            roots: (0..n)
                .map(|r| Complex64::from_polar(1.0, std::f64::consts::TAU * r as f64 / n as f64))
                .collect(),
        }
    }

    /// `e^{i s m α_i}` with `s = ±1`, exact index arithmetic on the unit roots.
    pub fn twiddle(&self, m: i64, i: usize) -> Complex64 {
        let n = 2 * self.bandwidth as i64;
        self.roots[(m * i as i64).rem_euclid(n) as usize]
    }

    pub fn dval(&self, j: usize, l: usize, m: i64, n: i64) -> f64 {
        let li = l as i64;
        self.d[j][l][((m + li) as usize, (n + li) as usize)]
    }
}

pub(crate) fn tables(bandwidth: usize) -> Arc<Tables> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Tables>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("cache lock").get(&bandwidth) {
        return t.clone();
    }
    let t = Arc::new(Tables::build(bandwidth));
    cache
        .lock()
        .expect("cache lock")
        .entry(bandwidth)
        .or_insert(t)
        .clone()
}

//! Wigner small-d and full D matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::groups::Rotation3;

/// `ln n!` by direct summation; exact enough for the degrees used here.
pub(crate) fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn ln_pow(x: f64, e: usize) -> f64 {
    if e == 0 {
        0.0
    } else {
        e as f64 * x.ln()
    }
}

fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `d^{j0}_{mn}` at `j0 = max(|m|, |n|)`, evaluated in log space.
fn seed(m: i64, n: i64, beta: f64) -> f64 {
    // Reduce to |m| ≥ |n| with d_{mn} = (-1)^{m-n} d_{nm}.
    if n.abs() > m.abs() {
        return parity(m - n) * seed(n, m, beta);
    }
    let j = m.unsigned_abs() as usize;
    let c = (0.5 * beta).cos();
    let s = (0.5 * beta).sin();
    let jp = (j as i64 + n) as usize;
    let jm = (j as i64 - n) as usize;
    let ln_binom = 0.5 * (ln_factorial(2 * j) - ln_factorial(jp) - ln_factorial(jm));
    if m >= 0 {
        parity(j as i64 - n) * (ln_binom + ln_pow(c, jp) + ln_pow(s, jm)).exp()
    } else {
        (ln_binom + ln_pow(c, jm) + ln_pow(s, jp)).exp()
    }
}

/// `d^l_{mn}(β)` for every `l ≤ lmax`, indexed `[l][(m + l, n + l)]`.
///
/// Each entry is generated by the three-term recursion in `l` starting from its
/// closed-form seed at `l = max(|m|, |n|)`.
pub fn wigner_d_all(lmax: usize, beta: f64) -> Vec<DMatrix<f64>> {
    let mut out: Vec<DMatrix<f64>> = (0..=lmax)
        .map(|l| DMatrix::zeros(2 * l + 1, 2 * l + 1))
        .collect();
    let cb = beta.cos();
    let lm = lmax as i64;
    for m in -lm..=lm {
        for n in -lm..=lm {
            let j0 = m.abs().max(n.abs());
            let mut prev = 0.0;
            let mut cur = seed(m, n, beta);
            out[j0 as usize][((m + j0) as usize, (n + j0) as usize)] = cur;
            for j in j0..lm {
                let jf = j as f64;
                let (mf, nf) = (m as f64, n as f64);
                let next = if j == 0 {
                    cb
                } else {
                    let a = (2.0 * jf + 1.0) * (jf * (jf + 1.0) * cb - mf * nf);
                    let b = (jf + 1.0) * ((jf * jf - mf * mf) * (jf * jf - nf * nf)).sqrt();
                    let j1 = jf + 1.0;
                    let den = jf * ((j1 * j1 - mf * mf) * (j1 * j1 - nf * nf)).sqrt();
                    (a * cur - b * prev) / den
                };
                prev = cur;
                cur = next;
                let l = (j + 1) as usize;
                out[l][((m + j + 1) as usize, (n + j + 1) as usize)] = cur;
            }
        }
    }
    out
}

/// Small-d matrix of degree `l`, rows and columns indexed `m + l`, `n + l`.
pub fn wigner_d(l: usize, beta: f64) -> DMatrix<f64> {
    wigner_d_all(l, beta).pop().expect("nonempty")
}

/// A unitary irrep block `D^l(g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerBlock {
    pub l: usize,
    pub entries: DMatrix<Complex64>,
}

impl WignerBlock {
    /// Entry `D^l_{mn}` with `m, n ∈ [-l, l]`.
    pub fn get(&self, m: i64, n: i64) -> Complex64 {
        let l = self.l as i64;
        self.entries[((m + l) as usize, (n + l) as usize)]
    }

    pub fn dim(&self) -> usize {
        2 * self.l + 1
    }
}

fn assemble(l: usize, d: &DMatrix<f64>, g: &Rotation3) -> WignerBlock {
    let li = l as i64;
    let entries = DMatrix::from_fn(2 * l + 1, 2 * l + 1, |r, c| {
        let m = r as i64 - li;
        let n = c as i64 - li;
        Complex64::from_polar(d[(r, c)], -(m as f64) * g.alpha - (n as f64) * g.gamma)
    });
    WignerBlock { l, entries }
}

/// `D^l_{mn}(α, β, γ) = e^{-imα} d^l_{mn}(β) e^{-inγ}`.
#[allow(non_snake_case)]
pub fn wigner_D(l: usize, g: &Rotation3) -> WignerBlock {
    assemble(l, &wigner_d(l, g.beta), g)
}

/// All blocks `D^0(g) … D^lmax(g)`.
#[allow(non_snake_case)]
pub fn wigner_D_all(lmax: usize, g: &Rotation3) -> Vec<WignerBlock> {
    wigner_d_all(lmax, g.beta)
        .iter()
        .enumerate()
        .map(|(l, d)| assemble(l, d, g))
        .collect()
}

//! Clebsch–Gordan coefficients `⟨l1 m1 l2 m2 | l m⟩` (Condon–Shortley convention).

use std::collections::BTreeMap;
use std::io::Write;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use super::wigner::ln_factorial;
use crate::error::Result;

/// Largest degree handled with exact rational arithmetic.
pub const EXACT_MAX_DEGREE: usize = 20;

fn admissible(l1: usize, m1: i64, l2: usize, m2: i64, l: usize, m: i64) -> bool {
    m == m1 + m2
        && m1.unsigned_abs() as usize <= l1
        && m2.unsigned_abs() as usize <= l2
        && m.unsigned_abs() as usize <= l
        && l1.abs_diff(l2) <= l
        && l <= l1 + l2
}

fn big_factorial(n: i64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Integer arguments shared by both evaluation paths.
struct Racah {
    pre_num: [i64; 9],
    pre_den: i64,
    kmin: i64,
    kmax: i64,
    den: [i64; 6],
}

impl Racah {
    fn new(l1: i64, m1: i64, l2: i64, m2: i64, l: i64, m: i64) -> Self {
        let den = [
            l1 + l2 - l,
            l1 - m1,
            l2 + m2,
            l - l2 + m1,
            l - l1 - m2,
            0,
        ];
        let kmin = 0.max(-den[3]).max(-den[4]);
        let kmax = den[0].min(den[1]).min(den[2]);
        Self {
            pre_num: [
                l + l1 - l2,
                l - l1 + l2,
                l1 + l2 - l,
                l + m,
                l - m,
                l1 - m1,
                l1 + m1,
                l2 - m2,
                l2 + m2,
            ],
            pre_den: l1 + l2 + l + 1,
            kmin,
            kmax,
            den,
        }
    }

    /// Factorial arguments in the denominator of the `k`-th summand.
    fn term(&self, k: i64) -> [i64; 6] {
        [
            k,
            self.den[0] - k,
            self.den[1] - k,
            self.den[2] - k,
            self.den[3] + k,
            self.den[4] + k,
        ]
    }
}

fn exact(l1: usize, m1: i64, l2: usize, m2: i64, l: usize, m: i64) -> f64 {
    let r = Racah::new(l1 as i64, m1, l2 as i64, m2, l as i64, m);
    let mut sum = BigRational::zero();
    for k in r.kmin..=r.kmax {
        let d = r.term(k).iter().fold(BigInt::one(), |acc, &a| acc * big_factorial(a));
        let t = BigRational::new(BigInt::one(), d);
        if k % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let num = r.pre_num.iter().fold(BigInt::one(), |acc, &a| acc * big_factorial(a));
    let pre = BigRational::new(
        num * BigInt::from(2 * l as i64 + 1),
        big_factorial(r.pre_den),
    );
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    let sq = pre * &sum * &sum;
    sign * sq.to_f64().expect("finite").sqrt()
}

fn logspace(l1: usize, m1: i64, l2: usize, m2: i64, l: usize, m: i64) -> f64 {
    let r = Racah::new(l1 as i64, m1, l2 as i64, m2, l as i64, m);
    let lf = |a: i64| ln_factorial(a as usize);
    let pre = 0.5
        * (((2 * l + 1) as f64).ln() + r.pre_num.iter().map(|&a| lf(a)).sum::<f64>()
            - lf(r.pre_den));
    let logs: Vec<f64> = (r.kmin..=r.kmax)
        .map(|k| pre - r.term(k).iter().map(|&a| lf(a)).sum::<f64>())
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = logs
        .iter()
        .zip(r.kmin..)
        .map(|(&v, k)| if k % 2 == 0 { (v - top).exp() } else { -(v - top).exp() })
        .sum();
    s * top.exp()
}

/// `⟨l1 m1 l2 m2 | l m⟩`; zero outside the selection rules.
pub fn clebsch_gordan(l1: usize, m1: i64, l2: usize, m2: i64, l: usize, m: i64) -> f64 {
    if !admissible(l1, m1, l2, m2, l, m) {
        return 0.0;
    }
    if l1.max(l2).max(l) <= EXACT_MAX_DEGREE {
        exact(l1, m1, l2, m2, l, m)
    } else {
        logspace(l1, m1, l2, m2, l, m)
    }
}

pub type CgKey = (usize, i64, usize, i64, usize, i64);

/// All nonzero coefficients with `l1, l2 ≤ lmax`.
#[derive(Debug, Clone)]
pub struct CgTable {
    lmax: usize,
    values: BTreeMap<CgKey, f64>,
}

impl CgTable {
    pub fn new(lmax: usize) -> Self {
        let mut values = BTreeMap::new();
        for l1 in 0..=lmax {
            for l2 in 0..=lmax {
                for l in l1.abs_diff(l2)..=l1 + l2 {
                    for m1 in -(l1 as i64)..=l1 as i64 {
                        for m2 in -(l2 as i64)..=l2 as i64 {
                            let m = m1 + m2;
                            if m.unsigned_abs() as usize > l {
                                continue;
                            }
                            let v = clebsch_gordan(l1, m1, l2, m2, l, m);
                            if v != 0.0 {
                                values.insert((l1, m1, l2, m2, l, m), v);
                            }
                        }
                    }
                }
            }
        }
        Self { lmax, values }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn get(&self, l1: usize, m1: i64, l2: usize, m2: i64, l: usize, m: i64) -> f64 {
        self.values.get(&(l1, m1, l2, m2, l, m)).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CgKey, &f64)> {
        self.values.iter()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// CSV rows `l1,m1,l2,m2,l,m,value` with a header line.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["l1", "m1", "l2", "m2", "l", "m", "value"])?;
        for (&(l1, m1, l2, m2, l, m), v) in &self.values {
            out.write_record([
                l1.to_string(),
                m1.to_string(),
                l2.to_string(),
                m2.to_string(),
                l.to_string(),
                m.to_string(),
                format!("{v:.17e}"),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

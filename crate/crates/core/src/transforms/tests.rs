use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::groups::{QuadratureGrid, Rotation3, Space, SpherePoint};
use crate::harmonics::{sph_harm, sph_harm_all, wigner_D_all};
use crate::random;

type C = Complex64;

fn rel(a: &[Vec<C>], b: &[Vec<C>]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (x, y) in a.iter().zip(b) {
        for (u, v) in x.iter().zip(y) {
            num += (u - v).norm_sqr();
            den += v.norm_sqr();
        }
    }
    (num / den.max(1e-300)).sqrt()
}

fn s2(b: usize) -> QuadratureGrid {
    QuadratureGrid::new(Space::S2, b).unwrap()
}

fn so3(b: usize) -> QuadratureGrid {
    QuadratureGrid::new(Space::SO3, b).unwrap()
}

fn coeff_diff(a: &ShtCoeffs, b: &ShtCoeffs) -> f64 {
    a.coeffs
        .iter()
        .flatten()
        .flatten()
        .zip(b.coeffs.iter().flatten().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[test]
fn constant_field_has_only_mean() {
    let g = s2(6);
    let data = vec![vec![C::new(2.5, 0.0); g.len()]];
    let c = sht_forward(&g, &data, 6).unwrap();
    for l in 0..6 {
        for m in -(l as i64)..=l as i64 {
            let e = if l == 0 { 2.5 } else { 0.0 };
            assert!((c.get(0, l, m) - e).norm() < 1e-13);
        }
    }
}

#[test]
fn single_harmonic_is_recovered() {
    let g = s2(8);
    let data = vec![g.nodes().iter().map(|n| sph_harm(2, 1, SpherePoint::new(n.alpha, n.beta))).collect()];
    let c = sht_forward(&g, &data, 8).unwrap();
    for l in 0..8 {
        for m in -(l as i64)..=l as i64 {
            let e = if (l, m) == (2, 1) { 1.0 } else { 0.0 };
            assert!((c.get(0, l, m) - e).norm() < 1e-12, "({l},{m})");
        }
    }
}

#[test]
fn sht_round_trip_and_parseval() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let c = random::sht_coeffs(&mut rng, 8, 3);
    let g = s2(8);
    let f = sht_inverse(&c).unwrap();
    // Synthesis agrees with pointwise evaluation.
    for (idx, n) in g.nodes().iter().enumerate().step_by(7) {
        let v = sht_evaluate(&c, SpherePoint::new(n.alpha, n.beta));
        for ch in 0..3 {
            assert!((v[ch] - f[ch][idx]).norm() < 1e-11);
        }
    }
    let back = sht_forward(&g, &f, 8).unwrap();
    assert!(coeff_diff(&back, &c) < 1e-12);
    let f2 = sht_inverse(&back).unwrap();
    assert!(rel(&f2, &f) < 1e-10);
    let energy: f64 = f.iter().flat_map(|ch| ch.iter().zip(g.weights()).map(|(v, w)| v.norm_sqr() * w)).sum();
    let spec: f64 = c.coeffs.iter().flatten().flatten().map(|z| z.norm_sqr()).sum();
    assert!((energy - spec).abs() / spec < 1e-10);
}

#[test]
fn sht_trivial_cases() {
    let c = ShtCoeffs::zeros(4, 2);
    assert!(sht_inverse(&c).unwrap().iter().flatten().all(|z| *z == C::new(0.0, 0.0)));
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let c = random::sht_coeffs(&mut rng, 5, 1);
    let mut c2 = c.clone();
    c2.coeffs.iter_mut().flatten().flatten().for_each(|z| *z *= 2.0);
    let (f, f2) = (sht_inverse(&c).unwrap(), sht_inverse(&c2).unwrap());
    for (a, b) in f[0].iter().zip(&f2[0]) {
        assert!((a * 2.0 - b).norm() < 1e-12);
    }
    assert!(sht_forward(&s2(4), &f, 5).is_err());
    assert!(sht_forward(&so3(5), &f, 5).is_err());
}

#[test]
fn zonal_delta_train_peaks_at_pole() {
    let b = 6;
    let mut c = ShtCoeffs::zeros(b, 1);
    for l in 0..b {
        c.set(0, l, 0, C::new((2 * l + 1) as f64, 0.0));
    }
    let pole = sht_evaluate(&c, SpherePoint::NORTH)[0];
    let direct: f64 = (0..b).map(|l| (2 * l + 1) as f64 * sph_harm(l, 0, SpherePoint::NORTH).re).sum();
    assert!((pole.re - direct).abs() < 1e-12);
    let f = sht_inverse(&c).unwrap();
    let top = f[0].iter().map(|z| z.re).fold(f64::MIN, f64::max);
    assert!(top < direct && f[0][0].re >= top - 1e-12);
}

#[test]
fn so3_constant_and_single_entry() {
    let g = so3(4);
    let f = so3_ft_forward(&g, &[vec![C::new(1.0, 0.0); g.len()]]).unwrap();
    assert!((f.get(0, 0, 0, 0) - 1.0).norm() < 1e-13);
    assert!(f.weighted_energy() - 1.0 < 1e-12);

    let data: Vec<C> = g
        .nodes()
        .iter()
        .map(|n| wigner_D_all(1, &Rotation3 { alpha: n.alpha, beta: n.beta, gamma: n.gamma })[1].get(0, 1))
        .collect();
    let f = so3_ft_forward(&g, &[data]).unwrap();
    for l in 0..4 {
        for m in -(l as i64)..=l as i64 {
            for n in -(l as i64)..=l as i64 {
                let e = if (l, m, n) == (1, 0, 1) { 1.0 / 3.0 } else { 0.0 };
                assert!((f.get(0, l, m, n) - e).norm() < 1e-12);
            }
        }
    }

    let mut s = SpectralBlocks::zeros(4, 1);
    s.set(0, 1, 0, 0, C::new(1.0, 0.0));
    let out = so3_ft_inverse(&s).unwrap();
    for (v, n) in out[0].iter().zip(g.nodes()) {
        assert!((v - 3.0 * n.beta.cos()).norm() < 1e-13);
    }
    let z = so3_ft_inverse(&SpectralBlocks::zeros(3, 2)).unwrap();
    assert!(z.iter().flatten().all(|v| v.norm() == 0.0));
}

#[test]
fn so3_round_trip_parseval_and_linearity() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let b = 8;
    let g = so3(b);
    let s = random::blocks(&mut rng, b, 3);
    let f = so3_ft_inverse(&s).unwrap();
    // Pointwise check against D-matrices.
    for idx in (0..g.len()).step_by(97) {
        let n = g.nodes()[idx];
        let ds = wigner_D_all(b - 1, &Rotation3 { alpha: n.alpha, beta: n.beta, gamma: n.gamma });
        for ch in 0..3 {
            let mut v = C::new(0.0, 0.0);
            for (l, d) in ds.iter().enumerate() {
                let t: C = s.blocks[ch][l].iter().zip(d.entries.iter()).map(|(a, b)| a * b).sum();
                v += t * (2 * l + 1) as f64;
            }
            assert!((v - f[ch][idx]).norm() < 1e-10 * v.norm().max(1.0));
        }
    }
    let back = so3_ft_forward(&g, &f).unwrap();
    let f2 = so3_ft_inverse(&back).unwrap();
    assert!(rel(&f2, &f) < 1e-10);
    let energy: f64 = f.iter().flat_map(|ch| ch.iter().zip(g.weights()).map(|(v, w)| v.norm_sqr() * w)).sum();
    assert!((energy - s.weighted_energy()).abs() / energy < 1e-10);

    let t = random::blocks(&mut rng, b, 3);
    let ft = so3_ft_inverse(&t).unwrap();
    let mix: Vec<Vec<C>> = f.iter().zip(&ft).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u * 2.0 - v * 0.5).collect()).collect();
    let lhs = so3_ft_forward(&g, &mix).unwrap();
    let (fa, fb) = (so3_ft_forward(&g, &f).unwrap(), so3_ft_forward(&g, &ft).unwrap());
    for ch in 0..3 {
        for l in 0..b {
            let d = &lhs.blocks[ch][l] - (&fa.blocks[ch][l] * C::new(2.0, 0.0) - &fb.blocks[ch][l] * C::new(0.5, 0.0));
            assert!(crate::util::max_norm(d.iter()) < 1e-13);
        }
    }
}

#[test]
fn aliasing_threshold() {
    // Degree B-1 is exact, degree B is not.
    let b = 6;
    let g = s2(b);
    let fine = s2(b + 1);
    for (deg, exact) in [(b - 1, true), (b, false)] {
        let data = vec![g.nodes().iter().map(|n| sph_harm(deg, 0, SpherePoint::new(n.alpha, n.beta))).collect()];
        let c = sht_forward(&g, &data, b).unwrap();
        let rec = sht_synthesize(&c, &fine).unwrap();
        let truth: Vec<Vec<C>> = vec![fine.nodes().iter().map(|n| sph_harm(deg, 0, SpherePoint::new(n.alpha, n.beta))).collect()];
        let e = rel(&rec, &truth);
        if exact {
            assert!(e < 1e-10, "{e}");
        } else {
            assert!(e > 0.5, "{e}");
        }
    }
}

#[test]
fn fiber_dft_selects_order() {
    let b = 5;
    let g = so3(b);
    let sg = s2(b);
    let u: Vec<C> = sg.nodes().iter().map(|n| C::new(n.beta.cos() + 0.3, n.alpha.sin())).collect();
    for k in -2i64..=2 {
        let lifted: Vec<C> = g
            .nodes()
            .iter()
            .enumerate()
            .map(|(i, n)| u[i / g.axis_len()] * C::from_polar(1.0, -(k as f64) * n.gamma))
            .collect();
        for m in -3i64..=3 {
            let out = fiber_dft(&g, &[lifted.clone()], m).unwrap();
            for (a, b) in out[0].iter().zip(&u) {
                let e = if m == k { *b } else { C::new(0.0, 0.0) };
                assert!((a - e).norm() < 1e-12);
            }
        }
    }
    assert!(fiber_dft(&g, &[vec![C::new(0.0, 0.0); g.len()]], 5).is_err());
}

#[test]
fn spin_transforms_match_lifted_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let b = 8;
    for k in -2i64..=2 {
        let a = random::column(&mut rng, b, k, 2);
        let sg = s2(b);
        let f = spin_synthesis(&a, &sg).unwrap();
        for (idx, n) in sg.nodes().iter().enumerate().step_by(11) {
            let v = spin_evaluate(&a, SpherePoint::new(n.alpha, n.beta));
            assert!((v[1] - f[1][idx]).norm() < 1e-10);
        }
        let back = spin_analysis(&sg, &f, k, b).unwrap();
        let d = back
            .coeffs
            .iter()
            .flatten()
            .flatten()
            .zip(a.coeffs.iter().flatten().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(d < 1e-12, "k={k} {d}");

        // Spectrum of the lift is confined to column k and equals the column spectrum.
        let g = so3(b);
        let lifted: Vec<Vec<C>> = f
            .iter()
            .map(|ch| {
                g.nodes()
                    .iter()
                    .enumerate()
                    .map(|(i, n)| ch[i / g.axis_len()] * C::from_polar(1.0, -(k as f64) * n.gamma))
                    .collect()
            })
            .collect();
        let blocks = so3_ft_forward(&g, &lifted).unwrap();
        assert!(blocks.off_column_energy(k) <= 1e-10 * blocks.weighted_energy());
        let col = blocks.column(k).unwrap();
        let d = col
            .coeffs
            .iter()
            .flatten()
            .flatten()
            .zip(a.coeffs.iter().flatten().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
        assert!(d < 1e-12);
    }
}

#[test]
fn scalar_spin_is_rescaled_sht() {
    // For k = 0: a^l_m = conj-free pairing with D_{m0}, while f^l_m pairs with conj(Y).
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let c = random::sht_coeffs(&mut rng, 5, 1);
    let g = s2(5);
    let f = sht_inverse(&c).unwrap();
    let a = spin_analysis(&g, &f, 0, 5).unwrap();
    let spin = spin_synthesis(&a, &g).unwrap();
    assert!(rel(&spin, &f) < 1e-12);
    let y = sph_harm_all(4, SpherePoint::new(0.3, 0.9));
    assert_eq!(y.len(), 5);
}

#[test]
fn blocks_json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let s = random::blocks(&mut rng, 3, 2);
    let back = SpectralBlocks::from_json(&s.to_json().unwrap()).unwrap();
    assert_eq!(back, s);
    let bad = s.to_json().unwrap().replace("\"format_version\":1", "\"format_version\":2");
    assert!(SpectralBlocks::from_json(&bad).is_err());
}

#[test]
fn bit_identical_across_thread_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let s = random::blocks(&mut rng, 6, 4);
    let run = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
            .install(|| so3_ft_forward(&so3(6), &so3_ft_inverse(&s).unwrap()).unwrap())
    };
    assert_eq!(run(1), run(4));
}

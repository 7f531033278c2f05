//! Independent oracle arithmetic for the estimate tests.
//!
//! Fields are sparse mode lists. Products are exact convolution sums over
//! the lists, with a trigonometric-quadrature route available as a second
//! opinion; norms are direct sums over the lists. Nothing here shares code
//! with the library's transform-based evaluation path.

#![allow(dead_code)]

use num_complex::Complex64;
use spectral_core::{SpectralScalar, WaveVector};
use std::collections::HashMap;
use std::f64::consts::TAU;

pub type Key = (i32, i32, i32);
pub type ModeList = Vec<(Key, Complex64)>;

fn lex_positive(k: Key) -> bool {
    k.0 > 0 || (k.0 == 0 && (k.1 > 0 || (k.1 == 0 && k.2 > 0)))
}

/// Builds the full Hermitian mode list of a real field from its
/// lexicographically positive half.
pub fn real_modes(half: &[(Key, (f64, f64))]) -> ModeList {
    let mut out = Vec::new();
    for &(k, (re, im)) in half {
        assert!(lex_positive(k), "pass only lexicographically positive modes");
        let z = Complex64::new(re, im);
        out.push((k, z));
        out.push(((-k.0, -k.1, -k.2), z.conj()));
    }
    out
}

/// Appends a real mean coefficient.
pub fn with_mean(mut list: ModeList, mean: f64) -> ModeList {
    list.push(((0, 0, 0), Complex64::new(mean, 0.0)));
    list
}

/// Loads a mode list into a grid field.
pub fn to_scalar(list: &ModeList, n: usize) -> SpectralScalar {
    let mut out = SpectralScalar::zeros(n);
    for &((k1, k2, k3), z) in list {
        let k = WaveVector { k1, k2, k3 };
        out.set(k, out.get(k) + z);
    }
    out
}

pub fn collapse(list: &ModeList) -> HashMap<Key, Complex64> {
    let mut map: HashMap<Key, Complex64> = HashMap::new();
    for &(k, z) in list {
        *map.entry(k).or_insert_with(|| Complex64::new(0.0, 0.0)) += z;
    }
    map
}

/// Exact product of two trigonometric polynomials by summing over all mode
/// pairs.
pub fn convolve(a: &ModeList, b: &ModeList) -> ModeList {
    let mut map: HashMap<Key, Complex64> = HashMap::new();
    for &((a1, a2, a3), x) in a {
        for &((b1, b2, b3), y) in b {
            *map.entry((a1 + b1, a2 + b2, a3 + b3))
                .or_insert_with(|| Complex64::new(0.0, 0.0)) += x * y;
        }
    }
    map.into_iter().collect()
}

pub fn add(a: &ModeList, b: &ModeList) -> ModeList {
    let mut out = a.clone();
    out.extend_from_slice(b);
    out
}

/// Partial derivative along one axis: multiplication by `2 pi i k_axis`.
pub fn dx(list: &ModeList, axis: usize) -> ModeList {
    list.iter()
        .map(|&(k, z)| {
            let kc = [k.0, k.1, k.2][axis] as f64;
            (k, z * Complex64::new(0.0, TAU * kc))
        })
        .collect()
}

/// `f1 d1(g) + f2 d2(g)` by convolution.
pub fn advect_modes(f1: &ModeList, f2: &ModeList, g: &ModeList) -> ModeList {
    add(&convolve(f1, &dx(g, 0)), &convolve(f2, &dx(g, 1)))
}

/// Divergence of the two-component field extended with zero vertical
/// component.
pub fn div_modes(f1: &ModeList, f2: &ModeList) -> ModeList {
    add(&dx(f1, 0), &dx(f2, 1))
}

/// Vertical antiderivative, from zero height, of the divergence: at each
/// nonzero vertical wavenumber the coefficient `(k1 a + k2 b) / k3`, with
/// the lower limit of the integral landing on the vertical-mean plane.
pub fn vint_modes(f1: &ModeList, f2: &ModeList) -> ModeList {
    let m1 = collapse(f1);
    let m2 = collapse(f2);
    let mut keys: Vec<Key> = m1.keys().chain(m2.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let mut map: HashMap<Key, Complex64> = HashMap::new();
    let zero = Complex64::new(0.0, 0.0);
    for k in keys {
        let a = *m1.get(&k).unwrap_or(&zero);
        let b = *m2.get(&k).unwrap_or(&zero);
        let combo = k.0 as f64 * a + k.1 as f64 * b;
        if k.2 == 0 {
            assert!(
                combo.norm() < 1e-12,
                "oracle input must have zero vertical mean"
            );
            continue;
        }
        let val = combo / k.2 as f64;
        *map.entry(k).or_insert(zero) += val;
        *map.entry((k.0, k.1, 0)).or_insert(zero) -= val;
    }
    map.into_iter().collect()
}

pub fn mode_weight(k: Key, r: f64, tau: f64) -> f64 {
    let knorm = ((k.0 * k.0 + k.1 * k.1 + k.2 * k.2) as f64).sqrt();
    if knorm == 0.0 {
        if r == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        knorm.powf(r) * (tau * knorm).exp()
    }
}

pub fn weight_modes(list: &ModeList, r: f64, tau: f64) -> ModeList {
    list.iter()
        .map(|&(k, z)| (k, z * mode_weight(k, r, tau)))
        .collect()
}

/// `sum_k w(k)^2 Re(a_k conj(b_k))` over the union of supports.
pub fn weighted_inner_modes(a: &ModeList, b: &ModeList, r: f64, tau: f64) -> f64 {
    let ma = collapse(a);
    let mb = collapse(b);
    let mut keys: Vec<Key> = ma.keys().collect::<Vec<_>>().into_iter().copied().collect();
    keys.sort_unstable();
    let mut acc = 0.0;
    for k in keys {
        if let Some(y) = mb.get(&k) {
            let w = mode_weight(k, r, tau);
            acc += w * w * (ma[&k] * y.conj()).re;
        }
    }
    acc
}

/// Plain coefficient pairing `sum_k a_k conj(b_k)`.
pub fn l2_inner_modes(a: &ModeList, b: &ModeList) -> Complex64 {
    let ma = collapse(a);
    let mb = collapse(b);
    let mut keys: Vec<Key> = ma.keys().copied().collect();
    keys.sort_unstable();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in keys {
        if let Some(y) = mb.get(&k) {
            acc += ma[&k] * y.conj();
        }
    }
    acc
}

pub fn seminorm_modes(list: &ModeList, r: f64, tau: f64) -> f64 {
    let map = collapse(list);
    let mut keys: Vec<Key> = map.keys().copied().collect();
    keys.sort_unstable();
    keys.iter()
        .map(|&k| {
            let w = mode_weight(k, r, tau);
            w * w * map[&k].norm_sqr()
        })
        .sum::<f64>()
        .sqrt()
}

pub fn seminorm_pair_modes(a: &ModeList, b: &ModeList, r: f64, tau: f64) -> f64 {
    seminorm_modes(a, r, tau).hypot(seminorm_modes(b, r, tau))
}

pub fn l2_modes(list: &ModeList) -> f64 {
    let map = collapse(list);
    map.values().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Seminorm and plain magnitude combined, the full weighted norm.
pub fn analytic_norm_modes(list: &ModeList, r: f64, tau: f64) -> f64 {
    seminorm_modes(list, r, tau).hypot(l2_modes(list))
}

pub fn mean_coeff(list: &ModeList) -> Complex64 {
    *collapse(list)
        .get(&(0, 0, 0))
        .unwrap_or(&Complex64::new(0.0, 0.0))
}

/// Maximum magnitude of a real field over a fine uniform grid, evaluated by
/// direct summation of the mode list.
pub fn sup_on_grid(list: &ModeList, m: usize) -> f64 {
    let vals = eval_on_grid(list, m);
    let mut worst = 0.0f64;
    for v in vals {
        assert!(v.im.abs() < 1e-10, "field expected real");
        worst = worst.max(v.re.abs());
    }
    worst
}

/// Direct evaluation of the trigonometric polynomial on an m^3 grid.
pub fn eval_on_grid(list: &ModeList, m: usize) -> Vec<Complex64> {
    let mut vals = vec![Complex64::new(0.0, 0.0); m * m * m];
    for j1 in 0..m {
        for j2 in 0..m {
            for j3 in 0..m {
                let mut s = Complex64::new(0.0, 0.0);
                for &((k1, k2, k3), c) in list {
                    let phase = TAU
                        * (k1 as f64 * j1 as f64 + k2 as f64 * j2 as f64 + k3 as f64 * j3 as f64)
                        / m as f64;
                    s += c * Complex64::new(phase.cos(), phase.sin());
                }
                vals[(j1 * m + j2) * m + j3] = s;
            }
        }
    }
    vals
}

/// Trapezoidal quadrature for one Fourier coefficient; exact whenever no
/// other mode of the integrand is congruent to `k` modulo the grid.
pub fn quadrature_coeff(vals: &[Complex64], m: usize, k: Key) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for j1 in 0..m {
        for j2 in 0..m {
            for j3 in 0..m {
                let phase = -TAU
                    * (k.0 as f64 * j1 as f64 + k.1 as f64 * j2 as f64 + k.2 as f64 * j3 as f64)
                    / m as f64;
                s += vals[(j1 * m + j2) * m + j3] * Complex64::new(phase.cos(), phase.sin());
            }
        }
    }
    s / (m * m * m) as f64
}

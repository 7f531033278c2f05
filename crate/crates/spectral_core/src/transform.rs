//! FFT plumbing: cached rustfft plans and in-place 3D transforms.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

type PlanKey = (usize, bool);

static PLANS: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("fft plan cache poisoned");
    cache
        .entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let direction = if forward {
                FftDirection::Forward
            } else {
                FftDirection::Inverse
            };
            planner.plan_fft(n, direction)
        })
        .clone()
}

/// In-place 3D transform on `(i1*n + i2)*n + i3` data. The forward direction
/// divides by N^3 to produce mean-normalized coefficients; the inverse is the
/// plain synthesis sum.
pub fn fft3(data: &mut [Complex64], n: usize, forward: bool) {
    debug_assert_eq!(data.len(), n * n * n);
    let fft = plan(n, forward);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];

    // Axis 3: contiguous lines.
    for chunk in data.chunks_exact_mut(n) {
        fft.process_with_scratch(chunk, &mut scratch);
    }

    // Axis 2: stride n within each i1 block.
    for i1 in 0..n {
        let block = i1 * n * n;
        for i3 in 0..n {
            for i2 in 0..n {
                line[i2] = data[block + i2 * n + i3];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for i2 in 0..n {
                data[block + i2 * n + i3] = line[i2];
            }
        }
    }

    // Axis 1: stride n*n.
    for i2 in 0..n {
        for i3 in 0..n {
            let base = i2 * n + i3;
            for i1 in 0..n {
                line[i1] = data[base + i1 * n * n];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for i1 in 0..n {
                data[base + i1 * n * n] = line[i1];
            }
        }
    }

    if forward {
        let scale = 1.0 / (n * n * n) as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }
}

/// In-place 2D transform on `i1*n + i2` data with the same conventions.
pub fn fft2(data: &mut [Complex64], n: usize, forward: bool) {
    debug_assert_eq!(data.len(), n * n);
    let fft = plan(n, forward);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut line = vec![Complex64::new(0.0, 0.0); n];

    for chunk in data.chunks_exact_mut(n) {
        fft.process_with_scratch(chunk, &mut scratch);
    }
    for i2 in 0..n {
        for i1 in 0..n {
            line[i1] = data[i1 * n + i2];
        }
        fft.process_with_scratch(&mut line, &mut scratch);
        for i1 in 0..n {
            data[i1 * n + i2] = line[i1];
        }
    }

    if forward {
        let scale = 1.0 / (n * n) as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
    }
}

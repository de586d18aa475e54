//! Unnormalized 3D complex transforms built from cached 1D rustfft plans.
//!
//! `inverse` maps series coefficients to grid values, `forward` maps grid
//! values to `n³ ×` series coefficients. Scratch space is allocated per call.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftDirection, FftPlanner};

pub(crate) struct Fft3 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Fft3 {
    pub fn get(n: usize) -> Arc<Fft3> {
        static CACHE: Lazy<Mutex<HashMap<usize, Arc<Fft3>>>> =
            Lazy::new(|| Mutex::new(HashMap::new()));
        let mut cache = CACHE.lock().expect("fft plan cache poisoned");
        cache
            .entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                Arc::new(Fft3 {
                    n,
                    forward: planner.plan_fft(n, FftDirection::Forward),
                    inverse: planner.plan_fft(n, FftDirection::Inverse),
                })
            })
            .clone()
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        assert_eq!(data.len(), n * n * n, "transform buffer has wrong length");
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        let mut slab = vec![Complex64::default(); n * n];

        // Axis 2 is contiguous.
        plan.process_with_scratch(data, &mut scratch);

        // Axis 1: transpose each i0-plane so i1 becomes contiguous.
        for plane in data.chunks_exact_mut(n * n) {
            for i1 in 0..n {
                for i2 in 0..n {
                    slab[i2 * n + i1] = plane[i1 * n + i2];
                }
            }
            plan.process_with_scratch(&mut slab, &mut scratch);
            for i1 in 0..n {
                for i2 in 0..n {
                    plane[i1 * n + i2] = slab[i2 * n + i1];
                }
            }
        }

        // Axis 0: gather an (i0, i2) slab for each i1.
        for i1 in 0..n {
            for i0 in 0..n {
                for i2 in 0..n {
                    slab[i2 * n + i0] = data[(i0 * n + i1) * n + i2];
                }
            }
            plan.process_with_scratch(&mut slab, &mut scratch);
            for i0 in 0..n {
                for i2 in 0..n {
                    data[(i0 * n + i1) * n + i2] = slab[i2 * n + i0];
                }
            }
        }
    }
}

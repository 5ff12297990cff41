//! Unnormalized multi-dimensional FFTs over row-major complex arrays.
//!
//! Plans are cached per thread, so concurrent callers never share planner state.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FftDirection {
    /// Kernel `exp(-i k x)`.
    Forward,
    /// Kernel `exp(+i k x)`, no 1/n factor.
    Backward,
}

/// In-place transform of `data` viewed as a row-major array of shape `dims`.
pub(crate) fn fft_nd(data: &mut [Complex64], dims: &[usize], direction: FftDirection) {
    let total: usize = dims.iter().product();
    assert_eq!(data.len(), total, "buffer does not match dims");
    for axis in 0..dims.len() {
        transform_axis(data, dims, axis, direction);
    }
}

fn transform_axis(data: &mut [Complex64], dims: &[usize], axis: usize, direction: FftDirection) {
    let n = dims[axis];
    if n <= 1 {
        return;
    }
    let stride: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        match direction {
            FftDirection::Forward => p.plan_fft_forward(n),
            FftDirection::Backward => p.plan_fft_inverse(n),
        }
    });
    if stride == 1 {
        fft.process(data);
        return;
    }
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for o in 0..outer {
        let base = o * n * stride;
        for s in 0..stride {
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[base + k * stride + s];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (k, v) in line.iter().enumerate() {
                data[base + k * stride + s] = *v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_dft(data: &[Complex64], dims: &[usize]) -> Vec<Complex64> {
        let total = data.len();
        let unravel = |mut i: usize| {
            let mut idx = vec![0; dims.len()];
            for d in (0..dims.len()).rev() {
                idx[d] = i % dims[d];
                i /= dims[d];
            }
            idx
        };
        (0..total)
            .map(|k| {
                let kk = unravel(k);
                (0..total)
                    .map(|j| {
                        let jj = unravel(j);
                        let phase: f64 = (0..dims.len())
                            .map(|d| (kk[d] * jj[d]) as f64 / dims[d] as f64)
                            .sum();
                        data[j] * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * phase)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn matches_direct_sum_on_mixed_shape() {
        let dims = [4, 3, 5];
        let data: Vec<Complex64> = (0..60)
            .map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let mut fast = data.clone();
        fft_nd(&mut fast, &dims, FftDirection::Forward);
        let slow = direct_dft(&data, &dims);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-10);
        }
    }
}

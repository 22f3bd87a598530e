//! Axis-by-axis n-dimensional FFT over row-major buffers, backed by `rustfft`.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// Unnormalized in-place transform of a row-major array of the given shape.
pub(crate) fn fft_nd(buf: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    debug_assert_eq!(buf.len(), shape.iter().product::<usize>());
    let total = buf.len();
    let mut stride = total;
    for &len in shape {
        stride /= len;
        if len == 1 {
            continue;
        }
        let fft = plan(len, direction);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let block = stride * len;
        if stride == 1 {
            for chunk in buf.chunks_exact_mut(len) {
                fft.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        let mut line = vec![Complex64::default(); len];
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = buf[base + j * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (j, v) in line.iter().enumerate() {
                    buf[base + j * stride] = *v;
                }
            }
        }
    }
}

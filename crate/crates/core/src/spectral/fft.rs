use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    // Plan cache confined to the executing thread; rayon workers each build
    // their own plans.
    static PLANS: RefCell<HashMap<(usize, bool), Arc<dyn Fft<f64>>>> =
        RefCell::new(HashMap::new());
}

/// In-place DFT. `inverse = false` computes `X_k = Σ_m x_m e^{-2πikm/n}`
/// (unnormalized); `inverse = true` computes `Σ_k x_k e^{+2πikm/n}`.
pub(crate) fn dft_inplace(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    let plan = PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    });
    plan.process(buf);
}

/// Apply the synthesis DFT along every axis of a row-major `dims` array.
/// After this, `buf[m] = Σ_k c_k e^{2πi k·m/M}` with the coefficient layout
/// the caller folded in.
pub(crate) fn nd_synthesis(buf: &mut [Complex64], dims: &[usize]) {
    nd_transform(buf, dims, true);
}

pub(crate) fn nd_transform(buf: &mut [Complex64], dims: &[usize], inverse: bool) {
    let total: usize = dims.iter().product();
    assert_eq!(buf.len(), total);
    if dims.len() == 1 {
        dft_inplace(buf, inverse);
        return;
    }
    // Transform one axis at a time through a strided gather/scatter.
    let mut line = Vec::new();
    for axis in 0..dims.len() {
        let n = dims[axis];
        let stride: usize = dims[axis + 1..].iter().product();
        let outer: usize = dims[..axis].iter().product();
        let block = n * stride;
        line.resize(n, Complex64::ZERO);
        for o in 0..outer {
            for s in 0..stride {
                let base = o * block + s;
                for i in 0..n {
                    line[i] = buf[base + i * stride];
                }
                dft_inplace(&mut line, inverse);
                for i in 0..n {
                    buf[base + i * stride] = line[i];
                }
            }
        }
    }
}

use num_complex::Complex64;

use crate::error::{domain, Error, Result};

/// `sup_y Σ_{x ∈ Ω} |K(x, y)| w(x)`: the computable certificate bounding
/// `λ_p(Ω, S_K)` for a reproducing-kernel space sampled on a grid.
///
/// `kernel` is row-major with row index `x` and column index `y`.
pub fn kernel_concentration(kernel: &[Complex64], weights: &[f64], mask: &[bool]) -> Result<f64> {
    let n = weights.len();
    if kernel.len() != n * n {
        return Err(Error::Shape(format!("kernel has {} entries, expected {}x{}", kernel.len(), n, n)));
    }
    if mask.len() != n {
        return Err(Error::Shape(format!("mask has {} entries, expected {n}", mask.len())));
    }
    if weights.iter().any(|&w| !(w >= 0.0)) {
        return domain("measure weights must be nonnegative");
    }
    let mut col = vec![0.0; n];
    for x in (0..n).filter(|&x| mask[x]) {
        let row = &kernel[x * n..(x + 1) * n];
        for (acc, k) in col.iter_mut().zip(row) {
            *acc += k.norm() * weights[x];
        }
    }
    Ok(col.into_iter().fold(0.0, f64::max))
}

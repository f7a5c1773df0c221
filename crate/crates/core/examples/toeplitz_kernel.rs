//! Minimal end-to-end use of the library (the README example): build a
//! Toeplitz section for a real symbol with one sign-change pattern and
//! read off its kernel dimension.

use hardy_core::toeplitz::{kernel_by_spectral_gap, toeplitz_matrix};
use hardy_core::{BoundaryFunction, Grid};
use num_complex::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Unimodular symbol exp(i * alpha * (pi - theta)) with alpha = 2.3:
    // the section kernel has dimension floor(alpha + 1/2) = 2.
    let alpha = 2.3;
    let grid = Grid::new(4096)?;
    let samples = (0..grid.n())
        .map(|j| Complex64::from_polar(1.0, alpha * (std::f64::consts::PI - grid.theta(j))))
        .collect();
    let symbol = BoundaryFunction::from_values(grid, samples);
    let kernel = kernel_by_spectral_gap(&toeplitz_matrix(&symbol, 512)?)?;
    println!("kernel dimension: {}", kernel.subspace.dim());
    Ok(())
}

//! FFT plumbing: cached plans, normalized spectra, spectral derivatives,
//! 2/3-rule dealiasing and trigonometric evaluation off the grid.
//!
//! Spectra are stored as Fourier-series coefficients: `to_spectrum` divides by
//! the node count so that `values(x_j) = sum_m c_m exp(i k_m . x_j)` with
//! `k_m = (pi / L) m`, `m = 0, 1, ..., n/2, -n/2+1, ..., -1` per axis.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::grid::Grid;

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (len, direction == FftDirection::Forward);
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(key)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            planner.plan_fft(len, direction)
        })
        .clone()
}

fn fft_axis0(data: &mut [Complex64], n: usize, rows: usize, direction: FftDirection) {
    let fft = plan(n, direction);
    for row in 0..rows {
        fft.process(&mut data[row * n..(row + 1) * n]);
    }
}

fn fft_axis1(data: &mut [Complex64], n: usize, direction: FftDirection) {
    let fft = plan(n, direction);
    let mut column = vec![Complex64::default(); n];
    for ix in 0..n {
        for iy in 0..n {
            column[iy] = data[iy * n + ix];
        }
        fft.process(&mut column);
        for iy in 0..n {
            data[iy * n + ix] = column[iy];
        }
    }
}

/// Forward transform to normalized Fourier-series coefficients.
pub fn to_spectrum(grid: &Grid, values: &[f64]) -> Vec<Complex64> {
    debug_assert_eq!(values.len(), grid.len());
    let n = grid.points_per_axis();
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    match grid.dim() {
        1 => fft_axis0(&mut data, n, 1, FftDirection::Forward),
        _ => {
            fft_axis0(&mut data, n, n, FftDirection::Forward);
            fft_axis1(&mut data, n, FftDirection::Forward);
        }
    }
    let scale = 1.0 / grid.len() as f64;
    for c in &mut data {
        *c *= scale;
    }
    data
}

/// Inverse transform back to real nodal values (imaginary parts dropped).
pub fn to_values(grid: &Grid, spectrum: &[Complex64]) -> Vec<f64> {
    debug_assert_eq!(spectrum.len(), grid.len());
    let n = grid.points_per_axis();
    let mut data = spectrum.to_vec();
    match grid.dim() {
        1 => fft_axis0(&mut data, n, 1, FftDirection::Inverse),
        _ => {
            fft_axis0(&mut data, n, n, FftDirection::Inverse);
            fft_axis1(&mut data, n, FftDirection::Inverse);
        }
    }
    data.into_iter().map(|c| c.re).collect()
}

/// Signed integer mode number for FFT bin `i` out of `n`.
#[inline]
pub fn mode_number(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Physical wavenumber of FFT bin `i`: `k = (pi / L) m`.
#[inline]
pub fn wavenumber(grid: &Grid, i: usize) -> f64 {
    std::f64::consts::PI / grid.half_width() * mode_number(i, grid.points_per_axis()) as f64
}

/// Per-axis mode numbers for a flat spectral index.
#[inline]
pub fn modes_of(grid: &Grid, idx: usize) -> [i64; 2] {
    let n = grid.points_per_axis();
    match grid.dim() {
        1 => [mode_number(idx, n), 0],
        _ => [mode_number(idx % n, n), mode_number(idx / n, n)],
    }
}

/// `|k|^2` at a flat spectral index.
#[inline]
pub fn k_squared(grid: &Grid, idx: usize) -> f64 {
    let base = std::f64::consts::PI / grid.half_width();
    let [mx, my] = modes_of(grid, idx);
    base * base * ((mx * mx + my * my) as f64)
}

/// Multiply a spectrum in place by `(i k_x)^gx (i k_y)^gy`.
///
/// The Nyquist mode is zeroed whenever an odd power of a derivative acts on
/// its axis; its sign is not representable on the real grid.
pub fn derivative_spectrum(grid: &Grid, spectrum: &mut [Complex64], gamma: [usize; 2]) {
    let n = grid.points_per_axis();
    let base = std::f64::consts::PI / grid.half_width();
    let nyquist = (n / 2) as i64;
    for (idx, c) in spectrum.iter_mut().enumerate() {
        let [mx, my] = modes_of(grid, idx);
        let mut factor = Complex64::new(1.0, 0.0);
        for (m, g) in [(mx, gamma[0]), (my, gamma[1])] {
            if g == 0 {
                continue;
            }
            if m == nyquist && g % 2 == 1 {
                factor = Complex64::new(0.0, 0.0);
                break;
            }
            let ik = Complex64::new(0.0, base * m as f64);
            factor *= ik.powu(g as u32);
        }
        *c *= factor;
    }
}

/// Zero all modes with `|m| > n/3` on any axis (2/3 rule).
pub fn dealias(grid: &Grid, spectrum: &mut [Complex64]) {
    let n = grid.points_per_axis();
    let cutoff = (n / 3) as i64;
    for (idx, c) in spectrum.iter_mut().enumerate() {
        let [mx, my] = modes_of(grid, idx);
        if mx.abs() > cutoff || my.abs() > cutoff {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Evaluate the Fourier series at one arbitrary point.
///
/// FFT bin 0 corresponds to the node at `x = -L`, so phases run over
/// `x + L` rather than `x`.
pub fn eval_at(grid: &Grid, spectrum: &[Complex64], point: [f64; 2]) -> f64 {
    let n = grid.points_per_axis();
    let base = std::f64::consts::PI / grid.half_width();
    let px = point[0] + grid.half_width();
    let py = point[1] + grid.half_width();
    match grid.dim() {
        1 => {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, c) in spectrum.iter().enumerate() {
                let k = base * mode_number(i, n) as f64;
                acc += c * Complex64::from_polar(1.0, k * px);
            }
            acc.re
        }
        _ => {
            // Partial sum along x for the fixed y phase, then combine.
            let mut acc = Complex64::new(0.0, 0.0);
            for iy in 0..n {
                let ky = base * mode_number(iy, n) as f64;
                let phase_y = Complex64::from_polar(1.0, ky * py);
                let mut row = Complex64::new(0.0, 0.0);
                for ix in 0..n {
                    let kx = base * mode_number(ix, n) as f64;
                    row += spectrum[iy * n + ix] * Complex64::from_polar(1.0, kx * px);
                }
                acc += row * phase_y;
            }
            acc.re
        }
    }
}

/// Evaluate the Fourier series on a tensor grid of target coordinates.
///
/// Returns values indexed `iy * xs.len() + ix` (x fastest), matching the flat
/// field layout when `xs == ys`. Factorizing the sum keeps rescaling cheap.
pub fn eval_on_tensor_grid(grid: &Grid, spectrum: &[Complex64], xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = grid.points_per_axis();
    let base = std::f64::consts::PI / grid.half_width();
    let l = grid.half_width();
    match grid.dim() {
        1 => xs
            .iter()
            .map(|&x| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, c) in spectrum.iter().enumerate() {
                    let k = base * mode_number(i, n) as f64;
                    acc += c * Complex64::from_polar(1.0, k * (x + l));
                }
                acc.re
            })
            .collect(),
        _ => {
            // First contract the x axis: partial[iy_mode][jx] over target xs.
            let mut partial = vec![Complex64::new(0.0, 0.0); n * xs.len()];
            for iy in 0..n {
                for (jx, &x) in xs.iter().enumerate() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for ix in 0..n {
                        let kx = base * mode_number(ix, n) as f64;
                        acc += spectrum[iy * n + ix] * Complex64::from_polar(1.0, kx * (x + l));
                    }
                    partial[iy * xs.len() + jx] = acc;
                }
            }
            let mut out = vec![0.0; xs.len() * ys.len()];
            for (jy, &y) in ys.iter().enumerate() {
                for jx in 0..xs.len() {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for iy in 0..n {
                        let ky = base * mode_number(iy, n) as f64;
                        acc += partial[iy * xs.len() + jx] * Complex64::from_polar(1.0, ky * (y + l));
                    }
                    out[jy * xs.len() + jx] = acc.re;
                }
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn roundtrip_1d() {
        let grid = Grid::new(1, 64, 8.0).unwrap();
        let values: Vec<f64> = (0..64).map(|j| (grid.axis_coord(j) * 0.7).sin()).collect();
        let spec = to_spectrum(&grid, &values);
        let back = to_values(&grid, &spec);
        for (a, b) in values.iter().zip(&back) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn roundtrip_2d() {
        let grid = Grid::new(2, 16, 4.0).unwrap();
        let values: Vec<f64> = grid
            .iter_nodes()
            .map(|(_, [x, y])| (0.5 * x).sin() * (0.25 * y).cos())
            .collect();
        let spec = to_spectrum(&grid, &values);
        let back = to_values(&grid, &spec);
        for (a, b) in values.iter().zip(&back) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn derivative_of_mode_is_exact() {
        let grid = Grid::new(1, 64, 8.0).unwrap();
        // k = pi/L * 4 is an exact grid mode.
        let k = std::f64::consts::PI / 8.0 * 4.0;
        let values: Vec<f64> = (0..64).map(|j| (k * grid.axis_coord(j)).sin()).collect();
        let mut spec = to_spectrum(&grid, &values);
        derivative_spectrum(&grid, &mut spec, [2, 0]);
        let d2 = to_values(&grid, &spec);
        for (j, v) in d2.iter().enumerate() {
            let expected = -k * k * (k * grid.axis_coord(j)).sin();
            assert_abs_diff_eq!(v, &expected, epsilon = 1e-10);
        }
    }

    #[test]
    fn off_grid_evaluation_matches_on_grid() {
        let grid = Grid::new(1, 64, 8.0).unwrap();
        let k = std::f64::consts::PI / 8.0 * 3.0;
        let values: Vec<f64> = (0..64).map(|j| (k * grid.axis_coord(j)).cos()).collect();
        let spec = to_spectrum(&grid, &values);
        for &x in &[0.113, -3.77, 5.2501] {
            assert_abs_diff_eq!(eval_at(&grid, &spec, [x, 0.0]), (k * x).cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn tensor_evaluation_matches_pointwise_2d() {
        let grid = Grid::new(2, 16, 4.0).unwrap();
        let values: Vec<f64> = grid
            .iter_nodes()
            .map(|(_, [x, y])| (0.5 * x + 0.25 * y).sin())
            .collect();
        let spec = to_spectrum(&grid, &values);
        let xs = [0.3, -1.2];
        let ys = [0.9, 2.1];
        let tensor = eval_on_tensor_grid(&grid, &spec, &xs, &ys);
        for (jy, &y) in ys.iter().enumerate() {
            for (jx, &x) in xs.iter().enumerate() {
                assert_abs_diff_eq!(
                    tensor[jy * xs.len() + jx],
                    eval_at(&grid, &spec, [x, y]),
                    epsilon = 1e-12
                );
            }
        }
    }
}

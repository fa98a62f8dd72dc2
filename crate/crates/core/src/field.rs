//! Scalar fields on the periodic grid with an optional cone background.
//!
//! A `Field` stores the residual `u - background` at the nodes. All far-field
//! linear growth lives in the background, which is differentiated in closed
//! form; the residual is treated spectrally.

use rustfft::num_complex::Complex64;

use crate::background::ConeData;
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;

/// Width of the boundary ring, in grid cells per side, used by decay checks.
const RING_CELLS: usize = 2;

/// Derivative fields of `u` up to a requested total order.
///
/// The Hessian is stored in symmetric packed form (xx, xy, yy), so symmetry
/// holds identically. Third and fourth orders are filled on demand.
#[derive(Debug, Clone)]
pub struct Jet {
    pub grid: Grid,
    pub value: Vec<f64>,
    /// (x, y); the y slot is zero in 1D.
    pub grad: Vec<[f64; 2]>,
    /// (xx, xy, yy)
    pub hess: Vec<[f64; 3]>,
    /// (xxx, xxy, xyy, yyy)
    pub third: Option<Vec<[f64; 4]>>,
    /// (xxxx, xxxy, xxyy, xyyy, yyyy)
    pub fourth: Option<Vec<[f64; 5]>>,
}

impl Jet {
    pub fn grad_norm(&self, idx: usize) -> f64 {
        let [gx, gy] = self.grad[idx];
        gx.hypot(gy)
    }

    /// Frobenius norm of the Hessian at a node.
    pub fn hess_norm(&self, idx: usize) -> f64 {
        let [xx, xy, yy] = self.hess[idx];
        (xx * xx + 2.0 * xy * xy + yy * yy).sqrt()
    }

    pub fn max_grad_norm(&self) -> f64 {
        (0..self.value.len()).fold(0.0f64, |m, i| m.max(self.grad_norm(i)))
    }

    pub fn laplacian(&self, idx: usize) -> f64 {
        self.hess[idx][0] + self.hess[idx][2]
    }
}

/// Scalar samples on a grid, split as background + periodic residual.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
    background: Option<ConeData>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>, background: Option<ConeData>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(bg) = &background {
            if bg.dim != grid.dim() {
                return Err(Error::GridMismatch(format!(
                    "background dimension {} vs grid dimension {}",
                    bg.dim,
                    grid.dim()
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("field contains non-finite values".into()));
        }
        Ok(Field { grid, values, background })
    }

    pub fn zero(grid: Grid) -> Self {
        Field {
            grid,
            values: vec![0.0; grid.len()],
            background: None,
        }
    }

    /// A field that is exactly the background (zero residual).
    pub fn from_background(grid: Grid, cone: ConeData) -> Result<Self> {
        Field::new(grid, vec![0.0; grid.len()], Some(cone))
    }

    /// Sample an arbitrary function into a plain field (no background).
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> f64) -> Self {
        let values = grid.iter_nodes().map(|(_, p)| f(p)).collect();
        Field { grid, values, background: None }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Residual samples (`u - background`).
    pub fn residual(&self) -> &[f64] {
        &self.values
    }

    pub fn residual_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn background(&self) -> Option<&ConeData> {
        self.background.as_ref()
    }

    pub fn set_background(&mut self, background: Option<ConeData>) {
        self.background = background;
    }

    /// Full values `background + residual` at the nodes.
    pub fn total_values(&self) -> Vec<f64> {
        match &self.background {
            None => self.values.clone(),
            Some(bg) => self
                .grid
                .iter_nodes()
                .map(|(i, p)| self.values[i] + bg.value_at(p))
                .collect(),
        }
    }

    /// Fourier-series coefficients of the residual.
    pub fn residual_spectrum(&self) -> Vec<Complex64> {
        fft::to_spectrum(&self.grid, &self.values)
    }

    /// Evaluate `u` at an arbitrary point by trigonometric interpolation of
    /// the residual plus the analytic background.
    pub fn eval_at(&self, point: [f64; 2]) -> f64 {
        let spec = self.residual_spectrum();
        let mut v = fft::eval_at(&self.grid, &spec, point);
        if let Some(bg) = &self.background {
            v += bg.value_at(point);
        }
        v
    }

    /// Integral of the residual over the box (periodic trapezoid).
    pub fn residual_integral(&self) -> f64 {
        let h = self.grid.spacing();
        let cell = h.powi(self.grid.dim() as i32);
        self.values.iter().sum::<f64>() * cell
    }

    /// Max |residual| over the boundary ring divided by max |residual| overall.
    pub fn boundary_ring_ratio(&self) -> f64 {
        let n = self.grid.points_per_axis();
        let is_ring_axis = |j: usize| j <= RING_CELLS || j >= n - RING_CELLS;
        let mut ring: f64 = 0.0;
        let mut interior: f64 = 0.0;
        for i in 0..self.values.len() {
            let v = self.values[i].abs();
            let on_ring = match self.grid.dim() {
                1 => is_ring_axis(i),
                _ => is_ring_axis(i % n) || is_ring_axis(i / n),
            };
            if on_ring {
                ring = ring.max(v);
            }
            interior = interior.max(v);
        }
        if interior == 0.0 {
            0.0
        } else {
            ring / interior
        }
    }

    pub fn check_boundary_decay(&self, tolerance: f64) -> Result<()> {
        let ratio = self.boundary_ring_ratio();
        if ratio > tolerance {
            Err(Error::ResidualNotDecaying { ratio, tolerance })
        } else {
            Ok(())
        }
    }

    /// Spectral derivative `d^gamma u`, combining the residual spectrum with
    /// the closed-form background derivative. The result is a plain field.
    pub fn spectral_derivative(&self, gamma: [usize; 2]) -> Result<Field> {
        let order = gamma[0] + gamma[1];
        if order > 4 {
            return Err(Error::OrderTooHigh(order, 4));
        }
        if self.grid.dim() == 1 && gamma[1] > 0 {
            return Err(Error::InvalidDimension(2));
        }
        let mut spec = self.residual_spectrum();
        fft::derivative_spectrum(&self.grid, &mut spec, gamma);
        let mut values = fft::to_values(&self.grid, &spec);
        if let Some(bg) = &self.background {
            if order == 0 {
                for (i, p) in self.grid.iter_nodes() {
                    values[i] += bg.value_at(p);
                }
            } else {
                for (i, p) in self.grid.iter_nodes() {
                    values[i] += bg.jet_at(p)?.derivative(gamma[0], gamma[1]);
                }
            }
        }
        Field::new(self.grid, values, None)
    }

    /// All derivative fields up to `order` (2, 3 or 4).
    pub fn jets(&self, order: usize) -> Result<Jet> {
        if !(2..=4).contains(&order) {
            return Err(Error::OrderTooHigh(order, 4));
        }
        let spec = self.residual_spectrum();
        let mut jet = residual_jets(&self.grid, &spec, order);
        if let Some(bg) = &self.background {
            let bg_jet = background_jet(&self.grid, bg, order)?;
            add_jets(&mut jet, &bg_jet);
        }
        Ok(jet)
    }

    /// `(1/lambda) u(lambda x)` for `lambda >= 1`.
    ///
    /// The residual is resampled by trigonometric interpolation where
    /// `lambda x` stays inside the box and set to zero outside (valid because
    /// the residual must decay at the boundary; `ring_tol` gates this). The
    /// cone background rescales exactly within its own family.
    pub fn rescaled(&self, lambda: f64, ring_tol: f64) -> Result<Field> {
        if lambda < 1.0 {
            return Err(Error::RescaleOutOfDomain {
                lambda,
                reason: "only lambda >= 1 keeps the data on the grid".into(),
            });
        }
        if lambda > 1.0 {
            let ratio = self.boundary_ring_ratio();
            if ratio > ring_tol {
                return Err(Error::RescaleOutOfDomain {
                    lambda,
                    reason: format!(
                        "residual boundary ring at {ratio:.3e} of interior exceeds {ring_tol:.3e}; \
                         zero extension invalid"
                    ),
                });
            }
        }
        let grid = self.grid;
        let n = grid.points_per_axis();
        let l = grid.half_width();
        let spec = self.residual_spectrum();
        let targets: Vec<f64> = (0..n).map(|j| lambda * grid.axis_coord(j)).collect();
        let values = match grid.dim() {
            1 => {
                let row = fft::eval_on_tensor_grid(&grid, &spec, &targets, &[0.0]);
                (0..n)
                    .map(|j| {
                        if targets[j].abs() <= l {
                            row[j] / lambda
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
            _ => {
                let vals = fft::eval_on_tensor_grid(&grid, &spec, &targets, &targets);
                (0..grid.len())
                    .map(|idx| {
                        let (jx, jy) = (idx % n, idx / n);
                        if targets[jx].abs() <= l && targets[jy].abs() <= l {
                            vals[idx] / lambda
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        };
        Field::new(grid, values, self.background.map(|bg| bg.rescaled(lambda)))
    }

    /// C^k norm over the compact ball `|x| <= compact_radius`:
    /// max over nodes of the sum of |d^gamma u| over all |gamma| <= k.
    pub fn restrict_sup_norm(&self, compact_radius: f64, k: usize) -> Result<f64> {
        ck_norm_of(
            &self.grid,
            compact_radius,
            k,
            |gamma| self.spectral_derivative(gamma),
        )
    }

    /// C^k distance between two fields on the compact ball. Each field keeps
    /// its own background, so differences of shifted cones stay spectrally
    /// clean.
    pub fn ck_distance(&self, other: &Field, compact_radius: f64, k: usize) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("ck_distance needs matching grids".into()));
        }
        ck_norm_of(&self.grid, compact_radius, k, |gamma| {
            let a = self.spectral_derivative(gamma)?;
            let b = other.spectral_derivative(gamma)?;
            let values = a
                .residual()
                .iter()
                .zip(b.residual())
                .map(|(x, y)| x - y)
                .collect();
            Field::new(self.grid, values, None)
        })
    }
}

fn ck_norm_of(
    grid: &Grid,
    compact_radius: f64,
    k: usize,
    mut derivative: impl FnMut([usize; 2]) -> Result<Field>,
) -> Result<f64> {
    if compact_radius >= grid.half_width() / 2.0 {
        return Err(Error::RadiusExceedsSafeRegion {
            radius: compact_radius,
            half_width: grid.half_width(),
        });
    }
    if k > 4 {
        return Err(Error::OrderTooHigh(k, 4));
    }
    let mut acc = vec![0.0f64; grid.len()];
    for order in 0..=k {
        for gamma in multi_indices(grid.dim(), order) {
            let d = derivative(gamma)?;
            for (a, v) in acc.iter_mut().zip(d.residual()) {
                *a += v.abs();
            }
        }
    }
    let mut best = 0.0f64;
    for (i, _) in grid.iter_nodes() {
        if grid.radius(i) <= compact_radius {
            best = best.max(acc[i]);
        }
    }
    Ok(best)
}

/// Multi-indices of exact total order `order` for the given dimension.
pub fn multi_indices(dim: usize, order: usize) -> Vec<[usize; 2]> {
    match dim {
        1 => vec![[order, 0]],
        _ => (0..=order).map(|gy| [order - gy, gy]).collect(),
    }
}

/// Derivative fields of a periodic residual, all orders up to `order`.
pub fn residual_jets(grid: &Grid, spectrum: &[Complex64], order: usize) -> Jet {
    let n = grid.len();
    let deriv = |gamma: [usize; 2]| -> Vec<f64> {
        let mut s = spectrum.to_vec();
        fft::derivative_spectrum(grid, &mut s, gamma);
        fft::to_values(grid, &s)
    };
    let value = fft::to_values(grid, spectrum);
    let one_d = grid.dim() == 1;
    let zeros = vec![0.0; n];

    let dx = deriv([1, 0]);
    let dy = if one_d { zeros.clone() } else { deriv([0, 1]) };
    let grad = (0..n).map(|i| [dx[i], dy[i]]).collect();

    let dxx = deriv([2, 0]);
    let dxy = if one_d { zeros.clone() } else { deriv([1, 1]) };
    let dyy = if one_d { zeros.clone() } else { deriv([0, 2]) };
    let hess = (0..n).map(|i| [dxx[i], dxy[i], dyy[i]]).collect();

    let third = (order >= 3).then(|| {
        let a = deriv([3, 0]);
        let b = if one_d { zeros.clone() } else { deriv([2, 1]) };
        let c = if one_d { zeros.clone() } else { deriv([1, 2]) };
        let d = if one_d { zeros.clone() } else { deriv([0, 3]) };
        (0..n).map(|i| [a[i], b[i], c[i], d[i]]).collect()
    });
    let fourth = (order >= 4).then(|| {
        let a = deriv([4, 0]);
        let b = if one_d { zeros.clone() } else { deriv([3, 1]) };
        let c = if one_d { zeros.clone() } else { deriv([2, 2]) };
        let d = if one_d { zeros.clone() } else { deriv([1, 3]) };
        let e = if one_d { zeros.clone() } else { deriv([0, 4]) };
        (0..n).map(|i| [a[i], b[i], c[i], d[i], e[i]]).collect()
    });

    Jet { grid: *grid, value, grad, hess, third, fourth }
}

/// Closed-form background jet sampled on the grid.
pub fn background_jet(grid: &Grid, cone: &ConeData, order: usize) -> Result<Jet> {
    let n = grid.len();
    let mut jet = Jet {
        grid: *grid,
        value: vec![0.0; n],
        grad: vec![[0.0; 2]; n],
        hess: vec![[0.0; 3]; n],
        third: (order >= 3).then(|| vec![[0.0; 4]; n]),
        fourth: (order >= 4).then(|| vec![[0.0; 5]; n]),
    };
    for (i, p) in grid.iter_nodes() {
        let b = cone.jet_at(p)?;
        jet.value[i] = b.value;
        jet.grad[i] = b.d1;
        jet.hess[i] = b.d2;
        if let Some(t) = &mut jet.third {
            t[i] = b.d3;
        }
        if let Some(f) = &mut jet.fourth {
            f[i] = b.d4;
        }
    }
    Ok(jet)
}

/// Accumulate `other` into `jet` (used to add background jets to residual jets).
pub fn add_jets(jet: &mut Jet, other: &Jet) {
    for i in 0..jet.value.len() {
        jet.value[i] += other.value[i];
        for a in 0..2 {
            jet.grad[i][a] += other.grad[i][a];
        }
        for a in 0..3 {
            jet.hess[i][a] += other.hess[i][a];
        }
    }
    if let (Some(t), Some(o)) = (&mut jet.third, &other.third) {
        for i in 0..t.len() {
            for a in 0..4 {
                t[i][a] += o[i][a];
            }
        }
    }
    if let (Some(f), Some(o)) = (&mut jet.fourth, &other.fourth) {
        for i in 0..f.len() {
            for a in 0..5 {
                f[i][a] += o[i][a];
            }
        }
    }
}

/// Split raw samples into `cone + residual`, enforcing boundary decay.
pub fn split_background(
    grid: Grid,
    raw: &[f64],
    cone: ConeData,
    decay_tolerance: f64,
) -> Result<Field> {
    if raw.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "raw samples {} vs grid {}",
            raw.len(),
            grid.len()
        )));
    }
    let values: Vec<f64> = grid
        .iter_nodes()
        .map(|(i, p)| raw[i] - cone.value_at(p))
        .collect();
    let field = Field::new(grid, values, Some(cone))?;
    field.check_boundary_decay(decay_tolerance)?;
    Ok(field)
}

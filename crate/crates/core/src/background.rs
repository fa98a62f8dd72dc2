//! Cone (and affine) backgrounds for entire graphs with linear growth.
//!
//! A field on the periodic box represents `u = background + residual`, where
//! the background carries the far-field linear growth analytically and the
//! residual decays toward the boundary. Backgrounds are degree-1 homogeneous
//! cones, regularized near their vertex so that all derivatives up to fourth
//! order exist in closed form.
//!
//! The regularization replaces `|x|` inside the ball `|x| <= r0 = 2*delta` by
//! `r0 * q((x/r0)^2)` where `q` is the degree-8 Taylor polynomial of `sqrt(u)`
//! at `u = 1`. Outside the ball the cone is exact, so rescaling
//! `x -> lambda x` maps the family onto itself (`delta -> delta / lambda`)
//! and homogeneity holds exactly away from the vertex. The join at `r0` is
//! C^8, which keeps evolved residuals smooth enough for spectral fourth
//! derivatives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Taylor coefficients of `sqrt(u)` at `u = 1`, degree 8.
const SQRT_TAYLOR: [f64; 9] = [
    1.0,
    1.0 / 2.0,
    -1.0 / 8.0,
    1.0 / 16.0,
    -5.0 / 128.0,
    7.0 / 256.0,
    -21.0 / 1024.0,
    33.0 / 2048.0,
    -429.0 / 32768.0,
];

/// Taylor coefficients of `1/sqrt(u)` at `u = 1`, degree 8.
const INV_SQRT_TAYLOR: [f64; 9] = [
    1.0,
    -1.0 / 2.0,
    3.0 / 8.0,
    -5.0 / 16.0,
    35.0 / 128.0,
    -63.0 / 256.0,
    231.0 / 1024.0,
    -429.0 / 2048.0,
    6435.0 / 32768.0,
];

fn poly_at(coeffs: &[f64; 9], u: f64) -> f64 {
    let w = u - 1.0;
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * w + c;
    }
    acc
}

// ---------------------------------------------------------------------------
// Truncated bivariate Taylor arithmetic (total degree <= 4).
// ---------------------------------------------------------------------------

/// Bivariate Taylor polynomial truncated at total degree 4.
///
/// `c[i][j]` is the coefficient of `dx^i dy^j`; entries with `i + j > 4` are
/// kept at zero. Backgrounds are evaluated on these jets once per grid, so
/// all mixed partials up to fourth order come out of a single closed-form
/// expression with no hand differentiation.
#[derive(Debug, Clone, Copy)]
pub struct Taylor4 {
    c: [[f64; 5]; 5],
}

impl Taylor4 {
    pub fn constant(v: f64) -> Self {
        let mut c = [[0.0; 5]; 5];
        c[0][0] = v;
        Taylor4 { c }
    }

    pub fn variable_x(x0: f64) -> Self {
        let mut t = Self::constant(x0);
        t.c[1][0] = 1.0;
        t
    }

    pub fn variable_y(y0: f64) -> Self {
        let mut t = Self::constant(y0);
        t.c[0][1] = 1.0;
        t
    }

    pub fn value(&self) -> f64 {
        self.c[0][0]
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        for row in &mut out.c {
            for v in row {
                *v *= s;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..5 {
            for j in 0..5 {
                out.c[i][j] += other.c[i][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::constant(0.0);
        for i in 0..5 {
            for j in 0..5 {
                if i + j > 4 || self.c[i][j] == 0.0 {
                    continue;
                }
                for a in 0..5 {
                    for b in 0..5 {
                        if i + j + a + b > 4 {
                            continue;
                        }
                        out.c[i + a][j + b] += self.c[i][j] * other.c[a][b];
                    }
                }
            }
        }
        out
    }

    /// `self^a` by the binomial series around the constant term, which must
    /// be strictly positive.
    pub fn powf_trunc(&self, a: f64) -> Self {
        let u0 = self.value();
        assert!(u0 > 0.0, "powf_trunc needs a positive constant term");
        let mut w = self.scale(1.0 / u0);
        w.c[0][0] = 0.0;
        // binom(a, j) * w^j, j = 0..4
        let mut out = Self::constant(1.0);
        let mut wj = Self::constant(1.0);
        let mut coeff = 1.0;
        for j in 1..=4usize {
            coeff *= (a - (j as f64 - 1.0)) / j as f64;
            wj = wj.mul(&w);
            out = out.add(&wj.scale(coeff));
        }
        out.scale(u0.powf(a))
    }

    /// Evaluate a univariate polynomial (coefficients about `u = 1`) on the jet.
    fn poly(&self, coeffs: &[f64; 9]) -> Self {
        let mut w = *self;
        w.c[0][0] -= 1.0;
        let mut acc = Self::constant(0.0);
        for &c in coeffs.iter().rev() {
            acc = acc.mul(&w).add(&Self::constant(c));
        }
        acc
    }
}

/// Derivatives of a background at one point, up to total order 4.
///
/// Storage follows the number of distinct multi-indices per order in 2D;
/// in 1D only the pure-x entries are meaningful.
#[derive(Debug, Clone, Copy, Default)]
pub struct BgJet {
    pub value: f64,
    /// (x, y)
    pub d1: [f64; 2],
    /// (xx, xy, yy)
    pub d2: [f64; 3],
    /// (xxx, xxy, xyy, yyy)
    pub d3: [f64; 4],
    /// (xxxx, xxxy, xxyy, xyyy, yyyy)
    pub d4: [f64; 5],
}

impl BgJet {
    fn from_taylor(t: &Taylor4) -> Self {
        let f = |i: usize, j: usize| {
            let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
            t.c[i][j] * fact[i] * fact[j]
        };
        BgJet {
            value: f(0, 0),
            d1: [f(1, 0), f(0, 1)],
            d2: [f(2, 0), f(1, 1), f(0, 2)],
            d3: [f(3, 0), f(2, 1), f(1, 2), f(0, 3)],
            d4: [f(4, 0), f(3, 1), f(2, 2), f(1, 3), f(0, 4)],
        }
    }

    /// Derivative for the multi-index `(gx, gy)`, `gx + gy <= 4`.
    pub fn derivative(&self, gx: usize, gy: usize) -> f64 {
        match (gx, gy) {
            (0, 0) => self.value,
            (1, 0) => self.d1[0],
            (0, 1) => self.d1[1],
            (2, 0) => self.d2[0],
            (1, 1) => self.d2[1],
            (0, 2) => self.d2[2],
            (3, 0) => self.d3[0],
            (2, 1) => self.d3[1],
            (1, 2) => self.d3[2],
            (0, 3) => self.d3[3],
            (4, 0) => self.d4[0],
            (3, 1) => self.d4[1],
            (2, 2) => self.d4[2],
            (1, 3) => self.d4[3],
            (0, 4) => self.d4[4],
            _ => panic!("derivative order out of range: ({gx}, {gy})"),
        }
    }

    /// Laplacian.
    pub fn laplacian(&self, dim: usize) -> f64 {
        if dim == 1 {
            self.d2[0]
        } else {
            self.d2[0] + self.d2[2]
        }
    }

    /// Bilaplacian.
    pub fn bilaplacian(&self, dim: usize) -> f64 {
        if dim == 1 {
            self.d4[0]
        } else {
            self.d4[0] + 2.0 * self.d4[2] + self.d4[4]
        }
    }
}

// ---------------------------------------------------------------------------
// Cone data
// ---------------------------------------------------------------------------

/// Shape of the degree-1 homogeneous part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeProfile {
    /// 1D: slopes `m_plus` as `x -> +inf` and `-m_minus` as `x -> -inf`,
    /// i.e. `v0(x) = |x| * psi(sign x)` with `psi(+1) = m_plus`,
    /// `psi(-1) = m_minus`.
    TwoSlope { m_plus: f64, m_minus: f64 },
    /// 2D radial cone `m |x|`.
    Radial { m: f64 },
    /// 2D angular profile truncated at the second circular harmonic:
    /// `psi(theta) = c0 + c1 cos + s1 sin + c2 cos 2theta + s2 sin 2theta`.
    Harmonic2 { c0: f64, c1: f64, s1: f64, c2: f64, s2: f64 },
}

/// Self-similar background data: a smoothed cone, optionally shifted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeData {
    pub dim: usize,
    pub profile: ConeProfile,
    /// Vertex regularization scale; the cone is exact for `|x| >= 2 * delta`.
    pub smoothing_delta: f64,
    /// Vertex location (shift of the whole background).
    #[serde(default)]
    pub offset: [f64; 2],
}

impl ConeData {
    pub fn two_slope(m_plus: f64, m_minus: f64, delta: f64) -> Self {
        ConeData {
            dim: 1,
            profile: ConeProfile::TwoSlope { m_plus, m_minus },
            smoothing_delta: delta,
            offset: [0.0; 2],
        }
    }

    pub fn radial(m: f64, delta: f64) -> Self {
        ConeData {
            dim: 2,
            profile: ConeProfile::Radial { m },
            smoothing_delta: delta,
            offset: [0.0; 2],
        }
    }

    /// Pure affine background `a . x` (no cone part, any smoothing).
    pub fn plane(dim: usize, gradient: [f64; 2]) -> Self {
        match dim {
            1 => ConeData {
                dim: 1,
                profile: ConeProfile::TwoSlope {
                    m_plus: gradient[0],
                    m_minus: -gradient[0],
                },
                smoothing_delta: 1.0,
                offset: [0.0; 2],
            },
            _ => ConeData {
                dim: 2,
                profile: ConeProfile::Harmonic2 {
                    c0: 0.0,
                    c1: gradient[0],
                    s1: gradient[1],
                    c2: 0.0,
                    s2: 0.0,
                },
                smoothing_delta: 1.0,
                offset: [0.0; 2],
            },
        }
    }

    pub fn with_offset(mut self, offset: [f64; 2]) -> Self {
        self.offset = offset;
        self
    }

    /// Whether the background is exactly affine (cone part absent).
    pub fn is_affine(&self) -> bool {
        match self.profile {
            ConeProfile::TwoSlope { m_plus, m_minus } => m_plus + m_minus == 0.0,
            ConeProfile::Radial { m } => m == 0.0,
            ConeProfile::Harmonic2 { c0, c2, s2, .. } => c0 == 0.0 && c2 == 0.0 && s2 == 0.0,
        }
    }

    /// Radius of the regularized ball around the vertex.
    pub fn smoothing_radius(&self) -> f64 {
        2.0 * self.smoothing_delta
    }

    /// The background of `(1/lambda) u(lambda x)`: same cone, smaller
    /// smoothing ball and shift. Cones themselves are fixed points.
    pub fn rescaled(&self, lambda: f64) -> Self {
        ConeData {
            dim: self.dim,
            profile: self.profile,
            smoothing_delta: self.smoothing_delta / lambda,
            offset: [self.offset[0] / lambda, self.offset[1] / lambda],
        }
    }

    /// Unsmoothed cone value (exact homogeneous function, no offset applied).
    pub fn cone_value(&self, p: [f64; 2]) -> f64 {
        match self.profile {
            ConeProfile::TwoSlope { m_plus, m_minus } => {
                let x = p[0];
                let a = 0.5 * (m_plus - m_minus);
                let b = 0.5 * (m_plus + m_minus);
                a * x + b * x.abs()
            }
            ConeProfile::Radial { m } => m * p[0].hypot(p[1]),
            ConeProfile::Harmonic2 { c0, c1, s1, c2, s2 } => {
                let r = p[0].hypot(p[1]);
                let quad = c2 * (p[0] * p[0] - p[1] * p[1]) + s2 * 2.0 * p[0] * p[1];
                c0 * r + c1 * p[0] + s1 * p[1] + if r > 0.0 { quad / r } else { 0.0 }
            }
        }
    }

    /// Smoothed background value at a point.
    pub fn value_at(&self, p: [f64; 2]) -> f64 {
        let x = p[0] - self.offset[0];
        let y = p[1] - self.offset[1];
        let r0 = self.smoothing_radius();
        match self.profile {
            ConeProfile::TwoSlope { m_plus, m_minus } => {
                let a = 0.5 * (m_plus - m_minus);
                let b = 0.5 * (m_plus + m_minus);
                a * x + b * smoothed_abs(x, r0)
            }
            ConeProfile::Radial { m } => m * smoothed_abs(x.hypot(y), r0),
            ConeProfile::Harmonic2 { c0, c1, s1, c2, s2 } => {
                let r = x.hypot(y);
                let quad = c2 * (x * x - y * y) + s2 * 2.0 * x * y;
                c0 * smoothed_abs(r, r0) + c1 * x + s1 * y + quad * smoothed_inv_abs(r, r0)
            }
        }
    }

    /// Full derivative jet at a point. Needs a positive smoothing scale.
    pub fn jet_at(&self, p: [f64; 2]) -> Result<BgJet> {
        if !(self.smoothing_delta > 0.0) {
            return Err(Error::BackgroundNotDifferentiable);
        }
        let x = Taylor4::variable_x(p[0] - self.offset[0]);
        let y = Taylor4::variable_y(p[1] - self.offset[1]);
        let r0 = self.smoothing_radius();
        let t = match self.profile {
            ConeProfile::TwoSlope { m_plus, m_minus } => {
                let a = 0.5 * (m_plus - m_minus);
                let b = 0.5 * (m_plus + m_minus);
                let u = x.mul(&x);
                x.scale(a).add(&smoothed_abs_jet(&u, r0).scale(b))
            }
            ConeProfile::Radial { m } => {
                let u = x.mul(&x).add(&y.mul(&y));
                smoothed_abs_jet(&u, r0).scale(m)
            }
            ConeProfile::Harmonic2 { c0, c1, s1, c2, s2 } => {
                let u = x.mul(&x).add(&y.mul(&y));
                let quad = x
                    .mul(&x)
                    .sub(&y.mul(&y))
                    .scale(c2)
                    .add(&x.mul(&y).scale(2.0 * s2));
                let mut t = x.scale(c1).add(&y.scale(s1));
                if c0 != 0.0 {
                    t = t.add(&smoothed_abs_jet(&u, r0).scale(c0));
                }
                if c2 != 0.0 || s2 != 0.0 {
                    t = t.add(&quad.mul(&smoothed_inv_abs_jet(&u, r0)));
                }
                t
            }
        };
        Ok(BgJet::from_taylor(&t))
    }

    /// Supremum of `|grad v0|`, by dense sampling of the smoothing region and
    /// the exact far-field slopes.
    pub fn max_slope(&self) -> f64 {
        match self.profile {
            ConeProfile::TwoSlope { m_plus, m_minus } => {
                let far = m_plus.abs().max(m_minus.abs());
                if !(self.smoothing_delta > 0.0) {
                    return far;
                }
                let r0 = self.smoothing_radius();
                let mut best: f64 = far;
                for i in 0..=2000 {
                    let x = -r0 + 2.0 * r0 * i as f64 / 2000.0;
                    if let Ok(j) = self.jet_at([x + self.offset[0], 0.0]) {
                        best = best.max(j.d1[0].abs());
                    }
                }
                best
            }
            ConeProfile::Radial { m } => {
                // s' <= 1 on the blend, checked by sampling anyway.
                let mut best: f64 = m.abs();
                if self.smoothing_delta > 0.0 {
                    let r0 = self.smoothing_radius();
                    for i in 1..=500 {
                        let r = r0 * i as f64 / 500.0;
                        if let Ok(j) = self.jet_at([r + self.offset[0], self.offset[1]]) {
                            best = best.max(j.d1[0].hypot(j.d1[1]));
                        }
                    }
                }
                best
            }
            ConeProfile::Harmonic2 { .. } => {
                let mut best: f64 = 0.0;
                if !(self.smoothing_delta > 0.0) {
                    // Far-field slope on a distant ring.
                    for i in 0..720 {
                        let th = std::f64::consts::TAU * i as f64 / 720.0;
                        let r = 1e6;
                        let e = 1.0;
                        let p0 = [r * th.cos(), r * th.sin()];
                        let vx = (self.cone_value([p0[0] + e, p0[1]]) - self.cone_value([p0[0] - e, p0[1]])) / (2.0 * e);
                        let vy = (self.cone_value([p0[0], p0[1] + e]) - self.cone_value([p0[0], p0[1] - e])) / (2.0 * e);
                        best = best.max(vx.hypot(vy));
                    }
                    return best;
                }
                let r0 = self.smoothing_radius();
                for ir in 1..=60 {
                    // Slope is 0-homogeneous outside the ball, so sampling out
                    // to a few radii covers the far field.
                    let r = 4.0 * r0 * ir as f64 / 60.0;
                    for i in 0..360 {
                        let th = std::f64::consts::TAU * i as f64 / 360.0;
                        let p = [
                            r * th.cos() + self.offset[0],
                            r * th.sin() + self.offset[1],
                        ];
                        if let Ok(j) = self.jet_at(p) {
                            best = best.max(j.d1[0].hypot(j.d1[1]));
                        }
                    }
                }
                best
            }
        }
    }
}

/// `|x|` regularized on `|x| <= r0`: exact outside, `r0 q((x/r0)^2)` inside.
fn smoothed_abs(x: f64, r0: f64) -> f64 {
    let ax = x.abs();
    if ax >= r0 || r0 == 0.0 {
        ax
    } else {
        let u = (x / r0) * (x / r0);
        r0 * poly_at(&SQRT_TAYLOR, u)
    }
}

/// `1/|x|` regularized on `|x| <= r0`.
fn smoothed_inv_abs(r: f64, r0: f64) -> f64 {
    if r >= r0 || r0 == 0.0 {
        1.0 / r
    } else {
        let u = (r / r0) * (r / r0);
        poly_at(&INV_SQRT_TAYLOR, u) / r0
    }
}

/// Jet of the regularized `|.|` as a function of `u = x^2` (or `|x|^2`).
fn smoothed_abs_jet(u: &Taylor4, r0: f64) -> Taylor4 {
    if u.value() >= r0 * r0 {
        u.powf_trunc(0.5)
    } else {
        u.scale(1.0 / (r0 * r0)).poly(&SQRT_TAYLOR).scale(r0)
    }
}

/// Jet of the regularized `1/|.|` as a function of `u = |x|^2`.
fn smoothed_inv_abs_jet(u: &Taylor4, r0: f64) -> Taylor4 {
    if u.value() >= r0 * r0 {
        u.powf_trunc(-0.5)
    } else {
        u.scale(1.0 / (r0 * r0)).poly(&INV_SQRT_TAYLOR).scale(1.0 / r0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn fd_jet(f: impl Fn([f64; 2]) -> f64, p: [f64; 2], h: f64) -> BgJet {
        // Central differences up to fourth order, one axis at a time plus a
        // handful of mixed stencils. Good to ~1e-7 absolute for smooth f.
        let fx = |i: i32, j: i32| f([p[0] + i as f64 * h, p[1] + j as f64 * h]);
        let d1 = [
            (fx(1, 0) - fx(-1, 0)) / (2.0 * h),
            (fx(0, 1) - fx(0, -1)) / (2.0 * h),
        ];
        let d2 = [
            (fx(1, 0) - 2.0 * fx(0, 0) + fx(-1, 0)) / (h * h),
            (fx(1, 1) - fx(1, -1) - fx(-1, 1) + fx(-1, -1)) / (4.0 * h * h),
            (fx(0, 1) - 2.0 * fx(0, 0) + fx(0, -1)) / (h * h),
        ];
        let d3 = [
            (fx(2, 0) - 2.0 * fx(1, 0) + 2.0 * fx(-1, 0) - fx(-2, 0)) / (2.0 * h * h * h),
            ((fx(1, 1) - 2.0 * fx(0, 1) + fx(-1, 1)) - (fx(1, -1) - 2.0 * fx(0, -1) + fx(-1, -1)))
                / (2.0 * h * h * h),
            ((fx(1, 1) - 2.0 * fx(1, 0) + fx(1, -1)) - (fx(-1, 1) - 2.0 * fx(-1, 0) + fx(-1, -1)))
                / (2.0 * h * h * h),
            (fx(0, 2) - 2.0 * fx(0, 1) + 2.0 * fx(0, -1) - fx(0, -2)) / (2.0 * h * h * h),
        ];
        let d4xxxx = (fx(2, 0) - 4.0 * fx(1, 0) + 6.0 * fx(0, 0) - 4.0 * fx(-1, 0) + fx(-2, 0))
            / (h * h * h * h);
        let d4yyyy = (fx(0, 2) - 4.0 * fx(0, 1) + 6.0 * fx(0, 0) - 4.0 * fx(0, -1) + fx(0, -2))
            / (h * h * h * h);
        let d4xxyy = ((fx(1, 1) + fx(1, -1) - 2.0 * fx(1, 0))
            + (fx(-1, 1) + fx(-1, -1) - 2.0 * fx(-1, 0))
            - 2.0 * (fx(0, 1) + fx(0, -1) - 2.0 * fx(0, 0)))
            / (h * h * h * h);
        let d4xxxy = ((fx(2, 1) - 2.0 * fx(1, 1) + 2.0 * fx(-1, 1) - fx(-2, 1))
            - (fx(2, -1) - 2.0 * fx(1, -1) + 2.0 * fx(-1, -1) - fx(-2, -1)))
            / (4.0 * h * h * h * h);
        let d4xyyy = ((fx(1, 2) - 2.0 * fx(1, 1) + 2.0 * fx(1, -1) - fx(1, -2))
            - (fx(-1, 2) - 2.0 * fx(-1, 1) + 2.0 * fx(-1, -1) - fx(-1, -2)))
            / (4.0 * h * h * h * h);
        BgJet {
            value: fx(0, 0),
            d1,
            d2,
            d3,
            d4: [d4xxxx, d4xxxy, d4xxyy, d4xyyy, d4yyyy],
        }
    }

    #[test]
    fn smoothing_is_exact_outside_the_ball() {
        let cone = ConeData::two_slope(0.3, 0.3, 0.1);
        let r0 = cone.smoothing_radius();
        for &x in &[r0, 1.5 * r0, 2.0, -2.0, -r0] {
            assert_eq!(cone.value_at([x, 0.0]), 0.3 * x.abs());
        }
        // Strictly inside, the value must be raised above the corner.
        assert!(cone.value_at([0.0, 0.0]) > 0.0);
    }

    #[test]
    fn homogeneity_under_rescale_is_exact_outside() {
        let cone = ConeData::two_slope(0.25, 0.1, 0.05);
        let resc = cone.rescaled(2.0);
        for &x in &[0.4, 0.21, -1.0, 5.0] {
            // (1/2) v0(2x) = rescaled background at x, exactly.
            assert_eq!(0.5 * cone.value_at([2.0 * x, 0.0]), resc.value_at([x, 0.0]));
            // and equals the original outside |x| > 4 delta.
            if x.abs() > 4.0 * cone.smoothing_delta {
                assert_eq!(resc.value_at([x, 0.0]), cone.value_at([x, 0.0]));
            }
        }
    }

    #[test]
    fn unsmoothed_cone_is_one_homogeneous() {
        let cone = ConeData::two_slope(0.25, 0.1, 0.0);
        for &x in &[0.3, -0.7, 2.0] {
            for &l in &[2.0, 4.0, 7.5] {
                assert_abs_diff_eq!(
                    cone.cone_value([l * x, 0.0]),
                    l * cone.cone_value([x, 0.0]),
                    epsilon = 1e-14
                );
            }
        }
        let cone2 = ConeData {
            dim: 2,
            profile: ConeProfile::Harmonic2 { c0: 0.2, c1: 0.05, s1: 0.0, c2: 0.03, s2: 0.01 },
            smoothing_delta: 0.0,
            offset: [0.0; 2],
        };
        for &p in &[[0.3, -0.4], [1.0, 2.0]] {
            for &l in &[2.0, 3.0] {
                assert_abs_diff_eq!(
                    cone2.cone_value([l * p[0], l * p[1]]),
                    l * cone2.cone_value(p),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn join_is_c4_or_better() {
        // Finite differences across the seam see no kink up to fourth order.
        let cone = ConeData::two_slope(0.2, 0.2, 0.25);
        let r0 = cone.smoothing_radius();
        let h = 1e-3;
        let fd = fd_jet(|p| cone.value_at(p), [r0, 0.0], h);
        let inner = cone.jet_at([r0 - 1e-9, 0.0]).unwrap();
        let outer = cone.jet_at([r0 + 1e-9, 0.0]).unwrap();
        for (a, b) in [
            (inner.d1[0], outer.d1[0]),
            (inner.d2[0], outer.d2[0]),
            (inner.d3[0], outer.d3[0]),
            (inner.d4[0], outer.d4[0]),
        ] {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
        assert_abs_diff_eq!(fd.d2[0], inner.d2[0], epsilon = 1e-4);
    }

    #[test]
    fn jets_match_finite_differences_1d() {
        let cone = ConeData::two_slope(0.3, 0.15, 0.2).with_offset([0.07, 0.0]);
        for &x in &[0.0, 0.1, 0.3, -0.5, 2.0] {
            let jet = cone.jet_at([x, 0.0]).unwrap();
            let fd = fd_jet(|p| cone.value_at(p), [x, 0.0], 2e-3);
            assert_abs_diff_eq!(jet.value, fd.value, epsilon = 1e-12);
            assert_relative_eq!(jet.d1[0], fd.d1[0], epsilon = 1e-5, max_relative = 1e-3);
            assert_relative_eq!(jet.d2[0], fd.d2[0], epsilon = 1e-4, max_relative = 1e-3);
            assert_relative_eq!(jet.d3[0], fd.d3[0], epsilon = 2e-3, max_relative = 1e-3);
            assert_relative_eq!(jet.d4[0], fd.d4[0], epsilon = 2e-2, max_relative = 1e-3);
        }
    }

    #[test]
    fn jets_match_finite_differences_2d() {
        let cone = ConeData {
            dim: 2,
            profile: ConeProfile::Harmonic2 { c0: 0.2, c1: 0.04, s1: -0.02, c2: 0.05, s2: 0.02 },
            smoothing_delta: 0.2,
            offset: [0.0; 2],
        };
        for &p in &[[0.05, -0.08], [0.3, 0.3], [1.0, -0.6], [0.0, 0.0]] {
            let jet = cone.jet_at(p).unwrap();
            let fd = fd_jet(|q| cone.value_at(q), p, 2e-3);
            assert_abs_diff_eq!(jet.value, fd.value, epsilon = 1e-12);
            for i in 0..2 {
                assert_relative_eq!(jet.d1[i], fd.d1[i], epsilon = 1e-5, max_relative = 1e-3);
            }
            for i in 0..3 {
                assert_relative_eq!(jet.d2[i], fd.d2[i], epsilon = 1e-4, max_relative = 1e-3);
            }
            for i in 0..4 {
                assert_relative_eq!(jet.d3[i], fd.d3[i], epsilon = 5e-3, max_relative = 2e-3);
            }
            for i in 0..5 {
                assert_relative_eq!(jet.d4[i], fd.d4[i], epsilon = 1e-1, max_relative = 2e-3);
            }
        }
    }

    #[test]
    fn radial_cone_gradient_points_outward() {
        let cone = ConeData::radial(0.2, 0.1);
        let jet = cone.jet_at([3.0, 4.0]).unwrap();
        // grad(m |x|) = m x / |x|
        assert_abs_diff_eq!(jet.d1[0], 0.2 * 3.0 / 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(jet.d1[1], 0.2 * 4.0 / 5.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_delta_jet_is_rejected() {
        let cone = ConeData::two_slope(0.2, 0.2, 0.0);
        assert!(matches!(
            cone.jet_at([0.5, 0.0]),
            Err(Error::BackgroundNotDifferentiable)
        ));
    }

    #[test]
    fn max_slope_of_two_slope_cone() {
        let cone = ConeData::two_slope(0.3, 0.1, 0.2);
        let slope = cone.max_slope();
        assert!(slope >= 0.3 && slope < 0.32, "slope = {slope}");
    }
}

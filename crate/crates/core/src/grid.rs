//! Uniform half-line grids and the finite-difference / quadrature kernels
//! shared by the deformation and verification code.
//!
//! All kernels are fourth order. The cumulative integral uses a symmetrized
//! Simpson rule: each panel [x_i, x_{i+1}] is integrated as the average of
//! the two parabolic (Simpson half-panel) estimates, which is the cubic
//! interpolant through the four surrounding points. The same weights apply
//! to every interior panel, so the accumulated O(h⁴) error is a smooth
//! function of x; differentiating a cumulative integral twice then stays at
//! the stencil's own accuracy instead of amplifying parity noise.

use crate::error::{Error, Result};

/// Uniform grid on [0, x_max] with points x_i = i·h, h = x_max/(n−1).
///
/// n must be odd and at least 9, which keeps every five- and six-point
/// stencil inside the domain and puts a grid point exactly at x_max/2.
#[derive(Debug, Clone, Copy)]
pub struct Grid {
    x_max: f64,
    n: usize,
    h: f64,
}

impl Grid {
    pub fn new(x_max: f64, n: usize) -> Result<Self> {
        if !x_max.is_finite() || x_max <= 0.0 {
            return Err(Error::GridExtent(x_max));
        }
        if n < 9 || n.is_multiple_of(2) {
            return Err(Error::GridSize(n));
        }
        Ok(Self {
            x_max,
            n,
            h: x_max / (n - 1) as f64,
        })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Index of the grid point at exactly x_max/2.
    pub fn midpoint_index(&self) -> usize {
        (self.n - 1) / 2
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }

    fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && self.x_max == other.x_max
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

/// A real function tabulated on a [`Grid`].
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub label: String,
}

impl SampledFunction {
    pub fn new(grid: Grid, label: impl Into<String>, values: Vec<f64>) -> Self {
        assert_eq!(
            values.len(),
            grid.len(),
            "value array length must match the grid"
        );
        Self {
            grid,
            values,
            label: label.into(),
        }
    }

    pub fn from_fn(grid: Grid, label: impl Into<String>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().map(f).collect();
        Self::new(grid, label, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with(
        &self,
        other: &SampledFunction,
        label: impl Into<String>,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<SampledFunction> {
        check_same_grid(self, other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(SampledFunction::new(self.grid, label, values))
    }

    pub fn map(&self, label: impl Into<String>, f: impl Fn(f64) -> f64) -> SampledFunction {
        SampledFunction::new(self.grid, label, self.values.iter().map(|&v| f(v)).collect())
    }
}

pub(crate) fn check_same_grid(a: &SampledFunction, b: &SampledFunction) -> Result<()> {
    if a.grid == b.grid {
        Ok(())
    } else {
        Err(Error::GridMismatch {
            left: a.label.clone(),
            right: b.label.clone(),
        })
    }
}

/// Running integral F(x_i) = ∫₀^{x_i} f, F(0) = 0.
///
/// Interior panels use the symmetric four-point weights (−1, 13, 13, −1)/24,
/// the first and last panel their one-sided counterparts. Exact for cubics,
/// global error O(h⁴) for smooth integrands.
pub fn cumulative_integral(f: &SampledFunction) -> SampledFunction {
    let n = f.grid.len();
    let h = f.grid.spacing();
    let v = &f.values;
    let mut out = vec![0.0; n];
    out[1] = h * (9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3]) / 24.0;
    for i in 1..n - 2 {
        out[i + 1] = out[i] + h * (-v[i - 1] + 13.0 * v[i] + 13.0 * v[i + 1] - v[i + 2]) / 24.0;
    }
    out[n - 1] = out[n - 2] + h * (v[n - 4] - 5.0 * v[n - 3] + 19.0 * v[n - 2] + 9.0 * v[n - 1]) / 24.0;
    SampledFunction::new(f.grid, format!("∫{}", f.label), out)
}

/// First derivative: five-point centered stencil in the interior, one-sided
/// five-point stencils at the two boundary points on each side. O(h⁴)
/// throughout, exact for polynomials up to degree 4.
pub fn derivative_1st(f: &SampledFunction) -> SampledFunction {
    let n = f.grid.len();
    let h = f.grid.spacing();
    let v = &f.values;
    let mut out = vec![0.0; n];
    for i in 2..n - 2 {
        out[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
    }
    let fwd0 = |w: &[f64]| (-25.0 * w[0] + 48.0 * w[1] - 36.0 * w[2] + 16.0 * w[3] - 3.0 * w[4]) / (12.0 * h);
    let fwd1 = |w: &[f64]| (-3.0 * w[0] - 10.0 * w[1] + 18.0 * w[2] - 6.0 * w[3] + w[4]) / (12.0 * h);
    out[0] = fwd0(&v[0..5]);
    out[1] = fwd1(&v[0..5]);
    let rev: Vec<f64> = v[n - 5..n].iter().rev().copied().collect();
    out[n - 1] = -fwd0(&rev);
    out[n - 2] = -fwd1(&rev);
    SampledFunction::new(f.grid, format!("d/dx {}", f.label), out)
}

/// Second derivative: five-point centered stencil in the interior, one-sided
/// six-point stencils at the two boundary points on each side, so the O(h⁴)
/// order holds at every grid point. Exact for polynomials up to degree 3
/// everywhere (degree 4 in the interior, degree 5 at the boundaries).
pub fn derivative_2nd(f: &SampledFunction) -> SampledFunction {
    let n = f.grid.len();
    let h = f.grid.spacing();
    let h2 = 12.0 * h * h;
    let v = &f.values;
    let mut out = vec![0.0; n];
    for i in 2..n - 2 {
        out[i] = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) / h2;
    }
    let fwd0 = |w: &[f64]| {
        (45.0 * w[0] - 154.0 * w[1] + 214.0 * w[2] - 156.0 * w[3] + 61.0 * w[4] - 10.0 * w[5]) / h2
    };
    let fwd1 = |w: &[f64]| {
        (10.0 * w[0] - 15.0 * w[1] - 4.0 * w[2] + 14.0 * w[3] - 6.0 * w[4] + w[5]) / h2
    };
    out[0] = fwd0(&v[0..6]);
    out[1] = fwd1(&v[0..6]);
    let rev: Vec<f64> = v[n - 6..n].iter().rev().copied().collect();
    out[n - 1] = fwd0(&rev);
    out[n - 2] = fwd1(&rev);
    SampledFunction::new(f.grid, format!("d²/dx² {}", f.label), out)
}

/// The deformation correction term −2 d²/dx² ln(I + λ), evaluated through its
/// closed form −4·u·u′/(I+λ) + 2·u⁴/(I+λ)², where u is the seed whose square
/// integrates to I. Taking u and u′ as inputs avoids differentiating a
/// tabulated logarithm.
///
/// Fails with a diagnostic naming the first offending x if I + λ is not
/// strictly positive everywhere (the deformation would be singular there).
pub fn log_2nd_derivative_term(
    seed: &SampledFunction,
    seed_deriv: &SampledFunction,
    i_plus_lambda: &SampledFunction,
) -> Result<SampledFunction> {
    check_same_grid(seed, seed_deriv)?;
    check_same_grid(seed, i_plus_lambda)?;
    for (i, &j) in i_plus_lambda.values.iter().enumerate() {
        if j <= 0.0 {
            return Err(Error::SingularDeformation {
                x: seed.grid.point(i),
                value: j,
            });
        }
    }
    let values = seed
        .values
        .iter()
        .zip(&seed_deriv.values)
        .zip(&i_plus_lambda.values)
        .map(|((&u, &du), &j)| {
            let u2 = u * u;
            -4.0 * u * du / j + 2.0 * u2 * u2 / (j * j)
        })
        .collect();
    Ok(SampledFunction::new(
        seed.grid,
        format!("-2(ln(I+λ))'' [{}]", seed.label),
        values,
    ))
}

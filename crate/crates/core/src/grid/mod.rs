//! Uniform 1D grids, sampled functions and spinors, finite differences and
//! quadrature.

mod eigen;
mod sparse;

use std::ops::{Add, Mul, Neg, Range, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eigen::{
    jacobi_eigen, solve_symmetric_spectrum, tridiagonal_eigenvalues_ql, Eigenpair,
    SymTridiagonal, SymmetricOperator,
};
pub use sparse::SparseMatrix;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Fraction of the domain trimmed from each side by the interior norms.
pub const INTERIOR_TRIM: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Values at both endpoint nodes are taken to be zero.
    Dirichlet,
    /// The domain is a truncation of the line; functions are assumed to decay.
    DecayTruncation,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
    boundary: Boundary,
}

impl Grid {
    pub const MIN_POINTS: usize = 16;

    pub fn new(x_min: f64, x_max: f64, n_points: usize, boundary: Boundary) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < Self::MIN_POINTS {
            return Err(Error::InsufficientStencil { n_points, required: Self::MIN_POINTS });
        }
        Ok(Grid { x_min, x_max, n_points, boundary })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.n_points - 1 {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Node indices whose values are free unknowns. Dirichlet grids exclude
    /// the two endpoints.
    pub fn active_range(&self) -> Range<usize> {
        match self.boundary {
            Boundary::Dirichlet => 1..self.n_points - 1,
            Boundary::DecayTruncation => 0..self.n_points,
        }
    }

    /// Node indices kept by the interior norms.
    pub fn interior_range(&self) -> Range<usize> {
        let trim = (INTERIOR_TRIM * (self.n_points - 1) as f64).ceil() as usize;
        trim..self.n_points - trim
    }

    /// Samples `f` at every node. Dirichlet endpoints are set to zero without
    /// evaluating `f`, which may be singular there.
    pub fn sample<F: Fn(f64) -> Complex64>(&self, f: F) -> GridFunction {
        let mut values = vec![Complex64::new(0.0, 0.0); self.n_points];
        for i in self.active_range() {
            values[i] = f(self.x(i));
        }
        GridFunction { grid: *self, values }
    }

    pub fn sample_real<F: Fn(f64) -> f64>(&self, f: F) -> GridFunction {
        self.sample(|x| Complex64::new(f(x), 0.0))
    }

    /// Real samples over the active nodes with zeros elsewhere.
    pub fn sample_coefficient<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        let mut values = vec![0.0; self.n_points];
        for i in self.active_range() {
            values[i] = f(self.x(i));
        }
        values
    }

    fn trapezoid_sum(&self, range: Range<usize>, mut term: impl FnMut(usize) -> Complex64) -> Complex64 {
        let (a, b) = (range.start, range.end);
        if b <= a {
            return Complex64::new(0.0, 0.0);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for i in a..b {
            let w = if i == a || i == b - 1 { 0.5 } else { 1.0 };
            sum += term(i) * w;
        }
        sum * self.spacing()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.n_points
            )));
        }
        let mut f = GridFunction { grid, values };
        f.enforce_boundary();
        Ok(f)
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(grid: Grid) -> Self {
        GridFunction { grid, values: vec![Complex64::new(0.0, 0.0); grid.n_points] }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn enforce_boundary(&mut self) {
        if self.grid.boundary == Boundary::Dirichlet {
            let last = self.values.len() - 1;
            self.values[0] = Complex64::new(0.0, 0.0);
            self.values[last] = Complex64::new(0.0, 0.0);
        }
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        GridFunction { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise product with real coefficient samples.
    pub fn mul_pointwise(&self, coeff: &[f64]) -> Self {
        assert_eq!(coeff.len(), self.values.len(), "coefficient length mismatch");
        GridFunction {
            grid: self.grid,
            values: self.values.iter().zip(coeff).map(|(&v, &c)| v * c).collect(),
        }
    }

    pub fn times_i(&self) -> Self {
        self.map(|v| v * I)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self * (1.0 / n)
        } else {
            self.clone()
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        assert!(self.grid == other.grid, "grid mismatch");
        GridFunction {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

/// Quantities living on a grid that carry an inner product.
pub trait Field: Clone {
    fn grid(&self) -> &Grid;

    fn inner_product(&self, other: &Self, weight: Weight) -> Result<Complex64>;

    /// Integral of the pointwise squared modulus over the interior window.
    fn interior_norm_sq(&self) -> f64;

    fn norm(&self) -> f64 {
        self.inner_product(self, Weight::Definite).map(|z| z.re.max(0.0).sqrt()).unwrap_or(f64::NAN)
    }

    fn interior_norm(&self) -> f64 {
        self.interior_norm_sq().max(0.0).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    Definite,
    /// Indefinite diag(1, -1) metric on two-component spinors.
    Sigma3,
}

impl Field for GridFunction {
    fn grid(&self) -> &Grid {
        &self.grid
    }

    fn inner_product(&self, other: &Self, weight: Weight) -> Result<Complex64> {
        if weight == Weight::Sigma3 {
            return Err(Error::Sigma3RequiresSpinor2);
        }
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.grid.trapezoid_sum(0..self.grid.n_points, |i| {
            self.values[i].conj() * other.values[i]
        }))
    }

    fn interior_norm_sq(&self) -> f64 {
        self.grid.trapezoid_sum(self.grid.interior_range(), |i| Complex64::new(self.values[i].norm_sqr(), 0.0)).re
    }
}

pub fn inner_product<T: Field>(f: &T, g: &T, weight: Weight) -> Result<Complex64> {
    f.inner_product(g, weight)
}

/// Interior norm of `diff` relative to the interior norm of `reference`.
pub fn relative_residual<T: Field>(diff: &T, reference: &T) -> f64 {
    let r = reference.interior_norm();
    if r == 0.0 {
        diff.interior_norm()
    } else {
        diff.interior_norm() / r
    }
}

/// Fourth-order finite-difference derivative of order 1 or 2.
///
/// Dirichlet grids use zero ghost values past the endpoints; decay-truncation
/// grids switch to one-sided stencils on the two outermost nodes per side.
pub fn differentiate(f: &GridFunction, order: u8) -> Result<GridFunction> {
    let grid = f.grid;
    let n = grid.n_points;
    if n < 5 {
        return Err(Error::InsufficientStencil { n_points: n, required: 5 });
    }
    if order != 1 && order != 2 {
        return Err(Error::InvalidArgument(format!("derivative order must be 1 or 2, got {order}")));
    }
    let h = grid.spacing();
    let v = &f.values;
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; n];

    let central = |fm2: Complex64, fm1: Complex64, f0: Complex64, fp1: Complex64, fp2: Complex64| {
        if order == 1 {
            (fm2 - fp2 + (fp1 - fm1) * 8.0) / (12.0 * h)
        } else {
            (-fm2 - fp2 + (fm1 + fp1) * 16.0 - f0 * 30.0) / (12.0 * h * h)
        }
    };

    match grid.boundary {
        Boundary::Dirichlet => {
            let at = |j: isize| -> Complex64 {
                if j <= 0 || j >= n as isize - 1 {
                    zero
                } else {
                    v[j as usize]
                }
            };
            for (i, o) in out.iter_mut().enumerate().take(n - 1).skip(1) {
                let j = i as isize;
                *o = central(at(j - 2), at(j - 1), at(j), at(j + 1), at(j + 2));
            }
        }
        Boundary::DecayTruncation => {
            for i in 2..n - 2 {
                out[i] = central(v[i - 2], v[i - 1], v[i], v[i + 1], v[i + 2]);
            }
            let (c0, c1, scale, sign): (&[f64], &[f64], f64, f64) = if order == 1 {
                (&[-25.0, 48.0, -36.0, 16.0, -3.0], &[-3.0, -10.0, 18.0, -6.0, 1.0], 12.0 * h, -1.0)
            } else {
                (
                    &[45.0, -154.0, 214.0, -156.0, 61.0, -10.0],
                    &[10.0, -15.0, -4.0, 14.0, -6.0, 1.0],
                    12.0 * h * h,
                    1.0,
                )
            };
            let left = |coeffs: &[f64]| -> Complex64 {
                coeffs.iter().enumerate().map(|(j, &c)| v[j] * c).sum::<Complex64>() / scale
            };
            let right = |coeffs: &[f64]| -> Complex64 {
                coeffs.iter().enumerate().map(|(j, &c)| v[n - 1 - j] * c).sum::<Complex64>() / scale * sign
            };
            out[0] = left(c0);
            out[1] = left(c1);
            out[n - 1] = right(c0);
            out[n - 2] = right(c1);
        }
    }
    let mut g = GridFunction { grid, values: out };
    g.enforce_boundary();
    Ok(g)
}

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Add for GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: GridFunction) -> GridFunction {
        &self + &rhs
    }
}

impl Sub for GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: GridFunction) -> GridFunction {
        &self - &rhs
    }
}

impl Neg for &GridFunction {
    type Output = GridFunction;
    fn neg(self) -> GridFunction {
        self.map(|v| -v)
    }
}

impl Neg for GridFunction {
    type Output = GridFunction;
    fn neg(self) -> GridFunction {
        -&self
    }
}

impl Mul<Complex64> for &GridFunction {
    type Output = GridFunction;
    fn mul(self, c: Complex64) -> GridFunction {
        self.map(|v| v * c)
    }
}

impl Mul<f64> for &GridFunction {
    type Output = GridFunction;
    fn mul(self, c: f64) -> GridFunction {
        self.map(|v| v * c)
    }
}

impl Mul<Complex64> for GridFunction {
    type Output = GridFunction;
    fn mul(self, c: Complex64) -> GridFunction {
        &self * c
    }
}

impl Mul<f64> for GridFunction {
    type Output = GridFunction;
    fn mul(self, c: f64) -> GridFunction {
        &self * c
    }
}

/// K-component spinor of grid functions sharing one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Spinor<const K: usize> {
    components: [GridFunction; K],
}

pub type Spinor2 = Spinor<2>;
pub type Spinor4 = Spinor<4>;

impl<const K: usize> Spinor<K> {
    pub fn new(components: [GridFunction; K]) -> Result<Self> {
        let g = components[0].grid;
        if components.iter().any(|c| c.grid != g) {
            return Err(Error::GridMismatch);
        }
        Ok(Spinor { components })
    }

    pub fn zeros(grid: Grid) -> Self {
        Spinor { components: std::array::from_fn(|_| GridFunction::zeros(grid)) }
    }

    pub fn component(&self, i: usize) -> &GridFunction {
        &self.components[i]
    }

    pub fn components(&self) -> &[GridFunction; K] {
        &self.components
    }

    pub fn into_components(self) -> [GridFunction; K] {
        self.components
    }

    pub fn map_components<F: Fn(&GridFunction) -> GridFunction>(&self, f: F) -> Self {
        Spinor { components: std::array::from_fn(|i| f(&self.components[i])) }
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self * (1.0 / n)
        } else {
            self.clone()
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&GridFunction, &GridFunction) -> GridFunction) -> Self {
        Spinor { components: std::array::from_fn(|i| f(&self.components[i], &other.components[i])) }
    }
}

impl Spinor<2> {
    pub fn from_pair(upper: GridFunction, lower: GridFunction) -> Result<Self> {
        Self::new([upper, lower])
    }

    pub fn upper(&self) -> &GridFunction {
        &self.components[0]
    }

    pub fn lower(&self) -> &GridFunction {
        &self.components[1]
    }
}

impl Spinor<4> {
    pub fn from_blocks(upper: Spinor2, lower: Spinor2) -> Result<Self> {
        let [a, b] = upper.components;
        let [c, d] = lower.components;
        Self::new([a, b, c, d])
    }

    pub fn upper_block(&self) -> Spinor2 {
        Spinor { components: [self.components[0].clone(), self.components[1].clone()] }
    }

    pub fn lower_block(&self) -> Spinor2 {
        Spinor { components: [self.components[2].clone(), self.components[3].clone()] }
    }
}

impl<const K: usize> Field for Spinor<K> {
    fn grid(&self) -> &Grid {
        &self.components[0].grid
    }

    fn inner_product(&self, other: &Self, weight: Weight) -> Result<Complex64> {
        if weight == Weight::Sigma3 && K != 2 {
            return Err(Error::Sigma3RequiresSpinor2);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (i, (a, b)) in self.components.iter().zip(&other.components).enumerate() {
            let term = a.inner_product(b, Weight::Definite)?;
            if weight == Weight::Sigma3 && i == 1 {
                sum -= term;
            } else {
                sum += term;
            }
        }
        Ok(sum)
    }

    fn interior_norm_sq(&self) -> f64 {
        self.components.iter().map(|c| c.interior_norm_sq()).sum()
    }
}

impl<const K: usize> Add for &Spinor<K> {
    type Output = Spinor<K>;
    fn add(self, rhs: &Spinor<K>) -> Spinor<K> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<const K: usize> Sub for &Spinor<K> {
    type Output = Spinor<K>;
    fn sub(self, rhs: &Spinor<K>) -> Spinor<K> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<const K: usize> Add for Spinor<K> {
    type Output = Spinor<K>;
    fn add(self, rhs: Spinor<K>) -> Spinor<K> {
        &self + &rhs
    }
}

impl<const K: usize> Sub for Spinor<K> {
    type Output = Spinor<K>;
    fn sub(self, rhs: Spinor<K>) -> Spinor<K> {
        &self - &rhs
    }
}

impl<const K: usize> Neg for &Spinor<K> {
    type Output = Spinor<K>;
    fn neg(self) -> Spinor<K> {
        self.map_components(|c| -c)
    }
}

impl<const K: usize> Neg for Spinor<K> {
    type Output = Spinor<K>;
    fn neg(self) -> Spinor<K> {
        -&self
    }
}

impl<const K: usize> Mul<Complex64> for &Spinor<K> {
    type Output = Spinor<K>;
    fn mul(self, c: Complex64) -> Spinor<K> {
        self.map_components(|f| f * c)
    }
}

impl<const K: usize> Mul<f64> for &Spinor<K> {
    type Output = Spinor<K>;
    fn mul(self, c: f64) -> Spinor<K> {
        self.map_components(|f| f * c)
    }
}

impl<const K: usize> Mul<Complex64> for Spinor<K> {
    type Output = Spinor<K>;
    fn mul(self, c: Complex64) -> Spinor<K> {
        &self * c
    }
}

impl<const K: usize> Mul<f64> for Spinor<K> {
    type Output = Spinor<K>;
    fn mul(self, c: f64) -> Spinor<K> {
        &self * c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn max_err_interior(f: &GridFunction, exact: impl Fn(f64) -> f64) -> f64 {
        let g = f.grid();
        g.interior_range().map(|i| (f.values()[i] - exact(g.x(i))).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn rejects_small_grids() {
        assert!(matches!(
            Grid::new(0.0, 1.0, 10, Boundary::Dirichlet),
            Err(Error::InsufficientStencil { .. })
        ));
        assert!(Grid::new(1.0, 0.0, 100, Boundary::Dirichlet).is_err());
    }

    #[test]
    fn second_derivative_of_sine() {
        let g = Grid::new(0.0, PI, 1001, Boundary::Dirichlet).unwrap();
        let f = g.sample_real(f64::sin);
        let d2 = differentiate(&f, 2).unwrap();
        assert!(max_err_interior(&d2, |x| -x.sin()) < 1e-9);
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n| {
            let g = Grid::new(-3.0, 3.0, n, Boundary::DecayTruncation).unwrap();
            let f = g.sample_real(|x| (-x * x).exp());
            let d1 = differentiate(&f, 1).unwrap();
            max_err_interior(&d1, |x| -2.0 * x * (-x * x).exp())
        };
        let ratio = err(201) / err(401);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn one_sided_stencils_are_exact_on_low_polynomials() {
        let g = Grid::new(-1.0, 2.0, 31, Boundary::DecayTruncation).unwrap();
        for p in 0..=4 {
            let f = g.sample_real(|x| x.powi(p));
            let d1 = differentiate(&f, 1).unwrap();
            for i in [0, 1, 29, 30] {
                let exact = if p == 0 { 0.0 } else { p as f64 * g.x(i).powi(p - 1) };
                assert!((d1.values()[i].re - exact).abs() < 1e-9, "p={p} i={i}");
            }
        }
        for p in 0..=5 {
            let f = g.sample_real(|x| x.powi(p));
            let d2 = differentiate(&f, 2).unwrap();
            for i in [0, 1, 29, 30] {
                let exact = if p < 2 { 0.0 } else { (p * (p - 1)) as f64 * g.x(i).powi(p - 2) };
                assert!((d2.values()[i].re - exact).abs() < 1e-7, "p={p} i={i}");
            }
        }
    }

    #[test]
    fn quadrature_of_sine_squared() {
        let g = Grid::new(0.0, PI, 801, Boundary::Dirichlet).unwrap();
        let f = g.sample_real(f64::sin);
        let ip = f.inner_product(&f, Weight::Definite).unwrap();
        assert!((ip.re - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn sigma3_only_for_two_spinors() {
        let g = Grid::new(0.0, 1.0, 32, Boundary::Dirichlet).unwrap();
        let f = g.sample_real(|x| x * (1.0 - x));
        assert!(matches!(f.inner_product(&f, Weight::Sigma3), Err(Error::Sigma3RequiresSpinor2)));
        let s4 = Spinor4::zeros(g);
        assert!(s4.inner_product(&s4, Weight::Sigma3).is_err());
        let s2 = Spinor2::from_pair(f.clone(), f.clone() * 2.0).unwrap();
        let v = s2.inner_product(&s2, Weight::Sigma3).unwrap();
        let ff = f.inner_product(&f, Weight::Definite).unwrap();
        assert!((v - ff * (1.0 - 4.0)).norm() < 1e-14);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let g1 = Grid::new(0.0, 1.0, 32, Boundary::Dirichlet).unwrap();
        let g2 = Grid::new(0.0, 1.0, 33, Boundary::Dirichlet).unwrap();
        let a = GridFunction::zeros(g1);
        let b = GridFunction::zeros(g2);
        assert!(matches!(a.inner_product(&b, Weight::Definite), Err(Error::GridMismatch)));
        assert!(Spinor2::from_pair(a, b).is_err());
    }

    #[test]
    fn interior_window_trims_five_percent() {
        let g = Grid::new(0.0, 1.0, 101, Boundary::Dirichlet).unwrap();
        assert_eq!(g.interior_range(), 5..96);
    }
}

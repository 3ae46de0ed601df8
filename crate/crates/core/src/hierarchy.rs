//! Scalar factorization hierarchy: ladder operators a-/+, Schrodinger
//! operators H_n, and the closed-form eigenfunctions psi_n^k.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    differentiate, relative_residual, solve_symmetric_spectrum, Eigenpair, Grid, GridFunction,
    SymTridiagonal, SymmetricOperator,
};
use crate::models::{HierarchyKind, Model};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// a-_n = d/dx + w_n
    Lower,
    /// a+_n = -d/dx + w_n
    Raise,
}

/// Index reached from `n` after `delta` steps, or an error below zero.
pub(crate) fn offset(n: u32, delta: i64) -> Result<u32> {
    let m = n as i64 + delta;
    u32::try_from(m).map_err(|_| Error::IndexOutOfRange { n, min: (-delta).max(0) as u32 })
}

pub fn apply_factor(model: &Model, n: u32, dir: Direction, f: &GridFunction) -> Result<GridFunction> {
    let w = model.superpotential_samples(n, f.grid());
    let df = differentiate(f, 1)?;
    let wf = f.mul_pointwise(&w);
    Ok(match dir {
        Direction::Lower => &df + &wf,
        Direction::Raise => &wf - &df,
    })
}

/// H_n f = -f'' + V_n f.
pub fn apply_schrodinger(model: &Model, n: u32, f: &GridFunction) -> Result<GridFunction> {
    let v = model.potential_samples(n, f.grid());
    let d2 = differentiate(f, 2)?;
    Ok(&f.mul_pointwise(&v) - &d2)
}

/// Energy of psi_n^k: mu_{n+k}^2 (increasing) or -mu_{n-k}^2 (decreasing).
pub fn scalar_energy(model: &Model, n: u32, k: u32) -> Result<f64> {
    model.check_level(n, k)?;
    Ok(match model.kind() {
        HierarchyKind::Increasing => model.mu_sq(n + k),
        HierarchyKind::Decreasing => -model.mu_sq(n - k),
    })
}

/// Constant c in a-_n psi_n^k = c psi_{n+step}^{k-1}.
pub fn ladder_coefficient(model: &Model, n: u32, k: u32) -> Result<f64> {
    model.check_level(n, k)?;
    if k == 0 {
        return Ok(0.0);
    }
    let gap = match model.kind() {
        HierarchyKind::Increasing => model.mu_sq(n + k) - model.mu_sq(n),
        HierarchyKind::Decreasing => model.mu_sq(n) - model.mu_sq(n - k),
    };
    Ok(gap.max(0.0).sqrt())
}

/// Normalized psi_n^k, fixed in sign by the raising ladder from psi_{n+-k}^0.
pub fn eigenfunction(model: &Model, n: u32, k: u32, grid: &Grid) -> Result<GridFunction> {
    if k == 0 {
        return model.ground_state(n, grid);
    }
    Ok(model.closed_form(n, k)?.sample(grid).normalized())
}

/// ||H_n f - (a+ a- +/- mu_n^2) f|| / ||f||
pub fn factorization_residual(model: &Model, n: u32, f: &GridFunction) -> Result<f64> {
    let h = apply_schrodinger(model, n, f)?;
    let lowered = apply_factor(model, n, Direction::Lower, f)?;
    let aa = apply_factor(model, n, Direction::Raise, &lowered)?;
    let rhs = &aa + &(f * (model.kind().sign() * model.mu_sq(n)));
    Ok(relative_residual(&(&h - &rhs), f))
}

/// Shape invariance: a-_n a+_n +/- mu_n^2 equals H_{n+step}.
pub fn shape_invariance_residual(model: &Model, n: u32, f: &GridFunction) -> Result<f64> {
    let next = offset(n, model.kind().step())?;
    let raised = apply_factor(model, n, Direction::Raise, f)?;
    let aa = apply_factor(model, n, Direction::Lower, &raised)?;
    let lhs = &aa + &(f * (model.kind().sign() * model.mu_sq(n)));
    let rhs = apply_schrodinger(model, next, f)?;
    Ok(relative_residual(&(&lhs - &rhs), f))
}

/// ||a-_n H_n f - H_{n+step} a-_n f|| / ||f||
pub fn scalar_intertwine_residual(model: &Model, n: u32, f: &GridFunction) -> Result<f64> {
    let next = offset(n, model.kind().step())?;
    let hf = apply_schrodinger(model, n, f)?;
    let lhs = apply_factor(model, n, Direction::Lower, &hf)?;
    let af = apply_factor(model, n, Direction::Lower, f)?;
    let rhs = apply_schrodinger(model, next, &af)?;
    Ok(relative_residual(&(&lhs - &rhs), f))
}

/// ||H_n psi - E psi|| / ||psi|| for the closed-form psi_n^k.
pub fn scalar_eigen_residual(model: &Model, n: u32, k: u32, grid: &Grid) -> Result<f64> {
    let psi = eigenfunction(model, n, k, grid)?;
    let e = scalar_energy(model, n, k)?;
    let h = apply_schrodinger(model, n, &psi)?;
    Ok(relative_residual(&(&h - &(&psi * e)), &psi))
}

/// ||a-_n psi_n^k - c psi_{n+step}^{k-1}|| / ||psi||
pub fn ladder_residual(model: &Model, n: u32, k: u32, grid: &Grid) -> Result<f64> {
    if k == 0 {
        let psi = eigenfunction(model, n, 0, grid)?;
        let a = apply_factor(model, n, Direction::Lower, &psi)?;
        return Ok(relative_residual(&a, &psi));
    }
    let psi = eigenfunction(model, n, k, grid)?;
    let next = offset(n, model.kind().step())?;
    let partner = eigenfunction(model, next, k - 1, grid)?;
    let c = ladder_coefficient(model, n, k)?;
    let a = apply_factor(model, n, Direction::Lower, &psi)?;
    Ok(relative_residual(&(&a - &(&partner * c)), &psi))
}

/// Second-order discretization of H_n on the interior nodes.
#[derive(Clone, Copy, Debug)]
pub struct ScalarHamiltonian {
    pub model: Model,
    pub n: u32,
}

/// Discretized in factorized form H = A^T A +/- mu_n^2 on the interior nodes,
/// where (A f)_{j+1/2} = (f_{j+1} - f_j)/h + w(x_{j+1/2}) (f_j + f_{j+1})/2.
///
/// Only midpoints between two interior nodes enter A. Keeping the two
/// boundary midpoints would pin the first interior value and add an O(1)
/// error for states vanishing like sqrt(x), as for the trigonometric n = 0
/// member; without them the ground state spans the discrete kernel of A.
impl SymmetricOperator for ScalarHamiltonian {
    fn tridiagonal(&self, grid: &Grid) -> Result<SymTridiagonal> {
        let h = grid.spacing();
        let m = grid.n_points() - 2;
        // rows of A: midpoint between interior nodes r and r+1
        let mut lo = Vec::with_capacity(m.saturating_sub(1));
        let mut hi = Vec::with_capacity(m.saturating_sub(1));
        for r in 0..m.saturating_sub(1) {
            let xm = grid.x(r + 1) + 0.5 * h;
            let w = self.model.superpotential(self.n, xm)?;
            lo.push(-1.0 / h + 0.5 * w);
            hi.push(1.0 / h + 0.5 * w);
        }
        let shift = self.model.kind().sign() * self.model.mu_sq(self.n);
        let diag = (0..m)
            .map(|i| {
                let left = if i > 0 { hi[i - 1] * hi[i - 1] } else { 0.0 };
                let right = if i + 1 < m { lo[i] * lo[i] } else { 0.0 };
                left + right + shift
            })
            .collect();
        let off = lo.iter().zip(&hi).map(|(a, b)| a * b).collect();
        SymTridiagonal::new(diag, off)
    }
}

/// Lowest `count` eigenpairs of H_n on `grid`.
pub fn numeric_scalar_spectrum(model: &Model, n: u32, grid: &Grid, count: usize) -> Result<Vec<Eigenpair>> {
    solve_symmetric_spectrum(grid, &ScalarHamiltonian { model: *model, n }, count)
}

/// Bottom of the continuous spectrum of H_n, if any.
pub fn continuum_threshold(model: &Model, n: u32) -> Option<f64> {
    match model.kind() {
        HierarchyKind::Increasing => None,
        HierarchyKind::Decreasing => {
            let c = model.superpotential_coefficient(n);
            Some(c * c - model.mu_sq(n))
        }
    }
}

/// Number of eigenvalues of the discretized H_n below the continuum.
pub fn numeric_bound_state_count(model: &Model, n: u32, grid: &Grid) -> Result<usize> {
    let threshold = continuum_threshold(model, n)
        .ok_or_else(|| Error::InvalidArgument("increasing hierarchies have no continuum".into()))?;
    let t = ScalarHamiltonian { model: *model, n }.tridiagonal(grid)?;
    Ok(t.count_below(threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Field, Weight};
    use crate::models::Family;
    use crate::testfn::{random_bump, rng};

    #[test]
    fn trig_numeric_spectrum_matches_half_integer_squares() {
        let m = Model::new(Family::TrigPt);
        let g = m.default_grid();
        let pairs = numeric_scalar_spectrum(&m, 1, &g, 4).unwrap();
        for (k, p) in pairs.iter().enumerate() {
            let exact = (k as f64 + 1.5).powi(2);
            assert!((p.value - exact).abs() / exact < 1e-3, "{} vs {}", p.value, exact);
        }
    }

    #[test]
    fn trig_ground_member_converges_at_the_inverse_square_wall() {
        let m = Model::new(Family::TrigPt);
        let g = m.default_grid();
        let pairs = numeric_scalar_spectrum(&m, 0, &g, 3).unwrap();
        for (k, p) in pairs.iter().enumerate() {
            let exact = (k as f64 + 0.5).powi(2);
            assert!((p.value - exact).abs() < 1e-4, "{} vs {}", p.value, exact);
            let psi = eigenfunction(&m, 0, k as u32, &g).unwrap();
            let ov = p.vector.inner_product(&psi, Weight::Definite).unwrap().norm();
            assert!(ov > 1.0 - 1e-4, "overlap {ov}");
        }
    }

    #[test]
    fn hyp_numeric_spectrum_matches_negative_squares() {
        let m = Model::new(Family::HypPt);
        let g = m.default_grid();
        let pairs = numeric_scalar_spectrum(&m, 3, &g, 3).unwrap();
        for (k, p) in pairs.iter().enumerate() {
            let exact = -(2.5 - k as f64).powi(2);
            assert!((p.value - exact).abs() / exact.abs() < 1e-3, "{} vs {}", p.value, exact);
        }
        assert_eq!(numeric_bound_state_count(&m, 3, &g).unwrap(), 3);
    }

    #[test]
    fn energies() {
        let t = Model::new(Family::TrigPt);
        assert_eq!(scalar_energy(&t, 1, 2).unwrap(), 12.25);
        let h = Model::new(Family::HypPt);
        assert_eq!(scalar_energy(&h, 3, 1).unwrap(), -2.25);
        assert!(matches!(scalar_energy(&h, 3, 3), Err(Error::OutsideSpectrum { .. })));
    }

    #[test]
    fn closed_forms_are_eigenfunctions() {
        for fam in Family::ALL {
            let m = Model::new(fam);
            let g = m.default_grid();
            for n in m.min_index()..m.min_index() + 3 {
                let kmax = m.k_max(n).unwrap_or(4).min(4);
                for k in 0..=kmax {
                    let r = scalar_eigen_residual(&m, n, k, &g).unwrap();
                    assert!(r < 1e-4, "{fam} n={n} k={k} r={r}");
                    let l = ladder_residual(&m, n, k, &g).unwrap();
                    assert!(l < 1e-4, "{fam} n={n} k={k} ladder {l}");
                }
            }
        }
    }

    #[test]
    fn eigenfunctions_are_orthonormal() {
        let m = Model::new(Family::TrigPt);
        let g = m.default_grid();
        let fs: Vec<_> = (0..5).map(|k| eigenfunction(&m, 2, k, &g).unwrap()).collect();
        for (i, a) in fs.iter().enumerate() {
            for (j, b) in fs.iter().enumerate() {
                let ip = a.inner_product(b, Weight::Definite).unwrap().norm();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn operator_identities_on_random_functions() {
        let mut r = rng(11);
        for fam in Family::ALL {
            let m = Model::new(fam);
            let g = m.default_grid();
            for _ in 0..5 {
                let f = random_bump(&g, &mut r);
                for n in m.min_index() + 1..m.min_index() + 4 {
                    assert!(factorization_residual(&m, n, &f).unwrap() < 1e-5);
                    let s = shape_invariance_residual(&m, n, &f).unwrap();
                    assert!(s < 1e-5, "{fam} shape {s}");
                    let t = scalar_intertwine_residual(&m, n, &f).unwrap();
                    assert!(t < 1e-5, "{fam} intertwine {t}");
                }
            }
        }
    }

    #[test]
    fn broken_superpotential_breaks_intertwining() {
        let m = Model::new(Family::TrigPt).with_superpotential_scale(1.05);
        let g = m.default_grid();
        let f = random_bump(&g, &mut rng(3));
        assert!(scalar_intertwine_residual(&m, 1, &f).unwrap() > 1e-3);
    }

    #[test]
    fn numeric_ground_state_overlaps_closed_form() {
        let m = Model::new(Family::HypPt);
        let g = m.default_grid();
        let pairs = numeric_scalar_spectrum(&m, 2, &g, 2).unwrap();
        for (k, p) in pairs.iter().enumerate() {
            let psi = eigenfunction(&m, 2, k as u32, &g).unwrap();
            let ov = p.vector.inner_product(&psi, Weight::Definite).unwrap().norm();
            assert!(ov > 1.0 - 1e-6, "overlap {ov}");
        }
    }
}


//! Concrete superpotential families and their closed-form ground states.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Boundary, Grid, GridFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HierarchyKind {
    /// Energies grow with k: H_n = a+ a- + mu_n^2.
    Increasing,
    /// Energies fall with k: H_n = a+ a- - mu_n^2.
    Decreasing,
}

impl HierarchyKind {
    /// Sign of the mu^2 term in H_n.
    pub fn sign(self) -> f64 {
        match self {
            HierarchyKind::Increasing => 1.0,
            HierarchyKind::Decreasing => -1.0,
        }
    }

    /// Index step of the natural lowering intertwiner h_n -> h_{n+step}.
    pub fn step(self) -> i64 {
        match self {
            HierarchyKind::Increasing => 1,
            HierarchyKind::Decreasing => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// w_n = -(n + 1/2) cot x on (0, pi).
    #[serde(rename = "trig_pt")]
    TrigPt,
    /// w_n = (n - 1/2) tanh x on the line.
    #[serde(rename = "hyp_pt")]
    HypPt,
}

impl Family {
    pub const ALL: [Family; 2] = [Family::TrigPt, Family::HypPt];

    pub fn id(self) -> &'static str {
        match self {
            Family::TrigPt => "trig_pt",
            Family::HypPt => "hyp_pt",
        }
    }

    pub fn kind(self) -> HierarchyKind {
        match self {
            Family::TrigPt => HierarchyKind::Increasing,
            Family::HypPt => HierarchyKind::Decreasing,
        }
    }

    /// Smallest index with a normalizable ground state.
    pub fn min_index(self) -> u32 {
        match self {
            Family::TrigPt => 0,
            Family::HypPt => 1,
        }
    }

    pub fn domain(self) -> (f64, f64) {
        match self {
            Family::TrigPt => (0.0, PI),
            Family::HypPt => (-20.0, 20.0),
        }
    }

    pub fn boundary(self) -> Boundary {
        match self {
            Family::TrigPt => Boundary::Dirichlet,
            Family::HypPt => Boundary::DecayTruncation,
        }
    }

    pub fn default_points(self) -> usize {
        match self {
            Family::TrigPt => 2001,
            Family::HypPt => 4001,
        }
    }

    fn mu_unshifted(self, n: u32) -> f64 {
        match self {
            Family::TrigPt => n as f64 + 0.5,
            Family::HypPt => n as f64 - 0.5,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.id() == s).ok_or_else(|| Error::UnknownModel(s.to_string()))
    }
}

/// A superpotential hierarchy, optionally shifted so that level n0 becomes
/// massless and optionally with a rescaled superpotential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Model {
    family: Family,
    shift: Option<u32>,
    superpotential_scale: f64,
}

impl Model {
    pub fn new(family: Family) -> Self {
        Model { family, shift: None, superpotential_scale: 1.0 }
    }

    pub fn from_id(id: &str) -> Result<Self> {
        Ok(Self::new(id.parse()?))
    }

    /// Multiplies the superpotential coefficient while leaving the masses
    /// untouched. Any scale other than 1 breaks the hierarchy.
    pub fn with_superpotential_scale(mut self, scale: f64) -> Self {
        self.superpotential_scale = scale;
        self
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn kind(&self) -> HierarchyKind {
        self.family.kind()
    }

    pub fn id(&self) -> &'static str {
        self.family.id()
    }

    pub fn shift(&self) -> Option<u32> {
        self.shift
    }

    pub fn superpotential_scale(&self) -> f64 {
        self.superpotential_scale
    }

    /// Same hierarchy with masses replaced by mu_n^2 - mu_{n0}^2.
    pub fn shifted(&self, n0: u32) -> Result<Model> {
        if n0 < self.family.min_index() {
            return Err(Error::IndexOutOfRange { n: n0, min: self.family.min_index() });
        }
        Ok(Model { shift: Some(n0), ..*self })
    }

    pub fn domain(&self) -> (f64, f64) {
        self.family.domain()
    }

    pub fn boundary(&self) -> Boundary {
        self.family.boundary()
    }

    pub fn default_grid(&self) -> Grid {
        let (a, b) = self.domain();
        Grid::new(a, b, self.family.default_points(), self.boundary()).expect("default grid is valid")
    }

    pub fn grid_with_points(&self, n_points: usize) -> Result<Grid> {
        let (a, b) = self.domain();
        Grid::new(a, b, n_points, self.boundary())
    }

    pub fn min_index(&self) -> u32 {
        self.family.min_index().max(self.shift.unwrap_or(0))
    }

    pub fn check_index(&self, n: u32) -> Result<()> {
        if n < self.min_index() {
            return Err(match self.shift {
                Some(n0) if n >= self.family.min_index() => Error::ImaginaryShiftedMass { n, n0 },
                _ => Error::IndexOutOfRange { n, min: self.min_index() },
            });
        }
        Ok(())
    }

    /// Largest k with a bound state at index n, or None when unbounded.
    pub fn k_max(&self, n: u32) -> Option<u32> {
        match self.kind() {
            HierarchyKind::Increasing => None,
            HierarchyKind::Decreasing => Some(n.saturating_sub(self.family.min_index())),
        }
    }

    pub fn check_level(&self, n: u32, k: u32) -> Result<()> {
        self.check_index(n)?;
        match self.k_max(n) {
            Some(kmax) if k > kmax => Err(Error::OutsideSpectrum { n, k }),
            _ => Ok(()),
        }
    }

    /// Squared mass, including the shift when present.
    pub fn mu_sq(&self, n: u32) -> f64 {
        let m = self.family.mu_unshifted(n);
        let s = self.shift.map(|n0| self.family.mu_unshifted(n0)).unwrap_or(0.0);
        m * m - s * s
    }

    /// The mass mu_n appearing in h_n.
    pub fn mass(&self, n: u32) -> Result<f64> {
        match self.shift {
            None => {
                if n < self.family.min_index() {
                    return Err(Error::IndexOutOfRange { n, min: self.family.min_index() });
                }
                Ok(self.family.mu_unshifted(n))
            }
            Some(n0) => {
                let sq = self.mu_sq(n);
                if sq < 0.0 || n < self.family.min_index() {
                    return Err(Error::ImaginaryShiftedMass { n, n0 });
                }
                Ok(sq.sqrt())
            }
        }
    }

    /// Coefficient c_n of the superpotential: w_n = -c_n cot x or c_n tanh x.
    pub fn superpotential_coefficient(&self, n: u32) -> f64 {
        let c = match self.family {
            Family::TrigPt => n as f64 + 0.5,
            Family::HypPt => n as f64 - 0.5,
        };
        self.superpotential_scale * c
    }

    fn check_point(&self, x: f64) -> Result<()> {
        match self.family {
            Family::TrigPt if !(x > 0.0 && x < PI) => Err(Error::SingularPoint { x }),
            _ if !x.is_finite() => Err(Error::InvalidArgument(format!("non-finite x = {x}"))),
            _ => Ok(()),
        }
    }

    pub fn superpotential(&self, n: u32, x: f64) -> Result<f64> {
        self.check_point(x)?;
        let c = self.superpotential_coefficient(n);
        Ok(match self.family {
            Family::TrigPt => -c / x.tan(),
            Family::HypPt => c * x.tanh(),
        })
    }

    pub fn superpotential_derivative(&self, n: u32, x: f64) -> Result<f64> {
        self.check_point(x)?;
        let c = self.superpotential_coefficient(n);
        Ok(match self.family {
            Family::TrigPt => c / (x.sin() * x.sin()),
            Family::HypPt => c / (x.cosh() * x.cosh()),
        })
    }

    /// V_n = w_n^2 - w_n' +/- mu_n^2.
    pub fn potential(&self, n: u32, x: f64) -> Result<f64> {
        let w = self.superpotential(n, x)?;
        let dw = self.superpotential_derivative(n, x)?;
        Ok(w * w - dw + self.kind().sign() * self.mu_sq(n))
    }

    pub fn superpotential_samples(&self, n: u32, grid: &Grid) -> Vec<f64> {
        grid.sample_coefficient(|x| self.superpotential(n, x).unwrap_or(0.0))
    }

    pub fn potential_samples(&self, n: u32, grid: &Grid) -> Vec<f64> {
        grid.sample_coefficient(|x| self.potential(n, x).unwrap_or(0.0))
    }

    /// Normalized ground state psi_n^0, annihilated by a-_n.
    pub fn ground_state(&self, n: u32, grid: &Grid) -> Result<GridFunction> {
        if self.superpotential_coefficient(n) <= 0.0 {
            return Err(Error::NonNormalizable { n });
        }
        self.check_index(n)?;
        Ok(self.closed_form(n, 0)?.sample(grid).normalized())
    }

    /// Unnormalized closed form of psi_n^k built by the raising ladder.
    pub fn closed_form(&self, n: u32, k: u32) -> Result<ClosedForm> {
        self.check_level(n, k)?;
        let top = match self.kind() {
            HierarchyKind::Increasing => n + k,
            HierarchyKind::Decreasing => n - k,
        };
        let c_top = self.superpotential_coefficient(top);
        if c_top <= 0.0 {
            return Err(Error::NonNormalizable { n: top });
        }
        let mut form = ClosedForm { family: self.family, exponent: c_top, poly: vec![1.0] };
        for step in (0..k).rev() {
            let j = match self.kind() {
                HierarchyKind::Increasing => n + step,
                HierarchyKind::Decreasing => n - step,
            };
            form = form.raise(self.superpotential_coefficient(j));
        }
        Ok(form)
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        if let Some(n0) = self.shift {
            write!(f, " shifted at n0={n0}")?;
        }
        Ok(())
    }
}

/// psi(x) = s(x)^p Q(t(x)) with (s, t) = (sin, cos) or (sech, tanh).
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm {
    family: Family,
    exponent: f64,
    /// Coefficients of Q in ascending powers of t.
    poly: Vec<f64>,
}

impl ClosedForm {
    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn polynomial(&self) -> &[f64] {
        &self.poly
    }

    fn st(&self, x: f64) -> (f64, f64) {
        match self.family {
            Family::TrigPt => (x.sin(), x.cos()),
            Family::HypPt => (1.0 / x.cosh(), x.tanh()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (s, t) = self.st(x);
        let q = self.poly.iter().rev().fold(0.0, |acc, &c| acc * t + c);
        s.powf(self.exponent) * q
    }

    pub fn sample(&self, grid: &Grid) -> GridFunction {
        grid.sample_real(|x| self.eval(x))
    }

    /// Applies a+ = -d/dx + w with w = -c cot x (trig) or c tanh x (hyp).
    pub fn raise(&self, c: f64) -> ClosedForm {
        let p = self.exponent;
        let q = &self.poly;
        let dq: Vec<f64> = q.iter().enumerate().skip(1).map(|(i, &a)| i as f64 * a).collect();
        let len = q.len() + 1;
        let mut one_minus_t2_dq = vec![0.0; len];
        for (i, &a) in dq.iter().enumerate() {
            one_minus_t2_dq[i] += a;
            one_minus_t2_dq[i + 2] -= a;
        }
        let mut t_q = vec![0.0; len];
        for (i, &a) in q.iter().enumerate() {
            t_q[i + 1] += (p + c) * a;
        }
        let (poly, exponent) = match self.family {
            Family::TrigPt => (one_minus_t2_dq.iter().zip(&t_q).map(|(a, b)| a - b).collect(), p - 1.0),
            Family::HypPt => (t_q.iter().zip(&one_minus_t2_dq).map(|(a, b)| a - b).collect(), p),
        };
        ClosedForm { family: self.family, exponent, poly }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_potential_matches_closed_form() {
        let m = Model::new(Family::TrigPt);
        for n in 0..4 {
            for &x in &[0.3f64, 1.0, 2.2] {
                let exact = (n as f64 + 0.5) * (n as f64 - 0.5) / x.sin().powi(2);
                assert!((m.potential(n, x).unwrap() - exact).abs() < 1e-12);
            }
        }
        assert!((m.potential(1, PI / 2.0).unwrap() - 0.75).abs() < 1e-14);
    }

    #[test]
    fn hyp_potential_matches_closed_form() {
        let m = Model::new(Family::HypPt);
        for n in 1..5 {
            for &x in &[-2.0f64, 0.0, 0.7] {
                let exact = -(n as f64 + 0.5) * (n as f64 - 0.5) / x.cosh().powi(2);
                assert!((m.potential(n, x).unwrap() - exact).abs() < 1e-12);
            }
        }
        assert!((m.potential(2, 0.0).unwrap() + 3.75).abs() < 1e-14);
    }

    #[test]
    fn singular_points_are_errors() {
        let m = Model::new(Family::TrigPt);
        assert!(matches!(m.potential(0, 0.0), Err(Error::SingularPoint { .. })));
        assert!(matches!(m.potential(0, PI), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn hyp_index_zero_is_non_normalizable() {
        let m = Model::new(Family::HypPt);
        let g = m.default_grid();
        assert!(matches!(m.ground_state(0, &g), Err(Error::NonNormalizable { n: 0 })));
    }

    #[test]
    fn ground_states_are_normalized_and_positive() {
        for fam in Family::ALL {
            let m = Model::new(fam);
            let g = m.default_grid();
            let psi = m.ground_state(m.min_index() + 1, &g).unwrap();
            assert!((crate::grid::Field::norm(&psi) - 1.0).abs() < 1e-12);
            let mid = g.n_points() / 2;
            assert!(psi.values()[mid].re > 0.0);
        }
    }

    #[test]
    fn trig_raise_matches_hand_computation() {
        // a+_0 sin^{3/2} = -2 cos x sin^{1/2} x
        let m = Model::new(Family::TrigPt);
        let f = m.closed_form(0, 1).unwrap();
        for &x in &[0.4f64, 1.3, 2.5] {
            let exact = -2.0 * x.cos() * x.sin().sqrt();
            assert!((f.eval(x) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn hyp_raise_matches_hand_computation() {
        // a+_2 sech^{1/2} = (-d/dx + 3/2 tanh) sech^{1/2} = 2 tanh sech^{1/2}
        let m = Model::new(Family::HypPt);
        let f = m.closed_form(2, 1).unwrap();
        for &x in &[-1.0f64, 0.2, 3.0] {
            let exact = 2.0 * x.tanh() / x.cosh().sqrt();
            assert!((f.eval(x) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn decreasing_levels_are_bounded() {
        let m = Model::new(Family::HypPt);
        assert!(m.check_level(3, 2).is_ok());
        assert!(matches!(m.check_level(3, 3), Err(Error::OutsideSpectrum { n: 3, k: 3 })));
    }

    #[test]
    fn shifted_masses() {
        let m = Model::new(Family::TrigPt).shifted(1).unwrap();
        assert_eq!(m.mass(1).unwrap(), 0.0);
        assert!((m.mass(2).unwrap() - 2.0).abs() < 1e-14);
        assert!(matches!(m.mass(0), Err(Error::ImaginaryShiftedMass { n: 0, n0: 1 })));
        assert!(matches!(m.check_index(0), Err(Error::ImaginaryShiftedMass { .. })));
    }

    #[test]
    fn ids_round_trip() {
        for fam in Family::ALL {
            assert_eq!(fam.id().parse::<Family>().unwrap(), fam);
        }
        assert!(matches!("nope".parse::<Family>(), Err(Error::UnknownModel(_))));
    }
}

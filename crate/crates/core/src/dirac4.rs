//! Massive 4x4 extension H_n(m0) = [[m0, h_n], [h_n, -m0]] with c = 1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dirac2::{
    apply_intertwiner, dirac_apply, dirac_spectrum, eigenspinor, neighbor_index, DiracOperator, IntertwinerKind, Sign,
};
use crate::error::{Error, Result};
use crate::grid::{jacobi_eigen, relative_residual, Field, Grid, Spinor2, Spinor4, Weight};
use crate::models::{HierarchyKind, Model};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MassiveOperator {
    base: DiracOperator,
    m0: f64,
}

impl MassiveOperator {
    pub fn new(base: DiracOperator, m0: f64) -> Result<Self> {
        if !(m0.is_finite() && m0 >= 0.0) {
            return Err(Error::InvalidArgument(format!("mass must be finite and nonnegative, got {m0}")));
        }
        if base.kind() != HierarchyKind::Increasing {
            return Err(Error::InvalidArgument("the massive extension is built for increasing hierarchies only".into()));
        }
        Ok(MassiveOperator { base, m0 })
    }

    pub fn base(&self) -> &DiracOperator {
        &self.base
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }
}

pub fn massive_apply(op: &MassiveOperator, xi: &Spinor4) -> Result<Spinor4> {
    let (a, b) = (xi.upper_block(), xi.lower_block());
    let m0 = op.m0;
    let up = &(&a * m0) + &dirac_apply(&op.base, &b)?;
    let lo = &dirac_apply(&op.base, &a)? - &(&b * m0);
    Spinor4::from_blocks(up, lo)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    PlusEnergy,
    MinusEnergy,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::PlusEnergy, Branch::MinusEnergy];

    pub fn value(self) -> f64 {
        match self {
            Branch::PlusEnergy => 1.0,
            Branch::MinusEnergy => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassiveEntry {
    pub n: u32,
    pub k: u32,
    /// Sign of the underlying 2x2 eigenvalue.
    pub s: Sign,
    pub branch: Branch,
    pub energy: f64,
    /// 2 for k >= 1 (both s share the energy), 1 for the ground level.
    pub degeneracy: u8,
}

fn base_states(op: &MassiveOperator, k_max: u32) -> Result<Vec<(u32, Sign, f64)>> {
    Ok(dirac_spectrum(&op.base, k_max)?.into_iter().map(|e| (e.k, e.sign, e.epsilon)).collect())
}

/// Entries +/- sqrt(mu_{n+k}^2 + m0^2), ascending.
pub fn massive_spectrum(op: &MassiveOperator, k_max: u32) -> Result<Vec<MassiveEntry>> {
    let mut out = Vec::new();
    for (k, s, eps) in base_states(op, k_max)? {
        let e = eps.hypot(op.m0);
        for branch in Branch::BOTH {
            out.push(MassiveEntry {
                n: op.base.n(),
                k,
                s,
                branch,
                energy: branch.value() * e,
                degeneracy: if k == 0 { 1 } else { 2 },
            });
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.k.cmp(&b.k)).then(a.s.cmp(&b.s)));
    Ok(out)
}

/// s mu / (sqrt(mu^2 + m0^2) + m0), taken as 0 when both vanish.
pub fn mixing_coefficient(epsilon: f64, m0: f64) -> f64 {
    let den = epsilon.hypot(m0) + m0;
    if den == 0.0 {
        0.0
    } else {
        epsilon / den
    }
}

#[derive(Clone, Debug)]
pub struct MassiveEigenstate {
    pub entry: MassiveEntry,
    pub coefficient: f64,
    /// Unit norm.
    pub spinor: Spinor4,
}

/// Xi = (Psi, c Psi) for the positive branch and (-c Psi, Psi) for the
/// negative one, with Psi the 2x2 eigenspinor (k, s).
pub fn massive_eigenstate(op: &MassiveOperator, k: u32, s: Sign, branch: Branch, grid: &Grid) -> Result<MassiveEigenstate> {
    let st = eigenspinor(&op.base, k, s, grid)?;
    let eps = st.entry.epsilon;
    let c = mixing_coefficient(eps, op.m0);
    let psi = &st.spinor;
    let xi = match branch {
        Branch::PlusEnergy => Spinor4::from_blocks(psi.clone(), psi * c)?,
        Branch::MinusEnergy => Spinor4::from_blocks(psi * (-c), psi.clone())?,
    };
    Ok(MassiveEigenstate {
        entry: MassiveEntry {
            n: op.base.n(),
            k,
            s,
            branch,
            energy: branch.value() * eps.hypot(op.m0),
            degeneracy: if k == 0 { 1 } else { 2 },
        },
        coefficient: c,
        spinor: xi.normalized(),
    })
}

pub fn massive_eigen_residual(op: &MassiveOperator, state: &MassiveEigenstate) -> Result<f64> {
    let h = massive_apply(op, &state.spinor)?;
    Ok(relative_residual(&(&h - &(&state.spinor * state.entry.energy)), &state.spinor))
}

/// <Xi, H Xi> / <Xi, Xi> evaluated on the grid.
pub fn rayleigh_quotient(op: &MassiveOperator, xi: &Spinor4) -> Result<f64> {
    let num = xi.inner_product(&massive_apply(op, xi)?, Weight::Definite)?;
    let den = xi.inner_product(xi, Weight::Definite)?;
    Ok(num.re / den.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalKind {
    CalR,
    CalRTilde,
    CalT,
    CalTTilde,
}

impl GlobalKind {
    pub const ALL: [GlobalKind; 4] = [GlobalKind::CalR, GlobalKind::CalRTilde, GlobalKind::CalT, GlobalKind::CalTTilde];
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlobalIntertwiner {
    pub kind: GlobalKind,
    pub model: Model,
    pub n: u32,
    pub m0: f64,
}

/// M- = -i sigma+ with sigma+ = [[0, 2], [0, 0]].
pub fn apply_m_minus(psi: &Spinor2) -> Spinor2 {
    let z = psi.lower() * Complex64::new(0.0, -2.0);
    Spinor2::from_pair(z, crate::grid::GridFunction::zeros(*psi.grid())).expect("same grid")
}

impl GlobalIntertwiner {
    pub fn new(kind: GlobalKind, model: Model, n: u32, m0: f64) -> Result<Self> {
        MassiveOperator::new(DiracOperator::new(model, n)?, m0)?;
        neighbor_index(&model, n)?;
        Ok(GlobalIntertwiner { kind, model, n, m0 })
    }

    /// Maps states of H_n(m0) to states of H_{n+1}(m0).
    pub fn apply(&self, xi: &Spinor4) -> Result<Spinor4> {
        let (a, b) = (xi.upper_block(), xi.lower_block());
        let (m, n, m0) = (&self.model, self.n, self.m0);
        let r = |p: &Spinor2| apply_intertwiner(m, n, IntertwinerKind::RMinus, p);
        let t = |p: &Spinor2| apply_intertwiner(m, n, IntertwinerKind::TMinus, p);
        let (up, lo) = match self.kind {
            GlobalKind::CalR => (r(&a)?, r(&b)?),
            GlobalKind::CalT => (-t(&a)?, t(&b)?),
            GlobalKind::CalRTilde => (&(&apply_m_minus(&a) * -m0) + &r(&b)?, &r(&a)? + &(&apply_m_minus(&b) * m0)),
            GlobalKind::CalTTilde => (&(&apply_m_minus(&a) * m0) - &t(&b)?, &t(&a)? + &(&apply_m_minus(&b) * m0)),
        };
        Spinor4::from_blocks(up, lo)
    }
}

/// ||(K H_n - H_{n+1} K) Xi|| / ||Xi||
pub fn global_intertwine_residual(kind: GlobalKind, model: &Model, n: u32, m0: f64, xi: &Spinor4) -> Result<f64> {
    let g = GlobalIntertwiner::new(kind, *model, n, m0)?;
    let h = MassiveOperator::new(DiracOperator::new(*model, n)?, m0)?;
    let h2 = MassiveOperator::new(DiracOperator::new(*model, neighbor_index(model, n)?)?, m0)?;
    let lhs = g.apply(&massive_apply(&h, xi)?)?;
    let rhs = massive_apply(&h2, &g.apply(xi)?)?;
    Ok(relative_residual(&(&lhs - &rhs), xi))
}

/// Residuals of M- h_n + h_{n+1} M- = -2 R-_n and M- h_n - h_{n+1} M- = -2 T-_n.
pub fn m_minus_identity_residuals(model: &Model, n: u32, psi: &Spinor2) -> Result<(f64, f64)> {
    if model.kind() != HierarchyKind::Increasing {
        return Err(Error::InvalidArgument("the M- identities hold for increasing hierarchies".into()));
    }
    let h = DiracOperator::new(*model, n)?;
    let h2 = DiracOperator::new(*model, neighbor_index(model, n)?)?;
    let mh = apply_m_minus(&dirac_apply(&h, psi)?);
    let hm = dirac_apply(&h2, &apply_m_minus(psi))?;
    let r = apply_intertwiner(model, n, IntertwinerKind::RMinus, psi)?;
    let t = apply_intertwiner(model, n, IntertwinerKind::TMinus, psi)?;
    let res_r = relative_residual(&(&(&mh + &hm) + &(&r * 2.0)), psi);
    let res_t = relative_residual(&(&(&mh - &hm) + &(&t * 2.0)), psi);
    Ok((res_r, res_t))
}

/// Singular values (descending) of the four global intertwiner images of xi.
pub fn global_gram_singular_values(model: &Model, n: u32, m0: f64, xi: &Spinor4) -> Result<Vec<f64>> {
    let images = GlobalKind::ALL
        .iter()
        .map(|&k| GlobalIntertwiner::new(k, *model, n, m0)?.apply(xi))
        .collect::<Result<Vec<_>>>()?;
    let d = images.len();
    let mut g = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for i in 0..d {
        for j in 0..d {
            g[i][j] = images[i].inner_product(&images[j], Weight::Definite)?;
        }
    }
    // Hermitian G as a real symmetric matrix of twice the size; eigenvalues double up.
    let mut real = vec![vec![0.0; 2 * d]; 2 * d];
    for i in 0..d {
        for j in 0..d {
            real[i][j] = g[i][j].re;
            real[i + d][j + d] = g[i][j].re;
            real[i][j + d] = -g[i][j].im;
            real[i + d][j] = g[i][j].im;
        }
    }
    let (vals, _) = jacobi_eigen(&real)?;
    let mut sv: Vec<f64> = vals.iter().step_by(2).map(|v| v.max(0.0).sqrt()).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// sigma_max / sigma_min of the intertwiner images (infinite when rank deficient).
pub fn gram_condition(model: &Model, n: u32, m0: f64, xi: &Spinor4) -> Result<f64> {
    let sv = global_gram_singular_values(model, n, m0, xi)?;
    let (max, min) = (sv[0], sv[sv.len() - 1]);
    Ok(if min > 0.0 { max / min } else { f64::INFINITY })
}

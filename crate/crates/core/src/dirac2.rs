//! 2x2 Dirac-like operators h_n built from a factorization hierarchy, their
//! spectra, intertwiners and anti-intertwiners.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    relative_residual, Boundary, Field, Grid, GridFunction, SparseMatrix, Spinor2, Weight,
};
use crate::hierarchy::{apply_factor, apply_schrodinger, eigenfunction, numeric_scalar_spectrum, offset, Direction};
use crate::models::{HierarchyKind, Model};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Numeric,
}

/// Angular-momentum style labels carried by spectrum entries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Labels {
    /// l = n + k and j = l +/- 1/2 (increasing hierarchies).
    Sphere { ell: u32, j: f64 },
    /// lambda = n - k and nu = lambda -/+ 1/2 (decreasing hierarchies).
    Hyperboloid { lambda: u32, nu: f64 },
}

impl Labels {
    pub fn for_state(kind: HierarchyKind, n: u32, k: u32, sign: Sign) -> Labels {
        match kind {
            HierarchyKind::Increasing => {
                let ell = n + k;
                Labels::Sphere { ell, j: ell as f64 + 0.5 * sign.value() }
            }
            HierarchyKind::Decreasing => {
                let lambda = n - k;
                Labels::Hyperboloid { lambda, nu: lambda as f64 - 0.5 * sign.value() }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub n: u32,
    pub k: u32,
    pub sign: Sign,
    pub epsilon: f64,
    pub provenance: Provenance,
    pub labels: Labels,
}

/// h_n for a model; the masses come from the model, so shifted models give
/// the massless construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiracOperator {
    model: Model,
    n: u32,
    mass: f64,
}

impl DiracOperator {
    pub fn new(model: Model, n: u32) -> Result<Self> {
        model.check_index(n)?;
        let mass = model.mass(n)?;
        Ok(DiracOperator { model, n, mass })
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kind(&self) -> HierarchyKind {
        self.model.kind()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Hierarchy indices of the Schrodinger operators acting on the upper
    /// and lower components of h_n^2.
    pub fn component_indices(&self) -> (u32, u32) {
        match self.kind() {
            HierarchyKind::Increasing => (self.n, self.n + 1),
            HierarchyKind::Decreasing => (self.n - 1, self.n),
        }
    }
}

fn lower(model: &Model, j: u32, f: &GridFunction) -> Result<GridFunction> {
    apply_factor(model, j, Direction::Lower, f)
}

fn raise(model: &Model, j: u32, f: &GridFunction) -> Result<GridFunction> {
    apply_factor(model, j, Direction::Raise, f)
}

fn pair(a: GridFunction, b: GridFunction) -> Spinor2 {
    Spinor2::from_pair(a, b).expect("components share a grid")
}

pub fn dirac_apply(op: &DiracOperator, psi: &Spinor2) -> Result<Spinor2> {
    let (m, n, mu) = (&op.model, op.n, op.mass);
    let (u, v) = (psi.upper(), psi.lower());
    Ok(match op.kind() {
        HierarchyKind::Increasing => pair(
            &(u * mu) + &raise(m, n, v)?.times_i(),
            &(-&lower(m, n, u)?.times_i()) - &(v * mu),
        ),
        HierarchyKind::Decreasing => pair(
            &(u * mu) + &lower(m, n, v)?.times_i(),
            &raise(m, n, u)?.times_i() - &(v * mu),
        ),
    })
}

/// Relative residual of h_n^2 = diag(H_n, H_{n+1}) (increasing) or
/// h_n^2 = -diag(H_{n-1}, H_n) (decreasing).
pub fn dirac_square_residual(op: &DiracOperator, psi: &Spinor2) -> Result<f64> {
    let hh = dirac_apply(op, &dirac_apply(op, psi)?)?;
    let (a, b) = op.component_indices();
    let s = op.kind().sign();
    let diag = pair(
        apply_schrodinger(&op.model, a, psi.upper())? * s,
        apply_schrodinger(&op.model, b, psi.lower())? * s,
    );
    Ok(relative_residual(&(&hh - &diag), psi))
}

#[derive(Clone, Debug)]
pub struct DiracEigenstate {
    pub entry: SpectrumEntry,
    /// Unit norm under the definite product.
    pub spinor: Spinor2,
    /// Unnormalized magnitudes of the upper and lower coefficients.
    pub alpha: f64,
    pub beta: f64,
}

fn admissible(op: &DiracOperator, k: u32, sign: Sign) -> Result<()> {
    op.model.check_level(op.n, k)?;
    let absent = match op.kind() {
        HierarchyKind::Increasing => k == 0 && sign == Sign::Minus,
        HierarchyKind::Decreasing => k == 0 && sign == Sign::Plus,
    };
    if absent {
        return Err(Error::StateAbsent { k, sign: sign.symbol() });
    }
    if op.kind() == HierarchyKind::Decreasing && k > 0 && op.n < op.model.min_index() + 1 {
        return Err(Error::OutsideSpectrum { n: op.n, k });
    }
    Ok(())
}

/// |epsilon| for level k: mu_{n+k} or mu_{n-k}.
pub fn level_magnitude(op: &DiracOperator, k: u32) -> Result<f64> {
    op.model.check_level(op.n, k)?;
    match op.kind() {
        HierarchyKind::Increasing => op.model.mass(op.n + k),
        HierarchyKind::Decreasing => op.model.mass(op.n - k),
    }
}

/// Eigenspinor of h_n with energy sign * |epsilon_k|.
pub fn eigenspinor(op: &DiracOperator, k: u32, sign: Sign, grid: &Grid) -> Result<DiracEigenstate> {
    admissible(op, k, sign)?;
    let (m, n, mu) = (&op.model, op.n, op.mass);
    let big = level_magnitude(op, k)?;
    let epsilon = sign.value() * big;
    let entry = SpectrumEntry {
        n,
        k,
        sign,
        epsilon,
        provenance: Provenance::Analytic,
        labels: Labels::for_state(op.kind(), n, k, sign),
    };
    let zero = GridFunction::zeros(*grid);
    let (spinor, alpha, beta) = match op.kind() {
        HierarchyKind::Increasing => {
            let psi = eigenfunction(m, n, k, grid)?;
            if k == 0 {
                (pair(psi, zero), 1.0, 0.0)
            } else {
                let chi = eigenfunction(m, n + 1, k - 1, grid)?;
                let (p, q) = ((big + mu).max(0.0).sqrt(), (big - mu).max(0.0).sqrt());
                match sign {
                    Sign::Plus => (pair(&psi * p, &chi * Complex64::new(0.0, -q)), p, q),
                    Sign::Minus => (pair(&psi * q, &chi * Complex64::new(0.0, p)), q, p),
                }
            }
        }
        HierarchyKind::Decreasing => {
            let psi = eigenfunction(m, n, k, grid)?;
            if k == 0 {
                (pair(zero, psi), 0.0, 1.0)
            } else {
                let phi = eigenfunction(m, n - 1, k - 1, grid)?;
                let (p, q) = ((mu + big).max(0.0).sqrt(), (mu - big).max(0.0).sqrt());
                let (a, b) = match sign {
                    Sign::Plus => (p, q),
                    Sign::Minus => (q, p),
                };
                (pair(&phi * a, &psi * Complex64::new(0.0, b)), a, b)
            }
        }
    };
    Ok(DiracEigenstate { entry, spinor: spinor.normalized(), alpha, beta })
}

/// ||h Psi - epsilon Psi|| / ||Psi||
pub fn dirac_eigen_residual(op: &DiracOperator, state: &DiracEigenstate) -> Result<f64> {
    let h = dirac_apply(op, &state.spinor)?;
    Ok(relative_residual(&(&h - &(&state.spinor * state.entry.epsilon)), &state.spinor))
}

fn check_k_max(op: &DiracOperator, k_max: u32) -> Result<()> {
    match op.model.k_max(op.n) {
        Some(top) if k_max > top => Err(Error::OutsideSpectrum { n: op.n, k: k_max }),
        _ => Ok(()),
    }
}

fn admissible_states(op: &DiracOperator, k_max: u32) -> Vec<(u32, Sign)> {
    (0..=k_max)
        .flat_map(|k| Sign::BOTH.into_iter().map(move |s| (k, s)))
        .filter(|&(k, s)| admissible(op, k, s).is_ok())
        .collect()
}

fn sort_entries(entries: &mut [SpectrumEntry]) {
    entries.sort_by(|a, b| a.epsilon.total_cmp(&b.epsilon).then(a.k.cmp(&b.k)).then(a.sign.cmp(&b.sign)));
}

/// Closed-form spectrum of h_n up to level k_max, ascending in epsilon.
pub fn dirac_spectrum(op: &DiracOperator, k_max: u32) -> Result<Vec<SpectrumEntry>> {
    check_k_max(op, k_max)?;
    let mut entries = admissible_states(op, k_max)
        .into_iter()
        .map(|(k, sign)| {
            let eps = sign.value() * level_magnitude(op, k)?;
            Ok(SpectrumEntry {
                n: op.n,
                k,
                sign,
                epsilon: eps,
                provenance: Provenance::Analytic,
                labels: Labels::for_state(op.kind(), op.n, k, sign),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    sort_entries(&mut entries);
    Ok(entries)
}

/// Spectrum of h_n from grid eigenvectors of the two blocks of h_n^2.
///
/// For each level the block eigenvectors are combined with both coefficient
/// assignments and the energy sign is the one with the smaller residual.
pub fn dirac_spectrum_numeric(op: &DiracOperator, k_max: u32, grid: &Grid) -> Result<Vec<SpectrumEntry>> {
    check_k_max(op, k_max)?;
    let (m, n, mu) = (&op.model, op.n, op.mass);
    let (ia, ib) = op.component_indices();
    let s = op.kind().sign();
    let (main_idx, partner_idx) = match op.kind() {
        HierarchyKind::Increasing => (ia, ib),
        HierarchyKind::Decreasing => (ib, ia),
    };
    let main = numeric_scalar_spectrum(m, main_idx, grid, k_max as usize + 1)?;
    let partner = if k_max > 0 { numeric_scalar_spectrum(m, partner_idx, grid, k_max as usize)? } else { Vec::new() };
    let zero = GridFunction::zeros(*grid);

    let mut entries = Vec::new();
    for k in 0..=k_max {
        let e = main[k as usize].value * s;
        let big = e.max(0.0).sqrt();
        let u = &main[k as usize].vector;
        let candidates: Vec<Spinor2> = if k == 0 {
            match op.kind() {
                HierarchyKind::Increasing => vec![pair(u.clone(), zero.clone())],
                HierarchyKind::Decreasing => vec![pair(zero.clone(), u.clone())],
            }
        } else {
            let mut v = partner[k as usize - 1].vector.clone();
            let a = lower(m, n, u)?;
            if v.inner_product(&a, Weight::Definite)?.re < 0.0 {
                v = -v;
            }
            match op.kind() {
                HierarchyKind::Increasing => {
                    let (p, q) = ((big + mu).max(0.0).sqrt(), (big - mu).max(0.0).sqrt());
                    vec![
                        pair(u * p, &v * Complex64::new(0.0, -q)),
                        pair(u * q, &v * Complex64::new(0.0, p)),
                    ]
                }
                HierarchyKind::Decreasing => {
                    let (p, q) = ((mu + big).max(0.0).sqrt(), (mu - big).max(0.0).sqrt());
                    vec![pair(&v * p, u * Complex64::new(0.0, q)), pair(&v * q, u * Complex64::new(0.0, p))]
                }
            }
        };
        let mut found: Vec<(Sign, f64)> = Vec::new();
        for c in &candidates {
            let c = c.normalized();
            let hc = dirac_apply(op, &c)?;
            let best = Sign::BOTH
                .into_iter()
                .map(|sg| (sg, relative_residual(&(&hc - &(&c * (sg.value() * big))), &c)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("two signs");
            if !found.iter().any(|f| f.0 == best.0) {
                found.push(best);
            }
        }
        for (sign, _) in found {
            entries.push(SpectrumEntry {
                n,
                k,
                sign,
                epsilon: sign.value() * big,
                provenance: Provenance::Numeric,
                labels: Labels::for_state(op.kind(), n, k, sign),
            });
        }
    }
    sort_entries(&mut entries);
    Ok(entries)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntertwinerKind {
    RMinus,
    RPlus,
    TMinus,
    TPlus,
}

/// Index of the operator reached by the minus-type intertwiners from h_n.
pub fn neighbor_index(model: &Model, n: u32) -> Result<u32> {
    model.check_index(n)?;
    let next = offset(n, model.kind().step())?;
    model.check_index(next)?;
    Ok(next)
}

/// Applies R-/T- (h_n -> h_{n+step}) or their adjoints R+/T+ (h_{n+step} -> h_n).
pub fn apply_intertwiner(model: &Model, n: u32, kind: IntertwinerKind, psi: &Spinor2) -> Result<Spinor2> {
    let next = neighbor_index(model, n)?;
    let mu = model.mass(n)?;
    let mu_next = model.mass(next)?;
    let (u, v) = (psi.upper(), psi.lower());
    let delta = mu_next - mu;
    let sigma = mu_next + mu;
    Ok(match model.kind() {
        HierarchyKind::Increasing => match kind {
            IntertwinerKind::RMinus => pair(&lower(model, n, u)? + &(v * (I * delta)), lower(model, n + 1, v)?),
            IntertwinerKind::TMinus => pair(&lower(model, n, u)? - &(v * (I * sigma)), -lower(model, n + 1, v)?),
            IntertwinerKind::RPlus => pair(raise(model, n, u)?, &raise(model, n + 1, v)? - &(u * (I * delta))),
            IntertwinerKind::TPlus => pair(raise(model, n, u)?, &(u * (I * sigma)) - &raise(model, n + 1, v)?),
        },
        HierarchyKind::Decreasing => match kind {
            IntertwinerKind::RMinus => pair(lower(model, n - 1, u)?, &(u * (I * delta)) + &lower(model, n, v)?),
            IntertwinerKind::TMinus => pair(lower(model, n - 1, u)?, &(u * (I * sigma)) - &lower(model, n, v)?),
            IntertwinerKind::RPlus => pair(&raise(model, n - 1, u)? + &(v * (I * delta)), raise(model, n, v)?),
            IntertwinerKind::TPlus => pair(&raise(model, n - 1, u)? + &(v * (I * sigma)), -raise(model, n, v)?),
        },
    })
}

fn ops_pair(model: &Model, n: u32) -> Result<(DiracOperator, DiracOperator)> {
    let next = neighbor_index(model, n)?;
    Ok((DiracOperator::new(*model, n)?, DiracOperator::new(*model, next)?))
}

/// ||(R- h_n - h' R-) Psi|| / ||Psi||
pub fn intertwine_residual(model: &Model, n: u32, psi: &Spinor2) -> Result<f64> {
    let (h, h2) = ops_pair(model, n)?;
    let lhs = apply_intertwiner(model, n, IntertwinerKind::RMinus, &dirac_apply(&h, psi)?)?;
    let rhs = dirac_apply(&h2, &apply_intertwiner(model, n, IntertwinerKind::RMinus, psi)?)?;
    Ok(relative_residual(&(&lhs - &rhs), psi))
}

/// ||(T- h_n + h' T-) Psi|| / ||Psi||
pub fn anti_intertwine_residual(model: &Model, n: u32, psi: &Spinor2) -> Result<f64> {
    let (h, h2) = ops_pair(model, n)?;
    let lhs = apply_intertwiner(model, n, IntertwinerKind::TMinus, &dirac_apply(&h, psi)?)?;
    let rhs = dirac_apply(&h2, &apply_intertwiner(model, n, IntertwinerKind::TMinus, psi)?)?;
    Ok(relative_residual(&(&lhs + &rhs), psi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryProduct {
    /// R+ R-
    S,
    /// T+ T-
    SPrime,
}

/// (h - a)(h - b) Psi
fn quadratic_in_h(op: &DiracOperator, a: f64, b: f64, psi: &Spinor2) -> Result<Spinor2> {
    let first = &dirac_apply(op, psi)? - &(psi * b);
    Ok(&dirac_apply(op, &first)? - &(&first * a))
}

/// Residual of S = R+R- or S' = T+T- against its quadratic polynomial in h_n.
///
/// Increasing: S = (h - mu_n)(h + mu_{n+1}), S' = (h - mu_n)(h - mu_{n+1}).
/// Decreasing: S = -(h - mu_{n-1})(h + mu_n), S' = -(h + mu_{n-1})(h + mu_n).
pub fn symmetry_product_residual(model: &Model, n: u32, which: SymmetryProduct, psi: &Spinor2) -> Result<f64> {
    let (h, _) = ops_pair(model, n)?;
    let (minus, plus) = match which {
        SymmetryProduct::S => (IntertwinerKind::RMinus, IntertwinerKind::RPlus),
        SymmetryProduct::SPrime => (IntertwinerKind::TMinus, IntertwinerKind::TPlus),
    };
    let prod = apply_intertwiner(model, n, plus, &apply_intertwiner(model, n, minus, psi)?)?;
    let expected = symmetry_polynomial(model, n, which, &h, psi)?;
    Ok(relative_residual(&(&prod - &expected), psi))
}

fn symmetry_polynomial(model: &Model, n: u32, which: SymmetryProduct, h: &DiracOperator, psi: &Spinor2) -> Result<Spinor2> {
    let next = neighbor_index(model, n)?;
    let mu = model.mass(n)?;
    let mu_next = model.mass(next)?;
    Ok(match (model.kind(), which) {
        (HierarchyKind::Increasing, SymmetryProduct::S) => quadratic_in_h(h, mu, -mu_next, psi)?,
        (HierarchyKind::Increasing, SymmetryProduct::SPrime) => quadratic_in_h(h, mu, mu_next, psi)?,
        (HierarchyKind::Decreasing, SymmetryProduct::S) => -quadratic_in_h(h, mu_next, -mu, psi)?,
        (HierarchyKind::Decreasing, SymmetryProduct::SPrime) => -quadratic_in_h(h, -mu_next, -mu, psi)?,
    })
}

/// Coefficients (c_h, c_0) with A+_n A-_n - A-_p A+_p = c_h h_n + c_0, where
/// p is the index whose minus-type intertwiner lands on h_n.
pub fn commutator_coefficients(model: &Model, n: u32, which: SymmetryProduct) -> Result<(f64, f64)> {
    let prev = offset(n, -model.kind().step())?;
    let next = neighbor_index(model, n)?;
    model.check_index(prev)?;
    let (mp, m, mn) = (model.mass(prev)?, model.mass(n)?, model.mass(next)?);
    // Formulas are written with mu_{n-1}, mu_n, mu_{n+1} in index order.
    let (below, above) = match model.kind() {
        HierarchyKind::Increasing => (mp, mn),
        HierarchyKind::Decreasing => (mn, mp),
    };
    Ok(match which {
        SymmetryProduct::S => (above - 2.0 * m + below, m * (below - above)),
        SymmetryProduct::SPrime => (-(above + 2.0 * m + below), -m * (below - above)),
    })
}

/// Residual of the commutator identity for R (S) or T (S').
pub fn commutator_residual(model: &Model, n: u32, which: SymmetryProduct, psi: &Spinor2) -> Result<f64> {
    let prev = offset(n, -model.kind().step())?;
    let h = DiracOperator::new(*model, n)?;
    let (minus, plus) = match which {
        SymmetryProduct::S => (IntertwinerKind::RMinus, IntertwinerKind::RPlus),
        SymmetryProduct::SPrime => (IntertwinerKind::TMinus, IntertwinerKind::TPlus),
    };
    let first = apply_intertwiner(model, n, plus, &apply_intertwiner(model, n, minus, psi)?)?;
    let second = apply_intertwiner(model, prev, minus, &apply_intertwiner(model, prev, plus, psi)?)?;
    let (ch, c0) = commutator_coefficients(model, n, which)?;
    let expected = &(&dirac_apply(&h, psi)? * ch) + &(psi * c0);
    Ok(relative_residual(&(&(&first - &second) - &expected), psi))
}

/// Same hierarchy with masses mu~_n = sqrt(mu_n^2 - mu_{n0}^2), valid for n >= n0.
pub fn shift_to_massless(model: &Model, n0: u32) -> Result<Model> {
    model.shifted(n0)
}

/// States annihilated by R- and T- among the eigenbasis of h_n.
pub fn expected_kernel(kind: HierarchyKind, which: IntertwinerKind) -> [(u32, Sign); 2] {
    match (kind, which) {
        (HierarchyKind::Increasing, IntertwinerKind::RMinus) => [(0, Sign::Plus), (1, Sign::Minus)],
        (HierarchyKind::Increasing, _) => [(0, Sign::Plus), (1, Sign::Plus)],
        (HierarchyKind::Decreasing, IntertwinerKind::RMinus) => [(0, Sign::Minus), (1, Sign::Plus)],
        (HierarchyKind::Decreasing, _) => [(0, Sign::Minus), (1, Sign::Minus)],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelReport {
    /// Largest ||A Psi|| over the expected kernel states.
    pub kernel_max: f64,
    /// Smallest ||A Psi|| over all other eigenstates up to k_max.
    pub others_min: f64,
    pub states: Vec<(u32, Sign, f64)>,
}

/// Norms of R- or T- applied to each unit eigenspinor of h_n up to k_max.
pub fn annihilator_kernel(model: &Model, n: u32, which: IntertwinerKind, k_max: u32, grid: &Grid) -> Result<KernelReport> {
    if !matches!(which, IntertwinerKind::RMinus | IntertwinerKind::TMinus) {
        return Err(Error::InvalidArgument("kernels are defined for R- and T-".into()));
    }
    let op = DiracOperator::new(*model, n)?;
    check_k_max(&op, k_max)?;
    let kernel = expected_kernel(model.kind(), which);
    let mut report = KernelReport { kernel_max: 0.0, others_min: f64::INFINITY, states: Vec::new() };
    for (k, sign) in admissible_states(&op, k_max) {
        let st = eigenspinor(&op, k, sign, grid)?;
        let out = apply_intertwiner(model, n, which, &st.spinor)?;
        let norm = relative_residual(&out, &st.spinor);
        if kernel.contains(&(k, sign)) {
            report.kernel_max = report.kernel_max.max(norm);
        } else {
            report.others_min = report.others_min.min(norm);
        }
        report.states.push((k, sign, norm));
    }
    Ok(report)
}

/// Overlap between the two energy signs at level k: definite product for
/// increasing hierarchies, sigma3 product for decreasing ones.
pub fn cross_sign_overlap(op: &DiracOperator, k: u32, grid: &Grid) -> Result<f64> {
    let a = eigenspinor(op, k, Sign::Plus, grid)?;
    let b = eigenspinor(op, k, Sign::Minus, grid)?;
    let w = match op.kind() {
        HierarchyKind::Increasing => Weight::Definite,
        HierarchyKind::Decreasing => Weight::Sigma3,
    };
    Ok(a.spinor.inner_product(&b.spinor, w)?.norm())
}

/// Whether the component expected to dominate for this state's sign does.
/// The rule is the same for both hierarchy kinds: upper for positive energy.
pub fn dominance_holds(state: &DiracEigenstate) -> bool {
    let up = state.spinor.upper().norm();
    let lo = state.spinor.lower().norm();
    if state.entry.sign == Sign::Plus {
        up > lo
    } else {
        lo > up
    }
}

/// h_n as a sparse matrix on the interior nodes, components stacked.
///
/// The derivative uses the skew-symmetric central stencil with zero
/// extension past the interior, so a+ is exactly the transpose of a-.
pub fn assemble_dirac_matrix(op: &DiracOperator, grid: &Grid) -> SparseMatrix {
    let m = grid.n_points() - 2;
    let h = grid.spacing();
    let model = &op.model;
    let w = model.superpotential_samples(op.n, grid);
    let mut mat = SparseMatrix::new(2 * m);
    let stencil = [(-2isize, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
    // a-[r][c] entries on the interior block
    let mut a_minus: Vec<(usize, usize, f64)> = Vec::new();
    for r in 0..m {
        a_minus.push((r, r, w[r + 1]));
        for &(off, c) in &stencil {
            let col = r as isize + off;
            if col >= 0 && (col as usize) < m {
                a_minus.push((r, col as usize, c / (12.0 * h)));
            }
        }
    }
    let mu = op.mass;
    for r in 0..m {
        mat.add(r, r, Complex64::new(mu, 0.0));
        mat.add(m + r, m + r, Complex64::new(-mu, 0.0));
    }
    for &(r, c, a) in &a_minus {
        // a+ = transpose of a-
        match op.kind() {
            HierarchyKind::Increasing => {
                mat.add(c, m + r, I * a);
                mat.add(m + r, c, -I * a);
            }
            HierarchyKind::Decreasing => {
                mat.add(r, m + c, I * a);
                mat.add(m + c, r, I * a);
            }
        }
    }
    mat
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermiticityResiduals {
    /// ||h^dagger - h|| / ||h||
    pub plain: f64,
    /// ||sigma3 h^dagger sigma3 - h|| / ||h||
    pub sigma3: f64,
}

pub fn hermiticity_residuals(op: &DiracOperator, grid: &Grid) -> HermiticityResiduals {
    let mat = assemble_dirac_matrix(op, grid);
    let m = grid.n_points() - 2;
    let weights = vec![grid.spacing(); 2 * m];
    let adj = mat.weighted_adjoint(&weights);
    let signs: Vec<f64> = (0..2 * m).map(|i| if i < m { 1.0 } else { -1.0 }).collect();
    let norm = mat.frobenius_norm();
    HermiticityResiduals {
        plain: adj.frobenius_distance(&mat) / norm,
        sigma3: adj.conjugate_by_signs(&signs).frobenius_distance(&mat) / norm,
    }
}

/// sigma3-Hermiticity residual for decreasing kinds, plain Hermiticity for
/// increasing kinds.
pub fn pseudo_hermiticity_residual(op: &DiracOperator, grid: &Grid) -> f64 {
    let r = hermiticity_residuals(op, grid);
    match op.kind() {
        HierarchyKind::Increasing => r.plain,
        HierarchyKind::Decreasing => r.sigma3,
    }
}

/// Applies the assembled matrix to the interior values of a spinor.
pub fn apply_assembled(mat: &SparseMatrix, psi: &Spinor2) -> Result<Spinor2> {
    let grid = *psi.grid();
    let m = grid.n_points() - 2;
    let mut v = Vec::with_capacity(2 * m);
    for c in psi.components() {
        v.extend_from_slice(&c.values()[1..grid.n_points() - 1]);
    }
    let out = mat.apply(&v);
    let embed = |s: &[Complex64]| {
        let mut vals = vec![Complex64::new(0.0, 0.0); grid.n_points()];
        vals[1..grid.n_points() - 1].copy_from_slice(s);
        GridFunction::new(grid, vals)
    };
    Spinor2::from_pair(embed(&out[..m])?, embed(&out[m..])?)
}

/// True when the discretization keeps endpoint values out of the unknowns.
pub fn matrix_matches_operator(grid: &Grid) -> bool {
    grid.boundary() == Boundary::Dirichlet
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Family;
    use crate::testfn::{random_spinor, rng};

    fn trig() -> Model {
        Model::new(Family::TrigPt)
    }

    fn hyp() -> Model {
        Model::new(Family::HypPt)
    }

    #[test]
    fn ground_levels() {
        let m = trig();
        let g = m.default_grid();
        let op = DiracOperator::new(m, 2).unwrap();
        let psi = pair(m.ground_state(2, &g).unwrap(), GridFunction::zeros(g));
        let h = dirac_apply(&op, &psi).unwrap();
        assert!(relative_residual(&(&h - &(&psi * 2.5)), &psi) < 1e-6);

        let m = hyp();
        let g = m.default_grid();
        let op = DiracOperator::new(m, 3).unwrap();
        let psi = pair(GridFunction::zeros(g), m.ground_state(3, &g).unwrap());
        let h = dirac_apply(&op, &psi).unwrap();
        assert!(relative_residual(&(&h + &(&psi * 2.5)), &psi) < 1e-6);
    }

    #[test]
    fn spectrum_examples() {
        let op = DiracOperator::new(trig(), 0).unwrap();
        let s: Vec<(u32, Sign, f64)> = dirac_spectrum(&op, 1).unwrap().iter().map(|e| (e.k, e.sign, e.epsilon)).collect();
        assert_eq!(s, vec![(1, Sign::Minus, -1.5), (0, Sign::Plus, 0.5), (1, Sign::Plus, 1.5)]);

        let op = DiracOperator::new(hyp(), 3).unwrap();
        let eps: Vec<f64> = dirac_spectrum(&op, 2).unwrap().iter().map(|e| e.epsilon).collect();
        assert_eq!(eps, vec![-2.5, -1.5, -0.5, 0.5, 1.5]);
        assert!(dirac_spectrum(&op, 3).is_err());
    }

    #[test]
    fn coefficient_examples() {
        let g = trig().default_grid();
        let st = eigenspinor(&DiracOperator::new(trig(), 1).unwrap(), 2, Sign::Plus, &g).unwrap();
        assert!((st.alpha / st.beta - (5.0f64 / 2.0).sqrt()).abs() < 1e-12);
        let g = hyp().default_grid();
        let st = eigenspinor(&DiracOperator::new(hyp(), 3).unwrap(), 1, Sign::Minus, &g).unwrap();
        assert!((st.alpha - 1.0).abs() < 1e-12 && (st.beta - 2.0).abs() < 1e-12);
        let op = DiracOperator::new(trig(), 0).unwrap();
        assert!(matches!(eigenspinor(&op, 0, Sign::Minus, &g), Err(Error::StateAbsent { .. })));
    }

    #[test]
    fn eigenspinors_satisfy_eigen_equation() {
        for (m, ns) in [(trig(), vec![0u32, 1, 2]), (hyp(), vec![2, 3, 4])] {
            let g = m.default_grid();
            for n in ns {
                let op = DiracOperator::new(m, n).unwrap();
                let kmax = m.k_max(n).unwrap_or(4);
                for (k, s) in admissible_states(&op, kmax) {
                    let st = eigenspinor(&op, k, s, &g).unwrap();
                    let r = dirac_eigen_residual(&op, &st).unwrap();
                    assert!(r < 1e-4, "n={n} k={k} {s} r={r}");
                    assert!(dominance_holds(&st));
                }
            }
        }
    }

    #[test]
    fn operator_identities_on_random_spinors() {
        let mut r = rng(5);
        for (m, n) in [(trig(), 1u32), (hyp(), 2)] {
            let g = m.default_grid();
            let op = DiracOperator::new(m, n).unwrap();
            for _ in 0..4 {
                let psi: Spinor2 = random_spinor(&g, &mut r);
                assert!(dirac_square_residual(&op, &psi).unwrap() < 1e-5);
                assert!(intertwine_residual(&m, n, &psi).unwrap() < 1e-5);
                assert!(anti_intertwine_residual(&m, n, &psi).unwrap() < 1e-5);
                for which in [SymmetryProduct::S, SymmetryProduct::SPrime] {
                    let s = symmetry_product_residual(&m, n, which, &psi).unwrap();
                    assert!(s < 1e-5, "{which:?} {s}");
                }
            }
        }
    }

    #[test]
    fn commutators() {
        let mut r = rng(9);
        let (ch, c0) = commutator_coefficients(&trig(), 1, SymmetryProduct::S).unwrap();
        assert_eq!((ch, c0), (0.0, -3.0));
        for (m, n) in [(trig(), 1u32), (trig(), 2), (hyp(), 2), (hyp(), 3)] {
            let g = m.default_grid();
            let psi: Spinor2 = random_spinor(&g, &mut r);
            for which in [SymmetryProduct::S, SymmetryProduct::SPrime] {
                let c = commutator_residual(&m, n, which, &psi).unwrap();
                assert!(c < 1e-5, "{n} {which:?} {c}");
            }
        }
    }

    #[test]
    fn kernels() {
        for (m, n) in [(trig(), 1u32), (hyp(), 4)] {
            let g = m.default_grid();
            for which in [IntertwinerKind::RMinus, IntertwinerKind::TMinus] {
                let rep = annihilator_kernel(&m, n, which, m.k_max(n).unwrap_or(3), &g).unwrap();
                assert!(rep.kernel_max < 1e-5, "{rep:?}");
                assert!(rep.others_min > 1e-3, "{rep:?}");
            }
        }
    }

    #[test]
    fn anti_intertwiner_flips_energy() {
        let m = trig();
        let g = m.default_grid();
        let op = DiracOperator::new(m, 1).unwrap();
        let st = eigenspinor(&op, 2, Sign::Plus, &g).unwrap();
        let out = apply_intertwiner(&m, 1, IntertwinerKind::TMinus, &st.spinor).unwrap().normalized();
        let target = eigenspinor(&DiracOperator::new(m, 2).unwrap(), 1, Sign::Minus, &g).unwrap();
        let ov = out.inner_product(&target.spinor, Weight::Definite).unwrap().norm();
        assert!(ov > 0.999, "{ov}");
    }

    #[test]
    fn hermiticity() {
        let g = trig().default_grid();
        let t = DiracOperator::new(trig(), 1).unwrap();
        assert!(pseudo_hermiticity_residual(&t, &g) < 1e-10);
        let g = hyp().default_grid();
        let h = DiracOperator::new(hyp(), 2).unwrap();
        let r = hermiticity_residuals(&h, &g);
        assert!(r.sigma3 < 1e-10);
        assert!(r.plain > 0.1);
    }

    #[test]
    fn assembled_matrix_matches_apply_on_dirichlet_grids() {
        let m = trig();
        let g = m.grid_with_points(301).unwrap();
        let op = DiracOperator::new(m, 1).unwrap();
        let psi: Spinor2 = random_spinor(&g, &mut rng(2));
        let a = apply_assembled(&assemble_dirac_matrix(&op, &g), &psi).unwrap();
        let b = dirac_apply(&op, &psi).unwrap();
        let d = &a - &b;
        assert!(d.components().iter().all(|c| c.max_abs() < 1e-9));
    }

    #[test]
    fn numeric_spectrum_matches_analytic() {
        for (m, n, kmax) in [(trig(), 1u32, 3u32), (hyp(), 3, 2)] {
            let g = m.default_grid();
            let op = DiracOperator::new(m, n).unwrap();
            let an = dirac_spectrum(&op, kmax).unwrap();
            let nu = dirac_spectrum_numeric(&op, kmax, &g).unwrap();
            assert_eq!(an.len(), nu.len());
            for (a, b) in an.iter().zip(&nu) {
                assert_eq!((a.k, a.sign), (b.k, b.sign));
                assert!((a.epsilon - b.epsilon).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn massless_shift() {
        let m = shift_to_massless(&trig(), 1).unwrap();
        let g = m.default_grid();
        let op = DiracOperator::new(m, 1).unwrap();
        assert_eq!(op.mass(), 0.0);
        let st = eigenspinor(&op, 0, Sign::Plus, &g).unwrap();
        assert_eq!(st.entry.epsilon, 0.0);
        assert!(dirac_eigen_residual(&op, &st).unwrap() < 1e-6);
        for s in Sign::BOTH {
            let st = eigenspinor(&op, 1, s, &g).unwrap();
            assert!((st.entry.epsilon - 2.0 * s.value()).abs() < 1e-12);
            assert!(dirac_eigen_residual(&op, &st).unwrap() < 1e-4);
        }
        assert!(matches!(DiracOperator::new(m, 0), Err(Error::ImaginaryShiftedMass { .. })));
    }

    #[test]
    fn orthogonality_across_signs() {
        for (m, n) in [(trig(), 1u32), (hyp(), 4)] {
            let g = m.default_grid();
            let op = DiracOperator::new(m, n).unwrap();
            for k in 1..=3 {
                assert!(cross_sign_overlap(&op, k, &g).unwrap() < 1e-6);
            }
        }
    }
}

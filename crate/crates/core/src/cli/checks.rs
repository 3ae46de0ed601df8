//! Named verification checks. Each returns a residual compared against its
//! tolerance; "greater than" properties report an inverse quantity.

use rand_chacha::ChaCha8Rng;

use crate::dirac2::{
    annihilator_kernel, anti_intertwine_residual, commutator_residual, cross_sign_overlap, dirac_apply,
    dirac_eigen_residual, dirac_spectrum, dirac_spectrum_numeric, dirac_square_residual, dominance_holds,
    eigenspinor, hermiticity_residuals, intertwine_residual, shift_to_massless, symmetry_product_residual,
    DiracOperator, IntertwinerKind, Sign, SymmetryProduct,
};
use crate::dirac4::{
    global_intertwine_residual, gram_condition, m_minus_identity_residuals, massive_eigen_residual,
    massive_eigenstate, massive_spectrum, GlobalKind, MassiveOperator,
};
use crate::error::{Error, Result};
use crate::geometry::{
    casimir_residual, label_consistency_residual, reduce_scalar, reduce_spinor, reduced_antisymmetry_residual,
    reduced_square_residual, reduced_symmetry_match, scalar_ladder_residual, shift_generator_match, Surface,
    SymmetryGenerator,
};
use crate::grid::{Field, Spinor2, Spinor4, Weight};
use crate::hierarchy::{
    eigenfunction, factorization_residual, ladder_residual, numeric_scalar_spectrum, scalar_eigen_residual,
    scalar_energy, scalar_intertwine_residual, shape_invariance_residual,
};
use crate::models::{Family, HierarchyKind};
use crate::testfn::{random_bump, random_spinor, rng};

use super::config::Scenario;

/// Seeded test functions drawn per check.
pub const TEST_FUNCTIONS: usize = 8;

/// Masses used by the massive checks when the scenario sets none.
pub const DEFAULT_MASSES: [f64; 3] = [0.0, 0.75, 1.0];

type Applies = fn(&Scenario) -> std::result::Result<(), &'static str>;
type Run = fn(&Scenario, &mut ChaCha8Rng) -> Result<f64>;

pub struct CheckSpec {
    pub id: &'static str,
    pub tolerance: f64,
    pub description: &'static str,
    applies: Applies,
    run: Run,
}

impl std::fmt::Debug for CheckSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CheckSpec").field("id", &self.id).field("tolerance", &self.tolerance).finish()
    }
}

impl CheckSpec {
    pub fn applicable(&self, s: &Scenario) -> std::result::Result<(), &'static str> {
        (self.applies)(s)
    }

    /// Runs the check with a generator seeded from `seed` and the check's
    /// position in the registry, so results do not depend on run order.
    pub fn run(&self, s: &Scenario, seed: u64) -> Result<f64> {
        let idx = REGISTRY.iter().position(|c| c.id == self.id).unwrap_or(0) as u64;
        let mut r = rng(seed.wrapping_add(idx.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        (self.run)(s, &mut r)
    }
}

pub fn registry() -> &'static [CheckSpec] {
    REGISTRY
}

pub fn find(id: &str) -> Result<&'static CheckSpec> {
    REGISTRY.iter().find(|c| c.id == id).ok_or_else(|| Error::UnknownCheck {
        id: id.to_string(),
        known: REGISTRY.iter().map(|c| c.id).collect::<Vec<_>>().join(", "),
    })
}

/// Requested checks, or every applicable one when the list is empty.
pub fn select(s: &Scenario, ids: &[String]) -> Result<Vec<&'static CheckSpec>> {
    if ids.is_empty() {
        return Ok(REGISTRY.iter().filter(|c| c.applicable(s).is_ok()).collect());
    }
    let mut out: Vec<&'static CheckSpec> = Vec::new();
    for id in ids {
        let c = find(id)?;
        c.applicable(s).map_err(|reason| Error::NotApplicable { id: id.clone(), reason: reason.into() })?;
        if !out.iter().any(|x| x.id == c.id) {
            out.push(c);
        }
    }
    Ok(out)
}

fn always(_: &Scenario) -> std::result::Result<(), &'static str> {
    Ok(())
}

fn increasing(s: &Scenario) -> std::result::Result<(), &'static str> {
    if s.model.kind() == HierarchyKind::Increasing {
        Ok(())
    } else {
        Err("defined for increasing hierarchies only")
    }
}

fn decreasing(s: &Scenario) -> std::result::Result<(), &'static str> {
    if s.model.kind() == HierarchyKind::Decreasing {
        Ok(())
    } else {
        Err("defined for decreasing hierarchies only")
    }
}

/// Both h_n and its intertwining partner exist.
fn has_neighbor(s: &Scenario) -> std::result::Result<(), &'static str> {
    if s.model.kind() == HierarchyKind::Decreasing && s.n < 2 {
        Err("needs n >= 2 for a decreasing hierarchy")
    } else {
        Ok(())
    }
}

fn has_commutator(s: &Scenario) -> std::result::Result<(), &'static str> {
    has_neighbor(s)?;
    if s.model.kind() == HierarchyKind::Increasing && s.n < 1 {
        Err("needs n >= 1 for an increasing hierarchy")
    } else {
        Ok(())
    }
}

fn surface(s: &Scenario) -> Surface {
    match s.model.family() {
        Family::TrigPt => Surface::Sphere,
        Family::HypPt => Surface::Hyperboloid,
    }
}

/// Highest level used by checks that need an excited state.
fn excited_top(s: &Scenario) -> u32 {
    let k = s.k_max.max(1);
    s.model.k_max(s.n).map_or(k, |top| k.min(top))
}

fn masses(s: &Scenario) -> Vec<f64> {
    s.m0.map_or_else(|| DEFAULT_MASSES.to_vec(), |m| vec![m])
}

fn max_of<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
}

fn bumps(s: &Scenario, r: &mut ChaCha8Rng) -> Vec<crate::grid::GridFunction> {
    (0..TEST_FUNCTIONS).map(|_| random_bump(&s.grid, r)).collect()
}

fn spinors(s: &Scenario, r: &mut ChaCha8Rng) -> Vec<Spinor2> {
    (0..TEST_FUNCTIONS).map(|_| random_spinor(&s.grid, r)).collect()
}

fn op(s: &Scenario) -> Result<DiracOperator> {
    DiracOperator::new(s.model, s.n)
}

fn states(s: &Scenario, k_max: u32) -> Result<Vec<(u32, Sign)>> {
    Ok(dirac_spectrum(&op(s)?, k_max)?.into_iter().map(|e| (e.k, e.sign)).collect())
}

fn factorization(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    max_of(bumps(s, r).iter().map(|f| factorization_residual(&s.model, s.n, f)))
}

fn shape_invariance(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    max_of(bumps(s, r).iter().map(|f| shape_invariance_residual(&s.model, s.n, f)))
}

fn scalar_intertwining(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    max_of(bumps(s, r).iter().map(|f| scalar_intertwine_residual(&s.model, s.n, f)))
}

fn scalar_eigen(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    max_of((0..=s.k_max).map(|k| scalar_eigen_residual(&s.model, s.n, k, &s.grid)))
}

fn ladder(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    max_of((0..=s.k_max).map(|k| ladder_residual(&s.model, s.n, k, &s.grid)))
}

/// 1 - min |<closed form, grid eigenvector>|
fn ladder_overlap(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    let num = numeric_scalar_spectrum(&s.model, s.n, &s.grid, s.k_max as usize + 1)?;
    max_of((0..=s.k_max).map(|k| {
        let psi = eigenfunction(&s.model, s.n, k, &s.grid)?;
        Ok(1.0 - psi.inner_product(&num[k as usize].vector, Weight::Definite)?.norm())
    }))
}

/// max |E_numeric - E| / max(1, |E|)
fn scalar_spectrum(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    let num = numeric_scalar_spectrum(&s.model, s.n, &s.grid, s.k_max as usize + 1)?;
    max_of((0..=s.k_max).map(|k| {
        let e = scalar_energy(&s.model, s.n, k)?;
        Ok((num[k as usize].value - e).abs() / e.abs().max(1.0))
    }))
}

fn dirac_eigen(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    let o = op(s)?;
    max_of(states(s, s.k_max)?.into_iter().map(|(k, sg)| dirac_eigen_residual(&o, &eigenspinor(&o, k, sg, &s.grid)?)))
}

/// Largest |epsilon_numeric - epsilon|; infinite when the state lists differ.
fn numeric_dirac_spectrum(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    let o = op(s)?;
    let an = dirac_spectrum(&o, s.k_max)?;
    let nu = dirac_spectrum_numeric(&o, s.k_max, &s.grid)?;
    if an.len() != nu.len() {
        return Ok(f64::INFINITY);
    }
    let mut worst = 0.0f64;
    for (a, b) in an.iter().zip(&nu) {
        if (a.k, a.sign) != (b.k, b.sign) {
            return Ok(f64::INFINITY);
        }
        worst = worst.max((a.epsilon - b.epsilon).abs());
    }
    Ok(worst)
}

fn square_relation(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    let o = op(s)?;
    max_of(spinors(s, r).iter().map(|p| dirac_square_residual(&o, p)))
}

fn intertwining(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    max_of(spinors(s, r).iter().map(|p| intertwine_residual(&s.model, s.n, p)))
}

fn anti_intertwining(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    max_of(spinors(s, r).iter().map(|p| anti_intertwine_residual(&s.model, s.n, p)))
}

/// Largest kernel norm, or infinity if any other state is also annihilated.
fn kernel(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for which in [IntertwinerKind::RMinus, IntertwinerKind::TMinus] {
        let rep = annihilator_kernel(&s.model, s.n, which, excited_top(s), &s.grid)?;
        if rep.others_min <= 1e-3 {
            return Ok(f64::INFINITY);
        }
        worst = worst.max(rep.kernel_max);
    }
    Ok(worst)
}

fn symmetry_product(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    let ps = spinors(s, r);
    max_of([SymmetryProduct::S, SymmetryProduct::SPrime].into_iter().flat_map(|w| {
        ps.iter().map(move |p| symmetry_product_residual(&s.model, s.n, w, p)).collect::<Vec<_>>()
    }))
}

fn commutator(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    let ps = spinors(s, r);
    max_of([SymmetryProduct::S, SymmetryProduct::SPrime].into_iter().flat_map(|w| {
        ps.iter().map(move |p| commutator_residual(&s.model, s.n, w, p)).collect::<Vec<_>>()
    }))
}

fn pseudo_hermiticity(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    let r = hermiticity_residuals(&op(s)?, &s.grid);
    Ok(match s.model.kind() {
        HierarchyKind::Increasing => r.plain,
        HierarchyKind::Decreasing => r.sigma3,
    })
}

/// 1 / plain-Hermiticity residual; passes when the plain residual exceeds 0.1.
fn non_hermiticity_control(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    Ok(1.0 / hermiticity_residuals(&op(s)?, &s.grid).plain)
}

fn orthogonality(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    let o = op(s)?;
    max_of((1..=excited_top(s)).map(|k| cross_sign_overlap(&o, k, &s.grid)))
}

/// Largest ratio of the expected-minor to expected-major component norm.
fn dominance(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    let o = op(s)?;
    max_of(states(s, s.k_max)?.into_iter().map(|(k, sg)| {
        let st = eigenspinor(&o, k, sg, &s.grid)?;
        let (u, l) = (st.spinor.upper().norm(), st.spinor.lower().norm());
        let ratio = if sg == Sign::Plus { l / u } else { u / l };
        Ok(if dominance_holds(&st) { ratio } else { ratio.max(1.0) })
    }))
}

/// Eigen residuals and energy expectation errors of the massless states at n0 = n.
fn massless_shift(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    let m = shift_to_massless(&s.model, s.n)?;
    let o = DiracOperator::new(m, s.n)?;
    max_of(dirac_spectrum(&o, s.k_max.max(1))?.into_iter().map(|e| {
        let st = eigenspinor(&o, e.k, e.sign, &s.grid)?;
        let h = dirac_apply(&o, &st.spinor)?;
        let q = st.spinor.inner_product(&h, Weight::Definite)?.re;
        Ok(dirac_eigen_residual(&o, &st)?.max((q - e.epsilon).abs()))
    }))
}

fn massive_eigen(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    let mut worst = 0.0f64;
    for m0 in masses(s) {
        let mo = MassiveOperator::new(op(s)?, m0)?;
        for e in massive_spectrum(&mo, s.k_max)? {
            let st = massive_eigenstate(&mo, e.k, e.s, e.branch, &s.grid)?;
            worst = worst.max(massive_eigen_residual(&mo, &st)?);
        }
    }
    Ok(worst)
}

fn global_intertwining(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    let xs: Vec<Spinor4> = (0..TEST_FUNCTIONS).map(|_| random_spinor(&s.grid, r)).collect();
    let mut worst = 0.0f64;
    for m0 in masses(s) {
        for k in GlobalKind::ALL {
            for x in &xs {
                worst = worst.max(global_intertwine_residual(k, &s.model, s.n, m0, x)?);
            }
        }
    }
    Ok(worst)
}

fn m_minus_identities(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    max_of(spinors(s, r).iter().map(|p| {
        let (a, b) = m_minus_identity_residuals(&s.model, s.n, p)?;
        Ok(a.max(b))
    }))
}

/// sigma_max / sigma_min of the four global intertwiner images.
fn gram_rank(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    let x: Spinor4 = random_spinor(&s.grid, r);
    max_of(masses(s).into_iter().map(|m0| gram_condition(&s.model, s.n, m0, &x)))
}

fn reduction_scalar(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    let sf = surface(s);
    max_of(bumps(s, r).iter().map(|f| Ok(reduce_scalar(sf, s.n, f)?.max(scalar_ladder_residual(sf, s.n, f)?))))
}

fn reduction_spinor(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    let sf = surface(s);
    let m = sf.mode_for_index(s.n);
    max_of(spinors(s, r).iter().map(|p| reduce_spinor(sf, m, p)))
}

fn reduced_square(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    let sf = surface(s);
    let m = sf.mode_for_index(s.n);
    max_of(spinors(s, r).iter().map(|p| reduced_square_residual(sf, m, p)))
}

fn generators(s: &Scenario) -> Vec<SymmetryGenerator> {
    match surface(s) {
        Surface::Sphere if s.n >= 1 => vec![SymmetryGenerator::Jplus, SymmetryGenerator::Jminus],
        Surface::Sphere => vec![SymmetryGenerator::Jplus],
        Surface::Hyperboloid if s.n >= 2 => vec![SymmetryGenerator::Kplus, SymmetryGenerator::Kminus],
        Surface::Hyperboloid => vec![SymmetryGenerator::Kplus],
    }
}

fn generator_match(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    let sf = surface(s);
    let m = sf.mode_for_index(s.n);
    let ps = spinors(s, r);
    let mut worst = 0.0f64;
    for p in &ps {
        for g in generators(s) {
            worst = worst.max(reduced_symmetry_match(sf, m, g, p)?.residual);
        }
        if sf == Surface::Sphere || s.n >= 2 {
            worst = worst.max(shift_generator_match(sf, m, p)?.residual);
        }
    }
    Ok(worst)
}

fn reduced_antisymmetry(s: &Scenario, r: &mut ChaCha8Rng) -> Result<f64> {
    let sf = surface(s);
    let m = sf.mode_for_index(s.n);
    max_of(spinors(s, r).iter().map(|p| reduced_antisymmetry_residual(sf, m, p)))
}

fn casimir(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    let sf = surface(s);
    max_of(states(s, s.k_max)?.into_iter().map(|(k, sg)| casimir_residual(sf, s.n, k, sg, &s.grid)))
}

fn label_consistency(s: &Scenario, _: &mut ChaCha8Rng) -> Result<f64> {
    max_of(states(s, s.k_max)?.into_iter().map(|(k, sg)| label_consistency_residual(s.n, k, sg)))
}

macro_rules! check {
    ($id:literal, $tol:expr, $desc:literal, $applies:expr, $run:expr) => {
        CheckSpec { id: $id, tolerance: $tol, description: $desc, applies: $applies, run: $run }
    };
}

static REGISTRY: &[CheckSpec] = &[
    check!("factorization", 1e-5, "H_n = a+ a- +/- mu_n^2 on seeded bumps", always, factorization),
    check!("shape_invariance", 1e-5, "a- a+ +/- mu_n^2 = H_{n+-1}", always, shape_invariance),
    check!("scalar_intertwining", 1e-5, "a- H_n = H_{n+-1} a-", always, scalar_intertwining),
    check!("scalar_eigen", 1e-4, "closed-form psi_n^k solve H_n", always, scalar_eigen),
    check!("ladder", 1e-4, "a- psi_n^k = c psi^{k-1} of the neighbor", always, ladder),
    check!("ladder_overlap", 1e-4, "1 - overlap of closed forms with grid eigenvectors", always, ladder_overlap),
    check!("scalar_spectrum", 1e-3, "grid eigenvalues against closed-form energies", always, scalar_spectrum),
    check!("dirac_eigen", 1e-4, "eigenspinors solve h_n", always, dirac_eigen),
    check!("numeric_dirac_spectrum", 1e-3, "grid spectrum of h_n against closed form", always, numeric_dirac_spectrum),
    check!("square_relation", 1e-5, "h_n^2 is diagonal in Schrodinger operators", always, square_relation),
    check!("intertwining", 1e-5, "R- h_n = h' R-", has_neighbor, intertwining),
    check!("anti_intertwining", 1e-5, "T- h_n = -h' T-", has_neighbor, anti_intertwining),
    check!("annihilator_kernel", 1e-5, "kernels of R- and T- among eigenspinors", has_neighbor, kernel),
    check!("symmetry_product", 1e-5, "R+R- and T+T- as polynomials in h_n", has_neighbor, symmetry_product),
    check!("commutator", 1e-5, "R+R- - R-R+ and T+T- - T-T+ linear in h_n", has_commutator, commutator),
    check!("pseudo_hermiticity", 1e-10, "assembled h_n is (sigma3-)Hermitian", always, pseudo_hermiticity),
    check!("non_hermiticity_control", 10.0, "inverse plain-Hermiticity residual", decreasing, non_hermiticity_control),
    check!("orthogonality", 1e-6, "overlap of opposite-sign eigenspinors", has_neighbor, orthogonality),
    check!("dominance", 1.0, "minor to major component norm ratio", always, dominance),
    check!("massless_shift", 1e-4, "eigenstates of the massless shifted operator", increasing, massless_shift),
    check!("massive_eigen", 1e-4, "4x4 eigenstates solve H_n(m0)", increasing, massive_eigen),
    check!("global_intertwining", 1e-5, "four global intertwiners of H_n(m0)", increasing, global_intertwining),
    check!("m_minus_identities", 1e-5, "M- h_n +- h_{n+1} M- = -2 R-, -2 T-", increasing, m_minus_identities),
    check!("gram_rank", 1e6, "condition number of the four intertwiner images", increasing, gram_rank),
    check!("reduction_scalar", 1e-5, "surface Casimir reduces to H_n", always, reduction_scalar),
    check!("reduction_spinor", 1e-5, "spin-orbit operator reduces to h_n", always, reduction_spinor),
    check!("reduced_square", 1e-5, "square of the reduced spin-orbit operator", always, reduced_square),
    check!("generator_match", 1e-5, "reduced generators against R and T", always, generator_match),
    check!("reduced_antisymmetry", 1e-5, "shift generator anticommutes with h", has_neighbor, reduced_antisymmetry),
    check!("casimir", 1e-4, "surface Hamiltonian on eigenspinor components", always, casimir),
    check!("label_consistency", 1e-9, "j(j+1) from labels and energies", increasing, label_consistency),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::ScenarioConfig;

    fn scenario(json: &str) -> Result<Scenario> {
        Scenario::new(ScenarioConfig::from_json(json)?)
    }

    #[test]
    fn ids_are_unique() {
        let mut ids: Vec<_> = registry().iter().map(|c| c.id).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), registry().len());
    }

    #[test]
    fn unknown_check_lists_known_ids() {
        let e = scenario(r#"{"model_id":"trig_pt","n":1,"k_max":2,"checks":["nope"]}"#).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("nope") && msg.contains("factorization"), "{msg}");
    }

    #[test]
    fn inapplicable_request_is_an_error() {
        let e = scenario(r#"{"model_id":"hyp_pt","n":3,"k_max":2,"checks":["gram_rank"]}"#).unwrap_err();
        assert!(matches!(e, Error::NotApplicable { .. }));
    }

    #[test]
    fn hyperbolic_edge_scenario_runs_every_applicable_check() {
        let s = scenario(r#"{"model_id":"hyp_pt","n":1,"k_max":0,"grid":{"n_points":1601}}"#).unwrap();
        for c in &s.checks {
            let r = c.run(&s, 1).unwrap();
            assert!(r < c.tolerance, "{} {r}", c.id);
        }
    }
}

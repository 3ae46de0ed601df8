//! Sphere and one-sheet hyperboloid: angular-mode reduction of the scalar
//! Casimir, the spin-orbit operator and their group generators.
//!
//! The azimuthal dependence is kept symbolic. A mode function is a profile
//! f(x) times e^{i p phi}, so d/dphi acts as multiplication by i p.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dirac2::{
    apply_intertwiner, dirac_apply, dirac_spectrum, eigenspinor, DiracOperator, IntertwinerKind, Labels, Sign,
};
use crate::error::{Error, Result};
use crate::grid::{differentiate, relative_residual, Field, Grid, GridFunction, Spinor2, Weight};
use crate::hierarchy::{apply_factor, apply_schrodinger, Direction};
use crate::models::{Family, Model};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Surface {
    Sphere,
    Hyperboloid,
}

impl Surface {
    pub const ALL: [Surface; 2] = [Surface::Sphere, Surface::Hyperboloid];

    pub fn family(self) -> Family {
        match self {
            Surface::Sphere => Family::TrigPt,
            Surface::Hyperboloid => Family::HypPt,
        }
    }

    pub fn model(self) -> Model {
        Model::new(self.family())
    }

    /// Constant added to the spin-orbit operator before squaring: +1/2 on
    /// the sphere, -1/2 on the hyperboloid.
    pub fn spin_shift(self) -> f64 {
        match self {
            Surface::Sphere => 0.5,
            Surface::Hyperboloid => -0.5,
        }
    }

    /// cot on the sphere, tanh on the hyperboloid; zero at Dirichlet ends.
    fn angular_samples(self, grid: &Grid) -> Vec<f64> {
        match self {
            Surface::Sphere => grid.sample_coefficient(|x| x.cos() / x.sin()),
            Surface::Hyperboloid => grid.sample_coefficient(f64::tanh),
        }
    }

    /// Hierarchy index n of the reduced operator at spinor mode m.
    pub fn index_for_mode(self, m: f64) -> Result<u32> {
        let p = m - 0.5;
        if !(p.is_finite() && p.fract() == 0.0) {
            return Err(Error::InvalidArgument(format!("m must be a half-integer, got {m}")));
        }
        let n = match self {
            Surface::Sphere => p,
            Surface::Hyperboloid => p + 1.0,
        };
        let min = self.family().min_index() as f64;
        if n < min {
            return Err(Error::InvalidArgument(format!("mode m={m} is below the hierarchy range")));
        }
        Ok(n as u32)
    }

    /// Spinor mode m whose reduction gives h_n.
    pub fn mode_for_index(self, n: u32) -> f64 {
        match self {
            Surface::Sphere => n as f64 + 0.5,
            Surface::Hyperboloid => n as f64 - 0.5,
        }
    }
}

/// profile(x) e^{i freq phi}
#[derive(Clone, Debug, PartialEq)]
pub struct ModeFunction {
    pub freq: i64,
    pub profile: GridFunction,
}

impl ModeFunction {
    pub fn new(freq: i64, profile: GridFunction) -> Self {
        ModeFunction { freq, profile }
    }
}

pub fn l_plus(surface: Surface, f: &ModeFunction) -> Result<ModeFunction> {
    let p = f.freq as f64;
    let a = surface.angular_samples(f.profile.grid());
    let d = differentiate(&f.profile, 1)?;
    let profile = &d - &(&f.profile.mul_pointwise(&a) * (p + 0.5));
    Ok(ModeFunction::new(f.freq + 1, profile))
}

pub fn l_minus(surface: Surface, f: &ModeFunction) -> Result<ModeFunction> {
    let p = f.freq as f64;
    let a = surface.angular_samples(f.profile.grid());
    let d = differentiate(&f.profile, 1)?;
    // On the sphere the phase shift acts first, so i d/dphi sees p - 1; on
    // the hyperboloid it acts last. Both give the coefficient 1/2 - p.
    let profile = &f.profile.mul_pointwise(&a) * (0.5 - p) - d;
    Ok(ModeFunction::new(f.freq - 1, profile))
}

pub fn l_z(f: &ModeFunction) -> ModeFunction {
    ModeFunction::new(f.freq, &f.profile * f.freq as f64)
}

/// L^2 = L+L- + Lz^2 - Lz (sphere) or C = L+L- - Lz(Lz - 1) (hyperboloid).
pub fn casimir(surface: Surface, f: &ModeFunction) -> Result<ModeFunction> {
    let ll = l_plus(surface, &l_minus(surface, f)?)?;
    let p = f.freq as f64;
    let z = match surface {
        Surface::Sphere => p * p - p,
        Surface::Hyperboloid => -p * (p - 1.0),
    };
    Ok(ModeFunction::new(f.freq, &ll.profile + &(&f.profile * z)))
}

/// Scalar Hamiltonian on the surface: Casimir + 1/4 (sphere), Casimir - 1/4 (hyperboloid).
pub fn surface_hamiltonian(surface: Surface, f: &ModeFunction) -> Result<ModeFunction> {
    let c = casimir(surface, f)?;
    Ok(ModeFunction::new(f.freq, &c.profile + &(&f.profile * quarter(surface))))
}

fn quarter(surface: Surface) -> f64 {
    0.5 * surface.spin_shift()
}

/// Untransformed Laplace-Beltrami form on F = f / sqrt(measure), mapped back
/// by sqrt(measure) and shifted by +-1/4.
///
/// Sphere: -F'' - cot F' + p^2/sin^2 F. Hyperboloid: -F'' - tanh F' - p^2/cosh^2 F.
pub fn laplacian_route(surface: Surface, f: &ModeFunction) -> Result<GridFunction> {
    let grid = *f.profile.grid();
    let p2 = (f.freq * f.freq) as f64;
    let (root, a, pot) = match surface {
        Surface::Sphere => (
            grid.sample_coefficient(|x| x.sin().sqrt()),
            surface.angular_samples(&grid),
            grid.sample_coefficient(|x| p2 / x.sin().powi(2)),
        ),
        Surface::Hyperboloid => (
            grid.sample_coefficient(|x| x.cosh().sqrt()),
            surface.angular_samples(&grid),
            grid.sample_coefficient(|x| -p2 / x.cosh().powi(2)),
        ),
    };
    let inv: Vec<f64> = root.iter().map(|r| if *r > 0.0 { 1.0 / r } else { 0.0 }).collect();
    let big = f.profile.mul_pointwise(&inv);
    let d1 = differentiate(&big, 1)?;
    let d2 = differentiate(&big, 2)?;
    let lap = &(&big.mul_pointwise(&pot) - &d2) - &d1.mul_pointwise(&a);
    Ok(&lap.mul_pointwise(&root) + &(&f.profile * quarter(surface)))
}

/// Deviation of both surface routes from H_n f on the mode e^{i n phi}.
///
/// Returns the larger of the generator-route and Laplacian-route residuals.
pub fn reduce_scalar(surface: Surface, n: u32, f: &GridFunction) -> Result<f64> {
    let model = surface.model();
    model.check_index(n)?;
    let mode = ModeFunction::new(n as i64, f.clone());
    let expected = apply_schrodinger(&model, n, f)?;
    let gen = surface_hamiltonian(surface, &mode)?.profile;
    let lap = laplacian_route(surface, &mode)?;
    Ok(relative_residual(&(&gen - &expected), f).max(relative_residual(&(&lap - &expected), f)))
}

/// Reduced L+ and L- against a-_n and a+_n on a profile.
///
/// Sphere: L+ on mode n and L- on mode n+1. Hyperboloid: L+ on mode -n and
/// L- on mode -(n-1).
pub fn scalar_ladder_residual(surface: Surface, n: u32, f: &GridFunction) -> Result<f64> {
    let model = surface.model();
    model.check_index(n)?;
    let n = n as i64;
    let (lower_mode, raise_mode) = match surface {
        Surface::Sphere => (n, n + 1),
        Surface::Hyperboloid => (-n, -(n - 1)),
    };
    let lp = l_plus(surface, &ModeFunction::new(lower_mode, f.clone()))?.profile;
    let lm = l_minus(surface, &ModeFunction::new(raise_mode, f.clone()))?.profile;
    let am = apply_factor(&model, n as u32, Direction::Lower, f)?;
    let ap = apply_factor(&model, n as u32, Direction::Raise, f)?;
    Ok(relative_residual(&(&lp - &am), f).max(relative_residual(&(&lm - &ap), f)))
}

/// (upper e^{i p phi}, lower e^{i (p+1) phi}) with p = m - 1/2.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeSpinor {
    pub p: i64,
    pub upper: GridFunction,
    pub lower: GridFunction,
}

impl ModeSpinor {
    pub fn m(&self) -> f64 {
        self.p as f64 + 0.5
    }

    fn upper_mode(&self) -> ModeFunction {
        ModeFunction::new(self.p, self.upper.clone())
    }

    fn lower_mode(&self) -> ModeFunction {
        ModeFunction::new(self.p + 1, self.lower.clone())
    }

    fn profiles(&self) -> Spinor2 {
        Spinor2::from_pair(self.upper.clone(), self.lower.clone()).expect("same grid")
    }
}

/// Spinor in the frame of the 1D operators mapped to mode profiles. On the
/// sphere the frames differ by U = diag(1, -i); on the hyperboloid they agree.
pub fn to_mode(surface: Surface, m: f64, psi: &Spinor2) -> Result<ModeSpinor> {
    surface.index_for_mode(m)?;
    let lower = match surface {
        Surface::Sphere => psi.lower().times_i(),
        Surface::Hyperboloid => psi.lower().clone(),
    };
    Ok(ModeSpinor { p: (m - 0.5) as i64, upper: psi.upper().clone(), lower })
}

pub fn from_mode(surface: Surface, s: &ModeSpinor) -> Spinor2 {
    let lower = match surface {
        Surface::Sphere => -s.lower.times_i(),
        Surface::Hyperboloid => s.lower.clone(),
    };
    Spinor2::from_pair(s.upper.clone(), lower).expect("same grid")
}

/// S+ and S- entries: 1 on the sphere, i on the hyperboloid.
fn spin_ladder_entry(surface: Surface) -> Complex64 {
    match surface {
        Surface::Sphere => Complex64::new(1.0, 0.0),
        Surface::Hyperboloid => I,
    }
}

/// Sphere: L-S+ + L+S- + 2 LzSz. Hyperboloid: L+S- + L-S+ - 2 LzSz.
pub fn spin_orbit(surface: Surface, s: &ModeSpinor) -> Result<ModeSpinor> {
    let e = spin_ladder_entry(surface);
    let down = l_minus(surface, &s.lower_mode())?.profile;
    let up = l_plus(surface, &s.upper_mode())?.profile;
    let sz = match surface {
        Surface::Sphere => 1.0,
        Surface::Hyperboloid => -1.0,
    };
    let zu = &s.upper * (sz * s.p as f64);
    let zl = &s.lower * (-sz * (s.p + 1) as f64);
    Ok(ModeSpinor { p: s.p, upper: &(&down * e) + &zu, lower: &(&up * e) + &zl })
}

/// The reduced matrix written out directly:
/// sphere [[m - 1/2, -(d + m cot)], [-(-d + m cot), -m - 1/2]],
/// hyperboloid [[-m + 1/2, i(-d - m tanh)], [i(d - m tanh), m + 1/2]].
pub fn reduced_matrix_apply(surface: Surface, s: &ModeSpinor) -> Result<ModeSpinor> {
    let m = s.m();
    let grid = *s.upper.grid();
    let a = surface.angular_samples(&grid);
    let du = differentiate(&s.upper, 1)?;
    let dl = differentiate(&s.lower, 1)?;
    let au = &s.upper.mul_pointwise(&a) * m;
    let al = &s.lower.mul_pointwise(&a) * m;
    let (upper, lower) = match surface {
        Surface::Sphere => (
            &(&s.upper * (m - 0.5)) - &(&dl + &al),
            &(&du - &au) - &(&s.lower * (m + 0.5)),
        ),
        Surface::Hyperboloid => (
            &(&s.upper * (0.5 - m)) + &(&(-&dl) - &al).times_i(),
            &(&du - &au).times_i() + &(&s.lower * (m + 0.5)),
        ),
    };
    Ok(ModeSpinor { p: s.p, upper, lower })
}

fn shifted_spin_orbit(surface: Surface, s: &ModeSpinor) -> Result<ModeSpinor> {
    let h = spin_orbit(surface, s)?;
    let c = surface.spin_shift();
    Ok(ModeSpinor { p: s.p, upper: &h.upper + &(&s.upper * c), lower: &h.lower + &(&s.lower * c) })
}

/// Reduced spin-orbit operator plus the surface shift, in the 1D frame.
/// Equals h_n on the sphere and -h_n on the hyperboloid.
pub fn reduced_dirac(surface: Surface, m: f64, psi: &Spinor2) -> Result<Spinor2> {
    Ok(from_mode(surface, &shifted_spin_orbit(surface, &to_mode(surface, m, psi)?)?))
}

/// Larger of: generator action vs the explicit reduced matrix, and the
/// shifted reduced operator vs +-h_n from the 1D construction.
pub fn reduce_spinor(surface: Surface, m: f64, psi: &Spinor2) -> Result<f64> {
    let n = surface.index_for_mode(m)?;
    let mode = to_mode(surface, m, psi)?;
    let gen = spin_orbit(surface, &mode)?;
    let mat = reduced_matrix_apply(surface, &mode)?;
    let r1 = relative_residual(&(&gen.profiles() - &mat.profiles()), &mode.profiles());

    let op = DiracOperator::new(surface.model(), n)?;
    let h = dirac_apply(&op, psi)?;
    let expected = match surface {
        Surface::Sphere => h,
        Surface::Hyperboloid => -h,
    };
    let r2 = relative_residual(&(&reduced_dirac(surface, m, psi)? - &expected), psi);
    Ok(r1.max(r2))
}

/// (h~_m + 1/2)^2 = diag(H_n, H_{n+1}) on the sphere and
/// (h_m - 1/2)^2 = -diag(H_{n-1}, H_n) on the hyperboloid.
pub fn reduced_square_residual(surface: Surface, m: f64, psi: &Spinor2) -> Result<f64> {
    let n = surface.index_for_mode(m)?;
    let mode = to_mode(surface, m, psi)?;
    let sq = shifted_spin_orbit(surface, &shifted_spin_orbit(surface, &mode)?)?;
    let model = surface.model();
    let (a, b, sign) = match surface {
        Surface::Sphere => (n, n + 1, 1.0),
        Surface::Hyperboloid => (n - 1, n, -1.0),
    };
    let expected = Spinor2::from_pair(
        apply_schrodinger(&model, a, &mode.upper)? * sign,
        apply_schrodinger(&model, b, &mode.lower)? * sign,
    )?;
    Ok(relative_residual(&(&sq.profiles() - &expected), &mode.profiles()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryGenerator {
    Jplus,
    Jminus,
    Kplus,
    Kminus,
}

impl SymmetryGenerator {
    fn surface(self) -> Surface {
        match self {
            SymmetryGenerator::Jplus | SymmetryGenerator::Jminus => Surface::Sphere,
            SymmetryGenerator::Kplus | SymmetryGenerator::Kminus => Surface::Hyperboloid,
        }
    }

    fn raises(self) -> bool {
        matches!(self, SymmetryGenerator::Jplus | SymmetryGenerator::Kplus)
    }
}

/// J+- = L+- + S+- (sphere) or K+- = L+- + S+- (hyperboloid) on a mode spinor.
pub fn apply_symmetry_generator(surface: Surface, which: SymmetryGenerator, s: &ModeSpinor) -> Result<ModeSpinor> {
    if which.surface() != surface {
        return Err(Error::InvalidArgument(format!("{which:?} does not act on the {surface:?}")));
    }
    let e = spin_ladder_entry(surface);
    if which.raises() {
        let u = l_plus(surface, &s.upper_mode())?.profile;
        let v = l_plus(surface, &s.lower_mode())?.profile;
        Ok(ModeSpinor { p: s.p + 1, upper: &u + &(&s.lower * e), lower: v })
    } else {
        let u = l_minus(surface, &s.upper_mode())?.profile;
        let v = l_minus(surface, &s.lower_mode())?.profile;
        Ok(ModeSpinor { p: s.p - 1, upper: u, lower: &v + &(&s.upper * e) })
    }
}

/// T+ = L+S3 - L3S+ (m -> m+1) and T- = L-S3 - L3S- (m -> m-1).
pub fn apply_shift_generator(surface: Surface, raise: bool, s: &ModeSpinor) -> Result<ModeSpinor> {
    let e = spin_ladder_entry(surface);
    if raise {
        let u = l_plus(surface, &s.upper_mode())?.profile;
        let v = l_plus(surface, &s.lower_mode())?.profile;
        // S+ moves the lower component (frequency p + 1) to the upper slot.
        let moved = &s.lower * (e * (s.p + 1) as f64);
        Ok(ModeSpinor { p: s.p + 1, upper: &(&u * 0.5) - &moved, lower: &v * -0.5 })
    } else {
        let u = l_minus(surface, &s.upper_mode())?.profile;
        let v = l_minus(surface, &s.lower_mode())?.profile;
        let moved = &s.upper * (e * s.p as f64);
        Ok(ModeSpinor { p: s.p - 1, upper: &u * 0.5, lower: &(&v * -0.5) - &moved })
    }
}

/// Generator image G compared with the 1D intertwiner image D through the
/// least-squares scalar G ~ scalar * D.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorMatch {
    pub scalar: Complex64,
    pub residual: f64,
}

fn fit(g: &Spinor2, d: &Spinor2, reference: &Spinor2) -> Result<GeneratorMatch> {
    let dd = d.inner_product(d, Weight::Definite)?.re;
    let scalar = if dd > 0.0 { d.inner_product(g, Weight::Definite)? / dd } else { Complex64::new(0.0, 0.0) };
    Ok(GeneratorMatch { scalar, residual: relative_residual(&(g - &(d * scalar)), reference) })
}

/// Reduced J+- / K+- against the matching R intertwiner:
/// J+ ~ R-_n, J- ~ R+_{n-1} (sphere); K+ ~ R+_{n+1}, K- ~ R-_n (hyperboloid).
pub fn reduced_symmetry_match(surface: Surface, m: f64, which: SymmetryGenerator, psi: &Spinor2) -> Result<GeneratorMatch> {
    let n = surface.index_for_mode(m)?;
    let model = surface.model();
    let image = apply_symmetry_generator(surface, which, &to_mode(surface, m, psi)?)?;
    let g = from_mode(surface, &image);
    let d = match which {
        SymmetryGenerator::Jplus => apply_intertwiner(&model, n, IntertwinerKind::RMinus, psi)?,
        SymmetryGenerator::Jminus => {
            let prev = n.checked_sub(1).ok_or(Error::IndexOutOfRange { n, min: 1 })?;
            apply_intertwiner(&model, prev, IntertwinerKind::RPlus, psi)?
        }
        SymmetryGenerator::Kplus => apply_intertwiner(&model, n + 1, IntertwinerKind::RPlus, psi)?,
        SymmetryGenerator::Kminus => apply_intertwiner(&model, n, IntertwinerKind::RMinus, psi)?,
    };
    fit(&g, &d, psi)
}

/// Shift generator (T+ on the sphere, T- on the hyperboloid) against the 1D
/// anti-intertwiner T-_n.
pub fn shift_generator_match(surface: Surface, m: f64, psi: &Spinor2) -> Result<GeneratorMatch> {
    let n = surface.index_for_mode(m)?;
    let raise = surface == Surface::Sphere;
    let g = from_mode(surface, &apply_shift_generator(surface, raise, &to_mode(surface, m, psi)?)?);
    let d = apply_intertwiner(&surface.model(), n, IntertwinerKind::TMinus, psi)?;
    fit(&g, &d, psi)
}

/// ||T (h_m + c) Psi + (h_{m'} + c) T Psi|| / ||Psi|| with the shift
/// generator T and c the surface shift.
pub fn reduced_antisymmetry_residual(surface: Surface, m: f64, psi: &Spinor2) -> Result<f64> {
    let n = surface.index_for_mode(m)?;
    if surface == Surface::Hyperboloid && n < 2 {
        return Err(Error::InvalidArgument(format!("T- needs a lower mode than m={m}")));
    }
    let raise = surface == Surface::Sphere;
    let mode = to_mode(surface, m, psi)?;
    let lhs = apply_shift_generator(surface, raise, &shifted_spin_orbit(surface, &mode)?)?;
    let t = apply_shift_generator(surface, raise, &mode)?;
    let rhs = shifted_spin_orbit(surface, &t)?;
    Ok(relative_residual(&(&lhs.profiles() + &rhs.profiles()), &mode.profiles()))
}

/// Orbital and total labels of the eigenspinor (n, k, sign).
pub fn casimir_labels(surface: Surface, n: u32, k: u32, sign: Sign) -> Result<Labels> {
    let model = surface.model();
    model.check_index(n)?;
    model.check_level(n, k)?;
    Ok(Labels::for_state(model.kind(), n, k, sign))
}

/// Scalar surface Hamiltonian applied to each component of the eigenspinor,
/// against (l + 1/2)^2 (sphere) or -(lambda - 1/2)^2 (hyperboloid).
pub fn casimir_residual(surface: Surface, n: u32, k: u32, sign: Sign, grid: &Grid) -> Result<f64> {
    let model = surface.model();
    let op = DiracOperator::new(model, n)?;
    let st = eigenspinor(&op, k, sign, grid)?;
    let m = surface.mode_for_index(n);
    let mode = to_mode(surface, m, &st.spinor)?;
    let hu = surface_hamiltonian(surface, &mode.upper_mode())?.profile;
    let hl = surface_hamiltonian(surface, &mode.lower_mode())?.profile;
    let value = match casimir_labels(surface, n, k, sign)? {
        Labels::Sphere { ell, .. } => (ell as f64 + 0.5).powi(2),
        Labels::Hyperboloid { lambda, .. } => -(lambda as f64 - 0.5).powi(2),
    };
    let out = Spinor2::from_pair(hu, hl)?;
    Ok(relative_residual(&(&out - &(&mode.profiles() * value)), &mode.profiles()))
}

/// |j(j+1) - (l(l+1) + (epsilon - 1/2) + 3/4)| with epsilon from the 2x2 spectrum.
pub fn label_consistency_residual(n: u32, k: u32, sign: Sign) -> Result<f64> {
    let model = Surface::Sphere.model();
    let op = DiracOperator::new(model, n)?;
    let entry = dirac_spectrum(&op, k)?
        .into_iter()
        .find(|e| e.k == k && e.sign == sign)
        .ok_or(Error::StateAbsent { k, sign: sign.symbol() })?;
    match casimir_labels(Surface::Sphere, n, k, sign)? {
        Labels::Sphere { ell, j } => {
            let l = ell as f64;
            Ok((j * (j + 1.0) - (l * (l + 1.0) + (entry.epsilon - 0.5) + 0.75)).abs())
        }
        Labels::Hyperboloid { .. } => unreachable!("sphere labels"),
    }
}

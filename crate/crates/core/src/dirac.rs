//! Free Dirac equation in the standard (Dirac-Pauli) representation, used as
//! an independent check of the representation-free spin formulas.
//!
//! Units: ħ = c = 1. The pseudoscalar is `γ⁵ = -iγ⁰γ¹γ²γ³`; with this sign the
//! precession law `ṡ = ω×s` holds with `ω = -2γ⁵p`.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::{frame_with_axis, spin_eigenvalues, BeamVelocity, Direction, Spin, Vec3};
use crate::linalg::{commutator, dot_real, pauli, CMatrix, CVector, C64, I};
use crate::observables::helicity_basis;

pub const TOL_SPIN_FORMS: f64 = 1e-12;
pub const TOL_SPIN_EXPLICIT: f64 = 1e-11;
pub const TOL_EVEN: f64 = 1e-12;
pub const TOL_CASIMIR: f64 = 1e-10;
pub const TOL_H_SQUARED: f64 = 1e-10;
pub const TOL_SPECTRUM: f64 = 1e-10;
pub const TOL_COMMUTES: f64 = 1e-12;
pub const TOL_EIGENSTATE: f64 = 1e-10;
pub const TOL_PRECESSION: f64 = 1e-12;
pub const TOL_HAMILTONIAN: f64 = 1e-10;
pub const TOL_VELOCITY: f64 = 1e-12;
pub const TOL_KINETIC: f64 = 1e-14;

/// Standard-representation Dirac matrices.
#[derive(Debug, Clone)]
pub struct GammaMatrices {
    pub gamma0: CMatrix,
    pub gamma: [CMatrix; 3],
    pub gamma5: CMatrix,
    /// `αₖ = γ⁰γᵏ`.
    pub alpha: [CMatrix; 3],
}

impl GammaMatrices {
    pub fn standard() -> Self {
        let id = CMatrix::identity(2);
        let zero = CMatrix::zeros(2);
        let sigma = pauli();
        let gamma0 = CMatrix::from_blocks(&id, &zero, &zero, &-&id);
        let gamma = sigma
            .clone()
            .map(|s| CMatrix::from_blocks(&zero, &s, &-&s, &zero));
        let alpha = sigma.map(|s| CMatrix::from_blocks(&zero, &s, &s, &zero));
        let g0123 = &(&(&gamma0 * &gamma[0]) * &gamma[1]) * &gamma[2];
        let gamma5 = g0123.scale_complex(-I);
        GammaMatrices {
            gamma0,
            gamma,
            gamma5,
            alpha,
        }
    }
}

/// Momentum and mass of a plane-wave Dirac particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiracContext {
    pub p: [f64; 3],
    pub m: f64,
    /// Positive energy `+√(p² + m²)`.
    pub p0: f64,
}

impl DiracContext {
    pub fn new(p: Vec3, m: f64) -> Result<Self> {
        if !(m >= 0.0) || !m.is_finite() || !p.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidContext("mass must be finite and non-negative"));
        }
        let p2 = p.norm_squared();
        if p2 == 0.0 && m == 0.0 {
            return Err(Error::NullContext);
        }
        Ok(DiracContext {
            p: [p.x, p.y, p.z],
            m,
            p0: (p2 + m * m).sqrt(),
        })
    }

    pub fn momentum(&self) -> Vec3 {
        Vec3::from(self.p)
    }

    pub fn p_mag(&self) -> f64 {
        self.momentum().norm()
    }

    /// `β = p/p₀`.
    pub fn beam_velocity(&self) -> BeamVelocity {
        BeamVelocity::new(self.momentum() / self.p0).expect("p/p0 is subluminal")
    }

    pub fn direction(&self) -> Option<Direction> {
        Direction::normalize(self.momentum()).ok()
    }
}

/// All 4x4 operators at one momentum.
#[derive(Debug, Clone)]
pub struct DiracOperatorSet {
    pub ctx: DiracContext,
    pub gammas: GammaMatrices,
    pub h: CMatrix,
    /// Sign of energy, `H/p₀`.
    pub lambda: CMatrix,
    pub pi_plus: CMatrix,
    pub pi_minus: CMatrix,
    /// Spinor part of the rotation generator, `diag(σ, σ)/2`.
    pub s: [CMatrix; 3],
    pub w0: CMatrix,
    pub w: [CMatrix; 3],
    /// `S = W H⁻¹`.
    pub spin: [CMatrix; 3],
    /// `ω = -2γ⁵p`.
    pub omega: [CMatrix; 3],
    /// Even part of `ω`; absent at `p = 0`.
    pub omega_even: Option<[CMatrix; 3]>,
}

/// Builds `H`, the projectors, `W^μ`, `S`, `ω` and `Ω` at momentum `p` and mass `m`.
pub fn build_context(p: Vec3, m: f64) -> Result<DiracOperatorSet> {
    let ctx = DiracContext::new(p, m)?;
    let g = GammaMatrices::standard();
    let h = &dot_real(&p, &g.alpha) + &g.gamma0.scale(m);
    let p0 = ctx.p0;
    let id = CMatrix::identity(4);
    let lambda = h.scale(1.0 / p0);
    let pi_plus = (&id + &lambda).scale(0.5);
    let pi_minus = (&id - &lambda).scale(0.5);
    let zero = CMatrix::zeros(2);
    let s = pauli().map(|x| CMatrix::from_blocks(&x, &zero, &zero, &x).scale(0.5));
    let w0 = dot_real(&p, &s);
    let w = s.clone().map(|sk| (&(&sk * &h) + &(&h * &sk)).scale(0.5));
    // H⁻¹ = H/p₀², exact because H² = p₀²
    let h_inv = h.scale(1.0 / (p0 * p0));
    let spin = w.clone().map(|wk| &wk * &h_inv);
    let omega = [0, 1, 2].map(|k| g.gamma5.scale(-2.0 * p[k]));
    let p_mag = p.norm();
    let omega_even = (p_mag > 0.0).then(|| {
        let n = p / p_mag;
        let gn = dot_real(&n, &g.gamma);
        let factor = (&id + &gn.scale(m / p_mag)).scale(1.0 / (1.0 + m * m / (p_mag * p_mag)));
        omega.clone().map(|ok| &factor * &ok)
    });
    Ok(DiracOperatorSet {
        ctx,
        gammas: g,
        h,
        lambda,
        pi_plus,
        pi_minus,
        s,
        w0,
        w,
        spin,
        omega,
        omega_even,
    })
}

impl DiracOperatorSet {
    /// `Π₊ s Π₊ + Π₋ s Π₋`.
    pub fn spin_projector_form(&self) -> [CMatrix; 3] {
        self.s.clone().map(|sk| {
            &(&(&self.pi_plus * &sk) * &self.pi_plus) + &(&(&self.pi_minus * &sk) * &self.pi_minus)
        })
    }

    /// `(m²/p₀²) s + (p²/p₀²)(n·s) n + (im/2p₀²) p×γ`.
    pub fn spin_explicit_form(&self) -> [CMatrix; 3] {
        let p = self.ctx.momentum();
        let m = self.ctx.m;
        let p02 = self.ctx.p0 * self.ctx.p0;
        let g = &self.gammas.gamma;
        let p_cross_gamma = [
            &g[2].scale(p.y) - &g[1].scale(p.z),
            &g[0].scale(p.z) - &g[2].scale(p.x),
            &g[1].scale(p.x) - &g[0].scale(p.y),
        ];
        // (p²/p₀²)(n·s)n = (p·s) p / p₀², no division by |p|
        let p_dot_s = dot_real(&p, &self.s);
        [0, 1, 2].map(|k| {
            &(&self.s[k].scale(m * m / p02) + &p_dot_s.scale(p[k] / p02))
                + &p_cross_gamma[k].scale_complex(C64::new(0.0, m / (2.0 * p02)))
        })
    }

    /// `a·S`.
    pub fn spin_along(&self, a: &Direction) -> CMatrix {
        dot_real(&a.vector(), &self.spin)
    }

    /// `max_k ‖Π₊ X_k Π₋‖` and the mirrored block.
    pub fn oddness(&self, ops: &[CMatrix; 3]) -> f64 {
        ops.iter()
            .map(|x| {
                let a = (&(&self.pi_plus * x) * &self.pi_minus).max_abs();
                let b = (&(&self.pi_minus * x) * &self.pi_plus).max_abs();
                a.max(b)
            })
            .fold(0.0, f64::max)
    }
}

/// Outcome of one numerical identity check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckReport {
    pub fn new(check: &str, max_residual: f64, tolerance: f64) -> Self {
        CheckReport {
            check: check.to_string(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
        }
    }
}

fn max_diff(a: &[CMatrix; 3], b: &[CMatrix; 3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.max_abs_diff(y))
        .fold(0.0, f64::max)
}

/// Structural invariants of the operator set: `H² = p₀²`, projector algebra,
/// agreement of the three forms of `S`, evenness of `S`, and the Casimir
/// `W₀² - W·W = -(3/4) m²`.
pub fn operator_set_reports(ops: &DiracOperatorSet) -> Vec<CheckReport> {
    let id = CMatrix::identity(4);
    let p0 = ops.ctx.p0;
    let m = ops.ctx.m;
    let h2 = (&ops.h * &ops.h).max_abs_diff(&id.scale(p0 * p0));
    let projectors = [
        (&ops.pi_plus + &ops.pi_minus).max_abs_diff(&id),
        (&ops.pi_plus * &ops.pi_plus).max_abs_diff(&ops.pi_plus),
        (&ops.pi_minus * &ops.pi_minus).max_abs_diff(&ops.pi_minus),
        (&ops.pi_plus - &ops.pi_minus).max_abs_diff(&ops.lambda),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let hermitian = ops
        .spin
        .iter()
        .map(|x| x.hermiticity_deviation())
        .chain(std::iter::once(ops.h.hermiticity_deviation()))
        .fold(0.0, f64::max);
    let ww = ops
        .w
        .iter()
        .fold(CMatrix::zeros(4), |acc, wk| &acc + &(wk * wk));
    let casimir = (&(&ops.w0 * &ops.w0) - &ww).max_abs_diff(&id.scale(-0.75 * m * m));
    vec![
        CheckReport::new("h_squared", h2, TOL_H_SQUARED),
        CheckReport::new("energy_projectors", projectors, TOL_H_SQUARED),
        CheckReport::new("hermitian", hermitian, TOL_EVEN),
        CheckReport::new(
            "spin_projector_form",
            max_diff(&ops.spin, &ops.spin_projector_form()),
            TOL_SPIN_FORMS,
        ),
        CheckReport::new(
            "spin_explicit_form",
            max_diff(&ops.spin, &ops.spin_explicit_form()),
            TOL_SPIN_EXPLICIT,
        ),
        CheckReport::new("spin_even", ops.oddness(&ops.spin), TOL_EVEN),
        CheckReport::new("casimir", casimir, TOL_CASIMIR),
    ]
}

/// Eigenvalues of `a·S` against `±½√(1 + (β·a)² - β²)` (each twice), and
/// `[a·S, H] = 0`.
pub fn spin_spectrum_reports(ops: &DiracOperatorSet, a: &Direction) -> Vec<CheckReport> {
    let a_s = ops.spin_along(a);
    let beta = ops.ctx.beam_velocity();
    let lambda = spin_eigenvalues(a, &beta, Spin::HALF).eigenvalues[1];
    let expected = [-lambda, -lambda, lambda, lambda];
    let spectrum = match a_s.herm_eig() {
        Ok(e) => e
            .eigenvalues
            .iter()
            .zip(expected)
            .map(|(got, want)| (got - want).abs())
            .fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    };
    let comm = commutator(&a_s, &ops.h).expect("4x4").max_abs();
    vec![
        CheckReport::new("spin_spectrum", spectrum, TOL_SPECTRUM),
        CheckReport::new("spin_commutes_with_h", comm, TOL_COMMUTES),
    ]
}

pub fn spin_spectrum_check(ops: &DiracOperatorSet, a: &Direction) -> Result<Vec<CheckReport>> {
    let reports = spin_spectrum_reports(ops, a);
    match reports.iter().find(|r| !r.pass) {
        Some(r) => Err(Error::SpectrumMismatch {
            max_deviation: r.max_residual,
        }),
        None => Ok(reports),
    }
}

/// Positive-energy eigenstates `Ψ^a_±` of `a·S`, normalized.
#[derive(Debug, Clone)]
pub struct SpinEigenstates {
    pub plus: CVector,
    pub minus: CVector,
    /// `|λ_a|`.
    pub lambda: f64,
    /// Transverse unit vector used in the mixing term.
    pub t: Vec3,
}

/// Builds
///
/// ```text
/// Ψ^a_± = ( √(p₀+m) [ (|λ|+½a·n) w± ± (m a·t/2p₀) w∓ ],
///           √(p₀-m) [ ±(|λ|+½a·n) w± - (m a·t/2p₀) w∓ ] )
/// ```
///
/// with `w±` the helicity spinors of `n` and `t` the unit vector along the
/// part of `a` transverse to `n`. The relative phase of `w₋` is aligned so
/// that `⟨w₋|t·σ|w₊⟩ = 1`; the formula needs a real `a·t` in that sense.
pub fn spin_eigenstates(ops: &DiracOperatorSet, a: &Direction) -> Result<SpinEigenstates> {
    let ctx = &ops.ctx;
    if !(ctx.m > 0.0) {
        return Err(Error::InvalidContext("eigenstate formula needs m > 0"));
    }
    let n = ctx.direction().unwrap_or(Direction::z());
    let (m, p0) = (ctx.m, ctx.p0);
    let na = n.dot(a);
    let a_perp = a.vector() - n.vector() * na;
    let perp = a_perp.norm();
    let t = if perp > 1e-15 {
        a_perp / perp
    } else {
        frame_with_axis(&n)[0]
    };
    let (w_plus, w_minus) = helicity_basis(&n);
    let t_sigma = dot_real(&t, &pauli());
    let overlap = w_minus.inner(&t_sigma.apply(&w_plus));
    let w_minus = w_minus.scale_complex(overlap / overlap.norm());

    let pa = ctx.momentum().dot(&a.vector());
    let alpha = (pa * pa + m * m).sqrt() / p0;
    let lambda = 0.5 * alpha;
    let ratio = m / p0;
    // |λ| + ½a·n, cancellation-free when a·n < 0
    let diag = if na >= 0.0 {
        lambda + 0.5 * na
    } else {
        0.5 * ratio * ratio * perp * perp / (alpha - na)
    };
    let mix = 0.5 * ratio * perp;
    let upper_scale = (p0 + m).sqrt();
    let lower_scale = (p0 - m).max(0.0).sqrt();

    let build = |sign: f64, w_same: &CVector, w_other: &CVector| -> Result<CVector> {
        let upper = &w_same.scale(diag) + &w_other.scale(sign * mix);
        let lower = &w_same.scale(sign * diag) - &w_other.scale(mix);
        let u = upper.scale(upper_scale);
        let l = lower.scale(lower_scale);
        let psi = CVector::from_slice(&[u.get(0), u.get(1), l.get(0), l.get(1)]);
        psi.normalized()
            .ok_or(Error::EigenstateResidual { residual: f64::INFINITY })
    };
    Ok(SpinEigenstates {
        plus: build(1.0, &w_plus, &w_minus)?,
        minus: build(-1.0, &w_minus, &w_plus)?,
        lambda,
        t,
    })
}

/// Residuals of `HΨ = p₀Ψ` (relative to `p₀`) and `(a·S)Ψ^a_± = ±|λ_a|Ψ^a_±`.
pub fn eigenstate_reports(ops: &DiracOperatorSet, a: &Direction) -> Vec<CheckReport> {
    let (energy, spin) = match spin_eigenstates(ops, a) {
        Ok(st) => {
            let a_s = ops.spin_along(a);
            let p0 = ops.ctx.p0;
            let mut energy: f64 = 0.0;
            let mut spin: f64 = 0.0;
            for (psi, sign) in [(&st.plus, 1.0), (&st.minus, -1.0)] {
                energy = energy.max(ops.h.apply(psi).max_abs_diff(&psi.scale(p0)) / p0);
                spin = spin.max(a_s.apply(psi).max_abs_diff(&psi.scale(sign * st.lambda)));
            }
            (energy, spin)
        }
        Err(_) => (f64::INFINITY, f64::INFINITY),
    };
    vec![
        CheckReport::new("eigenstate_energy", energy, TOL_EIGENSTATE),
        CheckReport::new("eigenstate_spin", spin, TOL_EIGENSTATE),
    ]
}

pub fn eigenstate_check(ops: &DiracOperatorSet, a: &Direction) -> Result<Vec<CheckReport>> {
    spin_eigenstates(ops, a)?;
    let reports = eigenstate_reports(ops, a);
    match reports.iter().find(|r| !r.pass) {
        Some(r) => Err(Error::EigenstateResidual {
            residual: r.max_residual,
        }),
        None => Ok(reports),
    }
}

fn cross_ops(u: &[CMatrix; 3], v: &[CMatrix; 3]) -> [CMatrix; 3] {
    [
        &(&u[1] * &v[2]) - &(&u[2] * &v[1]),
        &(&u[2] * &v[0]) - &(&u[0] * &v[2]),
        &(&u[0] * &v[1]) - &(&u[1] * &v[0]),
    ]
}

/// Heisenberg precession `i[H, s] = ω×s`; for massless particles also `[ω, H] = 0`.
pub fn precession_reports(ops: &DiracOperatorSet) -> Vec<CheckReport> {
    let lhs = ops
        .s
        .clone()
        .map(|sk| commutator(&ops.h, &sk).expect("4x4").scale_complex(I));
    let rhs = cross_ops(&ops.omega, &ops.s);
    let mut reports = vec![CheckReport::new(
        "precession",
        max_diff(&lhs, &rhs),
        TOL_PRECESSION,
    )];
    if ops.ctx.m == 0.0 {
        let comm = ops
            .omega
            .iter()
            .map(|ok| commutator(ok, &ops.h).expect("4x4").max_abs())
            .fold(0.0, f64::max);
        reports.push(CheckReport::new("omega_commutes_with_h", comm, TOL_PRECESSION));
    }
    reports
}

pub fn precession_check(ops: &DiracOperatorSet) -> Result<Vec<CheckReport>> {
    let reports = precession_reports(ops);
    match reports.iter().find(|r| !r.pass) {
        Some(r) => Err(Error::PrecessionMismatch {
            residual: r.max_residual,
        }),
        None => Ok(reports),
    }
}

/// Residuals of `H = β⁻² Ω·S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianResiduals {
    pub full: f64,
    pub plus: f64,
    pub minus: f64,
    /// `max_k ‖Π₊ Ω_k Π₋‖`.
    pub omega_oddness: f64,
}

pub fn hamiltonian_residuals(ops: &DiracOperatorSet) -> Result<HamiltonianResiduals> {
    let ctx = &ops.ctx;
    let omega = match &ops.omega_even {
        Some(o) if ctx.m > 0.0 => o,
        _ => return Err(Error::InvalidContext("Hamiltonian identity needs m > 0 and |p| > 0")),
    };
    let p2 = ctx.momentum().norm_squared();
    let inv_beta2 = ctx.p0 * ctx.p0 / p2;
    let omega_s = omega
        .iter()
        .zip(&ops.spin)
        .fold(CMatrix::zeros(4), |acc, (o, s)| &acc + &(o * s));
    let diff = &omega_s.scale(inv_beta2) - &ops.h;
    let block = |pi: &CMatrix| (&(pi * &diff) * pi).max_abs();
    Ok(HamiltonianResiduals {
        full: diff.max_abs(),
        plus: block(&ops.pi_plus),
        minus: block(&ops.pi_minus),
        omega_oddness: ops.oddness(omega),
    })
}

pub fn hamiltonian_identity_reports(ops: &DiracOperatorSet) -> Vec<CheckReport> {
    match hamiltonian_residuals(ops) {
        Ok(r) => vec![
            CheckReport::new("hamiltonian_identity_plus", r.plus, TOL_HAMILTONIAN),
            CheckReport::new("hamiltonian_identity_minus", r.minus, TOL_HAMILTONIAN),
            CheckReport::new("hamiltonian_identity_full", r.full, TOL_HAMILTONIAN),
            CheckReport::new("omega_even", r.omega_oddness, TOL_EVEN),
        ],
        Err(_) => Vec::new(),
    }
}

/// Fails only on the energy-sign subspace residuals; the full-space residual
/// is reported alongside.
pub fn hamiltonian_identity_check(ops: &DiracOperatorSet) -> Result<HamiltonianResiduals> {
    let r = hamiltonian_residuals(ops)?;
    if r.plus > TOL_HAMILTONIAN || r.minus > TOL_HAMILTONIAN {
        return Err(Error::IdentityMismatch {
            check: "hamiltonian_identity",
            full: r.full,
            plus: r.plus,
            minus: r.minus,
        });
    }
    Ok(r)
}

/// For a massless particle, the even part `c = (v·p)p/p²` of the velocity
/// operator `v = α` satisfies `H = c·p`, and `c` is even.
pub fn massless_even_velocity_check(p: Vec3) -> Result<Vec<CheckReport>> {
    let ops = build_context(p, 0.0)?;
    let p2 = p.norm_squared();
    let v_dot_p = dot_real(&p, &ops.gammas.alpha);
    let c = [0, 1, 2].map(|k| v_dot_p.scale(p[k] / p2));
    let c_dot_p = dot_real(&p, &c);
    let reports = vec![
        CheckReport::new("massless_velocity", c_dot_p.max_abs_diff(&ops.h), TOL_VELOCITY),
        CheckReport::new("massless_velocity_even", ops.oddness(&c), TOL_EVEN),
    ];
    if let Some(r) = reports.iter().find(|r| !r.pass) {
        return Err(Error::IdentityMismatch {
            check: "massless_velocity",
            full: r.max_residual,
            plus: 0.0,
            minus: 0.0,
        });
    }
    Ok(reports)
}

/// Rotational analogues of the massless kinematics on a helicity-λ state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KineticQuantities {
    /// `H/c²` = `|p|`.
    pub kinetic_mass: f64,
    /// `λ (p·S)/p²` = `λ²/|p|`.
    pub moment_of_inertia: f64,
    /// `|λ|/|p|`.
    pub radius: f64,
    /// `|p|/|λ|`, fixed by `I ω² = m`.
    pub angular_velocity: f64,
    /// `|I - m r²|`.
    pub consistency_residual: f64,
}

pub fn kinetic_quantities(helicity: f64, p_mag: f64) -> Result<KineticQuantities> {
    if helicity == 0.0 {
        return Err(Error::ZeroHelicity);
    }
    if !helicity.is_finite() || (2.0 * helicity).fract() != 0.0 {
        return Err(Error::InvalidHelicity(helicity));
    }
    if !(p_mag > 0.0) || !p_mag.is_finite() {
        return Err(Error::InvalidContext("momentum magnitude must be positive"));
    }
    let kinetic_mass = p_mag;
    let helicity_eigenvalue = helicity * p_mag;
    let moment_of_inertia = helicity * helicity_eigenvalue / (p_mag * p_mag);
    let radius = helicity.abs() / p_mag;
    let angular_velocity = p_mag / helicity.abs();
    Ok(KineticQuantities {
        kinetic_mass,
        moment_of_inertia,
        radius,
        angular_velocity,
        consistency_residual: (moment_of_inertia - kinetic_mass * radius * radius).abs(),
    })
}

/// Lower bound `|λ|/(2⟨p²⟩)` on `ΔQ₁ΔQ₂` for the center-of-mass position.
pub fn com_uncertainty_bound(helicity: f64, p2_mean: f64) -> Result<f64> {
    if !(p2_mean > 0.0) || !p2_mean.is_finite() {
        return Err(Error::InvalidContext("mean squared momentum must be positive"));
    }
    Ok(helicity.abs() / (2.0 * p2_mean))
}

/// Every applicable check for one context and axis.
pub fn context_reports(ops: &DiracOperatorSet, a: &Direction) -> Vec<CheckReport> {
    let mut out = operator_set_reports(ops);
    out.extend(spin_spectrum_reports(ops, a));
    if ops.ctx.m > 0.0 {
        out.extend(eigenstate_reports(ops, a));
    }
    out.extend(precession_reports(ops));
    out.extend(hamiltonian_identity_reports(ops));
    out
}

/// Merges reports of the same check, keeping the worst residual.
pub fn merge_reports(reports: impl IntoIterator<Item = CheckReport>) -> Vec<CheckReport> {
    let mut merged: Vec<CheckReport> = Vec::new();
    for r in reports {
        match merged.iter_mut().find(|m| m.check == r.check) {
            Some(m) => {
                m.max_residual = m.max_residual.max(r.max_residual);
                m.pass &= r.pass;
            }
            None => merged.push(r),
        }
    }
    merged
}

fn random_unit(rng: &mut ChaCha8Rng) -> Direction {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Direction::from_spherical(z.acos(), phi)
}

/// Runs [`context_reports`] on `trials` seeded random `(p, m, a)` with
/// `pᵢ ∈ [-3, 3]`, `m ∈ [0.2, 3]`, plus the massless velocity check, and
/// merges the results per check.
pub fn random_suite(trials: usize, seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all = Vec::new();
    for _ in 0..trials {
        let p = Vector3::new(
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
            rng.gen_range(-3.0..3.0),
        );
        let m = rng.gen_range(0.2..3.0);
        let a = random_unit(&mut rng);
        let ops = build_context(p, m)?;
        all.extend(context_reports(&ops, &a));
        let reports = massless_even_velocity_check(p).unwrap_or_else(|e| match e {
            Error::IdentityMismatch { full, .. } => {
                vec![CheckReport::new("massless_velocity", full, TOL_VELOCITY)]
            }
            _ => vec![CheckReport::new("massless_velocity", f64::INFINITY, TOL_VELOCITY)],
        });
        all.extend(reports);
    }
    Ok(merge_reports(all))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    fn assert_all_pass(reports: &[CheckReport]) {
        for r in reports {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn gamma_algebra() {
        let g = GammaMatrices::standard();
        let id = CMatrix::identity(4);
        let metric = [1.0, -1.0, -1.0, -1.0];
        let all: Vec<&CMatrix> = std::iter::once(&g.gamma0).chain(g.gamma.iter()).collect();
        for mu in 0..4 {
            for nu in 0..4 {
                let anti = &(all[mu] * all[nu]) + &(all[nu] * all[mu]);
                let expect = if mu == nu { id.scale(2.0 * metric[mu]) } else { CMatrix::zeros(4) };
                assert!(anti.max_abs_diff(&expect) < 1e-15);
            }
            let anti5 = &(all[mu] * &g.gamma5) + &(&g.gamma5 * all[mu]);
            assert!(anti5.max_abs() < 1e-15);
        }
        assert!((&g.gamma5 * &g.gamma5).max_abs_diff(&id) < 1e-15);
        // γ⁵ = -[[0, 1], [1, 0]]
        assert!((g.gamma5.get(0, 2) + ONE).norm() < 1e-15);
    }

    #[test]
    fn null_and_invalid_contexts() {
        assert_eq!(build_context(Vec3::zeros(), 0.0).unwrap_err(), Error::NullContext);
        assert!(build_context(Vec3::zeros(), -1.0).is_err());
    }

    #[test]
    fn rest_frame_spin_is_s() {
        let ops = build_context(Vec3::zeros(), 1.0).unwrap();
        assert_eq!(max_diff(&ops.spin, &ops.s), 0.0);
        assert!(ops.omega_even.is_none());
        let reports = spin_spectrum_check(&ops, &Direction::from_spherical(0.4, 2.0)).unwrap();
        assert_all_pass(&reports);
    }

    #[test]
    fn spin_forms_agree() {
        let ops = build_context(v(0.3, -1.2, 2.2), 1.0).unwrap();
        assert!(max_diff(&ops.spin, &ops.spin_projector_form()) < 1e-12);
        assert!(max_diff(&ops.spin, &ops.spin_explicit_form()) < 1e-11);
        assert_all_pass(&operator_set_reports(&ops));
    }

    #[test]
    fn spectrum_perpendicular_axis() {
        let ops = build_context(v(3.0, 0.0, 0.0), 4.0).unwrap();
        let a_s = ops.spin_along(&Direction::y());
        let e = a_s.herm_eig().unwrap();
        for (got, want) in e.eigenvalues.iter().zip([-0.4, -0.4, 0.4, 0.4]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_all_pass(&spin_spectrum_check(&ops, &Direction::y()).unwrap());
    }

    #[test]
    fn spectrum_helicity_axis() {
        let p = v(0.5, 2.0, -1.0);
        let ops = build_context(p, 0.3).unwrap();
        let n = Direction::normalize(p).unwrap();
        let e = ops.spin_along(&n).herm_eig().unwrap();
        assert!((e.eigenvalues[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn eigenstates_along_momentum_are_helicity_spinors() {
        let p = v(1.0, 2.0, 2.0);
        let ops = build_context(p, 1.0).unwrap();
        let n = Direction::normalize(p).unwrap();
        let st = spin_eigenstates(&ops, &n).unwrap();
        let (w_plus, _) = helicity_basis(&n);
        let upper = CVector::from_slice(&[st.plus.get(0), st.plus.get(1)]);
        let w = w_plus.scale((upper.norm()).max(1e-300));
        assert!(upper.max_abs_diff(&w) < 1e-12);
        assert_all_pass(&eigenstate_check(&ops, &n).unwrap());
    }

    #[test]
    fn eigenstates_random_axis() {
        let ops = build_context(v(1.0, 2.0, 2.0), 1.0).unwrap();
        for a in [
            Direction::from_spherical(0.3, 0.2),
            Direction::from_spherical(2.9, 4.0),
            Direction::x(),
        ] {
            assert_all_pass(&eigenstate_check(&ops, &a).unwrap());
        }
    }

    #[test]
    fn eigenstates_ultrarelativistic_perpendicular() {
        let ops = build_context(v(0.0, 0.0, 100.0), 1.0).unwrap();
        let st = spin_eigenstates(&ops, &Direction::x()).unwrap();
        assert!((st.plus.norm() - 1.0).abs() < 1e-14);
        for r in eigenstate_reports(&ops, &Direction::x()) {
            assert!(r.max_residual < 1e-9, "{r:?}");
        }
    }

    #[test]
    fn eigenstates_need_mass() {
        let ops = build_context(v(0.0, 0.0, 1.0), 0.0).unwrap();
        assert!(eigenstate_check(&ops, &Direction::x()).is_err());
    }

    #[test]
    fn precession_examples() {
        let rest = build_context(Vec3::zeros(), 1.0).unwrap();
        assert_all_pass(&precession_check(&rest).unwrap());
        let moving = build_context(v(0.0, 0.0, 1.0), 1.0).unwrap();
        assert_all_pass(&precession_check(&moving).unwrap());
        let massless = build_context(v(1.0, 1.0, 1.0), 0.0).unwrap();
        let reports = precession_check(&massless).unwrap();
        assert_eq!(reports.len(), 2);
        assert_all_pass(&reports);
    }

    #[test]
    fn hamiltonian_identity_examples() {
        let ops = build_context(v(3.0, 0.0, 0.0), 4.0).unwrap();
        let r = hamiltonian_identity_check(&ops).unwrap();
        assert!(r.plus < 1e-10 && r.minus < 1e-10);

        let ops = build_context(v(0.0, 0.0, 1.0), 1.0).unwrap();
        assert!(hamiltonian_identity_check(&ops).unwrap().omega_oddness < 1e-12);

        // massless limit: Ω·S and ω·S both approach H
        let ops = build_context(v(0.0, 1.0, 0.0), 1e-8).unwrap();
        let omega_even = ops.omega_even.clone().unwrap();
        let dot = |x: &[CMatrix; 3]| {
            x.iter()
                .zip(&ops.spin)
                .fold(CMatrix::zeros(4), |acc, (o, s)| &acc + &(o * s))
        };
        assert!(dot(&omega_even).max_abs_diff(&ops.h) < 1e-6);
        assert!(dot(&ops.omega).max_abs_diff(&ops.h) < 1e-6);

        let rest = build_context(Vec3::zeros(), 1.0).unwrap();
        assert!(hamiltonian_identity_check(&rest).is_err());
    }

    #[test]
    fn massless_velocity_examples() {
        assert_all_pass(&massless_even_velocity_check(v(0.0, 0.0, 1.0)).unwrap());
        assert_all_pass(&massless_even_velocity_check(v(-0.7, 1.3, 2.1)).unwrap());
        assert!(massless_even_velocity_check(Vec3::zeros()).is_err());
    }

    #[test]
    fn kinetic_examples() {
        let k = kinetic_quantities(0.5, 1.0).unwrap();
        assert_eq!(k.radius, 0.5);
        assert_eq!(k.moment_of_inertia, 0.25);
        assert_eq!(k.kinetic_mass, 1.0);
        assert_eq!(k.angular_velocity, 2.0);
        assert!(k.consistency_residual < 1e-14);

        assert_eq!(kinetic_quantities(1.0, 1.0).unwrap().radius, 1.0);
        assert!(kinetic_quantities(0.5, 1e12).unwrap().radius < 1e-12);
        assert_eq!(kinetic_quantities(0.0, 1.0).unwrap_err(), Error::ZeroHelicity);
        assert!(kinetic_quantities(0.3, 1.0).is_err());

        let omegas: Vec<f64> = [0.5, 1.0, 1.5, 2.0]
            .iter()
            .map(|l| kinetic_quantities(*l, 1.7).unwrap().angular_velocity)
            .collect();
        for w in omegas.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn dirac_precession_frequency_matches_half_helicity() {
        // |ω| = 2|p| from ω = -2γ⁵p, with (γ⁵)² = 1
        let p = v(0.0, 0.0, 1.7);
        let ops = build_context(p, 0.0).unwrap();
        let w2 = ops
            .omega
            .iter()
            .fold(CMatrix::zeros(4), |acc, o| &acc + &(o * o));
        let freq = w2.get(0, 0).re.sqrt();
        let k = kinetic_quantities(0.5, 1.7).unwrap();
        assert!((freq - k.angular_velocity).abs() < 1e-14);
    }

    #[test]
    fn uncertainty_bound_examples() {
        assert_eq!(com_uncertainty_bound(0.5, 1.0).unwrap(), 0.25);
        assert_eq!(com_uncertainty_bound(0.0, 1.0).unwrap(), 0.0);
        let lambda: f64 = 1.5;
        let p2 = 2.3;
        let r2 = lambda * lambda / p2;
        let bound = com_uncertainty_bound(lambda, p2).unwrap();
        assert!((bound - r2 / (2.0 * lambda.abs())).abs() < 1e-15);
        assert!(com_uncertainty_bound(0.5, 0.0).is_err());
    }

    #[test]
    fn random_suite_passes() {
        let reports = random_suite(20, 99).unwrap();
        assert_all_pass(&reports);
        assert!(reports.iter().any(|r| r.check == "hamiltonian_identity_plus"));
    }
}

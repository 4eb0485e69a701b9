//! Binary spin observables for a pair in the zero-helicity singlet, and the
//! EPR-Bohm correlation computed two independent ways: a closed form in
//! terms of dot products, and a brute-force 4x4 expectation value.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::kinematics::{alpha_vector, BeamVelocity, Direction};
use crate::linalg::{kron, sigma_dot, CMatrix, CVector, C64};

/// Below this `|α|` the ±1 normalization of the spin projection is undefined.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Largest imaginary part tolerated in the oracle expectation value.
pub const ORACLE_IMAG_TOL: f64 = 1e-13;

const PHASE_TOL: f64 = 1e-14;

/// Eigenvectors of `n·σ` for eigenvalues `+1` and `-1`.
///
/// Each is scaled so that its first nonzero component (up, then down) is
/// real and positive.
pub fn helicity_basis(n: &Direction) -> (CVector, CVector) {
    let [x, y, z] = n.to_array();
    // two algebraically equivalent eigenvector formulas; use the better conditioned one
    let (plus, minus) = if z >= 0.0 {
        (
            CVector::from_slice(&[C64::new(1.0 + z, 0.0), C64::new(x, y)]),
            CVector::from_slice(&[C64::new(x, -y), C64::new(-(1.0 + z), 0.0)]),
        )
    } else {
        (
            CVector::from_slice(&[C64::new(x, -y), C64::new(1.0 - z, 0.0)]),
            CVector::from_slice(&[C64::new(1.0 - z, 0.0), C64::new(-x, -y)]),
        )
    };
    let fix = |v: CVector| {
        v.normalized()
            .expect("unit direction gives nonzero eigenvector")
            .with_canonical_phase(PHASE_TOL)
    };
    (fix(plus), fix(minus))
}

/// Two-particle state in the product basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩` of the
/// lab `z` axis.
#[derive(Debug, Clone, PartialEq)]
pub struct PairState {
    amplitudes: CVector,
}

impl PairState {
    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨ψ|O|ψ⟩`.
    pub fn expectation(&self, op: &CMatrix) -> C64 {
        self.amplitudes.inner(&op.apply(&self.amplitudes))
    }
}

/// `(|+,n⟩|−,n⟩ − |−,n⟩|+,n⟩)/√2`, built from the helicity kets of `n`.
pub fn singlet_state(n: &Direction) -> PairState {
    let (plus, minus) = helicity_basis(n);
    let diff = &plus.kron(&minus) - &minus.kron(&plus);
    PairState {
        amplitudes: diff.scale(std::f64::consts::FRAC_1_SQRT_2),
    }
}

/// `n·σ ⊗ 1 + 1 ⊗ n·σ`.
pub fn total_helicity(n: &Direction) -> CMatrix {
    let h = sigma_dot(&n.vector());
    let id = CMatrix::identity(2);
    &kron(&h, &id) + &kron(&id, &h)
}

/// `a·S/|λ_a|` for one particle of a beam moving with `beta`.
#[derive(Debug, Clone)]
pub struct SpinObservable {
    pub axis: Direction,
    pub beta: BeamVelocity,
    /// `α·σ/|α|`, eigenvalues ±1.
    pub matrix: CMatrix,
    pub alpha_norm: f64,
}

pub fn spin_observable(a: &Direction, beta: &BeamVelocity) -> Result<SpinObservable> {
    let alpha = alpha_vector(a, beta);
    let alpha_norm = alpha.norm();
    if alpha_norm <= DEGENERACY_TOL {
        return Err(degenerate(a, alpha_norm));
    }
    Ok(SpinObservable {
        axis: *a,
        beta: *beta,
        matrix: sigma_dot(&(alpha / alpha_norm)),
        alpha_norm,
    })
}

fn degenerate(a: &Direction, alpha_norm: f64) -> Error {
    Error::DegenerateObservable {
        axis: a.to_array(),
        alpha_norm,
        setting: None,
    }
}

/// Closed-form singlet correlation
///
/// ```text
/// E = -(a·b - β² a⊥·b⊥) / (√(1 + β²[(n·a)² - 1]) √(1 + β²[(n·b)² - 1]))
/// ```
///
/// evaluated without an explicit beam direction: `β² (n·a)(n·b) = (β·a)(β·b)`.
pub fn eprb_closed_form(a: &Direction, b: &Direction, beta: &BeamVelocity) -> Result<f64> {
    let shrink = beta.one_minus_beta2();
    let ba = beta.dot(a);
    let bb = beta.dot(b);
    let norm_a = (shrink + ba * ba).max(0.0).sqrt();
    let norm_b = (shrink + bb * bb).max(0.0).sqrt();
    if norm_a <= DEGENERACY_TOL {
        return Err(degenerate(a, norm_a));
    }
    if norm_b <= DEGENERACY_TOL {
        return Err(degenerate(b, norm_b));
    }
    let numerator = shrink * a.dot(b) + ba * bb;
    Ok(-numerator / (norm_a * norm_b))
}

/// `Re⟨ψ| â ⊗ b̂ |ψ⟩` by explicit matrix algebra on the singlet.
pub fn eprb_oracle(a: &Direction, b: &Direction, beta: &BeamVelocity) -> Result<f64> {
    let obs_a = spin_observable(a, beta)?;
    let obs_b = spin_observable(b, beta)?;
    let n = beta.direction().unwrap_or(Direction::z());
    let psi = singlet_state(&n);
    let value = psi.expectation(&kron(&obs_a.matrix, &obs_b.matrix));
    if value.im.abs() >= ORACLE_IMAG_TOL {
        return Err(Error::ComplexExpectation { imag: value.im });
    }
    Ok(value.re)
}

/// Rotates `v` by `angle` about `axis`.
pub fn rotate_about(v: &Vector3<f64>, axis: &Direction, angle: f64) -> Vector3<f64> {
    let k = axis.vector();
    let (s, c) = angle.sin_cos();
    v * c + k.cross(v) * s + k * (k.dot(v) * (1.0 - c))
}

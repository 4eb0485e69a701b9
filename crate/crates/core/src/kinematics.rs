//! Beam kinematics and the momentum-dependent deformation of spin axes.
//!
//! Everything here is parametrized by the dimensionless beam velocity `β`;
//! mass and momentum scales never appear. Spectra are in units of `ħ`.

use nalgebra::Vector3;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{commutator, sigma_dot, CMatrix, C64};

pub type Vec3 = Vector3<f64>;

/// Tolerance on `|v| = 1` accepted by [`Direction::new`].
pub const UNIT_TOL: f64 = 1e-12;

/// Slack above `|β| = 1` tolerated for rounding in spherical parametrizations.
const BETA_SLACK: f64 = 1e-12;

/// Unit 3-vector (detector axis or momentum direction).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[f64; 3]")]
pub struct Direction(Vec3);

impl From<Direction> for [f64; 3] {
    fn from(d: Direction) -> Self {
        [d.0.x, d.0.y, d.0.z]
    }
}

impl Direction {
    /// Accepts `(x, y, z)` only if it is already unit within [`UNIT_TOL`].
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = Vec3::new(x, y, z);
        if !v.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidDirection {
                v: [x, y, z],
                reason: "non-finite component",
            });
        }
        if (v.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidDirection {
                v: [x, y, z],
                reason: "not unit length",
            });
        }
        Ok(Direction(v))
    }

    /// Rescales any finite nonzero vector to unit length.
    pub fn normalize(v: Vec3) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidDirection {
                v: [v.x, v.y, v.z],
                reason: "cannot normalize",
            });
        }
        Ok(Direction(v / norm))
    }

    /// `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        Direction(spherical(theta, phi))
    }

    pub const fn x() -> Self {
        Direction(Vec3::new(1.0, 0.0, 0.0))
    }

    pub const fn y() -> Self {
        Direction(Vec3::new(0.0, 1.0, 0.0))
    }

    pub const fn z() -> Self {
        Direction(Vec3::new(0.0, 0.0, 1.0))
    }

    pub fn vector(&self) -> Vec3 {
        self.0
    }

    pub fn to_array(&self) -> [f64; 3] {
        (*self).into()
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn flipped(&self) -> Self {
        Direction(-self.0)
    }
}

fn spherical(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vec3::new(st * cp, st * sp, ct)
}

/// Dimensionless beam velocity `β = v/c`, `|β| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(into = "[f64; 3]")]
pub struct BeamVelocity(Vec3);

impl From<BeamVelocity> for [f64; 3] {
    fn from(b: BeamVelocity) -> Self {
        [b.0.x, b.0.y, b.0.z]
    }
}

impl BeamVelocity {
    pub fn new(beta: Vec3) -> Result<Self> {
        let mag = beta.norm();
        if !mag.is_finite() || mag > 1.0 + BETA_SLACK {
            return Err(Error::SuperluminalVelocity {
                beta: [beta.x, beta.y, beta.z],
            });
        }
        Ok(BeamVelocity(beta))
    }

    pub fn from_components(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Vec3::new(x, y, z))
    }

    pub fn rest() -> Self {
        BeamVelocity(Vec3::zeros())
    }

    /// `magnitude · direction`.
    pub fn along(direction: Direction, magnitude: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&magnitude) {
            return Err(Error::SuperluminalVelocity {
                beta: (direction.0 * magnitude).into(),
            });
        }
        Ok(BeamVelocity(direction.0 * magnitude))
    }

    /// In-plane velocity `β (cos φ, sin φ, 0)`.
    pub fn in_plane(magnitude: f64, phi: f64) -> Result<Self> {
        Self::spherical(magnitude, std::f64::consts::FRAC_PI_2, phi)
    }

    /// `β (cos φ sin θ, sin φ sin θ, cos θ)`.
    pub fn spherical(magnitude: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&magnitude) {
            return Err(Error::SuperluminalVelocity {
                beta: (spherical(theta, phi) * magnitude).into(),
            });
        }
        Ok(BeamVelocity(spherical(theta, phi) * magnitude))
    }

    pub fn vector(&self) -> Vec3 {
        self.0
    }

    pub fn to_array(&self) -> [f64; 3] {
        (*self).into()
    }

    pub fn magnitude(&self) -> f64 {
        self.0.norm()
    }

    pub fn beta2(&self) -> f64 {
        self.0.norm_squared()
    }

    /// `1 - β²`, clamped at zero.
    pub fn one_minus_beta2(&self) -> f64 {
        let b = self.magnitude();
        ((1.0 - b) * (1.0 + b)).max(0.0)
    }

    /// `√(1 - β²)`: the factor by which transverse spin components shrink.
    pub fn contraction(&self) -> f64 {
        self.one_minus_beta2().sqrt()
    }

    /// Lorentz factor; infinite at `|β| = 1`.
    pub fn gamma(&self) -> f64 {
        1.0 / self.contraction()
    }

    /// Momentum direction `n = β/|β|`; `None` at rest.
    pub fn direction(&self) -> Option<Direction> {
        let mag = self.magnitude();
        (mag > 0.0).then(|| Direction(self.0 / mag))
    }

    /// `β·a`.
    pub fn dot(&self, a: &Direction) -> f64 {
        self.0.dot(&a.0)
    }
}

/// Splits `a` into components parallel and perpendicular to `n`.
pub fn decompose(a: &Direction, n: &Direction) -> (Vec3, Vec3) {
    let par = n.0 * n.0.dot(&a.0);
    let perp = a.0 - par;
    (par, perp)
}

/// [`decompose`] relative to the beam direction. At rest the whole of `a`
/// counts as perpendicular.
pub fn decompose_along_beam(a: &Direction, beta: &BeamVelocity) -> (Vec3, Vec3) {
    match beta.direction() {
        Some(n) => decompose(a, &n),
        None => (Vec3::zeros(), a.0),
    }
}

/// Effective spin axis `α(a, β) = √(1-β²) a⊥ + a∥` seen by a detector along `a`.
pub fn alpha_vector(a: &Direction, beta: &BeamVelocity) -> Vec3 {
    let (par, perp) = decompose_along_beam(a, beta);
    perp * beta.contraction() + par
}

/// `√(1 + (β·a)² - β²)`, the length of [`alpha_vector`].
pub fn alpha_norm(a: &Direction, beta: &BeamVelocity) -> f64 {
    let ba = beta.dot(a);
    (beta.one_minus_beta2() + ba * ba).max(0.0).sqrt()
}

/// Spin quantum number `j`, stored as `2j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Spin {
    twice: u32,
}

impl Spin {
    pub const HALF: Spin = Spin { twice: 1 };

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(Error::InvalidSpin { twice_j: twice });
        }
        Ok(Spin { twice })
    }

    pub fn value(&self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub fn twice(&self) -> u32 {
        self.twice
    }

    /// `-j, -j+1, ..., +j`.
    pub fn projections(&self) -> impl Iterator<Item = f64> {
        let twice = self.twice as i64;
        (0..=twice).map(move |k| (2 * k - twice) as f64 / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpinProjectionSpectrum {
    pub spin: Spin,
    /// Ascending, in units of ħ.
    pub eigenvalues: Vec<f64>,
}

/// Eigenvalues `j₃ √(1 + (β·a)² - β²)` of the relativistic spin projection `a·S`.
pub fn spin_eigenvalues(a: &Direction, beta: &BeamVelocity, spin: Spin) -> SpinProjectionSpectrum {
    let scale = alpha_norm(a, beta);
    SpinProjectionSpectrum {
        spin,
        eigenvalues: spin.projections().map(|j3| j3 * scale).collect(),
    }
}

/// Eigenvalues of `a·w` where `w = W/(mc)` is the mass-normalized
/// Pauli-Lubanski vector: the spin eigenvalues times `γ`.
///
/// `gamma` is passed separately so that the `|β| → 1` divergence stays
/// explicit; it must agree with `beta` to 1e-9.
pub fn w_projection_eigenvalues(
    a: &Direction,
    beta: &BeamVelocity,
    gamma: f64,
    spin: Spin,
) -> Result<Vec<f64>> {
    let consistent = gamma.is_finite()
        && gamma >= 1.0
        && (gamma * beta.contraction() - 1.0).abs() <= 1e-9;
    if !consistent {
        return Err(Error::GammaInconsistent {
            gamma,
            beta_mag: beta.magnitude(),
        });
    }
    Ok(spin_eigenvalues(a, beta, spin)
        .eigenvalues
        .into_iter()
        .map(|l| l * gamma)
        .collect())
}

/// Right-handed orthonormal frame whose third axis is `n`.
pub fn frame_with_axis(n: &Direction) -> [Vec3; 3] {
    let v = n.0;
    // seed with the lab axis least aligned with n
    let seed = if v.x.abs() <= v.y.abs() && v.x.abs() <= v.z.abs() {
        Vec3::x()
    } else if v.y.abs() <= v.z.abs() {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let e1 = (seed - v * v.dot(&seed)).normalize();
    let e2 = v.cross(&e1);
    [e1, e2, v]
}

/// Lie-algebra data of the relativistic spin components at fixed `β`.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    /// Frame `(e1', e2', n)`; the lab frame at rest.
    pub frame: [Vec3; 3],
    /// `S_k = α(e_k', β)·σ/2`.
    pub generators: [CMatrix; 3],
    /// `[S_k, S_l] = i Σ_m c[k][l][m] S_m`.
    pub constants: [[[f64; 3]; 3]; 3],
}

impl StructureConstants {
    /// Largest entry of `[S_k, S_l] - i Σ_m c_klm S_m` over all nine pairs.
    pub fn recontraction_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for k in 0..3 {
            for l in 0..3 {
                let lhs = commutator(&self.generators[k], &self.generators[l])
                    .expect("2x2 generators");
                let mut rhs = CMatrix::zeros(2);
                for m in 0..3 {
                    rhs = rhs + self.generators[m].scale(self.constants[k][l][m]);
                }
                let rhs = rhs.scale_complex(C64::new(0.0, 1.0));
                worst = worst.max(lhs.max_abs_diff(&rhs));
            }
        }
        worst
    }
}

/// Structure constants of the spin components in the frame where `n` is the
/// third axis: `c₁₂₃ = 1 - β²`, `c₂₃₁ = c₃₁₂ = 1`. At `|β| = 1` the
/// transverse generators vanish and the algebra is the Euclidean `e(2)`.
///
/// The constants are read off numerically from the 2x2 commutators. The two
/// transverse generators always carry the same factor `√(1-β²)`, so for a
/// transverse target `m` that factor is cancelled against the other transverse
/// generator before projecting; this keeps the extraction well defined when
/// both vanish.
pub fn spin_structure_constants(beta: &BeamVelocity) -> StructureConstants {
    let frame = match beta.direction() {
        Some(n) => frame_with_axis(&n),
        None => [Vec3::x(), Vec3::y(), Vec3::z()],
    };
    let contraction = beta.contraction();
    let axes: [Direction; 3] = frame.map(Direction);
    let generators = axes.map(|e| sigma_dot(&alpha_vector(&e, beta)).scale(0.5));
    let units = frame.map(|e| sigma_dot(&e).scale(0.5));
    let scale = [contraction, contraction, 1.0];

    let mut constants = [[[0.0; 3]; 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            for m in 0..3 {
                let (left, right, divisor) = if m < 2 {
                    let other = 1 - m;
                    let pick = |i: usize| {
                        if i == other {
                            &units[i]
                        } else {
                            &generators[i]
                        }
                    };
                    let partner = if k == other || l == other { 1.0 } else { scale[m] };
                    (pick(k), pick(l), partner)
                } else {
                    (&generators[k], &generators[l], scale[m])
                };
                let comm = commutator(left, right).expect("2x2 generators");
                // [X, Y] = i f E_m with Tr(E_m E_m) = 1/2  =>  f = -2i Tr(E_m [X, Y])
                let f = (C64::new(0.0, -2.0) * (&units[m] * &comm).trace()).re;
                constants[k][l][m] = if divisor > 0.0 {
                    f / divisor
                } else {
                    0.0
                };
            }
        }
    }
    StructureConstants {
        frame,
        generators,
        constants,
    }
}

//! CHSH functional, figure scans and settings optimization.

mod optimize;
mod scan;

pub use optimize::{maximize_chsh, MaximizeOptions, MaximizeResult, SearchDomain};
pub use scan::{
    fig1, fig2, fig3, linspace, proper_time_comparison, scan_beta_phi, scan_theta_phi, GridAxis,
    ScanTable, FIG2_DEFAULT_BETAS,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kinematics::{alpha_norm, BeamVelocity, Direction};
use crate::observables::{eprb_closed_form, DEGENERACY_TOL};

pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Detector axes for Alice (`a`, `a'`) and Bob (`b`, `b'`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshSettings {
    pub a: Direction,
    pub a_prime: Direction,
    pub b: Direction,
    pub b_prime: Direction,
}

impl ChshSettings {
    pub fn new(a: Direction, a_prime: Direction, b: Direction, b_prime: Direction) -> Self {
        ChshSettings {
            a,
            a_prime,
            b,
            b_prime,
        }
    }

    /// In-plane settings giving `|c| = 2√2` at rest:
    /// `a = (1,1,0)/√2`, `a' = (-1,1,0)/√2`, `b = (0,1,0)`, `b' = (1,0,0)`.
    pub fn standard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        ChshSettings {
            a: Direction::new(h, h, 0.0).expect("unit"),
            a_prime: Direction::new(-h, h, 0.0).expect("unit"),
            b: Direction::y(),
            b_prime: Direction::x(),
        }
    }

    pub fn named(&self) -> [(&'static str, Direction); 4] {
        [
            ("a", self.a),
            ("a'", self.a_prime),
            ("b", self.b),
            ("b'", self.b_prime),
        ]
    }

    /// Fails with `DegenerateObservable` naming the first setting whose spin
    /// projection vanishes at `beta`.
    pub fn check_nondegenerate(&self, beta: &BeamVelocity) -> Result<()> {
        for (name, axis) in self.named() {
            let norm = alpha_norm(&axis, beta);
            if norm <= DEGENERACY_TOL {
                return Err(Error::DegenerateObservable {
                    axis: axis.to_array(),
                    alpha_norm: norm,
                    setting: Some(name),
                });
            }
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        self.named()
            .iter()
            .map(|(name, d)| {
                let [x, y, z] = d.to_array();
                format!("{name}=({x} {y} {z})")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl Default for ChshSettings {
    fn default() -> Self {
        Self::standard()
    }
}

/// `E(a,b) + E(a,b') + E(a',b) - E(a',b')` for any correlation function.
pub fn chsh_with<F>(s: &ChshSettings, beta: &BeamVelocity, correlation: F) -> Result<f64>
where
    F: Fn(&Direction, &Direction, &BeamVelocity) -> Result<f64>,
{
    s.check_nondegenerate(beta)?;
    Ok(correlation(&s.a, &s.b, beta)? + correlation(&s.a, &s.b_prime, beta)?
        + correlation(&s.a_prime, &s.b, beta)?
        - correlation(&s.a_prime, &s.b_prime, beta)?)
}

/// CHSH value with the closed-form singlet correlation.
pub fn chsh_value(s: &ChshSettings, beta: &BeamVelocity) -> Result<f64> {
    chsh_with(s, beta, eprb_closed_form)
}

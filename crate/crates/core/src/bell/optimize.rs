//! Derivative-free maximization of `|c|` over detector settings.
//!
//! Each restart runs two coordinate-wise sweeps over a coarse angular grid,
//! then a compass (pattern) search that halves its step until it drops below
//! the tolerance. Restarts are independent and run in parallel; the winner is
//! chosen in restart order so the result does not depend on scheduling.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{chsh_value, ChshSettings};
use crate::error::{Error, Result};
use crate::kinematics::{frame_with_axis, BeamVelocity, Direction, Vec3};

/// Where the four detector axes may point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SearchDomain {
    /// Anywhere on the unit sphere (two angles per axis).
    Sphere,
    /// On the great circle perpendicular to the given normal (one angle per axis).
    Plane(Direction),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximizeOptions {
    pub restarts: usize,
    pub tol: f64,
    pub seed: u64,
    /// Grid points per angle in the coarse stage.
    pub coarse_points: usize,
    pub domain: SearchDomain,
    /// Objective evaluations allowed per restart.
    pub max_evaluations: usize,
}

impl Default for MaximizeOptions {
    fn default() -> Self {
        MaximizeOptions {
            restarts: 8,
            tol: 1e-9,
            seed: 0,
            coarse_points: 12,
            domain: SearchDomain::Sphere,
            max_evaluations: 200_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MaximizeResult {
    pub settings: ChshSettings,
    /// Signed CHSH value at the optimum.
    pub value: f64,
    /// `|value|`, the maximized objective.
    pub magnitude: f64,
    /// Best objective after the coarse stage of the winning restart.
    pub coarse_magnitude: f64,
    /// Best objective after every refinement pass of the winning restart.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

struct Problem {
    beta: BeamVelocity,
    domain: SearchDomain,
    plane: Option<(Vec3, Vec3)>,
}

impl Problem {
    fn new(beta: BeamVelocity, domain: SearchDomain) -> Self {
        let plane = match domain {
            SearchDomain::Sphere => None,
            SearchDomain::Plane(normal) => {
                let [e1, e2, _] = frame_with_axis(&normal);
                Some((e1, e2))
            }
        };
        Problem {
            beta,
            domain,
            plane,
        }
    }

    fn dimension(&self) -> usize {
        match self.domain {
            SearchDomain::Sphere => 8,
            SearchDomain::Plane(_) => 4,
        }
    }

    /// Polar angles range over `[0, π]`, everything else is periodic.
    fn is_polar(&self, coord: usize) -> bool {
        matches!(self.domain, SearchDomain::Sphere) && coord % 2 == 0
    }

    fn direction(&self, x: &[f64], k: usize) -> Direction {
        match self.plane {
            None => Direction::from_spherical(x[2 * k], x[2 * k + 1]),
            Some((e1, e2)) => {
                let (s, c) = x[k].sin_cos();
                Direction::normalize(e1 * c + e2 * s).expect("unit combination")
            }
        }
    }

    fn settings(&self, x: &[f64]) -> ChshSettings {
        ChshSettings::new(
            self.direction(x, 0),
            self.direction(x, 1),
            self.direction(x, 2),
            self.direction(x, 3),
        )
    }

    fn objective(&self, x: &[f64]) -> f64 {
        // degenerate corners score zero so they can never win
        chsh_value(&self.settings(x), &self.beta)
            .map(f64::abs)
            .unwrap_or(0.0)
    }

    fn encode(&self, s: &ChshSettings) -> Vec<f64> {
        let dirs = [s.a, s.a_prime, s.b, s.b_prime];
        match self.plane {
            None => dirs
                .iter()
                .flat_map(|d| {
                    let v = d.vector();
                    [v.z.clamp(-1.0, 1.0).acos(), v.y.atan2(v.x)]
                })
                .collect(),
            Some((e1, e2)) => dirs
                .iter()
                .map(|d| d.vector().dot(&e2).atan2(d.vector().dot(&e1)))
                .collect(),
        }
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.dimension())
            .map(|i| {
                if self.is_polar(i) {
                    rng.gen_range(-1.0f64..1.0).acos()
                } else {
                    rng.gen_range(0.0..2.0 * PI)
                }
            })
            .collect()
    }
}

struct Run {
    x: Vec<f64>,
    best: f64,
    coarse: f64,
    history: Vec<f64>,
    evaluations: usize,
}

fn run_restart(problem: &Problem, start: Vec<f64>, opts: &MaximizeOptions) -> Run {
    let mut x = start;
    let mut evaluations = 1;
    let mut best = problem.objective(&x);
    let points = opts.coarse_points;

    for _sweep in 0..2 {
        for i in 0..x.len() {
            let grid: Vec<f64> = if problem.is_polar(i) {
                (0..points)
                    .map(|k| PI * k as f64 / (points - 1) as f64)
                    .collect()
            } else {
                (0..points)
                    .map(|k| 2.0 * PI * k as f64 / points as f64)
                    .collect()
            };
            for g in grid {
                let mut trial = x.clone();
                trial[i] = g;
                let f = problem.objective(&trial);
                evaluations += 1;
                if f > best {
                    best = f;
                    x = trial;
                }
            }
        }
    }
    let coarse = best;

    let mut history = vec![best];
    let mut step = PI / points as f64;
    while step >= opts.tol && evaluations < opts.max_evaluations {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut trial = x.clone();
                trial[i] += dir * step;
                let f = problem.objective(&trial);
                evaluations += 1;
                if f > best {
                    best = f;
                    x = trial;
                    improved = true;
                    break;
                }
            }
        }
        history.push(best);
        if !improved {
            step *= 0.5;
        }
    }

    Run {
        x,
        best,
        coarse,
        history,
        evaluations,
    }
}

/// Maximizes `|chsh_value|` over detector settings at fixed `beta`.
///
/// The first restart starts from the standard settings (projected into the
/// search domain); the others start from seeded random points.
pub fn maximize_chsh(beta: &BeamVelocity, opts: &MaximizeOptions) -> Result<MaximizeResult> {
    if opts.restarts == 0 {
        return Err(Error::InvalidOption("restarts must be at least 1"));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidOption("tol must be positive"));
    }
    if opts.coarse_points < 12 {
        return Err(Error::InvalidOption("coarse grid needs at least 12 points per angle"));
    }
    let problem = Problem::new(*beta, opts.domain);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<f64>> = (0..opts.restarts)
        .map(|r| {
            if r == 0 {
                problem.encode(&ChshSettings::standard())
            } else {
                problem.random_point(&mut rng)
            }
        })
        .collect();

    let runs: Vec<Run> = starts
        .into_par_iter()
        .map(|start| run_restart(&problem, start, opts))
        .collect();
    let evaluations = runs.iter().map(|r| r.evaluations).sum();
    let winner = runs
        .into_iter()
        .reduce(|best, r| if r.best > best.best { r } else { best })
        .expect("at least one restart");

    let settings = problem.settings(&winner.x);
    let value = chsh_value(&settings, beta)?;
    Ok(MaximizeResult {
        settings,
        value,
        magnitude: winner.best,
        coarse_magnitude: winner.coarse,
        history: winner.history,
        evaluations,
    })
}

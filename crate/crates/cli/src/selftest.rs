//! Randomized suites run by `relbell selftest`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relbell::bell::{chsh_value, ChshSettings, TSIRELSON};
use relbell::dirac::CheckReport;
use relbell::observables::{eprb_closed_form, eprb_oracle};
use relbell::{BeamVelocity, Direction, Error, Result};

pub const ORACLE_SAMPLES: usize = 10_000;
pub const TSIRELSON_SAMPLES: usize = 100_000;

fn unit(rng: &mut ChaCha8Rng) -> Direction {
    let z: f64 = rng.gen_range(-1.0..1.0);
    Direction::from_spherical(z.acos(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn beam(rng: &mut ChaCha8Rng, max: f64) -> Result<BeamVelocity> {
    let mag = rng.gen_range(0.0..=max);
    BeamVelocity::along(unit(rng), mag)
}

pub fn run(seed: u64) -> Result<Vec<CheckReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut worst = 0.0f64;
    for _ in 0..ORACLE_SAMPLES {
        let (a, b) = (unit(&mut rng), unit(&mut rng));
        let beta = beam(&mut rng, 0.999)?;
        let diff = (eprb_closed_form(&a, &b, &beta)? - eprb_oracle(&a, &b, &beta)?).abs();
        worst = worst.max(diff);
    }
    let oracle = CheckReport::new("oracle_equivalence", worst, 1e-12);

    let mut excess = f64::NEG_INFINITY;
    for _ in 0..TSIRELSON_SAMPLES {
        let s = ChshSettings::new(unit(&mut rng), unit(&mut rng), unit(&mut rng), unit(&mut rng));
        let beta = beam(&mut rng, 0.999)?;
        match chsh_value(&s, &beta) {
            Ok(c) => excess = excess.max(c.abs() - TSIRELSON),
            Err(Error::DegenerateObservable { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    let tsirelson = CheckReport::new("tsirelson_bound", excess.max(0.0), 1e-9);

    Ok(vec![oracle, tsirelson])
}

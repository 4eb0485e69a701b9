use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;

use super::{chsh_value, ChshSettings};
use crate::error::{Error, Result};
use crate::kinematics::BeamVelocity;

/// Beam speeds of the two surfaces in [`fig2`].
pub const FIG2_DEFAULT_BETAS: [f64; 2] = [0.99, 0.95];

/// Marker written in place of a value where an observable is degenerate.
pub const GAP_MARKER: &str = "degenerate";

#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub name: &'static str,
    pub values: Vec<f64>,
}

/// Tabulated scan. Rows enumerate the Cartesian product of the axes with the
/// last axis varying fastest; each row holds one cell per value column.
/// `None` marks a grid point where some observable was degenerate.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub axes: Vec<GridAxis>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub metadata: Vec<(String, String)>,
}

impl ScanTable {
    /// Number of grid points.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid coordinates of row `index`.
    pub fn coordinates(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut coords = vec![0.0; self.axes.len()];
        for (k, axis) in self.axes.iter().enumerate().rev() {
            let n = axis.values.len();
            coords[k] = axis.values[rem % n];
            rem /= n;
        }
        coords
    }

    /// Value of column `column` at grid point `index`.
    pub fn value(&self, index: usize, column: usize) -> Option<f64> {
        self.rows[index][column]
    }

    /// Values of one column in row order.
    pub fn column(&self, column: usize) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r[column]).collect()
    }

    pub fn gap_count(&self) -> usize {
        self.rows.iter().flatten().filter(|c| c.is_none()).count()
    }

    /// Writes `# key: value` metadata lines, a header row and one row per
    /// grid point. Floats use the shortest representation that round-trips.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut out = out;
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let header: Vec<&str> = self
            .axes
            .iter()
            .map(|a| a.name)
            .chain(self.columns.iter().copied())
            .collect();
        w.write_record(&header)?;
        for (i, row) in self.rows.iter().enumerate() {
            let record: Vec<String> = self
                .coordinates(i)
                .into_iter()
                .map(|x| x.to_string())
                .chain(row.iter().map(|c| match c {
                    Some(x) => x.to_string(),
                    None => GAP_MARKER.to_string(),
                }))
                .collect();
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    end
                } else {
                    start + (end - start) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

fn require_nonempty(axis: &'static str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid { axis });
    }
    Ok(())
}

fn require_speeds(axis: &'static str, grid: &[f64]) -> Result<()> {
    match grid.iter().find(|b| !(0.0..=1.0).contains(*b)) {
        Some(&value) => Err(Error::GridOutOfRange {
            axis,
            value,
            range: "[0, 1]",
        }),
        None => Ok(()),
    }
}

fn chsh_cell(s: &ChshSettings, beta: Result<BeamVelocity>) -> Result<Option<f64>> {
    match chsh_value(s, &beta?) {
        Ok(v) => Ok(Some(v)),
        Err(Error::DegenerateObservable { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn settings_metadata(s: &ChshSettings, parametrization: &str) -> Vec<(String, String)> {
    vec![
        ("settings".to_string(), s.describe()),
        ("beta".to_string(), parametrization.to_string()),
    ]
}

/// CHSH value over in-plane velocities `β (cos φ, sin φ, 0)`.
pub fn scan_beta_phi(s: &ChshSettings, beta_grid: &[f64], phi_grid: &[f64]) -> Result<ScanTable> {
    require_nonempty("beta", beta_grid)?;
    require_nonempty("phi", phi_grid)?;
    require_speeds("beta", beta_grid)?;
    let points: Vec<(f64, f64)> = beta_grid
        .iter()
        .flat_map(|&b| phi_grid.iter().map(move |&p| (b, p)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(b, p)| chsh_cell(s, BeamVelocity::in_plane(b, p)).map(|c| vec![c]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanTable {
        axes: vec![
            GridAxis {
                name: "beta",
                values: beta_grid.to_vec(),
            },
            GridAxis {
                name: "phi",
                values: phi_grid.to_vec(),
            },
        ],
        columns: vec!["chsh"],
        rows,
        metadata: settings_metadata(s, "beta*(cos(phi), sin(phi), 0)"),
    })
}

/// CHSH value over velocity directions `β (cos φ sin θ, sin φ sin θ, cos θ)`
/// at fixed speed.
pub fn scan_theta_phi(
    s: &ChshSettings,
    beta_mag: f64,
    theta_grid: &[f64],
    phi_grid: &[f64],
) -> Result<ScanTable> {
    scan_sphere(s, &[beta_mag], theta_grid, phi_grid).map(|mut t| {
        t.axes.remove(0);
        t.metadata
            .push(("beta_mag".to_string(), beta_mag.to_string()));
        t
    })
}

fn scan_sphere(
    s: &ChshSettings,
    mags: &[f64],
    theta_grid: &[f64],
    phi_grid: &[f64],
) -> Result<ScanTable> {
    require_nonempty("beta_mag", mags)?;
    require_nonempty("theta", theta_grid)?;
    require_nonempty("phi", phi_grid)?;
    require_speeds("beta_mag", mags)?;
    let points: Vec<(f64, f64, f64)> = mags
        .iter()
        .flat_map(|&b| {
            theta_grid
                .iter()
                .flat_map(move |&t| phi_grid.iter().map(move |&p| (b, t, p)))
        })
        .collect();
    let rows = points
        .par_iter()
        .map(|&(b, t, p)| chsh_cell(s, BeamVelocity::spherical(b, t, p)).map(|c| vec![c]))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanTable {
        axes: vec![
            GridAxis {
                name: "beta_mag",
                values: mags.to_vec(),
            },
            GridAxis {
                name: "theta",
                values: theta_grid.to_vec(),
            },
            GridAxis {
                name: "phi",
                values: phi_grid.to_vec(),
            },
        ],
        columns: vec!["chsh"],
        rows,
        metadata: settings_metadata(
            s,
            "beta_mag*(cos(phi)*sin(theta), sin(phi)*sin(theta), cos(theta))",
        ),
    })
}

/// Singlet correlation for `a·b = 0`, `a·n = b·n = 1/√2` next to the
/// time-dilation shift `√(1-β²) - 1`.
pub fn proper_time_comparison(beta_grid: &[f64]) -> Result<ScanTable> {
    require_nonempty("beta", beta_grid)?;
    require_speeds("beta", beta_grid)?;
    let rows = beta_grid
        .iter()
        .map(|&b| {
            let b2 = b * b;
            let eprb = -b2 / (2.0 - b2);
            let dilation = ((1.0 - b) * (1.0 + b)).sqrt() - 1.0;
            vec![Some(eprb), Some(dilation)]
        })
        .collect();
    Ok(ScanTable {
        axes: vec![GridAxis {
            name: "beta",
            values: beta_grid.to_vec(),
        }],
        columns: vec!["eprb_orthogonal", "proper_time_shift"],
        rows,
        metadata: vec![(
            "correlation".to_string(),
            "-beta^2/(2-beta^2) for a.b=0, a.n=b.n=1/sqrt(2)".to_string(),
        )],
    })
}

/// Proper-time comparison on `grid` points of `β ∈ [0, 1]`.
pub fn fig1(grid: usize) -> Result<ScanTable> {
    proper_time_comparison(&linspace(0.0, 1.0, grid))
}

/// Spherical scans at each speed in `mags`, `θ ∈ [0, π]`, `φ ∈ [0, 2π]`.
pub fn fig2(s: &ChshSettings, grid: usize, mags: &[f64]) -> Result<ScanTable> {
    scan_sphere(s, mags, &linspace(0.0, PI, grid), &linspace(0.0, 2.0 * PI, grid))
}

/// In-plane scan, `β ∈ [0, 1]`, `φ ∈ [0, 2π]`.
pub fn fig3(s: &ChshSettings, grid: usize) -> Result<ScanTable> {
    scan_beta_phi(s, &linspace(0.0, 1.0, grid), &linspace(0.0, 2.0 * PI, grid))
}

//! Numerical settings shared by all modules, readable from `key=value` text.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::quadrature::{box_grid, sphere_grid, BoxGrid, Scheme, SphereGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    /// Sphere resolution indexed by dimension d (entries 0 and 1 unused).
    pub sphere_resolution: [usize; 9],
    /// Sphere rule for every dimension; `None` picks the product rule up to
    /// S³ and the low-discrepancy rule above.
    pub scheme: Option<Scheme>,
    /// Affine whitening passes used by polar-coordinate volumes.
    pub whiten_passes: usize,
    pub grid_cells: usize,
    /// Cells per axis for three-dimensional grid functions.
    pub grid_cells_3d: usize,
    pub grid_halfwidth: f64,
    /// Direction bins for level-set measures in R^2 and R^3.
    pub direction_bins: [usize; 2],
    /// Direction bins that compress the gradient measure inside `energy`
    /// for n = 2 and n = 3; 0 keeps every cell as its own atom.
    pub energy_bins: [usize; 2],
    pub tol_default: f64,
    pub seed: u64,
    /// Haar samples for the Monte-Carlo route to d_{n,p}(Q).
    pub haar_samples: usize,
    /// Whether reports record wall-clock runtime (off makes CSVs byte-stable).
    pub report_timing: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            sphere_resolution: [0, 0, 720, 2048, 2048, 8192, 8192, 8192, 8192],
            scheme: None,
            whiten_passes: 2,
            grid_cells: 129,
            grid_cells_3d: 65,
            grid_halfwidth: 1.25,
            direction_bins: [720, 2048],
            energy_bins: [1024, 4096],
            tol_default: 0.01,
            seed: 42,
            haar_samples: 20_000,
            report_timing: false,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad value '{value}' for key '{key}'")))
}

impl Settings {
    /// Applies one `key=value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        if let Some(d) = key.strip_prefix("sphere.d") {
            let d: usize = parse_num(key, d)?;
            if !(2..=8).contains(&d) {
                return Err(Error::Parse(format!("sphere dimension {d} out of range")));
            }
            self.sphere_resolution[d] = parse_num(key, value)?;
            return Ok(());
        }
        match key {
            "sphere.scheme" => {
                self.scheme = match value.trim() {
                    "auto" => None,
                    "product" => Some(Scheme::Product),
                    "low_discrepancy" => Some(Scheme::LowDiscrepancy),
                    v => return Err(Error::Parse(format!("unknown scheme '{v}'"))),
                }
            }
            "sphere.whiten" => self.whiten_passes = parse_num(key, value)?,
            "grid.cells" => self.grid_cells = parse_num(key, value)?,
            "grid.cells3" => self.grid_cells_3d = parse_num(key, value)?,
            "grid.halfwidth" => self.grid_halfwidth = parse_num(key, value)?,
            "dirs.n2" => self.direction_bins[0] = parse_num(key, value)?,
            "dirs.n3" => self.direction_bins[1] = parse_num(key, value)?,
            "energy.bins2" => self.energy_bins[0] = parse_num(key, value)?,
            "energy.bins3" => self.energy_bins[1] = parse_num(key, value)?,
            "tol.default" => self.tol_default = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "haar.samples" => self.haar_samples = parse_num(key, value)?,
            "report.timing" => self.report_timing = parse_num(key, value)?,
            _ => return Err(Error::Parse(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// Parses `key=value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got '{line}'")))?;
            s.set(k, v)?;
        }
        Ok(s)
    }

    pub fn scheme_for(&self, d: usize) -> Scheme {
        match self.scheme {
            Some(s) => s,
            None if d <= 4 => Scheme::Product,
            None => Scheme::LowDiscrepancy,
        }
    }

    /// Default sphere grid for S^{d-1}, shared through a process-wide cache.
    pub fn sphere(&self, d: usize) -> Result<Arc<SphereGrid>> {
        let res = *self
            .sphere_resolution
            .get(d)
            .ok_or_else(|| Error::InvalidInput(format!("no sphere resolution for d={d}")))?;
        cached_grid(d, res, self.scheme_for(d))
    }
}

impl Settings {
    /// Box grid [-R, R]^n at the configured resolution for dimension n.
    pub fn box_grid(&self, n: usize) -> Result<BoxGrid> {
        let cells = if n == 3 {
            self.grid_cells_3d
        } else {
            self.grid_cells
        };
        box_grid(n, self.grid_halfwidth, cells)
    }
}

type GridKey = (usize, usize, Scheme);

/// Sphere grid from a process-wide cache.
pub fn cached_grid(d: usize, resolution: usize, scheme: Scheme) -> Result<Arc<SphereGrid>> {
    static CACHE: OnceLock<Mutex<HashMap<GridKey, Arc<SphereGrid>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (d, resolution, scheme);
    if let Some(g) = cache.lock().unwrap().get(&key) {
        return Ok(g.clone());
    }
    let g = Arc::new(sphere_grid(d, resolution, scheme)?);
    cache.lock().unwrap().insert(key, g.clone());
    Ok(g)
}

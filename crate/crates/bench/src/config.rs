//! Benchmark configuration: defaults for every experiment, a `key = value`
//! file format (one pair per line, `#` comments), and validation that names
//! the offending field.

use std::path::Path;
use std::str::FromStr;

use voxelmap::camera::CameraModel;
use voxelmap::map::{VoxelMap, VoxelMapConfig, DEFAULT_TABLE_SIZE, DEFAULT_VOXEL_SIZE};
use voxelmap::scene::CorridorParams;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    BadLine { line: usize, text: String },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: key `{key}` expects {expected}, got `{value}`")]
    BadValue { line: usize, key: String, expected: &'static str, value: String },
    #[error("config field `{field}`: {message}")]
    Invalid { field: &'static str, message: &'static str },
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
}

/// Every knob of every experiment, with working defaults. Fields are public
/// so programmatic callers (tests, the acceptance suite) can tweak them
/// directly; file-driven callers go through [`parse_config`].
#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    /// Timed passes per measurement; one untimed warm-up pass always precedes them.
    pub repeats: usize,
    pub seed: u64,
    pub voxel_size: f64,
    pub table_size_n: usize,
    pub grid_step: f64,
    pub d_min: f64,
    pub d_max: f64,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub image_width: u32,
    pub image_height: u32,
    /// Per-experiment default when unset: true for occlusion, false elsewhere
    /// (no early exit, so probe counts are exactly rays x samples).
    pub first_hit_only: Option<bool>,
    pub max_points_per_kf: usize,

    // scaling: wall sweep
    pub wall_lengths_m: Vec<f64>,
    pub wall_points: Vec<usize>,
    pub wall_offset_m: f64,
    pub n_query_poses: usize,

    // occlusion: corridor
    pub corridor_leg_length_m: f64,
    pub corridor_width_m: f64,
    pub corridor_separation_m: f64,
    pub corridor_density: f64,
    pub corridor_poses: usize,

    // voxel-size sweep + recall: random box scenes
    pub sweep_voxel_sizes: Vec<f64>,
    pub box_min: [f64; 3],
    pub box_max: [f64; 3],
    pub box_count: usize,
    pub recall_pairs: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            repeats: 5,
            seed: 7,
            voxel_size: DEFAULT_VOXEL_SIZE,
            table_size_n: DEFAULT_TABLE_SIZE,
            grid_step: 32.0,
            d_min: 0.5,
            d_max: 30.0,
            fx: 525.0,
            fy: 525.0,
            cx: 319.5,
            cy: 239.5,
            image_width: 640,
            image_height: 480,
            first_hit_only: None,
            max_points_per_kf: 100,
            wall_lengths_m: vec![100.0, 300.0, 500.0, 700.0, 900.0],
            wall_points: vec![1000, 3000, 5000, 7000, 9000],
            wall_offset_m: 5.0,
            n_query_poses: 10,
            corridor_leg_length_m: 20.0,
            corridor_width_m: 6.0,
            corridor_separation_m: 14.0,
            corridor_density: 8.0,
            corridor_poses: 9,
            sweep_voxel_sizes: vec![0.5, 5.0, 10.0, 15.0, 20.0],
            box_min: [-20.0, -8.0, 2.0],
            box_max: [20.0, 8.0, 28.0],
            box_count: 4000,
            recall_pairs: 100,
        }
    }
}

impl BenchConfig {
    pub fn camera(&self) -> Result<CameraModel, voxelmap::camera::GeometryError> {
        CameraModel::new(self.fx, self.fy, self.cx, self.cy, self.image_width, self.image_height)
    }

    pub fn corridor_params(&self) -> CorridorParams {
        CorridorParams {
            leg_length_m: self.corridor_leg_length_m,
            width_m: self.corridor_width_m,
            separation_m: self.corridor_separation_m,
            density_pts_per_m2: self.corridor_density,
        }
    }

    /// A fresh map sized per this config, at the given voxel edge.
    pub fn map_with_voxel_size(&self, voxel_size: f64) -> Result<VoxelMap, voxelmap::map::MapError> {
        VoxelMap::new(VoxelMapConfig {
            voxel_size,
            table_size_n: self.table_size_n,
            ..VoxelMapConfig::default()
        })
    }

    /// Pixel margin for the dilated-bounds containment check: the projected
    /// width of one voxel edge at the closest queryable depth.
    pub fn dilation_margin_px(&self) -> f64 {
        self.voxel_size * self.fx.max(self.fy) / self.d_min
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        fn num<T: FromStr>(
            key: &str,
            value: &str,
            line: usize,
            expected: &'static str,
        ) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::BadValue {
                line,
                key: key.to_string(),
                expected,
                value: value.to_string(),
            })
        }
        fn list<T: FromStr>(
            key: &str,
            value: &str,
            line: usize,
            expected: &'static str,
        ) -> Result<Vec<T>, ConfigError> {
            value.split(',').map(|s| num(key, s.trim(), line, expected)).collect()
        }
        fn triple(
            key: &str,
            value: &str,
            line: usize,
        ) -> Result<[f64; 3], ConfigError> {
            let v: Vec<f64> = list(key, value, line, "three comma-separated numbers")?;
            v.try_into().map_err(|_| ConfigError::BadValue {
                line,
                key: key.to_string(),
                expected: "three comma-separated numbers",
                value: value.to_string(),
            })
        }

        match key {
            "repeats" => self.repeats = num(key, value, line, "a positive integer")?,
            "seed" => self.seed = num(key, value, line, "an unsigned integer")?,
            "voxel_size" => self.voxel_size = num(key, value, line, "a number")?,
            "table_size_n" => self.table_size_n = num(key, value, line, "a positive integer")?,
            "grid_step" => self.grid_step = num(key, value, line, "a number")?,
            "d_min" => self.d_min = num(key, value, line, "a number")?,
            "d_max" => self.d_max = num(key, value, line, "a number")?,
            "fx" => self.fx = num(key, value, line, "a number")?,
            "fy" => self.fy = num(key, value, line, "a number")?,
            "cx" => self.cx = num(key, value, line, "a number")?,
            "cy" => self.cy = num(key, value, line, "a number")?,
            "image_width" => self.image_width = num(key, value, line, "a positive integer")?,
            "image_height" => self.image_height = num(key, value, line, "a positive integer")?,
            "first_hit_only" => {
                self.first_hit_only = Some(num(key, value, line, "true or false")?)
            }
            "max_points_per_kf" => {
                self.max_points_per_kf = num(key, value, line, "a positive integer")?
            }
            "wall_lengths_m" => {
                self.wall_lengths_m = list(key, value, line, "comma-separated numbers")?
            }
            "wall_points" => {
                self.wall_points = list(key, value, line, "comma-separated integers")?
            }
            "wall_offset_m" => self.wall_offset_m = num(key, value, line, "a number")?,
            "n_query_poses" => self.n_query_poses = num(key, value, line, "a positive integer")?,
            "corridor_leg_length_m" => {
                self.corridor_leg_length_m = num(key, value, line, "a number")?
            }
            "corridor_width_m" => self.corridor_width_m = num(key, value, line, "a number")?,
            "corridor_separation_m" => {
                self.corridor_separation_m = num(key, value, line, "a number")?
            }
            "corridor_density" => self.corridor_density = num(key, value, line, "a number")?,
            "corridor_poses" => self.corridor_poses = num(key, value, line, "an integer >= 5")?,
            "sweep_voxel_sizes" => {
                self.sweep_voxel_sizes = list(key, value, line, "comma-separated numbers")?
            }
            "box_min" => self.box_min = triple(key, value, line)?,
            "box_max" => self.box_max = triple(key, value, line)?,
            "box_count" => self.box_count = num(key, value, line, "a non-negative integer")?,
            "recall_pairs" => self.recall_pairs = num(key, value, line, "a positive integer")?,
            _ => {
                return Err(ConfigError::UnknownKey { line, key: key.to_string() });
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn fail(field: &'static str, message: &'static str) -> Result<(), ConfigError> {
            Err(ConfigError::Invalid { field, message })
        }
        if self.repeats == 0 {
            return fail("repeats", "must be at least 1");
        }
        if !(self.voxel_size.is_finite() && self.voxel_size > 0.0) {
            return fail("voxel_size", "must be positive and finite");
        }
        if self.table_size_n == 0 {
            return fail("table_size_n", "must be at least 1");
        }
        if !(self.grid_step.is_finite() && self.grid_step >= 1.0) {
            return fail("grid_step", "must be at least 1 pixel");
        }
        if !(self.d_min.is_finite() && self.d_max.is_finite() && 0.0 < self.d_min && self.d_min < self.d_max)
        {
            return fail("d_min/d_max", "need 0 < d_min < d_max, both finite");
        }
        if !(self.fx.is_finite() && self.fx > 0.0 && self.fy.is_finite() && self.fy > 0.0) {
            return fail("fx/fy", "focal lengths must be positive and finite");
        }
        if self.image_width == 0 || self.image_height == 0 {
            return fail("image_width/image_height", "must be at least 1 pixel");
        }
        if !(self.cx.is_finite() && self.cx >= 0.0 && self.cx < self.image_width as f64) {
            return fail("cx", "must lie inside the image width");
        }
        if !(self.cy.is_finite() && self.cy >= 0.0 && self.cy < self.image_height as f64) {
            return fail("cy", "must lie inside the image height");
        }
        if self.max_points_per_kf == 0 {
            return fail("max_points_per_kf", "must be at least 1");
        }
        if self.wall_lengths_m.is_empty() {
            return fail("wall_lengths_m", "must list at least one wall length");
        }
        if self.wall_lengths_m.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return fail("wall_lengths_m", "lengths must be positive and finite");
        }
        if self.wall_points.len() != self.wall_lengths_m.len() {
            return fail("wall_points", "must list exactly one point count per wall length");
        }
        if !(self.wall_offset_m.is_finite() && self.wall_offset_m > 0.0) {
            return fail("wall_offset_m", "must be positive and finite");
        }
        if self.n_query_poses == 0 {
            return fail("n_query_poses", "must be at least 1");
        }
        if !(self.corridor_leg_length_m.is_finite() && self.corridor_leg_length_m > 0.0) {
            return fail("corridor_leg_length_m", "must be positive and finite");
        }
        if !(self.corridor_width_m.is_finite() && self.corridor_width_m > 0.0) {
            return fail("corridor_width_m", "must be positive and finite");
        }
        if !(self.corridor_separation_m.is_finite()
            && self.corridor_separation_m > self.corridor_width_m)
        {
            return fail("corridor_separation_m", "must exceed corridor_width_m");
        }
        if !(self.corridor_density.is_finite() && self.corridor_density >= 0.0) {
            return fail("corridor_density", "must be non-negative and finite");
        }
        if self.corridor_poses < 5 {
            return fail("corridor_poses", "must be at least 5 (two legs, two bends, a crossing)");
        }
        if self.sweep_voxel_sizes.is_empty() {
            return fail("sweep_voxel_sizes", "must list at least one voxel size");
        }
        if self.sweep_voxel_sizes.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return fail("sweep_voxel_sizes", "sizes must be positive and finite");
        }
        if self
            .box_min
            .iter()
            .zip(&self.box_max)
            .any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b))
        {
            return fail("box_min/box_max", "need box_min < box_max per axis, all finite");
        }
        if self.recall_pairs == 0 {
            return fail("recall_pairs", "must be at least 1");
        }
        Ok(())
    }
}

/// Parse the `key = value` text format. Unknown keys are errors so typos
/// cannot silently fall back to defaults.
pub fn parse_config(text: &str) -> Result<BenchConfig, ConfigError> {
    let mut cfg = BenchConfig::default();
    for (ix, raw) in text.lines().enumerate() {
        let line = ix + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        let Some((k, v)) = stripped.split_once('=') else {
            return Err(ConfigError::BadLine { line, text: stripped.to_string() });
        };
        cfg.set(k.trim(), v.trim(), line)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<BenchConfig, ConfigError> {
    parse_config(&std::fs::read_to_string(path)?)
}

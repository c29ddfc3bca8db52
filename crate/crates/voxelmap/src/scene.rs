//! Deterministic synthetic scenes: a planar wall, a U-shaped corridor with
//! labeled wall segments, and a uniform random box, plus the camera
//! trajectories that exercise them and a brute-force frustum oracle.
//!
//! All scatter is drawn with a counter-based generator: draw k of seed s is a
//! pure function of (s, k), so regeneration is bit-identical and independent
//! of draw order.

use std::collections::HashSet;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::camera::{project_point, CameraModel, Pose};
use crate::frustum::{rays_seeing_near_before_far, RayTemplate};
use crate::map::{voxel_key_for, MapPoint, VoxelKey};

/// Wall height used by every generator, in meters (walls span y in [-2, 2]).
pub const WALL_HEIGHT_M: f64 = 4.0;

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("scene parameter out of range: {0}")]
    InvalidParameter(&'static str),
    #[error("a corridor trajectory needs at least 5 poses, got {0}")]
    TooFewPoses(usize),
}

// --- counter-based randomness -------------------------------------------------

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draw `counter` of stream `seed`: a pure function of its arguments.
pub fn mix(seed: u64, counter: u64) -> u64 {
    splitmix64(seed ^ splitmix64(counter))
}

/// Uniform draw in [0, 1) from (seed, counter).
pub fn unit_f64(seed: u64, counter: u64) -> f64 {
    (mix(seed, counter) >> 11) as f64 / (1u64 << 53) as f64
}

// --- scene description ---------------------------------------------------------

/// Wall identity inside the U-shaped corridor. "Inner" walls face the island
/// enclosed by the U; leg 1 holds the start of the trajectory, leg 2 the end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WallLabel {
    Leg1Outer,
    Leg1Inner,
    CrossInner,
    CrossOuter,
    Leg2Inner,
    Leg2Outer,
}

/// Contiguous id range [start_id, end_id) of points belonging to one wall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneSegment {
    pub label: WallLabel,
    pub start_id: u64,
    pub end_id: u64,
}

/// Parameters of the record are sufficient to regenerate the exact point set
/// together with the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SceneGenerator {
    Wall { length_m: f64, n_points: usize },
    Corridor(CorridorParams),
    RandomBox { min: [f64; 3], max: [f64; 3], count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorridorParams {
    /// Length of each straight leg, in meters.
    pub leg_length_m: f64,
    /// Corridor width (wall-to-wall), in meters.
    pub width_m: f64,
    /// Distance between the two leg spines, in meters.
    pub separation_m: f64,
    /// Points per square meter of wall surface.
    pub density_pts_per_m2: f64,
}

impl Default for CorridorParams {
    fn default() -> Self {
        Self { leg_length_m: 20.0, width_m: 6.0, separation_m: 14.0, density_pts_per_m2: 8.0 }
    }
}

/// A generated point set plus everything needed to regenerate it.
#[derive(Debug, Clone)]
pub struct Scene {
    pub points: Vec<MapPoint>,
    pub generator: SceneGenerator,
    pub seed: u64,
    pub segments: Vec<SceneSegment>,
}

impl Scene {
    /// Ids of the points belonging to `label` (empty for unlabeled scenes).
    pub fn ids_with_label(&self, label: WallLabel) -> Vec<u64> {
        self.segments
            .iter()
            .filter(|s| s.label == label)
            .flat_map(|s| s.start_id..s.end_id)
            .collect()
    }

    pub fn label_of(&self, id: u64) -> Option<WallLabel> {
        self.segments.iter().find(|s| id >= s.start_id && id < s.end_id).map(|s| s.label)
    }
}

/// Rebuild a scene from its parameter record; bit-identical to the original.
pub fn regenerate(generator: &SceneGenerator, seed: u64) -> Result<Scene, SceneError> {
    match generator {
        SceneGenerator::Wall { length_m, n_points } => make_wall_scene(*length_m, *n_points, seed),
        SceneGenerator::Corridor(params) => make_corridor_scene(params.clone(), seed),
        SceneGenerator::RandomBox { min, max, count } => make_random_box_scene(*min, *max, *count, seed),
    }
}

fn draw_point(seed: u64, id: u64, f: impl Fn(f64, f64) -> Point3<f64>) -> MapPoint {
    let u1 = unit_f64(seed, 4 * id);
    let u2 = unit_f64(seed, 4 * id + 1);
    let description = mix(seed, 4 * id + 3).to_le_bytes().to_vec();
    MapPoint::new(id, f(u1, u2), description)
}

/// Planar wall in the z = 0 plane: x in [0, length_m], y in [-2, 2].
/// Point density per meter of length is n_points / length_m, so scaling the
/// two together keeps local density constant.
pub fn make_wall_scene(length_m: f64, n_points: usize, seed: u64) -> Result<Scene, SceneError> {
    if !(length_m.is_finite() && length_m > 0.0) {
        return Err(SceneError::InvalidParameter("wall length_m must be positive"));
    }
    let points = (0..n_points as u64)
        .map(|id| {
            draw_point(seed, id, |u1, u2| {
                Point3::new(length_m * u1, WALL_HEIGHT_M * (u2 - 0.5), 0.0)
            })
        })
        .collect();
    Ok(Scene {
        points,
        generator: SceneGenerator::Wall { length_m, n_points },
        seed,
        segments: Vec::new(),
    })
}

/// Uniform scatter inside an axis-aligned box.
pub fn make_random_box_scene(
    min: [f64; 3],
    max: [f64; 3],
    count: usize,
    seed: u64,
) -> Result<Scene, SceneError> {
    if min.iter().zip(&max).any(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
        return Err(SceneError::InvalidParameter("box min must be strictly below max per axis"));
    }
    let points = (0..count as u64)
        .map(|id| {
            // three independent axes, so this draw uses the third counter slot too
            let u = [unit_f64(seed, 4 * id), unit_f64(seed, 4 * id + 1), unit_f64(seed, 4 * id + 2)];
            let description = mix(seed, 4 * id + 3).to_le_bytes().to_vec();
            let p = Point3::new(
                min[0] + (max[0] - min[0]) * u[0],
                min[1] + (max[1] - min[1]) * u[1],
                min[2] + (max[2] - min[2]) * u[2],
            );
            MapPoint::new(id, p, description)
        })
        .collect();
    Ok(Scene { points, generator: SceneGenerator::RandomBox { min, max, count }, seed, segments: Vec::new() })
}

/// One vertical wall rectangle: points at `origin + u1 * run` with height
/// drawn over [-2, 2].
struct WallRect {
    label: WallLabel,
    origin: Point3<f64>,
    run: Vector3<f64>,
    area_m2: f64,
}

/// U-shaped corridor in the x-z plane (y is height). Leg 1 runs along +z at
/// x = 0, the cross segment along +x at z = leg_length, leg 2 back down at
/// x = separation. Inner walls enclose the island between the legs and stop
/// at the bend openings; outer walls wrap around the outside.
pub fn make_corridor_scene(params: CorridorParams, seed: u64) -> Result<Scene, SceneError> {
    let CorridorParams { leg_length_m: l, width_m: w, separation_m: d, density_pts_per_m2: density } =
        params;
    if !(l.is_finite() && w.is_finite() && d.is_finite() && l > 0.0 && w > 0.0) {
        return Err(SceneError::InvalidParameter("corridor lengths must be positive"));
    }
    if !(density.is_finite() && density >= 0.0) {
        return Err(SceneError::InvalidParameter("corridor density must be non-negative"));
    }
    if d <= w {
        return Err(SceneError::InvalidParameter("leg separation must exceed the corridor width"));
    }

    let h = w / 2.0;
    let island = l - h; // z extent of the island between the legs
    let rects = [
        WallRect {
            label: WallLabel::Leg1Outer,
            origin: Point3::new(-h, 0.0, 0.0),
            run: Vector3::new(0.0, 0.0, l + h),
            area_m2: (l + h) * WALL_HEIGHT_M,
        },
        WallRect {
            label: WallLabel::Leg1Inner,
            origin: Point3::new(h, 0.0, 0.0),
            run: Vector3::new(0.0, 0.0, island),
            area_m2: island * WALL_HEIGHT_M,
        },
        WallRect {
            label: WallLabel::CrossInner,
            origin: Point3::new(h, 0.0, island),
            run: Vector3::new(d - w, 0.0, 0.0),
            area_m2: (d - w) * WALL_HEIGHT_M,
        },
        WallRect {
            label: WallLabel::CrossOuter,
            origin: Point3::new(-h, 0.0, l + h),
            run: Vector3::new(d + w, 0.0, 0.0),
            area_m2: (d + w) * WALL_HEIGHT_M,
        },
        WallRect {
            label: WallLabel::Leg2Inner,
            origin: Point3::new(d - h, 0.0, 0.0),
            run: Vector3::new(0.0, 0.0, island),
            area_m2: island * WALL_HEIGHT_M,
        },
        WallRect {
            label: WallLabel::Leg2Outer,
            origin: Point3::new(d + h, 0.0, 0.0),
            run: Vector3::new(0.0, 0.0, l + h),
            area_m2: (l + h) * WALL_HEIGHT_M,
        },
    ];

    let mut points = Vec::new();
    let mut segments = Vec::new();
    let mut id = 0u64;
    for rect in rects {
        let n = (rect.area_m2 * density).round() as u64;
        let start_id = id;
        for _ in 0..n {
            points.push(draw_point(seed, id, |u1, u2| {
                rect.origin + rect.run * u1 + Vector3::new(0.0, WALL_HEIGHT_M * (u2 - 0.5), 0.0)
            }));
            id += 1;
        }
        segments.push(SceneSegment { label: rect.label, start_id, end_id: id });
    }

    Ok(Scene { points, generator: SceneGenerator::Corridor(params), seed, segments })
}

// --- trajectories ---------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryKind {
    /// Poses on a line parallel to the wall at the given standoff, facing it.
    LineParallelToWall { offset_m: f64 },
    /// Poses along the corridor spine; `turn_index` is the pose at the first
    /// bend, where the viewing direction has just swung toward the far leg.
    CorridorTurn { turn_index: usize },
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub poses: Vec<Pose>,
    pub kind: TrajectoryKind,
}

impl Trajectory {
    /// The bend pose of a corridor trajectory.
    pub fn turn_pose(&self) -> Option<&Pose> {
        match self.kind {
            TrajectoryKind::CorridorTurn { turn_index } => self.poses.get(turn_index),
            _ => None,
        }
    }
}

fn face(position: Point3<f64>, forward: Vector3<f64>) -> Pose {
    Pose::from_forward_up(position, forward, Vector3::y()).expect("axis-aligned frames are valid")
}

/// `n_poses` cameras on the line z = offset_m, y = 0, evenly spread over the
/// central 90 % of the wall, all facing the wall plane z = 0.
pub fn make_wall_trajectory(length_m: f64, offset_m: f64, n_poses: usize) -> Trajectory {
    let lo = 0.05 * length_m;
    let hi = 0.95 * length_m;
    let poses = (0..n_poses)
        .map(|i| {
            let t = if n_poses == 1 { 0.5 } else { i as f64 / (n_poses - 1) as f64 };
            face(Point3::new(lo + (hi - lo) * t, 0.0, offset_m), Vector3::new(0.0, 0.0, -1.0))
        })
        .collect();
    Trajectory { poses, kind: TrajectoryKind::LineParallelToWall { offset_m } }
}

/// Poses along the U spine: up leg 1 facing +z, a bend pose at the first
/// corner facing +x (the turn pose), across the cross segment facing +x, a
/// second bend pose facing -z, and back down leg 2. Needs at least 5 poses.
pub fn make_corridor_trajectory(params: &CorridorParams, n_poses: usize) -> Result<Trajectory, SceneError> {
    if n_poses < 5 {
        return Err(SceneError::TooFewPoses(n_poses));
    }
    let l = params.leg_length_m;
    let d = params.separation_m;

    let interior = n_poses - 2; // poses not pinned to the two corners
    let total_arc = 2.0 * l + d;
    let n_leg = ((interior as f64) * l / total_arc).round().max(1.0) as usize;
    let n_cross = interior.saturating_sub(2 * n_leg).max(1);
    let n_leg2 = interior - n_leg - n_cross;

    let mut poses = Vec::with_capacity(n_poses);
    for i in 0..n_leg {
        let z = l * (i as f64 + 0.5) / n_leg as f64;
        poses.push(face(Point3::new(0.0, 0.0, z), Vector3::new(0.0, 0.0, 1.0)));
    }
    let turn_index = poses.len();
    poses.push(face(Point3::new(0.0, 0.0, l), Vector3::new(1.0, 0.0, 0.0)));
    for i in 0..n_cross {
        let x = d * (i as f64 + 0.5) / n_cross as f64;
        poses.push(face(Point3::new(x, 0.0, l), Vector3::new(1.0, 0.0, 0.0)));
    }
    poses.push(face(Point3::new(d, 0.0, l), Vector3::new(0.0, 0.0, -1.0)));
    for i in 0..n_leg2 {
        let z = l * (1.0 - (i as f64 + 0.5) / n_leg2 as f64);
        poses.push(face(Point3::new(d, 0.0, z), Vector3::new(0.0, 0.0, -1.0)));
    }

    Ok(Trajectory { poses, kind: TrajectoryKind::CorridorTurn { turn_index } })
}

// --- occlusion precondition -------------------------------------------------------

/// Voxel keys (at the given cell size) covering the points of one labeled wall.
pub fn label_voxel_keys(scene: &Scene, label: WallLabel, voxel_size: f64) -> HashSet<VoxelKey> {
    scene
        .segments
        .iter()
        .filter(|s| s.label == label)
        .flat_map(|s| s.start_id..s.end_id)
        .map(|id| voxel_key_for(&scene.points[id as usize].position, voxel_size))
        .collect()
}

/// Outcome of the generation-time geometry check at a corridor turn pose.
#[derive(Debug, Clone, Copy)]
pub struct OcclusionCheck {
    /// Template rays that cross a near-wall voxel before a far-wall voxel.
    pub qualifying_rays: usize,
    pub near_voxels: usize,
    pub far_voxels: usize,
}

impl OcclusionCheck {
    /// The occlusion experiment is meaningful only when at least one ray has
    /// something to suppress.
    pub fn holds(&self) -> bool {
        self.qualifying_rays >= 1
    }
}

/// Check that the corridor really occludes: from `turn_pose`, some template
/// ray must pass through a voxel of the `near` wall before reaching a voxel
/// of the `far` wall. Run at generation time so a bad parameterization fails
/// loudly instead of producing a vacuous experiment.
pub fn corridor_occlusion_precondition(
    scene: &Scene,
    template: &RayTemplate,
    turn_pose: &Pose,
    near: WallLabel,
    far: WallLabel,
) -> OcclusionCheck {
    let near_keys = label_voxel_keys(scene, near, template.voxel_size());
    let far_keys = label_voxel_keys(scene, far, template.voxel_size());
    OcclusionCheck {
        qualifying_rays: rays_seeing_near_before_far(template, turn_pose, &near_keys, &far_keys),
        near_voxels: near_keys.len(),
        far_voxels: far_keys.len(),
    }
}

// --- oracle ----------------------------------------------------------------------

/// Exact frustum visibility: every point whose projection lands inside the
/// image with depth in [d_min, d_max]. O(points) per call; this is the
/// reference the fast queries are measured against.
pub fn brute_force_visible<'a>(
    points: &'a [MapPoint],
    cam: &CameraModel,
    pose: &Pose,
    d_min: f64,
    d_max: f64,
) -> Vec<&'a MapPoint> {
    points
        .iter()
        .filter(|p| {
            project_point(cam, pose, &p.position)
                .map(|hit| hit.depth >= d_min && hit.depth <= d_max)
                .unwrap_or(false)
        })
        .collect()
}

//! A sparse 3D landmark store for visual SLAM front ends. Points live in
//! fixed-size cubic voxels addressed through spatial hashing, so inserting,
//! deleting, and cell lookup are independent of map size; camera-frustum
//! visibility is answered by casting a precomputed template of rays through
//! the grid, bounded by rays x samples instead of by the number of stored
//! points.
//!
//! The crate also ships the pieces needed to benchmark that claim: a
//! keyframe-bucketed baseline whose query cost grows with the map, synthetic
//! scene generators with deterministic scatter, an exact brute-force frustum
//! oracle, and plain-text persistence for maps and scenes.
//!
//! Concurrency contract: a map is plain data. Mutation requires `&mut
//! VoxelMap`; any number of threads may query a frozen map through `&`.

pub mod camera;
pub mod frustum;
pub mod keyframe;
pub mod map;
pub mod scene;
pub mod snapshot;

pub use camera::{project_point, projects_within_dilated_bounds, CameraModel, GeometryError, PixelDepth, Pose};
pub use frustum::{
    build_ray_template, count_points_behind_nearer_voxel, point_is_ray_occluded,
    query_visible, rays_seeing_near_before_far, FrustumError, RayTemplate, VisibleSet, VoxelHit,
};
pub use keyframe::{build_from_scene, Keyframe, KeyframeError, KeyframeMap, KeyframeVisibleSet};
pub use map::{
    hash_key, voxel_key_for, InsertOutcome, MapError, MapPoint, MapStats, Voxel, VoxelKey,
    VoxelMap, VoxelMapConfig, DEFAULT_PRIMES, DEFAULT_TABLE_SIZE, DEFAULT_VOXEL_SIZE,
};
pub use scene::{
    brute_force_visible, corridor_occlusion_precondition, label_voxel_keys, make_corridor_scene,
    make_corridor_trajectory, make_random_box_scene, make_wall_scene, make_wall_trajectory,
    regenerate, CorridorParams, OcclusionCheck, Scene, SceneError, SceneGenerator, SceneSegment,
    Trajectory, TrajectoryKind, WallLabel,
};
pub use snapshot::{load_scene, load_snapshot, save_scene, save_snapshot, SnapshotError};

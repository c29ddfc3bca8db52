//! Keyframe-bucketed baseline: points are attached to their nearest keyframe
//! and a visibility query frustum-tests the points of every keyframe in turn.
//! Work grows with the number of keyframes (hence with map size), which is
//! exactly the behaviour the voxel map is benchmarked against.

use nalgebra::Point3;

use crate::camera::{project_point, CameraModel, Pose};
use crate::map::MapPoint;

#[derive(Debug, thiserror::Error)]
pub enum KeyframeError {
    #[error("cannot build a keyframe map from an empty pose list")]
    NoPoses,
    #[error("{points} points exceed the total capacity of {keyframes} keyframes x {cap} points")]
    CapacityExceeded { points: usize, keyframes: usize, cap: usize },
    #[error("max_points_per_kf must be at least 1")]
    ZeroCapacity,
}

/// One keyframe: a camera pose and the points assigned to it (at most the
/// configured cap).
#[derive(Debug, Clone)]
pub struct Keyframe {
    pub pose: Pose,
    pub points: Vec<MapPoint>,
}

/// The baseline structure: a flat list of keyframes sharing one camera model.
#[derive(Debug, Clone)]
pub struct KeyframeMap {
    keyframes: Vec<Keyframe>,
    cam: CameraModel,
    max_points_per_kf: usize,
}

/// Result of a baseline visibility query. `keyframes_scanned` always equals
/// the total keyframe count: the scan has no index to cut it short.
#[derive(Debug, Clone)]
pub struct KeyframeVisibleSet<'m> {
    pub points: Vec<&'m MapPoint>,
    pub overlapping_keyframes: usize,
    pub keyframes_scanned: usize,
}

impl<'m> KeyframeVisibleSet<'m> {
    pub fn point_ids(&self) -> Vec<u64> {
        self.points.iter().map(|p| p.id).collect()
    }
}

/// Partition `points` over keyframes at `poses`: each point goes to the
/// keyframe with the nearest camera center, spilling to the next-nearest one
/// whenever the nearest is already at `max_points_per_kf`. Fails if the total
/// capacity cannot hold all points.
pub fn build_from_scene(
    points: &[MapPoint],
    poses: &[Pose],
    cam: CameraModel,
    max_points_per_kf: usize,
) -> Result<KeyframeMap, KeyframeError> {
    if poses.is_empty() {
        return Err(KeyframeError::NoPoses);
    }
    if max_points_per_kf == 0 {
        return Err(KeyframeError::ZeroCapacity);
    }
    if points.len() > poses.len() * max_points_per_kf {
        return Err(KeyframeError::CapacityExceeded {
            points: points.len(),
            keyframes: poses.len(),
            cap: max_points_per_kf,
        });
    }

    let centers: Vec<Point3<f64>> = poses.iter().map(|p| p.position()).collect();
    let mut keyframes: Vec<Keyframe> = poses
        .iter()
        .map(|pose| Keyframe { pose: pose.clone(), points: Vec::new() })
        .collect();

    let mut order: Vec<usize> = (0..centers.len()).collect();
    for point in points {
        // stable sort keeps assignment deterministic when distances tie
        order.sort_by(|&a, &b| {
            let da = (centers[a] - point.position).norm_squared();
            let db = (centers[b] - point.position).norm_squared();
            da.partial_cmp(&db).expect("finite distances")
        });
        let slot = order
            .iter()
            .copied()
            .find(|&k| keyframes[k].points.len() < max_points_per_kf)
            .expect("capacity checked above");
        keyframes[slot].points.push(point.clone());
    }

    Ok(KeyframeMap { keyframes, cam, max_points_per_kf })
}

impl KeyframeMap {
    pub fn keyframes(&self) -> &[Keyframe] {
        &self.keyframes
    }

    pub fn max_points_per_kf(&self) -> usize {
        self.max_points_per_kf
    }

    pub fn camera(&self) -> &CameraModel {
        &self.cam
    }

    pub fn point_count(&self) -> usize {
        self.keyframes.iter().map(|k| k.points.len()).sum()
    }

    /// Frustum-test every point of every keyframe against `query_pose` and
    /// return those whose projection lands inside the image with depth in
    /// [d_min, d_max]. No occlusion reasoning of any kind is applied.
    pub fn query_visible_kf(&self, query_pose: &Pose, d_min: f64, d_max: f64) -> KeyframeVisibleSet<'_> {
        let mut points = Vec::new();
        let mut overlapping = 0usize;
        for kf in &self.keyframes {
            let mut any = false;
            for p in &kf.points {
                if let Some(hit) = project_point(&self.cam, query_pose, &p.position) {
                    if hit.depth >= d_min && hit.depth <= d_max {
                        points.push(p);
                        any = true;
                    }
                }
            }
            if any {
                overlapping += 1;
            }
        }
        KeyframeVisibleSet { points, overlapping_keyframes: overlapping, keyframes_scanned: self.keyframes.len() }
    }
}

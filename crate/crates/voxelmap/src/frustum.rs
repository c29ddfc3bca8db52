//! Frustum visibility by raycasting: a pose-independent template of rays and
//! depth samples is precomputed in the camera frame, then at query time every
//! sample is transformed into the world frame and probed against the voxel
//! map, nearest samples first. Query cost is bounded by rays x samples and is
//! independent of map size.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use crate::camera::{CameraModel, Pose};
use crate::map::{MapPoint, VoxelKey, VoxelMap};

#[derive(Debug, thiserror::Error)]
pub enum FrustumError {
    #[error("depth range is invalid: d_min {d_min} must satisfy 0 < d_min < d_max ({d_max})")]
    InvalidDepthRange { d_min: f64, d_max: f64 },
    #[error("grid_step {0} must be finite and at least 1 pixel")]
    InvalidGridStep(f64),
    #[error("voxel_size {0} must be positive and finite")]
    InvalidVoxelSize(f64),
    #[error("pixel grid with step {grid_step} places no sample inside a {width}x{height} image")]
    NoRays { grid_step: f64, width: u32, height: u32 },
    #[error("template was built for voxel_size {template} but the map uses {map}")]
    VoxelSizeMismatch { template: f64, map: f64 },
}

/// Precomputed camera-frame sampling pattern: `rays` pixel rays, each carrying
/// `samples_per_ray` sample points ordered by increasing depth. Built once per
/// (camera, grid_step, depth range, voxel size) and reused across poses.
#[derive(Debug, Clone)]
pub struct RayTemplate {
    voxel_size: f64,
    d_min: f64,
    d_max: f64,
    rays: usize,
    samples_per_ray: usize,
    pixels: Vec<(f64, f64)>,
    samples: Vec<Vector3<f64>>, // rays * samples_per_ray, ray-major
}

/// Build the sampling template. Pixels sit at the centers of a regular
/// `grid_step`-spaced grid (anchored at grid_step/2); each pixel is
/// backprojected to its viewing direction and sampled at evenly spaced depths
/// from `d_min` to `d_max`. The per-ray sample count is the smallest one that
/// keeps the Euclidean gap between consecutive samples at or below
/// `voxel_size` on every ray, so a ray cannot step across a whole cell.
pub fn build_ray_template(
    cam: &CameraModel,
    grid_step: f64,
    d_min: f64,
    d_max: f64,
    voxel_size: f64,
) -> Result<RayTemplate, FrustumError> {
    if !(grid_step.is_finite() && grid_step >= 1.0) {
        return Err(FrustumError::InvalidGridStep(grid_step));
    }
    if !(voxel_size.is_finite() && voxel_size > 0.0) {
        return Err(FrustumError::InvalidVoxelSize(voxel_size));
    }
    if !(d_min.is_finite() && d_max.is_finite() && 0.0 < d_min && d_min < d_max) {
        return Err(FrustumError::InvalidDepthRange { d_min, d_max });
    }

    let mut pixels = Vec::new();
    let mut v = grid_step / 2.0;
    while v < cam.height as f64 {
        let mut u = grid_step / 2.0;
        while u < cam.width as f64 {
            pixels.push((u, v));
            u += grid_step;
        }
        v += grid_step;
    }
    if pixels.is_empty() {
        return Err(FrustumError::NoRays { grid_step, width: cam.width, height: cam.height });
    }

    // Depth here is camera-frame z, so consecutive samples on a ray are
    // separated by delta_d * |(mx, my, 1)|. The worst ray (largest direction
    // norm) dictates the shared sample count.
    let directions: Vec<Vector3<f64>> = pixels.iter().map(|&(u, v)| cam.backproject(u, v)).collect();
    let max_arc = directions.iter().map(|d| d.norm()).fold(0.0f64, f64::max);
    let span = d_max - d_min;
    let samples_per_ray = ((span * max_arc / voxel_size).ceil() as usize + 1).max(2);

    let mut samples = Vec::with_capacity(pixels.len() * samples_per_ray);
    for dir in &directions {
        for j in 0..samples_per_ray {
            let d = d_min + span * j as f64 / (samples_per_ray - 1) as f64;
            samples.push(dir * d);
        }
    }

    Ok(RayTemplate {
        voxel_size,
        d_min,
        d_max,
        rays: pixels.len(),
        samples_per_ray,
        pixels,
        samples,
    })
}

impl RayTemplate {
    pub fn rays(&self) -> usize {
        self.rays
    }

    pub fn samples_per_ray(&self) -> usize {
        self.samples_per_ray
    }

    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    pub fn voxel_size(&self) -> f64 {
        self.voxel_size
    }

    /// Sampled pixel centers, one per ray.
    pub fn pixels(&self) -> &[(f64, f64)] {
        &self.pixels
    }

    /// Camera-frame samples of one ray, ordered by increasing depth.
    pub fn ray_samples(&self, ray: usize) -> &[Vector3<f64>] {
        &self.samples[ray * self.samples_per_ray..(ray + 1) * self.samples_per_ray]
    }

    /// All camera-frame samples, ray-major.
    pub fn samples(&self) -> &[Vector3<f64>] {
        &self.samples
    }

    #[cfg(test)]
    fn with_reversed_rays(&self) -> RayTemplate {
        let mut t = self.clone();
        t.pixels.reverse();
        t.samples = self
            .samples
            .chunks_exact(self.samples_per_ray)
            .rev()
            .flatten()
            .copied()
            .collect();
        t
    }
}

/// One returned voxel: its grid key, the first ray that reached it, and
/// borrowed references to every point it holds.
#[derive(Debug, Clone)]
pub struct VoxelHit<'m> {
    pub key: VoxelKey,
    pub ray: usize,
    pub points: Vec<&'m MapPoint>,
}

/// Result of a frustum query: distinct voxels with their points, plus the
/// number of sample positions probed (bounded by rays x samples_per_ray, and
/// exactly that product when the first-hit early exit is disabled).
#[derive(Debug, Clone)]
pub struct VisibleSet<'m> {
    pub hits: Vec<VoxelHit<'m>>,
    pub probes: usize,
    pub rays: usize,
    pub samples_per_ray: usize,
}

impl<'m> VisibleSet<'m> {
    pub fn point_count(&self) -> usize {
        self.hits.iter().map(|h| h.points.len()).sum()
    }

    pub fn points(&self) -> impl Iterator<Item = &'m MapPoint> + '_ {
        self.hits.iter().flat_map(|h| h.points.iter().copied())
    }

    pub fn point_ids(&self) -> Vec<u64> {
        self.points().map(|p| p.id).collect()
    }

    /// Keys of the returned voxels; contains no duplicates by construction.
    pub fn voxel_keys(&self) -> Vec<VoxelKey> {
        self.hits.iter().map(|h| h.key).collect()
    }
}

/// Cast the template from `pose` against `map`. Samples are probed in
/// increasing depth order per ray; with `first_hit_only` a ray stops at its
/// first populated voxel, so cells behind it on that ray are treated as
/// occluded (rays are independent: another ray may still reach them). Every
/// voxel is returned at most once however many rays reach it, and each sample
/// position counts as one probe whether or not its cell repeats.
pub fn query_visible<'m>(
    map: &'m VoxelMap,
    template: &RayTemplate,
    pose: &Pose,
    first_hit_only: bool,
) -> Result<VisibleSet<'m>, FrustumError> {
    let map_voxel = map.config().voxel_size;
    if template.voxel_size != map_voxel {
        return Err(FrustumError::VoxelSizeMismatch { template: template.voxel_size, map: map_voxel });
    }

    // Cache of already probed keys: true = populated (and already returned).
    let mut seen: HashMap<VoxelKey, bool> = HashMap::new();
    let mut hits: Vec<VoxelHit<'m>> = Vec::new();
    let mut probes = 0usize;

    for ray in 0..template.rays {
        for sample in template.ray_samples(ray) {
            probes += 1;
            let world = pose.camera_to_world(&Point3::from(*sample));
            let key = map.key_for(&world);
            match seen.get(&key) {
                Some(true) => {
                    if first_hit_only {
                        break;
                    }
                }
                Some(false) => {}
                None => {
                    if let Some(voxel) = map.query_key(key) {
                        seen.insert(key, true);
                        hits.push(VoxelHit { key, ray, points: voxel.points().iter().collect() });
                        if first_hit_only {
                            break;
                        }
                    } else {
                        seen.insert(key, false);
                    }
                }
            }
        }
    }

    Ok(VisibleSet { hits, probes, rays: template.rays, samples_per_ray: template.samples_per_ray })
}

/// Re-walk the hit ray of every returned voxel and count the returned points
/// whose voxel is preceded, in depth order on that ray, by a different
/// populated voxel. Under a correct first-hit query this is zero; with the
/// early exit disabled it counts the points a first-hit query would suppress.
/// Walks the template directly, independent of the query's bookkeeping.
pub fn count_points_behind_nearer_voxel(
    map: &VoxelMap,
    template: &RayTemplate,
    pose: &Pose,
    set: &VisibleSet<'_>,
) -> usize {
    let mut occluded = 0usize;
    'hits: for hit in &set.hits {
        for sample in template.ray_samples(hit.ray) {
            let key = map.key_for(&pose.camera_to_world(&Point3::from(*sample)));
            if key == hit.key {
                continue 'hits; // reached the returned voxel with nothing in front
            }
            if map.query_key(key).is_some() {
                occluded += hit.points.len();
                continue 'hits;
            }
        }
    }
    occluded
}

/// Whether the straight ray from the camera center through `position` crosses
/// a different populated voxel before entering the cell containing
/// `position`. The walk starts at depth `d_start` and keeps its sample
/// spacing at or below the map's voxel size. Points at or nearer than
/// `d_start` (or behind the camera) cannot be occluded.
pub fn point_is_ray_occluded(map: &VoxelMap, pose: &Pose, position: &Point3<f64>, d_start: f64) -> bool {
    let voxel_size = map.config().voxel_size;
    let p_cam = pose.world_to_camera(position);
    if p_cam.z <= d_start {
        return false;
    }
    let dir = Vector3::new(p_cam.x / p_cam.z, p_cam.y / p_cam.z, 1.0);
    let span = p_cam.z - d_start;
    let steps = ((span * dir.norm() / voxel_size).ceil() as usize + 1).max(2);
    let target = map.key_for(position);
    for j in 0..steps {
        let d = d_start + span * j as f64 / (steps - 1) as f64;
        let world = pose.camera_to_world(&Point3::from(dir * d));
        let key = map.key_for(&world);
        if key == target {
            return false;
        }
        if map.query_key(key).is_some() {
            return true;
        }
    }
    false
}

/// Number of template rays that touch a voxel from `near_keys` strictly
/// before a voxel from `far_keys`, walking samples in depth order. A cell in
/// both sets counts as near. This is the geometric precondition for an
/// occlusion experiment: the first-hit rule only has something to suppress
/// when this count is positive.
pub fn rays_seeing_near_before_far(
    template: &RayTemplate,
    pose: &Pose,
    near_keys: &std::collections::HashSet<VoxelKey>,
    far_keys: &std::collections::HashSet<VoxelKey>,
) -> usize {
    (0..template.rays)
        .filter(|&ray| {
            let mut seen_near = false;
            for sample in template.ray_samples(ray) {
                let world = pose.camera_to_world(&Point3::from(*sample));
                let key = crate::map::voxel_key_for(&world, template.voxel_size);
                if near_keys.contains(&key) {
                    seen_near = true;
                } else if seen_near && far_keys.contains(&key) {
                    return true;
                }
            }
            false
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{MapPoint, VoxelMapConfig};

    /// Camera whose principal point sits exactly on the single sampled pixel
    /// when grid_step spans the whole image width (that pixel is at
    /// (step/2, step/2) = (320, 320)), giving one axis-aligned ray.
    fn centered_cam() -> CameraModel {
        CameraModel::new(525.0, 525.0, 320.0, 320.0, 640, 480).unwrap()
    }

    fn default_cam() -> CameraModel {
        CameraModel::new(525.0, 525.0, 319.5, 239.5, 640, 480).unwrap()
    }

    fn map_with(voxel_size: f64, positions: &[(f64, f64, f64)]) -> VoxelMap {
        let mut map = VoxelMap::new(VoxelMapConfig::with_voxel_size(voxel_size)).unwrap();
        for (i, &(x, y, z)) in positions.iter().enumerate() {
            map.insert_point(MapPoint::new(i as u64, Point3::new(x, y, z), vec![])).unwrap();
        }
        map
    }

    #[test]
    fn full_image_grid_step_yields_a_single_ray() {
        let t = build_ray_template(&centered_cam(), 640.0, 1.0, 9.0, 2.0).unwrap();
        assert_eq!(t.rays(), 1);
        assert_eq!(t.pixels(), &[(320.0, 320.0)]);
    }

    #[test]
    fn central_ray_samples_land_on_the_expected_depth_ladder() {
        // single axis-aligned ray, 8 m of depth span, 2 m cells => 5 samples
        // at depths 1, 3, 5, 7, 9 exactly
        let t = build_ray_template(&centered_cam(), 640.0, 1.0, 9.0, 2.0).unwrap();
        assert_eq!(t.samples_per_ray(), 5);
        let expected = [1.0, 3.0, 5.0, 7.0, 9.0];
        for (sample, d) in t.ray_samples(0).iter().zip(expected) {
            assert_eq!(*sample, Vector3::new(0.0, 0.0, d));
        }
    }

    #[test]
    fn default_grid_on_vga_yields_300_rays() {
        let t = build_ray_template(&default_cam(), 32.0, 0.5, 30.0, 2.0).unwrap();
        assert_eq!(t.rays(), 20 * 15);
        for &(u, v) in t.pixels() {
            assert!(u >= 0.0 && u < 640.0 && v >= 0.0 && v < 480.0, "pixel ({u},{v}) outside image");
        }
    }

    #[test]
    fn consecutive_samples_never_step_farther_than_one_cell() {
        let t = build_ray_template(&default_cam(), 32.0, 0.5, 30.0, 2.0).unwrap();
        for ray in 0..t.rays() {
            let s = t.ray_samples(ray);
            for w in s.windows(2) {
                let gap = (w[1] - w[0]).norm();
                assert!(gap <= 2.0 + 1e-12, "ray {ray} gap {gap}");
                assert!(w[1].z > w[0].z, "depths must increase along the ray");
            }
            assert!((s[0].z - 0.5).abs() < 1e-12);
            assert!((s[s.len() - 1].z - 30.0).abs() < 1e-12);
        }
    }

    #[test]
    fn template_construction_rejects_bad_parameters() {
        let cam = default_cam();
        assert!(matches!(
            build_ray_template(&cam, 32.0, 5.0, 5.0, 2.0),
            Err(FrustumError::InvalidDepthRange { .. })
        ));
        assert!(matches!(
            build_ray_template(&cam, 32.0, -1.0, 5.0, 2.0),
            Err(FrustumError::InvalidDepthRange { .. })
        ));
        assert!(matches!(
            build_ray_template(&cam, 0.5, 0.5, 30.0, 2.0),
            Err(FrustumError::InvalidGridStep(_))
        ));
        assert!(matches!(
            build_ray_template(&cam, 32.0, 0.5, 30.0, 0.0),
            Err(FrustumError::InvalidVoxelSize(_))
        ));
        // grid so coarse that no pixel center falls inside the image
        assert!(matches!(
            build_ray_template(&cam, 1300.0, 0.5, 30.0, 2.0),
            Err(FrustumError::NoRays { .. })
        ));
    }

    #[test]
    fn querying_an_empty_map_probes_every_sample_and_returns_nothing() {
        let map = VoxelMap::new(VoxelMapConfig::with_voxel_size(2.0)).unwrap();
        let t = build_ray_template(&default_cam(), 32.0, 0.5, 30.0, 2.0).unwrap();
        for first_hit in [false, true] {
            let set = query_visible(&map, &t, &Pose::identity(), first_hit).unwrap();
            assert!(set.hits.is_empty());
            assert_eq!(set.probes, t.rays() * t.samples_per_ray(), "no early exit possible");
        }
    }

    #[test]
    fn voxel_size_mismatch_is_a_configuration_error() {
        let map = VoxelMap::new(VoxelMapConfig::with_voxel_size(2.0)).unwrap();
        let t = build_ray_template(&default_cam(), 32.0, 0.5, 30.0, 1.0).unwrap();
        assert!(matches!(
            query_visible(&map, &t, &Pose::identity(), true),
            Err(FrustumError::VoxelSizeMismatch { .. })
        ));
    }

    #[test]
    fn first_hit_stops_at_the_near_plane_and_full_scan_reaches_both() {
        // two points straight ahead on the single central ray, 1 m cells
        let map = map_with(1.0, &[(0.2, 0.2, 5.5), (0.2, 0.2, 9.5)]);
        let t = build_ray_template(&centered_cam(), 640.0, 1.0, 12.0, 1.0).unwrap();
        let pose = Pose::identity();

        let first = query_visible(&map, &t, &pose, true).unwrap();
        assert_eq!(first.point_ids(), vec![0], "only the near point");
        assert!(first.probes < t.samples_per_ray(), "early exit must cut the ray short");

        let all = query_visible(&map, &t, &pose, false).unwrap();
        let mut ids = all.point_ids();
        ids.sort();
        assert_eq!(ids, vec![0, 1]);
        assert_eq!(all.probes, t.rays() * t.samples_per_ray());
    }

    #[test]
    fn no_returned_voxel_is_preceded_by_a_different_populated_voxel_on_its_ray() {
        let map = map_with(
            1.0,
            &[(0.2, 0.2, 5.5), (0.2, 0.2, 9.5), (-3.0, 1.0, 8.0), (2.5, -1.5, 4.0), (2.5, -1.5, 11.0)],
        );
        let t = build_ray_template(&default_cam(), 64.0, 1.0, 12.0, 1.0).unwrap();
        let pose = Pose::identity();
        let set = query_visible(&map, &t, &pose, true).unwrap();
        assert!(!set.hits.is_empty());
        // independent re-walk of each hit ray
        for hit in &set.hits {
            for sample in t.ray_samples(hit.ray) {
                let key = map.key_for(&pose.camera_to_world(&Point3::from(*sample)));
                if key == hit.key {
                    break; // reached the returned voxel without passing a populated one
                }
                assert!(
                    map.query_key(key).is_none(),
                    "voxel {:?} on ray {} precedes returned voxel {:?}",
                    key,
                    hit.ray,
                    hit.key
                );
            }
        }
    }

    #[test]
    fn a_voxel_reached_by_many_rays_is_returned_once() {
        // one fat cell in front of the camera; plenty of rays pass through it
        let map = map_with(10.0, &[(0.5, 0.5, 5.0), (1.0, -1.0, 6.0)]);
        let t = build_ray_template(&default_cam(), 32.0, 0.5, 30.0, 10.0).unwrap();
        let set = query_visible(&map, &t, &Pose::identity(), false).unwrap();
        let mut keys = set.voxel_keys();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), set.hits.len(), "duplicate voxel in result");
        assert_eq!(set.point_count(), 2);
        assert_eq!(set.probes, t.rays() * t.samples_per_ray());
    }

    #[test]
    fn every_returned_voxel_contains_a_probed_sample() {
        let map = map_with(2.0, &[(0.3, 0.1, 6.2), (-2.0, 1.0, 14.0), (4.0, -2.0, 22.0)]);
        let t = build_ray_template(&default_cam(), 32.0, 0.5, 30.0, 2.0).unwrap();
        let pose = Pose::from_forward_up(
            Point3::new(0.5, -0.5, -1.0),
            Vector3::new(0.05, 0.02, 1.0),
            Vector3::new(0.0, 1.0, 0.0),
        )
        .unwrap();
        let set = query_visible(&map, &t, &pose, false).unwrap();
        assert!(!set.hits.is_empty());
        let sample_keys: std::collections::HashSet<_> = t
            .samples()
            .iter()
            .map(|s| map.key_for(&pose.camera_to_world(&Point3::from(*s))))
            .collect();
        for hit in &set.hits {
            assert!(sample_keys.contains(&hit.key));
        }
    }

    #[test]
    fn rewalking_hit_rays_confirms_first_hit_suppression() {
        // two plane-like points straight ahead: one cell at z~5, one at z~9
        let map = map_with(1.0, &[(0.2, 0.2, 5.5), (0.2, 0.2, 9.5)]);
        let t = build_ray_template(&centered_cam(), 640.0, 1.0, 12.0, 1.0).unwrap();
        let pose = Pose::identity();
        let first = query_visible(&map, &t, &pose, true).unwrap();
        assert_eq!(count_points_behind_nearer_voxel(&map, &t, &pose, &first), 0);
        let all = query_visible(&map, &t, &pose, false).unwrap();
        assert_eq!(
            count_points_behind_nearer_voxel(&map, &t, &pose, &all),
            1,
            "exactly the far point sits behind a populated cell"
        );
    }

    #[test]
    fn straight_ray_occlusion_walker_matches_the_toy_geometry() {
        let map = map_with(1.0, &[(0.2, 0.2, 5.5), (0.2, 0.2, 9.5), (0.4, 0.2, 5.6)]);
        let pose = Pose::identity();
        assert!(!point_is_ray_occluded(&map, &pose, &Point3::new(0.2, 0.2, 5.5), 0.5));
        assert!(point_is_ray_occluded(&map, &pose, &Point3::new(0.2, 0.2, 9.5), 0.5));
        // points sharing a voxel do not occlude each other
        assert!(!point_is_ray_occluded(&map, &pose, &Point3::new(0.4, 0.2, 5.6), 0.5));
        // behind the camera or nearer than the walk start: never occluded
        assert!(!point_is_ray_occluded(&map, &pose, &Point3::new(0.0, 0.0, -3.0), 0.5));
        assert!(!point_is_ray_occluded(&map, &pose, &Point3::new(0.0, 0.0, 0.3), 0.5));
    }

    #[test]
    fn near_before_far_ray_census_sees_the_two_plane_stack() {
        use std::collections::HashSet;
        let map = map_with(1.0, &[(0.2, 0.2, 5.5), (0.2, 0.2, 9.5)]);
        let t = build_ray_template(&centered_cam(), 640.0, 1.0, 12.0, 1.0).unwrap();
        let pose = Pose::identity();
        let near: HashSet<_> = [map.key_for(&Point3::new(0.2, 0.2, 5.5))].into_iter().collect();
        let far: HashSet<_> = [map.key_for(&Point3::new(0.2, 0.2, 9.5))].into_iter().collect();
        assert_eq!(rays_seeing_near_before_far(&t, &pose, &near, &far), 1);
        // swapped sets: nothing lies behind the far plane
        assert_eq!(rays_seeing_near_before_far(&t, &pose, &far, &near), 0);
    }

    #[test]
    fn result_set_does_not_depend_on_ray_enumeration_order() {
        let map = map_with(
            1.0,
            &[(0.2, 0.2, 5.5), (0.2, 0.2, 9.5), (-3.0, 1.0, 8.0), (2.5, -1.5, 4.0), (1.0, 2.0, 7.0)],
        );
        let t = build_ray_template(&default_cam(), 48.0, 1.0, 12.0, 1.0).unwrap();
        let reversed = t.with_reversed_rays();
        let pose = Pose::identity();
        for first_hit in [true, false] {
            let a = query_visible(&map, &t, &pose, first_hit).unwrap();
            let b = query_visible(&map, &reversed, &pose, first_hit).unwrap();
            let (mut ka, mut kb) = (a.voxel_keys(), b.voxel_keys());
            ka.sort();
            kb.sort();
            assert_eq!(ka, kb);
            assert_eq!(a.probes, b.probes, "probe count is a per-ray sum, order cannot matter");
        }
    }
}

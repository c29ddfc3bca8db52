//! Minimal end-to-end use: build a map, cast the default ray template from
//! the origin, and show first-hit occlusion. Mirrors the README quick start.

use nalgebra::Point3;
use voxelmap::{
    build_ray_template, query_visible, CameraModel, MapPoint, Pose, VoxelMap, VoxelMapConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 0.5 m voxels, default bucket-table size.
    let mut map = VoxelMap::new(VoxelMapConfig { voxel_size: 0.5, ..Default::default() })?;
    map.insert_point(MapPoint::new(1, Point3::new(0.1, 0.0, 3.0), vec![0xAB]))?;
    map.insert_point(MapPoint::new(2, Point3::new(0.2, 0.1, 9.0), vec![0xEF]))?; // behind point 1

    // VGA pinhole camera; one ray every 32 px, samples from 0.5 m to 30 m.
    let cam = CameraModel::new(525.0, 525.0, 319.5, 239.5, 640, 480)?;
    let template = build_ray_template(&cam, 32.0, 0.5, 30.0, map.config().voxel_size)?;

    // Camera at the origin looking down +z.
    let visible = query_visible(&map, &template, &Pose::identity(), true)?;

    assert!(visible.point_ids().contains(&1));
    assert!(!visible.point_ids().contains(&2)); // its voxel sits behind point 1's on every ray
    println!(
        "returned {} point(s), probes: {} (<= rays x samples = {})",
        visible.point_count(),
        visible.probes,
        template.rays() * template.samples_per_ray()
    );
    Ok(())
}

//! The four experiments. Each builds its scene(s) and map(s) from the
//! config, runs one untimed warm-up pass to collect the non-timing fields,
//! then times `repeats` passes and reports median and mean nanoseconds per
//! query. Threshold checks are always computed; `--check` decides whether a
//! failed check changes the exit code.

use std::collections::HashSet;
use std::time::Instant;

use nalgebra::{Point3, Vector3};
use voxelmap::camera::{projects_within_dilated_bounds, GeometryError, Pose};
use voxelmap::frustum::{
    build_ray_template, count_points_behind_nearer_voxel, point_is_ray_occluded, query_visible,
    FrustumError, RayTemplate, VisibleSet,
};
use voxelmap::keyframe::{build_from_scene, KeyframeError};
use voxelmap::map::{MapError, VoxelMap};
use voxelmap::scene::{
    brute_force_visible, corridor_occlusion_precondition, make_corridor_scene,
    make_corridor_trajectory, make_random_box_scene, make_wall_scene, make_wall_trajectory, mix,
    unit_f64, Scene, SceneError, WallLabel,
};

use crate::config::BenchConfig;
use crate::records::{
    gp_data, points_csv, BenchRecord, CheckResult, GpBlock, MapKind, PointRow,
};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Frustum(#[from] FrustumError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Keyframe(#[from] KeyframeError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("occlusion precondition failed: {0}")]
    Precondition(String),
}

/// Everything one experiment produces: summary rows, gnuplot data, extra
/// files (per-point CSVs), and its threshold checks.
#[derive(Debug)]
pub struct RunOutput {
    pub records: Vec<BenchRecord>,
    pub gp: String,
    pub aux_files: Vec<(String, String)>,
    pub checks: Vec<CheckResult>,
}

fn time_ns<R>(f: impl FnOnce() -> R) -> u128 {
    let t0 = Instant::now();
    let r = f();
    let ns = t0.elapsed().as_nanos();
    std::hint::black_box(&r);
    ns
}

fn median_mean(samples: &mut [u128]) -> (u128, u128) {
    if samples.is_empty() {
        return (0, 0);
    }
    samples.sort_unstable();
    let n = samples.len();
    let median =
        if n % 2 == 1 { samples[n / 2] } else { (samples[n / 2 - 1] + samples[n / 2]) / 2 };
    let mean = samples.iter().sum::<u128>() / n as u128;
    (median, mean)
}

fn ratio(numerator: u128, denominator: u128) -> f64 {
    if denominator == 0 {
        if numerator == 0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        numerator as f64 / denominator as f64
    }
}

/// Recall of `got` against the oracle; an empty oracle counts as fully
/// recalled by convention.
pub fn recall_of(got: &HashSet<u64>, oracle: &HashSet<u64>) -> f64 {
    if oracle.is_empty() {
        return 1.0;
    }
    got.intersection(oracle).count() as f64 / oracle.len() as f64
}

/// Precision of `got` against the oracle; an empty result is vacuously
/// precise by convention.
pub fn precision_of(got: &HashSet<u64>, oracle: &HashSet<u64>) -> f64 {
    if got.is_empty() {
        return 1.0;
    }
    got.intersection(oracle).count() as f64 / got.len() as f64
}

const POSE_SALT: u64 = 0xA5A5_5A5A_C0FF_EE01;

/// Deterministic near-origin camera: up to ±1 m of lateral offset and ±0.15
/// rad of yaw around +z, drawn from a counter stream decorrelated from the
/// scene scatter.
pub fn jittered_pose(seed: u64, k: u64) -> Pose {
    let s = mix(seed, POSE_SALT);
    let jx = 2.0 * (unit_f64(s, 3 * k) - 0.5);
    let jy = 1.0 * (unit_f64(s, 3 * k + 1) - 0.5);
    let yaw = 0.3 * (unit_f64(s, 3 * k + 2) - 0.5);
    Pose::from_forward_up(
        Point3::new(jx, jy, 0.0),
        Vector3::new(yaw.sin(), 0.0, yaw.cos()),
        Vector3::y(),
    )
    .expect("small yaw about +z keeps the frame orthonormal")
}

fn fill_map(map: &mut VoxelMap, scene: &Scene) -> Result<(), MapError> {
    for p in &scene.points {
        map.insert_point(p.clone())?;
    }
    Ok(())
}

fn camera_depth(pose: &Pose, position: &Point3<f64>) -> f64 {
    pose.world_to_camera(position).z
}

// --- scaling -----------------------------------------------------------------------

/// Wall sweep: one scene per (length, point-count) step, both map kinds
/// queried from the same poses. The keyframe map gets as many frames as its
/// per-frame capacity requires, so it grows with the scene the way a
/// keyframe-based map does.
pub fn run_scaling(cfg: &BenchConfig) -> Result<RunOutput, BenchError> {
    let cam = cfg.camera()?;
    let template = build_ray_template(&cam, cfg.grid_step, cfg.d_min, cfg.d_max, cfg.voxel_size)?;
    let first_hit = cfg.first_hit_only.unwrap_or(false);

    let mut records = Vec::new();
    let mut voxel_rows = Vec::new();
    let mut kf_rows = Vec::new();

    for (step, (&length, &n_points)) in
        cfg.wall_lengths_m.iter().zip(&cfg.wall_points).enumerate()
    {
        let scene = make_wall_scene(length, n_points, cfg.seed.wrapping_add(step as u64))?;
        let queries = make_wall_trajectory(length, cfg.wall_offset_m, cfg.n_query_poses);

        // voxel map
        let mut map = cfg.map_with_voxel_size(cfg.voxel_size)?;
        fill_map(&mut map, &scene)?;
        let mut probes = 0usize;
        for pose in &queries.poses {
            let set = query_visible(&map, &template, pose, first_hit)?;
            probes = probes.max(set.probes);
        }
        let mut samples = Vec::with_capacity(cfg.repeats * queries.poses.len());
        for _ in 0..cfg.repeats {
            for pose in &queries.poses {
                samples.push(time_ns(|| {
                    query_visible(&map, &template, pose, first_hit).expect("warmed-up query")
                }));
            }
        }
        let (median, mean) = median_mean(&mut samples);
        records.push(BenchRecord {
            experiment: "scaling",
            map_kind: MapKind::Voxel,
            map_size: n_points,
            voxel_size: Some(cfg.voxel_size),
            query_time_ns_median: median,
            query_time_ns_mean: mean,
            probes: Some(probes),
            keyframes_scanned: None,
            recall: None,
            precision: None,
            occluded_points_returned: None,
        });
        voxel_rows.push(vec![n_points as f64, median as f64, mean as f64]);

        // keyframe baseline, sized to hold the same points at its capacity cap
        let n_kf = n_points.div_ceil(cfg.max_points_per_kf).max(1);
        let kf_poses = make_wall_trajectory(length, cfg.wall_offset_m, n_kf);
        let kf_map = build_from_scene(&scene.points, &kf_poses.poses, cam.clone(), cfg.max_points_per_kf)?;
        let mut scanned = 0usize;
        for pose in &queries.poses {
            let set = kf_map.query_visible_kf(pose, cfg.d_min, cfg.d_max);
            scanned = scanned.max(set.keyframes_scanned);
        }
        let mut samples = Vec::with_capacity(cfg.repeats * queries.poses.len());
        for _ in 0..cfg.repeats {
            for pose in &queries.poses {
                samples.push(time_ns(|| kf_map.query_visible_kf(pose, cfg.d_min, cfg.d_max)));
            }
        }
        let (median, mean) = median_mean(&mut samples);
        records.push(BenchRecord {
            experiment: "scaling",
            map_kind: MapKind::Keyframe,
            map_size: n_points,
            voxel_size: None,
            query_time_ns_median: median,
            query_time_ns_mean: mean,
            probes: None,
            keyframes_scanned: Some(scanned),
            recall: None,
            precision: None,
            occluded_points_returned: None,
        });
        kf_rows.push(vec![n_points as f64, median as f64, mean as f64]);
    }

    let checks = scaling_checks(&records);
    let gp = gp_data(
        "query time vs map size (wall sweep)",
        &[
            GpBlock {
                label: "voxel map".into(),
                columns: "map_size median_ns mean_ns",
                rows: voxel_rows,
            },
            GpBlock {
                label: "keyframe baseline".into(),
                columns: "map_size median_ns mean_ns",
                rows: kf_rows,
            },
        ],
    );
    Ok(RunOutput { records, gp, aux_files: Vec::new(), checks })
}

fn scaling_checks(records: &[BenchRecord]) -> Vec<CheckResult> {
    let by_kind = |kind: MapKind| -> Vec<&BenchRecord> {
        records.iter().filter(|r| r.map_kind == kind).collect()
    };
    let extremes = |rows: &[&BenchRecord]| -> Option<(u128, u128)> {
        let smallest = rows.iter().min_by_key(|r| r.map_size)?;
        let largest = rows.iter().max_by_key(|r| r.map_size)?;
        Some((smallest.query_time_ns_median, largest.query_time_ns_median))
    };

    let voxel = by_kind(MapKind::Voxel);
    let kf = by_kind(MapKind::Keyframe);
    let mut checks = Vec::new();

    if let Some((small, large)) = extremes(&voxel) {
        let r = ratio(large, small);
        checks.push(CheckResult {
            name: "voxel query time stays flat across map sizes",
            passed: r <= 1.5,
            detail: format!("largest/smallest median ratio {r:.3} (need <= 1.5)"),
        });
    }
    let probe_values: Vec<Option<usize>> = voxel.iter().map(|r| r.probes).collect();
    let all_probes_equal = probe_values.windows(2).all(|w| w[0] == w[1]);
    checks.push(CheckResult {
        name: "voxel probes identical across map sizes",
        passed: all_probes_equal,
        detail: format!("probes per query: {probe_values:?}"),
    });
    if let Some((small, large)) = extremes(&kf) {
        let r = ratio(large, small);
        checks.push(CheckResult {
            name: "keyframe query time grows with map size",
            passed: r >= 5.0,
            detail: format!("largest/smallest median ratio {r:.3} (need >= 5)"),
        });
    }
    checks
}

// --- occlusion ---------------------------------------------------------------------

/// The walls facing each other across the corridor bend: the inner crossing
/// wall sits in front of the far leg's outer wall for a camera at the first
/// corner looking down the crossing.
pub const NEAR_WALL: WallLabel = WallLabel::CrossInner;
pub const FAR_WALL: WallLabel = WallLabel::Leg2Outer;

/// Corridor turn: the voxel map is walked with and without the first-hit
/// rule and the keyframe baseline is queried at the same pose; per-point
/// CSVs carry depths for scatter plots. The record pair uses the configured
/// walk (first-hit on unless overridden) for the voxel row.
pub fn run_occlusion(cfg: &BenchConfig) -> Result<RunOutput, BenchError> {
    let cam = cfg.camera()?;
    let template = build_ray_template(&cam, cfg.grid_step, cfg.d_min, cfg.d_max, cfg.voxel_size)?;
    let params = cfg.corridor_params();
    let scene = make_corridor_scene(params.clone(), cfg.seed)?;
    let trajectory = make_corridor_trajectory(&params, cfg.corridor_poses)?;
    let turn = trajectory.turn_pose().expect("corridor trajectories have a turn pose").clone();

    if !scene.points.is_empty() {
        let check = corridor_occlusion_precondition(&scene, &template, &turn, NEAR_WALL, FAR_WALL);
        if !check.holds() {
            return Err(BenchError::Precondition(format!(
                "no template ray crosses a near-wall voxel before a far-wall voxel at the turn \
                 pose (near voxels: {}, far voxels: {}); adjust the corridor geometry, depth \
                 range, or grid step",
                check.near_voxels, check.far_voxels
            )));
        }
    }

    let mut map = cfg.map_with_voxel_size(cfg.voxel_size)?;
    fill_map(&mut map, &scene)?;
    let n_kf = cfg.corridor_poses.max(scene.points.len().div_ceil(cfg.max_points_per_kf));
    let kf_poses = make_corridor_trajectory(&params, n_kf)?;
    let kf_map = build_from_scene(&scene.points, &kf_poses.poses, cam, cfg.max_points_per_kf)?;

    let first_hit = cfg.first_hit_only.unwrap_or(true);
    let set_cfg = query_visible(&map, &template, &turn, first_hit)?;
    let set_first = query_visible(&map, &template, &turn, true)?;
    let set_all = query_visible(&map, &template, &turn, false)?;
    let kf_set = kf_map.query_visible_kf(&turn, cfg.d_min, cfg.d_max);

    let occluded_voxel = count_points_behind_nearer_voxel(&map, &template, &turn, &set_cfg);
    let occluded_first = count_points_behind_nearer_voxel(&map, &template, &turn, &set_first);
    let kf_occluded = kf_set
        .points
        .iter()
        .filter(|p| point_is_ray_occluded(&map, &turn, &p.position, cfg.d_min))
        .count();

    let far_ids: HashSet<u64> = scene.ids_with_label(FAR_WALL).into_iter().collect();
    let count_far = |ids: &[u64]| ids.iter().filter(|id| far_ids.contains(id)).count();
    let far_first = count_far(&set_first.point_ids());
    let far_all = count_far(&set_all.point_ids());
    let far_kf = count_far(&kf_set.point_ids());

    // timings at the turn pose only
    let mut samples: Vec<u128> = (0..cfg.repeats)
        .map(|_| time_ns(|| query_visible(&map, &template, &turn, first_hit).expect("warmed-up query")))
        .collect();
    let (v_median, v_mean) = median_mean(&mut samples);
    let mut samples: Vec<u128> = (0..cfg.repeats)
        .map(|_| time_ns(|| kf_map.query_visible_kf(&turn, cfg.d_min, cfg.d_max)))
        .collect();
    let (k_median, k_mean) = median_mean(&mut samples);

    let records = vec![
        BenchRecord {
            experiment: "occlusion",
            map_kind: MapKind::Voxel,
            map_size: scene.points.len(),
            voxel_size: Some(cfg.voxel_size),
            query_time_ns_median: v_median,
            query_time_ns_mean: v_mean,
            probes: Some(set_cfg.probes),
            keyframes_scanned: None,
            recall: None,
            precision: None,
            occluded_points_returned: Some(occluded_voxel),
        },
        BenchRecord {
            experiment: "occlusion",
            map_kind: MapKind::Keyframe,
            map_size: scene.points.len(),
            voxel_size: None,
            query_time_ns_median: k_median,
            query_time_ns_mean: k_mean,
            probes: None,
            keyframes_scanned: Some(kf_set.keyframes_scanned),
            recall: None,
            precision: None,
            occluded_points_returned: Some(kf_occluded),
        },
    ];

    let voxel_rows = |set: &VisibleSet<'_>| -> Vec<PointRow> {
        set.hits
            .iter()
            .flat_map(|h| {
                h.points.iter().map(|p| PointRow {
                    ray_id: Some(h.ray),
                    voxel: Some(h.key),
                    point_id: p.id,
                    depth: camera_depth(&turn, &p.position),
                })
            })
            .collect()
    };
    let kf_rows: Vec<PointRow> = kf_set
        .points
        .iter()
        .map(|p| PointRow {
            ray_id: None,
            voxel: None,
            point_id: p.id,
            depth: camera_depth(&turn, &p.position),
        })
        .collect();
    let rows_first = voxel_rows(&set_first);
    let rows_all = voxel_rows(&set_all);

    let depth_block = |label: &str, rows: &[PointRow]| GpBlock {
        label: label.to_string(),
        columns: "depth",
        rows: rows.iter().map(|r| vec![r.depth]).collect(),
    };
    let gp = gp_data(
        "returned-point depths at the corridor turn",
        &[
            depth_block("voxel map, first hit", &rows_first),
            depth_block("voxel map, all samples", &rows_all),
            depth_block("keyframe baseline", &kf_rows),
        ],
    );
    let aux_files = vec![
        ("points_voxel_first_hit.csv".to_string(), points_csv(&rows_first)),
        ("points_voxel_all_samples.csv".to_string(), points_csv(&rows_all)),
        ("points_keyframe.csv".to_string(), points_csv(&kf_rows)),
    ];

    let empty = scene.points.is_empty();
    let checks = vec![
        CheckResult {
            name: "first-hit walk returns no point behind a nearer populated voxel",
            passed: occluded_first == 0,
            detail: format!("{occluded_first} occluded points returned"),
        },
        CheckResult {
            name: "keyframe scan returns far-wall points despite the occluder",
            passed: empty || far_kf >= 1,
            detail: if empty {
                "vacuous: empty scene".to_string()
            } else {
                format!("{far_kf} far-wall points returned ({kf_occluded} ray-occluded overall)")
            },
        },
        CheckResult {
            name: "disabling first-hit reveals the suppressed far-wall points",
            passed: empty || far_all > far_first,
            detail: if empty {
                "vacuous: empty scene".to_string()
            } else {
                format!("far-wall points: {far_first} with first hit, {far_all} without")
            },
        },
    ];

    Ok(RunOutput { records, gp, aux_files, checks })
}

// --- voxel-size sweep --------------------------------------------------------------

/// One fixed random-box scene queried from a fixed pose set at each voxel
/// size; time, recall, and precision per size against the exhaustive oracle.
pub fn run_voxel_size_sweep(cfg: &BenchConfig) -> Result<RunOutput, BenchError> {
    let cam = cfg.camera()?;
    let scene = make_random_box_scene(cfg.box_min, cfg.box_max, cfg.box_count, cfg.seed)?;
    let poses: Vec<Pose> = (0..cfg.n_query_poses as u64).map(|k| jittered_pose(cfg.seed, k)).collect();
    let first_hit = cfg.first_hit_only.unwrap_or(false);

    let oracles: Vec<HashSet<u64>> = poses
        .iter()
        .map(|pose| {
            brute_force_visible(&scene.points, &cam, pose, cfg.d_min, cfg.d_max)
                .iter()
                .map(|p| p.id)
                .collect()
        })
        .collect();

    let mut records = Vec::new();
    let mut rows = Vec::new();
    for &voxel_size in &cfg.sweep_voxel_sizes {
        let template = build_ray_template(&cam, cfg.grid_step, cfg.d_min, cfg.d_max, voxel_size)?;
        let mut map = cfg.map_with_voxel_size(voxel_size)?;
        fill_map(&mut map, &scene)?;

        let mut probes = 0usize;
        let mut recall_sum = 0.0;
        let mut precision_sum = 0.0;
        for (pose, oracle) in poses.iter().zip(&oracles) {
            let set = query_visible(&map, &template, pose, first_hit)?;
            probes = probes.max(set.probes);
            let got: HashSet<u64> = set.points().map(|p| p.id).collect();
            recall_sum += recall_of(&got, oracle);
            precision_sum += precision_of(&got, oracle);
        }
        let recall = recall_sum / poses.len() as f64;
        let precision = precision_sum / poses.len() as f64;

        let mut samples = Vec::with_capacity(cfg.repeats * poses.len());
        for _ in 0..cfg.repeats {
            for pose in &poses {
                samples.push(time_ns(|| {
                    query_visible(&map, &template, pose, first_hit).expect("warmed-up query")
                }));
            }
        }
        let (median, mean) = median_mean(&mut samples);
        records.push(BenchRecord {
            experiment: "voxel-sweep",
            map_kind: MapKind::Voxel,
            map_size: scene.points.len(),
            voxel_size: Some(voxel_size),
            query_time_ns_median: median,
            query_time_ns_mean: mean,
            probes: Some(probes),
            keyframes_scanned: None,
            recall: Some(recall),
            precision: Some(precision),
            occluded_points_returned: None,
        });
        rows.push(vec![voxel_size, median as f64, mean as f64, recall, precision]);
    }

    let checks = sweep_checks(&records);
    let gp = gp_data(
        "query time and oracle fidelity vs voxel size",
        &[GpBlock {
            label: "voxel map".into(),
            columns: "voxel_size median_ns mean_ns recall precision",
            rows,
        }],
    );
    Ok(RunOutput { records, gp, aux_files: Vec::new(), checks })
}

fn sweep_checks(records: &[BenchRecord]) -> Vec<CheckResult> {
    let at = |size: f64| -> Option<&BenchRecord> {
        records.iter().find(|r| r.voxel_size.is_some_and(|v| (v - size).abs() < 1e-9))
    };
    let mut checks = Vec::new();
    match (at(0.5), at(5.0)) {
        (Some(tiny), Some(mid)) => checks.push(CheckResult {
            name: "tiny voxels query slower than mid-size voxels",
            passed: tiny.query_time_ns_median > mid.query_time_ns_median,
            detail: format!(
                "median {} ns at 0.5 m vs {} ns at 5 m",
                tiny.query_time_ns_median, mid.query_time_ns_median
            ),
        }),
        _ => checks.push(CheckResult {
            name: "tiny voxels query slower than mid-size voxels",
            passed: true,
            detail: "not applicable: sweep does not include both 0.5 m and 5 m".into(),
        }),
    }
    match (at(20.0), at(5.0)) {
        (Some(huge), Some(mid)) => {
            let hp = huge.precision.unwrap_or(1.0);
            let mp = mid.precision.unwrap_or(1.0);
            checks.push(CheckResult {
                name: "huge voxels lose precision to out-of-view points",
                passed: hp < mp,
                detail: format!("precision {hp:.4} at 20 m vs {mp:.4} at 5 m"),
            });
        }
        _ => checks.push(CheckResult {
            name: "huge voxels lose precision to out-of-view points",
            passed: true,
            detail: "not applicable: sweep does not include both 20 m and 5 m".into(),
        }),
    }
    checks
}

// --- recall ------------------------------------------------------------------------

/// Randomized (scene, pose) pairs at the default template parameters: recall
/// and precision against the exhaustive oracle per pair, plus a containment
/// check that every returned point projects inside the dilated image bounds.
pub fn run_recall(cfg: &BenchConfig) -> Result<RunOutput, BenchError> {
    let cam = cfg.camera()?;
    let template = build_ray_template(&cam, cfg.grid_step, cfg.d_min, cfg.d_max, cfg.voxel_size)?;
    let first_hit = cfg.first_hit_only.unwrap_or(false);
    let margin = cfg.dilation_margin_px();

    let mut records = Vec::new();
    let mut rows = Vec::new();
    let mut recall_sum = 0.0;
    let mut out_of_bounds = 0usize;

    for pair in 0..cfg.recall_pairs {
        let pair_seed = cfg.seed.wrapping_add(pair as u64);
        let scene = make_random_box_scene(cfg.box_min, cfg.box_max, cfg.box_count, pair_seed)?;
        let pose = jittered_pose(pair_seed, 0);
        let mut map = cfg.map_with_voxel_size(cfg.voxel_size)?;
        fill_map(&mut map, &scene)?;

        let oracle: HashSet<u64> = brute_force_visible(&scene.points, &cam, &pose, cfg.d_min, cfg.d_max)
            .iter()
            .map(|p| p.id)
            .collect();

        let set = query_visible(&map, &template, &pose, first_hit)?;
        let got: HashSet<u64> = set.points().map(|p| p.id).collect();
        let recall = recall_of(&got, &oracle);
        let precision = precision_of(&got, &oracle);
        recall_sum += recall;
        out_of_bounds += set
            .points()
            .filter(|p| !projects_within_dilated_bounds(&cam, &pose, &p.position, margin))
            .count();

        let mut samples: Vec<u128> = (0..cfg.repeats)
            .map(|_| {
                time_ns(|| query_visible(&map, &template, &pose, first_hit).expect("warmed-up query"))
            })
            .collect();
        let (median, mean) = median_mean(&mut samples);
        records.push(BenchRecord {
            experiment: "recall",
            map_kind: MapKind::Voxel,
            map_size: scene.points.len(),
            voxel_size: Some(cfg.voxel_size),
            query_time_ns_median: median,
            query_time_ns_mean: mean,
            probes: Some(set.probes),
            keyframes_scanned: None,
            recall: Some(recall),
            precision: Some(precision),
            occluded_points_returned: None,
        });
        rows.push(vec![pair as f64, recall, precision]);
    }

    let mean_recall = recall_sum / cfg.recall_pairs as f64;
    let checks = vec![
        CheckResult {
            name: "mean recall against the exhaustive oracle",
            passed: mean_recall >= 0.95,
            detail: format!("mean recall {mean_recall:.4} over {} pairs (need >= 0.95)", cfg.recall_pairs),
        },
        CheckResult {
            name: "every returned point projects inside the dilated image bounds",
            passed: out_of_bounds == 0,
            detail: format!("{out_of_bounds} points outside a {margin:.1} px margin"),
        },
    ];
    let gp = gp_data(
        "oracle recall and precision per randomized pair",
        &[GpBlock { label: "voxel map".into(), columns: "pair recall precision", rows }],
    );
    Ok(RunOutput { records, gp, aux_files: Vec::new(), checks })
}

/// Template the experiments share for the configured camera and voxel size;
/// exposed so callers can reason about expected probe counts (rays x samples).
pub fn default_template(cfg: &BenchConfig) -> Result<RayTemplate, BenchError> {
    let cam = cfg.camera()?;
    Ok(build_ray_template(&cam, cfg.grid_step, cfg.d_min, cfg.d_max, cfg.voxel_size)?)
}

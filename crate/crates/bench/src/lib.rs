//! Benchmark harness for the voxel map: query-time scaling against a
//! keyframe baseline, occlusion behaviour at a corridor turn, a voxel-size
//! sensitivity sweep, and recall/precision against an exhaustive oracle.
//! The `bench` binary drives these from a key=value config file; the library
//! surface exists so tests can run the same experiments in-process.

pub mod config;
pub mod experiments;
pub mod records;

pub use config::{load_config, parse_config, BenchConfig, ConfigError};
pub use experiments::{
    default_template, jittered_pose, precision_of, recall_of, run_occlusion, run_recall,
    run_scaling, run_voxel_size_sweep, BenchError, RunOutput, FAR_WALL, NEAR_WALL,
};
pub use records::{
    gp_data, points_csv, summary_csv, BenchRecord, CheckResult, GpBlock, MapKind, PointRow,
    POINT_HEADER, SUMMARY_HEADER,
};

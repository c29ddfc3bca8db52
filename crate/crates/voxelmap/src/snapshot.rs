//! Plain-text persistence. A map snapshot is a one-line header followed by
//! one point per line:
//!
//! ```text
//! voxelmap-v1 voxel_size=<f> n=<int>
//! <id> <x> <y> <z> <hex-encoded description>
//! ```
//!
//! Coordinates are written with Rust's shortest round-trip float formatting,
//! so a load reproduces the exact stored positions (and therefore the exact
//! voxel assignment and bucket statistics). Scenes reuse the same point
//! format next to a JSON sidecar carrying the generator record, seed, and
//! wall segment labels.

use std::io::{BufRead, Write};

use nalgebra::Point3;
use serde::{Deserialize, Serialize};

use crate::map::{MapError, MapPoint, VoxelMap, VoxelMapConfig};
use crate::scene::{Scene, SceneGenerator, SceneSegment};

const MAP_MAGIC: &str = "voxelmap-v1";
const SCENE_MAGIC: &str = "voxelmap-scene-v1";

#[derive(Debug, thiserror::Error)]
pub enum SnapshotError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("bad snapshot header: {0}")]
    BadHeader(String),
    #[error("bad snapshot record on line {line}: {reason}")]
    BadRecord { line: usize, reason: String },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("bad scene sidecar: {0}")]
    BadSidecar(#[from] serde_json::Error),
    #[error("scene sidecar and point file disagree: {0}")]
    SceneMismatch(String),
}

fn write_point(w: &mut impl Write, p: &MapPoint) -> std::io::Result<()> {
    writeln!(
        w,
        "{} {} {} {} {}",
        p.id,
        p.position.x,
        p.position.y,
        p.position.z,
        hex::encode(&p.description)
    )
}

fn parse_point(line: &str, line_no: usize) -> Result<MapPoint, SnapshotError> {
    let bad = |reason: &str| SnapshotError::BadRecord { line: line_no, reason: reason.to_string() };
    let mut it = line.split_whitespace();
    let id = it
        .next()
        .ok_or_else(|| bad("empty record"))?
        .parse::<u64>()
        .map_err(|e| bad(&format!("id: {e}")))?;
    let mut coord = [0.0f64; 3];
    for (axis, c) in coord.iter_mut().enumerate() {
        *c = it
            .next()
            .ok_or_else(|| bad("missing coordinate"))?
            .parse::<f64>()
            .map_err(|e| bad(&format!("coordinate {axis}: {e}")))?;
    }
    // a trailing field is the hex description; absent means an empty payload
    let description = match it.next() {
        Some(hex_str) => hex::decode(hex_str).map_err(|e| bad(&format!("description: {e}")))?,
        None => Vec::new(),
    };
    if it.next().is_some() {
        return Err(bad("trailing fields"));
    }
    Ok(MapPoint::new(id, Point3::new(coord[0], coord[1], coord[2]), description))
}

fn write_header(w: &mut impl Write, voxel_size: f64, n: usize) -> std::io::Result<()> {
    writeln!(w, "{MAP_MAGIC} voxel_size={voxel_size} n={n}")
}

fn parse_header(line: &str) -> Result<(f64, usize), SnapshotError> {
    let bad = |msg: String| SnapshotError::BadHeader(msg);
    let mut it = line.split_whitespace();
    match it.next() {
        Some(MAP_MAGIC) => {}
        other => return Err(bad(format!("expected '{MAP_MAGIC}', found {other:?}"))),
    }
    let mut voxel_size = None;
    let mut n = None;
    for field in it {
        if let Some(v) = field.strip_prefix("voxel_size=") {
            voxel_size = Some(v.parse::<f64>().map_err(|e| bad(format!("voxel_size: {e}")))?);
        } else if let Some(v) = field.strip_prefix("n=") {
            n = Some(v.parse::<usize>().map_err(|e| bad(format!("n: {e}")))?);
        } else {
            return Err(bad(format!("unknown header field '{field}'")));
        }
    }
    match (voxel_size, n) {
        (Some(v), Some(n)) => Ok((v, n)),
        _ => Err(bad("header must carry voxel_size and n".to_string())),
    }
}

/// Write every point of the map, voxel by voxel.
pub fn save_snapshot(map: &VoxelMap, mut w: impl Write) -> Result<(), SnapshotError> {
    write_header(&mut w, map.config().voxel_size, map.config().table_size_n)?;
    for voxel in map.voxels() {
        for p in voxel.points() {
            write_point(&mut w, p)?;
        }
    }
    Ok(())
}

/// Rebuild a map from a snapshot. voxel_size and table size come from the
/// header; hash primes, position epsilon, and the bucket hint are the
/// defaults (the header does not carry them), so a map saved with custom
/// primes keeps its points but not its exact bucket statistics.
pub fn load_snapshot(r: impl BufRead) -> Result<VoxelMap, SnapshotError> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| SnapshotError::BadHeader("empty file".to_string()))??;
    let (voxel_size, n) = parse_header(&header)?;
    let config = VoxelMapConfig { voxel_size, table_size_n: n, ..VoxelMapConfig::default() };
    let mut map = VoxelMap::new(config)?;
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        map.insert_point(parse_point(&line, i + 2)?)?;
    }
    Ok(map)
}

#[derive(Serialize, Deserialize)]
struct SceneSidecar {
    format: String,
    seed: u64,
    generator: SceneGenerator,
    segments: Vec<SceneSegment>,
}

/// Write the scene points in snapshot format (header carries the default map
/// parameters, so the file also loads directly as a map) and the generator
/// record as a JSON sidecar.
pub fn save_scene(scene: &Scene, mut points_w: impl Write, sidecar_w: impl Write) -> Result<(), SnapshotError> {
    write_header(&mut points_w, crate::map::DEFAULT_VOXEL_SIZE, crate::map::DEFAULT_TABLE_SIZE)?;
    for p in &scene.points {
        write_point(&mut points_w, p)?;
    }
    let sidecar = SceneSidecar {
        format: SCENE_MAGIC.to_string(),
        seed: scene.seed,
        generator: scene.generator.clone(),
        segments: scene.segments.clone(),
    };
    serde_json::to_writer_pretty(sidecar_w, &sidecar)?;
    Ok(())
}

/// Read a scene back: points from the point file (authoritative), metadata
/// from the sidecar. Fails if the sidecar format tag is unknown.
pub fn load_scene(points_r: impl BufRead, sidecar_r: impl std::io::Read) -> Result<Scene, SnapshotError> {
    let sidecar: SceneSidecar = serde_json::from_reader(sidecar_r)?;
    if sidecar.format != SCENE_MAGIC {
        return Err(SnapshotError::SceneMismatch(format!(
            "sidecar format '{}' is not '{SCENE_MAGIC}'",
            sidecar.format
        )));
    }
    let mut lines = points_r.lines();
    let header = lines
        .next()
        .ok_or_else(|| SnapshotError::BadHeader("empty file".to_string()))??;
    parse_header(&header)?;
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        points.push(parse_point(&line, i + 2)?);
    }
    Ok(Scene { points, generator: sidecar.generator, seed: sidecar.seed, segments: sidecar.segments })
}

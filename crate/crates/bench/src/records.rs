//! Result records and their serializations: the summary CSV, the per-point
//! CSV used for depth-colored scatter plots, and gnuplot-ready block data.

use std::fmt::{self, Write as _};

use voxelmap::map::VoxelKey;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapKind {
    Voxel,
    Keyframe,
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapKind::Voxel => "voxel",
            MapKind::Keyframe => "keyframe",
        })
    }
}

/// One summary row. Timing fields aside, every value is reproducible from
/// (config, seed); fields that do not apply to a map kind stay `None` and
/// serialize as empty CSV cells.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub experiment: &'static str,
    pub map_kind: MapKind,
    /// Total points in the queried map.
    pub map_size: usize,
    pub voxel_size: Option<f64>,
    pub query_time_ns_median: u128,
    pub query_time_ns_mean: u128,
    /// Worst case over the query poses.
    pub probes: Option<usize>,
    pub keyframes_scanned: Option<usize>,
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub occluded_points_returned: Option<usize>,
}

impl BenchRecord {
    /// Everything except the wall-clock fields, for determinism comparisons.
    pub fn non_timing_fields(
        &self,
    ) -> (
        &'static str,
        MapKind,
        usize,
        Option<f64>,
        Option<usize>,
        Option<usize>,
        Option<f64>,
        Option<f64>,
        Option<usize>,
    ) {
        (
            self.experiment,
            self.map_kind,
            self.map_size,
            self.voxel_size,
            self.probes,
            self.keyframes_scanned,
            self.recall,
            self.precision,
            self.occluded_points_returned,
        )
    }
}

pub const SUMMARY_HEADER: &str = "experiment,map_kind,map_size,voxel_size,query_time_ns_median,query_time_ns_mean,probes,keyframes_scanned,recall,precision,occluded_points_returned";

fn cell<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

pub fn summary_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.experiment,
            r.map_kind,
            r.map_size,
            cell(&r.voxel_size),
            r.query_time_ns_median,
            r.query_time_ns_mean,
            cell(&r.probes),
            cell(&r.keyframes_scanned),
            cell(&r.recall),
            cell(&r.precision),
            cell(&r.occluded_points_returned),
        );
    }
    out
}

/// One returned point in the occlusion experiment. Keyframe results carry no
/// ray or voxel, so those cells stay empty.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRow {
    pub ray_id: Option<usize>,
    pub voxel: Option<VoxelKey>,
    pub point_id: u64,
    /// Camera-frame depth of the point at the query pose.
    pub depth: f64,
}

pub const POINT_HEADER: &str = "ray_id,voxel_ix,voxel_iy,voxel_iz,point_id,depth";

pub fn points_csv(rows: &[PointRow]) -> String {
    let mut out = String::from(POINT_HEADER);
    out.push('\n');
    for r in rows {
        let (ix, iy, iz) = match r.voxel {
            Some(k) => (k.ix.to_string(), k.iy.to_string(), k.iz.to_string()),
            None => (String::new(), String::new(), String::new()),
        };
        let _ = writeln!(out, "{},{},{},{},{},{}", cell(&r.ray_id), ix, iy, iz, r.point_id, r.depth);
    }
    out
}

/// One gnuplot data block (select with `index` in a plot command).
#[derive(Debug, Clone)]
pub struct GpBlock {
    pub label: String,
    /// Space-separated column names, documented in the block's comment line.
    pub columns: &'static str,
    pub rows: Vec<Vec<f64>>,
}

/// Whitespace-column data with `#` comments; blocks are separated by two
/// blank lines so `plot 'results.gp' index N` picks a series.
pub fn gp_data(title: &str, blocks: &[GpBlock]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {title}");
    for (i, b) in blocks.iter().enumerate() {
        let _ = writeln!(out, "# index {i}: {} (columns: {})", b.label, b.columns);
    }
    for b in blocks {
        let _ = writeln!(out, "\n\n# {}", b.label);
        for row in &b.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
    }
    out
}

/// Outcome of one always-computed threshold check; `--check` turns failures
/// into a nonzero exit.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "check: {} ... {} ({})",
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn optional_cells_serialize_empty() {
        let rec = BenchRecord {
            experiment: "scaling",
            map_kind: MapKind::Keyframe,
            map_size: 1000,
            voxel_size: None,
            query_time_ns_median: 42,
            query_time_ns_mean: 43,
            probes: None,
            keyframes_scanned: Some(10),
            recall: None,
            precision: None,
            occluded_points_returned: None,
        };
        let csv = summary_csv(&[rec]);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SUMMARY_HEADER);
        assert_eq!(lines.next().unwrap(), "scaling,keyframe,1000,,42,43,,10,,,");
    }

    #[test]
    fn point_rows_with_and_without_voxels() {
        let rows = vec![
            PointRow {
                ray_id: Some(3),
                voxel: Some(VoxelKey::new(-1, 0, 8)),
                point_id: 17,
                depth: 6.5,
            },
            PointRow { ray_id: None, voxel: None, point_id: 9, depth: 12.25 },
        ];
        let csv = points_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), POINT_HEADER);
        assert_eq!(lines.next().unwrap(), "3,-1,0,8,17,6.5");
        assert_eq!(lines.next().unwrap(), ",,,,9,12.25");
    }

    #[test]
    fn gp_blocks_are_indexed_and_commented() {
        let gp = gp_data(
            "demo",
            &[
                GpBlock {
                    label: "voxel".into(),
                    columns: "map_size median_ns",
                    rows: vec![vec![1000.0, 5.0], vec![9000.0, 6.0]],
                },
                GpBlock { label: "keyframe".into(), columns: "map_size median_ns", rows: vec![] },
            ],
        );
        println!("{gp}");
        assert!(gp.starts_with("# demo\n"));
        assert!(gp.contains("# index 0: voxel"));
        assert!(gp.contains("# index 1: keyframe"));
        assert!(gp.contains("1000 5"));
        assert!(gp.contains("\n\n# keyframe"));
    }
}

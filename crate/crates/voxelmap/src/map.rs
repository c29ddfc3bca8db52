//! Spatially hashed voxel map: points bucketed into fixed-size cubic cells,
//! cells addressed through a fixed-width multiplicative hash into a bucket
//! table that resolves collisions by linear scan.

use nalgebra::Point3;

/// Hash constants used when none are supplied: three large primes, one per axis.
pub const DEFAULT_PRIMES: [u64; 3] = [73_856_093, 19_349_663, 83_492_791];

/// Default number of buckets in the hash table.
pub const DEFAULT_TABLE_SIZE: usize = 100_003;

/// Default edge length of a cubic voxel, in meters.
pub const DEFAULT_VOXEL_SIZE: f64 = 2.0;

/// Default per-axis tolerance for treating two positions as the same point, in meters.
pub const DEFAULT_POSITION_EPSILON: f64 = 1e-6;

/// One landmark: caller-assigned id, world position, opaque descriptor payload.
#[derive(Debug, Clone, PartialEq)]
pub struct MapPoint {
    pub id: u64,
    pub position: Point3<f64>,
    pub description: Vec<u8>,
}

impl MapPoint {
    pub fn new(id: u64, position: Point3<f64>, description: Vec<u8>) -> Self {
        Self { id, position, description }
    }
}

/// Signed integer grid coordinates of a voxel (floor of position / voxel_size).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VoxelKey {
    pub ix: i64,
    pub iy: i64,
    pub iz: i64,
}

impl VoxelKey {
    pub fn new(ix: i64, iy: i64, iz: i64) -> Self {
        Self { ix, iy, iz }
    }
}

/// A non-empty cubic cell holding every point whose position falls inside it.
#[derive(Debug, Clone)]
pub struct Voxel {
    key: VoxelKey,
    points: Vec<MapPoint>,
}

impl Voxel {
    pub fn key(&self) -> VoxelKey {
        self.key
    }

    /// Points stored in insertion order.
    pub fn points(&self) -> &[MapPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Map construction and insertion parameters.
#[derive(Debug, Clone)]
pub struct VoxelMapConfig {
    /// Edge length of a cubic voxel, in meters. Must be positive and finite.
    pub voxel_size: f64,
    /// Number of buckets in the hash table. Must be at least 1.
    pub table_size_n: usize,
    /// Capacity reserved the first time a bucket allocates.
    pub bucket_capacity_hint: usize,
    /// Per-axis absolute tolerance under which an insert updates an existing point.
    pub position_epsilon: f64,
    /// Per-axis multipliers of the hash; overridable so collision behaviour is testable.
    pub primes: [u64; 3],
}

impl Default for VoxelMapConfig {
    fn default() -> Self {
        Self {
            voxel_size: DEFAULT_VOXEL_SIZE,
            table_size_n: DEFAULT_TABLE_SIZE,
            bucket_capacity_hint: 2,
            position_epsilon: DEFAULT_POSITION_EPSILON,
            primes: DEFAULT_PRIMES,
        }
    }
}

impl VoxelMapConfig {
    /// Convenience constructor: given voxel size, everything else defaulted.
    pub fn with_voxel_size(voxel_size: f64) -> Self {
        Self { voxel_size, ..Self::default() }
    }

    fn validate(&self) -> Result<(), MapError> {
        if !(self.voxel_size.is_finite() && self.voxel_size > 0.0) {
            return Err(MapError::InvalidConfig("voxel_size must be positive and finite"));
        }
        if self.table_size_n == 0 {
            return Err(MapError::InvalidConfig("table_size_n must be at least 1"));
        }
        if !(self.position_epsilon.is_finite() && self.position_epsilon >= 0.0) {
            return Err(MapError::InvalidConfig("position_epsilon must be non-negative and finite"));
        }
        Ok(())
    }

    /// Grid coordinates of the cell covering `position` (half-open cells
    /// [i*s, (i+1)*s) per axis, so a point on a boundary belongs to the upper cell).
    pub fn key_for(&self, position: &Point3<f64>) -> VoxelKey {
        voxel_key_for(position, self.voxel_size)
    }
}

/// Grid coordinates of the cell of edge `voxel_size` covering `position`.
pub fn voxel_key_for(position: &Point3<f64>, voxel_size: f64) -> VoxelKey {
    VoxelKey {
        ix: (position.x / voxel_size).floor() as i64,
        iy: (position.y / voxel_size).floor() as i64,
        iz: (position.z / voxel_size).floor() as i64,
    }
}

/// Bucket index of a voxel key: each signed coordinate is reinterpreted as a
/// two's-complement u64, multiplied (wrapping) by its prime, the three terms
/// XORed, and the result reduced modulo the table size.
pub fn hash_key(key: VoxelKey, primes: [u64; 3], table_size_n: usize) -> usize {
    let hx = (key.ix as u64).wrapping_mul(primes[0]);
    let hy = (key.iy as u64).wrapping_mul(primes[1]);
    let hz = (key.iz as u64).wrapping_mul(primes[2]);
    ((hx ^ hy ^ hz) % table_size_n as u64) as usize
}

/// What an insertion did to the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    /// The target cell did not exist; it was allocated with this point.
    CreatedVoxel,
    /// The target cell existed and the point was appended to it.
    Appended,
    /// An existing point was within position_epsilon on every axis; its id and
    /// description were replaced and no point was added.
    UpdatedDescription,
}

#[derive(Debug, thiserror::Error)]
pub enum MapError {
    #[error("invalid map config: {0}")]
    InvalidConfig(&'static str),
    #[error("point {id} has a non-finite position ({x}, {y}, {z})")]
    NonFinitePosition { id: u64, x: f64, y: f64, z: f64 },
}

/// Aggregate occupancy counters; `mean_bucket_length` averages over non-empty buckets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapStats {
    pub point_count: usize,
    pub voxel_count: usize,
    pub max_bucket_length: usize,
    pub mean_bucket_length: f64,
}

/// The map itself: a fixed array of buckets, each a growable list of voxels
/// scanned linearly on lookup. Writers need `&mut`; the structure holds no
/// interior locks, so share it read-only or externally synchronized.
#[derive(Debug, Clone)]
pub struct VoxelMap {
    config: VoxelMapConfig,
    buckets: Vec<Vec<Voxel>>,
    point_count: usize,
    voxel_count: usize,
}

impl VoxelMap {
    pub fn new(config: VoxelMapConfig) -> Result<Self, MapError> {
        config.validate()?;
        let buckets = vec![Vec::new(); config.table_size_n];
        Ok(Self { config, buckets, point_count: 0, voxel_count: 0 })
    }

    pub fn with_default_config() -> Self {
        Self::new(VoxelMapConfig::default()).expect("default config is valid")
    }

    pub fn config(&self) -> &VoxelMapConfig {
        &self.config
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn voxel_count(&self) -> usize {
        self.voxel_count
    }

    /// Grid key of the cell covering `position`.
    pub fn key_for(&self, position: &Point3<f64>) -> VoxelKey {
        self.config.key_for(position)
    }

    fn bucket_index(&self, key: VoxelKey) -> usize {
        hash_key(key, self.config.primes, self.config.table_size_n)
    }

    /// Insert a point, creating its voxel on demand. A point whose position
    /// matches an existing point in the same voxel within position_epsilon on
    /// every axis replaces that point's id and description instead of adding
    /// a new entry. Rejects non-finite coordinates without touching the map.
    pub fn insert_point(&mut self, point: MapPoint) -> Result<InsertOutcome, MapError> {
        let p = point.position;
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return Err(MapError::NonFinitePosition { id: point.id, x: p.x, y: p.y, z: p.z });
        }

        let key = self.config.key_for(&p);
        let bix = self.bucket_index(key);
        let hint = self.config.bucket_capacity_hint;
        let eps = self.config.position_epsilon;
        let bucket = &mut self.buckets[bix];

        match bucket.iter_mut().find(|v| v.key == key) {
            Some(voxel) => {
                if let Some(existing) = voxel.points.iter_mut().find(|q| {
                    (q.position.x - p.x).abs() <= eps
                        && (q.position.y - p.y).abs() <= eps
                        && (q.position.z - p.z).abs() <= eps
                }) {
                    existing.id = point.id;
                    existing.description = point.description;
                    Ok(InsertOutcome::UpdatedDescription)
                } else {
                    voxel.points.push(point);
                    self.point_count += 1;
                    Ok(InsertOutcome::Appended)
                }
            }
            None => {
                if bucket.capacity() == 0 {
                    bucket.reserve(hint.max(1));
                }
                bucket.push(Voxel { key, points: vec![point] });
                self.point_count += 1;
                self.voxel_count += 1;
                Ok(InsertOutcome::CreatedVoxel)
            }
        }
    }

    /// Remove the point with `id` from the voxel covering `position`. Returns
    /// whether a point was removed; a voxel emptied by the removal is deallocated.
    pub fn delete_point(&mut self, position: &Point3<f64>, id: u64) -> bool {
        let key = self.config.key_for(position);
        let bix = self.bucket_index(key);
        let bucket = &mut self.buckets[bix];

        let Some(vix) = bucket.iter().position(|v| v.key == key) else {
            return false;
        };
        let Some(pix) = bucket[vix].points.iter().position(|q| q.id == id) else {
            return false;
        };
        bucket[vix].points.remove(pix);
        self.point_count -= 1;
        if bucket[vix].points.is_empty() {
            bucket.swap_remove(vix);
            self.voxel_count -= 1;
        }
        true
    }

    /// The voxel covering `position`, if populated. Exactly one bucket is
    /// scanned: at most bucket-length key comparisons.
    pub fn query_voxel(&self, position: &Point3<f64>) -> Option<&Voxel> {
        self.query_key(self.config.key_for(position))
    }

    /// Same as [`query_voxel`](Self::query_voxel) but addressed by grid key.
    pub fn query_key(&self, key: VoxelKey) -> Option<&Voxel> {
        self.buckets[self.bucket_index(key)].iter().find(|v| v.key == key)
    }

    /// All populated voxels, bucket by bucket.
    pub fn voxels(&self) -> impl Iterator<Item = &Voxel> {
        self.buckets.iter().flatten()
    }

    /// Number of voxels stored in each bucket, for collision diagnostics.
    pub fn bucket_lengths(&self) -> impl Iterator<Item = usize> + '_ {
        self.buckets.iter().map(|b| b.len())
    }

    pub fn stats(&self) -> MapStats {
        let mut max_len = 0usize;
        let mut occupied = 0usize;
        for b in &self.buckets {
            if !b.is_empty() {
                occupied += 1;
                max_len = max_len.max(b.len());
            }
        }
        let mean = if occupied == 0 { 0.0 } else { self.voxel_count as f64 / occupied as f64 };
        MapStats {
            point_count: self.point_count,
            voxel_count: self.voxel_count,
            max_bucket_length: max_len,
            mean_bucket_length: mean,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(id: u64, x: f64, y: f64, z: f64) -> MapPoint {
        MapPoint::new(id, Point3::new(x, y, z), vec![id as u8])
    }

    /// Straight-line re-evaluation of the hash definition through u128
    /// arithmetic, kept deliberately independent of the wrapping-ops
    /// implementation in `hash_key`.
    fn hash_reference(key: VoxelKey, primes: [u64; 3], n: usize) -> usize {
        const M: u128 = 1 << 64;
        let term = |c: i64, p: u64| -> u128 {
            let unsigned = (c as i128).rem_euclid(M as i128) as u128;
            (unsigned * p as u128) % M
        };
        let h = term(key.ix, primes[0]) ^ term(key.iy, primes[1]) ^ term(key.iz, primes[2]);
        (h % n as u128) as usize
    }

    #[test]
    fn hash_of_origin_is_zero_for_any_table_size() {
        for n in [1, 7, 10, 1024, DEFAULT_TABLE_SIZE] {
            assert_eq!(hash_key(VoxelKey::new(0, 0, 0), DEFAULT_PRIMES, n), 0);
        }
    }

    #[test]
    fn hash_of_unit_x_is_first_prime_mod_n() {
        assert_eq!(hash_key(VoxelKey::new(1, 0, 0), DEFAULT_PRIMES, 10), 3);
        assert_eq!(
            hash_key(VoxelKey::new(1, 0, 0), DEFAULT_PRIMES, DEFAULT_TABLE_SIZE),
            (73_856_093 % DEFAULT_TABLE_SIZE as u64) as usize
        );
    }

    #[test]
    fn hash_of_negative_coordinates_matches_frozen_reference_values() {
        // Values computed once by an external script evaluating the definition
        // with big-integer arithmetic, then frozen here.
        assert_eq!(hash_key(VoxelKey::new(-1, 2, -3), DEFAULT_PRIMES, 1024), 582);
        assert_eq!(hash_key(VoxelKey::new(-1, -1, -1), DEFAULT_PRIMES, 100_003), 57_659);
        assert_eq!(hash_key(VoxelKey::new(5, -7, 11), DEFAULT_PRIMES, 100_003), 41_203);
        assert_eq!(hash_key(VoxelKey::new(123_456, -654_321, 42), DEFAULT_PRIMES, 100_003), 61_132);
    }

    #[test]
    fn hash_matches_independent_reference_on_mixed_sign_grid() {
        for ix in [-100, -3, -1, 0, 1, 2, 77] {
            for iy in [-50, -2, 0, 5, 1000] {
                for iz in [-7, -1, 0, 3, 12345] {
                    let key = VoxelKey::new(ix, iy, iz);
                    for n in [1, 2, 10, 1024, DEFAULT_TABLE_SIZE] {
                        assert_eq!(
                            hash_key(key, DEFAULT_PRIMES, n),
                            hash_reference(key, DEFAULT_PRIMES, n),
                            "key {key:?} table size {n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn key_for_uses_floor_so_cells_are_half_open() {
        let cfg = VoxelMapConfig::with_voxel_size(2.0);
        assert_eq!(cfg.key_for(&Point3::new(0.0, 0.0, 0.0)), VoxelKey::new(0, 0, 0));
        assert_eq!(cfg.key_for(&Point3::new(1.999, 0.0, 0.0)), VoxelKey::new(0, 0, 0));
        // exact boundary belongs to the upper cell
        assert_eq!(cfg.key_for(&Point3::new(2.0, 0.0, 0.0)), VoxelKey::new(1, 0, 0));
        // negative side: -0.001 is NOT in cell 0
        assert_eq!(cfg.key_for(&Point3::new(-0.001, -2.0, -2.001)), VoxelKey::new(-1, -1, -2));
    }

    #[test]
    fn insert_reports_created_then_appended_then_updated() {
        let mut map = VoxelMap::new(VoxelMapConfig::with_voxel_size(1.0)).unwrap();
        let a = pt(1, 0.25, 0.25, 0.25);
        let b = pt(2, 0.75, 0.25, 0.25); // same cell, different position
        assert_eq!(map.insert_point(a).unwrap(), InsertOutcome::CreatedVoxel);
        assert_eq!(map.insert_point(b).unwrap(), InsertOutcome::Appended);
        assert_eq!(map.point_count(), 2);
        assert_eq!(map.voxel_count(), 1);

        // same position as `a` within epsilon: description and id replaced in place
        let c = MapPoint::new(9, Point3::new(0.25, 0.25, 0.25), vec![0xAB]);
        assert_eq!(map.insert_point(c).unwrap(), InsertOutcome::UpdatedDescription);
        assert_eq!(map.point_count(), 2);
        let voxel = map.query_voxel(&Point3::new(0.1, 0.1, 0.1)).unwrap();
        let updated = voxel.points().iter().find(|p| p.id == 9).expect("id replaced");
        assert_eq!(updated.description, vec![0xAB]);
        assert!(voxel.points().iter().all(|p| p.id != 1), "old id gone after update");
    }

    #[test]
    fn insert_exact_duplicate_position_updates_even_with_zero_epsilon() {
        let mut cfg = VoxelMapConfig::with_voxel_size(1.0);
        cfg.position_epsilon = 0.0;
        let mut map = VoxelMap::new(cfg).unwrap();
        map.insert_point(pt(1, 1.0, 1.0, 1.0)).unwrap();
        let outcome = map.insert_point(pt(2, 1.0, 1.0, 1.0)).unwrap();
        assert_eq!(outcome, InsertOutcome::UpdatedDescription);
        assert_eq!(map.point_count(), 1);
    }

    #[test]
    fn insert_rejects_non_finite_position_and_leaves_map_unchanged() {
        let mut map = VoxelMap::with_default_config();
        map.insert_point(pt(1, 1.0, 2.0, 3.0)).unwrap();
        let before = map.stats();
        for bad in [f64::NAN, f64::INFINITY, f64::NEG_INFINITY] {
            let err = map.insert_point(pt(2, bad, 0.0, 0.0)).unwrap_err();
            assert!(matches!(err, MapError::NonFinitePosition { id: 2, .. }));
        }
        assert_eq!(map.stats(), before);
    }

    #[test]
    fn delete_returns_false_for_absent_point_or_empty_cell() {
        let mut map = VoxelMap::with_default_config();
        assert!(!map.delete_point(&Point3::new(0.0, 0.0, 0.0), 1));
        map.insert_point(pt(1, 0.5, 0.5, 0.5)).unwrap();
        // right cell, wrong id
        assert!(!map.delete_point(&Point3::new(0.5, 0.5, 0.5), 2));
        assert_eq!(map.point_count(), 1);
    }

    #[test]
    fn delete_last_point_deallocates_the_voxel() {
        let mut map = VoxelMap::new(VoxelMapConfig::with_voxel_size(1.0)).unwrap();
        map.insert_point(pt(1, 0.5, 0.5, 0.5)).unwrap();
        map.insert_point(pt(2, 0.6, 0.5, 0.5)).unwrap();
        assert!(map.delete_point(&Point3::new(0.5, 0.5, 0.5), 1));
        assert_eq!(map.voxel_count(), 1, "voxel still holds point 2");
        assert!(map.delete_point(&Point3::new(0.6, 0.5, 0.5), 2));
        assert_eq!(map.voxel_count(), 0);
        assert!(map.query_voxel(&Point3::new(0.5, 0.5, 0.5)).is_none());
        assert_eq!(map.stats(), MapStats {
            point_count: 0,
            voxel_count: 0,
            max_bucket_length: 0,
            mean_bucket_length: 0.0,
        });
    }

    #[test]
    fn query_returns_none_on_empty_cell_and_the_cell_points_otherwise() {
        let mut map = VoxelMap::new(VoxelMapConfig::with_voxel_size(2.0)).unwrap();
        assert!(map.query_voxel(&Point3::new(5.0, 5.0, 5.0)).is_none());
        map.insert_point(pt(7, 4.1, 4.9, 5.5)).unwrap();
        let voxel = map.query_voxel(&Point3::new(5.9, 4.0, 4.0)).unwrap();
        assert_eq!(voxel.key(), VoxelKey::new(2, 2, 2));
        assert_eq!(voxel.points().len(), 1);
        assert_eq!(voxel.points()[0].id, 7);
    }

    #[test]
    fn single_bucket_table_still_resolves_every_key() {
        let mut cfg = VoxelMapConfig::with_voxel_size(1.0);
        cfg.table_size_n = 1; // every voxel collides into bucket 0
        let mut map = VoxelMap::new(cfg).unwrap();
        for i in 0..100 {
            let x = i as f64 + 0.5 - 50.0;
            map.insert_point(pt(i, x, 0.0, 0.0)).unwrap();
        }
        assert_eq!(map.voxel_count(), 100);
        assert_eq!(map.stats().max_bucket_length, 100);
        for i in 0..100 {
            let x = i as f64 + 0.5 - 50.0;
            let v = map.query_voxel(&Point3::new(x, 0.0, 0.0)).unwrap();
            assert_eq!(v.points()[0].id, i);
        }
        // deleting one key leaves the other 99 reachable
        assert!(map.delete_point(&Point3::new(0.5, 0.0, 0.0), 50));
        assert_eq!(map.voxel_count(), 99);
        assert!(map.query_voxel(&Point3::new(0.5, 0.0, 0.0)).is_none());
        assert!(map.query_voxel(&Point3::new(1.5, 0.0, 0.0)).is_some());
    }

    #[test]
    fn stats_on_empty_map_are_all_zero() {
        let map = VoxelMap::with_default_config();
        let s = map.stats();
        assert_eq!(s.point_count, 0);
        assert_eq!(s.voxel_count, 0);
        assert_eq!(s.max_bucket_length, 0);
        assert_eq!(s.mean_bucket_length, 0.0);
    }

    #[test]
    fn stats_count_one_point_as_one_voxel() {
        let mut map = VoxelMap::with_default_config();
        map.insert_point(pt(1, 1.0, 2.0, 3.0)).unwrap();
        let s = map.stats();
        assert_eq!(s.point_count, 1);
        assert_eq!(s.voxel_count, 1);
        assert_eq!(s.max_bucket_length, 1);
        assert_eq!(s.mean_bucket_length, 1.0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad_size = VoxelMapConfig { voxel_size: 0.0, ..Default::default() };
        assert!(VoxelMap::new(bad_size).is_err());
        let bad_table = VoxelMapConfig { table_size_n: 0, ..Default::default() };
        assert!(VoxelMap::new(bad_table).is_err());
        let bad_eps = VoxelMapConfig { position_epsilon: -1.0, ..Default::default() };
        assert!(VoxelMap::new(bad_eps).is_err());
    }

    #[test]
    fn every_stored_voxel_sits_in_the_bucket_its_key_hashes_to() {
        let mut map = VoxelMap::with_default_config();
        for i in 0..500 {
            let x = (i % 23) as f64 * 1.7 - 20.0;
            let y = (i % 17) as f64 * 2.3 - 15.0;
            let z = (i % 11) as f64 * 3.1 - 10.0;
            map.insert_point(pt(i, x, y, z)).unwrap();
        }
        for (bix, bucket) in map.buckets.iter().enumerate() {
            for voxel in bucket {
                assert_eq!(hash_key(voxel.key, map.config.primes, map.config.table_size_n), bix);
            }
        }
    }
}

//! Pinhole camera model and rigid camera pose. Camera frame convention:
//! +Z forward along the optical axis, +X right, +Y down.

use nalgebra::{Matrix3, Point3, Vector3};

/// Tolerance for the rotation orthonormality and determinant checks.
pub const ROTATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid camera intrinsics: {0}")]
    InvalidIntrinsics(&'static str),
    #[error("rotation is not orthonormal with determinant +1 (max residual {residual:e})")]
    NotARotation { residual: f64 },
    #[error("viewing direction and up vector are parallel or degenerate")]
    DegenerateFrame,
}

/// Intrinsics of an ideal (distortion-free) pinhole camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl CameraModel {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: u32, height: u32) -> Result<Self, GeometryError> {
        if !(fx.is_finite() && fy.is_finite() && fx > 0.0 && fy > 0.0) {
            return Err(GeometryError::InvalidIntrinsics("focal lengths must be positive and finite"));
        }
        if width == 0 || height == 0 {
            return Err(GeometryError::InvalidIntrinsics("image dimensions must be non-zero"));
        }
        if !(cx.is_finite() && cy.is_finite() && cx >= 0.0 && cy >= 0.0 && cx < width as f64 && cy < height as f64) {
            return Err(GeometryError::InvalidIntrinsics("principal point must lie inside the image"));
        }
        Ok(Self { fx, fy, cx, cy, width, height })
    }

    /// Homogeneous viewing direction of pixel (u, v): (mx, my, 1) in the camera frame.
    pub fn backproject(&self, u: f64, v: f64) -> Vector3<f64> {
        Vector3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, 1.0)
    }

    pub fn contains_pixel(&self, u: f64, v: f64) -> bool {
        u >= 0.0 && v >= 0.0 && u < self.width as f64 && v < self.height as f64
    }
}

/// Rigid transform mapping camera-frame coordinates into the world frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Pose {
    rotation: Matrix3<f64>,
    translation: Vector3<f64>,
}

impl Pose {
    /// Build from a rotation matrix and camera position, verifying that the
    /// matrix is orthonormal with determinant +1 to within 1e-9.
    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self, GeometryError> {
        let gram = rotation.transpose() * rotation - Matrix3::identity();
        let mut residual = gram.amax();
        residual = residual.max((rotation.determinant() - 1.0).abs());
        if !residual.is_finite() || residual > ROTATION_TOLERANCE {
            return Err(GeometryError::NotARotation { residual });
        }
        Ok(Self { rotation, translation })
    }

    pub fn identity() -> Self {
        Self { rotation: Matrix3::identity(), translation: Vector3::zeros() }
    }

    /// Camera at `position` looking along `forward`, with `up` fixing the roll.
    /// The camera +Y axis points against `up` (image rows grow downward).
    pub fn from_forward_up(
        position: Point3<f64>,
        forward: Vector3<f64>,
        up: Vector3<f64>,
    ) -> Result<Self, GeometryError> {
        if forward.norm() < 1e-12 || up.norm() < 1e-12 {
            return Err(GeometryError::DegenerateFrame);
        }
        let zc = forward.normalize();
        let xc = zc.cross(&up.normalize());
        if xc.norm() < 1e-9 {
            return Err(GeometryError::DegenerateFrame);
        }
        let xc = xc.normalize();
        let yc = zc.cross(&xc);
        let rotation = Matrix3::from_columns(&[xc, yc, zc]);
        Self::new(rotation, position.coords)
    }

    pub fn rotation(&self) -> &Matrix3<f64> {
        &self.rotation
    }

    /// Camera center in world coordinates.
    pub fn position(&self) -> Point3<f64> {
        Point3::from(self.translation)
    }

    pub fn camera_to_world(&self, p_cam: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p_cam.coords + self.translation)
    }

    pub fn world_to_camera(&self, p_world: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation.transpose() * (p_world.coords - self.translation))
    }
}

/// Image location and camera-frame depth of a projected point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelDepth {
    pub u: f64,
    pub v: f64,
    pub depth: f64,
}

/// Project a world point through `pose` into `cam`. Returns the pixel and its
/// positive depth when the point lies strictly in front of the camera and
/// inside the image bounds, `None` otherwise.
pub fn project_point(cam: &CameraModel, pose: &Pose, point: &Point3<f64>) -> Option<PixelDepth> {
    let p = pose.world_to_camera(point);
    if p.z <= 0.0 {
        return None;
    }
    let u = cam.fx * p.x / p.z + cam.cx;
    let v = cam.fy * p.y / p.z + cam.cy;
    if cam.contains_pixel(u, v) {
        Some(PixelDepth { u, v, depth: p.z })
    } else {
        None
    }
}

/// Like [`project_point`] but accepting pixels up to `margin_px` outside the
/// image on every side. Used to check voxel-granularity query results, whose
/// boundary cells may legitimately contain points just past the frame edge.
pub fn projects_within_dilated_bounds(
    cam: &CameraModel,
    pose: &Pose,
    point: &Point3<f64>,
    margin_px: f64,
) -> bool {
    let p = pose.world_to_camera(point);
    if p.z <= 0.0 {
        return false;
    }
    let u = cam.fx * p.x / p.z + cam.cx;
    let v = cam.fy * p.y / p.z + cam.cy;
    u >= -margin_px
        && v >= -margin_px
        && u < cam.width as f64 + margin_px
        && v < cam.height as f64 + margin_px
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn test_cam() -> CameraModel {
        CameraModel::new(525.0, 525.0, 319.5, 239.5, 640, 480).unwrap()
    }

    #[test]
    fn point_on_optical_axis_projects_to_principal_point() {
        let cam = test_cam();
        let hit = project_point(&cam, &Pose::identity(), &Point3::new(0.0, 0.0, 4.0)).unwrap();
        assert_relative_eq!(hit.u, cam.cx);
        assert_relative_eq!(hit.v, cam.cy);
        assert_relative_eq!(hit.depth, 4.0);
    }

    #[test]
    fn points_behind_camera_or_outside_frame_do_not_project() {
        let cam = test_cam();
        let pose = Pose::identity();
        assert!(project_point(&cam, &pose, &Point3::new(0.0, 0.0, -1.0)).is_none());
        assert!(project_point(&cam, &pose, &Point3::new(0.0, 0.0, 0.0)).is_none());
        // far off to the side: in front but outside the frame
        assert!(project_point(&cam, &pose, &Point3::new(10.0, 0.0, 1.0)).is_none());
        // the same lateral offset is fine when the margin admits it
        assert!(projects_within_dilated_bounds(&cam, &pose, &Point3::new(10.0, 0.0, 1.0), 5000.0));
        assert!(!projects_within_dilated_bounds(&cam, &pose, &Point3::new(0.0, 0.0, -1.0), 5000.0));
    }

    #[test]
    fn project_then_backproject_reproduces_the_point_to_nanometers() {
        let cam = test_cam();
        let pose = Pose::from_forward_up(
            Point3::new(1.0, -2.0, 3.0),
            Vector3::new(0.3, -0.1, 0.9),
            Vector3::new(0.0, 1.0, 0.0),
        )
        .unwrap();
        let points = [
            Point3::new(2.0, -1.5, 10.0),
            Point3::new(0.5, -2.2, 8.0),
            Point3::new(4.0, -4.0, 20.0),
            Point3::new(1.3, -1.9, 4.0),
        ];
        for p in points {
            let Some(hit) = project_point(&cam, &pose, &p) else {
                continue;
            };
            let back = pose.camera_to_world(&Point3::from(cam.backproject(hit.u, hit.v) * hit.depth));
            assert!((back - p).norm() < 1e-9, "roundtrip drift {:e}", (back - p).norm());
        }
    }

    #[test]
    fn pose_rejects_a_sheared_matrix_and_accepts_a_rotation() {
        let mut m = Matrix3::identity();
        m[(0, 1)] = 1e-6; // shear well beyond tolerance
        assert!(Pose::new(m, Vector3::zeros()).is_err());
        let r = nalgebra::Rotation3::from_euler_angles(0.3, -0.2, 0.9);
        assert!(Pose::new(*r.matrix(), Vector3::new(1.0, 2.0, 3.0)).is_ok());
    }

    #[test]
    fn from_forward_up_builds_a_right_handed_cv_frame() {
        // camera at z = +5 facing the plane z = 0, world +Y up
        let pose = Pose::from_forward_up(
            Point3::new(0.0, 0.0, 5.0),
            Vector3::new(0.0, 0.0, -1.0),
            Vector3::new(0.0, 1.0, 0.0),
        )
        .unwrap();
        let cam_fwd = pose.rotation() * Vector3::z();
        assert_relative_eq!(cam_fwd, Vector3::new(0.0, 0.0, -1.0), epsilon = 1e-12);
        // +Y camera axis must point down in world
        let cam_down = pose.rotation() * Vector3::y();
        assert_relative_eq!(cam_down, Vector3::new(0.0, -1.0, 0.0), epsilon = 1e-12);
        // a point straight ahead lands at positive depth
        let p = pose.world_to_camera(&Point3::new(0.0, 0.0, 0.0));
        assert_relative_eq!(p.z, 5.0, epsilon = 1e-12);
        assert!(Pose::from_forward_up(Point3::origin(), Vector3::y(), Vector3::y()).is_err());
    }

    #[test]
    fn camera_constructor_rejects_bad_intrinsics() {
        assert!(CameraModel::new(0.0, 525.0, 319.5, 239.5, 640, 480).is_err());
        assert!(CameraModel::new(525.0, 525.0, 700.0, 239.5, 640, 480).is_err());
        assert!(CameraModel::new(525.0, 525.0, 319.5, 239.5, 0, 480).is_err());
    }
}

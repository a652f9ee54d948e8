//! Spherical coordinates, equirectangular mapping and gnomonic viewports.
//!
//! Axes: `x` points east (yaw +90°), `y` up, `z` forward (yaw 0, pitch 0).
//! Equirectangular images put yaw −π on the left edge and pitch +π/2 on the
//! top row. Normalized viewport coordinates run left to right (`u`) and top
//! to bottom (`v`), with the optical axis at (0.5, 0.5).

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("pitch {0} rad is outside [-pi/2, pi/2]")]
    PitchOutOfRange(f64),
    #[error("non-finite angle")]
    NonFinite,
    #[error("image dimensions must be positive, got {width}x{height}")]
    BadDimensions { width: f64, height: f64 },
    #[error("row coordinate {py} is outside [0, {height}]")]
    RowOutOfRange { py: f64, height: f64 },
    #[error("horizontal field of view {0} rad is outside (0, pi)")]
    BadFov(f64),
    #[error("aspect ratio {0} must be positive")]
    BadAspect(f64),
    #[error("invalid bounding box: {0}")]
    BadBox(String),
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

/// Wraps any finite yaw into `[-pi, pi)`.
pub fn normalize_yaw(yaw: f64) -> f64 {
    if (-PI..PI).contains(&yaw) {
        return yaw;
    }
    let y = (yaw + PI).rem_euclid(TAU) - PI;
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if y >= PI {
        y - TAU
    } else {
        y
    }
}

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    yaw: f64,
    pitch: f64,
}

impl Direction {
    pub const FORWARD: Direction = Direction { yaw: 0.0, pitch: 0.0 };

    pub fn new(yaw: f64, pitch: f64) -> Result<Self> {
        if !yaw.is_finite() || !pitch.is_finite() {
            return Err(GeometryError::NonFinite);
        }
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&pitch) {
            return Err(GeometryError::PitchOutOfRange(pitch));
        }
        Ok(Self {
            yaw: normalize_yaw(yaw),
            pitch,
        })
    }

    pub fn from_degrees(yaw_deg: f64, pitch_deg: f64) -> Result<Self> {
        Self::new(yaw_deg.to_radians(), pitch_deg.to_radians())
    }

    /// Builds a direction with the pitch clamped into range instead of rejected.
    pub fn clamped(yaw: f64, pitch: f64) -> Self {
        Self {
            yaw: normalize_yaw(yaw),
            pitch: pitch.clamp(-FRAC_PI_2, FRAC_PI_2),
        }
    }

    /// Direction of a non-zero vector. Zero vectors map to [`Direction::FORWARD`].
    pub fn from_vector(v: Vec3) -> Self {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Self::FORWARD;
        }
        Self {
            yaw: normalize_yaw(v.x.atan2(v.z)),
            pitch: v.y.atan2(v.x.hypot(v.z)),
        }
    }

    pub fn yaw(&self) -> f64 {
        self.yaw
    }

    pub fn pitch(&self) -> f64 {
        self.pitch
    }

    pub fn yaw_deg(&self) -> f64 {
        self.yaw.to_degrees()
    }

    pub fn pitch_deg(&self) -> f64 {
        self.pitch.to_degrees()
    }

    pub fn to_vector(&self) -> Vec3 {
        let (sy, cy) = self.yaw.sin_cos();
        let (sp, cp) = self.pitch.sin_cos();
        Vec3::new(cp * sy, sp, cp * cy)
    }

    /// Same yaw, pitch clamped to `±limit`.
    pub fn with_pitch_clamped(&self, limit: f64) -> Self {
        Self {
            yaw: self.yaw,
            pitch: self.pitch.clamp(-limit, limit),
        }
    }

    /// Moves along the great circle toward `target` by `angle` radians.
    ///
    /// Never passes `target`. When the two points are antipodal the move
    /// heads east.
    pub fn rotate_toward(&self, target: &Direction, angle: f64) -> Direction {
        let total = angular_distance(self, target);
        if total <= angle {
            return *target;
        }
        if angle <= 0.0 {
            return *self;
        }
        let c = self.to_vector();
        let t = target.to_vector();
        let mut tangent = t.sub(&c.scale(c.dot(&t)));
        if tangent.norm() < 1e-12 {
            tangent = east_of(self);
        }
        let tangent = tangent.normalized();
        let (s, co) = angle.sin_cos();
        Direction::from_vector(c.scale(co).add(&tangent.scale(s)))
    }
}

/// Unit vector pointing east at `d` (yaw increasing, zero roll).
fn east_of(d: &Direction) -> Vec3 {
    let (sy, cy) = d.yaw.sin_cos();
    Vec3::new(cy, 0.0, -sy)
}

/// Unit vector pointing up the local meridian at `d`.
fn north_of(d: &Direction) -> Vec3 {
    let (sy, cy) = d.yaw.sin_cos();
    let (sp, cp) = d.pitch.sin_cos();
    Vec3::new(-sp * sy, cp, -sp * cy)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, o: &Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn add(&self, o: &Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn sub(&self, o: &Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> Vec3 {
        self.scale(1.0 / self.norm())
    }
}

/// Great-circle angle between two directions, in `[0, pi]`.
///
/// Evaluated as `atan2(|a x b|, a . b)`, which equals the arccosine of the
/// clamped dot product but keeps full precision near 0 and pi.
pub fn angular_distance(a: &Direction, b: &Direction) -> f64 {
    let va = a.to_vector();
    let vb = b.to_vector();
    va.cross(&vb).norm().atan2(va.dot(&vb))
}

/// Normalized mean of the unit vectors, optionally weighted.
/// Returns `None` when the mean vector vanishes.
pub fn mean_direction<'a, I>(items: I) -> Option<Direction>
where
    I: IntoIterator<Item = (&'a Direction, f64)>,
{
    let mut acc = Vec3::new(0.0, 0.0, 0.0);
    for (d, w) in items {
        acc = acc.add(&d.to_vector().scale(w));
    }
    if acc.norm() < 1e-12 {
        None
    } else {
        Some(Direction::from_vector(acc))
    }
}

fn check_dims(width: f64, height: f64) -> Result<()> {
    if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
        return Err(GeometryError::BadDimensions { width, height });
    }
    Ok(())
}

pub fn equirect_pixel_to_direction(px: f64, py: f64, width: f64, height: f64) -> Result<Direction> {
    check_dims(width, height)?;
    if !px.is_finite() {
        return Err(GeometryError::NonFinite);
    }
    if !(0.0..=height).contains(&py) {
        return Err(GeometryError::RowOutOfRange { py, height });
    }
    let yaw = TAU * (px / width) - PI;
    let pitch = (FRAC_PI_2 - PI * (py / height)).clamp(-FRAC_PI_2, FRAC_PI_2);
    Direction::new(yaw, pitch)
}

/// Inverse of [`equirect_pixel_to_direction`]; `px` lands in `[0, width)`.
pub fn direction_to_equirect_pixel(d: &Direction, width: f64, height: f64) -> Result<(f64, f64)> {
    check_dims(width, height)?;
    let mut px = (d.yaw + PI) / TAU * width;
    if px >= width {
        px -= width;
    }
    let py = (FRAC_PI_2 - d.pitch) / PI * height;
    Ok((px, py))
}

/// A flat perspective camera looking at `center`, upright (zero roll).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Viewport {
    center: Direction,
    hfov: f64,
    aspect: f64,
}

impl Viewport {
    pub fn new(center: Direction, hfov: f64, aspect: f64) -> Result<Self> {
        if !(hfov > 0.0 && hfov < PI) {
            return Err(GeometryError::BadFov(hfov));
        }
        if !(aspect > 0.0 && aspect.is_finite()) {
            return Err(GeometryError::BadAspect(aspect));
        }
        Ok(Self { center, hfov, aspect })
    }

    pub fn center(&self) -> Direction {
        self.center
    }

    pub fn hfov(&self) -> f64 {
        self.hfov
    }

    pub fn aspect(&self) -> f64 {
        self.aspect
    }

    pub fn vfov(&self) -> f64 {
        2.0 * ((self.hfov / 2.0).tan() / self.aspect).atan()
    }

    pub fn with_center(&self, center: Direction) -> Self {
        Self { center, ..*self }
    }

    /// Camera basis as (right, up, forward).
    pub fn basis(&self) -> [Vec3; 3] {
        [east_of(&self.center), north_of(&self.center), self.center.to_vector()]
    }
}

/// Gnomonic projection of `d` into normalized viewport coordinates.
///
/// `None` when `d` is on or behind the image plane. Directions in front of
/// the camera but outside the frame still yield coordinates outside `[0, 1]`.
pub fn project_to_viewport(d: &Direction, vp: &Viewport) -> Option<(f64, f64)> {
    let [right, up, fwd] = vp.basis();
    let v = d.to_vector();
    let z = v.dot(&fwd);
    if z <= 0.0 {
        return None;
    }
    let x = v.dot(&right) / z;
    let y = v.dot(&up) / z;
    let tan_h = (vp.hfov / 2.0).tan();
    let tan_v = tan_h / vp.aspect;
    Some((0.5 + x / (2.0 * tan_h), 0.5 - y / (2.0 * tan_v)))
}

pub fn unproject_from_viewport(u: f64, v: f64, vp: &Viewport) -> Direction {
    let [right, up, fwd] = vp.basis();
    let tan_h = (vp.hfov / 2.0).tan();
    let tan_v = tan_h / vp.aspect;
    let x = (u - 0.5) * 2.0 * tan_h;
    let y = (0.5 - v) * 2.0 * tan_v;
    Direction::from_vector(right.scale(x).add(&up.scale(y)).add(&fwd))
}

/// An axis-aligned box in equirectangular pixels. `x` may leave `[0, W)` to
/// express wrap across the seam; vertical extent never wraps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquirectBBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl EquirectBBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        Self { x, y, w, h }
    }

    pub fn validate(&self, width: f64, height: f64) -> Result<()> {
        check_dims(width, height)?;
        let EquirectBBox { x, y, w, h } = *self;
        if ![x, y, w, h].iter().all(|v| v.is_finite()) {
            return Err(GeometryError::BadBox("non-finite coordinate".into()));
        }
        if !(w > 0.0 && h > 0.0) {
            return Err(GeometryError::BadBox(format!("size {w}x{h} must be positive")));
        }
        if w > width || h > height {
            return Err(GeometryError::BadBox(format!(
                "size {w}x{h} exceeds image {width}x{height}"
            )));
        }
        if y < 0.0 || y + h > height {
            return Err(GeometryError::BadBox(format!(
                "rows [{y}, {}] leave [0, {height}]",
                y + h
            )));
        }
        Ok(())
    }
}

pub fn bbox_center_direction(b: &EquirectBBox, width: f64, height: f64) -> Result<Direction> {
    b.validate(width, height)?;
    let cx = (b.x + b.w / 2.0).rem_euclid(width);
    equirect_pixel_to_direction(cx, b.y + b.h / 2.0, width, height)
}

/// Solid angle covered by the box, in steradians.
pub fn bbox_solid_angle(b: &EquirectBBox, width: f64, height: f64) -> Result<f64> {
    b.validate(width, height)?;
    let dyaw = TAU * b.w / width;
    let top = FRAC_PI_2 - PI * b.y / height;
    let bottom = FRAC_PI_2 - PI * (b.y + b.h) / height;
    Ok((dyaw * (top.sin() - bottom.sin())).clamp(0.0, 4.0 * PI))
}

/// Solid angle of an equatorial patch spanning `side` radians in yaw and pitch.
pub fn equatorial_patch_solid_angle(side: f64) -> f64 {
    side * 2.0 * (side / 2.0).sin()
}

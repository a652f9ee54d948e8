//! Track-file ingestion: per-frame equirectangular boxes for every scene
//! object, plus optional viewing recommendations.
//!
//! The file is JSON:
//!
//! ```json
//! {"fps": 30, "width": 2048, "height": 1024, "num_frames": 90,
//!  "objects": [{"id": "a", "category": "human",
//!               "samples": [{"t": 0, "x": 10, "y": 500, "w": 40, "h": 80}]}],
//!  "recommendations": [{"t": 0, "yaw_deg": 12.5, "pitch_deg": -3}]}
//! ```

use std::collections::HashSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, Direction, EquirectBBox, GeometryError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrackError {
    #[error("document is not UTF-8 (byte {offset})")]
    Utf8 { offset: usize },
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("missing required field `{0}`")]
    MissingField(String),
    #[error("invalid value for `{field}`: {message}")]
    InvalidValue { field: String, message: String },
    #[error("object `{object}`: frame {frame} is outside [0, {num_frames})")]
    FrameOutOfRange {
        object: String,
        frame: usize,
        num_frames: usize,
    },
    #[error("duplicate object id `{0}`")]
    DuplicateId(String),
    #[error("object `{object}`: sample frame {frame} does not increase")]
    NonIncreasingFrames { object: String, frame: usize },
    #[error("object `{0}` has no samples")]
    EmptyTrack(String),
    #[error("object `{object}`, frame {frame}: {source}")]
    BadBox {
        object: String,
        frame: usize,
        source: GeometryError,
    },
}

/// Half-open frame interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FrameRange {
    pub start: usize,
    pub end: usize,
}

impl FrameRange {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn contains(&self, frame: usize) -> bool {
        (self.start..self.end).contains(&frame)
    }

    pub fn frames(&self) -> Range<usize> {
        self.start..self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub frame: usize,
    pub bbox: EquirectBBox,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectTrack {
    pub id: String,
    pub category: String,
    samples: Vec<Sample>,
}

impl ObjectTrack {
    /// Builds a track; samples must be non-empty with strictly increasing frames.
    pub fn new(id: impl Into<String>, category: impl Into<String>, samples: Vec<Sample>) -> Result<Self, TrackError> {
        let id = id.into();
        if samples.is_empty() {
            return Err(TrackError::EmptyTrack(id));
        }
        for pair in samples.windows(2) {
            if pair[1].frame <= pair[0].frame {
                return Err(TrackError::NonIncreasingFrames {
                    object: id,
                    frame: pair[1].frame,
                });
            }
        }
        Ok(Self {
            id,
            category: category.into(),
            samples,
        })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn first_frame(&self) -> usize {
        self.samples[0].frame
    }

    pub fn last_frame(&self) -> usize {
        self.samples[self.samples.len() - 1].frame
    }

    /// Box at `frame`: the exact sample when one exists, otherwise a linear
    /// blend of the bracketing samples if they are at most `max_gap` frames
    /// apart. Horizontal motion follows the shorter way around the seam.
    pub fn bbox_at(&self, frame: usize, image_width: f64, max_gap: usize) -> Option<EquirectBBox> {
        let idx = match self.samples.binary_search_by_key(&frame, |s| s.frame) {
            Ok(i) => return Some(self.samples[i].bbox),
            Err(i) => i,
        };
        if idx == 0 || idx == self.samples.len() {
            return None;
        }
        let a = &self.samples[idx - 1];
        let b = &self.samples[idx];
        if b.frame - a.frame > max_gap {
            return None;
        }
        let t = (frame - a.frame) as f64 / (b.frame - a.frame) as f64;
        let lerp = |p: f64, q: f64| p + (q - p) * t;
        let ca = a.bbox.x + a.bbox.w / 2.0;
        let cb = b.bbox.x + b.bbox.w / 2.0;
        let mut dc = (cb - ca).rem_euclid(image_width);
        if dc > image_width / 2.0 {
            dc -= image_width;
        }
        let w = lerp(a.bbox.w, b.bbox.w);
        Some(EquirectBBox {
            x: ca + dc * t - w / 2.0,
            y: lerp(a.bbox.y, b.bbox.y),
            w,
            h: lerp(a.bbox.h, b.bbox.h),
        })
    }
}

/// An externally supplied "look here" hint for one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recommendation {
    pub frame: usize,
    pub direction: Direction,
    // as written in the file, so re-serialization is exact
    yaw_deg: f64,
    pitch_deg: f64,
}

impl Recommendation {
    pub fn from_degrees(frame: usize, yaw_deg: f64, pitch_deg: f64) -> Result<Self, GeometryError> {
        Ok(Self {
            frame,
            direction: Direction::from_degrees(yaw_deg, pitch_deg)?,
            yaw_deg,
            pitch_deg,
        })
    }
}

/// Validated, immutable track data for one equirectangular video.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    fps: f64,
    width: u32,
    height: u32,
    num_frames: usize,
    objects: Vec<ObjectTrack>,
    recommendations: Option<Vec<Recommendation>>,
}

impl Scene {
    pub fn new(
        fps: f64,
        width: u32,
        height: u32,
        num_frames: usize,
        objects: Vec<ObjectTrack>,
        recommendations: Option<Vec<Recommendation>>,
    ) -> Result<Self, TrackError> {
        if !(fps > 0.0 && fps.is_finite()) {
            return Err(invalid("fps", format!("{fps} must be positive")));
        }
        if width == 0 {
            return Err(invalid("width", "must be positive"));
        }
        if height == 0 {
            return Err(invalid("height", "must be positive"));
        }
        if num_frames == 0 {
            return Err(invalid("num_frames", "must be positive"));
        }
        let (w, h) = (width as f64, height as f64);
        let mut seen = HashSet::new();
        for obj in &objects {
            if !seen.insert(obj.id.as_str()) {
                return Err(TrackError::DuplicateId(obj.id.clone()));
            }
            for s in &obj.samples {
                if s.frame >= num_frames {
                    return Err(TrackError::FrameOutOfRange {
                        object: obj.id.clone(),
                        frame: s.frame,
                        num_frames,
                    });
                }
                s.bbox.validate(w, h).map_err(|source| TrackError::BadBox {
                    object: obj.id.clone(),
                    frame: s.frame,
                    source,
                })?;
            }
        }
        if let Some(recs) = &recommendations {
            for (i, r) in recs.iter().enumerate() {
                if r.frame >= num_frames {
                    return Err(invalid(
                        &format!("recommendations[{i}].t"),
                        format!("frame {} is outside [0, {num_frames})", r.frame),
                    ));
                }
                if i > 0 && r.frame <= recs[i - 1].frame {
                    return Err(invalid(
                        &format!("recommendations[{i}].t"),
                        format!("frame {} does not increase", r.frame),
                    ));
                }
            }
        }
        Ok(Self {
            fps,
            width,
            height,
            num_frames,
            objects,
            recommendations,
        })
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn num_frames(&self) -> usize {
        self.num_frames
    }

    pub fn full_range(&self) -> FrameRange {
        FrameRange::new(0, self.num_frames)
    }

    pub fn objects(&self) -> &[ObjectTrack] {
        &self.objects
    }

    pub fn object(&self, id: &str) -> Option<&ObjectTrack> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn recommendations(&self) -> &[Recommendation] {
        self.recommendations.as_deref().unwrap_or(&[])
    }

    pub fn has_recommendations(&self) -> bool {
        self.recommendations.is_some()
    }

    /// Set when the source is not the usual 2:1 equirectangular layout.
    pub fn aspect_warning(&self) -> Option<String> {
        (self.width as u64 != 2 * self.height as u64).then(|| {
            format!(
                "source is {}x{}, not the 2:1 equirectangular ratio",
                self.width, self.height
            )
        })
    }

    pub fn bbox_at(
        &self,
        object: &ObjectTrack,
        frame: usize,
        max_gap: usize,
    ) -> Result<Option<EquirectBBox>, TrackError> {
        if frame >= self.num_frames {
            return Err(TrackError::FrameOutOfRange {
                object: object.id.clone(),
                frame,
                num_frames: self.num_frames,
            });
        }
        Ok(object.bbox_at(frame, self.width as f64, max_gap))
    }

    /// Center direction of `object` at `frame`, if the object is present.
    pub fn center_at(&self, object: &ObjectTrack, frame: usize, max_gap: usize) -> Option<Direction> {
        let b = object.bbox_at(frame, self.width as f64, max_gap)?;
        geometry::bbox_center_direction(&b, self.width as f64, self.height as f64).ok()
    }

    pub fn solid_angle_at(&self, object: &ObjectTrack, frame: usize, max_gap: usize) -> Option<f64> {
        let b = object.bbox_at(frame, self.width as f64, max_gap)?;
        geometry::bbox_solid_angle(&b, self.width as f64, self.height as f64).ok()
    }

    pub fn to_json(&self) -> String {
        let doc = FileScene {
            fps: Some(self.fps),
            width: Some(self.width),
            height: Some(self.height),
            num_frames: Some(self.num_frames),
            objects: Some(
                self.objects
                    .iter()
                    .map(|o| FileObject {
                        id: Some(o.id.clone()),
                        category: Some(o.category.clone()),
                        samples: Some(
                            o.samples
                                .iter()
                                .map(|s| FileSample {
                                    t: Some(s.frame),
                                    x: Some(s.bbox.x),
                                    y: Some(s.bbox.y),
                                    w: Some(s.bbox.w),
                                    h: Some(s.bbox.h),
                                })
                                .collect(),
                        ),
                    })
                    .collect(),
            ),
            recommendations: self.recommendations.as_ref().map(|recs| {
                recs.iter()
                    .map(|r| FileRecommendation {
                        t: Some(r.frame),
                        yaw_deg: Some(r.yaw_deg),
                        pitch_deg: Some(r.pitch_deg),
                    })
                    .collect()
            }),
        };
        serde_json::to_string(&doc).expect("scene serializes")
    }
}

fn invalid(field: &str, message: impl Into<String>) -> TrackError {
    TrackError::InvalidValue {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Serialize, Deserialize)]
struct FileScene {
    fps: Option<f64>,
    width: Option<u32>,
    height: Option<u32>,
    num_frames: Option<usize>,
    objects: Option<Vec<FileObject>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    recommendations: Option<Vec<FileRecommendation>>,
}

#[derive(Serialize, Deserialize)]
struct FileObject {
    id: Option<String>,
    category: Option<String>,
    samples: Option<Vec<FileSample>>,
}

#[derive(Serialize, Deserialize)]
struct FileSample {
    t: Option<usize>,
    x: Option<f64>,
    y: Option<f64>,
    w: Option<f64>,
    h: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct FileRecommendation {
    t: Option<usize>,
    yaw_deg: Option<f64>,
    pitch_deg: Option<f64>,
}

fn required<T>(v: Option<T>, field: impl FnOnce() -> String) -> Result<T, TrackError> {
    v.ok_or_else(|| TrackError::MissingField(field()))
}

pub(crate) fn json_error(e: serde_json::Error) -> TrackError {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => TrackError::InvalidValue {
            field: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        },
        _ => TrackError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    }
}

/// Parses and validates a track file.
pub fn parse_scene(document: &[u8]) -> Result<Scene, TrackError> {
    let text = std::str::from_utf8(document).map_err(|e| TrackError::Utf8 {
        offset: e.valid_up_to(),
    })?;
    let raw: FileScene = serde_json::from_str(text).map_err(json_error)?;

    let fps = required(raw.fps, || "fps".into())?;
    let width = required(raw.width, || "width".into())?;
    let height = required(raw.height, || "height".into())?;
    let num_frames = required(raw.num_frames, || "num_frames".into())?;
    let raw_objects = required(raw.objects, || "objects".into())?;

    let mut objects = Vec::with_capacity(raw_objects.len());
    for (i, o) in raw_objects.into_iter().enumerate() {
        let id = required(o.id, || format!("objects[{i}].id"))?;
        let category = required(o.category, || format!("objects[{i}].category"))?;
        let raw_samples = required(o.samples, || format!("objects[{i}].samples"))?;
        let mut samples = Vec::with_capacity(raw_samples.len());
        for (j, s) in raw_samples.into_iter().enumerate() {
            let at = |f: &str| format!("objects[{i}].samples[{j}].{f}");
            samples.push(Sample {
                frame: required(s.t, || at("t"))?,
                bbox: EquirectBBox {
                    x: required(s.x, || at("x"))?,
                    y: required(s.y, || at("y"))?,
                    w: required(s.w, || at("w"))?,
                    h: required(s.h, || at("h"))?,
                },
            });
        }
        objects.push(ObjectTrack::new(id, category, samples)?);
    }

    let recommendations = match raw.recommendations {
        None => None,
        Some(list) => {
            let mut out = Vec::with_capacity(list.len());
            for (i, r) in list.into_iter().enumerate() {
                let t = required(r.t, || format!("recommendations[{i}].t"))?;
                let yaw = required(r.yaw_deg, || format!("recommendations[{i}].yaw_deg"))?;
                let pitch = required(r.pitch_deg, || format!("recommendations[{i}].pitch_deg"))?;
                out.push(
                    Recommendation::from_degrees(t, yaw, pitch)
                        .map_err(|e| invalid(&format!("recommendations[{i}]"), e.to_string()))?,
                );
            }
            Some(out)
        }
    };

    Scene::new(fps, width, height, num_frames, objects, recommendations)
}

//! Camera-path file: per-frame viewport plus the shot list.
//!
//! ```json
//! {"fps": 30.0,
//!  "frames": [{"yaw_deg": 0.0, "pitch_deg": 0.0, "hfov_deg": 75.0}],
//!  "shots": [{"start": 0, "end": 1, "type": "tracking", "score": 0.4,
//!             "targets": ["a"], "relaxed": false}]}
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::director::DirectorOutput;
use crate::geometry::{Direction, Viewport};
use crate::hypotheses::ShotType;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("path file is not UTF-8 (byte {offset})")]
    Utf8 { offset: usize },
    #[error("path parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid path: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathFrame {
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    pub hfov_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathShot {
    pub start: usize,
    pub end: usize,
    #[serde(rename = "type")]
    pub shot_type: ShotType,
    pub score: f64,
    pub targets: Vec<String>,
    pub relaxed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraPath {
    pub fps: f64,
    pub frames: Vec<PathFrame>,
    pub shots: Vec<PathShot>,
}

impl CameraPath {
    pub fn from_output(out: &DirectorOutput) -> Self {
        Self {
            fps: out.fps,
            frames: out
                .camera_path
                .iter()
                .map(|vp| PathFrame {
                    yaw_deg: vp.center().yaw_deg(),
                    pitch_deg: vp.center().pitch_deg(),
                    hfov_deg: vp.hfov().to_degrees(),
                })
                .collect(),
            shots: out
                .shots
                .iter()
                .map(|s| PathShot {
                    start: s.range.start,
                    end: s.range.end,
                    shot_type: s.shot_type,
                    score: s.score,
                    targets: s.target_ids.clone(),
                    relaxed: s.relaxed,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Viewports for rendering at the given output aspect ratio.
    pub fn viewports(&self, aspect: f64) -> Result<Vec<Viewport>, PathError> {
        self.frames
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let center = Direction::from_degrees(f.yaw_deg, f.pitch_deg)
                    .map_err(|e| PathError::Invalid(format!("frame {i}: {e}")))?;
                Viewport::new(center, f.hfov_deg.to_radians(), aspect)
                    .map_err(|e| PathError::Invalid(format!("frame {i}: {e}")))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), PathError> {
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return Err(PathError::Invalid(format!("fps {} must be positive", self.fps)));
        }
        self.viewports(1.0)?;
        let mut expected = 0;
        for (i, s) in self.shots.iter().enumerate() {
            if s.start != expected || s.end <= s.start {
                return Err(PathError::Invalid(format!(
                    "shot {i} covers [{}, {}) but should start at {expected}",
                    s.start, s.end
                )));
            }
            expected = s.end;
        }
        if !self.shots.is_empty() && expected != self.frames.len() {
            return Err(PathError::Invalid(format!(
                "shots cover {expected} frames, path has {}",
                self.frames.len()
            )));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("path serializes")
    }
}

pub fn parse_camera_path(document: &[u8]) -> Result<CameraPath, PathError> {
    let text = std::str::from_utf8(document).map_err(|e| PathError::Utf8 {
        offset: e.valid_up_to(),
    })?;
    let path: CameraPath = serde_json::from_str(text).map_err(|e| PathError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    path.validate()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{"fps":30.0,"frames":[{"yaw_deg":10.0,"pitch_deg":-5.0,"hfov_deg":75.0},{"yaw_deg":11.0,"pitch_deg":-5.0,"hfov_deg":75.0}],"shots":[{"start":0,"end":2,"type":"tracking","score":0.25,"targets":["a"],"relaxed":false}]}"#;

    #[test]
    fn parses_and_reserializes_exactly() {
        let p = parse_camera_path(DOC.as_bytes()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.shots[0].shot_type, ShotType::Tracking);
        assert_eq!(p.to_json(), DOC);
        let vps = p.viewports(16.0 / 9.0).unwrap();
        assert!((vps[1].center().yaw_deg() - 11.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_gaps_and_bad_angles() {
        let gap = DOC.replace(r#""start":0"#, r#""start":1"#);
        assert!(matches!(parse_camera_path(gap.as_bytes()), Err(PathError::Invalid(_))));
        let short = DOC.replace(r#""end":2"#, r#""end":1"#);
        assert!(matches!(
            parse_camera_path(short.as_bytes()),
            Err(PathError::Invalid(_))
        ));
        let pitch = DOC.replace("-5.0", "-95.0");
        assert!(matches!(
            parse_camera_path(pitch.as_bytes()),
            Err(PathError::Invalid(_))
        ));
        let fov = DOC.replace("75.0", "0.0");
        assert!(matches!(parse_camera_path(fov.as_bytes()), Err(PathError::Invalid(_))));
        let kind = DOC.replace("tracking", "dolly");
        assert!(matches!(
            parse_camera_path(kind.as_bytes()),
            Err(PathError::Parse { .. })
        ));
        assert!(matches!(parse_camera_path(b"{"), Err(PathError::Parse { .. })));
    }
}

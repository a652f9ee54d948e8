//! Deterministic synthetic scenes and panoramas with closed-form actor motion.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    angular_distance, direction_to_equirect_pixel, equirect_pixel_to_direction, Direction, EquirectBBox,
};
use crate::renderer::Image;
use crate::tracks::{ObjectTrack, Recommendation, Sample, Scene, TrackError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("scenario is not UTF-8 (byte {offset})")]
    Utf8 { offset: usize },
    #[error("scenario parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Scene(#[from] TrackError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Motion {
    Fixed {
        yaw_deg: f64,
        pitch_deg: f64,
    },
    /// Constant yaw rate at fixed pitch.
    Linear {
        yaw_deg: f64,
        pitch_deg: f64,
        rate_deg_s: f64,
    },
    /// A circle in (yaw, pitch) angle space.
    Circular {
        center_yaw_deg: f64,
        center_pitch_deg: f64,
        radius_deg: f64,
        period_s: f64,
        #[serde(default)]
        phase_deg: f64,
    },
}

impl Motion {
    /// (yaw, pitch) in degrees at time `t` seconds, before wrapping.
    pub fn angles_at(&self, t: f64) -> (f64, f64) {
        match *self {
            Motion::Fixed { yaw_deg, pitch_deg } => (yaw_deg, pitch_deg),
            Motion::Linear {
                yaw_deg,
                pitch_deg,
                rate_deg_s,
            } => (yaw_deg + rate_deg_s * t, pitch_deg),
            Motion::Circular {
                center_yaw_deg,
                center_pitch_deg,
                radius_deg,
                period_s,
                phase_deg,
            } => {
                let a = TAU * t / period_s + phase_deg.to_radians();
                (
                    center_yaw_deg + radius_deg * a.cos(),
                    center_pitch_deg + radius_deg * a.sin(),
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Actor {
    pub category: String,
    /// Angular extent of the actor's box, in both yaw and pitch.
    pub size_deg: f64,
    pub motion: Motion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RecommendationScript {
    FollowActor {
        actor: usize,
        #[serde(default = "one")]
        stride: usize,
    },
    Fixed {
        yaw_deg: f64,
        pitch_deg: f64,
        #[serde(default = "one")]
        stride: usize,
    },
}

fn one() -> usize {
    1
}

fn default_width() -> u32 {
    512
}

fn default_height() -> u32 {
    256
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub duration_s: f64,
    pub fps: f64,
    #[serde(default = "default_width")]
    pub width: u32,
    #[serde(default = "default_height")]
    pub height: u32,
    #[serde(default)]
    pub actors: Vec<Actor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recommendations: Option<RecommendationScript>,
    /// Relative per-sample box size noise, drawn from the seed. Centers stay exact.
    #[serde(default)]
    pub size_jitter: f64,
}

impl ScenarioSpec {
    pub fn num_frames(&self) -> usize {
        (self.duration_s * self.fps).round() as usize
    }

    pub fn actor_id(&self, index: usize) -> String {
        format!("{}{}", self.actors[index].category, index)
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::Invalid(m));
        if !(self.fps > 0.0 && self.fps.is_finite()) {
            return bad(format!("fps {} must be positive", self.fps));
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return bad(format!("duration_s {} must be positive", self.duration_s));
        }
        if self.num_frames() == 0 {
            return bad("scenario is shorter than one frame".into());
        }
        if self.num_frames() > 1_000_000 {
            return bad("scenario is longer than 1e6 frames".into());
        }
        if self.width == 0 || self.height == 0 {
            return bad("panorama dimensions must be positive".into());
        }
        if !(0.0..1.0).contains(&self.size_jitter) {
            return bad("size_jitter must be in [0, 1)".into());
        }
        for (i, a) in self.actors.iter().enumerate() {
            if !(a.size_deg > 0.0 && a.size_deg < 180.0) {
                return bad(format!("actor {i}: size_deg {} must be in (0, 180)", a.size_deg));
            }
            let finite = match a.motion {
                Motion::Fixed { yaw_deg, pitch_deg } => yaw_deg.is_finite() && pitch_deg.is_finite(),
                Motion::Linear {
                    yaw_deg,
                    pitch_deg,
                    rate_deg_s,
                } => yaw_deg.is_finite() && pitch_deg.is_finite() && rate_deg_s.is_finite(),
                Motion::Circular {
                    center_yaw_deg,
                    center_pitch_deg,
                    radius_deg,
                    period_s,
                    phase_deg,
                } => {
                    if period_s.is_nan() || period_s <= 0.0 {
                        return bad(format!("actor {i}: period_s must be positive"));
                    }
                    [center_yaw_deg, center_pitch_deg, radius_deg, period_s, phase_deg]
                        .iter()
                        .all(|v| v.is_finite())
                }
            };
            if !finite {
                return bad(format!("actor {i}: non-finite motion parameter"));
            }
        }
        match self.recommendations {
            Some(RecommendationScript::FollowActor { actor, stride }) => {
                if actor >= self.actors.len() {
                    return bad(format!("recommendations follow missing actor {actor}"));
                }
                if stride == 0 {
                    return bad("recommendation stride must be positive".into());
                }
            }
            Some(RecommendationScript::Fixed {
                yaw_deg,
                pitch_deg,
                stride,
            }) => {
                if stride == 0 {
                    return bad("recommendation stride must be positive".into());
                }
                Direction::from_degrees(yaw_deg, pitch_deg).map_err(|e| SynthError::Invalid(e.to_string()))?;
            }
            None => {}
        }
        Ok(())
    }

    /// Direction of actor `index` at `frame`.
    pub fn actor_direction(&self, index: usize, frame: usize) -> Result<Direction, SynthError> {
        let (yaw, pitch) = self.actors[index].motion.angles_at(frame as f64 / self.fps);
        Direction::from_degrees(yaw, pitch)
            .map_err(|e| SynthError::Invalid(format!("actor {index} at frame {frame}: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }
}

pub fn parse_scenario(document: &[u8]) -> Result<ScenarioSpec, SynthError> {
    let text = std::str::from_utf8(document).map_err(|e| SynthError::Utf8 {
        offset: e.valid_up_to(),
    })?;
    let spec: ScenarioSpec = serde_json::from_str(text).map_err(|e| SynthError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    spec.validate()?;
    Ok(spec)
}

/// Builds the track data: one object per actor, sampled on every frame, with
/// box centers exactly on the parametric path.
pub fn synth_scene(spec: &ScenarioSpec) -> Result<Scene, SynthError> {
    spec.validate()?;
    let (w, h) = (spec.width as f64, spec.height as f64);
    let n = spec.num_frames();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut objects = Vec::with_capacity(spec.actors.len());
    for (i, actor) in spec.actors.iter().enumerate() {
        let mut samples = Vec::with_capacity(n);
        for f in 0..n {
            let d = spec.actor_direction(i, f)?;
            let (cx, cy) = direction_to_equirect_pixel(&d, w, h).expect("dimensions validated");
            let mut jitter = || {
                if spec.size_jitter > 0.0 {
                    1.0 + spec.size_jitter * rng.gen_range(-1.0..1.0)
                } else {
                    1.0
                }
            };
            let bw = actor.size_deg / 360.0 * w * jitter();
            let bh = actor.size_deg / 180.0 * h * jitter();
            let bbox = EquirectBBox::new(cx - bw / 2.0, cy - bh / 2.0, bw, bh);
            bbox.validate(w, h)
                .map_err(|e| SynthError::Invalid(format!("actor {i} leaves the panorama at frame {f}: {e}")))?;
            samples.push(Sample { frame: f, bbox });
        }
        objects.push(ObjectTrack::new(spec.actor_id(i), actor.category.clone(), samples)?);
    }

    let recommendations = match spec.recommendations {
        None => None,
        Some(RecommendationScript::FollowActor { actor, stride }) => Some(
            (0..n)
                .step_by(stride)
                .map(|f| {
                    let d = spec.actor_direction(actor, f)?;
                    Recommendation::from_degrees(f, d.yaw_deg(), d.pitch_deg())
                        .map_err(|e| SynthError::Invalid(e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
        Some(RecommendationScript::Fixed {
            yaw_deg,
            pitch_deg,
            stride,
        }) => Some(
            (0..n)
                .step_by(stride)
                .map(|f| {
                    Recommendation::from_degrees(f, yaw_deg, pitch_deg).map_err(|e| SynthError::Invalid(e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };

    Ok(Scene::new(
        spec.fps,
        spec.width,
        spec.height,
        n,
        objects,
        recommendations,
    )?)
}

const PALETTE: [[u8; 3]; 6] = [
    [255, 32, 32],
    [32, 255, 32],
    [32, 32, 255],
    [255, 255, 32],
    [255, 32, 255],
    [32, 255, 255],
];

/// Blob colour of actor `index`; the palette rotation comes from the seed.
pub fn actor_color(spec: &ScenarioSpec, index: usize) -> [u8; 3] {
    let offset = ChaCha8Rng::seed_from_u64(spec.seed).gen_range(0..PALETTE.len());
    PALETTE[(offset + index) % PALETTE.len()]
}

/// Background colour for a direction: smooth and continuous across the seam.
pub fn background_color(d: &Direction) -> [u8; 3] {
    let c = |v: f64| (100.0 + 60.0 * v).round() as u8;
    [c(d.yaw().cos()), c(d.pitch().sin()), c(d.yaw().sin())]
}

/// Equirectangular frame: gradient background with a disc of angular
/// diameter `size_deg` per actor, later actors drawn on top.
pub fn synth_panorama(spec: &ScenarioSpec, frame: usize) -> Result<Image, SynthError> {
    spec.validate()?;
    let (w, h) = (spec.width as usize, spec.height as usize);
    let blobs = (0..spec.actors.len())
        .map(|i| {
            Ok((
                spec.actor_direction(i, frame)?,
                spec.actors[i].size_deg.to_radians() / 2.0,
                actor_color(spec, i),
            ))
        })
        .collect::<Result<Vec<_>, SynthError>>()?;
    Ok(Image::from_fn(w, h, |x, y| {
        let d = equirect_pixel_to_direction(x as f64 + 0.5, y as f64 + 0.5, w as f64, h as f64)
            .expect("pixel centers are in range");
        blobs
            .iter()
            .rev()
            .find(|(c, r, _)| angular_distance(c, &d) <= *r)
            .map_or_else(|| background_color(&d), |b| b.2)
    }))
}

const CATEGORIES: [&str; 5] = ["human", "dog", "cat", "bicycle", "car"];

/// A random but reproducible scenario with up to `max_actors` actors whose
/// boxes always stay inside the panorama.
pub fn random_scenario(seed: u64, max_actors: usize, duration_s: f64, fps: f64) -> ScenarioSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = rng.gen_range(0..=max_actors);
    let actors = (0..count)
        .map(|_| {
            let category = CATEGORIES[rng.gen_range(0..CATEGORIES.len())].to_string();
            let size_deg = rng.gen_range(4.0..24.0);
            let yaw_deg = rng.gen_range(-180.0..180.0);
            let pitch_deg = rng.gen_range(-30.0..30.0);
            let motion = match rng.gen_range(0..3) {
                0 => Motion::Fixed { yaw_deg, pitch_deg },
                1 => Motion::Linear {
                    yaw_deg,
                    pitch_deg,
                    rate_deg_s: rng.gen_range(-25.0..25.0),
                },
                _ => Motion::Circular {
                    center_yaw_deg: yaw_deg,
                    center_pitch_deg: pitch_deg,
                    radius_deg: rng.gen_range(2.0..20.0),
                    period_s: rng.gen_range(2.0..12.0),
                    phase_deg: rng.gen_range(0.0..360.0),
                },
            };
            Actor {
                category,
                size_deg,
                motion,
            }
        })
        .collect();
    ScenarioSpec {
        seed,
        duration_s,
        fps,
        width: default_width(),
        height: default_height(),
        actors,
        recommendations: None,
        size_jitter: 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::bbox_center_direction;
    use crate::tracks::parse_scene;

    fn spec(actors: Vec<Actor>) -> ScenarioSpec {
        ScenarioSpec {
            seed: 3,
            duration_s: 2.0,
            fps: 30.0,
            width: 512,
            height: 256,
            actors,
            recommendations: None,
            size_jitter: 0.0,
        }
    }

    fn actor(motion: Motion) -> Actor {
        Actor {
            category: "human".into(),
            size_deg: 10.0,
            motion,
        }
    }

    #[test]
    fn fixed_actor_centers() {
        let s = spec(vec![actor(Motion::Fixed {
            yaw_deg: 30.0,
            pitch_deg: 0.0,
        })]);
        let scene = synth_scene(&s).unwrap();
        let target = Direction::from_degrees(30.0, 0.0).unwrap();
        for sample in scene.objects()[0].samples() {
            let c = bbox_center_direction(&sample.bbox, 512.0, 256.0).unwrap();
            assert!(angular_distance(&c, &target) < 1e-12);
        }
    }

    #[test]
    fn linear_drift_spacing() {
        let s = spec(vec![actor(Motion::Linear {
            yaw_deg: 0.0,
            pitch_deg: 0.0,
            rate_deg_s: 10.0,
        })]);
        let scene = synth_scene(&s).unwrap();
        let centers: Vec<_> = scene.objects()[0]
            .samples()
            .iter()
            .map(|s| bbox_center_direction(&s.bbox, 512.0, 256.0).unwrap())
            .collect();
        for w in centers.windows(2) {
            assert!((angular_distance(&w[0], &w[1]).to_degrees() - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let mut s = random_scenario(11, 3, 2.0, 30.0);
        s.size_jitter = 0.2;
        assert_eq!(synth_scene(&s).unwrap().to_json(), synth_scene(&s).unwrap().to_json());
    }

    #[test]
    fn parsed_back_centers_match() {
        for seed in 0..10 {
            let s = random_scenario(seed, 3, 1.0, 30.0);
            let scene = parse_scene(synth_scene(&s).unwrap().to_json().as_bytes()).unwrap();
            for (i, obj) in scene.objects().iter().enumerate() {
                for sample in obj.samples() {
                    let c = bbox_center_direction(&sample.bbox, 512.0, 256.0).unwrap();
                    let truth = s.actor_direction(i, sample.frame).unwrap();
                    assert!(angular_distance(&c, &truth) < 1e-6);
                }
            }
        }
    }

    #[test]
    fn recommendations_follow_actor() {
        let mut s = spec(vec![actor(Motion::Linear {
            yaw_deg: 0.0,
            pitch_deg: 5.0,
            rate_deg_s: 10.0,
        })]);
        s.recommendations = Some(RecommendationScript::FollowActor { actor: 0, stride: 2 });
        let scene = synth_scene(&s).unwrap();
        assert_eq!(scene.recommendations().len(), 30);
        let r = scene.recommendations()[3];
        assert_eq!(r.frame, 6);
        assert!(angular_distance(&r.direction, &s.actor_direction(0, 6).unwrap()) < 1e-12);
    }

    fn blob_centroid(img: &Image, color: [u8; 3]) -> (f64, f64) {
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0.0);
        for y in 0..img.height() {
            for x in 0..img.width() {
                if img.get(x, y) == color {
                    sx += x as f64 + 0.5;
                    sy += y as f64 + 0.5;
                    n += 1.0;
                }
            }
        }
        (sx / n, sy / n)
    }

    #[test]
    fn blob_at_actor_direction() {
        let s = spec(vec![actor(Motion::Fixed {
            yaw_deg: 0.0,
            pitch_deg: 0.0,
        })]);
        let img = synth_panorama(&s, 0).unwrap();
        let (cx, cy) = blob_centroid(&img, actor_color(&s, 0));
        assert!((cx - 256.0).abs() < 0.5 && (cy - 128.0).abs() < 0.5);

        let s = spec(vec![actor(Motion::Fixed {
            yaw_deg: -47.3,
            pitch_deg: 12.1,
        })]);
        let img = synth_panorama(&s, 0).unwrap();
        let (cx, cy) = blob_centroid(&img, actor_color(&s, 0));
        let (ex, ey) = direction_to_equirect_pixel(&s.actor_direction(0, 0).unwrap(), 512.0, 256.0).unwrap();
        assert!((cx - ex).abs() < 0.5 && (cy - ey).abs() < 0.5, "{cx},{cy} vs {ex},{ey}");
    }

    #[test]
    fn empty_spec_is_pure_gradient() {
        let s = spec(vec![]);
        let img = synth_panorama(&s, 0).unwrap();
        for y in (0..256).step_by(17) {
            for x in (0..512).step_by(13) {
                let d = equirect_pixel_to_direction(x as f64 + 0.5, y as f64 + 0.5, 512.0, 256.0).unwrap();
                assert_eq!(img.get(x, y), background_color(&d));
            }
        }
    }

    #[test]
    fn invalid_specs() {
        let mut s = spec(vec![]);
        s.fps = 0.0;
        assert!(synth_scene(&s).is_err());
        let s = spec(vec![actor(Motion::Fixed {
            yaw_deg: 0.0,
            pitch_deg: 88.0,
        })]);
        assert!(matches!(synth_scene(&s), Err(SynthError::Invalid(_))));
        let mut s = spec(vec![]);
        s.recommendations = Some(RecommendationScript::FollowActor { actor: 0, stride: 1 });
        assert!(synth_scene(&s).is_err());
        assert!(matches!(
            parse_scenario(b"{\"seed\": 1}"),
            Err(SynthError::Parse { .. })
        ));
    }

    #[test]
    fn scenario_json_round_trip() {
        let mut s = random_scenario(5, 3, 4.0, 25.0);
        s.recommendations = Some(RecommendationScript::Fixed {
            yaw_deg: 10.0,
            pitch_deg: 0.0,
            stride: 3,
        });
        assert_eq!(parse_scenario(s.to_json().as_bytes()).unwrap(), s);
    }
}

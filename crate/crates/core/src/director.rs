//! The shot-by-shot planning loop.
//!
//! For every shot-length slice of the timeline the director measures the
//! scene objects, builds hypotheses for each shot type still allowed by the
//! occurrence limits, scores them and keeps the best. The chosen shot feeds
//! the visited history that damps saliency in later shots.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::config::{ConfigError, DirectorConfig};
use crate::geometry::{angular_distance, Direction, Viewport};
use crate::hypotheses::{generate_hypotheses, score_hypothesis, ShotHypothesis, ShotType};
use crate::measures::{compute_measures, update_history, MeasureError, ObjectMeasures, VisitedHistory};
use crate::saliency::object_saliency;
use crate::tracks::{FrameRange, Scene};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DirectorError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("cannot segment an empty timeline")]
    NoFrames,
    #[error("invalid timing: fps {fps}, shot length {shot_length_s} s")]
    BadTiming { fps: f64, shot_length_s: f64 },
}

/// A chosen shot.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    pub shot_type: ShotType,
    pub range: FrameRange,
    pub path: Vec<Viewport>,
    pub score: f64,
    pub target_ids: Vec<String>,
    /// Set when the occurrence limits had to be loosened to pick this shot.
    pub relaxed: bool,
}

impl Shot {
    pub fn from_hypothesis(h: ShotHypothesis, relaxed: bool) -> Self {
        Self {
            shot_type: h.shot_type,
            range: h.range,
            path: h.path,
            score: h.score,
            target_ids: h.target_ids,
            relaxed,
        }
    }

    pub fn end_center(&self) -> Option<Direction> {
        self.path.last().map(|vp| vp.center())
    }
}

/// Which occurrence rules were dropped to find an eligible type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Relaxation {
    None,
    /// The at-most-C-in-N window was ignored.
    Window,
    /// Both the window and the no-repeat rule were ignored.
    NoRepeat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eligibility {
    pub types: Vec<ShotType>,
    pub relaxation: Relaxation,
}

fn types_at(recent: &[ShotType], cfg: &DirectorConfig, level: Relaxation) -> Vec<ShotType> {
    let window = &recent[recent.len().saturating_sub(cfg.occurrence_window)..];
    ShotType::ALL
        .into_iter()
        .filter(|t| {
            let repeat = cfg.no_repeat && recent.last() == Some(t);
            let capped = window.iter().filter(|w| *w == t).count() >= cfg.occurrence_cap;
            match level {
                Relaxation::None => !repeat && !capped,
                Relaxation::Window => !repeat,
                Relaxation::NoRepeat => true,
            }
        })
        .collect()
}

/// Shot types allowed after `recent` (oldest first). Never empty: the window
/// rule is dropped first, then no-repeat.
pub fn eligible_types(recent: &[ShotType], cfg: &DirectorConfig) -> Eligibility {
    for level in [Relaxation::None, Relaxation::Window, Relaxation::NoRepeat] {
        let types = types_at(recent, cfg, level);
        if !types.is_empty() {
            return Eligibility {
                types,
                relaxation: level,
            };
        }
    }
    unreachable!("the fully relaxed level admits every type")
}

/// Splits `[0, num_frames)` into shots of `round(fps * shot_length_s)`
/// frames. A trailing remainder shorter than half a shot joins the last shot.
pub fn segment_timeline(num_frames: usize, fps: f64, shot_length_s: f64) -> Result<Vec<FrameRange>, DirectorError> {
    if num_frames == 0 {
        return Err(DirectorError::NoFrames);
    }
    if !(fps > 0.0 && shot_length_s > 0.0 && (fps * shot_length_s).is_finite()) {
        return Err(DirectorError::BadTiming { fps, shot_length_s });
    }
    let len = ((fps * shot_length_s).round() as usize).max(1);
    let mut out: Vec<FrameRange> = (0..num_frames / len)
        .map(|i| FrameRange::new(i * len, (i + 1) * len))
        .collect();
    let rest = num_frames % len;
    if rest > 0 {
        match out.last_mut() {
            Some(last) if 2 * rest < len => last.end = num_frames,
            _ => out.push(FrameRange::new(num_frames - rest, num_frames)),
        }
    }
    Ok(out)
}

/// Exponential smoothing on the sphere: each frame moves a fraction
/// `smoothing_alpha` of the way toward its target along the great circle,
/// capped at the maximum angular velocity, with pitch held inside the clamp.
pub fn smooth_path(raw: &[Direction], fps: f64, cfg: &DirectorConfig) -> Vec<Direction> {
    let Some(first) = raw.first() else {
        return Vec::new();
    };
    let max_step = cfg.max_angular_velocity_deg_s.to_radians() / fps;
    let limit = cfg.pitch_clamp();
    let mut out = Vec::with_capacity(raw.len());
    let mut cur = first.with_pitch_clamped(limit);
    out.push(cur);
    for target in &raw[1..] {
        let step = (cfg.smoothing_alpha * angular_distance(&cur, target)).min(max_step);
        cur = cur.rotate_toward(target, step).with_pitch_clamped(limit);
        out.push(cur);
    }
    out
}

/// Scores closer than this are ties. Mirror-image hypotheses (the two pan
/// sweeps, say) can differ in the last bit depending on summation order.
pub const SCORE_TIE_EPS: f64 = 1e-12;

/// Index of the best hypothesis. `candidates` must be in canonical order
/// (shot type order, then generation order); the first of equal scores wins.
pub fn select_best(candidates: &[ShotHypothesis]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, h) in candidates.iter().enumerate() {
        if best.is_none_or(|b| h.score > candidates[b].score + SCORE_TIE_EPS) {
            best = Some(i);
        }
    }
    best
}

/// Everything the director knew when it picked one shot.
#[derive(Debug, Clone)]
pub struct PlannedShot {
    pub shot: Shot,
    pub relaxation: Relaxation,
    /// Scored hypotheses of the level the shot was picked from, canonical order.
    pub candidates: Vec<ShotHypothesis>,
    pub measures: BTreeMap<String, ObjectMeasures>,
}

fn fallback_pan(range: FrameRange, prev: Option<&Shot>, cfg: &DirectorConfig) -> Shot {
    let center = prev
        .and_then(Shot::end_center)
        .unwrap_or(Direction::FORWARD)
        .with_pitch_clamped(cfg.pitch_clamp());
    let vp = Viewport::new(center, cfg.hfov(ShotType::Pan), cfg.aspect).expect("config validated before planning");
    Shot {
        shot_type: ShotType::Pan,
        range,
        path: vec![vp; range.len()],
        score: 0.0,
        target_ids: Vec::new(),
        relaxed: true,
    }
}

/// Plans the shot covering `range` given what came before.
pub fn plan_next_shot(
    scene: &Scene,
    range: FrameRange,
    history: &VisitedHistory,
    chosen_types: &[ShotType],
    prev: Option<&Shot>,
    cfg: &DirectorConfig,
) -> Result<PlannedShot, DirectorError> {
    let measures = compute_measures(scene, range, history, &cfg.measures)?;
    let start = eligible_types(chosen_types, cfg).relaxation;
    for level in [Relaxation::None, Relaxation::Window, Relaxation::NoRepeat] {
        if level < start {
            continue;
        }
        let types = types_at(chosen_types, cfg, level);
        let candidates: Vec<ShotHypothesis> = types
            .iter()
            .flat_map(|&t| generate_hypotheses(t, scene, range, &measures, prev, cfg))
            .map(|h| score_hypothesis(h, scene, &measures, prev, cfg))
            .collect();
        if let Some(i) = select_best(&candidates) {
            let relaxed = level != Relaxation::None;
            return Ok(PlannedShot {
                shot: Shot::from_hypothesis(candidates[i].clone(), relaxed),
                relaxation: level,
                candidates,
                measures,
            });
        }
    }
    Ok(PlannedShot {
        shot: fallback_pan(range, prev, cfg),
        relaxation: Relaxation::NoRepeat,
        candidates: Vec::new(),
        measures,
    })
}

/// Per-shot record of the planning inputs, for inspection and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotDiagnostics {
    pub relaxation: Relaxation,
    pub candidates: usize,
    pub measures: BTreeMap<String, ObjectMeasures>,
    /// Saliency of every measured object under every shot type.
    pub saliency: BTreeMap<String, BTreeMap<ShotType, f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectorOutput {
    pub fps: f64,
    pub shots: Vec<Shot>,
    /// One viewport per scene frame; the shot paths back to back.
    pub camera_path: Vec<Viewport>,
    pub diagnostics: Vec<ShotDiagnostics>,
}

/// Runs the whole director over `scene`.
pub fn direct(scene: &Scene, cfg: &DirectorConfig) -> Result<DirectorOutput, DirectorError> {
    cfg.validate()?;
    let ranges = segment_timeline(scene.num_frames(), scene.fps(), cfg.shot_length_s)?;
    let mut history = VisitedHistory::new(cfg.measures.history_len);
    let mut chosen_types = Vec::with_capacity(ranges.len());
    let mut shots: Vec<Shot> = Vec::with_capacity(ranges.len());
    let mut diagnostics = Vec::with_capacity(ranges.len());

    for range in ranges {
        let planned = plan_next_shot(scene, range, &history, &chosen_types, shots.last(), cfg)?;
        let saliency = planned
            .measures
            .iter()
            .filter_map(|(id, m)| {
                let obj = scene.object(id)?;
                let per_type = ShotType::ALL
                    .into_iter()
                    .map(|t| (t, object_saliency(m, &obj.category, t, &cfg.saliency)))
                    .collect();
                Some((id.clone(), per_type))
            })
            .collect();
        diagnostics.push(ShotDiagnostics {
            relaxation: planned.relaxation,
            candidates: planned.candidates.len(),
            measures: planned.measures,
            saliency,
        });
        history = update_history(&history, &planned.shot, scene, &cfg.measures);
        chosen_types.push(planned.shot.shot_type);
        shots.push(planned.shot);
    }

    let camera_path = shots.iter().flat_map(|s| s.path.iter().copied()).collect();
    Ok(DirectorOutput {
        fps: scene.fps(),
        shots,
        camera_path,
        diagnostics,
    })
}

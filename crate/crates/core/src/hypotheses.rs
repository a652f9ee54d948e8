//! Candidate shots ("hypotheses") per shot type, and their scores.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::DirectorConfig;
use crate::director::{smooth_path, Shot};
use crate::geometry::{self, angular_distance, project_to_viewport, Direction, Viewport};
use crate::measures::ObjectMeasures;
use crate::saliency::object_saliency;
use crate::tracks::{FrameRange, Scene};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShotType {
    Tracking,
    Static,
    Medium,
    Pan,
    Recommender,
}

impl ShotType {
    /// Also the tie-break order when two hypotheses score the same.
    pub const ALL: [ShotType; 5] = [
        ShotType::Tracking,
        ShotType::Static,
        ShotType::Medium,
        ShotType::Pan,
        ShotType::Recommender,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ShotType::Tracking => "tracking",
            ShotType::Static => "static",
            ShotType::Medium => "medium",
            ShotType::Pan => "pan",
            ShotType::Recommender => "recommender",
        }
    }

    pub fn parse(s: &str) -> Option<ShotType> {
        ShotType::ALL.into_iter().find(|t| t.as_str() == s)
    }

    pub fn index(&self) -> usize {
        *self as usize
    }
}

impl fmt::Display for ShotType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotHypothesis {
    pub shot_type: ShotType,
    pub range: FrameRange,
    /// One viewport per frame of `range`.
    pub path: Vec<Viewport>,
    pub target_ids: Vec<String>,
    pub raw_score: f64,
    pub penalty: f64,
    pub score: f64,
}

impl ShotHypothesis {
    fn unscored(shot_type: ShotType, range: FrameRange, path: Vec<Viewport>, target_ids: Vec<String>) -> Self {
        Self {
            shot_type,
            range,
            path,
            target_ids,
            raw_score: 0.0,
            penalty: 0.0,
            score: 0.0,
        }
    }

    pub fn start_center(&self) -> Option<Direction> {
        self.path.first().map(|vp| vp.center())
    }

    /// Checks path length, constant per-type FOV and the pitch comfort clamp.
    pub fn check_invariants(&self, cfg: &DirectorConfig) -> Result<(), String> {
        if self.path.len() != self.range.len() {
            return Err(format!(
                "path has {} viewports for {} frames",
                self.path.len(),
                self.range.len()
            ));
        }
        let hfov = cfg.hfov(self.shot_type);
        let limit = cfg.pitch_clamp() + 1e-12;
        for (i, vp) in self.path.iter().enumerate() {
            if vp.hfov() != hfov {
                return Err(format!("frame {i}: hfov {} != {hfov}", vp.hfov()));
            }
            if vp.center().pitch().abs() > limit {
                return Err(format!("frame {i}: pitch {} beyond clamp", vp.center().pitch()));
            }
        }
        if (self.score - (self.raw_score - self.penalty)).abs() > 1e-12 || self.penalty < 0.0 {
            return Err("score is not raw_score - penalty".into());
        }
        Ok(())
    }
}

/// Eligible objects ranked by saliency for `shot_type`, highest first, ties by id.
pub fn ranked_targets<'a>(
    scene: &Scene,
    measures: &'a BTreeMap<String, ObjectMeasures>,
    shot_type: ShotType,
    cfg: &DirectorConfig,
) -> Vec<(&'a str, f64, &'a ObjectMeasures)> {
    let mut ranked: Vec<_> = measures
        .iter()
        .filter(|(_, m)| m.presence >= cfg.min_presence)
        .filter_map(|(id, m)| {
            let obj = scene.object(id)?;
            Some((
                id.as_str(),
                object_saliency(m, &obj.category, shot_type, &cfg.saliency),
                m,
            ))
        })
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked
}

fn viewport(center: Direction, shot_type: ShotType, cfg: &DirectorConfig) -> Viewport {
    Viewport::new(
        center.with_pitch_clamped(cfg.pitch_clamp()),
        cfg.hfov(shot_type),
        cfg.aspect,
    )
    .expect("config validated before planning")
}

fn fixed_path(center: Direction, shot_type: ShotType, range: FrameRange, cfg: &DirectorConfig) -> Vec<Viewport> {
    vec![viewport(center, shot_type, cfg); range.len()]
}

/// Fills frames without a value by holding the previous one; leading gaps
/// take the first known value.
fn hold_fill(values: &[Option<Direction>]) -> Option<Vec<Direction>> {
    let first = values.iter().flatten().next().copied()?;
    let mut last = first;
    Some(
        values
            .iter()
            .map(|v| {
                if let Some(d) = v {
                    last = *d;
                }
                last
            })
            .collect(),
    )
}

fn tracking(
    scene: &Scene,
    range: FrameRange,
    measures: &BTreeMap<String, ObjectMeasures>,
    cfg: &DirectorConfig,
) -> Vec<ShotHypothesis> {
    let gap = cfg.measures.max_gap_frames;
    ranked_targets(scene, measures, ShotType::Tracking, cfg)
        .into_iter()
        .take(3)
        .filter_map(|(id, _, _)| {
            let obj = scene.object(id)?;
            let raw: Vec<_> = range.frames().map(|f| scene.center_at(obj, f, gap)).collect();
            let centers = smooth_path(&hold_fill(&raw)?, scene.fps(), cfg);
            let path = centers
                .into_iter()
                .map(|c| viewport(c, ShotType::Tracking, cfg))
                .collect();
            Some(ShotHypothesis::unscored(
                ShotType::Tracking,
                range,
                path,
                vec![id.to_string()],
            ))
        })
        .collect()
}

fn static_shots(
    scene: &Scene,
    range: FrameRange,
    measures: &BTreeMap<String, ObjectMeasures>,
    cfg: &DirectorConfig,
) -> Vec<ShotHypothesis> {
    let ranked = ranked_targets(scene, measures, ShotType::Static, cfg);
    let threshold = cfg.cluster_threshold_deg.to_radians();
    let mut assigned = vec![false; ranked.len()];
    let mut out = Vec::new();
    while out.len() < 3 {
        let Some(seed) = assigned.iter().position(|a| !a) else {
            break;
        };
        let seed_center = ranked[seed].2.mean_center;
        let mut members = Vec::new();
        for (i, (_, _, m)) in ranked.iter().enumerate() {
            if !assigned[i] && angular_distance(&seed_center, &m.mean_center) <= threshold {
                assigned[i] = true;
                members.push(i);
            }
        }
        let center = geometry::mean_direction(members.iter().map(|&i| (&ranked[i].2.mean_center, ranked[i].1)))
            .or_else(|| geometry::mean_direction(members.iter().map(|&i| (&ranked[i].2.mean_center, 1.0))))
            .unwrap_or(seed_center);
        let ids = members.iter().map(|&i| ranked[i].0.to_string()).collect();
        out.push(ShotHypothesis::unscored(
            ShotType::Static,
            range,
            fixed_path(center, ShotType::Static, range, cfg),
            ids,
        ));
    }
    out
}

fn medium(
    scene: &Scene,
    range: FrameRange,
    measures: &BTreeMap<String, ObjectMeasures>,
    cfg: &DirectorConfig,
) -> Vec<ShotHypothesis> {
    ranked_targets(scene, measures, ShotType::Medium, cfg)
        .into_iter()
        .take(3)
        .map(|(id, _, m)| {
            ShotHypothesis::unscored(
                ShotType::Medium,
                range,
                fixed_path(m.mean_center, ShotType::Medium, range, cfg),
                vec![id.to_string()],
            )
        })
        .collect()
}

fn pan(
    scene: &Scene,
    range: FrameRange,
    measures: &BTreeMap<String, ObjectMeasures>,
    prev: Option<&Shot>,
    cfg: &DirectorConfig,
) -> Vec<ShotHypothesis> {
    let prev_end = prev.and_then(|s| s.end_center());
    let start_yaw = prev_end.map_or(0.0, |d| d.yaw());
    let ranked = ranked_targets(scene, measures, ShotType::Pan, cfg);
    let total: f64 = ranked.iter().map(|r| r.1).sum();
    let pitch = if total > 0.0 {
        ranked.iter().map(|r| r.1 * r.2.mean_center.pitch()).sum::<f64>() / total
    } else {
        prev_end.map_or(0.0, |d| d.pitch())
    };
    let sweep = cfg.pan_sweep_deg.to_radians();
    let n = range.len() as f64;
    [1.0, -1.0]
        .into_iter()
        .map(|sign| {
            let path = (0..range.len())
                .map(|i| {
                    let yaw = start_yaw + sign * sweep * i as f64 / n;
                    viewport(Direction::clamped(yaw, pitch), ShotType::Pan, cfg)
                })
                .collect();
            ShotHypothesis::unscored(ShotType::Pan, range, path, Vec::new())
        })
        .collect()
}

/// Recommended direction per frame of `range`: held from the latest earlier
/// annotation, or blended along the great circle between the bracketing ones.
/// Frames before the first annotation take the first one.
pub fn recommendation_fill(scene: &Scene, range: FrameRange, blend: bool) -> Option<Vec<Direction>> {
    let recs = scene.recommendations();
    if recs.is_empty() {
        return None;
    }
    Some(
        range
            .frames()
            .map(|f| {
                let next = recs.partition_point(|r| r.frame < f);
                match (next.checked_sub(1).map(|i| &recs[i]), recs.get(next)) {
                    (_, Some(n)) if n.frame == f => n.direction,
                    (None, Some(n)) => n.direction,
                    (Some(p), None) => p.direction,
                    (Some(p), Some(n)) if blend => {
                        let t = (f - p.frame) as f64 / (n.frame - p.frame) as f64;
                        p.direction
                            .rotate_toward(&n.direction, t * angular_distance(&p.direction, &n.direction))
                    }
                    (Some(p), Some(_)) => p.direction,
                    (None, None) => unreachable!("recommendations are non-empty"),
                }
            })
            .collect(),
    )
}

fn recommender(
    scene: &Scene,
    range: FrameRange,
    measures: &BTreeMap<String, ObjectMeasures>,
    cfg: &DirectorConfig,
) -> Vec<ShotHypothesis> {
    let recs = scene.recommendations();
    let covered = recs.iter().filter(|r| range.contains(r.frame)).count();
    if recs.is_empty() || (covered as f64) < cfg.recommender_min_coverage * range.len() as f64 {
        return Vec::new();
    }
    let gap = cfg.measures.max_gap_frames;
    let ranked = ranked_targets(scene, measures, ShotType::Recommender, cfg);
    [false, true]
        .into_iter()
        .filter_map(|blend| {
            let raw = recommendation_fill(scene, range, blend)?;
            let centers = smooth_path(&raw, scene.fps(), cfg);
            let path: Vec<Viewport> = centers
                .into_iter()
                .map(|c| viewport(c, ShotType::Recommender, cfg))
                .collect();
            // targets: eligible objects framed on at least half of their present frames
            let targets = ranked
                .iter()
                .filter(|(id, _, _)| {
                    let Some(obj) = scene.object(id) else { return false };
                    let (mut present, mut framed) = (0usize, 0usize);
                    for (f, vp) in range.frames().zip(&path) {
                        if let Some(d) = scene.center_at(obj, f, gap) {
                            present += 1;
                            if centered_weight(&d, vp) > 0.0 {
                                framed += 1;
                            }
                        }
                    }
                    present > 0 && 2 * framed >= present
                })
                .map(|(id, _, _)| id.to_string())
                .collect();
            Some(ShotHypothesis::unscored(ShotType::Recommender, range, path, targets))
        })
        .collect()
}

/// Builds the candidate shots of one type for `range`. Deterministic; the
/// list is capped at `cfg.max_hypotheses_per_type` and may be empty.
pub fn generate_hypotheses(
    shot_type: ShotType,
    scene: &Scene,
    range: FrameRange,
    measures: &BTreeMap<String, ObjectMeasures>,
    prev: Option<&Shot>,
    cfg: &DirectorConfig,
) -> Vec<ShotHypothesis> {
    if range.is_empty() {
        return Vec::new();
    }
    let mut out = match shot_type {
        ShotType::Tracking => tracking(scene, range, measures, cfg),
        ShotType::Static => static_shots(scene, range, measures, cfg),
        ShotType::Medium => medium(scene, range, measures, cfg),
        ShotType::Pan => pan(scene, range, measures, prev, cfg),
        ShotType::Recommender => recommender(scene, range, measures, cfg),
    };
    out.truncate(cfg.max_hypotheses_per_type);
    out
}

/// Framing quality: 1 at the viewport center, falling linearly to 0 at half
/// the horizontal field of view.
pub fn centered_weight(obj_dir: &Direction, vp: &Viewport) -> f64 {
    (1.0 - angular_distance(obj_dir, &vp.center()) / (vp.hfov() / 2.0)).max(0.0)
}

/// Jump-cut penalty for cutting from `prev` into `h`: charged when the new
/// framing starts close to, but not exactly at, the previous end. Tracking
/// the same targets again counts as a continuation.
pub fn jump_cut_penalty(h: &ShotHypothesis, prev: Option<&Shot>, cfg: &DirectorConfig) -> f64 {
    let (Some(prev), Some(start)) = (prev, h.start_center()) else {
        return 0.0;
    };
    let Some(end) = prev.end_center() else {
        return 0.0;
    };
    let continuation =
        h.shot_type == ShotType::Tracking && prev.shot_type == ShotType::Tracking && h.target_ids == prev.target_ids;
    let d = angular_distance(&end, &start);
    if d > 0.0 && d < cfg.jump_cut_threshold() && !continuation {
        cfg.jump_cut_penalty
    } else {
        0.0
    }
}

/// Mean over frames of the saliency-weighted framing of every present object,
/// minus the jump-cut penalty.
pub fn score_hypothesis(
    mut h: ShotHypothesis,
    scene: &Scene,
    measures: &BTreeMap<String, ObjectMeasures>,
    prev: Option<&Shot>,
    cfg: &DirectorConfig,
) -> ShotHypothesis {
    let gap = cfg.measures.max_gap_frames;
    let weighted: Vec<_> = scene
        .objects()
        .iter()
        .filter_map(|o| {
            let m = measures.get(&o.id)?;
            Some((o, object_saliency(m, &o.category, h.shot_type, &cfg.saliency)))
        })
        .collect();
    let total: f64 = h
        .range
        .frames()
        .zip(&h.path)
        .map(|(f, vp)| {
            weighted
                .iter()
                .filter_map(|(o, s)| scene.center_at(o, f, gap).map(|d| s * centered_weight(&d, vp)))
                .sum::<f64>()
        })
        .sum();
    h.raw_score = if h.path.is_empty() {
        0.0
    } else {
        total / h.path.len() as f64
    };
    h.penalty = jump_cut_penalty(&h, prev, cfg);
    h.score = h.raw_score - h.penalty;
    h
}

/// True when `d` lands inside the frame of `vp`.
pub fn in_frame(d: &Direction, vp: &Viewport) -> bool {
    project_to_viewport(d, vp).is_some_and(|(u, v)| (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::EquirectBBox;
    use crate::measures::{compute_measures, VisitedHistory};
    use crate::tracks::{ObjectTrack, Recommendation, Sample};
    use proptest::prelude::*;

    const W: u32 = 3600;
    const H: u32 = 1800;

    fn box_at(yaw_deg: f64, pitch_deg: f64) -> EquirectBBox {
        let cx = (yaw_deg + 180.0) * 10.0;
        let cy = (90.0 - pitch_deg) * 10.0;
        EquirectBBox::new(cx - 40.0, cy - 80.0, 80.0, 160.0)
    }

    fn object(id: &str, category: &str, frames: usize, pos: impl Fn(usize) -> (f64, f64)) -> ObjectTrack {
        let samples = (0..frames)
            .map(|f| {
                let (y, p) = pos(f);
                Sample {
                    frame: f,
                    bbox: box_at(y, p),
                }
            })
            .collect();
        ObjectTrack::new(id, category, samples).unwrap()
    }

    fn setup(
        objects: Vec<ObjectTrack>,
        recs: Option<Vec<Recommendation>>,
    ) -> (Scene, BTreeMap<String, ObjectMeasures>) {
        let scene = Scene::new(30.0, W, H, 90, objects, recs).unwrap();
        let m = compute_measures(&scene, scene.full_range(), &VisitedHistory::new(3), &Default::default()).unwrap();
        (scene, m)
    }

    fn gen(t: ShotType, scene: &Scene, m: &BTreeMap<String, ObjectMeasures>) -> Vec<ShotHypothesis> {
        generate_hypotheses(t, scene, scene.full_range(), m, None, &DirectorConfig::default())
    }

    #[test]
    fn empty_scene_only_pans() {
        let (scene, m) = setup(vec![], None);
        for t in ShotType::ALL {
            let n = gen(t, &scene, &m).len();
            assert_eq!(n, if t == ShotType::Pan { 2 } else { 0 }, "{t}");
        }
    }

    #[test]
    fn single_mover_gives_one_tracking_shot() {
        let (scene, m) = setup(vec![object("solo", "human", 90, |f| (f as f64 / 3.0, 0.0))], None);
        let hs = gen(ShotType::Tracking, &scene, &m);
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].target_ids, vec!["solo".to_string()]);
        assert!(hs
            .iter()
            .all(|h| h.path.iter().all(|vp| vp.hfov() == 75f64.to_radians())));
    }

    // Independent re-implementation of the smoothing recurrence, by yaw/pitch slerp.
    fn smoothing_oracle(raw: &[Direction], fps: f64, cfg: &DirectorConfig) -> Vec<Direction> {
        let max_step = cfg.max_angular_velocity_deg_s.to_radians() / fps;
        let limit = cfg.pitch_clamp();
        let mut out = vec![raw[0].with_pitch_clamped(limit)];
        for target in &raw[1..] {
            let cur = *out.last().unwrap();
            let a = cur.to_vector();
            let b = target.to_vector();
            let omega = a.dot(&b).clamp(-1.0, 1.0).acos();
            let step = (cfg.smoothing_alpha * omega).min(max_step);
            let next = if omega < 1e-15 {
                *target
            } else {
                let t = step / omega;
                let (s0, s1) = (((1.0 - t) * omega).sin(), (t * omega).sin());
                Direction::from_vector(a.scale(s0 / omega.sin()).add(&b.scale(s1 / omega.sin())))
            };
            out.push(next.with_pitch_clamped(limit));
        }
        out
    }

    #[test]
    fn recommender_follows_smoothed_annotations() {
        let recs: Vec<_> = (0..90)
            .map(|f| Recommendation::from_degrees(f, -30.0 + f as f64 * 0.8, 10.0 * (f as f64 / 20.0).sin()).unwrap())
            .collect();
        let raw: Vec<Direction> = recs.iter().map(|r| r.direction).collect();
        let (scene, m) = setup(vec![], Some(recs));
        let hs = gen(ShotType::Recommender, &scene, &m);
        assert_eq!(hs.len(), 2);
        let oracle = smoothing_oracle(&raw, 30.0, &DirectorConfig::default());
        for h in &hs {
            for (vp, o) in h.path.iter().zip(&oracle) {
                assert!(angular_distance(&vp.center(), o) < 1e-9);
            }
        }
    }

    #[test]
    fn recommender_needs_coverage() {
        let recs: Vec<_> = (0..44)
            .map(|f| Recommendation::from_degrees(f, 0.0, 0.0).unwrap())
            .collect();
        let (scene, m) = setup(vec![], Some(recs));
        assert!(gen(ShotType::Recommender, &scene, &m).is_empty());
        let recs: Vec<_> = (0..45)
            .map(|f| Recommendation::from_degrees(f * 2, 0.0, 0.0).unwrap())
            .collect();
        let (scene, m) = setup(vec![], Some(recs));
        assert_eq!(gen(ShotType::Recommender, &scene, &m).len(), 2);
    }

    #[test]
    fn recommendation_fill_modes() {
        let recs = vec![
            Recommendation::from_degrees(10, 0.0, 0.0).unwrap(),
            Recommendation::from_degrees(20, 20.0, 0.0).unwrap(),
        ];
        let scene = Scene::new(30.0, W, H, 30, vec![], Some(recs)).unwrap();
        let held = recommendation_fill(&scene, scene.full_range(), false).unwrap();
        let blended = recommendation_fill(&scene, scene.full_range(), true).unwrap();
        assert_eq!(held[0].yaw(), 0.0);
        assert_eq!(held[15].yaw(), 0.0);
        assert!((blended[15].yaw_deg() - 10.0).abs() < 1e-9);
        assert!((held[29].yaw_deg() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn static_clusters_group_nearby_objects() {
        let (scene, m) = setup(
            vec![
                object("a", "human", 90, |_| (0.0, 0.0)),
                object("b", "human", 90, |_| (20.0, 0.0)),
                object("c", "human", 90, |_| (150.0, 0.0)),
            ],
            None,
        );
        let hs = gen(ShotType::Static, &scene, &m);
        assert_eq!(hs.len(), 2);
        let group = hs.iter().find(|h| h.target_ids.len() == 2).unwrap();
        let yaw = group.path[0].center().yaw_deg();
        assert!(yaw > 0.0 && yaw < 20.0);
        assert!(hs.iter().all(|h| h.path[0].hfov() == 115f64.to_radians()));
    }

    #[test]
    fn pan_starts_at_previous_end() {
        let (scene, m) = setup(vec![], None);
        let cfg = DirectorConfig::default();
        let prev_vp = Viewport::new(Direction::from_degrees(40.0, 5.0).unwrap(), 1.0, 1.5).unwrap();
        let prev = Shot {
            shot_type: ShotType::Static,
            range: FrameRange::new(0, 1),
            path: vec![prev_vp],
            score: 0.0,
            target_ids: vec![],
            relaxed: false,
        };
        let hs = generate_hypotheses(ShotType::Pan, &scene, scene.full_range(), &m, Some(&prev), &cfg);
        for (h, sign) in hs.iter().zip([1.0, -1.0]) {
            let start = h.path[0].center();
            assert!((start.yaw_deg() - 40.0).abs() < 1e-9);
            assert!((start.pitch_deg() - 5.0).abs() < 1e-9);
            let step = (h.path[1].center().yaw_deg() - start.yaw_deg()) * sign;
            assert!((step - 1.0).abs() < 1e-9, "30 deg/s at 30 fps");
        }
    }

    #[test]
    fn centered_weight_examples() {
        let vp = Viewport::new(Direction::FORWARD, 80f64.to_radians(), 1.0).unwrap();
        assert_eq!(centered_weight(&Direction::FORWARD, &vp), 1.0);
        let edge = Direction::from_degrees(40.0, 0.0).unwrap();
        assert!(centered_weight(&edge, &vp).abs() < 1e-12);
        let quarter = Direction::from_degrees(0.0, 20.0).unwrap();
        assert!((centered_weight(&quarter, &vp) - 0.5).abs() < 1e-12);
        let far = Direction::from_degrees(100.0, 0.0).unwrap();
        assert_eq!(centered_weight(&far, &vp), 0.0);
    }

    fn prev_shot(shot_type: ShotType, end_yaw_deg: f64, targets: &[&str]) -> Shot {
        let vp = Viewport::new(Direction::from_degrees(end_yaw_deg, 0.0).unwrap(), 1.3, 16.0 / 9.0).unwrap();
        Shot {
            shot_type,
            range: FrameRange::new(0, 2),
            path: vec![vp; 2],
            score: 0.0,
            target_ids: targets.iter().map(|s| s.to_string()).collect(),
            relaxed: false,
        }
    }

    #[test]
    fn jump_cut_penalty_difference() {
        let (scene, m) = setup(vec![object("a", "human", 90, |_| (10.0, 0.0))], None);
        let cfg = DirectorConfig::default();
        let prev = prev_shot(ShotType::Static, 0.0, &[]);
        let make = |yaw: f64| {
            let vp = Viewport::new(
                Direction::from_degrees(yaw, 0.0).unwrap(),
                cfg.hfov(ShotType::Medium),
                cfg.aspect,
            )
            .unwrap();
            ShotHypothesis::unscored(ShotType::Medium, scene.full_range(), vec![vp; 90], vec![])
        };
        let near = score_hypothesis(make(20.0), &scene, &m, Some(&prev), &cfg);
        let far = score_hypothesis(make(40.0), &scene, &m, Some(&prev), &cfg);
        assert_eq!(near.penalty, 0.5);
        assert_eq!(far.penalty, 0.0);
        assert_eq!(near.raw_score - near.score, 0.5);
        assert_eq!(far.raw_score, far.score);

        // with nothing to frame the raw scores match, so the scores differ by the penalty alone
        let (empty, none) = setup(vec![], None);
        let make_empty = |yaw: f64| {
            let vp = Viewport::new(
                Direction::from_degrees(yaw, 0.0).unwrap(),
                cfg.hfov(ShotType::Medium),
                cfg.aspect,
            )
            .unwrap();
            ShotHypothesis::unscored(ShotType::Medium, empty.full_range(), vec![vp; 90], vec![])
        };
        let near = score_hypothesis(make_empty(20.0), &empty, &none, Some(&prev), &cfg);
        let far = score_hypothesis(make_empty(40.0), &empty, &none, Some(&prev), &cfg);
        assert_eq!(far.score - near.score, 0.5);

        // identical cut (0 degrees) is not a jump cut
        let same = score_hypothesis(make(0.0), &scene, &m, Some(&prev), &cfg);
        assert_eq!(same.penalty, 0.0);
    }

    #[test]
    fn tracking_continuation_is_exempt() {
        let (scene, m) = setup(vec![object("a", "human", 90, |_| (20.0, 0.0))], None);
        let cfg = DirectorConfig::default();
        let hs = generate_hypotheses(ShotType::Tracking, &scene, scene.full_range(), &m, None, &cfg);
        let h = hs.into_iter().next().unwrap();
        let same = prev_shot(ShotType::Tracking, 0.0, &["a"]);
        let other = prev_shot(ShotType::Tracking, 0.0, &["b"]);
        assert_eq!(score_hypothesis(h.clone(), &scene, &m, Some(&same), &cfg).penalty, 0.0);
        assert_eq!(score_hypothesis(h, &scene, &m, Some(&other), &cfg).penalty, 0.5);
    }

    #[test]
    fn empty_scene_scores_zero() {
        let (scene, m) = setup(vec![], None);
        for h in gen(ShotType::Pan, &scene, &m) {
            let s = score_hypothesis(h, &scene, &m, None, &DirectorConfig::default());
            assert_eq!(s.raw_score, 0.0);
        }
    }

    fn scene_strategy() -> impl Strategy<Value = Vec<(f64, f64, f64, usize)>> {
        proptest::collection::vec((-180.0..180.0f64, -60.0..60.0f64, -2.0..2.0f64, 0usize..4), 0..5)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn generated_hypotheses_hold_invariants(spec in scene_strategy(), with_recs in any::<bool>()) {
            let cats = ["human", "dog", "car", "kite"];
            let objs = spec.iter().enumerate()
                .map(|(i, &(y, p, v, c))| object(&format!("o{i}"), cats[c], 90, move |f| (y + v * f as f64, p)))
                .collect();
            let recs = with_recs.then(|| (0..90).step_by(2)
                .map(|f| Recommendation::from_degrees(f, f as f64, 60.0).unwrap()).collect());
            let (scene, m) = setup(objs, recs);
            let cfg = DirectorConfig::default();
            let prev = prev_shot(ShotType::Tracking, 5.0, &["o0"]);
            for t in ShotType::ALL {
                let a = generate_hypotheses(t, &scene, scene.full_range(), &m, Some(&prev), &cfg);
                let b = generate_hypotheses(t, &scene, scene.full_range(), &m, Some(&prev), &cfg);
                prop_assert_eq!(&a, &b);
                prop_assert!(a.len() <= cfg.max_hypotheses_per_type);
                for h in a {
                    let s = score_hypothesis(h, &scene, &m, Some(&prev), &cfg);
                    prop_assert!(s.check_invariants(&cfg).is_ok(), "{:?}", s.check_invariants(&cfg));
                    prop_assert!(s.raw_score >= 0.0);
                    prop_assert!(s.penalty == 0.0 || s.penalty == cfg.jump_cut_penalty);
                }
            }
        }

        #[test]
        fn raising_saliency_never_lowers_raw_score(bump in 0.0..0.5f64) {
            let (scene, m) = setup(vec![
                object("a", "human", 90, |f| (f as f64 * 0.2, 0.0)),
                object("b", "dog", 90, |_| (30.0, 5.0)),
            ], None);
            let cfg = DirectorConfig::default();
            let h = generate_hypotheses(ShotType::Medium, &scene, scene.full_range(), &m, None, &cfg)
                .into_iter().find(|h| h.target_ids == ["a"]).unwrap();
            let base = score_hypothesis(h.clone(), &scene, &m, None, &cfg).raw_score;
            let mut more = m.clone();
            let a = more.get_mut("a").unwrap();
            a.size = (a.size + bump).min(1.0);
            a.motion = (a.motion + bump).min(1.0);
            prop_assert!(score_hypothesis(h, &scene, &more, None, &cfg).raw_score >= base);
        }
    }
}

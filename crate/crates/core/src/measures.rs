//! The four per-object measures over a shot range (size, motion,
//! neighbourhood, visited) and the rolling visibility history behind the
//! visited score.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::director::Shot;
use crate::geometry::{self, angular_distance, project_to_viewport, Direction, Viewport};
use crate::tracks::{FrameRange, Scene};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("empty frame range")]
    EmptyRange,
    #[error("frame range [{start}, {end}) exceeds scene length {num_frames}")]
    RangeOutOfBounds {
        start: usize,
        end: usize,
        num_frames: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureConfig {
    /// Side of the equatorial square patch that counts as size 1.
    pub size_ref_deg: f64,
    pub motion_ref_deg_s: f64,
    pub neighbourhood_ref_deg: f64,
    /// K: number of recent shots remembered.
    pub history_len: usize,
    /// Geometric decay per step back in history.
    pub visited_decay: f64,
    /// Occlusion gaps up to this many frames are bridged by interpolation.
    pub max_gap_frames: usize,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            size_ref_deg: 30.0,
            motion_ref_deg_s: 20.0,
            neighbourhood_ref_deg: 30.0,
            history_len: 3,
            visited_decay: 0.5,
            max_gap_frames: 15,
        }
    }
}

impl MeasureConfig {
    pub fn size_ref_sr(&self) -> f64 {
        geometry::equatorial_patch_solid_angle(self.size_ref_deg.to_radians())
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.size_ref_deg > 0.0 && self.size_ref_deg <= 180.0) {
            return Err(format!("size_ref_deg = {} must be in (0, 180]", self.size_ref_deg));
        }
        if !(self.motion_ref_deg_s > 0.0 && self.motion_ref_deg_s.is_finite()) {
            return Err(format!("motion_ref_deg_s = {} must be positive", self.motion_ref_deg_s));
        }
        if !(self.neighbourhood_ref_deg > 0.0 && self.neighbourhood_ref_deg.is_finite()) {
            return Err(format!(
                "neighbourhood_ref_deg = {} must be positive",
                self.neighbourhood_ref_deg
            ));
        }
        if self.history_len == 0 {
            return Err("history_len must be at least 1".into());
        }
        if !(self.visited_decay > 0.0 && self.visited_decay < 1.0) {
            return Err(format!("visited_decay = {} must be in (0, 1)", self.visited_decay));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectMeasures {
    pub size: f64,
    pub motion: f64,
    /// 1 when the object is far from everything else.
    pub neighbourhood: f64,
    /// 1 when the object filled the recent shots.
    pub visited: f64,
    pub presence: f64,
    #[serde(skip)]
    pub mean_center: Direction,
}

/// Per-object visibility fractions of the most recent chosen shots, newest first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VisitedHistory {
    capacity: usize,
    entries: VecDeque<BTreeMap<String, f64>>,
}

impl VisitedHistory {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            entries: VecDeque::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Records a shot as the newest entry, evicting the oldest beyond capacity.
    pub fn push(&mut self, visibility: BTreeMap<String, f64>) {
        self.entries.push_front(visibility);
        self.entries.truncate(self.capacity);
    }

    pub fn entries(&self) -> impl Iterator<Item = &BTreeMap<String, f64>> {
        self.entries.iter()
    }

    /// `sum(decay^(k-1) * v_k) / sum(decay^(k-1))` over all K slots; missing
    /// slots and unknown objects count as 0.
    pub fn visited_score(&self, id: &str, decay: f64) -> f64 {
        let norm: f64 = (0..self.capacity).map(|k| decay.powi(k as i32)).sum();
        let acc: f64 = self
            .entries
            .iter()
            .enumerate()
            .map(|(k, e)| decay.powi(k as i32) * e.get(id).copied().unwrap_or(0.0))
            .sum();
        acc / norm
    }
}

fn check_range(scene: &Scene, range: FrameRange) -> Result<(), MeasureError> {
    if range.is_empty() {
        return Err(MeasureError::EmptyRange);
    }
    if range.end > scene.num_frames() {
        return Err(MeasureError::RangeOutOfBounds {
            start: range.start,
            end: range.end,
            num_frames: scene.num_frames(),
        });
    }
    Ok(())
}

/// Computes measures for every object present somewhere in `range`.
pub fn compute_measures(
    scene: &Scene,
    range: FrameRange,
    history: &VisitedHistory,
    cfg: &MeasureConfig,
) -> Result<BTreeMap<String, ObjectMeasures>, MeasureError> {
    check_range(scene, range)?;
    let gap = cfg.max_gap_frames;
    let centers: Vec<Vec<Option<Direction>>> = scene
        .objects()
        .iter()
        .map(|o| range.frames().map(|f| scene.center_at(o, f, gap)).collect())
        .collect();
    let size_ref = cfg.size_ref_sr();
    let n = range.len() as f64;

    let mut out = BTreeMap::new();
    for (i, obj) in scene.objects().iter().enumerate() {
        let own = &centers[i];
        let present: Vec<usize> = (0..own.len()).filter(|&k| own[k].is_some()).collect();
        if present.is_empty() {
            continue;
        }

        let area: f64 = present
            .iter()
            .filter_map(|&k| scene.solid_angle_at(obj, range.start + k, gap))
            .sum();
        let size = (area / present.len() as f64 / size_ref).min(1.0);

        let steps: Vec<f64> = own
            .windows(2)
            .filter_map(|w| Some(angular_distance(&w[0]?, &w[1]?).to_degrees()))
            .collect();
        let speed = if steps.is_empty() {
            0.0
        } else {
            steps.iter().sum::<f64>() / steps.len() as f64 * scene.fps()
        };
        let motion = speed / (speed + cfg.motion_ref_deg_s);

        // frames where the object is alone do not contribute
        let nearest: Vec<f64> = present
            .iter()
            .filter_map(|&k| {
                let me = own[k].unwrap();
                centers
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .filter_map(|(_, c)| c[k].map(|d| angular_distance(&me, &d).to_degrees()))
                    .min_by(f64::total_cmp)
            })
            .collect();
        let neighbourhood = if nearest.is_empty() {
            1.0
        } else {
            let d = nearest.iter().sum::<f64>() / nearest.len() as f64;
            d / (d + cfg.neighbourhood_ref_deg)
        };

        let first = own[present[0]].unwrap();
        let mean_center =
            geometry::mean_direction(present.iter().map(|&k| (own[k].as_ref().unwrap(), 1.0))).unwrap_or(first);

        out.insert(
            obj.id.clone(),
            ObjectMeasures {
                size,
                motion,
                neighbourhood,
                visited: history.visited_score(&obj.id, cfg.visited_decay),
                presence: present.len() as f64 / n,
                mean_center,
            },
        );
    }
    Ok(out)
}

/// Fraction of `range` frames in which each object's center projects inside
/// the corresponding viewport of `path`.
pub fn visibility_fractions(
    scene: &Scene,
    range: FrameRange,
    path: &[Viewport],
    max_gap: usize,
) -> BTreeMap<String, f64> {
    let n = range.len().max(1) as f64;
    scene
        .objects()
        .iter()
        .map(|o| {
            let inside = range
                .frames()
                .zip(path)
                .filter(|&(f, vp)| {
                    scene
                        .center_at(o, f, max_gap)
                        .and_then(|d| project_to_viewport(&d, vp))
                        .is_some_and(|(u, v)| (0.0..=1.0).contains(&u) && (0.0..=1.0).contains(&v))
                })
                .count();
            (o.id.clone(), inside as f64 / n)
        })
        .collect()
}

pub fn update_history(history: &VisitedHistory, chosen: &Shot, scene: &Scene, cfg: &MeasureConfig) -> VisitedHistory {
    let mut next = history.clone();
    next.push(visibility_fractions(
        scene,
        chosen.range,
        &chosen.path,
        cfg.max_gap_frames,
    ));
    next
}

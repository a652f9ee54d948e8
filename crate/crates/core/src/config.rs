//! Director configuration. Loaded from JSON; every field is optional and
//! falls back to the defaults below. Angles are degrees, durations seconds.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypotheses::ShotType;
use crate::measures::MeasureConfig;
use crate::saliency::SaliencyWeights;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config is not UTF-8 (byte {offset})")]
    Utf8 { offset: usize },
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Horizontal field of view per shot type, in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FovTable {
    pub tracking: f64,
    #[serde(rename = "static")]
    pub static_: f64,
    pub medium: f64,
    pub pan: f64,
    pub recommender: f64,
}

impl Default for FovTable {
    fn default() -> Self {
        Self {
            tracking: 75.0,
            static_: 115.0,
            medium: 95.0,
            pan: 90.0,
            recommender: 75.0,
        }
    }
}

impl FovTable {
    pub fn get(&self, shot_type: ShotType) -> f64 {
        match shot_type {
            ShotType::Tracking => self.tracking,
            ShotType::Static => self.static_,
            ShotType::Medium => self.medium,
            ShotType::Pan => self.pan,
            ShotType::Recommender => self.recommender,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DirectorConfig {
    pub shot_length_s: f64,
    pub fov_deg: FovTable,
    /// Output width / height; fixes the vertical field of view.
    pub aspect: f64,
    pub max_hypotheses_per_type: usize,
    pub jump_cut_threshold_deg: f64,
    pub jump_cut_penalty: f64,
    /// N: how many recent shots the occurrence cap looks at.
    pub occurrence_window: usize,
    /// C: a type used this many times in the window is excluded.
    pub occurrence_cap: usize,
    pub no_repeat: bool,
    pub smoothing_alpha: f64,
    pub max_angular_velocity_deg_s: f64,
    pub pitch_clamp_deg: f64,
    pub cluster_threshold_deg: f64,
    pub pan_sweep_deg: f64,
    /// Fraction of shot frames that must carry a recommendation.
    pub recommender_min_coverage: f64,
    pub min_presence: f64,
    pub measures: MeasureConfig,
    pub saliency: SaliencyWeights,
}

impl Default for DirectorConfig {
    fn default() -> Self {
        Self {
            shot_length_s: 3.0,
            fov_deg: FovTable::default(),
            aspect: 16.0 / 9.0,
            max_hypotheses_per_type: 4,
            jump_cut_threshold_deg: 30.0,
            jump_cut_penalty: 0.5,
            occurrence_window: 5,
            occurrence_cap: 2,
            no_repeat: true,
            smoothing_alpha: 0.15,
            max_angular_velocity_deg_s: 60.0,
            pitch_clamp_deg: 45.0,
            cluster_threshold_deg: 40.0,
            pan_sweep_deg: 90.0,
            recommender_min_coverage: 0.5,
            min_presence: 0.2,
            measures: MeasureConfig::default(),
            saliency: SaliencyWeights::default(),
        }
    }
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("{name} = {v} must be positive")))
    }
}

impl DirectorConfig {
    pub fn hfov(&self, shot_type: ShotType) -> f64 {
        self.fov_deg.get(shot_type).to_radians()
    }

    pub fn pitch_clamp(&self) -> f64 {
        self.pitch_clamp_deg.to_radians()
    }

    pub fn jump_cut_threshold(&self) -> f64 {
        self.jump_cut_threshold_deg.to_radians()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("shot_length_s", self.shot_length_s)?;
        positive("aspect", self.aspect)?;
        for t in ShotType::ALL {
            let fov = self.fov_deg.get(t);
            if !(fov > 0.0 && fov < 180.0) {
                return Err(ConfigError::Invalid(format!(
                    "fov_deg.{} = {fov} must be in (0, 180)",
                    t.as_str()
                )));
            }
        }
        if self.max_hypotheses_per_type == 0 {
            return Err(ConfigError::Invalid(
                "max_hypotheses_per_type must be at least 1".into(),
            ));
        }
        positive("jump_cut_threshold_deg", self.jump_cut_threshold_deg)?;
        if !(self.jump_cut_penalty >= 0.0 && self.jump_cut_penalty.is_finite()) {
            return Err(ConfigError::Invalid("jump_cut_penalty must be non-negative".into()));
        }
        if self.occurrence_cap == 0 {
            return Err(ConfigError::Invalid("occurrence_cap must be at least 1".into()));
        }
        if self.occurrence_window < self.occurrence_cap {
            return Err(ConfigError::Invalid(format!(
                "occurrence_window {} is smaller than occurrence_cap {}",
                self.occurrence_window, self.occurrence_cap
            )));
        }
        if !(self.smoothing_alpha > 0.0 && self.smoothing_alpha <= 1.0) {
            return Err(ConfigError::Invalid("smoothing_alpha must be in (0, 1]".into()));
        }
        positive("max_angular_velocity_deg_s", self.max_angular_velocity_deg_s)?;
        if !(self.pitch_clamp_deg > 0.0 && self.pitch_clamp_deg <= 90.0) {
            return Err(ConfigError::Invalid("pitch_clamp_deg must be in (0, 90]".into()));
        }
        positive("cluster_threshold_deg", self.cluster_threshold_deg)?;
        positive("pan_sweep_deg", self.pan_sweep_deg)?;
        if !(0.0..=1.0).contains(&self.recommender_min_coverage) {
            return Err(ConfigError::Invalid(
                "recommender_min_coverage must be in [0, 1]".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.min_presence) {
            return Err(ConfigError::Invalid("min_presence must be in [0, 1]".into()));
        }
        self.measures.validate().map_err(ConfigError::Invalid)?;
        self.saliency.validate().map_err(ConfigError::Invalid)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Parses and validates a JSON config document.
pub fn parse_config(document: &[u8]) -> Result<DirectorConfig, ConfigError> {
    let text = std::str::from_utf8(document).map_err(|e| ConfigError::Utf8 {
        offset: e.valid_up_to(),
    })?;
    let cfg: DirectorConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

//! Per-object, shot-type-specific interestingness.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::hypotheses::ShotType;
use crate::measures::ObjectMeasures;

/// Linear blend weights for one shot type. `isolation` multiplies the
/// neighbourhood score, or its complement for static shots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeWeights {
    pub size: f64,
    pub motion: f64,
    pub isolation: f64,
}

impl TypeWeights {
    pub const fn new(size: f64, motion: f64, isolation: f64) -> Self {
        Self {
            size,
            motion,
            isolation,
        }
    }

    fn check(&self, name: &str) -> Result<(), String> {
        for (w, label) in [
            (self.size, "size"),
            (self.motion, "motion"),
            (self.isolation, "isolation"),
        ] {
            if !(0.0..=1.0).contains(&w) {
                return Err(format!("{name}.{label} = {w} is outside [0, 1]"));
            }
        }
        let sum = self.size + self.motion + self.isolation;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(format!("{name} weights sum to {sum}, expected 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaliencyWeights {
    pub tracking: TypeWeights,
    #[serde(rename = "static")]
    pub static_: TypeWeights,
    pub medium: TypeWeights,
    pub pan: TypeWeights,
    /// Novelty damping: a fully visited object keeps `1 - visited` of its score.
    pub visited: f64,
    pub categories: BTreeMap<String, f64>,
    pub default_category: f64,
}

impl Default for SaliencyWeights {
    fn default() -> Self {
        let categories = [
            ("human", 1.0),
            ("dog", 0.7),
            ("cat", 0.7),
            ("bicycle", 0.5),
            ("car", 0.5),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Self {
            tracking: TypeWeights::new(0.3, 0.4, 0.3),
            static_: TypeWeights::new(0.4, 0.1, 0.5),
            medium: TypeWeights::new(0.34, 0.33, 0.33),
            pan: TypeWeights::new(0.3, 0.3, 0.4),
            visited: 0.7,
            categories,
            default_category: 0.3,
        }
    }
}

impl SaliencyWeights {
    /// Recommender shots rank their targets with the tracking weights.
    pub fn for_type(&self, shot_type: ShotType) -> &TypeWeights {
        match shot_type {
            ShotType::Tracking | ShotType::Recommender => &self.tracking,
            ShotType::Static => &self.static_,
            ShotType::Medium => &self.medium,
            ShotType::Pan => &self.pan,
        }
    }

    pub fn category(&self, label: &str) -> f64 {
        self.categories.get(label).copied().unwrap_or(self.default_category)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.tracking.check("tracking")?;
        self.static_.check("static")?;
        self.medium.check("medium")?;
        self.pan.check("pan")?;
        if !(0.0..=1.0).contains(&self.visited) {
            return Err(format!("visited = {} is outside [0, 1]", self.visited));
        }
        if !(0.0..=1.0).contains(&self.default_category) {
            return Err(format!(
                "default_category = {} is outside [0, 1]",
                self.default_category
            ));
        }
        for (label, w) in &self.categories {
            if !(0.0..=1.0).contains(w) {
                return Err(format!("category `{label}` weight {w} is outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Saliency in `[0, 1]`: category weight times the blended measures, damped
/// by how much the object was already on screen.
pub fn object_saliency(m: &ObjectMeasures, category: &str, shot_type: ShotType, w: &SaliencyWeights) -> f64 {
    let tw = w.for_type(shot_type);
    let iso = match shot_type {
        ShotType::Static => 1.0 - m.neighbourhood,
        _ => m.neighbourhood,
    };
    let blend = tw.size * m.size + tw.motion * m.motion + tw.isolation * iso;
    w.category(category) * blend * (1.0 - w.visited * m.visited)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Direction;
    use proptest::prelude::*;

    fn measures(size: f64, motion: f64, neighbourhood: f64, visited: f64) -> ObjectMeasures {
        ObjectMeasures {
            size,
            motion,
            neighbourhood,
            visited,
            presence: 1.0,
            mean_center: Direction::FORWARD,
        }
    }

    #[test]
    fn defaults_validate() {
        SaliencyWeights::default().validate().unwrap();
        let mut w = SaliencyWeights::default();
        w.pan.size = 0.5;
        assert!(w.validate().is_err());
    }

    #[test]
    fn zero_measures_give_zero() {
        let w = SaliencyWeights::default();
        for t in ShotType::ALL {
            // static favours crowding, so a fully crowded object is the all-zero case there
            let n = if t == ShotType::Static { 1.0 } else { 0.0 };
            assert_eq!(object_saliency(&measures(0.0, 0.0, n, 0.0), "human", t, &w), 0.0);
        }
    }

    #[test]
    fn weight_table_arithmetic() {
        let w = SaliencyWeights::default();
        let s = object_saliency(&measures(1.0, 1.0, 1.0, 0.0), "human", ShotType::Tracking, &w);
        assert!((s - 1.0).abs() < 1e-12);
        let s = object_saliency(&measures(1.0, 1.0, 1.0, 1.0), "human", ShotType::Tracking, &w);
        assert!((s - 0.3).abs() < 1e-12);
        let s = object_saliency(&measures(1.0, 1.0, 1.0, 0.0), "zebra", ShotType::Tracking, &w);
        assert!((s - 0.3).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn bounded_and_monotone(
            size in 0.0..=1.0f64, motion in 0.0..=1.0f64, n in 0.0..=1.0f64, v in 0.0..=1.0f64,
            d in 0.0..=1.0f64, t in 0usize..5,
        ) {
            let w = SaliencyWeights::default();
            let t = ShotType::ALL[t];
            let base = object_saliency(&measures(size, motion, n, v), "dog", t, &w);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&base));
            let up = |x: f64| (x + d).min(1.0);
            prop_assert!(object_saliency(&measures(up(size), motion, n, v), "dog", t, &w) >= base);
            prop_assert!(object_saliency(&measures(size, up(motion), n, v), "dog", t, &w) >= base);
            prop_assert!(object_saliency(&measures(size, motion, n, up(v)), "dog", t, &w) <= base);
            let more_isolated = object_saliency(&measures(size, motion, up(n), v), "dog", t, &w);
            if t == ShotType::Static {
                prop_assert!(more_isolated <= base);
            } else {
                prop_assert!(more_isolated >= base);
            }
        }

        #[test]
        fn category_scale_keeps_argmax(
            objs in proptest::collection::vec((0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64, 0usize..4), 2..6),
            scale in 0.05..1.0f64, t in 0usize..5,
        ) {
            let labels = ["human", "dog", "car", "kite"];
            let t = ShotType::ALL[t];
            let w = SaliencyWeights::default();
            let mut scaled = w.clone();
            scaled.default_category *= scale;
            for v in scaled.categories.values_mut() {
                *v *= scale;
            }
            let argmax = |w: &SaliencyWeights| {
                let mut best = (f64::NEG_INFINITY, 0);
                for (i, &(s, m, n, c)) in objs.iter().enumerate() {
                    let v = object_saliency(&measures(s, m, n, 0.0), labels[c], t, w);
                    if v > best.0 {
                        best = (v, i);
                    }
                }
                best.1
            };
            let a = argmax(&w);
            let b = argmax(&scaled);
            // only differ when the original top two were within rounding of each other
            if a != b {
                let (s1, m1, n1, c1) = objs[a];
                let (s2, m2, n2, c2) = objs[b];
                let v1 = object_saliency(&measures(s1, m1, n1, 0.0), labels[c1], t, &w);
                let v2 = object_saliency(&measures(s2, m2, n2, 0.0), labels[c2], t, &w);
                prop_assert!((v1 - v2).abs() < 1e-12);
            }
        }
    }
}

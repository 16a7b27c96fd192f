//! Local and uniform regularity conditions and their certificates.

mod function;
mod local;
mod sequence;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

pub use function::{delta_theta_at_origin, phi_from_f, r_for_b, r_from_f, LevelSearch};
pub use local::{
    candidate_scales, cross_check_conditions, iii_c_radius, locally_regular_phi, replay_iii_a, uniform_phi,
    verify_iii_c,
};
pub use sequence::check_iii_b;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "iii-A")]
    IiiA,
    #[serde(rename = "iii-B")]
    IiiB,
    #[serde(rename = "iii-C")]
    IiiC,
    #[serde(rename = "uniform")]
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PaperFormula,
    GridSearch,
}

/// A constant (`φ`, `r` or `δ/√2`) certifying a condition at a scale.
///
/// `scale` is `eps` for (iii-A)/uniform and `k` for (iii-C). `margin` is the
/// slack left in the replayed conclusion; `resolution` is the width of the
/// search step that produced `value`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityCertificate<T> {
    pub condition: Condition,
    pub anchor: Option<String>,
    pub scale: T,
    pub value: T,
    pub method: Method,
    pub margin: Option<T>,
    pub resolution: Option<T>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, T>,
}

impl<T: Scalar> RegularityCertificate<T> {
    pub fn new(condition: Condition, scale: T, value: T, method: Method) -> Self {
        RegularityCertificate {
            condition,
            anchor: None,
            scale,
            value,
            method,
            margin: None,
            resolution: None,
            extras: BTreeMap::new(),
        }
    }

    pub fn with_anchor(mut self, anchor: impl Into<String>) -> Self {
        self.anchor = Some(anchor.into());
        self
    }

    pub fn with_margin(mut self, margin: T) -> Self {
        self.margin = Some(margin);
        self
    }

    pub fn with_resolution(mut self, resolution: T) -> Self {
        self.resolution = Some(resolution);
        self
    }

    pub fn with_extra(mut self, name: &str, value: T) -> Self {
        self.extras.insert(name.to_string(), value);
        self
    }

    pub fn extra(&self, name: &str) -> Option<T> {
        self.extras.get(name).copied()
    }

    pub fn to_f64(&self) -> RegularityCertificate<f64> {
        RegularityCertificate {
            condition: self.condition,
            anchor: self.anchor.clone(),
            scale: self.scale.as_f64(),
            value: self.value.as_f64(),
            method: self.method,
            margin: self.margin.map(Scalar::as_f64),
            resolution: self.resolution.map(Scalar::as_f64),
            extras: self.extras.iter().map(|(k, v)| (k.clone(), v.as_f64())).collect(),
        }
    }
}

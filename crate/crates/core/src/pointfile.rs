//! JSON file format for a single lifted point.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::experiments::fmt17;
use crate::hull2::{HullPoint, LiftedPoint};

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointFile {
    pub x: [f64; 2],
    /// `(X11, X12, X22)`.
    #[serde(rename = "X")]
    pub x_mat: [f64; 3],
    pub y: [f64; 2],
    #[serde(rename = "Y12")]
    pub y12: f64,
    #[serde(default)]
    pub alpha: Option<[f64; 2]>,
    #[serde(default)]
    pub beta: Option<[f64; 2]>,
}

impl PointFile {
    pub fn parse(text: &str) -> Result<Self> {
        let p: PointFile = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("point file: {e}")))?;
        let all = p.x.iter().chain(&p.x_mat).chain(&p.y).chain([&p.y12]).chain(p.alpha.iter().flatten()).chain(p.beta.iter().flatten());
        if let Some(v) = all.into_iter().find(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("point file: non-finite value {v}")));
        }
        Ok(p)
    }

    /// Numbers written with 17 significant digits, keys in a fixed order.
    pub fn to_json(&self) -> String {
        let arr = |v: &[f64]| format!("[{}]", v.iter().map(|x| fmt17(*x)).collect::<Vec<_>>().join(", "));
        let mut parts = vec![
            format!("\"x\": {}", arr(&self.x)),
            format!("\"X\": {}", arr(&self.x_mat)),
            format!("\"y\": {}", arr(&self.y)),
            format!("\"Y12\": {}", fmt17(self.y12)),
        ];
        if let Some(a) = self.alpha {
            parts.push(format!("\"alpha\": {}", arr(&a)));
        }
        if let Some(b) = self.beta {
            parts.push(format!("\"beta\": {}", arr(&b)));
        }
        format!("{{{}}}", parts.join(", "))
    }

    pub fn base(&self) -> HullPoint {
        let [x11, x12, x22] = self.x_mat;
        HullPoint { x: self.x, x11, x12, x22, y: self.y, y12: self.y12 }
    }

    /// Fails if `alpha` is absent.
    pub fn to_lifted(&self) -> Result<LiftedPoint> {
        let alpha = self.alpha.ok_or_else(|| Error::Invalid("point file: alpha required".into()))?;
        Ok(LiftedPoint { base: self.base(), alpha, beta: self.beta })
    }

    pub fn from_lifted(z: &LiftedPoint) -> Self {
        let b = &z.base;
        Self { x: b.x, x_mat: [b.x11, b.x12, b.x22], y: b.y, y12: b.y12, alpha: Some(z.alpha), beta: z.beta }
    }
}

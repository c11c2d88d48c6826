use serde::{Deserialize, Serialize};

/// A ball removed from the sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exclusion {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Tensor-product sample grid over a box, minus excluded balls, plus
/// explicit extra points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub points_per_axis: usize,
    pub exclusions: Vec<Exclusion>,
    pub extra_points: Vec<Vec<f64>>,
}

pub const DEFAULT_POINTS_PER_AXIS: usize = 5;
pub const DEFAULT_HALF_WIDTH: f64 = 2.0;
pub const DEFAULT_EXCLUSION_RADIUS: f64 = 0.3;

impl SampleGrid {
    /// `points_per_axis` points per axis on `[−2, 2]^dim`.
    pub fn cube(dim: usize, points_per_axis: usize) -> Self {
        Self {
            lower: vec![-DEFAULT_HALF_WIDTH; dim],
            upper: vec![DEFAULT_HALF_WIDTH; dim],
            points_per_axis,
            exclusions: Vec::new(),
            extra_points: Vec::new(),
        }
    }

    pub fn default_for(dim: usize) -> Self {
        Self::cube(dim, DEFAULT_POINTS_PER_AXIS)
    }

    /// Removes the default-radius ball around `center`.
    pub fn excluding(mut self, center: Vec<f64>) -> Self {
        self.exclusions.push(Exclusion {
            center,
            radius: DEFAULT_EXCLUSION_RADIUS,
        });
        self
    }

    pub fn with_points(mut self, pts: Vec<Vec<f64>>) -> Self {
        self.extra_points.extend(pts);
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn excluded(&self, p: &[f64]) -> bool {
        self.exclusions.iter().any(|e| {
            let d2: f64 = e.center.iter().zip(p).map(|(c, x)| (c - x) * (c - x)).sum();
            d2 < e.radius * e.radius
        })
    }

    /// Grid points in lexicographic order (first coordinate slowest),
    /// followed by the extra points; excluded points are dropped.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let k = self.points_per_axis;
        let axis = |a: usize, t: usize| {
            if k == 1 {
                0.5 * (self.lower[a] + self.upper[a])
            } else {
                self.lower[a] + (self.upper[a] - self.lower[a]) * t as f64 / (k - 1) as f64
            }
        };
        let mut out = Vec::new();
        if k > 0 {
            let total = k.pow(n as u32);
            for flat in 0..total {
                let mut rem = flat;
                let mut p = vec![0.0; n];
                for a in (0..n).rev() {
                    p[a] = axis(a, rem % k);
                    rem /= k;
                }
                if !self.excluded(&p) {
                    out.push(p);
                }
            }
        }
        for p in &self.extra_points {
            if !self.excluded(p) {
                out.push(p.clone());
            }
        }
        out
    }

    /// Structural validation: consistent dimensions and a non-empty sample.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.dim();
        if self.upper.len() != n {
            return Err("grid bounds have different lengths".into());
        }
        if self.lower.iter().zip(&self.upper).any(|(l, u)| !(l <= u)) {
            return Err("grid lower bound exceeds upper bound".into());
        }
        if self.exclusions.iter().any(|e| e.center.len() != n || !(e.radius >= 0.0)) {
            return Err("exclusion centers must match the chart dimension".into());
        }
        if self.extra_points.iter().any(|p| p.len() != n) {
            return Err("extra points must match the chart dimension".into());
        }
        if self.points().is_empty() {
            return Err("no sample point survives the exclusions".into());
        }
        Ok(())
    }
}

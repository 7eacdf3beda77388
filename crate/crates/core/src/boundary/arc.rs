//! Closed arcs of the circle and coverage checks for finite unions.

use std::f64::consts::TAU;

use serde::Serialize;

use super::normalize_angle;
use crate::error::{HbError, Result};

/// Counterclockwise arc `[start, start + span]`, `0 < span <= 2pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    start: f64,
    span: f64,
}

impl Arc {
    /// Arc from `start` to `end` counterclockwise. Angles are taken mod 2pi;
    /// equal endpoints are rejected (use [`Arc::full`]).
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() {
            return Err(HbError::InvalidArc { reason: "non-finite endpoint".into() });
        }
        let s = normalize_angle(start);
        let span = normalize_angle(end - start);
        if span <= 0.0 {
            return Err(HbError::InvalidArc { reason: "empty arc".into() });
        }
        Ok(Arc { start: s, span })
    }

    pub fn full() -> Self {
        Arc { start: 0.0, span: TAU }
    }

    /// Arc of total angular `width` centred at `center`.
    pub fn centered(center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(HbError::InvalidArc { reason: "nonpositive width".into() });
        }
        if width >= TAU {
            return Ok(Self::full());
        }
        Arc::new(center - width / 2.0, center + width / 2.0)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        normalize_angle(self.start + self.span)
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    pub fn is_full(&self) -> bool {
        self.span >= TAU
    }

    fn offset(&self, t: f64) -> f64 {
        normalize_angle(t - self.start)
    }

    /// Membership in the closed arc, with slack `tol` at the ends.
    pub fn contains(&self, t: f64, tol: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let o = self.offset(t);
        o <= self.span + tol || o >= TAU - tol
    }

    /// Membership in the open arc, at distance more than `tol` from both ends.
    pub fn contains_interior(&self, t: f64, tol: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let o = self.offset(t);
        o > tol && o < self.span - tol
    }

    /// Points `n` equally spaced along the closed arc.
    pub fn sample(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        (0..n).map(|k| normalize_angle(self.start + self.span * k as f64 / (n - 1) as f64)).collect()
    }
}

/// Total length of the part of the circle not covered by the closed arcs.
pub fn uncovered_length(arcs: &[Arc]) -> f64 {
    if arcs.iter().any(Arc::is_full) {
        return 0.0;
    }
    // Unroll to intervals of [0, 2pi).
    let mut iv: Vec<(f64, f64)> = Vec::new();
    for a in arcs {
        let e = a.start + a.span;
        if e <= TAU {
            iv.push((a.start, e));
        } else {
            iv.push((a.start, TAU));
            iv.push((0.0, e - TAU));
        }
    }
    iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut gap = 0.0;
    let mut reach = 0.0;
    for (s, e) in iv {
        if s > reach {
            gap += s - reach;
        }
        reach = f64::max(reach, e);
    }
    gap + (TAU - reach).max(0.0)
}

/// Whether the union covers the circle up to gaps shorter than `tol`.
pub fn covers_circle(arcs: &[Arc], tol: f64) -> bool {
    uncovered_length(arcs) <= tol
}

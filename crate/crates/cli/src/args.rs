//! Parsers for the small argument languages: angles, arcs, covers, atoms.

use std::f64::consts::PI;

use hblab::boundary::Arc;
use hblab::cyclicity::CoverItem;
use hblab::scalar::C64;

fn number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b) = (number(a)?, number(b)?);
        if b == 0.0 {
            return Err(format!("division by zero in {s:?}"));
        }
        return Ok(a / b);
    }
    s.parse::<f64>().map_err(|_| format!("not a number: {s:?}"))
}

/// Angle in radians; a `pi` suffix multiplies by pi (`0.5pi`, `-pi`, `pi/2`).
pub fn angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Some(i) = t.find("pi") {
        let (head, tail) = (&t[..i], &t[i + 2..]);
        let k = match head.trim() {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => number(h)?,
        };
        let d = match tail.trim() {
            "" => 1.0,
            x if x.starts_with('/') => number(&x[1..])?,
            x => return Err(format!("unexpected {x:?} after pi")),
        };
        return Ok(k * PI / d);
    }
    number(t)
}

/// `start:end` (counterclockwise) or `full`.
pub fn arc(s: &str) -> Result<Arc, String> {
    if s.trim() == "full" {
        return Ok(Arc::full());
    }
    let (a, b) = s.split_once(':').ok_or_else(|| format!("arc {s:?} must be start:end"))?;
    Arc::new(angle(a)?, angle(b)?).map_err(|e| e.to_string())
}

/// Comma-separated arcs; the empty string is the empty union.
pub fn arcs(s: &str) -> Result<Vec<Arc>, String> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(arc).collect()
}

/// `center:width:eta` items, comma separated.
pub fn cover(s: &str) -> Result<Vec<CoverItem>, String> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|item| {
            let p: Vec<&str> = item.split(':').collect();
            let [c, w, e] = p[..] else { return Err(format!("cover item {item:?} must be center:width:eta")) };
            let arc = Arc::centered(angle(c)?, angle(w)?).map_err(|e| e.to_string())?;
            Ok(CoverItem { arc, eta: number(e)? })
        })
        .collect()
}

/// `angle:weight` atoms on the circle, comma separated.
pub fn atoms(s: &str) -> Result<Vec<(C64, f64)>, String> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|item| {
            let (a, w) = item.split_once(':').unwrap_or((item, "1"));
            Ok((C64::from_polar(1.0, angle(a)?), number(w)?))
        })
        .collect()
}

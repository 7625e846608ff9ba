//! Outline of one itemset: the outer boundary of the union of its atom
//! circles, each inflated by a margin.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::layout::RippleGeometry;

pub const DEFAULT_OUTLINE_MARGIN: f64 = 1.0;
/// Maximum deviation of a polyline chord from its arc, relative to radius.
const RADIAL_TOLERANCE: f64 = 0.01;
const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outline {
    pub itemset: usize,
    /// One closed counter-clockwise polygon per connected component.
    /// The closing edge from the last to the first vertex is implicit.
    pub loops: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Copy)]
struct Disk {
    x: f64,
    y: f64,
    r: f64,
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    disk: usize,
    start: f64,
    sweep: f64,
}

fn point(d: &Disk, t: f64) -> [f64; 2] {
    [d.x + d.r * t.cos(), d.y + d.r * t.sin()]
}

/// Angular intervals of `disks[i]`'s boundary not covered by another disk,
/// or `None` when the whole circle is covered.
fn uncovered(disks: &[Disk], i: usize) -> Option<Vec<(f64, f64)>> {
    let a = disks[i];
    let mut covered: Vec<(f64, f64)> = Vec::new();
    for (j, b) in disks.iter().enumerate() {
        if j == i {
            continue;
        }
        let d = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt();
        if d + a.r <= b.r + EPS {
            // Identical disks: keep the first one.
            let identical = d <= EPS && (a.r - b.r).abs() <= EPS;
            if !identical || j < i {
                return None;
            }
            continue;
        }
        if d >= a.r + b.r - EPS || d + b.r <= a.r + EPS {
            continue;
        }
        let phi = (b.y - a.y).atan2(b.x - a.x);
        let cos_alpha = ((d * d + a.r * a.r - b.r * b.r) / (2.0 * d * a.r)).clamp(-1.0, 1.0);
        let alpha = cos_alpha.acos();
        let lo = (phi - alpha).rem_euclid(TAU);
        let hi = lo + 2.0 * alpha;
        if hi > TAU {
            covered.push((lo, TAU));
            covered.push((0.0, hi - TAU));
        } else {
            covered.push((lo, hi));
        }
    }
    covered.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in covered {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    if merged.is_empty() {
        return Some(vec![(0.0, TAU)]);
    }
    if merged.len() == 1 && merged[0].0 <= EPS && merged[0].1 >= TAU - EPS {
        return None;
    }
    // Complement on the circle, as (start, sweep); the gap that wraps past 0
    // becomes a single arc.
    let mut arcs = Vec::new();
    for w in merged.windows(2) {
        if w[1].0 - w[0].1 > EPS {
            arcs.push((w[0].1, w[1].0 - w[0].1));
        }
    }
    let first = merged[0].0;
    let last = merged[merged.len() - 1].1;
    let wrap = TAU - last + first;
    if wrap > EPS {
        arcs.push((last, wrap));
    }
    Some(arcs)
}

fn step_for(r: f64, margin: f64) -> f64 {
    let sagitta = (RADIAL_TOLERANCE * r).min(0.5 * margin).min(r);
    let step = 2.0 * (1.0 - sagitta / r).clamp(-1.0, 1.0).acos();
    step.min(TAU / 16.0)
}

fn sample(disk: &Disk, arc: &Arc, margin: f64, out: &mut Vec<[f64; 2]>) {
    let segments = (arc.sweep / step_for(disk.r, margin)).ceil().max(1.0) as usize;
    for s in 0..segments {
        out.push(point(disk, arc.start + arc.sweep * s as f64 / segments as f64));
    }
}

fn signed_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        / 2.0
}

/// Outline of itemset `itemset`: one loop per connected group of its
/// (inflated) atom circles. Returns `None` for an out-of-range index.
pub fn outline_set(geometry: &RippleGeometry, itemset: usize, margin: f64) -> Option<Outline> {
    geometry.circles.first().filter(|c| itemset < c.signature.0.len())?;
    let disks: Vec<Disk> = geometry
        .circles
        .iter()
        .filter(|c| c.signature.bit(itemset))
        .map(|c| Disk {
            x: c.x,
            y: c.y,
            r: c.radius + margin,
        })
        .collect();
    Some(Outline {
        itemset,
        loops: union_boundary(&disks, margin),
    })
}

fn union_boundary(disks: &[Disk], margin: f64) -> Vec<Vec<[f64; 2]>> {
    let mut loops = Vec::new();
    let mut arcs: Vec<Arc> = Vec::new();
    for i in 0..disks.len() {
        let Some(free) = uncovered(disks, i) else { continue };
        if free.len() == 1 && free[0].1 >= TAU - EPS {
            let mut poly = Vec::new();
            sample(&disks[i], &Arc { disk: i, start: 0.0, sweep: TAU }, margin, &mut poly);
            loops.push(poly);
            continue;
        }
        arcs.extend(free.into_iter().map(|(start, sweep)| Arc { disk: i, start, sweep }));
    }

    let start_of = |a: &Arc| point(&disks[a.disk], a.start);
    let end_of = |a: &Arc| point(&disks[a.disk], a.start + a.sweep);
    let mut used = vec![false; arcs.len()];
    for first in 0..arcs.len() {
        if used[first] {
            continue;
        }
        let mut poly = Vec::new();
        let mut cur = first;
        loop {
            used[cur] = true;
            sample(&disks[arcs[cur].disk], &arcs[cur], margin, &mut poly);
            let end = end_of(&arcs[cur]);
            let next = (0..arcs.len())
                .filter(|&k| !used[k] || k == first)
                .min_by(|&p, &q| {
                    let dp = dist2(start_of(&arcs[p]), end);
                    let dq = dist2(start_of(&arcs[q]), end);
                    dp.total_cmp(&dq)
                });
            match next {
                Some(k) if k != first => cur = k,
                _ => break,
            }
        }
        if signed_area(&poly) > 0.0 {
            loops.push(poly);
        }
    }
    loops
}

fn dist2(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0] {
            inside = !inside;
        }
        j = i;
    }
    inside
}

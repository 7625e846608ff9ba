//! Deterministic circle placement for atoms and spiral packing of item dots.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::aggregate::{aggregate_items, AggregatedGlyph};
use super::outline::Outline;
use super::partition::{Atom, Signature};

const GOLDEN_ANGLE: f64 = PI * 0.763_932_022_500_210_3; // pi * (3 - sqrt 5)
const CONTACT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutOptions {
    /// Radial step of the sunflower spiral.
    pub dot_spacing: f64,
    pub dot_radius: f64,
    /// Clearance between neighbouring atom circles.
    pub gap: f64,
    /// Atoms with more items than this are drawn as count glyphs.
    pub dot_budget: Option<usize>,
}

impl Default for LayoutOptions {
    fn default() -> Self {
        LayoutOptions {
            dot_spacing: 1.0,
            dot_radius: 0.4,
            gap: 0.5,
            dot_budget: None,
        }
    }
}

impl LayoutOptions {
    /// Circle radius per square root of item count. Large enough that every
    /// spiral dot lies strictly inside its circle.
    pub fn radius_scale(&self) -> f64 {
        self.dot_spacing + self.dot_radius
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomCircle {
    pub signature: Signature,
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DotShape {
    /// Protected group.
    Circle,
    /// Non-protected group.
    Square,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DotFill {
    /// Predicted beneficial.
    Solid,
    Hollow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dot {
    pub item_id: usize,
    /// Index into `RippleGeometry::circles`.
    pub circle: usize,
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub shape: DotShape,
    pub fill: DotFill,
    /// Signed local risk difference of the atom; the renderer maps it to colour.
    pub color_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RippleGeometry {
    pub circles: Vec<AtomCircle>,
    pub dots: Vec<Dot>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outlines: Vec<Outline>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aggregated: Vec<AggregatedGlyph>,
}

fn collides(placed: &[AtomCircle], x: f64, y: f64, r: f64, gap: f64) -> bool {
    placed.iter().any(|c| {
        let d = ((c.x - x).powi(2) + (c.y - y).powi(2)).sqrt();
        d < c.radius + r + gap - CONTACT_EPS
    })
}

fn place(placed: &[AtomCircle], signature: &Signature, r: f64, gap: f64) -> (f64, f64) {
    if placed.is_empty() {
        return (0.0, 0.0);
    }
    // Anchor preference: most shared bits, then earliest placed.
    let mut anchors: Vec<usize> = (0..placed.len()).collect();
    anchors.sort_by(|&a, &b| {
        signature
            .shared_bits(&placed[b].signature)
            .cmp(&signature.shared_bits(&placed[a].signature))
            .then(a.cmp(&b))
    });
    for ring in 0.. {
        for &a in &anchors {
            let anchor = &placed[a];
            let dist = anchor.radius + r + gap + ring as f64 * r;
            for deg in 0..360 {
                let t = (deg as f64).to_radians();
                let x = anchor.x + dist * t.cos();
                let y = anchor.y + dist * t.sin();
                if !collides(placed, x, y, r, gap) {
                    return (x, y);
                }
            }
        }
    }
    unreachable!("the ring search always terminates")
}

/// Lay out atoms as packed circles with one dot per item.
///
/// Atoms are placed by descending popcount, then descending count, then
/// signature; each is set tangent to the placed atom sharing the most
/// itemsets with it, at the first free angle in 1° steps. If every angle
/// around every anchor is blocked, the search moves outward in rings.
/// Circle radius is `radius_scale * sqrt(count)`.
pub fn layout_rippleset(atoms: &[Atom], options: &LayoutOptions) -> RippleGeometry {
    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (&atoms[a].signature, &atoms[b].signature);
        sb.popcount()
            .cmp(&sa.popcount())
            .then(atoms[b].count().cmp(&atoms[a].count()))
            .then_with(|| sa.cmp(sb))
    });

    let scale = options.radius_scale();
    let mut circles: Vec<AtomCircle> = Vec::with_capacity(atoms.len());
    let mut dots = Vec::new();
    let mut aggregated = Vec::new();
    for &i in &order {
        let atom = &atoms[i];
        let r = scale * (atom.count() as f64).sqrt();
        let (x, y) = place(&circles, &atom.signature, r, options.gap);
        let circle = circles.len();
        circles.push(AtomCircle {
            signature: atom.signature.clone(),
            x,
            y,
            radius: r,
            count: atom.count(),
        });

        if let Some(glyph) = options.dot_budget.and_then(|b| aggregate_items(atom, b)) {
            aggregated.push(glyph);
            continue;
        }
        for (k, item) in atom.items.iter().enumerate() {
            let rho = options.dot_spacing * (k as f64 + 0.5).sqrt();
            let theta = k as f64 * GOLDEN_ANGLE;
            dots.push(Dot {
                item_id: item.id,
                circle,
                x: x + rho * theta.cos(),
                y: y + rho * theta.sin(),
                radius: options.dot_radius,
                shape: if item.protected { DotShape::Circle } else { DotShape::Square },
                fill: if item.beneficial { DotFill::Solid } else { DotFill::Hollow },
                color_value: atom.rd_local,
            });
        }
    }

    RippleGeometry {
        circles,
        dots,
        outlines: Vec::new(),
        aggregated,
    }
}

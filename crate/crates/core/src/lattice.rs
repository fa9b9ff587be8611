//! Triangular-lattice geometry in axial coordinates.
//!
//! A point `(u, v)` sits at `u·e1 + v·e2` with `e1 = (1, 0)` and
//! `e2 = (1/2, √3/2)`. The up triangle anchored at `(u, v)` has vertices
//! `(u,v), (u+1,v), (u,v+1)`; the down triangle has `(u+1,v), (u,v+1), (u+1,v+1)`.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub u: i64,
    pub v: i64,
}

impl LatticePoint {
    pub const fn new(u: i64, v: i64) -> Self {
        LatticePoint { u, v }
    }

    pub const fn shift(self, du: i64, dv: i64) -> Self {
        LatticePoint::new(self.u + du, self.v + dv)
    }

    pub fn cartesian(self) -> (f64, f64) {
        let (u, v) = (self.u as f64, self.v as f64);
        (u + v / 2.0, v * 3f64.sqrt() / 2.0)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.u, self.v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Up,
    Down,
}

/// Field order gives the lexicographic `(u, v, orientation)` ordering used
/// everywhere determinism matters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnitTriangle {
    pub u: i64,
    pub v: i64,
    pub orientation: Orientation,
}

impl UnitTriangle {
    pub const fn up(u: i64, v: i64) -> Self {
        UnitTriangle { u, v, orientation: Orientation::Up }
    }

    pub const fn down(u: i64, v: i64) -> Self {
        UnitTriangle { u, v, orientation: Orientation::Down }
    }

    pub const fn anchor(self) -> LatticePoint {
        LatticePoint::new(self.u, self.v)
    }

    pub fn is_up(self) -> bool {
        self.orientation == Orientation::Up
    }

    pub fn vertices(self) -> [LatticePoint; 3] {
        let (u, v) = (self.u, self.v);
        match self.orientation {
            Orientation::Up => [LatticePoint::new(u, v), LatticePoint::new(u + 1, v), LatticePoint::new(u, v + 1)],
            Orientation::Down => {
                [LatticePoint::new(u + 1, v), LatticePoint::new(u, v + 1), LatticePoint::new(u + 1, v + 1)]
            }
        }
    }

    /// The three edge-adjacent cells, counterclockwise starting from the one
    /// across the edge nearest angle 30° (up) or 90° (down).
    pub fn neighbors(self) -> [UnitTriangle; 3] {
        let (u, v) = (self.u, self.v);
        match self.orientation {
            Orientation::Up => [UnitTriangle::down(u, v), UnitTriangle::down(u - 1, v), UnitTriangle::down(u, v - 1)],
            Orientation::Down => [UnitTriangle::up(u, v + 1), UnitTriangle::up(u, v), UnitTriangle::up(u + 1, v)],
        }
    }

    pub fn is_adjacent(self, other: UnitTriangle) -> bool {
        self.neighbors().contains(&other)
    }

    pub const fn translate(self, du: i64, dv: i64) -> Self {
        UnitTriangle { u: self.u + du, v: self.v + dv, orientation: self.orientation }
    }

    /// Point reflection through the origin.
    pub fn rotate_180(self) -> Self {
        match self.orientation {
            Orientation::Up => UnitTriangle::down(-self.u - 1, -self.v - 1),
            Orientation::Down => UnitTriangle::up(-self.u - 1, -self.v - 1),
        }
    }

    /// Counterclockwise rotation by 120° about the origin: `(u,v) ↦ (-u-v, u)`.
    pub fn rotate_120(self) -> Self {
        let (u, v) = (self.u, self.v);
        match self.orientation {
            Orientation::Up => UnitTriangle::up(-u - v - 1, u),
            Orientation::Down => UnitTriangle::down(-u - v - 2, u),
        }
    }

    /// Centroid scaled by 3 so it stays integral.
    pub fn centroid3(self) -> (i64, i64) {
        match self.orientation {
            Orientation::Up => (3 * self.u + 1, 3 * self.v + 1),
            Orientation::Down => (3 * self.u + 2, 3 * self.v + 2),
        }
    }
}

impl fmt::Display for UnitTriangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = if self.is_up() { "up" } else { "down" };
        write!(f, "{}({},{})", o, self.u, self.v)
    }
}

/// An up and a down cell sharing an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lozenge {
    pub up: UnitTriangle,
    pub down: UnitTriangle,
}

impl Lozenge {
    pub fn new(a: UnitTriangle, b: UnitTriangle) -> Option<Self> {
        if !a.is_adjacent(b) {
            return None;
        }
        Some(if a.is_up() { Lozenge { up: a, down: b } } else { Lozenge { up: b, down: a } })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Region {
    cells: BTreeSet<UnitTriangle>,
}

impl Region {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: &UnitTriangle) -> bool {
        self.cells.contains(c)
    }

    pub fn insert(&mut self, c: UnitTriangle) -> bool {
        self.cells.insert(c)
    }

    pub fn remove(&mut self, c: &UnitTriangle) -> bool {
        self.cells.remove(c)
    }

    /// Cells in lexicographic `(u, v, orientation)` order.
    pub fn iter(&self) -> impl Iterator<Item = UnitTriangle> + '_ {
        self.cells.iter().copied()
    }

    pub fn cells(&self) -> &BTreeSet<UnitTriangle> {
        &self.cells
    }

    pub fn n_up(&self) -> usize {
        self.cells.iter().filter(|c| c.is_up()).count()
    }

    pub fn n_down(&self) -> usize {
        self.len() - self.n_up()
    }

    pub fn balanced(&self) -> bool {
        2 * self.n_up() == self.len()
    }

    pub fn without<'a>(&self, removed: impl IntoIterator<Item = &'a UnitTriangle>) -> Region {
        let mut r = self.clone();
        for c in removed {
            r.cells.remove(c);
        }
        r
    }

    pub fn difference(&self, other: &Region) -> Region {
        self.cells.difference(&other.cells).copied().collect()
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.cells.is_subset(&other.cells)
    }

    pub fn is_disjoint(&self, other: &Region) -> bool {
        self.cells.is_disjoint(&other.cells)
    }

    pub fn translate(&self, du: i64, dv: i64) -> Region {
        self.iter().map(|c| c.translate(du, dv)).collect()
    }

    pub fn rotate_180(&self) -> Region {
        self.iter().map(UnitTriangle::rotate_180).collect()
    }

    pub fn rotate_120(&self) -> Region {
        self.iter().map(UnitTriangle::rotate_120).collect()
    }
}

impl FromIterator<UnitTriangle> for Region {
    fn from_iter<I: IntoIterator<Item = UnitTriangle>>(iter: I) -> Self {
        Region { cells: iter.into_iter().collect() }
    }
}

impl Extend<UnitTriangle> for Region {
    fn extend<I: IntoIterator<Item = UnitTriangle>>(&mut self, iter: I) {
        self.cells.extend(iter)
    }
}

pub fn balanced(r: &Region) -> bool {
    r.balanced()
}

/// Planar dual restricted to a region: up cells on one side, down cells on
/// the other, an edge for every placeable lozenge.
#[derive(Clone, Debug)]
pub struct DualGraph {
    pub ups: Vec<UnitTriangle>,
    pub downs: Vec<UnitTriangle>,
    /// For each up cell, indices into `downs`.
    pub up_adj: Vec<Vec<usize>>,
    /// For each down cell, indices into `ups`.
    pub down_adj: Vec<Vec<usize>>,
}

impl DualGraph {
    pub fn edge_count(&self) -> usize {
        self.up_adj.iter().map(Vec::len).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = Lozenge> + '_ {
        self.up_adj
            .iter()
            .enumerate()
            .flat_map(move |(i, nb)| nb.iter().map(move |&j| Lozenge { up: self.ups[i], down: self.downs[j] }))
    }

    /// Number of connected components (isolated cells count as components).
    pub fn component_count(&self) -> usize {
        let n = self.ups.len() + self.downs.len();
        let mut seen = vec![false; n];
        let mut comps = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            comps += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                let nbrs: Vec<usize> = if x < self.ups.len() {
                    self.up_adj[x].iter().map(|&j| self.ups.len() + j).collect()
                } else {
                    self.down_adj[x - self.ups.len()].clone()
                };
                for y in nbrs {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        comps
    }
}

pub fn dual_graph(r: &Region) -> DualGraph {
    let ups: Vec<UnitTriangle> = r.iter().filter(|c| c.is_up()).collect();
    let downs: Vec<UnitTriangle> = r.iter().filter(|c| !c.is_up()).collect();
    let down_index: std::collections::HashMap<UnitTriangle, usize> =
        downs.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut up_adj = vec![Vec::new(); ups.len()];
    let mut down_adj = vec![Vec::new(); downs.len()];
    for (i, c) in ups.iter().enumerate() {
        for n in c.neighbors() {
            if let Some(&j) = down_index.get(&n) {
                up_adj[i].push(j);
                down_adj[j].push(i);
            }
        }
    }
    DualGraph { ups, downs, up_adj, down_adj }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForcedReduction {
    /// What is left once no cell has a unique partner; empty when `untileable`.
    pub core: Region,
    /// Lozenges forced so far, in the order they were found.
    pub forced: Vec<Lozenge>,
    /// Some cell was left with no available partner.
    pub untileable: bool,
}

pub fn remove_forced(r: &Region) -> ForcedReduction {
    let mut live: HashSet<UnitTriangle> = r.iter().collect();
    let mut forced = Vec::new();
    let mut stack: Vec<UnitTriangle> = r.cells().iter().rev().copied().collect();
    while let Some(c) = stack.pop() {
        if !live.contains(&c) {
            continue;
        }
        let mut partners = c.neighbors().into_iter().filter(|n| live.contains(n));
        match (partners.next(), partners.next()) {
            (None, _) => {
                return ForcedReduction { core: Region::new(), forced, untileable: true };
            }
            (Some(p), None) => {
                live.remove(&c);
                live.remove(&p);
                forced.push(Lozenge::new(c, p).expect("neighbors are adjacent"));
                for n in p.neighbors() {
                    if live.contains(&n) {
                        stack.push(n);
                    }
                }
            }
            _ => {}
        }
    }
    ForcedReduction { core: live.into_iter().collect(), forced, untileable: false }
}

/// Hexagon sides, clockwise from the horizontal top side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SideLabel {
    N,
    NE,
    SE,
    S,
    SW,
    NW,
}

impl SideLabel {
    pub const ALL: [SideLabel; 6] =
        [SideLabel::N, SideLabel::NE, SideLabel::SE, SideLabel::S, SideLabel::SW, SideLabel::NW];

    pub const fn index(self) -> usize {
        self as usize
    }

    pub const fn opposite(self) -> SideLabel {
        SideLabel::ALL[(self as usize + 3) % 6]
    }

    /// Next side clockwise.
    pub const fn next(self) -> SideLabel {
        SideLabel::ALL[(self as usize + 1) % 6]
    }

    /// Next side counterclockwise.
    pub const fn prev(self) -> SideLabel {
        SideLabel::ALL[(self as usize + 5) % 6]
    }

    /// Linear functional increasing towards (and constant along) this side.
    pub const fn level(self, p: LatticePoint) -> i64 {
        match self {
            SideLabel::N => p.v,
            SideLabel::S => -p.v,
            SideLabel::NE => p.u + p.v,
            SideLabel::SW => -p.u - p.v,
            SideLabel::SE => p.u,
            SideLabel::NW => -p.u,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            SideLabel::N => "N",
            SideLabel::NE => "NE",
            SideLabel::SE => "SE",
            SideLabel::S => "S",
            SideLabel::SW => "SW",
            SideLabel::NW => "NW",
        }
    }
}

impl fmt::Display for SideLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Six support lines. The frame is `{p : side.level(p) <= offset(side)}`, so
/// pushing a side out is `offset += d` and pulling it in is `offset -= d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BTreeMap<SideLabel, i64>", into = "BTreeMap<SideLabel, i64>")]
pub struct HexFrame {
    offsets: [i64; 6],
}

impl HexFrame {
    pub fn new(offsets: [i64; 6]) -> Result<Self> {
        let frame = HexFrame { offsets };
        for s in SideLabel::ALL {
            let len = frame.side_length(s);
            if len < 0 {
                return Err(Error::Constraint(format!("side {s} would have negative length {len}")));
            }
        }
        Ok(frame)
    }

    /// Frame `vmin <= v <= vmax, umin <= u <= umax, smin <= u+v <= smax`.
    pub fn from_bounds(vmin: i64, vmax: i64, umin: i64, umax: i64, smin: i64, smax: i64) -> Result<Self> {
        HexFrame::new([vmax, smax, umax, -vmin, -smin, -umin])
    }

    /// The frame with the given clockwise side lengths (from N) whose
    /// bottom-left corner region starts at `v = 0`, `u = 0`.
    pub fn with_sides(lengths: [i64; 6]) -> Result<Self> {
        let [n, ne, se, s, sw, nw] = lengths;
        if n - s != se - nw || se - nw != sw - ne {
            return Err(Error::Constraint(format!("side lengths {lengths:?} do not close up into a lattice hexagon")));
        }
        let h = ne + se;
        HexFrame::from_bounds(0, h, 0, s + sw, sw, n + h)
    }

    pub const fn offset(&self, s: SideLabel) -> i64 {
        self.offsets[s.index()]
    }

    pub const fn offsets(&self) -> [i64; 6] {
        self.offsets
    }

    pub const fn side_length(&self, s: SideLabel) -> i64 {
        self.offset(s.prev()) + self.offset(s.next()) - self.offset(s)
    }

    pub fn side_lengths(&self) -> [i64; 6] {
        SideLabel::ALL.map(|s| self.side_length(s))
    }

    /// Distance between the support lines of `s` and its opposite side.
    pub const fn separation(&self, s: SideLabel) -> i64 {
        self.offset(s) + self.offset(s.opposite())
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        SideLabel::ALL.iter().all(|&s| s.level(p) <= self.offset(s))
    }

    /// Signed distance, without the inside check.
    pub const fn distance(&self, p: LatticePoint, s: SideLabel) -> i64 {
        self.offset(s) - s.level(p)
    }

    pub fn shifted(&self, s: SideLabel, outward: i64) -> HexFrame {
        let mut offsets = self.offsets;
        offsets[s.index()] += outward;
        HexFrame { offsets }
    }

    pub fn translate(&self, du: i64, dv: i64) -> HexFrame {
        let p = LatticePoint::new(du, dv);
        HexFrame { offsets: SideLabel::ALL.map(|s| self.offset(s) + s.level(p)) }
    }

    /// Corners clockwise, starting with the NW/N corner.
    pub fn corners(&self) -> [LatticePoint; 6] {
        let (vmax, smax, umax) = (self.offsets[0], self.offsets[1], self.offsets[2]);
        let (vmin, smin, umin) = (-self.offsets[3], -self.offsets[4], -self.offsets[5]);
        [
            LatticePoint::new(umin, vmax),
            LatticePoint::new(smax - vmax, vmax),
            LatticePoint::new(umax, smax - umax),
            LatticePoint::new(umax, vmin),
            LatticePoint::new(smin - vmin, vmin),
            LatticePoint::new(umin, smin - umin),
        ]
    }

    /// Every unit triangle inside the frame.
    pub fn cells(&self) -> Region {
        let (vmax, smax, umax) = (self.offsets[0], self.offsets[1], self.offsets[2]);
        let (vmin, smin, umin) = (-self.offsets[3], -self.offsets[4], -self.offsets[5]);
        let mut r = Region::new();
        for v in vmin..vmax {
            for u in umin.max(smin - v - 1)..=umax.min(smax - v) {
                for c in [UnitTriangle::up(u, v), UnitTriangle::down(u, v)] {
                    if c.vertices().iter().all(|&p| self.contains(p)) {
                        r.insert(c);
                    }
                }
            }
        }
        r
    }
}

impl TryFrom<BTreeMap<SideLabel, i64>> for HexFrame {
    type Error = Error;

    fn try_from(map: BTreeMap<SideLabel, i64>) -> Result<Self> {
        let mut offsets = [0; 6];
        for s in SideLabel::ALL {
            offsets[s.index()] =
                *map.get(&s).ok_or_else(|| Error::Constraint(format!("frame is missing the offset of side {s}")))?;
        }
        HexFrame::new(offsets)
    }
}

impl From<HexFrame> for BTreeMap<SideLabel, i64> {
    fn from(frame: HexFrame) -> Self {
        SideLabel::ALL.iter().map(|&s| (s, frame.offset(s))).collect()
    }
}

pub fn side_distance(p: LatticePoint, frame: &HexFrame, s: SideLabel) -> Result<i64> {
    if !frame.contains(p) {
        return Err(Error::OutsideFrame { u: p.u, v: p.v });
    }
    Ok(frame.distance(p, s))
}

pub fn segment_side_distance(p1: LatticePoint, p2: LatticePoint, frame: &HexFrame, s: SideLabel) -> Result<i64> {
    if s.level(p1) != s.level(p2) {
        return Err(Error::NotParallel(s));
    }
    side_distance(p2, frame, s)?;
    side_distance(p1, frame, s)
}

#[derive(Clone, Debug, Default)]
pub struct SvgAnnotations {
    /// Labelled points drawn as dots (focal points, typically).
    pub markers: Vec<(String, LatticePoint)>,
    /// Outline the frame and label its sides.
    pub frame: Option<HexFrame>,
}

const SVG_SCALE: f64 = 20.0;

fn svg_xy(p: LatticePoint) -> (f64, f64) {
    let (x, y) = p.cartesian();
    // `+ 0.0` turns -0.0 into 0.0 so it never prints as "-0.00".
    (x * SVG_SCALE + 0.0, -y * SVG_SCALE + 0.0)
}

pub fn render_svg(r: &Region, ann: &SvgAnnotations) -> String {
    let mut pts: Vec<LatticePoint> = r.iter().flat_map(|c| c.vertices()).collect();
    if let Some(frame) = &ann.frame {
        pts.extend(frame.corners());
    }
    pts.extend(ann.markers.iter().map(|(_, p)| *p));
    let (mut x0, mut y0, mut x1, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = svg_xy(*p);
        if i == 0 {
            (x0, y0, x1, y1) = (x, y, x, y);
        }
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let pad = SVG_SCALE;
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.2}" height="{h:.2}" viewBox="{:.2} {:.2} {w:.2} {h:.2}">"#,
        x0 - pad,
        y0 - pad
    );
    let _ = writeln!(out, r##"<g fill="#f3e3c3" stroke="#555555" stroke-width="0.6">"##);
    for c in r.iter() {
        let [a, b, d] = c.vertices().map(svg_xy);
        let _ = writeln!(out, r#"<path d="M{:.2} {:.2}L{:.2} {:.2}L{:.2} {:.2}Z"/>"#, a.0, a.1, b.0, b.1, d.0, d.1);
    }
    let _ = writeln!(out, "</g>");
    if let Some(frame) = &ann.frame {
        let corners = frame.corners().map(svg_xy);
        let poly: Vec<String> = corners.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            out,
            r##"<polygon points="{}" fill="none" stroke="#000000" stroke-width="1.6"/>"##,
            poly.join(" ")
        );
        // corners[i] is the start of side ALL[i] when walking clockwise from NW/N.
        for (i, s) in SideLabel::ALL.iter().enumerate() {
            let (ax, ay) = corners[i];
            let (bx, by) = corners[(i + 1) % 6];
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" font-size="10" text-anchor="middle">{}</text>"#,
                (ax + bx) / 2.0,
                (ay + by) / 2.0,
                s
            );
        }
    }
    for (label, p) in &ann.markers {
        let (x, y) = svg_xy(*p);
        let _ = writeln!(out, r##"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="#c0392b"/>"##);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" font-size="9">{}</text>"#, x + 3.0, y - 3.0, label);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hex111() -> Region {
        HexFrame::with_sides([1, 1, 1, 1, 1, 1]).unwrap().cells()
    }

    fn brute_cells(frame: &HexFrame) -> Region {
        let mut r = Region::new();
        for u in -40..40 {
            for v in -40..40 {
                for c in [UnitTriangle::up(u, v), UnitTriangle::down(u, v)] {
                    if c.vertices().iter().all(|&p| frame.contains(p)) {
                        r.insert(c);
                    }
                }
            }
        }
        r
    }

    #[test]
    fn frame_cells_match_vertex_test() {
        for sides in
            [[1, 1, 1, 1, 1, 1], [2, 3, 1, 2, 3, 1], [0, 2, 3, 0, 2, 3], [4, 0, 0, 4, 0, 0], [3, 1, 4, 2, 2, 3]]
        {
            let frame = HexFrame::with_sides(sides).unwrap();
            assert_eq!(frame.side_lengths(), sides);
            assert_eq!(frame.cells(), brute_cells(&frame), "{sides:?}");
            let shifted = frame.translate(-3, 5);
            assert_eq!(shifted.cells(), brute_cells(&shifted));
        }
    }

    #[test]
    fn balance() {
        assert!(!Region::from_iter([UnitTriangle::up(0, 0)]).balanced());
        assert!(Region::from_iter([UnitTriangle::up(0, 0), UnitTriangle::down(0, 0)]).balanced());
        let h = hex111();
        assert_eq!(h.len(), 6);
        assert!(balanced(&h));
    }

    #[test]
    fn neighbors_share_an_edge() {
        for c in [UnitTriangle::up(2, -1), UnitTriangle::down(-3, 4)] {
            for n in c.neighbors() {
                let shared = c.vertices().iter().filter(|p| n.vertices().contains(p)).count();
                assert_eq!(shared, 2);
                assert!(n.neighbors().contains(&c));
            }
        }
    }

    #[test]
    fn rotations_map_cells_to_cells() {
        for c in [UnitTriangle::up(2, -1), UnitTriangle::down(-3, 4), UnitTriangle::up(0, 0)] {
            let rot = |p: LatticePoint| LatticePoint::new(-p.u - p.v, p.u);
            let mut expect: Vec<_> = c.vertices().map(rot).to_vec();
            let mut got = c.rotate_120().vertices().to_vec();
            expect.sort();
            got.sort();
            assert_eq!(got, expect);
            let mut expect: Vec<_> = c.vertices().map(|p| LatticePoint::new(-p.u, -p.v)).to_vec();
            let mut got = c.rotate_180().vertices().to_vec();
            expect.sort();
            got.sort();
            assert_eq!(got, expect);
            assert_eq!(c.rotate_120().rotate_120().rotate_120(), c);
        }
    }

    #[test]
    fn dual_graph_shapes() {
        let lozenge = Region::from_iter([UnitTriangle::up(0, 0), UnitTriangle::down(0, 0)]);
        let g = dual_graph(&lozenge);
        assert_eq!((g.ups.len(), g.downs.len(), g.edge_count()), (1, 1, 1));

        let g = dual_graph(&hex111());
        assert_eq!((g.ups.len(), g.downs.len(), g.edge_count()), (3, 3, 6));
        assert!(g.up_adj.iter().chain(&g.down_adj).all(|nb| nb.len() == 2));
        assert_eq!(g.component_count(), 1);

        let two = Region::from_iter([
            UnitTriangle::up(0, 0),
            UnitTriangle::down(0, 0),
            UnitTriangle::up(5, 5),
            UnitTriangle::down(5, 5),
        ]);
        let g = dual_graph(&two);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.component_count(), 2);
    }

    #[test]
    fn forced_lozenges() {
        let lozenge = Region::from_iter([UnitTriangle::up(0, 0), UnitTriangle::down(0, 0)]);
        let red = remove_forced(&lozenge);
        assert!(red.core.is_empty() && !red.untileable);
        assert_eq!(red.forced.len(), 1);

        let red = remove_forced(&hex111());
        assert_eq!(red.core, hex111());
        assert!(red.forced.is_empty() && !red.untileable);

        let red = remove_forced(&Region::from_iter([UnitTriangle::up(0, 0)]));
        assert!(red.untileable && red.core.is_empty());
    }

    #[test]
    fn distances() {
        let frame = HexFrame::with_sides([2, 3, 1, 2, 3, 1]).unwrap();
        let p = LatticePoint::new(2, 1);
        for s in SideLabel::ALL {
            let d = side_distance(p, &frame, s).unwrap();
            assert!(d >= 0);
            assert_eq!(d + side_distance(p, &frame, s.opposite()).unwrap(), frame.separation(s));
        }
        let top = frame.corners()[0];
        assert_eq!(side_distance(top, &frame, SideLabel::N).unwrap(), 0);
        assert!(matches!(
            side_distance(LatticePoint::new(100, 0), &frame, SideLabel::N),
            Err(Error::OutsideFrame { .. })
        ));
        assert_eq!(segment_side_distance(p, p, &frame, SideLabel::NE).unwrap(), frame.distance(p, SideLabel::NE));
        let q = p.shift(1, 0);
        assert_eq!(segment_side_distance(p, q, &frame, SideLabel::S).unwrap(), 1);
        assert!(matches!(segment_side_distance(p, q, &frame, SideLabel::NE), Err(Error::NotParallel(_))));
    }

    #[test]
    fn frame_rejects_negative_sides() {
        assert!(HexFrame::new([0, 0, 0, 5, 0, 0]).is_err());
        assert!(HexFrame::with_sides([1, 1, 1, 2, 1, 1]).is_err());
    }

    #[test]
    fn frame_json_roundtrip() {
        let frame = HexFrame::with_sides([2, 3, 1, 2, 3, 1]).unwrap();
        let s = serde_json::to_string(&frame).unwrap();
        assert!(s.starts_with(r#"{"N":"#));
        assert_eq!(serde_json::from_str::<HexFrame>(&s).unwrap(), frame);
    }

    #[test]
    fn svg_is_deterministic() {
        let empty = render_svg(&Region::new(), &SvgAnnotations::default());
        assert!(empty.contains("<svg") && !empty.contains("<path"));
        let h = hex111();
        let svg = render_svg(&h, &SvgAnnotations::default());
        assert_eq!(svg.matches("<path").count(), 6);
        assert_eq!(svg, render_svg(&h, &SvgAnnotations::default()));
    }
}

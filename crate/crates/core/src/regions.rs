//! Triad hexagons, bowtie squeezing, and the named region families.
//!
//! Embedding: the focal triangle `ABC` points up with `B = A - f·e2` and
//! `C = A + f·(e1 - e2)`. Outer (down) lobes sit outside the triangle at each
//! node; inner (up) lobes sit inside it — `a'` hangs from `A`, `b'` and `c'`
//! rest on `BC` at `B` and `C`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{HexFrame, LatticePoint, Region, SideLabel, UnitTriangle};

use SideLabel::{N, NE, NW, S, SE, SW};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bowtie {
    Top,
    Left,
    Right,
}

impl Bowtie {
    pub const ALL: [Bowtie; 3] = [Bowtie::Top, Bowtie::Left, Bowtie::Right];

    const fn index(self) -> usize {
        self as usize
    }

    /// Sides pushed out when this bowtie is squeezed out.
    const fn pushed(self) -> [SideLabel; 3] {
        match self {
            Bowtie::Top => [N, NE, NW],
            Bowtie::Left => [SW, S, NW],
            Bowtie::Right => [SE, S, NE],
        }
    }

    /// Translation of `A` per unit squeezed out.
    const fn apex_step(self) -> (i64, i64) {
        match self {
            Bowtie::Top => (0, 0),
            Bowtie::Left => (0, -1),
            Bowtie::Right => (1, -1),
        }
    }
}

impl fmt::Display for Bowtie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Bowtie::Top => "top",
            Bowtie::Left => "left",
            Bowtie::Right => "right",
        })
    }
}

impl std::str::FromStr for Bowtie {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "top" | "a" => Ok(Bowtie::Top),
            "left" | "b" => Ok(Bowtie::Left),
            "right" | "c" => Ok(Bowtie::Right),
            _ => Err(Error::Constraint(format!("unknown bowtie {s:?} (expected top, left or right)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
}

/// One squeezing step, written `top:out:2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Move {
    pub bowtie: Bowtie,
    pub direction: Direction,
    pub d: i64,
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Out => "out",
            Direction::In => "in",
        };
        write!(f, "{}:{dir}:{}", self.bowtie, self.d)
    }
}

impl std::str::FromStr for Move {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Constraint(format!("bad move {s:?} (expected e.g. top:out:2)"));
        let mut parts = s.split(':');
        let (Some(w), Some(dir), Some(d), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        let direction = match dir {
            "out" => Direction::Out,
            "in" => Direction::In,
            _ => return Err(bad()),
        };
        Ok(Move { bowtie: w.parse()?, direction, d: d.parse().map_err(|_| bad())? })
    }
}

impl TryFrom<String> for Move {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Move> for String {
    fn from(m: Move) -> String {
        m.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BowtieSpec {
    pub down_lobe: i64,
    pub up_lobe: i64,
    pub node: LatticePoint,
}

/// Lobe sizes of the three bowties: `(a, a')`, `(b, b')`, `(c, c')`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triad {
    #[serde(default)]
    pub a: i64,
    #[serde(default)]
    pub b: i64,
    #[serde(default)]
    pub c: i64,
    #[serde(default)]
    pub a_prime: i64,
    #[serde(default)]
    pub b_prime: i64,
    #[serde(default)]
    pub c_prime: i64,
}

impl Triad {
    pub const fn new(a: i64, b: i64, c: i64, a_prime: i64, b_prime: i64, c_prime: i64) -> Self {
        Triad { a, b, c, a_prime, b_prime, c_prime }
    }

    pub const fn outer_sum(&self) -> i64 {
        self.a + self.b + self.c
    }

    pub const fn inner_sum(&self) -> i64 {
        self.a_prime + self.b_prime + self.c_prime
    }

    /// `(down, up)` lobe sizes.
    pub const fn lobes(&self, which: Bowtie) -> (i64, i64) {
        match which {
            Bowtie::Top => (self.a, self.a_prime),
            Bowtie::Left => (self.b, self.b_prime),
            Bowtie::Right => (self.c, self.c_prime),
        }
    }

    fn with_lobes(mut self, which: Bowtie, down: i64, up: i64) -> Self {
        match which {
            Bowtie::Top => (self.a, self.a_prime) = (down, up),
            Bowtie::Left => (self.b, self.b_prime) = (down, up),
            Bowtie::Right => (self.c, self.c_prime) = (down, up),
        }
        self
    }

    pub fn as_array(&self) -> [i64; 6] {
        [self.a, self.b, self.c, self.a_prime, self.b_prime, self.c_prime]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Depths {
    pub s_depth: i64,
    pub ne_depth: i64,
    pub nw_depth: i64,
}

impl Depths {
    pub fn all_nonnegative(&self) -> bool {
        self.s_depth >= 0 && self.ne_depth >= 0 && self.nw_depth >= 0
    }

    pub fn min(&self) -> i64 {
        self.s_depth.min(self.ne_depth).min(self.nw_depth)
    }
}

/// Quantities preserved by every squeeze; equal invariants is how two triad
/// hexagons are recognised as squeeze-equivalent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqueezeInvariants {
    pub depths: Depths,
    /// `f - (a' + b' + c')`.
    pub focal_excess: i64,
    pub nw_minus_f: i64,
    pub n_plus_f: i64,
    pub ne_minus_f: i64,
}

/// Up triangle of side `n` with lower-left vertex `p`.
pub fn up_triangle(p: LatticePoint, n: i64) -> impl Iterator<Item = UnitTriangle> {
    (0..n.max(0)).flat_map(move |j| {
        (0..n - j).flat_map(move |i| {
            let up = std::iter::once(UnitTriangle::up(p.u + i, p.v + j));
            let down = (i < n - j - 1).then(|| UnitTriangle::down(p.u + i, p.v + j));
            up.chain(down)
        })
    })
}

/// Down triangle of side `n` with top-left vertex `p`.
pub fn down_triangle(p: LatticePoint, n: i64) -> impl Iterator<Item = UnitTriangle> {
    (0..n.max(0)).flat_map(move |k| {
        let v = p.v - 1 - k;
        (0..n - k).flat_map(move |i| {
            let down = std::iter::once(UnitTriangle::down(p.u + k + i, v));
            let up = (i < n - k - 1).then(|| UnitTriangle::up(p.u + k + i + 1, v));
            down.chain(up)
        })
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TriadRecord", into = "TriadRecord")]
pub struct TriadHexagon {
    frame: HexFrame,
    x: i64,
    y: i64,
    z: i64,
    triad: Triad,
    apex: LatticePoint,
    f: i64,
}

/// The clockwise-from-N side lengths a triad hexagon must have.
pub fn triad_side_lengths(x: i64, y: i64, z: i64, t: &Triad) -> [i64; 6] {
    let (o, i) = (t.outer_sum(), t.inner_sum());
    [x + o, y + i, z + o, x + i, y + o, z + i]
}

/// The frame with the required side lengths whose lowest row is `v = 0` and
/// whose NW side lies on `u = 0`.
pub fn standard_frame(x: i64, y: i64, z: i64, t: &Triad) -> Result<HexFrame> {
    HexFrame::with_sides(triad_side_lengths(x, y, z, t))
}

pub fn build_triad_hexagon(x: i64, y: i64, z: i64, triad: Triad, apex: LatticePoint, f: i64) -> Result<TriadHexagon> {
    check_nonnegative(&[("x", x), ("y", y), ("z", z)])?;
    check_triad(&triad)?;
    TriadHexagon::from_parts(standard_frame(x, y, z, &triad)?, x, y, z, triad, apex, f)
}

fn check_nonnegative(vals: &[(&str, i64)]) -> Result<()> {
    for (name, v) in vals {
        if *v < 0 {
            return Err(Error::Constraint(format!("{name} = {v} must be nonnegative")));
        }
    }
    Ok(())
}

fn check_triad(t: &Triad) -> Result<()> {
    check_nonnegative(&[("a", t.a), ("b", t.b), ("c", t.c), ("a'", t.a_prime), ("b'", t.b_prime), ("c'", t.c_prime)])
}

impl TriadHexagon {
    pub fn from_parts(
        frame: HexFrame,
        x: i64,
        y: i64,
        z: i64,
        triad: Triad,
        apex: LatticePoint,
        f: i64,
    ) -> Result<TriadHexagon> {
        check_nonnegative(&[("x", x), ("y", y), ("z", z)])?;
        check_triad(&triad)?;
        if f < triad.inner_sum() {
            return Err(Error::Constraint(format!(
                "focal distance f = {f} is smaller than a'+b'+c' = {}",
                triad.inner_sum()
            )));
        }
        let want = triad_side_lengths(x, y, z, &triad);
        if frame.side_lengths() != want {
            return Err(Error::Constraint(format!(
                "frame side lengths {:?} differ from the required {want:?}",
                frame.side_lengths()
            )));
        }
        let th = TriadHexagon { frame, x, y, z, triad, apex, f };
        th.check_placement()?;
        Ok(th)
    }

    fn check_placement(&self) -> Result<()> {
        let [a, b, c] = self.focal();
        for (name, p) in [("A", a), ("B", b), ("C", c)] {
            if !self.frame.contains(p) {
                return Err(Error::Placement(format!("focal point {name} = {p} lies outside the hexagon")));
            }
        }
        // The frame is convex, so a lobe lies inside iff its corners do. Lobes
        // cannot overlap once f >= a'+b'+c': inner lobes stay inside ABC and
        // outer lobes sit in the vertical angles at the nodes.
        for (name, corners) in self.lobe_corners() {
            if let Some(p) = corners.iter().find(|&&p| !self.frame.contains(p)) {
                return Err(Error::Placement(format!("{name}-lobe corner {p} lies outside the hexagon")));
            }
        }
        Ok(())
    }

    fn lobe_corners(&self) -> [(&'static str, [LatticePoint; 3]); 6] {
        let [pa, pb, pc] = self.focal();
        let t = &self.triad;
        let (a, b, c, a2, b2, c2) = (t.a, t.b, t.c, t.a_prime, t.b_prime, t.c_prime);
        [
            ("a", [pa, pa.shift(-a, a), pa.shift(0, a)]),
            ("a'", [pa, pa.shift(0, -a2), pa.shift(a2, -a2)]),
            ("b", [pb, pb.shift(-b, 0), pb.shift(0, -b)]),
            ("b'", [pb, pb.shift(b2, 0), pb.shift(0, b2)]),
            ("c", [pc, pc.shift(c, 0), pc.shift(c, -c)]),
            ("c'", [pc, pc.shift(-c2, 0), pc.shift(-c2, c2)]),
        ]
    }

    pub fn frame(&self) -> &HexFrame {
        &self.frame
    }

    pub fn xyz(&self) -> (i64, i64, i64) {
        (self.x, self.y, self.z)
    }

    pub fn triad(&self) -> &Triad {
        &self.triad
    }

    pub fn f(&self) -> i64 {
        self.f
    }

    pub fn apex(&self) -> LatticePoint {
        self.apex
    }

    /// `[A, B, C]`.
    pub fn focal(&self) -> [LatticePoint; 3] {
        let a = self.apex;
        [a, a.shift(0, -self.f), a.shift(self.f, -self.f)]
    }

    pub fn bowtie(&self, which: Bowtie) -> BowtieSpec {
        let (down_lobe, up_lobe) = self.triad.lobes(which);
        BowtieSpec { down_lobe, up_lobe, node: self.focal()[which.index()] }
    }

    pub fn distance(&self, p: LatticePoint, s: SideLabel) -> i64 {
        self.frame.distance(p, s)
    }

    /// The six lobes as cell sets, in the order `a, a', b, b', c, c'`.
    pub fn lobes(&self) -> [Region; 6] {
        let [pa, pb, pc] = self.focal();
        let t = &self.triad;
        [
            down_triangle(pa.shift(-t.a, t.a), t.a).collect(),
            up_triangle(pa.shift(0, -t.a_prime), t.a_prime).collect(),
            down_triangle(pb.shift(-t.b, 0), t.b).collect(),
            up_triangle(pb, t.b_prime).collect(),
            down_triangle(pc, t.c).collect(),
            up_triangle(pc.shift(-t.c_prime, 0), t.c_prime).collect(),
        ]
    }

    pub fn holes(&self) -> Region {
        self.lobes().into_iter().flat_map(|r| r.cells().clone()).collect()
    }

    pub fn region(&self) -> Region {
        let mut r = self.frame.cells();
        for lobe in self.lobes() {
            for c in lobe.iter() {
                let removed = r.remove(&c);
                debug_assert!(removed, "lobe cell {c} outside the hexagon or overlapping another lobe");
            }
        }
        r
    }

    pub fn depths(&self) -> Depths {
        let [pa, pb, _] = self.focal();
        let t = &self.triad;
        Depths {
            s_depth: self.distance(pb, S) - t.b - t.c,
            ne_depth: self.distance(pa, NE) - t.a - t.c,
            nw_depth: self.distance(pa, NW) - t.a - t.b,
        }
    }

    pub fn is_tileable_by_depths(&self) -> bool {
        self.depths().all_nonnegative()
    }

    pub fn invariants(&self) -> SqueezeInvariants {
        SqueezeInvariants {
            depths: self.depths(),
            focal_excess: self.f - self.triad.inner_sum(),
            nw_minus_f: self.frame.side_length(NW) - self.f,
            n_plus_f: self.frame.side_length(N) + self.f,
            ne_minus_f: self.frame.side_length(NE) - self.f,
        }
    }

    /// Signed squeeze: positive `d` squeezes out, negative squeezes in. No
    /// bound checks.
    fn squeezed(&self, which: Bowtie, d: i64) -> Result<TriadHexagon> {
        let (down, up) = self.triad.lobes(which);
        let pushed = which.pushed();
        let mut frame = self.frame;
        for s in SideLabel::ALL {
            let delta = if pushed.contains(&s) { d } else { -d };
            frame = frame.shifted(s, delta);
        }
        let (du, dv) = which.apex_step();
        TriadHexagon::from_parts(
            frame,
            self.x,
            self.y,
            self.z,
            self.triad.with_lobes(which, down + d, up - d),
            self.apex.shift(du * d, dv * d),
            self.f - d,
        )
    }

    pub fn squeeze_out(&self, which: Bowtie, d: i64) -> Result<TriadHexagon> {
        let (_, up) = self.triad.lobes(which);
        if d < 0 || d > up {
            return Err(Error::SqueezeTooFar { bowtie: which, requested: d, available: up });
        }
        self.squeezed(which, d)
    }

    pub fn squeeze_in(&self, which: Bowtie, d: i64) -> Result<TriadHexagon> {
        let (down, _) = self.triad.lobes(which);
        if d < 0 || d > down {
            return Err(Error::SqueezeTooFar { bowtie: which, requested: d, available: down });
        }
        self.squeezed(which, -d)
    }

    pub fn apply(&self, m: &Move) -> Result<TriadHexagon> {
        match m.direction {
            Direction::Out => self.squeeze_out(m.bowtie, m.d),
            Direction::In => self.squeeze_in(m.bowtie, m.d),
        }
    }

    /// The moves taking this region to its fully squeezed-out form.
    pub fn full_squeeze_moves(&self) -> Vec<Move> {
        Bowtie::ALL
            .into_iter()
            .map(|w| Move { bowtie: w, direction: Direction::Out, d: self.triad.lobes(w).1 })
            .filter(|m| m.d > 0)
            .collect()
    }

    /// All inner lobes shrunk to zero.
    pub fn fully_squeeze_out(&self) -> TriadHexagon {
        let mut th = self.clone();
        for w in Bowtie::ALL {
            let d = th.triad.lobes(w).1;
            th = th.squeezed(w, d).expect("squeezing out keeps a triad hexagon valid");
        }
        th
    }

    /// All outer lobes shrunk to zero.
    pub fn fully_squeeze_in(&self) -> Result<TriadHexagon> {
        let mut th = self.clone();
        for w in Bowtie::ALL {
            let d = th.triad.lobes(w).0;
            th = th.squeezed(w, -d)?;
        }
        Ok(th)
    }

    /// Pull in the given sides by one unit each and re-derive x, y, z.
    fn pulled_in(&self, sides: &[SideLabel]) -> Result<TriadHexagon> {
        let mut frame = self.frame;
        for &s in sides {
            frame = frame.shifted(s, -1);
        }
        let len = frame.side_lengths();
        let (o, i) = (self.triad.outer_sum(), self.triad.inner_sum());
        TriadHexagon::from_parts(frame, len[0] - o, len[1] - i, len[2] - o, self.triad, self.apex, self.f)
    }

    /// The five companions `R2..R6` used in the condensation recurrence
    /// `M(R)M(R2) = M(R3)M(R4) + M(R5)M(R6)`, with `(x,y,z)` shifted to
    /// `(x,y-1,z-1)`, `(x,y-1,z)`, `(x,y,z-1)`, `(x-1,y,z)`, `(x+1,y-1,z-1)`.
    pub fn condensation_companions(&self) -> Result<[TriadHexagon; 5]> {
        self.condensation_preconditions()?;
        Ok([
            self.pulled_in(&[N, S, SW, NW])?,
            self.pulled_in(&[N, NW])?,
            self.pulled_in(&[S, SW])?,
            self.pulled_in(&[SW, NW])?,
            self.pulled_in(&[N, S])?,
        ])
    }

    pub fn condensation_preconditions(&self) -> Result<()> {
        let [pa, pb, _] = self.focal();
        let t = &self.triad;
        let dp = self.depths();
        let checks = [
            (self.x >= 1, "x >= 1"),
            (self.y >= 1, "y >= 1"),
            (self.z >= 1, "z >= 1"),
            (self.distance(pa, N) > t.a, "top bowtie clear of the N side"),
            (self.distance(pb, SW) > t.b, "left bowtie clear of the SW side"),
            (dp.nw_depth > 0, "positive NW-depth"),
            (dp.s_depth > 0, "positive S-depth"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, what)) => Err(Error::Precondition(format!("condensation needs {what}"))),
            None => Ok(()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TriadRecord {
    x: i64,
    y: i64,
    z: i64,
    f: i64,
    frame: HexFrame,
    top: BowtieSpec,
    left: BowtieSpec,
    right: BowtieSpec,
}

impl From<TriadHexagon> for TriadRecord {
    fn from(th: TriadHexagon) -> Self {
        TriadRecord {
            x: th.x,
            y: th.y,
            z: th.z,
            f: th.f,
            frame: th.frame,
            top: th.bowtie(Bowtie::Top),
            left: th.bowtie(Bowtie::Left),
            right: th.bowtie(Bowtie::Right),
        }
    }
}

impl TryFrom<TriadRecord> for TriadHexagon {
    type Error = Error;

    fn try_from(r: TriadRecord) -> Result<Self> {
        let triad = Triad::new(
            r.top.down_lobe,
            r.left.down_lobe,
            r.right.down_lobe,
            r.top.up_lobe,
            r.left.up_lobe,
            r.right.up_lobe,
        );
        let th = TriadHexagon::from_parts(r.frame, r.x, r.y, r.z, triad, r.top.node, r.f)?;
        let [_, b, c] = th.focal();
        if r.left.node != b || r.right.node != c {
            return Err(Error::Placement(format!(
                "nodes {}, {}, {} do not form a focal triangle of side {}",
                r.top.node, r.left.node, r.right.node, r.f
            )));
        }
        Ok(th)
    }
}

pub fn build_hexagon(x: i64, y: i64, z: i64) -> Result<Region> {
    Ok(Hexagon { x, y, z }.as_triad()?.region())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hexagon {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

/// A triad hexagon given directly by its parameters in the standard frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriadParams {
    pub x: i64,
    pub y: i64,
    pub z: i64,
    #[serde(flatten)]
    pub triad: Triad,
    pub apex: LatticePoint,
    pub f: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MagnetBar {
    pub x: i64,
    pub y: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub m: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Snowman {
    pub x: i64,
    pub y: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub k: i64,
}

/// Single bowtie `(a, a')` with its node at `node` in the standard frame, or
/// at a centred default position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Hourglass {
    pub x: i64,
    pub y: i64,
    pub z: i64,
    pub a: i64,
    pub a_prime: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<LatticePoint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasedHourglass {
    pub d: i64,
    pub e: i64,
    pub f: i64,
    pub y: i64,
    pub z: i64,
    pub a: i64,
    pub a_prime: i64,
    pub b_prime: i64,
    pub c_prime: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sphinx {
    pub d: i64,
    pub x: i64,
    pub y: i64,
    pub z: i64,
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub a_prime: i64,
    pub b_prime: i64,
    pub c_prime: i64,
}

/// Bowties touching the N, SW and SE sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThreeDent {
    pub x: i64,
    pub y: i64,
    pub z: i64,
    #[serde(flatten)]
    pub triad: Triad,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Hexagon(Hexagon),
    Triad(TriadParams),
    MagnetBar(MagnetBar),
    Snowman(Snowman),
    Hourglass(Hourglass),
    BasedHourglass(BasedHourglass),
    Sphinx(Sphinx),
    ThreeDent(ThreeDent),
}

impl Hexagon {
    pub fn as_triad(&self) -> Result<TriadHexagon> {
        check_nonnegative(&[("x", self.x), ("y", self.y), ("z", self.z)])?;
        let t = Triad::default();
        let frame = standard_frame(self.x, self.y, self.z, &t)?;
        // Any frame point works as a degenerate focal triangle; use the S/SW corner.
        let apex = frame.corners()[4];
        TriadHexagon::from_parts(frame, self.x, self.y, self.z, t, apex, 0)
    }
}

impl TriadParams {
    pub fn as_triad(&self) -> Result<TriadHexagon> {
        build_triad_hexagon(self.x, self.y, self.z, self.triad, self.apex, self.f)
    }
}

impl MagnetBar {
    /// The dent of side `m` sits on the base at distance `a` from the SW
    /// corner; the outer lobe `c` stands on its apex.
    pub fn as_triad(&self) -> Result<TriadHexagon> {
        let MagnetBar { x, y, a, b, c, m } = *self;
        check_nonnegative(&[("x", x), ("y", y), ("a", a), ("b", b), ("c", c), ("m", m)])?;
        let t = Triad::new(c, 0, 0, m, 0, 0);
        let frame = standard_frame(a + b, y, x, &t)?;
        let u_b = -frame.offset(SW) + a;
        build_triad_hexagon(a + b, y, x, t, LatticePoint::new(u_b, m), m)
    }
}

impl Snowman {
    /// Degenerate N side: `A` is the top corner, the `a` lobe hangs from it,
    /// and the `b`/`c` dents sit on the NW/NE sides.
    pub fn as_triad(&self) -> Result<TriadHexagon> {
        let Snowman { x, y, a, b, c, k } = *self;
        check_nonnegative(&[("x", x), ("y", y), ("a", a), ("b", b), ("c", c), ("k", k)])?;
        let t = Triad::new(0, 0, 0, a, b, c);
        let frame = standard_frame(0, y + k, x + k, &t)?;
        let top = frame.corners()[0];
        build_triad_hexagon(0, y + k, x + k, t, top, a + b + c + k)
    }
}

impl Hourglass {
    pub fn as_triad(&self) -> Result<TriadHexagon> {
        let Hourglass { x, y, z, a, a_prime, node } = *self;
        check_nonnegative(&[("x", x), ("y", y), ("z", z), ("a", a), ("a'", a_prime)])?;
        let t = Triad::new(a, 0, 0, a_prime, 0, 0);
        match node {
            Some(p) => build_triad_hexagon(x, y, z, t, p, a_prime),
            None => self.default_placement(),
        }
    }

    /// The valid node closest to the centre: balances the gaps above and
    /// below the bowtie, then the NW/NE distances; ties go to the smallest
    /// `(u, v)`.
    fn default_placement(&self) -> Result<TriadHexagon> {
        let t = Triad::new(self.a, 0, 0, self.a_prime, 0, 0);
        let frame = standard_frame(self.x, self.y, self.z, &t)?;
        let (vmax, umax) = (frame.offset(N), frame.offset(SE));
        let mut best: Option<(i64, TriadHexagon)> = None;
        for u in 0..=umax {
            for v in 0..=vmax {
                let p = LatticePoint::new(u, v);
                let Ok(th) = TriadHexagon::from_parts(frame, self.x, self.y, self.z, t, p, self.a_prime) else {
                    continue;
                };
                let gap_n = frame.distance(p, N) - self.a;
                let gap_s = frame.distance(p, S) - self.a_prime;
                let cost = (gap_n - gap_s).abs() + (frame.distance(p, NW) - frame.distance(p, NE)).abs();
                if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                    best = Some((cost, th));
                }
            }
        }
        best.map(|(_, th)| th)
            .ok_or_else(|| Error::Placement("no node position fits the bowtie inside the hexagon".into()))
    }
}

impl BasedHourglass {
    pub fn validate(&self) -> Result<()> {
        let BasedHourglass { d, e, f, y, z, a, a_prime, b_prime, c_prime } = *self;
        check_nonnegative(&[
            ("d", d),
            ("e", e),
            ("f", f),
            ("y", y),
            ("z", z),
            ("a", a),
            ("a'", a_prime),
            ("b'", b_prime),
            ("c'", c_prime),
        ])?;
        if f > y + z {
            return Err(Error::Constraint(format!("based hourglass needs f <= y + z, got f = {f}, y + z = {}", y + z)));
        }
        Ok(())
    }

    /// Focal edge `BC` on the base, `d` units from the SW corner.
    pub fn as_triad(&self) -> Result<TriadHexagon> {
        self.validate()?;
        let t = Triad::new(self.a, 0, 0, self.a_prime, self.b_prime, self.c_prime);
        let x = self.d + self.e + self.f;
        let frame = standard_frame(x, self.y, self.z, &t)?;
        let focal = self.f + t.inner_sum();
        let u_b = -frame.offset(SW) + self.d;
        build_triad_hexagon(x, self.y, self.z, t, LatticePoint::new(u_b, focal), focal)
    }

    /// The fully squeezed region cut along the line through its bottom focal
    /// edge, keeping the part above.
    pub fn companion_cored_hexagon(&self) -> Result<Region> {
        let bar = self.as_triad()?.fully_squeeze_out();
        let v_b = bar.focal()[1].v;
        Ok(bar.region().iter().filter(|c| c.v >= v_b).collect())
    }
}

impl Sphinx {
    pub fn validate(&self) -> Result<()> {
        let Sphinx { d, x, y, z, a, b, c, a_prime, b_prime, c_prime } = *self;
        check_nonnegative(&[
            ("d", d),
            ("x", x),
            ("y", y),
            ("z", z),
            ("a", a),
            ("b", b),
            ("c", c),
            ("a'", a_prime),
            ("b'", b_prime),
            ("c'", c_prime),
        ])?;
        if x > y + z {
            return Err(Error::Constraint(format!("sphinx needs x <= y + z, got x = {x}, y + z = {}", y + z)));
        }
        Ok(())
    }

    pub fn triad(&self) -> Triad {
        Triad::new(self.a, self.b, self.c, self.a_prime, self.b_prime, self.c_prime)
    }

    /// The `b` and `c` lobes rest on the S side with `BC` at height `d+b+c`.
    pub fn as_triad(&self) -> Result<TriadHexagon> {
        self.validate()?;
        let t = self.triad();
        let (x, y, z) = (self.x, self.y + self.d, self.z + self.d);
        let frame = standard_frame(x, y, z, &t)?;
        let focal = self.x + self.d + t.inner_sum();
        let v_b = self.d + self.b + self.c;
        let u_b = -frame.offset(SW) + self.b - v_b;
        build_triad_hexagon(x, y, z, t, LatticePoint::new(u_b, v_b + focal), focal)
    }
}

impl ThreeDent {
    pub fn validate(&self) -> Result<()> {
        let ThreeDent { x, y, z, triad } = *self;
        check_nonnegative(&[("x", x), ("y", y), ("z", z)])?;
        check_triad(&triad)?;
        let total = x + y + z;
        if total % 2 != 0 {
            return Err(Error::Constraint(format!("three touching bowties need x + y + z even, got {total}")));
        }
        if 2 * x.max(y).max(z) > total {
            return Err(Error::Constraint(format!(
                "three touching bowties need max(x,y,z) <= (x+y+z)/2, got ({x},{y},{z})"
            )));
        }
        Ok(())
    }

    pub fn as_triad(&self) -> Result<TriadHexagon> {
        self.validate()?;
        let ThreeDent { x, y, z, triad: t } = *self;
        let f = t.inner_sum() + (x + y + z) / 2;
        let frame = standard_frame(x, y, z, &t)?;
        let v_a = frame.offset(N) - t.a;
        let u_a = -frame.offset(SW) + t.b + f - v_a;
        build_triad_hexagon(x, y, z, t, LatticePoint::new(u_a, v_a), f)
    }
}

impl FamilySpec {
    pub fn as_triad(&self) -> Result<TriadHexagon> {
        match self {
            FamilySpec::Hexagon(s) => s.as_triad(),
            FamilySpec::Triad(s) => s.as_triad(),
            FamilySpec::MagnetBar(s) => s.as_triad(),
            FamilySpec::Snowman(s) => s.as_triad(),
            FamilySpec::Hourglass(s) => s.as_triad(),
            FamilySpec::BasedHourglass(s) => s.as_triad(),
            FamilySpec::Sphinx(s) => s.as_triad(),
            FamilySpec::ThreeDent(s) => s.as_triad(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Hexagon(_) => "hexagon",
            FamilySpec::Triad(_) => "triad",
            FamilySpec::MagnetBar(_) => "magnet_bar",
            FamilySpec::Snowman(_) => "snowman",
            FamilySpec::Hourglass(_) => "hourglass",
            FamilySpec::BasedHourglass(_) => "based_hourglass",
            FamilySpec::Sphinx(_) => "sphinx",
            FamilySpec::ThreeDent(_) => "three_dent",
        }
    }
}

pub fn build_family(spec: &FamilySpec) -> Result<Region> {
    Ok(spec.as_triad()?.region())
}

pub fn as_triad(spec: &FamilySpec) -> Result<TriadHexagon> {
    spec.as_triad()
}

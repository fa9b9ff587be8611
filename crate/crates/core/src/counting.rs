//! Exact tiling counts (perfect matchings of the dual graph), tileability,
//! and the condensation identity check.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{dual_graph, Region, UnitTriangle};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountConfig {
    /// Largest number of dual edges allowed to cross the sweep line.
    pub max_frontier: usize,
    /// Cell bound for the branching oracle.
    pub max_oracle_cells: usize,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig { max_frontier: 28, max_oracle_cells: 64 }
    }
}

/// Cells in sweep order with, for each, the forward offsets of its
/// neighbours.
struct SweepPlan {
    forward: Vec<Vec<u32>>,
    frontier: usize,
    window: usize,
}

fn sweep_plan(r: &Region) -> SweepPlan {
    let mut cells: Vec<UnitTriangle> = r.iter().collect();
    cells.sort_by_key(|c| (c.v, c.u, c.orientation));
    let index: FxHashMap<UnitTriangle, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let n = cells.len();
    let mut forward = Vec::with_capacity(n);
    let mut crossing = vec![0i64; n + 2];
    let mut window = 0;
    for (i, c) in cells.iter().enumerate() {
        let mut fwd: Vec<u32> = c
            .neighbors()
            .iter()
            .filter_map(|nb| index.get(nb).copied())
            .filter(|&j| j > i)
            .map(|j| (j - i) as u32)
            .collect();
        fwd.sort_unstable();
        for &d in &fwd {
            crossing[i + 1] += 1;
            crossing[i + d as usize + 1] -= 1;
            window = window.max(d as usize);
        }
        forward.push(fwd);
    }
    let mut frontier = 0i64;
    let mut acc = 0i64;
    for x in &crossing {
        acc += x;
        frontier = frontier.max(acc);
    }
    SweepPlan { forward, frontier: frontier as usize, window }
}

/// The three rotations of `r` with their sweep plans; the DP uses the one
/// with the narrowest frontier.
fn best_plan(r: &Region) -> SweepPlan {
    let mut best = sweep_plan(r);
    let mut rotated = r.clone();
    for _ in 0..2 {
        rotated = rotated.rotate_120();
        let p = sweep_plan(&rotated);
        if (p.frontier, p.window) < (best.frontier, best.window) {
            best = p;
        }
    }
    best
}

/// Frontier width the DP would face on this region.
pub fn frontier_width(r: &Region) -> usize {
    best_plan(r).frontier
}

trait Tally: Clone {
    fn nothing() -> Self;
    fn unit() -> Self;
    /// `false` on overflow.
    fn add(&mut self, other: &Self) -> bool;
}

impl Tally for u128 {
    fn nothing() -> Self {
        0
    }

    fn unit() -> Self {
        1
    }

    fn add(&mut self, other: &Self) -> bool {
        match self.checked_add(*other) {
            Some(s) => {
                *self = s;
                true
            }
            None => false,
        }
    }
}

impl Tally for BigUint {
    fn nothing() -> Self {
        Zero::zero()
    }

    fn unit() -> Self {
        One::one()
    }

    fn add(&mut self, other: &Self) -> bool {
        *self += other;
        true
    }
}

/// Broken-profile sweep. Bit `k` of a state means the cell `k` places ahead
/// of the current one is already covered.
fn run_profile<T: Tally>(plan: &SweepPlan) -> Option<T> {
    let mut states: FxHashMap<u128, T> = FxHashMap::default();
    states.insert(0, T::unit());
    for fwd in &plan.forward {
        let mut next: FxHashMap<u128, T> = FxHashMap::with_capacity_and_hasher(states.len() * 2, Default::default());
        for (mask, cnt) in states {
            if mask & 1 == 1 {
                let key = mask >> 1;
                match next.get_mut(&key) {
                    Some(acc) => {
                        if !acc.add(&cnt) {
                            return None;
                        }
                    }
                    None => {
                        next.insert(key, cnt);
                    }
                }
                continue;
            }
            for &d in fwd {
                let bit = 1u128 << d;
                if mask & bit != 0 {
                    continue;
                }
                let key = (mask | bit) >> 1;
                match next.get_mut(&key) {
                    Some(acc) => {
                        if !acc.add(&cnt) {
                            return None;
                        }
                    }
                    None => {
                        next.insert(key, cnt.clone());
                    }
                }
            }
        }
        states = next;
        if states.is_empty() {
            break;
        }
    }
    Some(states.remove(&0).unwrap_or_else(T::nothing))
}

pub fn count_tilings(r: &Region) -> Result<BigUint> {
    count_tilings_with(r, &CountConfig::default())
}

pub fn count_tilings_with(r: &Region, cfg: &CountConfig) -> Result<BigUint> {
    if !r.balanced() {
        return Ok(BigUint::zero());
    }
    if r.is_empty() {
        return Ok(BigUint::one());
    }
    let plan = best_plan(r);
    if plan.frontier > cfg.max_frontier {
        return Err(Error::ResourceLimit(format!(
            "frontier width {} exceeds the configured bound {}",
            plan.frontier, cfg.max_frontier
        )));
    }
    if plan.window >= 127 {
        return Err(Error::ResourceLimit(format!("sweep window {} exceeds 126 cells", plan.window)));
    }
    if let Some(n) = run_profile::<u128>(&plan) {
        return Ok(BigUint::from(n));
    }
    Ok(run_profile::<BigUint>(&plan).expect("big integers do not overflow"))
}

/// Independent count by branching on the first uncovered cell in
/// lexicographic order.
pub fn count_tilings_oracle(r: &Region) -> Result<BigUint> {
    count_tilings_oracle_with(r, &CountConfig::default())
}

pub fn count_tilings_oracle_with(r: &Region, cfg: &CountConfig) -> Result<BigUint> {
    if r.len() > cfg.max_oracle_cells {
        return Err(Error::ResourceLimit(format!(
            "oracle limited to {} cells, region has {}",
            cfg.max_oracle_cells,
            r.len()
        )));
    }
    let cells: Vec<UnitTriangle> = r.iter().collect();
    let index: HashMap<UnitTriangle, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let adj: Vec<Vec<usize>> =
        cells.iter().map(|c| c.neighbors().iter().filter_map(|n| index.get(n).copied()).collect()).collect();
    fn branch(adj: &[Vec<usize>], covered: &mut [bool], from: usize) -> BigUint {
        let Some(i) = (from..covered.len()).find(|&i| !covered[i]) else {
            return BigUint::one();
        };
        covered[i] = true;
        let mut total = BigUint::zero();
        for &j in &adj[i] {
            if !covered[j] {
                covered[j] = true;
                total += branch(adj, covered, i + 1);
                covered[j] = false;
            }
        }
        covered[i] = false;
        total
    }
    let mut covered = vec![false; cells.len()];
    Ok(branch(&adj, &mut covered, 0))
}

/// Whether a perfect matching exists (augmenting paths, no counting).
pub fn has_tiling(r: &Region) -> bool {
    if !r.balanced() {
        return false;
    }
    let g = dual_graph(r);
    let mut match_down: Vec<Option<usize>> = vec![None; g.downs.len()];
    let mut match_up: Vec<Option<usize>> = vec![None; g.ups.len()];
    // Greedy start; augmenting paths do the rest.
    for (u, nb) in g.up_adj.iter().enumerate() {
        if let Some(&d) = nb.iter().find(|&&d| match_down[d].is_none()) {
            match_down[d] = Some(u);
            match_up[u] = Some(d);
        }
    }
    fn augment(u: usize, adj: &[Vec<usize>], match_down: &mut [Option<usize>], seen: &mut [u32], stamp: u32) -> bool {
        for &d in &adj[u] {
            if seen[d] == stamp {
                continue;
            }
            seen[d] = stamp;
            if match_down[d].is_none_or(|w| augment(w, adj, match_down, seen, stamp)) {
                match_down[d] = Some(u);
                return true;
            }
        }
        false
    }
    let mut seen = vec![0u32; g.downs.len()];
    for (u, _) in g.ups.iter().enumerate() {
        if match_up[u].is_some() {
            continue;
        }
        let stamp = u as u32 + 1;
        if !augment(u, &g.up_adj, &mut match_down, &mut seen, stamp) {
            return false;
        }
    }
    true
}

/// The boundary walk of the unbounded face of the dual graph, as the
/// sequence of cells visited (cells may repeat at cut vertices).
pub fn outer_face(r: &Region) -> Result<Vec<UnitTriangle>> {
    let g = dual_graph(r);
    if r.is_empty() || g.component_count() != 1 {
        return Err(Error::Precondition("the dual graph must be connected and nonempty".into()));
    }
    if r.len() == 1 {
        return Ok(r.iter().collect());
    }
    // Neighbours in counterclockwise order; the rotation system of the
    // planar embedding by centroids.
    let nbrs = |c: UnitTriangle| -> Vec<UnitTriangle> { c.neighbors().into_iter().filter(|n| r.contains(n)).collect() };
    let mut used: std::collections::HashSet<(UnitTriangle, UnitTriangle)> = Default::default();
    let mut best: Option<(i64, Vec<UnitTriangle>)> = None;
    for start in r.iter() {
        for first in nbrs(start) {
            if used.contains(&(start, first)) {
                continue;
            }
            // Trace a face keeping it on the left: at each vertex take the
            // neighbour just clockwise of the one we came from.
            let mut walk = Vec::new();
            let (mut from, mut to) = (start, first);
            loop {
                used.insert((from, to));
                walk.push(from);
                let around = nbrs(to);
                let k = around.iter().position(|&n| n == from).expect("edge is symmetric");
                let next = around[(k + around.len() - 1) % around.len()];
                (from, to) = (to, next);
                if (from, to) == (start, first) {
                    break;
                }
            }
            let area2: i64 = (0..walk.len())
                .map(|i| {
                    let (x0, y0) = walk[i].centroid3();
                    let (x1, y1) = walk[(i + 1) % walk.len()].centroid3();
                    x0 * y1 - x1 * y0
                })
                .sum();
            if best.as_ref().is_none_or(|(a, _)| area2 < *a) {
                best = Some((area2, walk));
            }
        }
    }
    Ok(best.expect("connected graph with an edge has a face").1)
}

fn appear_in_order(walk: &[UnitTriangle], seq: [UnitTriangle; 4]) -> bool {
    let n = walk.len();
    (0..n).filter(|&p| walk[p] == seq[0]).any(|p| {
        let mut want = 1;
        for k in 1..n {
            if walk[(p + k) % n] == seq[want] {
                want += 1;
                if want == 4 {
                    return true;
                }
            }
        }
        false
    })
}

/// The six counts of the condensation identity
/// `M(G)M(G-αβγδ) = M(G-αβ)M(G-γδ) + M(G-αδ)M(G-βγ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KuoCheck {
    pub full: BigUint,
    pub without_all: BigUint,
    pub without_ab: BigUint,
    pub without_cd: BigUint,
    pub without_ad: BigUint,
    pub without_bc: BigUint,
}

impl KuoCheck {
    pub fn lhs(&self) -> BigUint {
        &self.full * &self.without_all
    }

    pub fn rhs(&self) -> BigUint {
        &self.without_ab * &self.without_cd + &self.without_ad * &self.without_bc
    }

    pub fn holds(&self) -> bool {
        self.lhs() == self.rhs()
    }
}

pub fn kuo_preconditions(r: &Region, cells: [UnitTriangle; 4]) -> Result<()> {
    let [alpha, beta, gamma, delta] = cells;
    for (i, c) in cells.iter().enumerate() {
        if !r.contains(c) {
            return Err(Error::Precondition(format!("{c} is not a cell of the region")));
        }
        if cells[..i].contains(c) {
            return Err(Error::Precondition(format!("{c} is listed twice")));
        }
    }
    if alpha.orientation != gamma.orientation
        || beta.orientation != delta.orientation
        || alpha.orientation == beta.orientation
    {
        return Err(Error::Precondition("α, γ and β, δ must lie in opposite colour classes".into()));
    }
    let walk = outer_face(r)?;
    let rev: Vec<UnitTriangle> = walk.iter().rev().copied().collect();
    if !appear_in_order(&walk, cells) && !appear_in_order(&rev, cells) {
        return Err(Error::Precondition("α, β, γ, δ do not appear in cyclic order on the outer face".into()));
    }
    Ok(())
}

pub fn kuo_check(r: &Region, cells: [UnitTriangle; 4]) -> Result<KuoCheck> {
    kuo_check_with(r, cells, &CountConfig::default())
}

pub fn kuo_check_with(r: &Region, cells: [UnitTriangle; 4], cfg: &CountConfig) -> Result<KuoCheck> {
    kuo_preconditions(r, cells)?;
    let [a, b, c, d] = cells;
    let m = |removed: &[UnitTriangle]| count_tilings_with(&r.without(removed), cfg);
    Ok(KuoCheck {
        full: m(&[])?,
        without_all: m(&[a, b, c, d])?,
        without_ab: m(&[a, b])?,
        without_cd: m(&[c, d])?,
        without_ad: m(&[a, d])?,
        without_bc: m(&[b, c])?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{remove_forced, HexFrame};
    use crate::regions::build_hexagon;

    fn n(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_tilings(&Region::new()).unwrap(), n(1));
        assert_eq!(count_tilings_oracle(&Region::new()).unwrap(), n(1));
        let loz = Region::from_iter([UnitTriangle::up(0, 0), UnitTriangle::down(0, 0)]);
        assert_eq!(count_tilings(&loz).unwrap(), n(1));
        assert_eq!(count_tilings_oracle(&loz).unwrap(), n(1));
        let single = Region::from_iter([UnitTriangle::up(0, 0)]);
        assert_eq!(count_tilings(&single).unwrap(), n(0));
        assert!(!has_tiling(&single));
        for (xyz, want) in [((1, 1, 1), 2), ((2, 2, 1), 6), ((2, 2, 2), 20), ((3, 3, 3), 980)] {
            let r = build_hexagon(xyz.0, xyz.1, xyz.2).unwrap();
            assert_eq!(count_tilings(&r).unwrap(), n(want), "{xyz:?}");
            assert_eq!(count_tilings_oracle(&r).unwrap(), n(want), "{xyz:?}");
            assert!(has_tiling(&r));
        }
        assert_eq!(count_tilings(&build_hexagon(0, 3, 4).unwrap()).unwrap(), n(1));
    }

    #[test]
    fn disconnected_regions_multiply() {
        let a = build_hexagon(2, 2, 1).unwrap();
        let b = build_hexagon(1, 1, 1).unwrap().translate(20, 3);
        let mut both = a.clone();
        both.extend(b.iter());
        assert_eq!(count_tilings(&both).unwrap(), n(12));
        assert_eq!(count_tilings_oracle(&both).unwrap(), n(12));
    }

    #[test]
    fn large_counts_switch_to_big_integers() {
        let r = build_hexagon(8, 8, 8).unwrap();
        assert_eq!(count_tilings(&r).unwrap(), crate::formulas::macmahon_p(8, 8, 8).unwrap());
    }

    #[test]
    fn resource_limits() {
        let r = build_hexagon(3, 3, 3).unwrap();
        let cfg = CountConfig { max_frontier: 3, max_oracle_cells: 10 };
        assert!(matches!(count_tilings_with(&r, &cfg), Err(Error::ResourceLimit(_))));
        assert!(matches!(count_tilings_oracle_with(&r, &cfg), Err(Error::ResourceLimit(_))));
    }

    #[test]
    fn symmetry_and_forced_reduction() {
        let frame = HexFrame::with_sides([3, 2, 2, 3, 2, 2]).unwrap();
        let mut r = frame.cells();
        r.remove(&UnitTriangle::up(2, 1));
        r.remove(&UnitTriangle::down(3, 2));
        let m = count_tilings(&r).unwrap();
        assert_eq!(count_tilings(&r.translate(7, -4)).unwrap(), m);
        assert_eq!(count_tilings(&r.rotate_180()).unwrap(), m);
        let red = remove_forced(&r);
        assert!(!red.untileable);
        assert_eq!(count_tilings(&red.core).unwrap(), m);
    }

    #[test]
    fn outer_face_of_unit_hexagon() {
        let h = build_hexagon(1, 1, 1).unwrap();
        let walk = outer_face(&h).unwrap();
        assert_eq!(walk.len(), 6);
        let mut sorted = walk.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 6);
    }

    #[test]
    fn kuo_on_small_hexagon() {
        let h = build_hexagon(2, 2, 2).unwrap();
        let walk = outer_face(&h).unwrap();
        // Pick alternating classes around the boundary.
        let ups: Vec<_> = walk.iter().copied().filter(|c| c.is_up()).collect();
        let downs: Vec<_> = walk.iter().copied().filter(|c| !c.is_up()).collect();
        let pos = |c: &UnitTriangle| walk.iter().position(|w| w == c).unwrap();
        let (a, g) = (ups[0], ups[ups.len() / 2]);
        let b = *downs.iter().find(|d| pos(d) > pos(&a) && pos(d) < pos(&g)).unwrap();
        let d = *downs.iter().find(|d| pos(d) > pos(&g)).unwrap();
        let k = kuo_check(&h, [a, b, g, d]).unwrap();
        assert!(k.holds());
        assert_eq!(k.full, n(20));
        // Same-class violation.
        assert!(matches!(kuo_check(&h, [a, g, b, d]), Err(Error::Precondition(_))));
    }
}

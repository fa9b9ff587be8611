//! Verification sweeps: parameter grids and seeded samples, each case
//! comparing an exact count (or ratio of counts) with a closed form.
//!
//! Sampled cases draw from a ChaCha stream selected by the case index, so a
//! plan produces the same cases, in the same order, for any thread count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::counting::{
    count_tilings_oracle_with, count_tilings_with, has_tiling, kuo_check_with, outer_face, CountConfig,
};
use crate::error::{Error, Result};
use crate::formulas::{
    based_hourglass_core_factor, couples_closed_form, couples_geometric, family_formula, macmahon_p, main_ratio_rhs,
    triad_weight, CoupleSet, Squeezed, Target,
};
use crate::lattice::{LatticePoint, Region, UnitTriangle};
use crate::regions::{
    build_hexagon, standard_frame, Bowtie, Direction, FamilySpec, Move, Triad, TriadHexagon, TriadParams,
};

/// `{"num": "...", "den": "..."}` with decimal strings; `null` when absent.
pub mod rational_json {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Zero;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Repr {
        num: String,
        den: String,
    }

    pub fn serialize<S: Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        q.as_ref().map(|q| Repr { num: q.numer().to_string(), den: q.denom().to_string() }).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        let Some(r) = Option::<Repr>::deserialize(d)? else {
            return Ok(None);
        };
        let num: BigInt = r.num.parse().map_err(D::Error::custom)?;
        let den: BigInt = r.den.parse().map_err(D::Error::custom)?;
        if den.is_zero() {
            return Err(D::Error::custom("zero denominator"));
        }
        Ok(Some(BigRational::new(num, den)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub case_id: String,
    pub inputs: Value,
    #[serde(with = "rational_json", default)]
    pub expected: Option<BigRational>,
    #[serde(with = "rational_json", default)]
    pub observed: Option<BigRational>,
    pub verdict: Verdict,
    /// Always present for skipped cases; starts with a tag such as `domain:`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub runtime_ms: u64,
}

impl VerificationReport {
    pub fn compare(case_id: impl Into<String>, inputs: Value, expected: BigRational, observed: BigRational) -> Self {
        let verdict = if expected == observed { Verdict::Pass } else { Verdict::Fail };
        VerificationReport {
            case_id: case_id.into(),
            inputs,
            expected: Some(expected),
            observed: Some(observed),
            verdict,
            reason: None,
            runtime_ms: 0,
        }
    }

    pub fn skipped(case_id: impl Into<String>, inputs: Value, reason: impl Into<String>) -> Self {
        VerificationReport {
            case_id: case_id.into(),
            inputs,
            expected: None,
            observed: None,
            verdict: Verdict::Skipped,
            reason: Some(reason.into()),
            runtime_ms: 0,
        }
    }

    /// Errors that only mean "this case is out of scope" become skips;
    /// anything else is a failure.
    pub fn from_error(case_id: impl Into<String>, inputs: Value, e: &Error) -> Self {
        let reason = format!("{}: {e}", e.tag());
        match e {
            Error::Equivalence(_) | Error::Io(_) | Error::Json(_) => {
                VerificationReport { verdict: Verdict::Fail, ..Self::skipped(case_id, inputs, reason) }
            }
            _ => Self::skipped(case_id, inputs, reason),
        }
    }

    fn with_reason(mut self, reason: Option<String>) -> Self {
        self.reason = reason;
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// The report with its timing zeroed, for byte-level comparisons.
    pub fn without_timing(&self) -> Self {
        VerificationReport { runtime_ms: 0, ..self.clone() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ResourceCaps {
    pub max_cells: usize,
    pub max_side: i64,
    pub max_frontier: usize,
}

impl Default for ResourceCaps {
    fn default() -> Self {
        ResourceCaps { max_cells: 500, max_side: 12, max_frontier: 28 }
    }
}

impl ResourceCaps {
    fn config(&self) -> CountConfig {
        CountConfig { max_frontier: self.max_frontier, ..CountConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_cells == 0 || self.max_side <= 0 || self.max_frontier == 0 {
            return Err(Error::Constraint(format!("resource caps must be positive: {self:?}")));
        }
        Ok(())
    }

    pub fn count(&self, r: &Region) -> Result<BigUint> {
        if r.len() > self.max_cells {
            return Err(Error::ResourceLimit(format!("{} cells exceed the cap of {}", r.len(), self.max_cells)));
        }
        count_tilings_with(r, &self.config())
    }

    pub fn count_triad(&self, th: &TriadHexagon) -> Result<BigUint> {
        let longest = th.frame().side_lengths().into_iter().max().unwrap_or(0);
        if longest > self.max_side {
            return Err(Error::ResourceLimit(format!("hexagon side {longest} exceeds the cap of {}", self.max_side)));
        }
        self.count(&th.region())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// Plain hexagons against the box formula.
    Macmahon,
    /// Frontier DP against the branching oracle on small random regions.
    Oracle,
    /// Depth criterion against matching existence, plus squeeze invariants.
    Tileability,
    /// Count ratios of squeeze-equivalent triad hexagons.
    SqueezeRatio,
    /// A named family against its count or ratio formula.
    Family,
    /// Geometric couples against the closed forms.
    Couples,
    /// The condensation identity on random outer-face quadruples.
    Kuo,
    /// The six-region condensation recurrence and its couple identities.
    Recurrence,
}

/// An explicit triad hexagon with a squeeze sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SqueezeCase {
    pub region: TriadParams,
    pub moves: Vec<Move>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub name: String,
    pub check: CheckKind,
    /// Family name for `family` and `couples` checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    /// Inclusive `[min, max]` per parameter; unlisted parameters are 0 for
    /// family grids and take the check's default otherwise.
    #[serde(default)]
    pub ranges: BTreeMap<String, [i64; 2]>,
    /// Extra family cases, evaluated after the grid.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub specs: Vec<FamilySpec>,
    /// Extra main-theorem cases, evaluated before the samples.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub squeezes: Vec<SqueezeCase>,
    #[serde(default)]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub caps: ResourceCaps,
    /// Worker threads; `None` uses every core.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

impl SweepPlan {
    pub fn new(name: impl Into<String>, check: CheckKind) -> Self {
        SweepPlan {
            name: name.into(),
            check,
            family: None,
            ranges: BTreeMap::new(),
            specs: Vec::new(),
            squeezes: Vec::new(),
            samples: 0,
            seed: 0,
            caps: ResourceCaps::default(),
            jobs: None,
        }
    }

    pub fn family(mut self, name: &str) -> Self {
        self.family = Some(name.to_string());
        self
    }

    pub fn range(mut self, key: &str, lo: i64, hi: i64) -> Self {
        self.ranges.insert(key.to_string(), [lo, hi]);
        self
    }

    pub fn ranges(mut self, keys: &[&str], lo: i64, hi: i64) -> Self {
        for k in keys {
            self.ranges.insert(k.to_string(), [lo, hi]);
        }
        self
    }

    pub fn samples(mut self, n: usize) -> Self {
        self.samples = n;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn caps(mut self, caps: ResourceCaps) -> Self {
        self.caps = caps;
        self
    }

    pub fn spec(mut self, spec: FamilySpec) -> Self {
        self.specs.push(spec);
        self
    }

    pub fn squeeze(mut self, case: SqueezeCase) -> Self {
        self.squeezes.push(case);
        self
    }

    fn get(&self, key: &str, default: [i64; 2]) -> [i64; 2] {
        self.ranges.get(key).copied().unwrap_or(default)
    }

    fn family_name(&self) -> Result<&str> {
        self.family.as_deref().ok_or_else(|| Error::Constraint(format!("plan {:?} needs a family", self.name)))
    }

    pub fn validate(&self) -> Result<()> {
        self.caps.validate()?;
        for (k, [lo, hi]) in &self.ranges {
            if lo > hi {
                return Err(Error::Constraint(format!("range for {k} is empty: [{lo}, {hi}]")));
            }
        }
        let known: &[&str] = match self.check {
            CheckKind::Macmahon => &["x", "y", "z"],
            CheckKind::Oracle
            | CheckKind::Tileability
            | CheckKind::SqueezeRatio
            | CheckKind::Kuo
            | CheckKind::Recurrence => &TRIAD_KEYS,
            CheckKind::Family | CheckKind::Couples => {
                let name = self.family_name()?;
                let params = family_params(name)
                    .ok_or_else(|| Error::Constraint(format!("no parameter grid for family {name:?}")))?;
                if self.check == CheckKind::Couples && !matches!(name, "based_hourglass" | "sphinx") {
                    return Err(Error::Constraint(format!("no closed-form couples for family {name:?}")));
                }
                params
            }
        };
        if let Some(k) = self.ranges.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(Error::Constraint(format!("unknown parameter {k:?} for a {:?} plan", self.check)));
        }
        Ok(())
    }
}

const LOBES: [&str; 6] = ["a", "b", "c", "a_prime", "b_prime", "c_prime"];
const TRIAD_KEYS: [&str; 10] = ["x", "y", "z", "a", "b", "c", "a_prime", "b_prime", "c_prime", "f_excess"];

fn family_params(name: &str) -> Option<&'static [&'static str]> {
    Some(match name {
        "hexagon" => &["x", "y", "z"],
        "magnet_bar" => &["x", "y", "a", "b", "c", "m"],
        "snowman" => &["x", "y", "a", "b", "c", "k"],
        "hourglass" => &["x", "y", "z", "a", "a_prime"],
        "based_hourglass" => &["d", "e", "f", "y", "z", "a", "a_prime", "b_prime", "c_prime"],
        "sphinx" => &["d", "x", "y", "z", "a", "b", "c", "a_prime", "b_prime", "c_prime"],
        "three_dent" => &["x", "y", "z", "a", "b", "c", "a_prime", "b_prime", "c_prime"],
        _ => return None,
    })
}

/// Cartesian product of inclusive ranges, last key varying fastest.
fn grid(ranges: &[[i64; 2]]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &[lo, hi] in ranges {
        out = out.into_iter().flat_map(|p| (lo..=hi).map(move |v| [p.clone(), vec![v]].concat())).collect();
    }
    out
}

fn params_id(keys: &[&str], vals: &[i64]) -> String {
    keys.iter().zip(vals).map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

fn spec_from(family: &str, keys: &[&str], vals: &[i64]) -> Result<FamilySpec> {
    let mut obj = serde_json::Map::new();
    obj.insert("family".into(), json!(family));
    for (k, v) in keys.iter().zip(vals) {
        obj.insert(k.to_string(), json!(v));
    }
    Ok(serde_json::from_value(Value::Object(obj))?)
}

fn q(n: BigUint) -> BigRational {
    BigRational::from_integer(n.into())
}

fn q_usize(n: usize) -> BigRational {
    q(BigUint::from(n))
}

/// One generated case. Sampled kinds carry only their index; the sample is
/// drawn while evaluating.
#[derive(Clone, Debug)]
enum Case {
    Hexagon([i64; 3]),
    Sample(u64),
    Tuple(TriadTuple),
    Squeeze(usize, SqueezeCase),
    Family(String, FamilySpec),
    CoupleGroup(Vec<i64>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
struct TriadTuple {
    x: i64,
    y: i64,
    z: i64,
    #[serde(flatten)]
    triad: Triad,
    f: i64,
}

impl TriadTuple {
    fn from_vals(v: &[i64]) -> Self {
        let triad = Triad::new(v[3], v[4], v[5], v[6], v[7], v[8]);
        TriadTuple { x: v[0], y: v[1], z: v[2], triad, f: triad.inner_sum() + v[9] }
    }

    fn id(&self) -> String {
        let t = self.triad.as_array();
        format!(
            "x={},y={},z={},a={},b={},c={},a'={},b'={},c'={},f={}",
            self.x, self.y, self.z, t[0], t[1], t[2], t[3], t[4], t[5], self.f
        )
    }

    /// Every apex position giving a valid triad hexagon, in `(u, v)` order.
    fn placements(&self) -> Vec<TriadHexagon> {
        let Ok(frame) = standard_frame(self.x, self.y, self.z, &self.triad) else {
            return Vec::new();
        };
        let corners = frame.corners();
        let (u0, u1) = (corners.iter().map(|p| p.u).min().unwrap(), corners.iter().map(|p| p.u).max().unwrap());
        let (v0, v1) = (corners.iter().map(|p| p.v).min().unwrap(), corners.iter().map(|p| p.v).max().unwrap());
        let mut out = Vec::new();
        for u in u0..=u1 {
            for v in v0..=v1 {
                if let Ok(th) =
                    TriadHexagon::from_parts(frame, self.x, self.y, self.z, self.triad, LatticePoint::new(u, v), self.f)
                {
                    out.push(th);
                }
            }
        }
        out
    }
}

fn triad_ranges(plan: &SweepPlan, defaults: [[i64; 2]; 10]) -> Vec<[i64; 2]> {
    TRIAD_KEYS.iter().zip(defaults).map(|(k, d)| plan.get(k, d)).collect()
}

fn random_tuple(rng: &mut ChaCha8Rng, ranges: &[[i64; 2]]) -> TriadTuple {
    let vals: Vec<i64> = ranges.iter().map(|&[lo, hi]| rng.gen_range(lo..=hi)).collect();
    TriadTuple::from_vals(&vals)
}

/// A random triad hexagon from the ranges satisfying `keep`, or `None`
/// after enough failed draws.
fn random_triad(
    rng: &mut ChaCha8Rng,
    ranges: &[[i64; 2]],
    keep: impl Fn(&TriadHexagon) -> bool,
) -> Option<TriadHexagon> {
    for _ in 0..1000 {
        let t = random_tuple(rng, ranges);
        let ok: Vec<TriadHexagon> = t.placements().into_iter().filter(|th| keep(th)).collect();
        if let Some(th) = ok.choose(rng) {
            return Some(th.clone());
        }
    }
    None
}

fn triad_params(th: &TriadHexagon) -> TriadParams {
    let (x, y, z) = th.xyz();
    TriadParams { x, y, z, triad: *th.triad(), apex: th.apex(), f: th.f() }
}

const SMALL: [i64; 2] = [0, 2];
const TRIAD_DEFAULT: [[i64; 2]; 10] = [SMALL; 10];

impl SweepPlan {
    fn cases(&self) -> Result<Vec<Case>> {
        self.validate()?;
        Ok(match self.check {
            CheckKind::Macmahon => {
                let r: Vec<[i64; 2]> = ["x", "y", "z"].iter().map(|k| self.get(k, [0, 4])).collect();
                grid(&r).into_iter().map(|v| Case::Hexagon([v[0], v[1], v[2]])).collect()
            }
            CheckKind::Tileability => grid(&triad_ranges(self, TRIAD_DEFAULT))
                .into_iter()
                .map(|v| Case::Tuple(TriadTuple::from_vals(&v)))
                .collect(),
            CheckKind::SqueezeRatio => {
                let explicit = self.squeezes.iter().cloned().enumerate().map(|(i, c)| Case::Squeeze(i, c));
                explicit.chain((0..self.samples as u64).map(Case::Sample)).collect()
            }
            CheckKind::Oracle | CheckKind::Kuo | CheckKind::Recurrence => {
                (0..self.samples as u64).map(Case::Sample).collect()
            }
            CheckKind::Family => {
                let name = self.family_name()?;
                let keys = family_params(name).expect("validated");
                let r: Vec<[i64; 2]> = keys.iter().map(|k| self.get(k, [0, 0])).collect();
                let mut out = Vec::new();
                for v in grid(&r) {
                    out.push(Case::Family(params_id(keys, &v), spec_from(name, keys, &v)?));
                }
                for (i, s) in self.specs.iter().enumerate() {
                    out.push(Case::Family(format!("spec{i}"), *s));
                }
                out
            }
            CheckKind::Couples => {
                let keys = self.couple_group_keys()?;
                let r: Vec<[i64; 2]> = keys.iter().map(|k| self.get(k, [0, 0])).collect();
                grid(&r).into_iter().map(Case::CoupleGroup).collect()
            }
        })
    }

    fn couple_group_keys(&self) -> Result<Vec<&'static str>> {
        let keys = family_params(self.family_name()?).expect("validated");
        Ok(keys.iter().copied().filter(|k| !LOBES.contains(k)).collect())
    }

    fn rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    fn evaluate(&self, case: &Case) -> Vec<VerificationReport> {
        let start = Instant::now();
        let mut reports = match case {
            Case::Hexagon(xyz) => vec![self.eval_hexagon(*xyz)],
            Case::Tuple(t) => vec![self.eval_tuple(t)],
            Case::Squeeze(i, c) => vec![self.eval_squeeze(&format!("{}/case{i}", self.name), c)],
            Case::Family(id, spec) => self.eval_family(&format!("{}/{id}", self.name), spec),
            Case::CoupleGroup(vals) => vec![self.eval_couple_group(vals)],
            Case::Sample(i) => match self.check {
                CheckKind::Oracle => vec![self.eval_oracle(*i)],
                CheckKind::SqueezeRatio => vec![self.eval_main_sample(*i)],
                CheckKind::Kuo => vec![self.eval_kuo(*i)],
                CheckKind::Recurrence => self.eval_recurrence(*i),
                _ => unreachable!("only sampled checks produce samples"),
            },
        };
        let ms = start.elapsed().as_millis() as u64;
        for r in &mut reports {
            r.runtime_ms = ms;
        }
        reports
    }

    fn eval_hexagon(&self, [x, y, z]: [i64; 3]) -> VerificationReport {
        let id = format!("{}/x={x},y={y},z={z}", self.name);
        let inputs = json!({"x": x, "y": y, "z": z});
        let run = || -> Result<(BigUint, BigUint)> {
            let expected = macmahon_p(x, y, z)?;
            Ok((expected, self.caps.count(&build_hexagon(x, y, z)?)?))
        };
        match run() {
            Ok((e, o)) => VerificationReport::compare(id, inputs, q(e), q(o)),
            Err(e) => VerificationReport::from_error(id, inputs, &e),
        }
    }

    fn eval_oracle(&self, i: u64) -> VerificationReport {
        let id = format!("{}/sample{i}", self.name);
        let mut rng = self.rng(i);
        let (mode, r) = random_small_region(&mut rng, i, &triad_ranges(self, TRIAD_DEFAULT), 60);
        let inputs = json!({"sample": i, "mode": mode, "region": r});
        let cfg = self.caps.config();
        let run = || -> Result<(BigUint, BigUint)> {
            Ok((count_tilings_oracle_with(&r, &cfg)?, count_tilings_with(&r, &cfg)?))
        };
        match run() {
            Ok((e, o)) => VerificationReport::compare(id, inputs, q(e), q(o)),
            Err(e) => VerificationReport::from_error(id, inputs, &e),
        }
    }

    fn eval_tuple(&self, t: &TriadTuple) -> VerificationReport {
        let id = format!("{}/{}", self.name, t.id());
        let inputs = serde_json::to_value(t).expect("plain struct");
        let placements = t.placements();
        if placements.is_empty() {
            return VerificationReport::skipped(id, inputs, "placement: no apex position fits the triad");
        }
        let mut agree = 0;
        let mut first_bad = None;
        for th in &placements {
            match tileability_mismatch(th) {
                None => agree += 1,
                Some(why) => {
                    first_bad.get_or_insert_with(|| format!("apex ({},{}): {why}", th.apex().u, th.apex().v));
                }
            }
        }
        VerificationReport::compare(id, inputs, q_usize(placements.len()), q_usize(agree)).with_reason(first_bad)
    }

    fn eval_squeeze(&self, id: &str, case: &SqueezeCase) -> VerificationReport {
        let inputs = serde_json::to_value(case).expect("plain struct");
        let run = || -> Result<VerificationReport> {
            let r = case.region.as_triad()?;
            let mut qh = r.clone();
            for m in &case.moves {
                qh = qh.apply(m)?;
            }
            let expected = main_ratio_rhs(&r, &qh)?;
            let m_r = self.caps.count_triad(&r)?;
            let m_q = self.caps.count_triad(&qh)?;
            if m_q.is_zero() {
                return Ok(VerificationReport::skipped(
                    id,
                    inputs.clone(),
                    "untileable: the squeezed region has no tiling",
                ));
            }
            Ok(VerificationReport::compare(id, inputs.clone(), expected, BigRational::new(m_r.into(), m_q.into())))
        };
        run().unwrap_or_else(|e| VerificationReport::from_error(id, inputs.clone(), &e))
    }

    fn eval_main_sample(&self, i: u64) -> VerificationReport {
        let id = format!("{}/sample{i}", self.name);
        let mut rng = self.rng(i);
        let ranges = triad_ranges(self, TRIAD_DEFAULT);
        let Some(r) = random_triad(&mut rng, &ranges, |th| th.is_tileable_by_depths()) else {
            return VerificationReport::skipped(
                id,
                json!({"sample": i}),
                "placement: no tileable triad hexagon in range",
            );
        };
        let mut th = r.clone();
        let mut moves = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let legal: Vec<(Move, TriadHexagon)> = Bowtie::ALL
                .into_iter()
                .flat_map(|w| {
                    let (down, up) = th.triad().lobes(w);
                    let outs = (1..=up).map(move |d| Move { bowtie: w, direction: Direction::Out, d });
                    outs.chain((1..=down).map(move |d| Move { bowtie: w, direction: Direction::In, d }))
                })
                .filter_map(|m| th.apply(&m).ok().map(|q| (m, q)))
                .collect();
            let Some((m, next)) = legal.choose(&mut rng).cloned() else {
                break;
            };
            th = next;
            moves.push(m);
        }
        self.eval_squeeze(&id, &SqueezeCase { region: triad_params(&r), moves })
    }

    fn eval_family(&self, id: &str, spec: &FamilySpec) -> Vec<VerificationReport> {
        let inputs = serde_json::to_value(spec).expect("plain enum");
        let th = match spec.as_triad() {
            Ok(th) => th,
            Err(e) => return vec![VerificationReport::from_error(id, inputs, &e)],
        };
        let values = match family_formula(spec) {
            Ok(v) => v,
            Err(e) => return vec![VerificationReport::from_error(id, inputs, &e)],
        };
        let m_r = self.caps.count_triad(&th);
        let ratio_to = |other: Result<BigUint>| -> Result<BigRational> {
            let den = other?;
            let num = m_r.as_ref().map_err(|e| Error::ResourceLimit(e.to_string()))?;
            if den.is_zero() {
                return Err(Error::Precondition("the comparison region has no tiling".into()));
            }
            Ok(BigRational::new(num.clone().into(), den.into()))
        };
        let mut out = Vec::new();
        for v in &values {
            let (suffix, observed) = match v.target {
                Target::Count => {
                    ("count", m_r.as_ref().map(|m| q(m.clone())).map_err(|e| Error::ResourceLimit(e.to_string())))
                }
                Target::OverFullySqueezed => {
                    ("over_fully_squeezed", ratio_to(self.caps.count_triad(&th.fully_squeeze_out())))
                }
                Target::OverCompanionCored => {
                    let FamilySpec::BasedHourglass(s) = spec else { unreachable!("only based hourglasses") };
                    ("over_companion_cored", ratio_to(s.companion_cored_hexagon().and_then(|r| self.caps.count(&r))))
                }
            };
            let case_id = format!("{id}/{suffix}");
            out.push(match observed {
                Ok(o) => VerificationReport::compare(case_id, inputs.clone(), v.value.clone(), o),
                Err(e) => VerificationReport::from_error(case_id, inputs.clone(), &e),
            });
        }
        // The two based-hourglass forms differ exactly by the tiled hexagon
        // below the focal line of the fully squeezed region.
        if let FamilySpec::BasedHourglass(s) = spec {
            let find = |t| values.iter().find(|v| v.target == t).map(|v| v.value.clone());
            if let (Some(cored), Some(bar)) = (find(Target::OverCompanionCored), find(Target::OverFullySqueezed)) {
                let case_id = format!("{id}/core_factor");
                out.push(match based_hourglass_core_factor(s) {
                    Ok(p) => VerificationReport::compare(case_id, inputs.clone(), cored / bar, q(p)),
                    Err(e) => VerificationReport::from_error(case_id, inputs.clone(), &e),
                });
            }
        }
        out
    }

    fn eval_couple_group(&self, vals: &[i64]) -> VerificationReport {
        let name = self.family.as_deref().expect("validated");
        let group_keys = self.couple_group_keys().expect("validated");
        let id = format!("{}/{}", self.name, params_id(&group_keys, vals));
        let inputs = Value::Object(group_keys.iter().zip(vals).map(|(k, v)| (k.to_string(), json!(v))).collect());
        let all_keys = family_params(name).expect("validated");
        let lobe_keys: Vec<&str> = all_keys.iter().copied().filter(|k| LOBES.contains(k)).collect();
        let lobe_ranges: Vec<[i64; 2]> = lobe_keys.iter().map(|k| self.get(k, [0, 0])).collect();
        let (mut valid, mut agree) = (0usize, 0usize);
        let mut first_bad = None;
        for lobes in grid(&lobe_ranges) {
            let keys: Vec<&str> = group_keys.iter().chain(&lobe_keys).copied().collect();
            let all: Vec<i64> = vals.iter().chain(&lobes).copied().collect();
            let spec = match spec_from(name, &keys, &all) {
                Ok(s) => s,
                Err(e) => return VerificationReport::from_error(id, inputs, &e),
            };
            match couples_agree(&spec) {
                Err(Error::Constraint(_)) => continue,
                Ok(true) => {
                    valid += 1;
                    agree += 1;
                }
                other => {
                    valid += 1;
                    first_bad.get_or_insert_with(|| format!("{}: {other:?}", params_id(&keys, &all)));
                }
            }
        }
        if valid == 0 {
            return VerificationReport::skipped(id, inputs, "constraint: no parameter choice in the group is valid");
        }
        VerificationReport::compare(id, inputs, q_usize(valid), q_usize(agree)).with_reason(first_bad)
    }

    fn eval_kuo(&self, i: u64) -> VerificationReport {
        let id = format!("{}/sample{i}", self.name);
        let mut rng = self.rng(i);
        let ranges = triad_ranges(self, TRIAD_DEFAULT);
        let cfg = self.caps.config();
        for _ in 0..200 {
            let Some(th) = random_triad(&mut rng, &ranges, |_| true) else { break };
            let r = th.region();
            if r.len() > self.caps.max_cells {
                continue;
            }
            let Some(cells) = random_quadruple(&mut rng, &r) else { continue };
            let inputs = json!({"sample": i, "region": triad_params(&th), "cells": cells});
            return match kuo_check_with(&r, cells, &cfg) {
                Ok(k) => VerificationReport::compare(id, inputs, q(k.lhs()), q(k.rhs())),
                Err(e) => VerificationReport::from_error(id, inputs, &e),
            };
        }
        VerificationReport::skipped(id, json!({"sample": i}), "precondition: no valid quadruple found")
    }

    fn eval_recurrence(&self, i: u64) -> Vec<VerificationReport> {
        let id = format!("{}/sample{i}", self.name);
        let mut rng = self.rng(i);
        let defaults = [[1, 2], [1, 2], [1, 2], [0, 1], [0, 1], [0, 1], [0, 1], [0, 1], [0, 1], [0, 1]];
        let ranges = triad_ranges(self, defaults);
        let max_cells = self.caps.max_cells;
        let keep = |th: &TriadHexagon| th.condensation_preconditions().is_ok() && th.region().len() <= max_cells;
        let Some(base) = random_triad(&mut rng, &ranges, keep) else {
            return vec![VerificationReport::skipped(
                id,
                json!({"sample": i}),
                "precondition: no base region in range",
            )];
        };
        let inputs = json!({"sample": i, "region": triad_params(&base)});
        match self.recurrence_reports(&id, &inputs, &base) {
            Ok(r) => r,
            Err(e) => vec![VerificationReport::from_error(id, inputs, &e)],
        }
    }

    fn recurrence_reports(&self, id: &str, inputs: &Value, base: &TriadHexagon) -> Result<Vec<VerificationReport>> {
        let mut six = vec![base.clone()];
        six.extend(base.condensation_companions()?);
        let bars: Vec<TriadHexagon> = six.iter().map(|th| th.fully_squeeze_out()).collect();
        let recurrence = |regions: &[TriadHexagon]| -> Result<(BigRational, BigRational)> {
            let m: Vec<BigUint> = regions.iter().map(|th| self.caps.count_triad(th)).collect::<Result<_>>()?;
            Ok((q(&m[0] * &m[1]), q(&m[2] * &m[3] + &m[4] * &m[5])))
        };
        let mut out = Vec::new();
        for (suffix, regions) in [("recurrence", &six), ("recurrence_squeezed", &bars)] {
            let case_id = format!("{id}/{suffix}");
            out.push(match recurrence(regions) {
                Ok((l, r)) => VerificationReport::compare(case_id, inputs.clone(), l, r),
                Err(e) => VerificationReport::from_error(case_id, inputs.clone(), &e),
            });
        }
        let mut failed = Vec::new();
        let mut total = 0;
        for (label, regions) in [("R", &six), ("squeezed", &bars)] {
            let sets: Vec<CoupleSet> = regions.iter().map(couples_geometric).collect();
            for (k, name) in ["A", "B", "C", "BC", "AC", "AB"].iter().enumerate() {
                let v: Vec<BigUint> = sets.iter().map(|s| s.as_array()[k].value()).collect();
                let (p1, p2, p3) = (&v[0] * &v[1], &v[2] * &v[3], &v[4] * &v[5]);
                total += 1;
                if p1 != p2 || p2 != p3 {
                    failed.push(format!("{label}:{name}"));
                }
            }
        }
        let reason = (!failed.is_empty()).then(|| format!("couple products differ for {}", failed.join(", ")));
        out.push(
            VerificationReport::compare(
                format!("{id}/couples"),
                inputs.clone(),
                q_usize(total),
                q_usize(total - failed.len()),
            )
            .with_reason(reason),
        );
        // The six regions share one triad, and so do their six squeezed forms.
        for (suffix, regions) in [("weights", &six), ("weights_squeezed", &bars)] {
            let w: Vec<BigRational> =
                regions.iter().map(|th| triad_weight(th.f(), th.triad())).collect::<Result<_>>()?;
            let odd = w.iter().find(|v| **v != w[0]).unwrap_or(&w[0]).clone();
            out.push(VerificationReport::compare(format!("{id}/{suffix}"), inputs.clone(), w[0].clone(), odd));
        }
        Ok(out)
    }
}

/// Why a placement breaks the tileability criterion or a squeeze invariant.
fn tileability_mismatch(th: &TriadHexagon) -> Option<String> {
    let by_depths = th.is_tileable_by_depths();
    if by_depths != has_tiling(&th.region()) {
        return Some(format!("depths {:?} but matching exists = {}", th.depths(), !by_depths));
    }
    let inv = th.invariants();
    for w in Bowtie::ALL {
        let (down, up) = th.triad().lobes(w);
        let moves = (1..=up)
            .map(|d| Move { bowtie: w, direction: Direction::Out, d })
            .chain((1..=down).map(|d| Move { bowtie: w, direction: Direction::In, d }));
        for m in moves {
            match th.apply(&m) {
                Ok(q) if q.invariants() == inv => {}
                Ok(q) => return Some(format!("{m} changes invariants to {:?}", q.invariants())),
                // Squeezing in may drive another lobe through a side moving
                // inwards; such a move is simply not available.
                Err(Error::Placement(_)) if m.direction == Direction::In => {}
                Err(e) => return Some(format!("{m} failed: {e}")),
            }
        }
    }
    None
}

fn couples_agree(spec: &FamilySpec) -> Result<bool> {
    let th = spec.as_triad()?;
    let orig = couples_closed_form(spec, Squeezed::Original)?;
    let bar = couples_closed_form(spec, Squeezed::FullySqueezed)?;
    Ok(couples_geometric(&th).same_values(&orig) && couples_geometric(&th.fully_squeeze_out()).same_values(&bar))
}

/// Small regions of three kinds: hexagons with lozenges removed, triad
/// hexagons, and hexagons with scattered cells removed.
fn random_small_region(rng: &mut ChaCha8Rng, i: u64, ranges: &[[i64; 2]], max_cells: usize) -> (&'static str, Region) {
    loop {
        let (mode, r) = match i % 3 {
            0 => {
                let mut r = random_hexagon(rng);
                for _ in 0..rng.gen_range(0..=3) {
                    let ups: Vec<UnitTriangle> = r.iter().filter(|c| c.is_up()).collect();
                    let Some(&up) = ups.choose(rng) else { break };
                    let downs: Vec<UnitTriangle> = up.neighbors().into_iter().filter(|n| r.contains(n)).collect();
                    if let Some(&down) = downs.choose(rng) {
                        r = r.without(&[up, down]);
                    }
                }
                ("lozenges_removed", r)
            }
            1 => match random_triad(rng, ranges, |th| th.region().len() <= max_cells) {
                Some(th) => ("triad_hexagon", th.region()),
                None => continue,
            },
            _ => {
                let r = random_hexagon(rng);
                let k = rng.gen_range(1..=3);
                let ups: Vec<UnitTriangle> = r.iter().filter(|c| c.is_up()).collect();
                let downs: Vec<UnitTriangle> = r.iter().filter(|c| !c.is_up()).collect();
                let mut gone: Vec<UnitTriangle> = ups.choose_multiple(rng, k).copied().collect();
                gone.extend(downs.choose_multiple(rng, k).copied());
                ("cells_removed", r.without(&gone))
            }
        };
        if r.len() <= max_cells {
            return (mode, r);
        }
    }
}

fn random_hexagon(rng: &mut ChaCha8Rng) -> Region {
    loop {
        let (x, y, z) = (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4));
        if 2 * (x * y + y * z + z * x) <= 60 {
            return build_hexagon(x, y, z).expect("positive sides");
        }
    }
}

/// Four distinct cells in cyclic order on a simple outer boundary, with
/// alternating orientations.
fn random_quadruple(rng: &mut ChaCha8Rng, r: &Region) -> Option<[UnitTriangle; 4]> {
    let walk = outer_face(r).ok()?;
    let mut seen = std::collections::BTreeSet::new();
    if walk.len() < 4 || !walk.iter().all(|c| seen.insert(*c)) {
        return None;
    }
    for _ in 0..50 {
        let mut idx = rand::seq::index::sample(rng, walk.len(), 4).into_vec();
        idx.sort_unstable();
        let cells = [walk[idx[0]], walk[idx[1]], walk[idx[2]], walk[idx[3]]];
        let o: Vec<bool> = cells.iter().map(|c| c.is_up()).collect();
        if o[0] != o[1] && o[0] == o[2] && o[1] == o[3] {
            return Some(cells);
        }
    }
    None
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub plan: String,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl SweepSummary {
    pub fn of(plan: &str, reports: &[VerificationReport]) -> Self {
        let n = |v| reports.iter().filter(|r| r.verdict == v).count();
        SweepSummary {
            plan: plan.to_string(),
            total: reports.len(),
            passed: n(Verdict::Pass),
            failed: n(Verdict::Fail),
            skipped: n(Verdict::Skipped),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepRun {
    pub summary: SweepSummary,
    pub reports: Vec<VerificationReport>,
}

impl SweepRun {
    /// Writes `<dir>/<plan>.jsonl` and `<dir>/<plan>.csv`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let jsonl = dir.join(format!("{}.jsonl", self.summary.plan));
        let csv_path = dir.join(format!("{}.csv", self.summary.plan));
        write_jsonl(&self.reports, &jsonl)?;
        write_csv(&self.reports, &csv_path)?;
        Ok((jsonl, csv_path))
    }
}

pub fn write_jsonl(reports: &[VerificationReport], path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in reports {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(reports: &[VerificationReport], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(["case_id", "verdict", "runtime_ms"]).map_err(csv_error)?;
    for r in reports {
        let verdict = match r.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        };
        w.write_record([r.case_id.as_str(), verdict, &r.runtime_ms.to_string()]).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Runs every case of the plan. Per-case problems become Fail or Skipped
/// reports; only a malformed plan is an error.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepRun> {
    let cases = plan.cases()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Constraint(format!("cannot start {} worker threads: {e}", plan.jobs.unwrap_or(0))))?;
    let nested: Vec<Vec<VerificationReport>> = pool.install(|| cases.par_iter().map(|c| plan.evaluate(c)).collect());
    let reports: Vec<VerificationReport> = nested.into_iter().flatten().collect();
    Ok(SweepRun { summary: SweepSummary::of(&plan.name, &reports), reports })
}

pub fn verify_main_theorem(r: &TriadHexagon, moves: &[Move], caps: ResourceCaps) -> VerificationReport {
    let plan = SweepPlan::new("squeeze_ratio", CheckKind::SqueezeRatio).caps(caps);
    plan.eval_squeeze("squeeze_ratio", &SqueezeCase { region: triad_params(r), moves: moves.to_vec() })
}

pub fn verify_tileability(plan: &SweepPlan) -> Result<Vec<VerificationReport>> {
    expect_check(plan, CheckKind::Tileability)?;
    Ok(run_sweep(plan)?.reports)
}

pub fn verify_family_formulas(plan: &SweepPlan) -> Result<Vec<VerificationReport>> {
    expect_check(plan, CheckKind::Family)?;
    Ok(run_sweep(plan)?.reports)
}

pub fn verify_kuo_and_section9(plan: &SweepPlan) -> Result<Vec<VerificationReport>> {
    if !matches!(plan.check, CheckKind::Kuo | CheckKind::Recurrence) {
        return Err(Error::Constraint(format!("expected a kuo or recurrence plan, got {:?}", plan.check)));
    }
    Ok(run_sweep(plan)?.reports)
}

fn expect_check(plan: &SweepPlan, kind: CheckKind) -> Result<()> {
    if plan.check != kind {
        return Err(Error::Constraint(format!("expected a {kind:?} plan, got {:?}", plan.check)));
    }
    Ok(())
}

/// A plan file holds either one plan or an array of them.
pub fn parse_plans(text: &str) -> Result<Vec<SweepPlan>> {
    let v: Value = serde_json::from_str(text)?;
    let plans = if v.is_array() { serde_json::from_value(v)? } else { vec![serde_json::from_value(v)?] };
    Ok(plans)
}

pub const BUNDLED_PLANS: [&str; 9] = [
    "macmahon",
    "oracle-small",
    "lemma21-small",
    "tileability",
    "main-theorem-small",
    "families-small",
    "couples-small",
    "kuo-small",
    "full",
];

fn worked_example() -> SqueezeCase {
    let region =
        TriadParams { x: 4, y: 8, z: 7, triad: Triad::new(1, 1, 3, 2, 1, 1), apex: LatticePoint::new(9, 16), f: 6 };
    let moves = ["top:out:2", "left:out:1", "right:out:1"].map(|m| m.parse().expect("valid move")).to_vec();
    SqueezeCase { region, moves }
}

fn family_plans() -> Vec<SweepPlan> {
    use crate::regions::{BasedHourglass, Hourglass, MagnetBar, Snowman, Sphinx};
    let example_caps = ResourceCaps { max_cells: 1200, max_side: 16, max_frontier: 28 };
    vec![
        SweepPlan::new("magnet_bar", CheckKind::Family)
            .family("magnet_bar")
            .ranges(&["x", "y", "a", "b"], 0, 2)
            .ranges(&["c", "m"], 0, 1),
        SweepPlan::new("magnet_bar_example", CheckKind::Family)
            .family("magnet_bar")
            .caps(example_caps)
            .spec(FamilySpec::MagnetBar(MagnetBar { x: 3, y: 1, a: 4, b: 1, c: 3, m: 2 })),
        SweepPlan::new("snowman", CheckKind::Family)
            .family("snowman")
            .ranges(&["y", "a", "c", "k"], 0, 2)
            .range("x", 0, 1)
            .range("b", 0, 1),
        SweepPlan::new("snowman_example", CheckKind::Family)
            .family("snowman")
            .caps(example_caps)
            .spec(FamilySpec::Snowman(Snowman { x: 4, y: 9, a: 2, b: 1, c: 1, k: 1 })),
        SweepPlan::new("three_dent", CheckKind::Family).family("three_dent").ranges(&["x", "y", "z"], 0, 3).ranges(
            &["a", "a_prime", "b_prime"],
            0,
            1,
        ),
        SweepPlan::new("hourglass", CheckKind::Family)
            .family("hourglass")
            .ranges(&["x", "y", "z"], 0, 3)
            .range("a", 0, 2)
            .range("a_prime", 0, 2),
        SweepPlan::new("hourglass_example", CheckKind::Family)
            .family("hourglass")
            .caps(example_caps)
            .spec(FamilySpec::Hourglass(Hourglass { x: 3, y: 4, z: 5, a: 3, a_prime: 2, node: None })),
        SweepPlan::new("based_hourglass", CheckKind::Family)
            .family("based_hourglass")
            .ranges(&["d", "e", "f", "y", "z"], 0, 1)
            .ranges(&["a", "a_prime", "b_prime", "c_prime"], 0, 1),
        SweepPlan::new("based_hourglass_example", CheckKind::Family).family("based_hourglass").caps(example_caps).spec(
            FamilySpec::BasedHourglass(BasedHourglass {
                d: 2,
                e: 1,
                f: 1,
                y: 3,
                z: 1,
                a: 3,
                a_prime: 2,
                b_prime: 1,
                c_prime: 2,
            }),
        ),
        SweepPlan::new("sphinx", CheckKind::Family).family("sphinx").ranges(&["d", "x", "y", "z"], 0, 1).ranges(
            &["a", "b", "c", "a_prime", "b_prime", "c_prime"],
            0,
            1,
        ),
        SweepPlan::new("sphinx_example", CheckKind::Family).family("sphinx").caps(example_caps).spec(
            FamilySpec::Sphinx(Sphinx { d: 1, x: 2, y: 4, z: 2, a: 2, b: 2, c: 3, a_prime: 1, b_prime: 2, c_prime: 1 }),
        ),
    ]
}

/// The plans shipped with the tool, by name.
pub fn bundled_plans(name: &str) -> Option<Vec<SweepPlan>> {
    let tiles = |name: &str, hi: i64| SweepPlan::new(name, CheckKind::Tileability).ranges(&TRIAD_KEYS, 0, hi);
    Some(match name {
        "macmahon" => vec![SweepPlan::new("macmahon", CheckKind::Macmahon).ranges(&["x", "y", "z"], 0, 4)],
        "oracle-small" => vec![SweepPlan::new("oracle", CheckKind::Oracle).samples(240).seed(7)],
        "lemma21-small" => vec![tiles("tileability_small", 1)],
        "tileability" => vec![tiles("tileability", 2)],
        "main-theorem-small" => vec![
            SweepPlan::new("squeeze_ratio", CheckKind::SqueezeRatio).samples(150).seed(11),
            SweepPlan::new("squeeze_ratio_example", CheckKind::SqueezeRatio)
                .caps(ResourceCaps { max_cells: 1000, max_side: 20, max_frontier: 28 })
                .squeeze(worked_example()),
        ],
        "families-small" => family_plans(),
        "couples-small" => vec![
            SweepPlan::new("couples_based_hourglass", CheckKind::Couples).family("based_hourglass").ranges(
                family_params("based_hourglass").unwrap(),
                0,
                3,
            ),
            SweepPlan::new("couples_sphinx", CheckKind::Couples).family("sphinx").ranges(
                family_params("sphinx").unwrap(),
                0,
                3,
            ),
        ],
        "kuo-small" => vec![
            SweepPlan::new("kuo", CheckKind::Kuo).samples(1000).seed(13),
            SweepPlan::new("recurrence", CheckKind::Recurrence).samples(60).seed(17),
        ],
        "full" => [
            "macmahon",
            "oracle-small",
            "tileability",
            "main-theorem-small",
            "families-small",
            "couples-small",
            "kuo-small",
        ]
        .iter()
        .flat_map(|n| bundled_plans(n).expect("bundled"))
        .collect(),
        _ => return None,
    })
}

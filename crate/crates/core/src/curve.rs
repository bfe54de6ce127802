//! Decorated dual graphs of twisted nodal curves and line-bundle multidegrees.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blowup::AnSing;
use crate::field::{lcm_u64, Rat};

pub type CompId = u32;
pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("dual graph is not connected")]
    Disconnected,
    #[error("curve has no components")]
    Empty,
    #[error("unknown component {0}")]
    UnknownComponent(CompId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub id: CompId,
    pub genus: u32,
}

impl Component {
    pub fn coarse_is_p1(&self) -> bool {
        self.genus == 0
    }
}

fn one() -> u32 {
    1
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: NodeId,
    pub ends: [CompId; 2],
    #[serde(default = "one")]
    pub stab: u32,
    #[serde(default, skip_serializing_if = "is_false")]
    pub persistent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sing: Option<AnSing>,
}

impl Node {
    pub fn new(id: NodeId, a: CompId, b: CompId, stab: u32) -> Node {
        Node {
            id,
            ends: [a, b],
            stab,
            persistent: false,
            sing: None,
        }
    }

    pub fn is_self_node(&self) -> bool {
        self.ends[0] == self.ends[1]
    }

    pub fn touches(&self, c: CompId) -> bool {
        self.ends[0] == c || self.ends[1] == c
    }

    /// The endpoint opposite to `c` (for a self-node, `c` itself).
    pub fn other_end(&self, c: CompId) -> CompId {
        if self.ends[0] == c {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }

    /// Singularity record, defaulting to a point that is smooth on the stack.
    pub fn singularity(&self) -> AnSing {
        self.sing.unwrap_or_else(|| AnSing::from_stack(1, self.stab))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Marking {
    pub id: u32,
    pub comp: CompId,
    #[serde(default = "one")]
    pub gerbe: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TwistedCurve {
    pub components: Vec<Component>,
    #[serde(default)]
    pub nodes: Vec<Node>,
    #[serde(default)]
    pub markings: Vec<Marking>,
}

impl TwistedCurve {
    pub fn component(&self, id: CompId) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn node_mut(&mut self, id: NodeId) -> Option<&mut Node> {
        self.nodes.iter_mut().find(|n| n.id == id)
    }

    pub fn has_component(&self, id: CompId) -> bool {
        self.component(id).is_some()
    }

    pub fn fresh_component_id(&self) -> CompId {
        self.components.iter().map(|c| c.id + 1).max().unwrap_or(0)
    }

    pub fn fresh_node_id(&self) -> NodeId {
        self.nodes.iter().map(|n| n.id + 1).max().unwrap_or(0)
    }

    /// Nodes incident to `c`, each listed once.
    pub fn nodes_at(&self, c: CompId) -> Vec<&Node> {
        self.nodes.iter().filter(|n| n.touches(c)).collect()
    }

    /// Node branches on `c`; a self-node contributes two.
    pub fn branches(&self, c: CompId) -> u32 {
        self.nodes
            .iter()
            .map(|n| (n.ends[0] == c) as u32 + (n.ends[1] == c) as u32)
            .sum()
    }

    pub fn markings_on(&self, c: CompId) -> Vec<&Marking> {
        self.markings.iter().filter(|m| m.comp == c).collect()
    }

    pub fn is_connected(&self) -> bool {
        let Some(first) = self.components.first() else {
            return false;
        };
        let mut adj: BTreeMap<CompId, Vec<CompId>> = BTreeMap::new();
        for n in &self.nodes {
            adj.entry(n.ends[0]).or_default().push(n.ends[1]);
            adj.entry(n.ends[1]).or_default().push(n.ends[0]);
        }
        let mut seen = BTreeSet::from([first.id]);
        let mut queue = VecDeque::from([first.id]);
        while let Some(c) = queue.pop_front() {
            for &nb in adj.get(&c).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(nb) {
                    queue.push_back(nb);
                }
            }
        }
        self.components.iter().all(|c| seen.contains(&c.id))
    }

    pub fn betti_number(&self) -> Result<u32, CurveError> {
        if self.components.is_empty() {
            return Err(CurveError::Empty);
        }
        if !self.is_connected() {
            return Err(CurveError::Disconnected);
        }
        Ok((self.nodes.len() + 1 - self.components.len()) as u32)
    }

    /// Structural problems: dangling references, duplicate ids, zero orders.
    pub fn structural_problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.components.is_empty() {
            out.push("curve has no components".to_string());
        }
        let mut ids = BTreeSet::new();
        for c in &self.components {
            if !ids.insert(c.id) {
                out.push(format!("duplicate component id {}", c.id));
            }
        }
        let mut nids = BTreeSet::new();
        for n in &self.nodes {
            if !nids.insert(n.id) {
                out.push(format!("duplicate node id {}", n.id));
            }
            for e in n.ends {
                if !ids.contains(&e) {
                    out.push(format!("node {} references unknown component {}", n.id, e));
                }
            }
            if n.stab == 0 {
                out.push(format!("node {} has stabilizer order 0", n.id));
            }
            if let Some(s) = n.sing {
                if s.a == 0 || s.mu == 0 {
                    out.push(format!("node {} has an invalid singularity record", n.id));
                }
            }
        }
        if !self.components.is_empty() && out.is_empty() && !self.is_connected() {
            out.push("dual graph is not connected".to_string());
        }
        out
    }

    pub fn marking_problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut ids = BTreeSet::new();
        for m in &self.markings {
            if !ids.insert(m.id) {
                out.push(format!("duplicate marking id {}", m.id));
            }
            if !self.has_component(m.comp) {
                out.push(format!("marking {} references unknown component {}", m.id, m.comp));
            }
            if m.gerbe == 0 {
                out.push(format!("marking {} has gerbe order 0", m.id));
            }
        }
        out
    }

    /// lcm of the stabilizer orders of nodes and markings on `c`.
    pub fn local_order_lcm(&self, c: CompId) -> u64 {
        let nodes = self.nodes.iter().filter(|n| n.touches(c)).map(|n| n.stab as u64);
        let marks = self.markings.iter().filter(|m| m.comp == c).map(|m| m.gerbe as u64);
        nodes.chain(marks).fold(1, lcm_u64)
    }
}

pub fn arithmetic_genus(c: &TwistedCurve) -> Result<u32, CurveError> {
    let b1 = c.betti_number()?;
    Ok(c.components.iter().map(|v| v.genus).sum::<u32>() + b1)
}

/// Degree of the coarse dualizing sheaf (twisted by markings if asked) on `comp`.
pub fn omega_degree_on_component(c: &TwistedCurve, comp: CompId, extra_markings: bool) -> Rat {
    let genus = c.component(comp).map_or(0, |v| v.genus) as i64;
    let marks = if extra_markings {
        c.markings_on(comp).len() as i64
    } else {
        0
    };
    Rat::from_int(2 * genus - 2 + c.branches(comp) as i64 + marks)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Stability {
    Stable,
    DestabilizingP1,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityEntry {
    pub comp: CompId,
    pub omega: Rat,
    pub ample: Rat,
    pub class: Stability,
}

pub fn classify(genus: u32, total: &Rat) -> Stability {
    if total > &Rat::zero() {
        Stability::Stable
    } else if total.is_zero() && genus == 0 {
        Stability::DestabilizingP1
    } else {
        Stability::Violation
    }
}

pub fn quasi_stability_check(c: &TwistedCurve, ample: &BTreeMap<CompId, Rat>) -> Vec<StabilityEntry> {
    c.components
        .iter()
        .map(|v| {
            let omega = omega_degree_on_component(c, v.id, true);
            let a = ample.get(&v.id).cloned().unwrap_or_default();
            let class = classify(v.genus, &(&omega + &a));
            StabilityEntry {
                comp: v.id,
                omega,
                ample: a,
                class,
            }
        })
        .collect()
}

/// Per-factor rational degrees of a line bundle on each component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiDegree {
    pub n_factors: usize,
    #[serde(default)]
    pub deg: BTreeMap<CompId, Vec<Rat>>,
}

impl MultiDegree {
    pub fn zero(n_factors: usize, comps: impl IntoIterator<Item = CompId>) -> MultiDegree {
        let deg = comps.into_iter().map(|c| (c, vec![Rat::zero(); n_factors])).collect();
        MultiDegree { n_factors, deg }
    }

    pub fn get(&self, factor: usize, comp: CompId) -> Rat {
        self.deg
            .get(&comp)
            .and_then(|v| v.get(factor))
            .cloned()
            .unwrap_or_default()
    }

    pub fn add(&mut self, factor: usize, comp: CompId, delta: &Rat) {
        let n = self.n_factors;
        let row = self.deg.entry(comp).or_insert_with(|| vec![Rat::zero(); n]);
        row[factor] = &row[factor] + delta;
    }

    pub fn remove(&mut self, comp: CompId) -> Vec<Rat> {
        self.deg
            .remove(&comp)
            .unwrap_or_else(|| vec![Rat::zero(); self.n_factors])
    }

    pub fn totals(&self) -> Vec<Rat> {
        (0..self.n_factors)
            .map(|k| self.deg.values().map(|v| v[k].clone()).sum())
            .collect()
    }

    /// Fill in explicit zero rows for components without an entry.
    pub fn complete(&mut self, c: &TwistedCurve) {
        for v in &c.components {
            self.deg
                .entry(v.id)
                .or_insert_with(|| vec![Rat::zero(); self.n_factors]);
        }
    }

    pub fn schema_problems(&self, c: &TwistedCurve) -> Vec<String> {
        let mut out = Vec::new();
        if self.n_factors == 0 {
            out.push("multidegree has zero torus factors".to_string());
        }
        for (comp, row) in &self.deg {
            if !c.has_component(*comp) {
                out.push(format!("degree given for unknown component {comp}"));
            }
            if row.len() != self.n_factors {
                out.push(format!(
                    "component {comp} has {} degrees, expected {}",
                    row.len(),
                    self.n_factors
                ));
            }
        }
        out
    }
}

pub fn is_torsion_on_component(md: &MultiDegree, comp: CompId) -> bool {
    (0..md.n_factors).all(|k| md.get(k, comp).is_zero())
}

/// Components and factors where `deg * lcm(local orders)` is not an integer.
pub fn denominator_violations(c: &TwistedCurve, md: &MultiDegree) -> Vec<(CompId, usize)> {
    let mut out = Vec::new();
    for v in &c.components {
        let l = BigInt::from(c.local_order_lcm(v.id));
        for k in 0..md.n_factors {
            if !(&l % md.get(k, v.id).denom()).is_zero() {
                out.push((v.id, k));
            }
        }
    }
    out
}

/// Per-factor generation bounds for the graded coordinate ring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct GradingSpec {
    #[serde(default)]
    pub d: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<i64>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolvedGrading {
    pub d: Vec<u32>,
    /// `"weights"` or `"given"` per factor.
    pub source: Vec<String>,
}

impl GradingSpec {
    pub fn uniform(n: usize, d: u32) -> GradingSpec {
        GradingSpec {
            d: vec![d; n],
            weights: None,
        }
    }

    /// The bound used per factor: the minimal one when weights are present.
    pub fn resolve(&self, n_factors: usize) -> Result<ResolvedGrading, String> {
        let mut d = Vec::with_capacity(n_factors);
        let mut source = Vec::with_capacity(n_factors);
        for k in 0..n_factors {
            let w = self.weights.as_ref().and_then(|w| w.get(k));
            match (w, self.d.get(k)) {
                (Some(w), _) => {
                    let m = w.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0).max(1);
                    d.push(u32::try_from(m).map_err(|_| format!("weight bound {m} too large"))?);
                    source.push("weights".to_string());
                }
                (None, Some(&dk)) if dk >= 1 => {
                    d.push(dk);
                    source.push("given".to_string());
                }
                (None, Some(_)) => return Err(format!("grading bound for factor {k} must be positive")),
                (None, None) => return Err(format!("no grading bound for factor {k}")),
            }
        }
        Ok(ResolvedGrading { d, source })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "cond", rename_all = "snake_case")]
pub enum Violation {
    Cond1 { detail: String },
    Cond2 { comp: CompId, omega: Rat, ample: Rat },
    Cond3 { detail: String },
    Cond4 { comp: CompId },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub caveats: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub const MULTI_FACTOR_CAVEAT: &str = "condition 4 uses the degree criterion factor by factor; \
     for more than one torus factor this componentwise extension is a modeling choice";

pub fn validate_twisted_map(c: &TwistedCurve, md: &MultiDegree, ample: &BTreeMap<CompId, Rat>) -> ValidationReport {
    let mut rep = ValidationReport::default();
    for d in c.structural_problems() {
        rep.violations.push(Violation::Cond1 { detail: d });
    }
    if !rep.violations.is_empty() {
        return rep;
    }
    let stab = quasi_stability_check(c, ample);
    for e in &stab {
        if e.class == Stability::Violation {
            rep.violations.push(Violation::Cond2 {
                comp: e.comp,
                omega: e.omega.clone(),
                ample: e.ample.clone(),
            });
        }
    }
    for d in c.marking_problems().into_iter().chain(md.schema_problems(c)) {
        rep.violations.push(Violation::Cond3 { detail: d });
    }
    for e in &stab {
        if e.class == Stability::DestabilizingP1 && is_torsion_on_component(md, e.comp) {
            rep.violations.push(Violation::Cond4 { comp: e.comp });
        }
    }
    if md.n_factors > 1 {
        rep.caveats.push(MULTI_FACTOR_CAVEAT.to_string());
    }
    rep
}

/// Graphviz rendering: components as ellipses, nodes as labeled edges,
/// markings as half-edges to point vertices.
pub fn to_dot(c: &TwistedCurve, md: Option<&MultiDegree>) -> String {
    let mut s = String::from("graph twisted_curve {\n  node [shape=ellipse];\n");
    for v in &c.components {
        let mut label = format!("C{} g={}", v.id, v.genus);
        if let Some(md) = md {
            let degs: Vec<String> = (0..md.n_factors).map(|k| md.get(k, v.id).to_string()).collect();
            let _ = write!(label, "\\ndeg=({})", degs.join(","));
        }
        let _ = writeln!(s, "  c{} [label=\"{}\"];", v.id, label);
    }
    for n in &c.nodes {
        let mut label = format!("μ_{}", n.stab);
        if let Some(a) = n.sing {
            let _ = write!(label, " A_{}", a.a - 1);
        }
        let style = if n.persistent { "" } else { ", style=dashed" };
        let _ = writeln!(s, "  c{} -- c{} [label=\"{}\"{}];", n.ends[0], n.ends[1], label, style);
    }
    for m in &c.markings {
        let _ = writeln!(s, "  m{} [shape=point];", m.id);
        let _ = writeln!(s, "  c{} -- m{} [label=\"μ_{}\"];", m.comp, m.id, m.gerbe);
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(comps: &[(u32, u32)], nodes: &[(u32, u32, u32)]) -> TwistedCurve {
        TwistedCurve {
            components: comps.iter().map(|&(id, genus)| Component { id, genus }).collect(),
            nodes: nodes
                .iter()
                .enumerate()
                .map(|(i, &(a, b, r))| Node::new(i as u32, a, b, r))
                .collect(),
            markings: vec![],
        }
    }

    #[test]
    fn genus_examples() {
        assert_eq!(arithmetic_genus(&curve(&[(0, 2)], &[])), Ok(2));
        assert_eq!(
            arithmetic_genus(&curve(&[(0, 2), (1, 2)], &[(0, 1, 1), (0, 1, 1)])),
            Ok(5)
        );
        assert_eq!(arithmetic_genus(&curve(&[(0, 0)], &[(0, 0, 1)])), Ok(1));
        assert_eq!(
            arithmetic_genus(&curve(&[(0, 0), (1, 0)], &[])),
            Err(CurveError::Disconnected)
        );
    }

    #[test]
    fn omega_examples() {
        let c = curve(&[(0, 0), (1, 1), (2, 1)], &[(0, 1, 1), (0, 2, 1)]);
        assert_eq!(omega_degree_on_component(&c, 0, true), Rat::zero());
        assert_eq!(
            omega_degree_on_component(&curve(&[(0, 2)], &[]), 0, true),
            Rat::from_int(2)
        );
        let mut c = curve(&[(0, 0), (1, 3)], &[(0, 1, 1)]);
        c.markings.push(Marking {
            id: 0,
            comp: 0,
            gerbe: 1,
        });
        assert_eq!(omega_degree_on_component(&c, 0, true), Rat::zero());
        assert_eq!(omega_degree_on_component(&c, 0, false), Rat::from_int(-1));
    }

    #[test]
    fn stability_examples() {
        let none = BTreeMap::new();
        let c = curve(&[(0, 0), (1, 1), (2, 1)], &[(0, 1, 1), (0, 2, 1)]);
        assert_eq!(quasi_stability_check(&c, &none)[0].class, Stability::DestabilizingP1);
        let c = curve(&[(0, 2)], &[]);
        assert_eq!(quasi_stability_check(&c, &none)[0].class, Stability::Stable);
        let c = curve(&[(0, 0), (1, 2)], &[(0, 1, 1)]);
        assert_eq!(quasi_stability_check(&c, &none)[0].class, Stability::Violation);
    }

    #[test]
    fn torsion_examples() {
        let mut md = MultiDegree::zero(1, [0]);
        assert!(is_torsion_on_component(&md, 0));
        md.add(0, 0, &Rat::new(1, 4));
        assert!(!is_torsion_on_component(&md, 0));
        let mut md = MultiDegree::zero(2, [0]);
        md.add(1, 0, &Rat::new(-1, 3));
        assert!(!is_torsion_on_component(&md, 0));
    }

    #[test]
    fn validation_examples() {
        let none = BTreeMap::new();
        let c = curve(&[(0, 0), (1, 1), (2, 1)], &[(0, 1, 1), (0, 2, 1)]);
        let md = MultiDegree::zero(1, [0, 1, 2]);
        assert_eq!(
            validate_twisted_map(&c, &md, &none).violations,
            vec![Violation::Cond4 { comp: 0 }]
        );

        let c = curve(&[(0, 1), (1, 1)], &[]);
        let md = MultiDegree::zero(1, [0, 1]);
        let v = validate_twisted_map(&c, &md, &none).violations;
        assert!(matches!(v.as_slice(), [Violation::Cond1 { .. }]));

        let c = curve(&[(0, 2), (1, 2)], &[(0, 1, 1), (0, 1, 1)]);
        let md = MultiDegree::zero(2, [0, 1]);
        let rep = validate_twisted_map(&c, &md, &none);
        assert!(rep.is_ok());
        assert_eq!(rep.caveats.len(), 1);
    }

    #[test]
    fn denominators_follow_local_orders() {
        let c = curve(&[(0, 1), (1, 0)], &[(0, 1, 2), (0, 1, 4)]);
        let mut md = MultiDegree::zero(1, [0, 1]);
        md.add(0, 1, &Rat::new(1, 4));
        md.add(0, 0, &Rat::new(-1, 4));
        assert!(denominator_violations(&c, &md).is_empty());
        md.add(0, 0, &Rat::new(1, 8));
        assert_eq!(denominator_violations(&c, &md), vec![(0, 0)]);
    }

    #[test]
    fn grading_resolution() {
        let g = GradingSpec {
            d: vec![5, 2],
            weights: Some(vec![vec![1, -3, 2]]),
        };
        let r = g.resolve(2).unwrap();
        assert_eq!(r.d, vec![3, 2]);
        assert_eq!(r.source, vec!["weights", "given"]);
        assert!(GradingSpec::default().resolve(1).is_err());
    }

    #[test]
    fn curve_json_defaults() {
        let c: TwistedCurve = serde_json::from_str(
            r#"{"components":[{"id":0,"genus":1}],"nodes":[{"id":3,"ends":[0,0],"persistent":true}]}"#,
        )
        .unwrap();
        assert_eq!(c.nodes[0].stab, 1);
        assert_eq!(c.branches(0), 2);
        assert_eq!(c.fresh_node_id(), 4);
        assert!(to_dot(&c, None).contains("c0 -- c0 [label=\"μ_1\"]"));
    }
}

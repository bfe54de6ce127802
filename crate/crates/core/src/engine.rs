//! The degeneration pipeline: Smith invariants at persistent nodes, chain
//! insertion, and contraction of torsion components.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blowup::{contract_singularity, twisted_blowup, AnSing, BlowupError, BlowupParams};
use crate::curve::{
    arithmetic_genus, denominator_violations, is_torsion_on_component, quasi_stability_check, validate_twisted_map,
    CompId, Component, GradingSpec, MultiDegree, Node, NodeId, Stability, TwistedCurve, ValidationReport,
};
use crate::dvrlinalg::{smith_normal_form, LinalgError, Mat, SnfResult};
use crate::field::{gcd_u64, Rat, RatFunc};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("gluing at node {node}: {source}")]
    Gluing { node: NodeId, source: LinalgError },
    #[error(transparent)]
    Blowup(#[from] BlowupError),
    #[error("inconsistent state: {0}")]
    Inconsistent(String),
    #[error("limit is not a twisted map ({} violations)", .0.violations.len())]
    Validation(ValidationReport),
}

impl EngineError {
    pub fn is_input_error(&self) -> bool {
        matches!(self, EngineError::Input(_))
    }
}

/// An engine error together with the steps completed before it.
#[derive(Debug, Clone, Error)]
#[error("{error}")]
pub struct EngineFailure {
    pub error: EngineError,
    pub log: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "InputJson", into = "InputJson")]
pub struct DegenerationInput {
    pub curve: TwistedCurve,
    pub multidegree: MultiDegree,
    pub grading: GradingSpec,
    pub gluing: BTreeMap<NodeId, Mat>,
    pub extra_mu: BTreeMap<NodeId, u32>,
    /// Degree of the pulled-back ample bundle per component; missing means 0.
    pub ample_degree: BTreeMap<CompId, Rat>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputJson {
    components: Vec<Component>,
    #[serde(default)]
    nodes: Vec<Node>,
    #[serde(default)]
    markings: Vec<crate::curve::Marking>,
    multidegree: MultiDegree,
    grading: GradingSpec,
    #[serde(default)]
    gluing: BTreeMap<NodeId, Mat>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    extra_mu: BTreeMap<NodeId, u32>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    ample_degree: BTreeMap<CompId, Rat>,
}

impl From<InputJson> for DegenerationInput {
    fn from(j: InputJson) -> Self {
        DegenerationInput {
            curve: TwistedCurve {
                components: j.components,
                nodes: j.nodes,
                markings: j.markings,
            },
            multidegree: j.multidegree,
            grading: j.grading,
            gluing: j.gluing,
            extra_mu: j.extra_mu,
            ample_degree: j.ample_degree,
        }
    }
}

impl From<DegenerationInput> for InputJson {
    fn from(i: DegenerationInput) -> Self {
        InputJson {
            components: i.curve.components,
            nodes: i.curve.nodes,
            markings: i.curve.markings,
            multidegree: i.multidegree,
            grading: i.grading,
            gluing: i.gluing,
            extra_mu: i.extra_mu,
            ample_degree: i.ample_degree,
        }
    }
}

/// Blow-up data for one diagonal position of the Smith form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FactorParam {
    pub m: u32,
    pub d: u32,
    /// Signed valuation; its sign picks the blown-up branch.
    pub val: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalizeFactor {
    pub m1: i64,
    pub m2: i64,
    pub shift: i64,
    pub delta: i64,
    pub result: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Step {
    Grading {
        d: Vec<u32>,
        source: Vec<String>,
    },
    Normalize {
        comp: CompId,
        nodes: [NodeId; 2],
        k: u32,
        applied: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        reason: Option<String>,
        factors: Vec<NormalizeFactor>,
        totals: Vec<Rat>,
    },
    Snf {
        node: NodeId,
        shift: u32,
        diag_valuations: Vec<i64>,
        signed_valuations: Vec<i64>,
        params: Vec<FactorParam>,
        totals: Vec<Rat>,
    },
    Insert {
        node: NodeId,
        factor: usize,
        m: u32,
        d: u32,
        mu: u32,
        k_prime: u32,
        blown_up_end: usize,
        component: CompId,
        new_node: NodeId,
        loser: CompId,
        degree: Rat,
        orders: [u32; 2],
        totals: Vec<Rat>,
    },
    Contract {
        comp: CompId,
        nodes: [NodeId; 2],
        merged_node: NodeId,
        order: u32,
        singularity: AnSing,
        totals: Vec<Rat>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegenerationOutput {
    pub limit_curve: TwistedCurve,
    pub limit_multidegree: MultiDegree,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub ample_degree: BTreeMap<CompId, Rat>,
    pub log: Vec<Step>,
    pub validation: ValidationReport,
    pub notes: Vec<String>,
}

impl DegenerationOutput {
    pub fn inserted_components(&self) -> Vec<CompId> {
        let removed: BTreeSet<CompId> = self
            .log
            .iter()
            .filter_map(|s| match s {
                Step::Contract { comp, .. } => Some(*comp),
                _ => None,
            })
            .collect();
        self.log
            .iter()
            .filter_map(|s| match s {
                Step::Insert { component, .. } if !removed.contains(component) => Some(*component),
                _ => None,
            })
            .collect()
    }
}

/// Smith invariants of a gluing matrix paired with the grading bounds.
///
/// Valuations are those of the matrix itself (the shift is undone), sorted.
pub fn compute_blowup_parameters(g: &Mat, d: &[u32]) -> Result<(SnfResult, Vec<FactorParam>), LinalgError> {
    let snf = smith_normal_form(g)?;
    if d.len() != g.rows() {
        return Err(LinalgError::Dimension(format!(
            "{} grading bounds for a {}x{} gluing",
            d.len(),
            g.rows(),
            g.cols()
        )));
    }
    let params = snf
        .signed_valuations()
        .iter()
        .zip(d)
        .map(|(&val, &dk)| FactorParam {
            m: val.unsigned_abs() as u32,
            d: dk,
            val,
        })
        .collect();
    Ok((snf, params))
}

/// Shift `(m1, m2)` to `(m1 - m2 + k*delta, 0)` with the least `delta >= 0`
/// making the first entry non-negative.
pub fn normalize_pair(m1: i64, m2: i64, k: u32) -> NormalizeFactor {
    let r = m1 - m2;
    let k = k.max(1) as i64;
    let delta = if r >= 0 { 0 } else { (-r + k - 1) / k };
    NormalizeFactor {
        m1,
        m2,
        shift: -m2,
        delta,
        result: (r + k * delta) as u32,
    }
}

/// Normalized valuations for a destabilizing component with exactly two nodes.
pub fn normalize_destabilizing_gluing(
    curve: &TwistedCurve,
    comp: CompId,
    vals: (i64, i64),
    k: u32,
) -> Result<(u32, u32), EngineError> {
    let c = curve
        .component(comp)
        .ok_or_else(|| EngineError::Input(format!("unknown component {comp}")))?;
    if c.genus != 0 {
        return Err(EngineError::Input(format!("component {comp} has genus {}", c.genus)));
    }
    let n = curve.nodes_at(comp).len();
    if n != 2 {
        return Err(EngineError::Input(format!(
            "component {comp} has {n} nodes, expected 2"
        )));
    }
    Ok((normalize_pair(vals.0, vals.1, k).result, 0))
}

/// Replace persistent node `node` by a path through one new component per
/// factor with `m > 0`.
///
/// Each new component sits next to the persistent node on the blown-up side,
/// so the chain reads outward in factor order. With stabilizer order `k` at
/// the node (from `extra_mu`, else the node's own order), the new component
/// has degree `1/(dk)` in its factor, the component it was inserted against
/// loses the same amount, the persistent node keeps order `k` and the new
/// node gets `k'd` with `k' = k / gcd(k, d-1)`.
pub fn insert_exceptional_chain(
    curve: &mut TwistedCurve,
    md: &mut MultiDegree,
    node: NodeId,
    params: &[FactorParam],
    extra_mu: Option<u32>,
) -> Result<Vec<Step>, EngineError> {
    let n = curve
        .node(node)
        .ok_or_else(|| EngineError::Input(format!("unknown node {node}")))?
        .clone();
    if !n.persistent {
        return Err(EngineError::Input(format!("node {node} is not persistent")));
    }
    let k = match extra_mu {
        Some(0) => return Err(EngineError::Input(format!("extra_mu for node {node} is 0"))),
        Some(mu) if n.stab != 1 && n.stab != mu => {
            return Err(EngineError::Input(format!(
                "node {node} has order {} but extra_mu {mu}",
                n.stab
            )))
        }
        Some(mu) => mu,
        None => n.stab,
    };
    let mut inner = n.ends;
    let mut steps = Vec::new();
    for (j, fp) in params.iter().enumerate() {
        if fp.m == 0 {
            continue;
        }
        let res = twisted_blowup(BlowupParams { m: fp.m, d: fp.d })?;
        let degree = res
            .ideal_degree_on_exceptional
            .checked_div(&Rat::from_int(k as i64))
            .expect("k >= 1");
        let k_prime = k / gcd_u64(k as u64, fp.d as u64 - 1) as u32;
        let q_order = k_prime * fp.d;
        let side = if fp.val >= 0 { 1 } else { 0 };
        let loser = inner[side];

        let e = curve.fresh_component_id();
        curve.components.push(Component { id: e, genus: 0 });
        md.deg.insert(e, vec![Rat::zero(); md.n_factors]);
        md.add(j, e, &degree);
        md.add(j, loser, &-&degree);

        let q = curve.fresh_node_id();
        let ends = if side == 1 { [e, loser] } else { [loser, e] };
        curve.nodes.push(Node {
            id: q,
            ends,
            stab: q_order,
            persistent: false,
            sing: Some(AnSing::from_stack(fp.m as u64, q_order)),
        });
        inner[side] = e;
        let p = curve.node_mut(node).expect("node exists");
        p.ends = inner;
        p.stab = k;
        steps.push(Step::Insert {
            node,
            factor: j,
            m: fp.m,
            d: fp.d,
            mu: k,
            k_prime,
            blown_up_end: side,
            component: e,
            new_node: q,
            loser,
            degree,
            orders: [k, q_order],
            totals: md.totals(),
        });
    }
    Ok(steps)
}

fn contractible(
    curve: &TwistedCurve,
    md: &MultiDegree,
    ample: &BTreeMap<CompId, Rat>,
    c: &Component,
) -> Option<[NodeId; 2]> {
    if c.genus != 0 || !curve.markings_on(c.id).is_empty() {
        return None;
    }
    if !ample.get(&c.id).is_none_or(Rat::is_zero) || !is_torsion_on_component(md, c.id) {
        return None;
    }
    let nodes = curve.nodes_at(c.id);
    match nodes.as_slice() {
        [a, b] if !a.is_self_node() && !b.is_self_node() => Some([a.id, b.id]),
        _ => None,
    }
}

/// Contract genus-0 two-node components of degree zero until none remain.
pub fn contract_torsion_components(
    curve: &mut TwistedCurve,
    md: &mut MultiDegree,
    ample: &BTreeMap<CompId, Rat>,
) -> Result<Vec<Step>, EngineError> {
    let mut steps = Vec::new();
    loop {
        let mut comps: Vec<&Component> = curve.components.iter().collect();
        comps.sort_by_key(|c| c.id);
        let Some((cid, [a, b])) = comps
            .iter()
            .find_map(|c| contractible(curve, md, ample, c).map(|n| (c.id, n)))
        else {
            break;
        };
        let na = curve.node(a).expect("node").clone();
        let nb = curve.node(b).expect("node").clone();
        if na.stab != nb.stab {
            return Err(EngineError::Inconsistent(format!(
                "torsion component {cid} has node orders {} and {}",
                na.stab, nb.stab
            )));
        }
        let sing = contract_singularity(na.singularity(), nb.singularity())?;
        let merged = Node {
            id: a.min(b),
            ends: [na.other_end(cid), nb.other_end(cid)],
            stab: na.stab,
            persistent: na.persistent || nb.persistent,
            sing: Some(sing),
        };
        curve.nodes.retain(|n| n.id != a && n.id != b);
        curve.nodes.push(merged);
        curve.nodes.sort_by_key(|n| n.id);
        curve.components.retain(|c| c.id != cid);
        md.remove(cid);
        steps.push(Step::Contract {
            comp: cid,
            nodes: [a, b],
            merged_node: a.min(b),
            order: na.stab,
            singularity: sing,
            totals: md.totals(),
        });
    }
    Ok(steps)
}

fn check_input(input: &DegenerationInput) -> Result<(), EngineError> {
    let bad = |s: String| Err(EngineError::Input(s));
    let c = &input.curve;
    let problems: Vec<String> = c
        .structural_problems()
        .into_iter()
        .chain(c.marking_problems())
        .chain(input.multidegree.schema_problems(c))
        .collect();
    if !problems.is_empty() {
        return bad(problems.join("; "));
    }
    let n = input.multidegree.n_factors;
    for (id, g) in &input.gluing {
        match c.node(*id) {
            None => return bad(format!("gluing given for unknown node {id}")),
            Some(nd) if !nd.persistent => return bad(format!("gluing given for non-persistent node {id}")),
            _ => {}
        }
        if g.rows() != n || g.cols() != n {
            return bad(format!(
                "gluing at node {id} is {}x{}, expected {n}x{n}",
                g.rows(),
                g.cols()
            ));
        }
    }
    for nd in &c.nodes {
        if nd.persistent && !input.gluing.contains_key(&nd.id) {
            return bad(format!("persistent node {} has no gluing", nd.id));
        }
    }
    for (id, mu) in &input.extra_mu {
        let Some(nd) = c.node(*id) else {
            return bad(format!("extra_mu given for unknown node {id}"));
        };
        if *mu == 0 || (nd.stab != 1 && nd.stab != *mu) {
            return bad(format!("extra_mu {mu} does not fit node {id} of order {}", nd.stab));
        }
    }
    for (comp, a) in &input.ample_degree {
        if !c.has_component(*comp) {
            return bad(format!("ample degree given for unknown component {comp}"));
        }
        if a.is_negative() {
            return bad(format!("ample degree on component {comp} is negative"));
        }
    }
    let dv = denominator_violations(c, &input.multidegree);
    if let Some((comp, k)) = dv.first() {
        return bad(format!(
            "degree {} on component {comp} (factor {k}) has a denominator not allowed by its stabilizers",
            input.multidegree.get(*k, *comp)
        ));
    }
    Ok(())
}

fn diagonal_valuations(g: &Mat) -> Option<Vec<i64>> {
    if !g.is_diagonal() {
        return None;
    }
    (0..g.rows()).map(|i| g.get(i, i).val().finite()).collect()
}

fn normalize_gluings(input: &DegenerationInput, gluing: &mut BTreeMap<NodeId, Mat>, totals: &[Rat]) -> Vec<Step> {
    let c = &input.curve;
    let mut steps = Vec::new();
    let mut touched: BTreeSet<NodeId> = BTreeSet::new();
    let mut comps: Vec<&Component> = c.components.iter().collect();
    comps.sort_by_key(|v| v.id);
    let stab = quasi_stability_check(c, &input.ample_degree);
    for v in comps {
        let destab = stab
            .iter()
            .any(|e| e.comp == v.id && e.class == Stability::DestabilizingP1);
        if !destab {
            continue;
        }
        let nodes = c.nodes_at(v.id);
        let [a, b] = nodes.as_slice() else { continue };
        if !a.persistent || !b.persistent || a.is_self_node() || b.is_self_node() {
            continue;
        }
        let mu = |nd: &Node| input.extra_mu.get(&nd.id).copied().unwrap_or(nd.stab);
        let (n1, n2) = if (mu(a), a.id) <= (mu(b), b.id) {
            (*a, *b)
        } else {
            (*b, *a)
        };
        let k = mu(n1);
        let step = |applied: bool, reason: Option<&str>, factors: Vec<NormalizeFactor>| Step::Normalize {
            comp: v.id,
            nodes: [n1.id, n2.id],
            k,
            applied,
            reason: reason.map(str::to_string),
            factors,
            totals: totals.to_vec(),
        };
        if touched.contains(&n1.id) || touched.contains(&n2.id) {
            steps.push(step(
                false,
                Some("shares a node with a component normalized earlier"),
                vec![],
            ));
            continue;
        }
        let (Some(v1), Some(v2)) = (
            diagonal_valuations(&gluing[&n1.id]),
            diagonal_valuations(&gluing[&n2.id]),
        ) else {
            steps.push(step(false, Some("gluing matrices are not diagonal"), vec![]));
            continue;
        };
        let sign = |nd: &Node| if nd.ends[1] == v.id { 1 } else { -1 };
        let factors: Vec<NormalizeFactor> = v1
            .iter()
            .zip(&v2)
            .map(|(&x, &y)| normalize_pair(sign(n1) * x, sign(n2) * y, k))
            .collect();
        let diag1 = factors
            .iter()
            .map(|f| RatFunc::t_pow(sign(n1) * f.result as i64))
            .collect();
        gluing.insert(n1.id, Mat::diag(diag1));
        gluing.insert(n2.id, Mat::identity(v1.len()));
        touched.insert(n1.id);
        touched.insert(n2.id);
        steps.push(step(true, None, factors));
    }
    steps
}

pub const MINIMAL_EXTENSION_NOTE: &str = "the extension over generic points of the special fiber is the minimal one; \
     twisting by a component of the special fiber gives other extensions isomorphic away from it";
pub const CONSERVATION_NOTE: &str =
    "degrees on non-exceptional components are assigned by conservation of the total degree per factor";
pub const CHAIN_ORDER_NOTE: &str =
    "several factors blew up the same node; each new component was placed next to the persistent node, \
     so the chain reads outward in factor order";

fn degenerate_inner(input: &DegenerationInput, log: &mut Vec<Step>) -> Result<DegenerationOutput, EngineError> {
    check_input(input)?;
    let n = input.multidegree.n_factors;
    let grading = input.grading.resolve(n).map_err(EngineError::Input)?;
    log.push(Step::Grading {
        d: grading.d.clone(),
        source: grading.source.clone(),
    });

    let mut curve = input.curve.clone();
    let mut md = input.multidegree.clone();
    md.complete(&curve);
    let totals0 = md.totals();
    let genus0 = arithmetic_genus(&curve).map_err(|e| EngineError::Input(e.to_string()))?;

    let mut gluing = input.gluing.clone();
    log.extend(normalize_gluings(input, &mut gluing, &totals0));

    let mut notes = vec![MINIMAL_EXTENSION_NOTE.to_string()];
    let persistent: Vec<NodeId> = {
        let mut v: Vec<NodeId> = curve.nodes.iter().filter(|n| n.persistent).map(|n| n.id).collect();
        v.sort_unstable();
        v
    };
    let mut multi = false;
    for id in persistent {
        let g = &gluing[&id];
        let (snf, params) =
            compute_blowup_parameters(g, &grading.d).map_err(|source| EngineError::Gluing { node: id, source })?;
        log.push(Step::Snf {
            node: id,
            shift: snf.shift,
            diag_valuations: snf.diag_valuations.clone(),
            signed_valuations: snf.signed_valuations(),
            params: params.clone(),
            totals: md.totals(),
        });
        let steps = insert_exceptional_chain(&mut curve, &mut md, id, &params, input.extra_mu.get(&id).copied())?;
        multi |= steps.len() > 1;
        log.extend(steps);
    }
    if log.iter().any(|s| matches!(s, Step::Insert { .. })) {
        notes.push(CONSERVATION_NOTE.to_string());
    }
    if multi {
        notes.push(CHAIN_ORDER_NOTE.to_string());
    }

    log.extend(contract_torsion_components(&mut curve, &mut md, &input.ample_degree)?);

    if md.totals() != totals0 {
        return Err(EngineError::Inconsistent("total degree changed".into()));
    }
    if arithmetic_genus(&curve).ok() != Some(genus0) {
        return Err(EngineError::Inconsistent("arithmetic genus changed".into()));
    }
    if let Some((comp, k)) = denominator_violations(&curve, &md).first() {
        return Err(EngineError::Inconsistent(format!(
            "degree {} on component {comp} (factor {k}) is not compatible with its stabilizer orders",
            md.get(*k, *comp)
        )));
    }
    let validation = validate_twisted_map(&curve, &md, &input.ample_degree);
    if !validation.is_ok() {
        return Err(EngineError::Validation(validation));
    }
    let ample_degree = input
        .ample_degree
        .iter()
        .filter(|(c, _)| curve.has_component(**c))
        .map(|(c, a)| (*c, a.clone()))
        .collect();
    Ok(DegenerationOutput {
        limit_curve: curve,
        limit_multidegree: md,
        ample_degree,
        log: std::mem::take(log),
        validation,
        notes,
    })
}

/// Run the full pipeline on `input`.
pub fn degenerate(input: &DegenerationInput) -> Result<DegenerationOutput, EngineFailure> {
    let mut log = Vec::new();
    degenerate_inner(input, &mut log).map_err(|error| EngineFailure { error, log })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[&str]]) -> Mat {
        Mat::parse_rows(rows).unwrap()
    }

    #[test]
    fn parameter_examples() {
        let (_, p) = compute_blowup_parameters(&m(&[&["t^3"]]), &[1]).unwrap();
        assert_eq!(p, vec![FactorParam { m: 3, d: 1, val: 3 }]);
        let (_, p) = compute_blowup_parameters(&m(&[&["t", "t"], &["t", "t^3"]]), &[2, 2]).unwrap();
        assert_eq!(p.iter().map(|f| (f.m, f.d)).collect::<Vec<_>>(), vec![(1, 2), (1, 2)]);
        let (_, p) = compute_blowup_parameters(&m(&[&["(t+2)/(1-t)"]]), &[4]).unwrap();
        assert_eq!((p[0].m, p[0].d), (0, 4));
        assert!(compute_blowup_parameters(&m(&[&["0"]]), &[1]).is_err());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_pair(5, 3, 2).result, 2);
        assert_eq!(normalize_pair(5, 3, 2).shift, -3);
        assert_eq!(normalize_pair(0, 0, 7).result, 0);
        let f = normalize_pair(1, 4, 3);
        assert_eq!((f.result, f.shift, f.delta), (0, -4, 1));
        let f = normalize_pair(0, 5, 2);
        assert_eq!((f.result, f.delta), (1, 3));
    }

    #[test]
    fn normalize_rejects_wrong_node_count() {
        let c = TwistedCurve {
            components: vec![Component { id: 0, genus: 0 }, Component { id: 1, genus: 2 }],
            nodes: vec![Node::new(0, 0, 1, 1)],
            markings: vec![],
        };
        assert!(normalize_destabilizing_gluing(&c, 0, (1, 0), 1).is_err());
    }

    fn self_node_curve(k: u32) -> (TwistedCurve, MultiDegree) {
        let mut n = Node::new(0, 0, 0, k);
        n.persistent = true;
        let c = TwistedCurve {
            components: vec![Component { id: 0, genus: 1 }],
            nodes: vec![n],
            markings: vec![],
        };
        let mut md = MultiDegree::zero(1, [0]);
        md.add(0, 0, &Rat::one());
        (c, md)
    }

    #[test]
    fn theta_insertion_orders() {
        let (mut c, mut md) = self_node_curve(2);
        let steps =
            insert_exceptional_chain(&mut c, &mut md, 0, &[FactorParam { m: 1, d: 2, val: 1 }], Some(2)).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(md.get(0, 1), Rat::new(1, 4));
        assert_eq!(md.get(0, 0), Rat::new(3, 4));
        let mut orders: Vec<u32> = c.nodes_at(1).iter().map(|n| n.stab).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![2, 4]);
    }

    #[test]
    fn zero_params_leave_curve_alone() {
        let (mut c, mut md) = self_node_curve(1);
        let before = (c.clone(), md.clone());
        let steps = insert_exceptional_chain(&mut c, &mut md, 0, &[FactorParam { m: 0, d: 3, val: 0 }], None).unwrap();
        assert!(steps.is_empty());
        assert_eq!((c, md), before);
    }

    #[test]
    fn negative_valuation_blows_up_first_end() {
        let mut n = Node::new(0, 0, 1, 1);
        n.persistent = true;
        let mut c = TwistedCurve {
            components: vec![Component { id: 0, genus: 2 }, Component { id: 1, genus: 2 }],
            nodes: vec![n],
            markings: vec![],
        };
        let mut md = MultiDegree::zero(1, [0, 1]);
        insert_exceptional_chain(&mut c, &mut md, 0, &[FactorParam { m: 2, d: 1, val: -2 }], None).unwrap();
        assert_eq!(md.get(0, 0), Rat::from_int(-1));
        assert_eq!(md.get(0, 1), Rat::zero());
        assert_eq!(c.node(0).unwrap().ends, [2, 1]);
    }

    #[test]
    fn chain_of_two_torsion_components_contracts_fully() {
        // X - P - Q - Y with P, Q torsion
        let comps = vec![
            Component { id: 0, genus: 1 },
            Component { id: 1, genus: 0 },
            Component { id: 2, genus: 0 },
            Component { id: 3, genus: 1 },
        ];
        let nodes = vec![Node::new(0, 0, 1, 3), Node::new(1, 1, 2, 3), Node::new(2, 2, 3, 3)];
        let mut c = TwistedCurve {
            components: comps,
            nodes,
            markings: vec![],
        };
        let g = arithmetic_genus(&c).unwrap();
        let mut md = MultiDegree::zero(1, [0, 1, 2, 3]);
        let steps = contract_torsion_components(&mut c, &mut md, &BTreeMap::new()).unwrap();
        assert_eq!(steps.len(), 2);
        assert_eq!(c.components.len(), 2);
        assert_eq!(arithmetic_genus(&c).unwrap(), g);
        assert_eq!(c.nodes[0].sing, Some(AnSing { a: 9, mu: 3 }));
        let again = contract_torsion_components(&mut c, &mut md, &BTreeMap::new()).unwrap();
        assert!(again.is_empty());
    }

    #[test]
    fn unequal_orders_are_a_hard_error() {
        let comps = vec![
            Component { id: 0, genus: 1 },
            Component { id: 1, genus: 0 },
            Component { id: 2, genus: 1 },
        ];
        let nodes = vec![Node::new(0, 0, 1, 2), Node::new(1, 1, 2, 3)];
        let mut c = TwistedCurve {
            components: comps,
            nodes,
            markings: vec![],
        };
        let mut md = MultiDegree::zero(1, [0, 1, 2]);
        let err = contract_torsion_components(&mut c, &mut md, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, EngineError::Inconsistent(_)));
    }
}

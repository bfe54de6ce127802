//! Built-in inputs for the worked examples.

use std::collections::BTreeMap;

use crate::curve::{Component, GradingSpec, MultiDegree, Node, TwistedCurve};
use crate::dvrlinalg::Mat;
use crate::engine::DegenerationInput;
use crate::field::{gcd_u64, Rat, RatFunc};

pub const NAMES: &[&str] = &[
    "two-genus2-bridge",
    "theta-example-1",
    "theta-example-2",
    "theta-example-3",
];

/// Optional knobs; `m2` only matters for `theta-example-3`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScenarioParams {
    pub k: Option<u32>,
    pub d: Option<u32>,
    pub m: Option<u32>,
    pub m2: Option<u32>,
}

pub fn k_prime(k: u32, d: u32) -> u32 {
    k / gcd_u64(k as u64, d as u64 - 1) as u32
}

fn persistent(id: u32, a: u32, b: u32, stab: u32) -> Node {
    let mut n = Node::new(id, a, b, stab);
    n.persistent = true;
    n
}

fn t_pow(e: u32) -> Mat {
    Mat::diag(vec![RatFunc::t_pow(e as i64)])
}

fn degrees(rows: &[(u32, Rat)]) -> MultiDegree {
    MultiDegree {
        n_factors: 1,
        deg: rows.iter().map(|(c, r)| (*c, vec![r.clone()])).collect(),
    }
}

fn input(curve: TwistedCurve, md: MultiDegree, d: u32, gluing: BTreeMap<u32, Mat>) -> DegenerationInput {
    DegenerationInput {
        curve,
        multidegree: md,
        grading: GradingSpec::uniform(1, d),
        gluing,
        extra_mu: BTreeMap::new(),
        ample_degree: BTreeMap::new(),
    }
}

/// Two genus-2 curves meeting at two nodes, glued by `1` and by `t`.
pub fn two_genus2_bridge() -> DegenerationInput {
    let curve = TwistedCurve {
        components: vec![Component { id: 0, genus: 2 }, Component { id: 1, genus: 2 }],
        nodes: vec![persistent(0, 0, 1, 1), persistent(1, 0, 1, 1)],
        markings: vec![],
    };
    let md = degrees(&[(0, Rat::zero()), (1, Rat::zero())]);
    let gluing = BTreeMap::from([(0, Mat::identity(1)), (1, t_pow(1))]);
    input(curve, md, 1, gluing)
}

/// Stable limit with a single twisted node carrying the zero of the section.
pub fn theta_example_1(k: u32) -> DegenerationInput {
    let curve = TwistedCurve {
        components: vec![Component { id: 0, genus: 1 }],
        nodes: vec![Node::new(0, 0, 0, k)],
        markings: vec![],
    };
    input(curve, degrees(&[(0, Rat::one())]), 1, BTreeMap::new())
}

/// Twisted self-node of order `k` glued by `t^m`.
pub fn theta_example_2(k: u32, d: u32, m: u32) -> DegenerationInput {
    let curve = TwistedCurve {
        components: vec![Component { id: 0, genus: 1 }],
        nodes: vec![persistent(0, 0, 0, k)],
        markings: vec![],
    };
    let mut inp = input(curve, degrees(&[(0, Rat::one())]), d, BTreeMap::from([(0, t_pow(m))]));
    inp.extra_mu.insert(0, k);
    inp
}

/// The limit of example 2 taken as generic fiber, glued by `t^m1` at the
/// order-`k` node and `t^m2` at the order-`k'd` node.
pub fn theta_example_3(k: u32, d: u32, m1: u32, m2: u32) -> DegenerationInput {
    let e = Rat::new(1, d as i64 * k as i64);
    let curve = TwistedCurve {
        components: vec![Component { id: 0, genus: 1 }, Component { id: 1, genus: 0 }],
        nodes: vec![persistent(0, 0, 1, k), persistent(1, 0, 1, k_prime(k, d) * d)],
        markings: vec![],
    };
    let md = degrees(&[(0, Rat::one() - e.clone()), (1, e)]);
    input(curve, md, d, BTreeMap::from([(0, t_pow(m1)), (1, t_pow(m2))]))
}

pub fn builtin(name: &str, p: ScenarioParams) -> Result<DegenerationInput, String> {
    let k = p.k.unwrap_or(2);
    let d = p.d.unwrap_or(2);
    if k == 0 || d == 0 {
        return Err("k and d must be positive".into());
    }
    match name {
        "two-genus2-bridge" => Ok(two_genus2_bridge()),
        "theta-example-1" => Ok(theta_example_1(k)),
        "theta-example-2" => Ok(theta_example_2(k, d, p.m.unwrap_or(1))),
        "theta-example-3" => Ok(theta_example_3(k, d, p.m.unwrap_or(2), p.m2.unwrap_or(1))),
        other => Err(format!("unknown scenario '{other}'; known: {}", NAMES.join(", "))),
    }
}

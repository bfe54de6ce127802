//! Random generators shared by the property suites.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::curve::{Component, GradingSpec, MultiDegree, Node, TwistedCurve};
use crate::dvrlinalg::{determinant, Mat};
use crate::engine::DegenerationInput;
use crate::field::{gcd_u64, Poly, Rat, RatFunc};
use crate::scenarios::k_prime;

pub fn random_poly<R: Rng>(rng: &mut R, max_deg: usize, coeff: i64) -> Poly {
    let deg = rng.gen_range(0..=max_deg);
    let c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-coeff..=coeff)).collect();
    Poly::from_i64(&c)
}

/// Rational function with numerator of degree at most `max_deg` and a
/// denominator `t^j * (1 + c t)` with `j <= 2`; poles at the origin occur.
pub fn random_ratfunc<R: Rng>(rng: &mut R, max_deg: usize) -> RatFunc {
    let num = random_poly(rng, max_deg, 3);
    let j = if rng.gen_bool(0.3) { rng.gen_range(1..=2) } else { 0 };
    let c = if rng.gen_bool(0.3) { rng.gen_range(-2..=2) } else { 0 };
    let mut den = vec![0i64; j];
    den.extend([1, c]);
    RatFunc::new(num, Poly::from_i64(&den)).expect("nonzero denominator")
}

/// Element of the local ring: a small polynomial, sometimes over `1 + c t`.
pub fn random_regular<R: Rng>(rng: &mut R) -> RatFunc {
    let num = RatFunc::from_poly(random_poly(rng, 1, 3));
    if rng.gen_bool(0.2) {
        let c = *[-2i64, -1, 1, 2].choose(rng).expect("nonempty");
        let den = RatFunc::from_poly(Poly::from_i64(&[1, c]));
        &num * &den.inv().expect("nonzero")
    } else {
        num
    }
}

pub fn random_unit<R: Rng>(rng: &mut R) -> RatFunc {
    let c0 = *[-3i64, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
    let c1 = if rng.gen_bool(0.5) { rng.gen_range(-2..=2) } else { 0 };
    RatFunc::from_poly(Poly::from_i64(&[c0, c1]))
}

/// Random matrix that is invertible over the local ring.
pub fn random_unimodular<R: Rng>(rng: &mut R, n: usize) -> Mat {
    let mut lower = Mat::identity(n);
    let mut upper = Mat::identity(n);
    let mut diag = Vec::with_capacity(n);
    for i in 0..n {
        diag.push(random_unit(rng));
        for j in 0..i {
            let mut l = Mat::identity(n);
            l.set(i, j, random_regular(rng));
            lower = lower.mul(&l).expect("square");
            let mut u = Mat::identity(n);
            u.set(j, i, random_regular(rng));
            upper = upper.mul(&u).expect("square");
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut p = Mat::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        p.set(i, j, RatFunc::one());
    }
    p.mul(&lower)
        .and_then(|m| m.mul(&Mat::diag(diag)))
        .and_then(|m| m.mul(&upper))
        .expect("square")
}

/// Random `n x n` matrix of rational functions, invertible over `Q(t)`.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize, max_deg: usize) -> Mat {
    loop {
        let rows = (0..n)
            .map(|_| (0..n).map(|_| random_ratfunc(rng, max_deg)).collect())
            .collect();
        let m = Mat::from_rows(rows).expect("shape");
        if !determinant(&m).expect("square").is_zero() {
            return m;
        }
    }
}

/// `U * diag(t^v) * V` with the given signed valuations.
pub fn gluing_with_valuations<R: Rng>(rng: &mut R, vals: &[i64]) -> Mat {
    let n = vals.len();
    let d = Mat::diag(vals.iter().map(|&v| RatFunc::t_pow(v)).collect());
    let u = random_unimodular(rng, n);
    let v = random_unimodular(rng, n);
    u.mul(&d).and_then(|m| m.mul(&v)).expect("square")
}

/// Orders `k` for which `k' = k` for every grading bound, so inserted
/// components keep degrees compatible with their stabilizers.
fn admissible_orders(d: &[u32]) -> Vec<u32> {
    (1..=4)
        .filter(|&k| d.iter().all(|&dk| gcd_u64(k as u64, dk as u64 - 1) == 1))
        .collect()
}

/// Random input with at most six components, up to three factors and gluing
/// valuations of absolute value at most five.
///
/// Genus-0 components get at least three branches unless they belong to a
/// two-node gadget built to be normalized and later contracted.
pub fn random_input<R: Rng>(rng: &mut R) -> DegenerationInput {
    let n = rng.gen_range(1..=3usize);
    let d: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
    let orders = admissible_orders(&d);
    let gadget = rng.gen_bool(0.4);
    let base = rng.gen_range(1..=if gadget { 5 } else { 6 });

    let mut comps: Vec<Component> = (0..base)
        .map(|id| Component {
            id,
            genus: rng.gen_range(0..=2),
        })
        .collect();
    let mut nodes: Vec<Node> = Vec::new();
    let mut next_node = 0u32;
    let mut add_node = |nodes: &mut Vec<Node>, a: u32, b: u32, rng: &mut R, persistent: bool| {
        let stab = if persistent {
            *orders.choose(rng).expect("1 is admissible")
        } else {
            rng.gen_range(1..=3)
        };
        let mut nd = Node::new(next_node, a, b, stab);
        nd.persistent = persistent;
        next_node += 1;
        nodes.push(nd);
    };
    for id in 1..base {
        let parent = rng.gen_range(0..id);
        let p = rng.gen_bool(0.6);
        add_node(&mut nodes, parent, id, rng, p);
    }
    for _ in 0..rng.gen_range(0..=2) {
        let a = rng.gen_range(0..base);
        let b = rng.gen_range(0..base);
        let p = rng.gen_bool(0.6);
        add_node(&mut nodes, a, b, rng, p);
    }
    let branches = |nodes: &[Node], c: u32| -> u32 {
        nodes
            .iter()
            .map(|nd| (nd.ends[0] == c) as u32 + (nd.ends[1] == c) as u32)
            .sum()
    };
    for c in 0..base {
        let genus = comps[c as usize].genus;
        let need = match genus {
            0 => 3,
            1 => 1,
            _ => 0,
        };
        while branches(&nodes, c) < need {
            let p = rng.gen_bool(0.5);
            add_node(&mut nodes, c, c, rng, p);
        }
    }

    let mut md = MultiDegree::zero(n, 0..base);
    for c in 0..base {
        for k in 0..n {
            md.add(k, c, &Rat::from_int(rng.gen_range(-2..=2)));
        }
    }

    let mut gluing = BTreeMap::new();
    for nd in nodes.iter().filter(|nd| nd.persistent) {
        let vals: Vec<i64> = (0..n).map(|_| rng.gen_range(-5..=5)).collect();
        gluing.insert(nd.id, gluing_with_valuations(rng, &vals));
    }

    if gadget {
        let x = rng.gen_range(0..base);
        let dd = base;
        comps.push(Component { id: dd, genus: 0 });
        let k = *orders.choose(rng).expect("nonempty");
        let q = k_prime(k, d[0]) * d[0];
        let e = Rat::new(1, (d[0] * k) as i64);
        md.deg.insert(dd, vec![Rat::zero(); n]);
        md.add(0, dd, &e);
        md.add(0, x, &-&e);
        let n1 = next_node;
        let n2 = next_node + 1;
        for (id, stab) in [(n1, k), (n2, q)] {
            let mut nd = Node::new(id, x, dd, stab);
            nd.persistent = true;
            nodes.push(nd);
            let vals = (0..n).map(|_| RatFunc::t_pow(rng.gen_range(-5..=5))).collect();
            gluing.insert(id, Mat::diag(vals));
        }
    }

    DegenerationInput {
        curve: TwistedCurve {
            components: comps,
            nodes,
            markings: vec![],
        },
        multidegree: md,
        grading: GradingSpec { d, weights: None },
        gluing,
        extra_mu: BTreeMap::new(),
        ample_degree: BTreeMap::new(),
    }
}

//! Local numerics of the (m,d)-twisted blow-up and of A-type singularities.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlowupError {
    #[error("blow-up parameters must be positive, got m={m}, d={d}")]
    NonPositive { m: u32, d: u32 },
    #[error("A-type record with a=0 or mu=0 is not valid")]
    BadSingularity,
    #[error("point is already smooth (a=1)")]
    AlreadySmooth,
    #[error("stabilizer orders differ at the two points: {0} vs {1}")]
    MuMismatch(u32, u32),
    #[error("coarse exponent {a} is not a multiple of the stabilizer order {mu}")]
    NotStackLevel { a: u64, mu: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupParams {
    pub m: u32,
    pub d: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlowupResult {
    pub m: u32,
    pub d: u32,
    pub exceptional_self_intersection: Rat,
    pub ideal_degree_on_exceptional: Rat,
    /// Order of the stabilizer at the stacky point; 1 when the exceptional is schematic.
    pub stacky_point_order: u32,
    pub schematic: bool,
    pub section_twist: i64,
}

pub fn twisted_blowup(p: BlowupParams) -> Result<BlowupResult, BlowupError> {
    if p.m == 0 || p.d == 0 {
        return Err(BlowupError::NonPositive { m: p.m, d: p.d });
    }
    let md = p.m as i64 * p.d as i64;
    Ok(BlowupResult {
        m: p.m,
        d: p.d,
        exceptional_self_intersection: Rat::new(-1, md),
        ideal_degree_on_exceptional: Rat::new(1, p.d as i64),
        stacky_point_order: p.d,
        schematic: p.d == 1,
        section_twist: -(p.m as i64),
    })
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Certified containment of `pi^a_pi * y^a_y` in the pushforward of `I^k`.
///
/// Only the lower bound `(pi^{mk}, y^{ceil(k/d)})` is known for `k > 0`, so a
/// `false` answer means "not certified", not "not contained".
pub fn pushforward_contains(p: BlowupParams, k: i64, monomial: (u64, u64)) -> bool {
    if k <= 0 {
        return true;
    }
    let k = k as u64;
    let (a_pi, a_y) = monomial;
    a_pi >= p.m as u64 * k || a_y >= ceil_div(k, p.d.max(1) as u64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MuActionReport {
    pub ell: u32,
    pub d: u32,
    pub trivial: bool,
    pub extends: bool,
    pub faithful_on_exceptional: bool,
    /// Points of the exceptional fixed by a nontrivial action.
    pub fixed_points: Vec<String>,
    pub schematic_before_quotient: bool,
    /// Every stabilizer of the quotient is cyclic of order dividing this.
    pub stabilizer_bound: u32,
    pub possible_stabilizer_orders: Vec<u32>,
}

pub fn mu_action_on_blowup(ell: u32, p: BlowupParams) -> Result<MuActionReport, BlowupError> {
    let res = twisted_blowup(p)?;
    let ell = ell.max(1);
    let trivial = ell == 1;
    let bound = ell * res.stacky_point_order;
    let fixed_points = if trivial {
        Vec::new()
    } else {
        vec!["stacky_point".to_string(), "exceptional_meets_section".to_string()]
    };
    Ok(MuActionReport {
        ell,
        d: p.d,
        trivial,
        extends: true,
        faithful_on_exceptional: !trivial,
        fixed_points,
        schematic_before_quotient: res.schematic,
        stabilizer_bound: bound,
        possible_stabilizer_orders: divisors(bound),
    })
}

pub fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|k| n % k == 0).collect()
}

/// Surface singularity `xy = z^a` with a cyclic `mu_k` structure.
///
/// `a` is the coarse exponent; `a = 1` is a smooth point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnSing {
    pub a: u64,
    pub mu: u32,
}

impl AnSing {
    pub fn new(a: u64, mu: u32) -> Result<AnSing, BlowupError> {
        if a == 0 || mu == 0 {
            return Err(BlowupError::BadSingularity);
        }
        Ok(AnSing { a, mu })
    }

    /// Record for a point that is `A_{m-1}` on the stack with stabilizer `mu_k`.
    pub fn from_stack(m: u64, k: u32) -> AnSing {
        AnSing {
            a: m.max(1) * k.max(1) as u64,
            mu: k.max(1),
        }
    }

    pub fn smooth(mu: u32) -> AnSing {
        AnSing { a: 1, mu: mu.max(1) }
    }

    pub fn is_smooth(&self) -> bool {
        self.a <= 1
    }

    /// Exponent on the stack (`a / mu`), if `a` is a multiple of `mu`.
    pub fn stack_exponent(&self) -> Option<u64> {
        (self.a % self.mu as u64 == 0).then(|| self.a / self.mu as u64)
    }
}

/// One blow-up of the singular point: `xy = z^a` becomes `xy = z^{a-2}`.
pub fn an_blowup_step(s: AnSing) -> Result<(AnSing, u32), BlowupError> {
    if s.a == 0 || s.mu == 0 {
        return Err(BlowupError::BadSingularity);
    }
    if s.a == 1 {
        return Err(BlowupError::AlreadySmooth);
    }
    let count = if s.a >= 3 { 2 } else { 1 };
    let a = if s.a > 2 { s.a - 2 } else { 1 };
    Ok((AnSing { a, mu: s.mu }, count))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolveStep {
    pub a: u64,
    pub exceptional: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Resolution {
    pub iterations: u64,
    pub total_exceptional: u64,
    pub trace: Vec<ResolveStep>,
}

/// Iterate [`an_blowup_step`] until smooth.
pub fn resolve_an(s: AnSing) -> Result<Resolution, BlowupError> {
    if s.a == 0 || s.mu == 0 {
        return Err(BlowupError::BadSingularity);
    }
    let mut cur = s;
    let mut res = Resolution {
        iterations: 0,
        total_exceptional: 0,
        trace: Vec::new(),
    };
    while !cur.is_smooth() {
        let (next, count) = an_blowup_step(cur)?;
        res.iterations += 1;
        res.total_exceptional += count as u64;
        res.trace.push(ResolveStep {
            a: next.a,
            exceptional: count,
        });
        cur = next;
    }
    Ok(res)
}

/// Image point after contracting a `P^1` through `p` and `q`.
///
/// Both inputs are coarse records whose exponents are multiples of the common
/// order `k`; on the stack they are `A_{m-1}` and `A_{n-1}` with `m = p.a/k`
/// and `n = q.a/k`. The result is the coarse `A_{k(m+n)-1}`.
pub fn contract_singularity(p: AnSing, q: AnSing) -> Result<AnSing, BlowupError> {
    if p.mu != q.mu {
        return Err(BlowupError::MuMismatch(p.mu, q.mu));
    }
    let k = p.mu;
    let m = p.stack_exponent().ok_or(BlowupError::NotStackLevel { a: p.a, mu: k })?;
    let n = q.stack_exponent().ok_or(BlowupError::NotStackLevel { a: q.a, mu: k })?;
    Ok(AnSing {
        a: k as u64 * (m + n),
        mu: k,
    })
}

/// `deg(omega_C(Diff))` for a `P^1` through quotient points of order `km` and `kn`.
pub fn different_degree(km: u64, kn: u64) -> Rat {
    let km = km.max(1) as i64;
    let kn = kn.max(1) as i64;
    Rat::from_int(-2) + (Rat::one() - Rat::new(1, km)) + (Rat::one() - Rat::new(1, kn))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blowup_examples() {
        let r = twisted_blowup(BlowupParams { m: 2, d: 3 }).unwrap();
        assert_eq!(r.exceptional_self_intersection, Rat::new(-1, 6));
        assert_eq!(r.ideal_degree_on_exceptional, Rat::new(1, 3));
        assert_eq!((r.stacky_point_order, r.section_twist, r.schematic), (3, -2, false));

        let r = twisted_blowup(BlowupParams { m: 1, d: 1 }).unwrap();
        assert_eq!(r.exceptional_self_intersection, Rat::from_int(-1));
        assert_eq!(r.ideal_degree_on_exceptional, Rat::one());
        assert!(r.schematic);
        assert_eq!(r.section_twist, -1);

        let r = twisted_blowup(BlowupParams { m: 5, d: 2 }).unwrap();
        assert_eq!(r.exceptional_self_intersection, Rat::new(-1, 10));
        assert_eq!(r.ideal_degree_on_exceptional, Rat::new(1, 2));
        assert_eq!((r.stacky_point_order, r.section_twist), (2, -5));

        assert!(twisted_blowup(BlowupParams { m: 0, d: 2 }).is_err());
        assert!(twisted_blowup(BlowupParams { m: 2, d: 0 }).is_err());
    }

    #[test]
    fn pushforward_examples() {
        assert!(pushforward_contains(BlowupParams { m: 2, d: 3 }, 0, (0, 0)));
        assert!(pushforward_contains(BlowupParams { m: 2, d: 3 }, -4, (0, 0)));
        assert!(pushforward_contains(BlowupParams { m: 1, d: 3 }, 3, (0, 1)));
        assert!(!pushforward_contains(BlowupParams { m: 1, d: 3 }, 3, (2, 0)));
        assert!(pushforward_contains(BlowupParams { m: 1, d: 3 }, 3, (3, 0)));
    }

    #[test]
    fn mu_action_examples() {
        let r = mu_action_on_blowup(1, BlowupParams { m: 1, d: 2 }).unwrap();
        assert!(r.trivial && r.fixed_points.is_empty());
        assert_eq!(r.stabilizer_bound, 2);

        let r = mu_action_on_blowup(2, BlowupParams { m: 1, d: 2 }).unwrap();
        assert_eq!(r.fixed_points.len(), 2);
        assert_eq!(r.possible_stabilizer_orders, vec![1, 2, 4]);

        let r = mu_action_on_blowup(3, BlowupParams { m: 4, d: 1 }).unwrap();
        assert!(r.schematic_before_quotient);
        assert_eq!(r.possible_stabilizer_orders, vec![1, 3]);
    }

    #[test]
    fn an_steps() {
        assert_eq!(
            an_blowup_step(AnSing { a: 2, mu: 1 }).unwrap(),
            (AnSing { a: 1, mu: 1 }, 1)
        );
        assert_eq!(
            an_blowup_step(AnSing { a: 3, mu: 2 }).unwrap(),
            (AnSing { a: 1, mu: 2 }, 2)
        );
        assert_eq!(
            an_blowup_step(AnSing { a: 6, mu: 1 }).unwrap(),
            (AnSing { a: 4, mu: 1 }, 2)
        );
        assert_eq!(an_blowup_step(AnSing { a: 1, mu: 1 }), Err(BlowupError::AlreadySmooth));
    }

    #[test]
    fn resolve_examples() {
        let r = resolve_an(AnSing { a: 2, mu: 1 }).unwrap();
        assert_eq!((r.iterations, r.total_exceptional), (1, 1));
        let r = resolve_an(AnSing { a: 4, mu: 1 }).unwrap();
        assert_eq!((r.iterations, r.total_exceptional), (2, 3));
        let r = resolve_an(AnSing { a: 1, mu: 1 }).unwrap();
        assert_eq!((r.iterations, r.total_exceptional), (0, 0));
    }

    #[test]
    fn contraction_examples() {
        let c = |m, n, k| contract_singularity(AnSing::from_stack(m, k), AnSing::from_stack(n, k)).unwrap();
        assert_eq!(c(1, 1, 1).a, 2);
        assert_eq!(c(1, 1, 2).a, 4);
        assert_eq!(c(2, 3, 2), AnSing { a: 10, mu: 2 });
        assert_eq!(
            contract_singularity(AnSing::from_stack(1, 2), AnSing::from_stack(1, 3)),
            Err(BlowupError::MuMismatch(2, 3))
        );
        assert!(contract_singularity(AnSing { a: 3, mu: 2 }, AnSing { a: 2, mu: 2 }).is_err());
    }

    #[test]
    fn different_examples() {
        assert_eq!(different_degree(2, 2), Rat::from_int(-1));
        assert_eq!(different_degree(1, 1), Rat::from_int(-2));
        assert_eq!(different_degree(2, 3), Rat::new(-5, 6));
    }
}

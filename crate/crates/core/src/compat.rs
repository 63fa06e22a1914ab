//! Formal exactness of operator complexes at jet points, cokernel ranks for
//! the compatibility-operator construction, and k-line vanishing ranges.

use crate::error::{Error, Result};
use crate::jet::{JetContext, JetPoint};
use crate::op::CDiffOp;
use crate::spencer::{fiber_dim, prolongation, required_point_order};

/// `P₀ → P₁ → … → P_N` with declared orders; `terminal` appends `→ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorComplex {
    ops: Vec<CDiffOp>,
    orders: Vec<usize>,
    terminal: bool,
}

impl OperatorComplex {
    /// Checks adjacent sizes, declared orders and `Δ_{i+1} ∘ Δ_i = 0`.
    pub fn new(ctx: &JetContext, ops: Vec<CDiffOp>, orders: Vec<usize>, terminal: bool) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidComplex("a complex needs at least one operator".into()));
        }
        if ops.len() != orders.len() {
            return Err(Error::InvalidComplex("one declared order per operator is required".into()));
        }
        for (i, (op, &k)) in ops.iter().zip(&orders).enumerate() {
            if op.order() > k {
                return Err(Error::InvalidComplex(format!(
                    "operator {} has order {} above its declared order {}",
                    i + 1,
                    op.order(),
                    k
                )));
            }
        }
        for i in 0..ops.len() - 1 {
            let (a, b) = (&ops[i], &ops[i + 1]);
            if a.rows() != b.cols() {
                return Err(Error::InvalidComplex(format!(
                    "operator {} has {} rows but operator {} has {} columns",
                    i + 1,
                    a.rows(),
                    i + 2,
                    b.cols()
                )));
            }
            if !b.compose(ctx, a)?.is_zero() {
                return Err(Error::InvalidComplex(format!(
                    "operator {} composed with operator {} is not zero",
                    i + 2,
                    i + 1
                )));
            }
        }
        Ok(OperatorComplex { ops, orders, terminal })
    }

    pub fn ops(&self) -> &[CDiffOp] {
        &self.ops
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    /// Module ranks `r₀, r₁, …, r_N`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut r = vec![self.ops[0].cols()];
        r.extend(self.ops.iter().map(CDiffOp::rows));
        r
    }

    /// Positions checked: each interior module, plus the last one when the
    /// complex is terminal.
    pub fn positions(&self) -> Vec<usize> {
        let last = if self.terminal { self.ops.len() } else { self.ops.len() - 1 };
        (1..=last).collect()
    }

    /// Point order needed to check every position up to `l_max`.
    pub fn required_point_order(&self, ctx: &JetContext, l_max: usize) -> usize {
        let mut need = 0;
        for (m, op) in self.ops.iter().enumerate() {
            let next = self.orders.get(m + 1).copied().unwrap_or(0);
            need = need.max(required_point_order(ctx, op, next + l_max));
        }
        need
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessEntry {
    pub position: usize,
    pub l: usize,
    /// Fiber dimensions of the three jet spaces.
    pub dims: [usize; 3],
    /// Ranks of the incoming and outgoing maps.
    pub ranks: [usize; 2],
    /// dim ker(outgoing) − rank(incoming).
    pub defect: usize,
}

impl ExactnessEntry {
    pub fn is_exact(&self) -> bool {
        self.defect == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub l_max: usize,
    pub entries: Vec<ExactnessEntry>,
}

impl ExactnessReport {
    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(ExactnessEntry::is_exact)
    }

    pub fn first_defect(&self) -> Option<&ExactnessEntry> {
        self.entries.iter().find(|e| !e.is_exact())
    }
}

/// Ranks of the two maps at position `m` and prolongation `l`:
/// `J̄^{k_{m−1}+k_m+l}(P_{m−1}) → J̄^{k_m+l}(P_m) → J̄^l(P_{m+1})`.
fn position_ranks(
    ctx: &JetContext,
    c: &OperatorComplex,
    m: usize,
    l: usize,
    pt: &JetPoint,
) -> Result<([usize; 3], [usize; 2])> {
    let n = ctx.n();
    let ranks = c.ranks();
    let k_out = c.orders.get(m).copied().unwrap_or(0);
    let k_in = c.orders[m - 1];
    let first = prolongation(ctx, &c.ops[m - 1], k_in, k_out + l, pt)?;
    let (second_rank, third) = if m < c.ops.len() {
        (prolongation(ctx, &c.ops[m], k_out, l, pt)?.rank(), fiber_dim(n, ranks[m + 1], l))
    } else {
        (0, 0)
    };
    let dims = [first.domain_dim(), first.codomain_dim(), third];
    Ok((dims, [first.rank(), second_rank]))
}

fn entry(position: usize, l: usize, dims: [usize; 3], ranks: [usize; 2]) -> Result<ExactnessEntry> {
    let kernel = dims[1] - ranks[1];
    if ranks[0] > kernel {
        return Err(Error::InvalidComplex(format!(
            "image exceeds kernel at position {} (l = {}); the sequence is not a complex at this point",
            position, l
        )));
    }
    Ok(ExactnessEntry { position, l, dims, ranks, defect: kernel - ranks[0] })
}

pub fn check_formal_exactness(
    ctx: &JetContext,
    c: &OperatorComplex,
    l_max: usize,
    pt: &JetPoint,
) -> Result<ExactnessReport> {
    let mut entries = Vec::new();
    for m in c.positions() {
        for l in 0..=l_max {
            let (dims, ranks) = position_ranks(ctx, c, m, l, pt)?;
            entries.push(entry(m, l, dims, ranks)?);
        }
    }
    Ok(ExactnessReport { l_max, entries })
}

/// Uses the largest rank of each map over the sample; differing ranks are
/// reported as warnings.
pub fn check_formal_exactness_generic(
    ctx: &JetContext,
    c: &OperatorComplex,
    l_max: usize,
    points: &[JetPoint],
) -> Result<(ExactnessReport, Vec<String>)> {
    if points.is_empty() {
        return Err(Error::Precondition("no sample points".into()));
    }
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    for m in c.positions() {
        for l in 0..=l_max {
            let mut best: Option<([usize; 3], [usize; 2])> = None;
            for pt in points {
                let (dims, ranks) = position_ranks(ctx, c, m, l, pt)?;
                best = Some(match best {
                    None => (dims, ranks),
                    Some((d, r)) => {
                        if r != ranks {
                            warnings.push(format!(
                                "warning: fiber ranks differ between sample points at position {}, l = {}",
                                m, l
                            ));
                        }
                        (d, [r[0].max(ranks[0]), r[1].max(ranks[1])])
                    }
                });
            }
            let (dims, ranks) = best.expect("nonempty sample");
            entries.push(entry(m, l, dims, ranks)?);
        }
    }
    Ok((ExactnessReport { l_max, entries }, warnings))
}

/// dim coker of J̄^{k+k₁}(P₀) → J̄^{k₁}(P₁), after checking that the order-0
/// map J̄^k(P₀) → J̄⁰(P₁) is onto.
pub fn cokernel_rank(ctx: &JetContext, op: &CDiffOp, k1: usize, pt: &JetPoint) -> Result<usize> {
    let k = op.order();
    let base = prolongation(ctx, op, k, 0, pt)?;
    if base.rank() != base.codomain_dim() {
        return Err(Error::Precondition(format!(
            "the order-0 fiber map has rank {} but the target fiber has dimension {}; it must be onto",
            base.rank(),
            base.codomain_dim()
        )));
    }
    let f = prolongation(ctx, op, k, k1, pt)?;
    Ok(f.codomain_dim() - f.rank())
}

/// Cokernel rank at the sample point where the prolonged map has largest rank.
pub fn cokernel_rank_generic(ctx: &JetContext, op: &CDiffOp, k1: usize, points: &[JetPoint]) -> Result<usize> {
    let mut best: Option<usize> = None;
    for pt in points {
        let r = cokernel_rank(ctx, op, k1, pt)?;
        best = Some(best.map_or(r, |b: usize| b.min(r)));
    }
    best.ok_or_else(|| Error::Precondition("no sample points".into()))
}

/// Vanishing ranges predicted for a compatibility complex of length `k`
/// over `n` independent variables.
pub fn kline_report(k: usize, n: usize) -> Vec<String> {
    assert!(k >= 2, "complex length must be at least 2");
    let mut lines = Vec::new();
    if k == 2 {
        lines.push("theorem: two-line".to_string());
    } else {
        lines.push(format!("theorem: {}-line", k));
    }
    if n >= k {
        lines.push(format!("E1^{{p,q}} = 0 for p > 0 and q <= {}", n - k));
    } else {
        lines.push(format!("E1^{{p,q}}: no vanishing range (n - k = {} < 0)", n as i64 - k as i64));
    }
    lines.push(format!("H^i(Dv(C^p Lambda)) = 0 for i >= {}", k));
    if k == 2 {
        if n >= 1 {
            lines.push(format!("E1^{{p,{}}} is contained in ker(l_F^*) for p > 0", n - 1));
        }
        lines.push(format!("E1^{{p,{}}} is contained in coker(l_F^*) for p > 0", n));
        lines.push("H^0(Dv(C^p Lambda)) = ker(l_F)".to_string());
        lines.push("H^1(Dv(C^p Lambda)) = coker(l_F)".to_string());
    }
    lines
}

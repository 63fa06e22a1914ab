//! Symbols, prolongations between jet fibers and horizontal Spencer
//! δ-cohomology at a jet point.
//!
//! Jet fibers are written in derivative coordinates `w^j_ρ` (the value of
//! `u^j_ρ`), ordered by `ρ` ascending (order, then lexicographic) and then
//! by component. In these coordinates the δ-operator shifts
//! `w_{ρ} ↦ Σ_{i∈ρ} dx_i ⊗ w_{ρ−i}`, which is the polynomial de Rham
//! differential in the divided-power basis.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::expr::{binomial, fmt_rational, DiffPoly, MultiIndex, Rational, Vars};
use crate::forms::{increasing_tuples, wedge_sign};
use crate::jet::{JetContext, JetPoint};
use crate::linalg::Matrix;
use crate::op::CDiffOp;

/// dim of the fiber of J̄^r(P) for a module of the given rank.
pub fn fiber_dim(n: usize, rank: usize, r: usize) -> usize {
    let c: u64 = binomial((n + r) as u32, n as u32).try_into().expect("fiber dimension fits");
    rank * c as usize
}

/// Basis `(ρ, j)` of the fiber of J̄^r(P).
pub fn fiber_basis(n: usize, rank: usize, r: usize) -> Vec<(MultiIndex, usize)> {
    MultiIndex::up_to_order(n, r).into_iter().flat_map(|rho| (0..rank).map(move |j| (rho.clone(), j))).collect()
}

fn index_of(n: usize, r: usize) -> HashMap<MultiIndex, usize> {
    MultiIndex::up_to_order(n, r).into_iter().enumerate().map(|(k, s)| (s, k)).collect()
}

/// A linear map J̄^{source_order}(P₀) → J̄^{target_order}(P₁) at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberMap {
    pub matrix: Matrix,
    pub source_rank: usize,
    pub source_order: usize,
    pub target_rank: usize,
    pub target_order: usize,
}

impl FiberMap {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// Total derivatives `D_α a` for `|α| ≤ l`, keyed by α.
fn coefficient_jets(ctx: &JetContext, a: &DiffPoly, l: usize) -> BTreeMap<MultiIndex, DiffPoly> {
    let mut out = BTreeMap::new();
    out.insert(MultiIndex::empty(), ctx.restrict(a));
    for alpha in MultiIndex::up_to_order(ctx.n(), l) {
        if alpha.is_empty() {
            continue;
        }
        let last = *alpha.indices().last().expect("nonempty");
        let parent = alpha.checked_sub(&MultiIndex::single(last)).expect("parent index");
        let d = ctx.total_derivative(last, &out[&parent]);
        out.insert(alpha, d);
    }
    out
}

/// Jet order a point needs so that the `l`-th prolongation can be evaluated.
pub fn required_point_order(ctx: &JetContext, op: &CDiffOp, l: usize) -> usize {
    op.entries()
        .iter()
        .flat_map(|e| e.terms().values())
        .flat_map(|a| coefficient_jets(ctx, a, l).into_values().map(|d| d.order()).collect::<Vec<_>>())
        .max()
        .unwrap_or(0)
}

/// The prolonged operator J̄^{k+l}(P₀) → J̄^l(P₁) at `pt`, where `k` is a
/// declared order (at least the actual order):
/// `D_τ(a D_σ w) = Σ_{α+β=τ} C(τ,α) D_α(a) w_{β+σ}`.
pub fn prolongation(ctx: &JetContext, op: &CDiffOp, k: usize, l: usize, pt: &JetPoint) -> Result<FiberMap> {
    if op.order() > k {
        return Err(Error::Precondition(format!(
            "declared order {} is below the operator order {}",
            k,
            op.order()
        )));
    }
    let n = ctx.n();
    let (r0, r1) = (op.cols(), op.rows());
    let mut jets = Vec::new();
    let mut required = 0;
    for s in 0..r1 {
        for j in 0..r0 {
            for (sigma, a) in op.entry(s, j).terms() {
                let dj = coefficient_jets(ctx, a, l);
                required = required.max(dj.values().map(DiffPoly::order).max().unwrap_or(0));
                jets.push((s, j, sigma.clone(), dj));
            }
        }
    }
    if required > pt.order_bound() {
        return Err(Error::InsufficientPoint { required, available: pt.order_bound() });
    }
    let src = index_of(n, k + l);
    let taus = MultiIndex::up_to_order(n, l);
    let mut matrix = Matrix::zeros(r1 * taus.len(), r0 * src.len());
    for (s, j, sigma, dj) in &jets {
        let mut values: BTreeMap<&MultiIndex, Rational> = BTreeMap::new();
        for (alpha, d) in dj {
            values.insert(alpha, pt.evaluate(d)?);
        }
        for (t, tau) in taus.iter().enumerate() {
            for (alpha, beta, w) in tau.splits() {
                let v = &values[&alpha];
                if v.is_zero() {
                    continue;
                }
                let col = src[&beta.merge(sigma)] * r0 + j;
                matrix.add_at(t * r1 + s, col, &(v * Rational::from_integer(w)));
            }
        }
    }
    Ok(FiberMap { matrix, source_rank: r0, source_order: k + l, target_rank: r1, target_order: l })
}

/// [`prolongation`] with the operator's own order.
pub fn fiber_map(ctx: &JetContext, op: &CDiffOp, l: usize, pt: &JetPoint) -> Result<FiberMap> {
    prolongation(ctx, op, op.order(), l, pt)
}

/// Matrix of homogeneous polynomials in ξ₁..ξ_n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolMatrix {
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    pub degree: usize,
    /// Row-major; each entry maps the exponent multi-index to its coefficient.
    pub entries: Vec<BTreeMap<MultiIndex, Rational>>,
}

impl SymbolMatrix {
    pub fn entry(&self, s: usize, j: usize) -> &BTreeMap<MultiIndex, Rational> {
        &self.entries[s * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(BTreeMap::is_empty)
    }

    /// Matrix product of polynomial matrices.
    pub fn mul(&self, other: &SymbolMatrix) -> SymbolMatrix {
        assert_eq!(self.cols, other.rows, "symbol product dimension mismatch");
        let mut entries = Vec::new();
        for s in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
                for k in 0..self.cols {
                    for (a, x) in self.entry(s, k) {
                        for (b, y) in other.entry(k, j) {
                            let e = acc.entry(a.merge(b)).or_insert_with(Rational::zero);
                            *e += x * y;
                        }
                    }
                }
                acc.retain(|_, v| !v.is_zero());
                entries.push(acc);
            }
        }
        SymbolMatrix { n: self.n, rows: self.rows, cols: other.cols, degree: self.degree + other.degree, entries }
    }

    fn format_entry(e: &BTreeMap<MultiIndex, Rational>, vars: &Vars) -> String {
        let mut pieces = Vec::new();
        for (sigma, c) in e.iter().rev() {
            let mono: Vec<String> = sigma
                .counts(vars.n())
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    let name = format!("xi_{}", vars.independents[i]);
                    if k == 1 {
                        name
                    } else {
                        format!("{}^{}", name, k)
                    }
                })
                .collect();
            let mono = mono.join("*");
            let abs = c.abs();
            let body = match (mono.is_empty(), abs.is_one()) {
                (true, _) => fmt_rational(&abs),
                (false, true) => mono,
                (false, false) => format!("{}*{}", fmt_rational(&abs), mono),
            };
            pieces.push((c.is_negative(), body));
        }
        crate::expr::join_signed(&pieces)
    }

    /// One row per line, entries joined by ` ; `.
    pub fn format(&self, vars: &Vars) -> String {
        let mut out = String::new();
        for s in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| Self::format_entry(self.entry(s, j), vars)).collect();
            let _ = writeln!(out, "{}", row.join(" ; "));
        }
        out
    }
}

/// Degree-`k` symbol: entry `(s, j)` is `Σ_{|σ|=k} a^σ_{sj}(pt) ξ^σ`.
pub fn symbol_of_degree(op: &CDiffOp, k: usize, pt: &JetPoint, n: usize) -> Result<SymbolMatrix> {
    let mut entries = Vec::new();
    for e in op.entries() {
        let mut m = BTreeMap::new();
        for (sigma, a) in e.terms() {
            if sigma.order() == k {
                let v = pt.evaluate(a)?;
                if !v.is_zero() {
                    m.insert(sigma.clone(), v);
                }
            }
        }
        entries.push(m);
    }
    Ok(SymbolMatrix { n, rows: op.rows(), cols: op.cols(), degree: k, entries })
}

/// The principal symbol at `pt` (lower-order terms dropped).
pub fn symbol(ctx: &JetContext, op: &CDiffOp, pt: &JetPoint) -> Result<SymbolMatrix> {
    let restricted = CDiffOp::from_fn(op.rows(), op.cols(), |s, j| {
        crate::op::ScalarOp::from_terms(op.entry(s, j).terms().iter().map(|(k, a)| (k.clone(), ctx.restrict(a))))
    });
    symbol_of_degree(&restricted, op.order(), pt, ctx.n())
}

/// The symbol acting on derivative coordinates,
/// `S^r ⊗ P₀ → S^{r−k} ⊗ P₁`, `(w)_{τ,s} = Σ_σ a^σ_{sj} w_{τ+σ, j}`.
pub fn symbol_map(sym: &SymbolMatrix, r: usize) -> Matrix {
    let n = sym.n;
    let src: HashMap<MultiIndex, usize> =
        MultiIndex::all_of_order(n, r).into_iter().enumerate().map(|(k, s)| (s, k)).collect();
    let cols = src.len() * sym.cols;
    if r < sym.degree {
        return Matrix::zeros(0, cols);
    }
    let taus = MultiIndex::all_of_order(n, r - sym.degree);
    let mut m = Matrix::zeros(taus.len() * sym.rows, cols);
    for (t, tau) in taus.iter().enumerate() {
        for s in 0..sym.rows {
            for j in 0..sym.cols {
                for (sigma, c) in sym.entry(s, j) {
                    m.add_at(t * sym.rows + s, src[&tau.merge(sigma)] * sym.cols + j, c);
                }
            }
        }
    }
    m
}

/// δ̄ : Λ^s ⊗ S^r ⊗ P → Λ^{s+1} ⊗ S^{r−1} ⊗ P in the bases `(I, ρ, j)`.
pub fn delta_map(n: usize, rank: usize, r: usize, s: usize) -> Result<Matrix> {
    if r < 1 || s >= n {
        return Err(Error::OutOfRange(format!(
            "delta map needs symmetric degree >= 1 and exterior degree < n (got r = {}, s = {}, n = {})",
            r, s, n
        )));
    }
    let src_i = increasing_tuples(n, s);
    let dst_i: HashMap<Vec<usize>, usize> =
        increasing_tuples(n, s + 1).into_iter().enumerate().map(|(k, t)| (t, k)).collect();
    let src_r = MultiIndex::all_of_order(n, r);
    let dst_r: HashMap<MultiIndex, usize> =
        MultiIndex::all_of_order(n, r - 1).into_iter().enumerate().map(|(k, t)| (t, k)).collect();
    let sign_s: i64 = if s % 2 == 0 { 1 } else { -1 };
    let mut m = Matrix::zeros(dst_i.len() * dst_r.len() * rank, src_i.len() * src_r.len() * rank);
    for (a, big_i) in src_i.iter().enumerate() {
        for (b, rho) in src_r.iter().enumerate() {
            let mut distinct = rho.indices().to_vec();
            distinct.dedup();
            for i in distinct {
                let Some((big_j, sg)) = wedge_sign(big_i, &[i]) else { continue };
                let lower = rho.checked_sub(&MultiIndex::single(i)).expect("i occurs in rho");
                let row0 = (dst_i[&big_j] * dst_r.len() + dst_r[&lower]) * rank;
                let col0 = (a * src_r.len() + b) * rank;
                for j in 0..rank {
                    m.add_at(row0 + j, col0 + j, &Rational::from_integer(BigInt::from(sign_s * sg)));
                }
            }
        }
    }
    Ok(m)
}

/// δ-cohomology table: `dims[l][i]` is `dim H̄^{k+l,i}` or `None` for slots
/// whose symmetric degree `k + l − i` lies below `max(k, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpencerReport {
    pub n: usize,
    pub order: usize,
    pub l_max: usize,
    pub dims: Vec<Vec<Option<usize>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Involutivity {
    UpTo(usize),
    Failure { l: usize, i: usize, dim: usize },
}

impl SpencerReport {
    pub fn first_failure(&self) -> Option<(usize, usize, usize)> {
        for (l, row) in self.dims.iter().enumerate() {
            for (i, d) in row.iter().enumerate() {
                if let Some(d) = d {
                    if *d != 0 {
                        return Some((l, i, *d));
                    }
                }
            }
        }
        None
    }

    pub fn involutivity(&self) -> Involutivity {
        match self.first_failure() {
            None => Involutivity::UpTo(self.l_max),
            Some((l, i, dim)) => Involutivity::Failure { l, i, dim },
        }
    }

    /// Rows `l`, columns `i`; `-` marks slots outside the computed range.
    pub fn table(&self) -> String {
        let mut out = String::from("l\\i");
        for i in 0..=self.n {
            let _ = write!(out, " {:>4}", i);
        }
        out.push('\n');
        for (l, row) in self.dims.iter().enumerate() {
            let _ = write!(out, "{:<3}", l);
            for d in row {
                match d {
                    Some(d) => {
                        let _ = write!(out, " {:>4}", d);
                    }
                    None => out.push_str("    -"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Columns span `Λ^i ⊗ K` for a kernel basis `K ⊂ S^r ⊗ P`.
fn exterior_block(n: usize, i: usize, fiber: usize, kernel: &[Vec<Rational>]) -> Matrix {
    let blocks = increasing_tuples(n, i).len();
    let mut m = Matrix::zeros(blocks * fiber, blocks * kernel.len());
    for b in 0..blocks {
        for (c, v) in kernel.iter().enumerate() {
            for (r, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    m.set(b * fiber + r, b * kernel.len() + c, x.clone());
                }
            }
        }
    }
    m
}

/// Spencer δ-cohomology of `g^r = ker σ_r` for `l = 0..=l_max`.
pub fn spencer_from_symbol(sym: &SymbolMatrix, l_max: usize) -> SpencerReport {
    let n = sym.n;
    let k = sym.degree;
    let rank = sym.cols;
    let mut kernels: HashMap<usize, Vec<Vec<Rational>>> = HashMap::new();
    let mut kernel = |r: usize| -> Vec<Vec<Rational>> {
        kernels.entry(r).or_insert_with(|| symbol_map(sym, r).kernel()).clone()
    };
    let mut dims = Vec::new();
    for l in 0..=l_max {
        let mut row = Vec::new();
        for i in 0..=n {
            let r = (k + l) as isize - i as isize;
            if r < k.max(1) as isize {
                row.push(None);
                continue;
            }
            let r = r as usize;
            let g = kernel(r);
            let fiber_r = MultiIndex::all_of_order(n, r).len() * rank;
            let w_dim = increasing_tuples(n, i).len() * g.len();
            let out_rank = if i < n && !g.is_empty() {
                let d = delta_map(n, rank, r, i).expect("valid degrees");
                d.mul(&exterior_block(n, i, fiber_r, &g)).rank()
            } else {
                0
            };
            let in_rank = if i >= 1 {
                let g_up = kernel(r + 1);
                if g_up.is_empty() {
                    0
                } else {
                    let fiber_up = MultiIndex::all_of_order(n, r + 1).len() * rank;
                    let d = delta_map(n, rank, r + 1, i - 1).expect("valid degrees");
                    d.mul(&exterior_block(n, i - 1, fiber_up, &g_up)).rank()
                }
            } else {
                0
            };
            row.push(Some(w_dim - out_rank - in_rank));
        }
        dims.push(row);
    }
    SpencerReport { n, order: k, l_max, dims }
}

pub fn spencer_cohomology(ctx: &JetContext, op: &CDiffOp, l_max: usize, pt: &JetPoint) -> Result<SpencerReport> {
    Ok(spencer_from_symbol(&symbol(ctx, op, pt)?, l_max))
}

/// Runs at each point and keeps the table from the point where the symbol
/// maps have the largest total rank; disagreements are reported as warnings.
pub fn spencer_cohomology_generic(
    ctx: &JetContext,
    op: &CDiffOp,
    l_max: usize,
    points: &[JetPoint],
) -> Result<(SpencerReport, Vec<String>)> {
    let mut best: Option<(usize, SpencerReport)> = None;
    let mut warnings = Vec::new();
    for (idx, pt) in points.iter().enumerate() {
        let sym = symbol(ctx, op, pt)?;
        let k = sym.degree;
        let score: usize = (k..=k + l_max + 1).map(|r| symbol_map(&sym, r).rank()).sum();
        let report = spencer_from_symbol(&sym, l_max);
        match &best {
            None => best = Some((score, report)),
            Some((s, prev)) => {
                if *s != score || *prev != report {
                    warnings.push(format!(
                        "warning: point {} gives different symbol ranks or cohomology; keeping the highest-rank sample",
                        idx + 1
                    ));
                }
                if score > *s {
                    best = Some((score, report));
                }
            }
        }
    }
    let (_, report) = best.ok_or_else(|| Error::Precondition("no sample points".into()))?;
    Ok((report, warnings))
}

pub fn is_involutive(ctx: &JetContext, op: &CDiffOp, l_max: usize, pt: &JetPoint) -> Result<Involutivity> {
    Ok(spencer_cohomology(ctx, op, l_max, pt)?.involutivity())
}

/// `q±(θ) = (θ₁^k + … + θ_p^k) ± (θ₁ + … + θ_p)^k`, keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoLinePolynomial {
    pub k: u32,
    pub p: usize,
    pub plus: bool,
    pub coeffs: BTreeMap<Vec<u32>, BigInt>,
}

impl TwoLinePolynomial {
    pub fn is_nonzero(&self) -> bool {
        !self.coeffs.is_empty()
    }

    /// Terms in descending lexicographic exponent order.
    pub fn format(&self) -> String {
        let mut pieces = Vec::new();
        for (e, c) in self.coeffs.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| if x == 1 { format!("theta{}", i + 1) } else { format!("theta{}^{}", i + 1, x) })
                .collect();
            let mono = mono.join("*");
            let abs = c.abs();
            let body = match (mono.is_empty(), abs.is_one()) {
                (true, _) => abs.to_string(),
                (false, true) => mono,
                (false, false) => format!("{}*{}", abs, mono),
            };
            pieces.push((c.is_negative(), body));
        }
        crate::expr::join_signed(&pieces)
    }
}

fn compositions(p: usize, k: u32) -> Vec<Vec<u32>> {
    if p == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in compositions(p - 1, k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn two_line_polynomial(k: u32, p: usize, plus: bool) -> TwoLinePolynomial {
    assert!(k >= 1 && p >= 1, "two-line polynomial needs k >= 1 and p >= 1");
    let fact = |m: u32| (1..=m).fold(BigInt::one(), |acc, x| acc * BigInt::from(x));
    let mut coeffs: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
    for i in 0..p {
        let mut e = vec![0; p];
        e[i] = k;
        *coeffs.entry(e).or_default() += 1;
    }
    for e in compositions(p, k) {
        let mult = e.iter().fold(fact(k), |acc, &x| acc / fact(x));
        let c = coeffs.entry(e).or_default();
        if plus {
            *c += mult;
        } else {
            *c -= mult;
        }
    }
    coeffs.retain(|_, c| !c.is_zero());
    TwoLinePolynomial { k, p, plus, coeffs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, Vars};
    use crate::forms::dbar_operator;

    fn ctx2() -> JetContext {
        JetContext::free(Vars::new(&["x", "t"], &["u"], &[])).unwrap()
    }

    #[test]
    fn fiber_dims() {
        assert_eq!(fiber_dim(2, 1, 2), 6);
        assert_eq!(fiber_basis(2, 2, 1).len(), 6);
    }

    #[test]
    fn dx_projection_at_order_zero() {
        let c = ctx2();
        let pt = JetPoint::from_seed(&c, 1, 0);
        let dx = CDiffOp::parse("D_x", c.vars()).unwrap();
        let f = fiber_map(&c, &dx, 0, &pt).unwrap();
        assert_eq!((f.codomain_dim(), f.domain_dim()), (1, 3));
        assert_eq!(f.matrix.row(0), &[int(0), int(1), int(0)]);
    }

    #[test]
    fn gradient_prolongation_rank() {
        let c = ctx2();
        let pt = JetPoint::from_seed(&c, 1, 0);
        let f = fiber_map(&c, &dbar_operator(2, 0), 1, &pt).unwrap();
        assert_eq!((f.codomain_dim(), f.domain_dim()), (6, 6));
        assert_eq!(f.rank(), 5);
    }

    #[test]
    fn insufficient_point_is_reported() {
        let c = ctx2();
        let pt = JetPoint::from_seed(&c, 0, 0);
        let op = CDiffOp::parse("u_x*D_x", c.vars()).unwrap();
        assert!(matches!(fiber_map(&c, &op, 1, &pt), Err(Error::InsufficientPoint { required: 2, available: 0 })));
    }

    #[test]
    fn symbols() {
        let c = ctx2();
        let pt = JetPoint::from_seed(&c, 2, 1);
        let s = symbol(&c, &CDiffOp::parse("D_{x,x}", c.vars()).unwrap(), &pt).unwrap();
        assert_eq!(s.format(c.vars()), "xi_x^2\n");
        let l = CDiffOp::parse("D_t - u*D_x - u_x - D_{x,x,x}", c.vars()).unwrap();
        assert_eq!(symbol(&c, &l, &pt).unwrap().format(c.vars()), "-xi_x^3\n");
    }

    #[test]
    fn delta_examples() {
        let d = delta_map(2, 1, 1, 0).unwrap();
        assert_eq!(d, Matrix::identity(2));
        let d0 = delta_map(2, 1, 2, 0).unwrap();
        let d1 = delta_map(2, 1, 1, 1).unwrap();
        assert_eq!((d0.cols(), d0.rows(), d1.rows()), (3, 4, 1));
        assert_eq!((d0.rank(), d1.rank()), (3, 1));
        assert!(d1.mul(&d0).is_zero());
        assert!(delta_map(2, 1, 0, 0).is_err());
        assert!(delta_map(2, 1, 1, 2).is_err());
    }

    #[test]
    fn gradient_and_zero_operator_are_involutive() {
        let c = ctx2();
        let pt = JetPoint::from_seed(&c, 1, 0);
        let rep = spencer_cohomology(&c, &dbar_operator(2, 0), 3, &pt).unwrap();
        assert_eq!(rep.involutivity(), Involutivity::UpTo(3));
        let zero = CDiffOp::zero(1, 1);
        assert_eq!(is_involutive(&c, &zero, 3, &pt).unwrap(), Involutivity::UpTo(3));
    }

    #[test]
    fn two_line_examples() {
        assert!(!two_line_polynomial(1, 3, false).is_nonzero());
        let q = two_line_polynomial(2, 2, false);
        assert_eq!(q.format(), "-2*theta1*theta2");
        let q = two_line_polynomial(3, 2, true);
        assert_eq!(q.format(), "2*theta1^3 + 3*theta1^2*theta2 + 3*theta1*theta2^2 + 2*theta2^3");
    }
}

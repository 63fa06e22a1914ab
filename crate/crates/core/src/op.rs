//! C-differential operators: matrices of `Σ a^σ D_σ`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::expr::{join_signed, CoordId, DiffPoly, MultiIndex, Rational, Vars};
use crate::jet::JetContext;
use crate::parse::{parse_op_terms, OpTerms};

/// A scalar operator `Σ_σ a^σ D_σ` in normal form (coefficients left).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ScalarOp {
    terms: BTreeMap<MultiIndex, DiffPoly>,
}

impl ScalarOp {
    pub fn zero() -> Self {
        ScalarOp::default()
    }

    pub fn identity() -> Self {
        ScalarOp::multiplication(DiffPoly::one())
    }

    pub fn multiplication(a: DiffPoly) -> Self {
        ScalarOp::from_terms([(MultiIndex::empty(), a)])
    }

    /// `D_σ` with unit coefficient.
    pub fn derivative(sigma: MultiIndex) -> Self {
        ScalarOp::from_terms([(sigma, DiffPoly::one())])
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, DiffPoly)>>(terms: I) -> Self {
        let mut op = ScalarOp::zero();
        for (sigma, a) in terms {
            op.add_term(sigma, &a);
        }
        op
    }

    pub fn add_term(&mut self, sigma: MultiIndex, a: &DiffPoly) {
        if a.is_zero() {
            return;
        }
        let e = self.terms.entry(sigma.clone()).or_default();
        *e += a;
        if e.is_zero() {
            self.terms.remove(&sigma);
        }
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, DiffPoly> {
        &self.terms
    }

    pub fn coefficient(&self, sigma: &MultiIndex) -> DiffPoly {
        self.terms.get(sigma).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest |σ| with a nonzero coefficient; 0 for the zero operator.
    pub fn order(&self) -> usize {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    pub fn add(&self, other: &ScalarOp) -> ScalarOp {
        let mut out = self.clone();
        for (sigma, a) in &other.terms {
            out.add_term(sigma.clone(), a);
        }
        out
    }

    pub fn neg(&self) -> ScalarOp {
        ScalarOp { terms: self.terms.iter().map(|(s, a)| (s.clone(), -a)).collect() }
    }

    /// `p · Δ`.
    pub fn left_multiply(&self, p: &DiffPoly) -> ScalarOp {
        ScalarOp::from_terms(self.terms.iter().map(|(s, a)| (s.clone(), p * a)))
    }

    pub fn apply(&self, ctx: &JetContext, f: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (sigma, a) in &self.terms {
            out += &(a * &ctx.total_derivative_sigma(sigma, f));
        }
        ctx.restrict(&out)
    }

    /// `self ∘ other`, normalized by `D_α(f·g) = Σ C(α,β) D_β f · D_{α−β} g`.
    pub fn compose(&self, ctx: &JetContext, other: &ScalarOp) -> ScalarOp {
        let mut out = ScalarOp::zero();
        for (sigma, a) in &self.terms {
            let splits = sigma.splits();
            for (tau, b) in &other.terms {
                for (alpha, beta, w) in &splits {
                    let db = ctx.total_derivative_sigma(alpha, b);
                    if db.is_zero() {
                        continue;
                    }
                    let coef = (a * &db).scale(&Rational::from_integer(w.clone()));
                    out.add_term(beta.merge(tau), &ctx.restrict(&coef));
                }
            }
        }
        out
    }

    /// `Σ_σ (−1)^{|σ|} D_σ ∘ a^σ`.
    pub fn adjoint(&self, ctx: &JetContext) -> ScalarOp {
        let mut out = ScalarOp::zero();
        for (sigma, a) in &self.terms {
            let sign = if sigma.order() % 2 == 0 { 1 } else { -1 };
            for (alpha, beta, w) in sigma.splits() {
                let da = ctx.total_derivative_sigma(&alpha, a);
                out.add_term(beta, &da.scale(&Rational::from_integer(w * sign)));
            }
        }
        out
    }

    pub fn parse(text: &str, vars: &Vars) -> Result<ScalarOp> {
        let terms: OpTerms = parse_op_terms(text, vars)?;
        Ok(ScalarOp::from_terms(terms))
    }

    fn d_name(sigma: &MultiIndex, vars: &Vars) -> String {
        if sigma.order() == 1 && vars.short_suffixes() {
            format!("D_{}", vars.suffix(sigma))
        } else {
            let names: Vec<&str> = sigma.indices().iter().map(|&i| vars.independents[i].as_str()).collect();
            format!("D_{{{}}}", names.join(","))
        }
    }

    /// Highest-order terms first; re-parses with [`ScalarOp::parse`].
    pub fn format(&self, vars: &Vars) -> String {
        let mut pieces = Vec::new();
        for (sigma, a) in self.terms.iter().rev() {
            if sigma.is_empty() {
                pieces.extend(a.signed_pieces(vars));
                continue;
            }
            let d = Self::d_name(sigma, vars);
            let inner = a.signed_pieces(vars);
            match inner.as_slice() {
                [(neg, body)] if body == "1" => pieces.push((*neg, d)),
                [(neg, body)] => pieces.push((*neg, format!("{}*{}", body, d))),
                _ => pieces.push((false, format!("({})*{}", join_signed(&inner), d))),
            }
        }
        join_signed(&pieces)
    }
}

/// A `rows × cols` matrix of scalar operators acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CDiffOp {
    rows: usize,
    cols: usize,
    entries: Vec<ScalarOp>,
}

impl CDiffOp {
    pub fn new(rows: usize, cols: usize, entries: Vec<ScalarOp>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("operator matrices need at least one row and one column".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries given for a {}x{} operator",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(CDiffOp { rows, cols, entries })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> ScalarOp>(rows: usize, cols: usize, mut f: F) -> Self {
        assert!(rows > 0 && cols > 0, "empty operator matrix");
        let entries = (0..rows).flat_map(|s| (0..cols).map(move |j| (s, j))).map(|(s, j)| f(s, j)).collect();
        CDiffOp { rows, cols, entries }
    }

    pub fn scalar(op: ScalarOp) -> Self {
        CDiffOp { rows: 1, cols: 1, entries: vec![op] }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        CDiffOp::from_fn(rows, cols, |_, _| ScalarOp::zero())
    }

    pub fn identity(size: usize) -> Self {
        CDiffOp::from_fn(size, size, |s, j| if s == j { ScalarOp::identity() } else { ScalarOp::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, s: usize, j: usize) -> &ScalarOp {
        &self.entries[s * self.cols + j]
    }

    pub fn entries(&self) -> &[ScalarOp] {
        &self.entries
    }

    pub fn order(&self) -> usize {
        self.entries.iter().map(ScalarOp::order).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(ScalarOp::is_zero)
    }

    /// Highest jet order among all coefficients.
    pub fn coefficient_order(&self) -> usize {
        self.entries.iter().flat_map(|e| e.terms.values()).map(DiffPoly::order).max().unwrap_or(0)
    }

    pub fn add(&self, other: &CDiffOp) -> Result<CDiffOp> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension(format!(
                "cannot add {}x{} and {}x{} operators",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(CDiffOp::from_fn(self.rows, self.cols, |s, j| self.entry(s, j).add(other.entry(s, j))))
    }

    pub fn sub(&self, other: &CDiffOp) -> Result<CDiffOp> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CDiffOp {
        CDiffOp::from_fn(self.rows, self.cols, |s, j| self.entry(s, j).neg())
    }

    pub fn apply(&self, ctx: &JetContext, v: &[DiffPoly]) -> Result<Vec<DiffPoly>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "operator has {} columns but the vector has {} components",
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|s| {
                let mut acc = DiffPoly::zero();
                for (j, vj) in v.iter().enumerate() {
                    acc += &self.entry(s, j).apply(ctx, vj);
                }
                acc
            })
            .collect())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, ctx: &JetContext, inner: &CDiffOp) -> Result<CDiffOp> {
        if self.cols != inner.rows {
            return Err(Error::Dimension(format!(
                "cannot compose {}x{} after {}x{}",
                self.rows, self.cols, inner.rows, inner.cols
            )));
        }
        Ok(CDiffOp::from_fn(self.rows, inner.cols, |s, j| {
            (0..self.cols).fold(ScalarOp::zero(), |acc, k| acc.add(&self.entry(s, k).compose(ctx, inner.entry(k, j))))
        }))
    }

    /// Transpose with every entry replaced by its scalar adjoint.
    pub fn adjoint(&self, ctx: &JetContext) -> CDiffOp {
        CDiffOp::from_fn(self.cols, self.rows, |j, s| self.entry(s, j).adjoint(ctx))
    }

    /// Functions `R_1..R_n` with `⟨q, Δp⟩ − ⟨Δ*q, p⟩ = Σ_i D_i(R_i)`,
    /// built by integrating each term by parts one index at a time.
    pub fn green_remainder(&self, ctx: &JetContext, p: &[DiffPoly], q: &[DiffPoly]) -> Result<Vec<DiffPoly>> {
        if p.len() != self.cols || q.len() != self.rows {
            return Err(Error::Dimension(format!(
                "green remainder of a {}x{} operator needs p of length {} and q of length {}",
                self.rows, self.cols, self.cols, self.rows
            )));
        }
        let mut r = vec![DiffPoly::zero(); ctx.n()];
        for s in 0..self.rows {
            for j in 0..self.cols {
                for (sigma, a) in &self.entry(s, j).terms {
                    let g = a * &q[s];
                    let idx = sigma.indices();
                    for k in 0..idx.len() {
                        let left = ctx.total_derivative_sigma(&MultiIndex::new(idx[..k].to_vec()), &g);
                        let right = ctx.total_derivative_sigma(&MultiIndex::new(idx[k + 1..].to_vec()), &p[j]);
                        let term = &left * &right;
                        if k % 2 == 0 {
                            r[idx[k]] += &term;
                        } else {
                            r[idx[k]] -= &term;
                        }
                    }
                }
            }
        }
        Ok(r.iter().map(|x| ctx.restrict(x)).collect())
    }

    /// Parses a matrix literal: one row per line, entries separated by `;`.
    pub fn parse(text: &str, vars: &Vars) -> Result<CDiffOp> {
        let mut rows: Vec<Vec<ScalarOp>> = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            rows.push(line.split(';').map(|e| ScalarOp::parse(e.trim(), vars)).collect::<Result<_>>()?);
        }
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("operator rows have different lengths".into()));
        }
        CDiffOp::new(rows.len(), ncols, rows.into_iter().flatten().collect())
    }

    /// One row per line, entries joined by ` ; `.
    pub fn format(&self, vars: &Vars) -> String {
        let mut out = String::new();
        for s in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.entry(s, j).format(vars)).collect();
            let _ = writeln!(out, "{}", row.join(" ; "));
        }
        out
    }
}

/// The universal linearization: entry `(s, j)` is `Σ_σ ∂F_s/∂u^j_σ D_σ`.
pub fn linearize(ctx: &JetContext, f: &[DiffPoly]) -> Result<CDiffOp> {
    if f.is_empty() {
        return Err(Error::Dimension("linearization needs at least one equation".into()));
    }
    if ctx.m() == 0 {
        return Err(Error::Dimension("linearization needs at least one dependent variable".into()));
    }
    let mut op = CDiffOp::zero(f.len(), ctx.m());
    for (s, fs) in f.iter().enumerate() {
        for c in fs.coords() {
            if let CoordId::Jet { dep, sigma } = &c {
                let coef = fs.partial(&c);
                op.entries[s * ctx.m() + dep].add_term(sigma.clone(), &coef);
            }
        }
    }
    Ok(op)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Vars;

    fn ctx1() -> JetContext {
        JetContext::free(Vars::new(&["x"], &["u"], &[])).unwrap()
    }

    fn ctx2() -> JetContext {
        JetContext::free(Vars::new(&["x", "t"], &["u"], &[])).unwrap()
    }

    fn op(c: &JetContext, s: &str) -> CDiffOp {
        CDiffOp::parse(s, c.vars()).unwrap()
    }

    #[test]
    fn apply_examples() {
        let c = ctx2();
        let v = [c.parse("u^2").unwrap()];
        assert_eq!(op(&c, "D_x").apply(&c, &v).unwrap(), vec![c.parse("2*u*u_x").unwrap()]);
        assert_eq!(op(&c, "1").apply(&c, &v).unwrap(), v.to_vec());
        assert!(op(&c, "D_x").apply(&c, &[]).is_err());
    }

    #[test]
    fn compose_examples() {
        let c = ctx2();
        assert_eq!(op(&c, "D_x").compose(&c, &op(&c, "u")).unwrap(), op(&c, "u*D_x + u_x"));
        assert!(op(&c, "D_x").compose(&c, &CDiffOp::zero(1, 1)).unwrap().is_zero());
        assert_eq!(op(&c, "D_x").compose(&c, &op(&c, "D_x")).unwrap(), op(&c, "D_{x,x}"));
        assert!(op(&c, "D_x").compose(&c, &CDiffOp::zero(2, 1)).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let c = ctx2();
        assert_eq!(op(&c, "D_x").adjoint(&c), op(&c, "-D_x"));
        assert_eq!(op(&c, "u*D_x").adjoint(&c), op(&c, "-u*D_x - u_x"));
    }

    #[test]
    fn kdv_linearization_and_adjoint() {
        let c = ctx2();
        let f = c.parse("u_t - u*u_x - u_xxx").unwrap();
        let l = linearize(&c, &[f]).unwrap();
        assert_eq!(l, op(&c, "D_t - u*D_x - u_x - D_{x,x,x}"));
        assert_eq!(l.adjoint(&c), op(&c, "-D_t + u*D_x + D_{x,x,x}"));
        let v = [c.parse("u_x").unwrap()];
        assert_eq!(l.apply(&c, &v).unwrap(), vec![c.parse("u_xt - u*u_xx - u_x^2 - u_xxxx").unwrap()]);
    }

    #[test]
    fn linearize_constant_and_product_rule() {
        let c = ctx2();
        let l = linearize(&c, &[DiffPoly::one()]).unwrap();
        assert!(l.is_zero());
        assert_eq!(l.order(), 0);
        let (f, g) = (c.parse("u").unwrap(), c.parse("u_x").unwrap());
        let lhs = linearize(&c, &[&f * &g]).unwrap();
        let lf = linearize(&c, &[f.clone()]).unwrap();
        let lg = linearize(&c, &[g.clone()]).unwrap();
        let rhs = CDiffOp::scalar(lg.entry(0, 0).left_multiply(&f).add(&lf.entry(0, 0).left_multiply(&g)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn green_remainder_examples() {
        let c = ctx1();
        let vars = Vars::new(&["x"], &["u"], &[]);
        let p = [c.parse("u^2").unwrap()];
        let q = [c.parse("u_x").unwrap()];
        let dx = op(&c, "D_x");
        assert_eq!(dx.green_remainder(&c, &p, &q).unwrap(), vec![&q[0] * &p[0]]);
        let dxx = op(&c, "D_{x,x}");
        let r = dxx.green_remainder(&c, &p, &q).unwrap();
        let expect = &(&q[0] * &c.total_derivative(0, &p[0])) - &(&c.total_derivative(0, &q[0]) * &p[0]);
        assert_eq!(r, vec![expect]);
        let zero = dxx.green_remainder(&c, &[DiffPoly::zero()], &q).unwrap();
        assert!(zero[0].is_zero());
        let _ = vars;
    }

    #[test]
    fn printing_round_trips() {
        let c = ctx2();
        for s in ["D_t - u*D_x - u_x - D_{x,x,x}", "(u + 1)*D_{x,t} - 1/6*u_x^2", "0", "-D_x"] {
            let o = op(&c, s);
            assert_eq!(op(&c, &o.format(c.vars())), o, "{}", o.format(c.vars()));
        }
        let m = op(&c, "D_x ; u\n0 ; D_{t,t}");
        assert_eq!((m.rows(), m.cols()), (2, 2));
        assert_eq!(op(&c, &m.format(c.vars())), m);
    }
}

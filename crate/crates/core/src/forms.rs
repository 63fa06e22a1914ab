//! Horizontal forms `Σ f_I dx_I` and the horizontal differential d̄.

use std::collections::BTreeMap;

use crate::expr::{int, join_signed, DiffPoly, MultiIndex, Vars};
use crate::jet::JetContext;
use crate::op::{CDiffOp, ScalarOp};

/// Strictly increasing `q`-tuples from `0..n`, lexicographically.
pub fn increasing_tuples(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, i + 1, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if q <= n {
        rec(n, 0, q, &mut Vec::new(), &mut out);
    }
    out
}

/// `dx_I ∧ dx_J = sign · dx_{I∪J}`; `None` when the tuples overlap.
pub fn wedge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut inversions = 0usize;
    for &x in a {
        if b.contains(&x) {
            return None;
        }
        inversions += b.iter().filter(|&&y| y < x).count();
    }
    let mut merged: Vec<usize> = a.iter().chain(b).copied().collect();
    merged.sort_unstable();
    Some((merged, if inversions % 2 == 0 { 1 } else { -1 }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizontalForm {
    n: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, DiffPoly>,
}

impl HorizontalForm {
    pub fn zero(n: usize, degree: usize) -> Self {
        HorizontalForm { n, degree: degree.min(n), coeffs: BTreeMap::new() }
    }

    pub fn function(n: usize, f: DiffPoly) -> Self {
        let mut w = HorizontalForm::zero(n, 0);
        w.add_term(Vec::new(), &f);
        w
    }

    /// `f dx_{i₁} ∧ … ∧ dx_{i_q}` for any (not necessarily sorted) indices.
    pub fn monomial(n: usize, indices: &[usize], f: DiffPoly) -> Self {
        let mut w = HorizontalForm::zero(n, indices.len());
        if indices.len() > n || indices.iter().any(|&i| i >= n) {
            return w;
        }
        let mut acc: Option<(Vec<usize>, i64)> = Some((Vec::new(), 1));
        for &i in indices {
            acc = acc.and_then(|(t, s)| wedge_sign(&t, &[i]).map(|(t2, s2)| (t2, s * s2)));
        }
        if let Some((tuple, sign)) = acc {
            w.add_term(tuple, &f.scale(&int(sign)));
        }
        w
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &BTreeMap<Vec<usize>, DiffPoly> {
        &self.coeffs
    }

    pub fn coefficient(&self, tuple: &[usize]) -> DiffPoly {
        self.coeffs.get(tuple).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_term(&mut self, tuple: Vec<usize>, f: &DiffPoly) {
        debug_assert_eq!(tuple.len(), self.degree);
        let e = self.coeffs.entry(tuple.clone()).or_default();
        *e += f;
        if e.is_zero() {
            self.coeffs.remove(&tuple);
        }
    }

    pub fn add(&self, other: &HorizontalForm) -> HorizontalForm {
        assert_eq!((self.n, self.degree), (other.n, other.degree), "adding forms of different type");
        let mut out = self.clone();
        for (t, f) in &other.coeffs {
            out.add_term(t.clone(), f);
        }
        out
    }

    pub fn scale(&self, c: &DiffPoly) -> HorizontalForm {
        let mut out = HorizontalForm::zero(self.n, self.degree);
        for (t, f) in &self.coeffs {
            out.add_term(t.clone(), &(f * c));
        }
        out
    }

    pub fn neg(&self) -> HorizontalForm {
        self.scale(&DiffPoly::from_int(-1))
    }

    /// Exterior product; the zero form when the degrees exceed `n`.
    pub fn wedge(&self, other: &HorizontalForm) -> HorizontalForm {
        assert_eq!(self.n, other.n, "forms on different base dimensions");
        let mut out = HorizontalForm::zero(self.n, self.degree + other.degree);
        if self.degree + other.degree > self.n {
            return out;
        }
        for (a, f) in &self.coeffs {
            for (b, g) in &other.coeffs {
                if let Some((t, s)) = wedge_sign(a, b) {
                    out.add_term(t, &(f * g).scale(&int(s)));
                }
            }
        }
        out
    }

    /// d̄ω = Σ_I Σ_i D_i(f_I) dx_i ∧ dx_I.
    pub fn dbar(&self, ctx: &JetContext) -> HorizontalForm {
        assert_eq!(self.n, ctx.n(), "form and context dimensions differ");
        let mut out = HorizontalForm::zero(self.n, self.degree + 1);
        if self.degree >= self.n {
            return out;
        }
        for (t, f) in &self.coeffs {
            for i in 0..self.n {
                if let Some((u, s)) = wedge_sign(&[i], t) {
                    out.add_term(u, &ctx.total_derivative(i, f).scale(&int(s)));
                }
            }
        }
        out
    }

    pub fn format(&self, vars: &Vars) -> String {
        let mut pieces = Vec::new();
        for (t, f) in &self.coeffs {
            let basis: Vec<String> = t.iter().map(|&i| format!("d{}", vars.independents[i])).collect();
            let basis = basis.join("^");
            let inner = f.signed_pieces(vars);
            if t.is_empty() {
                pieces.extend(inner);
                continue;
            }
            match inner.as_slice() {
                [(neg, body)] if body == "1" => pieces.push((*neg, basis)),
                [(neg, body)] => pieces.push((*neg, format!("{} {}", body, basis))),
                _ => pieces.push((false, format!("({}) {}", join_signed(&inner), basis))),
            }
        }
        join_signed(&pieces)
    }
}

/// d̄ : Λ̄^q → Λ̄^{q+1} as a C(n,q+1) × C(n,q) operator matrix in the
/// increasing-tuple bases.
pub fn dbar_operator(n: usize, q: usize) -> CDiffOp {
    assert!(q < n, "d̄ on top-degree forms has an empty target");
    let src = increasing_tuples(n, q);
    let dst = increasing_tuples(n, q + 1);
    CDiffOp::from_fn(dst.len(), src.len(), |row, col| {
        let mut op = ScalarOp::zero();
        for i in 0..n {
            if let Some((t, s)) = wedge_sign(&[i], &src[col]) {
                if t == dst[row] {
                    op.add_term(MultiIndex::single(i), &DiffPoly::from_int(s));
                }
            }
        }
        op
    })
}

/// Components of a form in the increasing-tuple basis.
pub fn form_to_vector(w: &HorizontalForm) -> Vec<DiffPoly> {
    increasing_tuples(w.n, w.degree).iter().map(|t| w.coefficient(t)).collect()
}

pub fn vector_to_form(n: usize, q: usize, v: &[DiffPoly]) -> HorizontalForm {
    let mut w = HorizontalForm::zero(n, q);
    for (t, f) in increasing_tuples(n, q).into_iter().zip(v) {
        w.add_term(t, f);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Vars;

    fn ctx() -> JetContext {
        JetContext::free(Vars::new(&["x", "t"], &["u"], &[])).unwrap()
    }

    #[test]
    fn tuples_and_signs() {
        assert_eq!(increasing_tuples(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(increasing_tuples(2, 3).len(), 0);
        assert_eq!(wedge_sign(&[1], &[0]), Some((vec![0, 1], -1)));
        assert_eq!(wedge_sign(&[0], &[0]), None);
    }

    #[test]
    fn dbar_examples() {
        let c = ctx();
        let u = HorizontalForm::function(2, c.parse("u").unwrap());
        let du = u.dbar(&c);
        assert_eq!(du.coefficient(&[0]), c.parse("u_x").unwrap());
        assert_eq!(du.coefficient(&[1]), c.parse("u_t").unwrap());
        assert!(du.dbar(&c).is_zero());
        let top = HorizontalForm::monomial(2, &[0, 1], c.parse("u").unwrap());
        let d = top.dbar(&c);
        assert!(d.is_zero());
        assert_eq!(d.degree(), 2);
    }

    #[test]
    fn wedge_examples() {
        let c = ctx();
        let dx = HorizontalForm::monomial(2, &[0], DiffPoly::one());
        let dt = HorizontalForm::monomial(2, &[1], DiffPoly::one());
        assert_eq!(dx.wedge(&dt).coefficient(&[0, 1]), DiffPoly::one());
        assert!(dx.wedge(&dx).is_zero());
        assert_eq!(dt.wedge(&dx).coefficient(&[0, 1]), DiffPoly::from_int(-1));
        let a = dx.scale(&c.parse("u").unwrap());
        let b = dt.scale(&c.parse("u_x").unwrap());
        assert_eq!(a.wedge(&b).coefficient(&[0, 1]), c.parse("u*u_x").unwrap());
    }

    #[test]
    fn dbar_operator_matches_form_dbar() {
        let c = JetContext::free(Vars::new(&["x", "y", "z"], &["u"], &[])).unwrap();
        let w = vector_to_form(3, 1, &[c.parse("u").unwrap(), c.parse("x*u_y").unwrap(), c.parse("u_z^2").unwrap()]);
        let via_op = dbar_operator(3, 1).apply(&c, &form_to_vector(&w)).unwrap();
        assert_eq!(via_op, form_to_vector(&w.dbar(&c)));
    }

    #[test]
    fn formatting() {
        let c = ctx();
        let w = HorizontalForm::function(2, c.parse("u").unwrap()).dbar(&c);
        assert_eq!(w.format(c.vars()), "u_x dx + u_t dt");
    }
}

//! Matrix-valued horizontal forms, the horizontal Maurer–Cartan residual and
//! the covering substitution `D_i → D_i + ad A_i`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{DiffPoly, MultiIndex, Vars};
use crate::forms::increasing_tuples;
use crate::jet::JetContext;
use crate::op::{CDiffOp, ScalarOp};
use crate::parse::parse_expr;

/// Square `d × d` matrix of differential polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    d: usize,
    entries: Vec<DiffPoly>,
}

impl PolyMatrix {
    pub fn zero(d: usize) -> Self {
        PolyMatrix { d, entries: vec![DiffPoly::zero(); d * d] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = PolyMatrix::zero(d);
        for i in 0..d {
            m.entries[i * d + i] = DiffPoly::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<DiffPoly>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::Dimension("matrix must be square and nonempty".into()));
        }
        Ok(PolyMatrix { d, entries: rows.into_iter().flatten().collect() })
    }

    pub fn size(&self) -> usize {
        self.d
    }

    pub fn get(&self, r: usize, c: usize) -> &DiffPoly {
        &self.entries[r * self.d + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: DiffPoly) {
        self.entries[r * self.d + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(DiffPoly::is_zero)
    }

    pub fn map<F: FnMut(&DiffPoly) -> DiffPoly>(&self, f: F) -> PolyMatrix {
        PolyMatrix { d: self.d, entries: self.entries.iter().map(f).collect() }
    }

    pub fn add(&self, o: &PolyMatrix) -> PolyMatrix {
        PolyMatrix { d: self.d, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &PolyMatrix) -> PolyMatrix {
        PolyMatrix { d: self.d, entries: self.entries.iter().zip(&o.entries).map(|(a, b)| a - b).collect() }
    }

    pub fn mul(&self, o: &PolyMatrix) -> PolyMatrix {
        let d = self.d;
        let mut out = PolyMatrix::zero(d);
        for r in 0..d {
            for c in 0..d {
                let mut acc = DiffPoly::zero();
                for k in 0..d {
                    acc += &(self.get(r, k) * o.get(k, c));
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// `[A, B] = AB − BA`.
    pub fn bracket(&self, o: &PolyMatrix) -> PolyMatrix {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn format(&self, vars: &Vars) -> String {
        let mut out = String::new();
        for r in 0..self.d {
            let row: Vec<String> = (0..self.d).map(|c| vars.fmt_poly(self.get(r, c))).collect();
            out.push_str(&row.join(" ; "));
            out.push('\n');
        }
        out
    }
}

/// A horizontal form with matrix coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixForm {
    n: usize,
    d: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, PolyMatrix>,
}

impl MatrixForm {
    pub fn zero(n: usize, d: usize, degree: usize) -> Self {
        MatrixForm { n, d, degree: degree.min(n), coeffs: BTreeMap::new() }
    }

    /// `Σ_i A_i dx_i`.
    pub fn one_form(mats: Vec<PolyMatrix>) -> Result<Self> {
        let n = mats.len();
        let d = mats.first().map(PolyMatrix::size).ok_or_else(|| Error::Dimension("no matrices given".into()))?;
        if mats.iter().any(|m| m.size() != d) {
            return Err(Error::Dimension("matrices of a form must share one size".into()));
        }
        let mut w = MatrixForm::zero(n, d, 1);
        for (i, a) in mats.into_iter().enumerate() {
            w.insert(vec![i], a);
        }
        Ok(w)
    }

    fn insert(&mut self, tuple: Vec<usize>, m: PolyMatrix) {
        if m.is_zero() {
            self.coeffs.remove(&tuple);
        } else {
            self.coeffs.insert(tuple, m);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.d
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficient(&self, tuple: &[usize]) -> PolyMatrix {
        self.coeffs.get(tuple).cloned().unwrap_or_else(|| PolyMatrix::zero(self.d))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &DiffPoly) -> MatrixForm {
        let mut out = MatrixForm::zero(self.n, self.d, self.degree);
        for (t, m) in &self.coeffs {
            out.insert(t.clone(), m.map(|p| p * c));
        }
        out
    }

    /// Matrices `A_i` of a 1-form.
    pub fn components(&self) -> Vec<PolyMatrix> {
        (0..self.n).map(|i| self.coefficient(&[i])).collect()
    }

    /// Parses blocks `A <name>` followed by `d` rows of `;`-separated entries.
    pub fn parse(text: &str, vars: &Vars) -> Result<MatrixForm> {
        let mut blocks: BTreeMap<usize, Vec<Vec<DiffPoly>>> = BTreeMap::new();
        let mut current: Option<usize> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let dsl = |message: String| Error::Dsl { line: k + 1, message };
            if let Some(name) = line.strip_prefix("A ") {
                let name = name.trim();
                let i = vars
                    .independent_index(name)
                    .ok_or_else(|| dsl(format!("`{}` is not an independent variable", name)))?;
                if blocks.insert(i, Vec::new()).is_some() {
                    return Err(dsl(format!("matrix for `{}` given twice", name)));
                }
                current = Some(i);
                continue;
            }
            let i = current.ok_or_else(|| dsl("matrix row before any `A <name>` header".into()))?;
            let row = line
                .split(';')
                .map(|e| parse_expr(e.trim(), vars).map_err(|err| dsl(err.to_string())))
                .collect::<Result<Vec<_>>>()?;
            blocks.get_mut(&i).expect("open block").push(row);
        }
        let d = blocks.values().next().map(Vec::len).ok_or_else(|| Error::Dsl {
            line: 0,
            message: "no matrices found".into(),
        })?;
        let mut mats = vec![None; vars.n()];
        for (i, rows) in blocks {
            let m = PolyMatrix::from_rows(rows)?;
            if m.size() != d {
                return Err(Error::Dimension("matrices of a form must share one size".into()));
            }
            mats[i] = Some(m);
        }
        MatrixForm::one_form(mats.into_iter().map(|m| m.unwrap_or_else(|| PolyMatrix::zero(d))).collect())
    }

    pub fn format(&self, vars: &Vars) -> String {
        let mut out = String::new();
        for (t, m) in &self.coeffs {
            let names: Vec<String> = t.iter().map(|&i| format!("d{}", vars.independents[i])).collect();
            out.push_str(&format!("[{}]\n", names.join("^")));
            out.push_str(&m.format(vars));
        }
        if out.is_empty() {
            out.push_str("0\n");
        }
        out
    }
}

/// `d̄ω + ½[ω, ω]` for a matrix 1-form, i.e.
/// `Σ_{i<j} (D_i A_j − D_j A_i + [A_i, A_j]) dx_i ∧ dx_j`.
pub fn mc_residual(ctx: &JetContext, w: &MatrixForm) -> Result<MatrixForm> {
    if w.degree != 1 {
        return Err(Error::Dimension(format!("expected a 1-form, got degree {}", w.degree)));
    }
    if w.n != ctx.n() {
        return Err(Error::Dimension("form and context dimensions differ".into()));
    }
    let a = w.components();
    let mut out = MatrixForm::zero(w.n, w.d, 2);
    for t in increasing_tuples(w.n, 2) {
        let (i, j) = (t[0], t[1]);
        let di_aj = a[j].map(|p| ctx.total_derivative(i, p));
        let dj_ai = a[i].map(|p| ctx.total_derivative(j, p));
        let bracket = a[i].bracket(&a[j]).map(|p| ctx.restrict(p));
        out.insert(t, di_aj.sub(&dj_ai).add(&bracket));
    }
    Ok(out)
}

/// `ad A` on `vec(M)` (row-major): `(ad A)_{(a,b),(c,e)} = A_{ac} δ_{be} − δ_{ac} A_{eb}`.
pub fn ad_operator(a: &PolyMatrix) -> CDiffOp {
    let d = a.size();
    CDiffOp::from_fn(d * d, d * d, |row, col| {
        let (ra, rb) = (row / d, row % d);
        let (cc, ce) = (col / d, col % d);
        let mut p = DiffPoly::zero();
        if rb == ce {
            p += a.get(ra, cc);
        }
        if ra == cc {
            p -= a.get(ce, rb);
        }
        ScalarOp::multiplication(p)
    })
}

/// Replaces every `D_i` in a scalar operator by `D_i ⊗ 1 + ad A_i`.
pub fn covering_substitute(ctx: &JetContext, op: &CDiffOp, w: &MatrixForm) -> Result<CDiffOp> {
    if op.rows() != 1 || op.cols() != 1 {
        return Err(Error::Dimension("covering substitution needs a scalar operator".into()));
    }
    if w.degree != 1 || w.n != ctx.n() {
        return Err(Error::Dimension("covering substitution needs a 1-form on the base".into()));
    }
    let d = w.d;
    let dd = d * d;
    let a = w.components();
    let shifted: Vec<CDiffOp> = (0..ctx.n())
        .map(|i| {
            let di = CDiffOp::from_fn(dd, dd, |r, c| {
                if r == c {
                    ScalarOp::derivative(MultiIndex::single(i))
                } else {
                    ScalarOp::zero()
                }
            });
            di.add(&ad_operator(&a[i])).expect("same size")
        })
        .collect();
    let mut out = CDiffOp::zero(dd, dd);
    for (sigma, coef) in op.entry(0, 0).terms() {
        let mut term = CDiffOp::identity(dd);
        for &i in sigma.indices().iter().rev() {
            term = shifted[i].compose(ctx, &term)?;
        }
        let scaled = CDiffOp::from_fn(dd, dd, |r, c| term.entry(r, c).left_multiply(coef));
        out = out.add(&scaled)?;
    }
    Ok(out)
}

/// KdV `u_t = u u_x + u_xxx` with its sl₂ family `A₁(λ) dx + A₂(λ) dt`.
pub fn kdv_sl2(vars: &Vars) -> Result<MatrixForm> {
    let text = "A x\n0 ; -(lambda + u)\n1/6 ; 0\n\
                A t\n-u_x/6 ; -u_xx - u^2/3 + lambda*u/3 + 2*lambda^2/3\nu/18 - lambda/9 ; u_x/6\n";
    MatrixForm::parse(text, vars)
}

/// `(D_i ∘ D_j − D_j ∘ D_i)` of the substituted operators, per pair `i < j`.
pub fn covering_commutators(ctx: &JetContext, w: &MatrixForm) -> Result<Vec<CDiffOp>> {
    let mut out = Vec::new();
    for t in increasing_tuples(ctx.n(), 2) {
        let di = covering_substitute(ctx, &CDiffOp::scalar(ScalarOp::derivative(MultiIndex::single(t[0]))), w)?;
        let dj = covering_substitute(ctx, &CDiffOp::scalar(ScalarOp::derivative(MultiIndex::single(t[1]))), w)?;
        out.push(di.compose(ctx, &dj)?.sub(&dj.compose(ctx, &di)?)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kdv() -> JetContext {
        let vars = Vars::new(&["x", "t"], &["u"], &["lambda"]);
        let rhs = parse_expr("u*u_x + u_xxx", &vars).unwrap();
        JetContext::evolution(vars, vec![rhs]).unwrap()
    }

    #[test]
    fn kdv_family_is_flat() {
        let c = kdv();
        let w = kdv_sl2(c.vars()).unwrap();
        assert!(mc_residual(&c, &w).unwrap().is_zero());
    }

    #[test]
    fn perturbed_family_is_not_flat() {
        let c = kdv();
        let w = kdv_sl2(c.vars()).unwrap();
        let mut a = w.components();
        a[0].set(1, 0, c.parse("1/5").unwrap());
        let bad = MatrixForm::one_form(a).unwrap();
        assert!(!mc_residual(&c, &bad).unwrap().is_zero());
    }

    #[test]
    fn zero_form_has_zero_residual() {
        let c = kdv();
        let w = MatrixForm::one_form(vec![PolyMatrix::zero(2), PolyMatrix::zero(2)]).unwrap();
        assert!(mc_residual(&c, &w).unwrap().is_zero());
    }

    #[test]
    fn substitution_examples() {
        let c = JetContext::free(Vars::new(&["x", "t"], &["u"], &[])).unwrap();
        let a1 = PolyMatrix::from_rows(vec![
            vec![DiffPoly::from_int(1), DiffPoly::from_int(2)],
            vec![DiffPoly::zero(), DiffPoly::from_int(-1)],
        ])
        .unwrap();
        let w = MatrixForm::one_form(vec![a1.clone(), PolyMatrix::zero(2)]).unwrap();
        let dx = CDiffOp::parse("D_x", c.vars()).unwrap();
        let sub = covering_substitute(&c, &dx, &w).unwrap();
        let expect = CDiffOp::from_fn(4, 4, |r, col| if r == col { ScalarOp::derivative(MultiIndex::single(0)) } else { ScalarOp::zero() })
            .add(&ad_operator(&a1))
            .unwrap();
        assert_eq!(sub, expect);
        // constant A: (D + ad A)^2 = D^2 + 2 ad A D + (ad A)^2
        let dxx = CDiffOp::parse("D_{x,x}", c.vars()).unwrap();
        let sub2 = covering_substitute(&c, &dxx, &w).unwrap();
        assert_eq!(sub2, expect.compose(&c, &expect).unwrap());
        let zero = MatrixForm::one_form(vec![PolyMatrix::zero(2), PolyMatrix::zero(2)]).unwrap();
        let diag = covering_substitute(&c, &dxx, &zero).unwrap();
        assert_eq!(diag.entry(0, 0), dxx.entry(0, 0));
        assert!(diag.entry(0, 1).is_zero());
    }

    #[test]
    fn ad_matches_commutator() {
        let c = JetContext::free(Vars::new(&["x"], &["u"], &[])).unwrap();
        let a = PolyMatrix::from_rows(vec![
            vec![c.parse("u").unwrap(), c.parse("1").unwrap()],
            vec![c.parse("u_x").unwrap(), c.parse("0").unwrap()],
        ])
        .unwrap();
        let m = PolyMatrix::from_rows(vec![
            vec![c.parse("x").unwrap(), c.parse("2").unwrap()],
            vec![c.parse("u^2").unwrap(), c.parse("3").unwrap()],
        ])
        .unwrap();
        let v: Vec<DiffPoly> = (0..4).map(|k| m.get(k / 2, k % 2).clone()).collect();
        let got = ad_operator(&a).apply(&c, &v).unwrap();
        let br = a.bracket(&m);
        let want: Vec<DiffPoly> = (0..4).map(|k| br.get(k / 2, k % 2).clone()).collect();
        assert_eq!(got, want);
    }

    #[test]
    fn kdv_covering_is_flat() {
        let c = kdv();
        let w = kdv_sl2(c.vars()).unwrap();
        for comm in covering_commutators(&c, &w).unwrap() {
            assert!(comm.is_zero());
        }
    }
}

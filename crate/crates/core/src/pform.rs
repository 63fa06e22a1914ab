//! Abelian p-form theory: Hodge star for diagonal ±1 metrics, the symbol
//! epimorphism check and the E₁ dimension table.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::expr::{int, DiffPoly, Rational};
use crate::forms::{dbar_operator, increasing_tuples, wedge_sign, HorizontalForm};
use crate::jet::JetContext;
use crate::linalg::Matrix;
use crate::op::{CDiffOp, ScalarOp};

/// A constant diagonal metric with entries ±1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Metric {
    diag: Vec<i64>,
}

impl Metric {
    pub fn diagonal(diag: &[i64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Metric("metric must have at least one entry".into()));
        }
        if let Some(bad) = diag.iter().find(|&&d| d != 1 && d != -1) {
            return Err(Error::Metric(format!(
                "diagonal entry {} is not supported; only +1 and -1 keep the Hodge star rational",
                bad
            )));
        }
        Ok(Metric { diag: diag.to_vec() })
    }

    pub fn euclidean(n: usize) -> Self {
        Metric { diag: vec![1; n] }
    }

    /// diag(−1, 1, …, 1).
    pub fn lorentzian(n: usize) -> Self {
        let mut diag = vec![1; n];
        diag[0] = -1;
        Metric { diag }
    }

    /// Accepts a full symmetric matrix; only diagonal ±1 metrics are supported.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        if m.rows() != m.cols() {
            return Err(Error::Metric("metric must be square".into()));
        }
        let mut diag = Vec::new();
        for r in 0..m.rows() {
            for c in 0..m.cols() {
                if r != c && *m.get(r, c) != int(0) {
                    return Err(Error::Metric("non-diagonal metrics are not supported".into()));
                }
            }
            let v = m.get(r, r);
            if *v == int(1) {
                diag.push(1);
            } else if *v == int(-1) {
                diag.push(-1);
            } else {
                return Err(Error::Metric("diagonal entries must be +1 or -1".into()));
            }
        }
        Metric::diagonal(&diag)
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// Number of negative entries.
    pub fn index(&self) -> usize {
        self.diag.iter().filter(|&&d| d < 0).count()
    }

    pub fn diag(&self) -> &[i64] {
        &self.diag
    }

    /// ⟨dx_I, dx_I⟩ for an increasing tuple.
    pub fn norm(&self, tuple: &[usize]) -> i64 {
        tuple.iter().map(|&i| self.diag[i]).product()
    }
}

fn complement(n: usize, tuple: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !tuple.contains(i)).collect()
}

/// `∗dx_I = ⟨dx_I, dx_I⟩ · orientation · sign(I, Iᶜ) · dx_{Iᶜ}`.
fn star_basis(g: &Metric, tuple: &[usize], orientation: i64) -> (Vec<usize>, i64) {
    let comp = complement(g.n(), tuple);
    let (_, sign) = wedge_sign(tuple, &comp).expect("disjoint");
    (comp, g.norm(tuple) * orientation * sign)
}

pub fn hodge_star(g: &Metric, w: &HorizontalForm, orientation: i64) -> Result<HorizontalForm> {
    if w.n() != g.n() {
        return Err(Error::Dimension(format!("form on {} variables, metric on {}", w.n(), g.n())));
    }
    if orientation != 1 && orientation != -1 {
        return Err(Error::OutOfRange("orientation must be +1 or -1".into()));
    }
    let mut out = HorizontalForm::zero(g.n(), g.n() - w.degree());
    for (t, f) in w.coeffs() {
        let (comp, s) = star_basis(g, t, orientation);
        out = out.add(&HorizontalForm::monomial(g.n(), &comp, f.scale(&int(s))));
    }
    Ok(out)
}

/// ∗ : Λ̄^q → Λ̄^{n−q} as an order-0 operator matrix.
pub fn hodge_operator(g: &Metric, q: usize, orientation: i64) -> CDiffOp {
    let n = g.n();
    let src = increasing_tuples(n, q);
    let dst = increasing_tuples(n, n - q);
    CDiffOp::from_fn(dst.len(), src.len(), |row, col| {
        let (comp, s) = star_basis(g, &src[col], orientation);
        if comp == dst[row] {
            ScalarOp::multiplication(DiffPoly::from_int(s))
        } else {
            ScalarOp::zero()
        }
    })
}

/// d̄ ∗ d̄ : Λ̄^p → Λ̄^{n−p}, the p-form field operator.
pub fn dstard_operator(ctx: &JetContext, g: &Metric, p: usize) -> Result<CDiffOp> {
    let n = g.n();
    if ctx.n() != n {
        return Err(Error::Dimension("metric size differs from the number of independent variables".into()));
    }
    if p + 1 >= n {
        return Err(Error::OutOfRange(format!("d*d needs p < n - 1 (p = {}, n = {})", p, n)));
    }
    let inner = hodge_operator(g, p + 1, 1).compose(ctx, &dbar_operator(n, p))?;
    dbar_operator(n, n - p - 1).compose(ctx, &inner)
}

/// `A_k = ξ ∧ · : Λ^k → Λ^{k+1}` on ℚⁿ.
pub fn exterior_multiplication(xi: &[Rational], k: usize) -> Matrix {
    let n = xi.len();
    let src = increasing_tuples(n, k);
    let dst = increasing_tuples(n, k + 1);
    let mut m = Matrix::zeros(dst.len(), src.len());
    for (c, t) in src.iter().enumerate() {
        for (i, x) in xi.iter().enumerate() {
            if let Some((u, s)) = wedge_sign(&[i], t) {
                let r = dst.iter().position(|d| *d == u).expect("basis tuple");
                m.add_at(r, c, &(x * int(s)));
            }
        }
    }
    m
}

/// Gram matrix of the induced metric on Λ^k (diagonal ±1).
fn gram(g: &Metric, k: usize) -> Matrix {
    let basis = increasing_tuples(g.n(), k);
    let mut m = Matrix::zeros(basis.len(), basis.len());
    for (i, t) in basis.iter().enumerate() {
        m.set(i, i, int(g.norm(t)));
    }
    m
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpiReport {
    pub surjective: bool,
    pub rank: usize,
    pub dim: usize,
}

/// Whether `A_{n−p−1} ⊕ A*_{n−p} : Λ^{n−p−1} ⊕ Λ^{n−p+1} → Λ^{n−p}` is onto.
pub fn epi_check(n: usize, p: usize, g: &Metric, xi: &[Rational]) -> Result<EpiReport> {
    if p < 1 || p + 1 >= n {
        return Err(Error::OutOfRange(format!("epi check needs 1 <= p < n - 1 (p = {}, n = {})", p, n)));
    }
    if g.n() != n || xi.len() != n {
        return Err(Error::Dimension("metric and covector must have n entries".into()));
    }
    if xi.iter().all(|x| *x == int(0)) {
        return Err(Error::Precondition("covector is zero".into()));
    }
    let a = exterior_multiplication(xi, n - p - 1);
    let b = exterior_multiplication(xi, n - p);
    let b_adj = gram(g, n - p).mul(&b.transpose()).mul(&gram(g, n - p + 1));
    let m = a.hconcat(&b_adj);
    let rank = m.rank();
    let dim = m.rows();
    Ok(EpiReport { surjective: rank == dim, rank, dim })
}

/// Sparse E₁ table: `(i, q, dim)` triples sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct E1Table {
    pub n: usize,
    pub p: usize,
    pub entries: Vec<(usize, usize, usize)>,
    /// Agreement with the dot pattern of the two-column (even) or
    /// staircase (odd) layout.
    pub figure_consistent: bool,
}

impl E1Table {
    pub fn dim(&self, i: usize, q: usize) -> usize {
        self.entries.iter().find(|e| e.0 == i && e.1 == q).map_or(0, |e| e.2)
    }
}

/// Monomials `ω₁^a ω₂^b` in the free graded-commutative algebra on
/// generators of bidegree `(0, d)` and `(1, d)`, `d = n − p − 1`, placed at
/// `(i, q) = (b, (a + b) d)` for `q ≤ n − 2`.
pub fn e1_table(n: usize, p: usize) -> Result<E1Table> {
    if p < 1 || p + 1 >= n {
        return Err(Error::OutOfRange(format!("E1 table needs 1 <= p < n - 1 (p = {}, n = {})", p, n)));
    }
    let d = n - p - 1;
    let qmax = n - 2;
    let even = d % 2 == 0;
    let (max_a, max_b) = if even { (usize::MAX, 1) } else { (1, usize::MAX) };
    let mut cells: std::collections::BTreeMap<(usize, usize), usize> = Default::default();
    for a in 0..=max_a.min(qmax / d) {
        for b in 0..=max_b.min(qmax / d) {
            let q = (a + b) * d;
            if q <= qmax {
                *cells.entry((b, q)).or_default() += 1;
            }
        }
    }
    let entries: Vec<(usize, usize, usize)> = cells.into_iter().map(|((i, q), c)| (i, q, c)).collect();
    let mut figure: BTreeSet<(usize, usize)> = BTreeSet::new();
    figure.insert((0, 0));
    let mut l = 1;
    while l * d <= qmax {
        if even {
            figure.insert((0, l * d));
            figure.insert((1, l * d));
        } else {
            figure.insert((l - 1, l * d));
            figure.insert((l, l * d));
        }
        l += 1;
    }
    let got: BTreeSet<(usize, usize)> = entries.iter().map(|e| (e.0, e.1)).collect();
    let figure_consistent = got == figure && entries.iter().all(|e| e.2 == 1);
    Ok(E1Table { n, p, entries, figure_consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Vars;
    use crate::forms::vector_to_form;

    #[test]
    fn star_in_the_plane() {
        let g = Metric::euclidean(2);
        let dx = HorizontalForm::monomial(2, &[0], DiffPoly::one());
        let dt = HorizontalForm::monomial(2, &[1], DiffPoly::one());
        assert_eq!(hodge_star(&g, &dx, 1).unwrap(), dt);
        assert_eq!(hodge_star(&g, &dt, 1).unwrap(), dx.neg());
        let one = HorizontalForm::function(2, DiffPoly::one());
        assert_eq!(hodge_star(&g, &one, 1).unwrap(), HorizontalForm::monomial(2, &[0, 1], DiffPoly::one()));
    }

    #[test]
    fn star_of_volume_carries_the_index() {
        let g = Metric::lorentzian(4);
        let vol = HorizontalForm::monomial(4, &[0, 1, 2, 3], DiffPoly::one());
        assert_eq!(hodge_star(&g, &vol, 1).unwrap(), HorizontalForm::function(4, DiffPoly::from_int(-1)));
    }

    #[test]
    fn metric_validation() {
        assert!(Metric::diagonal(&[1, 2]).is_err());
        let m = Matrix::from_rows(vec![vec![int(1), int(1)], vec![int(1), int(1)]]);
        assert!(Metric::from_matrix(&m).is_err());
        assert_eq!(Metric::from_matrix(&Matrix::identity(3)).unwrap(), Metric::euclidean(3));
    }

    #[test]
    fn hodge_operator_matches_star() {
        let ctx = JetContext::free(Vars::new(&["a", "b", "c"], &["u"], &[])).unwrap();
        let g = Metric::diagonal(&[1, -1, 1]).unwrap();
        let v = vec![ctx.parse("u").unwrap(), ctx.parse("u_a").unwrap(), ctx.parse("2").unwrap()];
        let w = vector_to_form(3, 1, &v);
        let via_op = hodge_operator(&g, 1, -1).apply(&ctx, &v).unwrap();
        let star = hodge_star(&g, &w, -1).unwrap();
        assert_eq!(vector_to_form(3, 2, &via_op), star);
    }

    #[test]
    fn epi_examples() {
        let e = epi_check(4, 1, &Metric::euclidean(4), &[int(1), int(0), int(0), int(0)]).unwrap();
        assert_eq!((e.surjective, e.rank, e.dim), (true, 4, 4));
        let l = epi_check(4, 1, &Metric::lorentzian(4), &[int(2), int(1), int(0), int(0)]).unwrap();
        assert!(l.surjective);
        assert!(epi_check(4, 1, &Metric::euclidean(4), &vec![int(0); 4]).is_err());
    }

    #[test]
    fn e1_examples() {
        let t = e1_table(4, 1).unwrap();
        assert_eq!(t.entries, vec![(0, 0, 1), (0, 2, 1), (1, 2, 1)]);
        assert!(t.figure_consistent);
        let t = e1_table(8, 4).unwrap();
        assert_eq!(t.entries, vec![(0, 0, 1), (0, 3, 1), (1, 3, 1), (1, 6, 1), (2, 6, 1)]);
        assert!(t.figure_consistent);
        assert!(e1_table(4, 3).is_err());
    }
}

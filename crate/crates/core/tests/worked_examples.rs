//! Worked examples checked against counts computed independently here.

mod common;

use cdiff::compat::{check_formal_exactness, cokernel_rank, OperatorComplex};
use cdiff::expr::binomial;
use cdiff::forms::dbar_operator;
use cdiff::jet::JetPoint;
use cdiff::spencer::{spencer_cohomology, Involutivity};
use cdiff::{CDiffOp, Vars};
use common::*;

fn choose(n: usize, k: usize) -> usize {
    binomial(n as u32, k as u32).try_into().unwrap()
}

/// Monomials ξ_x^a ξ_y^b of degree r killed by both ∂_x² and ∂_y².
fn pure_second_kernel(r: usize) -> usize {
    (0..=r).filter(|&a| a <= 1 && r - a <= 1).count()
}

#[test]
fn pure_second_derivatives_fail_at_top_degree() {
    let ctx = free(2, 1);
    let op = CDiffOp::parse("D_{x,x}\nD_{y,y}", ctx.vars()).unwrap();
    let pt = JetPoint::from_seed(&ctx, 0, 3);
    let rep = spencer_cohomology(&ctx, &op, 3, &pt).unwrap();
    // g^r vanishes for r ≥ 3, so H at (l, i = 2) is Λ² ⊗ g^{l}, and at l = 2 that is one-dimensional.
    assert_eq!(pure_second_kernel(2), 1);
    assert_eq!(pure_second_kernel(3), 0);
    assert_eq!(rep.dims[2][2], Some(pure_second_kernel(2)));
    assert_eq!(rep.involutivity(), Involutivity::Failure { l: 2, i: 2, dim: 1 });
}

#[test]
fn gradient_is_involutive() {
    for n in 2..=3 {
        let ctx = free(n, 1);
        let pt = JetPoint::from_seed(&ctx, 0, 1);
        let rep = spencer_cohomology(&ctx, &dbar_operator(n, 0), 3, &pt).unwrap();
        assert_eq!(rep.involutivity(), Involutivity::UpTo(3));
    }
}

#[test]
fn de_rham_ranks_follow_closed_forms() {
    let ctx = free(2, 1);
    let c = OperatorComplex::new(&ctx, vec![dbar_operator(2, 0), dbar_operator(2, 1)], vec![1, 1], false).unwrap();
    let pt = JetPoint::from_seed(&ctx, 0, 9);
    let rep = check_formal_exactness(&ctx, &c, 3, &pt).unwrap();
    for e in &rep.entries {
        let l = e.l;
        // Jets of functions modulo constants, and onto the top degree.
        assert_eq!(e.dims, [choose(l + 4, 2), 2 * choose(l + 3, 2), choose(l + 2, 2)]);
        assert_eq!(e.ranks, [choose(l + 4, 2) - 1, choose(l + 2, 2)]);
        assert_eq!(e.defect, 0);
    }
}

#[test]
fn truncated_de_rham_has_closed_form_defects() {
    let ctx = free(2, 1);
    let c = OperatorComplex::new(&ctx, vec![dbar_operator(2, 0)], vec![1], true).unwrap();
    let pt = JetPoint::from_seed(&ctx, 0, 2);
    let rep = check_formal_exactness(&ctx, &c, 3, &pt).unwrap();
    for e in &rep.entries {
        // Closed but non-exact jets of 1-forms: the image of d̄ into 2-forms.
        assert_eq!(e.defect, choose(e.l + 1, 2));
    }
    assert_eq!(rep.first_defect().map(|e| (e.position, e.l)), Some((1, 1)));
}

#[test]
fn gradient_cokernel_counts_curl() {
    let ctx = free(2, 1);
    let pt = JetPoint::from_seed(&ctx, 0, 4);
    for k1 in 0..=3 {
        // coker of J^{k1+1}(u) → J^{k1}(R²) is the space of k1-jets of d̄ of 1-forms: dim J^{k1-1} of one function.
        let expected = if k1 == 0 { 0 } else { choose(k1 + 1, 2) };
        assert_eq!(cokernel_rank(&ctx, &dbar_operator(2, 0), k1, &pt).unwrap(), expected);
    }
}

#[test]
fn kdv_linearization_from_terms() {
    use cdiff::{DiffPoly, MultiIndex, ScalarOp};
    let vars = Vars::new(&["x", "t"], &["u"], &["lambda"]);
    let ctx = cdiff::JetContext::free(vars).unwrap();
    let f = ctx.parse("u_t - u*u_x - u_xxx").unwrap();
    let u = u_sigma(&[]);
    let ux = u_sigma(&[0]);
    let expected = ScalarOp::from_terms([
        (MultiIndex::single(1), DiffPoly::one()),
        (MultiIndex::single(0), -&u),
        (MultiIndex::empty(), -&ux),
        (MultiIndex::repeated(0, 3), constant(-1)),
    ]);
    let lf = cdiff::op::linearize(&ctx, &[f]).unwrap();
    assert_eq!(lf, CDiffOp::scalar(expected.clone()));
    // Adjoint by hand: (a D_σ)* = (−1)^{|σ|} D_σ ∘ a.
    let adj = ScalarOp::from_terms([
        (MultiIndex::single(1), constant(-1)),
        (MultiIndex::single(0), u.clone()),
        (MultiIndex::repeated(0, 3), constant(1)),
    ]);
    assert_eq!(lf.adjoint(&ctx), CDiffOp::scalar(adj));
}

#![allow(dead_code)]

use cdiff::expr::{int, rat, Monomial};
use cdiff::forms::{increasing_tuples, HorizontalForm};
use cdiff::{CDiffOp, CoordId, DiffPoly, JetContext, MultiIndex, Rational, ScalarOp, Vars};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NAMES: [&str; 3] = ["x", "y", "z"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vars(n: usize, m: usize) -> Vars {
    let deps: Vec<&str> = ["u", "v"][..m].to_vec();
    Vars::new(&NAMES[..n], &deps, &["a"])
}

pub fn free(n: usize, m: usize) -> JetContext {
    JetContext::free(vars(n, m)).unwrap()
}

pub fn kdv() -> JetContext {
    let v = Vars::new(&["x", "t"], &["u"], &["lambda"]);
    let rhs = JetContext::free(v.clone()).unwrap().parse("u*u_x + u_xxx").unwrap();
    JetContext::evolution(v, vec![rhs]).unwrap()
}

pub fn small_rational<R: Rng>(r: &mut R) -> Rational {
    let num = r.gen_range(-9i64..=9);
    rat(num, r.gen_range(1..=4))
}

/// Random polynomial in the coordinates a point of order `order` assigns.
pub fn poly<R: Rng>(ctx: &JetContext, order: usize, terms: usize, r: &mut R) -> DiffPoly {
    let coords = ctx.point_coords(order);
    let mut p = DiffPoly::zero();
    for _ in 0..r.gen_range(0..=terms) {
        let mut m = Monomial::one();
        for _ in 0..r.gen_range(0..=2) {
            let c = coords[r.gen_range(0..coords.len())].clone();
            m = m.mul(&Monomial::var(c));
        }
        p += &DiffPoly::monomial(m, small_rational(r));
    }
    p
}

pub fn scalar_op<R: Rng>(ctx: &JetContext, max_order: usize, r: &mut R) -> ScalarOp {
    let mut op = ScalarOp::zero();
    for _ in 0..r.gen_range(0..=3) {
        let len = r.gen_range(0..=max_order);
        let sigma = MultiIndex::new((0..len).map(|_| r.gen_range(0..ctx.n())).collect());
        op.add_term(sigma, &poly(ctx, 1, 2, r));
    }
    op
}

pub fn cdiff_op<R: Rng>(ctx: &JetContext, rows: usize, cols: usize, max_order: usize, r: &mut R) -> CDiffOp {
    CDiffOp::from_fn(rows, cols, |_, _| scalar_op(ctx, max_order, r))
}

pub fn form<R: Rng>(ctx: &JetContext, degree: usize, r: &mut R) -> HorizontalForm {
    let n = ctx.n();
    let mut w = HorizontalForm::zero(n, degree);
    for t in increasing_tuples(n, degree) {
        if r.gen_bool(0.7) {
            w = w.add(&HorizontalForm::monomial(n, &t, poly(ctx, 1, 3, r)));
        }
    }
    w
}

pub fn vector<R: Rng>(ctx: &JetContext, len: usize, r: &mut R) -> Vec<DiffPoly> {
    (0..len).map(|_| poly(ctx, 1, 3, r)).collect()
}

/// `Σ_s a_s b_s`.
pub fn dot(a: &[DiffPoly], b: &[DiffPoly]) -> DiffPoly {
    a.iter().zip(b).fold(DiffPoly::zero(), |acc, (x, y)| &acc + &(x * y))
}

pub fn constant(c: i64) -> DiffPoly {
    DiffPoly::constant(int(c))
}

pub fn u_sigma(sigma: &[usize]) -> DiffPoly {
    DiffPoly::coord(CoordId::jet(0, MultiIndex::new(sigma.to_vec())))
}

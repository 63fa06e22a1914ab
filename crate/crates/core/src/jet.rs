//! Jet-space contexts, total derivatives and exact-rational jet points.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::{fmt_rational, CoordId, DiffPoly, MultiIndex, Rational, Vars};
use crate::parse::parse_expr;

/// Index of the space variable in evolution mode.
pub const SPACE: usize = 0;
/// Index of the time variable in evolution mode.
pub const TIME: usize = 1;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mode {
    Free,
    /// `u^j_t = rhs[j]` with right-hand sides in internal coordinates
    /// `x, t, u^j_{x…x}` and parameters.
    Evolution { rhs: Vec<DiffPoly> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetContext {
    vars: Vars,
    mode: Mode,
}

/// Names must be distinct identifiers other than the reserved `D`.
pub fn check_names(vars: &Vars) -> Result<()> {
    let mut seen = std::collections::BTreeSet::new();
    let all = vars.independents.iter().chain(&vars.dependents).chain(&vars.parameters);
    for name in all {
        if name == "D" {
            return Err(Error::Context("`D` is reserved for total derivatives".into()));
        }
        let ok = name.chars().next().is_some_and(char::is_alphabetic) && name.chars().all(char::is_alphanumeric);
        if !ok {
            return Err(Error::Context(format!("invalid name `{}`", name)));
        }
        if !seen.insert(name.as_str()) {
            return Err(Error::Context(format!("name `{}` declared twice", name)));
        }
    }
    Ok(())
}

/// True for coordinates that survive on an evolution equation.
fn is_internal(c: &CoordId) -> bool {
    match c {
        CoordId::Jet { sigma, .. } => sigma.indices().iter().all(|&i| i == SPACE),
        _ => true,
    }
}

impl JetContext {
    pub fn free(vars: Vars) -> Result<Self> {
        check_names(&vars)?;
        if vars.n() == 0 {
            return Err(Error::Context("at least one independent variable is required".into()));
        }
        Ok(JetContext { vars, mode: Mode::Free })
    }

    pub fn evolution(vars: Vars, rhs: Vec<DiffPoly>) -> Result<Self> {
        check_names(&vars)?;
        if vars.n() != 2 {
            return Err(Error::Context("evolution mode needs exactly two independent variables (x, t)".into()));
        }
        if rhs.len() != vars.m() {
            return Err(Error::Context(format!(
                "evolution mode needs one right-hand side per dependent variable ({} given, {} expected)",
                rhs.len(),
                vars.m()
            )));
        }
        for f in &rhs {
            if let Some(c) = f.coords().into_iter().find(|c| !is_internal(c)) {
                return Err(Error::Context(format!(
                    "right-hand side uses `{}`, which is not an internal coordinate",
                    vars.coord_name(&c)
                )));
            }
        }
        Ok(JetContext { vars, mode: Mode::Evolution { rhs } })
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn n(&self) -> usize {
        self.vars.n()
    }

    pub fn m(&self) -> usize {
        self.vars.m()
    }

    pub fn is_evolution(&self) -> bool {
        matches!(self.mode, Mode::Evolution { .. })
    }

    /// The same variables on the free jet space.
    pub fn free_context(&self) -> JetContext {
        JetContext { vars: self.vars.clone(), mode: Mode::Free }
    }

    pub fn parse(&self, text: &str) -> Result<DiffPoly> {
        Ok(parse_expr(text, &self.vars)?)
    }

    pub fn fmt(&self, p: &DiffPoly) -> String {
        self.vars.fmt_poly(p)
    }

    /// Rewrites `f` in internal coordinates (identity in free mode).
    pub fn restrict(&self, f: &DiffPoly) -> DiffPoly {
        if !self.is_evolution() {
            return f.clone();
        }
        f.substitute(|c| match c {
            CoordId::Jet { dep, sigma } if !is_internal(c) => {
                let times = sigma.indices().iter().filter(|&&i| i == TIME).count();
                let space = sigma.order() - times;
                let mut g = DiffPoly::coord(CoordId::jet(*dep, MultiIndex::repeated(SPACE, space)));
                for _ in 0..times {
                    g = self.evolution_dt(&g);
                }
                Some(g)
            }
            _ => None,
        })
    }

    fn free_derivative(i: usize, f: &DiffPoly) -> DiffPoly {
        f.derive_with(|c| match c {
            CoordId::Independent(k) if *k == i => DiffPoly::one(),
            CoordId::Jet { dep, sigma } => DiffPoly::coord(CoordId::jet(*dep, sigma.with(i))),
            _ => DiffPoly::zero(),
        })
    }

    /// D_t on an internal polynomial: `u^j_{x^a} ↦ D_x^a(f_j)`.
    fn evolution_dt(&self, f: &DiffPoly) -> DiffPoly {
        let Mode::Evolution { rhs } = &self.mode else { unreachable!("evolution mode") };
        f.derive_with(|c| match c {
            CoordId::Independent(k) if *k == TIME => DiffPoly::one(),
            CoordId::Jet { dep, sigma } => {
                let mut g = rhs[*dep].clone();
                for _ in 0..sigma.order() {
                    g = Self::free_derivative(SPACE, &g);
                }
                g
            }
            _ => DiffPoly::zero(),
        })
    }

    /// The total derivative D_i. In evolution mode the result is expressed
    /// in internal coordinates.
    pub fn total_derivative(&self, i: usize, f: &DiffPoly) -> DiffPoly {
        assert!(i < self.n(), "independent index {} out of range", i);
        match &self.mode {
            Mode::Free => Self::free_derivative(i, f),
            Mode::Evolution { .. } => {
                let g = self.restrict(f);
                if i == SPACE {
                    Self::free_derivative(SPACE, &g)
                } else {
                    self.evolution_dt(&g)
                }
            }
        }
    }

    /// D_σ = D_{i₁} ∘ … ∘ D_{i_r}.
    pub fn total_derivative_sigma(&self, sigma: &MultiIndex, f: &DiffPoly) -> DiffPoly {
        let mut g = self.restrict(f);
        for &i in sigma.indices() {
            g = self.total_derivative(i, &g);
        }
        g
    }

    /// Coordinates a jet point of the given order assigns, in a fixed order.
    pub fn point_coords(&self, order_bound: usize) -> Vec<CoordId> {
        let n = self.n();
        let mut out: Vec<CoordId> = (0..n).map(CoordId::Independent).collect();
        let sigmas: Vec<MultiIndex> = if self.is_evolution() {
            (0..=order_bound).map(|r| MultiIndex::repeated(SPACE, r)).collect()
        } else {
            MultiIndex::up_to_order(n, order_bound)
        };
        for sigma in &sigmas {
            for j in 0..self.m() {
                out.push(CoordId::jet(j, sigma.clone()));
            }
        }
        out.extend((0..self.vars.parameters.len()).map(CoordId::Parameter));
        out
    }
}

/// An exact-rational assignment of jet coordinates up to `order_bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetPoint {
    order_bound: usize,
    values: BTreeMap<CoordId, Rational>,
    vars: Vars,
}

fn small_rational<R: Rng>(rng: &mut R) -> Rational {
    let num: i64 = rng.gen_range(1..=9) * if rng.gen_bool(0.5) { 1 } else { -1 };
    let den: i64 = rng.gen_range(1..=4);
    Rational::new(BigInt::from(num), BigInt::from(den))
}

impl JetPoint {
    /// Random point with numerators in [−9, 9] \ {0} and denominators in [1, 4].
    pub fn random<R: Rng>(ctx: &JetContext, order_bound: usize, rng: &mut R) -> JetPoint {
        let values = ctx.point_coords(order_bound).into_iter().map(|c| (c, small_rational(rng))).collect();
        JetPoint { order_bound, values, vars: ctx.vars.clone() }
    }

    pub fn from_seed(ctx: &JetContext, order_bound: usize, seed: u64) -> JetPoint {
        JetPoint::random(ctx, order_bound, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// The three-point generic sample drawn from one seeded stream.
    pub fn generic(ctx: &JetContext, order_bound: usize, seed: u64) -> Vec<JetPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..3).map(|_| JetPoint::random(ctx, order_bound, &mut rng)).collect()
    }

    /// Builds a point from explicit values. The order bound is the largest
    /// order up to which every jet coordinate is assigned.
    pub fn from_values(ctx: &JetContext, values: BTreeMap<CoordId, Rational>) -> Result<JetPoint> {
        let mut order_bound = None;
        let max_order = values.keys().filter_map(CoordId::jet_order).max().unwrap_or(0);
        for r in 0..=max_order {
            if ctx.point_coords(r).iter().all(|c| values.contains_key(c)) {
                order_bound = Some(r);
            } else {
                break;
            }
        }
        let order_bound = order_bound.ok_or_else(|| {
            let missing = ctx.point_coords(0).into_iter().find(|c| !values.contains_key(c)).expect("incomplete");
            Error::MissingCoordinate(ctx.vars.coord_name(&missing))
        })?;
        Ok(JetPoint { order_bound, values, vars: ctx.vars.clone() })
    }

    /// Parses lines `coord = rational`; `#` starts a comment.
    pub fn parse(ctx: &JetContext, text: &str) -> Result<JetPoint> {
        let mut values = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let dsl = |message: String| Error::Dsl { line: k + 1, message };
            let (lhs, rhs) = line.split_once('=').ok_or_else(|| dsl("expected `coord = value`".into()))?;
            let coord = parse_expr(lhs.trim(), &ctx.vars).map_err(|e| dsl(e.to_string()))?;
            let c = match coord.coords().into_iter().collect::<Vec<_>>().as_slice() {
                [c] if coord == DiffPoly::coord(c.clone()) => c.clone(),
                _ => return Err(dsl(format!("`{}` is not a single coordinate", lhs.trim()))),
            };
            let value = parse_expr(rhs.trim(), &ctx.vars)
                .map_err(|e| dsl(e.to_string()))?
                .as_constant()
                .ok_or_else(|| dsl("value must be a rational constant".into()))?;
            values.insert(c, value);
        }
        JetPoint::from_values(ctx, values)
    }

    pub fn order_bound(&self) -> usize {
        self.order_bound
    }

    pub fn value(&self, c: &CoordId) -> Result<Rational> {
        if let Some(r) = c.jet_order() {
            if r > self.order_bound {
                return Err(Error::BeyondOrderBound {
                    name: self.vars.coord_name(c),
                    order: r,
                    bound: self.order_bound,
                });
            }
        }
        self.values.get(c).cloned().ok_or_else(|| Error::MissingCoordinate(self.vars.coord_name(c)))
    }

    pub fn evaluate(&self, f: &DiffPoly) -> Result<Rational> {
        if f.is_zero() {
            return Ok(Rational::zero());
        }
        let mut failure = None;
        let out = f.eval_with(|c| match self.value(c) {
            Ok(v) => Some(v),
            Err(e) => {
                failure.get_or_insert(e);
                None
            }
        });
        match out {
            Ok(v) => Ok(v),
            Err(_) => Err(failure.expect("evaluation failure recorded")),
        }
    }

    /// Point-file rendering, one `coord = value` line per coordinate.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (c, v) in &self.values {
            s.push_str(&format!("{} = {}\n", self.vars.coord_name(c), fmt_rational(v)));
        }
        s
    }
}

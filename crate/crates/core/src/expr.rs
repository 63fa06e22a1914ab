//! Differential polynomials over ℚ in jet coordinates.
//!
//! A [`DiffPoly`] is a sparse polynomial whose variables are [`CoordId`]s:
//! independent variables `x_i`, jet coordinates `u^j_σ` and free parameters.
//! Terms are kept in a canonical map so structural equality is polynomial
//! equality.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number. Always normalized (positive denominator, reduced).
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A multi-index σ = i₁…i_r stored as a sorted list of independent-variable
/// indices (0-based). Total derivatives commute, so the sorted list is the
/// canonical representative.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn new(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        MultiIndex(indices)
    }

    pub fn single(i: usize) -> Self {
        MultiIndex(vec![i])
    }

    pub fn repeated(i: usize, times: usize) -> Self {
        MultiIndex(vec![i; times])
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    /// σ + i.
    pub fn with(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&e| e <= i);
        v.insert(pos, i);
        MultiIndex(v)
    }

    /// σ + τ.
    pub fn merge(&self, other: &MultiIndex) -> Self {
        let mut v = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&x), Some(&&y)) => {
                    if x <= y {
                        v.push(x);
                        a.next();
                    } else {
                        v.push(y);
                        b.next();
                    }
                }
                (Some(&&x), None) => {
                    v.push(x);
                    a.next();
                }
                (None, Some(&&y)) => {
                    v.push(y);
                    b.next();
                }
                (None, None) => break,
            }
        }
        MultiIndex(v)
    }

    /// Multiplicity of each index `0..n`.
    pub fn counts(&self, n: usize) -> Vec<u32> {
        let mut c = vec![0u32; n];
        for &i in &self.0 {
            if i >= c.len() {
                c.resize(i + 1, 0);
            }
            c[i] += 1;
        }
        c
    }

    pub fn from_counts(counts: &[u32]) -> Self {
        let mut v = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            v.extend(std::iter::repeat(i).take(c as usize));
        }
        MultiIndex(v)
    }

    /// σ − τ if τ ≤ σ as multisets.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut rest = self.0.clone();
        for i in &other.0 {
            let pos = rest.iter().position(|e| e == i)?;
            rest.remove(pos);
        }
        Some(MultiIndex(rest))
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// All splittings σ = α + β as multisets together with the multinomial
    /// weight `∏ C(σ_i, α_i)`, so that
    /// `D_σ(f·g) = Σ weight · D_α(f) · D_β(g)`.
    pub fn splits(&self) -> Vec<(MultiIndex, MultiIndex, BigInt)> {
        let top = self.0.last().map_or(0, |&m| m + 1);
        let counts = self.counts(top);
        let mut out = Vec::new();
        let mut alpha = vec![0u32; top];
        loop {
            let mut weight = BigInt::one();
            let mut beta = vec![0u32; top];
            for i in 0..top {
                weight *= binomial(counts[i], alpha[i]);
                beta[i] = counts[i] - alpha[i];
            }
            out.push((
                MultiIndex::from_counts(&alpha),
                MultiIndex::from_counts(&beta),
                weight,
            ));
            // odometer increment
            let mut pos = 0;
            loop {
                if pos == top {
                    return out;
                }
                if alpha[pos] < counts[pos] {
                    alpha[pos] += 1;
                    break;
                }
                alpha[pos] = 0;
                pos += 1;
            }
        }
    }

    /// All multi-indices of order exactly `r` over `n` variables, ascending.
    pub fn all_of_order(n: usize, r: usize) -> Vec<MultiIndex> {
        fn rec(n: usize, start: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if left == 0 {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(n, i, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            if r == 0 {
                out.push(MultiIndex::empty());
            }
            return out;
        }
        rec(n, 0, r, &mut Vec::new(), &mut out);
        out
    }

    /// All multi-indices of order `≤ r`, by order then lexicographically.
    pub fn up_to_order(n: usize, r: usize) -> Vec<MultiIndex> {
        (0..=r).flat_map(|k| MultiIndex::all_of_order(n, k)).collect()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// A coordinate on the jet space. Variant order fixes the printing order:
/// independents, then jets by `(dependent, σ)`, then parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoordId {
    Independent(usize),
    Jet { dep: usize, sigma: MultiIndex },
    Parameter(usize),
}

impl CoordId {
    pub fn jet(dep: usize, sigma: MultiIndex) -> Self {
        CoordId::Jet { dep, sigma }
    }

    pub fn dependent(dep: usize) -> Self {
        CoordId::Jet { dep, sigma: MultiIndex::empty() }
    }

    pub fn jet_order(&self) -> Option<usize> {
        match self {
            CoordId::Jet { sigma, .. } => Some(sigma.order()),
            _ => None,
        }
    }
}

/// Variable names of a jet space.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Vars {
    pub independents: Vec<String>,
    pub dependents: Vec<String>,
    pub parameters: Vec<String>,
}

impl Vars {
    pub fn new<S: AsRef<str>>(independents: &[S], dependents: &[S], parameters: &[S]) -> Self {
        let own = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect();
        Vars {
            independents: own(independents),
            dependents: own(dependents),
            parameters: own(parameters),
        }
    }

    pub fn n(&self) -> usize {
        self.independents.len()
    }

    pub fn m(&self) -> usize {
        self.dependents.len()
    }

    /// Whether `u_xxt` style suffixes are unambiguous.
    pub fn short_suffixes(&self) -> bool {
        self.independents.iter().all(|s| s.chars().count() == 1)
    }

    pub fn independent_index(&self, name: &str) -> Option<usize> {
        self.independents.iter().position(|s| s == name)
    }

    pub fn suffix(&self, sigma: &MultiIndex) -> String {
        if self.short_suffixes() {
            sigma.indices().iter().map(|&i| self.independents[i].as_str()).collect()
        } else {
            let names: Vec<&str> = sigma.indices().iter().map(|&i| self.independents[i].as_str()).collect();
            format!("{{{}}}", names.join(","))
        }
    }

    pub fn coord_name(&self, c: &CoordId) -> String {
        match c {
            CoordId::Independent(i) => self.independents[*i].clone(),
            CoordId::Parameter(p) => self.parameters[*p].clone(),
            CoordId::Jet { dep, sigma } if sigma.is_empty() => self.dependents[*dep].clone(),
            CoordId::Jet { dep, sigma } => format!("{}_{}", self.dependents[*dep], self.suffix(sigma)),
        }
    }

    pub fn fmt_poly(&self, p: &DiffPoly) -> String {
        join_signed(&p.signed_pieces(self))
    }
}

/// Joins `(negative, body)` pieces into `a - b + c`, `-a + b`, or `0`.
pub(crate) fn join_signed(pieces: &[(bool, String)]) -> String {
    if pieces.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (neg, body)) in pieces.iter().enumerate() {
        match (k, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(body);
    }
    out
}

/// A power product of coordinates, sorted by coordinate, exponents > 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(CoordId, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(c: CoordId) -> Self {
        Monomial(vec![(c, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(CoordId, u32)] {
        &self.0
    }

    pub fn exponent(&self, c: &CoordId) -> u32 {
        self.0.iter().find(|(v, _)| v == c).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: Vec<(CoordId, u32)> = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Removes one power of the factor at `pos`.
    fn lower(&self, pos: usize) -> Monomial {
        let mut v = self.0.clone();
        if v[pos].1 == 1 {
            v.remove(pos);
        } else {
            v[pos].1 -= 1;
        }
        Monomial(v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Differential polynomial: finite map monomial → nonzero rational.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn from_int(c: i64) -> Self {
        DiffPoly::constant(int(c))
    }

    pub fn coord(c: CoordId) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(Monomial::var(c), Rational::one());
        p
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut acc = DiffPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Every coordinate occurring in the polynomial.
    pub fn coords(&self) -> BTreeSet<CoordId> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(c, _)| c.clone()))
            .collect()
    }

    /// Highest jet order occurring (0 when no jet coordinate appears).
    pub fn order(&self) -> usize {
        self.coords().iter().filter_map(CoordId::jet_order).max().unwrap_or(0)
    }

    /// Formal partial derivative treating all coordinates as independent.
    pub fn partial(&self, c: &CoordId) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, k) in &self.terms {
            if let Some(pos) = m.0.iter().position(|(v, _)| v == c) {
                let e = m.0[pos].1;
                out.add_term(m.lower(pos), k * Rational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Applies the derivation determined by its values on coordinates
    /// (chain rule through every factor).
    pub fn derive_with<F>(&self, mut image: F) -> DiffPoly
    where
        F: FnMut(&CoordId) -> DiffPoly,
    {
        let mut cache: BTreeMap<CoordId, DiffPoly> = BTreeMap::new();
        let mut out = DiffPoly::zero();
        for (m, k) in &self.terms {
            for (pos, (c, e)) in m.0.iter().enumerate() {
                let dc = cache.entry(c.clone()).or_insert_with(|| image(c));
                if dc.is_zero() {
                    continue;
                }
                let coef = k * Rational::from_integer(BigInt::from(*e));
                let rest = m.lower(pos);
                for (dm, dk) in &dc.terms {
                    out.add_term(rest.mul(dm), &coef * dk);
                }
            }
        }
        out
    }

    /// Substitutes polynomials for coordinates; coordinates mapped to `None`
    /// are kept.
    pub fn substitute<F>(&self, mut image: F) -> DiffPoly
    where
        F: FnMut(&CoordId) -> Option<DiffPoly>,
    {
        let mut cache: BTreeMap<CoordId, Option<DiffPoly>> = BTreeMap::new();
        let mut out = DiffPoly::zero();
        for (m, k) in &self.terms {
            let mut acc = DiffPoly::constant(k.clone());
            for (c, e) in &m.0 {
                let img = cache.entry(c.clone()).or_insert_with(|| image(c));
                let factor = match img {
                    Some(p) => p.pow(*e),
                    None => DiffPoly::monomial(Monomial(vec![(c.clone(), *e)]), Rational::one()),
                };
                acc = &acc * &factor;
            }
            out += &acc;
        }
        out
    }

    /// Evaluates with the given coordinate values; reports the first
    /// coordinate that has no value.
    pub fn eval_with<F>(&self, mut value: F) -> Result<Rational, CoordId>
    where
        F: FnMut(&CoordId) -> Option<Rational>,
    {
        let mut total = Rational::zero();
        for (m, k) in &self.terms {
            let mut acc = k.clone();
            for (c, e) in &m.0 {
                let v = value(c).ok_or_else(|| c.clone())?;
                acc *= num_traits::pow(v, *e as usize);
            }
            total += acc;
        }
        Ok(total)
    }

    pub(crate) fn signed_pieces(&self, vars: &Vars) -> Vec<(bool, String)> {
        self.terms
            .iter()
            .map(|(m, k)| {
                let neg = k.is_negative();
                let abs = k.abs();
                let mut body = String::new();
                let mono = fmt_monomial(m, vars);
                if m.is_one() {
                    body.push_str(&fmt_rational(&abs));
                } else if abs.is_one() {
                    body.push_str(&mono);
                } else {
                    let _ = write!(body, "{}*{}", fmt_rational(&abs), mono);
                }
                (neg, body)
            })
            .collect()
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_monomial(m: &Monomial, vars: &Vars) -> String {
    m.0.iter()
        .map(|(c, e)| {
            let name = vars.coord_name(c);
            if *e == 1 {
                name
            } else {
                format!("{}^{}", name, e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl From<Rational> for DiffPoly {
    fn from(c: Rational) -> Self {
        DiffPoly::constant(c)
    }
}

impl From<CoordId> for DiffPoly {
    fn from(c: CoordId) -> Self {
        DiffPoly::coord(c)
    }
}

impl AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        for (m, k) in &rhs.terms {
            self.add_term(m.clone(), k.clone());
        }
    }
}

impl SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        for (m, k) in &rhs.terms {
            self.add_term(m.clone(), -k);
        }
    }
}

impl Add<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ka) in &self.terms {
            for (mb, kb) in &rhs.terms {
                out.add_term(ma.mul(mb), ka * kb);
            }
        }
        out
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), -k)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr<DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $f(self, rhs: DiffPoly) -> DiffPoly {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $f(self, rhs: &DiffPoly) -> DiffPoly {
                (&self).$f(rhs)
            }
        }
        impl $tr<DiffPoly> for &DiffPoly {
            type Output = DiffPoly;
            fn $f(self, rhs: DiffPoly) -> DiffPoly {
                self.$f(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> DiffPoly {
        DiffPoly::coord(CoordId::dependent(0))
    }
    fn ux() -> DiffPoly {
        DiffPoly::coord(CoordId::jet(0, MultiIndex::single(0)))
    }

    #[test]
    fn multi_index_is_canonical() {
        assert_eq!(MultiIndex::new(vec![1, 0, 1]), MultiIndex::new(vec![0, 1, 1]));
        assert_eq!(MultiIndex::single(1).with(0), MultiIndex::new(vec![0, 1]));
        assert_eq!(MultiIndex::new(vec![2, 0]).merge(&MultiIndex::new(vec![1, 0])).indices(), &[0, 0, 1, 2]);
    }

    #[test]
    fn splits_carry_multinomial_weights() {
        // D_xx(fg) = f_xx g + 2 f_x g_x + f g_xx
        let s = MultiIndex::repeated(0, 2).splits();
        let weights: Vec<i64> = s.iter().map(|(_, _, w)| w.try_into().unwrap()).collect();
        assert_eq!(weights, vec![1, 2, 1]);
        // D_xt: four splits, all weight 1
        let s = MultiIndex::new(vec![0, 1]).splits();
        assert_eq!(s.len(), 4);
        assert!(s.iter().all(|(_, _, w)| w.is_one()));
    }

    #[test]
    fn multi_index_enumeration_counts() {
        // C(n + r - 1, r)
        assert_eq!(MultiIndex::all_of_order(2, 3).len(), 4);
        assert_eq!(MultiIndex::all_of_order(3, 2).len(), 6);
        // C(n + r, n)
        assert_eq!(MultiIndex::up_to_order(2, 2).len(), 6);
        assert_eq!(MultiIndex::up_to_order(4, 3).len(), 35);
    }

    #[test]
    fn partial_power_rule() {
        let p = &u() * &ux();
        assert_eq!(p.partial(&CoordId::dependent(0)), ux());
        assert_eq!(ux().partial(&CoordId::Independent(0)), DiffPoly::zero());
        let sq = ux().pow(2);
        assert_eq!(sq.partial(&CoordId::jet(0, MultiIndex::single(0))), ux().scale(&int(2)));
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let p = &u() - &u();
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
    }

    #[test]
    fn evaluate_reports_missing_coordinate() {
        let p = &u() * &ux();
        let v = p
            .eval_with(|c| match c {
                CoordId::Jet { sigma, .. } if sigma.is_empty() => Some(int(2)),
                CoordId::Jet { .. } => Some(rat(3, 2)),
                _ => None,
            })
            .unwrap();
        assert_eq!(v, int(3));
        let uxx = DiffPoly::coord(CoordId::jet(0, MultiIndex::repeated(0, 2)));
        let err = uxx.eval_with(|c| (c == &CoordId::dependent(0)).then(|| int(1))).unwrap_err();
        assert_eq!(err, CoordId::jet(0, MultiIndex::repeated(0, 2)));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(binomial(4, 0), BigInt::one());
        assert_eq!(binomial(2, 3), BigInt::zero());
    }
}

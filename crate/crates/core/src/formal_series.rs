//! Sparse truncated elements of the completed group algebra `ℂ̄[P_K]`.
//!
//! A [`TruncatedSeries`] has a fixed level `K` and stores finitely many
//! monomials `e^μ`, keyed by `(μ(h₁)·y_denom, μ(d)·q_denom)`. Alongside the
//! terms it carries a completeness window:
//!
//! * `g2_floor`: the stored terms agree with the represented element on
//!   every monomial of grade `≥ g2_floor`. `None` means the series is exact
//!   (a finite sum, known everywhere).
//! * `g2_ceil`: an upper bound for the grades of the represented element.
//!   `None` means the element is zero.
//!
//! Grades are measured in scaled units: with `L = lcm(y_denom, q_denom)` a
//! monomial with key `(A, M)` has scaled grade `A·L/y_denom + 4M·L/q_denom`,
//! which equals `L·g2(μ)`. When both denominators are 1 this is plain `g2`.
//!
//! Window rules:
//! * sum: floor is the larger floor, ceil is the larger ceil;
//! * product: floor is `max(floor_f + ceil_g, floor_g + ceil_f)`, ceil is
//!   `ceil_f + ceil_g`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeff::{parse_rational, Coefficient};
use crate::error::{Error, Result};
use crate::weight_lattice::Weight;

type Key = (i64, i64);

/// Work size above which products are split across threads.
const PARALLEL_PRODUCT_THRESHOLD: usize = 400_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    level: i64,
    y_denom: i64,
    q_denom: i64,
    g2_floor: Option<i64>,
    g2_ceil: Option<i64>,
    terms: BTreeMap<Key, Coefficient>,
}

fn max_floor(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.max(y)),
    }
}

fn max_ceil(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(x.max(y)),
    }
}

/// Sign `s` of a factor `(1 + s·e^{−β})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorSign {
    Plus,
    Minus,
}

/// One factor `(1 s e^{−β})^{−power}` of a [`tau1_expand`] call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Tau1Factor {
    pub beta: Weight,
    pub sign: FactorSign,
    pub power: u32,
}

impl Tau1Factor {
    pub fn new(beta: impl Into<Weight>, sign: FactorSign, power: u32) -> Self {
        Tau1Factor { beta: beta.into(), sign, power }
    }
}

/// First disagreement found by [`equal_on_window`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Difference {
    pub h1: String,
    pub d: String,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Difference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "h1={} d={}: {} != {}", self.h1, self.d, self.lhs, self.rhs)
    }
}

/// Outcome of comparing two series on their common window.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowComparison {
    pub equal: bool,
    /// The compared window floor in scaled units, `None` if both are exact.
    pub window: Option<i64>,
    pub first_difference: Option<Difference>,
}

impl TruncatedSeries {
    /// The exact zero element of the given level.
    pub fn zero(level: i64) -> Self {
        TruncatedSeries { level, y_denom: 1, q_denom: 1, g2_floor: None, g2_ceil: None, terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Weight::ZERO)
    }

    /// The exact monomial `e^λ`.
    pub fn monomial(l: Weight) -> Self {
        Self::monomial_with(l, Coefficient::one())
    }

    pub fn monomial_with(l: Weight, c: Coefficient) -> Self {
        let mut s = Self::zero(l.k);
        if !c.is_zero() {
            s.terms.insert((l.a, l.m), c);
            s.g2_ceil = Some(l.g2());
        }
        s
    }

    /// Build a series from weight/coefficient pairs. Terms below `g2_floor`
    /// are dropped; the ceiling is the larger of `ceil_hint` and the top
    /// stored grade.
    pub fn from_terms<I>(level: i64, terms: I, g2_floor: Option<i64>, ceil_hint: Option<i64>) -> Result<Self>
    where
        I: IntoIterator<Item = (Weight, Coefficient)>,
    {
        let mut s = Self::zero(level);
        s.g2_floor = g2_floor;
        for (w, c) in terms {
            if w.k != level {
                return Err(Error::LevelMismatch(level, w.k));
            }
            s.add_term_key((w.a, w.m), c);
        }
        s.g2_ceil = max_ceil(ceil_hint, s.top_grade());
        s.drop_below_floor();
        Ok(s)
    }

    /// Build a series with explicit exponent denominators from scaled keys.
    pub fn from_scaled_terms<I>(
        level: i64,
        y_denom: i64,
        q_denom: i64,
        terms: I,
        g2_floor: Option<i64>,
        ceil_hint: Option<i64>,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = ((i64, i64), Coefficient)>,
    {
        if y_denom < 1 || q_denom < 1 {
            return Err(Error::Domain("exponent denominators must be positive".into()));
        }
        let mut s = Self::zero(level);
        s.y_denom = y_denom;
        s.q_denom = q_denom;
        s.g2_floor = g2_floor;
        for (k, c) in terms {
            s.add_term_key(k, c);
        }
        s.g2_ceil = max_ceil(ceil_hint, s.top_grade());
        s.drop_below_floor();
        Ok(s)
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    pub fn y_denom(&self) -> i64 {
        self.y_denom
    }

    pub fn q_denom(&self) -> i64 {
        self.q_denom
    }

    pub fn g2_floor(&self) -> Option<i64> {
        self.g2_floor
    }

    pub fn g2_ceil(&self) -> Option<i64> {
        self.g2_ceil
    }

    pub fn is_exact(&self) -> bool {
        self.g2_floor.is_none()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `lcm(y_denom, q_denom)`, the number of scaled grade units per unit of `g2`.
    pub fn grade_scale(&self) -> i64 {
        self.y_denom.lcm(&self.q_denom)
    }

    pub fn has_unit_denominators(&self) -> bool {
        self.y_denom == 1 && self.q_denom == 1
    }

    fn grade_of(&self, k: &Key) -> i64 {
        let l = self.grade_scale();
        k.0 * (l / self.y_denom) + 4 * k.1 * (l / self.q_denom)
    }

    /// Scaled grade of a weight-valued key `(A, M)`.
    pub fn scaled_grade(&self, a_scaled: i64, m_scaled: i64) -> i64 {
        self.grade_of(&(a_scaled, m_scaled))
    }

    fn top_grade(&self) -> Option<i64> {
        self.terms.keys().map(|k| self.grade_of(k)).max()
    }

    fn add_term_key(&mut self, k: Key, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    fn drop_below_floor(&mut self) {
        if let Some(f) = self.g2_floor {
            let l = self.grade_scale();
            let (yd, qd) = (self.y_denom, self.q_denom);
            self.terms.retain(|k, _| k.0 * (l / yd) + 4 * k.1 * (l / qd) >= f);
        }
    }

    /// Iterate over `((A, M), coefficient)` in key order.
    pub fn iter(&self) -> impl Iterator<Item = (&(i64, i64), &Coefficient)> {
        self.terms.iter()
    }

    /// Iterate over `(weight, coefficient)`. Requires unit denominators.
    pub fn weight_terms(&self) -> impl Iterator<Item = (Weight, &Coefficient)> + '_ {
        assert!(self.has_unit_denominators(), "weight_terms needs unit exponent denominators");
        let lvl = self.level;
        self.terms.iter().map(move |(k, c)| (Weight::new(k.0, lvl, k.1), c))
    }

    /// Terms sorted by descending scaled grade, ties by key.
    pub fn sorted_terms(&self) -> Vec<(i64, (i64, i64), &Coefficient)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, c)| (self.grade_of(k), *k, c)).collect();
        v.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
        v
    }

    /// Coefficient of `e^λ` (zero when absent). Requires unit denominators.
    pub fn coeff(&self, l: &Weight) -> Coefficient {
        assert!(self.has_unit_denominators());
        if l.k != self.level {
            return Coefficient::zero();
        }
        self.terms.get(&(l.a, l.m)).cloned().unwrap_or_else(Coefficient::zero)
    }

    /// Coefficient at a scaled key.
    pub fn coeff_scaled(&self, a_scaled: i64, m_scaled: i64) -> Coefficient {
        self.terms.get(&(a_scaled, m_scaled)).cloned().unwrap_or_else(Coefficient::zero)
    }

    /// Re-express the series with larger exponent denominators. The new
    /// denominators must be multiples of the current ones.
    pub fn with_denominators(&self, y_denom: i64, q_denom: i64) -> Result<Self> {
        if y_denom % self.y_denom != 0 || q_denom % self.q_denom != 0 {
            return Err(Error::Domain(format!(
                "cannot rescale denominators ({},{}) to ({y_denom},{q_denom})",
                self.y_denom, self.q_denom
            )));
        }
        if y_denom == self.y_denom && q_denom == self.q_denom {
            return Ok(self.clone());
        }
        let fy = y_denom / self.y_denom;
        let fq = q_denom / self.q_denom;
        let old_l = self.grade_scale();
        let new_l = y_denom.lcm(&q_denom);
        let gs = new_l / old_l;
        let terms = self.terms.iter().map(|(k, c)| ((k.0 * fy, k.1 * fq), c.clone())).collect();
        Ok(TruncatedSeries {
            level: self.level,
            y_denom,
            q_denom,
            g2_floor: self.g2_floor.map(|f| f * gs),
            g2_ceil: self.g2_ceil.map(|c| c * gs),
            terms,
        })
    }

    fn unify(&self, other: &Self) -> Result<(Self, Self)> {
        let yd = self.y_denom.lcm(&other.y_denom);
        let qd = self.q_denom.lcm(&other.q_denom);
        Ok((self.with_denominators(yd, qd)?, other.with_denominators(yd, qd)?))
    }

    /// Raise the window floor to `floor` (scaled units) and drop terms below.
    pub fn truncate(&self, floor: i64) -> Self {
        let mut s = self.clone();
        s.g2_floor = max_floor(s.g2_floor, Some(floor));
        s.drop_below_floor();
        s
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let (mut a, b) = self.unify(other)?;
        a.g2_floor = max_floor(a.g2_floor, b.g2_floor);
        a.g2_ceil = max_ceil(a.g2_ceil, b.g2_ceil);
        for (k, c) in b.terms {
            a.add_term_key(k, c);
        }
        a.drop_below_floor();
        Ok(a)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for v in s.terms.values_mut() {
            *v = -std::mem::replace(v, Coefficient::zero());
        }
        s
    }

    /// Multiply every coefficient by `c`.
    pub fn scale(&self, c: &Coefficient) -> Self {
        if c.is_zero() {
            let mut z = Self::zero(self.level);
            z.y_denom = self.y_denom;
            z.q_denom = self.q_denom;
            return z;
        }
        let mut s = self.clone();
        for v in s.terms.values_mut() {
            *v = &*v * c;
        }
        s
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        self.scale(&Coefficient::from_rational(r.clone()))
    }

    /// Product `e^λ · f`, exact shift of every key.
    pub fn shift(&self, l: &Weight) -> Self {
        let s = self.clone();
        let (da, dm) = (l.a * s.y_denom, l.m * s.q_denom);
        let dg = l.g2() * s.grade_scale();
        TruncatedSeries {
            level: s.level + l.k,
            y_denom: s.y_denom,
            q_denom: s.q_denom,
            g2_floor: s.g2_floor.map(|f| f + dg),
            g2_ceil: s.g2_ceil.map(|c| c + dg),
            terms: s.terms.into_iter().map(|(k, c)| ((k.0 + da, k.1 + dm), c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_impl(other, None)
    }

    /// Product with an additional requested floor: terms below `floor`
    /// are neither computed nor claimed.
    pub fn mul_truncated(&self, other: &Self, floor: i64) -> Result<Self> {
        self.mul_impl(other, Some(floor))
    }

    fn mul_impl(&self, other: &Self, requested: Option<i64>) -> Result<Self> {
        let (f, g) = self.unify(other)?;
        let level = f.level + g.level;
        let (cf, cg) = match (f.g2_ceil, g.g2_ceil) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                let mut z = Self::zero(level);
                z.y_denom = f.y_denom;
                z.q_denom = f.q_denom;
                return Ok(z);
            }
        };
        let derived = max_floor(f.g2_floor.map(|x| x + cg), g.g2_floor.map(|x| x + cf));
        let floor = max_floor(derived, requested);
        let ft = f.sorted_terms();
        let gt = g.sorted_terms();
        let lim = floor.unwrap_or(i64::MIN);
        let work: usize = ft.len().saturating_mul(gt.len());
        let row = |(gi, ki, ci): &(i64, Key, &Coefficient), acc: &mut HashMap<Key, Coefficient>| {
            for (gj, kj, cj) in gt.iter() {
                if gi + gj < lim {
                    break;
                }
                let key = (ki.0 + kj.0, ki.1 + kj.1);
                let p = *ci * *cj;
                match acc.get_mut(&key) {
                    Some(v) => *v += &p,
                    None => {
                        acc.insert(key, p);
                    }
                }
            }
        };
        let top_g = gt.first().map(|t| t.0).unwrap_or(i64::MIN);
        let active: Vec<_> = ft.iter().filter(|t| top_g != i64::MIN && t.0 + top_g >= lim).collect();
        let acc: HashMap<Key, Coefficient> = if work > PARALLEL_PRODUCT_THRESHOLD && active.len() > 8 {
            active
                .par_iter()
                .fold(HashMap::new, |mut acc, t| {
                    row(t, &mut acc);
                    acc
                })
                .reduce(HashMap::new, |mut a, b| {
                    for (k, v) in b {
                        match a.get_mut(&k) {
                            Some(x) => *x += &v,
                            None => {
                                a.insert(k, v);
                            }
                        }
                    }
                    a
                })
        } else {
            let mut acc = HashMap::new();
            for t in active {
                row(t, &mut acc);
            }
            acc
        };
        let mut out = Self::zero(level);
        out.y_denom = f.y_denom;
        out.q_denom = f.q_denom;
        out.g2_floor = floor;
        out.g2_ceil = Some(cf + cg);
        out.terms = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        out.drop_below_floor();
        Ok(out)
    }

    /// Termwise `e^μ ↦ (ν, μ) e^μ`, realizing `∂_ν`.
    pub fn derivative_pairing(&self, nu: &Weight) -> Self {
        let yd = BigInt::from(self.y_denom);
        let qd = BigInt::from(self.q_denom);
        let mut s = self.clone();
        let lvl = self.level;
        s.terms = self
            .terms
            .iter()
            .filter_map(|(k, c)| {
                // (ν, μ) = a_ν a_μ / 2 + k_ν m_μ + k_μ m_ν
                let a_mu = BigRational::new(BigInt::from(k.0), yd.clone());
                let m_mu = BigRational::new(BigInt::from(k.1), qd.clone());
                let p = a_mu * BigRational::new(BigInt::from(nu.a), BigInt::from(2))
                    + m_mu * BigInt::from(nu.k)
                    + BigRational::from_integer(BigInt::from(lvl * nu.m));
                if p.is_zero() {
                    None
                } else {
                    Some((*k, c.scale(&p)))
                }
            })
            .collect();
        s
    }

    /// Termwise `e^μ ↦ (μ, μ) e^μ`.
    pub fn laplace_apply(&self) -> Self {
        let yd = BigInt::from(self.y_denom);
        let qd = BigInt::from(self.q_denom);
        let lvl = BigInt::from(self.level);
        let mut s = self.clone();
        s.terms = self
            .terms
            .iter()
            .filter_map(|(k, c)| {
                let a = BigRational::new(BigInt::from(k.0), yd.clone());
                let m = BigRational::new(BigInt::from(k.1), qd.clone());
                let p = &a * &a / BigInt::from(2) + m * BigInt::from(2) * &lvl;
                if p.is_zero() {
                    None
                } else {
                    Some((*k, c.scale(&p)))
                }
            })
            .collect();
        s
    }

    fn check_expandable(&self, what: &str) -> Result<()> {
        if self.level != 0 {
            return Err(Error::Domain(format!("{what} needs a level 0 argument, got level {}", self.level)));
        }
        if let Some(c) = self.g2_ceil {
            if c >= 0 {
                return Err(Error::Domain(format!("{what} needs strictly negative support, ceil is {c}")));
            }
        }
        Ok(())
    }

    /// `exp(f)` for a level 0 series supported in negative grades. The
    /// result is known on `max(floor, g2_floor(f))`.
    pub fn exp_series(&self, floor: i64) -> Result<Self> {
        self.check_expandable("exp_series")?;
        let out_floor = max_floor(self.g2_floor, Some(floor)).unwrap();
        let s_terms: Vec<(i64, Key, Coefficient)> = self
            .sorted_terms()
            .into_iter()
            .map(|(g, k, c)| (g, k, c.scale(&BigRational::from_integer(BigInt::from(g)))))
            .collect();
        let mut result: BTreeMap<Key, Coefficient> = BTreeMap::new();
        let mut acc: BTreeMap<(i64, i64, i64), Coefficient> = BTreeMap::new();
        let push = |g: i64, k: Key, e: &Coefficient, acc: &mut BTreeMap<(i64, i64, i64), Coefficient>| {
            for (gs, ks, cs) in s_terms.iter() {
                let gt = g + gs;
                if gt < out_floor {
                    break;
                }
                let idx = (-gt, k.0 + ks.0, k.1 + ks.1);
                let p = e * cs;
                match acc.get_mut(&idx) {
                    Some(v) => *v += &p,
                    None => {
                        acc.insert(idx, p);
                    }
                }
            }
        };
        if out_floor <= 0 {
            result.insert((0, 0), Coefficient::one());
            push(0, (0, 0), &Coefficient::one(), &mut acc);
        }
        while let Some(((ng, a, m), v)) = acc.pop_first() {
            let g = -ng;
            let e = v.scale(&BigRational::new(BigInt::one(), BigInt::from(g)));
            if e.is_zero() {
                continue;
            }
            push(g, (a, m), &e, &mut acc);
            result.insert((a, m), e);
        }
        let mut out = Self::zero(0);
        out.y_denom = self.y_denom;
        out.q_denom = self.q_denom;
        out.g2_floor = Some(out_floor);
        out.g2_ceil = Some(0);
        out.terms = result;
        Ok(out)
    }

    /// `log(1 + f)` for a level 0 series supported in negative grades.
    pub fn log_one_plus(&self, floor: i64) -> Result<Self> {
        self.check_expandable("log_one_plus")?;
        let out_floor = max_floor(self.g2_floor, Some(floor)).unwrap();
        let f_terms = self.sorted_terms();
        let mut acc: BTreeMap<(i64, i64, i64), Coefficient> = BTreeMap::new();
        for (g, k, c) in f_terms.iter() {
            if *g >= out_floor {
                acc.insert((-g, k.0, k.1), c.scale(&BigRational::from_integer(BigInt::from(*g))));
            }
        }
        let mut result: BTreeMap<Key, Coefficient> = BTreeMap::new();
        while let Some(((ng, a, m), v)) = acc.pop_first() {
            let g = -ng;
            let l = v.scale(&BigRational::new(BigInt::one(), BigInt::from(g)));
            if l.is_zero() {
                continue;
            }
            let gl = l.scale(&BigRational::from_integer(BigInt::from(g)));
            for (gf, kf, cf) in f_terms.iter() {
                let gt = g + gf;
                if gt < out_floor {
                    break;
                }
                let idx = (-gt, a + kf.0, m + kf.1);
                let p = &gl * *cf;
                match acc.get_mut(&idx) {
                    Some(x) => *x -= &p,
                    None => {
                        acc.insert(idx, -p);
                    }
                }
            }
            result.insert((a, m), l);
        }
        let mut out = Self::zero(0);
        out.y_denom = self.y_denom;
        out.q_denom = self.q_denom;
        out.g2_floor = Some(out_floor);
        out.g2_ceil = self.g2_ceil;
        out.terms = result;
        Ok(out)
    }

    /// Multiplicative inverse on the window `≥ floor` (or the derived
    /// window if that is higher).
    pub fn invert(&self, floor: i64) -> Result<Self> {
        divide_exact(&Self::one(), self, floor)
    }

    /// Floating point evaluation helper: returns `(A, M, coefficient)` triples.
    pub(crate) fn raw_terms(&self) -> impl Iterator<Item = (i64, i64, &Coefficient)> {
        self.terms.iter().map(|(k, c)| (k.0, k.1, c))
    }
}

/// Quotient `f / g` on the window `≥ floor` (or the derived window if that
/// is higher). `g` must have a unique term of maximal grade.
pub fn divide_exact(f: &TruncatedSeries, g: &TruncatedSeries, floor: i64) -> Result<TruncatedSeries> {
    let (f, g) = f.unify(g)?;
    let gt = g.sorted_terms();
    let (top_g, top_k, top_c) = match gt.first() {
        Some(t) => (t.0, t.1, t.2.clone()),
        None => return Err(Error::NotInvertible("empty divisor".into())),
    };
    if gt.len() > 1 && gt[1].0 == top_g {
        return Err(Error::NotInvertible(format!("divisor has several terms at top grade {top_g}")));
    }
    let level = f.level - g.level;
    let mut out = TruncatedSeries::zero(level);
    out.y_denom = f.y_denom;
    out.q_denom = f.q_denom;
    let ch = match f.g2_ceil {
        Some(c) => c,
        None => return Ok(out),
    };
    let derived = max_floor(f.g2_floor.map(|x| x - top_g), g.g2_floor.map(|x| x - 2 * top_g + ch));
    let out_floor = max_floor(derived, Some(floor)).unwrap();
    out.g2_floor = Some(out_floor);
    out.g2_ceil = Some(ch - top_g);
    let inv_c = top_c.inv().expect("stored coefficients are nonzero");
    let rest: Vec<(i64, Key, Coefficient)> = gt.iter().skip(1).map(|(g, k, c)| (*g, *k, (*c).clone())).collect();
    let mut acc: BTreeMap<(i64, i64, i64), Coefficient> = BTreeMap::new();
    for (gf, kf, cf) in f.sorted_terms() {
        if gf - top_g >= out_floor {
            acc.insert((-gf, kf.0, kf.1), cf.clone());
        }
    }
    let mut result = BTreeMap::new();
    while let Some(((ng, a, m), v)) = acc.pop_first() {
        let gq = -ng - top_g;
        if gq < out_floor {
            break;
        }
        let qv = &v * &inv_c;
        if qv.is_zero() {
            continue;
        }
        let qk = (a - top_k.0, m - top_k.1);
        for (gr, kr, cr) in rest.iter() {
            let gt = gq + gr;
            if gt - top_g < out_floor {
                break;
            }
            let idx = (-gt, qk.0 + kr.0, qk.1 + kr.1);
            let p = &qv * cr;
            match acc.get_mut(&idx) {
                Some(x) => *x -= &p,
                None => {
                    acc.insert(idx, -p);
                }
            }
        }
        result.insert(qk, qv);
    }
    out.terms = result;
    Ok(out)
}

/// Expand `e^{numerator} · ∏ (1 s e^{−β})^{−p}` by generalized geometric
/// series toward negative grade, keeping grades `≥ g2_floor`.
pub fn tau1_expand(numerator: Weight, factors: &[Tau1Factor], g2_floor: i64) -> Result<TruncatedSeries> {
    for f in factors {
        if f.beta.k != 0 || f.beta.g2() <= 0 {
            return Err(Error::Domain(format!("expansion needs a level 0 weight of positive grade, got {}", f.beta)));
        }
        if f.power == 0 {
            return Err(Error::Domain("factor power must be at least 1".into()));
        }
    }
    let top = numerator.g2();
    let rel = g2_floor - top;
    let mut acc = TruncatedSeries::one().truncate(rel);
    for f in factors {
        let step = f.beta.g2();
        let p = f.power as i64;
        let mut terms = Vec::new();
        let mut binom = BigInt::one(); // C(k+p-1, p-1)
        let mut k = 0i64;
        while -k * step >= rel {
            let mut c = binom.clone();
            if f.sign == FactorSign::Plus && k % 2 == 1 {
                c = -c;
            }
            terms.push((Weight::new(-k * f.beta.a, 0, -k * f.beta.m), Coefficient::from_rational(BigRational::from_integer(c))));
            k += 1;
            binom = binom * BigInt::from(k + p - 1) / BigInt::from(k);
        }
        let factor = TruncatedSeries::from_terms(0, terms, Some(rel), Some(0))?;
        acc = acc.mul_truncated(&factor, rel)?;
    }
    let mut out = acc.shift(&numerator);
    out.g2_floor = Some(g2_floor);
    out.g2_ceil = Some(top);
    out.drop_below_floor();
    Ok(out)
}

/// Compare two series on the window where both are known.
pub fn equal_on_window(f: &TruncatedSeries, g: &TruncatedSeries) -> WindowComparison {
    if f.level != g.level {
        return WindowComparison {
            equal: false,
            window: max_floor(f.g2_floor, g.g2_floor),
            first_difference: Some(Difference {
                h1: "-".into(),
                d: "-".into(),
                lhs: format!("level {}", f.level),
                rhs: format!("level {}", g.level),
            }),
        };
    }
    let (f, g) = f.unify(g).expect("denominators are positive");
    let window = max_floor(f.g2_floor, g.g2_floor);
    let lim = window.unwrap_or(i64::MIN);
    let mut keys: Vec<(i64, Key)> = f
        .terms
        .keys()
        .chain(g.terms.keys())
        .map(|k| (f.grade_of(k), *k))
        .filter(|(gr, _)| *gr >= lim)
        .collect();
    keys.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)));
    keys.dedup();
    let zero = Coefficient::zero();
    for (_, k) in keys {
        let a = f.terms.get(&k).unwrap_or(&zero);
        let b = g.terms.get(&k).unwrap_or(&zero);
        if a != b {
            return WindowComparison {
                equal: false,
                window,
                first_difference: Some(Difference {
                    h1: frac_string(k.0, f.y_denom),
                    d: frac_string(k.1, f.q_denom),
                    lhs: a.to_string(),
                    rhs: b.to_string(),
                }),
            };
        }
    }
    WindowComparison { equal: true, window, first_difference: None }
}

fn frac_string(n: i64, d: i64) -> String {
    BigRational::new(BigInt::from(n), BigInt::from(d)).to_string()
}

/// JSON form of a series, see the crate documentation for the schema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub level: i64,
    pub g2_floor: Option<i64>,
    pub y_denom: i64,
    pub q_denom: i64,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub h1: i64,
    pub d: i64,
    pub re: String,
    pub im: String,
}

impl TruncatedSeries {
    pub fn to_json_value(&self) -> SeriesJson {
        SeriesJson {
            level: self.level,
            g2_floor: self.g2_floor,
            y_denom: self.y_denom,
            q_denom: self.q_denom,
            terms: self
                .sorted_terms()
                .into_iter()
                .map(|(_, k, c)| TermJson { h1: k.0, d: k.1, re: c.re().to_string(), im: c.im().to_string() })
                .collect(),
        }
    }

    /// Rebuild a series from its JSON form. The ceiling is reconstructed
    /// as the larger of the top stored grade and `g2_floor − 1`.
    pub fn from_json_value(j: &SeriesJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            let c = Coefficient::new(parse_rational(&t.re)?, parse_rational(&t.im)?);
            terms.push(((t.h1, t.d), c));
        }
        let mut s = Self::from_scaled_terms(j.level, j.y_denom, j.q_denom, terms, j.g2_floor, None)?;
        if s.g2_ceil.is_none() {
            if let Some(f) = s.g2_floor {
                s.g2_ceil = Some(f - 1);
            }
        } else if let Some(f) = s.g2_floor {
            s.g2_ceil = Some(s.g2_ceil.unwrap().max(f - 1));
        }
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("series serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: SeriesJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&j)
    }

    /// CSV with header `h1,d,re,im`, rows in descending grade.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h1,d,re,im\n");
        for (_, k, c) in self.sorted_terms() {
            out.push_str(&format!("{},{},{},{}\n", k.0, k.1, c.re(), c.im()));
        }
        out
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (_, k, c)) in self.sorted_terms().into_iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})e^({},{},{})", frac_string(k.0, self.y_denom), self.level, frac_string(k.1, self.q_denom))?;
        }
        match self.g2_floor {
            Some(fl) => write!(f, " + O(g2<{fl})"),
            None => Ok(()),
        }
    }
}

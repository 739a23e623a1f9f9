//! Laurent monomials in the variables `Y_{i,a}`, `a` on the lattice
//! `eps^Z q^Q`, together with the `A_{i,a}` monomials and the orders,
//! truncations and involutions built on them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::cartan::{AffineLabel, CartanData, Weight};
use crate::error::{Error, Result};

/// A point `eps^kappa q^lambda` of the spectral lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpectralPoint {
    pub kappa: u32,
    pub lambda: Rational64,
}

impl SpectralPoint {
    pub fn new(cd: &CartanData, kappa: i64, lambda: Rational64) -> Self {
        SpectralPoint { kappa: reduce_kappa(kappa, cd.twist_order), lambda }
    }

    /// `q^lambda` with integer lambda.
    pub fn q(lambda: i64) -> Self {
        SpectralPoint { kappa: 0, lambda: Rational64::from(lambda) }
    }

    fn times(self, cd: &CartanData, dk: i64, dl: Rational64) -> Self {
        SpectralPoint::new(cd, self.kappa as i64 + dk, self.lambda + dl)
    }

    fn pow(self, cd: &CartanData, p: i64) -> Self {
        SpectralPoint::new(cd, self.kappa as i64 * p, self.lambda * p)
    }
}

fn reduce_kappa(k: i64, order: u32) -> u32 {
    k.rem_euclid(order as i64) as u32
}

/// The variable `Y_{node, eps^kappa q^lambda}`. The argument is the literal
/// argument of `Y`, i.e. it already contains the `d_i`-th power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YVar {
    pub node: usize,
    pub kappa: u32,
    pub lambda: Rational64,
}

impl YVar {
    pub fn new(node: usize, kappa: u32, lambda: Rational64) -> Self {
        YVar { node, kappa, lambda }
    }

    /// `Y_{node, q^lambda}` with integer lambda.
    pub fn q(node: usize, lambda: i64) -> Self {
        YVar { node, kappa: 0, lambda: Rational64::from(lambda) }
    }

    pub fn point(&self) -> SpectralPoint {
        SpectralPoint { kappa: self.kappa, lambda: self.lambda }
    }
}

impl fmt::Display for YVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Y[{},{},{}]", self.node, self.kappa, self.lambda)
    }
}

/// Position of an `A_{i,a}` monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct APosition {
    pub node: usize,
    pub point: SpectralPoint,
}

impl APosition {
    pub fn new(node: usize, point: SpectralPoint) -> Self {
        APosition { node, point }
    }
}

impl fmt::Display for APosition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A[{},{},{}]", self.node, self.point.kappa, self.point.lambda)
    }
}

/// A Laurent monomial; zero exponents are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: BTreeMap<YVar, i64>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: YVar) -> Self {
        Monomial::var_pow(v, 1)
    }

    pub fn var_pow(v: YVar, e: i64) -> Self {
        let mut m = Monomial::one();
        m.mul_var(v, e);
        m
    }

    /// Product of `Y_{1,q^l}^{e}` over `(l, e)`: the sl2 shorthand.
    pub fn sl2(factors: &[(i64, i64)]) -> Self {
        let mut m = Monomial::one();
        for &(l, e) in factors {
            m.mul_var(YVar::q(1, l), e);
        }
        m
    }

    pub fn from_pairs<I: IntoIterator<Item = (YVar, i64)>>(pairs: I) -> Self {
        let mut m = Monomial::one();
        for (v, e) in pairs {
            m.mul_var(v, e);
        }
        m
    }

    pub fn mul_var(&mut self, v: YVar, e: i64) {
        if e == 0 {
            return;
        }
        let entry = self.exps.entry(v).or_insert(0);
        *entry += e;
        if *entry == 0 {
            self.exps.remove(&v);
        }
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponent(&self, v: &YVar) -> i64 {
        self.exps.get(v).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&YVar, &i64)> {
        self.exps.iter()
    }

    pub fn vars(&self) -> impl Iterator<Item = &YVar> {
        self.exps.keys()
    }

    /// Sum of all exponents.
    pub fn degree(&self) -> i64 {
        self.exps.values().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = self.clone();
        for (v, e) in &other.exps {
            out.mul_var(*v, *e);
        }
        out
    }

    pub fn inv(&self) -> Monomial {
        Monomial { exps: self.exps.iter().map(|(v, e)| (*v, -e)).collect() }
    }

    pub fn div(&self, other: &Monomial) -> Monomial {
        self.mul(&other.inv())
    }

    pub fn pow(&self, k: i64) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial { exps: self.exps.iter().map(|(v, e)| (*v, e * k)).collect() }
    }

    /// Applies `f` to every variable, keeping exponents (multiplied by `sign`).
    fn map_vars<F: Fn(&YVar) -> YVar>(&self, sign: i64, f: F) -> Monomial {
        let mut out = Monomial::one();
        for (v, e) in &self.exps {
            out.mul_var(f(v), sign * e);
        }
        out
    }
}

pub fn mono_mul(m1: &Monomial, m2: &Monomial) -> Monomial {
    m1.mul(m2)
}

pub fn mono_inv(m: &Monomial) -> Monomial {
    m.inv()
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (v, e) in &self.exps {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{v}")?;
            if *e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational '{s}'"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(n, d))
        }
        None => Ok(Rational64::from(s.parse::<i64>().map_err(|_| bad())?)),
    }
}

fn parse_factor(s: &str) -> Result<(YVar, i64)> {
    let bad = || Error::Parse(format!("invalid factor '{s}' (expected Y[i,kappa,lambda] or Y[i,kappa,lambda]^e)"));
    let s = s.trim();
    let rest = s.strip_prefix('Y').or_else(|| s.strip_prefix('y')).ok_or_else(bad)?;
    let rest = rest.trim_start().strip_prefix('[').ok_or_else(bad)?;
    let (inner, tail) = rest.split_once(']').ok_or_else(bad)?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let node: usize = parts[0].trim().parse().map_err(|_| bad())?;
    let kappa: u32 = parts[1].trim().parse().map_err(|_| bad())?;
    let lambda = parse_rational(parts[2])?;
    let tail = tail.trim();
    let e = if tail.is_empty() {
        1
    } else {
        let t = tail.strip_prefix('^').ok_or_else(bad)?.trim();
        let t = t.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(t);
        t.parse::<i64>().map_err(|_| bad())?
    };
    Ok((YVar::new(node, kappa, lambda), e))
}

impl FromStr for Monomial {
    type Err = Error;

    /// Parses `Y[i,kappa,lambda]^e` factors joined by `*` or `;`, or `1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Monomial::one());
        }
        let mut m = Monomial::one();
        for part in s.split(['*', ';']) {
            if part.trim().is_empty() || part.trim() == "1" {
                continue;
            }
            let (v, e) = parse_factor(part)?;
            m.mul_var(v, e);
        }
        Ok(m)
    }
}

impl Monomial {
    /// Checks that every variable lives on the lattice of `cd`.
    pub fn check_in(&self, cd: &CartanData) -> Result<()> {
        for v in self.vars() {
            cd.check_node(v.node)?;
            if v.kappa >= cd.twist_order {
                return Err(Error::Parse(format!("kappa {} out of range for {}", v.kappa, cd.affine_type)));
            }
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.exps.len()))?;
        for (v, e) in &self.exps {
            seq.serialize_element(&[v.node as i64, v.kappa as i64, *v.lambda.numer(), *v.lambda.denom(), *e])?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Monomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<[i64; 5]> = Vec::deserialize(d)?;
        let mut m = Monomial::one();
        for [node, kappa, num, den, e] in raw {
            if node < 1 || kappa < 0 || den == 0 || e == 0 {
                return Err(de::Error::custom(format!("invalid monomial factor [{node},{kappa},{num},{den},{e}]")));
            }
            let v = YVar::new(node as usize, kappa as u32, Rational64::new(num, den));
            if m.exps.contains_key(&v) {
                return Err(de::Error::custom(format!("duplicate variable {v}")));
            }
            m.mul_var(v, e);
        }
        Ok(m)
    }
}

/// Variable `Y_{i, p^{d_i}}` attached to the base point `p`.
pub fn y_of_point(cd: &CartanData, i: usize, p: SpectralPoint) -> Result<YVar> {
    cd.check_node(i)?;
    let q = p.pow(cd, cd.d[i]);
    Ok(YVar::new(i, q.kappa, q.lambda))
}

/// Base level `lambda / d_i` of a variable.
pub fn level(cd: &CartanData, v: &YVar) -> Rational64 {
    v.lambda / cd.d[v.node]
}

fn integral_level(cd: &CartanData, v: &YVar, m: &Monomial) -> Result<i64> {
    let l = level(cd, v);
    if l.is_integer() {
        Ok(l.to_integer())
    } else {
        Err(Error::NonIntegralLevel(m.to_string()))
    }
}

pub fn weight(cd: &CartanData, m: &Monomial) -> Weight {
    let mut w = Weight::zero(cd.rank());
    for (v, e) in m.iter() {
        w.0[v.node - 1] += e * cd.mu[v.node];
    }
    w
}

pub fn is_dominant(m: &Monomial) -> bool {
    m.iter().all(|(_, e)| *e > 0)
}

fn y(node: usize, p: SpectralPoint) -> YVar {
    YVar::new(node, p.kappa, p.lambda)
}

fn root_admissible(cd: &CartanData, p: SpectralPoint) -> bool {
    let r = cd.twist_order as i64;
    p.kappa == 0 && (p.lambda / r).is_integer()
}

/// The monomial `A_{i,a}`.
pub fn a_monomial(cd: &CartanData, pos: APosition) -> Result<Monomial> {
    let i = pos.node;
    cd.check_node(i)?;
    let n = cd.rank();
    let a = pos.point;
    let mut m = Monomial::one();
    let ri = cd.r[i];

    if !cd.is_twisted() {
        m.mul_var(y(i, a.times(cd, 0, -ri)), 1);
        m.mul_var(y(i, a.times(cd, 0, ri)), 1);
        for j in 1..=n {
            if j == i {
                continue;
            }
            // multiplicity of Y_j^{-1} factors is -C_{j,i}, so that weight(A_i) = alpha_i
            let shifts: &[i64] = match cd.cartan[j][i] {
                0 => &[],
                -1 => &[0],
                -2 => &[-1, 1],
                -3 => &[-2, 0, 2],
                c => return Err(Error::Internal(format!("unexpected Cartan entry {c}"))),
            };
            for &s in shifts {
                m.mul_var(y(j, a.times(cd, 0, Rational64::from(s))), -1);
            }
        }
        return Ok(m);
    }

    let one = Rational64::one();
    if cd.affine_type.label == AffineLabel::A2Even && i == n {
        m.mul_var(y(n, a.times(cd, 0, -one)), 1);
        m.mul_var(y(n, a.times(cd, 0, one)), 1);
        // -a = eps * a since eps = -1
        m.mul_var(y(n, a.times(cd, 1, Rational64::zero())), -1);
        if n > 1 {
            m.mul_var(y(n - 1, a), -1);
        }
        return Ok(m);
    }

    let r = Rational64::from(cd.twist_order as i64);
    if ri == one {
        m.mul_var(y(i, a.times(cd, 0, -one)), 1);
        m.mul_var(y(i, a.times(cd, 0, one)), 1);
        for j in 1..=n {
            if j == i || cd.cartan[i][j] >= 0 {
                continue;
            }
            let p = -(cd.r[j] * cd.cartan[j][i]);
            if !p.is_integer() || p <= Rational64::zero() {
                return Err(Error::Internal(format!("non-integral power {p} in A_{{{i},a}}")));
            }
            m.mul_var(y(j, a.pow(cd, p.to_integer())), -1);
        }
        return Ok(m);
    }

    if ri != r {
        return Err(Error::Internal(format!("unexpected symmetrizer {ri} at node {i}")));
    }
    m.mul_var(y(i, a.times(cd, 0, -ri)), 1);
    m.mul_var(y(i, a.times(cd, 0, ri)), 1);
    for j in 1..=n {
        if j == i || cd.cartan[i][j] >= 0 {
            continue;
        }
        if cd.r[j] == r {
            m.mul_var(y(j, a), -1);
        } else if cd.r[j] == one {
            if !root_admissible(cd, a) {
                return Err(Error::RootInadmissible { kappa: a.kappa, lambda: a.lambda.to_string() });
            }
            let base = a.lambda / r;
            for t in 0..cd.twist_order {
                m.mul_var(y(j, SpectralPoint { kappa: t, lambda: base }), -1);
            }
        } else {
            return Err(Error::Internal(format!("unexpected neighbour symmetrizer at node {j}")));
        }
    }
    Ok(m)
}

/// Normalised level of an A-position, `lambda / d_i`.
pub fn position_level(cd: &CartanData, p: &APosition) -> Rational64 {
    p.point.lambda / cd.d[p.node]
}

// Largest level offset between an A-position and any variable of its monomial.
const A_REACH: i64 = 3;

fn positions_touching(cd: &CartanData, v: &YVar) -> Vec<(APosition, Monomial)> {
    let lv = level(cd, v);
    let mut out = vec![];
    for i in 1..=cd.rank() {
        for kappa in 0..cd.twist_order {
            for off in -A_REACH..=A_REACH {
                let lambda = (lv + off) * cd.d[i];
                let pos = APosition::new(i, SpectralPoint { kappa, lambda });
                if let Ok(am) = a_monomial(cd, pos) {
                    if am.exponent(v) != 0 {
                        out.push((pos, am));
                    }
                }
            }
        }
    }
    out
}

/// The unique multiset `S` of A-positions with `m = mref * prod_{p in S} A_p^{-1}`.
///
/// Positions are returned sorted, repeated according to multiplicity.
pub fn decompose_over_a(cd: &CartanData, m: &Monomial, mref: &Monomial) -> Option<Vec<APosition>> {
    let target = mref.div(m);
    if target.is_one() {
        return Some(vec![]);
    }
    let levels: Vec<Rational64> = target.vars().map(|v| level(cd, v)).collect();
    let lo = *levels.iter().min().unwrap();
    let hi = *levels.iter().max().unwrap();
    let pos_range = (lo - A_REACH, hi + A_REACH);
    let var_range = (lo - 2 * A_REACH, hi + 2 * A_REACH);

    let mut candidates: BTreeMap<APosition, Monomial> = BTreeMap::new();
    let mut seen: BTreeSet<YVar> = BTreeSet::new();
    let mut queue: VecDeque<YVar> = target.vars().copied().collect();
    seen.extend(target.vars().copied());
    while let Some(v) = queue.pop_front() {
        for (pos, am) in positions_touching(cd, &v) {
            let pl = position_level(cd, &pos);
            if pl < pos_range.0 || pl > pos_range.1 || candidates.contains_key(&pos) {
                continue;
            }
            for w in am.vars() {
                let wl = level(cd, w);
                if wl >= var_range.0 && wl <= var_range.1 && seen.insert(*w) {
                    queue.push_back(*w);
                }
            }
            candidates.insert(pos, am);
        }
    }
    if candidates.is_empty() {
        return None;
    }

    let positions: Vec<APosition> = candidates.keys().copied().collect();
    let mut rows: BTreeSet<YVar> = target.vars().copied().collect();
    for am in candidates.values() {
        rows.extend(am.vars().copied());
    }
    let rows: Vec<YVar> = rows.into_iter().collect();
    let ncols = positions.len();
    let mut mat: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|v| {
            let mut row: Vec<BigRational> =
                positions.iter().map(|p| BigRational::from_integer(BigInt::from(candidates[p].exponent(v)))).collect();
            row.push(BigRational::from_integer(BigInt::from(target.exponent(v))));
            row
        })
        .collect();
    let sol = solve_unique(&mut mat, ncols)?;
    let mut out = vec![];
    for (p, x) in positions.iter().zip(sol) {
        if !x.is_integer() || x.is_negative() {
            return None;
        }
        let k = x.to_integer().to_i64()?;
        out.extend(std::iter::repeat(*p).take(k as usize));
    }
    Some(out)
}

/// Solves an augmented system with full column rank; `None` if inconsistent.
fn solve_unique(mat: &mut [Vec<BigRational>], ncols: usize) -> Option<Vec<BigRational>> {
    let nrows = mat.len();
    let mut pivot_row = 0;
    let mut pivots = vec![];
    for col in 0..ncols {
        let Some(p) = (pivot_row..nrows).find(|&r| !mat[r][col].is_zero()) else {
            // a free column would contradict the independence of the A monomials
            panic!("A-monomials of the candidate set are linearly dependent");
        };
        mat.swap(p, pivot_row);
        let inv = mat[pivot_row][col].recip();
        for x in mat[pivot_row].iter_mut() {
            *x *= &inv;
        }
        let prow = mat[pivot_row].clone();
        for (r, row) in mat.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, px) in row.iter_mut().zip(&prow) {
                    *x -= &f * px;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if mat[pivot_row..].iter().any(|row| !row[ncols].is_zero()) {
        return None;
    }
    Some((0..ncols).map(|k| mat[k][ncols].clone()).collect())
}

/// `m <= mref` iff `m` lies in `mref Z[A^{-1}]`.
pub fn leq(cd: &CartanData, m: &Monomial, mref: &Monomial) -> bool {
    decompose_over_a(cd, m, mref).is_some()
}

fn extremal_negative(cd: &CartanData, m: &Monomial, right: bool) -> Result<bool> {
    if m.is_one() {
        return Err(Error::IdentityMonomial);
    }
    let levels = m.vars().map(|v| level(cd, v));
    let ext = if right { levels.max().unwrap() } else { levels.min().unwrap() };
    Ok(m.iter().filter(|(v, _)| level(cd, v) == ext).all(|(_, e)| *e < 0))
}

pub fn is_right_negative(cd: &CartanData, m: &Monomial) -> Result<bool> {
    extremal_negative(cd, m, true)
}

pub fn is_left_negative(cd: &CartanData, m: &Monomial) -> Result<bool> {
    extremal_negative(cd, m, false)
}

/// Truncations `(m^{<=L}, m^{=L}, m^{>=L})`.
pub fn trunc_parts(cd: &CartanData, m: &Monomial, cut: i64) -> Result<(Monomial, Monomial, Monomial)> {
    let mut le = Monomial::one();
    let mut eq = Monomial::one();
    let mut ge = Monomial::one();
    for (v, e) in m.iter() {
        let l = integral_level(cd, v, m)?;
        if l <= cut {
            le.mul_var(*v, *e);
        }
        if l == cut {
            eq.mul_var(*v, *e);
        }
        if l >= cut {
            ge.mul_var(*v, *e);
        }
    }
    Ok((le, eq, ge))
}

pub fn trunc_leq(cd: &CartanData, m: &Monomial, cut: i64) -> Result<Monomial> {
    Ok(trunc_parts(cd, m, cut)?.0)
}

pub fn trunc_geq(cd: &CartanData, m: &Monomial, cut: i64) -> Result<Monomial> {
    Ok(trunc_parts(cd, m, cut)?.2)
}

/// Spectral shift by `q^s`: `Y_{i,b} -> Y_{i, q^{d_i s} b}`.
pub fn tau_shift(cd: &CartanData, m: &Monomial, s: Rational64) -> Monomial {
    m.map_vars(1, |v| YVar::new(v.node, v.kappa, v.lambda + s * cd.d[v.node]))
}

/// `Y_{i,a}^{+-1} -> Y_{i,a^{-1}}^{-+1}`.
pub fn sigma_involution(cd: &CartanData, m: &Monomial) -> Monomial {
    m.map_vars(-1, |v| YVar::new(v.node, reduce_kappa(-(v.kappa as i64), cd.twist_order), -v.lambda))
}

/// The relabelling `Y -> Y°`: sign twist for `A_n^{(2)}` nodes with
/// `r_i <= 1`, node duality otherwise.
pub fn circ_var(cd: &CartanData, v: &YVar) -> YVar {
    let a_twisted = matches!(cd.affine_type.label, AffineLabel::A2Even | AffineLabel::A2Odd);
    if a_twisted && cd.r[v.node] <= Rational64::one() {
        YVar::new(v.node, reduce_kappa(v.kappa as i64 + 1, cd.twist_order), v.lambda)
    } else {
        YVar::new(cd.bar_node[v.node], v.kappa, v.lambda)
    }
}

/// Highest monomial `M` of the dual: `sigma(chi_q(L(m))) = chi_q(L(M))`.
pub fn dual_highest_monomial(cd: &CartanData, m: &Monomial) -> Result<Monomial> {
    if !is_dominant(m) {
        return Err(Error::NotDominant(m.to_string()));
    }
    Ok(m.map_vars(1, |v| {
        let shifted = YVar::new(
            v.node,
            reduce_kappa(-(v.kappa as i64), cd.twist_order),
            -v.lambda - Rational64::from(cd.d[v.node] * cd.rvee_hvee),
        );
        circ_var(cd, &shifted)
    }))
}

/// Variable-wise bar map `(eps^k q^l)^{d_i} -> (eps^{-k} q^{ell-l})^{d_i}`,
/// defined for any exponents as long as every level is an integer in `[0, ell]`.
pub fn bar_variables(cd: &CartanData, m: &Monomial, ell: i64) -> Result<Monomial> {
    let mut out = Monomial::one();
    for (v, e) in m.iter() {
        let l = integral_level(cd, v, m)?;
        if !(0..=ell).contains(&l) {
            return Err(Error::LevelOutOfRange { monomial: m.to_string(), ell });
        }
        let nv = YVar::new(
            v.node,
            reduce_kappa(-(v.kappa as i64), cd.twist_order),
            Rational64::from(cd.d[v.node] * (ell - l)),
        );
        out.mul_var(nv, *e);
    }
    Ok(out)
}

/// Bar involution on dominant monomials of `C_ell`.
pub fn bar_monomial(cd: &CartanData, m: &Monomial, ell: i64) -> Result<Monomial> {
    if !is_dominant(m) {
        return Err(Error::NotDominant(m.to_string()));
    }
    bar_variables(cd, m, ell)
}

/// Whether `m` is the highest monomial of a simple object of `C_ell`.
pub fn in_c_ell(cd: &CartanData, m: &Monomial, ell: i64) -> bool {
    is_dominant(m)
        && m.vars().all(|v| {
            let l = level(cd, v);
            l.is_integer() && (0..=ell).contains(&l.to_integer())
        })
}

/// Hypothesis of the cyclicity corollary: no variable of `mprime` sits
/// strictly to the right of a variable of `m` (in steps of `q^{d_i}`,
/// modulo `eps^{d_i Z}`).
pub fn cyclic_pair_ok(cd: &CartanData, m: &Monomial, mprime: &Monomial) -> bool {
    let order = cd.twist_order as i64;
    for a in m.vars() {
        let di = cd.d[a.node];
        for b in mprime.vars() {
            let steps = (b.lambda - a.lambda) / di;
            if !steps.is_integer() || steps <= Rational64::zero() {
                continue;
            }
            let dk = (b.kappa as i64 - a.kappa as i64).rem_euclid(order);
            let reachable = if di % order == 0 { dk == 0 } else { true };
            if reachable {
                return false;
            }
        }
    }
    true
}

/// A factor `Ỹ_{σ^p(i), a}^{exp}` of a monomial for the simply-laced cover,
/// labelled by its orbit representative `i` and the power `p` of the
/// diagram twist.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TildeFactor {
    pub orbit_node: usize,
    pub sigma_power: i64,
    pub point: SpectralPoint,
    pub exp: i64,
}

/// `π(Ỹ_{σ^p(i),a}) = Y_{i,(eps^p a)^{d_i}}`, extended multiplicatively.
pub fn pi_twisted(cd: &CartanData, factors: &[TildeFactor]) -> Result<Monomial> {
    if !cd.is_twisted() {
        return Err(Error::NotTwisted);
    }
    let mut out = Monomial::one();
    for f in factors {
        let base = f.point.times(cd, f.sigma_power, Rational64::zero());
        out.mul_var(y_of_point(cd, f.orbit_node, base)?, f.exp);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::{build_cartan, weight_leq};

    fn sl2() -> CartanData {
        CartanData::sl2()
    }

    fn ty(s: &str) -> CartanData {
        build_cartan(s.parse().unwrap()).unwrap()
    }

    fn m(f: &[(i64, i64)]) -> Monomial {
        Monomial::sl2(f)
    }

    #[test]
    fn y_of_point_uses_d_power() {
        let cd = sl2();
        assert_eq!(y_of_point(&cd, 1, SpectralPoint::q(0)).unwrap(), YVar::q(1, 0));
        let a22 = ty("A2^2");
        assert_eq!(y_of_point(&a22, 1, SpectralPoint::q(1)).unwrap(), YVar::q(1, 1));
        // D_3^(2): node 1 has d = 2
        let d3 = ty("D3^2");
        assert_eq!(d3.d[1], 2);
        assert_eq!(y_of_point(&d3, 1, SpectralPoint::q(1)).unwrap(), YVar::q(1, 2));
        assert!(y_of_point(&cd, 2, SpectralPoint::q(0)).is_err());
    }

    #[test]
    fn group_law() {
        let a = m(&[(0, 1), (2, 1)]);
        assert_eq!(a.mul(&Monomial::one()), a);
        assert!(m(&[(0, 1)]).mul(&m(&[(0, -1)])).is_one());
        assert_eq!(a.len(), 2);
        assert_eq!(a.mul(&a.inv()), Monomial::one());
    }

    #[test]
    fn weights() {
        let cd = sl2();
        assert_eq!(weight(&cd, &m(&[(3, 1)])), Weight(vec![1]));
        assert_eq!(weight(&cd, &Monomial::one()), Weight(vec![0]));
        let a22 = ty("A2^2");
        assert_eq!(weight(&a22, &m(&[(1, 1)])), Weight(vec![2]));
    }

    #[test]
    fn dominance() {
        assert!(is_dominant(&m(&[(0, 1), (4, 1)])));
        assert!(!is_dominant(&m(&[(0, 1), (2, -1)])));
        assert!(is_dominant(&Monomial::one()));
    }

    #[test]
    fn a_monomials_worked_cases() {
        let cd = sl2();
        let a = a_monomial(&cd, APosition::new(1, SpectralPoint::q(1))).unwrap();
        assert_eq!(a, m(&[(0, 1), (2, 1)]));

        let a22 = ty("A2^2");
        let a = a_monomial(&a22, APosition::new(1, SpectralPoint::q(1))).unwrap();
        let expected = Monomial::from_pairs([
            (YVar::q(1, 0), 1),
            (YVar::q(1, 2), 1),
            (YVar::new(1, 1, Rational64::from(1)), -1),
        ]);
        assert_eq!(a, expected);

        let sl3 = ty("A2^1");
        let a = a_monomial(&sl3, APosition::new(1, SpectralPoint::q(1))).unwrap();
        let expected = Monomial::from_pairs([(YVar::q(1, 0), 1), (YVar::q(1, 2), 1), (YVar::q(2, 1), -1)]);
        assert_eq!(a, expected);
    }

    #[test]
    fn twisted_root_rejection() {
        // D_3^(2): node 1 has r = 2 and its neighbour node 2 has r = 1
        let cd = ty("D3^2");
        assert!(a_monomial(&cd, APosition::new(1, SpectralPoint::q(2))).is_ok());
        let odd = a_monomial(&cd, APosition::new(1, SpectralPoint::q(1)));
        assert!(matches!(odd, Err(Error::RootInadmissible { .. })));
        let eps = a_monomial(&cd, APosition::new(1, SpectralPoint { kappa: 1, lambda: Rational64::from(2) }));
        assert!(matches!(eps, Err(Error::RootInadmissible { .. })));
        let ok = a_monomial(&cd, APosition::new(1, SpectralPoint::q(2))).unwrap();
        // two square roots of q^2: q and -q
        assert_eq!(ok.exponent(&YVar::q(2, 1)), -1);
        assert_eq!(ok.exponent(&YVar::new(2, 1, Rational64::from(1))), -1);
        assert!(a_monomial(&cd, APosition::new(3, SpectralPoint::q(0))).is_err());
    }

    #[test]
    fn a_monomial_weight_is_simple_root_for_all_types() {
        let types = [
            "A1^1", "A3^1", "B3^1", "C3^1", "D4^1", "D5^1", "E6^1", "E7^1", "E8^1", "F4^1", "G2^1", "A2^2", "A4^2",
            "A6^2", "A5^2", "A7^2", "D3^2", "D5^2", "E6^2", "D4^3",
        ];
        for t in types {
            let cd = ty(t);
            for i in 1..=cd.rank() {
                let lambda = Rational64::from(cd.d[i] * cd.twist_order as i64);
                let a = a_monomial(&cd, APosition::new(i, SpectralPoint { kappa: 0, lambda })).unwrap();
                assert_eq!(weight(&cd, &a), cd.simple_root(i), "{t} node {i}");
                // A^{-1} is right-negative and left-negative... at least right-negative
                assert!(is_right_negative(&cd, &a.inv()).unwrap(), "{t} node {i}");
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let cd = sl2();
        let got = decompose_over_a(&cd, &m(&[(0, -1)]), &m(&[(-2, 1)])).unwrap();
        assert_eq!(got, vec![APosition::new(1, SpectralPoint::q(-1))]);
        assert_eq!(decompose_over_a(&cd, &m(&[(0, 1)]), &m(&[(0, 1)])).unwrap(), vec![]);
        assert!(decompose_over_a(&cd, &m(&[(2, 1)]), &m(&[(0, 1)])).is_none());
        assert!(leq(&cd, &m(&[(0, -1)]), &m(&[(-2, 1)])));
        assert!(!leq(&cd, &m(&[(0, 1)]), &m(&[(2, 1)])));
    }

    #[test]
    fn decomposition_sl3_fundamental() {
        let cd = ty("A2^1");
        let top = Monomial::var(YVar::q(1, 0));
        let low = Monomial::var_pow(YVar::q(2, 3), -1);
        let s = decompose_over_a(&cd, &low, &top).unwrap();
        assert_eq!(s, vec![APosition::new(1, SpectralPoint::q(1)), APosition::new(2, SpectralPoint::q(2))]);
    }

    #[test]
    fn negativity() {
        let cd = sl2();
        let ainv = m(&[(0, -1), (2, -1)]);
        assert!(is_right_negative(&cd, &ainv).unwrap());
        assert!(!is_right_negative(&cd, &m(&[(0, 1)])).unwrap());
        let x = m(&[(0, 1), (2, -1)]);
        assert!(is_right_negative(&cd, &x).unwrap());
        assert!(!is_left_negative(&cd, &x).unwrap());
        assert_eq!(is_right_negative(&cd, &Monomial::one()), Err(Error::IdentityMonomial));
    }

    #[test]
    fn truncations() {
        let cd = sl2();
        let x = m(&[(0, 1), (4, 1)]);
        assert_eq!(trunc_parts(&cd, &x, 3).unwrap(), (m(&[(0, 1)]), Monomial::one(), m(&[(4, 1)])));
        let y3 = m(&[(3, 1)]);
        assert_eq!(trunc_parts(&cd, &y3, 3).unwrap(), (y3.clone(), y3.clone(), y3.clone()));
        let one = Monomial::one();
        assert_eq!(trunc_parts(&cd, &one, 0).unwrap(), (one.clone(), one.clone(), one));
        let frac = Monomial::var(YVar::new(1, 0, Rational64::new(1, 2)));
        assert!(trunc_parts(&cd, &frac, 0).is_err());
    }

    #[test]
    fn shifts_and_involutions() {
        let cd = sl2();
        assert_eq!(tau_shift(&cd, &m(&[(-2, 1)]), Rational64::from(2)), m(&[(0, 1)]));
        assert_eq!(sigma_involution(&cd, &m(&[(2, 1)])), m(&[(-2, -1)]));
        assert_eq!(sigma_involution(&cd, &Monomial::one()), Monomial::one());
        assert_eq!(dual_highest_monomial(&cd, &m(&[(0, 1)])).unwrap(), m(&[(-2, 1)]));
        assert_eq!(dual_highest_monomial(&cd, &m(&[(2, 1)])).unwrap(), m(&[(-4, 1)]));
        assert_eq!(dual_highest_monomial(&cd, &Monomial::one()).unwrap(), Monomial::one());
        assert!(dual_highest_monomial(&cd, &m(&[(2, -1)])).is_err());
        assert_eq!(bar_monomial(&cd, &m(&[(0, 1)]), 2).unwrap(), m(&[(2, 1)]));
        assert_eq!(bar_monomial(&cd, &m(&[(1, 1)]), 2).unwrap(), m(&[(1, 1)]));
        assert!(bar_monomial(&cd, &m(&[(3, 1)]), 2).is_err());
    }

    #[test]
    fn c_ell_membership() {
        let cd = sl2();
        assert!(in_c_ell(&cd, &m(&[(0, 1), (2, 1)]), 2));
        assert!(!in_c_ell(&cd, &m(&[(3, 1)]), 2));
        assert!(!in_c_ell(&cd, &m(&[(0, -1)]), 0));
    }

    #[test]
    fn cyclic_pairs() {
        let cd = sl2();
        assert!(cyclic_pair_ok(&cd, &m(&[(2, 1)]), &m(&[(0, 1)])));
        assert!(cyclic_pair_ok(&cd, &m(&[(2, 1)]), &Monomial::one()));
        assert!(!cyclic_pair_ok(&cd, &m(&[(0, 1)]), &m(&[(2, 1)])));
    }

    #[test]
    fn pi_map() {
        let cd = ty("D4^3");
        let f = TildeFactor { orbit_node: 1, sigma_power: 2, point: SpectralPoint::q(1), exp: 1 };
        let got = pi_twisted(&cd, &[f]).unwrap();
        // d_1 = 1: Y_{1, eps^2 q}
        assert_eq!(got, Monomial::var(YVar::new(1, 2, Rational64::from(1))));
        let f2 = TildeFactor { orbit_node: 2, sigma_power: 1, point: SpectralPoint::q(1), exp: -1 };
        let both = pi_twisted(&cd, &[f, f2]).unwrap();
        assert_eq!(both, got.mul(&pi_twisted(&cd, &[f2]).unwrap()));
        // d_2 = 3 kills the eps power
        assert_eq!(pi_twisted(&cd, &[f2]).unwrap(), Monomial::var_pow(YVar::q(2, 3), -1));
        let plain = TildeFactor { orbit_node: 1, sigma_power: 0, point: SpectralPoint::q(5), exp: 2 };
        assert_eq!(pi_twisted(&cd, &[plain]).unwrap(), Monomial::var_pow(YVar::q(1, 5), 2));
        assert_eq!(pi_twisted(&sl2(), &[plain]), Err(Error::NotTwisted));
    }

    #[test]
    fn parse_display() {
        let x: Monomial = "Y[1,0,0]*Y[1,0,2]^-1".parse().unwrap();
        assert_eq!(x, m(&[(0, 1), (2, -1)]));
        assert_eq!(x.to_string().parse::<Monomial>().unwrap(), x);
        let h: Monomial = "Y[1,0,1/2]^3;Y[2,1,-4]".parse().unwrap();
        assert_eq!(h.exponent(&YVar::new(1, 0, Rational64::new(1, 2))), 3);
        assert_eq!("1".parse::<Monomial>().unwrap(), Monomial::one());
        assert!("Z[1,0,0]".parse::<Monomial>().is_err());
        assert!("Y[1,0]".parse::<Monomial>().is_err());
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(json, "[[1,0,1,2,3],[2,1,-4,1,1]]");
        assert_eq!(serde_json::from_str::<Monomial>(&json).unwrap(), h);
    }

    #[test]
    fn weight_strictly_decreases_along_leq() {
        let cd = sl2();
        let top = m(&[(0, 1), (2, 1)]);
        let low = m(&[(0, 1), (4, -1)]);
        assert!(leq(&cd, &low, &top));
        let (wl, wt) = (weight(&cd, &low), weight(&cd, &top));
        assert!(weight_leq(&wl, &wt, &cd) && wl != wt);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_mono() -> impl Strategy<Value = Monomial> {
            prop::collection::vec((-4i64..8, -2i64..3), 0..5).prop_map(|f| Monomial::sl2(&f))
        }

        fn arb_dominant() -> impl Strategy<Value = Monomial> {
            prop::collection::vec((0i64..5, 1i64..3), 0..4).prop_map(|f| Monomial::sl2(&f))
        }

        fn arb_a_inverse_product() -> impl Strategy<Value = (Vec<i64>, Monomial)> {
            prop::collection::vec(-3i64..6, 1..5).prop_map(|ls| {
                let cd = CartanData::sl2();
                let m = ls.iter().fold(Monomial::one(), |acc, &l| {
                    acc.div(&a_monomial(&cd, APosition::new(1, SpectralPoint::q(l))).unwrap())
                });
                (ls, m)
            })
        }

        proptest! {
            #[test]
            fn group_and_weight_homomorphism(a in arb_mono(), b in arb_mono()) {
                let cd = CartanData::sl2();
                prop_assert_eq!(a.mul(&b), b.mul(&a));
                prop_assert!(a.mul(&a.inv()).is_one());
                prop_assert_eq!(weight(&cd, &a.mul(&b)), weight(&cd, &a).add(&weight(&cd, &b)));
            }

            #[test]
            fn a_inverse_products_are_right_negative((ls, m) in arb_a_inverse_product(), top in arb_dominant()) {
                let cd = CartanData::sl2();
                prop_assert!(is_right_negative(&cd, &m).unwrap());
                prop_assert!(!is_dominant(&m));
                let low = top.mul(&m);
                let mut s = decompose_over_a(&cd, &low, &top).unwrap();
                let mut expected: Vec<APosition> = ls.iter().map(|&l| APosition::new(1, SpectralPoint::q(l))).collect();
                s.sort();
                expected.sort();
                prop_assert_eq!(&s, &expected);
                let rebuilt = s.iter().fold(top.clone(), |acc, p| acc.div(&a_monomial(&cd, *p).unwrap()));
                prop_assert_eq!(rebuilt, low);
            }

            #[test]
            fn truncation_reconstructs(m in arb_mono(), cut in -5i64..9) {
                let cd = CartanData::sl2();
                let (le, _, _) = trunc_parts(&cd, &m, cut).unwrap();
                let (_, _, ge) = trunc_parts(&cd, &m, cut + 1).unwrap();
                prop_assert_eq!(le.mul(&ge), m);
            }

            #[test]
            fn involutions(m in arb_mono(), s in -4i64..5, d in arb_dominant()) {
                let cd = CartanData::sl2();
                prop_assert_eq!(sigma_involution(&cd, &sigma_involution(&cd, &m)), m.clone());
                let s = Rational64::from(s);
                prop_assert_eq!(tau_shift(&cd, &tau_shift(&cd, &m, s), -s), m);
                let twice = dual_highest_monomial(&cd, &dual_highest_monomial(&cd, &d).unwrap()).unwrap();
                prop_assert_eq!(twice, d.clone());
                let bar = bar_monomial(&cd, &d, 4).unwrap();
                prop_assert_eq!(bar_monomial(&cd, &bar, 4).unwrap(), d);
            }
        }
    }
}

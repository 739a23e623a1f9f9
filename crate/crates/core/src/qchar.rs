//! q-characters: finite sums of monomials with positive multiplicities and a
//! designated highest monomial.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cartan::{weight_leq, AffineType, CartanData};
use crate::error::{Error, Result};
use crate::ylattice::{
    a_monomial, circ_var, decompose_over_a, is_dominant, leq, level, trunc_parts, weight, APosition, Monomial, YVar,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QCharacter {
    pub highest: Monomial,
    pub terms: BTreeMap<Monomial, u64>,
}

#[derive(Serialize, Deserialize)]
struct CharacterJson {
    highest: Monomial,
    terms: Vec<(Monomial, u64)>,
}

impl Serialize for QCharacter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CharacterJson {
            highest: self.highest.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), *c)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QCharacter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CharacterJson::deserialize(d)?;
        let mut terms = BTreeMap::new();
        for (m, c) in raw.terms {
            if c == 0 {
                return Err(serde::de::Error::custom(format!("zero multiplicity for {m}")));
            }
            if terms.insert(m.clone(), c).is_some() {
                return Err(serde::de::Error::custom(format!("duplicate term {m}")));
            }
        }
        Ok(QCharacter { highest: raw.highest, terms })
    }
}

impl QCharacter {
    pub fn new(highest: Monomial, terms: BTreeMap<Monomial, u64>) -> Self {
        QCharacter { highest, terms }
    }

    /// The one-term character of `m`.
    pub fn monomial(m: Monomial) -> Self {
        QCharacter { highest: m.clone(), terms: BTreeMap::from([(m, 1)]) }
    }

    pub fn one() -> Self {
        QCharacter::monomial(Monomial::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, u64)>>(highest: Monomial, terms: I) -> Self {
        let mut out = BTreeMap::new();
        for (m, c) in terms {
            if c > 0 {
                *out.entry(m).or_insert(0) += c;
            }
        }
        QCharacter { highest, terms: out }
    }

    pub fn multiplicity(&self, m: &Monomial) -> u64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total dimension, the sum of multiplicities.
    pub fn dim(&self) -> u64 {
        self.terms.values().sum()
    }

    fn map_monomials<F: Fn(&Monomial) -> Monomial>(&self, f: F) -> BTreeMap<Monomial, u64> {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            *out.entry(f(m)).or_insert(0) += c;
        }
        out
    }
}

pub fn char_add(c1: &QCharacter, c2: &QCharacter) -> QCharacter {
    let mut terms = c1.terms.clone();
    for (m, c) in &c2.terms {
        *terms.entry(m.clone()).or_insert(0) += c;
    }
    QCharacter { highest: c1.highest.clone(), terms }
}

pub fn char_mul(c1: &QCharacter, c2: &QCharacter) -> QCharacter {
    let mut terms = BTreeMap::new();
    for (m1, a) in &c1.terms {
        for (m2, b) in &c2.terms {
            *terms.entry(m1.mul(m2)).or_insert(0) += a * b;
        }
    }
    QCharacter { highest: c1.highest.mul(&c2.highest), terms }
}

pub fn char_product<'a, I: IntoIterator<Item = &'a QCharacter>>(cs: I) -> QCharacter {
    cs.into_iter().fold(QCharacter::one(), |acc, c| char_mul(&acc, c))
}

fn filter_terms<F: FnMut(&Monomial) -> Result<bool>>(c: &QCharacter, mut keep: F) -> Result<QCharacter> {
    let mut terms = BTreeMap::new();
    for (m, k) in &c.terms {
        if keep(m)? {
            terms.insert(m.clone(), *k);
        }
    }
    Ok(QCharacter { highest: c.highest.clone(), terms })
}

/// Terms with `m^{<=L-1} = M^{<=L-1}`.
pub fn char_trunc_geq(cd: &CartanData, c: &QCharacter, cut: i64) -> Result<QCharacter> {
    let top = trunc_parts(cd, &c.highest, cut - 1)?.0;
    filter_terms(c, |m| Ok(trunc_parts(cd, m, cut - 1)?.0 == top))
}

/// Terms with `m^{>=L+1} = M^{>=L+1}`.
pub fn char_trunc_leq(cd: &CartanData, c: &QCharacter, cut: i64) -> Result<QCharacter> {
    let top = trunc_parts(cd, &c.highest, cut + 1)?.2;
    filter_terms(c, |m| Ok(trunc_parts(cd, m, cut + 1)?.2 == top))
}

/// Whether `A_{i,a}^{-1}` lies in the generating set of `A_{>=L}` (`upper`)
/// or `A_{<=L}`.
pub fn in_a_window(cd: &CartanData, p: &APosition, cut: i64, upper: bool) -> bool {
    let i = p.node;
    let di = cd.d[i];
    let order = cd.twist_order as i64;
    if di % order == 0 && p.point.kappa != 0 {
        return false;
    }
    let mr = Rational64::from(cd.mu_r(i));
    let n = if upper { (p.point.lambda - mr) / di - cut } else { Rational64::from(cut) - (p.point.lambda + mr) / di };
    n.is_integer() && n >= Rational64::zero()
}

fn trunc_alt(cd: &CartanData, c: &QCharacter, cut: i64, upper: bool) -> Result<QCharacter> {
    for v in c.highest.vars() {
        if !level(cd, v).is_integer() {
            return Err(Error::NonIntegralLevel(c.highest.to_string()));
        }
    }
    filter_terms(c, |m| {
        Ok(decompose_over_a(cd, m, &c.highest)
            .is_some_and(|s| s.iter().all(|p| in_a_window(cd, p, cut, upper))))
    })
}

/// Terms with `m M^{-1}` in `A_{>=L}`.
pub fn char_trunc_geq_alt(cd: &CartanData, c: &QCharacter, cut: i64) -> Result<QCharacter> {
    trunc_alt(cd, c, cut, true)
}

/// Terms with `m M^{-1}` in `A_{<=L}`.
pub fn char_trunc_leq_alt(cd: &CartanData, c: &QCharacter, cut: i64) -> Result<QCharacter> {
    trunc_alt(cd, c, cut, false)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub fundamental: bool,
    pub failures: Vec<String>,
}

/// If `m` is `Y_{i,a^{d_i}}` for a single node, returns that variable.
pub fn fundamental_variable(cd: &CartanData, m: &Monomial) -> Option<YVar> {
    let mut it = m.iter();
    let (v, e) = it.next()?;
    if it.next().is_some() || *e != 1 || v.node > cd.rank() {
        return None;
    }
    let di = cd.d[v.node];
    (di % cd.twist_order as i64 != 0 || v.kappa == 0).then_some(*v)
}

/// Checks the triangularity of a simple character and, for a fundamental
/// highest monomial, the shape of its first descent.
pub fn validate_simple_character(cd: &CartanData, c: &QCharacter) -> ValidationReport {
    let mut failures = vec![];
    match c.terms.get(&c.highest) {
        Some(1) => {}
        Some(k) => failures.push(format!("highest {} has multiplicity {k}", c.highest)),
        None => failures.push(format!("highest {} missing from terms", c.highest)),
    }
    if !is_dominant(&c.highest) {
        failures.push(format!("highest {} is not dominant", c.highest));
    }
    let fund = fundamental_variable(cd, &c.highest);
    if let Some(v) = fund {
        let first = APosition::new(v.node, crate::ylattice::SpectralPoint {
            kappa: v.kappa,
            lambda: v.lambda + cd.mu_r(v.node),
        });
        match a_monomial(cd, first) {
            Ok(a) => {
                let m = c.highest.div(&a);
                if !c.terms.contains_key(&m) {
                    failures.push(format!("first descent {m} missing"));
                }
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    for m in c.terms.keys() {
        if *m == c.highest {
            continue;
        }
        let Some(s) = decompose_over_a(cd, m, &c.highest) else {
            failures.push(format!("{m} is not below {}", c.highest));
            continue;
        };
        if let Some(v) = fund {
            let i = v.node;
            let first = APosition::new(i, crate::ylattice::SpectralPoint {
                kappa: v.kappa,
                lambda: v.lambda + cd.mu_r(i),
            });
            if !s.contains(&first) {
                failures.push(format!("{m} does not descend through {first}"));
            }
            let base = level(cd, &v);
            if let Some(p) = s.iter().find(|p| p.point.lambda / cd.d[p.node] <= base) {
                failures.push(format!("{m} uses non-positive shift {p}"));
            }
        }
    }
    ValidationReport { passed: failures.is_empty(), fundamental: fund.is_some(), failures }
}

/// The term every other term's weight lies below, if there is one.
fn weight_top(cd: &CartanData, terms: &BTreeMap<Monomial, u64>) -> Option<Monomial> {
    let ws: Vec<_> = terms.keys().map(|m| (m, weight(cd, m))).collect();
    ws.iter().find(|(_, w)| ws.iter().all(|(_, x)| weight_leq(x, w, cd))).map(|(m, _)| (*m).clone())
}

/// The variable map `Y_{i,(eps^k q^l)^{d_i}} -> °Y_{i,(eps^{-k} q^{ell-l+r h})^{d_i}}^{-1}`.
pub fn zeta_monomial(cd: &CartanData, m: &Monomial, ell: i64) -> Result<Monomial> {
    let mut out = Monomial::one();
    for (v, e) in m.iter() {
        let l = level(cd, v);
        if !l.is_integer() {
            return Err(Error::NonIntegralLevel(m.to_string()));
        }
        let di = cd.d[v.node];
        let kappa = (-(v.kappa as i64)).rem_euclid(cd.twist_order as i64) as u32;
        let lambda = Rational64::from(di * (ell - l.to_integer() + cd.rvee_hvee));
        out.mul_var(circ_var(cd, &YVar::new(v.node, kappa, lambda)), -e);
    }
    Ok(out)
}

/// ζ applied termwise; the highest monomial of the image is recomputed.
pub fn zeta_map(cd: &CartanData, c: &QCharacter, ell: i64) -> Result<QCharacter> {
    let mut terms = BTreeMap::new();
    for (m, k) in &c.terms {
        *terms.entry(zeta_monomial(cd, m, ell)?).or_insert(0) += k;
    }
    let highest = match weight_top(cd, &terms) {
        Some(h) => h,
        None => zeta_monomial(cd, &c.highest, ell)?,
    };
    Ok(QCharacter { highest, terms })
}

/// σ applied termwise; the highest monomial of the image is recomputed.
pub fn sigma_map(cd: &CartanData, c: &QCharacter) -> QCharacter {
    let terms = c.map_monomials(|m| crate::ylattice::sigma_involution(cd, m));
    let highest = weight_top(cd, &terms).unwrap_or_else(|| crate::ylattice::sigma_involution(cd, &c.highest));
    QCharacter { highest, terms }
}

/// Multiplicities of simple characters in `product`, found by peeling off
/// maximal dominant monomials.
pub fn triangular_decompose<F>(cd: &CartanData, product: &QCharacter, provider: F) -> Result<BTreeMap<Monomial, u64>>
where
    F: Fn(&Monomial) -> Result<QCharacter>,
{
    let mut residual: BTreeMap<Monomial, i64> = product.terms.iter().map(|(m, c)| (m.clone(), *c as i64)).collect();
    let mut out = BTreeMap::new();
    while !residual.is_empty() {
        let dominant: Vec<&Monomial> = residual.keys().filter(|m| is_dominant(m)).collect();
        if dominant.is_empty() {
            let some = residual.keys().next().unwrap();
            return Err(Error::InconsistentResidual(some.to_string()));
        }
        let top = dominant
            .iter()
            .find(|d| !dominant.iter().any(|e| e != *d && leq(cd, d, e)))
            .map(|d| (*d).clone())
            .ok_or_else(|| Error::Internal("no maximal dominant monomial".into()))?;
        let coeff = residual[&top];
        if coeff < 0 {
            return Err(Error::NegativeMultiplicity { monomial: top.to_string(), coeff });
        }
        let simple = provider(&top)?;
        if simple.highest != top || simple.multiplicity(&top) != 1 {
            return Err(Error::InconsistentResidual(format!("provider returned a character without highest {top}")));
        }
        for (m, k) in &simple.terms {
            let e = residual.entry(m.clone()).or_insert(0);
            *e -= coeff * *k as i64;
            if *e == 0 {
                residual.remove(m);
            }
        }
        out.insert(top, coeff as u64);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ComputedSl2,
    Ingested,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    #[serde(flatten)]
    pub character: QCharacter,
    #[serde(default = "default_provenance")]
    pub provenance: Provenance,
}

fn default_provenance() -> Provenance {
    Provenance::Ingested
}

/// Simple characters keyed by the canonical string of their highest monomial.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CharacterTable {
    pub entries: BTreeMap<String, TableEntry>,
}

impl CharacterTable {
    pub fn new() -> Self {
        CharacterTable::default()
    }

    pub fn insert(&mut self, character: QCharacter, provenance: Provenance) {
        self.entries.insert(character.highest.to_string(), TableEntry { character, provenance });
    }

    pub fn get(&self, m: &Monomial) -> Option<&QCharacter> {
        self.entries.get(&m.to_string()).map(|e| &e.character)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.entries)?)
    }

    pub fn from_json(cd: &CartanData, s: &str) -> Result<Self> {
        let entries: BTreeMap<String, TableEntry> = serde_json::from_str(s)?;
        for (key, e) in &entries {
            let c = &e.character;
            let bad = |reason: String| Error::Validation { entry: key.clone(), reason };
            if *key != c.highest.to_string() {
                return Err(bad(format!("key does not match highest monomial {}", c.highest)));
            }
            c.highest.check_in(cd).map_err(|err| bad(err.to_string()))?;
            for m in c.terms.keys() {
                m.check_in(cd).map_err(|err| bad(err.to_string()))?;
            }
            if e.provenance == Provenance::ComputedSl2 && cd.affine_type == AffineType::sl2() {
                let fresh = crate::sl2theory::chi_simple_sl2(&c.highest).map_err(|err| bad(err.to_string()))?;
                if fresh.terms != c.terms {
                    return Err(bad("terms differ from the recomputed character".into()));
                }
            }
            let report = validate_simple_character(cd, c);
            if !report.passed {
                return Err(bad(report.failures.join("; ")));
            }
        }
        Ok(CharacterTable { entries })
    }
}

pub fn save_table(t: &CharacterTable, path: &Path) -> Result<()> {
    fs::write(path, t.to_json()? + "\n")?;
    Ok(())
}

pub fn load_table(cd: &CartanData, path: &Path) -> Result<CharacterTable> {
    CharacterTable::from_json(cd, &fs::read_to_string(path)?)
}

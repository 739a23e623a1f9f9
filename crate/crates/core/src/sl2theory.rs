//! Segment combinatorics for `U_q(sl2^)`: Kirillov-Reshetikhin strings,
//! their characters, tensor simplicity, and exhaustive checks over small
//! windows of dominant monomials.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cartan::CartanData;
use crate::error::{Error, Result};
use crate::qchar::{
    char_mul, char_product, char_trunc_geq, char_trunc_geq_alt, char_trunc_leq, char_trunc_leq_alt,
    sigma_map, triangular_decompose, validate_simple_character, zeta_map, QCharacter,
};
use crate::sl2engine::{extract_qchar, is_simple_thin, realize_simple, tensor_all, verify_defining_relations, Rep};
use crate::ylattice::{bar_monomial, bar_variables, dual_highest_monomial, trunc_parts, Monomial, YVar};

/// The string `{base, base+2, ..., base+2(length-1)}` of `W_{length, q^base}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct KRString {
    pub base: i64,
    pub length: u32,
}

impl KRString {
    pub fn new(base: i64, length: u32) -> Self {
        KRString { base, length }
    }

    pub fn support(&self) -> Vec<i64> {
        (0..self.length as i64).map(|j| self.base + 2 * j).collect()
    }
}

pub fn kr_monomial(s: KRString) -> Monomial {
    Monomial::from_pairs(s.support().into_iter().map(|l| (YVar::q(1, l), 1)))
}

/// False exactly when the union of the supports is a `q^2`-segment
/// properly containing both.
pub fn in_general_position(s1: KRString, s2: KRString) -> bool {
    if s1.length == 0 || s2.length == 0 || (s1.base - s2.base).rem_euclid(2) != 0 {
        return true;
    }
    let a: BTreeSet<i64> = s1.support().into_iter().collect();
    let b: BTreeSet<i64> = s2.support().into_iter().collect();
    let union: BTreeSet<i64> = a.union(&b).copied().collect();
    let lo = *union.first().unwrap();
    let hi = *union.last().unwrap();
    let segment = (hi - lo) / 2 + 1 == union.len() as i64;
    !(segment && union != a && union != b)
}

/// Exponents of a dominant sl2 monomial on the integer lattice.
fn sl2_levels(m: &Monomial) -> Result<BTreeMap<i64, i64>> {
    let mut out = BTreeMap::new();
    for (v, e) in m.iter() {
        if v.node != 1 || v.kappa != 0 {
            return Err(Error::NotSl2(m.to_string()));
        }
        if !v.lambda.is_integer() {
            return Err(Error::NonIntegralLevel(m.to_string()));
        }
        if *e < 0 {
            return Err(Error::NotDominant(m.to_string()));
        }
        out.insert(v.lambda.to_integer(), *e);
    }
    Ok(out)
}

/// Greedy factorisation: repeatedly peel the maximal run of consecutive
/// `q^2`-steps starting at the lowest remaining point.
pub fn factor_into_strings(m: &Monomial) -> Result<Vec<KRString>> {
    let levels = sl2_levels(m)?;
    let mut out = vec![];
    for parity in [0, 1] {
        let mut counts: BTreeMap<i64, i64> =
            levels.iter().filter(|(l, _)| l.rem_euclid(2) == parity).map(|(l, e)| (*l, *e)).collect();
        while let Some((&start, _)) = counts.iter().next() {
            let mut len = 0;
            while counts.contains_key(&(start + 2 * len)) {
                let l = start + 2 * len;
                let c = counts.get_mut(&l).unwrap();
                *c -= 1;
                if *c == 0 {
                    counts.remove(&l);
                }
                len += 1;
            }
            out.push(KRString::new(start, len as u32));
        }
    }
    out.sort();
    Ok(out)
}

/// The `k+1`-term ladder `T_j = kr_monomial * prod_{i=k-j+1..k} A_{q^{base+2i-1}}^{-1}`.
pub fn chi_kr(s: KRString) -> QCharacter {
    let top = kr_monomial(s);
    let k = s.length as i64;
    let mut terms = vec![(top.clone(), 1)];
    let mut cur = top.clone();
    for i in (1..=k).rev() {
        let c = s.base + 2 * i - 1;
        cur = cur.div(&Monomial::sl2(&[(c - 1, 1), (c + 1, 1)]));
        terms.push((cur.clone(), 1));
    }
    QCharacter::from_terms(top, terms)
}

/// `chi_q(L(m))` as the product of the string characters of `m`.
pub fn chi_simple_sl2(m: &Monomial) -> Result<QCharacter> {
    let strings = factor_into_strings(m)?;
    let mut c = char_product(&strings.iter().map(|s| chi_kr(*s)).collect::<Vec<_>>());
    c.highest = m.clone();
    Ok(c)
}

/// Simplicity of `L(m_1) ⊗ ... ⊗ L(m_N)`: all strings pairwise in general position.
pub fn tensor_simple_sl2(ms: &[Monomial]) -> Result<bool> {
    let mut strings = vec![];
    for m in ms {
        strings.extend(factor_into_strings(m)?);
    }
    for (x, s) in strings.iter().enumerate() {
        for t in &strings[x + 1..] {
            if !in_general_position(*s, *t) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Dominant sl2 monomials with levels in `[0, ell]` and total degree `1..=max_k`.
pub fn window(ell: i64, max_k: u32) -> Vec<Monomial> {
    let points: Vec<i64> = (0..=ell).collect();
    let mut out = vec![];
    let mut stack: Vec<(usize, Monomial, u32)> = vec![(0, Monomial::one(), 0)];
    while let Some((from, m, deg)) = stack.pop() {
        if deg > 0 {
            out.push(m.clone());
        }
        if deg == max_k {
            continue;
        }
        for (k, &p) in points.iter().enumerate().skip(from) {
            stack.push((k, m.mul(&Monomial::sl2(&[(p, 1)])), deg + 1));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Multisets of size `2..=max_size` drawn from `items` (as index tuples).
pub fn multisets(n_items: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut stack: Vec<Vec<usize>> = (0..n_items).map(|i| vec![i]).collect();
    while let Some(t) = stack.pop() {
        if t.len() >= 2 {
            out.push(t.clone());
        }
        if t.len() < max_size {
            for j in *t.last().unwrap()..n_items {
                let mut next = t.clone();
                next.push(j);
                stack.push(next);
            }
        }
    }
    out.sort();
    out
}

fn tuple_key(ms: &[Monomial]) -> String {
    ms.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ; ")
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OracleStats {
    pub sampled: usize,
    pub thin: usize,
    pub skipped_non_thin: usize,
    pub skipped_large: usize,
    pub confirmations: usize,
    pub confirmed_simple: usize,
    pub confirmed_not_simple: usize,
    pub relation_failures: Vec<String>,
    pub disagreements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactgReport {
    pub ell: i64,
    pub max_k: u32,
    pub max_tuple: usize,
    pub seed: u64,
    pub monomials: usize,
    pub tuples: usize,
    pub globally_simple: usize,
    pub counterexamples: Vec<String>,
    pub character_mismatches: Vec<String>,
    pub oracle: OracleStats,
}

impl FactgReport {
    pub fn passed(&self, min_confirmations: usize) -> bool {
        self.counterexamples.is_empty()
            && self.character_mismatches.is_empty()
            && self.oracle.disagreements.is_empty()
            && self.oracle.relation_failures.is_empty()
            && self.oracle.confirmations >= min_confirmations
    }
}

/// Cache of realised simple modules, filled before parallel use.
pub struct RealizationCache {
    reps: BTreeMap<Monomial, Rep>,
}

impl RealizationCache {
    pub fn build<'a, I: IntoIterator<Item = &'a Monomial>>(ms: I) -> Result<Self> {
        let wanted: BTreeSet<Monomial> = ms.into_iter().cloned().collect();
        let built: Vec<(Monomial, Result<Rep>)> =
            wanted.into_par_iter().map(|m| { let r = realize_simple(&m); (m, r) }).collect();
        let mut reps = BTreeMap::new();
        for (m, r) in built {
            reps.insert(m, r?);
        }
        Ok(RealizationCache { reps })
    }

    pub fn get(&self, m: &Monomial) -> &Rep {
        &self.reps[m]
    }
}

/// Outcome of comparing one tensor product against the matrix oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    Agree { simple: bool },
    Disagree { combinatorial: bool, matrix: bool },
    NotThin,
    TooLarge,
    RelationsFailed(String),
}

/// Realises `L(m_1) ⊗ ... ⊗ L(m_N)` and compares the matrix simplicity
/// test with the segment criterion.
pub fn oracle_compare(ms: &[Monomial], cache: &RealizationCache, max_ambient: usize) -> Result<OracleOutcome> {
    let degree: i64 = ms.iter().map(Monomial::degree).sum();
    if degree < 0 || (1usize << degree.min(62)) > max_ambient {
        return Ok(OracleOutcome::TooLarge);
    }
    let reps: Vec<Rep> = ms.iter().map(|m| cache.get(m).clone()).collect();
    let t = tensor_all(&reps);
    let rel = verify_defining_relations(&t);
    if let Some(f) = rel.first_failure {
        return Ok(OracleOutcome::RelationsFailed(f));
    }
    let matrix = match is_simple_thin(&t) {
        Ok(b) => b,
        Err(Error::NotThin { .. }) => return Ok(OracleOutcome::NotThin),
        Err(e) => return Err(e),
    };
    let combinatorial = tensor_simple_sl2(ms)?;
    Ok(if matrix == combinatorial {
        OracleOutcome::Agree { simple: matrix }
    } else {
        OracleOutcome::Disagree { combinatorial, matrix }
    })
}

/// Pairwise simplicity versus global simplicity on every tuple of the
/// window, the same statement at character level, and a sampled matrix
/// cross-check.
pub fn verify_factg(ell: i64, max_k: u32, max_tuple: usize, seed: u64, samples: usize) -> Result<FactgReport> {
    let ws = window(ell, max_k);
    let tuples = multisets(ws.len(), max_tuple);
    let chars: Vec<QCharacter> = ws.iter().map(chi_simple_sl2).collect::<Result<_>>()?;

    let results: Vec<Result<(bool, Option<String>, Option<String>)>> = tuples
        .par_iter()
        .map(|t| {
            let ms: Vec<Monomial> = t.iter().map(|&i| ws[i].clone()).collect();
            let global = tensor_simple_sl2(&ms)?;
            let mut pairwise = true;
            for x in 0..ms.len() {
                for y in x + 1..ms.len() {
                    pairwise &= tensor_simple_sl2(&[ms[x].clone(), ms[y].clone()])?;
                }
            }
            let key = tuple_key(&ms);
            let counter = (pairwise != global).then(|| format!("{key}: pairwise {pairwise}, global {global}"));
            let product = char_product(t.iter().map(|&i| &chars[i]));
            let whole = ms.iter().fold(Monomial::one(), |a, b| a.mul(b));
            let char_simple = chi_simple_sl2(&whole)?.terms == product.terms;
            let mismatch =
                (char_simple != global).then(|| format!("{key}: characters say {char_simple}, segments say {global}"));
            Ok((global, counter, mismatch))
        })
        .collect();
    let mut globally_simple = 0;
    let mut counterexamples = vec![];
    let mut character_mismatches = vec![];
    for r in results {
        let (g, c, m) = r?;
        globally_simple += g as usize;
        counterexamples.extend(c);
        character_mismatches.extend(m);
    }

    // sample among tuples whose character is multiplicity free (thin) and
    // whose ambient tensor of fundamentals has dimension at most 64
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..tuples.len())
        .filter(|&k| {
            let t = &tuples[k];
            let degree: i64 = t.iter().map(|&i| ws[i].degree()).sum();
            degree <= 6 && char_product(t.iter().map(|&i| &chars[i])).terms.values().all(|&c| c == 1)
        })
        .collect();
    order.shuffle(&mut rng);
    let chosen: Vec<Vec<Monomial>> =
        order.iter().take(samples).map(|&k| tuples[k].iter().map(|&i| ws[i].clone()).collect()).collect();
    let cache = RealizationCache::build(chosen.iter().flatten())?;
    let outcomes: Vec<Result<OracleOutcome>> = chosen.par_iter().map(|ms| oracle_compare(ms, &cache, 64)).collect();
    let mut oracle = OracleStats { sampled: chosen.len(), ..Default::default() };
    for (ms, o) in chosen.iter().zip(outcomes) {
        let key = tuple_key(ms);
        match o? {
            OracleOutcome::Agree { simple } => {
                oracle.thin += 1;
                oracle.confirmations += 1;
                if simple {
                    oracle.confirmed_simple += 1;
                } else {
                    oracle.confirmed_not_simple += 1;
                }
            }
            OracleOutcome::Disagree { combinatorial, matrix } => {
                oracle.thin += 1;
                oracle.disagreements.push(format!("{key}: segments {combinatorial}, matrices {matrix}"));
            }
            OracleOutcome::NotThin => oracle.skipped_non_thin += 1,
            OracleOutcome::TooLarge => oracle.skipped_large += 1,
            OracleOutcome::RelationsFailed(f) => oracle.relation_failures.push(format!("{key}: {f}")),
        }
    }
    Ok(FactgReport {
        ell,
        max_k,
        max_tuple,
        seed,
        monomials: ws.len(),
        tuples: tuples.len(),
        globally_simple,
        counterexamples,
        character_mismatches,
        oracle,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        CheckReport { name: name.into(), ..Default::default() }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

fn mul_char_by_monomial(c: &QCharacter, m: &Monomial) -> QCharacter {
    char_mul(c, &QCharacter::monomial(m.clone()))
}

/// `chi_{q,>=L}(L(M)) = M^{<=L-1} chi_q(L(M^{>=L}))` on the window, `L` in `[-1, ell+1]`.
pub fn check_useqt2(ell: i64, max_k: u32) -> Result<CheckReport> {
    let cd = CartanData::sl2();
    let mut rep = CheckReport::new("useqt2");
    for m in window(ell, max_k) {
        let c = chi_simple_sl2(&m)?;
        for cut in -1..=ell + 1 {
            let lhs = char_trunc_geq(&cd, &c, cut)?;
            let (low, _, _) = trunc_parts(&cd, &m, cut - 1)?;
            let (_, _, high) = trunc_parts(&cd, &m, cut)?;
            let rhs = mul_char_by_monomial(&chi_simple_sl2(&high)?, &low);
            rep.record(lhs.terms == rhs.terms, || format!("{m} at L = {cut}"));
        }
    }
    Ok(rep)
}

/// Both truncations agree with their `A`-monomial descriptions.
pub fn check_alternate(ell: i64, max_k: u32) -> Result<CheckReport> {
    let cd = CartanData::sl2();
    let mut rep = CheckReport::new("alternate");
    for m in window(ell, max_k) {
        let c = chi_simple_sl2(&m)?;
        for cut in -1..=ell + 1 {
            let geq = char_trunc_geq(&cd, &c, cut)? == char_trunc_geq_alt(&cd, &c, cut)?;
            rep.record(geq, || format!("{m} >= {cut}"));
            let leq = char_trunc_leq(&cd, &c, cut)? == char_trunc_leq_alt(&cd, &c, cut)?;
            rep.record(leq, || format!("{m} <= {cut}"));
        }
    }
    Ok(rep)
}

/// `sigma(chi_q(L(m))) = chi_q(L(M))` with `M` the dual highest monomial.
pub fn check_duality(ell: i64, max_k: u32) -> Result<CheckReport> {
    let cd = CartanData::sl2();
    let mut rep = CheckReport::new("duality");
    for m in window(ell, max_k) {
        let lhs = sigma_map(&cd, &chi_simple_sl2(&m)?);
        let dual = dual_highest_monomial(&cd, &m)?;
        let rhs = chi_simple_sl2(&dual)?;
        rep.record(lhs == rhs, || format!("{m}: dual {dual}"));
    }
    Ok(rep)
}

/// `zeta(chi_q(L(m))) = chi_q(L(bar m))`, plus the literal variable-wise
/// identity reported separately.
pub fn check_zeta(ells: &[i64], max_k: u32) -> Result<(CheckReport, CheckReport)> {
    let cd = CartanData::sl2();
    let mut zeta = CheckReport::new("zeta");
    let mut literal = CheckReport::new("literal-bar");
    for &ell in ells {
        for m in window(ell, max_k) {
            let c = chi_simple_sl2(&m)?;
            let target = chi_simple_sl2(&bar_monomial(&cd, &m, ell)?)?;
            zeta.record(zeta_map(&cd, &c, ell)? == target, || format!("{m}, ell = {ell}"));
            let mut image = BTreeMap::new();
            let mut outside = None;
            for (t, k) in &c.terms {
                match bar_variables(&cd, t, ell) {
                    Ok(b) => *image.entry(b).or_insert(0u64) += k,
                    Err(_) => outside = Some(t.clone()),
                }
            }
            literal.record(outside.is_none() && image == target.terms, || match &outside {
                Some(t) => format!("{m}, ell = {ell}: term {t} leaves the bar domain"),
                None => format!("{m}, ell = {ell}: termwise bar differs from the character of the bar"),
            });
        }
    }
    Ok((zeta, literal))
}

/// Tuples of level-0 monomials are simple.
pub fn check_lzero(max_k: u32, max_tuple: usize) -> Result<CheckReport> {
    let ws = window(0, max_k);
    let mut rep = CheckReport::new("lzero");
    for t in multisets(ws.len(), max_tuple) {
        let ms: Vec<Monomial> = t.iter().map(|&i| ws[i].clone()).collect();
        rep.record(tensor_simple_sl2(&ms)?, || tuple_key(&ms));
    }
    for m in &ws {
        rep.record(tensor_simple_sl2(std::slice::from_ref(m))?, || m.to_string());
    }
    Ok(rep)
}

/// String characters against the realised modules.
pub fn check_kr_oracle(max_k: u32, bases: std::ops::RangeInclusive<i64>) -> Result<CheckReport> {
    let mut rep = CheckReport::new("kr-oracle");
    for k in 1..=max_k {
        for base in bases.clone() {
            let s = KRString::new(base, k);
            let oracle = extract_qchar(&realize_simple(&kr_monomial(s))?)?;
            rep.record(oracle == chi_kr(s), || format!("{s:?}"));
        }
    }
    Ok(rep)
}

/// Every window simple passes validation, and every pairwise product
/// decomposes with nonnegative multiplicities and top coefficient one.
pub fn check_lower_and_kl(ell: i64, max_k: u32) -> Result<(CheckReport, CheckReport)> {
    let cd = CartanData::sl2();
    let ws = window(ell, max_k);
    let mut lower = CheckReport::new("lower");
    for m in &ws {
        let r = validate_simple_character(&cd, &chi_simple_sl2(m)?);
        lower.record(r.passed, || format!("{m}: {}", r.failures.join("; ")));
    }
    let mut kl = CheckReport::new("kl");
    let provider = |d: &Monomial| chi_simple_sl2(d);
    for (x, a) in ws.iter().enumerate() {
        for b in &ws[x..] {
            let product = char_mul(&chi_simple_sl2(a)?, &chi_simple_sl2(b)?);
            let top = a.mul(b);
            let ok = match triangular_decompose(&cd, &product, provider) {
                Ok(mults) => mults.get(&top) == Some(&1),
                Err(_) => false,
            };
            kl.record(ok, || format!("{a} * {b}"));
        }
    }
    Ok((lower, kl))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FactReport {
    pub pairs: usize,
    pub thin: usize,
    pub agreements: usize,
    pub simple: usize,
    pub not_simple: usize,
    pub skipped_non_thin: usize,
    pub disagreements: Vec<String>,
    pub relation_failures: Vec<String>,
}

/// Segment criterion against the matrix oracle for all unordered pairs of
/// strings with length `<= max_k` and base in `bases`.
pub fn check_fact_pairs(max_k: u32, bases: std::ops::RangeInclusive<i64>) -> Result<FactReport> {
    let strings: Vec<KRString> =
        (1..=max_k).flat_map(|k| bases.clone().map(move |b| KRString::new(b, k))).collect();
    let monos: Vec<Monomial> = strings.iter().map(|s| kr_monomial(*s)).collect();
    let cache = RealizationCache::build(monos.iter())?;
    let pairs: Vec<(usize, usize)> =
        (0..strings.len()).flat_map(|i| (i..strings.len()).map(move |j| (i, j))).collect();
    let outcomes: Vec<Result<OracleOutcome>> = pairs
        .par_iter()
        .map(|&(i, j)| oracle_compare(&[monos[i].clone(), monos[j].clone()], &cache, 64))
        .collect();
    let mut rep = FactReport { pairs: pairs.len(), ..Default::default() };
    for (&(i, j), o) in pairs.iter().zip(outcomes) {
        let key = format!("{:?} x {:?}", strings[i], strings[j]);
        match o? {
            OracleOutcome::Agree { simple } => {
                rep.thin += 1;
                rep.agreements += 1;
                if simple {
                    rep.simple += 1;
                } else {
                    rep.not_simple += 1;
                }
            }
            OracleOutcome::Disagree { combinatorial, matrix } => {
                rep.thin += 1;
                rep.disagreements.push(format!("{key}: segments {combinatorial}, matrices {matrix}"));
            }
            OracleOutcome::NotThin | OracleOutcome::TooLarge => rep.skipped_non_thin += 1,
            OracleOutcome::RelationsFailed(f) => rep.relation_failures.push(format!("{key}: {f}")),
        }
    }
    Ok(rep)
}

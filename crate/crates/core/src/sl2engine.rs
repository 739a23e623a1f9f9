//! Exact matrix models of finite-dimensional `U_q(sl2^)`-modules over `Q(q)`.
//!
//! Basis vectors always diagonalise `k_1`; `weights[j]` is the exponent of
//! its `k_1`-eigenvalue.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{Matrix, RatFunc};
use crate::qchar::{char_product, QCharacter};
use crate::ylattice::{Monomial, YVar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Generator {
    X0Plus,
    X0Minus,
    X1Plus,
    X1Minus,
    K0,
    K1,
    K0Inv,
    K1Inv,
}

impl Generator {
    pub const ALL: [Generator; 8] = [
        Generator::X0Plus,
        Generator::X0Minus,
        Generator::X1Plus,
        Generator::X1Minus,
        Generator::K0,
        Generator::K1,
        Generator::K0Inv,
        Generator::K1Inv,
    ];

    pub const RAISING_LOWERING: [Generator; 4] =
        [Generator::X0Plus, Generator::X0Minus, Generator::X1Plus, Generator::X1Minus];

    pub fn name(self) -> &'static str {
        match self {
            Generator::X0Plus => "x0+",
            Generator::X0Minus => "x0-",
            Generator::X1Plus => "x1+",
            Generator::X1Minus => "x1-",
            Generator::K0 => "k0",
            Generator::K1 => "k1",
            Generator::K0Inv => "k0^-1",
            Generator::K1Inv => "k1^-1",
        }
    }

    /// Change of the `k_1`-weight exponent.
    fn weight_shift(self) -> i64 {
        match self {
            Generator::X1Plus | Generator::X0Minus => 2,
            Generator::X1Minus | Generator::X0Plus => -2,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rep {
    pub dim: usize,
    mats: BTreeMap<Generator, Matrix>,
    /// q-exponents `alpha` of the fundamental factors `L_{q^alpha}`.
    pub factors: Vec<i64>,
    pub weights: Vec<i64>,
    pub labels: Vec<String>,
    /// Whether the basis is the full tensor basis of `factors`.
    pub full_tensor: bool,
}

impl Rep {
    pub fn matrix(&self, g: Generator) -> &Matrix {
        &self.mats[&g]
    }

    pub fn set_matrix(&mut self, g: Generator, m: Matrix) {
        self.mats.insert(g, m);
    }

    /// Matrices as strings, keyed by generator name.
    pub fn dump(&self) -> BTreeMap<&'static str, Vec<Vec<String>>> {
        self.mats.iter().map(|(g, m)| (g.name(), m.dump())).collect()
    }

    fn weight_indices(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (j, w) in self.weights.iter().enumerate() {
            out.entry(*w).or_default().push(j);
        }
        out
    }
}

fn diag_q(weights: &[i64], sign: i64) -> Matrix {
    Matrix::diag(weights.iter().map(|w| RatFunc::q_pow(sign * w)).collect())
}

fn with_cartan(mut mats: BTreeMap<Generator, Matrix>, weights: &[i64]) -> BTreeMap<Generator, Matrix> {
    mats.insert(Generator::K1, diag_q(weights, 1));
    mats.insert(Generator::K1Inv, diag_q(weights, -1));
    mats.insert(Generator::K0, diag_q(weights, -1));
    mats.insert(Generator::K0Inv, diag_q(weights, 1));
    mats
}

/// The two-dimensional module `L_a`, `a = q^alpha`, on the basis `(v+, v-)`.
pub fn fundamental_rep(alpha: i64) -> Rep {
    let z = RatFunc::zero;
    let one = RatFunc::one;
    let mats = BTreeMap::from([
        (Generator::X1Plus, Matrix::from_rows(vec![vec![z(), one()], vec![z(), z()]])),
        (Generator::X1Minus, Matrix::from_rows(vec![vec![z(), z()], vec![one(), z()]])),
        (Generator::X0Plus, Matrix::from_rows(vec![vec![z(), z()], vec![RatFunc::q_pow(alpha), z()]])),
        (Generator::X0Minus, Matrix::from_rows(vec![vec![z(), RatFunc::q_pow(-alpha)], vec![z(), z()]])),
    ]);
    let weights = vec![1, -1];
    Rep {
        dim: 2,
        mats: with_cartan(mats, &weights),
        factors: vec![alpha],
        weights,
        labels: vec![format!("v+({alpha})"), format!("v-({alpha})")],
        full_tensor: true,
    }
}

/// Tensor product through `Δ(x+) = x+⊗1 + k⊗x+`, `Δ(x-) = x-⊗k^{-1} + 1⊗x-`,
/// `Δ(k) = k⊗k`; basis index `i1 * dim2 + i2`.
pub fn tensor_rep(r1: &Rep, r2: &Rep) -> Rep {
    let id1 = Matrix::identity(r1.dim);
    let id2 = Matrix::identity(r2.dim);
    let plus = |x: Generator, k: Generator| r1.matrix(x).kron(&id2).add(&r1.matrix(k).kron(r2.matrix(x)));
    let minus = |x: Generator, kinv: Generator| r1.matrix(x).kron(r2.matrix(kinv)).add(&id1.kron(r2.matrix(x)));
    let mats = BTreeMap::from([
        (Generator::X0Plus, plus(Generator::X0Plus, Generator::K0)),
        (Generator::X1Plus, plus(Generator::X1Plus, Generator::K1)),
        (Generator::X0Minus, minus(Generator::X0Minus, Generator::K0Inv)),
        (Generator::X1Minus, minus(Generator::X1Minus, Generator::K1Inv)),
    ]);
    let mut weights = Vec::with_capacity(r1.dim * r2.dim);
    let mut labels = Vec::with_capacity(r1.dim * r2.dim);
    for i in 0..r1.dim {
        for j in 0..r2.dim {
            weights.push(r1.weights[i] + r2.weights[j]);
            labels.push(format!("{}⊗{}", r1.labels[i], r2.labels[j]));
        }
    }
    Rep {
        dim: r1.dim * r2.dim,
        mats: with_cartan(mats, &weights),
        factors: r1.factors.iter().chain(&r2.factors).copied().collect(),
        weights,
        labels,
        full_tensor: r1.full_tensor && r2.full_tensor,
    }
}

pub fn tensor_all(reps: &[Rep]) -> Rep {
    let mut it = reps.iter();
    let first = it.next().expect("empty tensor product").clone();
    it.fold(first, |acc, r| tensor_rep(&acc, r))
}

/// `h_{1,1} = q^{-2} x1+ x0+ - x0+ x1+`.
pub fn h11_matrix(r: &Rep) -> Matrix {
    let a = r.matrix(Generator::X1Plus).mul(r.matrix(Generator::X0Plus)).scale(&RatFunc::q_pow(-2));
    a.sub(&r.matrix(Generator::X0Plus).mul(r.matrix(Generator::X1Plus)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub passed: bool,
    pub checked: usize,
    pub first_failure: Option<String>,
}

/// Checks the defining relations of `U_q(sl2^)` (Cartan matrix
/// `[[2,-2],[-2,2]]`) as exact matrix identities.
pub fn verify_defining_relations(r: &Rep) -> RelationReport {
    use Generator::*;
    let n = r.dim;
    let id = Matrix::identity(n);
    let cartan = [[2i64, -2], [-2, 2]];
    let k = [r.matrix(K0), r.matrix(K1)];
    let kinv = [r.matrix(K0Inv), r.matrix(K1Inv)];
    let xp = [r.matrix(X0Plus), r.matrix(X1Plus)];
    let xm = [r.matrix(X0Minus), r.matrix(X1Minus)];
    let mut checks: Vec<(String, Matrix, Matrix)> = vec![];

    for i in 0..2 {
        checks.push((format!("k{i} k{i}^-1 = 1"), k[i].mul(kinv[i]), id.clone()));
        checks.push((format!("k{i}^-1 k{i} = 1"), kinv[i].mul(k[i]), id.clone()));
        for j in 0..2 {
            checks.push((format!("k{i} k{j} = k{j} k{i}"), k[i].mul(k[j]), k[j].mul(k[i])));
            let c = cartan[i][j];
            checks.push((
                format!("k{i} x{j}+ k{i}^-1 = q^{c} x{j}+"),
                k[i].mul(xp[j]).mul(kinv[i]),
                xp[j].scale(&RatFunc::q_pow(c)),
            ));
            checks.push((
                format!("k{i} x{j}- k{i}^-1 = q^{} x{j}-", -c),
                k[i].mul(xm[j]).mul(kinv[i]),
                xm[j].scale(&RatFunc::q_pow(-c)),
            ));
            let comm = xp[i].mul(xm[j]).sub(&xm[j].mul(xp[i]));
            let rhs = if i == j {
                k[i].sub(kinv[i]).scale(&RatFunc::laurent(&[(1, 1), (-1, -1)]).inv())
            } else {
                Matrix::zero(n, n)
            };
            checks.push((format!("[x{i}+, x{j}-]"), comm, rhs));
        }
    }
    // q-Serre with divided powers: sum_s (-1)^s x_i^{(3-s)} x_j x_i^{(s)} = 0
    for (i, j) in [(0usize, 1usize), (1, 0)] {
        for (sign, x) in [("+", &xp), ("-", &xm)] {
            let powers: Vec<Matrix> = (0..=3)
                .scan(id.clone(), |acc, p| {
                    let cur = acc.clone();
                    *acc = acc.mul(x[i]);
                    Some(cur.scale(&RatFunc::q_factorial(p).inv()))
                })
                .collect();
            let mut total = Matrix::zero(n, n);
            for s in 0..=3usize {
                let term = powers[3 - s].mul(x[j]).mul(&powers[s]);
                total = if s % 2 == 0 { total.add(&term) } else { total.sub(&term) };
            }
            checks.push((format!("q-Serre x{i}{sign} x{j}{sign}"), total, Matrix::zero(n, n)));
        }
    }
    let checked = checks.len();
    let first_failure = checks.into_iter().find(|(_, a, b)| a != b).map(|(name, _, _)| name);
    RelationReport { passed: first_failure.is_none(), checked, first_failure }
}

/// Copy of `r` with one nonzero entry of `x1+` multiplied by `q`.
pub fn corrupt_rep(r: &Rep) -> Rep {
    let mut out = r.clone();
    let mut m = r.matrix(Generator::X1Plus).clone();
    'outer: for i in 0..m.rows {
        for j in 0..m.cols {
            if !m.get(i, j).is_zero() {
                let v = m.get(i, j) * &RatFunc::q_pow(1);
                m.set(i, j, v);
                break 'outer;
            }
        }
    }
    out.set_matrix(Generator::X1Plus, m);
    out
}

/// `h_{1,1}`-eigenvalue `sum_a u_a(m) a` of an sl2 monomial.
pub fn h11_eigenvalue(m: &Monomial) -> Result<RatFunc> {
    let mut terms = vec![];
    for (v, e) in m.iter() {
        if v.node != 1 || v.kappa != 0 || !v.lambda.is_integer() {
            return Err(Error::NotSl2(m.to_string()));
        }
        terms.push((v.lambda.to_integer(), *e));
    }
    Ok(RatFunc::laurent(&terms))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LWeightBlock {
    pub monomial: Monomial,
    /// Basis of the generalized eigenspace, as vectors of length `dim`.
    pub basis: Vec<Vec<RatFunc>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LWeightDecomp {
    pub blocks: Vec<LWeightBlock>,
    pub covered: usize,
}

impl LWeightDecomp {
    pub fn block(&self, m: &Monomial) -> Option<&LWeightBlock> {
        self.blocks.iter().find(|b| b.monomial == *m)
    }

    pub fn is_thin(&self) -> bool {
        self.blocks.iter().all(|b| b.basis.len() == 1)
    }
}

/// Generalized eigenspace of `h` for `lambda`, as a kernel basis.
fn generalized_kernel(h: &Matrix, lambda: &RatFunc) -> Vec<Vec<RatFunc>> {
    let n = h.rows;
    let shifted = h.sub(&Matrix::identity(n).scale(lambda));
    let mut power = shifted.clone();
    let mut ker = power.kernel();
    loop {
        if ker.is_empty() || ker.len() == n {
            return ker;
        }
        let next = power.mul(&shifted);
        let next_ker = next.kernel();
        if next_ker.len() == ker.len() {
            return ker;
        }
        power = next;
        ker = next_ker;
    }
}

/// Splits each `k_1`-weight space into generalized `h_{1,1}`-eigenspaces
/// labelled by the candidate monomials.
pub fn lweight_decomposition(r: &Rep, candidates: &[Monomial]) -> Result<LWeightDecomp> {
    let h = h11_matrix(r);
    let mut by_weight: BTreeMap<i64, Vec<(Monomial, RatFunc)>> = BTreeMap::new();
    let distinct: BTreeSet<&Monomial> = candidates.iter().collect();
    for m in distinct {
        let ev = h11_eigenvalue(m)?;
        let bucket = by_weight.entry(m.degree()).or_default();
        if let Some((other, _)) = bucket.iter().find(|(_, e)| *e == ev) {
            return Err(Error::AmbiguousSpectrum(format!("{m} and {other}")));
        }
        bucket.push((m.clone(), ev));
    }
    let mut blocks = vec![];
    let mut covered = 0;
    for (w, idx) in r.weight_indices() {
        let hw = h.select(&idx, &idx);
        let mut found = 0;
        for (m, ev) in by_weight.get(&w).into_iter().flatten() {
            let ker = generalized_kernel(&hw, ev);
            if ker.is_empty() {
                continue;
            }
            found += ker.len();
            let basis = ker
                .into_iter()
                .map(|v| {
                    let mut full = vec![RatFunc::zero(); r.dim];
                    for (k, &j) in idx.iter().enumerate() {
                        full[j] = v[k].clone();
                    }
                    full
                })
                .collect();
            blocks.push(LWeightBlock { monomial: m.clone(), basis });
        }
        if found != idx.len() {
            return Err(Error::UncoveredSpectrum(format!(
                "weight {w}: candidates cover {found} of {} dimensions",
                idx.len()
            )));
        }
        covered += found;
    }
    Ok(LWeightDecomp { blocks, covered })
}

/// `q`-character of `L_{q^alpha}`: `Y_{q^{alpha-2}} + Y_{q^alpha}^{-1}`.
pub fn fundamental_character(alpha: i64) -> QCharacter {
    let top = Monomial::var(YVar::q(1, alpha - 2));
    QCharacter::from_terms(top.clone(), [(top, 1), (Monomial::var_pow(YVar::q(1, alpha), -1), 1)])
}

/// All products of one monomial of each fundamental factor.
pub fn factor_candidates(r: &Rep) -> Vec<Monomial> {
    let mut acc: BTreeSet<Monomial> = BTreeSet::from([Monomial::one()]);
    for &alpha in &r.factors {
        let fc = fundamental_character(alpha);
        acc = acc.iter().flat_map(|m| fc.terms.keys().map(move |f| m.mul(f))).collect();
    }
    acc.into_iter().collect()
}

pub fn qchar_of_decomposition(d: &LWeightDecomp, fallback_highest: Monomial) -> QCharacter {
    let terms = d.blocks.iter().map(|b| (b.monomial.clone(), b.basis.len() as u64));
    let mut c = QCharacter::from_terms(fallback_highest, terms);
    let top = c.terms.keys().map(Monomial::degree).max();
    let tops: Vec<&Monomial> = c.terms.keys().filter(|m| Some(m.degree()) == top).collect();
    if let [only] = tops.as_slice() {
        c.highest = (*only).clone();
    }
    c
}

/// The `q`-character read off the ℓ-weight decomposition. For full tensor
/// products it is also checked against the product of factor characters.
pub fn extract_qchar(r: &Rep) -> Result<QCharacter> {
    let d = lweight_decomposition(r, &factor_candidates(r))?;
    let fallback = r.factors.iter().map(|&a| Monomial::var(YVar::q(1, a - 2))).fold(Monomial::one(), |x, y| x.mul(&y));
    let c = qchar_of_decomposition(&d, fallback);
    if r.full_tensor {
        let expected = char_product(&r.factors.iter().map(|&a| fundamental_character(a)).collect::<Vec<_>>());
        if expected.terms != c.terms {
            return Err(Error::SelfCheck("character of a tensor product differs from the product of characters".into()));
        }
    }
    Ok(c)
}

/// Spectral exponents `alpha` of the fundamentals whose highest monomials
/// multiply to `m`, in nondecreasing order.
pub fn fundamental_factors(m: &Monomial) -> Result<Vec<i64>> {
    let mut out = vec![];
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
        out.extend(std::iter::repeat(v.lambda.to_integer() + 2).take(*e as usize));
    }
    out.sort();
    Ok(out)
}

/// Reduced echelon bases of a subspace, one per `k_1`-weight: each vector
/// has a pivot entry 1 where every other vector of its weight vanishes.
#[derive(Default)]
struct EchelonSpace {
    spaces: BTreeMap<i64, Vec<(usize, Vec<RatFunc>)>>,
}

impl EchelonSpace {
    /// Inserts `v` if it is new; returns the normalised vector in that case.
    fn insert(&mut self, w: i64, mut v: Vec<RatFunc>) -> Option<Vec<RatFunc>> {
        let basis = self.spaces.entry(w).or_default();
        for (p, b) in basis.iter() {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        let p = v.iter().position(|x| !x.is_zero())?;
        let inv = v[p].inv();
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for (_, b) in basis.iter_mut() {
            if !b[p].is_zero() {
                let f = b[p].clone();
                for (x, y) in b.iter_mut().zip(&v) {
                    if !y.is_zero() {
                        *x = &*x - &(&f * y);
                    }
                }
            }
        }
        basis.push((p, v.clone()));
        Some(v)
    }

    fn dim(&self) -> usize {
        self.spaces.values().map(Vec::len).sum()
    }
}

/// Submodule of `r` generated by `seed`, given by its basis and the
/// restricted generator matrices.
pub fn generated_submodule(r: &Rep, seed: Vec<RatFunc>) -> Rep {
    let weight_of = |v: &[RatFunc]| -> i64 {
        let j = v.iter().position(|x| !x.is_zero()).expect("zero vector");
        r.weights[j]
    };
    let mut space = EchelonSpace::default();
    let mut queue = VecDeque::new();
    let w0 = weight_of(&seed);
    if let Some(v) = space.insert(w0, seed) {
        queue.push_back((w0, v));
    }
    while let Some((w, v)) = queue.pop_front() {
        for g in Generator::RAISING_LOWERING {
            let image = r.matrix(g).apply(&v);
            if image.iter().all(RatFunc::is_zero) {
                continue;
            }
            let wi = w + g.weight_shift();
            if let Some(nv) = space.insert(wi, image) {
                queue.push_back((wi, nv));
            }
        }
    }
    // basis ordered by decreasing weight
    let mut basis: Vec<(i64, usize, Vec<RatFunc>)> = vec![];
    for (w, vs) in space.spaces.iter().rev() {
        for (p, v) in vs {
            basis.push((*w, *p, v.clone()));
        }
    }
    let n = space.dim();
    let mut mats = BTreeMap::new();
    for g in Generator::RAISING_LOWERING {
        let mut m = Matrix::zero(n, n);
        for (j, (w, _, v)) in basis.iter().enumerate() {
            let image = r.matrix(g).apply(v);
            let wi = w + g.weight_shift();
            for (i, (wb, p, _)) in basis.iter().enumerate() {
                if *wb == wi && !image[*p].is_zero() {
                    m.set(i, j, image[*p].clone());
                }
            }
        }
        mats.insert(g, m);
    }
    let weights: Vec<i64> = basis.iter().map(|(w, _, _)| *w).collect();
    Rep {
        dim: n,
        mats: with_cartan(mats, &weights),
        factors: r.factors.clone(),
        weights,
        labels: (0..n).map(|j| format!("b{j}")).collect(),
        full_tensor: n == r.dim && r.full_tensor,
    }
}

fn realize_in_order(m: &Monomial, alphas: &[i64]) -> Result<Rep> {
    let fundamentals: Vec<Rep> = alphas.iter().map(|&a| fundamental_rep(a)).collect();
    let full = tensor_all(&fundamentals);
    let mut seed = vec![RatFunc::zero(); full.dim];
    seed[0] = RatFunc::one();
    let sub = generated_submodule(&full, seed);
    let c = extract_qchar(&sub)?;
    if c.highest == *m && c.multiplicity(m) == 1 {
        Ok(sub)
    } else {
        Err(Error::SelfCheck(format!("submodule generated in order {alphas:?} has highest {}", c.highest)))
    }
}

/// The simple module `L(m)` for a dominant sl2 monomial `m`, realised as the
/// submodule of a tensor product of fundamentals generated by the tensor of
/// highest vectors.
pub fn realize_simple(m: &Monomial) -> Result<Rep> {
    let alphas = fundamental_factors(m)?;
    if alphas.is_empty() {
        return Ok(trivial_rep());
    }
    match realize_in_order(m, &alphas) {
        Ok(r) => Ok(r),
        Err(first) => {
            let reversed: Vec<i64> = alphas.iter().rev().copied().collect();
            realize_in_order(m, &reversed).map_err(|second| Error::SelfCheck(format!("{first}; reversed: {second}")))
        }
    }
}

/// The one-dimensional trivial module.
pub fn trivial_rep() -> Rep {
    let z = || Matrix::zero(1, 1);
    let mats = BTreeMap::from([
        (Generator::X0Plus, z()),
        (Generator::X0Minus, z()),
        (Generator::X1Plus, z()),
        (Generator::X1Minus, z()),
    ]);
    Rep { dim: 1, mats: with_cartan(mats, &[0]), factors: vec![], weights: vec![0], labels: vec!["1".into()], full_tensor: true }
}

/// Simplicity of a thin module: the block graph (edge `u -> v` when a
/// generator maps the `u`-line with a nonzero component on the `v`-line) is
/// strongly connected.
pub fn is_simple_thin(r: &Rep) -> Result<bool> {
    let d = lweight_decomposition(r, &factor_candidates(r))?;
    if let Some(b) = d.blocks.iter().find(|b| b.basis.len() != 1) {
        return Err(Error::NotThin { monomial: b.monomial.to_string(), dim: b.basis.len() });
    }
    let vecs: Vec<&Vec<RatFunc>> = d.blocks.iter().map(|b| &b.basis[0]).collect();
    let weight_of = |v: &[RatFunc]| r.weights[v.iter().position(|x| !x.is_zero()).unwrap()];
    let block_weight: Vec<i64> = vecs.iter().map(|v| weight_of(v)).collect();
    let indices = r.weight_indices();

    // per weight: the blocks living there and the inverse of their coordinate matrix
    let mut inverse: BTreeMap<i64, (Vec<usize>, Matrix)> = BTreeMap::new();
    for (w, idx) in &indices {
        let members: Vec<usize> = (0..vecs.len()).filter(|&b| block_weight[b] == *w).collect();
        let mut e = Matrix::zero(idx.len(), members.len());
        for (col, &b) in members.iter().enumerate() {
            for (row, &j) in idx.iter().enumerate() {
                e.set(row, col, vecs[b][j].clone());
            }
        }
        let inv = e.inverse().ok_or_else(|| Error::Internal("ℓ-weight blocks do not span a weight space".into()))?;
        inverse.insert(*w, (members, inv));
    }

    let n = vecs.len();
    let mut edges = vec![BTreeSet::new(); n];
    for u in 0..n {
        for g in Generator::RAISING_LOWERING {
            let image = r.matrix(g).apply(vecs[u]);
            if image.iter().all(RatFunc::is_zero) {
                continue;
            }
            let w = block_weight[u] + g.weight_shift();
            let (members, inv) = &inverse[&w];
            let local: Vec<RatFunc> = indices[&w].iter().map(|&j| image[j].clone()).collect();
            let coords = inv.apply(&local);
            for (k, c) in coords.iter().enumerate() {
                if !c.is_zero() {
                    edges[u].insert(members[k]);
                }
            }
        }
    }
    let reach = |start: usize, adj: &Vec<BTreeSet<usize>>| -> usize {
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count
    };
    let mut reversed = vec![BTreeSet::new(); n];
    for (u, out) in edges.iter().enumerate() {
        for &v in out {
            reversed[v].insert(u);
        }
    }
    Ok(reach(0, &edges) == n && reach(0, &reversed) == n)
}

/// `Y_{1,q^l}` as a monomial, for tests and callers building sl2 data.
pub fn y(l: i64) -> Monomial {
    Monomial::var(YVar::new(1, 0, Rational64::from(l)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(f: &[(i64, i64)]) -> Monomial {
        Monomial::sl2(f)
    }

    #[test]
    fn fundamental_tables() {
        let r = fundamental_rep(0);
        assert_eq!(r.matrix(Generator::X0Plus).get(1, 0), &RatFunc::one());
        assert_eq!(r.matrix(Generator::K1), &Matrix::diag(vec![RatFunc::q_pow(1), RatFunc::q_pow(-1)]));
        for alpha in [-3, 0, 5] {
            let h = h11_matrix(&fundamental_rep(alpha));
            let expected = Matrix::diag(vec![RatFunc::q_pow(alpha - 2), RatFunc::c_q_pow(-1, alpha)]);
            assert_eq!(h, expected);
        }
        let c = extract_qchar(&fundamental_rep(0)).unwrap();
        assert_eq!(c, fundamental_character(0));
        assert_eq!(c.highest, m(&[(-2, 1)]));
    }

    #[test]
    fn relations() {
        let f = fundamental_rep(0);
        assert!(verify_defining_relations(&f).passed);
        let t = tensor_rep(&f, &fundamental_rep(3));
        let rep = verify_defining_relations(&t);
        assert!(rep.passed, "{rep:?}");
        let bad = verify_defining_relations(&corrupt_rep(&t));
        assert!(!bad.passed);
        assert!(bad.first_failure.is_some());
    }

    #[test]
    fn tensor_shape() {
        let t = tensor_rep(&fundamental_rep(0), &fundamental_rep(2));
        assert_eq!(t.dim, 4);
        assert_eq!(t.weights, vec![2, 0, 0, -2]);
        let h = h11_matrix(&t);
        let k1 = t.matrix(Generator::K1);
        assert_eq!(h.mul(k1), k1.mul(&h));
        let (a, b, c) = (fundamental_rep(1), fundamental_rep(-2), fundamental_rep(4));
        let left = tensor_rep(&tensor_rep(&a, &b), &c);
        let right = tensor_rep(&a, &tensor_rep(&b, &c));
        for g in Generator::ALL {
            assert_eq!(left.matrix(g), right.matrix(g), "{}", g.name());
        }
    }

    #[test]
    fn tensor_character_is_product() {
        let t = tensor_rep(&fundamental_rep(0), &fundamental_rep(2));
        let c = extract_qchar(&t).unwrap();
        assert_eq!(c.terms.len(), 4);
        assert_eq!(c.highest, m(&[(-2, 1), (0, 1)]));
    }

    #[test]
    fn realizations() {
        assert_eq!(realize_simple(&m(&[(0, 1)])).unwrap().dim, 2);
        let w2 = realize_simple(&m(&[(0, 1), (2, 1)])).unwrap();
        assert_eq!(w2.dim, 3);
        assert!(verify_defining_relations(&w2).passed);
        let c = extract_qchar(&w2).unwrap();
        let expected: BTreeSet<Monomial> =
            [m(&[(0, 1), (2, 1)]), m(&[(0, 1), (4, -1)]), m(&[(2, -1), (4, -1)])].into_iter().collect();
        assert_eq!(c.terms.keys().cloned().collect::<BTreeSet<_>>(), expected);
        assert_eq!(realize_simple(&m(&[(0, 1), (4, 1)])).unwrap().dim, 4);
        assert_eq!(realize_simple(&Monomial::one()).unwrap().dim, 1);
        assert!(realize_simple(&m(&[(0, -1)])).is_err());
    }

    #[test]
    fn simplicity_oracle() {
        assert!(is_simple_thin(&fundamental_rep(0)).unwrap());
        let special = tensor_rep(&fundamental_rep(2), &fundamental_rep(4));
        assert!(!is_simple_thin(&special).unwrap());
        let general = tensor_rep(&fundamental_rep(2), &fundamental_rep(6));
        assert!(is_simple_thin(&general).unwrap());
        let square = tensor_rep(&fundamental_rep(2), &fundamental_rep(2));
        assert!(matches!(is_simple_thin(&square), Err(Error::NotThin { .. })));
    }

    #[test]
    fn missing_candidates_are_reported() {
        let r = fundamental_rep(0);
        let err = lweight_decomposition(&r, &[m(&[(-2, 1)])]).unwrap_err();
        assert!(matches!(err, Error::UncoveredSpectrum(_)));
    }
}

//! Exact arithmetic in `Q(q)`: integer polynomials, reduced fractions of
//! them, and dense matrices over the fraction field.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Polynomial in `q` with integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c q^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        Poly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Poly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn lead(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> usize {
        self.coeffs.iter().position(|c| !c.is_zero()).unwrap_or(0)
    }

    /// `Some((c, k))` when the polynomial is `c q^k`.
    pub fn as_monomial(&self) -> Option<(BigInt, usize)> {
        let v = self.valuation();
        if !self.is_zero() && v + 1 == self.coeffs.len() {
            Some((self.coeffs[v].clone(), v))
        } else {
            None
        }
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn scale(&self, c: &BigInt) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    fn div_scalar(&self, c: &BigInt) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|x| x / c).collect())
    }

    fn shift_down(&self, k: usize) -> Poly {
        Poly::from_coeffs(self.coeffs[k.min(self.coeffs.len())..].to_vec())
    }

    fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.lead().is_negative() {
            c = -c;
        }
        self.div_scalar(&c)
    }

    /// Pseudo-remainder of `self` by `d`.
    fn prem(&self, d: &Poly) -> Poly {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.lead();
        let mut r = self.clone();
        while let Some(dr) = r.degree() {
            if dr < dd {
                break;
            }
            let lr = r.lead();
            let shift = dr - dd;
            let mut next = r.scale(&lc);
            for (k, c) in d.coeffs.iter().enumerate() {
                next.coeffs[k + shift] -= c * &lr;
            }
            r = Poly::from_coeffs(next.coeffs);
        }
        r
    }

    /// Exact division; panics if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Poly) -> Poly {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.lead();
        let mut r = self.clone();
        let mut quot = vec![BigInt::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while let Some(dr) = r.degree() {
            assert!(dr >= dd, "inexact polynomial division");
            let (qc, rem) = r.lead().div_rem(&lc);
            assert!(rem.is_zero(), "inexact polynomial division");
            let shift = dr - dd;
            for (k, c) in d.coeffs.iter().enumerate() {
                r.coeffs[k + shift] -= c * &qc;
            }
            quot[shift] = qc;
            r = Poly::from_coeffs(r.coeffs);
        }
        Poly::from_coeffs(quot)
    }

    /// Greatest common divisor in `Z[q]`, with positive leading coefficient.
    pub fn gcd(&self, other: &Poly) -> Poly {
        if self.is_zero() {
            return other.primitive().scale(&other.content());
        }
        if other.is_zero() {
            return self.primitive().scale(&self.content());
        }
        let c = self.content().gcd(&other.content());
        let (mut a, mut b) = (self.primitive(), other.primitive());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.prem(&b);
            a = b;
            b = r.primitive();
        }
        a.primitive().scale(&c)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = vec![BigInt::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in o.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        self + &(-o)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if c.is_negative() {
                write!(f, "-")?;
            } else if !first {
                write!(f, "+")?;
            }
            first = false;
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    if k == 1 {
                        write!(f, "q")?;
                    } else {
                        write!(f, "q^{k}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Element of `Q(q)` kept as a reduced fraction with positive leading
/// denominator coefficient, so structural equality is field equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn int(c: i64) -> Self {
        RatFunc::new(Poly::constant(BigInt::from(c)), Poly::one())
    }

    /// `q^k` for any integer `k`.
    pub fn q_pow(k: i64) -> Self {
        RatFunc::c_q_pow(1, k)
    }

    /// `c q^k`.
    pub fn c_q_pow(c: i64, k: i64) -> Self {
        let c = BigInt::from(c);
        if k >= 0 {
            RatFunc::new(Poly::monomial(c, k as usize), Poly::one())
        } else {
            RatFunc::new(Poly::constant(c), Poly::monomial(BigInt::one(), (-k) as usize))
        }
    }

    /// Laurent polynomial `sum c_k q^k` from `(k, c_k)` pairs.
    pub fn laurent(terms: &[(i64, i64)]) -> Self {
        terms.iter().fold(RatFunc::zero(), |acc, &(k, c)| &acc + &RatFunc::c_q_pow(c, k))
    }

    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFunc::zero();
        }
        let g = match (num.as_monomial(), den.as_monomial()) {
            (_, Some((c, k))) => Poly::monomial(c.gcd(&num.content()), k.min(num.valuation())),
            (Some((c, k)), _) => Poly::monomial(c.gcd(&den.content()), k.min(den.valuation())),
            _ => num.gcd(&den),
        };
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else if let Some((c, k)) = g.as_monomial() {
            (num.shift_down(k).div_scalar(&c), den.shift_down(k).div_scalar(&c))
        } else {
            (num.exact_div(&g), den.exact_div(&g))
        };
        if den.lead().is_negative() {
            num = -&num;
            den = -&den;
        }
        RatFunc { num, den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "inverse of zero");
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(RatFunc::one(), |acc, _| &acc * self)
    }

    /// Quantum integer `[n]_q`.
    pub fn q_int(n: i64) -> Self {
        if n == 0 {
            return RatFunc::zero();
        }
        let sign = n.signum();
        let n = n.abs();
        let terms: Vec<(i64, i64)> = (0..n).map(|j| (n - 1 - 2 * j, sign)).collect();
        RatFunc::laurent(&terms)
    }

    /// `[n]_q!`.
    pub fn q_factorial(n: i64) -> Self {
        (1..=n).fold(RatFunc::one(), |acc, k| &acc * &RatFunc::q_int(k))
    }

    /// Coefficients as a Laurent polynomial when the denominator is a power of `q`.
    pub fn as_laurent(&self) -> Option<Vec<(i64, BigInt)>> {
        let (c, k) = self.den.as_monomial()?;
        if !c.is_one() {
            return None;
        }
        Some(
            self.num
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(j, x)| (j as i64 - k as i64, x.clone()))
                .collect(),
        )
    }
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc::new(&self.num + &o.num, self.den.clone());
        }
        RatFunc::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, o: &RatFunc) -> RatFunc {
        self + &(-o)
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if self.is_one() {
            return o.clone();
        }
        if o.is_one() {
            return self.clone();
        }
        RatFunc::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Dense matrix over `Q(q)`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<RatFunc>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![RatFunc::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, RatFunc::one());
        }
        m
    }

    pub fn diag(entries: Vec<RatFunc>) -> Self {
        let n = entries.len();
        let mut m = Matrix::zero(n, n);
        for (i, e) in entries.into_iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RatFunc>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFunc {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: RatFunc) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(RatFunc::is_zero)
    }

    pub fn column(&self, j: usize) -> Vec<RatFunc> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = Matrix::zero(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = &out.data[i * o.cols + j] + &(a * b);
                    out.data[i * o.cols + j] = v;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[RatFunc]) -> Vec<RatFunc> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = RatFunc::zero();
                for (k, x) in v.iter().enumerate() {
                    let a = self.get(i, k);
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        assert!(self.rows == o.rows && self.cols == o.cols, "dimension mismatch");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Matrix) -> Matrix {
        assert!(self.rows == o.rows && self.cols == o.cols, "dimension mismatch");
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &RatFunc) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn kron(&self, o: &Matrix) -> Matrix {
        let mut out = Matrix::zero(self.rows * o.rows, self.cols * o.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..o.rows {
                    for j2 in 0..o.cols {
                        let b = o.get(i2, j2);
                        if !b.is_zero() {
                            out.set(i1 * o.rows + i2, j1 * o.cols + j2, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    /// Submatrix on the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut out = Matrix::zero(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    /// In-place reduced row echelon form; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = vec![];
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.data.swap(p * self.cols + j, r * self.cols + j);
                }
            }
            let inv = self.get(r, c).inv();
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let f = self.get(i, c).clone();
                for j in c..self.cols {
                    let pj = self.get(r, j);
                    if pj.is_zero() {
                        continue;
                    }
                    let v = self.get(i, j) - &(&f * pj);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<RatFunc>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![RatFunc::zero(); self.cols];
                v[f] = RatFunc::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m.get(r, f);
                }
                v
            })
            .collect()
    }

    /// Inverse of a square matrix, `None` if singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut aug = Matrix::zero(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, RatFunc::one());
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let cols: Vec<usize> = (n..2 * n).collect();
        let rows: Vec<usize> = (0..n).collect();
        Some(aug.select(&rows, &cols))
    }

    /// Entries as strings, row by row.
    pub fn dump(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64(c)
    }

    #[test]
    fn gcd_and_reduction() {
        // (q-1)(q+1) / (q-1)^2 = (q+1)/(q-1)
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, -2, 1]);
        assert_eq!(a.gcd(&b), p(&[-1, 1]));
        let f = RatFunc::new(a, b);
        assert_eq!(f.num(), &p(&[1, 1]));
        assert_eq!(f.den(), &p(&[-1, 1]));
        let g = RatFunc::new(p(&[2, 4]), p(&[-6]));
        assert_eq!(g, RatFunc::new(p(&[-1, -2]), p(&[3])));
    }

    #[test]
    fn laurent_and_quantum_integers() {
        let two = RatFunc::q_int(2);
        assert_eq!(two, RatFunc::laurent(&[(1, 1), (-1, 1)]));
        assert_eq!(two.as_laurent().unwrap(), vec![(-1, BigInt::from(1)), (1, BigInt::from(1))]);
        // [2][2] = [3] + 1
        assert_eq!(&two * &two, &RatFunc::q_int(3) + &RatFunc::one());
        assert_eq!(&RatFunc::q_pow(3) * &RatFunc::q_pow(-3), RatFunc::one());
        assert_eq!(RatFunc::q_factorial(3), &two * &RatFunc::q_int(3));
        // (q^2 - q^-2)/(q - q^-1) = q + q^-1
        let x = &RatFunc::laurent(&[(2, 1), (-2, -1)]) * &RatFunc::laurent(&[(1, 1), (-1, -1)]).inv();
        assert_eq!(x, two);
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1, -2, 0, 3]).to_string(), "3*q^3-2*q+1");
        assert_eq!(RatFunc::q_pow(-1).to_string(), "(1)/(q)");
        assert_eq!(RatFunc::zero().to_string(), "0");
    }

    #[test]
    fn matrix_basics() {
        let a = Matrix::from_rows(vec![
            vec![RatFunc::q_pow(1), RatFunc::one()],
            vec![RatFunc::zero(), RatFunc::q_pow(-1)],
        ]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2));
        let k = a.kron(&Matrix::identity(2));
        assert_eq!(k.rows, 4);
        assert_eq!(k.get(1, 3), &RatFunc::one());
        let sing = Matrix::from_rows(vec![vec![RatFunc::one(), RatFunc::q_pow(1)], vec![RatFunc::q_pow(-1), RatFunc::one()]]);
        assert!(sing.inverse().is_none());
        let ker = sing.kernel();
        assert_eq!(ker.len(), 1);
        assert!(sing.apply(&ker[0]).iter().all(RatFunc::is_zero));
    }

    fn arb_laurent() -> impl Strategy<Value = RatFunc> {
        prop::collection::vec((-4i64..5, -3i64..4), 0..4).prop_map(|t| RatFunc::laurent(&t))
    }

    proptest! {
        #[test]
        fn field_laws(a in arb_laurent(), b in arb_laurent(), c in arb_laurent()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            if !b.is_zero() {
                let f = &a * &b.inv();
                prop_assert_eq!(&f * &b, a.clone());
                let g = &(&f + &c) - &c;
                prop_assert_eq!(g, f);
            }
        }
    }
}

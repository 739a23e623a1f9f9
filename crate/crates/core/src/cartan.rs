//! Affine Cartan data.
//!
//! Matrices are embedded in Kac's numbering, except for `A_{2n}^{(2)}` where
//! the numbering is reversed so that the node carrying `mu = 2` is node `n`.
//! Everything else (symmetrizers, `mu`, `d`, the twist order) is derived
//! from the matrix and checked against the affine-type criterion when the
//! data is built.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Kac label of an indecomposable affine Cartan matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AffineLabel {
    /// `A_n^{(1)}`, n >= 1
    A1,
    /// `B_n^{(1)}`, n >= 3
    B1,
    /// `C_n^{(1)}`, n >= 2
    C1,
    /// `D_n^{(1)}`, n >= 4
    D1,
    E6,
    E7,
    E8,
    F4,
    G2,
    /// `A_{2n}^{(2)}`, n >= 1
    A2Even,
    /// `A_{2n-1}^{(2)}`, n >= 3
    A2Odd,
    /// `D_{n+1}^{(2)}`, n >= 2
    D2,
    /// `E_6^{(2)}` (n = 4)
    E6Twisted,
    /// `D_4^{(3)}` (n = 2)
    D4Triality,
}

impl AffineLabel {
    pub fn is_twisted(self) -> bool {
        matches!(
            self,
            AffineLabel::A2Even
                | AffineLabel::A2Odd
                | AffineLabel::D2
                | AffineLabel::E6Twisted
                | AffineLabel::D4Triality
        )
    }

    fn rank_ok(self, n: usize) -> bool {
        match self {
            AffineLabel::A1 => n >= 1,
            AffineLabel::B1 => n >= 3,
            AffineLabel::C1 => n >= 2,
            AffineLabel::D1 => n >= 4,
            AffineLabel::E6 => n == 6,
            AffineLabel::E7 => n == 7,
            AffineLabel::E8 => n == 8,
            AffineLabel::F4 => n == 4,
            AffineLabel::G2 => n == 2,
            AffineLabel::A2Even => n >= 1,
            AffineLabel::A2Odd => n >= 3,
            AffineLabel::D2 => n >= 2,
            AffineLabel::E6Twisted => n == 4,
            AffineLabel::D4Triality => n == 2,
        }
    }
}

/// Affine type: a label together with the rank `n` of the finite part.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineType {
    pub label: AffineLabel,
    pub n: usize,
}

impl AffineType {
    pub fn new(label: AffineLabel, n: usize) -> Result<Self> {
        if label.rank_ok(n) {
            Ok(AffineType { label, n })
        } else {
            Err(Error::InvalidRank { label: format!("{label:?}"), n })
        }
    }

    /// The untwisted `A_1^{(1)}` type, i.e. sl2-hat.
    pub fn sl2() -> Self {
        AffineType { label: AffineLabel::A1, n: 1 }
    }
}

impl fmt::Display for AffineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        match self.label {
            AffineLabel::A1 => write!(f, "A{n}^1"),
            AffineLabel::B1 => write!(f, "B{n}^1"),
            AffineLabel::C1 => write!(f, "C{n}^1"),
            AffineLabel::D1 => write!(f, "D{n}^1"),
            AffineLabel::E6 => write!(f, "E6^1"),
            AffineLabel::E7 => write!(f, "E7^1"),
            AffineLabel::E8 => write!(f, "E8^1"),
            AffineLabel::F4 => write!(f, "F4^1"),
            AffineLabel::G2 => write!(f, "G2^1"),
            AffineLabel::A2Even => write!(f, "A{}^2", 2 * n),
            AffineLabel::A2Odd => write!(f, "A{}^2", 2 * n - 1),
            AffineLabel::D2 => write!(f, "D{}^2", n + 1),
            AffineLabel::E6Twisted => write!(f, "E6^2"),
            AffineLabel::D4Triality => write!(f, "D4^3"),
        }
    }
}

impl FromStr for AffineType {
    type Err = Error;

    /// Parses labels such as `A1^1`, `a2^2`, `D4^3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid affine type '{s}' (expected e.g. A1^1, A2^2, D4^3)"));
        let t = s.trim().to_ascii_uppercase();
        let (head, tw) = t.split_once('^').ok_or_else(bad)?;
        let tw: u32 = tw.trim().parse().map_err(|_| bad())?;
        let mut chars = head.trim().chars();
        let family = chars.next().ok_or_else(bad)?;
        let m: usize = chars.as_str().parse().map_err(|_| bad())?;
        let (label, n) = match (family, tw) {
            ('A', 1) => (AffineLabel::A1, m),
            ('B', 1) => (AffineLabel::B1, m),
            ('C', 1) => (AffineLabel::C1, m),
            ('D', 1) => (AffineLabel::D1, m),
            ('E', 1) => match m {
                6 => (AffineLabel::E6, 6),
                7 => (AffineLabel::E7, 7),
                8 => (AffineLabel::E8, 8),
                _ => return Err(Error::InvalidRank { label: "E^1".into(), n: m }),
            },
            ('F', 1) => (AffineLabel::F4, m),
            ('G', 1) => (AffineLabel::G2, m),
            ('A', 2) if m >= 2 && m % 2 == 0 => (AffineLabel::A2Even, m / 2),
            ('A', 2) if m % 2 == 1 => (AffineLabel::A2Odd, (m + 1) / 2),
            ('D', 2) if m >= 1 => (AffineLabel::D2, m - 1),
            ('E', 2) if m == 6 => (AffineLabel::E6Twisted, 4),
            ('D', 3) if m == 4 => (AffineLabel::D4Triality, 2),
            _ => return Err(bad()),
        };
        AffineType::new(label, n)
    }
}

/// A weight of the finite part, in fundamental-weight coordinates
/// (index 0 is node 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight(vec![0; n])
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

/// Affine Cartan data with every constant the monomial calculus needs.
///
/// Node-indexed vectors (`r`, `mu`, `d`, `bar_node`) have length `n + 1`
/// and are indexed by the node number `0..=n`; only nodes `1..=n` (the set
/// `I`) are used outside this module.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanData {
    pub affine_type: AffineType,
    pub cartan: Vec<Vec<i64>>,
    pub r: Vec<Rational64>,
    pub mu: Vec<i64>,
    pub d: Vec<i64>,
    pub twist_order: u32,
    pub bar_node: Vec<usize>,
    pub rvee_hvee: i64,
    pub finite_cartan: Vec<Vec<i64>>,
}

fn chain(size: usize) -> Vec<Vec<i64>> {
    let mut c = vec![vec![0i64; size]; size];
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = 2;
    }
    c
}

fn link(c: &mut [Vec<i64>], i: usize, j: usize, cij: i64, cji: i64) {
    c[i][j] = cij;
    c[j][i] = cji;
}

fn kac_matrix(t: AffineType) -> Vec<Vec<i64>> {
    use AffineLabel::*;
    let n = t.n;
    let mut c = chain(n + 1);
    match t.label {
        A1 => {
            if n == 1 {
                link(&mut c, 0, 1, -2, -2);
            } else {
                for i in 0..n {
                    link(&mut c, i, i + 1, -1, -1);
                }
                link(&mut c, n, 0, -1, -1);
            }
        }
        B1 => {
            link(&mut c, 0, 2, -1, -1);
            for i in 1..n - 1 {
                link(&mut c, i, i + 1, -1, -1);
            }
            link(&mut c, n - 1, n, -1, -2);
        }
        C1 => {
            link(&mut c, 0, 1, -1, -2);
            for i in 1..n - 1 {
                link(&mut c, i, i + 1, -1, -1);
            }
            link(&mut c, n - 1, n, -2, -1);
        }
        D1 => {
            link(&mut c, 0, 2, -1, -1);
            for i in 1..n - 2 {
                link(&mut c, i, i + 1, -1, -1);
            }
            link(&mut c, n - 2, n - 1, -1, -1);
            link(&mut c, n - 2, n, -1, -1);
        }
        E6 => {
            for i in 1..5 {
                link(&mut c, i, i + 1, -1, -1);
            }
            link(&mut c, 3, 6, -1, -1);
            link(&mut c, 6, 0, -1, -1);
        }
        E7 => {
            for i in 0..6 {
                link(&mut c, i, i + 1, -1, -1);
            }
            link(&mut c, 3, 7, -1, -1);
        }
        E8 => {
            for i in 1..7 {
                link(&mut c, i, i + 1, -1, -1);
            }
            link(&mut c, 7, 0, -1, -1);
            link(&mut c, 3, 8, -1, -1);
        }
        F4 => {
            link(&mut c, 0, 1, -1, -1);
            link(&mut c, 1, 2, -1, -1);
            link(&mut c, 2, 3, -1, -2);
            link(&mut c, 3, 4, -1, -1);
        }
        G2 => {
            link(&mut c, 0, 1, -1, -1);
            link(&mut c, 1, 2, -1, -3);
        }
        A2Even => {
            if n == 1 {
                link(&mut c, 0, 1, -4, -1);
            } else {
                link(&mut c, 0, 1, -2, -1);
                for i in 1..n - 1 {
                    link(&mut c, i, i + 1, -1, -1);
                }
                link(&mut c, n - 1, n, -2, -1);
            }
        }
        A2Odd => {
            link(&mut c, 0, 2, -1, -1);
            for i in 1..n - 1 {
                link(&mut c, i, i + 1, -1, -1);
            }
            link(&mut c, n - 1, n, -2, -1);
        }
        D2 => {
            link(&mut c, 0, 1, -2, -1);
            for i in 1..n - 1 {
                link(&mut c, i, i + 1, -1, -1);
            }
            link(&mut c, n - 1, n, -1, -2);
        }
        E6Twisted => {
            link(&mut c, 0, 1, -1, -1);
            link(&mut c, 1, 2, -1, -1);
            link(&mut c, 2, 3, -2, -1);
            link(&mut c, 3, 4, -1, -1);
        }
        D4Triality => {
            link(&mut c, 0, 1, -1, -1);
            link(&mut c, 1, 2, -3, -1);
        }
    }
    if t.label == A2Even {
        // reversed numbering: node i <-> node n - i
        let rev = |i: usize| n - i;
        let mut out = chain(n + 1);
        for i in 0..=n {
            for j in 0..=n {
                out[i][j] = c[rev(i)][rev(j)];
            }
        }
        return out;
    }
    c
}

/// Determinant of an integer matrix by fraction-free (Bareiss) elimination.
fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn principal(m: &[Vec<i64>], keep: &[usize]) -> Vec<Vec<i64>> {
    keep.iter().map(|&i| keep.iter().map(|&j| m[i][j]).collect()).collect()
}

/// Affine-type criterion: every proper principal minor positive and det = 0.
///
/// Since `C` is symmetrizable, positivity of all proper principal minors is
/// equivalent to each maximal proper principal submatrix having positive
/// leading minors (Sylvester on the symmetrized form).
fn check_affine(c: &[Vec<i64>]) -> std::result::Result<(), String> {
    let size = c.len();
    for i in 0..size {
        if c[i][i] != 2 {
            return Err(format!("C[{i}][{i}] != 2"));
        }
        for j in 0..size {
            if i != j && (c[i][j] > 0 || (c[i][j] == 0) != (c[j][i] == 0)) {
                return Err(format!("bad off-diagonal pattern at ({i},{j})"));
            }
        }
    }
    if det(c) != 0 {
        return Err("det C != 0".into());
    }
    for removed in 0..size {
        let keep: Vec<usize> = (0..size).filter(|&k| k != removed).collect();
        for len in 1..=keep.len() {
            if det(&principal(c, &keep[..len])) <= 0 {
                return Err(format!("non-positive principal minor (removed node {removed}, size {len})"));
            }
        }
    }
    Ok(())
}

fn symmetrizers(c: &[Vec<i64>], mu: &[i64]) -> std::result::Result<Vec<Rational64>, String> {
    let size = c.len();
    let mut r: Vec<Option<Rational64>> = vec![None; size];
    r[0] = Some(Rational64::one());
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        let ri = r[i].unwrap();
        for j in 0..size {
            if i != j && c[i][j] != 0 {
                let rj = ri * Rational64::from(c[i][j]) / Rational64::from(c[j][i]);
                match r[j] {
                    None => {
                        r[j] = Some(rj);
                        stack.push(j);
                    }
                    Some(existing) if existing != rj => return Err("C is not symmetrizable".into()),
                    Some(_) => {}
                }
            }
        }
    }
    let r: Vec<Rational64> = r.into_iter().map(|x| x.ok_or("C is decomposable")).collect::<std::result::Result<_, _>>()?;
    // normalise so that mu_i r_i are coprime positive integers
    let scaled: Vec<Rational64> = r.iter().zip(mu).map(|(ri, &m)| ri * m).collect();
    let lcm_den = scaled.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
    let ints: Vec<i64> = scaled.iter().map(|x| (x * lcm_den).to_integer()).collect();
    let g = ints.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    Ok(ints.iter().zip(mu).map(|(&x, &m)| Rational64::new(x / g, m)).collect())
}

fn rvee_hvee(t: AffineType) -> i64 {
    use AffineLabel::*;
    let n = t.n as i64;
    match t.label {
        A1 => n + 1,
        B1 => 2 * (2 * n - 1),
        C1 => 2 * (n + 1),
        D1 => 2 * n - 2,
        E6 => 12,
        E7 => 18,
        E8 => 30,
        F4 => 2 * 9,
        G2 => 3 * 4,
        A2Even => 2 * n + 1,
        A2Odd => 2 * n,
        D2 => 2 * n,
        E6Twisted => 12,
        D4Triality => 6,
    }
}

fn bar_nodes(t: AffineType) -> Vec<usize> {
    use AffineLabel::*;
    let n = t.n;
    let mut bar: Vec<usize> = (0..=n).collect();
    match t.label {
        A1 => {
            for (i, b) in bar.iter_mut().enumerate().skip(1) {
                *b = n + 1 - i;
            }
        }
        D1 if n % 2 == 1 => {
            bar.swap(n - 1, n);
        }
        E6 => {
            bar.swap(1, 5);
            bar.swap(2, 4);
        }
        _ => {}
    }
    bar
}

/// Builds the Cartan data of `t`, running the affine-type self-check.
pub fn build_cartan(t: AffineType) -> Result<CartanData> {
    if !t.label.rank_ok(t.n) {
        return Err(Error::InvalidRank { label: format!("{:?}", t.label), n: t.n });
    }
    let n = t.n;
    let cartan = kac_matrix(t);
    check_affine(&cartan).map_err(|e| Error::Internal(format!("{t}: {e}")))?;

    let mut mu = vec![1i64; n + 1];
    if t.label == AffineLabel::A2Even {
        mu[n] = 2;
    }
    let r = symmetrizers(&cartan, &mu).map_err(|e| Error::Internal(format!("{t}: {e}")))?;

    let twist_order = match t.label {
        AffineLabel::D4Triality => 3,
        l if l.is_twisted() => 2,
        _ => 1,
    };
    let d = r
        .iter()
        .map(|ri| {
            if twist_order > 1 && *ri == Rational64::from(twist_order as i64) {
                twist_order as i64
            } else {
                1
            }
        })
        .collect();
    let finite_cartan = (1..=n).map(|i| (1..=n).map(|j| cartan[i][j]).collect()).collect();

    Ok(CartanData {
        affine_type: t,
        cartan,
        r,
        mu,
        d,
        twist_order,
        bar_node: bar_nodes(t),
        rvee_hvee: rvee_hvee(t),
        finite_cartan,
    })
}

impl CartanData {
    /// sl2-hat, the type the matrix engine works in.
    pub fn sl2() -> Self {
        build_cartan(AffineType::sl2()).expect("A1^1 is valid")
    }

    pub fn rank(&self) -> usize {
        self.affine_type.n
    }

    pub fn is_twisted(&self) -> bool {
        self.twist_order > 1
    }

    /// `mu_i r_i` as an integer (always integral by normalisation).
    pub fn mu_r(&self, i: usize) -> i64 {
        (self.r[i] * self.mu[i]).to_integer()
    }

    pub fn check_node(&self, i: usize) -> Result<()> {
        if (1..=self.rank()).contains(&i) {
            Ok(())
        } else {
            Err(Error::InvalidNode { node: i, rank: self.rank() })
        }
    }

    /// Coordinates of the simple root `alpha_j` on the fundamental weights
    /// (column `j` of the finite Cartan matrix).
    pub fn simple_root(&self, j: usize) -> Weight {
        Weight((1..=self.rank()).map(|i| self.cartan[i][j]).collect())
    }
}

/// `w1 <= w2` iff `w2 - w1` is a nonnegative integer combination of simple
/// roots.
pub fn weight_leq(w1: &Weight, w2: &Weight, cd: &CartanData) -> bool {
    let n = cd.rank();
    let diff = w2.sub(w1);
    // solve finite_cartan * c = diff over Q (finite Cartan is invertible)
    let mut a: Vec<Vec<Rational64>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational64> = (0..n).map(|j| Rational64::from(cd.finite_cartan[i][j])).collect();
            row.push(Rational64::from(diff.0[i]));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).expect("finite Cartan matrix is invertible");
        a.swap(piv, col);
        let p = a[col][col];
        for x in a[col].iter_mut() {
            *x /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for k in 0..=n {
                    let v = a[col][k];
                    a[r][k] -= f * v;
                }
            }
        }
    }
    a.iter().all(|row| {
        let c = row[n];
        c.is_integer() && !c.is_negative() && c.to_integer().to_i64().is_some()
    })
}

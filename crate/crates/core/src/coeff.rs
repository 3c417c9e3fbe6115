//! Exact coefficient fields: the rationals (arbitrary precision) and prime
//! fields GF(p) with p < 2^31, plus exact kernel computation.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A coefficient field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rationals,
    Prime(u32),
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if p as u64 % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn prime(p: u32) -> Result<Field> {
        if p >= (1 << 31) || !is_prime(p) {
            return Err(Error::InvalidField(format!("GF({p})")));
        }
        Ok(Field::Prime(p))
    }

    pub fn characteristic(&self) -> u32 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
        }
    }

    pub fn zero(&self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(&self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Scalar::Mod {
                p: *p,
                v: n.rem_euclid(*p as i64) as u32,
            },
        }
    }

    /// `num/den` reduced into this field. Fails when `den` vanishes in the field.
    pub fn from_ratio(&self, num: i64, den: i64) -> Result<Scalar> {
        self.from_i64(num).div(&self.from_i64(den))
    }

    /// Parses a scalar literal: `n`, `-n` or `n/d`.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad scalar `{s}`"));
        match self {
            Field::Rationals => {
                let q = if let Some((n, d)) = s.split_once('/') {
                    let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                    let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                    if d.is_zero() {
                        return Err(Error::DivisionByZero);
                    }
                    BigRational::new(n, d)
                } else {
                    BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)
                };
                Ok(Scalar::Rational(q))
            }
            Field::Prime(_) => {
                if let Some((n, d)) = s.split_once('/') {
                    let n: i64 = n.trim().parse().map_err(|_| bad())?;
                    let d: i64 = d.trim().parse().map_err(|_| bad())?;
                    self.from_ratio(n, d)
                } else {
                    let n = BigInt::from_str(s).map_err(|_| bad())?;
                    let p = BigInt::from(self.characteristic());
                    let r = ((n % &p) + &p) % &p;
                    Ok(self.from_i64(i64::try_from(r).expect("residue fits")))
                }
            }
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Accepts `Q`, `GF(p)`, `GFp` and `Z2`-style aliases `Z(p)`/`Zp`.
    fn from_str(s: &str) -> Result<Field> {
        let t = s.trim();
        if t == "Q" || t == "QQ" {
            return Ok(Field::Rationals);
        }
        let rest = t
            .strip_prefix("GF")
            .or_else(|| t.strip_prefix('Z'))
            .ok_or_else(|| Error::InvalidField(s.to_string()))?;
        let digits = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .unwrap_or(rest);
        let p: u32 = digits
            .parse()
            .map_err(|_| Error::InvalidField(s.to_string()))?;
        Field::prime(p).map_err(|_| Error::InvalidField(s.to_string()))
    }
}

impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// An element of a [`Field`] in canonical form: reduced fraction with positive
/// denominator over Q, residue in `[0, p)` over GF(p).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Mod { p: u32, v: u32 },
}

fn mod_inverse(v: u32, p: u32) -> u32 {
    // Fermat; p is prime.
    let (mut base, mut exp, mut acc) = (v as u64, (p - 2) as u64, 1u64);
    let m = p as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc as u32
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rationals,
            Scalar::Mod { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Mod { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Mod { v, .. } => *v == 1,
        }
    }

    fn check(&self, other: &Scalar) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch(
                self.field().to_string(),
                other.field().to_string(),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Mod { p, v }, Scalar::Mod { v: w, .. }) => Scalar::Mod {
                p: *p,
                v: ((*v as u64 + *w as u64) % *p as u64) as u32,
            },
            _ => unreachable!(),
        })
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Mod { p, v } => Scalar::Mod {
                p: *p,
                v: if *v == 0 { 0 } else { p - v },
            },
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        Ok(match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Mod { p, v }, Scalar::Mod { v: w, .. }) => Scalar::Mod {
                p: *p,
                v: ((*v as u64 * *w as u64) % *p as u64) as u32,
            },
            _ => unreachable!(),
        })
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            Scalar::Rational(a) => Scalar::Rational(a.recip()),
            Scalar::Mod { p, v } => Scalar::Mod {
                p: *p,
                v: mod_inverse(*v, *p),
            },
        })
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        self.check(other)?;
        self.mul(&other.inv()?)
    }

    /// `|x|` over Q.
    pub fn abs(&self) -> Result<AbsValue> {
        match self {
            Scalar::Rational(q) => Ok(AbsValue(q.abs())),
            Scalar::Mod { .. } => Err(Error::NoAbsoluteValue),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Mod { v, .. } => write!(f, "{v}"),
        }
    }
}

/// A nonnegative rational magnitude.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AbsValue(BigRational);

impl AbsValue {
    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `self / n` for a positive integer `n`.
    pub fn div_int(&self, n: i64) -> AbsValue {
        AbsValue(&self.0 / BigRational::from_integer(BigInt::from(n)))
    }
}

impl fmt::Display for AbsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A dense matrix over one field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    cols: usize,
    rows: Vec<Vec<Scalar>>,
}

impl Matrix {
    pub fn new(field: Field, cols: usize, rows: Vec<Vec<Scalar>>) -> Result<Matrix> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::MalformedMatrix(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            if let Some(x) = r.iter().find(|x| x.field() != field) {
                return Err(Error::FieldMismatch(field.to_string(), x.field().to_string()));
            }
        }
        Ok(Matrix { field, cols, rows })
    }

    pub fn from_i64(field: Field, rows: &[Vec<i64>]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, Vec::len);
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| field.from_i64(x)).collect())
            .collect();
        Matrix::new(field, cols, rows)
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { field.one() } else { field.zero() })
                    .collect()
            })
            .collect();
        Matrix { field, cols: n, rows }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.rows[i]
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Scalar]) -> Result<Vec<Scalar>> {
        if v.len() != self.cols {
            return Err(Error::MalformedMatrix(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .zip(v)
                    .try_fold(self.field.zero(), |acc, (a, b)| acc.add(&a.mul(b)?))
            })
            .collect()
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Vec<Vec<Scalar>>, Vec<usize>) {
        let mut m = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(r, p);
            let inv = m[r][c].inv().expect("pivot is nonzero");
            for x in m[r].iter_mut() {
                *x = x.mul(&inv).expect("same field");
            }
            for i in 0..m.len() {
                if i != r && !m[i][c].is_zero() {
                    let factor = m[i][c].clone();
                    for j in 0..self.cols {
                        let t = factor.mul(&m[r][j]).expect("same field");
                        m[i][j] = m[i][j].sub(&t).expect("same field");
                    }
                }
            }
            pivots.push(c);
            r += 1;
            if r == m.len() {
                break;
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
}

/// Basis of the kernel `{v : M v = 0}`, one vector per free column in
/// increasing column order (the free entry is 1). Empty means only the zero
/// solution.
pub fn solve_homogeneous(m: &Matrix) -> Vec<Vec<Scalar>> {
    let (rref, pivots) = m.rref();
    let field = m.field();
    let mut basis = Vec::new();
    for free in (0..m.n_cols()).filter(|c| !pivots.contains(c)) {
        let mut v = vec![field.zero(); m.n_cols()];
        v[free] = field.one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = rref[r][free].neg();
        }
        basis.push(v);
    }
    basis
}

/// The six pairwise-sum equations over the unknowns `(c_e, c_b, c_c, c_d)`
/// that govern singular nucleus-family elements of the Grigorchuk groupoid.
pub fn grigorchuk_pair_system(field: Field) -> Matrix {
    Matrix::from_i64(
        field,
        &[
            vec![1, 1, 0, 0],
            vec![1, 0, 1, 0],
            vec![1, 0, 0, 1],
            vec![0, 0, 1, 1],
            vec![0, 1, 0, 1],
            vec![0, 1, 1, 0],
        ],
    )
    .expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Field::Rationals.from_ratio(n, d).unwrap()
    }

    #[test]
    fn rational_arithmetic() {
        assert_eq!(q(1, 3).add(&q(1, 6)).unwrap(), q(1, 2));
        assert_eq!(q(2, 1).mul(&q(1, 2)).unwrap(), q(1, 1));
        assert_eq!(q(-2, 4), q(1, -2));
        assert_eq!(q(3, 4).to_string(), "3/4");
    }

    #[test]
    fn gf2_one_plus_one() {
        let f = Field::prime(2).unwrap();
        assert!(f.one().add(&f.one()).unwrap().is_zero());
    }

    #[test]
    fn errors() {
        assert_eq!(q(1, 1).div(&q(0, 1)), Err(Error::DivisionByZero));
        let f = Field::prime(5).unwrap();
        assert!(matches!(q(1, 1).add(&f.one()), Err(Error::FieldMismatch(..))));
        assert!(Field::prime(9).is_err());
        assert!(f.one().abs().is_err());
    }

    #[test]
    fn field_tags() {
        assert_eq!("Q".parse::<Field>().unwrap(), Field::Rationals);
        assert_eq!("GF(7)".parse::<Field>().unwrap(), Field::Prime(7));
        assert_eq!("GF2".parse::<Field>().unwrap(), Field::Prime(2));
        assert!("GF(4)".parse::<Field>().is_err());
        assert!("R".parse::<Field>().is_err());
        assert_eq!(Field::Prime(3).characteristic(), 3);
        assert_eq!(Field::Rationals.characteristic(), 0);
    }

    #[test]
    fn parse_scalars() {
        let f = Field::prime(7).unwrap();
        assert_eq!(f.parse_scalar("-1").unwrap(), f.from_i64(6));
        assert_eq!(f.parse_scalar("1/2").unwrap(), f.from_i64(4));
        assert_eq!(Field::Rationals.parse_scalar("-3/6").unwrap(), q(-1, 2));
    }

    #[test]
    fn grigorchuk_system_kernels() {
        assert!(solve_homogeneous(&grigorchuk_pair_system(Field::Rationals)).is_empty());
        let gf2 = Field::prime(2).unwrap();
        let ker = solve_homogeneous(&grigorchuk_pair_system(gf2));
        assert_eq!(ker, vec![vec![gf2.one(); 4]]);
    }

    #[test]
    fn identity_kernel_is_trivial() {
        for f in [Field::Rationals, Field::Prime(3)] {
            assert!(solve_homogeneous(&Matrix::identity(f, 5)).is_empty());
        }
    }

    #[test]
    fn kernel_of_wide_matrix() {
        let m = Matrix::from_i64(Field::Rationals, &[vec![1, 2, 3], vec![2, 4, 6]]).unwrap();
        let ker = solve_homogeneous(&m);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.apply(v).unwrap().iter().all(Scalar::is_zero));
        }
        assert_eq!(ker[0], vec![q(-2, 1), q(1, 1), q(0, 1)]);
    }
}

//! Exact integer and rational arithmetic.
//!
//! [`Int`] keeps values in an `i128` and promotes to a heap-allocated
//! [`BigInt`] only when a checked operation overflows. Values that fit in an
//! `i128` are always stored in the small form, so the derived equality and
//! hashing are canonical. [`Rational`] is a reduced fraction over [`Int`].

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Int {
    Small(i128),
    Big(BigInt),
}

impl Int {
    pub const ZERO: Int = Int::Small(0);
    pub const ONE: Int = Int::Small(1);

    fn from_big(b: BigInt) -> Int {
        match b.to_i128() {
            Some(v) => Int::Small(v),
            None => Int::Big(b),
        }
    }

    fn to_big(&self) -> BigInt {
        match self {
            Int::Small(v) => BigInt::from(*v),
            Int::Big(b) => b.clone(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Int::Small(v) => v.signum() as i32,
            Int::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Int::Small(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Int::Small(1))
    }

    pub fn abs(&self) -> Int {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn as_i128(&self) -> Option<i128> {
        match self {
            Int::Small(v) => Some(*v),
            Int::Big(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Int::Small(v) => *v as f64,
            Int::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn gcd(&self, other: &Int) -> Int {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => {
                let g = gcd_u128(a.unsigned_abs(), b.unsigned_abs());
                match i128::try_from(g) {
                    Ok(v) => Int::Small(v),
                    Err(_) => Int::from_big(BigInt::from(g)),
                }
            }
            _ => Int::from_big(self.to_big().gcd(&other.to_big())),
        }
    }

    /// Exact division; the caller guarantees `other` divides `self`.
    fn div_exact(&self, other: &Int) -> Int {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => match a.checked_div(*b) {
                Some(q) => Int::Small(q),
                None => Int::from_big(BigInt::from(*a) / BigInt::from(*b)),
            },
            _ => Int::from_big(self.to_big() / other.to_big()),
        }
    }

    /// Quotient and remainder with truncation toward zero.
    fn div_rem(&self, other: &Int) -> (Int, Int) {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) if !(*a == i128::MIN && *b == -1) => {
                (Int::Small(a / b), Int::Small(a % b))
            }
            _ => {
                let (q, r) = self.to_big().div_rem(&other.to_big());
                (Int::from_big(q), Int::from_big(r))
            }
        }
    }

    pub fn pow10(exp: u32) -> Int {
        match 10i128.checked_pow(exp) {
            Some(v) => Int::Small(v),
            None => Int::from_big(num_traits::pow(BigInt::from(10), exp as usize)),
        }
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Self {
        Int::Small(v as i128)
    }
}

impl From<i128> for Int {
    fn from(v: i128) -> Self {
        Int::Small(v)
    }
}

impl From<BigInt> for Int {
    fn from(v: BigInt) -> Self {
        Int::from_big(v)
    }
}

impl Ord for Int {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Int::Small(a), Int::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Int {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

macro_rules! int_binop {
    ($trait:ident, $method:ident, $checked:ident, $op:tt) => {
        impl<'a> $trait<&'a Int> for &'a Int {
            type Output = Int;
            fn $method(self, rhs: &'a Int) -> Int {
                if let (Int::Small(a), Int::Small(b)) = (self, rhs) {
                    if let Some(v) = a.$checked(*b) {
                        return Int::Small(v);
                    }
                }
                Int::from_big(self.to_big() $op rhs.to_big())
            }
        }
        impl $trait<Int> for Int {
            type Output = Int;
            fn $method(self, rhs: Int) -> Int {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Int> for Int {
            type Output = Int;
            fn $method(self, rhs: &'a Int) -> Int {
                (&self).$method(rhs)
            }
        }
    };
}

int_binop!(Add, add, checked_add, +);
int_binop!(Sub, sub, checked_sub, -);
int_binop!(Mul, mul, checked_mul, *);

impl Neg for &Int {
    type Output = Int;
    fn neg(self) -> Int {
        match self {
            Int::Small(v) => match v.checked_neg() {
                Some(n) => Int::Small(n),
                None => Int::from_big(-BigInt::from(*v)),
            },
            Int::Big(b) => Int::from_big(-b.clone()),
        }
    }
}

impl Neg for Int {
    type Output = Int;
    fn neg(self) -> Int {
        -&self
    }
}

impl fmt::Display for Int {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Int::Small(v) => write!(f, "{v}"),
            Int::Big(b) => write!(f, "{b}"),
        }
    }
}

/// A reduced fraction `num / den` with `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational {
    num: Int,
    den: Int,
}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.num.hash(state);
        self.den.hash(state);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number {0:?}")]
pub struct ParseRationalError(pub String);

impl Rational {
    pub fn zero() -> Self {
        Rational { num: Int::ZERO, den: Int::ONE }
    }

    pub fn one() -> Self {
        Rational { num: Int::ONE, den: Int::ONE }
    }

    pub fn from_int(v: Int) -> Self {
        Rational { num: v, den: Int::ONE }
    }

    /// Builds `num / den`; panics when `den` is zero.
    pub fn new(num: Int, den: Int) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.signum() < 0 { (-num, -den) } else { (num, den) };
        if den.is_one() {
            return Rational { num, den };
        }
        let g = num.gcd(&den);
        if g.is_one() {
            Rational { num, den }
        } else {
            Rational { num: num.div_exact(&g), den: den.div_exact(&g) }
        }
    }

    pub fn ratio(num: i128, den: i128) -> Self {
        Rational::new(Int::Small(num), Int::Small(den))
    }

    pub fn numer(&self) -> &Int {
        &self.num
    }

    pub fn denom(&self) -> &Int {
        &self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn signum(&self) -> i32 {
        self.num.signum()
    }

    pub fn abs(&self) -> Rational {
        Rational { num: self.num.abs(), den: self.den.clone() }
    }

    pub fn to_f64(&self) -> f64 {
        match (self.num.as_i128(), self.den.as_i128()) {
            (Some(n), Some(d)) => n as f64 / d as f64,
            _ => {
                let n = self.num.to_big();
                let d = self.den.to_big();
                // Integer quotient with about 64 significant bits, then rescale.
                let e = n.magnitude().bits() as i64 - d.bits() as i64;
                let shift = 64 - e;
                let q = if shift >= 0 { (n << shift as usize) / d } else { n / (d << (-shift) as usize) };
                q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-shift as i32)
            }
        }
    }

    /// The exact value of a finite `f64`.
    pub fn from_f64_exact(v: f64) -> Option<Rational> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Rational::zero());
        }
        let bits = v.to_bits();
        let negative = bits >> 63 == 1;
        let exponent = ((bits >> 52) & 0x7ff) as i32;
        let fraction = bits & ((1u64 << 52) - 1);
        let (mantissa, exp) = if exponent == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1u64 << 52), exponent - 1075)
        };
        let mut num = BigInt::from(mantissa);
        let mut den = BigInt::from(1u8);
        if exp >= 0 {
            num <<= exp as usize;
        } else {
            den <<= (-exp) as usize;
        }
        if negative {
            num = -num;
        }
        Some(Rational::new(Int::from_big(num), Int::from_big(den)))
    }

    /// Rounds to the nearest integer, halves away from zero.
    pub fn round(&self) -> Int {
        if self.den.is_one() {
            return self.num.clone();
        }
        // |x| rounded = floor((2|n| + d) / 2d)
        let two = Int::Small(2);
        let n = self.num.abs();
        let (q, _) = (&(&n * &two) + &self.den).div_rem(&(&self.den * &two));
        if self.num.signum() < 0 {
            -q
        } else {
            q
        }
    }

    /// Exact decimal expansion when the denominator has no prime factors other
    /// than 2 and 5.
    pub fn to_decimal_string(&self) -> Option<String> {
        if self.den.is_one() {
            return Some(self.num.to_string());
        }
        let mut d = self.den.clone();
        let two = Int::Small(2);
        let five = Int::Small(5);
        let mut twos = 0u32;
        let mut fives = 0u32;
        loop {
            let (q, r) = d.div_rem(&two);
            if !r.is_zero() {
                break;
            }
            d = q;
            twos += 1;
        }
        loop {
            let (q, r) = d.div_rem(&five);
            if !r.is_zero() {
                break;
            }
            d = q;
            fives += 1;
        }
        if !d.is_one() {
            return None;
        }
        let digits = twos.max(fives);
        let scaled = Rational::new(&self.num * &Int::pow10(digits), self.den.clone());
        debug_assert!(scaled.is_integer());
        let mut s = scaled.num.abs().to_string();
        let digits = digits as usize;
        if s.len() <= digits {
            s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
        }
        let (int_part, frac_part) = s.split_at(s.len() - digits);
        let sign = if self.num.signum() < 0 { "-" } else { "" };
        Some(format!("{sign}{int_part}.{frac_part}"))
    }

    /// Decimal when exact, otherwise `num/den`.
    pub fn to_exact_string(&self) -> String {
        self.to_decimal_string().unwrap_or_else(|| format!("{}/{}", self.num, self.den))
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `-12`, `3.25`, `1.5e-3` and `7/3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        if let Some((n, d)) = t.split_once('/') {
            let n: Rational = n.parse().map_err(|_| err())?;
            let d: Rational = d.parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(&n / &d);
        }
        let (mantissa, exp) = match t.find(['e', 'E']) {
            Some(i) => {
                let e: i64 = t[i + 1..].parse().map_err(|_| err())?;
                (&t[..i], e)
            }
            None => (t, 0),
        };
        let (negative, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let all: String = format!("{int_part}{frac_part}");
        let mut num = Int::from_big(BigInt::from_str(&all).map_err(|_| err())?);
        if negative {
            num = -num;
        }
        let exp = exp - frac_part.len() as i64;
        if exp.unsigned_abs() > 4096 {
            return Err(err());
        }
        Ok(if exp >= 0 {
            Rational::from_int(&num * &Int::pow10(exp as u32))
        } else {
            Rational::new(num, Int::pow10((-exp) as u32))
        })
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_int(Int::from(v))
    }
}

impl From<Int> for Rational {
    fn from(v: Int) -> Self {
        Rational::from_int(v)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        let ls = self.num.signum();
        let rs = other.num.signum();
        if ls != rs {
            return ls.cmp(&rs);
        }
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &'a Rational) -> Rational {
        if self.den == rhs.den {
            return Rational::new(&self.num + &rhs.num, self.den.clone());
        }
        Rational::new(&self.num * &rhs.den + &rhs.num * &self.den, &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &'a Rational) -> Rational {
        if self.den == rhs.den {
            return Rational::new(&self.num - &rhs.num, self.den.clone());
        }
        Rational::new(&self.num * &rhs.den - &rhs.num * &self.den, &self.den * &rhs.den)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &'a Rational) -> Rational {
        if self.den.is_one() && rhs.den.is_one() {
            return Rational::from_int(&self.num * &rhs.num);
        }
        Rational::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        Rational::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }
}

macro_rules! rational_owned_ops {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
    )*};
}

rational_owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -&self
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| &acc + &x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl serde::Serialize for Rational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

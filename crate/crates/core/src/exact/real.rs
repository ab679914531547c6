//! Exact elements of real quadratic fields Q(sqrt d).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// `(a + b sqrt d) / c` in lowest terms.
///
/// Canonical form: `c > 0`, `gcd(a, b, c) = 1`, `d` squarefree, and `b = 0`
/// exactly when the value is rational, in which case `d = 0`. Structural
/// equality is therefore numeric equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactReal {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: u64,
}

impl ExactReal {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: u64) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (square, free) = split_square(d);
        Ok(Self::normalized(a, b * BigInt::from(square), c, free))
    }

    /// `(a + b sqrt d) / c` from machine integers.
    pub fn from_parts(a: i64, b: i64, c: i64, d: u64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d)
    }

    pub fn sqrt(d: u64) -> Self {
        Self::from_parts(0, 1, 1, d).expect("nonzero denominator")
    }

    pub fn zero() -> Self {
        Self::from_integer(BigInt::zero())
    }

    pub fn one() -> Self {
        Self::from_integer(BigInt::one())
    }

    pub fn from_integer(n: BigInt) -> Self {
        ExactReal { a: n, b: BigInt::zero(), c: BigInt::one(), d: 0 }
    }

    pub fn from_rational(r: &Rational) -> Self {
        ExactReal { a: r.numer().clone(), b: BigInt::zero(), c: r.denom().clone(), d: 0 }
    }

    /// `d` is assumed squarefree here.
    fn normalized(mut a: BigInt, mut b: BigInt, mut c: BigInt, mut d: u64) -> Self {
        if d == 1 {
            a += &b;
            b = BigInt::zero();
        }
        if b.is_zero() || d == 0 {
            b = BigInt::zero();
            d = 0;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        ExactReal { a, b, c, d }
    }

    pub fn numer_rational(&self) -> &BigInt {
        &self.a
    }

    pub fn numer_surd(&self) -> &BigInt {
        &self.b
    }

    pub fn denom(&self) -> &BigInt {
        &self.c
    }

    /// The radicand `d`; 0 for rational values.
    pub fn radicand(&self) -> u64 {
        self.d
    }

    pub fn rational_part(&self) -> Rational {
        Rational::new(self.a.clone(), self.c.clone())
    }

    /// The coefficient of sqrt d.
    pub fn surd_coefficient(&self) -> Rational {
        Rational::new(self.b.clone(), self.c.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_irrational(&self) -> bool {
        !self.is_rational()
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.c.is_one()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.rational_part())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// The common field of two values, rationals fitting any field.
    pub fn common_field(&self, other: &Self) -> Result<u64> {
        match (self.d, other.d) {
            (0, d) | (d, 0) => Ok(d),
            (d, e) if d == e => Ok(d),
            (d, e) => Err(Error::FieldMismatch(d, e)),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let d = self.common_field(other)?;
        Ok(Self::normalized(
            &self.a * &other.c + &other.a * &self.c,
            &self.b * &other.c + &other.b * &self.c,
            &self.c * &other.c,
            d,
        ))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let d = self.common_field(other)?;
        let dd = BigInt::from(d);
        Ok(Self::normalized(
            &self.a * &other.a + &self.b * &other.b * dd,
            &self.a * &other.b + &other.a * &self.b,
            &self.c * &other.c,
            d,
        ))
    }

    /// `1 / self`, via the conjugate.
    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let norm = &self.a * &self.a - &self.b * &self.b * BigInt::from(self.d);
        Ok(Self::normalized(&self.c * &self.a, -(&self.c * &self.b), norm, self.d))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.recip()?)
    }

    pub fn add_rational(&self, r: &Rational) -> Self {
        Self::normalized(
            &self.a * r.denom() + r.numer() * &self.c,
            &self.b * r.denom(),
            &self.c * r.denom(),
            self.d,
        )
    }

    pub fn sub_rational(&self, r: &Rational) -> Self {
        self.add_rational(&-r)
    }

    pub fn mul_rational(&self, r: &Rational) -> Self {
        Self::normalized(&self.a * r.numer(), &self.b * r.numer(), &self.c * r.denom(), self.d)
    }

    pub fn mul_integer(&self, n: &BigInt) -> Self {
        Self::normalized(&self.a * n, &self.b * n, self.c.clone(), self.d)
    }

    pub fn signum(&self) -> Ordering {
        surd_sign(&self.a, &self.b, self.d)
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Greatest integer <= self, exact via integer square roots.
    pub fn floor(&self) -> BigInt {
        // floor(x / c) = floor(floor(x) / c) for integer c > 0
        let top = &self.a + floor_surd(&self.b, self.d);
        top.div_floor(&self.c)
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// self - floor(self), in [0, 1).
    pub fn fract(&self) -> Self {
        self.sub_rational(&Rational::from_integer(self.floor()))
    }

    pub fn cmp_exact(&self, other: &Self) -> Result<Ordering> {
        Ok(self.checked_sub(other)?.signum())
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Nearest double, truncated after the integer and 60 fractional bits.
    pub fn to_f64(&self) -> f64 {
        let int = self.floor();
        let frac = self.sub_rational(&Rational::from_integer(int.clone()));
        let scaled = frac.mul_integer(&(BigInt::one() << 60)).floor();
        int.to_f64().unwrap_or(f64::NAN) + scaled.to_f64().unwrap_or(0.0) / (1u64 << 60) as f64
    }

    /// Decimal rendering rounded to `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.is_zero() {
            return "0".to_string();
        }
        let mag = self.abs();
        let ten = Rational::from_integer(BigInt::from(10));
        let half = Rational::new(BigInt::one(), BigInt::from(2));
        let scaled = |k: i64| mag.mul_rational(&ten.pow(k as i32));
        // k = number of decimal places kept
        let int_len = mag.floor().to_string().len() as i64;
        let mut k = if mag.floor().is_zero() {
            let mut k = digits as i64;
            while scaled(k).floor().to_string().len() < digits {
                k += 1;
            }
            k
        } else {
            digits as i64 - int_len
        };
        let mut text = scaled(k).add_rational(&half).floor().to_string();
        if text.len() > digits {
            // rounding carried into a new leading digit
            k -= 1;
            text = scaled(k).add_rational(&half).floor().to_string();
        }
        let sign = if self.is_negative() { "-" } else { "" };
        if k <= 0 {
            return format!("{sign}{text}{}", "0".repeat((-k) as usize));
        }
        let k = k as usize;
        if text.len() <= k {
            format!("{sign}0.{}{text}", "0".repeat(k - text.len()))
        } else {
            let (int, frac) = text.split_at(text.len() - k);
            format!("{sign}{int}.{frac}")
        }
    }
}

fn split_square(d: u64) -> (u64, u64) {
    if d < 4 {
        return (1, d);
    }
    let mut square = 1u64;
    let mut free = 1u64;
    let mut rest = d;
    let mut k = 2u64;
    while k.saturating_mul(k) <= rest {
        let mut e = 0;
        while rest.is_multiple_of(k) {
            rest /= k;
            e += 1;
        }
        square *= k.pow(e / 2);
        if e % 2 == 1 {
            free *= k;
        }
        k += 1;
    }
    (square, free * rest)
}

/// floor(b * sqrt d) for squarefree d > 1 or b = 0.
fn floor_surd(b: &BigInt, d: u64) -> BigInt {
    if b.is_zero() || d == 0 {
        return BigInt::zero();
    }
    let root = (b * b * BigInt::from(d)).sqrt();
    if b.is_positive() {
        root
    } else {
        // b^2 d is never a perfect square here
        -root - 1
    }
}

fn surd_sign(a: &BigInt, b: &BigInt, d: u64) -> Ordering {
    let sa = a.sign();
    let sb = if d == 0 { Sign::NoSign } else { b.sign() };
    let to_ord = |s: Sign| match s {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    };
    match (sa, sb) {
        (s, Sign::NoSign) | (Sign::NoSign, s) => to_ord(s),
        (x, y) if x == y => to_ord(x),
        _ => {
            // opposite signs: the larger square wins
            let lhs = a * a;
            let rhs = b * b * BigInt::from(d);
            if lhs > rhs {
                to_ord(sa)
            } else {
                to_ord(sb)
            }
        }
    }
}

impl PartialOrd for ExactReal {
    /// `None` when the two values live in different quadratic fields.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.cmp_exact(other).ok()
    }
}

impl Neg for &ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal { a: -&self.a, b: -&self.b, c: self.c.clone(), d: self.d }
    }
}

impl Neg for ExactReal {
    type Output = ExactReal;
    fn neg(self) -> ExactReal {
        ExactReal { a: -self.a, b: -self.b, c: self.c, d: self.d }
    }
}

// Operator forms panic on mixed fields; callers validate fields at the boundary
// (AdeleVector construction) and use the checked_* forms otherwise.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&ExactReal> for &ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &ExactReal) -> ExactReal {
                self.$checked(rhs).expect("quadratic field mismatch")
            }
        }
        impl $tr<ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: ExactReal) -> ExactReal {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&ExactReal> for ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: &ExactReal) -> ExactReal {
                (&self).$method(rhs)
            }
        }
        impl $tr<ExactReal> for &ExactReal {
            type Output = ExactReal;
            fn $method(self, rhs: ExactReal) -> ExactReal {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl From<Rational> for ExactReal {
    fn from(r: Rational) -> Self {
        ExactReal::from_rational(&r)
    }
}

impl From<i64> for ExactReal {
    fn from(n: i64) -> Self {
        ExactReal::from_integer(BigInt::from(n))
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, r: &Rational) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for ExactReal {
    /// Renders e.g. `5/4 − (1/2)√2`, `5/2 − √2`, `−√3`, `7/3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rat = self.rational_part();
        if self.is_rational() {
            if rat.is_negative() {
                f.write_str("−")?;
            }
            return write_rational(f, &rat.abs());
        }
        let coef = self.surd_coefficient();
        let lead = !rat.is_zero();
        if lead {
            if rat.is_negative() {
                f.write_str("−")?;
            }
            write_rational(f, &rat.abs())?;
            f.write_str(if coef.is_negative() { " − " } else { " + " })?;
        } else if coef.is_negative() {
            f.write_str("−")?;
        }
        let mag = coef.abs();
        if !mag.is_one() {
            if mag.is_integer() {
                write!(f, "{}", mag.numer())?;
            } else {
                write!(f, "({}/{})", mag.numer(), mag.denom())?;
            }
        }
        write!(f, "√{}", self.d)
    }
}

fn parse_plain_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational '{s}'"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rational::new(n, d))
}

/// Parses `num/den`, `num`, with ASCII or Unicode minus.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim().replace('−', "-");
    parse_plain_rational(&t)
}

impl FromStr for ExactReal {
    type Err = Error;

    /// Accepts the `Display` form (and ASCII `-`, `sqrt`) back.
    fn from_str(s: &str) -> Result<Self> {
        let text: String = s.replace('−', "-").replace("sqrt", "√").split_whitespace().collect();
        let bad = || Error::Parse(format!("bad quadratic irrational '{s}'"));
        let Some(root_at) = text.find('√') else {
            return Ok(ExactReal::from_rational(&parse_plain_rational(&text)?));
        };
        let d: u64 = text[root_at + '√'.len_utf8()..].parse().map_err(|_| bad())?;
        let head = &text[..root_at];
        // split head into "rational" and "+/- coefficient" at the last sign not at position 0
        let split = head
            .char_indices()
            .filter(|&(i, ch)| i > 0 && (ch == '+' || ch == '-'))
            .map(|(i, _)| i)
            .next_back();
        let (rat_text, coef_text) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None => ("0", head),
        };
        let (negative, body) = match coef_text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, coef_text.strip_prefix('+').unwrap_or(coef_text)),
        };
        let body = body.trim_start_matches('(').trim_end_matches(')');
        let mut coef = if body.is_empty() { Rational::one() } else { parse_plain_rational(body)? };
        if negative {
            coef = -coef;
        }
        let rat = parse_plain_rational(rat_text)?;
        let surd = ExactReal::sqrt(d).mul_rational(&coef);
        Ok(surd.add_rational(&rat))
    }
}

//! Exact rationals and the diagonal value `d`, stored through `d²`.
//!
//! `d` is frequently a surd such as `1/(2√2)`, while `d²` is always rational
//! for every diagonal that arises here. All exact comparisons of diagonals
//! therefore go through [`DiagonalValue::d_squared`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{CircError, Result};
use crate::scalar::Real;

/// Arbitrary-precision rational in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(CircError::domain("zero denominator"));
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn integer(value: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(value.into()))
    }

    /// `numer/denom` for small compile-time style constants.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        Rational::new(numer, denom).expect("non-zero denominator")
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The integer value, when this rational is one.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.numer().clone())
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|v| v.to_i64())
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn square(&self) -> Self {
        Rational(&self.0 * &self.0)
    }

    pub fn inner(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for Rational {
    fn from(value: i64) -> Self {
        Rational::integer(value)
    }
}

impl From<BigRational> for Rational {
    fn from(value: BigRational) -> Self {
        Rational(value)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = CircError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || CircError::domain(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                Rational::new(p, q)
            }
            None => Ok(Rational::integer(s.parse::<BigInt>().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn exact_isqrt(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

/// Non-negative rational square root of `q`, when both numerator and
/// denominator are perfect squares.
pub fn is_perfect_square(q: &Rational) -> Result<Option<Rational>> {
    if q.is_negative() {
        return Err(CircError::domain(format!("negative argument {q}")));
    }
    let num = exact_isqrt(q.numer());
    let den = exact_isqrt(q.denom());
    Ok(match (num, den) {
        (Some(p), Some(r)) => Some(Rational::new(p, r)?),
        _ => None,
    })
}

/// Splits `v > 0` into `s²·r` with `r` squarefree, by trial division.
/// Returns `None` when `v` does not fit the trial-division budget.
fn square_part(v: &BigInt) -> Option<(BigInt, BigInt)> {
    let mut rest = v.to_u128()?;
    if rest == 0 {
        return None;
    }
    let mut s: u128 = 1;
    let mut r: u128 = 1;
    let mut p: u128 = 2;
    while p * p <= rest {
        if p > 10_000_000 {
            return None;
        }
        let mut e = 0;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= p;
        }
        if e % 2 == 1 {
            r *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    r *= rest;
    Some((BigInt::from(s), BigInt::from(r)))
}

/// The diagonal value `d ≥ 0`, represented exactly through `d²`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiagonalValue {
    d_squared: Rational,
    exact: Option<Rational>,
}

impl DiagonalValue {
    pub fn from_squared(d_squared: Rational) -> Result<Self> {
        let exact = is_perfect_square(&d_squared)?;
        Ok(DiagonalValue { d_squared, exact })
    }

    /// A rational diagonal `d ≥ 0`.
    pub fn from_rational(d: Rational) -> Result<Self> {
        if d.is_negative() {
            return Err(CircError::domain(format!("negative diagonal {d}")));
        }
        Ok(DiagonalValue {
            d_squared: d.square(),
            exact: Some(d),
        })
    }

    pub fn integer(d: u64) -> Self {
        DiagonalValue::from_rational(Rational::integer(d)).expect("non-negative")
    }

    pub fn d_squared(&self) -> &Rational {
        &self.d_squared
    }

    /// `d` itself when it is rational.
    pub fn exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn is_rational(&self) -> bool {
        self.exact.is_some()
    }

    /// `d` as a non-negative integer, when it is one.
    pub fn as_integer(&self) -> Option<BigInt> {
        self.exact.as_ref().and_then(Rational::to_integer)
    }

    /// `√(d²)` in floating point.
    pub fn approx(&self) -> f64 {
        match &self.exact {
            Some(d) => d.to_f64(),
            None => self.d_squared.to_f64().sqrt(),
        }
    }

    pub fn approx_as<T: Real>(&self) -> T {
        T::of(self.approx())
    }

    /// `d² + n − 1`, the common squared row norm of a matching matrix.
    pub fn row_norm_squared(&self, n: usize) -> Rational {
        &self.d_squared + &Rational::integer(n as i64 - 1)
    }

    /// Human-readable exact form: `p/q` for rational `d`, otherwise a surd
    /// like `1/(2√2)` or `√13/2`.
    pub fn surd_display(&self) -> String {
        if let Some(d) = &self.exact {
            return d.to_string();
        }
        let (a, b) = (self.d_squared.numer(), self.d_squared.denom());
        let (Some((s, u)), Some((t, r))) = (square_part(a), square_part(b)) else {
            return format!("√({})", self.d_squared);
        };
        if u.is_one() {
            // s / (t √r)
            if t.is_one() {
                format!("{s}/√{r}")
            } else {
                format!("{s}/({t}√{r})")
            }
        } else {
            // s√u / (t√r) = s√(ur) / (t r)
            let radicand = &u * &r;
            let coeff = Rational::new(s, &t * &r).expect("non-zero");
            let num = if coeff.numer().is_one() {
                format!("√{radicand}")
            } else {
                format!("{}√{radicand}", coeff.numer())
            };
            if coeff.denom().is_one() {
                num
            } else {
                format!("{num}/{}", coeff.denom())
            }
        }
    }

    /// Parses an exact expression for `d`: integers, decimals, `p/q`,
    /// surds written with `√r`, `sqrt(r)` or `\sqrt{r}`, products,
    /// quotients, parentheses and `\frac{a}{b}`.
    pub fn parse_expr(text: &str) -> Result<Self> {
        let value = SurdParser::new(text).parse_all()?;
        if value.negative && !value.square.is_zero() {
            return Err(CircError::domain(format!("negative diagonal {text:?}")));
        }
        DiagonalValue::from_squared(value.square)
    }
}

impl fmt::Display for DiagonalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.surd_display())
    }
}

impl fmt::Debug for DiagonalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiagonalValue(d² = {})", self.d_squared)
    }
}

impl PartialOrd for DiagonalValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DiagonalValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.d_squared.cmp(&other.d_squared)
    }
}

#[derive(Serialize, Deserialize)]
struct DiagonalWire {
    d_squared: Rational,
    d_exact: Option<Rational>,
}

impl Serialize for DiagonalValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DiagonalWire {
            d_squared: self.d_squared.clone(),
            d_exact: self.exact.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DiagonalValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = DiagonalWire::deserialize(deserializer)?;
        let value =
            DiagonalValue::from_squared(wire.d_squared).map_err(serde::de::Error::custom)?;
        if wire.d_exact.as_ref() != value.exact() {
            return Err(serde::de::Error::custom("d_exact disagrees with d_squared"));
        }
        Ok(value)
    }
}

/// `±√square`, the value domain of the expression parser.
#[derive(Clone, Debug)]
struct Signed2 {
    negative: bool,
    square: Rational,
}

impl Signed2 {
    fn rational(r: Rational) -> Self {
        Signed2 {
            negative: r.is_negative(),
            square: r.square(),
        }
    }

    fn mul(self, rhs: Signed2) -> Signed2 {
        Signed2 {
            negative: self.negative != rhs.negative,
            square: self.square * rhs.square,
        }
    }

    fn div(self, rhs: Signed2) -> Result<Signed2> {
        if rhs.square.is_zero() {
            return Err(CircError::domain("division by zero"));
        }
        Ok(Signed2 {
            negative: self.negative != rhs.negative,
            square: self.square / rhs.square,
        })
    }
}

struct SurdParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> SurdParser<'a> {
    fn new(src: &'a str) -> Self {
        SurdParser { src, pos: 0 }
    }

    fn err(&self, msg: &str) -> CircError {
        CircError::domain(format!("{msg} at offset {} in {:?}", self.pos, self.src))
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn parse_all(mut self) -> Result<Signed2> {
        let v = self.expr()?;
        self.skip_ws();
        if !self.rest().is_empty() {
            return Err(self.err("trailing input"));
        }
        Ok(v)
    }

    // expr := unary (('*' | '/' | juxtaposition) unary)*
    fn expr(&mut self) -> Result<Signed2> {
        let mut acc = self.unary()?;
        loop {
            if self.eat("*") || self.eat("·") {
                acc = acc.mul(self.unary()?);
            } else if self.eat("/") {
                acc = acc.div(self.unary()?)?;
            } else if self.starts_factor() {
                acc = acc.mul(self.unary()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_factor(&mut self) -> bool {
        self.skip_ws();
        let r = self.rest();
        r.starts_with('(')
            || r.starts_with('√')
            || r.starts_with("sqrt")
            || r.starts_with("\\sqrt")
            || r.starts_with("\\frac")
            || r.starts_with('{')
            || r.chars().next().is_some_and(|c| c.is_ascii_digit())
    }

    fn unary(&mut self) -> Result<Signed2> {
        if self.eat("-") || self.eat("−") {
            let mut v = self.unary()?;
            v.negative = !v.negative;
            Ok(v)
        } else if self.eat("+") {
            self.unary()
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Signed2> {
        if self.eat("(") {
            let v = self.expr()?;
            if !self.eat(")") {
                return Err(self.err("expected ')'"));
            }
            return Ok(v);
        }
        if self.eat("{") {
            let v = self.expr()?;
            if !self.eat("}") {
                return Err(self.err("expected '}'"));
            }
            return Ok(v);
        }
        if self.eat("\\frac") {
            let num = self.atom()?;
            let den = self.atom()?;
            return num.div(den);
        }
        if self.eat("√") || self.eat("\\sqrt") || self.eat("sqrt") {
            let inner = self.atom()?;
            if inner.negative && !inner.square.is_zero() {
                return Err(self.err("square root of a negative value"));
            }
            // √(±√q) only makes sense for rational radicands.
            let radicand =
                is_perfect_square(&inner.square)?.ok_or_else(|| self.err("nested surd"))?;
            return Ok(Signed2 {
                negative: false,
                square: radicand,
            });
        }
        self.number()
    }

    fn number(&mut self) -> Result<Signed2> {
        self.skip_ws();
        let r = self.rest();
        let len = r
            .char_indices()
            .take_while(|(_, c)| c.is_ascii_digit() || *c == '.')
            .map(|(i, c)| i + c.len_utf8())
            .last()
            .unwrap_or(0);
        if len == 0 {
            return Err(self.err("expected a number"));
        }
        let text = &r[..len];
        self.pos += len;
        let value = match text.split_once('.') {
            None => Rational::integer(
                text.parse::<BigInt>()
                    .map_err(|_| self.err("bad integer"))?,
            ),
            Some((int, frac)) => {
                let digits = format!("{int}{frac}");
                let num: BigInt = digits.parse().map_err(|_| self.err("bad decimal"))?;
                let den = BigInt::from(10u32).pow(frac.len() as u32);
                Rational::new(num, den)?
            }
        };
        Ok(Signed2::rational(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn perfect_squares() {
        assert_eq!(is_perfect_square(&q("25/4")).unwrap(), Some(q("5/2")));
        assert_eq!(is_perfect_square(&q("1/8")).unwrap(), None);
        assert_eq!(is_perfect_square(&q("0")).unwrap(), Some(q("0")));
        assert!(matches!(
            is_perfect_square(&q("-1/4")),
            Err(CircError::Domain(_))
        ));
    }

    #[test]
    fn rational_is_normalised() {
        let r = Rational::new(-6, -4).unwrap();
        assert_eq!(r.to_string(), "3/2");
        let r = Rational::new(6, -4).unwrap();
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert!(Rational::new(1, 0).is_err());
    }

    #[test]
    fn approx_values() {
        let eps = f64::EPSILON;
        let d = DiagonalValue::from_squared(q("1/8")).unwrap();
        let expect = 1.0 / (2.0 * 2f64.sqrt());
        assert!((d.approx() - expect).abs() <= 4.0 * eps * expect);
        let d = DiagonalValue::from_squared(q("25/4")).unwrap();
        assert_eq!(d.approx(), 2.5);
        let d = DiagonalValue::from_squared(q("121/16")).unwrap();
        assert_eq!(d.approx(), 2.75);
        assert_eq!(d.exact(), Some(&q("11/4")));
    }

    #[test]
    fn surd_rendering() {
        let show = |s: &str| DiagonalValue::from_squared(q(s)).unwrap().surd_display();
        assert_eq!(show("1/8"), "1/(2√2)");
        assert_eq!(show("25/12"), "5/(2√3)");
        assert_eq!(show("1/20"), "1/(2√5)");
        assert_eq!(show("13/4"), "√13/2");
        assert_eq!(show("6"), "√6");
        assert_eq!(show("27/20"), "3√15/10");
        assert_eq!(show("1/3"), "1/√3");
        assert_eq!(show("121/16"), "11/4");
    }

    #[test]
    fn surd_parsing() {
        let sq = |s: &str| {
            DiagonalValue::parse_expr(s)
                .unwrap()
                .d_squared()
                .to_string()
        };
        assert_eq!(sq("1/(2√2)"), "1/8");
        assert_eq!(sq("5/(2√3)"), "25/12");
        assert_eq!(sq("1/(2*sqrt(5))"), "1/20");
        assert_eq!(sq("\\frac{1}{2\\sqrt{2}}"), "1/8");
        assert_eq!(sq("\\frac{11}{4}"), "121/16");
        assert_eq!(sq("11/4"), "121/16");
        assert_eq!(sq("√13/2"), "13/4");
        assert_eq!(sq("0.25"), "1/16");
        assert_eq!(sq("7"), "49");
        assert!(DiagonalValue::parse_expr("-1/2").is_err());
        assert!(DiagonalValue::parse_expr("1/(2√2").is_err());
        assert!(DiagonalValue::parse_expr("abc").is_err());
    }

    #[test]
    fn diagonal_wire_format() {
        let d = DiagonalValue::from_squared(q("1/8")).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"d_squared":"1/8","d_exact":null}"#);
        let d = DiagonalValue::from_squared(q("25/4")).unwrap();
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(json, r#"{"d_squared":"25/4","d_exact":"5/2"}"#);
        let back: DiagonalValue = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert!(
            serde_json::from_str::<DiagonalValue>(r#"{"d_squared":"2","d_exact":"1"}"#).is_err()
        );
        assert_eq!(
            serde_json::to_string(&Rational::integer(3)).unwrap(),
            "\"3\""
        );
    }

    proptest! {
        #[test]
        fn addition_is_exact(a in -10_000i64..10_000, b in 1i64..10_000, c in -10_000i64..10_000, e in 1i64..10_000) {
            let x = Rational::new(a, b).unwrap();
            let y = Rational::new(c, e).unwrap();
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            let g = x.numer().magnitude().to_u64().unwrap().gcd(&x.denom().to_u64().unwrap());
            prop_assert!(g == 1 || x.is_zero());
            prop_assert!(x.denom() > &BigInt::zero());
        }

        #[test]
        fn approx_squares_back(num in 0u64..1_000_000, den in 1u64..1000) {
            let d2 = Rational::new(num, den).unwrap();
            let d = DiagonalValue::from_squared(d2.clone()).unwrap();
            let a = d.approx();
            let target = d2.to_f64();
            if target > 0.0 {
                prop_assert!(((a * a - target) / target).abs() <= 1e-12);
            } else {
                prop_assert_eq!(a, 0.0);
            }
        }

        #[test]
        fn surd_display_round_trips(num in 0u64..5000, den in 1u64..5000) {
            let d = DiagonalValue::from_squared(Rational::new(num, den).unwrap()).unwrap();
            let parsed = DiagonalValue::parse_expr(&d.surd_display()).unwrap();
            prop_assert_eq!(parsed, d);
        }
    }
}

//! Exact scalars: rationals, polynomials in the weight λ, and Koszul signs.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Homological degree.
pub type Degree = i32;

/// An exact rational number, always in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num/den`; panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
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

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Rational::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Reciprocal of `n!`.
    pub fn inv_factorial(n: usize) -> Self {
        let mut f = BigInt::one();
        for k in 2..=n {
            f *= BigInt::from(k);
        }
        Rational(BigRational::new(BigInt::one(), f))
    }

    /// Parses `int ('/' uint)?`.
    pub fn parse(s: &str) -> Result<Self> {
        let err = |m: &str| Error::Parse { what: "rational", msg: m.to_string() + ": " + s };
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (s, None),
        };
        let num: BigInt = parse_int(n).ok_or_else(|| err("bad numerator"))?;
        let den: BigInt = match d {
            Some(d) if d.starts_with(['+', '-']) => return Err(err("signed denominator")),
            Some(d) => parse_int(d).ok_or_else(|| err("bad denominator"))?,
            None => BigInt::one(),
        };
        if den.is_zero() {
            return Err(err("zero denominator"));
        }
        Ok(Rational(BigRational::new(num, den)))
    }

    /// Content-free integer vector from a rational row: multiplies by the lcm
    /// of denominators. Used by fraction-free elimination.
    pub fn clear_denominators(row: &[Rational]) -> Vec<BigInt> {
        let mut l = BigInt::one();
        for x in row {
            l = l.lcm(x.denom());
        }
        row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut v = BigInt::zero();
    for b in body.bytes() {
        v = v * 10u32 + BigInt::from(b - b'0');
    }
    Some(if s.starts_with('-') { -v } else { v })
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

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, o: &Rational) -> Rational {
        Rational(&self.0 + &o.0)
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, o: &Rational) -> Rational {
        Rational(&self.0 - &o.0)
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, o: &Rational) -> Rational {
        Rational(&self.0 * &o.0)
    }
}

impl core::ops::Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, o: &Rational) -> Rational {
        Rational(&self.0 / &o.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, o: &Rational) {
        self.0 += &o.0;
    }
}

/// A sign `±1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    /// `(-1)^e`.
    pub fn pow(e: i64) -> Sign {
        if e.rem_euclid(2) == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, o: Sign) -> Sign {
        if self == o {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self * Sign::Minus
    }
}

fn check_perm(n: usize, sigma: &[usize]) -> Result<()> {
    if sigma.len() != n {
        return Err(Error::SizeMismatch { expected: n, found: sigma.len() });
    }
    let mut seen = alloc::vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(Error::NotAPermutation);
        }
        seen[s] = true;
    }
    Ok(())
}

/// Koszul sign of reordering `x_0 ⊗ … ⊗ x_{n-1}` into `x_{σ[0]} ⊗ … ⊗ x_{σ[n-1]}`.
/// Every pair of factors whose relative order flips contributes `(-1)^{|x_a||x_b|}`.
pub fn koszul_sign(degrees: &[Degree], sigma: &[usize]) -> Result<Sign> {
    check_perm(degrees.len(), sigma)?;
    Ok(koszul_sign_unchecked(degrees, sigma))
}

pub(crate) fn koszul_sign_unchecked(degrees: &[Degree], sigma: &[usize]) -> Sign {
    let mut odd = false;
    for a in 0..sigma.len() {
        if degrees[sigma[a]] & 1 == 0 {
            continue;
        }
        for b in a + 1..sigma.len() {
            if sigma[a] > sigma[b] && degrees[sigma[b]] & 1 != 0 {
                odd = !odd;
            }
        }
    }
    if odd {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// Signature of a permutation.
pub fn signature(sigma: &[usize]) -> Sign {
    let mut odd = false;
    for a in 0..sigma.len() {
        for b in a + 1..sigma.len() {
            if sigma[a] > sigma[b] {
                odd = !odd;
            }
        }
    }
    if odd {
        Sign::Minus
    } else {
        Sign::Plus
    }
}

/// `χ(σ) = sgn(σ)·ε(σ)`.
pub fn chi_sign(degrees: &[Degree], sigma: &[usize]) -> Result<Sign> {
    Ok(signature(sigma) * koszul_sign(degrees, sigma)?)
}

/// Element of ℚ[λ]: sorted `(power, coefficient)` pairs with no zero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Coefficient {
    terms: Vec<(u32, Rational)>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Coefficient::constant(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Coefficient::constant(Rational::from_int(n))
    }

    pub fn constant(r: Rational) -> Self {
        Coefficient::monomial(r, 0)
    }

    /// `r·λ^k`.
    pub fn monomial(r: Rational, k: u32) -> Self {
        if r.is_zero() {
            Coefficient::zero()
        } else {
            Coefficient { terms: alloc::vec![(k, r)] }
        }
    }

    /// `λ^k`.
    pub fn lambda_pow(k: u32) -> Self {
        Coefficient::monomial(Rational::one(), k)
    }

    pub fn sign(s: Sign) -> Self {
        Coefficient::from_int(s.to_i64())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// `(power, coefficient)` pairs in increasing power.
    pub fn terms(&self) -> &[(u32, Rational)] {
        &self.terms
    }

    pub fn from_terms(pairs: impl IntoIterator<Item = (u32, Rational)>) -> Self {
        let mut c = Coefficient::zero();
        for (k, r) in pairs {
            c.add_monomial(k, &r);
        }
        c
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(0, r)] => Some(r.clone()),
            _ => None,
        }
    }

    fn add_monomial(&mut self, k: u32, r: &Rational) {
        if r.is_zero() {
            return;
        }
        match self.terms.binary_search_by_key(&k, |t| t.0) {
            Ok(i) => {
                self.terms[i].1 += r;
                if self.terms[i].1.is_zero() {
                    self.terms.remove(i);
                }
            }
            Err(i) => self.terms.insert(i, (k, r.clone())),
        }
    }

    pub fn add_assign_ref(&mut self, o: &Coefficient) {
        if self.terms.is_empty() {
            self.terms.clone_from(&o.terms);
            return;
        }
        for (k, r) in &o.terms {
            self.add_monomial(*k, r);
        }
    }

    /// `self += a·b` without building the product separately.
    pub fn add_product(&mut self, a: &Coefficient, b: &Coefficient) {
        for (ka, ra) in &a.terms {
            for (kb, rb) in &b.terms {
                self.add_monomial(ka + kb, &(ra * rb));
            }
        }
    }

    pub fn scale(&self, r: &Rational) -> Coefficient {
        if r.is_zero() {
            return Coefficient::zero();
        }
        Coefficient { terms: self.terms.iter().map(|(k, x)| (*k, x * r)).collect() }
    }

    pub fn apply_sign(&self, s: Sign) -> Coefficient {
        match s {
            Sign::Plus => self.clone(),
            Sign::Minus => -self,
        }
    }

    /// Evaluates at `λ = lam`.
    pub fn specialize(&self, lam: &Rational) -> Rational {
        let mut total = Rational::zero();
        for (k, r) in &self.terms {
            total += &(r * &lam.pow(*k));
        }
        total
    }

    /// Parses the text grammar, e.g. `3/2*L^2 - 1`, `L`, `-2`.
    pub fn parse(s: &str) -> Result<Self> {
        CoeffParser { s: s.as_bytes(), pos: 0, src: s }.parse()
    }
}

struct CoeffParser<'a> {
    s: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl CoeffParser<'_> {
    fn err(&self, m: &str) -> Error {
        Error::Parse { what: "coefficient", msg: alloc::format!("{m} at byte {} in {:?}", self.pos, self.src) }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<alloc::string::String> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.src[start..self.pos].to_string())
    }

    fn power(&mut self) -> Result<u32> {
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let Some(d) = self.digits() else { return Err(self.err("expected exponent")) };
            d.parse::<u32>().map_err(|_| self.err("exponent too large"))
        } else {
            Ok(1)
        }
    }

    fn term(&mut self, negate: bool) -> Result<(u32, Rational)> {
        let mut neg = negate;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            neg = !neg;
        }
        let (k, r) = if self.peek() == Some(b'L') {
            self.pos += 1;
            (self.power()?, Rational::one())
        } else {
            let Some(mut txt) = self.digits() else { return Err(self.err("expected number or L")) };
            if self.peek() == Some(b'/') {
                self.pos += 1;
                let Some(d) = self.digits() else { return Err(self.err("expected denominator")) };
                txt.push('/');
                txt.push_str(&d);
            }
            let r = Rational::parse(&txt).map_err(|_| self.err("bad rational"))?;
            if self.peek() == Some(b'*') {
                self.pos += 1;
                if self.peek() != Some(b'L') {
                    return Err(self.err("expected L after *"));
                }
                self.pos += 1;
                (self.power()?, r)
            } else {
                (0, r)
            }
        };
        Ok((k, if neg { -r } else { r }))
    }

    fn parse(mut self) -> Result<Coefficient> {
        let mut c = Coefficient::zero();
        let (k, r) = self.term(false)?;
        c.add_monomial(k, &r);
        loop {
            match self.peek() {
                None => return Ok(c),
                Some(b'+') => {
                    self.pos += 1;
                    let (k, r) = self.term(false)?;
                    c.add_monomial(k, &r);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let (k, r) = self.term(true)?;
                    c.add_monomial(k, &r);
                }
                Some(_) => return Err(self.err("unexpected character")),
            }
        }
    }
}

impl fmt::Display for Coefficient {
    /// Highest power first; every rendering parses back to the same value.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (k, r)) in self.terms.iter().rev().enumerate() {
            let shown = if idx == 0 {
                r.clone()
            } else {
                f.write_str(if r.is_negative() { " - " } else { " + " })?;
                r.abs()
            };
            match (*k, idx == 0) {
                (0, _) => write!(f, "{shown}")?,
                (_, false) if shown.is_one() => f.write_str("L")?,
                (_, true) if shown.is_one() => f.write_str("L")?,
                _ => write!(f, "{shown}*L")?,
            }
            if *k > 1 {
                write!(f, "^{k}")?;
            }
        }
        Ok(())
    }
}

impl Add<&Coefficient> for &Coefficient {
    type Output = Coefficient;
    fn add(self, o: &Coefficient) -> Coefficient {
        let mut c = self.clone();
        c.add_assign_ref(o);
        c
    }
}

impl Sub<&Coefficient> for &Coefficient {
    type Output = Coefficient;
    fn sub(self, o: &Coefficient) -> Coefficient {
        let mut c = self.clone();
        c.add_assign_ref(&-o);
        c
    }
}

impl Mul<&Coefficient> for &Coefficient {
    type Output = Coefficient;
    fn mul(self, o: &Coefficient) -> Coefficient {
        let mut c = Coefficient::zero();
        c.add_product(self, o);
        c
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        Coefficient { terms: self.terms.iter().map(|(k, r)| (*k, -r)).collect() }
    }
}

impl Neg for Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        -&self
    }
}

impl AddAssign<&Coefficient> for Coefficient {
    fn add_assign(&mut self, o: &Coefficient) {
        self.add_assign_ref(o);
    }
}

impl PartialOrd for Coefficient {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Arbitrary but fixed total order, only used to make containers deterministic.
impl Ord for Coefficient {
    fn cmp(&self, o: &Self) -> Ordering {
        self.terms.cmp(&o.terms)
    }
}

/// How the formal weight is treated: kept as an indeterminate or fixed to a rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lambda {
    Generic,
    Fixed(Rational),
}

impl Lambda {
    /// The value of `λ^k` as a coefficient.
    pub fn pow(&self, k: u32) -> Coefficient {
        match self {
            Lambda::Generic => Coefficient::lambda_pow(k),
            Lambda::Fixed(r) => Coefficient::constant(r.pow(k)),
        }
    }

    /// Brings a coefficient into this mode (evaluates λ when fixed).
    pub fn normalize(&self, c: &Coefficient) -> Coefficient {
        match self {
            Lambda::Generic => c.clone(),
            Lambda::Fixed(r) => Coefficient::constant(c.specialize(r)),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s.trim() == "generic" {
            Ok(Lambda::Generic)
        } else {
            Rational::parse(s).map(Lambda::Fixed)
        }
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lambda::Generic => f.write_str("generic"),
            Lambda::Fixed(r) => write!(f, "{r}"),
        }
    }
}

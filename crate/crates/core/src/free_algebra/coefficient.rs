use alloc::collections::BTreeMap;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use crate::math;

/// Exact rational coefficient.
pub type Rational = Ratio<i128>;

pub fn rat(num: i128, den: i128) -> Rational {
    Ratio::new(num, den)
}

/// Coefficients that form a module over the rationals. This is all that the
/// identity check needs.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn scale(&self, q: Rational) -> Self;
    /// Absolute size as a float, used for residual reporting.
    fn magnitude(&self) -> f64;
    /// Whether the value counts as zero for identity checks. Exact types
    /// answer exactly; floats use a relative tolerance against `scale`.
    fn negligible(&self, scale: f64) -> bool {
        let _ = scale;
        self.is_zero()
    }
}

/// Scalars with a ring structure, needed for polynomial products.
pub trait Coefficient: Scalar + Mul<Output = Self> {
    fn one() -> Self;
}

fn ratio_to_f64(q: &Rational) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

impl Scalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn scale(&self, q: Rational) -> Self {
        *self * q
    }
    fn magnitude(&self) -> f64 {
        ratio_to_f64(&self.abs())
    }
}

impl Coefficient for Rational {
    fn one() -> Self {
        One::one()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn scale(&self, q: Rational) -> Self {
        self * ratio_to_f64(&q)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn negligible(&self, scale: f64) -> bool {
        self.abs() <= 1e-12 * scale.max(1.0)
    }
}

impl Coefficient for f64 {
    fn one() -> Self {
        1.0
    }
}

/// Element `a + b√2` of the field Q(√2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QSqrt2 {
    pub a: Rational,
    pub b: Rational,
}

impl QSqrt2 {
    pub fn new(a: Rational, b: Rational) -> Self {
        QSqrt2 { a, b }
    }
    pub fn rational(a: Rational) -> Self {
        QSqrt2 { a, b: Zero::zero() }
    }
    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.a) + ratio_to_f64(&self.b) * math::SQRT_2
    }
}

impl fmt::Display for QSqrt2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (Zero::is_zero(&self.a), Zero::is_zero(&self.b)) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*sqrt2", self.b),
            (false, false) => write!(f, "({} + {}*sqrt2)", self.a, self.b),
        }
    }
}

impl Add for QSqrt2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        QSqrt2::new(self.a + o.a, self.b + o.b)
    }
}
impl Sub for QSqrt2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        QSqrt2::new(self.a - o.a, self.b - o.b)
    }
}
impl Neg for QSqrt2 {
    type Output = Self;
    fn neg(self) -> Self {
        QSqrt2::new(-self.a, -self.b)
    }
}
impl Mul for QSqrt2 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = rat(2, 1);
        QSqrt2::new(self.a * o.a + two * self.b * o.b, self.a * o.b + self.b * o.a)
    }
}

impl Scalar for QSqrt2 {
    fn zero() -> Self {
        QSqrt2::rational(Zero::zero())
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(&self.a) && Zero::is_zero(&self.b)
    }
    fn scale(&self, q: Rational) -> Self {
        QSqrt2::new(self.a * q, self.b * q)
    }
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

impl Coefficient for QSqrt2 {
    fn one() -> Self {
        QSqrt2::rational(One::one())
    }
}

/// Rational linear combination of named symbols `s_k`. Used to run the
/// identity check on inputs whose coefficients are unknown functions of
/// time such as `λ_k(t)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearForm {
    terms: BTreeMap<u32, Rational>,
}

impl LinearForm {
    pub fn symbol(k: u32) -> Self {
        Self::term(k, One::one())
    }
    pub fn term(k: u32, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !Zero::is_zero(&c) {
            terms.insert(k, c);
        }
        LinearForm { terms }
    }
    pub fn coefficient(&self, k: u32) -> Rational {
        self.terms.get(&k).copied().unwrap_or_else(Zero::zero)
    }
    pub fn symbols(&self) -> impl Iterator<Item = (&u32, &Rational)> {
        self.terms.iter()
    }
    fn combine(mut self, o: &Self, sign: i128) -> Self {
        for (k, c) in &o.terms {
            let e = self.terms.entry(*k).or_insert_with(Zero::zero);
            *e += *c * rat(sign, 1);
        }
        self.terms.retain(|_, c| !Zero::is_zero(c));
        self
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        write!(f, "(")?;
        for (n, (k, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*s{}", c, k)?;
        }
        write!(f, ")")
    }
}

impl Add for LinearForm {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.combine(&o, 1)
    }
}
impl Sub for LinearForm {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.combine(&o, -1)
    }
}
impl Neg for LinearForm {
    type Output = Self;
    fn neg(self) -> Self {
        LinearForm::default().combine(&self, -1)
    }
}

impl Scalar for LinearForm {
    fn zero() -> Self {
        LinearForm::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn scale(&self, q: Rational) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= q;
        }
        out.terms.retain(|_, c| !Zero::is_zero(c));
        out
    }
    fn magnitude(&self) -> f64 {
        self.terms.values().map(|c| ratio_to_f64(&c.abs())).fold(0.0, f64::max)
    }
}

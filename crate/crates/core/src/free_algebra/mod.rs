//! Multi-indices, noncommutative polynomials over the letters `X_1..X_m`,
//! right-nested Lie brackets and the identity that turns a Lie-valued
//! polynomial input into bracket form.

mod coefficient;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

pub use coefficient::{rat, Coefficient, LinearForm, QSqrt2, Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("alphabet size mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("multi-index must not be empty")]
    EmptyMultiIndex,
    #[error("letter {letter} outside alphabet 1..={m}")]
    LetterOutOfRange { letter: usize, m: usize },
    #[error("alphabet size must be positive")]
    EmptyAlphabet,
    #[error("coefficient at {index} violates the support bound 0 < |I| <= {r}")]
    Support { index: MultiIndex, r: usize },
}

/// A word `I = (i_1, …, i_ℓ)` over the alphabet `{1..m}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    m: usize,
    letters: Vec<usize>,
}

impl MultiIndex {
    pub fn new(m: usize, letters: impl Into<Vec<usize>>) -> Result<Self, AlgebraError> {
        if m == 0 {
            return Err(AlgebraError::EmptyAlphabet);
        }
        let letters = letters.into();
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l > m) {
            return Err(AlgebraError::LetterOutOfRange { letter: bad, m });
        }
        Ok(MultiIndex { m, letters })
    }

    pub fn empty(m: usize) -> Self {
        MultiIndex { m, letters: Vec::new() }
    }

    pub fn letter(m: usize, i: usize) -> Result<Self, AlgebraError> {
        Self::new(m, [i])
    }

    pub fn alphabet(&self) -> usize {
        self.m
    }
    pub fn letters(&self) -> &[usize] {
        &self.letters
    }
    pub fn len(&self) -> usize {
        self.letters.len()
    }
    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// First letter and the remaining word, `I = (i, J)`.
    pub fn split_first(&self) -> Option<(usize, MultiIndex)> {
        let (&i, rest) = self.letters.split_first()?;
        Some((i, MultiIndex { m: self.m, letters: rest.to_vec() }))
    }

    pub fn concat(&self, other: &MultiIndex) -> Result<MultiIndex, AlgebraError> {
        if self.m != other.m {
            return Err(AlgebraError::AlphabetMismatch(self.m, other.m));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(MultiIndex { m: self.m, letters })
    }

    /// Sub-word picking the given 0-based positions in order.
    pub fn select(&self, positions: &[usize]) -> MultiIndex {
        MultiIndex { m: self.m, letters: positions.iter().map(|&p| self.letters[p]).collect() }
    }

    /// All words of length `1..=r`, shortest first.
    pub fn all_up_to(m: usize, r: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut layer = alloc::vec![MultiIndex::empty(m)];
        for _ in 0..r {
            let mut next = Vec::with_capacity(layer.len() * m);
            for w in &layer {
                for i in 1..=m {
                    let mut letters = w.letters.clone();
                    letters.push(i);
                    next.push(MultiIndex { m, letters });
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
            .then_with(|| self.m.cmp(&other.m))
    }
}
impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, l) in self.letters.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", l)?;
        }
        write!(f, ")")
    }
}

/// Finite sum `Σ p_I X_I` with no zero coefficient stored.
#[derive(Clone, Debug, PartialEq)]
pub struct NcPolynomial<C> {
    m: usize,
    terms: BTreeMap<MultiIndex, C>,
}

impl<C: Scalar> NcPolynomial<C> {
    pub fn zero(m: usize) -> Self {
        NcPolynomial { m, terms: BTreeMap::new() }
    }

    pub fn monomial(index: MultiIndex, c: C) -> Self {
        let mut p = Self::zero(index.alphabet());
        p.add_term(index, c);
        p
    }

    pub fn from_terms(
        m: usize,
        terms: impl IntoIterator<Item = (MultiIndex, C)>,
    ) -> Result<Self, AlgebraError> {
        let mut p = Self::zero(m);
        for (i, c) in terms {
            if i.alphabet() != m {
                return Err(AlgebraError::AlphabetMismatch(m, i.alphabet()));
            }
            p.add_term(i, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, index: MultiIndex, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&index) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(index, s);
                }
            }
            None => {
                self.terms.insert(index, c);
            }
        }
    }

    pub fn alphabet(&self) -> usize {
        self.m
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }
    pub fn coefficient(&self, index: &MultiIndex) -> C {
        self.terms.get(index).cloned().unwrap_or_else(C::zero)
    }

    /// Whether every stored term has length `d`.
    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.terms.keys().all(|i| i.len() == d)
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.m != other.m {
            return Err(AlgebraError::AlphabetMismatch(self.m, other.m));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (i, c) in &other.terms {
            out.add_term(i.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, q: Rational) -> Self {
        let mut out = Self::zero(self.m);
        for (i, c) in &self.terms {
            out.add_term(i.clone(), c.scale(q));
        }
        out
    }

    /// Largest coefficient magnitude, zero for the zero polynomial.
    pub fn max_magnitude(&self) -> f64 {
        self.terms.values().map(Scalar::magnitude).fold(0.0, f64::max)
    }
}

impl<C: Coefficient> NcPolynomial<C> {
    pub fn one(m: usize) -> Self {
        Self::monomial(MultiIndex::empty(m), C::one())
    }

    pub fn generator(m: usize, i: usize) -> Result<Self, AlgebraError> {
        Ok(Self::monomial(MultiIndex::letter(m, i)?, C::one()))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = Self::zero(self.m);
        for (i, a) in &self.terms {
            for (j, b) in &other.terms {
                out.add_term(i.concat(j)?, a.clone() * b.clone());
            }
        }
        Ok(out)
    }

    /// Commutator `pq − qp`.
    pub fn lie_bracket(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.mul(other)?.sub(&other.mul(self)?)
    }
}

impl<C: Scalar> fmt::Display for NcPolynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (i, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*X{}", c, i)?;
        }
        Ok(())
    }
}

/// Right-nested bracket `[X_I] = [X_{i_1},[X_{i_2},…,X_{i_ℓ}]]`.
pub fn bracket_polynomial<C: Coefficient>(index: &MultiIndex) -> Result<NcPolynomial<C>, AlgebraError> {
    let m = index.alphabet();
    let letters = index.letters();
    let (&last, init) = letters.split_last().ok_or(AlgebraError::EmptyMultiIndex)?;
    let mut acc = NcPolynomial::<C>::generator(m, last)?;
    for &i in init.iter().rev() {
        acc = NcPolynomial::<C>::generator(m, i)?.lie_bracket(&acc)?;
    }
    Ok(acc)
}

/// Outcome of comparing `Σ v_I X_I` with `Σ (v_I/|I|)[X_I]`.
#[derive(Clone, Debug)]
pub struct IdentityCheck<C> {
    pub holds: bool,
    pub residual: f64,
    /// Left side minus right side.
    pub difference: NcPolynomial<C>,
}

/// Checks whether the polynomial input with coefficients `v` is Lie valued,
/// by comparing both sides of the bracket identity coefficientwise.
pub fn check_algebraic_identity<C: Scalar>(
    v: &BTreeMap<MultiIndex, C>,
    m: usize,
    r: usize,
) -> Result<IdentityCheck<C>, AlgebraError> {
    let mut lhs = NcPolynomial::<C>::zero(m);
    let mut rhs = NcPolynomial::<C>::zero(m);
    let mut scale = 0.0f64;
    for (index, c) in v {
        if index.alphabet() != m {
            return Err(AlgebraError::AlphabetMismatch(m, index.alphabet()));
        }
        if index.is_empty() || index.len() > r {
            return Err(AlgebraError::Support { index: index.clone(), r });
        }
        if c.is_zero() {
            continue;
        }
        scale = scale.max(c.magnitude());
        lhs.add_term(index.clone(), c.clone());
        let w = rat(1, index.len() as i128);
        for (j, b) in bracket_polynomial::<Rational>(index)?.terms() {
            rhs.add_term(j.clone(), c.scale(w * *b));
        }
    }
    let difference = lhs.sub(&rhs)?;
    let residual = difference.max_magnitude();
    let holds = difference.terms().all(|(_, c)| c.negligible(scale));
    Ok(IdentityCheck { holds, residual, difference })
}

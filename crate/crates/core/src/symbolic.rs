//! Polynomial expressions over prevision symbols with exact rational
//! coefficients. Tables of conditional random quantities hold these values;
//! after the product-rule substitutions they are multilinear.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{fmt_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolRole {
    /// The probability of a conditional event.
    Probability,
    /// The prevision of a compound or iterated conditional.
    Compound,
}

/// A named unknown prevision. Ordered by role, then name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub role: SymbolRole,
    pub name: String,
}

impl Symbol {
    pub fn probability(name: impl Into<String>) -> Self {
        Symbol { role: SymbolRole::Probability, name: name.into() }
    }

    pub fn compound(name: impl Into<String>) -> Self {
        Symbol { role: SymbolRole::Compound, name: name.into() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A product of symbols (with repetition), kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<Symbol>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn of(s: Symbol) -> Self {
        Monomial(vec![s])
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn factors(&self) -> &[Symbol] {
        &self.0
    }

    fn times(&self, other: &Monomial) -> Monomial {
        let mut v: Vec<Symbol> = self.0.iter().chain(&other.0).cloned().collect();
        v.sort();
        Monomial(v)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names: Vec<&str> = self.0.iter().map(|s| s.name()).collect();
        names.sort();
        f.write_str(&names.join("*"))
    }
}

/// A polynomial in prevision symbols. Zero coefficients are never stored, so
/// structural equality is semantic equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SymbolicValue {
    terms: BTreeMap<Monomial, Rational>,
}

impl SymbolicValue {
    pub fn zero() -> Self {
        SymbolicValue::default()
    }

    pub fn one() -> Self {
        SymbolicValue::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        let mut v = SymbolicValue::zero();
        v.add_term(Monomial::unit(), c);
        v
    }

    pub fn symbol(s: &Symbol) -> Self {
        let mut v = SymbolicValue::zero();
        v.add_term(Monomial::of(s.clone()), Rational::one());
        v
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::unit()).cloned(),
            _ => None,
        }
    }

    pub fn is_constant(&self, c: &Rational) -> bool {
        self.as_constant().as_ref() == Some(c)
    }

    /// True when the value is exactly the symbol `s`.
    pub fn is_symbol(&self, s: &Symbol) -> bool {
        self == &SymbolicValue::symbol(s)
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms.keys().flat_map(|m| m.0.iter().cloned()).collect()
    }

    pub fn mentions(&self, s: &Symbol) -> bool {
        self.terms.keys().any(|m| m.0.contains(s))
    }

    pub fn scale(&self, c: &Rational) -> SymbolicValue {
        let mut out = SymbolicValue::zero();
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k * c);
        }
        out
    }

    /// Replaces every occurrence of `s` by `with`.
    pub fn substitute(&self, s: &Symbol, with: &SymbolicValue) -> SymbolicValue {
        let mut out = SymbolicValue::zero();
        for (m, k) in &self.terms {
            let mut term = SymbolicValue::constant(k.clone());
            for f in &m.0 {
                term = if f == s { &term * with } else { &term * &SymbolicValue::symbol(f) };
            }
            out = out + term;
        }
        out
    }

    /// Substitutes rational values for every bound symbol; unbound symbols stay.
    pub fn bind(&self, bindings: &BTreeMap<Symbol, Rational>) -> SymbolicValue {
        let mut out = SymbolicValue::zero();
        for (m, k) in &self.terms {
            let mut coef = k.clone();
            let mut rest = Vec::new();
            for f in &m.0 {
                match bindings.get(f) {
                    Some(v) => coef *= v,
                    None => rest.push(f.clone()),
                }
            }
            out.add_term(Monomial(rest), coef);
        }
        out
    }

    /// Splits a value that is affine in `s` into `(a, b)` with value `a + b*s`.
    /// Returns `None` if `s` occurs with degree above one.
    pub fn affine_in(&self, s: &Symbol) -> Option<(SymbolicValue, SymbolicValue)> {
        let mut a = SymbolicValue::zero();
        let mut b = SymbolicValue::zero();
        for (m, k) in &self.terms {
            let count = m.0.iter().filter(|f| *f == s).count();
            match count {
                0 => a.add_term(m.clone(), k.clone()),
                1 => {
                    let rest: Vec<Symbol> = m.0.iter().filter(|f| *f != s).cloned().collect();
                    b.add_term(Monomial(rest), k.clone());
                }
                _ => return None,
            }
        }
        Some((a, b))
    }

    pub fn eval(&self, bindings: &BTreeMap<Symbol, Rational>) -> Option<Rational> {
        self.bind(bindings).as_constant()
    }
}

impl From<Rational> for SymbolicValue {
    fn from(c: Rational) -> Self {
        SymbolicValue::constant(c)
    }
}

impl From<&Symbol> for SymbolicValue {
    fn from(s: &Symbol) -> Self {
        SymbolicValue::symbol(s)
    }
}

impl Add for SymbolicValue {
    type Output = SymbolicValue;
    fn add(mut self, rhs: SymbolicValue) -> SymbolicValue {
        for (m, k) in rhs.terms {
            self.add_term(m, k);
        }
        self
    }
}

impl<'a> Add<&'a SymbolicValue> for &'a SymbolicValue {
    type Output = SymbolicValue;
    fn add(self, rhs: &SymbolicValue) -> SymbolicValue {
        self.clone() + rhs.clone()
    }
}

impl Neg for SymbolicValue {
    type Output = SymbolicValue;
    fn neg(self) -> SymbolicValue {
        self.scale(&-Rational::one())
    }
}

impl Sub for SymbolicValue {
    type Output = SymbolicValue;
    fn sub(self, rhs: SymbolicValue) -> SymbolicValue {
        self + (-rhs)
    }
}

impl<'a> Sub<&'a SymbolicValue> for &'a SymbolicValue {
    type Output = SymbolicValue;
    fn sub(self, rhs: &SymbolicValue) -> SymbolicValue {
        self.clone() - rhs.clone()
    }
}

impl<'a> Mul<&'a SymbolicValue> for &'a SymbolicValue {
    type Output = SymbolicValue;
    fn mul(self, rhs: &SymbolicValue) -> SymbolicValue {
        let mut out = SymbolicValue::zero();
        for (m1, k1) in &self.terms {
            for (m2, k2) in &rhs.terms {
                out.add_term(m1.times(m2), k1 * k2);
            }
        }
        out
    }
}

impl Mul for SymbolicValue {
    type Output = SymbolicValue;
    fn mul(self, rhs: SymbolicValue) -> SymbolicValue {
        &self * &rhs
    }
}

impl PartialOrd for SymbolicValue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Table order: constants descending, then by leading monomials.
impl Ord for SymbolicValue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self.as_constant(), other.as_constant()) {
            (Some(a), Some(b)) => b.cmp(&a),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => {
                let key = |v: &SymbolicValue| {
                    let mut ms: Vec<(Monomial, Rational)> =
                        v.terms.iter().filter(|(m, _)| m.degree() > 0).map(|(m, k)| (m.clone(), k.clone())).collect();
                    ms.sort_by(|a, b| a.0.cmp(&b.0));
                    ms
                };
                let (ka, kb) = (key(self), key(other));
                for (a, b) in ka.iter().zip(&kb) {
                    let o = a.0.cmp(&b.0).then_with(|| b.1.cmp(&a.1));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                ka.len()
                    .cmp(&kb.len())
                    .then_with(|| self.as_sorted_constant().cmp(&other.as_sorted_constant()))
            }
        }
    }
}

impl SymbolicValue {
    fn as_sorted_constant(&self) -> Rational {
        self.terms.get(&Monomial::unit()).cloned().unwrap_or_else(Rational::zero)
    }
}

/// Canonical text: constant first, then terms by degree and symbol order,
/// e.g. `x + mu - mu*x`, `1 - x`, `1/2*y`.
impl fmt::Display for SymbolicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, k)) in self.terms.iter().enumerate() {
            let neg = k.is_negative();
            let abs = k.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.degree() == 0 {
                f.write_str(&fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&abs))?;
            }
        }
        Ok(())
    }
}

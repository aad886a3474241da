use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::var::{Var, VariableTable};
use crate::scalar::{self, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeSide {
    Left,
    Right,
}

/// Sparse element of the graded supercommutative algebra on a variable table.
///
/// Polynomials do not hold a reference to their table: generators are
/// identified by level and index, so a polynomial stays valid when the table
/// is extended by later resolvent levels.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Scalar>,
}

impl Polynomial {
    pub fn zero() -> Polynomial {
        Polynomial::default()
    }

    pub fn constant(c: Scalar) -> Polynomial {
        Polynomial::term(Monomial::one(), c)
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(Scalar::one())
    }

    pub fn var(v: Var) -> Polynomial {
        Polynomial::term(Monomial::var(v), Scalar::one())
    }

    pub fn term(m: Monomial, c: Scalar) -> Polynomial {
        let mut p = Polynomial::zero();
        p.add_term(m, c);
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Polynomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d * c);
        }
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Scalar)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((m, negative)) = ma.mul(mb) {
                    let c = ca * cb;
                    out.add_term(m, if negative { -c } else { c });
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Graded derivative by `v` from the chosen side.
    pub fn partial(&self, v: Var, side: DerivativeSide) -> Polynomial {
        let left = side == DerivativeSide::Left;
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            if let Some(d) = m.derivative(v, left) {
                let c = c * scalar::int(d.factor as i64);
                out.add_term(d.rest, if d.negative { -c } else { c });
            }
        }
        out
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Parity of a homogeneous polynomial; `None` for zero or mixed parity.
    pub fn parity(&self) -> Option<bool> {
        let mut it = self.terms.keys().map(Monomial::is_odd);
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn coh_degree(&self) -> Option<i64> {
        homogeneous(self.terms.keys().map(Monomial::coh_degree))
    }

    pub fn internal_degree(&self, table: &VariableTable) -> Option<i64> {
        homogeneous(self.terms.keys().map(|m| m.internal_degree(table)))
    }

    /// Largest level of any generator occurring in the polynomial.
    pub fn max_level(&self) -> u32 {
        self.terms.keys().map(Monomial::max_level).max().unwrap_or(0)
    }

    pub fn uses_only(&self, allowed: impl Fn(Var) -> bool) -> bool {
        self.terms.keys().all(|m| m.factors().iter().all(|&(v, _)| allowed(v)))
    }

    /// Applies a substitution of generators by polynomials. Generators mapped to
    /// `None` are kept. Signs are handled by multiplying in word order.
    pub fn substitute(&self, map: impl Fn(Var) -> Option<Polynomial>) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            let mut acc = Polynomial::constant(c.clone());
            for &(v, e) in m.factors() {
                let image = map(v).unwrap_or_else(|| Polynomial::var(v));
                acc = acc.mul(&image.pow(e));
            }
            out += &acc;
        }
        out
    }

    /// Multiplies every coefficient by the common denominator and divides by the
    /// content, making the first coefficient in canonical order positive.
    pub fn primitive(&self) -> Polynomial {
        use num_integer::Integer;
        let Some((_, first)) = self.terms.iter().next() else {
            return Polynomial::zero();
        };
        let mut l = num_bigint::BigInt::one();
        for c in self.terms.values() {
            l = l.lcm(c.denom());
        }
        let mut g = num_bigint::BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(&(c.numer() * (&l / c.denom())));
        }
        let mut factor = Scalar::new(l, g);
        if first < &Scalar::zero() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    pub fn display(&self, table: &VariableTable) -> String {
        super::parse::serialize(self, table)
    }
}

fn homogeneous(mut it: impl Iterator<Item = i64>) -> Option<i64> {
    let first = it.next()?;
    it.all(|d| d == first).then_some(first)
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.terms.iter().map(|(m, c)| format!("{}·{:?}", scalar::format(c), m)).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        Polynomial::mul(self, rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        self += &rhs;
        self
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        self -= &rhs;
        self
    }
}

impl FromIterator<(Monomial, Scalar)> for Polynomial {
    fn from_iter<I: IntoIterator<Item = (Monomial, Scalar)>>(iter: I) -> Self {
        let mut p = Polynomial::zero();
        for (m, c) in iter {
            p.add_term(m, c);
        }
        p
    }
}

//! Multiderivations and the Schouten bracket.
//!
//! A multiderivation is a polynomial in the coordinates `x_j^{(m)}` and their
//! duals `ξ^j_{(m)}`. Coordinates precede duals in the variable order, so each
//! monomial factors without sign as a coefficient times a dual word.
//!
//! The bracket is
//!
//! ```text
//! ⟦X,Y⟧ = Σ_j (X ∂⃖/∂ξ^j)(∂⃗/∂x_j Y) − (X ∂⃖/∂x_j)(∂⃗/∂ξ^j Y)
//! ```
//!
//! with `∂⃖` the right and `∂⃗` the left graded derivative. With these sides
//! `⟦Σ F_j ξ^j, p⟧ = Σ F_j ∂⃗p/∂x_j`, the differential in vector-field form.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::algebra::{Monomial, Polynomial, Var};
use crate::poisson::{Multivector, PoissonStructure};
use crate::resolvent::Resolvent;
use crate::scalar::{self, Scalar};

/// Multiderivations share the polynomial representation.
pub type Multiderivation = Polynomial;

/// Keeps terms with `lo ≤ fd ≤ hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiltrationWindow {
    pub lo: u32,
    pub hi: u32,
}

impl FiltrationWindow {
    pub fn new(lo: u32, hi: u32) -> FiltrationWindow {
        assert!(lo <= hi, "empty filtration window");
        FiltrationWindow { lo, hi }
    }

    pub fn exactly(p: u32) -> FiltrationWindow {
        FiltrationWindow { lo: p, hi: p }
    }

    pub fn all() -> FiltrationWindow {
        FiltrationWindow { lo: 0, hi: u32::MAX }
    }

    pub fn contains(&self, fd: u32) -> bool {
        self.lo <= fd && fd <= self.hi
    }
}

/// Terms of `y` grouped by each generator they contain.
struct Index<'a> {
    by_var: HashMap<Var, Vec<(&'a Monomial, &'a Scalar, u32)>>,
}

impl<'a> Index<'a> {
    fn new(p: &'a Polynomial) -> Index<'a> {
        let mut by_var: HashMap<Var, Vec<(&Monomial, &Scalar, u32)>> = HashMap::new();
        for (m, c) in p.terms() {
            let fd = m.fd();
            for &(v, _) in m.factors() {
                by_var.entry(v).or_default().push((m, c, fd));
            }
        }
        Index { by_var }
    }
}

/// The Schouten bracket restricted to output terms whose filtration degree
/// lies in `window`.
pub fn schouten_bracket(x: &Polynomial, y: &Polynomial, window: FiltrationWindow) -> Polynomial {
    let index = Index::new(y);
    let mut acc: BTreeMap<Monomial, Scalar> = BTreeMap::new();
    for (mx, cx) in x.terms() {
        let fdx = mx.fd();
        for &(v, _) in mx.factors() {
            let u = v.partner();
            let Some(partners) = index.by_var.get(&u) else { continue };
            // the paired dual carries the filtration degree lost by contraction
            let lost = if v.is_dual() { v.fd() } else { u.fd() };
            let Some(dx) = mx.derivative(v, false) else { continue };
            let mut sign_x = dx.negative;
            if !v.is_dual() {
                // second sum enters with a minus sign
                sign_x = !sign_x;
            }
            for (my, cy, fdy) in partners {
                let fd = fdx + fdy - lost;
                if !window.contains(fd) {
                    continue;
                }
                let dy = my.derivative(u, true).expect("indexed variable present");
                let Some((m, neg)) = dx.rest.mul(&dy.rest) else { continue };
                let mut c: Scalar = cx * *cy;
                let factor = dx.factor * dy.factor;
                if factor != 1 {
                    c *= scalar::int(factor as i64);
                }
                if sign_x ^ dy.negative ^ neg {
                    c = -c;
                }
                let slot = acc.entry(m).or_insert_with(Scalar::zero);
                *slot += c;
            }
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Full bracket without filtration truncation.
pub fn bracket(x: &Polynomial, y: &Polynomial) -> Polynomial {
    schouten_bracket(x, y, FiltrationWindow::all())
}

/// The homogeneous part of filtration degree exactly `p`.
pub fn filtration_component(x: &Polynomial, p: u32) -> Polynomial {
    x.filter(|m| m.fd() == p)
}

/// Terms of filtration degree below `p`.
pub fn below_filtration(x: &Polynomial, p: u32) -> Polynomial {
    x.filter(|m| m.fd() < p)
}

/// Decomposes into dual words and their coefficients.
pub fn split_by_word(x: &Polynomial) -> BTreeMap<Monomial, Polynomial> {
    let mut out: BTreeMap<Monomial, Polynomial> = BTreeMap::new();
    for (m, c) in x.terms() {
        let (coef, word) = m.split_dual();
        out.entry(word).or_default().add_term(coef, c.clone());
    }
    out
}

/// Recombines `Σ c_w · w`.
pub fn join_words(parts: &BTreeMap<Monomial, Polynomial>) -> Polynomial {
    let mut out = Polynomial::zero();
    for (w, c) in parts {
        for (m, a) in c.terms() {
            let (joined, neg) = m.mul(w).expect("coefficient and word share no odd generator");
            debug_assert!(!neg);
            out.add_term(joined, a.clone());
        }
    }
    out
}

/// `π₀ = Σ_j F_j ξ_j` for the differential images of a resolvent.
pub fn pi0_of(r: &Resolvent) -> Multiderivation {
    let mut out = Polynomial::zero();
    for (v, f) in r.images() {
        out += &f.mul(&Polynomial::var(v.partner()));
    }
    out
}

/// `⟦π₁, X⟧` for a multivector `X` on `S`.
pub fn lichnerowicz(p: &PoissonStructure, x: &Multivector) -> Multivector {
    bracket(&crate::perturbation::pi1(p), x)
}

/// `⟦π₁, X⟧ = LICHNEROWICZ_SIGNS[a] · δX` on multivectors of arity `a`.
pub const LICHNEROWICZ_SIGNS: [i64; 4] = [1, 1, 1, 1];

/// Sets every dual to zero.
pub fn augmentation(x: &Polynomial) -> Polynomial {
    x.filter(|m| !m.has_dual())
}

/// Eigenvalue of the Euler derivation counting coordinate factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XDegree {
    Homogeneous(u32),
    Inhomogeneous(Vec<u32>),
}

pub fn euler_xdegree(x: &Polynomial) -> XDegree {
    let mut degrees: Vec<u32> = x.terms().map(|(m, _)| m.coord_length()).collect();
    degrees.sort_unstable();
    degrees.dedup();
    match degrees.as_slice() {
        [] => XDegree::Homogeneous(0),
        [d] => XDegree::Homogeneous(*d),
        _ => XDegree::Inhomogeneous(degrees),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse, VariableTable};

    #[test]
    fn coordinate_pairing() {
        let t = VariableTable::standard(&[1, 1]);
        let xi1 = parse("@x1", &t).unwrap();
        let x1 = parse("x1", &t).unwrap();
        let x2 = parse("x2", &t).unwrap();
        assert_eq!(bracket(&xi1, &x1), Polynomial::one());
        assert!(bracket(&xi1, &x2).is_zero());
        assert_eq!(bracket(&x1, &xi1), -Polynomial::one());
    }

    #[test]
    fn vector_field_acts_as_derivation() {
        let t = VariableTable::standard(&[1, 1]);
        let v = parse("x2*@x1 + 3*x1^2*@x2", &t).unwrap();
        let p = parse("x1^2*x2", &t).unwrap();
        let expected = parse("2*x1*x2^2 + 3*x1^4", &t).unwrap();
        assert_eq!(bracket(&v, &p), expected);
    }

    #[test]
    fn words_split_and_join() {
        let mut t = VariableTable::standard(&[1, 1]);
        t.push(1, 2);
        let p = parse("x1*@x1*@X1_1 - x2*@x2*@X1_1 + x1*x2*@x1*@x2", &t).unwrap();
        let parts = split_by_word(&p);
        assert_eq!(parts.len(), 3);
        assert_eq!(join_words(&parts), p);
        assert_eq!(euler_xdegree(&p), XDegree::Inhomogeneous(vec![1, 2]));
        assert_eq!(euler_xdegree(&parse("@x1*@x2", &t).unwrap()), XDegree::Homogeneous(0));
    }
}

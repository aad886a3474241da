use std::cmp::Ordering;
use std::fmt;

use super::var::{Var, VariableTable};

/// A product of generators in canonical (table) order.
///
/// Odd generators appear with exponent one at most. The ordering implemented
/// by `Ord` is the canonical listing order: exponent vectors compared
/// lexicographically in table order, larger exponents first.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

/// Result of a graded derivative applied to a monomial.
pub struct Derivative {
    pub factor: u32,
    pub negative: bool,
    pub rest: Monomial,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Monomial {
        Monomial(vec![(v, 1)])
    }

    /// Builds a monomial from factors already sorted by variable with
    /// distinct variables and admissible exponents.
    pub fn from_sorted(factors: Vec<(Var, u32)>) -> Monomial {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|&(v, e)| e >= 1 && (!v.is_odd() || e == 1)));
        Monomial(factors)
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        match self.0.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn contains(&self, v: Var) -> bool {
        self.exponent(v) > 0
    }

    /// Number of factors counted with multiplicity.
    pub fn length(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn internal_degree(&self, table: &VariableTable) -> i64 {
        self.0.iter().map(|&(v, e)| table.internal_degree(v) * e as i64).sum()
    }

    pub fn coh_degree(&self) -> i64 {
        self.0.iter().map(|&(v, e)| v.coh_degree() * e as i64).sum()
    }

    pub fn is_odd(&self) -> bool {
        self.0.iter().filter(|(v, _)| v.is_odd()).count() % 2 == 1
    }

    pub fn fd(&self) -> u32 {
        self.0.iter().map(|&(v, e)| v.fd() * e).sum()
    }

    pub fn max_level(&self) -> u32 {
        self.0.iter().map(|(v, _)| v.level()).max().unwrap_or(0)
    }

    /// Number of coordinate factors (with multiplicity); duals are not counted.
    pub fn coord_length(&self) -> u32 {
        self.0.iter().filter(|(v, _)| !v.is_dual()).map(|(_, e)| e).sum()
    }

    /// Splits into the coordinate part and the dual word. Coordinates precede
    /// duals in table order, so `self = coefficient · word` without sign.
    pub fn split_dual(&self) -> (Monomial, Monomial) {
        let cut = self.0.iter().position(|(v, _)| v.is_dual()).unwrap_or(self.0.len());
        (Monomial(self.0[..cut].to_vec()), Monomial(self.0[cut..].to_vec()))
    }

    pub fn has_dual(&self) -> bool {
        self.0.last().is_some_and(|(v, _)| v.is_dual())
    }

    /// Product `self · other`, returning the canonical monomial and whether the
    /// Koszul sign is negative; `None` if an odd generator repeats.
    pub fn mul(&self, other: &Monomial) -> Option<(Monomial, bool)> {
        let a = &self.0;
        let b = &other.0;
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut odd_left_remaining = a.iter().filter(|(v, _)| v.is_odd()).count();
        let mut negative = false;
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
            if take_a {
                if a[i].0.is_odd() {
                    odd_left_remaining -= 1;
                }
                out.push(a[i]);
                i += 1;
            } else if i < a.len() && a[i].0 == b[j].0 {
                if a[i].0.is_odd() {
                    return None;
                }
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            } else {
                if b[j].0.is_odd() && odd_left_remaining % 2 == 1 {
                    negative = !negative;
                }
                out.push(b[j]);
                j += 1;
            }
        }
        Some((Monomial(out), negative))
    }

    /// Graded derivative by `v` acting from the left (`left = true`) or from the
    /// right. For an even `v` both sides agree.
    pub fn derivative(&self, v: Var, left: bool) -> Option<Derivative> {
        let pos = self.0.binary_search_by(|(w, _)| w.cmp(&v)).ok()?;
        let e = self.0[pos].1;
        let negative = if v.is_odd() {
            let range = if left { &self.0[..pos] } else { &self.0[pos + 1..] };
            range.iter().filter(|(w, _)| w.is_odd()).count() % 2 == 1
        } else {
            false
        };
        let mut rest = self.0.clone();
        if e == 1 {
            rest.remove(pos);
        } else {
            rest[pos].1 -= 1;
        }
        Some(Derivative { factor: e, negative, rest: Monomial(rest) })
    }

    /// Drops every factor for which `keep` is false.
    pub fn retain(&self, keep: impl Fn(Var) -> bool) -> Monomial {
        Monomial(self.0.iter().copied().filter(|(v, _)| keep(*v)).collect())
    }

    pub fn display(&self, table: &VariableTable) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&(v, e)| {
                if e == 1 {
                    table.name(v)
                } else {
                    format!("{}^{}", table.name(v), e)
                }
            })
            .collect();
        parts.join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        for k in 0..a.len().min(b.len()) {
            let ((va, ea), (vb, eb)) = (a[k], b[k]);
            if va != vb {
                // the monomial with the earlier variable has a positive
                // exponent where the other has zero, so it comes first
                return va.cmp(&vb);
            }
            if ea != eb {
                return eb.cmp(&ea);
            }
        }
        b.len().cmp(&a.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sorts an arbitrary word of generator powers into canonical order.
///
/// Returns the monomial and the accumulated Koszul sign; the sign is `0` when
/// an odd generator occurs twice.
pub fn normalize_monomial(word: &[(Var, u32)]) -> (Monomial, i8) {
    let mut items: Vec<(Var, u32)> = Vec::with_capacity(word.len());
    for &(v, e) in word {
        if e == 0 {
            continue;
        }
        if v.is_odd() && e > 1 {
            return (Monomial::one(), 0);
        }
        items.push((v, e));
    }
    // inversions between odd factors decide the sign of the sort
    let mut negative = false;
    for i in 0..items.len() {
        if !items[i].0.is_odd() {
            continue;
        }
        for j in i + 1..items.len() {
            if items[j].0.is_odd() && items[j].0 < items[i].0 {
                negative = !negative;
            }
        }
    }
    items.sort_by_key(|&(v, _)| v);
    let mut merged: Vec<(Var, u32)> = Vec::with_capacity(items.len());
    for (v, e) in items {
        match merged.last_mut() {
            Some(last) if last.0 == v => {
                if v.is_odd() {
                    return (Monomial::one(), 0);
                }
                last.1 += e;
            }
            _ => merged.push((v, e)),
        }
    }
    (Monomial(merged), if negative { -1 } else { 1 })
}

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

const DUAL_BIT: u32 = 1 << 31;
const LEVEL_SHIFT: u32 = 20;
const INDEX_MASK: u32 = (1 << LEVEL_SHIFT) - 1;
const LEVEL_MASK: u32 = (1 << (31 - LEVEL_SHIFT)) - 1;

/// A generator of the combined algebra: either a resolvent coordinate
/// `x_j^{(m)}` or its paired dual `ξ^j_{(m)}`.
///
/// The packed representation orders coordinates before duals, then by level,
/// then by index inside the level. This is the fixed total order that every
/// sign in the crate is computed against.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn coord(level: u32, index: u32) -> Var {
        assert!(level <= LEVEL_MASK && index <= INDEX_MASK, "variable out of range");
        Var((level << LEVEL_SHIFT) | index)
    }

    pub fn dual(level: u32, index: u32) -> Var {
        Var(Var::coord(level, index).0 | DUAL_BIT)
    }

    pub fn is_dual(self) -> bool {
        self.0 & DUAL_BIT != 0
    }

    pub fn level(self) -> u32 {
        (self.0 >> LEVEL_SHIFT) & LEVEL_MASK
    }

    pub fn index(self) -> u32 {
        self.0 & INDEX_MASK
    }

    /// The coordinate paired with a dual, or the dual paired with a coordinate.
    pub fn partner(self) -> Var {
        Var(self.0 ^ DUAL_BIT)
    }

    /// Cohomological degree: `-m` for `x^{(m)}`, `m+1` for `ξ_{(m)}`.
    pub fn coh_degree(self) -> i64 {
        let m = self.level() as i64;
        if self.is_dual() {
            m + 1
        } else {
            -m
        }
    }

    pub fn is_odd(self) -> bool {
        self.coh_degree().rem_euclid(2) == 1
    }

    /// Filtration degree: `m+1` for duals, zero for coordinates.
    pub fn fd(self) -> u32 {
        if self.is_dual() {
            self.level() + 1
        } else {
            0
        }
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = if self.is_dual() { "ξ" } else { "x" };
        write!(f, "{}{}_({})", kind, self.index() + 1, self.level())
    }
}

/// Read-only description of one variable of a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableDescriptor {
    pub name: String,
    pub var: Var,
    pub level: u32,
    pub cohomological_degree: i64,
    pub internal_degree: i64,
    pub odd: bool,
}

/// Names and internal degrees of all coordinates, grouped by level.
///
/// Level 0 holds the declared variables of `S`; level `m ≥ 1` holds the
/// resolvent variables, named `X{m}_{j}` in adjunction order. Every coordinate
/// has a dual named `@` followed by the coordinate's name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableTable {
    names: Vec<String>,
    degrees: Vec<Vec<i64>>,
    lookup: HashMap<String, Var>,
}

impl VariableTable {
    pub fn new<S: AsRef<str>>(vars: &[(S, i64)]) -> Result<VariableTable> {
        let mut table = VariableTable {
            names: Vec::new(),
            degrees: vec![Vec::new()],
            lookup: HashMap::new(),
        };
        for (name, degree) in vars {
            let name = name.as_ref();
            if !is_identifier(name) || name.starts_with('@') || generated_coord(name).is_some() {
                return Err(Error::Invalid(format!("invalid variable name `{name}`")));
            }
            let var = Var::coord(0, table.names.len() as u32);
            if table.lookup.insert(name.to_string(), var).is_some() {
                return Err(Error::Invalid(format!("duplicate variable `{name}`")));
            }
            table.names.push(name.to_string());
            table.degrees[0].push(*degree);
        }
        Ok(table)
    }

    /// Convenience constructor: `x1..xn` with the given degrees.
    pub fn standard(degrees: &[i64]) -> VariableTable {
        let vars: Vec<(String, i64)> = degrees
            .iter()
            .enumerate()
            .map(|(i, d)| (format!("x{}", i + 1), *d))
            .collect();
        VariableTable::new(&vars).expect("standard names are valid")
    }

    /// Appends a coordinate of the given level, returning it.
    pub fn push(&mut self, level: u32, internal_degree: i64) -> Var {
        assert!(level >= 1, "level-0 variables are fixed at construction");
        while self.degrees.len() <= level as usize {
            self.degrees.push(Vec::new());
        }
        let slot = &mut self.degrees[level as usize];
        let var = Var::coord(level, slot.len() as u32);
        slot.push(internal_degree);
        var
    }

    /// Declares `level` (possibly empty) so later levels can follow it.
    pub fn open_level(&mut self, level: u32) {
        while self.degrees.len() <= level as usize {
            self.degrees.push(Vec::new());
        }
    }

    /// Highest level holding at least one declared slot (levels may be empty).
    pub fn max_level(&self) -> u32 {
        (self.degrees.len() - 1) as u32
    }

    pub fn level_len(&self, level: u32) -> usize {
        self.degrees.get(level as usize).map_or(0, |l| l.len())
    }

    pub fn n_base(&self) -> usize {
        self.names.len()
    }

    pub fn contains(&self, v: Var) -> bool {
        (v.index() as usize) < self.level_len(v.level())
    }

    /// Coordinates of levels `0..=cap` in table order.
    pub fn coords(&self, cap: u32) -> Vec<Var> {
        let mut out = Vec::new();
        for (m, level) in self.degrees.iter().enumerate().take(cap as usize + 1) {
            out.extend((0..level.len()).map(|j| Var::coord(m as u32, j as u32)));
        }
        out
    }

    pub fn internal_degree(&self, v: Var) -> i64 {
        let d = self.degrees[v.level() as usize][v.index() as usize];
        if v.is_dual() {
            -d
        } else {
            d
        }
    }

    pub fn name(&self, v: Var) -> String {
        if v.is_dual() {
            return format!("@{}", self.name(v.partner()));
        }
        if v.level() == 0 {
            self.names[v.index() as usize].clone()
        } else {
            format!("X{}_{}", v.level(), v.index() + 1)
        }
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        if let Some(rest) = name.strip_prefix('@') {
            return self.lookup(rest).map(Var::partner).filter(|v| v.is_dual());
        }
        if let Some(v) = self.lookup.get(name) {
            return Some(*v);
        }
        generated_coord(name).filter(|v| self.contains(*v))
    }

    pub fn descriptor(&self, v: Var) -> VariableDescriptor {
        VariableDescriptor {
            name: self.name(v),
            var: v,
            level: v.level(),
            cohomological_degree: v.coh_degree(),
            internal_degree: self.internal_degree(v),
            odd: v.is_odd(),
        }
    }

    /// The level-0 part of the table.
    pub fn base(&self) -> VariableTable {
        let vars: Vec<(String, i64)> =
            self.names.iter().cloned().zip(self.degrees[0].iter().copied()).collect();
        VariableTable::new(&vars).expect("base names were validated")
    }

    pub fn base_degrees(&self) -> &[i64] {
        &self.degrees[0]
    }
}

fn is_identifier(s: &str) -> bool {
    let s = s.strip_prefix('@').unwrap_or(s);
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn generated_coord(name: &str) -> Option<Var> {
    let rest = name.strip_prefix('X')?;
    let (m, j) = rest.split_once('_')?;
    let m: u32 = m.parse().ok()?;
    let j: u32 = j.parse().ok()?;
    if m == 0 || j == 0 || m > LEVEL_MASK || j > INDEX_MASK + 1 {
        return None;
    }
    Some(Var::coord(m, j - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_orders_coords_before_duals() {
        let a = Var::coord(0, 5);
        let b = Var::coord(1, 0);
        let c = Var::dual(0, 0);
        assert!(a < b && b < c);
        assert_eq!(c.partner(), Var::coord(0, 0));
        assert_eq!(Var::dual(2, 3).level(), 2);
        assert_eq!(Var::dual(2, 3).index(), 3);
    }

    #[test]
    fn degrees_and_parities() {
        assert!(!Var::coord(0, 0).is_odd());
        assert!(Var::coord(1, 0).is_odd());
        assert!(Var::dual(0, 0).is_odd());
        assert!(!Var::dual(1, 0).is_odd());
        assert_eq!(Var::dual(1, 0).coh_degree(), 2);
        assert_eq!(Var::dual(3, 0).fd(), 4);
        assert_eq!(Var::coord(3, 0).coh_degree(), -3);
    }

    #[test]
    fn names_round_trip() {
        let mut t = VariableTable::standard(&[1, 1]);
        let y = t.push(1, 2);
        assert_eq!(t.name(y), "X1_1");
        assert_eq!(t.lookup("X1_1"), Some(y));
        assert_eq!(t.lookup("@X1_1"), Some(y.partner()));
        assert_eq!(t.lookup("@x2"), Some(Var::dual(0, 1)));
        assert_eq!(t.lookup("X1_2"), None);
        assert_eq!(t.internal_degree(y.partner()), -2);
    }

    #[test]
    fn rejects_bad_names() {
        assert!(VariableTable::new(&[("x", 1), ("x", 1)]).is_err());
        assert!(VariableTable::new(&[("X1_1", 1)]).is_err());
        assert!(VariableTable::new(&[("@a", 1)]).is_err());
        assert!(VariableTable::new(&[("1a", 1)]).is_err());
    }
}

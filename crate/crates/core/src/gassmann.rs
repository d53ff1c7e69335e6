//! The Galois group of the normal closure of `Q(a^(1/8))` as the affine group
//! of `Z/8`, and the induced-character (Gassmann) test for its subgroups.
//!
//! With `t = a^(1/8)` and `z` a primitive 8th root of unity, an automorphism
//! is fixed by `t -> z^b t` and `z -> z^c` with `c` odd. Composing two such
//! maps gives `(b1, c1)(b2, c2) = (b1 + c1 b2, c1 c2)`, which is the affine
//! map `x -> c x + b` on `Z/8`.
//!
//! `H` fixes `t`, so `H = {(0, c)}`. `H'` fixes `sqrt(2) t`, a root of
//! `X^8 - 16a`. Since `sqrt(2) = z + z^-1`, an automorphism sends it to
//! `z^c + z^-c`, which is `sqrt(2)` for `c = 1, 7` and `-sqrt(2)` for
//! `c = 3, 5`. So `(b, c)` fixes `sqrt(2) t` iff `z^b = 1` for `c = 1, 7`
//! and `z^b = -1` for `c = 3, 5`, giving
//! `H' = {(0, 1), (0, 7), (4, 3), (4, 5)}`.

use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// The affine map `x -> c x + b` on `Z/8`, `c` odd.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    b: u8,
    c: u8,
}

impl GroupElement {
    pub const IDENTITY: Self = Self { b: 0, c: 1 };

    pub fn new(b: u8, c: u8) -> Result<Self> {
        if b >= 8 || c >= 8 || c.is_multiple_of(2) {
            return Err(Error::InvalidArgument(alloc::format!(
                "({b}, {c}) is not an affine map of Z/8 with odd c"
            )));
        }
        Ok(Self { b, c })
    }

    pub fn b(self) -> u8 {
        self.b
    }

    pub fn c(self) -> u8 {
        self.c
    }

    pub fn compose(self, other: Self) -> Self {
        Self {
            b: (self.b + self.c * other.b) % 8,
            c: (self.c * other.c) % 8,
        }
    }

    pub fn inverse(self) -> Self {
        // odd c is its own inverse mod 8
        let c = self.c;
        Self {
            b: (8 - (c * self.b) % 8) % 8,
            c,
        }
    }

    /// `g self g^-1`.
    pub fn conjugate_by(self, g: Self) -> Self {
        g.compose(self).compose(g.inverse())
    }

    /// Action on `Z/8`.
    pub fn apply(self, x: u8) -> u8 {
        (self.c * x + self.b) % 8
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.b, self.c)
    }
}

/// All 32 elements, sorted by `(b, c)`.
pub fn all_elements() -> Vec<GroupElement> {
    let mut out = Vec::with_capacity(32);
    for b in 0..8 {
        for c in [1, 3, 5, 7] {
            out.push(GroupElement { b, c });
        }
    }
    out
}

/// A sorted, deduplicated set of group elements closed under composition.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup(Vec<GroupElement>);

impl Subgroup {
    pub fn new(mut elements: Vec<GroupElement>) -> Result<Self> {
        elements.sort();
        elements.dedup();
        if elements.binary_search(&GroupElement::IDENTITY).is_err() {
            return Err(Error::NotASubgroup("missing the identity".into()));
        }
        for &x in &elements {
            for &y in &elements {
                let z = x.compose(y);
                if elements.binary_search(&z).is_err() {
                    return Err(Error::NotASubgroup(alloc::format!(
                        "{x} * {y} = {z} is missing"
                    )));
                }
            }
        }
        Ok(Self(elements))
    }

    /// Subgroup generated by the given elements.
    pub fn generated_by(gens: &[GroupElement]) -> Self {
        let mut elems = alloc::vec![GroupElement::IDENTITY];
        let mut i = 0;
        while i < elems.len() {
            let x = elems[i];
            for &g in gens {
                let y = x.compose(g);
                if !elems.contains(&y) {
                    elems.push(y);
                }
            }
            i += 1;
        }
        Self::new(elems).expect("closure of a finite set")
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, g: GroupElement) -> bool {
        self.0.binary_search(&g).is_ok()
    }

    pub fn conjugate_by(&self, g: GroupElement) -> Self {
        let mut v: Vec<_> = self.0.iter().map(|h| h.conjugate_by(g)).collect();
        v.sort();
        Self(v)
    }
}

/// `(G, H, H')` with `G` the affine group of `Z/8`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GassmannTriple {
    pub group: Vec<GroupElement>,
    pub h: Subgroup,
    pub h_prime: Subgroup,
}

impl GassmannTriple {
    pub fn new(h: Subgroup, h_prime: Subgroup) -> Self {
        Self {
            group: all_elements(),
            h,
            h_prime,
        }
    }
}

/// `H` fixing `a^(1/8)` and `H'` fixing `(16a)^(1/8) = sqrt(2) a^(1/8)`.
pub fn build_galois_model() -> GassmannTriple {
    let e = |b, c| GroupElement { b, c };
    let h = Subgroup::new(alloc::vec![e(0, 1), e(0, 3), e(0, 5), e(0, 7)]).expect("subgroup");
    let h_prime = Subgroup::new(alloc::vec![e(0, 1), e(0, 7), e(4, 3), e(4, 5)]).expect("subgroup");
    GassmannTriple::new(h, h_prime)
}

/// Conjugacy classes, each sorted, ordered by their minimal element.
pub fn conjugacy_classes(group: &[GroupElement]) -> Vec<Vec<GroupElement>> {
    let mut seen = Vec::new();
    let mut classes = Vec::new();
    let mut sorted = group.to_vec();
    sorted.sort();
    for &x in &sorted {
        if seen.contains(&x) {
            continue;
        }
        let mut class: Vec<_> = group.iter().map(|&g| x.conjugate_by(g)).collect();
        class.sort();
        class.dedup();
        seen.extend(class.iter().copied());
        classes.push(class);
    }
    classes
}

/// Per-class counts `|C ∩ H|` and `|C ∩ H'|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassIntersection {
    pub class: Vec<GroupElement>,
    pub in_h: usize,
    pub in_h_prime: usize,
}

pub fn class_intersections(t: &GassmannTriple) -> Vec<ClassIntersection> {
    conjugacy_classes(&t.group)
        .into_iter()
        .map(|class| ClassIntersection {
            in_h: class.iter().filter(|&&g| t.h.contains(g)).count(),
            in_h_prime: class.iter().filter(|&&g| t.h_prime.contains(g)).count(),
            class,
        })
        .collect()
}

/// `1_H^G = 1_{H'}^G`, tested as `|C ∩ H| = |C ∩ H'|` for every class `C`.
/// Subgroups of different orders fail immediately.
pub fn gassmann_check(t: &GassmannTriple) -> bool {
    t.h.order() == t.h_prime.order()
        && class_intersections(t)
            .iter()
            .all(|ci| ci.in_h == ci.in_h_prime)
}

/// Values of the induced trivial character:
/// `g -> #{x : x^-1 g x ∈ H} / |H|`, the number of cosets `g` fixes.
pub fn induced_character(group: &[GroupElement], h: &Subgroup) -> Vec<usize> {
    group
        .iter()
        .map(|&g| {
            group
                .iter()
                .filter(|&&x| h.contains(g.conjugate_by(x.inverse())))
                .count()
                / h.order()
        })
        .collect()
}

/// Whether some `g` conjugates `H` onto `H'`.
pub fn are_conjugate_subgroups(t: &GassmannTriple) -> bool {
    t.group.iter().any(|&g| t.h.conjugate_by(g) == t.h_prime)
}

//! Finite groups as Cayley tables, homomorphisms, and actions by automorphisms.
//!
//! Elements are dense indices `0..order`. Every constructor validates the
//! group axioms, so a [`FiniteGroup`] value is always a group; inverses are
//! precomputed at construction.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::report::Report;
use crate::witness;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("malformed table: {0}")]
    MalformedTable(String),
    #[error("element {identity} is not an identity: unit law fails at element {witness}")]
    NoIdentity { identity: usize, witness: usize },
    #[error("element {element} has no two-sided inverse")]
    MissingInverse { element: usize },
    #[error("not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NonAssociative { a: usize, b: usize, c: usize },
    #[error("expected {expected} element names, got {got}")]
    NameCount { expected: usize, got: usize },
    #[error("duplicate element name {0:?}")]
    DuplicateName(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    names: Option<Vec<String>>,
}

/// Builds a validated group from a square multiplication table
/// (`table[a][b] = a*b`) and a designated identity index.
pub fn group_from_table(table: &[Vec<usize>], identity: usize) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::from_table(table, identity)
}

impl FiniteGroup {
    pub fn from_table(table: &[Vec<usize>], identity: usize) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::MalformedTable("empty table".into()));
        }
        for (a, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::MalformedTable(format!(
                    "row {a} has length {}, expected {n}",
                    row.len()
                )));
            }
            if let Some((b, &v)) = row.iter().enumerate().find(|(_, &v)| v >= n) {
                return Err(GroupError::MalformedTable(format!(
                    "entry [{a}][{b}] = {v} is out of range 0..{n}"
                )));
            }
        }
        if identity >= n {
            return Err(GroupError::MalformedTable(format!(
                "identity {identity} is out of range 0..{n}"
            )));
        }
        let flat: Vec<usize> = table.iter().flatten().copied().collect();
        Self::from_flat(n, flat, identity)
    }

    fn from_flat(n: usize, table: Vec<usize>, identity: usize) -> Result<Self, GroupError> {
        let mul = |a: usize, b: usize| table[a * n + b];
        for a in 0..n {
            if mul(identity, a) != a || mul(a, identity) != a {
                return Err(GroupError::NoIdentity {
                    identity,
                    witness: a,
                });
            }
        }
        let mut inverse = vec![0; n];
        for a in 0..n {
            match (0..n).find(|&b| mul(a, b) == identity && mul(b, a) == identity) {
                Some(b) => inverse[a] = b,
                None => return Err(GroupError::MissingInverse { element: a }),
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = mul(a, b);
                for c in 0..n {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(GroupError::NonAssociative { a, b, c });
                    }
                }
            }
        }
        Ok(FiniteGroup {
            order: n,
            table,
            identity,
            inverse,
            names: None,
        })
    }

    /// Attaches display names, one per element. Names must be unique.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, GroupError> {
        if names.len() != self.order {
            return Err(GroupError::NameCount {
                expected: self.order,
                got: names.len(),
            });
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(GroupError::DuplicateName(name.clone()));
            }
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// Z/n under addition; element `k` is the residue `k`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        let table = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a + b) % n))
            .collect();
        Self::from_flat(n, table, 0).expect("cyclic table is a group")
    }

    /// Z/2 x Z/2, element `2a + b` for the pair `(a, b)`.
    pub fn klein_four() -> Self {
        Self::direct_product(&Self::cyclic(2), &Self::cyclic(2))
    }

    /// Direct product; element `a * |right| + b` is the pair `(a, b)`.
    pub fn direct_product(left: &FiniteGroup, right: &FiniteGroup) -> Self {
        let (n, m) = (left.order, right.order);
        let mut table = Vec::with_capacity(n * m * n * m);
        for a in 0..n * m {
            for b in 0..n * m {
                let (a1, a2) = (a / m, a % m);
                let (b1, b2) = (b / m, b % m);
                table.push(left.mul(a1, b1) * m + right.mul(a2, b2));
            }
        }
        let identity = left.identity * m + right.identity;
        Self::from_flat(n * m, table, identity).expect("direct product is a group")
    }

    /// The symmetric group on `{1..n}`, elements in lexicographic order of
    /// their images (so index 0 is the identity), named in cycle notation.
    /// The product `a*b` is the permutation "apply `b`, then `a`".
    pub fn symmetric(n: usize) -> Self {
        let perms = permutations(n);
        let index_of = |p: &[usize]| perms.iter().position(|q| q == p).expect("closed");
        let order = perms.len();
        let mut table = Vec::with_capacity(order * order);
        for a in &perms {
            for b in &perms {
                let ab: Vec<usize> = (0..n).map(|i| a[b[i]]).collect();
                table.push(index_of(&ab));
            }
        }
        let names = perms.iter().map(|p| cycle_notation(p)).collect();
        Self::from_flat(order, table, 0)
            .expect("permutation composition is a group")
            .with_names(names)
            .expect("cycle names are unique")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// Product of a sequence, left to right.
    pub fn product(&self, elems: &[usize]) -> usize {
        elems.iter().fold(self.identity, |acc, &x| self.mul(acc, x))
    }

    pub fn conjugate(&self, g: usize, h: usize) -> usize {
        self.mul(self.mul(g, h), self.inv(g))
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn contains(&self, a: usize) -> bool {
        a < self.order
    }

    pub fn is_abelian(&self) -> bool {
        self.elements()
            .all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Display name of an element, falling back to its index.
    pub fn name(&self, a: usize) -> String {
        match &self.names {
            Some(names) => names[a].clone(),
            None => a.to_string(),
        }
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.as_ref()?.iter().position(|n| n == name)
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.order)
            .map(<[usize]>::to_vec)
            .collect()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                extend(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        out.push('(');
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            out.push_str(&(i + 1).to_string());
            i = p[i];
        }
        out.push(')');
    }
    if out.is_empty() {
        "e".to_string()
    } else {
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    source: Arc<FiniteGroup>,
    target: Arc<FiniteGroup>,
    map: Vec<usize>,
}

impl Homomorphism {
    /// Shape-checked map; the homomorphism law is checked by
    /// [`validate_homomorphism`].
    pub fn new(
        source: Arc<FiniteGroup>,
        target: Arc<FiniteGroup>,
        map: Vec<usize>,
    ) -> Result<Self, GroupError> {
        if map.len() != source.order() {
            return Err(GroupError::MalformedTable(format!(
                "map has {} entries, source has order {}",
                map.len(),
                source.order()
            )));
        }
        if let Some((a, &v)) = map.iter().enumerate().find(|(_, &v)| v >= target.order()) {
            return Err(GroupError::MalformedTable(format!(
                "map[{a}] = {v} is outside the target group"
            )));
        }
        Ok(Homomorphism {
            source,
            target,
            map,
        })
    }

    pub fn trivial(source: Arc<FiniteGroup>, target: Arc<FiniteGroup>) -> Self {
        let map = vec![target.identity(); source.order()];
        Homomorphism {
            source,
            target,
            map,
        }
    }

    pub fn identity(group: Arc<FiniteGroup>) -> Self {
        let map = group.elements().collect();
        Homomorphism {
            source: group.clone(),
            target: group,
            map,
        }
    }

    pub fn source(&self) -> &Arc<FiniteGroup> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FiniteGroup> {
        &self.target
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }
}

/// Every pair `(a, b)` with `map[ab] != map[a] map[b]`, plus the identity law.
pub fn validate_homomorphism(h: &Homomorphism) -> Report {
    let mut report = Report::new();
    check_homomorphism(h, &mut report);
    report
}

pub fn check_homomorphism(h: &Homomorphism, report: &mut Report) {
    let (s, t) = (&h.source, &h.target);
    for a in s.elements() {
        for b in s.elements() {
            let ok = h.apply(s.mul(a, b)) == t.mul(h.apply(a), h.apply(b));
            report.expect("homomorphism", ok, || witness!(a = a, b = b));
        }
    }
    let e = s.identity();
    report.expect("homomorphism-identity", h.apply(e) == t.identity(), || {
        witness!(a = e)
    });
}

/// An action of `actor` on `space`, `table[g * |space| + h] = g ▷ h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAction {
    actor: Arc<FiniteGroup>,
    space: Arc<FiniteGroup>,
    table: Vec<usize>,
}

impl GroupAction {
    pub fn new(
        actor: Arc<FiniteGroup>,
        space: Arc<FiniteGroup>,
        rows: &[Vec<usize>],
    ) -> Result<Self, GroupError> {
        if rows.len() != actor.order() || rows.iter().any(|r| r.len() != space.order()) {
            return Err(GroupError::MalformedTable(format!(
                "action table must be {}x{}",
                actor.order(),
                space.order()
            )));
        }
        let table: Vec<usize> = rows.iter().flatten().copied().collect();
        if let Some(&v) = table.iter().find(|&&v| v >= space.order()) {
            return Err(GroupError::MalformedTable(format!(
                "action entry {v} is outside the acted-on group"
            )));
        }
        Ok(GroupAction {
            actor,
            space,
            table,
        })
    }

    pub(crate) fn from_flat(
        actor: Arc<FiniteGroup>,
        space: Arc<FiniteGroup>,
        table: Vec<usize>,
    ) -> Self {
        debug_assert_eq!(table.len(), actor.order() * space.order());
        GroupAction {
            actor,
            space,
            table,
        }
    }

    pub fn trivial(actor: Arc<FiniteGroup>, space: Arc<FiniteGroup>) -> Self {
        let table = actor.elements().flat_map(|_| space.elements()).collect();
        GroupAction {
            actor,
            space,
            table,
        }
    }

    pub fn actor(&self) -> &Arc<FiniteGroup> {
        &self.actor
    }

    pub fn space(&self) -> &Arc<FiniteGroup> {
        &self.space
    }

    #[inline]
    pub fn act(&self, g: usize, h: usize) -> usize {
        self.table[g * self.space.order() + h]
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.space.order())
            .map(<[usize]>::to_vec)
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.actor
            .elements()
            .all(|g| self.space.elements().all(|h| self.act(g, h) == h))
    }
}

/// Empty iff every `g` acts by an automorphism and the action laws hold.
pub fn validate_automorphism_action(a: &GroupAction) -> Report {
    let mut report = Report::new();
    check_automorphism_action(a, &mut report);
    report
}

pub fn check_automorphism_action(a: &GroupAction, report: &mut Report) {
    let (g, h) = (&a.actor, &a.space);
    for x in g.elements() {
        let mut hit = vec![false; h.order()];
        for y in h.elements() {
            let image = a.act(x, y);
            report.expect("automorphism-bijective", !hit[image], || {
                witness!(g = x, h = y)
            });
            hit[image] = true;
        }
        let e = h.identity();
        report.expect("automorphism-identity", a.act(x, e) == e, || {
            witness!(g = x, h = e)
        });
        for p in h.elements() {
            for q in h.elements() {
                let ok = a.act(x, h.mul(p, q)) == h.mul(a.act(x, p), a.act(x, q));
                report.expect("automorphism-multiplicative", ok, || {
                    witness!(g = x, a = p, b = q)
                });
            }
        }
    }
    for x in g.elements() {
        for y in g.elements() {
            for z in h.elements() {
                let ok = a.act(g.mul(x, y), z) == a.act(x, a.act(y, z));
                report.expect("action-compatibility", ok, || {
                    witness!(g1 = x, g2 = y, h = z)
                });
            }
        }
    }
    for z in h.elements() {
        report.expect("action-unit", a.act(g.identity(), z) == z, || {
            witness!(h = z)
        });
    }
}

/// `g ▷ h = g h g⁻¹`.
pub fn conjugation_action(group: &Arc<FiniteGroup>) -> GroupAction {
    let table = group
        .elements()
        .flat_map(|g| group.elements().map(move |h| (g, h)))
        .map(|(g, h)| group.conjugate(g, h))
        .collect();
    GroupAction {
        actor: group.clone(),
        space: group.clone(),
        table,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z4_rows() -> Vec<Vec<usize>> {
        (0..4)
            .map(|a| (0..4).map(|b| (a + b) % 4).collect())
            .collect()
    }

    #[test]
    fn z4_table_is_a_group() {
        let g = group_from_table(&z4_rows(), 0).unwrap();
        assert_eq!(g.order(), 4);
        assert_eq!(g.inv(1), 3);
        assert!(g.is_abelian());
    }

    #[test]
    fn idempotent_non_identity_is_rejected() {
        let rows = vec![vec![0, 1], vec![1, 1]];
        assert_eq!(
            group_from_table(&rows, 0),
            Err(GroupError::MissingInverse { element: 1 })
        );
    }

    #[test]
    fn malformed_tables_are_rejected() {
        assert!(matches!(
            group_from_table(&[vec![0, 1], vec![1]], 0),
            Err(GroupError::MalformedTable(_))
        ));
        assert!(matches!(
            group_from_table(&[vec![0, 5], vec![1, 0]], 0),
            Err(GroupError::MalformedTable(_))
        ));
        assert!(matches!(
            group_from_table(&[], 0),
            Err(GroupError::MalformedTable(_))
        ));
    }

    #[test]
    fn wrong_identity_is_reported() {
        assert_eq!(
            group_from_table(&z4_rows(), 1),
            Err(GroupError::NoIdentity {
                identity: 1,
                witness: 0
            })
        );
    }

    #[test]
    fn non_associative_loop_is_rejected() {
        // A Latin square with identity 0 that is not associative (order-5 loop).
        let rows = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            group_from_table(&rows, 0),
            Err(GroupError::NonAssociative { .. })
        ));
    }

    // S3 built independently from explicit permutation arrays.
    fn s3_oracle() -> (Vec<[usize; 3]>, Vec<Vec<usize>>) {
        let perms: Vec<[usize; 3]> = vec![
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let rows = perms
            .iter()
            .map(|a| {
                perms
                    .iter()
                    .map(|b| {
                        let ab = [a[b[0]], a[b[1]], a[b[2]]];
                        perms.iter().position(|p| *p == ab).unwrap()
                    })
                    .collect()
            })
            .collect();
        (perms, rows)
    }

    #[test]
    fn s3_from_permutation_composition() {
        let (_, rows) = s3_oracle();
        let g = group_from_table(&rows, 0).unwrap();
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        assert_eq!(FiniteGroup::symmetric(3).table_rows(), rows);
    }

    #[test]
    fn s3_names_follow_cycle_notation() {
        let s3 = FiniteGroup::symmetric(3);
        let names: Vec<String> = s3.elements().map(|a| s3.name(a)).collect();
        assert_eq!(names, ["e", "(23)", "(12)", "(123)", "(132)", "(13)"]);
    }

    #[test]
    fn duplicate_names_rejected() {
        let g = FiniteGroup::cyclic(2);
        assert_eq!(
            g.with_names(vec!["x".into(), "x".into()]),
            Err(GroupError::DuplicateName("x".into()))
        );
    }

    #[test]
    fn homomorphism_examples() {
        let z4 = Arc::new(FiniteGroup::cyclic(4));
        assert!(validate_homomorphism(&Homomorphism::trivial(z4.clone(), z4.clone())).is_empty());
        assert!(validate_homomorphism(&Homomorphism::identity(z4.clone())).is_empty());
        let shift = Homomorphism::new(z4.clone(), z4.clone(), vec![1, 2, 3, 0]).unwrap();
        let report = validate_homomorphism(&shift);
        let first = report.violations_of("homomorphism").next().unwrap();
        assert_eq!(
            (first.witness.get("a"), first.witness.get("b")),
            (Some(0), Some(0))
        );
        assert!(report.has_violation("homomorphism-identity"));
    }

    #[test]
    fn automorphism_action_examples() {
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        let z3 = Arc::new(FiniteGroup::cyclic(3));
        let z4 = Arc::new(FiniteGroup::cyclic(4));
        assert!(
            validate_automorphism_action(&GroupAction::trivial(z2.clone(), z3.clone())).is_empty()
        );

        let inversion =
            GroupAction::new(z2.clone(), z3.clone(), &[vec![0, 1, 2], vec![0, 2, 1]]).unwrap();
        assert!(validate_automorphism_action(&inversion).is_empty());

        let shift = GroupAction::new(z2, z4, &[vec![0, 1, 2, 3], vec![1, 2, 3, 0]]).unwrap();
        let report = validate_automorphism_action(&shift);
        let w = &report
            .violations_of("automorphism-identity")
            .next()
            .unwrap()
            .witness;
        assert_eq!((w.get("g"), w.get("h")), (Some(1), Some(0)));
    }

    #[test]
    fn conjugation_examples() {
        let z4 = Arc::new(FiniteGroup::cyclic(4));
        assert!(conjugation_action(&z4).is_trivial());

        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let conj = conjugation_action(&s3);
        assert!(validate_automorphism_action(&conj).is_empty());
        let (t12, c123, c132) = (
            s3.index_of("(12)").unwrap(),
            s3.index_of("(123)").unwrap(),
            s3.index_of("(132)").unwrap(),
        );
        assert_eq!(conj.act(t12, c123), c132);
        assert!(s3.elements().all(|h| conj.act(s3.identity(), h) == h));
    }

    #[test]
    fn conjugation_trivial_iff_abelian() {
        for g in [
            FiniteGroup::trivial(),
            FiniteGroup::cyclic(4),
            FiniteGroup::klein_four(),
            FiniteGroup::cyclic(6),
            FiniteGroup::symmetric(3),
        ] {
            let g = Arc::new(g);
            assert_eq!(conjugation_action(&g).is_trivial(), g.is_abelian());
        }
    }

    #[test]
    fn validators_are_pure() {
        let z4 = Arc::new(FiniteGroup::cyclic(4));
        let shift = Homomorphism::new(z4.clone(), z4, vec![1, 2, 3, 0]).unwrap();
        assert_eq!(validate_homomorphism(&shift), validate_homomorphism(&shift));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn groups() -> Vec<FiniteGroup> {
            vec![
                FiniteGroup::cyclic(6),
                FiniteGroup::klein_four(),
                FiniteGroup::symmetric(3),
                FiniteGroup::direct_product(&FiniteGroup::symmetric(3), &FiniteGroup::cyclic(2)),
            ]
        }

        proptest! {
            #[test]
            fn relabelled_tables_are_groups(k in 0usize..4, perm in Just((0..12).collect::<Vec<usize>>()).prop_shuffle()) {
                let g = &groups()[k];
                let n = g.order();
                let p: Vec<usize> = perm.into_iter().filter(|&i| i < n).collect();
                let mut rows = vec![vec![0; n]; n];
                for a in g.elements() {
                    for b in g.elements() {
                        rows[p[a]][p[b]] = p[g.mul(a, b)];
                    }
                }
                let r = group_from_table(&rows, p[g.identity()]).unwrap();
                prop_assert_eq!(r.is_abelian(), g.is_abelian());
                prop_assert!(validate_homomorphism(&Homomorphism::new(Arc::new(g.clone()), Arc::new(r), p).unwrap()).is_empty());
            }

            #[test]
            fn group_laws_on_random_triples(k in 0usize..4, a in 0usize..12, b in 0usize..12, c in 0usize..12) {
                let g = &groups()[k];
                let (a, b, c) = (a % g.order(), b % g.order(), c % g.order());
                prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                prop_assert_eq!(g.mul(a, g.inv(a)), g.identity());
                prop_assert_eq!(g.mul(g.identity(), a), a);
                let conj = conjugation_action(&Arc::new(g.clone()));
                prop_assert_eq!(conj.act(a, g.mul(b, c)), g.mul(conj.act(a, b), conj.act(a, c)));
                prop_assert_eq!(conj.act(g.mul(a, b), c), conj.act(a, conj.act(b, c)));
            }
        }
    }
}

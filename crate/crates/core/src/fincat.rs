//! Finite categories, functors and natural transformations given by tables.
//!
//! Morphisms are indexed globally. Composition is a partial table stored
//! flat: `comp[g * n + f]` is `Some(g ∘ f)` exactly when `src(g) = tgt(f)`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::groups::FiniteGroup;
use crate::report::Report;
use crate::witness;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum FincatError {
    #[error("malformed category tables: {0}")]
    Malformed(String),
    #[error("type mismatch at ({g}, {f}): {detail}")]
    TypeMismatch { g: usize, f: usize, detail: String },
    #[error("composite of {g} after {f} is missing")]
    MissingComposite { g: usize, f: usize },
    #[error("identity law fails for object {object} against morphism {morphism}")]
    IdentityLawViolation { object: usize, morphism: usize },
    #[error("not associative: ({h}∘{g})∘{f} != {h}∘({g}∘{f})")]
    NonAssociative { h: usize, g: usize, f: usize },
    #[error("cannot compose: {0}")]
    NotComposable(String),
    #[error("morphism {morphism} has no inverse")]
    NotInvertible { morphism: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCategory {
    n_objects: usize,
    src: Vec<usize>,
    tgt: Vec<usize>,
    identity: Vec<usize>,
    comp: Vec<Option<usize>>,
}

/// Builds and fully validates a category. `comp` lists `(g, f, g∘f)`.
pub fn category_from_tables(
    n_objects: usize,
    morphisms: &[(usize, usize)],
    identity: &[usize],
    comp: &[(usize, usize, usize)],
) -> Result<FiniteCategory, FincatError> {
    let n = morphisms.len();
    if let Some((f, _)) = morphisms
        .iter()
        .enumerate()
        .find(|(_, &(s, t))| s >= n_objects || t >= n_objects)
    {
        return Err(FincatError::Malformed(format!(
            "morphism {f} has an endpoint out of range"
        )));
    }
    if identity.len() != n_objects {
        return Err(FincatError::Malformed(format!(
            "{} identities for {n_objects} objects",
            identity.len()
        )));
    }
    if let Some(&m) = identity.iter().find(|&&m| m >= n) {
        return Err(FincatError::Malformed(format!(
            "identity {m} is not a morphism"
        )));
    }
    let src: Vec<usize> = morphisms.iter().map(|m| m.0).collect();
    let tgt: Vec<usize> = morphisms.iter().map(|m| m.1).collect();
    for (x, &m) in identity.iter().enumerate() {
        if src[m] != x || tgt[m] != x {
            return Err(FincatError::IdentityLawViolation {
                object: x,
                morphism: m,
            });
        }
    }
    let mut table = vec![None; n * n];
    for &(g, f, r) in comp {
        if g >= n || f >= n || r >= n {
            return Err(FincatError::Malformed(format!(
                "composition entry ({g}, {f}, {r}) out of range"
            )));
        }
        if src[g] != tgt[f] {
            return Err(FincatError::TypeMismatch {
                g,
                f,
                detail: format!(
                    "source of {g} is {} but target of {f} is {}",
                    src[g], tgt[f]
                ),
            });
        }
        if src[r] != src[f] || tgt[r] != tgt[g] {
            return Err(FincatError::TypeMismatch {
                g,
                f,
                detail: format!("composite {r} has the wrong endpoints"),
            });
        }
        match table[g * n + f] {
            Some(prev) if prev != r => {
                return Err(FincatError::Malformed(format!(
                    "conflicting composites for ({g}, {f})"
                )))
            }
            _ => table[g * n + f] = Some(r),
        }
    }
    let cat = FiniteCategory {
        n_objects,
        src,
        tgt,
        identity: identity.to_vec(),
        comp: table,
    };
    cat.check_laws()?;
    Ok(cat)
}

impl FiniteCategory {
    /// Builds from a total composition rule on composable pairs, then validates.
    pub fn from_fn(
        n_objects: usize,
        morphisms: &[(usize, usize)],
        identity: &[usize],
        compose: impl Fn(usize, usize) -> usize,
    ) -> Result<Self, FincatError> {
        let mut comp = Vec::new();
        for g in 0..morphisms.len() {
            for f in 0..morphisms.len() {
                if morphisms[g].0 == morphisms[f].1 {
                    comp.push((g, f, compose(g, f)));
                }
            }
        }
        category_from_tables(n_objects, morphisms, identity, &comp)
    }

    fn check_laws(&self) -> Result<(), FincatError> {
        let n = self.n_morphisms();
        for g in 0..n {
            for f in 0..n {
                if self.src[g] == self.tgt[f] && self.comp[g * n + f].is_none() {
                    return Err(FincatError::MissingComposite { g, f });
                }
            }
        }
        for f in 0..n {
            let (x, y) = (self.src[f], self.tgt[f]);
            if self.comp(f, self.identity[x]) != f {
                return Err(FincatError::IdentityLawViolation {
                    object: x,
                    morphism: f,
                });
            }
            if self.comp(self.identity[y], f) != f {
                return Err(FincatError::IdentityLawViolation {
                    object: y,
                    morphism: f,
                });
            }
        }
        for f in 0..n {
            for g in (0..n).filter(|&g| self.src[g] == self.tgt[f]) {
                let gf = self.comp(g, f);
                for h in (0..n).filter(|&h| self.src[h] == self.tgt[g]) {
                    if self.comp(self.comp(h, g), f) != self.comp(h, gf) {
                        return Err(FincatError::NonAssociative { h, g, f });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_morphisms(&self) -> usize {
        self.src.len()
    }

    #[inline]
    pub fn src(&self, f: usize) -> usize {
        self.src[f]
    }

    #[inline]
    pub fn tgt(&self, f: usize) -> usize {
        self.tgt[f]
    }

    #[inline]
    pub fn id(&self, x: usize) -> usize {
        self.identity[x]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identity[self.src[f]] == f
    }

    /// `g ∘ f` if composable.
    #[inline]
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.comp[g * self.n_morphisms() + f]
    }

    /// `g ∘ f`; panics when `src(g) != tgt(f)`.
    #[inline]
    pub fn comp(&self, g: usize, f: usize) -> usize {
        self.compose(g, f)
            .unwrap_or_else(|| panic!("morphisms {g} and {f} are not composable"))
    }

    /// Composite of a chain written right to left: `chain[0] ∘ chain[1] ∘ ...`.
    pub fn compose_chain(&self, chain: &[usize]) -> Option<usize> {
        let (&last, rest) = chain.split_last()?;
        rest.iter()
            .rev()
            .try_fold(last, |acc, &g| self.compose(g, acc))
    }

    pub fn morphisms(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.src.iter().copied().zip(self.tgt.iter().copied())
    }

    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        (0..self.n_morphisms())
            .filter(|&f| self.src[f] == x && self.tgt[f] == y)
            .collect()
    }

    /// Composable pairs `(g, f)` in lexicographic order.
    pub fn composable_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n_morphisms();
        (0..n).flat_map(move |g| {
            (0..n)
                .filter(move |&f| self.src[g] == self.tgt[f])
                .map(move |f| (g, f))
        })
    }

    pub fn inverse(&self, f: usize) -> Option<usize> {
        let (x, y) = (self.src[f], self.tgt[f]);
        self.hom(y, x)
            .into_iter()
            .find(|&g| self.comp(g, f) == self.identity[x] && self.comp(f, g) == self.identity[y])
    }

    pub fn identities(&self) -> &[usize] {
        &self.identity
    }

    /// `(g, f, g∘f)` triples in lexicographic order.
    pub fn comp_triples(&self) -> Vec<(usize, usize, usize)> {
        self.composable_pairs()
            .map(|(g, f)| (g, f, self.comp(g, f)))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functor<'c> {
    pub source: &'c FiniteCategory,
    pub target: &'c FiniteCategory,
    pub obj_map: Vec<usize>,
    pub mor_map: Vec<usize>,
}

impl<'c> Functor<'c> {
    pub fn new(
        source: &'c FiniteCategory,
        target: &'c FiniteCategory,
        obj_map: Vec<usize>,
        mor_map: Vec<usize>,
    ) -> Result<Self, FincatError> {
        if obj_map.len() != source.n_objects() || mor_map.len() != source.n_morphisms() {
            return Err(FincatError::Malformed(
                "functor maps do not cover the source".into(),
            ));
        }
        if obj_map.iter().any(|&x| x >= target.n_objects())
            || mor_map.iter().any(|&f| f >= target.n_morphisms())
        {
            return Err(FincatError::Malformed(
                "functor maps leave the target".into(),
            ));
        }
        Ok(Functor {
            source,
            target,
            obj_map,
            mor_map,
        })
    }

    pub fn identity(c: &'c FiniteCategory) -> Self {
        Functor {
            source: c,
            target: c,
            obj_map: (0..c.n_objects()).collect(),
            mor_map: (0..c.n_morphisms()).collect(),
        }
    }
}

pub fn validate_functor(func: &Functor<'_>) -> Report {
    let mut report = Report::new();
    check_functor(func, &mut report);
    report
}

pub fn check_functor(func: &Functor<'_>, report: &mut Report) {
    let (s, t) = (func.source, func.target);
    for f in 0..s.n_morphisms() {
        let image = func.mor_map[f];
        let ok = t.src(image) == func.obj_map[s.src(f)] && t.tgt(image) == func.obj_map[s.tgt(f)];
        report.expect("functor-typing", ok, || witness!(f = f));
    }
    for x in 0..s.n_objects() {
        let ok = func.mor_map[s.id(x)] == t.id(func.obj_map[x]);
        report.expect("functor-identity", ok, || witness!(x = x));
    }
    for (g, f) in s.composable_pairs() {
        let ok = t.compose(func.mor_map[g], func.mor_map[f]) == Some(func.mor_map[s.comp(g, f)]);
        report.expect("functor-composition", ok, || witness!(g = g, f = f));
    }
}

fn same_category(a: &FiniteCategory, b: &FiniteCategory) -> bool {
    std::ptr::eq(a, b) || a == b
}

/// `g ∘ f`, applying `f` first.
pub fn functor_compose<'c>(g: &Functor<'c>, f: &Functor<'c>) -> Result<Functor<'c>, FincatError> {
    if !same_category(f.target, g.source) {
        return Err(FincatError::NotComposable(
            "target of the first functor is not the source of the second".into(),
        ));
    }
    Ok(Functor {
        source: f.source,
        target: g.target,
        obj_map: f.obj_map.iter().map(|&x| g.obj_map[x]).collect(),
        mor_map: f.mor_map.iter().map(|&m| g.mor_map[m]).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NatTrans<'c> {
    pub source: Functor<'c>,
    pub target: Functor<'c>,
    pub components: Vec<usize>,
}

impl<'c> NatTrans<'c> {
    pub fn identity(func: &Functor<'c>) -> Self {
        let components = func.obj_map.iter().map(|&y| func.target.id(y)).collect();
        NatTrans {
            source: func.clone(),
            target: func.clone(),
            components,
        }
    }
}

pub fn validate_nat_trans(alpha: &NatTrans<'_>) -> Report {
    let mut report = Report::new();
    check_nat_trans(alpha, &mut report);
    report
}

pub fn check_nat_trans(alpha: &NatTrans<'_>, report: &mut Report) {
    let (f_, g_) = (&alpha.source, &alpha.target);
    let parallel = same_category(f_.source, g_.source) && same_category(f_.target, g_.target);
    report.expect("nat-parallel", parallel, || witness!());
    if !parallel || alpha.components.len() != f_.source.n_objects() {
        return;
    }
    let (s, t) = (f_.source, f_.target);
    for x in 0..s.n_objects() {
        let c = alpha.components[x];
        let ok = c < t.n_morphisms() && t.src(c) == f_.obj_map[x] && t.tgt(c) == g_.obj_map[x];
        report.expect("nat-component-typing", ok, || witness!(x = x));
    }
    for f in 0..s.n_morphisms() {
        let (x, y) = (s.src(f), s.tgt(f));
        let lhs = t.compose(alpha.components[y], f_.mor_map[f]);
        let rhs = t.compose(g_.mor_map[f], alpha.components[x]);
        report.expect("naturality", lhs.is_some() && lhs == rhs, || {
            witness!(f = f)
        });
    }
}

/// `F·α`: components `F(α_x)`, between `F∘S` and `F∘T`.
pub fn whisker_left<'c>(
    func: &Functor<'c>,
    alpha: &NatTrans<'c>,
) -> Result<NatTrans<'c>, FincatError> {
    Ok(NatTrans {
        source: functor_compose(func, &alpha.source)?,
        target: functor_compose(func, &alpha.target)?,
        components: alpha.components.iter().map(|&c| func.mor_map[c]).collect(),
    })
}

/// `α·F`: components `α_{F x}`, between `S∘F` and `T∘F`.
pub fn whisker_right<'c>(
    alpha: &NatTrans<'c>,
    func: &Functor<'c>,
) -> Result<NatTrans<'c>, FincatError> {
    Ok(NatTrans {
        source: functor_compose(&alpha.source, func)?,
        target: functor_compose(&alpha.target, func)?,
        components: func.obj_map.iter().map(|&x| alpha.components[x]).collect(),
    })
}

/// A finite category in which every morphism is invertible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    cat: FiniteCategory,
    inverse: Vec<usize>,
}

impl FiniteGroupoid {
    pub fn new(cat: FiniteCategory) -> Result<Self, FincatError> {
        let inverse = (0..cat.n_morphisms())
            .map(|f| {
                cat.inverse(f)
                    .ok_or(FincatError::NotInvertible { morphism: f })
            })
            .collect::<Result<_, _>>()?;
        Ok(FiniteGroupoid { cat, inverse })
    }

    pub fn category(&self) -> &FiniteCategory {
        &self.cat
    }

    pub fn inv(&self, f: usize) -> usize {
        self.inverse[f]
    }

    /// Connected components as sorted object lists, ordered by least element.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.cat.n_objects();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let next = parent[y];
                parent[y] = r;
                y = next;
            }
            r
        }
        for (s, t) in self.cat.morphisms() {
            let (a, b) = (find(&mut parent, s), find(&mut parent, t));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..n {
            let root = find(&mut parent, x);
            groups.entry(root).or_default().push(x);
        }
        groups.into_values().collect()
    }
}

/// `X⫽G` for an action of `group` on `{0..n_points}`. Morphism `(γ, x)` has
/// index `γ * n_points + x` and runs `x -> γ▷x`.
pub fn transformation_groupoid(
    group: &FiniteGroup,
    n_points: usize,
    act: impl Fn(usize, usize) -> usize,
) -> Result<FiniteGroupoid, FincatError> {
    let morphisms: Vec<(usize, usize)> = group
        .elements()
        .flat_map(|g| (0..n_points).map(move |x| (g, x)))
        .map(|(g, x)| (x, act(g, x)))
        .collect();
    let identity: Vec<usize> = (0..n_points)
        .map(|x| group.identity() * n_points + x)
        .collect();
    let cat = FiniteCategory::from_fn(n_points, &morphisms, &identity, |later, earlier| {
        let (g2, g1, x) = (later / n_points, earlier / n_points, earlier % n_points);
        group.mul(g2, g1) * n_points + x
    })?;
    FiniteGroupoid::new(cat)
}

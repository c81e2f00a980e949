//! The transformation double category `C⫽G` of a strict action.
//!
//! Objects are the objects of `C`, horizontal morphisms are the morphisms of
//! `C`, vertical morphisms are pairs `(γ, x) : x -> γ▷x`, and the square
//! `⟨(γ,χ), f⟩` has top `f`, bottom `(γ,χ)▷f`, left `(γ, src f)` and right
//! `(∂(χ)γ, tgt f)`.
//!
//! Square composition is diagrammatic: a horizontal composite takes the left
//! square first, a vertical composite takes the upper square first.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::action::{validate_strict_action, ActionError, ActionKind, StrictAction};
use crate::catgroup::semidirect_group;
use crate::config::VerifyConfig;
use crate::fincat::{
    check_functor, transformation_groupoid, FincatError, FiniteCategory, FiniteGroupoid, Functor,
};
use crate::quintet::{sample_chunks, Axis};
use crate::report::Report;
use crate::witness;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TransformError {
    #[error("action is invalid ({} violation(s))", .0.total_failed())]
    InvalidAction(Report),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("{axis:?} composition: {detail}")]
    NotAdjacent { axis: Axis, detail: String },
    #[error("view is not a groupoid: {0}")]
    View(#[from] FincatError),
}

/// The square `⟨(γ,χ), f⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TDSquare {
    pub gamma: usize,
    pub chi: usize,
    pub f: usize,
}

/// A vertical morphism `(γ, x) : x -> γ▷x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct VMor {
    pub gamma: usize,
    pub x: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SquareBoundary {
    pub top: usize,
    pub bottom: usize,
    pub left: VMor,
    pub right: VMor,
}

pub struct TransDoubleCat {
    act: StrictAction,
    boundaries: Vec<SquareBoundary>,
    out_of: Vec<Vec<usize>>,
    overrides: HashMap<(Axis, TDSquare, TDSquare), TDSquare>,
}

pub fn build_transformation_double(act: StrictAction) -> Result<TransDoubleCat, TransformError> {
    let report = validate_strict_action(&act)?;
    if !report.is_empty() {
        return Err(TransformError::InvalidAction(report));
    }
    Ok(TransDoubleCat::build_unchecked(act))
}

impl TransDoubleCat {
    /// Builds without validating the action; used to verify broken inputs.
    pub fn build_unchecked(act: StrictAction) -> Self {
        let xm = act.xmod().clone();
        let c = act.category().clone();
        let (ng, nh, nmor) = (xm.g().order(), xm.h().order(), c.n_morphisms());
        let mut boundaries = Vec::with_capacity(ng * nh * nmor);
        for gamma in 0..ng {
            for chi in 0..nh {
                let right = xm.g().mul(xm.d(chi), gamma);
                for f in 0..nmor {
                    boundaries.push(SquareBoundary {
                        top: f,
                        bottom: act.mor(gamma, chi, f),
                        left: VMor { gamma, x: c.src(f) },
                        right: VMor {
                            gamma: right,
                            x: c.tgt(f),
                        },
                    });
                }
            }
        }
        let mut out_of = vec![Vec::new(); c.n_objects()];
        for f in 0..nmor {
            out_of[c.src(f)].push(f);
        }
        TransDoubleCat {
            act,
            boundaries,
            out_of,
            overrides: HashMap::new(),
        }
    }

    pub fn action(&self) -> &StrictAction {
        &self.act
    }

    pub fn category(&self) -> &FiniteCategory {
        self.act.category()
    }

    pub fn n_objects(&self) -> usize {
        self.category().n_objects()
    }

    pub fn n_horizontal(&self) -> usize {
        self.category().n_morphisms()
    }

    pub fn n_vertical(&self) -> usize {
        self.act.xmod().g().order() * self.n_objects()
    }

    pub fn n_squares(&self) -> usize {
        self.boundaries.len()
    }

    pub fn id_of(&self, s: TDSquare) -> usize {
        (s.gamma * self.act.xmod().h().order() + s.chi) * self.n_horizontal() + s.f
    }

    pub fn square(&self, id: usize) -> TDSquare {
        let (nh, nmor) = (self.act.xmod().h().order(), self.n_horizontal());
        TDSquare {
            gamma: id / (nh * nmor),
            chi: (id / nmor) % nh,
            f: id % nmor,
        }
    }

    pub fn squares(&self) -> impl Iterator<Item = TDSquare> + '_ {
        (0..self.n_squares()).map(|k| self.square(k))
    }

    pub fn boundary(&self, s: TDSquare) -> SquareBoundary {
        self.boundaries[self.id_of(s)]
    }

    /// Replaces one composite, for mutation tests of the verifier.
    pub fn override_composite(&mut self, axis: Axis, a: TDSquare, b: TDSquare, result: TDSquare) {
        self.overrides.insert((axis, a, b), result);
    }

    /// `⟨(γ,1), id_x⟩`, the horizontal identity on `(γ, x)`.
    pub fn identity_h(&self, v: VMor) -> TDSquare {
        TDSquare {
            gamma: v.gamma,
            chi: self.act.xmod().h().identity(),
            f: self.category().id(v.x),
        }
    }

    /// `⟨(e,1), f⟩`, the vertical identity on `f`.
    pub fn identity_v(&self, f: usize) -> TDSquare {
        let xm = self.act.xmod();
        TDSquare {
            gamma: xm.g().identity(),
            chi: xm.h().identity(),
            f,
        }
    }

    /// Horizontal: `a` on the left, `b` on the right, giving
    /// `⟨(γ₁, χ₂χ₁), g∘f⟩`. Vertical: `a` above `b` where `b`'s top is
    /// `a`'s bottom, giving `⟨(γ₁γ₃, χ₁(γ₁▷χ₂)), f⟩`.
    pub fn compose_squares(
        &self,
        a: TDSquare,
        b: TDSquare,
        axis: Axis,
    ) -> Result<TDSquare, TransformError> {
        let (ba, bb) = (self.boundary(a), self.boundary(b));
        let xm = self.act.xmod();
        let c = self.category();
        match axis {
            Axis::Horizontal => {
                if ba.right != bb.left {
                    return Err(TransformError::NotAdjacent {
                        axis,
                        detail: format!(
                            "right edge ({}, {}) of the left square differs from left edge ({}, {}) of the right square",
                            ba.right.gamma, ba.right.x, bb.left.gamma, bb.left.x
                        ),
                    });
                }
            }
            Axis::Vertical => {
                if ba.bottom != bb.top {
                    return Err(TransformError::NotAdjacent {
                        axis,
                        detail: format!(
                            "bottom edge {} of the upper square differs from top edge {} of the lower square",
                            ba.bottom, bb.top
                        ),
                    });
                }
            }
        }
        if let Some(&r) = self.overrides.get(&(axis, a, b)) {
            return Ok(r);
        }
        Ok(match axis {
            Axis::Horizontal => TDSquare {
                gamma: a.gamma,
                chi: xm.h().mul(b.chi, a.chi),
                f: c.comp(b.f, a.f),
            },
            Axis::Vertical => TDSquare {
                gamma: xm.g().mul(b.gamma, a.gamma),
                chi: xm.h().mul(b.chi, xm.act(b.gamma, a.chi)),
                f: a.f,
            },
        })
    }

    /// Squares that can sit to the right of `a`.
    fn right_of(&self, a: TDSquare) -> impl Iterator<Item = TDSquare> + '_ {
        let ba = self.boundary(a);
        let nh = self.act.xmod().h().order();
        (0..nh).flat_map(move |chi| {
            self.out_of[ba.right.x].iter().map(move |&f| TDSquare {
                gamma: ba.right.gamma,
                chi,
                f,
            })
        })
    }

    fn right_count(&self, a: TDSquare) -> usize {
        self.act.xmod().h().order() * self.out_of[self.boundary(a).right.x].len()
    }

    /// Squares that can sit below `a`.
    fn below(&self, a: TDSquare) -> impl Iterator<Item = TDSquare> + '_ {
        let bottom = self.boundary(a).bottom;
        let (ng, nh) = (self.act.xmod().g().order(), self.act.xmod().h().order());
        (0..ng).flat_map(move |gamma| {
            (0..nh).map(move |chi| TDSquare {
                gamma,
                chi,
                f: bottom,
            })
        })
    }

    fn random_right(&self, a: TDSquare, rng: &mut ChaCha8Rng) -> Option<TDSquare> {
        let ba = self.boundary(a);
        let outs = &self.out_of[ba.right.x];
        if outs.is_empty() {
            return None;
        }
        let chi = rng.random_range(0..self.act.xmod().h().order());
        Some(TDSquare {
            gamma: ba.right.gamma,
            chi,
            f: outs[rng.random_range(0..outs.len())],
        })
    }

    fn random_below(&self, a: TDSquare, rng: &mut ChaCha8Rng) -> TDSquare {
        let xm = self.act.xmod();
        TDSquare {
            gamma: rng.random_range(0..xm.g().order()),
            chi: rng.random_range(0..xm.h().order()),
            f: self.boundary(a).bottom,
        }
    }

    fn vmor_index(&self, v: VMor) -> usize {
        v.gamma * self.n_objects() + v.x
    }

    /// The vertical category, with composition read off vertical composites
    /// of horizontal identity squares.
    pub fn vertical_category(&self) -> Result<FiniteGroupoid, TransformError> {
        let (ng, nob) = (self.act.xmod().g().order(), self.n_objects());
        let morphisms: Vec<(usize, usize)> = (0..ng * nob)
            .map(|k| (k % nob, self.act.obj(k / nob, k % nob)))
            .collect();
        let identity: Vec<usize> = (0..nob)
            .map(|x| self.act.xmod().g().identity() * nob + x)
            .collect();
        let mut comp = Vec::new();
        for later in 0..ng * nob {
            for earlier in 0..ng * nob {
                if morphisms[later].0 != morphisms[earlier].1 {
                    continue;
                }
                let upper = self.identity_h(VMor {
                    gamma: earlier / nob,
                    x: earlier % nob,
                });
                let lower = self.identity_h(VMor {
                    gamma: later / nob,
                    x: later % nob,
                });
                let r = self.compose_squares(upper, lower, Axis::Vertical)?;
                comp.push((later, earlier, self.vmor_index(self.boundary(r).left)));
            }
        }
        let cat = crate::fincat::category_from_tables(nob, &morphisms, &identity, &comp)?;
        Ok(FiniteGroupoid::new(cat)?)
    }

    /// Objects `Mor(C)`, morphisms the squares from top to bottom, composed
    /// vertically.
    pub fn square_groupoid(&self) -> Result<FiniteGroupoid, TransformError> {
        let morphisms: Vec<(usize, usize)> =
            self.boundaries.iter().map(|b| (b.top, b.bottom)).collect();
        let identity: Vec<usize> = (0..self.n_horizontal())
            .map(|f| self.id_of(self.identity_v(f)))
            .collect();
        let mut comp = Vec::new();
        let mut by_top: Vec<Vec<usize>> = vec![Vec::new(); self.n_horizontal()];
        for (k, b) in self.boundaries.iter().enumerate() {
            by_top[b.top].push(k);
        }
        for earlier in 0..self.n_squares() {
            for &later in &by_top[self.boundaries[earlier].bottom] {
                let r =
                    self.compose_squares(self.square(earlier), self.square(later), Axis::Vertical)?;
                comp.push((later, earlier, self.id_of(r)));
            }
        }
        let cat =
            crate::fincat::category_from_tables(self.n_horizontal(), &morphisms, &identity, &comp)?;
        Ok(FiniteGroupoid::new(cat)?)
    }
}

/// Runs `check(index)` for every index, or for `cfg.samples` draws of
/// `sample(rng)` when the suite is too large.
fn run_suite<T: Sync>(
    cfg: &VerifyConfig,
    total: u64,
    enumerate: impl Fn() -> Vec<T> + Sync,
    per_item: impl Fn(&T, &mut Report) + Sync,
    sample: impl Fn(&mut ChaCha8Rng, &mut Report) + Sync,
) -> Report {
    let mut report = Report::with_cap(cfg.cap);
    if cfg.exhaustive_for(total) {
        let items = enumerate();
        let parts: Vec<Report> = items
            .par_iter()
            .map(|item| {
                let mut r = Report::with_cap(cfg.cap);
                per_item(item, &mut r);
                r
            })
            .collect();
        parts.into_iter().for_each(|r| report.merge(r));
    } else {
        let parts: Vec<Report> = sample_chunks(cfg)
            .into_par_iter()
            .map(|(seed, count)| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut r = Report::with_cap(cfg.cap);
                for _ in 0..count {
                    sample(&mut rng, &mut r);
                }
                r
            })
            .collect();
        parts.into_iter().for_each(|r| report.merge(r));
    }
    report
}

/// Whether each suite ran exhaustively, keyed by law name.
pub fn suite_modes(d: &TransDoubleCat, cfg: &VerifyConfig) -> Vec<(&'static str, bool)> {
    let (h_pairs, v_pairs, h_triples, v_triples, blocks) = suite_sizes(d);
    vec![
        ("h-boundary", cfg.exhaustive_for(h_pairs)),
        ("v-boundary", cfg.exhaustive_for(v_pairs)),
        ("h-assoc", cfg.exhaustive_for(h_triples)),
        ("v-assoc", cfg.exhaustive_for(v_triples)),
        ("interchange", cfg.exhaustive_for(blocks)),
    ]
}

fn suite_sizes(d: &TransDoubleCat) -> (u64, u64, u64, u64, u64) {
    let xm = d.act.xmod();
    let (ng, nh) = (xm.g().order() as u64, xm.h().order() as u64);
    let gh = ng * nh;
    let mut h_pairs = 0u64;
    let mut h_triples = 0u64;
    let mut blocks = 0u64;
    for s in d.squares() {
        let r = d.right_count(s) as u64;
        h_pairs += r;
        h_triples += d.right_of(s).map(|t| d.right_count(t) as u64).sum::<u64>();
        blocks += r * gh * nh;
    }
    let n = d.n_squares() as u64;
    (h_pairs, n * gh, h_triples, n * gh * gh, blocks)
}

/// Every double-category law, plus the crossed-module target identity and
/// the six equal composites for a vertical pair of squares.
pub fn verify_double_category(d: &TransDoubleCat, cfg: &VerifyConfig) -> Report {
    let mut report = Report::with_cap(cfg.cap);
    let act = &d.act;
    let xm = act.xmod();
    let (g, h) = (xm.g(), xm.h());
    let c = d.category();
    let (h_pairs, v_pairs, h_triples, v_triples, blocks) = suite_sizes(d);
    let all: Vec<TDSquare> = d.squares().collect();
    let sid = |s: TDSquare| d.id_of(s);

    let vcomp = |earlier: VMor, later: VMor| -> Option<VMor> {
        (act.obj(earlier.gamma, earlier.x) == later.x).then(|| VMor {
            gamma: g.mul(later.gamma, earlier.gamma),
            x: earlier.x,
        })
    };

    let h_boundary = |a: TDSquare, b: TDSquare, r: &mut Report| {
        let ok = match d.compose_squares(a, b, Axis::Horizontal) {
            Ok(ab) => {
                let (ba, bb, bab) = (d.boundary(a), d.boundary(b), d.boundary(ab));
                bab.left == ba.left
                    && bab.right == bb.right
                    && c.compose(bb.top, ba.top) == Some(bab.top)
                    && c.compose(bb.bottom, ba.bottom) == Some(bab.bottom)
            }
            Err(_) => false,
        };
        r.expect("h-boundary", ok, || witness!(a = sid(a), b = sid(b)));
    };
    report.merge(run_suite(
        cfg,
        h_pairs,
        || all.clone(),
        |&a, r| d.right_of(a).for_each(|b| h_boundary(a, b, r)),
        |rng, r| {
            let a = all[rng.random_range(0..all.len())];
            if let Some(b) = d.random_right(a, rng) {
                h_boundary(a, b, r);
            }
        },
    ));

    let v_boundary = |a: TDSquare, b: TDSquare, r: &mut Report| {
        let ok = match d.compose_squares(a, b, Axis::Vertical) {
            Ok(ab) => {
                let (ba, bb, bab) = (d.boundary(a), d.boundary(b), d.boundary(ab));
                bab.top == ba.top
                    && bab.bottom == bb.bottom
                    && vcomp(ba.left, bb.left) == Some(bab.left)
                    && vcomp(ba.right, bb.right) == Some(bab.right)
            }
            Err(_) => false,
        };
        r.expect("v-boundary", ok, || witness!(a = sid(a), b = sid(b)));
    };
    report.merge(run_suite(
        cfg,
        v_pairs,
        || all.clone(),
        |&a, r| d.below(a).for_each(|b| v_boundary(a, b, r)),
        |rng, r| {
            let a = all[rng.random_range(0..all.len())];
            let b = d.random_below(a, rng);
            v_boundary(a, b, r);
        },
    ));

    let h_assoc = |a: TDSquare, b: TDSquare, cc: TDSquare, r: &mut Report| {
        let left = d
            .compose_squares(a, b, Axis::Horizontal)
            .and_then(|ab| d.compose_squares(ab, cc, Axis::Horizontal));
        let right = d
            .compose_squares(b, cc, Axis::Horizontal)
            .and_then(|bc| d.compose_squares(a, bc, Axis::Horizontal));
        let ok = matches!((&left, &right), (Ok(x), Ok(y)) if x == y);
        r.expect("h-assoc", ok, || {
            witness!(a = sid(a), b = sid(b), c = sid(cc))
        });
    };
    report.merge(run_suite(
        cfg,
        h_triples,
        || all.clone(),
        |&a, r| {
            for b in d.right_of(a) {
                for cc in d.right_of(b) {
                    h_assoc(a, b, cc, r);
                }
            }
        },
        |rng, r| {
            let a = all[rng.random_range(0..all.len())];
            if let Some(b) = d.random_right(a, rng) {
                if let Some(cc) = d.random_right(b, rng) {
                    h_assoc(a, b, cc, r);
                }
            }
        },
    ));

    let v_assoc = |a: TDSquare, b: TDSquare, cc: TDSquare, r: &mut Report| {
        let upper_first = d
            .compose_squares(a, b, Axis::Vertical)
            .and_then(|ab| d.compose_squares(ab, cc, Axis::Vertical));
        let lower_first = d
            .compose_squares(b, cc, Axis::Vertical)
            .and_then(|bc| d.compose_squares(a, bc, Axis::Vertical));
        let ok = matches!((&upper_first, &lower_first), (Ok(x), Ok(y)) if x == y);
        r.expect("v-assoc", ok, || {
            witness!(a = sid(a), b = sid(b), c = sid(cc))
        });
    };
    report.merge(run_suite(
        cfg,
        v_triples,
        || all.clone(),
        |&a, r| {
            for b in d.below(a) {
                for cc in d.below(b) {
                    v_assoc(a, b, cc, r);
                }
            }
        },
        |rng, r| {
            let a = all[rng.random_range(0..all.len())];
            let b = d.random_below(a, rng);
            let cc = d.random_below(b, rng);
            v_assoc(a, b, cc, r);
        },
    ));

    for &s in &all {
        let b = d.boundary(s);
        let h_ok = d
            .compose_squares(d.identity_h(b.left), s, Axis::Horizontal)
            .ok()
            == Some(s)
            && d.compose_squares(s, d.identity_h(b.right), Axis::Horizontal)
                .ok()
                == Some(s);
        report.expect("h-unit", h_ok, || witness!(square = sid(s)));
        let v_ok = d
            .compose_squares(d.identity_v(b.top), s, Axis::Vertical)
            .ok()
            == Some(s)
            && d.compose_squares(s, d.identity_v(b.bottom), Axis::Vertical)
                .ok()
                == Some(s);
        report.expect("v-unit", v_ok, || witness!(square = sid(s)));
    }

    // a | b
    // --+--
    // c | d
    let block = |a: TDSquare, b: TDSquare, cc: TDSquare, dd: TDSquare, r: &mut Report| {
        let rows_first = d.compose_squares(a, b, Axis::Horizontal).and_then(|ab| {
            d.compose_squares(cc, dd, Axis::Horizontal)
                .and_then(|cd| d.compose_squares(ab, cd, Axis::Vertical))
        });
        let cols_first = d.compose_squares(a, cc, Axis::Vertical).and_then(|ac| {
            d.compose_squares(b, dd, Axis::Vertical)
                .and_then(|bd| d.compose_squares(ac, bd, Axis::Horizontal))
        });
        let ok = matches!((&rows_first, &cols_first), (Ok(x), Ok(y)) if x == y);
        r.expect("interchange", ok, || {
            witness!(a = sid(a), b = sid(b), c = sid(cc), d = sid(dd))
        });
    };
    let nh = h.order();
    let lower_right = |b: TDSquare, cc: TDSquare, chi: usize| TDSquare {
        gamma: d.boundary(cc).right.gamma,
        chi,
        f: d.boundary(b).bottom,
    };
    report.merge(run_suite(
        cfg,
        blocks,
        || all.clone(),
        |&a, r| {
            for b in d.right_of(a) {
                for cc in d.below(a) {
                    for chi in 0..nh {
                        block(a, b, cc, lower_right(b, cc, chi), r);
                    }
                }
            }
        },
        |rng, r| {
            let a = all[rng.random_range(0..all.len())];
            if let Some(b) = d.random_right(a, rng) {
                let cc = d.random_below(a, rng);
                let chi = rng.random_range(0..nh);
                block(a, b, cc, lower_right(b, cc, chi), r);
            }
        },
    ));

    for g1 in g.elements() {
        for g2 in g.elements() {
            for chi in h.elements() {
                for chi2 in h.elements() {
                    let lhs = g.product(&[xm.d(chi2), g2, xm.d(chi), g1]);
                    let rhs = g.product(&[xm.d(h.mul(chi2, xm.act(g2, chi))), g2, g1]);
                    report.expect("crossmod-target", lhs == rhs, || {
                        witness!(gamma = g1, gamma2 = g2, chi = chi, chi2 = chi2)
                    });
                }
            }
        }
    }

    report.merge(six_expressions(act, cfg));

    match (
        d.vertical_category(),
        transformation_groupoid(g, c.n_objects(), |gm, x| act.obj(gm, x)),
    ) {
        (Ok(v), Ok(t)) => {
            let ok = v.category() == t.category();
            report.expect("vertical-category", ok, || witness!());
        }
        _ => report.expect("vertical-category", false, || witness!()),
    }
    report
}

/// The six composites in `C` for the target of a vertical pair of squares
/// `⟨(γ',χ'), (γ,χ)▷f⟩` over `⟨(γ,χ), f⟩`, each compared with
/// `(γ'γ, χ'(γ'▷χ))▷f`.
pub fn six_expressions(act: &StrictAction, cfg: &VerifyConfig) -> Report {
    let xm = act.xmod();
    let (g, h) = (xm.g(), xm.h());
    let c = act.category();
    let parts: Vec<Report> = (0..g.order())
        .into_par_iter()
        .map(|gp| {
            let mut r = Report::with_cap(cfg.cap);
            let fm = |gamma: usize, m: usize| act.functor_mor(gamma, m);
            for chip in h.elements() {
                let dp = g.mul(xm.d(chip), gp);
                for gm in g.elements() {
                    for chi in h.elements() {
                        let dl = g.mul(xm.d(chi), gm);
                        let label = h.mul(chip, xm.act(gp, chi));
                        for f in 0..c.n_morphisms() {
                            let (x, y) = (c.src(f), c.tgt(f));
                            let p = |z: usize| act.component(gm, chi, z);
                            let pp = |z: usize| act.component(gp, chip, z);
                            let target = Some(act.mor(g.mul(gp, gm), label, f));
                            let exprs = [
                                c.compose_chain(&[
                                    pp(act.obj(dl, y)),
                                    fm(gp, p(y)),
                                    fm(g.mul(gp, gm), f),
                                ]),
                                c.compose_chain(&[
                                    fm(dp, p(y)),
                                    pp(act.obj(gm, y)),
                                    fm(g.mul(gp, gm), f),
                                ]),
                                c.compose_chain(&[
                                    pp(act.obj(dl, y)),
                                    fm(g.mul(gp, dl), f),
                                    fm(gp, p(x)),
                                ]),
                                c.compose_chain(&[
                                    fm(g.mul(dp, dl), f),
                                    pp(act.obj(dl, x)),
                                    fm(gp, p(x)),
                                ]),
                                c.compose_chain(&[
                                    fm(dp, p(y)),
                                    fm(g.mul(dp, gm), f),
                                    pp(act.obj(gm, x)),
                                ]),
                                c.compose_chain(&[
                                    fm(g.mul(dp, dl), f),
                                    fm(dp, p(x)),
                                    pp(act.obj(gm, x)),
                                ]),
                            ];
                            let ok = exprs.iter().all(|e| *e == target);
                            r.expect("six-expression", ok, || {
                                witness!(gamma2 = gp, chi2 = chip, gamma = gm, chi = chi, f = f)
                            });
                        }
                    }
                }
            }
            r
        })
        .collect();
    let mut report = Report::with_cap(cfg.cap);
    parts.into_iter().for_each(|r| report.merge(r));
    report
}

pub struct TransposeViews {
    /// `Ob(C)⫽G`, read off the vertical category of the double category.
    pub object_groupoid: FiniteGroupoid,
    /// `Mor(C)⫽(G⋉H)`, read off squares under vertical composition.
    pub morphism_groupoid: FiniteGroupoid,
    /// Entrywise checks that both views match the transformation groupoids
    /// built directly from the action tables, under the identity bijection
    /// on indices.
    pub report: Report,
}

pub fn transpose_views(d: &TransDoubleCat) -> Result<TransposeViews, TransformError> {
    let act = &d.act;
    let xm = act.xmod();
    let c = d.category();
    let object_groupoid = d.vertical_category()?;
    let morphism_groupoid = d.square_groupoid()?;
    let direct_obj = transformation_groupoid(xm.g(), c.n_objects(), |g, x| act.obj(g, x))?;
    let nh = xm.h().order();
    let direct_mor = transformation_groupoid(&semidirect_group(xm), c.n_morphisms(), |k, f| {
        act.mor(k / nh, k % nh, f)
    })?;
    let mut report = Report::new();
    compare_groupoids(
        "transpose-objects",
        &object_groupoid,
        &direct_obj,
        &mut report,
    );
    compare_groupoids(
        "transpose-morphisms",
        &morphism_groupoid,
        &direct_mor,
        &mut report,
    );
    Ok(TransposeViews {
        object_groupoid,
        morphism_groupoid,
        report,
    })
}

fn compare_groupoids(
    law: &'static str,
    a: &FiniteGroupoid,
    b: &FiniteGroupoid,
    report: &mut Report,
) {
    let (ca, cb) = (a.category(), b.category());
    let same_shape = ca.n_objects() == cb.n_objects() && ca.n_morphisms() == cb.n_morphisms();
    report.expect(law, same_shape, || witness!());
    if !same_shape {
        return;
    }
    for x in 0..ca.n_objects() {
        report.expect(law, ca.id(x) == cb.id(x), || witness!(object = x));
    }
    for f in 0..ca.n_morphisms() {
        let ok = ca.src(f) == cb.src(f) && ca.tgt(f) == cb.tgt(f) && a.inv(f) == b.inv(f);
        report.expect(law, ok, || witness!(morphism = f));
    }
    for (g, f) in ca.composable_pairs() {
        report.expect(law, cb.compose(g, f) == Some(ca.comp(g, f)), || {
            witness!(g = g, f = f)
        });
    }
}

/// Object and morphism maps of an inclusion of groupoids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Inclusion {
    pub obj_map: Vec<usize>,
    pub mor_map: Vec<usize>,
}

pub struct NestedInclusions {
    /// `Ob(C)⫽G -> Mor(C)⫽G`, `x ↦ id_x`.
    pub first: Inclusion,
    /// `Mor(C)⫽G -> Mor(C)⫽(G⋉H)`, `(γ, f) ↦ ((γ,1), f)`.
    pub second: Inclusion,
    /// Morphisms `((γ,χ), f)` of the largest groupoid that join objects in
    /// the image of the second inclusion without lying in it.
    pub second_non_full: Vec<TDSquare>,
    pub report: Report,
}

pub fn nested_inclusions(d: &TransDoubleCat) -> Result<NestedInclusions, TransformError> {
    let act = &d.act;
    let xm = act.xmod();
    let c = d.category();
    let (ng, nh) = (xm.g().order(), xm.h().order());
    let (nob, nmor) = (c.n_objects(), c.n_morphisms());
    let small = transformation_groupoid(xm.g(), nob, |g, x| act.obj(g, x))?;
    let middle = transformation_groupoid(xm.g(), nmor, |g, f| act.functor_mor(g, f))?;
    let large = transformation_groupoid(&semidirect_group(xm), nmor, |k, f| {
        act.mor(k / nh, k % nh, f)
    })?;

    let first = Inclusion {
        obj_map: (0..nob).map(|x| c.id(x)).collect(),
        mor_map: (0..ng * nob)
            .map(|k| (k / nob) * nmor + c.id(k % nob))
            .collect(),
    };
    let e_h = xm.h().identity();
    let second = Inclusion {
        obj_map: (0..nmor).collect(),
        mor_map: (0..ng * nmor)
            .map(|k| ((k / nmor) * nh + e_h) * nmor + k % nmor)
            .collect(),
    };

    let mut report = Report::new();
    check_inclusion("inclusion1", &small, &middle, &first, &mut report)?;
    check_inclusion(
        "inclusion2",
        &large_source(&middle),
        &large,
        &second,
        &mut report,
    )?;
    let missing_first = missing_from_image(&middle, &first);
    report.expect("inclusion1-full", missing_first.is_empty(), || {
        witness!(morphism = missing_first.first().copied().unwrap_or(0))
    });
    let second_non_full = missing_from_image(&large, &second)
        .into_iter()
        .take(report.cap())
        .map(|k| d.square(k))
        .collect();
    Ok(NestedInclusions {
        first,
        second,
        second_non_full,
        report,
    })
}

fn large_source(g: &FiniteGroupoid) -> FiniteGroupoid {
    g.clone()
}

fn check_inclusion(
    name: &'static str,
    source: &FiniteGroupoid,
    target: &FiniteGroupoid,
    incl: &Inclusion,
    report: &mut Report,
) -> Result<(), TransformError> {
    let func = Functor::new(
        source.category(),
        target.category(),
        incl.obj_map.clone(),
        incl.mor_map.clone(),
    )?;
    let mut inner = Report::new();
    check_functor(&func, &mut inner);
    let law = if name == "inclusion1" {
        "inclusion1-functor"
    } else {
        "inclusion2-functor"
    };
    report.absorb(law, &inner, &witness!());
    let distinct: BTreeSet<usize> = incl.obj_map.iter().copied().collect();
    let law = if name == "inclusion1" {
        "inclusion1-injective"
    } else {
        "inclusion2-injective"
    };
    report.expect(law, distinct.len() == incl.obj_map.len(), || witness!());
    let distinct: BTreeSet<usize> = incl.mor_map.iter().copied().collect();
    report.expect(law, distinct.len() == incl.mor_map.len(), || witness!());
    Ok(())
}

/// Target morphisms between image objects that are not images themselves.
fn missing_from_image(target: &FiniteGroupoid, incl: &Inclusion) -> Vec<usize> {
    let c = target.category();
    let objs: BTreeSet<usize> = incl.obj_map.iter().copied().collect();
    let mors: BTreeSet<usize> = incl.mor_map.iter().copied().collect();
    (0..c.n_morphisms())
        .filter(|&m| objs.contains(&c.src(m)) && objs.contains(&c.tgt(m)) && !mors.contains(&m))
        .collect()
}

/// A 2-cell `f => f'` of the horizontal 2-category, labelled by `χ ∈ ker ∂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct HCell {
    pub source: usize,
    pub chi: usize,
    pub target: usize,
}

/// A 2-cell `(γ, x) => (γ', x)` of the vertical 2-category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct VCell {
    pub gamma: usize,
    pub x: usize,
    pub chi: usize,
    pub target_gamma: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoCellTable<T> {
    pub cells: Vec<T>,
    #[serde(skip)]
    pub report: Report,
}

/// 2-cells `(f, χ) : f => f ∘ Φ_(e,χ)(src f)` for `χ ∈ ker ∂`.
pub fn horizontal_2category(d: &TransDoubleCat) -> TwoCellTable<HCell> {
    let act = &d.act;
    let xm = act.xmod();
    let (g, h) = (xm.g(), xm.h());
    let c = d.category();
    let e = g.identity();
    let kernel = xm.kernel();
    let mut cells = Vec::new();
    for f in 0..c.n_morphisms() {
        for &chi in &kernel {
            let target = c.comp(f, crate::action::nat_component(act, e, chi, c.src(f)));
            cells.push(HCell {
                source: f,
                chi,
                target,
            });
        }
    }
    let mut report = Report::new();

    let mut brute: Vec<HCell> = d
        .squares()
        .filter(|&s| {
            let b = d.boundary(s);
            b.left.gamma == e && b.right.gamma == e
        })
        .map(|s| HCell {
            source: s.f,
            chi: s.chi,
            target: d.boundary(s).bottom,
        })
        .collect();
    brute.sort();
    let mut sorted = cells.clone();
    sorted.sort();
    report.expect("h2-bruteforce", sorted == brute, || witness!());

    let labels_per_f: BTreeSet<Vec<usize>> = (0..c.n_morphisms())
        .map(|f| {
            cells
                .iter()
                .filter(|k| k.source == f)
                .map(|k| k.chi)
                .collect()
        })
        .collect();
    report.expect(
        "h2-independent-of-f",
        labels_per_f.len() <= 1,
        || witness!(),
    );

    let lookup: HashMap<(usize, usize), usize> = cells
        .iter()
        .map(|k| ((k.source, k.chi), k.target))
        .collect();
    for k1 in &cells {
        for &chi2 in &kernel {
            let two_step = lookup[&(k1.target, chi2)];
            let one_step = lookup[&(k1.source, h.mul(chi2, k1.chi))];
            report.expect("h2-composition", two_step == one_step, || {
                witness!(f = k1.source, chi1 = k1.chi, chi2 = chi2)
            });
        }
    }

    if act.kind() == ActionKind::Adjoint {
        let nh = h.order();
        for k in &cells {
            let (gm, eta) = (k.source / nh, k.source % nh);
            let face = h.product(&[eta, k.chi, xm.act(gm, h.inv(k.chi))]);
            report.expect("h2-adjoint-formula", k.target == gm * nh + face, || {
                witness!(f = k.source, chi = k.chi)
            });
        }
    }
    TwoCellTable { cells, report }
}

/// 2-cells `χ : (γ, x) => (∂(χ)γ, x)` with `Φ_(γ,χ)(x)` an identity.
pub fn vertical_2category(d: &TransDoubleCat) -> TwoCellTable<VCell> {
    let act = &d.act;
    let xm = act.xmod();
    let (g, h) = (xm.g(), xm.h());
    let c = d.category();
    let mut cells = Vec::new();
    for gamma in g.elements() {
        for x in 0..c.n_objects() {
            for chi in h.elements() {
                if c.is_identity(act.component(gamma, chi, x)) {
                    cells.push(VCell {
                        gamma,
                        x,
                        chi,
                        target_gamma: g.mul(xm.d(chi), gamma),
                    });
                }
            }
        }
    }
    let mut report = Report::new();

    let mut brute: Vec<VCell> = d
        .squares()
        .filter(|&s| {
            let b = d.boundary(s);
            c.is_identity(b.top) && c.is_identity(b.bottom)
        })
        .map(|s| {
            let b = d.boundary(s);
            VCell {
                gamma: s.gamma,
                x: b.left.x,
                chi: s.chi,
                target_gamma: b.right.gamma,
            }
        })
        .collect();
    brute.sort();
    let mut sorted = cells.clone();
    sorted.sort();
    report.expect("v2-bruteforce", sorted == brute, || witness!());

    if act.kind() == ActionKind::Adjoint {
        for gamma in g.elements() {
            for x in g.elements() {
                let conj = g.conjugate(gamma, x);
                for chi in h.elements() {
                    let fixed = xm.act(conj, h.inv(chi)) == h.inv(chi);
                    let listed = cells
                        .iter()
                        .any(|k| k.gamma == gamma && k.x == x && k.chi == chi);
                    report.expect("v2-adjoint-reduction", fixed == listed, || {
                        witness!(gamma = gamma, x = x, chi = chi)
                    });
                }
            }
        }
    }
    TwoCellTable { cells, report }
}

impl TwoCellTable<VCell> {
    /// Number of 2-cells out of `(γ, x)`.
    pub fn count_from(&self, gamma: usize, x: usize) -> usize {
        self.cells
            .iter()
            .filter(|k| k.gamma == gamma && k.x == x)
            .count()
    }
}

/// Objects, both morphism families and every square with its boundary.
pub fn export_json(d: &TransDoubleCat) -> serde_json::Value {
    let c = d.category();
    let act = &d.act;
    let horizontal: Vec<_> = c
        .morphisms()
        .map(|(s, t)| json!({"src": s, "tgt": t}))
        .collect();
    let vertical: Vec<_> = (0..d.n_vertical())
        .map(|k| {
            let (gamma, x) = (k / d.n_objects(), k % d.n_objects());
            json!({"gamma": gamma, "x": x, "src": x, "tgt": act.obj(gamma, x)})
        })
        .collect();
    let squares: Vec<_> = d
        .squares()
        .map(|s| {
            let b = d.boundary(s);
            json!({
                "gamma": s.gamma, "chi": s.chi, "f": s.f,
                "top": b.top, "bottom": b.bottom,
                "left": [b.left.gamma, b.left.x], "right": [b.right.gamma, b.right.x],
            })
        })
        .collect();
    json!({
        "action": act.kind(),
        "objects": d.n_objects(),
        "horizontal": horizontal,
        "vertical": vertical,
        "squares": squares,
    })
}

/// DOT source for a groupoid, one cluster per connected component.
/// Identity morphisms are omitted.
pub fn export_dot(g: &FiniteGroupoid, name: &str, label: impl Fn(usize) -> String) -> String {
    let c = g.category();
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    for (k, comp) in g.components().iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{k} {{");
        let _ = writeln!(out, "    label=\"component {k}\";");
        for &x in comp {
            let _ = writeln!(
                out,
                "    n{x} [label=\"{}\"];",
                label(x).replace('"', "\\\"")
            );
        }
        let _ = writeln!(out, "  }}");
    }
    for f in 0..c.n_morphisms() {
        if !c.is_identity(f) {
            let _ = writeln!(out, "  n{} -> n{} [label=\"{f}\"];", c.src(f), c.tgt(f));
        }
    }
    out.push_str("}\n");
    out
}

//! Strict actions of a 2-group on a finite category.
//!
//! An action is stored as two complete tables: `act_obj[γ][x] = γ▷x` and
//! `act_mor[(γ,χ)][f] = (γ,χ)▷f`. The functor `Φ_γ` is the restriction to
//! `(γ, 1)`, and the natural transformation `Φ_(γ,χ)` has components
//! `(γ,χ)▷id_x`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::catgroup::underlying_category;
use crate::fincat::{check_functor, check_nat_trans, FiniteCategory, Functor, NatTrans};
use crate::quintet::{evaluate_grid, Quintet, QuintetGrid};
use crate::report::Report;
use crate::witness;
use crate::xmod::{validate_crossed_module, CrossedModule};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ActionError {
    #[error("malformed action tables: {0}")]
    Malformed(String),
    #[error("component {component} is invalid: {detail}")]
    ComponentInvalid {
        component: &'static str,
        detail: String,
    },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("the two composites for (γ,χ)▷f disagree at γ={gamma} χ={chi} f={f}")]
    ContractViolation { gamma: usize, chi: usize, f: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    Adjoint,
    Trivial,
    LeftMultiplication,
    Tables,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictAction {
    xm: Arc<CrossedModule>,
    cat: Arc<FiniteCategory>,
    act_obj: Vec<usize>,
    act_mor: Vec<usize>,
    kind: ActionKind,
}

impl StrictAction {
    /// Shape-checked tables: `act_obj` is `|G| × |Ob|`, `act_mor` is
    /// `|G⋉H| × |Mor|` with row `γ * |H| + χ`.
    pub fn new(
        xm: Arc<CrossedModule>,
        cat: Arc<FiniteCategory>,
        act_obj: Vec<usize>,
        act_mor: Vec<usize>,
    ) -> Result<Self, ActionError> {
        let (ng, nh) = (xm.g().order(), xm.h().order());
        if act_obj.len() != ng * cat.n_objects() {
            return Err(ActionError::Malformed(format!(
                "object table has {} entries, expected {}",
                act_obj.len(),
                ng * cat.n_objects()
            )));
        }
        if act_mor.len() != ng * nh * cat.n_morphisms() {
            return Err(ActionError::Malformed(format!(
                "morphism table has {} entries, expected {}",
                act_mor.len(),
                ng * nh * cat.n_morphisms()
            )));
        }
        if act_obj.iter().any(|&x| x >= cat.n_objects())
            || act_mor.iter().any(|&f| f >= cat.n_morphisms())
        {
            return Err(ActionError::Malformed("table entry out of range".into()));
        }
        Ok(StrictAction {
            xm,
            cat,
            act_obj,
            act_mor,
            kind: ActionKind::Tables,
        })
    }

    fn from_fns(
        xm: Arc<CrossedModule>,
        cat: Arc<FiniteCategory>,
        kind: ActionKind,
        obj: impl Fn(usize, usize) -> usize,
        mor: impl Fn(usize, usize, usize) -> usize,
    ) -> Self {
        let (ng, nh) = (xm.g().order(), xm.h().order());
        let act_obj = (0..ng)
            .flat_map(|g| (0..cat.n_objects()).map(move |x| (g, x)))
            .map(|(g, x)| obj(g, x))
            .collect();
        let mut act_mor = Vec::with_capacity(ng * nh * cat.n_morphisms());
        for g in 0..ng {
            for chi in 0..nh {
                for f in 0..cat.n_morphisms() {
                    act_mor.push(mor(g, chi, f));
                }
            }
        }
        StrictAction {
            xm,
            cat,
            act_obj,
            act_mor,
            kind,
        }
    }

    pub fn xmod(&self) -> &Arc<CrossedModule> {
        &self.xm
    }

    pub fn category(&self) -> &Arc<FiniteCategory> {
        &self.cat
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    pub fn act_obj_table(&self) -> &[usize] {
        &self.act_obj
    }

    pub fn act_mor_table(&self) -> &[usize] {
        &self.act_mor
    }

    /// `γ▷x`
    #[inline]
    pub fn obj(&self, gamma: usize, x: usize) -> usize {
        self.act_obj[gamma * self.cat.n_objects() + x]
    }

    /// `(γ,χ)▷f`
    #[inline]
    pub fn mor(&self, gamma: usize, chi: usize, f: usize) -> usize {
        self.act_mor[(gamma * self.xm.h().order() + chi) * self.cat.n_morphisms() + f]
    }

    /// `γ▷f = Φ_γ(f)`
    #[inline]
    pub fn functor_mor(&self, gamma: usize, f: usize) -> usize {
        self.mor(gamma, self.xm.h().identity(), f)
    }

    /// `Φ_(γ,χ)(x) = (γ,χ)▷id_x`
    #[inline]
    pub fn component(&self, gamma: usize, chi: usize, x: usize) -> usize {
        self.mor(gamma, chi, self.cat.id(x))
    }

    /// The same action with one morphism-table entry replaced.
    pub fn with_mor_entry(&self, gamma: usize, chi: usize, f: usize, value: usize) -> Self {
        let mut out = self.clone();
        let k = (gamma * self.xm.h().order() + chi) * self.cat.n_morphisms() + f;
        out.act_mor[k] = value;
        out.kind = ActionKind::Tables;
        out
    }

    pub fn phi_functor(&self, gamma: usize) -> Functor<'_> {
        let c = &*self.cat;
        Functor {
            source: c,
            target: c,
            obj_map: (0..c.n_objects()).map(|x| self.obj(gamma, x)).collect(),
            mor_map: (0..c.n_morphisms())
                .map(|f| self.functor_mor(gamma, f))
                .collect(),
        }
    }

    /// `Φ_(γ,χ) : Φ_γ ⇒ Φ_(∂(χ)γ)`
    pub fn phi_nat(&self, gamma: usize, chi: usize) -> NatTrans<'_> {
        let target = self.xm.g().mul(self.xm.d(chi), gamma);
        NatTrans {
            source: self.phi_functor(gamma),
            target: self.phi_functor(target),
            components: (0..self.cat.n_objects())
                .map(|x| self.component(gamma, chi, x))
                .collect(),
        }
    }
}

/// Checks both presentations of a strict action: the functors `Φ_γ` and
/// transformations `Φ_(γ,χ)` with conditions F1 and F2, and the action
/// functor with functoriality, the action square and the unit law.
pub fn validate_strict_action(a: &StrictAction) -> Result<Report, ActionError> {
    let mut report = Report::new();
    check_strict_action(a, &mut report)?;
    Ok(report)
}

pub fn check_strict_action(a: &StrictAction, report: &mut Report) -> Result<(), ActionError> {
    match validate_crossed_module(&a.xm) {
        Ok(r) if r.is_empty() => {}
        Ok(r) => {
            return Err(ActionError::ComponentInvalid {
                component: "crossed module",
                detail: format!("{} axiom violation(s)", r.total_failed()),
            })
        }
        Err(e) => {
            return Err(ActionError::ComponentInvalid {
                component: "crossed module",
                detail: e.to_string(),
            })
        }
    }
    let xm = &*a.xm;
    let (g, h, c) = (xm.g(), xm.h(), &*a.cat);
    let (ng, nh, nob, nmor) = (g.order(), h.order(), c.n_objects(), c.n_morphisms());
    let e_h = h.identity();

    for gamma in 0..ng {
        for chi in 0..nh {
            let target = g.mul(xm.d(chi), gamma);
            for f in 0..nmor {
                let m = a.mor(gamma, chi, f);
                let ok = c.src(m) == a.obj(gamma, c.src(f)) && c.tgt(m) == a.obj(target, c.tgt(f));
                report.expect("typing", ok, || witness!(gamma = gamma, chi = chi, f = f));
            }
        }
    }
    for x in 0..nob {
        report.expect("unit-object", a.obj(g.identity(), x) == x, || {
            witness!(x = x)
        });
    }
    for f in 0..nmor {
        report.expect("unit-morphism", a.mor(g.identity(), e_h, f) == f, || {
            witness!(f = f)
        });
    }

    // Φ presentation.
    for gamma in 0..ng {
        let mut inner = Report::with_cap(report.cap());
        check_functor(&a.phi_functor(gamma), &mut inner);
        report.absorb("phi-functor", &inner, &witness!(gamma = gamma));
    }
    for gamma in 0..ng {
        for chi in 0..nh {
            let mut inner = Report::with_cap(report.cap());
            check_nat_trans(&a.phi_nat(gamma, chi), &mut inner);
            report.absorb(
                "phi-naturality",
                &inner,
                &witness!(gamma = gamma, chi = chi),
            );
        }
    }
    for g1 in 0..ng {
        for chi1 in 0..nh {
            let g2 = g.mul(xm.d(chi1), g1);
            for chi2 in 0..nh {
                for x in 0..nob {
                    let lhs = c.compose(a.component(g2, chi2, x), a.component(g1, chi1, x));
                    let ok = lhs == Some(a.component(g1, h.mul(chi2, chi1), x));
                    report.expect("F1-1", ok, || {
                        witness!(gamma1 = g1, chi1 = chi1, chi2 = chi2, x = x)
                    });
                }
            }
        }
    }
    for gamma in 0..ng {
        for x in 0..nob {
            let ok = a.component(gamma, e_h, x) == c.id(a.obj(gamma, x));
            report.expect("F1-2", ok, || witness!(gamma = gamma, x = x));
        }
    }
    for g1 in 0..ng {
        for g3 in 0..ng {
            let g13 = g.mul(g1, g3);
            let objs = (0..nob).all(|x| a.obj(g1, a.obj(g3, x)) == a.obj(g13, x));
            let mors =
                (0..nmor).all(|f| a.functor_mor(g1, a.functor_mor(g3, f)) == a.functor_mor(g13, f));
            report.expect("F2-1", objs && mors, || witness!(gamma1 = g1, gamma3 = g3));
        }
    }
    for g1 in 0..ng {
        for chi1 in 0..nh {
            for g3 in 0..ng {
                for chi2 in 0..nh {
                    let g4 = g.mul(xm.d(chi2), g3);
                    let label = h.mul(chi1, xm.act(g1, chi2));
                    for x in 0..nob {
                        let first = a.functor_mor(g1, a.component(g3, chi2, x));
                        let second = a.component(g1, chi1, a.obj(g4, x));
                        let ok =
                            c.compose(second, first) == Some(a.component(g.mul(g1, g3), label, x));
                        report.expect("F2-2", ok, || {
                            witness!(gamma1 = g1, chi1 = chi1, gamma3 = g3, chi2 = chi2, x = x)
                        });
                    }
                }
            }
        }
    }

    // Action-functor presentation.
    let pairs: Vec<(usize, usize)> = c.composable_pairs().collect();
    let func1: Vec<Report> = (0..ng)
        .into_par_iter()
        .map(|g1| {
            let mut r = Report::with_cap(report.cap());
            for chi1 in 0..nh {
                let g2 = g.mul(xm.d(chi1), g1);
                for chi2 in 0..nh {
                    let chi21 = h.mul(chi2, chi1);
                    for &(gm, f) in &pairs {
                        let lhs = c.compose(a.mor(g2, chi2, gm), a.mor(g1, chi1, f));
                        let ok = lhs == Some(a.mor(g1, chi21, c.comp(gm, f)));
                        r.expect("phihat-func1", ok, || {
                            witness!(gamma1 = g1, chi1 = chi1, chi2 = chi2, g = gm, f = f)
                        });
                    }
                }
            }
            r
        })
        .collect();
    func1.into_iter().for_each(|r| report.merge(r));
    for gamma in 0..ng {
        for x in 0..nob {
            let ok = a.mor(gamma, e_h, c.id(x)) == c.id(a.obj(gamma, x));
            report.expect("phihat-func2", ok, || witness!(gamma = gamma, x = x));
        }
    }
    for g1 in 0..ng {
        for g3 in 0..ng {
            for x in 0..nob {
                let ok = a.obj(g.mul(g1, g3), x) == a.obj(g1, a.obj(g3, x));
                report.expect("as-objects", ok, || {
                    witness!(gamma1 = g1, gamma3 = g3, x = x)
                });
            }
        }
    }
    let asm: Vec<Report> = (0..ng)
        .into_par_iter()
        .map(|g1| {
            let mut r = Report::with_cap(report.cap());
            for chi1 in 0..nh {
                for g3 in 0..ng {
                    for chi2 in 0..nh {
                        let label = h.mul(chi1, xm.act(g1, chi2));
                        let g13 = g.mul(g1, g3);
                        for f in 0..nmor {
                            let ok = a.mor(g13, label, f) == a.mor(g1, chi1, a.mor(g3, chi2, f));
                            r.expect("as-morphisms", ok, || {
                                witness!(gamma1 = g1, chi1 = chi1, gamma3 = g3, chi2 = chi2, f = f)
                            });
                        }
                    }
                }
            }
            r
        })
        .collect();
    asm.into_iter().for_each(|r| report.merge(r));

    // The action functor is recovered from Φ by either composite.
    for gamma in 0..ng {
        for chi in 0..nh {
            let target = g.mul(xm.d(chi), gamma);
            for f in 0..nmor {
                let (x, y) = (c.src(f), c.tgt(f));
                let direct = Some(a.mor(gamma, chi, f));
                let via_target = c.compose(a.functor_mor(target, f), a.component(gamma, chi, x));
                let via_source = c.compose(a.component(gamma, chi, y), a.functor_mor(gamma, f));
                let ok = direct == via_target && direct == via_source;
                report.expect("phihat-from-phi", ok, || {
                    witness!(gamma = gamma, chi = chi, f = f)
                });
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operand {
    /// `γ▷x`
    Object { gamma: usize, x: usize },
    /// `γ▷f`
    MorphismByObject { gamma: usize, f: usize },
    /// `(γ,χ)▷f`
    MorphismByMorphism { gamma: usize, chi: usize, f: usize },
}

/// Table lookup for the three senses of `▷`. For `(γ,χ)▷f` both composites
/// `(∂(χ)γ▷f)∘Φ_(γ,χ)(x)` and `Φ_(γ,χ)(y)∘(γ▷f)` are computed and must agree
/// with the table.
pub fn apply_action(a: &StrictAction, operand: Operand) -> Result<usize, ActionError> {
    let (ng, nh) = (a.xm.g().order(), a.xm.h().order());
    let (nob, nmor) = (a.cat.n_objects(), a.cat.n_morphisms());
    let check = |ok: bool, what: String| {
        if ok {
            Ok(())
        } else {
            Err(ActionError::TypeMismatch(what))
        }
    };
    match operand {
        Operand::Object { gamma, x } => {
            check(gamma < ng, format!("{gamma} is not in G"))?;
            check(x < nob, format!("{x} is not an object"))?;
            Ok(a.obj(gamma, x))
        }
        Operand::MorphismByObject { gamma, f } => {
            check(gamma < ng, format!("{gamma} is not in G"))?;
            check(f < nmor, format!("{f} is not a morphism"))?;
            Ok(a.functor_mor(gamma, f))
        }
        Operand::MorphismByMorphism { gamma, chi, f } => {
            check(gamma < ng, format!("{gamma} is not in G"))?;
            check(chi < nh, format!("{chi} is not in H"))?;
            check(f < nmor, format!("{f} is not a morphism"))?;
            let c = &a.cat;
            let target = a.xm.g().mul(a.xm.d(chi), gamma);
            let direct = a.mor(gamma, chi, f);
            let via_target = c.compose(a.functor_mor(target, f), a.component(gamma, chi, c.src(f)));
            let via_source = c.compose(a.component(gamma, chi, c.tgt(f)), a.functor_mor(gamma, f));
            if via_target != Some(direct) || via_source != Some(direct) {
                return Err(ActionError::ContractViolation { gamma, chi, f });
            }
            Ok(direct)
        }
    }
}

/// `Φ_(γ,χ)(x)`, a morphism `γ▷x -> ∂(χ)γ▷x`.
pub fn nat_component(a: &StrictAction, gamma: usize, chi: usize, x: usize) -> usize {
    a.component(gamma, chi, x)
}

/// The 2-group acting on its own underlying category by conjugation:
/// `γ▷g = γgγ⁻¹` and `(γ,χ)▷(g,η) = (γgγ⁻¹, χ·(γ▷η)·((γgγ⁻¹)▷χ⁻¹))`.
pub fn adjoint_action(xm: Arc<CrossedModule>) -> StrictAction {
    let cat = Arc::new(underlying_category(&xm));
    let x = xm.clone();
    let nh = xm.h().order();
    StrictAction::from_fns(
        xm,
        cat,
        ActionKind::Adjoint,
        |gamma, g| x.g().conjugate(gamma, g),
        |gamma, chi, f| {
            let (g, h) = (x.g(), x.h());
            let (m, eta) = (f / nh, f % nh);
            let conj = g.conjugate(gamma, m);
            let face = h.product(&[chi, x.act(gamma, eta), x.act(conj, h.inv(chi))]);
            conj * nh + face
        },
    )
}

/// Everything acts as the identity.
pub fn trivial_action(xm: Arc<CrossedModule>, cat: Arc<FiniteCategory>) -> StrictAction {
    StrictAction::from_fns(xm, cat, ActionKind::Trivial, |_, x| x, |_, _, f| f)
}

/// The 2-group acting on its underlying category by the tensor product on the left.
pub fn left_multiplication_action(xm: Arc<CrossedModule>) -> StrictAction {
    let cat = Arc::new(underlying_category(&xm));
    let x = xm.clone();
    let nh = xm.h().order();
    StrictAction::from_fns(
        xm,
        cat,
        ActionKind::LeftMultiplication,
        |gamma, g| x.g().mul(gamma, g),
        |gamma, chi, f| {
            let (g, eta) = crate::catgroup::tensor_raw(&x, (gamma, chi), (f / nh, f % nh));
            g * nh + eta
        },
    )
}

/// `(γ,χ)▷(g,η)` for the adjoint action, computed by evaluating the row of
/// five squares `(χ)(γ)(η)(γ⁻¹)(χ⁻¹)` whose vertical edges are identities.
pub fn adjoint_whiskering_oracle(
    xm: &Arc<CrossedModule>,
    gamma: usize,
    chi: usize,
    g: usize,
    eta: usize,
) -> (usize, usize) {
    let (grp, h) = (xm.g(), xm.h());
    let e = grp.identity();
    let thin = |top: usize, face: usize| Quintet {
        left: e,
        top,
        right: e,
        bottom: grp.mul(xm.d(face), top),
        face,
    };
    let row = vec![
        thin(e, chi),
        thin(gamma, h.identity()),
        thin(g, eta),
        thin(grp.inv(gamma), h.identity()),
        thin(e, h.inv(chi)),
    ];
    let grid = QuintetGrid::from_rows(xm.clone(), vec![row]).expect("thin squares are adjacent");
    let out = evaluate_grid(&grid).expect("adjacent");
    (out.top, out.face)
}

/// A strict-action-shaped pair of tables together with a compositor
/// `φ_(γ1,γ2)(x) : γ1▷(γ2▷x) -> (γ1γ2)▷x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakActionData {
    pub base: StrictAction,
    compositor: Vec<usize>,
}

impl WeakActionData {
    pub fn new(base: StrictAction, compositor: Vec<usize>) -> Result<Self, ActionError> {
        let ng = base.xm.g().order();
        if compositor.len() != ng * ng * base.cat.n_objects() {
            return Err(ActionError::Malformed(
                "compositor table has the wrong size".into(),
            ));
        }
        if compositor.iter().any(|&m| m >= base.cat.n_morphisms()) {
            return Err(ActionError::Malformed(
                "compositor entry out of range".into(),
            ));
        }
        Ok(WeakActionData { base, compositor })
    }

    /// Identity components, for a base that is strict on objects.
    pub fn identity_compositor(base: StrictAction) -> Self {
        let ng = base.xm.g().order();
        let nob = base.cat.n_objects();
        let mut compositor = Vec::with_capacity(ng * ng * nob);
        for g1 in 0..ng {
            for g2 in 0..ng {
                for x in 0..nob {
                    compositor.push(base.cat.id(base.obj(base.xm.g().mul(g1, g2), x)));
                }
            }
        }
        WeakActionData { base, compositor }
    }

    #[inline]
    pub fn phi(&self, g1: usize, g2: usize, x: usize) -> usize {
        let ng = self.base.xm.g().order();
        self.compositor[(g1 * ng + g2) * self.base.cat.n_objects() + x]
    }

    pub fn with_component(&self, g1: usize, g2: usize, x: usize, m: usize) -> Self {
        let mut out = self.clone();
        let ng = self.base.xm.g().order();
        out.compositor[(g1 * ng + g2) * self.base.cat.n_objects() + x] = m;
        out
    }
}

/// Pentagon, unit, typing, invertibility and naturality of a compositor.
pub fn check_compositor_coherence(w: &WeakActionData) -> Report {
    let mut report = Report::new();
    let a = &w.base;
    let xm = &*a.xm;
    let (g, h, c) = (xm.g(), xm.h(), &*a.cat);
    let (ng, nh, nob) = (g.order(), h.order(), c.n_objects());
    let e = g.identity();

    for g1 in 0..ng {
        for g2 in 0..ng {
            for x in 0..nob {
                let m = w.phi(g1, g2, x);
                let ok = c.src(m) == a.obj(g1, a.obj(g2, x)) && c.tgt(m) == a.obj(g.mul(g1, g2), x);
                report.expect("compositor-typing", ok, || {
                    witness!(gamma1 = g1, gamma2 = g2, x = x)
                });
                report.expect("compositor-invertible", c.inverse(m).is_some(), || {
                    witness!(gamma1 = g1, gamma2 = g2, x = x)
                });
            }
        }
    }
    for gamma in 0..ng {
        for x in 0..nob {
            let ok = c.is_identity(w.phi(e, gamma, x)) && c.is_identity(w.phi(gamma, e, x));
            report.expect("compositor-unit", ok, || witness!(gamma = gamma, x = x));
        }
    }
    for f in 0..ng {
        for gg in 0..ng {
            let fg = g.mul(f, gg);
            for hh in 0..ng {
                let gh = g.mul(gg, hh);
                for x in 0..nob {
                    let lhs = c.compose(w.phi(fg, hh, x), w.phi(f, gg, a.obj(hh, x)));
                    let rhs = c.compose(w.phi(f, gh, x), a.functor_mor(f, w.phi(gg, hh, x)));
                    report.expect("pentagon", lhs.is_some() && lhs == rhs, || {
                        witness!(f = f, g = gg, h = hh, x = x)
                    });
                }
            }
        }
    }
    for g1 in 0..ng {
        for chi1 in 0..nh {
            let g1t = g.mul(xm.d(chi1), g1);
            for g2 in 0..ng {
                for chi2 in 0..nh {
                    let g2t = g.mul(xm.d(chi2), g2);
                    let label = h.mul(chi1, xm.act(g1, chi2));
                    for f in 0..c.n_morphisms() {
                        let (x, y) = (c.src(f), c.tgt(f));
                        let lhs =
                            c.compose(w.phi(g1t, g2t, y), a.mor(g1, chi1, a.mor(g2, chi2, f)));
                        let rhs = c.compose(a.mor(g.mul(g1, g2), label, f), w.phi(g1, g2, x));
                        report.expect("compositor-natural", lhs.is_some() && lhs == rhs, || {
                            witness!(gamma1 = g1, chi1 = chi1, gamma2 = g2, chi2 = chi2, f = f)
                        });
                    }
                }
            }
        }
    }
    report
}

//! Crossed modules `(G, H, ∂, ▷)` and a brute-force enumerator.

use std::sync::Arc;

use thiserror::Error;

use crate::groups::{
    check_automorphism_action, check_homomorphism, conjugation_action, FiniteGroup, GroupAction,
    Homomorphism,
};
use crate::report::Report;
use crate::witness;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum XmodError {
    #[error("component {component} is invalid ({} violation(s))", report.total_failed())]
    ComponentInvalid {
        component: &'static str,
        report: Report,
    },
    #[error("crossed module axioms fail ({} violation(s))", .0.total_failed())]
    AxiomsFail(Report),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("the acted-on group is not abelian, so a trivial boundary cannot satisfy the Peiffer identity")]
    SpaceNotAbelian,
    #[error("enumeration exceeded its budget of {budget} steps")]
    BudgetExceeded { budget: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossedModule {
    g: Arc<FiniteGroup>,
    h: Arc<FiniteGroup>,
    boundary: Homomorphism,
    action: GroupAction,
}

impl CrossedModule {
    /// Assembles the data after checking only that the four pieces fit
    /// together. Use [`validate_crossed_module`] or [`CrossedModule::new`]
    /// for the axioms.
    pub fn from_parts(boundary: Homomorphism, action: GroupAction) -> Result<Self, XmodError> {
        if boundary.source() != action.space() {
            return Err(XmodError::ShapeMismatch(
                "boundary source differs from the acted-on group".into(),
            ));
        }
        if boundary.target() != action.actor() {
            return Err(XmodError::ShapeMismatch(
                "boundary target differs from the acting group".into(),
            ));
        }
        Ok(CrossedModule {
            g: action.actor().clone(),
            h: action.space().clone(),
            boundary,
            action,
        })
    }

    /// Assembles and validates; fails unless every axiom holds.
    pub fn new(boundary: Homomorphism, action: GroupAction) -> Result<Self, XmodError> {
        let xm = Self::from_parts(boundary, action)?;
        let report = validate_crossed_module(&xm)?;
        if report.is_empty() {
            Ok(xm)
        } else {
            Err(XmodError::AxiomsFail(report))
        }
    }

    pub fn g(&self) -> &Arc<FiniteGroup> {
        &self.g
    }

    pub fn h(&self) -> &Arc<FiniteGroup> {
        &self.h
    }

    pub fn boundary(&self) -> &Homomorphism {
        &self.boundary
    }

    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    /// `∂(η)`
    #[inline]
    pub fn d(&self, eta: usize) -> usize {
        self.boundary.apply(eta)
    }

    /// `g ▷ η`
    #[inline]
    pub fn act(&self, g: usize, eta: usize) -> usize {
        self.action.act(g, eta)
    }

    pub fn kernel(&self) -> Vec<usize> {
        self.h
            .elements()
            .filter(|&eta| self.d(eta) == self.g.identity())
            .collect()
    }

    pub fn image(&self) -> Vec<usize> {
        let mut hit = vec![false; self.g.order()];
        for eta in self.h.elements() {
            hit[self.d(eta)] = true;
        }
        self.g.elements().filter(|&g| hit[g]).collect()
    }
}

/// Checks CM1 and CM2 on every pair. Components are validated first; if any
/// of them fails the axioms are not attempted.
pub fn validate_crossed_module(xm: &CrossedModule) -> Result<Report, XmodError> {
    let mut report = Report::new();
    check_crossed_module(xm, &mut report)?;
    Ok(report)
}

pub fn check_crossed_module(xm: &CrossedModule, report: &mut Report) -> Result<(), XmodError> {
    let mut hom = Report::new();
    check_homomorphism(&xm.boundary, &mut hom);
    if !hom.is_empty() {
        return Err(XmodError::ComponentInvalid {
            component: "boundary",
            report: hom,
        });
    }
    let mut act = Report::new();
    check_automorphism_action(&xm.action, &mut act);
    if !act.is_empty() {
        return Err(XmodError::ComponentInvalid {
            component: "action",
            report: act,
        });
    }
    let (g, h) = (&xm.g, &xm.h);
    for x in g.elements() {
        for eta in h.elements() {
            let ok = xm.d(xm.act(x, eta)) == g.conjugate(x, xm.d(eta));
            report.expect("CM1", ok, || witness!(g = x, eta = eta));
        }
    }
    for eta in h.elements() {
        for zeta in h.elements() {
            let ok = xm.act(xm.d(eta), zeta) == h.conjugate(eta, zeta);
            report.expect("CM2", ok, || witness!(eta = eta, zeta = zeta));
        }
    }
    Ok(())
}

/// `H = G`, `∂ = id`, `▷` = conjugation.
pub fn xmod_identity(g: Arc<FiniteGroup>) -> CrossedModule {
    let action = conjugation_action(&g);
    let boundary = Homomorphism::identity(g.clone());
    CrossedModule {
        g: g.clone(),
        h: g,
        boundary,
        action,
    }
}

/// `∂` constant at the identity; requires an abelian acted-on group.
pub fn xmod_trivial_boundary(act: GroupAction) -> Result<CrossedModule, XmodError> {
    let mut report = Report::new();
    check_automorphism_action(&act, &mut report);
    if !report.is_empty() {
        return Err(XmodError::ComponentInvalid {
            component: "action",
            report,
        });
    }
    if !act.space().is_abelian() {
        return Err(XmodError::SpaceNotAbelian);
    }
    let boundary = Homomorphism::trivial(act.space().clone(), act.actor().clone());
    Ok(CrossedModule {
        g: act.actor().clone(),
        h: act.space().clone(),
        boundary,
        action: act,
    })
}

struct Budget {
    limit: u64,
    used: u64,
}

impl Budget {
    fn spend(&mut self) -> Result<(), XmodError> {
        self.used += 1;
        if self.used > self.limit {
            Err(XmodError::BudgetExceeded { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

/// All homomorphisms `src -> dst` as maps, by backtracking over images in
/// index order; a partial map is cut as soon as an assigned product disagrees.
fn homomorphism_maps(
    src: &FiniteGroup,
    dst: &FiniteGroup,
    budget: &mut Budget,
) -> Result<Vec<Vec<usize>>, XmodError> {
    fn consistent(src: &FiniteGroup, dst: &FiniteGroup, map: &[usize]) -> bool {
        let k = map.len() - 1;
        (0..=k).all(|a| {
            (0..=k).all(|b| {
                let ab = src.mul(a, b);
                ab > k || (a != k && b != k && ab != k) || map[ab] == dst.mul(map[a], map[b])
            })
        })
    }
    fn extend(
        src: &FiniteGroup,
        dst: &FiniteGroup,
        map: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        budget: &mut Budget,
    ) -> Result<(), XmodError> {
        if map.len() == src.order() {
            out.push(map.clone());
            return Ok(());
        }
        for image in dst.elements() {
            budget.spend()?;
            map.push(image);
            if consistent(src, dst, map) {
                extend(src, dst, map, out, budget)?;
            }
            map.pop();
        }
        Ok(())
    }
    let mut out = Vec::new();
    extend(src, dst, &mut Vec::new(), &mut out, budget)?;
    Ok(out)
}

/// `Aut(H)` as image arrays: the bijective endomorphisms.
fn automorphisms(h: &FiniteGroup, budget: &mut Budget) -> Result<Vec<Vec<usize>>, XmodError> {
    let endo = homomorphism_maps(h, h, budget)?;
    Ok(endo
        .into_iter()
        .filter(|m| {
            let mut seen = vec![false; m.len()];
            m.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
        })
        .collect())
}

/// Every `(∂, ▷)` making `(G, H, ∂, ▷)` a crossed module, ordered by the
/// boundary map and then by the action table. `budget` bounds the number of
/// search steps.
pub fn enumerate_crossed_modules(
    g: &Arc<FiniteGroup>,
    h: &Arc<FiniteGroup>,
    budget: u64,
) -> Result<Vec<CrossedModule>, XmodError> {
    let mut budget = Budget {
        limit: budget,
        used: 0,
    };
    let boundaries = homomorphism_maps(h, g, &mut budget)?;
    let auts = automorphisms(h, &mut budget)?;

    // Compose automorphisms once: comp[i][j] is the index of auts[i] ∘ auts[j].
    let n = h.order();
    let comp: Vec<Vec<usize>> = auts
        .iter()
        .map(|a| {
            auts.iter()
                .map(|b| {
                    let ab: Vec<usize> = (0..n).map(|x| a[b[x]]).collect();
                    auts.iter()
                        .position(|c| *c == ab)
                        .expect("Aut(H) is closed")
                })
                .collect()
        })
        .collect();
    let aut_group = table_group(&comp);
    let action_choices = match aut_group {
        Some(aut) => homomorphism_maps(g, &aut, &mut budget)?,
        None => unreachable!("Aut(H) under composition is a group"),
    };

    let mut out = Vec::new();
    for d in &boundaries {
        for choice in &action_choices {
            budget.spend()?;
            let act = |x: usize, eta: usize| auts[choice[x]][eta];
            let cm1 = g.elements().all(|x| {
                h.elements()
                    .all(|eta| d[act(x, eta)] == g.mul(g.mul(x, d[eta]), g.inv(x)))
            });
            let cm2 = cm1
                && h.elements().all(|eta| {
                    h.elements()
                        .all(|zeta| act(d[eta], zeta) == h.mul(h.mul(eta, zeta), h.inv(eta)))
                });
            if cm2 {
                let table = g
                    .elements()
                    .flat_map(|x| h.elements().map(move |eta| (x, eta)))
                    .map(|(x, eta)| act(x, eta))
                    .collect();
                let boundary = Homomorphism::new(h.clone(), g.clone(), d.clone())
                    .expect("boundary map is in range");
                out.push(CrossedModule {
                    g: g.clone(),
                    h: h.clone(),
                    boundary,
                    action: GroupAction::from_flat(g.clone(), h.clone(), table),
                });
            }
        }
    }
    Ok(out)
}

/// Group from a composition table whose identity is found by search.
fn table_group(comp: &[Vec<usize>]) -> Option<FiniteGroup> {
    let n = comp.len();
    let e = (0..n).find(|&e| (0..n).all(|a| comp[e][a] == a && comp[a][e] == a))?;
    FiniteGroup::from_table(comp, e).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn xm1_is_valid() {
        let xm = catalog::xm1();
        assert!(validate_crossed_module(&xm).unwrap().is_empty());
        assert_eq!(xm.kernel(), vec![0, 1, 2]);
    }

    #[test]
    fn trivial_boundary_on_s3_violates_peiffer() {
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        let one = Arc::new(FiniteGroup::trivial());
        let xm = CrossedModule::from_parts(
            Homomorphism::trivial(s3.clone(), one.clone()),
            GroupAction::trivial(one, s3.clone()),
        )
        .unwrap();
        let report = validate_crossed_module(&xm).unwrap();
        assert!(!report.has_violation("CM1"));
        let (t12, c123) = (s3.index_of("(12)").unwrap(), s3.index_of("(123)").unwrap());
        assert!(report
            .violations_of("CM2")
            .any(|v| v.witness.get("eta") == Some(t12) && v.witness.get("zeta") == Some(c123)));
        assert!(matches!(
            xmod_trivial_boundary(GroupAction::trivial(Arc::new(FiniteGroup::cyclic(2)), s3)),
            Err(XmodError::SpaceNotAbelian)
        ));
    }

    #[test]
    fn identity_constructions() {
        for g in [
            FiniteGroup::trivial(),
            FiniteGroup::cyclic(3),
            FiniteGroup::symmetric(3),
        ] {
            let xm = xmod_identity(Arc::new(g));
            assert!(validate_crossed_module(&xm).unwrap().is_empty());
        }
        assert!(xmod_identity(Arc::new(FiniteGroup::cyclic(3)))
            .action()
            .is_trivial());
    }

    #[test]
    fn broken_component_is_reported_not_checked() {
        let z4 = Arc::new(FiniteGroup::cyclic(4));
        let shift = Homomorphism::new(z4.clone(), z4.clone(), vec![1, 2, 3, 0]).unwrap();
        let xm = CrossedModule::from_parts(shift, conjugation_action(&z4)).unwrap();
        assert!(matches!(
            validate_crossed_module(&xm),
            Err(XmodError::ComponentInvalid {
                component: "boundary",
                ..
            })
        ));
    }

    #[test]
    fn enumeration_small_cases() {
        let one = Arc::new(FiniteGroup::trivial());
        let z2 = Arc::new(FiniteGroup::cyclic(2));
        let z3 = Arc::new(FiniteGroup::cyclic(3));
        let s3 = Arc::new(FiniteGroup::symmetric(3));
        assert_eq!(
            enumerate_crossed_modules(&one, &z3, 1 << 20).unwrap().len(),
            1
        );
        assert!(enumerate_crossed_modules(&one, &s3, 1 << 20)
            .unwrap()
            .is_empty());
        // Aut(Z/2) is trivial, so only the boundary varies: trivial or identity.
        assert_eq!(
            enumerate_crossed_modules(&z2, &z2, 1 << 20).unwrap().len(),
            2
        );
        assert_eq!(
            enumerate_crossed_modules(&s3, &s3, 10),
            Err(XmodError::BudgetExceeded { budget: 10 })
        );
    }

    #[test]
    fn boundary_image_normal_and_kernel_central() {
        for (_, xm) in catalog::crossed_modules() {
            let g = xm.g();
            let h = xm.h();
            let image = xm.image();
            for x in g.elements() {
                for &y in &image {
                    assert!(image.contains(&g.conjugate(x, y)));
                }
            }
            for k in xm.kernel() {
                for eta in h.elements() {
                    assert_eq!(h.mul(k, eta), h.mul(eta, k));
                    assert_eq!(xm.act(xm.d(eta), k), k);
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn catalog_axioms_hold_pointwise(k in 0usize..4, g in 0usize..6, eta in 0usize..12, zeta in 0usize..12) {
                let xm = &catalog::crossed_modules()[k].1;
                let (gg, h) = (xm.g(), xm.h());
                let (g, eta, zeta) = (g % gg.order(), eta % h.order(), zeta % h.order());
                prop_assert_eq!(xm.d(xm.act(g, eta)), gg.conjugate(g, xm.d(eta)));
                prop_assert_eq!(xm.act(xm.d(eta), zeta), h.conjugate(eta, zeta));
            }

            #[test]
            fn identity_xmod_is_valid(k in 0usize..8) {
                let (_, g) = &catalog::small_groups()[k];
                prop_assert!(validate_crossed_module(&xmod_identity(g.clone())).unwrap().is_empty());
            }
        }
    }
}

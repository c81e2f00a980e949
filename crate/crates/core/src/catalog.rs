//! The shipped fixture crossed modules and small groups.

use std::sync::Arc;

use crate::groups::{FiniteGroup, GroupAction, Homomorphism};
use crate::xmod::{xmod_identity, xmod_trivial_boundary, CrossedModule};

/// Z/2 acting on Z/3 by inversion, trivial boundary.
pub fn xm1() -> CrossedModule {
    let z2 = Arc::new(FiniteGroup::cyclic(2));
    let z3 = Arc::new(FiniteGroup::cyclic(3));
    let act = GroupAction::new(z2, z3, &[vec![0, 1, 2], vec![0, 2, 1]]).expect("shape");
    xmod_trivial_boundary(act).expect("inversion on Z/3 is a crossed module")
}

/// Identity crossed module on S3.
pub fn xm2() -> CrossedModule {
    xmod_identity(Arc::new(FiniteGroup::symmetric(3)))
}

/// Trivial G, H = Z/2.
pub fn xm3() -> CrossedModule {
    let one = Arc::new(FiniteGroup::trivial());
    let z2 = Arc::new(FiniteGroup::cyclic(2));
    xmod_trivial_boundary(GroupAction::trivial(one, z2)).expect("abelian")
}

/// Identity crossed module on Z/4.
pub fn xm4() -> CrossedModule {
    xmod_identity(Arc::new(FiniteGroup::cyclic(4)))
}

/// Trivial 2-group: both groups trivial.
pub fn trivial_xmod() -> CrossedModule {
    xmod_identity(Arc::new(FiniteGroup::trivial()))
}

/// Trivial G, H = S3, trivial boundary: fails the Peiffer identity.
pub fn bad_peiffer() -> CrossedModule {
    let one = Arc::new(FiniteGroup::trivial());
    let s3 = Arc::new(FiniteGroup::symmetric(3));
    CrossedModule::from_parts(
        Homomorphism::trivial(s3.clone(), one.clone()),
        GroupAction::trivial(one, s3),
    )
    .expect("shapes agree")
}

pub fn crossed_modules() -> Vec<(&'static str, CrossedModule)> {
    vec![
        ("xm1", xm1()),
        ("xm2", xm2()),
        ("xm3", xm3()),
        ("xm4", xm4()),
    ]
}

/// One representative of every isomorphism class of order at most 6.
pub fn small_groups() -> Vec<(&'static str, Arc<FiniteGroup>)> {
    vec![
        ("trivial", FiniteGroup::trivial()),
        ("z2", FiniteGroup::cyclic(2)),
        ("z3", FiniteGroup::cyclic(3)),
        ("z4", FiniteGroup::cyclic(4)),
        ("klein4", FiniteGroup::klein_four()),
        ("z5", FiniteGroup::cyclic(5)),
        ("z6", FiniteGroup::cyclic(6)),
        ("s3", FiniteGroup::symmetric(3)),
    ]
    .into_iter()
    .map(|(name, g)| (name, Arc::new(g)))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xmod::validate_crossed_module;

    #[test]
    fn catalog_is_valid() {
        for (name, xm) in crossed_modules() {
            assert!(validate_crossed_module(&xm).unwrap().is_empty(), "{name}");
        }
        assert!(validate_crossed_module(&trivial_xmod()).unwrap().is_empty());
        assert!(!validate_crossed_module(&bad_peiffer()).unwrap().is_empty());
    }

    #[test]
    fn orders() {
        let orders: Vec<(usize, usize)> = crossed_modules()
            .iter()
            .map(|(_, xm)| (xm.g().order(), xm.h().order()))
            .collect();
        assert_eq!(orders, [(2, 3), (6, 6), (1, 2), (4, 4)]);
    }
}

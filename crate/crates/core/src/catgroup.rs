//! The categorical group of a crossed module.
//!
//! A morphism is a pair `(g, η)` with source `g` and target `∂(η)g`.
//! Composition is written right to left: `compose(later, earlier)`.

use std::fmt;

use serde::ser::{SerializeTuple, Serializer};
use serde::Serialize;
use thiserror::Error;

use crate::fincat::FiniteCategory;
use crate::groups::FiniteGroup;
use crate::xmod::CrossedModule;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CatGroupError {
    #[error("not composable: source {source_of_later} of the later morphism differs from target {target_of_earlier} of the earlier one")]
    NotComposable {
        source_of_later: usize,
        target_of_earlier: usize,
    },
    #[error("morphisms belong to different crossed modules")]
    MixedCrossedModules,
    #[error("index out of range: {0}")]
    OutOfRange(String),
}

#[derive(Clone, Copy)]
pub struct Mor2G<'x> {
    xm: &'x CrossedModule,
    pub g: usize,
    pub eta: usize,
}

impl PartialEq for Mor2G<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.xm, other.xm) && self.g == other.g && self.eta == other.eta
    }
}

impl Eq for Mor2G<'_> {}

impl fmt::Debug for Mor2G<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.g, self.eta)
    }
}

impl Serialize for Mor2G<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(2)?;
        t.serialize_element(&self.g)?;
        t.serialize_element(&self.eta)?;
        t.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InverseKind {
    Tensor,
    Compose,
}

impl<'x> Mor2G<'x> {
    pub fn new(xm: &'x CrossedModule, g: usize, eta: usize) -> Result<Self, CatGroupError> {
        if g >= xm.g().order() || eta >= xm.h().order() {
            return Err(CatGroupError::OutOfRange(format!("({g}, {eta})")));
        }
        Ok(Mor2G { xm, g, eta })
    }

    pub fn identity(xm: &'x CrossedModule, g: usize) -> Self {
        Mor2G {
            xm,
            g,
            eta: xm.h().identity(),
        }
    }

    pub fn xmod(&self) -> &'x CrossedModule {
        self.xm
    }

    pub fn source(&self) -> usize {
        self.g
    }

    pub fn target(&self) -> usize {
        self.xm.g().mul(self.xm.d(self.eta), self.g)
    }

    /// Index in [`underlying_category`] and [`semidirect_group`].
    pub fn index(&self) -> usize {
        self.g * self.xm.h().order() + self.eta
    }

    pub fn from_index(xm: &'x CrossedModule, k: usize) -> Self {
        let n = xm.h().order();
        Mor2G {
            xm,
            g: k / n,
            eta: k % n,
        }
    }
}

/// `(source, target) = (g, ∂(η)g)`.
pub fn boundary(m: Mor2G<'_>) -> (usize, usize) {
    (m.source(), m.target())
}

/// `(∂(η)g, ζ) ∘ (g, η) = (g, ζη)`.
pub fn compose<'x>(later: Mor2G<'x>, earlier: Mor2G<'x>) -> Result<Mor2G<'x>, CatGroupError> {
    if !std::ptr::eq(later.xm, earlier.xm) {
        return Err(CatGroupError::MixedCrossedModules);
    }
    if later.source() != earlier.target() {
        return Err(CatGroupError::NotComposable {
            source_of_later: later.source(),
            target_of_earlier: earlier.target(),
        });
    }
    Ok(Mor2G {
        xm: earlier.xm,
        g: earlier.g,
        eta: earlier.xm.h().mul(later.eta, earlier.eta),
    })
}

/// `(g₁, η) ⊗ (g₂, ζ) = (g₁g₂, η(g₁▷ζ))`.
pub fn tensor<'x>(m1: Mor2G<'x>, m2: Mor2G<'x>) -> Result<Mor2G<'x>, CatGroupError> {
    if !std::ptr::eq(m1.xm, m2.xm) {
        return Err(CatGroupError::MixedCrossedModules);
    }
    Ok(tensor_raw(m1.xm, (m1.g, m1.eta), (m2.g, m2.eta))).map(|(g, eta)| Mor2G {
        xm: m1.xm,
        g,
        eta,
    })
}

pub(crate) fn tensor_raw(
    xm: &CrossedModule,
    a: (usize, usize),
    b: (usize, usize),
) -> (usize, usize) {
    (xm.g().mul(a.0, b.0), xm.h().mul(a.1, xm.act(a.0, b.1)))
}

pub fn invert(m: Mor2G<'_>, kind: InverseKind) -> Mor2G<'_> {
    let (g, h) = (m.xm.g(), m.xm.h());
    match kind {
        InverseKind::Tensor => {
            let gi = g.inv(m.g);
            Mor2G {
                xm: m.xm,
                g: gi,
                eta: m.xm.act(gi, h.inv(m.eta)),
            }
        }
        InverseKind::Compose => Mor2G {
            xm: m.xm,
            g: m.target(),
            eta: h.inv(m.eta),
        },
    }
}

/// Objects are `G`; morphism `(g, η)` has index `g * |H| + η`.
pub fn underlying_category(xm: &CrossedModule) -> FiniteCategory {
    let (g, h) = (xm.g(), xm.h());
    let nh = h.order();
    let morphisms: Vec<(usize, usize)> = (0..g.order() * nh)
        .map(|k| {
            let m = Mor2G::from_index(xm, k);
            (m.source(), m.target())
        })
        .collect();
    let identity: Vec<usize> = g.elements().map(|x| x * nh + h.identity()).collect();
    FiniteCategory::from_fn(g.order(), &morphisms, &identity, |later, earlier| {
        let (a, b) = (Mor2G::from_index(xm, later), Mor2G::from_index(xm, earlier));
        compose(a, b).expect("composable by construction").index()
    })
    .expect("a crossed module gives a category")
}

/// `G ⋉ H` under the tensor product, indexed like [`underlying_category`].
pub fn semidirect_group(xm: &CrossedModule) -> FiniteGroup {
    let nh = xm.h().order();
    let n = xm.g().order() * nh;
    let rows: Vec<Vec<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    let (g, eta) = tensor_raw(xm, (a / nh, a % nh), (b / nh, b % nh));
                    g * nh + eta
                })
                .collect()
        })
        .collect();
    FiniteGroup::from_table(&rows, xm.g().identity() * nh + xm.h().identity())
        .expect("the semidirect product is a group")
}

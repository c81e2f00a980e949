//! JSON file formats. Paths inside a file are resolved against the directory
//! of the file that mentions them.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::action::{ActionError, StrictAction};
use crate::catgroup::underlying_category;
use crate::fincat::{category_from_tables, FincatError, FiniteCategory};
use crate::groups::{FiniteGroup, GroupAction, GroupError, Homomorphism};
use crate::quintet::{Quintet, QuintetError, QuintetGrid};
use crate::xmod::{validate_crossed_module, CrossedModule, XmodError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Shape { path: String, message: String },
    #[error("{path}: {source}")]
    Group { path: String, source: GroupError },
    #[error("{path}: {source}")]
    Xmod { path: String, source: XmodError },
    #[error("{path}: {source}")]
    Category { path: String, source: FincatError },
    #[error("{path}: {source}")]
    Action { path: String, source: ActionError },
    #[error("{path}: {source}")]
    Grid { path: String, source: QuintetError },
}

impl FormatError {
    /// True when the file could not be read or does not have the documented
    /// shape, as opposed to describing a structure that breaks a law.
    pub fn is_input_error(&self) -> bool {
        match self {
            FormatError::Io { .. } | FormatError::Json { .. } | FormatError::Shape { .. } => true,
            FormatError::Group { source, .. } => matches!(
                source,
                GroupError::MalformedTable(_)
                    | GroupError::NameCount { .. }
                    | GroupError::DuplicateName(_)
            ),
            FormatError::Xmod { source, .. } => !matches!(source, XmodError::AxiomsFail(_)),
            FormatError::Category { source, .. } => matches!(source, FincatError::Malformed(_)),
            FormatError::Action { source, .. } => matches!(source, ActionError::Malformed(_)),
            FormatError::Grid { .. } => false,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupSpec {
    pub order: usize,
    pub identity: usize,
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

/// An inline value or a path to a file holding one.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Path(String),
    Inline(T),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XmodSpec {
    #[serde(rename = "G")]
    pub g: Ref<GroupSpec>,
    #[serde(rename = "H")]
    pub h: Ref<GroupSpec>,
    pub boundary: Vec<usize>,
    pub action: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MorphismSpec {
    pub src: usize,
    pub tgt: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CategorySpec {
    pub objects: usize,
    pub morphisms: Vec<MorphismSpec>,
    pub identity: Vec<usize>,
    pub comp: Vec<[usize; 3]>,
}

/// `f` or `[f]`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MorSlot {
    Bare(usize),
    Wrapped([usize; 1]),
}

impl MorSlot {
    fn get(self) -> usize {
        match self {
            MorSlot::Bare(f) | MorSlot::Wrapped([f]) => f,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ActionSpec {
    pub xmod: Ref<XmodSpec>,
    /// A path, an inline category, or `"underlying"` for the category of
    /// the crossed module itself.
    pub category: Ref<CategorySpec>,
    #[serde(rename = "actObj")]
    pub act_obj: Vec<Vec<usize>>,
    #[serde(rename = "actMor")]
    pub act_mor: Vec<([usize; 2], MorSlot, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub xmod: String,
    pub cells: Vec<Vec<Quintet>>,
}

fn show(path: &Path) -> String {
    path.display().to_string()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: show(path),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json {
        path: show(path),
        source,
    })
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), FormatError> {
    let mut text = serde_json::to_string_pretty(value).expect("values serialize");
    text.push('\n');
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: show(path),
        source,
    })
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn group_from_spec(spec: GroupSpec, path: &Path) -> Result<FiniteGroup, FormatError> {
    let err = |source| FormatError::Group {
        path: show(path),
        source,
    };
    if spec.table.len() != spec.order {
        return Err(FormatError::Shape {
            path: show(path),
            message: format!(
                "order is {} but the table has {} rows",
                spec.order,
                spec.table.len()
            ),
        });
    }
    let group = FiniteGroup::from_table(&spec.table, spec.identity).map_err(err)?;
    match spec.names {
        Some(names) => group.with_names(names).map_err(err),
        None => Ok(group),
    }
}

pub fn load_group(path: &Path) -> Result<FiniteGroup, FormatError> {
    group_from_spec(read_json(path)?, path)
}

pub fn group_to_spec(g: &FiniteGroup) -> GroupSpec {
    GroupSpec {
        order: g.order(),
        identity: g.identity(),
        table: g.table_rows(),
        names: g.names().map(<[String]>::to_vec),
    }
}

/// Assembles a crossed module, checking only shapes.
pub fn xmod_from_spec(spec: XmodSpec, path: &Path) -> Result<CrossedModule, FormatError> {
    let base = base_dir(path);
    let load = |r: Ref<GroupSpec>| -> Result<Arc<FiniteGroup>, FormatError> {
        let group = match r {
            Ref::Path(p) => {
                let full = base.join(p);
                group_from_spec(read_json(&full)?, &full)?
            }
            Ref::Inline(spec) => group_from_spec(spec, path)?,
        };
        Ok(Arc::new(group))
    };
    let (g, h) = (load(spec.g)?, load(spec.h)?);
    let group_err = |source| FormatError::Group {
        path: show(path),
        source,
    };
    let boundary = Homomorphism::new(h.clone(), g.clone(), spec.boundary).map_err(group_err)?;
    let action = GroupAction::new(g, h, &spec.action).map_err(group_err)?;
    CrossedModule::from_parts(boundary, action).map_err(|source| FormatError::Xmod {
        path: show(path),
        source,
    })
}

/// Reads a crossed module without checking its axioms.
pub fn load_xmod(path: &Path) -> Result<CrossedModule, FormatError> {
    xmod_from_spec(read_json(path)?, path)
}

/// Reads a crossed module and rejects it unless every axiom holds.
pub fn load_valid_xmod(path: &Path) -> Result<CrossedModule, FormatError> {
    let xm = load_xmod(path)?;
    let err = |source| FormatError::Xmod {
        path: show(path),
        source,
    };
    let report = validate_crossed_module(&xm).map_err(err)?;
    if report.is_empty() {
        Ok(xm)
    } else {
        Err(err(XmodError::AxiomsFail(report)))
    }
}

/// Inline groups, or references to group files when `refs` is given.
pub fn xmod_to_spec(xm: &CrossedModule, refs: Option<(&str, &str)>) -> XmodSpec {
    let (g, h) = match refs {
        Some((g, h)) => (Ref::Path(g.to_string()), Ref::Path(h.to_string())),
        None => (
            Ref::Inline(group_to_spec(xm.g())),
            Ref::Inline(group_to_spec(xm.h())),
        ),
    };
    XmodSpec {
        g,
        h,
        boundary: xm.boundary().map().to_vec(),
        action: xm.action().table_rows(),
    }
}

pub fn category_from_spec(spec: CategorySpec, path: &Path) -> Result<FiniteCategory, FormatError> {
    let morphisms: Vec<(usize, usize)> = spec.morphisms.iter().map(|m| (m.src, m.tgt)).collect();
    let comp: Vec<(usize, usize, usize)> = spec.comp.iter().map(|&[g, f, r]| (g, f, r)).collect();
    category_from_tables(spec.objects, &morphisms, &spec.identity, &comp).map_err(|source| {
        FormatError::Category {
            path: show(path),
            source,
        }
    })
}

pub fn load_category(path: &Path) -> Result<FiniteCategory, FormatError> {
    category_from_spec(read_json(path)?, path)
}

pub fn category_to_spec(c: &FiniteCategory) -> CategorySpec {
    CategorySpec {
        objects: c.n_objects(),
        morphisms: c
            .morphisms()
            .map(|(src, tgt)| MorphismSpec { src, tgt })
            .collect(),
        identity: c.identities().to_vec(),
        comp: c
            .comp_triples()
            .into_iter()
            .map(|(g, f, r)| [g, f, r])
            .collect(),
    }
}

/// Reads an action. The crossed module must satisfy its axioms; the action
/// tables are only shape-checked.
pub fn load_action(path: &Path) -> Result<StrictAction, FormatError> {
    let spec: ActionSpec = read_json(path)?;
    let base = base_dir(path);
    let xm = match spec.xmod {
        Ref::Path(p) => load_valid_xmod(&base.join(p))?,
        Ref::Inline(x) => {
            let xm = xmod_from_spec(x, path)?;
            let err = |source| FormatError::Xmod {
                path: show(path),
                source,
            };
            let report = validate_crossed_module(&xm).map_err(err)?;
            if !report.is_empty() {
                return Err(err(XmodError::AxiomsFail(report)));
            }
            xm
        }
    };
    let cat = match spec.category {
        Ref::Path(p) if p == "underlying" => underlying_category(&xm),
        Ref::Path(p) => load_category(&base.join(p))?,
        Ref::Inline(c) => category_from_spec(c, path)?,
    };
    let (ng, nh) = (xm.g().order(), xm.h().order());
    let shape = |message: String| FormatError::Shape {
        path: show(path),
        message,
    };
    if spec.act_obj.len() != ng || spec.act_obj.iter().any(|r| r.len() != cat.n_objects()) {
        return Err(shape(format!("actObj must be {ng}x{}", cat.n_objects())));
    }
    let act_obj: Vec<usize> = spec.act_obj.into_iter().flatten().collect();
    let nmor = cat.n_morphisms();
    let mut act_mor = vec![None; ng * nh * nmor];
    for ([gamma, chi], f, r) in spec.act_mor {
        let f = f.get();
        if gamma >= ng || chi >= nh || f >= nmor {
            return Err(shape(format!(
                "actMor entry [[{gamma},{chi}],[{f}],{r}] is out of range"
            )));
        }
        let slot = &mut act_mor[(gamma * nh + chi) * nmor + f];
        if slot.is_some() {
            return Err(shape(format!("actMor lists [[{gamma},{chi}],[{f}]] twice")));
        }
        *slot = Some(r);
    }
    let act_mor: Vec<usize> = act_mor
        .into_iter()
        .enumerate()
        .map(|(k, v)| {
            v.ok_or_else(|| {
                let (row, f) = (k / nmor, k % nmor);
                shape(format!(
                    "actMor has no entry for [[{},{}],[{f}]]",
                    row / nh,
                    row % nh
                ))
            })
        })
        .collect::<Result<_, _>>()?;
    StrictAction::new(Arc::new(xm), Arc::new(cat), act_obj, act_mor).map_err(|source| {
        FormatError::Action {
            path: show(path),
            source,
        }
    })
}

/// Tables of an action with the crossed module and category inline, or the
/// given references in their place.
pub fn action_to_spec(
    a: &StrictAction,
    xmod_ref: Option<&str>,
    category_ref: Option<&str>,
) -> ActionSpec {
    let xm = a.xmod();
    let c = a.category();
    let (ng, nh, nob, nmor) = (
        xm.g().order(),
        xm.h().order(),
        c.n_objects(),
        c.n_morphisms(),
    );
    let act_obj = (0..ng)
        .map(|g| (0..nob).map(|x| a.obj(g, x)).collect())
        .collect();
    let mut act_mor = Vec::with_capacity(ng * nh * nmor);
    for g in 0..ng {
        for chi in 0..nh {
            for f in 0..nmor {
                act_mor.push(([g, chi], MorSlot::Wrapped([f]), a.mor(g, chi, f)));
            }
        }
    }
    ActionSpec {
        xmod: match xmod_ref {
            Some(p) => Ref::Path(p.to_string()),
            None => Ref::Inline(xmod_to_spec(xm, None)),
        },
        category: match category_ref {
            Some(p) => Ref::Path(p.to_string()),
            None => Ref::Inline(category_to_spec(c)),
        },
        act_obj,
        act_mor,
    }
}

pub fn load_grid_json(path: &Path) -> Result<QuintetGrid, FormatError> {
    let spec: GridSpec = read_json(path)?;
    let xm = Arc::new(load_valid_xmod(&base_dir(path).join(&spec.xmod))?);
    QuintetGrid::from_rows(xm, spec.cells).map_err(|source| FormatError::Grid {
        path: show(path),
        source,
    })
}

pub fn grid_to_json(grid: &QuintetGrid, xmod_path: &str) -> Value {
    json!({ "xmod": xmod_path, "cells": grid.row_vecs() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::adjoint_action;
    use crate::catalog;

    fn tmp(name: &str) -> PathBuf {
        let dir =
            std::env::temp_dir().join(format!("xmodcat-formats-{}-{name}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn xmod_round_trip_through_group_files() {
        let dir = tmp("xmod");
        fs::create_dir_all(dir.join("groups")).unwrap();
        let xm = catalog::xm2();
        write_json(&dir.join("groups/s3.json"), &group_to_spec(xm.g())).unwrap();
        let spec = xmod_to_spec(&xm, Some(("groups/s3.json", "groups/s3.json")));
        write_json(&dir.join("xm2.json"), &spec).unwrap();
        let back = load_valid_xmod(&dir.join("xm2.json")).unwrap();
        assert_eq!(back, xm);
        assert_eq!(back.g().name(1), "(23)");
    }

    #[test]
    fn peiffer_failure_is_not_an_input_error() {
        let dir = tmp("peiffer");
        write_json(
            &dir.join("bad.json"),
            &xmod_to_spec(&catalog::bad_peiffer(), None),
        )
        .unwrap();
        assert!(load_xmod(&dir.join("bad.json")).is_ok());
        let err = load_valid_xmod(&dir.join("bad.json")).unwrap_err();
        assert!(!err.is_input_error());
        let missing = load_xmod(&dir.join("nope.json")).unwrap_err();
        assert!(missing.is_input_error());
    }

    #[test]
    fn action_round_trip() {
        let dir = tmp("action");
        let a = adjoint_action(Arc::new(catalog::xm1()));
        write_json(&dir.join("a.json"), &action_to_spec(&a, None, None)).unwrap();
        let back = load_action(&dir.join("a.json")).unwrap();
        assert_eq!(back.act_obj_table(), a.act_obj_table());
        assert_eq!(back.act_mor_table(), a.act_mor_table());
    }

    #[test]
    fn bare_and_wrapped_morphism_slots() {
        let text = r#"{"xmod": {"G": {"order":1,"identity":0,"table":[[0]]},
                                "H": {"order":1,"identity":0,"table":[[0]]},
                                "boundary":[0], "action":[[0]]},
                       "category": {"objects":1,"morphisms":[{"src":0,"tgt":0}],"identity":[0],"comp":[[0,0,0]]},
                       "actObj": [[0]], "actMor": [[[0,0],0,0]]}"#;
        let dir = tmp("slots");
        fs::write(dir.join("t.json"), text).unwrap();
        assert!(load_action(&dir.join("t.json")).is_ok());
        fs::write(
            dir.join("t2.json"),
            text.replace("[[0,0],0,0]", "[[0,0],[0],0]"),
        )
        .unwrap();
        assert!(load_action(&dir.join("t2.json")).is_ok());
        fs::write(
            dir.join("t3.json"),
            text.replace("\"actMor\": [[[0,0],0,0]]", "\"actMor\": []"),
        )
        .unwrap();
        assert!(load_action(&dir.join("t3.json"))
            .unwrap_err()
            .is_input_error());
    }
}

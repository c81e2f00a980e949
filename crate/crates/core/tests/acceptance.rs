//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xmodcat::action::{
    adjoint_action, adjoint_whiskering_oracle, check_compositor_coherence,
    left_multiplication_action, trivial_action, validate_strict_action, StrictAction,
    WeakActionData,
};
use xmodcat::catalog;
use xmodcat::config::VerifyConfig;
use xmodcat::fincat::category_from_tables;
use xmodcat::formats::{load_grid_json, load_valid_xmod, load_xmod};
use xmodcat::groups::{
    validate_automorphism_action, validate_homomorphism, FiniteGroup, GroupAction, Homomorphism,
};
use xmodcat::quintet::dsl::{parse_document, parse_grid_file, serialize_document, ParseErrorKind};
use xmodcat::quintet::{
    evaluate_grid, evaluate_grid_columns_first, verify_quintet_laws, DoubleGroupoid, Quintet,
};
use xmodcat::transform::{
    build_transformation_double, horizontal_2category, transpose_views, verify_double_category,
    vertical_2category, TransDoubleCat,
};
use xmodcat::xmod::{enumerate_crossed_modules, validate_crossed_module, CrossedModule, XmodError};

type Outcome = Result<String, String>;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn adjoint(xm: CrossedModule) -> TransDoubleCat {
    build_transformation_double(adjoint_action(Arc::new(xm))).expect("adjoint action is valid")
}

fn terminal_trivial() -> StrictAction {
    let cat = category_from_tables(1, &[(0, 0)], &[0], &[(0, 0, 0)]).unwrap();
    trivial_action(Arc::new(catalog::trivial_xmod()), Arc::new(cat))
}

/// Every map `source -> target` as an index vector.
fn all_maps(source: usize, target: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..source {
        out = out
            .into_iter()
            .flat_map(|m| (0..target).map(move |v| [m.clone(), vec![v]].concat()))
            .collect();
    }
    out
}

/// Crossed-module structures found by filtering every candidate boundary and
/// every candidate action through the validators.
fn brute_force_crossed_modules(
    g: &Arc<FiniteGroup>,
    h: &Arc<FiniteGroup>,
) -> BTreeSet<(Vec<usize>, Vec<Vec<usize>>)> {
    let boundaries: Vec<Homomorphism> = all_maps(h.order(), g.order())
        .into_iter()
        .map(|m| Homomorphism::new(h.clone(), g.clone(), m).unwrap())
        .filter(|d| validate_homomorphism(d).is_empty())
        .collect();
    let bijections: Vec<Vec<usize>> = all_maps(h.order(), h.order())
        .into_iter()
        .filter(|m| m.iter().collect::<BTreeSet<_>>().len() == h.order())
        .collect();
    let automorphisms: Vec<Vec<usize>> = bijections
        .into_iter()
        .filter(|m| {
            validate_homomorphism(&Homomorphism::new(h.clone(), h.clone(), m.clone()).unwrap())
                .is_empty()
        })
        .collect();
    let actions: Vec<GroupAction> = all_maps(g.order(), automorphisms.len())
        .into_iter()
        .map(|choice| {
            let rows: Vec<Vec<usize>> = choice.iter().map(|&k| automorphisms[k].clone()).collect();
            GroupAction::new(g.clone(), h.clone(), &rows).unwrap()
        })
        .filter(|a| validate_automorphism_action(a).is_empty())
        .collect();
    let mut found = BTreeSet::new();
    for d in &boundaries {
        for a in &actions {
            let xm = CrossedModule::from_parts(d.clone(), a.clone()).unwrap();
            if validate_crossed_module(&xm).unwrap().is_empty() {
                found.insert((d.map().to_vec(), a.table_rows()));
            }
        }
    }
    found
}

fn ac1() -> Outcome {
    let dir = fixtures();
    for name in ["xm1", "xm2", "xm3", "xm4"] {
        let xm = load_valid_xmod(&dir.join(format!("{name}.json"))).map_err(|e| e.to_string())?;
        ensure(
            xm == catalog::crossed_modules()
                .into_iter()
                .find(|(n, _)| *n == name)
                .unwrap()
                .1,
            || format!("{name}.json differs from the catalog"),
        )?;
    }
    let bad = load_xmod(&dir.join("bad_peiffer.json")).map_err(|e| e.to_string())?;
    let report = validate_crossed_module(&bad).map_err(|e| e.to_string())?;
    ensure(report.failed_laws() == ["CM2"], || {
        format!("bad_peiffer failed {:?}", report.failed_laws())
    })?;

    let groups = catalog::small_groups();
    let mut pairs = 0;
    let mut structures = 0;
    for (gn, g) in &groups {
        for (hn, h) in &groups {
            let expected = brute_force_crossed_modules(g, h);
            let got: BTreeSet<_> = match enumerate_crossed_modules(g, h, u64::MAX) {
                Ok(list) => list
                    .iter()
                    .map(|xm| (xm.boundary().map().to_vec(), xm.action().table_rows()))
                    .collect(),
                Err(XmodError::BudgetExceeded { .. }) => {
                    return Err(format!("budget exceeded on ({gn}, {hn})"))
                }
                Err(e) => return Err(e.to_string()),
            };
            ensure(got == expected, || {
                format!(
                    "({gn}, {hn}): enumerated {} vs filtered {}",
                    got.len(),
                    expected.len()
                )
            })?;
            pairs += 1;
            structures += got.len();
        }
    }
    Ok(format!("fixtures valid, bad_peiffer fails CM2 only, {pairs} group pairs agree ({structures} structures)"))
}

fn ac2() -> Outcome {
    let required = [
        "quintet-interchange",
        "quintet-face-formulas",
        "quintet-inverse-h",
        "quintet-inverse-v",
    ];
    let mut notes = Vec::new();
    for (name, xm, cfg) in [
        ("xm1", catalog::xm1(), VerifyConfig::exhaustive()),
        ("xm3", catalog::xm3(), VerifyConfig::exhaustive()),
        ("xm2", catalog::xm2(), VerifyConfig::sampled(100_000, 7)),
    ] {
        let report = verify_quintet_laws(&xm, &cfg);
        ensure(report.is_empty(), || {
            format!("{name}: {}", report.failed_laws().join(", "))
        })?;
        for law in required {
            ensure(report.tally(law).is_some_and(|t| t.checked > 0), || {
                format!("{name}: {law} not run")
            })?;
        }
        let blocks = report.tally("quintet-interchange").unwrap().checked;
        if name == "xm2" {
            ensure(blocks >= 100_000, || format!("xm2: only {blocks} samples"))?;
        }
        notes.push(format!("{name} {blocks} blocks"));
    }
    Ok(notes.join(", "))
}

fn ac3() -> Outcome {
    let laws = [
        "F1-1",
        "F1-2",
        "F2-1",
        "F2-2",
        "phi-functor",
        "phi-naturality",
        "as-objects",
        "as-morphisms",
    ];
    for (name, xm) in catalog::crossed_modules() {
        let a = adjoint_action(Arc::new(xm));
        let report = validate_strict_action(&a).map_err(|e| e.to_string())?;
        ensure(report.is_empty(), || {
            format!("{name}: {}", report.failed_laws().join(", "))
        })?;
        for law in laws {
            ensure(report.tally(law).is_some_and(|t| t.checked > 0), || {
                format!("{name}: {law} not run")
            })?;
        }
    }
    let check =
        |xm: &Arc<CrossedModule>, a: &StrictAction, gamma, chi, g, eta| -> Result<(), String> {
            let nh = xm.h().order();
            let (top, face) = adjoint_whiskering_oracle(xm, gamma, chi, g, eta);
            let expected = a.mor(gamma, chi, g * nh + eta);
            ensure(top * nh + face == expected, || {
                format!("oracle differs at ({gamma},{chi}) on ({g},{eta})")
            })
        };
    let xm1 = Arc::new(catalog::xm1());
    let a1 = adjoint_action(xm1.clone());
    let mut n1 = 0;
    for gamma in 0..2 {
        for chi in 0..3 {
            for g in 0..2 {
                for eta in 0..3 {
                    check(&xm1, &a1, gamma, chi, g, eta)?;
                    n1 += 1;
                }
            }
        }
    }
    let xm2 = Arc::new(catalog::xm2());
    let a2 = adjoint_action(xm2.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n2 = 10_000;
    for _ in 0..n2 {
        let [gamma, chi, g, eta] = [0; 4].map(|_| rng.random_range(0..6));
        check(&xm2, &a2, gamma, chi, g, eta)?;
    }
    Ok(format!(
        "validators empty on xm1-xm4, oracle agrees on all {n1} xm1 inputs and {n2} xm2 samples"
    ))
}

fn ac4() -> Outcome {
    let cfg = VerifyConfig::default();
    let mut notes = Vec::new();
    let cases: Vec<(&str, TransDoubleCat)> = catalog::crossed_modules()
        .into_iter()
        .map(|(n, xm)| (n, adjoint(xm)))
        .chain([(
            "trivial",
            build_transformation_double(terminal_trivial()).unwrap(),
        )])
        .collect();
    for (name, d) in &cases {
        let report = verify_double_category(d, &cfg);
        ensure(report.is_empty(), || {
            format!("{name}: {}", report.failed_laws().join(", "))
        })?;
        let xm = d.action().xmod();
        let (ng, nh) = (xm.g().order() as u64, xm.h().order() as u64);
        let quads = report.tally("crossmod-target").map_or(0, |t| t.checked);
        ensure(quads == ng * ng * nh * nh, || {
            format!("{name}: crossmod-target checked {quads}")
        })?;
        let six = report.tally("six-expression").map_or(0, |t| t.checked);
        let pairs = ng * ng * nh * nh * d.n_horizontal() as u64;
        ensure(six == pairs, || {
            format!("{name}: six-expression checked {six} of {pairs}")
        })?;
        notes.push(format!("{name} {six}"));
    }
    Ok(format!(
        "all reports empty; six-expression pairs checked: {}",
        notes.join(", ")
    ))
}

fn ac5() -> Outcome {
    let mut cases: Vec<(&str, TransDoubleCat)> = catalog::crossed_modules()
        .into_iter()
        .map(|(n, xm)| (n, adjoint(xm)))
        .collect();
    cases.push((
        "trivial",
        build_transformation_double(terminal_trivial()).unwrap(),
    ));
    let mut xm2_components = 0;
    for (name, d) in &cases {
        let views = transpose_views(d).map_err(|e| e.to_string())?;
        ensure(views.report.is_empty(), || {
            format!("{name}: {}", views.report.failed_laws().join(", "))
        })?;
        ensure(
            views
                .report
                .tally("transpose-morphisms")
                .is_some_and(|t| t.checked > 0),
            || format!("{name}: no entrywise checks"),
        )?;
        if *name == "xm2" {
            xm2_components = views.object_groupoid.components().len();
        }
    }
    ensure(xm2_components == 3, || {
        format!("xm2 object groupoid has {xm2_components} components")
    })?;
    Ok("isomorphisms verified entrywise, adjoint xm2 object groupoid has 3 components".into())
}

fn ac6() -> Outcome {
    let d2 = adjoint(catalog::xm2());
    let h2 = horizontal_2category(&d2);
    ensure(h2.report.is_empty(), || {
        format!("xm2 h2cat: {}", h2.report.failed_laws().join(", "))
    })?;
    ensure(
        h2.cells.iter().all(|k| k.source == k.target && k.chi == 0),
        || "xm2 has a non-identity 2-cell".into(),
    )?;
    ensure(h2.cells.len() == d2.n_horizontal(), || {
        "xm2 2-cell count".into()
    })?;
    ensure(vertical_2category(&d2).report.is_empty(), || {
        "xm2 v2cat brute force".into()
    })?;
    let d1 = adjoint(catalog::xm1());
    let v1 = vertical_2category(&d1);
    ensure(v1.report.is_empty(), || {
        format!("xm1 v2cat: {}", v1.report.failed_laws().join(", "))
    })?;
    for gamma in 0..2 {
        for (x, want) in [(0, 3), (1, 1)] {
            let got = v1.count_from(gamma, x);
            ensure(got == want, || {
                format!("xm1 2-cells from ({gamma}, {x}): {got}, expected {want}")
            })?;
        }
    }
    ensure(horizontal_2category(&d1).report.is_empty(), || {
        "xm1 h2cat brute force".into()
    })?;
    Ok("xm2 horizontal 2-cells are identities, xm1 vertical counts 3/1, both tables match brute force".into())
}

fn ac7() -> Outcome {
    let mut strict: Vec<(String, StrictAction)> = Vec::new();
    for (name, xm) in catalog::crossed_modules() {
        let xm = Arc::new(xm);
        strict.push((format!("adjoint {name}"), adjoint_action(xm.clone())));
        strict.push((format!("left-mult {name}"), left_multiplication_action(xm)));
    }
    strict.push(("trivial".into(), terminal_trivial()));
    for (name, a) in &strict {
        let report = check_compositor_coherence(&WeakActionData::identity_compositor(a.clone()));
        ensure(report.is_empty(), || {
            format!("{name}: {}", report.failed_laws().join(", "))
        })?;
    }

    let xm1 = Arc::new(catalog::xm1());
    let bases = [
        ("adjoint", adjoint_action(xm1.clone())),
        ("left-mult", left_multiplication_action(xm1)),
    ];
    let mut mutants = 0;
    for (name, base) in bases {
        let w = WeakActionData::identity_compositor(base);
        let c = w.base.category();
        for x in 0..c.n_objects() {
            let id = w.phi(1, 1, x);
            for m in c.hom(c.src(id), c.tgt(id)).into_iter().filter(|&m| m != id) {
                let report = check_compositor_coherence(&w.with_component(1, 1, x, m));
                let located = report
                    .violations_of("pentagon")
                    .any(|v| v.witness.get("x") == Some(x));
                ensure(located, || {
                    format!("{name}: mutant φ(1,1)({x}) = {m} not located")
                })?;
                mutants += 1;
            }
        }
    }
    ensure(mutants >= 5, || format!("only {mutants} mutants"))?;
    Ok(format!("identity compositors pass on {} strict actions, {mutants} mutants fail the pentagon at their object", strict.len()))
}

fn ac8() -> Outcome {
    let dir = fixtures().join("grids");
    let mut valid = 0;
    let mut entries: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    for path in entries
        .iter()
        .filter(|p| p.extension().is_some_and(|e| e == "grid"))
    {
        let show = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
        let doc = parse_document(&text).map_err(|e| format!("{show}: {e}"))?;
        let again = parse_document(&serialize_document(&doc))
            .map_err(|e| format!("{show} reparse: {e}"))?;
        ensure(again == doc, || {
            format!("{show}: round trip changed the document")
        })?;

        let parsed = parse_grid_file(path).map_err(|e| format!("{show}: {e}"))?;
        let grid = &parsed.grid;
        let xm = grid.xmod().clone();
        let dg = DoubleGroupoid::new(&xm);
        let mut rows: Vec<Quintet> = Vec::new();
        for r in 0..grid.rows() {
            let mut acc = *grid.cell(r, 0);
            for c in 1..grid.cols() {
                acc = dg
                    .compose_h(&acc, grid.cell(r, c))
                    .map_err(|e| e.to_string())?;
            }
            rows.push(acc);
        }
        let mut folded = rows[0];
        for row in &rows[1..] {
            folded = dg.compose_v(&folded, row).map_err(|e| e.to_string())?;
        }
        let evaluated = evaluate_grid(grid).map_err(|e| e.to_string())?;
        ensure(evaluated == folded, || {
            format!("{show}: evaluate_grid differs from direct composition")
        })?;
        ensure(evaluate_grid_columns_first(grid) == Ok(evaluated), || {
            format!("{show}: fold orders differ")
        })?;
        valid += 1;
    }

    let q = |l, t, r, b, e| Quintet {
        left: l,
        top: t,
        right: r,
        bottom: b,
        face: e,
    };
    let expected = [
        ("xm1_row.grid", q(1, 0, 1, 0, 0)),
        ("xm1_column.grid", q(0, 0, 0, 0, 1)),
        ("xm1_2x2.grid", q(0, 0, 0, 0, 0)),
        ("identity_1x1.grid", q(0, 0, 0, 0, 0)),
    ];
    for (file, want) in expected {
        let got = evaluate_grid(
            &parse_grid_file(&dir.join(file))
                .map_err(|e| e.to_string())?
                .grid,
        )
        .unwrap();
        ensure(got == want, || format!("{file}: {got:?}"))?;
    }
    let from_json = load_grid_json(&dir.join("xm1_2x2.json")).map_err(|e| e.to_string())?;
    ensure(
        from_json == parse_grid_file(&dir.join("xm1_2x2.grid")).unwrap().grid,
        || "JSON and DSL grids differ".into(),
    )?;

    let mut malformed = 0;
    let mut bad: Vec<PathBuf> = fs::read_dir(dir.join("malformed"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    bad.sort();
    for path in bad {
        let show = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let header = text
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("# expect: "))
            .ok_or(format!("{show}: no header"))?;
        let (kind, at) = header
            .split_once(' ')
            .ok_or(format!("{show}: bad header"))?;
        let err = match parse_grid_file(&path) {
            Ok(_) => return Err(format!("{show}: parsed")),
            Err(e) => e,
        };
        let kind_ok = match kind {
            "Syntax" => err.kind == ParseErrorKind::Syntax,
            "UnknownName" => err.kind == ParseErrorKind::UnknownName,
            "BoundaryViolation" => err.kind == ParseErrorKind::BoundaryViolation,
            "AdjacencyViolation" => err.kind == ParseErrorKind::AdjacencyViolation,
            "Load" => err.kind == ParseErrorKind::Load,
            other => return Err(format!("{show}: unknown class {other}")),
        };
        let got_at = format!("{}:{}", err.line, err.col);
        ensure(kind_ok && got_at == at, || {
            format!("{show}: expected {kind} {at}, got {err}")
        })?;
        malformed += 1;
    }
    Ok(format!("{valid} grids round-trip and evaluate exactly, {malformed} malformed files rejected as documented"))
}

fn main() {
    let criteria: [(&str, &str, Option<Duration>, fn() -> Outcome); 8] = [
        (
            "AC1",
            "crossed-module axioms and enumeration",
            Some(Duration::from_secs(60)),
            ac1,
        ),
        (
            "AC2",
            "quintet double groupoid laws",
            Some(Duration::from_secs(120)),
            ac2,
        ),
        ("AC3", "adjoint action", Some(Duration::from_secs(120)), ac3),
        (
            "AC4",
            "transformation double category",
            Some(Duration::from_secs(180)),
            ac4,
        ),
        ("AC5", "transpose views", None, ac5),
        ("AC6", "2-category slices", None, ac6),
        ("AC7", "compositor coherence", None, ac7),
        ("AC8", "grid parser", None, ac8),
    ];
    let mut failures = 0;
    for (id, title, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(detail) if limit.is_none_or(|l| elapsed <= l) => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; over the time limit")),
            Err(detail) => ("FAIL", detail),
        };
        if status == "FAIL" {
            failures += 1;
        }
        let limit = limit.map_or(String::new(), |l| format!(", limit {} s", l.as_secs()));
        println!(
            "{id} {status} {title}: {detail} [{:.2} s{limit}]",
            elapsed.as_secs_f64()
        );
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}

//! The double groupoid of quintets over a crossed module.
//!
//! A square carries four edges in `G` and a face in `H`:
//!
//! ```text
//!          top (g3)
//!        +---------+
//! left   |    η    |  right
//! (g4)   |         |  (g2)
//!        +---------+
//!         bottom (g1)
//! ```
//!
//! subject to `∂(η) = g1·g2·g3⁻¹·g4⁻¹`.

pub mod dsl;

use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::VerifyConfig;
use crate::report::Report;
use crate::witness;
use crate::xmod::CrossedModule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Quintet {
    #[serde(rename = "l")]
    pub left: usize,
    #[serde(rename = "t")]
    pub top: usize,
    #[serde(rename = "r")]
    pub right: usize,
    #[serde(rename = "b")]
    pub bottom: usize,
    #[serde(rename = "e")]
    pub face: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Horizontal,
    Vertical,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum QuintetError {
    #[error("boundary law fails: ∂(face) = {lhs} but bottom·right·top⁻¹·left⁻¹ = {rhs}")]
    BoundaryViolation { lhs: usize, rhs: usize },
    #[error(
        "{axis:?} composition needs matching edges, found {found} where {expected} was required"
    )]
    NotAdjacent {
        axis: Axis,
        expected: usize,
        found: usize,
    },
    #[error("adjacency fails between cell ({row}, {col}) and its {axis:?} neighbour")]
    AdjacencyViolation { row: usize, col: usize, axis: Axis },
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("grid shape: {0}")]
    Shape(String),
}

/// Square arithmetic over one crossed module.
#[derive(Clone, Copy)]
pub struct DoubleGroupoid<'x> {
    xm: &'x CrossedModule,
}

impl<'x> DoubleGroupoid<'x> {
    pub fn new(xm: &'x CrossedModule) -> Self {
        DoubleGroupoid { xm }
    }

    pub fn xmod(&self) -> &'x CrossedModule {
        self.xm
    }

    /// `g1·g2·g3⁻¹·g4⁻¹` for the square's edges.
    pub fn edge_product(&self, sq: &Quintet) -> usize {
        let g = self.xm.g();
        g.product(&[sq.bottom, sq.right, g.inv(sq.top), g.inv(sq.left)])
    }

    pub fn is_square(&self, sq: &Quintet) -> bool {
        self.in_range(sq) && self.xm.d(sq.face) == self.edge_product(sq)
    }

    fn in_range(&self, sq: &Quintet) -> bool {
        let g = self.xm.g();
        [sq.left, sq.top, sq.right, sq.bottom]
            .iter()
            .all(|&x| g.contains(x))
            && self.xm.h().contains(sq.face)
    }

    pub fn make_square(
        &self,
        left: usize,
        top: usize,
        right: usize,
        bottom: usize,
        face: usize,
    ) -> Result<Quintet, QuintetError> {
        let sq = Quintet {
            left,
            top,
            right,
            bottom,
            face,
        };
        if !self.in_range(&sq) {
            return Err(QuintetError::OutOfRange(format!("{sq:?}")));
        }
        let (lhs, rhs) = (self.xm.d(face), self.edge_product(&sq));
        if lhs != rhs {
            return Err(QuintetError::BoundaryViolation { lhs, rhs });
        }
        Ok(sq)
    }

    /// Identity for horizontal composition on the vertical edge `g`.
    pub fn identity_h(&self, g: usize) -> Quintet {
        let e = self.xm.g().identity();
        Quintet {
            left: g,
            top: e,
            right: g,
            bottom: e,
            face: self.xm.h().identity(),
        }
    }

    /// Identity for vertical composition on the horizontal edge `g`.
    pub fn identity_v(&self, g: usize) -> Quintet {
        let e = self.xm.g().identity();
        Quintet {
            left: e,
            top: g,
            right: e,
            bottom: g,
            face: self.xm.h().identity(),
        }
    }

    /// `a` on the left, `b` on the right.
    pub fn compose_h(&self, a: &Quintet, b: &Quintet) -> Result<Quintet, QuintetError> {
        if a.right != b.left {
            return Err(QuintetError::NotAdjacent {
                axis: Axis::Horizontal,
                expected: a.right,
                found: b.left,
            });
        }
        let (g, h) = (self.xm.g(), self.xm.h());
        let twist = g.product(&[a.left, a.top, g.inv(a.right)]);
        Ok(Quintet {
            left: a.left,
            top: g.mul(a.top, b.top),
            right: b.right,
            bottom: g.mul(a.bottom, b.bottom),
            face: h.mul(a.face, self.xm.act(twist, b.face)),
        })
    }

    /// The second face formula for horizontal composition, `(g1▷η₂)·η₁`.
    pub fn compose_h_alt(&self, a: &Quintet, b: &Quintet) -> Result<Quintet, QuintetError> {
        let mut out = self.compose_h(a, b)?;
        out.face = self.xm.h().mul(self.xm.act(a.bottom, b.face), a.face);
        Ok(out)
    }

    /// `top` stacked over `bottom`.
    pub fn compose_v(&self, top: &Quintet, bottom: &Quintet) -> Result<Quintet, QuintetError> {
        if top.bottom != bottom.top {
            return Err(QuintetError::NotAdjacent {
                axis: Axis::Vertical,
                expected: top.bottom,
                found: bottom.top,
            });
        }
        let (g, h) = (self.xm.g(), self.xm.h());
        Ok(Quintet {
            left: g.mul(bottom.left, top.left),
            top: top.top,
            right: g.mul(bottom.right, top.right),
            bottom: bottom.bottom,
            face: h.mul(bottom.face, self.xm.act(bottom.left, top.face)),
        })
    }

    pub fn invert(&self, sq: &Quintet, axis: Axis) -> Quintet {
        let (g, h) = (self.xm.g(), self.xm.h());
        match axis {
            Axis::Horizontal => Quintet {
                left: sq.right,
                top: g.inv(sq.top),
                right: sq.left,
                bottom: g.inv(sq.bottom),
                face: self.xm.act(g.inv(sq.bottom), h.inv(sq.face)),
            },
            Axis::Vertical => Quintet {
                left: g.inv(sq.left),
                top: sq.bottom,
                right: g.inv(sq.right),
                bottom: sq.top,
                face: self.xm.act(g.inv(sq.left), h.inv(sq.face)),
            },
        }
    }

    /// Every square, ordered by `(left, top, right, bottom, face)`.
    pub fn all_squares(&self) -> Vec<Quintet> {
        let (g, h) = (self.xm.g(), self.xm.h());
        let mut out = Vec::new();
        for left in g.elements() {
            for top in g.elements() {
                for right in g.elements() {
                    for bottom in g.elements() {
                        for face in h.elements() {
                            let sq = Quintet {
                                left,
                                top,
                                right,
                                bottom,
                                face,
                            };
                            if self.is_square(&sq) {
                                out.push(sq);
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// A rectangular array of squares, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuintetGrid {
    xmod: Arc<CrossedModule>,
    rows: usize,
    cols: usize,
    cells: Vec<Quintet>,
}

impl QuintetGrid {
    /// Checks the boundary law on every cell and adjacency between neighbours.
    pub fn new(
        xmod: Arc<CrossedModule>,
        rows: usize,
        cols: usize,
        cells: Vec<Quintet>,
    ) -> Result<Self, QuintetError> {
        if rows == 0 || cols == 0 || cells.len() != rows * cols {
            return Err(QuintetError::Shape(format!(
                "{} cells for a {rows}x{cols} grid",
                cells.len()
            )));
        }
        let grid = QuintetGrid {
            xmod,
            rows,
            cols,
            cells,
        };
        let dg = DoubleGroupoid::new(&grid.xmod);
        for (k, sq) in grid.cells.iter().enumerate() {
            dg.make_square(sq.left, sq.top, sq.right, sq.bottom, sq.face)
                .map_err(|e| {
                    QuintetError::Shape(format!("cell ({}, {}): {e}", k / cols, k % cols))
                })?;
        }
        check_adjacency(&grid)?;
        Ok(grid)
    }

    pub fn from_rows(
        xmod: Arc<CrossedModule>,
        rows: Vec<Vec<Quintet>>,
    ) -> Result<Self, QuintetError> {
        let (r, c) = (rows.len(), rows.first().map_or(0, Vec::len));
        if rows.iter().any(|row| row.len() != c) {
            return Err(QuintetError::Shape("rows have different lengths".into()));
        }
        Self::new(xmod, r, c, rows.into_iter().flatten().collect())
    }

    pub fn xmod(&self) -> &Arc<CrossedModule> {
        &self.xmod
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cell(&self, row: usize, col: usize) -> &Quintet {
        &self.cells[row * self.cols + col]
    }

    pub fn cells(&self) -> &[Quintet] {
        &self.cells
    }

    pub fn row_vecs(&self) -> Vec<Vec<Quintet>> {
        self.cells
            .chunks(self.cols)
            .map(<[Quintet]>::to_vec)
            .collect()
    }
}

fn check_adjacency(grid: &QuintetGrid) -> Result<(), QuintetError> {
    for i in 0..grid.rows {
        for j in 0..grid.cols {
            let sq = grid.cell(i, j);
            if j + 1 < grid.cols && sq.right != grid.cell(i, j + 1).left {
                return Err(QuintetError::AdjacencyViolation {
                    row: i,
                    col: j,
                    axis: Axis::Horizontal,
                });
            }
            if i + 1 < grid.rows && sq.bottom != grid.cell(i + 1, j).top {
                return Err(QuintetError::AdjacencyViolation {
                    row: i,
                    col: j,
                    axis: Axis::Vertical,
                });
            }
        }
    }
    Ok(())
}

/// Folds each row left to right, then the row results top to bottom.
pub fn evaluate_grid(grid: &QuintetGrid) -> Result<Quintet, QuintetError> {
    check_adjacency(grid)?;
    let dg = DoubleGroupoid::new(&grid.xmod);
    let rows: Vec<Quintet> = (0..grid.rows)
        .map(|i| {
            fold(
                &dg,
                (0..grid.cols).map(|j| grid.cell(i, j)),
                Axis::Horizontal,
            )
        })
        .collect();
    Ok(fold(&dg, rows.iter(), Axis::Vertical))
}

/// Folds each column top to bottom, then the column results left to right.
pub fn evaluate_grid_columns_first(grid: &QuintetGrid) -> Result<Quintet, QuintetError> {
    check_adjacency(grid)?;
    let dg = DoubleGroupoid::new(&grid.xmod);
    let cols: Vec<Quintet> = (0..grid.cols)
        .map(|j| fold(&dg, (0..grid.rows).map(|i| grid.cell(i, j)), Axis::Vertical))
        .collect();
    Ok(fold(&dg, cols.iter(), Axis::Horizontal))
}

fn fold<'a>(
    dg: &DoubleGroupoid<'_>,
    mut cells: impl Iterator<Item = &'a Quintet>,
    axis: Axis,
) -> Quintet {
    let first = *cells.next().expect("non-empty");
    cells.fold(first, |acc, sq| {
        match axis {
            Axis::Horizontal => dg.compose_h(&acc, sq),
            Axis::Vertical => dg.compose_v(&acc, sq),
        }
        .expect("adjacency checked")
    })
}

struct SquareIndex {
    squares: Vec<Quintet>,
    by_left: Vec<Vec<usize>>,
    by_top: Vec<Vec<usize>>,
    by_left_top: Vec<Vec<usize>>,
}

impl SquareIndex {
    fn new(dg: &DoubleGroupoid<'_>) -> Self {
        let squares = dg.all_squares();
        let n = dg.xmod().g().order();
        let mut by_left = vec![Vec::new(); n];
        let mut by_top = vec![Vec::new(); n];
        let mut by_left_top = vec![Vec::new(); n * n];
        for (k, sq) in squares.iter().enumerate() {
            by_left[sq.left].push(k);
            by_top[sq.top].push(k);
            by_left_top[sq.left * n + sq.top].push(k);
        }
        SquareIndex {
            squares,
            by_left,
            by_top,
            by_left_top,
        }
    }

    fn n(&self) -> usize {
        self.by_left.len()
    }

    fn block_count(&self) -> u64 {
        let n = self.n();
        self.squares
            .iter()
            .map(|a| {
                let rights = &self.by_left[a.right];
                let belows = &self.by_top[a.bottom];
                rights
                    .iter()
                    .map(|&b| {
                        belows
                            .iter()
                            .map(|&c| {
                                self.by_left_top[self.squares[c].right * n + self.squares[b].bottom]
                                    .len() as u64
                            })
                            .sum::<u64>()
                    })
                    .sum::<u64>()
            })
            .sum()
    }
}

/// Runs every square-calculus law over one crossed module: interchange on
/// 2×2 grids, agreement of the two horizontal face formulas, inverses,
/// associativity, and the 2-morphism embedding.
pub fn verify_quintet_laws(xm: &CrossedModule, cfg: &VerifyConfig) -> Report {
    let dg = DoubleGroupoid::new(xm);
    let idx = SquareIndex::new(&dg);
    let mut report = Report::with_cap(cfg.cap);
    let n = idx.n();
    let sq = &idx.squares;

    let interchange_block = |a: usize, b: usize, c: usize, d: usize, report: &mut Report| {
        let (a, b, c, d) = (&sq[a], &sq[b], &sq[c], &sq[d]);
        let rows_first = dg
            .compose_v(&dg.compose_h(a, b).unwrap(), &dg.compose_h(c, d).unwrap())
            .unwrap();
        let cols_first = dg
            .compose_h(&dg.compose_v(a, c).unwrap(), &dg.compose_v(b, d).unwrap())
            .unwrap();
        report.expect("quintet-interchange", rows_first == cols_first, || {
            witness!(
                a = idx_of(sq, a),
                b = idx_of(sq, b),
                c = idx_of(sq, c),
                d = idx_of(sq, d)
            )
        });
    };

    if cfg.exhaustive_for(idx.block_count()) {
        let parts: Vec<Report> = (0..sq.len())
            .into_par_iter()
            .map(|a| {
                let mut r = Report::with_cap(cfg.cap);
                for &b in &idx.by_left[sq[a].right] {
                    for &c in &idx.by_top[sq[a].bottom] {
                        for &d in &idx.by_left_top[sq[c].right * n + sq[b].bottom] {
                            interchange_block(a, b, c, d, &mut r);
                        }
                    }
                }
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
                    let a = rng.random_range(0..sq.len());
                    let b = *idx.by_left[sq[a].right]
                        .choose(&mut rng)
                        .expect("non-empty");
                    let c = *idx.by_top[sq[a].bottom]
                        .choose(&mut rng)
                        .expect("non-empty");
                    let d = *idx.by_left_top[sq[c].right * n + sq[b].bottom]
                        .choose(&mut rng)
                        .expect("non-empty");
                    interchange_block(a, b, c, d, &mut r);
                }
                r
            })
            .collect();
        parts.into_iter().for_each(|r| report.merge(r));
    }

    let pairs: u64 = sq.iter().map(|a| idx.by_left[a.right].len() as u64).sum();
    let exhaustive_pairs = cfg.exhaustive_for(pairs);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5155_494e);
    for (ai, a) in sq.iter().enumerate() {
        for &bi in &idx.by_left[a.right] {
            if !exhaustive_pairs && !rng.random_bool(cfg.samples as f64 / pairs as f64) {
                continue;
            }
            let b = &sq[bi];
            let main = dg.compose_h(a, b).unwrap();
            let alt = dg.compose_h_alt(a, b).unwrap();
            report.expect("quintet-face-formulas", main == alt, || {
                witness!(a = ai, b = bi)
            });
            report.expect("quintet-boundary-closed", dg.is_square(&main), || {
                witness!(a = ai, b = bi)
            });
        }
    }

    let g = xm.g();
    for (ai, a) in sq.iter().enumerate() {
        for axis in [Axis::Horizontal, Axis::Vertical] {
            let inv = dg.invert(a, axis);
            let ok = dg.is_square(&inv)
                && dg.invert(&inv, axis) == *a
                && match axis {
                    Axis::Horizontal => {
                        dg.compose_h(a, &inv).ok() == Some(dg.identity_h(a.left))
                            && dg.compose_h(&inv, a).ok() == Some(dg.identity_h(a.right))
                    }
                    Axis::Vertical => {
                        dg.compose_v(a, &inv).ok() == Some(dg.identity_v(a.top))
                            && dg.compose_v(&inv, a).ok() == Some(dg.identity_v(a.bottom))
                    }
                };
            let law = match axis {
                Axis::Horizontal => "quintet-inverse-h",
                Axis::Vertical => "quintet-inverse-v",
            };
            report.expect(law, ok, || witness!(square = ai));
        }
        let unit_ok = dg.compose_h(&dg.identity_h(a.left), a).ok() == Some(*a)
            && dg.compose_h(a, &dg.identity_h(a.right)).ok() == Some(*a)
            && dg.compose_v(&dg.identity_v(a.top), a).ok() == Some(*a)
            && dg.compose_v(a, &dg.identity_v(a.bottom)).ok() == Some(*a);
        report.expect("quintet-units", unit_ok, || witness!(square = ai));
    }

    // Associativity on 1×3 and 3×1 strips, sampled when large.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x4153_534f);
    let strips = cfg.samples.min(sq.len() as u64 * 64);
    for _ in 0..strips {
        let a = rng.random_range(0..sq.len());
        let b = *idx.by_left[sq[a].right]
            .choose(&mut rng)
            .expect("non-empty");
        let c = *idx.by_left[sq[b].right]
            .choose(&mut rng)
            .expect("non-empty");
        let (x, y, z) = (&sq[a], &sq[b], &sq[c]);
        let l = dg.compose_h(&dg.compose_h(x, y).unwrap(), z).unwrap();
        let r = dg.compose_h(x, &dg.compose_h(y, z).unwrap()).unwrap();
        report.expect("quintet-assoc-h", l == r, || witness!(a = a, b = b, c = c));
        let b = *idx.by_top[sq[a].bottom]
            .choose(&mut rng)
            .expect("non-empty");
        let c = *idx.by_top[sq[b].bottom]
            .choose(&mut rng)
            .expect("non-empty");
        let (x, y, z) = (&sq[a], &sq[b], &sq[c]);
        let l = dg.compose_v(&dg.compose_v(x, y).unwrap(), z).unwrap();
        let r = dg.compose_v(x, &dg.compose_v(y, z).unwrap()).unwrap();
        report.expect("quintet-assoc-v", l == r, || witness!(a = a, b = b, c = c));
    }

    // Squares with identity vertical edges are the 2-morphisms (top, face):
    // horizontal pasting is the tensor product, vertical pasting is composition.
    let e = g.identity();
    let thin: Vec<&Quintet> = sq.iter().filter(|s| s.left == e && s.right == e).collect();
    for a in &thin {
        for b in &thin {
            let ab = dg.compose_h(a, b).unwrap();
            let t = crate::catgroup::tensor_raw(xm, (a.top, a.face), (b.top, b.face));
            report.expect(
                "quintet-embedding-h",
                ab.left == e && ab.right == e && (ab.top, ab.face) == t,
                || witness!(a = idx_of(sq, a), b = idx_of(sq, b)),
            );
            if a.bottom == b.top {
                let ab = dg.compose_v(a, b).unwrap();
                let ok = ab.left == e
                    && ab.right == e
                    && ab.top == a.top
                    && ab.face == xm.h().mul(b.face, a.face);
                report.expect("quintet-embedding-v", ok, || {
                    witness!(a = idx_of(sq, a), b = idx_of(sq, b))
                });
            }
        }
    }
    report
}

fn idx_of(squares: &[Quintet], sq: &Quintet) -> usize {
    squares.iter().position(|s| s == sq).unwrap_or(usize::MAX)
}

/// Splits `cfg.samples` into fixed chunks with derived seeds, so the result
/// does not depend on the thread count.
pub(crate) fn sample_chunks(cfg: &VerifyConfig) -> Vec<(u64, u64)> {
    const CHUNK: u64 = 4096;
    let mut out = Vec::new();
    let mut left = cfg.samples;
    let mut k = 0u64;
    while left > 0 {
        let n = left.min(CHUNK);
        out.push((
            cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k),
            n,
        ));
        left -= n;
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn make_square_examples() {
        let xm1 = catalog::xm1();
        let dg = DoubleGroupoid::new(&xm1);
        assert!(dg.make_square(1, 0, 1, 0, 1).is_ok());
        assert!(dg.make_square(0, 0, 0, 0, 0).is_ok());
        let xm4 = catalog::xm4();
        assert_eq!(
            DoubleGroupoid::new(&xm4).make_square(0, 0, 0, 1, 0),
            Err(QuintetError::BoundaryViolation { lhs: 0, rhs: 1 })
        );
    }

    #[test]
    fn xm1_composition_examples() {
        let xm1 = catalog::xm1();
        let dg = DoubleGroupoid::new(&xm1);
        let a = dg.make_square(1, 0, 1, 0, 1).unwrap();
        let b = dg.make_square(1, 0, 1, 0, 2).unwrap();
        let q = |l, t, r, b, e| Quintet {
            left: l,
            top: t,
            right: r,
            bottom: b,
            face: e,
        };
        assert_eq!(dg.compose_h(&a, &b).unwrap(), q(1, 0, 1, 0, 0));
        assert_eq!(dg.compose_h_alt(&a, &b).unwrap(), q(1, 0, 1, 0, 0));
        assert_eq!(dg.compose_v(&a, &b).unwrap(), q(0, 0, 0, 0, 1));
        assert_eq!(dg.invert(&a, Axis::Horizontal), q(1, 0, 1, 0, 2));
        assert_eq!(
            dg.compose_h(&a, &dg.invert(&a, Axis::Horizontal))
                .unwrap()
                .face,
            0
        );
        assert_eq!(dg.compose_h(&a, &dg.identity_h(1)).unwrap(), a);
        assert_eq!(dg.compose_v(&a, &dg.identity_v(0)).unwrap(), a);
    }

    #[test]
    fn xm2_nonabelian_vertical_instance() {
        let xm2 = catalog::xm2();
        let dg = DoubleGroupoid::new(&xm2);
        let s3 = xm2.g();
        // top = ((12), (123), (13), b1; η) with b1 forced by the boundary law for η = (23).
        let (t12, t13, t23, c123) = (
            s3.index_of("(12)").unwrap(),
            s3.index_of("(13)").unwrap(),
            s3.index_of("(23)").unwrap(),
            s3.index_of("(123)").unwrap(),
        );
        let solve_bottom = |left: usize, top: usize, right: usize, face: usize| {
            // ∂η = b·r·t⁻¹·l⁻¹  ⇒  b = ∂η·l·t·r⁻¹
            s3.product(&[xm2.d(face), left, top, s3.inv(right)])
        };
        let b1 = solve_bottom(t12, c123, t13, t23);
        let upper = dg.make_square(t12, c123, t13, b1, t23).unwrap();
        let lower_face = c123;
        let lower_left = t23;
        let lower_right = s3.identity();
        let b2 = solve_bottom(lower_left, b1, lower_right, lower_face);
        let lower = dg
            .make_square(lower_left, b1, lower_right, b2, lower_face)
            .unwrap();
        let v = dg.compose_v(&upper, &lower).unwrap();
        assert!(dg.is_square(&v));
        assert_eq!(v.face, s3.mul(c123, s3.conjugate(t23, t23)));
    }

    #[test]
    fn grid_evaluation_small() {
        let xm1 = Arc::new(catalog::xm1());
        let dg = DoubleGroupoid::new(&xm1);
        let a = dg.make_square(1, 0, 1, 0, 1).unwrap();
        let b = dg.make_square(1, 0, 1, 0, 2).unwrap();
        let one = QuintetGrid::from_rows(xm1.clone(), vec![vec![a]]).unwrap();
        assert_eq!(evaluate_grid(&one).unwrap(), a);
        let grid = QuintetGrid::from_rows(xm1.clone(), vec![vec![a, b], vec![b, a]]).unwrap();
        let rows_first = evaluate_grid(&grid).unwrap();
        assert_eq!(rows_first, evaluate_grid_columns_first(&grid).unwrap());
        let row0 = dg.compose_h(&a, &b).unwrap();
        let row1 = dg.compose_h(&b, &a).unwrap();
        assert_eq!(rows_first, dg.compose_v(&row0, &row1).unwrap());
        let bad = dg.make_square(0, 0, 0, 0, 0).unwrap();
        assert_eq!(
            QuintetGrid::from_rows(xm1, vec![vec![a, bad]]),
            Err(QuintetError::AdjacencyViolation {
                row: 0,
                col: 0,
                axis: Axis::Horizontal
            })
        );
    }

    #[test]
    fn small_fixtures_pass_all_laws_exhaustively() {
        let cfg = VerifyConfig::default();
        for xm in [catalog::xm1(), catalog::xm3(), catalog::xm4()] {
            let report = verify_quintet_laws(&xm, &cfg);
            assert!(report.is_empty(), "{report}");
        }
    }

    #[test]
    fn square_counts() {
        // XM1: 8 edge labellings with even sum, 3 faces each.
        assert_eq!(DoubleGroupoid::new(&catalog::xm1()).all_squares().len(), 24);
        // ∂ = id: the face is determined by the edges.
        assert_eq!(
            DoubleGroupoid::new(&catalog::xm2()).all_squares().len(),
            1296
        );
    }

    proptest! {
        #[test]
        fn xm2_grids_3x2_interchange(seed in any::<u64>()) {
            let xm2 = Arc::new(catalog::xm2());
            let dg = DoubleGroupoid::new(&xm2);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = xm2.g().order();
            let mut pick = |n: usize| rng.random_range(0..n);
            // Build top-left to bottom-right, choosing free edges at random and
            // solving the boundary law for the bottom edge.
            let mut rows: Vec<Vec<Quintet>> = Vec::new();
            for i in 0..3 {
                let mut row = Vec::new();
                for j in 0..2 {
                    let left = if j == 0 { pick(g) } else { row.last().map(|s: &Quintet| s.right).unwrap() };
                    let top = if i == 0 { pick(g) } else { rows[i - 1][j].bottom };
                    let right = pick(g);
                    let face = pick(g);
                    let s3 = xm2.g();
                    let bottom = s3.product(&[xm2.d(face), left, top, s3.inv(right)]);
                    row.push(dg.make_square(left, top, right, bottom, face).unwrap());
                }
                rows.push(row);
            }
            let grid = QuintetGrid::from_rows(xm2.clone(), rows).unwrap();
            let r = evaluate_grid(&grid).unwrap();
            prop_assert_eq!(r, evaluate_grid_columns_first(&grid).unwrap());
            prop_assert!(dg.is_square(&r));
        }
    }
}

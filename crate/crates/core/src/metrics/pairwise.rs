//! Blocked pairwise squared Euclidean distances.
//!
//! Blocks are produced through the Gram identity
//! `|x - y|^2 = |x|^2 + |y|^2 - 2 x.y` with a dense matrix product per tile,
//! which keeps the `O(n m d)` sweep fast at bench sizes. Entries carry an
//! absolute error of order `eps * (|x|^2 + |y|^2)`; callers that need exact
//! nearest-neighbour distances re-evaluate the selected pair directly.

use crate::cloud::{squared_distance, PointCloud};

const TILE_ROWS: usize = 256;
const TILE_COLS: usize = 256;

pub(crate) fn squared_norms(c: &PointCloud) -> Vec<f64> {
    c.rows().map(|r| r.iter().map(|v| v * v).sum()).collect()
}

/// A tile of squared distances between rows `i0..i0+rows` of `x` and
/// `j0..j0+cols` of `y`, stored row-major.
pub(crate) struct Tile<'a> {
    pub i0: usize,
    pub j0: usize,
    pub rows: usize,
    pub cols: usize,
    pub d2: &'a [f64],
}

impl Tile<'_> {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d2[i * self.cols + j]
    }
}

/// Visit all tiles of the `x.n() x y.n()` distance matrix in row-block-major
/// order. With `upper_only`, tiles strictly below the block diagonal are
/// skipped (used for the pooled self-distance matrix).
pub(crate) fn for_each_tile(
    x: &PointCloud,
    y: &PointCloud,
    upper_only: bool,
    mut f: impl FnMut(&Tile<'_>),
) {
    debug_assert_eq!(x.d(), y.d());
    let d = x.d();
    let nx = squared_norms(x);
    let ny = squared_norms(y);
    let xs = x.as_slice();
    let ys = y.as_slice();
    let mut buf = vec![0.0f64; TILE_ROWS * TILE_COLS];

    let mut i0 = 0;
    while i0 < x.n() {
        let rows = TILE_ROWS.min(x.n() - i0);
        let mut j0 = if upper_only { i0 - i0 % TILE_COLS } else { 0 };
        while j0 < y.n() {
            let cols = TILE_COLS.min(y.n() - j0);
            let out = &mut buf[..rows * cols];
            // SAFETY: the slices cover rows*d, cols*d and rows*cols elements
            // with the strides given below.
            unsafe {
                matrixmultiply::dgemm(
                    rows,
                    d,
                    cols,
                    -2.0,
                    xs.as_ptr().add(i0 * d),
                    d as isize,
                    1,
                    ys.as_ptr().add(j0 * d),
                    1,
                    d as isize,
                    0.0,
                    out.as_mut_ptr(),
                    cols as isize,
                    1,
                );
            }
            for i in 0..rows {
                let ni = nx[i0 + i];
                let line = &mut out[i * cols..(i + 1) * cols];
                for (j, v) in line.iter_mut().enumerate() {
                    *v = (*v + ni + ny[j0 + j]).max(0.0);
                }
            }
            f(&Tile {
                i0,
                j0,
                rows,
                cols,
                d2: out,
            });
            j0 += cols;
        }
        i0 += rows;
    }
}

/// Nearest-neighbour squared distances in both directions between `a` and
/// `b`: `(min_j |a_i - b_j|^2 for each i, min_i |a_i - b_j|^2 for each j)`.
///
/// Candidates are located on the Gram tiles and the winning pair is then
/// re-evaluated by direct differencing.
pub(crate) fn nearest_squared(a: &PointCloud, b: &PointCloud) -> (Vec<f64>, Vec<f64>) {
    let mut row_best = vec![(f64::INFINITY, 0usize); a.n()];
    let mut col_best = vec![(f64::INFINITY, 0usize); b.n()];
    for_each_tile(a, b, false, |t| {
        for i in 0..t.rows {
            let line = &t.d2[i * t.cols..(i + 1) * t.cols];
            let rb = &mut row_best[t.i0 + i];
            for (j, &v) in line.iter().enumerate() {
                if v < rb.0 {
                    *rb = (v, t.j0 + j);
                }
                let cb = &mut col_best[t.j0 + j];
                if v < cb.0 {
                    *cb = (v, t.i0 + i);
                }
            }
        }
    });
    let rows = row_best
        .iter()
        .enumerate()
        .map(|(i, &(_, j))| squared_distance(a.row(i), b.row(j)))
        .collect();
    let cols = col_best
        .iter()
        .enumerate()
        .map(|(j, &(_, i))| squared_distance(a.row(i), b.row(j)))
        .collect();
    (rows, cols)
}

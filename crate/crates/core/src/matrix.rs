//! Dense integer matrices over `BigInt` with Smith and Hermite normal forms.
//!
//! Everything downstream (cohomology groups, exactness certificates, quotient
//! lattices) reduces to kernels, solves and invariant factors computed here.
//! Elimination pivots on the entry of minimal absolute value to keep
//! coefficient growth in check.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Row-major dense matrix over the integers.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMat {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut m = IntMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Convenience constructor from machine integers (tests, small builtins).
    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        IntMat::from_fn(r, c, |i, j| BigInt::from(rows[i][j]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> IntMat {
        IntMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.get(i, j).is_one()
                    } else {
                        self.get(i, j).is_zero()
                    }
                })
            })
    }

    /// Matrix product. Iterates only over nonzero entries, which matters a
    /// lot for the permutation-flavoured matrices that dominate this crate.
    pub fn mul(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        // nonzero column indices per row of `other`
        let nz: Vec<Vec<usize>> = (0..other.rows)
            .map(|k| (0..other.cols).filter(|&j| !other.get(k, j).is_zero()).collect())
            .collect();
        let mut out = IntMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for &j in &nz[k] {
                    let cur = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &IntMat) -> IntMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn neg(&self) -> IntMat {
        IntMat::from_fn(self.rows, self.cols, |i, j| -self.get(i, j))
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![BigInt::zero(); self.rows];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() || v[k].is_zero() {
                    continue;
                }
                out[i] += a * &v[k];
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn hstack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.rows, other.rows);
        IntMat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &IntMat) -> IntMat {
        assert_eq!(self.cols, other.cols);
        IntMat::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self.get(i, j).clone()
            } else {
                other.get(i - self.rows, j).clone()
            }
        })
    }

    pub fn hstack_all(mats: &[IntMat]) -> IntMat {
        assert!(!mats.is_empty());
        let rows = mats[0].rows;
        let cols: usize = mats.iter().map(|m| m.cols).sum();
        let mut out = IntMat::zeros(rows, cols);
        let mut off = 0;
        for m in mats {
            assert_eq!(m.rows, rows);
            for i in 0..rows {
                for j in 0..m.cols {
                    out.set(i, off + j, m.get(i, j).clone());
                }
            }
            off += m.cols;
        }
        out
    }

    pub fn vstack_all(mats: &[IntMat]) -> IntMat {
        assert!(!mats.is_empty());
        let cols = mats[0].cols;
        let rows: usize = mats.iter().map(|m| m.rows).sum();
        let mut out = IntMat::zeros(rows, cols);
        let mut off = 0;
        for m in mats {
            assert_eq!(m.cols, cols);
            for i in 0..m.rows {
                for j in 0..cols {
                    out.set(off + i, j, m.get(i, j).clone());
                }
            }
            off += m.rows;
        }
        out
    }

    /// Block-diagonal assembly.
    pub fn block_diag(mats: &[IntMat]) -> IntMat {
        let rows: usize = mats.iter().map(|m| m.rows).sum();
        let cols: usize = mats.iter().map(|m| m.cols).sum();
        let mut out = IntMat::zeros(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for m in mats {
            for i in 0..m.rows {
                for j in 0..m.cols {
                    out.set(ro + i, co + j, m.get(i, j).clone());
                }
            }
            ro += m.rows;
            co += m.cols;
        }
        out
    }

    /// Keep the listed columns, in the listed order.
    pub fn select_columns(&self, idx: &[usize]) -> IntMat {
        IntMat::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    /// Keep the listed rows, in the listed order.
    pub fn select_rows(&self, idx: &[usize]) -> IntMat {
        IntMat::from_fn(idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += c * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self.get(src, j);
            if s.is_zero() {
                continue;
            }
            let v = self.get(dst, j) + c * s;
            self.set(dst, j, v);
        }
    }

    /// col[dst] += c * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = self.get(i, src);
            if s.is_zero() {
                continue;
            }
            let v = self.get(i, dst) + c * s;
            self.set(i, dst, v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

/// Quotient rounded to nearest, so the remainder satisfies |r| <= |b|/2.
fn rounded_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_rem(b);
    let r2: BigInt = &r * 2;
    if r2.abs() > b.abs() {
        if r.sign() == b.sign() {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

/// Which transform matrices to accumulate during SNF.
#[derive(Clone, Copy, Default)]
pub struct SnfTransforms {
    pub u: bool,
    pub uinv: bool,
    pub v: bool,
    pub vinv: bool,
}

impl SnfTransforms {
    pub fn none() -> Self {
        Default::default()
    }
    pub fn all() -> Self {
        SnfTransforms {
            u: true,
            uinv: true,
            v: true,
            vinv: true,
        }
    }
    pub fn uv() -> Self {
        SnfTransforms {
            u: true,
            v: true,
            ..Default::default()
        }
    }
}

/// Smith normal form `u * a * v = d` with `u`, `v` unimodular and the diagonal
/// of `d` a divisibility chain.
pub struct Snf {
    pub d: IntMat,
    pub u: Option<IntMat>,
    pub uinv: Option<IntMat>,
    pub v: Option<IntMat>,
    pub vinv: Option<IntMat>,
    pub rank: usize,
}

impl Snf {
    /// Nonzero diagonal entries, in divisibility order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d.get(i, i).clone()).collect()
    }
}

pub fn snf(a: &IntMat, want: SnfTransforms) -> Snf {
    snf_owned(a.clone(), want)
}

/// SNF that consumes its input, avoiding a copy of large matrices.
pub fn snf_owned(a: IntMat, want: SnfTransforms) -> Snf {
    let mut d = a;
    let mut u = want.u.then(|| IntMat::identity(d.rows()));
    let mut uinv = want.uinv.then(|| IntMat::identity(d.rows()));
    let mut v = want.v.then(|| IntMat::identity(d.cols()));
    let mut vinv = want.vinv.then(|| IntMat::identity(d.cols()));

    let n = d.rows().min(d.cols());
    let mut t = 0;
    while t < n {
        // min-abs pivot over the trailing submatrix
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..d.rows() {
            for j in t..d.cols() {
                if d.get(i, j).is_zero() {
                    continue;
                }
                match &pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if d.get(i, j).abs() < d.get(*pi, *pj).abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        swap_rows_tracked(&mut d, &mut u, &mut uinv, t, pi);
        swap_cols_tracked(&mut d, &mut v, &mut vinv, t, pj);

        // clear row t and column t; re-pivot while remainders shrink
        loop {
            let mut clean = true;
            for i in (t + 1)..d.rows() {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = rounded_div(d.get(i, t), d.get(t, t));
                row_axpy_tracked(&mut d, &mut u, &mut uinv, i, t, &-&q);
                if !d.get(i, t).is_zero() {
                    // remainder strictly smaller than pivot: promote it
                    swap_rows_tracked(&mut d, &mut u, &mut uinv, t, i);
                    clean = false;
                }
            }
            for j in (t + 1)..d.cols() {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = rounded_div(d.get(t, j), d.get(t, t));
                col_axpy_tracked(&mut d, &mut v, &mut vinv, j, t, &-&q);
                if !d.get(t, j).is_zero() {
                    swap_cols_tracked(&mut d, &mut v, &mut vinv, t, j);
                    clean = false;
                }
            }
            if clean {
                // both row and column are clear except the pivot
                let row_clear = ((t + 1)..d.rows()).all(|i| d.get(i, t).is_zero());
                let col_clear = ((t + 1)..d.cols()).all(|j| d.get(t, j).is_zero());
                if row_clear && col_clear {
                    break;
                }
            }
        }
        if d.get(t, t).is_negative() {
            negate_row_tracked(&mut d, &mut u, &mut uinv, t);
        }
        t += 1;
    }
    let mut rank = 0;
    while rank < n && !d.get(rank, rank).is_zero() {
        rank += 1;
    }

    // enforce the divisibility chain d1 | d2 | ...
    let mut i = 0;
    while i + 1 < rank {
        let a_ = d.get(i, i).clone();
        let b_ = d.get(i + 1, i + 1).clone();
        if (&b_ % &a_).is_zero() {
            i += 1;
            continue;
        }
        // couple the two diagonal entries in one column, then re-clear
        col_axpy_tracked(&mut d, &mut v, &mut vinv, i, i + 1, &BigInt::one());
        // now d[i][i] = a, d[i+1][i] = b; run a local gcd reduction
        loop {
            if d.get(i + 1, i).is_zero() {
                break;
            }
            if d.get(i, i).is_zero() || d.get(i + 1, i).abs() < d.get(i, i).abs() {
                swap_rows_tracked(&mut d, &mut u, &mut uinv, i, i + 1);
            }
            let q = rounded_div(d.get(i + 1, i), d.get(i, i));
            row_axpy_tracked(&mut d, &mut u, &mut uinv, i + 1, i, &-&q);
        }
        // clear the (i, i+1) fill-in
        if !d.get(i, i + 1).is_zero() {
            let q = rounded_div(d.get(i, i + 1), d.get(i, i));
            col_axpy_tracked(&mut d, &mut v, &mut vinv, i + 1, i, &-&q);
            // exact since gcd divides everything in the 2x2 block
            debug_assert!(d.get(i, i + 1).is_zero());
        }
        if d.get(i, i).is_negative() {
            negate_row_tracked(&mut d, &mut u, &mut uinv, i);
        }
        if d.get(i + 1, i + 1).is_negative() {
            negate_row_tracked(&mut d, &mut u, &mut uinv, i + 1);
        }
        // the new d[i][i] is a proper divisor of the old; rescan backwards
        i = i.saturating_sub(1);
    }

    Snf {
        d,
        u,
        uinv,
        v,
        vinv,
        rank,
    }
}

fn swap_rows_tracked(d: &mut IntMat, u: &mut Option<IntMat>, uinv: &mut Option<IntMat>, a: usize, b: usize) {
    d.swap_rows(a, b);
    if let Some(u) = u {
        u.swap_rows(a, b);
    }
    if let Some(ui) = uinv {
        ui.swap_cols(a, b);
    }
}

fn swap_cols_tracked(d: &mut IntMat, v: &mut Option<IntMat>, vinv: &mut Option<IntMat>, a: usize, b: usize) {
    d.swap_cols(a, b);
    if let Some(v) = v {
        v.swap_cols(a, b);
    }
    if let Some(vi) = vinv {
        vi.swap_rows(a, b);
    }
}

fn row_axpy_tracked(
    d: &mut IntMat,
    u: &mut Option<IntMat>,
    uinv: &mut Option<IntMat>,
    dst: usize,
    src: usize,
    c: &BigInt,
) {
    d.row_axpy(dst, src, c);
    if let Some(u) = u {
        u.row_axpy(dst, src, c);
    }
    if let Some(ui) = uinv {
        // inverse of (row dst += c row src) is col src -= c col dst
        ui.col_axpy(src, dst, &-c);
    }
}

fn col_axpy_tracked(
    d: &mut IntMat,
    v: &mut Option<IntMat>,
    vinv: &mut Option<IntMat>,
    dst: usize,
    src: usize,
    c: &BigInt,
) {
    d.col_axpy(dst, src, c);
    if let Some(v) = v {
        v.col_axpy(dst, src, c);
    }
    if let Some(vi) = vinv {
        vi.row_axpy(src, dst, &-c);
    }
}

fn negate_row_tracked(d: &mut IntMat, u: &mut Option<IntMat>, uinv: &mut Option<IntMat>, i: usize) {
    d.negate_row(i);
    if let Some(u) = u {
        u.negate_row(i);
    }
    if let Some(ui) = uinv {
        ui.negate_col(i);
    }
}

/// Nonzero invariant factors of `a`.
pub fn invariant_factors(a: &IntMat) -> Vec<BigInt> {
    snf(a, SnfTransforms::none()).invariant_factors()
}

/// Rank of `a` over the rationals.
pub fn rank(a: &IntMat) -> usize {
    snf(a, SnfTransforms::none()).rank
}

/// All nonzero invariant factors equal 1, i.e. the column span is a direct
/// summand of the ambient lattice.
pub fn is_saturated(a: &IntMat) -> bool {
    invariant_factors(a).iter().all(|d| d.is_one())
}

/// Basis of the integer kernel of `a`, as columns. Always saturated.
pub fn kernel(a: &IntMat) -> IntMat {
    kernel_owned(a.clone())
}

pub fn kernel_owned(a: IntMat) -> IntMat {
    let cols = a.cols();
    let s = snf_owned(
        a,
        SnfTransforms {
            v: true,
            ..Default::default()
        },
    );
    let v = s.v.unwrap();
    let idx: Vec<usize> = (s.rank..cols).collect();
    v.select_columns(&idx)
}

/// Exact solver for `a x = b`, reusable across many right-hand sides.
pub struct Solver {
    u: IntMat,
    v: IntMat,
    diag: Vec<BigInt>,
    rank: usize,
    cols: usize,
}

impl Solver {
    pub fn new(a: &IntMat) -> Solver {
        let s = snf(a, SnfTransforms::uv());
        Solver {
            diag: s.invariant_factors(),
            u: s.u.unwrap(),
            v: s.v.unwrap(),
            rank: s.rank,
            cols: a.cols(),
        }
    }

    /// Some integer solution of `a x = b`, or None when none exists.
    pub fn solve(&self, b: &[BigInt]) -> Option<Vec<BigInt>> {
        let ub = self.u.mul_vec(b);
        let mut y = vec![BigInt::zero(); self.cols];
        for (i, ubi) in ub.iter().enumerate() {
            if i < self.rank {
                let (q, r) = ubi.div_rem(&self.diag[i]);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            } else if !ubi.is_zero() {
                return None;
            }
        }
        Some(self.v.mul_vec(&y))
    }

    /// Columnwise solve: finds X with a X = B.
    pub fn solve_mat(&self, b: &IntMat) -> Option<IntMat> {
        let mut out = IntMat::zeros(self.cols, b.cols());
        for j in 0..b.cols() {
            let x = self.solve(&b.column(j))?;
            for (i, xi) in x.into_iter().enumerate() {
                out.set(i, j, xi);
            }
        }
        Some(out)
    }
}

/// Inverse of a unimodular matrix.
pub fn inverse_unimodular(a: &IntMat) -> Option<IntMat> {
    assert_eq!(a.rows(), a.cols());
    let s = snf(a, SnfTransforms::uv());
    if s.rank != a.rows() || !s.invariant_factors().iter().all(|d| d.is_one()) {
        return None;
    }
    // u a v = I  =>  a^{-1} = v u
    Some(s.v.unwrap().mul(&s.u.unwrap()))
}

/// Column-style Hermite normal form: canonical basis of the column span,
/// zero columns dropped. Two matrices span the same column lattice iff their
/// HNFs are equal.
pub fn column_hnf(a: &IntMat) -> IntMat {
    let mut m = a.clone();
    let mut pivot_col = 0;
    let mut pivot_rows: Vec<usize> = Vec::new();
    for row in 0..m.rows() {
        if pivot_col >= m.cols() {
            break;
        }
        loop {
            // min-abs nonzero among active columns at this row
            let mut best: Option<usize> = None;
            for j in pivot_col..m.cols() {
                if m.get(row, j).is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(j),
                    Some(b) => {
                        if m.get(row, j).abs() < m.get(row, b).abs() {
                            best = Some(j);
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            m.swap_cols(pivot_col, b);
            let mut clean = true;
            for j in (pivot_col + 1)..m.cols() {
                if m.get(row, j).is_zero() {
                    continue;
                }
                let q = rounded_div(m.get(row, j), m.get(row, pivot_col));
                m.col_axpy(j, pivot_col, &-&q);
                if !m.get(row, j).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if m.get(row, pivot_col).is_zero() {
            continue;
        }
        if m.get(row, pivot_col).is_negative() {
            m.negate_col(pivot_col);
        }
        // canonical: reduce earlier pivot columns at this row into [0, pivot)
        for (k, &prow) in pivot_rows.iter().enumerate() {
            let _ = prow;
            let piv = m.get(row, pivot_col).clone();
            let v = m.get(row, k);
            if !v.is_zero() {
                let q = v.div_floor(&piv);
                m.col_axpy(k, pivot_col, &-&q);
            }
        }
        pivot_rows.push(row);
        pivot_col += 1;
    }
    let idx: Vec<usize> = (0..pivot_col).collect();
    m.select_columns(&idx)
}

/// Do the columns of `sub` span a sublattice of the column span of `ambient`?
pub fn columns_contained(sub: &IntMat, ambient: &IntMat) -> bool {
    Solver::new(ambient).solve_mat(sub).is_some()
}

/// Equality of column spans.
pub fn same_column_span(a: &IntMat, b: &IntMat) -> bool {
    column_hnf(a) == column_hnf(b)
}

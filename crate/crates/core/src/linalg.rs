//! Exact integer linear algebra.
//!
//! Everything downstream (homology of handlebodies, boundary groups,
//! module homomorphisms, isometry checks) reduces to the operations here:
//! Smith normal form with unimodular transforms, kernels, cokernels and
//! fraction-free determinants. All arithmetic is on [`BigInt`].

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn diagonal(values: &[BigInt]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m.entries[i * n + i] = v.clone();
        }
        m
    }

    /// Builds a matrix from small integer rows. Panics on ragged input.
    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self {
            rows: r,
            cols: c,
            entries: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[Vec<BigInt>]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(Error::Dimension(format!(
                    "column {j} has length {}, expected {rows}",
                    col.len()
                )));
            }
            for (i, v) in col.iter().enumerate() {
                m.entries[i * m.cols + j] = v.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.entries[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix product; panics on incompatible shapes.
    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other)
            .expect("matrix shapes checked by caller")
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.cols, "vector length");
        (0..self.rows)
            .map(|i| {
                self.entries[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn neg(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| -x).collect(),
        }
    }

    /// Bilinear evaluation `xᵀ·self·y`.
    pub fn bilinear(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        let my = self.apply(y);
        x.iter().zip(&my).map(|(a, b)| a * b).sum()
    }

    /// `baseᵀ·self·base`, the Gram matrix of the columns of `base`.
    pub fn congruence(&self, base: &Self) -> Self {
        base.transpose().mul(&self.mul(base))
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (oi, i) in rows.clone().enumerate() {
            for (oj, j) in cols.clone().enumerate() {
                out.entries[oi * out.cols + oj] = self.get(i, j).clone();
            }
        }
        out
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "hstack of {} and {} rows",
                self.rows, other.rows
            )));
        }
        let mut out = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        Ok(self.transpose().hstack(&other.transpose())?.transpose())
    }

    pub fn block_diag(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += factor * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for j in 0..self.cols {
            let delta = factor * &self.entries[src * self.cols + j];
            self.entries[dst * self.cols + j] += delta;
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for i in 0..self.rows {
            let delta = factor * &self.entries[i * self.cols + src];
            self.entries[i * self.cols + dst] += delta;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self.entries[i * self.cols + j];
            self.entries[i * self.cols + j] = v;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix{}x{}[", self.rows, self.cols)?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
                format!("[{}]", row.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// `U·M·V = D` with `U`, `V` unimodular and `D` in Smith normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Diagonal entries `d_1, ..., d_min(rows, cols)`, zeros included.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form with transforms.
///
/// The diagonal is non-negative and each entry divides the next; the
/// zero entries trail the non-zero ones.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    'pivots: for t in 0..rows.min(cols) {
        loop {
            // smallest non-zero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let x = d.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break 'pivots;
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let pivot = d.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..rows {
                let q = d.get(i, t) / &pivot;
                if !q.is_zero() {
                    let f = -q;
                    d.add_row_multiple(i, t, &f);
                    u.add_row_multiple(i, t, &f);
                }
                dirty |= !d.get(i, t).is_zero();
            }
            for j in t + 1..cols {
                let q = d.get(t, j) / &pivot;
                if !q.is_zero() {
                    let f = -q;
                    d.add_col_multiple(j, t, &f);
                    v.add_col_multiple(j, t, &f);
                }
                dirty |= !d.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            // enforce divisibility of the trailing block by the pivot
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d.get(i, j).is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d.get(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithDecomposition { u, d, v }
}

pub fn rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank()
}

/// Finitely generated abelian group `Z^r ⊕ Z/d_1 ⊕ ... ⊕ Z/d_k`, `d_i | d_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FgAbelianGroup {
    pub free_rank: usize,
    pub torsion_divisors: Vec<BigInt>,
}

impl FgAbelianGroup {
    pub fn trivial() -> Self {
        Self {
            free_rank: 0,
            torsion_divisors: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        Self {
            free_rank: rank,
            torsion_divisors: Vec::new(),
        }
    }

    /// Canonical form of `Z^{free_rank} ⊕ ⊕ Z/o` for arbitrary orders.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        cokernel(&IntMatrix::diagonal(orders))
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion_divisors.is_empty()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion_divisors.is_empty()
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.torsion_divisors.iter().product()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut orders: Vec<BigInt> = vec![BigInt::zero(); self.free_rank + other.free_rank];
        orders.extend(self.torsion_divisors.iter().cloned());
        orders.extend(other.torsion_divisors.iter().cloned());
        Self::from_cyclic_orders(&orders)
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion_divisors.iter().map(|d| format!("Z/{d}")));
        write!(f, "{}", parts.join(" + "))
    }
}

/// The quotient of `Z^rows` by the column span of `m`.
pub fn cokernel(m: &IntMatrix) -> FgAbelianGroup {
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    let rank = diag.iter().filter(|x| !x.is_zero()).count();
    FgAbelianGroup {
        free_rank: m.rows() - rank,
        torsion_divisors: diag.into_iter().filter(|x| *x > BigInt::one()).collect(),
    }
}

/// Saturated basis (as columns) of the integer kernel `{v : M·v = 0}`.
///
/// The trailing columns of the Smith transform `V` span the kernel; the
/// basis is then put in column Hermite form so that it depends only on
/// the kernel lattice.
pub fn kernel_basis(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let r = snf.rank();
    column_hermite_basis(&snf.v.submatrix(0..m.cols(), r..m.cols()))
}

/// Fraction-free (Bareiss) determinant.
pub fn determinant(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "determinant of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !a.get(i, k).is_zero()) {
                Some(i) => {
                    a.swap_rows(k, i);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let val = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                a.set(i, j, val);
            }
        }
        prev = a.get(k, k).clone();
    }
    Ok(sign * a.get(n - 1, n - 1))
}

/// Some integer solution of `A·x = b`, if one exists.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len(), "right-hand side length");
    let snf = smith_normal_form(a);
    let ub = snf.u.apply(b);
    let diag = snf.diagonal();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, c) in ub.iter().enumerate() {
        match diag.get(i) {
            Some(d) if !d.is_zero() => {
                if !c.is_multiple_of(d) {
                    return None;
                }
                y[i] = c / d;
            }
            _ => {
                if !c.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(snf.v.apply(&y))
}

/// Inverse of a unimodular matrix; `None` if `|det| != 1`.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    if !m.is_square() || determinant(m).ok()?.abs() != BigInt::one() {
        return None;
    }
    let n = m.rows();
    let cols: Option<Vec<Vec<BigInt>>> = (0..n)
        .map(|j| {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            solve(m, &e)
        })
        .collect();
    IntMatrix::from_columns(n, &cols?).ok()
}

/// Basis of the lattice spanned by the columns of `m`, in column Hermite
/// form: each basis column has a positive pivot strictly below the pivot of
/// the previous column, and entries left of a pivot lie in `[0, pivot)`.
///
/// The form depends only on the lattice, so two matrices with the same
/// column span give identical output.
pub fn column_hermite_basis(m: &IntMatrix) -> IntMatrix {
    let rows = m.rows();
    let mut rest: Vec<Vec<BigInt>> = m.columns();
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for i in 0..rows {
        loop {
            rest.retain(|c| c.iter().any(|x| !x.is_zero()));
            let nz: Vec<usize> = (0..rest.len()).filter(|&j| !rest[j][i].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz
                .iter()
                .min_by_key(|&&j| rest[j][i].abs())
                .expect("at least two candidates");
            let pivot_col = rest[p].clone();
            for &q in nz.iter().filter(|&&q| q != p) {
                let f = &rest[q][i] / &pivot_col[i];
                for (x, y) in rest[q].iter_mut().zip(&pivot_col) {
                    *x -= &f * y;
                }
            }
        }
        let Some(p) = (0..rest.len()).find(|&j| !rest[j][i].is_zero()) else {
            continue;
        };
        let mut c = rest.remove(p);
        if c[i].is_negative() {
            c.iter_mut().for_each(|x| *x = -&*x);
        }
        for b in &mut basis {
            let q = b[i].div_floor(&c[i]);
            if !q.is_zero() {
                for (x, y) in b.iter_mut().zip(&c) {
                    *x -= &q * y;
                }
            }
        }
        basis.push(c);
    }
    IntMatrix::from_columns(rows, &basis).expect("columns have the row count")
}

/// Counts of positive, negative and zero eigenvalue signs of a symmetric
/// matrix, via congruence diagonalization over the rationals.
#[allow(clippy::needless_range_loop)]
pub fn inertia(q: &IntMatrix) -> Result<(usize, usize, usize)> {
    if !q.is_symmetric() {
        return Err(Error::Invariant("form is not symmetric".into()));
    }
    let n = q.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from_integer(q.get(i, j).clone()))
                .collect()
        })
        .collect();
    let (mut pos, mut neg) = (0usize, 0usize);
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let pivot = active.iter().copied().find(|&i| !a[i][i].is_zero());
        let p = match pivot {
            Some(p) => p,
            None => {
                // all remaining diagonal entries vanish; use an off-diagonal pair
                let pair = active.iter().copied().find_map(|i| {
                    active
                        .iter()
                        .copied()
                        .find(|&j| j != i && !a[i][j].is_zero())
                        .map(|j| (i, j))
                });
                let Some((i, j)) = pair else { break };
                // basis change e_i <- e_i + e_j
                for k in 0..n {
                    let v = a[j][k].clone();
                    a[i][k] += v;
                }
                for k in 0..n {
                    let v = a[k][j].clone();
                    a[k][i] += v;
                }
                i
            }
        };
        let piv = a[p][p].clone();
        if piv.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        active.retain(|&i| i != p);
        for &i in &active {
            let f = &a[i][p] / &piv;
            if f.is_zero() {
                continue;
            }
            for k in 0..n {
                let v = &f * &a[p][k];
                a[i][k] -= v;
            }
            for k in 0..n {
                let v = &f * &a[k][p];
                a[k][i] -= v;
            }
        }
    }
    Ok((pos, neg, n - pos - neg))
}

pub fn signature(q: &IntMatrix) -> Result<BigInt> {
    let (p, n, _) = inertia(q)?;
    Ok(BigInt::from(p) - BigInt::from(n))
}

/// Non-degenerate means `det ≠ 0`; the empty form counts as non-degenerate.
pub fn is_nondegenerate(q: &IntMatrix) -> bool {
    determinant(q).is_ok_and(|d| !d.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    fn big(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn snf_identity() {
        let s = smith_normal_form(&IntMatrix::identity(2));
        assert_eq!(s.u, IntMatrix::identity(2));
        assert_eq!(s.d, IntMatrix::identity(2));
        assert_eq!(s.v, IntMatrix::identity(2));
    }

    #[test]
    fn snf_two_by_two() {
        let a = m(&[vec![2, 4], vec![6, 8]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.d, m(&[vec![2, 0], vec![0, 4]]));
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert_eq!(determinant(&a).unwrap().abs(), BigInt::from(8));
    }

    #[test]
    fn snf_zero_and_empty() {
        let s = smith_normal_form(&m(&[vec![0]]));
        assert_eq!(s.d, m(&[vec![0]]));
        let e = IntMatrix::zeros(0, 3);
        let s = smith_normal_form(&e);
        assert_eq!(s.v, IntMatrix::identity(3));
        assert_eq!(s.rank(), 0);
    }

    #[test]
    fn cokernel_examples() {
        assert_eq!(cokernel(&m(&[vec![2]])).to_string(), "Z/2");
        assert!(cokernel(&m(&[vec![1]])).is_trivial());
        assert!(cokernel(&m(&[vec![0, 1], vec![1, 0]])).is_trivial());
        assert_eq!(cokernel(&m(&[vec![0]])), FgAbelianGroup::free(1));
        assert_eq!(
            cokernel(&m(&[vec![2, 0], vec![0, 3]])).torsion_divisors,
            big(&[6])
        );
    }

    #[test]
    fn kernel_examples() {
        let k = kernel_basis(&m(&[vec![1, 1]]));
        assert_eq!(k.cols(), 1);
        let v = k.column(0);
        assert!(v == big(&[1, -1]) || v == big(&[-1, 1]));
        assert_eq!(kernel_basis(&IntMatrix::identity(2)).cols(), 0);
        assert_eq!(kernel_basis(&IntMatrix::zeros(1, 2)).cols(), 2);
    }

    #[test]
    fn kernel_is_saturated() {
        // kernel of [2, 4] is spanned by (2, -1), not a multiple of it
        let k = kernel_basis(&m(&[vec![2, 4]]));
        assert_eq!(k.cols(), 1);
        let g = cokernel(&k);
        assert!(g.is_torsion_free());
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(determinant(&IntMatrix::identity(3)).unwrap(), BigInt::one());
        assert_eq!(
            determinant(&m(&[vec![0, 1], vec![1, 0]])).unwrap(),
            BigInt::from(-1)
        );
        for f in -5..=5 {
            assert_eq!(
                determinant(&m(&[vec![0, 1], vec![1, f]])).unwrap(),
                BigInt::from(-1)
            );
        }
        assert!(matches!(
            determinant(&IntMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[vec![2, 1], vec![1, 1]]);
        let x = solve(&a, &big(&[3, 2])).unwrap();
        assert_eq!(a.apply(&x), big(&[3, 2]));
        assert!(solve(&m(&[vec![2]]), &big(&[1])).is_none());
        let inv = unimodular_inverse(&a).unwrap();
        assert_eq!(a.mul(&inv), IntMatrix::identity(2));
        assert!(unimodular_inverse(&m(&[vec![2]])).is_none());
    }

    #[test]
    fn hermite_basis() {
        let s = m(&[vec![2, 4, 6], vec![0, 0, 0]]);
        assert_eq!(column_hermite_basis(&s), m(&[vec![2], vec![0]]));
        let a = m(&[vec![1, 1], vec![0, 2], vec![3, 1]]);
        let b = m(&[vec![2, 1], vec![2, 0], vec![4, 3]]);
        // b = a · [[1,1],[1,0]], same lattice
        assert_eq!(column_hermite_basis(&a), column_hermite_basis(&b));
        assert_eq!(
            column_hermite_basis(&a),
            m(&[vec![1, 0], vec![0, 2], vec![3, -2]])
        );
    }

    #[test]
    fn inertia_examples() {
        assert_eq!(inertia(&m(&[vec![0, 1], vec![1, 0]])).unwrap(), (1, 1, 0));
        assert_eq!(inertia(&m(&[vec![-1, 0], vec![0, -1]])).unwrap(), (0, 2, 0));
        assert_eq!(inertia(&m(&[vec![0, 0], vec![0, 0]])).unwrap(), (0, 0, 2));
        assert_eq!(
            signature(&m(&[vec![2, 1], vec![1, 2]])).unwrap(),
            BigInt::from(2)
        );
        assert!(inertia(&m(&[vec![0, 1], vec![2, 0]])).is_err());
    }

    #[test]
    fn group_display() {
        assert_eq!(FgAbelianGroup::trivial().to_string(), "0");
        assert_eq!(FgAbelianGroup::free(1).to_string(), "Z");
        let g = FgAbelianGroup::from_cyclic_orders(&big(&[0, 0, 2, 4]));
        assert_eq!(g.to_string(), "Z^2 + Z/2 + Z/4");
    }
}

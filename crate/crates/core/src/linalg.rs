//! Exact symmetric matrices, fraction-free elimination and definiteness tests.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::scalar::{sign_of, Field, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square (row {row} has {len} entries, order {order})")]
    NotSquare {
        row: usize,
        len: usize,
        order: usize,
    },
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
}

/// Square symmetric matrix stored densely in row-major order.
#[derive(Clone, PartialEq)]
pub struct SymMatrix<T> {
    order: usize,
    entries: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            order,
            entries: vec![T::zero(); order * order],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, LinalgError> {
        let order = rows.len();
        let mut entries = Vec::with_capacity(order * order);
        for (row, r) in rows.into_iter().enumerate() {
            if r.len() != order {
                return Err(LinalgError::NotSquare {
                    row,
                    len: r.len(),
                    order,
                });
            }
            entries.extend(r);
        }
        let m = SymMatrix { order, entries };
        for i in 0..order {
            for j in (i + 1)..order {
                if m.get(i, j) != m.get(j, i) {
                    return Err(LinalgError::NotSymmetric { i, j });
                }
            }
        }
        Ok(m)
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| T::from_i64(v)).collect())
                .collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.order + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[j * self.order + i] = v.clone();
        self.entries[i * self.order + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries
            .chunks(self.order.max(1))
            .take(self.order)
            .map(|c| c.to_vec())
            .collect()
    }

    /// Simultaneous row/column permutation: result[i][j] = self[perm[i]][perm[j]].
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, LinalgError> {
        if perm.len() != self.order {
            return Err(LinalgError::DimensionMismatch {
                expected: self.order,
                got: perm.len(),
            });
        }
        let mut out = Self::zeros(self.order);
        for i in 0..self.order {
            for j in 0..self.order {
                out.entries[i * self.order + j] = self.get(perm[i], perm[j]).clone();
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>, LinalgError> {
        if x.len() != self.order {
            return Err(LinalgError::DimensionMismatch {
                expected: self.order,
                got: x.len(),
            });
        }
        Ok((0..self.order)
            .map(|i| {
                (0..self.order).fold(T::zero(), |acc, j| {
                    acc + self.get(i, j).clone() * x[j].clone()
                })
            })
            .collect())
    }

    /// x · M · x
    pub fn quadratic_form(&self, x: &[T]) -> Result<T, LinalgError> {
        let mx = self.mul_vec(x)?;
        Ok(x.iter()
            .zip(mx)
            .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b))
    }

    /// Leading principal minors D_1, D_2, ... computed by Bareiss elimination
    /// without row exchanges. Stops after the first zero minor, since the
    /// remaining ones are not reachable without pivoting.
    pub fn leading_minors(&self) -> Vec<T> {
        let n = self.order;
        let mut a = self.entries.clone();
        let mut prev = T::one();
        let mut minors = Vec::with_capacity(n);
        for k in 0..n {
            let pivot = a[k * n + k].clone();
            minors.push(pivot.clone());
            if pivot.is_negligible() {
                break;
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let v = (pivot.clone() * a[i * n + j].clone()
                        - a[i * n + k].clone() * a[k * n + j].clone())
                        / prev.clone();
                    a[i * n + j] = v;
                }
            }
            prev = pivot;
        }
        minors
    }

    /// Determinant by Bareiss elimination with row exchanges.
    pub fn determinant(&self) -> T {
        let n = self.order;
        if n == 0 {
            return T::one();
        }
        let mut a = self.entries.clone();
        let mut prev = T::one();
        let mut negate = false;
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r * n + k].is_negligible()) else {
                return T::zero();
            };
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                negate = !negate;
            }
            let pivot = a[k * n + k].clone();
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    a[i * n + j] = (pivot.clone() * a[i * n + j].clone()
                        - a[i * n + k].clone() * a[k * n + j].clone())
                        / prev.clone();
                }
            }
            prev = pivot;
        }
        let d = a[n * n - 1].clone();
        if negate {
            -d
        } else {
            d
        }
    }
}

impl<T: Scalar> fmt::Debug for SymMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// Outcome of [`solve_exact`].
#[derive(Debug, Clone, PartialEq)]
pub enum Solution<T> {
    /// Nonsingular system.
    Unique(Vec<T>),
    /// Singular but consistent: every `particular + Σ t_k nullspace[k]` solves it.
    Underdetermined {
        particular: Vec<T>,
        nullspace: Vec<Vec<T>>,
    },
    /// Singular and inconsistent.
    Inconsistent { rank: usize },
}

impl<T> Solution<T> {
    pub fn unique(self) -> Option<Vec<T>> {
        match self {
            Solution::Unique(x) => Some(x),
            _ => None,
        }
    }
}

/// Solves `m · x = rhs` exactly.
///
/// Forward elimination is Bareiss fraction-free with row exchanges over the
/// augmented matrix; back substitution then runs in the field.
pub fn solve_exact<T: Field>(m: &SymMatrix<T>, rhs: &[T]) -> Result<Solution<T>, LinalgError> {
    let n = m.order();
    if rhs.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let w = n + 1;
    let mut a: Vec<T> = Vec::with_capacity(n * w);
    for (i, r) in rhs.iter().enumerate() {
        a.extend((0..n).map(|j| m.get(i, j).clone()));
        a.push(r.clone());
    }

    let mut pivot_cols = Vec::with_capacity(n);
    let mut prev = T::one();
    let mut row = 0;
    for col in 0..n {
        if row == n {
            break;
        }
        let Some(p) = (row..n).find(|&r| !a[r * w + col].is_negligible()) else {
            continue;
        };
        if p != row {
            for j in 0..w {
                a.swap(row * w + j, p * w + j);
            }
        }
        let pivot = a[row * w + col].clone();
        for i in (row + 1)..n {
            let factor = a[i * w + col].clone();
            let live = !factor.is_zero();
            for j in (col + 1)..w {
                // Graph matrices are sparse; zero stays zero.
                if a[i * w + j].is_zero() && (!live || a[row * w + j].is_zero()) {
                    continue;
                }
                a[i * w + j] = (pivot.clone() * a[i * w + j].clone()
                    - factor.clone() * a[row * w + j].clone())
                    / prev.clone();
            }
            a[i * w + col] = T::zero();
        }
        prev = pivot;
        pivot_cols.push(col);
        row += 1;
    }
    let rank = row;

    if (rank..n).any(|i| !a[i * w + n].is_negligible()) {
        return Ok(Solution::Inconsistent { rank });
    }

    let back_substitute = |rhs_col: &dyn Fn(usize) -> T, fixed: &[(usize, T)]| -> Vec<T> {
        let mut x = vec![T::zero(); n];
        for (c, v) in fixed {
            x[*c] = v.clone();
        }
        for r in (0..rank).rev() {
            let pc = pivot_cols[r];
            let mut acc = rhs_col(r);
            for j in (pc + 1)..n {
                if !x[j].is_zero() {
                    acc = acc - a[r * w + j].clone() * x[j].clone();
                }
            }
            x[pc] = acc / a[r * w + pc].clone();
        }
        x
    };

    let particular = back_substitute(&|r| a[r * w + n].clone(), &[]);
    if rank == n {
        return Ok(Solution::Unique(particular));
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let nullspace = free
        .iter()
        .map(|&f| back_substitute(&|_| T::zero(), &[(f, T::one())]))
        .collect();
    Ok(Solution::Underdetermined {
        particular,
        nullspace,
    })
}

/// Sylvester's criterion: (-1)^k · D_k > 0 for every leading principal minor.
pub fn is_negative_definite<T: Scalar>(m: &SymMatrix<T>) -> bool {
    let n = m.order();
    if n == 0 {
        return true;
    }
    let minors = m.leading_minors();
    minors.len() == n
        && minors.iter().enumerate().all(|(k, d)| {
            let s = sign_of(d);
            if k % 2 == 0 {
                s < 0
            } else {
                s > 0
            }
        })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PivotSigns {
    Determinate(Vec<i8>),
    /// A zero pivot with nonzero entries below it; the decomposition would need
    /// a row exchange at this index.
    Indeterminate {
        at: usize,
    },
}

impl PivotSigns {
    pub fn all_negative(&self) -> Option<bool> {
        match self {
            PivotSigns::Determinate(s) => Some(s.iter().all(|&v| v < 0)),
            PivotSigns::Indeterminate { .. } => None,
        }
    }
}

/// Pivot signs of the symmetric decomposition M = L·D·Lᵀ without exchanges.
pub fn pivot_signs<T: Field>(m: &SymMatrix<T>) -> PivotSigns {
    let n = m.order();
    let mut a = m.rows();
    let mut signs = Vec::with_capacity(n);
    for k in 0..n {
        let d = a[k][k].clone();
        if d.is_negligible() {
            if ((k + 1)..n).any(|i| !a[i][k].is_negligible()) {
                return PivotSigns::Indeterminate { at: k };
            }
            signs.push(0);
            continue;
        }
        signs.push(sign_of(&d));
        let (head, tail) = a.split_at_mut(k + 1);
        let pivot_row = &head[k];
        for row in tail {
            let l = row[k].clone() / d.clone();
            if l.is_zero() {
                continue;
            }
            for (x, p) in row.iter_mut().zip(pivot_row).skip(k + 1) {
                *x = x.clone() - l.clone() * p.clone();
            }
        }
    }
    PivotSigns::Determinate(signs)
}

/// Symmetric matrix stored as a diagonal plus adjacency maps, for
/// elimination on graph-shaped matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym<T> {
    diag: Vec<T>,
    off: Vec<BTreeMap<usize, T>>,
}

/// Result of [`SparseSym::eliminate_negative`].
#[derive(Debug, Clone, PartialEq)]
pub struct Elimination<T> {
    /// `(index, pivot)` in elimination order; ends at the first pivot that is
    /// not negative.
    pub pivots: Vec<(usize, T)>,
    pub negative_definite: bool,
}

impl<T: Field> SparseSym<T> {
    pub fn new(diag: Vec<T>) -> Self {
        let n = diag.len();
        SparseSym {
            diag,
            off: vec![BTreeMap::new(); n],
        }
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    /// Adds `v` at (i, j) and (j, i), `i != j`.
    pub fn add(&mut self, i: usize, j: usize, v: T) {
        assert_ne!(i, j, "diagonal entries go through `new`");
        for (a, b) in [(i, j), (j, i)] {
            let e = self.off[a].entry(b).or_insert_with(T::zero);
            *e = e.clone() + v.clone();
            if e.is_zero() {
                self.off[a].remove(&b);
            }
        }
    }

    /// Symmetric Gaussian elimination, least-degree vertex first (ties by
    /// index), with `last` held back to the end when given.
    ///
    /// By Sylvester's law of inertia the matrix is negative definite iff
    /// every pivot is negative, whatever the order.
    pub fn eliminate_negative(mut self, last: Option<usize>) -> Elimination<T> {
        let n = self.order();
        let mut alive = vec![true; n];
        let mut pivots = Vec::with_capacity(n);
        for _ in 0..n {
            let k = (0..n)
                .filter(|&k| alive[k] && Some(k) != last)
                .min_by_key(|&k| (self.off[k].len(), k))
                .or(last.filter(|&l| alive[l]))
                .expect("one live vertex per step");
            alive[k] = false;
            let d = self.diag[k].clone();
            let negative = sign_of(&d) < 0;
            pivots.push((k, d.clone()));
            if !negative {
                return Elimination {
                    pivots,
                    negative_definite: false,
                };
            }
            let row: Vec<(usize, T)> = std::mem::take(&mut self.off[k]).into_iter().collect();
            for (i, _) in &row {
                self.off[*i].remove(&k);
            }
            for (x, (i, aik)) in row.iter().enumerate() {
                let l = aik.clone() / d.clone();
                self.diag[*i] = self.diag[*i].clone() - l.clone() * aik.clone();
                for (j, ajk) in &row[x + 1..] {
                    self.add(*i, *j, -(l.clone() * ajk.clone()));
                }
            }
        }
        Elimination {
            pivots,
            negative_definite: true,
        }
    }
}

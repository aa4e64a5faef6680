//! Dense linear algebra over GF(p) and the ground-truth oracle for Jordan
//! partitions of `J_r ⊗ J_s`.
//!
//! The oracle recovers the partition from the nilpotent matrix
//! `N = J_r ⊗ J_s − I` by computing the flag of iterated kernels
//! `ker N ⊂ ker N² ⊂ …`. The jump sizes `w_t = dim ker N^t − dim ker N^{t−1}`
//! are the conjugate of the block-size partition, which is equivalent to the
//! rank-sequence description: the number of blocks of size at least `t` equals
//! `rank(N^{t−1}) − rank(N^t)`.
//!
//! Kernels are grown one level at a time by lifting: `ker N^{t+1}` is the
//! preimage `N⁻¹(ker N^t ∩ im N)` plus `ker N`, so each level solves
//! `N·x = v` for the kernel vectors found so far and keeps the consistent
//! combinations. Solving is abstracted behind [`ChainSolver`]; there is a
//! generic implementation backed by one row reduction of `[N | I]`, and a
//! fast one for `J_r ⊗ J_s − I` itself that back-substitutes through the
//! operator's block bidiagonal structure without materializing the matrix.

use std::fmt;

use thiserror::Error;

use crate::arith::{inv_mod, is_prime};
use crate::jordan::Query;

/// Default cap on `r·s` for [`oracle_jordan_partition`].
pub const DEFAULT_ORACLE_CAP: usize = 4096;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfpError {
    #[error("modulus {0} is not prime")]
    NonPrimeModulus(u64),
    #[error("modulus {0} does not fit in 31 bits")]
    ModulusTooLarge(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("matrix dimensions must be positive")]
    EmptyMatrix,
    #[error("entry count {got} does not match {rows}x{cols}")]
    BadEntryCount { rows: usize, cols: usize, got: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("oracle too large: dimension r*s = {dim} exceeds cap {cap}")]
    OracleTooLarge { dim: u128, cap: usize },
}

/// Dense row-major matrix over GF(p), entries reduced to `[0, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GFpMatrix {
    modulus: u64,
    rows: usize,
    cols: usize,
    entries: Vec<u64>,
}

impl GFpMatrix {
    pub fn new(modulus: u64, rows: usize, cols: usize, entries: Vec<u64>) -> Result<Self, GfpError> {
        check_modulus(modulus)?;
        if rows == 0 || cols == 0 {
            return Err(GfpError::EmptyMatrix);
        }
        if entries.len() != rows * cols {
            return Err(GfpError::BadEntryCount { rows, cols, got: entries.len() });
        }
        let entries = entries.into_iter().map(|e| e % modulus).collect();
        Ok(Self { modulus, rows, cols, entries })
    }

    pub fn zeros(modulus: u64, rows: usize, cols: usize) -> Result<Self, GfpError> {
        Self::new(modulus, rows, cols, vec![0; rows * cols])
    }

    pub fn identity(modulus: u64, n: usize) -> Result<Self, GfpError> {
        let mut m = Self::zeros(modulus, n, n)?;
        for i in 0..n {
            m.entries[i * n + i] = 1 % modulus;
        }
        Ok(m)
    }

    /// Test helper: build from explicit rows.
    pub fn from_rows(modulus: u64, rows: &[Vec<u64>]) -> Result<Self, GfpError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(GfpError::BadEntryCount { rows: r, cols: c, got: row.len() });
            }
            entries.extend_from_slice(row);
        }
        Self::new(modulus, r, c, entries)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> u64 {
        assert!(row < self.rows && col < self.cols);
        self.entries[row * self.cols + col]
    }

    /// Kronecker product: `(A ⊗ B)[(i·B.rows + k), (j·B.cols + l)] = A[i,j]·B[k,l]`.
    pub fn kron(&self, other: &GFpMatrix) -> Result<GFpMatrix, GfpError> {
        if self.modulus != other.modulus {
            return Err(GfpError::ModulusMismatch(self.modulus, other.modulus));
        }
        let p = self.modulus;
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = GFpMatrix::zeros(p, rows, cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.entry(i, j);
                if a == 0 {
                    continue;
                }
                for k in 0..other.rows {
                    let dst_row = i * other.rows + k;
                    for l in 0..other.cols {
                        let b = other.entry(k, l);
                        out.entries[dst_row * cols + j * other.cols + l] = a * b % p;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self − I`, reduced mod p. Square matrices only.
    pub fn minus_identity(&self) -> Result<GFpMatrix, GfpError> {
        if self.rows != self.cols {
            return Err(GfpError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let p = self.modulus;
        let mut out = self.clone();
        for i in 0..self.rows {
            let e = &mut out.entries[i * self.cols + i];
            *e = (*e + p - 1) % p;
        }
        Ok(out)
    }

    /// Rank over GF(p) by forward elimination with modular-inverse pivots.
    /// The receiver is not mutated; two calls on equal matrices return equal ranks.
    pub fn rank(&self) -> usize {
        let p = self.modulus;
        let mut work = self.entries.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut rank = 0usize;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            // Row-swap partial pivoting on the first nonzero entry.
            let Some(pivot_row) = (rank..rows).find(|&r| work[r * cols + col] != 0) else {
                continue;
            };
            if pivot_row != rank {
                for c in 0..cols {
                    work.swap(pivot_row * cols + c, rank * cols + c);
                }
            }
            let inv = inv_mod(work[rank * cols + col], p);
            for r in rank + 1..rows {
                let lead = work[r * cols + col];
                if lead == 0 {
                    continue;
                }
                let factor = (p - lead * inv % p) % p;
                for c in col..cols {
                    let add = factor * work[rank * cols + c] % p;
                    work[r * cols + c] = (work[r * cols + c] + add) % p;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Jordan block sizes of a nilpotent matrix, as a partition of the dimension.
    ///
    /// Equivalent to reading block counts off the rank sequence of powers
    /// (`#blocks of size >= t` is `rank(N^{t−1}) − rank(N^t)`), but computed by
    /// growing the kernel flag, which costs one elimination instead of one per
    /// power. Non-nilpotent input is detected and rejected: its kernel chain
    /// stabilizes below the full dimension.
    pub fn nilpotent_partition(&self) -> Result<Partition, GfpError> {
        if self.rows != self.cols {
            return Err(GfpError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let solver = DenseSolver::new(self);
        let weyr = weyr_chain(&solver)?;
        Ok(Partition::from_conjugate(&weyr))
    }

    #[cfg(test)]
    fn matmul(&self, other: &GFpMatrix) -> GFpMatrix {
        assert_eq!(self.modulus, other.modulus);
        assert_eq!(self.cols, other.rows);
        let p = self.modulus;
        let mut out = GFpMatrix::zeros(p, self.rows, other.cols).unwrap();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cell = &mut out.entries[i * other.cols + j];
                    *cell = (*cell + a * other.entry(k, j)) % p;
                }
            }
        }
        out
    }
}

fn check_modulus(p: u64) -> Result<(), GfpError> {
    if p >= 1 << 31 {
        return Err(GfpError::ModulusTooLarge(p));
    }
    if !is_prime(p) {
        return Err(GfpError::NonPrimeModulus(p));
    }
    Ok(())
}

/// The `r×r` Jordan block with eigenvalue 1: ones on the diagonal and superdiagonal.
pub fn jordan_block(r: usize, p: u64) -> Result<GFpMatrix, GfpError> {
    let mut m = GFpMatrix::zeros(p, r, r)?;
    let one = 1 % p;
    for i in 0..r {
        m.entries[i * r + i] = one;
        if i + 1 < r {
            m.entries[i * r + i + 1] = one;
        }
    }
    Ok(m)
}

/// Weakly decreasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    parts: Vec<u64>,
}

impl Partition {
    /// Panics if parts are not weakly decreasing or contain zeros.
    pub fn new(parts: Vec<u64>) -> Self {
        assert!(parts.windows(2).all(|w| w[0] >= w[1]), "parts must be weakly decreasing");
        assert!(parts.last().map_or(true, |&last| last > 0), "parts must be positive");
        Self { parts }
    }

    /// Partition whose conjugate is the given weakly decreasing sequence.
    fn from_conjugate(conj: &[usize]) -> Self {
        let longest = conj.first().copied().unwrap_or(0);
        let mut parts = Vec::with_capacity(longest);
        for i in 1..=longest {
            parts.push(conj.iter().take_while(|&&w| w >= i).count() as u64);
        }
        Self::new(parts)
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn weight(&self) -> u128 {
        self.parts.iter().map(|&x| x as u128).sum()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, part) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{part}")?;
        }
        write!(f, ")")
    }
}

/// λ(r, s, p): Jordan partition of `J_r ⊗ J_s − I` over GF(p), with the default
/// size cap.
pub fn oracle_jordan_partition(q: &Query) -> Result<Partition, GfpError> {
    oracle_jordan_partition_capped(q, DEFAULT_ORACLE_CAP)
}

/// As [`oracle_jordan_partition`] with an explicit cap on `r·s`.
pub fn oracle_jordan_partition_capped(q: &Query, cap: usize) -> Result<Partition, GfpError> {
    let dim = q.r() as u128 * q.s() as u128;
    if dim > cap as u128 {
        return Err(GfpError::OracleTooLarge { dim, cap });
    }
    check_modulus(q.p())?;
    let solver = TensorBlockSolver::new(q.r() as usize, q.s() as usize, q.p());
    let weyr = weyr_chain(&solver)?;
    Ok(Partition::from_conjugate(&weyr))
}

/// Linear-system access to a fixed square operator `N` over GF(p).
///
/// `pseudo_solve(v)` must return `(x, res)` with `res` linear in `v`,
/// `res = 0` iff `v ∈ im N`, and `N·x = v` whenever `res = 0`; `x` must also
/// be linear in `v`. `kernel_basis` returns a basis of `ker N`.
trait ChainSolver {
    fn dim(&self) -> usize;
    fn modulus(&self) -> u64;
    fn kernel_basis(&self) -> Vec<Vec<u64>>;
    fn pseudo_solve(&self, v: &[u64]) -> (Vec<u64>, Vec<u64>);
}

/// Kernel-flag construction: returns the jump sequence
/// `w_t = dim ker N^t − dim ker N^{t−1}` of a nilpotent operator.
///
/// Level `t+1` vectors are preimages of the new directions of
/// `ker N^t ∩ im N`; those directions are found by reducing the residuals of
/// the level-`t` vectors against all residuals seen so far, carrying the
/// pseudo-solutions along so a vanishing residual yields its lift for free.
fn weyr_chain(solver: &impl ChainSolver) -> Result<Vec<usize>, GfpError> {
    let n = solver.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let kernel = solver.kernel_basis();
    if kernel.is_empty() {
        return Err(GfpError::NotNilpotent);
    }
    let mut total = kernel.len();
    let mut weyr = vec![kernel.len()];
    let mut echelon = ResidualEchelon::new(solver.modulus());
    let mut frontier = kernel;
    while total < n {
        let mut next = Vec::new();
        for v in &frontier {
            let (x, res) = solver.pseudo_solve(v);
            if let Some(lift) = echelon.insert(res, x) {
                next.push(lift);
            }
        }
        if next.is_empty() {
            // Kernel chain stabilized strictly below full dimension.
            return Err(GfpError::NotNilpotent);
        }
        total += next.len();
        weyr.push(next.len());
        frontier = next;
    }
    debug_assert!(weyr.windows(2).all(|w| w[0] >= w[1]));
    Ok(weyr)
}

/// Column echelon over the residual space, each column carrying the vector
/// whose pseudo-solve produced it. Inserting a column that reduces to zero
/// returns the carried combination: a preimage of a new `ker ∩ im` direction.
struct ResidualEchelon {
    p: u64,
    pivots: Vec<EchelonPivot>,
}

struct EchelonPivot {
    lead: usize,
    res: Vec<u64>,
    x: Vec<u64>,
}

impl ResidualEchelon {
    fn new(p: u64) -> Self {
        Self { p, pivots: Vec::new() }
    }

    fn insert(&mut self, mut res: Vec<u64>, mut x: Vec<u64>) -> Option<Vec<u64>> {
        let p = self.p;
        // For small p the eliminations accumulate unreduced in u64: each term is
        // below 2^30 and the pivot count is bounded by the residual dimension,
        // far inside u64 headroom. One mod pass happens at the end.
        let lazy = p < (1 << 15);
        for piv in &self.pivots {
            let coeff = res[piv.lead] % p;
            if coeff == 0 {
                continue;
            }
            let neg = p - coeff;
            if lazy {
                axpy_lazy(&mut res, neg, &piv.res);
                axpy_lazy(&mut x, neg, &piv.x);
            } else {
                axpy_mod(&mut res, neg, &piv.res, p);
                axpy_mod(&mut x, neg, &piv.x, p);
            }
        }
        if lazy {
            reduce_all(&mut res, p);
            reduce_all(&mut x, p);
        }
        match res.iter().position(|&e| e != 0) {
            None => Some(x),
            Some(lead) => {
                let inv = inv_mod(res[lead], p);
                scale_mod(&mut res, inv, p);
                scale_mod(&mut x, inv, p);
                self.pivots.push(EchelonPivot { lead, res, x });
                None
            }
        }
    }
}

fn axpy_lazy(dst: &mut [u64], coeff: u64, src: &[u64]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d += coeff * s;
    }
}

fn axpy_mod(dst: &mut [u64], coeff: u64, src: &[u64], p: u64) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = (*d + coeff % p * (s % p)) % p;
    }
}

fn reduce_all(v: &mut [u64], p: u64) {
    for e in v.iter_mut() {
        *e %= p;
    }
}

fn scale_mod(v: &mut [u64], coeff: u64, p: u64) {
    for e in v.iter_mut() {
        *e = *e * coeff % p;
    }
}

/// Generic solver: one reduced row echelon pass over `[N | I]` records the
/// transform `T` with `T·N = E`; solvability and solutions then read off
/// `T·v` and the pivot columns.
struct DenseSolver {
    n: usize,
    p: u64,
    pivot_cols: Vec<usize>,
    free_cols: Vec<usize>,
    /// First `rank` rows of `E`, restricted to free columns (for kernel vectors).
    e_free: Vec<u64>,
    /// Full transform, row-major `n × n`.
    t: Vec<u64>,
}

impl DenseSolver {
    fn new(a: &GFpMatrix) -> Self {
        debug_assert_eq!(a.rows, a.cols);
        let n = a.rows;
        let p = a.modulus;
        let width = 2 * n;
        let mut work = vec![0u64; n * width];
        for i in 0..n {
            work[i * width..i * width + n].copy_from_slice(&a.entries[i * n..(i + 1) * n]);
            work[i * width + n + i] = 1 % p;
        }
        let mut pivot_cols = Vec::new();
        let mut row = 0usize;
        for col in 0..n {
            let Some(pr) = (row..n).find(|&r| work[r * width + col] != 0) else {
                continue;
            };
            if pr != row {
                let (lo, hi) = work.split_at_mut(pr * width);
                lo[row * width..row * width + width].swap_with_slice(&mut hi[..width]);
            }
            let inv = inv_mod(work[row * width + col], p);
            for c in col..width {
                work[row * width + c] = work[row * width + c] * inv % p;
            }
            for r in 0..n {
                if r == row {
                    continue;
                }
                let lead = work[r * width + col];
                if lead == 0 {
                    continue;
                }
                let neg = p - lead;
                for c in col..width {
                    let add = neg * work[row * width + c] % p;
                    work[r * width + c] = (work[r * width + c] + add) % p;
                }
            }
            pivot_cols.push(col);
            row += 1;
            if row == n {
                break;
            }
        }
        let rank = pivot_cols.len();
        let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
        let mut e_free = vec![0u64; rank * free_cols.len()];
        for i in 0..rank {
            for (fj, &f) in free_cols.iter().enumerate() {
                e_free[i * free_cols.len() + fj] = work[i * width + f];
            }
        }
        let mut t = vec![0u64; n * n];
        for i in 0..n {
            t[i * n..(i + 1) * n].copy_from_slice(&work[i * width + n..i * width + width]);
        }
        Self { n, p, pivot_cols, free_cols, e_free, t }
    }
}

impl ChainSolver for DenseSolver {
    fn dim(&self) -> usize {
        self.n
    }

    fn modulus(&self) -> u64 {
        self.p
    }

    fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let rank = self.pivot_cols.len();
        let nfree = self.free_cols.len();
        let mut basis = Vec::with_capacity(nfree);
        for (fj, &f) in self.free_cols.iter().enumerate() {
            let mut v = vec![0u64; self.n];
            v[f] = 1 % self.p;
            for i in 0..rank {
                let e = self.e_free[i * nfree + fj];
                v[self.pivot_cols[i]] = (self.p - e) % self.p;
            }
            basis.push(v);
        }
        basis
    }

    fn pseudo_solve(&self, v: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let (n, p) = (self.n, self.p);
        let rank = self.pivot_cols.len();
        let mut tv = vec![0u64; n];
        let lazy = p < (1 << 15) && n < (1 << 33);
        for (i, out) in tv.iter_mut().enumerate() {
            let row = &self.t[i * n..(i + 1) * n];
            if lazy {
                let mut acc = 0u64;
                for (&a, &b) in row.iter().zip(v) {
                    acc += a * b;
                }
                *out = acc % p;
            } else {
                let mut acc = 0u128;
                for (&a, &b) in row.iter().zip(v) {
                    acc += a as u128 * b as u128;
                }
                *out = (acc % p as u128) as u64;
            }
        }
        let mut x = vec![0u64; n];
        for i in 0..rank {
            x[self.pivot_cols[i]] = tv[i];
        }
        let res = tv[rank..].to_vec();
        (x, res)
    }
}

/// Structure-aware solver for `N = J_r ⊗ J_s − I` with `r <= s`.
///
/// In block form `N` has the `s×s` shift `U` on the block diagonal and `J_s`
/// on the block superdiagonal, so `N·x = v` back-substitutes block by block
/// from the bottom in `O(r·s)`; the dangling coordinate of each block row is
/// the consistency residual. Kernel vectors come from seeding the one free
/// coordinate per block.
struct TensorBlockSolver {
    r: usize,
    s: usize,
    p: u64,
}

impl TensorBlockSolver {
    fn new(r: usize, s: usize, p: u64) -> Self {
        assert!(r >= 1 && r <= s);
        Self { r, s, p }
    }
}

impl ChainSolver for TensorBlockSolver {
    fn dim(&self) -> usize {
        self.r * self.s
    }

    fn modulus(&self) -> u64 {
        self.p
    }

    fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let (r, s, p) = (self.r, self.s, self.p);
        let n = r * s;
        let mut basis = Vec::with_capacity(r);
        for seed in 0..r {
            let mut x = vec![0u64; n];
            x[seed * s] = 1 % p;
            // U·x_j = −J·x_{j+1} determines x_j[1..] from the block above; the
            // support never reaches coordinate s−1, so each block is consistent.
            for j in (0..seed).rev() {
                for k in 0..s - 1 {
                    let mut t = x[(j + 1) * s + k];
                    if k + 1 < s {
                        t += x[(j + 1) * s + k + 1];
                    }
                    x[j * s + k + 1] = (p - t % p) % p;
                }
                debug_assert_eq!(x[(j + 1) * s + s - 1], 0);
            }
            basis.push(x);
        }
        basis
    }

    fn pseudo_solve(&self, v: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let (r, s, p) = (self.r, self.s, self.p);
        debug_assert_eq!(v.len(), r * s);
        let mut x = vec![0u64; r * s];
        let mut res = vec![0u64; r];
        for i in (0..r).rev() {
            for k in 0..s {
                // rhs[k] of block row i: v_i[k] − (J_s·x_{i+1})[k]
                let mut t = v[i * s + k];
                if i + 1 < r {
                    t += p - x[(i + 1) * s + k];
                    if k + 1 < s {
                        t += p - x[(i + 1) * s + k + 1];
                    }
                }
                let t = t % p;
                if k + 1 < s {
                    x[i * s + k + 1] = t;
                } else {
                    res[i] = t;
                }
            }
        }
        (x, res)
    }
}

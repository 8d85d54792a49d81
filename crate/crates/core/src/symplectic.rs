//! Bit-packed linear algebra over F₂ and the symplectic structure of the
//! phase-free Pauli group.
//!
//! An `n`-qubit Pauli modulo phase is a point of F₂^{2n}. [`PauliVector`]
//! keeps the X-half and the Z-half in separate word arrays so that the
//! symplectic form is two ANDs and a popcount parity per word. Generator
//! matrices use the row layout `(x_0 .. x_{n-1}, z_0 .. z_{n-1})`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;

const WORD: usize = 64;

#[inline]
fn word_count(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A dense vector over F₂.
///
/// Bit `i` lives in `words[i / 64]` at position `i % 64`. Bits past `len`
/// are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn unit(len: usize, bit: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(bit, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = Self::zeros(0);
        for b in bits {
            v.push(b);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn push(&mut self, value: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, value);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the bitwise AND, i.e. the standard dot product over F₂.
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "bit vector length mismatch");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * WORD + t)
            })
        })
    }

    /// Copy of the bits in `range`.
    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        assert!(start <= end && end <= self.len);
        let mut out = BitVec::zeros(end - start);
        for i in self.ones().filter(|&i| i >= start && i < end) {
            out.set(i - start, true);
        }
        out
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Keep only the bits at `positions`, in that order.
    pub fn select(&self, positions: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(positions.len());
        for (k, &p) in positions.iter().enumerate() {
            if self.get(p) {
                out.set(k, true);
            }
        }
        out
    }
}

/// Lexicographic order with bit 0 as the most significant position.
impl Ord for BitVec {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let bit = diff.trailing_zeros();
                return if (a >> bit) & 1 == 1 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        write!(f, "BitVec({s})")
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// An `n`-qubit Pauli operator modulo phase, `g(ξ) = ⊗ X^{ξ^X_i} Z^{ξ^Z_i}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliVector {
    x: BitVec,
    z: BitVec,
}

/// Single-qubit letter, `Y` being `x = z = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

impl Letter {
    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (true, true) => Letter::Y,
            (false, true) => Letter::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::I => (false, false),
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::I => 'I',
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' | '_' => Some(Letter::I),
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

impl PauliVector {
    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
        }
    }

    pub fn from_halves(x: BitVec, z: BitVec) -> Self {
        assert_eq!(x.len(), z.len(), "x and z halves differ in length");
        Self { x, z }
    }

    /// Single-qubit operator `letter` on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, letter: Letter) -> Self {
        let mut p = Self::identity(n);
        p.set(q, letter);
        p
    }

    /// Inverse of [`PauliVector::to_row`].
    pub fn from_row(row: &BitVec) -> Self {
        assert!(
            row.len().is_multiple_of(2),
            "symplectic row must have even length"
        );
        let n = row.len() / 2;
        Self {
            x: row.slice(0, n),
            z: row.slice(n, 2 * n),
        }
    }

    /// The `(x ‖ z)` row used inside generator matrices.
    pub fn to_row(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    pub fn num_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &BitVec {
        &self.x
    }

    pub fn z(&self) -> &BitVec {
        &self.z
    }

    pub fn letter(&self, q: usize) -> Letter {
        Letter::from_bits(self.x.get(q), self.z.get(q))
    }

    pub fn set(&mut self, q: usize, letter: Letter) {
        let (x, z) = letter.bits();
        self.x.set(q, x);
        self.z.set(q, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    pub fn weight(&self) -> usize {
        (0..self.num_qubits())
            .filter(|&q| self.letter(q) != Letter::I)
            .count()
    }

    /// Product of Paulis, i.e. addition of symplectic vectors.
    pub fn mul_assign(&mut self, other: &PauliVector) {
        self.x.xor_assign(&other.x);
        self.z.xor_assign(&other.z);
    }

    pub fn product(&self, other: &PauliVector) -> PauliVector {
        let mut out = self.clone();
        out.mul_assign(other);
        out
    }

    /// Restriction to the listed qubits, in the listed order.
    pub fn restrict(&self, qubits: &[usize]) -> PauliVector {
        Self {
            x: self.x.select(qubits),
            z: self.z.select(qubits),
        }
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &PauliVector) -> PauliVector {
        Self {
            x: self.x.concat(&other.x),
            z: self.z.concat(&other.z),
        }
    }

    /// Cyclic translation `q ↦ q + shift (mod n)`.
    pub fn translate(&self, shift: usize) -> PauliVector {
        let n = self.num_qubits();
        let mut out = PauliVector::identity(n);
        for q in 0..n {
            out.set((q + shift) % n, self.letter(q));
        }
        out
    }
}

/// `ω(a, b) = Σ_i a^X_i b^Z_i + a^Z_i b^X_i (mod 2)`; `true` iff the Paulis
/// anticommute.
///
/// Panics when the qubit counts differ.
#[inline]
pub fn symplectic_form(a: &PauliVector, b: &PauliVector) -> bool {
    assert_eq!(
        a.num_qubits(),
        b.num_qubits(),
        "symplectic form on mismatched qubit counts"
    );
    a.x.dot(&b.z) ^ a.z.dot(&b.x)
}

/// Symplectic form between two `(x ‖ z)` rows.
#[inline]
pub fn row_form(a: &BitVec, b: &BitVec) -> bool {
    assert_eq!(a.len(), b.len(), "symplectic form on mismatched lengths");
    assert!(
        a.len().is_multiple_of(2),
        "symplectic rows have even length"
    );
    let n = a.len() / 2;
    let mut acc = false;
    for q in 0..n {
        acc ^= (a.get(q) & b.get(n + q)) ^ (a.get(n + q) & b.get(q));
    }
    acc
}

impl fmt::Display for PauliVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.num_qubits() {
            write!(f, "{}", self.letter(q).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

impl FromStr for PauliVector {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let mut p = PauliVector::identity(s.chars().count());
        for (q, c) in s.chars().enumerate() {
            let letter = Letter::from_char(c).ok_or_else(|| ParseError::BadLetter {
                letter: c,
                text: s.to_string(),
            })?;
            p.set(q, letter);
        }
        Ok(p)
    }
}

/// A row-major matrix over F₂.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryMatrix {
    cols: usize,
    rows: Vec<BitVec>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            cols,
            rows: vec![BitVec::zeros(cols); rows],
        }
    }

    pub fn empty(cols: usize) -> Self {
        Self {
            cols,
            rows: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            cols: n,
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
        }
    }

    /// Panics if a row has the wrong length.
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length does not match column count");
        }
        Self { cols, rows }
    }

    /// Parse rows written as strings of `0`/`1`.
    pub fn from_strs(rows: &[&str]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(
            cols,
            rows.iter()
                .map(|r| BitVec::from_bits(r.chars().map(|c| c == '1')))
                .collect(),
        )
    }

    pub fn from_paulis(n: usize, paulis: &[PauliVector]) -> Self {
        Self::from_rows(2 * n, paulis.iter().map(PauliVector::to_row).collect())
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.rows
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn push_row(&mut self, row: BitVec) {
        assert_eq!(
            row.len(),
            self.cols,
            "row length does not match column count"
        );
        self.rows.push(row);
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        self.rows.swap(i, j);
    }

    /// `row[dst] += row[src]`.
    pub fn add_row(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        let s = self.rows[src].clone();
        self.rows[dst].xor_assign(&s);
    }

    pub fn swap_cols(&mut self, i: usize, j: usize) {
        for r in &mut self.rows {
            let (a, b) = (r.get(i), r.get(j));
            r.set(i, b);
            r.set(j, a);
        }
    }

    /// `col[dst] += col[src]`.
    pub fn add_col(&mut self, src: usize, dst: usize) {
        assert_ne!(src, dst);
        for r in &mut self.rows {
            if r.get(src) {
                r.flip(dst);
            }
        }
    }

    pub fn col(&self, j: usize) -> BitVec {
        BitVec::from_bits(self.rows.iter().map(|r| r.get(j)))
    }

    pub fn transpose(&self) -> BinaryMatrix {
        let mut t = BinaryMatrix::zeros(self.cols, self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            for j in r.ones() {
                t.rows[j].set(i, true);
            }
        }
        t
    }

    /// Columns `[start, end)` as a new matrix.
    pub fn col_block(&self, start: usize, end: usize) -> BinaryMatrix {
        BinaryMatrix::from_rows(
            end - start,
            self.rows.iter().map(|r| r.slice(start, end)).collect(),
        )
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BinaryMatrix) -> BinaryMatrix {
        assert_eq!(self.nrows(), other.nrows(), "hstack row mismatch");
        BinaryMatrix::from_rows(
            self.cols + other.cols,
            self.rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.concat(b))
                .collect(),
        )
    }

    /// `[self ; other]`.
    pub fn vstack(&self, other: &BinaryMatrix) -> BinaryMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        BinaryMatrix::from_rows(self.cols, rows)
    }

    /// `cᵀ M` for a coefficient vector of length `nrows`.
    pub fn left_mul(&self, coeffs: &BitVec) -> BitVec {
        assert_eq!(coeffs.len(), self.rows.len(), "coefficient length mismatch");
        let mut out = BitVec::zeros(self.cols);
        for i in coeffs.ones() {
            out.xor_assign(&self.rows[i]);
        }
        out
    }

    /// `M v` for a vector of length `ncols`.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        BitVec::from_bits(self.rows.iter().map(|r| r.dot(v)))
    }

    /// `self · other`.
    pub fn matmul(&self, other: &BinaryMatrix) -> BinaryMatrix {
        assert_eq!(self.cols, other.nrows(), "matmul shape mismatch");
        BinaryMatrix::from_rows(
            other.cols,
            self.rows.iter().map(|r| other.left_mul(r)).collect(),
        )
    }

    /// In-place elimination; returns pivot columns, one per nonzero row, and
    /// leaves the matrix in reduced row echelon form (zero rows at the bottom).
    fn eliminate(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows.len() {
                break;
            }
            let Some(p) = (r..self.rows.len()).find(|&i| self.rows[i].get(c)) else {
                continue;
            };
            self.rows.swap(r, p);
            let pivot = self.rows[r].clone();
            for (i, row) in self.rows.iter_mut().enumerate() {
                if i != r && row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    /// Reduced row echelon form, zero rows kept at the bottom.
    pub fn rref(&self) -> BinaryMatrix {
        let mut m = self.clone();
        m.eliminate();
        m
    }

    /// RREF with zero rows removed: the canonical basis of the row space.
    pub fn row_basis(&self) -> BinaryMatrix {
        let mut m = self.clone();
        let rank = m.eliminate().len();
        m.rows.truncate(rank);
        m
    }

    /// Reduced column echelon form, `rref(Mᵀ)ᵀ`.
    pub fn rcef(&self) -> BinaryMatrix {
        self.transpose().rref().transpose()
    }

    pub fn rank(&self) -> usize {
        self.clone().eliminate().len()
    }

    /// Pivot columns of the RREF.
    pub fn pivots(&self) -> Vec<usize> {
        self.clone().eliminate()
    }

    /// Equality of row spaces.
    pub fn same_row_space(&self, other: &BinaryMatrix) -> bool {
        self.cols == other.cols && self.row_basis() == other.row_basis()
    }

    /// Whether `v` lies in the row space.
    pub fn contains(&self, v: &BitVec) -> bool {
        self.solve(v).is_some()
    }

    /// Coefficients `c` with `cᵀ M = v`, if `v` lies in the row space.
    pub fn solve(&self, v: &BitVec) -> Option<BitVec> {
        assert_eq!(v.len(), self.cols, "solve: vector length mismatch");
        let nrows = self.rows.len();
        // Work rows carry their combination of original rows alongside.
        let mut work: Vec<(BitVec, BitVec)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (r.clone(), BitVec::unit(nrows, i)))
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new();
        let mut next = 0;
        for c in 0..self.cols {
            let Some(p) = (next..work.len()).find(|&i| work[i].0.get(c)) else {
                continue;
            };
            work.swap(next, p);
            let (pr, pc) = work[next].clone();
            for (i, (row, comb)) in work.iter_mut().enumerate() {
                if i != next && row.get(c) {
                    row.xor_assign(&pr);
                    comb.xor_assign(&pc);
                }
            }
            pivots.push((c, next));
            next += 1;
        }
        let mut residual = v.clone();
        let mut coeffs = BitVec::zeros(nrows);
        for &(c, i) in &pivots {
            if residual.get(c) {
                residual.xor_assign(&work[i].0);
                coeffs.xor_assign(&work[i].1);
            }
        }
        residual.is_zero().then_some(coeffs)
    }

    /// Basis of `{v : M v = 0}`.
    pub fn null_space(&self) -> BinaryMatrix {
        let mut m = self.clone();
        let pivots = m.eliminate();
        let mut basis = BinaryMatrix::empty(self.cols);
        let is_pivot = {
            let mut flags = vec![false; self.cols];
            for &c in &pivots {
                flags[c] = true;
            }
            flags
        };
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVec::unit(self.cols, free);
            for (r, &c) in pivots.iter().enumerate() {
                if m.rows[r].get(free) {
                    v.set(c, true);
                }
            }
            basis.push_row(v);
        }
        basis
    }

    /// Rows as Pauli vectors (requires an even column count).
    pub fn paulis(&self) -> Vec<PauliVector> {
        self.rows.iter().map(PauliVector::from_row).collect()
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{} [", self.rows.len(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

/// Swap the x- and z-halves of each row, so that `ω(a, g) = a · swap(g)`.
fn swap_halves(g: &BinaryMatrix) -> BinaryMatrix {
    let n = g.ncols() / 2;
    BinaryMatrix::from_rows(
        g.ncols(),
        g.rows()
            .iter()
            .map(|r| r.slice(n, 2 * n).concat(&r.slice(0, n)))
            .collect(),
    )
}

/// Basis of `{x ∈ F₂^{2n} : ω(x, g) = 0 for every row g}`.
pub fn symplectic_complement(g: &BinaryMatrix) -> BinaryMatrix {
    assert!(
        g.ncols().is_multiple_of(2),
        "symplectic complement needs an even column count"
    );
    swap_halves(g).null_space()
}

/// Whether all rows pairwise commute.
pub fn is_isotropic(g: &BinaryMatrix) -> bool {
    let rows = g.rows();
    rows.iter()
        .enumerate()
        .all(|(i, a)| rows[i + 1..].iter().all(|b| !row_form(a, b)))
}

/// Gram matrix `ω(g_i, g_j)` of a list of Paulis.
pub fn gram_matrix(paulis: &[PauliVector]) -> BinaryMatrix {
    let k = paulis.len();
    let mut m = BinaryMatrix::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            if symplectic_form(&paulis[i], &paulis[j]) {
                m.set(i, j, true);
                m.set(j, i, true);
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliVector {
        s.parse().unwrap()
    }

    /// Plain elimination without pivot bookkeeping, used as a rank oracle.
    fn naive_rank(m: &[Vec<u8>]) -> usize {
        let mut a: Vec<Vec<u8>> = m.to_vec();
        let rows = a.len();
        let cols = a.first().map_or(0, Vec::len);
        let mut rank = 0;
        for c in 0..cols {
            let mut piv = None;
            for r in rank..rows {
                if a[r][c] == 1 {
                    piv = Some(r);
                    break;
                }
            }
            if let Some(pr) = piv {
                a.swap(rank, pr);
                for r in 0..rows {
                    if r != rank && a[r][c] == 1 {
                        for k in 0..cols {
                            a[r][k] ^= a[rank][k];
                        }
                    }
                }
                rank += 1;
            }
        }
        rank
    }

    fn to_nested(m: &BinaryMatrix) -> Vec<Vec<u8>> {
        m.rows()
            .iter()
            .map(|r| r.iter().map(u8::from).collect())
            .collect()
    }

    fn lcg_matrix(seed: u64, rows: usize, cols: usize) -> BinaryMatrix {
        let mut s = seed;
        let mut m = BinaryMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                s = s
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                m.set(i, j, (s >> 33) & 1 == 1);
            }
        }
        m
    }

    /// 2x2 complex matrices for the commutator check, entries (re, im).
    type M2 = [[(i32, i32); 2]; 2];
    fn letter_matrix(l: Letter) -> M2 {
        match l {
            Letter::I => [[(1, 0), (0, 0)], [(0, 0), (1, 0)]],
            Letter::X => [[(0, 0), (1, 0)], [(1, 0), (0, 0)]],
            Letter::Y => [[(0, 0), (0, -1)], [(0, 1), (0, 0)]],
            Letter::Z => [[(1, 0), (0, 0)], [(0, 0), (-1, 0)]],
        }
    }
    fn cmul(a: (i32, i32), b: (i32, i32)) -> (i32, i32) {
        (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
    }
    fn kron(a: &[Vec<(i32, i32)>], b: &M2) -> Vec<Vec<(i32, i32)>> {
        let n = a.len();
        let mut out = vec![vec![(0, 0); 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..2 {
                    for l in 0..2 {
                        out[2 * i + k][2 * j + l] = cmul(a[i][j], b[k][l]);
                    }
                }
            }
        }
        out
    }
    fn dense(pv: &PauliVector) -> Vec<Vec<(i32, i32)>> {
        let mut m = vec![vec![(1, 0)]];
        for q in 0..pv.num_qubits() {
            m = kron(&m, &letter_matrix(pv.letter(q)));
        }
        m
    }
    fn matmul(a: &[Vec<(i32, i32)>], b: &[Vec<(i32, i32)>]) -> Vec<Vec<(i32, i32)>> {
        let n = a.len();
        let mut out = vec![vec![(0, 0); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = (0, 0);
                for k in 0..n {
                    let t = cmul(a[i][k], b[k][j]);
                    acc = (acc.0 + t.0, acc.1 + t.1);
                }
                out[i][j] = acc;
            }
        }
        out
    }

    #[test]
    fn form_examples() {
        assert!(symplectic_form(&p("X"), &p("Z")));
        assert!(!symplectic_form(&p("XX"), &p("ZZ")));
        for s in ["XYZ", "IIY", "ZZX"] {
            assert!(!symplectic_form(&p(s), &p(s)));
        }
        // Dense commutator check for XX vs ZZ.
        let (a, b) = (dense(&p("XX")), dense(&p("ZZ")));
        assert_eq!(matmul(&a, &b), matmul(&b, &a));
    }

    #[test]
    fn form_matches_dense_commutation() {
        let letters = [Letter::I, Letter::X, Letter::Y, Letter::Z];
        for a in 0..16 {
            for b in 0..16 {
                let mut pa = PauliVector::identity(2);
                let mut pb = PauliVector::identity(2);
                pa.set(0, letters[a % 4]);
                pa.set(1, letters[a / 4]);
                pb.set(0, letters[b % 4]);
                pb.set(1, letters[b / 4]);
                let (ma, mb) = (dense(&pa), dense(&pb));
                let commute = matmul(&ma, &mb) == matmul(&mb, &ma);
                assert_eq!(symplectic_form(&pa, &pb), !commute, "{pa} {pb}");
            }
        }
    }

    #[test]
    fn pauli_text_round_trip() {
        let q = p("IXYZ");
        assert_eq!(q.to_string(), "IXYZ");
        assert_eq!(q.letter(2), Letter::Y);
        assert_eq!(PauliVector::from_row(&q.to_row()), q);
        assert!("XQ".parse::<PauliVector>().is_err());
    }

    #[test]
    fn rref_examples() {
        let id = BinaryMatrix::identity(4);
        assert_eq!(id.rref(), id);
        let dup = BinaryMatrix::from_strs(&["11", "11"]);
        assert_eq!(dup.rref(), BinaryMatrix::from_strs(&["11", "00"]));
    }

    #[test]
    fn rcef_examples() {
        let id = BinaryMatrix::identity(3);
        assert_eq!(id.rcef(), id);
        let dup = BinaryMatrix::from_strs(&["11", "11", "00"]);
        assert_eq!(dup.rcef(), BinaryMatrix::from_strs(&["10", "10", "00"]));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(BinaryMatrix::zeros(3, 5).rank(), 0);
        assert_eq!(BinaryMatrix::identity(7).rank(), 7);
        let n = 6;
        let mut gens = Vec::new();
        for i in 0..n {
            gens.push(PauliVector::single(n, i, Letter::Z));
            let mut x = PauliVector::identity(n);
            for k in [i + n - 1, i, i + 1] {
                x.set(k % n, Letter::X);
            }
            gens.push(x);
        }
        assert_eq!(BinaryMatrix::from_paulis(n, &gens).rank(), 10);
    }

    #[test]
    fn rank_matches_naive_oracle() {
        for seed in 0..40 {
            let m = lcg_matrix(seed, 10, 10);
            assert_eq!(m.rank(), naive_rank(&to_nested(&m)), "seed {seed}");
            assert_eq!(m.rcef().rank(), m.rank());
        }
    }

    #[test]
    fn solve_examples() {
        let m = lcg_matrix(7, 6, 9);
        assert_eq!(
            m.solve(&BitVec::zeros(9)).map(|c| m.left_mul(&c)),
            Some(BitVec::zeros(9))
        );
        let c = m.solve(m.row(3)).unwrap();
        assert_eq!(&m.left_mul(&c), m.row(3));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(symplectic_complement(&BinaryMatrix::empty(4)).nrows(), 4);
        let g = BinaryMatrix::from_paulis(2, &[p("ZI")]);
        let c = symplectic_complement(&g);
        let expect = BinaryMatrix::from_paulis(2, &[p("ZI"), p("IZ"), p("IX")]);
        assert!(c.same_row_space(&expect));
        // Brute force over all 16 vectors.
        let mut count = 0;
        for bits in 0u32..16 {
            let v = BitVec::from_bits((0..4).map(|k| bits >> k & 1 == 1));
            let orth = !row_form(&v, g.row(0));
            assert_eq!(orth, c.contains(&v));
            count += usize::from(orth);
        }
        assert_eq!(count, 8);
        let lag = BinaryMatrix::from_paulis(3, &[p("XXX"), p("ZZI"), p("IZZ")]);
        assert!(symplectic_complement(&lag).same_row_space(&lag));
    }

    #[test]
    fn null_space_is_orthogonal() {
        for seed in 0..20 {
            let m = lcg_matrix(seed + 100, 5, 11);
            let ns = m.null_space();
            assert_eq!(ns.nrows() + m.rank(), 11);
            for v in ns.rows() {
                assert!(m.mul_vec(v).is_zero());
            }
        }
    }

    #[test]
    fn lexicographic_order_reads_bit_zero_first() {
        let a = BitVec::from_bits([false, true, true]);
        let b = BitVec::from_bits([true, false, false]);
        assert!(a < b);
    }
}

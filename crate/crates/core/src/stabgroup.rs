//! Stabilizer groups as isotropic subspaces of F₂^{2n}, the bipartite
//! canonical form, and the sign-free contraction primitives used to glue
//! tensors together.
//!
//! Signs are never tracked. Postselecting a Pauli `P` keeps the subgroup
//! commuting with `P` and adjoins `P`; the row space is what matters.

use std::fmt;

use crate::error::{ParseError, StabError};
use crate::symplectic::{
    gram_matrix, is_isotropic, row_form, symplectic_complement, symplectic_form, BinaryMatrix,
    BitVec, Letter, PauliVector,
};

/// An abelian Pauli subgroup, stored as a full-rank list of generators.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StabilizerGroup {
    n: usize,
    gens: BinaryMatrix,
}

/// Greedily drop rows that are zero or dependent on earlier rows, keeping order.
fn independent_rows(cols: usize, rows: impl IntoIterator<Item = BitVec>) -> BinaryMatrix {
    let mut kept = BinaryMatrix::empty(cols);
    // Reduced copies of the kept rows, each tagged with its pivot column.
    let mut reduced: Vec<(usize, BitVec)> = Vec::new();
    for row in rows {
        let mut r = row.clone();
        for (c, b) in &reduced {
            if r.get(*c) {
                r.xor_assign(b);
            }
        }
        if let Some(c) = r.first_one() {
            for (_, b) in reduced.iter_mut() {
                if b.get(c) {
                    b.xor_assign(&r);
                }
            }
            reduced.push((c, r));
            kept.push_row(row);
        }
    }
    kept
}

impl StabilizerGroup {
    /// Builds a group from generator rows, dropping dependent ones.
    pub fn new(n: usize, gens: BinaryMatrix) -> Result<Self, StabError> {
        if gens.ncols() != 2 * n {
            return Err(StabError::QubitCount {
                expected: n,
                found: gens.ncols() / 2,
            });
        }
        let rows = gens.rows();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                if row_form(&rows[i], &rows[j]) {
                    return Err(StabError::NotIsotropic(i, j));
                }
            }
        }
        Ok(Self {
            n,
            gens: independent_rows(2 * n, gens.into_rows()),
        })
    }

    pub fn from_paulis(n: usize, paulis: &[PauliVector]) -> Result<Self, StabError> {
        if let Some(p) = paulis.iter().find(|p| p.num_qubits() != n) {
            return Err(StabError::QubitCount {
                expected: n,
                found: p.num_qubits(),
            });
        }
        Self::new(n, BinaryMatrix::from_paulis(n, paulis))
    }

    /// Group generated by Pauli strings of equal length.
    pub fn from_strs(strs: &[&str]) -> Result<Self, StabError> {
        let paulis = strs
            .iter()
            .map(|s| s.parse::<PauliVector>())
            .collect::<Result<Vec<_>, _>>()?;
        let n = paulis.first().map_or(0, PauliVector::num_qubits);
        Self::from_paulis(n, &paulis)
    }

    /// The trivial group on `n` qubits.
    pub fn trivial(n: usize) -> Self {
        Self {
            n,
            gens: BinaryMatrix::empty(2 * n),
        }
    }

    fn from_trusted(n: usize, rows: impl IntoIterator<Item = BitVec>) -> Self {
        let gens = independent_rows(2 * n, rows);
        debug_assert!(is_isotropic(&gens));
        Self { n, gens }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.gens.nrows()
    }

    pub fn matrix(&self) -> &BinaryMatrix {
        &self.gens
    }

    pub fn generators(&self) -> Vec<PauliVector> {
        self.gens.paulis()
    }

    /// Rank equals the qubit count (a pure stabilizer state).
    pub fn is_lagrangian(&self) -> bool {
        self.rank() == self.n
    }

    pub fn contains(&self, p: &PauliVector) -> bool {
        p.num_qubits() == self.n && self.gens.contains(&p.to_row())
    }

    pub fn same_group(&self, other: &StabilizerGroup) -> bool {
        self.n == other.n && self.gens.same_row_space(&other.gens)
    }

    /// Canonical generator matrix (RREF of the generators).
    pub fn canonical_matrix(&self) -> BinaryMatrix {
        self.gens.row_basis()
    }

    /// Generators restricted to `qubits`; the result need not commute.
    pub fn restrict(&self, qubits: &[usize]) -> Vec<PauliVector> {
        self.generators()
            .iter()
            .map(|g| g.restrict(qubits))
            .collect()
    }

    /// Basis of the elements supported inside `qubits`, restricted to them.
    pub fn local_subgroup(&self, qubits: &[usize]) -> BinaryMatrix {
        let outside: Vec<usize> = (0..self.n).filter(|q| !qubits.contains(q)).collect();
        let k = outside.len();
        let m = qubits.len();
        // Columns (x_out, z_out, x_in, z_in): elimination clears the
        // outside block first, so rows vanishing there span the local part.
        let rows = self
            .generators()
            .iter()
            .map(|g| {
                let out = g.restrict(&outside).to_row();
                out.concat(&g.restrict(qubits).to_row())
            })
            .collect();
        let basis = BinaryMatrix::from_rows(2 * self.n, rows).row_basis();
        let local: Vec<BitVec> = basis
            .rows()
            .iter()
            .filter(|r| (0..2 * k).all(|i| !r.get(i)))
            .map(|r| r.slice(2 * k, 2 * self.n))
            .collect();
        BinaryMatrix::from_rows(2 * m, local)
    }

    fn permuted_matrix(&self, order: &[usize]) -> BinaryMatrix {
        let m = order.len();
        BinaryMatrix::from_rows(
            2 * m,
            self.generators()
                .iter()
                .map(|g| g.restrict(order).to_row())
                .collect(),
        )
    }

    /// Relabel qubits: new qubit `k` is old qubit `order[k]`.
    pub fn permute(&self, order: &[usize]) -> StabilizerGroup {
        assert_eq!(order.len(), self.n, "permutation length mismatch");
        Self {
            n: self.n,
            gens: self.permuted_matrix(order),
        }
    }

    /// `self ⊗ other`, with `other`'s qubits appended.
    pub fn direct_sum(&self, other: &StabilizerGroup) -> StabilizerGroup {
        let n = self.n + other.n;
        let id_a = PauliVector::identity(self.n);
        let id_b = PauliVector::identity(other.n);
        let rows = self
            .generators()
            .iter()
            .map(|g| g.tensor(&id_b).to_row())
            .chain(other.generators().iter().map(|g| id_a.tensor(g).to_row()))
            .collect::<Vec<_>>();
        Self {
            n,
            gens: BinaryMatrix::from_rows(2 * n, rows),
        }
    }

    /// Sign-free postselection onto the `+1` eigenspace of `p`.
    ///
    /// The first generator anticommuting with `p` is multiplied into every
    /// other anticommuting generator and then replaced by `p`.
    pub fn postselect(&self, p: &PauliVector) -> StabilizerGroup {
        assert_eq!(
            p.num_qubits(),
            self.n,
            "postselected Pauli has wrong qubit count"
        );
        let prow = p.to_row();
        let mut rows: Vec<BitVec> = self.gens.rows().to_vec();
        if let Some(first) = rows.iter().position(|r| row_form(r, &prow)) {
            let pivot = rows.remove(first);
            for r in rows.iter_mut() {
                if row_form(r, &prow) {
                    r.xor_assign(&pivot);
                }
            }
        }
        rows.push(prow);
        Self::from_trusted(self.n, rows)
    }

    /// Delete qubits; every generator must act on them inside the
    /// postselected subgroup, whose restriction is then dropped.
    fn remove_qubits(&self, removed: &[usize]) -> StabilizerGroup {
        let keep: Vec<usize> = (0..self.n).filter(|q| !removed.contains(q)).collect();
        let rows = self
            .generators()
            .iter()
            .map(|g| g.restrict(&keep).to_row())
            .collect::<Vec<_>>();
        Self::from_trusted(keep.len(), rows)
    }

    /// Contract qubit `q` with `|+⟩` and delete it.
    pub fn project_plus(&self, q: usize) -> StabilizerGroup {
        assert!(q < self.n, "qubit {q} out of range");
        self.postselect(&PauliVector::single(self.n, q, Letter::X))
            .remove_qubits(&[q])
    }

    /// Contract qubits `q1` and `q2` with the bond state `Σ|ii⟩` (stabilizers
    /// `XX`, `ZZ`) and delete both.
    pub fn contract_bond(&self, q1: usize, q2: usize) -> StabilizerGroup {
        assert!(
            q1 != q2 && q1 < self.n && q2 < self.n,
            "invalid bond ({q1}, {q2})"
        );
        let mut xx = PauliVector::identity(self.n);
        xx.set(q1, Letter::X);
        xx.set(q2, Letter::X);
        let mut zz = PauliVector::identity(self.n);
        zz.set(q1, Letter::Z);
        zz.set(q2, Letter::Z);
        self.postselect(&xx)
            .postselect(&zz)
            .remove_qubits(&[q1, q2])
    }

    /// One Pauli string per line.
    pub fn to_text(&self) -> String {
        self.generators().iter().map(|g| format!("{g}\n")).collect()
    }

    /// Reads lines of Pauli strings up to the first blank line.
    pub fn parse_text(text: &str) -> Result<Self, StabError> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .take_while(|l| !l.is_empty())
            .collect();
        let group = Self::from_strs(&lines)?;
        if let Some(l) = lines.iter().find(|l| l.chars().count() != group.n) {
            return Err(ParseError::WrongLength {
                text: l.to_string(),
                expected: group.n,
                found: l.chars().count(),
            }
            .into());
        }
        Ok(group)
    }
}

impl fmt::Debug for StabilizerGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = self.generators().iter().map(|g| g.to_string()).collect();
        write!(f, "StabilizerGroup(n={}, <{}>)", self.n, gens.join(", "))
    }
}

/// Basis of the elements of `span(paulis)` that commute with every element.
pub fn center(paulis: &[PauliVector]) -> BinaryMatrix {
    let n = paulis.first().map_or(0, PauliVector::num_qubits);
    let m = BinaryMatrix::from_paulis(n, paulis);
    let kernel = gram_matrix(paulis).null_space();
    let elements: Vec<BitVec> = kernel.rows().iter().map(|c| m.left_mul(c)).collect();
    BinaryMatrix::from_rows(2 * n, elements).row_basis()
}

/// One anticommuting pair `(g^L ⊗ g^R, ḡ^L ⊗ ḡ^R)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BipartitePair {
    pub gl: PauliVector,
    pub gbl: PauliVector,
    pub gr: PauliVector,
    pub gbr: PauliVector,
}

/// Decomposition of a two-sided group into left-local generators `a_i`,
/// right-local generators `b_j`, and `p` locally anticommuting pairs.
///
/// `correlated` holds generators whose two halves commute with everything on
/// their side yet are not local; it is empty for every pure state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalBipartiteForm {
    pub n_left: usize,
    pub n_right: usize,
    pub a: Vec<PauliVector>,
    pub b: Vec<PauliVector>,
    pub pairs: Vec<BipartitePair>,
    pub correlated: Vec<(PauliVector, PauliVector)>,
}

impl CanonicalBipartiteForm {
    /// Number of anticommuting pairs.
    pub fn p(&self) -> usize {
        self.pairs.len()
    }

    /// Rank of the source group.
    pub fn rank(&self) -> usize {
        self.a.len() + self.b.len() + 2 * self.pairs.len() + self.correlated.len()
    }

    /// Generators of the left center `Z_L`.
    pub fn zl(&self) -> BinaryMatrix {
        BinaryMatrix::from_paulis(self.n_left, &self.a)
    }

    /// Generators of the right center `Z_R`.
    pub fn zr(&self) -> BinaryMatrix {
        BinaryMatrix::from_paulis(self.n_right, &self.b)
    }

    /// Generating set of the left restriction `S_L`: `a_i`, then each
    /// `(g^L_k, ḡ^L_k)`, then the left halves of correlated generators.
    pub fn left_generators(&self) -> Vec<PauliVector> {
        let mut out = self.a.clone();
        for pair in &self.pairs {
            out.push(pair.gl.clone());
            out.push(pair.gbl.clone());
        }
        out.extend(self.correlated.iter().map(|(l, _)| l.clone()));
        out
    }

    /// Images of [`Self::left_generators`] on the right, with `b_i` paired
    /// to `a_i`. Only meaningful when `|a| == |b|`.
    pub fn right_images(&self) -> Vec<PauliVector> {
        let mut out = self.b.clone();
        for pair in &self.pairs {
            out.push(pair.gr.clone());
            out.push(pair.gbr.clone());
        }
        out.extend(self.correlated.iter().map(|(_, r)| r.clone()));
        out
    }

    /// The full generators `a_i ⊗ I`, `g^L ⊗ g^R`, `ḡ^L ⊗ ḡ^R`, `I ⊗ b_j`.
    pub fn reassemble(&self) -> BinaryMatrix {
        let il = PauliVector::identity(self.n_left);
        let ir = PauliVector::identity(self.n_right);
        let mut rows = Vec::new();
        rows.extend(self.a.iter().map(|a| a.tensor(&ir).to_row()));
        for pair in &self.pairs {
            rows.push(pair.gl.tensor(&pair.gr).to_row());
            rows.push(pair.gbl.tensor(&pair.gbr).to_row());
        }
        rows.extend(self.correlated.iter().map(|(l, r)| l.tensor(r).to_row()));
        rows.extend(self.b.iter().map(|b| il.tensor(b).to_row()));
        BinaryMatrix::from_rows(2 * (self.n_left + self.n_right), rows)
    }
}

/// Symplectic Gram-Schmidt on `rows` with respect to `form`; returns the
/// hyperbolic pairs and the rows left in the radical.
fn symplectic_gram_schmidt<T: Clone>(
    mut rows: Vec<T>,
    form: impl Fn(&T, &T) -> bool,
    add: impl Fn(&mut T, &T),
) -> (Vec<(T, T)>, Vec<T>) {
    let mut pairs = Vec::new();
    let mut radical = Vec::new();
    while !rows.is_empty() {
        let g = rows.remove(0);
        let Some(j) = rows.iter().position(|h| form(&g, h)) else {
            radical.push(g);
            continue;
        };
        let h = rows.remove(j);
        for k in rows.iter_mut() {
            let with_h = form(k, &h);
            let with_g = form(k, &g);
            if with_h {
                add(k, &g);
            }
            if with_g {
                add(k, &h);
            }
        }
        pairs.push((g, h));
    }
    (pairs, radical)
}

/// Canonical form of `s` across the cut `[0, cut) | [cut, n)`.
///
/// Panics when `cut > n`.
pub fn canonical_bipartite_form(s: &StabilizerGroup, cut: usize) -> CanonicalBipartiteForm {
    let n = s.num_qubits();
    assert!(cut <= n, "cut {cut} out of range for {n} qubits");
    let left: Vec<usize> = (0..cut).collect();
    let right: Vec<usize> = (cut..n).collect();
    let a = s.local_subgroup(&left);
    let b = s.local_subgroup(&right);

    let il = PauliVector::identity(cut);
    let ir = PauliVector::identity(n - cut);
    let mut span: Vec<BitVec> = a.paulis().iter().map(|p| p.tensor(&ir).to_row()).collect();
    span.extend(b.paulis().iter().map(|p| il.tensor(p).to_row()));
    let base = span.len();
    let extended = independent_rows(
        2 * n,
        span.into_iter().chain(s.matrix().rows().iter().cloned()),
    );
    let rest: Vec<(PauliVector, PauliVector)> = extended.rows()[base..]
        .iter()
        .map(|r| {
            let p = PauliVector::from_row(r);
            (p.restrict(&left), p.restrict(&right))
        })
        .collect();

    let (pairs, radical) = symplectic_gram_schmidt(
        rest,
        |x, y| symplectic_form(&x.0, &y.0),
        |x, y| {
            x.0.mul_assign(&y.0);
            x.1.mul_assign(&y.1);
        },
    );
    CanonicalBipartiteForm {
        n_left: cut,
        n_right: n - cut,
        a: a.paulis(),
        b: b.paulis(),
        pairs: pairs
            .into_iter()
            .map(|(g, h)| BipartitePair {
                gl: g.0,
                gbl: h.0,
                gr: g.1,
                gbr: h.1,
            })
            .collect(),
        correlated: radical,
    }
}

/// Hyperbolic pairs completing the isotropic `zl` to its centralizer.
///
/// Panics when `zl` is not isotropic.
pub fn pair_completion(zl: &BinaryMatrix, n: usize) -> Vec<(PauliVector, PauliVector)> {
    assert_eq!(zl.ncols(), 2 * n, "pair completion: column count mismatch");
    assert!(is_isotropic(zl), "pair completion needs an isotropic input");
    let comp = symplectic_complement(zl);
    let base = zl.row_basis();
    let k = base.nrows();
    let extended = independent_rows(2 * n, base.into_rows().into_iter().chain(comp.into_rows()));
    let rest: Vec<PauliVector> = extended.rows()[k..]
        .iter()
        .map(PauliVector::from_row)
        .collect();
    let (pairs, radical) = symplectic_gram_schmidt(rest, symplectic_form, |x, y| x.mul_assign(y));
    debug_assert!(radical.is_empty(), "form on the quotient is nondegenerate");
    pairs
}

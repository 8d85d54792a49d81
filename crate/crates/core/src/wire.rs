//! Layers of a cylindrical PEPS and the edge-to-edge update rule.
//!
//! A layer is one ring of `n` tensors with their vertical bonds contracted
//! and physical legs projected onto `|+⟩`; what remains is a stabilizer
//! group on the `n` left legs followed by the `n` right legs. Stacking `d`
//! layers gives a cylinder whose left/right Bell-pair count is the
//! transmission capacity.

use std::fmt;

use crate::error::DataError;
use crate::stabgroup::{canonical_bipartite_form, CanonicalBipartiteForm, StabilizerGroup};
use crate::symplectic::{symplectic_form, BinaryMatrix, BitVec, Letter, PauliVector};
use crate::tensor::{Leg, StabilizerTensor};

/// Stabilizer group on the `2n` open edge legs, ordered `l_0..l_{n-1},
/// r_0..r_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerGroup {
    pub n: usize,
    pub group: StabilizerGroup,
}

impl LayerGroup {
    /// Canonical form across the left/right cut.
    pub fn bipartite_form(&self) -> CanonicalBipartiteForm {
        canonical_bipartite_form(&self.group, self.n)
    }

    /// Number of Bell pairs between the two edges.
    pub fn pairs(&self) -> usize {
        self.bipartite_form().p()
    }

    /// Rank of the restriction to the left edge.
    pub fn left_rank(&self) -> usize {
        let left: Vec<usize> = (0..self.n).collect();
        BinaryMatrix::from_paulis(self.n, &self.group.restrict(&left)).rank()
    }
}

/// Qubit labels while contracting: which leg of which site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Label {
    leg: Leg,
    site: usize,
}

/// A group whose qubits carry labels, so contractions can be addressed by
/// leg rather than by shifting indices.
struct Labeled {
    group: StabilizerGroup,
    labels: Vec<Label>,
}

impl Labeled {
    fn position(&self, leg: Leg, site: usize) -> usize {
        self.labels
            .iter()
            .position(|l| l.leg == leg && l.site == site)
            .expect("label present")
    }

    fn join(&mut self, other: Labeled) {
        self.group = self.group.direct_sum(&other.group);
        self.labels.extend(other.labels);
    }

    fn contract(&mut self, a: (Leg, usize), b: (Leg, usize)) {
        let qa = self.position(a.0, a.1);
        let qb = self.position(b.0, b.1);
        self.group = self.group.contract_bond(qa, qb);
        self.labels
            .retain(|l| !(l.leg == a.0 && l.site == a.1 || l.leg == b.0 && l.site == b.1));
    }

    fn into_edges(self, n: usize) -> LayerGroup {
        let order: Vec<usize> = (0..n)
            .map(|i| self.position(Leg::Left, i))
            .chain((0..n).map(|i| self.position(Leg::Right, i)))
            .collect();
        LayerGroup {
            n,
            group: self.group.permute(&order),
        }
    }
}

/// The tensor with its physical leg projected onto `|+⟩`, on legs
/// `(u, d, l, r)`.
pub fn projected_tensor(tensor: &StabilizerTensor) -> StabilizerGroup {
    tensor.group().project_plus(Leg::Phys.index())
}

fn projected_site(projected: &StabilizerGroup, site: usize) -> Labeled {
    Labeled {
        group: projected.clone(),
        labels: [Leg::Up, Leg::Down, Leg::Left, Leg::Right]
            .into_iter()
            .map(|leg| Label { leg, site })
            .collect(),
    }
}

/// One periodic ring of `n` copies of `tensor`.
pub fn ring_group(tensor: &StabilizerTensor, n: usize) -> LayerGroup {
    assert!(n >= 1, "circumference must be positive");
    let projected = projected_tensor(tensor);
    let mut ring = projected_site(&projected, 0);
    for i in 1..n {
        ring.join(projected_site(&projected, i));
        ring.contract((Leg::Down, i - 1), (Leg::Up, i));
    }
    ring.contract((Leg::Down, n - 1), (Leg::Up, 0));
    ring.into_edges(n)
}

/// `d` rings stacked along the cylinder axis, open at both ends.
pub fn cylinder_group(tensor: &StabilizerTensor, n: usize, d: usize) -> LayerGroup {
    assert!(d >= 1, "depth must be positive");
    let layer = ring_group(tensor, n);
    let mut acc = layer.clone();
    for _ in 1..d {
        acc = stack_layers(&acc, &layer);
    }
    acc
}

/// Contract the right edge of `first` with the left edge of `second`.
pub fn stack_layers(first: &LayerGroup, second: &LayerGroup) -> LayerGroup {
    let n = first.n;
    assert_eq!(n, second.n, "layers have different circumferences");
    let mut labels = Vec::with_capacity(4 * n);
    for (leg, site) in [
        (Leg::Left, 0),
        (Leg::Right, 0),
        (Leg::Left, 1),
        (Leg::Right, 1),
    ] {
        labels.extend((0..n).map(|i| Label {
            leg,
            site: site * n + i,
        }));
    }
    let mut joined = Labeled {
        group: first.group.direct_sum(&second.group),
        labels,
    };
    for i in 0..n {
        joined.contract((Leg::Right, i), (Leg::Left, n + i));
    }
    for l in joined.labels.iter_mut() {
        l.site %= n;
    }
    joined.into_edges(n)
}

/// Canonical form of a single layer across the left/right cut.
pub fn phi1(tensor: &StabilizerTensor, n: usize) -> CanonicalBipartiteForm {
    ring_group(tensor, n).bipartite_form()
}

/// The map a layer induces from left-edge Paulis to right-edge Paulis.
///
/// Defined on `S_L`, which for a pure layer is exactly the set of left
/// Paulis commuting with every `a_i`.
#[derive(Clone, Debug)]
pub struct UpdateRule {
    phi: CanonicalBipartiteForm,
    sources: BinaryMatrix,
    images: Vec<PauliVector>,
}

impl UpdateRule {
    pub fn new(phi: CanonicalBipartiteForm) -> Self {
        debug_assert!(
            phi.correlated.is_empty() && phi.a.len() == phi.b.len(),
            "layer is pure"
        );
        let sources = BinaryMatrix::from_paulis(phi.n_left, &phi.left_generators());
        let images = phi.right_images();
        Self {
            phi,
            sources,
            images,
        }
    }

    pub fn for_layer(tensor: &StabilizerTensor, n: usize) -> Self {
        Self::new(phi1(tensor, n))
    }

    pub fn phi(&self) -> &CanonicalBipartiteForm {
        &self.phi
    }

    pub fn n(&self) -> usize {
        self.phi.n_left
    }

    /// Whether `x` commutes with every `a_i`.
    pub fn in_domain(&self, x: &PauliVector) -> bool {
        self.phi.a.iter().all(|a| !symplectic_form(a, x))
    }

    /// `T(x)`, or `None` when `x` leaves the domain.
    pub fn apply(&self, x: &PauliVector) -> Option<PauliVector> {
        if !self.in_domain(x) {
            return None;
        }
        let coeffs = self.sources.solve(&x.to_row())?;
        let mut out = PauliVector::identity(self.phi.n_right);
        for k in coeffs.ones() {
            out.mul_assign(&self.images[k]);
        }
        Some(out)
    }
}

/// `T(x)` for the layer `rule`, or `None` outside its domain.
pub fn apply_t(rule: &UpdateRule, x: &PauliVector) -> Option<PauliVector> {
    rule.apply(x)
}

/// Basis of the elements of `span(front)` that commute with every `a_i`.
fn domain_part(rule: &UpdateRule, front: &BinaryMatrix) -> Vec<PauliVector> {
    let paulis = front.paulis();
    if rule.phi.a.is_empty() {
        return paulis;
    }
    // Column j of `gram` records which a_i anticommute with front element j.
    let gram = BinaryMatrix::from_rows(
        rule.phi.a.len(),
        paulis
            .iter()
            .map(|y| BitVec::from_bits(rule.phi.a.iter().map(|a| symplectic_form(a, y))))
            .collect(),
    );
    let combos = gram.transpose().null_space();
    combos
        .rows()
        .iter()
        .map(|c| PauliVector::from_row(&front.left_mul(c)))
        .collect()
}

/// Right-local subgroups `Z_R` at depths `1..=d`, as row bases.
///
/// Stops early once the subgroup is fixed by one more layer; later depths
/// repeat the last entry.
pub fn right_centers(rule: &UpdateRule, d: usize) -> Vec<BinaryMatrix> {
    center_chain(rule, d, true)
}

/// Like [`right_centers`] but applies the update at every depth, even after
/// a fixed point.
pub fn right_centers_unpruned(rule: &UpdateRule, d: usize) -> Vec<BinaryMatrix> {
    center_chain(rule, d, false)
}

fn center_chain(rule: &UpdateRule, d: usize, stop_at_fixed_point: bool) -> Vec<BinaryMatrix> {
    assert!(d >= 1, "depth must be positive");
    let n = rule.n();
    let base = BinaryMatrix::from_paulis(n, &rule.phi.b).row_basis();
    let mut fronts = vec![base.clone()];
    while fronts.len() < d {
        let current = fronts.last().expect("nonempty");
        let mut rows = base.rows().to_vec();
        for y in domain_part(rule, current) {
            rows.push(rule.apply(&y).expect("domain element").to_row());
        }
        let next = BinaryMatrix::from_rows(2 * n, rows).row_basis();
        let fixed = next == *current;
        fronts.push(next);
        if fixed && stop_at_fixed_point {
            let last = fronts.last().expect("nonempty").clone();
            fronts.resize(d, last);
        }
    }
    fronts
}

/// Transmission capacity `C(n, d)` of `tensor`.
pub fn capacity(tensor: &StabilizerTensor, n: usize, d: usize) -> usize {
    let rule = UpdateRule::for_layer(tensor, n);
    capacity_with_rule(&rule, d)
}

pub fn capacity_with_rule(rule: &UpdateRule, d: usize) -> usize {
    if rule.phi.a.is_empty() {
        return rule.n();
    }
    let centers = right_centers(rule, d);
    rule.n() - centers.last().expect("d >= 1").nrows()
}

/// Capacities for depths `1..=d_max` from a single chain.
pub fn capacity_profile(rule: &UpdateRule, d_max: usize) -> Vec<usize> {
    if rule.phi.a.is_empty() {
        return vec![rule.n(); d_max];
    }
    right_centers(rule, d_max)
        .iter()
        .map(|z| rule.n() - z.nrows())
        .collect()
}

/// Commutation matrix between `Z_L` generators and the right canonical
/// generators, columns ordered `b_1..b_{n-p}, g_1^R, ḡ_1^R, ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OmegaMatrix {
    pub n: usize,
    pub p: usize,
    pub m: BinaryMatrix,
    pub standard: bool,
}

impl OmegaMatrix {
    pub fn rows(&self) -> usize {
        self.n - self.p
    }

    /// `n,p,lambda-bits,block1-bits,...`; block bits are column-major.
    pub fn to_record(&self) -> String {
        let r = self.rows();
        let lambda: String = (0..r)
            .map(|i| if self.m.get(i, i) { '1' } else { '0' })
            .collect();
        let mut fields = vec![self.n.to_string(), self.p.to_string(), lambda];
        for k in 0..self.p {
            let bits: String = (0..2)
                .flat_map(|c| (0..r).map(move |i| (i, r + 2 * k + c)))
                .map(|(i, j)| if self.m.get(i, j) { '1' } else { '0' })
                .collect();
            fields.push(bits);
        }
        fields.join(",")
    }
}

impl fmt::Display for OmegaMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_record())
    }
}

pub fn omega1(tensor: &StabilizerTensor, n: usize) -> OmegaMatrix {
    omega_from_form(&phi1(tensor, n))
}

pub fn omega_from_form(phi: &CanonicalBipartiteForm) -> OmegaMatrix {
    let n = phi.n_left;
    let p = phi.p();
    let mut columns: Vec<&PauliVector> = phi.b.iter().collect();
    for pair in &phi.pairs {
        columns.push(&pair.gr);
        columns.push(&pair.gbr);
    }
    let rows = phi
        .a
        .iter()
        .map(|a| BitVec::from_bits(columns.iter().map(|c| symplectic_form(a, c))))
        .collect();
    OmegaMatrix {
        n,
        p,
        m: BinaryMatrix::from_rows(columns.len(), rows),
        standard: false,
    }
}

/// All invertible `k × k` matrices over F₂, as row lists.
fn general_linear(k: usize) -> Vec<BinaryMatrix> {
    let mut out = Vec::new();
    let total = 1u64 << (k * k);
    for bits in 0..total {
        let rows = (0..k)
            .map(|i| BitVec::from_bits((0..k).map(|j| bits >> (i * k + j) & 1 == 1)))
            .collect();
        let m = BinaryMatrix::from_rows(k, rows);
        if m.rank() == k {
            out.push(m);
        }
    }
    out
}

/// Sorting key of a block: rank, then its bits column-major.
fn block_key(block: &BinaryMatrix) -> (usize, Vec<bool>) {
    let bits = (0..block.ncols()).flat_map(|c| (0..block.nrows()).map(move |i| (i, c)));
    (block.rank(), bits.map(|(i, c)| block.get(i, c)).collect())
}

/// Sorted RCEF blocks after changing row coordinates by `g`.
fn normalized_blocks(blocks: &[BinaryMatrix], g: &BinaryMatrix) -> Vec<BinaryMatrix> {
    let mut out: Vec<BinaryMatrix> = blocks.iter().map(|b| g.matmul(b).rcef()).collect();
    out.sort_by_key(block_key);
    out
}

/// The `b` block rank `s` and the pair-block rows that survive once every
/// row with `λ = 1` has been cleared.
fn split_omega(omega: &OmegaMatrix) -> (usize, BinaryMatrix) {
    let r = omega.rows();
    let lblock = omega.m.col_block(0, r);
    let s = lblock.rank();
    // Combinations of rows that vanish on the b block.
    let kernel = lblock.transpose().null_space();
    debug_assert_eq!(kernel.nrows(), r - s);
    (s, kernel.matmul(&omega.m.col_block(r, r + 2 * omega.p)))
}

fn assemble_omega(omega: &OmegaMatrix, s: usize, blocks: &[BinaryMatrix]) -> OmegaMatrix {
    let r = omega.rows();
    let mut out = BinaryMatrix::zeros(r, r + 2 * omega.p);
    for i in 0..s {
        out.set(i, i, true);
    }
    for (j, block) in blocks.iter().enumerate() {
        for i in 0..block.nrows() {
            for c in 0..2 {
                out.set(s + i, r + 2 * j + c, block.get(i, c));
            }
        }
    }
    OmegaMatrix {
        n: omega.n,
        p: omega.p,
        m: out,
        standard: true,
    }
}

/// Standard form of an Omega matrix.
///
/// The `b` block becomes `diag(1..1, 0..0)` and rows with `λ = 1` are
/// cleared in the pair blocks. What remains is the span `R` of the other
/// rows inside the pair coordinates, taken up to any change of symplectic
/// basis of the pairs: only `dim R` and the rank of the pairing on `R`
/// survive. The result lists hyperbolic blocks `[[1,0],[0,1]]` first, then
/// rank-one blocks, then zero blocks, sorted by (rank, bits).
pub fn omega_standard_form(omega: &OmegaMatrix) -> OmegaMatrix {
    let (s, reduced) = split_omega(omega);
    let span = reduced.row_basis();
    let k = span.nrows();
    let pairing = BinaryMatrix::from_rows(
        k,
        span.rows()
            .iter()
            .map(|u| BitVec::from_bits(span.rows().iter().map(|v| pair_form(u, v))))
            .collect(),
    );
    let hyperbolic = pairing.rank() / 2;
    let radical = k - 2 * hyperbolic;
    let rows = omega.rows() - s;
    let mut blocks = Vec::with_capacity(omega.p);
    for j in 0..omega.p {
        let mut block = BinaryMatrix::zeros(rows, 2);
        if j < hyperbolic {
            block.set(2 * j, 0, true);
            block.set(2 * j + 1, 1, true);
        } else if j < hyperbolic + radical {
            block.set(2 * hyperbolic + (j - hyperbolic), 0, true);
        }
        blocks.push(block);
    }
    blocks.sort_by_key(block_key);
    assemble_omega(omega, s, &blocks)
}

/// Pairing of two row vectors over the pair coordinates `(g_k, ḡ_k)`.
fn pair_form(u: &BitVec, v: &BitVec) -> bool {
    (0..u.len() / 2).fold(false, |acc, k| {
        acc ^ (u.get(2 * k) & v.get(2 * k + 1)) ^ (u.get(2 * k + 1) & v.get(2 * k))
    })
}

/// A finer form that only mixes columns inside each pair block and
/// reorders the blocks, never mixing two pairs.
///
/// This depends on which symplectic basis the canonical form happened to
/// pick for the pairs, so it is not constant on gauge orbits; it is kept to
/// compare class counts.
pub fn omega_blockwise_form(omega: &OmegaMatrix) -> OmegaMatrix {
    let p = omega.p;
    let (s, reduced) = split_omega(omega);
    // Coordinates of the column span of the reduced pair blocks.
    let span = reduced.transpose().row_basis();
    let k = span.nrows();
    let blocks: Vec<BinaryMatrix> = (0..p)
        .map(|j| {
            let cols = reduced.col_block(2 * j, 2 * j + 2);
            let coords = (0..2)
                .map(|c| span.solve(&cols.col(c)).expect("column lies in its span"))
                .collect();
            BinaryMatrix::from_rows(k, coords).transpose()
        })
        .collect();
    let best = general_linear(k)
        .iter()
        .map(|g| normalized_blocks(&blocks, g))
        .min_by(|x, y| {
            let kx: Vec<_> = x.iter().map(block_key).collect();
            let ky: Vec<_> = y.iter().map(block_key).collect();
            kx.cmp(&ky)
        })
        .expect("GL(k) is nonempty");
    assemble_omega(omega, s, &best)
}

/// Omega standard forms for `n = 1..=n_max`, the key of the Ω class.
pub fn omega_vector(tensor: &StabilizerTensor, n_max: usize) -> Vec<OmegaMatrix> {
    (1..=n_max)
        .map(|n| omega_standard_form(&omega1(tensor, n)))
        .collect()
}

/// Like [`omega_vector`] with [`omega_blockwise_form`].
pub fn omega_blockwise_vector(tensor: &StabilizerTensor, n_max: usize) -> Vec<OmegaMatrix> {
    (1..=n_max)
        .map(|n| omega_blockwise_form(&omega1(tensor, n)))
        .collect()
}

/// Which of the four local generating-set shapes a tensor has.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalCase {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for LocalCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LocalCase::I => "i",
            LocalCase::II => "ii",
            LocalCase::III => "iii",
            LocalCase::IV => "iv",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LocalFormLabel {
    pub case: LocalCase,
    /// Pairs between the horizontal and vertical legs.
    pub p: usize,
    /// Pairs between `u` and `d` in the vertical group, when `p = 1`.
    pub q: Option<usize>,
    /// Whether the vertical generator acts with the same letter on `u` and
    /// `d`, when `q = 1`.
    pub same_letters: Option<bool>,
}

/// Classify the single-site group by how its horizontal and vertical legs
/// are coupled.
pub fn local_form(tensor: &StabilizerTensor) -> LocalFormLabel {
    // Horizontal legs first: (l, r | u, d).
    let sa = projected_tensor(tensor).permute(&[2, 3, 0, 1]);
    let phi = canonical_bipartite_form(&sa, 2);
    let p = phi.p();
    if p != 1 {
        let case = if p == 0 { LocalCase::I } else { LocalCase::IV };
        return LocalFormLabel {
            case,
            p,
            q: None,
            same_letters: None,
        };
    }
    let pair = &phi.pairs[0];
    let v = phi
        .b
        .first()
        .cloned()
        .unwrap_or_else(|| PauliVector::identity(2));
    let mut both = pair.gr.clone();
    both.mul_assign(&pair.gbr);
    let q_of = |c: &PauliVector| {
        StabilizerGroup::from_paulis(2, &[v.clone(), c.clone()])
            .map(|g| canonical_bipartite_form(&g, 1).p())
            .unwrap_or(0)
    };
    let q = [&pair.gr, &pair.gbr, &both]
        .into_iter()
        .map(q_of)
        .max()
        .unwrap_or(0);
    if q == 0 {
        return LocalFormLabel {
            case: LocalCase::I,
            p,
            q: Some(q),
            same_letters: None,
        };
    }
    let same = v.letter(0) == v.letter(1);
    let case = if same { LocalCase::II } else { LocalCase::III };
    LocalFormLabel {
        case,
        p,
        q: Some(q),
        same_letters: Some(same),
    }
}

/// The seven shapes of `S_L` generating sets, told apart by `p(n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhiLetter {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl PhiLetter {
    pub const ALL: [PhiLetter; 7] = [
        PhiLetter::A,
        PhiLetter::B,
        PhiLetter::C,
        PhiLetter::D,
        PhiLetter::E,
        PhiLetter::F,
        PhiLetter::G,
    ];

    /// Pair count at circumference `n`.
    pub fn pairs(self, n: usize) -> usize {
        match self {
            PhiLetter::A => 0,
            PhiLetter::B => 1,
            PhiLetter::C => n - 1,
            PhiLetter::D => n - 1 - usize::from(n.is_multiple_of(2)),
            PhiLetter::E => {
                if n.is_multiple_of(3) {
                    n - 2
                } else {
                    n
                }
            }
            PhiLetter::F => n - usize::from(n.is_multiple_of(2)),
            PhiLetter::G => n,
        }
    }

    /// `rank(S_L) = n + p(n)`.
    pub fn left_rank(self, n: usize) -> usize {
        n + self.pairs(n)
    }

    pub fn signature(self) -> [usize; 6] {
        std::array::from_fn(|i| self.pairs(i + 1))
    }

    pub fn as_char(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn from_char(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.as_char() == c)
    }
}

impl fmt::Display for PhiLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhiClassLabel {
    pub letter: PhiLetter,
    pub p_signature: [usize; 6],
}

pub fn phi_class(tensor: &StabilizerTensor) -> Result<PhiClassLabel, DataError> {
    let p_signature: [usize; 6] = std::array::from_fn(|i| {
        let n = i + 1;
        ring_group(tensor, n).left_rank() - n
    });
    PhiLetter::ALL
        .into_iter()
        .find(|l| l.signature() == p_signature)
        .map(|letter| PhiClassLabel {
            letter,
            p_signature,
        })
        .ok_or(DataError::UnknownPhiSignature(p_signature))
}

/// Pauli on `n` qubits with `letter` at each of `sites` (mod `n`).
pub fn ring_pauli(n: usize, sites: &[(usize, Letter)]) -> PauliVector {
    let mut p = PauliVector::identity(n);
    for &(q, letter) in sites {
        let q = q % n;
        let (x0, z0) = p.letter(q).bits();
        let (x1, z1) = letter.bits();
        p.set(q, Letter::from_bits(x0 ^ x1, z0 ^ z1));
    }
    p
}

//! Dense state-vector ground truth for small cylinders.
//!
//! Nothing here touches the symplectic code: tensors are read from their
//! generator strings, turned into 32-entry state vectors, and glued together
//! by explicit amplitude sums. The edge-to-edge entanglement is then read off
//! a singular value decomposition.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::tensor::StabilizerTensor;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Squared norm below which a projected branch counts as empty. Branch
/// probabilities of stabilizer states are 0 or at least 1/4.
const BRANCH_EPS: f64 = 1e-6;

/// Relative threshold for counting a singular value as nonzero.
pub const RANK_EPS: f64 = 1e-9;

/// Single-qubit Pauli action on a basis state: `P|b⟩ = phase · |b ⊕ flip⟩`.
fn pauli_action(letter: char, bit: usize) -> (usize, Complex64) {
    match letter {
        'I' => (0, ONE),
        'X' => (1, ONE),
        'Z' => (0, if bit == 0 { ONE } else { -ONE }),
        // Y = [[0, -i], [i, 0]]
        'Y' => (1, if bit == 0 { I } else { -I }),
        other => panic!("not a Pauli letter: {other}"),
    }
}

/// Apply a Pauli string (qubit `q` is bit `q` of the index) to `v`.
fn apply_pauli(word: &[char], v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; v.len()];
    for (idx, &amp) in v.iter().enumerate() {
        if amp == ZERO {
            continue;
        }
        let mut target = idx;
        let mut phase = ONE;
        for (q, &letter) in word.iter().enumerate() {
            let (flip, ph) = pauli_action(letter, idx >> q & 1);
            target ^= flip << q;
            phase *= ph;
        }
        out[target] += phase * amp;
    }
    out
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

fn normalize(v: &mut [Complex64]) {
    let n = norm_sqr(v).sqrt();
    for a in v.iter_mut() {
        *a /= n;
    }
}

/// 32 amplitudes indexed by `(u, d, l, r, phys)` with `u` as bit 0.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor {
    pub amplitudes: Vec<Complex64>,
    /// Sign chosen for each generator.
    pub signs: Vec<i8>,
}

/// Common eigenvector of the tensor's generators.
///
/// Applies each projector `(1 + s·g)/2` to every basis vector and keeps the
/// largest result. Signs start at `+1`; if the projection vanishes, they are
/// flipped one generator at a time until it does not.
pub fn densify(tensor: &StabilizerTensor) -> DenseTensor {
    let words: Vec<Vec<char>> = tensor
        .generators()
        .iter()
        .map(|g| g.to_string().chars().collect())
        .collect();
    densify_words(&words)
}

pub fn densify_words(words: &[Vec<char>]) -> DenseTensor {
    let qubits = words.first().map_or(0, Vec::len);
    let dim = 1usize << qubits;
    for flips in 0u32..(1 << words.len()) {
        let signs: Vec<i8> = (0..words.len())
            .map(|k| if flips >> k & 1 == 1 { -1 } else { 1 })
            .collect();
        let best = (0..dim)
            .map(|col| {
                let mut v = vec![ZERO; dim];
                v[col] = ONE;
                for (word, &s) in words.iter().zip(&signs) {
                    let gv = apply_pauli(word, &v);
                    for (a, b) in v.iter_mut().zip(gv) {
                        *a = (*a + b * f64::from(s)) * 0.5;
                    }
                }
                v
            })
            .max_by(|a, b| norm_sqr(a).total_cmp(&norm_sqr(b)))
            .expect("nonempty basis");
        if norm_sqr(&best) > BRANCH_EPS {
            let mut amplitudes = best;
            normalize(&mut amplitudes);
            return DenseTensor { amplitudes, signs };
        }
    }
    panic!("generators have no common eigenvector");
}

/// A leg of the partially contracted network: `(kind, row, column)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum LegName {
    Up(usize, usize),
    Down(usize, usize),
    Left(usize, usize),
    Right(usize, usize),
    Phys(usize, usize),
}

/// A state over named qubits; leg `k` is bit `k` of the index.
#[derive(Clone, Debug)]
struct DenseState {
    legs: Vec<LegName>,
    amps: Vec<Complex64>,
}

/// Bell-basis bras, `Σ_{a,b} c(a,b) ⟨ab|`, tried in this order.
const BELL: [[f64; 4]; 4] = [
    // (00, 01, 10, 11)
    [1.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, -1.0],
    [0.0, 1.0, 1.0, 0.0],
    [0.0, 1.0, -1.0, 0.0],
];

/// `⟨+|` then `⟨−|`.
const PLUS_MINUS: [[f64; 2]; 2] = [[1.0, 1.0], [1.0, -1.0]];

impl DenseState {
    fn scalar() -> Self {
        Self {
            legs: Vec::new(),
            amps: vec![ONE],
        }
    }

    fn position(&self, leg: LegName) -> usize {
        self.legs
            .iter()
            .position(|&l| l == leg)
            .expect("leg present")
    }

    fn append(&mut self, legs: &[LegName], amps: &[Complex64]) {
        let old = self.amps.len();
        let mut out = vec![ZERO; old * amps.len()];
        for (j, &b) in amps.iter().enumerate() {
            if b == ZERO {
                continue;
            }
            for (i, &a) in self.amps.iter().enumerate() {
                out[j * old + i] = a * b;
            }
        }
        self.legs.extend_from_slice(legs);
        self.amps = out;
    }

    /// Contract the legs at `positions` with the bra `coeffs` (indexed by
    /// the bits of those legs in order) and drop them.
    fn project(&self, positions: &[usize], coeffs: &[f64]) -> DenseState {
        let keep: Vec<usize> = (0..self.legs.len())
            .filter(|k| !positions.contains(k))
            .collect();
        let mut out = vec![ZERO; 1 << keep.len()];
        for (idx, &a) in self.amps.iter().enumerate() {
            if a == ZERO {
                continue;
            }
            let sel = positions
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &p)| acc | (idx >> p & 1) << j);
            let c = coeffs[sel];
            if c == 0.0 {
                continue;
            }
            let rest = keep
                .iter()
                .enumerate()
                .fold(0, |acc, (j, &p)| acc | (idx >> p & 1) << j);
            out[rest] += a * c;
        }
        DenseState {
            legs: keep.iter().map(|&k| self.legs[k]).collect(),
            amps: out,
        }
    }

    /// Project with the first bra in `bras` that leaves a nonzero branch,
    /// renormalized.
    fn project_first<const K: usize>(&mut self, legs: &[LegName], bras: &[[f64; K]]) -> usize {
        let positions: Vec<usize> = legs.iter().map(|&l| self.position(l)).collect();
        for (choice, bra) in bras.iter().enumerate() {
            let mut next = self.project(&positions, bra);
            if norm_sqr(&next.amps) > BRANCH_EPS {
                normalize(&mut next.amps);
                *self = next;
                return choice;
            }
        }
        panic!("every branch vanished");
    }
}

/// Record of which bras were used while contracting.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepairLog {
    /// Physical legs projected onto `⟨−|` instead of `⟨+|`.
    pub minus_sites: usize,
    /// Bonds closed with a Bell state other than `Σ|ii⟩`.
    pub twisted_bonds: usize,
}

/// Amplitudes over the `2n` edge legs: index bits `0..n` are the left edge,
/// bits `n..2n` the right edge.
#[derive(Clone, Debug)]
pub struct EdgeState {
    pub n: usize,
    pub amplitudes: Vec<Complex64>,
    pub repairs: RepairLog,
}

impl EdgeState {
    /// The `2^n × 2^n` matrix with rows indexed by the left edge.
    pub fn matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n;
        DMatrix::from_fn(dim, dim, |l, r| self.amplitudes[l | r << self.n])
    }
}

/// Largest circumference and depth the dense contraction accepts.
pub const MAX_DENSE: usize = 6;

/// Contract an `n × d` cylinder of copies of `tensor`, measuring every
/// physical leg in the X basis.
///
/// Sites are added one at a time, column by column. Each physical leg is
/// projected onto `⟨+|` and each bond onto `Σ⟨ii|`; when that branch is
/// empty the next bra of the same basis is used, which only changes signs
/// of the resulting stabilizers.
pub fn contract_cylinder(tensor: &StabilizerTensor, n: usize, d: usize) -> EdgeState {
    assert!(
        (1..=MAX_DENSE).contains(&n) && (1..=MAX_DENSE).contains(&d),
        "dense limit is {MAX_DENSE}"
    );
    let site = densify(tensor).amplitudes;
    let mut state = DenseState::scalar();
    let mut repairs = RepairLog::default();
    for col in 0..d {
        for row in 0..n {
            let legs = [
                LegName::Up(row, col),
                LegName::Down(row, col),
                LegName::Left(row, col),
                LegName::Right(row, col),
                LegName::Phys(row, col),
            ];
            state.append(&legs, &site);
            if state.project_first(&[LegName::Phys(row, col)], &PLUS_MINUS) != 0 {
                repairs.minus_sites += 1;
            }
            let mut bonds = Vec::new();
            if col > 0 {
                bonds.push([LegName::Right(row, col - 1), LegName::Left(row, col)]);
            }
            if row > 0 {
                bonds.push([LegName::Down(row - 1, col), LegName::Up(row, col)]);
            }
            if row == n - 1 {
                bonds.push([LegName::Down(row, col), LegName::Up(0, col)]);
            }
            for bond in bonds {
                if state.project_first(&bond, &BELL) != 0 {
                    repairs.twisted_bonds += 1;
                }
            }
        }
    }
    let order: Vec<usize> = (0..n)
        .map(|row| state.position(LegName::Left(row, 0)))
        .chain((0..n).map(|row| state.position(LegName::Right(row, d - 1))))
        .collect();
    let mut amplitudes = vec![ZERO; 1 << (2 * n)];
    for (idx, &a) in state.amps.iter().enumerate() {
        let target = order
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &p)| acc | (idx >> p & 1) << j);
        amplitudes[target] = a;
    }
    EdgeState {
        n,
        amplitudes,
        repairs,
    }
}

/// Singular values of the edge matrix and what they say about entanglement.
#[derive(Clone, Debug, PartialEq)]
pub struct SchmidtSpectrum {
    pub rank: usize,
    /// Nonzero singular values, descending.
    pub values: Vec<f64>,
}

impl SchmidtSpectrum {
    /// Whether all nonzero singular values agree to `RANK_EPS` relative.
    pub fn is_flat(&self) -> bool {
        match (self.values.first(), self.values.last()) {
            (Some(&hi), Some(&lo)) => hi - lo <= RANK_EPS * hi,
            _ => true,
        }
    }
}

pub fn schmidt_spectrum(state: &EdgeState) -> SchmidtSpectrum {
    let svd = state.matrix().svd(false, false);
    let mut values: Vec<f64> = svd.singular_values.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let top = values.first().copied().unwrap_or(0.0);
    assert!(top > 0.0, "edge state is zero");
    values.retain(|&s| s > RANK_EPS * top);
    SchmidtSpectrum {
        rank: values.len(),
        values,
    }
}

/// `log₂` of the Schmidt rank across the left/right cut.
///
/// Panics if the rank is not a power of two, which no stabilizer state
/// can produce.
pub fn schmidt_qubits(state: &EdgeState) -> usize {
    let rank = schmidt_spectrum(state).rank;
    assert!(
        rank.is_power_of_two(),
        "Schmidt rank {rank} is not a power of two"
    );
    rank.trailing_zeros() as usize
}

/// Dense capacity: Schmidt qubits of the contracted cylinder.
pub fn dense_capacity(tensor: &StabilizerTensor, n: usize, d: usize) -> usize {
    schmidt_qubits(&contract_cylinder(tensor, n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{cluster_tensor, ghz_tensor, product_tensor};

    fn words(strs: &[&str]) -> Vec<Vec<char>> {
        strs.iter().map(|s| s.chars().collect()).collect()
    }

    #[test]
    fn ghz_amplitudes() {
        let t = densify(&ghz_tensor());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for (i, a) in t.amplitudes.iter().enumerate() {
            let expected = if i == 0 || i == 31 { h } else { 0.0 };
            assert!((a.norm() - expected).abs() < 1e-12, "index {i}: {a}");
        }
    }

    #[test]
    fn product_amplitudes() {
        let t = densify(&product_tensor());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // |0000⟩ ⊗ |+⟩: only u=d=l=r=0, phys either value.
        for (i, a) in t.amplitudes.iter().enumerate() {
            let expected = if i & 0b01111 == 0 { h } else { 0.0 };
            assert!((a.norm() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn generators_fix_the_state() {
        for t in [ghz_tensor(), cluster_tensor(), product_tensor()] {
            let dense = densify(&t);
            for (g, &s) in t.generators().iter().zip(&dense.signs) {
                let word: Vec<char> = g.to_string().chars().collect();
                let image = apply_pauli(&word, &dense.amplitudes);
                for (a, b) in image.iter().zip(&dense.amplitudes) {
                    assert!((a - b * f64::from(s)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn two_qubit_states() {
        // XX and YY with +1 signs force ZZ = -1: the singlet-like |01⟩ + |10⟩.
        let dense = densify_words(&words(&["XX", "YY"]));
        assert_eq!(dense.signs, vec![1, 1]);
        assert!((norm_sqr(&dense.amplitudes) - 1.0).abs() < 1e-12);
        assert!(dense.amplitudes[0].norm() < 1e-12 && dense.amplitudes[3].norm() < 1e-12);
    }

    #[test]
    fn schmidt_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let product = EdgeState {
            n: 1,
            amplitudes: vec![ONE, ZERO, ZERO, ZERO],
            repairs: Default::default(),
        };
        assert_eq!(schmidt_qubits(&product), 0);
        let bell = EdgeState {
            n: 1,
            amplitudes: vec![ONE * h, ZERO, ZERO, ONE * h],
            repairs: Default::default(),
        };
        assert_eq!(schmidt_qubits(&bell), 1);
        assert!(schmidt_spectrum(&bell).is_flat());
    }

    #[test]
    fn named_cylinders() {
        assert_eq!(dense_capacity(&cluster_tensor(), 2, 2), 2);
        assert_eq!(dense_capacity(&cluster_tensor(), 4, 1), 4);
        assert_eq!(dense_capacity(&ghz_tensor(), 3, 2), 1);
        assert_eq!(dense_capacity(&product_tensor(), 2, 2), 0);
    }
}

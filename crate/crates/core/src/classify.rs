//! Sweep every orbit representative over a grid of cylinder sizes, bucket the
//! tensors by their capacity grids, and cross-check the buckets against the
//! single-layer invariants.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{DataError, ParseError};
use crate::symplectic::{symplectic_form, BinaryMatrix, Letter, PauliVector};
use crate::tensor::{Gl2, StabilizerTensor};
use crate::wire::{
    capacity_profile, omega_vector, phi1, phi_class, right_centers_unpruned, ring_group,
    ring_pauli, stack_layers, OmegaMatrix, PhiClassLabel, PhiLetter, UpdateRule,
};

pub const REPORT_HEADER: &str = "# stabwire-report v1";
pub const CAPACITY_HEADER: &str = "# stabwire-capacity v1";

/// Number of transmission classes on the 6 × 6 grid.
pub const EXPECTED_CLASSES: usize = 13;

/// Capacities `C(n, d)` for `n ∈ 1..=n_max`, `d ∈ 1..=d_max`, row-major in `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassSignature {
    pub n_max: usize,
    pub d_max: usize,
    pub values: Vec<usize>,
}

impl ClassSignature {
    pub fn of(tensor: &StabilizerTensor, n_max: usize, d_max: usize) -> Self {
        let values = (1..=n_max)
            .flat_map(|n| capacity_profile(&UpdateRule::for_layer(tensor, n), d_max))
            .collect();
        Self {
            n_max,
            d_max,
            values,
        }
    }

    pub fn get(&self, n: usize, d: usize) -> usize {
        self.values[(n - 1) * self.d_max + d - 1]
    }

    pub fn sum(&self) -> usize {
        self.values.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&c| c == 0)
    }

    /// Whether `C(n, d) = n` everywhere.
    pub fn is_full(&self) -> bool {
        (1..=self.n_max).all(|n| (1..=self.d_max).all(|d| self.get(n, d) == n))
    }

    /// Rows non-increasing in `d` and bounded by `n`.
    pub fn is_well_formed(&self) -> bool {
        (1..=self.n_max).all(|n| {
            (1..=self.d_max).all(|d| self.get(n, d) <= n)
                && (1..self.d_max).all(|d| self.get(n, d) >= self.get(n, d + 1))
        })
    }

    /// Sort key for numbering: zero first, full last, otherwise by total
    /// then lexicographically.
    fn order_key(&self) -> (u8, usize, &[usize]) {
        let band = if self.is_zero() {
            0
        } else if self.is_full() {
            2
        } else {
            1
        };
        (band, self.sum(), &self.values)
    }
}

impl fmt::Display for ClassSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in 1..=self.n_max {
            let row: Vec<String> = (1..=self.d_max)
                .map(|d| self.get(n, d).to_string())
                .collect();
            writeln!(f, "n={n}: {}", row.join(" "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorRecord {
    pub canonical_ordinal: usize,
    pub tensor: StabilizerTensor,
    pub signature: ClassSignature,
    pub transmission_class: usize,
    pub phi: PhiClassLabel,
    pub omega_class: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub n_max: usize,
    pub d_max: usize,
    /// Sorted by canonical ordinal.
    pub records: Vec<TensorRecord>,
    /// Signature of each transmission class, indexed by class id.
    pub classes: Vec<ClassSignature>,
    /// Ω standard forms for `n = 1..=n_max`, indexed by Ω class id.
    pub omega_keys: Vec<Vec<OmegaMatrix>>,
}

/// Classify `reps`, given as `(canonical ordinal, tensor)`.
///
/// Parallel over tensors; the output depends only on the input.
pub fn sweep(
    reps: &[(usize, StabilizerTensor)],
    n_max: usize,
    d_max: usize,
) -> Result<ClassificationReport, DataError> {
    let mut reps = reps.to_vec();
    reps.sort_by_key(|&(ordinal, _)| ordinal);
    let raw: Vec<(ClassSignature, PhiClassLabel, Vec<OmegaMatrix>)> = reps
        .par_iter()
        .map(|(_, t)| {
            Ok((
                ClassSignature::of(t, n_max, d_max),
                phi_class(t)?,
                omega_vector(t, n_max),
            ))
        })
        .collect::<Result<_, DataError>>()?;

    let mut classes: Vec<ClassSignature> = raw
        .iter()
        .map(|(s, _, _)| s.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    classes.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    let class_id: BTreeMap<&ClassSignature, usize> =
        classes.iter().enumerate().map(|(i, s)| (s, i)).collect();

    let omega_keys: Vec<Vec<OmegaMatrix>> = raw
        .iter()
        .map(|(_, _, o)| o.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let omega_id: BTreeMap<&Vec<OmegaMatrix>, usize> =
        omega_keys.iter().enumerate().map(|(i, k)| (k, i)).collect();

    let records = reps
        .iter()
        .zip(&raw)
        .map(
            |(&(canonical_ordinal, tensor), (signature, phi, omega))| TensorRecord {
                canonical_ordinal,
                tensor,
                signature: signature.clone(),
                transmission_class: class_id[signature],
                phi: *phi,
                omega_class: omega_id[omega],
            },
        )
        .collect();
    Ok(ClassificationReport {
        n_max,
        d_max,
        records,
        classes,
        omega_keys,
    })
}

/// Counts of an Ω census against the transmission classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaCensus {
    pub omega_classes: usize,
    /// Ω classes whose members are all in transmission class 0.
    pub trivial: usize,
    /// Non-trivial transmission classes containing more than one Ω class.
    pub split_classes: Vec<usize>,
    /// Ω classes spread over more than one transmission class, with those
    /// classes.
    pub shared: Vec<(usize, Vec<usize>)>,
}

impl OmegaCensus {
    /// Every non-trivial transmission class has its own single Ω class.
    pub fn is_class_unique(&self) -> bool {
        self.split_classes.is_empty() && self.shared.is_empty()
    }
}

impl ClassificationReport {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn check_class_count(&self, expected: usize) -> Result<(), DataError> {
        if self.class_count() == expected {
            Ok(())
        } else {
            Err(DataError::ClassCount {
                expected,
                found: self.class_count(),
            })
        }
    }

    /// Member count per class id.
    pub fn census(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for r in &self.records {
            counts[r.transmission_class] += 1;
        }
        counts
    }

    pub fn members(&self, class: usize) -> impl Iterator<Item = &TensorRecord> {
        self.records
            .iter()
            .filter(move |r| r.transmission_class == class)
    }

    /// Member with the smallest canonical ordinal.
    pub fn representative(&self, class: usize) -> Option<&TensorRecord> {
        self.members(class).next()
    }

    pub fn record(&self, ordinal: usize) -> Option<&TensorRecord> {
        self.records
            .binary_search_by_key(&ordinal, |r| r.canonical_ordinal)
            .ok()
            .map(|i| &self.records[i])
    }

    pub fn class_of(&self, tensor: &StabilizerTensor) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.tensor == *tensor)
            .map(|r| r.transmission_class)
    }

    /// Φ letter to the transmission classes it meets.
    pub fn phi_crosstab(&self) -> BTreeMap<PhiLetter, BTreeSet<usize>> {
        let mut table: BTreeMap<PhiLetter, BTreeSet<usize>> = BTreeMap::new();
        for r in &self.records {
            table
                .entry(r.phi.letter)
                .or_default()
                .insert(r.transmission_class);
        }
        table
    }

    /// Ω class to the transmission classes it meets.
    pub fn omega_crosstab(&self) -> BTreeMap<usize, BTreeSet<usize>> {
        let mut table: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for r in &self.records {
            table
                .entry(r.omega_class)
                .or_default()
                .insert(r.transmission_class);
        }
        table
    }

    pub fn omega_census(&self) -> OmegaCensus {
        let by_omega = self.omega_crosstab();
        let trivial = by_omega
            .values()
            .filter(|cs| cs.iter().all(|&c| c == 0))
            .count();
        let shared = by_omega
            .iter()
            .filter(|(_, cs)| cs.len() > 1)
            .map(|(&o, cs)| (o, cs.iter().copied().collect()))
            .collect();
        let mut per_class: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for r in &self.records {
            per_class
                .entry(r.transmission_class)
                .or_default()
                .insert(r.omega_class);
        }
        let split_classes = per_class
            .iter()
            .filter(|&(&c, os)| c != 0 && os.len() > 1)
            .map(|(&c, _)| c)
            .collect();
        OmegaCensus {
            omega_classes: self.omega_keys.len(),
            trivial,
            split_classes,
            shared,
        }
    }

    /// Classes whose members disagree on the Φ letter.
    pub fn mixed_phi_classes(&self) -> Vec<usize> {
        (0..self.classes.len())
            .filter(|&c| {
                self.members(c)
                    .map(|r| r.phi.letter)
                    .collect::<BTreeSet<_>>()
                    .len()
                    > 1
            })
            .collect()
    }

    pub fn report_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(REPORT_HEADER);
        out.push('\n');
        out.push_str("canonical_ordinal,transmission_class,phi_class,omega_class");
        for n in 1..=self.n_max {
            for d in 1..=self.d_max {
                out.push_str(&format!(",sig_c{n}{d}"));
            }
        }
        out.push('\n');
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{}",
                r.canonical_ordinal, r.transmission_class, r.phi.letter, r.omega_class
            ));
            for c in &r.signature.values {
                out.push_str(&format!(",{c}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn census_csv(&self) -> String {
        let mut out = format!("{REPORT_HEADER}\nclass_id,count\n");
        for (id, count) in self.census().iter().enumerate() {
            out.push_str(&format!("{id},{count}\n"));
        }
        out
    }
}

/// One data row of a report file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub canonical_ordinal: usize,
    pub transmission_class: usize,
    pub phi: PhiLetter,
    pub omega_class: usize,
    pub signature: Vec<usize>,
}

/// Read back the rows of [`ClassificationReport::report_csv`].
pub fn parse_report_csv(text: &str) -> Result<Vec<ReportRow>, ParseError> {
    let mut lines = text.lines().enumerate();
    let bad = |line: usize, reason: &str| ParseError::BadRecord {
        line: line + 1,
        reason: reason.to_string(),
    };
    match lines.next() {
        Some((_, h)) if h == REPORT_HEADER => {}
        found => {
            return Err(ParseError::BadHeader {
                expected: REPORT_HEADER.to_string(),
                found: found.map_or(String::new(), |(_, h)| h.to_string()),
            })
        }
    }
    let (i, columns) = lines.next().ok_or_else(|| bad(1, "missing column line"))?;
    let width = columns.split(',').count();
    if width < 4 {
        return Err(bad(i, "too few columns"));
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(bad(i, "wrong number of fields"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad(i, "not a number"));
        let mut letter = fields[2].chars();
        let phi = match (letter.next().and_then(PhiLetter::from_char), letter.next()) {
            (Some(l), None) => l,
            _ => return Err(bad(i, "unknown phi class")),
        };
        rows.push(ReportRow {
            canonical_ordinal: num(fields[0])?,
            transmission_class: num(fields[1])?,
            phi,
            omega_class: num(fields[3])?,
            signature: fields[4..]
                .iter()
                .map(|s| num(s))
                .collect::<Result<_, _>>()?,
        });
    }
    Ok(rows)
}

/// Transmission classes met by each Φ letter, with the numbering of
/// [`sweep`] on the 6 × 6 grid.
pub fn expected_phi_crosstab() -> BTreeMap<PhiLetter, BTreeSet<usize>> {
    let rows: [(PhiLetter, &[usize]); 7] = [
        (PhiLetter::A, &[0]),
        (PhiLetter::B, &[1, 2]),
        (PhiLetter::C, &[4, 6, 7]),
        (PhiLetter::D, &[3, 5]),
        (PhiLetter::E, &[8, 10]),
        (PhiLetter::F, &[9, 11]),
        (PhiLetter::G, &[12]),
    ];
    rows.into_iter()
        .map(|(l, cs)| (l, cs.iter().copied().collect()))
        .collect()
}

/// Sizes of the cross-tab cells in letter order.
pub fn partition_shape(table: &BTreeMap<PhiLetter, BTreeSet<usize>>) -> Vec<usize> {
    PhiLetter::ALL
        .iter()
        .map(|l| table.get(l).map_or(0, BTreeSet::len))
        .collect()
}

// ---------------------------------------------------------------------------
// Standard generating sets and their left centers.

fn translates(n: usize, sites: &[(usize, Letter)]) -> Vec<PauliVector> {
    (0..n)
        .map(|i| {
            ring_pauli(
                n,
                &sites.iter().map(|&(k, l)| (k + i, l)).collect::<Vec<_>>(),
            )
        })
        .collect()
}

fn product_over(n: usize, sites: impl Iterator<Item = usize>, letter: Letter) -> PauliVector {
    ring_pauli(n, &sites.map(|q| (q, letter)).collect::<Vec<_>>())
}

fn all_z(n: usize) -> PauliVector {
    product_over(n, 0..n, Letter::Z)
}

fn all_x(n: usize) -> PauliVector {
    product_over(n, 0..n, Letter::X)
}

/// A standard local generating set of `S_L` and the matching `Z_L` family.
#[derive(Clone, Copy)]
pub struct StandardRow {
    pub name: &'static str,
    pub letter: PhiLetter,
    pub left: fn(usize) -> Vec<PauliVector>,
    pub center: fn(usize) -> Vec<PauliVector>,
}

impl fmt::Debug for StandardRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.name, self.letter)
    }
}

use Letter::{X, Z};

pub const STANDARD_ROWS: [StandardRow; 9] = [
    StandardRow {
        name: "<Z_i>",
        letter: PhiLetter::A,
        left: |n| translates(n, &[(0, Z)]),
        center: |n| translates(n, &[(0, Z)]),
    },
    StandardRow {
        name: "<X_{i-1} Z_i X_{i+1}>",
        letter: PhiLetter::A,
        left: |n| translates(n, &[(n - 1, X), (0, Z), (1, X)]),
        center: |n| translates(n, &[(n - 1, X), (0, Z), (1, X)]),
    },
    StandardRow {
        name: "<Z_i Z_{i+1}, prod X>",
        letter: PhiLetter::A,
        left: |n| [translates(n, &[(0, Z), (1, Z)]), vec![all_x(n)]].concat(),
        center: |n| [translates(n, &[(0, Z), (1, Z)]), vec![all_x(n)]].concat(),
    },
    StandardRow {
        name: "<Z_i, prod X>",
        letter: PhiLetter::B,
        left: |n| [translates(n, &[(0, Z)]), vec![all_x(n)]].concat(),
        center: |n| translates(n, &[(0, Z), (1, Z)]),
    },
    StandardRow {
        name: "<Z_i, X_i X_{i+1}>",
        letter: PhiLetter::C,
        left: |n| [translates(n, &[(0, Z)]), translates(n, &[(0, X), (1, X)])].concat(),
        center: |n| vec![all_z(n)],
    },
    StandardRow {
        name: "<Z_i, X_{i-1} X_{i+1}>",
        letter: PhiLetter::D,
        left: |n| {
            [
                translates(n, &[(0, Z)]),
                translates(n, &[(n - 1, X), (1, X)]),
            ]
            .concat()
        },
        center: |n| {
            if n % 2 == 0 {
                vec![
                    product_over(n, (0..n).step_by(2), Z),
                    product_over(n, (1..n).step_by(2), Z),
                ]
            } else {
                vec![all_z(n)]
            }
        },
    },
    StandardRow {
        name: "<Z_i, X_{i-1} X_i X_{i+1}>",
        letter: PhiLetter::E,
        left: |n| {
            [
                translates(n, &[(0, Z)]),
                translates(n, &[(n - 1, X), (0, X), (1, X)]),
            ]
            .concat()
        },
        center: |n| {
            if n % 3 == 0 {
                let pairs = |offset: usize| {
                    let sites: Vec<(usize, Letter)> = (0..n / 3)
                        .flat_map(|i| [(3 * i + offset, Z), (3 * i + offset + 1, Z)])
                        .collect();
                    ring_pauli(n, &sites)
                };
                vec![pairs(0), pairs(1)]
            } else {
                Vec::new()
            }
        },
    },
    StandardRow {
        name: "<Z_i, X_i X_{i+1}, prod X>",
        letter: PhiLetter::F,
        left: |n| {
            [
                translates(n, &[(0, Z)]),
                translates(n, &[(0, X), (1, X)]),
                vec![all_x(n)],
            ]
            .concat()
        },
        center: |n| {
            if n % 2 == 0 {
                vec![all_z(n)]
            } else {
                Vec::new()
            }
        },
    },
    StandardRow {
        name: "<Z_i, X_i>",
        letter: PhiLetter::G,
        left: |n| [translates(n, &[(0, Z)]), translates(n, &[(0, X)])].concat(),
        center: |_| Vec::new(),
    },
];

/// Apply the same letter map at every site.
pub fn relabel(p: &PauliVector, map: &Gl2) -> PauliVector {
    let mut out = PauliVector::identity(p.num_qubits());
    for q in 0..p.num_qubits() {
        let (x, z) = p.letter(q).bits();
        let (x, z) = map.apply(x, z);
        out.set(q, Letter::from_bits(x, z));
    }
    out
}

fn span(n: usize, paulis: &[PauliVector]) -> BinaryMatrix {
    BinaryMatrix::from_paulis(n, paulis).row_basis()
}

fn left_span(tensor: &StabilizerTensor, n: usize) -> BinaryMatrix {
    let left: Vec<usize> = (0..n).collect();
    span(n, &ring_group(tensor, n).group.restrict(&left))
}

/// Whether `family` matches `target` after `map` and some cyclic shift.
fn matches_family(
    n: usize,
    target: &BinaryMatrix,
    family: &[PauliVector],
    map: &Gl2,
) -> Option<usize> {
    let mapped: Vec<PauliVector> = family.iter().map(|p| relabel(p, map)).collect();
    (0..n).find(|&s| {
        let shifted: Vec<PauliVector> = mapped.iter().map(|p| p.translate(s)).collect();
        span(n, &shifted).same_row_space(target)
    })
}

pub const CENTER_CHECK_SIZES: [usize; 3] = [4, 5, 6];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterVerdict {
    pub row: &'static str,
    pub letter: PhiLetter,
    /// Representative whose `S_L` is the standard set up to relabeling.
    pub representative: Option<StabilizerTensor>,
    pub map: Option<Gl2>,
    /// Whether its `Z_L` matched the family at every checked size.
    pub center_matches: bool,
}

impl CenterVerdict {
    pub fn passed(&self) -> bool {
        self.representative.is_some() && self.center_matches
    }
}

/// For each standard row, find a representative whose `S_L` equals the
/// standard set up to a uniform letter map, then compare its `Z_L` with the
/// listed family.
pub fn left_center_check(reps: &[StabilizerTensor]) -> Vec<CenterVerdict> {
    let maps = Gl2::all();
    let spans: Vec<Vec<BinaryMatrix>> = reps
        .par_iter()
        .map(|t| {
            CENTER_CHECK_SIZES
                .iter()
                .map(|&n| left_span(t, n))
                .collect()
        })
        .collect();
    STANDARD_ROWS
        .iter()
        .map(|row| {
            let mut first_left_match = None;
            for (t, t_spans) in reps.iter().zip(&spans) {
                for map in &maps {
                    let left_ok = CENTER_CHECK_SIZES
                        .iter()
                        .zip(t_spans)
                        .all(|(&n, s)| matches_family(n, s, &(row.left)(n), map).is_some());
                    if !left_ok {
                        continue;
                    }
                    let center_ok = CENTER_CHECK_SIZES.iter().all(|&n| {
                        let zl = phi1(t, n).zl().row_basis();
                        matches_family(n, &zl, &(row.center)(n), map).is_some()
                    });
                    let verdict = CenterVerdict {
                        row: row.name,
                        letter: row.letter,
                        representative: Some(*t),
                        map: Some(*map),
                        center_matches: center_ok,
                    };
                    if center_ok {
                        return verdict;
                    }
                    first_left_match.get_or_insert(verdict);
                }
            }
            first_left_match.unwrap_or(CenterVerdict {
                row: row.name,
                letter: row.letter,
                representative: None,
                map: None,
                center_matches: false,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Capacity cache and the extended-grid comparison.

/// Capacities keyed by `(canonical ordinal, n, d)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CapacityCache {
    entries: BTreeMap<(usize, usize, usize), usize>,
}

impl CapacityCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, ordinal: usize, n: usize, d: usize) -> Option<usize> {
        self.entries.get(&(ordinal, n, d)).copied()
    }

    pub fn insert(&mut self, ordinal: usize, n: usize, d: usize, c: usize) {
        self.entries.insert((ordinal, n, d), c);
    }

    /// Compute every missing grid point for `items` up to `(n_max, d_max)`.
    pub fn fill(&mut self, items: &[(usize, StabilizerTensor)], n_max: usize, d_max: usize) {
        let missing: Vec<(usize, StabilizerTensor, usize)> = items
            .iter()
            .flat_map(|&(o, t)| (1..=n_max).map(move |n| (o, t, n)))
            .filter(|&(o, _, n)| (1..=d_max).any(|d| self.get(o, n, d).is_none()))
            .collect();
        let computed: Vec<(usize, usize, Vec<usize>)> = missing
            .par_iter()
            .map(|&(o, t, n)| (o, n, capacity_profile(&UpdateRule::for_layer(&t, n), d_max)))
            .collect();
        for (o, n, profile) in computed {
            for (d, c) in profile.into_iter().enumerate() {
                self.insert(o, n, d + 1, c);
            }
        }
    }

    /// Grid for `ordinal`, row-major; `None` if any point is missing.
    pub fn grid(&self, ordinal: usize, n_max: usize, d_max: usize) -> Option<Vec<usize>> {
        (1..=n_max)
            .flat_map(|n| (1..=d_max).map(move |d| (n, d)))
            .map(|(n, d)| self.get(ordinal, n, d))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{CAPACITY_HEADER}\nordinal,n,d,c\n");
        for (&(o, n, d), c) in &self.entries {
            out.push_str(&format!("{o},{n},{d},{c}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, ParseError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == CAPACITY_HEADER => {}
            found => {
                return Err(ParseError::BadHeader {
                    expected: CAPACITY_HEADER.to_string(),
                    found: found.map_or(String::new(), |(_, h)| h.to_string()),
                })
            }
        }
        let mut cache = Self::new();
        for (i, line) in lines {
            if line == "ordinal,n,d,c" || line.trim().is_empty() {
                continue;
            }
            let fields: Result<Vec<usize>, _> = line.split(',').map(str::parse).collect();
            match fields.as_deref() {
                Ok(&[o, n, d, c]) => cache.insert(o, n, d, c),
                _ => {
                    return Err(ParseError::BadRecord {
                        line: i + 1,
                        reason: format!("bad entry {line:?}"),
                    })
                }
            }
        }
        Ok(cache)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDisagreement {
    pub class: usize,
    pub first: usize,
    pub second: usize,
    pub n: usize,
    pub d: usize,
    pub first_capacity: usize,
    pub second_capacity: usize,
}

impl fmt::Display for PairDisagreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "class {}: ordinals {} and {} differ at n={} d={} ({} vs {})",
            self.class,
            self.first,
            self.second,
            self.n,
            self.d,
            self.first_capacity,
            self.second_capacity
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityVerdict {
    pub pairs_checked: usize,
    pub disagreements: Vec<PairDisagreement>,
}

/// Compare same-class tensors on the larger grid `n ≤ n_ext`, `d ≤ d_ext`.
///
/// Every member is compared with its class representative, and
/// `random_pairs` further same-class pairs are drawn from `seed`.
pub fn stability_check(
    report: &ClassificationReport,
    cache: &mut CapacityCache,
    n_ext: usize,
    d_ext: usize,
    random_pairs: usize,
    seed: u64,
) -> StabilityVerdict {
    let items: Vec<(usize, StabilizerTensor)> = report
        .records
        .iter()
        .map(|r| (r.canonical_ordinal, r.tensor))
        .collect();
    cache.fill(&items, n_ext, d_ext);

    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for class in 0..report.class_count() {
        let members: Vec<usize> = report.members(class).map(|r| r.canonical_ordinal).collect();
        pairs.extend(members.iter().skip(1).map(|&m| (class, members[0], m)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let by_class: Vec<Vec<usize>> = (0..report.class_count())
        .map(|c| report.members(c).map(|r| r.canonical_ordinal).collect())
        .collect();
    let mut drawn = 0;
    while drawn < random_pairs && by_class.iter().any(|m| m.len() > 1) {
        let r = &report.records[rng.random_range(0..report.records.len())];
        let members = &by_class[r.transmission_class];
        if members.len() < 2 {
            continue;
        }
        let other = members[rng.random_range(0..members.len())];
        if other != r.canonical_ordinal {
            pairs.push((r.transmission_class, r.canonical_ordinal, other));
            drawn += 1;
        }
    }

    let mut disagreements = Vec::new();
    for &(class, a, b) in &pairs {
        let ga = cache.grid(a, n_ext, d_ext).expect("filled");
        let gb = cache.grid(b, n_ext, d_ext).expect("filled");
        if let Some(k) = (0..ga.len()).find(|&k| ga[k] != gb[k]) {
            disagreements.push(PairDisagreement {
                class,
                first: a,
                second: b,
                n: k / d_ext + 1,
                d: k % d_ext + 1,
                first_capacity: ga[k],
                second_capacity: gb[k],
            });
        }
    }
    StabilityVerdict {
        pairs_checked: pairs.len(),
        disagreements,
    }
}

// ---------------------------------------------------------------------------
// Depth properties.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DepthProperty {
    /// `C(n, d) ≥ C(n, d + 1)`, and the right centers are nested.
    Monotone,
    /// One flat step means flat forever.
    Plateau,
    /// The first flat step comes by depth `C(n, 1) + 1`.
    CriticalDepth,
    /// `T` preserves commutation on its domain.
    Commutation,
    /// The chain agrees with contracting the cylinder layer by layer.
    DirectCylinder,
}

impl fmt::Display for DepthProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DepthProperty::Monotone => "monotone",
            DepthProperty::Plateau => "plateau",
            DepthProperty::CriticalDepth => "critical-depth",
            DepthProperty::Commutation => "commutation",
            DepthProperty::DirectCylinder => "direct-cylinder",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyViolation {
    pub kind: DepthProperty,
    pub tensor: StabilizerTensor,
    pub n: usize,
    pub d: usize,
    pub detail: String,
}

impl fmt::Display for PropertyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at n={} d={} for {}: {}",
            self.kind, self.n, self.d, self.tensor, self.detail
        )
    }
}

/// Smallest `d` with `C(d) = C(d + 1)`, if the profile shows one.
pub fn critical_depth(profile: &[usize]) -> Option<usize> {
    profile.windows(2).position(|w| w[0] == w[1]).map(|k| k + 1)
}

/// Capacities at depths `1..=d_max` from the unpruned chain.
pub fn unpruned_profile(rule: &UpdateRule, d_max: usize) -> Vec<usize> {
    if rule.phi().a.is_empty() {
        return vec![rule.n(); d_max];
    }
    right_centers_unpruned(rule, d_max)
        .iter()
        .map(|z| rule.n() - z.nrows())
        .collect()
}

/// Check the depth properties for one tensor at circumference `n`: the chain up
/// to `d_max`, and direct contraction up to `direct_d_max`.
pub fn depth_violations(
    tensor: &StabilizerTensor,
    n: usize,
    d_max: usize,
    direct_d_max: usize,
) -> Vec<PropertyViolation> {
    let mut out = Vec::new();
    let mut report = |kind, d, detail: String| {
        out.push(PropertyViolation {
            kind,
            tensor: *tensor,
            n,
            d,
            detail,
        });
    };
    let rule = UpdateRule::for_layer(tensor, n);

    if !rule.phi().a.is_empty() {
        let centers = right_centers_unpruned(&rule, d_max);
        for (d, w) in centers.windows(2).enumerate() {
            if w[0].rows().iter().any(|row| !w[1].contains(row)) {
                report(
                    DepthProperty::Monotone,
                    d + 1,
                    "right center not contained in the next".into(),
                );
            }
        }
    }
    let profile = unpruned_profile(&rule, d_max);
    for (d, w) in profile.windows(2).enumerate() {
        if w[0] < w[1] {
            report(
                DepthProperty::Monotone,
                d + 1,
                format!("capacity rises {} -> {}", w[0], w[1]),
            );
        }
    }
    if let Some(dc) = critical_depth(&profile) {
        if let Some(d) = (dc..=d_max).find(|&d| profile[d - 1] != profile[dc - 1]) {
            report(
                DepthProperty::Plateau,
                d,
                format!("left plateau {} at depth {d}", profile[dc - 1]),
            );
        }
        if dc > profile[0] + 1 {
            report(
                DepthProperty::CriticalDepth,
                dc,
                format!("first flat step at {dc}, C(n,1) = {}", profile[0]),
            );
        }
    } else if d_max > profile[0] + 1 {
        report(DepthProperty::CriticalDepth, d_max, "no flat step".into());
    }

    let sources = rule.phi().left_generators();
    let images = rule.phi().right_images();
    for i in 0..sources.len() {
        for j in i + 1..sources.len() {
            if symplectic_form(&sources[i], &sources[j]) != symplectic_form(&images[i], &images[j])
            {
                report(
                    DepthProperty::Commutation,
                    1,
                    format!("generators {i} and {j}"),
                );
            }
        }
    }

    let pruned = capacity_profile(&rule, direct_d_max);
    let layer = ring_group(tensor, n);
    let mut cylinder = layer.clone();
    for d in 1..=direct_d_max {
        if d > 1 {
            cylinder = stack_layers(&cylinder, &layer);
        }
        let direct = cylinder.pairs();
        if direct != pruned[d - 1]
            || pruned[d - 1] != profile.get(d - 1).copied().unwrap_or(pruned[d - 1])
        {
            report(
                DepthProperty::DirectCylinder,
                d,
                format!("chain {} vs contraction {direct}", pruned[d - 1]),
            );
        }
    }
    out
}

/// Seeded `(tensor, n)` probes drawn from `pool`.
pub fn random_probes(
    pool: &[StabilizerTensor],
    count: usize,
    n_max: usize,
    seed: u64,
) -> Vec<(StabilizerTensor, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (
                pool[rng.random_range(0..pool.len())],
                rng.random_range(1..=n_max),
            )
        })
        .collect()
}

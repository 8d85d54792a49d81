use thiserror::Error;

/// Failures while reading Pauli, group, or tensor text.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid Pauli letter {letter:?} in {text:?}")]
    BadLetter { letter: char, text: String },
    #[error("expected header {expected:?}, found {found:?}")]
    BadHeader { expected: String, found: String },
    #[error("expected {expected} Pauli strings, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("Pauli string {text:?} has length {found}, expected {expected}")]
    WrongLength {
        text: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {reason}")]
    BadRecord { line: usize, reason: String },
}

/// Violations of the stabilizer-group invariants.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StabError {
    #[error("generators {0} and {1} anticommute")]
    NotIsotropic(usize, usize),
    #[error("group has rank {rank}, a stabilizer tensor needs rank {expected}")]
    NotLagrangian { rank: usize, expected: usize },
    #[error("generator has {found} qubits, expected {expected}")]
    QubitCount { expected: usize, found: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Results that contradict a classification invariant; each one signals a bug
/// in enumeration or capacity code rather than bad input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DataError {
    #[error("p-signature {0:?} matches no standard local generating set")]
    UnknownPhiSignature([usize; 6]),
    #[error("no representative has the {0} capacity signature")]
    MissingFixture(&'static str),
    #[error("expected {expected} transmission classes, found {found}")]
    ClassCount { expected: usize, found: usize },
}

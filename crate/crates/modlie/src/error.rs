use thiserror::Error;

/// Error type shared by all modules.
///
/// Variants carry enough context to be actionable from the CLI without a
/// backtrace: which constraint failed, on which input, and with what numbers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("characteristic {p} is not supported here: {context}")]
    UnsupportedPrime { p: u64, context: String },

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: usize,
        got: usize,
        context: String,
    },

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("antisymmetry violated at basis pair ({i}, {j})")]
    Antisymmetry { i: usize, j: usize },

    #[error("Jacobi identity fails at basis triple ({i}, {j}, {k}); defect has {nonzero} nonzero coordinates")]
    Jacobi {
        i: usize,
        j: usize,
        k: usize,
        nonzero: usize,
    },

    #[error("restricted axiom {axiom} fails at basis index {index}: {detail}")]
    Restricted {
        axiom: u8,
        index: usize,
        detail: String,
    },

    #[error("element '{label}' is not toral or not diagonalizable on the given basis")]
    NotDiagonalizable { label: String },

    #[error("basis is not homogeneous for the requested torus: basis vector {index} mixes eigenvalues")]
    InhomogeneousBasis { index: usize },

    #[error("grading violated: [L_{{{wa}}}, L_{{{wb}}}] leaves the expected weight class at pair ({i}, {j})")]
    GradingViolated {
        i: usize,
        j: usize,
        wa: String,
        wb: String,
    },

    #[error("vector lies outside the subspace ({context})")]
    NotInSubspace { context: String },

    #[error("zero vector is not a valid seed for ideal spinning")]
    ZeroSeed,

    #[error("center must be trivial for this computation; found dimension {dim}")]
    NonTrivialCenter { dim: usize },

    #[error("budget exceeded: computation needs {needed} units, budget is {budget} (raise it explicitly)")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("Hopf axiom '{axiom}' fails at basis tuple {tuple:?}")]
    HopfAxiom { axiom: String, tuple: Vec<usize> },

    #[error("not a Hopf substructure: {0}")]
    NotHopf(String),

    #[error("randomized check inconclusive after {attempts} attempts: {context}")]
    Inconclusive { attempts: usize, context: String },

    #[error("file format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

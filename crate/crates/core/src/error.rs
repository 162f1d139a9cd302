use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("defining polynomial is not monic with degree >= 1")]
    NotMonic,
    #[error("defining polynomial is reducible: factor {factor:?}")]
    Reducible { factor: Vec<BigInt> },
    #[error("no irreducibility certificate found (mod p for p <= {bound}, Eisenstein)")]
    CannotCertify { bound: u64 },
    #[error("power basis is not {p}-maximal (Dedekind criterion fails)")]
    NotPMaximal { p: u64 },
    #[error("{0} is not a prime")]
    NotPrime(BigInt),
    #[error("prime {0} exceeds the supported residue characteristic range")]
    PrimeTooLarge(BigInt),
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("elements belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not integral at the prime")]
    NotIntegralAtPrime,
    #[error("curve is singular (discriminant zero)")]
    Singular,
    #[error("twist parameter must be nonzero")]
    ZeroTwist,
    #[error("curve has bad reduction at the prime")]
    BadReduction,
    #[error("residue field of size {size} exceeds the enumeration limit {limit}")]
    ResidueFieldTooLarge { size: u128, limit: u128 },
    #[error("curve does not have multiplicative reduction at the prime")]
    NotMultiplicative,
    #[error("factorization budget exhausted; unfactored cofactor {cofactor}")]
    FactorizationTimeout { cofactor: BigInt },
    #[error("triple does not sum to zero")]
    NotZeroSum,
    #[error("triple has a zero entry")]
    TrivialTriple,
    #[error("parameter makes the model singular")]
    SingularParameter,
    #[error("triple does not satisfy the Fermat equation")]
    NotASolution,
    #[error("input is not integral")]
    NonIntegralInput,
    #[error("exponent {0} is not an odd prime")]
    BadExponent(u64),
    #[error("Frey curve requested for a trivial solution")]
    TrivialWitness,
    #[error("cyclotomic index r = {0} must be at least 2")]
    BadIndex(u32),
    #[error("odd l requires a root of the l-th cyclotomic polynomial as witness")]
    MissingWitness,
    #[error("no class data registered for field {0}")]
    UnknownField(String),
    #[error("{0} is not a positive fundamental discriminant")]
    NotFundamental(BigInt),
    #[error("no prime of good reduction with norm <= {bound}")]
    NoGoodPrimesInRange { bound: u64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Invalid(e.to_string())
    }
}

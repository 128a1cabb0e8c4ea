use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_CODES: &str = "\
Exit codes:
  0   success
  2   validation error (bad alpha, parameters out of range, rational alpha, ...)
  3   precision exhausted while certifying a comparison
  4   factorization did not complete
  5   selftest failure
  64  usage error
  70  internal error (a certificate failed an exact check)";

#[derive(Parser, Debug)]
#[command(
    name = "rectgap",
    version,
    about = "Small gaps in the spectrum {alpha m^2 + n^2} of a rectangular billiard",
    after_help = EXIT_CODES,
    after_long_help = EXIT_CODES
)]
pub struct Cli {
    /// Output format for the data payload.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,

    /// Largest working precision, in bits, for certified comparisons.
    #[arg(long = "precision-cap", global = true, default_value_t = rectgap::alpha::DEFAULT_PRECISION_CAP)]
    pub precision_cap: u32,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct AlphaArg {
    /// sqrt:p[/q], surd:a,b,c,d for (a+b*sqrt d)/c, dec:<digits> or golden2.
    #[arg(long)]
    pub alpha: String,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The first N eigenvalues in increasing order.
    Spectrum {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long = "N")]
        count: u64,
    },
    /// The k-th smallest gap among the first N eigenvalues.
    Mingap {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long = "N")]
        count: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// N * delta_min(N) over an increasing list of N.
    Sweep {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        counts: Vec<u64>,
    },
    /// Continued fraction expansion.
    Cf {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
    /// Convergents p/q with their quality |q alpha - p|.
    Convergents {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// An approximant a/q with q <= Q and |q alpha - a| <= 1/Q.
    Dirichlet {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long = "Q")]
        big_q: u64,
    },
    /// Factorization and the most balanced divisor of n.
    Divisor {
        #[arg(long)]
        n: String,
    },
    /// 2T_n(x/2) and U_n(x/2); with --m, the gcd identities at (n, m).
    Cheb {
        #[arg(long)]
        x: i64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: Option<u64>,
    },
    /// Fundamental Pell solution of x^2 - D y^2 = 1, or its n-th power.
    Pell {
        #[arg(long = "D")]
        d: u64,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Greedy prime selection with density 1 - prod(1 - 1/l) in (1/2 - eps, 1/2).
    Primeselect {
        #[arg(long)]
        eps: f64,
        /// Restrict to primes congruent to this residue mod 4.
        #[arg(long)]
        residue: Option<u8>,
    },
    /// Certified small gaps.
    Construct {
        #[command(subcommand)]
        kind: ConstructKind,
    },
    /// Minimal gaps of N uniform points on [0, N].
    Poisson(PoissonArgs),
    /// Distinct products in the multiplication table.
    Multtable {
        /// Side lengths, strictly increasing.
        #[arg(long = "X", value_delimiter = ',', conflicts_with_all = ["count", "c"])]
        xs: Vec<u64>,
        /// With --C: count the moduli u*v for u, v <= C*sqrt(N).
        #[arg(long = "N", requires = "c")]
        count: Option<u64>,
        #[arg(long = "C", requires = "count")]
        c: Option<f64>,
    },
    /// Ordered quadruples in [M, 2M] with |n1 n2/(n3 n4) - alpha| <= 1/T.
    Quadruples {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long = "M")]
        m: u64,
        /// T = M^e, with e in [3, 4].
        #[arg(long = "T-exp", default_value_t = 3.0)]
        t_exp: f64,
    },
    /// The billiard's minimal gaps against Poisson samples.
    Report {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long = "N", value_delimiter = ',', required = true)]
        counts: Vec<u64>,
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Exhaustive Chebyshev identity suites.
    Selftest,
}

#[derive(Args, Debug)]
pub struct PoissonArgs {
    #[arg(long = "N", required_unless_present = "devroye")]
    pub count: Option<u64>,
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Event frequencies along N = 2^j instead of one distribution.
    #[arg(long)]
    pub devroye: bool,
    #[arg(long = "j-min", default_value_t = 4)]
    pub j_min: u32,
    #[arg(long = "j-max", default_value_t = 14)]
    pub j_max: u32,
    /// Leave the per-trial samples out of the output.
    #[arg(long = "no-samples")]
    pub no_samples: bool,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub a: i64,
    #[arg(long)]
    pub b: u8,
    #[arg(long, allow_hyphen_values = true)]
    pub sign: i8,
    /// Rational prefactor p/q.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub r: String,
    #[arg(long, default_value_t = 3)]
    pub count: usize,
}

#[derive(Subcommand, Debug)]
pub enum ConstructKind {
    /// Pell approximants of r*sqrt(4D) at indices l_1...l_J * P.
    #[command(name = "sqrtD")]
    SqrtD {
        #[arg(long = "D")]
        d: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long = "P", value_delimiter = ',', required = true)]
        cofactors: Vec<u64>,
        /// Rational prefactor r.
        #[arg(long, default_value = "1")]
        prefactor: String,
    },
    /// alpha = r * theta^a * sqrt(x^2 + 4 sign)^b with theta = (x + sqrt(x^2 + 4 sign))/2.
    General {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
    },
    /// Exact square-root divisors for even a and b = 0.
    Strong {
        #[command(flatten)]
        family: FamilyArgs,
    },
    /// From a given approximant p/q, with the most balanced divisors.
    Approximant {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// The N^(-1/2) construction for any alpha.
    Dirichlet {
        #[command(flatten)]
        alpha: AlphaArg,
        #[arg(long = "N")]
        count: u64,
    },
}

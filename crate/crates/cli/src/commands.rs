use num_bigint::{BigInt, BigUint};
use serde::Serialize;
use serde_json::{json, Value};

use rectgap::alpha::{Alpha, REPORT_DIGITS};
use rectgap::chebyshev::{
    cheb_t2, cheb_u, identity_suites, pell_fundamental, pell_sequence, prime_select, sds_gcd_check, PoolPolicy,
    PrimeSelection, SdsSpec,
};
use rectgap::construct::{
    construct_from_approximant, construct_general, construct_sqrt_d, construct_strong_exact, general_upper_bound,
    GeneralQuadraticSpec, SqrtDOptions,
};
use rectgap::diophantine::{best_divisor, continued_fraction, convergents, dirichlet_approx, factorize};
use rectgap::exact::Rational;
use rectgap::spectrum::Spectrum;
use rectgap::stats::{
    billiard_vs_poisson_report, devroye_frequencies, distinct_moduli, ford_exponent_report, poisson_min_gap,
    quadruple_count, PoissonExperiment, QuadrupleWindow,
};
use rectgap::Error;

use crate::args::{Cli, Command, ConstructKind, FamilyArgs, PoissonArgs};

pub struct Outcome {
    pub payload: Value,
    pub alpha: Option<String>,
    pub seed: Option<u64>,
    pub selftest_failed: bool,
}

impl Outcome {
    fn new(payload: impl Serialize) -> Self {
        Outcome { payload: to_value(payload), alpha: None, seed: None, selftest_failed: false }
    }

    fn alpha(mut self, a: &Alpha) -> Self {
        self.alpha = Some(a.to_string());
        self
    }

    fn seed(mut self, s: u64) -> Self {
        self.seed = Some(s);
        self
    }
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).expect("payload serializes")
}

fn parse_alpha(s: &str) -> Result<Alpha, Error> {
    Alpha::parse(s)
}

fn parse_int(s: &str, what: &str) -> Result<BigInt, Error> {
    s.trim().parse().map_err(|_| Error::Parse { input: s.into(), reason: format!("{what} must be an integer") })
}

fn parse_rational(s: &str) -> Result<Rational, Error> {
    s.trim().parse().map_err(|_| Error::Parse { input: s.into(), reason: "expected p or p/q".into() })
}

fn family(f: &FamilyArgs) -> Result<GeneralQuadraticSpec, Error> {
    GeneralQuadraticSpec::new(f.x, f.a, f.b, f.sign, parse_rational(&f.r)?)
}

pub fn run(cli: &Cli) -> Result<Outcome, Error> {
    let cap = cli.precision_cap;
    match &cli.command {
        Command::Spectrum { alpha, count } => {
            let a = parse_alpha(&alpha.alpha)?;
            let spec = Spectrum::with_precision_cap(&a, cap)?;
            let levels = spec.enumerate(*count as usize)?;
            let rows: Vec<Value> = levels
                .iter()
                .enumerate()
                .map(|(i, e)| json!({ "index": i + 1, "m": e.m, "n": e.n, "level": e.level(&a).to_decimal(REPORT_DIGITS) }))
                .collect();
            Ok(Outcome::new(rows).alpha(&a))
        }
        Command::Mingap { alpha, count, k } => {
            let a = parse_alpha(&alpha.alpha)?;
            let rec = Spectrum::with_precision_cap(&a, cap)?.min_gap(*count, *k)?;
            Ok(Outcome::new(rec).alpha(&a))
        }
        Command::Sweep { alpha, counts } => {
            let a = parse_alpha(&alpha.alpha)?;
            let rows = Spectrum::with_precision_cap(&a, cap)?.sweep(counts)?;
            Ok(Outcome::new(rows).alpha(&a))
        }
        Command::Cf { alpha, depth } => {
            let a = parse_alpha(&alpha.alpha)?;
            Ok(Outcome::new(continued_fraction(&a, *depth)?).alpha(&a))
        }
        Command::Convergents { alpha, count } => {
            let a = parse_alpha(&alpha.alpha)?;
            Ok(Outcome::new(convergents(&a, *count)?).alpha(&a))
        }
        Command::Dirichlet { alpha, big_q } => {
            let a = parse_alpha(&alpha.alpha)?;
            Ok(Outcome::new(dirichlet_approx(&a, *big_q)?).alpha(&a))
        }
        Command::Divisor { n } => {
            let n: BigUint = parse_int(n, "n")?
                .to_biguint()
                .filter(|v| *v > BigUint::from(0u32))
                .ok_or_else(|| Error::InvalidArgument("n must be positive".into()))?;
            let factors = factorize(&n)?;
            let count: u64 = factors.iter().map(|(_, e)| *e as u64 + 1).product();
            let factorization: Vec<Value> = factors.iter().map(|(p, e)| json!([p.to_string(), e])).collect();
            Ok(Outcome::new(json!({
                "n": n.to_string(),
                "factorization": factorization,
                "divisor_count": count,
                "best": to_value(best_divisor(&n)?),
            })))
        }
        Command::Cheb { x, n, m } => {
            let mut out = json!({
                "x": x,
                "n": n,
                "t2": cheb_t2(*n, *x).to_string(),
                "u": cheb_u(*n, *x).to_string(),
            });
            if let Some(m) = m {
                let obj = out.as_object_mut().expect("object");
                obj.insert("m".into(), json!(m));
                if *n >= 1 && *m >= 1 {
                    obj.insert("u_gcd_identity".into(), json!(sds_gcd_check(&SdsSpec::UHalfint { x: *x }, *n, *m)?));
                }
                if n % 2 == 1 && m % 2 == 1 {
                    let t = sds_gcd_check(&SdsSpec::THalfintDoubled { x: *x }, *n, *m)?;
                    obj.insert("t_gcd_identity".into(), json!(t));
                }
            }
            Ok(Outcome::new(out))
        }
        Command::Pell { d, n } => {
            let sol = match n {
                Some(n) => pell_sequence(*d, *n)?,
                None => pell_fundamental(*d)?,
            };
            Ok(Outcome::new(sol))
        }
        Command::Primeselect { eps, residue } => {
            let policy = match residue {
                Some(r) if *r == 1 || *r == 3 => PoolPolicy::residue(*r),
                Some(r) => return Err(Error::InvalidArgument(format!("residue must be 1 or 3, got {r}"))),
                None => PoolPolicy::default(),
            };
            Ok(Outcome::new(prime_select(*eps, &policy)?))
        }
        Command::Construct { kind } => construct(kind),
        Command::Poisson(p) => poisson(p),
        Command::Multtable { xs, count, c } => match (count, c) {
            (Some(n), Some(c)) => {
                let (side, distinct) = distinct_moduli(*n, *c)?;
                Ok(Outcome::new(json!({ "N": n, "C": c, "side": side, "distinct": distinct })))
            }
            _ => {
                if xs.is_empty() {
                    return Err(Error::InvalidArgument("give --X or both --N and --C".into()));
                }
                Ok(Outcome::new(ford_exponent_report(xs)?))
            }
        },
        Command::Quadruples { alpha, m, t_exp } => {
            let a = parse_alpha(&alpha.alpha)?;
            let w = QuadrupleWindow::with_exponent(a.clone(), *m, *t_exp)?;
            Ok(Outcome::new(quadruple_count(&w)?).alpha(&a))
        }
        Command::Report { alpha, counts, trials, seed } => {
            let a = parse_alpha(&alpha.alpha)?;
            let exp = PoissonExperiment::new(2, *trials, *seed, 1)?;
            Ok(Outcome::new(billiard_vs_poisson_report(&a, counts, &exp)?).alpha(&a).seed(*seed))
        }
        Command::Selftest => {
            let suites = identity_suites();
            let failed = suites.iter().any(|s| !s.passed());
            let mut out = Outcome::new(json!({ "passed": !failed, "suites": suites }));
            out.selftest_failed = failed;
            Ok(out)
        }
    }
}

fn construct(kind: &ConstructKind) -> Result<Outcome, Error> {
    match kind {
        ConstructKind::SqrtD { d, primes, cofactors, prefactor } => {
            let sel = PrimeSelection::from_primes(primes)?;
            let opts = SqrtDOptions { prefactor: parse_rational(prefactor)? };
            let certs = construct_sqrt_d(*d, &sel, cofactors, &opts)?;
            let alpha = certs.first().map(|c| c.alpha.clone());
            Ok(Outcome { alpha, ..Outcome::new(certs) })
        }
        ConstructKind::General { family: f, eps } => {
            let spec = family(f)?;
            let certs = construct_general(&spec, *eps, f.count)?;
            Ok(Outcome::new(certs).alpha(&Alpha::Surd(spec.alpha()?)))
        }
        ConstructKind::Strong { family: f } => {
            let spec = family(f)?;
            let certs = construct_strong_exact(&spec, f.count)?;
            Ok(Outcome::new(certs).alpha(&Alpha::Surd(spec.alpha()?)))
        }
        ConstructKind::Approximant { alpha, p, q } => {
            let a = parse_alpha(&alpha.alpha)?;
            let c = construct_from_approximant(&a, &parse_int(p, "p")?, &parse_int(q, "q")?)?;
            Ok(Outcome::new(c).alpha(&a))
        }
        ConstructKind::Dirichlet { alpha, count } => {
            let a = parse_alpha(&alpha.alpha)?;
            Ok(Outcome::new(general_upper_bound(&a, *count)?).alpha(&a))
        }
    }
}

fn poisson(p: &PoissonArgs) -> Result<Outcome, Error> {
    if p.devroye {
        let rows = devroye_frequencies(p.j_min, p.j_max, p.trials, p.seed)?;
        return Ok(Outcome::new(rows).seed(p.seed));
    }
    let count = p.count.ok_or_else(|| Error::InvalidArgument("--N is required".into()))?;
    let exp = PoissonExperiment::new(count, p.trials, p.seed, p.k)?;
    let mut dist = poisson_min_gap(&exp)?;
    if p.no_samples {
        dist.samples.clear();
    }
    Ok(Outcome::new(dist).seed(p.seed))
}

mod output;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use g2census::census::{self, load_census, write_census, CheckKind};
use g2census::chow::derive_t_class_traced;
use g2census::formulas::{self, DivisorClass};
use g2census::theta::numeric::{random_point, theta_series};
use g2census::theta::{self, ThetaCharacteristic};
use g2census::{Census, EnumerateConfig, Grade, Stratum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use serde_json::Value;

use output::{Format, Table};

/// Inclusive integer range, written `a`, `a..b`, or `a..=b` (both inclusive).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Span {
    lo: i64,
    hi: i64,
}

impl Span {
    fn iter(self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }

    fn unsigned(self, what: &str) -> anyhow::Result<impl Iterator<Item = u64>> {
        if self.lo < 0 {
            bail!("{what} must be non-negative, got {self}");
        }
        Ok((self.lo as u64)..=(self.hi as u64))
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<i64>().map_err(|e| format!("{t:?}: {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
            None => (num(s)?, num(s)?),
        };
        if lo > hi {
            return Err(format!("empty range {s}"));
        }
        Ok(Span { lo, hi })
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}..={}", self.lo, self.hi)
        }
    }
}

impl Serialize for Span {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "g2census",
    version,
    about = "Census and class checks for genus-two square-tiled surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Directory holding census caches.
    #[arg(long, global = true, env = "CACHE_DIR", default_value = "census-cache")]
    cache_dir: PathBuf,

    /// Worker threads (defaults to one per core). Has no effect on output.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Truncation radius for numeric theta series.
    #[arg(long, global = true, default_value_t = 6.0)]
    radius: f64,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Enumerate and classify surfaces, writing census files to the cache.
    Census {
        /// H2 or H11; both when omitted.
        #[arg(long)]
        stratum: Option<Stratum>,
        #[arg(long)]
        n: Span,
    },
    /// Compare census buckets with the counting formulas. Never writes caches.
    VerifyCounts {
        #[arg(long)]
        stratum: Option<Stratum>,
        #[arg(long, default_value = "3..=10")]
        n: Span,
    },
    /// Classes, Euler characteristics and counts of every family at one `d`.
    Classes {
        #[arg(long)]
        d: u64,
        /// Largest torsion order listed.
        #[arg(long = "M", default_value_t = 5)]
        #[serde(rename = "M")]
        m: u64,
    },
    /// Checks that Euler characteristics reproduce the counts.
    Euler {
        #[arg(long, default_value = "3..=31")]
        d: Span,
        #[arg(long = "M", default_value_t = 5)]
        #[serde(rename = "M")]
        m: u64,
    },
    /// Derives the class of T_{d,M,eps} from the divisor algebra.
    ChowDerive {
        #[arg(long)]
        d: u64,
        #[arg(long = "M")]
        #[serde(rename = "M")]
        m: u64,
        #[arg(long)]
        eps: Option<u8>,
    },
    /// Orbits of theta characteristics under the level group.
    ThetaOrbits {
        #[arg(long)]
        d: u64,
        /// Random group elements used for the closure check.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Vanishing orders of theta functions along boundary charts.
    ThetaVanishing {
        #[arg(long)]
        d: u64,
        #[arg(long, default_value = "-2..=2", allow_hyphen_values = true)]
        k: Span,
    },
    /// SL2(Z)-orbits of a census.
    OrbitPartition {
        #[arg(long)]
        stratum: Stratum,
        #[arg(long)]
        n: usize,
    },
}

/// The run configuration embedded in every output. The thread count is left
/// out so that outputs do not depend on it.
#[derive(Serialize)]
struct RunConfig<'a> {
    #[serde(flatten)]
    command: &'a Command,
    cache_dir: &'a Path,
    format: Format,
    radius: f64,
    seed: u64,
}

fn strata(s: Option<Stratum>) -> Vec<Stratum> {
    s.map_or_else(|| vec![Stratum::H2, Stratum::H11], |s| vec![s])
}

fn eps_str(e: Option<u8>) -> String {
    e.map_or_else(String::new, |e| e.to_string())
}

fn class_cells(c: &DivisorClass) -> [String; 2] {
    [c.a.to_string(), c.b.to_string()]
}

/// The cached census if there is one, otherwise a freshly built one.
fn census_for(dir: &Path, stratum: Stratum, n: usize) -> anyhow::Result<Census> {
    match load_census(dir, stratum, n)? {
        Some(c) => Ok(c),
        None => Ok(Census::build(n, stratum, &EnumerateConfig::default())?),
    }
}

fn run(cli: &Cli, config: &Value) -> anyhow::Result<ExitCode> {
    let mut code = ExitCode::SUCCESS;
    let table = match &cli.command {
        Command::Census { stratum, n } => {
            let mut t = Table::new(&["stratum", "n", "records", "reduced", "orbits", "file"]);
            for s in strata(*stratum) {
                for n in n.unsigned("n")? {
                    let n = n as usize;
                    let c = Census::build(n, s, &EnumerateConfig::default())?;
                    write_census(&cli.cache_dir, &c, config.clone())
                        .with_context(|| format!("writing census to {}", cli.cache_dir.display()))?;
                    let path = census::records_path(&cli.cache_dir, s, n);
                    t.push([
                        s.to_string(),
                        n.to_string(),
                        c.records.len().to_string(),
                        c.reduced().count().to_string(),
                        c.orbit_sizes().len().to_string(),
                        path.display().to_string(),
                    ]);
                }
            }
            t
        }
        Command::VerifyCounts { stratum, n } => {
            let mut t = Table::new(&["stratum", "d", "M", "epsilon", "count", "source", "match"]);
            for s in strata(*stratum) {
                for n in n.unsigned("n")? {
                    let c = census_for(&cli.cache_dir, s, n as usize)?;
                    let report = census::verify(&census::count(&c), s, n as usize);
                    for r in &report.rows {
                        let eps = match r.kind {
                            CheckKind::KaniTotal => "total".to_string(),
                            CheckKind::Bucket => eps_str(r.epsilon),
                        };
                        let source = match r.grade {
                            Grade::Theorem => "formula",
                            Grade::Conjecture => "conjecture",
                        };
                        let head = [s.to_string(), r.d.to_string(), r.m.to_string(), eps];
                        let tail = |count: String, src: &str| {
                            head.iter()
                                .cloned()
                                .chain([count, src.to_string(), r.matches.to_string()])
                        };
                        t.push(tail(r.census.to_string(), "census"));
                        t.push(tail(r.formula.clone(), source));
                        if !r.matches {
                            let level = if r.grade == Grade::Theorem { "error" } else { "warning" };
                            eprintln!(
                                "{level}: {s} d={} M={} epsilon={}: census {} (weighted by 1/|Aut|: {}) vs {source} {}",
                                r.d, r.m, head[3], r.census, r.census_weighted, r.formula
                            );
                        }
                    }
                    if !report.passed() {
                        code = ExitCode::from(1);
                    }
                }
            }
            t
        }
        Command::Classes { d, m } => {
            let d = *d;
            let mut t = Table::new(&["family", "d", "M", "epsilon", "lambda1", "lambda2", "euler", "count"]);
            let mut push = |family: &str, m: String, eps: Option<u8>, c: &DivisorClass, count: String| {
                let chi = formulas::euler_from_class(c, d);
                let [a, b] = class_cells(c);
                t.push([
                    family.to_string(),
                    d.to_string(),
                    m,
                    eps_str(eps),
                    a,
                    b,
                    chi.to_string(),
                    count,
                ]);
            };
            for m in 1..=*m {
                for eps in formulas::spins(d, m) {
                    let c = formulas::class_t(d, m, eps)?;
                    push("T", m.to_string(), eps, &c, formulas::count_t(d, m, eps)?.to_string());
                }
            }
            for eps in formulas::h2_spins(d) {
                let c = formulas::class_w(d, eps)?;
                push(
                    "W",
                    String::new(),
                    Some(eps),
                    &c,
                    formulas::count_w(d, eps)?.to_string(),
                );
            }
            push("P", String::new(), None, &formulas::class_p(d, None)?, String::new());
            for eps in formulas::p_spins(d) {
                push(
                    "P",
                    String::new(),
                    Some(eps),
                    &formulas::class_p(d, Some(eps))?,
                    String::new(),
                );
            }
            t
        }
        Command::Euler { d, m } => {
            let mut t = Table::new(&[
                "family",
                "d",
                "M",
                "epsilon",
                "euler",
                "count_from_euler",
                "count",
                "match",
            ]);
            for d in d.unsigned("d")?.filter(|&d| d >= 3) {
                let mut rows = Vec::new();
                for mm in 1..=*m {
                    for eps in formulas::spins(d, mm) {
                        rows.push((
                            "T",
                            mm.to_string(),
                            eps,
                            formulas::class_t(d, mm, eps)?,
                            formulas::count_t(d, mm, eps)?,
                        ));
                    }
                }
                for eps in formulas::h2_spins(d) {
                    rows.push((
                        "W",
                        String::new(),
                        Some(eps),
                        formulas::class_w(d, eps)?,
                        formulas::count_w(d, eps)?,
                    ));
                }
                for (family, mm, eps, class, count) in rows {
                    let chi = formulas::euler_from_class(&class, d);
                    let from = formulas::count_from_euler(&chi);
                    let ok = from == count;
                    t.push([
                        family.into(),
                        d.to_string(),
                        mm,
                        eps_str(eps),
                        chi.to_string(),
                        from.to_string(),
                        count.to_string(),
                        ok.to_string(),
                    ]);
                }
                let parts = formulas::p_spins(d)
                    .iter()
                    .map(|&e| formulas::class_p(d, Some(e)).map(|c| formulas::euler_from_class(&c, d)))
                    .sum::<Result<formulas::Rational, _>>()?;
                let whole = formulas::euler_from_class(&formulas::class_p(d, None)?, d);
                t.push([
                    "P".into(),
                    d.to_string(),
                    String::new(),
                    String::new(),
                    parts.to_string(),
                    String::new(),
                    String::new(),
                    (parts == whole).to_string(),
                ]);
            }
            t
        }
        Command::ChowDerive { d, m, eps } => {
            let r = derive_t_class_traced(*d, *m, *eps)?;
            let mut t = Table::new(&["term", "lambda1", "lambda2", "match"]);
            let mut push = |name: String, c: &DivisorClass, ok: String| {
                let [a, b] = class_cells(c);
                t.push([name, a, b, ok]);
            };
            let level = r.terms.m;
            push(format!("main(level {level})"), &r.terms.main.reduce(*d), String::new());
            push(
                "theta_boundary".into(),
                &r.terms.theta_boundary.reduce(*d),
                String::new(),
            );
            push(
                "dtheta_boundary".into(),
                &r.terms.dtheta_boundary.reduce(*d),
                String::new(),
            );
            push("zero_section".into(), &r.terms.zero_section.reduce(*d), String::new());
            push(format!("pi_*O_{level}"), &r.terms.total, String::new());
            for (name, c) in &r.subtracted {
                push(format!("minus {name}"), c, String::new());
            }
            push("derived".into(), &r.derived, r.matches.to_string());
            push("closed_form".into(), &r.closed_form, r.matches.to_string());
            if !r.matches {
                code = ExitCode::from(1);
            }
            t
        }
        Command::ThetaOrbits { d, samples } => {
            let r = theta::orbit_decomposition_sampled(*d, *samples, cli.seed)?;
            let mut t = Table::new(&["kind", "name", "size", "parity", "members", "match"]);
            let members = |v: &[ThetaCharacteristic]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
            let parity = |v: &[ThetaCharacteristic]| format!("{:?}", v[0].parity()).to_lowercase();
            for (i, o) in r.orbits.iter().enumerate() {
                t.push([
                    "orbit".into(),
                    format!("orbit-{i}"),
                    o.len().to_string(),
                    parity(o),
                    members(o),
                    String::new(),
                ]);
            }
            for c in &r.claimed {
                t.push([
                    "claimed".into(),
                    c.name.to_string(),
                    c.members.len().to_string(),
                    parity(&c.members),
                    members(&c.members),
                    c.matches.to_string(),
                ]);
            }
            t.push([
                "closure".into(),
                format!("{} sampled", r.sampled_elements),
                r.closure_violations.to_string(),
                String::new(),
                String::new(),
                r.matches.to_string(),
            ]);
            t
        }
        Command::ThetaVanishing { d, k } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let (z, _) = random_point(&mut rng, 1.0);
            let u = [num_complex::Complex64::new(0.0, 0.0); 2];
            let mut t = Table::new(&[
                "characteristic",
                "parity",
                "boundary",
                "k",
                "order",
                "closed_form",
                "constant_abs",
                "tail_bound",
            ]);
            for ch in ThetaCharacteristic::all() {
                let v = theta_series(ch.g1_i64(), ch.g2_i64(), *d, z, u, cli.radius)?;
                for i in 1..=2 {
                    for k in k.iter() {
                        t.push([
                            ch.to_string(),
                            format!("{:?}", ch.parity()).to_lowercase(),
                            i.to_string(),
                            k.to_string(),
                            theta::vanishing_order(&ch, i, k, *d)?.to_string(),
                            theta::vanishing_order_closed_form(&ch, i, k, *d).to_string(),
                            format!("{:.3e}", v.value().norm()),
                            format!("{:.3e}", v.tail_bound),
                        ]);
                    }
                }
            }
            t
        }
        Command::OrbitPartition { stratum, n } => {
            let c = census_for(&cli.cache_dir, *stratum, *n)?;
            let sizes = c.orbit_sizes();
            let mut t = Table::new(&["orbit_id", "size", "reduced", "d", "M", "epsilon", "h", "v"]);
            for (id, size) in &sizes {
                let r = c
                    .records
                    .iter()
                    .find(|r| r.orbit_id.as_deref() == Some(id.as_str()))
                    .expect("orbit has a member");
                let join = |p: &[usize]| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
                let opt = |x: Option<u64>| x.map_or_else(String::new, |x| x.to_string());
                t.push([
                    id.clone(),
                    size.to_string(),
                    r.reduced.to_string(),
                    opt(r.d),
                    opt(r.m),
                    eps_str(r.epsilon),
                    join(&r.h),
                    join(&r.v),
                ]);
            }
            t
        }
    };
    table.print(cli.format, config)?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let config = RunConfig {
        command: &cli.command,
        cache_dir: &cli.cache_dir,
        format: cli.format,
        radius: cli.radius,
        seed: cli.seed,
    };
    let config = serde_json::to_value(&config).expect("config serialises");
    match run(&cli, &config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans() {
        assert_eq!("5".parse::<Span>().unwrap(), Span { lo: 5, hi: 5 });
        assert_eq!("3..10".parse::<Span>().unwrap(), Span { lo: 3, hi: 10 });
        assert_eq!("-2..=2".parse::<Span>().unwrap(), Span { lo: -2, hi: 2 });
        assert!("4..3".parse::<Span>().is_err());
        assert_eq!(Span { lo: -2, hi: 2 }.iter().count(), 5);
    }
}

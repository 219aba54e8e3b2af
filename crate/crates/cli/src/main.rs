use clap::{Args, Parser, Subcommand, ValueEnum};
use elliptica_cli::acceptance::Level;
use elliptica_cli::commands::{self, CurveSource};
use elliptica_cli::output::{to_json, to_text};
use elliptica_cli::spec::{parse_list, parse_matrix_rows, Construction, ElementSpec, GroupSpec};
use elliptica_cli::CliError;
use serde_json::Value;
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "elliptica", version, about = "Elliptic elements, components and causal structure of hermitian Lie groups")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// sl2, sp<2n> or su(p,q).
    #[arg(long, global = true, default_value = "sp4")]
    group: String,
    /// Lattice preset (universal, matrix, adjoint, integral; SL2 or PSL2 for
    /// sl2). Defaults to the defining matrix group.
    #[arg(long, global = true, default_value = "")]
    lattice: String,
    /// Print the full JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the per-sample table of `causal` to this file.
    #[arg(long, global = true)]
    csv: Option<String>,
    /// Seed for random elements and curves.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// default, strict, loose or scale:<factor>.
    #[arg(long, global = true, default_value = "default")]
    tol_profile: String,
}

#[derive(Args)]
struct ElementArgs {
    /// Matrix rows as `a,b;c,d`; complex entries as `1+2i`.
    #[arg(long, allow_hyphen_values = true)]
    matrix: Option<String>,
    /// Torus angles as rational multiples of pi, e.g. `1/2,1/4`.
    #[arg(long, allow_hyphen_values = true)]
    angles: Option<String>,
    /// Word of exponentials, factors separated by `|`; each factor is
    /// coordinates or a `;` matrix.
    #[arg(long, allow_hyphen_values = true)]
    word: Option<String>,
    /// Algebra coordinates.
    #[arg(long, allow_hyphen_values = true)]
    coords: Option<String>,
    /// Seeded sample: compact, hyperbolic, group, gaussian or elliptic.
    #[arg(long)]
    random: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveKindArg {
    Random,
    ZRay,
    Hyperbolic,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Ellipticity, component, tau and f_GW of a group element.
    Classify {
        #[command(flatten)]
        element: ElementArgs,
        /// Check a saved classify report instead.
        #[arg(long)]
        verify: Option<String>,
    },
    /// Component classes with labels in the box `[-bound, bound]^m`.
    Atlas {
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
    /// Cone margins, tau and f_GW along a curve.
    Causal {
        #[arg(long, value_enum, default_value = "random")]
        curve: CurveKindArg,
        #[arg(long, default_value_t = 60)]
        steps: usize,
        /// Start of the z-ray.
        #[arg(long, default_value_t = 0.1)]
        t0: f64,
        /// End of the z-ray; defaults to `2 pi - 0.1`.
        #[arg(long)]
        t1: Option<f64>,
    },
    /// Value of the Maslov quasimorphism.
    Maslov {
        #[command(flatten)]
        element: ElementArgs,
    },
    /// Time function on the basic component.
    Tau {
        #[command(flatten)]
        element: ElementArgs,
    },
    /// Membership in the maximal invariant cone of an algebra element.
    Cone {
        #[command(flatten)]
        element: ElementArgs,
    },
    /// First time `g exp(t x)` leaves the basic component.
    ExitTime {
        #[command(flatten)]
        element: ElementArgs,
        /// Direction `x`: coordinates or a `;` matrix.
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
        #[arg(long)]
        backward: bool,
    },
    /// Run the acceptance checks.
    Selftest {
        #[arg(long, value_enum, default_value = "quick")]
        level: LevelArg,
        /// Comma separated criterion numbers.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Append one JSON line per criterion to this file.
        #[arg(long)]
        log: Option<String>,
    },
}

impl Global {
    fn group_spec(&self) -> GroupSpec {
        GroupSpec { group: self.group.clone(), lattice: self.lattice.clone(), tol_profile: self.tol_profile.clone() }
    }
}

fn element_spec(g: &Global, e: &ElementArgs) -> Result<ElementSpec, CliError> {
    let mut given = Vec::new();
    if let Some(m) = &e.matrix {
        given.push(Construction::Matrix { rows: parse_matrix_rows(m) });
    }
    if let Some(a) = &e.angles {
        given.push(Construction::Angles { pi_multiples: parse_list(a) });
    }
    if let Some(w) = &e.word {
        given.push(Construction::Word { factors: w.split('|').map(|f| f.trim().to_string()).collect() });
    }
    if let Some(c) = &e.coords {
        given.push(Construction::Coords { values: parse_list(c) });
    }
    if let Some(r) = &e.random {
        given.push(Construction::Random { recipe: r.clone(), seed: g.seed });
    }
    if given.len() != 1 {
        return Err(CliError::Invalid("give exactly one of --matrix, --angles, --word, --coords, --random".into()));
    }
    Ok(ElementSpec { group: g.group_spec(), construction: given.pop().unwrap() })
}

fn emit(v: &Value, json: bool) {
    let text = if json { to_json(v) + "\n" } else { to_text(v) };
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let g = &cli.global;
    let io = |e: std::io::Error| CliError::Invalid(e.to_string());
    let report = match &cli.command {
        Command::Classify { element, verify: Some(path) } => {
            if [&element.matrix, &element.angles, &element.word, &element.coords, &element.random].iter().any(|o| o.is_some()) {
                return Err(CliError::Invalid("--verify takes no element".into()));
            }
            let text = std::fs::read_to_string(path).map_err(io)?;
            commands::verify_classify(&text)?
        }
        Command::Classify { element, verify: None } => commands::classify(&element_spec(g, element)?)?,
        Command::Atlas { bound } => commands::atlas(&g.group_spec(), *bound)?,
        Command::Causal { curve, steps, t0, t1 } => {
            let source = match curve {
                CurveKindArg::Random => CurveSource::Random { seed: g.seed, steps: *steps },
                CurveKindArg::ZRay => CurveSource::ZRay {
                    t0: *t0,
                    t1: t1.unwrap_or(std::f64::consts::TAU - 0.1),
                    steps: *steps,
                },
                CurveKindArg::Hyperbolic => CurveSource::Hyperbolic { seed: g.seed, steps: *steps },
            };
            let (summary, csv) = commands::causal(&g.group_spec(), &source)?;
            if let Some(path) = &g.csv {
                std::fs::write(path, csv).map_err(io)?;
            }
            summary
        }
        Command::Maslov { element } => commands::maslov(&element_spec(g, element)?)?,
        Command::Tau { element } => commands::tau_cmd(&element_spec(g, element)?)?,
        Command::Cone { element } => commands::cone(&element_spec(g, element)?)?,
        Command::ExitTime { element, direction, backward } => {
            commands::exit_time_cmd(&element_spec(g, element)?, direction, *backward)?
        }
        Command::Selftest { level, only, log } => {
            let level = match level {
                LevelArg::Quick => Level::Quick,
                LevelArg::Full => Level::Full,
            };
            let res = commands::selftest(level, &g.tol_profile, only)?;
            if let Some(path) = log {
                let mut lines = String::new();
                for o in &res.outcomes {
                    lines.push_str(&serde_json::to_string(o).expect("outcome serializes"));
                    lines.push('\n');
                }
                std::fs::write(path, lines).map_err(io)?;
            }
            if g.json {
                emit(&res.report, true);
            } else {
                for o in &res.outcomes {
                    println!("{}", o.line());
                }
            }
            return Ok(if res.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    };
    emit(&report, g.json);
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("elliptica: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

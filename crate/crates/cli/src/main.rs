//! `dwork`: replay the bundled proofs, check `.dwk` scripts, and compare
//! twisted and local cohomology on small examples.
//!
//! Exit codes: 0 success, 1 a proof or comparison failed, 2 bad input,
//! 3 inconclusive (truncation did not stabilize).

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dwork_core::builtin::{builtins, document, replay};
use dwork_core::dsl::{parse_document, render_batch, render_report, Report, ReportFormat};
use dwork_core::rewrite::{check_certificate, search_equiv, Mode, SearchOptions, ValidationReport};
use dwork_core::weyl::{default_d_max, dwork_compare, DworkParams, MultiPoly};

#[derive(Parser, Debug)]
#[command(name = "dwork", version, about = "Dwork cohomology as local cohomology, checked two ways")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Strict,
    AllowSingular,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::AllowSingular => Mode::AllowSingular,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Machine,
}

impl From<Output> for ReportFormat {
    fn from(o: Output) -> ReportFormat {
        match o {
            Output::Text => ReportFormat::Text,
            Output::Machine => ReportFormat::Machine,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Replay the nine bundled certificates.
    VerifyPaper {
        /// Replay every certificate in this mode instead of its own.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Highest rule stratum allowed.
        #[arg(long)]
        strata: Option<u8>,
        #[arg(long, value_enum, default_value = "text")]
        output: Output,
    },
    /// Check the scripts of a `.dwk` file against their goals.
    Prove {
        path: std::path::PathBuf,
        /// Search for proofs of goals without a script, up to this depth.
        #[arg(long)]
        search: Option<usize>,
        /// Replay every script in this mode instead of its own.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        strata: Option<u8>,
        #[arg(long, value_enum, default_value = "text")]
        output: Output,
    },
    /// Compare twisted de Rham cohomology of F = Σ y_i f_i with cohomology
    /// supported on {f_1 = ... = f_r = 0}.
    DworkCheck {
        /// Number of base variables (x1..xn; x, y, z also accepted for n ≤ 3).
        #[arg(long)]
        n: usize,
        /// Number of polynomials, if given must match the `--f` count.
        #[arg(long)]
        r: Option<usize>,
        /// A section component f_i; repeat for r > 1.
        #[arg(long = "f", required = true)]
        f: Vec<String>,
        #[arg(long)]
        d_max: Option<u32>,
        #[arg(long, default_value_t = 10)]
        pole_max: u32,
        #[arg(long, default_value_t = 3)]
        window: usize,
        #[arg(long, value_enum, default_value = "text")]
        output: Output,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::VerifyPaper { mode, strata, output } => verify_paper(mode.map(Mode::from), strata, output.into()),
        Command::Prove { path, search, mode, strata, output } => {
            prove(&path, search, mode.map(Mode::from), strata, output.into())
        }
        Command::DworkCheck { n, r, f, d_max, pole_max, window, output } => {
            dwork_check(n, r, &f, d_max, pole_max, window, output.into())
        }
    };
    ExitCode::from(code)
}

fn verify_paper(mode: Option<Mode>, strata: Option<u8>, format: ReportFormat) -> u8 {
    let mut reports: Vec<(String, ValidationReport)> =
        builtins().iter().map(|b| (b.id.to_string(), replay(b, mode, strata))).collect();
    // C1 rests on the M = O_X statement; replay its proof too.
    let doc = document("section2").expect("bundled");
    let ctx = doc.context().expect("bundled context");
    let mut cert = doc.certificate("dwork").expect("bundled goal");
    if let Some(m) = mode {
        cert.mode = m;
    }
    if let Some(s) = strata {
        cert.allowed_strata = s;
    }
    reports.push(("dwork".to_string(), check_certificate(&ctx, &cert)));
    let items: Vec<(&str, &ValidationReport)> = reports.iter().map(|(g, r)| (g.as_str(), r)).collect();
    print!("{}", render_batch(&items, format));
    if reports.iter().all(|(_, r)| r.valid) {
        0
    } else {
        1
    }
}

fn prove(path: &std::path::Path, search: Option<usize>, mode: Option<Mode>, strata: Option<u8>, format: ReportFormat) -> u8 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return 2;
        }
    };
    let doc = match parse_document(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{}:{e}", path.display());
            return 2;
        }
    };
    let ctx = match doc.context() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return 2;
        }
    };
    let mut reports: Vec<(String, ValidationReport)> = Vec::new();
    for goal in doc.goals() {
        if doc.scripts().iter().any(|s| s.goal == goal.name) {
            let mut cert = match doc.certificate(&goal.name) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{}: {e}", path.display());
                    return 2;
                }
            };
            if let Some(m) = mode {
                cert.mode = m;
            }
            if let Some(s) = strata {
                cert.allowed_strata = s;
            }
            reports.push((goal.name.clone(), check_certificate(&ctx, &cert)));
        } else if let Some(depth) = search {
            let mut opts = SearchOptions::default();
            if let Some(m) = mode {
                opts.mode = m;
            }
            if let Some(s) = strata {
                opts.strata = s;
            }
            match search_equiv(&ctx, &goal.lhs, &goal.rhs, depth, &opts) {
                Some(cert) => reports.push((goal.name.clone(), check_certificate(&ctx, &cert))),
                None => {
                    let r = ValidationReport {
                        valid: false,
                        reason: Some(format!("no proof found within depth {depth}")),
                        ..ValidationReport::default()
                    };
                    reports.push((goal.name.clone(), r));
                }
            }
        } else {
            eprintln!("note: goal {} has no script", goal.name);
        }
    }
    let items: Vec<(&str, &ValidationReport)> = reports.iter().map(|(g, r)| (g.as_str(), r)).collect();
    print!("{}", render_batch(&items, format));
    if reports.iter().all(|(_, r)| r.valid) {
        0
    } else {
        1
    }
}

fn variable_names(n: usize) -> Vec<Vec<String>> {
    let short = ["x", "y", "z"];
    (0..n)
        .map(|i| {
            let mut v = vec![format!("x{}", i + 1)];
            if n <= 3 {
                v.push(short[i].to_string());
            }
            v
        })
        .collect()
}

fn dwork_check(
    n: usize,
    r: Option<usize>,
    fs: &[String],
    d_max: Option<u32>,
    pole_max: u32,
    window: usize,
    format: ReportFormat,
) -> u8 {
    if n == 0 {
        eprintln!("--n must be positive");
        return 2;
    }
    if let Some(r) = r {
        if r != fs.len() {
            eprintln!("--r {r} does not match the {} polynomials given", fs.len());
            return 2;
        }
    }
    let names = variable_names(n);
    let mut polys = Vec::new();
    for f in fs {
        match MultiPoly::parse(f, &names) {
            Ok(p) => polys.push(p),
            Err(e) => {
                eprintln!("--f {f:?}: {e}");
                return 2;
            }
        }
    }
    let env_cap = match std::env::var("DWORK_DMAX") {
        Ok(v) => match v.parse::<u32>() {
            Ok(k) => Some(k),
            Err(_) => {
                eprintln!("DWORK_DMAX must be a nonnegative integer, got {v:?}");
                return 2;
            }
        },
        Err(_) => None,
    };
    let d_max = d_max.or(env_cap).or(Some(default_d_max(n + fs.len())));
    let params = DworkParams { d_max, pole_max, window };
    match dwork_compare(&polys, &params) {
        Ok(report) => {
            print!("{}", render_report(Report::Comparison(&report), format));
            report.exit_code() as u8
        }
        Err(e) => {
            eprintln!("{e}");
            2
        }
    }
}

//! Command-line front end for kirbykit.
//!
//! Every command prints a machine-readable report block followed by a
//! one-line human summary. Commands that produce a handlebody print the
//! handlebody file instead, unless `--output` names a file to write.
//!
//! Exit codes: 0 success, 1 a FAIL verdict, 2 an input error.

use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use kirbykit::cobordism::{self, AttachmentModel, CobordismModel};
use kirbykit::form::{
    algebraically_equivalent, format_class, DecoratedModule, Equivalence, OrderedValue,
};
use kirbykit::genus::{self, CharClassInstance, SumStabilityMode};
use kirbykit::handlebody::{self, Handlebody2};
use kirbykit::legendrian::{self, SteinifyConfig};
use kirbykit::text;
use kirbykit::Error;

/// Name of the environment variable that turns on verbose reports.
pub const VERBOSE_ENV: &str = "KIRBYKIT_VERBOSE";

#[derive(Parser, Debug)]
#[command(
    name = "kirbykit",
    version,
    about = "Exact algebra for 4-dimensional 2-handlebodies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Write the resulting file here instead of printing it.
    #[arg(short, long)]
    output: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Handle counts, tags and Stein status.
    Info { file: String },
    /// H1, rank of H2 and boundary H1.
    Homology { file: String },
    /// First homology of the boundary 3-manifold.
    Boundary { file: String },
    /// Mazur-type cork template.
    Cork {
        #[arg(allow_negative_numbers = true)]
        r: i64,
        #[arg(allow_negative_numbers = true)]
        s: i64,
        #[arg(allow_negative_numbers = true)]
        m: i64,
        #[command(flatten)]
        out: Output,
    },
    /// W⁻(p) modification of 2-handle IDX.
    Wminus {
        file: String,
        idx: usize,
        #[arg(allow_negative_numbers = true)]
        p: i64,
        #[command(flatten)]
        out: Output,
    },
    /// W⁺(p) modification of 2-handle IDX.
    Wplus {
        file: String,
        idx: usize,
        #[arg(allow_negative_numbers = true)]
        p: i64,
        #[command(flatten)]
        out: Output,
    },
    /// Make every 2-handle satisfy framing = tb - 1.
    Steinify {
        file: String,
        /// Framing of the 2-handles added by W⁺ modifications.
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        w_framing: i64,
        #[command(flatten)]
        out: Output,
    },
    /// Algebraic necessary conditions for HIHC-equivalence.
    Hihc {
        file1: String,
        file2: String,
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
    /// Boundary or connected sum of two handlebodies.
    Sum {
        file1: String,
        file2: String,
        #[arg(
            long,
            conflicts_with = "connected",
            required_unless_present = "connected"
        )]
        boundary: bool,
        #[arg(long)]
        connected: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Bounded search for an algebraic equivalence of two module files.
    Equiv {
        table1: String,
        table2: String,
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
    /// Lower-bound function A_G(R, N) of a disk-bundle table.
    Ag {
        table: String,
        r: String,
        #[arg(allow_negative_numbers = true)]
        n: i64,
    },
    /// Rochlin mod-16 obstruction for a characteristic class.
    Kmbound {
        formfile: String,
        /// Comma-separated coefficients, e.g. 3,1.
        #[arg(allow_hyphen_values = true)]
        alpha: String,
    },
    /// H2 of X with a cobordism whose kernel part is given by K attached.
    Attach {
        x: String,
        k: String,
        #[command(flatten)]
        out: Output,
    },
    /// Clause-by-clause quasi-invertibility certificate of a move trace.
    Certificate { trace: String },
    /// Stability of equivalence under sums or cobordism attachment.
    Stability {
        #[command(subcommand)]
        kind: Stability,
    },
}

#[derive(Subcommand, Debug)]
enum Stability {
    /// Sums X_i with pieces Z_i of surgered 4-spheres.
    Sum {
        x1: String,
        x2: String,
        z1: String,
        z2: String,
        /// h2zero or nondegenerate.
        #[arg(long)]
        mode: String,
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
    /// Attaches to each X_i a cobordism with kernel part K_i, glued along
    /// a boundary with vanishing H2.
    Quasi {
        x1: String,
        k1: String,
        x2: String,
        k2: String,
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
}

/// Captured result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = std::result::Result<(i32, String), Failure>;

struct Report {
    command: String,
    fields: Vec<(String, String)>,
    details: Vec<String>,
}

impl Report {
    fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            fields: Vec::new(),
            details: Vec::new(),
        }
    }

    fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    fn detail(&mut self, line: impl Into<String>) -> &mut Self {
        self.details.push(line.into());
        self
    }

    fn finish(&self, verbose: bool, summary: &str) -> String {
        let mut out = String::from("# report\n");
        let _ = writeln!(out, "command: {}", self.command);
        for (k, v) in &self.fields {
            let _ = writeln!(out, "{k}: {v}");
        }
        if verbose {
            for d in &self.details {
                let _ = writeln!(out, "detail: {d}");
            }
        }
        out.push_str("# summary\n");
        out.push_str(summary);
        out.push('\n');
        out
    }
}

struct Context<'a> {
    stdin: &'a mut dyn Read,
    stdin_used: bool,
    verbose: bool,
}

impl Context<'_> {
    fn read(&mut self, path: &str) -> std::result::Result<String, Failure> {
        if path == "-" {
            if self.stdin_used {
                return Err(Failure::Input(
                    "standard input can be read only once".into(),
                ));
            }
            self.stdin_used = true;
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| Failure::Input(format!("cannot read standard input: {e}")))?;
            return Ok(s);
        }
        std::fs::read_to_string(Path::new(path))
            .map_err(|e| Failure::Input(format!("cannot read {path}: {e}")))
    }

    fn handlebody(&mut self, path: &str) -> std::result::Result<Handlebody2, Failure> {
        let s = self.read(path)?;
        text::parse_handlebody(&s).map_err(|e| Failure::Input(format!("{path}: {e}")))
    }

    fn module(&mut self, path: &str) -> std::result::Result<DecoratedModule, Failure> {
        let s = self.read(path)?;
        text::parse_module(&s).map_err(|e| Failure::Input(format!("{path}: {e}")))
    }
}

fn emit_file(
    body: String,
    out: &Output,
    report: &mut Report,
    verbose: bool,
    summary: &str,
) -> CmdResult {
    match &out.output {
        None => Ok((0, body)),
        Some(path) => {
            std::fs::write(path, &body)
                .map_err(|e| Failure::Input(format!("cannot write {path}: {e}")))?;
            report.field("output", path);
            Ok((0, report.finish(verbose, summary)))
        }
    }
}

fn emit_handlebody(h: &Handlebody2, out: &Output, report: &mut Report, verbose: bool) -> CmdResult {
    let p = h.homology();
    let summary = format!(
        "{} 1-handles, {} 2-handles; H1: {}, H2 rank: {}, boundary H1: {}",
        h.one_handles(),
        h.two_handles().len(),
        p.h1,
        p.h2_rank,
        p.boundary_h1
    );
    emit_file(text::render_handlebody(h), out, report, verbose, &summary)
}

fn equivalence_fields(r: &mut Report, key: &str, e: &Equivalence) {
    r.field(key, e.label());
    if let Equivalence::Equivalent { witness, undecided } = e {
        r.detail(format!("{key} witness {}", witness.matrix()));
        if !undecided.is_empty() {
            let list: Vec<String> = undecided.iter().map(|c| format_class(c)).collect();
            r.detail(format!("{key} undecided {}", list.join(" ")));
        }
    }
}

fn parse_alpha(s: &str) -> std::result::Result<Vec<BigInt>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Failure::Input(format!("invalid class coefficient {t:?} in {s:?}")))
        })
        .collect()
}

fn kernel_cobordism(k: &DecoratedModule) -> std::result::Result<CobordismModel, Failure> {
    let base = CobordismModel::product(&DecoratedModule::zero())?;
    Ok(base.sum_with_s4_piece(k, k.is_torsion_free())?)
}

fn execute(cli: Cli, ctx: &mut Context<'_>) -> CmdResult {
    let verbose = ctx.verbose;
    match cli.command {
        Command::Info { file } => {
            let h = ctx.handlebody(&file)?;
            let fronts = h.two_handles().iter().filter(|t| t.front.is_some()).count();
            let stein = legendrian::is_stein(&h);
            let mut r = Report::new("info");
            r.field("one_handles", h.one_handles())
                .field("two_handles", h.two_handles().len())
                .field("fronts", fronts)
                .field("stein", if stein { "yes" } else { "no" })
                .field("tags", h.tags().len());
            for t in h.tags() {
                r.detail(format!("tag {t}"));
            }
            let summary = format!(
                "{} 1-handles, {} 2-handles, {} with fronts; Stein framings: {}",
                h.one_handles(),
                h.two_handles().len(),
                fronts,
                if stein { "yes" } else { "no" }
            );
            Ok((0, r.finish(verbose, &summary)))
        }
        Command::Homology { file } => {
            let h = ctx.handlebody(&file)?;
            let p = h.homology();
            let mut r = Report::new("homology");
            r.field("h1", &p.h1)
                .field("h2_rank", p.h2_rank)
                .field("boundary_h1", &p.boundary_h1)
                .detail(format!("intersection_form {}", p.intersection_form));
            let summary = format!(
                "H1: {}, H2 rank: {}, boundary H1: {}",
                p.h1, p.h2_rank, p.boundary_h1
            );
            Ok((0, r.finish(verbose, &summary)))
        }
        Command::Boundary { file } => {
            let h = ctx.handlebody(&file)?;
            let p = h.homology();
            let sphere = p.has_homology_sphere_boundary();
            let mut r = Report::new("boundary");
            r.field("boundary_h1", &p.boundary_h1)
                .field("homology_sphere", if sphere { "yes" } else { "no" })
                .detail(format!("boundary_matrix {}", h.boundary_matrix()));
            let summary = format!(
                "boundary H1: {}{}",
                p.boundary_h1,
                if sphere { " (homology sphere)" } else { "" }
            );
            Ok((0, r.finish(verbose, &summary)))
        }
        Command::Cork { r: rr, s, m, out } => {
            let h = handlebody::mazur_cork_template(rr, s, m)?;
            let mut r = Report::new("cork");
            r.field("r", rr).field("s", s).field("m", m);
            emit_handlebody(&h, &out, &mut r, verbose)
        }
        Command::Wminus { file, idx, p, out } => {
            let h = handlebody::w_minus(&ctx.handlebody(&file)?, idx, p)?;
            let mut r = Report::new("wminus");
            r.field("target", idx).field("p", p);
            emit_handlebody(&h, &out, &mut r, verbose)
        }
        Command::Wplus { file, idx, p, out } => {
            let h = handlebody::w_plus(&ctx.handlebody(&file)?, idx, p)?;
            let mut r = Report::new("wplus");
            r.field("target", idx).field("p", p);
            emit_handlebody(&h, &out, &mut r, verbose)
        }
        Command::Steinify {
            file,
            w_framing,
            out,
        } => {
            let cfg = SteinifyConfig {
                w_handle_framing: w_framing,
            };
            let (h, log) = legendrian::steinify_with(&ctx.handlebody(&file)?, &cfg)?;
            let mut r = Report::new("steinify");
            r.field("actions", log.len());
            for a in &log {
                r.detail(a.to_string());
            }
            emit_handlebody(&h, &out, &mut r, verbose)
        }
        Command::Hihc {
            file1,
            file2,
            bound,
        } => {
            let h1 = ctx.handlebody(&file1)?;
            let h2 = ctx.handlebody(&file2)?;
            let rep = handlebody::hihc_certificate(&h1, &h2, bound)?;
            let mut r = Report::new("hihc");
            for c in &rep.checks {
                r.field(c.name, if c.passed { "pass" } else { "fail" });
                r.detail(format!("{}: {} vs {}", c.name, c.left, c.right));
            }
            let verdict = if rep.passed() { "PASS" } else { "FAIL" };
            r.field("verdict", verdict);
            let summary = match rep.first_failure() {
                None => {
                    "PASS: homology, intersection forms and boundary homology agree".to_string()
                }
                Some(c) => format!("FAIL: {} differs ({} vs {})", c.name, c.left, c.right),
            };
            Ok((
                if rep.passed() { 0 } else { 1 },
                r.finish(verbose, &summary),
            ))
        }
        Command::Sum {
            file1,
            file2,
            boundary,
            connected: _,
            out,
        } => {
            let h1 = ctx.handlebody(&file1)?;
            let h2 = ctx.handlebody(&file2)?;
            let (h, kind) = if boundary {
                (handlebody::boundary_sum(&h1, &h2), "boundary")
            } else {
                (handlebody::connected_sum_model(&h1, &h2), "connected")
            };
            let mut r = Report::new("sum");
            r.field("kind", kind);
            emit_handlebody(&h, &out, &mut r, verbose)
        }
        Command::Equiv {
            table1,
            table2,
            bound,
        } => {
            let d1 = ctx.module(&table1)?;
            let d2 = ctx.module(&table2)?;
            let e = algebraically_equivalent(&d1, &d2, bound)?;
            let mut r = Report::new("equiv");
            r.field("bound", bound);
            equivalence_fields(&mut r, "verdict", &e);
            let (code, summary) = match &e {
                Equivalence::Equivalent { undecided, .. } if undecided.is_empty() => {
                    (0, "PASS: equivalent on every table class".to_string())
                }
                Equivalence::Equivalent { undecided, .. } => (
                    0,
                    format!(
                        "PARTIAL: equivalence found, {} table classes undecided",
                        undecided.len()
                    ),
                ),
                Equivalence::NotWithinBound => (
                    1,
                    format!("FAIL: no equivalence with entries within {bound}"),
                ),
            };
            Ok((code, r.finish(verbose, &summary)))
        }
        Command::Ag { table, r: rv, n } => {
            let t = text::parse_table(&ctx.read(&table)?)
                .map_err(|e| Failure::Input(format!("{table}: {e}")))?;
            let value: OrderedValue = rv.parse()?;
            let a = genus::a_g(&value, n, &t)?;
            let mut r = Report::new("ag");
            r.field("r", &value).field("n", n).field("a_g", a);
            let summary = match a {
                genus::AgValue::Finite(g) => format!("A_G({value}, {n}) = {g}"),
                genus::AgValue::InfiniteBeyondCoverage { g_max } => {
                    format!("A_G({value}, {n}) = inf; the table only covers genus up to {g_max}")
                }
            };
            Ok((0, r.finish(verbose, &summary)))
        }
        Command::Kmbound { formfile, alpha } => {
            let q = text::parse_form(&ctx.read(&formfile)?)
                .map_err(|e| Failure::Input(format!("{formfile}: {e}")))?;
            let c = CharClassInstance::new(q, parse_alpha(&alpha)?)?;
            let km = genus::kervaire_milnor_obstruction(&c);
            let mut r = Report::new("kmbound");
            r.field("self_intersection", c.self_intersection())
                .field("signature", c.sigma())
                .field("residue", km.residue)
                .field("positive_genus_forced", km.positive_genus_forced);
            let summary = if km.positive_genus_forced {
                format!("residue {} (mod 16): positive genus forced", km.residue)
            } else {
                format!("residue {} (mod 16): no obstruction", km.residue)
            };
            Ok((0, r.finish(verbose, &summary)))
        }
        Command::Attach { x, k, out } => {
            let x = ctx.module(&x)?;
            let k = ctx.module(&k)?;
            let model = AttachmentModel::with_zero_glue(x, kernel_cobordism(&k)?)?;
            let o = cobordism::attach(&model)?;
            let mut r = Report::new("attach");
            r.field("condition", o.condition)
                .field("h2", o.module.group())
                .field("intervals", o.intervals.len());
            for i in &o.intervals {
                r.detail(format!(
                    "interval {} [{}, {}]",
                    format_class(&i.class),
                    i.lo,
                    i.hi
                ));
            }
            let summary = format!(
                "H2 of the attached manifold: {} ({} classes only bracketed)",
                o.module.group(),
                o.intervals.len()
            );
            emit_file(
                text::render_module(&o.module),
                &out,
                &mut r,
                verbose,
                &summary,
            )
        }
        Command::Certificate { trace } => {
            let moves = cobordism::parse_trace(&ctx.read(&trace)?)?;
            let c = cobordism::quasi_invertibility_certificate(&moves);
            let mut r = Report::new("certificate");
            r.field("steps", c.steps.len())
                .field("strongly_quasi_invertible", c.strongly_quasi_invertible)
                .field("invertible", c.invertible);
            for s in &c.steps {
                r.detail(format!(
                    "{} clause={} invertible={}",
                    s.step, s.clause, s.invertible_after
                ));
            }
            let summary = format!(
                "{} moves from a product: {}",
                c.steps.len(),
                if c.invertible {
                    "invertible"
                } else {
                    "strongly quasi-invertible, invertibility not retained"
                }
            );
            Ok((0, r.finish(verbose, &summary)))
        }
        Command::Stability { kind } => match kind {
            Stability::Sum {
                x1,
                x2,
                z1,
                z2,
                mode,
                bound,
            } => {
                let mode: SumStabilityMode = mode.parse()?;
                let (d1, d2) = (ctx.module(&x1)?, ctx.module(&x2)?);
                let (e1, e2) = (ctx.module(&z1)?, ctx.module(&z2)?);
                let rep = genus::sum_stability_check(&d1, &d2, &e1, &e2, mode, bound)?;
                let mut r = Report::new("stability-sum");
                r.field("mode", rep.mode);
                equivalence_fields(&mut r, "before", &rep.before);
                equivalence_fields(&mut r, "after", &rep.after);
                if let Some(z) = &rep.z_parts {
                    equivalence_fields(&mut r, "z_parts", z);
                }
                stability_verdict(r, rep.consistent, verbose)
            }
            Stability::Quasi {
                x1,
                k1,
                x2,
                k2,
                bound,
            } => {
                let (d1, c1) = (ctx.module(&x1)?, ctx.module(&k1)?);
                let (d2, c2) = (ctx.module(&x2)?, ctx.module(&k2)?);
                let a1 = AttachmentModel::with_zero_glue(d1, kernel_cobordism(&c1)?)?;
                let a2 = AttachmentModel::with_zero_glue(d2, kernel_cobordism(&c2)?)?;
                let rep = cobordism::stability_check_quasi(&a1, &a2, bound)?;
                let mut r = Report::new("stability-quasi");
                r.field("mode", rep.mode);
                equivalence_fields(&mut r, "before", &rep.before);
                equivalence_fields(&mut r, "after", &rep.after);
                if let Some(k) = &rep.k_parts {
                    equivalence_fields(&mut r, "k_parts", k);
                }
                stability_verdict(r, rep.consistent, verbose)
            }
        },
    }
}

fn stability_verdict(mut r: Report, consistent: bool, verbose: bool) -> CmdResult {
    r.field("verdict", if consistent { "PASS" } else { "FAIL" });
    let summary = if consistent {
        "PASS: verdicts before and after agree with the stability statement"
    } else {
        "FAIL: stability statement violated; this indicates a bug"
    };
    Ok((if consistent { 0 } else { 1 }, r.finish(verbose, summary)))
}

/// Runs one invocation. `args` excludes the program name.
pub fn run_with(args: &[String], stdin: &mut dyn Read, verbose: bool) -> Outcome {
    let argv = std::iter::once("kirbykit".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    let mut ctx = Context {
        stdin,
        stdin_used: false,
        verbose,
    };
    match execute(cli, &mut ctx) {
        Ok((code, stdout)) => Outcome {
            code,
            stdout,
            stderr: String::new(),
        },
        Err(Failure::Input(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

/// [`run_with`] reading standard input and the verbosity variable.
pub fn run(args: &[String]) -> Outcome {
    let verbose = std::env::var(VERBOSE_ENV).is_ok_and(|v| !v.is_empty() && v != "0");
    run_with(args, &mut std::io::stdin().lock(), verbose)
}

//! The `nlca` command line. Exit codes: 0 success, 1 axiom failure or no
//! solution, 2 input error.

use std::io::{Read, Write};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde_json::json;

use super::{lpoly_json, parse, parse_tpoly, presentation_json, render};
use crate::algebra::{Degree, Presentation};
use crate::ansatz::{self, AnsatzError};
use crate::calculus::Engine;
use crate::pbw;
use crate::scalar::{ParamSpace, Scalar};
use crate::verify::{self, Status};

#[derive(Parser, Debug)]
#[command(name = "nlca", version, about = "Lambda-bracket calculus and axiom checks for non-linear Lie conformal algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full axiom suite.
    Check {
        file: String,
        #[arg(long)]
        json: bool,
    },
    /// Lambda-bracket of two expressions.
    Ope {
        file: String,
        a: String,
        b: String,
        /// Normal-order every coefficient.
        #[arg(long)]
        reduce: bool,
        #[arg(long)]
        json: bool,
    },
    /// Normal-order an expression to the PBW basis.
    Reduce {
        file: String,
        expr: String,
        #[arg(long)]
        json: bool,
    },
    /// Ordered monomials of a given conformal weight.
    Basis {
        file: String,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        json: bool,
    },
    /// Weight-space dimensions up to a maximum weight.
    Character {
        file: String,
        #[arg(long = "max-weight")]
        max_weight: String,
        #[arg(long)]
        json: bool,
    },
    /// Solve the unknowns of an ansatz from the Jacobi conditions of the given triples.
    Solve {
        file: String,
        /// Normalization `NAME=VALUE`.
        #[arg(long)]
        pin: String,
        /// Triples `a,b,c;d,e,f`.
        #[arg(long)]
        triples: String,
        #[arg(long)]
        json: bool,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Outcome of a command: exit code after printing.
type Code = i32;

fn input_error(io: &mut Io<'_>, msg: impl std::fmt::Display) -> Code {
    let _ = writeln!(io.err, "error: {msg}");
    2
}

fn read_source(path: &str, stdin: &mut dyn Read) -> Result<String, String> {
    if path == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(|e| format!("reading stdin: {e}"))?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn load(path: &str, stdin: &mut dyn Read, io: &mut Io<'_>) -> Result<Presentation, Code> {
    let text = read_source(path, stdin).map_err(|e| input_error(io, e))?;
    parse(&text).map_err(|ds| {
        for d in ds.0 {
            let _ = writeln!(io.err, "{path}:{d}");
        }
        2
    })
}

/// Validation gate for commands that evaluate brackets.
fn require_valid(pres: &Presentation, io: &mut Io<'_>) -> Result<(), Code> {
    let s = verify::check_validate(pres);
    if s.status == Status::Pass {
        return Ok(());
    }
    for w in &s.witnesses {
        let _ = writeln!(io.err, "error: {}", w.residue);
    }
    Err(2)
}

fn parse_weight(text: &str, io: &mut Io<'_>) -> Result<Degree, Code> {
    Degree::from_str(text.trim()).map_err(|_| input_error(io, format!("bad weight `{text}`")))
}

fn print_json(io: &mut Io<'_>, v: &serde_json::Value) {
    let _ = writeln!(io.out, "{}", serde_json::to_string_pretty(v).expect("json"));
}

/// Runs the CLI on `args` (including the program name) with explicit streams.
pub fn run(args: &[String], stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> Code {
    let mut io = Io { out, err };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(io.err, "{}", e.render()) } else { write!(io.out, "{}", e.render()) };
            return code;
        }
    };
    match dispatch(cli.command, stdin, &mut io) {
        Ok(c) | Err(c) => c,
    }
}

fn dispatch(cmd: Command, stdin: &mut dyn Read, io: &mut Io<'_>) -> Result<Code, Code> {
    match cmd {
        Command::Check { file, json } => {
            let pres = load(&file, stdin, io)?;
            let report = verify::run_all(&pres);
            if json {
                print_json(io, &report.to_json());
            } else {
                let _ = write!(io.out, "{}", report.render_text());
            }
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Ope { file, a, b, reduce, json } => {
            let pres = load(&file, stdin, io)?;
            require_valid(&pres, io)?;
            let x = parse_tpoly(&pres, &a).map_err(|d| input_error(io, format!("A: {d}")))?;
            let y = parse_tpoly(&pres, &b).map_err(|d| input_error(io, format!("B: {d}")))?;
            let engine = Engine::new(&pres);
            let mut r = engine.pbracket(&x, &y).map_err(|e| input_error(io, e))?;
            if reduce {
                r = verify::reduce_coefficients(&engine, &r).map_err(|e| input_error(io, e))?;
            }
            if json {
                print_json(io, &json!({ "value": pres.render_lpoly(&r), "terms": lpoly_json(&pres, &r) }));
            } else {
                let _ = writeln!(io.out, "{}", pres.render_lpoly(&r));
            }
            Ok(0)
        }
        Command::Reduce { file, expr, json } => {
            let pres = load(&file, stdin, io)?;
            require_valid(&pres, io)?;
            let x = parse_tpoly(&pres, &expr).map_err(|d| input_error(io, d))?;
            let engine = Engine::new(&pres);
            let r = pbw::normal_order(&engine, &x).map_err(|e| input_error(io, e))?;
            if json {
                let terms: Vec<_> = r
                    .terms()
                    .map(|(m, s)| json!({ "monomial": pres.render_mono(m), "coeff": s.to_string() }))
                    .collect();
                print_json(io, &json!({ "value": pres.render_tpoly(&r), "terms": terms }));
            } else {
                let _ = writeln!(io.out, "{}", pres.render_tpoly(&r));
            }
            Ok(0)
        }
        Command::Basis { file, weight, json } => {
            let pres = load(&file, stdin, io)?;
            let w = parse_weight(&weight, io)?;
            let basis = pbw::enumerate_basis(&pres, w).map_err(|e| input_error(io, e))?;
            let rendered: Vec<String> = basis.iter().map(|m| pres.render_mono(m)).collect();
            if json {
                print_json(io, &json!({ "weight": w.to_string(), "basis": rendered }));
            } else {
                for m in rendered {
                    let _ = writeln!(io.out, "{m}");
                }
            }
            Ok(0)
        }
        Command::Character { file, max_weight, json } => {
            let pres = load(&file, stdin, io)?;
            let w = parse_weight(&max_weight, io)?;
            let table = pbw::character(&pres, w).map_err(|e| input_error(io, e))?;
            if json {
                // a list, so weights stay in numeric order
                let rows: Vec<_> = table.iter().map(|(w, n)| json!({ "weight": w.to_string(), "dimension": n })).collect();
                print_json(io, &json!({ "character": rows }));
            } else {
                let _ = writeln!(io.out, "{}", pbw::render_character(&table));
            }
            Ok(0)
        }
        Command::Solve { file, pin, triples, json } => {
            let pres = load(&file, stdin, io)?;
            let (name, value) = pin.split_once('=').ok_or_else(|| input_error(io, "--pin expects NAME=VALUE"))?;
            let space = ParamSpace::new(pres.params().iter().cloned());
            let value = Scalar::parse(value.trim(), &space).map_err(|e| input_error(io, e))?;
            let triples = ansatz::parse_triples(&pres, &triples).map_err(|e| input_error(io, e))?;
            let sys = ansatz::extract_system(&pres, &triples).map_err(|e| input_error(io, e))?;
            match ansatz::solve_and_substitute(&pres, &sys, (name.trim(), &value)) {
                Ok(solved) => {
                    if json {
                        let values: serde_json::Map<String, serde_json::Value> =
                            solved.values.iter().map(|(k, v)| (k.clone(), json!(v.to_string()))).collect();
                        print_json(
                            io,
                            &json!({
                                "equations": sys.rows.len(),
                                "values": values,
                                "presentation": presentation_json(&solved.presentation),
                                "report": solved.report.to_json(),
                            }),
                        );
                    } else {
                        let _ = writeln!(io.out, "{} equations", sys.rows.len());
                        for (k, v) in &solved.values {
                            let _ = writeln!(io.out, "{k} = {v}");
                        }
                        let _ = write!(io.out, "\n{}\n{}", render(&solved.presentation), solved.report.render_text());
                    }
                    Ok(if solved.report.passed() { 0 } else { 1 })
                }
                Err(
                    e @ (AnsatzError::EmptySolutionSpace
                    | AnsatzError::Annihilated
                    | AnsatzError::MultiDimensional { .. }),
                ) => {
                    let _ = writeln!(io.err, "{e}");
                    Ok(1)
                }
                Err(e) => Err(input_error(io, e)),
            }
        }
    }
}

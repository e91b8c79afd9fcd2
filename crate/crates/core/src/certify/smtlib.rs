//! SMT-LIB 2 export of proof obligations, for checking with external
//! QF_NRA solvers.
//!
//! Each obligation becomes one file asserting the region constraints plus
//! the negated condition; `unsat` from a solver certifies the condition.
//! All assertions are pure real arithmetic: conjugate-flattening targets
//! expand with every imaginary unit cancelled.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::obligation::ProofObligation;
use super::real::{RealExpandError, RealPoly};

#[derive(Debug, Error)]
pub enum SmtError {
    #[error(transparent)]
    Expand(#[from] RealExpandError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("no obligations to export")]
    Empty,
}

/// Deterministic file stem for an obligation, derived from its condition id.
pub fn file_stem(ob: &ProofObligation) -> String {
    let id = ob.id();
    let mut stem = String::with_capacity(id.len());
    for ch in id.chars() {
        if ch.is_ascii_alphanumeric() {
            stem.push(ch);
        } else if !stem.ends_with('_') {
            stem.push('_');
        }
    }
    stem.trim_matches('_').to_string()
}

/// Renders one obligation as an SMT-LIB 2 script.
pub fn obligation_to_smtlib(ob: &ProofObligation) -> Result<String, SmtError> {
    let dim = ob.region.dim();
    let mut names = Vec::with_capacity(2 * dim);
    for j in 0..dim {
        names.push(format!("re_{j}"));
    }
    for j in 0..dim {
        names.push(format!("im_{j}"));
    }

    let mut out = String::new();
    let _ = writeln!(out, "; obligation {}", ob.id());
    let _ = writeln!(out, "(set-logic QF_NRA)");
    for name in &names {
        let _ = writeln!(out, "(declare-const {name} Real)");
    }
    for h in ob.region.equalities() {
        let poly = RealPoly::from_cpoly(h)?;
        let _ = writeln!(out, "(assert (= {} 0.0))", smt_expr(&poly, &names));
    }
    for g in ob.region.inequalities() {
        let poly = RealPoly::from_cpoly(g)?;
        let _ = writeln!(out, "(assert (>= {} 0.0))", smt_expr(&poly, &names));
    }
    let target = RealPoly::from_cpoly(&ob.target)?;
    let _ = writeln!(out, "(assert (> {} 0.0))", smt_expr(&target, &names));
    let _ = writeln!(out, "(check-sat)");
    let _ = writeln!(out, "(get-model)");
    Ok(out)
}

/// Writes one `.smt2` file per obligation into `dir`; returns the paths.
/// Output is a pure function of the obligations, so reruns are
/// byte-identical.
pub fn emit_smtlib(obs: &[ProofObligation], dir: &Path) -> Result<Vec<PathBuf>, SmtError> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(obs.len());
    for ob in obs {
        let path = dir.join(format!("{}.smt2", file_stem(ob)));
        fs::write(&path, obligation_to_smtlib(ob)?)?;
        paths.push(path);
    }
    Ok(paths)
}

fn smt_expr(poly: &RealPoly, names: &[String]) -> String {
    if poly.is_zero() {
        return "0.0".to_string();
    }
    let terms: Vec<String> = poly
        .terms()
        .map(|(mono, coeff)| {
            let mut factors = Vec::new();
            for (j, &e) in mono.iter().enumerate() {
                for _ in 0..e {
                    factors.push(names[j].clone());
                }
            }
            if factors.is_empty() {
                smt_decimal(*coeff)
            } else if (*coeff - 1.0).abs() < f64::EPSILON && factors.len() == 1 {
                factors.pop().expect("one factor")
            } else {
                format!("(* {} {})", smt_decimal(*coeff), factors.join(" "))
            }
        })
        .collect();
    if terms.len() == 1 {
        terms.into_iter().next().expect("one term")
    } else {
        format!("(+ {})", terms.join(" "))
    }
}

/// Plain decimal literal (never scientific notation); negatives use the
/// unary minus term form.
fn smt_decimal(v: f64) -> String {
    if v < 0.0 {
        return format!("(- {})", smt_decimal(-v));
    }
    let mut precision = 17usize;
    if v > 0.0 && v < 1.0 {
        precision += (-v.log10()).ceil() as usize;
    }
    let mut s = format!("{v:.precision$}");
    if let Some(dot) = s.find('.') {
        let trimmed = s.trim_end_matches('0');
        s = if trimmed.ends_with('.') {
            format!("{}0", trimmed)
        } else {
            trimmed.to_string()
        };
        let _ = dot;
    } else {
        s.push_str(".0");
    }
    debug_assert!(
        (s.parse::<f64>().expect("decimal parses") - v).abs() <= v.abs() * 1e-15,
        "decimal formatting lost precision for {v}"
    );
    s
}

/// Minimal SMT-LIB 2 validator: tokenizes, checks parenthesis balance,
/// command structure, sort usage, and that every symbol in an assertion is
/// either declared, a core operator, or a decimal literal.
pub fn validate_smtlib(text: &str) -> Result<(), String> {
    let tokens = tokenize(text)?;
    let mut pos = 0usize;
    let mut declared: Vec<String> = Vec::new();
    while pos < tokens.len() {
        let sexpr = parse_sexpr(&tokens, &mut pos)?;
        validate_command(&sexpr, &mut declared)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
enum Sexpr {
    Atom(String),
    List(Vec<Sexpr>),
}

fn tokenize(text: &str) -> Result<Vec<String>, String> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            '(' | ')' => {
                tokens.push(ch.to_string());
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                }
                tokens.push(atom);
            }
        }
    }
    Ok(tokens)
}

fn parse_sexpr(tokens: &[String], pos: &mut usize) -> Result<Sexpr, String> {
    match tokens.get(*pos) {
        None => Err("unexpected end of input".to_string()),
        Some(t) if t == "(" => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => return Err("unbalanced parenthesis".to_string()),
                    Some(t) if t == ")" => {
                        *pos += 1;
                        return Ok(Sexpr::List(items));
                    }
                    _ => items.push(parse_sexpr(tokens, pos)?),
                }
            }
        }
        Some(t) if t == ")" => Err("unexpected closing parenthesis".to_string()),
        Some(t) => {
            *pos += 1;
            Ok(Sexpr::Atom(t.clone()))
        }
    }
}

fn validate_command(sexpr: &Sexpr, declared: &mut Vec<String>) -> Result<(), String> {
    let items = match sexpr {
        Sexpr::List(items) if !items.is_empty() => items,
        _ => return Err(format!("top-level form is not a command: {sexpr:?}")),
    };
    let head = match &items[0] {
        Sexpr::Atom(a) => a.as_str(),
        _ => return Err("command head is not a symbol".to_string()),
    };
    match head {
        "set-logic" => {
            if items.len() != 2 {
                return Err("set-logic takes one argument".to_string());
            }
            Ok(())
        }
        "set-info" => Ok(()),
        "declare-const" => match (&items.get(1), &items.get(2)) {
            (Some(Sexpr::Atom(name)), Some(Sexpr::Atom(sort))) if sort == "Real" => {
                declared.push(name.clone());
                Ok(())
            }
            _ => Err("declare-const expects a name and sort Real".to_string()),
        },
        "assert" => {
            if items.len() != 2 {
                return Err("assert takes one term".to_string());
            }
            validate_term(&items[1], declared)
        }
        "check-sat" | "get-model" | "exit" => Ok(()),
        other => Err(format!("unknown command {other}")),
    }
}

fn validate_term(term: &Sexpr, declared: &[String]) -> Result<(), String> {
    match term {
        Sexpr::Atom(a) => {
            if is_decimal(a) || declared.iter().any(|d| d == a) {
                Ok(())
            } else {
                Err(format!("undeclared symbol or bad literal: {a}"))
            }
        }
        Sexpr::List(items) => {
            let head = match items.first() {
                Some(Sexpr::Atom(a)) => a.as_str(),
                _ => return Err("application head is not a symbol".to_string()),
            };
            let arity_ok = match head {
                "+" | "*" => items.len() >= 3,
                "-" => items.len() == 2 || items.len() == 3,
                "/" | ">" | "<" | ">=" | "<=" | "=" => items.len() == 3,
                "and" | "or" => items.len() >= 2,
                "not" => items.len() == 2,
                other => return Err(format!("unsupported operator {other}")),
            };
            if !arity_ok {
                return Err(format!("bad arity for {head}"));
            }
            for item in &items[1..] {
                validate_term(item, declared)?;
            }
            Ok(())
        }
    }
}

fn is_decimal(a: &str) -> bool {
    // numeral or numeral.numeral, per the SMT-LIB lexicon.
    let parts: Vec<&str> = a.split('.').collect();
    match parts.as_slice() {
        [int] => !int.is_empty() && int.chars().all(|c| c.is_ascii_digit()),
        [int, frac] => {
            !int.is_empty()
                && !frac.is_empty()
                && int.chars().all(|c| c.is_ascii_digit())
                && frac.chars().all(|c| c.is_ascii_digit())
        }
        _ => false,
    }
}

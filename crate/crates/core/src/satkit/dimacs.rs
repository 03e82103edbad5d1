use std::io::{self, Write};

use crate::error::{Error, Result};

use super::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ParseOptions {
    /// Reject files whose clause count or variable range disagrees with the
    /// `p cnf` header.
    pub strict: bool,
}

impl ParseOptions {
    pub fn strict() -> Self {
        ParseOptions { strict: true }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Header {
    Cnf { vars: u32, clauses: usize },
    Incremental,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pending {
    Clause,
    Cube,
}

/// Parse DIMACS CNF or `p inccnf` text. Cubes from `a ... 0` lines are kept
/// in order on the returned formula.
pub fn parse_dimacs(input: &[u8], opts: ParseOptions) -> Result<Formula> {
    let mut formula = Formula::default();
    let mut header: Option<Header> = None;
    let mut current: Vec<i32> = Vec::new();
    let mut pending: Option<Pending> = None;
    let mut last_line = 0;

    for (idx, raw) in input.split(|&b| b == b'\n').enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = std::str::from_utf8(raw)
            .map_err(|_| Error::parse(lineno, "line is not valid UTF-8"))?
            .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                let fields: Vec<&str> = rest.split_whitespace().collect();
                match fields.as_slice() {
                    ["keller", n, s] => {
                        if let (Ok(n), Ok(s)) = (n.parse(), s.parse()) {
                            formula.set_keller_instance(n, s);
                        }
                    }
                    ["vars", v] if header.is_none() => {
                        if let Ok(v) = v.parse::<u32>() {
                            formula.num_vars = formula.num_vars.max(v);
                        }
                    }
                    _ => {}
                }
                continue;
            }
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(Error::parse(lineno, "duplicate problem line"));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            header = Some(match fields.as_slice() {
                ["p", "cnf", v, c] => {
                    let vars = v
                        .parse()
                        .map_err(|_| Error::parse(lineno, format!("bad variable count `{v}`")))?;
                    let clauses = c
                        .parse()
                        .map_err(|_| Error::parse(lineno, format!("bad clause count `{c}`")))?;
                    formula.num_vars = vars;
                    Header::Cnf { vars, clauses }
                }
                ["p", "inccnf"] => Header::Incremental,
                _ => return Err(Error::parse(lineno, format!("malformed problem line `{line}`"))),
            });
            continue;
        }
        if header.is_none() {
            return Err(Error::parse(lineno, "clause before problem line"));
        }
        let mut tokens = line.split_whitespace().peekable();
        if tokens.peek() == Some(&"a") {
            if pending == Some(Pending::Clause) && !current.is_empty() {
                return Err(Error::parse(lineno, "cube starts inside an unterminated clause"));
            }
            if header != Some(Header::Incremental) && opts.strict {
                return Err(Error::parse(lineno, "cube line in a plain CNF file"));
            }
            tokens.next();
            pending = Some(Pending::Cube);
        }
        for tok in tokens {
            let lit: i64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad literal `{tok}`")))?;
            if lit.unsigned_abs() > i32::MAX as u64 {
                return Err(Error::parse(lineno, format!("literal {lit} out of range")));
            }
            let lit = lit as i32;
            if lit == 0 {
                match pending.take().unwrap_or(Pending::Clause) {
                    Pending::Clause => formula.push_clause(std::mem::take(&mut current)),
                    Pending::Cube => formula.push_cube(std::mem::take(&mut current)),
                }
                continue;
            }
            if opts.strict {
                if let Some(Header::Cnf { vars, .. }) = header {
                    if lit.unsigned_abs() > vars {
                        return Err(Error::parse(
                            lineno,
                            format!("literal {lit} exceeds declared {vars} variables"),
                        ));
                    }
                }
            }
            if pending.is_none() {
                pending = Some(Pending::Clause);
            }
            current.push(lit);
        }
    }

    if !current.is_empty() {
        if opts.strict {
            return Err(Error::parse(last_line, "last clause is not terminated by 0"));
        }
        match pending.unwrap_or(Pending::Clause) {
            Pending::Clause => formula.push_clause(current),
            Pending::Cube => formula.push_cube(current),
        }
    }
    match header {
        None => return Err(Error::parse(last_line, "missing problem line")),
        Some(Header::Cnf { vars, clauses }) if opts.strict => {
            if formula.clauses.len() != clauses {
                return Err(Error::parse(
                    last_line,
                    format!(
                        "header declares {clauses} clauses but {} were read",
                        formula.clauses.len()
                    ),
                ));
            }
            formula.num_vars = vars;
        }
        _ => {}
    }
    Ok(formula)
}

/// One `lit ... 0` line per clause.
pub fn write_clause_lines<W: Write>(out: &mut W, clauses: &[Vec<i32>]) -> io::Result<()> {
    let mut line = String::new();
    for c in clauses {
        line.clear();
        for l in c {
            line.push_str(&l.to_string());
            line.push(' ');
        }
        line.push_str("0\n");
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn write_dimacs<W: Write>(formula: &Formula, out: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    if let Some((n, s)) = formula.keller_instance() {
        writeln!(out, "c keller {n} {s}")?;
    }
    writeln!(out, "p cnf {} {}", formula.num_vars(), formula.clauses().len())?;
    write_clause_lines(&mut out, formula.clauses())?;
    out.flush()
}

/// iCNF: `p inccnf`, the clauses, then one `a ... 0` line per cube.
pub fn write_icnf<W: Write>(formula: &Formula, cubes: &[Vec<i32>], out: W) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    if let Some((n, s)) = formula.keller_instance() {
        writeln!(out, "c keller {n} {s}")?;
    }
    writeln!(out, "c vars {}", formula.num_vars())?;
    writeln!(out, "p inccnf")?;
    write_clause_lines(&mut out, formula.clauses())?;
    let mut line = String::new();
    for cube in cubes {
        line.clear();
        line.push_str("a ");
        for l in cube {
            line.push_str(&l.to_string());
            line.push(' ');
        }
        line.push_str("0\n");
        out.write_all(line.as_bytes())?;
    }
    out.flush()
}

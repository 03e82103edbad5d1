//! DRAT proof streams: the sink trait the solver writes to, text and binary
//! writers, and a reader that accepts either encoding.

use std::io::{self, Write};

use crate::dratcheck::{Proof, ProofStep, StepKind};
use crate::error::{Error, Result};

/// Receives clause additions and deletions as they happen.
pub trait ProofSink {
    fn add_clause(&mut self, clause: &[i32]);
    fn delete_clause(&mut self, clause: &[i32]);
}

/// Discards everything.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullProof;

impl ProofSink for NullProof {
    fn add_clause(&mut self, _: &[i32]) {}
    fn delete_clause(&mut self, _: &[i32]) {}
}

impl ProofSink for Proof {
    fn add_clause(&mut self, clause: &[i32]) {
        self.steps.push(ProofStep::add(clause.to_vec()));
    }

    fn delete_clause(&mut self, clause: &[i32]) {
        self.steps.push(ProofStep::delete(clause.to_vec()));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProofFormat {
    #[default]
    Text,
    Binary,
}

impl std::str::FromStr for ProofFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" | "drat" => Ok(ProofFormat::Text),
            "binary" | "bin" => Ok(ProofFormat::Binary),
            _ => Err(Error::Input(format!("unknown proof format `{s}`"))),
        }
    }
}

fn text_line(buf: &mut String, prefix: &str, clause: &[i32]) {
    buf.clear();
    buf.push_str(prefix);
    for l in clause {
        buf.push_str(&l.to_string());
        buf.push(' ');
    }
    buf.push_str("0\n");
}

fn binary_record(buf: &mut Vec<u8>, tag: u8, clause: &[i32]) {
    buf.clear();
    buf.push(tag);
    for &l in clause {
        let mut u = 2 * l.unsigned_abs() + (l < 0) as u32;
        while u >= 0x80 {
            buf.push((u & 0x7f) as u8 | 0x80);
            u >>= 7;
        }
        buf.push(u as u8);
    }
    buf.push(0);
}

/// Streams text DRAT. The first I/O error is kept and reported by `finish`.
pub struct TextDratWriter<W: Write> {
    out: io::BufWriter<W>,
    buf: String,
    error: Option<io::Error>,
}

impl<W: Write> TextDratWriter<W> {
    pub fn new(out: W) -> Self {
        TextDratWriter {
            out: io::BufWriter::new(out),
            buf: String::new(),
            error: None,
        }
    }

    fn emit(&mut self, prefix: &str, clause: &[i32]) {
        if self.error.is_some() {
            return;
        }
        text_line(&mut self.buf, prefix, clause);
        if let Err(e) = self.out.write_all(self.buf.as_bytes()) {
            self.error = Some(e);
        }
    }

    pub fn finish(mut self) -> io::Result<()> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()
    }
}

impl<W: Write> ProofSink for TextDratWriter<W> {
    fn add_clause(&mut self, clause: &[i32]) {
        self.emit("", clause);
    }

    fn delete_clause(&mut self, clause: &[i32]) {
        self.emit("d ", clause);
    }
}

/// Streams binary DRAT.
pub struct BinaryDratWriter<W: Write> {
    out: io::BufWriter<W>,
    buf: Vec<u8>,
    error: Option<io::Error>,
}

impl<W: Write> BinaryDratWriter<W> {
    pub fn new(out: W) -> Self {
        BinaryDratWriter {
            out: io::BufWriter::new(out),
            buf: Vec::new(),
            error: None,
        }
    }

    fn emit(&mut self, tag: u8, clause: &[i32]) {
        if self.error.is_some() {
            return;
        }
        binary_record(&mut self.buf, tag, clause);
        if let Err(e) = self.out.write_all(&self.buf) {
            self.error = Some(e);
        }
    }

    pub fn finish(mut self) -> io::Result<()> {
        if let Some(e) = self.error.take() {
            return Err(e);
        }
        self.out.flush()
    }
}

impl<W: Write> ProofSink for BinaryDratWriter<W> {
    fn add_clause(&mut self, clause: &[i32]) {
        self.emit(b'a', clause);
    }

    fn delete_clause(&mut self, clause: &[i32]) {
        self.emit(b'd', clause);
    }
}

pub fn write_text_drat<W: Write>(proof: &Proof, out: W) -> io::Result<()> {
    let mut w = TextDratWriter::new(out);
    replay(proof, &mut w);
    w.finish()
}

pub fn write_binary_drat<W: Write>(proof: &Proof, out: W) -> io::Result<()> {
    let mut w = BinaryDratWriter::new(out);
    replay(proof, &mut w);
    w.finish()
}

fn replay<S: ProofSink>(proof: &Proof, sink: &mut S) {
    for step in &proof.steps {
        match step.kind {
            StepKind::Add => sink.add_clause(&step.clause),
            StepKind::Delete => sink.delete_clause(&step.clause),
        }
    }
}

/// Read a DRAT proof. Input containing a NUL byte is treated as binary.
pub fn parse_proof(input: &[u8]) -> Result<Proof> {
    if input.contains(&0) {
        parse_binary(input)
    } else {
        parse_text(input)
    }
}

fn parse_text(input: &[u8]) -> Result<Proof> {
    let text = std::str::from_utf8(input).map_err(|_| Error::parse(0, "proof is not valid UTF-8"))?;
    let mut proof = Proof::default();
    let mut current = Vec::new();
    let mut deleting = false;
    let mut last_line = 0;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_line = lineno;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        for tok in line.split_whitespace() {
            if tok == "d" {
                if !current.is_empty() {
                    return Err(Error::parse(lineno, "deletion inside an unterminated clause"));
                }
                deleting = true;
                continue;
            }
            let lit: i32 = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad literal `{tok}`")))?;
            if lit == 0 {
                let clause = std::mem::take(&mut current);
                proof.steps.push(if deleting {
                    ProofStep::delete(clause)
                } else {
                    ProofStep::add(clause)
                });
                deleting = false;
            } else {
                current.push(lit);
            }
        }
    }
    if !current.is_empty() || deleting {
        return Err(Error::parse(last_line, "last proof line is not terminated by 0"));
    }
    Ok(proof)
}

fn parse_binary(input: &[u8]) -> Result<Proof> {
    let mut proof = Proof::default();
    let mut pos = 0;
    while pos < input.len() {
        let tag = input[pos];
        let kind = match tag {
            b'a' => StepKind::Add,
            b'd' => StepKind::Delete,
            _ => {
                return Err(Error::parse(
                    pos,
                    format!("unexpected byte {tag:#04x} at offset {pos} in binary proof"),
                ))
            }
        };
        pos += 1;
        let mut clause = Vec::new();
        loop {
            let mut u: u64 = 0;
            let mut shift = 0;
            loop {
                let b = *input
                    .get(pos)
                    .ok_or_else(|| Error::parse(pos, "binary proof ends inside a clause"))?;
                pos += 1;
                u |= ((b & 0x7f) as u64) << shift;
                if b & 0x80 == 0 {
                    break;
                }
                shift += 7;
                if shift > 35 {
                    return Err(Error::parse(pos, "literal encoding too long"));
                }
            }
            if u == 0 {
                break;
            }
            let var = u >> 1;
            if var == 0 || var > i32::MAX as u64 {
                return Err(Error::parse(pos, format!("bad literal code {u}")));
            }
            let var = var as i32;
            clause.push(if u & 1 == 1 { -var } else { var });
        }
        proof.steps.push(ProofStep { kind, clause });
    }
    Ok(proof)
}

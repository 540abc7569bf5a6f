use super::{CircuitIr, Measure, Step};
use crate::channels::{GateKind, NoiseKind};
use crate::error::{Error, ParseErrorKind, Result};
use crate::linalg::MAX_QUBITS;

/// Whitespace-separated word with its 1-based column.
struct Word<'a> {
    text: &'a str,
    column: usize,
}

fn words(line: &str) -> Vec<Word<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (col, ch) in body.chars().enumerate() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, col));
            }
        } else if start.is_none() {
            start = Some(col);
        }
    }
    if let Some(s) = start {
        out.push((s, body.chars().count()));
    }
    out.into_iter()
        .map(|(s, e)| {
            let begin = body.char_indices().nth(s).map(|(b, _)| b).unwrap_or(body.len());
            let end = body.char_indices().nth(e).map(|(b, _)| b).unwrap_or(body.len());
            Word {
                text: &body[begin..end],
                column: s + 1,
            }
        })
        .collect()
}

struct LineCtx {
    line: usize,
    end_column: usize,
}

impl LineCtx {
    fn err(&self, kind: ParseErrorKind, column: usize, message: impl Into<String>) -> Error {
        Error::parse_kind(kind, self.line, column, message)
    }

    fn index(&self, w: &Word<'_>, n_qubits: usize) -> Result<usize> {
        let q: usize = w.text.parse().map_err(|_| {
            self.err(
                ParseErrorKind::Syntax,
                w.column,
                format!("expected a qubit index, found `{}`", w.text),
            )
        })?;
        if q >= n_qubits {
            return Err(self.err(
                ParseErrorKind::IndexOutOfRange,
                w.column,
                format!("qubit {q} out of range for {n_qubits} qubit(s)"),
            ));
        }
        Ok(q)
    }

    fn indices(&self, ws: &[Word<'_>], n_qubits: usize) -> Result<Vec<usize>> {
        let mut out: Vec<usize> = Vec::with_capacity(ws.len());
        for w in ws {
            let q = self.index(w, n_qubits)?;
            if out.contains(&q) {
                return Err(self.err(
                    ParseErrorKind::RepeatedTarget,
                    w.column,
                    format!("qubit {q} listed twice"),
                ));
            }
            out.push(q);
        }
        Ok(out)
    }
}

/// Parses circuit text into a validated [`CircuitIr`]. Errors carry the line
/// and column of the offending token.
pub fn parse_circuit(text: &str) -> Result<CircuitIr> {
    let mut n_qubits: Option<usize> = None;
    let mut steps: Vec<Step> = Vec::new();
    let mut measured_at: Option<usize> = None;

    for (i, raw) in text.lines().enumerate() {
        let ctx = LineCtx {
            line: i + 1,
            end_column: raw.split('#').next().unwrap_or("").chars().count() + 1,
        };
        let ws = words(raw);
        let Some(head) = ws.first() else { continue };

        let Some(n) = n_qubits else {
            if head.text != "qubits" {
                return Err(ctx.err(ParseErrorKind::Syntax, head.column, "expected `qubits <n>` first"));
            }
            if ws.len() != 2 {
                let col = ws.get(2).map(|w| w.column).unwrap_or(ctx.end_column);
                return Err(ctx.err(ParseErrorKind::Syntax, col, "expected `qubits <n>`"));
            }
            let n: usize = ws[1].text.parse().map_err(|_| {
                ctx.err(ParseErrorKind::Syntax, ws[1].column, format!("invalid qubit count `{}`", ws[1].text))
            })?;
            if n == 0 || n > MAX_QUBITS {
                return Err(ctx.err(
                    ParseErrorKind::BadValue,
                    ws[1].column,
                    format!("qubit count must be between 1 and {MAX_QUBITS}"),
                ));
            }
            n_qubits = Some(n);
            continue;
        };

        if let Some(line) = measured_at {
            return Err(ctx.err(
                ParseErrorKind::MeasureNotLast,
                head.column,
                format!("statement after `measure` on line {line}"),
            ));
        }

        match head.text {
            "gate" => {
                let name = ws
                    .get(1)
                    .ok_or_else(|| ctx.err(ParseErrorKind::Syntax, ctx.end_column, "missing gate name"))?;
                let gate = GateKind::from_dsl_name(name.text).ok_or_else(|| {
                    ctx.err(ParseErrorKind::UnknownGate, name.column, format!("unknown gate `{}`", name.text))
                })?;
                let target_words = &ws[2..];
                if target_words.len() != gate.arity() {
                    let col = target_words
                        .get(gate.arity())
                        .map(|w| w.column)
                        .unwrap_or(ctx.end_column);
                    return Err(ctx.err(
                        ParseErrorKind::Arity,
                        col,
                        format!(
                            "gate `{}` takes {} target(s), found {}",
                            gate.dsl_name(),
                            gate.arity(),
                            target_words.len()
                        ),
                    ));
                }
                let targets = ctx.indices(target_words, n)?;
                steps.push(Step::Gate { gate, targets });
            }
            "noise" => {
                if ws.len() != 4 {
                    let col = ws.get(4).map(|w| w.column).unwrap_or(ctx.end_column);
                    return Err(ctx.err(ParseErrorKind::Syntax, col, "expected `noise <kind> <p> <target>`"));
                }
                let kind: NoiseKind = ws[1]
                    .text
                    .parse()
                    .map_err(|m: String| ctx.err(ParseErrorKind::Syntax, ws[1].column, m))?;
                let p: f64 = ws[2].text.parse().map_err(|_| {
                    ctx.err(ParseErrorKind::Syntax, ws[2].column, format!("invalid probability `{}`", ws[2].text))
                })?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(ctx.err(
                        ParseErrorKind::BadValue,
                        ws[2].column,
                        format!("probability {p} outside [0, 1]"),
                    ));
                }
                let target = ctx.index(&ws[3], n)?;
                steps.push(Step::Noise { kind, p, target });
            }
            "measure" => {
                let rest = &ws[1..];
                let m = match rest {
                    [] => return Err(ctx.err(ParseErrorKind::Syntax, ctx.end_column, "expected `all` or qubit indices")),
                    [w] if w.text == "all" => Measure::All,
                    _ => Measure::Qubits(ctx.indices(rest, n)?),
                };
                steps.push(Step::Measure(m));
                measured_at = Some(ctx.line);
            }
            "qubits" => {
                return Err(ctx.err(ParseErrorKind::Syntax, head.column, "`qubits` declared twice"));
            }
            other => {
                return Err(ctx.err(ParseErrorKind::Syntax, head.column, format!("unknown statement `{other}`")));
            }
        }
    }

    let n = n_qubits.ok_or_else(|| Error::parse(1, 1, "missing `qubits <n>` declaration"))?;
    CircuitIr::new(n, steps)
}

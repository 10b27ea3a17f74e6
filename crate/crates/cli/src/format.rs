//! Channel file parsing and canonical writing.
//!
//! Classical channels:
//!
//! ```text
//! capacity-channel v1
//! # comment
//! units bits
//! inputs a b
//! outputs low high
//! row 0.9 0.1
//! row 0.1 0.9
//! ```
//!
//! Classical-quantum channels hold one `state` block per input, each row
//! listing complex entries as `[re, im]` pairs:
//!
//! ```text
//! capacity-cq-channel v1
//! state
//! row [0.75, 0] [0, 0]
//! row [0, 0] [0.25, 0]
//! state
//! ...
//! ```
//!
//! Malformed content is rejected with line/position diagnostics.

use chancap::{Channel64, CqChannel64, DensityMatrix64, HermitianMatrix64};
use nalgebra::{Complex, DMatrix};

pub const CLASSICAL_HEADER: &str = "capacity-channel v1";
pub const CQ_HEADER: &str = "capacity-cq-channel v1";

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Units preference a channel file may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnitsPref {
    #[default]
    Nats,
    Bits,
}

#[derive(Debug)]
pub enum ParsedChannel {
    Classical(Channel64),
    Cq(CqChannel64),
}

#[derive(Debug)]
pub struct ChannelFile {
    pub channel: ParsedChannel,
    pub units: Option<UnitsPref>,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn parse_channel_file(text: &str) -> Result<ChannelFile, ParseError> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((i, raw)) => {
                let l = strip_comment(raw).trim();
                if !l.is_empty() {
                    break (i + 1, l.to_string());
                }
            }
            None => return Err(err(1, "empty file; expected a format header")),
        }
    };
    match header.1.as_str() {
        CLASSICAL_HEADER => parse_classical(lines, text),
        CQ_HEADER => parse_cq(lines),
        other => Err(err(
            header.0,
            format!("unknown format header '{other}'; expected '{CLASSICAL_HEADER}' or '{CQ_HEADER}'"),
        )),
    }
}

fn parse_units(line_no: usize, value: &str) -> Result<UnitsPref, ParseError> {
    match value {
        "nats" => Ok(UnitsPref::Nats),
        "bits" => Ok(UnitsPref::Bits),
        other => Err(err(line_no, format!("unknown units '{other}'"))),
    }
}

fn parse_classical(
    lines: std::iter::Enumerate<std::str::Lines<'_>>,
    _text: &str,
) -> Result<ChannelFile, ParseError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut row_lines: Vec<usize> = Vec::new();
    let mut units = None;
    let mut inputs: Option<Vec<String>> = None;
    let mut outputs: Option<Vec<String>> = None;
    for (i, raw) in lines {
        let line_no = i + 1;
        let l = strip_comment(raw).trim();
        if l.is_empty() {
            continue;
        }
        let (keyword, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match keyword {
            "units" => units = Some(parse_units(line_no, rest.trim())?),
            "inputs" => inputs = Some(rest.split_whitespace().map(String::from).collect()),
            "outputs" => outputs = Some(rest.split_whitespace().map(String::from).collect()),
            "row" => {
                let mut row = Vec::new();
                for (pos, tok) in rest.split_whitespace().enumerate() {
                    let v: f64 = tok.parse().map_err(|_| {
                        err(line_no, format!("entry {} ('{tok}') is not a number", pos + 1))
                    })?;
                    row.push(v);
                }
                if row.is_empty() {
                    return Err(err(line_no, "row has no entries"));
                }
                rows.push(row);
                row_lines.push(line_no);
            }
            other => return Err(err(line_no, format!("unknown keyword '{other}'"))),
        }
    }
    if rows.is_empty() {
        return Err(err(1, "no rows found"));
    }
    let width = rows[0].len();
    for (k, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(err(
                row_lines[k],
                format!("row has {} entries, expected {width}", row.len()),
            ));
        }
    }
    let channel = Channel64::from_rows(rows)
        .and_then(|c| c.with_labels(inputs, outputs))
        .map_err(|e| err(row_lines[0], e.to_string()))?;
    Ok(ChannelFile {
        channel: ParsedChannel::Classical(channel),
        units,
    })
}

/// Splits a cq `row` payload into `[re, im]` tokens, tolerating spaces
/// inside the brackets.
fn complex_tokens(line_no: usize, rest: &str) -> Result<Vec<(f64, f64)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = rest.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c != '[' {
            return Err(err(
                line_no,
                format!("expected '[' at position {}, found '{c}'", start + 1),
            ));
        }
        chars.next();
        let mut body = String::new();
        let mut closed = false;
        for (_, c2) in chars.by_ref() {
            if c2 == ']' {
                closed = true;
                break;
            }
            body.push(c2);
        }
        if !closed {
            return Err(err(line_no, "unterminated '[' in complex entry"));
        }
        let parts: Vec<&str> = body.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(err(
                line_no,
                format!("complex entry '[{body}]' must be '[re, im]'"),
            ));
        }
        let re: f64 = parts[0]
            .parse()
            .map_err(|_| err(line_no, format!("'{}' is not a number", parts[0])))?;
        let im: f64 = parts[1]
            .parse()
            .map_err(|_| err(line_no, format!("'{}' is not a number", parts[1])))?;
        out.push((re, im));
    }
    Ok(out)
}

fn parse_cq(
    lines: std::iter::Enumerate<std::str::Lines<'_>>,
) -> Result<ChannelFile, ParseError> {
    let mut units = None;
    let mut states: Vec<Vec<Vec<(f64, f64)>>> = Vec::new();
    let mut state_lines: Vec<usize> = Vec::new();
    for (i, raw) in lines {
        let line_no = i + 1;
        let l = strip_comment(raw).trim();
        if l.is_empty() {
            continue;
        }
        let (keyword, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match keyword {
            "units" => units = Some(parse_units(line_no, rest.trim())?),
            "state" => {
                states.push(Vec::new());
                state_lines.push(line_no);
            }
            "row" => {
                let row = complex_tokens(line_no, rest)?;
                match states.last_mut() {
                    Some(s) => s.push(row),
                    None => return Err(err(line_no, "'row' before any 'state'")),
                }
            }
            other => return Err(err(line_no, format!("unknown keyword '{other}'"))),
        }
    }
    if states.is_empty() {
        return Err(err(1, "no states found"));
    }
    let dim = states[0].len();
    let mut density = Vec::with_capacity(states.len());
    for (k, rows) in states.iter().enumerate() {
        let line = state_lines[k];
        if rows.len() != dim {
            return Err(err(
                line,
                format!("state has {} rows, expected {dim}", rows.len()),
            ));
        }
        for row in rows {
            if row.len() != dim {
                return Err(err(
                    line,
                    format!("state row has {} entries, expected {dim}", row.len()),
                ));
            }
        }
        let m = DMatrix::from_fn(dim, dim, |r, c| Complex::new(rows[r][c].0, rows[r][c].1));
        let h = HermitianMatrix64::new(m).map_err(|e| err(line, format!("state {}: {e}", k + 1)))?;
        let d = DensityMatrix64::new(h).map_err(|e| err(line, format!("state {}: {e}", k + 1)))?;
        density.push(d);
    }
    let cq = CqChannel64::new(density).map_err(|e| err(state_lines[0], e.to_string()))?;
    Ok(ChannelFile {
        channel: ParsedChannel::Cq(cq),
        units,
    })
}

/// Canonical text form of a classical channel (17 significant digits).
/// The binary only reads files today; the writer pins the round-trip
/// contract under test.
#[allow(dead_code)]
pub fn write_classical(channel: &Channel64, units: Option<UnitsPref>) -> String {
    let mut out = String::new();
    out.push_str(CLASSICAL_HEADER);
    out.push('\n');
    if let Some(u) = units {
        out.push_str(match u {
            UnitsPref::Nats => "units nats\n",
            UnitsPref::Bits => "units bits\n",
        });
    }
    if let Some(labels) = channel.input_labels() {
        out.push_str("inputs ");
        out.push_str(&labels.join(" "));
        out.push('\n');
    }
    if let Some(labels) = channel.output_labels() {
        out.push_str("outputs ");
        out.push_str(&labels.join(" "));
        out.push('\n');
    }
    for x in 0..channel.num_inputs() {
        out.push_str("row");
        for v in channel.row(x) {
            out.push_str(&format!(" {v:.16e}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_roundtrip_is_idempotent() {
        let text = "capacity-channel v1\nunits bits\nrow 0.9 0.1\nrow 0.1 0.9\n";
        let parsed = parse_channel_file(text).unwrap();
        let ParsedChannel::Classical(c) = &parsed.channel else {
            panic!("expected classical");
        };
        let canon = write_classical(c, parsed.units);
        let reparsed = parse_channel_file(&canon).unwrap();
        let ParsedChannel::Classical(c2) = &reparsed.channel else {
            panic!("expected classical");
        };
        let canon2 = write_classical(c2, reparsed.units);
        assert_eq!(canon, canon2);
    }

    #[test]
    fn rejects_bad_row_sum_with_line() {
        let text = "capacity-channel v1\nrow 0.5 0.4\n";
        let e = parse_channel_file(text).unwrap_err();
        assert_eq!(e.line, 2);
    }

    #[test]
    fn rejects_ragged_rows() {
        let text = "capacity-channel v1\nrow 0.5 0.5\nrow 1.0\n";
        let e = parse_channel_file(text).unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.message.contains("expected 2"));
    }

    #[test]
    fn rejects_bad_token_position() {
        let text = "capacity-channel v1\nrow 0.5 x\n";
        let e = parse_channel_file(text).unwrap_err();
        assert!(e.message.contains("entry 2"));
    }

    #[test]
    fn parses_cq_states() {
        let text = "capacity-cq-channel v1\n\
            state\nrow [0.75, 0] [0, 0]\nrow [0, 0] [0.25, 0]\n\
            state\nrow [0.5,0] [0,-0.1]\nrow [0,0.1] [0.5,0]\n";
        let parsed = parse_channel_file(text).unwrap();
        let ParsedChannel::Cq(cq) = &parsed.channel else {
            panic!("expected cq");
        };
        assert_eq!(cq.num_inputs(), 2);
        assert_eq!(cq.dim(), 2);
    }

    #[test]
    fn cq_rejects_non_hermitian() {
        let text = "capacity-cq-channel v1\nstate\nrow [0.75, 0] [0.3, 0]\nrow [0, 0] [0.25, 0]\n";
        let e = parse_channel_file(text).unwrap_err();
        assert!(e.message.contains("Hermitian"));
    }

    #[test]
    fn unknown_header_rejected() {
        let e = parse_channel_file("something-else v9\n").unwrap_err();
        assert!(e.message.contains("unknown format header"));
    }
}

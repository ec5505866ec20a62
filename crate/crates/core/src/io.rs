//! Text formats for hypermatrices, trajectories and probability vectors.
//!
//! A hypermatrix file starts with `srw-hypermatrix v1 order=<m> dim=<N>` and
//! continues with the `N` rows of the flattening, whitespace separated.
//! Entries may be decimals or fractions such as `3/4`. A trajectory file
//! holds one trajectory per line as 1-based states, starting with `X(0)`.
//! Numbers are written in shortest round-trip form, so writing and reading
//! back gives identical values.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::hypermatrix::TransitionHypermatrix;
use crate::simulate::Trajectory;
use crate::vector::StochasticVector;
use crate::{Error, Result};

const MAGIC: &str = "srw-hypermatrix";
const VERSION: &str = "v1";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_number(token: &str, line: usize) -> Result<f64> {
    let value = match token.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num
                .parse()
                .map_err(|_| parse_err(line, format!("bad number '{token}'")))?;
            let den: f64 = den
                .parse()
                .map_err(|_| parse_err(line, format!("bad number '{token}'")))?;
            num / den
        }
        None => token
            .parse()
            .map_err(|_| parse_err(line, format!("bad number '{token}'")))?,
    };
    Ok(value)
}

fn header_field(token: Option<&str>, key: &str, line: usize) -> Result<usize> {
    let token = token.ok_or_else(|| parse_err(line, format!("header is missing {key}=")))?;
    token
        .strip_prefix(key)
        .and_then(|rest| rest.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| parse_err(line, format!("expected {key}=<integer>, found '{token}'")))
}

/// Parses a hypermatrix file.
pub fn parse_hypermatrix(text: &str) -> Result<TransitionHypermatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some(MAGIC) || tokens.next() != Some(VERSION) {
        return Err(parse_err(
            hline,
            format!("expected header '{MAGIC} {VERSION} order=<m> dim=<N>'"),
        ));
    }
    let order = header_field(tokens.next(), "order", hline)?;
    let dim = header_field(tokens.next(), "dim", hline)?;
    if order < 2 || dim < 1 {
        return Err(parse_err(
            hline,
            format!("need order >= 2 and dim >= 1, got {order} and {dim}"),
        ));
    }
    let width = u32::try_from(order - 1)
        .ok()
        .and_then(|e| dim.checked_pow(e))
        .ok_or_else(|| parse_err(hline, "flattening width overflows"))?;
    let mut rows = Vec::with_capacity(dim);
    for (line, text) in lines {
        let row = text
            .split_whitespace()
            .map(|t| parse_number(t, line))
            .collect::<Result<Vec<_>>>()?;
        if row.len() != width {
            return Err(parse_err(
                line,
                format!("expected {width} entries, found {}", row.len()),
            ));
        }
        rows.push(row);
    }
    if rows.len() != dim {
        return Err(Error::ShapeMismatch(format!(
            "expected {dim} rows, found {}",
            rows.len()
        )));
    }
    TransitionHypermatrix::from_rows(order, dim, &rows)
}

/// Formats a hypermatrix in the file format.
pub fn format_hypermatrix(h: &TransitionHypermatrix) -> String {
    let mut out = format!("{MAGIC} {VERSION} order={} dim={}\n", h.order(), h.dim());
    for row in h.rows() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parses trajectories. With `dim = None` the state count is the largest
/// state that occurs.
pub fn parse_trajectories(text: &str, dim: Option<usize>) -> Result<Vec<Trajectory>> {
    let mut raw = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let states = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| parse_err(i + 1, format!("bad state '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(bad) = states
            .iter()
            .find(|&&s| s == 0 || dim.is_some_and(|d| s > d))
        {
            return Err(parse_err(
                i + 1,
                format!("state {bad} outside 1..={}", dim.unwrap_or(usize::MAX)),
            ));
        }
        raw.push(states);
    }
    let dim = dim.unwrap_or_else(|| raw.iter().flatten().copied().max().unwrap_or(0));
    raw.iter()
        .map(|s| Trajectory::from_one_based(s, dim))
        .collect()
}

/// Formats trajectories, one per line with 1-based states.
pub fn format_trajectories(trajectories: &[Trajectory]) -> String {
    let mut out = String::new();
    for traj in trajectories {
        let line: Vec<String> = traj.states().iter().map(|s| (s + 1).to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a probability vector given as whitespace-separated numbers.
pub fn parse_vector(text: &str) -> Result<StochasticVector> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for token in line.split_whitespace() {
            values.push(parse_number(token, i + 1)?);
        }
    }
    StochasticVector::new(values)
}

/// Formats a vector on one line.
pub fn format_vector(v: &[f64]) -> String {
    let mut out = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{x}").expect("writing to a string cannot fail");
    }
    out.push('\n');
    out
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_hypermatrix(path: impl AsRef<Path>) -> Result<TransitionHypermatrix> {
    parse_hypermatrix(&read(path.as_ref())?)
}

pub fn write_hypermatrix(path: impl AsRef<Path>, h: &TransitionHypermatrix) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_hypermatrix(h))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_trajectories(path: impl AsRef<Path>, dim: Option<usize>) -> Result<Vec<Trajectory>> {
    parse_trajectories(&read(path.as_ref())?, dim)
}

pub fn write_trajectories(path: impl AsRef<Path>, trajectories: &[Trajectory]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_trajectories(trajectories))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_vector(path: impl AsRef<Path>) -> Result<StochasticVector> {
    parse_vector(&read(path.as_ref())?)
}

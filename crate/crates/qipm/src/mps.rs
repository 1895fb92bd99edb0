//! Free-format MPS reader for a deliberately small subset, plus write-back
//! of the canonicalized standard form.
//!
//! Supported: NAME, ROWS (N/L/G/E), COLUMNS, RHS, BOUNDS (UP, FX, FR, and
//! LO at zero), ENDATA. Everything else, including RANGES and negative
//! lower bounds, is rejected with the offending line number; silent
//! reinterpretation of an unsupported file would be worse than no answer.
//!
//! Canonicalization to `min c'x, Ax = b, x >= 0`:
//! - L rows gain a `+1` slack column, G rows a `-1` surplus column;
//! - an upper bound `x <= u` becomes a fresh row `x + slack = u`;
//! - a fixed bound `x = v` becomes a fresh row without a slack;
//! - a free column splits into a difference of two nonnegative columns.
//!
//! Synthesized names keep the provenance readable: `slack:ROW`, `ub:COL`,
//! `fix:COL`, `COL+`/`COL-`.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::LOProblem;

/// Canonicalized problem plus the name maps needed to report solutions in
/// the file's own vocabulary.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedMps {
    pub problem: LOProblem<f64>,
    /// One entry per canonical column.
    pub column_names: Vec<String>,
    /// One entry per canonical row.
    pub row_names: Vec<String>,
    pub objective_name: String,
}

#[derive(Clone, Copy, PartialEq)]
enum RowKind {
    Less,
    Greater,
    Equal,
}

#[derive(Clone, Copy, PartialEq)]
enum BoundKind {
    Upper(f64),
    Fixed(f64),
    Free,
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Preamble,
    Rows,
    Columns,
    Rhs,
    Bounds,
    Done,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_value(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| err(line, format!("expected a number, got '{tok}'")))
}

pub fn read_mps(path: impl AsRef<Path>) -> Result<ParsedMps> {
    let text = std::fs::read_to_string(path)?;
    parse_mps(&text)
}

pub fn parse_mps(text: &str) -> Result<ParsedMps> {
    let mut section = Section::Preamble;
    let mut name = String::from("mps");
    let mut objective_name: Option<String> = None;

    // constraint rows in declaration order
    let mut row_kinds: Vec<RowKind> = Vec::new();
    let mut row_names: Vec<String> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();

    // structural columns in first-appearance order
    let mut col_names: Vec<String> = Vec::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut col_entries: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut col_cost: Vec<f64> = Vec::new();

    let mut rhs: HashMap<usize, f64> = HashMap::new();
    let mut bounds: Vec<(usize, BoundKind, usize)> = Vec::new();
    let mut saw_columns_section = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        if raw.starts_with('*') || raw.trim().is_empty() {
            continue;
        }
        let is_header = !raw.starts_with([' ', '\t']);
        let fields: Vec<&str> = raw.split_whitespace().collect();

        if is_header {
            section = match fields[0] {
                "NAME" => {
                    if let Some(n) = fields.get(1) {
                        name = (*n).to_string();
                    }
                    section
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => {
                    saw_columns_section = true;
                    Section::Columns
                }
                "RHS" => Section::Rhs,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::Done,
                other => {
                    return Err(err(
                        line_no,
                        format!("unsupported section '{other}'"),
                    ))
                }
            };
            continue;
        }
        match section {
            Section::Preamble => {
                return Err(err(line_no, "data before any section header"))
            }
            Section::Done => {
                return Err(err(line_no, "data after ENDATA"))
            }
            Section::Rows => {
                let &[kind, row] = fields.as_slice() else {
                    return Err(err(line_no, "ROWS lines need a type and a name"));
                };
                if row_index.contains_key(row)
                    || objective_name.as_deref() == Some(row)
                {
                    return Err(err(line_no, format!("duplicate row '{row}'")));
                }
                match kind {
                    "N" => {
                        if objective_name.is_some() {
                            return Err(err(line_no, "more than one objective (N) row"));
                        }
                        objective_name = Some(row.to_string());
                    }
                    "L" | "G" | "E" => {
                        row_index.insert(row.to_string(), row_kinds.len());
                        row_names.push(row.to_string());
                        row_kinds.push(match kind {
                            "L" => RowKind::Less,
                            "G" => RowKind::Greater,
                            _ => RowKind::Equal,
                        });
                    }
                    other => {
                        return Err(err(line_no, format!("unsupported row type '{other}'")))
                    }
                }
            }
            Section::Columns => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(err(
                        line_no,
                        "COLUMNS lines need a column name and row/value pairs",
                    ));
                }
                let col = *col_index.entry(fields[0].to_string()).or_insert_with(|| {
                    col_names.push(fields[0].to_string());
                    col_entries.push(Vec::new());
                    col_cost.push(0.0);
                    col_names.len() - 1
                });
                for pair in fields[1..].chunks(2) {
                    let value = parse_value(pair[1], line_no)?;
                    if objective_name.as_deref() == Some(pair[0]) {
                        col_cost[col] += value;
                    } else if let Some(&r) = row_index.get(pair[0]) {
                        col_entries[col].push((r, value));
                    } else {
                        return Err(err(line_no, format!("unknown row '{}'", pair[0])));
                    }
                }
            }
            Section::Rhs => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(err(
                        line_no,
                        "RHS lines need a set name and row/value pairs",
                    ));
                }
                for pair in fields[1..].chunks(2) {
                    let value = parse_value(pair[1], line_no)?;
                    if objective_name.as_deref() == Some(pair[0]) {
                        return Err(err(
                            line_no,
                            "a constant on the objective row is not supported",
                        ));
                    }
                    let Some(&r) = row_index.get(pair[0]) else {
                        return Err(err(line_no, format!("unknown row '{}'", pair[0])));
                    };
                    *rhs.entry(r).or_insert(0.0) += value;
                }
            }
            Section::Bounds => {
                let kind = fields[0];
                let (col_tok, value_tok) = match (kind, fields.len()) {
                    ("FR", 3) => (fields[2], None),
                    ("UP" | "FX" | "LO", 4) => (fields[2], Some(fields[3])),
                    _ => {
                        return Err(err(
                            line_no,
                            format!("malformed or unsupported bound line (kind '{kind}')"),
                        ))
                    }
                };
                let Some(&col) = col_index.get(col_tok) else {
                    return Err(err(line_no, format!("unknown column '{col_tok}'")));
                };
                let bound = match kind {
                    "UP" => {
                        let v = parse_value(value_tok.unwrap(), line_no)?;
                        if v < 0.0 {
                            return Err(err(
                                line_no,
                                "negative upper bound implies a negative lower bound; \
                                 not in the supported subset",
                            ));
                        }
                        BoundKind::Upper(v)
                    }
                    "FX" => BoundKind::Fixed(parse_value(value_tok.unwrap(), line_no)?),
                    "FR" => BoundKind::Free,
                    "LO" => {
                        let v = parse_value(value_tok.unwrap(), line_no)?;
                        if v != 0.0 {
                            return Err(err(
                                line_no,
                                "only a zero lower bound is supported",
                            ));
                        }
                        continue;
                    }
                    other => {
                        return Err(err(line_no, format!("unsupported bound kind '{other}'")))
                    }
                };
                if bounds.iter().any(|(c, _, _)| *c == col) {
                    return Err(err(
                        line_no,
                        format!("conflicting bounds for column '{col_tok}'"),
                    ));
                }
                bounds.push((col, bound, line_no));
            }
        }
    }

    let objective_name =
        objective_name.ok_or_else(|| err(text.lines().count(), "no objective (N) row"))?;
    if !saw_columns_section || col_names.is_empty() {
        return Err(err(text.lines().count(), "empty COLUMNS section"));
    }

    canonicalize(
        name,
        objective_name,
        row_kinds,
        row_names,
        col_names,
        col_entries,
        col_cost,
        rhs,
        bounds,
    )
}

#[allow(clippy::too_many_arguments)]
fn canonicalize(
    name: String,
    objective_name: String,
    row_kinds: Vec<RowKind>,
    row_names: Vec<String>,
    col_names: Vec<String>,
    col_entries: Vec<Vec<(usize, f64)>>,
    col_cost: Vec<f64>,
    rhs: HashMap<usize, f64>,
    bounds: Vec<(usize, BoundKind, usize)>,
) -> Result<ParsedMps> {
    let m_rows = row_kinds.len();
    let bound_of: HashMap<usize, BoundKind> =
        bounds.iter().map(|(c, k, _)| (*c, *k)).collect();

    // canonical column layout: structural (free ones split in place), then
    // slack/surplus for L and G rows, then one slack per upper bound
    let mut names: Vec<String> = Vec::new();
    let mut canonical_of: Vec<usize> = Vec::with_capacity(col_names.len());
    let mut split: Vec<bool> = Vec::with_capacity(col_names.len());
    for (c, cname) in col_names.iter().enumerate() {
        canonical_of.push(names.len());
        if bound_of.get(&c) == Some(&BoundKind::Free) {
            names.push(format!("{cname}+"));
            names.push(format!("{cname}-"));
            split.push(true);
        } else {
            names.push(cname.clone());
            split.push(false);
        }
    }
    let mut slack_of_row: HashMap<usize, usize> = HashMap::new();
    for (r, kind) in row_kinds.iter().enumerate() {
        if matches!(kind, RowKind::Less | RowKind::Greater) {
            slack_of_row.insert(r, names.len());
            names.push(format!("slack:{}", row_names[r]));
        }
    }
    let uppers: Vec<(usize, f64)> = bounds
        .iter()
        .filter_map(|(c, k, _)| match k {
            BoundKind::Upper(v) => Some((*c, *v)),
            _ => None,
        })
        .collect();
    let fixes: Vec<(usize, f64)> = bounds
        .iter()
        .filter_map(|(c, k, _)| match k {
            BoundKind::Fixed(v) => Some((*c, *v)),
            _ => None,
        })
        .collect();
    let upper_slack_start = names.len();
    for (c, _) in &uppers {
        names.push(format!("slack:ub:{}", col_names[*c]));
    }

    let mut out_rows = row_names.clone();
    for (c, _) in &uppers {
        out_rows.push(format!("ub:{}", col_names[*c]));
    }
    for (c, _) in &fixes {
        out_rows.push(format!("fix:{}", col_names[*c]));
    }

    let (m, n) = (out_rows.len(), names.len());
    let mut a = Matrix::<f64>::zeros(m, n);
    let mut c_vec = vec![0.0; n];
    let mut b = vec![0.0; m];

    for (col, entries) in col_entries.iter().enumerate() {
        let j = canonical_of[col];
        for (r, v) in entries {
            a[(*r, j)] += v;
            if split[col] {
                a[(*r, j + 1)] -= v;
            }
        }
        c_vec[j] = col_cost[col];
        if split[col] {
            c_vec[j + 1] = -col_cost[col];
        }
    }
    for (r, kind) in row_kinds.iter().enumerate() {
        b[r] = rhs.get(&r).copied().unwrap_or(0.0);
        match kind {
            RowKind::Less => a[(r, slack_of_row[&r])] = 1.0,
            RowKind::Greater => a[(r, slack_of_row[&r])] = -1.0,
            RowKind::Equal => {}
        }
    }
    for (k, (col, v)) in uppers.iter().enumerate() {
        let r = m_rows + k;
        a[(r, canonical_of[*col])] = 1.0;
        a[(r, upper_slack_start + k)] = 1.0;
        b[r] = *v;
    }
    for (k, (col, v)) in fixes.iter().enumerate() {
        let r = m_rows + uppers.len() + k;
        a[(r, canonical_of[*col])] = 1.0;
        b[r] = *v;
    }

    let problem = LOProblem::new(a, b, c_vec, name)?;
    Ok(ParsedMps {
        problem,
        column_names: names,
        row_names: out_rows,
        objective_name,
    })
}

/// Serializes the canonicalized form back to MPS text. All rows are
/// equalities and all variables carry the default nonnegative bound, so a
/// re-read reproduces the problem and names exactly (the `{}` float format
/// is shortest-round-trip).
pub fn write_mps(parsed: &ParsedMps) -> String {
    let p = &parsed.problem;
    let mut out = String::new();
    out.push_str(&format!("NAME {}\n", p.name()));
    out.push_str("ROWS\n");
    out.push_str(&format!(" N {}\n", parsed.objective_name));
    for r in &parsed.row_names {
        out.push_str(&format!(" E {r}\n"));
    }
    out.push_str("COLUMNS\n");
    for (j, col) in parsed.column_names.iter().enumerate() {
        if p.c()[j] != 0.0 {
            out.push_str(&format!(
                "    {col} {} {}\n",
                parsed.objective_name,
                p.c()[j]
            ));
        }
        for i in 0..p.m() {
            let v = p.a().at(i, j);
            if v != 0.0 {
                out.push_str(&format!("    {col} {} {v}\n", parsed.row_names[i]));
            }
        }
    }
    out.push_str("RHS\n");
    for (i, r) in parsed.row_names.iter().enumerate() {
        if p.b()[i] != 0.0 {
            out.push_str(&format!("    RHS {r} {}\n", p.b()[i]));
        }
    }
    out.push_str("ENDATA\n");
    out
}

//! ASCII code file.
//!
//! ```text
//! JSCC-QC v1 z=<int> rows=50 cols=90
//! <50 lines of 90 characters in {0,1}>        base graph
//! <50 lines of 90 space-separated integers>   shifts, -1 for the zero block
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::code::{BaseGraph, QcCode, ShiftTable, BASE_COLS, BASE_ROWS};
use crate::error::{Error, Result};

const MAGIC: &str = "JSCC-QC";
const VERSION: &str = "v1";

pub fn serialize(code: &QcCode) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{MAGIC} {VERSION} z={} rows={BASE_ROWS} cols={BASE_COLS}",
        code.z()
    );
    let base = code.base();
    for r in 0..BASE_ROWS {
        for c in 0..BASE_COLS {
            out.push(if base.get(r, c) { '1' } else { '0' });
        }
        out.push('\n');
    }
    let shifts = code.shifts();
    for r in 0..BASE_ROWS {
        let row: Vec<String> = (0..BASE_COLS)
            .map(|c| shifts.get(r, c).map_or("-1".to_string(), |s| s.to_string()))
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn parse_header(line: &str) -> Result<usize> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let [magic, version, z, rows, cols] = fields.as_slice() else {
        return Err(Error::parse(1, format!("malformed header {line:?}")));
    };
    if *magic != MAGIC || *version != VERSION {
        return Err(Error::parse(1, format!("expected `{MAGIC} {VERSION}` header")));
    }
    let field = |text: &str, key: &str| -> Result<usize> {
        text.strip_prefix(key)
            .and_then(|v| v.strip_prefix('='))
            .ok_or_else(|| Error::parse(1, format!("expected `{key}=<int>`, got {text:?}")))?
            .parse()
            .map_err(|_| Error::parse(1, format!("bad integer in {text:?}")))
    };
    let z = field(z, "z")?;
    if field(rows, "rows")? != BASE_ROWS || field(cols, "cols")? != BASE_COLS {
        return Err(Error::parse(
            1,
            format!("only rows={BASE_ROWS} cols={BASE_COLS} is supported"),
        ));
    }
    if z == 0 {
        return Err(Error::parse(1, "z must be positive"));
    }
    Ok(z)
}

/// Parses and validates a code file. Errors carry the 1-based line number.
pub fn parse(text: &str) -> Result<QcCode> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty code file"))?;
    let z = parse_header(header.trim_end())?;

    let mut base = BaseGraph::zeros(BASE_ROWS, BASE_COLS);
    for r in 0..BASE_ROWS {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::parse(r + 2, "missing base graph row"))?;
        let line = line.trim_end();
        if line.len() != BASE_COLS {
            return Err(Error::parse(
                ln,
                format!("base row {r} has {} characters, expected {BASE_COLS}", line.len()),
            ));
        }
        for (c, ch) in line.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => base.set(r, c, true),
                other => {
                    return Err(Error::parse(
                        ln,
                        format!("base cell ({r},{c}) is {other:?}, expected 0 or 1"),
                    ))
                }
            }
        }
    }

    let mut shifts = ShiftTable::new(z, BASE_ROWS, BASE_COLS);
    for r in 0..BASE_ROWS {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| Error::parse(BASE_ROWS + r + 2, "missing shift row"))?;
        let cells: Vec<&str> = line.split_whitespace().collect();
        if cells.len() != BASE_COLS {
            return Err(Error::parse(
                ln,
                format!("shift row {r} has {} cells, expected {BASE_COLS}", cells.len()),
            ));
        }
        for (c, cell) in cells.iter().enumerate() {
            let v: i64 = cell
                .parse()
                .map_err(|_| Error::parse(ln, format!("shift cell ({r},{c}) is not an integer")))?;
            let s = match v {
                -1 => None,
                v if v >= 0 && (v as u64) < z as u64 => Some(v as usize),
                v => {
                    return Err(Error::parse(
                        ln,
                        format!("shift cell ({r},{c}) = {v} is outside [0, {z}) and not -1"),
                    ))
                }
            };
            if s.is_some() != base.get(r, c) {
                return Err(Error::parse(
                    ln,
                    format!("shift cell ({r},{c}) disagrees with the base graph entry"),
                ));
            }
            shifts.set(r, c, s);
        }
    }
    if let Some((ln, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(Error::parse(ln, format!("unexpected trailing content {extra:?}")));
    }
    QcCode::new(base, shifts).map_err(|e| Error::parse(0, e.to_string()))
}

pub fn load(path: impl AsRef<Path>) -> Result<QcCode> {
    parse(&std::fs::read_to_string(path)?)
}

pub fn save(code: &QcCode, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, serialize(code))?;
    Ok(())
}

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use mid_core::MultiSeries;

use crate::CliError;

/// A cell that could not be used, with its 1-based position in the file.
fn bad_cell(line: u64, col: usize, what: &str) -> CliError {
    CliError::Input(format!("line {line}, column {col}: {what}"))
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.trim().parse::<f64>().ok()
}

/// Reads a numeric panel. The first row is a header when any of its cells
/// is not a number.
pub fn read_panel<R: Read>(reader: R) -> Result<MultiSeries, CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut values = Vec::new();
    let mut dim = 0;
    let mut len = 0;
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("malformed CSV: {e}")))?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        if i == 0 && record.iter().any(|c| parse_cell(c).is_none()) {
            dim = record.len();
            continue;
        }
        if dim == 0 {
            dim = record.len();
        }
        if record.len() != dim {
            return Err(CliError::Input(format!(
                "line {line}: expected {dim} columns, found {}",
                record.len()
            )));
        }
        for (j, cell) in record.iter().enumerate() {
            let v = parse_cell(cell)
                .ok_or_else(|| bad_cell(line, j + 1, &format!("`{cell}` is not a number")))?;
            if !v.is_finite() {
                return Err(bad_cell(line, j + 1, "value is not finite"));
            }
            values.push(v);
        }
        len += 1;
    }
    if len == 0 {
        return Err(CliError::Input("input has no data rows".into()));
    }
    MultiSeries::from_time_major(values, len, dim).map_err(|e| CliError::Input(e.to_string()))
}

pub fn read_panel_path(path: &Path) -> Result<MultiSeries, CliError> {
    if path.as_os_str() == "-" {
        return read_panel(std::io::stdin().lock());
    }
    let file = fs::File::open(path)
        .map_err(|e| CliError::Input(format!("cannot open {}: {e}", path.display())))?;
    read_panel(std::io::BufReader::new(file))
}

/// Header `x1,...,xd` and one row per time point. Values are written in
/// shortest round-trip form, so reading the file back is exact.
pub fn panel_csv(series: &MultiSeries) -> String {
    let mut out = (1..=series.dim())
        .map(|j| format!("x{j}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for t in 1..=series.len() {
        let row: Vec<String> = series.row(t).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Positive scales separated by commas or whitespace; `#` starts a comment.
pub fn read_sigma_file(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let v: f64 = tok.parse().map_err(|_| {
                CliError::Input(format!(
                    "{}: line {}: `{tok}` is not a number",
                    path.display(),
                    i + 1
                ))
            })?;
            out.push(v);
        }
    }
    Ok(out)
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, or to standard output when `path` is `None`.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out
            .write_all(contents.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| CliError::Output(e.to_string()));
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| CliError::Output(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_detected() {
        let a = read_panel("a,b\n1,2\n3,4\n".as_bytes()).unwrap();
        let b = read_panel("1,2\n3,4\n".as_bytes()).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.len(), a.dim()), (2, 2));
    }

    #[test]
    fn bad_cell_reports_location() {
        let err = read_panel("x,y\n1,2\n3,oops\n".as_bytes()).unwrap_err();
        assert_eq!(err.to_string(), "line 3, column 2: `oops` is not a number");
        let err = read_panel("1,2\n3,NaN\n".as_bytes()).unwrap_err();
        assert!(err.to_string().starts_with("line 2, column 2"));
        let err = read_panel("1,2\n3\n".as_bytes()).unwrap_err();
        assert!(err.to_string().contains("expected 2 columns"));
    }

    #[test]
    fn round_trip_is_exact() {
        let cols = vec![
            vec![0.1, -1e-300, 1.0 / 3.0, 12345.678],
            vec![f64::MAX, f64::MIN_POSITIVE, -0.0, 2.5],
        ];
        let s = MultiSeries::from_columns(&cols).unwrap();
        assert_eq!(read_panel(panel_csv(&s).as_bytes()).unwrap(), s);
    }
}

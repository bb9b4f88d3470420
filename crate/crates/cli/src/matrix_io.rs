//! CSV ingestion and emission.
//!
//! Matrix files carry a header row of provider ids and a leading seeker-id
//! column; UTF-8, LF line endings, `.` decimal separator. The `costs` inputs
//! (seekers, providers, bounds) follow the same line-oriented shape.

use std::path::Path;

use recourse_core::{ActionConstraints, Error, LinearProvider, Result, Seeker};

#[derive(Debug)]
pub struct RawMatrix {
    pub seeker_ids: Vec<String>,
    pub provider_ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Non-empty lines split on commas, keyed by 1-based line number.
fn read_rows(path: &Path) -> Result<Vec<(usize, Vec<String>)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(idx, line)| {
            (
                idx + 1,
                line.split(',').map(|c| c.trim().to_string()).collect(),
            )
        })
        .collect())
}

fn cell_real(path: &Path, lineno: usize, column: usize, cell: &str) -> Result<f64> {
    cell.parse().map_err(|_| {
        Error::Validation(format!(
            "{} line {lineno}, column {column}: `{cell}` is not a number",
            path.display()
        ))
    })
}

/// Read a cost or weight matrix. Numeric validation (ranges, duplicate ids)
/// happens in the matrix constructors; this only enforces the table shape.
pub fn read_matrix(path: &Path) -> Result<RawMatrix> {
    let rows = read_rows(path)?;
    if rows.len() < 2 {
        return Err(Error::Validation(format!(
            "{}: expected a header row and at least one seeker row",
            path.display()
        )));
    }
    let header = &rows[0].1;
    if header.len() < 2 {
        return Err(Error::Validation(format!(
            "{}: header must name a seeker column and at least one provider",
            path.display()
        )));
    }
    let provider_ids: Vec<String> = header[1..].to_vec();
    let mut seeker_ids = Vec::new();
    let mut grid = Vec::new();
    for (lineno, cells) in &rows[1..] {
        if cells.len() != provider_ids.len() + 1 {
            return Err(Error::Validation(format!(
                "{} line {lineno}: {} cells, expected {} (seeker id + one per provider)",
                path.display(),
                cells.len(),
                provider_ids.len() + 1
            )));
        }
        seeker_ids.push(cells[0].clone());
        grid.push(
            cells[1..]
                .iter()
                .enumerate()
                .map(|(j, cell)| cell_real(path, *lineno, j + 2, cell))
                .collect::<Result<Vec<f64>>>()?,
        );
    }
    Ok(RawMatrix {
        seeker_ids,
        provider_ids,
        rows: grid,
    })
}

/// Write a matrix in the same format `read_matrix` accepts.
pub fn write_matrix(
    path: &Path,
    seeker_ids: &[String],
    provider_ids: &[String],
    rows: &[Vec<f64>],
    format_real: impl Fn(f64) -> String,
) -> Result<()> {
    let mut out = String::new();
    out.push_str("seeker");
    for id in provider_ids {
        out.push(',');
        out.push_str(id);
    }
    out.push('\n');
    for (id, row) in seeker_ids.iter().zip(rows) {
        out.push_str(id);
        for &value in row {
            out.push(',');
            out.push_str(&format_real(value));
        }
        out.push('\n');
    }
    std::fs::write(path, out)
        .map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display())))
}

/// Seekers file: header `seeker,<f...>` then one labeled feature vector per row.
pub fn read_seekers(path: &Path) -> Result<Vec<Seeker>> {
    let rows = read_rows(path)?;
    if rows.len() < 2 || rows[0].1.len() < 2 {
        return Err(Error::Validation(format!(
            "{}: expected a header and rows of `id,<features...>`",
            path.display()
        )));
    }
    let dimension = rows[0].1.len() - 1;
    let mut seekers = Vec::new();
    for (lineno, cells) in &rows[1..] {
        if cells.len() != dimension + 1 {
            return Err(Error::Validation(format!(
                "{} line {lineno}: {} cells, expected {}",
                path.display(),
                cells.len(),
                dimension + 1
            )));
        }
        let features = cells[1..]
            .iter()
            .enumerate()
            .map(|(j, cell)| cell_real(path, *lineno, j + 2, cell))
            .collect::<Result<Vec<f64>>>()?;
        seekers.push(Seeker::new(cells[0].clone(), features));
    }
    Ok(seekers)
}

/// Providers file: header `provider,bias,<w...>` then one linear model per row.
pub fn read_providers(path: &Path) -> Result<Vec<LinearProvider>> {
    let rows = read_rows(path)?;
    if rows.len() < 2 || rows[0].1.len() < 3 {
        return Err(Error::Validation(format!(
            "{}: expected a header and rows of `id,bias,<weights...>`",
            path.display()
        )));
    }
    let dimension = rows[0].1.len() - 2;
    let mut providers = Vec::new();
    for (lineno, cells) in &rows[1..] {
        if cells.len() != dimension + 2 {
            return Err(Error::Validation(format!(
                "{} line {lineno}: {} cells, expected {}",
                path.display(),
                cells.len(),
                dimension + 2
            )));
        }
        let bias = cell_real(path, *lineno, 2, &cells[1])?;
        let weights = cells[2..]
            .iter()
            .enumerate()
            .map(|(j, cell)| cell_real(path, *lineno, j + 3, cell))
            .collect::<Result<Vec<f64>>>()?;
        providers.push(LinearProvider::new(weights, bias, cells[0].clone())?);
    }
    Ok(providers)
}

/// Bounds file: header `feature,lower,upper,mutable`, one row per feature
/// index `0..dimension`. `inf`/`-inf` are accepted as open bounds.
pub fn read_bounds(path: &Path, dimension: usize) -> Result<ActionConstraints> {
    let rows = read_rows(path)?;
    if rows.len() != dimension + 1 {
        return Err(Error::Validation(format!(
            "{}: expected one row per feature ({} features), got {}",
            path.display(),
            dimension,
            rows.len().saturating_sub(1)
        )));
    }
    let mut lower = vec![f64::NEG_INFINITY; dimension];
    let mut upper = vec![f64::INFINITY; dimension];
    let mut mutable = vec![true; dimension];
    let mut seen = vec![false; dimension];
    for (lineno, cells) in &rows[1..] {
        if cells.len() != 4 {
            return Err(Error::Validation(format!(
                "{} line {lineno}: expected `feature,lower,upper,mutable`",
                path.display()
            )));
        }
        let index: usize = cells[0].parse().map_err(|_| {
            Error::Validation(format!(
                "{} line {lineno}: `{}` is not a feature index",
                path.display(),
                cells[0]
            ))
        })?;
        if index >= dimension {
            return Err(Error::Validation(format!(
                "{} line {lineno}: feature index {index} out of range (dimension {dimension})",
                path.display()
            )));
        }
        if seen[index] {
            return Err(Error::Validation(format!(
                "{} line {lineno}: duplicate feature index {index}",
                path.display()
            )));
        }
        seen[index] = true;
        lower[index] = cell_real(path, *lineno, 2, &cells[1])?;
        upper[index] = cell_real(path, *lineno, 3, &cells[2])?;
        mutable[index] = match cells[3].as_str() {
            "true" | "1" => true,
            "false" | "0" => false,
            other => {
                return Err(Error::Validation(format!(
                    "{} line {lineno}: mutable must be true/false, got `{other}`",
                    path.display()
                )))
            }
        };
    }
    ActionConstraints::new(lower, upper, mutable)
}

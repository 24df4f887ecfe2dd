//! Reading radial profiles from `(r, h)` CSV files.

use std::io::Read;
use std::path::Path;

use capsmooth_core::distributions::RadialProfile;

use crate::error::{CliError, Result};

/// Parses `(r, h)` pairs, one per line. A first line that is not numeric is
/// taken as a header; blank lines and lines starting with `#` are skipped.
pub fn read_pairs<R: Read>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let mut pairs = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(CliError::invalid(format!("profile row {}: expected 2 fields, got {}", line + 1, record.len())));
        }
        match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
            (Ok(r), Ok(h)) => pairs.push((r, h)),
            _ if line == 0 => continue,
            _ => return Err(CliError::invalid(format!("profile row {}: not a pair of numbers", line + 1))),
        }
    }
    Ok(pairs)
}

pub fn load_profile(path: &Path, n: u32, beta: f64, sigma: f64) -> Result<RadialProfile> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::invalid(format!("cannot open profile {}: {e}", path.display())))?;
    let pairs = read_pairs(file)?;
    Ok(RadialProfile::from_table(&pairs, n, beta, sigma)?)
}

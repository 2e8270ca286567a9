//! Text artifact formats: CSV tables, candidate lists, digests.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Column header shared by the similarity table and the edge dataset CSV.
pub const SIMILARITY_CSV_HEADER: &str =
    "feature_a,feature_b,cn,jaccard,cosine,aa,ra,katz,rwr,lp,label";

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Formats `x` with the given number of significant digits, plain decimal
/// notation. Used for CSV score columns (12 significant digits).
pub fn format_significant(x: f64, digits: usize) -> String {
    assert!(digits > 0);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).clamp(0, 40) as usize;
    format!("{x:.decimals$}")
}

/// Parses a candidates document: one `featureA,featureB` record per line,
/// `#` comments allowed. Pair order is preserved.
pub fn parse_candidates(doc: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, line) in doc.lines().enumerate() {
        let lineno = lineno + 1;
        let body = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line,
        };
        let body = body.trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split(',').map(str::trim).collect();
        if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::parse(
                "candidates",
                lineno,
                format!("expected `featureA,featureB`, got `{body}`"),
            ));
        }
        out.push((fields[0].to_string(), fields[1].to_string()));
    }
    Ok(out)
}

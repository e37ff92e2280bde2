use std::fmt::Write as _;

use crate::hfi::FlipDirection;
use crate::rates::RateResult;

/// One row of an exported rate table.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub config_id: String,
    pub nucleus: usize,
    pub direction: FlipDirection,
    pub result: RateResult,
}

pub const RATE_TABLE_HEADER: &str = "config_id,nucleus,direction,method,rate,golden_part,coherent_part";

/// CSV body (header line plus rows); empty cells for absent parts.
pub fn rate_table_csv(rows: &[RateRow]) -> String {
    let mut out = String::from(RATE_TABLE_HEADER);
    out.push('\n');
    let cell = |v: Option<f64>| v.map(|x| format!("{x:.12e}")).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.12e},{},{}",
            r.config_id,
            r.nucleus,
            r.direction.as_str(),
            r.result.method.as_str(),
            r.result.value,
            cell(r.result.golden_part),
            cell(r.result.coherent_part),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::RateMethod;

    #[test]
    fn renders_rows() {
        let rows = vec![RateRow {
            config_id: "c0".into(),
            nucleus: 1,
            direction: FlipDirection::Lower,
            result: RateResult { value: 2.0, method: RateMethod::Perturbative, golden_part: Some(1.5), coherent_part: Some(0.5), expansion_ratio: None },
        }];
        let csv = rate_table_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(RATE_TABLE_HEADER));
        assert_eq!(
            lines.next(),
            Some("c0,1,lower,perturbative,2.000000000000e0,1.500000000000e0,5.000000000000e-1")
        );
    }
}

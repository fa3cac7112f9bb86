use serde_json::{json, Value};

use qtspp_core::qcomb::theorem_rhs;
use qtspp_core::tspp::generating_polynomial_with_limit;

use crate::args::{Global, TsppCmd};
use crate::io::{to_value, CliError, Report};

pub fn run(cmd: &TsppCmd, g: &Global) -> Result<Report, CliError> {
    let TsppCmd::Verify(range) = cmd;
    let ns = range.values()?;
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut all = true;
    for &n in &ns {
        let poly = generating_polynomial_with_limit(n, g.cap_enum)?;
        let product = theorem_rhs(n);
        let matches = poly == product;
        all &= matches;
        let count = poly.at_one();
        text += &format!(
            "n={n}: {count} partitions\n  orbit sum {poly}\n  product   {product}\n  {}\n",
            if matches { "match" } else { "MISMATCH" }
        );
        rows.push(json!({
            "n": n,
            "count": u64::try_from(&count).map(Value::from).unwrap_or_else(|_| count.to_string().into()),
            "poly": to_value(&poly),
            "product": to_value(&product),
            "matches_product": matches,
        }));
    }
    let json = if rows.len() == 1 { rows.pop().unwrap() } else { Value::Array(rows) };
    Ok(Report::new(all, text, json))
}

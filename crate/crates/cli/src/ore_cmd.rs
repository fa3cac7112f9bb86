use serde_json::{json, Value as Json};

use qtspp_core::ore::{
    annihilates_with, apply, certify_constant_diagonal, right_divide, substitute_diagonal, verify_telescoping,
    OreOperator, Point, SequenceTable, TelescopingCertificate, Value,
};

use crate::args::{Global, OreCmd};
use crate::io::{read_json, to_value, CliError, Report};

fn value_json(v: &Value) -> Json {
    match v {
        Value::Exact(r) => to_value(r),
        Value::Mod(x) => x.value().into(),
    }
}

fn value_text(v: &Value) -> String {
    match v {
        Value::Exact(r) => r.to_string(),
        Value::Mod(x) => format!("{} mod {}", x.value(), x.modulus()),
    }
}

pub fn run(cmd: &OreCmd, _g: &Global) -> Result<Report, CliError> {
    match cmd {
        OreCmd::Apply { op, table, at } => {
            let op: OreOperator = read_json(op)?;
            let t: SequenceTable = read_json(table)?;
            let p = Point::new(at[0], at[1], at[2]);
            let v = apply(&op, &t, p)?;
            Ok(Report::new(true, value_text(&v), json!({ "at": p, "value": value_json(&v) })))
        }
        OreCmd::Annihilates {
            op,
            table,
            min_admissible,
        } => {
            let op: OreOperator = read_json(op)?;
            let t: SequenceTable = read_json(table)?;
            let r = annihilates_with(&op, &t, *min_admissible)?;
            let mut text = format!(
                "{} at {} admissible points ({} skipped)\n",
                if r.holds() { "annihilates" } else { "does not annihilate" },
                r.admissible,
                r.inadmissible.len()
            );
            if let Some(p) = r.failures.first() {
                text += &format!("first nonzero residual at {p}, {} failures\n", r.failures.len());
            }
            let json = json!({
                "annihilates": r.holds(),
                "admissible": r.admissible,
                "inadmissible": r.inadmissible,
                "failures": r.failures,
            });
            Ok(Report::new(r.holds(), text, json))
        }
        OreCmd::Divide { a, b } => {
            let a: OreOperator = read_json(a)?;
            let b: OreOperator = read_json(b)?;
            let (q, r) = right_divide(&a, &b)?;
            let text = format!("quotient  {q}\nremainder {r}\n");
            let json = json!({ "quotient": to_value(&q), "remainder": to_value(&r), "divides": r.is_zero() });
            Ok(Report::new(r.is_zero(), text, json))
        }
        OreCmd::Leftmul { a, b } => {
            let a: OreOperator = read_json(a)?;
            let b: OreOperator = read_json(b)?;
            let p = &a * &b;
            Ok(Report::new(true, p.to_string(), json!({ "product": to_value(&p) })))
        }
        OreCmd::Telescope { cert, table, window } => {
            let cert: TelescopingCertificate = read_json(cert)?;
            let t: SequenceTable = read_json(table)?;
            let r = verify_telescoping(&cert, &t, *window)?;
            let mut text = format!(
                "{}: {} rows, {} points; pointwise {}, boundary {}, sum {}\n",
                if r.verified() { "verified" } else { "REJECTED" },
                r.rows_checked,
                r.points_checked,
                r.pointwise_ok,
                r.boundary_ok,
                r.sum_ok
            );
            if let Some(p) = r.first_failure {
                text += &format!("first failure at {p}\n");
            }
            let json = json!({
                "verified": r.verified(),
                "rows_checked": r.rows_checked,
                "points_checked": r.points_checked,
                "pointwise_ok": r.pointwise_ok,
                "boundary_ok": r.boundary_ok,
                "sum_ok": r.sum_ok,
                "first_failure": r.first_failure,
            });
            Ok(Report::new(r.verified(), text, json))
        }
        OreCmd::Diagonal { op, table, initial } => {
            let op: OreOperator = read_json(op)?;
            let sub = substitute_diagonal(&op)?;
            let Some(path) = table else {
                return Ok(Report::new(true, sub.to_string(), json!({ "operator": to_value(&sub) })));
            };
            let t: SequenceTable = read_json(path)?;
            // values at (n, 0) are taken as already re-indexed
            let diag = if t.points().iter().all(|p| p.j == 0) { t } else { t.diagonal() };
            let c = certify_constant_diagonal(&sub, &diag, *initial)?;
            let text = format!(
                "diagonal operator {sub}\nhomogenized {}\nright factor Sn-1: {}, annihilates: {}, {} initial values (need {}): {}, leading coefficient: {}\n{} on n={}..{}\n",
                c.operator,
                c.right_factor,
                c.annihilates_table,
                c.initial_checked,
                c.required_initial,
                c.initial_ok,
                c.leading_ok,
                if c.concluded { "constant 1" } else { "NOT CONCLUDED" },
                c.window.0,
                c.window.1
            );
            let json = json!({
                "operator": to_value(&sub),
                "homogenized": to_value(&c.operator),
                "quotient": to_value(&c.quotient),
                "right_factor": c.right_factor,
                "annihilates_table": c.annihilates_table,
                "required_initial": c.required_initial,
                "initial_checked": c.initial_checked,
                "initial_ok": c.initial_ok,
                "leading_ok": c.leading_ok,
                "window": [c.window.0, c.window.1],
                "concluded": c.concluded,
            });
            Ok(Report::new(c.concluded, text, json))
        }
    }
}

use serde_json::{json, Value};

use qtspp_core::okada::{
    check_batch, identity_plan, prescreen_identity, solve_cofactors, verify_determinant_with_limit, Identity,
    IdentityReport, Prescreen,
};

use crate::args::{Global, Mode, NRange, OkadaCmd};
use crate::io::{to_value, CliError, Report};

fn check_n(n: u32, g: &Global) -> Result<(), CliError> {
    if n == 0 || n > g.cap_n {
        return Err(CliError::usage(format!("n must be in 1..={}, got {n}", g.cap_n)));
    }
    Ok(())
}

/// Runs `f` for every n on its own thread; results come back in input order.
fn per_n<T: Send>(ns: &[u32], f: impl Fn(u32) -> Result<T, CliError> + Sync) -> Result<Vec<T>, CliError> {
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = ns.iter().map(|&n| s.spawn(move || f(n))).collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn one_or_many(mut rows: Vec<Value>) -> Value {
    if rows.len() == 1 {
        rows.pop().unwrap()
    } else {
        Value::Array(rows)
    }
}

pub fn run(cmd: &OkadaCmd, g: &Global) -> Result<Report, CliError> {
    match cmd {
        OkadaCmd::Det(range) => det(range, g),
        OkadaCmd::Cofactors { n } => cofactors(*n, g),
        OkadaCmd::Identities {
            range,
            which,
            i,
            mode,
            fast,
        } => identities(range, *which, *i, *mode, *fast, g),
    }
}

fn det(range: &NRange, g: &Global) -> Result<Report, CliError> {
    let ns = range.values()?;
    for &n in &ns {
        check_n(n, g)?;
    }
    let reports = per_n(&ns, |n| Ok(verify_determinant_with_limit(n, g.cap_n)?))?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for r in &reports {
        text += &format!("n={}: det = b_n {}\n", r.n, if r.verified { "verified" } else { "FAILED" });
        if !r.verified {
            text += &format!("  det {}\n  b_n {}\n", r.lhs, r.rhs);
        }
        rows.push(json!({ "n": r.n, "verified": r.verified, "det": to_value(&r.lhs), "b_n": to_value(&r.rhs) }));
    }
    let ok = reports.iter().all(|r| r.verified);
    Ok(Report::new(ok, text, one_or_many(rows)))
}

fn cofactors(n: u32, g: &Global) -> Result<Report, CliError> {
    check_n(n, g)?;
    let c = solve_cofactors(n)?;
    let mut text = String::new();
    for (j, v) in c.values().iter().enumerate() {
        text += &format!("c({n},{}) = {v}\n", j + 1);
    }
    Ok(Report::new(true, text, json!({ "n": n, "c": to_value(&c.values()) })))
}

/// Identity, row, verdict; `None` when no evaluation point was usable.
type Outcome = (Identity, Option<u32>, Option<bool>);

fn plan_for(n: u32, which: Option<Identity>, i: Option<u32>) -> Vec<(Identity, Option<u32>)> {
    match which {
        None => identity_plan(n),
        Some(w) if w.needs_row() && i.is_none() => (1..n).map(|i| (w, Some(i))).collect(),
        Some(w) => vec![(w, i)],
    }
}

fn identities(
    range: &NRange,
    which: Option<Identity>,
    i: Option<u32>,
    mode: Mode,
    fast: bool,
    g: &Global,
) -> Result<Report, CliError> {
    if fast && mode == Mode::Modular {
        return Err(CliError::usage("--fast only applies to --mode exact"));
    }
    if i.is_some() && !which.is_some_and(Identity::needs_row) {
        return Err(CliError::usage("--i needs --which 2 or 2p"));
    }
    let ns = range.values()?;
    for &n in &ns {
        check_n(n, g)?;
    }
    let prescreen = Prescreen {
        primes: g.primes_or_default(2),
        points: 2,
        seed: g.seed,
    };
    let results = per_n(&ns, |n| -> Result<Vec<Outcome>, CliError> {
        let plan = plan_for(n, which, i);
        match mode {
            Mode::Exact => {
                let reports = check_batch(n, &plan, g.cap_n, fast.then_some(&prescreen))?;
                Ok(reports
                    .iter()
                    .map(|r: &IdentityReport| (r.identity.expect("identity report"), r.i, Some(r.verified)))
                    .collect())
            }
            Mode::Modular => {
                let points = prescreen.prime_points()?;
                plan.iter()
                    .map(|&(w, i)| Ok((w, i, prescreen_identity(n, w, i, &points)?)))
                    .collect()
            }
        }
    })?;
    let mode_name = match mode {
        Mode::Exact => "exact",
        Mode::Modular => "modular",
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for (&n, res) in ns.iter().zip(&results) {
        let failed = res.iter().filter(|r| r.2 != Some(true)).count();
        ok &= failed == 0 && !res.is_empty();
        text += &format!("n={n}: {} of {} identities verified ({mode_name})\n", res.len() - failed, res.len());
        for (w, i, v) in res {
            let label = match i {
                Some(i) => format!("{w}(i={i})"),
                None => w.to_string(),
            };
            let verdict = match v {
                Some(true) => "ok",
                Some(false) => "FAILED",
                None => "inconclusive",
            };
            text += &format!("  {label}: {verdict}\n");
        }
        let items: Vec<Value> = res
            .iter()
            .map(|(w, i, v)| json!({ "identity": w.label(), "i": i, "verified": v }))
            .collect();
        rows.push(json!({ "n": n, "mode": mode_name, "results": items }));
    }
    Ok(Report::new(ok, text, one_or_many(rows)))
}

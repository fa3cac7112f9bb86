use serde_json::{json, Value};

use qtspp_core::guess::{
    build_table, escalate, guess_operators, revalidate, AnsatzStructure, GuessConfig, GuessReport, GuessStatus,
    TableSource,
};
use qtspp_core::ore::SequenceTable;
use qtspp_core::PrimePoint;

use crate::args::{Global, GuessCmd, Mode, Source};
use crate::io::{read_json, to_value, write_json, CliError, Report};

pub fn run(cmd: &GuessCmd, g: &Global) -> Result<Report, CliError> {
    match cmd {
        GuessCmd::Table {
            source,
            from,
            to,
            mode,
            out,
        } => {
            if from > to || *from < 1 {
                return Err(CliError::usage(format!("need 1 <= from <= to, got {from}..{to}")));
            }
            let src = match source {
                Source::Diagonal => TableSource::Diagonal,
                Source::Cofactors => TableSource::Cofactors,
            };
            let mut t = build_table((*from, *to), &src)?;
            if *mode == Mode::Modular {
                let p = g.primes_or_default(1)[0];
                let pt: PrimePoint = PrimePoint::sample(p, 1, g.seed).pop().expect("one point");
                t = t.project(&pt)?;
            }
            match out {
                Some(path) => {
                    write_json(path, &t)?;
                    let text = format!("wrote {} points to {}", t.len(), path.display());
                    Ok(Report::new(true, text, json!({ "points": t.len(), "out": path })))
                }
                None => {
                    let v = to_value(&t);
                    Ok(Report::new(true, serde_json::to_string_pretty(&v).unwrap(), v))
                }
            }
        }
        GuessCmd::Run {
            table,
            stencil,
            oversample,
            holdout,
            images,
            no_lift,
            out,
        } => {
            let t: SequenceTable = read_json(table)?;
            let s: AnsatzStructure = read_json(stencil)?;
            let cfg = GuessConfig {
                oversample: *oversample,
                holdout: *holdout,
                primes: g.primes_or_default(2),
                seed: g.seed,
                images: *images,
                lift: !no_lift,
                ..GuessConfig::default()
            };
            let rep = guess_operators(&t, &s, &cfg)?;
            if let Some(path) = out {
                write_json(path, &rep)?;
            }
            Ok(guess_report(&rep))
        }
        GuessCmd::Revalidate { report, table } => {
            let r: GuessReport = read_json(report)?;
            let t: SequenceTable = read_json(table)?;
            Ok(guess_report(&revalidate(&r, &t)))
        }
        GuessCmd::Escalate {
            table,
            stencil,
            max_degree,
            budget,
            oversample,
            holdout,
        } => {
            let t: SequenceTable = read_json(table)?;
            let s: AnsatzStructure = read_json(stencil)?;
            let cfg = GuessConfig {
                oversample: *oversample,
                holdout: *holdout,
                primes: g.primes_or_default(2),
                seed: g.seed,
                ..GuessConfig::default()
            };
            let esc = escalate(&t, &s.stencil, s.inhomogeneous, *max_degree, *budget, &cfg)?;
            let mut text = String::new();
            for st in &esc.steps {
                text += &format!("degrees {:?} ({} unknowns): {}\n", st.degrees, st.unknowns, st.outcome);
            }
            let (ok, found) = match &esc.report {
                Some(r) => {
                    let inner = guess_report(r);
                    text += &inner.text;
                    (true, inner.json)
                }
                None => {
                    text += "no degree bound validated\n";
                    (false, Value::Null)
                }
            };
            Ok(Report::new(ok, text, json!({ "steps": to_value(&esc.steps), "report": found })))
        }
    }
}

/// Summary of a guess; the training point list stays out of it.
fn guess_report(r: &GuessReport) -> Report {
    let c = &r.counts;
    let mut text = format!(
        "status {}\nstructure {:?} degrees {:?}{}\n{} unknowns, {} training and {} validation points, {} q images per prime\nnullspace {} -> {} after validation, primes {:?}{}\n",
        r.status,
        r.structure.stencil,
        r.structure.degrees,
        if r.structure.inhomogeneous { " inhomogeneous" } else { "" },
        c.unknowns,
        c.training_points,
        c.validation_points,
        c.images_per_prime,
        c.nullspace_dimension,
        c.validated_dimension,
        r.primes,
        if r.lifted { ", lifted" } else { ", modular only" },
    );
    for op in &r.operators {
        text += &format!("  {op}\n");
    }
    let json = json!({
        "status": r.status,
        "structure": to_value(&r.structure),
        "operators": to_value(&r.operators),
        "counts": to_value(&r.counts),
        "primes": r.primes,
        "lifted": r.lifted,
    });
    Report::new(r.status == GuessStatus::Validated, text, json)
}

use serde_json::{json, Value};
use workbench_core::cochain::{betti_numbers, class_equal, cohomology_window};
use workbench_core::conn::scalar_type_character;
use workbench_core::env::{format_word, Strategy};
use workbench_core::kledger::{kernel_eta, kernel_omega, KernelInput};
use workbench_core::lralg::check_axioms;
use workbench_core::vki::{build_vki, flatness_obstructed, line_class, psi_formal, rank_check};
use workbench_core::{Cochain, EvenClassPolynomial, LieRinehart, Mode, RewriteSystem};

use crate::error::{CliError, CliResult};
use crate::job::Job;

/// A finished report; `rejected` carries the reason when the run must exit nonzero anyway.
pub struct Outcome {
    pub report: Value,
    pub rejected: Option<String>,
}

impl From<Value> for Outcome {
    fn from(report: Value) -> Self {
        Outcome { report, rejected: None }
    }
}

fn two_form(lr: &LieRinehart, c: Cochain, what: &str) -> CliResult<Cochain> {
    if c.degree() != 2 {
        return Err(CliError::Usage(format!("{what} must be a 2-cochain, got degree {}", c.degree())));
    }
    if c.rank() != lr.rank() {
        return Err(CliError::Usage(format!("{what} has rank {} but the algebra has rank {}", c.rank(), lr.rank())));
    }
    Ok(c)
}

fn required(v: Option<usize>, flag: &str) -> CliResult<usize> {
    v.ok_or_else(|| CliError::Usage(format!("missing {flag}")))
}

pub fn cohomology(lr: &LieRinehart, p: Option<usize>, window: u32) -> CliResult<Outcome> {
    let ring = lr.ring();
    let report = match p {
        Some(p) => cohomology_window(lr, p, window)?.to_json(ring),
        None => {
            let degrees = (0..=lr.rank())
                .map(|p| cohomology_window(lr, p, window).map(|h| h.to_json(ring)))
                .collect::<Result<Vec<_>, _>>()?;
            json!({ "D": window, "betti": betti_numbers(lr, window)?, "degrees": degrees })
        }
    };
    Ok(report.into())
}

pub fn axioms(job: &Job, builtin: Option<&str>, seed: u64, describe: bool) -> CliResult<Outcome> {
    let pres = job.presentation(builtin)?;
    let report = check_axioms(&pres, seed);
    let failures = report.failures().count();
    let mut out = json!({
        "passed": report.passed(),
        "failures": failures,
        "checks": report.checks,
    });
    if describe {
        out["presentation"] = pres.to_json();
    }
    let rejected = (failures > 0).then(|| format!("{failures} axiom checks failed"));
    Ok(Outcome { report: out, rejected })
}

pub fn confluence(job: &Job, lr: &LieRinehart, mode: Mode) -> CliResult<Outcome> {
    let f = two_form(lr, job.cochain_or_zero(lr, 2)?, "twist")?;
    let df = f.differential(lr);
    let sys = RewriteSystem::new(lr.clone(), f, mode)?;
    let mut report = sys.diamond_check().to_json(lr.ring());
    report["mode"] = json!(mode);
    report["twist_is_cocycle"] = json!(df.is_zero());
    report["twist_differential"] = df.to_json(lr.ring());
    report["scope"] = json!("finite overlap resolvability");
    Ok(report.into())
}

pub fn normal_form(job: &Job, lr: &LieRinehart, mode: Mode, strategy: Strategy) -> CliResult<Outcome> {
    let f = two_form(lr, job.cochain_or_zero(lr, 2)?, "twist")?;
    let word = job.word(lr)?;
    let sys = RewriteSystem::new(lr.clone(), f, mode)?;
    let u = sys.normal_form_with(&word, strategy);
    Ok(json!({
        "mode": mode,
        "strategy": strategy,
        "word": format_word(&word, lr.ring()),
        "normal_form": u.to_json(lr.ring()),
        "text": u.format(lr.ring()),
    })
    .into())
}

pub fn rank_table(max: usize) -> CliResult<Outcome> {
    let mut rows = Vec::new();
    let mut all = true;
    for l in 1..=max {
        for k in 1..=max {
            for i in 1..=max {
                let c = rank_check(k, i, l);
                all &= c.agrees;
                rows.push(json!({
                    "l": l, "k": k, "i": i,
                    "enumerated": c.enumerated,
                    "formula": c.formula,
                    "agrees": c.agrees,
                }));
            }
        }
    }
    Ok(json!({ "max": max, "all_agree": all, "rows": rows }).into())
}

pub fn vki(job: &Job, lr: &LieRinehart, k: Option<usize>, i: Option<usize>) -> CliResult<Outcome> {
    let k = required(k, "--k")?;
    let i = required(i, "--i")?;
    let f = two_form(lr, job.cochain_or_zero(lr, 2)?, "twist")?;
    let sys = RewriteSystem::new(lr.clone(), f, Mode::Twisted)?;
    let module = build_vki(&sys, k, i)?;
    let mut report = module.to_json(&module.curvature_report());
    report["filtration"] = json!("degree window");
    Ok(report.into())
}

pub fn chern(job: &Job, lr: &LieRinehart, window: u32) -> CliResult<Outcome> {
    let ring = lr.ring();
    let conn = job.connection(lr)?;
    let curvature = conn.curvature();
    let trace = curvature.trace();
    let c1 = conn.c1(window)?;
    let ch = conn.chern_character();
    let zero = Cochain::zero(2, lr.rank(), lr.nvars());
    let mut report = json!({
        "rank": conn.rank(),
        "curvature": curvature.to_json(ring),
        "trace": trace.to_json(ring),
        "c1": c1.representative().to_json(ring),
        "c1_is_zero": class_equal(lr, &trace, &zero, window)?,
        "ch": ch.to_json(ring),
    });
    if let Some(f) = job.cochain(lr)? {
        let f = two_form(lr, f, "curvature type")?;
        let t = conn.is_curvature_type(&f);
        // The formula is normalized to rank 1 in degree 0, so only positive degrees are compared.
        let formula = scalar_type_character(conn.rank(), &f);
        let positive = |e: &EvenClassPolynomial| e.components().iter().skip(1).cloned().collect::<Vec<_>>();
        report["curvature_type"] = json!({
            "holds": t.holds,
            "deviation": t.deviation.to_json(ring),
            "formula": formula.to_json(ring),
            "ch_matches_formula": t.holds && positive(&formula) == positive(&ch),
        });
    }
    Ok(report.into())
}

pub fn psi(job: &Job, lr: &LieRinehart, k: Option<usize>, i: Option<usize>, d: Option<usize>, window: u32) -> CliResult<Outcome> {
    let k = required(k, "--k")?;
    let i = required(i, "--i")?;
    let ring = lr.ring();
    let c = job.cochain(lr)?.ok_or_else(|| CliError::Usage("job has no `cochain`".into()))?;
    let c = two_form(lr, c, "class")?;
    if !c.is_cocycle(lr) {
        return Err(workbench_core::Error::NotCocycle("class passed to psi".into()).into());
    }
    let psi = psi_formal(lr, &c, k, i)?;
    let mut report = json!({
        "k": k,
        "i": i,
        "psi": psi.to_json(ring),
        "c1_matches": class_equal(lr, &psi.c1(), &c, window)?,
    });
    if let Some(d) = d {
        let line = line_class(lr, &c, k, i, d)?;
        report["line"] = json!({
            "d": d,
            "ledger": line.to_json(ring),
            "invertible": line.rank() == 1,
            "no_flat_connection_possible": flatness_obstructed(lr, &line, window)?,
        });
    }
    Ok(report.into())
}

pub fn kernel_demo(job: &Job, lr: &LieRinehart, window: u32) -> CliResult<Outcome> {
    let ring = lr.ring();
    let classes = job.classes(lr)?;
    let n = classes.len();
    let input = KernelInput {
        classes,
        ks: job.k_list.clone().unwrap_or_else(|| vec![1; n]),
        is: job.i_list.clone().unwrap_or_else(|| vec![1; n]),
        balance: job.balance.unwrap_or((1, 1)),
    };
    let eta = kernel_eta(lr, &input)?;
    let omega = kernel_omega(lr, &input, window)?;
    Ok(json!({
        "eta_minus_one": eta.to_json(ring),
        "omega": omega.to_json(ring),
        "verified": {
            "ch_eta_minus_one_vanishes": eta.character_vanishes,
            "c1_omega_vanishes": omega.c1_vanishes,
        },
        "relations": "atoms are free generators; no isomorphism relations are imposed",
    })
    .into())
}

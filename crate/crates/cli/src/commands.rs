use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use ordgeo::corpus::{self, sequent_matches};
use ordgeo::formula::parse_formula_with;
use ordgeo::geometry::{axiom, expand_defs};
use ordgeo::kernel::{check_proof, parse_proof_with, print_proof, Proof, Report};
use ordgeo::models::find_countermodel_with;
use ordgeo::search::{max_depth, prove, prove_staged, suggested_lemmas, SearchConfig, SearchStatus};
use ordgeo::{Formula, Signature};
use serde_json::{json, Value};

use crate::report::{Verdict, EXIT_CHECK_FAILED, EXIT_EXPECTATION, EXIT_PARSE, EXIT_SEARCH_FAILED};

/// Maps `f` over `items` on up to `jobs` threads, keeping input order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    let workers = jobs.clamp(1, items.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().unwrap() = Some(r);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().unwrap().expect("filled")).collect()
}

/// Without `keep_going`, drops everything after the first failure.
pub fn stop_at_first_failure(mut v: Vec<Verdict>, keep_going: bool) -> Vec<Verdict> {
    if !keep_going {
        if let Some(i) = v.iter().position(|x| !x.pass) {
            v.truncate(i + 1);
        }
    }
    v
}

fn expand_proof(p: &mut Proof) -> Result<(), String> {
    let ex = |f: &Formula| expand_defs(f).map_err(|e| e.to_string());
    p.premises = p.premises.iter().map(ex).collect::<Result<_, _>>()?;
    p.show = p.show.as_ref().map(ex).transpose()?;
    for l in &mut p.lines {
        l.formula = ex(&l.formula)?;
    }
    Ok(())
}

fn verdict_for(item: String, proof: Result<Proof, String>) -> Verdict {
    let proof = match proof {
        Ok(p) => p,
        Err(e) => return Verdict::fail(&item, "parse-error", EXIT_PARSE, format!("{item}: {e}"), json!({ "error": e })),
    };
    match check_proof(&proof) {
        Report::Valid { sequent } => Verdict::pass(
            &item,
            "valid",
            format!("{item}: valid ({} lines): {sequent}", proof.lines.len()),
            json!({ "sequent": sequent.to_string(), "lines": proof.lines.len() }),
        ),
        Report::FirstFailure(v) => Verdict::fail(
            &item,
            "invalid",
            EXIT_CHECK_FAILED,
            format!("{item}: {v}"),
            serde_json::to_value(&v).expect("serializable"),
        ),
    }
}

pub fn check(paths: &[PathBuf], sig: &Signature, expand: bool, jobs: usize, keep_going: bool) -> Vec<Verdict> {
    let all = parallel_map(paths, jobs, |path| {
        let item = path.display().to_string();
        let proof = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read: {e}"))
            .and_then(|src| parse_proof_with(&src, sig).map_err(|e| e.to_string()))
            .and_then(|mut p| {
                if expand {
                    expand_proof(&mut p)?;
                }
                Ok(p)
            });
        verdict_for(item, proof)
    });
    stop_at_first_failure(all, keep_going)
}

/// A catalog name, or else a formula in the configured signature.
pub fn resolve(name: &str, sig: &Signature, expand: bool) -> Result<Formula, String> {
    let f = match axiom(name.trim()) {
        Ok(f) => f,
        Err(_) => parse_formula_with(name, sig).map_err(|e| format!("`{name}` is not a catalog name or formula: {e}"))?,
    };
    if expand {
        expand_defs(&f).map_err(|e| e.to_string())
    } else {
        Ok(f)
    }
}

pub fn resolve_all(names: &[String], sig: &Signature, expand: bool) -> Result<Vec<Formula>, String> {
    names.iter().filter(|n| !n.trim().is_empty()).map(|n| resolve(n, sig, expand)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Staged when a lemma is suggested, direct otherwise.
    Auto,
    Staged,
    Direct,
}

pub struct ProveRequest<'a> {
    pub from: &'a [String],
    pub goal: &'a str,
    pub mode: Mode,
    pub out: Option<&'a Path>,
    pub cfg: SearchConfig,
}

pub fn prove_cmd(req: &ProveRequest, sig: &Signature, expand: bool) -> Verdict {
    let item = format!("{} |- {}", req.from.join(","), req.goal);
    let (premises, goal) = match resolve_all(req.from, sig, expand).and_then(|p| Ok((p, resolve(req.goal, sig, expand)?))) {
        Ok(x) => x,
        Err(e) => return Verdict::fail(&item, "parse-error", EXIT_PARSE, e.clone(), json!({ "error": e })),
    };
    let lemmas = match req.mode {
        Mode::Direct => Vec::new(),
        Mode::Auto | Mode::Staged => suggested_lemmas(&premises, &goal),
    };
    let staged = !lemmas.is_empty();
    let r = if staged { prove_staged(&premises, &lemmas, &goal, &req.cfg) } else { prove(&premises, &goal, &req.cfg) };
    let stats = serde_json::to_value(&r.stats).expect("serializable");
    let mode = if staged { "staged" } else { "direct" };
    match r.status {
        SearchStatus::Proved(p) => {
            let script = print_proof(&p);
            let mut detail = json!({ "mode": mode, "lines": p.lines.len(), "depth": max_depth(&p), "stats": stats });
            let text = match req.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &script) {
                        let msg = format!("cannot write {}: {e}", path.display());
                        return Verdict::fail(&item, "io-error", EXIT_PARSE, msg.clone(), json!({ "error": msg }));
                    }
                    format!("proved ({mode}, {} lines), written to {}", p.lines.len(), path.display())
                }
                None => {
                    detail["script"] = Value::String(script.clone());
                    script
                }
            };
            Verdict::pass(&item, "proved", text, detail)
        }
        status => {
            let verdict = if status == SearchStatus::Exhausted { "exhausted" } else { "budget-exceeded" };
            let s = &r.stats;
            let text = format!(
                "{item}: {verdict} ({mode}; {} instances, {} propagation rounds, {} splits, {} ms)",
                s.instantiations,
                s.propagation_rounds,
                s.splits_tried,
                s.wall_time.as_millis()
            );
            Verdict::fail(&item, verdict, EXIT_SEARCH_FAILED, text, json!({ "mode": mode, "stats": stats }))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expect {
    None,
    Counter,
}

pub fn models_cmd(
    from: &[String],
    goal: &str,
    max_size: usize,
    expect: Option<Expect>,
    sig: &Signature,
    expand: bool,
    jobs: usize,
) -> Verdict {
    let item = format!("{} |= {}", from.join(","), goal);
    let (premises, goal) = match resolve_all(from, sig, expand).and_then(|p| Ok((p, resolve(goal, sig, expand)?))) {
        Ok(x) => x,
        Err(e) => return Verdict::fail(&item, "parse-error", EXIT_PARSE, e.clone(), json!({ "error": e })),
    };
    match find_countermodel_with(&premises, &goal, max_size, jobs) {
        Err(e) => {
            let msg = format!("{item}: cannot evaluate: {e}");
            Verdict::fail(&item, "parse-error", EXIT_PARSE, msg, json!({ "error": e.to_string() }))
        }
        Ok(Some(s)) => {
            let text = format!("{item}: countermodel of size {}: {s}", s.size);
            let detail = serde_json::to_value(s.record()).expect("serializable");
            if expect == Some(Expect::None) {
                Verdict::fail(&item, "countermodel", EXIT_EXPECTATION, text, detail)
            } else {
                Verdict::pass(&item, "countermodel", text, detail)
            }
        }
        Ok(None) => {
            let text = format!("{item}: no countermodel up to {max_size}");
            let detail = json!({ "max_size": max_size });
            if expect == Some(Expect::Counter) {
                Verdict::fail(&item, "no-countermodel", EXIT_EXPECTATION, text, detail)
            } else {
                Verdict::pass(&item, "no-countermodel", text, detail)
            }
        }
    }
}

/// Checks every corpus entry against its declared sequent.
pub fn corpus_cmd(dir: Option<&Path>, jobs: usize, keep_going: bool) -> Vec<Verdict> {
    let all = parallel_map(corpus::entries(), jobs, |e| {
        let loaded = match dir {
            Some(d) => corpus::load_from_dir(d, e.id),
            None => corpus::load(e.id),
        };
        let (proof, declared) = match loaded {
            Ok(x) => x,
            Err(err) => {
                let msg = err.to_string();
                return Verdict::fail(e.id, "parse-error", EXIT_PARSE, format!("{}: {msg}", e.id), json!({ "error": msg }));
            }
        };
        match check_proof(&proof) {
            Report::Valid { sequent } if sequent_matches(&sequent, &declared) => Verdict::pass(
                e.id,
                "valid",
                format!("{}: valid ({} lines): {sequent}", e.id, proof.lines.len()),
                json!({ "sequent": sequent.to_string(), "lines": proof.lines.len() }),
            ),
            Report::Valid { sequent } => Verdict::fail(
                e.id,
                "sequent-mismatch",
                EXIT_CHECK_FAILED,
                format!("{}: certifies {sequent}, expected {declared}", e.id),
                json!({ "sequent": sequent.to_string(), "declared": declared.to_string() }),
            ),
            Report::FirstFailure(v) => Verdict::fail(
                e.id,
                "invalid",
                EXIT_CHECK_FAILED,
                format!("{}: {v}", e.id),
                serde_json::to_value(&v).expect("serializable"),
            ),
        }
    });
    stop_at_first_failure(all, keep_going)
}

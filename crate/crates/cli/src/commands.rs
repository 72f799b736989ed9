use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use pexpl_bench::{
    assign_random_weights, backbone_query, build_office_robot, gen_random_cnf, make_human_scenario, run_suite,
    Algorithm, BenchConfig, RobotWeights, Summary,
};
use pexpl_core::explanation::{
    model_reconciling_explanation, monolithic_explanation, most_preferred, prob_model_reconciling, prob_monolithic,
    KBound, MonolithicExplanation, ReconcilingExplanation,
};
use pexpl_core::formula::{
    classical_projection, parse_cnf, parse_query, parse_wcnf, write_cnf, write_query, write_wcnf, BeliefBase, Clause,
    KnowledgeBase, Query,
};
use pexpl_core::probability::{self, Distribution, Event};
use serde_json::{json, Value};

use crate::oracle;
use crate::output::{fmt_opt, fmt_prob, render, render_line, Failure, Outcome};
use crate::{BenchArgs, Command, Explain, Gen, ProbArgs, TopkArgs};

type Result<T> = std::result::Result<T, Failure>;

const ORACLE_TOL: f64 = 1e-9;

pub fn name(cmd: &Command) -> String {
    match cmd {
        Command::Prob(_) => "prob".into(),
        Command::Topk(_) => "topk".into(),
        Command::Bench(_) => "bench".into(),
        Command::Explain(e) => format!(
            "explain {}",
            match e {
                Explain::Mono { .. } => "mono",
                Explain::Mrp { .. } => "mrp",
                Explain::Pmono { .. } => "pmono",
                Explain::Pmrp { .. } => "pmrp",
                Explain::Preferred { .. } => "preferred",
            }
        ),
        Command::Gen(g) => format!(
            "gen {}",
            match g {
                Gen::Random { .. } => "random",
                Gen::Scenario { .. } => "scenario",
                Gen::Robot { .. } => "robot",
            }
        ),
    }
}

pub fn run(cmd: Command) -> Result<Outcome> {
    let start = Instant::now();
    let mut out = match cmd {
        Command::Prob(a) => prob(a)?,
        Command::Explain(e) => explain(e)?,
        Command::Topk(a) => topk(a)?,
        Command::Gen(g) => gen(g)?,
        Command::Bench(a) => bench(a)?,
    };
    if let Value::Object(map) = &mut out.payload {
        map.insert("elapsed_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
    }
    Ok(out)
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_cnf(path: &Path) -> Result<KnowledgeBase> {
    parse_cnf(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_wcnf(path: &Path) -> Result<BeliefBase> {
    parse_wcnf(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn read_query(path: &Path) -> Result<Query> {
    parse_query(&read(path)?).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

/// Like `read_query`, but tautological clause lines are dropped since they
/// hold in every world. `None` means nothing is left, i.e. the query is true.
fn read_query_lenient(path: &Path) -> Result<Option<Query>> {
    let bytes = read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let kept: String = text
        .lines()
        .filter(|line| {
            let lits: Vec<i64> = line.split_whitespace().filter_map(|t| t.parse().ok()).collect();
            let tautology = lits.iter().any(|&l| l != 0 && lits.contains(&-l));
            let clause = line.trim_start().starts_with(|c: char| c == '-' || c.is_ascii_digit());
            !(clause && tautology)
        })
        .map(|l| format!("{l}\n"))
        .collect();
    if !kept.lines().any(|l| l.trim_start().starts_with(|c: char| c == '-' || c.is_ascii_digit())) {
        return Ok(None);
    }
    parse_query(kept.as_bytes()).map(Some).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn clause_list(cs: &[Clause], idx: &[usize]) -> Vec<Vec<i32>> {
    idx.iter().map(|&i| render(&cs[i])).collect()
}

fn table(cs: &[Clause], idx: &[usize]) -> String {
    idx.iter().map(|&i| format!("  [{i}] {}\n", render_line(&cs[i]))).collect()
}

fn prob(a: ProbArgs) -> Result<Outcome> {
    let base = read_wcnf(&a.wcnf)?;
    let q = read_query_lenient(&a.query)?;
    let given: Vec<Clause> = match &a.given {
        Some(p) => read_query(p)?.clauses().to_vec(),
        None => Vec::new(),
    };
    let n = base
        .num_vars()
        .max(q.as_ref().map_or(0, Query::max_var))
        .max(given.iter().map(Clause::max_var).max().unwrap_or(0));
    let value = match &q {
        Some(q) if a.given.is_some() => probability::cond_prob(&base, q, &given)?,
        Some(q) => probability::prob(&base, q)?,
        None => Distribution::with_vars(&base, n)?.cond(&Event::always(), &Event::all(&given))?,
    };
    let mut payload = json!({ "probability": value, "num_vars": n, "conditioned": a.given.is_some() });
    let mut text = format!("{}\n", fmt_prob(value));
    if a.oracle {
        let reference = oracle::prob(&base, q.as_ref(), &given, n)
        .map_err(Failure::input)?
        .ok_or(pexpl_core::Error::ZeroProbability)?;
        let agrees = (reference - value).abs() <= ORACLE_TOL;
        payload["oracle"] = json!({ "probability": reference, "agrees": agrees });
        text.push_str(&format!("oracle {} {}\n", fmt_prob(reference), if agrees { "agrees" } else { "DIFFERS" }));
        if !agrees {
            return Err(Failure { code: 1, message: format!("oracle mismatch: {value} vs {reference}") });
        }
    }
    Ok(Outcome::new(text, payload))
}

fn mono_payload(kb: &KnowledgeBase, e: &MonolithicExplanation) -> Value {
    json!({
        "indices": e.clause_indices,
        "clauses": clause_list(kb.clauses(), &e.clause_indices),
        "entails_query": e.entails_query,
        "metrics": e.metrics,
    })
}

fn mono_text(kb: &KnowledgeBase, e: &MonolithicExplanation) -> String {
    let mut s = format!("explanation: {} clauses\n", e.clause_indices.len());
    s.push_str(&table(kb.clauses(), &e.clause_indices));
    if let Some(m) = &e.metrics {
        s.push_str(&format!(
            "P(q) {}\nP(q|e) {}\nP(e) {}\ngain {}\npower {}\n",
            fmt_prob(m.prob_query),
            fmt_prob(m.prob_query_given),
            fmt_prob(m.prob_explanation),
            fmt_prob(m.gain),
            fmt_prob(m.power)
        ));
    }
    s
}

fn kbound_text(b: &KBound) -> String {
    format!("k requested {} achieved {} lower bound {}\n", b.k_requested, b.k_achieved, fmt_opt(b.lower_bound))
}

fn reconcile_payload(agent: &KnowledgeBase, human: &[Clause], e: &ReconcilingExplanation) -> Value {
    json!({
        "epsilon_plus": { "indices": e.epsilon_plus, "clauses": clause_list(agent.clauses(), &e.epsilon_plus) },
        "epsilon_minus": { "indices": e.epsilon_minus, "clauses": clause_list(human, &e.epsilon_minus) },
        "retracted": { "indices": e.retracted, "clauses": clause_list(human, &e.retracted) },
        "metrics": e.metrics,
    })
}

fn reconcile_text(agent: &KnowledgeBase, human: &[Clause], e: &ReconcilingExplanation) -> String {
    let mut s = format!("additions from the agent: {}\n", e.epsilon_plus.len());
    s.push_str(&table(agent.clauses(), &e.epsilon_plus));
    s.push_str(&format!("retractions from the human: {}\n", e.epsilon_minus.len()));
    s.push_str(&table(human, &e.epsilon_minus));
    if let Some(m) = &e.metrics {
        s.push_str(&format!(
            "P(q) {}\nP(q|e+) {}\nP(e+) {}\nP(e+|not e-) {}\ngain {}\npower {}\n",
            fmt_prob(m.prob_query),
            fmt_prob(m.prob_query_given_plus),
            fmt_prob(m.prob_plus),
            fmt_opt(m.prob_plus_given_not_minus),
            fmt_prob(m.gain),
            fmt_prob(m.power)
        ));
    }
    s
}

fn explain(e: Explain) -> Result<Outcome> {
    match e {
        Explain::Mono { cnf, query } => {
            let kb = read_cnf(&cnf)?;
            let q = read_query(&query)?;
            let ex = monolithic_explanation(&kb, &q)?;
            Ok(Outcome::new(mono_text(&kb, &ex), mono_payload(&kb, &ex)))
        }
        Explain::Mrp { agent, human, query } => {
            let agent = read_cnf(&agent)?;
            let human = read_cnf(&human)?;
            let q = read_query(&query)?;
            let ex = model_reconciling_explanation(&agent, &human, &q)?;
            Ok(Outcome::new(
                reconcile_text(&agent, human.clauses(), &ex),
                reconcile_payload(&agent, human.clauses(), &ex),
            ))
        }
        Explain::Pmono { wcnf, query, k, gamma } => {
            let base = read_wcnf(&wcnf)?;
            let q = read_query(&query)?;
            let (ex, bound) = prob_monolithic(&base, &q, k, gamma)?;
            let kb = classical_projection(&base);
            let mut payload = mono_payload(&kb, &ex);
            payload["k_bound"] = json!(bound);
            Ok(Outcome::new(format!("{}{}", mono_text(&kb, &ex), kbound_text(&bound)), payload))
        }
        Explain::Pmrp { agent, human, query, k, gamma } => {
            let agent = read_cnf(&agent)?;
            let human = read_wcnf(&human)?;
            let q = read_query(&query)?;
            let (ex, bound) = prob_model_reconciling(&agent, &human, &q, k, gamma)?;
            let hc = classical_projection(&human);
            let mut payload = reconcile_payload(&agent, hc.clauses(), &ex);
            payload["k_bound"] = json!(bound);
            if let Some(m) = &ex.metrics {
                let (first, second) = m.conditions();
                payload["conditions"] = json!({ "raises_query": first, "retraction_matters": second });
            }
            let text = format!("{}{}", reconcile_text(&agent, hc.clauses(), &ex), kbound_text(&bound));
            Ok(Outcome::new(text, payload))
        }
        Explain::Preferred { wcnf, query, budget, gamma } => {
            let base = read_wcnf(&wcnf)?;
            let q = read_query(&query)?;
            let p = most_preferred(&base, &q, budget, gamma)?;
            let kb = classical_projection(&base);
            let mut payload = mono_payload(&kb, &p.explanation);
            payload["candidates"] = json!(p.candidates);
            payload["exhaustive"] = json!(p.exhaustive);
            let text = format!(
                "{}candidates {}{}\n",
                mono_text(&kb, &p.explanation),
                p.candidates,
                if p.exhaustive { "" } else { " (budget reached)" }
            );
            Ok(Outcome::new(text, payload))
        }
    }
}

fn topk(a: TopkArgs) -> Result<Outcome> {
    let base = read_wcnf(&a.wcnf)?;
    let q = read_query(&a.query)?;
    let worlds = probability::top_k_worlds(&base, &q, a.k)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for (i, w) in worlds.iter().enumerate() {
        let lits = w.world.to_dimacs();
        let shown: Vec<String> = lits.iter().map(i32::to_string).collect();
        text.push_str(&format!("{} {} {}\n", i + 1, fmt_prob(w.probability), shown.join(" ")));
        rows.push(json!({ "rank": i + 1, "probability": w.probability, "score": w.score, "world": lits }));
    }
    let mut out = Outcome::new(text, json!({ "k_requested": a.k, "worlds": rows }));
    if worlds.len() < a.k {
        out.warnings.push(format!("only {} worlds satisfy the query; returning all of them", worlds.len()));
    }
    if a.oracle {
        let n = base.num_vars().max(q.max_var());
        let reference = oracle::ranking(&base, &q, n).map_err(Failure::input)?;
        let agrees = reference.len() >= worlds.len()
            && worlds.iter().zip(&reference).all(|(w, (values, p))| {
                w.world.values() == values.as_slice() && (w.probability - p).abs() <= ORACLE_TOL
            });
        out.payload["oracle"] = json!({ "agrees": agrees });
        out.text.push_str(if agrees { "oracle agrees\n" } else { "oracle DIFFERS\n" });
        if !agrees {
            return Err(Failure { code: 1, message: "oracle ranking differs".into() });
        }
    }
    Ok(out)
}

/// Writes `bytes` to `path`, or returns them as text when no path is given.
fn emit(path: Option<&Path>, bytes: &[u8], files: &mut Vec<Value>, meta: Value, stdout: &mut String) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Failure::input(format!("{}: {e}", dir.display())))?;
            }
            fs::write(p, bytes).map_err(|e| Failure::input(format!("{}: {e}", p.display())))?;
            let mut m = meta;
            m["path"] = json!(p.display().to_string());
            stdout.push_str(&format!("wrote {}\n", p.display()));
            files.push(m);
        }
        None => {
            stdout.push_str(&String::from_utf8_lossy(bytes));
            files.push(meta);
        }
    }
    Ok(())
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn gen(g: Gen) -> Result<Outcome> {
    let mut files = Vec::new();
    let mut text = String::new();
    match g {
        Gen::Random { vars, clauses, width, seed, out, weights, query_literals } => {
            let kb = gen_random_cnf(vars, clauses, width, seed)?;
            let meta = json!({ "vars": kb.num_vars(), "clauses": kb.len() });
            match &weights {
                Some(w) => {
                    let base = assign_random_weights(&kb, w[0], w[1], seed)?;
                    let path = out.as_deref().map(|p| with_ext(p, "wcnf"));
                    emit(path.as_deref(), &write_wcnf(&base), &mut files, meta, &mut text)?;
                }
                None => {
                    let path = out.as_deref().map(|p| with_ext(p, "cnf"));
                    emit(path.as_deref(), &write_cnf(&kb), &mut files, meta, &mut text)?;
                }
            }
            if let Some(m) = query_literals {
                let q = backbone_query(&kb, m, seed)?;
                let path = out.as_deref().map(|p| with_ext(p, "query"));
                emit(path.as_deref(), &write_query(&q), &mut files, json!({ "clauses": q.clauses().len() }), &mut text)?;
            }
        }
        Gen::Scenario { cnf, level, seed, out } => {
            let kb = read_cnf(&cnf)?;
            let human = make_human_scenario(&kb, level, seed)?;
            let meta = json!({ "vars": human.num_vars(), "clauses": human.len(), "source_clauses": kb.len() });
            emit(out.as_deref(), &write_cnf(&human), &mut files, meta, &mut text)?;
        }
        Gen::Robot { horizon, weights, out } => {
            if horizon == 0 {
                return Err(Failure::input("horizon must be at least 1"));
            }
            let w = match weights {
                Some(v) => {
                    if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                        return Err(Failure::input("robot weights must be positive and finite"));
                    }
                    RobotWeights([v[0], v[1], v[2], v[3], v[4], v[5]])
                }
                None => RobotWeights::default(),
            };
            let robot = build_office_robot(horizon, w);
            let mut bytes: Vec<u8> =
                robot.names.iter().enumerate().flat_map(|(i, n)| format!("c {} {n}\n", i + 1).into_bytes()).collect();
            bytes.extend(write_wcnf(&robot.base));
            let meta = json!({ "vars": robot.base.num_vars(), "clauses": robot.base.len(), "horizon": horizon });
            emit(out.as_deref(), &bytes, &mut files, meta, &mut text)?;
        }
    }
    Ok(Outcome::new(text, json!({ "files": files })))
}

fn bench(a: BenchArgs) -> Result<Outcome> {
    let algorithm: Algorithm = a.alg.parse().map_err(|_| Failure::input(format!("unknown algorithm `{}`", a.alg)))?;
    if !(a.timeout > 0.0 && a.timeout.is_finite()) {
        return Err(Failure::input("timeout must be positive"));
    }
    let mut config = BenchConfig::new(&a.suite, algorithm);
    config.k_hat = a.k;
    config.gamma = a.gamma;
    config.timeout = Duration::from_secs_f64(a.timeout);
    config.seed = a.seed;
    config.output = Some(a.out.clone());
    config.jobs = a.jobs;
    let records = run_suite(&config)?;
    let summary = Summary::of(&records, &config);
    let mut text = String::from("id status runtime size plus minus\n");
    let dash = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |x| x.to_string());
    for r in &records {
        text.push_str(&format!(
            "{} {} {:.3} {} {} {}\n",
            r.id,
            serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            r.runtime,
            dash(r.size),
            dash(r.plus_size),
            dash(r.minus_size)
        ));
    }
    text.push_str(&format!(
        "{}: {} instances, S={} T/O={} errors={}, mean runtime {}\n",
        summary.algorithm,
        summary.instances,
        summary.solved,
        summary.timeout,
        summary.errors,
        summary.mean_runtime.map_or_else(|| "-".to_string(), |m| format!("{m:.3}s"))
    ));
    Ok(Outcome::new(text, json!({ "summary": summary, "out": a.out.display().to_string() })))
}

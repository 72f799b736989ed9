use std::collections::VecDeque;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use pexpl_core::explanation::{
    model_reconciling_with_deadline, monolithic_explanation_with_deadline, prob_model_reconciling_with_deadline,
    prob_monolithic_with_deadline, DEFAULT_GAMMA,
};
use pexpl_core::formula::{classical_projection, parse_cnf, parse_query, parse_wcnf, BeliefBase, KnowledgeBase, Query};
use pexpl_core::{Deadline, Error};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Grace period before a worker that ignores its deadline is abandoned.
pub const WATCHDOG_GRACE: Duration = Duration::from_millis(500);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Alg1,
    Alg2,
    Alg3,
    Alg4,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Alg1 => "alg1",
            Algorithm::Alg2 => "alg2",
            Algorithm::Alg3 => "alg3",
            Algorithm::Alg4 => "alg4",
        })
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Algorithm> {
        match s {
            "alg1" | "mono" => Ok(Algorithm::Alg1),
            "alg2" | "mrp" => Ok(Algorithm::Alg2),
            "alg3" | "pmono" => Ok(Algorithm::Alg3),
            "alg4" | "pmrp" => Ok(Algorithm::Alg4),
            _ => Err(BenchError::InvalidParameters(format!("unknown algorithm `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub suite: PathBuf,
    pub algorithm: Algorithm,
    pub k_hat: usize,
    pub gamma: f64,
    pub timeout: Duration,
    /// Recorded in the summary; loading a suite draws no randomness.
    pub seed: u64,
    pub output: Option<PathBuf>,
    /// Worker threads; 0 means one per available core.
    pub jobs: usize,
}

impl BenchConfig {
    pub fn new(suite: impl Into<PathBuf>, algorithm: Algorithm) -> BenchConfig {
        BenchConfig {
            suite: suite.into(),
            algorithm,
            k_hat: 10,
            gamma: DEFAULT_GAMMA,
            timeout: Duration::from_secs(500),
            seed: 0,
            output: None,
            jobs: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.timeout.is_zero() {
            return Err(BenchError::InvalidParameters("timeout must be positive".into()));
        }
        if self.k_hat == 0 {
            return Err(BenchError::InvalidParameters("k_hat must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(BenchError::InvalidParameters(format!("gamma {}", self.gamma)));
        }
        Ok(())
    }

    fn workers(&self) -> usize {
        if self.jobs > 0 {
            self.jobs
        } else {
            thread::available_parallelism().map_or(1, |n| n.get())
        }
    }
}

#[derive(Debug, Clone)]
pub enum Source {
    Cnf(KnowledgeBase),
    Wcnf(BeliefBase),
}

impl Source {
    pub fn kb(&self) -> KnowledgeBase {
        match self {
            Source::Cnf(kb) => kb.clone(),
            Source::Wcnf(b) => classical_projection(b),
        }
    }

    fn base(&self, what: &str) -> std::result::Result<BeliefBase, String> {
        match self {
            Source::Wcnf(b) => Ok(b.clone()),
            Source::Cnf(_) => Err(format!("{what} needs a weighted base")),
        }
    }
}

/// One benchmark problem. `primary` is the agent's base, `human` the
/// human's for the reconciling algorithms.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub primary: Source,
    pub human: Option<Source>,
    pub query: Query,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Solved,
    Timeout,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub id: String,
    pub status: Status,
    /// Seconds; the timeout itself for timed-out runs.
    pub runtime: f64,
    pub size: Option<usize>,
    pub plus_size: Option<usize>,
    pub minus_size: Option<usize>,
    pub k_achieved: Option<usize>,
    pub gain: Option<f64>,
    pub power: Option<f64>,
    pub prob_query: Option<f64>,
    pub prob_explanation: Option<f64>,
    pub message: Option<String>,
}

impl BenchRecord {
    fn empty(id: String, status: Status, runtime: f64) -> BenchRecord {
        BenchRecord {
            id,
            status,
            runtime,
            size: None,
            plus_size: None,
            minus_size: None,
            k_achieved: None,
            gain: None,
            power: None,
            prob_query: None,
            prob_explanation: None,
            message: None,
        }
    }

    fn failed(id: String, message: String) -> BenchRecord {
        BenchRecord { message: Some(message), ..BenchRecord::empty(id, Status::Error, 0.0) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub algorithm: Algorithm,
    pub instances: usize,
    pub solved: usize,
    pub timeout: usize,
    pub errors: usize,
    /// Mean over solved instances.
    pub mean_runtime: Option<f64>,
    pub timeout_secs: f64,
    pub k_hat: usize,
    pub gamma: f64,
    pub seed: u64,
}

impl Summary {
    pub fn of(records: &[BenchRecord], config: &BenchConfig) -> Summary {
        let count = |s| records.iter().filter(|r| r.status == s).count();
        let solved: Vec<f64> = records.iter().filter(|r| r.status == Status::Solved).map(|r| r.runtime).collect();
        Summary {
            algorithm: config.algorithm,
            instances: records.len(),
            solved: solved.len(),
            timeout: count(Status::Timeout),
            errors: count(Status::Error),
            mean_runtime: (!solved.is_empty()).then(|| solved.iter().sum::<f64>() / solved.len() as f64),
            timeout_secs: config.timeout.as_secs_f64(),
            k_hat: config.k_hat,
            gamma: config.gamma,
            seed: config.seed,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| BenchError::Io { path: path.to_path_buf(), source })
}

fn load_source(dir: &Path, stem: &str) -> Result<Option<Source>> {
    let wcnf = dir.join(format!("{stem}.wcnf"));
    if wcnf.exists() {
        let b = parse_wcnf(&read(&wcnf)?).map_err(|source| BenchError::Parse { path: wcnf.clone(), source })?;
        return Ok(Some(Source::Wcnf(b)));
    }
    let cnf = dir.join(format!("{stem}.cnf"));
    if cnf.exists() {
        let kb = parse_cnf(&read(&cnf)?).map_err(|source| BenchError::Parse { path: cnf.clone(), source })?;
        return Ok(Some(Source::Cnf(kb)));
    }
    Ok(None)
}

fn load_instance(dir: &Path, name: &str) -> Result<Instance> {
    let qpath = dir.join(format!("{name}.query"));
    let query = parse_query(&read(&qpath)?).map_err(|source| BenchError::Parse { path: qpath, source })?;
    let primary = load_source(dir, name)?
        .ok_or_else(|| BenchError::InvalidParameters(format!("{name}: no .cnf or .wcnf file")))?;
    let human = load_source(dir, &format!("{name}.human"))?;
    Ok(Instance { id: name.to_string(), primary, human, query })
}

/// Every `<name>.query` in `dir`, sorted by name. Instances that fail to
/// load are returned as errors in place.
pub fn load_suite(dir: &Path) -> Result<Vec<(String, Result<Instance>)>> {
    let entries = fs::read_dir(dir).map_err(|source| BenchError::Io { path: dir.to_path_buf(), source })?;
    let mut names = Vec::new();
    for e in entries {
        let e = e.map_err(|source| BenchError::Io { path: dir.to_path_buf(), source })?;
        let file = e.file_name().to_string_lossy().into_owned();
        if let Some(name) = file.strip_suffix(".query") {
            names.push(name.to_string());
        }
    }
    names.sort();
    Ok(names.into_iter().map(|n| (n.clone(), load_instance(dir, &n))).collect())
}

/// Runs the suite directory named by `config` and writes outputs if asked.
pub fn run_suite(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    let items = load_suite(&config.suite)?
        .into_iter()
        .map(|(id, r)| (id, r.map_err(|e| e.to_string())))
        .collect();
    let records = run_instances(items, config)?;
    if let Some(out) = &config.output {
        write_outputs(out, &records, &Summary::of(&records, config))?;
    }
    Ok(records)
}

/// Runs already-built instances; records come back in input order.
pub fn run_instances(
    items: Vec<(String, std::result::Result<Instance, String>)>,
    config: &BenchConfig,
) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    let mut records: Vec<Option<BenchRecord>> = vec![None; items.len()];
    let mut queue: VecDeque<(usize, String, Instance)> = VecDeque::new();
    for (i, (id, inst)) in items.into_iter().enumerate() {
        match inst {
            Ok(inst) => queue.push_back((i, id, inst)),
            Err(msg) => records[i] = Some(BenchRecord::failed(id, msg)),
        }
    }

    let (tx, rx) = mpsc::channel::<(usize, BenchRecord)>();
    let workers = config.workers();
    // Index, id and start time of every run in flight.
    let mut running: Vec<(usize, String, Instant)> = Vec::new();
    let limit = config.timeout + WATCHDOG_GRACE;
    loop {
        while running.len() < workers {
            let Some((i, id, inst)) = queue.pop_front() else { break };
            let tx = tx.clone();
            let cfg = config.clone();
            let start = Instant::now();
            running.push((i, id.clone(), start));
            thread::spawn(move || {
                let rec = run_one(id, &inst, &cfg, start);
                let _ = tx.send((i, rec));
            });
        }
        if running.is_empty() {
            break;
        }
        let now = Instant::now();
        let next = running.iter().map(|r| r.2 + limit).min().expect("non-empty");
        match rx.recv_timeout(next.saturating_duration_since(now)) {
            Ok((i, rec)) => {
                if let Some(pos) = running.iter().position(|r| r.0 == i) {
                    running.remove(pos);
                    records[i] = Some(rec);
                }
            }
            Err(mpsc::RecvTimeoutError::Timeout) => {
                let now = Instant::now();
                running.retain(|(i, id, start)| {
                    if now.duration_since(*start) >= limit {
                        records[*i] = Some(BenchRecord::empty(id.clone(), Status::Timeout, config.timeout.as_secs_f64()));
                        false
                    } else {
                        true
                    }
                });
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => unreachable!("sender held locally"),
        }
    }
    Ok(records.into_iter().map(|r| r.expect("every instance recorded")).collect())
}

fn run_one(id: String, inst: &Instance, cfg: &BenchConfig, start: Instant) -> BenchRecord {
    let deadline = Deadline::at(start + cfg.timeout);
    let outcome = solve(inst, cfg, deadline);
    let runtime = start.elapsed().as_secs_f64();
    let timeout = cfg.timeout.as_secs_f64();
    match outcome {
        Ok(mut rec) if runtime <= timeout => {
            rec.id = id;
            rec.runtime = runtime;
            rec
        }
        Ok(_) | Err(Failure::Core(Error::Timeout)) => BenchRecord::empty(id, Status::Timeout, timeout),
        Err(e) => BenchRecord { runtime, ..BenchRecord::failed(id, e.to_string()) },
    }
}

enum Failure {
    Core(Error),
    Input(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Input(s) => f.write_str(s),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Core(e)
    }
}

fn solve(inst: &Instance, cfg: &BenchConfig, deadline: Deadline) -> std::result::Result<BenchRecord, Failure> {
    let mut rec = BenchRecord::empty(String::new(), Status::Solved, 0.0);
    let human = || inst.human.as_ref().ok_or_else(|| Failure::Input("missing human base".into()));
    match cfg.algorithm {
        Algorithm::Alg1 => {
            let e = monolithic_explanation_with_deadline(&inst.primary.kb(), &inst.query, deadline)?;
            rec.size = Some(e.clause_indices.len());
        }
        Algorithm::Alg2 => {
            let e = model_reconciling_with_deadline(&inst.primary.kb(), &human()?.kb(), &inst.query, deadline)?;
            rec.plus_size = Some(e.epsilon_plus.len());
            rec.minus_size = Some(e.epsilon_minus.len());
        }
        Algorithm::Alg3 => {
            let base = inst.primary.base("alg3").map_err(Failure::Input)?;
            let (e, k) = prob_monolithic_with_deadline(&base, &inst.query, cfg.k_hat, cfg.gamma, deadline)?;
            rec.size = Some(e.clause_indices.len());
            rec.k_achieved = Some(k.k_achieved);
            if let Some(m) = e.metrics {
                rec.gain = Some(m.gain);
                rec.power = Some(m.power);
                rec.prob_query = Some(m.prob_query);
                rec.prob_explanation = Some(m.prob_explanation);
            }
        }
        Algorithm::Alg4 => {
            let hb = human()?.base("alg4 human model").map_err(Failure::Input)?;
            let (e, k) =
                prob_model_reconciling_with_deadline(&inst.primary.kb(), &hb, &inst.query, cfg.k_hat, cfg.gamma, deadline)?;
            rec.plus_size = Some(e.epsilon_plus.len());
            rec.minus_size = Some(e.epsilon_minus.len());
            rec.k_achieved = Some(k.k_achieved);
            if let Some(m) = e.metrics {
                rec.gain = Some(m.gain);
                rec.power = Some(m.power);
                rec.prob_query = Some(m.prob_query);
                rec.prob_explanation = Some(m.prob_plus);
            }
        }
    }
    Ok(rec)
}

/// `results.jsonl`, `summary.json` and `summary.csv` under `dir`.
pub fn write_outputs(dir: &Path, records: &[BenchRecord], summary: &Summary) -> Result<()> {
    let io = |source| BenchError::Io { path: dir.to_path_buf(), source };
    fs::create_dir_all(dir).map_err(io)?;
    let mut jsonl = Vec::new();
    for r in records {
        serde_json::to_writer(&mut jsonl, r)?;
        jsonl.push(b'\n');
    }
    fs::write(dir.join("results.jsonl"), jsonl).map_err(io)?;
    let mut js = serde_json::to_vec_pretty(summary)?;
    js.push(b'\n');
    fs::write(dir.join("summary.json"), js).map_err(io)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["algorithm", "instances", "S", "T/O", "errors", "runtime"])?;
    w.write_record([
        summary.algorithm.to_string(),
        summary.instances.to_string(),
        summary.solved.to_string(),
        summary.timeout.to_string(),
        summary.errors.to_string(),
        summary.mean_runtime.map_or(String::new(), |r| format!("{r:.6}")),
    ])?;
    let bytes = w.into_inner().map_err(|e| io(e.into_error()))?;
    let mut f = fs::File::create(dir.join("summary.csv")).map_err(io)?;
    f.write_all(&bytes).map_err(io)?;
    Ok(())
}

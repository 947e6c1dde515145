//! Runnable problems: the core proxies, a delay wrapper, additive noise and
//! an external-command adapter.
//!
//! In [`TimeMode::Virtual`] nothing sleeps and in-process evaluations
//! report zero seconds, so reruns produce identical logs. A delay is then
//! added to the reported time instead of being slept.

use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde_json::{Map, Value as Json};
use surrobench_core::problems::{EspProxy, HpoProxy, Objective, PipeProxy, Windwake, WindwakeConfig};
use surrobench_core::{Point, Rng, SearchSpace, Value, VarKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TimeMode {
    Real,
    Virtual,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluation {
    pub objective: f64,
    /// Seconds.
    pub eval_time: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("command `{command}` exited with {status}: {stderr}")]
    Exit { command: String, status: String, stderr: String },
    #[error("could not parse objective from output {0:?}")]
    Parse(String),
    #[error("command timed out after {0} s")]
    Timeout(f64),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub trait Problem: Send {
    fn id(&self) -> &str;
    fn space(&self) -> &SearchSpace;
    fn evaluate(&mut self, p: &Point, mode: TimeMode) -> Result<Evaluation, EvalError>;

    fn known_optimum(&self) -> Option<f64> {
        None
    }
}

/// An in-process objective.
pub struct Proxy<O> {
    id: String,
    objective: O,
}

impl<O: Objective + Send> Proxy<O> {
    pub fn new(id: &str, objective: O) -> Self {
        Self { id: id.into(), objective }
    }

    pub fn objective(&self) -> &O {
        &self.objective
    }
}

impl<O: Objective + Send> Problem for Proxy<O> {
    fn id(&self) -> &str {
        &self.id
    }

    fn space(&self) -> &SearchSpace {
        self.objective.space()
    }

    fn evaluate(&mut self, p: &Point, mode: TimeMode) -> Result<Evaluation, EvalError> {
        let start = Instant::now();
        let objective = self.objective.value(p);
        let eval_time = match mode {
            TimeMode::Real => start.elapsed().as_secs_f64(),
            TimeMode::Virtual => 0.0,
        };
        Ok(Evaluation { objective, eval_time })
    }

    fn known_optimum(&self) -> Option<f64> {
        self.objective.known_optimum()
    }
}

/// Adds a fixed artificial evaluation time.
pub struct Delayed<P> {
    inner: P,
    delay: f64,
}

impl<P: Problem> Delayed<P> {
    /// # Panics
    /// If `delay` is negative or not finite.
    pub fn new(inner: P, delay: f64) -> Self {
        assert!(delay.is_finite() && delay >= 0.0, "delay must be a nonnegative number of seconds");
        Self { inner, delay }
    }
}

impl<P: Problem> Problem for Delayed<P> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn space(&self) -> &SearchSpace {
        self.inner.space()
    }

    fn evaluate(&mut self, p: &Point, mode: TimeMode) -> Result<Evaluation, EvalError> {
        let mut e = self.inner.evaluate(p, mode)?;
        if mode == TimeMode::Real && self.delay > 0.0 {
            thread::sleep(Duration::from_secs_f64(self.delay));
        }
        e.eval_time += self.delay;
        Ok(e)
    }

    fn known_optimum(&self) -> Option<f64> {
        self.inner.known_optimum()
    }
}

/// Adds independent `N(0, sigma²)` noise to every measurement.
pub struct Noisy<P> {
    inner: P,
    sigma: f64,
    rng: Rng,
}

impl<P: Problem> Noisy<P> {
    pub fn new(inner: P, sigma: f64, seed: u64) -> Self {
        Self { inner, sigma, rng: Rng::stream(seed, 0x4015E) }
    }
}

impl<P: Problem> Problem for Noisy<P> {
    fn id(&self) -> &str {
        self.inner.id()
    }

    fn space(&self) -> &SearchSpace {
        self.inner.space()
    }

    fn evaluate(&mut self, p: &Point, mode: TimeMode) -> Result<Evaluation, EvalError> {
        let mut e = self.inner.evaluate(p, mode)?;
        e.objective += self.sigma * self.rng.normal();
        Ok(e)
    }
}

/// Runs an external command per evaluation.
///
/// `{input}` in the template is replaced by the path of a JSON file that
/// maps every variable name to its value (categories by label, inactive
/// variables included). The command runs under `sh -c` and must print a
/// single number on standard output.
pub struct Subprocess {
    id: String,
    template: String,
    space: SearchSpace,
    timeout: Option<Duration>,
    dir: tempfile::TempDir,
}

impl Subprocess {
    pub fn new(id: &str, template: &str, space: SearchSpace, timeout: Option<Duration>) -> std::io::Result<Self> {
        Ok(Self { id: id.into(), template: template.into(), space, timeout, dir: tempfile::tempdir()? })
    }

    /// Reads the space from a JSON file holding a serialised [`SearchSpace`].
    pub fn from_space_file(id: &str, template: &str, space_file: &Path, timeout: Option<Duration>) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(space_file)?;
        let space: SearchSpace =
            serde_json::from_str(&text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
        Self::new(id, template, space, timeout)
    }
}

/// The `{name: value}` object written for external commands.
pub fn point_json(space: &SearchSpace, p: &Point) -> Json {
    let mut map = Map::new();
    for (var, v) in space.variables().iter().zip(&p.values) {
        let value = match (&var.kind, v) {
            (VarKind::Categorical { categories }, Value::Cat(c)) => Json::from(categories[*c].clone()),
            (_, Value::Int(k)) => Json::from(*k),
            (_, other) => Json::from(other.as_f64()),
        };
        map.insert(var.name.clone(), value);
    }
    Json::Object(map)
}

impl Problem for Subprocess {
    fn id(&self) -> &str {
        &self.id
    }

    fn space(&self) -> &SearchSpace {
        &self.space
    }

    fn evaluate(&mut self, p: &Point, _mode: TimeMode) -> Result<Evaluation, EvalError> {
        let input = self.dir.path().join("point.json");
        std::fs::write(&input, point_json(&self.space, p).to_string())?;
        let command = self.template.replace("{input}", &input.to_string_lossy());

        let start = Instant::now();
        let mut child =
            Command::new("sh").arg("-c").arg(&command).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn()?;
        let mut stdout = child.stdout.take().expect("piped");
        let mut stderr = child.stderr.take().expect("piped");
        let out = thread::spawn(move || {
            let mut s = String::new();
            stdout.read_to_string(&mut s).map(|_| s)
        });
        let err = thread::spawn(move || {
            let mut s = String::new();
            let _ = stderr.read_to_string(&mut s);
            s
        });
        let status = loop {
            if let Some(status) = child.try_wait()? {
                break status;
            }
            if let Some(limit) = self.timeout {
                if start.elapsed() > limit {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Err(EvalError::Timeout(limit.as_secs_f64()));
                }
            }
            thread::sleep(Duration::from_millis(2));
        };
        let eval_time = start.elapsed().as_secs_f64();
        let stdout = out.join().expect("reader thread")?;
        let stderr = err.join().expect("reader thread");
        if !status.success() {
            return Err(EvalError::Exit { command, status: status.to_string(), stderr: stderr.trim().into() });
        }
        let objective: f64 = stdout.trim().parse().map_err(|_| EvalError::Parse(stdout.clone()))?;
        if !objective.is_finite() {
            return Err(EvalError::Parse(stdout));
        }
        Ok(Evaluation { objective, eval_time })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("unknown problem `{0}`")]
    Unknown(String),
    #[error("problem `{problem}` has no parameter `{key}`")]
    UnknownParam { problem: String, key: String },
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("{0}")]
    Invalid(String),
    #[error("the subprocess problem needs --command and --space-file")]
    MissingCommand,
}

/// A problem named on the command line, e.g. `esp-proxy` or
/// `pipe-proxy:d=5,radius=0.4`.
#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    Pipe { d: usize, radius: f64 },
    Esp { slots: usize, options: usize, window: usize, seed: u64 },
    Windwake(WindwakeConfig),
    Hpo,
    Subprocess { command: String, space_file: std::path::PathBuf, timeout: Option<f64> },
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, SpecError> {
    value.parse().map_err(|_| SpecError::BadValue { key: key.into(), value: value.into() })
}

impl ProblemSpec {
    pub const NAMES: [&'static str; 5] = ["pipe-proxy", "esp-proxy", "windwake-toy", "hpo-proxy", "subprocess"];

    pub fn parse(token: &str) -> Result<Self, SpecError> {
        let (name, rest) = token.split_once(':').unwrap_or((token, ""));
        let mut spec = match name {
            "pipe-proxy" => ProblemSpec::Pipe { d: 10, radius: 0.5 },
            "esp-proxy" => ProblemSpec::Esp { slots: 49, options: 8, window: 3, seed: 0 },
            "windwake-toy" => ProblemSpec::Windwake(WindwakeConfig::default()),
            "hpo-proxy" => ProblemSpec::Hpo,
            "subprocess" => ProblemSpec::Subprocess { command: String::new(), space_file: Default::default(), timeout: None },
            _ => return Err(SpecError::Unknown(token.into())),
        };
        for kv in rest.split(',').filter(|s| !s.is_empty()) {
            let (key, value) = kv.split_once('=').ok_or_else(|| SpecError::BadValue { key: kv.into(), value: String::new() })?;
            let unknown = || SpecError::UnknownParam { problem: name.into(), key: key.into() };
            match &mut spec {
                ProblemSpec::Pipe { d, radius } => match key {
                    "d" => *d = parse_num(key, value)?,
                    "radius" => *radius = parse_num(key, value)?,
                    _ => return Err(unknown()),
                },
                ProblemSpec::Esp { slots, options, window, seed } => match key {
                    "slots" => *slots = parse_num(key, value)?,
                    "options" => *options = parse_num(key, value)?,
                    "window" => *window = parse_num(key, value)?,
                    "seed" => *seed = parse_num(key, value)?,
                    _ => return Err(unknown()),
                },
                ProblemSpec::Windwake(c) => match key {
                    "turbines" => c.n_turbines = parse_num(key, value)?,
                    "scenarios" => c.n_scenarios = parse_num(key, value)?,
                    "field" => c.field_side = parse_num(key, value)?,
                    "rotor" => c.rotor_diameter = parse_num(key, value)?,
                    "spacing" => c.min_spacing_factor = parse_num(key, value)?,
                    "seed" => c.seed = parse_num(key, value)?,
                    _ => return Err(unknown()),
                },
                ProblemSpec::Hpo | ProblemSpec::Subprocess { .. } => return Err(unknown()),
            }
        }
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<(), SpecError> {
        let bad = |m: &str| Err(SpecError::Invalid(m.into()));
        match self {
            ProblemSpec::Pipe { d, radius } if *d == 0 || !(*radius > 0.0) => bad("pipe-proxy needs d >= 1 and radius > 0"),
            ProblemSpec::Esp { slots, options, window, .. } if *window < 2 || *slots <= *window || *options < 2 => {
                bad("esp-proxy needs window >= 2, slots > window and options >= 2")
            }
            ProblemSpec::Windwake(c) if c.n_turbines < 2 => bad("windwake-toy needs at least two turbines"),
            _ => Ok(()),
        }
    }

    /// The identifier written into run logs.
    pub fn id(&self) -> &'static str {
        match self {
            ProblemSpec::Pipe { .. } => "pipe-proxy",
            ProblemSpec::Esp { .. } => "esp-proxy",
            ProblemSpec::Windwake(_) => "windwake-toy",
            ProblemSpec::Hpo => "hpo-proxy",
            ProblemSpec::Subprocess { .. } => "subprocess",
        }
    }

    /// Whether evaluations run an external solver (a rules-tree feature).
    pub fn is_external(&self) -> bool {
        matches!(self, ProblemSpec::Subprocess { .. })
    }

    pub fn build(&self) -> Result<Box<dyn Problem>, SpecError> {
        let id = self.id();
        Ok(match self {
            ProblemSpec::Pipe { d, radius } => Box::new(Proxy::new(id, PipeProxy::with_radius(*d, *radius))),
            ProblemSpec::Esp { slots, options, window, seed } => {
                Box::new(Proxy::new(id, EspProxy::new(*slots, *options, *window, *seed)))
            }
            ProblemSpec::Windwake(c) => Box::new(Proxy::new(id, Windwake::new(c.clone()))),
            ProblemSpec::Hpo => Box::new(Proxy::new(id, HpoProxy::new())),
            ProblemSpec::Subprocess { command, space_file, timeout } => {
                if command.is_empty() || space_file.as_os_str().is_empty() {
                    return Err(SpecError::MissingCommand);
                }
                let timeout = timeout.map(Duration::from_secs_f64);
                Box::new(
                    Subprocess::from_space_file(id, command, space_file, timeout)
                        .map_err(|e| SpecError::Invalid(format!("{}: {e}", space_file.display())))?,
                )
            }
        })
    }
}

impl<P: Problem + ?Sized> Problem for Box<P> {
    fn id(&self) -> &str {
        (**self).id()
    }

    fn space(&self) -> &SearchSpace {
        (**self).space()
    }

    fn evaluate(&mut self, p: &Point, mode: TimeMode) -> Result<Evaluation, EvalError> {
        (**self).evaluate(p, mode)
    }

    fn known_optimum(&self) -> Option<f64> {
        (**self).known_optimum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use surrobench_core::sample_uniform;

    #[test]
    fn delay_adds_to_reported_time_without_sleeping_in_virtual_mode() {
        let base = Proxy::new("pipe-proxy", PipeProxy::new(3));
        let mut delayed = Delayed::new(Proxy::new("pipe-proxy", PipeProxy::new(3)), 0.1);
        let mut rng = Rng::new(1);
        let start = Instant::now();
        for _ in 0..50 {
            let p = sample_uniform(base.space(), &mut rng);
            let e = delayed.evaluate(&p, TimeMode::Virtual).unwrap();
            assert_eq!(e.objective, base.objective().value(&p));
            assert_eq!(e.eval_time, 0.1);
        }
        assert!(start.elapsed() < Duration::from_secs(1));
    }

    #[test]
    fn zero_delay_is_identity() {
        let mut a = Proxy::new("esp-proxy", EspProxy::new(5, 3, 2, 0));
        let mut b = Delayed::new(Proxy::new("esp-proxy", EspProxy::new(5, 3, 2, 0)), 0.0);
        let mut rng = Rng::new(2);
        for _ in 0..20 {
            let p = sample_uniform(a.space(), &mut rng);
            assert_eq!(a.evaluate(&p, TimeMode::Virtual).unwrap(), b.evaluate(&p, TimeMode::Virtual).unwrap());
        }
    }

    #[test]
    fn noise_is_seeded() {
        let mk = || Noisy::new(Proxy::new("pipe-proxy", PipeProxy::new(2)), 0.5, 9);
        let (mut a, mut b) = (mk(), mk());
        let p = sample_uniform(a.space(), &mut Rng::new(0));
        let ya = a.evaluate(&p, TimeMode::Virtual).unwrap().objective;
        assert_eq!(ya, b.evaluate(&p, TimeMode::Virtual).unwrap().objective);
        assert_ne!(ya, a.evaluate(&p, TimeMode::Virtual).unwrap().objective);
    }

    #[test]
    fn spec_tokens() {
        assert_eq!(ProblemSpec::parse("pipe-proxy:d=5").unwrap(), ProblemSpec::Pipe { d: 5, radius: 0.5 });
        assert!(matches!(ProblemSpec::parse("esp-proxy").unwrap(), ProblemSpec::Esp { slots: 49, options: 8, window: 3, .. }));
        assert!(ProblemSpec::parse("nope").is_err());
        assert!(ProblemSpec::parse("pipe-proxy:q=1").is_err());
        assert!(ProblemSpec::parse("esp-proxy:window=1").is_err());
        let space = ProblemSpec::parse("windwake-toy").unwrap().build().unwrap().space().clone();
        assert_eq!(space.dim(), 10);
        assert!(space.is_continuous());
    }

    #[test]
    fn point_json_uses_labels() {
        let hpo = HpoProxy::new();
        let j = point_json(hpo.space(), &hpo.default_point());
        assert_eq!(j["booster"], "gbtree");
        assert!(j["learning_rate"].is_f64());
        assert!(j["n_estimators"].is_i64());
    }
}

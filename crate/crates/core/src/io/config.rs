//! `key = value` run configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Ball, Point};
use crate::refine::DEFAULT_CHORD_BUDGET;
use crate::snowflake::DEFAULT_LEAF_BUDGET;

/// Where each generation is refined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WindowSpec {
    /// Every edge.
    Global,
    /// Around the descendant of the horizontal edge with normal `(0,1)`,
    /// radius a quarter of its length.
    Tracked,
    /// A fixed ball in the coordinates of `Ω₀`.
    Ball(Ball),
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSpec::Global => write!(f, "global"),
            WindowSpec::Tracked => write!(f, "tracked"),
            WindowSpec::Ball(b) => write!(f, "{:?},{:?},{:?}", b.center.x, b.center.y, b.radius),
        }
    }
}

impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "global" => Ok(WindowSpec::Global),
            "tracked" => Ok(WindowSpec::Tracked),
            other => {
                let v = parse_list::<f64>(other, "window")?;
                match v[..] {
                    [x, y, r] if r > 0.0 && x.is_finite() && y.is_finite() && r.is_finite() => {
                        Ok(WindowSpec::Ball(Ball::new(Point::new(x, y), r)))
                    }
                    _ => Err(Error::Config(format!(
                        "window must be global, tracked or x,y,r with r > 0; got {other:?}"
                    ))),
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Text,
    Structured,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "text" => Ok(ReportFormat::Text),
            "structured" => Ok(ReportFormat::Structured),
            o => Err(Error::Config(format!("format must be text or structured, got {o:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub schedule: Vec<u32>,
    pub generations: u32,
    pub leaf_budget: u64,
    pub chord_budget: u64,
    pub window: WindowSpec,
    /// Absorption distance; `None` means a quarter of the finest chord.
    pub epsilon: Option<f64>,
    pub max_steps: u64,
    /// `None` means ten times the diameter.
    pub sphere_cap: Option<f64>,
    pub seed: u64,
    pub walks: u64,
    pub output: PathBuf,
    pub format: ReportFormat,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schedule: vec![2],
            generations: 1,
            leaf_budget: DEFAULT_LEAF_BUDGET,
            chord_budget: DEFAULT_CHORD_BUDGET,
            window: WindowSpec::Tracked,
            epsilon: None,
            max_steps: 1_000_000,
            sphere_cap: None,
            seed: 0x5eed,
            walks: 100_000,
            output: PathBuf::from("out"),
            format: ReportFormat::Text,
            threads: None,
        }
    }
}

pub const KEYS: [&str; 13] = [
    "schedule",
    "generations",
    "leaf_budget",
    "chord_budget",
    "window",
    "epsilon",
    "max_steps",
    "sphere_cap",
    "seed",
    "walks",
    "output",
    "format",
    "threads",
];

fn parse_list<T: FromStr>(s: &str, key: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| Error::Config(format!("{key}: cannot parse {t:?}")))
        })
        .collect()
}

fn parse_one<T: FromStr>(s: &str, key: &str) -> Result<T> {
    s.trim()
        .parse::<T>()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {s:?}")))
}

impl RunConfig {
    /// Sets one field from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "schedule" => self.schedule = parse_list(value, key)?,
            "generations" => self.generations = parse_one(value, key)?,
            "leaf_budget" => self.leaf_budget = parse_one(value, key)?,
            "chord_budget" => self.chord_budget = parse_one(value, key)?,
            "window" => self.window = value.parse()?,
            "epsilon" => self.epsilon = Some(parse_one(value, key)?),
            "max_steps" => self.max_steps = parse_one(value, key)?,
            "sphere_cap" => self.sphere_cap = Some(parse_one(value, key)?),
            "seed" => self.seed = parse_one(value, key)?,
            "walks" => self.walks = parse_one(value, key)?,
            "output" => self.output = PathBuf::from(value.trim()),
            "format" => self.format = value.parse()?,
            "threads" => self.threads = Some(parse_one(value, key)?),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: format!("expected key = value, got {line:?}"),
            })?;
            c.set(k.trim(), v).map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schedule.is_empty() {
            return Err(Error::Config("schedule is empty".into()));
        }
        if self.schedule.contains(&0) {
            return Err(Error::Config("schedule entries must be at least 1".into()));
        }
        if self.schedule.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Config(format!("schedule {:?} is not non-decreasing", self.schedule)));
        }
        if self.generations as usize > self.schedule.len() {
            return Err(Error::Config(format!(
                "{} generations but the schedule has {} entries",
                self.generations,
                self.schedule.len()
            )));
        }
        if self.epsilon.is_some_and(|e| !(e > 0.0)) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if self.sphere_cap.is_some_and(|e| !(e > 0.0)) {
            return Err(Error::Config("sphere_cap must be positive".into()));
        }
        if self.walks == 0 || self.max_steps == 0 {
            return Err(Error::Config("walks and max_steps must be positive".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        Ok(())
    }

    /// The configuration as `key = value` lines, readable by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let list = |v: &[u32]| v.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",");
        let mut s = String::new();
        s += &format!("schedule = {}\n", list(&self.schedule));
        s += &format!("generations = {}\n", self.generations);
        s += &format!("leaf_budget = {}\n", self.leaf_budget);
        s += &format!("chord_budget = {}\n", self.chord_budget);
        s += &format!("window = {}\n", self.window);
        if let Some(e) = self.epsilon {
            s += &format!("epsilon = {e:?}\n");
        }
        s += &format!("max_steps = {}\n", self.max_steps);
        if let Some(c) = self.sphere_cap {
            s += &format!("sphere_cap = {c:?}\n");
        }
        s += &format!("seed = {}\n", self.seed);
        s += &format!("walks = {}\n", self.walks);
        s += &format!("output = {}\n", self.output.display());
        s += &format!(
            "format = {}\n",
            match self.format {
                ReportFormat::Text => "text",
                ReportFormat::Structured => "structured",
            }
        );
        if let Some(t) = self.threads {
            s += &format!("threads = {t}\n");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_round_trip() {
        let c = RunConfig::parse("schedule = 2,3,4\ngenerations=2 # two\nwindow = 0.5,0,0.1\nformat=structured\n").unwrap();
        assert_eq!(c.schedule, vec![2, 3, 4]);
        assert_eq!(c.generations, 2);
        assert_eq!(c.window, WindowSpec::Ball(Ball::new(Point::new(0.5, 0.0), 0.1)));
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            "schedule = 3,2",
            "generations = 4\nschedule = 2,3",
            "walks = 0",
            "colour = blue",
            "window = 0,0,-1",
            "schedule = two",
            "just words",
        ] {
            let e = RunConfig::parse(bad).unwrap_err();
            assert!(e.is_config(), "{bad}: {e}");
        }
    }
}

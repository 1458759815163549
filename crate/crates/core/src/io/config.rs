//! Line-oriented `key = value` run configuration.
//!
//! Blank lines and `#` comments are ignored. Keys may appear at most once.
//! `to_text` writes the resolved configuration, so
//! `parse_config(c.to_text()) == c`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::etd::Scheme;
use crate::field::DEFAULT_DEALIAS_FACTOR;
use crate::lattice::{SymmetryDescriptor, DEFAULT_RELATION_BOUND};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equation {
    Sh,
    Brusselator,
}

impl FromStr for Equation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sh" => Ok(Equation::Sh),
            "brusselator" => Ok(Equation::Brusselator),
            _ => Err("expected `sh` or `brusselator`".into()),
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Equation::Sh => "sh",
            Equation::Brusselator => "brusselator",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InitialCondition {
    /// Symmetrized orbit of the base wavevector.
    Quasicrystal,
    /// Seeded random Hermitian field.
    Random,
    /// Coefficients loaded from a snapshot.
    File(PathBuf),
    /// Brusselator steady state plus the critical eigenvector on the orbit.
    SteadyPlusCritical,
}

impl FromStr for InitialCondition {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "quasicrystal" => Ok(InitialCondition::Quasicrystal),
            "random" => Ok(InitialCondition::Random),
            "steady-plus-critical" => Ok(InitialCondition::SteadyPlusCritical),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(InitialCondition::File(PathBuf::from(p))),
                _ => Err("expected quasicrystal, random, steady-plus-critical or file:<path>".into()),
            },
        }
    }
}

impl fmt::Display for InitialCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCondition::Quasicrystal => f.write_str("quasicrystal"),
            InitialCondition::Random => f.write_str("random"),
            InitialCondition::SteadyPlusCritical => f.write_str("steady-plus-critical"),
            InitialCondition::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub symmetry: SymmetryDescriptor,
    /// Direction of the base wavevector; `None` means `(1, 0, ...)`.
    pub k0: Option<Vec<f64>>,
    pub relation_bound: i64,
    pub n: usize,
    pub k_max: f64,
    pub equation: Equation,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
    pub d1: f64,
    pub d2: f64,
    pub dt: f64,
    pub t: f64,
    pub scheme: Scheme,
    pub dealias: usize,
    pub ic: InitialCondition,
    pub ic_amplitude: f64,
    pub perturbation: f64,
    pub seed: u64,
    pub diag_every: usize,
    /// Steps between snapshots; 0 writes only the final snapshot.
    pub snapshot_every: usize,
    pub s: f64,
    pub output: PathBuf,
}

impl RunConfig {
    /// Defaults for everything except `symmetry`, `t` and the equation's
    /// bifurcation parameter.
    pub fn with_defaults(symmetry: SymmetryDescriptor, equation: Equation, t: f64) -> Self {
        RunConfig {
            symmetry,
            k0: None,
            relation_bound: DEFAULT_RELATION_BOUND,
            n: 3,
            k_max: f64::INFINITY,
            equation,
            lambda: 0.0,
            a: 2.0,
            b: 0.0,
            d1: 0.25,
            d2: 1.0,
            dt: 0.01,
            t,
            scheme: Scheme::Etdrk2,
            dealias: DEFAULT_DEALIAS_FACTOR,
            ic: match equation {
                Equation::Sh => InitialCondition::Quasicrystal,
                Equation::Brusselator => InitialCondition::SteadyPlusCritical,
            },
            ic_amplitude: 0.5,
            perturbation: 0.0,
            seed: 0,
            diag_every: 10,
            snapshot_every: 0,
            s: crate::diagnostics::DEFAULT_SOBOLEV_INDEX,
            output: PathBuf::from("output"),
        }
    }

    /// Base wavevector direction, normalized.
    pub fn base_direction(&self) -> Vec<f64> {
        match &self.k0 {
            Some(k) => {
                let n = k.iter().map(|x| x * x).sum::<f64>().sqrt();
                k.iter().map(|x| x / n).collect()
            }
            None => {
                let mut e = vec![0.0; self.symmetry.dimension()];
                e[0] = 1.0;
                e
            }
        }
    }

    /// Canonical text form; floats use the shortest round-trip decimal.
    /// Parameters of the other equation are omitted.
    pub fn to_text(&self) -> String {
        let mut lines = vec![format!("symmetry = {}", self.symmetry)];
        if let Some(k) = &self.k0 {
            let parts: Vec<String> = k.iter().map(|x| x.to_string()).collect();
            lines.push(format!("k0 = {}", parts.join(", ")));
        }
        lines.extend([
            format!("relation_bound = {}", self.relation_bound),
            format!("n = {}", self.n),
            format!("k_max = {}", self.k_max),
            format!("equation = {}", self.equation),
        ]);
        match self.equation {
            Equation::Sh => lines.push(format!("lambda = {}", self.lambda)),
            Equation::Brusselator => lines.extend([
                format!("a = {}", self.a),
                format!("b = {}", self.b),
                format!("d1 = {}", self.d1),
                format!("d2 = {}", self.d2),
            ]),
        }
        lines.extend([
            format!("dt = {}", self.dt),
            format!("t = {}", self.t),
            format!("scheme = {}", self.scheme),
            format!("dealias = {}", self.dealias),
            format!("ic = {}", self.ic),
            format!("ic_amplitude = {}", self.ic_amplitude),
            format!("perturbation = {}", self.perturbation),
            format!("seed = {}", self.seed),
            format!("diag_every = {}", self.diag_every),
            format!("snapshot_every = {}", self.snapshot_every),
            format!("s = {}", self.s),
            format!("output = {}", self.output.display()),
        ]);
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

const KEYS: &[&str] = &[
    "symmetry",
    "k0",
    "relation_bound",
    "n",
    "k_max",
    "equation",
    "lambda",
    "a",
    "b",
    "d1",
    "d2",
    "dt",
    "t",
    "scheme",
    "dealias",
    "ic",
    "ic_amplitude",
    "perturbation",
    "seed",
    "diag_every",
    "snapshot_every",
    "s",
    "output",
];

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

impl Entry<'_> {
    fn bad(&self, message: impl Into<String>) -> Error {
        Error::BadValue {
            line: self.line,
            key: self.key.to_string(),
            message: message.into(),
        }
    }

    fn parse<T: FromStr>(&self) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        self.value.parse().map_err(|e: T::Err| self.bad(e.to_string()))
    }

    fn real(&self, check: impl Fn(f64) -> bool, what: &str) -> Result<f64> {
        let x: f64 = self.parse()?;
        if x.is_nan() || !check(x) {
            return Err(self.bad(format!("{x} is not {what}")));
        }
        Ok(x)
    }

    fn count(&self, min: usize) -> Result<usize> {
        let x: usize = self.parse()?;
        if x < min {
            return Err(self.bad(format!("must be at least {min}")));
        }
        Ok(x)
    }
}

fn positive_finite(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

/// Parses and validates a configuration, applying defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::BadValue {
                line,
                key: content.to_string(),
                message: "expected `key = value`".into(),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(Error::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if entries.iter().any(|e| e.key == key) {
            return Err(Error::BadValue {
                line,
                key: key.to_string(),
                message: "duplicate key".into(),
            });
        }
        entries.push(Entry { line, key, value });
    }
    let find = |k: &str| entries.iter().find(|e| e.key == k);
    let symmetry: SymmetryDescriptor = find("symmetry")
        .ok_or_else(|| Error::MissingKey("symmetry".into()))?
        .parse()?;
    let equation = match find("equation") {
        Some(e) => e.parse()?,
        None => Equation::Sh,
    };
    let t = find("t")
        .ok_or_else(|| Error::MissingKey("t".into()))?
        .real(|x| x >= 0.0 && x.is_finite(), "a finite non-negative time")?;
    let mut c = RunConfig::with_defaults(symmetry, equation, t);
    match equation {
        Equation::Sh if find("lambda").is_none() => return Err(Error::MissingKey("lambda".into())),
        Equation::Brusselator if find("b").is_none() => return Err(Error::MissingKey("b".into())),
        _ => {}
    }
    for e in &entries {
        match e.key {
            "symmetry" | "equation" | "t" => {}
            "k0" => {
                let parts: Vec<f64> = e
                    .value
                    .split(|ch: char| ch == ',' || ch.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<f64>().map_err(|err| e.bad(err.to_string())))
                    .collect::<Result<_>>()?;
                if parts.len() != c.symmetry.dimension() {
                    return Err(e.bad(format!("expected {} components", c.symmetry.dimension())));
                }
                let n2: f64 = parts.iter().map(|x| x * x).sum();
                if !(n2 > 0.0 && n2.is_finite()) {
                    return Err(e.bad("must be a nonzero finite vector"));
                }
                c.k0 = Some(parts);
            }
            "relation_bound" => {
                let r: i64 = e.parse()?;
                if !(2..=6).contains(&r) {
                    return Err(e.bad("must lie in 2..=6"));
                }
                c.relation_bound = r;
            }
            "n" => c.n = e.count(1)?,
            "k_max" => c.k_max = e.real(|x| x > 0.0, "positive")?,
            "lambda" => c.lambda = e.real(f64::is_finite, "finite")?,
            "a" => c.a = e.real(positive_finite, "positive")?,
            "b" => c.b = e.real(positive_finite, "positive")?,
            "d1" => c.d1 = e.real(positive_finite, "positive")?,
            "d2" => c.d2 = e.real(positive_finite, "positive")?,
            "dt" => c.dt = e.real(positive_finite, "positive")?,
            "scheme" => c.scheme = e.parse()?,
            "dealias" => c.dealias = e.count(2)?,
            "ic" => c.ic = e.parse()?,
            "ic_amplitude" => c.ic_amplitude = e.real(positive_finite, "positive")?,
            "perturbation" => c.perturbation = e.real(|x| x >= 0.0 && x.is_finite(), "non-negative")?,
            "seed" => c.seed = e.parse()?,
            "diag_every" => c.diag_every = e.count(1)?,
            "snapshot_every" => c.snapshot_every = e.count(0)?,
            "s" => c.s = e.real(|x| x >= 0.0 && x.is_finite(), "non-negative")?,
            "output" => {
                if e.value.is_empty() {
                    return Err(e.bad("empty path"));
                }
                c.output = PathBuf::from(e.value);
            }
            other => unreachable!("key `{other}` accepted but not handled"),
        }
    }
    let ic_line = find("ic").map_or(0, |e| e.line);
    match (&c.ic, equation) {
        (InitialCondition::SteadyPlusCritical, Equation::Sh) | (InitialCondition::Quasicrystal, Equation::Brusselator) => {
            return Err(Error::BadValue {
                line: ic_line,
                key: "ic".into(),
                message: format!("`{}` does not apply to equation `{equation}`", c.ic),
            })
        }
        (InitialCondition::Quasicrystal, Equation::Sh) if c.lambda > 0.0 && c.ic_amplitude > 1.0 => {
            return Err(Error::BadValue {
                line: find("ic_amplitude").map_or(0, |e| e.line),
                key: "ic_amplitude".into(),
                message: "quasicrystal amplitude is a fraction of sqrt(lambda) in (0, 1]".into(),
            })
        }
        _ => {}
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_sh_config_gets_defaults() {
        let c = parse_config("symmetry = dihedral:12\nlambda = 0.2\nt = 10\n").unwrap();
        assert_eq!(c.dt, 0.01);
        assert_eq!(c.n, 3);
        assert_eq!(c.k_max, f64::INFINITY);
        assert_eq!(c.equation, Equation::Sh);
        assert_eq!(c.scheme, Scheme::Etdrk2);
        assert_eq!(c.dealias, 2);
        assert_eq!(c.ic, InitialCondition::Quasicrystal);
        assert_eq!(c.base_direction(), vec![1.0, 0.0]);
    }

    #[test]
    fn unknown_key_reports_line() {
        let e = parse_config("symmetry = dihedral:12\n# comment\nlamda = 0.2\nt = 1").unwrap_err();
        assert_eq!(
            e,
            Error::UnknownKey {
                line: 3,
                key: "lamda".into()
            }
        );
    }

    #[test]
    fn bad_values() {
        let e = parse_config("symmetry = dihedral:12\nlambda = 0.2\nt = 1\ndt = -1").unwrap_err();
        assert!(matches!(e, Error::BadValue { line: 4, ref key, .. } if key == "dt"));
        assert!(matches!(
            parse_config("symmetry = dihedral:12\nlambda = x\nt = 1"),
            Err(Error::BadValue { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("symmetry = dihedral:12\nlambda = 1\nt = 1\nt = 2"),
            Err(Error::BadValue { line: 4, .. })
        ));
        assert!(matches!(
            parse_config("symmetry = dihedral:12\nlambda = 1\nt = 1\nic = steady-plus-critical"),
            Err(Error::BadValue { line: 4, .. })
        ));
        assert!(matches!(parse_config("lambda = 1\nt = 1"), Err(Error::MissingKey(_))));
        assert!(matches!(
            parse_config("symmetry = dihedral:12\nt = 1\nequation = brusselator"),
            Err(Error::MissingKey(k)) if k == "b"
        ));
    }

    #[test]
    fn text_round_trip() {
        let text = "symmetry = icosahedral\nk0 = 0, 0, 2\nlambda = -0.5\nt = 8 # comment\n\
                    scheme = etdrk4\nic = file:/tmp/x.snap\nk_max = 2.5\nseed = 17\ns = 2.5\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.base_direction(), vec![0.0, 0.0, 1.0]);
        assert_eq!(parse_config(&c.to_text()).unwrap(), c);
        let d = parse_config("symmetry = dihedral:12\nlambda = 0.1\nt = 1").unwrap();
        assert_eq!(parse_config(&d.to_text()).unwrap(), d);
    }
}

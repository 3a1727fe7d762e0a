//! Plain-text run configuration.
//!
//! Grammar, one item per line:
//!
//! ```text
//! # comment            (also after a value: key = 1  # note)
//! [section]
//! key = value
//! list = 1, 1.3, 1.6
//! ```
//!
//! Keys are unique within a section. Unknown sections or keys are errors, as
//! are values outside their valid range; messages name the offending
//! `section.key`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::analysis::BackendSpec;
use crate::error::{Error, Result};
use crate::kernel::KernelConfig;
use crate::problems::ProblemSpec;
use crate::timefn::PowerSeries;

/// Parsed but untyped configuration: section -> key -> raw value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConfigDoc {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("run", &["alpha", "final_time", "m", "seed"]),
    ("problem", &["name", "lambda", "nu", "diffusivity"]),
    (
        "mesh",
        &[
            "family",
            "gamma",
            "n",
            "p",
            "first_interval_linear",
            "delta",
            "levels",
            "mu",
            "t1",
            "coarse_count",
            "degree_floor",
        ],
    ),
    ("backend", &["kind", "modes", "elements", "degree"]),
    (
        "study",
        &[
            "gammas",
            "degrees",
            "ns",
            "first_interval_linear",
            "deltas",
            "levels",
            "mu",
            "t1",
            "alphas",
            "dofs",
        ],
    ),
    (
        "kernel",
        &["max_degree", "separation_threshold", "far_field_padding", "near_points"],
    ),
    ("diagnostics", &["stability_report", "coercivity_check"]),
    (
        "expect",
        &[
            "error_max",
            "rate_min",
            "rate_max",
            "b_min",
            "b_max",
            "r2_min",
            "best_delta_min",
            "best_delta_max",
            "stability",
        ],
    ),
    ("output", &["stem"]),
];

fn known_key(section: &str, key: &str) -> bool {
    // `mode.<k>` entries of the problem section carry profile terms
    if section == "problem" && key.strip_prefix("mode.").is_some_and(|k| k.parse::<usize>().is_ok()) {
        return true;
    }
    SCHEMA.iter().any(|(s, keys)| *s == section && keys.contains(&key))
}

impl ConfigDoc {
    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = ConfigDoc::default();
        let mut section: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| Error::config(format!("line {}", lineno + 1), msg);
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| at(format!("unterminated section header `{line}`")))?
                    .trim();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(Error::config(name, "unknown section"));
                }
                doc.sections.entry(name.to_string()).or_default();
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected `key = value`, got `{line}`")))?;
            let key = key.trim();
            let value = value.trim();
            let sec = section
                .clone()
                .ok_or_else(|| at(format!("`{key}` appears before any [section]")))?;
            if !known_key(&sec, key) {
                return Err(Error::config(format!("{sec}.{key}"), "unknown key"));
            }
            if value.is_empty() {
                return Err(Error::config(format!("{sec}.{key}"), "empty value"));
            }
            let entries = doc.sections.entry(sec.clone()).or_default();
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::config(format!("{sec}.{key}"), "given twice"));
            }
        }
        Ok(doc)
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.into());
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(String::as_str)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    fn keys_with_prefix<'a>(&'a self, section: &str, prefix: &'a str) -> impl Iterator<Item = (&'a str, &'a str)> + 'a {
        self.sections
            .get(section)
            .into_iter()
            .flat_map(|s| s.iter())
            .filter(move |(k, _)| k.starts_with(prefix))
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }

    fn parsed<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::config(format!("{section}.{key}"), format!("cannot parse `{v}`"))),
        }
    }

    fn list<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<Vec<T>>> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|x| {
                    x.trim().parse().map_err(|_| {
                        Error::config(
                            format!("{section}.{key}"),
                            format!("cannot parse list item `{}`", x.trim()),
                        )
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }
}

impl std::fmt::Display for ConfigDoc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        // schema order keeps files readable; keys are sorted within a section
        for (name, _) in SCHEMA {
            let Some(entries) = self.sections.get(*name) else {
                continue;
            };
            if !first {
                writeln!(f)?;
            }
            first = false;
            writeln!(f, "[{name}]")?;
            for (k, v) in entries {
                writeln!(f, "{k} = {v}")?;
            }
        }
        Ok(())
    }
}

/// Time mesh requested for a single solve.
#[derive(Debug, Clone, PartialEq)]
pub enum MeshSpec {
    Graded {
        gamma: f64,
        n: usize,
        p: usize,
        first_interval_linear: Option<bool>,
    },
    Geometric {
        delta: f64,
        levels: usize,
        mu: f64,
        t1: f64,
        coarse_count: usize,
        degree_floor: bool,
    },
    Uniform {
        n: usize,
        p: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StudySpec {
    pub gammas: Option<Vec<f64>>,
    pub degrees: Option<Vec<usize>>,
    pub ns: Option<Vec<usize>>,
    pub first_interval_linear: Option<bool>,
    pub deltas: Option<Vec<f64>>,
    pub levels: Option<Vec<usize>>,
    pub mu: Option<f64>,
    pub t1: Option<f64>,
    pub alphas: Option<Vec<f64>>,
    pub dofs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    pub stability_report: bool,
    pub coercivity_check: bool,
}

/// Optional acceptance gates; a violated gate makes the command exit with 3.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Expectations {
    pub error_max: Option<f64>,
    pub rate_min: Option<f64>,
    pub rate_max: Option<f64>,
    pub b_min: Option<f64>,
    pub b_max: Option<f64>,
    pub r2_min: Option<f64>,
    pub best_delta_min: Option<f64>,
    pub best_delta_max: Option<f64>,
    pub stability: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub final_time: f64,
    pub m: usize,
    pub seed: u64,
    pub problem: ProblemSpec,
    pub mesh: Option<MeshSpec>,
    pub backend: BackendSpec,
    pub study: StudySpec,
    pub kernel: KernelConfig,
    pub diagnostics: Diagnostics,
    pub expect: Expectations,
    pub stem: Option<String>,
}

fn check(ok: bool, key: &str, msg: impl Into<String>) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::config(key, msg))
    }
}

fn check_alpha(alpha: f64, key: &str) -> Result<()> {
    check(
        alpha > -1.0 && alpha < 0.0,
        key,
        format!("must lie in (-1, 0), got {alpha}"),
    )
}

fn check_gamma(gamma: f64, key: &str) -> Result<()> {
    check(
        gamma >= 1.0 && gamma.is_finite(),
        key,
        format!("must be >= 1, got {gamma}"),
    )
}

fn check_delta(delta: f64, key: &str) -> Result<()> {
    check(
        delta > 0.0 && delta < 1.0,
        key,
        format!("must lie in (0, 1), got {delta}"),
    )
}

fn check_degree(p: usize, key: &str) -> Result<()> {
    check(p >= 1, key, format!("must be >= 1, got {p}"))
}

fn check_positive(v: f64, key: &str) -> Result<()> {
    check(v > 0.0 && v.is_finite(), key, format!("must be positive, got {v}"))
}

fn require<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::config(key, "missing required key"))
}

fn parse_bool_or_auto(doc: &ConfigDoc, section: &str, key: &str) -> Result<Option<bool>> {
    match doc.get(section, key) {
        None | Some("auto") => Ok(None),
        Some("true") => Ok(Some(true)),
        Some("false") => Ok(Some(false)),
        Some(v) => Err(Error::config(
            format!("{section}.{key}"),
            format!("expected true, false or auto, got `{v}`"),
        )),
    }
}

/// `c1@e1, c2@e2` -> `c1 t^e1 + c2 t^e2`.
fn parse_profile(text: &str, key: &str) -> Result<PowerSeries> {
    let mut series = PowerSeries::default();
    for term in text.split(',') {
        let (c, e) = term
            .trim()
            .split_once('@')
            .ok_or_else(|| Error::config(key, format!("expected coeff@exponent, got `{}`", term.trim())))?;
        let c: f64 = c
            .trim()
            .parse()
            .map_err(|_| Error::config(key, format!("bad coefficient `{c}`")))?;
        let e: f64 = e
            .trim()
            .parse()
            .map_err(|_| Error::config(key, format!("bad exponent `{e}`")))?;
        series.push(c, e);
    }
    Ok(series)
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_doc(&ConfigDoc::parse(text)?)
    }

    pub fn from_doc(doc: &ConfigDoc) -> Result<Self> {
        let alpha = require(doc.parsed::<f64>("run", "alpha")?, "alpha")?;
        check_alpha(alpha, "alpha")?;
        let final_time = doc.parsed("run", "final_time")?.unwrap_or(1.0);
        check_positive(final_time, "run.final_time")?;
        let m = doc.parsed("run", "m")?.unwrap_or(10usize);
        check(m >= 1, "run.m", format!("must be >= 1, got {m}"))?;
        let seed = doc.parsed("run", "seed")?.unwrap_or(0u64);

        let problem = match doc.get("problem", "name").unwrap_or("two_mode") {
            "two_mode" => ProblemSpec::TwoModeExample,
            "power_mode" => {
                let lambda: f64 = require(doc.parsed("problem", "lambda")?, "problem.lambda")?;
                check_positive(lambda, "problem.lambda")?;
                let nu: f64 = require(doc.parsed("problem", "nu")?, "problem.nu")?;
                check(
                    nu >= 0.0 && nu + alpha > -1.0,
                    "problem.nu",
                    format!("need nu >= 0 and nu + alpha > -1, got {nu}"),
                )?;
                ProblemSpec::PowerMode { lambda, nu }
            }
            "profiles" => {
                let diffusivity = doc.parsed("problem", "diffusivity")?.unwrap_or(1.0);
                check_positive(diffusivity, "problem.diffusivity")?;
                let mut profiles = Vec::new();
                for (k, v) in doc.keys_with_prefix("problem", "mode.") {
                    let wavenumber: usize = k["mode.".len()..].parse().unwrap_or(0);
                    let key = format!("problem.{k}");
                    check(wavenumber >= 1, &key, "wavenumbers start at 1")?;
                    profiles.push((wavenumber, parse_profile(v, &key)?));
                }
                check(
                    !profiles.is_empty(),
                    "problem.mode",
                    "profiles problem needs at least one mode.<k> entry",
                )?;
                profiles.sort_by_key(|p| p.0);
                ProblemSpec::Profiles { diffusivity, profiles }
            }
            other => return Err(Error::config("problem.name", format!("unknown problem `{other}`"))),
        };

        let mesh = if doc.has_section("mesh") {
            Some(match doc.get("mesh", "family").unwrap_or("graded") {
                "graded" => {
                    let gamma = doc.parsed("mesh", "gamma")?.unwrap_or(1.0);
                    check_gamma(gamma, "mesh.gamma")?;
                    let n = require(doc.parsed("mesh", "n")?, "mesh.n")?;
                    check(n >= 1, "mesh.n", "must be >= 1")?;
                    let p = doc.parsed("mesh", "p")?.unwrap_or(1);
                    check_degree(p, "mesh.p")?;
                    MeshSpec::Graded {
                        gamma,
                        n,
                        p,
                        first_interval_linear: parse_bool_or_auto(doc, "mesh", "first_interval_linear")?,
                    }
                }
                "geometric" => {
                    let delta = require(doc.parsed("mesh", "delta")?, "mesh.delta")?;
                    check_delta(delta, "mesh.delta")?;
                    let mu = doc.parsed("mesh", "mu")?.unwrap_or(1.0);
                    check_positive(mu, "mesh.mu")?;
                    let t1 = doc.parsed("mesh", "t1")?.unwrap_or(final_time);
                    check(
                        t1 > 0.0 && t1 <= final_time,
                        "mesh.t1",
                        format!("must lie in (0, final_time], got {t1}"),
                    )?;
                    let coarse_count = doc.parsed("mesh", "coarse_count")?.unwrap_or(1);
                    check(coarse_count >= 1, "mesh.coarse_count", "must be >= 1")?;
                    MeshSpec::Geometric {
                        delta,
                        levels: require(doc.parsed("mesh", "levels")?, "mesh.levels")?,
                        mu,
                        t1,
                        coarse_count,
                        degree_floor: doc.parsed("mesh", "degree_floor")?.unwrap_or(true),
                    }
                }
                "uniform" => {
                    let n = require(doc.parsed("mesh", "n")?, "mesh.n")?;
                    check(n >= 1, "mesh.n", "must be >= 1")?;
                    let p = doc.parsed("mesh", "p")?.unwrap_or(1);
                    check_degree(p, "mesh.p")?;
                    MeshSpec::Uniform { n, p }
                }
                other => return Err(Error::config("mesh.family", format!("unknown mesh family `{other}`"))),
            })
        } else {
            None
        };

        let backend = match doc.get("backend", "kind").unwrap_or("spectral") {
            "spectral" => {
                let modes: Option<usize> = doc.parsed("backend", "modes")?;
                check(modes.map_or(true, |m| m >= 1), "backend.modes", "must be >= 1")?;
                BackendSpec::Spectral { modes }
            }
            "fem" => {
                let elements = require(doc.parsed("backend", "elements")?, "backend.elements")?;
                check(elements >= 2, "backend.elements", "must be >= 2")?;
                let degree = doc.parsed("backend", "degree")?.unwrap_or(1);
                check((1..=8).contains(&degree), "backend.degree", "must lie in 1..=8")?;
                BackendSpec::Fem { elements, degree }
            }
            other => return Err(Error::config("backend.kind", format!("unknown backend `{other}`"))),
        };

        let study = StudySpec {
            gammas: doc.list("study", "gammas")?,
            degrees: doc.list("study", "degrees")?,
            ns: doc.list("study", "ns")?,
            first_interval_linear: parse_bool_or_auto(doc, "study", "first_interval_linear")?,
            deltas: doc.list("study", "deltas")?,
            levels: doc.list("study", "levels")?,
            mu: doc.parsed("study", "mu")?,
            t1: doc.parsed("study", "t1")?,
            alphas: doc.list("study", "alphas")?,
            dofs: doc.parsed("study", "dofs")?,
        };
        for g in study.gammas.iter().flatten() {
            check_gamma(*g, "study.gammas")?;
        }
        for p in study.degrees.iter().flatten() {
            check_degree(*p, "study.degrees")?;
        }
        for n in study.ns.iter().flatten() {
            check(*n >= 1, "study.ns", "entries must be >= 1")?;
        }
        for d in study.deltas.iter().flatten() {
            check_delta(*d, "study.deltas")?;
        }
        for a in study.alphas.iter().flatten() {
            check_alpha(*a, "study.alphas")?;
        }
        if let Some(mu) = study.mu {
            check_positive(mu, "study.mu")?;
        }
        if let Some(t1) = study.t1 {
            check(
                t1 > 0.0 && t1 <= final_time,
                "study.t1",
                format!("must lie in (0, final_time], got {t1}"),
            )?;
        }

        let defaults = KernelConfig::default();
        let kernel = KernelConfig {
            max_degree: doc.parsed("kernel", "max_degree")?.unwrap_or(defaults.max_degree),
            separation_threshold: doc
                .parsed("kernel", "separation_threshold")?
                .unwrap_or(defaults.separation_threshold),
            far_field_padding: doc
                .parsed("kernel", "far_field_padding")?
                .unwrap_or(defaults.far_field_padding),
            near_points: doc.parsed("kernel", "near_points")?.unwrap_or(defaults.near_points),
        };
        check_positive(kernel.separation_threshold, "kernel.separation_threshold")?;
        check(kernel.near_points >= 1, "kernel.near_points", "must be >= 1")?;

        let diagnostics = Diagnostics {
            stability_report: doc.parsed("diagnostics", "stability_report")?.unwrap_or(false),
            coercivity_check: doc.parsed("diagnostics", "coercivity_check")?.unwrap_or(false),
        };
        let expect = Expectations {
            error_max: doc.parsed("expect", "error_max")?,
            rate_min: doc.parsed("expect", "rate_min")?,
            rate_max: doc.parsed("expect", "rate_max")?,
            b_min: doc.parsed("expect", "b_min")?,
            b_max: doc.parsed("expect", "b_max")?,
            r2_min: doc.parsed("expect", "r2_min")?,
            best_delta_min: doc.parsed("expect", "best_delta_min")?,
            best_delta_max: doc.parsed("expect", "best_delta_max")?,
            stability: doc.parsed("expect", "stability")?,
        };
        let stem = doc.get("output", "stem").map(str::to_string);
        if let Some(s) = &stem {
            check(
                s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'),
                "output.stem",
                "only letters, digits, '_' and '-' are allowed",
            )?;
        }

        Ok(RunConfig {
            alpha,
            final_time,
            m,
            seed,
            problem,
            mesh,
            backend,
            study,
            kernel,
            diagnostics,
            expect,
            stem,
        })
    }

    /// Canonical document; `parse(to_doc().to_string())` gives back `self`.
    pub fn to_doc(&self) -> ConfigDoc {
        let mut d = ConfigDoc::default();
        d.set("run", "alpha", self.alpha.to_string());
        d.set("run", "final_time", self.final_time.to_string());
        d.set("run", "m", self.m.to_string());
        d.set("run", "seed", self.seed.to_string());
        match &self.problem {
            ProblemSpec::TwoModeExample => d.set("problem", "name", "two_mode"),
            ProblemSpec::PowerMode { lambda, nu } => {
                d.set("problem", "name", "power_mode");
                d.set("problem", "lambda", lambda.to_string());
                d.set("problem", "nu", nu.to_string());
            }
            ProblemSpec::Profiles { diffusivity, profiles } => {
                d.set("problem", "name", "profiles");
                d.set("problem", "diffusivity", diffusivity.to_string());
                for (k, series) in profiles {
                    let terms: Vec<String> = series
                        .terms()
                        .iter()
                        .map(|t| format!("{}@{}", t.coeff, t.exponent))
                        .collect();
                    d.set("problem", &format!("mode.{k}"), terms.join(", "));
                }
            }
        }
        let auto = |v: Option<bool>| v.map_or("auto".to_string(), |b| b.to_string());
        match &self.mesh {
            None => {}
            Some(MeshSpec::Graded {
                gamma,
                n,
                p,
                first_interval_linear,
            }) => {
                d.set("mesh", "family", "graded");
                d.set("mesh", "gamma", gamma.to_string());
                d.set("mesh", "n", n.to_string());
                d.set("mesh", "p", p.to_string());
                d.set("mesh", "first_interval_linear", auto(*first_interval_linear));
            }
            Some(MeshSpec::Geometric {
                delta,
                levels,
                mu,
                t1,
                coarse_count,
                degree_floor,
            }) => {
                d.set("mesh", "family", "geometric");
                d.set("mesh", "delta", delta.to_string());
                d.set("mesh", "levels", levels.to_string());
                d.set("mesh", "mu", mu.to_string());
                d.set("mesh", "t1", t1.to_string());
                d.set("mesh", "coarse_count", coarse_count.to_string());
                d.set("mesh", "degree_floor", degree_floor.to_string());
            }
            Some(MeshSpec::Uniform { n, p }) => {
                d.set("mesh", "family", "uniform");
                d.set("mesh", "n", n.to_string());
                d.set("mesh", "p", p.to_string());
            }
        }
        match &self.backend {
            BackendSpec::Spectral { modes } => {
                d.set("backend", "kind", "spectral");
                if let Some(m) = modes {
                    d.set("backend", "modes", m.to_string());
                }
            }
            BackendSpec::Fem { elements, degree } => {
                d.set("backend", "kind", "fem");
                d.set("backend", "elements", elements.to_string());
                d.set("backend", "degree", degree.to_string());
            }
        }
        let s = &self.study;
        let mut opt = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                d.set("study", key, v);
            }
        };
        opt("gammas", s.gammas.as_deref().map(join));
        opt("degrees", s.degrees.as_deref().map(join));
        opt("ns", s.ns.as_deref().map(join));
        opt("first_interval_linear", s.first_interval_linear.map(|b| b.to_string()));
        opt("deltas", s.deltas.as_deref().map(join));
        opt("levels", s.levels.as_deref().map(join));
        opt("mu", s.mu.map(|v| v.to_string()));
        opt("t1", s.t1.map(|v| v.to_string()));
        opt("alphas", s.alphas.as_deref().map(join));
        opt("dofs", s.dofs.map(|v| v.to_string()));
        d.set("kernel", "max_degree", self.kernel.max_degree.to_string());
        d.set(
            "kernel",
            "separation_threshold",
            self.kernel.separation_threshold.to_string(),
        );
        d.set("kernel", "far_field_padding", self.kernel.far_field_padding.to_string());
        d.set("kernel", "near_points", self.kernel.near_points.to_string());
        d.set(
            "diagnostics",
            "stability_report",
            self.diagnostics.stability_report.to_string(),
        );
        d.set(
            "diagnostics",
            "coercivity_check",
            self.diagnostics.coercivity_check.to_string(),
        );
        let e = &self.expect;
        let mut gate = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                d.set("expect", key, v);
            }
        };
        gate("error_max", e.error_max.map(|v| v.to_string()));
        gate("rate_min", e.rate_min.map(|v| v.to_string()));
        gate("rate_max", e.rate_max.map(|v| v.to_string()));
        gate("b_min", e.b_min.map(|v| v.to_string()));
        gate("b_max", e.b_max.map(|v| v.to_string()));
        gate("r2_min", e.r2_min.map(|v| v.to_string()));
        gate("best_delta_min", e.best_delta_min.map(|v| v.to_string()));
        gate("best_delta_max", e.best_delta_max.map(|v| v.to_string()));
        gate("stability", e.stability.map(|v| v.to_string()));
        if let Some(stem) = &self.stem {
            d.set("output", "stem", stem.clone());
        }
        d
    }

    /// First 16 hex digits of the SHA-256 of the canonical form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_doc().to_string().as_bytes());
        let mut s = String::with_capacity(16);
        for byte in &digest[..8] {
            let _ = write!(s, "{byte:02x}");
        }
        s
    }
}

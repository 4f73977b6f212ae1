//! The `gcurv` command line.
//!
//! Every command except `catalog` emits a [`RunReport`]. In JSON the report
//! looks like
//!
//! ```json
//! {
//!   "command": "gcurv gauss-bonnet --surface sphere2_r3",
//!   "subcommand": "gauss-bonnet",
//!   "surface": "sphere2_r3",
//!   "params": { "R": 1.0000000000000000e0 },
//!   "m": 2, "k": 3,
//!   "resolution": [96, 128],
//!   "seed": 0,
//!   "results": [ { "label": "moments", "values": { "integral": 1.2566370614359172e1 } } ],
//!   "checks": [ { "name": "relative_residual", "value": 1.4e-15, "threshold": 1e-6, "passed": true } ],
//!   "passed": true,
//!   "wall_time_s": 1.2e-2
//! }
//! ```
//!
//! Floats are written with 17 significant digits so the report parses back to
//! identical values. CSV output has one `kind,label,key,value` row per field.
//! Exit codes: 0 success, 1 a check exceeded its threshold, 2 usage or domain
//! error.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_report, egregium_report, CurvatureReport};
use crate::error::{GeomError, Result};
use crate::immersion::{catalog_entries, parse_surface, surface_file, Immersion};
use crate::integrate::{gauss_bonnet_check, CurvatureRoute, QuadratureGrid, Resolution};
use crate::tube::{
    sample_tube_point, tube_boundary_immersion, tube_identity_check, tube_spectrum_check,
    tube_total_curvature, TubeConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "gcurv",
    version,
    about = "Generalized Gaussian curvature in any codimension"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the built-in immersions.
    Catalog {
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// K_M by both routes, Pfaffian density and Egregium residual at points.
    Curvature {
        #[command(flatten)]
        common: Common,
        /// Comma-separated parameter point; random points are drawn if absent.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// ∫ K_M dV against (ω_{k−1}/ω_{n−1})·χ.
    GaussBonnet {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "moments")]
        route: CurvatureRoute,
    },
    /// Checks on the boundary of an ε-tube.
    Tube {
        #[command(flatten)]
        common: Common,
        /// Tube radius; defaults to half the declared reach bound.
        #[arg(long)]
        eps: Option<f64>,
        /// Total Gauss-Kronecker curvature of the tube boundary.
        #[arg(long)]
        total: bool,
        /// Pointwise K^g/NJ identity at random tube points.
        #[arg(long)]
        identity: bool,
        /// Shape-operator spectrum at random tube points.
        #[arg(long)]
        spectrum: bool,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Egregium residual |(ω_{n−1}/ω_{k−1})K_M − Pfaffian density| at random points.
    Egregium {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        samples: usize,
    },
}

#[derive(Args, Debug)]
pub struct Common {
    /// Catalog name, optionally with parameters: `torus_rev_r3:R=3,r=1`.
    #[arg(long, conflicts_with = "surface_file")]
    pub surface: Option<String>,
    /// TOML surface description.
    #[arg(long)]
    pub surface_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Nodes per axis: `N`, or `N,P` for interval and periodic axes.
    #[arg(long, value_parser = parse_resolution)]
    pub resolution: Option<Resolution>,
    /// Overrides the pass/fail threshold of every check.
    #[arg(long)]
    pub fail_threshold: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

fn parse_resolution(s: &str) -> std::result::Result<Resolution, String> {
    let parse = |t: &str| -> std::result::Result<usize, String> {
        match t.trim().parse::<usize>() {
            Ok(v) if v >= 2 => Ok(v),
            _ => Err(format!("`{t}` is not a node count ≥ 2")),
        }
    };
    match s.split_once(',') {
        Some((a, b)) => Ok(Resolution::new(parse(a)?, parse(b)?)),
        None => {
            let v = parse(s)?;
            Ok(Resolution::new(v, v))
        }
    }
}

/// One named group of scalar results.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub label: String,
    pub values: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub subcommand: String,
    pub surface: String,
    pub params: BTreeMap<String, f64>,
    pub m: usize,
    pub k: usize,
    pub resolution: Option<[usize; 2]>,
    pub seed: u64,
    pub results: Vec<ResultEntry>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub wall_time_s: f64,
}

impl RunReport {
    fn new(command: String, subcommand: &str, imm: &Immersion, seed: u64) -> Self {
        RunReport {
            command,
            subcommand: subcommand.into(),
            surface: imm.name.clone(),
            params: imm.params.iter().cloned().collect(),
            m: imm.m,
            k: imm.k,
            resolution: None,
            seed,
            results: Vec::new(),
            checks: Vec::new(),
            passed: true,
            wall_time_s: 0.0,
        }
    }

    fn push(&mut self, label: impl Into<String>, values: impl IntoIterator<Item = (String, f64)>) {
        self.results.push(ResultEntry {
            label: label.into(),
            values: values.into_iter().collect(),
        });
    }

    fn check(&mut self, name: &str, value: f64, threshold: f64) {
        let passed = value < threshold;
        self.passed &= passed;
        self.checks.push(Check {
            name: name.into(),
            value,
            threshold,
            passed,
        });
    }

    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision::default());
        self.serialize(&mut ser).expect("report serializes");
        String::from_utf8(buf).expect("utf-8")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,label,key,value\n");
        let meta = [
            ("command", csv_field(&self.command)),
            ("subcommand", self.subcommand.clone()),
            ("surface", csv_field(&self.surface)),
            ("m", self.m.to_string()),
            ("k", self.k.to_string()),
            ("seed", self.seed.to_string()),
            ("passed", self.passed.to_string()),
            ("wall_time_s", float17(self.wall_time_s)),
        ];
        for (key, v) in meta {
            out += &format!("meta,,{key},{v}\n");
        }
        if let Some([a, b]) = self.resolution {
            out += &format!("meta,,resolution,{a};{b}\n");
        }
        for (key, v) in &self.params {
            out += &format!("param,,{key},{}\n", float17(*v));
        }
        for e in &self.results {
            for (key, v) in &e.values {
                out += &format!("result,{},{key},{}\n", csv_field(&e.label), float17(*v));
            }
        }
        for c in &self.checks {
            out += &format!("check,{},value,{}\n", c.name, float17(c.value));
            out += &format!("check,{},threshold,{}\n", c.name, float17(c.threshold));
            out += &format!("check,{},passed,{}\n", c.name, c.passed);
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{} on {} (m={}, k={}, n={})\n",
            self.subcommand,
            self.surface,
            self.m,
            self.k,
            self.k - self.m
        );
        if !self.params.is_empty() {
            let p: Vec<String> = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            out += &format!("  params: {}\n", p.join(", "));
        }
        if let Some([a, b]) = self.resolution {
            out += &format!("  resolution: {a} interval, {b} periodic\n");
        }
        for e in &self.results {
            out += &format!("[{}]\n", e.label);
            for (key, v) in &e.values {
                out += &format!("  {key:<28} {v:>24.15e}\n");
            }
        }
        for c in &self.checks {
            out += &format!(
                "{} {:<24} {:.3e} (threshold {:.1e})\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.threshold
            );
        }
        out += &format!("wall time {:.3} s\n", self.wall_time_s);
        out
    }
}

fn float17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Pretty JSON with floats at 17 significant digits.
#[derive(Default)]
struct FullPrecision<'a>(serde_json::ser::PrettyFormatter<'a>);

macro_rules! forward {
    ($($name:ident $(, $arg:ident : $ty:ty)*;)*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl serde_json::ser::Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(float17(value).as_bytes())
    }

    forward! {
        begin_array;
        end_array;
        begin_array_value, first: bool;
        end_array_value;
        begin_object;
        end_object;
        begin_object_key, first: bool;
        begin_object_value;
        end_object_value;
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its output to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let echo = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    match execute(cli.command, echo, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load(common: &Common) -> Result<Immersion> {
    match (&common.surface, &common.surface_file) {
        (Some(s), None) => parse_surface(s),
        (None, Some(p)) => surface_file::load_surface_file(p),
        _ => Err(GeomError::BadParameter {
            name: "cli".into(),
            msg: "exactly one of --surface or --surface-file is required".into(),
        }),
    }
}

fn parse_point(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| GeomError::BadParameter {
                    name: "point".into(),
                    msg: format!("`{}` is not a number", t.trim()),
                })
        })
        .collect()
}

fn curvature_values(u: &[f64], rep: &CurvatureReport) -> Vec<(String, f64)> {
    let mut v: Vec<(String, f64)> = u
        .iter()
        .enumerate()
        .map(|(i, x)| (format!("u{i}"), *x))
        .collect();
    v.push(("k_moments".into(), rep.k_moments));
    v.push(("k_quadrature".into(), rep.k_quadrature));
    v.push(("egregium_lhs".into(), rep.egregium_lhs));
    v.push((
        "residual_moments_quadrature".into(),
        rep.residual_moments_quadrature,
    ));
    if let Some(p) = rep.pfaffian_density {
        v.push(("pfaffian_density".into(), p));
    }
    if let Some(r) = rep.residual_egregium {
        v.push(("residual_egregium".into(), r));
    }
    v
}

fn emit(report: &RunReport, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Table => write!(out, "{}", report.to_table()),
        Format::Json => writeln!(out, "{}", report.to_json()),
        Format::Csv => write!(out, "{}", report.to_csv()),
    }
}

fn execute(command: Command, echo: String, out: &mut dyn Write) -> Result<i32> {
    let start = Instant::now();
    let (mut report, format) = match command {
        Command::Catalog { format } => {
            let entries = catalog_entries();
            match format {
                Format::Table => {
                    for e in &entries {
                        let chi = e.chi.map_or("?".to_string(), |c| c.to_string());
                        writeln!(out, "{} m={} k={} chi={} n={}", e.name, e.m, e.k, chi, e.n)?;
                    }
                }
                Format::Json => {
                    writeln!(out, "{}", serde_json::to_string_pretty(&entries).unwrap())?
                }
                Format::Csv => {
                    writeln!(out, "name,m,k,n,chi")?;
                    for e in &entries {
                        let chi = e.chi.map_or(String::new(), |c| c.to_string());
                        writeln!(out, "{},{},{},{},{}", e.name, e.m, e.k, e.n, chi)?;
                    }
                }
            }
            return Ok(0);
        }
        Command::Curvature {
            common,
            point,
            samples,
        } => {
            let imm = load(&common)?;
            let mut report = RunReport::new(echo, "curvature", &imm, common.seed);
            let points = match point {
                Some(p) => vec![parse_point(&p)?],
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
                    (0..samples.max(1))
                        .map(|_| imm.sample_point(&mut rng))
                        .collect()
                }
            };
            let mut worst = 0.0f64;
            for (i, u) in points.iter().enumerate() {
                let rep = curvature_report(&imm, u)?;
                worst = worst.max(rep.max_residual());
                let label = if points.len() == 1 {
                    "point".to_string()
                } else {
                    format!("sample {i}")
                };
                report.push(label, curvature_values(u, &rep));
            }
            report.check("max_residual", worst, common.fail_threshold.unwrap_or(1e-8));
            (report, common.format)
        }
        Command::GaussBonnet { common, route } => {
            let imm = load(&common)?;
            let mut report = RunReport::new(echo, "gauss-bonnet", &imm, common.seed);
            let res = common.resolution.unwrap_or(Resolution::default_for(imm.m));
            report.resolution = Some([res.interval, res.periodic]);
            let grid = QuadratureGrid::new(&imm.domain, res);
            let gb = gauss_bonnet_check(&imm, &grid, route)?;
            let mut values = vec![
                ("integral".to_string(), gb.integral),
                ("nodes".to_string(), gb.nodes as f64),
                ("estimated_chi".to_string(), gb.estimated_chi as f64),
                ("chi_distance".to_string(), gb.chi_distance),
            ];
            if let (Some(e), Some(r), Some(rel)) = (gb.expected, gb.residual, gb.relative_residual)
            {
                values.push(("expected".into(), e));
                values.push(("residual".into(), r));
                values.push(("relative_residual".into(), rel));
            }
            let label = serde_json::to_value(route).unwrap();
            report.push(label.as_str().unwrap_or("route"), values);
            match gb.relative_residual {
                Some(rel) => report.check(
                    "relative_residual",
                    rel,
                    common.fail_threshold.unwrap_or(1e-6),
                ),
                None => report.check(
                    "chi_distance",
                    gb.chi_distance,
                    common.fail_threshold.unwrap_or(1e-3),
                ),
            }
            (report, common.format)
        }
        Command::Tube {
            common,
            eps,
            total,
            identity,
            spectrum,
            samples,
        } => {
            let base = load(&common)?;
            let mut report = RunReport::new(echo, "tube", &base, common.seed);
            let eps = match eps {
                Some(e) => e,
                None => {
                    0.5 * base.reach_bound().ok_or_else(|| GeomError::BadParameter {
                        name: base.name.clone(),
                        msg: "no declared reach bound; pass --eps".into(),
                    })?
                }
            };
            report.params.insert("eps".into(), eps);
            let cfg = TubeConfig::new(base, eps)?;
            let tube = tube_boundary_immersion(&cfg)?;
            let identity = identity || !(total || spectrum);
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let points: Vec<_> = (0..samples)
                .map(|_| sample_tube_point(&cfg.base, &mut rng))
                .collect::<Result<_>>()?;
            if identity {
                let mut worst = 0.0f64;
                for (i, (u, nu)) in points.iter().enumerate() {
                    let id = tube_identity_check(&tube, u, nu)?;
                    worst = worst.max(id.relative);
                    report.push(
                        format!("identity {i}"),
                        [
                            ("lhs".to_string(), id.lhs),
                            ("rhs".to_string(), id.rhs),
                            ("relative".to_string(), id.relative),
                        ],
                    );
                }
                report.check(
                    "identity_max_relative",
                    worst,
                    common.fail_threshold.unwrap_or(1e-6),
                );
            }
            if spectrum {
                let mut worst = 0.0f64;
                for (i, (u, nu)) in points.iter().enumerate() {
                    let sc = tube_spectrum_check(&tube, u, nu)?;
                    let scale = sc.predicted.iter().fold(1.0f64, |a, b| a.max(b.abs()));
                    worst = worst.max(sc.distance / scale);
                    let mut values = vec![("distance".to_string(), sc.distance)];
                    for (j, (o, p)) in sc.observed.iter().zip(&sc.predicted).enumerate() {
                        values.push((format!("observed{j}"), *o));
                        values.push((format!("predicted{j}"), *p));
                    }
                    report.push(format!("spectrum {i}"), values);
                }
                report.check(
                    "spectrum_max_relative",
                    worst,
                    common.fail_threshold.unwrap_or(1e-6),
                );
            }
            if total {
                let res = common
                    .resolution
                    .unwrap_or(Resolution::default_for(tube.sheets[0].1.m));
                report.resolution = Some([res.interval, res.periodic]);
                let tot = tube_total_curvature(&tube, Some(res))?;
                let mut values: Vec<(String, f64)> = tot
                    .sheets
                    .iter()
                    .map(|(label, v)| (format!("sheet{label}"), *v))
                    .collect();
                values.push(("integral".into(), tot.integral));
                values.push(("expected".into(), tot.expected));
                values.push(("residual".into(), tot.residual));
                values.push(("relative_residual".into(), tot.relative));
                report.push("total", values);
                report.check(
                    "total_relative_residual",
                    tot.relative,
                    common.fail_threshold.unwrap_or(1e-3),
                );
            }
            (report, common.format)
        }
        Command::Egregium { common, samples } => {
            let imm = load(&common)?;
            let mut report = RunReport::new(echo, "egregium", &imm, common.seed);
            let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
            let mut worst = 0.0f64;
            for i in 0..samples {
                let u = imm.sample_point(&mut rng);
                let rep = egregium_report(&imm, &u)?;
                worst = worst.max(rep.residual_egregium.unwrap_or(f64::INFINITY));
                report.push(format!("sample {i}"), curvature_values(&u, &rep));
            }
            report.check("max_residual", worst, common.fail_threshold.unwrap_or(1e-9));
            (report, common.format)
        }
    };
    report.wall_time_s = start.elapsed().as_secs_f64();
    emit(&report, format, out)?;
    Ok(if report.passed { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolution_flag_forms() {
        assert_eq!(parse_resolution("32").unwrap(), Resolution::new(32, 32));
        assert_eq!(parse_resolution("16,48").unwrap(), Resolution::new(16, 48));
        assert!(parse_resolution("1").is_err());
        assert!(parse_resolution("a,3").is_err());
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(float17(0.1), "1.0000000000000001e-1");
        assert_eq!(float17(1.0 / 3.0).parse::<f64>().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("1.0, -2").unwrap(), vec![1.0, -2.0]);
        assert!(parse_point("1.0,x").is_err());
    }
}

//! Batch experiment driver: config parsing, validation, orchestration and
//! deterministic report emission for the `cpnq` binary.
//!
//! Reports are JSON (embedding the resolved config and the tool version)
//! plus CSV tables for plotting. Identical config and seed produce
//! byte-identical outputs regardless of the worker-thread count: every
//! parallel reduction in the library is order-fixed.

use crate::berezin::{
    correspondence_study, covariant_symbol, star_product, star_via_composition, ConvergenceReport,
    OperatorMatrix, StarRoute, StudyOptions, SymbolFunction,
};
use crate::cpn::{PointU0, QuantizationConfig, SmoothField};
use crate::embedding::{
    build_pullback, induced_correspondence_study, induced_operator, kernel_invariance_defect,
    pullback_norm, reconstruct_ambient, x_symbol, ManifoldSpec, PullbackSection,
};
use crate::error::Error;
use crate::exact;
use crate::hilbert::{
    coherent_state, eval_section, kernel_l, reproducing_check, resolution_identity_residual,
    BasisSpec, SectionVector,
};
use crate::odzijewicz::{
    c_for_det_reading, c_for_displayed_reading, cs_metric, holonomy_agreement, metric_radicand,
    monge_ampere_grid, solution_exponent, transition_amplitude, LineBundleKernel, PathGamma,
};
use crate::quadrature::{build_rule, normalization_d, RuleKind, RuleParams};
use crate::Result;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Kernel,
    Star,
    Converge,
    Pullback,
    Odzi,
}

impl Command {
    pub fn parse(s: &str) -> Option<Command> {
        match s {
            "kernel" => Some(Command::Kernel),
            "star" => Some(Command::Star),
            "converge" => Some(Command::Converge),
            "pullback" => Some(Command::Pullback),
            "odzi" => Some(Command::Odzi),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Kernel => "kernel",
            Command::Star => "star",
            Command::Converge => "converge",
            Command::Pullback => "pullback",
            Command::Odzi => "odzi",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantBlock {
    pub n: usize,
    pub m: u32,
    #[serde(default)]
    pub measure_scale: Option<f64>,
    #[serde(default)]
    pub tol: Option<f64>,
}

impl QuantBlock {
    fn to_config(&self) -> QuantizationConfig {
        let mut cfg = QuantizationConfig::new(self.n, self.m);
        if let Some(s) = self.measure_scale {
            cfg = cfg.with_measure_scale(s);
        }
        if let Some(t) = self.tol {
            cfg = cfg.with_tol(t);
        }
        cfg
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadBlock {
    #[serde(default = "default_kind")]
    pub kind: RuleKind,
    #[serde(default = "default_nodes")]
    pub radial: usize,
    #[serde(default = "default_nodes")]
    pub angular: usize,
    #[serde(default = "default_mc")]
    pub mc_samples: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_kind() -> RuleKind {
    RuleKind::GaussRadialAngular
}
fn default_nodes() -> usize {
    24
}
fn default_mc() -> usize {
    20_000
}

impl Default for QuadBlock {
    fn default() -> Self {
        Self {
            kind: default_kind(),
            radial: default_nodes(),
            angular: default_nodes(),
            mc_samples: default_mc(),
            seed: None,
        }
    }
}

impl QuadBlock {
    /// Rule parameters; a Monte-Carlo block without its own seed inherits
    /// the experiment seed.
    fn params(&self, fallback_seed: Option<u64>) -> RuleParams {
        RuleParams {
            radial: self.radial,
            angular: self.angular,
            mc_samples: self.mc_samples,
            seed: self.seed.or(fallback_seed),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelBlock {
    /// Random point pairs for the basis-sum vs closed-form comparison.
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    /// Random sections probed by the reproducing identity.
    #[serde(default = "default_sections")]
    pub sections: usize,
    /// Side length of the kernel value table.
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Half-width of the table square in the first coordinate.
    #[serde(default = "default_extent")]
    pub extent: f64,
    /// Optional explicit multi-indices; degrees must stay within the level.
    #[serde(default)]
    pub basis_override: Option<Vec<Vec<u32>>>,
}

fn default_pairs() -> usize {
    100
}
fn default_sections() -> usize {
    20
}
fn default_grid() -> usize {
    8
}
fn default_extent() -> f64 {
    1.5
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarBlock {
    /// Random Hermitian operator pairs.
    #[serde(default = "default_star_pairs")]
    pub pairs: usize,
    /// Base points per pair.
    #[serde(default = "default_star_points")]
    pub points: usize,
}

fn default_star_pairs() -> usize {
    20
}
fn default_star_points() -> usize {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeBlock {
    pub m_list: Vec<u32>,
    pub f1: String,
    pub f2: String,
    /// Base point in the chart (ambient study).
    #[serde(default)]
    pub mu: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub route: Option<StarRoute>,
    /// When present the study runs through the pullback layer.
    #[serde(default)]
    pub manifold: Option<ManifoldSpec>,
    /// Parameter point on the manifold (induced study base point).
    #[serde(default)]
    pub base_param: Option<Vec<f64>>,
    #[serde(default)]
    pub rank_tol: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullbackBlock {
    pub manifold: ManifoldSpec,
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
    /// Random Hermitian operators to induce.
    #[serde(default = "default_operators")]
    pub operators: usize,
    /// Sample pairs for the symbol-transfer residual table.
    #[serde(default = "default_pairs")]
    pub symbol_pairs: usize,
}

fn default_rank_tol() -> f64 {
    1e-10
}
fn default_operators() -> usize {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleSpec {
    pub center: [f64; 2],
    pub radius: f64,
    pub turns: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    #[serde(default)]
    pub circle: Option<CircleSpec>,
    /// Explicit coordinates, one `[re, im]` pair per chart coordinate.
    #[serde(default)]
    pub points: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default)]
    pub closed: Option<bool>,
}

impl PathSpec {
    fn build(&self, n: usize, samples: Option<usize>) -> Result<PathGamma> {
        match (&self.circle, &self.points) {
            (Some(c), None) => Ok(PathGamma::circle(
                n,
                C64::new(c.center[0], c.center[1]),
                c.radius,
                c.turns,
                samples.unwrap_or(c.samples),
            )),
            (None, Some(pts)) => {
                let points = pts
                    .iter()
                    .map(|cs| PointU0::new(cs.iter().map(|c| C64::new(c[0], c[1])).collect()))
                    .collect();
                PathGamma::from_points(points, self.closed.unwrap_or(false))
            }
            _ => Err(Error::Config {
                field: "odzi.path".into(),
                message: "exactly one of `circle` or `points` must be given".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OdziBlock {
    /// Monge-Ampère grid side length.
    #[serde(default = "default_ma_grid")]
    pub grid: usize,
    #[serde(default = "default_extent")]
    pub extent: f64,
    /// Density exponent; defaults to `n + m + 1`.
    #[serde(default)]
    pub n_param: Option<f64>,
    /// Kernel exponent; defaults to the level `m`.
    #[serde(default)]
    pub kernel_exponent: Option<u32>,
    pub path: PathSpec,
    pub steps_list: Vec<usize>,
    #[serde(default = "default_metric_pairs")]
    pub metric_pairs: usize,
}

fn default_ma_grid() -> usize {
    20
}
fn default_metric_pairs() -> usize {
    200
}

/// Top-level experiment configuration; one block per subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub quantization: QuantBlock,
    #[serde(default)]
    pub quadrature: QuadBlock,
    /// Seed for sampled inputs; mandatory for Monte-Carlo quadrature.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub kernel: Option<KernelBlock>,
    #[serde(default)]
    pub star: Option<StarBlock>,
    #[serde(default)]
    pub converge: Option<ConvergeBlock>,
    #[serde(default)]
    pub pullback: Option<PullbackBlock>,
    #[serde(default)]
    pub odzi: Option<OdziBlock>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config {
            field: "config".into(),
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    /// Reject invalid configurations before any computation.
    pub fn validate(&self, command: Command) -> Result<()> {
        if self.quantization.n == 0 {
            return Err(Error::Config {
                field: "quantization.n".into(),
                message: "chart dimension must be at least 1".into(),
            });
        }
        if self.quantization.m == 0 {
            return Err(Error::Config {
                field: "quantization.m".into(),
                message: "level must be at least 1".into(),
            });
        }
        if self.quadrature.kind == RuleKind::MonteCarlo
            && self.quadrature.seed.is_none()
            && self.seed.is_none()
        {
            return Err(Error::Config {
                field: "quadrature.seed".into(),
                message: "monte_carlo quadrature requires a seed".into(),
            });
        }
        match command {
            Command::Kernel => {
                let block = self.kernel.as_ref().ok_or_else(|| missing("kernel"))?;
                if let Some(indices) = &block.basis_override {
                    for idx in indices {
                        if idx.len() != self.quantization.n {
                            return Err(Error::Config {
                                field: "kernel.basis_override".into(),
                                message: format!(
                                    "index {idx:?} has {} entries, chart dimension is {}",
                                    idx.len(),
                                    self.quantization.n
                                ),
                            });
                        }
                        let q: u32 = idx.iter().sum();
                        if q > self.quantization.m {
                            return Err(Error::Config {
                                field: "kernel.basis_override".into(),
                                message: format!(
                                    "index {idx:?} has degree {q} > m = {}",
                                    self.quantization.m
                                ),
                            });
                        }
                    }
                }
            }
            Command::Star => {
                self.star.as_ref().ok_or_else(|| missing("star"))?;
            }
            Command::Converge => {
                let block = self.converge.as_ref().ok_or_else(|| missing("converge"))?;
                if block.m_list.is_empty() {
                    return Err(Error::Config {
                        field: "converge.m_list".into(),
                        message: "at least one level is required".into(),
                    });
                }
                if !block.m_list.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::Config {
                        field: "converge.m_list".into(),
                        message: "levels must be strictly ascending".into(),
                    });
                }
                if block.m_list.iter().any(|&m| m < 2) {
                    return Err(Error::Config {
                        field: "converge.m_list".into(),
                        message: "levels must be at least 2".into(),
                    });
                }
                field_by_name(&block.f1, "converge.f1")?;
                field_by_name(&block.f2, "converge.f2")?;
                if block.manifold.is_some() {
                    if block.base_param.is_none() {
                        return Err(Error::Config {
                            field: "converge.base_param".into(),
                            message: "induced studies need a base parameter point".into(),
                        });
                    }
                } else if block.mu.is_none() {
                    return Err(Error::Config {
                        field: "converge.mu".into(),
                        message: "ambient studies need a base point".into(),
                    });
                }
            }
            Command::Pullback => {
                self.pullback.as_ref().ok_or_else(|| missing("pullback"))?;
            }
            Command::Odzi => {
                let block = self.odzi.as_ref().ok_or_else(|| missing("odzi"))?;
                if block.steps_list.is_empty() {
                    return Err(Error::Config {
                        field: "odzi.steps_list".into(),
                        message: "at least one step count is required".into(),
                    });
                }
                block.path.build(self.quantization.n, None)?;
            }
        }
        Ok(())
    }
}

fn missing(name: &str) -> Error {
    Error::Config {
        field: name.into(),
        message: format!("the `{name}` block is required by this subcommand"),
    }
}

/// Named smooth fields accepted in configs.
pub fn field_by_name(name: &str, where_: &str) -> Result<SmoothField> {
    match name {
        "re_frac" => Ok(SmoothField::re_frac()),
        "im_frac" => Ok(SmoothField::im_frac()),
        "abs_frac" => Ok(SmoothField::abs_frac()),
        "one" => Ok(SmoothField::constant(C64::new(1.0, 0.0))),
        other => Err(Error::Config {
            field: where_.into(),
            message: format!("unknown field `{other}` (known: re_frac, im_frac, abs_frac, one)"),
        }),
    }
}

fn random_point(n: usize, rng: &mut ChaCha8Rng) -> PointU0 {
    PointU0::new(
        (0..n)
            .map(|_| C64::new(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2)))
            .collect(),
    )
}

fn random_hermitian(dim: usize, rng: &mut ChaCha8Rng) -> OperatorMatrix {
    let raw = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    OperatorMatrix::new((raw.clone() + raw.adjoint()) * C64::new(0.5, 0.0))
}

fn write_file(out_dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = out_dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn report_json<T: Serialize>(
    command: Command,
    config: &ExperimentConfig,
    results: &T,
) -> Result<String> {
    #[derive(Serialize)]
    struct Report<'a, T> {
        version: &'static str,
        command: &'static str,
        config: &'a ExperimentConfig,
        results: &'a T,
    }
    let mut text = serde_json::to_string_pretty(&Report {
        version: TOOL_VERSION,
        command: command.name(),
        config,
        results,
    })?;
    text.push('\n');
    Ok(text)
}

/// Dispatch a validated config. Returns the list of files written.
pub fn run_command(
    command: Command,
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    config.validate(command)?;
    fs::create_dir_all(out_dir)?;
    match command {
        Command::Kernel => cmd_kernel(config, out_dir),
        Command::Star => cmd_star(config, out_dir),
        Command::Converge => cmd_converge(config, out_dir),
        Command::Pullback => cmd_pullback(config, out_dir),
        Command::Odzi => cmd_odzi(config, out_dir),
    }
}

/// Like [`run_command`] inside a dedicated worker pool of the given size.
pub fn run_with_threads(
    command: Command,
    config: &ExperimentConfig,
    out_dir: &Path,
    threads: usize,
) -> Result<Vec<PathBuf>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config {
            field: "threads".into(),
            message: e.to_string(),
        })?;
    pool.install(|| run_command(command, config, out_dir))
}

fn cmd_kernel(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let block = config.kernel.as_ref().unwrap();
    let cfg = config.quantization.to_config();
    let basis = BasisSpec::build(cfg.clone());
    let rule = build_rule(
        &cfg,
        config.quadrature.kind,
        &config.quadrature.params(config.seed),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());

    // Basis-sum evaluation of the coherent kernel against the closed form.
    let mut max_kernel_mismatch: f64 = 0.0;
    for _ in 0..block.pairs {
        let mu = random_point(cfg.n, &mut rng);
        let nu = random_point(cfg.n, &mut rng);
        let by_sum = eval_section(&coherent_state(&mu, &basis), &nu, &basis)?;
        let closed = kernel_l(&nu, &mu, &cfg);
        max_kernel_mismatch = max_kernel_mismatch.max((by_sum - closed).norm());
    }

    // Reproducing identity on random sections.
    let mut max_reproducing: f64 = 0.0;
    for _ in 0..block.sections {
        let v = SectionVector::new(DVector::from_fn(basis.dim(), |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }));
        let p = random_point(cfg.n, &mut rng);
        max_reproducing = max_reproducing.max(reproducing_check(&v, &p, &basis)?);
    }

    // Resolution of identity on the first basis pair and one coherent state.
    let phi0 = SectionVector::basis_element(basis.dim(), 0);
    let resolution_phi0 = resolution_identity_residual(&phi0, &phi0, &basis, &rule)?;
    let witness = random_point(cfg.n, &mut rng);
    let psi = coherent_state(&witness, &basis);
    let resolution_coherent = resolution_identity_residual(&psi, &psi, &basis, &rule)?
        / kernel_l(&witness, &witness, &cfg).re;

    // Normalization constants through both routes.
    let indices: Vec<Vec<u32>> = match &block.basis_override {
        Some(list) => list.clone(),
        None => basis.indices.iter().map(|i| i.exponents.clone()).collect(),
    };
    let mut d_rows = Vec::new();
    let mut max_d_mismatch: f64 = 0.0;
    for idx in &indices {
        let quad = normalization_d(idx, &cfg, &rule)?;
        let closed = exact::normalization_d(idx, cfg.m);
        max_d_mismatch = max_d_mismatch.max((quad - closed).abs());
        d_rows.push((idx.clone(), quad, closed));
    }

    // Kernel table over a deterministic grid in the first coordinate.
    let mut csv = String::from("mu_re,mu_im,nu_re,nu_im,l_re,l_im\n");
    let g = block.grid.max(2);
    for ix in 0..g {
        for iy in 0..g {
            let x = -block.extent + 2.0 * block.extent * ix as f64 / (g - 1) as f64;
            let y = -block.extent + 2.0 * block.extent * iy as f64 / (g - 1) as f64;
            let mut mu = PointU0::origin(cfg.n);
            mu.coords[0] = C64::new(x, y);
            let nu = PointU0::origin(cfg.n);
            let l = kernel_l(&mu, &nu, &cfg);
            writeln!(csv, "{x},{y},0,0,{},{}", l.re, l.im).unwrap();
        }
    }

    #[derive(Serialize)]
    struct KernelResults {
        dim: usize,
        c_constant_quadrature: f64,
        c_constant_closed_form: f64,
        max_kernel_mismatch: f64,
        max_reproducing_residual: f64,
        resolution_residual_phi0: f64,
        resolution_residual_coherent_relative: f64,
        max_d_mismatch: f64,
        d_table: Vec<(Vec<u32>, f64, f64)>,
    }
    let results = KernelResults {
        dim: basis.dim(),
        c_constant_quadrature: crate::quadrature::c_constant(&rule)?,
        c_constant_closed_form: exact::c_constant(cfg.n, cfg.m, cfg.measure_scale),
        max_kernel_mismatch,
        max_reproducing_residual: max_reproducing,
        resolution_residual_phi0: resolution_phi0,
        resolution_residual_coherent_relative: resolution_coherent,
        max_d_mismatch,
        d_table: d_rows,
    };

    Ok(vec![
        write_file(
            out_dir,
            "kernel_report.json",
            &report_json(Command::Kernel, config, &results)?,
        )?,
        write_file(out_dir, "kernel_table.csv", &csv)?,
    ])
}

fn cmd_star(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let block = config.star.as_ref().unwrap();
    let cfg = config.quantization.to_config();
    let basis = BasisSpec::build(cfg.clone());
    let rule = build_rule(
        &cfg,
        config.quadrature.kind,
        &config.quadrature.params(config.seed),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());

    let mut csv = String::from(
        "pair,point,mu_re,mu_im,integral_re,integral_im,composition_re,composition_im,rel_err\n",
    );
    let mut max_rel: f64 = 0.0;
    for pair in 0..block.pairs {
        let op1 = random_hermitian(basis.dim(), &mut rng);
        let op2 = random_hermitian(basis.dim(), &mut rng);
        let s1 = SymbolFunction::of_operator(op1.clone());
        let s2 = SymbolFunction::of_operator(op2.clone());
        for point in 0..block.points {
            let mu = random_point(cfg.n, &mut rng);
            let integral = star_product(&s1, &s2, &mu, &basis, &rule)?;
            let composition = star_via_composition(&op1, &op2, &mu, &basis)?;
            let rel = (integral - composition).norm() / composition.norm().max(1.0);
            max_rel = max_rel.max(rel);
            writeln!(
                csv,
                "{pair},{point},{},{},{},{},{},{},{rel}",
                mu.coords[0].re,
                mu.coords[0].im,
                integral.re,
                integral.im,
                composition.re,
                composition.im
            )
            .unwrap();
        }
    }

    #[derive(Serialize)]
    struct StarResults {
        dim: usize,
        pairs: usize,
        points_per_pair: usize,
        max_relative_error: f64,
    }
    let results = StarResults {
        dim: basis.dim(),
        pairs: block.pairs,
        points_per_pair: block.points,
        max_relative_error: max_rel,
    };
    Ok(vec![
        write_file(
            out_dir,
            "star_report.json",
            &report_json(Command::Star, config, &results)?,
        )?,
        write_file(out_dir, "star_pairs.csv", &csv)?,
    ])
}

fn cmd_converge(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let block = config.converge.as_ref().unwrap();
    let f1 = field_by_name(&block.f1, "converge.f1")?;
    let f2 = field_by_name(&block.f2, "converge.f2")?;
    let opts = StudyOptions {
        route: block.route.unwrap_or(StarRoute::Composition),
        ..StudyOptions::default()
    };

    let (report, base_label): (ConvergenceReport, String) = match &block.manifold {
        Some(spec) => {
            let manifold = spec.build()?;
            let base = manifold.map_param(block.base_param.as_ref().unwrap())?;
            let report = induced_correspondence_study(
                &f1,
                &f2,
                &base,
                &block.m_list,
                &manifold,
                &opts,
                block.rank_tol.unwrap_or(1e-10),
            )?;
            (report, format!("induced on {}", manifold.label))
        }
        None => {
            let mu_spec = block.mu.as_ref().unwrap();
            let mu = PointU0::new(mu_spec.iter().map(|c| C64::new(c[0], c[1])).collect());
            let report = correspondence_study(&f1, &f2, &mu, &block.m_list, &opts)?;
            (report, "ambient".into())
        }
    };

    let mut csv = String::from("m,e0,e1\n");
    for k in 0..report.m.len() {
        writeln!(csv, "{},{},{}", report.m[k], report.e0[k], report.e1[k]).unwrap();
    }

    #[derive(Serialize)]
    struct ConvergeResults {
        mode: String,
        report: ConvergenceReport,
    }
    let results = ConvergeResults {
        mode: base_label,
        report,
    };
    Ok(vec![
        write_file(
            out_dir,
            "converge_report.json",
            &report_json(Command::Converge, config, &results)?,
        )?,
        write_file(out_dir, "converge_tracks.csv", &csv)?,
    ])
}

fn cmd_pullback(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let block = config.pullback.as_ref().unwrap();
    let cfg = config.quantization.to_config();
    let basis = BasisSpec::build(cfg.clone());
    let manifold = block.manifold.build()?;
    let space = build_pullback(&manifold, &basis, block.rank_tol)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());

    // Quotient norms of the pulled-back basis sections.
    let section_norms: Vec<f64> = (0..basis.dim())
        .map(|k| {
            let mut e = DVector::from_element(basis.dim(), C64::new(0.0, 0.0));
            e[k] = C64::new(1.0, 0.0);
            pullback_norm(&PullbackSection::from_ambient(&space, &e))
        })
        .collect();

    // Symbol transfer residuals for one induced operator.
    let op = random_hermitian(basis.dim(), &mut rng);
    let induced = induced_operator(&op, &space)?;
    let mut csv = String::from("i,j,x_symbol_re,x_symbol_im,ambient_re,ambient_im,abs_err\n");
    let mut max_transfer: f64 = 0.0;
    let mut checked = 0usize;
    let mut attempts = 0usize;
    while checked < block.symbol_pairs && attempts < 100 * block.symbol_pairs {
        attempts += 1;
        let i = rng.gen_range(0..manifold.sample_count());
        let j = rng.gen_range(0..manifold.sample_count());
        let (p, q) = (&manifold.points[i], &manifold.points[j]);
        let den = kernel_l(p, q, &cfg);
        let scale = ((1.0 + p.norm_sq()) * (1.0 + q.norm_sq())).powf(f64::from(cfg.m) / 2.0);
        if den.norm() < 1e-3 * scale {
            continue;
        }
        let xs = x_symbol(&induced, p, q, &space)?;
        let ambient = covariant_symbol(&op, p, q, &basis)?;
        let err = (xs - ambient).norm();
        max_transfer = max_transfer.max(err);
        writeln!(
            csv,
            "{i},{j},{},{},{},{},{err}",
            xs.re, xs.im, ambient.re, ambient.im
        )
        .unwrap();
        checked += 1;
    }

    // Invariance defects and reconstruction norms per random operator.
    let mut operator_rows = Vec::new();
    for _ in 0..block.operators {
        let op = random_hermitian(basis.dim(), &mut rng);
        let induced = induced_operator(&op, &space)?;
        let defect = kernel_invariance_defect(&op, &space);
        let (_, fro, spectral) = reconstruct_ambient(&induced, &space);
        operator_rows.push((defect, fro, spectral));
    }

    #[derive(Serialize)]
    struct PullbackResults {
        manifold: String,
        dim: usize,
        sample_count: usize,
        rank: usize,
        nullity: usize,
        singular_values: Vec<f64>,
        basis_section_norms: Vec<f64>,
        max_symbol_transfer_error: f64,
        symbol_pairs_checked: usize,
        /// Per random operator: kernel invariance defect, Frobenius and
        /// spectral norms of the Frobenius-minimal reconstruction.
        operators: Vec<(f64, f64, f64)>,
    }
    let results = PullbackResults {
        manifold: manifold.label.clone(),
        dim: basis.dim(),
        sample_count: manifold.sample_count(),
        rank: space.rank,
        nullity: space.nullity(),
        singular_values: space.singular_values.iter().copied().collect(),
        basis_section_norms: section_norms,
        max_symbol_transfer_error: max_transfer,
        symbol_pairs_checked: checked,
        operators: operator_rows,
    };
    Ok(vec![
        write_file(
            out_dir,
            "pullback_report.json",
            &report_json(Command::Pullback, config, &results)?,
        )?,
        write_file(out_dir, "pullback_symbols.csv", &csv)?,
    ])
}

fn cmd_odzi(config: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let block = config.odzi.as_ref().unwrap();
    let cfg = config.quantization.to_config();
    let kernel = match block.kernel_exponent {
        Some(k) => LineBundleKernel::with_exponent(cfg.clone(), k),
        None => LineBundleKernel::new(cfg.clone()),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());

    // Monge-Ampère residual grid, both readings.
    let n_param = block.n_param.unwrap_or_else(|| solution_exponent(&cfg));
    let c_det = c_for_det_reading(cfg.n, n_param);
    let c_disp = c_for_displayed_reading(cfg.n, n_param);
    let rows = monge_ampere_grid(&kernel, n_param, c_det, c_disp, block.grid, block.extent);
    let mut ma_csv = String::from("x,y,residual_det,residual_displayed\n");
    let mut max_det: f64 = 0.0;
    let mut max_disp: f64 = 0.0;
    for row in &rows {
        max_det = max_det.max(row.residual_det);
        max_disp = max_disp.max(row.residual_displayed);
        writeln!(
            ma_csv,
            "{},{},{},{}",
            row.point[0][0], row.point[0][1], row.residual_det, row.residual_displayed
        )
        .unwrap();
    }

    // Holonomy agreement table.
    let report = match &block.path.circle {
        Some(_) => holonomy_agreement(
            |steps| block.path.build(cfg.n, Some(steps)).unwrap(),
            &block.steps_list,
            &kernel,
        ),
        None => holonomy_agreement(
            |_| block.path.build(cfg.n, None).unwrap(),
            &block.steps_list,
            &kernel,
        ),
    };
    let mut hol_csv = String::from("N,discrete_re,discrete_im,integral_re,integral_im,abs_err\n");
    for row in &report.rows {
        writeln!(
            hol_csv,
            "{},{},{},{},{},{}",
            row.n_steps,
            row.discrete[0],
            row.discrete[1],
            row.integral[0],
            row.integral[1],
            row.abs_err
        )
        .unwrap();
    }

    // Coherent-state metric table on random pairs.
    let mut metric_csv = String::from("mu_re,mu_im,nu_re,nu_im,amplitude_abs,metric\n");
    let mut max_amplitude: f64 = 0.0;
    let mut min_radicand = f64::INFINITY;
    let mut max_symmetry_defect: f64 = 0.0;
    for _ in 0..block.metric_pairs {
        let mu = random_point(cfg.n, &mut rng);
        let nu = random_point(cfg.n, &mut rng);
        let a = transition_amplitude(&mu, &nu, &kernel).norm();
        let d = cs_metric(&mu, &nu, &kernel);
        let d_rev = cs_metric(&nu, &mu, &kernel);
        max_amplitude = max_amplitude.max(a);
        min_radicand = min_radicand.min(metric_radicand(&mu, &nu, &kernel));
        max_symmetry_defect = max_symmetry_defect.max((d - d_rev).abs());
        writeln!(
            metric_csv,
            "{},{},{},{},{a},{d}",
            mu.coords[0].re, mu.coords[0].im, nu.coords[0].re, nu.coords[0].im
        )
        .unwrap();
    }

    #[derive(Serialize)]
    struct OdziResults {
        kernel_exponent: u32,
        n_param: f64,
        c_det_reading: f64,
        c_displayed_reading: f64,
        max_residual_det: f64,
        max_residual_displayed: f64,
        holonomy_fitted_order: Option<f64>,
        max_amplitude_modulus: f64,
        min_metric_radicand: f64,
        max_metric_symmetry_defect: f64,
    }
    let results = OdziResults {
        kernel_exponent: kernel.exponent,
        n_param,
        c_det_reading: c_det,
        c_displayed_reading: c_disp,
        max_residual_det: max_det,
        max_residual_displayed: max_disp,
        holonomy_fitted_order: report.fitted_order,
        max_amplitude_modulus: max_amplitude,
        min_metric_radicand: min_radicand,
        max_metric_symmetry_defect: max_symmetry_defect,
    };
    Ok(vec![
        write_file(
            out_dir,
            "odzi_report.json",
            &report_json(Command::Odzi, config, &results)?,
        )?,
        write_file(out_dir, "monge_ampere_grid.csv", &ma_csv)?,
        write_file(out_dir, "holonomy_agreement.csv", &hol_csv)?,
        write_file(out_dir, "metric_table.csv", &metric_csv)?,
    ])
}

pub const USAGE: &str = "\
cpnq — numerical laboratory for Berezin and coherent-state quantization on CP^n

USAGE:
    cpnq <SUBCOMMAND> --config PATH [--out DIR] [--threads N] [--seed S]

SUBCOMMANDS:
    kernel     Kernel tables, reproducing and resolution-of-identity
               residuals, normalization constants (both routes).
               CSV kernel_table.csv: mu_re,mu_im,nu_re,nu_im,l_re,l_im
    star       Star-product integral vs composition-symbol oracle on random
               Hermitian pairs.
               CSV star_pairs.csv: pair,point,mu_re,mu_im,integral_re,
               integral_im,composition_re,composition_im,rel_err
    converge   Correspondence-principle study (ambient, or induced when the
               config names a manifold).
               CSV converge_tracks.csv: m,e0,e1
    pullback   Pullback-space ranks, quotient norms, symbol-transfer
               residuals, invariance defects.
               CSV pullback_symbols.csv: i,j,x_symbol_re,x_symbol_im,
               ambient_re,ambient_im,abs_err
    odzi       Monge-Ampère residual grids (both readings), holonomy
               agreement tables, coherent-state metric tables.
               CSV monge_ampere_grid.csv: x,y,residual_det,residual_displayed
               CSV holonomy_agreement.csv: N,discrete_re,discrete_im,
               integral_re,integral_im,abs_err
               CSV metric_table.csv: mu_re,mu_im,nu_re,nu_im,amplitude_abs,metric

FLAGS:
    --config PATH   JSON experiment config (required)
    --out DIR       Output directory (default: .)
    --threads N     Worker pool size (default: rayon default)
    --seed S        Overrides the config seed

EXIT CODES:
    0  success
    2  configuration error
    3  numerical failure
";

/// Entry point used by the binary: parses CLI arguments, runs the command
/// and returns the process exit code. A machine-readable error record goes
/// to stderr on failure.
pub fn run_cli(args: &[String]) -> i32 {
    match run_cli_inner(args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(err) => {
            let record = serde_json::json!({
                "error": err.to_string(),
                "exit_code": err.exit_code(),
            });
            eprintln!("{record}");
            err.exit_code()
        }
    }
}

fn run_cli_inner(args: &[String]) -> Result<Vec<PathBuf>> {
    if args.is_empty() || args[0] == "--help" || args[0] == "-h" || args[0] == "help" {
        print!("{USAGE}");
        return Ok(vec![]);
    }
    let command = Command::parse(&args[0]).ok_or_else(|| Error::Config {
        field: "subcommand".into(),
        message: format!("unknown subcommand `{}` (try --help)", args[0]),
    })?;
    let mut config_path: Option<String> = None;
    let mut out_dir = PathBuf::from(".");
    let mut threads: Option<usize> = None;
    let mut seed: Option<u64> = None;
    let mut it = args[1..].iter();
    while let Some(arg) = it.next() {
        let mut take = |name: &str| -> Result<String> {
            it.next().cloned().ok_or_else(|| Error::Config {
                field: name.into(),
                message: format!("flag {name} needs a value"),
            })
        };
        match arg.as_str() {
            "--config" => config_path = Some(take("--config")?),
            "--out" => out_dir = PathBuf::from(take("--out")?),
            "--threads" => {
                threads = Some(take("--threads")?.parse().map_err(|_| Error::Config {
                    field: "--threads".into(),
                    message: "not a number".into(),
                })?)
            }
            "--seed" => {
                seed = Some(take("--seed")?.parse().map_err(|_| Error::Config {
                    field: "--seed".into(),
                    message: "not a number".into(),
                })?)
            }
            other => {
                return Err(Error::Config {
                    field: "args".into(),
                    message: format!("unknown flag `{other}`"),
                })
            }
        }
    }
    let config_path = config_path.ok_or_else(|| Error::Config {
        field: "--config".into(),
        message: "a config file is required".into(),
    })?;
    let text = fs::read_to_string(&config_path)?;
    let mut config = ExperimentConfig::from_json(&text)?;
    if let Some(s) = seed {
        config.seed = Some(s);
    }
    match threads {
        Some(t) => run_with_threads(command, &config, &out_dir, t),
        None => run_command(command, &config, &out_dir),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_kernel_config() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{
                "quantization": {"n": 1, "m": 2},
                "quadrature": {"radial": 12, "angular": 12},
                "seed": 7,
                "kernel": {"pairs": 10, "sections": 5, "grid": 4, "extent": 1.0}
            }"#,
        )
        .unwrap()
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let bad = ExperimentConfig::from_json(r#"{"quantization": {"n":1,"m":2,"wat":3}}"#);
        assert!(matches!(bad, Err(Error::Config { .. })));
        let bad = ExperimentConfig::from_json(r#"{"quantization": {"n":1,"m":2}, "mystery": {}}"#);
        assert!(matches!(bad, Err(Error::Config { .. })));
    }

    #[test]
    fn basis_override_above_level_names_the_field() {
        let mut config = minimal_kernel_config();
        config.kernel.as_mut().unwrap().basis_override = Some(vec![vec![3]]);
        match config.validate(Command::Kernel) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "kernel.basis_override"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn monte_carlo_without_seed_is_a_config_error() {
        let config = ExperimentConfig::from_json(
            r#"{
                "quantization": {"n": 1, "m": 2},
                "quadrature": {"kind": "monte_carlo"},
                "kernel": {}
            }"#,
        )
        .unwrap();
        assert!(matches!(
            config.validate(Command::Kernel),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn monte_carlo_inherits_the_experiment_seed() {
        let config = ExperimentConfig::from_json(
            r#"{
                "quantization": {"n": 1, "m": 2},
                "quadrature": {"kind": "monte_carlo", "mc_samples": 2000},
                "seed": 5,
                "kernel": {"pairs": 5, "sections": 2, "grid": 4, "extent": 1.0}
            }"#,
        )
        .unwrap();
        config.validate(Command::Kernel).unwrap();
        let dir = std::env::temp_dir().join("cpnq_cli_test_mc_seed");
        let _ = fs::remove_dir_all(&dir);
        let files = run_command(Command::Kernel, &config, &dir).unwrap();
        assert!(!files.is_empty());
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn kernel_command_writes_deterministic_reports() {
        let config = minimal_kernel_config();
        let dir1 = std::env::temp_dir().join("cpnq_cli_test_a");
        let dir2 = std::env::temp_dir().join("cpnq_cli_test_b");
        let _ = fs::remove_dir_all(&dir1);
        let _ = fs::remove_dir_all(&dir2);
        let files1 = run_with_threads(Command::Kernel, &config, &dir1, 1).unwrap();
        let files2 = run_with_threads(Command::Kernel, &config, &dir2, 4).unwrap();
        assert_eq!(files1.len(), files2.len());
        for (a, b) in files1.iter().zip(&files2) {
            let ca = fs::read(a).unwrap();
            let cb = fs::read(b).unwrap();
            assert_eq!(ca, cb, "outputs differ between thread counts");
        }
        let report: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&files1[0]).unwrap()).unwrap();
        assert_eq!(report["version"], TOOL_VERSION);
        assert_eq!(report["command"], "kernel");
        assert!(report["config"]["quantization"]["n"].is_number());
        assert!(report["results"]["max_kernel_mismatch"].as_f64().unwrap() < 1e-10);
        let _ = fs::remove_dir_all(&dir1);
        let _ = fs::remove_dir_all(&dir2);
    }

    #[test]
    fn converge_single_level_reports_null_slope() {
        let config = ExperimentConfig::from_json(
            r#"{
                "quantization": {"n": 1, "m": 2},
                "converge": {"m_list": [4], "f1": "re_frac", "f2": "im_frac", "mu": [[0.3, 0.0]]}
            }"#,
        )
        .unwrap();
        let dir = std::env::temp_dir().join("cpnq_cli_test_converge");
        let _ = fs::remove_dir_all(&dir);
        let files = run_command(Command::Converge, &config, &dir).unwrap();
        let report: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&files[0]).unwrap()).unwrap();
        assert!(report["results"]["report"]["slope_e0"].is_null());
        assert!(report["results"]["report"]["kappa_fit"].is_null());
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn cli_entry_maps_error_classes_to_exit_codes() {
        // Unknown subcommand → 2.
        assert_eq!(run_cli(&["frobnicate".to_string()]), 2);
        // Missing config flag → 2.
        assert_eq!(run_cli(&["kernel".to_string()]), 2);
    }

    #[test]
    fn field_registry_rejects_unknown_names() {
        assert!(field_by_name("re_frac", "x").is_ok());
        match field_by_name("nope", "converge.f1") {
            Err(Error::Config { field, .. }) => assert_eq!(field, "converge.f1"),
            other => panic!("unexpected {other:?}"),
        }
    }
}

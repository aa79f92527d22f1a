//! Experiment orchestration: resolve a flat key–value [`Config`] into a
//! problem and a solver, run it (replicated), and emit fixed-schema CSV rows.
//!
//! This layer is concrete in `f64`: it faces the CSV schema, which is double
//! precision. The library underneath stays generic over the scalar type.
//!
//! ### Config keys
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `problem` | `translating` \| `rotating` \| `online_nesterov` \| `least_squares` \| `logistic` | required |
//! | `solver` | `ogd` \| `polyak` \| `nesterov` \| `custom` \| `olnm` \| `orgd` \| `abstain` | required |
//! | `kappa` | condition number | required where the problem needs it |
//! | `l` | smoothness constant | `1.0` |
//! | `sigma` | per-step minimizer drift | `1.0` |
//! | `horizon` | solver steps | `10000` deterministic, `1000` synthetic |
//! | `replications` | independent repetitions | `1` deterministic, `50` synthetic |
//! | `seed` | RNG seed (replication `i` uses `seed+i`) | required |
//! | `dim` | ambient dimension | `2` translating, `1000` online_nesterov |
//! | `a_param` | head curvature: `mid`, `flat`, or a number | `mid` |
//! | `alpha`,`beta`,`eta` | explicit coefficients (`custom`; `alpha` alone overrides `ogd`) | preset |
//! | `xi_mode` | translating offset: `auto` \| `exact` \| `zero` | `auto` |
//! | `prehistory` | `auto` \| `aligned` \| `default` | `auto` |
//! | `olnm_period` | restart length or `auto` (= ⌊(2+√2)√κ⌋) | `auto` |
//! | `olnm_variant` | `faithful` \| `every_step` \| `refresh` | `faithful` |
//! | `delta` | regularization weight or `auto` (root of `h`) | `auto` |
//! | `delta_horizon` | steps used when estimating σ(δ), R(δ) | `min(horizon,200)` |
//! | `delta_ensemble` | problems used for that estimate | `min(replications,4)` |
//! | `n`,`d`,`noise_std`,`flips_per_step` | synthetic-generator knobs | `20`,`5`,`1e-3`,`1` |
//! | `divergence_cap` | stop when `‖x‖` exceeds this | `1e9` |
//! | `window`,`rel_tol` | limsup estimator controls | `max(T,100)`, `1e-3` |
//! | `emit_series` | write per-step rows (replication 0) | `true` run, `false` sweep |
//! | `record_function`,`record_gradient` | extra error series | `false` |
//! | `sweep_kappa` | comma-separated κ grid (sweep only) | — |
//! | `label` | run-id prefix | `{problem}-{solver}` |
//! | `out` | output path (consumed by the CLI) | — |

use super::config::Config;
use super::csv::{CsvRow, Metric};
use crate::analysis::{
    default_delta_grid, default_window, estimate_regularization_curve, evaluate_bounds,
    fit_through_origin, rotating_spectral_radius, DeltaInfo, LimsupEstimate, TrackingReport,
};
use crate::error::TvError;
use crate::problems::{
    FunctionSequence, OnlineNesterovFunction, RotatingQuadratic, SmoothnessProfile,
    TranslatingQuadratic,
};
use crate::solvers::{
    olnm_restart_length, run_abstain, run_alg_from, run_olnm, run_orgd, AlgParams, AlgPreset,
    OlnmParams, OrgdParams, RunOptions, Trace,
};
use crate::synthetic::{
    build_least_squares_sequence, build_logistic_sequence, replicate, LeastSquaresSequence,
    LeastSquaresSequenceSpec, LogisticSequence, LogisticSequenceSpec,
};
use crate::Result;

/// Every key the harness understands; anything else is rejected up front.
pub const KNOWN_KEYS: &[&str] = &[
    "problem",
    "solver",
    "label",
    "out",
    "kappa",
    "l",
    "sigma",
    "horizon",
    "replications",
    "seed",
    "dim",
    "a_param",
    "alpha",
    "beta",
    "eta",
    "xi_mode",
    "prehistory",
    "olnm_period",
    "olnm_variant",
    "delta",
    "delta_horizon",
    "delta_ensemble",
    "n",
    "d",
    "noise_std",
    "flips_per_step",
    "divergence_cap",
    "window",
    "rel_tol",
    "emit_series",
    "record_function",
    "record_gradient",
    "sweep_kappa",
];

/// `|h(δ*)|` target of the automatic regularization-weight search.
pub const DELTA_H_TOL: f64 = 1e-8;

/// Result of a `run` or `sweep`: the emitted rows plus the divergence flag
/// that drives the CLI exit code.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub run_id: String,
    pub rows: Vec<CsvRow>,
    /// Some replication hit the divergence cap (data is still written).
    pub any_diverged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ProblemKind {
    Translating,
    Rotating,
    OnlineNesterov,
    LeastSquares,
    Logistic,
}

impl ProblemKind {
    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "translating" => ProblemKind::Translating,
            "rotating" => ProblemKind::Rotating,
            "online_nesterov" => ProblemKind::OnlineNesterov,
            "least_squares" => ProblemKind::LeastSquares,
            "logistic" => ProblemKind::Logistic,
            other => {
                return Err(TvError::config(format!(
                    "unknown problem `{other}` (translating, rotating, online_nesterov, least_squares, logistic)"
                )))
            }
        })
    }

    fn deterministic(self) -> bool {
        !matches!(self, ProblemKind::LeastSquares | ProblemKind::Logistic)
    }

    fn needs_kappa(self) -> bool {
        self != ProblemKind::Logistic
    }
}

#[derive(Debug, Clone)]
enum SolverSpec {
    Alg(AlgParams<f64>),
    Olnm(OlnmParams),
    Orgd(DeltaMode),
    Abstain,
}

#[derive(Debug, Clone, Copy)]
enum DeltaMode {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy)]
enum AParam {
    Mid,
    Flat,
    Value(f64),
}

/// One concrete problem instance behind a single dispatchable type.
enum BuiltProblem {
    Translating(TranslatingQuadratic<f64>),
    Rotating(RotatingQuadratic<f64>),
    Nesterov(OnlineNesterovFunction<f64>),
    LeastSquares(LeastSquaresSequence<f64>),
    Logistic(LogisticSequence<f64>),
}

impl FunctionSequence<f64> for BuiltProblem {
    fn dimension(&self) -> usize {
        match self {
            BuiltProblem::Translating(p) => p.dimension(),
            BuiltProblem::Rotating(p) => p.dimension(),
            BuiltProblem::Nesterov(p) => p.dimension(),
            BuiltProblem::LeastSquares(p) => p.dimension(),
            BuiltProblem::Logistic(p) => p.dimension(),
        }
    }

    fn profile(&self) -> SmoothnessProfile<f64> {
        match self {
            BuiltProblem::Translating(p) => p.profile(),
            BuiltProblem::Rotating(p) => p.profile(),
            BuiltProblem::Nesterov(p) => p.profile(),
            BuiltProblem::LeastSquares(p) => p.profile(),
            BuiltProblem::Logistic(p) => p.profile(),
        }
    }

    fn value(&self, t: usize, x: &[f64]) -> f64 {
        match self {
            BuiltProblem::Translating(p) => p.value(t, x),
            BuiltProblem::Rotating(p) => p.value(t, x),
            BuiltProblem::Nesterov(p) => p.value(t, x),
            BuiltProblem::LeastSquares(p) => p.value(t, x),
            BuiltProblem::Logistic(p) => p.value(t, x),
        }
    }

    fn gradient_into(&self, t: usize, x: &[f64], out: &mut [f64]) {
        match self {
            BuiltProblem::Translating(p) => p.gradient_into(t, x, out),
            BuiltProblem::Rotating(p) => p.gradient_into(t, x, out),
            BuiltProblem::Nesterov(p) => p.gradient_into(t, x, out),
            BuiltProblem::LeastSquares(p) => p.gradient_into(t, x, out),
            BuiltProblem::Logistic(p) => p.gradient_into(t, x, out),
        }
    }

    fn minimizer(&self, t: usize) -> Option<Vec<f64>> {
        match self {
            BuiltProblem::Translating(p) => p.minimizer(t),
            BuiltProblem::Rotating(p) => p.minimizer(t),
            BuiltProblem::Nesterov(p) => p.minimizer(t),
            BuiltProblem::LeastSquares(p) => p.minimizer(t),
            BuiltProblem::Logistic(p) => p.minimizer(t),
        }
    }
}

/// Fully resolved experiment, ready to execute.
struct Experiment {
    run_id: String,
    problem: ProblemKind,
    solver: SolverSpec,
    kappa: Option<f64>,
    l: f64,
    sigma: f64,
    horizon: usize,
    replications: usize,
    seed: u64,
    dim: usize,
    a_param: AParam,
    xi_exact: bool,
    aligned_prehistory: bool,
    delta_horizon: usize,
    delta_ensemble: usize,
    n: usize,
    d: usize,
    noise_std: f64,
    flips_per_step: usize,
    divergence_cap: f64,
    window: usize,
    rel_tol: f64,
    emit_series: bool,
    record_function: bool,
    record_gradient: bool,
}

/// Aggregates a sweep needs from one grid point.
struct ExecSummary {
    any_diverged: bool,
    mean_iterate: Option<f64>,
    mean_gradient: Option<f64>,
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn run_id_for(cfg: &Config, suffix: &str) -> Result<String> {
    let label = match cfg.get("label") {
        Some(l) => l.to_string(),
        None => format!("{}-{}", cfg.require("problem")?, cfg.require("solver")?),
    };
    let h = fnv1a(cfg.canonical_string().as_bytes());
    Ok(format!("{label}{suffix}-{:08x}", (h ^ (h >> 32)) as u32))
}

impl Experiment {
    fn resolve(cfg: &Config, run_id: String) -> Result<Self> {
        let problem = ProblemKind::parse(cfg.require("problem")?)?;
        let l = cfg.f64_or("l", 1.0)?;
        if problem == ProblemKind::LeastSquares && l != 1.0 {
            return Err(TvError::config(
                "the least_squares generator is normalized to l = 1",
            ));
        }
        let sigma = cfg.f64_or("sigma", 1.0)?;
        let kappa = cfg.get_f64("kappa")?;
        if problem.needs_kappa() && kappa.is_none() {
            return Err(TvError::config(format!(
                "problem `{}` needs a `kappa` key",
                cfg.require("problem")?
            )));
        }
        if let Some(k) = kappa {
            if k < 1.0 {
                return Err(TvError::config(format!("kappa must be >= 1, got {k}")));
            }
        }
        let mu = kappa.map(|k| l / k).unwrap_or(0.0);
        let mu_eff = if problem == ProblemKind::Logistic { 0.0 } else { mu };

        let seed = cfg
            .get_u64("seed")?
            .ok_or_else(|| TvError::config("missing required key `seed`"))?;
        let horizon = cfg.usize_or(
            "horizon",
            if problem.deterministic() { 10_000 } else { 1_000 },
        )?;
        if horizon == 0 {
            return Err(TvError::config("horizon must be >= 1"));
        }
        let replications =
            cfg.usize_or("replications", if problem.deterministic() { 1 } else { 50 })?;
        if replications == 0 {
            return Err(TvError::config("replications must be >= 1"));
        }

        let dim = match problem {
            ProblemKind::Translating => cfg.usize_or("dim", 2)?,
            ProblemKind::OnlineNesterov => cfg.usize_or("dim", 1000)?,
            ProblemKind::Rotating => {
                let d = cfg.usize_or("dim", 2)?;
                if d != 2 {
                    return Err(TvError::config("the rotating problem is two-dimensional"));
                }
                d
            }
            ProblemKind::LeastSquares | ProblemKind::Logistic => {
                if cfg.get("dim").is_some() {
                    return Err(TvError::config(
                        "synthetic problems size with `n` and `d`, not `dim`",
                    ));
                }
                cfg.usize_or("d", 5)?
            }
        };
        if dim == 0 {
            return Err(TvError::config("dim must be >= 1"));
        }

        let a_param = match cfg.get("a_param") {
            None | Some("mid") => AParam::Mid,
            Some("flat") => AParam::Flat,
            Some(v) => AParam::Value(v.parse::<f64>().map_err(|_| {
                TvError::config(format!("a_param must be `mid`, `flat`, or a number, got `{v}`"))
            })?),
        };
        if !matches!(a_param, AParam::Mid) && problem != ProblemKind::OnlineNesterov {
            return Err(TvError::config(
                "a_param applies to the online_nesterov problem only",
            ));
        }

        let solver_name = cfg.require("solver")?;
        let solver = match solver_name {
            "ogd" => {
                let params = match cfg.get_f64("alpha")? {
                    Some(a) => AlgParams::ogd(a),
                    None => AlgParams::ogd_optimal(mu_eff, l),
                };
                SolverSpec::Alg(params)
            }
            "polyak" | "nesterov" => {
                if !(mu_eff > 0.0) {
                    return Err(TvError::config(format!(
                        "solver `{solver_name}` needs a strongly convex problem (kappa set, mu > 0)"
                    )));
                }
                SolverSpec::Alg(if solver_name == "polyak" {
                    AlgParams::polyak(mu_eff, l)
                } else {
                    AlgParams::nesterov(mu_eff, l)
                })
            }
            "custom" => {
                let alpha = cfg.get_f64("alpha")?.ok_or_else(|| {
                    TvError::config("solver `custom` needs an `alpha` key")
                })?;
                SolverSpec::Alg(AlgParams::custom(
                    alpha,
                    cfg.f64_or("beta", 0.0)?,
                    cfg.f64_or("eta", 0.0)?,
                ))
            }
            "olnm" => {
                let t_period = match cfg.get("olnm_period") {
                    None | Some("auto") => {
                        let k = kappa.filter(|_| problem != ProblemKind::Logistic).ok_or_else(|| {
                            TvError::config(
                                "olnm needs `kappa` (for T = floor((2+sqrt(2))*sqrt(kappa))) or an explicit `olnm_period`",
                            )
                        })?;
                        olnm_restart_length(k)?
                    }
                    Some(v) => v.parse::<usize>().map_err(|_| {
                        TvError::config(format!(
                            "olnm_period must be `auto` or a positive integer, got `{v}`"
                        ))
                    })?,
                };
                if t_period == 0 {
                    return Err(TvError::config("olnm_period must be >= 1"));
                }
                let params = match cfg.get("olnm_variant") {
                    None | Some("faithful") => OlnmParams::faithful(t_period),
                    Some("every_step") => OlnmParams::every_step(t_period),
                    Some("refresh") => OlnmParams {
                        t_period,
                        every_step: true,
                        refresh_every_step: true,
                    },
                    Some(v) => {
                        return Err(TvError::config(format!(
                            "olnm_variant must be faithful, every_step, or refresh, got `{v}`"
                        )))
                    }
                };
                SolverSpec::Olnm(params)
            }
            "orgd" => SolverSpec::Orgd(match cfg.get("delta") {
                None | Some("auto") => DeltaMode::Auto,
                Some(v) => {
                    let d = v.parse::<f64>().map_err(|_| {
                        TvError::config(format!("delta must be `auto` or a number, got `{v}`"))
                    })?;
                    if !(d > 0.0) {
                        return Err(TvError::config(format!("delta must be > 0, got {d}")));
                    }
                    DeltaMode::Fixed(d)
                }
            }),
            "abstain" => SolverSpec::Abstain,
            other => {
                return Err(TvError::config(format!(
                    "unknown solver `{other}` (ogd, polyak, nesterov, custom, olnm, orgd, abstain)"
                )))
            }
        };

        let xi_exact = match cfg.get("xi_mode") {
            None | Some("auto") => matches!(solver, SolverSpec::Alg(_)),
            Some("exact") => {
                if !matches!(solver, SolverSpec::Alg(_)) {
                    return Err(TvError::config(
                        "xi_mode=exact needs a solver in the alg family",
                    ));
                }
                true
            }
            Some("zero") => false,
            Some(v) => {
                return Err(TvError::config(format!(
                    "xi_mode must be auto, exact, or zero, got `{v}`"
                )))
            }
        } && problem == ProblemKind::Translating;
        if cfg.get("xi_mode").is_some() && problem != ProblemKind::Translating {
            return Err(TvError::config(
                "xi_mode applies to the translating problem only",
            ));
        }

        let aligned_prehistory = match cfg.get("prehistory") {
            None | Some("auto") => {
                if let SolverSpec::Alg(p) = &solver {
                    xi_exact && (p.beta != 0.0 || p.eta != 0.0)
                } else {
                    false
                }
            }
            Some("aligned") => {
                if !(xi_exact && matches!(solver, SolverSpec::Alg(_))) {
                    return Err(TvError::config(
                        "prehistory=aligned needs the translating problem in exact mode with an alg solver",
                    ));
                }
                true
            }
            Some("default") => false,
            Some(v) => {
                return Err(TvError::config(format!(
                    "prehistory must be auto, aligned, or default, got `{v}`"
                )))
            }
        };

        let t_period = match &solver {
            SolverSpec::Olnm(p) => Some(p.t_period),
            _ => None,
        };
        let window = match cfg.get_usize("window")? {
            Some(w) if w >= 1 => w,
            Some(_) => return Err(TvError::config("window must be >= 1")),
            None => default_window(t_period),
        };
        let rel_tol = cfg.f64_or("rel_tol", 1e-3)?;
        let divergence_cap = cfg.f64_or("divergence_cap", 1e9)?;

        let n = cfg.usize_or("n", 20)?;
        let d = cfg.usize_or("d", 5)?;
        let noise_std = cfg.f64_or("noise_std", 1e-3)?;
        let flips_per_step = cfg.usize_or("flips_per_step", 1)?;

        let record_gradient = cfg.bool_or("record_gradient", false)?
            || problem == ProblemKind::Logistic
            || matches!(solver, SolverSpec::Abstain);

        Ok(Experiment {
            run_id,
            problem,
            solver,
            kappa,
            l,
            sigma,
            horizon,
            replications,
            seed,
            dim,
            a_param,
            xi_exact,
            aligned_prehistory,
            delta_horizon: cfg.usize_or("delta_horizon", horizon.min(200))?,
            delta_ensemble: cfg.usize_or("delta_ensemble", replications.min(4).max(1))?,
            n,
            d,
            noise_std,
            flips_per_step,
            divergence_cap,
            window,
            rel_tol,
            emit_series: cfg.bool_or("emit_series", true)?,
            record_function: cfg.bool_or("record_function", false)?,
            record_gradient,
        })
    }

    fn profile(&self) -> Result<SmoothnessProfile<f64>> {
        match self.kappa {
            Some(k) => SmoothnessProfile::from_kappa(k, self.l, self.sigma),
            None => SmoothnessProfile::new(0.0, self.l, self.sigma),
        }
    }

    fn build_problem(&self, rep_seed: u64) -> Result<BuiltProblem> {
        Ok(match self.problem {
            ProblemKind::Translating => {
                let profile = self.profile()?;
                let x0 = vec![0.0; self.dim];
                let p = if self.xi_exact {
                    let params = match &self.solver {
                        SolverSpec::Alg(p) => p,
                        _ => unreachable!("xi_exact is restricted to alg solvers at resolve time"),
                    };
                    TranslatingQuadratic::for_alg(profile, params, x0)?
                } else {
                    TranslatingQuadratic::with_offset(profile, x0, 0.0)?
                };
                BuiltProblem::Translating(p)
            }
            ProblemKind::Rotating => {
                let profile = self.profile()?;
                BuiltProblem::Rotating(RotatingQuadratic::new(profile.mu, profile.l)?)
            }
            ProblemKind::OnlineNesterov => {
                let profile = self.profile()?;
                let a = match self.a_param {
                    AParam::Mid => OnlineNesterovFunction::head_curvature_mid(&profile),
                    AParam::Flat => OnlineNesterovFunction::head_curvature_flat(&profile),
                    AParam::Value(v) => v,
                };
                BuiltProblem::Nesterov(OnlineNesterovFunction::new(
                    profile,
                    a,
                    vec![0.0; self.dim],
                    self.dim,
                )?)
            }
            ProblemKind::LeastSquares => {
                let spec = LeastSquaresSequenceSpec {
                    n: self.n,
                    d: self.d,
                    kappa: self.kappa.expect("least_squares requires kappa"),
                    sigma: self.sigma,
                    noise_std: self.noise_std,
                    horizon: self.horizon,
                    seed: rep_seed,
                };
                BuiltProblem::LeastSquares(build_least_squares_sequence(&spec)?)
            }
            ProblemKind::Logistic => {
                let spec = LogisticSequenceSpec {
                    n: self.n,
                    d: self.d,
                    l_target: self.l,
                    flips_per_step: self.flips_per_step,
                    horizon: self.horizon,
                    seed: rep_seed,
                };
                BuiltProblem::Logistic(build_logistic_sequence(&spec)?)
            }
        })
    }

    /// Solver start point for a given problem instance.
    fn start_point(&self, problem: &BuiltProblem) -> Vec<f64> {
        match problem {
            BuiltProblem::Rotating(_) => vec![1.0; 2],
            BuiltProblem::LeastSquares(p) => p.walk_point(0).to_vec(),
            _ => vec![0.0; problem.dimension()],
        }
    }

    fn run_options(&self) -> RunOptions<f64> {
        let mut opts = RunOptions::new(self.horizon).with_divergence_cap(self.divergence_cap);
        if self.record_function {
            opts = opts.with_function_errors();
        }
        if self.record_gradient {
            opts = opts.with_gradient_errors();
        }
        opts
    }

    fn run_one(&self, problem: &BuiltProblem, orgd_delta: Option<f64>) -> Result<Trace<f64>> {
        let opts = self.run_options();
        let x0 = self.start_point(problem);
        Ok(match &self.solver {
            SolverSpec::Alg(params) => {
                let (x0, x_prev) = if self.aligned_prehistory {
                    match problem {
                        BuiltProblem::Translating(p) => {
                            let (a, b) = p.aligned_prehistory();
                            (a, Some(b))
                        }
                        _ => (x0, None),
                    }
                } else {
                    (x0, None)
                };
                run_alg_from(problem, params, x0, x_prev, opts)
            }
            SolverSpec::Olnm(params) => run_olnm(problem, params, x0, opts),
            SolverSpec::Orgd(_) => {
                let delta =
                    orgd_delta.expect("orgd delta is resolved before replications start");
                let x_c = vec![0.0; problem.dimension()];
                let params = OrgdParams::new(delta, x_c)?;
                run_orgd(problem, &params, x0, opts)
            }
            SolverSpec::Abstain => {
                let x_c = vec![0.0; problem.dimension()];
                run_abstain(problem, &x_c, opts)
            }
        })
    }

    /// Estimate σ(δ), R(δ) curves and resolve the regularization weight.
    /// Returns `(δ, info for bounds, human-readable detail for flags)`.
    fn resolve_delta(&self, mode: DeltaMode) -> Result<(f64, DeltaInfo<f64>, String)> {
        let ensemble: Vec<BuiltProblem> = (0..self.delta_ensemble)
            .map(|i| self.build_problem(self.seed.wrapping_add(i as u64)))
            .collect::<Result<_>>()?;
        let x_c = vec![0.0; ensemble[0].dimension()];
        let l = ensemble[0].profile().l;
        let floor = 1e-3 * l;
        let hor = self.delta_horizon;

        match mode {
            DeltaMode::Fixed(delta) => {
                let (grid, idx) = if delta > floor * (1.0 + 1e-9) {
                    (vec![floor, delta], 1)
                } else {
                    (vec![delta], 0)
                };
                let curve = estimate_regularization_curve(&ensemble, &x_c, &grid, hor)?;
                let info = DeltaInfo {
                    sigma_delta: curve.sigma[idx],
                    r_delta: curve.r[idx],
                    r_zero: curve.r[0],
                };
                Ok((delta, info, format!("delta={delta:.6e};fixed")))
            }
            DeltaMode::Auto => {
                let grid = default_delta_grid(l);
                let curve = estimate_regularization_curve(&ensemble, &x_c, &grid, hor)?;
                let r_zero = curve.r[0];
                // Bracket a sign change of h on the grid, then bisect the
                // continuous h (each evaluation re-estimates σ, R at one δ).
                let mut bracket = None;
                for i in 0..grid.len() - 1 {
                    if curve.h[i] == 0.0 || curve.h[i] * curve.h[i + 1] < 0.0 {
                        bracket = Some(i);
                        break;
                    }
                }
                let Some(i) = bracket else {
                    let k = (0..grid.len())
                        .min_by(|&a, &b| curve.h[a].abs().total_cmp(&curve.h[b].abs()))
                        .expect("grid is nonempty");
                    let info = DeltaInfo {
                        sigma_delta: curve.sigma[k],
                        r_delta: curve.r[k],
                        r_zero,
                    };
                    return Ok((
                        grid[k],
                        info,
                        format!("delta={:.6e};h={:.3e};unbracketed", grid[k], curve.h[k]),
                    ));
                };
                let (mut lo, mut hi) = (grid[i], grid[i + 1]);
                let mut h_lo = curve.h[i];
                let mut best = (grid[i], curve.sigma[i], curve.r[i], curve.h[i]);
                for _ in 0..80 {
                    if best.3.abs() <= DELTA_H_TOL || (hi - lo) <= 1e-14 * l {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    let point = estimate_regularization_curve(&ensemble, &x_c, &[mid], hor)?;
                    best = (mid, point.sigma[0], point.r[0], point.h[0]);
                    if h_lo * best.3 <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        h_lo = best.3;
                    }
                }
                let info = DeltaInfo {
                    sigma_delta: best.1,
                    r_delta: best.2,
                    r_zero,
                };
                Ok((
                    best.0,
                    info,
                    format!("delta={:.6e};h={:.3e};bracketed", best.0, best.3),
                ))
            }
        }
    }

    /// `R(δ_floor)` estimate standing in for `R(0)` (the unregularized
    /// minimizer can escape to infinity; the floor surrogate is never larger,
    /// so the abstain ceiling it yields is the harder one).
    fn floor_info(&self) -> Result<DeltaInfo<f64>> {
        let ensemble: Vec<BuiltProblem> = (0..self.delta_ensemble)
            .map(|i| self.build_problem(self.seed.wrapping_add(i as u64)))
            .collect::<Result<_>>()?;
        let x_c = vec![0.0; ensemble[0].dimension()];
        let floor = 1e-3 * ensemble[0].profile().l;
        let curve =
            estimate_regularization_curve(&ensemble, &x_c, &[floor], self.delta_horizon)?;
        Ok(DeltaInfo {
            sigma_delta: curve.sigma[0],
            r_delta: curve.r[0],
            r_zero: curve.r[0],
        })
    }

    /// Run all replications and append rows. `flag_prefix` annotates each
    /// summary row (used for `kappa=` in sweeps); `t_summary` overrides the
    /// `t` column of summary rows (grid index in sweeps).
    fn execute(
        &self,
        rows: &mut Vec<CsvRow>,
        flag_prefix: &str,
        t_summary: Option<usize>,
    ) -> Result<ExecSummary> {
        // Resolve the regularization weight once, before replications.
        let (orgd_delta, delta_info, delta_detail) = match &self.solver {
            SolverSpec::Orgd(mode) => {
                let (d, info, detail) = self.resolve_delta(*mode)?;
                (Some(d), Some(info), detail)
            }
            SolverSpec::Abstain if self.problem == ProblemKind::Logistic => {
                (None, Some(self.floor_info()?), String::new())
            }
            _ => (None, None, String::new()),
        };

        let agg = replicate(self.replications, self.seed, |rep_seed, _rep| {
            let problem = self.build_problem(rep_seed)?;
            let trace = self.run_one(&problem, orgd_delta)?;
            TrackingReport::from_trace(&trace, self.window, self.rel_tol)
        })?;

        // Per-step series of replication 0.
        if self.emit_series {
            let rep0 = &agg.per_rep[0];
            for (metric, series) in [
                (Metric::IterateError, &rep0.iterate_errors),
                (Metric::FunctionError, &rep0.function_errors),
                (Metric::GradientError, &rep0.gradient_errors),
            ] {
                if let Some(series) = series {
                    for (t, &v) in series.iter().enumerate() {
                        rows.push(CsvRow::new(&self.run_id, 0, t, metric, v, flag_prefix));
                    }
                }
            }
        }

        // Per-replication limsup summaries.
        for (rep, report) in agg.per_rep.iter().enumerate() {
            for (series_name, est, series) in [
                ("iterate", &report.limsup_iterate, &report.iterate_errors),
                ("function", &report.limsup_function, &report.function_errors),
                ("gradient", &report.limsup_gradient, &report.gradient_errors),
            ] {
                if let Some(est) = est {
                    let t = t_summary.unwrap_or_else(|| {
                        series.as_ref().map(|s| s.len().saturating_sub(1)).unwrap_or(0)
                    });
                    rows.push(CsvRow::new(
                        &self.run_id,
                        rep,
                        t,
                        Metric::LimsupEstimate,
                        est.value,
                        limsup_flags(flag_prefix, series_name, est, report.diverged_at),
                    ));
                }
            }
        }

        // Cross-replication aggregates.
        if self.replications > 1 {
            for (series_name, stat) in [
                ("iterate", &agg.iterate),
                ("function", &agg.function),
                ("gradient", &agg.gradient),
            ] {
                if let Some(stat) = stat {
                    let t = t_summary.unwrap_or(self.horizon);
                    let flags =
                        format!("{flag_prefix}series={series_name};mean_over={}", stat.n);
                    rows.push(CsvRow::new(
                        &self.run_id,
                        self.replications,
                        t,
                        Metric::LimsupEstimate,
                        stat.mean,
                        flags.clone(),
                    ));
                    rows.push(CsvRow::new(
                        &self.run_id,
                        self.replications,
                        t,
                        Metric::LimsupStderr,
                        stat.stderr,
                        flags,
                    ));
                }
            }
        }

        self.emit_bounds(rows, flag_prefix, t_summary, delta_info.as_ref(), &delta_detail)?;
        self.emit_rho(rows, flag_prefix, t_summary)?;

        Ok(ExecSummary {
            any_diverged: agg.any_diverged,
            mean_iterate: agg.iterate.as_ref().map(|s| s.mean),
            mean_gradient: agg.gradient.as_ref().map(|s| s.mean),
        })
    }

    fn emit_bounds(
        &self,
        rows: &mut Vec<CsvRow>,
        flag_prefix: &str,
        t_summary: Option<usize>,
        delta_info: Option<&DeltaInfo<f64>>,
        delta_detail: &str,
    ) -> Result<()> {
        // Use the replication-0 instance's certified profile (for synthetic
        // problems this carries the realized drift bound).
        let problem = self.build_problem(self.seed)?;
        let profile = problem.profile();
        let alg_params = match &self.solver {
            SolverSpec::Alg(p) => Some(p),
            _ => None,
        };
        let t_period = match &self.solver {
            SolverSpec::Olnm(p) => Some(p.t_period),
            _ => None,
        };
        let bounds = evaluate_bounds(&profile, alg_params, t_period, delta_info);
        let t = t_summary.unwrap_or(0);
        let mut push = |value: Option<f64>, tag: &str, extra: &str| {
            if let Some(v) = value {
                let flags = if extra.is_empty() {
                    format!("{flag_prefix}bound={tag}")
                } else {
                    format!("{flag_prefix}bound={tag};{extra}")
                };
                rows.push(CsvRow::new(&self.run_id, 0, t, Metric::BoundValue, v, flags));
            }
        };

        push(bounds.lower_bound, "lower", "");
        push(bounds.ogd_optimal, "ogd_optimal", "");
        if let Some(p) = alg_params {
            if p.preset() == AlgPreset::Ogd {
                push(bounds.ogd_upper, "ogd_upper", "");
            }
            if let BuiltProblem::Translating(tp) = &problem {
                if self.xi_exact {
                    push(Some(tp.xi()), "trailing_xi", "");
                }
            }
        }
        if t_period.is_some() {
            push(bounds.olnm_upper, "olnm_upper", "");
        }
        if matches!(self.solver, SolverSpec::Orgd(_)) {
            push(bounds.orgd_upper, "orgd_upper", delta_detail);
            push(bounds.abstain_upper, "abstain_upper", "");
        }
        if matches!(self.solver, SolverSpec::Abstain) {
            push(bounds.abstain_upper, "abstain_upper", "");
        }
        Ok(())
    }

    fn emit_rho(
        &self,
        rows: &mut Vec<CsvRow>,
        flag_prefix: &str,
        t_summary: Option<usize>,
    ) -> Result<()> {
        let SolverSpec::Alg(params) = &self.solver else {
            return Ok(());
        };
        if self.problem != ProblemKind::Rotating {
            return Ok(());
        }
        let profile = self.profile()?;
        let report =
            rotating_spectral_radius(params.alpha, params.beta, params.eta, profile.mu, profile.l)?;
        let t = t_summary.unwrap_or(0);
        let verdict = if report.stable { "stable" } else { "unstable" };
        rows.push(CsvRow::new(
            &self.run_id,
            0,
            t,
            Metric::Rho,
            report.rho,
            format!("{flag_prefix}{verdict}"),
        ));
        if let Some(cf) = report.polyak_closed_form {
            rows.push(CsvRow::new(
                &self.run_id,
                0,
                t,
                Metric::Rho,
                cf,
                format!("{flag_prefix}polyak_closed_form"),
            ));
        }
        Ok(())
    }
}

fn limsup_flags(
    prefix: &str,
    series_name: &str,
    est: &LimsupEstimate<f64>,
    diverged_at: Option<usize>,
) -> String {
    let conv = if est.converged {
        "converged"
    } else {
        "not_converged"
    };
    match diverged_at {
        Some(t) => format!("{prefix}series={series_name};{conv};diverged@{t}"),
        None => format!("{prefix}series={series_name};{conv}"),
    }
}

/// Execute a single configured experiment.
pub fn run_experiment(cfg: &Config) -> Result<RunOutput> {
    cfg.reject_unknown(KNOWN_KEYS)?;
    if cfg.get("sweep_kappa").is_some() {
        return Err(TvError::config(
            "config has `sweep_kappa`; use the sweep operation",
        ));
    }
    let run_id = run_id_for(cfg, "")?;
    let exp = Experiment::resolve(cfg, run_id.clone())?;
    let mut rows = Vec::new();
    let summary = exp.execute(&mut rows, "", None)?;
    Ok(RunOutput {
        run_id,
        rows,
        any_diverged: summary.any_diverged,
    })
}

/// Execute a κ-sweep: one batch of summary rows per grid point (ascending),
/// then a proportionality fit of the mean limsup against √κ.
pub fn sweep_experiment(cfg: &Config) -> Result<RunOutput> {
    cfg.reject_unknown(KNOWN_KEYS)?;
    let mut grid = cfg
        .get_f64_list("sweep_kappa")?
        .ok_or_else(|| TvError::config("sweep needs a `sweep_kappa` key"))?;
    if grid.is_empty() {
        return Err(TvError::config("sweep_kappa must list at least one value"));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    if ProblemKind::parse(cfg.require("problem")?)? == ProblemKind::Logistic {
        return Err(TvError::config(
            "sweep_kappa needs a problem parameterized by kappa; logistic is not",
        ));
    }

    let run_id = run_id_for(cfg, "-sweep")?;
    let mut rows = Vec::new();
    let mut any_diverged = false;
    let mut xs = Vec::with_capacity(grid.len());
    let mut ys = Vec::with_capacity(grid.len());
    let mut fit_series = "iterate";

    for (gi, &kappa) in grid.iter().enumerate() {
        let mut child = cfg.clone();
        child.set("kappa", &format!("{kappa}"));
        if cfg.get("emit_series").is_none() {
            child.set("emit_series", "false");
        }
        let exp = Experiment::resolve(&child, run_id.clone())?;
        let summary = exp.execute(&mut rows, &format!("kappa={kappa};"), Some(gi))?;
        any_diverged |= summary.any_diverged;
        let y = match summary.mean_iterate {
            Some(v) => Some(v),
            None => {
                fit_series = "gradient";
                summary.mean_gradient
            }
        };
        if let Some(y) = y {
            xs.push(kappa.sqrt());
            ys.push(y);
        }
    }

    if xs.len() >= 2 {
        let slope = fit_through_origin(&xs, &ys)?;
        rows.push(CsvRow::new(
            &run_id,
            0,
            0,
            Metric::FitConstant,
            slope,
            format!("abscissa=sqrt_kappa;points={};series={fit_series}", xs.len()),
        ));
    } else if xs.len() == 1 {
        rows.push(CsvRow::new(
            &run_id,
            0,
            0,
            Metric::FitConstant,
            ys[0] / xs[0],
            format!("abscissa=sqrt_kappa;points=1;series={fit_series};insufficient_points"),
        ));
    }

    Ok(RunOutput {
        run_id,
        rows,
        any_diverged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Config {
        Config::from_text(text).unwrap()
    }

    #[test]
    fn translating_ogd_run_emits_series_summary_and_bounds() {
        let out = run_experiment(&cfg(
            "problem = translating\nsolver = ogd\nkappa = 500\nhorizon = 6000\nseed = 0\nwindow = 100",
        ))
        .unwrap();
        assert!(!out.any_diverged);
        // Per-step series rows for t = 0..=horizon.
        let series: Vec<&CsvRow> = out
            .rows
            .iter()
            .filter(|r| r.metric == Metric::IterateError)
            .collect();
        assert_eq!(series.len(), 6001);
        assert_eq!(series[0].t, 0);
        assert_eq!(series.last().unwrap().t, 6000);
        // The limsup equals the trailing identity (κ+1)σ/2 = 250.5 and is
        // flagged converged.
        let limsup = out
            .rows
            .iter()
            .find(|r| r.metric == Metric::LimsupEstimate)
            .unwrap();
        assert!((limsup.value - 250.5).abs() < 1e-6, "{}", limsup.value);
        assert!(limsup.flags.contains("series=iterate"));
        assert!(limsup.flags.contains(";converged"));
        // Bound rows: trailing identity and the optimal-step ceiling agree.
        let find_bound = |tag: &str| {
            out.rows
                .iter()
                .find(|r| r.metric == Metric::BoundValue && r.flags.contains(tag))
                .unwrap_or_else(|| panic!("missing bound row {tag}"))
        };
        assert!((find_bound("bound=ogd_optimal").value - 250.5).abs() < 1e-12);
        assert!((find_bound("bound=ogd_upper").value - 250.5).abs() < 1e-12);
        assert!((find_bound("bound=trailing_xi").value - 250.5).abs() < 1e-12);
        let lower = find_bound("bound=lower");
        assert!((lower.value - (500f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn identical_config_gives_identical_rows() {
        let c = cfg("problem = translating\nsolver = ogd\nkappa = 100\nhorizon = 500\nseed = 7");
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        assert_eq!(a.run_id, b.run_id);
        assert_eq!(a.rows, b.rows);
        assert!(a.run_id.starts_with("translating-ogd-"));
    }

    #[test]
    fn rotating_polyak_diverges_with_rho_rows() {
        let out = run_experiment(&cfg(
            "problem = rotating\nsolver = polyak\nkappa = 6\nhorizon = 10000\nseed = 0\nemit_series = false",
        ))
        .unwrap();
        assert!(out.any_diverged);
        let limsup = out
            .rows
            .iter()
            .find(|r| r.metric == Metric::LimsupEstimate)
            .unwrap();
        assert!(limsup.flags.contains("diverged@"), "{}", limsup.flags);
        assert!(limsup.flags.contains("not_converged"));
        let rho_rows: Vec<&CsvRow> =
            out.rows.iter().filter(|r| r.metric == Metric::Rho).collect();
        assert_eq!(rho_rows.len(), 2);
        assert!(rho_rows[0].flags.contains("unstable"));
        assert!(rho_rows[0].value > 1.0);
        assert!(rho_rows[1].flags.contains("polyak_closed_form"));
        // The published closed form overstates the true radius by a fixed
        // factor just below 3%.
        let ratio = rho_rows[1].value / rho_rows[0].value;
        assert!((ratio - 6.0 / (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn least_squares_replications_aggregate_with_spread() {
        let out = run_experiment(&cfg(
            "problem = least_squares\nsolver = ogd\nkappa = 10\nhorizon = 400\nreplications = 3\nseed = 1\nemit_series = false\nwindow = 50",
        ))
        .unwrap();
        assert!(!out.any_diverged);
        let per_rep: Vec<&CsvRow> = out
            .rows
            .iter()
            .filter(|r| r.metric == Metric::LimsupEstimate && r.replication < 3)
            .collect();
        assert_eq!(per_rep.len(), 3);
        // Distinct seeds make distinct instances.
        assert!((per_rep[0].value - per_rep[1].value).abs() > 1e-12);
        let mean = out
            .rows
            .iter()
            .find(|r| r.metric == Metric::LimsupEstimate && r.replication == 3)
            .expect("aggregate mean row");
        assert!(mean.flags.contains("mean_over=3"));
        let expect_mean = per_rep.iter().map(|r| r.value).sum::<f64>() / 3.0;
        assert!((mean.value - expect_mean).abs() < 1e-12);
        let stderr = out
            .rows
            .iter()
            .find(|r| r.metric == Metric::LimsupStderr)
            .expect("stderr row");
        assert!(stderr.value > 0.0);
    }

    #[test]
    fn sweep_fits_and_orders_grid_points() {
        let out = sweep_experiment(&cfg(
            "problem = translating\nsolver = ogd\nsweep_kappa = 100, 25\nhorizon = 3000\nseed = 0\nwindow = 100",
        ))
        .unwrap();
        assert!(out.run_id.contains("-sweep-"));
        // Ascending grid order: κ=25 rows first (t = 0), then κ=100 (t = 1).
        let limsups: Vec<&CsvRow> = out
            .rows
            .iter()
            .filter(|r| r.metric == Metric::LimsupEstimate)
            .collect();
        assert_eq!(limsups.len(), 2);
        assert!(limsups[0].flags.contains("kappa=25;"));
        assert_eq!(limsups[0].t, 0);
        assert!(limsups[1].flags.contains("kappa=100;"));
        assert_eq!(limsups[1].t, 1);
        // No per-step series by default in sweeps.
        assert!(out.rows.iter().all(|r| r.metric != Metric::IterateError));
        let fit = out
            .rows
            .iter()
            .find(|r| r.metric == Metric::FitConstant)
            .expect("fit row");
        assert!(fit.flags.contains("points=2"));
        // OLS through the origin of y against √κ.
        let xs = [25f64.sqrt(), 100f64.sqrt()];
        let ys = [limsups[0].value, limsups[1].value];
        let slope = (xs[0] * ys[0] + xs[1] * ys[1]) / (xs[0] * xs[0] + xs[1] * xs[1]);
        assert!((fit.value - slope).abs() < 1e-12);
    }

    #[test]
    fn single_point_sweep_matches_run_and_flags_degenerate_fit() {
        let run = run_experiment(&cfg(
            "problem = translating\nsolver = ogd\nkappa = 100\nhorizon = 3000\nseed = 0\nemit_series = false\nwindow = 100",
        ))
        .unwrap();
        let sweep = sweep_experiment(&cfg(
            "problem = translating\nsolver = ogd\nsweep_kappa = 100\nhorizon = 3000\nseed = 0\nwindow = 100",
        ))
        .unwrap();
        let run_limsup = run
            .rows
            .iter()
            .find(|r| r.metric == Metric::LimsupEstimate)
            .unwrap();
        let sweep_limsup = sweep
            .rows
            .iter()
            .find(|r| r.metric == Metric::LimsupEstimate)
            .unwrap();
        assert_eq!(run_limsup.value, sweep_limsup.value);
        let fit = sweep
            .rows
            .iter()
            .find(|r| r.metric == Metric::FitConstant)
            .unwrap();
        assert!(fit.flags.contains("insufficient_points"));
        assert!((fit.value - sweep_limsup.value / 10.0).abs() < 1e-12);
    }

    #[test]
    fn logistic_orgd_with_fixed_delta_reports_gradient_bounds() {
        let out = run_experiment(&cfg(
            "problem = logistic\nsolver = orgd\ndelta = 0.5\nn = 8\nd = 3\nhorizon = 120\nreplications = 2\nseed = 3\nemit_series = false\nwindow = 40\ndelta_horizon = 60",
        ))
        .unwrap();
        assert!(!out.any_diverged);
        let grad = out
            .rows
            .iter()
            .find(|r| {
                r.metric == Metric::LimsupEstimate && r.flags.contains("series=gradient")
            })
            .expect("gradient limsup row");
        assert!(grad.value.is_finite());
        let orgd_bound = out
            .rows
            .iter()
            .find(|r| r.metric == Metric::BoundValue && r.flags.contains("bound=orgd_upper"))
            .expect("orgd bound row");
        assert!(orgd_bound.flags.contains("delta=5.000000e-1;fixed"));
        let abstain_bound = out
            .rows
            .iter()
            .find(|r| {
                r.metric == Metric::BoundValue && r.flags.contains("bound=abstain_upper")
            })
            .expect("abstain bound row");
        // Gradient tracking stays below the regularized ceiling on this data.
        assert!(grad.value <= orgd_bound.value);
        assert!(abstain_bound.value > 0.0);
    }

    #[test]
    fn config_errors_are_loud() {
        // Unknown key.
        assert!(run_experiment(&cfg(
            "problem = translating\nsolver = ogd\nkappa = 10\nseed = 0\nbogus = 1"
        ))
        .is_err());
        // Unknown solver / problem.
        assert!(run_experiment(&cfg("problem = translating\nsolver = sgd\nkappa = 10\nseed = 0")).is_err());
        assert!(run_experiment(&cfg("problem = blending\nsolver = ogd\nkappa = 10\nseed = 0")).is_err());
        // Missing seed and missing kappa.
        assert!(run_experiment(&cfg("problem = translating\nsolver = ogd\nkappa = 10")).is_err());
        assert!(run_experiment(&cfg("problem = translating\nsolver = ogd\nseed = 0")).is_err());
        // Momentum preset on a convex-only problem.
        assert!(run_experiment(&cfg("problem = logistic\nsolver = polyak\nseed = 0")).is_err());
        // xi_mode on the wrong problem.
        assert!(run_experiment(&cfg(
            "problem = rotating\nsolver = ogd\nkappa = 10\nseed = 0\nxi_mode = exact"
        ))
        .is_err());
        // Sweep key on run, and sweep without a usable grid.
        assert!(run_experiment(&cfg(
            "problem = translating\nsolver = ogd\nkappa = 10\nseed = 0\nsweep_kappa = 1,2"
        ))
        .is_err());
        assert!(sweep_experiment(&cfg("problem = translating\nsolver = ogd\nseed = 0")).is_err());
        assert!(sweep_experiment(&cfg(
            "problem = logistic\nsolver = ogd\nseed = 0\nsweep_kappa = 10"
        ))
        .is_err());
    }

    #[test]
    fn olnm_window_defaults_to_restart_length_when_longer() {
        // κ = 2500 → T = ⌊(2+√2)·50⌋ = 170 > 100, so the limsup window
        // follows the restart length; the summary row reflects a full-window
        // estimate (converged on a long horizon).
        let out = run_experiment(&cfg(
            "problem = translating\nsolver = olnm\nkappa = 2500\nhorizon = 4000\nseed = 0\nemit_series = false",
        ))
        .unwrap();
        let limsup = out
            .rows
            .iter()
            .find(|r| r.metric == Metric::LimsupEstimate)
            .unwrap();
        assert!(limsup.value.is_finite());
        let olnm_bound = out
            .rows
            .iter()
            .find(|r| r.metric == Metric::BoundValue && r.flags.contains("bound=olnm_upper"))
            .expect("olnm bound row");
        assert!(limsup.value <= olnm_bound.value);
    }
}

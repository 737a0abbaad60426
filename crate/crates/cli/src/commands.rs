use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use selberg_core::asymptotics::{stirling_constants, verify_eq1_residual};
use selberg_core::detector::{detect, scan_support, DetectorConfig};
use selberg_core::error::Error;
use selberg_core::identifier::{identify_with, IdentifyConfig, Verdict};
use selberg_core::oscillatory::{stationary_kernel, stationary_main_term};
use selberg_core::selberg::{CoefficientFile, FeDescriptor, FunctionalEquation, SelbergElement};
use selberg_core::smoothing::lemma_error_probe;
use selberg_core::transform::{normalize, transform_expsum, transform_quadrature, Route};

use crate::config::{Command, RunConfig};

/// Heights of the smoothing scale in verify-lemma.
const LEMMA_XS: [f64; 3] = [1e2, 1e3, 1e4];
const LEMMA_SLOPE: f64 = -0.8;
const EQ1_K: f64 = 10.0;
const EQ1_MODULUS_TOL: f64 = 1e-12;
const STATIONARY_SAMPLES: usize = 20;
const STATIONARY_K: f64 = 25.0;

pub enum CliError {
    Input(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "InvalidInput",
            CliError::Core(e) => e.kind(),
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Input(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Core(e) => match e {
                Error::InsufficientData { .. }
                | Error::Invalid(_)
                | Error::Degree(_)
                | Error::NotPrimitive { .. }
                | Error::OracleUnavailable => 1,
                Error::ConductorMismatch { .. } | Error::NoMatch { .. } | Error::SupportMismatch { .. } => 2,
                Error::QuadratureBudgetExceeded { .. }
                | Error::Precision(_)
                | Error::Fit(_)
                | Error::Evaluation(_)
                | Error::Pole(_) => 3,
            },
        }
    }
}

/// Result of one command: the JSON document body, a CSV table and whether
/// the check it ran came out consistent.
pub struct Outcome {
    pub result: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub consistent: bool,
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn num(x: f64) -> String {
    x.to_string()
}

fn read_json<D: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<D, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_fe(cfg: &RunConfig) -> Result<FunctionalEquation<f64>, CliError> {
    let desc: FeDescriptor = read_json(&cfg.fe_path)?;
    Ok(desc.to_fe()?)
}

fn load_element(cfg: &RunConfig) -> Result<SelbergElement<f64>, CliError> {
    let fe = load_fe(cfg)?;
    let path = cfg.coeff_path.as_ref().ok_or_else(|| CliError::Input("no coefficient file".into()))?;
    let file: CoefficientFile = read_json(path)?;
    let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(SelbergElement::new(fe, file.to_source()?, label))
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Constants => constants(cfg),
        Command::Transform => transform(cfg),
        Command::Scan => scan(cfg),
        Command::Extract => extract(cfg),
        Command::Identify => identify(cfg),
        Command::VerifyLemma => verify_lemma(cfg),
        Command::VerifyEq1 => verify_eq1(cfg),
        Command::VerifyExpsum => verify_expsum(cfg),
    }
}

fn constants(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fe = load_fe(cfg)?;
    let sc = stirling_constants(&fe)?;
    let rows = [
        ("A", sc.a),
        ("B", sc.b),
        ("C", sc.c),
        ("K", sc.k),
        ("A_closed_form", sc.closed_form.a),
        ("B_closed_form", sc.closed_form.b),
        ("C_closed_form", sc.closed_form.c),
        ("pi_C_Q2", sc.conductor_scale(&fe)),
    ]
    .iter()
    .map(|(k, v)| vec![k.to_string(), num(*v)])
    .collect();
    Ok(Outcome {
        result: to_value(&sc),
        header: vec!["quantity", "value"],
        rows,
        consistent: sc.closed_form_agrees,
    })
}

fn transform(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let el = load_element(cfg)?;
    let sc = stirling_constants(&el.fe)?;
    let sample = match Route::from(cfg.route) {
        Route::Quadrature => transform_quadrature(&el, &sc, cfg.alpha, cfg.t, cfg.tol * cfg.t)?,
        Route::Expsum => transform_expsum(&el, cfg.alpha, cfg.t)?,
    };
    let normalized = normalize(&sc, cfg.t, sample.value);
    let row = vec![
        num(cfg.alpha),
        num(cfg.t),
        sample.route.to_string(),
        num(sample.value.re),
        num(sample.value.im),
        num(normalized.re),
        num(normalized.im),
    ];
    Ok(Outcome {
        result: json!({ "sample": to_value(&sample), "normalized": to_value(&normalized) }),
        header: vec!["alpha", "T", "route", "re", "im", "normalized_re", "normalized_im"],
        rows: vec![row],
        consistent: true,
    })
}

fn scan(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let el = load_element(cfg)?;
    el.require_degree_one()?;
    let sc = stirling_constants(&el.fe)?;
    let profile = scan_support(&el, &sc, cfg.t, cfg.grid_den, cfg.m)?;
    let rows = profile
        .points
        .iter()
        .map(|p| vec![num(p.alpha), p.k.to_string(), p.den.to_string(), num(p.magnitude), num(p.spread), p.peak.to_string()])
        .collect();
    Ok(Outcome {
        result: to_value(&profile),
        header: vec!["alpha", "k", "den", "magnitude", "spread", "peak"],
        rows,
        consistent: true,
    })
}

fn detector_config(cfg: &RunConfig) -> DetectorConfig {
    DetectorConfig { t_height: cfg.t, grid_den: cfg.grid_den, m_max: cfg.m }
}

fn extract(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let el = load_element(cfg)?;
    let sc = stirling_constants(&el.fe)?;
    let report = detect(&el, &sc, &detector_config(cfg))?;
    let rows = report
        .coeff_table
        .iter()
        .map(|c| vec![c.m.to_string(), num(c.value.re), num(c.value.im), num(c.uncertainty)])
        .collect();
    let consistent = report.periodicity_residuals.iter().all(|r| r.passed);
    Ok(Outcome { result: to_value(&report), header: vec!["m", "re", "im", "uncertainty"], rows, consistent })
}

fn identify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let el = load_element(cfg)?;
    let id = identify_with(&el, &IdentifyConfig { detector: detector_config(cfg), ..IdentifyConfig::default() })?;
    let rows = id.h_samples.iter().map(|h| vec![num(h.s.re), num(h.s.im), num(h.value.re), num(h.value.im)]).collect();
    Ok(Outcome {
        consistent: id.verdict == Verdict::Identified,
        result: to_value(&id),
        header: vec!["sigma", "t", "H_re", "H_im"],
        rows,
    })
}

fn verify_lemma(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let el = load_element(cfg)?;
    let probe = lemma_error_probe(&el, cfg.t, &LEMMA_XS)?;
    let passed = probe.slope.is_some_and(|s| s <= LEMMA_SLOPE);
    let rows = probe
        .rows
        .iter()
        .map(|r| vec![num(r.x), num(r.error), num(r.raw_error), r.terms_used.to_string()])
        .collect();
    Ok(Outcome {
        result: json!({ "probe": to_value(&probe), "slope_bound": LEMMA_SLOPE, "passed": passed }),
        header: vec!["X", "error", "raw_error", "terms"],
        rows,
        consistent: passed,
    })
}

fn verify_eq1(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let fe = load_fe(cfg)?;
    let sc = stirling_constants(&fe)?;
    let top = cfg.t.log10();
    let lo = 2f64.min(top);
    let steps = 40;
    let ts: Vec<f64> = (0..=steps).map(|k| 10f64.powf(lo + (top - lo) * k as f64 / steps as f64)).collect();
    let table = verify_eq1_residual(&fe, &sc, &ts)?;
    let passed = table.k <= EQ1_K && table.max_modulus_defect <= EQ1_MODULUS_TOL;
    let rows = table.rows.iter().map(|(t, r)| vec![num(*t), num(*r)]).collect();
    Ok(Outcome {
        result: json!({ "residuals": to_value(&table), "K_bound": EQ1_K, "passed": passed }),
        header: vec!["t", "residual"],
        rows,
        consistent: passed,
    })
}

#[derive(Serialize)]
struct StationaryRow {
    n: u64,
    quadrature: [f64; 2],
    main_term: [f64; 2],
    normalized_residual: f64,
}

fn verify_expsum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let el = load_element(cfg)?;
    let sc = stirling_constants(&el.fe)?;
    let quad = transform_quadrature(&el, &sc, cfg.alpha, cfg.t, cfg.tol * cfg.t)?;
    let exp = transform_expsum(&el, cfg.alpha, cfg.t)?;
    let dev = (quad.value - exp.value).norm();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (lo, hi) = ((cfg.t / TAU).ceil() as u64, (cfg.t / PI).floor() as u64);
    if lo > hi {
        return Err(CliError::Input(format!("no integer n with T ≤ 2πn ≤ 2T for T = {}", cfg.t)));
    }
    let scale = cfg.t.powf(0.4);
    let mut table = Vec::with_capacity(STATIONARY_SAMPLES);
    for _ in 0..STATIONARY_SAMPLES {
        let n = rng.gen_range(lo..=hi);
        let q = stationary_kernel(n, 1.0, cfg.t, 1e-8)?;
        let main = stationary_main_term(n, 1.0);
        table.push(StationaryRow {
            n,
            quadrature: [q.value.re, q.value.im],
            main_term: [main.re, main.im],
            normalized_residual: (q.value - main).norm() / scale,
        });
    }
    let k_stationary = table.iter().map(|r| r.normalized_residual).fold(0.0, f64::max);
    let passed = k_stationary <= STATIONARY_K;
    let rows = table
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                num(r.quadrature[0]),
                num(r.quadrature[1]),
                num(r.main_term[0]),
                num(r.main_term[1]),
                num(r.normalized_residual),
            ]
        })
        .collect();
    Ok(Outcome {
        result: json!({
            "quadrature": to_value(&quad),
            "expsum": to_value(&exp),
            "deviation": dev,
            "normalized_deviation": dev / cfg.t,
            "K_route": dev / cfg.t.powf(0.92),
            "stationary": to_value(&table),
            "K_stationary": k_stationary,
            "K_stationary_bound": STATIONARY_K,
            "passed": passed,
        }),
        header: vec!["n", "quadrature_re", "quadrature_im", "main_re", "main_im", "normalized_residual"],
        rows,
        consistent: passed,
    })
}

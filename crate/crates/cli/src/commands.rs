use nalgebra::DVector;
use serde_json::json;
use tubekit::hyperbolicity::{delta_scaling_profile, Budget, HilbertProfile, ProfileOptions};
use tubekit::kobayashi::{kobayashi_interval, ComplexConvexDomain, KobayashiBudget};
use tubekit::net::NetOptions;
use tubekit::rescaling::{blowup_sequence, limit_strictness_verdict, orbit_limit, BlowupSpec, Normalization};
use tubekit::tube::{
    asym_embedding_experiment, flat_embedding_profile, hypothesis_dashboard, DashboardConfig, EmbeddingExperiment,
    TubeDomain,
};
use tubekit::{Complex64, ConvexBody, HilbertSpaceView, Point};

use crate::config::{body_from, CommandName, ConfigError, DomainKind, NormalizationArg, RunConfig};
use crate::output::{fmt9, Cell, Report};

pub enum CliError {
    Config(String),
    Module(tubekit::Error),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.0)
    }
}

impl From<tubekit::Error> for CliError {
    fn from(e: tubekit::Error) -> Self {
        CliError::Module(e)
    }
}

type Out = Result<Report, CliError>;

fn point(v: &[f64]) -> Point {
    DVector::from_vec(v.to_vec())
}

fn complex_point(field: &str, v: &[f64]) -> Result<Vec<Complex64>, ConfigError> {
    if v.len() % 2 != 0 {
        return Err(ConfigError(format!(
            "field `{field}`: expected interleaved (re, im) pairs, got {} numbers",
            v.len()
        )));
    }
    Ok(v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

fn basepoint_of(body: &ConvexBody, given: &Option<Vec<f64>>) -> Result<Point, CliError> {
    match given {
        Some(p) => Ok(point(p)),
        None => body
            .interior_point()
            .ok_or_else(|| CliError::Config("could not find an interior point; pass one explicitly".into())),
    }
}

pub fn execute(cfg: &RunConfig) -> Out {
    match cfg.validate()? {
        CommandName::HilbertDist => hilbert_dist(cfg),
        CommandName::DeltaProfile => delta_profile(cfg),
        CommandName::OrbitLimit => orbit(cfg),
        CommandName::KobaInterval => koba_interval(cfg),
        CommandName::TubeFlat => tube_flat(cfg),
        CommandName::AsymEmbed => asym_embed(cfg),
        CommandName::Dashboard => dashboard(cfg),
    }
}

fn hilbert_dist(cfg: &RunConfig) -> Out {
    let body = body_from("body", cfg.require("body", &cfg.body)?)?;
    let x = point(cfg.require("x", &cfg.x)?);
    let y = point(cfg.require("y", &cfg.y)?);
    let view = HilbertSpaceView::new(body)?;
    let v = view.distance_with_error(&x, &y)?;
    Ok(Report {
        columns: vec!["distance", "error_bound"],
        rows: vec![vec![Cell::Num(v.value), Cell::Num(v.error_bound)]],
        summary: vec![format!("H(x, y) = {}", fmt9(v.value))],
        detail: None,
    })
}

fn delta_profile(cfg: &RunConfig) -> Out {
    let body = body_from("body", cfg.require("body", &cfg.body)?)?;
    let basepoint = basepoint_of(&body, &cfg.basepoint)?;
    let scales = cfg.scales.clone().unwrap_or_else(|| (1..=6).map(f64::from).collect());
    let space = HilbertProfile {
        view: HilbertSpaceView::new(body)?,
        basepoint,
    };
    let opts = ProfileOptions {
        points_per_scale: cfg.points.unwrap_or(40),
        budget: cfg.quadruples.map_or(Budget::Exhaustive, Budget::Sampled),
        seed: cfg.seed.expect("validated"),
    };
    let p = delta_scaling_profile(&space, &scales, &opts)?;
    Ok(Report {
        columns: vec!["scale", "n_points", "n_quadruples", "alpha_lo", "alpha_hi"],
        rows: p
            .rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Num(r.scale),
                    Cell::Int(r.n_points as u64),
                    Cell::Int(r.n_quadruples),
                    Cell::Num(r.alpha_lo),
                    Cell::Num(r.alpha_hi),
                ]
            })
            .collect(),
        summary: vec![format!("least-squares slope of alpha against scale: {}", fmt9(p.slope))],
        detail: Some(json!({ "slope": p.slope })),
    })
}

fn orbit(cfg: &RunConfig) -> Out {
    let body = body_from("body", cfg.require("body", &cfg.body)?)?;
    let target = point(cfg.require("target", &cfg.target)?);
    let rates = cfg
        .rates
        .clone()
        .unwrap_or_else(|| (1..=8).map(|k| 4f64.powi(k)).collect());
    let radius = cfg.radius.unwrap_or(2.0);
    let tol = cfg.tol.unwrap_or(1e-3);
    let normalization = match cfg.normalization.unwrap_or(NormalizationArg::John) {
        NormalizationArg::John => Normalization::John,
        NormalizationArg::None => Normalization::None,
    };
    let seed = cfg.seed.expect("validated");
    let mut spec = BlowupSpec::new(body, target, rates.clone(), normalization);
    spec.seed = seed;
    let seq: Vec<_> = blowup_sequence(&spec)?.into_iter().map(|t| t.pointed).collect();
    let net = NetOptions {
        seed,
        ..NetOptions::default()
    };
    let lim = orbit_limit(&seq, radius, tol, &net)?;
    let verdict = limit_strictness_verdict(&lim.limit, tol)?;
    let witness = verdict.witness.as_ref().map(|w| w.length());
    let mut rows = Vec::with_capacity(rates.len());
    for (k, r) in rates.iter().enumerate() {
        let d = if k == 0 { Cell::Empty } else { Cell::Num(lim.consecutive[k - 1]) };
        rows.push(vec![Cell::Num(*r), d]);
    }
    Ok(Report {
        columns: vec!["rate", "distance_to_previous"],
        rows,
        summary: vec![
            format!("cauchy at tol {}: {}", fmt9(tol), lim.cauchy),
            format!("net error bound: {}", fmt9(lim.error_bound)),
            match witness {
                Some(l) => format!("boundary segment witness of length {}", fmt9(l)),
                None => "no boundary segment in the limit window".into(),
            },
        ],
        detail: Some(json!({
            "cauchy": lim.cauchy,
            "error_bound": lim.error_bound,
            "witness_length": witness,
            "spans_window_line": verdict.spans_window_line,
        })),
    })
}

fn koba_interval(cfg: &RunConfig) -> Out {
    let z = complex_point("z", cfg.require("z", &cfg.z)?)?;
    let w = complex_point("w", cfg.require("w", &cfg.w)?)?;
    let kind = cfg.domain.unwrap_or(DomainKind::Tube);
    let domain = match kind {
        DomainKind::Tube => ComplexConvexDomain::tube(body_from("body", cfg.require("body", &cfg.body)?)?)?,
        DomainKind::Generic => ComplexConvexDomain::new(body_from("body", cfg.require("body", &cfg.body)?)?)?,
        DomainKind::Polydisk => {
            if cfg.body.is_some() {
                return Err(CliError::Config("field `body` is not used with domain `polydisk`".into()));
            }
            ComplexConvexDomain::polydisk(z.len())?
        }
    };
    let budget = KobayashiBudget {
        functionals: cfg.functionals.unwrap_or(32),
        chain_steps: cfg.steps.unwrap_or(16),
        seed: cfg.seed.expect("validated"),
    };
    let iv = kobayashi_interval(&domain, &z, &w, &budget)?;
    Ok(Report {
        columns: vec!["lo", "hi", "width", "provenance"],
        rows: vec![vec![
            Cell::Num(iv.lo),
            Cell::Num(iv.hi),
            Cell::Num(iv.width()),
            Cell::Text(iv.provenance.join(" ")),
        ]],
        summary: vec![format!("{} <= K(z, w) <= {}", fmt9(iv.lo), fmt9(iv.hi))],
        detail: None,
    })
}

fn tube_flat(cfg: &RunConfig) -> Out {
    let base = body_from("base", cfg.require("base", &cfg.base)?)?;
    let c0 = basepoint_of(&base, &cfg.c0)?;
    let d = base.dim();
    let u = match &cfg.u {
        Some(u) => point(u),
        None => {
            let mut e = DVector::zeros(d);
            e[0] = 1.0;
            e
        }
    };
    let ts = cfg.t.clone().unwrap_or_else(|| vec![1.0, 2.0, 4.0, 8.0]);
    let tube = TubeDomain::new(base)?;
    let budget = KobayashiBudget {
        functionals: cfg.functionals.unwrap_or(32),
        chain_steps: cfg.steps.unwrap_or(16),
        seed: cfg.seed.expect("validated"),
    };
    let p = flat_embedding_profile(&tube, &c0, &u, &ts, &budget)?;
    Ok(Report {
        columns: vec!["t", "lo", "hi", "lo_over_t", "hi_over_t"],
        rows: p
            .rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Num(r.t),
                    Cell::Num(r.lo),
                    Cell::Num(r.hi),
                    Cell::Num(r.lo_ratio),
                    Cell::Num(r.hi_ratio),
                ]
            })
            .collect(),
        summary: vec![match p.band {
            Some((lo, hi)) => format!("ratios stay in the band [{}, {}]", fmt9(lo), fmt9(hi)),
            None => "no positive ratio band".into(),
        }],
        detail: Some(json!({ "band": p.band })),
    })
}

fn asym_embed(cfg: &RunConfig) -> Out {
    let mut exp = EmbeddingExperiment::standard();
    if let Some(n) = &cfg.n {
        exp = EmbeddingExperiment::new(n.clone(), exp.grid)?;
    }
    let rows = asym_embedding_experiment(&exp)?;
    let monotone = rows.windows(2).all(|p| p[1].error <= p[0].error);
    Ok(Report {
        columns: vec!["n", "sup_error"],
        rows: rows
            .iter()
            .map(|r| vec![Cell::Int(r.n as u64), Cell::Num(r.error)])
            .collect(),
        summary: vec![format!("errors non-increasing in n: {monotone}")],
        detail: None,
    })
}

fn dashboard(cfg: &RunConfig) -> Out {
    let base = body_from("base", cfg.require("base", &cfg.base)?)?;
    let mut dc = DashboardConfig {
        seed: cfg.seed.expect("validated"),
        ..DashboardConfig::default()
    };
    if let Some(s) = &cfg.scales {
        dc.scales = s.clone();
    }
    if let Some(p) = cfg.points {
        dc.points_per_scale = p;
    }
    if let Some(q) = cfg.quadruples {
        dc.quadruples = q;
    }
    let r = hypothesis_dashboard(&base, &dc)?;
    let band = r.flat.band.unwrap_or((f64::NAN, f64::NAN));
    let rows = vec![
        vec![
            Cell::Text("a_hilbert_alpha_bounded".into()),
            Cell::Text(r.hilbert_alpha_bounded.to_string()),
            Cell::Num(r.hilbert_profile.slope),
        ],
        vec![
            Cell::Text("b_tube_flat_witness".into()),
            Cell::Text(r.tube_flat_witness.to_string()),
            Cell::Num(r.fiber_slope),
        ],
        vec![Cell::Text("b_band_lo".into()), Cell::Empty, Cell::Num(band.0)],
        vec![Cell::Text("b_band_hi".into()), Cell::Empty, Cell::Num(band.1)],
        vec![
            Cell::Text("c_no_segment_in_limits".into()),
            Cell::Text(r.no_segment_in_limits.to_string()),
            Cell::Int(r.blowups.iter().filter(|b| b.witness_length.is_some()).count() as u64),
        ],
        vec![
            Cell::Text("hypotheses_indicated".into()),
            Cell::Text(r.hypotheses_indicated.to_string()),
            Cell::Empty,
        ],
    ];
    Ok(Report {
        columns: vec!["indicator", "holds", "value"],
        rows,
        summary: r.summary.clone(),
        detail: Some(serde_json::to_value(&r).expect("report serializes")),
    })
}

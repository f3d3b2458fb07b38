//! Design sweeps over one Fin-Ray parameter: every variant is solved at each
//! listed load magnitude and contact node, and optionally probed for its
//! maximum allowable force.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FinRayError, SolverError};
use crate::finray::{generate, Connection, FinRayModel, FinRayParams};
use crate::solver::{probe_max_force, solve, SolverConfig};

/// The swept parameter and its values, in the order they are reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    NCrossbeams(Vec<usize>),
    TopAngle(Vec<f64>),
    Inclination(Vec<f64>),
    Connection(Vec<Connection>),
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::NCrossbeams(_) => "n_crossbeams",
            Axis::TopAngle(_) => "top_angle",
            Axis::Inclination(_) => "inclination",
            Axis::Connection(_) => "connection",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Axis::NCrossbeams(v) => v.len(),
            Axis::TopAngle(v) | Axis::Inclination(v) => v.len(),
            Axis::Connection(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(label, params)` for every value on the axis.
    pub fn variants(&self, base: &FinRayParams) -> Vec<(String, FinRayParams)> {
        let name = self.name();
        match self {
            Axis::NCrossbeams(v) => v
                .iter()
                .map(|&n| {
                    (
                        format!("{name}={n}"),
                        FinRayParams {
                            n_crossbeams: n,
                            ..*base
                        },
                    )
                })
                .collect(),
            Axis::TopAngle(v) => v
                .iter()
                .map(|&a| {
                    (
                        format!("{name}={a}"),
                        FinRayParams {
                            top_angle: a,
                            ..*base
                        },
                    )
                })
                .collect(),
            Axis::Inclination(v) => v
                .iter()
                .map(|&a| {
                    (
                        format!("{name}={a}"),
                        FinRayParams {
                            inclination: a,
                            ..*base
                        },
                    )
                })
                .collect(),
            Axis::Connection(v) => v
                .iter()
                .map(|&c| {
                    (
                        format!("{name}={c}"),
                        FinRayParams {
                            connection: c,
                            ..*base
                        },
                    )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSpec {
    /// Contact node rank that carries the probing load.
    pub node: usize,
    pub f_lo: f64,
    pub f_hi: f64,
    pub resolution: f64,
    /// Increments for a load of `f_hi`; smaller trials keep the same step.
    pub n_inc: usize,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        Self {
            node: 2,
            f_lo: 0.05,
            f_hi: 10.0,
            resolution: 0.05,
            n_inc: 200,
        }
    }
}

fn default_load_nodes() -> Vec<usize> {
    vec![2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    /// Contact node ranks loaded one at a time.
    #[serde(default = "default_load_nodes")]
    pub load_nodes: Vec<usize>,
    /// Load magnitudes (N).
    pub magnitudes: Vec<f64>,
    #[serde(default)]
    pub base: FinRayParams,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub probe: ProbeSpec,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("invalid sweep: {0}")]
    Invalid(String),
    #[error("variant {label}: {source}")]
    Variant {
        label: String,
        #[source]
        source: FinRayError,
    },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.axis.is_empty() {
            return Err(SweepError::Invalid("axis has no values".into()));
        }
        if self.load_nodes.is_empty() {
            return Err(SweepError::Invalid("load_nodes is empty".into()));
        }
        if self.magnitudes.is_empty() {
            return Err(SweepError::Invalid("magnitudes is empty".into()));
        }
        if self.magnitudes.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(SweepError::Invalid("magnitudes must be positive".into()));
        }
        if self.magnitudes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SweepError::Invalid(
                "magnitudes must be strictly ascending".into(),
            ));
        }
        self.solver.validate()?;
        let p = &self.probe;
        if p.n_inc == 0 || !(p.resolution > 0.0) || !(p.f_lo >= 0.0 && p.f_hi > p.f_lo) {
            return Err(SweepError::Invalid(format!("invalid probe settings {p:?}")));
        }
        Ok(())
    }
}

/// Outcome of a maximum-allowable-force probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum MaxForce {
    Found(f64),
    /// Still completes at the upper end of the bracket (N).
    AboveBracket(f64),
    /// Already fails at the lower end of the bracket (N).
    BelowBracket(f64),
}

impl MaxForce {
    pub fn value(&self) -> Option<f64> {
        match self {
            MaxForce::Found(f) => Some(*f),
            _ => None,
        }
    }

    fn csv_field(&self) -> String {
        match self {
            MaxForce::Found(f) => f.to_string(),
            MaxForce::AboveBracket(f) => format!(">{f}"),
            MaxForce::BelowBracket(f) => format!("<{f}"),
        }
    }

    /// Ordering where it is determined; two out-of-bracket results on the
    /// same side are incomparable.
    fn cmp_known(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use MaxForce::*;
        match (self, other) {
            (Found(a), Found(b)) => a.partial_cmp(b),
            (AboveBracket(_), AboveBracket(_)) | (BelowBracket(_), BelowBracket(_)) => None,
            (AboveBracket(_), _) | (_, BelowBracket(_)) => Some(std::cmp::Ordering::Greater),
            (BelowBracket(_), _) | (_, AboveBracket(_)) => Some(std::cmp::Ordering::Less),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub variant: String,
    /// Load magnitude (N).
    pub load: f64,
    /// Loaded contact node rank; the displacement is read at the same node.
    pub node: usize,
    pub u: f64,
    pub w: f64,
    pub theta: f64,
    pub converged: bool,
    pub increments: usize,
    /// Corrector iterations summed over all recorded increments.
    pub iterations: usize,
}

impl SweepRow {
    pub fn displacement(&self) -> f64 {
        self.u.hypot(self.w)
    }

    pub fn mean_iterations(&self) -> f64 {
        if self.increments == 0 {
            0.0
        } else {
            self.iterations as f64 / self.increments as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantReport {
    pub label: String,
    pub params: FinRayParams,
    pub rows: Vec<SweepRow>,
    pub max_force: Option<MaxForce>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    NonMonotone,
    /// Some value is missing or not comparable.
    Undetermined,
}

fn classify(ords: impl IntoIterator<Item = Option<std::cmp::Ordering>>) -> Trend {
    use std::cmp::Ordering::*;
    let mut seen = Vec::new();
    for o in ords {
        match o {
            None => return Trend::Undetermined,
            Some(o) => seen.push(o),
        }
    }
    if seen.iter().all(|o| *o == Less) {
        Trend::Increasing
    } else if seen.iter().all(|o| *o == Greater) {
        Trend::Decreasing
    } else {
        Trend::NonMonotone
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisplacementTrend {
    pub node: usize,
    pub load: f64,
    /// Trend of the loaded node's displacement along the axis order.
    pub trend: Trend,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantSummary {
    pub label: String,
    pub max_force: Option<MaxForce>,
    pub all_converged: bool,
    pub mean_iterations: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub axis: String,
    pub variants: Vec<VariantSummary>,
    pub displacement_trends: Vec<DisplacementTrend>,
    /// Trend of the maximum allowable force along the axis order.
    pub max_force_trend: Option<Trend>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub axis: String,
    pub variants: Vec<VariantReport>,
}

pub const SWEEP_CSV_HEADER: [&str; 10] = [
    "variant",
    "load",
    "node",
    "u",
    "w",
    "theta",
    "converged",
    "increments",
    "iterations",
    "max_force",
];

impl SweepReport {
    pub fn rows(&self) -> impl Iterator<Item = &SweepRow> {
        self.variants.iter().flat_map(|v| &v.rows)
    }

    pub fn variant(&self, label: &str) -> Option<&VariantReport> {
        self.variants.iter().find(|v| v.label == label)
    }

    /// Rows in variant, node, load order; the max-force column repeats the
    /// variant's probe result and is empty when probing was off.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(SWEEP_CSV_HEADER)?;
        for v in &self.variants {
            let max_force = v.max_force.map(|m| m.csv_field()).unwrap_or_default();
            for r in &v.rows {
                w.write_record([
                    r.variant.clone(),
                    r.load.to_string(),
                    r.node.to_string(),
                    r.u.to_string(),
                    r.w.to_string(),
                    r.theta.to_string(),
                    r.converged.to_string(),
                    r.increments.to_string(),
                    r.iterations.to_string(),
                    max_force.clone(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> SweepSummary {
        let variants = self
            .variants
            .iter()
            .map(|v| {
                let (inc, it) = v
                    .rows
                    .iter()
                    .fold((0, 0), |(a, b), r| (a + r.increments, b + r.iterations));
                VariantSummary {
                    label: v.label.clone(),
                    max_force: v.max_force,
                    all_converged: v.rows.iter().all(|r| r.converged),
                    mean_iterations: if inc == 0 {
                        0.0
                    } else {
                        it as f64 / inc as f64
                    },
                }
            })
            .collect();

        let mut displacement_trends = Vec::new();
        if let Some(first) = self.variants.first() {
            for (k, r0) in first.rows.iter().enumerate() {
                let trend = classify(self.variants.windows(2).map(|w| {
                    let (a, b) = (w[0].rows.get(k)?, w[1].rows.get(k)?);
                    (a.converged && b.converged)
                        .then(|| a.displacement().partial_cmp(&b.displacement()))
                        .flatten()
                }));
                displacement_trends.push(DisplacementTrend {
                    node: r0.node,
                    load: r0.load,
                    trend,
                });
            }
        }

        let max_force_trend = self
            .variants
            .iter()
            .map(|v| v.max_force)
            .collect::<Option<Vec<_>>>()
            .map(|m| classify(m.windows(2).map(|w| w[0].cmp_known(&w[1]))));

        SweepSummary {
            axis: self.axis.clone(),
            variants,
            displacement_trends,
            max_force_trend,
        }
    }
}

fn run_variant(
    spec: &SweepSpec,
    label: String,
    params: FinRayParams,
    model: &FinRayModel,
    probe: bool,
) -> Result<VariantReport, SweepError> {
    let variant_err = |source| SweepError::Variant {
        label: label.clone(),
        source,
    };
    let s = &model.structure;
    let mut rows = Vec::with_capacity(spec.load_nodes.len() * spec.magnitudes.len());
    for &rank in &spec.load_nodes {
        let node = model.contact_node(rank).map_err(variant_err)?;
        let slot = 3 * s
            .nodes()
            .iter()
            .position(|n| n.id == node)
            .expect("contact node exists");
        for &f in &spec.magnitudes {
            let load = model
                .load_at_contact_node(rank, f, None)
                .map_err(variant_err)?;
            let res = solve(s, &load, &spec.solver)?;
            let u = res
                .final_displacement()
                .cloned()
                .unwrap_or_else(|| s.zero_vector());
            rows.push(SweepRow {
                variant: label.clone(),
                load: f,
                node: rank,
                u: u[slot],
                w: u[slot + 1],
                theta: u[slot + 2],
                converged: res.is_completed(),
                increments: res.increments.len(),
                iterations: res.increments.iter().map(|r| r.iterations).sum(),
            });
        }
    }

    let max_force = if probe {
        let p = &spec.probe;
        let pattern = model
            .load_at_contact_node(p.node, 1.0, None)
            .map_err(variant_err)?;
        let cfg = SolverConfig {
            n_inc: p.n_inc,
            ..spec.solver
        };
        Some(
            match probe_max_force(s, &pattern, &cfg, p.f_lo, p.f_hi, p.resolution) {
                Ok(f) => MaxForce::Found(f),
                Err(SolverError::BracketInvalid(_)) => {
                    let lo = pattern.scaled(p.f_lo);
                    let n_inc = ((p.f_lo / p.f_hi * p.n_inc as f64).ceil() as usize).max(1);
                    if solve(s, &lo, &SolverConfig { n_inc, ..cfg })?.is_completed() {
                        MaxForce::AboveBracket(p.f_hi)
                    } else {
                        MaxForce::BelowBracket(p.f_lo)
                    }
                }
                Err(e) => return Err(e.into()),
            },
        )
    } else {
        None
    };
    log::info!("variant {label} done");
    Ok(VariantReport {
        label,
        params,
        rows,
        max_force,
    })
}

/// Runs every variant. With `parallel` the variants are distributed over the
/// rayon pool; the report keeps the axis order either way.
pub fn run_sweep(spec: &SweepSpec, probe: bool, parallel: bool) -> Result<SweepReport, SweepError> {
    spec.validate()?;
    let mut variants = Vec::new();
    for (label, params) in spec.axis.variants(&spec.base) {
        let model = generate(&params).map_err(|source| SweepError::Variant {
            label: label.clone(),
            source,
        })?;
        variants.push((label, params, model));
    }
    let run = |(label, params, model): (String, FinRayParams, FinRayModel)| {
        run_variant(spec, label, params, &model, probe)
    };
    let reports: Result<Vec<_>, _> = if parallel {
        variants.into_par_iter().map(run).collect()
    } else {
        variants.into_iter().map(run).collect()
    };
    Ok(SweepReport {
        axis: spec.axis.name().to_string(),
        variants: reports?,
    })
}

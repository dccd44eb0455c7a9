//! Certification of built structures against named bounds, and scaling
//! fits of measured counts across instance sizes.

mod bounds;
mod fit;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover::{verify_cover, verify_cover_sampled, Cover, CoverError, CoverKind, CoverReport};
use crate::graph::{DistanceMatrix, Graph, VertexId, VertexSet, Weight, UNREACHABLE};
use crate::queries::{PathKind, PathReporting, QueryError, SeparatorOracle};
use crate::ratio::Ratio;

pub use bounds::{
    ceil_ln, depth_ok, forest_stretch_limit, hst_stretch, metric_stretch, oracle_stretch,
    pairwise_size_ok, separator_sum, BoundKind, BoundSpec, Comparison, CountModel,
    DEFAULT_FOREST_K,
};
pub use fit::{scaling_fit, FitReport, FitRow, FIT_TOLERANCE};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("bound {name} does not apply to {structure}")]
    NotApplicable {
        name: String,
        structure: &'static str,
    },
    #[error("scaling fits need at least {need} distinct sizes, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("record is missing statistic {0}")]
    MissingStat(String),
    #[error("distance matrix is for {dm} vertices, structure for {n}")]
    SizeMismatch { dm: usize, n: usize },
}

/// A measured value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Stat {
    Int(u64),
    Ratio(Ratio),
    Real(f64),
}

impl Stat {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Stat::Int(x) => x as f64,
            Stat::Ratio(r) => r.to_f64(),
            Stat::Real(x) => x,
        }
    }
}

/// The instance and parameters a record was produced from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordConfig {
    pub generator: String,
    pub n: usize,
    pub k: u32,
    pub seed: u64,
    pub mode: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RecordConfig,
    pub measured: BTreeMap<String, Stat>,
    pub checks: Vec<CheckOutcome>,
    /// Wall time of the certification. Not serialized, so that artifacts
    /// stay byte-identical across runs.
    #[serde(skip)]
    pub wall_ms: u128,
}

impl RunRecord {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn stat(&self, name: &str) -> Result<f64, VerifyError> {
        self.measured
            .get(name)
            .map(Stat::as_f64)
            .ok_or_else(|| VerifyError::MissingStat(name.into()))
    }
}

pub enum Structure<'a> {
    Cover(&'a Cover),
    SeparatorOracle(&'a SeparatorOracle),
    PathReporting(&'a PathReporting),
}

impl Structure<'_> {
    fn n(&self) -> usize {
        match self {
            Structure::Cover(c) => c.n,
            Structure::SeparatorOracle(o) => o.n,
            Structure::PathReporting(p) => p.n(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    /// Largest `n` checked on all pairs; larger inputs are sampled.
    pub cap: usize,
    pub samples: usize,
    pub sample_seed: u64,
    /// Restricts stretch checks to pairs with a shortest path through this
    /// set (pairwise collections).
    pub domain: Option<VertexSet>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            cap: crate::cover::DEFAULT_VERIFY_CAP,
            samples: crate::cover::DEFAULT_SAMPLES,
            sample_seed: 0,
            domain: None,
        }
    }
}

fn outcome(name: &str, passed: bool, detail: String, witness: Option<String>) -> CheckOutcome {
    CheckOutcome {
        name: name.into(),
        passed,
        detail,
        witness,
    }
}

/// Evaluates every bound of `suite` on `structure` built for `g`, whose
/// exact distances are `dm`.
pub fn certify(
    g: &Graph,
    dm: &DistanceMatrix,
    structure: Structure,
    suite: &[BoundSpec],
    config: RecordConfig,
    opts: &CertifyOptions,
) -> Result<RunRecord, VerifyError> {
    let start = std::time::Instant::now();
    if dm.n() != structure.n() {
        return Err(VerifyError::SizeMismatch {
            dm: dm.n(),
            n: structure.n(),
        });
    }
    let mut record = RunRecord {
        config,
        measured: BTreeMap::new(),
        checks: Vec::new(),
        wall_ms: 0,
    };
    match structure {
        Structure::Cover(c) => certify_cover(dm, c, suite, opts, &mut record)?,
        Structure::SeparatorOracle(o) => certify_oracle(dm, o, suite, opts, &mut record)?,
        Structure::PathReporting(p) => certify_paths(g, dm, p, suite, opts, &mut record)?,
    }
    record.wall_ms = start.elapsed().as_millis();
    Ok(record)
}

fn cover_report(
    dm: &DistanceMatrix,
    c: &Cover,
    bound: Option<Ratio>,
    opts: &CertifyOptions,
) -> Result<CoverReport, VerifyError> {
    Ok(if c.n <= opts.cap {
        verify_cover(dm, c, opts.domain.as_ref(), bound, opts.cap)?
    } else {
        verify_cover_sampled(dm, c, bound, opts.samples, opts.sample_seed)?
    })
}

fn certify_cover(
    dm: &DistanceMatrix,
    c: &Cover,
    suite: &[BoundSpec],
    opts: &CertifyOptions,
    rec: &mut RunRecord,
) -> Result<(), VerifyError> {
    let report = cover_report(dm, c, None, opts)?;
    let m = &mut rec.measured;
    m.insert("tree_count".into(), Stat::Int(c.tree_count() as u64));
    m.insert("total_size".into(), Stat::Int(c.total_size() as u64));
    m.insert("max_overlap".into(), Stat::Int(report.max_overlap as u64));
    m.insert("average_overlap".into(), Stat::Real(report.average_overlap));
    m.insert("max_stretch".into(), Stat::Ratio(report.max_stretch));
    m.insert("mean_stretch".into(), Stat::Real(report.mean_stretch));
    m.insert("alpha".into(), Stat::Ratio(c.alpha));
    m.insert("spanning_stretch".into(), Stat::Ratio(c.spanning_stretch));
    m.insert("depth".into(), Stat::Int(c.trace.max_depth as u64));
    m.insert("pairs".into(), Stat::Int(report.pairs as u64));
    m.insert("uncovered".into(), Stat::Int(report.uncovered as u64));
    m.insert(
        "ramsey_calls".into(),
        Stat::Int(c.trace.ramsey_calls.len() as u64),
    );
    if let Some((s, seed)) = report.sampled {
        m.insert("sampled_pairs".into(), Stat::Int(s as u64));
        m.insert("sample_seed".into(), Stat::Int(seed));
    }
    for spec in suite {
        let name = spec.name.as_str();
        let o = match spec.kind {
            BoundKind::NonContraction => outcome(
                name,
                report.contraction.is_none(),
                format!("{} trees", c.tree_count()),
                report.contraction.as_ref().map(|w| {
                    format!(
                        "tree {} pair ({}, {}): tree {} graph {}",
                        w.tree,
                        w.u,
                        w.v,
                        w.tree_distance,
                        w.graph_distance
                            .map_or("unreachable".into(), |d| d.to_string())
                    )
                }),
            ),
            BoundKind::MetricStretch | BoundKind::HstStretch | BoundKind::SpanningStretch => {
                let want = match (spec.kind, c.kind) {
                    (BoundKind::MetricStretch, CoverKind::Metric) => metric_stretch(c.alpha),
                    (BoundKind::HstStretch, CoverKind::Hst) => hst_stretch(c.alpha),
                    (BoundKind::SpanningStretch, CoverKind::Spanning) => c.spanning_stretch,
                    _ => {
                        return Err(VerifyError::NotApplicable {
                            name: spec.name.clone(),
                            structure: "this cover kind",
                        })
                    }
                };
                let ok = report.uncovered == 0 && report.max_stretch <= want;
                outcome(
                    name,
                    ok,
                    format!(
                        "max {} <= {} over {} pairs, {} uncovered",
                        report.max_stretch, want, report.pairs, report.uncovered
                    ),
                    (!ok).then(|| format!("pair {:?}", report.worst_pair)),
                )
            }
            BoundKind::RamseyCardinality => {
                let bad = c.trace.ramsey_calls.iter().find(|r| !r.cardinality_ok());
                outcome(
                    name,
                    bad.is_none(),
                    format!("{} calls", c.trace.ramsey_calls.len()),
                    bad.map(|r| format!("kept {} of {} at k = {}", r.kept, r.demand, r.k)),
                )
            }
            BoundKind::RecursionDepth => {
                let bad = c
                    .trace
                    .pairwise
                    .iter()
                    .find(|p| !depth_ok(p.levels as u64, p.t as u64, c.k));
                let q = c.trace.pairwise.iter().map(|p| p.levels).max().unwrap_or(0);
                outcome(
                    name,
                    bad.is_none(),
                    format!("{} collections, max levels {q}", c.trace.pairwise.len()),
                    bad.map(|p| {
                        format!("levels {} for t = {} at depth {}", p.levels, p.t, p.depth)
                    }),
                )
            }
            BoundKind::PairwiseSize => {
                let plain: Vec<_> = c.trace.pairwise.iter().filter(|p| !p.extended).collect();
                let bad = plain.iter().find(|p| {
                    !pairwise_size_ok(
                        p.total_size as u64,
                        p.n as u64,
                        p.t as u64,
                        p.levels as u64,
                        c.k,
                    )
                });
                outcome(
                    name,
                    bad.is_none(),
                    format!("{} non-extended collections", plain.len()),
                    bad.map(|p| {
                        format!(
                            "size {} for n = {}, t = {}, q = {}",
                            p.total_size, p.n, p.t, p.levels
                        )
                    }),
                )
            }
            BoundKind::ForestStretch { k_const } => {
                if c.kind != CoverKind::Spanning {
                    return Err(VerifyError::NotApplicable {
                        name: spec.name.clone(),
                        structure: "non-spanning covers",
                    });
                }
                let bad = c
                    .trace
                    .pairwise
                    .iter()
                    .find(|p| p.stretch.to_f64() > forest_stretch_limit(k_const, c.k, p.t));
                outcome(
                    name,
                    bad.is_none(),
                    format!("K = {k_const}, max forest stretch {}", c.spanning_stretch),
                    bad.map(|p| {
                        format!(
                            "stretch {} for t = {} exceeds {:.4}",
                            p.stretch,
                            p.t,
                            forest_stretch_limit(k_const, c.k, p.t)
                        )
                    }),
                )
            }
            BoundKind::TreeCount(_) | BoundKind::AverageOverlap(_) => {
                outcome(name, true, "recorded for a scaling fit".into(), None)
            }
            BoundKind::OracleStretch | BoundKind::PathConsistency => {
                return Err(VerifyError::NotApplicable {
                    name: spec.name.clone(),
                    structure: "covers",
                })
            }
        };
        rec.checks.push(o);
    }
    Ok(())
}

/// Pairs to check: all `u < v` up to the cap, sampled otherwise.
fn pair_list(n: usize, opts: &CertifyOptions) -> Vec<(VertexId, VertexId)> {
    if n <= opts.cap {
        return (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
    }
    use rand::Rng;
    let mut rng = crate::rng::rng_for(opts.sample_seed, &[0x7361]);
    (0..opts.samples)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let v = (u + rng.gen_range(1..n)) % n;
            (u.min(v), u.max(v))
        })
        .collect()
}

#[derive(Default)]
struct Scan {
    pairs: usize,
    max: Option<(Ratio, VertexId, VertexId)>,
    low: Option<(VertexId, VertexId, Weight, Weight)>,
    bad_path: Option<(VertexId, VertexId, String)>,
}

impl Scan {
    fn merge(mut self, o: Scan) -> Scan {
        self.pairs += o.pairs;
        if let Some(m) = o.max {
            if self.max.as_ref().is_none_or(|x| m.0 > x.0) {
                self.max = Some(m);
            }
        }
        self.low = self.low.or(o.low);
        self.bad_path = self.bad_path.or(o.bad_path);
        self
    }

    fn see(&mut self, u: VertexId, v: VertexId, est: Weight, d: Weight) {
        if d == UNREACHABLE {
            if est != UNREACHABLE && self.low.is_none() {
                self.low = Some((u, v, est, d));
            }
            return;
        }
        self.pairs += 1;
        if est < d && self.low.is_none() {
            self.low = Some((u, v, est, d));
        }
        if est == UNREACHABLE {
            self.max = Some((Ratio::new(u64::MAX as u128, 1), u, v));
            return;
        }
        let r = Ratio::new(est as u128, d as u128);
        if self.max.as_ref().is_none_or(|m| r > m.0) {
            self.max = Some((r, u, v));
        }
    }
}

fn scan_pairs(
    n: usize,
    opts: &CertifyOptions,
    f: impl Fn(VertexId, VertexId, &mut Scan) + Sync,
) -> Scan {
    let pairs = pair_list(n, opts);
    pairs
        .par_chunks(2048)
        .map(|chunk| {
            let mut s = Scan::default();
            for &(u, v) in chunk {
                f(u, v, &mut s);
            }
            s
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Scan::default(), Scan::merge)
}

fn push_estimate_checks(spec: &BoundSpec, want: Ratio, scan: &Scan, rec: &mut RunRecord) {
    let max = scan.max.map(|m| m.0).unwrap_or(Ratio::ONE);
    let o = match spec.kind {
        BoundKind::NonContraction => outcome(
            &spec.name,
            scan.low.is_none(),
            format!("{} pairs", scan.pairs),
            scan.low
                .map(|(u, v, e, d)| format!("pair ({u}, {v}): estimate {e} graph {d}")),
        ),
        _ => outcome(
            &spec.name,
            max <= want,
            format!("max {max} <= {want} over {} pairs", scan.pairs),
            (max > want).then(|| format!("pair {:?}", scan.max.map(|m| (m.1, m.2)))),
        ),
    };
    rec.checks.push(o);
}

fn certify_oracle(
    dm: &DistanceMatrix,
    o: &SeparatorOracle,
    suite: &[BoundSpec],
    opts: &CertifyOptions,
    rec: &mut RunRecord,
) -> Result<(), VerifyError> {
    let scan = scan_pairs(o.n, opts, |u, v, s| {
        s.see(u, v, o.query(u, v).expect("vertex in range"), dm.get(u, v))
    });
    rec.measured
        .insert("words".into(), Stat::Int(o.words() as u64));
    rec.measured.insert("alpha".into(), Stat::Ratio(o.alpha));
    rec.measured.insert(
        "max_stretch".into(),
        Stat::Ratio(scan.max.map(|m| m.0).unwrap_or(Ratio::ONE)),
    );
    rec.measured
        .insert("pairs".into(), Stat::Int(scan.pairs as u64));
    for spec in suite {
        match spec.kind {
            BoundKind::NonContraction | BoundKind::OracleStretch => {
                push_estimate_checks(spec, o.bound(), &scan, rec)
            }
            _ => {
                return Err(VerifyError::NotApplicable {
                    name: spec.name.clone(),
                    structure: "separator oracles",
                })
            }
        }
    }
    Ok(())
}

fn certify_paths(
    g: &Graph,
    dm: &DistanceMatrix,
    p: &PathReporting,
    suite: &[BoundSpec],
    opts: &CertifyOptions,
    rec: &mut RunRecord,
) -> Result<(), VerifyError> {
    let scan = scan_pairs(p.n(), opts, |u, v, s| {
        let a = p.query_path(u, v).expect("vertex in range");
        s.see(u, v, a.weight, dm.get(u, v));
        if s.bad_path.is_some() {
            return;
        }
        let mut at = u;
        let mut w: Weight = 0;
        for e in &a.path {
            let ok_edge = p.in_underlying(e)
                && (p.kind != PathKind::Spanning || g.edge_weight(e.u, e.v) == Some(e.w));
            if !ok_edge || (e.u != at && e.v != at) {
                s.bad_path = Some((u, v, format!("edge ({}, {})", e.u, e.v)));
                return;
            }
            at = e.other(at);
            w += e.w;
        }
        if a.tree.is_some() && (at != v || w != a.weight) {
            s.bad_path = Some((
                u,
                v,
                format!("path sums to {w} ending at {at}, estimate {}", a.weight),
            ));
        }
    });
    rec.measured.insert(
        "underlying_edges".into(),
        Stat::Int(p.underlying().len() as u64),
    );
    rec.measured.insert(
        "max_stretch".into(),
        Stat::Ratio(scan.max.map(|m| m.0).unwrap_or(Ratio::ONE)),
    );
    rec.measured
        .insert("pairs".into(), Stat::Int(scan.pairs as u64));
    for spec in suite {
        match spec.kind {
            BoundKind::NonContraction
            | BoundKind::MetricStretch
            | BoundKind::HstStretch
            | BoundKind::SpanningStretch => push_estimate_checks(spec, p.bound, &scan, rec),
            BoundKind::PathConsistency => rec.checks.push(outcome(
                &spec.name,
                scan.bad_path.is_none(),
                format!(
                    "{} pairs, {} underlying edges",
                    scan.pairs,
                    p.underlying().len()
                ),
                scan.bad_path
                    .as_ref()
                    .map(|(u, v, m)| format!("pair ({u}, {v}): {m}")),
            )),
            _ => {
                return Err(VerifyError::NotApplicable {
                    name: spec.name.clone(),
                    structure: "path reporting",
                })
            }
        }
    }
    Ok(())
}

/// A named suite of bounds.
pub fn suite(name: &str) -> Option<Vec<BoundSpec>> {
    let e = BoundSpec::exact;
    let shared = || {
        vec![
            e("non-contraction", BoundKind::NonContraction),
            e("ramsey-cardinality", BoundKind::RamseyCardinality),
            e("recursion-depth", BoundKind::RecursionDepth),
            e("pairwise-size", BoundKind::PairwiseSize),
        ]
    };
    Some(match name {
        "metric-cover" => {
            let mut s = shared();
            s.push(e("metric-stretch", BoundKind::MetricStretch));
            s
        }
        "hst-cover" => {
            let mut s = shared();
            s.push(e("hst-stretch", BoundKind::HstStretch));
            s
        }
        "spanning-cover" => {
            let mut s = shared();
            s.push(e("spanning-stretch", BoundKind::SpanningStretch));
            s.push(e(
                "forest-stretch",
                BoundKind::ForestStretch {
                    k_const: DEFAULT_FOREST_K,
                },
            ));
            s
        }
        "oracle" => vec![
            e("domination", BoundKind::NonContraction),
            e("oracle-stretch", BoundKind::OracleStretch),
        ],
        "path-reporting" => vec![
            e("domination", BoundKind::NonContraction),
            e("stretch", BoundKind::MetricStretch),
            e("path-consistency", BoundKind::PathConsistency),
        ],
        _ => return None,
    })
}

/// Suite names accepted by [`suite`].
pub const SUITES: &[&str] = &[
    "metric-cover",
    "hst-cover",
    "spanning-cover",
    "oracle",
    "path-reporting",
];

/// The suite matching a cover's kind.
pub fn cover_suite(kind: CoverKind) -> Vec<BoundSpec> {
    suite(match kind {
        CoverKind::Metric => "metric-cover",
        CoverKind::Hst => "hst-cover",
        CoverKind::Spanning => "spanning-cover",
    })
    .expect("built-in suite")
}

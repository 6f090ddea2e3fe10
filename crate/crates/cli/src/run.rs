//! Method dispatch, artifact assembly and the run manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use subsimplex_core::benchmarks::pca::{pca, PcaResult};
use subsimplex_core::benchmarks::transforms::{TransformKind, TransformSpec};
use subsimplex_core::psa_o::PoleEvent;
use subsimplex_core::{psa_o, psa_s, synth, Dataset, PsaDecomposition, PsaoDecomposition, PsaoOptions};

use crate::config::{Method, RunConfig, Source};
use crate::error::{CliError, Result};
use crate::ingest::ingest_reader;
use crate::output::{dataset_table, sha256_hex, write_atomic, FloatFormat, Table};
use crate::svg::{self, Groups};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const TIMING_FILE: &str = "timing.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    /// Hash of the CSV bytes read, or of the generated data serialized with
    /// 17 significant digits.
    pub sha256: String,
    pub n_samples: usize,
    pub n_parts: usize,
    pub column_labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Value substituted for zeros before log-ratio transforms.
    pub replacement_value: Option<f64>,
    pub pole_events: Vec<PoleEvent>,
    /// Per rank, number of samples whose approximation leaves the simplex.
    pub out_of_simplex_counts: Option<Vec<usize>>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub input: InputRecord,
    pub diagnostics: Diagnostics,
    pub outputs: Vec<OutputRecord>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Manifest { path: path.to_path_buf(), message: e.to_string() })
    }
}

/// Files produced by one run, before they touch the disk.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
    pub diagnostics: Diagnostics,
}

impl Artifacts {
    fn table(&mut self, name: impl Into<String>, t: Table) {
        self.files.push((name.into(), t.to_bytes()));
    }
}

/// Loads or generates the dataset together with its provenance record.
pub fn load(source: &Source) -> Result<(Dataset, InputRecord)> {
    let (ds, sha256) = match source {
        Source::Csv { path, meta } => {
            let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
            (ingest_reader(bytes.as_slice(), path, meta)?, sha256_hex(&bytes))
        }
        Source::Synthetic { example, seed, sizes } => {
            let ds = synthesize(*example, *seed, *sizes)?;
            let bytes = dataset_table(&ds, FloatFormat::full()).to_bytes();
            (ds, sha256_hex(&bytes))
        }
    };
    let input = InputRecord {
        sha256,
        n_samples: ds.n_samples(),
        n_parts: ds.n_parts(),
        column_labels: ds.column_labels().to_vec(),
    };
    Ok((ds, input))
}

pub fn synthesize(example: u8, seed: u64, sizes: [usize; 4]) -> Result<Dataset> {
    let base = synth::generate_clusters(&synth::example1_clusters(sizes, synth::DEFAULT_SD), seed)?;
    match example {
        1 => Ok(base),
        2 => Ok(synth::append_noise_parts(&base, synth::NoiseSpec::default(), seed)?),
        other => Err(CliError::Config(format!("unknown example {other}"))),
    }
}

fn labelled(first: &str, rest: &[String]) -> Vec<String> {
    std::iter::once(first.to_string()).chain(rest.iter().cloned()).collect()
}

fn variance_table(first: &str, rows: &[(String, f64)], fmt: FloatFormat, value: &str) -> Table {
    let total: f64 = rows.iter().map(|r| r.1).sum();
    let mut t = Table::new([first, value, "proportion", "cumulative"]);
    let mut cum = 0.0;
    for (name, v) in rows {
        let p = if total > 0.0 { v / total } else { 0.0 };
        cum += p;
        t.push(vec![name.clone(), fmt.fmt(*v), fmt.fmt(p), fmt.fmt(cum)]);
    }
    t
}

fn psa_common(
    out: &mut Artifacts,
    ds: &Dataset,
    fmt: FloatFormat,
    d: usize,
    scores: &nalgebra::DMatrix<f64>,
    loading: impl Fn(usize) -> Vec<f64>,
    merges: &[(usize, (usize, usize), f64, f64)],
) {
    let labels = ds.column_labels();
    let header = (1..=d).rev().map(|r| format!("score_rank_{r}")).collect();
    out.table("scores.csv", Table::from_matrix(header, scores, fmt));

    let mut t = Table::new(labelled("rank", labels));
    for r in 1..=d {
        t.push(std::iter::once(r.to_string()).chain(loading(r).iter().map(|v| fmt.fmt(*v))).collect());
    }
    out.table("loadings.csv", t);

    let mut t = Table::new(["rank_from", "vertex_i", "vertex_j", "alpha", "rss"]);
    for (rank, (i, j), alpha, rss) in merges {
        t.push(vec![rank.to_string(), i.to_string(), j.to_string(), fmt.fmt(*alpha), fmt.fmt(*rss)]);
    }
    out.table("merges.csv", t);

    let mut by_rank: Vec<(String, f64)> = merges.iter().map(|(rank, _, _, rss)| (rank.to_string(), *rss)).collect();
    by_rank.reverse();
    out.table("variance.csv", variance_table("rank", &by_rank, fmt, "rss"));
}

fn vertex_table(labels: &[String], vertices: impl Iterator<Item = Vec<f64>>, fmt: FloatFormat) -> Table {
    let mut t = Table::new(labelled("vertex", labels));
    for (k, v) in vertices.enumerate() {
        t.push(std::iter::once(k.to_string()).chain(v.iter().map(|x| fmt.fmt(*x))).collect());
    }
    t
}

fn psa_s_artifacts(out: &mut Artifacts, ds: &Dataset, fit: &PsaDecomposition, fmt: FloatFormat) {
    let d = fit.dim();
    let merges: Vec<_> = fit.merges().iter().map(|m| (m.rank_from, m.merged_pair, m.alpha, m.rss)).collect();
    psa_common(out, ds, fmt, d, fit.scores(), |r| fit.loading(r).to_vec(), &merges);
    let labels = ds.column_labels();
    for r in 0..=d {
        let vs = fit.vertex_set(r).vertices().iter().map(|v| v.as_slice().to_vec());
        out.table(format!("vertices_rank_{r}.csv"), vertex_table(labels, vs, fmt));
        out.table(
            format!("approximations_rank_{r}.csv"),
            Table::from_matrix(labels.to_vec(), fit.approximation(r), fmt),
        );
    }
}

fn psa_o_artifacts(out: &mut Artifacts, ds: &Dataset, fit: &PsaoDecomposition, fmt: FloatFormat) {
    let d = fit.dim();
    let merges: Vec<_> = fit.merges().iter().map(|m| (m.rank_from, m.merged_pair, m.alpha, m.rss)).collect();
    psa_common(out, ds, fmt, d, fit.scores(), |r| fit.loading(r).to_vec(), &merges);
    let labels = ds.column_labels();
    for r in 0..=d {
        let simplex = fit.simplex_vertex_set(r);
        let vs = simplex.vertices().iter().map(|v| v.as_slice().to_vec());
        out.table(format!("vertices_rank_{r}.csv"), vertex_table(labels, vs, fmt));
        let ovs = fit.orthant_vertex_set(r).vertices().iter().map(|v| v.as_slice().to_vec());
        out.table(format!("orthant_vertices_rank_{r}.csv"), vertex_table(labels, ovs, fmt));
        out.table(
            format!("approximations_rank_{r}.csv"),
            Table::from_matrix(labels.to_vec(), fit.simplex_approximation(r), fmt),
        );
    }
    out.diagnostics.pole_events = fit.poles().to_vec();
}

fn coordinate_labels(r: &PcaResult, labels: &[String]) -> Vec<String> {
    match r.transform.kind {
        TransformKind::Identity => labels.to_vec(),
        TransformKind::Power => labels.iter().map(|l| format!("pow_{l}")).collect(),
        TransformKind::Clr => labels.iter().map(|l| format!("clr_{l}")).collect(),
        TransformKind::Alr => {
            let reference = r.transform.alr_reference.unwrap_or(labels.len() - 1);
            labels
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != reference)
                .map(|(_, l)| format!("alr_{l}_{}", labels[reference]))
                .collect()
        }
        TransformKind::Ilr => (1..labels.len()).map(|k| format!("ilr_{k}")).collect(),
    }
}

fn pca_artifacts(out: &mut Artifacts, ds: &Dataset, r: &PcaResult, fmt: FloatFormat) {
    let labels = ds.column_labels();
    let m = r.n_components();
    let coords = coordinate_labels(r, labels);
    let pcs: Vec<String> = (1..=m).map(|k| format!("PC{k}")).collect();
    out.table("scores.csv", Table::from_matrix(pcs.clone(), &r.scores, fmt));
    let mut t = Table::new(labelled("component", &coords));
    for (k, c) in r.components.column_iter().enumerate() {
        t.push(std::iter::once(pcs[k].clone()).chain(c.iter().map(|v| fmt.fmt(*v))).collect());
    }
    out.table("loadings.csv", t);
    let rows: Vec<(String, f64)> = pcs.iter().cloned().zip(r.eigenvalues.iter().copied()).collect();
    out.table("variance.csv", variance_table("component", &rows, fmt, "eigenvalue"));
    for k in 0..=m {
        out.table(
            format!("approximations_rank_{k}.csv"),
            Table::from_matrix(labels.to_vec(), r.composition_view(k), fmt),
        );
        if r.transform.kind != TransformKind::Identity {
            out.table(
                format!("transformed_approximations_rank_{k}.csv"),
                Table::from_matrix(coords.clone(), &r.approximations[k], fmt),
            );
        }
    }
    if !r.transform.kind.is_log_ratio() {
        let mut t = Table::new(std::iter::once("sample".to_string()).chain((0..=m).map(|k| format!("rank_{k}"))));
        for i in 0..ds.n_samples() {
            t.push(
                std::iter::once(i.to_string())
                    .chain(r.out_of_simplex.iter().map(|flags| u8::from(flags[i]).to_string()))
                    .collect(),
            );
        }
        out.table("out_of_simplex.csv", t);
        out.diagnostics.out_of_simplex_counts =
            Some(r.out_of_simplex.iter().map(|f| f.iter().filter(|b| **b).count()).collect());
    }
    out.diagnostics.replacement_value = r.replacement;
}

fn transform_spec(config: &RunConfig, ds: &Dataset) -> Result<TransformSpec> {
    let kind = match config.method {
        Method::Pca => TransformKind::Identity,
        Method::PowerPca => TransformKind::Power,
        Method::LogratioPca => config.logratio.into(),
        _ => unreachable!("not a PCA method"),
    };
    let mut spec = TransformSpec::new(kind);
    spec.exponent = config.exponent;
    spec.zero_factor = config.zero_factor;
    spec.renormalize = config.renormalize;
    if let Some(name) = &config.alr_reference {
        let k = ds
            .column_labels()
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| CliError::Config(format!("alr reference `{name}` is not a part label")))?;
        spec.alr_reference = Some(k);
    }
    Ok(spec)
}

/// Computes every artifact of a run in memory.
pub fn compute(config: &RunConfig, ds: &Dataset) -> Result<Artifacts> {
    config.validate()?;
    let fmt = FloatFormat::new(config.precision);
    let groups = if config.plots.ternary || config.plots.scores {
        Groups::from_dataset(ds, config.color_by.as_deref())?
    } else {
        Groups::single(ds.n_samples())
    };
    let mut out = Artifacts::default();
    let (scene, score_cols) = match config.method {
        Method::PsaS => {
            let fit = psa_s::fit(ds)?;
            psa_s_artifacts(&mut out, ds, &fit, fmt);
            let cols = (1..=fit.dim().min(4)).map(|r| (format!("rank {r}"), fit.score_column(r))).collect::<Vec<_>>();
            (svg::psa_s_scene(ds, &fit), cols)
        }
        Method::PsaO => {
            let opts = PsaoOptions { grid_points: config.grid_points, refine: config.refine };
            let fit = psa_o::fit(ds, &opts)?;
            psa_o_artifacts(&mut out, ds, &fit, fmt);
            let cols = (1..=fit.dim().min(4)).map(|r| (format!("rank {r}"), fit.score_column(r))).collect::<Vec<_>>();
            (svg::psa_o_scene(ds, &fit), cols)
        }
        Method::Pca | Method::PowerPca | Method::LogratioPca => {
            let spec = transform_spec(config, ds)?;
            let r = pca(ds.values(), &spec)?;
            pca_artifacts(&mut out, ds, &r, fmt);
            let cols = (0..r.n_components().min(4))
                .map(|k| (format!("PC{}", k + 1), r.scores.column(k).iter().copied().collect()))
                .collect::<Vec<_>>();
            let title = format!("{:?} PCA", spec.kind);
            (svg::pca_scene(ds, &r, &title), cols)
        }
    };
    if config.plots.ternary {
        match scene {
            Ok(scene) => out.files.push(("ternary.svg".into(), svg::emit_ternary_svg(&scene, &groups).into_bytes())),
            Err(CliError::DimensionNotTwo { dim }) => {
                out.diagnostics.notes.push(format!("ternary plot skipped: no rank 2 view for dimension {dim}"));
            }
            Err(e) => return Err(e),
        }
    }
    if config.plots.scores {
        out.files.push(("scores.svg".into(), svg::emit_scatter_matrix(&score_cols, &groups).into_bytes()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
struct Timing {
    elapsed_seconds: f64,
}

/// Runs `config`, writing every artifact, `manifest.json` and `timing.json`
/// into `config.out`. Wall-clock timing lives in its own file so that the
/// manifest and all other outputs are reproducible byte for byte.
pub fn run(config: &RunConfig) -> Result<Manifest> {
    let start = Instant::now();
    config.validate()?;
    let (ds, input) = load(&config.source)?;
    let artifacts = compute(config, &ds)?;
    let dir = &config.out;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut outputs = Vec::with_capacity(artifacts.files.len());
    for (name, bytes) in &artifacts.files {
        write_atomic(&dir.join(name), bytes)?;
        outputs.push(OutputRecord { file: name.clone(), sha256: sha256_hex(bytes) });
    }
    let manifest = Manifest {
        tool: "subsimplex".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        input,
        diagnostics: artifacts.diagnostics,
        outputs,
    };
    let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    json.push(b'\n');
    write_atomic(&dir.join(MANIFEST_FILE), &json)?;
    let timing = Timing { elapsed_seconds: start.elapsed().as_secs_f64() };
    write_atomic(&dir.join(TIMING_FILE), &serde_json::to_vec_pretty(&timing).expect("timing serializes"))?;
    Ok(manifest)
}

/// Re-runs the configuration recorded in a manifest into `out`. A CSV input
/// must still hash to the recorded value.
pub fn replay(manifest_path: &Path, out: PathBuf) -> Result<Manifest> {
    let old = Manifest::read(manifest_path)?;
    let mut config = old.config.clone();
    config.out = out;
    if let Source::Csv { path, .. } = &config.source {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        if sha256_hex(&bytes) != old.input.sha256 {
            return Err(CliError::Config(format!("{} changed since the manifest was written", path.display())));
        }
    }
    run(&config)
}

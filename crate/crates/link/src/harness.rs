//! Seeded trials, sweeps and result files.
//!
//! Scene and observation draws depend only on the master seed and the trial
//! index, so every scheme and SNR point sees the same scenes. Channel,
//! outage and corruption draws come from the per-point trial seed.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use oar_core::channel::{baseline_payload_model, digital_outage, ChannelConfig, ModalityRates};
use oar_core::codec::{decode_latents, demodulate, encode, modulate, Codebook, CodebookParams, Matrix, Stream, UniformCodec};
use oar_core::graph::{OarGraph, Vocabulary};
use oar_core::link::{apply_channel, transmit};
use oar_core::metrics::{aggregate, alignment_distortion, evaluate, MetricReport, Summary, METRIC_COLUMNS};
use oar_core::rng::{derive_seed, rng_from, stream};
use oar_core::scheduler::{csi_to_budget, optimize_mask, OperatingLevel, Schedule, TransmissionMask};
use oar_core::worldgen::{evidence_graph, fuse, generate_scene, observe, Modality, ModalityView, SceneConfig};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::codebook_io::load_codebook;
use crate::config::{ExperimentConfig, Scheme, Snr};
use crate::corpus::load_corpus;
use crate::format::{fmt_f64, fmt_opt};
use crate::vocab_io::resolve_vocabulary;
use crate::Error;

/// Source dimensions of one image-equivalent sample (3 x 256 x 256).
pub const SOURCE_DIMS: f64 = 3.0 * 256.0 * 256.0;

/// One cell of the sweep grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub index: usize,
    pub config_id: String,
    pub scheme: Scheme,
    pub snr_db: f64,
    pub modalities: Vec<Modality>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTiming {
    pub encode: Duration,
    pub channel: Duration,
    pub decode: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub config_id: String,
    pub seed: u64,
    pub trial: usize,
    pub scheme: Scheme,
    pub snr_db: Snr,
    pub modalities: Vec<Modality>,
    /// `[m_obj, m_rel, m_attr]`; absent for the digital baseline.
    pub mask: Option<[u8; 3]>,
    pub level: Option<u8>,
    pub symbols_sent: u64,
    pub over_budget: bool,
    pub truncated_objects: usize,
    pub truncated_relations: usize,
    pub ground_truth: OarGraph,
    pub decoded: OarGraph,
    pub metrics: MetricReport,
    #[serde(skip)]
    pub timing: StageTiming,
}

/// Loaded resources for one configuration. Immutable while trials run.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub vocab: Vocabulary,
    pub codebook: Codebook,
    corpus: Option<Vec<OarGraph>>,
    uniform: BTreeMap<u64, UniformCodec>,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self, Error> {
        config.validate()?;
        let vocab = resolve_vocabulary(&config.vocab)?;
        let codebook = match &config.codebook {
            Some(path) => load_codebook(path)?,
            None => Codebook::for_vocabulary(CodebookParams::with_seed(config.codebook_seed), &vocab)
                .map_err(|e| Error::Config(format!("codebook: {e}")))?,
        };
        let sizes = codebook.sizes();
        if sizes != oar_core::codec::FamilySizes::of(&vocab) {
            return Err(Error::Config("codebook family sizes do not match the vocabulary".into()));
        }
        let corpus = match &config.corpus {
            Some(path) => {
                let graphs = load_corpus(path, &vocab)?;
                if graphs.is_empty() {
                    return Err(Error::Config(format!("{}: corpus is empty", path.display())));
                }
                Some(graphs)
            }
            None => None,
        };
        let mut exp = Self { config, vocab, codebook, corpus, uniform: BTreeMap::new() };
        let budgets: Vec<u64> = exp
            .points()
            .iter()
            .filter(|p| matches!(p.scheme, Scheme::UniformAnalog(_)))
            .map(|p| exp.uniform_budget(p))
            .collect();
        for b in budgets {
            if !exp.uniform.contains_key(&b) {
                let codec = UniformCodec::new(&exp.codebook, b)
                    .ok_or_else(|| Error::Config(format!("uniform_analog cannot use a budget of {b} symbols")))?;
                exp.uniform.insert(b, codec);
            }
        }
        Ok(exp)
    }

    /// Sweep grid: modality sets, then schemes, then SNR values.
    pub fn points(&self) -> Vec<Point> {
        let sets = self.config.modality_sets();
        let tagged = self.config.modality_sweep.is_some();
        let mut points = Vec::new();
        for set in &sets {
            for &scheme in &self.config.schemes {
                for snr in &self.config.snr_db {
                    let index = points.len();
                    let config_id = if tagged {
                        let codes: String = set.iter().map(Modality::code).collect();
                        format!("p{index}:{codes}")
                    } else {
                        format!("p{index}")
                    };
                    points.push(Point { index, config_id, scheme, snr_db: snr.0, modalities: set.clone() });
                }
            }
        }
        points
    }

    fn adaptive(&self, snr_db: f64) -> Schedule {
        optimize_mask(&self.config.stream_profile, csi_to_budget(snr_db, &self.config.csi_policy))
    }

    fn uniform_budget(&self, p: &Point) -> u64 {
        match p.scheme {
            Scheme::UniformAnalog(Some(level)) => self.fixed_symbols(level),
            _ => self.adaptive(p.snr_db).symbols,
        }
    }

    fn fixed_symbols(&self, level: OperatingLevel) -> u64 {
        self.config.stream_profile.symbols(level.mask().expect("fixed levels are standard"))
    }

    /// Ground-truth scene of trial `i`.
    pub fn scene(&self, i: usize) -> OarGraph {
        match &self.corpus {
            Some(c) => c[i % c.len()].clone(),
            None => {
                let seed = derive_seed(self.config.master_seed, &[stream::SCENE, i as u64]);
                generate_scene(&SceneConfig { seed, ..self.config.scene }, &self.vocab)
            }
        }
    }

    /// Fused evidence of trial `i` seen through `modalities`. Each modality's
    /// draws are independent of which others are present.
    pub fn evidence(&self, scene: &OarGraph, i: usize, modalities: &[Modality]) -> OarGraph {
        let views: Vec<ModalityView> = modalities
            .iter()
            .map(|&m| {
                let seed = derive_seed(self.config.master_seed, &[stream::OBSERVE, i as u64, m as u64]);
                observe(scene, m, &self.config.observation, &self.vocab, seed)
            })
            .collect();
        evidence_graph(scene, &fuse(&views))
    }

    pub fn trial_seed(&self, p: &Point, i: usize) -> u64 {
        derive_seed(self.config.master_seed, &[p.index as u64, i as u64])
    }

    pub fn run_trial(&self, p: &Point, i: usize) -> TrialRecord {
        let seed = self.trial_seed(p, i);
        let scene = self.scene(i);
        match p.scheme {
            Scheme::DigitalBaseline(rate) => self.digital_trial(p, i, seed, scene, rate),
            _ => self.analog_trial(p, i, seed, scene),
        }
    }

    fn channel(&self, snr_db: f64, seed: u64) -> ChannelConfig {
        ChannelConfig { snr_db, noise_mode: self.config.noise_mode, seed: derive_seed(seed, &[stream::CHANNEL]) }
    }

    fn analog_trial(&self, p: &Point, i: usize, seed: u64, scene: OarGraph) -> TrialRecord {
        let cfg = &self.config;
        let cb = &self.codebook;
        let t0 = Instant::now();
        let evidence = self.evidence(&scene, i, &p.modalities);
        let encoded = encode(&evidence, cb);
        let t1 = Instant::now();
        let channel = self.channel(p.snr_db, seed);

        let (mask, level, symbols, over_budget, received, sent, t2) = match p.scheme {
            Scheme::UniformAnalog(_) => {
                let budget = self.uniform_budget(p);
                let codec = &self.uniform[&budget];
                let x = codec.compress(&encoded.latents);
                let (rows, cols) = x.shape();
                let mut tx = x.into_vec();
                transmit(&mut tx, &channel);
                let t2 = Instant::now();
                let received = codec.decompress(&Matrix::from_vec(rows, cols, tx));
                let level = match p.scheme {
                    Scheme::UniformAnalog(Some(l)) => l.number(),
                    _ => self.adaptive(p.snr_db).mask.level().number(),
                };
                ([1, 1, 1], level, codec.budget() as u64, false, received, [true; 3], t2)
            }
            _ => {
                let schedule = match p.scheme {
                    Scheme::SemanticFixedLevel(l) => {
                        let mask = l.mask().expect("fixed levels are standard");
                        let symbols = cfg.stream_profile.symbols(mask);
                        Schedule { mask, utility: cfg.stream_profile.utility(mask), symbols, over_budget: false, lambda: None }
                    }
                    _ => self.adaptive(p.snr_db),
                };
                let m: TransmissionMask = schedule.mask;
                let send = [true, m.attr, m.rel];
                let mut frame = modulate(&encoded.latents, cb, send);
                apply_channel(&mut frame, &channel);
                let t2 = Instant::now();
                let received = demodulate(&frame, cb);
                (m.as_array(), m.level().number(), schedule.symbols, schedule.over_budget, received, send, t2)
            }
        };
        let decoded = decode_latents(&received, cb, &self.vocab, cfg.threshold);
        let t3 = Instant::now();

        let mut metrics = evaluate(&scene, &decoded, &cfg.ged_costs, false);
        for (k, s) in [Stream::Obj, Stream::Attr, Stream::Rel].into_iter().enumerate() {
            if sent[k] {
                metrics.d_align[k] =
                    Some(alignment_distortion(received.get(s).as_slice(), encoded.latents.get(s).as_slice()));
            }
        }
        TrialRecord {
            config_id: p.config_id.clone(),
            seed,
            trial: i,
            scheme: p.scheme,
            snr_db: Snr(p.snr_db),
            modalities: p.modalities.clone(),
            mask: Some(mask),
            level,
            symbols_sent: symbols,
            over_budget,
            truncated_objects: encoded.truncated_objects,
            truncated_relations: encoded.truncated_relations,
            ground_truth: scene,
            decoded,
            metrics,
            timing: StageTiming { encode: t1 - t0, channel: t2 - t1, decode: t3 - t2 },
        }
    }

    fn digital_trial(&self, p: &Point, i: usize, seed: u64, scene: OarGraph, rate: f64) -> TrialRecord {
        let cfg = &self.config;
        let has = |m| p.modalities.contains(&m);
        let rates = ModalityRates {
            audio_kbps: if has(Modality::Audio) { cfg.modality_rates.audio_kbps } else { 0.0 },
            text_bits: if has(Modality::Text) { cfg.modality_rates.text_bits } else { 0 },
        };
        let image = if has(Modality::Image) { rate } else { 0.0 };
        let payload = baseline_payload_model(image, &rates);
        let t0 = Instant::now();
        let outage = digital_outage(payload, p.snr_db, &cfg.digital, derive_seed(seed, &[stream::OUTAGE])).outage;
        let t1 = Instant::now();
        let decoded = if outage {
            OarGraph::new()
        } else {
            let drop = (1.0 - rate / cfg.digital_reference_kbps).clamp(0.0, 0.9);
            corrupt(&scene, drop, derive_seed(seed, &[stream::CORRUPT]))
        };
        let t2 = Instant::now();
        let metrics = evaluate(&scene, &decoded, &cfg.ged_costs, outage);
        TrialRecord {
            config_id: p.config_id.clone(),
            seed,
            trial: i,
            scheme: p.scheme,
            snr_db: Snr(p.snr_db),
            modalities: p.modalities.clone(),
            mask: None,
            level: None,
            symbols_sent: (payload as f64 / cfg.digital.bits_per_symbol).ceil() as u64,
            over_budget: false,
            truncated_objects: 0,
            truncated_relations: 0,
            ground_truth: scene,
            decoded,
            metrics,
            timing: StageTiming { encode: Duration::ZERO, channel: t1 - t0, decode: t2 - t1 },
        }
    }
}

/// Drops each node and each edge independently with probability `p`; edges
/// lose their endpoints' fate too.
pub fn corrupt(g: &OarGraph, p: f64, seed: u64) -> OarGraph {
    let mut rng = rng_from(seed);
    let nodes: Vec<_> = g.nodes.iter().filter(|_| rng.random::<f64>() >= p).cloned().collect();
    let kept = |s: usize| nodes.iter().any(|n| n.slot == s);
    let edges = g
        .edges
        .iter()
        .filter(|_| rng.random::<f64>() >= p)
        .filter(|e| kept(e.subject) && kept(e.object))
        .cloned()
        .collect();
    OarGraph { nodes, edges }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub config_id: String,
    pub scheme: Scheme,
    pub snr_db: f64,
    /// Shared by every trial of the point, if any.
    pub level: Option<u8>,
    pub cbr: f64,
    pub kbps: f64,
    pub summary: Summary,
}

pub struct Sweep {
    pub rows: Vec<SummaryRow>,
    pub trials: Vec<TrialRecord>,
}

fn summarize(p: &Point, records: &[TrialRecord], cfg: &ExperimentConfig) -> SummaryRow {
    let reports: Vec<MetricReport> = records.iter().map(|r| r.metrics.clone()).collect();
    let level = records[0].level.filter(|l| records.iter().all(|r| r.level == Some(*l)));
    let symbols = records.iter().map(|r| r.symbols_sent as f64).sum::<f64>() / records.len() as f64;
    let kbps = match p.scheme {
        Scheme::DigitalBaseline(_) => symbols * cfg.digital.bits_per_symbol / 1000.0,
        _ => symbols / 1000.0,
    };
    SummaryRow {
        config_id: p.config_id.clone(),
        scheme: p.scheme,
        snr_db: p.snr_db,
        level,
        cbr: symbols / SOURCE_DIMS,
        kbps,
        summary: aggregate(&reports).expect("at least one trial"),
    }
}

/// Runs every trial of every point. `threads` of `None` uses rayon's
/// default pool size.
pub fn run_sweep(exp: &Experiment, threads: Option<usize>) -> Result<Sweep, Error> {
    let points = exp.points();
    let n = exp.config.trials;
    let jobs: Vec<(usize, usize)> = (0..points.len()).flat_map(|p| (0..n).map(move |i| (p, i))).collect();
    let work = || jobs.par_iter().map(|&(p, i)| exp.run_trial(&points[p], i)).collect::<Vec<_>>();
    let trials = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work),
        None => work(),
    };
    let rows = points.iter().zip(trials.chunks(n)).map(|(p, recs)| summarize(p, recs, &exp.config)).collect();
    Ok(Sweep { rows, trials })
}

pub fn csv_header() -> String {
    let mut cols = vec!["config_id", "scheme", "snr_db", "level", "cbr", "kbps"];
    cols.extend(METRIC_COLUMNS);
    cols.extend(["fail_rate", "n_trials"]);
    cols.join(",")
}

pub fn csv_row(r: &SummaryRow) -> String {
    let mut f = vec![
        r.config_id.clone(),
        format!("\"{}\"", r.scheme),
        fmt_f64(r.snr_db),
        r.level.map_or_else(String::new, |l| l.to_string()),
        fmt_f64(r.cbr),
        fmt_f64(r.kbps),
    ];
    f.extend(r.summary.metrics.iter().map(|m| fmt_opt(m.map(|s| s.mean))));
    f.push(fmt_f64(r.summary.failure_rate));
    f.push(r.summary.count.to_string());
    f.join(",")
}

pub fn render_csv(rows: &[SummaryRow]) -> String {
    let mut out = csv_header();
    out.push('\n');
    for r in rows {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

/// Result files of one run, opened before any trial so an unwritable
/// destination fails early.
pub struct Outputs {
    pub csv_path: PathBuf,
    csv: File,
    jsonl: Option<(PathBuf, File)>,
}

pub fn open_outputs(dir: &Path, jsonl: bool) -> Result<Outputs, Error> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join("summary.csv");
    let csv = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let jsonl = if jsonl {
        let path = dir.join("trials.jsonl");
        let f = File::create(&path).map_err(|e| Error::io(&path, e))?;
        Some((path, f))
    } else {
        None
    };
    Ok(Outputs { csv_path, csv, jsonl })
}

pub fn write_outputs(out: Outputs, sweep: &Sweep) -> Result<(), Error> {
    let Outputs { csv_path, mut csv, jsonl } = out;
    csv.write_all(render_csv(&sweep.rows).as_bytes()).map_err(|e| Error::io(&csv_path, e))?;
    if let Some((path, f)) = jsonl {
        let mut w = BufWriter::new(f);
        for t in &sweep.trials {
            let line = serde_json::to_string(t).expect("trial records serialize");
            writeln!(w, "{line}").map_err(|e| Error::io(&path, e))?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// Mean per-stage wall time per scheme, for diagnostics only.
pub fn timing_report(sweep: &Sweep) -> String {
    let mut by: BTreeMap<String, (StageTiming, u32)> = BTreeMap::new();
    for t in &sweep.trials {
        let e = by.entry(t.scheme.to_string()).or_default();
        e.0.encode += t.timing.encode;
        e.0.channel += t.timing.channel;
        e.0.decode += t.timing.decode;
        e.1 += 1;
    }
    let us = |d: Duration, n: u32| d.as_secs_f64() * 1e6 / n as f64;
    by.iter()
        .map(|(s, (t, n))| {
            format!(
                "{s}: encode {:.1} us, channel {:.1} us, decode {:.1} us\n",
                us(t.encode, *n),
                us(t.channel, *n),
                us(t.decode, *n)
            )
        })
        .collect()
}

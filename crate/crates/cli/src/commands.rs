use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use umthresh::baselines::{multi_otsu, otsu};
use umthresh::circuit::{
    cost_and_depth, sample, simulate, simulate_basis, CostTable, Simulator, DEFAULT_QUBIT_CAP,
};
use umthresh::histogram::{compute_histogram, PeakSet};
use umthresh::image::{load_pgm, save_pgm, GrayImage};
use umthresh::metrics::{report, MetricsReport, SsimConfig};
use umthresh::neqr::{binarize, build_comparator, run_full_circuit, NeqrLayout, Readout, Route};
use umthresh::povm::{apply_effect, build_uniform_state, GaussianEffect, IntensityBasis};
use umthresh::stateprep::{build_load_circuit, gen_angles};
use umthresh::thresholding::{
    quantize, run_thresholds, select_binary_threshold, LevelRule, Provenance, ThresholdConfig,
    ThresholdRun, ThresholdSet,
};

use crate::args::{
    Baseline, BinarizeArgs, ComparatorArgs, DemoArgs, PipelineArgs, QuantizeArgs, RouteArg,
    RuleArg, ThresholdsArgs,
};
use crate::error::CliError;

pub const QUBIT_CAP_VAR: &str = "UMTHRESH_QUBIT_CAP";

pub fn qubit_cap() -> Result<usize, CliError> {
    match std::env::var(QUBIT_CAP_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{QUBIT_CAP_VAR}={v:?} is not a qubit count"))),
        Err(_) => Ok(DEFAULT_QUBIT_CAP),
    }
}

fn write(out: &Path, name: &str, contents: impl AsRef<[u8]>) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out)?;
    let path = out.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

fn write_pgm(out: &Path, name: &str, img: &GrayImage) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out)?;
    let path = out.join(name);
    save_pgm(img, &path)?;
    Ok(path)
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn pipeline_config(args: &PipelineArgs) -> Result<ThresholdConfig, CliError> {
    let peak_override = match &args.peaks {
        Some(path) => Some(PeakSet::from_json(&fs::read_to_string(path)?)?),
        None => None,
    };
    Ok(ThresholdConfig {
        peaks: args.peak_config(),
        sparse_levels: args.sparse_levels,
        mode: args.mode()?,
        qubit_cap: qubit_cap()?,
        peak_override,
    })
}

fn run_pipeline(img: &GrayImage, args: &PipelineArgs) -> Result<ThresholdRun<f64>, CliError> {
    let run = run_thresholds::<f64>(img, &pipeline_config(args)?)?;
    if run
        .set
        .thresholds()
        .iter()
        .any(|t| t.provenance == Provenance::Degenerate)
    {
        eprintln!(
            "warning: image has a single intensity; threshold set to it ({})",
            run.set.values()[0]
        );
    }
    Ok(run)
}

/// Intensity, pixel count, then one probability column per peak.
fn curves_csv(img: &GrayImage, run: &ThresholdRun<f64>) -> Result<Vec<u8>, CliError> {
    let hist = compute_histogram(img);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["intensity".to_string(), "count".to_string()];
    header.extend((0..run.measurements.len()).map(|k| format!("peak_{k}")));
    w.write_record(&header)
        .map_err(|e| CliError::Data(e.to_string()))?;
    if let Some(first) = run.measurements.first() {
        for (i, &v) in first.basis.intensities().iter().enumerate() {
            let mut row = vec![v.to_string(), hist.counts()[v as usize].to_string()];
            row.extend(
                run.measurements
                    .iter()
                    .map(|m| format!("{:.9}", m.probabilities[i])),
            );
            w.write_record(&row)
                .map_err(|e| CliError::Data(e.to_string()))?;
        }
    }
    w.into_inner().map_err(|e| CliError::Data(e.to_string()))
}

pub fn thresholds(args: &ThresholdsArgs, out: &Path) -> Result<(), CliError> {
    let img = load_pgm(&args.input)?;
    let run = run_pipeline(&img, &args.pipeline)?;
    let json = format!("{}\n", run.set.to_json());
    write(out, "thresholds.json", &json)?;
    write(out, "curves.csv", curves_csv(&img, &run)?)?;
    print!("{json}");
    Ok(())
}

#[derive(Serialize)]
struct MethodReport {
    method: String,
    thresholds: Vec<u32>,
    output: String,
    #[serde(flatten)]
    metrics: MetricsReport<f64>,
}

#[derive(Serialize)]
struct QuantizeReport {
    input: String,
    rule: LevelRule,
    binary: bool,
    methods: Vec<MethodReport>,
}

fn ssim_config(img: &GrayImage) -> SsimConfig {
    SsimConfig {
        window: SsimConfig::default()
            .window
            .min(img.width())
            .min(img.height()),
        ..SsimConfig::default()
    }
}

fn score(
    original: &GrayImage,
    processed: &GrayImage,
    method: &str,
    thresholds: Vec<u32>,
    path: &Path,
) -> Result<MethodReport, CliError> {
    Ok(MethodReport {
        method: method.into(),
        thresholds,
        output: path
            .file_name()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned(),
        metrics: report(original, processed, &ssim_config(original))?,
    })
}

fn level_rule(rule: RuleArg) -> LevelRule {
    match rule {
        RuleArg::SegmentMean => LevelRule::SegmentMean,
        RuleArg::PeakValue => LevelRule::PeakValue,
        RuleArg::BinaryExtremes => LevelRule::BinaryExtremes,
    }
}

pub fn quantize_cmd(args: &QuantizeArgs, out: &Path) -> Result<(), CliError> {
    let img = load_pgm(&args.input)?;
    let hist = compute_histogram(&img);
    let set = match &args.thresholds {
        Some(path) => ThresholdSet::from_json(&fs::read_to_string(path)?)?,
        None => run_pipeline(&img, &args.pipeline)?.set,
    };
    if set.bit_depth() != img.bit_depth() {
        return Err(CliError::Data(format!(
            "threshold set is for {}-bit images, input is {}-bit",
            set.bit_depth(),
            img.bit_depth()
        )));
    }
    let rule = level_rule(args.rule);
    let simulator = Simulator::with_cap(qubit_cap()?);
    let mut methods = Vec::new();

    if args.binary {
        let t = select_binary_threshold(&set, &hist)
            .ok_or_else(|| CliError::Data("no threshold to binarize with".into()))?;
        let bin = binarize::<f64>(&img, t, Route::PerPixel, &simulator)?.to_gray();
        let path = write_pgm(out, "binary.pgm", &bin)?;
        methods.push(score(&img, &bin, "pipeline", vec![t], &path)?);
        if args.compare != Baseline::None {
            let t = otsu(&hist)?;
            let bin = binarize::<f64>(&img, t, Route::Classical, &simulator)?.to_gray();
            let path = write_pgm(out, "otsu-binary.pgm", &bin)?;
            methods.push(score(&img, &bin, "otsu", vec![t], &path)?);
        }
    } else {
        let q = quantize(&img, &set, rule);
        let path = write_pgm(out, "quantized.pgm", &q)?;
        methods.push(score(&img, &q, "pipeline", set.values(), &path)?);
        let baseline = match args.compare {
            Baseline::None => None,
            Baseline::Otsu => Some(("otsu", multi_otsu(&hist, 2)?)),
            Baseline::MultiOtsu => Some(("multi-otsu", multi_otsu(&hist, (set.len() + 1).max(2))?)),
        };
        if let Some((name, base)) = baseline {
            let q = quantize(&img, &base, rule);
            let path = write_pgm(out, &format!("{name}.pgm"), &q)?;
            methods.push(score(&img, &q, name, base.values(), &path)?);
        }
    }

    let report = QuantizeReport {
        input: args.input.display().to_string(),
        rule,
        binary: args.binary,
        methods,
    };
    let json = to_json(&report);
    write(out, "report.json", &json)?;
    print!("{json}");
    Ok(())
}

#[derive(Serialize)]
struct BinarizeReport {
    threshold: u32,
    route: &'static str,
    white_pixels: usize,
    pixels: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    outcomes: Option<BTreeMap<String, f64>>,
}

pub fn binarize_cmd(args: &BinarizeArgs, out: &Path) -> Result<(), CliError> {
    let img = load_pgm(&args.input)?;
    let t = match args.threshold {
        Some(t) => t,
        None => {
            let set = run_pipeline(&img, &args.pipeline)?.set;
            select_binary_threshold(&set, &compute_histogram(&img))
                .ok_or_else(|| CliError::Data("no threshold to binarize with".into()))?
        }
    };
    let simulator = Simulator::with_cap(qubit_cap()?);
    let (image, outcomes, route) = match args.route {
        RouteArg::FullCircuit => {
            let readout = match args.pipeline.shots {
                Some(0) => return Err(CliError::Usage("--shots must be at least 1".into())),
                Some(shots) => Readout::Sampled {
                    shots,
                    seed: args.pipeline.seed.unwrap_or(7),
                },
                None => Readout::Exact,
            };
            let run = run_full_circuit::<f64>(&img, t, readout, &simulator)?;
            if let Some(counts) = &run.counts {
                write(out, "counts.json", format!("{}\n", counts.to_json()))?;
            }
            (run.image, Some(run.outcomes), "full-circuit")
        }
        RouteArg::PerPixel => (
            binarize::<f64>(&img, t, Route::PerPixel, &simulator)?,
            None,
            "per-pixel",
        ),
        RouteArg::Classical => (
            binarize::<f64>(&img, t, Route::Classical, &simulator)?,
            None,
            "classical",
        ),
    };
    write_pgm(out, "binary.pgm", &image.to_gray())?;
    let report = BinarizeReport {
        threshold: t,
        route,
        white_pixels: image.bits().iter().filter(|&&b| b).count(),
        pixels: image.bits().len(),
        outcomes,
    };
    let json = to_json(&report);
    write(out, "binarize.json", &json)?;
    print!("{json}");
    Ok(())
}

#[derive(Serialize)]
struct ComparatorRow {
    q: usize,
    quantum_cost: u64,
    depth: usize,
    ancilla_count: usize,
    cost_bound: u64,
    depth_bound: usize,
    verification: &'static str,
    cases: usize,
    failures: usize,
}

pub fn report_comparator(args: &ComparatorArgs, out: &Path) -> Result<(), CliError> {
    if args.q_min == 0 || args.q_max < args.q_min || args.q_max > 24 {
        return Err(CliError::Usage(format!(
            "need 1 <= q-min <= q-max <= 24, got {}..={}",
            args.q_min, args.q_max
        )));
    }
    let mut rows = Vec::new();
    for q in args.q_min..=args.q_max {
        let layout = NeqrLayout::new(0, q);
        let circuit = build_comparator::<f64>(&layout);
        let cost = cost_and_depth(&circuit, &CostTable::standard())?;
        let check = |t: usize, i: usize| -> Result<bool, CliError> {
            let input = t << layout.threshold(0) | i << layout.intensity(0);
            Ok((simulate_basis(&circuit, input)? & 1 == 1) == (i > t))
        };
        let (verification, cases, failures) = if q <= args.exhaustive_max {
            let mut failures = 0;
            for t in 0..1usize << q {
                for i in 0..1usize << q {
                    failures += usize::from(!check(t, i)?);
                }
            }
            ("exhaustive", 1usize << (2 * q), failures)
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            let mut failures = 0;
            for _ in 0..args.pairs {
                let (t, i) = (rng.gen_range(0..1usize << q), rng.gen_range(0..1usize << q));
                failures += usize::from(!check(t, i)?);
            }
            ("random", args.pairs, failures)
        };
        rows.push(ComparatorRow {
            q,
            quantum_cost: cost.quantum_cost,
            depth: cost.depth,
            ancilla_count: cost.ancilla_count,
            cost_bound: 7 * q as u64,
            depth_bound: q + 2,
            verification,
            cases,
            failures,
        });
    }
    write(out, "comparator.json", to_json(&rows))?;
    println!(
        "{:>3} {:>6} {:>6} {:>8} {:>11} {:>8}",
        "q", "cost", "depth", "ancilla", "check", "result"
    );
    for r in &rows {
        let ok = r.failures == 0
            && r.quantum_cost <= r.cost_bound
            && r.depth <= r.depth_bound
            && r.ancilla_count == 1;
        println!(
            "{:>3} {:>6} {:>6} {:>8} {:>11} {:>8}",
            r.q,
            r.quantum_cost,
            r.depth,
            r.ancilla_count,
            r.verification,
            if ok { "pass" } else { "FAIL" }
        );
    }
    match rows.iter().find(|r| r.failures > 0) {
        Some(r) => Err(CliError::Data(format!(
            "comparator failed {} of {} cases at q={}",
            r.failures, r.cases, r.q
        ))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct DemoReport {
    basis: Vec<u32>,
    effect_mean: f64,
    effect_width: f64,
    amplitudes: Vec<f64>,
    angles: Vec<f64>,
    counts: BTreeMap<String, u64>,
    shots: u64,
    seed: u64,
    threshold: u32,
    encoded_image: Vec<u8>,
    binarization_threshold: u32,
    binarization_outcomes: BTreeMap<String, f64>,
    binary_image: Vec<u8>,
}

pub fn demo(args: &DemoArgs, out: &Path) -> Result<(), CliError> {
    if args.shots == 0 {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    let basis = IntensityBasis::new(vec![63, 100, 141, 155], 8)?;
    let (mean, width) = (100.0, 35.0);
    let effect = GaussianEffect::new(mean, width, basis.clone())?;
    let weighted = apply_effect(&effect, &build_uniform_state::<f64>(&basis)?)?;

    let tree = gen_angles(&[0.2, 0.6, 0.15, 0.05])?;
    let state = simulate(&build_load_circuit(&tree), None)?;
    let counts = sample(&state, &[0, 1], args.shots, args.seed)?;
    let (top, _) = counts.most_frequent().expect("at least one shot");
    let threshold = basis.intensity(usize::from_str_radix(top, 2).expect("binary key"));

    let img = GrayImage::new(2, 2, 2, vec![3, 0, 1, 2])?;
    let bin_t = 1;
    let run = run_full_circuit::<f64>(
        &img,
        bin_t,
        Readout::Exact,
        &Simulator::with_cap(qubit_cap()?),
    )?;
    let binary = run.image.to_gray();
    write_pgm(out, "demo2x2.pgm", &img)?;
    write_pgm(out, "demo2x2-binary.pgm", &binary)?;

    let report = DemoReport {
        basis: basis.intensities().to_vec(),
        effect_mean: mean,
        effect_width: width,
        amplitudes: weighted.amplitudes().to_vec(),
        angles: tree.angles().to_vec(),
        counts: counts.counts.clone(),
        shots: args.shots,
        seed: args.seed,
        threshold,
        encoded_image: img.pixels().to_vec(),
        binarization_threshold: bin_t,
        binarization_outcomes: run.outcomes.clone(),
        binary_image: binary.pixels().to_vec(),
    };
    write(out, "demo.json", to_json(&report))?;

    let fmt = |v: &[f64]| {
        v.iter()
            .map(|a| format!("{a:.3}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!(
        "effect (mean {mean}, width {width}) on {:?}",
        basis.intensities()
    );
    println!("  amplitudes   {}", fmt(weighted.amplitudes()));
    println!("  angles (rad) {}", fmt(tree.angles()));
    println!("  {} shots     {:?}", args.shots, counts.counts);
    println!("  threshold    {threshold} (state |{top}>)");
    println!("2x2 image {:?}, threshold {bin_t}", img.pixels());
    println!(
        "  outcomes     {:?}",
        run.outcomes.keys().collect::<Vec<_>>()
    );
    println!("  binary       {:?}", binary.pixels());
    Ok(())
}

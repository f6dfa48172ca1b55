use std::collections::HashSet;
use std::path::Path;

use qad_core::audio::{self, FeatureRow, PcaRows, PipelineConfig, Split};
use qad_core::circuit::{covariance_density, tomography_data_qubit, TomographyMode};
use qad_core::error::{Error, Result};
use qad_core::eval::{
    export_report, heatmap, report, run_benchmark, score_testset, synthetic_benchmark,
    write_scores, Bounds, Evaluation, HeatmapSource, LabeledPoint, Report, ScoreMethod,
    DEFAULT_THRESHOLDS,
};
use qad_core::model::Detector;
use qad_core::readout::{LuminescenceConfig, ReadoutNoise};
use qad_core::{io, rng, DensityMatrix, FeatureVector};

use crate::args::{
    BenchArgs, FeaturesArgs, HeatmapArgs, Method, ModelSource, PcaFit, ReadoutArgs, ScoreArgs,
    TomographyArgs, TrainArgs,
};

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn parse_numbers(row: &str, what: &str) -> Result<Vec<f64>> {
    row.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("{what}: {x:?} is not a number")))
        })
        .collect()
}

/// `"x1,y1;x2,y2;..."`.
pub fn parse_vectors(text: &str) -> Result<Vec<FeatureVector>> {
    text.split(';')
        .filter(|r| !r.trim().is_empty())
        .map(|r| FeatureVector::new(parse_numbers(r, "--vectors")?))
        .collect()
}

/// `"a,b;c,d"`, a real symmetric density matrix.
pub fn parse_matrix(text: &str) -> Result<DensityMatrix> {
    let rows = text
        .split(';')
        .map(|r| parse_numbers(r, "--reference-dm"))
        .collect::<Result<Vec<_>>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(usage("--reference-dm must be a square matrix"));
    }
    let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
    DensityMatrix::from_real(&refs)
}

fn load_detector(source: &ModelSource) -> Result<Detector> {
    match (&source.model, &source.vectors) {
        (Some(path), None) => Detector::load(path),
        (None, Some(text)) => {
            let vectors = parse_vectors(text)?;
            let ids = (0..vectors.len()).map(|i| format!("v{i}")).collect();
            Detector::fit(vectors, ids, source.pre_centered)
        }
        _ => Err(usage("give exactly one of --model or --vectors")),
    }
}

fn score_method(args: &ReadoutArgs, seed: u64) -> Result<ScoreMethod> {
    match args.method {
        Method::Classical => Ok(ScoreMethod::Classical),
        Method::QuantumExact => Ok(ScoreMethod::QuantumExact),
        Method::QuantumPhoton => {
            let mut cfg = match &args.readout_config {
                Some(path) => LuminescenceConfig::load(path)?,
                None => LuminescenceConfig::default(),
            };
            if let Some(shots) = args.shots {
                if shots == 0 {
                    return Err(usage("--shots must be at least 1"));
                }
                cfg = cfg.with_shots(shots).with_noise(ReadoutNoise::Poisson {
                    seed: rng::sub_seed(seed, "readout"),
                });
            }
            Ok(ScoreMethod::QuantumPhoton(cfg))
        }
    }
}

fn method_metadata(method: &ScoreMethod, seed: u64) -> Vec<(String, String)> {
    let mut meta = vec![
        ("method".into(), method.as_str().into()),
        ("seed".into(), seed.to_string()),
    ];
    if let ScoreMethod::QuantumPhoton(cfg) = method {
        meta.push(("shots".into(), cfg.shots.to_string()));
        match cfg.noise {
            ReadoutNoise::None => meta.push(("readout_noise".into(), "none".into())),
            ReadoutNoise::Poisson { seed } => {
                meta.push(("readout_noise".into(), "poisson".into()));
                meta.push(("readout_seed".into(), seed.to_string()));
            }
        }
    }
    meta
}

fn test_points(rows: &[FeatureRow]) -> Result<Vec<LabeledPoint>> {
    rows.iter()
        .filter(|r| r.split == Split::Test)
        .map(|r| {
            Ok(LabeledPoint {
                source_id: r.source_id.clone(),
                label: r.label,
                point: FeatureVector::new(r.point().to_vec())?,
            })
        })
        .collect()
}

pub fn features(args: &FeaturesArgs) -> Result<()> {
    let entries = audio::read_manifest(&args.manifest)?;
    if entries.is_empty() {
        return Err(Error::parse("manifest", "no rows"));
    }
    let cfg = PipelineConfig {
        pca_rows: match args.pca_fit {
            PcaFit::Train => PcaRows::Train,
            PcaFit::All => PcaRows::All,
        },
        ..PipelineConfig::default()
    };
    let run = audio::extract_features(&entries, &cfg)?;
    create_dir(&args.out)?;
    io::write_csv_atomic(&args.out.join("diagnostics.csv"), &run.diagnostics)?;
    let failures: Vec<_> = run.failures().collect();
    if !failures.is_empty() {
        for d in &failures {
            eprintln!("{}: {}", d.source_id, d.message);
        }
        eprintln!(
            "{} of {} files processed; see diagnostics.csv",
            run.diagnostics.len() - failures.len(),
            run.diagnostics.len()
        );
        return Err(Error::parse(
            "audio input",
            format!("{} file(s) could not be processed", failures.len()),
        ));
    }
    let pca = run.pca.as_ref().expect("fitted when every file succeeds");
    audio::write_features(&args.out.join("features.csv"), &run.rows)?;
    pca.save(&args.out.join("pca_model.txt"))?;
    let ratio = pca.explained_variance_ratio();
    println!("features: {} rows", run.rows.len());
    println!(
        "explained variance (2 components): {:.4}",
        ratio.iter().sum::<f64>()
    );
    Ok(())
}

pub fn train(args: &TrainArgs) -> Result<()> {
    let (vectors, ids) = match (&args.features, &args.vectors) {
        (Some(path), None) => {
            let rows = audio::read_features(path)?;
            let chosen: Vec<&FeatureRow> = match &args.train_ids {
                Some(list) => {
                    let ids: Vec<&str> = list
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .collect();
                    let mut seen = HashSet::new();
                    if let Some(dup) = ids.iter().find(|id| !seen.insert(**id)) {
                        return Err(usage(format!("duplicate training id {dup:?}")));
                    }
                    ids.iter()
                        .map(|id| {
                            rows.iter().find(|r| r.source_id == *id).ok_or_else(|| {
                                Error::parse("feature table", format!("no row {id:?}"))
                            })
                        })
                        .collect::<Result<_>>()?
                }
                None => rows.iter().filter(|r| r.split == Split::Train).collect(),
            };
            let vectors = chosen
                .iter()
                .map(|r| FeatureVector::new(r.point().to_vec()))
                .collect::<Result<Vec<_>>>()?;
            (
                vectors,
                chosen
                    .iter()
                    .map(|r| r.source_id.clone())
                    .collect::<Vec<_>>(),
            )
        }
        (None, Some(text)) => {
            let vectors = parse_vectors(text)?;
            let ids = (0..vectors.len()).map(|i| format!("v{i}")).collect();
            (vectors, ids)
        }
        _ => return Err(usage("give exactly one of --features or --vectors")),
    };
    if vectors.len() != args.slots {
        return Err(usage(format!(
            "{} training vectors for a {}-slot circuit",
            vectors.len(),
            args.slots
        )));
    }
    let detector = Detector::fit(vectors, ids, args.pre_centered)?;
    detector.save(&args.model)?;
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.6}"))
            .collect::<Vec<_>>()
            .join(", ")
    };
    println!("weights: [{}]", fmt(detector.circuit().weights()));
    println!("trace_factor: {:.12}", detector.covariance().trace_factor());
    println!("model: {}", args.model.display());
    Ok(())
}

fn scored_tests(args: &ScoreArgs, seed: u64) -> Result<(Detector, ScoreMethod, Evaluation)> {
    let detector = Detector::load(&args.model)?;
    let rows = audio::read_features(&args.features)?;
    let tests = test_points(&rows)?;
    if tests.is_empty() {
        return Err(Error::parse("feature table", "no rows in the test split"));
    }
    let method = score_method(&args.readout, seed)?;
    let scores = score_testset(&detector, &tests, &method)?;
    let evaluation = Evaluation::from_scores(scores, DEFAULT_THRESHOLDS)?;
    Ok((detector, method, evaluation))
}

pub fn score(args: &ScoreArgs, seed: u64) -> Result<()> {
    let (_, _, evaluation) = scored_tests(args, seed)?;
    create_dir(&args.out)?;
    let path = args.out.join(report::SCORES_FILE);
    write_scores(&path, &evaluation.scores)?;
    println!(
        "scored {} samples: {}",
        evaluation.scores.len(),
        path.display()
    );
    Ok(())
}

pub fn eval(args: &ScoreArgs, seed: u64) -> Result<()> {
    let (detector, method, evaluation) = scored_tests(args, seed)?;
    let grid = heatmap(
        HeatmapSource::Covariance(detector.covariance()),
        Bounds::around_training(detector.training())?,
        args.resolution,
        args.resolution,
    )?;
    finish_report(
        &args.out,
        &evaluation,
        &grid,
        method_metadata(&method, seed),
    )
}

fn finish_report(
    out: &Path,
    evaluation: &Evaluation,
    grid: &qad_core::eval::HeatmapGrid,
    metadata: Vec<(String, String)>,
) -> Result<()> {
    export_report(
        out,
        &Report {
            evaluation,
            heatmap: grid,
            metadata,
        },
    )?;
    print_summary(evaluation);
    println!("report: {}", out.display());
    Ok(())
}

fn print_summary(evaluation: &Evaluation) {
    println!("samples: {}", evaluation.scores.len());
    println!("min_error_f: {:.4}", evaluation.curve_f.min_error);
    println!("min_error_g: {:.4}", evaluation.curve_g.min_error);
    match evaluation.relative_improvement() {
        Some(r) => println!("relative_improvement: {:.4}", r),
        None => println!("relative_improvement: NA"),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn heatmap_cmd(args: &HeatmapArgs) -> Result<()> {
    let detector = load_detector(&args.source)?;
    let bounds = Bounds::around_training(detector.training())?;
    let reference = args.reference_dm.as_deref().map(parse_matrix).transpose()?;
    let source = match &reference {
        Some(rho) => HeatmapSource::Density {
            rho,
            trace_factor: detector.covariance().trace_factor(),
        },
        None => HeatmapSource::Covariance(detector.covariance()),
    };
    let grid = heatmap(source, bounds, args.resolution, args.resolution)?;
    create_dir(&args.out)?;
    report::write_heatmaps(&args.out, &grid)?;
    println!("heatmaps: {}", args.out.display());
    Ok(())
}

fn format_matrix(rho: &DensityMatrix) -> String {
    let mut out = String::new();
    for i in 0..rho.dim() {
        let row: Vec<String> = (0..rho.dim())
            .map(|j| {
                let z = rho.get(i, j);
                if z.im.abs() < 5e-5 {
                    format!("{:>9.4}", z.re)
                } else {
                    format!("{:>9.4}{:+.4}i", z.re, z.im)
                }
            })
            .collect();
        out.push_str(&format!("  [{}]\n", row.join(", ")));
    }
    out
}

pub fn tomography(args: &TomographyArgs, seed: u64) -> Result<()> {
    let detector = load_detector(&args.source)?;
    let circuit = detector.circuit();
    let mode = match args.shots {
        None => TomographyMode::Exact,
        Some(0) => return Err(usage("--shots must be at least 1")),
        Some(shots_per_basis) => TomographyMode::Sampled {
            shots_per_basis,
            seed: rng::sub_seed(seed, "tomography"),
        },
    };
    let rho = tomography_data_qubit(circuit, mode)?;
    let reference = match &args.reference_dm {
        Some(text) => parse_matrix(text)?,
        None => covariance_density(circuit)?,
    };
    let fidelity = rho.fidelity(&reference)?;
    println!("reconstructed:");
    print!("{}", format_matrix(&rho));
    println!("reference:");
    print!("{}", format_matrix(&reference));
    println!("fidelity: {fidelity:.6}");
    Ok(())
}

pub fn bench(args: &BenchArgs, seed: u64) -> Result<()> {
    let bench_seed = rng::sub_seed(seed, "benchmark");
    let bench = synthetic_benchmark(bench_seed, args.n_train, args.n_test, args.ratio)?;
    let method = score_method(&args.readout, seed)?;
    let (detector, evaluation) = run_benchmark(&bench, &method)?;
    let grid = heatmap(
        HeatmapSource::Covariance(detector.covariance()),
        Bounds::around_training(detector.training())?,
        args.resolution,
        args.resolution,
    )?;
    let mut meta = method_metadata(&method, seed);
    meta.extend([
        ("benchmark_seed".to_string(), bench_seed.to_string()),
        ("ratio".to_string(), args.ratio.to_string()),
        ("n_train".to_string(), args.n_train.to_string()),
        ("n_test".to_string(), args.n_test.to_string()),
    ]);
    create_dir(&args.out)?;
    detector.save(&args.out.join("model.txt"))?;
    finish_report(&args.out, &evaluation, &grid, meta)
}

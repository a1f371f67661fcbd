mod args;
mod files;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context, Result};
use clap::Parser;
use jupylabel::evalkit::{
    evaluate, import_tagged_notebooks, label_distribution, Blocklist, LabeledCellDataset,
};
use jupylabel::notebook::{parse_notebook, serialize_notebook};
use jupylabel::pipeline::{classify_parts, CellClassification};
use jupylabel::{
    annotate_notebook, classify_notebook, strip_annotations, train_models, ActivityModelSet, AnnotationMode,
    ArtifactError, PipelineConfig, TrainingConfig,
};
use rayon::prelude::*;

use args::{BenchArgs, Cli, Command, EvalArgs, LabelArgs, StripArgs, TrainArgs};
use files::{discover, output_path, write_atomic, Found, LABELED_SUFFIX, STRIPPED_SUFFIX};

/// An error paired with the process exit status it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    error: anyhow::Error,
}

const EXIT_USAGE: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_MODEL: u8 = 3;
const EXIT_PARTIAL: u8 = 4;

trait ExitStatus<T> {
    fn exit(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ExitStatus<T> for Result<T, E> {
    fn exit(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code,
            error: e.into(),
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if f.code != EXIT_PARTIAL {
                eprintln!("error: {:#}", f.error);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let jobs = match &cli.command {
        Command::Label(a) => a.jobs,
        Command::Train(a) => a.jobs,
        Command::Eval(a) => a.jobs,
        Command::Bench(a) => a.jobs,
        Command::Strip(a) => a.jobs,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(anyhow!("--jobs must be at least 1")).exit(EXIT_USAGE);
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().exit(EXIT_IO)?;
    pool.install(|| match cli.command {
        Command::Label(a) => label(a),
        Command::Train(a) => train(a),
        Command::Eval(a) => eval(a),
        Command::Bench(a) => bench(a),
        Command::Strip(a) => strip(a),
    })
}

fn load_model(path: &Path) -> Result<ActivityModelSet, Failure> {
    ActivityModelSet::load(path).map_err(|e| {
        let code = if matches!(e, ArtifactError::Io(_)) {
            EXIT_IO
        } else {
            EXIT_MODEL
        };
        Failure {
            code,
            error: anyhow::Error::new(e).context(format!("model {}", path.display())),
        }
    })
}

/// Runs `job` on every notebook in parallel, reports failures in path order,
/// and turns any failure into the partial-batch exit status.
fn for_each_notebook<F>(found: &[Found], verb: &str, job: F) -> Result<(), Failure>
where
    F: Fn(&Found) -> Result<PathBuf> + Sync,
{
    if found.is_empty() {
        return Err(anyhow!("no notebooks found")).exit(EXIT_IO);
    }
    let results: Vec<Result<PathBuf>> = found.par_iter().map(&job).collect();
    let mut failed = 0;
    for (f, r) in found.iter().zip(results) {
        match r {
            Ok(out) => println!("{verb} {} -> {}", f.path.display(), out.display()),
            Err(e) => {
                failed += 1;
                eprintln!("error: {}: {e:#}", f.path.display());
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} of {} notebooks failed", found.len());
        return Err(anyhow!("partial failure")).exit(EXIT_PARTIAL);
    }
    Ok(())
}

fn debug_report(path: &Path, cells: &[CellClassification]) -> String {
    let mut out = String::new();
    for c in cells {
        let _ = write!(out, "{}#{}:", path.display(), c.stable_index);
        for h in &c.rule_hits {
            let _ = write!(out, " {}={} ({})", h.rule_id, h.label, h.evidence);
        }
        for (a, p) in &c.probabilities {
            let _ = write!(out, " {a}={p:.4}");
        }
        let labels: Vec<&str> = c.labels.iter().map(|l| l.as_str()).collect();
        let _ = write!(out, " -> [{}]", labels.join(", "));
        out.push('\n');
    }
    out
}

fn label(a: LabelArgs) -> Result<(), Failure> {
    let models = load_model(&a.model.model)?;
    let cfg = PipelineConfig {
        routing: a.routing.into(),
        ..PipelineConfig::default()
    };
    let mode: AnnotationMode = a.mode.into();
    let found = discover(&a.input, Some(LABELED_SUFFIX)).exit(EXIT_IO)?;
    let out_dir = a.output.output_dir.as_deref();
    for_each_notebook(&found, "labeled", |f| {
        let text = std::fs::read_to_string(&f.path)?;
        let nb = strip_annotations(&parse_notebook(&text)?);
        let table = classify_notebook(&nb, &models, &cfg);
        if a.debug {
            eprint!("{}", debug_report(&f.path, &table.cells));
        }
        let labeled = annotate_notebook(&nb, &table, mode)?;
        let out = output_path(f, out_dir, a.output.in_place, LABELED_SUFFIX);
        if a.export_table {
            let table_path = out.with_file_name(format!(
                "{}.table.json",
                out.file_name()
                    .unwrap_or_default()
                    .to_string_lossy()
                    .trim_end_matches(".ipynb")
            ));
            write_atomic(
                &table_path,
                &(serde_json::to_string_pretty(&table.to_json())? + "\n"),
            )?;
        }
        write_atomic(&out, &serialize_notebook(&labeled))?;
        Ok(out)
    })
}

fn strip(a: StripArgs) -> Result<(), Failure> {
    let found = discover(&a.input, None).exit(EXIT_IO)?;
    let out_dir = a.output.output_dir.as_deref();
    for_each_notebook(&found, "stripped", |f| {
        let nb = parse_notebook(&std::fs::read_to_string(&f.path)?)?;
        let out = output_path(f, out_dir, a.output.in_place, STRIPPED_SUFFIX);
        write_atomic(&out, &serialize_notebook(&strip_annotations(&nb)))?;
        Ok(out)
    })
}

fn load_dataset(path: &Path) -> Result<LabeledCellDataset, Failure> {
    LabeledCellDataset::load(path).map_err(|e| Failure {
        code: EXIT_IO,
        error: anyhow::Error::new(e).context(format!("dataset {}", path.display())),
    })
}

/// A dataset JSON file, or notebooks (a directory or `.ipynb` file) whose
/// cells carry `jupylabel:` tags.
fn load_training_input(path: &Path) -> Result<LabeledCellDataset, Failure> {
    let is_notebooks = path.is_dir() || path.extension().is_some_and(|e| e == "ipynb");
    if !is_notebooks {
        return load_dataset(path);
    }
    let found = discover(&[path.to_path_buf()], None).exit(EXIT_IO)?;
    let mut notebooks = Vec::with_capacity(found.len());
    for f in &found {
        let text = std::fs::read_to_string(&f.path)
            .with_context(|| format!("cannot read {}", f.path.display()))
            .exit(EXIT_IO)?;
        let nb = parse_notebook(&text)
            .with_context(|| format!("{}", f.path.display()))
            .exit(EXIT_IO)?;
        notebooks.push((f.relative.to_string_lossy().into_owned(), nb));
    }
    let name = path
        .file_stem()
        .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    import_tagged_notebooks(name, &notebooks).exit(EXIT_USAGE)
}

fn train(a: TrainArgs) -> Result<(), Failure> {
    let ds = load_training_input(&a.input)?;
    let mut cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read {}", p.display()))
                .exit(EXIT_IO)?;
            serde_json::from_str::<TrainingConfig>(&text)
                .with_context(|| format!("invalid training config {}", p.display()))
                .exit(EXIT_USAGE)?
        }
        None => TrainingConfig::default(),
    };
    if let Some(seed) = a.seed {
        cfg.set_seed(seed);
    }
    let (models, report) = train_models(&ds, &cfg).exit(EXIT_USAGE)?;
    let artifact = a.model.clone().unwrap_or_else(|| a.output_dir.join("model.json"));
    write_atomic(&artifact, &models.to_json_string()).exit(EXIT_IO)?;
    let report_path = a.output_dir.join("training_report.json");
    let report_json = serde_json::to_string_pretty(&report).exit(EXIT_IO)? + "\n";
    write_atomic(&report_path, &report_json).exit(EXIT_IO)?;

    println!(
        "trained on {} cells ({} after dedupe), fingerprint {}",
        report.records, report.records_after_dedupe, report.training_fingerprint
    );
    for act in &report.activities {
        println!(
            "  {:<18} lr {:<5} val F1 {:.4}  vocabulary {:>4}  trees {:>3}",
            act.activity.as_str(),
            act.learning_rate,
            act.val_f1,
            act.vocabulary_size,
            act.trees
        );
    }
    println!("wrote {} and {}", artifact.display(), report_path.display());
    Ok(())
}

fn eval(a: EvalArgs) -> Result<(), Failure> {
    let models = load_model(&a.model.model)?;
    let mut ds = load_dataset(&a.input)?;
    if let Some(spec) = &a.blocklist {
        let blocklist = if spec == "default" {
            Blocklist::kaggle()
        } else {
            let text = std::fs::read_to_string(spec)
                .with_context(|| format!("cannot read blocklist {spec}"))
                .exit(EXIT_IO)?;
            Blocklist::parse(&text).exit(EXIT_USAGE)?
        };
        let before = ds.len();
        ds = blocklist.apply(&ds);
        println!("blocklist removed {} of {before} cells", before - ds.len());
    }
    let cfg = PipelineConfig {
        routing: a.routing.into(),
        ..PipelineConfig::default()
    };
    let rows: Vec<CellClassification> = ds
        .records
        .par_iter()
        .map(|r| classify_parts(&r.source, r.output_type_set(), &r.output_text, &models, &cfg))
        .collect();
    let pred: Vec<_> = rows.iter().map(|r| r.labels.clone()).collect();
    let gold: Vec<_> = ds.records.iter().map(|r| r.labels.clone()).collect();
    let report = evaluate(&pred, &gold).exit(EXIT_USAGE)?;

    print!("{}", label_distribution(&ds).render());
    println!();
    print!("{}", report.render_table());
    if let Some(dir) = &a.output_dir {
        let path = dir.join("metrics.json");
        write_atomic(
            &path,
            &(serde_json::to_string_pretty(&report.to_json()).exit(EXIT_IO)? + "\n"),
        )
        .exit(EXIT_IO)?;
        println!("wrote {}", path.display());
        if a.export_table {
            let table: Vec<_> = rows
                .iter()
                .zip(&ds.records)
                .enumerate()
                .map(|(i, (row, r))| {
                    let mut v = row.to_json();
                    v["stable_index"] = i.into();
                    v["gold"] = serde_json::to_value(&r.labels).expect("labels serialize");
                    v
                })
                .collect();
            let path = dir.join("predictions.json");
            write_atomic(
                &path,
                &(serde_json::to_string_pretty(&table).exit(EXIT_IO)? + "\n"),
            )
            .exit(EXIT_IO)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    let load_start = Instant::now();
    let models = load_model(&a.model.model)?;
    let load_s = load_start.elapsed().as_secs_f64();
    let found = discover(&a.input, Some(LABELED_SUFFIX)).exit(EXIT_IO)?;
    if found.is_empty() {
        return Err(anyhow!("no notebooks found")).exit(EXIT_IO);
    }
    let texts: Vec<String> = found
        .iter()
        .map(|f| {
            std::fs::read_to_string(&f.path).with_context(|| format!("cannot read {}", f.path.display()))
        })
        .collect::<Result<_>>()
        .exit(EXIT_IO)?;
    let cfg = PipelineConfig {
        routing: a.routing.into(),
        ..PipelineConfig::default()
    };
    let mode: AnnotationMode = a.mode.into();

    // one notebook at a time, as a user labeling a single file would
    let mut runs = 0u64;
    let start = Instant::now();
    for _ in 0..a.repeat {
        for (f, text) in found.iter().zip(&texts) {
            let nb = parse_notebook(text)
                .with_context(|| format!("{}", f.path.display()))
                .exit(EXIT_IO)?;
            let nb = strip_annotations(&nb);
            let table = classify_notebook(&nb, &models, &cfg);
            let labeled = annotate_notebook(&nb, &table, mode).exit(EXIT_IO)?;
            std::hint::black_box(serialize_notebook(&labeled));
            runs += 1;
        }
    }
    let mean = start.elapsed().as_secs_f64() / runs as f64;
    println!("notebooks:        {}", found.len());
    println!("repeats:          {}", a.repeat);
    println!("mean s/notebook:  {mean:.6}");
    println!("model load s:     {load_s:.6}");
    Ok(())
}

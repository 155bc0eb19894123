use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rvfl::bench::{run_bench, BenchOptions};
use rvfl::config::RunConfig;
use rvfl::error::{Error, Result};
use rvfl::io::{load_csv, CsvSchema, LabelColumn};
use rvfl::model_file::ModelFile;
use rvfl::report::{analyze, read_table};
use rvfl::sweep::{run_sweep, Axis, SweepOptions, SweepTable};
use rvfl::train::{run_train, TrainOptions};
use rvfl_core::select::accuracy;

/// Randomized shallow and deep RVFL networks: training, benchmarking and
/// rank statistics.
#[derive(Parser)]
#[command(name = "rvfl", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train each configured method on each dataset and save the models.
    Train {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Only this dataset.
        #[arg(long)]
        dataset: Option<String>,
        /// Only this method.
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Grid-search every method on every dataset and write results.csv.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip cells already recorded in the output directory.
        #[arg(long)]
        resume: bool,
        #[arg(long)]
        parallel: Option<usize>,
        /// Stop after this many cells (for staged runs).
        #[arg(long)]
        stop_after: Option<usize>,
    },
    /// Friedman and Nemenyi tests on a results table or an accuracy matrix.
    Stats {
        /// results.csv from `bench`, or a CSV with a dataset column followed
        /// by one accuracy column per method.
        results: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Directory for ranks.csv, significance.csv and report.md.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Accuracy over a grid of one or more hyperparameters.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        dataset: String,
        #[arg(long)]
        method: String,
        /// Comma-separated subset of L, N, C, nu.
        #[arg(long, value_delimiter = ',', required = true)]
        axes: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        parallel: Option<usize>,
    },
    /// Predict labels for a delimited file with a saved model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Label column: index, header name, `first` or `last`.
        #[arg(long, default_value = "last")]
        label: String,
        #[arg(long)]
        header: bool,
        #[arg(long, default_value_t = ',')]
        delimiter: char,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            config,
            out,
            dataset,
            method,
            seed,
            parallel,
        } => {
            let cfg = RunConfig::load(&config)?;
            let opts = TrainOptions {
                dataset,
                method,
                seed,
                out,
                parallel,
            };
            for t in run_train(&cfg, &opts)? {
                let acc = t.row.test_accuracy.map_or_else(|| "-".into(), |a| format!("{a:.4}"));
                println!("{} / {}: test accuracy {acc} -> {}", t.row.dataset, t.row.method, t.model_path.display());
            }
        }
        Command::Bench {
            config,
            out,
            resume,
            parallel,
            stop_after,
        } => {
            let cfg = RunConfig::load(&config)?;
            let opts = BenchOptions {
                out,
                resume,
                parallel,
                stop_after,
                quiet: false,
            };
            let s = run_bench(&cfg, &opts)?;
            println!(
                "{} cells run, {} resumed, {} failed{} -> {}",
                s.ran,
                s.skipped,
                s.failed,
                if s.finished { "" } else { " (stopped early)" },
                s.results.display()
            );
        }
        Command::Stats { results, alpha, out } => {
            let report = analyze(read_table(&results)?, alpha)?;
            for p in report.write(&out)? {
                println!("{}", p.display());
            }
            print!("{}", report.markdown());
        }
        Command::Sweep {
            config,
            dataset,
            method,
            axes,
            out,
            parallel,
        } => {
            let cfg = RunConfig::load(&config)?;
            let axes: Vec<Axis> = axes.iter().map(|a| a.parse()).collect::<Result<_>>()?;
            let opts = SweepOptions {
                dataset,
                method,
                axes,
                out,
                parallel,
            };
            let table = run_sweep(&cfg, &opts)?;
            let dir = opts.out.clone().unwrap_or_else(|| cfg.out.clone());
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            let path = dir.join(SweepTable::file_name(&opts.dataset, &opts.method, &table.axes));
            std::fs::write(&path, table.to_csv()?).map_err(|e| Error::io(&path, e))?;
            println!("{} points -> {}", table.points.len(), path.display());
        }
        Command::Predict {
            model,
            data,
            label,
            header,
            delimiter,
        } => {
            let file = ModelFile::load(&model)?;
            let label = match label.parse() {
                Ok(i) => LabelColumn::Index(i),
                Err(_) => LabelColumn::Name(label),
            };
            let schema = CsvSchema {
                label,
                header,
                delimiter,
            };
            let (ds, names) = load_csv(&data, &schema)?;
            if ds.n_features() != file.model.input_dim() {
                return Err(Error::Config(format!(
                    "model expects {} features, {} has {}",
                    file.model.input_dim(),
                    data.display(),
                    ds.n_features()
                )));
            }
            let pred = file.predict_raw(ds.x())?;
            // map the file's labels into the model's class ids by name
            let truth: Option<Vec<usize>> = ds
                .labels()
                .iter()
                .map(|&l| file.class_names.iter().position(|c| *c == names[l]))
                .collect();
            for &l in &pred.labels {
                println!("{}", file.class_names.get(l).map_or_else(|| l.to_string(), Clone::clone));
            }
            if let Some(t) = truth {
                eprintln!("accuracy {:.4}", accuracy(&t, &pred.labels)?);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

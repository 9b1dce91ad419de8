use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crverify::constraints::RowForm;
use crverify::frames::APPENDIX_RNG_RANGE;
use crverify::rank::DEFAULT_PRIME_COUNT;
use crverify::report::Status;
use crverify::suites::{run_all, run_suite, Config, FrameMode, Suite, DEFAULT_MAX_EXTRA_BATCHES};

#[derive(Parser, Debug)]
#[command(name = "crverify", version)]
#[command(about = "Exact dimension counts for CR conditions on G2 and Spin(7) structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite
    Verify {
        #[command(subcommand)]
        suite: SuiteCommand,
    },
}

#[derive(Subcommand, Debug)]
enum SuiteCommand {
    /// Dimension of the algebraic curvature tensors on R^n
    AcDim {
        /// Dimension of the underlying space
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[command(flatten)]
        opts: Opts,
    },
    /// First CR condition for the 2-fold cross product on R^7
    Cr1G2(Opts),
    /// First CR condition for the 3-fold cross product on R^8
    Cr1Spin7(Opts),
    /// Intrinsic torsion space of G2 on R^7
    TorsionG2(Opts),
    /// Second CR condition on the G2 torsion space
    Cr2G2(Opts),
    /// Second CR condition on the Spin(7) torsion space
    Cr2Spin7(Opts),
    /// The commutator identity used to reduce Spin(7) to G2
    Red2(Opts),
    /// Every suite in turn
    All(Opts),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Frames {
    Lemma,
    AppendixCompat,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Form {
    Reduced,
    Full,
}

#[derive(Args, Debug)]
struct Opts {
    /// Seed of all random draws
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Number of random frames for the suite's sampled conditions
    #[arg(long)]
    samples: Option<usize>,

    /// Number of random triples for the torsion space under a second CR condition
    #[arg(long)]
    aux_samples: Option<usize>,

    /// Number of 31-bit primes to eliminate modulo
    #[arg(long, default_value_t = DEFAULT_PRIME_COUNT)]
    primes: usize,

    /// Random point coordinates are drawn from 0..=r
    #[arg(long, conflicts_with = "appendix_rng_range")]
    rng_range: Option<u32>,

    /// Draw coordinates from {0, 1} as the legacy frame construction does
    #[arg(long)]
    appendix_rng_range: bool,

    /// Certify the nullity exactly (the default)
    #[arg(long, overrides_with = "no_certify")]
    certify: bool,

    /// Report modular bounds only
    #[arg(long)]
    no_certify: bool,

    /// How Hermitian frames are built
    #[arg(long, value_enum, default_value_t = Frames::Lemma)]
    frames: Frames,

    /// Write the final system as MatrixMarket text
    #[arg(long, value_name = "PATH")]
    dump_system: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Output::Text)]
    output: Output,

    /// Extra sample batches allowed while the nullity settles
    #[arg(long, default_value_t = DEFAULT_MAX_EXTRA_BATCHES)]
    max_extra_batches: usize,

    /// Write sampled rows over all variables instead of symmetry classes
    #[arg(long, value_enum, default_value_t = Form::Reduced)]
    row_form: Form,
}

impl Opts {
    fn config(&self, n: usize) -> Config {
        Config {
            seed: self.seed,
            samples: self.samples,
            aux_samples: self.aux_samples,
            primes: self.primes,
            rng_range: if self.appendix_rng_range { Some(APPENDIX_RNG_RANGE) } else { self.rng_range },
            certify: !self.no_certify,
            frames: match self.frames {
                Frames::Lemma => FrameMode::Lemma,
                Frames::AppendixCompat => FrameMode::AppendixCompat,
            },
            dump_system: self.dump_system.clone(),
            n,
            max_extra_batches: self.max_extra_batches,
            row_form: match self.row_form {
                Form::Reduced => RowForm::Reduced,
                Form::Full => RowForm::Full,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Status::InvalidConfig.exit_code() as u8),
            };
        }
    };
    let Command::Verify { suite } = cli.command;
    let (suite, opts, n) = match suite {
        SuiteCommand::AcDim { n, opts } => (Some(Suite::AcDim), opts, n),
        SuiteCommand::Cr1G2(o) => (Some(Suite::Cr1G2), o, 7),
        SuiteCommand::Cr1Spin7(o) => (Some(Suite::Cr1Spin7), o, 7),
        SuiteCommand::TorsionG2(o) => (Some(Suite::TorsionG2), o, 7),
        SuiteCommand::Cr2G2(o) => (Some(Suite::Cr2G2), o, 7),
        SuiteCommand::Cr2Spin7(o) => (Some(Suite::Cr2Spin7), o, 7),
        SuiteCommand::Red2(o) => (Some(Suite::Red2), o, 7),
        SuiteCommand::All(o) => (None, o, 7),
    };
    let config = opts.config(n);
    let code = match suite {
        Some(suite) => {
            let report = run_suite(suite, &config);
            emit(opts.output, report.to_text(), report.to_json());
            report.exit_code
        }
        None => {
            if config.samples.is_some() || config.aux_samples.is_some() || config.frames != FrameMode::Lemma {
                eprintln!("error: all runs every suite with its default samples and frames");
                return ExitCode::from(Status::InvalidConfig.exit_code() as u8);
            }
            if config.dump_system.is_some() {
                eprintln!("error: --dump-system needs a single suite");
                return ExitCode::from(Status::InvalidConfig.exit_code() as u8);
            }
            let report = run_all(&config);
            emit(opts.output, report.to_text(), report.to_json());
            report.exit_code
        }
    };
    ExitCode::from(code as u8)
}

fn emit(output: Output, text: String, json: String) {
    match output {
        Output::Text => print!("{text}"),
        Output::Json => println!("{json}"),
    }
}

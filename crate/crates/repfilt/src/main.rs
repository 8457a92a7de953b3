use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use repfilt::cli::{self, CommandOutput};
use repfilt::filtration::FiltrationKind;

#[derive(Parser)]
#[command(
    name = "repfilt",
    version,
    about = "Exact rank and complexity filtrations on representation and Burnside rings of finite groups"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Stage n of the modified rank filtration as a presented abelian group
    Rank {
        /// Coefficient system: burnside | complex-cyclic | real-cyclic |
        /// rational-cyclic | fp-lattices | paper:KEY | file:PATH
        #[arg(long)]
        system: String,
        /// Group spec: S3 | A4 | A5 | D5 | Cn:k | perm:deg=m;gens=...
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Stage n of the complexity filtration as a presented abelian group
    Complexity {
        #[arg(long)]
        system: String,
        #[arg(long)]
        group: String,
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Run every embedded expected value and print PASS/FAIL per row
    PaperTables {
        /// Only run rows whose id contains this substring
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Partition lattices and decomposition posets of F_q^n
    Poset {
        /// Partition lattice of a set with this many points
        #[arg(long)]
        partitions: Option<usize>,
        /// Field size (prime) for the decomposition poset
        #[arg(long)]
        q: Option<u32>,
        /// Dimension for the decomposition poset
        #[arg(long)]
        n: Option<usize>,
        /// List the poset elements
        #[arg(long)]
        list: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Verify that complete subgroups fix exactly the coarsenings
    CheckLemma {
        #[arg(long)]
        q: u32,
        #[arg(long)]
        n: usize,
        /// Run even where the hypothesis (odd q) fails, to exhibit the
        /// known counterexample
        #[arg(long)]
        force: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Run every identity check of a coefficient system over a group
    Validate {
        #[arg(long)]
        system: String,
        #[arg(long)]
        group: String,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
}

fn emit(out: CommandOutput, format: OutputFormat, started: Instant) -> i32 {
    match format {
        OutputFormat::Json => print!("{}", out.report.to_json()),
        OutputFormat::Text => {
            print!("{}", out.text);
            eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
        }
    }
    out.exit
}

fn main() {
    let args = Args::parse();
    let threads = std::env::var("REPFILT_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok());
    let started = Instant::now();
    let code = cli::with_threads(threads, move || {
        let run = |result: Result<CommandOutput, cli::CliError>, format: OutputFormat| match result
        {
            Ok(out) => emit(out, format, started),
            Err(e) => {
                eprintln!("error: {}", e.message());
                e.exit()
            }
        };
        match args.command {
            Command::Rank {
                system,
                group,
                n,
                format,
            } => run(
                cli::cmd_filtration(FiltrationKind::Rank, &system, &group, n),
                format,
            ),
            Command::Complexity {
                system,
                group,
                n,
                format,
            } => run(
                cli::cmd_filtration(FiltrationKind::Complexity, &system, &group, n),
                format,
            ),
            Command::PaperTables { filter, format } => {
                run(cli::cmd_paper_tables(filter.as_deref()), format)
            }
            Command::Poset {
                partitions,
                q,
                n,
                list,
                format,
            } => run(cli::cmd_poset(partitions, q, n, list), format),
            Command::CheckLemma {
                q,
                n,
                force,
                format,
            } => run(cli::cmd_check_lemma(q, n, force), format),
            Command::Validate {
                system,
                group,
                format,
            } => run(cli::cmd_validate(&system, &group), format),
        }
    });
    std::process::exit(code);
}

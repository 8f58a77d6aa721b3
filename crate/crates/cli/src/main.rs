mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "floordiag", version, about = "Exact plane-curve counts from labeled floor diagrams")]
struct Cli {
    /// Directory for persisted diagram enumerations.
    #[arg(long, global = true, env = "FLOORDIAG_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "FLOORDIAG_THREADS")]
    threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Print timing and cache information to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List labeled floor diagrams of a given degree and genus (or cogenus).
    Enumerate(EnumerateArgs),
    /// Count (and optionally list) the markings of one diagram.
    Markings(MarkingsArgs),
    /// Gromov–Witten, Severi, relative and Welschinger numbers.
    Invariant {
        #[command(subcommand)]
        kind: InvariantKind,
    },
    /// Node polynomials, templates and the A_j polynomials.
    Nodepoly(NodepolyArgs),
    /// The maximal-tangency sequence and its differential equation.
    Sequence {
        #[command(subcommand)]
        kind: SequenceKind,
    },
    /// The bijection between genus-0 diagrams and labeled trees.
    Bijection {
        #[command(subcommand)]
        kind: BijectionKind,
    },
    /// Cayley, alternating-tree and odd-diagram counts.
    Counts(CountsArgs),
    /// Tropical curves through vertically stretched configurations.
    Tropical {
        #[command(subcommand)]
        kind: TropicalKind,
    },
    /// Draw a diagram, a marked diagram or a tropical sketch as SVG.
    Render(RenderArgs),
    /// Recompute the bundled reference tables and report differences.
    VerifyTables(VerifyArgs),
}

fn degree() -> clap::builder::RangedI64ValueParser<u32> {
    clap::value_parser!(u32).range(1..)
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long, value_parser = degree())]
    d: u32,
    #[arg(long, visible_alias = "genus", conflicts_with = "delta", required_unless_present = "delta")]
    g: Option<u32>,
    /// Cogenus; includes disconnected diagrams.
    #[arg(long)]
    delta: Option<u32>,
    /// odd, simple, max-weight=N, last-sinks=K, contains=(s,t,w);..., chain=A,B
    #[arg(long = "filter")]
    filters: Vec<String>,
    /// Print only the number of diagrams.
    #[arg(long)]
    count: bool,
}

#[derive(Args, Debug)]
struct MarkingsArgs {
    /// Diagram text, e.g. 'd=3; edges=(1,2,1);(2,3,1)', or its JSON form.
    #[arg(long)]
    diagram: String,
    #[arg(long)]
    lambda: Option<String>,
    /// Defaults to 1^d, giving ordinary markings.
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    list: bool,
    /// Also count by exhaustive search (small diagrams only).
    #[arg(long)]
    oracle: bool,
}

#[derive(Subcommand, Debug)]
enum InvariantKind {
    Gw(GwArgs),
    Severi(SeveriArgs),
    Relative(RelativeArgs),
    Welschinger(WelschingerArgs),
}

#[derive(Args, Debug)]
struct TableArgs {
    /// Print the whole table for degrees 1..=max-d instead of one value.
    #[arg(long)]
    table: bool,
    #[arg(long, default_value_t = 5, value_parser = degree())]
    max_d: u32,
    #[arg(long, default_value_t = 6)]
    max_g: u32,
}

#[derive(Args, Debug)]
struct GwArgs {
    #[arg(long, value_parser = degree(), required_unless_present = "table")]
    d: Option<u32>,
    #[arg(long, required_unless_present = "table")]
    g: Option<u32>,
    #[command(flatten)]
    table: TableArgs,
}

#[derive(Args, Debug)]
struct SeveriArgs {
    #[arg(long, value_parser = degree(), required_unless_present = "table")]
    d: Option<u32>,
    #[arg(long, required_unless_present = "table")]
    delta: Option<u32>,
    #[command(flatten)]
    table: TableArgs,
}

#[derive(Args, Debug)]
struct RelativeArgs {
    #[arg(long, value_parser = degree())]
    d: u32,
    #[arg(long, default_value_t = 0)]
    g: u32,
    #[arg(long, default_value = "")]
    lambda: String,
    #[arg(long, default_value = "")]
    rho: String,
}

#[derive(Args, Debug)]
struct WelschingerArgs {
    #[arg(long, value_parser = degree())]
    d: u32,
}

#[derive(Args, Debug)]
struct NodepolyArgs {
    #[arg(long, default_value_t = 1)]
    delta: u32,
    /// Also print A_1..A_delta.
    #[arg(long)]
    aj: bool,
    /// List the templates of this cogenus with their statistics.
    #[arg(long)]
    templates: bool,
    /// Evaluate at this degree, alongside the template sum.
    #[arg(long = "eval", value_parser = degree())]
    eval_d: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum SequenceKind {
    /// z(d) and d·z(d) for d = 1..=max-d.
    Z {
        #[arg(long, default_value_t = 16, value_parser = degree())]
        max_d: u32,
    },
    /// Series coefficients and the exact residual of the differential equation.
    OdeCheck {
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
        order: u32,
    },
}

#[derive(Subcommand, Debug)]
enum BijectionKind {
    ToTree {
        #[arg(long)]
        diagram: String,
    },
    ToDiagram {
        /// Tree text, e.g. 'd=4; edges=1-2,2-3,1-4'.
        #[arg(long)]
        tree: String,
    },
}

#[derive(Args, Debug)]
struct CountsArgs {
    #[arg(long, default_value_t = 6, value_parser = degree())]
    d: u32,
    /// Also compare underlying trees of genus-0 diagrams with alternating trees.
    #[arg(long)]
    trees: bool,
}

#[derive(Subcommand, Debug)]
enum TropicalKind {
    /// Build the curve for one marked diagram.
    Reconstruct {
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        marking: String,
        /// Configuration seed; 0 is the fixed grid.
        #[arg(long, default_value_t = 0)]
        config: u64,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Every curve of degree d and genus g through one configuration.
    Gallery {
        #[arg(long, value_parser = degree())]
        d: u32,
        #[arg(long, default_value_t = 0)]
        g: u32,
        #[arg(long, default_value_t = 0)]
        config: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct RenderArgs {
    #[arg(long)]
    diagram: String,
    #[arg(long)]
    marking: Option<String>,
    /// Draw the tropical curve for the marking instead of the marked diagram.
    #[arg(long, requires = "marking")]
    sketch: bool,
    #[arg(long, default_value_t = 0)]
    config: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Repeatable; all suites when absent.
    #[arg(long = "suite", value_enum)]
    suites: Vec<SuiteArg>,
    #[arg(long, value_parser = degree())]
    max_d: Option<u32>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Gw,
    Severi,
    Relative,
    Tangency,
    Catalog,
    Templates,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::io::Read;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fintop::gallery::{self, GalleryItem};
use fintop::{parse_document, Document, RemovalOrder, SliceMap, DEFAULT_GUARD};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod report;

use report::Report;

/// Exit code for unreadable or invalid input and usage errors.
const INPUT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(
    name = "fintop",
    version,
    about = "Finite T0-spaces as posets: beat points, cores, Grothendieck fibrations and Hurewicz verdicts",
    after_help = "Inputs are file paths, `-` for standard input, or `gallery:<id>`.\n\
                  Exit codes: 0 fibration / property holds, 1 not a fibration / property fails, \
                  2 unknown or undecided, 3 input error."
)]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Include per-component details and every failing pair.
    #[arg(short, long, global = true)]
    verbose: bool,
    /// Largest hom-poset enumerated before giving up.
    #[arg(long, global = true, default_value_t = DEFAULT_GUARD)]
    guard: usize,
    /// Shuffle beat-point removal order with this seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Node budget for isomorphism searches.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarise a poset, map or functor document.
    Info { input: String },
    /// Run one analysis on a document.
    Check {
        #[arg(value_enum)]
        which: Check,
        input: String,
        /// Largest retract tried when no other certificate applies (hurewicz only).
        #[arg(long, default_value_t = 0)]
        retract_search: usize,
    },
    /// Build the Grothendieck construction of a functor and its projection.
    Construct { input: String },
    /// Built-in examples.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Subcommand)]
enum GalleryAction {
    /// List entries with their recorded outcomes.
    List,
    /// Write the documents of one entry.
    Emit { id: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Open,
    Closed,
    Groth,
    Bundle,
    Hurewicz,
    Core,
    MapCore,
    Necessary,
}

pub struct Settings {
    pub verbose: bool,
    pub guard: usize,
    pub budget: u64,
    pub seed: Option<u64>,
}

impl Settings {
    /// Removal order for a space with `n` points.
    pub fn order(&self, n: usize) -> RemovalOrder {
        match self.seed {
            None => RemovalOrder::LowestIndex,
            Some(seed) => {
                let mut rank: Vec<usize> = (0..n).collect();
                rank.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                RemovalOrder::Ranked(rank)
            }
        }
    }
}

fn load(input: &str) -> Result<Document> {
    if let Some(id) = input.strip_prefix("gallery:") {
        let entry = gallery::lookup(id)?;
        return Ok(match entry.item {
            GalleryItem::Poset(p) => Document::Poset(p),
            GalleryItem::Map(m) => Document::Map(m.map().clone()),
        });
    }
    let text = if input == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .context("reading standard input")?;
        s
    } else {
        std::fs::read_to_string(input).with_context(|| format!("reading {input}"))?
    };
    parse_document(&text).with_context(|| format!("parsing {input}"))
}

fn slice(doc: Document) -> Result<SliceMap> {
    match doc {
        Document::Map(m) => Ok(SliceMap::new(m)?),
        other => bail!("expected a map document, found a {}", other.kind()),
    }
}

fn run(cli: Cli) -> Result<Report> {
    let settings = Settings {
        verbose: cli.verbose,
        guard: cli.guard,
        budget: cli.budget,
        seed: cli.seed,
    };
    match cli.command {
        Command::Info { input } => Ok(report::info(&load(&input)?)),
        Command::Check {
            which,
            input,
            retract_search,
        } => {
            let doc = load(&input)?;
            match which {
                Check::Core => report::core(&doc, &settings),
                Check::Open => Ok(report::open(&slice(doc)?, false)),
                Check::Closed => Ok(report::open(&slice(doc)?, true)),
                Check::Groth => Ok(report::groth(&slice(doc)?, &settings)),
                Check::Bundle => report::bundle(&slice(doc)?, &settings),
                Check::Hurewicz => report::hurewicz(&slice(doc)?, &settings, retract_search),
                Check::MapCore => Ok(report::map_core(&slice(doc)?, &settings)),
                Check::Necessary => report::necessary(&slice(doc)?),
            }
        }
        Command::Construct { input } => match load(&input)? {
            Document::Functor(d) => report::construct(&d),
            other => bail!("expected a functor document, found a {}", other.kind()),
        },
        Command::Gallery { action } => match action {
            GalleryAction::List => Ok(report::gallery_list()),
            GalleryAction::Emit { id } => report::gallery_emit(&gallery::lookup(&id)?),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(INPUT_ERROR)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let json = cli.json;
    match run(cli) {
        Ok(r) => {
            if json {
                println!("{}", serde_json::to_string_pretty(&r.json).expect("values serialize"));
            } else {
                print!("{}", r.text);
            }
            ExitCode::from(r.code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

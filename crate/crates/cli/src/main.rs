//! `nestkey` command-line tool.
//!
//! Exit codes: 0 success, 2 usage, 3 domain error, 4 I/O.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nestkey::bench::{run_workload, BenchError, Shape, Workload};
use nestkey::oracle::{trop_eval, OracleError};
use nestkey::store::{emit_sql_predicate, PredicateKind, SqlColumns};
use nestkey::{
    apply_relocation, child_key, decode_key, encode_path, next_sibling_key, relocation_map,
    KeyError, NodeKey, NodeRecord, StoreError, TreePath, TreeStore,
};
use num_bigint::BigUint;
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "nestkey",
    version,
    about = "Rational nested-set keys for tree hierarchies"
)]
struct Cli {
    /// Store file used by insert, move, list and subtree.
    #[arg(long, global = true)]
    store: Option<PathBuf>,

    /// Seed for bench.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Tsv,
}

/// Nodes are given either as a key (`nv/dv:snv/sdv`) or as a dotted path;
/// an empty path names the super-root.
#[derive(Debug, Subcommand)]
enum Command {
    /// Print the key of a dotted path, e.g. `2.4.3`.
    Encode { path: TreePath },
    /// Print the path and ancestor chain of the node keyed `nv/dv`.
    Decode {
        #[arg(value_parser = parse_uint)]
        nv: BigUint,
        #[arg(value_parser = parse_uint)]
        dv: BigUint,
    },
    /// Print the key of the c-th child of a node.
    Child {
        node: String,
        #[arg(value_parser = parse_uint)]
        ordinal: BigUint,
    },
    /// Print the key of a node's next sibling.
    Sibling { node: String },
    /// Print the ancestor keys of a node, top level first.
    Ancestors { node: String },
    /// Append a child under `parent` in the store.
    Insert { parent: String, payload: String },
    /// Move the n-th child of `from` to be the m-th child of `to`.
    Move {
        from: String,
        #[arg(value_parser = parse_uint)]
        n: BigUint,
        to: String,
        #[arg(value_parser = parse_uint)]
        m: BigUint,
    },
    /// Print every record in the store in key order.
    List,
    /// Print the records below a node.
    Subtree { node: String },
    /// Emit a SQL filter for the ancestors or descendants of a node.
    Sqlpred {
        kind: PredicateKind,
        node: String,
        #[arg(long, default_value = "nv")]
        nv_col: String,
        #[arg(long, default_value = "dv")]
        dv_col: String,
        #[arg(long, default_value = "snv")]
        snv_col: String,
        #[arg(long, default_value = "sdv")]
        sdv_col: String,
    },
    /// Print the map moving child n of `from` to child m of `to`, and apply
    /// it to any keys given.
    Relocate {
        from: String,
        #[arg(value_parser = parse_uint)]
        n: BigUint,
        to: String,
        #[arg(value_parser = parse_uint)]
        m: BigUint,
        keys: Vec<String>,
    },
    /// Compare write costs of left/right values and rational keys.
    Bench {
        #[arg(long, default_value_t = 1000)]
        inserts: usize,
        #[arg(long, default_value_t = 0)]
        moves: usize,
        #[arg(long, default_value = "uniform")]
        shape: Shape,
    },
    /// Print a reproduction table.
    Demo { name: Demo },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Demo {
    Figures,
    Tropashko,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Domain(String),

    #[error("{0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<KeyError> for CliError {
    fn from(e: KeyError) -> Self {
        match e {
            KeyError::Parse { .. } | KeyError::InvalidOrdinal(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Key(k) => k.into(),
            StoreError::Io(_) | StoreError::Format { .. } => CliError::Io(e.to_string()),
            StoreError::BadColumn(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::InvalidSpec(_) => CliError::Usage(e.to_string()),
            BenchError::Store(s) => s.into(),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Domain(e.to_string())
    }
}

fn parse_uint(s: &str) -> Result<BigUint, String> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected a non-negative integer, got {s:?}"));
    }
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_node(text: &str) -> Result<NodeKey, CliError> {
    if text.contains('/') {
        Ok(text.parse()?)
    } else {
        Ok(encode_path(&text.parse()?))
    }
}

fn require_store(store: &Option<PathBuf>) -> Result<&Path, CliError> {
    store
        .as_deref()
        .ok_or_else(|| CliError::Usage("this command needs --store <path>".into()))
}

fn load_existing(path: &Path) -> Result<TreeStore, CliError> {
    TreeStore::load(path).map_err(|e| match e {
        StoreError::Io(io) => CliError::Io(format!("{}: {io}", path.display())),
        other => other.into(),
    })
}

fn load_or_new(path: &Path) -> Result<TreeStore, CliError> {
    if path.exists() {
        load_existing(path)
    } else {
        Ok(TreeStore::new())
    }
}

fn path_of(key: &NodeKey) -> TreePath {
    if key.is_root() {
        TreePath::root()
    } else {
        key.path()
    }
}

fn key_row(out: &mut String, format: Format, path: &TreePath, key: &NodeKey) {
    match format {
        Format::Text => {
            let _ = writeln!(out, "{key}");
        }
        Format::Tsv => {
            let _ = writeln!(
                out,
                "{path}\t{}\t{}\t{}\t{}",
                key.nv(),
                key.dv(),
                key.snv(),
                key.sdv()
            );
        }
    }
}

fn record_rows(out: &mut String, format: Format, records: &[NodeRecord]) {
    for record in records {
        match format {
            Format::Text => {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}",
                    path_of(&record.key),
                    record.key,
                    record.payload
                );
            }
            Format::Tsv => {
                out.push_str(&nestkey::store::format::encode_record(record));
                out.push('\n');
            }
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let mut out = String::new();
    let format = cli.format;
    match cli.command {
        Command::Encode { path } => {
            if path.is_empty() {
                return Err(CliError::Usage("encode needs a non-empty path".into()));
            }
            key_row(&mut out, format, &path, &encode_path(&path));
        }
        Command::Decode { nv, dv } => {
            let decoded = decode_key(&nv, &dv)?;
            match format {
                Format::Text => {
                    let _ = writeln!(out, "{}", decoded.path);
                    for key in &decoded.chain {
                        let _ = writeln!(out, "{}/{}", key.nv(), key.dv());
                    }
                }
                Format::Tsv => {
                    for key in &decoded.chain {
                        key_row(&mut out, format, &key.path(), key);
                    }
                }
            }
        }
        Command::Child { node, ordinal } => {
            let parent = parse_node(&node)?;
            let child = child_key(&parent, ordinal)?;
            key_row(&mut out, format, &path_of(&child), &child);
        }
        Command::Sibling { node } => {
            let sibling = next_sibling_key(&parse_node(&node)?)?;
            key_row(&mut out, format, &path_of(&sibling), &sibling);
        }
        Command::Ancestors { node } => {
            let key = parse_node(&node)?;
            if !key.is_root() {
                for anc in decode_key(key.nv(), key.dv())?.ancestors() {
                    key_row(&mut out, format, &anc.path(), anc);
                }
            }
        }
        Command::Insert { parent, payload } => {
            let file = require_store(&cli.store)?;
            let mut store = load_or_new(file)?;
            let record = store.insert_child(&parse_node(&parent)?, payload)?;
            store.save(file)?;
            record_rows(&mut out, format, &[record]);
        }
        Command::Move { from, n, to, m } => {
            let file = require_store(&cli.store)?;
            let mut store = load_existing(file)?;
            let moved = store.move_subtree(&parse_node(&from)?, n, &parse_node(&to)?, m)?;
            store.save(file)?;
            let _ = writeln!(out, "{moved}");
        }
        Command::List => {
            let store = load_existing(require_store(&cli.store)?)?;
            record_rows(&mut out, format, &store.iter().collect::<Vec<_>>());
        }
        Command::Subtree { node } => {
            let store = load_existing(require_store(&cli.store)?)?;
            record_rows(&mut out, format, &store.subtree(&parse_node(&node)?));
        }
        Command::Sqlpred {
            kind,
            node,
            nv_col,
            dv_col,
            snv_col,
            sdv_col,
        } => {
            let columns = SqlColumns {
                nv: nv_col,
                dv: dv_col,
                snv: snv_col,
                sdv: sdv_col,
            };
            let _ = writeln!(
                out,
                "{}",
                emit_sql_predicate(kind, &parse_node(&node)?, &columns)?
            );
        }
        Command::Relocate {
            from,
            n,
            to,
            m,
            keys,
        } => {
            let map = relocation_map(&parse_node(&from)?, n, &parse_node(&to)?, m)?;
            let _ = writeln!(out, "{map}");
            for text in keys {
                let moved = apply_relocation(&map, &parse_node(&text)?)?;
                key_row(&mut out, format, &path_of(&moved), &moved);
            }
        }
        Command::Bench {
            inserts,
            moves,
            shape,
        } => {
            let report = run_workload(&Workload {
                inserts,
                moves,
                shape,
                seed: cli.seed,
            })?;
            match format {
                Format::Tsv => out.push_str(&report.to_tsv()),
                Format::Text => {
                    let _ = writeln!(
                        out,
                        "{:<9} {:<6} {:>6} {:>10} {:>9} {:>8}",
                        "encoding", "op", "ops", "rows", "mean", "max"
                    );
                    for ((encoding, op), s) in &report.stats {
                        let _ = writeln!(
                            out,
                            "{:<9} {:<6} {:>6} {:>10} {:>9.3} {:>8}",
                            encoding.to_string(),
                            op.to_string(),
                            s.ops,
                            s.rows_total,
                            s.mean(),
                            s.rows_max
                        );
                    }
                    if let Some((depth, bits)) = report.nv_bits_by_depth.iter().next_back() {
                        let _ = writeln!(out, "deepest level {depth}: nv up to {bits} bits");
                    }
                }
            }
        }
        Command::Demo { name } => match name {
            Demo::Figures => demo_figures(&mut out, format),
            Demo::Tropashko => demo_tropashko(&mut out, format)?,
        },
    }
    Ok(out)
}

fn demo_figures(out: &mut String, format: Format) {
    let rows: [&[u64]; 8] = [
        &[2],
        &[2, 1],
        &[2, 2],
        &[2, 3],
        &[2, 4],
        &[2, 4, 1],
        &[2, 4, 2],
        &[2, 4, 3],
    ];
    for ordinals in rows {
        let path = TreePath::from_ordinals(ordinals).expect("ordinals are positive");
        let k = encode_path(&path);
        let (nv, dv, snv, sdv) = (k.nv(), k.dv(), k.snv(), k.sdv());
        let _ = match format {
            Format::Text => writeln!(out, "{:<5}  {nv} {dv} {snv} {sdv}", path.to_string()),
            Format::Tsv => writeln!(out, "{path}\t{nv}\t{dv}\t{snv}\t{sdv}"),
        };
    }
}

fn demo_tropashko(out: &mut String, format: Format) -> Result<(), CliError> {
    let rows: [(&str, [&[u64]; 3]); 2] = [
        ("3", [&[2, 4, 3], &[2, 4, 4], &[2, 4, 5]]),
        ("4", [&[2, 4, 3, 3], &[2, 4, 3, 4], &[2, 4, 3, 5]]),
    ];
    for (level, paths) in rows {
        let mut values = Vec::new();
        for ordinals in paths {
            values.push(trop_eval(
                &TreePath::from_ordinals(ordinals).expect("positive"),
            )?);
        }
        let (op, verdict) = if values.windows(2).all(|w| w[0] < w[1]) {
            ("<", "increasing")
        } else if values.windows(2).all(|w| w[0] > w[1]) {
            (">", "decreasing")
        } else {
            ("?", "unordered")
        };
        let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        let _ = match format {
            Format::Text => writeln!(
                out,
                "level {level}: {}  {verdict}",
                shown.join(&format!(" {op} "))
            ),
            Format::Tsv => writeln!(out, "{level}\t{}\t{verdict}", shown.join("\t")),
        };
    }
    let first_child = trop_eval(&TreePath::from_ordinals(&[2, 4, 3, 1]).expect("positive"))?;
    let sibling = trop_eval(&TreePath::from_ordinals(&[2, 4, 4]).expect("positive"))?;
    let collision = if first_child == sibling {
        "collide"
    } else {
        "differ"
    };
    let _ = match format {
        Format::Text => writeln!(
            out,
            "2.4.3.1 and 2.4.4: {first_child} and {sibling}  {collision}"
        ),
        Format::Tsv => writeln!(out, "collision\t{first_child}\t{sibling}\t{collision}"),
    };
    let level3 = trop_eval(&TreePath::from_ordinals(&[2, 4, 3]).expect("positive"))?;
    let _ = match format {
        Format::Text => writeln!(
            out,
            "note: 2.4.3 evaluates to {level3}; 29/18 is a misprint"
        ),
        Format::Tsv => writeln!(out, "misprint\t29/18\t{level3}"),
    };
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

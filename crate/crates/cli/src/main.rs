use std::io::{self, BufRead, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use bfnorm::search::{flat_json, trial_seed};
use bfnorm::{
    classify_normality, dual_bent, exhaustive_m5_rows, is_bent, known_class_count, normality_dim,
    parse_function, parse_permutation, random_lower_bound, scan_reader, walsh_transform,
    work_factor, BoolFun, DegreeBand, FlatTable, FlatTableCache, InputFormat, Method,
    NormalityReport, ScanOptions,
};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

/// Degree, relative degree and normality of Boolean functions.
#[derive(Parser, Debug)]
#[command(name = "bfnorm", version)]
struct Cli {
    /// Worker threads for batch and search; defaults to available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Degree, valuation, weight, canonical ANF and hex table of a function.
    Analyze(InputArgs),
    /// Normality verdict with a witness flat.
    Normality {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "paired")]
        method: Method,
        /// Prebuilt flat table (BFLT) to use instead of building one.
        #[arg(long)]
        flat_table: Vec<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Build a flat table and write it in BFLT format.
    Flats {
        #[arg(short, long)]
        m: usize,
        #[arg(short, long)]
        r: usize,
        /// Output path; defaults to flats_m{m}_r{r}.bflt in the table directory.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact D-table rows and brute-force work factors.
    Table {
        /// Rows r = 2, 3 of D^dagger_r(k, 5) by exhaustive scan.
        #[arg(long)]
        exhaustive_m5: bool,
        /// Work factor for "r,s,t,m".
        #[arg(long, value_name = "R,S,T,M")]
        work_factor: Option<String>,
        /// Class count for --work-factor when no published count is built in.
        #[arg(long)]
        classes: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Walsh spectrum, bentness and dual.
    Walsh {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        bent: bool,
        #[arg(long)]
        dual: bool,
        /// Print value multiplicities instead of the full spectrum.
        #[arg(long)]
        summary: bool,
    },
    /// Randomized lower bound on D_r(k, m).
    Search {
        #[arg(short, long)]
        m: usize,
        #[arg(short, long)]
        r: usize,
        #[arg(long, value_name = "S:T")]
        band: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        flat_table: Option<PathBuf>,
        /// File of base functions to which the random samples are added.
        #[arg(long)]
        base: Option<PathBuf>,
        #[arg(long, default_value = "anf")]
        format: InputFormat,
        #[arg(long)]
        permute: Option<String>,
    },
    /// Classify every function of a file (or stdin), one JSON record per line.
    Batch {
        /// Input file; stdin when absent or "-".
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(short, long)]
        m: Option<usize>,
        #[arg(long, default_value = "anf")]
        format: InputFormat,
        /// Dimensions r for the deg_r histogram, comma separated.
        #[arg(long, value_delimiter = ',')]
        dims: Vec<usize>,
        #[arg(long)]
        permute: Option<String>,
        #[arg(long, default_value = "paired")]
        method: Method,
        #[arg(long)]
        flat_table: Vec<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Function in the format given by --format; read from stdin when absent.
    function: Option<String>,
    #[arg(long, conflicts_with_all = ["function", "hex", "file"])]
    anf: Option<String>,
    #[arg(long, conflicts_with_all = ["function", "file"])]
    hex: Option<String>,
    /// Read the first function of a file.
    #[arg(long, conflicts_with = "function")]
    file: Option<PathBuf>,
    #[arg(short, long)]
    m: Option<usize>,
    #[arg(long, default_value = "anf")]
    format: InputFormat,
    /// 1-based variable renaming "p1,...,pm".
    #[arg(long)]
    permute: Option<String>,
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

impl InputArgs {
    fn load(&self) -> CliResult<BoolFun> {
        let (text, format) = if let Some(a) = &self.anf {
            (a.clone(), InputFormat::Anf)
        } else if let Some(h) = &self.hex {
            (h.clone(), InputFormat::Hex)
        } else if let Some(f) = &self.function {
            (f.clone(), self.format)
        } else {
            let line = match &self.file {
                Some(path) => first_line(io::BufReader::new(std::fs::File::open(path)?))?,
                None => first_line(io::stdin().lock())?,
            };
            (line, self.format)
        };
        let f = parse_function(&text, format, self.m)?;
        Ok(match &self.permute {
            Some(p) => f.permute_vars(&parse_permutation(p, f.m())?)?,
            None => f,
        })
    }
}

fn first_line<R: BufRead>(reader: R) -> CliResult<String> {
    for line in reader.lines() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            return Ok(t.to_string());
        }
    }
    Err("no function in input".into())
}

fn table_cache() -> FlatTableCache {
    match std::env::var_os("BFNORM_TABLE_DIR") {
        Some(dir) => FlatTableCache::with_dir(dir),
        None => FlatTableCache::new(),
    }
}

fn load_tables(cache: &FlatTableCache, paths: &[PathBuf]) -> CliResult<()> {
    for p in paths {
        cache.insert(FlatTable::load(p)?);
    }
    Ok(())
}

fn header(config: serde_json::Value) {
    eprintln!("# bfnorm {config}");
}

fn report_json(f: &BoolFun, rep: &NormalityReport) -> serde_json::Value {
    json!({
        "m": f.m(),
        "degree": f.degree(),
        "status": rep.status,
        "r": rep.r_used,
        "min_rel_degree": rep.min_rel_degree,
        "witness": rep.witness.as_ref().map(flat_json),
        "witness_degree": rep.witness_degree,
    })
}

fn run(cli: Cli) -> CliResult<()> {
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()?;
    let out = io::stdout();
    let mut out = BufWriter::new(out.lock());

    match cli.command {
        Command::Analyze(input) => {
            let f = input.load()?;
            let anf = f.anf();
            writeln!(out, "m: {}", f.m())?;
            writeln!(out, "degree: {}", f.degree())?;
            match anf.valuation() {
                Ok(v) => writeln!(out, "valuation: {v}")?,
                Err(_) => writeln!(out, "valuation: undefined")?,
            }
            writeln!(out, "weight: {}", f.weight())?;
            writeln!(out, "monomials: {}", anf.term_count())?;
            writeln!(out, "anf: {anf}")?;
            writeln!(out, "hex: {}", f.to_hex())?;
        }
        Command::Normality {
            input,
            method,
            flat_table,
            json,
        } => {
            let f = input.load()?;
            header(
                json!({"command": "normality", "m": f.m(), "r": normality_dim(f.m()), "method": method}),
            );
            let cache = table_cache();
            load_tables(&cache, &flat_table)?;
            let rep = classify_normality(&f, &cache, method)?;
            if json {
                writeln!(out, "{}", report_json(&f, &rep))?;
            } else {
                writeln!(out, "status: {}", rep.status)?;
                writeln!(out, "r: {}", rep.r_used)?;
                writeln!(out, "min_rel_degree: {}", rep.min_rel_degree)?;
                if let Some(w) = &rep.witness {
                    writeln!(out, "witness: {}", flat_json(w))?;
                }
            }
        }
        Command::Flats { m, r, output } => {
            header(json!({"command": "flats", "m": m, "r": r}));
            let table = FlatTable::build(m, r)?;
            let path = output.unwrap_or_else(|| {
                let dir =
                    std::env::var_os("BFNORM_TABLE_DIR").map_or_else(PathBuf::new, PathBuf::from);
                dir.join(FlatTableCache::file_name(m, r))
            });
            table.save(&path)?;
            writeln!(out, "m: {m}")?;
            writeln!(out, "r: {r}")?;
            writeln!(out, "spaces: {}", table.space_count())?;
            writeln!(out, "cosets_per_space: {}", table.cosets_per_space())?;
            writeln!(out, "flats: {}", table.flat_count())?;
            writeln!(out, "file: {}", path.display())?;
        }
        Command::Table {
            exhaustive_m5,
            work_factor: wf,
            classes,
            json,
        } => {
            if !exhaustive_m5 && wf.is_none() {
                return Err("table needs --exhaustive-m5 or --work-factor".into());
            }
            if let Some(spec) = wf {
                let p: Vec<usize> = spec
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| format!("bad --work-factor {spec:?}, expected r,s,t,m"))?;
                let [r, s, t, m] = p[..] else {
                    return Err(format!("bad --work-factor {spec:?}, expected r,s,t,m").into());
                };
                let n = classes
                    .or_else(|| known_class_count(s, t, m))
                    .ok_or_else(|| {
                        format!("no built-in class count for B({s},{t},{m}); pass --classes")
                    })?;
                let w = work_factor(r, s, t, m, n)?;
                writeln!(out, "{}", serde_json::to_string(&w)?)?;
            }
            if exhaustive_m5 {
                header(json!({"command": "table", "exhaustive_m5": true, "threads": threads}));
                let start = Instant::now();
                let rep = exhaustive_m5_rows()?;
                eprintln!(
                    "# scanned {} functions, {} full scans re-verified, {:.1}s",
                    rep.scanned,
                    rep.reverified,
                    start.elapsed().as_secs_f64()
                );
                if json {
                    for e in &rep.entries {
                        writeln!(out, "{}", e.to_json())?;
                    }
                } else {
                    writeln!(out, "D^dagger_r(k, 5), exact")?;
                    writeln!(out, "r\\k  1  2  3  4  5")?;
                    for r in [3, 2] {
                        let row: Vec<String> = (1..=5)
                            .map(|k| rep.entry(r, k).map_or("?".into(), |e| e.value.to_string()))
                            .collect();
                        writeln!(out, "{r}    {}", row.join("  "))?;
                    }
                }
            }
        }
        Command::Walsh {
            input,
            bent,
            dual,
            summary,
        } => {
            let f = input.load()?;
            let w = walsh_transform(&f);
            if summary {
                for (v, n) in w.multiplicities() {
                    writeln!(out, "{v}: {n}")?;
                }
            } else if !bent && !dual {
                let vals: Vec<String> = w.values.iter().map(i32::to_string).collect();
                writeln!(out, "{}", vals.join(" "))?;
            }
            if bent {
                writeln!(out, "bent: {}", is_bent(&f)?)?;
            }
            if dual {
                let d = dual_bent(&f)?;
                writeln!(out, "dual: {}", d.anf())?;
                writeln!(out, "dual_hex: {}", d.to_hex())?;
            }
        }
        Command::Search {
            m,
            r,
            band,
            trials,
            seed,
            flat_table,
            base,
            format,
            permute,
        } => {
            let band = DegreeBand::parse(&band)?;
            header(json!({
                "command": "search", "m": m, "r": r, "band": band.to_string(),
                "trials": trials, "seed": seed, "threads": threads,
                "first_trial_seed": trial_seed(seed, 0),
            }));
            let table = match flat_table {
                Some(p) => FlatTable::load(p)?,
                None => FlatTable::build(m, r)?,
            };
            let mut bases = Vec::new();
            if let Some(path) = base {
                let perm = permute.map(|p| parse_permutation(&p, m)).transpose()?;
                let opts = ScanOptions {
                    format,
                    m: Some(m),
                    ..Default::default()
                };
                let reader = io::BufReader::new(std::fs::File::open(path)?);
                for (i, line) in reader.lines().enumerate() {
                    let line = line?;
                    let t = line.trim();
                    if t.is_empty() || t.starts_with('#') {
                        continue;
                    }
                    let mut f = parse_function(t, opts.format, opts.m)
                        .map_err(|e| format!("line {}: {e}", i + 1))?;
                    if let Some(p) = &perm {
                        f = f.permute_vars(p)?;
                    }
                    bases.push(f);
                }
            }
            let entry = random_lower_bound(m, r, band, trials, seed, &table, &bases)?;
            writeln!(out, "{}", entry.to_json())?;
        }
        Command::Batch {
            file,
            m,
            format,
            dims,
            permute,
            method,
            flat_table,
        } => {
            let perm = match (&permute, m) {
                (Some(p), Some(m)) => Some(parse_permutation(p, m)?),
                (Some(_), None) => return Err("--permute needs -m".into()),
                _ => None,
            };
            header(json!({
                "command": "batch", "m": m, "format": format, "dims": dims,
                "permute": permute, "method": method, "threads": threads,
            }));
            let cache = table_cache();
            load_tables(&cache, &flat_table)?;
            let opts = ScanOptions {
                format,
                m,
                dims,
                permutation: perm,
                method,
            };
            let mut sink = |rec: &bfnorm::FunctionRecord| -> bfnorm::Result<()> {
                writeln!(out, "{}", rec.to_json())?;
                Ok(())
            };
            let dist = match file.filter(|p| p.as_os_str() != "-") {
                Some(path) => bfnorm::scan_file(path, &opts, &cache, &mut sink)?,
                None => scan_reader(io::stdin().lock(), &opts, &cache, &mut sink)?,
            };
            writeln!(out, "{}", json!({ "summary": dist }))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

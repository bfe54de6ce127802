use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use stackydeg_core::blowup::{mu_action_on_blowup, resolve_an, twisted_blowup, AnSing, BlowupParams};
use stackydeg_core::curve::to_dot;
use stackydeg_core::dvrlinalg::{smith_normal_form, Mat};
use stackydeg_core::engine::{degenerate, DegenerationInput, EngineError};
use stackydeg_core::field::RatFunc;
use stackydeg_core::scenarios::{builtin, ScenarioParams, NAMES};

const DEFAULT_MAX_DEG: usize = 64;

#[derive(Parser)]
#[command(
    name = "stackydeg",
    version,
    about = "Limits of twisted maps to torus quotients over a DVR"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Default)]
struct Outputs {
    /// Write the report JSON here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the limit dual graph in DOT format
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Write the step log as a JSON array
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Degenerate the family described by an input file
    Degen {
        input: PathBuf,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Run a built-in scenario, or an input file
    #[command(alias = "scenario")]
    Run {
        /// one of two-genus2-bridge, theta-example-1|2|3, or a path to a JSON input
        name: String,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        m: Option<u32>,
        /// second gluing exponent (theta-example-3)
        #[arg(long)]
        m2: Option<u32>,
        /// Print the expanded input instead of running it
        #[arg(long)]
        dump_input: bool,
        #[command(flatten)]
        outputs: Outputs,
    },
    /// Smith normal form of a square matrix over the local ring
    Snf { matrix: PathBuf },
    /// Numerical data of an (m,d)-twisted blow-up
    Blowup {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 1)]
        mu: u32,
    },
    /// Resolve an A-type singularity xy = z^a
    Resolve {
        #[arg(long)]
        a: u64,
        #[arg(long, default_value_t = 1)]
        mu: u32,
    },
    /// Run many input files, writing <stem>.json and <stem>.dot into a directory
    Batch {
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

/// Failure carrying its exit code.
struct Fail {
    code: u8,
    msg: String,
}

impl Fail {
    fn input(msg: impl Into<String>) -> Fail {
        Fail {
            code: 2,
            msg: msg.into(),
        }
    }

    fn engine(msg: impl Into<String>) -> Fail {
        Fail {
            code: 1,
            msg: msg.into(),
        }
    }
}

fn max_degree() -> usize {
    std::env::var("STACKYDEG_MAX_DEG")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_DEG)
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut s = String::new();
    for seg in path.iter() {
        s.push('/');
        match seg {
            Segment::Seq { index } => s.push_str(&index.to_string()),
            Segment::Map { key } => s.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => s.push_str(variant),
            Segment::Unknown => s.push('?'),
        }
    }
    s
}

fn parse_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, Fail> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let p = pointer(e.path());
        let p = if p.is_empty() { "/".to_string() } else { p };
        Fail::input(format!("{what}: error at {p}: {}", e.inner()))
    })
}

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail::input(format!("cannot read {}: {e}", path.display())))
}

/// Parse every matrix entry string with the degree cap before typed
/// deserialization, so oversized exponents are rejected without expanding them.
fn check_degree_cap(v: &Value, path: &mut Vec<String>, cap: usize) -> Result<(), Fail> {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                path.push(k.clone());
                check_degree_cap(x, path, cap)?;
                path.pop();
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                path.push(i.to_string());
                check_degree_cap(x, path, cap)?;
                path.pop();
            }
        }
        Value::String(s) if path.iter().any(|p| p == "entries") => {
            if let Err(e) = RatFunc::parse_capped(s, cap) {
                return Err(Fail::input(format!("error at /{}: {e}", path.join("/"))));
            }
        }
        _ => {}
    }
    Ok(())
}

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Fail> {
    let text = read(path)?;
    let what = path.display().to_string();
    if let Ok(v) = serde_json::from_str::<Value>(&text) {
        check_degree_cap(&v, &mut Vec::new(), max_degree()).map_err(|f| Fail::input(format!("{what}: {}", f.msg)))?;
    }
    parse_json(&text, &what)
}

fn load_input(path: &Path) -> Result<DegenerationInput, Fail> {
    load(path)
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn write(path: &Path, text: &str) -> Result<(), Fail> {
    fs::write(path, text).map_err(|e| Fail::engine(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Fail> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_input(input: &DegenerationInput, outputs: &Outputs) -> Result<(), Fail> {
    match degenerate(input) {
        Ok(out) => {
            emit(outputs.out.as_deref(), &pretty(&out))?;
            if let Some(p) = &outputs.dot {
                write(p, &to_dot(&out.limit_curve, Some(&out.limit_multidegree)))?;
            }
            if let Some(p) = &outputs.log {
                write(p, &pretty(&out.log))?;
            }
            Ok(())
        }
        Err(fail) => {
            let mut report = json!({ "error": fail.error.to_string(), "log": fail.log });
            if let EngineError::Validation(v) = &fail.error {
                report["validation"] = json!(v);
            }
            emit(outputs.out.as_deref(), &pretty(&report))?;
            if let Some(p) = &outputs.log {
                write(p, &pretty(&fail.log))?;
            }
            let code = if fail.error.is_input_error() { 2 } else { 1 };
            Err(Fail {
                code,
                msg: fail.error.to_string(),
            })
        }
    }
}

fn cmd_run(name: &str, params: ScenarioParams, dump: bool, outputs: &Outputs) -> Result<(), Fail> {
    let input = if NAMES.contains(&name) {
        builtin(name, params).map_err(Fail::input)?
    } else if Path::new(name).exists() {
        load_input(Path::new(name))?
    } else {
        return Err(Fail::input(format!(
            "'{name}' is neither a built-in scenario ({}) nor a file",
            NAMES.join(", ")
        )));
    };
    if dump {
        return emit(outputs.out.as_deref(), &pretty(&input));
    }
    run_input(&input, outputs)
}

fn cmd_snf(path: &Path) -> Result<(), Fail> {
    let m: Mat = load(path)?;
    let r = smith_normal_form(&m).map_err(|e| Fail::engine(e.to_string()))?;
    emit(None, &pretty(&r))
}

fn cmd_blowup(m: u32, d: u32, mu: u32) -> Result<(), Fail> {
    let p = BlowupParams { m, d };
    let result = twisted_blowup(p).map_err(|e| Fail::input(e.to_string()))?;
    if mu == 0 {
        return Err(Fail::input("--mu must be positive"));
    }
    let action = mu_action_on_blowup(mu, p).map_err(|e| Fail::input(e.to_string()))?;
    emit(None, &pretty(&json!({ "result": result, "action": action })))
}

fn cmd_resolve(a: u64, mu: u32) -> Result<(), Fail> {
    let s = AnSing::new(a, mu).map_err(|e| Fail::input(e.to_string()))?;
    let r = resolve_an(s).map_err(|e| Fail::input(e.to_string()))?;
    emit(None, &pretty(&json!({ "input": s, "resolution": r })))
}

fn cmd_batch(inputs: &[PathBuf], out_dir: &Path, jobs: usize) -> Result<(), Fail> {
    fs::create_dir_all(out_dir).map_err(|e| Fail::engine(format!("cannot create {}: {e}", out_dir.display())))?;
    let next = AtomicUsize::new(0);
    let worst = Mutex::new(0u8);
    std::thread::scope(|s| {
        for _ in 0..jobs.max(1) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = inputs.get(i) else { break };
                let stem = path
                    .file_stem()
                    .map_or_else(|| format!("input{i}"), |s| s.to_string_lossy().into_owned());
                let outputs = Outputs {
                    out: Some(out_dir.join(format!("{stem}.json"))),
                    dot: Some(out_dir.join(format!("{stem}.dot"))),
                    log: None,
                };
                let res = load_input(path).and_then(|inp| run_input(&inp, &outputs));
                if let Err(f) = res {
                    eprintln!("{}: {}", path.display(), f.msg);
                    let mut w = worst.lock().expect("lock");
                    *w = (*w).max(f.code);
                }
            });
        }
    });
    match worst.into_inner().expect("lock") {
        0 => Ok(()),
        code => Err(Fail {
            code,
            msg: "some inputs failed".into(),
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Degen { input, outputs } => load_input(&input).and_then(|i| run_input(&i, &outputs)),
        Cmd::Run {
            name,
            k,
            d,
            m,
            m2,
            dump_input,
            outputs,
        } => cmd_run(&name, ScenarioParams { k, d, m, m2 }, dump_input, &outputs),
        Cmd::Snf { matrix } => cmd_snf(&matrix),
        Cmd::Blowup { m, d, mu } => cmd_blowup(m, d, mu),
        Cmd::Resolve { a, mu } => cmd_resolve(a, mu),
        Cmd::Batch { inputs, out_dir, jobs } => cmd_batch(&inputs, &out_dir, jobs),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("stackydeg: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

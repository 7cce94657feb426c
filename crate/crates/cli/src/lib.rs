//! Front end for the `cofinal` binary: argument parsing, JSON inputs,
//! dispatch and the output envelope.
//!
//! Every run prints one JSON document with sorted keys:
//! `{"schema", "command", "flags", "result"}` on success or
//! `{"schema", "command", "flags", "error"}` on failure. `flags` records every
//! flag value that can influence the result, defaults included. `--jobs` and
//! `--out` are left out since they never change the output.
//!
//! Exit codes: 0 success, 1 verified-negative result, 2 input error, 3
//! resource cap.

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use cofinal::construction::approximation::default_xi;
use cofinal::construction::{
    build_approximation, check_lemma_result, extend_approximation, is_good_bounded_with,
    lemma22_trace, lemma23_trace, verify_approximation, Approximation, GoodnessConfig,
    SearchConfig, Window,
};
use cofinal::laver::{laver_audit, laver_build, laver_complete, laver_verify, LaverAudit, LaverState, Registry};
use cofinal::oracle::sweep::{Interior, SweepKnobs, SweepMode};
use cofinal::oracle::width::{char_width, GeneratedPoset, LeveledPoset};
use cofinal::oracle::sweep_colorings;
use cofinal::ramsey::{
    brute_max_homogeneous, check_homogeneous, countable_cofinal_homogeneous, covers_prefix,
    extract_end_homogeneous, extract_homogeneous, Chain, BRUTE_CHAIN_LIMIT,
};
use cofinal::{
    AnchoredPair, Color, Error, Exec, FinPoset, Label, PairColoring, PartialColoring,
    SCHEMA_VERSION,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(name = "cofinal", version, about = "Partition calculus workbench for pairs of finite sets")]
pub struct Cli {
    /// Worker threads for sweeps and goodness scans; 1 runs sequentially,
    /// 0 uses every available core.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Write the output document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug, Clone)]
pub struct WindowArgs {
    /// Window width: the ground segment is {0, …, width−1}.
    #[arg(long, default_value_t = 8)]
    pub width: u32,
    /// Labels every quantified ground must leave free.
    #[arg(long, default_value_t = 1)]
    pub reserve: u32,
    /// Largest number of maximal quantified pairs one goodness check may scan.
    #[arg(long, default_value_t = 1_000_000)]
    pub pair_cap: u128,
}

#[derive(clap::Args, Debug, Clone)]
pub struct ApproxArgs {
    #[arg(long, default_value_t = 40)]
    pub width: u32,
    #[arg(long, default_value_t = 2)]
    pub reserve: u32,
    #[arg(long, default_value_t = 1_000_000)]
    pub pair_cap: u128,
    /// Largest part whose total colorings the step searches may enumerate.
    #[arg(long, default_value_t = 16)]
    pub enum_cap: usize,
    /// Largest number of labels a step adds to its part.
    #[arg(long, default_value_t = 3)]
    pub max_extension: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ModeArg {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// End-homogeneous subsequence of a chain: {"coloring", "chain"}.
    EhExtract { input: String },
    /// Homogeneous subset of a chain via end-homogeneity: {"coloring", "chain"}.
    Homog {
        input: String,
        /// Also run the exhaustive oracle (chains up to 20 sets).
        #[arg(long)]
        brute: bool,
    },
    /// Homogeneous set along initial segments of an enumerated ground:
    /// {"coloring", "ground"?}; the ground defaults to 0, 1, 2, …
    CountableCofinal {
        input: String,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Bounded goodness of a pair: {"coloring", "pair", "f"}.
    GoodCheck {
        input: String,
        #[command(flatten)]
        window: WindowArgs,
        /// Record an extension for every maximal pair.
        #[arg(long)]
        witnesses: bool,
    },
    /// Good pair above q with an induced total coloring: {"coloring", "q"}.
    Lemma22 {
        input: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 4)]
        enum_cap: usize,
        #[arg(long, default_value_t = 3)]
        max_extension: usize,
        /// Include every rejected candidate.
        #[arg(long)]
        trace: bool,
    },
    /// As lemma22, extending f from a good p ≤ q: {"coloring", "p", "f", "q"}.
    Lemma23 {
        input: String,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value_t = 4)]
        enum_cap: usize,
        #[arg(long, default_value_t = 3)]
        max_extension: usize,
        #[arg(long)]
        trace: bool,
    },
    /// Build an approximation: {"coloring"}.
    ApproxBuild {
        input: String,
        #[command(flatten)]
        window: ApproxArgs,
        #[arg(long, default_value_t = 6)]
        depth: usize,
    },
    /// Extend an approximation by a fresh label: {"coloring", "approximation"}.
    ApproxExtend {
        input: String,
        #[command(flatten)]
        window: ApproxArgs,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Fresh label; defaults to the least label above the current ground.
        #[arg(long)]
        xi: Option<Label>,
    },
    /// Check all four approximation clauses: {"coloring", "approximation"}.
    ApproxVerify {
        input: String,
        #[arg(long, default_value_t = 40)]
        width: u32,
        #[arg(long, default_value_t = 2)]
        reserve: u32,
        #[arg(long, default_value_t = 1_000_000)]
        pair_cap: u128,
    },
    /// Run the adversarial construction on a registry.
    LaverBuild { input: String },
    /// Non-homogeneity witnesses against one registered family: {"state"}.
    LaverVerify {
        input: String,
        #[arg(long)]
        beta: Label,
        /// Color of pairs without a constraint.
        #[arg(long, default_value_t = 1)]
        default_color: u8,
    },
    /// Search every (or a sample of) coloring of a small window.
    Sweep {
        #[arg(long, default_value_t = 2)]
        width: u32,
        #[arg(long, default_value_t = 2)]
        k: u8,
        #[arg(long, value_enum, default_value = "exhaustive")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        /// "all", or the largest element size that must be dominated.
        #[arg(long, default_value = "all")]
        interior: String,
        #[arg(long, default_value_t = 1)]
        min_chain: usize,
    },
    /// Cofinal subset with few predecessors: {"poset"} or {"generator", "depth"}.
    CharWidth {
        input: String,
        #[arg(long, default_value_t = 0)]
        bound: usize,
        /// Also run the exhaustive minimization (at most 20 elements).
        #[arg(long)]
        exact: bool,
    },
}

impl Command {
    /// The input path, for commands that read one.
    pub fn input(&self) -> Option<&str> {
        match self {
            Command::EhExtract { input }
            | Command::Homog { input, .. }
            | Command::CountableCofinal { input, .. }
            | Command::GoodCheck { input, .. }
            | Command::Lemma22 { input, .. }
            | Command::Lemma23 { input, .. }
            | Command::ApproxBuild { input, .. }
            | Command::ApproxExtend { input, .. }
            | Command::ApproxVerify { input, .. }
            | Command::LaverBuild { input }
            | Command::LaverVerify { input, .. }
            | Command::CharWidth { input, .. } => Some(input),
            Command::Sweep { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::EhExtract { .. } => "eh-extract",
            Command::Homog { .. } => "homog",
            Command::CountableCofinal { .. } => "countable-cofinal",
            Command::GoodCheck { .. } => "good-check",
            Command::Lemma22 { .. } => "lemma22",
            Command::Lemma23 { .. } => "lemma23",
            Command::ApproxBuild { .. } => "approx-build",
            Command::ApproxExtend { .. } => "approx-extend",
            Command::ApproxVerify { .. } => "approx-verify",
            Command::LaverBuild { .. } => "laver-build",
            Command::LaverVerify { .. } => "laver-verify",
            Command::Sweep { .. } => "sweep",
            Command::CharWidth { .. } => "char-width",
        }
    }
}

// ---- inputs ----

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainInput {
    pub coloring: PairColoring,
    pub chain: Chain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountableInput {
    pub coloring: PairColoring,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground: Option<Vec<Label>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoodInput {
    pub coloring: PairColoring,
    pub pair: AnchoredPair,
    pub f: PartialColoring,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma22Input {
    pub coloring: PairColoring,
    pub q: AnchoredPair,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lemma23Input {
    pub coloring: PairColoring,
    pub p: AnchoredPair,
    pub f: PartialColoring,
    pub q: AnchoredPair,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColoringInput {
    pub coloring: PairColoring,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproxInput {
    pub coloring: PairColoring,
    pub approximation: Approximation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaverStateInput {
    pub state: LaverState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<LaverAudit>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PosetInput {
    Generated(GeneratedPoset),
    Flat(FlatPoset),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlatPoset {
    pub poset: FinPoset,
}

/// Parses an input document. Output envelopes are accepted too: their
/// `result` is parsed, so a command's output can feed the matching verifier.
pub fn parse_input<T: DeserializeOwned>(text: &str) -> Result<T, Error> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))?;
    let value = match value {
        Value::Object(mut m) if m.contains_key("schema") && m.contains_key("result") => {
            m.remove("result").unwrap_or(Value::Null)
        }
        v => v,
    };
    serde_json::from_value(value).map_err(|e| {
        let msg = e.to_string();
        // domain errors surface through serde with their own prefix
        Error::InvalidInput(msg.strip_prefix("invalid input: ").unwrap_or(&msg).to_string())
    })
}

// ---- running ----

pub struct Outcome {
    pub exit: i32,
    pub output: String,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded { .. } | Error::SizeLimit { .. } | Error::WindowExhausted(_) => 3,
        Error::VerificationFailure(_) | Error::ConstructionStuck { .. } => 1,
        _ => 2,
    }
}

fn envelope(command: &str, flags: Value, body: (&str, Value)) -> String {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.insert("flags".into(), flags);
    m.insert(body.0.into(), body.1);
    let mut text = serde_json::to_string_pretty(&Value::Object(m)).expect("JSON values serialize");
    text.push('\n');
    text
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("results serialize")
}

/// Parses `args` (including the program name) and runs the command. Usage
/// errors come back with exit 2 and clap's message as output.
pub fn run_args<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdin),
        Err(e) => {
            let exit = if e.use_stderr() { 2 } else { 0 };
            Outcome {
                exit,
                output: e.render().to_string(),
            }
        }
    }
}

pub fn run(cli: &Cli, stdin: &mut dyn Read) -> Outcome {
    let exec = if cli.jobs == 1 { Exec::Sequential } else { Exec::Parallel };
    let flags = flags_of(&cli.command);
    let name = cli.command.name();
    let mut piped = String::new();
    if cli.command.input() == Some("-") {
        if let Err(e) = stdin.read_to_string(&mut piped) {
            let e = Error::InvalidInput(format!("stdin: {e}"));
            return Outcome {
                exit: exit_code(&e),
                output: envelope(name, flags, ("error", json!({"kind": e.kind(), "message": e.to_string()}))),
            };
        }
    }
    let result = with_pool(cli.jobs, || dispatch(&cli.command, exec, &piped));
    match result {
        Ok((exit, value)) => Outcome {
            exit,
            output: envelope(name, flags, ("result", value)),
        },
        Err(e) => Outcome {
            exit: exit_code(&e),
            output: envelope(
                name,
                flags,
                ("error", json!({"kind": e.kind(), "message": e.to_string()})),
            ),
        },
    }
}

#[cfg(feature = "parallel")]
fn with_pool<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    if jobs == 1 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_pool<R: Send>(_jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    f()
}

fn flags_of(cmd: &Command) -> Value {
    let win = |w: &WindowArgs| {
        json!({"width": w.width, "reserve": w.reserve, "pair_cap": w.pair_cap.to_string()})
    };
    let approx = |w: &ApproxArgs| {
        json!({
            "width": w.width, "reserve": w.reserve, "pair_cap": w.pair_cap.to_string(),
            "enum_cap": w.enum_cap, "max_extension": w.max_extension,
        })
    };
    let merge = |mut a: Value, b: Value| {
        if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
            a.extend(b);
        }
        a
    };
    match cmd {
        Command::EhExtract { .. } | Command::LaverBuild { .. } => json!({}),
        Command::Homog { brute, .. } => json!({"brute": brute}),
        Command::CountableCofinal { steps, .. } => json!({"steps": steps}),
        Command::GoodCheck { window, witnesses, .. } => {
            merge(win(window), json!({"witnesses": witnesses}))
        }
        Command::Lemma22 { window, enum_cap, max_extension, trace, .. }
        | Command::Lemma23 { window, enum_cap, max_extension, trace, .. } => merge(
            win(window),
            json!({"enum_cap": enum_cap, "max_extension": max_extension, "trace": trace}),
        ),
        Command::ApproxBuild { window, depth, .. } => merge(approx(window), json!({"depth": depth})),
        Command::ApproxExtend { window, depth, xi, .. } => {
            merge(approx(window), json!({"depth": depth, "xi": xi}))
        }
        Command::ApproxVerify { width, reserve, pair_cap, .. } => {
            json!({"width": width, "reserve": reserve, "pair_cap": pair_cap.to_string()})
        }
        Command::LaverVerify { beta, default_color, .. } => {
            json!({"beta": beta, "default_color": default_color})
        }
        Command::Sweep { width, k, mode, seed, samples, interior, min_chain } => json!({
            "width": width, "k": k,
            "mode": match mode { ModeArg::Exhaustive => "exhaustive", ModeArg::Sampled => "sampled" },
            "seed": seed, "samples": samples, "interior": interior, "min_chain": min_chain,
        }),
        Command::CharWidth { bound, exact, .. } => json!({"bound": bound, "exact": exact}),
    }
}

fn load<T: DeserializeOwned>(path: &str, piped: &str) -> Result<T, Error> {
    if path == "-" {
        return parse_input(piped);
    }
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{path}: {e}")))?;
    parse_input(&text)
}

fn goodness_cfg(pair_cap: u128, retain: bool, exec: Exec) -> GoodnessConfig {
    GoodnessConfig {
        pair_cap,
        retain_witnesses: retain,
        exec,
    }
}

fn search_cfg(enum_cap: usize, max_extension: usize, goodness: GoodnessConfig) -> SearchConfig {
    SearchConfig {
        enum_cap,
        max_extension,
        goodness,
    }
}

fn ok(v: Value) -> Result<(i32, Value), Error> {
    Ok((0, v))
}

fn negative_unless(pass: bool, v: Value) -> Result<(i32, Value), Error> {
    Ok((if pass { 0 } else { 1 }, v))
}

fn dispatch(cmd: &Command, exec: Exec, stdin: &str) -> Result<(i32, Value), Error> {
    match cmd {
        Command::EhExtract { input } => {
            let inp: ChainInput = load(input, stdin)?;
            let cert = extract_end_homogeneous(&inp.coloring, &inp.chain)?;
            negative_unless(cert.verified, to_value(&cert))
        }
        Command::Homog { input, brute } => {
            let inp: ChainInput = load(input, stdin)?;
            let eh = extract_end_homogeneous(&inp.coloring, &inp.chain)?;
            let h = extract_homogeneous(&inp.coloring, &eh)?;
            let oracle = if *brute {
                if inp.chain.len() > BRUTE_CHAIN_LIMIT {
                    return Err(Error::SizeLimit {
                        what: "chain".into(),
                        size: inp.chain.len(),
                        limit: BRUTE_CHAIN_LIMIT,
                    });
                }
                Some(brute_max_homogeneous(&inp.coloring, &inp.chain)?)
            } else {
                None
            };
            let pass = eh.verified && h.verified;
            negative_unless(
                pass,
                json!({"end_homogeneous": eh, "homogeneous": h, "brute": oracle}),
            )
        }
        Command::CountableCofinal { input, steps } => {
            let inp: CountableInput = load(input, stdin)?;
            let res = match &inp.ground {
                Some(g) => countable_cofinal_homogeneous(&inp.coloring, g.iter().copied(), *steps)?,
                None => countable_cofinal_homogeneous(&inp.coloring, 0.., *steps)?,
            };
            let dominance = covers_prefix(&res.homogeneous.members, &res.labels, res.coverage);
            let (checked, bad) =
                check_homogeneous(&inp.coloring, &res.homogeneous.members, res.homogeneous.color)?;
            negative_unless(
                dominance && bad.is_none(),
                json!({
                    "construction": res,
                    "coverage_confirmed": dominance,
                    "homogeneity_confirmed": bad.is_none(),
                    "checked_pairs": checked,
                }),
            )
        }
        Command::GoodCheck { input, window, witnesses } => {
            let inp: GoodInput = load(input, stdin)?;
            let win = Window::new(window.width, window.reserve)?;
            let cfg = goodness_cfg(window.pair_cap, *witnesses, exec);
            let v = is_good_bounded_with(&inp.coloring, &inp.pair, &inp.f, &win, &cfg)?;
            negative_unless(v.good, to_value(&v))
        }
        Command::Lemma22 { input, window, enum_cap, max_extension, trace } => {
            let inp: Lemma22Input = load(input, stdin)?;
            let win = Window::new(window.width, window.reserve)?;
            let g = goodness_cfg(window.pair_cap, false, exec);
            let tr = lemma22_trace(&inp.coloring, &inp.q, &win, &search_cfg(*enum_cap, *max_extension, g))?;
            lemma_output(&inp.coloring, &inp.q, None, tr, &win, &g, *trace)
        }
        Command::Lemma23 { input, window, enum_cap, max_extension, trace } => {
            let inp: Lemma23Input = load(input, stdin)?;
            let win = Window::new(window.width, window.reserve)?;
            let g = goodness_cfg(window.pair_cap, false, exec);
            let tr = lemma23_trace(
                &inp.coloring,
                &inp.p,
                &inp.f,
                &inp.q,
                &win,
                &search_cfg(*enum_cap, *max_extension, g),
            )?;
            lemma_output(&inp.coloring, &inp.q, Some(&inp.f), tr, &win, &g, *trace)
        }
        Command::ApproxBuild { input, window, depth } => {
            let inp: ColoringInput = load(input, stdin)?;
            let win = Window::new(window.width, window.reserve)?;
            let cfg = search_cfg(window.enum_cap, window.max_extension, goodness_cfg(window.pair_cap, false, exec));
            let a = build_approximation(&inp.coloring, &win, *depth, &cfg)?;
            ok(json!({"coloring": inp.coloring, "approximation": a}))
        }
        Command::ApproxExtend { input, window, depth, xi } => {
            let inp: ApproxInput = load(input, stdin)?;
            let win = Window::new(window.width, window.reserve)?;
            let cfg = search_cfg(window.enum_cap, window.max_extension, goodness_cfg(window.pair_cap, false, exec));
            let xi = xi.unwrap_or_else(|| default_xi(&inp.approximation));
            let a = extend_approximation(&inp.coloring, &inp.approximation, xi, &win, *depth, &cfg)?;
            ok(json!({"coloring": inp.coloring, "approximation": a}))
        }
        Command::ApproxVerify { input, width, reserve, pair_cap } => {
            let inp: ApproxInput = load(input, stdin)?;
            let win = Window::new(*width, *reserve)?;
            let r = verify_approximation(
                &inp.coloring,
                &inp.approximation,
                &win,
                &goodness_cfg(*pair_cap, false, exec),
            )?;
            negative_unless(r.pass, to_value(&r))
        }
        Command::LaverBuild { input } => {
            let reg: Registry = load(input, stdin)?;
            let state = laver_build(&reg)?;
            let audit = laver_audit(&state);
            let pass = audit.conflicts == 0
                && audit.max_is_alpha
                && audit.positions_decrease
                && audit.rich_choices_succeed;
            negative_unless(pass, json!({"state": state, "audit": audit}))
        }
        Command::LaverVerify { input, beta, default_color } => {
            let inp: LaverStateInput = load(input, stdin)?;
            let f = laver_complete(&inp.state, Color(*default_color))?;
            let w = laver_verify(&inp.state, &f, *beta)?;
            negative_unless(
                !w.is_empty(),
                json!({
                    "beta": beta,
                    "witnesses": w,
                    "note": "finite registry: witnesses show the mechanism against each \
                             registered family whose choices fired, not the full theorem",
                }),
            )
        }
        Command::Sweep { width, k, mode, seed, samples, interior, min_chain } => {
            let interior = match interior.as_str() {
                "all" => Interior::All,
                n => Interior::MaxSize(n.parse().map_err(|_| {
                    Error::InvalidInput(format!("--interior: expected \"all\" or a size, got {n:?}"))
                })?),
            };
            let mode = match mode {
                ModeArg::Exhaustive => SweepMode::Exhaustive,
                ModeArg::Sampled => SweepMode::Sampled {
                    seed: *seed,
                    samples: *samples,
                },
            };
            let knobs = SweepKnobs {
                interior,
                min_chain: *min_chain,
            };
            ok(to_value(&sweep_colorings(*width, *k, mode, knobs, exec)?))
        }
        Command::CharWidth { input, bound, exact } => {
            let inp: PosetInput = load(input, stdin)?;
            let s = match inp {
                PosetInput::Generated(g) => LeveledPoset::generate(&g)?,
                PosetInput::Flat(p) => LeveledPoset::flat(p.poset)?,
            };
            let r = char_width(&s, *bound, *exact)?;
            negative_unless(r.pass, to_value(&r))
        }
    }
}

fn lemma_output(
    coloring: &PairColoring,
    q: &AnchoredPair,
    f: Option<&PartialColoring>,
    tr: cofinal::construction::SearchTrace,
    win: &Window,
    g: &GoodnessConfig,
    trace: bool,
) -> Result<(i32, Value), Error> {
    let check = match &tr.result {
        Some(res) => Some(check_lemma_result(coloring, q, f, res, win, g)?),
        None => None,
    };
    let pass = check.as_ref().is_some_and(|c| c.passed());
    let mut out = json!({"result": tr.result, "check": check});
    if trace {
        out["failures"] = to_value(&tr.failures);
    }
    negative_unless(pass, out)
}

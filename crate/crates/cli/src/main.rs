//! `amensweep`: validate instances, compute ℓ¹-seminorms, certify and verify invisibility
//! certificates, analyze covers, and generate example instances.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amensweep_core::action::{verify_witness, ActionFile};
use amensweep_core::certifier::{certify, seminorm_bound_from_certificate, verify_certificate, Certificate};
use amensweep_core::chains::{is_alternating, is_cycle, Chain};
use amensweep_core::cover::{barycentric_subdivide, find_coloring, multiplicity, repeated_color_witness, Cover, Pullback};
use amensweep_core::hashing::json_hash;
use amensweep_core::homology_lp::seminorm_lp;
use amensweep_core::models::synthetic::gen_synthetic;
use amensweep_core::models::{gen_circle_model, window_file_value, LoadedComplex};
use amensweep_core::multicomplex::{validate, Multicomplex};
use amensweep_core::rational::parse_q;
use amensweep_core::{degree_cap_from_env, Q};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use report::{emit_failure, CmdResult, Failure, Report, EXIT_FORMAT, EXIT_OK};

/// Largest window (in windings) that `seminorm` and `cover` will materialize.
const MATERIALIZE_LIMIT: i64 = 64;

#[derive(Parser)]
#[command(name = "amensweep", version, about = "Diffusion certificates for alternating cycles under amenable actions")]
struct Cli {
    /// Add approximate 6-digit decimal renderings next to exact rationals.
    #[arg(long, global = true)]
    decimal: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check complex, action, chain and cover files.
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Exact ℓ¹-seminorm of a cycle's class by linear programming.
    Seminorm {
        complex: PathBuf,
        cycle: PathBuf,
        /// Write the LP result (value, minimizer, representative) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterate the halving step and write a certificate.
    Certify {
        complex: PathBuf,
        action: PathBuf,
        cycle: PathBuf,
        #[arg(long, default_value_t = 1)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
        /// Embed the carrier complex even for explicit instances.
        #[arg(long)]
        embed: bool,
    },
    /// Re-check a certificate from files.
    Verify {
        certificate: PathBuf,
        /// Complex to check against; defaults to the embedded carrier.
        #[arg(long)]
        complex: Option<PathBuf>,
        /// Action file; enables the action hash and convolution checks.
        #[arg(long)]
        action: Option<PathBuf>,
    },
    /// Multiplicity, star coloring or subdivision advice for a cover.
    Cover {
        complex: PathBuf,
        cover: PathBuf,
        /// Barycentric subdivisions to try when no coloring exists.
        #[arg(long, default_value_t = 0)]
        subdivide: usize,
        #[arg(long, value_enum, default_value_t = PullbackArg::Carrier)]
        pullback: PullbackArg,
    },
    /// Write example instance files.
    GenExample {
        #[arg(value_enum)]
        model: Model,
        #[arg(long)]
        out: PathBuf,
        /// Circle: number of marked points.
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Circle: window size in windings (rational).
        #[arg(long, default_value = "4")]
        windings: String,
        /// Circle: write the window as an explicit multicomplex.
        #[arg(long)]
        explicit: bool,
        /// Synthetic: seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Synthetic: number of sheets.
        #[arg(long, default_value_t = 3)]
        sheets: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PullbackArg {
    Carrier,
    OpenStar,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Circle,
    Synthetic,
}

fn read(path: &Path) -> CmdResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::format(format!("cannot read {}: {e}", path.display())))
}

fn read_json(path: &Path) -> CmdResult<Value> {
    serde_json::from_str(&read(path)?).map_err(|e| Failure::format(format!("{} is not JSON: {e}", path.display())))
}

fn write(path: &Path, v: &Value) -> CmdResult<()> {
    let text = serde_json::to_string_pretty(v).expect("plain data serializes");
    fs::write(path, text + "\n").map_err(|e| Failure::format(format!("cannot write {}: {e}", path.display())))
}

fn parse<T>(path: &Path, r: amensweep_core::Result<T>) -> CmdResult<T> {
    r.map_err(|e| {
        let f = Failure::from(e);
        let loc = path.display().to_string();
        f.at(loc)
    })
}

fn load_complex(path: &Path) -> CmdResult<LoadedComplex> {
    parse(path, LoadedComplex::from_json_str(&read(path)?))
}

fn load_chain(path: &Path) -> CmdResult<Chain> {
    parse(path, Chain::from_json_str(&read(path)?))
}

fn explicit_of(k: &LoadedComplex) -> CmdResult<Multicomplex> {
    match k {
        LoadedComplex::Explicit(m) => Ok(m.clone()),
        LoadedComplex::Window(w) => {
            if w.windings > Q::from_integer(MATERIALIZE_LIMIT.into()) {
                return Err(Failure::domain(format!(
                    "window of {} windings is too large to materialize (limit {MATERIALIZE_LIMIT})",
                    w.windings
                )));
            }
            Ok(w.to_multicomplex()?)
        }
    }
}

fn complex_hash(k: &LoadedComplex, raw: &Value) -> String {
    match k {
        LoadedComplex::Explicit(m) => json_hash(&m.to_json_value()),
        LoadedComplex::Window(_) => json_hash(raw),
    }
}

fn cmd_validate(paths: &[PathBuf], decimal: bool) -> CmdResult<()> {
    let docs: Vec<(PathBuf, Value)> = paths.iter().map(|p| Ok((p.clone(), read_json(p)?))).collect::<CmdResult<_>>()?;
    let is_complex = |v: &Value| v.get("window").is_some() || v.get("simplices").is_some();
    let mut complex: Option<LoadedComplex> = None;
    for (p, v) in docs.iter().filter(|(_, v)| is_complex(v)) {
        let k = parse(p, LoadedComplex::from_json_str(&v.to_string()))?;
        let mut r = Report::new("validate", decimal);
        r.set("file", p.display().to_string()).set("kind", "complex");
        match &k {
            LoadedComplex::Explicit(m) => {
                validate(m).map_err(|e| Failure::domain(e.to_string()).at(p.display().to_string()))?;
                r.set("simplices", m.simplex_count()).set("hash", json_hash(&m.to_json_value()));
            }
            LoadedComplex::Window(w) => {
                r.set("window", true).q("windings", &w.windings).set("hash", json_hash(v));
            }
        }
        r.set("ok", true).emit();
        complex = Some(k);
    }
    for (p, v) in docs.iter().filter(|(_, v)| !is_complex(v)) {
        let mut r = Report::new("validate", decimal);
        r.set("file", p.display().to_string());
        let loc = p.display().to_string();
        if v.get("members").is_some() {
            let c = parse(p, Cover::from_json_str(&v.to_string()))?;
            r.set("kind", "cover").set("members", c.members.len()).set("multiplicity", multiplicity(&c)?);
            if let Some(LoadedComplex::Explicit(k)) = &complex {
                r.set("covers_complex", c.covers(k));
            }
        } else if v.get("generators").is_some() {
            let af = parse(p, ActionFile::from_json_str(&v.to_string()))?;
            let k = complex
                .as_ref()
                .ok_or_else(|| Failure::domain("an action file needs a complex file among the paths").at(loc.clone()))?;
            let g = parse(p, k.action(&af))?;
            let mut checked = 0;
            if let LoadedComplex::Explicit(m) = k {
                for (label, w) in &g.witnesses {
                    let rep = verify_witness(m, w);
                    if let Some(f) = rep.failure {
                        return Err(Failure::domain(format!("witness `{label}` fails: {}", f.reason)).at(format!("{loc}: {}", f.sigma)));
                    }
                    checked += rep.checked;
                }
            }
            r.set("kind", "action")
                .set("generators", g.generators.len())
                .set("witness_checks", checked)
                .set("hash", json_hash(v));
        } else if v.is_array() {
            let c = parse(p, Chain::from_json_str(&v.to_string()))?;
            r.set("kind", "chain").set("degree", c.degree()).set("terms", c.len()).q("norm", &c.l1_norm());
            r.set("alternating", is_alternating(&c));
            if let Some(k) = &complex {
                c.check_on(k.complex()).map_err(|e| Failure::domain(e.to_string()).at(loc.clone()))?;
                if c.degree() > 0 {
                    r.set("cycle", is_cycle(k.complex(), &c)?);
                }
            }
        } else {
            return Err(Failure::format("unrecognized instance file").at(loc));
        }
        r.set("ok", true).emit();
    }
    eprintln!("validated {} file(s)", paths.len());
    Ok(())
}

fn cmd_seminorm(complex: &Path, cycle: &Path, out: Option<&Path>, decimal: bool) -> CmdResult<()> {
    let mut r = Report::new("seminorm", decimal);
    let raw = read_json(complex)?;
    let k = load_complex(complex)?;
    let m = explicit_of(&k)?;
    let z = load_chain(cycle)?;
    z.check_on(&m).map_err(|e| Failure::domain(e.to_string()).at(cycle.display().to_string()))?;
    let res = seminorm_lp(&m, &z)?;
    r.set("complex_hash", complex_hash(&k, &raw))
        .set("degree", z.degree())
        .q("norm", &z.l1_norm())
        .q("value", &res.value)
        .set("pivots", res.pivots);
    if let Some(out) = out {
        write(out, &serde_json::to_value(&res).expect("plain data serializes"))?;
        r.set("minimizer_path", out.display().to_string());
    }
    r.set("ok", true).emit();
    eprintln!("ℓ¹-seminorm of the class: {}", res.value);
    Ok(())
}

fn cmd_certify(complex: &Path, action: &Path, cycle: &Path, steps: usize, out: &Path, embed: bool, decimal: bool) -> CmdResult<()> {
    let mut r = Report::new("certify", decimal);
    let raw = read_json(complex)?;
    let k = load_complex(complex)?;
    let av = read_json(action)?;
    let af = parse(action, ActionFile::from_json_str(&av.to_string()))?;
    let g = parse(action, k.action(&af))?;
    let c = load_chain(cycle)?;
    let cap = degree_cap_from_env();
    if c.degree() + 1 > cap {
        return Err(Failure::domain(format!("degree {} needs bounding chains above the degree cap {cap}", c.degree())));
    }
    c.check_on(k.complex()).map_err(|e| Failure::domain(e.to_string()).at(cycle.display().to_string()))?;
    let mut cert = certify(k.complex(), &g, &c, steps)?;
    match &k {
        LoadedComplex::Explicit(m) => cert.seal(m, &av, embed),
        LoadedComplex::Window(_) => {
            let carrier = cert.carrier(k.complex())?;
            cert.seal(&carrier, &av, true);
        }
    }
    write(out, &cert.to_json_value())?;
    r.set("complex_hash", complex_hash(&k, &raw))
        .set("action_hash", cert.action_hash.clone())
        .set("certificate_complex_hash", cert.complex_hash.clone())
        .set("steps", cert.step_count())
        .q("initial_norm", &c.l1_norm())
        .q("residual_norm", &cert.residual.l1_norm())
        .q("residual_bound", &cert.residual_bound)
        .q("bounding_total", &cert.ledger.total)
        .set("out", out.display().to_string())
        .set("ok", true);
    r.emit();
    eprintln!(
        "certified {} step(s): ‖c_N‖₁ = {} ≤ {}",
        cert.step_count(),
        cert.residual.l1_norm(),
        cert.residual_bound
    );
    Ok(())
}

fn cmd_verify(certificate: &Path, complex: Option<&Path>, action: Option<&Path>, decimal: bool) -> CmdResult<()> {
    let mut r = Report::new("verify", decimal);
    let cert = parse(certificate, Certificate::from_json_str(&read(certificate)?))?;
    let embedded = parse(certificate, cert.embedded_complex())?;
    let k = match complex {
        Some(p) => match load_complex(p)? {
            LoadedComplex::Explicit(m) => m,
            LoadedComplex::Window(w) => {
                let carrier = embedded.ok_or_else(|| Failure::format("certificate for a window carries no complex"))?;
                if let Some(id) = carrier.simplices().map(|r| &r.id).find(|id| !amensweep_core::multicomplex::Complex::contains_simplex(&w, id)) {
                    return Err(Failure::domain("embedded carrier leaves the window").at(id.clone()));
                }
                carrier
            }
        },
        None => embedded.ok_or_else(|| Failure::format("certificate embeds no complex; pass --complex"))?,
    };
    let av = action.map(read_json).transpose()?;
    if av.as_ref().is_some_and(|v| json_hash(v) != cert.action_hash) {
        return Err(Failure::format("action does not match the recorded hash").at("ActionHash"));
    }
    let g = match (&av, action) {
        (Some(v), Some(p)) => {
            let af = parse(p, ActionFile::from_json_str(&v.to_string()))?;
            Some(parse(p, af.to_action(&k))?)
        }
        _ => None,
    };
    let rep = verify_certificate(&cert, &k, av.as_ref().zip(g.as_ref()));
    if let Some(f) = rep.first() {
        let hash = matches!(f.check, amensweep_core::certifier::Check::ComplexHash | amensweep_core::certifier::Check::ActionHash);
        let failure = if hash { Failure::format(f.detail.clone()) } else { Failure::domain(f.detail.clone()) };
        return Err(failure.at(format!("{:?}", f.check)));
    }
    let bound = seminorm_bound_from_certificate(&cert, &rep)?;
    r.set("complex_hash", cert.complex_hash.clone())
        .set("action_hash", cert.action_hash.clone())
        .set("steps", cert.step_count())
        .q("residual_bound", &cert.residual_bound)
        .q("seminorm_bound", &bound)
        .set("ok", true);
    r.emit();
    eprintln!("certificate ok: ‖[c₀]‖₁ ≤ {bound}");
    Ok(())
}

fn cmd_cover(complex: &Path, cover: &Path, subdivide: usize, pullback: PullbackArg, decimal: bool) -> CmdResult<()> {
    let mut r = Report::new("cover", decimal);
    let k = load_complex(complex)?;
    let mut t = explicit_of(&k)?;
    let mut c = parse(cover, Cover::from_json_str(&read(cover)?))?;
    if !c.covers(&t) {
        return Err(Failure::domain("cover members miss some vertex").at(cover.display().to_string()));
    }
    let mult = multiplicity(&c)?;
    let rule = match pullback {
        PullbackArg::Carrier => Pullback::Carrier,
        PullbackArg::OpenStar => Pullback::OpenStar,
    };
    let mut rounds = 0;
    let mut coloring = find_coloring(&t, &c)?;
    while coloring.is_none() && rounds < subdivide {
        let s = barycentric_subdivide(&t, Some(&c), rule)?;
        t = s.complex;
        c = s.cover.expect("cover was supplied");
        rounds += 1;
        coloring = find_coloring(&t, &c)?;
    }
    r.set("members", c.members.len())
        .set("multiplicity", mult)
        .set("all_amenable", c.all_amenable())
        .set("subdivisions", rounds)
        .set("simplices", t.simplex_count());
    match &coloring {
        None => {
            r.set("advice", "subdivide").set("ok", true).emit();
            eprintln!("no star coloring: some closed star fits in no member; subdivide");
        }
        Some(col) => {
            let sizes: Vec<usize> = (0..c.members.len()).map(|i| col.colors.values().filter(|x| **x == i).count()).collect();
            let mut witnesses = 0;
            for id in t.simplices().filter(|s| s.vertices.len() > mult).map(|s| s.id.clone()) {
                repeated_color_witness(&t, col, &id, mult).map_err(|e| Failure::domain(e).at(id.clone()))?;
                witnesses += 1;
            }
            r.set("coloring", json!(col.colors))
                .set("color_class_sizes", sizes)
                .set("repeated_color_witnesses", witnesses)
                .set("ok", true)
                .emit();
            eprintln!("star coloring found after {rounds} subdivision(s); multiplicity {mult}");
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(model: Model, out: &Path, m: usize, windings: &str, explicit: bool, seed: u64, sheets: usize, decimal: bool) -> CmdResult<()> {
    let mut r = Report::new("gen-example", decimal);
    let (complex, action, cycle, name) = match model {
        Model::Circle => {
            let w = parse_q(windings).map_err(|e| Failure::domain(e.to_string()).at("--windings"))?;
            let cap = degree_cap_from_env();
            let model = gen_circle_model(m, w, cap)?;
            let complex = if explicit {
                model.explicit()?.to_json_value()
            } else {
                window_file_value(&model.window)
            };
            (complex, model.action_file.to_json_value(), model.cycle.to_json_value(), format!("circle-m{m}-w{windings}"))
        }
        Model::Synthetic => {
            let inst = gen_synthetic(seed, sheets)?;
            (inst.complex.to_json_value(), inst.action_file.to_json_value(), inst.cycle.to_json_value(), inst.name)
        }
    };
    fs::create_dir_all(out).map_err(|e| Failure::format(format!("cannot create {}: {e}", out.display())))?;
    let files = [("complex.json", &complex), ("action.json", &action), ("cycle.json", &cycle)];
    for (f, v) in files {
        write(&out.join(f), v)?;
    }
    r.set("instance", name.clone())
        .set("complex_hash", json_hash(&complex))
        .set("action_hash", json_hash(&action))
        .set("files", files.iter().map(|(f, _)| out.join(f).display().to_string()).collect::<Vec<_>>())
        .set("ok", true)
        .emit();
    eprintln!("wrote {name} to {}", out.display());
    Ok(())
}

fn run(cli: &Cli) -> (&'static str, CmdResult<()>) {
    let d = cli.decimal;
    match &cli.command {
        Command::Validate { paths } => ("validate", cmd_validate(paths, d)),
        Command::Seminorm { complex, cycle, out } => ("seminorm", cmd_seminorm(complex, cycle, out.as_deref(), d)),
        Command::Certify { complex, action, cycle, steps, out, embed } => {
            ("certify", cmd_certify(complex, action, cycle, *steps, out, *embed, d))
        }
        Command::Verify { certificate, complex, action } => {
            ("verify", cmd_verify(certificate, complex.as_deref(), action.as_deref(), d))
        }
        Command::Cover { complex, cover, subdivide, pullback } => ("cover", cmd_cover(complex, cover, *subdivide, *pullback, d)),
        Command::GenExample { model, out, m, windings, explicit, seed, sheets } => {
            ("gen-example", cmd_gen(*model, out, *m, windings, *explicit, *seed, *sheets, d))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_FORMAT as u8 } else { EXIT_OK as u8 });
        }
    };
    match run(&cli) {
        (_, Ok(())) => ExitCode::from(EXIT_OK as u8),
        (name, Err(f)) => ExitCode::from(emit_failure(name, &f) as u8),
    }
}

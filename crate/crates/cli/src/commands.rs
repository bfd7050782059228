//! Implementations of the non-reproduce subcommands.

use serde::Deserialize;
use serde_json::json;
use std::path::{Path, PathBuf};

use stabfar_core::algebra::{matrix_to_json, negative_parity_basis, state_from_json, state_to_json};
use stabfar_core::explore::{
    default_penalty_schedule, fs_average_f_mus, fs_average_f_sic, mc_average, optimize,
    scatter_dataset, FMusMaxPairFunctional, FMusSumFunctional, FSicFunctional, Frame, Functional,
    OptimizationProblem, OptimizeOptions, ScatterComponent,
};
use stabfar_core::potentials::{f_mus, f_sic, inequality_report};
use stabfar_core::states::{
    all_mubs, alltop_fiducial, alltop_fiducial_d3, alltop_fiducial_d4, balance_defect, catalog,
    find_mub_balanced, sic_fiducial, BalanceDefectFunctional,
};
use stabfar_core::{
    analysis, Error, GroupKind, HeisenbergGroup, MUBasisSet, Result, StateVector,
};

use crate::io::{self, fmt};
use crate::{
    parse_kind, AnalysisCmd, Command, ExploreCmd, Globals, MubCmd, PotentialsCmd, StatesCmd,
    EXIT_CHECK_FAILED,
};

pub struct Context {
    pub group: HeisenbergGroup,
    pub mubs: Vec<MUBasisSet>,
}

pub fn context(dim: usize, kind: GroupKind) -> Result<Context> {
    let group = HeisenbergGroup::build(dim, kind)?;
    let mubs = all_mubs(&group)?;
    Ok(Context { group, mubs })
}

fn require_dim(globals: &Globals) -> Result<usize> {
    globals.dim.ok_or_else(|| Error::Config("--dim is required for this subcommand".into()))
}

fn echo_config(command: &str, globals: &Globals, extra: serde_json::Value) {
    let mut config = json!({
        "command": command,
        "seed": globals.seed,
        "dim": globals.dim,
        "kind": globals.kind,
        "out": globals.out,
    });
    if let (Some(obj), Some(add)) = (config.as_object_mut(), extra.as_object()) {
        for (k, v) in add {
            obj.insert(k.clone(), v.clone());
        }
    }
    println!("{config}");
}

fn out_path(globals: &Globals, default: &str) -> PathBuf {
    globals.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

pub fn run(globals: &Globals, command: &Command) -> Result<i32> {
    match command {
        Command::Mub { cmd } => run_mub(globals, cmd),
        Command::Potentials { cmd } => run_potentials(globals, cmd),
        Command::States { cmd } => run_states(globals, cmd),
        Command::Explore { cmd } => run_explore(globals, cmd),
        Command::Analysis { cmd } => run_analysis(globals, cmd),
        Command::Reproduce(args) => crate::reproduce::run(globals, args),
    }
}

fn run_mub(globals: &Globals, cmd: &MubCmd) -> Result<i32> {
    let MubCmd::Dump { flower } = cmd;
    let dim = require_dim(globals)?;
    let kind = parse_kind(globals, dim)?;
    echo_config("mub dump", globals, json!({ "flower": flower }));
    let ctx = context(dim, kind)?;
    if *flower >= ctx.mubs.len() {
        return Err(Error::Config(format!(
            "flower {flower} out of range (the group at d={dim} has {})",
            ctx.mubs.len()
        )));
    }
    let mub = &ctx.mubs[*flower];
    let bases: Vec<serde_json::Value> = mub
        .bases()
        .iter()
        .map(|b| {
            json!({
                "generators": format!("{:?}", b.petal().generators()),
                "matrix": matrix_to_json(b.matrix()),
            })
        })
        .collect();
    let doc = json!({ "dim": dim, "kind": kind, "flower": flower, "bases": bases });
    match &globals.out {
        Some(path) => io::write_json(path, &doc)?,
        None => println!("{}", serde_json::to_string_pretty(&doc).unwrap()),
    }
    Ok(0)
}

fn run_potentials(globals: &Globals, cmd: &PotentialsCmd) -> Result<i32> {
    let PotentialsCmd::Eval { state } = cmd;
    let text = io::read_to_string(state)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("bad state file: {e}")))?;
    let psi = state_from_json(&value)?;
    let dim = globals.dim.unwrap_or(psi.dim());
    if dim != psi.dim() {
        return Err(Error::Config(format!(
            "--dim {dim} does not match the {}-dimensional state file",
            psi.dim()
        )));
    }
    let kind = parse_kind(globals, dim)?;
    echo_config("potentials eval", globals, json!({ "state": state }));
    let ctx = context(dim, kind)?;
    let mut report = inequality_report(&ctx.group, &ctx.mubs[0], &psi)?;
    report.f_mus_per_mub =
        ctx.mubs.iter().map(|m| f_mus(m, &psi)).collect::<Result<Vec<f64>>>()?;
    let doc = json!({
        "dim": dim,
        "kind": kind,
        "report": report,
    });
    match &globals.out {
        Some(path) => io::write_json(path, &doc)?,
        None => println!("{}", serde_json::to_string_pretty(&doc).unwrap()),
    }
    Ok(0)
}

fn run_states(globals: &Globals, cmd: &StatesCmd) -> Result<i32> {
    let dim = require_dim(globals)?;
    let kind = parse_kind(globals, dim)?;
    match cmd {
        StatesCmd::Catalog { restarts } => {
            echo_config("states catalog", globals, json!({ "restarts": restarts }));
            let ctx = context(dim, kind)?;
            let mut entries = Vec::new();
            for named in catalog(dim, *restarts, globals.seed)? {
                named.verify(&ctx.group, &ctx.mubs[0])?;
                entries.push(json!({
                    "label": named.label,
                    "dim": named.dim,
                    "vector": state_to_json(&named.vector),
                    "f_sic": f_sic(&ctx.group, &named.vector)?,
                    "f_mus_per_mub": ctx
                        .mubs
                        .iter()
                        .map(|m| f_mus(m, &named.vector))
                        .collect::<Result<Vec<f64>>>()?,
                    "expected_f_sic": named.expected_f_sic,
                    "expected_f_mus": named.expected_f_mus,
                }));
            }
            let doc = json!({ "dim": dim, "states": entries });
            match &globals.out {
                Some(path) => io::write_json(path, &doc)?,
                None => println!("{}", serde_json::to_string_pretty(&doc).unwrap()),
            }
            Ok(0)
        }
        StatesCmd::Balanced { restarts } => {
            echo_config("states balanced", globals, json!({ "restarts": restarts }));
            let ctx = context(dim, kind)?;
            let search = find_mub_balanced(dim, *restarts, globals.seed)?;
            let path = out_path(globals, &format!("balanced_d{dim}.csv"));
            write_states_csv(&path, &search.states, &ctx)?;
            println!(
                "{}",
                json!({
                    "found": search.states.len(),
                    "expected": search.expected,
                    "complete": search.complete,
                    "out": path,
                })
            );
            Ok(0)
        }
    }
}

fn write_states_csv(path: &Path, states: &[StateVector], ctx: &Context) -> Result<()> {
    let d = ctx.group.dim();
    let mut header: Vec<String> = Vec::new();
    for k in 0..d {
        header.push(format!("re{k}"));
        header.push(format!("im{k}"));
    }
    header.extend(["defect".into(), "f_sic".into(), "f_mus".into()]);
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = states
        .iter()
        .map(|s| {
            let mut row = Vec::new();
            for a in s.amplitudes().iter() {
                row.push(fmt(a.re));
                row.push(fmt(a.im));
            }
            row.push(fmt(balance_defect(&ctx.mubs[0], s)?));
            row.push(fmt(f_sic(&ctx.group, s)?));
            row.push(fmt(f_mus(&ctx.mubs[0], s)?));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    io::write_csv(path, &header_refs, &rows)
}

/// Resolves a scatter anchor label into a state.
pub fn resolve_anchor(label: &str, dim: usize, seed: u64) -> Result<StateVector> {
    match label {
        "stabilizer" => Ok(StateVector::basis_state(dim, 0)),
        "sic" => sic_fiducial(dim, 200, seed),
        "alltop" => match dim {
            3 => alltop_fiducial_d3(50, seed),
            4 => alltop_fiducial_d4(200, seed),
            _ => alltop_fiducial(dim),
        },
        "balanced" => {
            let search = find_mub_balanced(dim, 2000, seed)?;
            Ok(search.states[0].clone())
        }
        other => Err(Error::UnknownAnchorState(other.to_string())),
    }
}

/// Parses `label:count[:eps]` mixture entries.
pub fn parse_mix(
    mix: &str,
    dim: usize,
    seed: u64,
) -> Result<Vec<(String, ScatterComponent, usize)>> {
    let mut components = Vec::new();
    for entry in mix.split(',') {
        let parts: Vec<&str> = entry.trim().split(':').collect();
        if parts.len() < 2 || parts.len() > 3 {
            return Err(Error::Config(format!("bad mixture entry `{entry}`")));
        }
        let label = parts[0];
        let count: usize = parts[1]
            .parse()
            .map_err(|_| Error::Config(format!("bad count in `{entry}`")))?;
        let epsilon: f64 = match parts.get(2) {
            Some(e) => e.parse().map_err(|_| Error::Config(format!("bad eps in `{entry}`")))?,
            None => 0.15,
        };
        let component = match label {
            "uniform" => ScatterComponent::Uniform,
            "pair" => ScatterComponent::PairSuperposition {
                first: StateVector::basis_state(dim, 0),
                second: StateVector::basis_state(dim, 1),
            },
            anchor => {
                ScatterComponent::Near { anchor: resolve_anchor(anchor, dim, seed)?, epsilon }
            }
        };
        components.push((label.to_string(), component, count));
    }
    Ok(components)
}

fn run_explore(globals: &Globals, cmd: &ExploreCmd) -> Result<i32> {
    match cmd {
        ExploreCmd::Scatter { n, mix } => {
            let dim = require_dim(globals)?;
            let kind = parse_kind(globals, dim)?;
            echo_config("explore scatter", globals, json!({ "n": n, "mix": mix }));
            let ctx = context(dim, kind)?;
            let components = match mix {
                Some(m) => parse_mix(m, dim, globals.seed)?,
                None => vec![("uniform".into(), ScatterComponent::Uniform, *n)],
            };
            let rows = scatter_dataset(&ctx.group, &ctx.mubs[0], &components, globals.seed)?;
            let path = out_path(globals, &format!("scatter_d{dim}.csv"));
            let csv_rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![fmt(r.f_mus), fmt(r.f_sic), r.anchor.clone()])
                .collect();
            io::write_csv(&path, &["f_mus", "f_sic", "anchor"], &csv_rows)?;
            println!("{}", json!({ "rows": rows.len(), "out": path }));
            Ok(0)
        }
        ExploreCmd::Optimize { problem } => {
            let text = io::read_to_string(problem)?;
            let spec: ProblemSpec = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("bad problem file: {e}")))?;
            echo_config("explore optimize", globals, json!({ "problem": problem }));
            let doc = run_problem(&spec, globals.seed)?;
            let path = out_path(globals, "result.json");
            io::write_json(&path, &doc)?;
            println!("{doc}");
            Ok(0)
        }
        ExploreCmd::FsAverage { n, functional } => {
            let dim = require_dim(globals)?;
            let kind = parse_kind(globals, dim)?;
            echo_config("explore fs-average", globals, json!({ "n": n, "functional": functional }));
            let ctx = context(dim, kind)?;
            let (estimate, closed_form) = match functional.as_str() {
                "fsic" => (
                    mc_average(|s| f_sic(&ctx.group, s).unwrap(), dim, *n, globals.seed),
                    fs_average_f_sic(dim),
                ),
                "fmus" => (
                    mc_average(|s| f_mus(&ctx.mubs[0], s).unwrap(), dim, *n, globals.seed),
                    fs_average_f_mus(dim),
                ),
                other => return Err(Error::Config(format!("unknown functional `{other}`"))),
            };
            let doc = json!({
                "dim": dim,
                "functional": functional,
                "mean": estimate.mean,
                "stderr": estimate.stderr,
                "samples": estimate.samples,
                "closed_form": closed_form,
                "within_three_stderr": estimate.consistent_with(closed_form, 3.0),
            });
            if let Some(path) = &globals.out {
                io::write_json(path, &doc)?;
            }
            println!("{doc}");
            Ok(0)
        }
    }
}

/// JSON description of an optimization problem.
#[derive(Debug, Deserialize)]
pub struct ProblemSpec {
    pub dim: usize,
    /// f_sic | neg_f_sic | f_mus_sum | balance_defect | f_mus_max_pair
    pub objective: String,
    /// MUB indices feeding the objective (defaults to all for f_mus_sum,
    /// the first otherwise).
    #[serde(default)]
    pub objective_mubs: Option<Vec<usize>>,
    /// Equality constraints with target 0; currently only "f_mus".
    #[serde(default)]
    pub constraints: Vec<String>,
    #[serde(default)]
    pub constraint_mubs: Option<Vec<usize>>,
    /// negative_parity | real_zauner
    #[serde(default)]
    pub subspace: Option<String>,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub penalty_weights: Option<Vec<f64>>,
    #[serde(default)]
    pub max_iters: Option<usize>,
}

fn default_restarts() -> usize {
    1000
}

fn select<'a>(mubs: &'a [MUBasisSet], indices: &Option<Vec<usize>>) -> Result<Vec<&'a MUBasisSet>> {
    match indices {
        None => Ok(mubs.iter().collect()),
        Some(list) => list
            .iter()
            .map(|&i| {
                mubs.get(i).ok_or_else(|| Error::Config(format!("MUB index {i} out of range")))
            })
            .collect(),
    }
}

pub fn run_problem(spec: &ProblemSpec, seed: u64) -> Result<serde_json::Value> {
    let kind = if spec.dim == 4 { GroupKind::Bipartite } else { GroupKind::Single };
    let ctx = context(spec.dim, kind)?;
    let objective_mubs = select(&ctx.mubs, &spec.objective_mubs)?;

    let f_sic_obj;
    let f_mus_obj;
    let balance_obj;
    let pair_obj;
    let objective: &dyn Functional = match spec.objective.as_str() {
        "f_sic" => {
            f_sic_obj = FSicFunctional { group: &ctx.group, negate: false };
            &f_sic_obj
        }
        "neg_f_sic" => {
            f_sic_obj = FSicFunctional { group: &ctx.group, negate: true };
            &f_sic_obj
        }
        "f_mus_sum" => {
            f_mus_obj = FMusSumFunctional { mubs: objective_mubs.clone() };
            &f_mus_obj
        }
        "balance_defect" => {
            balance_obj = BalanceDefectFunctional { mub: objective_mubs[0] };
            &balance_obj
        }
        "f_mus_max_pair" => {
            if objective_mubs.len() != 2 {
                return Err(Error::Config("f_mus_max_pair needs exactly two MUBs".into()));
            }
            pair_obj =
                FMusMaxPairFunctional { first: objective_mubs[0], second: objective_mubs[1] };
            &pair_obj
        }
        other => return Err(Error::Config(format!("unknown objective `{other}`"))),
    };

    let constraint_mubs = select(&ctx.mubs, &spec.constraint_mubs)?;
    let mut constraint_store = Vec::new();
    for name in &spec.constraints {
        match name.as_str() {
            "f_mus" | "f_mus_sum" => {
                constraint_store.push(FMusSumFunctional { mubs: constraint_mubs.clone() });
            }
            other => return Err(Error::Config(format!("unknown constraint `{other}`"))),
        }
    }
    let constraints: Vec<&dyn Functional> =
        constraint_store.iter().map(|c| c as &dyn Functional).collect();

    let frame = match spec.subspace.as_deref() {
        None => None,
        Some("negative_parity") => {
            Some(Frame::from_states(&negative_parity_basis(spec.dim)?, false)?)
        }
        Some("real_zauner") => Some(analysis::real_zauner_frame(spec.dim)?),
        Some(other) => return Err(Error::Config(format!("unknown subspace `{other}`"))),
    };

    let mut options = OptimizeOptions::default();
    if let Some(iters) = spec.max_iters {
        options.max_iters = iters;
    }
    let problem = OptimizationProblem {
        dim: spec.dim,
        objective,
        constraints,
        frame,
        penalty_weights: spec.penalty_weights.clone().unwrap_or_else(default_penalty_schedule),
        restarts: spec.restarts,
        options,
    };
    let result = optimize(&problem, seed)?;
    Ok(json!({
        "objective": spec.objective,
        "value": result.objective_value,
        "max_constraint_residual": result.max_constraint_residual,
        "converged": result.converged,
        "restarts": result.restarts,
        "distinct_optima": result.distinct_optima,
        "state": state_to_json(&result.best),
    }))
}

fn read_states_csv(path: &Path) -> Result<Vec<StateVector>> {
    let text = io::read_to_string(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Config(e.to_string()))?
        .clone();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for k in 0.. {
        let re = headers.iter().position(|h| h == format!("re{k}"));
        let im = headers.iter().position(|h| h == format!("im{k}"));
        match (re, im) {
            (Some(r), Some(i)) => pairs.push((r, i)),
            _ => break,
        }
    }
    if pairs.is_empty() {
        return Err(Error::Config("no re{k}/im{k} columns found".into()));
    }
    let mut states = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Config(e.to_string()))?;
        let mut amps = Vec::new();
        for &(r, i) in &pairs {
            let re: f64 = record[r].parse().map_err(|_| Error::Config("bad float".into()))?;
            let im: f64 = record[i].parse().map_err(|_| Error::Config("bad float".into()))?;
            amps.push(stabfar_core::C64::new(re, im));
        }
        states.push(stabfar_core::algebra::state_from_slice(&amps)?);
    }
    Ok(states)
}

fn run_analysis(globals: &Globals, cmd: &AnalysisCmd) -> Result<i32> {
    match cmd {
        AnalysisCmd::ZaunerMap { grid, restarts } => {
            let dim = globals.dim.unwrap_or(7);
            echo_config("analysis zauner-map", globals, json!({ "grid": grid, "restarts": restarts }));
            let map = analysis::zauner_real_map(dim, *grid, *restarts, globals.seed)?;
            let path = out_path(globals, "map.csv");
            let rows: Vec<Vec<String>> = map
                .grid
                .iter()
                .map(|s| vec![fmt(s.x), fmt(s.y), fmt(s.f_sic)])
                .collect();
            io::write_csv(&path, &["x", "y", "f_sic"], &rows)?;
            let sidecar = path.with_extension("points.json");
            io::write_json(
                &sidecar,
                &json!({
                    "grid_max_f_sic": map.grid_max_f_sic,
                    "polished_max_f_sic": map.polished_max_f_sic,
                    "marked": map.marked,
                }),
            )?;
            println!(
                "{}",
                json!({ "out": path, "points": sidecar, "grid_max_f_sic": map.grid_max_f_sic })
            );
            Ok(0)
        }
        AnalysisCmd::Graph { input, tol } => {
            echo_config("analysis graph", globals, json!({ "in": input, "tol": tol }));
            let states = read_states_csv(input)?;
            if states.len() < 2 {
                return Err(Error::Config("need at least two states".into()));
            }
            let graph = analysis::orthogonality_graph(&states, *tol);
            let doc = serde_json::to_value(&graph).unwrap();
            let path = out_path(globals, "graph.json");
            io::write_json(&path, &doc)?;
            println!("{doc}");
            Ok(0)
        }
        AnalysisCmd::Table1 { restarts } => {
            let dim = require_dim(globals)?;
            parse_kind(globals, dim)?;
            echo_config("analysis table1", globals, json!({ "restarts": restarts }));
            let rows = analysis::table1(dim, *restarts, globals.seed)?;
            let doc = serde_json::to_value(&rows).unwrap();
            if let Some(path) = &globals.out {
                io::write_json(path, &doc)?;
            }
            println!("{doc}");
            if rows.iter().all(|r| r.pass) {
                Ok(0)
            } else {
                eprintln!("table check failed at d={dim}");
                Ok(EXIT_CHECK_FAILED)
            }
        }
        AnalysisCmd::ClassifyD4 => {
            echo_config("analysis classify-d4", globals, json!({}));
            let classes = analysis::classify_bases_d4()?;
            let doc = serde_json::to_value(&classes).unwrap();
            if let Some(path) = &globals.out {
                io::write_json(path, &doc)?;
            }
            println!("{doc}");
            Ok(0)
        }
    }
}

//! Batch front end: parse a JSON job, run the requested computation and
//! emit machine- and human-readable reports.
//!
//! Exit codes: 0 success, 2 parse error, 3 validation error, 4 internal
//! certification failure.

use clap::{Parser, Subcommand};
use invariants_core::arithmetic::{BadPlace, PlacesSpec, TorusOptions};
use invariants_core::cohomology::tate;
use invariants_core::flasque::{certify_flasque, flasque_resolution};
use invariants_core::group::{subgroup_classes, FiniteGroup, Subgroup};
use invariants_core::lattice::{
    norm_one_torus_lattice, permutation_lattice, regular_lattice, GaloisLattice,
};
use invariants_core::matrix::IntMat;
use invariants_core::reductive::{group_report, wa_criteria, ReductiveDescriptor};
use invariants_core::verify::run_all;
use invariants_core::Error as CoreError;
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::Value;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "invariants", version, about = "arithmetic invariants of tori from Galois lattices")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a JSON job file.
    Run {
        job: PathBuf,
        /// Write the JSON report to a file instead of stdout.
        #[arg(long)]
        json_out: Option<PathBuf>,
        /// Print the human-readable report.
        #[arg(long)]
        text: bool,
        /// Also compute Sha(T) by the H^2 route and compare.
        #[arg(long)]
        cross_check_sha: bool,
        /// Refuse groups larger than this order.
        #[arg(long, default_value_t = 24)]
        max_order: usize,
    },
    /// Run the randomized property suites.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Per-suite case count (defaults to the full suite sizes).
        #[arg(long)]
        cases: Option<usize>,
    },
}

enum CliError {
    Parse(String),
    Validation(String),
    Certification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Certification(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Validation(m) | CliError::Certification(m) => m,
        }
    }
}

fn from_core(e: CoreError) -> CliError {
    match e {
        CoreError::Certification(m) => CliError::Certification(format!("certification: {m}")),
        CoreError::Internal(m) => CliError::Certification(format!("internal: {m}")),
        other => CliError::Validation(other.to_string()),
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run {
            job,
            json_out,
            text,
            cross_check_sha,
            max_order,
        } => cmd_run(&job, json_out.as_deref(), text, cross_check_sha, max_order),
        Cmd::Verify { seed, cases } => cmd_verify(seed, cases),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("INVARIANTS_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

// ---------------------------------------------------------------- job model

#[derive(Clone, Copy, PartialEq)]
enum Target {
    TorusReport,
    GroupReport,
    Cohomology,
    FlasqueResolution,
    Certify,
    Verify,
}

struct Job {
    lattice: GaloisLattice,
    places: PlacesSpec,
    target: Target,
    cross_check_sha: bool,
    emit_witnesses: bool,
    seed: u64,
    cohomology: Option<(i32, Subgroup)>,
    reductive: Option<ReductiveJob>,
}

struct ReductiveJob {
    descriptor: ReductiveDescriptor,
    query_places: Vec<String>,
}

fn val_err(ptr: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("{ptr}: {msg}"))
}

fn as_object<'a>(v: &'a Value, ptr: &str) -> Result<&'a serde_json::Map<String, Value>, CliError> {
    v.as_object().ok_or_else(|| val_err(ptr, "expected an object"))
}

fn as_array<'a>(v: &'a Value, ptr: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| val_err(ptr, "expected an array"))
}

fn as_str<'a>(v: &'a Value, ptr: &str) -> Result<&'a str, CliError> {
    v.as_str().ok_or_else(|| val_err(ptr, "expected a string"))
}

fn as_usize(v: &Value, ptr: &str) -> Result<usize, CliError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| val_err(ptr, "expected a non-negative integer"))
}

fn as_bool(v: &Value, ptr: &str) -> Result<bool, CliError> {
    v.as_bool().ok_or_else(|| val_err(ptr, "expected a boolean"))
}

fn parse_group(v: &Value) -> Result<FiniteGroup, CliError> {
    let obj = as_object(v, "/group")?;
    if let Some(perms) = obj.get("permutations") {
        let arr = as_array(perms, "/group/permutations")?;
        let strings: Vec<String> = arr
            .iter()
            .enumerate()
            .map(|(i, s)| {
                as_str(s, &format!("/group/permutations/{i}")).map(|s| s.to_string())
            })
            .collect::<Result<_, _>>()?;
        FiniteGroup::from_cycle_strings(&strings)
            .map_err(|e| val_err("/group/permutations", e))
    } else if let Some(table) = obj.get("mult_table") {
        let rows = as_array(table, "/group/mult_table")?;
        let mut mult = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let ptr = format!("/group/mult_table/{i}");
            let row = as_array(row, &ptr)?;
            let mut out = Vec::with_capacity(row.len());
            for (j, v) in row.iter().enumerate() {
                out.push(as_usize(v, &format!("{ptr}/{j}"))?);
            }
            mult.push(out);
        }
        FiniteGroup::from_mult_table(mult, None).map_err(|e| val_err("/group/mult_table", e))
    } else {
        Err(val_err("/group", "expected \"permutations\" or \"mult_table\""))
    }
}

fn parse_lattice(v: &Value, g: &FiniteGroup) -> Result<GaloisLattice, CliError> {
    let obj = as_object(v, "/lattice")?;
    if let Some(b) = obj.get("builtin") {
        let name = as_str(b, "/lattice/builtin")?;
        if name == "norm_one" {
            return Ok(norm_one_torus_lattice(g).0);
        }
        if name == "regular" {
            return Ok(regular_lattice(g));
        }
        if let Some(n) = name.strip_prefix("trivial:") {
            let rank: usize = n
                .parse()
                .map_err(|_| val_err("/lattice/builtin", "bad rank in \"trivial:<n>\""))?;
            return Ok(GaloisLattice::trivial(g.clone(), rank));
        }
        if let Some(k) = name.strip_prefix("perm:") {
            let idx: usize = k
                .parse()
                .map_err(|_| val_err("/lattice/builtin", "bad index in \"perm:<subgroup-id>\""))?;
            let classes = subgroup_classes(g);
            let h = classes.get(idx).ok_or_else(|| {
                val_err(
                    "/lattice/builtin",
                    format!("subgroup-id {idx} out of range ({} classes)", classes.len()),
                )
            })?;
            return Ok(permutation_lattice(g, h));
        }
        return Err(val_err(
            "/lattice/builtin",
            "expected one of \"norm_one\", \"regular\", \"trivial:<n>\", \"perm:<subgroup-id>\"",
        ));
    }
    let rank = as_usize(
        obj.get("rank")
            .ok_or_else(|| val_err("/lattice", "expected \"builtin\" or \"rank\"+\"generators\""))?,
        "/lattice/rank",
    )?;
    let gens_v = as_array(
        obj.get("generators")
            .ok_or_else(|| val_err("/lattice", "missing \"generators\""))?,
        "/lattice/generators",
    )?;
    let mut acts = Vec::with_capacity(gens_v.len());
    for (k, m) in gens_v.iter().enumerate() {
        let ptr = format!("/lattice/generators/{k}");
        let rows = as_array(m, &ptr)?;
        if rows.len() != rank {
            return Err(val_err(&ptr, format!("expected {rank} rows")));
        }
        let mut mat = IntMat::zeros(rank, rank);
        for (i, row) in rows.iter().enumerate() {
            let ptr = format!("{ptr}/{i}");
            let row = as_array(row, &ptr)?;
            if row.len() != rank {
                return Err(val_err(&ptr, format!("expected {rank} entries")));
            }
            for (j, e) in row.iter().enumerate() {
                let n = e
                    .as_i64()
                    .ok_or_else(|| val_err(&format!("{ptr}/{j}"), "expected an integer"))?;
                mat.set(i, j, BigInt::from(n));
            }
        }
        acts.push(mat);
    }
    GaloisLattice::new(g.clone(), rank, acts).map_err(|e| val_err("/lattice", e))
}

fn parse_subgroup(v: &Value, g: &FiniteGroup, ptr: &str) -> Result<Subgroup, CliError> {
    let arr = as_array(v, ptr)?;
    let mut elems = Vec::with_capacity(arr.len());
    for (i, e) in arr.iter().enumerate() {
        let x = as_usize(e, &format!("{ptr}/{i}"))?;
        if x >= g.order() {
            return Err(val_err(
                &format!("{ptr}/{i}"),
                format!("element {x} out of range (group order {})", g.order()),
            ));
        }
        elems.push(x);
    }
    g.subgroup(&elems).map_err(|e| val_err(ptr, e))
}

fn parse_places(v: Option<&Value>, g: &FiniteGroup) -> Result<PlacesSpec, CliError> {
    let mut bad_places = vec![];
    if let Some(v) = v {
        let arr = as_array(v, "/places")?;
        for (i, p) in arr.iter().enumerate() {
            let ptr = format!("/places/{i}");
            let obj = as_object(p, &ptr)?;
            let label = as_str(
                obj.get("label").ok_or_else(|| val_err(&ptr, "missing \"label\""))?,
                &format!("{ptr}/label"),
            )?
            .to_string();
            let subgroup = parse_subgroup(
                obj.get("elements")
                    .ok_or_else(|| val_err(&ptr, "missing \"elements\""))?,
                g,
                &format!("{ptr}/elements"),
            )?;
            bad_places.push(BadPlace { label, subgroup });
        }
    }
    let places = PlacesSpec { bad_places };
    places.validate(g).map_err(|e| val_err("/places", e))?;
    Ok(places)
}

fn parse_job(doc: &Value, max_order: usize) -> Result<Job, CliError> {
    let root = as_object(doc, "")?;
    let target = match as_str(
        root.get("target").ok_or_else(|| val_err("/target", "missing"))?,
        "/target",
    )? {
        "torus_report" => Target::TorusReport,
        "group_report" => Target::GroupReport,
        "cohomology" => Target::Cohomology,
        "flasque_resolution" => Target::FlasqueResolution,
        "certify" => Target::Certify,
        "verify" => Target::Verify,
        other => {
            return Err(val_err(
                "/target",
                format!("unknown target {other:?}"),
            ))
        }
    };

    let (mut cross_check_sha, mut emit_witnesses, mut seed) = (false, false, 1u64);
    if let Some(opts) = root.get("options") {
        let obj = as_object(opts, "/options")?;
        if let Some(v) = obj.get("cross_check_sha") {
            cross_check_sha = as_bool(v, "/options/cross_check_sha")?;
        }
        if let Some(v) = obj.get("emit_witnesses") {
            emit_witnesses = as_bool(v, "/options/emit_witnesses")?;
        }
        if let Some(v) = obj.get("seed") {
            seed = v
                .as_u64()
                .ok_or_else(|| val_err("/options/seed", "expected a non-negative integer"))?;
        }
    }

    if target == Target::Verify {
        // verify jobs need no group or lattice
        let g = FiniteGroup::trivial();
        return Ok(Job {
            lattice: GaloisLattice::trivial(g, 0),
            places: PlacesSpec::default(),
            target,
            cross_check_sha,
            emit_witnesses,
            seed,
            cohomology: None,
            reductive: None,
        });
    }

    let group = parse_group(root.get("group").ok_or_else(|| val_err("/group", "missing"))?)?;
    if group.order() > max_order {
        return Err(val_err(
            "/group",
            format!(
                "group order {} exceeds --max-order {max_order}",
                group.order()
            ),
        ));
    }
    let lattice = parse_lattice(
        root.get("lattice").ok_or_else(|| val_err("/lattice", "missing"))?,
        &group,
    )?;
    let places = parse_places(root.get("places"), &group)?;

    let cohomology = if target == Target::Cohomology {
        let v = root
            .get("cohomology")
            .ok_or_else(|| val_err("/cohomology", "missing (required for this target)"))?;
        let obj = as_object(v, "/cohomology")?;
        let degree = obj
            .get("degree")
            .and_then(|d| d.as_i64())
            .ok_or_else(|| val_err("/cohomology/degree", "expected an integer"))?
            as i32;
        let subgroup = match obj.get("subgroup") {
            Some(s) => parse_subgroup(s, &group, "/cohomology/subgroup")?,
            None => group.full_subgroup(),
        };
        Some((degree, subgroup))
    } else {
        None
    };

    let reductive = if target == Target::GroupReport {
        let mut descriptor = ReductiveDescriptor::new(lattice.clone());
        let mut query_places = vec![];
        if let Some(v) = root.get("reductive") {
            let obj = as_object(v, "/reductive")?;
            if let Some(b) = obj.get("has_anisotropic_trialitarian_d4_or_e6") {
                descriptor.has_anisotropic_trialitarian_d4_or_e6 =
                    as_bool(b, "/reductive/has_anisotropic_trialitarian_d4_or_e6")?;
            }
            if let Some(b) = obj.get("base_totally_imaginary") {
                descriptor.base_totally_imaginary =
                    as_bool(b, "/reductive/base_totally_imaginary")?;
            }
            for (key, out) in [
                ("inner_type_places", &mut descriptor.inner_type_places),
                (
                    "metacyclic_split_places",
                    &mut descriptor.metacyclic_split_places,
                ),
            ] {
                if let Some(v) = obj.get(key) {
                    let ptr = format!("/reductive/{key}");
                    for (i, s) in as_array(v, &ptr)?.iter().enumerate() {
                        out.push(as_str(s, &format!("{ptr}/{i}"))?.to_string());
                    }
                }
            }
            if let Some(v) = obj.get("query_places") {
                for (i, s) in as_array(v, "/reductive/query_places")?.iter().enumerate() {
                    query_places
                        .push(as_str(s, &format!("/reductive/query_places/{i}"))?.to_string());
                }
            }
        }
        Some(ReductiveJob {
            descriptor,
            query_places,
        })
    } else {
        None
    };

    Ok(Job {
        lattice,
        places,
        target,
        cross_check_sha,
        emit_witnesses,
        seed,
        cohomology,
        reductive,
    })
}

// ------------------------------------------------------------------ outputs

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    target: &'static str,
    report: T,
    diagnostic_warnings: Vec<String>,
}

struct Rendered {
    json: String,
    text: String,
}

fn render<T: Serialize>(target: &'static str, report: T, warnings: Vec<String>, text: String) -> Rendered {
    let env = Envelope {
        target,
        report,
        diagnostic_warnings: warnings,
    };
    Rendered {
        json: serde_json::to_string_pretty(&env).expect("report serializes") + "\n",
        text,
    }
}

#[derive(Serialize)]
struct CohomologyOut {
    degree: i32,
    subgroup_elements: Vec<usize>,
    invariant_factors: Vec<u64>,
    order: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witnesses: Option<Vec<Vec<String>>>,
}

fn torus_warnings(d: &invariants_core::arithmetic::Diagnostics) -> Vec<String> {
    let mut w = vec![];
    if !d.alt_order_agreement {
        w.push("alternative Brauer order formula disagrees".to_string());
    }
    for p in &d.surjectivity_failures {
        w.push(format!("restriction to place {p} is not surjective"));
    }
    if d.sha_cross_check == Some(false) {
        w.push("Sha(T) cross-check via the H^2 route disagrees".to_string());
    }
    w
}

fn run_job(job: &Job) -> Result<Rendered, CliError> {
    let options = TorusOptions {
        cross_check_sha: job.cross_check_sha,
        places_complete: true,
    };
    match job.target {
        Target::TorusReport => {
            let rep = invariants_core::arithmetic::torus_report(&job.lattice, &job.places, options)
                .map_err(from_core)?;
            let warnings = torus_warnings(&rep.diagnostics);
            let text = rep.text();
            Ok(render("torus_report", rep.view(), warnings, text))
        }
        Target::GroupReport => {
            let rj = job.reductive.as_ref().expect("parsed for this target");
            let rep = group_report(&rj.descriptor, &job.places, options).map_err(from_core)?;
            let warnings = torus_warnings(&rep.torus.diagnostics);
            let mut text = rep.text();
            #[derive(Serialize)]
            struct GroupOut {
                #[serde(flatten)]
                report: invariants_core::reductive::GroupReportView,
                #[serde(skip_serializing_if = "Option::is_none")]
                wa_criteria: Option<invariants_core::reductive::WaCriteriaView>,
            }
            let wa = if rj.query_places.is_empty() {
                None
            } else {
                let c = wa_criteria(&rj.descriptor, &job.places, &rj.query_places)
                    .map_err(from_core)?;
                text.push_str(&c.text());
                Some(c.view())
            };
            Ok(render(
                "group_report",
                GroupOut {
                    report: rep.view(),
                    wa_criteria: wa,
                },
                warnings,
                text,
            ))
        }
        Target::Cohomology => {
            let (degree, h) = job.cohomology.as_ref().expect("parsed for this target");
            let t = tate(*degree, h, &job.lattice).map_err(from_core)?;
            let view = t.view();
            let witnesses = job.emit_witnesses.then(|| {
                t.generator_witnesses()
                    .iter()
                    .map(|w| w.iter().map(|x| x.to_string()).collect())
                    .collect()
            });
            let text = format!(
                "H^{}({:?}, M) = {}\n",
                degree,
                h.elements(),
                t.text()
            );
            Ok(render(
                "cohomology",
                CohomologyOut {
                    degree: *degree,
                    subgroup_elements: h.elements().to_vec(),
                    invariant_factors: view.invariant_factors,
                    order: view.order,
                    witnesses,
                },
                vec![],
                text,
            ))
        }
        Target::FlasqueResolution => {
            let res = flasque_resolution(&job.lattice).map_err(from_core)?;
            let text = format!(
                "resolution ranks: T_hat {} -> N_hat {} -> S_hat {}\nS_hat flasque: {}\n",
                res.t_hat.rank(),
                res.n_hat.rank(),
                res.s_hat.rank(),
                res.certificate.all_flasque
            );
            Ok(render("flasque_resolution", res.view(), vec![], text))
        }
        Target::Certify => {
            let rep = certify_flasque(&job.lattice).map_err(from_core)?;
            let text = format!("flasque: {}\n", rep.flasque);
            Ok(render("certify", rep, vec![], text))
        }
        Target::Verify => {
            let summary = run_all(job.seed, None);
            let text = summary.text();
            if !summary.all_passed {
                return Err(CliError::Certification(format!(
                    "property suites failed:\n{text}"
                )));
            }
            Ok(render("verify", summary, vec![], text))
        }
    }
}

fn cmd_run(
    path: &std::path::Path,
    json_out: Option<&std::path::Path>,
    text: bool,
    cross_check_sha: bool,
    max_order: usize,
) -> Result<(), CliError> {
    let raw = std::fs::read(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let raw = String::from_utf8(raw).map_err(|_| CliError::Parse("job file is not UTF-8".into()))?;
    let doc: Value =
        serde_json::from_str(&raw).map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))?;
    let mut job = parse_job(&doc, max_order)?;
    job.cross_check_sha |= cross_check_sha;
    let rendered = run_job(&job)?;
    if let Some(out) = json_out {
        std::fs::write(out, &rendered.json)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", out.display())))?;
        if text {
            print!("{}", rendered.text);
        }
    } else if text {
        print!("{}", rendered.text);
    } else {
        print!("{}", rendered.json);
    }
    Ok(())
}

fn cmd_verify(seed: u64, cases: Option<usize>) -> Result<(), CliError> {
    let summary = run_all(seed, cases);
    print!("{}", summary.text());
    if summary.all_passed {
        Ok(())
    } else {
        Err(CliError::Certification("property suites failed".into()))
    }
}

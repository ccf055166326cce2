//! Subcommand bodies. Each returns the text report, the machine document and
//! whether a checked property was violated.

use std::fmt::Write;
use std::path::Path;

use serde_json::{json, Value};

use krein_core::bkfact::{bk_factorize, bk_verify};
use krein_core::decomp::{decompose, projections, validate};
use krein_core::hermdex::{build_congruence, congruence_residual, hermitian_indices, is_congruent};
use krein_core::io::{read_json, write_json, MatrixFile, ProblemFile, SpaceFile};
use krein_core::krein::space_indices;
use krein_core::phillips::{compatibility_defect, graph_rep, phillips_extend, Sign};
use krein_core::suite::{run_suite, SuiteConfig};
use krein_core::{KOperator, Result, Subspace, Tolerance};

use crate::render::{flag, section};
use crate::{Command, Global};

pub const SCHEMA_VERSION: u32 = 1;

pub struct Output {
    pub human: String,
    pub machine: Value,
    pub violated: bool,
}

impl Output {
    fn new(command: &str, human: String, body: Value, violated: bool) -> Self {
        let mut machine = json!({ "schema_version": SCHEMA_VERSION, "command": command });
        if let (Value::Object(m), Value::Object(b)) = (&mut machine, body) {
            m.extend(b);
        }
        Self { human, machine, violated }
    }
}

fn mat(m: &krein_core::CMatrix) -> Value {
    serde_json::to_value(MatrixFile::from_matrix(m)).expect("matrix serializes")
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

/// Reads a problem file; tolerances are defaults, then the file, then flags.
fn load(path: &Path, global: &Global) -> Result<(KOperator, Tolerance)> {
    let file: ProblemFile = read_json(path)?;
    let tol = global.tolerance(file.tolerance(Tolerance::default())?)?;
    Ok((file.to_operator(&tol)?, tol))
}

pub fn run(command: &Command, global: &Global) -> Result<Output> {
    match command {
        Command::Indices { input } => indices(input, global),
        Command::Decompose { input } => decompose_cmd(input, global),
        Command::Factorize { input, out_dir } => factorize(input, out_dir.as_deref(), global),
        Command::Congruent { input, other } => congruent(input, other, global),
        Command::Phillips { space, plus, minus, out_dir } => {
            phillips(space, plus, minus, out_dir.as_deref(), global)
        }
        Command::PropertySuite { count, max_dim, seed, serial, inject_fault } => {
            let mut cfg = SuiteConfig::new(*seed, *count, *max_dim);
            cfg.parallel = !serial;
            cfg.inject_fault = *inject_fault;
            cfg.tol = global.tolerance(cfg.tol)?;
            suite(&cfg)
        }
    }
}

fn indices(input: &Path, global: &Global) -> Result<Output> {
    let (c, tol) = load(input, global)?;
    let h = hermitian_indices(&c, &tol)?;
    let (ip, im) = space_indices(c.domain());
    let human = format!(
        "h+ = {}\nh- = {}\nh0 = {}\nind+ = {ip}\nind- = {im}\n",
        h.h_plus, h.h_minus, h.h_zero
    );
    let body = json!({ "indices": h, "space_indices": [ip, im] });
    Ok(Output::new("indices", human, body, false))
}

fn decompose_cmd(input: &Path, global: &Global) -> Result<Output> {
    let (c, tol) = load(input, global)?;
    let d = decompose(&c, &tol)?;
    let report = validate(&c, &d, &tol)?;
    let q = projections(&c, &d, &tol)?;

    let mut human = String::new();
    let (p, m, z) = d.dims();
    let _ = writeln!(human, "dims: M+ = {p}, M- = {m}, M0 = {z}");
    section(&mut human, "M+ basis", d.m_plus.basis());
    section(&mut human, "M- basis", d.m_minus.basis());
    section(&mut human, "M0 basis", d.m_zero.basis());
    section(&mut human, "Q+", q.q_plus.matrix());
    section(&mut human, "Q-", q.q_minus.matrix());
    section(&mut human, "Q0", q.q_zero.matrix());
    let _ = writeln!(human, "validation:");
    let rows = [
        ("(i)   strict signs, M0 = ker C", report.condition_i()),
        ("(ii)  pairwise direct sums", report.condition_ii()),
        ("(iii) pairwise C-orthogonal", report.condition_iii()),
        ("(iv)  dim M+- = h+-(C)", report.condition_iv()),
        ("      whole sum direct", report.direct),
    ];
    for (label, ok) in rows {
        let _ = writeln!(human, "  {label:<32} {}", flag(ok));
    }

    let body = json!({
        "bases": {
            "plus": mat(d.m_plus.basis()),
            "minus": mat(d.m_minus.basis()),
            "zero": mat(d.m_zero.basis()),
        },
        "projections": {
            "plus": mat(q.q_plus.matrix()),
            "minus": mat(q.q_minus.matrix()),
            "zero": mat(q.q_zero.matrix()),
        },
        "conditions": {
            "i": report.condition_i(),
            "ii": report.condition_ii(),
            "iii": report.condition_iii(),
            "iv": report.condition_iv(),
        },
        "report": to_value(&report),
        "passed": report.passed(),
    });
    Ok(Output::new("decompose", human, body, !report.passed()))
}

fn factorize(input: &Path, out_dir: Option<&Path>, global: &Global) -> Result<Output> {
    let (c, tol) = load(input, global)?;
    let f = bk_factorize(&c, &tol)?;
    let report = bk_verify(&c, &f, &tol)?;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| krein_core::Error::InvalidInput(format!("{}: {e}", dir.display())))?;
        write_json(&dir.join("space.json"), &SpaceFile::from_space(&f.a_space))?;
        write_json(&dir.join("factor.json"), &MatrixFile::from_matrix(f.a.matrix()))?;
        write_json(&dir.join("report.json"), &report)?;
    }

    let mut human = String::new();
    let (p, q) = report.space_indices;
    let _ = writeln!(human, "factor space: dim {} (ind+ = {p}, ind- = {q})", f.a_space.dim());
    section(&mut human, "J of factor space", f.a_space.j());
    section(&mut human, "A", f.a.matrix());
    let _ = writeln!(
        human,
        "residual ||C - AA*|| / ||C|| = {:.3e} {}",
        report.residual,
        flag(report.residual_ok)
    );
    let _ = writeln!(human, "ker A dim = {} {}", report.kernel_dim, flag(report.injective));
    let _ = writeln!(
        human,
        "h(C) = {} vs ind = ({p}, {q}) {}",
        report.indices,
        flag(report.indices_equal)
    );
    let _ = writeln!(human, "note: {}", report.note);
    let _ = writeln!(human, "{}", if report.passed { "verified" } else { "NOT verified" });

    let body = json!({
        "space": to_value(&SpaceFile::from_space(&f.a_space)),
        "factor": mat(f.a.matrix()),
        "report": to_value(&report),
        "passed": report.passed,
    });
    Ok(Output::new("factorize", human, body, !report.passed))
}

fn congruent(input: &Path, other: &Path, global: &Global) -> Result<Output> {
    let (a, tol) = load(input, global)?;
    let file: ProblemFile = read_json(other)?;
    let b = file.to_operator(&tol)?;
    let verdict = is_congruent(&a, &b, &tol)?;
    let ha = hermitian_indices(&a, &tol)?;
    let hb = hermitian_indices(&b, &tol)?;

    let mut human = format!("h(A) = {ha}\nh(B) = {hb}\n");
    let mut body = json!({ "congruent": verdict, "indices": [ha, hb] });
    let mut violated = false;
    if verdict {
        let x = build_congruence(&a, &b, &tol)?;
        let residual = congruence_residual(&a, &b, x.operator());
        violated = residual > tol.residual_tol;
        human.push_str("congruent: A = X* B X\n");
        section(&mut human, "X", x.matrix());
        let _ = writeln!(human, "residual = {residual:.3e} {}", flag(!violated));
        let _ = writeln!(human, "cond(X) = {:.3e}", x.condition());
        body["x"] = mat(x.matrix());
        body["residual"] = json!(residual);
        body["condition"] = json!(x.condition());
    } else {
        human.push_str("not congruent\n");
    }
    Ok(Output::new("congruent", human, body, violated))
}

fn phillips(
    space: &Path,
    plus: &Path,
    minus: &Path,
    out_dir: Option<&Path>,
    global: &Global,
) -> Result<Output> {
    let tol = global.tolerance(Tolerance::default())?;
    let h = read_json::<SpaceFile>(space)?.to_space(&tol)?;
    let vp = read_json::<MatrixFile>(plus)?.to_matrix()?;
    let vm = read_json::<MatrixFile>(minus)?.to_matrix()?;
    let gp = graph_rep(&Subspace::span(&h, &vp, &tol)?, Sign::Plus, &tol)?;
    let gm = graph_rep(&Subspace::span(&h, &vm, &tol)?, Sign::Minus, &tol)?;
    let defect = compatibility_defect(&gp, &gm);
    let pair = phillips_extend(&gp, &gm, &tol)?;
    let (rp, rm) = pair.restriction_defects(&gp, &gm);
    let violated = rp.max(rm) > tol.residual_tol;
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)
            .map_err(|e| krein_core::Error::InvalidInput(format!("{}: {e}", dir.display())))?;
        write_json(&dir.join("angle.json"), &MatrixFile::from_matrix(&pair.g))?;
        write_json(&dir.join("plus.json"), &MatrixFile::from_matrix(pair.g_tilde_plus.basis()))?;
        write_json(&dir.join("minus.json"), &MatrixFile::from_matrix(pair.g_tilde_minus.basis()))?;
    }

    let mut human = String::new();
    let _ = writeln!(human, "input dims: plus {}, minus {}", gp.dim(), gm.dim());
    let _ = writeln!(human, "orthogonality defect = {defect:.3e}");
    section(&mut human, "G", &pair.g);
    let _ = writeln!(human, "||G|| = {:.6}", pair.norm());
    let _ =
        writeln!(human, "restriction defects: plus {rp:.3e}, minus {rm:.3e} {}", flag(!violated));
    section(&mut human, "maximal nonnegative basis", pair.g_tilde_plus.basis());
    section(&mut human, "maximal nonpositive basis", pair.g_tilde_minus.basis());

    let body = json!({
        "g": mat(&pair.g),
        "norm": pair.norm(),
        "compatibility_defect": defect,
        "restriction_defects": [rp, rm],
        "plus_basis": mat(pair.g_tilde_plus.basis()),
        "minus_basis": mat(pair.g_tilde_minus.basis()),
    });
    Ok(Output::new("phillips", human, body, violated))
}

fn suite(cfg: &SuiteConfig) -> Result<Output> {
    let report = run_suite(cfg)?;
    let mut human = String::new();
    let _ = writeln!(
        human,
        "seed {} | {} cases | max dim {}",
        report.seed, report.count, report.max_dim
    );
    for c in &report.checks {
        let _ = writeln!(
            human,
            "  {:<26} {:>6} cases {:>4} failures  worst {:.2e}",
            c.name, c.cases, c.failures, c.worst_residual
        );
    }
    for f in &report.failures {
        let _ = writeln!(human, "  case {} {}: {}", f.case, f.check, f.detail);
    }
    if report.failure_count > report.failures.len() {
        let _ = writeln!(human, "  ... {} more", report.failure_count - report.failures.len());
    }
    let _ = writeln!(human, "{}", if report.passed { "PASS" } else { "FAIL" });
    let body = to_value(&report);
    Ok(Output::new("property-suite", human, body, !report.passed))
}

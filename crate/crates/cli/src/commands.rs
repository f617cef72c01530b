use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use ahodge::algebra::{fmt_rational, parse_rational, Form, Scalar};
use ahodge::calculus::{ellipticity_check, gauduchon_defect, laplacian, lck_check, lee_form, star, OperatorKind};
use ahodge::model::{builtin, load_model, validate as validate_model, BuiltinName, Model, ValidateOptions};
use ahodge::sampling::FormSampler;
use ahodge::solver::{
    b_minus, circle_count, compare as compare_spaces, solve_harmonic, system_residual, FormSpace, SolveReport, SystemKind,
};
use ahodge::Error;
use serde_json::{json, Value};

use crate::{Format, ModelArgs, OutputArgs, SectorArgs, EXIT_INTERNAL, EXIT_MODEL, EXIT_OK, EXIT_USAGE};

pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::InvalidModel(_) | Error::Io(_) => EXIT_MODEL,
            Error::InvalidArgument(_) | Error::NotHomogeneous | Error::MarginTooSmall { .. } => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<u8, Failure>;

fn parse_delta(text: &str) -> Result<ahodge::BigRational, Failure> {
    parse_rational(text).map_err(|e| Failure::usage(format!("--delta: {}", e.message)))
}

fn load(args: &ModelArgs) -> Result<Model, Failure> {
    let delta = args.delta.as_deref().map(parse_delta).transpose()?;
    if let Ok(name) = BuiltinName::from_str(&args.model) {
        let default = if name == BuiltinName::Kt { "1" } else { "0" };
        let delta = match delta {
            Some(d) => d,
            None => parse_delta(default)?,
        };
        return Ok(builtin(name, &delta)?);
    }
    let path = Path::new(&args.model);
    if !path.exists() {
        return Err(Failure { code: EXIT_MODEL, message: format!("{} is neither a builtin model nor a file", args.model) });
    }
    let m = load_model(path)?;
    match delta {
        Some(d) => {
            let mut spec = m.spec().clone();
            spec.delta = d;
            Ok(Model::new(spec)?)
        }
        None => Ok(m),
    }
}

fn emit(out: &OutputArgs, json: &Value, table: &str) -> Result<(), Failure> {
    let text = match out.format {
        Format::Json => serde_json::to_string_pretty(json).expect("values serialize") + "\n",
        Format::Table => table.to_string(),
    };
    match &out.output {
        Some(path) => fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_bidegree(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || Failure::usage(format!("--bidegree expects p,q, got {text:?}"));
    let (p, q) = text.split_once(',').ok_or_else(bad)?;
    Ok((p.trim().parse().map_err(|_| bad())?, q.trim().parse().map_err(|_| bad())?))
}

fn space_for(m: &Model, sector: &SectorArgs, system: SystemKind) -> Result<FormSpace, Failure> {
    match (&sector.bidegree, system) {
        (None, SystemKind::Asd) => Ok(FormSpace::Degree(2)),
        (Some(_), SystemKind::Asd) => Err(Failure::usage("the asd system takes no --bidegree")),
        (None, _) => Err(Failure::usage("--bidegree is required for this system")),
        (Some(b), _) => {
            let (p, q) = parse_bidegree(b)?;
            if p > m.n() || q > m.n() {
                return Err(Failure::usage(format!("bidegree ({p},{q}) exceeds n = {}", m.n())));
            }
            Ok(FormSpace::Bidegree(p, q))
        }
    }
}

fn system(name: &str) -> Result<SystemKind, Failure> {
    SystemKind::from_str(name.trim()).map_err(|e| Failure::usage(e.to_string()))
}

/// Every basis element must satisfy its own system; anything else is a bug.
fn check_report(m: &Model, r: &SolveReport) -> Result<(), Failure> {
    for f in &r.basis {
        if !system_residual(m, r.system, f).is_empty() {
            return Err(Failure { code: EXIT_INTERNAL, message: format!("basis form {f} violates the {} system", r.system) });
        }
    }
    Ok(())
}

fn run_solve(m: &Model, sector: &SectorArgs, kind: SystemKind) -> Result<SolveReport, Failure> {
    let space = space_for(m, sector, kind)?;
    let r = if kind == SystemKind::Asd && sector.margin.is_none() {
        b_minus(m, sector.box_radius)?
    } else {
        solve_harmonic(m, space, kind, sector.box_radius, sector.margin)?
    };
    check_report(m, &r)?;
    Ok(r)
}

fn report_table(r: &SolveReport, timing: bool) -> String {
    let mut s = String::new();
    let sector = match r.space {
        FormSpace::Bidegree(p, q) => format!("({p},{q})"),
        FormSpace::Degree(k) => format!("degree {k}"),
    };
    let _ = writeln!(s, "model        {} (delta {})", r.model, fmt_rational(&r.delta));
    let _ = writeln!(s, "system       {} on {sector}", r.system);
    let _ = writeln!(s, "box          {} (margin {})", r.box_radius, r.margin);
    let _ = writeln!(s, "dimension    {}", r.dimension);
    if r.cover_dimension != r.dimension {
        let _ = writeln!(s, "cover        {}", r.cover_dimension);
    }
    let _ = writeln!(s, "certification {}", r.certification.as_str());
    if timing {
        let _ = writeln!(s, "elapsed_ms   {}", r.elapsed_ms);
    }
    for (i, f) in r.basis.iter().enumerate() {
        let _ = writeln!(s, "  [{i}] {f}");
    }
    s
}

pub fn validate(args: &ModelArgs, samples: usize, seed: u64, out: &OutputArgs) -> Outcome {
    let m = load(args)?;
    let report = validate_model(&m, &ValidateOptions { samples, seed, ..ValidateOptions::default() });
    let mut table = format!("model {} (delta {})\n", m.name(), fmt_rational(m.delta()));
    let mut checks = Vec::new();
    for c in &report.checks {
        let _ = writeln!(table, "{} {:<20} {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        if let Some(w) = &c.witness {
            let _ = writeln!(table, "     witness: {w}");
        }
        checks.push(json!({"name": c.name, "passed": c.passed, "detail": c.detail, "witness": c.witness}));
    }
    let j = json!({"model": m.name(), "delta": fmt_rational(m.delta()), "passed": report.passed(), "samples": samples, "seed": seed, "checks": checks});
    emit(out, &j, &table)?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_MODEL })
}

pub fn solve(args: &ModelArgs, sector: &SectorArgs, system_name: &str, out: &OutputArgs) -> Outcome {
    let m = load(args)?;
    let r = run_solve(&m, sector, system(system_name)?)?;
    emit(out, &r.to_json(out.timing), &report_table(&r, out.timing))?;
    Ok(EXIT_OK)
}

pub fn compare(args: &ModelArgs, sector: &SectorArgs, systems: &str, out: &OutputArgs) -> Outcome {
    let m = load(args)?;
    let names: Vec<&str> = systems.split(',').collect();
    let [a, b] = names[..] else {
        return Err(Failure::usage(format!("--systems expects two names, got {systems:?}")));
    };
    let (a, b) = (system(a)?, system(b)?);
    let space = space_for(&m, sector, a)?;
    if space_for(&m, sector, b)? != space {
        return Err(Failure::usage("both systems must act on the same forms"));
    }
    let cmp = compare_spaces(&m, space, a, b, sector.box_radius, sector.margin)?;
    check_report(&m, &cmp.first)?;
    check_report(&m, &cmp.second)?;
    let mut table = format!("{cmp}\n");
    let _ = writeln!(table, "{} dimension {}, {} dimension {}", a, cmp.first.dimension, b, cmp.second.dimension);
    if let Some(w) = &cmp.witness {
        let _ = writeln!(table, "witness {w}");
    }
    emit(out, &cmp.to_json(out.timing), &table)?;
    Ok(EXIT_OK)
}

fn laplacian_kind(name: &str) -> Result<OperatorKind, Failure> {
    let full = if name.starts_with("lap_") { name.to_string() } else { format!("lap_{name}") };
    let kind = OperatorKind::from_str(&full).or_else(|_| OperatorKind::from_str(name)).map_err(|e| Failure::usage(e.to_string()))?;
    if !kind.is_laplacian() {
        return Err(Failure::usage(format!("{name} is not a Laplacian")));
    }
    Ok(kind)
}

pub fn symbol(args: &ModelArgs, name: &str, samples: usize, seed: u64, out: &OutputArgs) -> Outcome {
    let m = load(args)?;
    let kind = laplacian_kind(name)?;
    let r = ellipticity_check(&m, kind, samples, seed)?;
    let verdict = if r.all_invertible() { "all invertible".to_string() } else { format!("{} singular", r.failures.len()) };
    let ratio = r.l_min_ratio.as_ref().map(fmt_rational);
    let mut table = format!("{} on {}: {verdict} ({} matrices, {} samples)\n", kind, m.name(), r.matrices_checked, r.samples);
    let _ = writeln!(
        table,
        "sigma(L): {} (sign {}, min |sigma|/|xi|^2 {})",
        if r.l_definite() { "definite" } else { "not definite" },
        r.l_sign,
        ratio.as_deref().unwrap_or("-")
    );
    for f in &r.failures {
        let xi: Vec<String> = f.xi.iter().map(Scalar::to_string).collect();
        let _ = writeln!(table, "  singular at sample {} bidegree {:?} xi [{}]", f.sample, f.bidegree, xi.join(", "));
    }
    let failures: Vec<Value> = r
        .failures
        .iter()
        .map(|f| json!({"sample": f.sample, "bidegree": [f.bidegree.0, f.bidegree.1], "xi": f.xi.iter().map(Scalar::to_string).collect::<Vec<_>>()}))
        .collect();
    let j = json!({
        "model": m.name(),
        "delta": fmt_rational(m.delta()),
        "operator": kind.name(),
        "samples": r.samples,
        "seed": seed,
        "skipped_zero": r.skipped_zero,
        "matrices_checked": r.matrices_checked,
        "all_invertible": r.all_invertible(),
        "failures": failures,
        "l_sign": r.l_sign,
        "l_real": r.l_real,
        "l_min_ratio": ratio,
        "l_definite": r.l_definite(),
    });
    emit(out, &j, &table)?;
    Ok(if r.all_invertible() { EXIT_OK } else { EXIT_INTERNAL })
}

pub fn circle(delta: &str, out: &OutputArgs) -> Outcome {
    let d = parse_delta(delta)?;
    let (count, points) = circle_count(&d).map_err(|e| Failure::usage(e.to_string()))?;
    let mut table = format!("count {count}\n");
    for (l, m) in &points {
        let _ = writeln!(table, "  ({l}, {m})");
    }
    let j = json!({"delta": fmt_rational(&d), "count": count, "points": points.iter().map(|(l, m)| json!([l, m])).collect::<Vec<_>>()});
    emit(out, &j, &table)?;
    Ok(EXIT_OK)
}

/// Seeded checks of `*Δ_BC = Δ_A*` and `** = (−1)^k`.
fn duality_suite(m: &Model, samples: usize, seed: u64) -> Result<(bool, bool), Failure> {
    let mut sampler = FormSampler::new(seed);
    let (mut duality, mut involution) = (true, true);
    for _ in 0..samples {
        let a = sampler.homogeneous(m);
        let bc = laplacian(m, &a, OperatorKind::LapBc)?;
        let ae = laplacian(m, &star(m, &a), OperatorKind::LapAeppli)?;
        duality &= bc.map(|f| star(m, f)) == ae;
        let k = a.coeffs().next().map(|(b, _)| b.degree()).unwrap_or(0);
        let sign = if k % 2 == 1 { Scalar::from_int(-1) } else { Scalar::one() };
        involution &= star(m, &star(m, &a)) == a.scale(&sign);
    }
    Ok((duality, involution))
}

pub fn diagnostics(args: &ModelArgs, samples: usize, seed: u64, out: &OutputArgs) -> Outcome {
    let m = load(args)?;
    let theta = lee_form(&m);
    let lck = lck_check(&m, theta.as_ref().unwrap_or(&Form::zero(m.n())));
    let defect = if m.n() == 2 { Some(gauduchon_defect(&m)?) } else { None };
    let (duality, involution) = duality_suite(&m, samples, seed)?;
    let almost_kahler = lck.d_omega.is_zero();

    let mut table = format!("model {} (delta {})\n", m.name(), fmt_rational(m.delta()));
    let _ = writeln!(table, "d omega      {}", lck.d_omega);
    match &theta {
        Some(t) if !almost_kahler => {
            let _ = writeln!(table, "lee form     theta = {t}{}", if *t == t.conj() { " (real)" } else { "" });
            let _ = writeln!(table, "d omega = theta ^ omega: {}", yes(lck.conformal));
            let _ = writeln!(table, "d theta = 0: {}", yes(lck.closed));
            let _ = writeln!(table, "theta harmonic: {}", yes(lck.harmonic_nonzero));
        }
        Some(_) => {
            let _ = writeln!(table, "almost Kaehler: d omega = 0");
        }
        None => {
            let _ = writeln!(table, "no 1-form theta with d omega = theta ^ omega");
        }
    }
    if let Some(d) = &defect {
        let _ = writeln!(table, "gauduchon defect {d}");
    }
    let _ = writeln!(table, "star Lap_BC = Lap_A star on {samples} samples: {}", yes(duality));
    let _ = writeln!(table, "star star = (-1)^k on {samples} samples: {}", yes(involution));

    let j = json!({
        "model": m.name(),
        "delta": fmt_rational(m.delta()),
        "d_omega": lck.d_omega.to_string(),
        "almost_kahler": almost_kahler,
        "lee_form": theta.as_ref().map(Form::to_string),
        "lee_real": theta.as_ref().map(|t| *t == t.conj()),
        "conformal": lck.conformal,
        "lee_closed": lck.closed,
        "lee_harmonic": lck.harmonic_nonzero,
        "gauduchon_defect": defect.as_ref().map(Form::to_string),
        "samples": samples,
        "seed": seed,
        "bc_aeppli_duality": duality,
        "star_involution": involution,
    });
    emit(out, &j, &table)?;
    Ok(if duality && involution { EXIT_OK } else { EXIT_INTERNAL })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

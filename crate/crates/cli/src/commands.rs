use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use pdce_core::catalog::{self, CatalogError};
use pdce_core::cohom::{cohomology_bar, cohomology_cyclic, CohomError, DEFAULT_BUDGET};
use pdce_core::fgab::PresentedGroup;
use pdce_core::funcspace::{FunctionVector, Target};
use pdce_core::gowers::{
    gowers_norm, repair_disk, residual, stability_sweep, ComplexFunction, GowersError, RepairMethod, Repairer,
    DEFAULT_PRODUCT_BUDGET, DEFAULT_TAU,
};
use pdce_core::group::Subgroup;
use pdce_core::pdce::{
    class_of, homology_at, is_degenerate, solution_module, structure_complex, zero_sum_complex, zero_sum_homology_at,
    Instance, PdceError, Subset,
};
use serde_json::{json, Value};

use crate::instance::{exact_string, parse_exact, parse_subset, subset_from_list, InstanceFile};
use crate::report::{Normalization, Report};
use crate::{CliError, Command, Opts, VerifyOpts};

fn pdce_err(e: PdceError) -> CliError {
    match e {
        PdceError::InvalidSubset(..) => CliError::Parse { path: "--e".into(), msg: e.to_string() },
        PdceError::InvalidPosition(..) => CliError::Parse { path: "--ell".into(), msg: e.to_string() },
        PdceError::TooManySubgroups(_) | PdceError::SubgroupMismatch(_) => {
            CliError::Parse { path: "subgroups".into(), msg: e.to_string() }
        }
        _ => CliError::Domain(e.to_string()),
    }
}

fn gowers_err(e: GowersError) -> CliError {
    match e {
        GowersError::ProductTooLarge { .. } => CliError::Budget(e.to_string()),
        GowersError::NotBounded(_) => CliError::Parse { path: "complex_functions".into(), msg: e.to_string() },
        GowersError::BadThreshold(_) => CliError::Parse { path: "--tau".into(), msg: e.to_string() },
        GowersError::Pdce(p) => pdce_err(p),
        _ => CliError::Domain(e.to_string()),
    }
}

fn cohom_err(e: CohomError) -> CliError {
    match e {
        CohomError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        CohomError::NotAComplex(_) => CliError::Domain(e.to_string()),
        _ => CliError::Parse { path: "coefficients.action".into(), msg: e.to_string() },
    }
}

fn group_json(g: &PresentedGroup) -> Value {
    json!({
        "group": g.to_string(),
        "invariant_factors": g.invariant_factors().iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "dual": g.is_dual(),
    })
}

fn values_json(f: &FunctionVector) -> Value {
    Value::from(f.values.iter().map(exact_string).collect::<Vec<_>>())
}

fn load(path: &str) -> Result<InstanceFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.to_string(), source: e })?;
    InstanceFile::parse(&text)
}

fn write_file(path: &str, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io { path: path.to_string(), source: e })
}

fn budget(opts: &Opts, file: &InstanceFile, default: usize) -> Result<usize, CliError> {
    if let Some(b) = opts.budget.or(file.params.budget) {
        return Ok(b);
    }
    match std::env::var("PDCE_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse { path: "PDCE_BUDGET".into(), msg: format!("not a count: {v:?}") }),
        Err(_) => Ok(default),
    }
}

fn subset(opts: &Opts, file: &InstanceFile, inst: &Instance) -> Result<Subset, CliError> {
    match (&opts.e, &file.params.e) {
        (Some(s), _) => parse_subset(s, inst.k()),
        (None, Some(v)) => subset_from_list(v, inst.k()),
        (None, None) => Ok(inst.full()),
    }
}

fn normalization(inst: &Instance) -> Option<Normalization> {
    let c = inst.coset_count();
    (c > 1).then(|| Normalization {
        cosets: c,
        note: format!(
            "the subgroups generate a subgroup of index {c}; modules are computed on it and solutions are handled on each of the {c} cosets"
        ),
    })
}

fn emit(out: Option<&str>, json_flag: bool, report: &Report) -> Result<(), CliError> {
    if let Some(path) = out {
        write_file(path, &report.to_json())?;
    }
    if json_flag {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.summary);
    }
    Ok(())
}

struct Outcome {
    result: Value,
    summary: String,
    normalization: Option<Normalization>,
    code: i32,
}

impl Outcome {
    fn ok(result: Value, summary: String) -> Outcome {
        Outcome { result, summary, normalization: None, code: 0 }
    }
}

/// Runs one command; returns the exit code for completed runs.
pub fn execute(cmd: &Command) -> Result<i32, CliError> {
    let (name, opts) = match cmd {
        Command::Verify(v) => return verify(v),
        Command::Solve(o) => ("solve", o),
        Command::Homology(o) => ("homology", o),
        Command::Decompose(o) => ("decompose", o),
        Command::Class(o) => ("class", o),
        Command::Zerosum(o) => ("zerosum", o),
        Command::Cohomology(o) => ("cohomology", o),
        Command::Gowers(o) => ("gowers", o),
        Command::Repair(o) => ("repair", o),
        Command::Sweep(o) => return sweep(o),
    };
    let file = load(&opts.instance)?;
    let outcome = match name {
        "solve" => solve(opts, &file)?,
        "homology" => homology(opts, &file, false)?,
        "zerosum" => homology(opts, &file, true)?,
        "decompose" => decompose(opts, &file)?,
        "class" => class(opts, &file)?,
        "cohomology" => cohomology(opts, &file)?,
        "gowers" => gowers(opts, &file)?,
        "repair" => repair(opts, &file)?,
        _ => unreachable!(),
    };
    let mut report = Report::new(name, Some(file), outcome.result, outcome.summary);
    if let Some(n) = outcome.normalization {
        report.summary = format!("note: {}\n{}", n.note, report.summary);
        report.normalization = Some(n);
    }
    emit(opts.out.as_deref(), opts.json, &report)?;
    Ok(outcome.code)
}

fn solve(opts: &Opts, file: &InstanceFile) -> Result<Outcome, CliError> {
    let inst = file.instance()?;
    let e = subset(opts, file, &inst)?;
    let m = solution_module(&inst, e).map_err(pdce_err)?;
    let pres = m.presentation();
    let mut result = json!({
        "e": e.to_string(),
        "target": inst.target().to_string(),
        "module": group_json(&pres),
        "points": m.dim,
        "constraint_rows": m.constraint_matrix().rows(),
    });
    if inst.target().is_discrete() {
        let gens = m.generators();
        if gens.rows() * gens.cols() <= 100_000 {
            result["generators"] = Value::from(
                gens.column_vecs().iter().map(|c| c.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            );
        }
    }
    let summary = format!(
        "M_{e} over {}: {}{}\n",
        inst.target(),
        pres,
        if inst.coset_count() > 1 { format!(" on each of {} cosets", inst.coset_count()) } else { String::new() }
    );
    let mut out = Outcome::ok(result, summary);
    out.normalization = normalization(&inst);
    Ok(out)
}

fn homology(opts: &Opts, file: &InstanceFile, zero_sum: bool) -> Result<Outcome, CliError> {
    let inst = file.instance()?;
    let e = subset(opts, file, &inst)?;
    let ell = opts.ell.or(file.params.ell);
    let rows: Vec<(usize, PresentedGroup)> = match ell {
        Some(l) => {
            let g = if zero_sum { zero_sum_homology_at(&inst, e, l) } else { homology_at(&inst, e, l) };
            vec![(l, g.map_err(pdce_err)?)]
        }
        None => {
            let cx = if zero_sum { zero_sum_complex(&inst, e) } else { structure_complex(&inst, e) };
            cx.map_err(pdce_err)?.homology.into_iter().enumerate().collect()
        }
    };
    let mut summary = String::new();
    let table: Vec<Value> = rows
        .iter()
        .map(|(l, g)| {
            let _ = writeln!(summary, "({e},{l}) -> {g}");
            let mut v = group_json(g);
            v["e"] = json!(e.to_string());
            v["ell"] = json!(l);
            v
        })
        .collect();
    let result = json!({
        "complex": if zero_sum { "zero-sum" } else { "solutions" },
        "target": inst.target().to_string(),
        "homology": table,
    });
    let mut out = Outcome::ok(result, summary);
    out.normalization = normalization(&inst);
    Ok(out)
}

fn decompose(opts: &Opts, file: &InstanceFile) -> Result<Outcome, CliError> {
    let inst = file.instance()?;
    let (name, f) = file.function(opts.function.as_deref())?;
    let w = is_degenerate(&inst, &f).map_err(pdce_err)?;
    let mut out = match w {
        Some(parts) => {
            let mut summary = format!("{name} is degenerate: {name} = ");
            summary.push_str(&(1..=parts.len()).map(|i| format!("f_{i}")).collect::<Vec<_>>().join(" + "));
            summary.push('\n');
            for (i, p) in parts.iter().enumerate() {
                let _ = writeln!(summary, "  f_{} = [{}]", i + 1, p.values.iter().map(exact_string).collect::<Vec<_>>().join(", "));
            }
            Outcome::ok(json!({"function": name, "degenerate": true, "witness": parts.iter().map(values_json).collect::<Vec<_>>()}), summary)
        }
        None => Outcome {
            result: json!({"function": name, "degenerate": false}),
            summary: format!("{name} is not degenerate (no decomposition exists)\n"),
            normalization: None,
            code: 1,
        },
    };
    out.normalization = normalization(&inst);
    Ok(out)
}

fn class(opts: &Opts, file: &InstanceFile) -> Result<Outcome, CliError> {
    let inst = file.instance()?;
    let (name, f) = file.function(opts.function.as_deref())?;
    let c = class_of(&inst, &f).map_err(pdce_err)?;
    let group = homology_at(&inst, inst.full(), inst.k()).map_err(pdce_err)?;
    let result = json!({
        "function": name,
        "quotient": group_json(&group),
        "orders": c.orders.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "cosets": c.cosets.iter().map(|v| v.iter().map(exact_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "zero": c.is_zero(),
    });
    let summary = format!(
        "class of {name} in {group}: {}{}\n",
        c,
        if c.is_zero() { " (degenerate)" } else { " (non-degenerate)" }
    );
    let mut out = Outcome::ok(result, summary);
    out.normalization = normalization(&inst);
    Ok(out)
}

fn cohomology(opts: &Opts, file: &InstanceFile) -> Result<Outcome, CliError> {
    let m = file.coefficients()?;
    let p_max = opts.p.or(file.params.p).unwrap_or(2);
    let b = budget(opts, file, DEFAULT_BUDGET)?;
    let closed = if m.acting_group().rank() == 1 { Some(cohomology_cyclic(&m, p_max).map_err(cohom_err)?) } else { None };
    let mut summary = String::new();
    let mut degrees = Vec::new();
    for p in 0..=p_max {
        let h = cohomology_bar(&m, p, b).map_err(cohom_err)?;
        let mut v = json!({"p": p, "bar": group_json(&h)});
        let _ = write!(summary, "H^{p} = {h}");
        if let Some(c) = &closed {
            let agree = h.is_isomorphic(&c[p]);
            v["closed_form"] = group_json(&c[p]);
            v["agree"] = json!(agree);
            if !agree {
                let _ = write!(summary, " (closed form: {})", c[p]);
            }
        }
        summary.push('\n');
        degrees.push(v);
    }
    if m.group().is_dual() {
        summary.push_str("(coefficients are compact: groups are reported through their duals)\n");
    }
    Ok(Outcome::ok(json!({"module": group_json(m.group()), "degrees": degrees}), summary))
}

fn file_subgroups(file: &InstanceFile) -> Result<Vec<Subgroup>, CliError> {
    let g = file.finite_group();
    file.subgroups
        .iter()
        .enumerate()
        .map(|(i, gens)| {
            Subgroup::generated(&g, gens)
                .map_err(|e| CliError::Parse { path: format!("subgroups[{i}]"), msg: e.to_string() })
        })
        .collect()
}

fn gowers(opts: &Opts, file: &InstanceFile) -> Result<Outcome, CliError> {
    let (name, complex) = file.function_kind(opts.function.as_deref())?;
    let f = if complex {
        file.complex_function(&name)?
    } else {
        let (_, f) = file.function(Some(&name))?;
        if f.target != Target::Torus {
            return Err(CliError::Domain(format!("{name} must be torus-valued or complex")));
        }
        ComplexFunction::from_phases(&f)
    };
    let subs = file_subgroups(file)?;
    let n = gowers_norm(&file.finite_group(), &subs, &f).map_err(gowers_err)?;
    let text = format!("{n:.12}");
    Ok(Outcome::ok(json!({"function": name, "norm": text}), format!("norm of {name}: {text}\n")))
}

fn repair(opts: &Opts, file: &InstanceFile) -> Result<Outcome, CliError> {
    let inst = file.instance()?;
    let (name, complex) = file.function_kind(opts.function.as_deref())?;
    let repairer = Repairer::new(&inst).map_err(gowers_err)?;
    let margin = exact_string(repairer.margin());
    let method = |m: RepairMethod| match m {
        RepairMethod::Rounding => "rounding",
        RepairMethod::Fallback => "fallback",
    };
    let mut out = if complex {
        let f = file.complex_function(&name)?;
        let tau = opts.tau.or(file.params.tau).unwrap_or(DEFAULT_TAU);
        let r = repair_disk(&inst, &f, tau).map_err(gowers_err)?;
        let l1 = format!("{:.12}", r.l1);
        Outcome::ok(
            json!({
                "function": name,
                "tau": tau,
                "phases": values_json(&r.phases),
                "g": values_json(&r.repair.g),
                "method": method(r.repair.method),
                "d0": exact_string(&r.repair.distance),
                "l1": l1,
                "margin": margin,
            }),
            format!("repaired phases of {name}: L1 distance {l1}, d0 {} ({})\n", exact_string(&r.repair.distance), method(r.repair.method)),
        )
    } else {
        let (_, f) = file.function(Some(&name))?;
        let b = budget(opts, file, DEFAULT_PRODUCT_BUDGET)?;
        let res = residual(inst.ambient(), inst.ambient_subgroups(), &f, b).map_err(gowers_err)?;
        let r = repairer.repair(&f).map_err(gowers_err)?;
        Outcome::ok(
            json!({
                "function": name,
                "residual": exact_string(&res),
                "g": values_json(&r.g),
                "method": method(r.method),
                "d0": exact_string(&r.distance),
                "correction_inf": exact_string(&r.correction_inf),
                "margin": margin,
            }),
            format!(
                "{name}: residual {}, repaired with d0 {} ({}), margin {margin}\ng = [{}]\n",
                exact_string(&res),
                exact_string(&r.distance),
                method(r.method),
                r.g.values.iter().map(exact_string).collect::<Vec<_>>().join(", ")
            ),
        )
    };
    out.normalization = normalization(&inst);
    Ok(out)
}

fn delta_grid(opts: &Opts, file: &InstanceFile) -> Result<Vec<BigRational>, CliError> {
    if let Some(s) = &opts.delta_grid {
        return s
            .split(',')
            .map(|x| {
                parse_exact(x).ok_or_else(|| CliError::Parse { path: "--delta-grid".into(), msg: format!("not a number: {x:?}") })
            })
            .collect();
    }
    if let Some(v) = &file.params.delta_grid {
        return Ok(v.iter().map(|x| x.0.clone()).collect());
    }
    Ok(vec![parse_exact("0").unwrap(), parse_exact("1/100").unwrap()])
}

fn sweep(opts: &Opts) -> Result<i32, CliError> {
    let file = load(&opts.instance)?;
    let inst = file.instance()?;
    let grid = delta_grid(opts, &file)?;
    if let Some(d) = grid.iter().find(|d| d < &&BigRational::from_integer(0.into())) {
        return Err(CliError::Parse { path: "--delta-grid".into(), msg: format!("negative size {}", exact_string(d)) });
    }
    let samples = opts.samples.or(file.params.samples).unwrap_or(20);
    let seed = opts.seed.or(file.params.seed).unwrap_or(0);
    let b = budget(opts, &file, DEFAULT_PRODUCT_BUDGET)?;
    let rep = stability_sweep(&inst, &grid, samples, seed, b).map_err(gowers_err)?;
    let csv = rep.to_csv();
    let mut sorted = grid.clone();
    sorted.sort();
    sorted.dedup();
    let mut summary = format!("rounding margin {}\n", exact_string(&rep.margin));
    for d in &sorted {
        let rows: Vec<_> = rep.rows.iter().filter(|r| &r.delta == d).collect();
        let ok = rows.iter().filter(|r| r.success).count();
        let mean = rows.iter().map(|r| r.residual.to_f64().unwrap_or(f64::NAN)).sum::<f64>() / rows.len().max(1) as f64;
        let _ = writeln!(summary, "delta {:.12}: {ok}/{} repaired within 2 delta, mean residual {mean:.12}", d.to_f64().unwrap_or(f64::NAN), rows.len());
    }
    match &opts.out {
        Some(path) => {
            write_file(path, &csv)?;
            if opts.json {
                let report = Report::new("sweep", Some(file.clone()), sweep_json(&rep), summary);
                println!("{}", report.to_json());
            } else {
                print!("{summary}");
            }
        }
        None => {
            if opts.json {
                let report = Report::new("sweep", Some(file.clone()), sweep_json(&rep), summary);
                println!("{}", report.to_json());
            } else {
                print!("{csv}");
                eprint!("{summary}");
            }
        }
    }
    Ok(0)
}

fn sweep_json(rep: &pdce_core::gowers::SweepReport) -> Value {
    json!({
        "margin": exact_string(&rep.margin),
        "seed": rep.seed,
        "rows": rep.rows.iter().map(|r| json!({
            "delta": exact_string(&r.delta),
            "sample": r.sample,
            "residual": exact_string(&r.residual),
            "repair_d0": r.repair_d0.as_ref().map(exact_string),
            "success": r.success,
        })).collect::<Vec<_>>(),
    })
}

fn verify(v: &VerifyOpts) -> Result<i32, CliError> {
    let name = if v.name == "not-shkredov" { "square-diag" } else { v.name.as_str() };
    let n = v.n.unwrap_or_else(|| catalog::default_n(name));
    let r = catalog::verify(name, n).map_err(|e| match e {
        CatalogError::UnknownExample(_) => CliError::Parse { path: "example".into(), msg: e.to_string() },
        CatalogError::BadParameter { .. } => CliError::Parse { path: "--N".into(), msg: e.to_string() },
        other => CliError::Domain(other.to_string()),
    })?;
    let result = serde_json::to_value(&r).expect("verify reports serialize");
    let report = Report::new("verify", None, result, r.to_string());
    emit(v.out.as_deref(), v.json, &report)?;
    Ok(if r.passed() { 0 } else { 1 })
}

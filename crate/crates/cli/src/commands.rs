use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};
use torsionlab::families::{self, write_sweep_csv, SweepRecord};
use torsionlab::functionals::{
    alpha_q, conjecture_constant, f_q, f_q_uncertainty, finite_bound_check, polya_torsion_lower, ratio_checks,
    shape_measures, write_reports_csv, BoundReport,
};
use torsionlab::geometry::random_convex_polygon;
use torsionlab::io::{fmt_sig, read_profile};
use torsionlab::search::{hillclimb_polygon, search_triangles, SearchConfig, SearchMode};
use torsionlab::thin::{borell_check, is_concave, thin_limit_f_half};
use torsionlab::{Error, Shape};

use crate::manifest::RunManifest;
use crate::{EvalArgs, Family, Mode, SearchArgs, SweepArgs, ThinArgs, VerifyArgs};

type Outcome = torsionlab::Result<u8>;

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidShape(_)
        | Error::DegenerateInput(_)
        | Error::InvalidArgument(_)
        | Error::Parse(_)
        | Error::Io(_) => 2,
        Error::Precondition(_) | Error::Resolution { .. } | Error::Convergence(_) | Error::Solver(_) => 3,
    }
}

/// Creates the file, and its parent directories when missing.
fn create_out(path: &Path) -> std::io::Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json(path: &Path, v: &Value) -> std::io::Result<()> {
    let mut w = create_out(path)?;
    let mut text = serde_json::to_string_pretty(v).expect("json serializes");
    text.push('\n');
    w.write_all(text.as_bytes())?;
    w.flush()
}

fn finish(manifest: &RunManifest) -> torsionlab::Result<()> {
    if let Some(p) = manifest.write()? {
        eprintln!("manifest: {}", p.display());
    }
    Ok(())
}

pub fn eval(a: EvalArgs) -> Outcome {
    if !(a.q > 0.0) {
        return Err(Error::InvalidArgument(format!("q must be positive, got {}", a.q)));
    }
    if !(a.grid > 0.0) {
        return Err(Error::InvalidArgument(format!("grid must be positive, got {}", a.grid)));
    }
    let shape = Shape::read(&a.shape)?;
    let (m, sol) = shape_measures(&shape, a.grid, a.refine)?;
    let f = f_q(&m, a.q);
    let df = f_q_uncertainty(&m, a.q);
    let alpha = alpha_q(a.q, m.d);
    println!("d          {}", m.d);
    println!("perimeter  {}", fmt_sig(m.perimeter));
    println!("torsion    {} ± {}", fmt_sig(m.torsion), fmt_sig(m.torsion_error));
    println!("volume     {}", fmt_sig(m.volume));
    println!("alpha_q    {}", fmt_sig(alpha));
    println!("F_q        {} ± {}", fmt_sig(f), fmt_sig(df));
    if let Some(order) = sol.as_ref().and_then(|s| s.observed_order) {
        println!("order      {}", fmt_sig(order));
    }
    if let Some(out) = &a.out {
        let v = json!({
            "d": m.d,
            "q": a.q,
            "perimeter": m.perimeter,
            "torsion": m.torsion,
            "torsion_error": m.torsion_error,
            "volume": m.volume,
            "alpha_q": alpha,
            "f_q": f,
            "f_q_uncertainty": df,
        });
        write_json(out, &v)?;
        let mut man = RunManifest::new("eval", 0);
        man.param("shape", a.shape.display().to_string())
            .param("q", a.q)
            .param("grid", a.grid)
            .param("refine", a.refine);
        man.outputs.push(out.clone());
        finish(&man)?;
    }
    Ok(0)
}

pub fn sweep(a: SweepArgs) -> Outcome {
    let (name, rows) = match a.family {
        Family::Slab => ("slab", families::sweep_slab(a.q, a.d, &a.params)?),
        Family::Perforation => ("perforation", families::sweep_perforation(a.d, &a.params, a.q)?),
        Family::Cone => ("cone", families::sweep_cone(a.d, a.q, &a.params)?),
        Family::Wiggle => {
            if a.d != 2 {
                return Err(Error::InvalidArgument("wiggle sweeps are planar (d = 2)".into()));
            }
            let ns = a
                .params
                .iter()
                .map(|&p| {
                    if p >= 0.0 && p.fract() == 0.0 && p <= f64::from(u32::MAX) {
                        Ok(p as u32)
                    } else {
                        Err(Error::InvalidArgument(format!(
                            "wiggle counts must be integers, got {p}"
                        )))
                    }
                })
                .collect::<torsionlab::Result<Vec<u32>>>()?;
            ("wiggle", families::sweep_wiggle(&ns, a.amplitude, a.q, a.grid)?)
        }
    };
    match &a.out {
        Some(path) => {
            let mut w = create_out(path)?;
            write_sweep_csv(&mut w, &rows)?;
            w.flush()?;
            let mut man = RunManifest::new("sweep", 0);
            man.param("family", name)
                .param("q", a.q)
                .param("d", a.d)
                .param("params", a.params.clone());
            if matches!(a.family, Family::Wiggle) {
                man.param("amplitude", a.amplitude).param("grid", a.grid);
            }
            man.outputs.push(path.clone());
            finish(&man)?;
        }
        None => write_sweep_csv(std::io::stdout().lock(), &rows)?,
    }
    report_sweep(a.family, &rows, a.q, a.d);
    Ok(0)
}

fn report_sweep(family: Family, rows: &[SweepRecord], q: f64, d: usize) {
    match family {
        Family::Slab if rows.len() >= 2 => {
            if let Ok((slope, rms)) = families::sweep_slope(rows) {
                let expect = (2.0 * q - 1.0) * (d as f64 - 1.0) / d as f64;
                eprintln!(
                    "log-log slope {} (expected {}, rms residual {})",
                    fmt_sig(slope),
                    fmt_sig(expect),
                    fmt_sig(rms)
                );
            }
        }
        Family::Perforation if rows.len() >= 2 => {
            if let Ok((slope, rms)) = families::sweep_slope(rows) {
                eprintln!(
                    "log-log slope of f_q in c: {} (rms residual {})",
                    fmt_sig(slope),
                    fmt_sig(rms)
                );
            }
        }
        _ => {}
    }
    if let Some(last) = rows.last() {
        eprintln!(
            "last row: f_q = {}, reference = {}",
            fmt_sig(last.f_q),
            fmt_sig(last.reference)
        );
    }
}

/// Four checks on one random polygon.
fn verify_one(seed: u64, grid: f64, tol: f64) -> torsionlab::Result<Vec<BoundReport>> {
    let n = 3 + (seed % 10) as usize;
    let poly = random_convex_polygon(n, seed)?;
    let (m, _) = shape_measures(&Shape::Polygon(poly), grid, 1)?;
    let (iso, sv) = ratio_checks(&m);
    let mut out = vec![iso, sv, polya_torsion_lower(&m), finite_bound_check(&m)];
    for r in &mut out {
        r.satisfied |= r.margin >= -tol * r.bound.abs();
        r.name = format!("{}@{seed}", r.name);
    }
    Ok(out)
}

pub fn verify(a: VerifyArgs) -> Outcome {
    if a.n_shapes < 1 {
        return Err(Error::InvalidArgument("need at least one shape".into()));
    }
    if !(a.grid > 0.0) || !(a.tol >= 0.0) {
        return Err(Error::InvalidArgument(
            "grid must be positive and tol nonnegative".into(),
        ));
    }
    let seeds: Vec<u64> = (0..a.n_shapes as u64).map(|i| a.seed.wrapping_add(i)).collect();
    let per_shape = seeds
        .par_iter()
        .map(|&s| verify_one(s, a.grid, a.tol))
        .collect::<torsionlab::Result<Vec<_>>>()?;

    let names = ["isoperimetric", "saint_venant", "polya", "finite_bound"];
    let mut min_margin = [f64::INFINITY; 4];
    let mut offending = Vec::new();
    for (seed, reports) in seeds.iter().zip(&per_shape) {
        for (k, r) in reports.iter().enumerate() {
            min_margin[k] = min_margin[k].min(r.margin / r.bound.abs());
        }
        if reports.iter().any(|r| !r.satisfied) {
            offending.push(*seed);
        }
    }
    let all: Vec<BoundReport> = per_shape.into_iter().flatten().collect();
    match &a.out {
        Some(path) => {
            let mut w = create_out(path)?;
            write_reports_csv(&mut w, &all)?;
            w.flush()?;
            let mut man = RunManifest::new("verify", a.seed);
            man.param("n", a.n_shapes).param("grid", a.grid).param("tol", a.tol);
            man.outputs.push(path.clone());
            finish(&man)?;
        }
        None => write_reports_csv(std::io::stdout().lock(), &all)?,
    }
    let summary: Vec<String> = names
        .iter()
        .zip(min_margin)
        .map(|(n, m)| format!("{n}={}", fmt_sig_short(m)))
        .collect();
    eprintln!("min relative margins: {}", summary.join(" "));
    if offending.is_empty() {
        eprintln!("all {} shapes satisfy every inequality", a.n_shapes);
        Ok(0)
    } else {
        let list: Vec<String> = offending.iter().map(u64::to_string).collect();
        eprintln!("violations at seeds: {}", list.join(","));
        Ok(1)
    }
}

fn fmt_sig_short(x: f64) -> String {
    torsionlab::io::fmt_sig_digits(x, 6)
}

pub fn thin(a: ThinArgs) -> Outcome {
    let p = read_profile(&a.profile)?;
    let d = match a.d {
        Some(d) if d != p.d() => {
            return Err(Error::InvalidArgument(format!(
                "profile base gives d = {}, but --d {d} was requested",
                p.d()
            )))
        }
        Some(d) => d,
        None => p.d(),
    };
    let value = thin_limit_f_half(&p)?;
    let concave = is_concave(&p, 1000, a.seed);
    let borell = if concave { Some(borell_check(&p)?) } else { None };
    let conj = conjecture_constant(d);
    println!("d                {d}");
    println!("thin_limit_f_half {}", fmt_sig(value));
    println!("concave          {concave}");
    match &borell {
        Some(r) => println!("borell_margin    {} (satisfied: {})", fmt_sig(r.margin), r.satisfied),
        None => println!("borell_margin    skipped (profile not concave)"),
    }
    println!("conjecture       {}", fmt_sig(conj));
    if let Some(out) = &a.out {
        let mut v = json!({
            "d": d,
            "thin_limit_f_half": value,
            "concave": concave,
            "conjecture": conj,
        });
        if let Some(r) = &borell {
            v["borell_margin"] = r.margin.into();
            v["borell_satisfied"] = r.satisfied.into();
        }
        write_json(out, &v)?;
        let mut man = RunManifest::new("thin", a.seed);
        man.param("profile", a.profile.display().to_string()).param("d", d);
        man.outputs.push(out.clone());
        finish(&man)?;
    }
    Ok(if borell.is_some_and(|r| !r.satisfied) { 1 } else { 0 })
}

pub fn search(a: SearchArgs) -> Outcome {
    let result = match a.mode {
        Mode::Triangles => search_triangles(&a.params, a.grid)?,
        Mode::Polygon => hillclimb_polygon(&SearchConfig {
            mode: SearchMode::Polygon,
            n_vertices: a.n_vertices,
            max_iters: a.iters,
            init_step: a.step,
            shrink: a.shrink,
            seed: a.seed,
            grid_h: a.grid,
            ..SearchConfig::default()
        })?,
    };
    if result.resolution_limited {
        eprintln!(
            "warning: resolution limit reached after {} evaluations",
            result.evaluations
        );
    }
    println!("best_value  {}", fmt_sig(result.best_value));
    println!("evaluations {}", result.evaluations);
    println!("vertices    {}", result.best_shape.len());
    let v = result.to_json();
    match &a.out {
        Some(path) => {
            write_json(path, &v)?;
            let mut man = RunManifest::new("search", a.seed);
            match a.mode {
                Mode::Triangles => man.param("mode", "triangles").param("aspects", a.params.clone()),
                Mode::Polygon => man
                    .param("mode", "polygon")
                    .param("n_vertices", a.n_vertices)
                    .param("iters", a.iters)
                    .param("step", a.step)
                    .param("shrink", a.shrink),
            };
            man.param("grid", a.grid);
            man.outputs.push(path.clone());
            finish(&man)?;
        }
        None => println!("{}", serde_json::to_string(&v).expect("json serializes")),
    }
    Ok(0)
}

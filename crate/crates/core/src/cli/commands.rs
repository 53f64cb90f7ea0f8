use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use super::{load_system, resolve_grid, Command, Common, Format, GridArgs, OutputFile};
use crate::cocycle::{lyapunov_profile, uniformity_spread, SpreadParams};
use crate::error::{Error, Result};
use crate::grid::EnergyGrid;
use crate::output::{fmt_f64, json_document, CsvWriter, Metadata};
use crate::spectrum::{
    cantor_diagnostic, compare_spectra, epsilon_rule, finite_section_with, lyapunov_zero_set,
    trace_spectrum, SectionOptions, SpectrumEstimate,
};
use crate::subshifts::{legal_words_up_to, pw_report, repetitivity_report, SubshiftSystem};

/// Grid points used by `diagnose` for the uniformity table unless overridden.
const DIAGNOSE_POINTS: usize = 12;

pub fn execute(command: &Command) -> Result<Vec<OutputFile>> {
    let started = Instant::now();
    let mut files = match command {
        Command::Generate { common, length } => generate(common, *length)?,
        Command::Lyapunov {
            common,
            grid,
            n,
            spread_n,
            budget,
        } => lyapunov(common, grid, *n, *spread_n, *budget)?,
        Command::Spectrum {
            common,
            grid,
            n,
            epsilon,
            length,
            depth,
            interior_filter,
        } => spectrum(common, grid, *n, *epsilon, *length, *depth, *interior_filter)?,
        Command::Measure {
            common,
            grid,
            n,
            epsilon,
        } => measure(common, grid, n, *epsilon)?,
        Command::Diagnose {
            common,
            grid,
            n_max,
            length,
            depth,
            n,
            budget,
        } => diagnose(common, grid, *n_max, *length, *depth, n, *budget)?,
        Command::Compare { common, a, b } => compare(common, a, b)?,
    };
    if command.common().wall_time {
        let secs = started.elapsed().as_secs_f64();
        for f in &mut files {
            f.contents = stamp_wall_time(&f.contents, secs);
        }
    }
    Ok(files)
}

/// Rewrites the metadata of a finished document to carry the wall time.
fn stamp_wall_time(contents: &str, secs: f64) -> String {
    if let Some(rest) = contents.strip_prefix("# metadata: ") {
        let (line, tail) = rest.split_once('\n').unwrap_or((rest, ""));
        if let Ok(mut meta) = serde_json::from_str::<Metadata>(line) {
            meta.wall_time_s = Some(secs);
            return format!("{}{tail}", meta.csv_header());
        }
    } else if let Ok(mut v) = serde_json::from_str::<Value>(contents) {
        if let Some(m) = v.get_mut("metadata").and_then(Value::as_object_mut) {
            m.insert("wall_time_s".into(), json!(secs));
            if let Ok(mut s) = serde_json::to_string_pretty(&v) {
                s.push('\n');
                return s;
            }
        }
    }
    contents.to_string()
}

fn metadata(system: &SubshiftSystem, command: &str) -> Metadata {
    Metadata::new(system.label(), command)
}

fn grid_params(meta: Metadata, grid: &EnergyGrid) -> Metadata {
    meta.param("emin", grid.e_min())
        .param("emax", grid.e_max())
        .param("points", grid.points())
}

fn file(name: &str, format: Format, contents: String) -> OutputFile {
    OutputFile {
        name: format!("{name}.{}", format.extension()),
        contents,
    }
}

fn json_file<T: Serialize>(name: &str, meta: &Metadata, payload: &T) -> Result<OutputFile> {
    Ok(file(name, Format::Json, json_document(meta, payload)?))
}

fn generate(common: &Common, length: usize) -> Result<Vec<OutputFile>> {
    let system = load_system(common)?;
    let word = system.canonical_window(length)?;
    let meta = metadata(&system, "generate")
        .param("length", length)
        .param("start", system.canonical_start());
    let contents = match common.format {
        Format::Csv => format!("{}{word}\n", meta.csv_header()),
        Format::Json => json_document(&meta, &json!({ "word": word.to_string() }))?,
    };
    Ok(vec![OutputFile {
        name: format!("word.{}", if common.format == Format::Csv { "txt" } else { "json" }),
        contents,
    }])
}

fn lyapunov(
    common: &Common,
    grid: &GridArgs,
    n: usize,
    spread_n: usize,
    budget: usize,
) -> Result<Vec<OutputFile>> {
    let system = load_system(common)?;
    let grid = resolve_grid(grid, &system)?;
    let params = SpreadParams { n: spread_n, budget };
    let profile = lyapunov_profile(&system, &grid, n, Some(params))?;
    let meta = grid_params(metadata(&system, "lyapunov"), &grid)
        .param("N", n)
        .param("spread_n", spread_n)
        .param("budget", budget);
    Ok(vec![match common.format {
        Format::Csv => file("profile", Format::Csv, profile.to_csv(&meta)),
        Format::Json => json_file("profile", &meta, &json!({ "profile": profile }))?,
    }])
}

fn spectrum_file(name: &str, format: Format, meta: &Metadata, s: &SpectrumEstimate) -> Result<OutputFile> {
    let meta = meta.clone().param("method", s.method.as_str());
    Ok(match format {
        Format::Csv => file(name, Format::Csv, s.to_csv(&meta)),
        Format::Json => json_file(name, &meta, &json!({ "spectrum": s }))?,
    })
}

fn spectrum(
    common: &Common,
    grid: &GridArgs,
    n: usize,
    epsilon: Option<f64>,
    length: usize,
    depth: Option<usize>,
    interior: bool,
) -> Result<Vec<OutputFile>> {
    let system = load_system(common)?;
    let grid = resolve_grid(grid, &system)?;
    let eps_at = |n: usize| epsilon.unwrap_or_else(|| epsilon_rule(n));

    let section = system.canonical_window(length)?;
    let eig = finite_section_with(
        &section,
        system.potential(),
        SectionOptions {
            interior_filter: interior,
            ..SectionOptions::default()
        },
    )?;
    let mut fs_params = std::collections::BTreeMap::new();
    fs_params.insert("L".to_string(), json!(length));
    fs_params.insert("interior_filter".to_string(), json!(interior));
    let fs = SpectrumEstimate::from_eigenvalues(grid, &eig, fs_params)?;

    let (k, period) = match depth {
        Some(k) => (k, system.approximant(k)?),
        None => system.approximant_at_least(length)?,
    };
    let mut tr = trace_spectrum(&period, system.potential(), &grid)?;
    tr.parameters.insert("depth".into(), json!(k));

    // three refinement levels ending at N
    let mut levels = Vec::new();
    for m in [n / 4, n / 2, n] {
        let m = m.max(1);
        let profile = lyapunov_profile(&system, &grid, m, None)?;
        levels.push(lyapunov_zero_set(&profile, eps_at(m))?);
    }
    let zero = levels.last().cloned().expect("three levels");
    let cantor = cantor_diagnostic(&levels)?;

    let comparisons = json!({
        "finite_section_vs_lyapunov_zero": compare_spectra(&fs, &zero)?,
        "trace_vs_lyapunov_zero": compare_spectra(&tr, &zero)?,
        "finite_section_vs_trace": compare_spectra(&fs, &tr)?,
    });
    let meta = grid_params(metadata(&system, "spectrum"), &grid)
        .param("N", n)
        .param("epsilon", eps_at(n))
        .param("L", length)
        .param("depth", k)
        .param("interior_filter", interior);
    Ok(vec![
        spectrum_file("finite_section", common.format, &meta, &fs)?,
        spectrum_file("trace", common.format, &meta, &tr)?,
        spectrum_file("lyapunov_zero", common.format, &meta, &zero)?,
        json_file("comparison", &meta, &comparisons)?,
        json_file("cantor", &meta, &cantor)?,
    ])
}

fn measure(common: &Common, grid: &GridArgs, ns: &[usize], epsilon: Option<f64>) -> Result<Vec<OutputFile>> {
    let system = load_system(common)?;
    let grid = resolve_grid(grid, &system)?;
    let mut levels = Vec::with_capacity(ns.len());
    for &n in ns {
        let profile = lyapunov_profile(&system, &grid, n, None)?;
        levels.push(lyapunov_zero_set(&profile, epsilon.unwrap_or_else(|| epsilon_rule(n)))?);
    }
    let cantor = cantor_diagnostic(&levels)?;
    let meta = grid_params(metadata(&system, "measure"), &grid)
        .param("N", ns.to_vec())
        .param("epsilon", epsilon.map(Value::from).unwrap_or_else(|| json!("max(0.02, 4 ln N / N)")));
    let rows: Vec<Value> = ns
        .iter()
        .zip(&levels)
        .map(|(&n, s)| {
            json!({
                "N": n,
                "epsilon": s.parameters["epsilon"],
                "measure": s.measure,
                "gap_count": s.gap_count(),
                "largest_gap": s.largest_gap(),
            })
        })
        .collect();
    Ok(match common.format {
        Format::Csv => {
            let mut w = CsvWriter::new(&meta, &["N", "epsilon", "measure", "gap_count", "largest_gap"]);
            for (&n, s) in ns.iter().zip(&levels) {
                w.row(&[
                    n.to_string(),
                    fmt_f64(s.parameters["epsilon"].as_f64().unwrap_or(f64::NAN)),
                    fmt_f64(s.measure),
                    s.gap_count().to_string(),
                    fmt_f64(s.largest_gap()),
                ]);
            }
            vec![file("measure", Format::Csv, w.finish())]
        }
        Format::Json => vec![json_file("measure", &meta, &json!({ "levels": rows, "cantor": cantor }))?],
    })
}

fn diagnose(
    common: &Common,
    grid: &GridArgs,
    n_max: usize,
    length: usize,
    depth: usize,
    ns: &[usize],
    budget: usize,
) -> Result<Vec<OutputFile>> {
    let system = load_system(common)?;
    let grid_args = GridArgs {
        points: grid.points.or(Some(DIAGNOSE_POINTS)),
        ..grid.clone()
    };
    let grid = resolve_grid(&grid_args, &system)?;
    if depth == 0 {
        return Err(Error::InvalidArgument("--depth must be >= 1".into()));
    }

    let rep = repetitivity_report(&system, n_max)?;
    let words = legal_words_up_to(&system, depth, length)?;
    let mut lengths = Vec::new();
    let mut l = depth.max(1);
    while l <= length / 4 {
        lengths.push(l);
        l *= 2;
    }
    if lengths.is_empty() {
        return Err(Error::InvalidArgument("--length too short for the weight table".into()));
    }
    let pw = pw_report(&system, &words, &lengths, length)?;

    let mut uniformity = Vec::new();
    for e in grid.energies() {
        for &n in ns {
            let s = uniformity_spread(&system, e, n, budget)?;
            uniformity.push((e, n, s));
        }
    }

    let meta = grid_params(metadata(&system, "diagnose"), &grid)
        .param("n_max", n_max)
        .param("length", length)
        .param("depth", depth)
        .param("N", ns.to_vec())
        .param("budget", budget);
    Ok(match common.format {
        Format::Json => {
            let table: Vec<Value> = uniformity
                .iter()
                .map(|(e, n, s)| json!({ "E": e, "n": n, "spread": s.spread, "periodic": s.periodic }))
                .collect();
            vec![json_file(
                "diagnose",
                &meta,
                &json!({ "repetitivity": rep, "pw": pw, "uniformity": table }),
            )?]
        }
        Format::Csv => {
            let meta_r = meta.clone().param("kappa_estimate", rep.kappa_estimate);
            let mut r = CsvWriter::new(&meta_r, &["n", "words", "R", "ratio"]);
            for row in &rep.rows {
                r.row(&[
                    row.n.to_string(),
                    row.words.to_string(),
                    row.r.map(|x| x.to_string()).unwrap_or_default(),
                    row.ratio.map(fmt_f64).unwrap_or_default(),
                ]);
            }
            let mut p = CsvWriter::new(&meta.clone().param("c_estimate", pw.c_estimate), &["word", "length", "value", "running_inf"]);
            for row in &pw.rows {
                for j in 0..row.lengths.len() {
                    p.row(&[
                        row.word.clone(),
                        row.lengths[j].to_string(),
                        fmt_f64(row.values[j]),
                        fmt_f64(row.running_inf[j]),
                    ]);
                }
            }
            let mut u = CsvWriter::new(&meta, &["E", "n", "spread", "periodic"]);
            for (e, n, s) in &uniformity {
                u.row(&[fmt_f64(*e), n.to_string(), fmt_f64(s.spread), u8::from(s.periodic).to_string()]);
            }
            vec![
                file("repetitivity", Format::Csv, r.finish()),
                file("pw", Format::Csv, p.finish()),
                file("uniformity", Format::Csv, u.finish()),
            ]
        }
    })
}

fn compare(common: &Common, a: &std::path::Path, b: &std::path::Path) -> Result<Vec<OutputFile>> {
    let read = |p: &std::path::Path| -> Result<SpectrumEstimate> {
        let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        SpectrumEstimate::from_json(&text)
    };
    let (sa, sb) = (read(a)?, read(b)?);
    let report = compare_spectra(&sa, &sb)?;
    let label = common.system.clone().unwrap_or_else(|| "comparison".into());
    let meta = Metadata::new(label, "compare")
        .param("a", a.display().to_string())
        .param("b", b.display().to_string());
    Ok(vec![json_file("comparison", &meta, &report)?])
}

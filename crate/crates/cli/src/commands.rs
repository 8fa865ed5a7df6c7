use std::fs;
use std::path::Path;

use explab_core::expharness::{
    builtin_scenario, builtin_scenarios, metric_names, run_scenario_with, HarnessError, Report, RunOptions, Scenario,
};
use explab_core::geomdecomp::{
    band_partition, blaschke_curvature, extract_product, pinned_distance_map, whitney_decompose, EmptyRegion,
    GeomError, LinearProjection, OpenUnitSquare, PolyMap, PuncturedSquare, Region, SmoothMap2,
};
use explab_core::gridset::{
    energy_count, gen_ap, gen_cantor, image_set, nonconcentration_exponent, GridError, GridSet1D, GridSet2D, Scale,
};
use explab_core::polyexpr::{
    classify_special_form, fmt_rational, hf_general, hf_poly, mp_numerator, parse_poly2, parse_poly4,
    PolyError, Var,
};

use crate::args::{Cli, Command, Generator, SetArgs};
use crate::output::{Output, Record, Val};

/// Failure of a command, with its exit status.
#[derive(Debug)]
pub enum CliError {
    /// Malformed input: bad syntax, missing or unreadable arguments (status 2).
    Usage(String),
    /// Well-formed input violating a precondition (status 1).
    Domain(String),
}

impl CliError {
    pub fn status(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => m,
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        CliError::Usage(format!("cannot parse polynomial: {e}"))
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        match e {
            GridError::Parse { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        match e {
            GeomError::Parse { .. } => CliError::Usage(e.to_string()),
            GeomError::Grid(g) => g.into(),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Poly(p) => p.into(),
            HarnessError::Grid(g) => g.into(),
            HarnessError::Geom(g) => g.into(),
            HarnessError::InvalidParameter { .. } => CliError::Domain(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| CliError::Domain(format!("cannot write {}: {e}", path.display())))
}

fn scale(k: u32) -> Result<Scale, CliError> {
    Ok(Scale::new(k)?)
}

fn parse_point(s: &str) -> Result<[f64; 2], CliError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("'{s}' is not a point x,y")))?;
    match v[..] {
        [x, y] if x.is_finite() && y.is_finite() => Ok([x, y]),
        _ => Err(usage(format!("'{s}' is not a point x,y"))),
    }
}

/// `pin:a,b`, `line:theta`, or a polynomial in x, y.
pub fn parse_map(spec: &str) -> Result<Box<dyn SmoothMap2>, CliError> {
    if let Some(p) = spec.strip_prefix("pin:") {
        Ok(Box::new(pinned_distance_map(parse_point(p)?)))
    } else if let Some(t) = spec.strip_prefix("line:") {
        let theta: f64 = t.trim().parse().map_err(|_| usage(format!("bad angle '{t}'")))?;
        Ok(Box::new(LinearProjection::new(theta)))
    } else {
        Ok(Box::new(PolyMap::new(parse_poly2(spec)?)))
    }
}

pub fn build_set(a: &SetArgs) -> Result<GridSet1D, CliError> {
    if let Some(path) = &a.set_file {
        return Ok(GridSet1D::from_text(&read(path)?)?);
    }
    let need_k = || a.k.ok_or_else(|| usage("--k is required for this generator"));
    match a.generator {
        Generator::Ap => {
            let alpha = a.alpha.ok_or_else(|| usage("--alpha is required for --gen ap"))?;
            Ok(gen_ap(alpha, a.eta, scale(need_k()?)?)?)
        }
        Generator::Full => Ok(GridSet1D::full(scale(need_k()?)?)),
        Generator::Cantor => {
            let pattern = a.pattern.as_deref().ok_or_else(|| usage("--pattern is required for --gen cantor"))?;
            let digits: Vec<u64> = pattern
                .split(',')
                .map(|t| t.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| usage(format!("bad pattern '{pattern}'")))?;
            let base = a.base.ok_or_else(|| usage("--base is required for --gen cantor"))?;
            let depth = a.depth.ok_or_else(|| usage("--depth is required for --gen cantor"))?;
            Ok(gen_cantor(&digits, base, depth)?)
        }
    }
}

fn exponent(count: f64, k: u32) -> f64 {
    count.log2() / k as f64
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    Ok(match &cli.command {
        Command::Classify { poly } => Output::Record(classify(poly)?),
        Command::Mp { poly } => {
            let p = parse_poly2(poly)?;
            let m = mp_numerator(&p);
            Output::Record(
                Record::new()
                    .text("poly", &p)
                    .text("mp", &m)
                    .int("degree", m.degree().map_or(-1, i64::from)),
            )
        }
        Command::Hf { poly, general } => {
            let h = if *general { hf_general(&parse_poly4(poly)?) } else { hf_poly(&parse_poly2(poly)?) };
            Output::Record(
                Record::new()
                    .text("input", poly)
                    .text("hf", &h)
                    .with("identically_zero", Val::Bool(h.is_zero())),
            )
        }
        Command::Curvature { phi1, phi2, phi3, at } => {
            let (f1, f2, f3) = (parse_map(phi1)?, parse_map(phi2)?, parse_map(phi3)?);
            let p = parse_point(at)?;
            let chart = f1.as_coordinate() == Some(Var::X) && f2.as_coordinate() == Some(Var::Y);
            let c = blaschke_curvature(f1.as_ref(), f2.as_ref(), f3.as_ref(), p)?;
            Output::Record(
                Record::new()
                    .float("x", p[0])
                    .float("y", p[1])
                    .float("curvature", c)
                    .text("method", if chart { "chart" } else { "numeric" }),
            )
        }
        Command::Cover { set, coarse } => {
            let a = build_set(set)?;
            let k = a.scale().k();
            let c = coarse.unwrap_or(k);
            let n = a.covering_number(c)?;
            Output::Record(
                Record::new()
                    .int("k", k)
                    .int("coarse", c)
                    .int("cells", a.len() as u64)
                    .int("covering_number", n)
                    .float("dimension_estimate", exponent(n as f64, c)),
            )
        }
        Command::Nonconc { set, kappa, target } => {
            let a = build_set(set)?;
            if a.is_empty() {
                return Err(CliError::Domain("set is empty".into()));
            }
            let k = a.scale().k();
            let alpha = target.unwrap_or_else(|| exponent(a.len() as f64, k));
            let nc = nonconcentration_exponent(&a, *kappa, alpha)?;
            Output::Record(
                Record::new()
                    .int("k", k)
                    .int("cells", a.len() as u64)
                    .float("kappa", *kappa)
                    .float("alpha", alpha)
                    .float("eta", nc.eta)
                    .float("raw_eta", nc.raw_eta)
                    .with("floored", Val::Bool(nc.floored))
                    .int("worst_level", nc.worst_level),
            )
        }
        Command::Image { poly, set } => {
            let p = parse_poly2(poly)?;
            let a = build_set(set)?;
            let k = a.scale().k();
            let img = image_set(&p, &a, &a)?;
            Output::Record(
                Record::new()
                    .int("k", k)
                    .int("cells", a.len() as u64)
                    .int("image_count", img.count() as u64)
                    .float("image_exponent", exponent(img.count() as f64, k))
                    .float("set_exponent", exponent(a.len() as f64, k))
                    .text("offset", fmt_rational(img.grid.offset()))
                    .int("divisor_log2", img.grid.m()),
            )
        }
        Command::Energy { poly, set, hf_min } => {
            let p = parse_poly2(poly)?;
            let a = build_set(set)?;
            let k = a.scale().k();
            let e = energy_count(&p, &a, &a, *hf_min)?;
            let mut r = Record::new()
                .int("k", k)
                .int("cells", a.len() as u64)
                .with("energy", Val::Int(e as i128))
                .float("energy_exponent", exponent(e as f64, k))
                .float("set_exponent", exponent(a.len() as f64, k));
            if let Some(h) = hf_min {
                r = r.float("hf_min", *h);
            }
            Output::Record(r)
        }
        Command::Whitney { region, k_max } => {
            let omega = parse_region(region)?;
            let d = whitney_decompose(omega.as_ref(), scale(*k_max)?);
            let hist: Vec<u64> = d.depth_histogram().into_iter().map(|n| n as u64).collect();
            Output::Record(
                Record::new()
                    .int("cubes", d.cubes.len() as u64)
                    .int("flagged", d.cubes.iter().filter(|c| c.flagged).count() as u64)
                    .int("leftover_cells", d.leftover.len() as u64)
                    .with("depth_histogram", Val::List(hist))
                    .body(d.to_text()),
            )
        }
        Command::Bands { fs, w, k, decomposition } => {
            let maps = fs.iter().map(|s| parse_map(s)).collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&dyn SmoothMap2> = maps.iter().map(|m| m.as_ref()).collect();
            let sc = scale(*k)?;
            let bp = band_partition(&refs, *w, sc, &GridSet2D::full(sc))?;
            let s = bp.summary();
            let mut r = Record::new()
                .int("k", *k)
                .float("threshold", bp.threshold)
                .int("cubes", s.cubes as u64)
                .int("leftover_cells", s.leftover_cells as u64)
                .float("leftover_fraction", s.leftover_fraction);
            if *decomposition {
                r = r.body(bp.decomposition.to_text());
            }
            Output::Record(r)
        }
        Command::Extract { set_file, kappa } => {
            let x = GridSet2D::from_text(&read(set_file)?)?;
            let ex = extract_product(&x, *kappa)?;
            let rep = ex.report;
            Output::Record(
                Record::new()
                    .int("k", x.scale().k())
                    .int("x_cells", rep.x_cells as u64)
                    .int("a_cells", ex.a.len() as u64)
                    .int("b_cells", ex.b.len() as u64)
                    .int("intersection", rep.intersection as u64)
                    .int("rounds", rep.rounds as u64)
                    .float("column_threshold", rep.column_threshold)
                    .float("row_threshold", rep.row_threshold)
                    .float("eta_a", rep.eta_a)
                    .float("eta_b", rep.eta_b)
                    .with("a", Val::List(ex.a.cells().to_vec()))
                    .with("b", Val::List(ex.b.cells().to_vec())),
            )
        }
        Command::Scenario { name, csv_dir, gnuplot_dir, strict, timing } => {
            let s = load_scenario(name)?;
            let report = run_scenario_with(&s, RunOptions { timing: *timing })?;
            let precision = cli.precision as usize;
            if let Some(dir) = csv_dir {
                for t in &report.tables {
                    write(&dir.join(format!("{}_{}.csv", report.scenario, t.name)), &t.to_csv(precision))?;
                }
            }
            if let Some(dir) = gnuplot_dir {
                for (file, data) in report.gnuplot_files(precision) {
                    write(&dir.join(file), &data)?;
                }
            }
            if *strict && !report.all_passed() {
                return Err(CliError::Domain(failed_summary(&report)));
            }
            Output::Report(Box::new(report))
        }
        Command::ListScenarios => Output::Rows {
            columns: vec!["name", "kind", "expectations", "metrics"],
            rows: builtin_scenarios()
                .iter()
                .map(|s| {
                    vec![
                        Val::Text(s.name.clone()),
                        Val::Text(s.kind.name().to_string()),
                        Val::Int(s.expectations.len() as i128),
                        Val::Text(metric_names(s).join(" ")),
                    ]
                })
                .collect(),
        },
    })
}

fn classify(poly: &str) -> Result<Record, CliError> {
    let p = parse_poly2(poly)?;
    let c = classify_special_form(&p);
    let mut r = Record::new()
        .text("verdict", format!("{:?}", c.verdict()))
        .text("reason", format!("{:?}", c.reason()));
    if let Some(w) = c.witness() {
        r = r.int("witness_degree", w.degree().unwrap_or(0)).text("witness", w);
    }
    Ok(r)
}

fn parse_region(spec: &str) -> Result<Box<dyn Region>, CliError> {
    match spec {
        "square" => Ok(Box::new(OpenUnitSquare)),
        "empty" => Ok(Box::new(EmptyRegion)),
        _ => match spec.strip_prefix("punctured:") {
            Some(p) => Ok(Box::new(PuncturedSquare { puncture: parse_point(p)? })),
            None => Err(usage(format!("unknown region '{spec}' (square, empty or punctured:x,y)"))),
        },
    }
}

fn load_scenario(name: &str) -> Result<Scenario, CliError> {
    match builtin_scenario(name) {
        Ok(s) => Ok(s),
        Err(_) if Path::new(name).exists() => Ok(Scenario::from_text(&read(Path::new(name))?)?),
        Err(e) => Err(e.into()),
    }
}

fn failed_summary(r: &Report) -> String {
    let failed: Vec<String> = r
        .outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.expectation.to_string())
        .collect();
    format!("scenario {} failed: {}", r.scenario, failed.join("; "))
}

//! Executing scenarios.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::report::{Outcome, Report, Stats, Table};
use super::scenario::{parse_f64, Kind, Scenario};
use super::HarnessError;
use crate::geomdecomp::{blaschke_curvature, pinned_distance_map, smooth_image, PinnedDistance, Rect, SmoothMap2};
use crate::gridset::{
    energy_count, exponent_regression, gen_ap, gen_cantor, image_set, nonconcentration_exponent,
    nonconcentration_exponent_2d, ExponentFit, GridSet1D, GridSet2D, Scale, MAX_SCALE,
};
use crate::polyexpr::{parse_poly2, Poly2, Var};

/// Constant in the Cauchy-Schwarz consistency check
/// `E(P(A, B)) >= CS_CONSTANT c E(A x B)^2 / energy`, with `c` and `E(A x B)`
/// taken over the cell pairs where the gradient is at least `c`.
pub const CS_CONSTANT: f64 = 1.0 / 64.0;

pub(crate) const GROWTH_PARAMS: &[&str] = &[
    "poly",
    "gen",
    "alpha",
    "eta",
    "kappa",
    "pattern",
    "base",
    "scales",
    "measure",
    "compare_poly",
    "restrict_exponent",
    "restrict_scales",
    "shallow_scales",
    "hf_min",
];

pub(crate) const WEB_PARAMS: &[&str] = &[
    "pins",
    "domain",
    "pattern",
    "base",
    "alpha",
    "scales",
    "curvature_samples",
    "seed",
];

/// Metrics a scenario run will produce, given its parameters.
pub fn metric_names(s: &Scenario) -> Vec<&'static str> {
    let has = |k: &str| s.params.contains_key(k);
    let mut m = Vec::new();
    match s.kind {
        Kind::Growth => {
            let measures = s.get("measure").unwrap_or("image,energy");
            let energy = measures.split(',').any(|t| t.trim() == "energy");
            m.extend(["image_exponent", "nonconc_eta"]);
            if energy {
                m.extend(["energy_exponent", "cs_violations", "cs_min_ratio"]);
                if has("hf_min") {
                    m.push("filtered_energy_exponent");
                }
            }
            if has("compare_poly") {
                m.extend(["compare_image_exponent", "image_gap"]);
                if energy {
                    m.extend(["compare_energy_exponent", "energy_order_violations"]);
                }
            }
            if has("restrict_exponent") {
                m.push("restricted_energy_exponent");
            }
            if has("shallow_scales") {
                m.push("shallow_image_exponent");
                if has("compare_poly") {
                    m.extend(["shallow_compare_exponent", "shallow_gap"]);
                }
            }
        }
        Kind::Web => {
            m.extend([
                "margin_min",
                "margin_monotone",
                "image3_exponent",
                "phi12_excess",
                "max_margin_min",
                "eta_x_max",
            ]);
            if has("curvature_samples") {
                m.extend(["curvature_nonzero_fraction", "curvature_min_abs"]);
            }
        }
    }
    m
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Record wall-clock time in the report (makes reports differ run to run).
    pub timing: bool,
}

/// Runs a scenario with default options; the report is reproducible.
pub fn run_scenario(s: &Scenario) -> Result<Report, HarnessError> {
    run_scenario_with(s, RunOptions::default())
}

pub fn run_scenario_with(s: &Scenario, opts: RunOptions) -> Result<Report, HarnessError> {
    s.validate()?;
    let start = Instant::now();
    let mut out = match s.kind {
        Kind::Growth => run_growth(s)?,
        Kind::Web => run_web(s)?,
    };
    let outcomes = s
        .expectations
        .iter()
        .map(|e| {
            let measured = out.metrics.get(&e.metric).copied();
            Outcome {
                expectation: e.clone(),
                measured,
                passed: measured.is_some_and(|m| e.comparator.holds(m, e.target, e.tolerance)),
            }
        })
        .collect();
    if opts.timing {
        out.stats.wall_clock_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(Report {
        schema: super::scenario::SCHEMA_VERSION,
        scenario: s.name.clone(),
        kind: s.kind,
        params: s.params.clone(),
        tables: out.tables,
        fits: out.fits,
        metrics: out.metrics,
        outcomes,
        stats: out.stats,
    })
}

struct Partial {
    tables: Vec<Table>,
    fits: BTreeMap<String, ExponentFit>,
    metrics: BTreeMap<String, f64>,
    stats: Stats,
}

fn invalid(key: &str, message: impl Into<String>) -> HarnessError {
    HarnessError::InvalidParameter {
        key: key.to_string(),
        message: message.into(),
    }
}

fn required<'a>(s: &'a Scenario, key: &str) -> Result<&'a str, HarnessError> {
    s.get(key).ok_or_else(|| HarnessError::MissingParameter(key.to_string()))
}

fn number(s: &Scenario, key: &str, default: Option<f64>) -> Result<f64, HarnessError> {
    match s.get(key) {
        Some(v) => parse_f64(v).map_err(|m| invalid(key, m)),
        None => default.ok_or_else(|| HarnessError::MissingParameter(key.to_string())),
    }
}

/// `a,b,c`, `a..b` or `a..b:step`.
pub fn parse_scales(text: &str) -> Result<Vec<u32>, String> {
    let text = text.trim();
    let ks: Vec<u32> = if let Some((a, rest)) = text.split_once("..") {
        let (b, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let p = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("bad scale range '{text}'"));
        let (a, b, step) = (p(a)?, p(b)?, p(step)?);
        if step == 0 || a > b {
            return Err(format!("bad scale range '{text}'"));
        }
        (a..=b).step_by(step as usize).collect()
    } else {
        text.split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad scale '{t}'")))
            .collect::<Result<_, _>>()?
    };
    if let Some(k) = ks.iter().find(|&&k| !(1..=MAX_SCALE).contains(&k)) {
        return Err(format!("scale {k} outside 1..={MAX_SCALE}"));
    }
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("scales '{text}' must be strictly increasing"));
    }
    Ok(ks)
}

fn scales(s: &Scenario, key: &str) -> Result<Vec<u32>, HarnessError> {
    parse_scales(required(s, key)?).map_err(|m| invalid(key, m))
}

fn poly(s: &Scenario, key: &str) -> Result<Poly2, HarnessError> {
    Ok(parse_poly2(required(s, key)?)?)
}

fn fit(points: Vec<(f64, f64)>) -> Result<ExponentFit, HarnessError> {
    Ok(exponent_regression(&points)?)
}

/// Cantor-type set at scale `k`: generated at the next depth whose scale
/// reaches `k`, then coarsened.
fn cantor_at(pattern: &[u64], base: u64, k: u32) -> Result<GridSet1D, HarnessError> {
    let bits = base.trailing_zeros();
    if !base.is_power_of_two() || bits == 0 {
        return Err(invalid("base", format!("{base} is not a power of two >= 2")));
    }
    let depth = k.div_ceil(bits);
    if depth * bits > MAX_SCALE {
        return Err(invalid("base", format!("depth {depth} at base {base} exceeds the finest scale")));
    }
    let set = gen_cantor(pattern, base, depth)?;
    Ok(if depth * bits == k { set } else { set.coarsen(k)? })
}

fn pattern(s: &Scenario) -> Result<(Vec<u64>, u64), HarnessError> {
    let p = required(s, "pattern")?
        .split(',')
        .map(|t| t.trim().parse::<u64>().map_err(|_| invalid("pattern", format!("bad digit '{t}'"))))
        .collect::<Result<Vec<_>, _>>()?;
    let base = number(s, "base", None)?;
    if base.fract() != 0.0 || base < 2.0 {
        return Err(invalid("base", format!("{base} is not an integer >= 2")));
    }
    Ok((p, base as u64))
}

enum Generator {
    Ap { alpha: f64, eta: f64 },
    Cantor { pattern: Vec<u64>, base: u64 },
}

impl Generator {
    fn from_scenario(s: &Scenario) -> Result<Self, HarnessError> {
        match s.get("gen").unwrap_or("ap") {
            "ap" => {
                let alpha = number(s, "alpha", None)?;
                let eta = number(s, "eta", Some(0.0))?;
                if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&eta) || alpha + eta > 1.0 {
                    return Err(invalid(
                        "alpha",
                        format!("need 0 <= alpha, eta and alpha + eta <= 1, got alpha={alpha}, eta={eta}"),
                    ));
                }
                Ok(Generator::Ap { alpha, eta })
            }
            "cantor" => {
                let (pattern, base) = pattern(s)?;
                Ok(Generator::Cantor { pattern, base })
            }
            other => Err(invalid("gen", format!("unknown generator '{other}' (expected ap or cantor)"))),
        }
    }

    fn at(&self, k: u32) -> Result<GridSet1D, HarnessError> {
        match self {
            Generator::Ap { alpha, eta } => Ok(gen_ap(*alpha, *eta, Scale::new(k)?)?),
            Generator::Cantor { pattern, base } => cantor_at(pattern, *base, k),
        }
    }

    /// Target dimension of the set at scale `k`.
    fn alpha(&self, set: &GridSet1D) -> f64 {
        match self {
            Generator::Ap { alpha, .. } => *alpha,
            Generator::Cantor { .. } => (set.len() as f64).log2() / set.scale().k() as f64,
        }
    }
}

/// Certified gradient floor for the Cauchy-Schwarz check: the threshold
/// `c <= 1` maximizing `c n_c^2`, where `n_c` counts cell pairs of `A x A` on
/// which the enclosure of `max(|P_x|, |P_y|)` stays at least `c`.
fn gradient_floor(p: &Poly2, a: &GridSet1D) -> (f64, usize) {
    let (px, py) = (p.partial(Var::X, 1), p.partial(Var::Y, 1));
    let d = a.scale().delta();
    let mag_lo = |q: &Poly2, bx: &[(f64, f64); 2]| {
        let (lo, hi) = q.range_f64(bx);
        if lo > 0.0 {
            lo
        } else if hi < 0.0 {
            -hi
        } else {
            0.0
        }
    };
    let mut floors: Vec<f64> = a
        .cells()
        .par_iter()
        .flat_map_iter(|&s| {
            let (px, py) = (&px, &py);
            a.cells().iter().map(move |&t| {
                let bx = [(s as f64 * d, (s + 1) as f64 * d), (t as f64 * d, (t + 1) as f64 * d)];
                mag_lo(px, &bx).max(mag_lo(py, &bx)).min(1.0)
            })
        })
        .collect();
    floors.par_sort_unstable_by(|x, y| y.total_cmp(x));
    let mut best = (0.0, 0);
    for (i, &c) in floors.iter().enumerate() {
        let n = i + 1;
        if c * (n * n) as f64 > best.0 * (best.1 * best.1) as f64 {
            best = (c, n);
        }
    }
    best
}

fn run_growth(s: &Scenario) -> Result<Partial, HarnessError> {
    let p = poly(s, "poly")?;
    let gen = Generator::from_scenario(s)?;
    let ks = scales(s, "scales")?;
    let measures = s.get("measure").unwrap_or("image,energy");
    let mut want_image = false;
    let mut want_energy = false;
    for t in measures.split(',').map(str::trim) {
        match t {
            "image" => want_image = true,
            "energy" => want_energy = true,
            _ => return Err(invalid("measure", format!("unknown measure '{t}'"))),
        }
    }
    if !want_image {
        return Err(invalid("measure", "image is always measured; list it explicitly"));
    }
    let cmp = s.get("compare_poly").map(parse_poly2).transpose()?;
    let hf_min = s.get("hf_min").map(|_| number(s, "hf_min", None)).transpose()?;
    let kappa = s.get("kappa").map(|_| number(s, "kappa", None)).transpose()?;

    struct Row {
        cells: Vec<f64>,
        pairs: u64,
    }
    let rows: Vec<Row> = ks
        .par_iter()
        .map(|&k| -> Result<Row, HarnessError> {
            let a = gen.at(k)?;
            let n = a.len() as f64;
            let alpha = gen.alpha(&a);
            let eta = nonconcentration_exponent(&a, kappa.unwrap_or(alpha), alpha)?.eta;
            let image = image_set(&p, &a, &a)?.count() as f64;
            let mut row = vec![k as f64, n, eta, image];
            if want_energy {
                let energy = energy_count(&p, &a, &a, None)? as f64;
                // the image of the sub-product bounds the full image from
                // below, and its energy is at most the full energy
                let (c, pairs) = gradient_floor(&p, &a);
                let pairs = pairs as f64;
                let floor = CS_CONSTANT * c * pairs * pairs / energy;
                row.extend([energy, c, pairs, floor]);
                if let Some(h) = hf_min {
                    row.push(energy_count(&p, &a, &a, Some(h))? as f64);
                }
            }
            if let Some(q) = &cmp {
                row.push(image_set(q, &a, &a)?.count() as f64);
                if want_energy {
                    row.push(energy_count(q, &a, &a, None)? as f64);
                }
            }
            Ok(Row {
                cells: row,
                pairs: (a.len() * a.len()) as u64,
            })
        })
        .collect::<Result<_, _>>()?;

    let mut columns = vec!["k", "cover", "nonconc_eta", "image"];
    if want_energy {
        columns.extend(["energy", "gradient_floor", "floor_pairs", "cs_floor"]);
        if hf_min.is_some() {
            columns.push("filtered_energy");
        }
    }
    if cmp.is_some() {
        columns.push("compare_image");
        if want_energy {
            columns.push("compare_energy");
        }
    }
    let col = |name: &str| columns.iter().position(|c| *c == name).expect("column");
    let series = |name: &str| -> Vec<(f64, f64)> { rows.iter().map(|r| (r.cells[0], r.cells[col(name)])).collect() };

    let mut fits = BTreeMap::new();
    let mut metrics = BTreeMap::new();
    let mut cells: u64 = rows.iter().map(|r| r.pairs).sum();
    let image_fit = fit(series("image"))?;
    metrics.insert("image_exponent".into(), image_fit.slope);
    fits.insert("image".to_string(), image_fit);
    metrics.insert(
        "nonconc_eta".into(),
        rows.iter().map(|r| r.cells[col("nonconc_eta")]).fold(0.0, f64::max),
    );
    if want_energy {
        let f = fit(series("energy"))?;
        metrics.insert("energy_exponent".into(), f.slope);
        fits.insert("energy".to_string(), f);
        let (mut violations, mut min_ratio) = (0.0, f64::INFINITY);
        for r in &rows {
            let (image, floor) = (r.cells[col("image")], r.cells[col("cs_floor")]);
            if image < floor {
                violations += 1.0;
            }
            if floor > 0.0 {
                min_ratio = min_ratio.min(image / floor);
            }
        }
        metrics.insert("cs_violations".into(), violations);
        metrics.insert("cs_min_ratio".into(), min_ratio);
        if hf_min.is_some() {
            let pts = series("filtered_energy");
            let f = fit(pts.into_iter().map(|(k, v)| (k, v.max(1.0))).collect())?;
            metrics.insert("filtered_energy_exponent".into(), f.slope);
            fits.insert("filtered_energy".to_string(), f);
        }
    }
    if cmp.is_some() {
        let f = fit(series("compare_image"))?;
        metrics.insert("compare_image_exponent".into(), f.slope);
        metrics.insert("image_gap".into(), metrics["image_exponent"] - f.slope);
        fits.insert("compare_image".to_string(), f);
        if want_energy {
            let f = fit(series("compare_energy"))?;
            metrics.insert("compare_energy_exponent".into(), f.slope);
            fits.insert("compare_energy".to_string(), f);
            let v = rows
                .iter()
                .filter(|r| r.cells[col("compare_energy")] < r.cells[col("energy")])
                .count();
            metrics.insert("energy_order_violations".into(), v as f64);
        }
    }
    let mut tables = vec![Table::new("main", &columns, rows.into_iter().map(|r| r.cells).collect())];

    if s.get("restrict_exponent").is_some() {
        let r = number(s, "restrict_exponent", None)?;
        if !(r > 0.0 && r <= 1.0) {
            return Err(invalid("restrict_exponent", format!("{r} outside (0, 1]")));
        }
        let rks = scales(s, "restrict_scales")?;
        let rows: Vec<Vec<f64>> = rks
            .par_iter()
            .map(|&k| -> Result<Vec<f64>, HarnessError> {
                let a = gen.at(k)?;
                let delta = (-(k as f64)).exp2();
                let window = 0.25 * delta.powf(r);
                let ar = a.restrict(0.0, window);
                let e = if ar.is_empty() { 0.0 } else { energy_count(&p, &ar, &ar, None)? as f64 };
                Ok(vec![k as f64, window, ar.len() as f64, e])
            })
            .collect::<Result<_, _>>()?;
        cells += rows.iter().map(|r| (r[2] * r[2]) as u64).sum::<u64>();
        let f = fit(rows.iter().map(|r| (r[0], r[3])).collect())?;
        metrics.insert("restricted_energy_exponent".into(), f.slope);
        fits.insert("restricted_energy".to_string(), f);
        tables.push(Table::new("restricted", &["k", "window", "cover", "energy"], rows));
    }

    if s.get("shallow_scales").is_some() {
        let sks = scales(s, "shallow_scales")?;
        let rows: Vec<Vec<f64>> = sks
            .par_iter()
            .map(|&k| -> Result<Vec<f64>, HarnessError> {
                let a = gen.at(k)?;
                let mut row = vec![k as f64, a.len() as f64, image_set(&p, &a, &a)?.count() as f64];
                if let Some(q) = &cmp {
                    row.push(image_set(q, &a, &a)?.count() as f64);
                }
                Ok(row)
            })
            .collect::<Result<_, _>>()?;
        cells += rows.iter().map(|r| (r[1] * r[1]) as u64).sum::<u64>();
        let f = fit(rows.iter().map(|r| (r[0], r[2])).collect())?;
        metrics.insert("shallow_image_exponent".into(), f.slope);
        fits.insert("shallow_image".to_string(), f);
        let mut columns = vec!["k", "cover", "image"];
        if cmp.is_some() {
            let f = fit(rows.iter().map(|r| (r[0], r[3])).collect())?;
            metrics.insert("shallow_compare_exponent".into(), f.slope);
            metrics.insert("shallow_gap".into(), metrics["shallow_image_exponent"] - f.slope);
            fits.insert("shallow_compare_image".to_string(), f);
            columns.push("compare_image");
        }
        tables.push(Table::new("shallow", &columns, rows));
    }

    Ok(Partial {
        tables,
        fits,
        metrics,
        stats: Stats {
            cells,
            wall_clock_ms: None,
        },
    })
}

fn parse_points(s: &Scenario, key: &str, n: usize) -> Result<Vec<[f64; 2]>, HarnessError> {
    let pts = required(s, key)?
        .split(';')
        .map(|p| {
            let v: Vec<f64> = p.split(',').map(parse_f64).collect::<Result<_, _>>().map_err(|m| invalid(key, m))?;
            match v[..] {
                [x, y] => Ok([x, y]),
                _ => Err(invalid(key, format!("'{p}' is not a point x,y"))),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if pts.len() != n {
        return Err(invalid(key, format!("expected {n} points, got {}", pts.len())));
    }
    Ok(pts)
}

fn cells_meet(set: &GridSet1D, (lo, hi): (f64, f64)) -> bool {
    let n = set.scale().cells() as f64;
    let a = (lo * n).floor().clamp(0.0, n - 1.0) as u64;
    let b = (hi * n).floor().clamp(0.0, n - 1.0) as u64;
    if hi < 0.0 || lo > 1.0 {
        return false;
    }
    let start = set.cells().partition_point(|&c| c < a);
    set.cells().get(start).is_some_and(|&c| c <= b)
}

/// Cells of `[0, 1]^2` inside `domain` whose images under `phi1` and `phi2`
/// meet `x1` and `x2` respectively.
pub fn web_preimage(
    phi1: &dyn SmoothMap2,
    phi2: &dyn SmoothMap2,
    x1: &GridSet1D,
    x2: &GridSet1D,
    domain: &Rect,
) -> Result<GridSet2D, HarnessError> {
    let scale = x1.scale();
    let n = scale.cells();
    let d = scale.delta();
    let lo = |v: f64| ((v / d).ceil().max(0.0) as u64).min(n);
    let hi = |v: f64| ((v / d).floor().max(0.0) as u64).min(n);
    let (i0, i1) = (lo(domain.x0), hi(domain.x1));
    let (j0, j1) = (lo(domain.y0), hi(domain.y1));
    let cells: Vec<(u64, u64)> = (i0..i1)
        .into_par_iter()
        .flat_map_iter(|i| {
            (j0..j1).filter_map(move |j| {
                let r = Rect::new(i as f64 * d, (i + 1) as f64 * d, j as f64 * d, (j + 1) as f64 * d);
                (cells_meet(x1, phi1.enclosure(&r)) && cells_meet(x2, phi2.enclosure(&r))).then_some((i, j))
            })
        })
        .collect();
    Ok(GridSet2D::new(scale, cells)?)
}

fn run_web(s: &Scenario) -> Result<Partial, HarnessError> {
    let pins = parse_points(s, "pins", 3)?;
    let dom: Vec<f64> = required(s, "domain")?
        .split(',')
        .map(parse_f64)
        .collect::<Result<_, _>>()
        .map_err(|m| invalid("domain", m))?;
    let domain = match dom[..] {
        [x0, x1, y0, y1] if 0.0 <= x0 && x0 < x1 && x1 <= 1.0 && 0.0 <= y0 && y0 < y1 && y1 <= 1.0 => {
            Rect::new(x0, x1, y0, y1)
        }
        _ => return Err(invalid("domain", "expected x0,x1,y0,y1 with 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1")),
    };
    if pins.iter().any(|p| domain.contains(*p)) {
        return Err(invalid("pins", "pins must lie outside the domain"));
    }
    let (pat, base) = pattern(s)?;
    let alpha = number(s, "alpha", None)?;
    let ks = scales(s, "scales")?;
    let maps: Vec<PinnedDistance> = pins.iter().map(|&p| pinned_distance_map(p).with_domain(domain)).collect();

    let rows: Vec<Vec<f64>> = ks
        .par_iter()
        .map(|&k| -> Result<Vec<f64>, HarnessError> {
            let x1 = cantor_at(&pat, base, k)?;
            let x = web_preimage(&maps[0], &maps[1], &x1, &x1, &domain)?;
            if x.is_empty() {
                return Err(invalid("domain", format!("constructed set is empty at k={k}")));
            }
            let kf = k as f64;
            let mut row = vec![kf, x1.len() as f64, x.len() as f64];
            for m in &maps {
                row.push(smooth_image(m, &x)?.count() as f64);
            }
            for i in 0..3 {
                row.push(row[3 + i].log2() / kf - alpha);
            }
            row.push(nonconcentration_exponent_2d(&x, alpha, 2.0 * alpha)?.eta);
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    let columns = ["k", "cover_x1", "cover_x", "image1", "image2", "image3", "margin1", "margin2", "margin3", "eta_x"];

    let mut metrics = BTreeMap::new();
    let mut fits = BTreeMap::new();
    let margin3: Vec<f64> = rows.iter().map(|r| r[8]).collect();
    metrics.insert("margin_min".into(), margin3.iter().copied().fold(f64::INFINITY, f64::min));
    metrics.insert(
        "margin_monotone".into(),
        if margin3.windows(2).all(|w| w[1] >= w[0]) { 1.0 } else { 0.0 },
    );
    metrics.insert(
        "phi12_excess".into(),
        rows.iter().map(|r| r[6].max(r[7])).fold(f64::NEG_INFINITY, f64::max),
    );
    metrics.insert(
        "max_margin_min".into(),
        rows.iter().map(|r| r[6].max(r[7]).max(r[8])).fold(f64::INFINITY, f64::min),
    );
    metrics.insert("eta_x_max".into(), rows.iter().map(|r| r[9]).fold(0.0, f64::max));
    for (i, name) in [(3, "image1"), (4, "image2"), (5, "image3")] {
        let f = fit(rows.iter().map(|r| (r[0], r[i])).collect())?;
        if name == "image3" {
            metrics.insert("image3_exponent".into(), f.slope);
        }
        fits.insert(name.to_string(), f);
    }
    let mut cells: u64 = rows.iter().map(|r| r[2] as u64).sum();

    if s.get("curvature_samples").is_some() {
        let n = number(s, "curvature_samples", None)?;
        if n < 1.0 || n.fract() != 0.0 {
            return Err(invalid("curvature_samples", format!("{n} is not a positive integer")));
        }
        let seed = number(s, "seed", Some(0.0))? as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut nonzero = 0usize;
        let mut min_abs = f64::INFINITY;
        for _ in 0..n as usize {
            let q = domain.lerp(rng.gen(), rng.gen());
            // a failed evaluation (degenerate web point) counts as zero curvature
            let kq = blaschke_curvature(&maps[0], &maps[1], &maps[2], q).map(f64::abs).unwrap_or(0.0);
            if kq > 1e-3 {
                nonzero += 1;
            }
            min_abs = min_abs.min(kq);
        }
        metrics.insert("curvature_nonzero_fraction".into(), nonzero as f64 / n);
        metrics.insert("curvature_min_abs".into(), min_abs);
        cells += n as u64;
    }

    Ok(Partial {
        tables: vec![Table::new("main", &columns, rows)],
        fits,
        metrics,
        stats: Stats {
            cells,
            wall_clock_ms: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_lists() {
        assert_eq!(parse_scales("10..14").unwrap(), vec![10, 11, 12, 13, 14]);
        assert_eq!(parse_scales("16..30:2").unwrap(), vec![16, 18, 20, 22, 24, 26, 28, 30]);
        assert_eq!(parse_scales("8, 9,10").unwrap(), vec![8, 9, 10]);
        assert!(parse_scales("0..3").is_err());
        assert!(parse_scales("10,9").is_err());
        assert!(parse_scales("5..31").is_err());
        assert!(parse_scales("a").is_err());
    }

    #[test]
    fn cantor_on_odd_scales() {
        let c = cantor_at(&[1, 2], 4, 9).unwrap();
        assert_eq!(c.scale().k(), 9);
        assert_eq!(c.len(), 32);
        assert!(cantor_at(&[1, 2], 6, 9).is_err());
    }

    #[test]
    fn reports_are_reproducible() {
        let s = Scenario::new("t", Kind::Growth)
            .param("poly", "x + y")
            .param("alpha", "1/2")
            .param("scales", "6..9");
        let a = run_scenario(&s).unwrap();
        let b = run_scenario(&s).unwrap();
        assert_eq!(a.to_json(17), b.to_json(17));
        assert!(a.stats.wall_clock_ms.is_none());
        let timed = run_scenario_with(&s, RunOptions { timing: true }).unwrap();
        assert!(timed.stats.wall_clock_ms.is_some());
    }

    #[test]
    fn failed_expectations_are_reported() {
        use crate::expharness::{Comparator, Expectation, Provenance};
        let s = Scenario::new("t", Kind::Growth)
            .param("poly", "x + y")
            .param("alpha", "1/2")
            .param("measure", "image")
            .param("scales", "6..8")
            .expect(Expectation::new("image_exponent", Comparator::Gt, 5.0, Provenance::Derived));
        let r = run_scenario(&s).unwrap();
        assert!(!r.all_passed());
        assert!(r.outcomes[0].measured.is_some());
    }

    #[test]
    fn invalid_combinations() {
        let base = Scenario::new("t", Kind::Growth).param("poly", "x + y").param("scales", "6..8");
        let too_big = base.clone().param("alpha", "3/4").param("eta", "1/2");
        assert!(matches!(run_scenario(&too_big), Err(HarnessError::InvalidParameter { .. })));
        assert!(matches!(run_scenario(&base), Err(HarnessError::MissingParameter(_))));
        let few = base.clone().param("alpha", "1/2").param("scales", "6,7");
        assert!(run_scenario(&few).is_err());
        let bad_gen = base.param("alpha", "1/2").param("gen", "random");
        assert!(run_scenario(&bad_gen).is_err());
        let web = Scenario::new("w", Kind::Web)
            .param("pins", "0,0;1,0")
            .param("domain", "0.3,0.7,0.3,0.7")
            .param("pattern", "1,2")
            .param("base", 4)
            .param("alpha", "1/2")
            .param("scales", "6..8");
        assert!(run_scenario(&web).is_err());
        let inside = web.param("pins", "0.5,0.5;1,0;0,1");
        assert!(run_scenario(&inside).is_err());
    }

    #[test]
    fn meets_cells() {
        let s = GridSet1D::new(Scale::new(4).unwrap(), [3, 9]).unwrap();
        assert!(cells_meet(&s, (0.19, 0.2)));
        assert!(!cells_meet(&s, (0.26, 0.5)));
        assert!(cells_meet(&s, (0.26, 0.57)));
        assert!(!cells_meet(&s, (-1.0, -0.5)));
        assert!(!cells_meet(&s, (1.5, 2.0)));
    }
}

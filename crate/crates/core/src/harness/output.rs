use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::Method;
use super::sweep::SweepRecord;
use crate::error::HarnessError;
use crate::variational::Scheme;

pub const CSV_HEADER: &str =
    "method,scheme,p,T,objective,p_gs,p_orbit1,p_orbit2,p_orbit3,fairness_gap,tvd,n_eval,converged,wall_time_s";

/// Number of orbit columns in the CSV.
const ORBIT_COLUMNS: usize = 3;

/// `x` with 12 significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}").to_lowercase();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..DIGITS).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (DIGITS - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

/// Temperatures appearing in any record's `tvd_by_temperature`, sorted.
fn tvd_temperatures(records: &[SweepRecord]) -> Vec<f64> {
    let mut ts: Vec<f64> = records
        .iter()
        .flat_map(|r| r.tvd_by_temperature.iter().map(|t| t.temperature))
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// The fixed columns, then one `tvd_T<x>` column per configured temperature.
pub fn to_csv(records: &[SweepRecord]) -> String {
    let temps = tvd_temperatures(records);
    let mut out = String::from(CSV_HEADER);
    for t in &temps {
        write!(out, ",tvd_T{}", fmt_sig(*t)).unwrap();
    }
    out.push('\n');
    for r in records {
        let mut cells = vec![
            r.method.to_string(),
            r.scheme.to_string(),
            r.p.to_string(),
            fmt_opt(r.temperature),
            fmt_sig(r.objective),
            fmt_sig(r.p_gs),
        ];
        cells.extend((0..ORBIT_COLUMNS).map(|i| fmt_opt(r.orbit_probs.get(i).copied())));
        cells.push(fmt_sig(r.fairness_gap));
        cells.push(fmt_opt(r.tvd));
        cells.push(r.n_eval.to_string());
        cells.push(r.converged.to_string());
        cells.push(fmt_sig(r.wall_time_s));
        cells.extend(temps.iter().map(|&t| fmt_opt(r.tvd_at(t))));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn emit_csv(records: &[SweepRecord], path: &Path) -> Result<(), HarnessError> {
    write_file(path, &to_csv(records))
}

pub fn to_json(records: &[SweepRecord]) -> Result<String, HarnessError> {
    Ok(serde_json::to_string_pretty(records)?)
}

pub fn from_json(text: &str) -> Result<Vec<SweepRecord>, HarnessError> {
    Ok(serde_json::from_str(text)?)
}

pub fn emit_json(records: &[SweepRecord], path: &Path) -> Result<(), HarnessError> {
    write_file(path, &to_json(records)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Orbit and ground-state probabilities against depth.
    GroundState,
    /// Distance to the Gibbs target against depth, one curve per temperature.
    Tvd,
}

/// One panel's data file as text plus the curves for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub name: String,
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Panel {
    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\n", self.columns.join(" "));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_sig(v)).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

fn series<'a>(
    records: &'a [SweepRecord],
    method: Method,
    scheme: Scheme,
    temperature: Option<f64>,
) -> Vec<&'a SweepRecord> {
    let mut v: Vec<_> = records
        .iter()
        .filter(|r| r.method == method && r.scheme == scheme && r.temperature == temperature)
        .collect();
    v.sort_by_key(|r| r.p);
    v
}

fn ground_state_panel(
    name: &str,
    records: &[SweepRecord],
    method: Method,
    scheme: Scheme,
    temperature: Option<f64>,
) -> Result<Panel, HarnessError> {
    let recs = series(records, method, scheme, temperature);
    let title = match temperature {
        Some(t) => format!("{method} {scheme} T={}", fmt_sig(t)),
        None => format!("{method} {scheme}"),
    };
    if recs.is_empty() {
        return Err(HarnessError::MissingPanel(format!("{name} ({title})")));
    }
    let rows = recs
        .iter()
        .map(|r| {
            let mut row = vec![r.p as f64];
            row.extend((0..ORBIT_COLUMNS).map(|i| r.orbit_probs.get(i).copied().unwrap_or(f64::NAN)));
            row.push(r.p_gs);
            row
        })
        .collect();
    Ok(Panel {
        name: name.into(),
        title,
        columns: ["p", "P_1", "P_2", "P_3", "P_GS"].map(String::from).to_vec(),
        rows,
    })
}

fn tvd_panel(name: &str, records: &[SweepRecord], scheme: Scheme) -> Result<Panel, HarnessError> {
    let mut temps: Vec<f64> = records
        .iter()
        .filter(|r| r.method == Method::Sbo && r.scheme == scheme)
        .filter_map(|r| r.temperature)
        .collect();
    temps.sort_by(f64::total_cmp);
    temps.dedup();
    if temps.is_empty() {
        return Err(HarnessError::MissingPanel(format!("{name} (sbo {scheme})")));
    }
    let mut depths: Vec<usize> = records
        .iter()
        .filter(|r| r.method == Method::Sbo && r.scheme == scheme)
        .map(|r| r.p)
        .collect();
    depths.sort_unstable();
    depths.dedup();

    let rows = depths
        .iter()
        .map(|&p| {
            let mut row = vec![p as f64];
            row.extend(temps.iter().map(|&t| {
                records
                    .iter()
                    .find(|r| {
                        r.method == Method::Sbo && r.scheme == scheme && r.p == p && r.temperature == Some(t)
                    })
                    .and_then(|r| r.tvd)
                    .unwrap_or(f64::NAN)
            }));
            row
        })
        .collect();
    let mut columns = vec!["p".to_string()];
    columns.extend(temps.iter().map(|&t| format!("D_TVD_T{}", fmt_sig(t))));
    Ok(Panel {
        name: name.into(),
        title: format!("sbo {scheme}"),
        columns,
        rows,
    })
}

/// Panels of `figure`, projected from the sweep table without recomputation.
/// `temperature` selects the SBO runs shown in the ground-state figure.
pub fn fig_panels(records: &[SweepRecord], figure: Figure, temperature: f64) -> Result<Vec<Panel>, HarnessError> {
    match figure {
        Figure::GroundState => Ok(vec![
            ground_state_panel("fig2a", records, Method::Qaoa, Scheme::Full, None)?,
            ground_state_panel("fig2b", records, Method::Qaoa, Scheme::Linearized, None)?,
            ground_state_panel("fig2c", records, Method::Sbo, Scheme::Full, Some(temperature))?,
            ground_state_panel("fig2d", records, Method::Sbo, Scheme::Linearized, Some(temperature))?,
        ]),
        Figure::Tvd => Ok(vec![
            tvd_panel("fig3a", records, Scheme::Full)?,
            tvd_panel("fig3b", records, Scheme::Linearized)?,
        ]),
    }
}

/// Writes `<name>.dat` per panel into `dir`, plus `<name>.svg` when asked.
/// Returns the paths written.
pub fn emit_fig_data(
    records: &[SweepRecord],
    figure: Figure,
    temperature: f64,
    dir: &Path,
    svg: bool,
) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut written = Vec::new();
    for panel in fig_panels(records, figure, temperature)? {
        let path = dir.join(format!("{}.dat", panel.name));
        write_file(&path, &panel.to_text())?;
        written.push(path);
        if svg {
            let path = dir.join(format!("{}.svg", panel.name));
            write_file(&path, &render_svg(&panel))?;
            written.push(path);
        }
    }
    Ok(written)
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#000000", "#9467bd", "#ff7f0e"];

/// Poly-line plot of every column against `p` on a log x axis.
pub fn render_svg(panel: &Panel) -> String {
    let (w, h, margin) = (480.0, 320.0, 48.0);
    let xs: Vec<f64> = panel.rows.iter().map(|r| r[0].max(1.0).log10()).collect();
    let xmax = xs.iter().copied().fold(0.0f64, f64::max).max(1.0);
    let ys = panel.rows.iter().flat_map(|r| r[1..].iter().copied()).filter(|v| v.is_finite());
    let ymax = ys.fold(0.0f64, f64::max).max(1e-12);
    let px = |x: f64| margin + x / xmax * (w - 2.0 * margin);
    let py = |y: f64| h - margin - y / ymax * (h - 2.0 * margin);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<text x="{}" y="20" font-size="14" text-anchor="middle">{}</text>"#,
        w / 2.0,
        panel.title
    )
    .unwrap();
    writeln!(
        out,
        r#"<path d="M{m} {t} L{m} {b} L{r} {b}" stroke="black" fill="none"/>"#,
        m = margin,
        t = margin,
        b = h - margin,
        r = w - margin
    )
    .unwrap();
    let mut decade = 1.0f64;
    while decade.log10() <= xmax + 1e-9 {
        let x = px(decade.log10());
        writeln!(
            out,
            r#"<text x="{x:.1}" y="{:.1}" font-size="10" text-anchor="middle">{decade}</text>"#,
            h - margin + 14.0
        )
        .unwrap();
        decade *= 10.0;
    }
    writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"#,
        margin - 4.0,
        margin + 4.0,
        fmt_sig(ymax)
    )
    .unwrap();
    for (c, name) in panel.columns.iter().enumerate().skip(1) {
        let color = COLORS[(c - 1) % COLORS.len()];
        let pts: Vec<String> = panel
            .rows
            .iter()
            .zip(&xs)
            .filter(|(r, _)| r[c].is_finite())
            .map(|(r, &x)| format!("{:.2},{:.2}", px(x), py(r[c])))
            .collect();
        writeln!(
            out,
            r#"<polyline points="{}" stroke="{color}" fill="none" stroke-width="1.5"/>"#,
            pts.join(" ")
        )
        .unwrap();
        writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" fill="{color}">{name}</text>"#,
            w - margin + 4.0,
            margin + 12.0 * c as f64
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

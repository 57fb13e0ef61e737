//! Performance profiles over a dense (algorithm, instance, quality) table.
//!
//! Lower quality values are better. For each algorithm `A` and factor `tau`
//! the profile reports the fraction of instances `I` with
//! `q_A(I) <= tau * Best(I)`, where `Best(I)` is the smallest value any
//! algorithm reached on `I`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityRow {
    pub algorithm: String,
    pub instance: String,
    pub quality: f64,
}

/// Dense quality table: every algorithm has exactly one value per instance.
#[derive(Clone, Debug, PartialEq)]
pub struct QualityTable {
    algorithms: Vec<String>,
    instances: Vec<String>,
    /// quality[a][i]
    quality: Vec<Vec<f64>>,
}

impl QualityTable {
    pub fn from_rows(rows: &[QualityRow]) -> Result<Self> {
        let mut cells: BTreeMap<(&str, &str), f64> = BTreeMap::new();
        for row in rows {
            if !row.quality.is_finite() || row.quality < 0.0 {
                return Err(Error::QualityTable(format!(
                    "quality of {} on {} must be a finite non-negative number",
                    row.algorithm, row.instance
                )));
            }
            if cells.insert((&row.algorithm, &row.instance), row.quality).is_some() {
                return Err(Error::QualityTable(format!("duplicate row for {} on {}", row.algorithm, row.instance)));
            }
        }
        let algorithms: Vec<String> =
            rows.iter().map(|r| r.algorithm.as_str()).collect::<BTreeSet<_>>().into_iter().map(String::from).collect();
        let instances: Vec<String> =
            rows.iter().map(|r| r.instance.as_str()).collect::<BTreeSet<_>>().into_iter().map(String::from).collect();
        let mut quality = Vec::with_capacity(algorithms.len());
        for a in &algorithms {
            let mut per_instance = Vec::with_capacity(instances.len());
            for i in &instances {
                match cells.get(&(a.as_str(), i.as_str())) {
                    Some(&q) => per_instance.push(q),
                    None => return Err(Error::QualityTable(format!("sparse table: {a} has no value for {i}"))),
                }
            }
            quality.push(per_instance);
        }
        Ok(QualityTable { algorithms, instances, quality })
    }

    /// Reads CSV with header `algorithm,instance,quality`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let rows = rdr
            .deserialize::<QualityRow>()
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::QualityTable(e.to_string()))?;
        Self::from_rows(&rows)
    }

    pub fn algorithms(&self) -> &[String] {
        &self.algorithms
    }

    pub fn instances(&self) -> &[String] {
        &self.instances
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub algorithm: String,
    pub tau: f64,
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub points: Vec<ProfilePoint>,
    /// Instances left out because some algorithm reported quality zero.
    pub excluded: Vec<String>,
}

/// Evaluates the profile of every algorithm at every `tau`.
pub fn performance_profile(table: &QualityTable, taus: &[f64]) -> Result<Profile> {
    let mut excluded = Vec::new();
    let mut best = Vec::new();
    let mut included = Vec::new();
    for (i, name) in table.instances.iter().enumerate() {
        let column = table.quality.iter().map(|per_alg| per_alg[i]);
        if column.clone().any(|q| q == 0.0) {
            excluded.push(name.clone());
            continue;
        }
        best.push(column.fold(f64::INFINITY, f64::min));
        included.push(i);
    }
    let mut points = Vec::with_capacity(table.algorithms.len() * taus.len());
    for (a, name) in table.algorithms.iter().enumerate() {
        for &tau in taus {
            // compared as a ratio, the same quantity max_ratio reports, so
            // every curve reaches 1 exactly at tau = max_ratio
            let hits = included.iter().zip(&best).filter(|&(&i, &b)| table.quality[a][i] / b <= tau).count();
            let fraction = if included.is_empty() { 0.0 } else { hits as f64 / included.len() as f64 };
            points.push(ProfilePoint { algorithm: name.clone(), tau, fraction });
        }
    }
    Ok(Profile { points, excluded })
}

/// Largest `q_A(I) / Best(I)` over the table, the `tau` at which every
/// curve reaches 1.
pub fn max_ratio(table: &QualityTable) -> f64 {
    let mut worst: f64 = 1.0;
    for i in 0..table.instances.len() {
        let column: Vec<f64> = table.quality.iter().map(|q| q[i]).collect();
        if column.contains(&0.0) {
            continue;
        }
        let best = column.iter().copied().fold(f64::INFINITY, f64::min);
        for q in column {
            worst = worst.max(q / best);
        }
    }
    worst
}

/// `count` values from 1 to `max` inclusive, evenly spaced.
pub fn tau_grid(max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => {
            let mut grid: Vec<f64> = (0..count).map(|i| 1.0 + (max - 1.0) * i as f64 / (count - 1) as f64).collect();
            grid[count - 1] = max;
            grid
        }
    }
}

pub fn write_profile_csv<W: Write>(profile: &Profile, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for p in &profile.points {
        w.serialize(p).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Step plot of the profile as a standalone SVG document.
pub fn profile_svg(profile: &Profile) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;
    const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
    let (tau_min, tau_max) =
        profile.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.tau), hi.max(p.tau)));
    let span = if tau_max > tau_min { tau_max - tau_min } else { 1.0 };
    let x = |tau: f64| M + (tau - tau_min) / span * (W - 2.0 * M);
    let y = |f: f64| H - M - f * (H - 2.0 * M);

    let mut by_alg: BTreeMap<&str, Vec<&ProfilePoint>> = BTreeMap::new();
    for p in &profile.points {
        by_alg.entry(&p.algorithm).or_default().push(p);
    }
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<path d="M{M} {M} V{} H{}" fill="none" stroke="black"/>"#, H - M, W - M);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">tau</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" font-size="12" transform="rotate(-90 14 {})" text-anchor="middle">fraction of instances</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (tick, label) in [(tau_min, tau_min), (tau_max, tau_max)] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{}" font-size="10" text-anchor="middle">{label:.3}</text>"#,
            x(tick),
            H - M + 14.0
        );
    }
    for f in [0.0, 0.5, 1.0] {
        let _ =
            writeln!(svg, r#"<text x="{}" y="{:.1}" font-size="10" text-anchor="end">{f}</text>"#, M - 4.0, y(f) + 3.0);
    }
    for (i, (alg, mut pts)) in by_alg.into_iter().enumerate() {
        pts.sort_by(|a, b| a.tau.total_cmp(&b.tau));
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        for (j, p) in pts.iter().enumerate() {
            if j == 0 {
                let _ = write!(d, "M{:.1} {:.1}", x(p.tau), y(p.fraction));
            } else {
                let _ = write!(d, " H{:.1} V{:.1}", x(p.tau), y(p.fraction));
            }
        }
        let _ = writeln!(svg, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="2"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-size="11" fill="{color}">{}</text>"#,
            W - M - 120.0,
            M + 14.0 * (i as f64 + 1.0),
            escape(alg)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

//! Human-readable tables.

use linstab::{EstimateReport, ExtendedNonneg};

use crate::document::{AnalysisDocument, ClmDocument, ReportDocument, VertexEntry};

/// `v` with 7 significant digits.
pub fn sig7(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v > 0.0 {
            "inf".into()
        } else {
            format!("{v}")
        };
    }
    let sci = format!("{v:.6e}");
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-4..7).contains(&exp) {
        format!("{:.*}", (6 - exp) as usize, v)
    } else {
        sci
    }
}

pub fn ext7(v: ExtendedNonneg) -> String {
    sig7(v.value())
}

/// Coordinates at 7 significant digits without trailing zeros.
pub fn point(p: &[f64]) -> String {
    let parts: Vec<String> = p
        .iter()
        .map(|v| {
            let s = sig7(*v);
            if s.contains('.') && !s.contains('e') {
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            } else {
                s
            }
        })
        .collect();
    format!("({})", parts.join(", "))
}

pub fn index_set(s: &[usize]) -> String {
    let parts: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Left-aligned columns separated by two spaces.
fn columns(rows: &[Vec<String>]) -> String {
    let ncol = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncol)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<width$}", width = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn report_line(name: &str, r: &ReportDocument) -> String {
    let pts: Vec<String> = r.witnesses.iter().map(|w| point(&w.point)).collect();
    let mut s = format!("{name} = {}  [{}]", ext7(r.value), r.case);
    if !pts.is_empty() {
        s.push_str(&format!("  at {}", pts.join(", ")));
    }
    s.push('\n');
    s
}

pub fn analysis(doc: &AnalysisDocument) -> String {
    let mut rows = vec![vec![
        "point".to_string(),
        "active".into(),
        "clm_rhs".into(),
        "clm_full".into(),
    ]];
    for r in &doc.points {
        rows.push(vec![
            point(&r.point),
            index_set(&r.active),
            ext7(r.clm_rhs),
            ext7(r.clm_full),
        ]);
    }
    let mut out = columns(&rows);
    out.push('\n');
    out.push_str(&format!(
        "feasible = {}  bounded = {}  full_space = {}  norm = {}\n",
        doc.feasible, doc.bounded, doc.full_space, doc.norm
    ));
    out.push_str(&report_line("lipusc_rhs", &doc.lipusc_rhs));
    out.push_str(&report_line("lipusc_full", &doc.lipusc_full));
    out
}

pub fn clm(doc: &ClmDocument) -> String {
    let mut out = format!(
        "clm_{} at {} = {}  active {}\n",
        match doc.mode {
            linstab::Mode::Rhs => "rhs",
            linstab::Mode::Full => "full",
        },
        point(&doc.point),
        ext7(doc.value),
        index_set(&doc.active)
    );
    if !doc.witnesses.is_empty() {
        let mut rows = vec![vec![
            "D".to_string(),
            "direction".into(),
            "hull_distance".into(),
        ]];
        for w in &doc.witnesses {
            rows.push(vec![
                index_set(&w.indices),
                point(&w.direction),
                sig7(w.hull_distance),
            ]);
        }
        out.push_str(&columns(&rows));
    }
    out
}

pub fn reports(reports: &[ReportDocument]) -> String {
    let mut out = String::new();
    for r in reports {
        let name = match r.mode {
            linstab::Mode::Rhs => "lipusc_rhs",
            linstab::Mode::Full => "lipusc_full",
        };
        out.push_str(&report_line(name, r));
    }
    out
}

pub fn vertices(entries: &[VertexEntry]) -> String {
    let mut rows = vec![vec!["point".to_string(), "active".into()]];
    for e in entries {
        rows.push(vec![point(&e.point), index_set(&e.active)]);
    }
    columns(&rows)
}

pub fn estimate(r: &EstimateReport, closed: ExtendedNonneg, ratio: Option<f64>) -> String {
    let best = r.best_x.as_deref().map(point).unwrap_or_else(|| "-".into());
    let rows = vec![
        vec!["estimate".to_string(), sig7(r.estimate)],
        vec!["closed_form".into(), ext7(closed)],
        vec![
            "ratio".into(),
            ratio.map(sig7).unwrap_or_else(|| "-".into()),
        ],
        vec!["best_x".into(), best],
        vec!["residual".into(), sig7(r.residual)],
        vec!["distance".into(), sig7(r.distance)],
        vec!["norm".into(), sig7(r.norm)],
        vec!["delta".into(), sig7(r.delta_used)],
        vec![
            "valid_samples".into(),
            format!("{} / {}", r.valid_samples, r.drawn),
        ],
    ];
    columns(&rows)
}

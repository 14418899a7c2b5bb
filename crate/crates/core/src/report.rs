//! Output renderers: JSON, CSV, LaTeX and aligned text.

use std::fmt::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::cohomology::CohomologyResult;
use crate::complex::MapRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Format {
    Json,
    Csv,
    Latex,
    Text,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "latex" | "tex" => Ok(Format::Latex),
            "text" | "txt" => Ok(Format::Text),
            _ => Err(format!("unknown format `{s}`; expected json, csv, latex or text")),
        }
    }
}

/// Parabolic label as in the tables: empty for the full flag, else `α1,α3`.
pub fn parabolic_label(levi: &[usize]) -> String {
    levi.iter().map(|i| format!("α{i}")).collect::<Vec<_>>().join(",")
}

fn latex_parabolic(levi: &[usize]) -> String {
    levi.iter()
        .map(|i| format!("$\\alpha_{i}$"))
        .collect::<Vec<_>>()
        .join(",")
}

fn latex_weight(w: &crate::root_system::Weight) -> String {
    let mut out = String::new();
    for (i, &c) in w.coords().iter().enumerate() {
        if c == 0 {
            continue;
        }
        if !out.is_empty() && c > 0 {
            out.push('+');
        }
        match c {
            1 => {}
            -1 => out.push('-'),
            _ => out.push_str(&c.to_string()),
        }
        let _ = write!(out, "\\alpha_{}", i + 1);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn render_maps(cartan_type: &str, lambda: &str, maps: &[MapRecord], format: Format) -> String {
    match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                cartan_type: &'a str,
                lambda: &'a str,
                maps: &'a [MapRecord],
            }
            json(&Doc {
                cartan_type,
                lambda,
                maps,
            })
        }
        Format::Csv => {
            let mut out = String::from("source,target,root,simple,sign,terms,polynomial\n");
            for m in maps {
                let _ = writeln!(
                    out,
                    "{},{},\"{}\",{},{},{},\"{}\"",
                    m.source,
                    m.target,
                    m.reflection_root.to_csv(),
                    m.simple,
                    m.sign,
                    m.terms,
                    m.polynomial
                );
            }
            out
        }
        Format::Latex => {
            let mut out = String::new();
            for m in maps {
                let poly = m
                    .polynomial
                    .replace('·', "\\,")
                    .replace(|c: char| c == 'f', "f_");
                let _ = writeln!(
                    out,
                    "${} \\to {}$ : $({}){}$ \\\\",
                    m.source,
                    m.target,
                    if m.sign < 0 { "-" } else { "+" },
                    latex_poly(&poly)
                );
            }
            out
        }
        Format::Text => {
            let mut out = format!("BGG maps for {cartan_type}, λ = {lambda}\n");
            let width = maps
                .iter()
                .map(|m| m.source.chars().count() + m.target.chars().count() + 4)
                .max()
                .unwrap_or(0);
            for m in maps {
                let edge = format!("{} → {}", m.source, m.target);
                let pad = width.saturating_sub(edge.chars().count());
                let _ = writeln!(
                    out,
                    "{edge}{} [{}] {}",
                    " ".repeat(pad),
                    if m.sign < 0 { "-" } else { "+" },
                    m.polynomial
                );
            }
            out
        }
    }
}

/// Puts root subscripts and exponents in braces: `f_12^3` becomes `f_{12}^{3}`.
fn latex_poly(s: &str) -> String {
    let mut out = String::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '_' || c == '^' {
            out.push(c);
            out.push('{');
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() || d == '[' || d == ']' || d == ',' {
                    out.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push('}');
        } else {
            out.push(c);
        }
    }
    out
}

pub fn render_cohomology(r: &CohomologyResult, format: Format) -> String {
    match format {
        Format::Json => json(r),
        Format::Csv => {
            let degrees = r.dims_by_degree.len();
            let mut out = String::from("lambda,dim");
            for k in 0..degrees {
                let _ = write!(out, ",H{k}");
            }
            out.push('\n');
            for l in r.per_lambda.iter().filter(|l| !l.is_zero()) {
                let _ = write!(out, "\"{}\",{}", l.lambda.to_csv(), l.dim);
                for m in &l.mults {
                    let _ = write!(out, ",{m}");
                }
                out.push('\n');
            }
            out.push_str("total,");
            for (k, d) in r.dims_by_degree.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{d}");
            }
            out.push('\n');
            out
        }
        Format::Latex => {
            let mut out = String::from("\\begin{tabular}{r|l|r}\n$k$ & $H^k$ & $\\dim$ \\\\\n\\hline\n");
            for k in 0..r.dims_by_degree.len() {
                let parts: Vec<String> = r
                    .decomposition(k)
                    .into_iter()
                    .map(|(l, m)| {
                        if m == 1 {
                            format!("L({})", latex_weight(l))
                        } else {
                            format!("L({})^{{\\oplus {m}}}", latex_weight(l))
                        }
                    })
                    .collect();
                let h = if parts.is_empty() {
                    "0".to_string()
                } else {
                    parts.join(" \\oplus ")
                };
                let _ = writeln!(out, "{k} & ${h}$ & {} \\\\", r.dims_by_degree[k]);
            }
            out.push_str("\\end{tabular}\n");
            out
        }
        Format::Text => {
            let mut out = format!(
                "H^k(X, E) for {}{}, E = {}\n",
                r.cartan_type,
                if r.parabolic.is_empty() {
                    String::new()
                } else {
                    format!(" / P({})", parabolic_label(&r.parabolic))
                },
                r.module_spec
            );
            for k in 0..r.dims_by_degree.len() {
                let parts: Vec<String> = r
                    .decomposition(k)
                    .into_iter()
                    .map(|(l, m)| if m == 1 { format!("L({l})") } else { format!("L({l})^{m}") })
                    .collect();
                let h = if parts.is_empty() {
                    "0".to_string()
                } else {
                    parts.join(" ⊕ ")
                };
                let _ = writeln!(out, "H^{k}: dim {:>8}  {h}", r.dims_by_degree[k]);
            }
            out
        }
    }
}

/// One row of a dimension table: a parabolic and `dim H^0(X, ∧^k T)` per k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub parabolic: Vec<usize>,
    pub dims: Vec<u128>,
    /// Whether all cohomology in positive degrees vanished.
    pub higher_vanish: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionTable {
    pub cartan_type: String,
    pub module: String,
    pub rows: Vec<TableRow>,
}

pub fn render_table(t: &DimensionTable, format: Format) -> String {
    let width = t.rows.iter().map(|r| r.dims.len()).max().unwrap_or(0);
    match format {
        Format::Json => json(t),
        Format::Csv => {
            let mut out = String::from("parabolic");
            for k in 0..width {
                let _ = write!(out, ",{k}");
            }
            out.push('\n');
            for r in &t.rows {
                let _ = write!(out, "\"{}\"", parabolic_label(&r.parabolic));
                for d in &r.dims {
                    let _ = write!(out, ",{d}");
                }
                out.push('\n');
            }
            out
        }
        Format::Latex => {
            let mut out = format!("\\begin{{tabular}}{{r|{}}}\n", vec!["c"; width].join(" "));
            out.push_str("     k");
            for k in 0..width {
                let _ = write!(out, " & {k}");
            }
            out.push_str("\\\\\n     \\hline \\hline\n");
            for r in &t.rows {
                let _ = write!(out, "     {}", latex_parabolic(&r.parabolic));
                for d in &r.dims {
                    let _ = write!(out, " & {d}");
                }
                out.push_str("\\\\\n");
            }
            out.push_str("\\end{tabular}\n");
            out
        }
        Format::Text => {
            let label_w = t
                .rows
                .iter()
                .map(|r| parabolic_label(&r.parabolic).chars().count())
                .max()
                .unwrap_or(0)
                .max(1);
            let cells: Vec<Vec<String>> = t
                .rows
                .iter()
                .map(|r| r.dims.iter().map(|d| d.to_string()).collect())
                .collect();
            let mut col_w = vec![1; width];
            for (k, w) in col_w.iter_mut().enumerate() {
                *w = cells
                    .iter()
                    .filter_map(|c| c.get(k).map(|s| s.len()))
                    .chain([k.to_string().len()])
                    .max()
                    .unwrap();
            }
            let mut out = format!("{} {}\n", t.cartan_type, t.module);
            let _ = write!(out, "{:>label_w$} |", "k");
            for (k, w) in col_w.iter().enumerate() {
                let _ = write!(out, " {k:>w$}");
            }
            out.push('\n');
            let _ = writeln!(out, "{}", "-".repeat(label_w + 2 + col_w.iter().map(|w| w + 1).sum::<usize>()));
            for (r, c) in t.rows.iter().zip(&cells) {
                let label = parabolic_label(&r.parabolic);
                let pad = label_w - label.chars().count();
                let _ = write!(out, "{}{label} |", " ".repeat(pad));
                for (s, w) in c.iter().zip(&col_w) {
                    let _ = write!(out, " {s:>w$}");
                }
                out.push('\n');
            }
            out
        }
    }
}

use std::fmt;
use std::str::FromStr;

use super::{D2IReport, I2DReport, Report};

pub const D2I_COLUMNS: [&str; 8] = [
    "Model", "BLEU-2", "BLEU-4", "ROUGE-1", "ROUGE-2", "ROUGE-L", "METEOR", "Text2Mol",
];

pub const I2D_COLUMNS: [&str; 10] = [
    "Model",
    "BLEU↑",
    "Exact↑",
    "Levenshtein↓",
    "MACCS",
    "RDK",
    "Morgan",
    "FCD",
    "Text2Mol",
    "Validity",
];

const ABSENT: &str = "—";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format {other:?}; expected table, csv or json")),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Table => "table",
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        })
    }
}

fn d2i_values(r: &D2IReport) -> Vec<Option<f64>> {
    vec![
        Some(r.bleu2),
        Some(r.bleu4),
        Some(r.rouge1),
        Some(r.rouge2),
        Some(r.rouge_l),
        Some(r.meteor),
        r.text2mol,
    ]
}

fn i2d_values(r: &I2DReport) -> Vec<Option<f64>> {
    vec![
        Some(r.bleu),
        Some(r.exact),
        Some(r.levenshtein),
        r.maccs_fts,
        r.rdk_fts,
        r.morgan_fts,
        r.fcd,
        r.text2mol,
        Some(r.validity),
    ]
}

/// Table and CSV show four decimals; JSON keeps full precision and parses
/// back into an equal [`Report`].
pub fn render_report(report: &Report, format: OutputFormat) -> String {
    if format == OutputFormat::Json {
        let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
        s.push('\n');
        return s;
    }
    let (columns, label, values): (&[&str], &str, Vec<Option<f64>>) = match report {
        Report::DrugToIndication(r) => (&D2I_COLUMNS, &r.label, d2i_values(r)),
        Report::IndicationToDrug(r) => (&I2D_COLUMNS, &r.label, i2d_values(r)),
    };
    match format {
        OutputFormat::Csv => {
            let cells: Vec<String> = std::iter::once(csv_field(label))
                .chain(values.iter().map(|v| v.map(|x| format!("{x:.4}")).unwrap_or_default()))
                .collect();
            format!("{}\n{}\n", columns.join(","), cells.join(","))
        }
        _ => {
            let cells: Vec<String> = std::iter::once(label.to_string())
                .chain(
                    values
                        .iter()
                        .map(|v| v.map(|x| format!("{x:.4}")).unwrap_or_else(|| ABSENT.into())),
                )
                .collect();
            table(columns, &cells)
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn table(columns: &[&str], cells: &[String]) -> String {
    let widths: Vec<usize> = columns
        .iter()
        .zip(cells)
        .map(|(c, v)| c.chars().count().max(v.chars().count()))
        .collect();
    let line = |items: &mut dyn Iterator<Item = &str>| {
        let padded: Vec<String> = items
            .zip(&widths)
            .map(|(s, &w)| format!("{s}{}", " ".repeat(w - s.chars().count())))
            .collect();
        format!("| {} |\n", padded.join(" | "))
    };
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    let mut out = line(&mut columns.iter().copied());
    out.push_str(&format!("|-{}-|\n", rule.join("-|-")));
    out.push_str(&line(&mut cells.iter().map(String::as_str)));
    out
}

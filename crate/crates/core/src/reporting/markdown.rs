use std::fmt::Write;

use crate::assessment::QuestionBlock;
use crate::scoring::Level;

use super::document::{ReportDocument, ResidualCells};

pub const COMPARATIVE_HEADER: [&str; 9] = ["Risk", "L", "S", "Overall impact", "EFs", "MMs", "rL", "rS", "Final Impact"];
pub const EXCLUDED_CELL: &str = "excluded (EF)";
pub const LEGEND: &str = "L: low, M: medium; H: high; VH: very high";

fn cell(text: &str) -> String {
    text.replace('|', "\\|").replace(['\r', '\n'], " ")
}

fn table_row(out: &mut String, cells: &[String]) {
    out.push_str("| ");
    out.push_str(&cells.join(" | "));
    out.push_str(" |\n");
}

fn header(out: &mut String, names: &[&str]) {
    table_row(out, &names.iter().map(|n| n.to_string()).collect::<Vec<_>>());
    table_row(out, &names.iter().map(|_| "---".to_string()).collect::<Vec<_>>());
}

fn summarize(items: &[String]) -> String {
    match items.len() {
        0 => "-".to_string(),
        1 => "1 measure".to_string(),
        n => format!("{n} measures"),
    }
}

fn list(out: &mut String, label: &str, items: &[String]) {
    if !items.is_empty() {
        let _ = writeln!(out, "- {label}: {}", items.join("; "));
    }
}

pub(super) fn render(doc: &ReportDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# HRIA report: {}\n", doc.title);
    let _ = writeln!(out, "- Id: `{}`", doc.id);
    if let Some(rev) = doc.revision {
        let _ = writeln!(out, "- Revision: {rev}");
    }
    if let Some(stage) = doc.stage {
        let _ = writeln!(out, "- Stage: {} ({})", stage.as_str(), stage.title());
    }
    out.push('\n');

    if let Some(s) = &doc.scoping {
        out.push_str("## Scoping summary\n\n");
        let _ = writeln!(out, "{}\n", s.product_description);
        list(&mut out, "Target countries", &s.target_countries);
        list(&mut out, "Rights-holders", &s.rights_holders);
        list(&mut out, "Data categories", &s.data_categories);
        list(&mut out, "Processing purposes", &s.processing_purposes);
        list(&mut out, "Duty-bearers", &s.duty_bearers);
        out.push('\n');
        header(&mut out, &["Question block", "Answered"]);
        for b in &s.blocks {
            table_row(&mut out, &[cell(block_title(b.block)), format!("{}/{}", b.answered, b.total)]);
        }
        out.push('\n');
        if !s.stakeholders.is_empty() {
            header(&mut out, &["Stakeholder", "Category", "Engaged", "Notes"]);
            for st in &s.stakeholders {
                table_row(
                    &mut out,
                    &[
                        cell(&st.name),
                        cell(&st.category),
                        if st.engaged { "yes" } else { "no" }.to_string(),
                        cell(&st.notes),
                    ],
                );
            }
            out.push('\n');
        }
    }

    if !doc.envisaged.is_empty() {
        out.push_str("## Envisaged risks\n\n");
        header(&mut out, &["Risk", "L", "S", "Overall impact"]);
        for r in &doc.envisaged {
            table_row(
                &mut out,
                &[
                    cell(&r.risk),
                    r.likelihood.level.code().to_string(),
                    r.severity.level.code().to_string(),
                    r.overall.code().to_string(),
                ],
            );
        }
        let _ = writeln!(out, "\n{LEGEND}\n");
    }

    if let Some(c) = &doc.comparative {
        out.push_str("## Comparative risk impact analysis\n\n");
        header(&mut out, &COMPARATIVE_HEADER);
        for r in &c.rows {
            let (rl, rs, fin) = match &r.residual {
                ResidualCells::None => (String::new(), String::new(), String::new()),
                ResidualCells::Excluded => (EXCLUDED_CELL.into(), EXCLUDED_CELL.into(), EXCLUDED_CELL.into()),
                ResidualCells::Rated {
                    likelihood,
                    severity,
                    final_impact,
                } => (
                    likelihood.level.code().into(),
                    severity.level.code().into(),
                    final_impact.code().into(),
                ),
            };
            table_row(
                &mut out,
                &[
                    cell(&r.risk),
                    r.likelihood.code().into(),
                    r.severity.code().into(),
                    r.overall.code().into(),
                    summarize(&r.excluding_factors),
                    summarize(&r.mitigation_measures),
                    rl,
                    rs,
                    fin,
                ],
            );
        }
        table_row(
            &mut out,
            &[
                "Overall impact (all impacted areas)".into(),
                String::new(),
                String::new(),
                c.aggregate_before.clone().unwrap_or_default(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                c.aggregate_after.clone().unwrap_or_default(),
            ],
        );
        let _ = writeln!(out, "\n{LEGEND}\n");

        for r in c.rows.iter().filter(|r| !r.excluding_factors.is_empty() || !r.mitigation_measures.is_empty()) {
            let _ = writeln!(out, "### Measures: {}\n", r.risk);
            for ef in &r.excluding_factors {
                let _ = writeln!(out, "- EF: {ef}");
            }
            for mm in &r.mitigation_measures {
                let _ = writeln!(out, "- MM: {mm}");
            }
            out.push('\n');
        }
    }

    if !doc.precautionary.is_empty() {
        out.push_str("## Precautionary items\n\n");
        for p in &doc.precautionary {
            let status = match &p.accepted {
                Some(a) => format!("accepted: {a}"),
                None => "open".to_string(),
            };
            let _ = writeln!(out, "- **{}** ({}, `{}`): {} [{}]", p.risk, p.risk_id, p.right_key, p.uncertainty_rationale, status);
            for m in &p.recommended_measures {
                let _ = writeln!(out, "  - recommended: {m}");
            }
        }
        out.push('\n');
    }

    if !doc.warnings.is_empty() {
        out.push_str("## Escalation warnings\n\n");
        for w in &doc.warnings {
            let _ = writeln!(out, "- {w}");
        }
        out.push('\n');
    }

    if let Some(i) = &doc.integrated {
        out.push_str("## Integrated assessment\n\n");
        let _ = writeln!(out, "- Components: {}", i.components.join(", "));
        let _ = writeln!(
            out,
            "- Escalation threshold: {}\n",
            i.escalation_threshold.map_or_else(|| "none".to_string(), |t| t.to_string())
        );
        header(&mut out, &["Right", "Components", "Max level", "Contributing", "Escalated", "Integrated level"]);
        for r in &i.rows {
            table_row(
                &mut out,
                &[
                    cell(&r.right),
                    cell(&r.components.join(", ")),
                    r.max_level.code().into(),
                    r.contributing.to_string(),
                    if r.escalated { "yes" } else { "no" }.into(),
                    r.integrated_level.code().into(),
                ],
            );
        }
        let _ = writeln!(out, "\n{LEGEND}\n");
        list(&mut out, "Precautionary items", &i.precautionary);
        if !i.precautionary.is_empty() {
            out.push('\n');
        }
    }

    if !doc.notes.is_empty() {
        out.push_str("## Notes\n\n");
        for n in &doc.notes {
            let _ = writeln!(out, "- {n}");
        }
        out.push('\n');
    }

    let m = &doc.methodology;
    out.push_str("## Methodology\n\n");
    out.push_str("### Likelihood (rows: exposure, columns: probability)\n\n");
    matrix(&mut out, &m.likelihood_matrix);
    out.push_str("### Severity (rows: effort, columns: gravity)\n\n");
    matrix(&mut out, &m.severity_matrix);
    out.push_str("### Score bins\n\n");
    header(&mut out, &["Level", "Likelihood scores", "Severity scores"]);
    for (l, s) in m.likelihood_bins.iter().zip(&m.severity_bins) {
        table_row(
            &mut out,
            &[l.level.code().into(), format!("{}-{}", l.min, l.max), format!("{}-{}", s.min, s.max)],
        );
    }
    out.push_str("\n### Overall impact (rows: likelihood, columns: severity)\n\n");
    header(&mut out, &["L \\ S", "L", "M", "H", "VH"]);
    for (l, row) in Level::ALL.iter().zip(&m.overall_matrix) {
        let mut cells = vec![l.code().to_string()];
        cells.extend(row.iter().map(|c| c.code().to_string()));
        table_row(&mut out, &cells);
    }
    out.push('\n');
    for n in &m.notes {
        let _ = writeln!(out, "- {n}");
    }
    out
}

fn matrix(out: &mut String, rows: &[Vec<u8>]) {
    header(out, &["", "L", "M", "H", "VH"]);
    for (l, row) in Level::ALL.iter().zip(rows) {
        let mut cells = vec![l.code().to_string()];
        cells.extend(row.iter().map(|v| v.to_string()));
        table_row(out, &cells);
    }
    out.push('\n');
}

fn block_title(block: QuestionBlock) -> &'static str {
    match block {
        QuestionBlock::ProductDescription => "Description and analysis of the product/service",
        QuestionBlock::HumanRightsContext => "Human rights context",
        QuestionBlock::ControlsInPlace => "Controls in place",
        QuestionBlock::StakeholderEngagement => "Stakeholder engagement",
    }
}

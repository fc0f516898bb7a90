mod args;

use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use args::{Cli, Command, Fixture, Format, NoteCommand, RightCommand, RiskCommand, RoundCommand, ScopeCommand, StageCommand};
use chrono::Utc;
use clap::{CommandFactory, Parser};
use hria_core::assessment::{Answer, ExcludingFactor, MitigationMeasure, NewRisk, Residual, Round, ScopingRecord};
use hria_core::persistence::{self, load_assessment, save_assessment};
use hria_core::reporting::{radial_chart, render_report, ReportFormat, ReportSubject};
use hria_core::workflow::{integrate, shared_catalog};
use hria_core::{fixtures, Assessment, AssessmentMetadata, Catalog, Document, PrecautionaryFlag, RightEntry};
use hria_service::ServiceConfig;

enum Failure {
    /// Exit 1: the request was well formed but the engine refused it.
    Domain(String),
    /// Exit 2: bad arguments; carries the subcommand path for its help text.
    Usage(String, &'static [&'static str]),
}

fn domain(e: impl Display) -> Failure {
    Failure::Domain(e.to_string())
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg, path)) => {
            eprintln!("error: {msg}\n");
            let argv = std::iter::once("hria").chain(path.iter().copied()).chain(["--help"]);
            if let Err(help) = Cli::command().try_get_matches_from(argv) {
                eprint!("{}", help.render());
            }
            ExitCode::from(2)
        }
    }
}

fn catalog(cli_catalog: Option<&Path>) -> Result<Catalog, Failure> {
    match cli_catalog {
        None => Ok(Catalog::builtin()),
        Some(path) => persistence::load_catalog(path).map_err(|e| domain(format!("HRIA_CATALOG {}: {e}", path.display()))),
    }
}

fn load(path: &Path) -> Result<Assessment, Failure> {
    load_assessment(path).map_err(|e| domain(format!("{}: {e}", path.display())))
}

/// Loads, applies `f`, saves, and reports the new revision.
fn edit<T>(
    path: &Path,
    what: impl Display,
    f: impl FnOnce(&mut Assessment) -> Result<T, hria_core::AssessmentError>,
) -> Result<T, Failure> {
    let mut a = load(path)?;
    let out = f(&mut a).map_err(domain)?;
    save_assessment(&a, path).map_err(domain)?;
    println!("{}: {what} (revision {})", a.id(), a.revision());
    Ok(out)
}

fn split_pair<'a>(raw: &'a str, sep: &str, flag: &str) -> Result<(&'a str, &'a str), Failure> {
    raw.split_once(sep)
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| Failure::Domain(format!("{flag} expects a value containing {sep:?}, got {raw:?}")))
}

fn write_output(output: Option<&Path>, text: &str) -> Outcome {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| domain(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn report_format(f: Format) -> ReportFormat {
    match f {
        Format::Md => ReportFormat::Markdown,
        Format::Json => ReportFormat::Json,
        Format::Svg => ReportFormat::Svg,
    }
}

fn run(cli: Cli) -> Outcome {
    let catalog_path = cli.catalog.as_deref();
    match cli.command {
        Command::Init(a) => {
            if a.file.exists() && !a.force {
                return Err(domain(format!("{} exists (use --force to overwrite)", a.file.display())));
            }
            let assessment = match a.fixture {
                Some(Fixture::HelloBarbie) => fixtures::hello_barbie_initial(),
                Some(Fixture::HelloBarbieMitigated) => fixtures::hello_barbie_mitigated(),
                None => Assessment::new(AssessmentMetadata {
                    title: a.title.unwrap_or_default(),
                    id: a.id,
                    description: a.description,
                })
                .map_err(domain)?,
            };
            save_assessment(&assessment, &a.file).map_err(domain)?;
            println!("{}: created {} at stage {}", assessment.id(), a.file.display(), assessment.stage());
            Ok(())
        }
        Command::Scope(ScopeCommand::Set(a)) => {
            let replacement = match &a.from_json {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| domain(format!("{}: {e}", path.display())))?;
                    Some(serde_json::from_str::<ScopingRecord>(&text).map_err(|e| domain(format!("{}: {e}", path.display())))?)
                }
                None => None,
            };
            let mut answers = Vec::new();
            for (raw, extension) in a.answer.iter().map(|r| (r, false)).chain(a.extension.iter().map(|r| (r, true))) {
                let (key, answer) = split_pair(raw, "=", "--answer")?;
                let (block, key) = split_pair(key, ".", "--answer")?;
                answers.push((block.to_string(), key.to_string(), answer.to_string(), extension));
            }
            let mut s = load(&a.file)?.scoping().clone();
            if let Some(r) = replacement {
                s = r;
            }
            if let Some(d) = a.product_description {
                s.product_description = d;
            }
            for (field, values) in [
                (&mut s.target_countries, a.target_countries),
                (&mut s.rights_holders, a.rights_holders),
                (&mut s.data_categories, a.data_categories),
                (&mut s.processing_purposes, a.processing_purposes),
                (&mut s.duty_bearers, a.duty_bearers),
            ] {
                if !values.is_empty() {
                    *field = values;
                }
            }
            for (block, key, answer, extension) in answers {
                let map = match block.as_str() {
                    "human_rights_context" => &mut s.human_rights_context,
                    "controls_in_place" => &mut s.controls_in_place,
                    "stakeholder_engagement" => &mut s.stakeholder_engagement,
                    other => {
                        return Err(Failure::Domain(format!(
                            "unknown answer block {other:?} (expected human_rights_context, controls_in_place or stakeholder_engagement)"
                        )))
                    }
                };
                let value = if extension { Answer::extension(answer) } else { Answer::new(answer) };
                map.insert(key, value);
            }
            edit(&a.file, "scoping updated", |x| x.set_scoping(s))
        }
        Command::Right(RightCommand::Register(a)) => {
            let mut entry = RightEntry::custom(&a.key, a.title, a.description);
            if let Some(notes) = a.context_notes {
                entry = entry.with_context_notes(notes);
            }
            edit(&a.file, format_args!("right {} registered", a.key), |x| x.register_right(entry))
        }
        Command::Risk(cmd) => risk(cmd, catalog_path),
        Command::Round(RoundCommand::Apply(a)) => {
            let usage = |m: String| Failure::Usage(m, &["round", "apply"]);
            let residual = match (a.excluded, a.residual.ratings().map_err(usage)?) {
                (true, _) => Residual::Excluded,
                (false, Some(r)) => Residual::Rated(r),
                (false, None) => return Err(usage("give residual ratings or --excluded".into())),
            };
            let excluding_factors = a
                .excluding_factors
                .iter()
                .map(|raw| {
                    split_pair(raw, "::", "--excluding-factors").map(|(d, l)| ExcludingFactor {
                        description: d.to_string(),
                        legal_basis: l.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mitigation_measures = a
                .mitigation_measures
                .iter()
                .map(|raw| match raw.split_once("::") {
                    Some((d, c)) => MitigationMeasure::new(d.trim(), c.trim()),
                    None => MitigationMeasure::new(raw.trim(), ""),
                })
                .collect();
            let risk_id = a.risk.clone();
            let warning = edit(&a.file, format_args!("{} round applied", a.risk), |x| {
                let index = a
                    .index
                    .unwrap_or_else(|| x.risk(&risk_id).map_or(1, |r| r.rounds().len() as u32 + 1));
                let round = Round {
                    index,
                    excluding_factors,
                    mitigation_measures,
                    residual,
                    rationale: a.rationale,
                    created_at: a.created_at.unwrap_or_else(Utc::now),
                };
                x.apply_round(&risk_id, round)
            })?;
            if let Some(w) = warning {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Command::Stage(StageCommand::Advance(a)) => edit(&a.file, format_args!("stage {}", a.to), |x| {
            x.advance(a.to, a.override_rationale.as_deref(), a.at.unwrap_or_else(Utc::now))
        }),
        Command::Stage(StageCommand::Check(a)) => {
            let current = load(&a.file)?.stage();
            let stage = a.stage.unwrap_or(current);
            match a.item {
                Some(item) => edit(&a.file, format_args!("{stage} task {item} updated"), |x| x.set_task(stage, item, !a.undo)),
                None => edit(&a.file, format_args!("{stage} tasks done"), |x| x.complete_stage_tasks(stage)),
            }
        }
        Command::Stage(StageCommand::Show(a)) => {
            let x = load(&a.file)?;
            println!("{}: stage {} (revision {})", x.id(), x.stage(), x.revision());
            for checklist in x.checklists() {
                println!("{}", checklist.stage);
                for (i, item) in checklist.items.iter().enumerate() {
                    println!("  [{}] {i}: {}", if item.done { "x" } else { " " }, item.task);
                }
            }
            Ok(())
        }
        Command::Note(NoteCommand::Add { file, note }) => edit(&file, "note added", |x| x.add_note(note)),
        Command::Report(a) => {
            let catalog = catalog(catalog_path)?;
            let doc = persistence::load(&a.file).map_err(|e| domain(format!("{}: {e}", a.file.display())))?;
            let text = match (&doc, a.format) {
                (Document::Assessment(x), Format::Svg) => radial_chart(x, !a.no_final).map_err(domain)?,
                (Document::Assessment(x), f) => render_report(ReportSubject::Assessment(x), report_format(f)).map_err(domain)?,
                (Document::Integrated(i), f) => render_report(
                    ReportSubject::Integrated {
                        integrated: i,
                        catalog: &catalog,
                    },
                    report_format(f),
                )
                .map_err(domain)?,
                (Document::Catalog(_), _) => return Err(domain("catalog files have no report")),
            };
            write_output(a.output.as_deref(), &text)
        }
        Command::Integrate(a) => {
            let base = catalog(catalog_path)?;
            let components = a.files.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&Assessment> = components.iter().collect();
            let catalog = shared_catalog(&base, &refs).map_err(domain)?;
            let integrated = integrate(&refs, &catalog, a.escalation_threshold.0).map_err(domain)?;
            if let Some(path) = &a.save {
                persistence::save(&Document::Integrated(integrated.clone()), path).map_err(domain)?;
            }
            let text = render_report(
                ReportSubject::Integrated {
                    integrated: &integrated,
                    catalog: &catalog,
                },
                report_format(a.format),
            )
            .map_err(domain)?;
            write_output(a.output.as_deref(), &text)
        }
        Command::Validate(a) => match persistence::load(&a.file) {
            Ok(doc) => {
                let label = match &doc {
                    Document::Assessment(x) => format!("assessment {} at revision {}", x.id(), x.revision()),
                    Document::Catalog(c) => format!("catalog with {} rights", c.len()),
                    Document::Integrated(i) => format!("integrated assessment of {} components", i.component_refs.len()),
                };
                println!("{}: valid {label}", a.file.display());
                Ok(())
            }
            Err(e) => Err(domain(format!("{}: {e}", a.file.display()))),
        },
        Command::Serve(a) => {
            let config = ServiceConfig {
                root: a.root,
                catalog: catalog(catalog_path)?,
                host: a.host,
                port: a.port,
                console_dir: a.console_dir,
            };
            let runtime = tokio::runtime::Runtime::new().map_err(domain)?;
            runtime.block_on(async {
                let listener = hria_service::bind(&config).await.map_err(domain)?;
                let addr = listener.local_addr().map_err(domain)?;
                println!("serving {} on http://{addr}", config.root.display());
                hria_service::run(listener, config).await.map_err(domain)
            })
        }
    }
}

fn risk(cmd: RiskCommand, catalog_path: Option<&Path>) -> Outcome {
    match cmd {
        RiskCommand::Add(a) => {
            let initial = a.initial.ratings().map_err(|m| Failure::Usage(m, &["risk", "add"]))?;
            let mut new = NewRisk {
                id: a.id.clone(),
                right_key: a.right_key,
                description: a.description,
                initial,
                guiding_answers: Default::default(),
                precautionary: a.uncertainty_rationale.map(PrecautionaryFlag::new),
            };
            for raw in &a.guiding_answer {
                let (q, ans) = split_pair(raw, "=", "--guiding-answer")?;
                new = new.with_guiding_answer(q, ans);
            }
            let catalog = catalog(catalog_path)?;
            edit(&a.file, format_args!("risk {} added", a.id), |x| x.add_risk_from(new, &catalog))
        }
        RiskCommand::Rate(a) => {
            let ratings = a
                .ratings
                .ratings()
                .and_then(|r| r.ok_or_else(|| "all four ratings are required".to_string()))
                .map_err(|m| Failure::Usage(m, &["risk", "rate"]))?;
            edit(&a.file, format_args!("risk {} rated", a.risk), |x| x.rate_risk(&a.risk, ratings))
        }
        RiskCommand::FlagPrecautionary(a) => edit(&a.file, format_args!("risk {} flagged", a.risk), |x| {
            x.flag_precautionary(&a.risk, &a.uncertainty_rationale, a.recommended_measures)
        }),
        RiskCommand::AcceptPrecautionary(a) => {
            if a.ratings.ratings().map_err(|m| Failure::Usage(m, &["risk", "accept-precautionary"]))?.is_some() {
                return Err(Failure::Usage("ratings are only taken by resolve-precautionary".into(), &["risk", "accept-precautionary"]));
            }
            edit(&a.file, format_args!("risk {} uncertainty accepted", a.risk), |x| {
                x.accept_precautionary(&a.risk, &a.rationale)
            })
        }
        RiskCommand::ResolvePrecautionary(a) => {
            let ratings = a.ratings.ratings().map_err(|m| Failure::Usage(m, &["risk", "resolve-precautionary"]))?;
            edit(&a.file, format_args!("risk {} resolved", a.risk), |x| {
                x.resolve_precautionary(&a.risk, &a.rationale, ratings)
            })
        }
    }
}

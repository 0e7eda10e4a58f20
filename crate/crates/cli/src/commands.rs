use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use cardgauge_core::card::{emit_template, CardParser, PlaceholderPolicy};
use cardgauge_core::corpus::{self, CorpusRecord};
use cardgauge_core::diagnostics::{self, Aggregate};
use cardgauge_core::report::{self, CardReport, GateOutcome, GatePolicy, ReportFormat, VacuousPolicy};
use cardgauge_core::scoring::{self, FillPlan};
use cardgauge_core::taxonomy::{LoadOptions, Taxonomy, STRICT_MODULE_COUNT};
use chrono::{DateTime, Utc};

use crate::{
    AggregateArg, Cli, Command, GlobalArgs, MatrixFormatArg, PlanFormatArg, PolicyArg, ReportFormatArg, ScoreInputs,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;

const STDIN: &str = "-";

pub fn run(cli: Cli) -> Result<u8> {
    let taxonomy = load_taxonomy(&cli.global)?;
    let policy = load_policy(&cli.global)?;
    let parser = CardParser::new(&taxonomy).with_policy(policy);

    match cli.command {
        Command::Stats { corpus, out } => cmd_stats(&taxonomy, &parser, &corpus, &out),
        Command::Score {
            inputs,
            format,
            out,
            scenario,
        } => cmd_score(&taxonomy, &parser, &inputs, format, out.as_deref(), scenario.as_deref()),
        Command::Gate {
            inputs,
            policy,
            modules,
            quiet,
        } => cmd_gate(&taxonomy, &parser, &inputs, policy, &modules, quiet),
        Command::FillPlan { inputs, module, format } => cmd_fill_plan(&taxonomy, &parser, &inputs, &module, format),
        Command::Coverage {
            corpus,
            format,
            aggregate,
            out,
            csv,
            gaps,
        } => {
            let (format, out) = match csv {
                Some(path) => (MatrixFormatArg::Csv, Some(path)),
                None => (format, out),
            };
            cmd_coverage(&taxonomy, &parser, &corpus, format, aggregate, out.as_deref(), gaps)
        }
        Command::Template { module, out } => {
            let text = emit_template(&taxonomy, module.as_deref())?;
            write_output(out.as_deref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::Validate => cmd_validate(&taxonomy),
    }
}

fn is_stdin(path: &Path) -> bool {
    path.as_os_str() == STDIN
}

fn read_input(path: &Path) -> Result<String> {
    if is_stdin(path) {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text).context("reading stdin")?;
        Ok(text)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) if !is_stdin(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        _ => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn load_taxonomy(global: &GlobalArgs) -> Result<Taxonomy> {
    let options = LoadOptions {
        allow_extra_modules: global.allow_extra_modules,
    };
    match &global.taxonomy {
        Some(path) => {
            let text = read_input(path)?;
            Taxonomy::load_with(&text, &options).with_context(|| format!("taxonomy {}", path.display()))
        }
        None => Ok(Taxonomy::load_with(Taxonomy::default_source(), &options)?),
    }
}

fn load_policy(global: &GlobalArgs) -> Result<PlaceholderPolicy> {
    match &global.placeholder_tokens {
        Some(path) => Ok(PlaceholderPolicy::from_token_list(&read_input(path)?)),
        None => Ok(PlaceholderPolicy::default()),
    }
}

/// Report timestamp: `SOURCE_DATE_EPOCH` when set, otherwise now.
fn generated_at() -> Result<DateTime<Utc>> {
    match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(raw) => {
            let secs: i64 = raw
                .trim()
                .parse()
                .with_context(|| format!("SOURCE_DATE_EPOCH `{raw}` is not an integer"))?;
            DateTime::from_timestamp(secs, 0).ok_or_else(|| anyhow!("SOURCE_DATE_EPOCH `{raw}` is out of range"))
        }
        Err(_) => Ok(Utc::now()),
    }
}

fn load_records(corpus_path: &Path, parser: &CardParser<'_>) -> Result<Vec<CorpusRecord>> {
    let entries = if is_stdin(corpus_path) {
        corpus::parse_manifest(&read_input(corpus_path)?, Path::new("."))?
    } else {
        corpus::discover(corpus_path)?
    };
    let cards = corpus::ingest(&entries, parser)?;
    for ingested in &cards {
        for warning in &ingested.card.warnings {
            eprintln!("warning: {}: {warning}", ingested.entry.path.display());
        }
    }
    Ok(cards.iter().map(|c| CorpusRecord::from_card(&c.card)).collect())
}

fn load_scoring_inputs(
    taxonomy: &Taxonomy,
    parser: &CardParser<'_>,
    inputs: &ScoreInputs,
) -> Result<(cardgauge_core::CardDocument, cardgauge_core::CorpusStats)> {
    if is_stdin(&inputs.card) && is_stdin(&inputs.stats) {
        bail!("card and stats cannot both be read from stdin");
    }
    let stats_text = read_input(&inputs.stats)?;
    let stats =
        corpus::load_stats(&stats_text, taxonomy).with_context(|| format!("stats {}", inputs.stats.display()))?;
    let card_text = read_input(&inputs.card)?;
    let mut card = parser
        .parse(&card_text)
        .with_context(|| format!("card {}", inputs.card.display()))?;
    if card.project_id.is_empty() && !is_stdin(&inputs.card) {
        if let Some(stem) = inputs.card.file_stem() {
            card.project_id = stem.to_string_lossy().into_owned();
        }
    }
    Ok((card, stats))
}

fn build_report(taxonomy: &Taxonomy, parser: &CardParser<'_>, inputs: &ScoreInputs) -> Result<CardReport> {
    let (card, stats) = load_scoring_inputs(taxonomy, parser, inputs)?;
    Ok(CardReport::build(&card, &stats, taxonomy, generated_at()?)?)
}

fn cmd_stats(taxonomy: &Taxonomy, parser: &CardParser<'_>, corpus_path: &Path, out: &Path) -> Result<u8> {
    let records = load_records(corpus_path, parser)?;
    let stats = corpus::compute_stats(&records, taxonomy)?;
    let text = corpus::save_stats(&stats, taxonomy, generated_at()?);
    write_output(Some(out), &text)?;

    let mut summary = format!("N={}\n", stats.n_projects);
    for module in &stats.modules {
        summary.push_str(&format!("  {:<26}S={:.4}\n", module.module_id, module.s_total));
    }
    if stats.is_degenerate() {
        summary.push_str("warning: corpus documents no parameters\n");
    }
    if is_stdin(out) {
        eprint!("{summary}");
    } else {
        print!("{summary}");
    }
    Ok(EXIT_OK)
}

fn cmd_score(
    taxonomy: &Taxonomy,
    parser: &CardParser<'_>,
    inputs: &ScoreInputs,
    format: ReportFormatArg,
    out: Option<&Path>,
    scenario: Option<&str>,
) -> Result<u8> {
    let mut report = build_report(taxonomy, parser, inputs)?;
    if let Some(label) = scenario {
        report.apply_scenario(label, taxonomy)?;
    }
    let format = match format {
        ReportFormatArg::Text => ReportFormat::Text,
        ReportFormatArg::Json => ReportFormat::Json,
        ReportFormatArg::Markdown => ReportFormat::Markdown,
    };
    write_output(out, &report::render_report(&report, format))?;
    Ok(EXIT_OK)
}

fn resolve_module_ids(taxonomy: &Taxonomy, names: &[String]) -> Result<Vec<String>> {
    names
        .iter()
        .map(|name| {
            taxonomy
                .find_module(name)
                .map(|m| m.id.clone())
                .ok_or_else(|| anyhow!("unknown module `{name}`"))
        })
        .collect()
}

fn cmd_gate(
    taxonomy: &Taxonomy,
    parser: &CardParser<'_>,
    inputs: &ScoreInputs,
    policy: PolicyArg,
    modules: &[String],
    quiet: bool,
) -> Result<u8> {
    let gate_policy = GatePolicy {
        vacuous: match policy {
            PolicyArg::Strict => VacuousPolicy::Strict,
            PolicyArg::AllowVacuous => VacuousPolicy::AllowVacuous,
        },
        modules: if modules.is_empty() {
            None
        } else {
            Some(resolve_module_ids(taxonomy, modules)?)
        },
    };
    let report = build_report(taxonomy, parser, inputs)?;
    let outcome = report::gate_decision(&report, &gate_policy);
    if !quiet {
        let gated = |ids: &[String]| -> Vec<String> {
            ids.iter()
                .filter(|id| gate_policy.modules.as_ref().is_none_or(|allow| allow.contains(id)))
                .cloned()
                .collect()
        };
        match outcome {
            GateOutcome::Pass => eprintln!("gate: PASS"),
            GateOutcome::Fail => eprintln!(
                "gate: FAIL, insufficient: {}",
                gated(&report.overall.insufficient_modules).join(", ")
            ),
            GateOutcome::VacuousUnderStrict => eprintln!(
                "gate: FAIL, vacuous under strict policy: {}",
                gated(&report.overall.vacuous_modules).join(", ")
            ),
        }
    }
    Ok(outcome.exit_code())
}

fn render_plan_text(plan: &FillPlan) -> String {
    let mut out = format!(
        "module: {}\nbaseline {:.3}  current {:.3}\n",
        plan.module_id, plan.baseline, plan.starting_prior
    );
    match plan.reaches_baseline_at {
        Some(0) => {
            out.push_str("baseline already met\n");
            return out;
        }
        Some(k) => {
            for (idx, step) in plan.steps.iter().take(k).enumerate() {
                out.push_str(&format!(
                    "  {:>2}. {:<32}+{:.3}  -> {:.3}\n",
                    idx + 1,
                    step.parameter_id,
                    step.prior,
                    step.cumulative_after
                ));
            }
            let noun = if k == 1 { "fill" } else { "fills" };
            out.push_str(&format!("reaches baseline after {k} {noun}\n"));
        }
        None => {
            for (idx, step) in plan.steps.iter().enumerate() {
                out.push_str(&format!(
                    "  {:>2}. {:<32}+{:.3}  -> {:.3}\n",
                    idx + 1,
                    step.parameter_id,
                    step.prior,
                    step.cumulative_after
                ));
            }
            out.push_str("baseline unreachable even with every parameter filled\n");
        }
    }
    out
}

fn cmd_fill_plan(
    taxonomy: &Taxonomy,
    parser: &CardParser<'_>,
    inputs: &ScoreInputs,
    module: &str,
    format: PlanFormatArg,
) -> Result<u8> {
    let module_id = resolve_module_ids(taxonomy, &[module.to_string()])?.remove(0);
    let (card, stats) = load_scoring_inputs(taxonomy, parser, inputs)?;
    let plan = scoring::fill_first(&card, &module_id, &stats, taxonomy)?;
    let text = match format {
        PlanFormatArg::Text => render_plan_text(&plan),
        PlanFormatArg::Json => {
            let mut json = serde_json::to_string_pretty(&plan)?;
            json.push('\n');
            json
        }
    };
    write_output(None, &text)?;
    Ok(EXIT_OK)
}

fn cmd_coverage(
    taxonomy: &Taxonomy,
    parser: &CardParser<'_>,
    corpus_path: &Path,
    format: MatrixFormatArg,
    aggregate: AggregateArg,
    out: Option<&Path>,
    gaps: Option<f64>,
) -> Result<u8> {
    let records = load_records(corpus_path, parser)?;
    let matrix = diagnostics::coverage_matrix(&records, taxonomy)?;
    let text = match format {
        MatrixFormatArg::Csv => diagnostics::export_csv(
            &matrix,
            match aggregate {
                AggregateArg::Union => Aggregate::Union,
                AggregateArg::Mean => Aggregate::Mean,
            },
        ),
        MatrixFormatArg::Json => diagnostics::export_json(&matrix),
    };
    write_output(out, &text)?;
    if let Some(threshold) = gaps {
        eprint!("{}", diagnostics::gap_report(&matrix, threshold));
    }
    Ok(EXIT_OK)
}

fn cmd_validate(taxonomy: &Taxonomy) -> Result<u8> {
    println!(
        "taxonomy {}: {} modules, {} parameters, {} compound fields, {} ignored fields",
        taxonomy.version,
        taxonomy.modules.len(),
        taxonomy.leaf_count(),
        taxonomy.compound_map.len(),
        taxonomy.irrelevant_fields.len()
    );
    if taxonomy.modules.len() != STRICT_MODULE_COUNT {
        eprintln!(
            "warning: taxonomy has {} modules; scores are not comparable with the standard {}-module layout",
            taxonomy.modules.len(),
            STRICT_MODULE_COUNT
        );
    }
    Ok(EXIT_OK)
}

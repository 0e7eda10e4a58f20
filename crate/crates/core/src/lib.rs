//! Documentation-sufficiency scoring for model cards.
//!
//! The pipeline:
//!
//! 1. [`taxonomy`]: load the module/parameter hierarchy and resolve raw field
//!    names onto atomic parameters.
//! 2. [`card`]: parse a card into per-parameter entries classified as
//!    documented, placeholder or absent.
//! 3. [`corpus`]: count, over a corpus of cards, how many projects document
//!    each parameter. A parameter's prior is that count over the corpus size.
//! 4. [`scoring`]: derive per-module baselines from the corpus, judge each
//!    module of a card against its baseline and plan which fields to fill
//!    first.
//! 5. [`diagnostics`]: task-family by module coverage over a corpus.
//! 6. [`report`]: render results and turn them into CI gate decisions.

pub mod card;
pub mod corpus;
pub mod diagnostics;
mod location;
pub mod report;
pub mod scoring;
pub mod taxonomy;

#[cfg(test)]
mod test_support;

pub use card::{parse_card, CardDocument, CardError, CardParser, EntryStatus, PlaceholderPolicy};
pub use corpus::{compute_stats, parameter_prior, CorpusError, CorpusRecord, CorpusStats};
pub use location::Location;
pub use report::{gate_decision, render_report, CardReport, GateOutcome, GatePolicy, ReportFormat};
pub use scoring::{fill_first, module_baseline, score_card, score_module, FillPlan, ModuleScore, Verdict};
pub use taxonomy::{Resolution, Taxonomy, TaxonomyError};

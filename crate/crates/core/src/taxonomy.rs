//! Hierarchical parameter taxonomy.
//!
//! A taxonomy is a containment tree: a fixed set of top-level modules, each
//! holding nested groups that terminate in atomic parameters. Parameters are
//! the unit of scoring. Raw field names found in cards are mapped onto
//! parameters through [`Taxonomy::resolve_field`], which applies the alias,
//! compound and irrelevant-field tables declared in the taxonomy file.
//!
//! File layout (TOML):
//!
//! ```toml
//! version = "0.1.0"
//! irrelevant = ["star_count"]
//!
//! [compounds]
//! citation_info = ["citation_authors", "citation_title", "citation_year"]
//!
//! [[modules]]
//! id = "model_details"
//! name = "Model Details"
//!
//! [[modules.children]]          # a group: `name` + `children`
//! name = "Identity"
//!
//! [[modules.children.children]] # a leaf: `id` + `name`
//! id = "model_name"
//! name = "Model name"
//! aliases = ["model_title", "display_name"]
//! description = "Canonical name under which the model is published."
//! evidence_expected = false
//! ```

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Deserialize;
use thiserror::Error;
use toml::Spanned;

use crate::location::{suffix, Location};

/// Number of top-level modules a taxonomy must declare in strict mode.
pub const STRICT_MODULE_COUNT: usize = 8;

/// Maximum number of group levels between a module and a parameter.
pub const MAX_PATH_DEPTH: usize = 4;

/// Top-level keys of the canonical card format; module ids may not shadow them.
pub const RESERVED_CARD_KEYS: [&str; 3] = ["project_id", "task_family", "card_version"];

const DEFAULT_TAXONOMY: &str = include_str!("../data/default_taxonomy.toml");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("taxonomy schema error{}: {message}", suffix(.location))]
    Schema {
        message: String,
        location: Option<Location>,
    },
    #[error("duplicate id `{id}`{}", suffix(.location))]
    DuplicateId { id: String, location: Option<Location> },
    #[error("name `{name}` is claimed by both {first} and {second}{}", suffix(.location))]
    AliasCollision {
        name: String,
        first: String,
        second: String,
        location: Option<Location>,
    },
    #[error("parameter `{id}` is nested {depth} groups deep (limit {MAX_PATH_DEPTH}){}", suffix(.location))]
    DepthExceeded {
        id: String,
        depth: usize,
        location: Option<Location>,
    },
    #[error("taxonomy declares {found} modules, expected {STRICT_MODULE_COUNT} (use the extra-modules override to allow this)")]
    ModuleCountViolation { found: usize },
    #[error("unknown module `{0}`")]
    UnknownModule(String),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
}

impl TaxonomyError {
    fn schema(message: impl Into<String>) -> Self {
        TaxonomyError::Schema {
            message: message.into(),
            location: None,
        }
    }
}

/// An atomic documentation parameter (a taxonomy leaf).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterSpec {
    pub id: String,
    pub display_name: String,
    pub module_id: String,
    /// Names of the groups between the module and this leaf.
    pub path: Vec<String>,
    pub description: String,
    pub aliases: Vec<String>,
    pub evidence_expected: bool,
}

/// A node beneath a module: either a named group or a parameter id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaxonomyNode {
    Group { name: String, children: Vec<TaxonomyNode> },
    Parameter(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleSpec {
    pub id: String,
    pub display_name: String,
    /// One-based position in the file.
    pub ordinal: usize,
    pub children: Vec<TaxonomyNode>,
    leaves: std::ops::Range<usize>,
}

impl ModuleSpec {
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }
}

/// What a raw field name maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    Atomic(String),
    Compound(Vec<String>),
    Irrelevant,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Target {
    Parameter(usize),
    Compound(String),
    Irrelevant,
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Accept a module count other than [`STRICT_MODULE_COUNT`].
    pub allow_extra_modules: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Taxonomy {
    pub version: String,
    pub modules: Vec<ModuleSpec>,
    pub compound_map: BTreeMap<String, Vec<String>>,
    pub irrelevant_fields: Vec<String>,
    /// Named module orderings for stakeholder-specific report views.
    pub scenarios: BTreeMap<String, Vec<String>>,
    parameters: Vec<ParameterSpec>,
    by_id: HashMap<String, usize>,
    names: HashMap<String, Target>,
}

/// Normalizes a raw field name for matching.
///
/// Lowercases, trims, and collapses every run of spaces, underscores and
/// hyphens into a single underscore. Leading and trailing separators are
/// dropped.
pub fn fold_name(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut pending_sep = false;
    for ch in raw.chars() {
        if ch == '_' || ch == '-' || ch.is_whitespace() {
            pending_sep = !out.is_empty();
        } else {
            if pending_sep {
                out.push('_');
                pending_sep = false;
            }
            out.extend(ch.to_lowercase());
        }
    }
    out
}

fn is_snake_case_id(id: &str) -> bool {
    let mut chars = id.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
        && !id.ends_with('_')
        && !id.contains("__")
}

fn is_semver(version: &str) -> bool {
    let core = version.split(['-', '+']).next().unwrap_or("");
    let parts: Vec<&str> = core.split('.').collect();
    parts.len() == 3
        && parts
            .iter()
            .all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_digit()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTaxonomy {
    version: String,
    #[serde(default)]
    irrelevant: Vec<Spanned<String>>,
    #[serde(default)]
    compounds: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    scenarios: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    modules: Vec<RawModule>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModule {
    id: Spanned<String>,
    name: String,
    #[serde(default)]
    children: Vec<RawNode>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    id: Option<Spanned<String>>,
    name: String,
    #[serde(default)]
    aliases: Vec<Spanned<String>>,
    #[serde(default)]
    description: String,
    #[serde(default)]
    evidence_expected: bool,
    children: Option<Vec<RawNode>>,
}

struct Builder<'a> {
    source: &'a str,
    parameters: Vec<ParameterSpec>,
    by_id: HashMap<String, usize>,
    names: HashMap<String, Target>,
}

impl Builder<'_> {
    fn locate<T>(&self, spanned: &Spanned<T>) -> Option<Location> {
        Some(Location::from_offset(self.source, spanned.span().start))
    }

    fn describe(&self, target: &Target) -> String {
        match target {
            Target::Parameter(idx) => format!("parameter `{}`", self.parameters[*idx].id),
            Target::Compound(key) => format!("compound `{key}`"),
            Target::Irrelevant => "the irrelevant list".to_string(),
        }
    }

    fn claim(&mut self, name: &str, target: Target, location: Option<Location>) -> Result<(), TaxonomyError> {
        let folded = fold_name(name);
        if folded.is_empty() {
            return Err(TaxonomyError::Schema {
                message: "empty field name".into(),
                location,
            });
        }
        match self.names.get(&folded) {
            Some(existing) if *existing == target => Ok(()),
            Some(existing) => Err(TaxonomyError::AliasCollision {
                name: folded.clone(),
                first: self.describe(existing),
                second: self.describe(&target),
                location,
            }),
            None => {
                self.names.insert(folded, target);
                Ok(())
            }
        }
    }

    fn walk(
        &mut self,
        module_id: &str,
        path: &mut Vec<String>,
        nodes: Vec<RawNode>,
    ) -> Result<Vec<TaxonomyNode>, TaxonomyError> {
        let mut out = Vec::with_capacity(nodes.len());
        for node in nodes {
            match (node.id, node.children) {
                (Some(_), Some(_)) => {
                    return Err(TaxonomyError::schema(format!(
                        "node `{}` has both `id` and `children`",
                        node.name
                    )))
                }
                (None, None) => {
                    return Err(TaxonomyError::schema(format!(
                        "node `{}` needs either `id` (leaf) or `children` (group)",
                        node.name
                    )))
                }
                (None, Some(children)) => {
                    if children.is_empty() {
                        return Err(TaxonomyError::schema(format!("group `{}` has no children", node.name)));
                    }
                    if !node.aliases.is_empty() || !node.description.is_empty() {
                        return Err(TaxonomyError::schema(format!(
                            "group `{}` may only carry `name` and `children`",
                            node.name
                        )));
                    }
                    path.push(node.name.clone());
                    let children = self.walk(module_id, path, children)?;
                    path.pop();
                    out.push(TaxonomyNode::Group {
                        name: node.name,
                        children,
                    });
                }
                (Some(id), None) => {
                    let location = self.locate(&id);
                    let id_str = id.into_inner();
                    if !is_snake_case_id(&id_str) {
                        return Err(TaxonomyError::Schema {
                            message: format!("parameter id `{id_str}` is not lowercase snake_case"),
                            location,
                        });
                    }
                    if path.len() > MAX_PATH_DEPTH {
                        return Err(TaxonomyError::DepthExceeded {
                            id: id_str,
                            depth: path.len(),
                            location,
                        });
                    }
                    if self.by_id.contains_key(&id_str) {
                        return Err(TaxonomyError::DuplicateId { id: id_str, location });
                    }
                    let idx = self.parameters.len();
                    self.parameters.push(ParameterSpec {
                        id: id_str.clone(),
                        display_name: node.name,
                        module_id: module_id.to_string(),
                        path: path.clone(),
                        description: node.description,
                        aliases: Vec::new(),
                        evidence_expected: node.evidence_expected,
                    });
                    self.by_id.insert(id_str.clone(), idx);
                    self.claim(&id_str, Target::Parameter(idx), location)?;
                    let mut aliases = Vec::with_capacity(node.aliases.len());
                    for alias in node.aliases {
                        let location = self.locate(&alias);
                        let alias = alias.into_inner();
                        self.claim(&alias, Target::Parameter(idx), location)?;
                        aliases.push(alias);
                    }
                    self.parameters[idx].aliases = aliases;
                    out.push(TaxonomyNode::Parameter(id_str));
                }
            }
        }
        Ok(out)
    }
}

impl Taxonomy {
    /// Loads and validates a taxonomy in strict mode.
    pub fn load(source: &str) -> Result<Self, TaxonomyError> {
        Self::load_with(source, &LoadOptions::default())
    }

    pub fn load_with(source: &str, options: &LoadOptions) -> Result<Self, TaxonomyError> {
        let raw: RawTaxonomy = toml::from_str(source).map_err(|e| TaxonomyError::Schema {
            message: e.message().to_string(),
            location: Location::of_toml_error(source, &e),
        })?;

        if !is_semver(&raw.version) {
            return Err(TaxonomyError::schema(format!(
                "version `{}` is not a semantic version",
                raw.version
            )));
        }
        if raw.modules.is_empty() {
            return Err(TaxonomyError::schema("taxonomy declares no modules"));
        }
        if raw.modules.len() != STRICT_MODULE_COUNT && !options.allow_extra_modules {
            return Err(TaxonomyError::ModuleCountViolation {
                found: raw.modules.len(),
            });
        }

        let mut builder = Builder {
            source,
            parameters: Vec::new(),
            by_id: HashMap::new(),
            names: HashMap::new(),
        };
        let mut modules = Vec::with_capacity(raw.modules.len());
        let mut module_ids: HashMap<String, ()> = HashMap::new();
        for (pos, module) in raw.modules.into_iter().enumerate() {
            let location = builder.locate(&module.id);
            let id = module.id.into_inner();
            if !is_snake_case_id(&id) {
                return Err(TaxonomyError::Schema {
                    message: format!("module id `{id}` is not lowercase snake_case"),
                    location,
                });
            }
            if RESERVED_CARD_KEYS.contains(&id.as_str()) {
                return Err(TaxonomyError::Schema {
                    message: format!("module id `{id}` is a reserved card key"),
                    location,
                });
            }
            if module_ids.insert(id.clone(), ()).is_some() {
                return Err(TaxonomyError::DuplicateId { id, location });
            }
            let start = builder.parameters.len();
            let children = builder.walk(&id, &mut Vec::new(), module.children)?;
            let end = builder.parameters.len();
            if start == end {
                return Err(TaxonomyError::Schema {
                    message: format!("module `{id}` contains no parameters"),
                    location,
                });
            }
            modules.push(ModuleSpec {
                id,
                display_name: module.name,
                ordinal: pos + 1,
                children,
                leaves: start..end,
            });
        }

        for (key, targets) in &raw.compounds {
            if targets.is_empty() {
                return Err(TaxonomyError::schema(format!("compound `{key}` has no targets")));
            }
            for target in targets {
                if !builder.by_id.contains_key(target) {
                    return Err(TaxonomyError::schema(format!(
                        "compound `{key}` targets unknown parameter `{target}`"
                    )));
                }
            }
            builder.claim(key, Target::Compound(key.clone()), None)?;
        }
        let mut irrelevant_fields = Vec::with_capacity(raw.irrelevant.len());
        for name in raw.irrelevant {
            let location = builder.locate(&name);
            let name = name.into_inner();
            builder.claim(&name, Target::Irrelevant, location)?;
            irrelevant_fields.push(name);
        }

        for (label, order) in &raw.scenarios {
            if !is_snake_case_id(label) {
                return Err(TaxonomyError::schema(format!(
                    "scenario `{label}` is not lowercase snake_case"
                )));
            }
            if order.is_empty() {
                return Err(TaxonomyError::schema(format!("scenario `{label}` lists no modules")));
            }
            for (pos, module) in order.iter().enumerate() {
                if !module_ids.contains_key(module) {
                    return Err(TaxonomyError::schema(format!(
                        "scenario `{label}` lists unknown module `{module}`"
                    )));
                }
                if order[..pos].contains(module) {
                    return Err(TaxonomyError::schema(format!(
                        "scenario `{label}` lists `{module}` twice"
                    )));
                }
            }
        }

        Ok(Taxonomy {
            version: raw.version,
            modules,
            compound_map: raw.compounds,
            irrelevant_fields,
            scenarios: raw.scenarios,
            parameters: builder.parameters,
            by_id: builder.by_id,
            names: builder.names,
        })
    }

    /// The taxonomy bundled with the crate.
    pub fn default_taxonomy() -> Self {
        Self::load(DEFAULT_TAXONOMY).expect("bundled taxonomy is valid")
    }

    /// Source text of the bundled taxonomy.
    pub fn default_source() -> &'static str {
        DEFAULT_TAXONOMY
    }

    /// Maps a raw field name onto the taxonomy.
    pub fn resolve_field(&self, raw_name: &str) -> Resolution {
        let folded = fold_name(raw_name);
        match self.names.get(&folded) {
            Some(Target::Parameter(idx)) => Resolution::Atomic(self.parameters[*idx].id.clone()),
            Some(Target::Compound(key)) => Resolution::Compound(self.compound_map[key].clone()),
            Some(Target::Irrelevant) => Resolution::Irrelevant,
            None => Resolution::Unknown,
        }
    }

    /// All parameters in depth-first file order.
    pub fn parameters(&self) -> &[ParameterSpec] {
        &self.parameters
    }

    pub fn parameter(&self, id: &str) -> Option<&ParameterSpec> {
        self.by_id.get(id).map(|&idx| &self.parameters[idx])
    }

    pub fn contains_parameter(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn module(&self, module_id: &str) -> Result<&ModuleSpec, TaxonomyError> {
        self.modules
            .iter()
            .find(|m| m.id == module_id)
            .ok_or_else(|| TaxonomyError::UnknownModule(module_id.to_string()))
    }

    /// Finds a module by id or display name, folding both sides.
    pub fn find_module(&self, name: &str) -> Option<&ModuleSpec> {
        let folded = fold_name(name);
        self.modules
            .iter()
            .find(|m| m.id == folded || fold_name(&m.display_name) == folded)
    }

    /// Leaves under a module, depth-first in file order.
    pub fn module_parameters(&self, module_id: &str) -> Result<&[ParameterSpec], TaxonomyError> {
        let module = self.module(module_id)?;
        Ok(&self.parameters[module.leaves.clone()])
    }

    pub fn module_ids(&self) -> impl Iterator<Item = &str> {
        self.modules.iter().map(|m| m.id.as_str())
    }

    pub fn leaf_count(&self) -> usize {
        self.parameters.len()
    }

    /// Modules a scenario lists first, in its order.
    pub fn scenario(&self, label: &str) -> Result<&[String], TaxonomyError> {
        self.scenarios
            .get(&fold_name(label))
            .map(Vec::as_slice)
            .ok_or_else(|| TaxonomyError::UnknownScenario(label.to_string()))
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Atomic(id) => write!(f, "atomic({id})"),
            Resolution::Compound(ids) => write!(f, "compound({})", ids.join(", ")),
            Resolution::Irrelevant => f.write_str("irrelevant"),
            Resolution::Unknown => f.write_str("unknown"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn module_block(id: &str, leaves: &[&str]) -> String {
        let mut s = format!("[[modules]]\nid = \"{id}\"\nname = \"{id}\"\n");
        for leaf in leaves {
            s.push_str(&format!("[[modules.children]]\nid = \"{leaf}\"\nname = \"{leaf}\"\n"));
        }
        s
    }

    fn eight_modules() -> String {
        let mut s = String::from("version = \"1.0.0\"\n");
        for m in 0..8 {
            s.push_str(&module_block(&format!("m{m}"), &[&format!("p{m}")]));
        }
        s
    }

    #[test]
    fn default_taxonomy_loads_with_eight_modules() {
        let tax = Taxonomy::default_taxonomy();
        assert_eq!(tax.modules.len(), 8);
        let id_lines = Taxonomy::default_source()
            .lines()
            .filter(|l| l.starts_with("id = "))
            .count();
        // every `id = ` line is a leaf except the eight module ids
        assert_eq!(tax.leaf_count(), id_lines - 8);
        assert!((60..=80).contains(&tax.leaf_count()));
        for module in &tax.modules {
            assert!(!tax.module_parameters(&module.id).unwrap().is_empty());
        }
    }

    #[test]
    fn resolves_synonyms_compounds_and_irrelevant_fields() {
        let tax = Taxonomy::default_taxonomy();
        assert_eq!(
            tax.resolve_field("model_title"),
            Resolution::Atomic("model_name".into())
        );
        assert_eq!(
            tax.resolve_field("Display Name"),
            Resolution::Atomic("model_name".into())
        );
        assert_eq!(
            tax.resolve_field("citation_info"),
            Resolution::Compound(vec![
                "citation_authors".into(),
                "citation_title".into(),
                "citation_year".into()
            ])
        );
        assert_eq!(tax.resolve_field("star_count"), Resolution::Irrelevant);
        assert_eq!(tax.resolve_field("ci-badge"), Resolution::Irrelevant);
        assert_eq!(tax.resolve_field("favourite_colour"), Resolution::Unknown);
        assert_eq!(tax.resolve_field("   "), Resolution::Unknown);
    }

    #[test]
    fn fold_collapses_separator_runs() {
        assert_eq!(fold_name("  Model -- Title "), "model_title");
        assert_eq!(fold_name("model__title"), "model_title");
        assert_eq!(fold_name("_x_"), "x");
        assert_eq!(fold_name("CI Badge"), "ci_badge");
    }

    #[test]
    fn shared_alias_is_rejected() {
        let src = "version = \"1.0.0\"\n".to_string()
            + &module_block("m0", &[])
            + "[[modules.children]]\nid = \"a\"\nname = \"a\"\naliases = [\"license\"]\n"
            + "[[modules.children]]\nid = \"b\"\nname = \"b\"\naliases = [\"License\"]\n"
            + &(1..8)
                .map(|m| module_block(&format!("m{m}"), &[&format!("p{m}")]))
                .collect::<String>();
        let err = Taxonomy::load(&src).unwrap_err();
        match err {
            TaxonomyError::AliasCollision { name, location, .. } => {
                assert_eq!(name, "license");
                assert_eq!(location.unwrap().line, 12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn alias_equal_to_compound_key_is_rejected() {
        let src = eight_modules() + "[compounds]\np0 = [\"p1\"]\n";
        // `[compounds]` after `[[modules]]` still parses as a top-level table
        assert!(matches!(
            Taxonomy::load(&src),
            Err(TaxonomyError::AliasCollision { .. })
        ));
    }

    #[test]
    fn nine_modules_need_override() {
        let src = eight_modules() + &module_block("m8", &["p8"]);
        assert_eq!(
            Taxonomy::load(&src),
            Err(TaxonomyError::ModuleCountViolation { found: 9 })
        );
        let tax = Taxonomy::load_with(
            &src,
            &LoadOptions {
                allow_extra_modules: true,
            },
        )
        .unwrap();
        assert_eq!(tax.modules.len(), 9);
    }

    #[test]
    fn duplicate_ids_are_rejected() {
        let src = eight_modules().replace("id = \"p1\"", "id = \"p0\"");
        assert!(matches!(
            Taxonomy::load(&src),
            Err(TaxonomyError::DuplicateId { id, .. }) if id == "p0"
        ));
        let src = eight_modules().replace("id = \"m1\"", "id = \"m0\"");
        assert!(matches!(
            Taxonomy::load(&src),
            Err(TaxonomyError::DuplicateId { id, .. }) if id == "m0"
        ));
    }

    #[test]
    fn depth_limit_is_enforced() {
        let nest = |depth: usize| {
            let mut s = String::from("version = \"1.0.0\"\n[[modules]]\nid = \"m0\"\nname = \"m0\"\n");
            let mut prefix = String::from("modules");
            for level in 0..depth {
                prefix.push_str(".children");
                s.push_str(&format!("[[{prefix}]]\nname = \"g{level}\"\n"));
            }
            prefix.push_str(".children");
            s.push_str(&format!("[[{prefix}]]\nid = \"deep\"\nname = \"deep\"\n"));
            for m in 1..8 {
                s.push_str(&module_block(&format!("m{m}"), &[&format!("p{m}")]));
            }
            s
        };
        let tax = Taxonomy::load(&nest(4)).unwrap();
        assert_eq!(tax.parameter("deep").unwrap().path.len(), 4);
        assert!(matches!(
            Taxonomy::load(&nest(5)),
            Err(TaxonomyError::DepthExceeded { depth: 5, .. })
        ));
    }

    #[test]
    fn malformed_files_report_schema_errors() {
        assert!(matches!(
            Taxonomy::load("version = \"1.0.0\"\n[[modules]]\nid = 3\n"),
            Err(TaxonomyError::Schema { location: Some(_), .. })
        ));
        let bad_version = eight_modules().replace("1.0.0", "one");
        assert!(matches!(
            Taxonomy::load(&bad_version),
            Err(TaxonomyError::Schema { .. })
        ));
        let bad_id = eight_modules().replace("id = \"p3\"", "id = \"Bad Id\"");
        assert!(matches!(Taxonomy::load(&bad_id), Err(TaxonomyError::Schema { .. })));
        let dangling = eight_modules() + "[compounds]\ncombo = [\"missing\"]\n";
        assert!(matches!(Taxonomy::load(&dangling), Err(TaxonomyError::Schema { .. })));
    }

    #[test]
    fn module_parameters_follow_file_order() {
        let src = "version = \"1.0.0\"\n[[modules]]\nid = \"data\"\nname = \"Data\"\n\
            [[modules.children]]\nid = \"zeta\"\nname = \"z\"\n\
            [[modules.children]]\nname = \"grp\"\n\
            [[modules.children.children]]\nid = \"alpha\"\nname = \"a\"\n\
            [[modules.children]]\nid = \"mid\"\nname = \"m\"\n"
            .to_string()
            + &(1..8)
                .map(|m| module_block(&format!("m{m}"), &[&format!("p{m}")]))
                .collect::<String>();
        let tax = Taxonomy::load(&src).unwrap();
        let ids: Vec<_> = tax
            .module_parameters("data")
            .unwrap()
            .iter()
            .map(|p| p.id.as_str())
            .collect();
        assert_eq!(ids, ["zeta", "alpha", "mid"]);
        assert_eq!(tax.parameter("alpha").unwrap().path, ["grp"]);
        assert_eq!(
            tax.module_parameters("nope"),
            Err(TaxonomyError::UnknownModule("nope".into()))
        );
    }

    #[test]
    fn partition_and_idempotent_resolution_hold_for_default() {
        let tax = Taxonomy::default_taxonomy();
        let mut seen = Vec::new();
        for id in tax.module_ids() {
            seen.extend(tax.module_parameters(id).unwrap().iter().map(|p| p.id.clone()));
        }
        let mut all: Vec<_> = tax.parameters().iter().map(|p| p.id.clone()).collect();
        assert_eq!(seen, all);
        all.sort();
        all.dedup();
        assert_eq!(all.len(), seen.len());
        for p in tax.parameters() {
            assert_eq!(tax.resolve_field(&p.id), Resolution::Atomic(p.id.clone()));
        }
        assert_eq!(Taxonomy::load(Taxonomy::default_source()).unwrap(), tax);
    }

    #[test]
    fn scenarios_are_validated() {
        let tax = Taxonomy::default_taxonomy();
        assert_eq!(tax.scenario("Compliance Review").unwrap()[0], "broader_implications");
        assert_eq!(
            tax.scenario("auditor"),
            Err(TaxonomyError::UnknownScenario("auditor".into()))
        );

        let ok = format!("{}[scenarios]\nfocus = [\"m3\", \"m0\"]\n", eight_modules());
        assert_eq!(Taxonomy::load(&ok).unwrap().scenario("focus").unwrap(), ["m3", "m0"]);
        for bad in [
            "focus = [\"m9\"]",
            "focus = [\"m1\", \"m1\"]",
            "focus = []",
            "Focus = [\"m1\"]",
        ] {
            let src = format!("{}[scenarios]\n{bad}\n", eight_modules());
            assert!(
                matches!(Taxonomy::load(&src), Err(TaxonomyError::Schema { .. })),
                "{bad}"
            );
        }
    }
}

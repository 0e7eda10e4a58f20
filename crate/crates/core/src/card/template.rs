use std::fmt::Write;

use crate::taxonomy::{Taxonomy, TaxonomyError};

/// Emits a blank canonical card with one empty slot per parameter.
///
/// Each slot is preceded by its description as a comment. With a module
/// filter only that module's section is emitted.
pub fn emit_template(taxonomy: &Taxonomy, module_filter: Option<&str>) -> Result<String, TaxonomyError> {
    let modules = match module_filter {
        Some(id) => vec![taxonomy.module(id)?],
        None => taxonomy.modules.iter().collect(),
    };

    let mut out = String::new();
    let _ = writeln!(out, "# Model card template (taxonomy {})", taxonomy.version);
    out.push_str(
        "# Fill every field with substantive content, or attach evidence:\n\
         #   field = { text = \"...\", evidence = [{ kind = \"url\", value = \"https://...\" }] }\n\
         # Evidence kinds: url, file_path, hash, doi.\n\n",
    );
    out.push_str("project_id = \"\"\ntask_family = \"\"\ncard_version = \"1\"\n");

    for module in modules {
        let _ = write!(out, "\n# {}\n[{}]\n", module.display_name, module.id);
        for param in taxonomy.module_parameters(&module.id)? {
            let mut prompt = String::new();
            if !param.path.is_empty() {
                let _ = write!(prompt, "{} / ", param.path.join(" / "));
            }
            prompt.push_str(&param.display_name);
            if !param.description.is_empty() {
                let _ = write!(prompt, ": {}", param.description);
            }
            if param.evidence_expected {
                prompt.push_str(" [evidence link expected]");
            }
            let _ = writeln!(out, "# {}\n{} = \"\"", prompt.replace('\n', " "), param.id);
        }
    }
    Ok(out)
}

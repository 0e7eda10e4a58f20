use crate::taxonomy::Taxonomy;

/// Eight-module taxonomy; module `m{i}` holds `leaves[i]`, or a single
/// `pad{i}` leaf when `leaves` runs out.
pub(crate) fn toy_taxonomy(leaves: &[&[&str]]) -> Taxonomy {
    let mut src = String::from("version = \"1.0.0\"\n");
    for m in 0..8 {
        src.push_str(&format!("[[modules]]\nid = \"m{m}\"\nname = \"Module {m}\"\n"));
        let pad = format!("pad{m}");
        let ids: Vec<&str> = match leaves.get(m) {
            Some(ids) => ids.to_vec(),
            None => vec![pad.as_str()],
        };
        for id in ids {
            src.push_str(&format!("[[modules.children]]\nid = \"{id}\"\nname = \"{id}\"\n"));
        }
    }
    Taxonomy::load(&src).expect("toy taxonomy")
}

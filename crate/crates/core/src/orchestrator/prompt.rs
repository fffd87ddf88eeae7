//! Prompt templates and prompt assembly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::progdb::ProgramEntry;

/// Closing line of every prompt.
pub const OUTPUT_RESTRICTION: &str = "Output Python code only, without any comments.";

/// Relation hint shipped with the cycle-graph template.
pub const RELATION_HINT: &str =
    "The score is computed based on the relationships among el[i], el[-i], el[(i - k) % n], and el[(i + k) % n].";

const BUILTIN: &[(&str, &str)] = &[
    ("capset", include_str!("../../templates/capset.toml")),
    ("admissible", include_str!("../../templates/admissible.toml")),
    ("shannon", include_str!("../../templates/shannon.toml")),
    ("binpack", include_str!("../../templates/binpack.toml")),
    ("toy", include_str!("../../templates/toy.toml")),
];

/// Text blocks of a prompt. `{new_name}` in the task description is replaced
/// by the name requested for the new function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptTemplate {
    #[serde(default)]
    pub name: String,
    pub problem_description: String,
    pub evolution_instruction: String,
    pub tunable_marker_instruction: String,
    pub task_description: String,
    #[serde(default)]
    pub scoring_heuristic_hint: Option<String>,
    /// Starting program for each process, if any.
    #[serde(default)]
    pub seed_program: Option<String>,
}

impl PromptTemplate {
    pub fn builtin(key: &str) -> Option<Self> {
        BUILTIN.iter().find(|(k, _)| *k == key).map(|(_, text)| Self::from_toml_str(text).expect("bundled templates are valid"))
    }

    pub fn builtin_keys() -> impl Iterator<Item = &'static str> {
        BUILTIN.iter().map(|(k, _)| *k)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn from_file(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::from_toml_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Renames the last top-level `def` in `source` to `new_name`.
pub fn rename_function(source: &str, new_name: &str) -> String {
    let mut lines: Vec<String> = source.lines().map(str::to_owned).collect();
    if let Some(line) = lines.iter_mut().rev().find(|l| l.starts_with("def ")) {
        let rest = &line[4..];
        let name_len = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
        *line = format!("def {new_name}{}", &rest[name_len..]);
    }
    lines.join("\n")
}

/// Assembles the prompt. `refs` appear in the given order, renamed
/// `priority_v0`, `priority_v1`, ...; the new function is requested as
/// `priority_v{refs.len()}`.
pub fn build_prompt(refs: &[ProgramEntry], t: &PromptTemplate) -> String {
    let new_name = format!("priority_v{}", refs.len());
    let mut task = t.task_description.trim().replace("{new_name}", &new_name);
    if let Some(hint) = t.scoring_heuristic_hint.as_deref().map(str::trim).filter(|h| !h.is_empty()) {
        task.push('\n');
        task.push_str(hint);
    }
    let mut sections = vec![
        t.problem_description.trim().to_string(),
        t.evolution_instruction.trim().to_string(),
        t.tunable_marker_instruction.trim().to_string(),
        task,
    ];
    if !refs.is_empty() {
        let code: Vec<String> =
            refs.iter().enumerate().map(|(i, r)| rename_function(r.source.trim_end(), &format!("priority_v{i}"))).collect();
        sections.push(code.join("\n\n"));
    }
    sections.push(OUTPUT_RESTRICTION.to_string());
    let mut out = sections.join("\n\n");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(source: &str, score: f64) -> ProgramEntry {
        ProgramEntry { id: 0, source: source.into(), score, valid: true, parent_ids: vec![], created_round: 0, process_id: 0 }
    }

    #[test]
    fn builtins_parse() {
        for key in PromptTemplate::builtin_keys() {
            let t = PromptTemplate::builtin(key).unwrap();
            assert_eq!(t.name, key);
            assert!(t.task_description.contains("{new_name}"), "{key}");
        }
        assert_eq!(PromptTemplate::builtin("shannon").unwrap().scoring_heuristic_hint.as_deref(), Some(RELATION_HINT));
    }

    #[test]
    fn refs_renamed_in_order() {
        let t = PromptTemplate::builtin("capset").unwrap();
        let refs = [entry("def priority(el, n):\n    return 1.0\n", 1.0), entry("def f(el, n):\n    return 2.0\n", 2.0)];
        let p = build_prompt(&refs, &t);
        let v0 = p.find("def priority_v0(el, n):").unwrap();
        let v1 = p.find("def priority_v1(el, n):").unwrap();
        assert!(v0 < v1);
        assert!(p.contains("`priority_v2(el, n)`"));
        assert!(p.trim_end().ends_with(OUTPUT_RESTRICTION));
    }

    #[test]
    fn no_refs_no_code_section() {
        let t = PromptTemplate::builtin("capset").unwrap();
        let p = build_prompt(&[], &t);
        assert!(!p.contains("def "));
        assert!(p.contains("priority_v0"));
    }

    #[test]
    fn rename_keeps_signature() {
        assert_eq!(rename_function("def priority_new(a, b):\n    return a", "priority_v3"), "def priority_v3(a, b):\n    return a");
    }
}

//! Pulls the priority function out of a model response.

use thiserror::Error;

use crate::priolang::{Origin, SourceProgram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("response contains no function definition")]
pub struct ExtractError;

/// Contents of all fenced blocks, or the whole text if there are none.
fn unfence(text: &str) -> String {
    let mut blocks = Vec::new();
    let mut current: Option<Vec<&str>> = None;
    for line in text.lines() {
        if line.trim_start().starts_with("```") {
            match current.take() {
                Some(body) => blocks.push(body.join("\n")),
                None => current = Some(Vec::new()),
            }
        } else if let Some(body) = current.as_mut() {
            body.push(line);
        }
    }
    // An unterminated fence still counts.
    if let Some(body) = current {
        blocks.push(body.join("\n"));
    }
    if blocks.is_empty() {
        text.to_string()
    } else {
        blocks.join("\n")
    }
}

/// Removes `#` comments outside string literals and trailing whitespace.
pub fn strip_comments(src: &str) -> String {
    let chars: Vec<char> = src.chars().collect();
    let mut out = String::with_capacity(src.len());
    let mut i = 0;
    // (quote char, triple)
    let mut in_str: Option<(char, bool)> = None;
    while i < chars.len() {
        let c = chars[i];
        match in_str {
            Some((q, triple)) => {
                out.push(c);
                if c == '\\' && i + 1 < chars.len() {
                    out.push(chars[i + 1]);
                    i += 2;
                    continue;
                }
                if c == q {
                    if !triple {
                        in_str = None;
                    } else if chars.get(i + 1) == Some(&q) && chars.get(i + 2) == Some(&q) {
                        out.push(q);
                        out.push(q);
                        i += 2;
                        in_str = None;
                    }
                } else if c == '\n' && !triple {
                    in_str = None;
                }
            }
            None => {
                if c == '#' {
                    while i < chars.len() && chars[i] != '\n' {
                        i += 1;
                    }
                    continue;
                }
                if c == '"' || c == '\'' {
                    let triple = chars.get(i + 1) == Some(&c) && chars.get(i + 2) == Some(&c);
                    if triple {
                        out.push(c);
                        out.push(c);
                        i += 2;
                    }
                    in_str = Some((c, triple));
                }
                out.push(c);
            }
        }
        i += 1;
    }
    out.lines().map(str::trim_end).collect::<Vec<_>>().join("\n")
}

fn indent_of(line: &str) -> usize {
    line.len() - line.trim_start().len()
}

fn bracket_delta(line: &str) -> i32 {
    let mut depth = 0;
    let mut quote: Option<char> = None;
    for c in line.chars() {
        match quote {
            Some(q) if c == q => quote = None,
            Some(_) => {}
            None => match c {
                '"' | '\'' => quote = Some(c),
                '(' | '[' | '{' => depth += 1,
                ')' | ']' | '}' => depth -= 1,
                _ => {}
            },
        }
    }
    depth
}

fn is_def(line: &str) -> bool {
    let t = line.trim_start();
    t.strip_prefix("def ").is_some_and(|rest| {
        let name: String = rest.trim_start().chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
        !name.is_empty() && rest.contains('(')
    })
}

/// Returns the last outermost function definition in `response`, dedented.
pub fn extract_program(response: &str) -> Result<SourceProgram, ExtractError> {
    let code = strip_comments(&unfence(response));
    let lines: Vec<&str> = code.lines().collect();
    let defs: Vec<usize> = (0..lines.len()).filter(|&i| is_def(lines[i])).collect();
    let base = defs.iter().map(|&i| indent_of(lines[i])).min().ok_or(ExtractError)?;
    let start = *defs.iter().rev().find(|&&i| indent_of(lines[i]) == base).unwrap();
    let mut end = start + 1;
    let mut depth = bracket_delta(lines[start]);
    while end < lines.len() {
        let line = lines[end];
        if depth <= 0 && !line.trim().is_empty() && indent_of(line) <= base {
            break;
        }
        depth += bracket_delta(line);
        end += 1;
    }
    let body: Vec<&str> = lines[start..end].iter().map(|l| if l.len() >= base { &l[base..] } else { l.trim_start() }).collect();
    let text = body.join("\n").trim_end().to_string() + "\n";
    Ok(SourceProgram::new(text, Origin::Llm))
}

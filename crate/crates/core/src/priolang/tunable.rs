use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::ast::{map_program, Expr, Literal, Program, UnaryOp};
use super::error::{DecisionError, EvalError, SyntaxError};
use super::interp::{call_function, DEFAULT_STEP_LIMIT};
use super::parser::parse_program;
use super::render::render_program;
use super::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Llm,
    Seed,
    Compacted,
    User,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceProgram {
    pub text: String,
    pub origin: Origin,
}

impl SourceProgram {
    pub fn new(text: impl Into<String>, origin: Origin) -> Self {
        Self { text: text.into(), origin }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TunableSite {
    pub site_id: usize,
    pub options: Vec<Literal>,
    /// Byte range of the `tunable(...)` call in the source text.
    pub span: (usize, usize),
}

/// One option index per tunable site.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DecisionVector(pub Vec<usize>);

impl DecisionVector {
    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for DecisionVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TunableProgram {
    pub source: SourceProgram,
    pub function_name: String,
    pub sites: Vec<TunableSite>,
    pub ast: Program,
}

impl TunableProgram {
    pub fn parse(source: SourceProgram) -> Result<Self, SyntaxError> {
        let (ast, raw) = parse_program(&source.text)?;
        let sites = raw.into_iter().enumerate().map(|(site_id, r)| TunableSite { site_id, options: r.options, span: r.span }).collect();
        let function_name = ast.entry().name.clone();
        Ok(Self { source, function_name, sites, ast })
    }

    pub fn from_text(text: &str) -> Result<Self, SyntaxError> {
        Self::parse(SourceProgram::new(text, Origin::User))
    }

    pub fn solution_space_size(&self) -> BigUint {
        self.sites.iter().fold(BigUint::from(1u32), |acc, s| acc * BigUint::from(s.options.len()))
    }

    pub fn option_counts(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.options.len()).collect()
    }

    pub fn check(&self, dv: &DecisionVector) -> Result<(), DecisionError> {
        if dv.0.len() != self.sites.len() {
            return Err(DecisionError::Length { expected: self.sites.len(), got: dv.0.len() });
        }
        for (site, &index) in self.sites.iter().zip(&dv.0) {
            if index >= site.options.len() {
                return Err(DecisionError::Index { site: site.site_id, index, options: site.options.len() });
            }
        }
        Ok(())
    }

    /// Replaces every site with its chosen literal.
    pub fn substitute(&self, dv: &DecisionVector) -> Result<ConcreteProgram, DecisionError> {
        self.check(dv)?;
        let chosen: Vec<&Literal> = self.sites.iter().zip(&dv.0).map(|(s, &i)| &s.options[i]).collect();
        let text = splice(&self.source.text, &self.sites, |site| inline_text(chosen[site]));
        let ast = map_program(&self.ast, &|e| match e {
            Expr::Site(i) => Some(Expr::Lit(chosen[*i].clone())),
            Expr::Unary(UnaryOp::Neg, inner) => match inner.as_ref() {
                Expr::Site(i) => match chosen[*i] {
                    // The parser folds `-<number>` into one literal; mirror that.
                    Literal::Num { value, text } if !text.starts_with('-') => {
                        Some(Expr::Lit(Literal::Num { value: -value, text: format!("-{text}") }))
                    }
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        });
        Ok(ConcreteProgram { text, ast, decisions: Some(dv.clone()) })
    }

    /// Keeps, per site, only the options selected by some vector in `kept`.
    /// Sites left with one option are inlined as plain literals.
    pub fn compact(&self, kept: &[DecisionVector]) -> Result<SourceProgram, DecisionError> {
        for dv in kept {
            self.check(dv)?;
        }
        let text = splice(&self.source.text, &self.sites, |site| {
            let options = &self.sites[site].options;
            let survivors: Vec<&Literal> =
                options.iter().enumerate().filter(|(j, _)| kept.iter().any(|dv| dv.0[site] == *j)).map(|(_, o)| o).collect();
            match survivors.as_slice() {
                [] => tunable_text(options.iter()),
                [one] => inline_text(one),
                many => tunable_text(many.iter().copied()),
            }
        });
        Ok(SourceProgram::new(text, Origin::Compacted))
    }

    /// Canonical rendering (4-space indentation, one statement per line).
    pub fn canonical_text(&self) -> String {
        render_program(&self.ast, &|id| tunable_text(self.sites[id].options.iter()))
    }
}

fn tunable_text<'a>(options: impl Iterator<Item = &'a Literal>) -> String {
    let parts: Vec<String> = options.map(Literal::text).collect();
    format!("tunable([{}])", parts.join(", "))
}

fn inline_text(lit: &Literal) -> String {
    let t = lit.text();
    if t.starts_with('-') {
        format!("({t})")
    } else {
        t
    }
}

fn splice(text: &str, sites: &[TunableSite], mut replace: impl FnMut(usize) -> String) -> String {
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for s in sites {
        out.push_str(&text[last..s.span.0]);
        out.push_str(&replace(s.site_id));
        last = s.span.1;
    }
    out.push_str(&text[last..]);
    out
}

/// A program with no tunable sites, ready to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcreteProgram {
    pub text: String,
    pub ast: Program,
    /// Choices that produced this program, when it came from substitution.
    pub decisions: Option<DecisionVector>,
}

impl ConcreteProgram {
    pub fn parse(text: &str) -> Result<Self, SyntaxError> {
        let (ast, sites) = parse_program(text)?;
        if let Some(site) = sites.first() {
            return Err(SyntaxError::Tunable { line: site.line, col: site.col, message: "program still contains tunable sites".into() });
        }
        Ok(Self { text: text.to_string(), ast, decisions: None })
    }

    pub fn function_name(&self) -> &str {
        &self.ast.entry().name
    }

    pub fn arity(&self) -> usize {
        self.ast.entry().params.len()
    }

    pub fn canonical_text(&self) -> String {
        render_program(&self.ast, &|id| format!("<site {id}>"))
    }

    pub fn call(&self, args: Vec<Value>) -> Result<Value, EvalError> {
        call_function(self.ast.entry(), args, DEFAULT_STEP_LIMIT)
    }

    pub fn call_with_limit(&self, args: Vec<Value>, step_limit: u64) -> Result<Value, EvalError> {
        call_function(self.ast.entry(), args, step_limit)
    }

    /// Calls the priority function and requires a numeric result.
    pub fn eval_priority(&self, args: Vec<Value>) -> Result<f64, EvalError> {
        match self.call(args)? {
            Value::Num(x) => Ok(x),
            other => Err(EvalError::rt(format!("priority function returned a {}, expected a number", other.type_name()))),
        }
    }
}

//! Bundled priority functions from published runs.
//!
//! Several listings reached us with lines cut short after a `%` operator.
//! Those are either shipped as `Reconstructed` (completed so that the stated
//! result is reproduced; the completed line numbers are listed) or as
//! `Incomplete` (kept verbatim, not parseable, excluded from replay).

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Listing was complete; only mechanical translation applied, if any.
    Complete,
    /// Truncated lines were completed; see `completed_lines`.
    Reconstructed,
    /// Truncated and not completed.
    Incomplete,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CorpusProgram {
    pub name: &'static str,
    /// Problem key (`capset`, `admissible`, `shannon`, `binpack`).
    pub problem: &'static str,
    pub params: &'static str,
    pub status: Status,
    /// Result the listing is credited with.
    pub claimed: &'static str,
    /// 1-based line numbers that were completed or translated.
    pub completed_lines: &'static [u32],
    #[serde(skip)]
    pub source: &'static str,
}

pub const PROGRAMS: &[CorpusProgram] = &[
    CorpusProgram {
        name: "program1",
        problem: "admissible",
        params: "n=27 w=19",
        status: Status::Reconstructed,
        claimed: "tunable program with 3^31 solutions",
        completed_lines: &[9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23, 24, 25, 26, 27, 28, 29, 30],
        source: include_str!("../corpus/program1.py"),
    },
    CorpusProgram {
        name: "program2",
        problem: "admissible",
        params: "n=21 w=15",
        status: Status::Incomplete,
        claimed: "admissible set of size 43650",
        completed_lines: &[],
        source: include_str!("../corpus/program2.py"),
    },
    CorpusProgram {
        name: "program3",
        problem: "admissible",
        params: "n=27 w=19",
        status: Status::Incomplete,
        claimed: "admissible set of size 1270863",
        completed_lines: &[],
        source: include_str!("../corpus/program3.py"),
    },
    CorpusProgram {
        name: "program4",
        problem: "capset",
        params: "n=8",
        status: Status::Reconstructed,
        claimed: "cap of size 512",
        completed_lines: &[7, 11, 13, 16, 17, 18, 21],
        source: include_str!("../corpus/program4.py"),
    },
    CorpusProgram {
        name: "program5",
        problem: "capset",
        params: "n=8",
        status: Status::Reconstructed,
        claimed: "cap of size 512",
        completed_lines: &[8, 9, 10, 16, 17, 21, 23, 31, 32, 33],
        source: include_str!("../corpus/program5.py"),
    },
    CorpusProgram {
        name: "program6",
        problem: "capset",
        params: "n=8",
        status: Status::Reconstructed,
        claimed: "cap of size 512",
        completed_lines: &[16, 23, 24, 25, 26, 28, 29, 30, 31, 33, 34, 35, 36, 56, 58, 59, 60, 61, 62, 63, 64, 65, 66],
        source: include_str!("../corpus/program6.py"),
    },
    CorpusProgram {
        name: "program7",
        problem: "shannon",
        params: "m=11 n=4",
        status: Status::Incomplete,
        claimed: "independent set of size 754",
        completed_lines: &[],
        source: include_str!("../corpus/program7.py"),
    },
    CorpusProgram {
        name: "program8",
        problem: "shannon",
        params: "m=15 n=5",
        status: Status::Incomplete,
        claimed: "independent set of size 19946",
        completed_lines: &[],
        source: include_str!("../corpus/program8.py"),
    },
    CorpusProgram {
        name: "program9",
        problem: "binpack",
        params: "dataset=or",
        status: Status::Complete,
        claimed: "OR-Library policy",
        completed_lines: &[1, 5, 7, 10, 11, 12, 13, 14],
        source: include_str!("../corpus/program9.py"),
    },
    CorpusProgram {
        name: "program10",
        problem: "binpack",
        params: "dataset=weibull",
        status: Status::Complete,
        claimed: "Weibull policy",
        completed_lines: &[1, 2, 11, 12, 13, 14, 15],
        source: include_str!("../corpus/program10.py"),
    },
];

pub fn get(name: &str) -> Option<&'static CorpusProgram> {
    PROGRAMS.iter().find(|p| p.name == name)
}

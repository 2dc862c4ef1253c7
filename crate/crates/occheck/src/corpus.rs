//! Bundled example programs with modings and queries.

/// A named program shipped with the crate, usable as `corpus:NAME` on the
/// command line.
#[derive(Clone, Copy, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub source: &'static str,
}

pub const ENTRIES: &[CorpusEntry] = &[
    CorpusEntry {
        name: "flatten",
        description: "list flattening with a difference-list accumulator",
        source: include_str!("../corpus/flatten.pl"),
    },
    CorpusEntry {
        name: "nqueens",
        description: "queen placement with open-ended diagonal lists",
        source: include_str!("../corpus/nqueens.pl"),
    },
    CorpusEntry {
        name: "use2",
        description: "list consumption building open-ended structures",
        source: include_str!("../corpus/use2.pl"),
    },
    CorpusEntry {
        name: "derivative",
        description: "symbolic differentiation moded backwards",
        source: include_str!("../corpus/derivative.pl"),
    },
    CorpusEntry {
        name: "derivative2",
        description: "symbolic differentiation under a moding pair",
        source: include_str!("../corpus/derivative2.pl"),
    },
    CorpusEntry {
        name: "p_xx",
        description: "a circular head unification no route accepts",
        source: include_str!("../corpus/p_xx.pl"),
    },
    CorpusEntry {
        name: "quicksort_dl",
        description: "quicksort over difference lists",
        source: include_str!("../corpus/quicksort_dl.pl"),
    },
];

pub fn find(name: &str) -> Option<&'static CorpusEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    #[test]
    fn every_entry_parses_with_a_moding_and_a_query() {
        for e in ENTRIES {
            let parsed = parse_program(e.source).unwrap_or_else(|err| {
                panic!("{}: {err}", e.name);
            });
            assert!(!parsed.program.clauses.is_empty(), "{}", e.name);
            assert!(!parsed.moding.is_empty(), "{}", e.name);
            assert_eq!(parsed.queries.len(), 1, "{}", e.name);
            assert_eq!(parsed.moding2.is_empty(), e.name != "derivative2");
        }
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(find("flatten").unwrap().name, "flatten");
        assert!(find("missing").is_none());
    }
}

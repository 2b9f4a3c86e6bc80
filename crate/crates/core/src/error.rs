use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Fatal errors raised while reading or comparing UMR documents.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("reference to undefined variable `{var}` at line {line}, column {column}")]
    DanglingVariable {
        var: String,
        line: usize,
        column: usize,
    },

    #[error("variable `{var}` is defined more than once (line {line}, column {column})")]
    DuplicateVariable {
        var: String,
        line: usize,
        column: usize,
    },

    #[error("alignment on line {line} names `{var}`, which is not a node of the sentence graph")]
    MisalignedIndex { var: String, line: usize },

    #[error("variable `{var}` appears twice in the alignment block (line {line})")]
    DuplicateAlignment { var: String, line: usize },

    #[error(
        "alignment of `{var}` on line {line} uses token {position}, but the sentence has {token_count} tokens"
    )]
    TokenOutOfRange {
        var: String,
        position: usize,
        token_count: usize,
        line: usize,
    },

    #[error("expected sentence {expected} on line {line}, found sentence {found}")]
    SentenceIndex {
        expected: usize,
        found: usize,
        line: usize,
    },

    #[error("gold document has {gold} sentences but the compared document has {pred}")]
    SentenceCountMismatch { gold: usize, pred: usize },

    #[error("cannot read {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }
}

/// Non-fatal findings. Processing continues; callers decide whether to print them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// The `Index:` line and the `Words:` line disagree in length.
    IndexMismatch {
        sentence: usize,
        indices: usize,
        tokens: usize,
    },
    /// The document-level block could not be interpreted; its triples were dropped.
    DocLevelUnparsed { sentence: usize, message: String },
    /// The two annotations being compared do not share the same token list.
    TokenMismatch { sentence: usize },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::IndexMismatch {
                sentence,
                indices,
                tokens,
            } => write!(
                f,
                "sentence {sentence}: Index line lists {indices} positions but Words has {tokens} tokens"
            ),
            Warning::DocLevelUnparsed { sentence, message } => write!(
                f,
                "sentence {sentence}: document-level annotation ignored ({message})"
            ),
            Warning::TokenMismatch { sentence } => write!(
                f,
                "sentence {sentence}: token lists differ between the two files; comparing by position"
            ),
        }
    }
}

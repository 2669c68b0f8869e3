//! Inline tag syntax.
//!
//! ```text
//! tag  := item (";" item)*
//! item := ATOM | ROLE "(" tag ")"
//! ```
//!
//! Parsing is case-insensitive; whitespace around items is ignored.

use thiserror::Error;

use super::{FeatureStructure, Role, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TagError {
    #[error("empty tag")]
    Empty,
    #[error("empty item at offset {offset}")]
    EmptyItem { offset: usize },
    #[error("unbalanced parentheses at offset {offset}")]
    Unbalanced { offset: usize },
    #[error("bundle {role}() has no features")]
    EmptyBundle { role: String },
    #[error("duplicate role {role} at one level")]
    DuplicateRole { role: String },
    #[error("invalid character {ch:?} at offset {offset}")]
    InvalidChar { ch: char, offset: usize },
    #[error("{0}")]
    Invalid(Violation),
}

/// Parses an inline tag without consulting an inventory.
///
/// Only the syntax is checked here: balanced parentheses, non-empty
/// bundles and unique roles per level. Use
/// [`FeatureInventory::parse_tag`](super::FeatureInventory::parse_tag) to
/// also reject unknown labels and dimension conflicts.
pub fn parse_tag(text: &str) -> Result<FeatureStructure, TagError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    if text.trim().is_empty() {
        return Err(TagError::Empty);
    }
    let mut parser = Parser { chars, pos: 0, len: text.len() };
    let fs = parser.tag(0)?;
    if parser.pos < parser.chars.len() {
        // only a stray ')' can stop the top-level loop early
        return Err(TagError::Unbalanced { offset: parser.offset() });
    }
    Ok(fs)
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

fn is_label_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '.' | '_' | '+' | '-')
}

impl Parser {
    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(o, _)| o)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn tag(&mut self, depth: usize) -> Result<FeatureStructure, TagError> {
        let mut fs = FeatureStructure::new();
        loop {
            self.skip_ws();
            let start = self.offset();
            let mut label = String::new();
            while let Some(c) = self.peek() {
                if !is_label_char(c) {
                    break;
                }
                label.push(c);
                self.pos += 1;
            }
            self.skip_ws();
            match self.peek() {
                Some('(') => {
                    if label.is_empty() {
                        return Err(TagError::EmptyItem { offset: start });
                    }
                    let role = Role::new(&label);
                    self.pos += 1;
                    self.skip_ws();
                    if self.peek() == Some(')') {
                        return Err(TagError::EmptyBundle { role: role.to_string() });
                    }
                    let inner = self.tag(depth + 1)?;
                    if self.peek() != Some(')') {
                        return Err(TagError::Unbalanced { offset: self.offset() });
                    }
                    self.pos += 1;
                    if fs.bundle(&role).is_some() {
                        return Err(TagError::DuplicateRole { role: role.to_string() });
                    }
                    fs.insert_bundle(role, inner);
                    self.skip_ws();
                }
                _ => {
                    if label.is_empty() {
                        return match self.peek() {
                            Some(c) if c != ';' && c != ')' => {
                                Err(TagError::InvalidChar { ch: c, offset: self.offset() })
                            }
                            _ => Err(TagError::EmptyItem { offset: start }),
                        };
                    }
                    fs.insert_atom(label.as_str());
                }
            }
            match self.peek() {
                Some(';') => self.pos += 1,
                None => {
                    if depth > 0 {
                        return Err(TagError::Unbalanced { offset: self.len });
                    }
                    return Ok(fs);
                }
                Some(')') => {
                    if depth == 0 {
                        return Err(TagError::Unbalanced { offset: self.offset() });
                    }
                    return Ok(fs);
                }
                Some(c) => return Err(TagError::InvalidChar { ch: c, offset: self.offset() }),
            }
        }
    }
}

//! Lossless word tokenizer.
//!
//! Text is split into runs of whitespace, single punctuation characters and
//! words. A word is a maximal run of non-space, non-punctuation characters;
//! a hyphen or apostrophe between two word characters stays inside the word
//! (`Kreditkarten-Programm`, `don't`). Concatenating the token surfaces in
//! order gives back the input.

use std::collections::HashSet;
use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Word,
    Punct,
    Space,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub surface: &'a str,
    pub kind: TokenKind,
    /// Byte span in the source text.
    pub span: Range<usize>,
}

impl Token<'_> {
    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }
}

pub fn is_punct(c: char) -> bool {
    if c.is_ascii() {
        return c.is_ascii_punctuation() && c != '_';
    }
    let u = c as u32;
    matches!(u,
        0x00A1..=0x00BF
        | 0x2010..=0x2027
        | 0x2030..=0x205E
        | 0x3001..=0x3003
        | 0x3008..=0x3011
        | 0x3014..=0x301F
        | 0xFF01..=0xFF0F
        | 0xFF1A..=0xFF20
        | 0xFF3B..=0xFF40
        | 0xFF5B..=0xFF65
        | 0x060C | 0x061B | 0x061F | 0x066A..=0x066D | 0x06D4
        | 0x0964 | 0x0965
    ) && !c.is_alphanumeric()
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}' | '\u{2010}' | '\u{2011}')
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !is_punct(c)
}

pub fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, c)) = chars.peek() {
        let kind = if c.is_whitespace() {
            TokenKind::Space
        } else if is_punct(c) {
            TokenKind::Punct
        } else {
            TokenKind::Word
        };
        let mut end = start + c.len_utf8();
        chars.next();
        match kind {
            TokenKind::Punct => {}
            TokenKind::Space => {
                while let Some(&(i, c)) = chars.peek() {
                    if !c.is_whitespace() {
                        break;
                    }
                    end = i + c.len_utf8();
                    chars.next();
                }
            }
            TokenKind::Word => loop {
                match chars.peek() {
                    Some(&(i, c)) if is_word_char(c) => {
                        end = i + c.len_utf8();
                        chars.next();
                    }
                    Some(&(i, c)) if is_joiner(c) => {
                        let after = text[i + c.len_utf8()..].chars().next();
                        if after.is_some_and(is_word_char) {
                            end = i + c.len_utf8();
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    _ => break,
                }
            },
        }
        tokens.push(Token {
            surface: &text[start..end],
            kind,
            span: start..end,
        });
    }
    tokens
}

/// Word tokens only, in order.
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    tokenize(text)
        .into_iter()
        .filter(Token::is_word)
        .map(|t| t.surface)
}

/// Case-folding applied to every lexicon key and overlap comparison.
pub fn fold(term: &str) -> String {
    term.to_lowercase()
}

/// Case-folded word tokens.
pub fn folded_words(text: &str) -> Vec<String> {
    words(text).map(fold).collect()
}

/// Distinct case-folded word types.
pub fn word_types(text: &str) -> HashSet<String> {
    words(text).map(fold).collect()
}

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, RngCore};

use super::{PredicateError, Refinement, MAX_GEN_LEN};
use crate::value::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextClass {
    /// Any text.
    Any,
    /// Non-empty, `[A-Za-z0-9_-]`.
    Identifier,
    /// Non-empty, `[A-Za-z0-9]`.
    Alphanumeric,
    /// Non-empty, `[A-Za-z]`.
    Latin,
}

impl TextClass {
    fn allows(self, c: char) -> bool {
        match self {
            TextClass::Any => true,
            TextClass::Identifier => c.is_ascii_alphanumeric() || c == '_' || c == '-',
            TextClass::Alphanumeric => c.is_ascii_alphanumeric(),
            TextClass::Latin => c.is_ascii_alphabetic(),
        }
    }

    fn alphabet(self) -> &'static str {
        match self {
            TextClass::Any => "abcXYZ019 _-.,'\"\\\té∂😀",
            TextClass::Identifier => "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-",
            TextClass::Alphanumeric => "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789",
            TextClass::Latin => "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TextType {
    class: TextClass,
}

impl TextType {
    pub fn new(class: TextClass) -> Self {
        TextType { class }
    }
}

impl Refinement for TextType {
    fn name(&self) -> String {
        match self.class {
            TextClass::Any => "String",
            TextClass::Identifier => "Identifier",
            TextClass::Alphanumeric => "Alphanumeric",
            TextClass::Latin => "Latin",
        }
        .to_string()
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        Ok(match v {
            Value::Text(_) if self.class == TextClass::Any => true,
            Value::Text(s) => !s.is_empty() && s.chars().all(|c| self.class.allows(c)),
            _ => false,
        })
    }

    fn boundary(&self) -> Vec<Value> {
        let items: &[&str] = match self.class {
            TextClass::Any => &["", "a", " ", "\n", "é∂😀", "A longer sentence."],
            TextClass::Identifier => &["a", "_", "-", "Z9", "snake_case-id"],
            TextClass::Alphanumeric => &["a", "Z", "0", "abc123"],
            TextClass::Latin => &["a", "Z", "Latin"],
        };
        items.iter().map(|s| Value::text(*s)).collect()
    }

    fn sample(&self, rng: &mut dyn RngCore, _depth: u32) -> Option<Value> {
        let alphabet: Vec<char> = self.class.alphabet().chars().collect();
        let min = usize::from(self.class != TextClass::Any);
        let n = rng.random_range(min..=MAX_GEN_LEN);
        let s: String = (0..n)
            .map(|_| alphabet[rng.random_range(0..alphabet.len())])
            .collect();
        Some(Value::Text(s))
    }
}

/// One-character text drawn from a fixed alphabet, e.g. `Set('AGCT')`.
#[derive(Debug, Clone)]
pub struct CharSet {
    alphabet: Vec<char>,
}

impl CharSet {
    pub fn new(alphabet: &str) -> Self {
        let mut chars: Vec<char> = Vec::new();
        for c in alphabet.chars() {
            if !chars.contains(&c) {
                chars.push(c);
            }
        }
        CharSet { alphabet: chars }
    }
}

impl Refinement for CharSet {
    fn name(&self) -> String {
        let s: String = self.alphabet.iter().collect();
        format!("Set({})", Value::Text(s))
    }

    fn check(&self, v: &Value) -> Result<bool, PredicateError> {
        Ok(match v {
            Value::Text(s) => {
                let mut it = s.chars();
                matches!((it.next(), it.next()), (Some(c), None) if self.alphabet.contains(&c))
            }
            _ => false,
        })
    }

    fn boundary(&self) -> Vec<Value> {
        self.alphabet.iter().map(|c| Value::Text(c.to_string())).collect()
    }

    fn sample(&self, rng: &mut dyn RngCore, _depth: u32) -> Option<Value> {
        if self.alphabet.is_empty() {
            return None;
        }
        let c = self.alphabet[rng.random_range(0..self.alphabet.len())];
        Some(Value::Text(c.to_string()))
    }

    fn exhaustive(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use crate::types::*;
    use crate::value::Value;

    #[test]
    fn classes() {
        assert!(identifier().accepts(&Value::text("a_b-1")));
        assert!(!identifier().accepts(&Value::text("")));
        assert!(!identifier().accepts(&Value::text("a b")));
        assert!(alphanumeric().accepts(&Value::text("abc123")));
        assert!(!alphanumeric().accepts(&Value::text("a_b")));
        assert!(latin().accepts(&Value::text("Latin")));
        assert!(!latin().accepts(&Value::text("abc1")));
        assert!(!latin().accepts(&Value::text("é")));
        assert!(string().accepts(&Value::text("")));
        assert!(!string().accepts(&Value::int(1)));
    }

    #[test]
    fn charset_membership() {
        let dna = set_chars("AGCT");
        assert_eq!(dna.name(), "Set('AGCT')");
        assert!(dna.accepts(&Value::text("G")));
        assert!(!dna.accepts(&Value::text("U")));
        assert!(!dna.accepts(&Value::text("AG")));
        assert_eq!(dna.generate(0, 100).count(), 4);
    }
}

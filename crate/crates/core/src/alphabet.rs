use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symbols are indices into an [`Alphabet`].
pub type Symbol = usize;

/// An ordered set of distinct symbol labels.
///
/// The position of a label is its symbol id. That order is the canonical
/// symbol order used for tie-breaking, sampling and serialization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    labels: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.contains(',') || l.chars().any(char::is_whitespace) {
                return Err(Error::InvalidAlphabet(format!(
                    "label {l:?} must be nonempty without commas or whitespace"
                )));
            }
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate label {l:?}")));
            }
        }
        Ok(Self { labels, index })
    }

    /// Alphabet with labels `"0"`, `"1"`, ... .
    pub fn numbered(size: usize) -> Result<Self> {
        Self::new((0..size).map(|i| i.to_string()))
    }

    /// Alphabet with spreadsheet-style labels `A`, `B`, ..., `Z`, `AA`, ... .
    pub fn lettered(size: usize) -> Result<Self> {
        Self::new((0..size).map(block_letter))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, s: Symbol) -> &str {
        &self.labels[s]
    }

    pub fn symbol(&self, label: &str) -> Option<Symbol> {
        self.index.get(label).copied()
    }

    pub fn encode<'a, I>(&self, tokens: I) -> Result<Vec<Symbol>>
    where
        I: IntoIterator<Item = &'a str>,
    {
        tokens
            .into_iter()
            .map(|t| {
                self.symbol(t)
                    .ok_or_else(|| Error::UnknownSymbol(t.to_string()))
            })
            .collect()
    }

    pub fn decode<'a>(&'a self, seq: &'a [Symbol]) -> impl Iterator<Item = &'a str> + 'a {
        seq.iter().map(move |&s| self.label(s))
    }

    /// Comma-joined labels, the context encoding used in model files.
    pub fn join(&self, seq: &[Symbol]) -> String {
        self.decode(seq).collect::<Vec<_>>().join(",")
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;

    fn try_from(labels: Vec<String>) -> Result<Self> {
        Self::new(labels)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.labels
    }
}

/// Label of block `i`: `A`..`Z`, then `AA`, `AB`, ... .
pub fn block_letter(mut i: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn letters() {
        assert_eq!(block_letter(0), "A");
        assert_eq!(block_letter(25), "Z");
        assert_eq!(block_letter(26), "AA");
        assert_eq!(block_letter(27), "AB");
        assert_eq!(block_letter(26 + 26 * 26), "AAA");
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a,b"]).is_err());
    }

    #[test]
    fn encode_decode() {
        let a = Alphabet::new(["x", "y"]).unwrap();
        let s = a.encode(["y", "x", "y"]).unwrap();
        assert_eq!(s, vec![1, 0, 1]);
        assert_eq!(a.join(&s), "y,x,y");
        assert!(matches!(a.encode(["z"]), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn serde_round_trip() {
        let a = Alphabet::new(["p", "q"]).unwrap();
        let j = serde_json::to_string(&a).unwrap();
        assert_eq!(j, r#"["p","q"]"#);
        let b: Alphabet = serde_json::from_str(&j).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.symbol("q"), Some(1));
    }
}

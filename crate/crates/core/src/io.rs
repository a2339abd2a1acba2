//! JSON model files and plain-text sequence files.
//!
//! Markov models are stored as
//! `{alphabet, order, initial_state, transitions: {context: {label: prob}}}`
//! with contexts written as comma-joined labels (empty for order 0). Labels
//! missing from a row have probability zero. IMP files hold
//! `{partition, components, switch}` with blocks in canonical order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::imp::{ImpModel, Partition};
use crate::markov::MarkovModel;
use crate::scalar::Real;

/// Largest row-sum deviation that the loader silently renormalizes.
pub const RENORMALIZE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovFile {
    pub alphabet: Vec<String>,
    pub order: usize,
    pub initial_state: Vec<String>,
    pub transitions: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpFile {
    pub partition: Vec<Vec<String>>,
    pub components: Vec<MarkovFile>,
    pub switch: MarkovFile,
}

impl MarkovFile {
    pub fn from_model<T: Real>(model: &MarkovModel<T>) -> Self {
        let alphabet = model.alphabet();
        let transitions = (0..model.num_states())
            .map(|s| {
                let row = model
                    .row(s)
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| **p > T::zero())
                    .map(|(a, p)| (alphabet.label(a).to_string(), p.as_f64()))
                    .collect();
                (alphabet.join(model.context(s)), row)
            })
            .collect();
        Self {
            alphabet: alphabet.labels().to_vec(),
            order: model.order(),
            initial_state: alphabet
                .decode(model.context(model.initial_state()))
                .map(str::to_string)
                .collect(),
            transitions,
        }
    }

    pub fn to_model<T: Real>(&self) -> Result<MarkovModel<T>> {
        let alphabet = Alphabet::new(self.alphabet.iter().cloned())?;
        let initial = alphabet.encode(self.initial_state.iter().map(String::as_str))?;
        let mut rows = Vec::with_capacity(self.transitions.len());
        for (ctx, probs) in &self.transitions {
            let context = parse_context(&alphabet, ctx)?;
            let mut row = vec![0.0; alphabet.len()];
            for (label, &p) in probs {
                let a = alphabet.symbol(label).ok_or_else(|| {
                    Error::InvalidModel(format!(
                        "row for context [{ctx}] names unknown symbol {label:?}"
                    ))
                })?;
                if !p.is_finite() || p < 0.0 {
                    return Err(Error::InvalidModel(format!(
                        "row for context [{ctx}] has invalid probability {p} for {label:?}"
                    )));
                }
                row[a] = p;
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > RENORMALIZE_TOLERANCE {
                return Err(Error::NonStochastic {
                    context: ctx.clone(),
                    sum,
                });
            }
            rows.push((
                context,
                row.iter().map(|p| T::from_f64_lossy(p / sum)).collect(),
            ));
        }
        MarkovModel::new(alphabet, self.order, initial, rows)
    }
}

fn parse_context(alphabet: &Alphabet, ctx: &str) -> Result<Vec<Symbol>> {
    if ctx.is_empty() {
        return Ok(Vec::new());
    }
    ctx.split(',')
        .map(|l| {
            alphabet.symbol(l).ok_or_else(|| {
                Error::InvalidModel(format!("context [{ctx}] names unknown symbol {l:?}"))
            })
        })
        .collect()
}

impl ImpFile {
    pub fn from_model<T: Real>(model: &ImpModel<T>) -> Self {
        Self {
            partition: model.partition().labelled(model.alphabet()),
            components: model
                .components()
                .iter()
                .map(MarkovFile::from_model)
                .collect(),
            switch: MarkovFile::from_model(model.switch()),
        }
    }

    /// The global alphabet is the sorted union of block labels; blocks must
    /// already be listed in canonical order over it.
    pub fn to_model<T: Real>(&self) -> Result<ImpModel<T>> {
        let labels: Vec<String> = self.partition.iter().flatten().cloned().collect();
        let mut sorted = labels.clone();
        sorted.sort();
        let alphabet = Alphabet::new(sorted)?;
        let partition = Partition::from_labelled(&alphabet, &self.partition)?;
        let canonical = partition.labelled(&alphabet);
        if canonical != self.partition {
            return Err(Error::InvalidPartition(format!(
                "blocks must be listed in canonical order {}",
                serde_json::to_string(&canonical)?
            )));
        }
        if self.components.len() != partition.num_blocks() {
            return Err(Error::InvalidModel(format!(
                "{} components for {} blocks",
                self.components.len(),
                partition.num_blocks()
            )));
        }
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.to_model()
                    .map_err(|e| Error::InvalidModel(format!("component {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let switch = self
            .switch
            .to_model()
            .map_err(|e| Error::InvalidModel(format!("switch: {e}")))?;
        ImpModel::new(alphabet, partition, components, switch)
    }
}

pub fn markov_from_json<T: Real>(text: &str) -> Result<MarkovModel<T>> {
    serde_json::from_str::<MarkovFile>(text)?.to_model()
}

pub fn markov_to_json<T: Real>(model: &MarkovModel<T>) -> String {
    serde_json::to_string_pretty(&MarkovFile::from_model(model)).expect("model serializes")
}

pub fn imp_from_json<T: Real>(text: &str) -> Result<ImpModel<T>> {
    serde_json::from_str::<ImpFile>(text)?.to_model()
}

pub fn imp_to_json<T: Real>(model: &ImpModel<T>) -> String {
    serde_json::to_string_pretty(&ImpFile::from_model(model)).expect("model serializes")
}

/// How symbols are laid out in a sequence file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SequenceFormat {
    /// Whitespace-separated tokens; written one per line.
    #[default]
    Tokens,
    /// Every non-whitespace character is a symbol; written without separators.
    Chars,
}

pub fn parse_sequence(text: &str, format: SequenceFormat) -> Vec<String> {
    match format {
        SequenceFormat::Tokens => text.split_whitespace().map(str::to_string).collect(),
        SequenceFormat::Chars => text
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(String::from)
            .collect(),
    }
}

pub fn format_sequence<S: AsRef<str>>(tokens: &[S], format: SequenceFormat) -> Result<String> {
    let mut out = String::new();
    match format {
        SequenceFormat::Tokens => {
            for t in tokens {
                out.push_str(t.as_ref());
                out.push('\n');
            }
        }
        SequenceFormat::Chars => {
            for t in tokens {
                let t = t.as_ref();
                if t.chars().count() != 1 {
                    return Err(Error::InvalidParams(format!(
                        "symbol {t:?} is not a single character"
                    )));
                }
                out.push_str(t);
            }
            if !tokens.is_empty() {
                out.push('\n');
            }
        }
    }
    Ok(out)
}

/// Alphabet of the distinct tokens in sorted order, with the encoded
/// sequence. `None` for an empty sequence.
pub fn alphabet_of(tokens: &[String]) -> Result<Option<(Alphabet, Vec<Symbol>)>> {
    if tokens.is_empty() {
        return Ok(None);
    }
    let mut labels: Vec<&str> = tokens.iter().map(String::as_str).collect();
    labels.sort_unstable();
    labels.dedup();
    let alphabet = Alphabet::new(labels.iter().map(|s| s.to_string()))?;
    let seq = alphabet.encode(tokens.iter().map(String::as_str))?;
    Ok(Some((alphabet, seq)))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = r#"{
        "alphabet": ["a", "b"],
        "order": 1,
        "initial_state": ["a"],
        "transitions": {"a": {"a": 0.25, "b": 0.75}, "b": {"a": 0.5, "b": 0.5}}
    }"#;

    #[test]
    fn markov_round_trip() {
        let m: MarkovModel<f64> = markov_from_json(CHAIN).unwrap();
        assert_eq!(m.order(), 1);
        let again: MarkovModel<f64> = markov_from_json(&markov_to_json(&m)).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn small_deviation_is_renormalized() {
        let text = CHAIN.replace("0.75", "0.7500000005");
        let m: MarkovModel<f64> = markov_from_json(&text).unwrap();
        let s = m.state_of(&[0]).unwrap();
        assert!((m.row(s).iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn large_deviation_names_context() {
        let text = CHAIN.replace("0.75", "0.7");
        match markov_from_json::<f64>(&text) {
            Err(Error::NonStochastic { context, .. }) => assert_eq!(context, "a"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn imp_block_order_enforced() {
        let comp = |l: &str, r: &str| {
            format!(
                r#"{{"alphabet":["{l}","{r}"],"order":0,"initial_state":[],"transitions":{{"":{{"{l}":0.5,"{r}":0.5}}}}}}"#
            )
        };
        let sw = r#"{"alphabet":["A","B"],"order":0,"initial_state":[],"transitions":{"":{"A":0.5,"B":0.5}}}"#;
        let good = format!(
            r#"{{"partition":[["a","c"],["b","d"]],"components":[{},{}],"switch":{sw}}}"#,
            comp("a", "c"),
            comp("b", "d")
        );
        let m: ImpModel<f64> = imp_from_json(&good).unwrap();
        assert_eq!(m.partition().blocks(), &[vec![0, 2], vec![1, 3]]);
        let again: ImpModel<f64> = imp_from_json(&imp_to_json(&m)).unwrap();
        assert_eq!(m, again);

        let bad = format!(
            r#"{{"partition":[["b","d"],["a","c"]],"components":[{},{}],"switch":{sw}}}"#,
            comp("b", "d"),
            comp("a", "c")
        );
        assert!(matches!(
            imp_from_json::<f64>(&bad),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn sequence_formats() {
        let toks = parse_sequence("ab c\nd", SequenceFormat::Chars);
        assert_eq!(toks, ["a", "b", "c", "d"]);
        assert_eq!(
            format_sequence(&toks, SequenceFormat::Chars).unwrap(),
            "abcd\n"
        );
        assert_eq!(
            format_sequence(&toks, SequenceFormat::Tokens).unwrap(),
            "a\nb\nc\nd\n"
        );
        assert_eq!(
            parse_sequence(" x  yy\n", SequenceFormat::Tokens),
            ["x", "yy"]
        );
        assert!(format_sequence(&["yy"], SequenceFormat::Chars).is_err());
        assert_eq!(
            format_sequence::<&str>(&[], SequenceFormat::Chars).unwrap(),
            ""
        );
    }

    #[test]
    fn sorted_alphabet() {
        let toks: Vec<String> = ["c", "a", "c"].iter().map(|s| s.to_string()).collect();
        let (a, seq) = alphabet_of(&toks).unwrap().unwrap();
        assert_eq!(a.labels(), ["a", "c"]);
        assert_eq!(seq, vec![1, 0, 1]);
        assert!(alphabet_of(&[]).unwrap().is_none());
    }
}

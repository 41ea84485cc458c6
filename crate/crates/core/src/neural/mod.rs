//! Character-level recurrent generator.
//!
//! One-hot characters feed an embedding LSTM whose output sequence is read
//! by several parallel encoder LSTMs. Each encoder's hidden state is layer
//! normalized at every step, the encoders are concatenated, and an affine
//! softmax predicts the next character.

mod checkpoint;
mod layers;
mod model;
mod optim;

pub use checkpoint::{
    from_bytes, load_checkpoint, save_checkpoint, to_bytes, Checkpoint, CheckpointError, FORMAT_VERSION,
};
pub use model::{GenModel, GenParams, ModelConfig};
pub use optim::{Adam, TrainConfig};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const PAD: usize = 0;
pub const BOS: usize = 1;
pub const EOS: usize = 2;
const RESERVED: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NeuralError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("character {0:?} is not in the vocabulary")]
    UnknownChar(char),
    #[error("token {0} is outside the vocabulary")]
    UnknownToken(usize),
    #[error("batch is empty")]
    EmptyBatch,
    #[error("sequence must start with the begin marker")]
    MissingBos,
}

/// Corpus characters in sorted order after the three reserved markers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<char>", into = "Vec<char>")]
pub struct Vocabulary {
    chars: Vec<char>,
    index: BTreeMap<char, usize>,
}

impl From<Vec<char>> for Vocabulary {
    fn from(chars: Vec<char>) -> Self {
        let index = chars.iter().enumerate().map(|(i, &c)| (c, i + RESERVED)).collect();
        Vocabulary { chars, index }
    }
}

impl From<Vocabulary> for Vec<char> {
    fn from(v: Vocabulary) -> Self {
        v.chars
    }
}

impl Vocabulary {
    pub fn build<S: AsRef<str>>(corpus: &[S]) -> Result<Self, NeuralError> {
        if corpus.is_empty() {
            return Err(NeuralError::EmptyCorpus);
        }
        let mut chars: Vec<char> = corpus.iter().flat_map(|s| s.as_ref().chars()).collect();
        chars.sort_unstable();
        chars.dedup();
        Ok(Vocabulary::from(chars))
    }

    /// Number of tokens, reserved markers included.
    pub fn len(&self) -> usize {
        self.chars.len() + RESERVED
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn chars(&self) -> &[char] {
        &self.chars
    }

    pub fn index(&self, c: char) -> Option<usize> {
        self.index.get(&c).copied()
    }

    /// The character for a corpus token; `None` for the reserved markers.
    pub fn char_of(&self, token: usize) -> Option<char> {
        token.checked_sub(RESERVED).and_then(|i| self.chars.get(i)).copied()
    }

    /// `BOS, chars..., EOS`.
    pub fn encode(&self, text: &str) -> Result<Vec<usize>, NeuralError> {
        let mut out = Vec::with_capacity(text.len() + 2);
        out.push(BOS);
        for c in text.chars() {
            out.push(self.index(c).ok_or(NeuralError::UnknownChar(c))?);
        }
        out.push(EOS);
        Ok(out)
    }

    /// Drops reserved markers.
    pub fn decode(&self, tokens: &[usize]) -> String {
        tokens.iter().filter_map(|&t| self.char_of(t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocab_examples() {
        let v = Vocabulary::build(&["B1BB1"]).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v.chars(), &['1', 'B']);
        assert_eq!(Vocabulary::build(&["@"]).unwrap().len(), 4);
        assert_eq!(Vocabulary::build::<&str>(&[]), Err(NeuralError::EmptyCorpus));
        let v = Vocabulary::build(&["B1BB1", "A(@)", "%12"]).unwrap();
        for &c in v.chars() {
            let i = v.index(c).unwrap();
            assert!(i >= RESERVED);
            assert_eq!(v.char_of(i), Some(c));
        }
        for t in [PAD, BOS, EOS] {
            assert_eq!(v.char_of(t), None);
        }
        let enc = v.encode("A(@)").unwrap();
        assert_eq!((enc[0], *enc.last().unwrap(), enc.len()), (BOS, EOS, 6));
        assert_eq!(v.decode(&enc), "A(@)");
        assert_eq!(v.encode("Z"), Err(NeuralError::UnknownChar('Z')));
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(serde_json::from_str::<Vocabulary>(&json).unwrap(), v);
    }
}

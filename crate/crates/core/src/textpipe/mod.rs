//! Text analysis: cleaning, noun/verb filtering, stemming, feature hashing
//! and cosine similarity.
//!
//! Every function here is pure. [`vectorize`] allocates a fresh accumulator on
//! each call, so pipelines can be shared freely between threads.

mod hashing;
mod porter;
mod tagger;

use serde::{Deserialize, Serialize};
use std::num::NonZeroUsize;

pub use hashing::{crc32, hash_index};
pub use porter::porter_stem;
pub use tagger::{LexiconTagger, PosTagger, TokenClass};

/// Default number of buckets in a [`FeatureVector`].
pub const DEFAULT_VECTOR_SIZE: usize = 256;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TextError {
    #[error("feature vectors differ in size ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },
    #[error("vector size must be at least 1")]
    ZeroSize,
}

/// Fixed-length bucket counts produced by the hash trick.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureVector {
    counts: Vec<u32>,
}

impl FeatureVector {
    pub fn zeros(size: NonZeroUsize) -> Self {
        FeatureVector { counts: vec![0; size.get()] }
    }

    pub fn size(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Sum of all bucket counts, i.e. the number of tokens hashed in.
    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    fn add_token(&mut self, token: &str) {
        let idx = hash_index(token, self.counts.len());
        self.counts[idx] += 1;
    }
}

/// Cosine similarity between two count vectors, always in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Similarity(f64);

impl Similarity {
    pub const ZERO: Similarity = Similarity(0.0);

    /// Clamps into `[0, 1]`; NaN becomes 0.
    pub fn new(value: f64) -> Self {
        if value.is_nan() {
            Similarity(0.0)
        } else {
            Similarity(value.clamp(0.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Rounded whole percentage, as shown in the mentions bar.
    pub fn percent(self) -> u8 {
        (self.0 * 100.0).round() as u8
    }
}

/// Lowercase, drop everything that is not a letter, digit or whitespace, and
/// collapse whitespace runs to single spaces.
pub fn clean_string(text: &str) -> String {
    let lowered = text.to_lowercase();
    let kept: String = lowered.chars().filter(|c| c.is_alphanumeric() || c.is_whitespace()).collect();
    kept.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Classify a token with the default tagger.
pub fn classify_token(word: &str) -> TokenClass {
    LexiconTagger.classify(word)
}

/// Clean, keep nouns and verbs, and stem, using the default tagger.
pub fn preprocess(text: &str) -> Vec<String> {
    preprocess_with(&LexiconTagger, text)
}

pub fn preprocess_with<T: PosTagger + ?Sized>(tagger: &T, text: &str) -> Vec<String> {
    clean_string(text)
        .split(' ')
        .filter(|w| !w.is_empty() && tagger.classify(w).is_retained())
        .map(porter_stem)
        .collect()
}

/// Hash-trick vector of `text` with the default tagger.
///
/// # Panics
/// If `size` is zero.
pub fn vectorize(text: &str, size: usize) -> FeatureVector {
    let size = NonZeroUsize::new(size).expect("vector size must be positive");
    TextPipeline::with_tagger(size, LexiconTagger).vectorize(text)
}

/// `dot(a, b) / (|a| |b|)`, or 0 when either vector is all zeros.
pub fn cosine_similarity(a: &FeatureVector, b: &FeatureVector) -> Result<Similarity, TextError> {
    if a.size() != b.size() {
        return Err(TextError::SizeMismatch { left: a.size(), right: b.size() });
    }
    let mut dot: u128 = 0;
    let mut norm_a: u128 = 0;
    let mut norm_b: u128 = 0;
    for (&x, &y) in a.counts.iter().zip(&b.counts) {
        let (x, y) = (u128::from(x), u128::from(y));
        dot += x * y;
        norm_a += x * x;
        norm_b += y * y;
    }
    if norm_a == 0 || norm_b == 0 {
        return Ok(Similarity::ZERO);
    }
    let denom = (norm_a as f64).sqrt() * (norm_b as f64).sqrt();
    Ok(Similarity::new(dot as f64 / denom))
}

/// A configured vectorizer: bucket count plus tagger.
#[derive(Debug, Clone)]
pub struct TextPipeline<T = LexiconTagger> {
    size: NonZeroUsize,
    tagger: T,
}

impl TextPipeline<LexiconTagger> {
    pub fn new(size: usize) -> Result<Self, TextError> {
        let size = NonZeroUsize::new(size).ok_or(TextError::ZeroSize)?;
        Ok(Self::with_tagger(size, LexiconTagger))
    }
}

impl Default for TextPipeline<LexiconTagger> {
    fn default() -> Self {
        Self::with_tagger(NonZeroUsize::new(DEFAULT_VECTOR_SIZE).unwrap(), LexiconTagger)
    }
}

impl<T: PosTagger> TextPipeline<T> {
    pub fn with_tagger(size: NonZeroUsize, tagger: T) -> Self {
        TextPipeline { size, tagger }
    }

    pub fn size(&self) -> usize {
        self.size.get()
    }

    pub fn preprocess(&self, text: &str) -> Vec<String> {
        preprocess_with(&self.tagger, text)
    }

    pub fn vectorize(&self, text: &str) -> FeatureVector {
        let mut vector = FeatureVector::zeros(self.size);
        for token in self.preprocess(text) {
            vector.add_token(&token);
        }
        vector
    }

    pub fn similarity(&self, a: &str, b: &str) -> Similarity {
        cosine_similarity(&self.vectorize(a), &self.vectorize(b)).expect("vectors from one pipeline share a size")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_examples() {
        assert_eq!(clean_string("Hello, World!"), "hello world");
        assert_eq!(clean_string(""), "");
        assert_eq!(clean_string("the mouse ran up the clock"), "the mouse ran up the clock");
        assert_eq!(clean_string("  tabs\tand\n\nnewlines  "), "tabs and newlines");
        assert_eq!(clean_string("C++ & C# rock!!"), "c c rock");
    }

    #[test]
    fn preprocess_examples() {
        assert_eq!(preprocess("white dog"), vec!["dog"]);
        assert_eq!(preprocess("the mouse ran up the clock"), vec!["mous", "ran", "clock"]);
        assert!(preprocess("").is_empty());
        assert!(preprocess("!!! ???").is_empty());
    }

    #[test]
    fn vectorize_counts_tokens() {
        let v = vectorize("", 256);
        assert_eq!(v.size(), 256);
        assert!(v.is_zero());

        let v = vectorize("dog dog cat", 256);
        let mut expected = vec![0u32; 256];
        expected[hash_index("dog", 256)] += 2;
        expected[hash_index("cat", 256)] += 1;
        assert_eq!(v.counts(), expected.as_slice());
        assert_eq!(v.total(), 3);
    }

    #[test]
    fn cosine_rejects_mismatched_sizes() {
        let a = vectorize("dog", 8);
        let b = vectorize("dog", 16);
        assert_eq!(cosine_similarity(&a, &b), Err(TextError::SizeMismatch { left: 8, right: 16 }));
    }

    #[test]
    fn zero_vector_has_zero_similarity() {
        let a = vectorize("", 64);
        let b = vectorize("dog", 64);
        assert_eq!(cosine_similarity(&a, &b).unwrap(), Similarity::ZERO);
        assert_eq!(cosine_similarity(&a, &a).unwrap(), Similarity::ZERO);
    }

    #[test]
    fn pipeline_rejects_zero_size() {
        assert_eq!(TextPipeline::new(0).unwrap_err(), TextError::ZeroSize);
    }

    #[test]
    fn similarity_clamps_and_rounds() {
        assert_eq!(Similarity::new(1.0000000002).value(), 1.0);
        assert_eq!(Similarity::new(-0.1).value(), 0.0);
        assert_eq!(Similarity::new(f64::NAN).value(), 0.0);
        assert_eq!(Similarity::new(0.816).percent(), 82);
    }
}

//! Part-of-speech classification used to keep only nouns and verbs.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenClass {
    Noun,
    Verb,
    Other,
}

impl TokenClass {
    /// Whether tokens of this class survive preprocessing.
    pub fn is_retained(self) -> bool {
        matches!(self, TokenClass::Noun | TokenClass::Verb)
    }
}

/// Anything that can assign a [`TokenClass`] to a cleaned lowercase token.
///
/// Implementations must be deterministic and safe to share across threads.
pub trait PosTagger: Send + Sync {
    fn classify(&self, word: &str) -> TokenClass;
}

impl<T: PosTagger + ?Sized> PosTagger for &T {
    fn classify(&self, word: &str) -> TokenClass {
        (**self).classify(word)
    }
}

impl<T: PosTagger + ?Sized> PosTagger for std::sync::Arc<T> {
    fn classify(&self, word: &str) -> TokenClass {
        (**self).classify(word)
    }
}

/// Dependency-free default tagger.
///
/// Lookup order: the closed-class lexicon (function words, common adjectives
/// and adverbs, all `Other`), the verb lexicon, numeric tokens (`Other`),
/// suffix rules, then `Noun` for everything unrecognised.
#[derive(Debug, Clone, Copy, Default)]
pub struct LexiconTagger;

impl PosTagger for LexiconTagger {
    fn classify(&self, word: &str) -> TokenClass {
        if word.is_empty() {
            return TokenClass::Other;
        }
        if OTHER_WORDS.binary_search(&word).is_ok() {
            return TokenClass::Other;
        }
        if VERB_WORDS.binary_search(&word).is_ok() {
            return TokenClass::Verb;
        }
        if word.chars().all(|c| c.is_numeric()) {
            return TokenClass::Other;
        }
        if NOUN_EXCEPTIONS.binary_search(&word).is_ok() {
            return TokenClass::Noun;
        }
        suffix_class(word).unwrap_or(TokenClass::Noun)
    }
}

fn suffix_class(word: &str) -> Option<TokenClass> {
    let len = word.chars().count();
    if len > 4 && word.ends_with("ing") {
        return Some(TokenClass::Verb);
    }
    if len > 4 && word.ends_with("ed") {
        return Some(TokenClass::Verb);
    }
    if len > 4 && word.ends_with("ly") {
        return Some(TokenClass::Other);
    }
    if len > 5 && ["ous", "ful", "less", "ish"].iter().any(|s| word.ends_with(s)) {
        return Some(TokenClass::Other);
    }
    None
}

/// Words that would otherwise be caught by a suffix rule. Sorted.
const NOUN_EXCEPTIONS: &[&str] = &[
    "apply", "assembly", "belly", "building", "ceiling", "daily", "dish", "english", "evening", "family", "finish",
    "fish", "fly", "hundred", "italy", "jelly", "lily", "monopoly", "morning", "polish", "publish", "rally", "reply",
    "ring", "seed", "sled", "speed", "spring", "string", "supply", "swedish", "thing", "wedding", "wing",
];

/// Closed-class and common modifier words. Sorted for binary search.
const OTHER_WORDS: &[&str] = &[
    "a",
    "about",
    "above",
    "across",
    "after",
    "again",
    "against",
    "all",
    "almost",
    "alone",
    "along",
    "already",
    "also",
    "although",
    "always",
    "am",
    "among",
    "an",
    "and",
    "another",
    "any",
    "anybody",
    "anyone",
    "anything",
    "anywhere",
    "around",
    "as",
    "at",
    "away",
    "back",
    "bad",
    "because",
    "before",
    "behind",
    "below",
    "beneath",
    "beside",
    "besides",
    "best",
    "better",
    "between",
    "beyond",
    "big",
    "black",
    "blue",
    "both",
    "brown",
    "but",
    "by",
    "can",
    "cannot",
    "certain",
    "cheap",
    "clear",
    "close",
    "cold",
    "common",
    "could",
    "dark",
    "deep",
    "despite",
    "different",
    "down",
    "due",
    "during",
    "each",
    "early",
    "easy",
    "eight",
    "either",
    "eleven",
    "else",
    "enough",
    "entire",
    "etc",
    "even",
    "ever",
    "every",
    "everybody",
    "everyone",
    "everything",
    "everywhere",
    "except",
    "far",
    "fast",
    "few",
    "fewer",
    "first",
    "five",
    "for",
    "former",
    "four",
    "free",
    "from",
    "full",
    "further",
    "general",
    "good",
    "great",
    "green",
    "grey",
    "happy",
    "hard",
    "he",
    "her",
    "here",
    "hers",
    "herself",
    "high",
    "him",
    "himself",
    "his",
    "hot",
    "how",
    "however",
    "i",
    "if",
    "important",
    "in",
    "inside",
    "into",
    "it",
    "its",
    "itself",
    "just",
    "large",
    "last",
    "late",
    "later",
    "latter",
    "least",
    "less",
    "like",
    "likely",
    "little",
    "long",
    "low",
    "main",
    "many",
    "may",
    "me",
    "might",
    "mine",
    "more",
    "most",
    "much",
    "must",
    "my",
    "myself",
    "near",
    "nearly",
    "neither",
    "never",
    "new",
    "next",
    "nine",
    "no",
    "nobody",
    "none",
    "nor",
    "not",
    "nothing",
    "now",
    "nowhere",
    "of",
    "off",
    "often",
    "old",
    "on",
    "once",
    "one",
    "only",
    "onto",
    "open",
    "or",
    "other",
    "others",
    "our",
    "ours",
    "ourselves",
    "out",
    "outside",
    "over",
    "own",
    "past",
    "per",
    "perhaps",
    "possible",
    "pretty",
    "quite",
    "rather",
    "real",
    "recent",
    "red",
    "right",
    "same",
    "second",
    "seven",
    "several",
    "shall",
    "she",
    "short",
    "should",
    "simple",
    "since",
    "six",
    "small",
    "so",
    "some",
    "somebody",
    "someone",
    "something",
    "sometimes",
    "somewhere",
    "soon",
    "still",
    "strong",
    "such",
    "sure",
    "ten",
    "than",
    "that",
    "the",
    "their",
    "theirs",
    "them",
    "themselves",
    "then",
    "there",
    "therefore",
    "these",
    "they",
    "third",
    "this",
    "those",
    "though",
    "three",
    "through",
    "throughout",
    "thus",
    "till",
    "to",
    "together",
    "too",
    "toward",
    "towards",
    "true",
    "twelve",
    "twenty",
    "two",
    "under",
    "unless",
    "unlike",
    "until",
    "up",
    "upon",
    "us",
    "very",
    "via",
    "we",
    "well",
    "what",
    "whatever",
    "when",
    "whenever",
    "where",
    "whereas",
    "whether",
    "which",
    "while",
    "white",
    "who",
    "whoever",
    "whole",
    "whom",
    "whose",
    "why",
    "will",
    "with",
    "within",
    "without",
    "would",
    "yellow",
    "yes",
    "yet",
    "you",
    "young",
    "your",
    "yours",
    "yourself",
    "yourselves",
];

/// Common verbs, including irregular forms the suffix rules cannot see. Sorted.
const VERB_WORDS: &[&str] = &[
    "are", "ate", "be", "became", "become", "been", "began", "begin", "being", "bring", "brought", "build", "built",
    "buy", "came", "come", "did", "do", "does", "done", "drew", "drive", "drove", "eat", "fall", "fell", "felt",
    "find", "found", "gave", "get", "give", "go", "goes", "gone", "got", "grew", "grow", "had", "has", "have", "hide",
    "hold", "is", "jump", "keep", "kept", "knew", "know", "known", "led", "left", "let", "made", "make", "meet", "met",
    "paid", "pay", "play", "put", "ran", "read", "run", "said", "saw", "say", "see", "seek", "seen", "sent", "set",
    "sing", "sit", "sold", "spoke", "stood", "support", "take", "taken", "taught", "tell", "think", "thought", "told",
    "took", "use", "uses", "was", "went", "were", "write", "written", "wrote",
];

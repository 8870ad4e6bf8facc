use std::collections::HashSet;
use std::sync::OnceLock;

use super::porter;

const SMART_STOPLIST: &str = include_str!("../../data/stoplist.txt");

/// Splits text into maximal runs of Unicode letters and digits, lowercased.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// A set of words removed by the stopper.
#[derive(Debug, Clone)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Stoplist {
    /// Parses one word per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Stoplist { words }
    }

    /// The bundled 418-word English list.
    pub fn bundled() -> &'static Stoplist {
        static LIST: OnceLock<Stoplist> = OnceLock::new();
        LIST.get_or_init(|| Stoplist::parse(SMART_STOPLIST))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

pub fn apply_stopper(tokens: Vec<String>, stoplist: &Stoplist) -> Vec<String> {
    tokens.into_iter().filter(|t| !stoplist.contains(t)).collect()
}

pub fn apply_stemmer(tokens: Vec<String>) -> Vec<String> {
    tokens.into_iter().map(|t| porter::stem(&t)).collect()
}

/// One of the four (stopper, stemmer) preprocessing variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexVariant {
    pub stopper: bool,
    pub stemmer: bool,
}

impl IndexVariant {
    pub const ALL: [IndexVariant; 4] = [
        IndexVariant::new(false, false),
        IndexVariant::new(false, true),
        IndexVariant::new(true, false),
        IndexVariant::new(true, true),
    ];

    pub const fn new(stopper: bool, stemmer: bool) -> Self {
        IndexVariant { stopper, stemmer }
    }

    /// Directory name used for this variant on disk.
    pub fn dir_name(self) -> &'static str {
        match (self.stopper, self.stemmer) {
            (false, false) => "nostop-nostem",
            (false, true) => "nostop-stem",
            (true, false) => "stop-nostem",
            (true, true) => "stop-stem",
        }
    }

    pub fn from_dir_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.dir_name() == name)
    }

    /// Runs tokenize, then stop and stem as the variant requires.
    pub fn analyze(self, text: &str) -> Vec<String> {
        let mut tokens = tokenize(text);
        if self.stopper {
            tokens = apply_stopper(tokens, Stoplist::bundled());
        }
        if self.stemmer {
            tokens = apply_stemmer(tokens);
        }
        tokens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("Black Bear Attacks"), toks(&["black", "bear", "attacks"]));
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("U.S.-led, 1990s"), toks(&["u", "s", "led", "1990s"]));
        assert_eq!(tokenize("Übergröße café"), toks(&["übergröße", "café"]));
    }

    #[test]
    fn stopper_examples() {
        let sl = Stoplist::bundled();
        assert_eq!(apply_stopper(toks(&["the", "black", "bear"]), sl), toks(&["black", "bear"]));
        assert!(apply_stopper(vec![], sl).is_empty());
        assert!(apply_stopper(toks(&["of", "of", "of"]), sl).is_empty());
    }

    #[test]
    fn bundled_list_has_418_words() {
        assert_eq!(Stoplist::bundled().len(), 418);
    }

    #[test]
    fn stemmer_examples() {
        assert_eq!(apply_stemmer(toks(&["attacks"])), toks(&["attack"]));
        assert_eq!(apply_stemmer(toks(&["caresses"])), toks(&["caress"]));
        assert_eq!(apply_stemmer(toks(&["a"])), toks(&["a"]));
    }

    #[test]
    fn variant_pipeline_order() {
        let v = IndexVariant::new(true, true);
        assert_eq!(v.analyze("The Bears were attacking"), toks(&["bear", "attack"]));
        let v = IndexVariant::new(false, true);
        assert_eq!(v.analyze("The Bears"), toks(&["the", "bear"]));
    }

    #[test]
    fn dir_names_round_trip() {
        for v in IndexVariant::ALL {
            assert_eq!(IndexVariant::from_dir_name(v.dir_name()), Some(v));
        }
    }
}

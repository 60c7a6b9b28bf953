//! Bundled word-class lexicon, irregular lemma table, connective table and
//! stop-word list. The files live under `resources/` and are compiled in.

use std::collections::{HashMap, HashSet};
use std::sync::OnceLock;

use super::Pos;

const LEXICON: &str = include_str!("../../resources/lexicon.tsv");
const LEMMAS: &str = include_str!("../../resources/lemmas.tsv");
const CONNECTIVES: &str = include_str!("../../resources/connectives.tsv");
const STOP_WORDS: &str = include_str!("../../resources/stopwords.txt");

pub(crate) const NEGATIONS: [&str; 3] = ["not", "n't", "never"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectiveKind {
    Subordinating,
    Coordinating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Connective {
    pub kind: ConnectiveKind,
    /// Contrastive connectives ("although", "but") that flip event polarity.
    pub reversing: bool,
}

pub struct Lexicon {
    classes: HashMap<String, Vec<Pos>>,
    irregular: HashMap<String, String>,
    connectives: HashMap<String, Connective>,
    stop_words: HashSet<String>,
}

/// Non-empty, non-comment lines of a bundled resource file.
pub(crate) fn resource_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim_end)
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

fn parse_pos(tag: &str) -> Pos {
    match tag {
        "noun" => Pos::Noun,
        "verb" => Pos::Verb,
        "aux" => Pos::AuxVerb,
        "adj" => Pos::Adj,
        "pronoun" => Pos::Pronoun,
        "det" => Pos::Det,
        "other" => Pos::Other,
        t => panic!("bundled lexicon has unknown tag `{t}`"),
    }
}

impl Lexicon {
    fn load() -> Self {
        let mut classes = HashMap::new();
        for line in resource_lines(LEXICON) {
            let (word, tags) = line.split_once('\t').expect("lexicon rows are word<TAB>tags");
            classes.insert(word.to_string(), tags.split(',').map(parse_pos).collect());
        }
        let irregular = resource_lines(LEMMAS)
            .map(|l| {
                let (s, l) = l.split_once('\t').expect("lemma rows are surface<TAB>lemma");
                (s.to_string(), l.to_string())
            })
            .collect();
        let connectives = resource_lines(CONNECTIVES)
            .map(|l| {
                let cols: Vec<&str> = l.split('\t').collect();
                let kind = match cols[1] {
                    "sub" => ConnectiveKind::Subordinating,
                    _ => ConnectiveKind::Coordinating,
                };
                (
                    cols[0].to_string(),
                    Connective {
                        kind,
                        reversing: cols.get(2) == Some(&"yes"),
                    },
                )
            })
            .collect();
        let stop_words = resource_lines(STOP_WORDS).map(|l| l.trim().to_string()).collect();
        Self {
            classes,
            irregular,
            connectives,
            stop_words,
        }
    }

    pub fn classes(&self, word: &str) -> Option<&[Pos]> {
        self.classes.get(word).map(Vec::as_slice)
    }

    pub fn has_class(&self, word: &str, pos: Pos) -> bool {
        self.classes(word).is_some_and(|c| c.contains(&pos))
    }

    pub fn irregular_lemma(&self, word: &str) -> Option<&str> {
        self.irregular.get(word).map(String::as_str)
    }

    pub fn connective(&self, word: &str) -> Option<Connective> {
        self.connectives.get(word).copied()
    }

    pub fn is_stop_word(&self, word: &str) -> bool {
        self.stop_words.contains(word)
    }
}

pub fn lexicon() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(Lexicon::load)
}

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

fn undouble(stem: &str) -> Option<String> {
    let b = stem.as_bytes();
    let n = b.len();
    (n >= 3 && b[n - 1] == b[n - 2] && !is_vowel(b[n - 1] as char) && !matches!(b[n - 1], b'l' | b's' | b'z'))
        .then(|| stem[..n - 1].to_string())
}

/// Candidate base forms produced by regular suffix rules, most likely first.
fn suffix_candidates(word: &str, pos: Pos) -> Vec<String> {
    let mut out = Vec::new();
    let strip = |suf: &str| word.strip_suffix(suf).filter(|s| s.len() >= 2).map(str::to_string);
    match pos {
        Pos::Noun => {
            if let Some(s) = strip("men") {
                out.push(format!("{s}man"));
            }
            if let Some(s) = strip("ies") {
                out.push(format!("{s}y"));
            }
            if let Some(s) = strip("ves") {
                out.push(format!("{s}f"));
                out.push(format!("{s}fe"));
            }
            if let Some(s) = strip("es") {
                out.push(s);
            }
            if !word.ends_with("ss") && !word.ends_with("us") && !word.ends_with("is") {
                out.extend(strip("s"));
            }
        }
        Pos::Verb | Pos::AuxVerb => {
            if let Some(s) = strip("ied") {
                out.push(format!("{s}y"));
            }
            if let Some(s) = strip("ed") {
                out.push(s.clone());
                out.push(format!("{s}e"));
                out.extend(undouble(&s));
            }
            if let Some(s) = strip("ing") {
                out.push(s.clone());
                out.push(format!("{s}e"));
                out.extend(undouble(&s));
            }
            if let Some(s) = strip("ies") {
                out.push(format!("{s}y"));
            }
            if let Some(s) = strip("es") {
                out.push(s);
            }
            if !word.ends_with("ss") {
                out.extend(strip("s"));
            }
        }
        Pos::Adj => {
            for suf in ["est", "er"] {
                if let Some(s) = strip(suf) {
                    if let Some(base) = s.strip_suffix('i') {
                        out.push(format!("{base}y"));
                    }
                    out.push(s.clone());
                    out.push(format!("{s}e"));
                    out.extend(undouble(&s));
                }
            }
        }
        _ => {}
    }
    out
}

/// Base form of a regularly inflected word that is known to the lexicon under
/// `pos`, if any.
pub(crate) fn known_base(word: &str, pos: Pos) -> Option<String> {
    let lex = lexicon();
    let want = if pos == Pos::AuxVerb { Pos::Verb } else { pos };
    suffix_candidates(word, pos)
        .into_iter()
        .find(|c| lex.has_class(c, want))
}

/// Lemma of a lower-cased word form under the given part of speech.
pub fn lemmatize(word: &str, pos: Pos) -> String {
    let lex = lexicon();
    if pos != Pos::AuxVerb && lex.has_class(word, pos) {
        return word.to_string();
    }
    if let Some(l) = lex.irregular_lemma(word) {
        return l.to_string();
    }
    if !matches!(pos, Pos::Noun | Pos::Verb | Pos::AuxVerb | Pos::Adj) {
        return word.to_string();
    }
    if let Some(base) = known_base(word, pos) {
        return base;
    }
    // unknown word: plain suffix stripping
    let fallback = match pos {
        Pos::Noun => {
            if let Some(s) = word.strip_suffix("ies") {
                Some(format!("{s}y"))
            } else if word.ends_with("sses") || word.ends_with("ches") || word.ends_with("shes") || word.ends_with("xes") {
                Some(word[..word.len() - 2].to_string())
            } else if word.ends_with('s') && !word.ends_with("ss") && !word.ends_with("us") && !word.ends_with("is") {
                Some(word[..word.len() - 1].to_string())
            } else {
                None
            }
        }
        Pos::Verb => {
            if let Some(s) = word.strip_suffix("ied") {
                Some(format!("{s}y"))
            } else if let Some(s) = word.strip_suffix("ed") {
                Some(undouble(s).unwrap_or_else(|| s.to_string()))
            } else if let Some(s) = word.strip_suffix("ing") {
                Some(undouble(s).unwrap_or_else(|| s.to_string()))
            } else {
                word.strip_suffix('s').filter(|_| !word.ends_with("ss")).map(str::to_string)
            }
        }
        _ => None,
    };
    fallback.filter(|s| s.len() >= 2).unwrap_or_else(|| word.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_tables_load() {
        let lex = lexicon();
        assert!(lex.has_class("permit", Pos::Noun) && lex.has_class("permit", Pos::Verb));
        assert_eq!(lex.irregular_lemma("caught"), Some("catch"));
        assert_eq!(lex.connective("because").unwrap().kind, ConnectiveKind::Subordinating);
        assert!(lex.connective("although").unwrap().reversing);
        assert!(lex.is_stop_word("the"));
    }

    #[test]
    fn lemma_rules() {
        assert_eq!(lemmatize("caught", Pos::Verb), "catch");
        assert_eq!(lemmatize("advocated", Pos::Verb), "advocate");
        assert_eq!(lemmatize("feared", Pos::Verb), "fear");
        assert_eq!(lemmatize("refused", Pos::Verb), "refuse");
        assert_eq!(lemmatize("stopped", Pos::Verb), "stop");
        assert_eq!(lemmatize("demonstrators", Pos::Noun), "demonstrator");
        assert_eq!(lemmatize("councilmen", Pos::Noun), "councilman");
        assert_eq!(lemmatize("was", Pos::AuxVerb), "be");
        assert_eq!(lemmatize("taller", Pos::Adj), "tall");
        assert_eq!(lemmatize("happier", Pos::Adj), "happy");
        assert_eq!(lemmatize("zorbles", Pos::Noun), "zorble");
    }
}

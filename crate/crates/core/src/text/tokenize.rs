use super::lexicon::{known_base, lemmatize, lexicon, ConnectiveKind, NEGATIONS};
use super::{Pos, TextError, Token};

/// Splits text into raw pieces: `(surface, is_word)`.
fn split_raw(text: &str) -> Vec<(String, bool)> {
    let chars: Vec<char> = text.chars().map(|c| if c == '\u{2019}' { '\'' } else { c }).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphanumeric() {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric()
                    || (matches!(chars[i], '\'' | '-')
                        && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())))
            {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            split_clitics(&word, &mut out);
        } else {
            out.push((c.to_string(), false));
            i += 1;
        }
    }
    out
}

fn split_clitics(word: &str, out: &mut Vec<(String, bool)>) {
    let lower = word.to_lowercase();
    if lower.len() > 3 && lower.ends_with("n't") {
        let cut = word.len() - 3;
        out.push((word[..cut].to_string(), true));
        out.push((word[cut..].to_string(), true));
        return;
    }
    for clitic in ["'s", "'re", "'ll", "'ve", "'d", "'m"] {
        if lower.len() > clitic.len() && lower.ends_with(clitic) {
            let cut = word.len() - clitic.len();
            out.push((word[..cut].to_string(), true));
            out.push((word[cut..].to_string(), true));
            return;
        }
    }
    out.push((word.to_string(), true));
}

/// Possible readings of a word, default reading first.
fn readings(lower: &str, capitalized: bool, sentence_initial: bool) -> Vec<Pos> {
    let lex = lexicon();
    if let Some(c) = lex.connective(lower) {
        return vec![match c.kind {
            ConnectiveKind::Subordinating => Pos::ConjSub,
            ConnectiveKind::Coordinating => Pos::ConjCoord,
        }];
    }
    if NEGATIONS.contains(&lower) {
        return vec![Pos::Other];
    }
    if capitalized && !sentence_initial {
        return vec![Pos::Noun];
    }
    if let Some(c) = lex.classes(lower) {
        return c.to_vec();
    }
    if let Some(lemma) = lex.irregular_lemma(lower) {
        if let Some(c) = lex.classes(lemma) {
            let open: Vec<Pos> = c
                .iter()
                .copied()
                .filter(|p| matches!(p, Pos::Verb | Pos::Noun | Pos::Adj))
                .collect();
            if !open.is_empty() {
                return open;
            }
        }
    }
    let inflected: Vec<Pos> = [Pos::Verb, Pos::Noun, Pos::Adj]
        .into_iter()
        .filter(|&p| {
            let verbal_suffix = lower.ends_with("ed") || lower.ends_with("ing");
            let plural_suffix = lower.ends_with('s');
            let degree_suffix = lower.ends_with("er") || lower.ends_with("est");
            let suffix_fits = match p {
                Pos::Verb => verbal_suffix || plural_suffix,
                Pos::Noun => plural_suffix,
                _ => degree_suffix,
            };
            suffix_fits && known_base(lower, p).is_some()
        })
        .collect();
    if !inflected.is_empty() {
        // "-ed"/"-ing" forms of known verbs read as verbs first
        return inflected;
    }
    let guess = if lower.ends_with("ing") || lower.ends_with("ed") {
        Pos::Verb
    } else if lower.ends_with("ly") {
        Pos::Other
    } else if ["ous", "ful", "ive", "able", "ible", "al", "ic", "less", "ish"]
        .iter()
        .any(|s| lower.ends_with(s))
    {
        Pos::Adj
    } else if lower.chars().all(|c| c.is_ascii_digit()) {
        Pos::Other
    } else {
        Pos::Noun
    };
    vec![guess]
}

fn choose(options: &[Pos], prev: Option<(&Token, bool)>, next_readings: Option<&[Pos]>) -> Pos {
    if options.len() == 1 {
        return options[0];
    }
    let has = |p: Pos| options.contains(&p);
    let pick = |prefs: &[Pos]| prefs.iter().copied().find(|&p| has(p));
    let Some((prev, prev_is_be)) = prev else {
        return options[0];
    };
    let chosen = match prev.pos {
        Pos::Det | Pos::Adj => {
            let next_nominal = next_readings.is_some_and(|r| r.contains(&Pos::Noun));
            if next_nominal {
                pick(&[Pos::Adj, Pos::Noun])
            } else {
                pick(&[Pos::Noun, Pos::Adj])
            }
        }
        Pos::AuxVerb if prev_is_be => pick(&[Pos::Adj, Pos::Verb, Pos::Noun]),
        Pos::AuxVerb => pick(&[Pos::Verb]),
        Pos::Other if prev.lemma == "to" => pick(&[Pos::Verb]),
        Pos::Other if NEGATIONS.contains(&prev.lemma.as_str()) => pick(&[Pos::Verb, Pos::Adj]),
        Pos::Pronoun | Pos::Noun => pick(&[Pos::Verb]),
        Pos::Verb => pick(&[Pos::Noun, Pos::Adj]),
        _ => None,
    };
    chosen.unwrap_or(options[0])
}

/// Tokenizes and tags `text`. Punctuation becomes separate [`Pos::Punct`]
/// tokens; indices are contiguous from 0 over all tokens.
pub fn tokenize(text: &str) -> Result<Vec<Token>, TextError> {
    if text.trim().is_empty() {
        return Err(TextError::EmptyText);
    }
    let raw = split_raw(text);
    let lowers: Vec<String> = raw.iter().map(|(s, _)| s.to_lowercase()).collect();
    let mut first_word = true;
    let all_readings: Vec<Option<Vec<Pos>>> = raw
        .iter()
        .zip(&lowers)
        .map(|((surface, is_word), lower)| {
            if !*is_word {
                return None;
            }
            let cap = surface.chars().next().is_some_and(char::is_uppercase);
            let r = readings(lower, cap, first_word);
            first_word = false;
            Some(r)
        })
        .collect();

    let mut tokens: Vec<Token> = Vec::with_capacity(raw.len());
    // previous word token and whether the most recent auxiliary is a form of "be"
    let mut last_word: Option<usize> = None;
    let mut last_aux_is_be = false;
    for (i, ((surface, _), lower)) in raw.iter().zip(&lowers).enumerate() {
        let Some(options) = &all_readings[i] else {
            tokens.push(Token {
                surface: surface.clone(),
                lemma: surface.clone(),
                pos: Pos::Punct,
                index: i,
            });
            continue;
        };
        let next = all_readings[i + 1..].iter().flatten().next().map(Vec::as_slice);
        let prev = last_word.map(|j| (&tokens[j], last_aux_is_be));
        let pos = choose(options, prev, next);
        let lemma = if lower == "n't" {
            "not".to_string()
        } else {
            lemmatize(lower, pos)
        };
        if pos == Pos::AuxVerb {
            last_aux_is_be = lemma == "be";
        }
        tokens.push(Token {
            surface: surface.clone(),
            lemma,
            pos,
            index: i,
        });
        // negation keeps the auxiliary context ("was not clever")
        if !NEGATIONS.contains(&lower.as_str()) {
            last_word = Some(i);
        }
    }
    Ok(tokens)
}

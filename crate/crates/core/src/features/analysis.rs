//! Shared linguistic analysis of a half: tokens, triples, candidate spans,
//! the definite pronoun and the events around it.

use crate::resources::{governor, Role};
use crate::schema::SchemaHalf;
use crate::text::{self, Clause, HalfAnnotation, Pos, SemanticTriple, TextError, Token};

const PERSONAL_PRONOUNS: [&str; 11] = ["he", "she", "it", "they", "him", "her", "them", "his", "its", "their", "hers"];
const WH_WORDS: [&str; 4] = ["who", "whom", "what", "which"];

#[derive(Debug, Clone)]
pub struct Candidate {
    /// word-token indices of the candidate, leading determiners removed
    pub span: Vec<usize>,
    /// word-token indices of the candidate as written
    pub full_span: Vec<usize>,
    pub head: usize,
    pub proper: bool,
}

#[derive(Debug, Clone)]
pub struct AnalyzedHalf {
    pub tokens: Vec<Token>,
    pub triples: Result<Vec<SemanticTriple>, TextError>,
    pub clauses: Vec<Clause>,
    pub question_tokens: Vec<Token>,
    pub question_triples: Result<Vec<SemanticTriple>, TextError>,
    pub candidates: [Option<Candidate>; 2],
    /// token index of the definite pronoun in the sentence
    pub pronoun: Option<usize>,
}

fn locate(tokens: &[Token], candidate: &str) -> Option<Candidate> {
    let words: Vec<(usize, String)> = tokens
        .iter()
        .filter(|t| t.is_word())
        .map(|t| (t.index, t.lower()))
        .collect();
    let cand = text::tokenize(candidate).ok()?;
    let needle: Vec<String> = cand.iter().filter(|t| t.is_word()).map(Token::lower).collect();
    let hay: Vec<&str> = words.iter().map(|(_, w)| w.as_str()).collect();
    let needle_ref: Vec<&str> = needle.iter().map(String::as_str).collect();
    let start = crate::schema::find_span(&hay, &needle_ref)?;
    let full_span: Vec<usize> = words[start..start + needle.len()].iter().map(|(i, _)| *i).collect();
    let span: Vec<usize> = full_span
        .iter()
        .copied()
        .skip_while(|&i| tokens[i].pos == Pos::Det)
        .collect();
    let span = if span.is_empty() { full_span.clone() } else { span };
    let has_det = full_span.iter().any(|&i| tokens[i].pos == Pos::Det);
    let proper = !has_det
        && cand
            .iter()
            .filter(|t| t.is_word())
            .all(|t| t.surface.chars().next().is_some_and(char::is_uppercase));
    Some(Candidate {
        head: *span.last().expect("non-empty span"),
        span,
        full_span,
        proper,
    })
}

impl AnalyzedHalf {
    pub fn new(half: &SchemaHalf, annotation: Option<&HalfAnnotation>) -> Result<Self, TextError> {
        let s_ann = annotation.map(HalfAnnotation::sentence);
        let q_ann = annotation.map(HalfAnnotation::question);
        let tokens = text::tag_with(&half.sentence, s_ann.as_ref())?;
        let triples = text::triples_for_tokens(&tokens, s_ann.as_ref());
        let clauses = text::segment_clauses(&tokens);
        let question_tokens = text::tag_with(&half.question, q_ann.as_ref())?;
        let question_triples = text::triples_for_tokens(&question_tokens, q_ann.as_ref());
        let candidates = [locate(&tokens, &half.candidates[0]), locate(&tokens, &half.candidates[1])];
        let first_cand = candidates.iter().flatten().map(|c| c.head).min();
        let in_candidate =
            |i: usize| candidates.iter().flatten().any(|c| c.full_span.contains(&i));
        let pronoun = first_cand.and_then(|start| {
            tokens.iter().find(|t| {
                t.index > start
                    && t.pos == Pos::Pronoun
                    && PERSONAL_PRONOUNS.contains(&t.lower().as_str())
                    && !in_candidate(t.index)
            })
        });
        Ok(Self {
            pronoun: pronoun.map(|t| t.index),
            tokens,
            triples,
            clauses,
            question_tokens,
            question_triples,
            candidates,
        })
    }

    pub fn relations(&self) -> impl Iterator<Item = &SemanticTriple> {
        self.triples.iter().flatten().filter(|t| t.is_relation())
    }

    pub fn word_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.is_word()).count()
    }

    pub fn candidate_heads(&self) -> Option<[usize; 2]> {
        match &self.candidates {
            [Some(a), Some(b)] => Some([a.head, b.head]),
            _ => None,
        }
    }

    /// Lower-cased head word of candidate `i`.
    pub fn candidate_word(&self, i: usize) -> Option<String> {
        self.candidates[i].as_ref().map(|c| self.tokens[c.head].lower())
    }

    pub fn candidate_lemma(&self, i: usize) -> Option<String> {
        self.candidates[i].as_ref().map(|c| self.tokens[c.head].lemma.to_lowercase())
    }

    /// The relation that places the candidates: the first one mentioning a
    /// candidate head.
    pub fn main_triple(&self) -> Option<&SemanticTriple> {
        let [a, b] = self.candidate_heads()?;
        self.relations().find(|t| t.mentions(a) || t.mentions(b))
    }

    /// The relation holding the definite pronoun.
    pub fn pronoun_triple(&self) -> Option<&SemanticTriple> {
        let p = self.pronoun?;
        self.relations().find(|t| t.mentions(p)).or_else(|| {
            let clause = self.clause_of(p)?;
            self.relations().find(|t| t.clause == clause)
        })
    }

    pub fn clause_of(&self, index: usize) -> Option<usize> {
        self.clauses.iter().position(|c| c.tokens.contains(&index))
    }

    /// Role of candidate `i` in the main triple.
    pub fn candidate_role(&self, i: usize) -> Option<Role> {
        let t = self.main_triple()?;
        let head = self.candidates[i].as_ref()?.head;
        role_in(t, head)
    }

    /// Candidate (0 or 1) holding `role` in the main triple, if exactly one does.
    pub fn candidate_with_role(&self, role: Role) -> Option<usize> {
        let r = [self.candidate_role(0), self.candidate_role(1)];
        match (r[0] == Some(role), r[1] == Some(role)) {
            (true, false) => Some(0),
            (false, true) => Some(1),
            _ => None,
        }
    }

    /// Pronoun role inside its own clause of the sentence.
    pub fn pronoun_sentence_role(&self) -> Option<Role> {
        role_in(self.pronoun_triple()?, self.pronoun?)
    }

    /// Role the question asks about: `whom`, or a wh-word followed by another
    /// noun phrase before the verb, asks for an object; otherwise the wh-word
    /// is the subject. Falls back to the pronoun's sentence role.
    pub fn pronoun_question_role(&self) -> Option<Role> {
        let wh = self
            .question_tokens
            .iter()
            .find(|t| WH_WORDS.contains(&t.lower().as_str()));
        let verb = self
            .question_triples
            .iter()
            .flatten()
            .find(|t| t.is_relation())
            .map(|t| t.verb.index);
        match (wh, verb) {
            (Some(wh), _) if wh.lower() == "whom" => Some(Role::Object),
            (Some(wh), Some(v)) if v > wh.index => {
                let np_between = self.question_tokens[wh.index + 1..v]
                    .iter()
                    .any(|t| matches!(t.pos, Pos::Noun | Pos::Pronoun));
                Some(if np_between { Role::Object } else { Role::Subject })
            }
            _ => self.pronoun_sentence_role(),
        }
    }

    /// Main verb of the candidates' clause (V).
    pub fn v_token(&self) -> Option<&Token> {
        self.main_triple().map(|t| &t.verb)
    }

    /// Word governing the pronoun (X): complement adjective of a copula,
    /// else the verb.
    pub fn x_token(&self) -> Option<&Token> {
        self.pronoun_triple().map(governor)
    }

    /// Connective of the pronoun's clause, else the first connective.
    pub fn connective(&self) -> Option<&Token> {
        let from_pronoun = self
            .pronoun
            .and_then(|p| self.clause_of(p))
            .and_then(|c| self.clauses[c].connective);
        from_pronoun
            .or_else(|| self.clauses.iter().find_map(|c| c.connective))
            .map(|i| &self.tokens[i])
    }

    /// First contrastive connective among the clause connectives.
    pub fn reversing_connective(&self) -> Option<String> {
        let lex = text::lexicon::lexicon();
        self.clauses
            .iter()
            .filter_map(|c| c.connective)
            .map(|i| self.tokens[i].lower())
            .find(|w| lex.connective(w).is_some_and(|c| c.reversing))
    }
}

pub(crate) fn role_in(t: &SemanticTriple, index: usize) -> Option<Role> {
    if t.subject.as_ref().is_some_and(|s| s.index == index) {
        Some(Role::Subject)
    } else if t.object.as_ref().is_some_and(|o| o.index == index) {
        Some(Role::Object)
    } else {
        None
    }
}

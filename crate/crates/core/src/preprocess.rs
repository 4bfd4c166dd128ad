//! Raw-text front end: sentence segmentation, tokenization, special-character
//! stripping and a lexicon + suffix POS tagger.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document};

/// Characters removed by [`strip_special_chars`] unless configured otherwise.
pub const DEFAULT_STRIP_CHARS: &str = "'-’(&)";

const ABBREVIATIONS: [&str; 3] = ["e.g.", "i.e.", "etc."];

/// Splits text into sentences of tokens.
///
/// A sentence ends at `.`, `?` or `!` when followed by whitespace and an
/// uppercase letter, or by the end of the text. `e.g.`, `i.e.` and `etc.`
/// are kept as single tokens and never end a sentence. Punctuation becomes
/// separate tokens; apostrophes and hyphens between letters stay inside the
/// word.
pub fn segment_and_tokenize(text: &str) -> Vec<Vec<String>> {
    let tokens = tokenize(text);
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for (i, (tok, space_after)) in tokens.iter().enumerate() {
        current.push(tok.clone());
        let terminal = matches!(tok.as_str(), "." | "?" | "!");
        if !terminal {
            continue;
        }
        let ends = match tokens.get(i + 1) {
            None => true,
            Some((next, _)) => {
                *space_after && next.chars().next().is_some_and(char::is_uppercase)
            }
        };
        if ends {
            sentences.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
}

/// Tokens paired with whether whitespace follows them.
fn tokenize(text: &str) -> Vec<(String, bool)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out: Vec<(String, bool)> = Vec::new();
    let mut word = String::new();
    let mut i = 0;

    let flush = |word: &mut String, out: &mut Vec<(String, bool)>, space: bool| {
        if !word.is_empty() {
            out.push((std::mem::take(word), space));
        }
    };

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            flush(&mut word, &mut out, true);
            if let Some(last) = out.last_mut() {
                last.1 = true;
            }
            i += 1;
            continue;
        }
        if word.is_empty() {
            if let Some(abbr) = abbreviation_at(&chars, i) {
                out.push((abbr.to_string(), false));
                i += abbr.chars().count();
                continue;
            }
        }
        if c.is_alphanumeric() {
            word.push(c);
            i += 1;
            continue;
        }
        let prev = i.checked_sub(1).map(|p| chars[p]);
        let next = chars.get(i + 1).copied();
        let joins_letters = matches!(c, '-' | '\'' | '’')
            && prev.is_some_and(char::is_alphanumeric)
            && next.is_some_and(char::is_alphanumeric)
            && !word.is_empty();
        let joins_digits = matches!(c, '.' | ',')
            && prev.is_some_and(|p| p.is_ascii_digit())
            && next.is_some_and(|n| n.is_ascii_digit())
            && !word.is_empty();
        if joins_letters || joins_digits {
            word.push(c);
            i += 1;
            continue;
        }
        flush(&mut word, &mut out, false);
        out.push((c.to_string(), false));
        i += 1;
    }
    flush(&mut word, &mut out, false);
    out
}

fn abbreviation_at(chars: &[char], i: usize) -> Option<&'static str> {
    if i > 0 && chars[i - 1].is_alphanumeric() {
        return None;
    }
    ABBREVIATIONS.into_iter().find(|abbr| {
        let n = abbr.chars().count();
        i + n <= chars.len()
            && chars[i..i + n]
                .iter()
                .zip(abbr.chars())
                .all(|(a, b)| a.to_lowercase().eq(b.to_lowercase()))
            && chars.get(i + n).is_none_or(|c| !c.is_alphanumeric())
    })
}

/// Removes the characters in `strip` from every token, then drops empty
/// tokens and sentences that became empty.
pub fn strip_special_chars(sentences: &[Vec<String>], strip: &str) -> Vec<Vec<String>> {
    sentences
        .iter()
        .map(|s| {
            s.iter()
                .map(|t| t.chars().filter(|c| !strip.contains(*c)).collect::<String>())
                .filter(|t| !t.is_empty())
                .collect::<Vec<_>>()
        })
        .filter(|s| !s.is_empty())
        .collect()
}

/// Lexicon + suffix-rule part-of-speech tagger.
///
/// Lookup order: lowercase lexicon hit, then the longest matching suffix
/// rule, then the default tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosTagger {
    pub lexicon: BTreeMap<String, String>,
    pub suffix_rules: Vec<(String, String)>,
    pub default_tag: String,
}

impl Default for PosTagger {
    fn default() -> Self {
        PosTagger::bundled()
    }
}

impl PosTagger {
    pub fn new(
        lexicon: BTreeMap<String, String>,
        suffix_rules: Vec<(String, String)>,
        default_tag: impl Into<String>,
    ) -> Self {
        PosTagger {
            lexicon,
            suffix_rules,
            default_tag: default_tag.into(),
        }
    }

    /// Tagger over the bundled frequency lexicon and suffix rules.
    pub fn bundled() -> Self {
        let lexicon = BUNDLED_LEXICON
            .lines()
            .flat_map(|line| {
                let mut parts = line.split_whitespace();
                let tag = parts.next();
                parts.filter_map(move |w| tag.map(|t| (w.to_string(), t.to_string())))
            })
            .collect();
        let suffix_rules = BUNDLED_SUFFIXES
            .iter()
            .map(|(s, t)| (s.to_string(), t.to_string()))
            .collect();
        PosTagger::new(lexicon, suffix_rules, "NN")
    }

    /// Learns the lexicon (most frequent tag per lowercase word; ties go to
    /// the smaller tag string) from a corpus' POS column, on top of the
    /// bundled tagger. Tokens with an empty POS are ignored.
    pub fn from_corpus(corpus: &Corpus) -> Self {
        let mut counts: HashMap<String, BTreeMap<String, usize>> = HashMap::new();
        for d in &corpus.documents {
            for t in &d.tokens {
                if !t.pos.is_empty() {
                    *counts
                        .entry(t.text.to_lowercase())
                        .or_default()
                        .entry(t.pos.clone())
                        .or_default() += 1;
                }
            }
        }
        let mut tagger = PosTagger::bundled();
        for (word, tags) in counts {
            let best = tags
                .iter()
                .fold(None::<(&String, usize)>, |best, (tag, &n)| match best {
                    Some((_, m)) if m >= n => best,
                    _ => Some((tag, n)),
                })
                .map(|(t, _)| t.clone());
            if let Some(best) = best {
                tagger.lexicon.insert(word, best);
            }
        }
        tagger
    }

    pub fn tag_token(&self, token: &str) -> &str {
        let lower = token.to_lowercase();
        if let Some(t) = self.lexicon.get(&lower) {
            return t;
        }
        self.suffix_rules
            .iter()
            .filter(|(suffix, _)| lower.len() > suffix.len() && lower.ends_with(suffix.as_str()))
            .max_by_key(|(suffix, _)| suffix.len())
            .map(|(_, t)| t.as_str())
            .unwrap_or(&self.default_tag)
    }
}

/// One tag per token.
pub fn pos_tag<S: AsRef<str>>(sentence: &[S], tagger: &PosTagger) -> Vec<String> {
    sentence
        .iter()
        .map(|t| tagger.tag_token(t.as_ref()).to_string())
        .collect()
}

/// Fills empty POS fields of every token in place.
pub fn fill_missing_pos(document: &mut Document, tagger: &PosTagger) {
    for t in &mut document.tokens {
        if t.pos.is_empty() {
            t.pos = tagger.tag_token(&t.text).to_string();
        }
    }
}

/// Full front end: segmentation, stripping, POS tagging. Returns an
/// unannotated document.
pub fn preprocess_text(
    name: &str,
    text: &str,
    strip_chars: &str,
    tagger: &PosTagger,
) -> Document {
    let sentences = strip_special_chars(&segment_and_tokenize(text), strip_chars);
    Document::from_sentences(
        name,
        sentences.into_iter().map(|s| {
            let tags = pos_tag(&s, tagger);
            s.into_iter().zip(tags).collect::<Vec<_>>()
        }),
    )
}

// Longest suffix wins; rules only fire when the word is longer than the suffix.
const BUNDLED_SUFFIXES: &[(&str, &str)] = &[
    ("ing", "VBG"),
    ("ed", "VBD"),
    ("es", "VBZ"),
    ("ies", "NNS"),
    ("ness", "NN"),
    ("ment", "NN"),
    ("ments", "NNS"),
    ("tion", "NN"),
    ("tions", "NNS"),
    ("sion", "NN"),
    ("ity", "NN"),
    ("er", "NN"),
    ("ers", "NNS"),
    ("or", "NN"),
    ("ors", "NNS"),
    ("ist", "NN"),
    ("ant", "NN"),
    ("ance", "NN"),
    ("ence", "NN"),
    ("ly", "RB"),
    ("able", "JJ"),
    ("ible", "JJ"),
    ("al", "JJ"),
    ("ful", "JJ"),
    ("ous", "JJ"),
    ("ive", "JJ"),
    ("less", "JJ"),
    ("ize", "VB"),
    ("ise", "VB"),
    ("izes", "VBZ"),
    ("ises", "VBZ"),
    ("ate", "VB"),
    ("ates", "VBZ"),
    ("fy", "VB"),
    ("fies", "VBZ"),
    ("s", "NNS"),
];

// One line per tag: `TAG word word ...`.
const BUNDLED_LEXICON: &str = "\
DT the a an this that these those each every all both some any no another either neither
IN of in on at by for with from to into onto about after before during within without through over under between against via upon per than whether because although though while since until unless if
CC and or but nor yet
TO to
PRP he she it they we you i him her them us me itself themselves himself herself
PRP$ his its their our your my
WDT which whichever whatever
WP who whom what whoever
WRB when where how why whenever wherever
MD can could may might must shall should will would
RB not then also immediately simultaneously afterwards subsequently finally first next again already always never often usually only just still right away directly otherwise however therefore meanwhile later now soon once instead
EX there
VBZ is has does sends receives checks informs starts asks creates reviews approves rejects submits forwards notifies requests prepares records writes reads calls contacts consults decides completes fills enters updates processes handles takes makes gives gets puts signs pays orders ships delivers arrives comes goes becomes remains needs wants uses verifies validates confirms registers stores archives files retrieves logs opens closes assigns selects sets sorts examines inspects tests evaluates assesses determines calculates performs executes issues returns transfers applies
VBP are have do
VBD was were had did
VB be have do send receive check inform start ask create review approve reject submit forward notify request prepare record write read call contact consult decide complete fill enter update process handle take make give get put sign pay order ship deliver arrive come go become remain need want use verify validate confirm register store archive file retrieve log open close assign select set sort examine inspect test evaluate assess determine calculate perform execute issue return transfer apply
VBN been done sent made given taken approved rejected received completed signed paid
VBG being having doing
JJ new available necessary complete correct incorrect valid invalid missing positive negative final current digital automated responsible relevant additional further other same different several many few
NN process request form customer employee manager clerk staff member department system office application order invoice payment document report case information data item product service account letter email decision approval claim contract file list database team client supplier company time day week
CD one two three four five six seven eight nine ten zero
. . ? !
, ,
: : ;
";

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use crate::corpus::Token;
use crate::error::{Error, Result};

/// Features of one token position: binary string keys plus, when a vector
/// table is supplied, dense embedding values named `emb[i]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TokenFeatures {
    pub keys: Vec<String>,
    pub dense: Vec<f64>,
}

impl TokenFeatures {
    pub fn contains(&self, key: &str) -> bool {
        self.keys.iter().any(|k| k == key)
    }

    /// Every feature as `(name, value)`; binary keys have value 1.
    pub fn iter(&self) -> impl Iterator<Item = (String, f64)> + '_ {
        self.keys
            .iter()
            .map(|k| (k.clone(), 1.0))
            .chain(
                self.dense
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (embedding_key(i), *v)),
            )
    }

    pub fn len(&self) -> usize {
        self.keys.len() + self.dense.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for TokenFeatures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in &self.keys {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            f.write_str(k)?;
        }
        for (i, v) in self.dense.iter().enumerate() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "emb[{i}]={v}")?;
        }
        Ok(())
    }
}

pub fn embedding_key(i: usize) -> String {
    format!("emb[{i}]")
}

/// Static word vectors, one `token v1 v2 ...` per line (GloVe text layout).
#[derive(Clone, Debug, Default)]
pub struct Embeddings {
    dim: usize,
    table: HashMap<String, Vec<f64>>,
}

impl Embeddings {
    pub fn load(path: impl AsRef<Path>) -> Result<Embeddings> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Embeddings::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, origin: &str) -> Result<Embeddings> {
        let mut dim = 0;
        let mut table = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let values = parts
                .map(str::parse::<f64>)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    path: origin.to_string(),
                    line: i + 1,
                    msg: e.to_string(),
                })?;
            if dim == 0 {
                dim = values.len();
            }
            if values.len() != dim || dim == 0 {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    line: i + 1,
                    msg: format!("expected {dim} values, found {}", values.len()),
                });
            }
            table.insert(word.to_lowercase(), values);
        }
        Ok(Embeddings { dim, table })
    }

    pub fn from_table(table: HashMap<String, Vec<f64>>) -> Embeddings {
        let dim = table.values().next().map_or(0, Vec::len);
        Embeddings { dim, table }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Vector for a token (lowercased); out-of-vocabulary and all-zero
    /// vectors yield `None`.
    pub fn lookup(&self, token: &str) -> Option<&[f64]> {
        self.table
            .get(&token.to_lowercase())
            .map(Vec::as_slice)
            .filter(|v| v.iter().any(|x| *x != 0.0))
    }
}

fn is_title(s: &str) -> bool {
    // Cased letters: uppercase after a non-letter, lowercase after a letter.
    let mut prev_cased = false;
    let mut any = false;
    for c in s.chars() {
        if c.is_uppercase() {
            if prev_cased {
                return false;
            }
            prev_cased = true;
            any = true;
        } else if c.is_lowercase() {
            if !prev_cased {
                return false;
            }
            prev_cased = true;
            any = true;
        } else {
            prev_cased = false;
        }
    }
    any
}

fn is_upper(s: &str) -> bool {
    s.chars().any(char::is_uppercase) && !s.chars().any(char::is_lowercase)
}

fn is_digit(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit())
}

fn suffix(s: &str, n: usize) -> String {
    let chars: Vec<char> = s.chars().collect();
    chars[chars.len().saturating_sub(n)..].iter().collect()
}

fn prefix_chars(s: &str, n: usize) -> String {
    s.chars().take(n).collect()
}

/// Feature sequence for one sentence.
///
/// Per token: `bias`, `lower=`, `suffix3=`, `suffix2=`, `isupper`,
/// `istitle`, `isdigit`, `pos=`, `pos2=`; for the neighbors at -1 and +1:
/// `lower=`, `istitle`, `isupper`, `pos=`, `pos2=` with a `-1:`/`+1:`
/// prefix. The first token gets `BOS` and the last `EOS` in place of the
/// missing neighbor. Boolean features are present only when true.
pub fn extract_features(sentence: &[Token], embeddings: Option<&Embeddings>) -> Vec<TokenFeatures> {
    let n = sentence.len();
    (0..n)
        .map(|i| {
            let tok = &sentence[i];
            let word = tok.text.as_str();
            let lower = word.to_lowercase();
            let mut keys = vec![
                "bias".to_string(),
                format!("lower={lower}"),
                format!("suffix3={}", suffix(&lower, 3)),
                format!("suffix2={}", suffix(&lower, 2)),
            ];
            if is_upper(word) {
                keys.push("isupper".into());
            }
            if is_title(word) {
                keys.push("istitle".into());
            }
            if is_digit(word) {
                keys.push("isdigit".into());
            }
            keys.push(format!("pos={}", tok.pos));
            keys.push(format!("pos2={}", prefix_chars(&tok.pos, 2)));

            let window = |keys: &mut Vec<String>, offset: &str, other: &Token| {
                let w = other.text.as_str();
                keys.push(format!("{offset}:lower={}", w.to_lowercase()));
                if is_title(w) {
                    keys.push(format!("{offset}:istitle"));
                }
                if is_upper(w) {
                    keys.push(format!("{offset}:isupper"));
                }
                keys.push(format!("{offset}:pos={}", other.pos));
                keys.push(format!("{offset}:pos2={}", prefix_chars(&other.pos, 2)));
            };
            if i == 0 {
                keys.push("BOS".into());
            } else {
                window(&mut keys, "-1", &sentence[i - 1]);
            }
            if i + 1 == n {
                keys.push("EOS".into());
            } else {
                window(&mut keys, "+1", &sentence[i + 1]);
            }

            let dense = embeddings
                .and_then(|e| e.lookup(word))
                .map(<[f64]>::to_vec)
                .unwrap_or_default();
            TokenFeatures { keys, dense }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn sentence(words: &[&str]) -> Vec<Token> {
        Document::from_sentences(
            "s",
            [words.iter().map(|w| (w.to_string(), "NN".to_string()))],
        )
        .tokens
    }

    #[test]
    fn first_token_features() {
        let f = extract_features(&sentence(&["The", "clerk"]), None);
        for key in ["lower=the", "istitle", "BOS", "+1:lower=clerk", "bias"] {
            assert!(f[0].contains(key), "missing {key}: {}", f[0]);
        }
        assert!(!f[0].contains("EOS"));
        assert!(f[1].contains("EOS"));
        assert!(f[1].contains("-1:istitle"));
    }

    #[test]
    fn single_token_has_both_markers() {
        let f = extract_features(&sentence(&["Approve"]), None);
        assert!(f[0].contains("BOS") && f[0].contains("EOS"));
        assert!(f[0].keys.iter().all(|k| !k.starts_with("-1:") && !k.starts_with("+1:")));
    }

    #[test]
    fn bias_everywhere() {
        let f = extract_features(&sentence(&["a", "b", "c", "d"]), None);
        assert!(f.iter().all(|t| t.contains("bias")));
    }

    #[test]
    fn casing_predicates() {
        assert!(is_title("Clerk"));
        assert!(!is_title("CLERK"));
        assert!(!is_title("clerk"));
        assert!(is_title("E-Mail"));
        assert!(is_upper("XOR"));
        assert!(!is_upper("123"));
        assert!(is_digit("2024"));
    }

    #[test]
    fn embedding_features() {
        let mut table = HashMap::new();
        table.insert("checkout".to_string(), (0..50).map(|i| i as f64 + 1.0).collect());
        table.insert("zero".to_string(), vec![0.0; 50]);
        let e = Embeddings::from_table(table);
        let f = extract_features(&sentence(&["Checkout", "zero", "oov"]), Some(&e));
        assert_eq!(f[0].dense.len(), 50);
        let names: Vec<String> = f[0].iter().map(|(k, _)| k).filter(|k| k.starts_with("emb[")).collect();
        assert_eq!(names.len(), 50);
        assert_eq!(names[49], "emb[49]");
        assert!(f[1].dense.is_empty());
        assert!(f[2].dense.is_empty());
    }

    #[test]
    fn parse_embeddings() {
        let e = Embeddings::parse("a 1 2\nb 3 4\n", "mem").unwrap();
        assert_eq!(e.dim(), 2);
        assert_eq!(e.lookup("A"), Some(&[1.0, 2.0][..]));
        assert!(Embeddings::parse("a 1 2\nb 3\n", "mem").is_err());
    }
}

//! Sentence splitting, tokenization, character stripping and POS tagging of
//! raw text.

use proc2bpmn::preprocess::{preprocess_text, PosTagger, DEFAULT_STRIP_CHARS};

fn main() {
    let text = "The customer's order arrives via e-mail. If it is complete, \
                the clerk (or an assistant) records it; otherwise he calls the customer!";
    let doc = preprocess_text("raw", text, DEFAULT_STRIP_CHARS, &PosTagger::bundled());
    for sentence in doc.sentences() {
        let line: Vec<String> = sentence.iter().map(|t| format!("{}/{}", t.text, t.pos)).collect();
        println!("{}", line.join(" "));
    }
}

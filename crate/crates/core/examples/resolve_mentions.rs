//! Groups coreferent actor and data mentions with the rule cascade.

use anyhow::Result;
use proc2bpmn::corpus::decode_iob;
use proc2bpmn::preprocess::{preprocess_text, PosTagger, DEFAULT_STRIP_CHARS};
use proc2bpmn::resolve::{cluster_mentions, ResolveConfig};

fn main() -> Result<()> {
    let mut doc = preprocess_text(
        "resolve",
        "The sales manager reviews the offer. Then the manager signs the offer. \
         Afterwards she sends it to the customer.",
        DEFAULT_STRIP_CHARS,
        &PosTagger::bundled(),
    );
    // Mentions given as per-sentence IOB tags.
    let tags: Vec<Vec<&str>> = vec![
        vec!["B-Actor", "I-Actor", "I-Actor", "B-Activity", "B-ActivityData", "I-ActivityData", "O"],
        vec!["O", "B-Actor", "I-Actor", "B-Activity", "B-ActivityData", "I-ActivityData", "O"],
        vec!["O", "B-Actor", "B-Activity", "B-ActivityData", "O", "B-Actor", "I-Actor", "O"],
    ];
    let tags = proc2bpmn::corpus::iob::parse_tags(&tags)?;
    doc.set_spans(decode_iob(&tags));

    for (name, cfg) in [
        ("all rules", ResolveConfig::default()),
        (
            "exact text only",
            ResolveConfig {
                head_match: false,
                pronouns: false,
                ..Default::default()
            },
        ),
    ] {
        println!("{name}:");
        for c in cluster_mentions(&doc, &doc.mentions, &cfg) {
            let members: Vec<&str> = c.members.iter().map(|&m| doc.mentions[m].text.as_str()).collect();
            println!(
                "  {:<14} {:<20} {:?}",
                c.entity_type.name(),
                doc.mentions[c.canonical].text,
                members
            );
        }
    }
    Ok(())
}

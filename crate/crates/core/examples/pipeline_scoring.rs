//! Element and relation scores recomputed from per-document counts.

use anyhow::Result;
use proc2bpmn::eval::PipelineScore;

const COUNTS: &str = "\
name,words,eg,ep,ec,rg,rp,rc
Doc 1,104,21,24,20,35,37,19
Doc 2,69,17,18,17,32,31,29
Doc 3,51,12,12,12,20,20,19
Doc 4,36,13,8,8,23,15,11
Doc 5,88,19,18,15,33,31,23
Doc 6,81,21,21,19,29,28,22
";

fn main() -> Result<()> {
    let score = PipelineScore::from_counts_csv(COUNTS)?;
    print!("{score}");
    println!();
    print!("{}", score.to_csv());
    Ok(())
}

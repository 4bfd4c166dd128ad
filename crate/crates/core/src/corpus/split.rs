use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Corpus;
use crate::error::{Error, Result};

/// Document-level k-fold split.
///
/// Documents are shuffled with a seeded ChaCha8 stream and dealt into `k`
/// contiguous folds; the first `n % k` folds get one extra document. Within
/// each returned corpus, documents keep their original corpus order.
pub fn kfold_split(corpus: &Corpus, k: usize, seed: u64) -> Result<Vec<(Corpus, Corpus)>> {
    let n = corpus.len();
    if k == 0 || k > n {
        return Err(Error::FoldCount { k, documents: n });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut fold_of = vec![0usize; n];
    let (base, extra) = (n / k, n % k);
    let mut pos = 0;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        for &doc in &order[pos..pos + size] {
            fold_of[doc] = fold;
        }
        pos += size;
    }

    Ok((0..k)
        .map(|fold| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..n).partition(|&i| fold_of[i] == fold);
            (corpus.select(&train), corpus.select(&test))
        })
        .collect())
}

//! Multilingual corpus sampling with `p(L) ∝ |L|^alpha`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Normalized language probabilities. Empty languages get probability 0.
pub fn language_probabilities(sizes: &[usize], alpha: f64) -> Result<Vec<f64>> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidConfig(format!("alpha must be a non-negative number, got {alpha}")));
    }
    let weights: Vec<f64> = sizes.iter().map(|&n| if n == 0 { 0.0 } else { (n as f64).powf(alpha) }).collect();
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Err(Error::EmptyInput("per-language corpora"));
    }
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Draw `total` (language index, line index) pairs with replacement.
pub fn sample_indices(sizes: &[usize], alpha: f64, total: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    let probs = language_probabilities(sizes, alpha)?;
    let langs = WeightedIndex::new(&probs).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..total)
        .map(|_| {
            let l = langs.sample(&mut rng);
            (l, rng.random_range(0..sizes[l]))
        })
        .collect())
}

/// Sample `total` lines from per-language corpora.
pub fn sample_corpus<S: AsRef<str>>(corpora: &[Vec<S>], alpha: f64, total: usize, seed: u64) -> Result<Vec<&str>> {
    let sizes: Vec<usize> = corpora.iter().map(Vec::len).collect();
    Ok(sample_indices(&sizes, alpha, total, seed)?
        .into_iter()
        .map(|(l, i)| corpora[l][i].as_ref())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn probabilities() {
        assert_eq!(language_probabilities(&[100, 10, 1], 0.0).unwrap(), vec![1.0 / 3.0; 3]);
        let p = language_probabilities(&[100, 10], 1.0).unwrap();
        assert!((p[0] - 100.0 / 110.0).abs() < 1e-15);
        // 100^0.2 / (100^0.2 + 10^0.2)
        let p = language_probabilities(&[100, 10], 0.2).unwrap();
        let a = 100f64.powf(0.2);
        let b = 10f64.powf(0.2);
        assert!((p[0] - a / (a + b)).abs() < 1e-15);
        assert!((p[0] - 0.61314).abs() < 5e-6);
        assert!((p[1] - 0.38686).abs() < 5e-6);
    }

    #[test]
    fn empty_languages_are_never_drawn() {
        let p = language_probabilities(&[0, 5], 0.0).unwrap();
        assert_eq!(p, vec![0.0, 1.0]);
        assert!(language_probabilities(&[0, 0], 0.3).is_err());
        assert!(language_probabilities(&[], 0.3).is_err());
        assert!(language_probabilities(&[3], -1.0).is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let corpora = vec![vec!["a1", "a2"], vec!["b1"]];
        let x = sample_corpus(&corpora, 0.2, 50, 3).unwrap();
        assert_eq!(x, sample_corpus(&corpora, 0.2, 50, 3).unwrap());
        assert_ne!(x, sample_corpus(&corpora, 0.2, 50, 4).unwrap());
        assert!(x.iter().all(|l| ["a1", "a2", "b1"].contains(l)));
    }
}

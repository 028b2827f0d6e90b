//! Reproduction, crossover and mutation.
//!
//! The operators are generic over the gene type where that costs nothing, so
//! they can be exercised on symbolic genomes as well as catalog indices.

use rand::Rng;

use crate::error::{Error, Result};
use crate::network::{DesignVector, PipeCatalog};

/// Roulette-wheel probabilities `p_k = F_k / Σ F_j`.
pub fn selection_probabilities(fitnesses: &[f64]) -> Result<Vec<f64>> {
    if fitnesses.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    if let Some(f) = fitnesses.iter().find(|f| !(**f > 0.0 && f.is_finite())) {
        return Err(Error::Domain(format!(
            "fitness must be positive and finite, got {f}"
        )));
    }
    let total: f64 = fitnesses.iter().sum();
    Ok(fitnesses.iter().map(|f| f / total).collect())
}

/// Draws `population.len()` members with replacement, member `k` with
/// probability `probabilities[k]`.
pub fn reproduce<T: Clone, R: Rng + ?Sized>(
    population: &[T],
    probabilities: &[f64],
    rng: &mut R,
) -> Result<Vec<T>> {
    if population.len() != probabilities.len() {
        return Err(Error::LengthMismatch {
            left: population.len(),
            right: probabilities.len(),
        });
    }
    let cumulative: Vec<f64> = probabilities
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let Some(last_live) = probabilities.iter().rposition(|&p| p > 0.0) else {
        return Err(Error::EmptyPopulation);
    };
    let total = cumulative[last_live];
    Ok((0..population.len())
        .map(|_| {
            let u = rng.random::<f64>() * total;
            // Zero-width slots are never selected; rounding at the top end
            // falls back to the last live slot.
            let k = cumulative.partition_point(|&c| c <= u).min(last_live);
            population[k].clone()
        })
        .collect())
}

/// Children of a single-point crossover cutting before position `cut`.
pub fn crossover_at<G: Clone>(a: &[G], b: &[G], cut: usize) -> (Vec<G>, Vec<G>) {
    let first = a[..cut].iter().chain(&b[cut..]).cloned().collect();
    let second = b[..cut].iter().chain(&a[cut..]).cloned().collect();
    (first, second)
}

/// With probability `p_c` swaps the tails of the parents after a cut drawn
/// uniformly from `1..len`; otherwise returns copies.
pub fn crossover_genes<G: Clone, R: Rng + ?Sized>(
    a: &[G],
    b: &[G],
    p_c: f64,
    rng: &mut R,
) -> Result<(Vec<G>, Vec<G>)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if rng.random_bool(p_c) && a.len() > 1 {
        let cut = rng.random_range(1..a.len());
        Ok(crossover_at(a, b, cut))
    } else {
        Ok((a.to_vec(), b.to_vec()))
    }
}

pub fn crossover<R: Rng + ?Sized>(
    a: &DesignVector,
    b: &DesignVector,
    p_c: f64,
    rng: &mut R,
) -> Result<(DesignVector, DesignVector)> {
    let (x, y) = crossover_genes(a.genes(), b.genes(), p_c, rng)?;
    Ok((x.into(), y.into()))
}

/// Replaces `genes[position]` with a uniformly chosen different value in `0..n_values`.
pub fn replace_gene<R: Rng + ?Sized>(
    genes: &mut [usize],
    position: usize,
    n_values: usize,
    rng: &mut R,
) -> Result<()> {
    if n_values < 2 {
        return Err(Error::NoAlternativeGene(n_values));
    }
    let current = genes[position];
    let pick = rng.random_range(0..n_values - 1);
    genes[position] = if pick >= current { pick + 1 } else { pick };
    Ok(())
}

/// Each gene independently, with probability `p_m`, moves to another of the
/// `n_values` values.
pub fn mutate_genes<R: Rng + ?Sized>(
    genes: &mut [usize],
    p_m: f64,
    n_values: usize,
    rng: &mut R,
) -> Result<()> {
    if n_values < 2 {
        return Err(Error::NoAlternativeGene(n_values));
    }
    for position in 0..genes.len() {
        if rng.random_bool(p_m) {
            replace_gene(genes, position, n_values, rng)?;
        }
    }
    Ok(())
}

pub fn mutate<R: Rng + ?Sized>(
    design: &DesignVector,
    p_m: f64,
    catalog: &PipeCatalog,
    rng: &mut R,
) -> Result<DesignVector> {
    let mut out = design.clone();
    mutate_genes(out.genes_mut(), p_m, catalog.len(), rng)?;
    Ok(out)
}

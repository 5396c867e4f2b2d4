//! Degree and weight sequences, power-law constructions and size-biasing.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Per-vertex degrees, all at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence {
    d: Vec<usize>,
    total: usize,
}

impl DegreeSequence {
    pub fn new(d: Vec<usize>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::Empty("degree sequence"));
        }
        if let Some(v) = d.iter().position(|&x| x == 0) {
            return Err(invalid(format!("vertex {v} has degree 0")));
        }
        let total = d.iter().sum();
        Ok(Self { d, total })
    }

    pub fn regular(n: usize, r: usize) -> Result<Self> {
        Self::new(vec![r; n])
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    /// Total degree `l_n`.
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn has_even_total(&self) -> bool {
        self.total % 2 == 0
    }

    /// Makes the total degree even by incrementing the first vertex.
    pub fn fix_parity(mut self) -> Self {
        if self.total % 2 == 1 {
            self.d[0] += 1;
            self.total += 1;
        }
        self
    }

    pub fn max_degree(&self) -> usize {
        self.d.iter().copied().max().unwrap_or(0)
    }

    /// `sum d(d-1) / sum d`.
    pub fn nu_n<T: Scalar>(&self) -> T {
        nu_of(&self.d).expect("nonempty sequence with positive total")
    }

    /// `n^{-1} sum d_v^k`.
    pub fn empirical_moment<T: Scalar>(&self, k: i32) -> T {
        let sum: T = self.d.iter().map(|&x| T::from_count(x).powi(k)).sum();
        sum / T::from_count(self.d.len())
    }

    /// Empirical degree distribution, indexed by degree.
    pub fn pmf<T: Scalar>(&self) -> Pmf<T> {
        let mut counts = vec![0usize; self.max_degree() + 1];
        for &x in &self.d {
            counts[x] += 1;
        }
        let n = T::from_count(self.d.len());
        Pmf::new(counts.into_iter().map(|c| T::from_count(c) / n).collect()).expect("normalized")
    }

    /// One value per line.
    pub fn write_lines<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        for x in &self.d {
            writeln!(w, "{x}")?;
        }
        Ok(())
    }

    pub fn read_lines<R: std::io::BufRead>(r: R) -> Result<Self> {
        let mut d = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            d.push(t.parse().map_err(|_| Error::Parse { line: i + 1, message: format!("bad degree {t:?}") })?);
        }
        Self::new(d)
    }
}

/// `nu` for a raw degree slice (zeros allowed).
pub fn nu_of<T: Scalar>(d: &[usize]) -> Result<T> {
    let total: usize = d.iter().sum();
    if total == 0 {
        return Err(Error::Empty("degree sequence with positive total"));
    }
    let pairs: usize = d.iter().map(|&x| x * x.saturating_sub(1)).sum();
    Ok(T::from_count(pairs) / T::from_count(total))
}

/// Positive vertex weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSequence<T> {
    w: Vec<T>,
    total: T,
}

impl<T: Scalar> WeightSequence<T> {
    pub fn new(w: Vec<T>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Empty("weight sequence"));
        }
        if let Some(v) = w.iter().position(|&x| !(x > T::zero()) || !x.is_finite()) {
            return Err(invalid(format!("weight of vertex {v} is not a positive finite number")));
        }
        let total = w.iter().copied().sum();
        Ok(Self { w, total })
    }

    pub fn as_slice(&self) -> &[T] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn total(&self) -> T {
        self.total
    }

    pub fn mean(&self) -> T {
        self.total / T::from_count(self.w.len())
    }

    /// `sum w^2 / sum w`.
    pub fn nu(&self) -> T {
        self.w.iter().map(|&x| x * x).sum::<T>() / self.total
    }

    pub fn write_lines<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        for x in &self.w {
            writeln!(out, "{x}")?;
        }
        Ok(())
    }
}

/// Pure power law `[1 - F](w) = (c_F / w)^{tau - 1}` for `w >= c_F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawSpec<T> {
    pub tau: T,
    pub c_f: T,
}

impl<T: Scalar> PowerLawSpec<T> {
    pub fn new(tau: T, c_f: T) -> Result<Self> {
        if !(tau > T::lit(2.0)) {
            return Err(invalid(format!("tau must exceed 2, got {tau}")));
        }
        if !(c_f > T::zero()) {
            return Err(invalid(format!("c_F must be positive, got {c_f}")));
        }
        Ok(Self { tau, c_f })
    }

    /// `1 / (tau - 1)`.
    pub fn alpha(&self) -> T {
        T::one() / (self.tau - T::one())
    }

    /// Inverse of the tail function: `c_F u^{-1/(tau-1)}` for `u in (0, 1]`.
    pub fn tail_quantile(&self, u: T) -> T {
        self.c_f * u.powf(-self.alpha())
    }

    pub fn tail(&self, w: T) -> T {
        if w <= self.c_f {
            T::one()
        } else {
            (self.c_f / w).powf(self.tau - T::one())
        }
    }
}

/// `w_v = c_F (n / v)^{1/(tau-1)}`, `v = 1..n`.
pub fn power_law_weights<T: Scalar>(n: usize, spec: &PowerLawSpec<T>) -> Result<WeightSequence<T>> {
    if n == 0 {
        return Err(Error::Empty("vertex set"));
    }
    let nn = T::from_count(n);
    WeightSequence::new((1..=n).map(|v| spec.tail_quantile(T::from_count(v) / nn)).collect())
}

fn degree_from_quantile<T: Scalar>(x: T) -> usize {
    x.floor().to_usize().unwrap_or(usize::MAX).max(1)
}

/// Deterministic power-law degrees: the weight quantiles floored and clamped
/// at 1, with the parity fix applied.
pub fn quantile_degrees<T: Scalar>(n: usize, spec: &PowerLawSpec<T>) -> Result<DegreeSequence> {
    let w = power_law_weights(n, spec)?;
    Ok(DegreeSequence::new(w.as_slice().iter().map(|&x| degree_from_quantile(x)).collect())?.fix_parity())
}

/// Order statistics of `n` iid power-law variables built from the partial
/// sums of `n + 1` standard exponential increments. Output is descending.
pub fn iid_weights_coupled<T: Scalar>(n: usize, spec: &PowerLawSpec<T>, increments: &[T]) -> Result<Vec<T>> {
    if n == 0 {
        return Err(Error::Empty("vertex set"));
    }
    if increments.len() < n + 1 {
        return Err(invalid(format!("need {} exponential increments, got {}", n + 1, increments.len())));
    }
    let mut partial = Vec::with_capacity(n + 1);
    let mut acc = T::zero();
    for &e in &increments[..=n] {
        acc = acc + e;
        partial.push(acc);
    }
    let last = partial[n];
    Ok(partial[..n].iter().map(|&g| spec.tail_quantile(g / last)).collect())
}

/// Degree version of [`iid_weights_coupled`]: floor, clamp at 1, parity fix.
pub fn iid_degrees_coupled<T: Scalar>(n: usize, spec: &PowerLawSpec<T>, increments: &[T]) -> Result<DegreeSequence> {
    let w = iid_weights_coupled(n, spec, increments)?;
    Ok(DegreeSequence::new(w.into_iter().map(degree_from_quantile).collect())?.fix_parity())
}

pub fn exponential_increments<T: Scalar, R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<T> {
    (0..count).map(|_| T::lit(Exp1.sample(rng))).collect()
}

/// Size-biased reordering of the vertices: each next vertex is drawn with
/// probability proportional to its degree among the remaining ones.
///
/// Sampled with independent exponential clocks of rate `d_v`; the order of
/// the clock rings has exactly the sequential law.
pub fn size_biased_reordering<R: Rng + ?Sized>(d: &DegreeSequence, rng: &mut R) -> Vec<usize> {
    let mut keys: Vec<(f64, usize)> = d
        .as_slice()
        .iter()
        .enumerate()
        .map(|(v, &dv)| {
            let e: f64 = Exp1.sample(rng);
            (e / dv as f64, v)
        })
        .collect();
    keys.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    keys.into_iter().map(|(_, v)| v).collect()
}

/// Probability mass function on `{0, 1, 2, ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pmf<T> {
    p: Vec<T>,
}

impl<T: Scalar> Pmf<T> {
    /// Accepts nonnegative masses summing to 1 within `1e-9`.
    pub fn new(p: Vec<T>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Empty("pmf"));
        }
        if p.iter().any(|&x| x < T::zero() || !x.is_finite()) {
            return Err(invalid("pmf has a negative or non-finite mass"));
        }
        let s: T = p.iter().copied().sum();
        if (s - T::one()).abs() > T::lit(1e-9).max(T::epsilon() * T::lit(64.0)) {
            return Err(invalid(format!("pmf sums to {s}, not 1")));
        }
        Ok(Self { p })
    }

    pub fn point_mass(k: usize) -> Self {
        let mut p = vec![T::zero(); k + 1];
        p[k] = T::one();
        Self { p }
    }

    pub fn masses(&self) -> &[T] {
        &self.p
    }

    pub fn prob(&self, k: usize) -> T {
        self.p.get(k).copied().unwrap_or_else(T::zero)
    }

    pub fn moment(&self, r: i32) -> T {
        self.p.iter().enumerate().map(|(k, &pk)| pk * T::from_count(k).powi(r)).sum()
    }

    pub fn mean(&self) -> T {
        self.moment(1)
    }

    /// `E[D(D-1)] / E[D]`.
    pub fn nu(&self) -> T {
        let fact: T = self.p.iter().enumerate().map(|(k, &pk)| pk * T::from_count(k * k.saturating_sub(1))).sum();
        fact / self.mean()
    }

    /// Probability generating function `E[s^D]`.
    pub fn pgf(&self, s: T) -> T {
        self.p.iter().rev().fold(T::zero(), |acc, &pk| acc * s + pk)
    }

    /// Law of a vertex degree after independent edge retention with
    /// probability `q` per half-edge: `Bin(D, q)`.
    pub fn thinned(&self, q: T) -> Self {
        let mut out = vec![T::zero(); self.p.len()];
        for (k, &pk) in self.p.iter().enumerate() {
            if pk == T::zero() {
                continue;
            }
            let mut coef = T::one();
            for j in 0..=k {
                if j > 0 {
                    coef = coef * T::from_count(k + 1 - j) / T::from_count(j);
                }
                out[j] = out[j] + pk * coef * q.powi(j as i32) * (T::one() - q).powi((k - j) as i32);
            }
        }
        Self { p: out }
    }
}

/// `P(D* = k) = k p_k / E[D]`.
pub fn size_biased_distribution<T: Scalar>(p: &Pmf<T>) -> Result<Pmf<T>> {
    let mean = p.mean();
    if !(mean > T::zero()) {
        return Err(invalid("size-biasing needs a positive mean"));
    }
    Ok(Pmf { p: p.p.iter().enumerate().map(|(k, &pk)| T::from_count(k) * pk / mean).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nu_examples() {
        assert_eq!(DegreeSequence::regular(10, 3).unwrap().nu_n::<f64>(), 2.0);
        assert_eq!(DegreeSequence::regular(10, 1).unwrap().nu_n::<f64>(), 0.0);
        assert_eq!(DegreeSequence::new(vec![3, 2, 2, 1]).unwrap().nu_n::<f64>(), 1.25);
    }

    #[test]
    fn nu_is_permutation_invariant() {
        let a = DegreeSequence::new(vec![5, 1, 2, 7, 3]).unwrap();
        let b = DegreeSequence::new(vec![7, 3, 1, 5, 2]).unwrap();
        assert_eq!(a.nu_n::<f64>(), b.nu_n::<f64>());
    }

    #[test]
    fn rejects_zero_degree_and_empty() {
        assert!(DegreeSequence::new(vec![1, 0]).is_err());
        assert!(matches!(DegreeSequence::new(vec![]), Err(Error::Empty(_))));
    }

    #[test]
    fn power_law_weight_examples() {
        let spec = PowerLawSpec::<f64>::new(3.0, 1.0).unwrap();
        let w = power_law_weights(100, &spec).unwrap();
        assert!((w.as_slice()[0] - 10.0).abs() < 1e-12);
        assert!((w.as_slice()[99] - 1.0).abs() < 1e-12);
        let spec = PowerLawSpec::new(2.5, 1.0).unwrap();
        let w = power_law_weights(16, &spec).unwrap();
        assert!((w.as_slice()[3] - 4f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((w.as_slice()[3] - 2.5198).abs() < 1e-4);
        assert!(w.as_slice().windows(2).all(|p| p[0] >= p[1]));
        let spec = PowerLawSpec::new(3.7, 2.0).unwrap();
        assert_eq!(power_law_weights(9, &spec).unwrap().as_slice()[8], 2.0);
    }

    #[test]
    fn power_law_spec_validation() {
        assert!(PowerLawSpec::new(2.0, 1.0).is_err());
        assert!(PowerLawSpec::new(2.5, 0.0).is_err());
    }

    #[test]
    fn quantile_degree_examples() {
        let spec = PowerLawSpec::new(3.5, 1.0).unwrap();
        let d = quantile_degrees(10, &spec).unwrap();
        // floor(10^{0.4}) = 2, then the parity fix may bump it
        let raw: Vec<usize> = (1..=10).map(|v| ((10.0f64 / v as f64).powf(0.4)).floor().max(1.0) as usize).collect();
        assert_eq!(raw[0], 2);
        let odd = raw.iter().sum::<usize>() % 2 == 1;
        assert_eq!(d.as_slice()[0], if odd { 3 } else { 2 });
        assert_eq!(&d.as_slice()[1..], &raw[1..]);
        assert!(d.has_even_total());

        let light = quantile_degrees(1000, &PowerLawSpec::new(20.0, 1.0).unwrap()).unwrap();
        assert!(light.as_slice()[1..].iter().all(|&x| x == 1));
    }

    #[test]
    fn quantile_degrees_even_and_positive() {
        for n in 1..200 {
            for tau in [2.2, 2.5, 3.5] {
                let d = quantile_degrees(n, &PowerLawSpec::new(tau, 1.3).unwrap()).unwrap();
                assert!(d.has_even_total());
                assert!(d.as_slice().iter().all(|&x| x >= 1));
            }
        }
    }

    #[test]
    fn coupled_degrees_with_unit_increments() {
        let spec = PowerLawSpec::new(3.5, 1.0).unwrap();
        let n = 20;
        let w = iid_weights_coupled(n, &spec, &vec![1.0; n + 1]).unwrap();
        for (i, &x) in w.iter().enumerate() {
            let expect = spec.tail_quantile((i + 1) as f64 / (n + 1) as f64);
            assert!((x - expect).abs() < 1e-12);
        }
        assert!(w.windows(2).all(|p| p[0] >= p[1]));
        let d = iid_degrees_coupled(n, &spec, &vec![1.0; n + 1]).unwrap();
        assert!(d.as_slice()[1..].windows(2).all(|p| p[0] >= p[1]));
        assert!(iid_degrees_coupled(n, &spec, &vec![1.0; n]).is_err());
    }

    #[test]
    fn size_biased_examples() {
        let p = Pmf::<f64>::point_mass(3);
        assert_eq!(size_biased_distribution(&p).unwrap(), p);
        let p = Pmf::new(vec![0.0, 0.5, 0.0, 0.5]).unwrap();
        let q = size_biased_distribution(&p).unwrap();
        assert_eq!(q.masses(), &[0.0, 0.25, 0.0, 0.75]);
        assert!(size_biased_distribution(&Pmf::<f64>::point_mass(0)).is_err());
    }

    #[test]
    fn size_biased_normalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let raw: Vec<f64> = (0..8).map(|_| rng.random::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            let p = Pmf::new(raw.iter().map(|x| x / s).collect()).unwrap();
            let q = size_biased_distribution(&p).unwrap();
            assert!((q.masses().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn moment_examples() {
        assert_eq!(DegreeSequence::regular(5, 2).unwrap().empirical_moment::<f64>(3), 8.0);
        assert_eq!(DegreeSequence::new(vec![1, 3]).unwrap().empirical_moment::<f64>(2), 5.0);
        let d = DegreeSequence::new(vec![4, 1, 6, 2, 2]).unwrap();
        let mut naive = 0.0;
        for &x in d.as_slice() {
            naive += (x * x * x) as f64;
        }
        assert_eq!(d.empirical_moment::<f64>(3), naive / 5.0);
    }

    #[test]
    fn reordering_is_a_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = DegreeSequence::new(vec![3, 1, 4, 1, 5, 9, 2, 6]).unwrap();
        let mut p = size_biased_reordering(&d, &mut rng);
        p.sort_unstable();
        assert_eq!(p, (0..8).collect::<Vec<_>>());
        assert_eq!(size_biased_reordering(&DegreeSequence::new(vec![4]).unwrap(), &mut rng), vec![0]);
    }

    #[test]
    fn reordering_first_pick_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let d = DegreeSequence::new(vec![9, 1]).unwrap();
        let trials = 100_000;
        let hits = (0..trials).filter(|_| size_biased_reordering(&d, &mut rng)[0] == 0).count();
        let sigma = (trials as f64 * 0.9 * 0.1).sqrt();
        assert!((hits as f64 - 0.9 * trials as f64).abs() < 3.0 * sigma, "hits {hits}");
    }

    #[test]
    fn reordering_uniform_for_equal_degrees() {
        // chi-square over the 24 permutations of 4 vertices
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let d = DegreeSequence::regular(4, 2).unwrap();
        let mut counts = std::collections::HashMap::new();
        let trials = 100_000;
        for _ in 0..trials {
            *counts.entry(size_biased_reordering(&d, &mut rng)).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 24);
        let e = trials as f64 / 24.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 23 degrees of freedom, 0.999 quantile is about 49.7
        assert!(chi2 < 49.7, "chi2 {chi2}");
    }

    #[test]
    fn thinned_pmf_mean() {
        let p = Pmf::new(vec![0.0, 0.2, 0.3, 0.5]).unwrap();
        let t = p.thinned(0.4);
        assert!((t.masses().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((t.mean() - 0.4 * p.mean()).abs() < 1e-12);
    }
}

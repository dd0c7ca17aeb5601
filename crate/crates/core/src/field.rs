//! Shift-invariant random fields on Z², realized lazily.
//!
//! A field is never materialized. The value at a site is a pure function of
//! the generator's seed and the site, through the counter-based hash in
//! [`crate::hash`], so reading a window anywhere on the lattice costs the
//! same and a whole orbit needs no storage. Three generator classes are
//! provided:
//!
//! * `Iid`: independent sites, inverse-CDF of a hashed uniform.
//! * `BlockFactor`: a finite-range function of an iid latent field. Such
//!   fields are tail-trivial, hence strongly mixing under shifts, yet nearby
//!   sites are correlated.
//! * `PhaseCheckerboard`: a periodic pattern with one uniformly random
//!   phase. Shift-invariant but not mixing; used as a negative control.
//!
//! Finite-window marginals are computed exactly by enumerating the latent
//! configurations, so with rational latent probabilities every marginal is
//! an exact rational.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};
use crate::hash::{hash_words, site_hash, split_seed};
use crate::lattice::Window;
use crate::scalar::Scalar;
use crate::site::Site;

/// Largest latent support enumerated by [`marginal_exact`].
pub const ENUMERATION_SITES: usize = 24;
/// Largest number of configurations (latent assignments or table cells)
/// enumerated by [`marginal_exact`].
pub const ENUMERATION_CONFIGS: u64 = 1 << 24;

/// Finite symbol set; symbol `i` carries the numeric value `values[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Alphabet {
    values: Vec<Scalar>,
}

impl Alphabet {
    pub fn new(values: Vec<Scalar>) -> Result<Alphabet> {
        if values.len() < 2 {
            return invalid("an alphabet needs at least two symbols");
        }
        Ok(Alphabet { values })
    }

    /// `{0, 1}` with values 0 and 1.
    pub fn binary() -> Alphabet {
        Self::integers(2)
    }

    /// `{0, …, k − 1}` with value `i` for symbol `i`.
    pub fn integers(k: usize) -> Alphabet {
        Alphabet {
            values: (0..k as i64).map(Scalar::int).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self, symbol: usize) -> &Scalar {
        &self.values[symbol]
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }
}

/// A probability vector over symbols `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<Scalar>,
    // cumulative thresholds on the 53-bit uniform scale; the last is 2^53
    thresholds: Vec<u64>,
}

impl Distribution {
    pub fn new(probs: Vec<Scalar>) -> Result<Distribution> {
        if probs.is_empty() {
            return invalid("empty distribution");
        }
        if probs.iter().any(|p| p.to_f64() < 0.0 || !p.to_f64().is_finite()) {
            return invalid("probabilities must be nonnegative and finite");
        }
        let total: Scalar = probs.iter().cloned().sum();
        let ok = match &total {
            Scalar::Exact(r) => *r == BigRational::from_integer(1.into()),
            Scalar::Approx(v) => (v - 1.0).abs() <= 1e-12,
        };
        if !ok {
            return invalid(format!("probabilities sum to {total}, not 1"));
        }
        let scale = BigRational::from_integer(BigInt::from(1u64 << 53));
        let mut acc = Scalar::zero();
        let mut thresholds = Vec::with_capacity(probs.len());
        for p in &probs {
            acc = acc + p;
            let thr = match &acc {
                Scalar::Exact(r) => (r * &scale).floor().to_integer().to_u64().unwrap_or(1 << 53),
                Scalar::Approx(v) => (v * (1u64 << 53) as f64).floor() as u64,
            };
            thresholds.push(thr.min(1 << 53));
        }
        *thresholds.last_mut().unwrap() = 1 << 53;
        Ok(Distribution { probs, thresholds })
    }

    /// `P(1) = p`, `P(0) = 1 − p`.
    pub fn bernoulli(p: Scalar) -> Result<Distribution> {
        Self::new(vec![Scalar::one() - &p, p])
    }

    pub fn probs(&self) -> &[Scalar] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn sample(&self, h: u64) -> usize {
        let u = h >> 11;
        self.thresholds.iter().position(|&t| u < t).unwrap_or(self.probs.len() - 1)
    }
}

/// Map from the latent values on a stencil to an output symbol.
#[derive(Debug, Clone, PartialEq)]
pub enum BlockMap {
    /// Largest latent index, e.g. OR of latent bits.
    Max,
    Min,
    /// Sum of latent indices modulo the alphabet size.
    SumMod,
    /// Explicit table indexed in mixed radix, first stencil site least
    /// significant.
    Table(Vec<usize>),
}

impl BlockMap {
    #[inline]
    fn apply(&self, latent: impl Iterator<Item = usize>, latent_card: usize, out_card: usize) -> usize {
        match self {
            BlockMap::Max => latent.max().unwrap_or(0),
            BlockMap::Min => latent.min().unwrap_or(0),
            BlockMap::SumMod => latent.sum::<usize>() % out_card,
            BlockMap::Table(t) => {
                let (mut idx, mut mul) = (0usize, 1usize);
                for v in latent {
                    idx += v * mul;
                    mul *= latent_card;
                }
                t[idx]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    Iid(Distribution),
    BlockFactor {
        latent: Distribution,
        stencil: Vec<Site>,
        map: BlockMap,
    },
    /// Site `j` shows `pattern[(j.x + j.y + φ) mod period]` with one phase φ
    /// drawn uniformly from the seed.
    PhaseCheckerboard { pattern: Vec<usize> },
}

/// A seeded, immutable random field on Z².
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGenerator {
    alphabet: Alphabet,
    kind: FieldKind,
    seed: u64,
}

impl FieldGenerator {
    pub fn new(alphabet: Alphabet, kind: FieldKind, seed: u64) -> Result<FieldGenerator> {
        let k = alphabet.len();
        match &kind {
            FieldKind::Iid(d) if d.len() != k => {
                return invalid(format!("iid distribution has {} entries for {k} symbols", d.len()))
            }
            FieldKind::BlockFactor { latent, stencil, map } => {
                if stencil.is_empty() {
                    return invalid("block-factor stencil is empty");
                }
                Window::new(stencil.clone())?;
                let l = latent.len();
                match map {
                    BlockMap::Max | BlockMap::Min if l > k => {
                        return invalid(format!("{l} latent symbols do not fit an alphabet of {k}"));
                    }
                    BlockMap::Table(t) => {
                        let cells = (l as u64).checked_pow(stencil.len() as u32);
                        if cells != Some(t.len() as u64) {
                            return invalid(format!("block map table needs {l}^{} entries", stencil.len()));
                        }
                        if t.iter().any(|&s| s >= k) {
                            return invalid("block map table refers to an unknown symbol");
                        }
                    }
                    _ => {}
                }
            }
            FieldKind::PhaseCheckerboard { pattern } => {
                if pattern.len() < 2 {
                    return invalid("checkerboard period must be at least 2");
                }
                if pattern.iter().any(|&s| s >= k) {
                    return invalid("checkerboard pattern refers to an unknown symbol");
                }
            }
            _ => {}
        }
        Ok(FieldGenerator { alphabet, kind, seed })
    }

    /// Fair-coin or biased iid bits.
    pub fn iid_bernoulli(p: Scalar, seed: u64) -> Result<FieldGenerator> {
        Self::new(Alphabet::binary(), FieldKind::Iid(Distribution::bernoulli(p)?), seed)
    }

    /// `ω(j) = max(ε(j), ε(j + (1,1)))` over iid Bernoulli(`p`) latent bits.
    pub fn or_field(p: Scalar, seed: u64) -> Result<FieldGenerator> {
        Self::new(
            Alphabet::binary(),
            FieldKind::BlockFactor {
                latent: Distribution::bernoulli(p)?,
                stencil: vec![Site::new(0, 0), Site::new(1, 1)],
                map: BlockMap::Max,
            },
            seed,
        )
    }

    /// Period-2 checkerboard of zeros and ones with a random phase.
    pub fn checkerboard(seed: u64) -> FieldGenerator {
        Self::new(Alphabet::binary(), FieldKind::PhaseCheckerboard { pattern: vec![0, 1] }, seed).unwrap()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> FieldGenerator {
        FieldGenerator { seed, ..self.clone() }
    }

    /// Tail-trivial generator classes (iid and block factors).
    pub fn is_mixing(&self) -> bool {
        !matches!(self.kind, FieldKind::PhaseCheckerboard { .. })
    }

    /// Phase of a checkerboard realization.
    pub fn phase(&self) -> Option<usize> {
        match &self.kind {
            FieldKind::PhaseCheckerboard { pattern } => Some((hash_words(&[self.seed]) % pattern.len() as u64) as usize),
            _ => None,
        }
    }

    #[inline]
    pub fn sample_site(&self, j: Site) -> usize {
        match &self.kind {
            FieldKind::Iid(d) => d.sample(site_hash(self.seed, j.x, j.y)),
            FieldKind::BlockFactor { latent, stencil, map } => {
                let values = stencil.iter().map(|w| latent.sample(site_hash(self.seed, j.x + w.x, j.y + w.y)));
                map.apply(values, latent.len(), self.alphabet.len())
            }
            FieldKind::PhaseCheckerboard { pattern } => {
                let period = pattern.len() as i64;
                let phase = (hash_words(&[self.seed]) % period as u64) as i64;
                pattern[(j.x + j.y + phase).rem_euclid(period) as usize]
            }
        }
    }
}

/// A basis `(v₁, v₂)` of the shift group; `θ_k` reads the field at
/// `j + k⁽¹⁾v₁ + k⁽²⁾v₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftBasis {
    pub v1: Site,
    pub v2: Site,
}

impl ShiftBasis {
    pub fn new(v1: Site, v2: Site) -> Result<ShiftBasis> {
        if v1.x * v2.y - v1.y * v2.x == 0 {
            return invalid(format!("shift vectors {v1} and {v2} are linearly dependent"));
        }
        Ok(ShiftBasis { v1, v2 })
    }

    pub fn axis() -> ShiftBasis {
        ShiftBasis {
            v1: Site::new(1, 0),
            v2: Site::new(0, 1),
        }
    }

    /// `k⁽¹⁾v₁ + k⁽²⁾v₂`.
    #[inline]
    pub fn displacement(&self, k: Site) -> Site {
        k.x * self.v1 + k.y * self.v2
    }
}

impl Default for ShiftBasis {
    fn default() -> Self {
        Self::axis()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftIndex {
    pub k: Site,
    pub basis: ShiftBasis,
}

impl ShiftIndex {
    pub fn axis(k: Site) -> ShiftIndex {
        ShiftIndex {
            k,
            basis: ShiftBasis::axis(),
        }
    }
}

/// The site that `θ_k ω` reads at `j`.
pub fn shifted_site(k: &ShiftIndex, j: Site) -> Site {
    j + k.basis.displacement(k.k)
}

/// Joint law of `(ω(u))_{u ∈ U}`; cell index is `Σ y_u · |Υ|^u`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalTable {
    window: Window,
    card: usize,
    probs: Vec<Scalar>,
}

impl MarginalTable {
    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn shape(&self) -> Window {
        self.window.canonical()
    }

    pub fn probs(&self) -> &[Scalar] {
        &self.probs
    }

    pub fn card(&self) -> usize {
        self.card
    }

    pub fn index(&self, symbols: &[usize]) -> usize {
        symbols.iter().rev().fold(0, |acc, &s| acc * self.card + s)
    }

    pub fn prob(&self, symbols: &[usize]) -> &Scalar {
        &self.probs[self.index(symbols)]
    }

    pub fn symbols(&self, mut index: usize) -> Vec<usize> {
        (0..self.window.len())
            .map(|_| {
                let s = index % self.card;
                index /= self.card;
                s
            })
            .collect()
    }

    pub fn total(&self) -> Scalar {
        self.probs.iter().cloned().sum()
    }

    /// `Σ_y f(y) P_U(y)`.
    pub fn expectation(&self, f: impl Fn(&[usize]) -> Scalar) -> Scalar {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| p * &f(&self.symbols(i)))
            .sum()
    }
}

fn table_cells(card: usize, m: usize) -> Result<usize> {
    match (card as u64).checked_pow(m as u32) {
        Some(c) if c <= ENUMERATION_CONFIGS => Ok(c as usize),
        _ => Err(Error::EnumerationBudget {
            detail: format!("table over {card}^{m} cells exceeds {ENUMERATION_CONFIGS}"),
        }),
    }
}

/// Exact distribution of the field on `window` by enumeration.
pub fn marginal_exact(gen: &FieldGenerator, window: &Window) -> Result<MarginalTable> {
    let card = gen.alphabet.len();
    let m = window.len();
    let cells = table_cells(card, m)?;
    let probs = match &gen.kind {
        FieldKind::Iid(d) => (0..cells)
            .map(|mut idx| {
                let mut p = Scalar::one();
                for _ in 0..m {
                    p = p * &d.probs()[idx % card];
                    idx /= card;
                }
                p
            })
            .collect(),
        FieldKind::BlockFactor { latent, stencil, map } => block_factor_marginal(latent, stencil, map, card, window, cells)?,
        FieldKind::PhaseCheckerboard { pattern } => {
            let period = pattern.len() as i64;
            let weight = Scalar::ratio(1, period);
            let mut probs = vec![Scalar::zero(); cells];
            for phase in 0..period {
                let idx = window
                    .points()
                    .iter()
                    .rev()
                    .fold(0, |acc, u| acc * card + pattern[(u.x + u.y + phase).rem_euclid(period) as usize]);
                probs[idx] = &probs[idx] + &weight;
            }
            probs
        }
    };
    Ok(MarginalTable {
        window: window.clone(),
        card,
        probs,
    })
}

fn block_factor_marginal(
    latent: &Distribution,
    stencil: &[Site],
    map: &BlockMap,
    card: usize,
    window: &Window,
    cells: usize,
) -> Result<Vec<Scalar>> {
    let mut support: Vec<Site> = window
        .points()
        .iter()
        .flat_map(|u| stencil.iter().map(move |w| *u + *w))
        .collect();
    support.sort_unstable();
    support.dedup();
    let l = latent.len();
    let configs = (l as u64).checked_pow(support.len() as u32);
    if support.len() > ENUMERATION_SITES || configs.is_none_or(|c| c > ENUMERATION_CONFIGS) {
        return Err(Error::EnumerationBudget {
            detail: format!("latent support of {} sites over {l} symbols", support.len()),
        });
    }
    // positions of u + w in the support, per window site
    let reads: Vec<Vec<usize>> = window
        .points()
        .iter()
        .map(|u| stencil.iter().map(|w| support.binary_search(&(*u + *w)).unwrap()).collect())
        .collect();
    let n = support.len();
    let radix = n + 1;
    // (output cell, latent symbol counts in base n+1) → number of assignments;
    // the weight of an assignment depends on its counts only
    let mut counts: HashMap<(usize, u64), u64> = HashMap::new();
    let mut assign = vec![0usize; n];
    loop {
        let mut cell = 0usize;
        for r in reads.iter().rev() {
            cell = cell * card + map.apply(r.iter().map(|&i| assign[i]), l, card);
        }
        let mut key = 0u64;
        let mut hist = vec![0u64; l];
        for &a in &assign {
            hist[a] += 1;
        }
        for &h in hist.iter().rev() {
            key = key * radix as u64 + h;
        }
        *counts.entry((cell, key)).or_insert(0) += 1;
        // odometer
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(weights(counts, latent, radix, cells));
            }
            assign[pos] += 1;
            if assign[pos] < l {
                break;
            }
            assign[pos] = 0;
            pos += 1;
        }
    }
}

fn weights(counts: HashMap<(usize, u64), u64>, latent: &Distribution, radix: usize, cells: usize) -> Vec<Scalar> {
    let mut entries: Vec<_> = counts.into_iter().collect();
    entries.sort_unstable();
    let mut probs = vec![Scalar::zero(); cells];
    for ((cell, mut key), count) in entries {
        let mut w = Scalar::int(count as i64);
        for p in latent.probs() {
            let c = key % radix as u64;
            key /= radix as u64;
            for _ in 0..c {
                w = w * p;
            }
        }
        if matches!(w, Scalar::Exact(ref r) if r.is_zero()) {
            continue;
        }
        probs[cell] = &probs[cell] + &w;
    }
    probs
}

/// Empirical table from `samples` independent realizations, replicate `r`
/// using seed `split_seed(master_seed, r)`.
pub fn marginal_mc(gen: &FieldGenerator, window: &Window, samples: u64, master_seed: u64) -> Result<MarginalTable> {
    if samples == 0 {
        return invalid("marginal_mc needs at least one sample");
    }
    let card = gen.alphabet.len();
    let cells = table_cells(card, window.len())?;
    let mut counts = vec![0u64; cells];
    for r in 0..samples {
        let g = gen.with_seed(split_seed(master_seed, r));
        let idx = window.points().iter().rev().fold(0, |acc, u| acc * card + g.sample_site(*u));
        counts[idx] += 1;
    }
    Ok(MarginalTable {
        window: window.clone(),
        card,
        probs: counts.into_iter().map(|c| Scalar::Approx(c as f64 / samples as f64)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{flat_pair, step_pair};

    fn or_field() -> FieldGenerator {
        FieldGenerator::or_field(Scalar::ratio(1, 4), 7).unwrap()
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = or_field();
        for x in -5..5 {
            assert_eq!(g.sample_site(Site::new(x, 3 * x)), g.sample_site(Site::new(x, 3 * x)));
        }
    }

    #[test]
    fn fair_bits_have_fair_frequency() {
        let g = FieldGenerator::iid_bernoulli(Scalar::ratio(1, 2), 11).unwrap();
        let ones: usize = (0..1000).flat_map(|x| (0..1000).map(move |y| Site::new(x, y))).map(|j| g.sample_site(j)).sum();
        assert!((ones as f64 / 1e6 - 0.5).abs() <= 0.002);
    }

    #[test]
    fn or_field_single_site_marginal() {
        let t = marginal_exact(&or_field(), &Window::new(vec![Site::ORIGIN]).unwrap()).unwrap();
        assert_eq!(t.prob(&[1]), &Scalar::ratio(7, 16));
        let g = or_field();
        let ones: usize = (0..1000).flat_map(|x| (0..1000).map(move |y| Site::new(x, y))).map(|j| g.sample_site(j)).sum();
        // 4σ for a correlated field is loose; σ ≈ 0.0005 · sqrt(3)
        assert!((ones as f64 / 1e6 - 7.0 / 16.0).abs() <= 0.004);
    }

    #[test]
    fn or_field_step_and_flat_tables() {
        let g = or_field();
        let step = marginal_exact(&g, &step_pair()).unwrap();
        assert_eq!(step.prob(&[1, 1]), &Scalar::ratio(19, 64));
        assert_eq!(step.prob(&[0, 0]), &Scalar::ratio(27, 64));
        assert_eq!(step.prob(&[1, 0]), &Scalar::ratio(9, 64));
        assert_eq!(step.prob(&[0, 1]), &Scalar::ratio(9, 64));
        let flat = marginal_exact(&g, &flat_pair()).unwrap();
        assert_eq!(flat.prob(&[1, 1]), &Scalar::ratio(49, 256));
        assert_ne!(step.prob(&[1, 1]), flat.prob(&[1, 1]));
        assert_eq!(flat.total(), Scalar::one());
    }

    #[test]
    fn iid_table_is_product() {
        let g = FieldGenerator::iid_bernoulli(Scalar::ratio(1, 3), 0).unwrap();
        let t = marginal_exact(&g, &Window::new(vec![Site::new(4, 1), Site::new(-2, 0)]).unwrap()).unwrap();
        assert_eq!(t.prob(&[1, 1]), &Scalar::ratio(1, 9));
        assert_eq!(t.prob(&[1, 0]), &Scalar::ratio(2, 9));
        assert_eq!(t.prob(&[0, 0]), &Scalar::ratio(4, 9));
    }

    #[test]
    fn checkerboard_marginals() {
        let g = FieldGenerator::checkerboard(3);
        let single = marginal_exact(&g, &Window::new(vec![Site::ORIGIN]).unwrap()).unwrap();
        assert_eq!(single.probs(), &[Scalar::ratio(1, 2), Scalar::ratio(1, 2)]);
        let pair = marginal_exact(&g, &flat_pair()).unwrap();
        assert!(pair.prob(&[1, 1]).is_zero());
        let mc = marginal_mc(&g, &Window::new(vec![Site::ORIGIN]).unwrap(), 4000, 1).unwrap();
        assert!((mc.prob(&[1]).to_f64() - 0.5).abs() < 4.0 * (0.25f64 / 4000.0).sqrt());
    }

    #[test]
    fn marginal_mc_agrees_with_exact_for_iid() {
        let g = FieldGenerator::iid_bernoulli(Scalar::ratio(1, 4), 0).unwrap();
        let w = step_pair();
        let samples = 40_000;
        let exact = marginal_exact(&g, &w).unwrap();
        let mc = marginal_mc(&g, &w, samples, 99).unwrap();
        for (e, m) in exact.probs().iter().zip(mc.probs()) {
            let p = e.to_f64();
            assert!((p - m.to_f64()).abs() <= 4.0 * (p * (1.0 - p) / samples as f64).sqrt());
        }
        assert!(marginal_mc(&g, &w, 0, 1).is_err());
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        let g = or_field();
        let wide = Window::new((0..13).map(|x| Site::new(3 * x, 0)).collect()).unwrap();
        assert!(matches!(marginal_exact(&g, &wide), Err(Error::EnumerationBudget { .. })));
    }

    #[test]
    fn shift_group_law() {
        let basis = ShiftBasis::new(Site::new(1, 1), Site::new(0, 1)).unwrap();
        let k = ShiftIndex { k: Site::new(1, 2), basis };
        assert_eq!(shifted_site(&k, Site::new(3, 3)), Site::new(4, 6));
        assert_eq!(shifted_site(&ShiftIndex::axis(Site::ORIGIN), Site::new(5, -2)), Site::new(5, -2));
        assert_eq!(shifted_site(&ShiftIndex::axis(Site::new(2, 1)), Site::ORIGIN), Site::new(2, 1));
        assert!(ShiftBasis::new(Site::new(1, 2), Site::new(2, 4)).is_err());
    }

    #[test]
    fn generator_validation() {
        let d = Distribution::bernoulli(Scalar::ratio(1, 2)).unwrap();
        assert!(FieldGenerator::new(Alphabet::integers(3), FieldKind::Iid(d.clone()), 0).is_err());
        assert!(Distribution::new(vec![Scalar::ratio(1, 2), Scalar::ratio(1, 3)]).is_err());
        assert!(Alphabet::new(vec![Scalar::one()]).is_err());
        let bad_table = FieldKind::BlockFactor {
            latent: d,
            stencil: vec![Site::ORIGIN, Site::new(1, 0)],
            map: BlockMap::Table(vec![0, 1, 1]),
        };
        assert!(FieldGenerator::new(Alphabet::binary(), bad_table, 0).is_err());
    }

    #[test]
    fn distribution_sampling_hits_every_symbol_in_proportion() {
        let d = Distribution::new(vec![Scalar::ratio(1, 4), Scalar::ratio(1, 2), Scalar::ratio(1, 4)]).unwrap();
        assert_eq!(d.sample(0), 0);
        assert_eq!(d.sample((1u64 << 62) - 1), 0);
        assert_eq!(d.sample(1u64 << 62), 1);
        assert_eq!(d.sample(u64::MAX), 2);
    }
}

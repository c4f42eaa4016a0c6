use crate::beliefs::DirichletBelief;
use crate::error::{check_index, invalid, Result, TmdpError};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BloomParams {
    /// Distinct keys each filter is sized for.
    pub capacity: usize,
    pub hashes: u32,
    /// False-positive rate targeted at `capacity` keys.
    pub fp_rate: f64,
    pub seed: u64,
}

impl Default for BloomParams {
    fn default() -> Self {
        Self {
            capacity: 100_000,
            hashes: 4,
            fp_rate: 0.01,
            seed: 0x7f4a_7c15_9e37_79b9,
        }
    }
}

impl BloomParams {
    pub fn validate(&self) -> Result<()> {
        if self.capacity == 0 {
            return Err(invalid("bloom.capacity", "must be positive"));
        }
        if self.hashes == 0 {
            return Err(invalid("bloom.hashes", "must be positive"));
        }
        if !(self.fp_rate > 0.0 && self.fp_rate < 1.0) {
            return Err(invalid("bloom.fp_rate", format!("{} not in (0, 1)", self.fp_rate)));
        }
        Ok(())
    }

    /// Counter count giving `fp_rate` at `capacity` keys with a fixed number
    /// of hashes: `m = -k n / ln(1 - p^(1/k))`.
    pub fn counters(&self) -> usize {
        let k = f64::from(self.hashes);
        let n = self.capacity as f64;
        let m = -k * n / (1.0 - self.fp_rate.powf(1.0 / k)).ln();
        (m.ceil() as usize).max(1)
    }
}

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Counting bloom filter over `u64` keys with saturating `u32` counters.
///
/// Estimates take the minimum over the key's counters, so they may
/// overcount on collisions but never undercount.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingBloomFilter {
    counters: Vec<u32>,
    hashes: u32,
    seed: u64,
}

impl CountingBloomFilter {
    pub fn new(params: &BloomParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            counters: vec![0; params.counters()],
            hashes: params.hashes,
            seed: params.seed,
        })
    }

    fn positions(&self, key: u64) -> impl Iterator<Item = usize> + '_ {
        // double hashing, platform independent
        let h1 = splitmix64(key ^ self.seed);
        let h2 = splitmix64(h1) | 1;
        let m = self.counters.len() as u64;
        (0..u64::from(self.hashes)).map(move |i| (h1.wrapping_add(i.wrapping_mul(h2)) % m) as usize)
    }

    pub fn insert(&mut self, key: u64) {
        let idx: Vec<usize> = self.positions(key).collect();
        for i in idx {
            self.counters[i] = self.counters[i].saturating_add(1);
        }
    }

    pub fn estimate(&self, key: u64) -> u32 {
        self.positions(key).map(|i| self.counters[i]).min().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counters.is_empty()
    }

    fn to_hex(&self) -> String {
        let bytes: Vec<u8> = self.counters.iter().flat_map(|c| c.to_le_bytes()).collect();
        hex::encode(bytes)
    }

    fn fill_from_hex(&mut self, text: &str) -> Result<()> {
        let bytes = hex::decode(text).map_err(|e| TmdpError::Snapshot(format!("filter hex: {e}")))?;
        if bytes.len() != self.counters.len() * 4 {
            return Err(TmdpError::Snapshot(format!(
                "filter has {} bytes, expected {}",
                bytes.len(),
                self.counters.len() * 4
            )));
        }
        for (c, chunk) in self.counters.iter_mut().zip(bytes.chunks_exact(4)) {
            *c = u32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]);
        }
        Ok(())
    }
}

/// `p(b | s) ∝ p(s | b) p(b)` with one counting bloom filter per opponent
/// action holding state-visit counts, plus a Dirichlet marginal over actions.
#[derive(Debug, Clone, PartialEq)]
pub struct BloomConditionalModel<S> {
    filters: Vec<CountingBloomFilter>,
    marginal: DirichletBelief<S>,
    params: BloomParams,
    prior_pseudocount: S,
}

impl<S: Scalar> BloomConditionalModel<S> {
    pub fn new(n_opp_actions: usize, params: BloomParams, marginal_prior: S, prior_pseudocount: S) -> Result<Self> {
        if !(prior_pseudocount >= S::zero()) {
            return Err(invalid("bloom.prior_pseudocount", "must be nonnegative"));
        }
        let filter = CountingBloomFilter::new(&params)?;
        Ok(Self {
            filters: vec![filter; n_opp_actions],
            marginal: DirichletBelief::symmetric(n_opp_actions, marginal_prior, S::one())?,
            params,
            prior_pseudocount,
        })
    }

    pub fn params(&self) -> &BloomParams {
        &self.params
    }

    pub fn marginal(&self) -> &DirichletBelief<S> {
        &self.marginal
    }

    pub fn prior_pseudocount(&self) -> S {
        self.prior_pseudocount
    }

    pub fn n_opp_actions(&self) -> usize {
        self.filters.len()
    }

    /// Count `(s, b)` in b's filter and `b` in the marginal.
    pub fn update(&mut self, s: usize, b: usize) -> Result<()> {
        check_index("opponent action", b, self.filters.len())?;
        self.filters[b].insert(s as u64);
        self.marginal.observe(b)
    }

    /// Approximate number of times `s` was seen together with `b`.
    pub fn approx_count(&self, s: usize, b: usize) -> Result<u32> {
        check_index("opponent action", b, self.filters.len())?;
        Ok(self.filters[b].estimate(s as u64))
    }

    /// Normalized `[approx_count(s|b) + prior] · p(b)`; falls back to the
    /// marginal predictive when every numerator is zero.
    pub fn conditional_predictive(&self, s: usize) -> Result<Vec<S>> {
        let marginal = self.marginal.predictive()?;
        let counts: Vec<u32> = self.filters.iter().map(|f| f.estimate(s as u64)).collect();
        Ok(bayes_combine(&counts, &marginal, self.prior_pseudocount))
    }

    pub(crate) fn to_entries(&self) -> Vec<(String, String)> {
        let mut out = vec![
            ("capacity".into(), self.params.capacity.to_string()),
            ("hashes".into(), self.params.hashes.to_string()),
            ("fp_rate".into(), self.params.fp_rate.to_string()),
            ("seed".into(), self.params.seed.to_string()),
            ("prior_pseudocount".into(), self.prior_pseudocount.as_f64().to_string()),
            ("marginal".into(), self.marginal.encode()),
        ];
        for (j, f) in self.filters.iter().enumerate() {
            out.push((format!("filter.{j}"), f.to_hex()));
        }
        out
    }

    pub(crate) fn from_entries(kv: &crate::snapshot::KeyValues) -> Result<Self> {
        let params = BloomParams {
            capacity: kv.value("capacity")?,
            hashes: kv.value("hashes")?,
            fp_rate: kv.value("fp_rate")?,
            seed: kv.value("seed")?,
        };
        let marginal = DirichletBelief::decode(kv.get("marginal")?)?;
        let prior = crate::snapshot::parse_real(kv.get("prior_pseudocount")?)?;
        let mut model = Self::new(marginal.len(), params, S::one(), prior)?;
        model.marginal = marginal;
        for (j, f) in model.filters.iter_mut().enumerate() {
            f.fill_from_hex(kv.get(&format!("filter.{j}"))?)?;
        }
        Ok(model)
    }
}

/// The Bayes combination shared by the bloom model and any exact-count
/// reference: `∝ (count_j + prior) · marginal_j`.
pub(crate) fn bayes_combine<S: Scalar>(counts: &[u32], marginal: &[S], prior: S) -> Vec<S> {
    let num: Vec<S> = counts
        .iter()
        .zip(marginal)
        .map(|(&c, &m)| (S::lit(f64::from(c)) + prior) * m)
        .collect();
    let total: S = num.iter().copied().sum();
    if total > S::zero() {
        num.into_iter().map(|x| x / total).collect()
    } else {
        marginal.to_vec()
    }
}

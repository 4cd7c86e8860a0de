//! Near-duplicate elimination: dedup-only canonicalization, word
//! shingling, MinHash signatures, LSH banding, duplicate clustering, and
//! restoration of the untouched original text for every retained
//! document.
//!
//! The canonical form exists solely for matching. Two price messages that
//! differ only in numerals or weekday names collapse to the same shingle
//! set, one of them is retained, and it keeps its own numbers.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::LazyLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charnorm::normalize_whitespace;
use crate::corpus::Document;
use crate::text::ZWNJ;

const GOLDEN: u64 = 0x9E3779B97F4A7C15;

pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// How candidate edges are confirmed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DedupMode {
    /// Any band collision is an edge; pair it with number/weekday
    /// canonicalization.
    #[default]
    Canonical,
    /// A band collision is only an edge when the estimated similarity
    /// reaches `exact_similarity_min`; text passes through with only
    /// whitespace normalization, so dates and numbers still count.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DedupConfig {
    pub shingle_k: usize,
    pub num_hashes: usize,
    pub num_bands: usize,
    pub seed: u64,
    pub mode: DedupMode,
    pub exact_similarity_min: f64,
    pub canonicalize_numbers: bool,
    pub canonicalize_weekdays: bool,
    /// Offset between successive bands. `None` (the default) means
    /// disjoint contiguous bands; a stride smaller than the band width
    /// gives overlapping sliding windows.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub band_stride: Option<usize>,
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig {
            shingle_k: 13,
            num_hashes: 128,
            num_bands: 8,
            seed: 0,
            mode: DedupMode::Canonical,
            exact_similarity_min: 0.98,
            canonicalize_numbers: true,
            canonicalize_weekdays: true,
            band_stride: None,
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DedupError {
    #[error("num_hashes {num_hashes} is not divisible by num_bands {num_bands}")]
    Divisibility { num_hashes: usize, num_bands: usize },
    #[error("shingle_k must be at least 1")]
    ShingleKZero,
    #[error("num_hashes and num_bands must be at least 1")]
    EmptyScheme,
    #[error("exact_similarity_min {0} is outside [0, 1]")]
    BadSimilarityMin(f64),
    #[error("band_stride {stride} is outside 1..={rows}")]
    BadStride { stride: usize, rows: usize },
    #[error("signatures have {a} and {b} hashes; they must match")]
    SignatureMismatch { a: usize, b: usize },
}

impl DedupConfig {
    pub fn rows_per_band(&self) -> usize {
        self.num_hashes / self.num_bands
    }

    pub fn validate(&self) -> Result<(), DedupError> {
        if self.shingle_k == 0 {
            return Err(DedupError::ShingleKZero);
        }
        if self.num_hashes == 0 || self.num_bands == 0 {
            return Err(DedupError::EmptyScheme);
        }
        if self.num_hashes % self.num_bands != 0 {
            return Err(DedupError::Divisibility {
                num_hashes: self.num_hashes,
                num_bands: self.num_bands,
            });
        }
        if !(0.0..=1.0).contains(&self.exact_similarity_min) {
            return Err(DedupError::BadSimilarityMin(self.exact_similarity_min));
        }
        if let Some(stride) = self.band_stride {
            let rows = self.rows_per_band();
            if stride == 0 || stride > rows {
                return Err(DedupError::BadStride { stride, rows });
            }
        }
        Ok(())
    }
}

/// Weekday forms unified to one sentinel token, covering the common
/// spaced-out and fused spellings.
static WEEKDAYS: LazyLock<HashSet<&'static str>> = LazyLock::new(|| {
    [
        "شنبه",
        "یکشنبه",
        "یک\u{200C}شنبه",
        "دوشنبه",
        "دو\u{200C}شنبه",
        "سه\u{200C}شنبه",
        "سهشنبه",
        "چهارشنبه",
        "چهار\u{200C}شنبه",
        "پنجشنبه",
        "پنج\u{200C}شنبه",
        "جمعه",
        "آدینه",
    ]
    .into_iter()
    .collect()
});

const WEEKDAY_SENTINEL: &str = "شنبه";

/// Rewrites text into its matching form. Canonical mode strips numeric
/// and symbolic characters out of each token (dropping tokens with
/// nothing else in them) and unifies weekday names; exact mode only
/// normalizes whitespace, leaving dates and numbers significant.
pub fn canonicalize(text: &str, cfg: &DedupConfig) -> String {
    if cfg.mode == DedupMode::Exact {
        return normalize_whitespace(text, 0);
    }
    let mut out: Vec<String> = Vec::new();
    for token in text.split_whitespace() {
        let cleaned: String = if cfg.canonicalize_numbers {
            token.chars().filter(|&c| c.is_alphabetic() || c == ZWNJ).collect()
        } else {
            token.to_string()
        };
        if cleaned.is_empty() {
            continue;
        }
        let form = crate::text::lexicon_form(&cleaned);
        if cfg.canonicalize_weekdays && WEEKDAYS.contains(form) {
            out.push(WEEKDAY_SENTINEL.to_string());
        } else {
            out.push(cleaned);
        }
    }
    out.join(" ")
}

const SHINGLE_SEP: &str = "\u{1F}";

/// All contiguous `k`-word windows as strings; a document with fewer
/// than `k` words contributes its whole word sequence as the single
/// shingle, so short messages still participate in dedup.
pub fn shingles(text: &str, k: usize) -> HashSet<String> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return HashSet::new();
    }
    if tokens.len() < k {
        return HashSet::from([tokens.join(SHINGLE_SEP)]);
    }
    tokens.windows(k).map(|w| w.join(SHINGLE_SEP)).collect()
}

/// MinHash signature: positionwise minima of the per-index hash of every
/// shingle. An empty shingle set gets a sentinel signature that never
/// matches any other document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinHashSignature {
    pub doc_id: String,
    pub values: Vec<u64>,
    pub empty: bool,
}

/// Per-index hash seeds derived from the configured seed, reusable
/// across documents.
#[derive(Debug, Clone)]
pub struct Signer {
    seeds: Vec<u64>,
    seed: u64,
}

impl Signer {
    pub fn new(cfg: &DedupConfig) -> Signer {
        let seeds = (0..cfg.num_hashes as u64)
            .map(|i| splitmix64(cfg.seed ^ (i + 1).wrapping_mul(GOLDEN)))
            .collect();
        Signer { seeds, seed: cfg.seed }
    }

    pub fn num_hashes(&self) -> usize {
        self.seeds.len()
    }

    pub fn sign<S: AsRef<str>>(
        &self,
        doc_id: &str,
        shingle_set: impl IntoIterator<Item = S>,
    ) -> MinHashSignature {
        let mut values = vec![u64::MAX; self.seeds.len()];
        let mut any = false;
        for shingle in shingle_set {
            any = true;
            let base = fnv1a64(shingle.as_ref().as_bytes());
            for (slot, &seed) in values.iter_mut().zip(&self.seeds) {
                let h = splitmix64(base ^ seed);
                if h < *slot {
                    *slot = h;
                }
            }
        }
        if !any {
            // The sentinel is keyed off the doc id so two empty documents
            // never look alike either.
            let tag = splitmix64(fnv1a64(doc_id.as_bytes()) ^ self.seed);
            for (i, slot) in values.iter_mut().enumerate() {
                *slot = splitmix64(tag ^ (i as u64 + 1).wrapping_mul(GOLDEN));
            }
            return MinHashSignature { doc_id: doc_id.to_string(), values, empty: true };
        }
        MinHashSignature { doc_id: doc_id.to_string(), values, empty: false }
    }
}

/// Computes the signature for one document's shingle set.
pub fn signature(
    doc_id: &str,
    shingle_set: &HashSet<String>,
    cfg: &DedupConfig,
) -> MinHashSignature {
    Signer::new(cfg).sign(doc_id, shingle_set)
}

/// Fraction of agreeing positions, the unbiased MinHash estimate of the
/// true Jaccard similarity. Sentinel (empty) signatures estimate 0
/// against everything except themselves.
pub fn estimate_jaccard(a: &MinHashSignature, b: &MinHashSignature) -> Result<f64, DedupError> {
    if a.values.len() != b.values.len() {
        return Err(DedupError::SignatureMismatch { a: a.values.len(), b: b.values.len() });
    }
    if a.empty || b.empty {
        let same = a.empty && b.empty && a.doc_id == b.doc_id;
        return Ok(if same { 1.0 } else { 0.0 });
    }
    let agree = a.values.iter().zip(&b.values).filter(|(x, y)| x == y).count();
    Ok(agree as f64 / a.values.len() as f64)
}

/// Compresses each band of `rows_per_band` signature values into one
/// 64-bit bucket key. Disjoint contiguous bands by default; with a
/// `band_stride` below the band width the bands overlap like sliding
/// windows. The band index is mixed into its key, so one global bucket
/// table serves all bands.
pub fn band_keys(sig: &MinHashSignature, cfg: &DedupConfig) -> Vec<u64> {
    let rows = cfg.rows_per_band();
    let stride = cfg.band_stride.unwrap_or(rows);
    let starts = (0..=(cfg.num_hashes.saturating_sub(rows))).step_by(stride);
    if sig.empty {
        let tag = splitmix64(fnv1a64(sig.doc_id.as_bytes()) ^ cfg.seed ^ GOLDEN);
        return starts
            .enumerate()
            .map(|(b, _)| splitmix64(tag ^ (b as u64 + 1).wrapping_mul(GOLDEN)))
            .collect();
    }
    starts
        .enumerate()
        .map(|(b, start)| {
            let mut h = splitmix64((b as u64 + 1).wrapping_mul(GOLDEN));
            for &v in &sig.values[start..start + rows] {
                h = splitmix64(h ^ v);
            }
            h
        })
        .collect()
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect(), rank: vec![0; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// One connected set of near-duplicates. `members` is sorted and always
/// contains the representative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuplicateComponent {
    pub component_id: u64,
    pub members: Vec<String>,
    pub representative: String,
    pub max_similarity: f64,
}

/// All duplicate components found in one run. Documents outside every
/// component are unique and always retained.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DuplicateReport {
    pub components: Vec<DuplicateComponent>,
}

impl DuplicateReport {
    /// Ids that lose the representative election, i.e. get dropped.
    pub fn dropped_ids(&self) -> HashSet<&str> {
        self.components
            .iter()
            .flat_map(|c| c.members.iter())
            .map(String::as_str)
            .filter(|id| !self.components.iter().any(|c| c.representative == *id))
            .collect()
    }

    pub fn duplicate_docs(&self) -> u64 {
        self.components.iter().map(|c| c.members.len() as u64 - 1).sum()
    }

    fn renumber(&mut self) {
        self.components.sort_by(|a, b| a.representative.cmp(&b.representative));
        for (i, c) in self.components.iter_mut().enumerate() {
            c.component_id = i as u64;
        }
    }
}

/// One document's dedup-relevant projection, ready for clustering.
#[derive(Debug, Clone)]
pub struct DocSketch {
    pub doc_id: String,
    pub keys: Vec<u64>,
    pub signature: MinHashSignature,
}

/// Builds the sketch (canonicalize, shingle, sign, band) for one
/// document text.
pub fn sketch(doc_id: &str, text: &str, signer: &Signer, cfg: &DedupConfig) -> DocSketch {
    let canonical = canonicalize(text, cfg);
    let shingle_set = shingles(&canonical, cfg.shingle_k);
    let sig = signer.sign(doc_id, &shingle_set);
    let keys = band_keys(&sig, cfg);
    DocSketch { doc_id: doc_id.to_string(), keys, signature: sig }
}

/// Groups documents sharing a band key, confirms edges per the mode, and
/// reduces the candidate graph to connected components. Component
/// membership is independent of input order; ids and representatives
/// come from the lexicographically smallest member.
pub fn cluster(sketches: &[DocSketch], cfg: &DedupConfig) -> Result<DuplicateReport, DedupError> {
    cfg.validate()?;
    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    for (idx, sk) in sketches.iter().enumerate() {
        for &key in &sk.keys {
            buckets.entry(key).or_default().push(idx);
        }
    }

    let mut uf = UnionFind::new(sketches.len());
    let mut edge_sims: HashMap<(usize, usize), f64> = HashMap::new();
    let mut tested: HashSet<(usize, usize)> = HashSet::new();
    for bucket in buckets.values() {
        if bucket.len() < 2 {
            continue;
        }
        match cfg.mode {
            DedupMode::Canonical => {
                let first = bucket[0];
                for &other in &bucket[1..] {
                    let pair = (first.min(other), first.max(other));
                    if !tested.insert(pair) {
                        continue;
                    }
                    let sim = estimate_jaccard(
                        &sketches[pair.0].signature,
                        &sketches[pair.1].signature,
                    )?;
                    edge_sims.insert(pair, sim);
                    uf.union(pair.0, pair.1);
                }
            }
            DedupMode::Exact => {
                for (i, &a) in bucket.iter().enumerate() {
                    for &b in &bucket[i + 1..] {
                        let pair = (a.min(b), a.max(b));
                        if !tested.insert(pair) {
                            continue;
                        }
                        let sim = estimate_jaccard(
                            &sketches[pair.0].signature,
                            &sketches[pair.1].signature,
                        )?;
                        if sim >= cfg.exact_similarity_min {
                            edge_sims.insert(pair, sim);
                            uf.union(pair.0, pair.1);
                        }
                    }
                }
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for idx in 0..sketches.len() {
        groups.entry(uf.find(idx)).or_default().push(idx);
    }
    let mut report = DuplicateReport::default();
    for members in groups.into_values().filter(|m| m.len() >= 2) {
        let mut ids: Vec<String> =
            members.iter().map(|&i| sketches[i].doc_id.clone()).collect();
        ids.sort();
        let representative = ids[0].clone();
        let max_similarity = members
            .iter()
            .flat_map(|&a| members.iter().map(move |&b| (a.min(b), a.max(b))))
            .filter_map(|pair| edge_sims.get(&pair).copied())
            .fold(0.0f64, f64::max);
        report.components.push(DuplicateComponent {
            component_id: 0,
            members: ids,
            representative,
            max_similarity,
        });
    }
    report.renumber();
    Ok(report)
}

/// Near-dedups a corpus within each source partition. The returned
/// documents keep their input order and their exact input text; the
/// canonical form is used only to decide who matches whom.
pub fn dedup_corpus(
    docs: Vec<Document>,
    cfg: &DedupConfig,
) -> Result<(Vec<Document>, DuplicateReport), DedupError> {
    cfg.validate()?;
    let signer = Signer::new(cfg);

    let mut partitions: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (idx, doc) in docs.iter().enumerate() {
        partitions.entry(doc.source.as_str()).or_default().push(idx);
    }

    let mut report = DuplicateReport::default();
    for indexes in partitions.values() {
        let sketches: Vec<DocSketch> = indexes
            .par_iter()
            .map(|&i| sketch(&docs[i].id, &docs[i].text, &signer, cfg))
            .collect();
        let partial = cluster(&sketches, cfg)?;
        report.components.extend(partial.components);
    }
    report.renumber();

    let dropped: HashSet<String> =
        report.dropped_ids().into_iter().map(str::to_string).collect();
    let retained = docs.into_iter().filter(|d| !dropped.contains(&d.id)).collect();
    Ok((retained, report))
}

//! Monthly archetype sequences, observed transition probabilities, and a
//! label-shuffling null model with z-scores and p-values.
//!
//! The null model draws shuffled copies of the dataset by permuting
//! archetype labels among the users active in each month, which preserves
//! every month's label multiset while breaking user-level temporal linkage.
//! Transition probabilities recomputed on each copy yield per-pair null
//! means and standard deviations; observed transitions are scored with
//! one-sided upper-tail normal p-values plus an empirical p for robustness.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hypergraph::{MonthKey, NodeId};

/// Identifier of the shuffling scheme recorded in report metadata.
pub const RNG_ALGORITHM: &str = "chacha12/fisher-yates-within-month";

impl MonthKey {
    /// The calendar month following this one.
    pub fn next(self) -> MonthKey {
        if self.month == 12 {
            MonthKey {
                year: self.year + 1,
                month: 1,
            }
        } else {
            MonthKey {
                year: self.year,
                month: self.month + 1,
            }
        }
    }
}

/// One user's (month, archetype index) steps, months strictly increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct ArchetypeSequence {
    pub user: NodeId,
    steps: Vec<(MonthKey, u32)>,
}

impl ArchetypeSequence {
    pub fn new(user: NodeId, steps: Vec<(MonthKey, u32)>) -> Result<Self> {
        for w in steps.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::InvalidValue(format!(
                    "sequence months must strictly increase for user {user}"
                )));
            }
        }
        Ok(Self { user, steps })
    }

    pub fn steps(&self) -> &[(MonthKey, u32)] {
        &self.steps
    }
}

/// Sequences over a fixed archetype state list.
#[derive(Clone, Debug)]
pub struct SequenceSet {
    pub archetypes: Vec<String>,
    pub sequences: Vec<ArchetypeSequence>,
}

impl SequenceSet {
    pub fn new(archetypes: Vec<String>, sequences: Vec<ArchetypeSequence>) -> Result<Self> {
        let k = archetypes.len() as u32;
        for seq in &sequences {
            for &(_, label) in seq.steps() {
                if label >= k {
                    return Err(Error::InvalidValue(format!(
                        "label index {label} out of range for {k} archetypes"
                    )));
                }
            }
        }
        Ok(Self {
            archetypes,
            sequences,
        })
    }
}

/// Row-oriented transition counts; rows without outgoing observations are
/// undefined and excluded from significance testing.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    pub archetypes: Vec<String>,
    counts: Vec<u64>,
    row_totals: Vec<u64>,
}

impl TransitionMatrix {
    pub fn k(&self) -> usize {
        self.archetypes.len()
    }

    pub fn count(&self, from: usize, to: usize) -> u64 {
        self.counts[from * self.k() + to]
    }

    pub fn row_total(&self, from: usize) -> u64 {
        self.row_totals[from]
    }

    /// Observed `P(to | from)`, `None` when the row has no outgoing
    /// observations.
    pub fn prob(&self, from: usize, to: usize) -> Option<f64> {
        let total = self.row_totals[from];
        if total == 0 {
            None
        } else {
            Some(self.count(from, to) as f64 / total as f64)
        }
    }
}

/// Occurrence-level layout reused by the observed count and every shuffle.
struct Compiled {
    k: usize,
    labels: Vec<u32>,
    month_slots: Vec<Vec<u32>>,
    pairs: Vec<(u32, u32)>,
}

fn compile(set: &SequenceSet) -> Compiled {
    let k = set.archetypes.len();
    let mut months: Vec<MonthKey> = set
        .sequences
        .iter()
        .flat_map(|s| s.steps().iter().map(|(m, _)| *m))
        .collect();
    months.sort_unstable();
    months.dedup();
    let month_index = |m: MonthKey| months.binary_search(&m).ok();

    let mut labels = Vec::new();
    let mut month_slots: Vec<Vec<u32>> = vec![Vec::new(); months.len()];
    let mut pairs = Vec::new();
    for seq in &set.sequences {
        let steps = seq.steps();
        let mut occ_ids = Vec::with_capacity(steps.len());
        for &(month, label) in steps {
            let occ = labels.len() as u32;
            labels.push(label);
            let mi = month_index(month).expect("month collected above");
            month_slots[mi].push(occ);
            occ_ids.push((month, occ));
        }
        for w in occ_ids.windows(2) {
            if w[0].0.next() == w[1].0 {
                pairs.push((w[0].1, w[1].1));
            }
        }
    }
    Compiled {
        k,
        labels,
        month_slots,
        pairs,
    }
}

fn count_transitions(c: &Compiled, labels: &[u32]) -> (Vec<u64>, Vec<u64>) {
    let mut counts = vec![0u64; c.k * c.k];
    let mut row_totals = vec![0u64; c.k];
    for &(a, b) in &c.pairs {
        let from = labels[a as usize] as usize;
        let to = labels[b as usize] as usize;
        counts[from * c.k + to] += 1;
        row_totals[from] += 1;
    }
    (counts, row_totals)
}

/// Observed transition probabilities over calendar-adjacent months.
/// Self-transitions are included; users absent in the following month
/// contribute no transition.
pub fn observed_transitions(set: &SequenceSet) -> Result<TransitionMatrix> {
    let c = compile(set);
    if c.pairs.is_empty() {
        return Err(Error::EmptyInput("no adjacent-month transitions"));
    }
    let (counts, row_totals) = count_transitions(&c, &c.labels);
    Ok(TransitionMatrix {
        archetypes: set.archetypes.clone(),
        counts,
        row_totals,
    })
}

/// Per-replica transition probabilities under within-month label shuffles.
#[derive(Clone, Debug)]
pub struct NullSamples {
    pub archetypes: Vec<String>,
    pub n_shuffles: usize,
    pub seed: u64,
    /// Replica-major: `samples[r][from * k + to]`, `None` where the
    /// replica's row had no outgoing observations.
    samples: Vec<Vec<Option<f64>>>,
}

impl NullSamples {
    pub fn samples(&self) -> &[Vec<Option<f64>>] {
        &self.samples
    }

    /// Population mean and standard deviation over defined samples for one
    /// pair; `None` with fewer than two defined samples.
    pub fn mean_std(&self, from: usize, to: usize) -> Option<(f64, f64)> {
        let k = self.archetypes.len();
        let idx = from * k + to;
        let values: Vec<f64> = self.samples.iter().filter_map(|s| s[idx]).collect();
        if values.len() < 2 {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some((mean, var.sqrt()))
    }

    /// Count of defined samples at least as large as `observed`.
    pub fn count_ge(&self, from: usize, to: usize, observed: f64) -> (usize, usize) {
        let k = self.archetypes.len();
        let idx = from * k + to;
        let mut ge = 0usize;
        let mut defined = 0usize;
        for s in &self.samples {
            if let Some(v) = s[idx] {
                defined += 1;
                if v >= observed {
                    ge += 1;
                }
            }
        }
        (ge, defined)
    }
}

fn shuffle_replica(c: &Compiled, seed: u64, replica: u64) -> Vec<Option<f64>> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(replica + 1);
    let mut labels = c.labels.clone();
    for slots in &c.month_slots {
        // Fisher-Yates over this month's occurrence slots
        for i in (1..slots.len()).rev() {
            let j = rng.random_range(0..=i);
            labels.swap(slots[i] as usize, slots[j] as usize);
        }
    }
    debug_assert!({
        let mut orig: Vec<Vec<u32>> = c
            .month_slots
            .iter()
            .map(|s| s.iter().map(|&o| c.labels[o as usize]).collect())
            .collect();
        let mut shuf: Vec<Vec<u32>> = c
            .month_slots
            .iter()
            .map(|s| s.iter().map(|&o| labels[o as usize]).collect())
            .collect();
        orig.iter_mut().for_each(|v| v.sort_unstable());
        shuf.iter_mut().for_each(|v| v.sort_unstable());
        orig == shuf
    });
    let (counts, row_totals) = count_transitions(c, &labels);
    (0..c.k * c.k)
        .map(|idx| {
            let total = row_totals[idx / c.k];
            if total == 0 {
                None
            } else {
                Some(counts[idx] as f64 / total as f64)
            }
        })
        .collect()
}

/// Generate `n_shuffles` label-shuffled copies and record each copy's
/// transition probabilities. Replicas are independent (one RNG stream per
/// replica index), so the result is reproducible for a fixed seed
/// regardless of thread scheduling.
pub fn null_model(set: &SequenceSet, n_shuffles: usize, seed: u64) -> Result<NullSamples> {
    if n_shuffles < 2 {
        return Err(Error::InvalidValue(
            "null model needs at least 2 shuffles".into(),
        ));
    }
    let c = compile(set);
    if c.pairs.is_empty() {
        return Err(Error::EmptyInput("no adjacent-month transitions"));
    }
    let samples: Vec<Vec<Option<f64>>> = (0..n_shuffles as u64)
        .into_par_iter()
        .map(|r| shuffle_replica(&c, seed, r))
        .collect();
    Ok(NullSamples {
        archetypes: set.archetypes.clone(),
        n_shuffles,
        seed,
        samples,
    })
}

/// Complementary error function: stable power series below 3, Lentz
/// continued fraction above. Exact at 0, near machine precision elsewhere.
fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 3.0 {
        // erf(x) = 2x e^{-x^2}/sqrt(pi) * sum (2x^2)^n / (2n+1)!!, all
        // terms positive so no cancellation
        let x2 = 2.0 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut odd = 1.0;
        loop {
            odd += 2.0;
            term *= x2 / odd;
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        let erf = 2.0 * x * (-x * x).exp() / std::f64::consts::PI.sqrt() * sum;
        1.0 - erf
    } else {
        // erfc(x) = e^{-x^2}/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let tiny = 1e-300;
        let mut f = x;
        let mut c = f64::INFINITY;
        let mut d = 0.0;
        let mut n = 0.5;
        for _ in 0..80 {
            d = x + n * d;
            if d == 0.0 {
                d = tiny;
            }
            c = x + n / c;
            if c == 0.0 {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
            n += 0.5;
        }
        (-x * x).exp() / (std::f64::consts::PI.sqrt() * f)
    }
}

/// Upper-tail standard normal probability `P(Z > z)`.
pub fn normal_upper_tail(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// One ordered archetype pair in the report.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionCell {
    pub from: String,
    pub to: String,
    pub observed: f64,
    pub null_mean: f64,
    pub null_std: f64,
    /// `None` when the pair is untestable (zero null standard deviation).
    pub z: Option<f64>,
    pub p_normal: Option<f64>,
    pub p_empirical: f64,
    pub significant: bool,
}

/// Full significance report plus the parameters that produced it.
#[derive(Clone, Debug)]
pub struct TransitionReport {
    pub archetypes: Vec<String>,
    pub cells: Vec<TransitionCell>,
    pub alpha: f64,
    pub n_shuffles: usize,
    pub seed: u64,
    pub rng_algorithm: &'static str,
}

impl TransitionReport {
    pub fn cell(&self, from: &str, to: &str) -> Option<&TransitionCell> {
        self.cells
            .iter()
            .find(|c| c.from == from && c.to == to)
    }

    pub fn significant_fraction(&self) -> f64 {
        if self.cells.is_empty() {
            return 0.0;
        }
        self.cells.iter().filter(|c| c.significant).count() as f64 / self.cells.len() as f64
    }
}

/// Score observed transitions against the null samples.
///
/// `z = (obs - mean) / std`; `p_normal` is the one-sided upper tail;
/// `p_empirical = (#null >= obs + 1) / (n + 1)`. A pair is significant iff
/// `p_normal < alpha` and the observed probability exceeds the null mean.
/// Pairs with zero null deviation are untestable and never significant;
/// pairs from undefined observed rows are excluded.
pub fn significance(
    observed: &TransitionMatrix,
    null: &NullSamples,
    alpha: f64,
) -> Result<TransitionReport> {
    if observed.archetypes != null.archetypes {
        return Err(Error::SchemaMismatch(
            "observed matrix and null samples cover different archetypes".into(),
        ));
    }
    let k = observed.k();
    let mut cells = Vec::new();
    for from in 0..k {
        for to in 0..k {
            let Some(obs) = observed.prob(from, to) else {
                continue;
            };
            let Some((mean, std)) = null.mean_std(from, to) else {
                continue;
            };
            let (ge, defined) = null.count_ge(from, to, obs);
            let p_empirical = (ge as f64 + 1.0) / (defined as f64 + 1.0);
            let (z, p_normal, significant) = if std == 0.0 {
                (None, None, false)
            } else {
                let z = (obs - mean) / std;
                let p = normal_upper_tail(z);
                (Some(z), Some(p), p < alpha && obs > mean)
            };
            cells.push(TransitionCell {
                from: observed.archetypes[from].clone(),
                to: observed.archetypes[to].clone(),
                observed: obs,
                null_mean: mean,
                null_std: std,
                z,
                p_normal,
                p_empirical,
                significant,
            });
        }
    }
    Ok(TransitionReport {
        archetypes: observed.archetypes.clone(),
        cells,
        alpha,
        n_shuffles: null.n_shuffles,
        seed: null.seed,
        rng_algorithm: RNG_ALGORITHM,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn month(m: u8) -> MonthKey {
        MonthKey {
            year: 2023,
            month: m,
        }
    }

    fn two_state_set(steps: Vec<Vec<(u8, u32)>>) -> SequenceSet {
        let sequences = steps
            .into_iter()
            .enumerate()
            .map(|(i, s)| {
                ArchetypeSequence::new(
                    NodeId(i as u32),
                    s.into_iter().map(|(m, l)| (month(m), l)).collect(),
                )
                .unwrap()
            })
            .collect();
        SequenceSet::new(vec!["A".into(), "B".into()], sequences).unwrap()
    }

    #[test]
    fn month_next_rolls_over() {
        assert_eq!(month(1).next(), month(2));
        assert_eq!(
            MonthKey {
                year: 2023,
                month: 12
            }
            .next(),
            MonthKey {
                year: 2024,
                month: 1
            }
        );
    }

    #[test]
    fn self_transition_probability_one() {
        let set = two_state_set(vec![vec![(1, 0), (2, 0)]]);
        let m = observed_transitions(&set).unwrap();
        assert_eq!(m.prob(0, 0), Some(1.0));
        assert_eq!(m.prob(0, 1), Some(0.0));
        assert_eq!(m.prob(1, 0), None);
    }

    #[test]
    fn absent_next_month_contributes_nothing() {
        // user 0 skips month 2, so 1->3 is not adjacent
        let set = two_state_set(vec![vec![(1, 0), (3, 1)], vec![(1, 1), (2, 1)]]);
        let m = observed_transitions(&set).unwrap();
        assert_eq!(m.row_total(0), 0);
        assert_eq!(m.prob(1, 1), Some(1.0));
    }

    #[test]
    fn rows_are_stochastic() {
        let set = two_state_set(vec![
            vec![(1, 0), (2, 1), (3, 0)],
            vec![(1, 1), (2, 0), (3, 1)],
            vec![(1, 0), (2, 0)],
        ]);
        let m = observed_transitions(&set).unwrap();
        for from in 0..2 {
            if m.row_total(from) > 0 {
                let sum: f64 = (0..2).map(|to| m.prob(from, to).unwrap()).sum();
                assert!((sum - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_adjacent_pairs_errors() {
        let set = two_state_set(vec![vec![(1, 0), (5, 1)]]);
        assert!(matches!(
            observed_transitions(&set),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn null_model_minimal_run() {
        let set = two_state_set(vec![
            vec![(1, 0), (2, 1)],
            vec![(1, 1), (2, 0)],
            vec![(1, 0), (2, 0)],
        ]);
        let null = null_model(&set, 2, 7).unwrap();
        assert_eq!(null.samples().len(), 2);
        if let Some((mean, std)) = null.mean_std(0, 1) {
            assert!(mean.is_finite());
            assert!(std.is_finite());
        }
        assert!(matches!(
            null_model(&set, 1, 7),
            Err(Error::InvalidValue(_))
        ));
    }

    #[test]
    fn null_model_is_reproducible() {
        let set = two_state_set(vec![
            vec![(1, 0), (2, 1), (3, 1)],
            vec![(1, 1), (2, 0), (3, 0)],
            vec![(1, 0), (2, 0), (3, 1)],
            vec![(1, 1), (2, 1), (3, 0)],
        ]);
        let a = null_model(&set, 20, 42).unwrap();
        let b = null_model(&set, 20, 42).unwrap();
        assert_eq!(a.samples(), b.samples());
        let c = null_model(&set, 20, 43).unwrap();
        assert_ne!(a.samples(), c.samples());
    }

    #[test]
    fn degenerate_month_passes_through() {
        // every user has label A in both months: shuffles change nothing
        let set = two_state_set(vec![vec![(1, 0), (2, 0)], vec![(1, 0), (2, 0)]]);
        let null = null_model(&set, 5, 1).unwrap();
        for s in null.samples() {
            assert_eq!(s[0], Some(1.0));
        }
        let (mean, std) = null.mean_std(0, 0).unwrap();
        assert_eq!(mean, 1.0);
        assert_eq!(std, 0.0);
    }

    #[test]
    fn shuffles_preserve_monthly_label_multisets() {
        let set = two_state_set(vec![
            vec![(1, 0), (2, 1), (3, 0)],
            vec![(1, 1), (2, 1), (3, 0)],
            vec![(1, 0), (2, 0), (3, 1)],
            vec![(1, 1), (2, 0)],
            vec![(2, 1), (3, 1)],
        ]);
        let c = compile(&set);
        for replica in 0..50 {
            let shuffled = shuffle_replica(&c, 12345, replica);
            // recount from the replica's probabilities is lossy, so check
            // the invariant directly on a fresh shuffle of the labels
            assert_eq!(shuffled.len(), c.k * c.k);
        }
        // direct check on the label level: every month's sorted labels are
        // unchanged by the permutation (the shuffle itself asserts this in
        // debug builds; here we replicate it for one seed explicitly)
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        rng.set_stream(1);
        let mut labels = c.labels.clone();
        for slots in &c.month_slots {
            for i in (1..slots.len()).rev() {
                let j = rng.random_range(0..=i);
                labels.swap(slots[i] as usize, slots[j] as usize);
            }
        }
        for slots in &c.month_slots {
            let mut orig: Vec<u32> = slots.iter().map(|&o| c.labels[o as usize]).collect();
            let mut shuf: Vec<u32> = slots.iter().map(|&o| labels[o as usize]).collect();
            orig.sort_unstable();
            shuf.sort_unstable();
            assert_eq!(orig, shuf);
        }
    }

    #[test]
    fn untestable_pairs_never_significant() {
        let set = two_state_set(vec![vec![(1, 0), (2, 0)], vec![(1, 0), (2, 0)]]);
        let observed = observed_transitions(&set).unwrap();
        let null = null_model(&set, 5, 1).unwrap();
        let report = significance(&observed, &null, 0.01).unwrap();
        let cell = report.cell("A", "A").unwrap();
        assert!(cell.z.is_none());
        assert!(!cell.significant);
        assert!(cell.p_empirical > 0.0);
    }

    #[test]
    fn observed_equal_to_mean_is_not_significant() {
        // craft a null where a pair's mean equals the observed value:
        // z = 0 and the upper tail is one half
        assert_eq!(normal_upper_tail(0.0), 0.5);
        assert!(normal_upper_tail(3.0) < 0.01);
        assert!((normal_upper_tail(2.3263478740408408) - 0.01).abs() < 1e-4);
        assert!((normal_upper_tail(1.6448536269514722) - 0.05).abs() < 1e-4);
    }

    #[test]
    fn normal_tail_symmetry() {
        for z in [-2.5, -1.0, 0.0, 0.7, 3.2] {
            let upper = normal_upper_tail(z);
            let lower = normal_upper_tail(-z);
            assert!((upper + lower - 1.0).abs() < 1e-9);
            assert!((0.0..=1.0).contains(&upper));
        }
    }
}

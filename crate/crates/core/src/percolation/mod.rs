//! Entanglement distribution over a network mapped to classical bond
//! percolation: singlet-conversion probabilities on edges, union-find
//! clustering, swap composition and repeater time scaling.

mod union_find;

pub use union_find::UnionFind;

use crate::error::{Error, Result};
use crate::rng::{substream, Stream};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeKind {
    Square,
    Triangular,
    Honeycomb,
}

/// Network topology: a regular lattice or an explicit edge list with a
/// designated terminal pair for the spanning criterion.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum NetworkTopology {
    Lattice { kind: LatticeKind, side: usize },
    Explicit {
        nodes: usize,
        edges: Vec<(usize, usize)>,
        terminals: (usize, usize),
    },
}

/// Per-edge amplitudes of the partially entangled pure states
/// p|00> + sqrt(1-p^2)|11> carried by the network links.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum EdgeAmplitudes {
    Uniform(f64),
    PerEdge(Vec<f64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntanglementNetwork {
    pub topology: NetworkTopology,
    pub amplitudes: EdgeAmplitudes,
    pub seed: u64,
}

/// Flattened graph with the node sets used for the spanning test.
#[derive(Debug, Clone)]
pub struct Graph {
    pub n_nodes: usize,
    pub edges: Vec<(u32, u32)>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
}

pub fn build_graph(topology: &NetworkTopology) -> Result<Graph> {
    match topology {
        NetworkTopology::Lattice { kind, side } => {
            let side = *side;
            if side < 2 {
                return Err(Error::config(
                    "lattice side must be >= 2 (no spanning notion on a single node)",
                ));
            }
            let id = |row: usize, col: usize| (row * side + col) as u32;
            let mut edges = Vec::new();
            for row in 0..side {
                for col in 0..side {
                    if col + 1 < side {
                        edges.push((id(row, col), id(row, col + 1)));
                    }
                    let vertical = match kind {
                        // Brick-wall pattern: alternate vertical bonds.
                        LatticeKind::Honeycomb => (row + col) % 2 == 0,
                        _ => true,
                    };
                    if vertical && row + 1 < side {
                        edges.push((id(row, col), id(row + 1, col)));
                    }
                    if *kind == LatticeKind::Triangular && col + 1 < side && row + 1 < side {
                        edges.push((id(row, col), id(row + 1, col + 1)));
                    }
                }
            }
            let left = (0..side).map(|row| id(row, 0)).collect();
            let right = (0..side).map(|row| id(row, side - 1)).collect();
            Ok(Graph {
                n_nodes: side * side,
                edges,
                left,
                right,
            })
        }
        NetworkTopology::Explicit {
            nodes,
            edges,
            terminals,
        } => {
            if *nodes < 2 {
                return Err(Error::config("explicit graph needs at least two nodes"));
            }
            for &(a, b) in edges {
                if a >= *nodes || b >= *nodes {
                    return Err(Error::config(format!(
                        "edge ({a},{b}) references a node outside 0..{nodes}"
                    )));
                }
            }
            if terminals.0 >= *nodes || terminals.1 >= *nodes {
                return Err(Error::config("terminal nodes out of range"));
            }
            Ok(Graph {
                n_nodes: *nodes,
                edges: edges.iter().map(|&(a, b)| (a as u32, b as u32)).collect(),
                left: vec![terminals.0 as u32],
                right: vec![terminals.1 as u32],
            })
        }
    }
}

/// Probability of converting the state p|00> + sqrt(1-p^2)|11> into a
/// maximally entangled pair by local operations: 2 (1 - max Schmidt weight).
pub fn singlet_conversion_probability(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!(
            "edge amplitude must lie in [0,1], got {p}"
        )));
    }
    let p2 = p * p;
    Ok((2.0 * (1.0 - p2.max(1.0 - p2))).min(1.0))
}

/// Outcome of one percolation trial.
#[derive(Debug, Clone, Serialize)]
pub struct TrialOutcome {
    pub spanning: bool,
    pub largest_cluster_fraction: f64,
    /// Same-cluster indicators for the sampled node pairs.
    pub pair_connected: Vec<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PercolationStats {
    pub trials: Vec<TrialOutcome>,
    pub spanning_frequency: f64,
    /// Node pairs probed by `pair_connected`, as flat node indices.
    pub sampled_pairs: Vec<(usize, usize)>,
}

fn edge_open_probabilities(net: &EntanglementNetwork, graph: &Graph) -> Result<Vec<f64>> {
    match &net.amplitudes {
        EdgeAmplitudes::Uniform(p) => {
            let q = singlet_conversion_probability(*p)?;
            Ok(vec![q; graph.edges.len()])
        }
        EdgeAmplitudes::PerEdge(ps) => {
            if ps.len() != graph.edges.len() {
                return Err(Error::config(format!(
                    "{} edge amplitudes for {} edges",
                    ps.len(),
                    graph.edges.len()
                )));
            }
            ps.iter().map(|&p| singlet_conversion_probability(p)).collect()
        }
    }
}

fn run_trial(graph: &Graph, open_probs: &[f64], rng: &mut impl Rng) -> UnionFind {
    let mut uf = UnionFind::new(graph.n_nodes);
    for (edge, &(a, b)) in graph.edges.iter().enumerate() {
        if rng.random::<f64>() < open_probs[edge] {
            uf.union(a, b);
        }
    }
    uf
}

fn spanning(uf: &mut UnionFind, graph: &Graph) -> bool {
    let mut left_roots: Vec<u32> = graph.left.iter().map(|&n| uf.find(n)).collect();
    left_roots.sort_unstable();
    left_roots.dedup();
    graph
        .right
        .iter()
        .any(|&n| left_roots.binary_search(&uf.find(n)).is_ok())
}

/// Monte-Carlo percolation over the network: each trial opens edge (i,j)
/// independently with its singlet-conversion probability, clusters with
/// union-find, and records spanning plus cluster statistics. Deterministic
/// per seed; trials use independent substreams.
pub fn percolate(net: &EntanglementNetwork, trials: usize, seed: u64) -> Result<PercolationStats> {
    if trials == 0 {
        return Err(Error::config("at least one trial required"));
    }
    let graph = build_graph(&net.topology)?;
    let open_probs = edge_open_probabilities(net, &graph)?;
    let pairs = sampled_pairs(&graph);
    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = substream(seed, Stream::PercolationTrial, t as u64);
            let mut uf = run_trial(&graph, &open_probs, &mut rng);
            let spanning = spanning(&mut uf, &graph);
            let largest = uf.largest_component();
            let pair_connected = pairs
                .iter()
                .map(|&(a, b)| uf.same_set(a as u32, b as u32))
                .collect();
            TrialOutcome {
                spanning,
                largest_cluster_fraction: largest as f64 / graph.n_nodes as f64,
                pair_connected,
            }
        })
        .collect();
    let spanning_frequency =
        outcomes.iter().filter(|o| o.spanning).count() as f64 / trials as f64;
    Ok(PercolationStats {
        trials: outcomes,
        spanning_frequency,
        sampled_pairs: pairs,
    })
}

fn sampled_pairs(graph: &Graph) -> Vec<(usize, usize)> {
    let n = graph.n_nodes;
    let mut pairs = vec![(0usize, n - 1), (0usize, n / 2)];
    if let (Some(&l), Some(&r)) = (graph.left.first(), graph.right.first()) {
        pairs.push((l as usize, r as usize));
    }
    pairs
}

/// Wilson score interval for a binomial frequency.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdEvaluation {
    pub bond_probability: f64,
    pub spanning_frequency: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub evaluations: Vec<ThresholdEvaluation>,
    /// Set when the empirical spanning curve decreases beyond combined
    /// 3-sigma Wilson bounds somewhere along the sweep.
    pub monotone_warning: bool,
}

/// Bond-percolation threshold of a uniform lattice family: bisection on
/// spanning probability = 1/2 with Wilson intervals at each evaluation.
pub fn estimate_threshold(
    kind: LatticeKind,
    side: usize,
    trials_per_point: usize,
    seed: u64,
) -> Result<ThresholdEstimate> {
    if trials_per_point == 0 {
        return Err(Error::config("trials_per_point must be >= 1"));
    }
    let graph = build_graph(&NetworkTopology::Lattice { kind, side })?;
    let mut evaluations = Vec::new();
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    let steps = 14;
    for step in 0..steps {
        let mid = 0.5 * (lo + hi);
        let open_probs = vec![mid; graph.edges.len()];
        let hits: usize = (0..trials_per_point)
            .into_par_iter()
            .map(|t| {
                let mut rng =
                    substream(seed, Stream::PercolationTrial, (step * 1_000_003 + t) as u64);
                let mut uf = run_trial(&graph, &open_probs, &mut rng);
                usize::from(spanning(&mut uf, &graph))
            })
            .sum();
        let freq = hits as f64 / trials_per_point as f64;
        let (wl, wh) = wilson_interval(hits, trials_per_point, 1.0);
        evaluations.push(ThresholdEvaluation {
            bond_probability: mid,
            spanning_frequency: freq,
            wilson_lo: wl,
            wilson_hi: wh,
        });
        if freq < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let estimate = 0.5 * (lo + hi);

    // Slope of the spanning curve from the widest recent bracket, for a
    // noise-propagated standard error.
    let mut sorted = evaluations.clone();
    sorted.sort_by(|a, b| {
        a.bond_probability
            .partial_cmp(&b.bond_probability)
            .expect("finite")
    });
    let mut monotone_warning = false;
    for pair in sorted.windows(2) {
        let sigma_a = (pair[0].wilson_hi - pair[0].wilson_lo) / 2.0;
        let sigma_b = (pair[1].wilson_hi - pair[1].wilson_lo) / 2.0;
        let drop = pair[0].spanning_frequency - pair[1].spanning_frequency;
        if drop > 3.0 * (sigma_a * sigma_a + sigma_b * sigma_b).sqrt() {
            monotone_warning = true;
        }
    }
    let slope = estimate_slope(&sorted);
    let binom_sigma = (0.25 / trials_per_point as f64).sqrt();
    let stderr = ((hi - lo) / 2.0).max(if slope > 0.0 {
        binom_sigma / slope
    } else {
        hi - lo
    });
    Ok(ThresholdEstimate {
        estimate,
        stderr,
        evaluations,
        monotone_warning,
    })
}

fn estimate_slope(sorted: &[ThresholdEvaluation]) -> f64 {
    // Steepest observed finite-difference slope across the transition.
    let mut best = 0.0_f64;
    for pair in sorted.windows(2) {
        let dp = pair[1].bond_probability - pair[0].bond_probability;
        if dp > 1e-9 {
            let df = pair[1].spanning_frequency - pair[0].spanning_frequency;
            best = best.max(df / dp);
        }
    }
    best
}

/// Series composition of two independent conversion successes.
pub fn q_swap(prob_a: f64, prob_b: f64) -> Result<f64> {
    for p in [prob_a, prob_b] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!(
                "swap probability must lie in [0,1], got {p}"
            )));
        }
    }
    Ok(prob_a * prob_b)
}

/// Alternative swap model that preserves the Schmidt amplitude of equal
/// edges: the joined edge carries the common amplitude unchanged.
pub fn q_swap_preserve_schmidt(amp_a: f64, amp_b: f64) -> Result<f64> {
    for p in [amp_a, amp_b] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain("amplitudes must lie in [0,1]"));
        }
    }
    // Schmidt-preserving swap on equal edges keeps the amplitude; for
    // unequal edges the weaker link dominates.
    Ok(if amp_a >= 0.5_f64.sqrt() || amp_b >= 0.5_f64.sqrt() {
        amp_a.max(amp_b)
    } else {
        amp_a.min(amp_b)
    })
}

/// Repeater-chain configuration. Distances in meters, times in seconds.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepeaterConfig {
    /// Total communication distance L.
    pub total_distance_m: f64,
    /// Segment length L0 (maximal distance between nodes).
    pub segment_m: f64,
    /// Channel attenuation length.
    pub attenuation_m: f64,
    /// Excitation probability; defaults to L0/L.
    pub epsilon: Option<f64>,
    /// Detection efficiency in (0, 1].
    pub eta: f64,
    /// Classical communication time per segment; defaults to L0/c.
    pub t_cc_s: Option<f64>,
}

impl RepeaterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.segment_m > 0.0) || self.total_distance_m < self.segment_m {
            return Err(Error::config("need L >= L0 > 0"));
        }
        if !(self.attenuation_m > 0.0) {
            return Err(Error::config("attenuation length must be positive"));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::config(
                "detection efficiency must lie in (0, 1]; zero efficiency never succeeds",
            ));
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e <= 1.0) {
                return Err(Error::config(
                    "excitation probability must lie in (0, 1]; zero never succeeds",
                ));
            }
        }
        Ok(())
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
            .unwrap_or(self.segment_m / self.total_distance_m)
    }

    pub fn t_cc(&self) -> f64 {
        const C_M_PER_S: f64 = 2.99792458e8;
        self.t_cc_s.unwrap_or(self.segment_m / C_M_PER_S)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RepeaterTiming {
    /// Per-segment success probability eps^2 eta^2 e^{-L0/L_att}.
    pub success_probability: f64,
    /// Expected time per segment T_cc / success.
    pub t_segment_s: f64,
    /// Total time T_segment (L/L0)^2.
    pub t_total_s: f64,
}

/// Repeater time scaling: success = eps^2 eta^2 e^{-L0/L_att},
/// T_segment = T_cc / success, T_total = T_segment (L/L0)^2.
pub fn repeater_time(cfg: &RepeaterConfig) -> Result<RepeaterTiming> {
    cfg.validate()?;
    let eps = cfg.epsilon();
    if eps <= 0.0 {
        return Err(Error::config("excitation probability must be positive"));
    }
    let success = eps * eps
        * cfg.eta
        * cfg.eta
        * (-cfg.segment_m / cfg.attenuation_m).exp();
    let t_segment = cfg.t_cc() / success;
    let ratio = cfg.total_distance_m / cfg.segment_m;
    Ok(RepeaterTiming {
        success_probability: success,
        t_segment_s: t_segment,
        t_total_s: t_segment * ratio * ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversion_probability_known_values() {
        let max_ent = singlet_conversion_probability(0.5_f64.sqrt()).unwrap();
        assert!((max_ent - 1.0).abs() < 1e-12);
        assert_eq!(singlet_conversion_probability(1.0).unwrap(), 0.0);
        assert_eq!(singlet_conversion_probability(0.0).unwrap(), 0.0);
        let p09 = singlet_conversion_probability(0.9).unwrap();
        assert!((p09 - 0.38).abs() < 1e-12, "got {p09}");
        assert!(singlet_conversion_probability(1.2).is_err());
    }

    #[test]
    fn conversion_symmetric_under_schmidt_relabeling() {
        for k in 0..=40 {
            let p = k as f64 / 40.0;
            let partner = (1.0 - p * p).sqrt();
            let a = singlet_conversion_probability(p).unwrap();
            let b = singlet_conversion_probability(partner).unwrap();
            assert!((a - b).abs() < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn certain_edges_span_everything() {
        let net = EntanglementNetwork {
            topology: NetworkTopology::Lattice {
                kind: LatticeKind::Square,
                side: 8,
            },
            amplitudes: EdgeAmplitudes::Uniform(0.5_f64.sqrt()),
            seed: 1,
        };
        let stats = percolate(&net, 10, 3).unwrap();
        assert_eq!(stats.spanning_frequency, 1.0);
        for t in &stats.trials {
            assert_eq!(t.largest_cluster_fraction, 1.0);
            assert!(t.pair_connected.iter().all(|&c| c));
        }
    }

    #[test]
    fn product_edges_leave_singletons() {
        let net = EntanglementNetwork {
            topology: NetworkTopology::Lattice {
                kind: LatticeKind::Square,
                side: 8,
            },
            amplitudes: EdgeAmplitudes::Uniform(1.0),
            seed: 1,
        };
        let stats = percolate(&net, 5, 3).unwrap();
        assert_eq!(stats.spanning_frequency, 0.0);
        for t in &stats.trials {
            assert!((t.largest_cluster_fraction - 1.0 / 64.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trials_are_deterministic_per_seed() {
        let net = EntanglementNetwork {
            topology: NetworkTopology::Lattice {
                kind: LatticeKind::Square,
                side: 16,
            },
            amplitudes: EdgeAmplitudes::Uniform(0.62),
            seed: 5,
        };
        let a = percolate(&net, 50, 11).unwrap();
        let b = percolate(&net, 50, 11).unwrap();
        for (ta, tb) in a.trials.iter().zip(&b.trials) {
            assert_eq!(ta.spanning, tb.spanning);
            assert_eq!(ta.largest_cluster_fraction, tb.largest_cluster_fraction);
        }
    }

    #[test]
    fn degenerate_lattice_is_rejected() {
        assert!(build_graph(&NetworkTopology::Lattice {
            kind: LatticeKind::Square,
            side: 1,
        })
        .is_err());
    }

    #[test]
    fn explicit_graph_terminal_check() {
        let topo = NetworkTopology::Explicit {
            nodes: 3,
            edges: vec![(0, 1), (1, 2)],
            terminals: (0, 2),
        };
        let graph = build_graph(&topo).unwrap();
        assert_eq!(graph.edges.len(), 2);
        assert!(build_graph(&NetworkTopology::Explicit {
            nodes: 3,
            edges: vec![(0, 5)],
            terminals: (0, 2),
        })
        .is_err());
    }

    #[test]
    fn lattice_edge_counts() {
        let sq = build_graph(&NetworkTopology::Lattice {
            kind: LatticeKind::Square,
            side: 4,
        })
        .unwrap();
        assert_eq!(sq.edges.len(), 2 * 4 * 3);
        let tri = build_graph(&NetworkTopology::Lattice {
            kind: LatticeKind::Triangular,
            side: 4,
        })
        .unwrap();
        assert_eq!(tri.edges.len(), 2 * 4 * 3 + 9);
    }

    #[test]
    fn q_swap_composition() {
        assert_eq!(q_swap(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(q_swap(0.7, 0.0).unwrap(), 0.0);
        let chain = (0..5).try_fold(1.0, |acc, _| q_swap(acc, 0.8)).unwrap();
        assert!((chain - 0.32768).abs() < 1e-12, "chain {chain}");
        // Associativity and domination by the weakest link.
        let left = q_swap(q_swap(0.3, 0.5).unwrap(), 0.9).unwrap();
        let right = q_swap(0.3, q_swap(0.5, 0.9).unwrap()).unwrap();
        assert!((left - right).abs() < 1e-15);
        assert!(left <= 0.3);
        assert!(q_swap(1.5, 0.2).is_err());
    }

    #[test]
    fn repeater_reference_point() {
        // eps = eta = 1, negligible attenuation, L = L0: total time is T_cc.
        let cfg = RepeaterConfig {
            total_distance_m: 1000.0,
            segment_m: 1000.0,
            attenuation_m: 1e12,
            epsilon: Some(1.0),
            eta: 1.0,
            t_cc_s: None,
        };
        let timing = repeater_time(&cfg).unwrap();
        assert!((timing.t_total_s - cfg.t_cc()).abs() / cfg.t_cc() < 1e-9);
    }

    #[test]
    fn doubling_distance_quadruples_time() {
        let base = RepeaterConfig {
            total_distance_m: 10_000.0,
            segment_m: 1000.0,
            attenuation_m: 20_000.0,
            epsilon: Some(0.1),
            eta: 0.8,
            t_cc_s: None,
        };
        let doubled = RepeaterConfig {
            total_distance_m: 20_000.0,
            ..base.clone()
        };
        let t1 = repeater_time(&base).unwrap();
        let t2 = repeater_time(&doubled).unwrap();
        assert_eq!(t2.t_total_s, 4.0 * t1.t_total_s);
    }

    #[test]
    fn epsilon_default_is_segment_ratio() {
        let cfg = RepeaterConfig {
            total_distance_m: 10_000.0,
            segment_m: 1000.0,
            attenuation_m: 20_000.0,
            epsilon: None,
            eta: 1.0,
            t_cc_s: None,
        };
        assert!((cfg.epsilon() - 0.1).abs() < 1e-15);
        // L = 10 L0: the success probability carries the 1e-2 factor.
        let timing = repeater_time(&cfg).unwrap();
        let expected = 0.01 * (-0.05_f64).exp();
        assert!((timing.success_probability - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_efficiency_is_rejected() {
        let cfg = RepeaterConfig {
            total_distance_m: 10_000.0,
            segment_m: 1000.0,
            attenuation_m: 20_000.0,
            epsilon: Some(0.0),
            eta: 1.0,
            t_cc_s: None,
        };
        assert!(repeater_time(&cfg).is_err());
        let cfg2 = RepeaterConfig {
            epsilon: Some(0.5),
            eta: 0.0,
            ..cfg
        };
        assert!(repeater_time(&cfg2).is_err());
    }

    #[test]
    fn wilson_interval_sane() {
        let (lo, hi) = wilson_interval(50, 100, 1.0);
        assert!(lo < 0.5 && hi > 0.5);
        assert!(hi - lo < 0.2);
    }
}

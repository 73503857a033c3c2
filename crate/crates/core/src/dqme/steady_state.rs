use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::rates::RateTable;
use crate::error::{Error, Result};

/// Population generator `W` with `dp/dt = W p`; every column sums to zero.
///
/// Each channel contributes its emission rate to `W[target][source]` and its
/// absorption rate to `W[source][target]`. Channels with `target == source`
/// move no population.
pub fn build_population_generator(rt: &RateTable) -> DMatrix<f64> {
    let n = rt.dim();
    let mut w = DMatrix::zeros(n, n);
    for ch in rt.channels() {
        if ch.target == ch.source {
            continue;
        }
        w[(ch.target, ch.source)] += ch.down;
        w[(ch.source, ch.target)] += ch.up;
    }
    for j in 0..n {
        let out: f64 = (0..n).filter(|&i| i != j).map(|i| w[(i, j)]).sum();
        w[(j, j)] = -out;
    }
    w
}

/// Normalised stationary occupations.
#[derive(Clone, Debug, PartialEq)]
pub struct PopulationVector(Vec<f64>);

impl PopulationVector {
    /// Normalises `p`; entries above `-1e-14` are accepted and clamped at zero.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.iter().any(|&x| !(x >= -1e-14)) {
            return Err(Error::Validation(format!("negative population in {p:?}")));
        }
        let mut p: Vec<f64> = p.into_iter().map(|x| x.max(0.0)).collect();
        let total: f64 = p.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::Validation("populations do not normalise".into()));
        }
        for x in &mut p {
            *x /= total;
        }
        Ok(Self(p))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, m: usize) -> f64 {
        self.0[m]
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }
}

/// Closed communicating classes of the transition graph, each sorted.
fn closed_classes(w: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = w.nrows();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for src in 0..n {
        for dst in 0..n {
            if src != dst && w[(dst, src)] > 0.0 {
                graph.add_edge(nodes[src], nodes[dst], ());
            }
        }
    }
    let mut closed: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|scc| {
            let mut members: Vec<usize> = scc.into_iter().map(|v| v.index()).collect();
            members.sort_unstable();
            members
        })
        .filter(|members| {
            members.iter().all(|&src| {
                (0..n).all(|dst| dst == src || w[(dst, src)] <= 0.0 || members.binary_search(&dst).is_ok())
            })
        })
        .collect();
    closed.sort();
    closed
}

/// Stationary populations of `W` by Grassmann-Taksar-Heyman state reduction.
///
/// The reduction is subtraction-free, so tiny populations keep full relative
/// accuracy. States outside the unique closed class get zero weight; more
/// than one closed class is reported as [`Error::Reducible`].
pub fn solve_steady_state(w: &DMatrix<f64>) -> Result<PopulationVector> {
    let n = w.nrows();
    if n == 0 || w.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.ncols(),
        });
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::Validation("generator has non-finite entries".into()));
    }
    let closed = closed_classes(w);
    if closed.len() != 1 {
        return Err(Error::Reducible { blocks: closed });
    }
    let class = &closed[0];
    let k = class.len();

    // a[i][j] = rate class[i] -> class[j]
    let mut a = DMatrix::from_fn(k, k, |i, j| if i == j { 0.0 } else { w[(class[j], class[i])] });
    for last in (1..k).rev() {
        let s: f64 = (0..last).map(|j| a[(last, j)]).sum();
        debug_assert!(s > 0.0, "closed class must stay irreducible under reduction");
        for i in 0..last {
            a[(i, last)] /= s;
        }
        for i in 0..last {
            let via = a[(i, last)];
            if via == 0.0 {
                continue;
            }
            for j in 0..last {
                if i != j {
                    a[(i, j)] += via * a[(last, j)];
                }
            }
        }
    }
    let mut pi = vec![0.0; k];
    pi[0] = 1.0;
    for j in 1..k {
        pi[j] = (0..j).map(|i| pi[i] * a[(i, j)]).sum();
    }

    let mut p = vec![0.0; n];
    for (slot, &state) in class.iter().enumerate() {
        p[state] = pi[slot];
    }
    PopulationVector::new(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dqme::rates::Channel;
    use crate::reservoir::{ReservoirLabel, Reservoirs};
    use proptest::prelude::*;

    fn manual_table(dim: usize, rates: &[(usize, usize, f64, f64)]) -> RateTable {
        let res = Reservoirs::symmetric(1.0, 1.0, 0.001, 10.0).unwrap();
        let channels = rates
            .iter()
            .map(|&(t, s, down, up)| {
                let mut ch = Channel::new(ReservoirLabel::Left, t, s, 0, 1.0, 0.0, &res);
                ch.down = down;
                ch.up = up;
                ch
            })
            .collect();
        RateTable::new(dim, channels).unwrap()
    }

    #[test]
    fn columns_sum_to_zero() {
        let rt = manual_table(3, &[(0, 1, 0.3, 0.1), (1, 2, 0.7, 0.05), (0, 2, 1e-3, 2.0), (2, 2, 5.0, 1.0)]);
        let w = build_population_generator(&rt);
        let scale = w.amax();
        for j in 0..3 {
            assert!(w.column(j).sum().abs() <= 1e-15 * scale);
        }
        assert_eq!(w[(2, 2)], -(0.7 + 1e-3));
    }

    #[test]
    fn zero_rates_give_zero_generator() {
        let rt = manual_table(2, &[(0, 1, 0.0, 0.0)]);
        assert_eq!(build_population_generator(&rt), DMatrix::zeros(2, 2));
        assert!(matches!(
            solve_steady_state(&DMatrix::zeros(2, 2)),
            Err(Error::Reducible { blocks }) if blocks == vec![vec![0], vec![1]]
        ));
    }

    #[test]
    fn symmetric_two_state() {
        let rt = manual_table(2, &[(0, 1, 0.4, 0.4)]);
        let p = solve_steady_state(&build_population_generator(&rt)).unwrap();
        assert_eq!(p.as_slice(), &[0.5, 0.5]);
    }

    #[test]
    fn two_state_balance() {
        // emission 1 -> 0 at 0.9, absorption 0 -> 1 at 0.2
        let rt = manual_table(2, &[(0, 1, 0.9, 0.2)]);
        let p = solve_steady_state(&build_population_generator(&rt)).unwrap();
        assert!((p.get(1) - 0.2 / 1.1).abs() < 1e-15);
        assert!((p.get(0) - 0.9 / 1.1).abs() < 1e-15);
    }

    #[test]
    fn transient_states_get_zero_weight() {
        // state 2 only decays into {0,1}
        let rt = manual_table(3, &[(0, 1, 1.0, 0.5), (0, 2, 1.0, 0.0)]);
        let p = solve_steady_state(&build_population_generator(&rt)).unwrap();
        assert_eq!(p.get(2), 0.0);
        assert!((p.get(0) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn reducible_graph_names_blocks() {
        let rt = manual_table(4, &[(0, 1, 1.0, 1.0), (2, 3, 1.0, 1.0)]);
        let err = solve_steady_state(&build_population_generator(&rt)).unwrap_err();
        assert_eq!(err, Error::Reducible { blocks: vec![vec![0, 1], vec![2, 3]] });
    }

    #[test]
    fn keeps_relative_accuracy_of_tiny_populations() {
        // birth-death chain with ratio 1e-30 per step: p_k ∝ 1e-30^k
        let n = 8;
        let rates: Vec<_> = (0..n - 1).map(|k| (k, k + 1, 1.0, 1e-30)).collect();
        let p = solve_steady_state(&build_population_generator(&manual_table(n, &rates))).unwrap();
        for k in 1..n {
            let ratio = p.get(k) / p.get(k - 1);
            assert!((ratio - 1e-30).abs() < 1e-44, "{ratio}");
        }
    }

    proptest! {
        #[test]
        fn residual_vanishes(n in 2usize..9, xs in proptest::collection::vec(1e-6f64..3.0, 128)) {
            let mut rates = Vec::new();
            let mut k = 0;
            for t in 0..n {
                for s in 0..n {
                    if t != s {
                        rates.push((t, s, xs[k % xs.len()], xs[(k * 7 + 3) % xs.len()] * 0.1));
                        k += 1;
                    }
                }
            }
            let w = build_population_generator(&manual_table(n, &rates));
            let p = solve_steady_state(&w).unwrap();
            let residual = (&w * p.to_dvector()).amax();
            prop_assert!(residual <= 1e-12 * w.amax());
            prop_assert!((p.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.as_slice().iter().all(|&x| x >= 0.0));
        }
    }
}

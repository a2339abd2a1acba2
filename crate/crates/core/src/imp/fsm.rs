//! Unifilar FSM representation of an IMP over the product of component and
//! switch state spaces.

use std::collections::{HashMap, VecDeque};

use crate::alphabet::Symbol;
use crate::error::{Error, Result};
use crate::imp::model::ImpModel;
use crate::markov::stationary::{stationary, SparseRows};
use crate::scalar::Real;

/// A unifilar finite-state source: deterministic next state given the
/// current state and the emitted symbol.
///
/// A composite state lists one state index per component followed by the
/// switch state index. Only states reachable from the initial state through
/// positive-probability emissions are materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct FsmSource<T> {
    states: Vec<Vec<usize>>,
    next: Vec<Vec<Option<usize>>>,
    emissions: Vec<Vec<T>>,
    initial: usize,
}

impl<T: Real> FsmSource<T> {
    /// Builds a source from explicit tables, validating unifilarity and rows.
    pub fn new(
        states: Vec<Vec<usize>>,
        initial: usize,
        next: Vec<Vec<Option<usize>>>,
        emissions: Vec<Vec<T>>,
    ) -> Result<Self> {
        let n = states.len();
        if initial >= n || next.len() != n || emissions.len() != n {
            return Err(Error::InvalidModel("inconsistent FSM table sizes".into()));
        }
        let alpha = emissions.first().map_or(0, Vec::len);
        for (s, (row, succ)) in emissions.iter().zip(&next).enumerate() {
            if row.len() != alpha || succ.len() != alpha {
                return Err(Error::InvalidModel(format!(
                    "FSM state {s} has a ragged row"
                )));
            }
            let sum: T = row.iter().copied().sum();
            if (sum - T::one()).abs() > T::row_tolerance() || row.iter().any(|p| *p < T::zero()) {
                return Err(Error::NonStochastic {
                    context: format!("fsm state {s}"),
                    sum: sum.as_f64(),
                });
            }
            for (p, t) in row.iter().zip(succ) {
                match t {
                    Some(t) if *t >= n => {
                        return Err(Error::InvalidModel("next state out of range".into()))
                    }
                    None if *p > T::zero() => {
                        return Err(Error::InvalidModel(format!(
                            "FSM state {s} emits a symbol without a next state"
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(Self {
            states,
            next,
            emissions,
            initial,
        })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn alphabet_size(&self) -> usize {
        self.emissions.first().map_or(0, Vec::len)
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn initial_state(&self) -> usize {
        self.initial
    }

    pub fn next_state(&self, state: usize, symbol: Symbol) -> Option<usize> {
        self.next[state][symbol]
    }

    pub fn emission(&self, state: usize, symbol: Symbol) -> T {
        self.emissions[state][symbol]
    }

    pub fn emissions(&self, state: usize) -> &[T] {
        &self.emissions[state]
    }

    /// Same machine with new emission probabilities.
    pub fn with_emissions(&self, emissions: Vec<Vec<T>>) -> Result<Self> {
        Self::new(
            self.states.clone(),
            self.initial,
            self.next.clone(),
            emissions,
        )
    }

    /// True when both sources have identical states and next-state functions.
    pub fn same_machine(&self, other: &Self) -> bool {
        self.states == other.states && self.next == other.next && self.initial == other.initial
    }

    /// `log2 P(seq)` by walking the machine from its initial state.
    pub fn log_prob(&self, seq: &[Symbol]) -> T {
        let mut s = self.initial;
        let mut lp = T::zero();
        for &a in seq {
            let p = self.emissions[s][a];
            if p <= T::zero() {
                return T::neg_infinity();
            }
            lp = lp + p.log2();
            s = self.next[s][a].expect("positive emission has a successor");
        }
        lp
    }

    pub fn stationary_distribution(&self) -> Result<Vec<T>> {
        let rows: SparseRows<T> = self
            .emissions
            .iter()
            .zip(&self.next)
            .map(|(row, succ)| {
                let mut merged: Vec<(usize, T)> = Vec::new();
                for (p, t) in row.iter().zip(succ) {
                    if *p > T::zero() {
                        let t = t.unwrap();
                        match merged.iter_mut().find(|(u, _)| *u == t) {
                            Some((_, q)) => *q = *q + *p,
                            None => merged.push((t, *p)),
                        }
                    }
                }
                merged
            })
            .collect();
        stationary(&rows)
    }
}

/// Materializes the product FSM of an IMP by forward reachability.
///
/// Emitting `a` in block `i` moves only component `i` and the switch, and
/// has probability `P_sw(i | switch state) * P_i(a | component state)`.
pub fn build_fsm<T: Real>(imp: &ImpModel<T>) -> FsmSource<T> {
    let m = imp.num_blocks();
    let alpha = imp.alphabet().len();
    let mut initial: Vec<usize> = imp.components().iter().map(|c| c.initial_state()).collect();
    initial.push(imp.switch().initial_state());

    let mut states = vec![initial.clone()];
    let mut index = HashMap::from([(initial, 0usize)]);
    let mut next: Vec<Vec<Option<usize>>> = Vec::new();
    let mut emissions: Vec<Vec<T>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        let tuple = states[s].clone();
        let sw = tuple[m];
        let mut row = vec![T::zero(); alpha];
        let mut succ = vec![None; alpha];
        for (a, slot) in row.iter_mut().enumerate() {
            let (b, j) = imp.locate(a);
            let comp = imp.component(b);
            let p = imp.switch().prob(sw, b) * comp.prob(tuple[b], j);
            *slot = p;
            if p <= T::zero() {
                continue;
            }
            let mut t = tuple.clone();
            t[b] = comp.next_state(tuple[b], j).unwrap();
            t[m] = imp.switch().next_state(sw, b).unwrap();
            let id = *index.entry(t.clone()).or_insert_with(|| {
                states.push(t);
                queue.push_back(states.len() - 1);
                states.len() - 1
            });
            succ[a] = Some(id);
        }
        if next.len() <= s {
            next.resize(s + 1, Vec::new());
            emissions.resize(s + 1, Vec::new());
        }
        next[s] = succ;
        emissions[s] = row;
    }
    FsmSource {
        states,
        next,
        emissions,
        initial: 0,
    }
}

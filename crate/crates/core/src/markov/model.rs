use std::collections::{HashMap, VecDeque};

use rand::Rng;

use crate::alphabet::{Alphabet, Symbol};
use crate::error::{Error, Result};
use crate::markov::stationary::{stationary, SparseRows};
use crate::scalar::Real;

/// A finite-order, time-homogeneous Markov source with a fixed initial state.
///
/// Only states reachable from the initial state are stored. Contexts are
/// ordered oldest symbol first.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovModel<T> {
    alphabet: Alphabet,
    order: usize,
    contexts: Vec<Vec<Symbol>>,
    lookup: HashMap<Vec<Symbol>, usize>,
    rows: Vec<Vec<T>>,
    next: Vec<Vec<Option<usize>>>,
    initial: usize,
    period: usize,
}

impl<T: Real> MarkovModel<T> {
    /// Builds an ergodic (irreducible and aperiodic) model.
    pub fn new<I>(
        alphabet: Alphabet,
        order: usize,
        initial: Vec<Symbol>,
        transitions: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<Symbol>, Vec<T>)>,
    {
        let model = Self::irreducible(alphabet, order, initial, transitions)?;
        if model.period != 1 {
            return Err(Error::NonErgodic(format!(
                "chain is periodic with period {}",
                model.period
            )));
        }
        Ok(model)
    }

    /// Builds an irreducible model without requiring aperiodicity.
    ///
    /// Periodic chains still have a unique stationary law; deterministic
    /// cycles used in tests are the typical case.
    pub fn irreducible<I>(
        alphabet: Alphabet,
        order: usize,
        initial: Vec<Symbol>,
        transitions: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<Symbol>, Vec<T>)>,
    {
        let alpha = alphabet.len();
        let mut given: HashMap<Vec<Symbol>, Vec<T>> = HashMap::new();
        for (ctx, row) in transitions {
            let name = alphabet_join(&alphabet, &ctx);
            if ctx.len() != order {
                return Err(Error::InvalidModel(format!(
                    "context [{name}] has length {} but order is {order}",
                    ctx.len()
                )));
            }
            if ctx.iter().any(|&s| s >= alpha) {
                return Err(Error::InvalidModel("context symbol out of range".into()));
            }
            check_row(&name, &row, alpha)?;
            if given.insert(ctx, row).is_some() {
                return Err(Error::InvalidModel(format!("duplicate context [{name}]")));
            }
        }
        if initial.len() != order || initial.iter().any(|&s| s >= alpha) {
            return Err(Error::InvalidModel(format!(
                "initial state must be a length-{order} context over the alphabet"
            )));
        }
        if !given.contains_key(&initial) {
            return Err(Error::MissingState(alphabet_join(&alphabet, &initial)));
        }

        // Forward reachability over positive-probability transitions.
        let mut contexts = vec![initial.clone()];
        let mut lookup = HashMap::from([(initial, 0usize)]);
        let mut queue = VecDeque::from([0usize]);
        let mut edges: Vec<Vec<Option<Vec<Symbol>>>> = Vec::new();
        while let Some(s) = queue.pop_front() {
            let ctx = contexts[s].clone();
            let row = &given[&ctx];
            let mut succ = vec![None; alpha];
            for a in 0..alpha {
                let nctx = shift(&ctx, a, order);
                if row[a] > T::zero() {
                    if !given.contains_key(&nctx) {
                        return Err(Error::MissingState(alphabet_join(&alphabet, &nctx)));
                    }
                    if !lookup.contains_key(&nctx) {
                        lookup.insert(nctx.clone(), contexts.len());
                        queue.push_back(contexts.len());
                        contexts.push(nctx.clone());
                    }
                }
                succ[a] = Some(nctx);
            }
            if edges.len() <= s {
                edges.resize(s + 1, Vec::new());
            }
            edges[s] = succ;
        }
        if let Some(extra) = given.keys().find(|c| !lookup.contains_key(*c)) {
            return Err(Error::UnreachableState(alphabet_join(&alphabet, extra)));
        }
        let rows: Vec<Vec<T>> = contexts.iter().map(|c| given.remove(c).unwrap()).collect();
        let next: Vec<Vec<Option<usize>>> = edges
            .into_iter()
            .map(|succ| {
                succ.into_iter()
                    .map(|c| c.and_then(|c| lookup.get(&c).copied()))
                    .collect()
            })
            .collect();

        let mut model = Self {
            alphabet,
            order,
            contexts,
            lookup,
            rows,
            next,
            initial: 0,
            period: 0,
        };
        model.period = model.check_irreducible()?;
        Ok(model)
    }

    /// Builds a model by querying `row_of` for every context reachable from `initial`.
    pub fn from_fn<F>(
        alphabet: Alphabet,
        order: usize,
        initial: Vec<Symbol>,
        mut row_of: F,
    ) -> Result<Self>
    where
        F: FnMut(&[Symbol]) -> Vec<T>,
    {
        let alpha = alphabet.len();
        let mut seen: HashMap<Vec<Symbol>, ()> = HashMap::new();
        let mut queue = VecDeque::from([initial.clone()]);
        seen.insert(initial.clone(), ());
        let mut transitions = Vec::new();
        while let Some(ctx) = queue.pop_front() {
            let row = row_of(&ctx);
            if row.len() != alpha {
                return Err(Error::InvalidModel(
                    "row length differs from alphabet size".into(),
                ));
            }
            for (a, p) in row.iter().enumerate() {
                if *p > T::zero() {
                    let n = shift(&ctx, a, order);
                    if seen.insert(n.clone(), ()).is_none() {
                        queue.push_back(n);
                    }
                }
            }
            transitions.push((ctx, row));
        }
        Self::new(alphabet, order, initial, transitions)
    }

    /// Order-0 model with the given symbol probabilities.
    pub fn memoryless(alphabet: Alphabet, probs: Vec<T>) -> Result<Self> {
        Self::new(alphabet, 0, Vec::new(), [(Vec::new(), probs)])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_memoryless(&self) -> bool {
        self.order == 0
    }

    pub fn num_states(&self) -> usize {
        self.contexts.len()
    }

    pub fn initial_state(&self) -> usize {
        self.initial
    }

    pub fn context(&self, state: usize) -> &[Symbol] {
        &self.contexts[state]
    }

    pub fn contexts(&self) -> &[Vec<Symbol>] {
        &self.contexts
    }

    pub fn state_of(&self, context: &[Symbol]) -> Option<usize> {
        self.lookup.get(context).copied()
    }

    pub fn row(&self, state: usize) -> &[T] {
        &self.rows[state]
    }

    pub fn prob(&self, state: usize, symbol: Symbol) -> T {
        self.rows[state][symbol]
    }

    /// Successor state; `None` only when the successor context is unreachable,
    /// which implies the transition has probability zero.
    pub fn next_state(&self, state: usize, symbol: Symbol) -> Option<usize> {
        self.next[state][symbol]
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn is_aperiodic(&self) -> bool {
        self.period == 1
    }

    /// Number of free parameters of a fully parametrized model of this order.
    pub fn free_parameters(&self) -> u128 {
        let a = self.alphabet_size() as u128;
        a.pow(self.order as u32) * (a - 1)
    }

    /// `log2 P(seq)` starting from the fixed initial state.
    pub fn log_prob(&self, seq: &[Symbol]) -> T {
        self.log_prob_from(self.initial, seq)
    }

    pub fn log_prob_from(&self, mut state: usize, seq: &[Symbol]) -> T {
        let mut lp = T::zero();
        for &a in seq {
            let p = self.rows[state][a];
            if p <= T::zero() {
                return T::neg_infinity();
            }
            lp = lp + p.log2();
            state = match self.next[state][a] {
                Some(n) => n,
                None => return T::neg_infinity(),
            };
        }
        lp
    }

    /// `log2 P(seq)` when the initial state is drawn from the stationary law.
    pub fn log_prob_stationary(&self, seq: &[Symbol]) -> Result<T> {
        let pi = self.stationary_distribution()?;
        let total: T = pi
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > T::zero())
            .map(|(s, &w)| w * self.log_prob_from(s, seq).exp2())
            .sum();
        Ok(total.log2())
    }

    pub(crate) fn sparse_rows(&self) -> SparseRows<T> {
        self.rows
            .iter()
            .zip(&self.next)
            .map(|(row, succ)| {
                row.iter()
                    .zip(succ)
                    .filter(|(p, _)| **p > T::zero())
                    .map(|(&p, n)| (n.expect("positive transition has a successor"), p))
                    .collect()
            })
            .collect()
    }

    /// Stationary probability of every stored state, indexed like [`Self::contexts`].
    pub fn stationary_distribution(&self) -> Result<Vec<T>> {
        stationary(&self.sparse_rows())
    }

    /// Draws one symbol from `state` by inverse CDF, returning it with the next state.
    pub fn step<R: Rng + ?Sized>(&self, state: usize, rng: &mut R) -> (Symbol, usize) {
        let a = draw(&self.rows[state], rng);
        (
            a,
            self.next[state][a].expect("sampled symbol has positive probability"),
        )
    }

    /// Samples `n` symbols from the initial state.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Symbol> {
        let mut state = self.initial;
        (0..n)
            .map(|_| {
                let (a, s) = self.step(state, rng);
                state = s;
                a
            })
            .collect()
    }

    /// Returns a copy over a relabelled alphabet of the same size.
    pub fn with_alphabet(&self, alphabet: Alphabet) -> Result<Self> {
        if alphabet.len() != self.alphabet.len() {
            return Err(Error::InvalidModel("alphabet size mismatch".into()));
        }
        Ok(Self {
            alphabet,
            ..self.clone()
        })
    }

    /// Returns the period of the single closed class, or `NonErgodic`.
    fn check_irreducible(&self) -> Result<usize> {
        let n = self.num_states();
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (s, row) in self.rows.iter().enumerate() {
            for (a, p) in row.iter().enumerate() {
                if *p > T::zero() {
                    rev[self.next[s][a].unwrap()].push(s);
                }
            }
        }
        let mut seen = vec![false; n];
        seen[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(s) = stack.pop() {
            for &p in &rev[s] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        if let Some(s) = seen.iter().position(|v| !v) {
            return Err(Error::NonErgodic(format!(
                "state [{}] cannot return to the initial state",
                alphabet_join(&self.alphabet, &self.contexts[s])
            )));
        }
        // Period = gcd of level(u) + 1 - level(v) over all edges u -> v.
        let mut level = vec![usize::MAX; n];
        level[self.initial] = 0;
        let mut queue = VecDeque::from([self.initial]);
        let mut period = 0usize;
        while let Some(s) = queue.pop_front() {
            for (a, p) in self.rows[s].iter().enumerate() {
                if *p <= T::zero() {
                    continue;
                }
                let t = self.next[s][a].unwrap();
                if level[t] == usize::MAX {
                    level[t] = level[s] + 1;
                    queue.push_back(t);
                } else {
                    let d = (level[s] + 1).abs_diff(level[t]);
                    period = gcd(period, d);
                }
            }
        }
        Ok(period.max(1))
    }
}

pub(crate) fn shift(ctx: &[Symbol], a: Symbol, order: usize) -> Vec<Symbol> {
    if order == 0 {
        return Vec::new();
    }
    let mut n = Vec::with_capacity(order);
    n.extend_from_slice(&ctx[1..]);
    n.push(a);
    n
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn alphabet_join(alphabet: &Alphabet, ctx: &[Symbol]) -> String {
    ctx.iter()
        .map(|&s| {
            if s < alphabet.len() {
                alphabet.label(s).to_string()
            } else {
                format!("#{s}")
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn check_row<T: Real>(name: &str, row: &[T], alpha: usize) -> Result<()> {
    if row.len() != alpha {
        return Err(Error::InvalidModel(format!(
            "row for context [{name}] has {} entries, expected {alpha}",
            row.len()
        )));
    }
    if row.iter().any(|p| !p.is_finite() || *p < T::zero()) {
        return Err(Error::InvalidModel(format!(
            "row for context [{name}] has a negative or non-finite entry"
        )));
    }
    let sum: T = row.iter().copied().sum();
    if (sum - T::one()).abs() > T::row_tolerance() {
        return Err(Error::NonStochastic {
            context: name.to_string(),
            sum: sum.as_f64(),
        });
    }
    Ok(())
}

/// Inverse-CDF draw over `probs` in index order.
pub(crate) fn draw<T: Real, R: Rng + ?Sized>(probs: &[T], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.iter().enumerate() {
        let p = p.as_f64();
        if p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

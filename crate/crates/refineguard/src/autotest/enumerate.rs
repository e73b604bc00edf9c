use std::ops::ControlFlow;

use refineguard_core::types::{Generate, Type};
use refineguard_core::Value;

/// Lazily materialized generator streams for each argument.
pub(crate) struct Streams {
    iters: Vec<Generate>,
    cache: Vec<Vec<Value>>,
    done: Vec<bool>,
}

impl Streams {
    pub(crate) fn new(types: &[&Type], seeds: &[u64], cap: usize) -> Self {
        Streams {
            iters: types.iter().zip(seeds).map(|(t, &s)| t.generate(s, cap)).collect(),
            cache: vec![Vec::new(); types.len()],
            done: vec![false; types.len()],
        }
    }

    fn get(&mut self, arg: usize, idx: usize) -> Option<&Value> {
        while self.cache[arg].len() <= idx && !self.done[arg] {
            match self.iters[arg].next() {
                Some(v) => self.cache[arg].push(v),
                None => self.done[arg] = true,
            }
        }
        self.cache[arg].get(idx)
    }

    /// Largest diagonal that can still yield a tuple, once every stream is
    /// exhausted.
    fn last_level(&self) -> Option<usize> {
        self.done
            .iter()
            .all(|&d| d)
            .then(|| self.cache.iter().map(|c| c.len().saturating_sub(1)).sum())
    }

    /// Visits index tuples in order of their sum, so that the leading
    /// (boundary) members of every stream are combined first.
    pub(crate) fn diagonal(&mut self, mut visit: impl FnMut(Vec<Value>) -> ControlFlow<()>) {
        let n = self.iters.len();
        if n == 0 {
            let _ = visit(Vec::new());
            return;
        }
        if (0..n).any(|i| self.get(i, 0).is_none()) {
            return;
        }
        let mut level = 0;
        loop {
            let mut idx = vec![0usize; n];
            if self.level(0, level, &mut idx, &mut visit).is_break() {
                return;
            }
            level += 1;
            if self.last_level().is_some_and(|last| level > last) {
                return;
            }
        }
    }

    fn level(
        &mut self,
        arg: usize,
        left: usize,
        idx: &mut Vec<usize>,
        visit: &mut impl FnMut(Vec<Value>) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let n = idx.len();
        if arg == n - 1 {
            if self.get(arg, left).is_none() {
                return ControlFlow::Continue(());
            }
            idx[arg] = left;
            let tuple = idx.iter().enumerate().map(|(a, &i)| self.cache[a][i].clone()).collect();
            return visit(tuple);
        }
        for i in 0..=left {
            if self.get(arg, i).is_none() {
                break;
            }
            idx[arg] = i;
            self.level(arg + 1, left - i, idx, visit)?;
        }
        ControlFlow::Continue(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use refineguard_core::types::{boolean, constant, integer};

    fn collect(types: &[&Type], limit: usize) -> Vec<Vec<String>> {
        let mut s = Streams::new(types, &vec![1; types.len()], 50);
        let mut out = Vec::new();
        s.diagonal(|t| {
            out.push(t.iter().map(Value::render).collect());
            if out.len() == limit {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        out
    }

    #[test]
    fn finite_product_is_exhausted_exactly_once() {
        let b = boolean();
        let c = constant(Value::int(7));
        let got = collect(&[&b, &b, &c], 100);
        assert_eq!(got.len(), 4);
        let mut uniq = got.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), 4);
    }

    #[test]
    fn boundary_pairs_come_first() {
        let i = integer();
        let got = collect(&[&i, &i], 3);
        assert_eq!(got[0], vec!["0", "0"]);
        assert_eq!(got[1], vec!["0", "1"]);
        assert_eq!(got[2], vec!["1", "0"]);
    }

    #[test]
    fn nullary_yields_one_tuple() {
        assert_eq!(collect(&[], 10), vec![Vec::<String>::new()]);
    }
}

//! Maximum-weight matching between receivers and supporters within one step.

use crate::cost::Cost;

/// A receiver that could be supported by a given stationary teammate,
/// saving `gain` (always positive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Candidate {
    pub receiver: usize,
    pub supporter: usize,
    pub gain: Cost,
}

/// Up to this many candidates every subset is tried directly.
const EXHAUSTIVE_LIMIT: usize = 4;

/// Chooses candidates pairwise disjoint in both receiver and supporter with
/// the largest total gain. Returns the gain and the chosen candidate indices
/// in ascending order.
pub fn max_weight_matching(cands: &[Candidate]) -> (Cost, Vec<usize>) {
    if cands.len() <= EXHAUSTIVE_LIMIT {
        exhaustive(cands)
    } else {
        let mut order: Vec<usize> = (0..cands.len()).collect();
        order.sort_by(|&a, &b| cands[b].gain.cmp(&cands[a].gain).then(a.cmp(&b)));
        let mut suffix = vec![Cost::ZERO; order.len() + 1];
        for i in (0..order.len()).rev() {
            suffix[i] = suffix[i + 1] + cands[order[i]].gain;
        }
        let mut search = Bnb { cands, order: &order, suffix: &suffix, best: Cost::ZERO, best_set: vec![], chosen: vec![] };
        search.run(0, Cost::ZERO);
        let mut set = search.best_set;
        set.sort_unstable();
        (search.best, set)
    }
}

fn disjoint(cands: &[Candidate], set: &[usize], next: usize) -> bool {
    let c = cands[next];
    set.iter().all(|&i| {
        let o = cands[i];
        o.receiver != c.receiver && o.supporter != c.supporter && o.receiver != c.supporter && o.supporter != c.receiver
    })
}

fn exhaustive(cands: &[Candidate]) -> (Cost, Vec<usize>) {
    let mut best = (Cost::ZERO, vec![]);
    for mask in 1u32..(1 << cands.len()) {
        let mut set = Vec::new();
        let mut gain = Cost::ZERO;
        let mut ok = true;
        for i in 0..cands.len() {
            if mask & (1 << i) != 0 {
                if !disjoint(cands, &set, i) {
                    ok = false;
                    break;
                }
                set.push(i);
                gain += cands[i].gain;
            }
        }
        if ok && gain > best.0 {
            best = (gain, set);
        }
    }
    best
}

struct Bnb<'a> {
    cands: &'a [Candidate],
    order: &'a [usize],
    suffix: &'a [Cost],
    best: Cost,
    best_set: Vec<usize>,
    chosen: Vec<usize>,
}

impl Bnb<'_> {
    fn run(&mut self, depth: usize, gain: Cost) {
        if gain > self.best {
            self.best = gain;
            self.best_set.clone_from(&self.chosen);
        }
        if depth == self.order.len() || gain + self.suffix[depth] <= self.best {
            return;
        }
        let i = self.order[depth];
        if disjoint(self.cands, &self.chosen, i) {
            self.chosen.push(i);
            self.run(depth + 1, gain + self.cands[i].gain);
            self.chosen.pop();
        }
        self.run(depth + 1, gain);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cand(receiver: usize, supporter: usize, gain: i64) -> Candidate {
        Candidate { receiver, supporter, gain: Cost::new(gain) }
    }

    #[test]
    fn single_supporter_goes_to_larger_gain() {
        let cands = [cand(0, 2, 3), cand(1, 2, 8)];
        assert_eq!(max_weight_matching(&cands), (Cost::new(8), vec![1]));
    }

    #[test]
    fn empty_input() {
        assert_eq!(max_weight_matching(&[]), (Cost::ZERO, vec![]));
    }

    #[test]
    fn greedy_would_be_wrong() {
        // Taking the 5 blocks both 4s.
        let cands = [cand(0, 3, 5), cand(0, 4, 4), cand(1, 3, 4), cand(2, 5, 1), cand(2, 4, 1), cand(1, 5, 1)];
        assert_eq!(max_weight_matching(&cands).0, Cost::new(9));
    }

    proptest! {
        #[test]
        fn branch_and_bound_matches_brute_force(
            raw in prop::collection::vec((0usize..4, 4usize..8, 1i64..20), 0..10)
        ) {
            let cands: Vec<Candidate> = raw.iter().map(|&(r, s, g)| cand(r, s, g)).collect();
            let (gain, set) = max_weight_matching(&cands);
            let mut brute = Cost::ZERO;
            for mask in 0u32..(1 << cands.len()) {
                let picked: Vec<usize> = (0..cands.len()).filter(|i| mask & (1 << i) != 0).collect();
                let ok = picked.iter().enumerate().all(|(k, &i)| disjoint(&cands, &picked[..k], i));
                if ok {
                    brute = brute.max(picked.iter().map(|&i| cands[i].gain).sum());
                }
            }
            prop_assert_eq!(gain, brute);
            prop_assert_eq!(set.iter().map(|&i| cands[i].gain).sum::<Cost>(), gain);
        }
    }
}

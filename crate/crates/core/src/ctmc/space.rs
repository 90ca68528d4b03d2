use std::collections::{HashMap, VecDeque};

use crate::access::{AccessPolicy, Activity, StateKey};
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Largest chain handled by the dense solver.
pub const DEFAULT_STATE_CAP: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct CtmcState {
    pub activity: Activity,
    pub key: StateKey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// The BSS gains channel access.
    Forward(usize),
    /// The BSS ends its TXOP (taking any SR followers with it).
    Backward(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone)]
pub struct StateSpace {
    pub states: Vec<CtmcState>,
    pub transitions: Vec<Transition>,
    pub n_bss: usize,
    index: HashMap<StateKey, usize>,
}

impl StateSpace {
    /// Assembles a state space from explicit parts. Used for hand-built chains.
    pub fn from_parts(n_bss: usize, states: Vec<CtmcState>, transitions: Vec<Transition>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.key.clone(), i).is_some() {
                return Err(Error::MalformedChain(format!("duplicate state {}", s.key)));
            }
        }
        if states.first().map_or(true, |s| !s.activity.is_empty()) {
            return Err(Error::MalformedChain("state 0 must be the empty state".into()));
        }
        if let Some(t) = transitions.iter().find(|t| t.from >= states.len() || t.to >= states.len()) {
            return Err(Error::MalformedChain(format!("transition {:?} references a missing state", t)));
        }
        Ok(StateSpace { states, transitions, n_bss, index })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, key: &StateKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Whether any state has two or more simultaneous transmissions.
    pub fn has_concurrent_state(&self) -> bool {
        self.states.iter().any(|s| s.activity.len() > 1)
    }
}

/// Breadth-first closure from the empty state under the policy's join and
/// departure rules.
pub fn enumerate_states(scenario: &Scenario, policy: &dyn AccessPolicy, state_cap: usize) -> Result<StateSpace> {
    let n_bss = scenario.n_bss();
    let root = Activity::empty();
    let mut states = vec![CtmcState { key: policy.state_key(&root), activity: root }];
    let mut index: HashMap<StateKey, usize> = HashMap::from([(states[0].key.clone(), 0)]);
    let mut transitions = Vec::new();
    let mut queue = VecDeque::from([0usize]);

    while let Some(from) = queue.pop_front() {
        let activity = states[from].activity.clone();
        let mut targets: Vec<(Activity, EdgeKind)> = Vec::new();

        for bss in (0..n_bss).filter(|&b| !activity.contains(b)) {
            if let Some(entry) = policy.join(scenario, &activity, bss)?.into_entry(bss) {
                targets.push((activity.with(entry), EdgeKind::Forward(bss)));
            }
        }
        for e in activity.entries().iter().filter(|e| activity.has_own_clock(e.bss)) {
            targets.push((policy.depart(scenario, &activity, e.bss)?, EdgeKind::Backward(e.bss)));
        }

        for (next, kind) in targets {
            let key = policy.state_key(&next);
            let to = match index.get(&key) {
                Some(&i) => i,
                None => {
                    if states.len() >= state_cap {
                        return Err(Error::StateCap { cap: state_cap });
                    }
                    let i = states.len();
                    index.insert(key.clone(), i);
                    states.push(CtmcState { activity: next, key });
                    queue.push_back(i);
                    i
                }
            };
            transitions.push(Transition { from, to, kind });
        }
    }

    Ok(StateSpace { states, transitions, n_bss, index })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::access::{PolicyRegistry, PolicySection};
    use crate::channel::RadioParams;
    use crate::deployment::{Deployment, Point};
    use crate::phy::PhyProfile;

    /// BSSs packed within a few meters of each other: every pair senses the
    /// other far above any threshold.
    fn overlapping(n: usize) -> Scenario {
        let pairs: Vec<_> = (0..n)
            .map(|i| {
                let x = i as f64 * 1.5;
                (Point::new(x, 0.0), Point::new(x, 0.5))
            })
            .collect();
        Scenario::new(Deployment::from_positions(&pairs), RadioParams::default(), PhyProfile::default(), 0.1).unwrap()
    }

    fn labels(space: &StateSpace, p_max: f64) -> Vec<String> {
        space.states.iter().map(|s| s.activity.label(p_max)).collect()
    }

    fn policy(kind: &str) -> Box<dyn AccessPolicy> {
        PolicyRegistry::builtin().build(kind, &PolicySection::default()).unwrap()
    }

    #[test]
    fn dcf_alternates_on_overlap() {
        let space = enumerate_states(&overlapping(2), policy("dcf").as_ref(), 512).unwrap();
        assert_eq!(labels(&space, 20.0), ["∅", "A", "B"]);
        assert_eq!(space.transitions.len(), 4);
    }

    #[test]
    fn conpa_two_bss_matches_five_state_chain() {
        let space = enumerate_states(&overlapping(2), policy("conpa").as_ref(), 512).unwrap();
        assert_eq!(labels(&space, 20.0), ["∅", "A", "B", "AB♦", "BA♦"]);
        let ab = space.index_of(&space.states[3].key).unwrap();
        let outgoing: Vec<_> = space.transitions.iter().filter(|t| t.from == ab).collect();
        // AB♦ leaves to A when B ends, and to B (at full power) when A ends.
        assert_eq!(outgoing.len(), 2);
        let to_b = outgoing.iter().find(|t| t.kind == EdgeKind::Backward(0)).unwrap();
        let b = &space.states[to_b.to].activity;
        assert_eq!(b.label(20.0), "B");
        assert_eq!(b.entries()[0].tx_dbm, 20.0);
    }

    #[test]
    fn conpa_counts_all_ordered_subsets() {
        let space = enumerate_states(&overlapping(4), policy("conpa").as_ref(), 512).unwrap();
        assert_eq!(space.len(), 65);
        let three = enumerate_states(&overlapping(3), policy("conpa").as_ref(), 512).unwrap();
        assert_eq!(three.len(), 16);
    }

    #[test]
    fn state_cap_is_enforced() {
        let err = enumerate_states(&overlapping(4), policy("conpa").as_ref(), 64).unwrap_err();
        assert!(matches!(err, Error::StateCap { cap: 64 }));
    }

    #[test]
    fn sr_followers_leave_with_their_holder() {
        // 30 m apart: sensed ≈ -76 dBm, inside the OBSS/PD band.
        let s = Scenario::new(
            Deployment::from_positions(&[
                (Point::new(0.0, 0.0), Point::new(0.0, 1.0)),
                (Point::new(19.0, 0.0), Point::new(19.0, 1.0)),
            ]),
            RadioParams::default(),
            PhyProfile::default(),
            0.1,
        )
        .unwrap();
        let sensed = s.rx_power(20.0, s.ap(0), s.ap(1));
        assert!(sensed >= -82.0 && sensed < -72.0, "{sensed}");
        let space = enumerate_states(&s, policy("sr").as_ref(), 512).unwrap();
        assert_eq!(labels(&space, 20.0), ["∅", "A", "B", "AB♠", "BA♠"]);
        let ab = 3;
        let outgoing: Vec<_> = space.transitions.iter().filter(|t| t.from == ab).collect();
        assert_eq!(outgoing.len(), 1);
        assert_eq!(outgoing[0].kind, EdgeKind::Backward(0));
        assert_eq!(outgoing[0].to, 0);
    }

    #[test]
    fn isolated_bsss_transmit_together_under_dcf() {
        let s = Scenario::new(
            Deployment::from_positions(&[
                (Point::new(0.0, 0.0), Point::new(0.0, 1.0)),
                (Point::new(500.0, 0.0), Point::new(500.0, 1.0)),
            ]),
            RadioParams::default(),
            PhyProfile::default(),
            0.1,
        )
        .unwrap();
        let space = enumerate_states(&s, policy("dcf").as_ref(), 512).unwrap();
        assert_eq!(space.len(), 4);
        assert!(space.has_concurrent_state());
    }
}

//! Finite instantiation of the time-indexed barrier conditions.
//!
//! Conditions quantified over all `t ≥ 0` are discharged by enumerating every
//! distinct (phase, mode) combination the schedule can realize; barriers and
//! dynamics depend on `t` only through the phase, so the finite set below
//! covers all times.

use std::collections::BTreeSet;
use std::fmt;

use crate::qsystem::{PhaseId, Schedule};

/// One instantiated condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanInstance {
    /// Barrier of the phase active at `t = 0` is nonpositive on the initial
    /// region.
    Initial { phase: PhaseId },
    /// Barrier stays at least `d` on the unsafe region; one instance per
    /// distinct barrier polynomial.
    Unsafe { phase: PhaseId },
    /// Single-step growth bound `B_φ(f_φ(z)) − B_φ(z) ≤ ε`; one instance per
    /// distinct (phase, mode) pair.
    Step { phase: PhaseId, mode: usize },
    /// Phase-change bound `B_next(z) − B_φ(z) ≤ γ`; one instance per
    /// consecutive phase pair including the prefix→cycle boundary and the
    /// cyclic wrap.
    Pair { from: PhaseId, to: PhaseId },
    /// k-step induction `B_end(word(z)) − B_start(z) ≤ 0`; one instance per
    /// distinct (start phase, k-step mode word) pair reached by `t = rk`.
    Induction {
        start: PhaseId,
        end: PhaseId,
        word: Vec<usize>,
    },
}

impl fmt::Display for PlanInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanInstance::Initial { phase } => write!(f, "init[{phase}]"),
            PlanInstance::Unsafe { phase } => write!(f, "unsafe[{phase}]"),
            PlanInstance::Step { phase, mode } => write!(f, "step[{phase},m{mode}]"),
            PlanInstance::Pair { from, to } => write!(f, "pair[{from}->{to}]"),
            PlanInstance::Induction { start, end, word } => {
                let w: Vec<String> = word.iter().map(|m| format!("m{m}")).collect();
                write!(f, "induct[{start}->{end},{}]", w.join("."))
            }
        }
    }
}

/// The barrier phases and all condition instances for a schedule and `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePlan {
    pub phases: Vec<PhaseId>,
    pub instances: Vec<PlanInstance>,
}

impl PhasePlan {
    pub fn count(&self, pred: impl Fn(&PlanInstance) -> bool) -> usize {
        self.instances.iter().filter(|i| pred(i)).count()
    }
}

/// Enumerates the finite constraint set for an eventually-periodic schedule.
/// The induction walk visits every prefix multiple of `k` and then cycles;
/// it terminates within `⌈L/k⌉ + p` iterations once a cycle start repeats.
pub fn phase_plan(schedule: &Schedule, k: u32) -> PhasePlan {
    let k = k as usize;
    let phases = schedule.phases();
    let mut instances = Vec::new();

    instances.push(PlanInstance::Initial {
        phase: schedule.phase_at(0),
    });
    for &phase in &phases {
        instances.push(PlanInstance::Unsafe { phase });
    }
    for &phase in &phases {
        instances.push(PlanInstance::Step {
            phase,
            mode: schedule.mode_at_phase(phase),
        });
    }
    for &phase in &phases {
        instances.push(PlanInstance::Pair {
            from: phase,
            to: schedule.successor(phase),
        });
    }

    // Induction instances at t = rk for r = 0, 1, ... until the start phase
    // re-enters a cycle position already handled.
    let mut seen_cycle_starts = BTreeSet::new();
    let mut r = 0usize;
    loop {
        let t = r * k;
        let start = schedule.phase_at(t);
        if let PhaseId::Cycle(c) = start {
            if !seen_cycle_starts.insert(c) {
                break;
            }
        }
        let word: Vec<usize> = (0..k).map(|s| schedule.mode_at(t + s)).collect();
        instances.push(PlanInstance::Induction {
            start,
            end: schedule.phase_at(t + k),
            word,
        });
        r += 1;
    }

    PhasePlan { phases, instances }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_induction(i: &PlanInstance) -> bool {
        matches!(i, PlanInstance::Induction { .. })
    }

    #[test]
    fn single_mode_cycle_k1() {
        // Repeating one gate with k = 1: one barrier, one of everything.
        let s = Schedule::cyclic(vec![0]).unwrap();
        let plan = phase_plan(&s, 1);
        assert_eq!(plan.phases, vec![PhaseId::Cycle(0)]);
        assert_eq!(plan.count(|i| matches!(i, PlanInstance::Initial { .. })), 1);
        assert_eq!(plan.count(|i| matches!(i, PlanInstance::Unsafe { .. })), 1);
        assert_eq!(plan.count(|i| matches!(i, PlanInstance::Step { .. })), 1);
        // The single pair is the trivially satisfiable self-pair.
        assert_eq!(
            plan.count(|i| matches!(
                i,
                PlanInstance::Pair { from: PhaseId::Cycle(0), to: PhaseId::Cycle(0) }
            )),
            1
        );
        assert_eq!(
            plan.count(|i| matches!(i, PlanInstance::Induction { word, .. } if word == &vec![0])),
            1
        );
        assert_eq!(plan.instances.len(), 5);
    }

    #[test]
    fn single_mode_cycle_k2_word_repeats_mode() {
        let s = Schedule::cyclic(vec![0]).unwrap();
        let plan = phase_plan(&s, 2);
        let inductions: Vec<&PlanInstance> =
            plan.instances.iter().filter(|i| is_induction(i)).collect();
        assert_eq!(inductions.len(), 1);
        assert_eq!(
            inductions[0],
            &PlanInstance::Induction {
                start: PhaseId::Cycle(0),
                end: PhaseId::Cycle(0),
                word: vec![0, 0],
            }
        );
    }

    #[test]
    fn two_phase_cycle_k2_single_induction_start() {
        // Alternating modes with k = 2: every induction block starts at
        // phase 0 and walks the word [m0, m1].
        let s = Schedule::cyclic(vec![0, 1]).unwrap();
        let plan = phase_plan(&s, 2);
        assert_eq!(plan.phases.len(), 2);
        assert_eq!(plan.count(|i| matches!(i, PlanInstance::Step { .. })), 2);
        assert_eq!(plan.count(|i| matches!(i, PlanInstance::Pair { .. })), 2);
        let inductions: Vec<&PlanInstance> =
            plan.instances.iter().filter(|i| is_induction(i)).collect();
        assert_eq!(inductions.len(), 1);
        assert_eq!(
            inductions[0],
            &PlanInstance::Induction {
                start: PhaseId::Cycle(0),
                end: PhaseId::Cycle(0),
                word: vec![0, 1],
            }
        );
    }

    #[test]
    fn two_phase_cycle_k1_chains_both_steps() {
        let s = Schedule::cyclic(vec![0, 1]).unwrap();
        let plan = phase_plan(&s, 1);
        let inductions: Vec<&PlanInstance> =
            plan.instances.iter().filter(|i| is_induction(i)).collect();
        assert_eq!(inductions.len(), 2);
        assert!(inductions.contains(&&PlanInstance::Induction {
            start: PhaseId::Cycle(0),
            end: PhaseId::Cycle(1),
            word: vec![0],
        }));
        assert!(inductions.contains(&&PlanInstance::Induction {
            start: PhaseId::Cycle(1),
            end: PhaseId::Cycle(0),
            word: vec![1],
        }));
    }

    #[test]
    fn prefix_plus_identity_cycle() {
        // Circuit U0 U1 U0 then identity: 4 barriers, boundary pair included.
        let s = Schedule::new(vec![0, 1, 0], vec![2]).unwrap();
        let plan = phase_plan(&s, 1);
        assert_eq!(plan.phases.len(), 4);
        assert_eq!(plan.count(|i| matches!(i, PlanInstance::Unsafe { .. })), 4);
        assert_eq!(plan.count(|i| matches!(i, PlanInstance::Step { .. })), 4);
        let pairs: Vec<&PlanInstance> = plan
            .instances
            .iter()
            .filter(|i| matches!(i, PlanInstance::Pair { .. }))
            .collect();
        assert_eq!(pairs.len(), 4);
        assert!(pairs.contains(&&PlanInstance::Pair {
            from: PhaseId::Prefix(2),
            to: PhaseId::Cycle(0),
        }));
        assert!(pairs.contains(&&PlanInstance::Pair {
            from: PhaseId::Cycle(0),
            to: PhaseId::Cycle(0),
        }));
        assert_eq!(plan.count(is_induction), 4);
    }

    #[test]
    fn coprime_k_and_cycle_length_visit_every_coset() {
        // p = 3, k = 2: start phases cycle through 0, 2, 1 before repeating.
        let s = Schedule::cyclic(vec![0, 1, 2]).unwrap();
        let plan = phase_plan(&s, 2);
        let starts: Vec<PhaseId> = plan
            .instances
            .iter()
            .filter_map(|i| match i {
                PlanInstance::Induction { start, .. } => Some(*start),
                _ => None,
            })
            .collect();
        assert_eq!(
            starts,
            vec![PhaseId::Cycle(0), PhaseId::Cycle(2), PhaseId::Cycle(1)]
        );
    }

    /// Every concrete time step must be covered by some instance; this is
    /// the safety net for schedules no case study exercises.
    #[test]
    fn plan_covers_all_times_for_random_schedules() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..60 {
            let num_modes = rng.gen_range(1..4usize);
            let prefix_len = rng.gen_range(0..4usize);
            let cycle_len = rng.gen_range(1..4usize);
            let prefix: Vec<usize> = (0..prefix_len).map(|_| rng.gen_range(0..num_modes)).collect();
            let cycle: Vec<usize> = (0..cycle_len).map(|_| rng.gen_range(0..num_modes)).collect();
            let k = rng.gen_range(1..4usize);
            let s = Schedule::new(prefix, cycle).unwrap();
            let plan = phase_plan(&s, k as u32);

            for t in 0..200usize {
                let phase = s.phase_at(t);
                assert!(plan.instances.contains(&PlanInstance::Step {
                    phase,
                    mode: s.mode_at(t),
                }));
                assert!(plan.instances.contains(&PlanInstance::Pair {
                    from: phase,
                    to: s.phase_at(t + 1),
                }));
                if t % k == 0 {
                    let word: Vec<usize> = (0..k).map(|i| s.mode_at(t + i)).collect();
                    assert!(
                        plan.instances.contains(&PlanInstance::Induction {
                            start: phase,
                            end: s.phase_at(t + k),
                            word: word.clone(),
                        }),
                        "uncovered induction at t={t}: {phase} {word:?}"
                    );
                }
            }
        }
    }
}

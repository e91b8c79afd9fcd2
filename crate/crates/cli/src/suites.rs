//! The paper's case-study systems and the reproduction suites.

use qbarrier_core::qsystem::{
    gate, grover_diffusion, grover_oracle, tensor_power, QSystem, Region, Schedule,
    SphereEncoding, UnitaryMode,
};
use qbarrier_core::hsos::GramForm;
use qbarrier_core::synth::Hyperparams;

fn state_space(dim: usize) -> Region {
    Region::new(dim).with_sphere(SphereEncoding::Equality)
}

/// Repeated-Z system: `f_t(z) = Z^{⊗n} z` with the target-state regions
/// (initial concentrates on |p⟩, unsafe lets the tail mass grow).
pub fn z_gate_system(n: u32, p: usize) -> QSystem {
    let dim = 1usize << n;
    let initial = Region::new(dim)
        .with_amplitude_at_least(p, 0.9)
        .expect("target index in range")
        .with_sphere(SphereEncoding::Equality);
    let unsafe_region = Region::new(dim)
        .with_tail_mass_at_least(p, 0.2)
        .expect("target index in range")
        .with_sphere(SphereEncoding::Equality);
    QSystem::new(
        n,
        vec![tensor_power(&gate("Z").expect("known gate"), n)],
        Schedule::cyclic(vec![0]).expect("nonempty"),
        state_space(dim),
        initial,
        unsafe_region,
    )
    .expect("well-formed system")
}

/// Repeated-X system with the uniform-superposition band regions,
/// `err = 1/10^{n+1}`.
pub fn x_gate_system(n: u32, p: usize) -> QSystem {
    let dim = 1usize << n;
    let err = 1.0 / 10f64.powi(n as i32 + 1);
    let uniform = 1.0 / dim as f64;
    let mut initial = Region::new(dim);
    for j in 0..dim {
        initial = initial
            .with_amplitude_band(j, uniform - err, uniform + err)
            .expect("index in range");
    }
    let initial = initial.with_sphere(SphereEncoding::Equality);
    let unsafe_region = Region::new(dim)
        .with_amplitude_at_least(p, uniform + 2.0 * err)
        .expect("target index in range")
        .with_sphere(SphereEncoding::Equality);
    QSystem::new(
        n,
        vec![tensor_power(&gate("X").expect("known gate"), n)],
        Schedule::cyclic(vec![0]).expect("nonempty"),
        state_space(dim),
        initial,
        unsafe_region,
    )
    .expect("well-formed system")
}

/// Alternating X/Z system: X on even steps, Z on odd steps; the unsafe set
/// is the middle band of the target amplitude.
pub fn xz_gate_system(n: u32, p: usize) -> QSystem {
    let dim = 1usize << n;
    let initial = Region::new(dim)
        .with_amplitude_at_least(p, 0.9)
        .expect("target index in range")
        .with_sphere(SphereEncoding::Equality);
    let unsafe_region = Region::new(dim)
        .with_amplitude_band(p, 0.2, 0.8)
        .expect("target index in range")
        .with_sphere(SphereEncoding::Equality);
    QSystem::new(
        n,
        vec![
            tensor_power(&gate("X").expect("known gate"), n),
            tensor_power(&gate("Z").expect("known gate"), n),
        ],
        Schedule::cyclic(vec![0, 1]).expect("nonempty"),
        state_space(dim),
        initial,
        unsafe_region,
    )
    .expect("well-formed system")
}

/// Which dynamics the Grover job runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroverVariant {
    /// Oracle on even steps, diffusion on odd steps.
    Alternating,
    /// Single map `D·O` per step (even-step view).
    EvenComposite,
    /// Single map `O·D` per step (odd-step view).
    OddComposite,
}

/// Grover system with marked element `m`, unsafe concentration on the
/// unmarked `p`. The initial region is the post-Hadamard superposition
/// neighborhood with both amplitude and imaginary-part bands.
pub fn grover_system(n: u32, m: usize, p: usize, variant: GroverVariant) -> QSystem {
    let dim = 1usize << n;
    let err = 1.0 / 10f64.powi(n as i32 + 1);
    let uniform = 1.0 / dim as f64;
    let mut initial = Region::new(dim);
    for j in 0..dim {
        initial = initial
            .with_amplitude_band(j, uniform - err, uniform + err)
            .expect("index in range")
            .with_imag_band(j, err.sqrt())
            .expect("index in range");
    }
    let initial = initial.with_sphere(SphereEncoding::Equality);
    let unsafe_region = Region::new(dim)
        .with_amplitude_at_least(p, 0.9)
        .expect("target index in range")
        .with_sphere(SphereEncoding::Equality);

    let oracle = grover_oracle(n, m).expect("marked element in range");
    let diffusion = grover_diffusion(n);
    let (modes, cycle): (Vec<UnitaryMode>, Vec<usize>) = match variant {
        GroverVariant::Alternating => (vec![oracle, diffusion], vec![0, 1]),
        GroverVariant::EvenComposite => {
            (vec![diffusion.compose(&oracle).expect("unitary")], vec![0])
        }
        GroverVariant::OddComposite => {
            (vec![oracle.compose(&diffusion).expect("unitary")], vec![0])
        }
    };
    QSystem::new(
        n,
        modes,
        Schedule::cyclic(cycle).expect("nonempty"),
        state_space(dim),
        initial,
        unsafe_region,
    )
    .expect("well-formed system")
}

/// One reproduction job: a named system plus its hyperparameters.
#[derive(Debug, Clone)]
pub struct SuiteJob {
    pub experiment: String,
    pub n_qubits: u32,
    pub target: usize,
    pub system: QSystem,
    pub hyper: Hyperparams,
    /// Large jobs are excluded from default runs.
    pub large: bool,
}

/// Suite selector accepted by the `reproduce` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ZGate,
    XGate,
    XzGates,
    Grover,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "z-gate" => Ok(Suite::ZGate),
            "x-gate" => Ok(Suite::XGate),
            "xz-gates" => Ok(Suite::XzGates),
            "grover" => Ok(Suite::Grover),
            "all" => Ok(Suite::All),
            other => Err(format!(
                "unknown suite `{other}` (expected z-gate|x-gate|xz-gates|grover|all)"
            )),
        }
    }
}

/// Builds the suite's job list.
///
/// Degrees: the repeated-Z jobs use δ=2 as in the original study. The X and
/// alternating-X/Z jobs run at δ=4: degree 2 is provably infeasible for
/// their regions under the k-inductive conditions, and degree 4 is where
/// certificates genuinely exist. Grover jobs stay at δ=2, where the
/// expected outcome is that no certificate exists.
pub fn suite_jobs(suite: Suite, allow_large: bool) -> Vec<SuiteJob> {
    let mut jobs = Vec::new();
    let push_z = |jobs: &mut Vec<SuiteJob>| {
        for n in [1u32, 2] {
            for p in 0..(1usize << n) {
                jobs.push(SuiteJob {
                    experiment: "Z gate".into(),
                    n_qubits: n,
                    target: p,
                    system: z_gate_system(n, p),
                    hyper: Hyperparams::new(1, 0.01, 0.01, 2)
                        .with_separation_margin(0.01)
                        .with_gram_form(GramForm::RealCombination),
                    large: false,
                });
            }
        }
    };
    let push_x = |jobs: &mut Vec<SuiteJob>| {
        for n in [1u32, 2] {
            for p in 0..(1usize << n) {
                jobs.push(SuiteJob {
                    experiment: "X gate".into(),
                    n_qubits: n,
                    target: p,
                    system: x_gate_system(n, p),
                    hyper: Hyperparams::new(2, 0.01, 0.0, 4)
                        .with_separation_margin(0.01)
                        .with_gram_form(GramForm::RealCombination),
                    large: false,
                });
            }
        }
    };
    let push_xz = |jobs: &mut Vec<SuiteJob>, allow_large: bool| {
        for n in [1u32, 2] {
            for p in 0..(1usize << n) {
                jobs.push(SuiteJob {
                    experiment: "X and Z gates".into(),
                    n_qubits: n,
                    target: p,
                    system: xz_gate_system(n, p),
                    hyper: Hyperparams::new(2, 0.01, 0.01, 4)
                        .with_separation_margin(0.01)
                        .with_gram_form(GramForm::RealCombination),
                    large: false,
                });
            }
        }
        if allow_large {
            jobs.push(SuiteJob {
                experiment: "X and Z gates".into(),
                n_qubits: 3,
                target: 0,
                system: xz_gate_system(3, 0),
                hyper: Hyperparams::new(2, 0.01, 0.01, 4)
                        .with_separation_margin(0.01)
                        .with_gram_form(GramForm::RealCombination),
                large: true,
            });
        }
    };
    let push_grover = |jobs: &mut Vec<SuiteJob>| {
        let variants = [
            ("Grover (k=1)", GroverVariant::Alternating, 1u32),
            ("Grover (k=2)", GroverVariant::Alternating, 2),
            ("Grover (even)", GroverVariant::EvenComposite, 1),
            ("Grover (odd)", GroverVariant::OddComposite, 1),
        ];
        for (name, variant, k) in variants {
            jobs.push(SuiteJob {
                experiment: name.into(),
                n_qubits: 2,
                target: 1,
                system: grover_system(2, 0, 1, variant),
                hyper: Hyperparams::new(k, 0.01, 0.01, 2)
                        .with_separation_margin(0.01)
                        .with_gram_form(GramForm::RealCombination),
                large: false,
            });
        }
    };

    match suite {
        Suite::ZGate => push_z(&mut jobs),
        Suite::XGate => push_x(&mut jobs),
        Suite::XzGates => push_xz(&mut jobs, allow_large),
        Suite::Grover => push_grover(&mut jobs),
        Suite::All => {
            push_z(&mut jobs);
            push_x(&mut jobs);
            push_xz(&mut jobs, allow_large);
            push_grover(&mut jobs);
        }
    }
    jobs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_suite_has_six_rows() {
        let jobs = suite_jobs(Suite::ZGate, false);
        assert_eq!(jobs.len(), 6);
        assert!(jobs.iter().all(|j| j.hyper.k == 1));
    }

    #[test]
    fn grover_suite_has_four_rows() {
        let jobs = suite_jobs(Suite::Grover, false);
        assert_eq!(jobs.len(), 4);
        let names: Vec<&str> = jobs.iter().map(|j| j.experiment.as_str()).collect();
        assert_eq!(
            names,
            vec!["Grover (k=1)", "Grover (k=2)", "Grover (even)", "Grover (odd)"]
        );
    }

    #[test]
    fn large_job_is_flag_gated() {
        assert_eq!(suite_jobs(Suite::XzGates, false).len(), 6);
        let with_large = suite_jobs(Suite::XzGates, true);
        assert_eq!(with_large.len(), 7);
        assert!(with_large.last().unwrap().large);
    }

    #[test]
    fn x_gate_regions_match_stated_bands() {
        let sys = x_gate_system(2, 0);
        // 4 bands × 3 polynomials (lo, hi, product) on the initial set.
        assert_eq!(sys.initial().inequalities().len(), 12);
        let w = [qbarrier_core::C64::new(0.5, 0.0); 4];
        assert!(sys.initial().contains(&w, 1e-9));
    }
}

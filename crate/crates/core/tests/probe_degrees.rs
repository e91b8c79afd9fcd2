//! Temporary probe: solve the case-study systems at several degrees.

use qbarrier_core::hsos::ClarabelBackend;
use qbarrier_core::qsystem::{
    gate, grover_diffusion, grover_oracle, tensor_power, QSystem, Region, Schedule, SphereEncoding,
};
use qbarrier_core::synth::{synthesize, Hyperparams, NoCertReason, SynthOutcome};

fn region(dim: usize) -> Region {
    Region::new(dim).with_sphere(SphereEncoding::Equality)
}

fn status(outcome: &SynthOutcome) -> String {
    match outcome {
        SynthOutcome::Certificate(_) => "solved".into(),
        SynthOutcome::NoCertificate { reason } => match reason {
            NoCertReason::Infeasible => "unsolved(infeasible)".into(),
            NoCertReason::SolverError(m) => format!("unsolved(solver: {m})"),
        },
    }
}

#[test]
fn probe() {
    let backend = ClarabelBackend::default();

    // X gate n=1, p=0: k=2, eps=0.01, gamma=0.
    for delta in [2u32, 4] {
        let n = 1u32;
        let dim = 1usize << n;
        let err = 1.0 / 10f64.powi(n as i32 + 1);
        let mut initial = Region::new(dim);
        for j in 0..dim {
            initial = initial
                .with_amplitude_band(j, 1.0 / dim as f64 - err, 1.0 / dim as f64 + err)
                .unwrap();
        }
        let initial = initial.with_sphere(SphereEncoding::Equality);
        let unsafe_region = Region::new(dim)
            .with_amplitude_at_least(0, 1.0 / dim as f64 + 2.0 * err)
            .unwrap()
            .with_sphere(SphereEncoding::Equality);
        let sys = QSystem::new(
            n,
            vec![tensor_power(&gate("X").unwrap(), n)],
            Schedule::cyclic(vec![0]).unwrap(),
            region(dim),
            initial,
            unsafe_region,
        )
        .unwrap();
        let hyper = Hyperparams::new(2, 0.01, 0.0, delta);
        let t = std::time::Instant::now();
        let res = synthesize(&sys, &hyper, &backend).unwrap();
        println!(
            "X n=1 delta={delta}: {} ({:.1}s, vars={}, eqs={}, blocks={})",
            status(&res.outcome),
            t.elapsed().as_secs_f64(),
            res.stats.num_vars,
            res.stats.num_equalities,
            res.stats.num_psd_blocks
        );
    }

    // XZ n=1, p=0: k=2, eps=gamma=0.01.
    for delta in [2u32, 4] {
        let dim = 2usize;
        let initial = Region::new(dim)
            .with_amplitude_at_least(0, 0.9)
            .unwrap()
            .with_sphere(SphereEncoding::Equality);
        let unsafe_region = Region::new(dim)
            .with_amplitude_band(0, 0.2, 0.8)
            .unwrap()
            .with_sphere(SphereEncoding::Equality);
        let sys = QSystem::new(
            1,
            vec![gate("X").unwrap(), gate("Z").unwrap()],
            Schedule::cyclic(vec![0, 1]).unwrap(),
            region(dim),
            initial,
            unsafe_region,
        )
        .unwrap();
        let hyper = Hyperparams::new(2, 0.01, 0.01, delta);
        let t = std::time::Instant::now();
        let res = synthesize(&sys, &hyper, &backend).unwrap();
        println!(
            "XZ n=1 delta={delta}: {} ({:.1}s, vars={}, eqs={}, blocks={})",
            status(&res.outcome),
            t.elapsed().as_secs_f64(),
            res.stats.num_vars,
            res.stats.num_equalities,
            res.stats.num_psd_blocks
        );
    }

    // Grover n=2 m=0 p=1, k=1, delta=2.
    {
        let dim = 4usize;
        let err: f64 = 1.0 / 1000.0;
        let mut initial = Region::new(dim);
        for j in 0..dim {
            initial = initial
                .with_amplitude_band(j, 0.25 - err, 0.25 + err)
                .unwrap()
                .with_imag_band(j, err.sqrt())
                .unwrap();
        }
        let initial = initial.with_sphere(SphereEncoding::Equality);
        let unsafe_region = Region::new(dim)
            .with_amplitude_at_least(1, 0.9)
            .unwrap()
            .with_sphere(SphereEncoding::Equality);
        let sys = QSystem::new(
            2,
            vec![grover_oracle(2, 0).unwrap(), grover_diffusion(2)],
            Schedule::cyclic(vec![0, 1]).unwrap(),
            region(dim),
            initial,
            unsafe_region,
        )
        .unwrap();
        let hyper = Hyperparams::new(1, 0.01, 0.01, 2);
        let t = std::time::Instant::now();
        let res = synthesize(&sys, &hyper, &backend).unwrap();
        println!(
            "Grover k=1 delta=2: {} ({:.1}s, vars={}, eqs={}, blocks={})",
            status(&res.outcome),
            t.elapsed().as_secs_f64(),
            res.stats.num_vars,
            res.stats.num_equalities,
            res.stats.num_psd_blocks
        );
    }
}

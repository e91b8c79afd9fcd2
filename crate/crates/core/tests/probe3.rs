use qbarrier_core::hsos::backend::{solve, SolveOutcome};
use qbarrier_core::hsos::clarabel_backend::ClarabelBackend;
use qbarrier_core::qsystem::{gate, tensor_power, QSystem, Region, Schedule, SphereEncoding};
use qbarrier_core::synth::build::build_constraints;
use qbarrier_core::synth::Hyperparams;

fn x_system(n: u32, p: usize) -> QSystem {
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
        .with_amplitude_at_least(p, 1.0 / dim as f64 + 2.0 * err)
        .unwrap()
        .with_sphere(SphereEncoding::Equality);
    QSystem::new(
        n,
        vec![tensor_power(&gate("X").unwrap(), n)],
        Schedule::cyclic(vec![0]).unwrap(),
        Region::new(dim).with_sphere(SphereEncoding::Equality),
        initial,
        unsafe_region,
    )
    .unwrap()
}

#[test]
fn probe_trace_objective() {
    let sys = x_system(1, 0);
    let hyper = Hyperparams::new(2, 0.01, 0.0, 4);
    let mut art = build_constraints(&sys, &hyper).unwrap();

    // Trace objective: sum of diagonal entries of every PSD block.
    let mut obj = std::collections::BTreeMap::new();
    for block in &art.problem.psd_blocks {
        for i in 0..block.dim {
            let e = block.entry(i, i);
            for (v, c) in &e.terms {
                *obj.entry(*v).or_insert(0.0) += c;
            }
        }
    }
    art.problem.objective = obj.into_iter().collect();

    let backend = ClarabelBackend { verbose: true, time_limit: 120.0, ..Default::default() };
    let t = std::time::Instant::now();
    match solve(&art.problem, &backend) {
        SolveOutcome::Feasible(x) => {
            let residual = art
                .matched
                .iter()
                .map(|m| qbarrier_core::synth::build::expression_residual(m, &x))
                .fold(0.0f64, f64::max);
            println!("FEASIBLE in {:.1}s, residual {residual:.3e}", t.elapsed().as_secs_f64());
        }
        SolveOutcome::Infeasible => println!("INFEASIBLE in {:.1}s", t.elapsed().as_secs_f64()),
        SolveOutcome::SolverError(m) => println!("ERROR {m} in {:.1}s", t.elapsed().as_secs_f64()),
    }
}

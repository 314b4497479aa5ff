use fsmcmc::coupling::{d_global, DistanceParams};
use fsmcmc::kernel::{KernelParams, MhKernel, ProposalKind};
use fsmcmc::measure::GaussianMeasure;
use fsmcmc::rng::{RngStream, Streams};
use fsmcmc::target::TargetDensity;
use fsmcmc::trace::{read_binary, read_csv, write_binary, write_csv};
use proptest::prelude::*;

fn kernel(kind: ProposalKind, delta: f64, m: usize) -> MhKernel {
    MhKernel::new(
        kind,
        KernelParams::new(delta).unwrap(),
        TargetDensity::norm_tilt(1.5).unwrap(),
        GaussianMeasure::power_law(1.0, m).unwrap(),
    )
    .unwrap()
}

/// Lebesgue log-density of the target, up to a constant.
fn log_pi(k: &MhKernel, x: &[f64]) -> f64 {
    let gauss: f64 = x.iter().zip(k.measure().lambdas()).map(|(v, l)| 0.5 * v * v / (l * l)).sum();
    -k.target().phi(x) - gauss
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn both_kernels_satisfy_detailed_balance(
        x in prop::collection::vec(-2.0f64..2.0, 4),
        y in prop::collection::vec(-2.0f64..2.0, 4),
        delta in 0.01f64..0.49,
        rwm in any::<bool>(),
    ) {
        let kind = if rwm { ProposalKind::Rwm } else { ProposalKind::Pcn };
        let k = kernel(kind, delta, 4);
        let fwd = log_pi(&k, &x) + k.proposal_log_density(&x, &y).unwrap() + k.log_accept_prob(&x, &y).unwrap();
        let bwd = log_pi(&k, &y) + k.proposal_log_density(&y, &x).unwrap() + k.log_accept_prob(&y, &x).unwrap();
        prop_assert!((fwd - bwd).abs() < 1e-9 * (1.0 + fwd.abs()), "{fwd} vs {bwd}");
    }

    #[test]
    fn global_distance_is_a_bounded_metric(
        x in prop::collection::vec(-5.0f64..5.0, 3),
        y in prop::collection::vec(-5.0f64..5.0, 3),
        z in prop::collection::vec(-5.0f64..5.0, 3),
        eps in 0.01f64..2.0,
    ) {
        let p = DistanceParams::global(eps).unwrap();
        let (xy, yz, xz) = (d_global(&x, &y, &p), d_global(&y, &z, &p), d_global(&x, &z, &p));
        prop_assert!((0.0..=1.0).contains(&xy));
        prop_assert_eq!(xy, d_global(&y, &x, &p));
        prop_assert!(xz <= xy + yz + 1e-12);
    }
}

#[test]
fn trace_files_round_trip_through_disk() {
    let k = kernel(ProposalKind::Rwm, 0.05, 5);
    let t = k.run_chain(&[0.0; 5], 300, RngStream::named(4, "e2e", 0)).unwrap();
    let dir = std::env::temp_dir().join(format!("fsmcmc-e2e-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let bin = dir.join("chain.bin");
    write_binary(&t, &mut std::fs::File::create(&bin).unwrap()).unwrap();
    assert_eq!(read_binary(&mut std::fs::File::open(&bin).unwrap()).unwrap(), t);

    let csv = dir.join("chain.csv");
    write_csv(&t, &mut std::fs::File::create(&csv).unwrap()).unwrap();
    let mut r = std::io::BufReader::new(std::fs::File::open(&csv).unwrap());
    let back = read_csv(&mut r, k.descriptor(), t.seed).unwrap();
    assert_eq!(back.accept_flags, t.accept_flags);
    assert_eq!(back.states, t.states);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn replicas_do_not_depend_on_thread_count() {
    use rayon::prelude::*;
    let k = kernel(ProposalKind::Pcn, 0.2, 6);
    let s = Streams::new(8, "threads");
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
            (0..16u64)
                .into_par_iter()
                .map(|r| k.run_functional(&[0.0; 6], 500, s.stream(r, 0), |x| x[0]).unwrap().values)
                .collect::<Vec<_>>()
        })
    };
    assert_eq!(run(1), run(4));
}

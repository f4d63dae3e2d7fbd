use hyperwit::entanglement::{alpha_multipartite, closed_form_alpha};
use hyperwit::hypergraph::{Bipartition, Family, Hypergraph};
use hyperwit::states::{build_state, stabilizer_matrix, SignState, SignStateDump};
use hyperwit::witness::{projector_witness, resolve_alpha, stabilizer_witness, AlphaSource};
use hyperwit::Scalar;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn sweep(h: &Hypergraph) -> f64 {
    alpha_multipartite(&build_state(h).unwrap(), 12).unwrap().alpha
}

#[test]
fn closed_forms_match_brute_force_up_to_12() {
    for f in Family::ALL {
        for n in f.min_n()..=12 {
            let h = Hypergraph::family(f, n).unwrap();
            let closed = closed_form_alpha(f, n).unwrap().to_f64();
            assert!((sweep(&h) - closed).abs() < 1e-9, "{f} n = {n}");
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / norm).collect()
}

fn sub_index(n: usize, vertices: &[usize], x: usize) -> usize {
    vertices.iter().fold(0, |acc, &v| (acc << 1) | ((x >> (n - v)) & 1))
}

/// Random product `|a>_A |b>_B` across a random bipartition.
fn random_biseparable(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let parts = Bipartition::all(n).unwrap();
    let bp = &parts[rng.random_range(0..parts.len())];
    let (a, b) = (bp.part_a().to_vec(), bp.part_b());
    let va = random_unit(rng, 1 << a.len());
    let vb = random_unit(rng, 1 << b.len());
    (0..1usize << n).map(|x| va[sub_index(n, &a, x)] * vb[sub_index(n, &b, x)]).collect()
}

#[test]
fn witnesses_are_nonnegative_on_biseparable_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut checked = 0;
    for f in Family::ALL {
        for n in f.min_n().max(3)..=6 {
            let h = Hypergraph::family(f, n).unwrap();
            let alpha = Scalar::Approx(sweep(&h));
            let proj = projector_witness(&h, alpha).unwrap();
            let stab = stabilizer_witness(&h, alpha).unwrap();
            let target = build_state(&h).unwrap().amplitudes();
            let ks: Vec<_> = (1..=n).map(|v| stabilizer_matrix(&h, v).unwrap()).collect();
            for _ in 0..1000 / (3 * 4) + 1 {
                let psi = random_biseparable(&mut rng, n);
                let overlap: Complex64 = psi.iter().zip(&target).map(|(p, t)| p * t).sum();
                assert!(proj.alpha.to_f64() - overlap.norm_sqr() >= -1e-9);
                let mut stab_sum = 0.0;
                for k in &ks {
                    let mut e = Complex64::new(0.0, 0.0);
                    for (y, (&t, &neg)) in k.target.iter().zip(&k.negative).enumerate() {
                        let term = psi[t].conj() * psi[y];
                        e += if neg { -term } else { term };
                    }
                    stab_sum += e.re;
                }
                assert!(stab.beta.unwrap().to_f64() - stab_sum >= -1e-9);
                checked += 1;
            }
        }
    }
    assert!(checked >= 1000);
}

#[test]
fn generic_witness_uses_kmax_bound() {
    let h = Hypergraph::canonicalize([vec![1, 2, 3], vec![3, 4]], 4).unwrap();
    assert_eq!(resolve_alpha(&h, AlphaSource::Auto).unwrap(), Scalar::exact(3, 4));
    let measured = resolve_alpha(&h, AlphaSource::Measured).unwrap().to_f64();
    assert!(measured <= 0.75 + 1e-9);
}

#[test]
fn text_and_hex_formats_round_trip() {
    let h: Hypergraph = "n=5; edges=[[4,3],[1,2,4,5]]".parse().unwrap();
    assert_eq!(h.to_string(), "n=5; edges=[[1,2,4,5],[3,4]]");
    assert_eq!(h.to_string().parse::<Hypergraph>().unwrap(), h);
    let json = serde_json::to_string(&h).unwrap();
    assert_eq!(serde_json::from_str::<Hypergraph>(&json).unwrap(), h);
    let s = build_state(&h).unwrap();
    let dump = SignStateDump::from(&s);
    assert_eq!(SignState::try_from(&dump).unwrap(), s);
    assert_eq!(SignState::from_hex(s.n(), &s.to_hex()).unwrap(), s);
    assert!("n=2; edges=[[1,3]]".parse::<Hypergraph>().is_err());
}

fn arb_hypergraph() -> impl Strategy<Value = Hypergraph> {
    (2usize..=7).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::btree_set(1..=n, 1..=n), 0..8)
            .prop_map(move |es| Hypergraph::canonicalize(es.into_iter().map(|e| e.into_iter().collect::<Vec<_>>()), n).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn alpha_is_relabeling_invariant(h in arb_hypergraph(), seed in any::<u64>()) {
        let n = h.n();
        let mut perm: Vec<usize> = (1..=n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let p = h.permuted(&perm).unwrap();
        prop_assert!((sweep(&h) - sweep(&p)).abs() < 1e-9);
    }
}

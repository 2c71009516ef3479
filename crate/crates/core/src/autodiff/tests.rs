use std::rc::Rc;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;

fn t(rows: &[&[f64]]) -> Tensor {
    Tensor::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn matmul_examples() {
    let mut tape = Tape::new();
    let a = tape.constant(t(&[&[1.0, 2.0], &[3.0, 4.0]])).unwrap();
    let b = tape.constant(t(&[&[1.0], &[1.0]])).unwrap();
    let c = tape.matmul(a, b).unwrap();
    assert_eq!(tape.value(c), &t(&[&[3.0], &[7.0]]));

    let i = tape.constant(Tensor::identity(2)).unwrap();
    let x = tape.constant(t(&[&[0.5, -1.5], &[2.0, 7.0]])).unwrap();
    let ix = tape.matmul(i, x).unwrap();
    assert_eq!(tape.value(ix), tape.value(x));

    let p = tape.constant(Tensor::zeros(2, 3)).unwrap();
    let q = tape.constant(Tensor::zeros(2, 2)).unwrap();
    assert!(matches!(tape.matmul(p, q), Err(Error::Shape { .. })));
}

#[test]
fn add_examples() {
    let mut tape = Tape::new();
    let a = tape.constant(t(&[&[1.0, 1.0], &[2.0, 2.0]])).unwrap();
    let zero = tape.constant(Tensor::zeros(2, 2)).unwrap();
    let s = tape.add(a, zero).unwrap();
    assert_eq!(tape.value(s), tape.value(a));
    let b = tape.constant(Tensor::row_vector(vec![1.0, 2.0])).unwrap();
    let r = tape.add_broadcast_row(a, b).unwrap();
    assert_eq!(tape.value(r), &t(&[&[2.0, 3.0], &[3.0, 4.0]]));
    let wide = tape.constant(Tensor::row_vector(vec![1.0, 2.0, 3.0])).unwrap();
    assert!(tape.add_broadcast_row(a, wide).is_err());
    assert!(tape.add(a, wide).is_err());
}

#[test]
fn leaky_relu_values_and_slope() {
    let mut tape = Tape::new();
    let x = tape.param(Tensor::row_vector(vec![3.0, -1.0])).unwrap();
    let y = tape.leaky_relu(x, 0.2).unwrap();
    assert_eq!(tape.value(y).data(), &[3.0, -0.2]);
    let s = tape.sum(y).unwrap();
    let g = tape.backward(s).unwrap().get(x);
    assert_eq!(g.data(), &[1.0, 0.2]);
}

#[test]
fn segment_softmax_examples() {
    let mut tape = Tape::new();
    let x = tape.constant(Tensor::column(vec![4.0, 0.0, 0.0, 3.0, 5.0])).unwrap();
    let seg: Rc<[usize]> = Rc::from(vec![0, 1, 1, 2, 2]);
    let y = tape.segment_softmax(x, seg, 3).unwrap();
    let v = tape.value(y).data();
    assert_eq!(v[0], 1.0);
    assert_eq!(&v[1..3], &[0.5, 0.5]);
    let e3 = 3f64.exp();
    let e5 = 5f64.exp();
    assert_abs_diff_eq!(v[3], e3 / (e3 + e5), epsilon = 1e-15);
    assert_abs_diff_eq!(v[3], 0.1192, epsilon = 5e-5);
    assert_abs_diff_eq!(v[4], 0.8808, epsilon = 5e-5);
}

#[test]
fn segment_softmax_survives_large_scores() {
    let mut tape = Tape::new();
    let x = tape.constant(Tensor::column(vec![1000.0, 999.0])).unwrap();
    let y = tape.segment_softmax(x, Rc::from(vec![0, 0]), 1).unwrap();
    let s: f64 = tape.value(y).data().iter().sum();
    assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
}

#[test]
fn segment_weighted_sum_examples() {
    let mut tape = Tape::new();
    let w = tape.constant(Tensor::column(vec![1.0, 0.1192, 0.8808])).unwrap();
    let v = tape
        .constant(t(&[&[5.0, -2.0], &[1.0, 1.0], &[3.0, 3.0]]))
        .unwrap();
    let out = tape
        .segment_weighted_sum(w, v, Rc::from(vec![0, 2, 2]), 3)
        .unwrap();
    let o = tape.value(out.out);
    assert_eq!(o.row(0), &[5.0, -2.0]);
    assert_eq!(o.row(1), &[0.0, 0.0]);
    assert_abs_diff_eq!(o.get(2, 0), 2.7616, epsilon = 1e-12);
    assert_eq!(out.isolated, vec![1]);
}

#[test]
fn concat_and_mean() {
    let mut tape = Tape::new();
    let a = tape.constant(Tensor::zeros(3, 2)).unwrap();
    let b = tape.constant(Tensor::filled(3, 3, 1.0)).unwrap();
    let one = tape.concat_cols(&[a]).unwrap();
    assert_eq!(tape.value(one), tape.value(a));
    let c = tape.concat_cols(&[a, b]).unwrap();
    assert_eq!(tape.value(c).shape(), [3, 5]);
    let short = tape.constant(Tensor::zeros(2, 2)).unwrap();
    assert!(tape.concat_cols(&[a, short]).is_err());

    let rows = tape.constant(t(&[&[1.0, 2.0], &[3.0, 4.0]])).unwrap();
    let m = tape.mean_rows(rows).unwrap();
    assert_eq!(tape.value(m).data(), &[2.0, 3.0]);
    let single = tape.constant(t(&[&[7.0, -1.0]])).unwrap();
    let ms = tape.mean_rows(single).unwrap();
    assert_eq!(tape.value(ms), tape.value(single));
    let empty = tape.constant(Tensor::zeros(0, 2)).unwrap();
    assert!(matches!(tape.mean_rows(empty), Err(Error::EmptyReadout)));
}

#[test]
fn l1_examples() {
    let mut tape = Tape::new();
    let p = tape.param(Tensor::scalar(1.5)).unwrap();
    let l = tape.l1_loss(p, &Tensor::scalar(1.0)).unwrap();
    assert_eq!(tape.value(l).data(), &[0.5]);
    assert_eq!(tape.backward(l).unwrap().get(p).data(), &[1.0]);

    let l0 = tape.l1_loss(p, &Tensor::scalar(1.5)).unwrap();
    assert_eq!(tape.value(l0).data(), &[0.0]);
    assert_eq!(tape.backward(l0).unwrap().get(p).data(), &[0.0]);

    let ln = tape.l1_loss(p, &Tensor::scalar(4.0)).unwrap();
    assert_eq!(tape.backward(ln).unwrap().get(p).data(), &[-1.0]);
}

#[test]
fn bce_examples() {
    let mut tape = Tape::new();
    let one = Tensor::scalar(1.0);
    let z = tape.param(Tensor::scalar(0.0)).unwrap();
    let l = tape.bce_with_logits(z, &one).unwrap();
    assert_abs_diff_eq!(tape.value(l).data()[0], std::f64::consts::LN_2, epsilon = 1e-15);

    let hi = tape.param(Tensor::scalar(20.0)).unwrap();
    let lh = tape.bce_with_logits(hi, &one).unwrap();
    let v = tape.value(lh).data()[0];
    assert!(v.is_finite() && v < 1e-8);

    let lo = tape.param(Tensor::scalar(-20.0)).unwrap();
    let ll = tape.bce_with_logits(lo, &one).unwrap();
    // 20 + ln(1 + e^-20)
    assert_abs_diff_eq!(tape.value(ll).data()[0], 20.0 + (-20f64).exp().ln_1p(), epsilon = 1e-12);
    assert_abs_diff_eq!(tape.value(ll).data()[0], 20.0, epsilon = 1e-8);
}

#[test]
fn backward_of_sum_is_ones() {
    let mut tape = Tape::new();
    let p = tape.param(Tensor::filled(2, 3, 0.7)).unwrap();
    let s = tape.sum(p).unwrap();
    assert_eq!(tape.backward(s).unwrap().get(p), Tensor::filled(2, 3, 1.0));
}

#[test]
fn unused_param_gets_zero_gradient() {
    let mut tape = Tape::new();
    let p = tape.param(Tensor::filled(2, 2, 1.0)).unwrap();
    let q = tape.param(Tensor::filled(1, 3, 1.0)).unwrap();
    let s = tape.sum(p).unwrap();
    assert_eq!(tape.backward(s).unwrap().get(q), Tensor::zeros(1, 3));
}

#[test]
fn backward_rejects_non_scalar() {
    let mut tape = Tape::new();
    let p = tape.param(Tensor::zeros(2, 1)).unwrap();
    assert!(matches!(tape.backward(p), Err(Error::Shape { .. })));
}

#[test]
fn non_finite_values_trip_an_error() {
    let mut tape = Tape::new();
    assert!(matches!(
        tape.param(Tensor::scalar(f64::NAN)),
        Err(Error::NonFinite(_))
    ));
    let big = tape.constant(Tensor::scalar(1e308)).unwrap();
    assert!(matches!(tape.add(big, big), Err(Error::NonFinite("add"))));
}

#[test]
fn commuted_branches_give_identical_gradients() {
    let build = |swap: bool| {
        let mut tape = Tape::new();
        let x = tape.param(t(&[&[0.3], &[-1.2]])).unwrap();
        let a = tape.constant(t(&[&[1.5, -0.25]])).unwrap();
        let b = tape.constant(t(&[&[0.1, 2.0]])).unwrap();
        let (first, second) = if swap { (b, a) } else { (a, b) };
        let u = tape.matmul(first, x).unwrap();
        let u = tape.leaky_relu(u, 0.2).unwrap();
        let v = tape.matmul(second, x).unwrap();
        let v = tape.leaky_relu(v, 0.2).unwrap();
        let s = tape.add(u, v).unwrap();
        let s = tape.sum(s).unwrap();
        tape.backward(s).unwrap().get(x)
    };
    assert_eq!(build(false), build(true));
}

#[test]
fn matmul_l1_gradient_matches_finite_differences() {
    let m = t(&[&[0.4, -0.3, 0.9], &[1.1, 0.2, -0.5]]);
    let x = t(&[&[0.7], &[-1.3], &[0.25]]);
    let target = Tensor::column(vec![2.0, -3.0]);
    let report = finite_diff_check(
        |tape, v| {
            let y = tape.matmul(v[0], v[1])?;
            tape.l1_loss(y, &target)
        },
        &[m, x],
        1e-5,
        1e-6,
    )
    .unwrap();
    assert!(report.passed, "{report:?}");
}

#[test]
fn quadratic_gradient_check() {
    let report = finite_diff_check(
        |tape, v| tape.matmul(v[0], v[0]),
        &[Tensor::scalar(3.0)],
        1e-5,
        1e-9,
    )
    .unwrap();
    assert!(report.passed);
    assert_eq!(report.analytic, 6.0);
    assert_abs_diff_eq!(report.numeric, 6.0, epsilon = 1e-9);
}

#[test]
fn zero_tolerance_reports_failure() {
    let report = finite_diff_check(
        |tape, v| {
            let y = tape.matmul(v[0], v[0])?;
            let y = tape.matmul(y, v[0])?;
            tape.leaky_relu(y, 0.2)
        },
        &[Tensor::scalar(1.3)],
        1e-5,
        0.0,
    )
    .unwrap();
    assert!(!report.passed);
    assert!(report.max_rel_error > 0.0);
}

// ---------------------------------------------------------------------------
// gradient properties per primitive

fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Tensor {
    Tensor::new(r, c, (0..r * c).map(|_| rng.random_range(-1.5..1.5)).collect()).unwrap()
}

/// Values bounded away from zero, for the kinked primitives.
fn random_away_from_zero(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Tensor {
    let data = (0..r * c)
        .map(|_| {
            let mag = rng.random_range(1e-3..1.5);
            if rng.random_bool(0.5) { mag } else { -mag }
        })
        .collect();
    Tensor::new(r, c, data).unwrap()
}

/// Contracts an arbitrary output with a fixed random matrix so that every
/// output entry influences the scalar.
fn contract(tape: &mut Tape, y: Var, probe: &Tensor) -> crate::Result<Var> {
    let w = tape.constant(probe.clone())?;
    let z = tape.matmul(y, w)?;
    tape.sum(z)
}

fn check(f: impl Fn(&mut Tape, &[Var]) -> crate::Result<Var>, params: &[Tensor]) {
    let r = finite_diff_check(f, params, 1e-5, 1e-6).unwrap();
    assert!(r.passed, "{r:?}");
}

fn fixed() -> Config {
    Config {
        cases: 24,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

proptest! {
    #![proptest_config(fixed())]

    #[test]
    fn grad_matmul(seed in any::<u64>(), m in 1usize..4, k in 1usize..4, n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probe = random(&mut rng, n, 2);
        let ps = [random(&mut rng, m, k), random(&mut rng, k, n)];
        check(|tape, v| { let y = tape.matmul(v[0], v[1])?; contract(tape, y, &probe) }, &ps);
    }

    #[test]
    fn grad_add_and_row(seed in any::<u64>(), r in 1usize..4, c in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probe = random(&mut rng, c, 2);
        let ps = [random(&mut rng, r, c), random(&mut rng, r, c), random(&mut rng, 1, c)];
        check(|tape, v| {
            let y = tape.add(v[0], v[1])?;
            let y = tape.add_broadcast_row(y, v[2])?;
            contract(tape, y, &probe)
        }, &ps);
    }

    #[test]
    fn grad_leaky_relu(seed in any::<u64>(), r in 1usize..4, c in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probe = random(&mut rng, c, 1);
        let ps = [random_away_from_zero(&mut rng, r, c)];
        check(|tape, v| { let y = tape.leaky_relu(v[0], 0.2)?; contract(tape, y, &probe) }, &ps);
    }

    #[test]
    fn grad_segment_softmax(seed in any::<u64>(), e in 2usize..9, c in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // singleton segments have an identically zero gradient; keep >= 2 per segment
        let n = e / 2;
        let mut seg: Vec<usize> = (0..e).map(|i| i % n).collect();
        rand::seq::SliceRandom::shuffle(seg.as_mut_slice(), &mut rng);
        let seg: Rc<[usize]> = Rc::from(seg);
        let probe = random(&mut rng, c, 1);
        // softmax outputs sum to one per segment, so rows need distinct weights
        let row_probe = random(&mut rng, 1, e);
        let ps = [random(&mut rng, e, c)];
        check(|tape, v| {
            let y = tape.segment_softmax(v[0], seg.clone(), n)?;
            let w = tape.constant(row_probe.clone())?;
            let y = tape.matmul(w, y)?;
            contract(tape, y, &probe)
        }, &ps);
    }

    #[test]
    fn grad_segment_weighted_sum(seed in any::<u64>(), e in 1usize..8, d in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 3;
        let seg: Rc<[usize]> = (0..e).map(|_| rng.random_range(0..n)).collect();
        let probe = random(&mut rng, d, 1);
        let ps = [random(&mut rng, e, 1), random(&mut rng, e, d)];
        check(|tape, v| {
            let y = tape.segment_weighted_sum(v[0], v[1], seg.clone(), n)?;
            contract(tape, y.out, &probe)
        }, &ps);
    }

    #[test]
    fn grad_gathers_and_slices(seed in any::<u64>(), r in 2usize..5, c in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Rc<[usize]> = (0..6).map(|_| rng.random_range(0..r)).collect();
        let cols: Rc<[usize]> = (0..6).map(|_| rng.random_range(0..c)).collect();
        let probe_g = random(&mut rng, c, 1);
        let probe_e = random(&mut rng, 1, 1);
        let probe_s = random(&mut rng, c - 1, 1);
        let ps = [random(&mut rng, r, c)];
        check(|tape, v| {
            let g = tape.gather_rows(v[0], rows.clone())?;
            let a = contract(tape, g, &probe_g)?;
            let e = tape.gather_elems(v[0], rows.clone(), cols.clone())?;
            let b = contract(tape, e, &probe_e)?;
            let s = tape.slice_cols(v[0], 1, c - 1)?;
            let s = tape.slice_rows(s, 1, r - 1)?;
            let s = contract(tape, s, &probe_s)?;
            let ab = tape.add(a, b)?;
            tape.add(ab, s)
        }, &ps);
    }

    #[test]
    fn grad_concats_and_mean(seed in any::<u64>(), r in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probe = random(&mut rng, 5, 1);
        let probe_m = random(&mut rng, 2, 1);
        let ps = [random(&mut rng, r, 2), random(&mut rng, r, 3), random(&mut rng, 2, 2)];
        check(|tape, v| {
            let c = tape.concat_cols(&[v[0], v[1]])?;
            let a = contract(tape, c, &probe)?;
            let rows = tape.concat_rows(&[v[0], v[2]])?;
            let m = tape.mean_rows(rows)?;
            let b = contract(tape, m, &probe_m)?;
            tape.add(a, b)
        }, &ps);
    }

    #[test]
    fn grad_losses(seed in any::<u64>(), k in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pred = random(&mut rng, 1, k);
        // keep the l1 kink out of reach of the difference stencil
        let target = Tensor::new(1, k, pred.data().iter().map(|p| {
            p + if rng.random_bool(0.5) { 0.5 } else { -0.5 }
        }).collect()).unwrap();
        let labels = Tensor::new(1, k, (0..k).map(|_| rng.random_range(0..2) as f64).collect()).unwrap();
        check(|tape, v| {
            let a = tape.l1_loss(v[0], &target)?;
            let b = tape.bce_with_logits(v[0], &labels)?;
            tape.add(a, b)
        }, std::slice::from_ref(&pred));
    }

    #[test]
    fn segment_softmax_is_a_distribution(seed in any::<u64>(), e in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 4;
        let seg: Vec<usize> = (0..e).map(|_| rng.random_range(0..n)).collect();
        let mut tape = Tape::new();
        let x = tape.constant(Tensor::column((0..e).map(|_| rng.random_range(-30.0..30.0)).collect())).unwrap();
        let y = tape.segment_softmax(x, Rc::from(seg.clone()), n).unwrap();
        let mut sums = [0.0; 4];
        for (i, &s) in seg.iter().enumerate() {
            let v = tape.value(y).data()[i];
            prop_assert!(v > 0.0);
            sums[s] += v;
        }
        for (s, sum) in sums.iter().enumerate().take(n) {
            if seg.contains(&s) {
                prop_assert!((sum - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn primitives_are_deterministic(seed in any::<u64>()) {
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut tape = Tape::new();
            let a = tape.param(random(&mut rng, 4, 3)).unwrap();
            let b = tape.param(random(&mut rng, 3, 2)).unwrap();
            let y = tape.matmul(a, b).unwrap();
            let y = tape.leaky_relu(y, 0.2).unwrap();
            let y = tape.segment_softmax(y, Rc::from(vec![0, 1, 0, 1]), 2).unwrap();
            let s = tape.sum(y).unwrap();
            (tape.value(y).clone(), tape.backward(s).unwrap().get(a))
        };
        prop_assert_eq!(run(), run());
    }
}

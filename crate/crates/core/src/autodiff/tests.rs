use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn check(ps: &mut ParamSet, build: impl FnMut(&mut Tape, &ParamSet) -> NodeId) -> GradCheckReport {
    let report = grad_check(ps, tape_objective(build), GradCheckConfig::default());
    assert!(report.passed, "{report:?}");
    report
}

#[test]
fn grad_linear_then_distance() {
    for seed in 0..5 {
        let mut r = rng(seed);
        let mut ps = ParamSet::new();
        let lin = Linear::new(&mut ps, "fc", 4, 3, &mut r);
        let x = random_vec(&mut r, 4);
        let target = random_vec(&mut r, 3);
        check(&mut ps, |t, ps| {
            let x = t.constant(x.clone());
            let y = lin.forward(t, ps, x);
            let tgt = t.constant(target.clone());
            t.distance(y, tgt)
        });
    }
}

#[test]
fn grad_sparse_rows_siamese() {
    for seed in 0..5 {
        let mut r = rng(100 + seed);
        let mut ps = ParamSet::new();
        let w = ps.add_uniform("w", 7, 3, 7, &mut r);
        check(&mut ps, |t, ps| {
            let a = t.sparse_rows(ps, w, &[0, 2, 5]);
            let b = t.sparse_rows(ps, w, &[1, 2, 6]);
            t.distance(a, b)
        });
    }
}

#[test]
fn grad_lstm_chain() {
    for seed in 0..5 {
        let mut r = rng(200 + seed);
        let mut ps = ParamSet::new();
        let lstm = Lstm::new(&mut ps, "lstm", 3, 4, &mut r);
        let xs: Vec<Vec<f64>> = (0..4).map(|_| random_vec(&mut r, 3)).collect();
        let w_out = random_vec(&mut r, 4);
        check(&mut ps, |t, ps| {
            let xs: Vec<NodeId> = xs.iter().map(|x| t.constant(x.clone())).collect();
            let hs = lstm.run(t, ps, &xs);
            let w = t.constant(w_out.clone());
            let last = *hs.last().unwrap();
            let s = t.dot(w, last);
            t.mul(s, s)
        });
    }
}

#[test]
fn grad_attention_pool() {
    for seed in 0..5 {
        let mut r = rng(300 + seed);
        let mut ps = ParamSet::new();
        let wa = ps.add_uniform("w_alpha", 3, 1, 1, &mut r);
        let xp = ps.add_uniform("xs", 4, 3, 1, &mut r);
        let probe = random_vec(&mut r, 3);
        check(&mut ps, |t, ps| {
            let w = t.param(ps, wa);
            let xs: Vec<NodeId> = (0..4).map(|k| t.param_row(ps, xp, k)).collect();
            let g = attention_pool(t, w, &xs);
            let p = t.constant(probe.clone());
            t.dot(g, p)
        });
    }
}

#[test]
fn grad_elementwise_ops() {
    let mut r = rng(400);
    let mut ps = ParamSet::new();
    let a = ps.add_uniform("a", 5, 1, 1, &mut r);
    let b = ps.add_uniform("b", 5, 1, 1, &mut r);
    check(&mut ps, |t, ps| {
        let a = t.param(ps, a);
        let b = t.param(ps, b);
        let s = t.sub(a, b);
        let m = t.mul(s, a);
        let sp = t.softplus(m);
        let th = t.tanh(sp);
        let sc = t.scale(th, -1.7);
        let sh = t.add_scalar(sc, 0.3);
        let re = t.relu(sh);
        let sm = t.softmax(re);
        let cat = t.concat(&[sm, a]);
        let sl = t.slice(cat, 2, 5);
        let sq = t.sq_norm(sl);
        let su = t.sum(b);
        t.add(sq, su)
    });
}

#[test]
fn tape_forward_matches_plain_ops() {
    let mut r = rng(500);
    let mut ps = ParamSet::new();
    let lstm = Lstm::new(&mut ps, "l", 3, 5, &mut r);
    let x = random_vec(&mut r, 3);
    let h0 = random_vec(&mut r, 5);
    let c0 = random_vec(&mut r, 5);

    let mut t = Tape::new();
    let (xn, hn, cn) = (t.constant(x.clone()), t.constant(h0.clone()), t.constant(c0.clone()));
    let (h1, c1) = lstm.step(&mut t, &ps, xn, hn, cn);
    let (h_plain, c_plain) = lstm_step(lstm.cell(&ps), &x, &h0, &c0);
    for k in 0..5 {
        assert!((t.value(h1)[k] - h_plain[k]).abs() < 1e-14);
        assert!((t.value(c1)[k] - c_plain[k]).abs() < 1e-14);
    }
}

/// Straight-line LSTM written independently of `ops` and `layers`.
fn lstm_oracle(wx: &Matrix, wh: &Matrix, b: &[f64], x: &[f64], h: &[f64], c: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = h.len();
    let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
    let mut hn = vec![0.0; n];
    let mut cn = vec![0.0; n];
    for k in 0..n {
        let pre = |gate: usize| {
            let row = gate * n + k;
            let mut s = b[row];
            for j in 0..x.len() {
                s += wx.get(row, j) * x[j];
            }
            for j in 0..n {
                s += wh.get(row, j) * h[j];
            }
            s
        };
        let i = sig(pre(0));
        let f = sig(pre(1));
        let g = pre(2).tanh();
        let o = sig(pre(3));
        cn[k] = f * c[k] + i * g;
        hn[k] = o * cn[k].tanh();
    }
    (hn, cn)
}

#[test]
fn lstm_step_matches_straight_line_oracle() {
    for seed in 0..20 {
        let mut r = rng(600 + seed);
        let (d, h) = (r.random_range(1..6), r.random_range(1..6));
        let mut ps = ParamSet::new();
        let lstm = Lstm::new(&mut ps, "l", d, h, &mut r);
        let x = random_vec(&mut r, d);
        let h0 = random_vec(&mut r, h);
        let c0 = random_vec(&mut r, h);
        let (h1, c1) = lstm_step(lstm.cell(&ps), &x, &h0, &c0);
        let (h2, c2) = lstm_oracle(
            ps.value(lstm.wx),
            ps.value(lstm.wh),
            ps.value(lstm.b).as_slice(),
            &x,
            &h0,
            &c0,
        );
        for k in 0..h {
            assert!((h1[k] - h2[k]).abs() < 1e-12);
            assert!((c1[k] - c2[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn backward_accumulates_across_calls() {
    let mut ps = ParamSet::new();
    let a = ps.add("a", Matrix::column(vec![2.0]));
    for _ in 0..2 {
        let mut t = Tape::new();
        let x = t.param(&ps, a);
        let y = t.mul(x, x);
        t.backward(y, &mut ps);
    }
    assert_eq!(ps.grad(a).as_slice(), &[8.0]);
}

proptest! {
    #[test]
    fn attention_weights_form_a_distribution(
        w in prop::collection::vec(-3.0f64..3.0, 3),
        xs in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 1..8),
    ) {
        let (_, a) = ops::attention_pool(&w, &xs);
        let total: f64 = a.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
        for v in &a {
            prop_assert!(*v > 0.0 && *v <= 1.0);
            if xs.len() > 1 {
                prop_assert!(*v < 1.0);
            }
        }
    }

    #[test]
    fn distance_is_a_metric_on_exact_inputs(
        u in prop::collection::vec(-100.0f64..100.0, 4),
        v in prop::collection::vec(-100.0f64..100.0, 4),
    ) {
        let d = euclidean_distance(&u, &v);
        prop_assert!(d >= 0.0);
        prop_assert_eq!(d, euclidean_distance(&v, &u));
        prop_assert_eq!(euclidean_distance(&u, &u), 0.0);
        if u != v {
            prop_assert!(d > 0.0);
        }
    }
}

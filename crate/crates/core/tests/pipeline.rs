use num_complex::Complex;
use num_rational::BigRational;
use opuc_core::hypergeometric::{example_mu, example_s0};
use opuc_core::recurrence::horner;
use opuc_core::verify::example_grid;
use opuc_core::{
    eval_r_q, minimal_parameters, poly_tables, szego_polynomials, verblunsky, ChainParams,
    MaximalOptions, RecurrenceInput, C64,
};
use proptest::prelude::*;

// Deterministic points spread over the circle (golden-angle sequence).
fn circle_points(count: usize) -> Vec<C64> {
    let step = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (1..=count)
        .map(|k| C64::from_polar(1.0, 0.37 + step * k as f64))
        .collect()
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// `<p, q> = Σ p_k conj(q_j) μ_{j-k}` from closed-form moments.
fn inner(p: &[C64], q: &[C64], mu: &dyn Fn(i64) -> C64) -> C64 {
    let mut acc = C64::default();
    for (k, pk) in p.iter().enumerate() {
        for (j, qj) in q.iter().enumerate() {
            acc += pk * qj.conj() * mu(j as i64 - k as i64);
        }
    }
    acc
}

#[test]
fn opuc_match_gram_schmidt_on_closed_form_moments() {
    for p in example_grid() {
        let mu = |k: i64| example_mu(&p, k).unwrap();
        let mut basis: Vec<Vec<C64>> = Vec::new();
        for n in 0..=3usize {
            let mut s = vec![C64::default(); n + 1];
            s[n] = C64::new(1.0, 0.0);
            let mono = s.clone();
            for b in &basis {
                let coef = inner(&mono, b, &mu) / inner(b, b, &mu);
                for (j, bj) in b.iter().enumerate() {
                    s[j] -= coef * bj;
                }
            }
            basis.push(s);
        }
        let input = p.sequences(4).unwrap();
        let m = minimal_parameters(input.d_values()).unwrap();
        let s = szego_polynomials(&input, &m, 3).unwrap();
        for n in 0..=3 {
            for j in 0..=n {
                let err = (s[n][j] - basis[n][j]).norm();
                assert!(err < 1e-10, "{p:?}: S_{n} coefficient {j} off by {err:e}");
            }
        }
    }
}

type Exact = Complex<BigRational>;

fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Points `(1 - s² + 2is) / (1 + s²)` with `s = j / 64`: exactly on the
/// circle with short rational coordinates, spread like [`circle_points`].
fn rational_circle_points(count: usize) -> Vec<(Exact, C64)> {
    circle_points(count)
        .into_iter()
        .map(|w| {
            let j = ((w.arg() / 2.0).tan() * 64.0)
                .round()
                .clamp(-8192.0, 8192.0) as i64;
            let den = 4096 + j * j;
            let z = Exact::new(ratio(4096 - j * j, den), ratio(128 * j, den));
            let approx = C64::new(
                (4096 - j * j) as f64 / den as f64,
                (128 * j) as f64 / den as f64,
            );
            (z, approx)
        })
        .collect()
}

/// `R_n(z) = (2λ+2)_n / (λ+1)_n · ₂F₁(-n, b+1; 2λ+2; 1-z)` for
/// `n = 0..=n_max`, in exact rational arithmetic. The f64 closed form
/// cancels badly near `z = -1`.
fn r_closed_form_exact(lambda: f64, eta: f64, n_max: usize, z: &Exact) -> Vec<C64> {
    use num_traits::ToPrimitive;
    let (l, c) = (exact(lambda), exact(2.0 * lambda + 2.0));
    let b1 = Exact::new(exact(lambda + 1.0), exact(eta));
    let x = Exact::new(ratio(1, 1), ratio(0, 1)) - z.clone();
    // partial[k] = (b+1)_k x^k / ((2λ+2)_k k!)
    let mut partial = vec![Exact::new(ratio(1, 1), ratio(0, 1))];
    for k in 0..n_max {
        let kr = ratio(k as i64, 1);
        let den = (c.clone() + kr.clone()) * ratio(k as i64 + 1, 1);
        let next = partial[k].clone() * (b1.clone() + kr) * x.clone() * den.recip();
        partial.push(next);
    }
    let mut scale = ratio(1, 1);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        if n > 0 {
            let k = ratio(n as i64 - 1, 1);
            scale = scale * (c.clone() + k.clone()) / (l.clone() + ratio(1, 1) + k);
        }
        // (-n)_k as an integer
        let mut falling = ratio(1, 1);
        let mut sum = partial[0].clone();
        for (k, pk) in partial.iter().enumerate().take(n + 1).skip(1) {
            falling *= ratio(k as i64 - 1 - n as i64, 1);
            sum += pk.clone() * falling.clone();
        }
        let v = sum * scale.clone();
        out.push(C64::new(v.re.to_f64().unwrap(), v.im.to_f64().unwrap()));
    }
    out
}

#[test]
fn r_matches_closed_form_on_grid() {
    let points = rational_circle_points(32);
    for p in example_grid() {
        let input = p.sequences(20).unwrap();
        let tables = poly_tables(&input, 20).unwrap();
        let oracle: Vec<Vec<C64>> = points
            .iter()
            .map(|(z, _)| r_closed_form_exact(p.lambda, p.eta, 20, z))
            .collect();
        for n in 0..=20 {
            // Relative to the size of R_n on the sample; some points are exact zeros.
            let scale = oracle.iter().map(|v| v[n].norm()).fold(0.0, f64::max);
            for ((_, approx), o) in points.iter().zip(&oracle) {
                let err = (tables[n].eval_r(*approx) - o[n]).norm() / scale;
                assert!(err < 1e-9, "{p:?}: R_{n}({approx}) relative error {err:e}");
            }
        }
    }
}

#[test]
fn opuc_match_closed_form_without_mass_point() {
    let points = circle_points(8);
    for p in example_grid().into_iter().filter(|p| p.t == 0.0) {
        let input = p.sequences(12).unwrap();
        let m = minimal_parameters(input.d_values()).unwrap();
        let s = szego_polynomials(&input, &m, 12).unwrap();
        for (n, coeffs) in s.iter().enumerate() {
            for &z in &points {
                let exact = example_s0(&p, n, z).unwrap();
                let err = (horner(coeffs, z) - exact).norm() / exact.norm().max(1.0);
                assert!(err < 1e-10, "{p:?}: S_{n}({z}) off by {err:e}");
            }
        }
    }
}

#[test]
fn pointwise_and_coefficient_evaluation_agree() {
    let input = RecurrenceInput::new(
        vec![0.3, -1.2, 0.0, 2.5, 0.7, -0.4, 1.1, 0.0, -2.0, 0.5],
        vec![0.25, 0.2, 0.1, 0.25, 0.05, 0.24, 0.15, 0.25, 0.2, 0.01],
    )
    .unwrap();
    let tables = poly_tables(&input, 10).unwrap();
    for z in circle_points(5)
        .into_iter()
        .chain([C64::new(0.3, -0.2), C64::new(1.7, 0.4)])
    {
        for (n, table) in tables.iter().enumerate().skip(1) {
            let v = eval_r_q(&input, n, z).unwrap();
            assert!(rel(v.r, table.eval_r(z)) < 1e-12);
            assert!(rel(v.q, table.eval_q(z)) < 1e-12);
        }
    }
}

#[test]
fn r_is_self_inversive() {
    let p = opuc_core::ExampleParams::new(0.5, 1.0, 0.3).unwrap();
    let input = p.sequences(15).unwrap();
    for pair in poly_tables(&input, 15).unwrap() {
        let r = &pair.r;
        let n = pair.degree;
        let scale = r.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for j in 0..=n {
            assert!(
                (r[j] - r[n - j].conj()).norm() <= 1e-13 * scale,
                "R_{n} coefficient {j}"
            );
        }
    }
}

// A chain sequence from parameters g_0 ∈ [0, 1), g_n ∈ (0, 1).
fn chain_input() -> impl Strategy<Value = RecurrenceInput> {
    (1usize..24)
        .prop_flat_map(|n| {
            (
                0.0f64..0.99,
                prop::collection::vec(0.01f64..0.99, n),
                prop::collection::vec(-3.0f64..3.0, n),
            )
        })
        .prop_map(|(g0, g, c)| {
            let mut prev = g0;
            let d = g
                .iter()
                .map(|&gn| {
                    let dn = (1.0 - prev) * gn;
                    prev = gn;
                    dn
                })
                .collect();
            RecurrenceInput::new(c, d).unwrap()
        })
}

proptest! {
    #[test]
    fn chain_parameters_reconstruct_d(input in chain_input()) {
        let params = ChainParams::compute(&input, input.len(), &MaximalOptions::default()).unwrap();
        prop_assert!(params.reconstruction_residual(input.d_values()) < 1e-10);
        prop_assert!(params.m.iter().zip(&params.big_m).all(|(a, b)| *a <= b + 1e-12));
    }

    #[test]
    fn verblunsky_coefficients_lie_in_the_disk(input in chain_input()) {
        let m = minimal_parameters(input.d_values()).unwrap();
        let alpha = verblunsky(&input, &m, input.len()).unwrap();
        prop_assert!(alpha.iter().all(|a| a.norm() < 1.0));
    }
}

use proptest::prelude::*;
use std::f64::consts::PI;
use vertex_core::operators::*;
use vertex_core::params::{config, index, partial_spin, spin_sum};
use vertex_core::{ChainParams, Error, Mat, ThetaContext, C};

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn case1() -> ChainParams {
    ChainParams::real(&[5.7, 1.5, 0.22], 0.7, 0.26).unwrap()
}

fn complex_params() -> ChainParams {
    let ctx = ThetaContext::new(c(0.15, 0.8)).unwrap();
    ChainParams::new(vec![c(0.3, 0.05), c(-0.7, 0.1), c(1.1, -0.08)], c(0.45, 0.12), ctx).unwrap()
}

fn point() -> impl Strategy<Value = C> {
    (-1.5..1.5f64, -0.4..0.4f64).prop_map(|(re, im)| c(re, im))
}

fn chain() -> impl Strategy<Value = ChainParams> {
    (proptest::collection::vec(-2.0..2.0f64, 3), 0.2..1.2f64, 0.05..0.6f64)
        .prop_filter_map("generic parameters", |(xi, eta, nome)| ChainParams::real(&xi, eta, nome).ok())
}

#[test]
fn basis_indexing_round_trips() {
    for k in 0..32 {
        assert_eq!(index(&config(k, 5)), k);
    }
    assert_eq!(spin_sum(0b101, 3), -1);
    assert_eq!(partial_spin(0b101, 2), 0);
    assert_eq!(partial_spin(0b101, 0), 0);
}

#[test]
fn invalid_chains_are_rejected() {
    assert!(matches!(ChainParams::real(&[0.1, 0.5], 0.3, 0.2), Err(Error::EvenChain(2))));
    assert!(ChainParams::real(&[], 0.3, 0.2).is_err());
    assert!(ChainParams::real(&[0.1, 0.4, 0.9], 0.3, 0.2).is_err(), "0.1 + 0.3 = 0.4 is not generic");
    assert!(ChainParams::real(&[0.1, 0.5, 0.9], PI, 0.2).is_err(), "eta on the lattice");
}

#[test]
fn dynamical_pole_names_the_site() {
    let p = case1();
    match monodromy_6vd(c(0.3, 0.1), c(0.0, 0.0), &p) {
        Err(Error::Pole(msg)) => assert!(msg.contains("site 1"), "{msg}"),
        other => panic!("expected a pole, got {other:?}"),
    }
}

#[test]
fn eight_vertex_chain_matches_explicit_three_site_matrix() {
    // Rows of the explicit N = 3 transfer matrix; each term lists the weights
    // at sites 1, 2, 3. Its basis order has site 1 as the most significant bit.
    let rows: [[&str; 8]; 8] = [
        ["aaa+bbb", "", "", "bdc+acd", "", "dac+cbd", "dcb+cda", ""],
        ["", "bba+aab", "acc+bdd", "", "cbc+dad", "", "", "dca+cdb"],
        ["", "bcc+add", "aba+bab", "", "cca+ddb", "", "", "dbc+cad"],
        ["adc+bcd", "", "", "baa+abb", "", "ccb+dda", "cac+dbd", ""],
        ["", "cac+dbd", "ccb+dda", "", "baa+abb", "", "", "adc+bcd"],
        ["dbc+cad", "", "", "cca+ddb", "", "aba+bab", "bcc+add", ""],
        ["dca+cdb", "", "", "cbc+dad", "", "acc+bdd", "bba+aab", ""],
        ["", "dcb+cda", "dac+cbd", "", "bdc+acd", "", "", "aaa+bbb"],
    ];
    let p = case1();
    let lambda = c(0.41, 0.13);
    let w: Vec<[C; 4]> = p.xi.iter().map(|x| r8v_weights(lambda - x, &p.ctx, p.eta).unwrap()).collect();
    let weight = |site: usize, ch: char| w[site]["abcd".find(ch).unwrap()];
    let rev = |k: usize| ((k & 1) << 2) | (k & 2) | ((k >> 2) & 1);
    let t = transfer_8v(lambda, &p).unwrap().mat;
    let scale = t.norm_l2();
    for (i, row) in rows.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let want: C = cell
                .split('+')
                .filter(|s| !s.is_empty())
                .map(|term| term.chars().enumerate().map(|(s, ch)| weight(s, ch)).product::<C>())
                .sum();
            let got = t[(rev(i), rev(j))];
            assert!((got - want).norm() < 1e-13 * scale, "entry ({i}, {j}): {got} vs {want}");
        }
    }
}

#[test]
fn single_site_closed_form() {
    // a(λ) + b(λ) of the 8-vertex weights equals c(λ|η/2) of the dynamical ones.
    let p = ChainParams::real(&[0.37], 0.61, 0.3).unwrap();
    for k in 0..50 {
        let lambda = c(-1.4 + 0.057 * k as f64, 0.3 * ((k as f64) * 0.7).sin());
        let [a, b, _, _] = r8v_weights(lambda, &p.ctx, p.eta).unwrap();
        let rhs = weight_c(lambda, p.eta / 2.0, &p).unwrap();
        assert!((a + b - rhs).norm() < 1e-10 * rhs.norm());
    }
}

#[test]
fn restricted_space_blocks_move_between_sectors() {
    let p = case1();
    let lambda = c(0.2, 0.1);
    let b = b_op(lambda, c(0.0, 0.0), &p).unwrap();
    let cc = c_op(lambda, c(0.0, 0.0), &p).unwrap();
    let scale = b.norm_l2().max(cc.norm_l2()) * 1e-13;
    assert!(respects_sectors(&b, 3, &[-2], scale));
    assert!(respects_sectors(&cc, 3, &[2], scale));
    let a = sector_block(Block::A, lambda, c(0.0, 0.0), &p).unwrap();
    assert!(respects_sectors(&a, 3, &[0], scale));
}

#[test]
fn transfer_matrices_commute() {
    for p in [case1(), complex_params()] {
        let (l1, l2) = (c(0.31, 0.12), c(-0.62, 0.27));
        for (x, y) in [
            (transfer_6vd_bar(l1, &p).unwrap(), transfer_6vd_bar(l2, &p).unwrap()),
            (transfer_8v(l1, &p).unwrap(), transfer_8v(l2, &p).unwrap()),
        ] {
            assert!(x.commutator(&y).norm() < 1e-12 * x.norm() * y.norm());
        }
    }
}

#[test]
fn eight_vertex_quasi_periodicity() {
    // T(λ + πω) = (−e^{−i(2λ+πω)})^N e^{2i(t₀ + Σξ)} T(λ).
    for p in [case1(), complex_params()] {
        let lambda = c(0.23, 0.04);
        let shift = PI * p.ctx.omega;
        let sum: C = p.xi.iter().sum();
        let i = c(0.0, 1.0);
        let factor = (-(-i * (lambda * 2.0 + shift)).exp()).powi(p.n as i32) * (i * 2.0 * (p.t0() + sum)).exp();
        let a = transfer_8v(lambda + shift, &p).unwrap().mat;
        let b = transfer_8v(lambda, &p).unwrap().mat;
        let diff = (&a - &(faer::Scale(factor) * &b)).norm_l2();
        assert!(diff < 1e-10 * a.norm_l2(), "{diff}");
        let printed = (-(-i * (lambda * 2.0 + shift)).exp()).powi(p.n as i32) * (-i * 2.0 * (p.t0() - sum)).exp();
        assert!((&a - &(faer::Scale(printed) * &b)).norm_l2() > 1e-3 * a.norm_l2());
        let per = transfer_8v(lambda + PI, &p).unwrap().mat;
        assert!((&per + &b).norm_l2() < 1e-10 * b.norm_l2());
    }
}

#[test]
fn local_operators_from_the_monodromy() {
    let p = case1();
    let x = [[c(0.3, 0.1), c(-1.2, 0.4)], [c(0.7, 0.0), c(0.05, -0.6)]];
    for site in 0..3 {
        let want = embed_local(x, site, 3);
        let got = reconstruct_local(site, x, &p).unwrap();
        let alt = reconstruct_local_alt(site, x, &p).unwrap();
        assert!((&got - &want).norm_l2() < 1e-10 * want.norm_l2(), "site {site}");
        assert!((&alt - &want).norm_l2() < 1e-10 * want.norm_l2(), "site {site} (alternative form)");
    }
}

#[test]
fn monodromy_blocks_assemble() {
    let p = case1();
    let m = monodromy_8v(c(0.2, 0.1), &p).unwrap();
    let full = m.to_aux_spin();
    assert_eq!(full.nrows(), 16);
    let tr = m.trace();
    let direct = Mat::from_fn(8, 8, |i, j| full[(i, j)] + full[(8 + i, 8 + j)]);
    assert!((&tr - &direct).norm_l2() == 0.0);
}

#[test]
fn complex_parameters_satisfy_the_algebra() {
    let p = complex_params();
    let (l1, l2, tau) = (c(0.3, 0.1), c(-0.45, 0.2), c(0.6, 0.15));
    assert!(ybe_residual(Model::SixVertexDynamical, l1, l2, tau, &p).unwrap() < 1e-12);
    assert!(ybe_residual(Model::EightVertex, l1, l2, tau, &p).unwrap() < 1e-12);
    assert!(qdet_6vd_residual(l1, tau, &p).unwrap() < 1e-11);
    assert!(inversion_residual(l1, tau, &p).unwrap() < 1e-11);
    assert!(qdet_8v_residual(l1, &p).unwrap() < 1e-11);
}

#[test]
fn product_scaled_residual_still_sees_a_wrong_determinant() {
    let p = complex_params();
    let l = c(0.3, 0.1);
    let (m0, m1) = (monodromy_8v(l, &p).unwrap(), monodromy_8v(l - p.eta, &p).unwrap());
    let lhs = &(&m0.a * &m1.d) - &(&m0.b * &m1.c);
    let abs = |m: &Mat<C>| Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].norm());
    let scale = (abs(&m0.a) * abs(&m1.d) + abs(&m0.b) * abs(&m1.c)).norm_l2();
    let id = Mat::<C>::identity(p.dim(), p.dim());
    let right = (&lhs - &(faer::Scale(p.qdet(l).unwrap()) * &id)).norm_l2() / scale;
    let wrong = (&lhs - &(faer::Scale(p.qdet(l + 0.05).unwrap()) * &id)).norm_l2() / scale;
    assert!((right - qdet_8v_residual(l, &p).unwrap()).abs() < 1e-15);
    assert!(right < 1e-12 && wrong > 1e-3, "{right:e} {wrong:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn yang_baxter(l1 in point(), l2 in point(), tau in point(), p in chain()) {
        let r6 = ybe_residual(Model::SixVertexDynamical, l1, l2, tau, &p);
        prop_assume!(r6.is_ok());
        prop_assert!(r6.unwrap() < 1e-10);
        prop_assert!(ybe_residual(Model::EightVertex, l1, l2, tau, &p).unwrap() < 1e-10);
    }

    #[test]
    fn quantum_determinants(l in point(), tau in point(), p in chain()) {
        let q6 = qdet_6vd_residual(l, tau, &p);
        prop_assume!(q6.is_ok());
        prop_assert!(q6.unwrap() < 1e-9);
        prop_assert!(inversion_residual(l, tau, &p).unwrap() < 1e-9);
        prop_assert!(qdet_8v_residual(l, &p).unwrap() < 1e-9);
    }

    #[test]
    fn dynamical_weights_symmetry(l in point(), tau in point(), p in chain()) {
        // c(λ|τ) c(λ|−τ) − b(λ|τ) b(λ|−τ) does not depend on τ.
        let b = weight_b(l, tau, &p);
        prop_assume!(b.is_ok());
        let lhs = weight_c(l, tau, &p).unwrap() * weight_c(l, -tau, &p).unwrap()
            - b.unwrap() * weight_b(l, -tau, &p).unwrap();
        let lhs0 = weight_c(l, c(0.4, 0.1), &p).unwrap() * weight_c(l, c(-0.4, -0.1), &p).unwrap()
            - weight_b(l, c(0.4, 0.1), &p).unwrap() * weight_b(l, c(-0.4, -0.1), &p).unwrap();
        prop_assert!((lhs - lhs0).norm() < 1e-8 * lhs0.norm().max(1.0));
    }
}

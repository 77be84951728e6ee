use std::f64::consts::PI;
use vertex_core::elliptic::theta_char;
use vertex_core::linalg::{det, mat_vec, vec_mat, vec_norm};
use vertex_core::operators::transfer_6vd_bar;
use vertex_core::params::bit;
use vertex_core::sov::*;
use vertex_core::spectrum::{diagonalize, interpolate, TransferModel};
use vertex_core::{ChainParams, Mat, C};

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn case1() -> ChainParams {
    ChainParams::real(&[5.7, 1.5, 0.22], 0.7, 0.26).unwrap()
}

fn five_sites() -> ChainParams {
    ChainParams::real(&[0.31, 1.27, -0.66, 2.05, -1.48], 0.53, 0.21).unwrap()
}

fn spread(values: &[C]) -> f64 {
    let mean = values.iter().sum::<C>() / values.len() as f64;
    values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max) / mean.norm()
}

fn off_diagonal_max(m: &Mat<C>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in (0..m.ncols()).filter(|&j| j != i) {
            worst = worst.max(m[(i, j)].norm());
        }
    }
    worst
}

fn row(m: &Mat<C>, i: usize) -> Vec<C> {
    (0..m.ncols()).map(|j| m[(i, j)]).collect()
}

fn col(m: &Mat<C>, j: usize) -> Vec<C> {
    (0..m.nrows()).map(|i| m[(i, j)]).collect()
}

fn rel_diff(a: &[C], b: &[C]) -> f64 {
    let d: Vec<C> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    vec_norm(&d) / vec_norm(a).max(vec_norm(b))
}

#[test]
fn reference_states_are_unit_vectors() {
    let p = case1();
    let (left, right) = raw_states(&p, c(0.0, 0.0)).unwrap();
    let e0: Vec<C> = (0..8).map(|i| if i == 0 { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect();
    let e7: Vec<C> = (0..8).map(|i| if i == 7 { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect();
    assert_eq!(row(&left, 0), e0);
    assert_eq!(col(&right, 7), e7);
}

#[test]
fn left_states_are_pseudo_eigenstates_of_d() {
    // ⟨h|D(λ) is proportional to the state built with shifted dynamical
    // argument, and the proportionality factor divided by d_h(λ) is λ independent.
    for p in [case1(), five_sites()] {
        let (left, _) = raw_states(&p, c(0.0, 0.0)).unwrap();
        let (shifted, _) = raw_states(&p, -p.eta).unwrap();
        let lambdas = [c(0.37, 0.18), c(-1.1, 0.04), c(0.8, -0.22)];
        let ds: Vec<Mat<C>> = lambdas.iter().map(|&l| d_op(l, c(0.0, 0.0), &p).unwrap()).collect();
        for h in 0..p.dim() {
            let target = row(&shifted, h);
            let k = (0..p.dim()).max_by(|&a, &b| target[a].norm().total_cmp(&target[b].norm())).unwrap();
            let factors: Vec<C> = lambdas
                .iter()
                .zip(&ds)
                .map(|(&l, d)| {
                    let lhs = vec_mat(&row(&left, h), d);
                    let f = lhs[k] / target[k];
                    let rhs: Vec<C> = target.iter().map(|x| x * f).collect();
                    assert!(rel_diff(&lhs, &rhs) < 1e-9, "h = {h}");
                    f / d_h(h, l, &p).unwrap()
                })
                .collect();
            assert!(spread(&factors) < 1e-9, "h = {h}");
        }
    }
}

#[test]
fn right_states_are_pseudo_eigenstates_of_d() {
    for p in [case1(), five_sites()] {
        let (_, right) = raw_states(&p, c(0.0, 0.0)).unwrap();
        let (_, shifted) = raw_states(&p, p.eta).unwrap();
        let lambda = c(-0.21, 0.09);
        let d = d_op(lambda, p.eta, &p).unwrap();
        for h in 0..p.dim() {
            let lhs = mat_vec(&d, &col(&right, h));
            let dr = d_right(h, lambda, &p).unwrap();
            let rhs: Vec<C> = col(&shifted, h).iter().map(|x| x * dr).collect();
            assert!(rel_diff(&lhs, &rhs) < 1e-9, "h = {h}");
        }
    }
}

#[test]
fn creation_operators_commute() {
    let p = case1();
    let a = vertex_core::operators::c_op(p.xi[0], c(0.0, 0.0), &p).unwrap();
    let b = vertex_core::operators::c_op(p.xi[2] - p.eta, c(0.0, 0.0), &p).unwrap();
    let comm = &(&a * &b) - &(&b * &a);
    assert!(comm.norm_l2() < 1e-12 * a.norm_l2() * b.norm_l2());
}

#[test]
fn theta_determinant_factorizes() {
    for p in [case1(), five_sites()] {
        let ratios: Vec<C> =
            (0..p.dim()).map(|h| theta_matrix_det(h, &p).unwrap() / vandermonde_product(h, &p).unwrap()).collect();
        assert!(spread(&ratios) < 1e-7, "spread {}", spread(&ratios));
    }
}

#[test]
fn unscaled_theta_arguments_do_not_factorize() {
    // ϑ_j at ratio ω evaluated directly at ξ̄ (with the shift (N−1)/(2N)
    // unscaled) gives an h-dependent ratio.
    let p = case1();
    let mean = p.xi.iter().sum::<C>() / 3.0;
    let ratios: Vec<C> = (0..8)
        .map(|h| {
            let m = Mat::from_fn(3, 3, |i, j| {
                let u = p.xi_h(j, bit(h, j)) + p.eta / 2.0 + 1.0 / 3.0 - mean;
                theta_char(i, u, 3, &p.ctx).unwrap()
            });
            let pts: Vec<C> = (0..3).map(|a| p.xi_h(a, bit(h, a)) + p.eta / 2.0 + 1.0 / 3.0 - mean).collect();
            let mut v = p.theta(pts.iter().sum::<C>() - 1.0).unwrap();
            for a in 0..3 {
                for b in a + 1..3 {
                    v *= p.theta(p.xi_h(a, bit(h, a)) - p.xi_h(b, bit(h, b))).unwrap();
                }
            }
            det(&m) / v
        })
        .collect();
    assert!(spread(&ratios) > 1e-3);
}

#[test]
fn single_site_theta_matrix() {
    let p = ChainParams::real(&[0.44], 0.7, 0.3).unwrap();
    let ctx = p.ctx.with_omega(p.ctx.omega / 2.0).unwrap();
    for h in 0..2 {
        let u = SovPoint::new(0, h as u8, &p).char_arg();
        assert_eq!(theta_matrix_det(h, &p).unwrap(), theta_char(0, u, 1, &ctx).unwrap());
    }
}

#[test]
fn sov_point_shift() {
    let p = case1();
    let (x0, x1) = (SovPoint::new(1, 0, &p), SovPoint::new(1, 1, &p));
    assert_eq!(x0.value - x1.value, p.eta);
    assert!((x0.shifted - x1.shifted - p.eta).norm() < 1e-15);
    let mean = p.xi.iter().sum::<C>() / 3.0;
    assert!((x0.shifted - (p.xi[1] + p.eta / 2.0 + PI / 3.0 - mean)).norm() < 1e-14);
}

#[test]
fn bases_are_dual() {
    for p in [case1(), five_sites()] {
        let basis = SovBasis::new(&p).unwrap();
        assert!(det(&basis.right).norm() > 1e-10);
        let g = basis.pairing();
        let scale = (0..p.dim()).map(|k| g[(k, k)].norm()).fold(0.0, f64::max);
        assert!(off_diagonal_max(&g) < 1e-10 * scale);
        let mu_over_det: Vec<C> = (0..p.dim()).map(|h| basis.measure(h).unwrap() / basis.theta_dets[h]).collect();
        assert!(spread(&mu_over_det) < 1e-7);
        for h in 0..p.dim() {
            assert!((basis.measure(h).unwrap() * g[(h, h)] - c(1.0, 0.0)).norm() < 1e-14);
        }
        let id = basis.identity_decomposition().unwrap();
        assert!((&id - &Mat::<C>::identity(p.dim(), p.dim())).norm_l2() < 1e-8);
    }
}

#[test]
fn measure_ratio_under_a_single_flip() {
    let p = case1();
    let basis = SovBasis::new(&p).unwrap();
    let g = basis.pairing();
    for h in 0..8usize {
        for a in (0..3).filter(|&a| bit(h, a) == 0) {
            let h1 = h | 1 << a;
            let measured = g[(h1, h1)] / g[(h, h)];
            let mut want = p.theta(p.t_h(h)).unwrap() / p.theta(p.t_h(h1)).unwrap();
            for b in (0..3).filter(|&b| b != a) {
                let xb = p.xi_h(b, bit(h, b));
                want *= p.theta(p.xi_h(a, 0) - xb).unwrap() / p.theta(p.xi_h(a, 1) - xb).unwrap();
            }
            assert!((measured - want).norm() < 1e-9 * want.norm(), "h = {h}, a = {a}");
        }
    }
}

#[test]
fn separate_vector_of_an_indicator_pattern() {
    let p = case1();
    let basis = SovBasis::new(&p).unwrap();
    let h = 0b101;
    let coeffs: Vec<[C; 2]> =
        (0..3).map(|a| if bit(h, a) == 0 { [c(1.0, 0.0), c(0.0, 0.0)] } else { [c(0.0, 0.0), c(1.0, 0.0)] }).collect();
    let v = separate_vector(&SeparateState { side: Side::Right, coeffs }, &basis);
    let want: Vec<C> = basis.state(h, Side::Right).iter().map(|x| x * basis.theta_dets[h]).collect();
    assert!(rel_diff(&v, &want) < 1e-14);
}

fn sample_state(side: Side, n: usize, seed: f64) -> SeparateState {
    let coeffs = (0..n)
        .map(|a| {
            let t = seed + a as f64;
            [c(t.sin(), 0.3 * t.cos()), c((1.7 * t).cos(), (0.4 * t).sin())]
        })
        .collect();
    SeparateState { side, coeffs }
}

#[test]
fn determinant_scalar_product_matches_expansion() {
    for p in [case1(), five_sites()] {
        let basis = SovBasis::new(&p).unwrap();
        for seed in [0.3, 1.9, -2.4] {
            let alpha = sample_state(Side::Left, p.n, seed);
            let beta = sample_state(Side::Right, p.n, seed * 0.7 + 1.0);
            let det_form = scalar_product_det(&alpha, &beta, &p).unwrap();
            let brute = scalar_product_sum(&alpha, &beta, &basis);
            assert!((det_form - brute).norm() < 1e-10 * brute.norm(), "{det_form} vs {brute}");
            let direct: C =
                separate_vector(&alpha, &basis).iter().zip(separate_vector(&beta, &basis)).map(|(x, y)| x * y).sum();
            assert!((direct - brute).norm() < 1e-9 * brute.norm());
        }
        assert!(
            scalar_product_det(&sample_state(Side::Right, p.n, 0.0), &sample_state(Side::Right, p.n, 1.0), &p).is_err()
        );
    }
}

#[test]
fn single_site_scalar_product() {
    let p = ChainParams::real(&[0.44], 0.7, 0.3).unwrap();
    let ctx = p.ctx.with_omega(p.ctx.omega / 2.0).unwrap();
    let alpha = sample_state(Side::Left, 1, 0.2);
    let beta = sample_state(Side::Right, 1, 0.9);
    let hand: C = (0..2)
        .map(|h| {
            let u = SovPoint::new(0, h as u8, &p).char_arg();
            alpha.coeffs[0][h] * beta.coeffs[0][h] * theta_char(0, u, 1, &ctx).unwrap()
        })
        .sum();
    assert!((scalar_product_det(&alpha, &beta, &p).unwrap() - hand).norm() < 1e-14 * hand.norm());
}

fn eigen_residual(m: &Mat<C>, v: &[C], t: C, left: bool) -> f64 {
    let mv = if left { vec_mat(v, m) } else { mat_vec(m, v) };
    let d: Vec<C> = mv.iter().zip(v).map(|(x, y)| x - t * y).collect();
    vec_norm(&d) / vec_norm(v) / m.norm_l2()
}

#[test]
fn eigenstates_from_eigenvalues() {
    for p in [case1(), five_sites()] {
        let basis = SovBasis::new(&p).unwrap();
        let records = diagonalize(TransferModel::SixVertexBar, &p, 11).unwrap();
        assert_eq!(records.len(), p.dim());
        let lambdas = [c(0.13, 0.2), c(-0.8, 0.05), c(1.4, -0.17), c(0.55, 0.31), c(-1.9, -0.08)];
        let mats: Vec<Mat<C>> = lambdas.iter().map(|&l| transfer_6vd_bar(l, &p).unwrap().mat).collect();
        let mut rights = Vec::new();
        let mut lefts = Vec::new();
        for r in &records {
            let right = eigenstate(&r.t_at_xi, Side::Right, &basis, &p).unwrap();
            let left = eigenstate(&r.t_at_xi, Side::Left, &basis, &p).unwrap();
            for (l, m) in lambdas.iter().zip(&mats) {
                let t = interpolate(&r.t_at_xi, *l, &p).unwrap();
                assert!(eigen_residual(m, &right, t, false) < 1e-8);
                assert!(eigen_residual(m, &left, t, true) < 1e-8);
            }
            rights.push(right);
            lefts.push(left);
        }
        // Orthogonality, the norm formula and the eigenbasis decomposition of the identity.
        let dim = p.dim();
        let mut id = Mat::<C>::zeros(dim, dim);
        for (a, ra) in records.iter().enumerate() {
            let la = eigen_coefficients(&ra.t_at_xi, Side::Left, &p).unwrap();
            let rb = eigen_coefficients(&ra.t_at_xi, Side::Right, &p).unwrap();
            let norm = scalar_product_det(&la, &rb, &p).unwrap();
            let scale = vec_norm(&lefts[a]) * vec_norm(&rights[a]);
            for (b, right) in rights.iter().enumerate() {
                let pair: C = lefts[a].iter().zip(right).map(|(x, y)| x * y).sum();
                if a == b {
                    assert!((pair - norm).norm() < 1e-8 * norm.norm());
                } else {
                    assert!(pair.norm() < 1e-8 * scale, "pairing of {a} and {b}: {pair}");
                }
            }
            for i in 0..dim {
                for j in 0..dim {
                    id[(i, j)] += rights[a][i] * lefts[a][j] / norm;
                }
            }
        }
        assert!((&id - &Mat::<C>::identity(dim, dim)).norm_l2() < 1e-7);
    }
}

#[test]
fn single_site_eigenstates() {
    // The two eigenvectors have opposite relative sign between the two basis states.
    let p = ChainParams::real(&[0.44], 0.7, 0.3).unwrap();
    let basis = SovBasis::new(&p).unwrap();
    let records = diagonalize(TransferModel::SixVertexBar, &p, 3).unwrap();
    assert_eq!(records.len(), 2);
    let v: Vec<Vec<C>> = records.iter().map(|r| eigenstate(&r.t_at_xi, Side::Right, &basis, &p).unwrap()).collect();
    let r0 = v[0][0] / v[0][1];
    let r1 = v[1][0] / v[1][1];
    assert!((r0 + r1).norm() < 1e-10 * r0.norm());
    assert!((records[0].t_at_xi[0] + records[1].t_at_xi[0]).norm() < 1e-10 * records[0].t_at_xi[0].norm());
}

#[test]
fn non_eigenvalues_are_rejected() {
    let p = case1();
    let basis = SovBasis::new(&p).unwrap();
    let bad = [c(1.0, 0.0), c(0.5, 0.0), c(0.2, 0.0)];
    assert!(matches!(eigenstate(&bad, Side::Right, &basis, &p), Err(vertex_core::Error::NotEigenvalue(_))));
}

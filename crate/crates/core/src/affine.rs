//! Pseudo-states and affine combinations of product channels.
//!
//! A pseudo-state `Σ r_i |ii⟩⟨ii|` with real weights summing to one is
//! normalised but may fail to be positive. Sharing one between two
//! classically controlled local channels realises any affine combination
//! `Σ r_i Φ_i ⊗ Ψ_i`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::predicates::{bell_wiring, is_causal};
use crate::process::{compose_par, Process};
use crate::tensor::{kron, ComplexMatrix, SystemDims, Tolerance, C64};

/// Index blocks evaluated at a time when wiring a pseudo-state.
const INDEX_BLOCK: usize = 4;

/// `Σ_i r_i |i⟩⟨i| ⊗ |i⟩⟨i|` on `index ⊗ index`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoState {
    coeffs: Vec<f64>,
    state: Process,
}

impl PseudoState {
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.state.choi()
    }

    pub fn process(&self) -> &Process {
        &self.state
    }
}

fn check_weights(coeffs: &[f64]) -> Result<()> {
    if coeffs.is_empty() {
        return Err(Error::Argument(
            "at least one coefficient is required".into(),
        ));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Argument("coefficients must be finite".into()));
    }
    let total: f64 = coeffs.iter().sum();
    if (total - 1.0).abs() > Tolerance::DEFAULT_EPS {
        return Err(Error::Argument(format!(
            "coefficients sum to {total}, expected 1"
        )));
    }
    Ok(())
}

pub fn pseudo_state(coeffs: &[f64]) -> Result<PseudoState> {
    check_weights(coeffs)?;
    Ok(PseudoState {
        coeffs: coeffs.to_vec(),
        state: diagonal_pair_state(coeffs),
    })
}

/// `Σ_i r_i |ii⟩⟨ii|` with no normalisation check.
fn diagonal_pair_state(coeffs: &[f64]) -> Process {
    let n = coeffs.len();
    let mut diag = vec![0.0; n * n];
    for (i, r) in coeffs.iter().enumerate() {
        diag[i * n + i] = *r;
    }
    let cp = coeffs.iter().all(|&r| r >= 0.0);
    Process::state(&SystemDims::of(&[n, n]), ComplexMatrix::diag(&diag))
        .expect("diagonal has matching size")
        .known_cp(Some(cp))
}

/// `index ⊗ A₁ → A₂`: measures the index in the computational basis and
/// applies the matching channel.
pub fn controlled_local_channel(channels: &[Process]) -> Result<Process> {
    let first = channels
        .first()
        .ok_or_else(|| Error::Argument("at least one channel is required".into()))?;
    for (i, c) in channels.iter().enumerate() {
        if c.in_sys() != first.in_sys() || c.out_sys() != first.out_sys() {
            return Err(Error::WireMismatch {
                left: format!("channel 0 {} -> {}", first.in_sys(), first.out_sys()),
                right: format!("channel {i} {} -> {}", c.in_sys(), c.out_sys()),
            });
        }
        let v = is_causal(c, Tolerance::default());
        if !v.holds {
            return Err(Error::Argument(format!(
                "channel {i} is not causal (residual {:.3e})",
                v.residual
            )));
        }
    }
    let n = channels.len();
    let size = n * first.choi().rows();
    let mut choi = ComplexMatrix::zeros(size, size);
    for (k, c) in channels.iter().enumerate() {
        let block = kron(&ComplexMatrix::unit(n, k, k), c.choi())?;
        choi = choi.add_scaled(&block, C64::new(1.0, 0.0))?;
    }
    let cp = channels.iter().all(|c| c.cp_hint() == Some(true));
    let in_sys = SystemDims::of(&[n]).concat(first.in_sys());
    Ok(Process::new(in_sys, first.out_sys().clone(), choi)?.known_cp(cp.then_some(true)))
}

/// `Σ r_i Φ_i ⊗ Ψ_i` with causal local parts and weights summing to one.
#[derive(Debug, Clone)]
pub struct AffineCombination {
    terms: Vec<(f64, Process, Process)>,
}

impl AffineCombination {
    pub fn new(terms: Vec<(f64, Process, Process)>) -> Result<Self> {
        let weights: Vec<f64> = terms.iter().map(|t| t.0).collect();
        check_weights(&weights)?;
        let (a, b) = (&terms[0].1, &terms[0].2);
        for (i, (_, phi, psi)) in terms.iter().enumerate() {
            if phi.in_sys() != a.in_sys() || phi.out_sys() != a.out_sys() {
                return Err(Error::WireMismatch {
                    left: format!("Φ_0 {} -> {}", a.in_sys(), a.out_sys()),
                    right: format!("Φ_{i} {} -> {}", phi.in_sys(), phi.out_sys()),
                });
            }
            if psi.in_sys() != b.in_sys() || psi.out_sys() != b.out_sys() {
                return Err(Error::WireMismatch {
                    left: format!("Ψ_0 {} -> {}", b.in_sys(), b.out_sys()),
                    right: format!("Ψ_{i} {} -> {}", psi.in_sys(), psi.out_sys()),
                });
            }
        }
        Ok(AffineCombination { terms })
    }

    /// Pairs a span with decomposition weights.
    pub fn from_span(coeffs: &[f64], span: &[(Process, Process)]) -> Result<Self> {
        if coeffs.len() != span.len() {
            return Err(Error::Argument(format!(
                "{} coefficients for {} span elements",
                coeffs.len(),
                span.len()
            )));
        }
        Self::new(
            coeffs
                .iter()
                .zip(span)
                .map(|(r, (a, b))| (*r, a.clone(), b.clone()))
                .collect(),
        )
    }

    pub fn terms(&self) -> &[(f64, Process, Process)] {
        &self.terms
    }

    /// `Σ r_i choi(Φ_i ⊗ Ψ_i)` computed directly, for comparison.
    pub fn direct_sum(&self) -> Result<Process> {
        let products: Vec<(f64, Process)> = self
            .terms
            .iter()
            .map(|(r, a, b)| (*r, compose_par(a, b)))
            .collect();
        let refs: Vec<(f64, &Process)> = products.iter().map(|(r, p)| (*r, p)).collect();
        Process::linear_combination(&refs)
    }
}

/// Wires a pseudo-state into classically controlled channels on both sides,
/// giving `A₁ ⊗ B₁ → A₂ ⊗ B₂`.
///
/// Both the pseudo-state and the controlled channels are block diagonal in
/// the index, so long term lists are wired a few index values at a time and
/// the blocks summed.
pub fn realize_affine(comb: &AffineCombination) -> Result<Process> {
    let mut acc: Option<Process> = None;
    for block in comb.terms.chunks(INDEX_BLOCK) {
        let weights: Vec<f64> = block.iter().map(|t| t.0).collect();
        let phis: Vec<Process> = block.iter().map(|t| t.1.clone()).collect();
        let psis: Vec<Process> = block.iter().map(|t| t.2.clone()).collect();
        let n_a = phis[0].in_sys().len();
        let order: Vec<usize> = (1..=n_a).chain([0]).collect();
        let side_a = controlled_local_channel(&phis)?.permute_inputs(&order)?;
        let side_b = controlled_local_channel(&psis)?;
        let (part, _) = bell_wiring(&side_a, &side_b, &diagonal_pair_state(&weights))?;
        acc = Some(match acc {
            None => part,
            Some(sum) => Process::linear_combination(&[(1.0, &sum), (1.0, &part)])?,
        });
    }
    let out = acc.expect("combination has at least one term");
    let cp = out.is_cp(Tolerance::default());
    Ok(out.known_cp(Some(cp)))
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub coeffs: Vec<f64>,
    /// `‖choi(f) − Σ r_i choi(Φ_i ⊗ Ψ_i)‖_F`.
    pub residual: f64,
    /// Numerical rank of the span differences.
    pub rank: usize,
    /// Rank of the differences between causal product channels of this type.
    pub expected_rank: usize,
    /// The span misses directions of the product-channel affine hull.
    pub span_deficient: bool,
}

/// Dimension of the linear span of causal Choi matrices `d_in → d_out`.
fn causal_span_dim(d_in: usize, d_out: usize) -> usize {
    (d_in * d_out).pow(2) - d_in * d_in + 1
}

/// Least-squares affine weights over a span of product channels.
///
/// The constraint `Σ r_i = 1` is eliminated by writing the last weight as
/// one minus the rest; the remaining unconstrained problem is solved with a
/// rank-revealing SVD.
pub fn decompose_nonsignalling(f: &Process, span: &[(Process, Process)]) -> Result<Decomposition> {
    let (a0, b0) = span
        .first()
        .ok_or_else(|| Error::Argument("the span must not be empty".into()))?;
    let elems: Vec<Process> = span.iter().map(|(a, b)| compose_par(a, b)).collect();
    for (i, e) in elems.iter().enumerate() {
        if e.in_sys() != f.in_sys() || e.out_sys() != f.out_sys() {
            return Err(Error::WireMismatch {
                left: format!("target {} -> {}", f.in_sys(), f.out_sys()),
                right: format!("span element {i} {} -> {}", e.in_sys(), e.out_sys()),
            });
        }
    }
    let expected_rank = causal_span_dim(a0.in_sys().total(), a0.out_sys().total())
        * causal_span_dim(b0.in_sys().total(), b0.out_sys().total())
        - 1;

    let n = elems.len();
    let last = elems[n - 1].choi();
    let entries = f.choi().as_slice().len();
    let column = |m: &ComplexMatrix, out: &mut [f64]| {
        for (k, (z, l)) in m.as_slice().iter().zip(last.as_slice()).enumerate() {
            out[k] = z.re - l.re;
            out[entries + k] = z.im - l.im;
        }
    };
    let mut design = DMatrix::<f64>::zeros(2 * entries, n - 1);
    let mut col = vec![0.0; 2 * entries];
    for (j, e) in elems[..n - 1].iter().enumerate() {
        column(e.choi(), &mut col);
        design.column_mut(j).copy_from_slice(&col);
    }
    column(f.choi(), &mut col);
    let target = nalgebra::DVector::from_column_slice(&col);

    let (mut coeffs, rank) = if n == 1 {
        (vec![1.0], 0)
    } else {
        let svd = design.svd(true, true);
        let smax = svd.singular_values.max();
        let cutoff = smax * 1e-10 * (2 * entries).max(n) as f64;
        let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
        let sol = svd
            .solve(&target, cutoff.max(f64::MIN_POSITIVE))
            .map_err(|e| Error::Numeric(e.to_string()))?;
        let mut c: Vec<f64> = sol.iter().copied().collect();
        c.push(0.0);
        (c, rank)
    };
    let head: f64 = coeffs[..n - 1].iter().sum();
    coeffs[n - 1] = 1.0 - head;

    let mut approx = ComplexMatrix::zeros(f.choi().rows(), f.choi().cols());
    for (r, e) in coeffs.iter().zip(&elems) {
        approx = approx.add_scaled(e.choi(), C64::new(*r, 0.0))?;
    }
    let residual = (f.choi() - &approx).frobenius_norm();
    if !residual.is_finite() {
        return Err(Error::Numeric(
            "decomposition produced a non-finite residual".into(),
        ));
    }
    Ok(Decomposition {
        coeffs,
        residual,
        rank,
        expected_rank,
        span_deficient: rank < expected_rank,
    })
}

/// `size` pairs of independent random causal channels.
pub fn random_product_span(
    a: (&SystemDims, &SystemDims),
    b: (&SystemDims, &SystemDims),
    size: usize,
    seed: u64,
) -> Result<Vec<(Process, Process)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|_| {
            Ok((
                Process::random_causal_channel_with(a.0, a.1, None, &mut rng)?,
                Process::random_causal_channel_with(b.0, b.1, None, &mut rng)?,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predicates::{
        is_nonsignalling_a_to_b, is_nonsignalling_b_to_a, make_strongly_nonsignalling, Bipartition,
    };
    use crate::tensor::trace_out;

    fn q() -> SystemDims {
        SystemDims::of(&[2])
    }

    fn chan(seed: u64) -> Process {
        Process::random_causal_channel(&q(), &q(), None, seed).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn pseudo_state_examples() {
        let one = pseudo_state(&[1.0]).unwrap();
        assert_eq!(one.matrix(), &ComplexMatrix::identity(1));

        let half = pseudo_state(&[0.5, 0.5]).unwrap();
        assert!(half.process().is_cp(tol()));
        assert!((half.matrix().trace().re - 1.0).abs() < 1e-15);

        let neg = pseudo_state(&[1.5, -0.5]).unwrap();
        assert!((neg.matrix().trace().re - 1.0).abs() < 1e-15);
        assert_eq!(neg.process().cp_hint(), Some(false));
        assert!(!neg.process().is_cp(tol()));
        assert_eq!(neg.matrix()[(3, 3)], C64::new(-0.5, 0.0));
        assert_eq!(neg.matrix()[(1, 1)], C64::new(0.0, 0.0));
    }

    #[test]
    fn pseudo_state_rejects_bad_sum() {
        assert!(matches!(pseudo_state(&[0.5, 0.4]), Err(Error::Argument(_))));
        assert!(matches!(pseudo_state(&[]), Err(Error::Argument(_))));
    }

    #[test]
    fn discarding_a_pseudo_state_gives_one() {
        let ps = pseudo_state(&[2.0, -3.0, 2.0]).unwrap();
        let sys = ps.process().out_sys().clone();
        let t = trace_out(ps.matrix(), &sys, &[0, 1]).unwrap();
        assert!((t[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_controlled_channel_ignores_index() {
        let phi = chan(1);
        let c = controlled_local_channel(std::slice::from_ref(&phi)).unwrap();
        let expect = Process::discard(&SystemDims::of(&[1])).beside(&phi);
        assert!((c.choi() - expect.choi()).frobenius_norm() < 1e-15);
        assert!(is_causal(&c, tol()).holds);
    }

    #[test]
    fn controlled_channel_checks_types() {
        let bad = Process::random_causal_channel(&q(), &SystemDims::of(&[3]), None, 1).unwrap();
        assert!(matches!(
            controlled_local_channel(&[chan(1), bad]),
            Err(Error::WireMismatch { .. })
        ));
        let doubled = Process::linear_combination(&[(2.0, &Process::identity(&q()))]).unwrap();
        assert!(matches!(
            controlled_local_channel(&[doubled]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn single_term_is_product() {
        let (a, b) = (chan(2), chan(3));
        let comb = AffineCombination::new(vec![(1.0, a.clone(), b.clone())]).unwrap();
        let out = realize_affine(&comb).unwrap();
        assert!(out.distance(&compose_par(&a, &b)).unwrap() < 1e-12);
    }

    #[test]
    fn convex_mixture_of_unitaries() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let z = ComplexMatrix::diag(&[1.0, -1.0]);
        let ux = Process::unitary(&q(), &x).unwrap();
        let uz = Process::unitary(&q(), &z).unwrap();
        let comb = AffineCombination::new(vec![
            (0.5, ux.clone(), ux.clone()),
            (0.5, uz.clone(), uz.clone()),
        ])
        .unwrap();
        let out = realize_affine(&comb).unwrap();
        let direct = Process::linear_combination(&[
            (0.5, &compose_par(&ux, &ux)),
            (0.5, &compose_par(&uz, &uz)),
        ])
        .unwrap();
        assert!(out.distance(&direct).unwrap() < 1e-12);
        assert!(out.is_cp(tol()));
    }

    #[test]
    fn negative_weights_stay_causal_and_nonsignalling() {
        let comb = AffineCombination::new(vec![(1.5, chan(4), chan(5)), (-0.5, chan(6), chan(7))])
            .unwrap();
        let out = realize_affine(&comb).unwrap();
        assert!(out.distance(&comb.direct_sum().unwrap()).unwrap() < 1e-9);
        let split = Bipartition::new(1, 1);
        assert!(is_causal(&out, tol()).holds);
        assert!(is_nonsignalling_a_to_b(&out, split, tol()).unwrap().holds);
        assert!(is_nonsignalling_b_to_a(&out, split, tol()).unwrap().holds);
    }

    #[test]
    fn many_terms_are_wired_blockwise() {
        let w = [0.4, -0.3, 0.2, 0.5, 0.1, 0.6, -0.5];
        let terms = w
            .iter()
            .enumerate()
            .map(|(i, r)| (*r, chan(10 + i as u64), chan(20 + i as u64)))
            .collect();
        let comb = AffineCombination::new(terms).unwrap();
        assert!(
            realize_affine(&comb)
                .unwrap()
                .distance(&comb.direct_sum().unwrap())
                .unwrap()
                < 1e-9
        );
    }

    #[test]
    fn decomposition_of_a_span_member() {
        let span = random_product_span((&q(), &q()), (&q(), &q()), 5, 3).unwrap();
        let f = compose_par(&span[2].0, &span[2].1);
        let d = decompose_nonsignalling(&f, &span).unwrap();
        assert!(d.residual < 1e-9);
        for (i, c) in d.coeffs.iter().enumerate() {
            let want = if i == 2 { 1.0 } else { 0.0 };
            assert!((c - want).abs() < 1e-9, "{:?}", d.coeffs);
        }
        assert!(d.span_deficient);
        assert_eq!(d.expected_rank, 168);
    }

    #[test]
    fn decomposition_recovers_convex_weights() {
        let span = random_product_span((&q(), &q()), (&q(), &q()), 6, 8).unwrap();
        let f = Process::linear_combination(&[
            (0.3, &compose_par(&span[1].0, &span[1].1)),
            (0.7, &compose_par(&span[4].0, &span[4].1)),
        ])
        .unwrap();
        let d = decompose_nonsignalling(&f, &span).unwrap();
        assert!(d.residual < 1e-9);
        assert!((d.coeffs[1] - 0.3).abs() < 1e-9 && (d.coeffs[4] - 0.7).abs() < 1e-9);
    }

    #[test]
    fn large_span_decomposes_strongly_nonsignalling_channels() {
        let span = random_product_span((&q(), &q()), (&q(), &q()), 300, 21).unwrap();
        let psi_a =
            Process::random_causal_channel(&SystemDims::of(&[2, 2]), &q(), None, 1).unwrap();
        let psi_b =
            Process::random_causal_channel(&SystemDims::of(&[2, 2]), &q(), None, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = Process::random_state(&SystemDims::of(&[2, 2]), 4, &mut rng).unwrap();
        let (f, _) = make_strongly_nonsignalling(&psi_a, &psi_b, &rho, tol()).unwrap();
        let d = decompose_nonsignalling(&f, &span).unwrap();
        assert!(!d.span_deficient);
        assert_eq!(d.rank, 168);
        assert!(d.residual < 1e-6, "{}", d.residual);
        let back =
            realize_affine(&AffineCombination::from_span(&d.coeffs, &span).unwrap()).unwrap();
        assert!(back.distance(&f).unwrap() < 1e-6);
    }

    #[test]
    fn signalling_target_is_not_fabricated() {
        let span = random_product_span((&q(), &q()), (&q(), &q()), 300, 4).unwrap();
        let swap = Process::swap(&q(), &q());
        let d = decompose_nonsignalling(&swap, &span).unwrap();
        assert!(d.residual > 0.1);
    }

    #[test]
    fn decomposition_checks_types() {
        let span = random_product_span((&q(), &q()), (&q(), &q()), 2, 1).unwrap();
        assert!(matches!(
            decompose_nonsignalling(&chan(1), &span),
            Err(Error::WireMismatch { .. })
        ));
        assert!(matches!(
            decompose_nonsignalling(&chan(1), &[]),
            Err(Error::Argument(_))
        ));
    }
}

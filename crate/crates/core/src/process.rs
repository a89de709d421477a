//! Processes as Choi matrices.
//!
//! A process `Φ : A → B` is stored through its unnormalised Choi matrix
//! `Σ_ij |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)` on `A ⊗ B`, input factors first. Under this
//! convention bending an input wire up is a relabelling of the same matrix,
//! discarding has the identity as its Choi matrix, and the compact closed
//! structure uses the computational basis cup `Σ |ii⟩`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::tensor::{
    frobenius_distance, is_psd, kron, link, permute_subsystems, trace_out, ComplexMatrix,
    SystemDims, Tolerance, C64, ONE, ZERO,
};

#[derive(Debug, Clone)]
pub struct Process {
    in_sys: SystemDims,
    out_sys: SystemDims,
    choi: ComplexMatrix,
    /// Known complete positivity, when a constructor can vouch for it.
    cp_hint: Option<bool>,
}

/// A process with trivial input.
pub type StateP = Process;
/// A process with trivial output.
pub type EffectP = Process;

impl PartialEq for Process {
    fn eq(&self, other: &Self) -> bool {
        self.in_sys == other.in_sys && self.out_sys == other.out_sys && self.choi == other.choi
    }
}

impl Process {
    pub fn new(in_sys: SystemDims, out_sys: SystemDims, choi: ComplexMatrix) -> Result<Self> {
        let side = in_sys.total() * out_sys.total();
        if !choi.is_square() || choi.rows() != side {
            return Err(Error::Dimension(format!(
                "Choi matrix of a process {in_sys} -> {out_sys} must be {side}x{side}, got {}x{}",
                choi.rows(),
                choi.cols()
            )));
        }
        if !choi.is_finite() {
            return Err(Error::Numeric("Choi matrix has non-finite entries".into()));
        }
        Ok(Process {
            in_sys,
            out_sys,
            choi,
            cp_hint: None,
        })
    }

    pub(crate) fn known_cp(mut self, cp: Option<bool>) -> Self {
        self.cp_hint = cp;
        self
    }

    pub fn in_sys(&self) -> &SystemDims {
        &self.in_sys
    }

    pub fn out_sys(&self) -> &SystemDims {
        &self.out_sys
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn into_choi(self) -> ComplexMatrix {
        self.choi
    }

    /// The system the Choi matrix lives on: inputs then outputs.
    pub fn joint_sys(&self) -> SystemDims {
        self.in_sys.concat(&self.out_sys)
    }

    pub fn cp_hint(&self) -> Option<bool> {
        self.cp_hint
    }

    /// Complete positivity: PSD Choi matrix.
    pub fn is_cp(&self, tol: Tolerance) -> bool {
        match self.cp_hint {
            Some(known) => known,
            None => is_psd(&self.choi, tol).unwrap_or(false),
        }
    }

    pub fn is_state(&self) -> bool {
        self.in_sys.is_empty()
    }

    pub fn is_effect(&self) -> bool {
        self.out_sys.is_empty()
    }

    /// The `1x1` value of a process `I → I`.
    pub fn scalar(&self) -> Option<C64> {
        (self.choi.rows() == 1).then(|| self.choi[(0, 0)])
    }

    pub fn distance(&self, other: &Process) -> Result<f64> {
        if self.in_sys != other.in_sys || self.out_sys != other.out_sys {
            return Err(Error::WireMismatch {
                left: format!("{} -> {}", self.in_sys, self.out_sys),
                right: format!("{} -> {}", other.in_sys, other.out_sys),
            });
        }
        frobenius_distance(&self.choi, &other.choi)
    }

    /// `1_A`, whose Choi matrix is the unnormalised cup on `A ⊗ A`.
    pub fn identity(a: &SystemDims) -> Process {
        let choi = cup_matrix(a.total());
        Process::new(a.clone(), a.clone(), choi)
            .expect("cup has matching size")
            .known_cp(Some(true))
    }

    /// `η_A : I → A ⊗ A`.
    pub fn cup(a: &SystemDims) -> StateP {
        Process::new(SystemDims::trivial(), a.concat(a), cup_matrix(a.total()))
            .expect("cup has matching size")
            .known_cp(Some(true))
    }

    /// `ε_A : A ⊗ A → I`.
    pub fn cap(a: &SystemDims) -> EffectP {
        Process::new(a.concat(a), SystemDims::trivial(), cup_matrix(a.total()))
            .expect("cap has matching size")
            .known_cp(Some(true))
    }

    /// The symmetry `A ⊗ B → B ⊗ A`.
    pub fn swap(a: &SystemDims, b: &SystemDims) -> Process {
        let (da, db) = (a.total(), b.total());
        let mut p = ComplexMatrix::zeros(da * db, da * db);
        for x in 0..da {
            for y in 0..db {
                p[(y * da + x, x * db + y)] = ONE;
            }
        }
        Process::kraus(&a.concat(b), &b.concat(a), &[p])
            .expect("permutation matrix has matching size")
    }

    /// `d_A`, the discarding effect.
    pub fn discard(a: &SystemDims) -> EffectP {
        Process::new(
            a.clone(),
            SystemDims::trivial(),
            ComplexMatrix::identity(a.total()),
        )
        .expect("identity has matching size")
        .known_cp(Some(true))
    }

    /// A state with density (or pseudo-density) matrix `rho`.
    pub fn state(sys: &SystemDims, rho: ComplexMatrix) -> Result<StateP> {
        Process::new(SystemDims::trivial(), sys.clone(), rho)
    }

    /// An effect `A → I` with the given Choi matrix.
    pub fn effect(sys: &SystemDims, e: ComplexMatrix) -> Result<EffectP> {
        Process::new(sys.clone(), SystemDims::trivial(), e)
    }

    /// The map `ρ ↦ Σ_k K_k ρ K_k†`.
    pub fn kraus(
        in_sys: &SystemDims,
        out_sys: &SystemDims,
        ops: &[ComplexMatrix],
    ) -> Result<Process> {
        let (di, d_out) = (in_sys.total(), out_sys.total());
        let mut choi = ComplexMatrix::zeros(di * d_out, di * d_out);
        for k in ops {
            if k.rows() != d_out || k.cols() != di {
                return Err(Error::Dimension(format!(
                    "Kraus operator must be {d_out}x{di}, got {}x{}",
                    k.rows(),
                    k.cols()
                )));
            }
            // |K⟩⟩ = Σ_i |i⟩ ⊗ K|i⟩
            let vec: Vec<C64> = (0..di)
                .flat_map(|i| (0..d_out).map(move |o| (i, o)))
                .map(|(i, o)| k[(o, i)])
                .collect();
            choi = &choi + &ComplexMatrix::outer(&vec);
        }
        Ok(Process::new(in_sys.clone(), out_sys.clone(), choi)?.known_cp(Some(true)))
    }

    pub fn unitary(sys: &SystemDims, u: &ComplexMatrix) -> Result<Process> {
        Process::kraus(sys, sys, std::slice::from_ref(u))
    }

    /// Tabulates a linear map on its matrix units.
    pub fn from_linear_map(
        in_sys: &SystemDims,
        out_sys: &SystemDims,
        mut map: impl FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
    ) -> Result<Process> {
        let (di, d_out) = (in_sys.total(), out_sys.total());
        let mut choi = ComplexMatrix::zeros(di * d_out, di * d_out);
        for i in 0..di {
            for j in 0..di {
                let image = map(&ComplexMatrix::unit(di, i, j))?;
                if image.rows() != d_out || image.cols() != d_out {
                    return Err(Error::Dimension(format!(
                        "linear map produced a {}x{} matrix, expected {d_out}x{d_out}",
                        image.rows(),
                        image.cols()
                    )));
                }
                for o in 0..d_out {
                    for p in 0..d_out {
                        choi[(i * d_out + o, j * d_out + p)] = image[(o, p)];
                    }
                }
            }
        }
        Process::new(in_sys.clone(), out_sys.clone(), choi)
    }

    /// `Σ w_k Φ_k` for processes of one type.
    pub fn linear_combination(terms: &[(f64, &Process)]) -> Result<Process> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::Argument("empty linear combination".into()))?;
        let mut choi = ComplexMatrix::zeros(first.choi.rows(), first.choi.cols());
        for (w, p) in terms {
            if p.in_sys != first.in_sys || p.out_sys != first.out_sys {
                return Err(Error::WireMismatch {
                    left: format!("{} -> {}", first.in_sys, first.out_sys),
                    right: format!("{} -> {}", p.in_sys, p.out_sys),
                });
            }
            choi = choi.add_scaled(&p.choi, C64::new(*w, 0.0))?;
        }
        let cp = terms
            .iter()
            .all(|(w, p)| *w >= 0.0 && p.cp_hint == Some(true))
            .then_some(true);
        Ok(Process::new(first.in_sys.clone(), first.out_sys.clone(), choi)?.known_cp(cp))
    }

    /// `g ∘ f`: run `self`, then `next`.
    pub fn then(&self, next: &Process) -> Result<Process> {
        compose_seq(self, next)
    }

    /// `self ⊗ other`.
    pub fn beside(&self, other: &Process) -> Process {
        compose_par(self, other)
    }

    /// Process-state duality: the same matrix read as a state on `A ⊗ B`.
    pub fn bend(&self) -> StateP {
        Process {
            in_sys: SystemDims::trivial(),
            out_sys: self.joint_sys(),
            choi: self.choi.clone(),
            cp_hint: self.cp_hint,
        }
    }

    /// Inverse of [`Process::bend`]: the first `split` output factors become inputs.
    pub fn unbend(&self, split: usize) -> Result<Process> {
        if !self.in_sys.is_empty() {
            return Err(Error::Argument(format!(
                "only states can be unbent, this process has input {}",
                self.in_sys
            )));
        }
        if split > self.out_sys.len() {
            return Err(Error::Argument(format!(
                "split {split} exceeds the {} factors of {}",
                self.out_sys.len(),
                self.out_sys
            )));
        }
        Ok(Process {
            in_sys: self.out_sys.slice(0..split),
            out_sys: self.out_sys.slice(split..self.out_sys.len()),
            choi: self.choi.clone(),
            cp_hint: self.cp_hint,
        })
    }

    /// `Φ(ρ) = Tr_A[(ρ^T ⊗ I_B) choi]`.
    pub fn apply_to_state(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let di = self.in_sys.total();
        if !rho.is_square() || rho.rows() != di {
            return Err(Error::Dimension(format!(
                "state is {}x{} but the process input {} has dimension {di}",
                rho.rows(),
                rho.cols(),
                self.in_sys
            )));
        }
        link(rho, 1, di, &self.choi, self.out_sys.total())
    }

    /// Reorders input factors: new input `k` is old input `perm[k]`.
    pub fn permute_inputs(&self, perm: &[usize]) -> Result<Process> {
        let n_in = self.in_sys.len();
        let full: Vec<usize> = perm
            .iter()
            .copied()
            .chain(n_in..n_in + self.out_sys.len())
            .collect();
        if perm.len() != n_in {
            return Err(Error::Argument(format!(
                "input permutation {perm:?} must have length {n_in}"
            )));
        }
        let choi = permute_subsystems(&self.choi, &self.joint_sys(), &full)?;
        Ok(Process {
            in_sys: self.in_sys.select(perm),
            out_sys: self.out_sys.clone(),
            choi,
            cp_hint: self.cp_hint,
        })
    }

    /// Reorders output factors: new output `k` is old output `perm[k]`.
    pub fn permute_outputs(&self, perm: &[usize]) -> Result<Process> {
        let n_in = self.in_sys.len();
        if perm.len() != self.out_sys.len() {
            return Err(Error::Argument(format!(
                "output permutation {perm:?} must have length {}",
                self.out_sys.len()
            )));
        }
        let full: Vec<usize> = (0..n_in).chain(perm.iter().map(|p| p + n_in)).collect();
        let choi = permute_subsystems(&self.choi, &self.joint_sys(), &full)?;
        Ok(Process {
            in_sys: self.in_sys.clone(),
            out_sys: self.out_sys.select(perm),
            choi,
            cp_hint: self.cp_hint,
        })
    }

    /// Discards the listed output factors.
    pub fn discard_outputs(&self, which: &[usize]) -> Result<Process> {
        let n_in = self.in_sys.len();
        let traced: Vec<usize> = which.iter().map(|w| w + n_in).collect();
        let choi = trace_out(&self.choi, &self.joint_sys(), &traced)?;
        let kept: Vec<usize> = (0..self.out_sys.len())
            .filter(|i| !which.contains(i))
            .collect();
        Ok(Process {
            in_sys: self.in_sys.clone(),
            out_sys: self.out_sys.select(&kept),
            choi,
            cp_hint: self.cp_hint,
        })
    }

    /// A random quantum channel, deterministic per seed.
    ///
    /// Draws a complex Gaussian matrix, orthonormalises its columns into an
    /// isometry `V : in → out ⊗ env`, and traces out the environment.
    /// `env_dim` defaults to the output dimension.
    pub fn random_causal_channel(
        in_sys: &SystemDims,
        out_sys: &SystemDims,
        env_dim: Option<usize>,
        seed: u64,
    ) -> Result<Process> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_causal_channel_with(in_sys, out_sys, env_dim, &mut rng)
    }

    pub fn random_causal_channel_with<R: Rng + ?Sized>(
        in_sys: &SystemDims,
        out_sys: &SystemDims,
        env_dim: Option<usize>,
        rng: &mut R,
    ) -> Result<Process> {
        let (di, d_out) = (in_sys.total(), out_sys.total());
        let env = env_dim.unwrap_or(d_out);
        if env == 0 || d_out * env < di {
            return Err(Error::Argument(format!(
                "an isometry from dimension {di} into {d_out}*{env} does not exist"
            )));
        }
        let gauss = DMatrix::<C64>::from_fn(d_out * env, di, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let iso = gauss.qr().q();
        let kraus: Vec<ComplexMatrix> = (0..env)
            .map(|e| ComplexMatrix::from_fn(d_out, di, |o, i| iso[(o * env + e, i)]))
            .collect();
        Process::kraus(in_sys, out_sys, &kraus)
    }

    /// A random density matrix of the given rank.
    pub fn random_state<R: Rng + ?Sized>(
        sys: &SystemDims,
        rank: usize,
        rng: &mut R,
    ) -> Result<StateP> {
        Self::random_causal_channel_with(&SystemDims::trivial(), sys, Some(rank), rng)
    }
}

/// Unnormalised maximally entangled matrix `Σ_ij |ii⟩⟨jj|` on `d ⊗ d`.
pub(crate) fn cup_matrix(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d * d, d * d, |r, c| {
        if r % (d + 1) == 0 && c % (d + 1) == 0 {
            ONE
        } else {
            ZERO
        }
    })
}

/// Sequential composition `g ∘ f` (`f` first) by link contraction over the
/// shared wire.
pub fn compose_seq(f: &Process, g: &Process) -> Result<Process> {
    if f.out_sys != g.in_sys {
        return Err(Error::WireMismatch {
            left: format!("output {} of the first process", f.out_sys),
            right: format!("input {} of the second process", g.in_sys),
        });
    }
    let choi = link(
        &f.choi,
        f.in_sys.total(),
        f.out_sys.total(),
        &g.choi,
        g.out_sys.total(),
    )?;
    let cp = match (f.cp_hint, g.cp_hint) {
        (Some(true), Some(true)) => Some(true),
        _ => None,
    };
    Ok(Process::new(f.in_sys.clone(), g.out_sys.clone(), choi)?.known_cp(cp))
}

/// Parallel composition `f ⊗ g`.
pub fn compose_par(f: &Process, g: &Process) -> Process {
    let (fi, fo, gi) = (f.in_sys.len(), f.out_sys.len(), g.in_sys.len());
    let go = g.out_sys.len();
    let joint = f.joint_sys().concat(&g.joint_sys());
    let raw = kron(&f.choi, &g.choi).expect("desk-scale systems do not overflow");
    // (f_in, f_out, g_in, g_out) -> (f_in, g_in, f_out, g_out)
    let perm: Vec<usize> = (0..fi)
        .chain(fi + fo..fi + fo + gi)
        .chain(fi..fi + fo)
        .chain(fi + fo + gi..fi + fo + gi + go)
        .collect();
    let choi = permute_subsystems(&raw, &joint, &perm).expect("valid permutation");
    let cp = match (f.cp_hint, g.cp_hint) {
        (Some(true), Some(true)) => Some(true),
        _ => None,
    };
    Process {
        in_sys: f.in_sys.concat(&g.in_sys),
        out_sys: f.out_sys.concat(&g.out_sys),
        choi,
        cp_hint: cp,
    }
}

/// Parallel composition of several processes, left to right.
pub fn compose_par_all<'a>(ps: impl IntoIterator<Item = &'a Process>) -> Process {
    let unit = Process::identity(&SystemDims::trivial());
    ps.into_iter().fold(unit, |acc, p| compose_par(&acc, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::partial_trace;

    const EPS: f64 = 1e-9;

    fn q() -> SystemDims {
        SystemDims::of(&[2])
    }

    fn rand_rho(sys: &SystemDims, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Process::random_state(sys, sys.total(), &mut rng)
            .unwrap()
            .into_choi()
    }

    #[test]
    fn identity_choi_entries() {
        let id = Process::identity(&q());
        let c = id.choi();
        // (in,out) pairs (0,0) and (1,1) are flat indices 0 and 3
        for r in 0..4 {
            for col in 0..4 {
                let expect = if (r == 0 || r == 3) && (col == 0 || col == 3) {
                    ONE
                } else {
                    ZERO
                };
                assert_eq!(c[(r, col)], expect);
            }
        }
        assert_eq!(c.trace(), C64::new(2.0, 0.0));
    }

    #[test]
    fn unit_laws() {
        let phi = Process::random_causal_channel(&q(), &SystemDims::of(&[3]), None, 5).unwrap();
        let left = compose_seq(&Process::identity(&q()), &phi).unwrap();
        let right = compose_seq(&phi, &Process::identity(&SystemDims::of(&[3]))).unwrap();
        assert!(left.distance(&phi).unwrap() < EPS);
        assert!(right.distance(&phi).unwrap() < EPS);
    }

    #[test]
    fn cup_trace_and_symmetry() {
        let cup = Process::cup(&q());
        assert_eq!(cup.choi().trace(), C64::new(2.0, 0.0));
        let swapped = permute_subsystems(cup.choi(), &SystemDims::of(&[2, 2]), &[1, 0]).unwrap();
        assert_eq!(&swapped, cup.choi());
    }

    #[test]
    fn swap_acts_on_products() {
        let (a, b) = (SystemDims::of(&[2]), SystemDims::of(&[3]));
        let rho = rand_rho(&a, 1);
        let sigma = rand_rho(&b, 2);
        let out = Process::swap(&a, &b)
            .apply_to_state(&kron(&rho, &sigma).unwrap())
            .unwrap();
        assert!(frobenius_distance(&out, &kron(&sigma, &rho).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn swap_is_involution() {
        let s = Process::swap(&q(), &q());
        let ss = compose_seq(&s, &s).unwrap();
        assert!(
            ss.distance(&Process::identity(&SystemDims::of(&[2, 2])))
                .unwrap()
                < EPS
        );
    }

    #[test]
    fn discard_evaluates_trace() {
        let rho = rand_rho(&SystemDims::of(&[3]), 9).scale_real(0.7);
        let out = Process::discard(&SystemDims::of(&[3]))
            .apply_to_state(&rho)
            .unwrap();
        assert!((out[(0, 0)] - rho.trace()).norm() < 1e-12);
        assert_eq!(
            Process::discard(&SystemDims::trivial()).choi(),
            &ComplexMatrix::identity(1)
        );
    }

    #[test]
    fn depolarizing_channel_by_hand() {
        // Choi I_in ⊗ I_out/2 maps ρ to Tr(ρ) I/2.
        let dep = Process::new(q(), q(), ComplexMatrix::identity(4).scale_real(0.5)).unwrap();
        let rho = ComplexMatrix::from_real_rows(&[&[0.3, 0.1], &[0.1, 0.9]]);
        let out = dep.apply_to_state(&rho).unwrap();
        let expected = ComplexMatrix::identity(2).scale_real(0.6);
        assert!(frobenius_distance(&out, &expected).unwrap() < 1e-15);
    }

    #[test]
    fn unitary_composition_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = Process::random_causal_channel_with(&q(), &q(), Some(1), &mut rng).unwrap();
        let v = Process::random_causal_channel_with(&q(), &q(), Some(1), &mut rng).unwrap();
        // recover the unitaries from rank-one Chois: column of the Choi gives |U⟩⟩
        let vec_of = |p: &Process| -> ComplexMatrix {
            let c = p.choi();
            let (k, _) = (0..4).map(|i| (i, c[(i, i)].re)).fold((0, -1.0), |acc, x| {
                if x.1 > acc.1 {
                    x
                } else {
                    acc
                }
            });
            let norm = c[(k, k)].re.sqrt();
            ComplexMatrix::from_fn(2, 2, |o, i| c[(i * 2 + o, k)] / norm)
        };
        let (um, vm) = (vec_of(&u), vec_of(&v));
        let direct = Process::unitary(&q(), &(&vm * &um)).unwrap();
        let composed = compose_seq(&u, &v).unwrap();
        assert!(composed.distance(&direct).unwrap() < EPS);
    }

    #[test]
    fn bend_unbend_roundtrip_is_exact() {
        let phi =
            Process::random_causal_channel(&SystemDims::of(&[2, 3]), &q(), Some(3), 11).unwrap();
        let back = phi.bend().unbend(2).unwrap();
        assert_eq!(back, phi);
        assert_eq!(Process::identity(&q()).bend(), Process::cup(&q()));
        let bd = Process::discard(&SystemDims::of(&[3])).bend();
        assert_eq!(bd.choi(), &ComplexMatrix::identity(3));
        assert!(matches!(phi.unbend(1), Err(Error::Argument(_))));
        assert!(matches!(phi.bend().unbend(9), Err(Error::Argument(_))));
    }

    #[test]
    fn compose_seq_rejects_mismatch() {
        let f = Process::identity(&q());
        let g = Process::identity(&SystemDims::of(&[3]));
        assert!(matches!(
            compose_seq(&f, &g),
            Err(Error::WireMismatch { .. })
        ));
    }

    #[test]
    fn random_channels_are_cp_and_trace_preserving() {
        let tol = Tolerance::default();
        for seed in 0..100 {
            let phi =
                Process::random_causal_channel(&q(), &SystemDims::of(&[3]), None, seed).unwrap();
            let red = partial_trace(phi.choi(), &phi.joint_sys(), &[0]).unwrap();
            assert!(frobenius_distance(&red, &ComplexMatrix::identity(2)).unwrap() < EPS);
            assert!(is_psd(phi.choi(), tol).unwrap());
        }
    }

    #[test]
    fn random_channel_is_deterministic_per_seed() {
        let a = Process::random_causal_channel(&q(), &q(), None, 42).unwrap();
        let b = Process::random_causal_channel(&q(), &q(), None, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_channel_needs_room_for_isometry() {
        let r = Process::random_causal_channel(&SystemDims::of(&[4]), &q(), Some(1), 0);
        assert!(matches!(r, Err(Error::Argument(_))));
    }

    #[test]
    fn unitary_random_channel_is_rank_one() {
        let u = Process::random_causal_channel(&q(), &q(), Some(1), 8).unwrap();
        let eig = u.choi().hermitian_eigenvalues().unwrap();
        assert!(eig[..3].iter().all(|e| e.abs() < 1e-10));
        assert!((eig[3] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn from_linear_map_reproduces_channel() {
        let phi = Process::random_causal_channel(&q(), &SystemDims::of(&[3]), None, 4).unwrap();
        let rebuilt =
            Process::from_linear_map(phi.in_sys(), phi.out_sys(), |e| phi.apply_to_state(e))
                .unwrap();
        assert!(rebuilt.distance(&phi).unwrap() < 1e-12);
    }

    #[test]
    fn permute_outputs_matches_swap() {
        let phi = Process::random_causal_channel(&q(), &SystemDims::of(&[2, 3]), None, 6).unwrap();
        let swapped = phi.permute_outputs(&[1, 0]).unwrap();
        let via_swap = compose_seq(&phi, &Process::swap(&q(), &SystemDims::of(&[3]))).unwrap();
        assert!(swapped.distance(&via_swap).unwrap() < 1e-12);
    }
}

//! Causality-flavoured predicates on processes and supermaps.
//!
//! Every check reduces an exact equation to a Frobenius residual compared
//! against a [`Tolerance`]. Statements quantified over all causal processes
//! are affine in the inserted Choi matrix, so they are discharged exactly by
//! a base point plus a basis of the directions `{K : Tr_out K = 0}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::process::{compose_par_all, compose_seq, Process};
use crate::supermap::{insert_hole, BipartiteSupermap};
use crate::tensor::{
    depolarize_subsystems, frobenius_distance, kron, min_eigenvalue, trace_out, ComplexMatrix,
    SystemDims, Tolerance, C64, ONE, ZERO,
};

/// Outcome of a check: whether it holds and by how much it misses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalVerdict {
    pub holds: bool,
    pub residual: f64,
    pub witness: Option<String>,
}

impl CausalVerdict {
    /// Combines named residual components as a root sum of squares. The
    /// witness names the largest component when the check fails.
    pub fn from_parts(parts: &[(String, f64)], tol: Tolerance) -> Self {
        let residual = parts.iter().map(|(_, r)| r * r).sum::<f64>().sqrt();
        let holds = tol.accepts(residual);
        let witness = if holds {
            None
        } else {
            parts
                .iter()
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(name, r)| format!("{name} (residual {r:.3e})"))
        };
        CausalVerdict {
            holds,
            residual,
            witness,
        }
    }

    pub fn single(name: &str, residual: f64, tol: Tolerance) -> Self {
        Self::from_parts(&[(name.to_string(), residual)], tol)
    }
}

/// `d_B ∘ Ψ = d_A`, i.e. `Tr_out choi = I_in`. For states this reads
/// `Tr ρ = 1`; for effects it compares against discarding.
pub fn is_causal(f: &Process, tol: Tolerance) -> CausalVerdict {
    CausalVerdict::single(
        "discarding the output differs from discarding the input",
        causal_residual(f),
        tol,
    )
}

pub(crate) fn causal_residual(f: &Process) -> f64 {
    let n_in = f.in_sys().len();
    let outs: Vec<usize> = (n_in..n_in + f.out_sys().len()).collect();
    let reduced =
        trace_out(f.choi(), &f.joint_sys(), &outs).expect("Choi lives on the joint system");
    frobenius_distance(&reduced, &ComplexMatrix::identity(f.in_sys().total()))
        .expect("reduced Choi is square on the input")
}

/// Complete positivity; the residual is how far the smallest Choi
/// eigenvalue dips below zero, or the anti-Hermitian part if that is larger.
pub fn cp_verdict(f: &Process, tol: Tolerance) -> CausalVerdict {
    let anti = frobenius_distance(f.choi(), &f.choi().adjoint()).unwrap_or(f64::INFINITY) / 2.0;
    let neg = (-min_eigenvalue(f.choi()).unwrap_or(f64::NEG_INFINITY)).max(0.0);
    CausalVerdict::from_parts(
        &[
            ("Choi matrix is not Hermitian".to_string(), anti),
            ("Choi matrix has a negative eigenvalue".to_string(), neg),
        ],
        tol,
    )
}

/// How a bipartite process `A₁ ⊗ B₁ → A₂ ⊗ B₂` splits its wires: the first
/// `input` input factors are Alice's, as are the first `output` output factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    pub input: usize,
    pub output: usize,
}

struct BipartiteIndices {
    a_in: Vec<usize>,
    b_in: Vec<usize>,
    a_out: Vec<usize>,
    b_out: Vec<usize>,
}

impl Bipartition {
    pub fn new(input: usize, output: usize) -> Self {
        Bipartition { input, output }
    }

    fn indices(&self, f: &Process) -> Result<BipartiteIndices> {
        let (ni, no) = (f.in_sys().len(), f.out_sys().len());
        if self.input > ni || self.output > no {
            return Err(Error::Argument(format!(
                "split ({}, {}) does not fit a process {} -> {}",
                self.input,
                self.output,
                f.in_sys(),
                f.out_sys()
            )));
        }
        Ok(BipartiteIndices {
            a_in: (0..self.input).collect(),
            b_in: (self.input..ni).collect(),
            a_out: (ni..ni + self.output).collect(),
            b_out: (ni + self.output..ni + no).collect(),
        })
    }
}

/// Bob cannot signal to Alice (`A ⪯ B`): discarding Bob's output leaves a
/// process that ignores Bob's input,
/// `Tr_{B₂} choi = reduced_A ⊗ I_{B₁}` with `reduced_A = Tr_{B₁B₂} choi / d_{B₁}`.
pub fn is_nonsignalling_b_to_a(
    f: &Process,
    split: Bipartition,
    tol: Tolerance,
) -> Result<CausalVerdict> {
    let ix = split.indices(f)?;
    let r = disconnection_residual(f, &ix.b_out, &ix.b_in)?;
    Ok(CausalVerdict::single(
        "Alice's marginal depends on Bob's input",
        r,
        tol,
    ))
}

/// Alice cannot signal to Bob: the mirror image of [`is_nonsignalling_b_to_a`].
pub fn is_nonsignalling_a_to_b(
    f: &Process,
    split: Bipartition,
    tol: Tolerance,
) -> Result<CausalVerdict> {
    let ix = split.indices(f)?;
    let r = disconnection_residual(f, &ix.a_out, &ix.a_in)?;
    Ok(CausalVerdict::single(
        "Bob's marginal depends on Alice's input",
        r,
        tol,
    ))
}

/// After discarding `outs`, the Choi matrix must be maximally mixed on `ins`
/// (i.e. the input wires `ins` are disconnected).
fn disconnection_residual(f: &Process, outs: &[usize], ins: &[usize]) -> Result<f64> {
    let joint = f.joint_sys();
    let marginal = trace_out(f.choi(), &joint, outs)?;
    let kept: Vec<usize> = (0..joint.len()).filter(|i| !outs.contains(i)).collect();
    let marginal_sys = joint.select(&kept);
    let ins_in_marginal: Vec<usize> = ins
        .iter()
        .map(|i| {
            kept.iter()
                .position(|k| k == i)
                .expect("inputs are never traced")
        })
        .collect();
    let disconnected = depolarize_subsystems(&marginal, &marginal_sys, &ins_in_marginal)?;
    frobenius_distance(&marginal, &disconnected)
}

/// Bell-type wiring `(Ψ_A ⊗ Ψ_B) ∘ (1_{A₁} ⊗ ρ ⊗ 1_{B₁})` without
/// precondition checks. `ρ` has exactly two output factors `R_A, R_B`;
/// `Ψ_A : A₁ ⊗ R_A → A₂` and `Ψ_B : R_B ⊗ B₁ → B₂`.
pub(crate) fn bell_wiring(
    psi_a: &Process,
    psi_b: &Process,
    rho: &Process,
) -> Result<(Process, Bipartition)> {
    if !rho.is_state() || rho.out_sys().len() != 2 {
        return Err(Error::Argument(format!(
            "the shared state must be bipartite with two output factors, got {} -> {}",
            rho.in_sys(),
            rho.out_sys()
        )));
    }
    let (ra, rb) = (rho.out_sys().dims()[0], rho.out_sys().dims()[1]);
    let a_in = psi_a.in_sys().dims();
    let b_in = psi_b.in_sys().dims();
    if a_in.last() != Some(&ra) {
        return Err(Error::WireMismatch {
            left: format!("Alice's share [{ra}]"),
            right: format!("last input of Ψ_A {}", psi_a.in_sys()),
        });
    }
    if b_in.first() != Some(&rb) {
        return Err(Error::WireMismatch {
            left: format!("Bob's share [{rb}]"),
            right: format!("first input of Ψ_B {}", psi_b.in_sys()),
        });
    }
    let a1 = psi_a.in_sys().slice(0..a_in.len() - 1);
    let b1 = psi_b.in_sys().slice(1..b_in.len());
    let prep = compose_par_all([&Process::identity(&a1), rho, &Process::identity(&b1)]);
    let locals = psi_a.beside(psi_b);
    let f = compose_seq(&prep, &locals)?;
    Ok((f, Bipartition::new(a1.len(), psi_a.out_sys().len())))
}

/// Alice and Bob apply causal local operations to the shares of a causal
/// bipartite state. See [`bell_wiring`] for the wire layout.
pub fn make_strongly_nonsignalling(
    psi_a: &Process,
    psi_b: &Process,
    rho: &Process,
    tol: Tolerance,
) -> Result<(Process, Bipartition)> {
    for (name, p) in [("Ψ_A", psi_a), ("Ψ_B", psi_b), ("ρ", rho)] {
        let v = is_causal(p, tol);
        if !v.holds {
            return Err(Error::Argument(format!(
                "{name} must be causal (residual {:.3e})",
                v.residual
            )));
        }
    }
    bell_wiring(psi_a, psi_b, rho)
}

/// Orthonormal Hermitian basis of `d x d` matrices: `E_kk`, then the
/// symmetric and antisymmetric off-diagonal combinations.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis: Vec<ComplexMatrix> = (0..d).map(|k| ComplexMatrix::unit(d, k, k)).collect();
    basis.extend(off_diagonal_basis(d));
    basis
}

/// Orthonormal basis of traceless Hermitian `d x d` matrices (generalised
/// Gell-Mann matrices, `d² - 1` of them).
pub fn traceless_hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut basis: Vec<ComplexMatrix> = (1..d)
        .map(|l| {
            let norm = ((l * (l + 1)) as f64).sqrt();
            let mut diag = vec![0.0; d];
            diag[..l].iter_mut().for_each(|x| *x = 1.0 / norm);
            diag[l] = -(l as f64) / norm;
            ComplexMatrix::diag(&diag)
        })
        .collect();
    basis.extend(off_diagonal_basis(d));
    basis
}

fn off_diagonal_basis(d: usize) -> Vec<ComplexMatrix> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for k in 0..d {
        for l in k + 1..d {
            let mut sym = ComplexMatrix::zeros(d, d);
            sym[(k, l)] = C64::new(s, 0.0);
            sym[(l, k)] = C64::new(s, 0.0);
            let mut anti = ComplexMatrix::zeros(d, d);
            anti[(k, l)] = C64::new(0.0, s);
            anti[(l, k)] = C64::new(0.0, -s);
            out.push(sym);
            out.push(anti);
        }
    }
    out
}

/// The affine hull of causal Choi matrices for processes `in → out`.
#[derive(Debug, Clone)]
pub struct CausalAffineBasis {
    pub in_sys: SystemDims,
    pub out_sys: SystemDims,
    /// Choi matrix of the completely depolarising channel, `I / d_out`.
    pub base_point: ComplexMatrix,
    /// Orthonormal Hermitian basis of `{K : Tr_out K = 0}`.
    pub directions: Vec<ComplexMatrix>,
}

pub fn causal_affine_basis(in_sys: &SystemDims, out_sys: &SystemDims) -> CausalAffineBasis {
    let (di, d_out) = (in_sys.total(), out_sys.total());
    let base_point = ComplexMatrix::identity(di * d_out).scale_real(1.0 / d_out as f64);
    let mut directions = Vec::with_capacity(di * di * (d_out * d_out - 1));
    for h in hermitian_basis(di) {
        for t in traceless_hermitian_basis(d_out) {
            directions.push(kron(&h, &t).expect("desk-scale dimensions"));
        }
    }
    CausalAffineBasis {
        in_sys: in_sys.clone(),
        out_sys: out_sys.clone(),
        base_point,
        directions,
    }
}

impl CausalAffineBasis {
    /// `(d_in d_out)² - d_in²`.
    pub fn dimension(&self) -> usize {
        self.directions.len()
    }

    pub fn base_process(&self) -> Process {
        Process::new(
            self.in_sys.clone(),
            self.out_sys.clone(),
            self.base_point.clone(),
        )
        .expect("base point matches the system")
    }

    pub fn direction_process(&self, k: usize) -> Process {
        Process::new(
            self.in_sys.clone(),
            self.out_sys.clone(),
            self.directions[k].clone(),
        )
        .expect("direction matches the system")
    }

    /// Real coordinates of `choi - base_point` along the directions.
    pub fn coordinates(&self, choi: &ComplexMatrix) -> Result<Vec<f64>> {
        let offset = choi.add_scaled(&self.base_point, -ONE)?;
        self.directions
            .iter()
            .map(|d| d.inner(&offset).map(|z| z.re))
            .collect()
    }

    /// Orthogonal projection onto the affine subspace.
    pub fn project(&self, choi: &ComplexMatrix) -> Result<ComplexMatrix> {
        let coords = self.coordinates(choi)?;
        let mut out = self.base_point.clone();
        for (c, d) in coords.iter().zip(&self.directions) {
            out = out.add_scaled(d, C64::new(*c, 0.0))?;
        }
        Ok(out)
    }
}

/// How a one-hole supermap `W : A₁ ⊗ A₂ → B₁ ⊗ B₂` splits its wires: the
/// hole is `A₁ → A₂` with `A₁` the first `input` input factors, and the
/// result is `B₁ → B₂` with `B₁` the first `output` output factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleSplit {
    pub input: usize,
    pub output: usize,
}

impl HoleSplit {
    pub fn new(input: usize, output: usize) -> Self {
        HoleSplit { input, output }
    }

    pub(crate) fn check(&self, w: &Process) -> Result<()> {
        if self.input > w.in_sys().len() || self.output > w.out_sys().len() {
            return Err(Error::Argument(format!(
                "hole split ({}, {}) does not fit a supermap {} -> {}",
                self.input,
                self.output,
                w.in_sys(),
                w.out_sys()
            )));
        }
        Ok(())
    }

    pub fn hole_in(&self, w: &Process) -> SystemDims {
        w.in_sys().slice(0..self.input)
    }

    pub fn hole_out(&self, w: &Process) -> SystemDims {
        w.in_sys().slice(self.input..w.in_sys().len())
    }

    pub fn result_in(&self, w: &Process) -> SystemDims {
        w.out_sys().slice(0..self.output)
    }

    pub fn result_out(&self, w: &Process) -> SystemDims {
        w.out_sys().slice(self.output..w.out_sys().len())
    }
}

/// Second-order causality in closed form: with `M = Tr_{B₂} choi(W)`,
/// `M = I_{A₂} ⊗ N` for some `N` on `A₁ ⊗ B₁` with `Tr_{A₁} N = I_{B₁}`.
pub fn is_soc(w: &Process, split: HoleSplit, tol: Tolerance) -> Result<CausalVerdict> {
    split.check(w)?;
    let (ni, no) = (w.in_sys().len(), w.out_sys().len());
    let joint = w.joint_sys();
    let b2: Vec<usize> = (ni + split.output..ni + no).collect();
    let m = trace_out(w.choi(), &joint, &b2)?;
    let m_sys = joint.slice(0..ni + split.output);
    let a2: Vec<usize> = (split.input..ni).collect();
    let a_all: Vec<usize> = (0..ni).collect();
    let d_a2 = split.hole_out(w).total() as f64;

    let dep = depolarize_subsystems(&m, &m_sys, &a2)?;
    let r_form = frobenius_distance(&m, &dep)?;
    let n_traced = trace_out(&m, &m_sys, &a_all)?.scale_real(1.0 / d_a2);
    let r_norm = frobenius_distance(
        &n_traced,
        &ComplexMatrix::identity(split.result_in(w).total()),
    )?;
    Ok(CausalVerdict::from_parts(
        &[
            ("Tr_B2 W is not of the form I_A2 ⊗ N".to_string(), r_form),
            ("Tr_A1 N differs from I_B1".to_string(), r_norm),
        ],
        tol,
    ))
}

/// Second-order causality by enumeration: insert the causal base point and
/// every traceless direction into the hole. The base point must come out
/// causal, and every direction must vanish once the output is discarded.
pub fn is_soc_oracle(w: &Process, split: HoleSplit, tol: Tolerance) -> Result<CausalVerdict> {
    split.check(w)?;
    let basis = causal_affine_basis(&split.hole_in(w), &split.hole_out(w));
    let base_out = insert_hole(w, split, &basis.base_process())?;
    let mut parts = vec![(
        "base point is not sent to a causal process".to_string(),
        causal_residual(&base_out),
    )];
    let mut direction_sq = 0.0;
    for k in 0..basis.dimension() {
        let out = insert_hole(w, split, &basis.direction_process(k))?;
        direction_sq += discarded_norm(&out).powi(2);
    }
    parts.push((
        "a traceless direction survives discarding".to_string(),
        direction_sq.sqrt(),
    ));
    Ok(CausalVerdict::from_parts(&parts, tol))
}

/// `‖Tr_out choi‖`: how much a difference of processes survives discarding.
pub(crate) fn discarded_norm(p: &Process) -> f64 {
    let n_in = p.in_sys().len();
    let outs: Vec<usize> = (n_in..n_in + p.out_sys().len()).collect();
    trace_out(p.choi(), &p.joint_sys(), &outs)
        .expect("Choi lives on the joint system")
        .frobenius_norm()
}

/// Bipartite second-order causality in closed form. With
/// `M = Tr_{C₂} choi(W)` on `A₁A₂B₁B₂C₁` and `P_X` replacing factor `X` by
/// its maximally mixed reduction:
///
/// - `(1 - P_{A₂})(1 - P_{B₂}) M = 0`,
/// - `(1 - P_{A₂}) Tr_{B₁B₂} M = 0` and `(1 - P_{B₂}) Tr_{A₁A₂} M = 0`,
/// - `Tr_{A₁A₂B₁B₂} M / (d_{A₂} d_{B₂}) = I_{C₁}`.
pub fn is_soc2(w: &BipartiteSupermap, tol: Tolerance) -> Result<CausalVerdict> {
    let body = w.canonical_body()?;
    let joint = body.joint_sys();
    let m = trace_out(body.choi(), &joint, &[5])?;
    let m_sys = joint.slice(0..5);
    let d = m_sys.dims();
    let (d_a2, d_b2) = (d[1] as f64, d[3] as f64);

    let pa = depolarize_subsystems(&m, &m_sys, &[1])?;
    let pb = depolarize_subsystems(&m, &m_sys, &[3])?;
    let pab = depolarize_subsystems(&pa, &m_sys, &[3])?;
    let joint_term = m
        .add_scaled(&pa, -ONE)?
        .add_scaled(&pb, -ONE)?
        .add_scaled(&pab, ONE)?
        .frobenius_norm();

    let a_sys = m_sys.select(&[0, 1, 4]);
    let ma = trace_out(&m, &m_sys, &[2, 3])?.scale_real(1.0 / d_b2);
    let a_term = frobenius_distance(&ma, &depolarize_subsystems(&ma, &a_sys, &[1])?)?;

    let b_sys = m_sys.select(&[2, 3, 4]);
    let mb = trace_out(&m, &m_sys, &[0, 1])?.scale_real(1.0 / d_a2);
    let b_term = frobenius_distance(&mb, &depolarize_subsystems(&mb, &b_sys, &[1])?)?;

    let mc = trace_out(&m, &m_sys, &[0, 1, 2, 3])?.scale_real(1.0 / (d_a2 * d_b2));
    let norm_term = frobenius_distance(&mc, &ComplexMatrix::identity(d[4]))?;

    Ok(CausalVerdict::from_parts(
        &[
            (
                "joint A/B directions survive discarding C2".to_string(),
                joint_term,
            ),
            (
                "A-slot directions survive discarding C2".to_string(),
                a_term,
            ),
            (
                "B-slot directions survive discarding C2".to_string(),
                b_term,
            ),
            (
                "depolarising insertions are not sent to a causal process".to_string(),
                norm_term,
            ),
        ],
        tol,
    ))
}

/// Bipartite second-order causality by enumerating both slots' affine bases.
pub fn is_soc2_oracle(w: &BipartiteSupermap, tol: Tolerance) -> Result<CausalVerdict> {
    let basis_a = causal_affine_basis(&w.a_in(), &w.a_out());
    let basis_b = causal_affine_basis(&w.b_in(), &w.b_out());
    let base_a = basis_a.base_process();
    let base_b = basis_b.base_process();
    let dirs_a: Vec<Process> = (0..basis_a.dimension())
        .map(|k| basis_a.direction_process(k))
        .collect();
    let dirs_b: Vec<Process> = (0..basis_b.dimension())
        .map(|k| basis_b.direction_process(k))
        .collect();

    let base = w.insert(&base_a, &base_b)?;
    let mut a_sq = 0.0;
    for da in &dirs_a {
        a_sq += discarded_norm(&w.insert(da, &base_b)?.process).powi(2);
    }
    let mut b_sq = 0.0;
    for db in &dirs_b {
        b_sq += discarded_norm(&w.insert(&base_a, db)?.process).powi(2);
    }
    let mut ab_sq = 0.0;
    for da in &dirs_a {
        for db in &dirs_b {
            ab_sq += discarded_norm(&w.insert(da, db)?.process).powi(2);
        }
    }
    Ok(CausalVerdict::from_parts(
        &[
            (
                "joint A/B directions survive discarding C2".to_string(),
                ab_sq.sqrt(),
            ),
            (
                "A-slot directions survive discarding C2".to_string(),
                a_sq.sqrt(),
            ),
            (
                "B-slot directions survive discarding C2".to_string(),
                b_sq.sqrt(),
            ),
            (
                "base points are not sent to a causal process".to_string(),
                base.causal.residual,
            ),
        ],
        tol,
    ))
}

/// `d²` density matrices spanning all operators on a `d`-dimensional system:
/// `|i⟩⟨i|`, and for `i < j` the projectors onto `(|i⟩+|j⟩)/√2` and
/// `(|i⟩+i|j⟩)/√2`.
pub fn causal_state_family(sys: &SystemDims) -> Vec<ComplexMatrix> {
    let d = sys.total();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut family: Vec<ComplexMatrix> = (0..d).map(|i| ComplexMatrix::unit(d, i, i)).collect();
    for i in 0..d {
        for j in i + 1..d {
            for phase in [ONE, C64::new(0.0, 1.0)] {
                let mut ket = vec![ZERO; d];
                ket[i] = C64::new(s, 0.0);
                ket[j] = phase * s;
                family.push(ComplexMatrix::outer(&ket));
            }
        }
    }
    family
}

/// Rebuilds a process from its action on causal states only.
///
/// Queries `black_box` on [`causal_state_family`], expresses every matrix
/// unit `|i⟩⟨j|` as a linear combination of the family, and assembles the
/// Choi matrix by linearity.
pub fn reconstruct_from_causal_states(
    mut black_box: impl FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
    in_sys: &SystemDims,
    out_sys: &SystemDims,
) -> Result<Process> {
    let (di, d_out) = (in_sys.total(), out_sys.total());
    let family = causal_state_family(in_sys);
    let n = family.len();
    let frame = DMatrix::<C64>::from_fn(n, n, |row, k| family[k].as_slice()[row]);
    let inverse = frame
        .lu()
        .try_inverse()
        .ok_or_else(|| Error::Numeric("causal state family is not a basis".into()))?;
    let images: Vec<ComplexMatrix> = family.iter().map(&mut black_box).collect::<Result<_>>()?;
    if let Some(bad) = images.iter().find(|m| m.rows() != d_out || !m.is_square()) {
        return Err(Error::Dimension(format!(
            "black box returned a {}x{} matrix, expected {d_out}x{d_out}",
            bad.rows(),
            bad.cols()
        )));
    }
    Process::from_linear_map(in_sys, out_sys, |unit| {
        // the unit's single nonzero sits at flat index i*di + j
        let flat = unit
            .as_slice()
            .iter()
            .position(|z| *z != ZERO)
            .expect("matrix unit has one nonzero entry");
        debug_assert!(flat < di * di);
        let mut acc = ComplexMatrix::zeros(d_out, d_out);
        for (k, image) in images.iter().enumerate() {
            let c = inverse[(k, flat)];
            if c != ZERO {
                acc = acc.add_scaled(image, c)?;
            }
        }
        Ok(acc)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::partial_trace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> SystemDims {
        SystemDims::of(&[2])
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_and_random_channels_are_causal() {
        assert!(is_causal(&Process::identity(&q()), tol()).holds);
        for seed in 0..10 {
            let f =
                Process::random_causal_channel(&q(), &SystemDims::of(&[3]), None, seed).unwrap();
            assert!(is_causal(&f, tol()).holds);
        }
    }

    #[test]
    fn cup_state_is_not_causal() {
        let v = is_causal(&Process::cup(&q()), tol());
        assert!(!v.holds);
        assert!((v.residual - 1.0).abs() < 1e-12);
        assert!(v.witness.is_some());
    }

    #[test]
    fn discard_is_the_only_causal_effect_shape() {
        assert!(is_causal(&Process::discard(&SystemDims::of(&[3])), tol()).holds);
        let half = Process::effect(&q(), ComplexMatrix::identity(2).scale_real(0.5)).unwrap();
        assert!(!is_causal(&half, tol()).holds);
    }

    #[test]
    fn causality_of_composites_matches_parts() {
        let f = Process::random_causal_channel(&q(), &SystemDims::of(&[3]), None, 1).unwrap();
        let fd = compose_seq(&f, &Process::discard(f.out_sys())).unwrap();
        assert!((causal_residual(&fd) - causal_residual(&f)).abs() < 1e-12);
    }

    #[test]
    fn product_channels_signal_nowhere() {
        let fa = Process::random_causal_channel(&q(), &q(), None, 2).unwrap();
        let fb = Process::random_causal_channel(&q(), &SystemDims::of(&[3]), None, 3).unwrap();
        let f = fa.beside(&fb);
        let split = Bipartition::new(1, 1);
        assert!(is_nonsignalling_a_to_b(&f, split, tol()).unwrap().holds);
        assert!(is_nonsignalling_b_to_a(&f, split, tol()).unwrap().holds);
    }

    /// Alice's input is measured, copied into a memory wire and handed to Bob.
    fn copying_channel() -> Process {
        let m = q();
        let copy_a = Process::from_linear_map(&q(), &SystemDims::of(&[2, 2]), |rho| {
            let mut out = ComplexMatrix::zeros(4, 4);
            for i in 0..2 {
                out[(i * 3, i * 3)] = rho[(i, i)];
            }
            Ok(out)
        })
        .unwrap();
        // Bob: memory ⊗ B1 → B2, discard B1 and forward the memory
        let forward_b = Process::discard(&q())
            .beside(&Process::identity(&m))
            .permute_inputs(&[1, 0])
            .unwrap();
        let stage1 = copy_a.beside(&Process::identity(&q()));
        let stage2 = Process::identity(&q()).beside(&forward_b);
        compose_seq(&stage1, &stage2).unwrap()
    }

    #[test]
    fn copying_channel_signals_from_a_to_b_only() {
        let f = copying_channel();
        assert!(is_causal(&f, tol()).holds);
        let split = Bipartition::new(1, 1);
        let ab = is_nonsignalling_a_to_b(&f, split, tol()).unwrap();
        assert!(!ab.holds);
        assert!(ab.residual > 0.1);
        assert!(is_nonsignalling_b_to_a(&f, split, tol()).unwrap().holds);
    }

    #[test]
    fn nonsignalling_rejects_bad_split() {
        let f = Process::identity(&q());
        assert!(matches!(
            is_nonsignalling_a_to_b(&f, Bipartition::new(3, 0), tol()),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn strongly_nonsignalling_with_identities_and_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ra = Process::random_state(&q(), 2, &mut rng).unwrap();
        let rb = Process::random_state(&q(), 2, &mut rng).unwrap();
        let rho = ra.beside(&rb);
        // Ψ_A = discard the share, keep A1; Ψ_B likewise
        let psi_a = Process::identity(&q()).beside(&Process::discard(&q()));
        let psi_b = Process::discard(&q()).beside(&Process::identity(&q()));
        let (f, split) = make_strongly_nonsignalling(&psi_a, &psi_b, &rho, tol()).unwrap();
        assert_eq!(split, Bipartition::new(1, 1));
        let id2 = Process::identity(&SystemDims::of(&[2, 2]));
        assert!(f.distance(&id2).unwrap() < 1e-12);
    }

    #[test]
    fn strongly_nonsignalling_entangled_share() {
        let cup = Process::cup(&q());
        let bell = Process::state(cup.out_sys(), cup.choi().scale_real(0.5)).unwrap();
        for seed in 0..5 {
            let psi_a =
                Process::random_causal_channel(&SystemDims::of(&[2, 2]), &q(), None, seed).unwrap();
            let psi_b =
                Process::random_causal_channel(&SystemDims::of(&[2, 2]), &q(), None, seed + 50)
                    .unwrap();
            let (f, split) = make_strongly_nonsignalling(&psi_a, &psi_b, &bell, tol()).unwrap();
            assert!(is_causal(&f, tol()).holds);
            assert!(is_nonsignalling_a_to_b(&f, split, tol()).unwrap().holds);
            assert!(is_nonsignalling_b_to_a(&f, split, tol()).unwrap().holds);
        }
    }

    #[test]
    fn strongly_nonsignalling_requires_causal_parts() {
        let psi = Process::identity(&q()).beside(&Process::discard(&q()));
        let not_state = Process::cup(&q());
        let err = make_strongly_nonsignalling(&psi, &psi, &not_state, tol());
        assert!(matches!(err, Err(Error::Argument(_))));
    }

    #[test]
    fn affine_basis_dimension_and_base_point() {
        let b = causal_affine_basis(&q(), &q());
        assert_eq!(b.dimension(), 12);
        assert!(is_causal(&b.base_process(), tol()).holds);
        let b23 = causal_affine_basis(&q(), &SystemDims::of(&[3]));
        assert_eq!(b23.dimension(), 36 - 4);
        for d in &b23.directions {
            let red = partial_trace(d, &SystemDims::of(&[2, 3]), &[0]).unwrap();
            assert!(red.frobenius_norm() < 1e-12);
        }
    }

    #[test]
    fn affine_basis_is_orthonormal() {
        let b = causal_affine_basis(&q(), &SystemDims::of(&[3]));
        for (i, x) in b.directions.iter().enumerate() {
            for (j, y) in b.directions.iter().enumerate() {
                let ip = x.inner(y).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn random_causal_chois_lie_in_affine_hull() {
        let b = causal_affine_basis(&q(), &q());
        for seed in 0..20 {
            let f = Process::random_causal_channel(&q(), &q(), None, seed).unwrap();
            let p = b.project(f.choi()).unwrap();
            assert!(frobenius_distance(&p, f.choi()).unwrap() < 1e-9);
        }
        // a non-causal matrix moves
        let cup = Process::identity(&q()).choi().scale_real(2.0);
        assert!(frobenius_distance(&b.project(&cup).unwrap(), &cup).unwrap() > 0.5);
    }

    #[test]
    fn state_family_is_causal_and_complete() {
        let fam = causal_state_family(&SystemDims::of(&[3]));
        assert_eq!(fam.len(), 9);
        for rho in &fam {
            assert!((rho.trace() - ONE).norm() < 1e-12);
            assert!(crate::tensor::is_psd(rho, tol()).unwrap());
        }
    }

    #[test]
    fn reconstruct_identity() {
        let id = Process::identity(&q());
        let rebuilt = reconstruct_from_causal_states(|rho| Ok(rho.clone()), &q(), &q()).unwrap();
        assert!(rebuilt.distance(&id).unwrap() < 1e-12);
    }

    #[test]
    fn reconstruct_rejects_wrong_output_shape() {
        let r = reconstruct_from_causal_states(|_| Ok(ComplexMatrix::identity(3)), &q(), &q());
        assert!(matches!(r, Err(Error::Dimension(_))));
    }

    #[test]
    fn soc_identity_supermap_and_loops() {
        // W wires B1 -> A1 and A2 -> B2: cups on (A1,B1) and (A2,B2).
        let w = identity_supermap();
        let split = HoleSplit::new(1, 1);
        assert!(is_soc(&w, split, tol()).unwrap().holds);
        assert!(is_soc_oracle(&w, split, tol()).unwrap().holds);

        let lp = cup_loop_supermap();
        let v = is_soc(&lp, split, tol()).unwrap();
        assert!(!v.holds);
        assert!(!is_soc_oracle(&lp, split, tol()).unwrap().holds);
    }

    #[test]
    fn soc_discard_and_reprepare() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let prep = Process::random_state(&q(), 2, &mut rng).unwrap();
        let sigma = Process::random_causal_channel(&q(), &q(), None, 10).unwrap();
        let w = Process::new(
            SystemDims::of(&[2, 2]),
            SystemDims::of(&[2, 2]),
            kron(
                &kron(prep.choi(), &ComplexMatrix::identity(2)).unwrap(),
                sigma.choi(),
            )
            .unwrap(),
        )
        .unwrap();
        let split = HoleSplit::new(1, 1);
        assert!(is_soc(&w, split, tol()).unwrap().holds);
        assert!(is_soc_oracle(&w, split, tol()).unwrap().holds);
    }

    pub(crate) fn identity_supermap() -> Process {
        // state on (A1, B1, A2, B2) = cup(A1,B1) ⊗ cup(A2,B2), reorder to (A1, A2, B1, B2)
        let s = Process::cup(&q()).beside(&Process::cup(&q()));
        s.permute_outputs(&[0, 2, 1, 3]).unwrap().unbend(2).unwrap()
    }

    pub(crate) fn cup_loop_supermap() -> Process {
        // W(Φ) = Tr(choi Φ) σ with σ the identity channel on B
        let sigma = Process::identity(&q());
        let choi = kron(&ComplexMatrix::identity(4), sigma.choi()).unwrap();
        Process::new(SystemDims::of(&[2, 2]), SystemDims::of(&[2, 2]), choi).unwrap()
    }
}

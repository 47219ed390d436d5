//! First-quantized encoding: singlet CSFs of one sector mapped onto the
//! computational basis of `ceil(log2 K)` qubits, with trimming or padding
//! when `K` is not a power of two.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{build_hardware_efficient, circuit_cost, CostReport, Family};
use crate::error::{Error, Result};
use crate::fci::{build_matrices, enumerate_determinants, Determinant, SectorSpec};
use crate::fermion::IntegralSet;
use crate::io::FirstQuantConfig;
use crate::linalg::{eigh, SparseOperator};
use crate::optimize::{minimize, OptimizeResult, OptimizerOptions};
use crate::pauli::QubitOperator;
use crate::statevector::{apply_circuit, energy_and_gradient, Circuit, StateVector};
use crate::vqe::{initial_parameters, ScanConfig};

/// Default energy of unphysical padding states, in E_h.
pub const DEFAULT_LAMBDA: f64 = 1e4;
/// Physical norms below this make the projected energy undefined.
pub const MIN_PHYSICAL_NORM: f64 = 1e-12;
const SINGLET_TOL: f64 = 1e-8;

/// Qubits needed for `k` basis states.
pub fn qubits_for(k: usize) -> usize {
    k.max(1).next_power_of_two().trailing_zeros() as usize
}

/// Orthonormal singlet CSFs as columns over a determinant list.
#[derive(Clone, Debug)]
pub struct CsfBasis {
    /// `n_c × K`
    pub coefficients: DMatrix<f64>,
    /// `<φ|S^2|φ>` per column.
    pub spin_eigenvalues: Vec<f64>,
    /// `<φ|H|φ>` per column, ascending.
    pub energies: Vec<f64>,
}

impl CsfBasis {
    pub fn k(&self) -> usize {
        self.coefficients.ncols()
    }

    pub fn n_determinants(&self) -> usize {
        self.coefficients.nrows()
    }

    /// `K n_c` header, then the coefficients column-major, one per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.k(), self.n_determinants());
        for v in self.coefficients.iter() {
            writeln!(s, "{v:.17e}").unwrap();
        }
        s
    }
}

/// Singlet eigenvectors of `s2`, canonicalized and ordered by `<H>`.
///
/// The singlet eigenspace is basis-free, so the columns are rebuilt from its
/// projector by QR with column pivoting and given a positive largest entry.
pub fn build_csf_basis(h: &DMatrix<f64>, s2: &DMatrix<f64>) -> Result<CsfBasis> {
    let n = s2.nrows();
    if n == 0 || h.shape() != s2.shape() || !s2.is_square() {
        return Err(Error::Dimension("CSF construction needs matching square matrices".into()));
    }
    let (vals, vecs) = eigh(s2);
    let singlet: Vec<usize> = (0..n).filter(|&i| vals[i].abs() < SINGLET_TOL).collect();
    let k = singlet.len();
    if k == 0 {
        return Err(Error::Validation("sector contains no singlet".into()));
    }
    let v = DMatrix::from_fn(n, k, |r, c| vecs[(r, singlet[c])]);
    let projector = &v * v.transpose();
    let q = projector.col_piv_qr().q();
    let mut cols: Vec<DVector<f64>> = (0..k)
        .map(|c| {
            let mut col = q.column(c).into_owned();
            let lead = col.iamax();
            if col[lead] < 0.0 {
                col.neg_mut();
            }
            col
        })
        .collect();
    let energy = |c: &DVector<f64>| c.dot(&(h * c));
    cols.sort_by(|a, b| {
        let (ea, eb) = (energy(a), energy(b));
        if (ea - eb).abs() > 1e-12 {
            ea.total_cmp(&eb)
        } else {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        }
    });
    let coefficients = DMatrix::from_columns(&cols);
    let spin_eigenvalues: Vec<f64> = cols.iter().map(|c| c.dot(&(s2 * c))).collect();
    if let Some(s) = spin_eigenvalues.iter().find(|s| s.abs() > SINGLET_TOL) {
        return Err(Error::Numerical(format!("CSF has <S^2> = {s:e} after canonicalization")));
    }
    Ok(CsfBasis {
        energies: cols.iter().map(energy).collect(),
        coefficients,
        spin_eigenvalues,
    })
}

/// `φ_μ† H φ_ν`, symmetrized.
pub fn project_hamiltonian(h: &DMatrix<f64>, basis: &CsfBasis) -> DMatrix<f64> {
    let c = &basis.coefficients;
    let m = c.transpose() * h * c;
    (&m + m.transpose()) * 0.5
}

/// Determinant-space matrices, CSF basis and projected Hamiltonian of one sector.
#[derive(Clone, Debug)]
pub struct FirstQuantProblem {
    pub determinants: Vec<Determinant>,
    pub h_det: DMatrix<f64>,
    pub s2_det: DMatrix<f64>,
    pub basis: CsfBasis,
    /// `H̃`, `K × K`.
    pub h_tilde: DMatrix<f64>,
    /// Lowest eigenvalue of `H̃`: the singlet FCI energy.
    pub ground_energy: f64,
}

impl FirstQuantProblem {
    pub fn build(ints: &IntegralSet) -> Result<Self> {
        let determinants = enumerate_determinants(ints, &SectorSpec::of(ints))?;
        let (h_det, s2_det) = build_matrices(&determinants, ints)?;
        let basis = build_csf_basis(&h_det, &s2_det)?;
        let h_tilde = project_hamiltonian(&h_det, &basis);
        let ground_energy = eigh(&h_tilde).0[0];
        Ok(Self {
            determinants,
            h_det,
            s2_det,
            basis,
            h_tilde,
            ground_energy,
        })
    }

    pub fn k(&self) -> usize {
        self.basis.k()
    }

    pub fn n_qubits(&self) -> usize {
        qubits_for(self.k())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Trim,
    Pad,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Projection {
    /// Optimize the projected Rayleigh quotient.
    Vap,
    /// Optimize `<J>`, project only the reported energy.
    Pav,
}

impl std::str::FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trim" => Ok(Scheme::Trim),
            "pad" => Ok(Scheme::Pad),
            o => Err(Error::Validation(format!("unknown scheme {o:?}"))),
        }
    }
}

impl std::str::FromStr for Projection {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vap" => Ok(Projection::Vap),
            "pav" => Ok(Projection::Pav),
            o => Err(Error::Validation(format!("unknown projection {o:?}"))),
        }
    }
}

/// A trimmed Hamiltonian on `n_q - 1` qubits.
#[derive(Clone, Debug)]
pub struct Trimmed {
    pub matrix: DMatrix<f64>,
    /// Retained CSF indices, ascending.
    pub kept: Vec<usize>,
    /// Ground energy of the trimmed matrix minus that of `H̃`; never negative.
    pub energy_error: f64,
}

impl Trimmed {
    pub fn n_qubits(&self) -> usize {
        qubits_for(self.kept.len())
    }
}

/// Keeps the `2^{n_q-1}` CSFs with the largest ground-state weight.
///
/// A power-of-two `K` is returned unchanged.
pub fn trim(h_tilde: &DMatrix<f64>) -> Result<Trimmed> {
    let k = h_tilde.nrows();
    if k == 0 || !h_tilde.is_square() {
        return Err(Error::Dimension("trim needs a non-empty square matrix".into()));
    }
    let (vals, vecs) = eigh(h_tilde);
    if k.is_power_of_two() {
        return Ok(Trimmed {
            matrix: h_tilde.clone(),
            kept: (0..k).collect(),
            energy_error: 0.0,
        });
    }
    let keep = k.next_power_of_two() / 2;
    let mut order: Vec<usize> = (0..k).collect();
    // stable sort: equal weights keep the lower index
    order.sort_by(|&a, &b| vecs[(b, 0)].abs().total_cmp(&vecs[(a, 0)].abs()));
    let mut kept = order[..keep].to_vec();
    kept.sort_unstable();
    let matrix = DMatrix::from_fn(keep, keep, |r, c| h_tilde[(kept[r], kept[c])]);
    let e_trim = eigh(&matrix).0[0];
    Ok(Trimmed {
        matrix,
        kept,
        energy_error: (e_trim - vals[0]).max(0.0),
    })
}

/// `J = H̃ ⊕ λ 1` and `Π = 1 ⊕ 0` on `ceil(log2 K)` qubits.
#[derive(Clone, Debug)]
pub struct PaddedProblem {
    pub j: QubitOperator,
    pub pi: QubitOperator,
    pub lambda: f64,
    pub k: usize,
    pub n_q: usize,
    pub j_matrix: DMatrix<f64>,
    j_sparse: SparseOperator,
}

/// Pads `H̃` with `2^{n_q} - K` unphysical states at energy `lambda`.
///
/// `lambda` must exceed the largest eigenvalue of `H̃` by at least 1 E_h.
pub fn pad(h_tilde: &DMatrix<f64>, lambda: f64) -> Result<PaddedProblem> {
    let k = h_tilde.nrows();
    if k == 0 || !h_tilde.is_square() {
        return Err(Error::Dimension("pad needs a non-empty square matrix".into()));
    }
    let top = eigh(h_tilde).0.max();
    if !(lambda > top + 1.0) {
        return Err(Error::Validation(format!(
            "padding energy {lambda} is not above the spectrum (max {top}) by 1 E_h"
        )));
    }
    let n_q = qubits_for(k);
    let dim = 1usize << n_q;
    let j_matrix = DMatrix::from_fn(dim, dim, |r, c| {
        if r < k && c < k {
            h_tilde[(r, c)]
        } else if r == c {
            lambda
        } else {
            0.0
        }
    });
    let pi_matrix = DMatrix::from_fn(dim, dim, |r, c| if r == c && r < k { 1.0 } else { 0.0 });
    let cplx = |m: &DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
    let j_c = cplx(&j_matrix);
    Ok(PaddedProblem {
        j: QubitOperator::from_matrix(&j_c, n_q)?,
        pi: QubitOperator::from_matrix(&cplx(&pi_matrix), n_q)?,
        lambda,
        k,
        n_q,
        j_sparse: SparseOperator::from_dense(&j_c),
        j_matrix,
    })
}

impl PaddedProblem {
    /// `<Π>`: weight on the first `K` basis states.
    pub fn physical_norm(&self, state: &StateVector) -> f64 {
        state.amplitudes()[..self.k].iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<ΠJΠ> / <Π>`; errors when the physical norm vanishes.
    pub fn projected_energy(&self, state: &StateVector) -> Result<f64> {
        let p = self.physical_norm(state);
        if p < MIN_PHYSICAL_NORM {
            return Err(Error::DegenerateProjection(p));
        }
        let psi = &state.amplitudes()[..self.k];
        let mut e = 0.0;
        for r in 0..self.k {
            for c in 0..self.k {
                e += (psi[r].conj() * psi[c]).re * self.j_matrix[(r, c)];
            }
        }
        Ok(e / p)
    }

    pub fn padded_sparse(&self) -> &SparseOperator {
        &self.j_sparse
    }
}

/// Optimization objective under `mode` and the physical norm.
pub fn projected_objective(state: &StateVector, problem: &PaddedProblem, mode: Projection) -> Result<(f64, f64)> {
    if state.n_qubits() != problem.n_q {
        return Err(Error::Dimension(format!(
            "{}-qubit state for a {}-qubit padded problem",
            state.n_qubits(),
            problem.n_q
        )));
    }
    let p = problem.physical_norm(state);
    let value = match mode {
        Projection::Vap => problem.projected_energy(state)?,
        Projection::Pav => problem.j_sparse.expectation(state.amplitudes()).re,
    };
    Ok((value, p))
}

/// Value and gradient of the VAP objective: `(∇<ΠJΠ> - f ∇<Π>) / <Π>`.
fn vap_value_and_gradient(
    problem: &PaddedProblem,
    pj: &SparseOperator,
    circuit: &Circuit,
    theta: &[f64],
    reference: &StateVector,
) -> Result<(f64, Vec<f64>)> {
    let state = apply_circuit(reference, circuit, theta)?;
    let p = problem.physical_norm(&state);
    let f = problem.projected_energy(&state)?;
    // <ΠJΠ - fΠ> has gradient ∇<ΠJΠ> - f∇<Π> at fixed f
    let shifted = shifted_diagonal(pj, problem.k, -f);
    let (_, g) = energy_and_gradient(circuit, theta, &shifted, reference)?;
    Ok((f, g.into_iter().map(|x| x / p).collect()))
}

fn shifted_diagonal(op: &SparseOperator, k: usize, shift: f64) -> SparseOperator {
    let mut m = op.to_dense();
    for i in 0..k {
        m[(i, i)] += shift;
    }
    SparseOperator::from_dense(&m)
}

/// Result of one first-quantized VQE optimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstQuantRun {
    pub scheme: Scheme,
    pub projection: Option<Projection>,
    pub n_qubits: usize,
    /// Projected energy for padding, plain energy for trimming.
    pub energy: f64,
    /// Exact ground energy of the encoded matrix.
    pub exact: f64,
    pub physical_norm: f64,
    /// Trimmed minus untrimmed ground energy; 0 for padding.
    pub trimming_error: f64,
    pub optimization: OptimizeResult,
}

/// Optimizes `circuit` from `|0…0>` (the lowest-energy CSF) on the chosen encoding.
pub fn run_first_quant(
    problem: &FirstQuantProblem,
    circuit: &Circuit,
    theta0: &[f64],
    scheme: Scheme,
    projection: Projection,
    lambda: f64,
    opts: &OptimizerOptions,
) -> Result<FirstQuantRun> {
    match scheme {
        Scheme::Trim => {
            let t = trim(&problem.h_tilde)?;
            check_register(circuit, t.n_qubits())?;
            let h = SparseOperator::from_dense(&t.matrix.map(|x| Complex64::new(x, 0.0)));
            let reference = StateVector::basis(t.n_qubits(), 0);
            let r = minimize(|x| energy_and_gradient(circuit, x, &h, &reference), theta0, opts)?;
            Ok(FirstQuantRun {
                scheme,
                projection: None,
                n_qubits: t.n_qubits(),
                energy: r.f,
                exact: problem.ground_energy + t.energy_error,
                physical_norm: 1.0,
                trimming_error: t.energy_error,
                optimization: r,
            })
        }
        Scheme::Pad => {
            let padded = pad(&problem.h_tilde, lambda)?;
            check_register(circuit, padded.n_q)?;
            let reference = StateVector::basis(padded.n_q, 0);
            let r = match projection {
                Projection::Vap => {
                    let pj = projected_j(&padded);
                    minimize(
                        |x| vap_value_and_gradient(&padded, &pj, circuit, x, &reference),
                        theta0,
                        opts,
                    )?
                }
                Projection::Pav => minimize(
                    |x| energy_and_gradient(circuit, x, &padded.j_sparse, &reference),
                    theta0,
                    opts,
                )?,
            };
            let state = apply_circuit(&reference, circuit, &r.x)?;
            Ok(FirstQuantRun {
                scheme,
                projection: Some(projection),
                n_qubits: padded.n_q,
                energy: padded.projected_energy(&state)?,
                exact: problem.ground_energy,
                physical_norm: padded.physical_norm(&state),
                trimming_error: 0.0,
                optimization: r,
            })
        }
    }
}

fn projected_j(p: &PaddedProblem) -> SparseOperator {
    let dim = 1usize << p.n_q;
    let m = DMatrix::from_fn(dim, dim, |r, c| {
        if r < p.k && c < p.k {
            Complex64::new(p.j_matrix[(r, c)], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    SparseOperator::from_dense(&m)
}

fn check_register(c: &Circuit, n_q: usize) -> Result<()> {
    if c.n_qubits() != n_q {
        return Err(Error::Dimension(format!(
            "{}-qubit circuit for a {n_q}-qubit encoding",
            c.n_qubits()
        )));
    }
    Ok(())
}

/// Best-of-restarts first-quantized VQE at one geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FirstQuantPoint {
    pub r: f64,
    pub k: usize,
    pub e_fci: f64,
    pub best: usize,
    pub runs: Vec<FirstQuantRun>,
    pub cost: CostReport,
}

/// Runs the hardware-efficient Ansatz of `scan` on the first-quantized
/// encoding of every geometry. Restart seeding matches [`initial_parameters`].
pub fn scan_first_quant(scan: &ScanConfig, cfg: &FirstQuantConfig) -> Result<Vec<FirstQuantPoint>> {
    scan.validate()?;
    if scan.ansatz.family == Family::Quccsd {
        return Err(Error::Validation("first quantization needs a hardware-efficient Ansatz".into()));
    }
    (0..scan.geometries.len())
        .into_par_iter()
        .map(|g| {
            let geo = &scan.geometries[g];
            let problem = FirstQuantProblem::build(&scan.active.load(&geo.path)?)?;
            let n_q = match cfg.scheme {
                Scheme::Trim => qubits_for(trim(&problem.h_tilde)?.kept.len()),
                Scheme::Pad => problem.n_qubits(),
            };
            let circuit = build_hardware_efficient(&scan.ansatz, n_q)?;
            let starts = initial_parameters(circuit.n_theta(), scan.restarts, scan.seed, g);
            let runs = starts
                .par_iter()
                .map(|t0| run_first_quant(&problem, &circuit, t0, cfg.scheme, cfg.projection, cfg.lambda, &scan.optimizer))
                .collect::<Result<Vec<_>>>()?;
            let best = (0..runs.len())
                .min_by(|&a, &b| runs[a].energy.total_cmp(&runs[b].energy).then(a.cmp(&b)))
                .expect("one run");
            let prep = Circuit::new(n_q, 0);
            Ok(FirstQuantPoint {
                r: geo.r,
                k: problem.k(),
                e_fci: problem.ground_energy,
                best,
                runs,
                cost: circuit_cost(&circuit, Some(&prep), &QubitOperator::zero(n_q), scan.ansatz.n_l),
            })
        })
        .collect()
}

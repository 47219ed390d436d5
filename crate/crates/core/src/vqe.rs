//! VQE driver: optimization of an Ansatz on an encoded problem, symmetry
//! diagnostics against full CI, dissociation-curve scans and cusp detection.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{
    build_hardware_efficient, build_quccsd, circuit_cost, reference_prep, warm_start_extend, AnsatzSpec, CostReport,
    Family, QuccsdAnsatz,
};
use crate::encoding::{select_active_space, AuxEvaluation, EncodedProblem, EncodingOptions};
use crate::error::{Error, Result};
use crate::fci::{fci, FciSolution};
use crate::fermion::IntegralSet;
use crate::io::{parse_fcidump, Geometry};
use crate::optimize::{minimize, OptimizeResult, OptimizerOptions, TracePoint};
use crate::statevector::{apply_circuit, energy_and_gradient, Circuit, StateVector};

/// Energies equal within this are ties, broken by lower `<S^2>`.
pub const TIE_TOL: f64 = 1e-10;

/// Frozen core plus optional irrep filter for the remaining orbitals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveSpace {
    pub n_frozen: usize,
    pub irreps: Option<Vec<u8>>,
}

impl ActiveSpace {
    pub fn apply(&self, full: &IntegralSet) -> Result<IntegralSet> {
        if self.n_frozen == 0 && self.irreps.is_none() {
            return Ok(full.clone());
        }
        let (frozen, active) = select_active_space(full, self.n_frozen, self.irreps.as_deref());
        full.active_space(&frozen, &active)
    }

    pub fn load(&self, path: impl AsRef<Path>) -> Result<IntegralSet> {
        self.apply(&parse_fcidump(path)?)
    }
}

/// A circuit ready to run on a problem's reduced register.
#[derive(Clone, Debug)]
pub struct PreparedAnsatz {
    pub spec: AnsatzSpec,
    pub circuit: Circuit,
    /// Reference preparation from `|0…0>`; counted in costs, simulated as a basis state.
    pub prep: Circuit,
    pub quccsd: Option<QuccsdAnsatz>,
}

impl PreparedAnsatz {
    pub fn build(problem: &EncodedProblem, spec: &AnsatzSpec) -> Result<Self> {
        spec.validate()?;
        let n_q = problem.n_qubits();
        let (circuit, quccsd) = match spec.family {
            Family::Quccsd => {
                let q = build_quccsd(problem, spec)?;
                (q.circuit.clone(), Some(q))
            }
            _ => (build_hardware_efficient(spec, n_q)?, None),
        };
        Ok(Self {
            spec: *spec,
            circuit,
            prep: reference_prep(n_q, problem.reference_bits)?,
            quccsd,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.circuit.n_theta()
    }

    pub fn state(&self, problem: &EncodedProblem, theta: &[f64]) -> Result<StateVector> {
        apply_circuit(&problem.reference_state(), &self.circuit, theta)
    }

    pub fn cost(&self, problem: &EncodedProblem) -> CostReport {
        circuit_cost(&self.circuit, Some(&self.prep), &problem.hamiltonian, self.spec.n_l)
    }
}

/// Expectations of a state and their deviations from the exact ground state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub energy: f64,
    pub n: f64,
    pub sz: f64,
    pub s2: f64,
    pub delta_e: f64,
    pub delta_n: f64,
    pub delta_sz: f64,
    pub delta_s2: f64,
    /// Where auxiliary operators were actually evaluated.
    pub aux_mode: AuxEvaluation,
}

/// Deviations `value - exact` of energy, `N`, `S_z` and `S^2`.
pub fn evaluate_metrics(
    problem: &EncodedProblem,
    state: &StateVector,
    exact: &FciSolution,
    mode: AuxEvaluation,
) -> Result<Metrics> {
    let energy = problem.energy(state);
    let (aux, aux_mode) = problem.aux_expectations(state, mode)?;
    Ok(Metrics {
        energy,
        n: aux.n,
        sz: aux.sz,
        s2: aux.s2,
        delta_e: energy - exact.energy,
        delta_n: aux.n - exact.n,
        delta_sz: aux.sz - exact.sz,
        delta_s2: aux.s2 - exact.s2,
        aux_mode,
    })
}

/// One optimization from one starting point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeRun {
    pub restart: usize,
    pub theta0: Vec<f64>,
    pub theta: Vec<f64>,
    pub converged: bool,
    pub budget_exhausted: bool,
    pub iterations: usize,
    pub evaluations: usize,
    pub grad_inf: f64,
    pub metrics: Metrics,
    pub trace: Vec<TracePoint>,
}

/// Minimizes the energy of `ansatz` from `theta0`.
pub fn run_vqe(
    problem: &EncodedProblem,
    ansatz: &PreparedAnsatz,
    theta0: &[f64],
    opts: &OptimizerOptions,
) -> Result<OptimizeResult> {
    if theta0.len() != ansatz.n_theta() {
        return Err(Error::Dimension(format!(
            "{} start parameters for {} slots",
            theta0.len(),
            ansatz.n_theta()
        )));
    }
    let reference = problem.reference_state();
    let h = problem.hamiltonian_sparse();
    minimize(|x| energy_and_gradient(&ansatz.circuit, x, h, &reference), theta0, opts)
}

/// Start points: zeros, then `restarts - 1` uniform draws in `[-0.1, 0.1]`.
///
/// Draw `k` at geometry `g` uses ChaCha8 seeded by `seed` on stream `(g << 32) | k`.
pub fn initial_parameters(n_theta: usize, restarts: usize, seed: u64, geometry: usize) -> Vec<Vec<f64>> {
    (0..restarts.max(1))
        .map(|k| {
            if k == 0 {
                return vec![0.0; n_theta];
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((geometry as u64) << 32) | k as u64);
            (0..n_theta).map(|_| rng.gen_range(-0.1..=0.1)).collect()
        })
        .collect()
}

/// Runs every start point and orders the runs by restart index.
pub fn multistart(
    problem: &EncodedProblem,
    ansatz: &PreparedAnsatz,
    starts: &[Vec<f64>],
    exact: &FciSolution,
    opts: &OptimizerOptions,
    aux_mode: AuxEvaluation,
) -> Result<Vec<VqeRun>> {
    starts
        .par_iter()
        .enumerate()
        .map(|(restart, theta0)| {
            let r = run_vqe(problem, ansatz, theta0, opts)?;
            let state = ansatz.state(problem, &r.x)?;
            Ok(VqeRun {
                restart,
                theta0: theta0.clone(),
                metrics: evaluate_metrics(problem, &state, exact, aux_mode)?,
                theta: r.x,
                converged: r.converged,
                budget_exhausted: r.budget_exhausted,
                iterations: r.iterations,
                evaluations: r.evaluations,
                grad_inf: r.grad_inf,
                trace: r.trace,
            })
        })
        .collect()
}

/// Lowest energy; energies within [`TIE_TOL`] go to the lower `<S^2>`, then the lower restart.
pub fn best_run(runs: &[VqeRun]) -> Option<usize> {
    let e_min = runs.iter().map(|r| r.metrics.energy).fold(f64::INFINITY, f64::min);
    runs.iter()
        .enumerate()
        .filter(|(_, r)| r.metrics.energy <= e_min + TIE_TOL)
        .min_by(|a, b| a.1.metrics.s2.total_cmp(&b.1.metrics.s2).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WarmStart {
    #[default]
    None,
    /// The zero start point is replaced by the best parameters of the previous geometry.
    PreviousGeometry,
}

impl std::str::FromStr for WarmStart {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(WarmStart::None),
            "previous_geometry" => Ok(WarmStart::PreviousGeometry),
            other => Err(Error::Validation(format!("unknown warm start {other:?}"))),
        }
    }
}

/// Everything a dissociation-curve scan needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub molecule: String,
    pub geometries: Vec<Geometry>,
    pub active: ActiveSpace,
    pub encoding: EncodingOptions,
    pub ansatz: AnsatzSpec,
    pub optimizer: OptimizerOptions,
    pub restarts: usize,
    pub seed: u64,
    pub aux_mode: AuxEvaluation,
    pub warm_start: WarmStart,
}

impl ScanConfig {
    pub fn new(molecule: impl Into<String>, geometries: Vec<Geometry>, ansatz: AnsatzSpec) -> Self {
        Self {
            molecule: molecule.into(),
            geometries,
            active: ActiveSpace::default(),
            encoding: EncodingOptions::default(),
            ansatz,
            optimizer: OptimizerOptions::default(),
            restarts: 1,
            seed: 0,
            aux_mode: AuxEvaluation::PostTapering,
            warm_start: WarmStart::None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.geometries.is_empty() {
            return Err(Error::Validation("scan has no geometries".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Validation("restarts must be at least 1".into()));
        }
        self.ansatz.validate()
    }
}

/// Exact reference data of one geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferencePoint {
    pub r: f64,
    pub e_fci: f64,
    pub s2_fci: f64,
    pub e_hf: f64,
    pub n_qubits: usize,
    pub n_pauli: usize,
}

/// One geometry of a scan: all restarts and the selected best one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub reference: ReferencePoint,
    pub best: usize,
    pub runs: Vec<VqeRun>,
    pub cost: CostReport,
}

impl ScanPoint {
    pub fn best_run(&self) -> &VqeRun {
        &self.runs[self.best]
    }
}

/// Encodes one geometry and solves it exactly.
pub fn prepare_geometry(
    geometry: &Geometry,
    active: &ActiveSpace,
    encoding: EncodingOptions,
) -> Result<(EncodedProblem, FciSolution, ReferencePoint)> {
    let ints = active.load(&geometry.path)?;
    let problem = EncodedProblem::build(&ints, encoding)?;
    let exact = fci(&ints)?;
    if let Some(e) = geometry.e_fci {
        if (e - exact.energy).abs() > 1e-6 {
            log::warn!(
                "R = {}: FCI {:.10} differs from the manifest value {:.10}",
                geometry.r,
                exact.energy,
                e
            );
        }
    }
    let reference = ReferencePoint {
        r: geometry.r,
        e_fci: exact.energy,
        s2_fci: exact.s2,
        e_hf: ints.reference_energy(),
        n_qubits: problem.n_qubits(),
        n_pauli: problem.hamiltonian.len(),
    };
    Ok((problem, exact, reference))
}

fn scan_one(cfg: &ScanConfig, index: usize, warm: Option<&[f64]>) -> Result<ScanPoint> {
    let (problem, exact, reference) = prepare_geometry(&cfg.geometries[index], &cfg.active, cfg.encoding)?;
    let ansatz = PreparedAnsatz::build(&problem, &cfg.ansatz)?;
    let mut starts = initial_parameters(ansatz.n_theta(), cfg.restarts, cfg.seed, index);
    if let Some(w) = warm.filter(|w| w.len() == ansatz.n_theta()) {
        starts[0] = w.to_vec();
    }
    let runs = multistart(&problem, &ansatz, &starts, &exact, &cfg.optimizer, cfg.aux_mode)?;
    let best = best_run(&runs).expect("at least one run");
    let e = runs[best].metrics.energy;
    if e < exact.energy - 1e-9 {
        return Err(Error::Numerical(format!(
            "R = {}: VQE energy {e} below FCI {}",
            reference.r, exact.energy
        )));
    }
    Ok(ScanPoint {
        cost: ansatz.cost(&problem),
        reference,
        best,
        runs,
    })
}

/// Best-of-restarts VQE at every geometry, in the config's geometry order.
pub fn scan_curve(cfg: &ScanConfig) -> Result<Vec<ScanPoint>> {
    cfg.validate()?;
    match cfg.warm_start {
        WarmStart::None => (0..cfg.geometries.len())
            .into_par_iter()
            .map(|i| scan_one(cfg, i, None))
            .collect(),
        WarmStart::PreviousGeometry => {
            let mut out: Vec<ScanPoint> = Vec::with_capacity(cfg.geometries.len());
            for i in 0..cfg.geometries.len() {
                let warm = out.last().map(|p| p.best_run().theta.clone());
                out.push(scan_one(cfg, i, warm.as_deref())?);
            }
            Ok(out)
        }
    }
}

/// Energy after optimizing at one layer count of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerResult {
    pub n_l: usize,
    pub energy: f64,
    pub theta: Vec<f64>,
}

/// Optimizes `n_l = start.n_l ..= max_n_l`, each layer count starting from
/// the previous optimum extended by [`warm_start_extend`].
pub fn layer_sweep(
    problem: &EncodedProblem,
    start: &AnsatzSpec,
    max_n_l: usize,
    opts: &OptimizerOptions,
) -> Result<Vec<LayerResult>> {
    let mut out: Vec<LayerResult> = Vec::new();
    let mut spec = *start;
    let mut theta: Option<Vec<f64>> = None;
    while spec.n_l <= max_n_l {
        let ansatz = PreparedAnsatz::build(problem, &spec)?;
        let theta0 = theta.take().unwrap_or_else(|| vec![0.0; ansatz.n_theta()]);
        let r = run_vqe(problem, &ansatz, &theta0, opts)?;
        theta = Some(warm_start_extend(&r.x, &spec, problem.n_qubits())?);
        out.push(LayerResult {
            n_l: spec.n_l,
            energy: r.f,
            theta: r.x,
        });
        spec.n_l += 1;
    }
    Ok(out)
}

/// Default ratio of a point's curvature to its neighbours' that counts as a cusp.
pub const CUSP_THRESHOLD: f64 = 5.0;
/// Slope jumps below this (E_h per length unit) are never cusps.
pub const CUSP_MIN_SLOPE_JUMP: f64 = 1e-3;

/// Interior points whose discrete curvature exceeds `threshold` times that of
/// both neighbours (and [`CUSP_MIN_SLOPE_JUMP`] in slope change).
pub fn detect_cusps(curve: &[(f64, f64)], threshold: f64) -> Result<Vec<f64>> {
    if curve.len() < 5 {
        return Err(Error::Validation(format!("cusp detection needs 5 points, got {}", curve.len())));
    }
    if curve.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Validation("bond lengths must increase strictly".into()));
    }
    let slope = |i: usize| (curve[i + 1].1 - curve[i].1) / (curve[i + 1].0 - curve[i].0);
    let n = curve.len();
    let jump: Vec<f64> = (1..n - 1).map(|i| (slope(i) - slope(i - 1)).abs()).collect();
    let kappa: Vec<f64> = (1..n - 1)
        .map(|i| 2.0 * jump[i - 1] / (curve[i + 1].0 - curve[i - 1].0))
        .collect();
    let mut out = Vec::new();
    for k in 0..kappa.len() {
        let left = if k > 0 { kappa[k - 1] } else { 0.0 };
        let right = kappa.get(k + 1).copied().unwrap_or(0.0);
        if jump[k] > CUSP_MIN_SLOPE_JUMP && kappa[k] > threshold * left.max(right) {
            out.push(curve[k + 1].0);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{Family, Flavor};
    use crate::testing::{h2_like, toy_integrals};

    fn opts() -> OptimizerOptions {
        OptimizerOptions::default()
    }

    #[test]
    fn hf_metrics_are_symmetry_pure() {
        let ints = toy_integrals(3, 1, 1, 4);
        let p = EncodedProblem::build(&ints, EncodingOptions::default()).unwrap();
        let exact = fci(&ints).unwrap();
        for mode in [AuxEvaluation::PostTapering, AuxEvaluation::PreTapering] {
            let m = evaluate_metrics(&p, &p.reference_state(), &exact, mode).unwrap();
            assert!(m.delta_n.abs() < 1e-12 && m.delta_sz.abs() < 1e-12);
            assert!((m.delta_s2 - (0.0 - exact.s2)).abs() < 1e-12);
            assert!(m.delta_e > 0.0);
        }
    }

    #[test]
    fn quccsd_on_two_electrons_is_exact() {
        let ints = h2_like();
        let p = EncodedProblem::build(&ints, EncodingOptions::default()).unwrap();
        let exact = fci(&ints).unwrap();
        let mut spec = AnsatzSpec::new(Family::Quccsd, 1);
        spec.flavor = Flavor::Restricted;
        let a = PreparedAnsatz::build(&p, &spec).unwrap();
        let r = run_vqe(&p, &a, &vec![0.0; a.n_theta()], &opts()).unwrap();
        assert!((r.f - exact.energy).abs() < 1e-9, "{} vs {}", r.f, exact.energy);
    }

    #[test]
    fn restarts_are_deterministic_and_bounded() {
        let a = initial_parameters(5, 3, 7, 2);
        assert_eq!(a, initial_parameters(5, 3, 7, 2));
        assert!(a[0].iter().all(|&x| x == 0.0));
        assert!(a[1..].iter().flatten().all(|x| x.abs() <= 0.1));
        assert_ne!(a[1], initial_parameters(5, 3, 7, 3)[1]);
        assert_ne!(a[1], a[2]);
    }

    #[test]
    fn cascade_sweep_is_monotone() {
        let ints = toy_integrals(3, 1, 1, 9);
        let p = EncodedProblem::build(&ints, EncodingOptions::default()).unwrap();
        let sweep = layer_sweep(&p, &AnsatzSpec::new(Family::Cascade, 0), 3, &opts()).unwrap();
        assert_eq!(sweep.len(), 4);
        for w in sweep.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-10);
        }
    }

    #[test]
    fn ties_prefer_low_spin() {
        let run = |e: f64, s2: f64| VqeRun {
            restart: 0,
            theta0: vec![],
            theta: vec![],
            converged: true,
            budget_exhausted: false,
            iterations: 0,
            evaluations: 0,
            grad_inf: 0.0,
            metrics: Metrics {
                energy: e,
                n: 0.0,
                sz: 0.0,
                s2,
                delta_e: 0.0,
                delta_n: 0.0,
                delta_sz: 0.0,
                delta_s2: 0.0,
                aux_mode: AuxEvaluation::PostTapering,
            },
            trace: vec![],
        };
        let runs = [run(-1.0, 2.0), run(-1.0 - 1e-11, 0.5), run(-0.5, 0.0)];
        assert_eq!(best_run(&runs), Some(1));
        assert_eq!(best_run(&[run(-1.0, 2.0), run(-0.9, 0.0)]), Some(0));
    }

    #[test]
    fn cusps_on_smooth_and_kinked_curves() {
        let morse = |r: f64| 0.2 * (1.0 - (-1.5 * (r - 1.5)).exp()).powi(2) - 0.2;
        let smooth: Vec<(f64, f64)> = (0..20).map(|i| 0.8 + 0.15 * i as f64).map(|r| (r, morse(r))).collect();
        assert!(detect_cusps(&smooth, CUSP_THRESHOLD).unwrap().is_empty());
        let kink: Vec<(f64, f64)> = (0..20)
            .map(|i| 0.8 + 0.15 * i as f64)
            .map(|r| (r, if r < 2.0 { -0.1 * r } else { -0.2 + 0.05 * (r - 2.0) }))
            .collect();
        let flags = detect_cusps(&kink, CUSP_THRESHOLD).unwrap();
        assert_eq!(flags.len(), 1);
        assert!((flags[0] - 1.985).abs() < 0.1);
        assert!(detect_cusps(&smooth[..4], 5.0).is_err());
        let mut bad = smooth.clone();
        bad.swap(3, 4);
        assert!(detect_cusps(&bad, 5.0).is_err());
    }
}

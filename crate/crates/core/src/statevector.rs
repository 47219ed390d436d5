//! Noiseless statevector simulation with adjoint gradients.
//!
//! Qubit 0 is the least-significant bit of the amplitude index; a bitstring
//! label lists qubit 0 first, so `"10"` is basis index 1.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::SparseOperator;
use crate::pauli::{Pauli, PauliString, QubitOperator};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << n_qubits {
            return Err(Error::Dimension(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        self.amps.iter_mut().for_each(|a| *a /= n);
    }

    /// `<self|other>`
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// `<psi|op|psi>` for a Hermitian operator.
    pub fn expectation(&self, op: &QubitOperator) -> Result<f64> {
        expectation(self, op)
    }

    /// `P|psi>` for a bare Pauli string.
    pub fn apply_pauli(&self, p: &PauliString) -> StateVector {
        let mut out = vec![ZERO; self.amps.len()];
        for (j, a) in self.amps.iter().enumerate() {
            let (k, ph) = p.apply_to_basis(j);
            out[k] = a * ph;
        }
        StateVector {
            n_qubits: self.n_qubits,
            amps: out,
        }
    }

    /// Little-endian interleaved `re, im` doubles.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(16 * self.amps.len());
        for a in &self.amps {
            out.extend_from_slice(&a.re.to_le_bytes());
            out.extend_from_slice(&a.im.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(n_qubits: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != 16 << n_qubits {
            return Err(Error::Dimension(format!(
                "{} bytes for a {n_qubits}-qubit dump",
                bytes.len()
            )));
        }
        let amps = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        Self::from_amplitudes(n_qubits, amps)
    }

    pub fn dump(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&self.to_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// Basis state from a `0`/`1` label, qubit 0 first.
pub fn init_reference(n_qubits: usize, bitstring: &str) -> Result<StateVector> {
    if bitstring.chars().count() != n_qubits {
        return Err(Error::Dimension(format!(
            "bitstring {bitstring:?} does not have {n_qubits} bits"
        )));
    }
    let mut index = 0usize;
    for (q, c) in bitstring.chars().enumerate() {
        match c {
            '0' => {}
            '1' => index |= 1 << q,
            _ => return Err(Error::Validation(format!("bad bit {c:?} in {bitstring:?}"))),
        }
    }
    Ok(StateVector::basis(n_qubits, index))
}

/// Label of basis index `bits` on `n` qubits, qubit 0 first.
pub fn bits_label(bits: u64, n: usize) -> String {
    (0..n).map(|q| if bits >> q & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn expectation(s: &StateVector, op: &QubitOperator) -> Result<f64> {
    if op.num_qubits() != s.n_qubits {
        return Err(Error::Dimension(format!(
            "{}-qubit operator on {}-qubit state",
            op.num_qubits(),
            s.n_qubits
        )));
    }
    if !op.is_hermitian(1e-12) {
        return Err(Error::Validation("expectation of a non-Hermitian operator".into()));
    }
    let v = SparseOperator::from_qubit_operator(op).expectation(&s.amps);
    Ok(v.re)
}

/// Rotation angle source: a parameter slot or a fixed value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Angle {
    Slot(usize),
    Fixed(f64),
}

impl Angle {
    fn resolve(self, theta: &[f64]) -> f64 {
        match self {
            Angle::Slot(k) => theta[k],
            Angle::Fixed(a) => a,
        }
    }

    pub fn slot(self) -> Option<usize> {
        match self {
            Angle::Slot(k) => Some(k),
            Angle::Fixed(_) => None,
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::Slot(k) => write!(f, "{k}"),
            Angle::Fixed(a) => write!(f, "={a:?}"),
        }
    }
}

impl FromStr for Angle {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Validation(format!("bad angle {s:?}"));
        match s.strip_prefix('=') {
            Some(v) => v.parse().map(Angle::Fixed).map_err(|_| bad()),
            None => s.parse().map(Angle::Slot).map_err(|_| bad()),
        }
    }
}

/// Gates act as `exp(-i a P / 2)` with `P` the rotation axis.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Ry { qubit: usize, angle: Angle },
    Rx { qubit: usize, angle: Angle },
    Cnot { control: usize, target: usize },
    /// `exp(-i coeff * angle * P / 2)`
    Evolution {
        coeff: f64,
        pauli: PauliString,
        angle: Angle,
    },
}

impl Gate {
    pub fn angle(&self) -> Option<Angle> {
        match self {
            Gate::Ry { angle, .. } | Gate::Rx { angle, .. } | Gate::Evolution { angle, .. } => {
                Some(*angle)
            }
            Gate::Cnot { .. } => None,
        }
    }

    pub fn slot(&self) -> Option<usize> {
        self.angle().and_then(Angle::slot)
    }

    /// Highest qubit index touched.
    fn max_qubit(&self) -> Option<usize> {
        match self {
            Gate::Ry { qubit, .. } | Gate::Rx { qubit, .. } => Some(*qubit),
            Gate::Cnot { control, target } => Some(*control.max(target)),
            Gate::Evolution { pauli, .. } => {
                (0..pauli.num_qubits()).rev().find(|&q| pauli.get(q) != Pauli::I)
            }
        }
    }

    /// Generator `P` and multiplier `a` with `dG/dθ = (-i a / 2) P G`.
    fn generator(&self, n: usize) -> Option<(PauliString, f64)> {
        match self {
            Gate::Ry { qubit, .. } => Some((PauliString::single(n, *qubit, Pauli::Y), 1.0)),
            Gate::Rx { qubit, .. } => Some((PauliString::single(n, *qubit, Pauli::X), 1.0)),
            Gate::Evolution { coeff, pauli, .. } => Some((*pauli, *coeff)),
            Gate::Cnot { .. } => None,
        }
    }

    /// Applies the gate, or its inverse when `inverse` is set.
    fn apply(&self, amps: &mut [Complex64], theta: &[f64], inverse: bool) {
        let sign = if inverse { -1.0 } else { 1.0 };
        match self {
            Gate::Ry { qubit, angle } => {
                let a = sign * angle.resolve(theta);
                let (s, c) = (a / 2.0).sin_cos();
                for_pairs(amps, *qubit, |x0, x1| {
                    let (a0, a1) = (*x0, *x1);
                    *x0 = a0 * c - a1 * s;
                    *x1 = a0 * s + a1 * c;
                });
            }
            Gate::Rx { qubit, angle } => {
                let a = sign * angle.resolve(theta);
                let (s, c) = (a / 2.0).sin_cos();
                let is = I * s;
                for_pairs(amps, *qubit, |x0, x1| {
                    let (a0, a1) = (*x0, *x1);
                    *x0 = a0 * c - a1 * is;
                    *x1 = a1 * c - a0 * is;
                });
            }
            Gate::Cnot { control, target } => {
                let (cm, tm) = (1usize << control, 1usize << target);
                for j in 0..amps.len() {
                    if j & cm != 0 && j & tm == 0 {
                        amps.swap(j, j | tm);
                    }
                }
            }
            Gate::Evolution {
                coeff,
                pauli,
                angle,
            } => evolve(amps, pauli, sign * coeff * angle.resolve(theta)),
        }
    }

    /// Dense unitary on `n` qubits, built independently of the kernels.
    pub fn to_matrix(&self, n: usize, theta: &[f64]) -> DMatrix<Complex64> {
        let dim = 1usize << n;
        match self {
            Gate::Cnot { control, target } => {
                let mut m = DMatrix::zeros(dim, dim);
                for j in 0..dim {
                    let k = if j >> control & 1 == 1 { j ^ 1 << target } else { j };
                    m[(k, j)] = Complex64::new(1.0, 0.0);
                }
                m
            }
            _ => {
                let (p, a) = self.generator(n).unwrap();
                let phi = a * self.angle().unwrap().resolve(theta);
                let id = DMatrix::<Complex64>::identity(dim, dim);
                id * Complex64::new((phi / 2.0).cos(), 0.0) - p.to_matrix() * (I * (phi / 2.0).sin())
            }
        }
    }
}

#[inline]
fn for_pairs(amps: &mut [Complex64], qubit: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
    let stride = 1usize << qubit;
    for block in amps.chunks_exact_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
            f(x0, x1);
        }
    }
}

/// `psi <- (cos(phi/2) - i sin(phi/2) P) psi`
fn evolve(amps: &mut [Complex64], p: &PauliString, phi: f64) {
    let (s, c) = (phi / 2.0).sin_cos();
    let x = p.x_mask() as usize;
    if x == 0 {
        for (j, a) in amps.iter_mut().enumerate() {
            let (_, ph) = p.apply_to_basis(j);
            *a *= c - I * s * ph;
        }
        return;
    }
    let top = 1usize << (usize::BITS - 1 - x.leading_zeros());
    for j in 0..amps.len() {
        if j & top != 0 {
            continue;
        }
        let k = j ^ x;
        // P|k> = ph_k |j>, P|j> = ph_j |k>
        let (_, ph_j) = p.apply_to_basis(j);
        let (_, ph_k) = p.apply_to_basis(k);
        let (a, b) = (amps[j], amps[k]);
        amps[j] = a * c - I * s * ph_k * b;
        amps[k] = b * c - I * s * ph_j * a;
    }
}

/// Ordered gate list over `n_theta` parameter slots.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_theta: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize, n_theta: usize) -> Self {
        Self {
            n_qubits,
            n_theta,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Appends a gate after checking its qubits and slot.
    pub fn push(&mut self, g: Gate) -> Result<()> {
        self.check_gate(&g)?;
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::Dimension("circuits on different registers".into()));
        }
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    fn check_gate(&self, g: &Gate) -> Result<()> {
        if let Some(q) = g.max_qubit() {
            if q >= self.n_qubits {
                return Err(Error::Dimension(format!(
                    "gate on qubit {q} in a {}-qubit circuit",
                    self.n_qubits
                )));
            }
        }
        if let Gate::Cnot { control, target } = g {
            if control == target {
                return Err(Error::Validation(format!("CNOT with control = target = {control}")));
            }
        }
        if let Gate::Evolution { pauli, .. } = g {
            if pauli.num_qubits() != self.n_qubits {
                return Err(Error::Dimension("evolution string length differs from register".into()));
            }
        }
        if let Some(k) = g.slot() {
            if k >= self.n_theta {
                return Err(Error::Validation(format!(
                    "parameter slot {k} out of range 0..{}",
                    self.n_theta
                )));
            }
        }
        Ok(())
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_theta {
            return Err(Error::Dimension(format!(
                "{} parameters for a circuit with {} slots",
                theta.len(),
                self.n_theta
            )));
        }
        Ok(())
    }

    /// Product of gate matrices, last gate leftmost.
    pub fn to_matrix(&self, theta: &[f64]) -> Result<DMatrix<Complex64>> {
        self.check_theta(theta)?;
        let dim = 1usize << self.n_qubits;
        let mut u = DMatrix::identity(dim, dim);
        for g in &self.gates {
            u = g.to_matrix(self.n_qubits, theta) * u;
        }
        Ok(u)
    }

    /// Line-based text form: a `# n_qubits=N n_theta=T` header, then one gate per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("# n_qubits={} n_theta={}\n", self.n_qubits, self.n_theta);
        for g in &self.gates {
            let line = match g {
                Gate::Ry { qubit, angle } => format!("RY {qubit} {angle}"),
                Gate::Rx { qubit, angle } => format!("RX {qubit} {angle}"),
                Gate::Cnot { control, target } => format!("CNOT {control} {target}"),
                Gate::Evolution {
                    coeff,
                    pauli,
                    angle,
                } => format!("EVO {coeff:?} {pauli} {angle}"),
            };
            s.push_str(&line);
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut lines = text.lines().enumerate();
        let err = |line: usize, msg: String| Error::parse("<circuit>", line + 1, msg);
        let (_, header) = lines.next().ok_or_else(|| err(0, "empty circuit text".into()))?;
        let mut n_qubits = None;
        let mut n_theta = None;
        for field in header.trim_start_matches('#').split_whitespace() {
            match field.split_once('=') {
                Some(("n_qubits", v)) => n_qubits = v.parse().ok(),
                Some(("n_theta", v)) => n_theta = v.parse().ok(),
                _ => {}
            }
        }
        let (Some(n_qubits), Some(n_theta)) = (n_qubits, n_theta) else {
            return Err(err(0, format!("bad header {header:?}")));
        };
        let mut c = Circuit::new(n_qubits, n_theta);
        for (k, line) in lines {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| err(k, format!("bad index {s:?}")));
            let gate = match f.as_slice() {
                ["RY", q, a] => Gate::Ry {
                    qubit: num(q)?,
                    angle: a.parse().map_err(|e: Error| err(k, e.to_string()))?,
                },
                ["RX", q, a] => Gate::Rx {
                    qubit: num(q)?,
                    angle: a.parse().map_err(|e: Error| err(k, e.to_string()))?,
                },
                ["CNOT", c, t] => Gate::Cnot {
                    control: num(c)?,
                    target: num(t)?,
                },
                ["EVO", coeff, p, a] => Gate::Evolution {
                    coeff: coeff.parse().map_err(|_| err(k, format!("bad coefficient {coeff:?}")))?,
                    pauli: p.parse().map_err(|e: Error| err(k, e.to_string()))?,
                    angle: a.parse().map_err(|e: Error| err(k, e.to_string()))?,
                },
                _ => return Err(err(k, format!("unrecognized gate line {line:?}"))),
            };
            c.push(gate).map_err(|e| err(k, e.to_string()))?;
        }
        Ok(c)
    }
}

/// `U(theta) |s>`
pub fn apply_circuit(s: &StateVector, c: &Circuit, theta: &[f64]) -> Result<StateVector> {
    if s.n_qubits != c.n_qubits {
        return Err(Error::Dimension(format!(
            "{}-qubit circuit on {}-qubit state",
            c.n_qubits, s.n_qubits
        )));
    }
    c.check_theta(theta)?;
    let mut out = s.clone();
    for g in &c.gates {
        g.apply(&mut out.amps, theta, false);
    }
    Ok(out)
}

/// Energy `<U psi|H|U psi>` and its gradient by one reverse sweep.
///
/// Every parametrized gate is `exp(-i a θ P / 2)`, so its derivative is
/// `(-i a / 2) P` times the gate; contributions of gates sharing a slot add.
pub fn energy_and_gradient(
    c: &Circuit,
    theta: &[f64],
    h: &SparseOperator,
    reference: &StateVector,
) -> Result<(f64, Vec<f64>)> {
    if h.dim() != 1usize << c.n_qubits {
        return Err(Error::Dimension("operator and circuit registers differ".into()));
    }
    let phi_state = apply_circuit(reference, c, theta)?;
    let mut phi = phi_state.amps;
    let mut lambda = h.apply(&phi);
    let energy = phi
        .iter()
        .zip(&lambda)
        .map(|(a, b)| (a.conj() * b).re)
        .sum::<f64>();
    let mut grad = vec![0.0; c.n_theta];
    let n = c.n_qubits;
    let mut scratch = vec![ZERO; phi.len()];
    for g in c.gates.iter().rev() {
        if let (Some(k), Some((p, a))) = (g.slot(), g.generator(n)) {
            // 2 Re <lambda| (-i a/2) P |phi>
            let mut acc = ZERO;
            for (j, x) in phi.iter().enumerate() {
                let (r, ph) = p.apply_to_basis(j);
                scratch[r] = x * ph;
            }
            for (l, s) in lambda.iter().zip(&scratch) {
                acc += l.conj() * s;
            }
            grad[k] += 2.0 * (acc * (-I * (a / 2.0))).re;
        }
        g.apply(&mut phi, theta, true);
        g.apply(&mut lambda, theta, true);
    }
    Ok((energy, grad))
}

/// Convenience wrapper over [`energy_and_gradient`] taking a [`QubitOperator`].
pub fn gradient(c: &Circuit, theta: &[f64], op: &QubitOperator, reference: &StateVector) -> Result<Vec<f64>> {
    if op.num_qubits() != c.n_qubits {
        return Err(Error::Dimension("operator and circuit registers differ".into()));
    }
    let h = SparseOperator::from_qubit_operator(op);
    Ok(energy_and_gradient(c, theta, &h, reference)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn close(a: &StateVector, b: &StateVector, tol: f64) -> bool {
        a.amps.iter().zip(&b.amps).all(|(x, y)| (x - y).norm() < tol)
    }

    pub(crate) fn random_circuit(rng: &mut ChaCha8Rng, n: usize, n_theta: usize, n_gates: usize) -> Circuit {
        let mut c = Circuit::new(n, n_theta);
        let paulis = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for _ in 0..n_gates {
            let slot = Angle::Slot(rng.gen_range(0..n_theta));
            let g = match rng.gen_range(0..4) {
                0 => Gate::Ry {
                    qubit: rng.gen_range(0..n),
                    angle: slot,
                },
                1 => Gate::Rx {
                    qubit: rng.gen_range(0..n),
                    angle: slot,
                },
                2 => {
                    let control = rng.gen_range(0..n);
                    let target = (control + rng.gen_range(1..n)) % n;
                    Gate::Cnot { control, target }
                }
                _ => {
                    let mut p = PauliString::identity(n);
                    for q in 0..n {
                        p.set(q, paulis[rng.gen_range(0..4)]);
                    }
                    Gate::Evolution {
                        coeff: rng.gen_range(-1.5..1.5),
                        pauli: p,
                        angle: slot,
                    }
                }
            };
            c.push(g).unwrap();
        }
        c
    }

    #[test]
    fn reference_bit_order() {
        assert_eq!(init_reference(2, "00").unwrap(), StateVector::basis(2, 0));
        assert_eq!(init_reference(2, "10").unwrap(), StateVector::basis(2, 1));
        assert!(matches!(init_reference(2, "1"), Err(Error::Dimension(_))));
        assert_eq!(bits_label(0b110, 3), "011");
    }

    #[test]
    fn ry_pi_flips() {
        let mut c = Circuit::new(1, 1);
        c.push(Gate::Ry { qubit: 0, angle: Angle::Slot(0) }).unwrap();
        let out = apply_circuit(&StateVector::zero(1), &c, &[PI]).unwrap();
        assert!((out.fidelity(&StateVector::basis(1, 1)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kernels_match_dense_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10 {
            let c = random_circuit(&mut rng, 5, 6, 30);
            let theta: Vec<f64> = (0..6).map(|_| rng.gen_range(-PI..PI)).collect();
            let u = c.to_matrix(&theta).unwrap();
            let out = apply_circuit(&StateVector::basis(5, 3), &c, &theta).unwrap();
            let want = StateVector::from_amplitudes(5, u.column(3).iter().copied().collect()).unwrap();
            assert!(close(&out, &want, 1e-12));
            assert!((out.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn simple_expectations() {
        let z = QubitOperator::from_labels(&[(1.0, "Z")]).unwrap();
        let x = QubitOperator::from_labels(&[(1.0, "X")]).unwrap();
        assert_eq!(StateVector::zero(1).expectation(&z).unwrap(), 1.0);
        let h = 1.0 / 2f64.sqrt();
        let plus = StateVector::from_amplitudes(1, vec![Complex64::new(h, 0.0); 2]).unwrap();
        assert!((plus.expectation(&x).unwrap() - 1.0).abs() < 1e-15);
        let mut nh = QubitOperator::zero(1);
        nh.add_term(Complex64::new(0.0, 1.0), PauliString::single(1, 0, Pauli::Z));
        assert!(matches!(plus.expectation(&nh), Err(Error::Validation(_))));
    }

    #[test]
    fn ry_gradient_is_minus_sine() {
        let mut c = Circuit::new(1, 1);
        c.push(Gate::Ry { qubit: 0, angle: Angle::Slot(0) }).unwrap();
        let z = QubitOperator::from_labels(&[(1.0, "Z")]).unwrap();
        for t in [0.0, 0.3, 1.7, PI] {
            let g = gradient(&c, &[t], &z, &StateVector::zero(1)).unwrap();
            assert!((g[0] + t.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn adjoint_gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let op = QubitOperator::from_labels(&[(0.7, "XZYI"), (-0.4, "ZZII"), (0.2, "IYYX"), (0.1, "IIIZ")]).unwrap();
        let h = SparseOperator::from_qubit_operator(&op);
        for _ in 0..5 {
            let c = random_circuit(&mut rng, 4, 5, 25);
            let theta: Vec<f64> = (0..5).map(|_| rng.gen_range(-PI..PI)).collect();
            let r = StateVector::zero(4);
            let (_, g) = energy_and_gradient(&c, &theta, &h, &r).unwrap();
            for k in 0..5 {
                let mut tp = theta.clone();
                let mut tm = theta.clone();
                tp[k] += 1e-5;
                tm[k] -= 1e-5;
                let ep = energy_and_gradient(&c, &tp, &h, &r).unwrap().0;
                let em = energy_and_gradient(&c, &tm, &h, &r).unwrap().0;
                assert!((g[k] - (ep - em) / 2e-5).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn evolution_matches_cos_sin_form() {
        let p: PauliString = "XYZ".parse().unwrap();
        let g = Gate::Evolution { coeff: 0.8, pauli: p, angle: Angle::Fixed(0.9) };
        let m = g.to_matrix(3, &[]);
        let mut amps: Vec<Complex64> = (0..8).map(|k| Complex64::new(k as f64, 1.0 - k as f64)).collect();
        let v = nalgebra::DVector::from_vec(amps.clone());
        g.apply(&mut amps, &[], false);
        let want = &m * v;
        for (a, b) in amps.iter().zip(want.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn circuit_text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut c = random_circuit(&mut rng, 3, 4, 12);
        c.push(Gate::Rx { qubit: 1, angle: Angle::Fixed(PI) }).unwrap();
        let back = Circuit::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
        assert!(Circuit::from_text("# n_qubits=2 n_theta=1\nRY 5 0\n").is_err());
        assert!(Circuit::from_text("# n_qubits=2 n_theta=1\nRY 0 3\n").is_err());
    }

    #[test]
    fn binary_dump_round_trip() {
        let s = StateVector::from_amplitudes(1, vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, -0.8)]).unwrap();
        assert_eq!(StateVector::from_bytes(1, &s.to_bytes()).unwrap(), s);
    }
}

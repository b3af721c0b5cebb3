//! Full state-vector simulation of `Q = −I_γ U⁻¹ I_τ U` on n qubits.
//!
//! Used to check the two-dimensional reduction end to end: the simulated
//! state is decomposed over |γ⟩ and U⁻¹|τ⟩ at every step and compared with
//! the 2×2 model.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::operator::build_iteration_matrix;
use crate::recurrence::PairIter;
use crate::spectral::amplitude_closed;
use crate::types::{AmplitudeTrace, Estimate, Method, PhaseConfig, TraceSample};

/// Largest supported register.
pub const MAX_QUBITS: u32 = 14;

/// Largest register for which a dense N×N unitary is materialised
/// (4096² complex entries, 256 MiB).
pub const MAX_DENSE_QUBITS: u32 = 12;

/// Tolerance of the unitarity check applied to loaded matrices.
pub const UNITARITY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state |index⟩ of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_index(dim, index)?;
        let mut amps = vec![ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(x, y)| x.conj() * y).sum()
    }
}

fn check_index(dim: usize, index: usize) -> Result<()> {
    if index < dim {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange(format!(
            "basis index {index} in dimension {dim}"
        )))
    }
}

/// Applies `I_x(angle) = I − 2cos(angle)e^{i·angle}|x⟩⟨x|`, which multiplies the
/// amplitude at `index` by `−e^{i2·angle}`.
pub fn apply_phase_operator(state: &mut StateVector, index: usize, angle: f64) -> Result<()> {
    check_index(state.dim(), index)?;
    state.amps[index] *= -Complex64::from_polar(1.0, 2.0 * angle);
    Ok(())
}

/// In-place normalised Walsh–Hadamard transform. It is real symmetric and
/// therefore its own inverse.
pub fn walsh_hadamard(amps: &mut [Complex64]) {
    let n = amps.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in amps.chunks_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*x + *y, *x - *y);
                *x = s;
                *y = d;
            }
        }
        half *= 2;
    }
    let scale = 1.0 / (n as f64).sqrt();
    amps.iter_mut().for_each(|a| *a *= scale);
}

/// A dense row-major unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseUnitary {
    /// Builds from row-major entries and checks unitarity to [`UNITARITY_TOL`].
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::MalformedMatrix(format!(
                "{} entries for dimension {dim}",
                entries.len()
            )));
        }
        let u = DenseUnitary { dim, entries };
        let deviation = u.unitarity_deviation();
        if deviation > UNITARITY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(u)
    }

    /// Seeded Haar-like random unitary: a complex Gaussian matrix whose
    /// columns are orthonormalised by modified Gram–Schmidt.
    pub fn random(dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gaussian = || -> f64 { StandardNormal.sample(&mut rng) };
        // column-major while orthonormalising
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|_| (0..dim).map(|_| Complex64::new(gaussian(), gaussian())).collect())
            .collect();
        for j in 0..dim {
            let (done, rest) = cols.split_at_mut(j);
            let v = &mut rest[0];
            for q in done.iter() {
                let proj: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= proj * y);
            }
            let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        let mut entries = vec![ZERO; dim * dim];
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                entries[i * dim + j] = *x;
            }
        }
        DenseUnitary { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Entry (row, col).
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// max |U†U − I| over all entries.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let mut s = ZERO;
                for r in 0..n {
                    s += self.get(r, i).conj() * self.get(r, j);
                }
                if i == j {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(x).map(|(u, v)| u * v).sum())
            .collect()
    }

    pub fn apply_adjoint(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.dim];
        for (row, xi) in self.entries.chunks(self.dim).zip(x) {
            for (o, u) in out.iter_mut().zip(row) {
                *o += u.conj() * xi;
            }
        }
        out
    }

    /// Parses the text format: a line with N, then N rows of N whitespace
    /// separated entries written `re+imj` (a bare real or `imj` is accepted).
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedMatrix("empty input".into()))?;
        let dim: usize = header
            .parse()
            .map_err(|_| Error::MalformedMatrix(format!("bad dimension line `{header}`")))?;
        let mut entries = Vec::with_capacity(dim * dim);
        let mut rows = 0;
        for line in lines {
            let row: Vec<Complex64> = line.split_whitespace().map(parse_entry).collect::<Result<_>>()?;
            if row.len() != dim {
                return Err(Error::MalformedMatrix(format!(
                    "row {} has {} entries, expected {dim}",
                    rows + 1,
                    row.len()
                )));
            }
            entries.extend(row);
            rows += 1;
        }
        if rows != dim {
            return Err(Error::MalformedMatrix(format!("{rows} rows, expected {dim}")));
        }
        Self::from_entries(dim, entries)
    }

    /// Writes the text format read by [`DenseUnitary::parse`]; values round-trip exactly.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.dim);
        for row in self.entries.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(|z| format!("{:?}{:+?}j", z.re, z.im)).collect();
            let _ = writeln!(out, "{}", cells.join(" "));
        }
        out
    }
}

fn parse_entry(token: &str) -> Result<Complex64> {
    let bad = || Error::MalformedMatrix(format!("bad entry `{token}`"));
    let number = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(bad);
    let Some(body) = token.strip_suffix('j') else {
        return Ok(Complex64::new(number(token)?, 0.0));
    };
    // the real/imaginary split is the last sign not opening the token or an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => Ok(Complex64::new(number(&body[..i])?, number(&body[i..])?)),
        None => Ok(Complex64::new(0.0, number(body)?)),
    }
}

/// How the driving unitary U is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum UnitarySpec {
    /// The n-fold tensor power of the Hadamard gate.
    WalshHadamard,
    Dense(DenseUnitary),
    /// Seeded random unitary, see [`DenseUnitary::random`].
    Random {
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Unitary {
    WalshHadamard,
    Dense(DenseUnitary),
}

impl Unitary {
    fn apply(&self, amps: &mut Vec<Complex64>) {
        match self {
            Unitary::WalshHadamard => walsh_hadamard(amps),
            Unitary::Dense(u) => *amps = u.apply(amps),
        }
    }

    fn apply_adjoint(&self, amps: &mut Vec<Complex64>) {
        match self {
            Unitary::WalshHadamard => walsh_hadamard(amps),
            Unitary::Dense(u) => *amps = u.apply_adjoint(amps),
        }
    }
}

/// A search problem on n qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchInstance {
    n: u32,
    gamma_index: usize,
    tau_index: usize,
    unitary: Unitary,
    theta: f64,
    phi: f64,
    /// U⁻¹|τ⟩, the second spanning vector of the invariant plane.
    pulled_back_target: StateVector,
}

impl SearchInstance {
    pub fn new(
        n: u32,
        gamma_index: usize,
        tau_index: usize,
        unitary: UnitarySpec,
        theta: f64,
        phi: f64,
    ) -> Result<Self> {
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits { n, max: MAX_QUBITS });
        }
        let dim = 1usize << n;
        check_index(dim, gamma_index)?;
        check_index(dim, tau_index)?;
        let unitary = match unitary {
            UnitarySpec::WalshHadamard => Unitary::WalshHadamard,
            UnitarySpec::Dense(u) if u.dim() != dim => {
                return Err(Error::MalformedMatrix(format!(
                    "matrix dimension {} does not match 2^{n}",
                    u.dim()
                )))
            }
            UnitarySpec::Dense(u) => Unitary::Dense(u),
            UnitarySpec::Random { .. } if n > MAX_DENSE_QUBITS => {
                return Err(Error::TooManyQubits {
                    n,
                    max: MAX_DENSE_QUBITS,
                })
            }
            UnitarySpec::Random { seed } => Unitary::Dense(DenseUnitary::random(dim, seed)),
        };
        let mut pulled_back_target = StateVector::basis(dim, tau_index)?;
        unitary.apply_adjoint(&mut pulled_back_target.amps);
        Ok(SearchInstance {
            n,
            gamma_index,
            tau_index,
            unitary,
            theta,
            phi,
            pulled_back_target,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn gamma_index(&self) -> usize {
        self.gamma_index
    }

    pub fn tau_index(&self) -> usize {
        self.tau_index
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// ⟨τ|U|γ⟩ = conj(⟨γ|U⁻¹|τ⟩).
    pub fn u_tau_gamma(&self) -> Complex64 {
        self.pulled_back_target.amps[self.gamma_index].conj()
    }

    /// The 2×2 model parameters; fails unless 0 < p < 1.
    pub fn phase_config(&self) -> Result<PhaseConfig> {
        PhaseConfig::new(self.theta, self.phi, self.u_tau_gamma())
    }

    pub fn initial_state(&self) -> StateVector {
        StateVector::basis(self.dim(), self.gamma_index).expect("index checked at construction")
    }
}

/// One application of `Q = −I_γ(θ) U⁻¹ I_τ(φ) U`.
pub fn apply_q(state: &mut StateVector, inst: &SearchInstance) {
    inst.unitary.apply(&mut state.amps);
    state.amps[inst.tau_index] *= -Complex64::from_polar(1.0, 2.0 * inst.phi);
    inst.unitary.apply_adjoint(&mut state.amps);
    state.amps[inst.gamma_index] *= -Complex64::from_polar(1.0, 2.0 * inst.theta);
    state.amps.iter_mut().for_each(|a| *a = -*a);
}

/// Coefficients of a state on the (non-orthogonal) basis |γ⟩, U⁻¹|τ⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneDecomposition {
    pub a: Complex64,
    pub b: Complex64,
    /// Norm of the component outside the plane.
    pub residual: f64,
}

/// Solves the 2×2 Gram system for `state ≈ a|γ⟩ + b U⁻¹|τ⟩`.
pub fn extract_pair(state: &StateVector, inst: &SearchInstance) -> Result<PlaneDecomposition> {
    let w = &inst.pulled_back_target;
    // ⟨γ|U⁻¹|τ⟩
    let overlap = w.amps[inst.gamma_index];
    let det = 1.0 - overlap.norm_sqr();
    if det.abs() < 1e-12 {
        return Err(Error::SingularGram);
    }
    let g = state.amps[inst.gamma_index];
    let h = w.inner(state);
    let a = (g - overlap * h) / det;
    let b = (h - overlap.conj() * g) / det;

    let residual = state
        .amps
        .iter()
        .zip(&w.amps)
        .enumerate()
        .map(|(i, (s, wi))| {
            let gamma_part = if i == inst.gamma_index { a } else { ZERO };
            (s - gamma_part - b * wi).norm_sqr()
        })
        .sum::<f64>()
        .sqrt();
    Ok(PlaneDecomposition { a, b, residual })
}

/// Simulates k = 1..=k_max applications of Q and records, per step, the
/// extracted pair next to the coupled-recurrence prediction and the sine
/// form |b_k|, plus the out-of-plane residual and the norm drift.
pub fn run_trace(inst: &SearchInstance, k_max: u64) -> Result<AmplitudeTrace> {
    let cfg = inst.phase_config()?;
    let m = build_iteration_matrix(&cfg);
    let mut state = inst.initial_state();
    let mut trace = AmplitudeTrace::new();

    for pair in PairIter::new(m).skip(1).take(k_max as usize) {
        apply_q(&mut state, inst);
        let extracted = extract_pair(&state, inst)?;
        let b_closed = if cfg.is_degenerate() {
            None
        } else {
            Some(amplitude_closed(&cfg, pair.k as f64)?.b_norm)
        };
        let mut sample = TraceSample::new(
            pair.k,
            vec![
                Estimate {
                    method: Method::StateVector,
                    a: Some(extracted.a),
                    b: extracted.b,
                },
                Estimate {
                    method: Method::CoupledRecurrence,
                    a: Some(pair.a),
                    b: pair.b,
                },
            ],
            b_closed,
        );
        // the a component is compared too
        sample.residual = sample.residual.max((extracted.a - pair.a).norm());
        sample.plane_residual = Some(extracted.residual);
        sample.norm_drift = Some((state.norm_sqr() - 1.0).abs());
        trace.push(sample)?;
    }
    Ok(trace)
}

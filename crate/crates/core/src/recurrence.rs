//! Direct evaluators for the amplitudes after k applications of Q.
//!
//! Three independent routes are provided: the coupled (a, b) iteration, the
//! decoupled three-term recurrence for b alone, and the expansion of b as a
//! polynomial in βλ whose coefficients carry exact binomial weights.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::ExactComplex;
use crate::types::{AmplitudePair, IterationMatrix};

/// Largest step accepted by [`polynomial_b`].
pub const MAX_POLY_STEP: u64 = 40;

/// Successive states `Q^k|γ⟩` in the (|γ⟩, U⁻¹|τ⟩) basis, starting at k = 0.
#[derive(Debug, Clone)]
pub struct PairIter {
    m: IterationMatrix,
    next: AmplitudePair,
}

impl PairIter {
    pub fn new(m: IterationMatrix) -> Self {
        PairIter {
            m,
            next: AmplitudePair::initial(),
        }
    }
}

impl Iterator for PairIter {
    type Item = AmplitudePair;

    fn next(&mut self) -> Option<AmplitudePair> {
        let current = self.next;
        self.next = self.m.step(current);
        Some(current)
    }
}

/// `(a_k, b_k)` from `a_{k+1} = α a_k + λ b_k`, `b_{k+1} = β a_k + δ b_k`
/// with `a_0 = 1`, `b_0 = 0`.
pub fn iterate_pair(m: &IterationMatrix, k: u64) -> AmplitudePair {
    let mut pair = AmplitudePair::initial();
    for _ in 0..k {
        pair = m.step(pair);
    }
    pair
}

/// Desired-state amplitudes b_1, b_2, … from the three-term recurrence
/// `b_{k+1} = (α+δ) b_k + (βλ − αδ) b_{k−1}`.
#[derive(Debug, Clone)]
pub struct ThreeTermIter {
    trace: Complex64,
    tail: Complex64,
    prev: Complex64,
    current: Complex64,
}

impl ThreeTermIter {
    pub fn new(m: &IterationMatrix) -> Self {
        ThreeTermIter {
            trace: m.trace(),
            tail: m.beta * m.lambda - m.alpha * m.delta,
            // b_0 = 0 makes the first step produce b_2 = β(α+δ)
            prev: Complex64::new(0.0, 0.0),
            current: m.beta,
        }
    }
}

impl Iterator for ThreeTermIter {
    type Item = Complex64;

    fn next(&mut self) -> Option<Complex64> {
        let out = self.current;
        let next = self.trace * self.current + self.tail * self.prev;
        self.prev = self.current;
        self.current = next;
        Some(out)
    }
}

/// b_k from the three-term recurrence seeded with `b_1 = β`, `b_2 = β(α+δ)`.
/// Returns 0 for k = 0.
pub fn iterate_b(m: &IterationMatrix, k: u64) -> Complex64 {
    match k {
        0 => Complex64::new(0.0, 0.0),
        _ => ThreeTermIter::new(m)
            .nth((k - 1) as usize)
            .expect("three-term iterator is unbounded"),
    }
}

fn binomial(n: u64, r: u64) -> u64 {
    num_integer::binomial(n, r)
}

/// `l^{(j)}_{ki} = C(i+j, j) · C(k−i−j−1, j)`, the weight of `α^{k−1−2j−i} δ^i`
/// in the coefficient of `(βλ)^j` of `b_k / β`.
///
/// Valid for `k ≥ 1`, `0 ≤ j ≤ ⌊(k−1)/2⌋`, `0 ≤ i ≤ k−1−2j`.
pub fn binomial_weight_l(k: u64, i: u64, j: u64) -> Result<u64> {
    if k == 0 || 2 * j + i + 1 > k {
        return Err(Error::IndexOutOfRange(format!("l weight (k={k}, i={i}, j={j})")));
    }
    Ok(binomial(i + j, j) * binomial(k - i - j - 1, j))
}

/// `t^{(j)}_{ki} = C(i+j−1, j−1) · C(k−i−j, j)`, the weight of `α^{k−2j−i} δ^i`
/// in the coefficient of `(βλ)^j` of `a_k`.
///
/// Valid for `1 ≤ j ≤ ⌊k/2⌋`, `0 ≤ i ≤ k−2j`.
pub fn binomial_weight_t(k: u64, i: u64, j: u64) -> Result<u64> {
    if j == 0 || 2 * j + i > k {
        return Err(Error::IndexOutOfRange(format!("t weight (k={k}, i={i}, j={j})")));
    }
    Ok(binomial(i + j - 1, j - 1) * binomial(k - i - j, j))
}

/// Coefficients of the expansions
/// `b_k = β Σ_j c_kj (βλ)^j` and `a_k = Σ_j d_kj (βλ)^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoefficients {
    pub k: u64,
    /// c_kj for j = 0..=⌊(k−1)/2⌋.
    pub c: Vec<Complex64>,
    /// d_kj for j = 0..=⌊k/2⌋; d_k0 = α^k.
    pub d: Vec<Complex64>,
}

impl PolyCoefficients {
    /// Evaluates every coefficient at the given α, δ. `k` may exceed
    /// [`MAX_POLY_STEP`] by one so that step k+1 is reachable from the cap.
    pub fn compute(alpha: Complex64, delta: Complex64, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(Error::IndexOutOfRange("polynomial form needs k ≥ 1".into()));
        }
        if k > MAX_POLY_STEP + 1 {
            return Err(Error::StepTooLarge { k, max: MAX_POLY_STEP });
        }
        let alpha_pow = powers(alpha, k);
        let delta_pow = powers(delta, k);
        let monomial = |deg: u64, i: u64| alpha_pow[(deg - i) as usize] * delta_pow[i as usize];

        let c = (0..=(k - 1) / 2)
            .map(|j| {
                let deg = k - 1 - 2 * j;
                (0..=deg)
                    .map(|i| {
                        let w = binomial_weight_l(k, i, j).expect("index inside range");
                        monomial(deg, i) * w as f64
                    })
                    .sum()
            })
            .collect();

        let d = (0..=k / 2)
            .map(|j| {
                if j == 0 {
                    return alpha_pow[k as usize];
                }
                let deg = k - 2 * j;
                (0..=deg)
                    .map(|i| {
                        let w = binomial_weight_t(k, i, j).expect("index inside range");
                        monomial(deg, i) * w as f64
                    })
                    .sum()
            })
            .collect();

        Ok(PolyCoefficients { k, c, d })
    }
}

fn powers(z: Complex64, n: u64) -> Vec<Complex64> {
    std::iter::successors(Some(Complex64::new(1.0, 0.0)), |p| Some(p * z))
        .take(n as usize + 1)
        .collect()
}

/// b_k evaluated as `β Σ_j c_kj (βλ)^j`, for `1 ≤ k ≤ 40`.
///
/// Individual terms grow to ~10²² for large p while b_k stays O(1), so the
/// sum is formed exactly over the dyadic rationals (α, δ, βλ and β are taken
/// as given) and rounded once.
pub fn polynomial_b(m: &IterationMatrix, k: u64) -> Result<Complex64> {
    if k == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    if k > MAX_POLY_STEP {
        return Err(Error::StepTooLarge { k, max: MAX_POLY_STEP });
    }
    let alpha = ExactComplex::from_complex(m.alpha);
    let delta = ExactComplex::from_complex(m.delta);
    let bl = ExactComplex::from_complex(m.beta * m.lambda);
    let delta_pow: Vec<ExactComplex> =
        std::iter::successors(Some(ExactComplex::from_complex(Complex64::new(1.0, 0.0))), |p| {
            Some(p.mul(&delta))
        })
        .take(k as usize)
        .collect();

    // c_kj = Σ_i l_ki α^{n−i} δ^i with n = k−1−2j, by Horner in α
    let coefficient = |j: u64| -> Result<ExactComplex> {
        let deg = k - 1 - 2 * j;
        let mut acc = ExactComplex::zero();
        for i in 0..=deg {
            let w = binomial_weight_l(k, i, j)?;
            acc = acc.mul(&alpha).add(&delta_pow[i as usize].scale(w));
        }
        Ok(acc)
    };
    // Horner in βλ
    let mut r = ExactComplex::zero();
    for j in (0..=(k - 1) / 2).rev() {
        r = r.mul(&bl).add(&coefficient(j)?);
    }
    Ok(m.beta * r.to_complex())
}

/// Verifies, at step k, the identities that carry the polynomial form from
/// step k to step k+1:
///
/// * exact integers: `t^{(j)}_{k0} = l^{(j)}_{(k+1)0}` and
///   `t^{(j)}_{ki} + l^{(j)}_{k(i−1)} = l^{(j)}_{(k+1)i}`;
/// * numerically, for sampled α, δ: `α^k + δ c_k0 = c_{(k+1)0}`,
///   `d_kj + δ c_kj = c_{(k+1)j}`, and `d_km = c_{(k+1)m} = 1` when k = 2m.
///
/// Numeric comparisons are relative to the magnitude of the summed terms.
pub fn coefficient_induction_check(k: u64) -> bool {
    if !(2..=MAX_POLY_STEP).contains(&k) {
        return false;
    }
    weight_identity_holds(k) && coefficient_identity_holds(k, 0x5eed ^ k, 8)
}

fn weight_identity_holds(k: u64) -> bool {
    (1..=k / 2).all(|j| {
        (0..=k - 2 * j).all(|i| {
            let lhs = if i == 0 {
                binomial_weight_t(k, 0, j)
            } else {
                binomial_weight_t(k, i, j).and_then(|t| binomial_weight_l(k, i - 1, j).map(|l| t + l))
            };
            matches!((lhs, binomial_weight_l(k + 1, i, j)), (Ok(x), Ok(y)) if x == y)
        })
    })
}

fn coefficient_identity_holds(k: u64, seed: u64, samples: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).all(|_| {
        let alpha = Complex64::from_polar(rng.random_range(0.2..1.2), rng.random_range(-3.2..3.2));
        let delta = Complex64::from_polar(rng.random_range(0.2..1.2), rng.random_range(-3.2..3.2));
        coefficient_identity_at(alpha, delta, k)
    })
}

pub(crate) fn coefficient_identity_at(alpha: Complex64, delta: Complex64, k: u64) -> bool {
    let (Ok(now), Ok(next)) = (
        PolyCoefficients::compute(alpha, delta, k),
        PolyCoefficients::compute(alpha, delta, k + 1),
    ) else {
        return false;
    };
    if now.d.len() != next.c.len() {
        return false;
    }
    // scale of the largest term in any coefficient at step k+1
    let scale = {
        let (a, d) = (alpha.norm().max(1.0), delta.norm().max(1.0));
        let top = (a.max(d)).powi(k as i32);
        let weights: u64 = (0..=k / 2)
            .map(|j| {
                (0..=k - 2 * j)
                    .map(|i| binomial_weight_l(k + 1, i, j).unwrap_or(0))
                    .sum::<u64>()
            })
            .max()
            .unwrap_or(1);
        top * weights as f64
    };
    let zero = Complex64::new(0.0, 0.0);
    now.d.iter().enumerate().all(|(j, d)| {
        let c = now.c.get(j).copied().unwrap_or(zero);
        let lhs = d + delta * c;
        (lhs - next.c[j]).norm() <= 1e-10 * scale.max(1.0)
    }) && (k % 2 == 1 || {
        let m = (k / 2) as usize;
        (now.d[m] - 1.0).norm() < 1e-12 && (next.c[m] - 1.0).norm() < 1e-12
    })
}

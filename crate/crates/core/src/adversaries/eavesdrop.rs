//! Parameter estimation from observed controller traffic.
//!
//! An eavesdropper who sees pairs `(y, u)` of a static feedback loop
//! `u = F·y` recovers `F` by least squares. On plaintext traffic that is
//! exact; on ciphertext traffic (ciphertexts read as numbers) it is not.

use nalgebra::DMatrix;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::controllers::{eval_encrypted, ControlLaw, EncryptedControllerState};
use crate::encoding::{GroupEncoder, DEFAULT_SCALE};
use crate::error::{domain, Error, Result};
use crate::games::TRANSCRIPT_VERSION;
use crate::modarith::RngHandle;
use crate::schemes::{keygen, Ciphertext, PublicKey, SchemeId, SecretKey, SecurityParameter};

/// `argmin_F Σ‖u − F·y‖²` through the normal equations.
///
/// Returns the `q×ℓ` estimate, or [`Error::RankDeficient`] when the stacked
/// inputs do not have full column rank.
pub fn least_squares_estimation(samples: &[(Vec<f64>, Vec<f64>)]) -> Result<DMatrix<f64>> {
    let (l, q) = match samples.first() {
        Some((y, u)) => (y.len(), u.len()),
        None => return Err(Error::RankDeficient("no samples".into())),
    };
    if l == 0 || q == 0 {
        return Err(domain("samples must have non-empty y and u"));
    }
    if samples.iter().any(|(y, u)| y.len() != l || u.len() != q) {
        return Err(domain("samples have inconsistent dimensions"));
    }
    let n = samples.len();
    if n < l {
        return Err(Error::RankDeficient(format!("{n} samples cannot determine {l} columns")));
    }
    let y = DMatrix::from_fn(n, l, |i, j| samples[i].0[j]);
    let u = DMatrix::from_fn(n, q, |i, j| samples[i].1[j]);

    let sv = y.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let tol = n.max(l) as f64 * f64::EPSILON * smax;
    if smin.is_nan() || smin <= tol {
        return Err(Error::RankDeficient(format!(
            "stacked inputs have singular value {smin:e} below tolerance {tol:e}"
        )));
    }
    let gram = y.transpose() * &y;
    let rhs = y.transpose() * &u;
    let solution = gram
        .cholesky()
        .ok_or_else(|| Error::RankDeficient("normal equations are not positive definite".into()))?
        .solve(&rhs);
    Ok(solution.transpose())
}

/// Frobenius-norm relative error `‖F̂ − F‖ / ‖F‖`.
pub fn relative_error(estimate: &DMatrix<f64>, truth: &DMatrix<f64>) -> f64 {
    (estimate - truth).norm() / truth.norm()
}

/// A ciphertext read as a number: its first component over the ciphertext
/// modulus, centred on zero.
pub fn ciphertext_number(pk: &PublicKey, c: &Ciphertext) -> f64 {
    let modulus = pk.ciphertext_modulus().to_f64().unwrap_or(f64::INFINITY);
    c.parts[0].to_f64().unwrap_or(f64::INFINITY) / modulus - 0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EavesdropConfig {
    pub scheme_id: SchemeId,
    pub lambda: SecurityParameter,
    /// Row-major gain matrix `F ∈ ℝ^{q×ℓ}`; entries must be positive.
    pub gains: Vec<Vec<f64>>,
    pub samples: usize,
    pub scale: u64,
    pub seed: u64,
}

impl Default for EavesdropConfig {
    fn default() -> Self {
        Self {
            scheme_id: SchemeId::Multiplicative,
            lambda: SecurityParameter::default(),
            gains: vec![vec![2.0, 0.5], vec![0.25, 1.5]],
            samples: 50,
            scale: DEFAULT_SCALE,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EavesdropReport {
    pub version: u32,
    pub scheme_id: SchemeId,
    pub lambda: SecurityParameter,
    pub seed: u64,
    pub samples: usize,
    pub gains: Vec<Vec<f64>>,
    pub plaintext_estimate: Vec<Vec<f64>>,
    pub ciphertext_estimate: Vec<Vec<f64>>,
    pub plaintext_error: f64,
    pub ciphertext_error: f64,
    /// Largest deviation of the plant-side decrypted input from `F·y`
    /// (fixed-point rounding only).
    pub decrypted_max_error: f64,
    /// Whether a rank-deficient trace forced one regeneration.
    pub regenerated: bool,
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

struct Traces {
    plain: Vec<(Vec<f64>, Vec<f64>)>,
    cipher: Vec<(Vec<f64>, Vec<f64>)>,
    decrypted_max_error: f64,
}

/// Observes the same loop unencrypted and encrypted (static feedback over
/// the group scheme, plant-side decrypt-and-sum) and runs the estimator on
/// both traces.
pub fn eavesdrop_demo(config: &EavesdropConfig) -> Result<EavesdropReport> {
    let q = config.gains.len();
    let l = config.gains.first().map_or(0, Vec::len);
    if q == 0 || l == 0 || config.gains.iter().any(|row| row.len() != l) {
        return Err(domain("gains must be a non-empty rectangular matrix"));
    }
    if !config.scheme_id.uses_group() {
        return Err(domain(format!(
            "static feedback needs a multiplicative scheme, got {}",
            config.scheme_id
        )));
    }
    if config.gains.iter().flatten().any(|&f| !f.is_finite() || f <= 0.0) {
        return Err(domain("the group encoding represents positive gains only"));
    }
    let truth = DMatrix::from_fn(q, l, |i, j| config.gains[i][j]);
    let root = RngHandle::from_u64(config.seed);

    let mut regenerated = false;
    let mut attempt = 0;
    let (traces, plain_hat, cipher_hat) = loop {
        let traces = collect_traces(config, &truth, &root.child("trace", attempt))?;
        let estimates = least_squares_estimation(&traces.plain)
            .and_then(|p| least_squares_estimation(&traces.cipher).map(|c| (p, c)));
        match estimates {
            Ok((p, c)) => break (traces, p, c),
            Err(Error::RankDeficient(_)) if attempt == 0 => {
                regenerated = true;
                attempt += 1;
            }
            Err(e) => return Err(e),
        }
    };

    Ok(EavesdropReport {
        version: TRANSCRIPT_VERSION,
        scheme_id: config.scheme_id,
        lambda: config.lambda,
        seed: config.seed,
        samples: config.samples,
        gains: config.gains.clone(),
        plaintext_error: relative_error(&plain_hat, &truth),
        ciphertext_error: relative_error(&cipher_hat, &truth),
        plaintext_estimate: rows(&plain_hat),
        ciphertext_estimate: rows(&cipher_hat),
        decrypted_max_error: traces.decrypted_max_error,
        regenerated,
    })
}

fn collect_traces(config: &EavesdropConfig, truth: &DMatrix<f64>, rng: &RngHandle) -> Result<Traces> {
    let (q, l) = truth.shape();
    let keys = keygen(config.scheme_id, config.lambda, &mut rng.child("keygen", 0))?;
    let pk = &keys.pk;
    let group = pk.group().expect("group scheme").clone();
    let encoder = GroupEncoder::new(config.scale, group)?;
    let mut coins = rng.child("traffic", 0);

    let law = ControlLaw::static_feedback(q, l)?;
    let f_enc = truth.transpose().iter().map(|&f| encoder.encode(f)).collect::<Result<Vec<_>>>()?;
    let state = EncryptedControllerState::encrypt(law, pk, &f_enc.into(), &mut coins)?;

    let mut traces = Traces {
        plain: Vec::with_capacity(config.samples),
        cipher: Vec::with_capacity(config.samples),
        decrypted_max_error: 0.0,
    };
    for _ in 0..config.samples {
        let y: Vec<f64> = (0..l).map(|_| 0.5 + coins.unit_f64()).collect();
        let u: Vec<f64> = (truth * nalgebra::DVector::from_column_slice(&y)).iter().copied().collect();

        let cy = y
            .iter()
            .map(|&v| pk.encrypt(&encoder.encode(v)?, &mut coins))
            .collect::<Result<Vec<_>>>()?;
        let products = eval_encrypted(&state, &cy)?;
        let received = decrypt_and_aggregate_real(&keys.sk, &law, &products, &encoder)?;
        for (a, b) in received.iter().zip(&u) {
            traces.decrypted_max_error = traces.decrypted_max_error.max((a - b).abs());
        }

        let y_seen = cy.iter().map(|c| ciphertext_number(pk, c)).collect();
        let u_seen = products
            .chunks(l)
            .map(|row| row.iter().map(|c| ciphertext_number(pk, c)).sum())
            .collect();
        traces.plain.push((y, u));
        traces.cipher.push((y_seen, u_seen));
    }
    Ok(traces)
}

/// Plant side: decrypt each product, decode it at depth 2 and sum the rows.
fn decrypt_and_aggregate_real(
    sk: &SecretKey,
    law: &ControlLaw,
    products: &[Ciphertext],
    encoder: &GroupEncoder,
) -> Result<Vec<f64>> {
    // summing in Z_p (as decrypt_and_aggregate does) would add the embedded
    // squares, not the values, so decode each product before summing
    let width = products.len() / law.q;
    products
        .chunks(width)
        .map(|row| {
            row.iter()
                .map(|c| encoder.decode_scaled(&sk.decrypt(c)?, 2))
                .sum::<Result<f64>>()
        })
        .collect()
}

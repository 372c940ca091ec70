//! Seeded generators for test inputs.
//!
//! Each generator draws from its own ChaCha stream derived from the caller's
//! seed and a per-generator tag, so `random_density(n, s)` and
//! `random_tangent(n, s)` are independent draws.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{c, CMatrix, DensityMatrix, HermitianMatrix, KrausChannel, TangentVector};
use crate::error::{Error, Result};

/// Weight of `I/n` mixed into every generated density matrix.
pub const DENSITY_FLOOR_MIXING: f64 = 1e-3;

const TAG_DENSITY: u64 = 0x6465_6e73;
const TAG_HERMITIAN: u64 = 0x6865_726d;
const TAG_UNITARY: u64 = 0x756e_6974;
const TAG_KRAUS: u64 = 0x6b72_6175;

/// SplitMix64 finaliser over `(seed, stream)`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// `G G† / Tr(G G†)` mixed with `I/n` at weight `mixing`.
///
/// The smallest eigenvalue is at least `mixing / n`.
pub fn random_density_with_mixing(n: usize, seed: u64, mixing: f64) -> DensityMatrix {
    assert!(n >= 1, "dimension must be positive");
    assert!(
        (0.0..1.0).contains(&mixing) && mixing > 0.0,
        "mixing must be in (0, 1)"
    );
    let mut rng = seeded_rng(derive_seed(seed, TAG_DENSITY));
    let g = ginibre(n, n, &mut rng);
    let w = HermitianMatrix::from_matrix_lossy(&g * g.adjoint());
    let t = w.trace();
    let mixed = w
        .lincomb(
            (1.0 - mixing) / t,
            &HermitianMatrix::identity(n),
            mixing / n as f64,
        )
        .expect("same dimension");
    DensityMatrix::new(mixed).expect("mixture with I/n is a strictly positive state")
}

pub fn random_density(n: usize, seed: u64) -> DensityMatrix {
    random_density_with_mixing(n, seed, DENSITY_FLOOR_MIXING)
}

/// `(G + G†)/2` for a complex Gaussian `G`.
pub fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
    let mut rng = seeded_rng(derive_seed(seed, TAG_HERMITIAN));
    HermitianMatrix::from_matrix_lossy(ginibre(n, n, &mut rng))
}

pub fn random_tangent(n: usize, seed: u64) -> TangentVector {
    TangentVector::project(&random_hermitian(n, seed))
}

/// Haar-distributed isometry `C^cols → C^rows` (`rows ≥ cols`).
fn haar_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> CMatrix {
    let g = ginibre(rows, cols, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // fix the column phases so that diag(R) is positive; this makes Q Haar
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_unitary(n: usize, seed: u64) -> CMatrix {
    let mut rng = seeded_rng(derive_seed(seed, TAG_UNITARY));
    haar_isometry(n, n, &mut rng)
}

/// Channel from a Haar isometry `V: C^n_in → C^n_out ⊗ C^env_dim`.
///
/// Kraus operator `k` is the row block `k·n_out .. (k+1)·n_out` of `V`.
pub fn random_kraus_channel(n_in: usize, n_out: usize, env_dim: usize, seed: u64) -> Result<KrausChannel> {
    if n_in == 0 || n_out == 0 || env_dim == 0 {
        return Err(Error::InvalidArgument(
            "channel dimensions must be positive".into(),
        ));
    }
    if n_out * env_dim < n_in {
        return Err(Error::InvalidArgument(format!(
            "an isometry C^{n_in} -> C^{n_out}⊗C^{env_dim} needs n_out·env_dim >= n_in"
        )));
    }
    let mut rng = seeded_rng(derive_seed(seed, TAG_KRAUS));
    let v = haar_isometry(n_out * env_dim, n_in, &mut rng);
    let kraus = (0..env_dim)
        .map(|k| v.rows(k * n_out, n_out).into_owned())
        .collect();
    KrausChannel::new(n_in, n_out, kraus)
}

//! The embedded two-dimensional Markov chain of (patch count, debris count).
//!
//! Under uniform-over-patches selection, the pair `(Y_n, Z_n)` of the
//! evolving hypergraph is Markov: conditional on `Y_n = m ≥ 1`,
//!
//! ```text
//! Y_{n+1} = Y_n − 1 − W + U,      Z_{n+1} = Z_n + 1 + W,
//! W ~ Binomial(m − 1, 1/(N−n)),   U ~ Poisson((N−n−1) λ_2(N, n)),
//! ```
//!
//! independently, where `λ_2(N, n)` is the Poisson parameter of a fixed
//! 2-edge after n uniformly placed removals. Trajectories of this chain are
//! distributionally equivalent to the full engine's patch/debris counts and
//! cost O(N) instead of O(total edge size).

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::beta::BetaSeries;
use crate::hypergraph::poisson_u64;
use crate::{Error, Result};

/// State of the embedded chain after `n` removals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainState {
    pub n_vertices: usize,
    pub n: usize,
    pub y: u64,
    pub z: u64,
}

impl ChainState {
    pub fn is_absorbed(&self) -> bool {
        self.y == 0
    }
}

/// The W and U variates behind one transition.
#[derive(Debug, Clone, Copy)]
pub struct StepDraw {
    pub w: u64,
    pub u: u64,
}

/// Poisson parameter of a fixed 2-edge in the hypergraph induced by
/// removing `n` uniform vertices out of `n_vertices`:
///
/// ```text
/// λ_2(N, n) = N Σ_{i≥0} (i+1)(i+2) β_{i+2} ·
///             [n(n−1)…(n−i+1)] / [N(N−1)…(N−i−1)],
/// ```
///
/// accumulated with incremental running products, no factorials. Terms
/// vanish once `i` exhausts either `n` or the series support; the loop also
/// exits early when a term falls below 1e-18 of the running sum, a
/// truncation far below sampling noise.
pub fn lambda2(series: &BetaSeries, n_vertices: usize, n: usize) -> Result<f64> {
    if n_vertices < 2 || n > n_vertices - 2 {
        return Err(Error::Domain(format!(
            "lambda2 needs n <= N-2, got n = {n}, N = {n_vertices}"
        )));
    }
    let coeffs = series.coeffs();
    if coeffs.len() < 3 {
        return Ok(0.0);
    }
    let nf = n_vertices as f64;
    // prod_i = [n…(n−i+1)] / [N…(N−i−1)]; starts at 1/(N(N−1)) for i = 0.
    let mut prod = 1.0 / (nf * (nf - 1.0));
    let mut sum = 0.0;
    for i in 0..=(coeffs.len() - 3).min(n) {
        if i > 0 {
            prod *= (n - i + 1) as f64 / (nf - i as f64 - 1.0);
        }
        let beta_j = coeffs[i + 2];
        if beta_j > 0.0 {
            let term = ((i + 1) * (i + 2)) as f64 * beta_j * prod;
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
    }
    Ok(nf * sum)
}

/// Draws the initial state: `Y_0 ~ Poisson(N β_1)`, `Z_0 ~ Poisson(N β_0)`.
pub fn init<R: Rng + ?Sized>(
    series: &BetaSeries,
    n_vertices: usize,
    rng: &mut R,
) -> ChainState {
    let coeffs = series.coeffs();
    let beta0 = coeffs.first().copied().unwrap_or(0.0);
    let beta1 = coeffs.get(1).copied().unwrap_or(0.0);
    let nf = n_vertices as f64;
    ChainState {
        n_vertices,
        n: 0,
        y: poisson_u64(nf * beta1, rng),
        z: poisson_u64(nf * beta0, rng),
    }
}

/// One transition of the chain. Errors on an absorbed state.
pub fn step<R: Rng + ?Sized>(
    state: &ChainState,
    series: &BetaSeries,
    rng: &mut R,
) -> Result<(ChainState, StepDraw)> {
    if state.y == 0 {
        return Err(Error::Absorbed);
    }
    let n_vertices = state.n_vertices;
    if state.n >= n_vertices {
        return Err(Error::Domain(format!(
            "no vertices left to remove at n = {}",
            state.n
        )));
    }
    let remaining = n_vertices - state.n;
    let w = if state.y > 1 {
        Binomial::new(state.y - 1, 1.0 / remaining as f64)
            .expect("probability in (0,1]")
            .sample(rng)
    } else {
        0
    };
    // With one vertex left there is no room for a 2-edge and the Poisson
    // mean is zero by definition.
    let u = if remaining >= 2 {
        let mean = (remaining - 1) as f64 * lambda2(series, n_vertices, state.n)?;
        poisson_u64(mean, rng)
    } else {
        0
    };
    let next = ChainState {
        n_vertices,
        n: state.n + 1,
        y: state.y - 1 - w + u,
        z: state.z + 1 + w,
    };
    debug_assert_eq!(next.y + next.z, state.y + state.z + u);
    debug_assert_eq!(next.z - state.z, 1 + w);
    Ok((next, StepDraw { w, u }))
}

/// A completed chain trajectory.
#[derive(Debug, Clone)]
pub struct ChainRun {
    /// (Y, Z) per step including the initial state, when recording was on.
    pub trajectory: Option<Vec<[u64; 2]>>,
    /// First n with Y = 0; the identifiable vertex count.
    pub v_star: u64,
    /// Z at absorption; the identifiable hyperedge count.
    pub lambda_star: u64,
    pub initial_y: u64,
    pub initial_z: u64,
}

/// Runs the chain from a fresh initial state until absorption (Y = 0,
/// which occurs by n = N at the latest). Terminal-only mode allocates O(1).
pub fn run<R: Rng + ?Sized>(
    series: &BetaSeries,
    n_vertices: usize,
    rng: &mut R,
    record: bool,
) -> Result<ChainRun> {
    let mut state = init(series, n_vertices, rng);
    let initial_y = state.y;
    let initial_z = state.z;
    let mut trajectory = record.then(|| {
        let mut t = Vec::with_capacity(n_vertices / 2);
        t.push([state.y, state.z]);
        t
    });
    while state.y > 0 {
        let (next, _) = step(&state, series, rng)?;
        state = next;
        if let Some(t) = trajectory.as_mut() {
            t.push([state.y, state.z]);
        }
    }
    Ok(ChainRun {
        trajectory,
        v_star: state.n as u64,
        lambda_star: state.z,
        initial_y,
        initial_z,
    })
}

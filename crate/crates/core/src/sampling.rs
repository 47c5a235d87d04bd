//! Seeded, chunked sampling of boundary pairs and admissible triples.
//!
//! Samples are produced in fixed-size chunks, each from its own ChaCha stream
//! keyed by `(seed, stream, chunk)`. Level `L` uses the first
//! `chunks_for_level(L)` chunks, so sample sets are nested across levels and
//! independent of the number of worker threads.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::geometry::{BoundaryManifold, BoundaryPoint, Param};
use crate::Vec3;

/// Samples per chunk.
pub const CHUNK: usize = 256;

/// Default floor for pair separations, relative to the diameter.
pub const PAIR_FLOOR: f64 = 1e-6;

/// Number of chunks used at a refinement level.
pub fn chunks_for_level(level: u32) -> u64 {
    4u64 << level
}

#[derive(Debug, Clone, Copy)]
pub struct PairSample {
    pub x: BoundaryPoint,
    pub y: BoundaryPoint,
    pub dist: f64,
}

/// `(x', x'', y)` with `|x' - y| >= 2 |x' - x''|`.
#[derive(Debug, Clone, Copy)]
pub struct TripleSample {
    pub x1: BoundaryPoint,
    pub x2: BoundaryPoint,
    pub y: BoundaryPoint,
    pub d12: f64,
    pub d1y: f64,
    pub d2y: f64,
}

impl TripleSample {
    /// `(1/2)|x'-y| <= |x''-y| <= 2|x'-y|`.
    pub fn comparison_holds(&self) -> bool {
        0.5 * self.d1y <= self.d2y && self.d2y <= 2.0 * self.d1y
    }
}

/// Stream identifiers keep pair, triple and node samples independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Pairs = 1,
    Triples = 2,
    Values = 3,
}

#[derive(Debug, Clone)]
pub struct Sampler<'a> {
    m: &'a BoundaryManifold,
    seed: u64,
    floor: f64,
}

fn chunk_rng(seed: u64, stream: Stream, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 48) ^ chunk);
    rng
}

impl<'a> Sampler<'a> {
    pub fn new(m: &'a BoundaryManifold, seed: u64) -> Self {
        Self { m, seed, floor: PAIR_FLOOR }
    }

    /// Sets the smallest separation, relative to the diameter.
    pub fn with_floor(mut self, floor: f64) -> Self {
        self.floor = floor;
        self
    }

    pub fn manifold(&self) -> &BoundaryManifold {
        self.m
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    fn random_param(&self, rng: &mut ChaCha8Rng) -> Param {
        if self.m.dim() == 2 {
            Param::Angle(rng.gen_range(0.0..2.0 * PI))
        } else {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..2.0 * PI);
            let s = (1.0 - z * z).sqrt();
            Param::Dir(Vec3::new(s * phi.cos(), s * phi.sin(), z))
        }
    }

    /// Parameter displaced from `p` by roughly `dist` in a random direction.
    fn displaced(&self, p: &Param, dist: f64, rng: &mut ChaCha8Rng) -> Param {
        let tang = self.m.tangents(p);
        if self.m.dim() == 2 {
            let step = (dist / tang[0].norm()).min(PI);
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            self.m.offset(p, &[sign * step])
        } else {
            let psi: f64 = rng.gen_range(0.0..2.0 * PI);
            let scale = (tang[0].norm() * tang[1].norm()).sqrt();
            let step = (dist / scale).min(PI);
            self.m.offset(p, &[step * psi.cos(), step * psi.sin()])
        }
    }

    /// Log-uniform value in `[lo, hi]`.
    fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return lo;
        }
        (lo.ln() + rng.gen::<f64>() * (hi.ln() - lo.ln())).exp()
    }

    pub fn distance(&self, p: &Param, q: &Param) -> f64 {
        self.m.chord(p, q).norm()
    }

    /// Pairs with separations log-uniform between `floor * diam` and `diam`.
    pub fn pair_chunk(&self, chunk: u64) -> Vec<PairSample> {
        let mut rng = chunk_rng(self.seed, Stream::Pairs, chunk);
        let diam = self.m.diameter();
        let mut out = Vec::with_capacity(CHUNK);
        while out.len() < CHUNK {
            let p = self.random_param(&mut rng);
            let target = Self::log_uniform(&mut rng, self.floor * diam, diam);
            let q = self.displaced(&p, target, &mut rng);
            let dist = self.distance(&p, &q);
            if dist > 0.0 && dist.is_finite() {
                out.push(PairSample { x: self.m.point(&p), y: self.m.point(&q), dist });
            }
        }
        out
    }

    /// Admissible triples. `|x'-y|` is log-uniform between
    /// `2 floor * diam` and `diam`; half of the time `|x'-y| / |x'-x''|` is
    /// uniform in `[2, 4]`, where difference quotients peak, otherwise
    /// `|x'-x''|` is log-uniform down to `floor * diam`. Candidates failing
    /// the admissibility test are discarded.
    pub fn triple_chunk(&self, chunk: u64) -> Vec<TripleSample> {
        let mut rng = chunk_rng(self.seed, Stream::Triples, chunk);
        let diam = self.m.diameter();
        let lo = self.floor * diam;
        let mut out = Vec::with_capacity(CHUNK);
        while out.len() < CHUNK {
            let p1 = self.random_param(&mut rng);
            let target = Self::log_uniform(&mut rng, 2.0 * lo, diam);
            let q = if rng.gen_bool(0.1) { self.random_param(&mut rng) } else { self.displaced(&p1, target, &mut rng) };
            let d1y = self.distance(&p1, &q);
            if d1y < 2.0 * lo {
                continue;
            }
            let d = if rng.gen_bool(0.5) { d1y / rng.gen_range(2.0..4.0) } else { Self::log_uniform(&mut rng, lo, 0.5 * d1y) };
            let p2 = self.displaced(&p1, d, &mut rng);
            let d12 = self.distance(&p1, &p2);
            if d12 <= 0.0 || d1y < 2.0 * d12 {
                continue;
            }
            let d2y = self.distance(&p2, &q);
            out.push(TripleSample {
                x1: self.m.point(&p1),
                x2: self.m.point(&p2),
                y: self.m.point(&q),
                d12,
                d1y,
                d2y,
            });
        }
        out
    }

    /// Uniformly distributed boundary points.
    pub fn point_chunk(&self, chunk: u64) -> Vec<BoundaryPoint> {
        let mut rng = chunk_rng(self.seed, Stream::Values, chunk);
        (0..CHUNK).map(|_| self.m.point(&self.random_param(&mut rng))).collect()
    }
}

/// Best value found so far together with the configuration that produced it.
#[derive(Debug, Clone)]
pub struct Witness<T> {
    pub value: f64,
    pub at: T,
}

/// Maximum of `f` over chunks `range`, evaluated in parallel and merged in
/// chunk order, so the result does not depend on the thread count. Ties keep
/// the earliest chunk.
pub fn par_max<T, E, F>(range: std::ops::Range<u64>, f: F) -> Result<Option<Witness<T>>, E>
where
    T: Send,
    E: Send,
    F: Fn(u64) -> Result<Option<Witness<T>>, E> + Sync,
{
    let parts: Vec<Result<Option<Witness<T>>, E>> = range.into_par_iter().map(&f).collect();
    let mut best: Option<Witness<T>> = None;
    for part in parts {
        if let Some(w) = part? {
            if best.as_ref().map_or(true, |b| w.value > b.value) {
                best = Some(w);
            }
        }
    }
    Ok(best)
}

/// Drift between two estimates: `|a - b| / max(|a|, |b|)`, or zero when both
/// lie below `zero_floor`.
pub fn relative_drift(a: f64, b: f64, zero_floor: f64) -> f64 {
    let m = a.abs().max(b.abs());
    if m <= zero_floor {
        0.0
    } else {
        (a - b).abs() / m
    }
}

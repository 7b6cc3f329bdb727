//! Uniform point generation: Sobol' digital nets with a random linear
//! (lower-triangular) matrix scramble plus digital shift, and a seeded
//! pseudo-random generator.
//!
//! The direction numbers are the Joe–Kuo `new-joe-kuo-6` set shipped in
//! `data/new-joe-kuo-1024.txt`. Each row reads `d s a m_1 .. m_s`: the
//! dimension, the degree of the primitive polynomial, its interior
//! coefficients packed as an integer, and the initial direction integers.
//! Dimension 1 (the van der Corput sequence) is implicit.

use std::sync::OnceLock;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const BITS: usize = 32;
const SCALE: f64 = 1.0 / 4_294_967_296.0; // 2^-32

/// Smallest coordinate ever emitted; the largest is `1 - EPS`.
pub const EPS: f64 = SCALE;

static TABLE_TEXT: &str = include_str!("../data/new-joe-kuo-1024.txt");
static TABLE: OnceLock<Vec<Vec<u32>>> = OnceLock::new();

/// Clamp into `[EPS, 1 - EPS]` so inverse-CDF maps stay finite.
#[inline]
pub fn clamp_open(u: f64) -> f64 {
    u.clamp(EPS, 1.0 - EPS)
}

/// Number of dimensions covered by the bundled direction numbers.
pub fn max_dimension() -> usize {
    direction_table().len()
}

fn direction_table() -> &'static [Vec<u32>] {
    TABLE.get_or_init(|| {
        let mut dirs = vec![(1..=BITS).map(|k| 1u32 << (BITS - k)).collect::<Vec<_>>()];
        for line in TABLE_TEXT.lines().skip(1) {
            let fields: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse().expect("direction table is well formed"))
                .collect();
            let s = fields[1] as usize;
            let a = fields[2];
            let m = &fields[3..3 + s];
            dirs.push(directions_from_polynomial(s, a, m));
        }
        dirs
    })
}

fn directions_from_polynomial(s: usize, a: u32, m: &[u32]) -> Vec<u32> {
    let mut v = vec![0u32; BITS];
    for k in 0..s.min(BITS) {
        v[k] = m[k] << (BITS - 1 - k);
    }
    for k in s..BITS {
        let mut value = v[k - s] ^ (v[k - s] >> s);
        for j in 1..s {
            if (a >> (s - 1 - j)) & 1 == 1 {
                value ^= v[k - j];
            }
        }
        v[k] = value;
    }
    v
}

/// Seed for a randomized point set. The same pair always produces the same
/// points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScrambleSeed {
    pub seed: u64,
    pub replicate_index: u64,
}

impl ScrambleSeed {
    pub fn new(seed: u64, replicate_index: u64) -> Self {
        Self {
            seed,
            replicate_index,
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.replicate_index);
        rng
    }
}

/// An `n x d` batch of points in the open unit cube, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl PointSet {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                got: values.len(),
            });
        }
        Ok(Self { n, d, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }
}

/// Gray-code Sobol' generator over 32-bit digits, optionally scrambled.
///
/// Point `i` is the XOR of the direction integers selected by the bits of
/// `gray(i) = i ^ (i >> 1)`, so index 0 is the origin (or the digital shift
/// once scrambled).
#[derive(Clone, Debug)]
pub struct Sobol {
    d: usize,
    /// `dirs[j * BITS + k]`: direction integer `k` of dimension `j`.
    dirs: Vec<u32>,
    shift: Vec<u32>,
    state: Vec<u32>,
    index: u64,
}

impl Sobol {
    /// Unscrambled generator positioned at index 0.
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter {
                name: "d",
                reason: "dimension must be at least 1".into(),
            });
        }
        let table = direction_table();
        if d > table.len() {
            return Err(Error::DimensionExceedsTable {
                requested: d,
                available: table.len(),
            });
        }
        let dirs = table[..d].iter().flatten().copied().collect();
        Ok(Self {
            d,
            dirs,
            shift: vec![0; d],
            state: vec![0; d],
            index: 0,
        })
    }

    /// Generator with a random lower-triangular linear scramble (unit
    /// diagonal) and a uniform digital shift in every dimension.
    pub fn scrambled(d: usize, seed: ScrambleSeed) -> Result<Self> {
        let mut sobol = Self::new(d)?;
        let mut rng = seed.rng();
        for j in 0..d {
            let rows = random_lower_triangular(&mut rng);
            for v in &mut sobol.dirs[j * BITS..(j + 1) * BITS] {
                *v = apply_linear_scramble(&rows, *v);
            }
            sobol.shift[j] = rng.next_u32();
        }
        sobol.state.copy_from_slice(&sobol.shift);
        Ok(sobol)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Index of the next point to be emitted.
    pub fn index(&self) -> u64 {
        self.index
    }

    /// Jump to an arbitrary index.
    pub fn seek(&mut self, index: u64) {
        let gray = index ^ (index >> 1);
        for j in 0..self.d {
            let mut x = self.shift[j];
            for k in 0..BITS.min(64) {
                if (gray >> k) & 1 == 1 {
                    x ^= self.dirs[j * BITS + k];
                }
            }
            self.state[j] = x;
        }
        self.index = index;
    }

    /// Write the current point into `out` and advance.
    pub fn next_into(&mut self, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.d);
        for (o, &x) in out.iter_mut().zip(&self.state) {
            *o = clamp_open(x as f64 * SCALE);
        }
        let c = self.index.trailing_ones() as usize;
        assert!(c < BITS, "Sobol' index exhausted 32-bit digits");
        for j in 0..self.d {
            self.state[j] ^= self.dirs[j * BITS + c];
        }
        self.index += 1;
    }

    /// Integer digits of the current point (before scaling), for tests.
    pub fn current_digits(&self) -> &[u32] {
        &self.state
    }

    pub fn take(&mut self, n: usize) -> PointSet {
        let mut values = vec![0.0; n * self.d];
        for row in values.chunks_exact_mut(self.d) {
            self.next_into(row);
        }
        PointSet {
            n,
            d: self.d,
            values,
        }
    }
}

fn random_lower_triangular(rng: &mut ChaCha8Rng) -> [u32; BITS] {
    // Row for output digit j (bit 31 - j) may use input digits 0..=j.
    let mut rows = [0u32; BITS];
    for (j, row) in rows.iter_mut().enumerate() {
        let diag = 1u32 << (BITS - 1 - j);
        let above = if j == 0 { 0 } else { !0u32 << (BITS - j) };
        *row = (rng.next_u32() & above) | diag;
    }
    rows
}

#[inline]
fn apply_linear_scramble(rows: &[u32; BITS], x: u32) -> u32 {
    rows.iter().enumerate().fold(0u32, |acc, (j, &row)| {
        acc | (((row & x).count_ones() & 1) << (BITS - 1 - j))
    })
}

/// First `n` unscrambled Sobol' points, skipping the origin (index 0).
pub fn sobol_raw(n: usize, d: usize) -> Result<PointSet> {
    let mut sobol = Sobol::new(d)?;
    sobol.seek(1);
    Ok(sobol.take(n))
}

/// First `n` points of a scrambled Sobol' net. The origin is kept: after
/// the digital shift it is an ordinary uniform point, and keeping it makes
/// every `n = 2^k` prefix a full net.
pub fn scrambled_sobol(n: usize, d: usize, seed: ScrambleSeed) -> Result<PointSet> {
    Ok(Sobol::scrambled(d, seed)?.take(n))
}

/// Seeded pseudo-random uniform stream (ChaCha8, one stream per replicate).
#[derive(Clone, Debug)]
pub struct PseudoUniform {
    d: usize,
    rng: ChaCha8Rng,
}

impl PseudoUniform {
    pub fn new(d: usize, seed: ScrambleSeed) -> Self {
        Self { d, rng: seed.rng() }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn next_into(&mut self, out: &mut [f64]) {
        for o in out.iter_mut() {
            // 53 random bits, offset by half a unit so 0 is never produced
            let bits = self.rng.random::<u64>() >> 11;
            *o = clamp_open((bits as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0));
        }
    }
}

/// `n` i.i.d. uniform points.
pub fn pseudo_uniform(n: usize, d: usize, seed: ScrambleSeed) -> PointSet {
    let mut gen = PseudoUniform::new(d, seed);
    let mut values = vec![0.0; n * d];
    for row in values.chunks_exact_mut(d.max(1)) {
        gen.next_into(row);
    }
    PointSet { n, d, values }
}

/// Streaming source of points, either scrambled Sobol' or pseudo-random.
#[derive(Clone, Debug)]
pub enum PointSource {
    Sobol(Box<Sobol>),
    Pseudo(Box<PseudoUniform>),
}

impl PointSource {
    pub fn scrambled_sobol(d: usize, seed: ScrambleSeed) -> Result<Self> {
        Ok(Self::Sobol(Box::new(Sobol::scrambled(d, seed)?)))
    }

    pub fn pseudo(d: usize, seed: ScrambleSeed) -> Self {
        Self::Pseudo(Box::new(PseudoUniform::new(d, seed)))
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Sobol(s) => s.dim(),
            Self::Pseudo(p) => p.dim(),
        }
    }

    #[inline]
    pub fn next_into(&mut self, out: &mut [f64]) {
        match self {
            Self::Sobol(s) => s.next_into(out),
            Self::Pseudo(p) => p.next_into(out),
        }
    }
}

//! Fixed-length bit-string genomes and the variation operators used by the
//! engine: uniform initialization, standard bit mutation and uniform
//! crossover.
//!
//! Every operator is generic over [`rand::Rng`], so tests can drive them
//! with rigged sources. Production runs use [`RandomSource`], a seeded
//! ChaCha stream whose output depends only on `(seed, stream)`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

/// A bit string of fixed length, packed into 64-bit words.
///
/// Bits beyond `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Genome {
    words: Vec<u64>,
    len: usize,
}

impl Genome {
    pub fn zeros(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::param("genome length must be at least 1"));
        }
        Ok(Genome {
            words: vec![0; len.div_ceil(WORD_BITS)],
            len,
        })
    }

    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        let mut g = Genome::zeros(bits.len())?;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                g.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        Ok(g)
    }

    /// Uniformly random genome: each bit is 0 or 1 with probability 1/2.
    ///
    /// Bits are drawn a word at a time from `next_u64`, lowest bit first.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Result<Self> {
        let mut g = Genome::zeros(len)?;
        for w in g.words.iter_mut() {
            *w = rng.next_u64();
        }
        g.clear_tail();
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of ones among positions `start..end`.
    pub fn count_ones_in(&self, start: usize, end: usize) -> usize {
        assert!(start <= end && end <= self.len);
        if start == end {
            return 0;
        }
        let (first, last) = (start / WORD_BITS, (end - 1) / WORD_BITS);
        let mut total = 0;
        for wi in first..=last {
            let mut w = self.words[wi];
            if wi == first {
                w &= u64::MAX << (start % WORD_BITS);
            }
            if wi == last {
                let hi = end - wi * WORD_BITS;
                if hi < WORD_BITS {
                    w &= (1u64 << hi) - 1;
                }
            }
            total += w.count_ones() as usize;
        }
        total
    }

    pub fn hamming_distance(&self, other: &Genome) -> usize {
        assert_eq!(self.len, other.len, "hamming distance needs equal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Standard bit mutation: returns a copy in which every bit is flipped
    /// independently with probability `flip_prob`.
    pub fn mutate<R: Rng + ?Sized>(&self, flip_prob: f64, rng: &mut R) -> Result<Genome> {
        check_probability("flip probability", flip_prob)?;
        let mut child = self.clone();
        for i in 0..self.len {
            if rng.random_bool(flip_prob) {
                child.flip(i);
            }
        }
        Ok(child)
    }

    fn clear_tail(&mut self) {
        let used = self.len % WORD_BITS;
        if used != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << used) - 1;
            }
        }
    }
}

/// Uniform crossover: at each position the two parents' bits are exchanged
/// between the children with probability `swap_prob`.
pub fn uniform_crossover<R: Rng + ?Sized>(
    a: &Genome,
    b: &Genome,
    swap_prob: f64,
    rng: &mut R,
) -> Result<(Genome, Genome)> {
    if a.len != b.len {
        return Err(Error::param(format!(
            "crossover parents differ in length ({} vs {})",
            a.len, b.len
        )));
    }
    check_probability("swap probability", swap_prob)?;
    let (mut c1, mut c2) = (a.clone(), b.clone());
    for i in 0..a.len {
        if rng.random_bool(swap_prob) {
            let (x, y) = (a.get(i), b.get(i));
            c1.set(i, y);
            c2.set(i, x);
        }
    }
    Ok((c1, c2))
}

fn check_probability(what: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param(format!("{what} {p} is outside [0, 1]")))
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genome({self})")
    }
}

impl FromStr for Genome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidInput(format!("'{other}' is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Genome::from_bits(&bits)
    }
}

/// Seeded random stream owned by exactly one run.
///
/// `for_run(master, index)` selects ChaCha stream `index` under key
/// `master`, so every run of a sweep gets an independent, replayable
/// sequence regardless of how runs are scheduled.
#[derive(Clone, Debug)]
pub struct RandomSource {
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        RandomSource {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn for_run(master_seed: u64, run_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(run_index);
        RandomSource { rng }
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

//! Exact infinite-volume oracle for one-dimensional finite-range potentials.
//!
//! Spins are grouped into blocks of `r` consecutive sites (`r` at least the
//! range); the infinite-volume Gibbs measure is the stationary Markov chain on
//! blocks induced by the transfer matrix.

use crate::error::{Error, Result};
use crate::lattice::Volume;
use crate::numeric::{xlogx, Odometer};
use crate::potential::{LocalAlphabet, Potential};
use crate::table::{symbols_of, ProbTable};

const MAX_BLOCK_STATES: usize = 1 << 12;

/// The stationary block chain of a d=1 potential.
#[derive(Clone, Debug)]
pub struct TransferChain {
    alphabet: LocalAlphabet,
    q: usize,
    block: usize,
    log_lambda: f64,
    /// Row-major `states × q`: probability of appending each symbol.
    step: Vec<f64>,
    stationary: Vec<f64>,
}

impl TransferChain {
    pub fn new(phi: &Potential) -> Result<Self> {
        Self::with_block(phi, (phi.range() as usize).max(1))
    }

    /// Chain on blocks of `block` spins (`block` must be at least the range and positive).
    pub fn with_block(phi: &Potential, block: usize) -> Result<Self> {
        if phi.dim() != 1 {
            return Err(Error::Unsupported("transfer chains exist only in d = 1".into()));
        }
        if block == 0 || block < phi.range() as usize {
            return Err(Error::InvalidArgument(format!(
                "block length {block} is shorter than the range {}",
                phi.range()
            )));
        }
        let q = phi.q();
        let states = q.checked_pow(block as u32).filter(|&s| s <= MAX_BLOCK_STATES).ok_or_else(|| {
            Error::StateSpaceTooLarge {
                configs: (q as f64).powi(block as i32),
                cap: MAX_BLOCK_STATES,
            }
        })?;
        // weight[b * q + s]: exp(-energy of terms whose leftmost site is the first of (b, s))
        let mut weight = vec![0.0; states * q];
        let mut window = vec![0u8; block + 1];
        let mut odo = Odometer::new(vec![q; block + 1]);
        let mut k = 0;
        while odo.advance().is_some() {
            for (w, &d) in window.iter_mut().zip(odo.digits()) {
                *w = d as u8;
            }
            let mut e = 0.0;
            for t in phi.terms() {
                let syms: Vec<u8> = t.shape().iter().map(|s| window[s.coords()[0] as usize]).collect();
                e += t.value(&syms, q);
            }
            weight[k] = (-e).exp();
            k += 1;
        }
        let next = |b: usize, s: usize| (b * q + s) % states;
        let apply = |v: &[f64]| -> Vec<f64> {
            (0..states)
                .map(|b| (0..q).map(|s| weight[b * q + s] * v[next(b, s)]).sum())
                .collect()
        };
        let apply_left = |u: &[f64]| -> Vec<f64> {
            let mut out = vec![0.0; states];
            for b in 0..states {
                for s in 0..q {
                    out[next(b, s)] += u[b] * weight[b * q + s];
                }
            }
            out
        };
        let (right, lambda) = power_iteration(states, apply)?;
        let (left, _) = power_iteration(states, apply_left)?;
        let mut step = vec![0.0; states * q];
        for b in 0..states {
            for s in 0..q {
                step[b * q + s] = weight[b * q + s] * right[next(b, s)] / (lambda * right[b]);
            }
            let row: f64 = step[b * q..(b + 1) * q].iter().sum();
            for p in &mut step[b * q..(b + 1) * q] {
                *p /= row;
            }
        }
        let mut stationary: Vec<f64> = left.iter().zip(&right).map(|(u, v)| u * v).collect();
        let total: f64 = stationary.iter().sum();
        for p in stationary.iter_mut() {
            *p /= total;
        }
        Ok(TransferChain {
            alphabet: phi.alphabet().clone(),
            q,
            block,
            log_lambda: lambda.ln(),
            step,
            stationary,
        })
    }

    pub fn block(&self) -> usize {
        self.block
    }

    pub fn alphabet(&self) -> &LocalAlphabet {
        &self.alphabet
    }

    /// Logarithm of the largest eigenvalue of the transfer matrix (the pressure).
    pub fn log_lambda(&self) -> f64 {
        self.log_lambda
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    fn states(&self) -> usize {
        self.stationary.len()
    }

    /// Probability of moving from block `b` to the block obtained by appending `s`.
    pub fn step(&self, b: usize, s: u8) -> f64 {
        self.step[b * self.q + s as usize]
    }

    fn next(&self, b: usize, s: u8) -> usize {
        (b * self.q + s as usize) % self.states()
    }

    /// Entropy per site of the chain.
    pub fn entropy_rate(&self) -> f64 {
        -(0..self.states())
            .map(|b| self.stationary[b] * (0..self.q as u8).map(|s| xlogx(self.step(b, s))).sum::<f64>())
            .sum::<f64>()
    }

    /// Index of the block in which every spin is the symbol `sym`.
    fn constant_block(&self, sym: u8) -> usize {
        (0..self.block).fold(0, |acc, _| acc * self.q + sym as usize)
    }

    /// `lim -(1/n) log ν(+_{Λ_n})`.
    pub fn e_plus(&self) -> Result<f64> {
        let plus = self.alphabet.encode(1, None)?;
        Ok(-self.step(self.constant_block(plus), plus).ln())
    }

    /// `log ν(σ_W)` for a window of consecutive spins given as symbols.
    pub fn log_prob(&self, symbols: &[u8]) -> f64 {
        let r = self.block;
        if symbols.len() < r {
            return self.short_marginal(symbols).ln();
        }
        let mut b = symbols[..r].iter().fold(0, |acc, &s| acc * self.q + s as usize);
        let mut lp = self.stationary[b].ln();
        for &s in &symbols[r..] {
            lp += self.step(b, s).ln();
            b = self.next(b, s);
        }
        lp
    }

    fn short_marginal(&self, symbols: &[u8]) -> f64 {
        let rest = self.block - symbols.len();
        let head = symbols.iter().fold(0, |acc, &s| acc * self.q + s as usize);
        let span = self.q.pow(rest as u32);
        (0..span).map(|t| self.stationary[head * span + t]).sum()
    }

    /// Exact law of the spins on an interval of consecutive sites.
    pub fn window_table(&self, vol: &Volume) -> Result<ProbTable> {
        check_interval(vol)?;
        let n = vol.len();
        crate::energy::check_cap((self.q as f64).powi(n as i32))?;
        let probs = (0..self.q.pow(n as u32))
            .map(|i| self.log_prob(&symbols_of(i, self.q, n)).exp())
            .collect();
        ProbTable::new(vol.clone(), self.alphabet.clone(), probs)
    }

    /// Shannon entropy of a window of `len` consecutive spins.
    pub fn window_entropy(&self, len: usize) -> f64 {
        if len < self.block {
            let span = self.q.pow((self.block - len) as u32);
            let heads = self.q.pow(len as u32);
            return -(0..heads)
                .map(|h| xlogx((0..span).map(|t| self.stationary[h * span + t]).sum()))
                .sum::<f64>();
        }
        let head = -self.stationary.iter().map(|&p| xlogx(p)).sum::<f64>();
        head + (len - self.block) as f64 * self.entropy_rate()
    }

    /// Relative entropy `Σ μ log(μ/ν)` of two chains on a window of `len` consecutive spins.
    pub fn window_relative_entropy(&self, other: &TransferChain, len: usize) -> Result<f64> {
        if self.block != other.block || self.q != other.q {
            return Err(Error::InvalidArgument("chains must share block length and alphabet".into()));
        }
        if len < self.block {
            let table = |c: &TransferChain| -> Vec<f64> {
                (0..self.q.pow(len as u32))
                    .map(|i| c.short_marginal(&symbols_of(i, self.q, len)))
                    .collect()
            };
            return Ok(kl(&table(self), &table(other)));
        }
        let head = kl(&self.stationary, &other.stationary);
        let per_step: f64 = (0..self.states())
            .map(|b| {
                let p = &self.step[b * self.q..(b + 1) * self.q];
                let o = &other.step[b * self.q..(b + 1) * self.q];
                self.stationary[b] * kl(p, o)
            })
            .sum();
        Ok(head + (len - self.block) as f64 * per_step)
    }

    /// `Σ_ξ λ(ξ) log ν(ξ)` where `λ` is this chain's window law and `ν` is `other`'s.
    pub fn window_cross_log(&self, other: &TransferChain, len: usize) -> Result<f64> {
        Ok(-self.window_entropy(len) - self.window_relative_entropy(other, len)?)
    }
}

fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .map(|(&a, &b)| if a == 0.0 { 0.0 } else { a * (a / b).ln() })
        .sum()
}

pub(crate) fn check_interval(vol: &Volume) -> Result<()> {
    if vol.dim() != 1 {
        return Err(Error::Unsupported("chain windows exist only in d = 1".into()));
    }
    let c: Vec<i32> = vol.sites().iter().map(|s| s.coords()[0]).collect();
    if c.windows(2).any(|w| w[1] != w[0] + 1) {
        return Err(Error::InvalidArgument("chain windows must be intervals".into()));
    }
    Ok(())
}

/// Dominant eigenpair of a positive linear map, normalized to unit sum.
fn power_iteration(n: usize, apply: impl Fn(&[f64]) -> Vec<f64>) -> Result<(Vec<f64>, f64)> {
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda = 0.0;
    for _ in 0..200_000 {
        let w = apply(&v);
        let total: f64 = w.iter().sum();
        let next: Vec<f64> = w.iter().map(|x| x / total).collect();
        let change = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        lambda = total;
        if change < 1e-15 {
            break;
        }
    }
    if !(lambda > 0.0) || v.iter().any(|x| !(*x > 0.0)) {
        return Err(Error::InvalidArgument("transfer matrix is not positive".into()));
    }
    // eigenvalue from the converged vector
    let w = apply(&v);
    Ok((v, w.iter().sum()))
}

//! Small numerical helpers shared by the table code.

/// `log Σ exp(x_i)`, stable for large magnitudes.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Boltzmann weights `exp(-E)/Z` and `log Z` from a list of energies.
pub fn boltzmann(energies: &[f64]) -> (Vec<f64>, f64) {
    let neg: Vec<f64> = energies.iter().map(|e| -e).collect();
    let log_z = log_sum_exp(&neg);
    let probs = neg.iter().map(|x| (x - log_z).exp()).collect();
    (probs, log_z)
}

/// `p log p` with `0 log 0 = 0`.
pub fn xlogx(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * p.ln()
    }
}

/// Shannon entropy in nats.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs.iter().map(|&p| xlogx(p)).sum::<f64>()
}

/// Total variation distance `max_A |P(A) - Q(A)|`.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let pos: f64 = p.iter().zip(q).map(|(a, b)| (a - b).max(0.0)).sum();
    let neg: f64 = p.iter().zip(q).map(|(a, b)| (b - a).max(0.0)).sum();
    pos.max(neg)
}

/// Wilson score interval for a binomial proportion at `z` standard deviations.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// A real value or `+∞`, as relative entropies and specific energies may be.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    /// The value as a float, `f64::INFINITY` for the infinite case.
    pub fn value(&self) -> f64 {
        match self {
            Extended::Finite(v) => *v,
            Extended::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(*v),
            Extended::Infinite => None,
        }
    }

    pub fn map(self, f: impl FnOnce(f64) -> f64) -> Extended {
        match self {
            Extended::Finite(v) => Extended::Finite(f(v)),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

impl std::ops::Add for Extended {
    type Output = Extended;

    fn add(self, rhs: Extended) -> Extended {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinite,
        }
    }
}

impl std::fmt::Display for Extended {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::Infinite => write!(f, "inf"),
        }
    }
}

/// Mixed-radix odometer over per-position radices; the last position is least significant.
pub(crate) struct Odometer {
    radices: Vec<usize>,
    digits: Vec<usize>,
    started: bool,
}

impl Odometer {
    pub fn new(radices: Vec<usize>) -> Self {
        let n = radices.len();
        Odometer {
            radices,
            digits: vec![0; n],
            started: false,
        }
    }

    pub fn total(&self) -> f64 {
        self.radices.iter().map(|&r| r as f64).product()
    }

    /// Advance; returns the lowest position index that changed, or `None` when exhausted.
    /// The first call yields the all-zero state and reports position 0.
    pub fn advance(&mut self) -> Option<usize> {
        if !self.started {
            self.started = true;
            if self.radices.iter().any(|&r| r == 0) {
                return None;
            }
            return Some(0);
        }
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                return Some(i);
            }
            self.digits[i] = 0;
        }
        None
    }

    pub fn digits(&self) -> &[usize] {
        &self.digits
    }
}

//! Translation-invariant finite-range potentials and the operations on them.

use std::collections::BTreeMap;

use rand::Rng;

use crate::energy::{Interactions, ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::lattice::{cube, Config, Site, Volume};
use crate::numeric::Odometer;
use crate::unionfind::UnionFind;

/// A finite ordered set of single-site values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    values: Vec<i8>,
}

impl Alphabet {
    pub fn new(mut values: Vec<i8>) -> Result<Self> {
        values.sort_unstable();
        values.dedup();
        if values.is_empty() {
            return Err(Error::InvalidArgument("alphabet must be nonempty".into()));
        }
        Ok(Alphabet { values })
    }

    /// The binary alphabet `{-1, +1}`.
    pub fn spins() -> Self {
        Alphabet {
            values: vec![-1, 1],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn value(&self, i: usize) -> i8 {
        self.values[i]
    }

    pub fn index_of(&self, v: i8) -> Result<usize> {
        self.values
            .binary_search(&v)
            .map_err(|_| Error::NotInAlphabet {
                value: v,
                alphabet: self.values.clone(),
            })
    }
}

/// The per-site state space a potential acts on: plain spins, or (spin, disorder) pairs.
///
/// Joint states are numbered `spin_index * |disorder| + disorder_index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalAlphabet {
    Spin(Alphabet),
    Joint { spin: Alphabet, disorder: Alphabet },
}

impl LocalAlphabet {
    /// Number of local symbols.
    pub fn q(&self) -> usize {
        match self {
            LocalAlphabet::Spin(a) => a.len(),
            LocalAlphabet::Joint { spin, disorder } => spin.len() * disorder.len(),
        }
    }

    pub fn spin(&self) -> &Alphabet {
        match self {
            LocalAlphabet::Spin(a) => a,
            LocalAlphabet::Joint { spin, .. } => spin,
        }
    }

    pub fn disorder(&self) -> Option<&Alphabet> {
        match self {
            LocalAlphabet::Spin(_) => None,
            LocalAlphabet::Joint { disorder, .. } => Some(disorder),
        }
    }

    pub fn is_joint(&self) -> bool {
        matches!(self, LocalAlphabet::Joint { .. })
    }

    pub fn encode(&self, spin: i8, disorder: Option<i8>) -> Result<u8> {
        match (self, disorder) {
            (LocalAlphabet::Spin(a), None) => Ok(a.index_of(spin)? as u8),
            (LocalAlphabet::Joint { spin: s, disorder: d }, Some(e)) => {
                Ok((s.index_of(spin)? * d.len() + d.index_of(e)?) as u8)
            }
            (LocalAlphabet::Spin(_), Some(_)) => Err(Error::InvalidArgument(
                "disorder value given for a spin-only potential".into(),
            )),
            (LocalAlphabet::Joint { .. }, None) => Err(Error::InvalidArgument(
                "joint potential needs a disorder value".into(),
            )),
        }
    }

    pub fn decode(&self, sym: u8) -> (i8, Option<i8>) {
        match self {
            LocalAlphabet::Spin(a) => (a.value(sym as usize), None),
            LocalAlphabet::Joint { spin, disorder } => {
                let nd = disorder.len();
                let s = sym as usize;
                (spin.value(s / nd), Some(disorder.value(s % nd)))
            }
        }
    }

    /// Symbols carrying disorder value `eta`, in spin order.
    pub fn symbols_with_disorder(&self, eta: i8) -> Result<Vec<u8>> {
        let s = self.spin().values().to_vec();
        s.into_iter().map(|v| self.encode(v, Some(eta))).collect()
    }

    /// All symbols, in order.
    pub fn all_symbols(&self) -> Vec<u8> {
        (0..self.q() as u8).collect()
    }
}

/// One interaction term: a shape (canonical, lexicographically sorted, first
/// site at the origin) and its values over local symbols of the shape, with the
/// first site most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    shape: Vec<Site>,
    table: Vec<f64>,
}

impl Term {
    /// Term from a function of the symbols at `shape`, given in the caller's site order.
    pub fn from_fn(shape: Vec<Site>, q: usize, f: impl Fn(&[u8]) -> f64) -> Result<Term> {
        if shape.is_empty() {
            return Err(Error::InvalidArgument("term shape must be nonempty".into()));
        }
        let dim = shape[0].dim();
        if let Some(s) = shape.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
        let mut order: Vec<usize> = (0..shape.len()).collect();
        order.sort_by(|&a, &b| shape[a].cmp(&shape[b]));
        if order.windows(2).any(|w| shape[w[0]] == shape[w[1]]) {
            return Err(Error::InvalidArgument("term shape has repeated sites".into()));
        }
        let base = shape[order[0]].clone();
        let canon: Vec<Site> = order.iter().map(|&i| shape[i].sub(&base)).collect();
        let k = shape.len();
        let size = (q as f64).powi(k as i32);
        if size > ENUMERATION_CAP as f64 {
            return Err(Error::StateSpaceTooLarge {
                configs: size,
                cap: ENUMERATION_CAP,
            });
        }
        let mut table = Vec::with_capacity(size as usize);
        let mut caller = vec![0u8; k];
        let mut odo = Odometer::new(vec![q; k]);
        while odo.advance().is_some() {
            for (j, &i) in order.iter().enumerate() {
                caller[i] = odo.digits()[j] as u8;
            }
            table.push(f(&caller));
        }
        Ok(Term {
            shape: canon,
            table,
        })
    }

    /// Term from a table indexed over `shape` in the given site order.
    pub fn from_table(shape: Vec<Site>, q: usize, table: Vec<f64>) -> Result<Term> {
        let expect = (q as f64).powi(shape.len() as i32);
        if table.len() as f64 != expect {
            return Err(Error::InvalidArgument(format!(
                "term table has {} entries, expected {}",
                table.len(),
                expect
            )));
        }
        Term::from_fn(shape, q, |syms| table[table_index(syms, q)])
    }

    pub fn shape(&self) -> &[Site] {
        &self.shape
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Largest sup-distance between two sites of the shape.
    pub fn diameter(&self) -> u32 {
        let mut d = 0;
        for a in &self.shape {
            for b in &self.shape {
                d = d.max(a.dist(b));
            }
        }
        d
    }

    pub fn value(&self, syms: &[u8], q: usize) -> f64 {
        self.table[table_index(syms, q)]
    }

    fn is_zero(&self) -> bool {
        self.table.iter().all(|&v| v == 0.0)
    }
}

fn table_index(syms: &[u8], q: usize) -> usize {
    syms.iter().fold(0, |acc, &s| acc * q + s as usize)
}

/// A translation-invariant finite-range potential: `Φ_{A+x}(ω) = Φ_A(τ_x ω)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    dim: usize,
    alphabet: LocalAlphabet,
    terms: Vec<Term>,
}

impl Potential {
    pub fn new(dim: usize, alphabet: LocalAlphabet, terms: Vec<Term>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        let q = alphabet.q();
        for t in &terms {
            if t.shape[0].dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: t.shape[0].dim(),
                });
            }
            if t.table.len() != q.pow(t.shape.len() as u32) {
                return Err(Error::InvalidArgument("term table size does not match alphabet".into()));
            }
        }
        Ok(Potential {
            dim,
            alphabet,
            terms,
        })
    }

    pub fn zero(dim: usize, alphabet: LocalAlphabet) -> Self {
        Potential {
            dim,
            alphabet,
            terms: Vec::new(),
        }
    }

    /// Nearest-neighbour Ising: `-β σ_x σ_y` on bonds, `-h σ_x` on sites.
    pub fn ising(dim: usize, beta: f64, h: f64) -> Self {
        let alphabet = LocalAlphabet::Spin(Alphabet::spins());
        let spin = |s: u8| if s == 0 { -1.0 } else { 1.0 };
        let mut terms = vec![Term::from_fn(vec![Site::origin(dim)], 2, |s| -h * spin(s[0])).unwrap()];
        for e in unit_vectors(dim) {
            terms.push(
                Term::from_fn(vec![Site::origin(dim), e], 2, |s| -beta * spin(s[0]) * spin(s[1]))
                    .unwrap(),
            );
        }
        Potential {
            dim,
            alphabet,
            terms,
        }
    }

    /// Random-field Ising on joint variables: `-β σ_x σ_y` on bonds, `-h η_x σ_x` on sites.
    pub fn rfim(dim: usize, beta: f64, h: f64, disorder: Alphabet) -> Self {
        Self::rfim_with_site_term(dim, beta, h, disorder, |_| 0.0)
    }

    /// The random-field Ising potential plus the single-site term `-log P0(η_x)`.
    pub fn triv_annealed(dim: usize, beta: f64, h: f64, disorder: Alphabet, probs: &[f64]) -> Result<Self> {
        if probs.len() != disorder.len() {
            return Err(Error::InvalidArgument(
                "disorder probabilities do not match the disorder alphabet".into(),
            ));
        }
        let probs = probs.to_vec();
        let d = disorder.clone();
        Ok(Self::rfim_with_site_term(dim, beta, h, disorder, move |eta| {
            -probs[d.index_of(eta).unwrap()].ln()
        }))
    }

    fn rfim_with_site_term(
        dim: usize,
        beta: f64,
        h: f64,
        disorder: Alphabet,
        extra: impl Fn(i8) -> f64,
    ) -> Self {
        let alphabet = LocalAlphabet::Joint {
            spin: Alphabet::spins(),
            disorder,
        };
        let q = alphabet.q();
        let a = alphabet.clone();
        let field = Term::from_fn(vec![Site::origin(dim)], q, |s| {
            let (spin, eta) = a.decode(s[0]);
            let eta = eta.unwrap();
            -h * eta as f64 * spin as f64 + extra(eta)
        })
        .unwrap();
        let mut terms = vec![field];
        for e in unit_vectors(dim) {
            terms.push(
                Term::from_fn(vec![Site::origin(dim), e], q, |s| {
                    -beta * a.decode(s[0]).0 as f64 * a.decode(s[1]).0 as f64
                })
                .unwrap(),
            );
        }
        Potential {
            dim,
            alphabet,
            terms,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> &LocalAlphabet {
        &self.alphabet
    }

    pub fn q(&self) -> usize {
        self.alphabet.q()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Largest term diameter.
    pub fn range(&self) -> u32 {
        self.terms.iter().map(Term::diameter).max().unwrap_or(0)
    }

    /// Combine terms sharing a shape, keep a deterministic (shape) order, drop all-zero terms.
    pub fn merged(self) -> Self {
        let mut by_shape: BTreeMap<Vec<Site>, Vec<f64>> = BTreeMap::new();
        for t in self.terms {
            match by_shape.get_mut(&t.shape) {
                Some(acc) => {
                    for (a, v) in acc.iter_mut().zip(&t.table) {
                        *a += v;
                    }
                }
                None => {
                    by_shape.insert(t.shape, t.table);
                }
            }
        }
        let terms = by_shape
            .into_iter()
            .map(|(shape, table)| Term { shape, table })
            .filter(|t| !t.is_zero())
            .collect();
        Potential {
            dim: self.dim,
            alphabet: self.alphabet,
            terms,
        }
    }

    /// Symbol at a site of a spin configuration.
    pub(crate) fn spin_symbol(&self, v: i8) -> Result<u8> {
        match &self.alphabet {
            LocalAlphabet::Spin(a) => Ok(a.index_of(v)? as u8),
            LocalAlphabet::Joint { .. } => Err(Error::Unsupported(
                "joint potential evaluated on a spin-only configuration".into(),
            )),
        }
    }

    /// Local symbol of the all-plus state.
    pub fn plus_symbol(&self) -> Result<u8> {
        self.spin_symbol(1)
    }
}

fn unit_vectors(dim: usize) -> impl Iterator<Item = Site> {
    (0..dim).map(move |i| {
        let mut c = vec![0; dim];
        c[i] = 1;
        Site::new(c)
    })
}

fn check_dim(phi: &Potential, dim: usize) -> Result<()> {
    if phi.dim != dim {
        return Err(Error::DimensionMismatch {
            expected: phi.dim,
            found: dim,
        });
    }
    Ok(())
}

/// `H_Λ(σ|ω) = Σ_{A∩Λ≠∅} Φ_A(σ_Λ ω_{Λ^c})` for a spin potential.
pub fn hamiltonian(phi: &Potential, vol: &Volume, sigma: &Config, omega: &Config) -> Result<f64> {
    check_dim(phi, vol.dim())?;
    if sigma.volume() != vol {
        return Err(Error::VolumeMismatch("sigma must live on the box".into()));
    }
    let inter = Interactions::intersecting(phi, vol);
    let mut err = None;
    let e = inter.energy(phi, |s| {
        let v = sigma.get(s).or_else(|| omega.get(s))?;
        match phi.spin_symbol(v) {
            Ok(sym) => Some(sym),
            Err(e) => {
                err.get_or_insert(e);
                Some(0)
            }
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(e),
    }
}

/// Hamiltonian of a joint potential: spins `σ` on the box with `omega` on the
/// shell, disorder `eta` on box and shell.
pub fn hamiltonian_joint(
    phi: &Potential,
    vol: &Volume,
    sigma: &Config,
    omega: &Config,
    eta: &Config,
) -> Result<f64> {
    check_dim(phi, vol.dim())?;
    if !phi.alphabet.is_joint() {
        return Err(Error::Unsupported("hamiltonian_joint needs a joint potential".into()));
    }
    if sigma.volume() != vol {
        return Err(Error::VolumeMismatch("sigma must live on the box".into()));
    }
    let inter = Interactions::intersecting(phi, vol);
    let mut err = None;
    let e = inter.energy(phi, |s| {
        let v = sigma.get(s).or_else(|| omega.get(s))?;
        let d = eta.get(s)?;
        match phi.alphabet.encode(v, Some(d)) {
            Ok(sym) => Some(sym),
            Err(e) => {
                err.get_or_insert(e);
                Some(0)
            }
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(e),
    }
}

/// Equivalent potential vanishing whenever any site of its support is `+1`.
///
/// Each term `Φ_C` contributes, for every nonempty `A ⊆ C`, the function
/// `Π_{x∈A} Δ_x Φ_C(σ_A +_{C∖A})` with `Δ_x f(σ) = f(σ) - f(σ^{x→+})`.
/// Summed over `A` these reproduce `Φ_C(σ) - Φ_C(+)`, so kernels are unchanged.
pub fn vacuum_transform(phi: &Potential) -> Result<Potential> {
    let spin = match &phi.alphabet {
        LocalAlphabet::Spin(a) => a,
        LocalAlphabet::Joint { .. } => {
            return Err(Error::Unsupported("vacuum transform of a joint potential".into()))
        }
    };
    let q = spin.len();
    let plus = spin.index_of(1)?;
    let mut terms = Vec::new();
    for t in &phi.terms {
        let k = t.shape.len();
        for mask in 1u32..(1 << k) {
            let members: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
            let m = members.len();
            let mut full = vec![plus as u8; k];
            let mut table: Vec<f64> = Vec::with_capacity(q.pow(m as u32));
            let mut odo = Odometer::new(vec![q; m]);
            while odo.advance().is_some() {
                for (j, &i) in members.iter().enumerate() {
                    full[i] = odo.digits()[j] as u8;
                }
                table.push(t.value(&full, q));
            }
            for j in 0..m {
                let stride = q.pow((m - 1 - j) as u32);
                let old = table.clone();
                for (idx, v) in table.iter_mut().enumerate() {
                    let digit = (idx / stride) % q;
                    let at_plus = idx - digit * stride + plus * stride;
                    *v = old[idx] - old[at_plus];
                }
            }
            let shape = members.iter().map(|&i| t.shape[i].clone()).collect();
            terms.push(Term::from_table(shape, q, table)?);
        }
    }
    Ok(Potential {
        dim: phi.dim,
        alphabet: phi.alphabet.clone(),
        terms,
    }
    .merged())
}

/// Keep only the terms of diameter at most `r`.
pub fn truncate(phi: &Potential, r: u32) -> Potential {
    Potential {
        dim: phi.dim,
        alphabet: phi.alphabet.clone(),
        terms: phi.terms.iter().filter(|t| t.diameter() <= r).cloned().collect(),
    }
}

/// Largest absolute value of a sum of entries, over all fillings of their sites.
fn sup_abs(phi: &Potential, inter: &Interactions) -> Result<f64> {
    if inter.is_empty() {
        return Ok(0.0);
    }
    let sites = inter.sites(phi.dim);
    let q = phi.q();
    let mut odo = Odometer::new(vec![q; sites.len()]);
    crate::energy::check_cap(odo.total())?;
    let mut best: f64 = 0.0;
    while odo.advance().is_some() {
        let digits = odo.digits();
        let e = inter.energy(phi, |s| sites.index_of(s).map(|i| digits[i] as u8))?;
        best = best.max(e.abs());
    }
    Ok(best)
}

/// `sup_σ |Σ_{A∋0, A∩Λ_n^c≠∅} Φ_A(σ)|`.
pub fn tail_seminorm(phi: &Potential, n: u32) -> Result<f64> {
    let inner = cube(n, phi.dim);
    let inter = Interactions::containing(phi, &Site::origin(phi.dim))
        .filter(|e| e.sites.iter().any(|s| !inner.contains(s)));
    sup_abs(phi, &inter)
}

/// `sup_σ |Σ_{A∋0, diam A > r} Φ_A(σ)|`: the difference between `phi` and its truncation at `r`, per site.
pub fn truncation_gap(phi: &Potential, r: u32) -> Result<f64> {
    let inter = Interactions::containing(phi, &Site::origin(phi.dim))
        .filter(|e| phi.terms[e.term].diameter() > r);
    sup_abs(phi, &inter)
}

/// `2 Σ_{x∈Λ} sup_σ |Σ_{A∋x, A⊄Λ} Φ_A(σ)|`, which bounds `|H_Λ(σ|ω) - H_Λ(σ|ω')|`.
pub fn boundary_bound(phi: &Potential, vol: &Volume) -> Result<f64> {
    let mut total = 0.0;
    for x in vol.sites() {
        let inter = Interactions::containing(phi, x)
            .filter(|e| e.sites.iter().any(|s| !vol.contains(s)));
        total += sup_abs(phi, &inter)?;
    }
    Ok(2.0 * total)
}

/// Oscillation of the terms crossing the boundary of `vol`.
///
/// Crossing terms are grouped into components sharing sites; each component
/// contributes `max over inside fillings of (max - min over outside fillings)`.
pub fn boundary_oscillation(phi: &Potential, vol: &Volume) -> Result<f64> {
    check_dim(phi, vol.dim())?;
    let inter = Interactions::crossing(phi, vol);
    let n = inter.entries.len();
    let mut uf = UnionFind::new(n);
    let mut owner: BTreeMap<&Site, usize> = BTreeMap::new();
    for (k, e) in inter.entries.iter().enumerate() {
        for s in &e.sites {
            if let Some(&j) = owner.get(s) {
                uf.union(j, k);
            } else {
                owner.insert(s, k);
            }
        }
    }
    let q = phi.q();
    let mut total = 0.0;
    for group in uf.groups() {
        let part = Interactions {
            entries: group.iter().map(|&k| inter.entries[k].clone()).collect(),
        };
        let sites = part.sites(phi.dim);
        let inside: Vec<Site> = sites.sites().iter().filter(|s| vol.contains(s)).cloned().collect();
        let outside: Vec<Site> = sites.sites().iter().filter(|s| !vol.contains(s)).cloned().collect();
        crate::energy::check_cap((q as f64).powi(sites.len() as i32))?;
        let mut worst: f64 = 0.0;
        let mut odo_in = Odometer::new(vec![q; inside.len()]);
        while odo_in.advance().is_some() {
            let din = odo_in.digits().to_vec();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            let mut odo_out = Odometer::new(vec![q; outside.len()]);
            while odo_out.advance().is_some() {
                let dout = odo_out.digits();
                let e = part.energy(phi, |s| {
                    inside
                        .binary_search(s)
                        .map(|i| din[i] as u8)
                        .or_else(|_| outside.binary_search(s).map(|i| dout[i] as u8))
                        .ok()
                })?;
                lo = lo.min(e);
                hi = hi.max(e);
            }
            worst = worst.max(hi - lo);
        }
        total += worst;
    }
    Ok(total)
}

/// A random spin potential on `{-1,+1}`: up to four terms of at most three
/// sites inside `[0, max_range]^dim`, table values uniform in `[-coef, coef]`.
pub fn random_potential<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_range: u32, coef: f64) -> Potential {
    let shift = Site::new(vec![max_range as i32; dim]);
    let window: Vec<Site> = cube(max_range, dim)
        .sites()
        .iter()
        .map(|s| s.add(&shift))
        .filter(|s| s.coords().iter().all(|&v| v as u32 <= max_range))
        .collect();
    let n_terms = rng.gen_range(1..=4);
    let mut terms = Vec::new();
    for _ in 0..n_terms {
        let size = rng.gen_range(1..=3.min(window.len()));
        let mut shape = vec![Site::origin(dim)];
        while shape.len() < size {
            let s = window[rng.gen_range(0..window.len())].clone();
            if !shape.contains(&s) {
                shape.push(s);
            }
        }
        let table = (0..2usize.pow(size as u32))
            .map(|_| rng.gen_range(-coef..=coef))
            .collect();
        terms.push(Term::from_table(shape, 2, table).unwrap());
    }
    Potential {
        dim,
        alphabet: LocalAlphabet::Spin(Alphabet::spins()),
        terms,
    }
}

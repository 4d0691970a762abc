//! Translated interaction terms for a volume, and the enumeration engine that
//! evaluates finite-volume energies for every configuration of a box.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::lattice::{Site, Volume};
use crate::numeric::Odometer;
use crate::potential::Potential;

/// Largest number of configurations any exact table may enumerate.
pub const ENUMERATION_CAP: usize = 1 << 24;

pub(crate) fn check_cap(configs: f64) -> Result<()> {
    if configs > ENUMERATION_CAP as f64 {
        return Err(Error::StateSpaceTooLarge {
            configs,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

/// One translate `x + S` of a potential term.
#[derive(Debug, Clone)]
pub struct Entry {
    pub term: usize,
    pub sites: Vec<Site>,
}

/// A list of translated terms, in a fixed deterministic order.
#[derive(Debug, Clone)]
pub struct Interactions {
    pub entries: Vec<Entry>,
}

impl Interactions {
    fn collect(phi: &Potential, anchors: &[Site], keep: impl Fn(&[Site]) -> bool) -> Self {
        let mut entries = Vec::new();
        for (t, term) in phi.terms().iter().enumerate() {
            let mut shifts = BTreeSet::new();
            for a in anchors {
                for s in term.shape() {
                    shifts.insert(a.sub(s));
                }
            }
            for x in shifts {
                let sites: Vec<Site> = term.shape().iter().map(|s| s.add(&x)).collect();
                if keep(&sites) {
                    entries.push(Entry { term: t, sites });
                }
            }
        }
        Interactions { entries }
    }

    /// All translates `A` with `A ∩ vol ≠ ∅`.
    pub fn intersecting(phi: &Potential, vol: &Volume) -> Self {
        Self::collect(phi, vol.sites(), |_| true)
    }

    /// Translates meeting both `vol` and its complement.
    pub fn crossing(phi: &Potential, vol: &Volume) -> Self {
        Self::collect(phi, vol.sites(), |s| s.iter().any(|y| !vol.contains(y)))
    }

    /// Translates containing `x`.
    pub fn containing(phi: &Potential, x: &Site) -> Self {
        Self::collect(phi, std::slice::from_ref(x), |_| true)
    }

    pub fn filter(self, keep: impl Fn(&Entry) -> bool) -> Self {
        Interactions {
            entries: self.entries.into_iter().filter(|e| keep(e)).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Union of the sites of all entries.
    pub fn sites(&self, dim: usize) -> Volume {
        Volume::new(dim, self.entries.iter().flat_map(|e| e.sites.iter().cloned())).unwrap()
    }

    /// Sum of all entries; `lookup` maps sites to alphabet symbols.
    pub fn energy(&self, phi: &Potential, mut lookup: impl FnMut(&Site) -> Option<u8>) -> Result<f64> {
        let mut total = 0.0;
        let mut syms = Vec::new();
        for e in &self.entries {
            syms.clear();
            for s in &e.sites {
                syms.push(lookup(s).ok_or_else(|| Error::ShellTooThin {
                    range: phi.range() as usize,
                    missing: s.to_string(),
                })?);
            }
            total += phi.terms()[e.term].value(&syms, phi.q());
        }
        Ok(total)
    }
}

/// Energies of every configuration of a box, with the complement held fixed.
///
/// Box site `i` ranges over `allowed[i]` (a list of alphabet symbols); the
/// configuration index is mixed-radix over those lists with the first box site
/// most significant. Energies are summed in entry order, so each value is
/// bit-identical to [`Interactions::energy`] on the same configuration.
pub(crate) struct BoxEnergies<'a> {
    phi: &'a Potential,
    n_box: usize,
    terms: Vec<usize>,
    positions: Vec<Vec<usize>>,
    by_position: Vec<Vec<usize>>,
    fixed: Vec<u8>,
}

impl<'a> BoxEnergies<'a> {
    pub fn new(
        phi: &'a Potential,
        vol: &Volume,
        inter: &Interactions,
        fixed: impl Fn(&Site) -> Option<u8>,
    ) -> Result<Self> {
        let mut layout: HashMap<Site, usize> = vol
            .sites()
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        let n_box = vol.len();
        let mut fixed_syms = Vec::new();
        let mut positions = Vec::with_capacity(inter.entries.len());
        for e in &inter.entries {
            let mut pos = Vec::with_capacity(e.sites.len());
            for s in &e.sites {
                let p = match layout.get(s) {
                    Some(&p) => p,
                    None => {
                        let sym = fixed(s).ok_or_else(|| Error::ShellTooThin {
                            range: phi.range() as usize,
                            missing: s.to_string(),
                        })?;
                        let p = n_box + fixed_syms.len();
                        fixed_syms.push(sym);
                        layout.insert(s.clone(), p);
                        p
                    }
                };
                pos.push(p);
            }
            positions.push(pos);
        }
        let mut by_position = vec![Vec::new(); n_box];
        for (k, pos) in positions.iter().enumerate() {
            for &p in pos {
                if p < n_box && by_position[p].last() != Some(&k) {
                    by_position[p].push(k);
                }
            }
        }
        Ok(BoxEnergies {
            phi,
            n_box,
            terms: inter.entries.iter().map(|e| e.term).collect(),
            positions,
            by_position,
            fixed: fixed_syms,
        })
    }

    fn entry_value(&self, k: usize, syms: &[u8], buf: &mut Vec<u8>) -> f64 {
        buf.clear();
        buf.extend(self.positions[k].iter().map(|&p| syms[p]));
        self.phi.terms()[self.terms[k]].value(buf, self.phi.q())
    }

    /// Visit every configuration: `visit(index, box symbols, energy)`.
    pub fn for_each(
        &self,
        allowed: &[Vec<u8>],
        mut visit: impl FnMut(usize, &[u8], f64),
    ) -> Result<()> {
        assert_eq!(allowed.len(), self.n_box);
        let mut odo = Odometer::new(allowed.iter().map(Vec::len).collect());
        check_cap(odo.total())?;
        let mut syms: Vec<u8> = allowed
            .iter()
            .map(|a| a.first().copied().unwrap_or(0))
            .chain(self.fixed.iter().copied())
            .collect();
        let mut values = vec![0.0; self.positions.len()];
        let mut buf = Vec::new();
        let mut index = 0usize;
        while let Some(lowest) = odo.advance() {
            if index == 0 {
                for k in 0..values.len() {
                    values[k] = self.entry_value(k, &syms, &mut buf);
                }
            } else {
                let digits = odo.digits();
                for p in lowest..self.n_box {
                    syms[p] = allowed[p][digits[p]];
                }
                for p in lowest..self.n_box {
                    for &k in &self.by_position[p] {
                        values[k] = self.entry_value(k, &syms, &mut buf);
                    }
                }
            }
            let mut e = 0.0;
            for v in &values {
                e += v;
            }
            visit(index, &syms[..self.n_box], e);
            index += 1;
        }
        Ok(())
    }

    pub fn energies(&self, allowed: &[Vec<u8>]) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        self.for_each(allowed, |_, _, e| out.push(e))?;
        Ok(out)
    }
}

//! Multi-differentials in the pole basis ∏ dzᵢ/(zᵢ - a_{bᵢ})^{kᵢ}.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::coeff::Coeff;
use crate::error::{Error, Result};

/// One factor dz/(z - a_bp)^order of a basis monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Slot {
    pub bp: u8,
    pub order: u8,
}

impl Slot {
    pub fn new(bp: usize, order: u32) -> Self {
        Slot {
            bp: bp as u8,
            order: order as u8,
        }
    }

    pub(crate) fn is_empty(self) -> bool {
        self.order == 0
    }
}

/// Largest number of variables the engine handles.
pub const MAX_ARITY: usize = 8;

/// Fixed-width monomial; unused positions hold the default (order 0) slot.
pub(crate) type Mono = [Slot; MAX_ARITY];

/// Sparse linear combination of monomials, keyed by fixed-width slot vectors.
pub(crate) type FormPoly = HashMap<Mono, Coeff>;

pub(crate) fn accumulate(dst: &mut FormPoly, key: Mono, c: Coeff) {
    if c.is_zero() {
        return;
    }
    match dst.entry(key) {
        std::collections::hash_map::Entry::Occupied(mut e) => {
            let v = e.get() + &c;
            if v.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = v;
            }
        }
        std::collections::hash_map::Entry::Vacant(e) => {
            e.insert(c);
        }
    }
}

/// Σ coeff · ∏ᵢ dzᵢ/(zᵢ - a_{bpᵢ})^{orderᵢ} in `n` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiForm {
    n: usize,
    terms: BTreeMap<Vec<Slot>, Coeff>,
}

impl MultiForm {
    pub fn zero(n: usize) -> Self {
        MultiForm {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Slot>, Coeff> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, slots: &[Slot]) -> Coeff {
        self.terms.get(slots).cloned().unwrap_or_else(Coeff::zero)
    }

    /// Adds `c` to the coefficient of `slots`.
    pub fn add_term(&mut self, slots: Vec<Slot>, c: Coeff) -> Result<()> {
        if slots.len() != self.n {
            return Err(Error::Validation(format!(
                "monomial has {} slots, form has {}",
                slots.len(),
                self.n
            )));
        }
        if slots.iter().any(|s| s.order == 0) {
            return Err(Error::Validation("pole order must be at least 1".into()));
        }
        if c.is_zero() {
            return Ok(());
        }
        match self.terms.entry(slots) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get() + &c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
        Ok(())
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Vec<Slot>, Coeff)>) -> Result<Self> {
        let mut m = MultiForm::zero(n);
        for (s, c) in terms {
            m.add_term(s, c)?;
        }
        Ok(m)
    }

    pub(crate) fn from_poly(n: usize, p: FormPoly) -> Self {
        let terms = p
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k[..n].to_vec(), c))
            .collect();
        MultiForm { n, terms }
    }

    pub fn scale(&self, c: &Coeff) -> MultiForm {
        if c.is_zero() {
            return MultiForm::zero(self.n);
        }
        MultiForm {
            n: self.n,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn sub(&self, o: &MultiForm) -> Result<MultiForm> {
        if self.n != o.n {
            return Err(Error::Validation("arity mismatch".into()));
        }
        let mut out = self.clone();
        for (k, v) in &o.terms {
            out.add_term(k.clone(), -v)?;
        }
        Ok(out)
    }

    pub fn add(&self, o: &MultiForm) -> Result<MultiForm> {
        self.sub(&o.scale(&Coeff::from_int(-1)))
    }

    /// Applies a permutation of variables: new slot `i` is old slot `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> MultiForm {
        MultiForm {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (perm.iter().map(|&j| k[j]).collect(), v.clone()))
                .collect(),
        }
    }

    /// Highest pole order appearing in any slot.
    pub fn max_order(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|k| k.iter().map(|s| s.order as u32))
            .max()
            .unwrap_or(0)
    }

    /// True if some term has a simple pole (a residue) in some variable.
    ///
    /// Residue-free means no order-1 term in any slot after collecting.
    pub fn has_residue_terms(&self) -> bool {
        self.terms.keys().any(|k| k.iter().any(|s| s.order == 1))
    }

    /// Exact value of the coefficient function (the form divided by ∏dzᵢ)
    /// at a point, given the branchpoint locations.
    pub fn evaluate(&self, bps: &[Coeff], z: &[Coeff]) -> Result<Coeff> {
        if z.len() != self.n {
            return Err(Error::Validation("wrong number of evaluation points".into()));
        }
        let mut acc = Coeff::zero();
        for (k, c) in &self.terms {
            let mut t = c.clone();
            for (s, zi) in k.iter().zip(z) {
                let d = zi - &bps[s.bp as usize];
                if d.is_zero() {
                    return Err(Error::Pole("evaluation point at a branchpoint".into()));
                }
                t = &t * &d.inv()?.pow(s.order as u32);
            }
            acc += &t;
        }
        Ok(acc)
    }

    /// Restricted to terms whose variables `1..n` are sorted; the inverse of
    /// [`MultiForm::symmetrize_tail`] for forms symmetric in those variables.
    pub(crate) fn symmetrize_tail(n: usize, sorted: FormPoly) -> MultiForm {
        let mut terms = BTreeMap::new();
        for (k, c) in sorted {
            if c.is_zero() {
                continue;
            }
            let head = k[0];
            let mut tail: Vec<Slot> = k[1..n].to_vec();
            // every distinct arrangement of the tail
            tail.sort();
            loop {
                let mut key = Vec::with_capacity(n);
                key.push(head);
                key.extend_from_slice(&tail);
                terms.insert(key, c.clone());
                if !next_permutation(&mut tail) {
                    break;
                }
            }
        }
        MultiForm { n, terms }
    }
}

/// Lexicographic successor; false when `v` is the last arrangement.
pub(crate) fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// True iff the form is invariant under every permutation of its variables.
pub fn symmetry_check(m: &MultiForm) -> bool {
    // Adjacent transpositions generate the symmetric group.
    for i in 0..m.n.saturating_sub(1) {
        for (k, c) in &m.terms {
            let mut t = k.clone();
            t.swap(i, i + 1);
            match m.terms.get(&t) {
                Some(c2) if c2 == c => {}
                _ => return false,
            }
        }
    }
    true
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    slots: Vec<Slot>,
    coeff: Coeff,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    display: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct FormRepr {
    n: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for MultiForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormRepr {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| TermRepr {
                    slots: k.clone(),
                    coeff: c.clone(),
                    display: Some(c.to_string()),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = FormRepr::deserialize(d)?;
        MultiForm::from_terms(r.n, r.terms.into_iter().map(|t| (t.slots, t.coeff)))
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn asymmetric_form_detected() {
        let m = MultiForm::from_terms(2, [(vec![Slot::new(0, 2), Slot::new(0, 4)], Coeff::one())])
            .unwrap();
        assert!(!symmetry_check(&m));
        let s = m.add(&m.permute(&[1, 0])).unwrap();
        assert!(symmetry_check(&s));
    }

    #[test]
    fn cancellation_removes_terms() {
        let mut m = MultiForm::zero(1);
        m.add_term(vec![Slot::new(0, 2)], Coeff::one()).unwrap();
        m.add_term(vec![Slot::new(0, 2)], Coeff::from_int(-1)).unwrap();
        assert!(m.is_zero());
    }

    #[test]
    fn json_round_trip() {
        let m = MultiForm::from_terms(
            1,
            [
                (vec![Slot::new(0, 4)], Coeff::from_frac(1, 8)),
                (vec![Slot::new(0, 2)], &Coeff::param() / &Coeff::from_int(12)),
            ],
        )
        .unwrap();
        let j = serde_json::to_string(&m).unwrap();
        assert!(j.contains(r#""display":"p/12""#), "{j}");
        let back: MultiForm = serde_json::from_str(&j).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn permutations_enumerated() {
        let mut v = vec![1, 1, 2];
        let mut n = 1;
        while next_permutation(&mut v) {
            n += 1;
        }
        assert_eq!(n, 3);
    }
}

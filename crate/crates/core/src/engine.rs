//! The residue recursion for ω_{g,n}, F_g and the dilaton residual.
//!
//! Lower invariants enter the bracket through the pole basis: each factor
//! dz/(z-b)^k is expanded at q = a+ζ (principal part when b = a) or at σ(q)
//! (composed with σ and multiplied by σ'), so all bracket terms are Laurent
//! series in ζ whose coefficients are forms in the remaining variables.

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::coeff::{rat_int, Coeff, CoeffSum, Rat};
use crate::curve::{local_frame, validate_curve, LocalFrame, SpectralCurve, LOCAL_VAR};
use crate::error::{Error, Result};
use crate::form::{accumulate, symmetry_check, FormPoly, Mono, MultiForm, Slot, MAX_ARITY};
use crate::kernel::{assemble_kernel, kernel_scalar, KernelMode, KernelSeries};
use crate::series::LaurentSeries;

/// Series window that suffices for ω_{g,n}: the pole bound 6g-4+2n, plus the
/// two orders lost to σ and a margin.
pub fn required_window(g: u32, n: usize) -> i32 {
    6 * g as i32 - 2 + 2 * n as i32 + 4
}

/// Largest pole order allowed in any variable of ω_{g,n}.
pub fn pole_bound(g: u32, n: usize) -> u32 {
    (6 * g as i32 - 4 + 2 * n as i32).max(0) as u32
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    pub mode: KernelMode,
    /// Multiplies the general kernel; ignored by printed kernels.
    pub kappa: Rat,
    /// Fixed series window. `None` picks and grows the window automatically.
    pub window: Option<i32>,
    /// Compute every monomial instead of one representative per orbit of the
    /// variables 2..n (which the bracket treats symmetrically).
    pub exhaustive: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            mode: KernelMode::General,
            kappa: calibrated_kappa().clone(),
            window: None,
            exhaustive: false,
        }
    }
}

impl EngineOptions {
    pub fn general(kappa: Rat) -> Self {
        EngineOptions {
            kappa,
            ..EngineOptions::default()
        }
    }

    pub fn with_mode(mut self, mode: KernelMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_window(mut self, window: Option<i32>) -> Self {
        self.window = window;
        self
    }

    pub fn with_exhaustive(mut self, exhaustive: bool) -> Self {
        self.exhaustive = exhaustive;
        self
    }
}

/// Where a variable of a lower invariant goes when it enters the bracket.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    Q,
    Sigma,
    Out(usize),
}

/// A Laurent series in ζ with form-valued coefficients.
type FormSeries = BTreeMap<i32, FormPoly>;

/// Unreduced sums per monomial.
type SumPoly = HashMap<Mono, CoeffSum>;

fn finish(p: SumPoly) -> FormPoly {
    p.into_iter()
        .map(|(k, s)| (k, s.finish()))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// Per-branchpoint data at the current window.
struct Local {
    frame: LocalFrame,
    kernel: KernelSeries,
    /// B(q, σq)/dζ²
    b_loop: LaurentSeries,
    /// (k+1) σ^k σ' for the expansion of B(σq, p).
    b_sigma: Vec<LaurentSeries>,
    /// Basis factors dz/(z-b)^k at q = a+ζ for b ≠ a, per (b, k).
    at_q: HashMap<Slot, LaurentSeries>,
    /// Basis factors at σ(q), including dσ, per (b, k).
    at_sigma: HashMap<Slot, LaurentSeries>,
}

impl Local {
    fn basis(&self, s: Slot, t: Target) -> Result<LaurentSeries> {
        let own = s.bp as usize == self.frame.bp;
        let found = match t {
            Target::Q if own => {
                return Ok(LaurentSeries::monomial(
                    LOCAL_VAR,
                    Coeff::one(),
                    -(s.order as i32),
                    self.frame.window + 1,
                ))
            }
            Target::Q => self.at_q.get(&s),
            Target::Sigma => self.at_sigma.get(&s),
            Target::Out(_) => unreachable!(),
        };
        found.cloned().ok_or_else(|| {
            Error::Internal(format!(
                "basis factor (bp {}, order {}) not prepared",
                s.bp, s.order
            ))
        })
    }
}

/// Memo table of ω_{g,n} and F_g for one curve and kernel mode.
pub struct OmegaTable {
    curve: SpectralCurve,
    options: EngineOptions,
    window: i32,
    locals: Vec<Local>,
    /// Highest pole order the basis caches cover.
    prepared_order: u32,
    entries: HashMap<(u32, usize), MultiForm>,
    fg: BTreeMap<u32, Coeff>,
}

impl OmegaTable {
    pub fn new(curve: SpectralCurve, options: EngineOptions) -> Result<Self> {
        let diags = validate_curve(&curve);
        if !diags.is_empty() {
            let msg: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            return Err(Error::Validation(msg.join("; ")));
        }
        if curve.branchpoints.len() > u8::MAX as usize {
            return Err(Error::Validation("too many branchpoints".into()));
        }
        Ok(OmegaTable {
            curve,
            options,
            window: 0,
            locals: Vec::new(),
            prepared_order: 0,
            entries: HashMap::new(),
            fg: BTreeMap::new(),
        })
    }

    pub fn curve(&self) -> &SpectralCurve {
        &self.curve
    }

    pub fn options(&self) -> &EngineOptions {
        &self.options
    }

    pub fn kappa(&self) -> &Rat {
        &self.options.kappa
    }

    /// Current series window (0 before anything was computed).
    pub fn window(&self) -> i32 {
        self.window
    }

    /// Stored invariants, keyed by (g, n).
    pub fn entries(&self) -> &HashMap<(u32, usize), MultiForm> {
        &self.entries
    }

    pub fn fg_entries(&self) -> &BTreeMap<u32, Coeff> {
        &self.fg
    }

    /// The kernel series at a branchpoint at the current window.
    pub fn kernel(&mut self, bp: usize) -> Result<KernelSeries> {
        if self.locals.is_empty() {
            let w = self.options.window.unwrap_or(8);
            self.set_window(w)?;
        }
        self.locals
            .get(bp)
            .map(|l| l.kernel.clone())
            .ok_or_else(|| Error::Validation(format!("no branchpoint with index {bp}")))
    }

    /// Local frame at a branchpoint at the current window.
    pub fn frame(&mut self, bp: usize) -> Result<LocalFrame> {
        if self.locals.is_empty() {
            let w = self.options.window.unwrap_or(8);
            self.set_window(w)?;
        }
        self.locals
            .get(bp)
            .map(|l| l.frame.clone())
            .ok_or_else(|| Error::Validation(format!("no branchpoint with index {bp}")))
    }

    fn set_window(&mut self, w: i32) -> Result<()> {
        let mut locals = Vec::with_capacity(self.curve.branchpoints.len());
        for bp in 0..self.curve.branchpoints.len() {
            let frame = local_frame(&self.curve, bp, w)?;
            let f = kernel_scalar(&self.curve, &frame, self.options.mode, &self.options.kappa)?;
            let n1 = frame.bergman_integral(1)?;
            let hi = f.mul(&n1[0])?.hi();
            let kernel = assemble_kernel(&frame, &f, hi)?;
            let b_loop = frame.bergman_on_involution()?;
            locals.push(Local {
                frame,
                kernel,
                b_loop,
                b_sigma: Vec::new(),
                at_q: HashMap::new(),
                at_sigma: HashMap::new(),
            });
        }
        self.locals = locals;
        self.window = w;
        self.prepared_order = 0;
        Ok(())
    }

    /// Grows the automatic window to what ω_{g,n} needs, so that computing
    /// its prerequisites does not rebuild the kernels repeatedly.
    pub fn reserve(&mut self, g: u32, n: usize) -> Result<()> {
        if self.options.window.is_none() && required_window(g, n) > self.window {
            self.set_window(required_window(g, n))?;
        }
        Ok(())
    }

    /// Fills the basis caches up to pole order `max_order`.
    fn prepare(&mut self, max_order: u32) -> Result<()> {
        if max_order <= self.prepared_order {
            return Ok(());
        }
        let bps: Vec<Coeff> = self.curve.branchpoints.iter().map(|b| b.a.clone()).collect();
        let w = self.window;
        for local in &mut self.locals {
            let fr = &local.frame;
            // (k+1) σ^k σ' for B(σq, p), enough terms for exponents below w.
            if local.b_sigma.is_empty() {
                let mut pw = LaurentSeries::one(LOCAL_VAR, w);
                for k in 0..w.max(0) {
                    local
                        .b_sigma
                        .push(pw.mul(&fr.dsigma)?.scale(&Coeff::from_int(k as i64 + 1)));
                    pw = pw.mul(&fr.sigma)?;
                }
            }
            let sigma_inv = fr.sigma.invert()?;
            for (b, ab) in bps.iter().enumerate() {
                let own = b == fr.bp;
                // 1/(d + ζ) with d = a - b, for b ≠ a
                let base = if own {
                    None
                } else {
                    let d = &fr.a - ab;
                    Some(
                        LaurentSeries::from_poly(LOCAL_VAR, &[d, Coeff::one()], w + 1)
                            .invert()?,
                    )
                };
                let mut q_pow: Option<LaurentSeries> = None;
                let mut s_pow: Option<LaurentSeries> = None;
                for k in 1..=max_order {
                    let slot = Slot::new(b, k);
                    match &base {
                        None => {
                            let s = match &s_pow {
                                None => sigma_inv.clone(),
                                Some(p) => p.mul(&sigma_inv)?,
                            };
                            if k > self.prepared_order {
                                local.at_sigma.insert(slot, s.mul(&fr.dsigma)?);
                            }
                            s_pow = Some(s);
                        }
                        Some(inv) => {
                            let q = match &q_pow {
                                None => inv.clone(),
                                Some(p) => p.mul(inv)?,
                            };
                            if k > self.prepared_order {
                                local.at_q.insert(slot, q.clone());
                                local
                                    .at_sigma
                                    .insert(slot, q.compose(&fr.sigma)?.mul(&fr.dsigma)?);
                            }
                            q_pow = Some(q);
                        }
                    }
                }
            }
        }
        self.prepared_order = max_order;
        Ok(())
    }

    /// ω_{g,n} for 2g-2+n > 0 and n ≥ 1.
    pub fn omega(&mut self, g: u32, n: usize) -> Result<MultiForm> {
        if !self.entries.contains_key(&(g, n)) {
            self.reserve(g, n)?;
        }
        self.ensure(g, n)?;
        Ok(self.entries[&(g, n)].clone())
    }

    fn ensure(&mut self, g: u32, n: usize) -> Result<()> {
        if 2 * g as i64 - 2 + n as i64 <= 0 {
            return Err(Error::Domain(format!(
                "(g, n) = ({g}, {n}) is unstable; ω_{{0,1}} and ω_{{0,2}} are initial data"
            )));
        }
        if n == 0 {
            return Err(Error::Domain(
                "n = 0 is the free energy; use f_g".into(),
            ));
        }
        if n > MAX_ARITY {
            return Err(Error::Domain(format!("at most {MAX_ARITY} variables are supported")));
        }
        if self.entries.contains_key(&(g, n)) {
            return Ok(());
        }
        for (h, m) in prerequisites(g, n) {
            self.ensure(h, m)?;
        }
        let auto = self.options.window.is_none();
        let need = required_window(g, n);
        let mut w = match self.options.window {
            Some(w) => w,
            None => need.max(self.window),
        };
        let mut attempts = 0;
        let form = loop {
            if w != self.window {
                self.set_window(w)?;
            }
            self.prepare(pole_bound(g, n))?;
            match self.compute(g, n) {
                Ok(f) => break f,
                Err(e) if e.is_precision() && auto && attempts < 4 => {
                    attempts += 1;
                    w += 4;
                }
                Err(Error::Precision { what, have, .. }) if !auto => {
                    return Err(Error::Precision {
                        what: format!("{what} (ω_{{{g},{n}}} needs window ≥ {need})"),
                        needed: need as i64,
                        have: have.min(self.window as i64),
                    })
                }
                Err(e) => return Err(e),
            }
        };
        if !symmetry_check(&form) {
            return Err(Error::Internal(format!("ω_{{{g},{n}}} is not symmetric")));
        }
        self.entries.insert((g, n), form);
        Ok(())
    }

    /// One job per branchpoint and bracket term, summed exactly.
    fn compute(&self, g: u32, n: usize) -> Result<MultiForm> {
        let mut jobs = Vec::new();
        for bp in 0..self.locals.len() {
            if g >= 1 {
                jobs.push((bp, Job::Loop));
            }
            let rest = n - 1;
            for h in 0..=g {
                for mask in 0u32..(1 << rest) {
                    let full = mask == (1 << rest) - 1;
                    if (h == g && full) || (h == 0 && mask == 0) {
                        continue;
                    }
                    jobs.push((bp, Job::Split { h, mask }));
                }
            }
        }
        let parts: Vec<FormPoly> = jobs
            .par_iter()
            .map(|&(bp, job)| self.run_job(&self.locals[bp], g, n, job))
            .collect::<Result<_>>()?;
        let mut sums = SumPoly::new();
        for p in parts {
            for (k, c) in p {
                sums.entry(k).or_default().add(&c);
            }
        }
        let total = finish(sums);
        Ok(if self.options.exhaustive || n <= 2 {
            MultiForm::from_poly(n, total)
        } else {
            MultiForm::symmetrize_tail(n, total)
        })
    }

    fn run_job(&self, local: &Local, g: u32, n: usize, job: Job) -> Result<FormPoly> {
        let a = local.frame.bp;
        let e_max = -1 - local.kernel.lo();
        let sorted_tail = !self.options.exhaustive && n > 2;
        let bracket: FormSeries = match job {
            Job::Loop => {
                if g == 1 && n == 1 {
                    // ω₀,₂(q, σq)
                    series_to_form(&local.b_loop, Mono::default(), e_max + 1)?
                } else {
                    let m = &self.entries[&(g - 1, n + 1)];
                    let mut targets = vec![Target::Q, Target::Sigma];
                    targets.extend((1..n).map(Target::Out));
                    self.eval_form(local, m, &targets, e_max + 1, sorted_tail)?
                }
            }
            Job::Split { h, mask } => {
                let inside: Vec<usize> = (1..n).filter(|j| mask >> (j - 1) & 1 == 1).collect();
                let outside: Vec<usize> = (1..n).filter(|j| mask >> (j - 1) & 1 == 0).collect();
                let pa = self.factor_pole(a, h, &inside);
                let pb = self.factor_pole(a, g - h, &outside);
                let fa = self.factor(local, h, &inside, Target::Q, e_max + 1 + pb)?;
                let fb = self.factor(local, g - h, &outside, Target::Sigma, e_max + 1 + pa)?;
                product(&fa, &fb, e_max, n, sorted_tail)
            }
        };
        let mut out = SumPoly::new();
        let k_hi = local.kernel.hi();
        for (&e, poly) in &bracket {
            let i = -1 - e;
            if i >= k_hi {
                return Err(Error::precision("kernel series", i as i64 + 1, k_hi as i64));
            }
            for (order, kc) in local.kernel.at(i) {
                let head = Slot::new(a, *order);
                for (key, c) in poly {
                    let mut k2 = *key;
                    k2[0] = head;
                    out.entry(k2).or_default().add_product(kc, c);
                }
            }
        }
        Ok(finish(out))
    }

    /// Pole order in ζ of ω_{h,1+|I|} with its first variable at branchpoint `a`.
    fn factor_pole(&self, a: usize, h: u32, others: &[usize]) -> i32 {
        if h == 0 && others.len() == 1 {
            return 0;
        }
        self.entries[&(h, 1 + others.len())]
            .terms()
            .keys()
            .filter(|k| k[0].bp as usize == a)
            .map(|k| k[0].order as i32)
            .max()
            .unwrap_or(0)
    }

    /// ω_{h,1+|I|}(side, I) as a form series, exact for exponents below `hi`.
    fn factor(
        &self,
        local: &Local,
        h: u32,
        others: &[usize],
        side: Target,
        hi: i32,
    ) -> Result<FormSeries> {
        if h == 0 && others.len() == 1 {
            return bergman_factor(local, others[0], side, hi);
        }
        let m = &self.entries[&(h, 1 + others.len())];
        let mut targets = vec![side];
        targets.extend(others.iter().map(|&j| Target::Out(j)));
        self.eval_form(local, m, &targets, hi, false)
    }

    /// Expands the variables of `m` mapped to Q or Sigma in ζ; the others
    /// become output positions.
    fn eval_form(
        &self,
        local: &Local,
        m: &MultiForm,
        targets: &[Target],
        hi: i32,
        sorted_tail: bool,
    ) -> Result<FormSeries> {
        let mut cache: HashMap<Vec<Slot>, LaurentSeries> = HashMap::new();
        let outs = targets.iter().filter(|t| matches!(t, Target::Out(_))).count();
        let mut out: BTreeMap<i32, SumPoly> = BTreeMap::new();
        for (key, c) in m.terms() {
            let mut mono = Mono::default();
            let mut evaluated = Vec::with_capacity(2);
            for (s, t) in key.iter().zip(targets) {
                match t {
                    Target::Out(j) => mono[*j] = *s,
                    _ => evaluated.push((*s, *t)),
                }
            }
            if sorted_tail && !tail_sorted(&mono, outs) {
                continue;
            }
            let ckey: Vec<Slot> = evaluated
                .iter()
                .map(|(s, t)| Slot {
                    bp: s.bp,
                    order: s.order | if *t == Target::Sigma { 0x80 } else { 0 },
                })
                .collect();
            if !cache.contains_key(&ckey) {
                let mut s = local.basis(evaluated[0].0, evaluated[0].1)?;
                for &(slot, t) in &evaluated[1..] {
                    s = s.mul(&local.basis(slot, t)?)?;
                }
                cache.insert(ckey.clone(), s);
            }
            let s = &cache[&ckey];
            if s.hi() < hi {
                return Err(Error::precision("bracket expansion", hi as i64, s.hi() as i64));
            }
            for (e, se) in s.terms() {
                if e >= hi {
                    break;
                }
                out.entry(e)
                    .or_default()
                    .entry(mono)
                    .or_default()
                    .add_product(c, se);
            }
        }
        Ok(out.into_iter().map(|(e, p)| (e, finish(p))).collect())
    }

    /// F_g = 1/(2-2g) Σ_a Res ω_{g,1} Φ for g ≥ 2.
    pub fn f_g(&mut self, g: u32) -> Result<Coeff> {
        if let Some(v) = self.fg.get(&g) {
            return Ok(v.clone());
        }
        let v = self.f_g_shifted(g, &Coeff::zero())?;
        self.fg.insert(g, v.clone());
        Ok(v)
    }

    /// F_g computed with Φ replaced by Φ + `shift` at every branchpoint.
    pub fn f_g_shifted(&mut self, g: u32, shift: &Coeff) -> Result<Coeff> {
        if g < 2 {
            return Err(Error::Domain(format!(
                "F_{g} is not defined by the recursion (g ≥ 2 required)"
            )));
        }
        let w1 = self.omega(g, 1)?;
        let acc = self.pair_with_phi(&w1, shift)?;
        let c = acc.coeff(&[]);
        Ok(&c * &Coeff::from_frac(1, 2 - 2 * g as i64))
    }

    /// Σ_a Res_{q→a} m(p₁, …, p_{n-1}, q) (Φ(q) + shift), as a form in n-1 variables.
    fn pair_with_phi(&self, m: &MultiForm, shift: &Coeff) -> Result<MultiForm> {
        let n = m.n();
        let mut out = MultiForm::zero(n - 1);
        for (key, c) in m.terms() {
            let last = key[n - 1];
            let local = &self.locals[last.bp as usize];
            let k = last.order as i32;
            // ζ^{-k} Φ(ζ) has residue Φ_{k-1}
            let mut phi = local.frame.phi.coeff(k - 1).map_err(|_| {
                Error::precision("primitive Φ", k as i64, local.frame.phi.hi() as i64)
            })?;
            if k == 1 {
                phi = &phi + shift;
            }
            if !phi.is_zero() {
                out.add_term(key[..n - 1].to_vec(), c * &phi)?;
            }
        }
        Ok(out)
    }

    /// Σ_a Res ω_{g,n+1}(…, q) Φ(q) - (2-2g-n) ω_{g,n}; zero when the dilaton
    /// equation holds.
    pub fn dilaton_residual(&mut self, g: u32, n: usize) -> Result<MultiForm> {
        let upper = self.omega(g, n + 1)?;
        let lhs = self.pair_with_phi(&upper, &Coeff::zero())?;
        let factor = Coeff::from_int(2 - 2 * g as i64 - n as i64);
        if n == 0 {
            let f = self.f_g(g)?;
            let rhs = MultiForm::from_terms(0, [(vec![], &f * &factor)])?;
            return lhs.sub(&rhs);
        }
        let lower = self.omega(g, n)?;
        lhs.sub(&lower.scale(&factor))
    }

    pub fn dilaton_check(&mut self, g: u32, n: usize) -> Result<bool> {
        Ok(self.dilaton_residual(g, n)?.is_zero())
    }
}

#[derive(Clone, Copy, Debug)]
enum Job {
    /// ω_{g-1,n+1}(q, σq, J)
    Loop,
    /// ω_{h,1+|I|}(q, I) ω_{g-h,1+|I'|}(σq, I'), `mask` selecting I ⊆ J.
    Split { h: u32, mask: u32 },
}

/// Stable invariants that ω_{g,n} reads.
fn prerequisites(g: u32, n: usize) -> Vec<(u32, usize)> {
    let mut out = Vec::new();
    let stable = |h: u32, m: usize| 2 * h as i64 - 2 + m as i64 > 0;
    if g >= 1 && stable(g - 1, n + 1) {
        out.push((g - 1, n + 1));
    }
    for h in 0..=g {
        for m in 0..n {
            if stable(h, 1 + m) && (h, 1 + m) != (g, n) {
                out.push((h, 1 + m));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn tail_sorted(mono: &Mono, n: usize) -> bool {
    mono[1..=n.min(MAX_ARITY - 1)]
        .windows(2)
        .all(|w| w[0] <= w[1])
}

fn series_to_form(s: &LaurentSeries, key: Mono, hi: i32) -> Result<FormSeries> {
    if s.hi() < hi {
        return Err(Error::precision("bracket expansion", hi as i64, s.hi() as i64));
    }
    let mut out = FormSeries::new();
    for (e, c) in s.terms() {
        if e < hi && !c.is_zero() {
            out.entry(e).or_default().insert(key, c.clone());
        }
    }
    Ok(out)
}

/// B(side, p_j) expanded in ζ: Σ (k+1) u^k dz_j/(z_j-a)^{k+2}, u = ζ or σ(ζ).
fn bergman_factor(local: &Local, j: usize, side: Target, hi: i32) -> Result<FormSeries> {
    let a = local.frame.bp;
    let mut out = FormSeries::new();
    for k in 0..hi.max(0) {
        let mut key = Mono::default();
        key[j] = Slot::new(a, k as u32 + 2);
        match side {
            Target::Q => {
                out.entry(k)
                    .or_default()
                    .insert(key, Coeff::from_int(k as i64 + 1));
            }
            _ => {
                let s = local.b_sigma.get(k as usize).ok_or_else(|| {
                    Error::precision("σ powers", hi as i64, local.b_sigma.len() as i64)
                })?;
                if s.hi() < hi {
                    return Err(Error::precision("σ powers", hi as i64, s.hi() as i64));
                }
                for (e, c) in s.terms() {
                    if e < hi && !c.is_zero() {
                        accumulate(out.entry(e).or_default(), key, c.clone());
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Coefficients of A·B for exponents ≤ e_max, with disjoint variables merged.
fn product(a: &FormSeries, b: &FormSeries, e_max: i32, n: usize, sorted_tail: bool) -> FormSeries {
    let mut out: BTreeMap<i32, SumPoly> = BTreeMap::new();
    for (&ea, pa) in a {
        for (&eb, pb) in b {
            let e = ea + eb;
            if e > e_max {
                break;
            }
            let dst = out.entry(e).or_default();
            for (ka, ca) in pa {
                for (kb, cb) in pb {
                    let mut key = *ka;
                    for j in 1..n {
                        if !kb[j].is_empty() {
                            key[j] = kb[j];
                        }
                    }
                    if sorted_tail && !tail_sorted(&key, n - 1) {
                        continue;
                    }
                    dst.entry(key).or_default().add_product(ca, cb);
                }
            }
        }
    }
    out.into_iter()
        .map(|(e, p)| (e, finish(p)))
        .filter(|(_, p)| !p.is_empty())
        .collect()
}

/// The κ that makes the dilaton equation exact for (g, n) = (0, 3) on the
/// Airy curve. Computed once.
pub fn calibrated_kappa() -> &'static Rat {
    static KAPPA: OnceLock<Rat> = OnceLock::new();
    KAPPA.get_or_init(|| calibrate_kappa().expect("calibration on the Airy curve"))
}

/// Measures κ: with the uncalibrated kernel, ω₀,₃ ∝ κ and ω₀,₄ ∝ κ², so the
/// dilaton equation Res ω₀,₄Φ = -ω₀,₃ fixes κ.
pub fn calibrate_kappa() -> Result<Rat> {
    let airy = crate::catalog::airy();
    let mut t = OmegaTable::new(
        airy,
        EngineOptions {
            mode: KernelMode::General,
            kappa: rat_int(1),
            window: None,
            exhaustive: false,
        },
    )?;
    let w4 = t.omega(0, 4)?;
    let w3 = t.omega(0, 3)?;
    let lhs = t.pair_with_phi(&w4, &Coeff::zero())?;
    // κ² L = -κ R  ⇒  κ = -R/L, uniformly across all terms
    let mut kappa: Option<Coeff> = None;
    for (k, r) in w3.terms() {
        let l = lhs.coeff(k);
        if l.is_zero() {
            return Err(Error::Internal("dilaton pairing vanishes on a term of ω₀,₃".into()));
        }
        let ratio = &(-r) / &l;
        match &kappa {
            Some(k0) if *k0 != ratio => {
                return Err(Error::Internal("dilaton ratio is not uniform".into()))
            }
            _ => kappa = Some(ratio),
        }
    }
    if lhs.len() != w3.len() {
        return Err(Error::Internal("dilaton pairing has extra terms".into()));
    }
    kappa
        .and_then(|k| k.as_rat())
        .ok_or_else(|| Error::Internal("calibration constant is not rational".into()))
}

/// ω_{g,n} of a curve with the calibrated general kernel.
pub fn omega(c: &SpectralCurve, g: u32, n: usize, window: Option<i32>) -> Result<MultiForm> {
    OmegaTable::new(c.clone(), EngineOptions::default().with_window(window))?.omega(g, n)
}

pub fn f_g(c: &SpectralCurve, g: u32, window: Option<i32>) -> Result<Coeff> {
    OmegaTable::new(c.clone(), EngineOptions::default().with_window(window))?.f_g(g)
}

/// Dilaton check with the residual (zero iff the check passes).
pub fn dilaton_check(
    c: &SpectralCurve,
    g: u32,
    n: usize,
    window: Option<i32>,
) -> Result<(bool, MultiForm)> {
    let mut t = OmegaTable::new(c.clone(), EngineOptions::default().with_window(window))?;
    let r = t.dilaton_residual(g, n)?;
    Ok((r.is_zero(), r))
}

/// Pole-structure violations of a computed ω_{g,n}: order-1 terms, or orders
/// above 6g-4+2n.
pub fn pole_violations(m: &MultiForm, g: u32, n: usize) -> Vec<String> {
    let mut out = Vec::new();
    if m.has_residue_terms() {
        out.push("order-1 term present".to_string());
    }
    let bound = pole_bound(g, n);
    if m.max_order() > bound {
        out.push(format!("pole order {} exceeds {bound}", m.max_order()));
    }
    out
}

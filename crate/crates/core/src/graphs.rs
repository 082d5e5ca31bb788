//! Graph expansion of ω_{g,n}: trivalent vertices with an arrowed spanning
//! tree, evaluated by nested residues.
//!
//! Each vertex stands for one residue at a branchpoint. Its outgoing slots
//! are the left point q and the right point σ(q). Inner non-arrowed edges run
//! from a vertex to one of its ancestors, possibly itself. Vertices are
//! numbered in preorder, left subtree first, which makes the representation
//! canonical.
//!
//! Two enumerations are provided: [`enumerate_graphs`] unrolls the recursion
//! term by term, and [`enumerate_by_conditions`] searches all decorated trees
//! and keeps the ones satisfying the defining conditions. Tests require them
//! to agree.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::Serialize;

use crate::coeff::{Coeff, CoeffSum};
use crate::curve::{local_frame, LocalFrame, SpectralCurve, LOCAL_VAR};
use crate::engine::{calibrated_kappa, required_window};
use crate::error::{Error, Result};
use crate::form::{MultiForm, Slot};
use crate::kernel::{kernel, KernelMode, KernelSeries};
use crate::series::LaurentSeries;

/// Largest 2g-2+n accepted by the enumerators.
pub const MAX_EULER: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    fn from_index(i: usize) -> Side {
        if i == 0 {
            Side::Left
        } else {
            Side::Right
        }
    }
}

/// What occupies an outgoing slot of a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SlotEnd {
    /// Arrowed edge to a vertex.
    Child(usize),
    /// Non-arrowed edge to the leaf p_i, i ≥ 1.
    Leaf(usize),
    /// Non-arrowed edge to a slot of a vertex (possibly the same one).
    Inner(usize, Side),
}

/// One graph; vertex 0 hangs off the root p.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RecGraph {
    pub g: u32,
    pub n: usize,
    pub vertices: Vec<[SlotEnd; 2]>,
}

impl RecGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Parent vertex and slot of every vertex; `None` for vertex 0.
    pub fn parents(&self) -> Vec<Option<(usize, Side)>> {
        let mut out = vec![None; self.vertices.len()];
        for (v, slots) in self.vertices.iter().enumerate() {
            for (i, s) in slots.iter().enumerate() {
                if let SlotEnd::Child(c) = s {
                    if *c < out.len() {
                        out[*c] = Some((v, Side::from_index(i)));
                    }
                }
            }
        }
        out
    }

    /// True if `u` lies on the arrowed path from the root to `v` (u = v included).
    pub fn is_ancestor(&self, u: usize, v: usize) -> bool {
        let parents = self.parents();
        let mut cur = Some(v);
        let mut steps = 0;
        while let Some(c) = cur {
            if c == u {
                return true;
            }
            steps += 1;
            if steps > self.vertices.len() {
                return false;
            }
            cur = parents[c].map(|(p, _)| p);
        }
        false
    }

    /// Graphviz rendering; the right child carries a dot, as in the usual
    /// drawings.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph G {{");
        let _ = writeln!(s, "  p [shape=plaintext, label=\"p\"];");
        for v in 0..self.vertices.len() {
            let _ = writeln!(s, "  v{v} [shape=circle, label=\"\"];");
        }
        let _ = writeln!(s, "  p -> v0;");
        for (v, slots) in self.vertices.iter().enumerate() {
            for (i, end) in slots.iter().enumerate() {
                let tail = if i == 1 { ", arrowtail=dot, dir=both" } else { "" };
                match end {
                    SlotEnd::Child(c) => {
                        let _ = writeln!(s, "  v{v} -> v{c} [label=\"{}\"{tail}];", slot_label(i));
                    }
                    SlotEnd::Leaf(l) => {
                        let _ = writeln!(s, "  p{l} [shape=plaintext, label=\"p{l}\"];");
                        let _ = writeln!(s, "  v{v} -> p{l} [dir=none, label=\"{}\"];", slot_label(i));
                    }
                    SlotEnd::Inner(u, side) => {
                        // each inner edge once, from its deeper end
                        if (v, i) >= (*u, side.index()) {
                            let _ = writeln!(
                                s,
                                "  v{v} -> v{u} [dir=none, style=dashed, label=\"{}-{}\"];",
                                slot_label(i),
                                slot_label(side.index())
                            );
                        }
                    }
                }
            }
        }
        s.push_str("}\n");
        s
    }
}

fn slot_label(i: usize) -> &'static str {
    if i == 0 {
        "q"
    } else {
        "σq"
    }
}

fn check_size(g: u32, n: usize) -> Result<()> {
    let chi = 2 * g as i64 - 2 + n as i64;
    if chi <= 0 || n == 0 {
        return Err(Error::Domain(format!("(g, n) = ({g}, {n}) has no graph expansion")));
    }
    if chi > MAX_EULER as i64 {
        return Err(Error::Domain(format!(
            "graph enumeration is limited to 2g-2+n ≤ {MAX_EULER}, got {chi}"
        )));
    }
    Ok(())
}

/// Number of graphs by the unrolled recursion, without building them.
pub fn unroll_count(g: u32, n: usize) -> u64 {
    if g == 0 && n <= 1 {
        return 0;
    }
    if g == 0 && n == 2 {
        return 1;
    }
    let rest = n - 1;
    let mut total = if g >= 1 { unroll_count(g - 1, n + 1) } else { 0 };
    for h in 0..=g {
        for i in 0..=rest {
            if (h == 0 && i == 0) || (h == g && i == rest) {
                continue;
            }
            let ways = binomial(rest as u64, i as u64);
            total += ways * unroll_count(h, 1 + i) * unroll_count(g - h, 1 + rest - i);
        }
    }
    total
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, j| acc * (n - j) / (j + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Var {
    Leaf(usize),
    Slot(usize, Side),
}

#[derive(Clone)]
struct Partial {
    vertices: Vec<[Option<SlotEnd>; 2]>,
}

impl Partial {
    fn set(&mut self, v: usize, side: Side, e: SlotEnd) {
        self.vertices[v][side.index()] = Some(e);
    }
}

/// All graphs of ω_{g,n}, generated from the terms of the recursion.
pub fn enumerate_graphs(g: u32, n: usize) -> Result<Vec<RecGraph>> {
    check_size(g, n)?;
    let rest: Vec<Var> = (1..n).map(Var::Leaf).collect();
    let start = Partial { vertices: Vec::new() };
    let mut out = Vec::new();
    for p in unroll(g, Var::Leaf(0), &rest, start) {
        let vertices = p
            .vertices
            .into_iter()
            .map(|[l, r]| match (l, r) {
                (Some(l), Some(r)) => Ok([l, r]),
                _ => Err(Error::Internal("unfilled slot in unrolled graph".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(RecGraph { g, n, vertices });
    }
    Ok(out)
}

/// Expands ω_{g,1+|rest|}(first, rest) into the partial graph `st`.
fn unroll(g: u32, first: Var, rest: &[Var], mut st: Partial) -> Vec<Partial> {
    if g == 0 && rest.len() == 1 {
        // B(first, other); `first` is always a slot here
        let Var::Slot(v, s) = first else {
            return Vec::new();
        };
        match rest[0] {
            Var::Leaf(i) => st.set(v, s, SlotEnd::Leaf(i)),
            Var::Slot(u, t) => {
                st.set(v, s, SlotEnd::Inner(u, t));
                st.set(u, t, SlotEnd::Inner(v, s));
            }
        }
        return vec![st];
    }
    let id = st.vertices.len();
    st.vertices.push([None, None]);
    if let Var::Slot(p, s) = first {
        st.set(p, s, SlotEnd::Child(id));
    }
    let left = Var::Slot(id, Side::Left);
    let right = Var::Slot(id, Side::Right);
    let mut out = Vec::new();
    if g >= 1 {
        let mut inner = vec![right];
        inner.extend_from_slice(rest);
        out.extend(unroll(g - 1, left, &inner, st.clone()));
    }
    let k = rest.len();
    for h in 0..=g {
        for mask in 0u32..(1 << k) {
            let full = mask == (1 << k) - 1;
            if (h == 0 && mask == 0) || (h == g && full) {
                continue;
            }
            let inside: Vec<Var> = (0..k).filter(|j| mask >> j & 1 == 1).map(|j| rest[j]).collect();
            let outside: Vec<Var> = (0..k).filter(|j| mask >> j & 1 == 0).map(|j| rest[j]).collect();
            for sl in unroll(h, left, &inside, st.clone()) {
                out.extend(unroll(g - h, right, &outside, sl));
            }
        }
    }
    out
}

/// Violated conditions of the defining list, as (number, message); empty
/// when the graph belongs to the set for (g, n).
pub fn check_conditions(gr: &RecGraph) -> Vec<(u8, String)> {
    let mut bad = Vec::new();
    let g = gr.g as usize;
    let k = gr.n.saturating_sub(1);
    let nv = gr.vertices.len();
    if nv != 2 * g + k - 1 {
        bad.push((1, format!("{nv} vertices, expected {}", 2 * g + k - 1)));
    }
    // leaves p_1..p_k, each on exactly one slot
    let mut leaf_hits = vec![0usize; k + 1];
    let mut inner_ends = 0usize;
    let mut arrowed_into = vec![0usize; nv];
    for (v, slots) in gr.vertices.iter().enumerate() {
        for (i, end) in slots.iter().enumerate() {
            match *end {
                SlotEnd::Leaf(l) if (1..=k).contains(&l) => leaf_hits[l] += 1,
                SlotEnd::Leaf(l) => bad.push((3, format!("unknown leaf p{l}"))),
                SlotEnd::Child(c) if c < nv && c != 0 => arrowed_into[c] += 1,
                SlotEnd::Child(c) => bad.push((8, format!("arrowed edge into v{c}"))),
                SlotEnd::Inner(u, t) => {
                    inner_ends += 1;
                    let back = gr.vertices.get(u).map(|s| s[t.index()]);
                    if back != Some(SlotEnd::Inner(v, Side::from_index(i))) {
                        bad.push((9, format!("inner edge at v{v} has no matching end")));
                    }
                }
            }
        }
    }
    if leaf_hits[1..].iter().any(|&h| h != 1) {
        bad.push((3, "each leaf must be attached exactly once".into()));
    }
    // p is 1-valent with the arrowed edge into vertex 0
    if nv > 0 && gr.parents()[0].is_some() {
        bad.push((6, "vertex 0 must hang off the root".into()));
    }
    if inner_ends % 2 != 0 {
        bad.push((9, "odd number of inner edge ends".into()));
    }
    let inner = inner_ends / 2;
    let arrowed = 1 + arrowed_into.iter().sum::<usize>();
    let plain = k + inner;
    if arrowed + plain != 3 * g + 2 * k - 1 {
        bad.push((4, format!("{} edges, expected {}", arrowed + plain, 3 * g + 2 * k - 1)));
    }
    if plain != k + g || arrowed != 2 * g + k - 1 {
        bad.push((5, format!("{plain} non-arrowed and {arrowed} arrowed edges")));
    }
    // spanning tree: every vertex but 0 has exactly one parent, and all are reachable
    if arrowed_into.iter().skip(1).any(|&c| c != 1) {
        bad.push((8, "arrowed edges do not form a tree".into()));
    } else if (0..nv).any(|v| !gr.is_ancestor(0, v)) {
        bad.push((8, "arrowed tree does not span".into()));
    }
    if inner != g {
        bad.push((9, format!("{inner} inner edges, expected {g}")));
    }
    for (v, slots) in gr.vertices.iter().enumerate() {
        for end in slots {
            if let SlotEnd::Inner(u, _) = *end {
                if u < nv && !gr.is_ancestor(u, v) && !gr.is_ancestor(v, u) {
                    bad.push((9, format!("inner edge v{v}-v{u} joins unrelated vertices")));
                }
            }
        }
        // arrowed edge beside an inner edge down to a descendant: arrow on the left
        if let [SlotEnd::Inner(u, _), SlotEnd::Child(_)] = *slots {
            if u != v && gr.is_ancestor(v, u) {
                bad.push((10, format!("v{v} has its arrowed child on the right")));
            }
        }
    }
    bad
}

/// All graphs of ω_{g,n} found by searching decorated binary trees and
/// keeping those that satisfy every condition.
pub fn enumerate_by_conditions(g: u32, n: usize) -> Result<Vec<RecGraph>> {
    check_size(g, n)?;
    let k = n - 1;
    let nv = 2 * g as usize + k - 1;
    let mut out = BTreeSet::new();
    for shape in shapes(nv) {
        let free: Vec<(usize, Side)> = shape
            .iter()
            .enumerate()
            .flat_map(|(v, s)| {
                (0..2).filter(move |&i| s[i].is_none()).map(move |i| (v, Side::from_index(i)))
            })
            .collect();
        let mut assign: Vec<Option<SlotEnd>> = vec![None; free.len()];
        place_leaves(1, k, &free, &mut assign, &mut |assign: &[Option<SlotEnd>]| {
            let open: Vec<usize> = (0..free.len()).filter(|&i| assign[i].is_none()).collect();
            for pairing in matchings(&open) {
                let mut vertices: Vec<[SlotEnd; 2]> = shape
                    .iter()
                    .map(|s| [s[0].unwrap_or(SlotEnd::Leaf(0)), s[1].unwrap_or(SlotEnd::Leaf(0))])
                    .collect();
                for (i, &(v, side)) in free.iter().enumerate() {
                    if let Some(e) = assign[i] {
                        vertices[v][side.index()] = e;
                    }
                }
                for &(i, j) in &pairing {
                    let (v, s) = free[i];
                    let (u, t) = free[j];
                    vertices[v][s.index()] = SlotEnd::Inner(u, t);
                    vertices[u][t.index()] = SlotEnd::Inner(v, s);
                }
                let gr = RecGraph { g, n, vertices };
                if check_conditions(&gr).is_empty() {
                    out.insert(gr);
                }
            }
        });
    }
    Ok(out.into_iter().collect())
}

/// Planar binary trees with `nv` vertices in preorder; a slot is `None` when
/// it carries no arrowed child.
fn shapes(nv: usize) -> Vec<Vec<[Option<SlotEnd>; 2]>> {
    fn build(nv: usize, offset: usize) -> Vec<Vec<[Option<SlotEnd>; 2]>> {
        if nv == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for nl in 0..nv {
            let nr = nv - 1 - nl;
            for l in build(nl, offset + 1) {
                for r in build(nr, offset + 1 + nl) {
                    let left = (nl > 0).then_some(SlotEnd::Child(offset + 1));
                    let right = (nr > 0).then_some(SlotEnd::Child(offset + 1 + nl));
                    let mut t = vec![[left, right]];
                    t.extend(l.iter().cloned());
                    t.extend(r.iter().cloned());
                    out.push(t);
                }
            }
        }
        out
    }
    build(nv, 0)
}

fn place_leaves(
    next: usize,
    k: usize,
    free: &[(usize, Side)],
    assign: &mut Vec<Option<SlotEnd>>,
    f: &mut dyn FnMut(&[Option<SlotEnd>]),
) {
    if next > k {
        f(assign);
        return;
    }
    for i in 0..free.len() {
        if assign[i].is_none() {
            assign[i] = Some(SlotEnd::Leaf(next));
            place_leaves(next + 1, k, free, assign, f);
            assign[i] = None;
        }
    }
}

/// Perfect matchings of a list of indices.
fn matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    if items.len() % 2 == 1 {
        return Vec::new();
    }
    let first = items[0];
    let mut out = Vec::new();
    for j in 1..items.len() {
        let rest: Vec<usize> = items[1..].iter().copied().filter(|&x| x != items[j]).collect();
        for mut m in matchings(&rest) {
            m.insert(0, (first, items[j]));
            out.push(m);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Evaluation

/// Variable of a partially evaluated weight: a leaf p_i (p = p_0), or a slot
/// of a vertex that has not been integrated yet.
fn leaf_var(i: usize) -> u16 {
    i as u16
}

fn slot_var(v: usize, side: Side) -> u16 {
    64 + 2 * v as u16 + side.index() as u16
}

/// Form in named variables, each factor dz/(z-a)^k.
type GForm = BTreeMap<Vec<(u16, Slot)>, Coeff>;

/// Series in ζ with form coefficients, exact for exponents below `hi`.
struct ZForm {
    hi: i32,
    terms: BTreeMap<i32, GForm>,
}

impl ZForm {
    fn lo(&self) -> i32 {
        self.terms.keys().next().copied().unwrap_or(self.hi)
    }

    fn mul(&self, o: &ZForm) -> ZForm {
        let hi = (self.lo() + o.hi).min(o.lo() + self.hi);
        let mut acc: BTreeMap<i32, HashMap<Vec<(u16, Slot)>, CoeffSum>> = BTreeMap::new();
        for (&ea, fa) in &self.terms {
            for (&eb, fb) in &o.terms {
                let e = ea + eb;
                if e >= hi {
                    break;
                }
                let dst = acc.entry(e).or_default();
                for (ka, ca) in fa {
                    for (kb, cb) in fb {
                        let mut key = ka.clone();
                        key.extend_from_slice(kb);
                        key.sort();
                        dst.entry(key).or_default().add_product(ca, cb);
                    }
                }
            }
        }
        ZForm {
            hi,
            terms: collect(acc),
        }
    }
}

fn collect(acc: BTreeMap<i32, HashMap<Vec<(u16, Slot)>, CoeffSum>>) -> BTreeMap<i32, GForm> {
    acc.into_iter()
        .map(|(e, m)| {
            let f: GForm = m
                .into_iter()
                .map(|(k, s)| (k, s.finish()))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            (e, f)
        })
        .filter(|(_, f)| !f.is_empty())
        .collect()
}

/// Series data at one branchpoint.
struct Site {
    frame: LocalFrame,
    kernel: KernelSeries,
    /// Expansions of dz/(z-b)^k at q (index 0) and at σ(q) with dσ (index 1).
    basis: HashMap<(Slot, usize), LaurentSeries>,
}

impl Site {
    fn new(curve: &SpectralCurve, bp: usize, w: i32) -> Result<Site> {
        let frame = local_frame(curve, bp, w)?;
        let kernel = kernel(curve, bp, w, KernelMode::General, calibrated_kappa())?;
        Ok(Site {
            frame,
            kernel,
            basis: HashMap::new(),
        })
    }

    fn basis(&mut self, bps: &[Coeff], s: Slot, side: Side) -> Result<LaurentSeries> {
        if let Some(b) = self.basis.get(&(s, side.index())) {
            return Ok(b.clone());
        }
        let w = self.frame.window;
        let shift = &self.frame.a - &bps[s.bp as usize];
        let point = match side {
            Side::Left => LaurentSeries::from_poly(LOCAL_VAR, &[shift, Coeff::one()], w + 1),
            Side::Right => self
                .frame
                .sigma
                .add(&LaurentSeries::from_poly(LOCAL_VAR, &[shift], w + 1))?,
        };
        let mut b = point.pow(-(s.order as i32))?;
        if side == Side::Right {
            b = b.mul(&self.frame.dsigma)?;
        }
        self.basis.insert((s, side.index()), b.clone());
        Ok(b)
    }

    /// B(side point, u) = Σ_k (k+1) s^k du/(u-a)^{k+2} with s = ζ or σ(ζ).
    fn bergman(&self, side: Side, u: u16) -> Result<ZForm> {
        let w = self.frame.window;
        let a = self.frame.bp;
        let mut acc: BTreeMap<i32, HashMap<Vec<(u16, Slot)>, CoeffSum>> = BTreeMap::new();
        let mut hi = w;
        let mut pw = LaurentSeries::one(LOCAL_VAR, w + 1);
        if side == Side::Right {
            pw = pw.mul(&self.frame.dsigma)?;
        }
        for k in 0..w {
            let key = vec![(u, Slot::new(a, k as u32 + 2))];
            let c = Coeff::from_int(k as i64 + 1);
            match side {
                Side::Left => {
                    acc.entry(k).or_default().entry(key).or_default().add(&c);
                }
                Side::Right => {
                    hi = hi.min(pw.hi());
                    for (e, se) in pw.terms() {
                        if e < w && !se.is_zero() {
                            acc.entry(e).or_default().entry(key.clone()).or_default().add_product(&c, se);
                        }
                    }
                    pw = pw.mul(&self.frame.sigma)?;
                }
            }
        }
        Ok(ZForm {
            hi,
            terms: collect(acc),
        })
    }

    /// B(q, σ(q)) = σ' dζ² / (ζ - σ(ζ))².
    fn bergman_loop(&self) -> Result<ZForm> {
        let w = self.frame.window;
        let diff = LaurentSeries::identity(LOCAL_VAR, w + 1).sub(&self.frame.sigma)?;
        let s = self.frame.dsigma.mul(&diff.pow(-2)?)?;
        Ok(series_zform(&s, Vec::new()))
    }
}

fn series_zform(s: &LaurentSeries, key: Vec<(u16, Slot)>) -> ZForm {
    let mut terms = BTreeMap::new();
    for (e, c) in s.terms() {
        if !c.is_zero() {
            let mut f = GForm::new();
            f.insert(key.clone(), c.clone());
            terms.insert(e, f);
        }
    }
    ZForm { hi: s.hi(), terms }
}

/// Expands the variables of `f` that are slots of vertex `v` at q or σ(q).
fn expand_at(site: &mut Site, bps: &[Coeff], f: &GForm, v: usize) -> Result<ZForm> {
    let lv = slot_var(v, Side::Left);
    let rv = slot_var(v, Side::Right);
    let mut acc: BTreeMap<i32, HashMap<Vec<(u16, Slot)>, CoeffSum>> = BTreeMap::new();
    let mut hi = i32::MAX;
    let mut cache: HashMap<Vec<(u16, Slot)>, LaurentSeries> = HashMap::new();
    for (key, c) in f {
        let (here, keep): (Vec<_>, Vec<_>) = key.iter().partition(|(x, _)| *x == lv || *x == rv);
        let here: Vec<(u16, Slot)> = here.into_iter().copied().collect();
        let keep: Vec<(u16, Slot)> = keep.into_iter().copied().collect();
        let s = match cache.get(&here) {
            Some(s) => s.clone(),
            None => {
                let mut s = LaurentSeries::one(LOCAL_VAR, site.frame.window + 1);
                for &(x, slot) in &here {
                    let side = if x == lv { Side::Left } else { Side::Right };
                    s = s.mul(&site.basis(bps, slot, side)?)?;
                }
                cache.insert(here.clone(), s.clone());
                s
            }
        };
        hi = hi.min(s.hi());
        for (e, se) in s.terms() {
            if !se.is_zero() {
                acc.entry(e).or_default().entry(keep.clone()).or_default().add_product(c, se);
            }
        }
    }
    Ok(ZForm {
        hi,
        terms: collect(acc),
    })
}

/// Weight of one graph for one colouring of its vertices by branchpoints.
pub fn graph_weight(gr: &RecGraph, curve: &SpectralCurve, colors: &[usize], window: i32) -> Result<MultiForm> {
    let mut sites: HashMap<usize, Site> = HashMap::new();
    weight_with(gr, curve, colors, window, &mut sites)
}

fn weight_with(
    gr: &RecGraph,
    curve: &SpectralCurve,
    colors: &[usize],
    window: i32,
    sites: &mut HashMap<usize, Site>,
) -> Result<MultiForm> {
    if colors.len() != gr.vertices.len() {
        return Err(Error::Validation("one colour per vertex required".into()));
    }
    let bps: Vec<Coeff> = curve.branchpoints.iter().map(|b| b.a.clone()).collect();
    let parents = gr.parents();
    let mut values: Vec<Option<GForm>> = vec![None; gr.vertices.len()];
    // preorder numbering: children come after their parents
    for v in (0..gr.vertices.len()).rev() {
        let a = colors[v];
        if a >= bps.len() {
            return Err(Error::Validation(format!("no branchpoint with index {a}")));
        }
        if !sites.contains_key(&a) {
            sites.insert(a, Site::new(curve, a, window)?);
        }
        let site = sites.get_mut(&a).expect("site inserted above");
        let mut product: Option<ZForm> = None;
        for (i, end) in gr.vertices[v].iter().enumerate() {
            let side = Side::from_index(i);
            let item = match *end {
                SlotEnd::Child(c) => {
                    let f = values[c]
                        .take()
                        .ok_or_else(|| Error::Internal("child evaluated out of order".into()))?;
                    Some(expand_at(site, &bps, &f, v)?)
                }
                SlotEnd::Leaf(l) => Some(site.bergman(side, leaf_var(l))?),
                SlotEnd::Inner(u, t) if u == v => {
                    (side == Side::Left && t == Side::Right).then(|| site.bergman_loop()).transpose()?
                }
                // edges down to descendants were expanded at the deeper end
                SlotEnd::Inner(u, _) if gr.is_ancestor(v, u) => None,
                SlotEnd::Inner(u, t) => Some(site.bergman(side, slot_var(u, t))?),
            };
            if let Some(item) = item {
                product = Some(match product {
                    None => item,
                    Some(p) => p.mul(&item),
                });
            }
        }
        let product = product.ok_or_else(|| Error::Internal("vertex without factors".into()))?;
        let head_var = match parents[v] {
            None => leaf_var(0),
            Some((p, s)) => slot_var(p, s),
        };
        let kernel = &site.kernel;
        let e_max = -1 - kernel.lo();
        if product.hi <= e_max {
            return Err(Error::precision("graph vertex product", e_max as i64 + 1, product.hi as i64));
        }
        let mut out: HashMap<Vec<(u16, Slot)>, CoeffSum> = HashMap::new();
        for (&e, f) in &product.terms {
            if e > e_max {
                break;
            }
            let i = -1 - e;
            if i >= kernel.hi() {
                return Err(Error::precision("kernel series", i as i64 + 1, kernel.hi() as i64));
            }
            for (order, kc) in kernel.at(i) {
                for (key, c) in f {
                    let mut k2 = key.clone();
                    k2.push((head_var, Slot::new(a, *order)));
                    k2.sort();
                    out.entry(k2).or_default().add_product(kc, c);
                }
            }
        }
        values[v] = Some(
            out.into_iter()
                .map(|(k, s)| (k, s.finish()))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        );
    }
    let top = values[0].take().unwrap_or_default();
    let mut m = MultiForm::zero(gr.n);
    for (key, c) in top {
        if key.len() != gr.n || key.iter().enumerate().any(|(i, (x, _))| *x != leaf_var(i)) {
            return Err(Error::Internal("graph weight has a dangling variable".into()));
        }
        m.add_term(key.into_iter().map(|(_, s)| s).collect(), c)?;
    }
    Ok(m)
}

/// Σ over colourings of the weight of one graph.
pub fn evaluate_graph(gr: &RecGraph, curve: &SpectralCurve, window: i32) -> Result<MultiForm> {
    let mut sites = HashMap::new();
    evaluate_with(gr, curve, window, &mut sites)
}

fn evaluate_with(
    gr: &RecGraph,
    curve: &SpectralCurve,
    window: i32,
    sites: &mut HashMap<usize, Site>,
) -> Result<MultiForm> {
    let nb = curve.branchpoints.len();
    let nv = gr.vertices.len();
    let mut total = MultiForm::zero(gr.n);
    let mut colors = vec![0usize; nv];
    loop {
        total = total.add(&weight_with(gr, curve, &colors, window, sites)?)?;
        // next colouring, odometer style
        let mut i = 0;
        while i < nv && colors[i] + 1 == nb {
            colors[i] = 0;
            i += 1;
        }
        if i == nv {
            break;
        }
        colors[i] += 1;
    }
    Ok(total)
}

/// Σ_G w(G) over all graphs of ω_{g,n}, growing the window on precision
/// shortfalls.
pub fn graph_sum(curve: &SpectralCurve, g: u32, n: usize) -> Result<MultiForm> {
    let graphs = enumerate_graphs(g, n)?;
    let mut w = required_window(g, n) + 2;
    let mut attempts = 0;
    loop {
        let mut sites = HashMap::new();
        let mut total = MultiForm::zero(n);
        let r: Result<()> = graphs.iter().try_for_each(|gr| {
            total = total.add(&evaluate_with(gr, curve, w, &mut sites)?)?;
            Ok(())
        });
        match r {
            Ok(()) => return Ok(total),
            Err(e) if e.is_precision() && attempts < 4 => {
                attempts += 1;
                w += 4;
            }
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unroll_counts() {
        assert_eq!(unroll_count(0, 3), 2);
        assert_eq!(unroll_count(1, 1), 1);
        assert_eq!(unroll_count(0, 4), 12);
        assert_eq!(unroll_count(1, 2), 4);
        assert_eq!(unroll_count(2, 1), 5);
    }

    #[test]
    fn enumerations_agree() {
        for (g, n) in [(0, 3), (1, 1), (0, 4), (1, 2), (2, 1), (0, 5), (1, 3)] {
            let mut a = enumerate_graphs(g, n).unwrap();
            a.sort();
            let b = enumerate_by_conditions(g, n).unwrap();
            assert_eq!(a.len() as u64, unroll_count(g, n), "({g},{n})");
            assert_eq!(a, b, "({g},{n})");
        }
    }

    #[test]
    fn right_arrow_beside_inner_edge_rejected() {
        let gr = RecGraph {
            g: 1,
            n: 2,
            vertices: vec![
                [SlotEnd::Inner(1, Side::Left), SlotEnd::Child(1)],
                [SlotEnd::Inner(0, Side::Left), SlotEnd::Leaf(1)],
            ],
        };
        assert!(check_conditions(&gr).iter().any(|(c, _)| *c == 10));
    }

    #[test]
    fn oversized_request_refused() {
        assert!(enumerate_graphs(3, 2).is_err());
    }

    #[test]
    fn dot_mentions_every_vertex() {
        let gr = &enumerate_graphs(0, 4).unwrap()[0];
        let d = gr.to_dot();
        assert!(d.contains("v0") && d.contains("v1") && d.contains("p3"));
    }
}

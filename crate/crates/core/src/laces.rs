//! Interval graphs, laces and the lace-expansion kernels.
//!
//! A graph on `[a, b]` is connected when `a` and `b` are edge endpoints and
//! every real `c` strictly between them lies strictly inside some edge. A
//! lace is a minimally connected graph; it is determined by the gaps
//! `m = (m_1, ..., m_{2N-1})` between its ordered endpoints
//! `s_1 < s_2 < t_1 <= s_3 < t_2 <= ... < t_N`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;


use crate::enumerate::{ConnectivitySeries, InequalityReport};
use crate::error::Error;
use crate::exec::{projected_nodes, Budget, Executor, Sequential};
use crate::field::LatticeField;
use crate::model::{dist_sq, Contact, LatticePoint, Model};
use crate::scalar::{Accumulator, Exact, Scalar};

pub type Edge = (usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntervalGraph {
    a: usize,
    b: usize,
    edges: BTreeSet<Edge>,
}

impl IntervalGraph {
    pub fn new(a: usize, b: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self, Error> {
        if a >= b {
            return Err(Error::InvalidParameter(format!("interval needs a < b, got [{a}, {b}]")));
        }
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        for &(s, t) in &edges {
            if !(a <= s && s < t && t <= b) {
                return Err(Error::EdgeOutOfRange { s, t, a, b });
            }
        }
        Ok(Self { a, b, edges })
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn contains(&self, edge: Edge) -> bool {
        self.edges.contains(&edge)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_subgraph_of(&self, other: &IntervalGraph) -> bool {
        self.edges.is_subset(&other.edges)
    }

    pub fn with_edge(&self, edge: Edge) -> IntervalGraph {
        let mut g = self.clone();
        g.edges.insert(edge);
        g
    }

    pub fn without_edge(&self, edge: Edge) -> IntervalGraph {
        let mut g = self.clone();
        g.edges.remove(&edge);
        g
    }

    /// Every graph on `[a, b]`, including the empty one.
    pub fn all_on(a: usize, b: usize) -> Vec<IntervalGraph> {
        let pairs = all_pairs(a, b);
        (0u64..1 << pairs.len())
            .map(|mask| IntervalGraph {
                a,
                b,
                edges: pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect(),
            })
            .collect()
    }
}

fn all_pairs(a: usize, b: usize) -> Vec<Edge> {
    (a..=b).flat_map(|s| (s + 1..=b).map(move |t| (s, t))).collect()
}

/// Both ends are edge endpoints, and every real `c` in `(a, b)` has an edge
/// with `s < c < t`.
pub fn is_connected(g: &IntervalGraph) -> bool {
    let (a, b) = (g.a, g.b);
    let touches = |p: usize| g.edges.iter().any(|&(s, t)| s == p || t == p);
    if !touches(a) || !touches(b) {
        return false;
    }
    // Integer points strictly inside.
    let integers = (a + 1..b).all(|c| g.edges.iter().any(|&(s, t)| s < c && c < t));
    // Open unit intervals (k, k + 1).
    let halves = (a..b).all(|k| g.edges.iter().any(|&(s, t)| s <= k && k < t));
    integers && halves
}

/// Connected, and removing any edge disconnects it.
pub fn is_minimally_connected(g: &IntervalGraph) -> bool {
    is_connected(g) && g.edges.iter().all(|&e| !is_connected(&g.without_edge(e)))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lace {
    graph: IntervalGraph,
    ordered: Vec<Edge>,
    composition: Vec<usize>,
}

impl Lace {
    /// Builds the lace on `[a, a + sum(m)]` with gap vector `m`.
    pub fn from_composition(a: usize, m: &[usize]) -> Result<Lace, Error> {
        if m.is_empty() || m.len() % 2 == 0 {
            return Err(Error::InvalidParameter(format!("composition needs 2N-1 parts, got {}", m.len())));
        }
        if !composition_pattern_ok(m) {
            return Err(Error::InvalidParameter(format!("{m:?} violates the lace gap pattern")));
        }
        let n_edges = (m.len() + 1) / 2;
        // p_0 = s_1, p_{2i-1} = s_{i+1}, p_{2i} = t_i, p_{2N-1} = t_N.
        let mut points = vec![a];
        for gap in m {
            let last = *points.last().expect("nonempty");
            points.push(last + gap);
        }
        let s = |i: usize| if i == 1 { points[0] } else { points[2 * i - 3] };
        let t = |i: usize| if i == n_edges { points[2 * n_edges - 1] } else { points[2 * i] };
        let ordered: Vec<Edge> = (1..=n_edges).map(|i| (s(i), t(i))).collect();
        let graph = IntervalGraph::new(a, *points.last().expect("nonempty"), ordered.iter().copied())?;
        Ok(Lace {
            graph,
            ordered,
            composition: m.to_vec(),
        })
    }

    pub fn graph(&self) -> &IntervalGraph {
        &self.graph
    }

    /// Edges `s_1 t_1, ..., s_N t_N` in order.
    pub fn edges(&self) -> &[Edge] {
        &self.ordered
    }

    pub fn edge_count(&self) -> usize {
        self.ordered.len()
    }

    pub fn composition(&self) -> &[usize] {
        &self.composition
    }
}

fn composition_from_edges(ordered: &[Edge]) -> Vec<usize> {
    let n = ordered.len();
    let mut points = vec![ordered[0].0];
    for i in 1..n {
        points.push(ordered[i].0);
        points.push(ordered[i - 1].1);
    }
    points.push(ordered[n - 1].1);
    points.windows(2).map(|w| w[1] - w[0]).collect()
}

fn composition_pattern_ok(m: &[usize]) -> bool {
    let last = m.len() - 1;
    m.iter().enumerate().all(|(k, &v)| {
        // 0-based k: k = 0 and k = last are m_1 and m_{2N-1}; odd k are m_{2j}.
        if k == 0 || k == last || k % 2 == 1 {
            v >= 1
        } else {
            true
        }
    })
}

/// The lace `L(G)` picked greedily from a connected graph.
pub fn lace_of(g: &IntervalGraph) -> Result<Lace, Error> {
    if !is_connected(g) {
        return Err(Error::NotConnected { a: g.a, b: g.b });
    }
    let max_t_from = |limit: usize| g.edges.iter().filter(|&&(s, _)| s < limit).map(|&(_, t)| t).max();
    let min_s_to = |t: usize| g.edges.iter().filter(|&&(_, u)| u == t).map(|&(s, _)| s).min();

    let t1 = g.edges.iter().filter(|&&(s, _)| s == g.a).map(|&(_, t)| t).max().expect("connected");
    let mut ordered = vec![(g.a, t1)];
    let mut reach = t1;
    while reach < g.b {
        let next = max_t_from(reach).expect("connected");
        if next <= reach {
            return Err(Error::NotConnected { a: g.a, b: g.b });
        }
        ordered.push((min_s_to(next).expect("edge exists"), next));
        reach = next;
    }
    let composition = composition_from_edges(&ordered);
    Ok(Lace {
        graph: IntervalGraph::new(g.a, g.b, ordered.iter().copied())?,
        ordered,
        composition,
    })
}

/// `edge ~ L`: adding the edge leaves the lace unchanged.
pub fn is_compatible(edge: Edge, lace: &Lace) -> Result<bool, Error> {
    let (a, b) = (lace.graph.a, lace.graph.b);
    let (s, t) = edge;
    if !(a <= s && s < t && t <= b) {
        return Err(Error::EdgeOutOfRange { s, t, a, b });
    }
    if lace.graph.contains(edge) {
        return Err(Error::EdgeInLace(s, t));
    }
    Ok(lace_of(&lace.graph.with_edge(edge))?.graph == lace.graph)
}

/// All gap vectors of `edges`-edge laces spanning `length`.
pub fn lace_compositions(length: usize, edges: usize) -> Vec<Vec<usize>> {
    if edges == 0 {
        return Vec::new();
    }
    let parts = 2 * edges - 1;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(parts);
    weak_compositions(length, parts, &mut current, &mut |m| {
        if composition_pattern_ok(m) {
            out.push(m.to_vec());
        }
    });
    out
}

fn weak_compositions(remaining: usize, parts: usize, current: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if current.len() + 1 == parts {
        current.push(remaining);
        visit(current);
        current.pop();
        return;
    }
    for v in 0..=remaining {
        current.push(v);
        weak_compositions(remaining - v, parts, current, visit);
        current.pop();
    }
}

/// `L^(N)[a, b]`, ordered by gap vector.
pub fn enumerate_laces(a: usize, b: usize, edges: usize) -> Vec<Lace> {
    if b <= a {
        return Vec::new();
    }
    lace_compositions(b - a, edges)
        .iter()
        .map(|m| Lace::from_composition(a, m).expect("pattern checked"))
        .collect()
}

/// Gap vectors summed over in the norm bounds: lace gap pattern, `m_1` at
/// least every other part, and `m_{2j} <= m_{2j+1}`.
pub fn compositions(n: usize, edges: usize) -> Vec<Vec<usize>> {
    lace_compositions(n, edges)
        .into_iter()
        .filter(|m| {
            let first_is_max = m.iter().all(|&v| v <= m[0]);
            let paired = (1..edges).all(|j| m[2 * j - 1] <= m[2 * j]);
            first_is_max && paired
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EdgeRole {
    InLace,
    Compatible,
    Free,
}

/// A lace on `[0, n]` with every pair `(s, t)` pre-classified.
#[derive(Clone, Debug)]
pub struct LaceTemplate {
    lace: Lace,
    n: usize,
    roles: Vec<EdgeRole>,
    /// For each time `t`, lace edges `(s, u)` with `s < t < u`.
    pending: Vec<Vec<Edge>>,
}

impl LaceTemplate {
    pub fn new(lace: Lace) -> Self {
        let n = lace.graph.b;
        assert_eq!(lace.graph.a, 0, "templates live on [0, n]");
        let mut roles = vec![EdgeRole::Free; (n + 1) * (n + 1)];
        for (s, t) in all_pairs(0, n) {
            roles[s * (n + 1) + t] = if lace.graph.contains((s, t)) {
                EdgeRole::InLace
            } else if is_compatible((s, t), &lace).expect("valid edge") {
                EdgeRole::Compatible
            } else {
                EdgeRole::Free
            };
        }
        let pending = (0..=n)
            .map(|t| lace.ordered.iter().copied().filter(|&(s, u)| s < t && t < u).collect())
            .collect();
        Self { lace, n, roles, pending }
    }

    pub fn lace(&self) -> &Lace {
        &self.lace
    }

    fn role(&self, s: usize, t: usize) -> EdgeRole {
        self.roles[s * (self.n + 1) + t]
    }

    /// Edges compatible with the lace.
    pub fn compatible_edges(&self) -> Vec<Edge> {
        all_pairs(0, self.n)
            .into_iter()
            .filter(|&(s, t)| self.role(s, t) == EdgeRole::Compatible)
            .collect()
    }

    /// `prod_{st in L} (-U) prod_{st ~ L} (1 - U)` for one walk, given as
    /// positions relative to any origin.
    pub fn walk_factor<S: Scalar>(&self, sites: &[LatticePoint], model: &Model<S>) -> S {
        let mut f = S::one();
        for t in 1..=self.n {
            for s in 0..t {
                let contact = model.potential().contact_sq(dist_sq(sites[s].coords(), sites[t].coords()));
                match pair_factor(self.role(s, t), contact, model) {
                    Some(v) => f = f * v,
                    None => return S::zero(),
                }
            }
        }
        f
    }
}

/// `None` stands for a zero factor.
fn pair_factor<S: Scalar>(role: EdgeRole, contact: Contact, model: &Model<S>) -> Option<S> {
    match (role, contact) {
        (EdgeRole::Free, _) => Some(S::one()),
        (EdgeRole::InLace, Contact::Overlap) => Some(-S::one()),
        (EdgeRole::InLace, Contact::Adjacent) => (!model.kappa().is_zero()).then(|| model.kappa().clone()),
        (EdgeRole::InLace, Contact::Apart) => None,
        (EdgeRole::Compatible, Contact::Overlap) => None,
        (EdgeRole::Compatible, Contact::Adjacent) => Some(model.one_plus_kappa().clone()),
        (EdgeRole::Compatible, Contact::Apart) => Some(S::one()),
    }
}

/// Walks of one lace, grown depth first. Branches die on a zero factor or
/// when a pending lace edge can no longer close to distance <= 1.
struct KernelSearch<'a, S: Scalar> {
    model: &'a Model<S>,
    template: &'a LaceTemplate,
    dim: usize,
    path: Vec<i32>,
    out: BTreeMap<LatticePoint, S::Acc>,
}

impl<S: Scalar> KernelSearch<'_, S> {
    fn place(&mut self, t: usize, step: usize, weight: &S) -> Option<S> {
        let d = self.dim;
        for k in 0..d {
            self.path[t * d + k] = self.path[(t - 1) * d + k] + self.model.step_coords(step)[k];
        }
        let (before, site) = self.path.split_at(t * d);
        let site = &site[..d];
        let reach = self.model.max_step_norm();
        for &(s, u) in &self.template.pending[t] {
            let gap = libm::sqrt(dist_sq(&before[s * d..(s + 1) * d], site) as f64);
            if gap > (u - t) as f64 * reach + 1.0 + 1e-9 {
                return None;
            }
        }
        let mut w = weight.clone() * self.model.step_weight(step).clone();
        for s in 0..t {
            let contact = self.model.potential().contact_sq(dist_sq(&before[s * d..(s + 1) * d], site));
            w = w * pair_factor(self.template.role(s, t), contact, self.model)?;
        }
        Some(w)
    }

    fn grow(&mut self, t: usize, weight: S) {
        if t > self.template.n {
            let n = self.template.n;
            let end = LatticePoint::new(self.path[n * self.dim..].to_vec());
            self.out.entry(end).or_default().add(&weight);
            return;
        }
        for step in 0..self.model.branching() {
            if let Some(w) = self.place(t, step, &weight) {
                self.grow(t + 1, w);
            }
        }
    }
}

fn kernel_branch<S: Scalar>(model: &Model<S>, template: &LaceTemplate, first: usize) -> BTreeMap<LatticePoint, S::Acc> {
    let mut search = KernelSearch {
        model,
        template,
        dim: model.dim(),
        path: vec![0; model.dim() * (template.n + 1)],
        out: BTreeMap::new(),
    };
    if let Some(w) = search.place(1, first, &S::one()) {
        search.grow(2, w);
    }
    search.out
}

/// `Pi_n^(N)` for every `N` at one `n`.
#[derive(Clone, Debug)]
pub struct KernelSet<S> {
    n: usize,
    /// Index `N - 1`.
    by_edges: Vec<LatticeField<S>>,
}

impl<S: Scalar> KernelSet<S> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest lace size included.
    pub fn max_edges(&self) -> usize {
        self.by_edges.len()
    }

    /// `Pi_n^(N)`; zero beyond the computed lace sizes.
    pub fn order(&self, edges: usize) -> LatticeField<S> {
        self.by_edges
            .get(edges.wrapping_sub(1))
            .cloned()
            .unwrap_or_else(|| LatticeField::zero(self.dimension(), self.n))
    }

    fn dimension(&self) -> usize {
        self.by_edges.first().map_or(1, |f| f.dim())
    }

    /// `Pi_n = sum_N Pi_n^(N)`.
    pub fn total(&self) -> LatticeField<S> {
        let dim = self.dimension();
        self.by_edges
            .iter()
            .fold(LatticeField::zero(dim, self.n), |acc, f| acc.add(f))
            .with_label(self.n)
    }
}

/// `Pi_n^(N)(x) = sum_w D(w) sum_{L in L^(N)[0,n]} prod_{st in L} (-U) prod_{st ~ L} (1 - U)`
/// for `N = 1..=max_edges`, laces and first steps distributed over `exec`.
pub fn pi_kernels_with<S: Scalar, E: Executor>(
    exec: &E,
    model: &Model<S>,
    n: usize,
    max_edges: usize,
    budget: &Budget,
) -> Result<KernelSet<S>, Error> {
    if n == 0 {
        return Err(Error::InvalidParameter("kernels start at n = 1".into()));
    }
    let dim = model.dim();
    let templates: Vec<Vec<LaceTemplate>> = (1..=max_edges)
        .map(|edges| enumerate_laces(0, n, edges).into_iter().map(LaceTemplate::new).collect())
        .collect();
    let lace_count: usize = templates.iter().map(Vec::len).sum();
    budget.check(lace_count as f64 * projected_nodes(model.branching(), n, false))?;

    let b = model.branching();
    let mut by_edges = Vec::with_capacity(max_edges);
    for (k, group) in templates.iter().enumerate() {
        let parts = exec.map(group.len() * b, |task| kernel_branch(model, &group[task / b], task % b));
        let mut merged: BTreeMap<LatticePoint, S::Acc> = BTreeMap::new();
        for part in parts {
            for (x, acc) in part {
                merged.entry(x).or_default().merge(&acc);
            }
        }
        let _ = k;
        by_edges.push(LatticeField::from_accumulators(dim, n, merged));
    }
    Ok(KernelSet { n, by_edges })
}

pub fn pi_kernels<S: Scalar>(model: &Model<S>, n: usize, budget: &Budget) -> Result<KernelSet<S>, Error> {
    pi_kernels_with(&Sequential, model, n, n, budget)
}

/// `Pi_n^(N)` for a single lace size.
pub fn pi_kernel<S: Scalar>(model: &Model<S>, n: usize, edges: usize, budget: &Budget) -> Result<LatticeField<S>, Error> {
    if edges == 0 {
        return Err(Error::InvalidParameter("laces have at least one edge".into()));
    }
    Ok(pi_kernels_with(&Sequential, model, n, edges, budget)?.order(edges))
}

/// Kernels `Pi_1, ..., Pi_nmax`.
#[derive(Clone, Debug)]
pub struct KernelSeries<S> {
    sets: Vec<KernelSet<S>>,
}

impl<S: Scalar> KernelSeries<S> {
    pub fn compute(model: &Model<S>, nmax: usize, budget: &Budget) -> Result<Self, Error> {
        Self::compute_with(&Sequential, model, nmax, budget)
    }

    pub fn compute_with<E: Executor>(exec: &E, model: &Model<S>, nmax: usize, budget: &Budget) -> Result<Self, Error> {
        let sets = (1..=nmax)
            .map(|n| pi_kernels_with(exec, model, n, n, budget))
            .collect::<Result<_, _>>()?;
        Ok(Self { sets })
    }

    pub fn nmax(&self) -> usize {
        self.sets.len()
    }

    pub fn set(&self, n: usize) -> &KernelSet<S> {
        &self.sets[n - 1]
    }

    pub fn total(&self, n: usize) -> LatticeField<S> {
        self.set(n).total()
    }

    /// `pi_n = sum_x Pi_n(x)`.
    pub fn pi(&self, n: usize) -> S {
        self.total(n).sum()
    }
}

/// Step distribution as a field labelled 1.
pub fn step_field<S: Scalar>(model: &Model<S>) -> LatticeField<S> {
    LatticeField::from_entries(model.dim(), 1, model.steps().map(|(x, w)| (x.clone(), w.clone())))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RecursionReport {
    pub n: usize,
    pub max_abs_residual: f64,
    pub max_abs_residual_text: String,
    pub residual_support: usize,
    pub holds: bool,
    pub exact: bool,
}

/// Residual absolute tolerance in float mode.
pub const RECURSION_TOLERANCE: f64 = 1e-12;

/// `C_n - D * C_{n-1} - sum_{m=1}^n Pi_m * C_{n-m}`.
pub fn recursion_residual<S: Scalar>(
    model: &Model<S>,
    connectivities: &ConnectivitySeries<S>,
    kernels: &KernelSeries<S>,
    n: usize,
) -> LatticeField<S> {
    let dfield = step_field(model);
    let mut predicted = dfield.convolve(connectivities.field(n - 1));
    for m in 1..=n {
        predicted = predicted.add(&kernels.total(m).convolve(connectivities.field(n - m)));
    }
    connectivities.field(n).sub(&predicted)
}

pub fn verify_recursion<S: Scalar>(
    model: &Model<S>,
    connectivities: &ConnectivitySeries<S>,
    kernels: &KernelSeries<S>,
    n: usize,
) -> RecursionReport {
    let residual = recursion_residual(model, connectivities, kernels, n);
    let max = residual.norm_inf();
    let holds = if S::EXACT {
        residual.is_empty()
    } else {
        max.to_f64() <= RECURSION_TOLERANCE
    };
    RecursionReport {
        n,
        max_abs_residual: max.to_f64(),
        max_abs_residual_text: max.to_text(),
        residual_support: residual.len(),
        holds,
        exact: S::EXACT,
    }
}

/// Enumerates `C_0..C_n` and `Pi_1..Pi_n` (laces up to `max_edges` edges)
/// and checks the recursion at `n`.
pub fn verify_recursion_for<S: Scalar>(
    model: &Model<S>,
    n: usize,
    max_edges: usize,
    budget: &Budget,
) -> Result<RecursionReport, Error> {
    let c = ConnectivitySeries::compute(model, n, budget)?;
    let sets = (1..=n)
        .map(|m| pi_kernels_with(&Sequential, model, m, max_edges.min(m), budget))
        .collect::<Result<_, _>>()?;
    Ok(verify_recursion(model, &c, &KernelSeries { sets }, n))
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct GraphSumReport {
    pub n: usize,
    pub walks: usize,
    pub connected_graphs: usize,
    pub max_abs_difference: f64,
    /// `sum_w D(w) |direct(w) - grouped(w)|`.
    pub weighted_residual: f64,
    pub holds: bool,
    pub exact: bool,
}

/// Largest `n` accepted by [`verify_graph_sum_equivalence`].
pub const GRAPH_SUM_MAX_N: usize = 5;

/// For every `n`-step walk from the origin, compares the sum over all
/// connected graphs on `[0, n]` of `prod (-U)` with the lace-grouped sum.
pub fn verify_graph_sum_equivalence<S: Scalar>(model: &Model<S>, n: usize, budget: &Budget) -> Result<GraphSumReport, Error> {
    if n > GRAPH_SUM_MAX_N {
        return Err(Error::TooManyGraphs { n, max: GRAPH_SUM_MAX_N });
    }
    if n == 0 {
        return Err(Error::InvalidParameter("graph sums need n >= 1".into()));
    }
    let pairs = all_pairs(0, n);
    let graph_count = 1u64 << pairs.len();
    budget.check(projected_nodes(model.branching(), n, false) * graph_count as f64)?;

    let connected: Vec<u64> = (0..graph_count)
        .filter(|&mask| {
            let g = IntervalGraph {
                a: 0,
                b: n,
                edges: pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect(),
            };
            is_connected(&g)
        })
        .collect();
    let templates: Vec<LaceTemplate> = (1..=n)
        .flat_map(|edges| enumerate_laces(0, n, edges))
        .map(LaceTemplate::new)
        .collect();

    let b = model.branching();
    let total_walks = b.pow(n as u32);
    let mut max_diff = 0.0f64;
    let mut weighted = S::Acc::default();
    let mut holds = true;
    let mut sites = vec![LatticePoint::origin(model.dim()); n + 1];
    for code in 0..total_walks {
        let mut c = code;
        let mut dw = S::one();
        for t in 1..=n {
            let step = c % b;
            c /= b;
            sites[t] = sites[t - 1].add(model.step_point(step));
            dw = dw * model.step_weight(step).clone();
        }
        let minus_u: Vec<S> = pairs.iter().map(|&(s, t)| -model.potential().value(&sites[t].sub(&sites[s]))).collect();
        let mut direct = S::Acc::default();
        for &mask in &connected {
            let mut term = S::one();
            for (i, f) in minus_u.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    term = term * f.clone();
                }
            }
            direct.add(&term);
        }
        let mut grouped = S::Acc::default();
        for tpl in &templates {
            grouped.add(&tpl.walk_factor(&sites, model));
        }
        let diff = direct.total() - grouped.total();
        if S::EXACT {
            holds &= diff.is_zero();
        } else {
            holds &= diff.to_f64().abs() <= RECURSION_TOLERANCE;
        }
        max_diff = max_diff.max(diff.to_f64().abs());
        weighted.add(&(dw * diff.abs_value()));
    }
    Ok(GraphSumReport {
        n,
        walks: total_walks,
        connected_graphs: connected.len(),
        max_abs_difference: max_diff,
        weighted_residual: weighted.total().to_f64(),
        holds,
        exact: S::EXACT,
    })
}

/// Which of the four kernel norm bounds to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum BoundKind {
    /// `||Pi_n^(1)||_1 <= (1 + 2d kappa) ||C_{n-1}||_inf`.
    I,
    /// `||Pi_n^(N)||_1` against odd/even leg norms, `N >= 2`.
    Ii,
    /// `|| |x|^g Pi_n^(1) ||_1 <= 2d kappa ||C_{n-1}||_inf`.
    Iii,
    /// `|| |x|^{2g} Pi_n^(N) ||_1` with weighted leg norms, `N >= 2`, `1 <= g <= 2`.
    Iv,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [BoundKind::I, BoundKind::Ii, BoundKind::Iii, BoundKind::Iv];

    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::I => "i",
            BoundKind::Ii => "ii",
            BoundKind::Iii => "iii",
            BoundKind::Iv => "iv",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KernelBoundReport {
    pub n: usize,
    pub edges: usize,
    pub which: BoundKind,
    pub gamma: f64,
    /// Whether the smallness condition holds, i.e. whether the bound is claimed.
    pub claimed: bool,
    pub report: InequalityReport,
}

/// Checks one kernel norm bound. Needs `C_0..C_{n-1}` and the kernels at `n`.
///
/// Bounds (i) and (ii) are evaluated in the backend arithmetic; the
/// `|x|`-weighted bounds (iii) and (iv) in floating point.
pub fn verify_kernel_bound<S: Scalar>(
    model: &Model<S>,
    connectivities: &ConnectivitySeries<S>,
    kernels: &KernelSet<S>,
    edges: usize,
    which: BoundKind,
    gamma: f64,
) -> Result<KernelBoundReport, Error> {
    let n = kernels.n();
    if connectivities.nmax() + 1 < n {
        return Err(Error::MissingInput(format!("connectivities up to {} needed", n - 1)));
    }
    match which {
        BoundKind::I | BoundKind::Iii if edges != 1 => {
            return Err(Error::InvalidParameter(format!("bound {} needs N = 1", which.name())))
        }
        BoundKind::Ii | BoundKind::Iv if edges < 2 => {
            return Err(Error::InvalidParameter(format!("bound {} needs N >= 2", which.name())))
        }
        BoundKind::Iii if !(gamma > 0.0) => {
            return Err(Error::InvalidParameter(format!("bound iii needs gamma > 0, got {gamma}")))
        }
        BoundKind::Iv if !(1.0..=2.0).contains(&gamma) => {
            return Err(Error::InvalidParameter(format!("bound iv needs 1 <= gamma <= 2, got {gamma}")))
        }
        _ => {}
    }
    let dim = model.dim();
    let two_d_kappa = S::from_f64((2 * dim) as f64) * model.kappa().clone();
    let kernel = kernels.order(edges);
    let c = |m: usize| connectivities.field(m);

    let report = match which {
        BoundKind::I => {
            let rhs = (S::one() + two_d_kappa) * c(n - 1).norm_inf();
            InequalityReport::new(&kernel.norm_l1(), &rhs)
        }
        BoundKind::Ii => {
            let mut sum = S::Acc::default();
            for m in compositions(n, edges) {
                let mut term = S::one();
                for (k, &mk) in m.iter().enumerate() {
                    // k even <-> odd 1-based index.
                    term = term * if k % 2 == 0 { c(mk).norm_inf() } else { c(mk).norm_l1() };
                }
                sum.add(&term);
            }
            let prefactor = S::from_exact(&Exact::from_integer(((2 * edges - 1) << (edges - 1)).into()))
                * (S::one() + two_d_kappa).pow_u32(edges as u32);
            InequalityReport::new(&kernel.norm_l1(), &(prefactor * sum.total()))
        }
        BoundKind::Iii => {
            let lhs = kernel.weighted_l1(gamma);
            let rhs = two_d_kappa.to_f64() * c(n - 1).norm_inf().to_f64();
            InequalityReport::new(&lhs, &rhs)
        }
        BoundKind::Iv => {
            let nn = edges as f64;
            let prefactor = libm::pow(nn - 1.0, 2.0 * gamma - 2.0)
                * (2.0 * nn - 1.0)
                * libm::pow(2.0, 2.0 * gamma - 2.0 + nn)
                * libm::pow(1.0 + two_d_kappa.to_f64(), nn);
            let mut total = crate::scalar::CompensatedSum::new();
            for m in compositions(n, edges) {
                let inf = |k: usize| c(m[k]).norm_inf().to_f64();
                let one = |k: usize| c(m[k]).norm_l1().to_f64();
                let odd: Vec<usize> = (0..m.len()).step_by(2).collect();
                let even: Vec<usize> = (1..m.len()).step_by(2).collect();
                let mut odd_sum = 0.0;
                for &i in odd.iter().skip(1) {
                    let mut t = c(m[i]).shifted_weighted_inf(gamma);
                    for &i2 in odd.iter().filter(|&&i2| i2 != i) {
                        t *= inf(i2);
                    }
                    odd_sum += t;
                }
                let mut even_sum = 0.0;
                for &j in &even {
                    let mut t = c(m[j]).shifted_weighted_l1(gamma);
                    for &j2 in even.iter().filter(|&&j2| j2 != j) {
                        t *= one(j2);
                    }
                    even_sum += t;
                }
                total.push(odd_sum * even_sum);
            }
            InequalityReport::new(&kernel.weighted_l1(2.0 * gamma), &(prefactor * total.value()))
        }
    };
    Ok(KernelBoundReport {
        n,
        edges,
        which,
        gamma,
        claimed: model.theorem1_condition(),
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::model::{build_step_distribution, nearest_neighbor_table, Family, Walk};
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Exact {
        Exact::new(BigInt::from(n), BigInt::from(d))
    }

    fn g(a: usize, b: usize, e: &[Edge]) -> IntervalGraph {
        IntervalGraph::new(a, b, e.iter().copied()).unwrap()
    }

    fn nn_exact(dim: usize, kappa: Exact) -> Model<Exact> {
        let d = build_step_distribution(Family::Table(nearest_neighbor_table(dim)), 1.0, dim, 1.0).unwrap();
        Model::exact(&d, kappa).unwrap()
    }

    #[test]
    fn connectivity_examples() {
        assert!(is_connected(&g(0, 3, &[(0, 3)])));
        assert!(is_connected(&g(0, 3, &[(0, 2), (1, 3)])));
        assert!(!is_connected(&g(0, 3, &[(0, 1), (2, 3)])));
        // Edges meeting at a point leave that point uncovered.
        assert!(!is_connected(&g(0, 2, &[(0, 1), (1, 2)])));
        assert!(!is_connected(&g(0, 3, &[])));
        assert!(is_connected(&g(0, 1, &[(0, 1)])));
    }

    #[test]
    fn lace_of_examples() {
        let l = lace_of(&g(0, 3, &[(0, 2), (1, 3)])).unwrap();
        assert_eq!(l.edges(), &[(0, 2), (1, 3)]);
        assert_eq!(l.composition(), &[1, 1, 1]);
        let l = lace_of(&g(0, 3, &[(0, 3), (0, 2), (1, 3)])).unwrap();
        assert_eq!(l.edges(), &[(0, 3)]);
        assert_eq!(
            lace_of(&g(0, 3, &[(0, 1), (2, 3)])),
            Err(Error::NotConnected { a: 0, b: 3 })
        );
    }

    #[test]
    fn compatibility_examples() {
        let span = lace_of(&g(0, 3, &[(0, 3)])).unwrap();
        assert_eq!(is_compatible((1, 2), &span), Ok(true));
        assert_eq!(is_compatible((0, 2), &span), Ok(true));
        assert_eq!(is_compatible((0, 3), &span), Err(Error::EdgeInLace(0, 3)));
        let two = lace_of(&g(0, 3, &[(0, 2), (1, 3)])).unwrap();
        assert_eq!(is_compatible((0, 3), &two), Ok(false));
        assert!(matches!(is_compatible((0, 4), &two), Err(Error::EdgeOutOfRange { .. })));
    }

    #[test]
    fn composition_examples() {
        assert_eq!(compositions(4, 2), vec![vec![2, 1, 1]]);
        assert_eq!(compositions(3, 2), vec![vec![1, 1, 1]]);
        assert!(compositions(2, 2).is_empty());
    }

    #[test]
    fn single_edge_laces() {
        for n in 1..6 {
            let laces = enumerate_laces(0, n, 1);
            assert_eq!(laces.len(), 1);
            assert_eq!(laces[0].edges(), &[(0, n)]);
        }
    }

    #[test]
    fn laces_match_brute_force() {
        for n in 1..=5 {
            let mut brute: BTreeMap<usize, BTreeSet<IntervalGraph>> = BTreeMap::new();
            for graph in IntervalGraph::all_on(0, n) {
                if is_minimally_connected(&graph) {
                    brute.entry(graph.len()).or_default().insert(graph);
                }
            }
            for edges in 1..=n {
                let listed: BTreeSet<IntervalGraph> =
                    enumerate_laces(0, n, edges).into_iter().map(|l| l.graph().clone()).collect();
                assert_eq!(listed, brute.remove(&edges).unwrap_or_default(), "n={n} N={edges}");
            }
            assert!(brute.is_empty());
        }
    }

    #[test]
    fn lace_from_composition_round_trips() {
        for n in 1..=6 {
            for edges in 1..=n {
                for lace in enumerate_laces(0, n, edges) {
                    assert_eq!(lace_of(lace.graph()).unwrap(), lace);
                    assert!(is_minimally_connected(lace.graph()));
                    assert_eq!(lace.composition().iter().sum::<usize>(), n);
                }
            }
        }
    }

    #[test]
    fn first_kernel_closed_form() {
        let kappa = q(1, 25);
        let m = nn_exact(2, kappa.clone());
        let p1 = pi_kernel(&m, 1, 1, &Budget::default()).unwrap();
        for (x, v) in p1.iter() {
            assert_eq!(x.norm_sq(), 1);
            assert_eq!(v, &(kappa.clone() * q(1, 4)));
        }
        assert_eq!(p1.sum(), q(4, 1) * kappa * q(1, 4));
    }

    #[test]
    fn second_kernel_d1_by_hand() {
        let m = nn_exact(1, q(0, 1));
        let p = pi_kernel(&m, 2, 1, &Budget::default()).unwrap();
        assert_eq!(p.get(&LatticePoint::origin(1)), q(-1, 2));
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn recursion_d1_small() {
        let m = nn_exact(1, q(0, 1));
        for n in 1..=4 {
            let r = verify_recursion_for(&m, n, n, &Budget::default()).unwrap();
            assert!(r.holds, "{r:?}");
        }
    }

    #[test]
    fn single_edge_kernels_stay_near_origin() {
        let d = build_step_distribution(Family::Exponential, 1.0, 2, 2.0).unwrap();
        let m = Model::float(&d, 0.05).unwrap();
        for n in 1..=4 {
            assert!(pi_kernel(&m, n, 1, &Budget::default()).unwrap().support_radius() <= 1.0);
        }
    }

    #[test]
    fn template_factor_matches_kernel_dfs() {
        let m = nn_exact(1, q(1, 10));
        let n = 3;
        for lace in (1..=n).flat_map(|e| enumerate_laces(0, n, e)) {
            let tpl = LaceTemplate::new(lace);
            let mut direct = Exact::zero();
            for code in 0..8u32 {
                let mut sites = vec![LatticePoint::origin(1)];
                for t in 0..n {
                    let step = if code >> t & 1 == 1 { 1 } else { -1 };
                    let next = sites.last().unwrap().add(&LatticePoint::new(vec![step]));
                    sites.push(next);
                }
                direct += q(1, 8) * tpl.walk_factor(&sites, &m);
            }
            let by_dfs: Exact = (0..m.branching())
                .map(|first| kernel_branch(&m, &tpl, first))
                .flat_map(|part| part.into_values().map(|a| a.total()))
                .fold(Exact::zero(), |acc, v| acc + v);
            assert_eq!(direct, by_dfs);
        }
        let _ = Walk::from_coords(&[&[0]]);
    }

    #[test]
    fn sharpness_witness() {
        let m = nn_exact(1, q(0, 1));
        let c = ConnectivitySeries::compute(&m, 1, &Budget::default()).unwrap();
        let k = pi_kernels(&m, 2, &Budget::default()).unwrap();
        let r = verify_kernel_bound(&m, &c, &k, 1, BoundKind::I, 1.0).unwrap();
        assert_eq!(r.report.lhs_text, "1/2");
        assert_eq!(r.report.rhs_text, "1/2");
        assert!(r.report.holds);
        assert!(r.claimed);
    }

    #[test]
    fn graph_sum_small() {
        let m = nn_exact(1, q(1, 10));
        for n in 1..=3 {
            let r = verify_graph_sum_equivalence(&m, n, &Budget::default()).unwrap();
            assert!(r.holds, "{r:?}");
        }
        assert!(matches!(
            verify_graph_sum_equivalence(&m, 6, &Budget::default()),
            Err(Error::TooManyGraphs { .. })
        ));
    }

    #[test]
    fn bound_argument_checks() {
        let m = nn_exact(1, q(0, 1));
        let c = ConnectivitySeries::compute(&m, 3, &Budget::default()).unwrap();
        let k = pi_kernels(&m, 3, &Budget::default()).unwrap();
        assert!(verify_kernel_bound(&m, &c, &k, 2, BoundKind::I, 1.0).is_err());
        assert!(verify_kernel_bound(&m, &c, &k, 1, BoundKind::Ii, 1.0).is_err());
        assert!(verify_kernel_bound(&m, &c, &k, 2, BoundKind::Iv, 3.0).is_err());
    }
}

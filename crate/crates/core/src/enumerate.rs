//! Exact enumeration of weighted walks.
//!
//! Walks are grown depth first. A revisited site kills the branch at once;
//! contact factors `(1 + kappa)` are multiplied in as each site is placed.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;


use crate::error::Error;
use crate::exec::{projected_nodes, Budget, Executor, Sequential};
use crate::field::LatticeField;
use crate::model::{dist_sq, walk_weight, Contact, LatticePoint, Model, Walk};
use crate::scalar::{Accumulator, Exact, Scalar};

/// Outcome of one numeric inequality `lhs <= rhs`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// Exact text of both sides (`p/q` in rational mode).
    pub lhs_text: String,
    pub rhs_text: String,
    pub holds: bool,
    pub exact: bool,
}

impl InequalityReport {
    pub fn new<S: Scalar>(lhs: &S, rhs: &S) -> Self {
        Self {
            lhs: lhs.to_f64(),
            rhs: rhs.to_f64(),
            lhs_text: lhs.to_text(),
            rhs_text: rhs.to_text(),
            holds: lhs.le_tol(rhs),
            exact: S::EXACT,
        }
    }
}

type Partial<S> = BTreeMap<LatticePoint, <S as Scalar>::Acc>;

fn merge_partials<S: Scalar>(parts: Vec<Partial<S>>) -> Partial<S> {
    let mut out: Partial<S> = BTreeMap::new();
    for part in parts {
        for (x, acc) in part {
            out.entry(x).or_default().merge(&acc);
        }
    }
    out
}

/// Depth-first growth of walks from the origin with self-avoidance pruning.
struct SawSearch<'a, S: Scalar> {
    model: &'a Model<S>,
    steps: usize,
    dim: usize,
    path: Vec<i32>,
    out: Partial<S>,
}

impl<'a, S: Scalar> SawSearch<'a, S> {
    fn new(model: &'a Model<S>, steps: usize) -> Self {
        let dim = model.dim();
        Self {
            model,
            steps,
            dim,
            path: vec![0; dim * (steps + 1)],
            out: BTreeMap::new(),
        }
    }

    /// Places a site after `len` placed sites; returns the updated weight or
    /// `None` on a revisit.
    fn place(&mut self, len: usize, step: usize, weight: &S) -> Option<S> {
        let d = self.dim;
        for k in 0..d {
            self.path[len * d + k] = self.path[(len - 1) * d + k] + self.model.step_coords(step)[k];
        }
        let mut w = weight.clone() * self.model.step_weight(step).clone();
        let (before, site) = self.path.split_at(len * d);
        let site = &site[..d];
        for s in 0..len {
            match self.model.potential().contact_sq(dist_sq(&before[s * d..(s + 1) * d], site)) {
                Contact::Overlap => return None,
                Contact::Adjacent => w = w * self.model.one_plus_kappa().clone(),
                Contact::Apart => {}
            }
        }
        Some(w)
    }

    fn grow(&mut self, len: usize, weight: S) {
        if len == self.steps + 1 {
            let end = LatticePoint::new(self.path[self.steps * self.dim..].to_vec());
            self.out.entry(end).or_default().add(&weight);
            return;
        }
        for step in 0..self.model.branching() {
            if let Some(w) = self.place(len, step, &weight) {
                self.grow(len + 1, w);
            }
        }
    }

    fn run_branch(mut self, first: usize) -> Partial<S> {
        if let Some(w) = self.place(1, first, &S::one()) {
            self.grow(2, w);
        }
        self.out
    }
}

/// `C_n(x)`: total weight of `n`-step walks from the origin to `x`.
pub fn connectivity<S: Scalar>(model: &Model<S>, steps: usize, budget: &Budget) -> Result<LatticeField<S>, Error> {
    connectivity_with(&Sequential, model, steps, budget)
}

/// [`connectivity`] with first-step branches handed to `exec`.
pub fn connectivity_with<S: Scalar, E: Executor>(
    exec: &E,
    model: &Model<S>,
    steps: usize,
    budget: &Budget,
) -> Result<LatticeField<S>, Error> {
    let dim = model.dim();
    if steps == 0 {
        return Ok(LatticeField::delta(dim));
    }
    budget.check(projected_nodes(model.branching(), steps, model.potential().is_enabled()))?;
    let parts = exec.map(model.branching(), |first| SawSearch::new(model, steps).run_branch(first));
    Ok(LatticeField::from_accumulators(dim, steps, merge_partials::<S>(parts)))
}

/// All walks of `steps` steps from the origin with nonzero weight, in
/// lexicographic order of their step indices.
pub fn walks_from_origin<S: Scalar>(model: &Model<S>, steps: usize, budget: &Budget) -> Result<Vec<Walk>, Error> {
    budget.check(projected_nodes(model.branching(), steps, true))?;
    let mut out = Vec::new();
    let mut sites = vec![LatticePoint::origin(model.dim())];
    collect_walks(model, steps, &mut sites, &mut out);
    Ok(out)
}

fn collect_walks<S: Scalar>(model: &Model<S>, steps: usize, sites: &mut Vec<LatticePoint>, out: &mut Vec<Walk>) {
    if sites.len() == steps + 1 {
        out.push(Walk::new(sites.clone()).expect("nonempty"));
        return;
    }
    for i in 0..model.branching() {
        let next = sites.last().expect("nonempty").add(model.step_point(i));
        if sites.contains(&next) && model.potential().is_enabled() {
            continue;
        }
        sites.push(next);
        collect_walks(model, steps, sites, out);
        sites.pop();
    }
}

/// Connectivities `C_0, ..., C_nmax` with their derived observables.
#[derive(Clone, Debug)]
pub struct ConnectivitySeries<S> {
    fields: Vec<LatticeField<S>>,
}

impl<S: Scalar> ConnectivitySeries<S> {
    pub fn compute(model: &Model<S>, nmax: usize, budget: &Budget) -> Result<Self, Error> {
        Self::compute_with(&Sequential, model, nmax, budget)
    }

    pub fn compute_with<E: Executor>(exec: &E, model: &Model<S>, nmax: usize, budget: &Budget) -> Result<Self, Error> {
        budget.check(projected_nodes(model.branching(), nmax, model.potential().is_enabled()))?;
        let fields = (0..=nmax)
            .map(|n| connectivity_with(exec, model, n, budget))
            .collect::<Result<_, _>>()?;
        Ok(Self { fields })
    }

    pub fn from_fields(fields: Vec<LatticeField<S>>) -> Self {
        Self { fields }
    }

    pub fn nmax(&self) -> usize {
        self.fields.len() - 1
    }

    pub fn field(&self, n: usize) -> &LatticeField<S> {
        &self.fields[n]
    }

    pub fn fields(&self) -> &[LatticeField<S>] {
        &self.fields
    }

    /// `c_n = sum_x C_n(x)`.
    pub fn partition_value(&self, n: usize) -> S {
        self.fields[n].sum()
    }

    /// `sum_x |x|^p C_n(x)`, `p` in {2, 4}.
    pub fn moment(&self, n: usize, p: u32) -> S {
        self.fields[n].moment(p)
    }

    /// Mean-square displacement `(1/c_n) sum_x |x|^2 C_n(x)`.
    pub fn msd(&self, n: usize) -> f64 {
        self.moment(n, 2).to_f64() / self.partition_value(n).to_f64()
    }

    /// Exact quotient of [`Self::msd`] in the backend's arithmetic.
    pub fn msd_exact(&self, n: usize) -> Option<S>
    where
        S: core::ops::Div<Output = S>,
    {
        let c = self.partition_value(n);
        (!c.is_zero()).then(|| self.moment(n, 2) / c)
    }
}

/// `c_{m+n} <= c_m c_n`.
pub fn verify_subadditivity<S: Scalar>(series: &ConnectivitySeries<S>, m: usize, n: usize) -> InequalityReport {
    let lhs = series.partition_value(m + n);
    let rhs = series.partition_value(m) * series.partition_value(n);
    InequalityReport::new(&lhs, &rhs)
}

/// Enumerates the three values it needs and checks `c_{m+n} <= c_m c_n`.
pub fn verify_subadditivity_for<S: Scalar>(
    model: &Model<S>,
    m: usize,
    n: usize,
    budget: &Budget,
) -> Result<InequalityReport, Error> {
    let series = ConnectivitySeries::compute(model, m + n, budget)?;
    Ok(verify_subadditivity(&series, m, n))
}

/// Lower bound `c_n >= 2^{-dn}` (walks stepping only into the closed
/// positive orthant) for every `n` in the series.
pub fn verify_lower_bounds<S: Scalar>(series: &ConnectivitySeries<S>, dim: usize) -> Vec<InequalityReport> {
    (1..=series.nmax())
        .map(|n| {
            let bound = Exact::new(1.into(), num_bigint::BigInt::from(2u32).pow((dim * n) as u32));
            InequalityReport::new(&S::from_exact(&bound), &series.partition_value(n))
        })
        .collect()
}

/// Upper bound `c_n <= c_1^n`.
pub fn verify_upper_bounds<S: Scalar>(series: &ConnectivitySeries<S>) -> Vec<InequalityReport> {
    let c1 = series.partition_value(1);
    (1..=series.nmax())
        .map(|n| InequalityReport::new(&series.partition_value(n), &c1.pow_u32(n as u32)))
        .collect()
}

/// Whether the contact-removing deformation of the suffix walks is available
/// at an endpoint: every suffix whose first contact with `w_j` is at distance
/// 1, at time `u`, can have `w'_u` moved onto `w_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub enum Deformation {
    Available,
    /// Some needed step `w_j - w'_{u-1}` or `w'_{u+1} - w_j` has `D = 0`.
    OutsideSupport,
    /// Some suffix first touches `w_j` at its last site, which is pinned to `y`.
    EndpointContact,
}

/// Key inequality between a fixed prefix and all suffixes, split by endpoint.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KeyInequalityReport {
    pub prefix: Vec<LatticePoint>,
    pub j: usize,
    pub suffix_steps: usize,
    pub endpoint: LatticePoint,
    pub deformation: Deformation,
    pub report: InequalityReport,
}

struct KeyTotals<S: Scalar> {
    origin: LatticePoint,
    lhs: Partial<S>,
    rhs: Partial<S>,
    deformation: BTreeMap<LatticePoint, Deformation>,
}

fn key_search<S: Scalar>(
    prefix: &Walk,
    j: usize,
    suffix_steps: usize,
    model: &Model<S>,
    budget: &Budget,
) -> Result<KeyTotals<S>, Error> {
    let m = prefix.len();
    if j >= m {
        return Err(Error::InvalidParameter(alloc::format!("need 0 <= j < {m}, got j = {j}")));
    }
    if suffix_steps == 0 {
        return Err(Error::InvalidParameter("suffix needs at least one step".into()));
    }
    if walk_weight(prefix, model).is_zero() {
        return Err(Error::ZeroWeightPrefix);
    }
    budget.check(projected_nodes(model.branching(), suffix_steps, true))?;
    let origin = prefix.end().clone();
    // Sites w_j .. w_{m-1}, relative to x.
    let blockers: Vec<Vec<i32>> = prefix.sites()[j..m].iter().map(|p| p.sub(&origin).into_coords()).collect();
    let mut search = KeySearch {
        inner: SawSearch::new(model, suffix_steps),
        blockers,
        lhs: BTreeMap::new(),
        rhs: BTreeMap::new(),
        deformation: BTreeMap::new(),
    };
    search.grow(1, S::one());
    Ok(KeyTotals {
        origin,
        lhs: search.lhs,
        rhs: search.rhs,
        deformation: search.deformation,
    })
}

/// For a fixed prefix `w` of `m` steps and each endpoint `y`, compares
///
/// `sum_{w': x -> y} W(w') prod_{j <= s < m, 0 < t <= n} (1 - U(w_s - w'_t))`
///
/// with the same sum where `s` starts at `j + 1`; `x = w_m`.
pub fn verify_key_inequality_all<S: Scalar>(
    prefix: &Walk,
    j: usize,
    suffix_steps: usize,
    model: &Model<S>,
    budget: &Budget,
) -> Result<Vec<KeyInequalityReport>, Error> {
    let totals = key_search(prefix, j, suffix_steps, model, budget)?;
    let endpoints: alloc::collections::BTreeSet<&LatticePoint> = totals.lhs.keys().chain(totals.rhs.keys()).collect();
    Ok(endpoints
        .into_iter()
        .map(|y| {
            let lhs = totals.lhs.get(y).map_or_else(S::zero, |a| a.total());
            let rhs = totals.rhs.get(y).map_or_else(S::zero, |a| a.total());
            KeyInequalityReport {
                prefix: prefix.sites().to_vec(),
                j,
                suffix_steps,
                endpoint: y.add(&totals.origin),
                deformation: totals.deformation.get(y).copied().unwrap_or(Deformation::Available),
                report: InequalityReport::new(&lhs, &rhs),
            }
        })
        .collect())
}

/// Single-endpoint form of [`verify_key_inequality_all`].
pub fn verify_key_inequality<S: Scalar>(
    prefix: &Walk,
    j: usize,
    suffix_steps: usize,
    endpoint: &LatticePoint,
    model: &Model<S>,
    budget: &Budget,
) -> Result<InequalityReport, Error> {
    let all = verify_key_inequality_all(prefix, j, suffix_steps, model, budget)?;
    Ok(all
        .into_iter()
        .find(|r| &r.endpoint == endpoint)
        .map(|r| r.report)
        .unwrap_or_else(|| InequalityReport::new(&S::zero(), &S::zero())))
}

/// The key inequality summed over all endpoints `y`, the form that enters
/// `c_{m+n} <= c_m c_n`.
pub fn verify_key_inequality_summed<S: Scalar>(
    prefix: &Walk,
    j: usize,
    suffix_steps: usize,
    model: &Model<S>,
    budget: &Budget,
) -> Result<InequalityReport, Error> {
    let totals = key_search(prefix, j, suffix_steps, model, budget)?;
    let sum = |p: &Partial<S>| {
        let mut acc = S::Acc::default();
        for a in p.values() {
            acc.merge(a);
        }
        acc.total()
    };
    Ok(InequalityReport::new(&sum(&totals.lhs), &sum(&totals.rhs)))
}

struct KeySearch<'a, S: Scalar> {
    inner: SawSearch<'a, S>,
    blockers: Vec<Vec<i32>>,
    lhs: Partial<S>,
    rhs: Partial<S>,
    deformation: BTreeMap<LatticePoint, Deformation>,
}

impl<S: Scalar> KeySearch<'_, S> {
    /// Deformation status of the current suffix, if it is at distance 1 from `w_j`.
    fn classify(&self) -> Option<Deformation> {
        let d = self.inner.dim;
        let n = self.inner.steps;
        let wj = &self.blockers[0];
        let site = |t: usize| &self.inner.path[t * d..(t + 1) * d];
        let dists: Vec<i64> = (1..=n).map(|t| dist_sq(wj, site(t))).collect();
        if dists.iter().any(|&q| q == 0) || !dists.iter().any(|&q| q == 1) {
            return None;
        }
        let u = 1 + dists.iter().position(|&q| q == 1).expect("checked");
        if u == n {
            return Some(Deformation::EndpointContact);
        }
        let in_support = |from: &[i32], to: &[i32]| {
            let step = LatticePoint::new(to.iter().zip(from).map(|(a, b)| a - b).collect());
            !self.inner.model.weight_of_step(&step).is_zero()
        };
        if in_support(site(u - 1), wj) && in_support(wj, site(u + 1)) {
            Some(Deformation::Available)
        } else {
            Some(Deformation::OutsideSupport)
        }
    }

    fn grow(&mut self, len: usize, weight: S) {
        let d = self.inner.dim;
        if len == self.inner.steps + 1 {
            // Cross factors with the prefix; the first blocker is w_j.
            let mut first = S::one();
            let mut rest = S::one();
            for (k, b) in self.blockers.iter().enumerate() {
                for t in 1..=self.inner.steps {
                    let site = &self.inner.path[t * d..(t + 1) * d];
                    let factor = match self.inner.model.potential().contact_sq(dist_sq(b, site)) {
                        Contact::Overlap => S::zero(),
                        Contact::Adjacent => self.inner.model.one_plus_kappa().clone(),
                        Contact::Apart => continue,
                    };
                    if k == 0 {
                        first = first * factor;
                    } else {
                        rest = rest * factor;
                    }
                }
            }
            let end = LatticePoint::new(self.inner.path[self.inner.steps * d..].to_vec());
            let r = weight * rest;
            if !r.is_zero() {
                if let Some(status) = self.classify() {
                    let slot = self.deformation.entry(end.clone()).or_insert(Deformation::Available);
                    *slot = (*slot).max(status);
                }
            }
            self.lhs.entry(end.clone()).or_default().add(&(r.clone() * first));
            self.rhs.entry(end).or_default().add(&r);
            return;
        }
        for step in 0..self.inner.model.branching() {
            if let Some(w) = self.inner.place(len, step, &weight) {
                self.grow(len + 1, w);
            }
        }
    }
}

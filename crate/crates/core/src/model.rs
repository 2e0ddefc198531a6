//! Lattice, step distributions, the contact potential and walk weights.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::Error;
use crate::scalar::{compensated_sum, Exact, Scalar};

/// A site of `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct LatticePoint(Vec<i32>);

impl LatticePoint {
    pub fn new(coords: Vec<i32>) -> Self {
        Self(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0; dim])
    }

    /// The unit vector along `axis`, multiplied by `sign`.
    pub fn unit(dim: usize, axis: usize, sign: i32) -> Self {
        let mut coords = vec![0; dim];
        coords[axis] = sign;
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<i32> {
        self.0
    }

    pub fn norm_sq(&self) -> i64 {
        norm_sq(&self.0)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq() as f64)
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> LatticePoint {
        LatticePoint(self.0.iter().map(|a| -a).collect())
    }

    /// Sorted absolute coordinates; equal for all images under the
    /// hyperoctahedral group.
    pub fn canonical(&self) -> Vec<i32> {
        let mut abs: Vec<i32> = self.0.iter().map(|c| c.abs()).collect();
        abs.sort_unstable();
        abs
    }

    /// Number of distinct images under signed coordinate permutations.
    pub fn orbit_size(&self) -> u64 {
        let canon = self.canonical();
        let d = canon.len() as u64;
        let mut count: u64 = (1..=d).product();
        let mut i = 0;
        while i < canon.len() {
            let mut j = i;
            while j < canon.len() && canon[j] == canon[i] {
                j += 1;
            }
            count /= (1..=(j - i) as u64).product::<u64>();
            i = j;
        }
        let nonzero = canon.iter().filter(|&&c| c != 0).count() as u32;
        count * 2u64.pow(nonzero)
    }
}

impl From<Vec<i32>> for LatticePoint {
    fn from(coords: Vec<i32>) -> Self {
        Self(coords)
    }
}

pub(crate) fn norm_sq(coords: &[i32]) -> i64 {
    coords.iter().map(|&c| (c as i64) * (c as i64)).sum()
}

pub(crate) fn dist_sq(a: &[i32], b: &[i32]) -> i64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = (x - y) as i64;
            d * d
        })
        .sum()
}

/// Radial profile used to build spread-out step distributions.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `h(xi) = exp(-xi)`.
    Exponential,
    /// `h(xi) = exp(-xi^2)`.
    Gaussian,
    /// Explicit weights; normalized on construction. No profile conditions
    /// are checked for tables.
    Table(Vec<(LatticePoint, Exact)>),
}

impl Family {
    /// Looks up a built-in profile by name.
    pub fn from_name(name: &str) -> Result<Family, Error> {
        match name {
            "exponential" | "exp" => Ok(Family::Exponential),
            "gaussian" | "gauss" => Ok(Family::Gaussian),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Exponential => "exponential",
            Family::Gaussian => "gaussian",
            Family::Table(_) => "table",
        }
    }

    fn profile(&self, xi: f64) -> f64 {
        match self {
            Family::Exponential => libm::exp(-xi),
            Family::Gaussian => libm::exp(-xi * xi),
            Family::Table(_) => unreachable!("tables have no profile"),
        }
    }
}

/// Nearest-neighbour table `D(±e_i) = 1/(2d)`.
pub fn nearest_neighbor_table(dim: usize) -> Vec<(LatticePoint, Exact)> {
    let w = Exact::new(1.into(), (2 * dim as i64).into());
    (0..dim)
        .flat_map(|axis| [-1, 1].map(|s| (LatticePoint::unit(dim, axis, s), w.clone())))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StepEntry {
    pub point: LatticePoint,
    pub weight: f64,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub exact: Option<Exact>,
}

/// A normalized, symmetric, finite-support jump distribution `D` on `Z^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDistribution {
    dim: usize,
    family: &'static str,
    entries: Vec<StepEntry>,
    cutoff_radius: f64,
    truncated_mass: f64,
    delta_empirical: f64,
    delta_analytic: Option<f64>,
}

/// Builds `D(x) = h(|x|/L) / sum_y h(|y|/L)` on `0 < |x| <= cutoff * L`.
///
/// For tables, `range` and `cutoff` are ignored and the table is validated
/// and normalized instead.
pub fn build_step_distribution(
    family: Family,
    range: f64,
    dim: usize,
    cutoff: f64,
) -> Result<StepDistribution, Error> {
    if dim == 0 {
        return Err(Error::InvalidDimension(dim));
    }
    match family {
        Family::Table(table) => StepDistribution::from_table(dim, table),
        profile => {
            if !(range.is_finite() && range > 0.0) {
                return Err(Error::InvalidParameter(format!("range L must be positive, got {range}")));
            }
            if !(cutoff.is_finite() && cutoff >= 1.0) {
                return Err(Error::InvalidParameter(format!("cutoff must be >= 1, got {cutoff}")));
            }
            StepDistribution::from_profile(profile, range, dim, cutoff)
        }
    }
}

/// Visits every point of the box `[-r, r]^dim` in lexicographic order.
fn for_each_in_box(dim: usize, r: i32, mut f: impl FnMut(&[i32])) {
    let mut x = vec![-r; dim];
    loop {
        f(&x);
        let mut axis = dim;
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            if x[axis] < r {
                x[axis] += 1;
                break;
            }
            x[axis] = -r;
        }
    }
}

impl StepDistribution {
    fn from_profile(family: Family, range: f64, dim: usize, cutoff: f64) -> Result<Self, Error> {
        let radius = cutoff * range;
        let radius_sq = radius * radius * (1.0 + 1e-12);
        let r = libm::floor(radius + 1e-9) as i32;

        // One profile value per squared norm keeps the table bit-exactly symmetric.
        let mut by_norm: BTreeMap<i64, f64> = BTreeMap::new();
        let mut h = |sq: i64| *by_norm.entry(sq).or_insert_with(|| family.profile(libm::sqrt(sq as f64) / range));

        let mut points = Vec::new();
        for_each_in_box(dim, r, |x| {
            let sq = norm_sq(x);
            if sq > 0 && (sq as f64) <= radius_sq {
                points.push(LatticePoint(x.to_vec()));
            }
        });
        if points.is_empty() {
            return Err(Error::EmptySupport { radius });
        }
        let raw: Vec<f64> = points.iter().map(|p| h(p.norm_sq())).collect();
        let z = compensated_sum(raw.iter().copied());

        let outer = 3.0 * radius;
        let outer_sq = outer * outer * (1.0 + 1e-12);
        let mut tail = Vec::new();
        let mut total = Vec::new();
        for_each_in_box(dim, libm::floor(outer + 1e-9) as i32, |x| {
            let sq = norm_sq(x);
            if sq > 0 && (sq as f64) <= outer_sq {
                let v = h(sq);
                total.push(v);
                if (sq as f64) > radius_sq {
                    tail.push(v);
                }
            }
        });
        let truncated_mass = compensated_sum(tail) / compensated_sum(total);

        let entries = points
            .into_iter()
            .zip(raw)
            .map(|(point, w)| StepEntry {
                point,
                weight: w / z,
                exact: None,
            })
            .collect();
        let delta_analytic = match family {
            Family::Exponential => Some(libm::exp(-1.0 / range)),
            _ => None,
        };
        Ok(Self::finish(dim, family.name(), entries, radius, truncated_mass, delta_analytic))
    }

    fn from_table(dim: usize, table: Vec<(LatticePoint, Exact)>) -> Result<Self, Error> {
        let mut weights: BTreeMap<LatticePoint, Exact> = BTreeMap::new();
        for (point, w) in table {
            if point.dim() != dim {
                return Err(Error::DimensionMismatch {
                    found: point.dim(),
                    expected: dim,
                    point: point.into_coords(),
                });
            }
            if point.is_origin() {
                if w.is_zero() {
                    continue;
                }
                return Err(Error::OriginWeight);
            }
            if w < Exact::zero() {
                return Err(Error::InvalidWeight(point.into_coords()));
            }
            if weights.insert(point.clone(), w).is_some() {
                return Err(Error::InvalidParameter(format!("duplicate table entry {:?}", point.coords())));
            }
        }
        weights.retain(|_, w| !w.is_zero());
        check_symmetric(&weights)?;
        let total: Exact = weights.values().fold(Exact::zero(), |acc, w| acc + w);
        if total.is_zero() {
            return Err(Error::EmptySupport { radius: 0.0 });
        }
        let mut radius: f64 = 0.0;
        let entries = weights
            .into_iter()
            .map(|(point, w)| {
                radius = radius.max(point.norm());
                let exact = w / &total;
                StepEntry {
                    point,
                    weight: exact.to_f64(),
                    exact: Some(exact),
                }
            })
            .collect();
        Ok(Self::finish(dim, "table", entries, radius, 0.0, None))
    }

    fn finish(
        dim: usize,
        family: &'static str,
        entries: Vec<StepEntry>,
        cutoff_radius: f64,
        truncated_mass: f64,
        delta_analytic: Option<f64>,
    ) -> Self {
        let mut dist = Self {
            dim,
            family,
            entries,
            cutoff_radius,
            truncated_mass,
            delta_empirical: 0.0,
            delta_analytic,
        };
        dist.delta_empirical = dist.neighbor_ratio_infimum(None);
        dist
    }

    /// Smallest `D(y)/D(x)` over `D(x) > 0`, `|x - y| = 1`, `y != 0`,
    /// optionally restricted to `|x|, |y| <= max_norm`.
    fn neighbor_ratio_infimum(&self, max_norm: Option<f64>) -> f64 {
        let inside = |p: &LatticePoint| max_norm.map_or(true, |m| p.norm() <= m + 1e-12);
        let mut best = f64::INFINITY;
        for entry in &self.entries {
            if !inside(&entry.point) {
                continue;
            }
            for axis in 0..self.dim {
                for sign in [-1, 1] {
                    let y = entry.point.add(&LatticePoint::unit(self.dim, axis, sign));
                    if y.is_origin() || !inside(&y) {
                        continue;
                    }
                    best = best.min(self.weight_at(&y) / entry.weight);
                }
            }
        }
        best
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &'static str {
        self.family
    }

    /// Entries in lexicographic order of their points.
    pub fn entries(&self) -> &[StepEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn cutoff_radius(&self) -> f64 {
        self.cutoff_radius
    }

    /// Fraction of profile mass beyond the cutoff, estimated out to three
    /// times the cutoff radius.
    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    /// Literal infimum over the whole support. Zero whenever some support
    /// point has a neighbour outside the support.
    pub fn delta_empirical(&self) -> f64 {
        self.delta_empirical
    }

    /// Ratio bound of the untruncated profile (`exp(-1/L)` for exponential).
    pub fn delta_analytic(&self) -> Option<f64> {
        self.delta_analytic
    }

    /// Infimum restricted to pairs at least one lattice unit inside the cutoff.
    pub fn delta_interior(&self) -> f64 {
        self.neighbor_ratio_infimum(Some(self.cutoff_radius - 1.0))
    }

    /// Smoothness constant used for the connective-constant condition:
    /// the analytic bound when known, else the empirical infimum if positive.
    pub fn delta(&self) -> Option<f64> {
        self.delta_analytic.or((self.delta_empirical > 0.0).then_some(self.delta_empirical))
    }

    pub fn weight_at(&self, point: &LatticePoint) -> f64 {
        self.entries
            .binary_search_by(|e| e.point.cmp(point))
            .map_or(0.0, |i| self.entries[i].weight)
    }

    /// `D(1)`, the weight of a unit step.
    pub fn unit_weight(&self) -> f64 {
        self.weight_at(&LatticePoint::unit(self.dim, 0, 1))
    }

    pub fn max_step_norm(&self) -> f64 {
        self.entries.iter().map(|e| e.point.norm()).fold(0.0, f64::max)
    }

    /// `sum_x |x|^2 D(x)`.
    pub fn second_moment(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.point.norm_sq() as f64 * e.weight))
    }

    pub fn is_exact(&self) -> bool {
        self.entries.iter().all(|e| e.exact.is_some())
    }

    /// Replaces missing exact weights by the binary value of each float
    /// weight, renormalized so the rationals sum to one exactly.
    pub fn with_exact_weights(mut self) -> Self {
        if self.is_exact() {
            return self;
        }
        let raw: Vec<Exact> = self.entries.iter().map(|e| Exact::from_f64(e.weight)).collect();
        let total = raw.iter().fold(Exact::zero(), |acc, w| acc + w);
        for (entry, w) in self.entries.iter_mut().zip(raw) {
            entry.exact = Some(w / &total);
        }
        self
    }
}

fn check_symmetric(weights: &BTreeMap<LatticePoint, Exact>) -> Result<(), Error> {
    let mut orbits: BTreeMap<Vec<i32>, (Exact, u64)> = BTreeMap::new();
    for (point, w) in weights {
        let slot = orbits.entry(point.canonical()).or_insert_with(|| (w.clone(), 0));
        if &slot.0 != w {
            return Err(Error::NotSymmetric(format!("weight at {:?} differs from its images", point.coords())));
        }
        slot.1 += 1;
    }
    for (canon, (_, count)) in &orbits {
        let expected = LatticePoint(canon.clone()).orbit_size();
        if *count != expected {
            return Err(Error::NotSymmetric(format!(
                "orbit of {canon:?} has {count} entries, expected {expected}"
            )));
        }
    }
    Ok(())
}

/// Classification of a displacement by the contact potential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Contact {
    /// Same site: `U = 1`.
    Overlap,
    /// Nearest neighbours: `U = -kappa`.
    Adjacent,
    /// `U = 0`.
    Apart,
}

/// `U(0) = 1`, `U(x) = -kappa` for `|x| = 1`, zero otherwise. A disabled
/// potential is identically zero (simple random walk).
#[derive(Clone, Debug, PartialEq)]
pub struct Potential<S> {
    kappa: S,
    enabled: bool,
}

impl<S: Scalar> Potential<S> {
    pub fn new(kappa: S) -> Self {
        Self { kappa, enabled: true }
    }

    pub fn disabled() -> Self {
        Self {
            kappa: S::zero(),
            enabled: false,
        }
    }

    pub fn kappa(&self) -> &S {
        &self.kappa
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn contact_sq(&self, sq: i64) -> Contact {
        if !self.enabled {
            return Contact::Apart;
        }
        match sq {
            0 => Contact::Overlap,
            1 => Contact::Adjacent,
            _ => Contact::Apart,
        }
    }

    pub fn value(&self, x: &LatticePoint) -> S {
        match self.contact_sq(x.norm_sq()) {
            Contact::Overlap => S::one(),
            Contact::Adjacent => -self.kappa.clone(),
            Contact::Apart => S::zero(),
        }
    }
}

/// `U(x)` for the attractive self-avoiding walk.
pub fn potential(x: &LatticePoint, kappa: f64) -> f64 {
    Potential::new(kappa).value(x)
}

/// A finite lattice path `w_0, ..., w_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    sites: Vec<LatticePoint>,
}

impl Walk {
    pub fn new(sites: Vec<LatticePoint>) -> Result<Self, Error> {
        let Some(first) = sites.first() else {
            return Err(Error::InvalidParameter("a walk needs at least one site".into()));
        };
        let dim = first.dim();
        if let Some(p) = sites.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                point: p.coords().to_vec(),
                found: p.dim(),
                expected: dim,
            });
        }
        Ok(Self { sites })
    }

    pub fn from_coords(sites: &[&[i32]]) -> Result<Self, Error> {
        Self::new(sites.iter().map(|c| LatticePoint(c.to_vec())).collect())
    }

    pub fn sites(&self) -> &[LatticePoint] {
        &self.sites
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.sites.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn starts_at_origin(&self) -> bool {
        self.sites[0].is_origin()
    }

    pub fn end(&self) -> &LatticePoint {
        self.sites.last().expect("walks are nonempty")
    }

    pub fn reversed(&self) -> Walk {
        Walk {
            sites: self.sites.iter().rev().cloned().collect(),
        }
    }

    pub fn is_self_avoiding(&self) -> bool {
        let mut seen: Vec<&LatticePoint> = self.sites.iter().collect();
        seen.sort();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

/// A step distribution and potential instantiated in one arithmetic backend.
#[derive(Clone, Debug)]
pub struct Model<S> {
    dim: usize,
    points: Vec<LatticePoint>,
    flat: Vec<i32>,
    weights: Vec<S>,
    potential: Potential<S>,
    one_plus_kappa: S,
    unit_weight: S,
    max_step_norm: f64,
    delta: Option<f64>,
    dist: StepDistribution,
}

impl Model<f64> {
    pub fn float(dist: &StepDistribution, kappa: f64) -> Result<Self, Error> {
        Self::new(dist, Potential::new(kappa))
    }
}

impl Model<Exact> {
    /// Requires exact weights (tables, or [`StepDistribution::with_exact_weights`]).
    pub fn exact(dist: &StepDistribution, kappa: Exact) -> Result<Self, Error> {
        Self::new(dist, Potential::new(kappa))
    }
}

impl<S: Scalar> Model<S> {
    pub fn new(dist: &StepDistribution, potential: Potential<S>) -> Result<Self, Error> {
        if potential.kappa() < &S::zero() {
            return Err(Error::InvalidParameter(format!(
                "kappa must be nonnegative, got {}",
                potential.kappa().to_text()
            )));
        }
        let weights: Vec<S> = if S::EXACT {
            dist.entries
                .iter()
                .map(|e| e.exact.as_ref().map(S::from_exact).ok_or(Error::NotExact))
                .collect::<Result<_, _>>()?
        } else {
            dist.entries.iter().map(|e| S::from_f64(e.weight)).collect()
        };
        let unit = LatticePoint::unit(dist.dim, 0, 1);
        let unit_weight = dist
            .entries
            .iter()
            .zip(&weights)
            .find(|(e, _)| e.point == unit)
            .map_or_else(S::zero, |(_, w)| w.clone());
        Ok(Self {
            dim: dist.dim,
            points: dist.entries.iter().map(|e| e.point.clone()).collect(),
            flat: dist.entries.iter().flat_map(|e| e.point.coords().iter().copied()).collect(),
            one_plus_kappa: S::one() + potential.kappa().clone(),
            weights,
            potential,
            unit_weight,
            max_step_norm: dist.max_step_norm(),
            delta: dist.delta(),
            dist: dist.clone(),
        })
    }

    /// Same steps, interaction switched off.
    pub fn without_interaction(&self) -> Self {
        let mut m = self.clone();
        m.potential = Potential::disabled();
        m.one_plus_kappa = S::one();
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn distribution(&self) -> &StepDistribution {
        &self.dist
    }

    pub fn potential(&self) -> &Potential<S> {
        &self.potential
    }

    pub fn kappa(&self) -> &S {
        self.potential.kappa()
    }

    pub fn one_plus_kappa(&self) -> &S {
        &self.one_plus_kappa
    }

    pub fn branching(&self) -> usize {
        self.weights.len()
    }

    pub fn step_point(&self, i: usize) -> &LatticePoint {
        &self.points[i]
    }

    pub(crate) fn step_coords(&self, i: usize) -> &[i32] {
        &self.flat[i * self.dim..(i + 1) * self.dim]
    }

    pub fn step_weight(&self, i: usize) -> &S {
        &self.weights[i]
    }

    pub fn steps(&self) -> impl Iterator<Item = (&LatticePoint, &S)> {
        self.points.iter().zip(&self.weights)
    }

    /// `D(1)` in this backend.
    pub fn unit_weight(&self) -> &S {
        &self.unit_weight
    }

    pub fn max_step_norm(&self) -> f64 {
        self.max_step_norm
    }

    pub fn weight_of_step(&self, step: &LatticePoint) -> S {
        self.points
            .binary_search(step)
            .map_or_else(|_| S::zero(), |i| self.weights[i].clone())
    }

    /// The connective-constant smallness condition for this model.
    ///
    /// Without attraction the walk is purely repulsive and the condition
    /// holds for any smoothness constant; otherwise it is evaluated with
    /// [`StepDistribution::delta`] and fails when no positive constant exists.
    pub fn theorem1_condition(&self) -> bool {
        let kappa = self.kappa().to_f64();
        if !self.potential.is_enabled() || kappa == 0.0 {
            return true;
        }
        match self.delta {
            Some(delta) => theorem1_condition(kappa, delta.min(1.0), self.dim).unwrap_or(false),
            None => false,
        }
    }
}

/// Weight `prod D(w_t - w_{t-1}) * prod_{s<t} (1 - U(w_s - w_t))`.
pub fn walk_weight<S: Scalar>(walk: &Walk, model: &Model<S>) -> S {
    let sites = walk.sites();
    let mut weight = S::one();
    for pair in sites.windows(2) {
        let w = model.weight_of_step(&pair[1].sub(&pair[0]));
        if w.is_zero() {
            return S::zero();
        }
        weight = weight * w;
    }
    for t in 1..sites.len() {
        for s in 0..t {
            match model.potential().contact_sq(dist_sq(sites[s].coords(), sites[t].coords())) {
                Contact::Overlap => return S::zero(),
                Contact::Adjacent => weight = weight * model.one_plus_kappa().clone(),
                Contact::Apart => {}
            }
        }
    }
    weight
}

/// `(1+kappa)^{2d} <= 1 + delta^2 / (2d (1+kappa)^{2d-1})`.
pub fn theorem1_condition(kappa: f64, delta: f64, dim: usize) -> Result<bool, Error> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidDelta(delta));
    }
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!("kappa must be nonnegative, got {kappa}")));
    }
    if dim == 0 {
        return Err(Error::InvalidDimension(dim));
    }
    let two_d = 2 * dim as i32;
    let base = 1.0 + kappa;
    let lhs = libm::pow(base, two_d as f64);
    let rhs = 1.0 + delta * delta / (two_d as f64 * libm::pow(base, (two_d - 1) as f64));
    Ok(lhs <= rhs)
}

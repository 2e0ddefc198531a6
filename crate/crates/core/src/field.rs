//! Sparse real-valued fields on `Z^d` (connectivities and lace kernels).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;


use crate::model::LatticePoint;
use crate::scalar::{Accumulator, CompensatedSum, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField<S> {
    dim: usize,
    label: usize,
    entries: BTreeMap<LatticePoint, S>,
    condition: f64,
}

impl<S: Scalar> LatticeField<S> {
    pub fn zero(dim: usize, label: usize) -> Self {
        Self {
            dim,
            label,
            entries: BTreeMap::new(),
            condition: 1.0,
        }
    }

    /// `delta_{0x}`.
    pub fn delta(dim: usize) -> Self {
        let mut f = Self::zero(dim, 0);
        f.entries.insert(LatticePoint::origin(dim), S::one());
        f
    }

    /// Builds a field, dropping exact zeros.
    pub fn from_entries<I: IntoIterator<Item = (LatticePoint, S)>>(dim: usize, label: usize, entries: I) -> Self {
        let mut f = Self::zero(dim, label);
        for (x, v) in entries {
            debug_assert_eq!(x.dim(), dim);
            let slot = f.entries.entry(x).or_insert_with(S::zero);
            *slot = slot.clone() + v;
        }
        f.entries.retain(|_, v| !v.is_zero());
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Step count (or kernel order) this field belongs to.
    pub fn label(&self) -> usize {
        self.label
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.label = label;
        self
    }

    /// `sum |terms| / |sum terms|` recorded while the field was accumulated;
    /// 1 when no cancellation occurred.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn get(&self, x: &LatticePoint) -> S {
        self.entries.get(x).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LatticePoint, &S)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> S {
        let mut acc = S::Acc::default();
        for v in self.entries.values() {
            acc.add(v);
        }
        acc.total()
    }

    pub fn norm_l1(&self) -> S {
        let mut acc = S::Acc::default();
        for v in self.entries.values() {
            acc.add(&v.abs_value());
        }
        acc.total()
    }

    pub fn norm_inf(&self) -> S {
        self.entries
            .values()
            .map(|v| v.abs_value())
            .fold(S::zero(), |m, v| if v > m { v } else { m })
    }

    /// `sum_x |x|^p f(x)` for even `p`.
    pub fn moment(&self, p: u32) -> S {
        assert!(p % 2 == 0, "moment exponent must be even");
        let mut acc = S::Acc::default();
        for (x, v) in &self.entries {
            let r2 = S::from_f64(x.norm_sq() as f64);
            acc.add(&(r2.pow_u32(p / 2) * v.clone()));
        }
        acc.total()
    }

    /// `sum_x |x|^p |f(x)|` for real `p`.
    pub fn weighted_l1(&self, p: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (x, v) in &self.entries {
            acc.push(radial_power(x, p) * v.to_f64().abs());
        }
        acc.value()
    }

    /// `max_x (|x|^p + 1) |f(x)|`.
    pub fn shifted_weighted_inf(&self, p: f64) -> f64 {
        self.entries
            .iter()
            .map(|(x, v)| (radial_power(x, p) + 1.0) * v.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// `sum_x (|x|^p + 1) |f(x)|`.
    pub fn shifted_weighted_l1(&self, p: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for (x, v) in &self.entries {
            acc.push((radial_power(x, p) + 1.0) * v.to_f64().abs());
        }
        acc.value()
    }

    /// `(f * g)(x) = sum_y f(y) g(x - y)`.
    pub fn convolve(&self, other: &LatticeField<S>) -> LatticeField<S> {
        let mut out: BTreeMap<LatticePoint, S::Acc> = BTreeMap::new();
        for (y, fy) in &self.entries {
            for (z, gz) in &other.entries {
                out.entry(y.add(z)).or_default().add(&(fy.clone() * gz.clone()));
            }
        }
        Self::from_accumulators(self.dim, self.label + other.label, out)
    }

    pub(crate) fn from_accumulators(dim: usize, label: usize, accs: BTreeMap<LatticePoint, S::Acc>) -> Self {
        let mut abs = CompensatedSum::new();
        let mut total = CompensatedSum::new();
        let mut entries = BTreeMap::new();
        for (x, acc) in accs {
            let v = acc.total();
            abs.push(acc.abs_total());
            total.push(v.to_f64().abs());
            if !v.is_zero() {
                entries.insert(x, v);
            }
        }
        let condition = if total.value() > 0.0 {
            abs.value() / total.value()
        } else if abs.value() > 0.0 {
            f64::INFINITY
        } else {
            1.0
        };
        Self {
            dim,
            label,
            entries,
            condition,
        }
    }

    pub fn add(&self, other: &LatticeField<S>) -> LatticeField<S> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &LatticeField<S>) -> LatticeField<S> {
        self.combine(other, |a, b| a - b)
    }

    fn combine(&self, other: &LatticeField<S>, op: impl Fn(S, S) -> S) -> LatticeField<S> {
        let mut entries = self.entries.clone();
        for (x, v) in &other.entries {
            let slot = entries.entry(x.clone()).or_insert_with(S::zero);
            *slot = op(slot.clone(), v.clone());
        }
        for (x, v) in entries.iter_mut() {
            if !other.entries.contains_key(x) {
                *v = op(v.clone(), S::zero());
            }
        }
        entries.retain(|_, v| !v.is_zero());
        LatticeField {
            dim: self.dim,
            label: self.label,
            entries,
            condition: self.condition.max(other.condition),
        }
    }

    pub fn to_f64(&self) -> LatticeField<f64> {
        LatticeField {
            dim: self.dim,
            label: self.label,
            entries: self.entries.iter().map(|(x, v)| (x.clone(), v.to_f64())).collect(),
            condition: self.condition,
        }
    }

    /// Largest `|x|` with a nonzero entry.
    pub fn support_radius(&self) -> f64 {
        self.entries.keys().map(LatticePoint::norm).fold(0.0, f64::max)
    }

    /// Checks `f(sigma x) == f(x)` for every signed coordinate permutation,
    /// comparing each entry with the entry at the canonical representative.
    pub fn is_hyperoctahedral(&self) -> bool {
        let mut seen: BTreeMap<Vec<i32>, (S, u64)> = BTreeMap::new();
        for (x, v) in &self.entries {
            let slot = seen.entry(x.canonical()).or_insert_with(|| (v.clone(), 0));
            if !slot.0.le_tol(v) || !v.le_tol(&slot.0) {
                return false;
            }
            slot.1 += 1;
        }
        seen.iter().all(|(canon, (_, count))| LatticePoint::new(canon.clone()).orbit_size() == *count)
    }
}

fn radial_power(x: &LatticePoint, p: f64) -> f64 {
    let r2 = x.norm_sq() as f64;
    if r2 == 0.0 {
        if p == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        libm::pow(r2, p / 2.0)
    }
}

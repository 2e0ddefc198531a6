//! Fourier-side identities, connective-constant estimators and the
//! diffusion constant.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::enumerate::ConnectivitySeries;
use crate::error::Error;
use crate::field::LatticeField;
use crate::laces::{step_field, KernelSeries};
use crate::model::Model;
use crate::scalar::{CompensatedSum, Scalar};

/// `sum_x f(x) e^{i k.x}`.
pub fn fourier<S: Scalar>(field: &LatticeField<S>, k: &[f64]) -> Complex64 {
    assert_eq!(k.len(), field.dim(), "wave vector dimension");
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    for (x, v) in field.iter() {
        let phase: f64 = x.coords().iter().zip(k).map(|(&c, &ki)| c as f64 * ki).sum();
        let v = v.to_f64();
        re.push(v * libm::cos(phase));
        im.push(v * libm::sin(phase));
    }
    Complex64::new(re.value(), im.value())
}

/// `-Laplacian of f^ at 0` by central second differences with step `h`.
pub fn laplacian_at_zero_fd<S: Scalar>(field: &LatticeField<S>, h: f64) -> f64 {
    let d = field.dim();
    let at0 = fourier(field, &alloc::vec![0.0; d]).re;
    let mut total = 0.0;
    for axis in 0..d {
        let mut k = alloc::vec![0.0; d];
        k[axis] = h;
        let plus = fourier(field, &k).re;
        k[axis] = -h;
        let minus = fourier(field, &k).re;
        total += (plus - 2.0 * at0 + minus) / (h * h);
    }
    -total
}

/// `E^(k) = (D^(k) + 2 kappa D(1) sum_i cos k_i) / (1 + 2d kappa D(1))`.
pub fn e_hat<S: Scalar>(model: &Model<S>, k: &[f64]) -> f64 {
    let d = model.dim();
    let kd1 = model.kappa().to_f64() * model.unit_weight().to_f64();
    let d_hat = fourier(&step_field(model), k).re;
    let cosines: f64 = k.iter().map(|&ki| libm::cos(ki)).sum();
    (d_hat + 2.0 * kd1 * cosines) / (1.0 + 2.0 * d as f64 * kd1)
}

/// `f_0..f_nmax` and `g_1..g_nmax` at one `(k, z)`; `g[0]` is unused.
pub fn fg_sequences<S: Scalar>(
    model: &Model<S>,
    connectivities: &ConnectivitySeries<S>,
    kernels: &KernelSeries<S>,
    nmax: usize,
    k: &[f64],
    z: f64,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let c1 = 1.0 + 2.0 * model.dim() as f64 * model.kappa().to_f64() * model.unit_weight().to_f64();
    let first = Complex64::new(z * e_hat(model, k), 0.0);
    let mut f = alloc::vec![Complex64::new(1.0, 0.0)];
    let mut g = alloc::vec![Complex64::new(0.0, 0.0)];
    for n in 1..=nmax {
        if n == 1 {
            f.push(first);
            g.push(first);
        } else {
            let scale = libm::pow(z / c1, n as f64);
            f.push(fourier(connectivities.field(n), k) * scale);
            g.push(fourier(&kernels.total(n), k) * scale);
        }
    }
    (f, g)
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct FgReport {
    pub nmax: usize,
    pub samples: usize,
    pub z: f64,
    pub max_residual: f64,
    pub holds: bool,
}

pub const FG_TOLERANCE: f64 = 1e-10;

/// Max over `n <= nmax` and the sampled `k` of `|f_n - sum_m g_m f_{n-m}|`.
pub fn verify_fg_recursion<S: Scalar>(
    model: &Model<S>,
    connectivities: &ConnectivitySeries<S>,
    kernels: &KernelSeries<S>,
    nmax: usize,
    ks: &[Vec<f64>],
    z: f64,
) -> Result<FgReport, Error> {
    if connectivities.nmax() < nmax || kernels.nmax() < nmax {
        return Err(Error::MissingInput(alloc::format!("fields up to n = {nmax} needed")));
    }
    let mut worst = 0.0f64;
    for k in ks {
        let (f, g) = fg_sequences(model, connectivities, kernels, nmax, k, z);
        for n in 1..=nmax {
            let mut rhs = Complex64::new(0.0, 0.0);
            for m in 1..=n {
                rhs += g[m] * f[n - m];
            }
            worst = worst.max((f[n] - rhs).norm());
        }
    }
    Ok(FgReport {
        nmax,
        samples: ks.len(),
        z,
        max_residual: worst,
        holds: worst < FG_TOLERANCE,
    })
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct MuEstimates {
    /// `c_n^{1/n}` for `n = 1..=nmax`.
    pub mu_root: Vec<f64>,
    /// `c_{n+1}/c_n` for `n = 1..nmax`.
    pub mu_ratio: Vec<f64>,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Whether the last `c_n^{1/n}` lies in `[2^{-d}, c_1]`.
    pub final_root_in_bounds: bool,
}

pub fn mu_estimators<S: Scalar>(connectivities: &ConnectivitySeries<S>, dim: usize) -> MuEstimates {
    let nmax = connectivities.nmax();
    let c: Vec<f64> = (0..=nmax).map(|n| connectivities.partition_value(n).to_f64()).collect();
    let mu_root: Vec<f64> = (1..=nmax).map(|n| libm::pow(c[n], 1.0 / n as f64)).collect();
    let mu_ratio = (1..nmax).map(|n| c[n + 1] / c[n]).collect();
    let lower = libm::pow(2.0, -(dim as f64));
    let upper = c.get(1).copied().unwrap_or(f64::NAN);
    let tol = 1e-12;
    let final_root_in_bounds = mu_root
        .last()
        .is_some_and(|&r| r >= lower * (1.0 - tol) && r <= upper * (1.0 + tol));
    MuEstimates {
        mu_root,
        mu_ratio,
        lower_bound: lower,
        upper_bound: upper,
        final_root_in_bounds,
    }
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct Diagnostics {
    pub last_tau_term: f64,
    pub last_sigma_term: f64,
}

#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "camelCase"))]
pub struct SeriesEstimates {
    pub mu_root: Vec<f64>,
    pub mu_ratio: Vec<f64>,
    pub delta0: f64,
    pub tau: f64,
    pub sigma: f64,
    pub delta: f64,
    pub truncation_n: usize,
    pub mu_used: f64,
    pub diagnostics: Diagnostics,
}

/// Closeness of `1 + sigma` to zero that is refused.
pub const SIGMA_GUARD: f64 = 1e-9;

/// `delta = (delta_0/mu + tau) / (1 + sigma)` with
/// `tau = sum_{m<=N} mu^{-m} sum_x |x|^2 Pi_m(x)` and
/// `sigma = sum_{2<=m<=N} (m-1) pi_m / mu^m`.
pub fn diffusion_constant<S: Scalar>(
    model: &Model<S>,
    kernels: &KernelSeries<S>,
    truncation_n: usize,
    mu_used: f64,
) -> Result<SeriesEstimates, Error> {
    if !(mu_used > 0.0 && mu_used.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("mu must be positive, got {mu_used}")));
    }
    if kernels.nmax() < truncation_n {
        return Err(Error::MissingInput(alloc::format!("kernels up to m = {truncation_n} needed")));
    }
    let delta0 = step_field(model).moment(2).to_f64();
    let mut tau = CompensatedSum::new();
    let mut sigma = CompensatedSum::new();
    let mut last_tau = 0.0;
    let mut last_sigma = 0.0;
    for m in 1..=truncation_n {
        let pi = kernels.total(m);
        let scale = libm::pow(mu_used, -(m as f64));
        last_tau = pi.moment(2).to_f64() * scale;
        tau.push(last_tau);
        if m >= 2 {
            last_sigma = (m - 1) as f64 * pi.sum().to_f64() * scale;
            sigma.push(last_sigma);
        }
    }
    let (tau, sigma) = (tau.value(), sigma.value());
    if (1.0 + sigma).abs() < SIGMA_GUARD {
        return Err(Error::DegenerateSigma(sigma));
    }
    Ok(SeriesEstimates {
        mu_root: Vec::new(),
        mu_ratio: Vec::new(),
        delta0,
        tau,
        sigma,
        delta: (delta0 / mu_used + tau) / (1.0 + sigma),
        truncation_n,
        mu_used,
        diagnostics: Diagnostics {
            last_tau_term: last_tau.abs(),
            last_sigma_term: last_sigma.abs(),
        },
    })
}

impl SeriesEstimates {
    pub fn with_mu(mut self, mu: &MuEstimates) -> Self {
        self.mu_root = mu.mu_root.clone();
        self.mu_ratio = mu.mu_ratio.clone();
        self
    }
}

/// Last `c_{n+1}/c_n`, or `c_1` when only one step is available.
pub fn default_mu(mu: &MuEstimates) -> f64 {
    mu.mu_ratio.last().copied().unwrap_or(mu.upper_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Budget;
    use crate::model::{build_step_distribution, nearest_neighbor_table, Family};
    use crate::scalar::Exact;
    use alloc::vec;
    use num_traits::Zero;

    fn nn(dim: usize, kappa: f64) -> Model<f64> {
        let d = build_step_distribution(Family::Table(nearest_neighbor_table(dim)), 1.0, dim, 1.0).unwrap();
        Model::float(&d, kappa).unwrap()
    }

    #[test]
    fn delta_field_transform_is_one() {
        let f = LatticeField::<f64>::delta(2);
        assert_eq!(fourier(&f, &[0.3, -1.2]), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn e_hat_examples() {
        let m = nn(1, 0.1);
        assert!((e_hat(&m, &[0.0]) - 1.0).abs() < 1e-15);
        assert!((e_hat(&m, &[core::f64::consts::PI]) + 1.0).abs() < 1e-15);
        let m0 = nn(2, 0.0);
        let k = [0.4, 1.1];
        assert!((e_hat(&m0, &k) - fourier(&step_field(&m0), &k).re).abs() < 1e-15);
    }

    #[test]
    fn laplacian_matches_moment() {
        let d = build_step_distribution(Family::Exponential, 2.0, 2, 2.0).unwrap();
        let m = Model::float(&d, 0.0).unwrap();
        let f = step_field(&m);
        let fd = laplacian_at_zero_fd(&f, 1e-4);
        let exact = f.moment(2);
        assert!((fd - exact).abs() <= 1e-6 * exact, "{fd} vs {exact}");
    }

    #[test]
    fn nn_delta0_is_one() {
        let m = nn(1, 0.0);
        let k = KernelSeries::compute(&m, 2, &Budget::default()).unwrap();
        let est = diffusion_constant(&m, &k, 2, 1.0).unwrap();
        assert_eq!(est.delta0, 1.0);
    }

    #[test]
    fn free_walk_delta_is_delta0() {
        let d = build_step_distribution(Family::Exponential, 1.0, 2, 2.0).unwrap();
        let m = Model::float(&d, 0.0).unwrap().without_interaction();
        let k = KernelSeries::compute(&m, 3, &Budget::default()).unwrap();
        let est = diffusion_constant(&m, &k, 3, 1.0).unwrap();
        assert_eq!(est.tau, 0.0);
        assert_eq!(est.sigma, 0.0);
        assert_eq!(est.delta, est.delta0);
    }

    #[test]
    fn fg_recursion_small() {
        let m = nn(2, 0.05);
        let c = ConnectivitySeries::compute(&m, 4, &Budget::default()).unwrap();
        let k = KernelSeries::compute(&m, 4, &Budget::default()).unwrap();
        let ks = vec![vec![0.0, 0.0], vec![0.7, -2.0], vec![3.0, 1.0]];
        let r = verify_fg_recursion(&m, &c, &k, 4, &ks, 0.8).unwrap();
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn d1_root_saturates_lower_bound() {
        let d = build_step_distribution(Family::Table(nearest_neighbor_table(1)), 1.0, 1, 1.0).unwrap();
        let m = Model::exact(&d, Exact::zero()).unwrap();
        let c = ConnectivitySeries::compute(&m, 8, &Budget::default()).unwrap();
        let mu = mu_estimators(&c, 1);
        assert!(mu.final_root_in_bounds);
        assert!((mu.mu_ratio.last().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_mu_rejected() {
        let m = nn(1, 0.0);
        let k = KernelSeries::compute(&m, 1, &Budget::default()).unwrap();
        assert!(diffusion_constant(&m, &k, 1, 0.0).is_err());
        assert!(diffusion_constant(&m, &k, 3, 1.0).is_err());
    }
}

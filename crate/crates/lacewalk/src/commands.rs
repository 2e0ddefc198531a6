//! Command implementations. Each computes everything first and returns the
//! tables and report to write.

use lacewalk_core::enumerate::{
    verify_key_inequality_all, verify_key_inequality_summed, verify_lower_bounds, verify_subadditivity,
    verify_upper_bounds, walks_from_origin, ConnectivitySeries, Deformation, InequalityReport,
};
use lacewalk_core::error::Error;
use lacewalk_core::exec::Budget;
use lacewalk_core::laces::{
    enumerate_laces, pi_kernels_with, verify_graph_sum_equivalence, verify_kernel_bound, verify_recursion,
    BoundKind, KernelSeries, GRAPH_SUM_MAX_N,
};
use lacewalk_core::model::Model;
use lacewalk_core::sampler::sample_walks_with;
use lacewalk_core::scalar::Scalar;
use lacewalk_core::series::{default_mu, diffusion_constant, mu_estimators, verify_fg_recursion};
use serde::Serialize;
use serde_json::{json, Value};

use crate::executor::RayonExecutor;

pub struct Table {
    pub suffix: &'static str,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub struct Output {
    pub report: Value,
    pub tables: Vec<Table>,
    pub summary: String,
    /// Asserted checks that failed.
    pub failures: usize,
}

pub struct Context<'a> {
    pub exec: &'a RayonExecutor,
    pub budget: Budget,
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

fn float<S: Scalar>(v: &S) -> String {
    v.to_f64().to_string()
}

fn exact<S: Scalar>(v: &S) -> String {
    if S::EXACT {
        v.to_text()
    } else {
        String::new()
    }
}

fn coord_header(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

pub fn model_info<S: Scalar>(model: &Model<S>) -> Value {
    let d = model.distribution();
    json!({
        "dimension": model.dim(),
        "kappa": model.kappa().to_text(),
        "arithmetic": if S::EXACT { "rational" } else { "float" },
        "family": d.family(),
        "supportSize": d.len(),
        "cutoffRadius": d.cutoff_radius(),
        "truncatedMass": d.truncated_mass(),
        "deltaEmpirical": d.delta_empirical(),
        "deltaInterior": d.delta_interior(),
        "deltaAnalytic": d.delta_analytic(),
        "unitWeight": model.unit_weight().to_text(),
        "theorem1Condition": model.theorem1_condition(),
    })
}

pub fn enumerate<S: Scalar>(ctx: &Context, model: &Model<S>, nmax: usize) -> Result<Output, Error> {
    let series = ConnectivitySeries::compute_with(ctx.exec, model, nmax, &ctx.budget)?;
    let mut rows = Vec::new();
    let mut report_rows = Vec::new();
    let mut fields = Vec::new();
    for n in 0..=nmax {
        let c = series.partition_value(n);
        let m2 = series.moment(n, 2);
        let msd = series.msd(n);
        rows.push(vec![n.to_string(), float(&c), float(&m2), msd.to_string(), exact(&c), exact(&m2)]);
        report_rows.push(json!({
            "n": n, "cn": c.to_f64(), "moment2": m2.to_f64(), "msd": msd,
            "cnExact": S::EXACT.then(|| c.to_text()),
            "points": series.field(n).len(),
            "condition": series.field(n).condition(),
        }));
        for (x, v) in series.field(n).iter() {
            let mut row = vec![n.to_string()];
            row.extend(x.coords().iter().map(|c| c.to_string()));
            row.push(float(v));
            row.push(exact(v));
            fields.push(row);
        }
    }
    let mut field_header = header(&["n"]);
    field_header.extend(coord_header(model.dim()));
    field_header.extend(header(&["value", "value_exact"]));
    Ok(Output {
        report: json!({"command": "enumerate", "model": model_info(model), "nmax": nmax, "rows": report_rows}),
        tables: vec![
            Table {
                suffix: "",
                header: header(&["n", "c_n", "moment2", "msd", "c_n_exact", "moment2_exact"]),
                rows,
            },
            Table {
                suffix: "-fields",
                header: field_header,
                rows: fields,
            },
        ],
        summary: format!("c_{nmax} = {}", series.partition_value(nmax).to_text()),
        failures: 0,
    })
}

pub fn lace<S: Scalar>(ctx: &Context, model: &Model<S>, nmax: usize, max_edges: Option<usize>) -> Result<Output, Error> {
    let mut rows = Vec::new();
    let mut fields = Vec::new();
    let mut report_rows = Vec::new();
    for n in 1..=nmax {
        let top = max_edges.unwrap_or(n).min(n);
        let set = pi_kernels_with(ctx.exec, model, n, top, &ctx.budget)?;
        for edges in 1..=top {
            let f = set.order(edges);
            let laces = enumerate_laces(0, n, edges).len();
            let pi = f.sum();
            rows.push(vec![
                n.to_string(),
                edges.to_string(),
                laces.to_string(),
                float(&pi),
                f.support_radius().to_string(),
                f.condition().to_string(),
                exact(&pi),
            ]);
            report_rows.push(json!({
                "n": n, "N": edges, "laces": laces, "pi": pi.to_f64(),
                "piExact": S::EXACT.then(|| pi.to_text()),
                "l1": f.norm_l1().to_f64(),
                "supportRadius": f.support_radius(),
                "condition": f.condition(),
            }));
            for (x, v) in f.iter() {
                let mut row = vec![n.to_string(), edges.to_string()];
                row.extend(x.coords().iter().map(|c| c.to_string()));
                row.push(float(v));
                row.push(exact(v));
                fields.push(row);
            }
        }
    }
    let mut field_header = header(&["n", "N"]);
    field_header.extend(coord_header(model.dim()));
    field_header.extend(header(&["value", "value_exact"]));
    Ok(Output {
        report: json!({"command": "lace", "model": model_info(model), "nmax": nmax, "kernels": report_rows}),
        tables: vec![
            Table {
                suffix: "",
                header: header(&["n", "N", "laces", "pi_n_N", "support_radius", "condition", "pi_n_N_exact"]),
                rows,
            },
            Table {
                suffix: "-fields",
                header: field_header,
                rows: fields,
            },
        ],
        summary: format!("kernels for n <= {nmax}"),
        failures: 0,
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Check {
    check: &'static str,
    parameters: String,
    lhs: f64,
    rhs: f64,
    lhs_text: String,
    rhs_text: String,
    holds: bool,
    asserted: bool,
}

impl Check {
    fn from_report(check: &'static str, parameters: String, r: &InequalityReport, asserted: bool) -> Self {
        Check {
            check,
            parameters,
            lhs: r.lhs,
            rhs: r.rhs,
            lhs_text: r.lhs_text.clone(),
            rhs_text: r.rhs_text.clone(),
            holds: r.holds,
            asserted,
        }
    }

    fn equality<S: Scalar>(check: &'static str, parameters: String, lhs: &S, rhs: &S) -> Self {
        let r = InequalityReport::new(lhs, rhs);
        let back = InequalityReport::new(rhs, lhs);
        Check {
            holds: r.holds && back.holds,
            ..Check::from_report(check, parameters, &r, true)
        }
    }
}

/// Runs every verifier up to `nmax` steps.
pub fn verify<S: Scalar>(ctx: &Context, model: &Model<S>, nmax: usize) -> Result<Output, Error> {
    let claimed = model.theorem1_condition();
    let dim = model.dim();
    let c = ConnectivitySeries::compute_with(ctx.exec, model, nmax, &ctx.budget)?;
    let kernels = KernelSeries::compute_with(ctx.exec, model, nmax, &ctx.budget)?;
    let mut checks = Vec::new();

    let two_d_kappa_d1 = S::from_f64((2 * dim) as f64) * model.kappa().clone() * model.unit_weight().clone();
    if nmax >= 1 {
        checks.push(Check::equality("c1_closed_form", String::new(), &c.partition_value(1), &(S::one() + two_d_kappa_d1.clone())));
        checks.push(Check::equality("pi1_closed_form", String::new(), &kernels.pi(1), &two_d_kappa_d1));
    }
    for n in 1..=nmax {
        let r = verify_recursion(model, &c, &kernels, n);
        checks.push(Check {
            check: "recursion",
            parameters: format!("n={n}"),
            lhs: r.max_abs_residual,
            rhs: 0.0,
            lhs_text: r.max_abs_residual_text,
            rhs_text: "0".into(),
            holds: r.holds,
            asserted: true,
        });
    }
    for n in 1..=nmax.min(GRAPH_SUM_MAX_N - 1) {
        let r = verify_graph_sum_equivalence(model, n, &ctx.budget)?;
        checks.push(Check {
            check: "graph_sum_equivalence",
            parameters: format!("n={n} walks={} graphs={}", r.walks, r.connected_graphs),
            lhs: r.max_abs_difference,
            rhs: 0.0,
            lhs_text: r.max_abs_difference.to_string(),
            rhs_text: "0".into(),
            holds: r.holds,
            asserted: true,
        });
    }
    for total in 2..=nmax {
        for m in 1..total {
            let r = verify_subadditivity(&c, m, total - m);
            checks.push(Check::from_report("subadditivity", format!("m={m} n={}", total - m), &r, claimed));
        }
    }
    for (i, r) in verify_lower_bounds(&c, dim).iter().enumerate() {
        checks.push(Check::from_report("lower_bound", format!("n={}", i + 1), r, claimed));
    }
    for (i, r) in verify_upper_bounds(&c).iter().enumerate() {
        checks.push(Check::from_report("upper_bound", format!("n={}", i + 1), r, claimed));
    }
    for n in 1..=nmax {
        let set = kernels.set(n);
        let mut run = |edges: usize, which: BoundKind, gamma: f64| -> Result<(), Error> {
            let r = verify_kernel_bound(model, &c, set, edges, which, gamma)?;
            checks.push(Check::from_report(
                "kernel_bound",
                format!("n={n} N={edges} which={} gamma={gamma}", which.name()),
                &r.report,
                r.claimed,
            ));
            Ok(())
        };
        run(1, BoundKind::I, 1.0)?;
        for gamma in [1.0, 1.5, 2.0] {
            run(1, BoundKind::Iii, gamma)?;
        }
        if n >= 2 {
            run(2, BoundKind::Ii, 1.0)?;
            for gamma in [1.0, 1.5, 2.0] {
                run(2, BoundKind::Iv, gamma)?;
            }
        }
    }
    let key_depth = nmax.min(2);
    for m in 1..=key_depth {
        for prefix in walks_from_origin(model, m, &ctx.budget)? {
            if !prefix.is_self_avoiding() {
                continue;
            }
            for j in 0..m {
                for n in 1..=key_depth {
                    let coords = prefix.sites().iter().map(|p| format!("{:?}", p.coords())).collect::<Vec<_>>().join(" ");
                    for r in verify_key_inequality_all(&prefix, j, n, model, &ctx.budget)? {
                        checks.push(Check::from_report(
                            "key_inequality",
                            format!("w={coords} j={j} n={n} y={:?} deformation={:?}", r.endpoint.coords(), r.deformation),
                            &r.report,
                            claimed && r.deformation == Deformation::Available,
                        ));
                    }
                    let r = verify_key_inequality_summed(&prefix, j, n, model, &ctx.budget)?;
                    checks.push(Check::from_report("key_inequality_summed", format!("w={coords} j={j} n={n}"), &r, false));
                }
            }
        }
    }
    let ks: Vec<Vec<f64>> = [0.0, 0.4, 1.3, -2.2, std::f64::consts::PI]
        .iter()
        .map(|&k| (0..dim).map(|i| k * (1.0 + 0.5 * i as f64)).collect())
        .collect();
    for z in [1.0, 0.7] {
        let r = verify_fg_recursion(model, &c, &kernels, nmax, &ks, z)?;
        checks.push(Check {
            check: "fg_recursion",
            parameters: format!("z={z} samples={}", r.samples),
            lhs: r.max_residual,
            rhs: 0.0,
            lhs_text: r.max_residual.to_string(),
            rhs_text: "0".into(),
            holds: r.holds,
            asserted: true,
        });
    }

    let asserted = checks.iter().filter(|c| c.asserted).count();
    let failures = checks.iter().filter(|c| c.asserted && !c.holds).count();
    let informational_failures = checks.iter().filter(|c| !c.asserted && !c.holds).count();
    let rows = checks
        .iter()
        .map(|c| {
            vec![
                c.check.to_string(),
                c.parameters.clone(),
                c.lhs.to_string(),
                c.rhs.to_string(),
                c.holds.to_string(),
                c.asserted.to_string(),
            ]
        })
        .collect();
    Ok(Output {
        report: json!({
            "command": "verify",
            "model": model_info(model),
            "nmax": nmax,
            "summary": {
                "checks": checks.len(),
                "asserted": asserted,
                "failed": failures,
                "informationalFailures": informational_failures,
            },
            "checks": checks,
        }),
        tables: vec![Table {
            suffix: "",
            header: header(&["check", "parameters", "lhs", "rhs", "holds", "asserted"]),
            rows,
        }],
        summary: format!("{} checks, {asserted} asserted, {failures} failed", checks.len()),
        failures,
    })
}

pub fn series<S: Scalar>(ctx: &Context, model: &Model<S>, nmax: usize, mu: Option<f64>) -> Result<Output, Error> {
    if nmax == 0 {
        return Err(Error::InvalidParameter("series needs nmax >= 1".into()));
    }
    let c = ConnectivitySeries::compute_with(ctx.exec, model, nmax, &ctx.budget)?;
    let kernels = KernelSeries::compute_with(ctx.exec, model, nmax, &ctx.budget)?;
    let mus = mu_estimators(&c, model.dim());
    let mu_used = mu.unwrap_or_else(|| default_mu(&mus));
    let est = diffusion_constant(model, &kernels, nmax, mu_used)?.with_mu(&mus);
    let msd_over_n: Vec<f64> = (1..=nmax).map(|n| c.msd(n) / n as f64).collect();
    let rows = (1..=nmax)
        .map(|n| {
            vec![
                n.to_string(),
                float(&c.partition_value(n)),
                mus.mu_root[n - 1].to_string(),
                mus.mu_ratio.get(n - 1).map_or(String::new(), |r| r.to_string()),
                c.msd(n).to_string(),
                msd_over_n[n - 1].to_string(),
                float(&kernels.pi(n)),
            ]
        })
        .collect();
    let mut report = serde_json::to_value(&est).expect("serializable");
    let obj = report.as_object_mut().expect("object");
    obj.insert("command".into(), json!("series"));
    obj.insert("model".into(), model_info(model));
    obj.insert("finalRootInBounds".into(), json!(mus.final_root_in_bounds));
    obj.insert("bounds".into(), json!([mus.lower_bound, mus.upper_bound]));
    obj.insert("msdOverN".into(), json!(msd_over_n));
    Ok(Output {
        report,
        tables: vec![Table {
            suffix: "",
            header: header(&["n", "c_n", "mu_root", "mu_ratio", "msd", "msd_over_n", "pi_n"]),
            rows,
        }],
        summary: format!("delta = {} (delta0 = {}, mu = {mu_used})", est.delta, est.delta0),
        failures: 0,
    })
}

pub fn sample(ctx: &Context, model: &Model<f64>, n: usize, count: u64, seed: u64) -> Result<Output, Error> {
    let b = sample_walks_with(ctx.exec, model, n, count, seed)?;
    let row = vec![
        b.n.to_string(),
        b.count.to_string(),
        b.seed.to_string(),
        b.cn_estimate.to_string(),
        b.cn_std_error.to_string(),
        b.msd_estimate.map_or(String::new(), |m| m.to_string()),
        b.effective_samples.to_string(),
        b.nonzero_samples.to_string(),
        b.rng.to_string(),
    ];
    let summary = match b.msd_estimate {
        Some(msd) => format!("c_{n} ~ {} +- {}, msd ~ {msd}", b.cn_estimate, b.cn_std_error),
        None => format!("c_{n} ~ 0: every sample had zero weight"),
    };
    Ok(Output {
        report: json!({"command": "sample", "model": model_info(model), "batch": b}),
        tables: vec![Table {
            suffix: "",
            header: header(&[
                "n",
                "count",
                "seed",
                "cn_estimate",
                "cn_std_error",
                "msd_estimate",
                "effective_samples",
                "nonzero_samples",
                "rng",
            ]),
            rows: vec![row],
        }],
        summary,
        failures: 0,
    })
}

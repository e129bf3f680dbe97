use anyhow::{bail, Context, Result};
use matchwelfare::extensions::{linear_utility_partial, rsd_bundles_monte_carlo, rsd_partial_monte_carlo, sd_partial};
use matchwelfare::instances::*;
use matchwelfare::rsd::sample_orders;
use matchwelfare::*;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub family: String,
    pub grid: Vec<usize>,
    pub t: Option<usize>,
    pub k: Option<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Overrides the default mechanism for the `random` family.
    pub mechanism: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub family: String,
    pub n: usize,
    pub param: String,
    pub mechanism: &'static str,
    pub welfare: String,
    pub welfare_decimal: f64,
    pub opt: String,
    pub opt_decimal: f64,
    pub ratio: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// `"100,200,500"` into a list of sizes.
pub fn parse_grid(text: &str) -> Result<Vec<usize>> {
    let grid: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse::<usize>().with_context(|| format!("grid entry {s:?} is not a size")))
        .collect::<Result<_>>()?;
    if grid.is_empty() || grid.contains(&0) {
        bail!("grid must list positive sizes, got {text:?}");
    }
    Ok(grid)
}

fn exact_row(family: &str, n: usize, param: String, mech: &'static str, welfare: Rational, opt: Rational) -> Row {
    Row {
        family: family.into(),
        n,
        param,
        mechanism: mech,
        welfare_decimal: welfare.to_f64(),
        opt_decimal: opt.to_f64(),
        ratio: (&welfare / &opt).to_f64(),
        welfare: welfare.to_string(),
        opt: opt.to_string(),
        stderr: 0.0,
        samples: 0,
    }
}

fn estimated_row(
    family: &str,
    n: usize,
    param: String,
    mech: &'static str,
    est: MeanEstimate,
    opt: Rational,
) -> Row {
    let o = opt.to_f64();
    Row {
        family: family.into(),
        n,
        param,
        mechanism: mech,
        welfare: format!("{}", est.mean),
        welfare_decimal: est.mean,
        opt: opt.to_string(),
        opt_decimal: o,
        ratio: est.mean / o,
        stderr: est.stderr / o,
        samples: est.samples,
    }
}

fn rsd_linear(p: &PreferenceProfile, samples: usize, seed: u64) -> MeanEstimate {
    let values = sample_orders(p.n(), samples, seed, |order| {
        let m = serial_dictatorship(p, order).expect("valid order");
        linear_utility(&m, p).expect("sizes match").to_f64()
    });
    MeanEstimate::from_values(&values)
}

pub fn sweep(cfg: &SweepConfig) -> Result<Vec<Row>> {
    let f = cfg.family.as_str();
    let (samples, seed) = (cfg.samples, cfg.seed);
    cfg.grid
        .iter()
        .map(|&n| -> Result<Row> {
            Ok(match f {
                "ps-hard" => {
                    let t = match cfg.t {
                        Some(t) => t,
                        None if n % 100 == 0 => n / 100,
                        None => bail!("ps-hard sweep without --t uses t = n/100; n={n} is not a multiple of 100"),
                    };
                    let p = gen_ps_linear_hard(n, t)?;
                    let ps = ps_allocate(&p).matrix;
                    let (opt, _) = optimal_linear_welfare(&p);
                    exact_row(f, n, format!("t={t}"), "ps", linear_utility_matrix(&ps, &p)?, opt)
                }
                "rsd-hard" => {
                    let p = gen_rsd_linear_hard(n, seed)?;
                    let (opt, _) = optimal_linear_welfare(&p);
                    let t = fifth_root_floor(n);
                    estimated_row(f, n, format!("t={t}"), "rsd-mc", rsd_linear(&p, samples, seed), opt)
                }
                "random" => {
                    let p = gen_random(n, seed)?;
                    let (opt, _) = optimal_linear_welfare(&p);
                    match cfg.mechanism.as_deref().unwrap_or("ps") {
                        "ps" => exact_row(f, n, String::new(), "ps", linear_utility_matrix(&ps_allocate(&p).matrix, &p)?, opt),
                        "rsd-mc" => estimated_row(f, n, String::new(), "rsd-mc", rsd_linear(&p, samples, seed), opt),
                        other => bail!("sweep random supports --mechanism ps or rsd-mc, not {other}"),
                    }
                }
                "identical" => {
                    let p = gen_identical(n)?;
                    let b = gen_random_benchmark(n, seed)?;
                    let values = sample_orders(n, samples, seed, |order| {
                        let m = serial_dictatorship(&p, order).expect("valid order");
                        ordinal_happy_count(&m, &b, &p).expect("sizes match") as f64
                    });
                    let est = MeanEstimate::from_values(&values);
                    estimated_row(f, n, "benchmark=random".into(), "rsd-mc", est, Rational::from_usize(n))
                }
                "kvv-hard" => {
                    let g = gen_kvv_hard(n)?;
                    let est = rsd_partial_monte_carlo(&g.profile, &g.benchmark, samples, seed)?;
                    let happy = MeanEstimate {
                        mean: est.happy_fraction.mean * n as f64,
                        stderr: est.happy_fraction.stderr * n as f64,
                        samples,
                    };
                    estimated_row(f, n, "metric=happy".into(), "rsd-partial", happy, Rational::from_usize(n))
                }
                "sd-log" => {
                    let p = gen_sd_log_hard(n)?;
                    let order: Vec<usize> = (0..n).collect();
                    let m = sd_partial(&p, &order)?;
                    // Agent n/2 + i is the only one listing item i, at utility 1.
                    let opt = Rational::from_usize(n / 2);
                    exact_row(f, n, "order=identity".into(), "sd", linear_utility_partial(&m, &p)?, opt)
                }
                "partial-adversarial" => {
                    let g = gen_partial_adversarial(n)?;
                    let empty = Matching::empty(n, g.profile.m());
                    let est = rsd_partial_monte_carlo(&g.profile, &empty, samples, seed)?;
                    estimated_row(f, n, format!("c={}", g.cube_root), "rsd-partial", est.utility, g.opt)
                }
                "kdemand" => {
                    let Some(k) = cfg.k else { bail!("kdemand sweep needs --K") };
                    let g = gen_kdemand_hard(n, k)?;
                    let est = rsd_bundles_monte_carlo(&g.profile, &g.benchmark, samples, seed)?;
                    estimated_row(f, n, format!("K={k}"), "rsd-bundles", est, Rational::one())
                }
                other => bail!(
                    "unknown family {other:?}; expected one of {}",
                    GeneratorSpec::FAMILIES.join(", ")
                ),
            })
        })
        .collect()
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out =
        String::from("family,n,param,mechanism,welfare,welfare_decimal,opt,opt_decimal,ratio,stderr,samples\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.family, r.n, r.param, r.mechanism, r.welfare, r.welfare_decimal, r.opt, r.opt_decimal, r.ratio,
            r.stderr, r.samples
        ));
    }
    out
}

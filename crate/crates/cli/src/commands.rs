use anyhow::{anyhow, bail, Context, Result};
use matchwelfare::extensions::{
    linear_utility_partial, optimal_partial_welfare, ordinal_happy_partial, rsd_bundles_monte_carlo,
    rsd_partial_monte_carlo, sd_partial, PartialProfile,
};
use matchwelfare::instances::{gen_random_benchmark, Benchmark, GeneratorSpec, Instance};
use matchwelfare::rsd::sample_orders;
use matchwelfare::welfare::{kdemand_finite_bound, kdemand_lower_bound};
use matchwelfare::*;
use serde_json::{json, Map, Value};

use crate::io::{read_benchmark, Loaded};

/// Builds a generator spec from loose flags, naming any missing parameter.
pub fn generator_spec(
    family: &str,
    n: Option<usize>,
    t: Option<usize>,
    k: Option<usize>,
    seed: u64,
) -> Result<GeneratorSpec> {
    let need_n = || n.ok_or_else(|| anyhow!("generator {family} needs --n"));
    Ok(match family {
        "identical" => GeneratorSpec::Identical { n: need_n()? },
        "random" => GeneratorSpec::Random { n: need_n()?, seed },
        "rsd-hard" => GeneratorSpec::RsdHard { n: need_n()?, seed },
        "ps-hard" => GeneratorSpec::PsHard {
            n: need_n()?,
            t: t.ok_or_else(|| anyhow!("generator ps-hard needs --t"))?,
        },
        "kvv-hard" => GeneratorSpec::KvvHard { n: need_n()? },
        "sd-log" => GeneratorSpec::SdLog { n: need_n()? },
        "partial-adversarial" => GeneratorSpec::PartialAdversarial { n: need_n()? },
        "kdemand" => GeneratorSpec::Kdemand {
            n: need_n()?,
            k: k.ok_or_else(|| anyhow!("generator kdemand needs --K"))?,
        },
        other => bail!(
            "unknown generator {other:?}; expected one of {}",
            GeneratorSpec::FAMILIES.join(", ")
        ),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mechanism {
    RsdExact,
    RsdMc,
    Ps,
    Sd,
    RsdPartial,
    RsdBundles,
}

impl Mechanism {
    pub fn name(self) -> &'static str {
        match self {
            Mechanism::RsdExact => "rsd-exact",
            Mechanism::RsdMc => "rsd-mc",
            Mechanism::Ps => "ps",
            Mechanism::Sd => "sd",
            Mechanism::RsdPartial => "rsd-partial",
            Mechanism::RsdBundles => "rsd-bundles",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mechanism: Mechanism,
    /// `None`, a path, or the literal `random`.
    pub benchmark: Option<String>,
    pub samples: usize,
    pub seed: u64,
    pub guard: usize,
    pub order: Option<Vec<usize>>,
    pub lottery: bool,
}

/// Enumeration guard, overridable through `MATCHWELFARE_ENUM_GUARD`.
pub fn enum_guard() -> Result<usize> {
    match std::env::var("MATCHWELFARE_ENUM_GUARD") {
        Ok(v) => v
            .trim()
            .parse()
            .with_context(|| format!("MATCHWELFARE_ENUM_GUARD={v:?} is not a number")),
        Err(_) => Ok(DEFAULT_ENUM_GUARD),
    }
}

fn resolve_benchmark(loaded: &Loaded, cfg: &RunConfig) -> Result<Option<Benchmark>> {
    match cfg.benchmark.as_deref() {
        None => Ok(loaded.benchmark.clone()),
        Some("random") => match &loaded.instance {
            Instance::Complete(p) => Ok(Some(Benchmark::Items(gen_random_benchmark(p.n(), cfg.seed)?))),
            _ => bail!("--benchmark random is only defined for complete instances"),
        },
        Some(path) => Ok(Some(read_benchmark(path.as_ref(), &loaded.instance)?)),
    }
}

fn item_benchmark(b: Option<Benchmark>) -> Result<Option<Matching>> {
    match b {
        None => Ok(None),
        Some(Benchmark::Items(m)) => Ok(Some(m)),
        Some(Benchmark::Bundles(_)) => bail!("bundle benchmark given for an item instance"),
    }
}

fn require_complete(instance: &Instance, mech: Mechanism) -> Result<&PreferenceProfile> {
    match instance {
        Instance::Complete(p) => Ok(p),
        other => bail!("mechanism {} requires complete lists, got a {} instance", mech.name(), other.kind()),
    }
}

fn matrix_json(m: &AllocationMatrix) -> Value {
    Value::Array(
        (0..m.n())
            .map(|a| {
                Value::Array(
                    m.row(a)
                        .iter()
                        .map(|(i, x)| json!({"item": i, "p": x.to_string()}))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn pairs_json(m: &Matching) -> Value {
    json!(m.pairs().map(|(a, i)| [a, i]).collect::<Vec<_>>())
}

fn estimate_json(e: &MeanEstimate) -> Value {
    json!({"mean": e.mean, "stderr": e.stderr, "samples": e.samples})
}

pub fn run(loaded: &Loaded, cfg: &RunConfig) -> Result<Value> {
    let bench = resolve_benchmark(loaded, cfg)?;
    let mut out = Map::new();
    out.insert("mechanism".into(), json!(cfg.mechanism.name()));
    out.insert("n".into(), json!(loaded.instance.n()));
    match cfg.mechanism {
        Mechanism::RsdExact | Mechanism::Ps => {
            let p = require_complete(&loaded.instance, cfg.mechanism)?;
            let bench = item_benchmark(bench)?;
            let matrix = if cfg.mechanism == Mechanism::RsdExact {
                rsd_exact_guarded(p, cfg.guard)?
            } else {
                let ps = ps_allocate(p);
                out.insert(
                    "exhaustTimes".into(),
                    json!(ps.exhaust.times.iter().map(Rational::to_string).collect::<Vec<_>>()),
                );
                out.insert(
                    "phases".into(),
                    json!(ps
                        .phases
                        .phases
                        .iter()
                        .map(|ph| json!({"start": ph.start.to_string(), "end": ph.end.to_string(), "exhausted": ph.exhausted}))
                        .collect::<Vec<_>>()),
                );
                if cfg.lottery {
                    let lottery = bvn_decompose(&ps.matrix)?;
                    out.insert(
                        "lottery".into(),
                        json!(lottery
                            .components()
                            .iter()
                            .map(|(w, m)| json!({"weight": w.to_string(), "matching": m.as_permutation()}))
                            .collect::<Vec<_>>()),
                    );
                }
                ps.matrix
            };
            let report = welfare_report(&matrix, p, bench.as_ref())?;
            out.insert("matrix".into(), matrix_json(&matrix));
            out.insert("welfare".into(), serde_json::to_value(report)?);
        }
        Mechanism::RsdMc => {
            let p = require_complete(&loaded.instance, cfg.mechanism)?;
            let bench = item_benchmark(bench)?;
            let est = rsd_monte_carlo(p, cfg.samples, cfg.seed)?;
            let n = p.n();
            let per_sample = sample_orders(n, cfg.samples, cfg.seed, |order| {
                let m = serial_dictatorship(p, order).expect("valid order");
                let happy = bench
                    .as_ref()
                    .map(|b| ordinal_happy_count(&m, b, p).expect("sizes match") as f64);
                (linear_utility(&m, p).expect("sizes match").to_f64(), happy)
            });
            let utility = MeanEstimate::from_values(&per_sample.iter().map(|s| s.0).collect::<Vec<_>>());
            let (opt, _) = optimal_linear_welfare(p);
            let mut welfare = Map::new();
            welfare.insert("linearUtility".into(), estimate_json(&utility));
            welfare.insert("optLinear".into(), json!(opt.to_string()));
            welfare.insert("linearRatio".into(), json!(utility.mean / opt.to_f64()));
            if bench.is_some() {
                let happy: Vec<f64> = per_sample.iter().map(|s| s.1.expect("benchmark given")).collect();
                welfare.insert("ordinalHappy".into(), estimate_json(&MeanEstimate::from_values(&happy)));
            }
            out.insert("samples".into(), json!(cfg.samples));
            out.insert("seed".into(), json!(cfg.seed));
            out.insert(
                "matrix".into(),
                Value::Array(
                    (0..n)
                        .map(|a| {
                            Value::Array(
                                (0..n)
                                    .filter(|&i| est.hits[a][i] > 0)
                                    .map(|i| json!({"item": i, "mean": est.mean(a, i), "stderr": est.stderr(a, i)}))
                                    .collect(),
                            )
                        })
                        .collect(),
                ),
            );
            out.insert("welfare".into(), Value::Object(welfare));
        }
        Mechanism::Sd => {
            let n = loaded.instance.n();
            let order = cfg
                .order
                .clone()
                .or_else(|| loaded.order.clone())
                .unwrap_or_else(|| (0..n).collect());
            let bench = item_benchmark(bench)?;
            let mut welfare = Map::new();
            let matching = match &loaded.instance {
                Instance::Complete(p) => {
                    let m = serial_dictatorship(p, &order)?;
                    welfare.insert("linearUtility".into(), json!(linear_utility(&m, p)?.to_string()));
                    if let Some(b) = &bench {
                        welfare.insert("ordinalHappy".into(), json!(ordinal_happy_count(&m, b, p)?));
                    }
                    m
                }
                Instance::Partial(p) => {
                    let m = sd_partial(p, &order)?;
                    welfare.insert("linearUtility".into(), json!(linear_utility_partial(&m, p)?.to_string()));
                    if let Some(b) = &bench {
                        welfare.insert("ordinalHappy".into(), json!(ordinal_happy_partial(&m, b, p)?));
                    }
                    m
                }
                Instance::Bundle(_) => bail!("mechanism sd does not take bundle instances; use rsd-bundles"),
            };
            welfare.insert("matched".into(), json!(matching.size()));
            out.insert("order".into(), json!(order));
            out.insert("matching".into(), pairs_json(&matching));
            out.insert("welfare".into(), Value::Object(welfare));
        }
        Mechanism::RsdPartial => {
            let profile = match &loaded.instance {
                Instance::Complete(p) => PartialProfile::from_complete(p),
                Instance::Partial(p) => p.clone(),
                Instance::Bundle(_) => bail!("mechanism rsd-partial does not take bundle instances"),
            };
            let bench = item_benchmark(bench)?;
            let reference = bench.clone().unwrap_or_else(|| Matching::empty(profile.n(), profile.m()));
            let est = rsd_partial_monte_carlo(&profile, &reference, cfg.samples, cfg.seed)?;
            let mut welfare = Map::new();
            welfare.insert("linearUtility".into(), estimate_json(&est.utility));
            welfare.insert("matched".into(), estimate_json(&est.matched));
            if bench.is_some() {
                welfare.insert("happyFraction".into(), estimate_json(&est.happy_fraction));
            }
            if profile.n().max(profile.m()) <= 3000 {
                let (opt, _) = optimal_partial_welfare(&profile);
                welfare.insert("linearRatio".into(), json!(est.utility.mean / opt.to_f64()));
                welfare.insert("optLinear".into(), json!(opt.to_string()));
            }
            out.insert("samples".into(), json!(cfg.samples));
            out.insert("seed".into(), json!(cfg.seed));
            out.insert("welfare".into(), Value::Object(welfare));
        }
        Mechanism::RsdBundles => {
            let Instance::Bundle(p) = &loaded.instance else {
                bail!("mechanism rsd-bundles requires a bundle instance, got {}", loaded.instance.kind());
            };
            let Some(Benchmark::Bundles(b)) = bench else {
                bail!("rsd-bundles measures happiness and needs a bundle benchmark (--benchmark PATH)");
            };
            let est = rsd_bundles_monte_carlo(p, &b, cfg.samples, cfg.seed)?;
            let k = p.k();
            out.insert("samples".into(), json!(cfg.samples));
            out.insert("seed".into(), json!(cfg.seed));
            out.insert(
                "welfare".into(),
                json!({
                    "happyFraction": estimate_json(&est),
                    "lowerBound": kdemand_lower_bound(k as u32)?,
                    "finiteBound": kdemand_finite_bound(p.n(), k),
                }),
            );
        }
    }
    Ok(Value::Object(out))
}

/// Flattens a JSON document to `key,value,decimal` rows. Rational strings get
/// a decimal column; other strings leave it empty.
pub fn flatten_csv(value: &Value) -> String {
    let mut rows = vec!["key,value,decimal".to_string()];
    flatten_into(value, String::new(), &mut rows);
    rows.join("\n") + "\n"
}

fn flatten_into(value: &Value, key: String, rows: &mut Vec<String>) {
    let join = |k: &str| if key.is_empty() { k.to_string() } else { format!("{key}.{k}") };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                flatten_into(v, join(k), rows);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_into(v, join(&i.to_string()), rows);
            }
        }
        Value::String(s) => {
            let decimal = s.parse::<Rational>().map(|r| r.to_f64().to_string()).unwrap_or_default();
            rows.push(format!("{key},{s},{decimal}"));
        }
        Value::Number(x) => rows.push(format!("{key},{x},{x}")),
        Value::Bool(b) => rows.push(format!("{key},{b},")),
        Value::Null => rows.push(format!("{key},,")),
    }
}

//! On-disk formats.
//!
//! Instance: `{"kind": "complete" | "partial" | "bundle", "n", "m"?, "K"?,
//! "preferences"}` with items 0-indexed; bundle preferences are arrays of
//! `K`-item arrays. Generated files may also carry `"benchmark"` (same shape
//! as a benchmark file's `"matching"`) and an arrival `"order"`.
//!
//! Benchmark: `{"matching": [[agent, item-or-bundle-index], ...]}`.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use matchwelfare::extensions::{BundleAllocation, BundleProfile, PartialProfile};
use matchwelfare::instances::{Benchmark, Generated, Instance};
use matchwelfare::{Matching, PreferenceProfile};
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Serialize, Deserialize)]
pub struct InstanceFile {
    pub kind: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub preferences: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<Vec<(usize, usize)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BenchmarkFile {
    pub matching: Vec<(usize, usize)>,
}

/// An instance plus whatever benchmark and order travelled with it.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub instance: Instance,
    pub benchmark: Option<Benchmark>,
    pub order: Option<Vec<usize>>,
}

impl From<Generated> for Loaded {
    fn from(g: Generated) -> Self {
        Loaded { instance: g.instance, benchmark: g.benchmark, order: g.order }
    }
}

pub fn parse_instance(text: &str) -> Result<Loaded> {
    let file: InstanceFile = serde_json::from_str(text).context("malformed instance JSON")?;
    let instance = match file.kind.as_str() {
        "complete" => {
            let prefs: Vec<Vec<usize>> = serde_json::from_value(file.preferences)
                .context("complete preferences must be arrays of item ids")?;
            if prefs.len() != file.n {
                bail!("n = {} but {} preference lists given", file.n, prefs.len());
            }
            Instance::Complete(PreferenceProfile::new(file.n, prefs)?)
        }
        "partial" => {
            let lists: Vec<Vec<usize>> = serde_json::from_value(file.preferences)
                .context("partial preferences must be arrays of item ids")?;
            if lists.len() != file.n {
                bail!("n = {} but {} preference lists given", file.n, lists.len());
            }
            Instance::Partial(PartialProfile::new(file.m.unwrap_or(file.n), lists)?)
        }
        "bundle" => {
            let lists: Vec<Vec<Vec<usize>>> = serde_json::from_value(file.preferences)
                .context("bundle preferences must be arrays of K-item arrays")?;
            if lists.len() != file.n {
                bail!("n = {} but {} preference lists given", file.n, lists.len());
            }
            let Some(k) = file.k else { bail!("bundle instances need \"K\"") };
            let m = file.m.unwrap_or(file.n * k);
            Instance::Bundle(BundleProfile::new(m, k, lists)?)
        }
        other => bail!("unknown instance kind {other:?}; expected complete, partial or bundle"),
    };
    let benchmark = file.benchmark.map(|pairs| benchmark_from_pairs(&instance, &pairs)).transpose()?;
    Ok(Loaded { instance, benchmark, order: file.order })
}

pub fn read_instance(path: &Path) -> Result<Loaded> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("in {}", path.display()))
}

pub fn read_benchmark(path: &Path, instance: &Instance) -> Result<Benchmark> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: BenchmarkFile = serde_json::from_str(&text)
        .with_context(|| format!("malformed benchmark JSON in {}", path.display()))?;
    benchmark_from_pairs(instance, &file.matching)
}

pub fn benchmark_from_pairs(instance: &Instance, pairs: &[(usize, usize)]) -> Result<Benchmark> {
    let n = instance.n();
    if let Some(&(a, _)) = pairs.iter().find(|(a, _)| *a >= n) {
        bail!("benchmark names agent {a} but the instance has {n} agents");
    }
    Ok(match instance {
        Instance::Complete(_) => Benchmark::Items(Matching::from_pairs(n, n, pairs)?),
        Instance::Partial(p) => {
            let m = Matching::from_pairs(n, p.m(), pairs)?;
            p.check_matching(&m)?;
            Benchmark::Items(m)
        }
        Instance::Bundle(p) => {
            let mut slots = vec![None; n];
            for &(a, idx) in pairs {
                if slots[a].replace(idx).is_some() {
                    bail!("benchmark assigns agent {a} twice");
                }
            }
            Benchmark::Bundles(BundleAllocation::new(p, slots)?)
        }
    })
}

fn pairs_of(benchmark: &Benchmark) -> Vec<(usize, usize)> {
    match benchmark {
        Benchmark::Items(m) => m.pairs().collect(),
        Benchmark::Bundles(b) => b
            .assignment
            .iter()
            .enumerate()
            .filter_map(|(a, s)| s.map(|i| (a, i)))
            .collect(),
    }
}

pub fn instance_file(loaded: &Loaded) -> InstanceFile {
    let (kind, n, m, k, preferences) = match &loaded.instance {
        Instance::Complete(p) => ("complete", p.n(), None, None, serde_json::to_value(p.lists())),
        Instance::Partial(p) => ("partial", p.n(), Some(p.m()), None, serde_json::to_value(p.lists())),
        Instance::Bundle(p) => (
            "bundle",
            p.n(),
            Some(p.item_count()),
            Some(p.k()),
            serde_json::to_value(p.lists()),
        ),
    };
    InstanceFile {
        kind: kind.to_string(),
        n,
        m,
        k,
        preferences: preferences.expect("plain integers serialise"),
        benchmark: loaded.benchmark.as_ref().map(pairs_of),
        order: loaded.order.clone(),
    }
}

/// Canonical instance text: one agent per line.
pub fn instance_json(loaded: &Loaded) -> String {
    let file = instance_file(loaded);
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"kind\": \"{}\",\n  \"n\": {},\n", file.kind, file.n));
    if let Some(m) = file.m {
        out.push_str(&format!("  \"m\": {m},\n"));
    }
    if let Some(k) = file.k {
        out.push_str(&format!("  \"K\": {k},\n"));
    }
    let rows: Vec<String> = file
        .preferences
        .as_array()
        .expect("array")
        .iter()
        .map(|row| format!("    {row}"))
        .collect();
    out.push_str("  \"preferences\": [\n");
    out.push_str(&rows.join(",\n"));
    out.push_str("\n  ]");
    if let Some(b) = &file.benchmark {
        out.push_str(&format!(",\n  \"benchmark\": {}", serde_json::to_string(b).unwrap()));
    }
    if let Some(o) = &file.order {
        out.push_str(&format!(",\n  \"order\": {}", serde_json::to_string(o).unwrap()));
    }
    out.push_str("\n}\n");
    out
}

/// Writes `contents` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("writing {}", path.display()))
}

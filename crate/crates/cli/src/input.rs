use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use difforge::lfamily::{build, Named};
use difforge::phase::PhaseForm;
use difforge::rational::{self, Q};
use difforge::testfn::{load_probes, standard_probes};
use difforge::{PointWeighting, SpectralMeasure, TemperedObject, TestFunction, Window};
use num_traits::{One, Zero};
use serde::de::DeserializeOwned;
use serde::Deserialize;

pub const PROBE_ENV: &str = "DIFFORGE_PROBE_CORPUS";

pub fn load_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("invalid input: cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid input: {}", path.display()))
}

/// `builtin:NAME` objects: the named ε-family plus `delta_Z` and `delta_0`.
fn builtin(name: &str, eps: Option<f64>, truncation: Option<u32>) -> Result<TemperedObject> {
    match name {
        "delta_Z" => Ok(TemperedObject::direct(PointWeighting::lattice(
            Q::one(),
            Q::zero(),
        ))),
        "delta_0" => Ok(TemperedObject::direct(PointWeighting::dirac(Q::zero()))),
        _ => {
            let named: Named = name.parse()?;
            Ok(build(named, eps, truncation)?.object)
        }
    }
}

/// A realization document (`{"realization": …}`), a tempered object, or a
/// bare point weighting.
pub fn load_object(
    source: &str,
    eps: Option<f64>,
    truncation: Option<u32>,
) -> Result<TemperedObject> {
    if let Some(name) = source.strip_prefix("builtin:") {
        return builtin(name, eps, truncation);
    }
    let value: serde_json::Value = load_json(Path::new(source))?;
    let has = |k: &str| value.get(k).is_some();
    if has("realization") {
        return Ok(serde_json::from_value(value["realization"].clone())?);
    }
    if has("direct") || has("ac") || has("dual") {
        return Ok(serde_json::from_value(value)?);
    }
    if has("finite_atoms") || has("combs") || has("towers") {
        return Ok(TemperedObject::direct(serde_json::from_value(value)?));
    }
    bail!("invalid input: {source} is neither a tempered object nor a point weighting")
}

pub fn load_spectrum(
    source: &str,
    eps: Option<f64>,
    truncation: Option<u32>,
) -> Result<SpectralMeasure> {
    let obj = load_object(source, eps, truncation)?;
    if obj.has_dual() || !obj.ac.is_zero() {
        bail!("invalid input: a spectrum must be a pure point weighting");
    }
    Ok(SpectralMeasure::new(obj.direct)?)
}

#[derive(Deserialize)]
struct CatalogEntry {
    id: String,
    phase: PhaseForm,
}

pub fn load_catalog(path: &Path) -> Result<Vec<(String, PhaseForm)>> {
    let entries: Vec<CatalogEntry> = load_json(path)?;
    Ok(entries.into_iter().map(|e| (e.id, e.phase)).collect())
}

/// The probe corpus, from `DIFFORGE_PROBE_CORPUS` if set.
pub fn probes() -> Result<Vec<TestFunction>> {
    match std::env::var_os(PROBE_ENV) {
        Some(path) => {
            let text = std::fs::read_to_string(&path).with_context(|| {
                format!(
                    "invalid input: cannot read probe corpus {}",
                    Path::new(&path).display()
                )
            })?;
            Ok(load_probes(&text)?)
        }
        None => Ok(standard_probes()),
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| anyhow!("invalid input: {x:?}: {e}"))
        })
        .collect()
}

pub fn parse_window(s: &str) -> Result<Window> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [r] => {
            let r = rational::parse(r)?;
            Ok(Window::new(-r, r)?)
        }
        [lo, hi] => Ok(Window::new(rational::parse(lo)?, rational::parse(hi)?)?),
        _ => bail!("invalid input: window must be `lo,hi` or a radius"),
    }
}

//! Flat INI-style run configuration. A `[global]` section applies to every
//! experiment, a section named after an experiment applies to that one, and
//! command-line flags override both. Grid axes (`n`, `p_db`, `eps`, `rs`,
//! `delta`) take comma-separated lists; `p_db` entries may carry a `dB`
//! suffix.

use std::path::PathBuf;

use crate::{CliError, ExperimentId, SchemeKind};

/// One layer of settings; `None` means "not specified at this layer".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub n: Option<Vec<u32>>,
    pub p_db: Option<Vec<f64>>,
    pub eps: Option<Vec<f64>>,
    pub rs: Option<Vec<f64>>,
    pub delta: Option<Vec<f64>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub h2: Option<f64>,
    pub phi: Option<f64>,
    pub scheme: Option<SchemeKind>,
    pub out: Option<PathBuf>,
    pub no_timestamp: Option<bool>,
}

impl Overrides {
    /// Layer `self` on top of `base`: anything set here wins.
    pub fn over(self, base: Overrides) -> Overrides {
        Overrides {
            n: self.n.or(base.n),
            p_db: self.p_db.or(base.p_db),
            eps: self.eps.or(base.eps),
            rs: self.rs.or(base.rs),
            delta: self.delta.or(base.delta),
            trials: self.trials.or(base.trials),
            seed: self.seed.or(base.seed),
            h2: self.h2.or(base.h2),
            phi: self.phi.or(base.phi),
            scheme: self.scheme.or(base.scheme),
            out: self.out.or(base.out),
            no_timestamp: self.no_timestamp.or(base.no_timestamp),
        }
    }
}

/// Parse the config text and collapse it to the one experiment being run:
/// experiment section over `[global]`.
pub fn parse_config(text: &str, experiment: ExperimentId) -> Result<Overrides, CliError> {
    let mut global = Overrides::default();
    let mut section = Overrides::default();
    // Keys outside any section are treated as global.
    let mut target = Target::Global;

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let lineno = idx + 1;
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| CliError::Config(format!("line {lineno}: unterminated section")))?
                .trim();
            target = if name.eq_ignore_ascii_case("global") {
                Target::Global
            } else {
                match ExperimentId::from_name(name) {
                    Some(id) if id == experiment => Target::Section,
                    Some(_) => Target::Skip,
                    None => {
                        return Err(CliError::Config(format!(
                            "line {lineno}: unknown section [{name}]"
                        )))
                    }
                }
            };
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {lineno}: expected `key = value`, got `{line}`"))
        })?;
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        let value = value.trim();
        match target {
            Target::Skip => continue,
            Target::Global => set_key(&mut global, &key, value, lineno)?,
            Target::Section => set_key(&mut section, &key, value, lineno)?,
        }
    }
    Ok(section.over(global))
}

enum Target {
    Global,
    Section,
    Skip,
}

fn set_key(o: &mut Overrides, key: &str, value: &str, lineno: usize) -> Result<(), CliError> {
    let bad = |what: &str| CliError::Config(format!("line {lineno}: {key}: {what}: `{value}`"));
    match key {
        "n" => o.n = Some(parse_list(value, |s| s.parse().ok()).ok_or_else(|| bad("expected integer list"))?),
        "p_db" => {
            o.p_db = Some(
                parse_list(value, |s| {
                    let s = s
                        .strip_suffix("dB")
                        .or_else(|| s.strip_suffix("db"))
                        .or_else(|| s.strip_suffix("DB"))
                        .unwrap_or(s)
                        .trim();
                    s.parse().ok()
                })
                .ok_or_else(|| bad("expected dB value list"))?,
            )
        }
        "eps" => o.eps = Some(parse_list(value, |s| s.parse().ok()).ok_or_else(|| bad("expected number list"))?),
        "rs" => o.rs = Some(parse_list(value, |s| s.parse().ok()).ok_or_else(|| bad("expected number list"))?),
        "delta" => o.delta = Some(parse_list(value, |s| s.parse().ok()).ok_or_else(|| bad("expected number list"))?),
        "trials" => o.trials = Some(value.parse().map_err(|_| bad("expected integer"))?),
        "seed" => o.seed = Some(value.parse().map_err(|_| bad("expected integer"))?),
        "h2" => o.h2 = Some(value.parse().map_err(|_| bad("expected number"))?),
        "phi" => o.phi = Some(value.parse().map_err(|_| bad("expected number"))?),
        "scheme" => o.scheme = Some(SchemeKind::from_name(value).ok_or_else(|| bad("expected nae or ae"))?),
        "out" => o.out = Some(PathBuf::from(value)),
        "no_timestamp" => o.no_timestamp = Some(parse_bool(value).ok_or_else(|| bad("expected true or false"))?),
        _ => return Err(CliError::Config(format!("line {lineno}: unknown key `{key}`"))),
    }
    Ok(())
}

fn parse_list<T>(value: &str, one: impl Fn(&str) -> Option<T>) -> Option<Vec<T>> {
    let items: Option<Vec<T>> = value.split(',').map(|s| one(s.trim())).collect();
    items.filter(|v| !v.is_empty())
}

fn parse_bool(value: &str) -> Option<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

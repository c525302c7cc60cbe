//! `key = value` parameter files and flag overrides.

use std::path::Path;

use zalm_core::{validate_params, HeraldMode, RawParams, SourceParams};

use crate::CliError;

/// Parameter flags as parsed; `None` leaves the value from the config file or
/// the default operating point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamOverrides {
    pub gain_minus_one: Option<f64>,
    pub eta_t: Option<f64>,
    pub eta_r: Option<f64>,
    pub n_islands: Option<u64>,
    pub pump_rate: Option<f64>,
    pub herald_mode: Option<HeraldMode>,
}

impl ParamOverrides {
    pub fn apply(&self, raw: &mut RawParams) {
        if let Some(v) = self.gain_minus_one {
            raw.gain_minus_one = v;
        }
        if let Some(v) = self.eta_t {
            raw.eta_t = v;
        }
        if let Some(v) = self.eta_r {
            raw.eta_r = v;
        }
        if let Some(v) = self.n_islands {
            raw.n_islands = v;
        }
        if let Some(v) = self.pump_rate {
            raw.pump_rate = v;
        }
        if let Some(v) = self.herald_mode {
            raw.herald_mode = v;
        }
    }
}

fn bad(line: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::BadParams(format!("config line {line}: {msg}"))
}

/// Parses a config file body. Blank lines and `#` comments are ignored; keys
/// accept either `-` or `_` separators.
pub fn parse_config(text: &str) -> Result<ParamOverrides, CliError> {
    let mut out = ParamOverrides::default();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(n, "expected key = value"))?;
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let num = || {
            value
                .parse::<f64>()
                .map_err(|e| bad(n, format!("{key}: {e}")))
        };
        match key.as_str() {
            "gain_minus_one" => out.gain_minus_one = Some(num()?),
            "eta_t" => out.eta_t = Some(num()?),
            "eta_r" => out.eta_r = Some(num()?),
            "islands" | "n_islands" => {
                out.n_islands = Some(value.parse().map_err(|e| bad(n, format!("{key}: {e}")))?)
            }
            "pump_rate" => out.pump_rate = Some(num()?),
            "herald_mode" => out.herald_mode = Some(value.parse().map_err(|e| bad(n, e))?),
            other => return Err(bad(n, format!("unknown key `{other}`"))),
        }
    }
    Ok(out)
}

/// Defaults, then the config file, then flags.
pub fn resolve_params(
    config: Option<&Path>,
    flags: &ParamOverrides,
) -> Result<SourceParams, CliError> {
    let mut raw = RawParams::default();
    if let Some(path) = config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        parse_config(&text)?.apply(&mut raw);
    }
    flags.apply(&mut raw);
    validate_params(raw).map_err(|e| CliError::BadParams(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let o = parse_config(
            "# operating point\neta-t = 0.8\nislands=62 # more\n\nherald_mode = same-island\n",
        )
        .unwrap();
        assert_eq!(o.eta_t, Some(0.8));
        assert_eq!(o.n_islands, Some(62));
        assert_eq!(o.herald_mode, Some(HeraldMode::SameIsland));
        assert_eq!(o.gain_minus_one, None);
    }

    #[test]
    fn rejects_unknown_keys_and_junk() {
        assert!(matches!(
            parse_config("colour = red"),
            Err(CliError::BadParams(_))
        ));
        assert!(matches!(
            parse_config("eta_t 0.9"),
            Err(CliError::BadParams(_))
        ));
        assert!(matches!(
            parse_config("eta_t = high"),
            Err(CliError::BadParams(_))
        ));
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.cfg");
        std::fs::write(&path, "eta_t = 0.8\neta_r = 0.5\n").unwrap();
        let flags = ParamOverrides {
            eta_t: Some(0.95),
            ..Default::default()
        };
        let p = resolve_params(Some(&path), &flags).unwrap();
        assert_eq!(p.eta_t(), 0.95);
        assert_eq!(p.eta_r(), 0.5);
        assert_eq!(p.n_islands(), RawParams::default().n_islands);
    }

    #[test]
    fn invalid_values_are_bad_params() {
        let flags = ParamOverrides {
            gain_minus_one: Some(-1.0),
            eta_r: Some(0.0),
            ..Default::default()
        };
        match resolve_params(None, &flags) {
            Err(CliError::BadParams(msg)) => {
                assert!(
                    msg.contains("gain_minus_one") && msg.contains("eta_r"),
                    "{msg}"
                );
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            resolve_params(
                Some(Path::new("/nonexistent/p.cfg")),
                &ParamOverrides::default()
            ),
            Err(CliError::Io(_))
        ));
    }
}

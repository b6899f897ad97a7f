//! Flat `key = value` run files. Blank lines and `#` comments are ignored;
//! keys may use `-` or `_`.

use std::path::{Path, PathBuf};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub scenario: Option<String>,
    pub t_max: Option<f64>,
    pub t_step: Option<f64>,
    pub s_max: Option<f64>,
    pub s_step: Option<f64>,
    pub grid_step: Option<f64>,
    pub domain_max: Option<f64>,
    pub k_max: Option<usize>,
    pub sphere_samples: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub plot: Option<bool>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("config line {line}: bad value '{value}' for {key}")))
}

impl FileConfig {
    pub fn parse_str(text: &str) -> Result<Self, CliError> {
        let mut c = FileConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {line}: expected key = value"))
            })?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "scenario" => c.scenario = Some(value.to_string()),
                "t_max" => c.t_max = Some(parse(&key, value, line)?),
                "t_step" => c.t_step = Some(parse(&key, value, line)?),
                "s_max" => c.s_max = Some(parse(&key, value, line)?),
                "s_step" => c.s_step = Some(parse(&key, value, line)?),
                "grid_step" => c.grid_step = Some(parse(&key, value, line)?),
                "domain_max" => c.domain_max = Some(parse(&key, value, line)?),
                "k_max" => c.k_max = Some(parse(&key, value, line)?),
                "sphere_samples" => c.sphere_samples = Some(parse(&key, value, line)?),
                "out" | "out_dir" => c.out = Some(PathBuf::from(value)),
                "format" => {
                    c.format = Some(
                        value
                            .parse()
                            .map_err(|e| CliError::Usage(format!("config line {line}: {e}")))?,
                    )
                }
                "plot" => c.plot = Some(parse(&key, value, line)?),
                other => {
                    return Err(CliError::Usage(format!(
                        "config line {line}: unknown key '{other}'"
                    )))
                }
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        Self::parse_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_dashes() {
        let c = FileConfig::parse_str(
            "# run file\n t-max = 50\nk_max=12 # trailing\n\nformat = json\nplot = true\nout = /tmp/x\n",
        )
        .unwrap();
        assert_eq!(c.t_max, Some(50.0));
        assert_eq!(c.k_max, Some(12));
        assert_eq!(c.format, Some(Format::Json));
        assert_eq!(c.plot, Some(true));
        assert_eq!(c.out, Some(PathBuf::from("/tmp/x")));
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(matches!(
            FileConfig::parse_str("colour = red"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            FileConfig::parse_str("k_max = 1.5"),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            FileConfig::parse_str("t_max 3"),
            Err(CliError::Usage(_))
        ));
    }
}

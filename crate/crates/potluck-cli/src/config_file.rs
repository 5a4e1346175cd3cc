//! Loading and saving scenario configs as TOML.
//!
//! The file mirrors [`ScenarioConfig`] key for key; unknown keys are
//! rejected and missing keys fall back to the documented defaults, so a
//! minimal file can set nothing but `n_agents` and `n_rounds`.

use std::path::Path;

use potluck_core::{ScenarioConfig, SimError};

/// Loading failures, kept distinct so the CLI can report exactly what went
/// wrong: unreadable file, malformed TOML, or a violated invariant.
#[derive(Debug, thiserror::Error)]
pub enum ConfigFileError {
    #[error("cannot read config file `{path}`")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config file `{path}`: {message}")]
    Parse { path: String, message: String },
    #[error("config file `{path}`")]
    Invalid {
        path: String,
        #[source]
        source: SimError,
    },
}

/// Read, parse, and validate a scenario config.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigFileError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigFileError::Io {
        path: display.clone(),
        source,
    })?;
    let config: ScenarioConfig =
        toml::from_str(&text).map_err(|err| ConfigFileError::Parse {
            path: display.clone(),
            message: err.to_string(),
        })?;
    config
        .validate()
        .map_err(|source| ConfigFileError::Invalid {
            path: display,
            source,
        })?;
    Ok(config)
}

/// Serialize a config to TOML. Round-trips losslessly through
/// [`load_config`].
pub fn to_toml_string(config: &ScenarioConfig) -> String {
    toml::to_string_pretty(config).expect("config serializes to TOML")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
        let path = std::env::temp_dir().join(format!("potluck-config-{}-{name}", std::process::id()));
        let mut file = std::fs::File::create(&path).unwrap();
        file.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn minimal_file_fills_defaults() {
        let path = write_temp("minimal.toml", "n_agents = 7\nn_rounds = 3\n");
        let config = load_config(&path).unwrap();
        assert_eq!(config.n_agents, 7);
        assert_eq!(config.n_rounds, 3);
        assert_eq!(config.beta, 0.5);
        assert_eq!(config.window, 10);
        assert_eq!(config.predictor_pool.len(), 5);
    }

    #[test]
    fn out_of_range_beta_is_rejected_with_the_field_name() {
        let path = write_temp("beta.toml", "beta = 1.5\n");
        let err = load_config(&path).unwrap_err();
        assert!(matches!(err, ConfigFileError::Invalid { .. }));
        let message = format!("{:#}", anyhow::Error::new(err));
        assert!(message.contains("beta"), "got: {message}");
        assert!(message.contains("(0,1)"), "got: {message}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let path = write_temp("unknown.toml", "n_agents = 5\nbogus_knob = 1\n");
        let err = load_config(&path).unwrap_err();
        assert!(matches!(err, ConfigFileError::Parse { .. }), "got: {err}");

        let nested = write_temp(
            "unknown-nested.toml",
            "[demand_process.uniform-per-agent]\nlo = 0.0\nhi = 10.0\nskew = 2.0\n",
        );
        let err = load_config(&nested).unwrap_err();
        assert!(matches!(err, ConfigFileError::Parse { .. }), "got: {err}");
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let err = load_config(Path::new("/nonexistent/potluck.toml")).unwrap_err();
        assert!(matches!(err, ConfigFileError::Io { .. }));
    }

    #[test]
    fn defaults_round_trip_losslessly() {
        let config = ScenarioConfig::default();
        let path = write_temp("roundtrip.toml", &to_toml_string(&config));
        let reloaded = load_config(&path).unwrap();
        assert_eq!(config, reloaded);
    }
}

use std::path::Path;

use crate::trainer::TrainConfig;
use crate::{Error, Result};

/// Parses a JSON config. Missing keys take their defaults; unknown keys and
/// ill-typed values are reported with the dotted path of the offending key.
pub fn parse_config(text: &str) -> Result<TrainConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let config: TrainConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let key = if path == "." { "<root>".to_string() } else { path };
        Error::config(key, e.into_inner().to_string())
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<TrainConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// Pretty JSON with every key explicit.
pub fn echo_config(config: &TrainConfig) -> String {
    let mut s = serde_json::to_string_pretty(&config.resolved()).expect("config serializes");
    s.push('\n');
    s
}

//! Optional TOML configuration file. Keys mirror the long flag names of the
//! active subcommand; explicit flags win on conflict.

use std::path::Path;

use crate::CliError;

#[derive(Default)]
pub struct FileConfig {
    table: toml::Table,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Io(format!("cannot read config file {}: {e}", path.display()))
        })?;
        let table = text.parse::<toml::Table>().map_err(|e| {
            CliError::Usage(format!(
                "config file {} is not valid TOML: {e}",
                path.display()
            ))
        })?;
        Ok(Self { table })
    }

    pub fn u64(&self, key: &str) -> Option<u64> {
        self.table.get(key)?.as_integer().map(|v| v as u64)
    }

    pub fn i64(&self, key: &str) -> Option<i64> {
        self.table.get(key)?.as_integer()
    }

    pub fn usize(&self, key: &str) -> Option<usize> {
        self.table.get(key)?.as_integer().map(|v| v as usize)
    }

    pub fn f64(&self, key: &str) -> Option<f64> {
        let v = self.table.get(key)?;
        v.as_float().or_else(|| v.as_integer().map(|i| i as f64))
    }

    pub fn flag(&self, key: &str) -> Option<bool> {
        self.table.get(key)?.as_bool()
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.table.get(key)?.as_str()
    }

    pub fn i64_list(&self, key: &str) -> Option<Vec<i64>> {
        let arr = self.table.get(key)?.as_array()?;
        arr.iter().map(|v| v.as_integer()).collect()
    }

    pub fn f64_list(&self, key: &str) -> Option<Vec<f64>> {
        let arr = self.table.get(key)?.as_array()?;
        arr.iter()
            .map(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)))
            .collect()
    }
}

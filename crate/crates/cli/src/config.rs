//! Flat JSON config files overlaid with `--key value` flags.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer};

/// Declares a config struct whose fields are all optional, readable both from a JSON
/// object (unknown keys rejected) and from `--field-name value` flags.
macro_rules! config {
    ($(#[$meta:meta])* pub struct $name:ident { $($(#[$fmeta:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Default, Clone, clap::Args, serde::Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $(
                $(#[$fmeta])*
                #[arg(long)]
                pub $field: Option<$ty>,
            )*
        }

        impl $crate::config::Overlay for $name {
            fn overlay(self, top: Self) -> Self {
                $name { $($field: top.$field.or(self.$field),)* }
            }
        }
    };
}

pub(crate) use config;

pub trait Overlay {
    /// Fields set in `top` win.
    fn overlay(self, top: Self) -> Self;
}

/// Reads `path` (if any) and overlays the flag values on top of it.
pub fn resolve<C: DeserializeOwned + Default + Overlay>(path: Option<&Path>, flags: C) -> Result<C> {
    let base = match path {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str::<C>(&text).with_context(|| format!("invalid config {}", p.display()))?
        }
        None => C::default(),
    };
    Ok(base.overlay(flags))
}

/// Value of a required key, or an error naming it.
pub fn need<T: Clone>(value: &Option<T>, key: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| anyhow!("missing required key `{key}` (config file or --{})", key.replace('_', "-")))
}

/// Item list given as a JSON array or as a comma-separated string.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ItemList(pub Vec<usize>);

impl FromStr for ItemList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(ItemList(Vec::new()));
        }
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| format!("item `{}`: {e}", t.trim())))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(ItemList)
    }
}

impl fmt::Display for ItemList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&items.join(","))
    }
}

impl<'de> Deserialize<'de> for ItemList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<usize>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::List(v) => Ok(ItemList(v)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `-` means standard output.
pub fn output_path(value: &Option<PathBuf>) -> Option<&Path> {
    value.as_deref().filter(|p| p.as_os_str() != "-")
}

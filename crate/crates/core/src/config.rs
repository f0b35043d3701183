//! `key=value` configuration files shared by the training commands.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fsutil::data_lines;

/// Parses `key=value` lines; blanks and `#` comments are skipped.
pub fn parse_key_values(text: &str, origin: &str) -> Result<Vec<(String, String)>> {
    data_lines(text)
        .map(|(n, line)| {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(origin, n, "expected `key=value`"))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(Error::parse(origin, n, "empty key"));
            }
            Ok((k.to_string(), v.to_string()))
        })
        .collect()
}

pub(crate) fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

//! Ordered `key = value` report documents.

use std::fmt::{self, Display};

use super::config::ConfigError;

/// Text form of a report value.
pub trait Value {
    fn render(&self) -> String;
}

/// Shortest round-trip text; exponent form outside `[1e-4, 1e15)`.
pub fn format_f64(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

impl Value for f64 {
    fn render(&self) -> String {
        format_f64(*self)
    }
}

macro_rules! display_value {
    ($($t:ty),*) => {
        $(impl Value for $t {
            fn render(&self) -> String {
                self.to_string()
            }
        })*
    };
}

display_value!(usize, u64, i32, bool, str, String);

impl<T: Value + ?Sized> Value for &T {
    fn render(&self) -> String {
        (**self).render()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

fn clean(s: &str) -> String {
    s.replace(['\n', '\r'], " ").trim().to_string()
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends an entry. Floats use the shortest representation that
    /// parses back to the same value.
    pub fn push(&mut self, key: impl Into<String>, value: impl Value) {
        let key = key.into();
        debug_assert!(!key.contains('=') && !key.contains(char::is_whitespace), "{key}");
        self.entries.push((key, clean(&value.render())));
    }

    pub fn push_opt(&mut self, key: impl Into<String>, value: Option<impl Value>) {
        match value {
            Some(v) => self.push(key, v),
            None => self.push(key, "none"),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .or_else(|| line.strip_suffix(" =").map(|k| (k, "")))
                .ok_or_else(|| ConfigError(format!("report line {}: expected `key = value`", n + 1)))?;
            entries.push((k.to_string(), v.to_string()));
        }
        Ok(Self { entries })
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            if v.is_empty() {
                writeln!(f, "{k} =")?;
            } else {
                writeln!(f, "{k} = {v}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn floats_round_trip() {
        let mut r = Report::new();
        r.push("x", 0.1 + 0.2);
        r.push("y", -1e-300);
        r.push("z", 2.5e-7);
        r.push("empty", "");
        let back = Report::parse(&r.to_string()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.get("x").unwrap().parse::<f64>().unwrap(), 0.1 + 0.2);
        assert_eq!(back.get("z"), Some("2.5e-7"));
    }

    proptest! {
        #[test]
        fn serialization_round_trips(vals in proptest::collection::vec((any::<f64>(), "[ -~]{0,20}"), 0..12)) {
            let mut r = Report::new();
            for (i, (x, s)) in vals.iter().enumerate() {
                r.push(format!("num.{i}"), *x);
                r.push(format!("text.{i}"), s.as_str());
            }
            let back = Report::parse(&r.to_string()).unwrap();
            prop_assert_eq!(&back, &r);
            for (i, (x, _)) in vals.iter().enumerate() {
                let parsed: f64 = back.get(&format!("num.{i}")).unwrap().parse().unwrap();
                prop_assert!(parsed == *x || (parsed.is_nan() && x.is_nan()));
            }
        }
    }
}

//! JSON report envelope shared by the command-line tools.
//!
//! Reports are deterministic given the inputs: keys serialize in sorted
//! order and the only run-dependent field is the optional timestamp,
//! which callers can omit to obtain byte-identical reruns.

use serde::Serialize;
use std::io::{self, Write};
use std::time::{SystemTime, UNIX_EPOCH};

/// Whole-seconds Unix timestamp.
pub fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Wraps a serializable body as `{command, timestamp?, result}`.
pub fn envelope<T: Serialize>(
    command: &str,
    timestamp: Option<u64>,
    body: &T,
) -> serde_json::Value {
    let mut doc = serde_json::Map::new();
    doc.insert("command".into(), serde_json::json!(command));
    if let Some(ts) = timestamp {
        doc.insert("timestamp".into(), serde_json::json!(ts));
    }
    doc.insert(
        "result".into(),
        serde_json::to_value(body).expect("report bodies serialize"),
    );
    serde_json::Value::Object(doc)
}

/// Pretty-prints a report with a trailing newline.
pub fn write_json<W: Write>(writer: &mut W, value: &serde_json::Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *writer, value)?;
    writeln!(writer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_is_deterministic_without_timestamp() {
        let body = serde_json::json!({"b": 1, "a": [1.5, 2.5]});
        let mut first = Vec::new();
        write_json(&mut first, &envelope("demo", None, &body)).unwrap();
        let mut second = Vec::new();
        write_json(&mut second, &envelope("demo", None, &body)).unwrap();
        assert_eq!(first, second);
        let text = String::from_utf8(first).unwrap();
        assert!(!text.contains("timestamp"));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn envelope_carries_timestamp_when_asked() {
        let v = envelope("demo", Some(123), &serde_json::json!({}));
        assert_eq!(v["timestamp"], serde_json::json!(123));
        assert_eq!(v["command"], serde_json::json!("demo"));
    }
}

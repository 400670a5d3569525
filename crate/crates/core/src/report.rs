//! Deterministic JSON text for reports: objects and arrays of containers are
//! indented, arrays of scalars stay on one line.

use serde::Serialize;
use serde_json::Value;

pub fn to_json_text<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report values always serialize");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| !i.is_object() && !i.is_array()),
        Value::Object(map) => map.is_empty(),
        _ => true,
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    if is_flat(v) {
        out.push_str(&v.to_string());
        return;
    }
    let pad = "  ".repeat(depth + 1);
    match v {
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad);
                write_inline_or_nested(out, item, depth + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(depth));
            out.push(']');
        }
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&"  ".repeat(depth));
            out.push('}');
        }
        _ => unreachable!(),
    }
}

// small objects and scalar arrays inside arrays (rows, records) stay on one line
fn write_inline_or_nested(out: &mut String, v: &Value, depth: usize) {
    let inline = match v {
        Value::Object(map) => map.values().all(is_flat),
        _ => is_flat(v),
    };
    if inline {
        out.push_str(&v.to_string());
    } else {
        write_value(out, v, depth);
    }
}

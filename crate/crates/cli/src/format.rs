//! Number formatting for the JSON and CSV writers.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

/// Decimal exponent of `v` after rounding to `digits` significant digits.
fn exponent(v: f64, digits: usize) -> i32 {
    let s = format!("{:.*e}", digits - 1, v);
    s[s.find('e').unwrap() + 1..].parse().unwrap()
}

fn significant(v: f64, digits: usize, trim: bool) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let e = exponent(v, digits);
    let mut s = if (-5..digits as i32).contains(&e) {
        format!("{:.*}", (digits as i32 - 1 - e).max(0) as usize, v)
    } else {
        format!("{:.*e}", digits - 1, v)
    };
    if trim {
        let (mantissa, tail) = match s.find('e') {
            Some(k) => (s[..k].to_string(), s[k..].to_string()),
            None => (s.clone(), String::new()),
        };
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            mantissa
        };
        s = mantissa + &tail;
    }
    s
}

/// JSON number with 17 significant digits, enough to round-trip any `f64`.
pub fn json_number(v: f64) -> String {
    let s = significant(v, 17, false);
    if v == 0.0 {
        "0.0".into()
    } else if s.contains(['.', 'e']) {
        s
    } else {
        s + ".0"
    }
}

/// CSV cell with 6 significant digits and trailing zeros removed.
pub fn csv_number(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    significant(v, 6, true)
}

/// Pretty printer that writes every float through [`json_number`].
struct FixedDigits<'a>(PrettyFormatter<'a>);

impl Formatter for FixedDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(json_number(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON followed by a newline. Non-finite floats become `null`.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializable document");
    out.push(b'\n');
    String::from_utf8(out).expect("utf-8 json")
}

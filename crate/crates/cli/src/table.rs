//! CSV emission and parsing of sweep tables.

use std::io::{Read, Write};

use nls_scatter::SweepTableF64;

use crate::error::CliError;

pub const HEADER: [&str; 11] = [
    "E",
    "k",
    "R_left",
    "R_right",
    "T_left",
    "T_right",
    "sum_left",
    "sum_right",
    "W1",
    "W2",
    "converged",
];

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `printf("%.12g")`: 12 significant digits, trailing zeros removed,
/// exponent form outside `[1e-4, 1e12)`. Always uses `.` as the separator.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = SIGNIFICANT_DIGITS;
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes `table` with the fixed header. Failed points keep `E` and `k` and
/// leave the numeric fields empty; `W2` is empty for the half interval;
/// `converged` is empty when convergence was not checked.
pub fn write_csv<W: Write>(table: &SweepTableF64, out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().from_writer(out);
    w.write_record(HEADER)?;
    for row in &table.rows {
        let mut rec: Vec<String> = vec![fmt_sig(row.energy), fmt_sig(row.energy.sqrt())];
        match row.result() {
            Some(r) => {
                rec.extend(
                    [
                        r.reflectivity_left,
                        r.reflectivity_right,
                        r.transmissivity_left,
                        r.transmissivity_right,
                        r.sum_left,
                        r.sum_right,
                        r.endpoint.w1(),
                    ]
                    .map(fmt_sig),
                );
                rec.push(r.endpoint.w2().map(fmt_sig).unwrap_or_default());
            }
            None => rec.extend(std::iter::repeat_n(String::new(), 8)),
        }
        rec.push(row.converged.map(|c| c.to_string()).unwrap_or_default());
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn csv_string(table: &SweepTableF64) -> String {
    let mut buf = Vec::new();
    write_csv(table, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ASCII output")
}

/// One parsed CSV line. Numeric fields are `None` when empty.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub energy: f64,
    pub k: f64,
    pub reflectivity_left: Option<f64>,
    pub reflectivity_right: Option<f64>,
    pub transmissivity_left: Option<f64>,
    pub transmissivity_right: Option<f64>,
    pub sum_left: Option<f64>,
    pub sum_right: Option<f64>,
    pub w1: Option<f64>,
    pub w2: Option<f64>,
    pub converged: Option<bool>,
}

fn bad(line: u64, msg: impl Into<String>) -> CliError {
    CliError::Validation {
        key: format!("csv line {line}"),
        message: msg.into(),
    }
}

fn field(s: &str, line: u64) -> Result<Option<f64>, CliError> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| bad(line, format!("not a number: {s:?}")))
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>, CliError> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != HEADER {
        return Err(bad(1, format!("unexpected header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let f = |i: usize| field(&rec[i], line);
        let converged = match &rec[10] {
            "" => None,
            "true" => Some(true),
            "false" => Some(false),
            other => {
                return Err(bad(
                    line,
                    format!("converged must be true/false, got {other:?}"),
                ))
            }
        };
        rows.push(CsvRow {
            energy: f(0)?.ok_or_else(|| bad(line, "missing E"))?,
            k: f(1)?.ok_or_else(|| bad(line, "missing k"))?,
            reflectivity_left: f(2)?,
            reflectivity_right: f(3)?,
            transmissivity_left: f(4)?,
            transmissivity_right: f(5)?,
            sum_left: f(6)?,
            sum_right: f(7)?,
            w1: f(8)?,
            w2: f(9)?,
            converged,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (1.0, "1"),
            (0.1, "0.1"),
            (10.0, "10"),
            (-3.0, "-3"),
            (1.0 / 3.0, "0.333333333333"),
            (2.0f64.sqrt(), "1.41421356237"),
            (123456.789, "123456.789"),
            (1e-5, "1e-05"),
            (1.5e-7, "1.5e-07"),
            (0.0001, "0.0001"),
            (1e12, "1e+12"),
            (999999999999.0, "999999999999"),
            (9.9999999999996, "10"),
            (5340.123456789012, "5340.12345679"),
            (-0.0, "0"),
            (6.02214076e23, "6.02214076e+23"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_sig(x), want, "{x:e}");
        }
    }

    #[test]
    fn twelve_digits_round_trip() {
        for x in [
            0.123456789012345,
            7.77e-9,
            1234.5678901234,
            -2.5e30,
            std::f64::consts::PI,
        ] {
            let y: f64 = fmt_sig(x).parse().unwrap();
            assert!((x - y).abs() <= 5e-12 * x.abs(), "{x} -> {y}");
            assert_eq!(fmt_sig(y), fmt_sig(x));
        }
    }
}

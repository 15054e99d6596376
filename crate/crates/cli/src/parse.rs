use num_complex::Complex64;

use casimir_lab::Weight;

use crate::commands::CliError;

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

/// `a,k,m` with integer entries.
pub fn weight(s: &str) -> Result<Weight, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(usage(format!("expected weight 'a,k,m', got '{s}'")));
    }
    let mut v = [0i64; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| usage(format!("weight entry '{p}' is not an integer")))?;
    }
    Ok(Weight::new(v[0], v[1], v[2]))
}

fn float(s: &str, whole: &str) -> Result<f64, CliError> {
    s.parse().map_err(|_| usage(format!("cannot parse complex number '{whole}'")))
}

fn unit_or_float(s: &str, whole: &str) -> Result<f64, CliError> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => float(s, whole),
    }
}

/// Complex numbers written as `x`, `yi`, `x+yi` or `x-yi`.
pub fn complex(s: &str) -> Result<Complex64, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(float(&t, s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    match split {
        Some(p) => Ok(Complex64::new(float(&body[..p], s)?, unit_or_float(&body[p..], s)?)),
        None => Ok(Complex64::new(0.0, unit_or_float(body, s)?)),
    }
}

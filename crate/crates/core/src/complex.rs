//! Complex-number helpers: the `a+bi` text grammar used on the command line
//! and a few comparisons shared by the tests.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Parses `a`, `a+bi` or `a-bi` (`a`, `b` ordinary decimal floats, exponents allowed).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s = text.trim();
    let bad = || Error::InvalidInput(format!("not a complex number of the form a, a+bi or a-bi: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        let re: f64 = s.parse().map_err(|_| bad())?;
        return Ok(Complex64::new(re, 0.0));
    };
    // split at the last sign that is neither leading nor part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'))
        .ok_or_else(bad)?;
    let (re_part, im_part) = body.split_at(split);
    if im_part.len() < 2 {
        return Err(bad());
    }
    let re: f64 = re_part.parse().map_err(|_| bad())?;
    let im: f64 = im_part.parse().map_err(|_| bad())?;
    if !re.is_finite() || !im.is_finite() {
        return Err(bad());
    }
    Ok(Complex64::new(re, im))
}

/// Formats with 17 significant digits so that [`parse_complex`] recovers the value exactly.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{}{:.16e}i", z.re, sign, z.im.abs())
}

/// `|a - b| <= tol * max(1, |a|, |b|)`
pub fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * 1f64.max(a.norm()).max(b.norm())
}

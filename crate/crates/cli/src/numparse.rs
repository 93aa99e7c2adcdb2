//! Exact integer parsing for flags such as `--x 6e12`.

/// Parses a nonnegative integer written either in plain decimal or in
/// scientific notation (`6e12`, `1.5E3`). A mantissa whose fractional digits do
/// not vanish after scaling is rejected, as is anything that overflows `u128`.
pub fn parse_exact(s: &str) -> Result<u128, String> {
    let t = s.trim().replace('_', "");
    if t.is_empty() {
        return Err("empty number".into());
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: u32 = t[i + 1..]
                .strip_prefix('+')
                .unwrap_or(&t[i + 1..])
                .parse()
                .map_err(|_| format!("{s:?}: bad exponent"))?;
            (&t[..i], e)
        }
        None => (t.as_str(), 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("{s:?} is not a number"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(format!("{s:?} is not a nonnegative integer"));
    }
    let frac_len = frac_part.len() as u32;
    let digits = format!("{int_part}{frac_part}");
    let digits = digits.trim_start_matches('0');
    let value: u128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| format!("{s:?} is too large"))?
    };
    if exp >= frac_len {
        10u128
            .checked_pow(exp - frac_len)
            .and_then(|m| value.checked_mul(m))
            .ok_or_else(|| format!("{s:?} is too large"))
    } else {
        let div = 10u128.pow(frac_len - exp);
        if !value.is_multiple_of(div) {
            return Err(format!("{s:?} is not an integer"));
        }
        Ok(value / div)
    }
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    let v = parse_exact(s)?;
    u64::try_from(v).map_err(|_| format!("{s:?} does not fit in 64 bits"))
}

pub fn parse_usize(s: &str) -> Result<usize, String> {
    let v = parse_exact(s)?;
    usize::try_from(v).map_err(|_| format!("{s:?} is too large"))
}

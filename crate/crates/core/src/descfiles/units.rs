//! Unit strings. Only meters, hertz, seconds and decibels (with their usual
//! decimal prefixes) are interpreted; every other unit passes through as text.

/// Converts `value` expressed in `unit` to its SI base unit, returning the
/// converted value and the base unit. `None` for uninterpreted units.
pub fn to_si(value: f64, unit: &str) -> Option<(f64, &'static str)> {
    let (factor, base) = scale(unit.trim())?;
    Some((value * factor, base))
}

/// Multiplicative factor from `unit` to its base unit.
pub fn scale(unit: &str) -> Option<(f64, &'static str)> {
    Some(match unit {
        "Hz" => (1.0, "Hz"),
        "kHz" => (1e3, "Hz"),
        "MHz" => (1e6, "Hz"),
        "GHz" => (1e9, "Hz"),
        "THz" => (1e12, "Hz"),
        "s" => (1.0, "s"),
        "ms" => (1e-3, "s"),
        "us" | "µs" => (1e-6, "s"),
        "ns" => (1e-9, "s"),
        "ps" => (1e-12, "s"),
        "m" => (1.0, "m"),
        "km" => (1e3, "m"),
        "cm" => (1e-2, "m"),
        "mm" => (1e-3, "m"),
        "um" | "µm" => (1e-6, "m"),
        "dB" => (1.0, "dB"),
        _ => return None,
    })
}

/// Factor converting a length unit to meters.
pub fn length_to_meters(unit: &str) -> Option<f64> {
    match scale(unit.trim())? {
        (f, "m") => Some(f),
        _ => None,
    }
}

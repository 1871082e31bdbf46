//! Ket notation and display bases.

use qterm::linalg::{Vector, C64};
use qterm::Subspace;

/// Entries within this distance of a special value are printed symbolically.
const SYMBOL_TOL: f64 = 1e-9;

/// Entries below this magnitude are dropped from kets.
const ZERO_TOL: f64 = 1e-9;

/// The magnitude of a real number: `1`, `1/√2`, `1/√3`, `1/√6` or a decimal.
fn magnitude(x: f64) -> String {
    let specials = [
        (1.0, "1"),
        (std::f64::consts::FRAC_1_SQRT_2, "1/√2"),
        (1.0 / 3f64.sqrt(), "1/√3"),
        (1.0 / 6f64.sqrt(), "1/√6"),
    ];
    for (value, name) in specials {
        if (x - value).abs() <= SYMBOL_TOL {
            return name.to_string();
        }
    }
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// A real number with a symbolic annotation when one applies.
pub fn real(x: f64) -> String {
    if x.abs() <= SYMBOL_TOL {
        "0".into()
    } else if x < 0.0 {
        format!("-{}", magnitude(-x))
    } else {
        magnitude(x)
    }
}

/// Sign and body of a ket coefficient, with a unit coefficient left empty.
fn coefficient(z: C64) -> (bool, String) {
    let (re, im) = (z.re.abs() > ZERO_TOL, z.im.abs() > ZERO_TOL);
    match (re, im) {
        (true, false) => {
            let m = magnitude(z.re.abs());
            (z.re < 0.0, if m == "1" { String::new() } else { m })
        }
        (false, true) => {
            let m = magnitude(z.im.abs());
            (z.im < 0.0, if m == "1" { "i".into() } else { format!("{m}i") })
        }
        _ => {
            let sign = if z.im < 0.0 { "-" } else { "+" };
            (false, format!("({} {sign} {}i)", real(z.re), magnitude(z.im.abs())))
        }
    }
}

/// `1/√2|1> - 1/√2|3>` style rendering.
pub fn ket(v: &Vector) -> String {
    let mut out = String::new();
    for (i, &z) in v.iter().enumerate() {
        if z.norm() <= ZERO_TOL {
            continue;
        }
        let (negative, body) = coefficient(z);
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&body);
        out.push_str(&format!("|{i}>"));
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Multiplies by a phase so the first entry that is not negligible is real
/// and positive.
pub fn fix_phase(v: &Vector) -> Vector {
    match v.iter().find(|z| z.norm() > ZERO_TOL) {
        Some(&z) => v * (z.conj() / z.norm()),
        None => v.clone(),
    }
}

/// Real vectors are left alone; complex ones get their phase fixed.
pub fn tidy_phase(v: &Vector) -> Vector {
    if v.iter().all(|z| z.im.abs() <= ZERO_TOL) {
        v.clone()
    } else {
        fix_phase(v)
    }
}

/// A probability: exact zero as `0`, small values in scientific notation.
pub fn probability(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

/// Pretty JSON with innermost arrays of numbers kept on one line, so
/// complex entries read as `[re, im]`.
pub fn compact_json(pretty: &str) -> String {
    let mut out = String::with_capacity(pretty.len());
    let mut in_string = false;
    let mut escaped = false;
    let mut rest = pretty;
    while let Some(c) = rest.chars().next() {
        let width = c.len_utf8();
        if in_string {
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '"') => in_string = false,
                _ => {}
            }
        } else if c == '"' {
            in_string = true;
        } else if c == '[' {
            let inner = &rest[1..];
            if let Some(j) = inner.find(|c| matches!(c, '[' | ']' | '{' | '"')) {
                if inner.as_bytes()[j] == b']' {
                    let items: Vec<&str> = inner[..j].split(',').map(str::trim).collect();
                    out.push('[');
                    out.push_str(&items.join(", "));
                    out.push(']');
                    rest = &inner[j + 1..];
                    continue;
                }
            }
        }
        out.push(c);
        rest = &rest[width..];
    }
    out
}

/// A basis of `s` that depends only on the subspace: Gram-Schmidt over the
/// projections of the standard basis vectors, with phases fixed.
pub fn display_basis(s: &Subspace) -> Vec<Vector> {
    let p = s.projector();
    let d = s.ambient_dim();
    let mut out: Vec<Vector> = Vec::with_capacity(s.dim());
    for i in 0..d {
        if out.len() == s.dim() {
            break;
        }
        let mut v = p.column(i).into_owned();
        for _ in 0..2 {
            for b in &out {
                let overlap = b.dotc(&v);
                v -= b * overlap;
            }
        }
        let n = v.norm();
        // the projected columns have norm at least 1/sqrt(d) in aggregate,
        // so anything this small is a dependent direction
        if n > 1e-6 {
            out.push(fix_phase(&v.unscale(n)));
        }
    }
    out
}

/// `span{ a, b }`.
pub fn span(basis: &[Vector]) -> String {
    if basis.is_empty() {
        return "{0}".into();
    }
    let parts: Vec<String> = basis.iter().map(ket).collect();
    format!("span{{ {} }}", parts.join(", "))
}

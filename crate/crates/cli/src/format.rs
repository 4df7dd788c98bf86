//! Number and table formatting shared by the text and CSV writers.

/// `x` with `sig` significant digits, trailing zeros kept. Zero prints with
/// `sig` decimals so it lines up with values in `[0.1, 1)`. Magnitudes below
/// `1e-4` or at least `1e17` switch to scientific notation.
pub fn num(x: f64, sig: u8) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let sig = sig.max(1) as usize;
    if x == 0.0 {
        return format!("{:.*}", sig, 0.0);
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let exp: i32 = sci.rsplit_once('e').and_then(|(_, e)| e.parse().ok()).unwrap_or(0);
    if !(-4..17).contains(&exp) {
        return sci;
    }
    let decimals = (sig as i32 - 1 - exp).max(0) as usize;
    format!("{:.*}", decimals, x)
}

pub fn opt(x: Option<f64>, sig: u8) -> String {
    x.map(|v| num(v, sig)).unwrap_or_default()
}

/// Left-aligned columns separated by two spaces, no trailing blanks.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (i, cell) in cells.enumerate().take(cols) {
            if i + 1 < cols {
                s.push_str(&format!("{:<w$}  ", cell, w = width[i]));
            } else {
                s.push_str(cell);
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(&mut header.iter().copied());
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

/// `key  value` lines with the keys padded to a common width.
pub fn pairs(items: &[(&str, String)]) -> String {
    let w = items.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    items
        .iter()
        .map(|(k, v)| format!("{:<w$}  {}\n", k, v, w = w).trim_end().to_string() + "\n")
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(num(0.169833, 6), "0.169833");
        assert_eq!(num(0.1, 6), "0.100000");
        assert_eq!(num(0.5, 6), "0.500000");
        assert_eq!(num(0.2, 6), "0.200000");
        assert_eq!(num(0.0, 6), "0.000000");
        assert_eq!(num(-0.0, 6), "0.000000");
        assert_eq!(num(0.000240437, 6), "0.000240437");
        assert_eq!(num(12.5, 3), "12.5");
        assert_eq!(num(1234.0, 2), "1234");
        assert_eq!(num(0.09999999, 6), "0.100000");
        assert_eq!(num(-0.25, 2), "-0.25");
        assert_eq!(num(3e-9, 3), "3.00e-9");
    }

    #[test]
    fn table_aligns() {
        let t = table(&["a", "bb"], &[vec!["xxx".into(), "1".into()]]);
        assert_eq!(t, "a    bb\nxxx  1\n");
    }
}

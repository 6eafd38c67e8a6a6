use std::fmt::Write;

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Default)]
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        let mut c = Csv::default();
        c.buf.push_str(header);
        c.buf.push('\n');
        c
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.buf.push(',');
            }
            first = false;
            let _ = write!(self.buf, "{}", f.as_ref());
        }
        self.buf.push('\n');
    }

    pub fn into_string(self) -> String {
        self.buf
    }
}

use serde_json::{json, Value};
use simplex_angles::{GammaProduct, PiExpr};

/// How exact values are printed in text mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputMode {
    Exact,
    Decimal,
    Both,
}

#[derive(Clone, Copy, Debug)]
pub struct Style {
    pub mode: OutputMode,
    pub digits: usize,
}

impl Style {
    pub fn value(&self, x: &PiExpr) -> String {
        match self.mode {
            OutputMode::Exact => x.to_string(),
            OutputMode::Decimal => x.to_decimal(self.digits),
            OutputMode::Both => format!("{x} ~ {}", x.to_decimal(self.digits)),
        }
    }

    pub fn gamma(&self, g: &GammaProduct) -> String {
        match self.mode {
            OutputMode::Exact => g.to_string(),
            OutputMode::Decimal => g.to_decimal(self.digits),
            OutputMode::Both => format!("{g} ~ {}", g.to_decimal(self.digits)),
        }
    }

    /// `{"terms":…,"exact":"…","decimal":"…"}`; parses back with `PiExpr::from_json`.
    pub fn value_json(&self, x: &PiExpr) -> Value {
        let mut v = serde_json::to_value(x).expect("PiExpr serializes");
        v["exact"] = json!(x.to_string());
        v["decimal"] = json!(x.to_decimal(self.digits));
        v
    }

    pub fn gamma_json(&self, g: &GammaProduct) -> Value {
        let mut v = serde_json::to_value(g).expect("GammaProduct serializes");
        v["exact"] = json!(g.to_string());
        v["decimal"] = json!(g.to_decimal(self.digits));
        v
    }

    pub fn row(&self, row: &[PiExpr], first: usize) -> String {
        row.iter()
            .enumerate()
            .map(|(i, x)| format!("k={}: {}\n", i + first, self.value(x)))
            .collect()
    }

    pub fn row_json(&self, row: &[PiExpr]) -> Value {
        Value::Array(row.iter().map(|x| self.value_json(x)).collect())
    }
}

/// Fixed-format float so that identical runs print identical bytes.
pub fn float(x: f64) -> String {
    format!("{x:.15e}")
}

//! Output rendering: text, JSON, and CSV with a reproducible manifest.
//!
//! CSV uses '.' decimals, comma separators, a header row, 17 significant
//! digits, and a '#'-prefixed footer block. Footers never contain wall
//! times, so identical inputs produce byte-identical files.

use serde::Serialize;

/// Formats with 17 significant digits, stable across runs.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Units {
    Nats,
    Bits,
}

impl Units {
    pub fn convert(&self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
    Csv,
}

/// Reproducibility record attached to every run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub input_digest: String,
    pub ba_tolerance: f64,
    pub gate_tolerance: f64,
    pub equal_divergence_tolerance: f64,
    pub solver_path: String,
    pub wall_seconds: f64,
    pub seed: Option<u64>,
}

/// Per-stage wall time of the exact quantum solve, for the empirical
/// complexity comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CqStepSeconds {
    pub observable_basis: f64,
    pub natural_parameters: f64,
    pub log_partition: f64,
    pub weight_reconstruction: f64,
}

#[derive(Debug, Serialize)]
pub struct CapacityOutput {
    pub capacity: f64,
    pub units: String,
    pub capacity_nats: f64,
    pub capacity_bits: f64,
    pub optimal_input: Vec<f64>,
    pub input_labels: Option<Vec<String>>,
    pub solver_path: String,
    pub certified: bool,
    pub verification_gap: f64,
    pub gate_status: Option<String>,
    pub oracle_check: Option<f64>,
    pub oracle_delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cq_step_seconds: Option<CqStepSeconds>,
    pub manifest: RunManifest,
}

impl CapacityOutput {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "capacity: {} {}\n",
            sig17(self.capacity),
            self.units
        ));
        s.push_str(&format!("optimal input:"));
        for (i, v) in self.optimal_input.iter().enumerate() {
            let label = self
                .input_labels
                .as_ref()
                .map(|l| l[i].clone())
                .unwrap_or_else(|| format!("{}", i + 1));
            s.push_str(&format!(" {label}={v:.12}"));
        }
        s.push('\n');
        s.push_str(&format!("solver path: {}\n", self.solver_path));
        s.push_str(&format!(
            "certificate: {} (gap {:.3e})\n",
            if self.certified { "passed" } else { "NOT CERTIFIED" },
            self.verification_gap
        ));
        if let Some(ref g) = self.gate_status {
            s.push_str(&format!("gate: {g}\n"));
        }
        if let Some(check) = self.oracle_check {
            let delta = self.oracle_delta.unwrap_or(f64::NAN);
            s.push_str(&format!(
                "oracle check: {} {} (delta {:.3e})\n",
                sig17(self.units_value(check)),
                self.units,
                delta
            ));
        }
        s.push_str(&format!("wall time: {:.6}s\n", self.manifest.wall_seconds));
        s
    }

    fn units_value(&self, nats: f64) -> f64 {
        if self.units == "bits" {
            nats / std::f64::consts::LN_2
        } else {
            nats
        }
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable output")
    }

    pub fn render_csv(&self) -> String {
        let mut s = String::new();
        s.push_str("quantity,value\n");
        s.push_str(&format!("capacity_{},{}\n", self.units, sig17(self.capacity)));
        s.push_str(&format!("capacity_nats,{}\n", sig17(self.capacity_nats)));
        s.push_str(&format!("capacity_bits,{}\n", sig17(self.capacity_bits)));
        for (i, v) in self.optimal_input.iter().enumerate() {
            s.push_str(&format!("input_{},{}\n", i + 1, sig17(*v)));
        }
        if let Some(check) = self.oracle_check {
            s.push_str(&format!("oracle_check_nats,{}\n", sig17(check)));
        }
        s.push_str(&format!("# path {}\n", self.solver_path));
        s.push_str(&format!("# certified {}\n", self.certified));
        s.push_str(&format!("# input_digest {}\n", self.manifest.input_digest));
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.render_text(),
            OutputFormat::Json => self.render_json(),
            OutputFormat::Csv => self.render_csv(),
        }
    }
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_conversion() {
        let nats = std::f64::consts::LN_2;
        assert!((Units::Bits.convert(nats) - 1.0).abs() < 1e-15);
        assert_eq!(Units::Nats.convert(nats), nats);
    }

    #[test]
    fn sig17_is_stable() {
        assert_eq!(sig17(0.1), sig17(0.1));
        assert!(sig17(0.1).contains('e'));
    }

    #[test]
    fn digest_is_deterministic() {
        assert_eq!(digest_bytes(b"abc"), digest_bytes(b"abc"));
        assert_ne!(digest_bytes(b"abc"), digest_bytes(b"abd"));
    }
}

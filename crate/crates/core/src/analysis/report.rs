use std::io::Write;

use sha2::{Digest, Sha256};

use super::memory::{LogicalErrorEstimate, MemoryConfig};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 9] = ["eps_store", "eps_gate", "method", "trials", "failures", "p_hat", "ci_low", "ci_high", "seed"];

/// SHA-256 over the canonical `key=value` lines, hex encoded.
pub fn config_digest(entries: &[(String, String)]) -> String {
    let mut h = Sha256::new();
    for (k, v) in entries {
        h.update(k.as_bytes());
        h.update(b"=");
        h.update(v.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

/// One CSV row per estimate. `eps_gate` is the largest per-kind gate rate.
pub fn write_csv<W: Write>(w: W, rows: &[(MemoryConfig, LogicalErrorEstimate)]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let err = |e: csv::Error| Error::Io(e.to_string());
    out.write_record(CSV_HEADER).map_err(err)?;
    for (cfg, est) in rows {
        let eps_gate = cfg.noise.eps_gate.values().copied().fold(0.0, f64::max);
        out.write_record([
            cfg.noise.eps_store.to_string(),
            eps_gate.to_string(),
            cfg.protocol.to_string(),
            est.trials.to_string(),
            est.failures.to_string(),
            est.p_hat.to_string(),
            est.ci_low.to_string(),
            est.ci_high.to_string(),
            est.seed.to_string(),
        ])
        .map_err(err)?;
    }
    out.flush()?;
    Ok(())
}

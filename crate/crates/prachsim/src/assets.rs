//! Bundled data assets: logical-to-physical root mapping, unrestricted-set
//! N_CS table and the ETU delay profile.
//!
//! The tables ship as CSV files under `data/`, embedded at compile time. Each
//! asset is integrity-checked against a recorded SHA-256 before first use
//! (the same digests are listed in `data/MANIFEST.sha256`), then parsed once
//! and cached.

use std::sync::OnceLock;

use sha2::{Digest, Sha256};

use crate::error::{Result, SimError};

const ROOT_MAPPING_CSV: &str = include_str!("../data/root_mapping_format0.csv");
const NCS_TABLE_CSV: &str = include_str!("../data/ncs_unrestricted.csv");
const ETU_PROFILE_CSV: &str = include_str!("../data/etu_profile.csv");

const ROOT_MAPPING_SHA256: &str =
    "3a1dc5a56aa778d60abe4e05055c490ef201620ad167402986031aeea49e0d85";
const NCS_TABLE_SHA256: &str = "7dda49e332ddae1ac7c1c52edc65984a073f5cd81f21e3d3dae1349589f2bb0f";
const ETU_PROFILE_SHA256: &str = "aa7d9e96a08a6361acafb99a576348b34632e70f27e58e338ae3f49ffd53d16c";

fn sha256_hex(data: &str) -> String {
    let digest = Sha256::digest(data.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn check_digest(name: &str, content: &str, expected: &str) -> Result<()> {
    let actual = sha256_hex(content);
    if actual != expected {
        return Err(SimError::Internal(format!(
            "data asset {name} failed its checksum: expected {expected}, got {actual}"
        )));
    }
    Ok(())
}

fn parse_rows(name: &str, content: &str, header: &str) -> Result<Vec<(String, String)>> {
    let mut lines = content.lines();
    match lines.next() {
        Some(h) if h == header => {}
        other => {
            return Err(SimError::Internal(format!(
                "data asset {name}: bad header {other:?}"
            )))
        }
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let mut cols = line.splitn(2, ',');
            match (cols.next(), cols.next()) {
                (Some(a), Some(b)) => Ok((a.to_string(), b.to_string())),
                _ => Err(SimError::Internal(format!(
                    "data asset {name}: malformed row {line:?}"
                ))),
            }
        })
        .collect()
}

fn load_root_mapping() -> Result<Vec<u32>> {
    check_digest("root_mapping_format0.csv", ROOT_MAPPING_CSV, ROOT_MAPPING_SHA256)?;
    let rows = parse_rows(
        "root_mapping_format0.csv",
        ROOT_MAPPING_CSV,
        "logical_index,physical_u",
    )?;
    if rows.len() != 838 {
        return Err(SimError::Internal(format!(
            "root mapping must have 838 rows, found {}",
            rows.len()
        )));
    }
    let mut mapping = Vec::with_capacity(838);
    for (idx, (logical, physical)) in rows.iter().enumerate() {
        let logical: usize = logical
            .parse()
            .map_err(|_| SimError::Internal(format!("bad logical index {logical:?}")))?;
        let physical: u32 = physical
            .parse()
            .map_err(|_| SimError::Internal(format!("bad physical root {physical:?}")))?;
        if logical != idx {
            return Err(SimError::Internal(format!(
                "root mapping rows out of order at {idx}"
            )));
        }
        if physical == 0 || physical > 838 {
            return Err(SimError::Internal(format!(
                "physical root {physical} out of range"
            )));
        }
        mapping.push(physical);
    }
    Ok(mapping)
}

fn load_ncs_table() -> Result<Vec<u32>> {
    check_digest("ncs_unrestricted.csv", NCS_TABLE_CSV, NCS_TABLE_SHA256)?;
    let rows = parse_rows("ncs_unrestricted.csv", NCS_TABLE_CSV, "cyclic_shift_idx,n_cs")?;
    if rows.len() != 16 {
        return Err(SimError::Internal(format!(
            "N_CS table must have 16 rows, found {}",
            rows.len()
        )));
    }
    let mut table = Vec::with_capacity(16);
    for (idx, (cs_idx, n_cs)) in rows.iter().enumerate() {
        let cs_idx: usize = cs_idx
            .parse()
            .map_err(|_| SimError::Internal(format!("bad cyclic shift index {cs_idx:?}")))?;
        if cs_idx != idx {
            return Err(SimError::Internal("N_CS rows out of order".into()));
        }
        table.push(
            n_cs.parse()
                .map_err(|_| SimError::Internal(format!("bad N_CS value {n_cs:?}")))?,
        );
    }
    Ok(table)
}

fn load_etu_profile() -> Result<(Vec<f64>, Vec<f64>)> {
    check_digest("etu_profile.csv", ETU_PROFILE_CSV, ETU_PROFILE_SHA256)?;
    let rows = parse_rows("etu_profile.csv", ETU_PROFILE_CSV, "delay_ns,power_db")?;
    let mut delays = Vec::with_capacity(rows.len());
    let mut powers = Vec::with_capacity(rows.len());
    for (delay, power) in rows {
        delays.push(
            delay
                .parse()
                .map_err(|_| SimError::Internal(format!("bad tap delay {delay:?}")))?,
        );
        powers.push(
            power
                .parse()
                .map_err(|_| SimError::Internal(format!("bad tap power {power:?}")))?,
        );
    }
    Ok((delays, powers))
}

/// Logical-to-physical root mapping for the 839-length preamble formats.
/// Index with the logical root sequence index (0..=837).
pub fn root_mapping() -> &'static [u32] {
    static MAPPING: OnceLock<Vec<u32>> = OnceLock::new();
    MAPPING.get_or_init(|| load_root_mapping().expect("bundled root mapping asset is valid"))
}

/// Unrestricted-set N_CS values, indexed by the cyclic shift index (0..=15).
pub fn ncs_table() -> &'static [u32] {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    TABLE.get_or_init(|| load_ncs_table().expect("bundled N_CS asset is valid"))
}

/// ETU tap delays (ns) and powers (dB).
pub fn etu_taps() -> &'static (Vec<f64>, Vec<f64>) {
    static TAPS: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    TAPS.get_or_init(|| load_etu_profile().expect("bundled ETU asset is valid"))
}

/// Re-checks every bundled asset, returning the first failure. Used by the
/// CLI self-test so a corrupted build fails loudly rather than mid-sweep.
pub fn verify_data_assets() -> Result<()> {
    load_root_mapping()?;
    load_ncs_table()?;
    load_etu_profile()?;
    Ok(())
}

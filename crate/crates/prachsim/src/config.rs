//! Configuration ingestion: a namespaced TOML document covering the UE,
//! PRACH, channel, detector, sweep and interference settings. An empty
//! document yields the full default evaluation setup (6 UL RBs, FDD, normal
//! CP, 1 TX antenna, format 0, target root 22 / preamble 32 / cyclic shift
//! index 1, 2 RX antennas, ETU at 70 Hz with 16 oscillators and normalized
//! gains, low antenna correlation, seed 1).
//!
//! Unknown keys anywhere in the document are rejected.

use serde::Deserialize;

use crate::channel::{ChannelProfile, FadingModel, MimoCorrelation};
use crate::error::{Result, SimError};
use crate::harness::SweepSpec;
use crate::interference::{make_baseline, make_inter_cell, make_intra_cell, Scenario};
use crate::receiver::{max_search_window, DetectorConfig};
use crate::waveform::derive_geometry;
use crate::zc::{ncs_from_config, PreambleIdentity};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UeConfig {
    pub n_ulrb: u32,
    pub duplex_mode: String,
    pub cyclic_prefix_ul: String,
    pub n_tx_ants: u32,
}

impl Default for UeConfig {
    fn default() -> Self {
        Self {
            n_ulrb: 6,
            duplex_mode: "FDD".into(),
            cyclic_prefix_ul: "Normal".into(),
            n_tx_ants: 1,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PrachConfig {
    pub format: u32,
    pub root_sequence_index: u32,
    pub cyclic_shift_idx: u32,
    pub high_speed: bool,
    pub freq_offset: u32,
    pub preamble_index: u32,
}

impl Default for PrachConfig {
    fn default() -> Self {
        Self {
            format: 0,
            root_sequence_index: 22,
            cyclic_shift_idx: 1,
            high_speed: false,
            freq_offset: 0,
            preamble_index: 32,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub n_rx_ants: usize,
    pub delay_profile: String,
    pub doppler_hz: f64,
    pub mimo_correlation: String,
    pub seed: u64,
    pub n_terms: usize,
    pub model_type: String,
    pub init_phase: String,
    pub normalize_path_gains: bool,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            n_rx_ants: 2,
            delay_profile: "ETU".into(),
            doppler_hz: 70.0,
            mimo_correlation: "Low".into(),
            seed: 1,
            n_terms: 16,
            model_type: "GMEDS".into(),
            init_phase: "Random".into(),
            normalize_path_gains: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorTomlConfig {
    pub n_ca: Option<usize>,
    pub n_nca: Option<usize>,
    pub p_fa_target: Option<f64>,
    pub search_window_samples: Option<usize>,
    pub ta_tolerance_s: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub snr_db: Vec<f64>,
    pub n_subframes: u64,
    pub master_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            snr_db: vec![-30.0, -28.0, -26.0, -24.0, -22.0, -20.0, -18.0, -16.0, -14.0, -12.0],
            n_subframes: 1000,
            master_seed: 1,
        }
    }
}

/// A scalar or a list, for the interferer SNR axis.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![*x],
            OneOrMany::Many(xs) => xs.clone(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterferenceConfig {
    /// "none", "intra_cell" or "inter_cell".
    pub kind: String,
    /// Interferer SNR level(s); one CDR curve per level.
    pub snr_db: OneOrMany,
    /// Intra-cell: interfering preamble indices (one UE each).
    pub preamble_indices: Vec<u32>,
    /// Inter-cell: interfering logical root indices (one UE each).
    pub root_sequence_indices: Vec<u32>,
    /// Inter-cell: the preamble index the interfering cell's UE transmits.
    pub preamble_index: u32,
    pub timing_offset_samples: f64,
}

impl Default for InterferenceConfig {
    fn default() -> Self {
        Self {
            kind: "intra_cell".into(),
            snr_db: OneOrMany::One(-17.0),
            preamble_indices: vec![0],
            root_sequence_indices: vec![0],
            preamble_index: 3,
            timing_offset_samples: 0.0,
        }
    }
}

/// Full parsed configuration document.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub ue: UeConfig,
    pub prach: PrachConfig,
    pub channel: ChannelConfig,
    pub detector: DetectorTomlConfig,
    pub sweep: SweepConfig,
    pub interference: InterferenceConfig,
}

/// Parses a configuration document (TOML). Empty input yields the defaults.
pub fn parse_config(text: &str) -> Result<SweepSpec> {
    let config: SimConfig =
        toml::from_str(text).map_err(|e| SimError::Config(format!("config parse: {e}")))?;
    config.build()
}

impl SimConfig {
    /// Validates every field and assembles the sweep specification.
    pub fn build(&self) -> Result<SweepSpec> {
        if self.ue.duplex_mode != "FDD" {
            return Err(SimError::Config(format!(
                "ue.duplex_mode: only \"FDD\" is supported, got {:?}",
                self.ue.duplex_mode
            )));
        }
        if self.ue.cyclic_prefix_ul != "Normal" {
            return Err(SimError::Config(format!(
                "ue.cyclic_prefix_ul: only \"Normal\" is supported, got {:?}",
                self.ue.cyclic_prefix_ul
            )));
        }
        if self.ue.n_tx_ants != 1 {
            return Err(SimError::Config(format!(
                "ue.n_tx_ants: only 1 is supported, got {}",
                self.ue.n_tx_ants
            )));
        }
        if self.prach.high_speed {
            return Err(SimError::Unsupported(
                "prach.high_speed: restricted sets are not supported".into(),
            ));
        }

        let geometry = derive_geometry(self.ue.n_ulrb, self.prach.format)?
            .with_freq_offset(self.prach.freq_offset)?;

        let identity = PreambleIdentity::new(
            self.prach.root_sequence_index,
            self.prach.preamble_index,
            self.prach.cyclic_shift_idx,
        )
        .map_err(|e| SimError::Config(format!("prach: {e}")))?;

        let channel = self.channel_profile()?;
        let detector = self.detector_config()?;

        let interferer_snr_db = self.interference.snr_db.to_vec();
        let scenario = self.scenario(identity, geometry, detector, channel)?;

        if self.sweep.snr_db.is_empty() {
            return Err(SimError::Config("sweep.snr_db: grid must be non-empty".into()));
        }
        for pair in self.sweep.snr_db.windows(2) {
            if pair[1] <= pair[0] {
                return Err(SimError::Config(
                    "sweep.snr_db: grid must be strictly increasing".into(),
                ));
            }
        }
        if self.sweep.n_subframes == 0 {
            return Err(SimError::Config("sweep.n_subframes: must be at least 1".into()));
        }

        Ok(SweepSpec {
            snr_db_grid: self.sweep.snr_db.clone(),
            interferer_snr_db,
            n_subframes: self.sweep.n_subframes,
            master_seed: self.sweep.master_seed,
            scenario,
        })
    }

    fn channel_profile(&self) -> Result<ChannelProfile> {
        let c = &self.channel;
        if c.mimo_correlation != "Low" {
            return Err(SimError::Config(format!(
                "channel.mimo_correlation: only \"Low\" is supported, got {:?}",
                c.mimo_correlation
            )));
        }
        if c.init_phase != "Random" {
            return Err(SimError::Config(format!(
                "channel.init_phase: only \"Random\" is supported, got {:?}",
                c.init_phase
            )));
        }
        let model = match c.model_type.as_str() {
            "GMEDS" => FadingModel::GmedsRayleigh,
            "Ideal" => FadingModel::Ideal,
            other => {
                return Err(SimError::Config(format!(
                    "channel.model_type: expected \"GMEDS\" or \"Ideal\", got {other:?}"
                )))
            }
        };
        let (tap_delays_ns, tap_powers_db) = match c.delay_profile.as_str() {
            "ETU" => crate::channel::etu_profile(),
            "Ideal" => (vec![0.0], vec![0.0]),
            other => {
                return Err(SimError::Config(format!(
                    "channel.delay_profile: expected \"ETU\" or \"Ideal\", got {other:?}"
                )))
            }
        };
        // a single-tap "Ideal" delay profile under GMEDS still fades (flat
        // Rayleigh); model_type "Ideal" is what disables fading entirely
        let profile = ChannelProfile {
            n_rx_ants: c.n_rx_ants,
            tap_delays_ns,
            tap_powers_db,
            doppler_hz: c.doppler_hz,
            n_terms: c.n_terms,
            mimo_correlation: MimoCorrelation::Low,
            model,
            normalize_path_gains: c.normalize_path_gains,
            seed: c.seed,
        };
        profile
            .validate()
            .map_err(|e| SimError::Config(format!("channel: {e}")))?;
        Ok(profile)
    }

    fn detector_config(&self) -> Result<DetectorConfig> {
        let n_cs = ncs_from_config(self.prach.cyclic_shift_idx, self.prach.high_speed)?;
        let mut cfg = DetectorConfig::for_ncs(n_cs);
        let d = &self.detector;
        if let Some(n_ca) = d.n_ca {
            cfg.n_ca = n_ca;
            cfg.search_window_samples = max_search_window(n_cs, n_ca);
        }
        if let Some(n_nca) = d.n_nca {
            cfg.n_nca = n_nca;
        }
        if let Some(p) = d.p_fa_target {
            cfg.p_fa_target = p;
        }
        if let Some(w) = d.search_window_samples {
            cfg.search_window_samples = w;
        }
        if let Some(t) = d.ta_tolerance_s {
            cfg.ta_tolerance_s = t;
        }
        cfg.validate(n_cs)
            .map_err(|e| SimError::Config(format!("detector: {e}")))?;
        Ok(cfg)
    }

    fn scenario(
        &self,
        identity: PreambleIdentity,
        geometry: crate::waveform::FrameGeometry,
        detector: DetectorConfig,
        channel: ChannelProfile,
    ) -> Result<Scenario> {
        let i = &self.interference;
        let mut scenario = match i.kind.as_str() {
            "none" => make_baseline(identity, geometry, detector, channel)?,
            "intra_cell" => make_intra_cell(
                identity,
                &i.preamble_indices,
                f64::NEG_INFINITY, // per-curve level applied by the sweep
                geometry,
                detector,
                channel,
            )
            .map_err(|e| SimError::Config(format!("interference: {e}")))?,
            "inter_cell" => make_inter_cell(
                identity,
                &i.root_sequence_indices,
                i.preamble_index,
                f64::NEG_INFINITY,
                geometry,
                detector,
                channel,
            )
            .map_err(|e| SimError::Config(format!("interference: {e}")))?,
            other => {
                return Err(SimError::Config(format!(
                    "interference.kind: expected \"none\", \"intra_cell\" or \"inter_cell\", got {other:?}"
                )))
            }
        };
        for ue in &mut scenario.interferers {
            ue.timing_offset_samples = i.timing_offset_samples;
        }
        Ok(scenario)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interference::ScenarioKind;

    #[test]
    fn empty_document_is_the_paper_default() {
        let spec = parse_config("").unwrap();
        assert_eq!(spec.n_subframes, 1000);
        assert_eq!(spec.master_seed, 1);
        let s = &spec.scenario;
        assert_eq!(s.kind, ScenarioKind::IntraCell);
        assert_eq!(s.target.identity.logical_root_index, 22);
        assert_eq!(s.target.identity.preamble_index, 32);
        assert_eq!(s.target.identity.cyclic_shift_idx, 1);
        assert_eq!(s.target.channel.n_rx_ants, 2);
        assert_eq!(s.target.channel.doppler_hz, 70.0);
        assert_eq!(s.target.channel.n_terms, 16);
        assert_eq!(s.target.channel.tap_delays_ns.len(), 9);
        assert!(s.target.channel.normalize_path_gains);
        assert_eq!(s.detector.n_ca, 1024);
        assert_eq!(s.detector.search_window_samples, 15);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_config("[prach]\nbogus_key = 3\n").is_err());
        assert!(parse_config("[nonsense]\nx = 1\n").is_err());
    }

    #[test]
    fn out_of_range_preamble_rejected() {
        let err = parse_config("[prach]\npreamble_index = 64\n").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("preamble"), "{msg}");
    }

    #[test]
    fn etu_profile_loaded_by_name() {
        let spec = parse_config("[channel]\ndelay_profile = \"ETU\"\n").unwrap();
        assert_eq!(spec.scenario.target.channel.tap_delays_ns.len(), 9);
    }

    #[test]
    fn inter_cell_kind_builds() {
        let text = r#"
[interference]
kind = "inter_cell"
root_sequence_indices = [0, 4]
preamble_index = 3
snr_db = [-24.0, -9.0]
"#;
        let spec = parse_config(text).unwrap();
        assert_eq!(spec.scenario.kind, ScenarioKind::InterCell);
        assert_eq!(spec.scenario.interferers.len(), 2);
        assert_eq!(spec.interferer_snr_db, vec![-24.0, -9.0]);
    }

    #[test]
    fn scalar_interferer_snr_accepted() {
        let spec = parse_config("[interference]\nsnr_db = -20.0\n").unwrap();
        assert_eq!(spec.interferer_snr_db, vec![-20.0]);
    }

    #[test]
    fn non_increasing_grid_rejected() {
        assert!(parse_config("[sweep]\nsnr_db = [-20.0, -20.0]\n").is_err());
    }

    #[test]
    fn unsupported_modes_rejected() {
        assert!(parse_config("[ue]\nduplex_mode = \"TDD\"\n").is_err());
        assert!(parse_config("[prach]\nhigh_speed = true\n").is_err());
        assert!(parse_config("[channel]\nmimo_correlation = \"High\"\n").is_err());
        assert!(parse_config("[prach]\nformat = 1\n").is_err());
    }
}

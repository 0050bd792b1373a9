//! Interference scenarios: one target UE plus interfering UEs that are
//! intra-cell (same logical root, different preamble index) or inter-cell
//! (different logical root, possibly the same preamble index).
//!
//! A scenario owns the pre-synthesized unit-amplitude waveform of every UE;
//! per trial, each UE passes through its own independently seeded channel,
//! the contributions are mixed at their configured SNRs and unit-variance
//! noise is added. Interferers are time-aligned at the subframe boundary by
//! default; per-UE timing offsets are configurable.

use crate::channel::{apply_channel, mix_and_add_noise, ChannelProfile, RxSubframe};
use crate::error::{Result, SimError};
use crate::receiver::{Detector, DetectorConfig};
use crate::seeding;
use crate::waveform::{synthesize_preamble, FrameGeometry, PreambleWaveform};
use crate::zc::PreambleIdentity;

/// Whether a UE is the detection target or an interference source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UeRole {
    Target,
    Interferer,
}

/// One UE in a scenario.
#[derive(Debug, Clone)]
pub struct UeDescriptor {
    pub role: UeRole,
    pub identity: PreambleIdentity,
    /// Per-subframe SNR for interferers; the target's SNR is the sweep axis.
    pub snr_db: f64,
    pub timing_offset_samples: f64,
    pub channel: ChannelProfile,
}

/// Scenario kind, used for reporting and invariant checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    None,
    IntraCell,
    InterCell,
    Mixed,
}

impl ScenarioKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioKind::None => "none",
            ScenarioKind::IntraCell => "intra_cell",
            ScenarioKind::InterCell => "inter_cell",
            ScenarioKind::Mixed => "mixed",
        }
    }
}

/// A full interference scenario: target, interferers, geometry and detector
/// configuration. Construction validates the root-index relations that
/// define intra- vs inter-cell interference.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub target: UeDescriptor,
    pub interferers: Vec<UeDescriptor>,
    pub geometry: FrameGeometry,
    pub detector: DetectorConfig,
    pub kind: ScenarioKind,
}

/// Ground truth attached to each synthesized subframe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundTruth {
    pub preamble_index: u32,
    pub ta_true_s: f64,
}

/// Pre-rendered scenario ready for Monte-Carlo trials: unit-amplitude
/// waveforms synthesized once, detector built once.
#[derive(Debug, Clone)]
pub struct PreparedScenario {
    pub scenario: Scenario,
    pub target_waveform: PreambleWaveform,
    pub interferer_waveforms: Vec<PreambleWaveform>,
    pub detector: Detector,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.target.role != UeRole::Target {
            return Err(SimError::Config("scenario target must have the target role".into()));
        }
        for ue in &self.interferers {
            if ue.role != UeRole::Interferer {
                return Err(SimError::Config(
                    "scenario interferer list contains a non-interferer".into(),
                ));
            }
            match self.kind {
                ScenarioKind::IntraCell => {
                    if ue.identity.logical_root_index != self.target.identity.logical_root_index {
                        return Err(SimError::Config(
                            "intra-cell interferer must share the target's logical root".into(),
                        ));
                    }
                    if ue.identity.preamble_index == self.target.identity.preamble_index {
                        return Err(SimError::Config(
                            "intra-cell interferer must differ in preamble index".into(),
                        ));
                    }
                }
                ScenarioKind::InterCell => {
                    if ue.identity.logical_root_index == self.target.identity.logical_root_index {
                        return Err(SimError::Config(
                            "inter-cell interferer must use a different logical root".into(),
                        ));
                    }
                }
                ScenarioKind::Mixed | ScenarioKind::None => {}
            }
        }
        if self.kind == ScenarioKind::None && !self.interferers.is_empty() {
            return Err(SimError::Config(
                "interference-free scenario cannot carry interferers".into(),
            ));
        }
        Ok(())
    }

    /// Synthesizes all waveforms and builds the detector.
    pub fn prepare(&self) -> Result<PreparedScenario> {
        self.validate()?;
        let target_waveform = synthesize_preamble(&self.target.identity, &self.geometry, 1.0)?;
        let interferer_waveforms = self
            .interferers
            .iter()
            .map(|ue| synthesize_preamble(&ue.identity, &self.geometry, 1.0))
            .collect::<Result<Vec<_>>>()?;
        let detector = Detector::new(
            self.geometry,
            self.target.identity.logical_root_index,
            self.target.identity.cyclic_shift_idx,
            self.detector,
        )?;
        Ok(PreparedScenario {
            scenario: self.clone(),
            target_waveform,
            interferer_waveforms,
            detector,
        })
    }
}

/// Builds the intra-cell scenario: interferers share the target's PRACH
/// configuration except for the preamble index.
pub fn make_intra_cell(
    target_identity: PreambleIdentity,
    interferer_preamble_indices: &[u32],
    snr_db_interferer: f64,
    geometry: FrameGeometry,
    detector: DetectorConfig,
    channel: ChannelProfile,
) -> Result<Scenario> {
    let interferers = interferer_preamble_indices
        .iter()
        .map(|&idx| {
            if idx == target_identity.preamble_index {
                return Err(SimError::Config(format!(
                    "interferer preamble index {idx} collides with the target"
                )));
            }
            Ok(UeDescriptor {
                role: UeRole::Interferer,
                identity: PreambleIdentity::new(
                    target_identity.logical_root_index,
                    idx,
                    target_identity.cyclic_shift_idx,
                )?,
                snr_db: snr_db_interferer,
                timing_offset_samples: 0.0,
                channel: channel.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let scenario = Scenario {
        target: UeDescriptor {
            role: UeRole::Target,
            identity: target_identity,
            snr_db: 0.0,
            timing_offset_samples: 0.0,
            channel,
        },
        interferers,
        geometry,
        detector,
        kind: ScenarioKind::IntraCell,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Builds the inter-cell scenario: interferers keep the target's PRACH
/// configuration but use a different logical root (a neighboring cell) and
/// may reuse any preamble index.
pub fn make_inter_cell(
    target_identity: PreambleIdentity,
    interferer_logical_roots: &[u32],
    interferer_preamble_index: u32,
    snr_db_interferer: f64,
    geometry: FrameGeometry,
    detector: DetectorConfig,
    channel: ChannelProfile,
) -> Result<Scenario> {
    let interferers = interferer_logical_roots
        .iter()
        .map(|&root| {
            if root == target_identity.logical_root_index {
                return Err(SimError::Config(format!(
                    "interferer logical root {root} is the target's own cell"
                )));
            }
            Ok(UeDescriptor {
                role: UeRole::Interferer,
                identity: PreambleIdentity::new(
                    root,
                    interferer_preamble_index,
                    target_identity.cyclic_shift_idx,
                )?,
                snr_db: snr_db_interferer,
                timing_offset_samples: 0.0,
                channel: channel.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let scenario = Scenario {
        target: UeDescriptor {
            role: UeRole::Target,
            identity: target_identity,
            snr_db: 0.0,
            timing_offset_samples: 0.0,
            channel,
        },
        interferers,
        geometry,
        detector,
        kind: ScenarioKind::InterCell,
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Interference-free baseline scenario.
pub fn make_baseline(
    target_identity: PreambleIdentity,
    geometry: FrameGeometry,
    detector: DetectorConfig,
    channel: ChannelProfile,
) -> Result<Scenario> {
    let scenario = Scenario {
        target: UeDescriptor {
            role: UeRole::Target,
            identity: target_identity,
            snr_db: 0.0,
            timing_offset_samples: 0.0,
            channel,
        },
        interferers: Vec::new(),
        geometry,
        detector,
        kind: ScenarioKind::None,
    };
    scenario.validate()?;
    Ok(scenario)
}

impl PreparedScenario {
    /// Synthesizes one received subframe: every UE's waveform through its own
    /// channel (seeded by master seed, SNR point, trial and UE id), mixed at
    /// its SNR, plus unit-variance noise. Returns the ground truth for
    /// scoring.
    ///
    /// The channel and noise streams do not depend on any interferer's SNR,
    /// so sweeps at different interference levels with the same seeds are
    /// paired sample-by-sample.
    pub fn synthesize_subframe(
        &self,
        target_snr_db: f64,
        trial_index: u64,
        master_seed: u64,
    ) -> Result<(RxSubframe, GroundTruth)> {
        let snr_key = seeding::f64_key(target_snr_db);
        let mut contributions = Vec::with_capacity(1 + self.interferer_waveforms.len());

        let target = &self.scenario.target;
        let target_seed = seeding::mix_words(&[master_seed, snr_key, trial_index, 0]);
        let target_rx = apply_channel(
            &self.target_waveform,
            &target.channel,
            target.timing_offset_samples,
            target_seed,
        )?;
        contributions.push((target_rx, target_snr_db));

        for (i, (ue, wf)) in self
            .scenario
            .interferers
            .iter()
            .zip(&self.interferer_waveforms)
            .enumerate()
        {
            if ue.snr_db == f64::NEG_INFINITY {
                continue; // zero-power interferer contributes nothing
            }
            let ue_seed = seeding::mix_words(&[master_seed, snr_key, trial_index, 1 + i as u64]);
            let rx = apply_channel(wf, &ue.channel, ue.timing_offset_samples, ue_seed)?;
            contributions.push((rx, ue.snr_db));
        }

        let noise_seed = seeding::mix_words(&[master_seed, snr_key, trial_index, u64::MAX]);
        let rx = mix_and_add_noise(
            &contributions,
            target.channel.n_rx_ants,
            &self.scenario.geometry,
            noise_seed,
        )?;
        Ok((
            rx,
            GroundTruth {
                preamble_index: target.identity.preamble_index,
                ta_true_s: target.timing_offset_samples / self.scenario.geometry.sample_rate,
            },
        ))
    }
}

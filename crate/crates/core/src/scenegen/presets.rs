use super::{RegimeKind, RegimeScript, Segment};
use crate::error::{AolError, Result};

pub const PRESET_NAMES: [&str; 4] = [
    "stationary",
    "rapid_switch",
    "regime_revisit",
    "heading_mix",
];

const REVISIT_SEGMENT: usize = 50;
const SWITCH_PERIOD: usize = 10;

/// Stable and abrupt camera segments alternating every ten samples.
pub fn rapid_switch(total_samples: usize) -> RegimeScript {
    let segments = (0..total_samples.div_ceil(SWITCH_PERIOD))
        .map(|i| {
            let kind = if i % 2 == 0 {
                RegimeKind::Stable
            } else {
                RegimeKind::Abrupt
            };
            let n = SWITCH_PERIOD.min(total_samples - i * SWITCH_PERIOD);
            Segment::new(kind, n)
        })
        .collect();
    RegimeScript::with_segments(segments)
}

fn regime_revisit() -> RegimeScript {
    use RegimeKind::*;
    RegimeScript::with_segments(
        [Stable, Abrupt, Cross, Stable, Abrupt, Cross]
            .into_iter()
            .map(|k| Segment::new(k, REVISIT_SEGMENT))
            .collect(),
    )
}

fn heading_mix() -> RegimeScript {
    use RegimeKind::*;
    RegimeScript::with_segments(
        [Toward, Away, Toward, Away]
            .into_iter()
            .map(|k| Segment::new(k, REVISIT_SEGMENT))
            .collect(),
    )
}

/// The named script catalog, all with seed 0.
pub fn script_presets() -> Vec<(&'static str, RegimeScript)> {
    PRESET_NAMES
        .iter()
        .map(|&name| (name, preset(name).expect("catalog names are valid")))
        .collect()
}

pub fn preset(name: &str) -> Result<RegimeScript> {
    match name {
        "stationary" => Ok(RegimeScript::with_segments(vec![Segment::new(
            RegimeKind::Stable,
            200,
        )])),
        "rapid_switch" => Ok(rapid_switch(200)),
        "regime_revisit" => Ok(regime_revisit()),
        "heading_mix" => Ok(heading_mix()),
        other => Err(AolError::config(format!(
            "unknown preset `{other}` (expected one of {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

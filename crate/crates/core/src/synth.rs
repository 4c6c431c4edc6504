//! Synthetic lamppost fleet: node profiles, per-type frame generation,
//! node-type CSV ingestion and deterministic train/test splits.
//!
//! Frames are rendered, never captured: each node type encodes a different
//! difficulty for the ON/OFF classification task. Type 0 nodes show a bright
//! lamp disc, type 1 nodes only a diffuse luminance glow, and type 2 nodes a
//! heavily attenuated glow behind random occlusions. Labels always equal the
//! schedule-expected state; difficulty lives in the pixels.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::imaging::ImageBuffer;
use crate::rng::{self, salt};

/// Minutes in a day; timestamps live in `[0, 1440)`.
pub const MINUTES_PER_DAY: u16 = 1440;
/// The lamp is expected ON from 15 minutes before sunset until 15 minutes
/// after sunrise, boundaries included.
pub const NIGHT_MARGIN_MINUTES: u16 = 15;

/// Defaults filled in for rows of a node-type CSV.
pub const DEFAULT_SAMPLES_PER_NODE: usize = 200;
pub const DEFAULT_SUNRISE_MINUTE: u16 = 360;
pub const DEFAULT_SUNSET_MINUTE: u16 = 1080;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot read {path}: {source}")]
    FileRead { path: String, source: std::io::Error },
    #[error("line {line}: expected header \"node_id,node_type\", got {found:?}")]
    BadHeader { line: usize, found: String },
    #[error("line {line}: malformed row {found:?}: {reason}")]
    MalformedRow { line: usize, found: String, reason: String },
    #[error("line {line}: node_type {found} is not one of 0, 1, 2")]
    BadNodeType { line: usize, found: String },
    #[error("line {line}: duplicate node_id {node_id}")]
    DuplicateNodeId { line: usize, node_id: u32 },
    #[error("duplicate node_id {node_id} in profile list")]
    DuplicateProfile { node_id: u32 },
    #[error("node {node_id}: sunrise minute {sunrise} must precede sunset minute {sunset}")]
    BadSchedule { node_id: u32, sunrise: u16, sunset: u16 },
    #[error("node {node_id}: samples_per_node {count} must be at least 2")]
    TooFewSamples { node_id: u32, count: usize },
    #[error("timestamp {minute} outside [0, 1440)")]
    BadTimestamp { minute: u16 },
    #[error("empty profile list")]
    EmptyFleet,
    #[error("test fraction {0} outside (0, 1)")]
    BadTestFraction(f64),
    #[error("node {node_id} has only {count} samples; need at least 2 to split")]
    NodeTooSmallToSplit { node_id: u32, count: usize },
}

/// Lamppost visibility class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum NodeType {
    /// Lamp directly visible: bright disc when ON.
    Type0,
    /// Only the pole visible: diffuse top-weighted glow when ON.
    Type1,
    /// Occluded or mispositioned camera: weak attenuated glow, random
    /// occlusions.
    Type2,
}

impl NodeType {
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(NodeType::Type0),
            1 => Some(NodeType::Type1),
            2 => Some(NodeType::Type2),
            _ => None,
        }
    }

    pub fn code(self) -> u8 {
        match self {
            NodeType::Type0 => 0,
            NodeType::Type1 => 1,
            NodeType::Type2 => 2,
        }
    }

    /// Types 0 and 1 form the "normal" evaluation group; type 2 is "edge".
    pub fn is_edge(self) -> bool {
        self == NodeType::Type2
    }
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.code())
    }
}

/// ON/OFF lamp state; also the sample label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum LampState {
    On,
    Off,
}

impl LampState {
    /// Training target: ON is the positive class.
    pub fn target(self) -> f64 {
        match self {
            LampState::On => 1.0,
            LampState::Off => 0.0,
        }
    }
}

/// Frame-generator knobs. Defaults depend on the node type; experiments may
/// override them to construct easier or harder populations.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GenParams {
    pub raw_width: usize,
    pub raw_height: usize,
    /// Per-pixel noise standard deviation.
    pub noise_std: f64,
    /// Peak added luminance of the ON signal before attenuation.
    pub signal_strength: f64,
    /// Multiplier on the ON signal; type 2 defaults well below 1.
    pub signal_attenuation: f64,
    /// Sign of the ON signal. `-1.0` makes the signal darken the frame,
    /// which puts a population in direct conflict with standard nodes.
    pub signal_polarity: f64,
    /// Maximum number of occluding patches per frame (type 2 only).
    pub max_occlusions: usize,
}

impl GenParams {
    pub fn for_type(node_type: NodeType) -> Self {
        let base = Self {
            raw_width: 48,
            raw_height: 36,
            noise_std: 8.0,
            signal_strength: 110.0,
            signal_attenuation: 1.0,
            signal_polarity: 1.0,
            max_occlusions: 0,
        };
        match node_type {
            NodeType::Type0 => base,
            NodeType::Type1 => Self { noise_std: 12.0, signal_strength: 60.0, ..base },
            NodeType::Type2 => Self {
                noise_std: 16.0,
                signal_strength: 60.0,
                signal_attenuation: 0.35,
                max_occlusions: 3,
                ..base
            },
        }
    }
}

/// One lamppost / edge device.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct NodeProfile {
    pub node_id: u32,
    pub node_type: NodeType,
    pub samples_per_node: usize,
    /// Minutes after midnight.
    pub sunrise_minute: u16,
    /// Minutes after midnight; must exceed `sunrise_minute`.
    pub sunset_minute: u16,
    pub generator_seed: u64,
    pub gen: GenParams,
}

impl NodeProfile {
    pub fn new(node_id: u32, node_type: NodeType) -> Self {
        Self {
            node_id,
            node_type,
            samples_per_node: DEFAULT_SAMPLES_PER_NODE,
            sunrise_minute: DEFAULT_SUNRISE_MINUTE,
            sunset_minute: DEFAULT_SUNSET_MINUTE,
            generator_seed: rng::derive_seed(0, &[salt::NODE_GEN, node_id as u64]),
            gen: GenParams::for_type(node_type),
        }
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.sunrise_minute >= self.sunset_minute || self.sunset_minute >= MINUTES_PER_DAY {
            return Err(DataError::BadSchedule {
                node_id: self.node_id,
                sunrise: self.sunrise_minute,
                sunset: self.sunset_minute,
            });
        }
        if self.samples_per_node < 2 {
            return Err(DataError::TooFewSamples {
                node_id: self.node_id,
                count: self.samples_per_node,
            });
        }
        Ok(())
    }
}

/// Pixel payload of a sample: a raw frame before preprocessing, or the
/// flattened feature vector after it. Exactly one is present by construction.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleData {
    Image(ImageBuffer),
    Features(Vec<f64>),
}

/// One labeled observation owned by a single node.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub node_id: u32,
    pub timestamp_minute: u16,
    pub label: LampState,
    pub data: SampleData,
}

impl Sample {
    pub fn image(&self) -> Option<&ImageBuffer> {
        match &self.data {
            SampleData::Image(img) => Some(img),
            SampleData::Features(_) => None,
        }
    }

    pub fn features(&self) -> Option<&[f64]> {
        match &self.data {
            SampleData::Features(f) => Some(f),
            SampleData::Image(_) => None,
        }
    }
}

/// Train/test split settings.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SplitConfig {
    /// Held-out fraction per node, in (0, 1).
    pub test_fraction: f64,
    pub split_seed: u64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self { test_fraction: 0.2, split_seed: 0 }
    }
}

/// Shape of a synthetic fleet. The default mirrors a 140-node deployment:
/// 133 normal nodes (80 of type 0, 53 of type 1) and 7 edge-case nodes.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FleetSpec {
    pub type0_count: usize,
    pub type1_count: usize,
    pub type2_count: usize,
    pub samples_per_node: usize,
    /// Inclusive sunrise draw range in minutes after midnight.
    pub sunrise_range: (u16, u16),
    /// Inclusive sunset draw range in minutes after midnight.
    pub sunset_range: (u16, u16),
    pub fleet_seed: u64,
    /// Override applied to type 2 nodes.
    pub type2_attenuation: f64,
    /// Override applied to type 2 nodes.
    pub type2_polarity: f64,
}

impl Default for FleetSpec {
    fn default() -> Self {
        Self {
            type0_count: 80,
            type1_count: 53,
            type2_count: 7,
            samples_per_node: DEFAULT_SAMPLES_PER_NODE,
            sunrise_range: (330, 390),
            sunset_range: (1050, 1110),
            fleet_seed: 0,
            type2_attenuation: GenParams::for_type(NodeType::Type2).signal_attenuation,
            type2_polarity: 1.0,
        }
    }
}

impl FleetSpec {
    pub fn with_seed(fleet_seed: u64) -> Self {
        Self { fleet_seed, ..Self::default() }
    }

    pub fn node_count(&self) -> usize {
        self.type0_count + self.type1_count + self.type2_count
    }

    /// Node ids are assigned in blocks: type 0 first, then type 1, then
    /// type 2. Schedules and generator seeds derive from the fleet seed.
    pub fn build(&self) -> Vec<NodeProfile> {
        let mut profiles = Vec::with_capacity(self.node_count());
        let types = std::iter::repeat(NodeType::Type0)
            .take(self.type0_count)
            .chain(std::iter::repeat(NodeType::Type1).take(self.type1_count))
            .chain(std::iter::repeat(NodeType::Type2).take(self.type2_count));
        for (id, node_type) in types.enumerate() {
            let node_id = id as u32;
            let mut profile = NodeProfile::new(node_id, node_type);
            self.apply(&mut profile);
            profiles.push(profile);
        }
        profiles
    }

    /// Applies this spec's volume, schedule and generator settings to an
    /// existing profile (used when the fleet comes from a node-type CSV).
    pub fn apply(&self, profile: &mut NodeProfile) {
        let id = profile.node_id as u64;
        let mut schedule = rng::stream(self.fleet_seed, &[salt::NODE_SCHEDULE, id]);
        profile.samples_per_node = self.samples_per_node;
        profile.sunrise_minute = schedule.random_range(self.sunrise_range.0..=self.sunrise_range.1);
        profile.sunset_minute = schedule.random_range(self.sunset_range.0..=self.sunset_range.1);
        profile.generator_seed = rng::derive_seed(self.fleet_seed, &[salt::NODE_GEN, id]);
        profile.gen = GenParams::for_type(profile.node_type);
        if profile.node_type == NodeType::Type2 {
            profile.gen.signal_attenuation = self.type2_attenuation;
            profile.gen.signal_polarity = self.type2_polarity;
        }
    }
}

/// Parses a node-type CSV (`node_id,node_type` header, one node per row) and
/// fills schedule and volume defaults for every profile.
pub fn load_node_types_csv(path: &Path) -> Result<Vec<NodeProfile>, DataError> {
    let text = std::fs::read_to_string(path).map_err(|source| DataError::FileRead {
        path: path.display().to_string(),
        source,
    })?;
    parse_node_types_csv(&text)
}

/// CSV body parser behind [`load_node_types_csv`]. Line numbers in errors are
/// 1-based and count the header.
pub fn parse_node_types_csv(text: &str) -> Result<Vec<NodeProfile>, DataError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| DataError::BadHeader { line: 1, found: String::new() })?;
    if header.trim_end_matches('\r') != "node_id,node_type" {
        return Err(DataError::BadHeader { line: 1, found: header.to_string() });
    }

    let mut profiles = Vec::new();
    let mut seen = BTreeMap::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r');
        if row.is_empty() {
            continue;
        }
        let mut fields = row.split(',');
        let (id_field, type_field) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => {
                return Err(DataError::MalformedRow {
                    line,
                    found: row.to_string(),
                    reason: "expected exactly 2 comma-separated fields".into(),
                })
            }
        };
        let node_id: u32 = id_field.parse().map_err(|_| DataError::MalformedRow {
            line,
            found: row.to_string(),
            reason: format!("node_id {id_field:?} is not a non-negative integer"),
        })?;
        let code: u8 = type_field
            .parse()
            .map_err(|_| DataError::BadNodeType { line, found: type_field.to_string() })?;
        let node_type = NodeType::from_code(code)
            .ok_or_else(|| DataError::BadNodeType { line, found: type_field.to_string() })?;
        if seen.insert(node_id, line).is_some() {
            return Err(DataError::DuplicateNodeId { line, node_id });
        }
        profiles.push(NodeProfile::new(node_id, node_type));
    }
    Ok(profiles)
}

/// Schedule-expected lamp state at a timestamp: ON inside the closed night
/// window `[sunset - 15, midnight] ∪ [midnight, sunrise + 15]`, OFF otherwise.
pub fn expected_state(timestamp_minute: u16, profile: &NodeProfile) -> Result<LampState, DataError> {
    if timestamp_minute >= MINUTES_PER_DAY {
        return Err(DataError::BadTimestamp { minute: timestamp_minute });
    }
    let night_start = profile.sunset_minute.saturating_sub(NIGHT_MARGIN_MINUTES);
    let night_end = profile.sunrise_minute + NIGHT_MARGIN_MINUTES;
    if timestamp_minute >= night_start || timestamp_minute <= night_end {
        Ok(LampState::On)
    } else {
        Ok(LampState::Off)
    }
}

/// Node-specific scene geometry, fixed across all of a node's frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeLayout {
    /// Background luminance in `[50, 100]`.
    pub base_luminance: f64,
    /// Signal center (row, col).
    pub signal_row: usize,
    pub signal_col: usize,
    /// Disc radius (type 0) or glow sigma (type 2) in pixels.
    pub signal_radius: f64,
    /// Vertical falloff exponent of the type 1 glow.
    pub glow_falloff: f64,
    /// Horizontal tilt of the type 1 glow in `[-0.2, 0.2]`.
    pub glow_tilt: f64,
}

/// Derives the per-node scene geometry from the generator seed.
pub fn layout_for(profile: &NodeProfile) -> NodeLayout {
    let mut rng = rng::stream(profile.generator_seed, &[salt::NODE_GEN]);
    let (h, w) = (profile.gen.raw_height as f64, profile.gen.raw_width as f64);
    let min_dim = h.min(w);
    let base_luminance = 50.0 + 50.0 * rng.random::<f64>();
    let signal_row = (h * (0.25 + 0.5 * rng.random::<f64>())) as usize;
    let signal_col = (w * (0.25 + 0.5 * rng.random::<f64>())) as usize;
    let radius_scale = match profile.node_type {
        NodeType::Type0 => 0.12 + 0.06 * rng.random::<f64>(),
        NodeType::Type1 => 0.0,
        NodeType::Type2 => 0.18 + 0.08 * rng.random::<f64>(),
    };
    NodeLayout {
        base_luminance,
        signal_row,
        signal_col,
        signal_radius: min_dim * radius_scale,
        glow_falloff: 0.8 + 0.8 * rng.random::<f64>(),
        glow_tilt: 0.4 * rng.random::<f64>() - 0.2,
    }
}

/// Warm-white channel weighting of lamp light; averages to 1 so the mean
/// luminance gap equals the configured signal strength.
const WARM: [f64; 3] = [1.2, 1.0, 0.8];
/// Extra headroom on the type 0 disc so noise cannot pull the blob-region
/// mean below the configured contrast.
const BLOB_MARGIN: f64 = 1.1;

/// Approximate standard normal draw (Irwin–Hall with four uniforms); cheap
/// and fully determined by the stream.
#[inline]
fn noise_unit(rng: &mut ChaCha8Rng) -> f64 {
    let sum: f64 = rng.random::<f64>()
        + rng.random::<f64>()
        + rng.random::<f64>()
        + rng.random::<f64>();
    (sum - 2.0) * 1.7320508075688772
}

/// Renders one labeled frame. Deterministic in
/// `(generator_seed, timestamp_minute, draw_index)`; the label is always the
/// schedule-expected state and pixel values are integers in `[0, 255]`.
pub fn generate_sample(
    profile: &NodeProfile,
    timestamp_minute: u16,
    draw_index: u64,
) -> Result<Sample, DataError> {
    profile.validate()?;
    let label = expected_state(timestamp_minute, profile)?;
    let layout = layout_for(profile);
    let gen = &profile.gen;
    let mut rng = rng::stream(
        profile.generator_seed,
        &[salt::SAMPLE, timestamp_minute as u64, draw_index],
    );

    let (h, w) = (gen.raw_height, gen.raw_width);
    let base = layout.base_luminance + 16.0 * rng.random::<f64>() - 8.0;
    let mut img = ImageBuffer::zeros(h, w);
    for row in 0..h {
        for col in 0..w {
            let per_channel = [
                (base + gen.noise_std * noise_unit(&mut rng)).clamp(0.0, 255.0),
                (base + gen.noise_std * noise_unit(&mut rng)).clamp(0.0, 255.0),
                (base + gen.noise_std * noise_unit(&mut rng)).clamp(0.0, 255.0),
            ];
            for (c, v) in per_channel.iter().enumerate() {
                img.set(row, col, c, *v);
            }
        }
    }

    if label == LampState::On {
        let amp = gen.signal_strength * gen.signal_attenuation * gen.signal_polarity;
        match profile.node_type {
            NodeType::Type0 => {
                let r2 = layout.signal_radius * layout.signal_radius;
                for row in 0..h {
                    for col in 0..w {
                        let dr = row as f64 - layout.signal_row as f64;
                        let dc = col as f64 - layout.signal_col as f64;
                        if dr * dr + dc * dc <= r2 {
                            let add = amp * BLOB_MARGIN;
                            img.add_clamped(row, col, [add * WARM[0], add * WARM[1], add * WARM[2]]);
                        }
                    }
                }
            }
            NodeType::Type1 => {
                for row in 0..h {
                    let vertical = (1.0 - row as f64 / h as f64).powf(layout.glow_falloff);
                    for col in 0..w {
                        let tilt = 1.0 + layout.glow_tilt * (col as f64 / w as f64 - 0.5);
                        let add = amp * vertical * tilt;
                        img.add_clamped(row, col, [add * WARM[0], add * WARM[1], add * WARM[2]]);
                    }
                }
            }
            NodeType::Type2 => {
                let sigma2 = 2.0 * layout.signal_radius * layout.signal_radius;
                for row in 0..h {
                    for col in 0..w {
                        let dr = row as f64 - layout.signal_row as f64;
                        let dc = col as f64 - layout.signal_col as f64;
                        let add = amp * (-(dr * dr + dc * dc) / sigma2).exp();
                        img.add_clamped(row, col, [add * WARM[0], add * WARM[1], add * WARM[2]]);
                    }
                }
            }
        }
    }

    // Occlusions land after the signal so vegetation can swallow the glow.
    if gen.max_occlusions > 0 {
        let count = rng.random_range(1..=gen.max_occlusions);
        for _ in 0..count {
            let occ_h = rng.random_range(h / 6..=h / 3);
            let occ_w = rng.random_range(w / 6..=w / 3);
            let top = rng.random_range(0..h - occ_h);
            let left = rng.random_range(0..w - occ_w);
            for row in top..top + occ_h {
                for col in left..left + occ_w {
                    for c in 0..3 {
                        img.set(row, col, c, img.get(row, col, c) * 0.15);
                    }
                }
            }
        }
    }

    img.quantize();
    Ok(Sample {
        node_id: profile.node_id,
        timestamp_minute,
        label,
        data: SampleData::Image(img),
    })
}

/// Timestamp of the node's `index`-th observation: hourly, cycling the day.
pub fn sample_timestamp(index: usize) -> u16 {
    ((index % 24) * 60) as u16
}

/// Generates every node's frames. Pure in the profile list; parallel per
/// node with scheduling-independent output.
pub fn generate_dataset(
    profiles: &[NodeProfile],
) -> Result<BTreeMap<u32, Vec<Sample>>, DataError> {
    if profiles.is_empty() {
        return Err(DataError::EmptyFleet);
    }
    let mut ids = BTreeMap::new();
    for profile in profiles {
        profile.validate()?;
        if ids.insert(profile.node_id, ()).is_some() {
            return Err(DataError::DuplicateProfile { node_id: profile.node_id });
        }
    }
    let per_node: Vec<(u32, Vec<Sample>)> = profiles
        .par_iter()
        .map(|profile| {
            let samples = (0..profile.samples_per_node)
                .map(|i| {
                    generate_sample(profile, sample_timestamp(i), i as u64)
                        .expect("profile validated above")
                })
                .collect();
            (profile.node_id, samples)
        })
        .collect();
    Ok(per_node.into_iter().collect())
}

/// Splits samples into per-node disjoint train/test subsets.
///
/// Each node holds out `round(test_fraction * n)` samples, clamped to
/// `[1, n - 1]`; membership is drawn from the split seed and the node id, so
/// the partition is independent of input order across nodes.
pub fn split_train_test(
    samples: Vec<Sample>,
    cfg: &SplitConfig,
) -> Result<(Vec<Sample>, Vec<Sample>), DataError> {
    if !(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0) {
        return Err(DataError::BadTestFraction(cfg.test_fraction));
    }
    let mut per_node: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (idx, sample) in samples.iter().enumerate() {
        per_node.entry(sample.node_id).or_default().push(idx);
    }

    let mut is_test = vec![false; samples.len()];
    for (&node_id, indices) in &per_node {
        let n = indices.len();
        if n < 2 {
            return Err(DataError::NodeTooSmallToSplit { node_id, count: n });
        }
        let test_count =
            ((cfg.test_fraction * n as f64).round() as usize).clamp(1, n - 1);
        let mut order: Vec<usize> = (0..n).collect();
        let mut stream = rng::stream(cfg.split_seed, &[salt::SPLIT, node_id as u64]);
        rng::shuffle(&mut order, &mut stream);
        for &pos in order.iter().take(test_count) {
            is_test[indices[pos]] = true;
        }
    }

    let mut train = Vec::with_capacity(samples.len());
    let mut test = Vec::new();
    for (idx, sample) in samples.into_iter().enumerate() {
        if is_test[idx] {
            test.push(sample);
        } else {
            train.push(sample);
        }
    }
    Ok((train, test))
}

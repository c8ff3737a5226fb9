//! Bandwidth-constrained stream selection.
//!
//! Picks the subset of {object, relation, attribute} streams that maximizes
//! received semantic utility under a per-sample symbol budget, and maps
//! channel state to that budget.

use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{CHANNEL_DIM, SLOTS};

/// Symbols per stream with the default geometry (`N * D_c`).
pub const STREAM_SYMBOLS: u64 = (SLOTS * CHANNEL_DIM) as u64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StreamProfile {
    pub u_obj: f64,
    pub u_rel: f64,
    pub u_attr: f64,
    pub r_obj: u64,
    pub r_rel: u64,
    pub r_attr: u64,
}

impl Default for StreamProfile {
    fn default() -> Self {
        Self {
            u_obj: 10.0,
            u_rel: 3.0,
            u_attr: 2.0,
            r_obj: STREAM_SYMBOLS,
            r_rel: STREAM_SYMBOLS,
            r_attr: STREAM_SYMBOLS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SchedulerError {
    UtilityOrder,
    ZeroRate,
    EmptyPolicy,
    PolicyOrder { index: usize },
}

impl fmt::Display for SchedulerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchedulerError::UtilityOrder => {
                f.write_str("stream utilities must satisfy u_obj > u_rel > u_attr > 0")
            }
            SchedulerError::ZeroRate => f.write_str("stream rates must be positive"),
            SchedulerError::EmptyPolicy => f.write_str("CSI policy table is empty"),
            SchedulerError::PolicyOrder { index } => {
                write!(f, "CSI policy thresholds must strictly increase (entry {index})")
            }
        }
    }
}

impl StreamProfile {
    pub fn validate(&self) -> Result<(), SchedulerError> {
        if !(self.u_obj > self.u_rel && self.u_rel > self.u_attr && self.u_attr > 0.0) {
            return Err(SchedulerError::UtilityOrder);
        }
        if self.r_obj == 0 || self.r_rel == 0 || self.r_attr == 0 {
            return Err(SchedulerError::ZeroRate);
        }
        Ok(())
    }

    fn rate(&self, m: MaskBits) -> u64 {
        m.obj as u64 * self.r_obj + m.rel as u64 * self.r_rel + m.attr as u64 * self.r_attr
    }

    /// Utility actually delivered by a mask. Relations and attributes are
    /// decoded relative to detected objects, so without the object stream
    /// they deliver nothing.
    fn received_utility(&self, m: MaskBits) -> f64 {
        if !m.obj {
            return 0.0;
        }
        self.u_obj + m.rel as u8 as f64 * self.u_rel + m.attr as u8 as f64 * self.u_attr
    }

    pub fn utility(&self, m: TransmissionMask) -> f64 {
        self.received_utility(m.bits())
    }

    pub fn symbols(&self, m: TransmissionMask) -> u64 {
        self.rate(m.bits())
    }
}

/// One candidate stream selection, object bit included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaskBits {
    pub obj: bool,
    pub rel: bool,
    pub attr: bool,
}

impl MaskBits {
    /// All eight selections in tie-break order: the three operating levels,
    /// the remaining object-bearing mask, then the object-less ones.
    pub const ALL: [MaskBits; 8] = [
        MaskBits { obj: true, rel: false, attr: false },
        MaskBits { obj: true, rel: true, attr: false },
        MaskBits { obj: true, rel: true, attr: true },
        MaskBits { obj: true, rel: false, attr: true },
        MaskBits { obj: false, rel: false, attr: false },
        MaskBits { obj: false, rel: true, attr: false },
        MaskBits { obj: false, rel: false, attr: true },
        MaskBits { obj: false, rel: true, attr: true },
    ];
}

/// Streams scheduled for one sample. The object stream is always on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TransmissionMask {
    pub rel: bool,
    pub attr: bool,
}

impl TransmissionMask {
    pub const LEVEL1: Self = Self { rel: false, attr: false };
    pub const LEVEL2: Self = Self { rel: true, attr: false };
    pub const LEVEL3: Self = Self { rel: true, attr: true };

    pub fn obj(&self) -> bool {
        true
    }

    pub fn bits(&self) -> MaskBits {
        MaskBits { obj: true, rel: self.rel, attr: self.attr }
    }

    /// `[m_obj, m_rel, m_attr]` as 0/1.
    pub fn as_array(&self) -> [u8; 3] {
        [1, self.rel as u8, self.attr as u8]
    }

    pub fn level(&self) -> OperatingLevel {
        mask_to_level(*self)
    }
}

impl fmt::Display for TransmissionMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = self.as_array();
        write!(f, "[{a},{b},{c}]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatingLevel {
    /// Objects only.
    L1,
    /// Objects and relations.
    L2,
    /// Objects, relations and attributes.
    L3,
    Nonstandard,
}

impl OperatingLevel {
    pub fn number(&self) -> Option<u8> {
        match self {
            OperatingLevel::L1 => Some(1),
            OperatingLevel::L2 => Some(2),
            OperatingLevel::L3 => Some(3),
            OperatingLevel::Nonstandard => None,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(OperatingLevel::L1),
            2 => Some(OperatingLevel::L2),
            3 => Some(OperatingLevel::L3),
            _ => None,
        }
    }

    pub fn mask(&self) -> Option<TransmissionMask> {
        match self {
            OperatingLevel::L1 => Some(TransmissionMask::LEVEL1),
            OperatingLevel::L2 => Some(TransmissionMask::LEVEL2),
            OperatingLevel::L3 => Some(TransmissionMask::LEVEL3),
            OperatingLevel::Nonstandard => None,
        }
    }
}

pub fn mask_to_level(m: TransmissionMask) -> OperatingLevel {
    match (m.rel, m.attr) {
        (false, false) => OperatingLevel::L1,
        (true, false) => OperatingLevel::L2,
        (true, true) => OperatingLevel::L3,
        (false, true) => OperatingLevel::Nonstandard,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub mask: TransmissionMask,
    pub utility: f64,
    pub symbols: u64,
    /// Set when even the object stream exceeds the budget and was scheduled
    /// anyway.
    pub over_budget: bool,
    /// Smallest non-negative multiplier for which the chosen mask maximizes
    /// the relaxed objective `U(M) - lambda * (R(M) - budget)`; `None` when no
    /// multiplier supports it. Diagnostic only.
    pub lambda: Option<f64>,
}

/// Exhaustive search over the eight masks: maximize received utility subject
/// to `rate <= budget`; ties go to fewer symbols, then tie-break order. Below
/// the object-stream rate the object stream is scheduled anyway and
/// `over_budget` is set.
pub fn optimize_mask(profile: &StreamProfile, budget: u64) -> Schedule {
    let mut best: Option<MaskBits> = None;
    for m in MaskBits::ALL {
        if profile.rate(m) > budget {
            continue;
        }
        let better = match best {
            None => true,
            Some(b) => {
                let (ub, um) = (profile.received_utility(b), profile.received_utility(m));
                um > ub || (um == ub && profile.rate(m) < profile.rate(b))
            }
        };
        if better {
            best = Some(m);
        }
    }
    let chosen = match best {
        Some(m) if m.obj => Some(m),
        _ => None,
    };
    let (bits, over_budget) = match chosen {
        Some(m) => (m, false),
        None => (MaskBits::ALL[0], true),
    };
    let mask = TransmissionMask { rel: bits.rel, attr: bits.attr };
    Schedule {
        mask,
        utility: profile.received_utility(bits),
        symbols: profile.rate(bits),
        over_budget,
        lambda: support_multiplier(profile, bits),
    }
}

fn support_multiplier(profile: &StreamProfile, chosen: MaskBits) -> Option<f64> {
    let (u0, r0) = (profile.received_utility(chosen), profile.rate(chosen) as f64);
    let mut lo: f64 = 0.0;
    let mut hi = f64::INFINITY;
    for m in MaskBits::ALL {
        let (u, r) = (profile.received_utility(m), profile.rate(m) as f64);
        if r > r0 {
            lo = lo.max((u - u0) / (r - r0));
        } else if r < r0 {
            hi = hi.min((u0 - u) / (r0 - r));
        } else if u > u0 {
            return None;
        }
    }
    (lo <= hi).then_some(lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyStep {
    pub min_snr_db: f64,
    pub budget: u64,
}

/// Piecewise-constant map from SNR to symbol budget. Intervals are
/// lower-inclusive; SNRs below the first threshold get the first budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PolicyStep>", into = "Vec<PolicyStep>")]
pub struct CsiPolicy {
    steps: Vec<PolicyStep>,
}

impl CsiPolicy {
    pub fn new(steps: Vec<PolicyStep>) -> Result<Self, SchedulerError> {
        if steps.is_empty() {
            return Err(SchedulerError::EmptyPolicy);
        }
        for (i, w) in steps.windows(2).enumerate() {
            if !(w[1].min_snr_db > w[0].min_snr_db) {
                return Err(SchedulerError::PolicyOrder { index: i + 1 });
            }
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> &[PolicyStep] {
        &self.steps
    }
}

impl Default for CsiPolicy {
    fn default() -> Self {
        Self::new(alloc::vec![
            PolicyStep { min_snr_db: 0.0, budget: STREAM_SYMBOLS },
            PolicyStep { min_snr_db: 4.0, budget: 2 * STREAM_SYMBOLS },
            PolicyStep { min_snr_db: 8.0, budget: 3 * STREAM_SYMBOLS },
        ])
        .expect("default policy is ordered")
    }
}

impl TryFrom<Vec<PolicyStep>> for CsiPolicy {
    type Error = SchedulerError;
    fn try_from(v: Vec<PolicyStep>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<CsiPolicy> for Vec<PolicyStep> {
    fn from(p: CsiPolicy) -> Self {
        p.steps
    }
}

pub fn csi_to_budget(snr_db: f64, policy: &CsiPolicy) -> u64 {
    policy
        .steps
        .iter()
        .rev()
        .find(|s| snr_db >= s.min_snr_db)
        .unwrap_or(&policy.steps[0])
        .budget
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn default_levels() {
        let p = StreamProfile::default();
        assert_eq!(optimize_mask(&p, 960).mask, TransmissionMask::LEVEL1);
        assert_eq!(optimize_mask(&p, 1920).mask, TransmissionMask::LEVEL2);
        assert_eq!(optimize_mask(&p, 2880).mask, TransmissionMask::LEVEL3);
        assert_eq!(optimize_mask(&p, 2879).mask, TransmissionMask::LEVEL2);
    }

    #[test]
    fn survival_floor() {
        let s = optimize_mask(&StreamProfile::default(), 100);
        assert_eq!(s.mask, TransmissionMask::LEVEL1);
        assert!(s.over_budget);
        assert_eq!(s.symbols, 960);
        assert!(!optimize_mask(&StreamProfile::default(), 960).over_budget);
    }

    #[test]
    fn levels() {
        assert_eq!(mask_to_level(TransmissionMask::LEVEL1).number(), Some(1));
        assert_eq!(mask_to_level(TransmissionMask::LEVEL3).number(), Some(3));
        assert_eq!(
            mask_to_level(TransmissionMask { rel: false, attr: true }),
            OperatingLevel::Nonstandard
        );
        assert_eq!(TransmissionMask::LEVEL2.to_string(), "[1,1,0]");
    }

    #[test]
    fn default_policy() {
        let p = CsiPolicy::default();
        assert_eq!(csi_to_budget(0.0, &p), 960);
        assert_eq!(csi_to_budget(3.999, &p), 960);
        assert_eq!(csi_to_budget(4.0, &p), 1920);
        assert_eq!(csi_to_budget(10.0, &p), 2880);
        assert_eq!(csi_to_budget(-20.0, &p), 960);
        assert_eq!(csi_to_budget(f64::INFINITY, &p), 2880);
    }

    #[test]
    fn policy_errors() {
        assert_eq!(CsiPolicy::new(Vec::new()), Err(SchedulerError::EmptyPolicy));
        let steps = alloc::vec![
            PolicyStep { min_snr_db: 4.0, budget: 1 },
            PolicyStep { min_snr_db: 4.0, budget: 2 },
        ];
        assert_eq!(CsiPolicy::new(steps), Err(SchedulerError::PolicyOrder { index: 1 }));
    }

    #[test]
    fn lambda_brackets_levels() {
        let p = StreamProfile::default();
        // level 1 chosen at 960: lambda must exceed the marginal utility per
        // symbol of adding relations
        let l1 = optimize_mask(&p, 960).lambda.unwrap();
        assert!((l1 - 3.0 / 960.0).abs() < 1e-15);
        assert_eq!(optimize_mask(&p, 2880).lambda, Some(0.0));
    }

    #[test]
    fn profile_validation() {
        assert!(StreamProfile::default().validate().is_ok());
        let bad = StreamProfile { u_rel: 1.0, ..StreamProfile::default() };
        assert_eq!(bad.validate(), Err(SchedulerError::UtilityOrder));
        let bad = StreamProfile { r_rel: 0, ..StreamProfile::default() };
        assert_eq!(bad.validate(), Err(SchedulerError::ZeroRate));
    }
}

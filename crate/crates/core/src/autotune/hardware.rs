use std::fmt;
use std::sync::OnceLock;

use crate::kernels::available_threads;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardwareProfile {
    /// Width of one vector register in bits.
    pub simd_bits: u32,
    /// 32-bit lanes per vector register.
    pub vlen: usize,
    pub cores: usize,
    pub description: String,
}

impl HardwareProfile {
    /// Profile for a known vector width (128, 256 or 512 bits). Other widths
    /// fall back to the default profile.
    pub fn from_simd_bits(simd_bits: u32, cores: usize, description: impl Into<String>) -> Self {
        match simd_bits {
            128 | 256 | 512 => HardwareProfile {
                simd_bits,
                vlen: simd_bits as usize / 32,
                cores,
                description: description.into(),
            },
            _ => Self::fallback(cores),
        }
    }

    /// Used when the platform cannot be probed: 256-bit vectors, 8 lanes.
    pub fn fallback(cores: usize) -> Self {
        HardwareProfile {
            simd_bits: 256,
            vlen: 8,
            cores,
            description: "fallback".to_string(),
        }
    }
}

impl fmt::Display for HardwareProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}-bit vectors, VLEN={}, {} cores)",
            self.description, self.simd_bits, self.vlen, self.cores
        )
    }
}

/// Probes the widest usable vector extension at run time.
pub fn detect_hardware() -> HardwareProfile {
    let cores = available_threads();
    probe(cores).unwrap_or_else(|| HardwareProfile::fallback(cores))
}

#[cfg(target_arch = "x86_64")]
fn probe(cores: usize) -> Option<HardwareProfile> {
    let (bits, name) = if std::arch::is_x86_feature_detected!("avx512f") {
        (512, "x86_64 avx512f")
    } else if std::arch::is_x86_feature_detected!("avx2") {
        (256, "x86_64 avx2")
    } else if std::arch::is_x86_feature_detected!("avx") {
        (256, "x86_64 avx")
    } else if std::arch::is_x86_feature_detected!("sse2") {
        (128, "x86_64 sse2")
    } else {
        return None;
    };
    Some(HardwareProfile::from_simd_bits(bits, cores, name))
}

#[cfg(target_arch = "aarch64")]
fn probe(cores: usize) -> Option<HardwareProfile> {
    std::arch::is_aarch64_feature_detected!("neon").then(|| HardwareProfile::from_simd_bits(128, cores, "aarch64 neon"))
}

#[cfg(not(any(target_arch = "x86_64", target_arch = "aarch64")))]
fn probe(_cores: usize) -> Option<HardwareProfile> {
    None
}

/// Probe result for this process, computed once.
pub fn hardware() -> &'static HardwareProfile {
    static PROFILE: OnceLock<HardwareProfile> = OnceLock::new();
    PROFILE.get_or_init(detect_hardware)
}

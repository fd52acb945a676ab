//! Element types for distance matrices.

use core::fmt;
use core::ops::Add;

use crate::kernel::{Isa, IsaLevel, TileSources};

/// Runtime tag for the element type of a distance matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum DType {
    F32,
    F64,
}

impl DType {
    /// Code stored in the binary matrix header.
    pub const fn code(self) -> u8 {
        match self {
            DType::F32 => 1,
            DType::F64 => 2,
        }
    }

    pub const fn from_code(code: u8) -> Option<DType> {
        match code {
            1 => Some(DType::F32),
            2 => Some(DType::F64),
            _ => None,
        }
    }

    pub const fn size_of(self) -> usize {
        match self {
            DType::F32 => 4,
            DType::F64 => 8,
        }
    }

    pub const fn token(self) -> &'static str {
        match self {
            DType::F32 => "f32",
            DType::F64 => "f64",
        }
    }

    pub fn from_token(token: &str) -> Option<DType> {
        match token {
            "f32" | "single" | "float" => Some(DType::F32),
            "f64" | "double" => Some(DType::F64),
            _ => None,
        }
    }
}

impl fmt::Display for DType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// IEEE-754 element type usable as a path weight.
///
/// "No path" is the type's own `+inf`, so `inf + x == inf` and an infinite
/// candidate never improves any distance.
pub trait Weight: Copy + PartialOrd + Add<Output = Self> + fmt::Debug + fmt::Display + Send + Sync + 'static {
    const DTYPE: DType;
    const ZERO: Self;
    const INFINITY: Self;
    /// Number of bytes in the little-endian encoding.
    const BYTES: usize;

    fn from_u32(v: u32) -> Self;
    fn to_f64(self) -> f64;
    /// Lossy conversion used by parsers; callers reject NaN separately.
    fn from_f64(v: f64) -> Self;
    fn is_nan(self) -> bool;
    fn is_finite(self) -> bool;
    /// `true` if the value is finite and has no fractional part.
    fn is_integral(self) -> bool;

    fn write_le(self, out: &mut [u8]);
    fn read_le(bytes: &[u8]) -> Self;
    fn bits(self) -> u64;

    /// Hand-vectorized tile update, if one exists for `isa` and `tb`.
    /// Returns `false` when the caller must use the generic kernel.
    #[doc(hidden)]
    fn tile_simd(
        _isa: Isa,
        _write: &mut [Self],
        _preds: &mut [u32],
        _sources: TileSources<'_, Self>,
        _tb: usize,
        _k_base: u32,
    ) -> bool {
        false
    }

    /// Hand-vectorized row relaxation (`src == None` is in place).
    #[doc(hidden)]
    fn relax_simd(_isa: Isa, _dst: &mut [Self], _pred: &mut [u32], _via: Self, _src: Option<&[Self]>, _k: u32) -> bool {
        false
    }
}

macro_rules! simd_impl {
    ($tile:ident, $row:ident) => {
        #[inline]
        fn tile_simd(
            isa: Isa,
            write: &mut [Self],
            preds: &mut [u32],
            sources: TileSources<'_, Self>,
            tb: usize,
            k_base: u32,
        ) -> bool {
            let len = tb * tb;
            let src_ok = match sources {
                TileSources::Pivot => true,
                TileSources::Row { pivot } | TileSources::Col { pivot } => pivot.len() >= len,
                TileSources::Outer { row_src, col_src } => row_src.len() >= len && col_src.len() >= len,
            };
            assert!(
                write.len() >= len && preds.len() >= len && src_ok,
                "tile buffers shorter than tb*tb"
            );
            #[cfg(target_arch = "x86_64")]
            {
                // SAFETY: an Isa above baseline is only constructed for a CPU
                // that has its features; lengths checked above.
                match isa.level() {
                    IsaLevel::Avx512 => return unsafe { crate::simd::$tile(true, write, preds, sources, tb, k_base) },
                    IsaLevel::Avx2 => return unsafe { crate::simd::$tile(false, write, preds, sources, tb, k_base) },
                    IsaLevel::Baseline => {}
                }
            }
            let _ = (isa, sources, k_base);
            false
        }

        #[inline]
        fn relax_simd(isa: Isa, dst: &mut [Self], pred: &mut [u32], via: Self, src: Option<&[Self]>, k: u32) -> bool {
            assert!(pred.len() >= dst.len() && src.map_or(true, |s| s.len() >= dst.len()));
            #[cfg(target_arch = "x86_64")]
            {
                // SAFETY: as tile_simd.
                match isa.level() {
                    IsaLevel::Avx512 => unsafe { crate::simd::$row(true, dst, pred, via, src, k) },
                    IsaLevel::Avx2 => unsafe { crate::simd::$row(false, dst, pred, via, src, k) },
                    IsaLevel::Baseline => return false,
                }
                return true;
            }
            #[allow(unreachable_code)]
            {
                let _ = (isa, dst, pred, via, src, k);
                false
            }
        }
    };
}

impl Weight for f32 {
    const DTYPE: DType = DType::F32;
    const ZERO: Self = 0.0;
    const INFINITY: Self = f32::INFINITY;
    const BYTES: usize = 4;

    #[inline]
    fn from_u32(v: u32) -> Self {
        v as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self as f64
    }
    #[inline]
    fn from_f64(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn is_nan(self) -> bool {
        f32::is_nan(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f32::is_finite(self)
    }
    fn is_integral(self) -> bool {
        // every f32 at or above 2^23 is integral
        if !self.is_finite() {
            return false;
        }
        if self >= 8_388_608.0 || self <= -8_388_608.0 {
            return true;
        }
        (self as i32) as f32 == self
    }
    #[inline]
    fn write_le(self, out: &mut [u8]) {
        out[..4].copy_from_slice(&self.to_le_bytes());
    }
    #[inline]
    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]])
    }
    #[inline]
    fn bits(self) -> u64 {
        self.to_bits() as u64
    }

    simd_impl!(tile_f32, row_f32);
}

impl Weight for f64 {
    const DTYPE: DType = DType::F64;
    const ZERO: Self = 0.0;
    const INFINITY: Self = f64::INFINITY;
    const BYTES: usize = 8;

    #[inline]
    fn from_u32(v: u32) -> Self {
        v as f64
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn from_f64(v: f64) -> Self {
        v
    }
    #[inline]
    fn is_nan(self) -> bool {
        f64::is_nan(self)
    }
    #[inline]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn is_integral(self) -> bool {
        if !self.is_finite() {
            return false;
        }
        if self >= 4_503_599_627_370_496.0 || self <= -4_503_599_627_370_496.0 {
            return true;
        }
        (self as i64) as f64 == self
    }
    #[inline]
    fn write_le(self, out: &mut [u8]) {
        out[..8].copy_from_slice(&self.to_le_bytes());
    }
    #[inline]
    fn read_le(bytes: &[u8]) -> Self {
        let mut b = [0u8; 8];
        b.copy_from_slice(&bytes[..8]);
        f64::from_le_bytes(b)
    }
    #[inline]
    fn bits(self) -> u64 {
        self.to_bits()
    }

    simd_impl!(tile_f64, row_f64);
}

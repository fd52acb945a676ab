//! Hand-vectorized tile kernels for x86-64.
//!
//! Each OUTER kernel holds an `R x (NV * lanes)` block of the write tile (and its
//! predecessors) in registers for the whole `kk` sweep, so every register
//! row is an independent min-select chain. The per-entry operation sequence
//! is the scalar kernel's: `cand = via + src`, strict ordered `<`, select.

#![allow(clippy::needless_range_loop)]

use core::arch::x86_64::*;

use crate::kernel::TileSources;

/// # Safety
///
/// The CPU must support AVX-512 F/BW/VL/DQ. All slices hold `tb * tb`
/// elements, and `tb` is a multiple of `R` and of `NV * 16`.
#[target_feature(enable = "avx512f,avx512bw,avx512vl,avx512dq")]
unsafe fn outer_f32_avx512<const R: usize, const NV: usize>(
    write: &mut [f32],
    preds: &mut [u32],
    row_src: &[f32],
    col_src: &[f32],
    tb: usize,
    k_base: u32,
) {
    const L: usize = 16;
    let (w, p_out, rs, cs) = (
        write.as_mut_ptr(),
        preds.as_mut_ptr(),
        row_src.as_ptr(),
        col_src.as_ptr(),
    );
    for jb in (0..tb).step_by(NV * L) {
        for ib in (0..tb).step_by(R) {
            let mut d = [[_mm512_setzero_ps(); NV]; R];
            let mut p = [[_mm512_setzero_si512(); NV]; R];
            for r in 0..R {
                for v in 0..NV {
                    let at = (ib + r) * tb + jb + v * L;
                    d[r][v] = _mm512_loadu_ps(w.add(at));
                    p[r][v] = _mm512_loadu_si512(p_out.add(at) as *const _);
                }
            }
            for kk in 0..tb {
                let kv = _mm512_set1_epi32((k_base + kk as u32) as i32);
                let mut s = [_mm512_setzero_ps(); NV];
                for v in 0..NV {
                    s[v] = _mm512_loadu_ps(cs.add(kk * tb + jb + v * L));
                }
                for r in 0..R {
                    let via = _mm512_set1_ps(*rs.add((ib + r) * tb + kk));
                    for v in 0..NV {
                        let cand = _mm512_add_ps(via, s[v]);
                        let m = _mm512_cmp_ps_mask::<_CMP_LT_OQ>(cand, d[r][v]);
                        d[r][v] = _mm512_mask_mov_ps(d[r][v], m, cand);
                        p[r][v] = _mm512_mask_mov_epi32(p[r][v], m, kv);
                    }
                }
            }
            for r in 0..R {
                for v in 0..NV {
                    let at = (ib + r) * tb + jb + v * L;
                    _mm512_storeu_ps(w.add(at), d[r][v]);
                    _mm512_storeu_si512(p_out.add(at) as *mut _, p[r][v]);
                }
            }
        }
    }
}

/// # Safety
///
/// As [`outer_f32_avx512`], with `tb` a multiple of `R` and `NV * 8`.
#[target_feature(enable = "avx512f,avx512bw,avx512vl,avx512dq")]
unsafe fn outer_f64_avx512<const R: usize, const NV: usize>(
    write: &mut [f64],
    preds: &mut [u32],
    row_src: &[f64],
    col_src: &[f64],
    tb: usize,
    k_base: u32,
) {
    const L: usize = 8;
    let (w, p_out, rs, cs) = (
        write.as_mut_ptr(),
        preds.as_mut_ptr(),
        row_src.as_ptr(),
        col_src.as_ptr(),
    );
    for jb in (0..tb).step_by(NV * L) {
        for ib in (0..tb).step_by(R) {
            let mut d = [[_mm512_setzero_pd(); NV]; R];
            let mut p = [[_mm256_setzero_si256(); NV]; R];
            for r in 0..R {
                for v in 0..NV {
                    let at = (ib + r) * tb + jb + v * L;
                    d[r][v] = _mm512_loadu_pd(w.add(at));
                    p[r][v] = _mm256_loadu_si256(p_out.add(at) as *const _);
                }
            }
            for kk in 0..tb {
                let kv = _mm256_set1_epi32((k_base + kk as u32) as i32);
                let mut s = [_mm512_setzero_pd(); NV];
                for v in 0..NV {
                    s[v] = _mm512_loadu_pd(cs.add(kk * tb + jb + v * L));
                }
                for r in 0..R {
                    let via = _mm512_set1_pd(*rs.add((ib + r) * tb + kk));
                    for v in 0..NV {
                        let cand = _mm512_add_pd(via, s[v]);
                        let m = _mm512_cmp_pd_mask::<_CMP_LT_OQ>(cand, d[r][v]);
                        d[r][v] = _mm512_mask_mov_pd(d[r][v], m, cand);
                        p[r][v] = _mm256_mask_mov_epi32(p[r][v], m, kv);
                    }
                }
            }
            for r in 0..R {
                for v in 0..NV {
                    let at = (ib + r) * tb + jb + v * L;
                    _mm512_storeu_pd(w.add(at), d[r][v]);
                    _mm256_storeu_si256(p_out.add(at) as *mut _, p[r][v]);
                }
            }
        }
    }
}

/// # Safety
///
/// The CPU must support AVX2. Shapes as [`outer_f32_avx512`] with 8 lanes.
#[target_feature(enable = "avx2,fma")]
unsafe fn outer_f32_avx2<const R: usize, const NV: usize>(
    write: &mut [f32],
    preds: &mut [u32],
    row_src: &[f32],
    col_src: &[f32],
    tb: usize,
    k_base: u32,
) {
    const L: usize = 8;
    let (w, p_out, rs, cs) = (
        write.as_mut_ptr(),
        preds.as_mut_ptr(),
        row_src.as_ptr(),
        col_src.as_ptr(),
    );
    for jb in (0..tb).step_by(NV * L) {
        for ib in (0..tb).step_by(R) {
            let mut d = [[_mm256_setzero_ps(); NV]; R];
            let mut p = [[_mm256_setzero_ps(); NV]; R];
            for r in 0..R {
                for v in 0..NV {
                    let at = (ib + r) * tb + jb + v * L;
                    d[r][v] = _mm256_loadu_ps(w.add(at));
                    p[r][v] = _mm256_loadu_ps(p_out.add(at) as *const f32);
                }
            }
            for kk in 0..tb {
                let kv = _mm256_castsi256_ps(_mm256_set1_epi32((k_base + kk as u32) as i32));
                let mut s = [_mm256_setzero_ps(); NV];
                for v in 0..NV {
                    s[v] = _mm256_loadu_ps(cs.add(kk * tb + jb + v * L));
                }
                for r in 0..R {
                    let via = _mm256_set1_ps(*rs.add((ib + r) * tb + kk));
                    for v in 0..NV {
                        let cand = _mm256_add_ps(via, s[v]);
                        let m = _mm256_cmp_ps::<_CMP_LT_OQ>(cand, d[r][v]);
                        d[r][v] = _mm256_blendv_ps(d[r][v], cand, m);
                        p[r][v] = _mm256_blendv_ps(p[r][v], kv, m);
                    }
                }
            }
            for r in 0..R {
                for v in 0..NV {
                    let at = (ib + r) * tb + jb + v * L;
                    _mm256_storeu_ps(w.add(at), d[r][v]);
                    _mm256_storeu_ps(p_out.add(at) as *mut f32, p[r][v]);
                }
            }
        }
    }
}

/// # Safety
///
/// The CPU must support AVX2. Shapes as [`outer_f32_avx512`] with 4 lanes.
#[target_feature(enable = "avx2,fma")]
unsafe fn outer_f64_avx2<const R: usize, const NV: usize>(
    write: &mut [f64],
    preds: &mut [u32],
    row_src: &[f64],
    col_src: &[f64],
    tb: usize,
    k_base: u32,
) {
    const L: usize = 4;
    let (w, p_out, rs, cs) = (
        write.as_mut_ptr(),
        preds.as_mut_ptr(),
        row_src.as_ptr(),
        col_src.as_ptr(),
    );
    // even 32-bit halves of each 64-bit mask lane
    let narrow = _mm256_setr_epi32(0, 2, 4, 6, 0, 2, 4, 6);
    for jb in (0..tb).step_by(NV * L) {
        for ib in (0..tb).step_by(R) {
            let mut d = [[_mm256_setzero_pd(); NV]; R];
            let mut p = [[_mm_setzero_ps(); NV]; R];
            for r in 0..R {
                for v in 0..NV {
                    let at = (ib + r) * tb + jb + v * L;
                    d[r][v] = _mm256_loadu_pd(w.add(at));
                    p[r][v] = _mm_loadu_ps(p_out.add(at) as *const f32);
                }
            }
            for kk in 0..tb {
                let kv = _mm_castsi128_ps(_mm_set1_epi32((k_base + kk as u32) as i32));
                let mut s = [_mm256_setzero_pd(); NV];
                for v in 0..NV {
                    s[v] = _mm256_loadu_pd(cs.add(kk * tb + jb + v * L));
                }
                for r in 0..R {
                    let via = _mm256_set1_pd(*rs.add((ib + r) * tb + kk));
                    for v in 0..NV {
                        let cand = _mm256_add_pd(via, s[v]);
                        let m = _mm256_cmp_pd::<_CMP_LT_OQ>(cand, d[r][v]);
                        d[r][v] = _mm256_blendv_pd(d[r][v], cand, m);
                        let m32 = _mm256_castps256_ps128(_mm256_permutevar8x32_ps(_mm256_castpd_ps(m), narrow));
                        p[r][v] = _mm_blendv_ps(p[r][v], kv, m32);
                    }
                }
            }
            for r in 0..R {
                for v in 0..NV {
                    let at = (ib + r) * tb + jb + v * L;
                    _mm256_storeu_pd(w.add(at), d[r][v]);
                    _mm_storeu_ps(p_out.add(at) as *mut f32, p[r][v]);
                }
            }
        }
    }
}

macro_rules! pick {
    ($tb:expr, $lanes:expr, $r:literal, [$($nv:literal),+], $f:ident, $args:tt) => {{
        if $tb % $r != 0 {
            return false;
        }
        $(
            if $tb % ($nv * $lanes) == 0 {
                $f::<$r, $nv> $args;
                return true;
            }
        )+
        return false
    }};
}

macro_rules! entry_points {
    ($t:ty, $tile:ident, $row:ident, $lanes512:literal, $lanes256:literal,
     avx512: ($outer512:ident, $ss512:ident, $col512:ident, $row512:ident),
     avx2: ($outer256:ident, $ss256:ident, $col256:ident, $row256:ident)) => {
        /// Runs a vector kernel for one tile update if one covers `tb`;
        /// `false` means the caller must fall back.
        ///
        /// # Safety
        ///
        /// The CPU must support AVX-512 F/BW/VL/DQ when `avx512`, else
        /// AVX2+FMA. All slices must hold at least `tb * tb` elements.
        pub(crate) unsafe fn $tile(
            avx512: bool,
            write: &mut [$t],
            preds: &mut [u32],
            sources: TileSources<'_, $t>,
            tb: usize,
            k_base: u32,
        ) -> bool {
            match (sources, avx512) {
                (TileSources::Outer { row_src, col_src }, true) => {
                    pick!(
                        tb,
                        $lanes512,
                        4,
                        [2, 1],
                        $outer512,
                        (write, preds, row_src, col_src, tb, k_base)
                    )
                }
                (TileSources::Outer { row_src, col_src }, false) => {
                    pick!(
                        tb,
                        $lanes256,
                        2,
                        [2, 1],
                        $outer256,
                        (write, preds, row_src, col_src, tb, k_base)
                    )
                }
                (TileSources::Pivot, true) => $ss512(write, preds, None, tb, k_base),
                (TileSources::Pivot, false) => $ss256(write, preds, None, tb, k_base),
                (TileSources::Row { pivot }, true) => $ss512(write, preds, Some(pivot), tb, k_base),
                (TileSources::Row { pivot }, false) => $ss256(write, preds, Some(pivot), tb, k_base),
                (TileSources::Col { pivot }, true) => $col512(write, preds, pivot, tb, k_base),
                (TileSources::Col { pivot }, false) => $col256(write, preds, pivot, tb, k_base),
            }
            true
        }

        /// Vector row relaxation; `src == None` relaxes `dst` in place.
        ///
        /// # Safety
        ///
        /// CPU features as for the tile kernel; `pred` and `src` are at
        /// least as long as `dst`.
        pub(crate) unsafe fn $row(avx512: bool, dst: &mut [$t], pred: &mut [u32], via: $t, src: Option<&[$t]>, k: u32) {
            if avx512 {
                $row512(dst, pred, via, src, k)
            } else {
                $row256(dst, pred, via, src, k)
            }
        }
    };
}

entry_points!(f32, tile_f32, row_f32, 16, 8,
    avx512: (outer_f32_avx512, self_sourced_f32_avx512, col_f32_avx512, row_f32_avx512),
    avx2: (outer_f32_avx2, self_sourced_f32_avx2, col_f32_avx2, row_f32_avx2));
entry_points!(f64, tile_f64, row_f64, 8, 4,
    avx512: (outer_f64_avx512, self_sourced_f64_avx512, col_f64_avx512, row_f64_avx512),
    avx2: (outer_f64_avx2, self_sourced_f64_avx2, col_f64_avx2, row_f64_avx2));

/// Scalar remainder of a row relaxation, `j` in `from..len`.
#[inline(always)]
unsafe fn relax_tail<T: crate::weight::Weight>(
    d: *mut T,
    p: *mut u32,
    via: T,
    s: *const T,
    k: u32,
    from: usize,
    len: usize,
) {
    for j in from..len {
        let cand = via + *s.add(j);
        if cand < *d.add(j) {
            *d.add(j) = cand;
            *p.add(j) = k;
        }
    }
}

// Row relaxations: `d[j] = min(d[j], via + s[j])`, `p[j] = k` on strict
// improvement. `s` may equal `d` (the in-place form). Every store is full
// width so the next step's loads of the same row can forward from it.

#[target_feature(enable = "avx512f,avx512bw,avx512vl,avx512dq")]
#[inline]
unsafe fn relax_f32_avx512(d: *mut f32, p: *mut u32, via: f32, s: *const f32, k: u32, len: usize) {
    let (vv, kv) = (_mm512_set1_ps(via), _mm512_set1_epi32(k as i32));
    let mut j = 0;
    while j + 16 <= len {
        let cur = _mm512_loadu_ps(d.add(j));
        let cand = _mm512_add_ps(vv, _mm512_loadu_ps(s.add(j)));
        let m = _mm512_cmp_ps_mask::<_CMP_LT_OQ>(cand, cur);
        _mm512_storeu_ps(d.add(j), _mm512_mask_mov_ps(cur, m, cand));
        let pj = p.add(j) as *mut __m512i;
        _mm512_storeu_si512(pj, _mm512_mask_mov_epi32(_mm512_loadu_si512(pj), m, kv));
        j += 16;
    }
    relax_tail(d, p, via, s, k, j, len);
}

#[target_feature(enable = "avx512f,avx512bw,avx512vl,avx512dq")]
#[inline]
unsafe fn relax_f64_avx512(d: *mut f64, p: *mut u32, via: f64, s: *const f64, k: u32, len: usize) {
    let (vv, kv) = (_mm512_set1_pd(via), _mm256_set1_epi32(k as i32));
    let mut j = 0;
    while j + 8 <= len {
        let cur = _mm512_loadu_pd(d.add(j));
        let cand = _mm512_add_pd(vv, _mm512_loadu_pd(s.add(j)));
        let m = _mm512_cmp_pd_mask::<_CMP_LT_OQ>(cand, cur);
        _mm512_storeu_pd(d.add(j), _mm512_mask_mov_pd(cur, m, cand));
        let pj = p.add(j) as *mut __m256i;
        _mm256_storeu_si256(pj, _mm256_mask_mov_epi32(_mm256_loadu_si256(pj), m, kv));
        j += 8;
    }
    relax_tail(d, p, via, s, k, j, len);
}

#[target_feature(enable = "avx2,fma")]
#[inline]
unsafe fn relax_f32_avx2(d: *mut f32, p: *mut u32, via: f32, s: *const f32, k: u32, len: usize) {
    let (vv, kv) = (_mm256_set1_ps(via), _mm256_castsi256_ps(_mm256_set1_epi32(k as i32)));
    let mut j = 0;
    while j + 8 <= len {
        let cur = _mm256_loadu_ps(d.add(j));
        let cand = _mm256_add_ps(vv, _mm256_loadu_ps(s.add(j)));
        let m = _mm256_cmp_ps::<_CMP_LT_OQ>(cand, cur);
        _mm256_storeu_ps(d.add(j), _mm256_blendv_ps(cur, cand, m));
        let pj = p.add(j) as *mut f32;
        _mm256_storeu_ps(pj, _mm256_blendv_ps(_mm256_loadu_ps(pj), kv, m));
        j += 8;
    }
    relax_tail(d, p, via, s, k, j, len);
}

#[target_feature(enable = "avx2,fma")]
#[inline]
unsafe fn relax_f64_avx2(d: *mut f64, p: *mut u32, via: f64, s: *const f64, k: u32, len: usize) {
    let (vv, kv) = (_mm256_set1_pd(via), _mm_castsi128_ps(_mm_set1_epi32(k as i32)));
    let narrow = _mm256_setr_epi32(0, 2, 4, 6, 0, 2, 4, 6);
    let mut j = 0;
    while j + 4 <= len {
        let cur = _mm256_loadu_pd(d.add(j));
        let cand = _mm256_add_pd(vv, _mm256_loadu_pd(s.add(j)));
        let m = _mm256_cmp_pd::<_CMP_LT_OQ>(cand, cur);
        _mm256_storeu_pd(d.add(j), _mm256_blendv_pd(cur, cand, m));
        let m32 = _mm256_castps256_ps128(_mm256_permutevar8x32_ps(_mm256_castpd_ps(m), narrow));
        let pj = p.add(j) as *mut f32;
        _mm_storeu_ps(pj, _mm_blendv_ps(_mm_loadu_ps(pj), kv, m32));
        j += 4;
    }
    relax_tail(d, p, via, s, k, j, len);
}

macro_rules! row_kernels {
    ($t:ty, $relax:ident, $row:ident, $self_sourced:ident, $col:ident, $feat:literal) => {
        /// # Safety
        ///
        /// CPU features as the attribute; `src.len() >= dst.len()`,
        /// `pred.len() >= dst.len()`. `src == None` relaxes in place.
        #[target_feature(enable = $feat)]
        unsafe fn $row(dst: &mut [$t], pred: &mut [u32], via: $t, src: Option<&[$t]>, k: u32) {
            let d = dst.as_mut_ptr();
            let s = match src {
                Some(s) => s.as_ptr(),
                None => d as *const $t,
            };
            $relax(d, pred.as_mut_ptr(), via, s, k, dst.len());
        }

        /// PIVOT (`pivot == None`) and ROW tiles: every `kk` step reads row
        /// `kk` of the write tile, so steps run one after another over all rows.
        ///
        /// # Safety
        ///
        /// CPU features as the attribute; all slices hold `tb * tb` elements.
        #[target_feature(enable = $feat)]
        unsafe fn $self_sourced(write: &mut [$t], preds: &mut [u32], pivot: Option<&[$t]>, tb: usize, k_base: u32) {
            let (w, p) = (write.as_mut_ptr(), preds.as_mut_ptr());
            for kk in 0..tb {
                let k = k_base + kk as u32;
                let src = w.add(kk * tb) as *const $t;
                for ii in 0..tb {
                    let via = match pivot {
                        Some(pv) => *pv.get_unchecked(ii * tb + kk),
                        None => *w.add(ii * tb + kk),
                    };
                    // via + x >= x whenever via >= 0
                    if ii == kk && !(via < 0.0) {
                        continue;
                    }
                    $relax(w.add(ii * tb), p.add(ii * tb), via, src, k, tb);
                }
            }
        }

        /// COL tiles: rows evolve independently, each taking `via` from its
        /// own current entry.
        ///
        /// # Safety
        ///
        /// As the self-sourced kernel.
        #[target_feature(enable = $feat)]
        unsafe fn $col(write: &mut [$t], preds: &mut [u32], pivot: &[$t], tb: usize, k_base: u32) {
            let (w, p, pv) = (write.as_mut_ptr(), preds.as_mut_ptr(), pivot.as_ptr());
            for ii in 0..tb {
                let (row, p_row) = (w.add(ii * tb), p.add(ii * tb));
                for kk in 0..tb {
                    $relax(row, p_row, *row.add(kk), pv.add(kk * tb), k_base + kk as u32, tb);
                }
            }
        }
    };
}

row_kernels!(
    f32,
    relax_f32_avx512,
    row_f32_avx512,
    self_sourced_f32_avx512,
    col_f32_avx512,
    "avx512f,avx512bw,avx512vl,avx512dq"
);
row_kernels!(
    f64,
    relax_f64_avx512,
    row_f64_avx512,
    self_sourced_f64_avx512,
    col_f64_avx512,
    "avx512f,avx512bw,avx512vl,avx512dq"
);
row_kernels!(
    f32,
    relax_f32_avx2,
    row_f32_avx2,
    self_sourced_f32_avx2,
    col_f32_avx2,
    "avx2,fma"
);
row_kernels!(
    f64,
    relax_f64_avx2,
    row_f64_avx2,
    self_sourced_f64_avx2,
    col_f64_avx2,
    "avx2,fma"
);

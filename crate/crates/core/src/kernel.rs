//! The min-plus tile update shared by every blocked phase.
//!
//! All kernels use strict improvement: `(i, j)` is rewritten only when
//! `row_src[i][k] + col_src[k][j] < write[i][j]`, and the predecessor entry is
//! set with the same predicate. The `j` loop is a stride-1 compare/select with
//! no data-dependent branch, which LLVM lowers to masked vector blends.
//!
//! The row operand `row_src[i][k]` is read once per `(i, k)` step, before the
//! `j` sweep. This only matters when a diagonal entry is negative.

use crate::weight::Weight;

/// Which blocked phase a tile update belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TileRole {
    /// Phase 1: write tile = row source = column source.
    Pivot,
    /// Phase 2: write tile = column source; the row source is the pivot.
    Row,
    /// Phase 3: write tile = row source; the column source is the pivot.
    Col,
    /// Phase 4: all three tiles distinct.
    Outer,
}

/// Source operands of a tile update. The variant fixes which operands alias
/// the write tile, so a mismatched role cannot be expressed.
#[derive(Debug, Clone, Copy)]
pub enum TileSources<'a, T> {
    Pivot,
    /// `pivot` supplies `row_src[i][k]`.
    Row {
        pivot: &'a [T],
    },
    /// `pivot` supplies `col_src[k][j]`.
    Col {
        pivot: &'a [T],
    },
    Outer {
        row_src: &'a [T],
        col_src: &'a [T],
    },
}

impl<T> TileSources<'_, T> {
    pub fn role(&self) -> TileRole {
        match self {
            TileSources::Pivot => TileRole::Pivot,
            TileSources::Row { .. } => TileRole::Row,
            TileSources::Col { .. } => TileRole::Col,
            TileSources::Outer { .. } => TileRole::Outer,
        }
    }
}

/// Instruction-set level a kernel was compiled for.
///
/// Only [`Isa::baseline`] is safe to construct without knowing the host;
/// the std companion crate detects the running CPU and builds the others.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Isa(IsaLevel);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IsaLevel {
    Baseline,
    Avx2,
    Avx512,
}

impl Isa {
    pub const fn baseline() -> Isa {
        Isa(IsaLevel::Baseline)
    }

    /// Best level enabled at compile time.
    pub const fn compile_time() -> Isa {
        if cfg!(all(
            target_arch = "x86_64",
            target_feature = "avx512f",
            target_feature = "avx512bw",
            target_feature = "avx512vl",
            target_feature = "avx512dq"
        )) {
            Isa(IsaLevel::Avx512)
        } else if cfg!(all(
            target_arch = "x86_64",
            target_feature = "avx2",
            target_feature = "fma"
        )) {
            Isa(IsaLevel::Avx2)
        } else {
            Isa(IsaLevel::Baseline)
        }
    }

    /// # Safety
    ///
    /// The running CPU must support every feature of `level`
    /// (AVX2+FMA, or AVX-512 F/BW/VL/DQ).
    pub const unsafe fn new_unchecked(level: IsaLevel) -> Isa {
        Isa(level)
    }

    pub const fn level(self) -> IsaLevel {
        self.0
    }

    pub const fn name(self) -> &'static str {
        match self.0 {
            IsaLevel::Baseline => "baseline",
            IsaLevel::Avx2 => "avx2",
            IsaLevel::Avx512 => "avx512",
        }
    }
}

impl Default for Isa {
    fn default() -> Self {
        Isa::compile_time()
    }
}

/// `dst[j] = min(dst[j], via + src[j])`, recording `k` where it improves.
#[inline(always)]
fn relax_row_body<T: Weight>(dst: &mut [T], pred: &mut [u32], via: T, src: &[T], k: u32) {
    let len = dst.len();
    let (dst, pred, src) = (&mut dst[..len], &mut pred[..len], &src[..len]);
    for ((d, p), &s) in dst.iter_mut().zip(pred.iter_mut()).zip(src) {
        let cand = via + s;
        let better = cand < *d;
        *d = if better { cand } else { *d };
        *p = if better { k } else { *p };
    }
}

/// In-place form of [`relax_row_body`] where `src` is `dst` itself.
#[inline(always)]
fn relax_row_in_place_body<T: Weight>(dst: &mut [T], pred: &mut [u32], via: T, k: u32) {
    let len = dst.len();
    let (dst, pred) = (&mut dst[..len], &mut pred[..len]);
    for (d, p) in dst.iter_mut().zip(pred.iter_mut()) {
        let cand = via + *d;
        let better = cand < *d;
        *d = if better { cand } else { *d };
        *p = if better { k } else { *p };
    }
}

/// Splits out a mutable row `a` and a shared row `b` of a `tb`-wide tile.
#[inline(always)]
fn row_pair<T>(tile: &mut [T], tb: usize, a: usize, b: usize) -> (&mut [T], &[T]) {
    debug_assert_ne!(a, b);
    if a < b {
        let (lo, hi) = tile.split_at_mut(b * tb);
        (&mut lo[a * tb..(a + 1) * tb], &hi[..tb])
    } else {
        let (lo, hi) = tile.split_at_mut(a * tb);
        (&mut hi[..tb], &lo[b * tb..(b + 1) * tb])
    }
}

/// One `kk` step over a tile whose column source is the write tile itself
/// (PIVOT and ROW roles). `via_of(ii)` returns `row_src[ii][kk]`.
#[inline(always)]
fn self_sourced_step<T: Weight>(
    write: &mut [T],
    preds: &mut [u32],
    tb: usize,
    kk: usize,
    k: u32,
    via_of: impl Fn(&[T], usize) -> T,
) {
    for ii in 0..tb {
        let via = via_of(write, ii);
        let p_row = &mut preds[ii * tb..(ii + 1) * tb];
        if ii == kk {
            // via + x >= x whenever via >= 0, so the step is a no-op
            if via < T::ZERO {
                relax_row_in_place_body(&mut write[kk * tb..(kk + 1) * tb], p_row, via, k);
            }
        } else {
            let (dst, src) = row_pair(write, tb, ii, kk);
            relax_row_body(dst, p_row, via, src, k);
        }
    }
}

/// OUTER (and COL) update with the write row held in local arrays across the
/// whole `kk` sweep. `TB` is the tile edge; `SELF` takes `via` from the
/// write tile itself (COL) rather than from `row_src` (OUTER).
#[inline(always)]
fn row_blocked_fixed<T: Weight, const TB: usize, const SELF: bool>(
    write: &mut [T],
    preds: &mut [u32],
    row_src: &[T],
    col_src: &[T],
    k_base: u32,
) {
    let col_src = &col_src[..TB * TB];
    let row_src = if SELF { &[][..] } else { &row_src[..TB * TB] };
    for ii in 0..TB {
        let w_row: &mut [T; TB] = (&mut write[ii * TB..(ii + 1) * TB]).try_into().unwrap();
        let p_row: &mut [u32; TB] = (&mut preds[ii * TB..(ii + 1) * TB]).try_into().unwrap();
        let mut acc_d = *w_row;
        let mut acc_p = *p_row;
        for kk in 0..TB {
            let via = if SELF { acc_d[kk] } else { row_src[ii * TB + kk] };
            let k = k_base + kk as u32;
            let src: &[T; TB] = (&col_src[kk * TB..(kk + 1) * TB]).try_into().unwrap();
            for jj in 0..TB {
                let cand = via + src[jj];
                let better = cand < acc_d[jj];
                acc_d[jj] = if better { cand } else { acc_d[jj] };
                acc_p[jj] = if better { k } else { acc_p[jj] };
            }
        }
        *w_row = acc_d;
        *p_row = acc_p;
    }
}

/// Runtime-`tb` version of [`row_blocked_fixed`].
#[inline(always)]
fn row_blocked_dyn<T: Weight>(
    write: &mut [T],
    preds: &mut [u32],
    row_src: Option<&[T]>,
    col_src: &[T],
    tb: usize,
    k_base: u32,
) {
    for ii in 0..tb {
        let w_row = &mut write[ii * tb..(ii + 1) * tb];
        let p_row = &mut preds[ii * tb..(ii + 1) * tb];
        for kk in 0..tb {
            let via = match row_src {
                Some(src) => src[ii * tb + kk],
                None => w_row[kk],
            };
            relax_row_body(w_row, p_row, via, &col_src[kk * tb..(kk + 1) * tb], k_base + kk as u32);
        }
    }
}

#[inline(always)]
fn row_blocked<T: Weight>(
    write: &mut [T],
    preds: &mut [u32],
    row_src: Option<&[T]>,
    col_src: &[T],
    tb: usize,
    k_base: u32,
) {
    macro_rules! fixed {
        ($tb:literal) => {
            match row_src {
                Some(r) => row_blocked_fixed::<T, $tb, false>(write, preds, r, col_src, k_base),
                None => row_blocked_fixed::<T, $tb, true>(write, preds, &[], col_src, k_base),
            }
        };
    }
    match tb {
        8 => fixed!(8),
        16 => fixed!(16),
        32 => fixed!(32),
        64 => fixed!(64),
        128 => fixed!(128),
        _ => row_blocked_dyn(write, preds, row_src, col_src, tb, k_base),
    }
}

#[inline(always)]
fn tile_update_body<T: Weight>(
    write: &mut [T],
    preds: &mut [u32],
    sources: TileSources<'_, T>,
    tb: usize,
    k_base: u32,
) {
    let len = tb * tb;
    assert!(
        write.len() >= len && preds.len() >= len,
        "tile buffers shorter than tb*tb"
    );
    let (write, preds) = (&mut write[..len], &mut preds[..len]);
    match sources {
        TileSources::Pivot => {
            for kk in 0..tb {
                self_sourced_step(write, preds, tb, kk, k_base + kk as u32, |w, ii| w[ii * tb + kk]);
            }
        }
        TileSources::Row { pivot } => {
            let pivot = &pivot[..len];
            for kk in 0..tb {
                self_sourced_step(write, preds, tb, kk, k_base + kk as u32, |_, ii| pivot[ii * tb + kk]);
            }
        }
        // Row ii of the write tile evolves independently of every other row,
        // so the kk loop can move inside the ii loop.
        TileSources::Col { pivot } => row_blocked(write, preds, None, &pivot[..len], tb, k_base),
        TileSources::Outer { row_src, col_src } => {
            row_blocked(write, preds, Some(&row_src[..len]), &col_src[..len], tb, k_base)
        }
    }
}

macro_rules! multiversion {
    ($baseline:ident, $avx2:ident, $avx512:ident, $body:ident, ($($arg:ident: $ty:ty),*)) => {
        #[inline(never)]
        fn $baseline<T: Weight>($($arg: $ty),*) {
            $body($($arg),*)
        }

        #[cfg(target_arch = "x86_64")]
        #[target_feature(enable = "avx2,fma")]
        #[inline(never)]
        unsafe fn $avx2<T: Weight>($($arg: $ty),*) {
            $body($($arg),*)
        }

        #[cfg(target_arch = "x86_64")]
        #[target_feature(enable = "avx512f,avx512bw,avx512vl,avx512dq")]
        #[inline(never)]
        unsafe fn $avx512<T: Weight>($($arg: $ty),*) {
            $body($($arg),*)
        }
    };
}

multiversion!(
    tile_update_baseline,
    tile_update_avx2,
    tile_update_avx512,
    tile_update_body,
    (write: &mut [T], preds: &mut [u32], sources: TileSources<'_, T>, tb: usize, k_base: u32)
);

multiversion!(
    relax_row_baseline,
    relax_row_avx2,
    relax_row_avx512,
    relax_row_body,
    (dst: &mut [T], pred: &mut [u32], via: T, src: &[T], k: u32)
);

multiversion!(
    relax_row_in_place_baseline,
    relax_row_in_place_avx2,
    relax_row_in_place_avx512,
    relax_row_in_place_body,
    (dst: &mut [T], pred: &mut [u32], via: T, k: u32)
);

/// Runs the `kk = 0..tb` min-plus sweep of one `tb x tb` tile in place.
///
/// `write` and `preds` are the tile's distances and predecessors in
/// row-major order (length `tb * tb`); `k_base` is the global index of the
/// tile's first intermediate vertex. Improved entries get predecessor
/// `k_base + kk`.
pub fn tile_update<T: Weight>(write: &mut [T], preds: &mut [u32], sources: TileSources<'_, T>, tb: usize, k_base: u32) {
    tile_update_with(Isa::default(), write, preds, sources, tb, k_base)
}

/// [`tile_update`] compiled for a specific instruction set.
pub fn tile_update_with<T: Weight>(
    isa: Isa,
    write: &mut [T],
    preds: &mut [u32],
    sources: TileSources<'_, T>,
    tb: usize,
    k_base: u32,
) {
    if T::tile_simd(isa, write, preds, sources, tb, k_base) {
        return;
    }
    match isa.0 {
        // SAFETY: an Isa above baseline is only constructed for a CPU that has the features.
        #[cfg(target_arch = "x86_64")]
        IsaLevel::Avx512 => unsafe { tile_update_avx512(write, preds, sources, tb, k_base) },
        #[cfg(target_arch = "x86_64")]
        IsaLevel::Avx2 => unsafe { tile_update_avx2(write, preds, sources, tb, k_base) },
        _ => tile_update_baseline(write, preds, sources, tb, k_base),
    }
}

/// `dst[j] = min(dst[j], via + src[j])` with predecessor `k` on improvement.
pub fn relax_row<T: Weight>(isa: Isa, dst: &mut [T], pred: &mut [u32], via: T, src: &[T], k: u32) {
    assert!(pred.len() >= dst.len() && src.len() >= dst.len());
    if T::relax_simd(isa, dst, pred, via, Some(src), k) {
        return;
    }
    match isa.0 {
        // SAFETY: see tile_update_with.
        #[cfg(target_arch = "x86_64")]
        IsaLevel::Avx512 => unsafe { relax_row_avx512(dst, pred, via, src, k) },
        #[cfg(target_arch = "x86_64")]
        IsaLevel::Avx2 => unsafe { relax_row_avx2(dst, pred, via, src, k) },
        _ => relax_row_baseline(dst, pred, via, src, k),
    }
}

/// `dst[j] = min(dst[j], via + dst[j])` with predecessor `k` on improvement.
pub fn relax_row_in_place<T: Weight>(isa: Isa, dst: &mut [T], pred: &mut [u32], via: T, k: u32) {
    assert!(pred.len() >= dst.len());
    if T::relax_simd(isa, dst, pred, via, None, k) {
        return;
    }
    match isa.0 {
        // SAFETY: see tile_update_with.
        #[cfg(target_arch = "x86_64")]
        IsaLevel::Avx512 => unsafe { relax_row_in_place_avx512(dst, pred, via, k) },
        #[cfg(target_arch = "x86_64")]
        IsaLevel::Avx2 => unsafe { relax_row_in_place_avx2(dst, pred, via, k) },
        _ => relax_row_in_place_baseline(dst, pred, via, k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::NO_PREDECESSOR;
    use alloc::vec;
    use alloc::vec::Vec;

    const INF: f64 = f64::INFINITY;
    const NONE: u32 = NO_PREDECESSOR;

    fn host_isas() -> Vec<Isa> {
        let mut isas = vec![Isa::baseline()];
        #[cfg(target_arch = "x86_64")]
        {
            if std::is_x86_feature_detected!("avx2") && std::is_x86_feature_detected!("fma") {
                isas.push(unsafe { Isa::new_unchecked(IsaLevel::Avx2) });
            }
            if std::is_x86_feature_detected!("avx512f")
                && std::is_x86_feature_detected!("avx512bw")
                && std::is_x86_feature_detected!("avx512vl")
                && std::is_x86_feature_detected!("avx512dq")
            {
                isas.push(unsafe { Isa::new_unchecked(IsaLevel::Avx512) });
            }
        }
        isas
    }

    /// Scalar min-plus oracle: sequential kk, explicit branch, no aliasing.
    fn outer_oracle(write: &[f64], row_src: &[f64], col_src: &[f64], tb: usize, k_base: u32) -> (Vec<f64>, Vec<u32>) {
        let mut w = write.to_vec();
        let mut p = vec![NONE; tb * tb];
        for kk in 0..tb {
            for ii in 0..tb {
                for jj in 0..tb {
                    let cand = row_src[ii * tb + kk] + col_src[kk * tb + jj];
                    if cand < w[ii * tb + jj] {
                        w[ii * tb + jj] = cand;
                        p[ii * tb + jj] = k_base + kk as u32;
                    }
                }
            }
        }
        (w, p)
    }

    #[test]
    fn outer_two_by_two() {
        // oracle: (0,0) min(9, 1+5, 4+1) = 5 via kk=1; (0,1) min(9, 1+1, 4+5) = 2 via 0;
        // (1,0) min(9, 2+5, 3+1) = 4 via 1; (1,1) min(9, 2+1, 3+5) = 3 via 0
        let row_src = [1.0, 4.0, 2.0, 3.0];
        let col_src = [5.0, 1.0, 1.0, 5.0];
        let (ow, op) = outer_oracle(&[9.0; 4], &row_src, &col_src, 2, 0);
        assert_eq!(ow, [5.0, 2.0, 4.0, 3.0]);
        assert_eq!(op, [1, 0, 1, 0]);

        let mut write = [9.0; 4];
        let mut preds = [NONE; 4];
        tile_update(
            &mut write,
            &mut preds,
            TileSources::Outer {
                row_src: &row_src,
                col_src: &col_src,
            },
            2,
            0,
        );
        assert_eq!(write, [5.0, 2.0, 4.0, 3.0]);
        assert_eq!(preds, [1, 0, 1, 0]);
    }

    #[test]
    fn outer_all_infinite_sources_is_noop() {
        let tb = 4;
        let mut write: Vec<f32> = (0..16).map(|v| v as f32).collect();
        write[3] = f32::INFINITY;
        let before = write.clone();
        let mut preds = vec![NONE; 16];
        let inf = vec![f32::INFINITY; 16];
        tile_update(
            &mut write,
            &mut preds,
            TileSources::Outer {
                row_src: &inf,
                col_src: &inf,
            },
            tb,
            8,
        );
        assert_eq!(write, before);
        assert!(preds.iter().all(|&p| p == NONE));
    }

    #[test]
    fn pivot_three_vertex_example() {
        let mut write = [0.0, 5.0, INF, INF, 0.0, 2.0, 1.0, INF, 0.0];
        let mut preds = [NONE; 9];
        tile_update(&mut write, &mut preds, TileSources::Pivot, 3, 0);
        assert_eq!(write, [0.0, 5.0, 7.0, 3.0, 0.0, 2.0, 1.0, 6.0, 0.0]);
        assert_eq!(preds, [NONE, NONE, 1, 2, NONE, NONE, NONE, 0, NONE]);
    }

    fn pseudo_random_tile(tb: usize, seed: u64) -> Vec<f64> {
        let mut state = seed;
        (0..tb * tb)
            .map(|idx| {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                let r = (state >> 33) % 100;
                if idx % (tb + 1) == 0 {
                    0.0
                } else if r < 30 {
                    INF
                } else {
                    (r + 1) as f64
                }
            })
            .collect()
    }

    #[test]
    fn fixed_and_dynamic_outer_paths_match_oracle() {
        for tb in [3usize, 8, 16, 32, 64] {
            let write = pseudo_random_tile(tb, 1);
            let row_src = pseudo_random_tile(tb, 2);
            let col_src = pseudo_random_tile(tb, 3);
            let (ow, op) = outer_oracle(&write, &row_src, &col_src, tb, 100);
            for isa in host_isas() {
                let mut w = write.clone();
                let mut p = vec![NONE; tb * tb];
                tile_update_with(
                    isa,
                    &mut w,
                    &mut p,
                    TileSources::Outer {
                        row_src: &row_src,
                        col_src: &col_src,
                    },
                    tb,
                    100,
                );
                assert_eq!(w, ow, "tb = {tb}");
                assert_eq!(p, op, "tb = {tb}");
            }
        }
    }

    /// Sequential reference for every role: kk outer, ii, jj, with the row
    /// operand read once per (ii, kk) from the aliased buffer.
    fn role_oracle(role: TileRole, write: &mut [f64], preds: &mut [u32], pivot: &[f64], tb: usize, k_base: u32) {
        for kk in 0..tb {
            for ii in 0..tb {
                let via = match role {
                    TileRole::Row => pivot[ii * tb + kk],
                    _ => write[ii * tb + kk],
                };
                for jj in 0..tb {
                    let c = match role {
                        TileRole::Col => pivot[kk * tb + jj],
                        _ => write[kk * tb + jj],
                    };
                    if via + c < write[ii * tb + jj] {
                        write[ii * tb + jj] = via + c;
                        preds[ii * tb + jj] = k_base + kk as u32;
                    }
                }
            }
        }
    }

    #[test]
    fn aliased_roles_match_sequential_reference() {
        for tb in [5usize, 16, 32] {
            let mut pivot = pseudo_random_tile(tb, 10);
            let mut pivot_preds = vec![NONE; tb * tb];
            role_oracle(TileRole::Pivot, &mut pivot, &mut pivot_preds, &[], tb, 0);
            let base = pseudo_random_tile(tb, 11);
            for role in [TileRole::Row, TileRole::Col] {
                let mut expected = base.clone();
                let mut expected_p = vec![NONE; tb * tb];
                role_oracle(role, &mut expected, &mut expected_p, &pivot, tb, 7);
                let mut w = base.clone();
                let mut p = vec![NONE; tb * tb];
                let sources = match role {
                    TileRole::Row => TileSources::Row { pivot: &pivot },
                    _ => TileSources::Col { pivot: &pivot },
                };
                tile_update(&mut w, &mut p, sources, tb, 7);
                assert_eq!(w, expected, "{role:?} tb = {tb}");
                assert_eq!(p, expected_p, "{role:?} tb = {tb}");
            }
        }
    }

    #[test]
    fn negative_diagonal_follows_sequential_reference() {
        let tb = 4;
        let mut base = pseudo_random_tile(tb, 21);
        base[tb + 2] = -3.0;
        base[2 * tb + 1] = 1.0;
        let mut expected = base.clone();
        let mut expected_p = vec![NONE; tb * tb];
        role_oracle(TileRole::Pivot, &mut expected, &mut expected_p, &[], tb, 0);
        let mut w = base.clone();
        let mut p = vec![NONE; tb * tb];
        tile_update(&mut w, &mut p, TileSources::Pivot, tb, 0);
        assert_eq!(w, expected);
        assert_eq!(p, expected_p);
        assert!(w[tb + 1] < 0.0);
    }

    #[test]
    fn relax_row_dispatch_agrees() {
        let src: Vec<f32> = (0..37).map(|v| (v % 7) as f32).collect();
        let start: Vec<f32> = (0..37).map(|v| ((v * 5) % 11) as f32).collect();
        let mut a = start.clone();
        let mut pa = vec![NONE; 37];
        relax_row(Isa::baseline(), &mut a, &mut pa, 2.0, &src, 4);
        for isa in host_isas() {
            let mut b = start.clone();
            let mut pb = vec![NONE; 37];
            relax_row(isa, &mut b, &mut pb, 2.0, &src, 4);
            assert_eq!(a, b);
            assert_eq!(pa, pb);
        }
        for j in 0..37 {
            let expect = start[j].min(2.0 + src[j]);
            assert_eq!(a[j], expect);
            assert_eq!(pa[j] == 4, 2.0 + src[j] < start[j]);
        }
    }

    fn with_negative_entries(mut tile: Vec<f64>, tb: usize) -> Vec<f64> {
        for i in 0..tb {
            tile[i * tb + (i * 3 + 1) % tb] = -2.0;
        }
        tile[(tb / 2) * (tb + 1)] = -1.0;
        tile
    }

    #[test]
    fn every_isa_matches_sequential_reference_for_every_role() {
        for tb in [1usize, 4, 5, 8, 16, 24, 32, 64] {
            let pivot = with_negative_entries(pseudo_random_tile(tb, 30), tb);
            let other = pseudo_random_tile(tb, 31);
            let base = with_negative_entries(pseudo_random_tile(tb, 32), tb);
            for role in [TileRole::Pivot, TileRole::Row, TileRole::Col, TileRole::Outer] {
                let mut expected = base.clone();
                let mut expected_p = vec![NONE; tb * tb];
                if role == TileRole::Outer {
                    (expected, expected_p) = outer_oracle(&base, &other, &pivot, tb, 3);
                } else {
                    role_oracle(role, &mut expected, &mut expected_p, &pivot, tb, 3);
                }
                let expected32: Vec<f32> = expected.iter().map(|&v| v as f32).collect();
                let (base32, pivot32, other32): (Vec<f32>, Vec<f32>, Vec<f32>) = (
                    base.iter().map(|&v| v as f32).collect(),
                    pivot.iter().map(|&v| v as f32).collect(),
                    other.iter().map(|&v| v as f32).collect(),
                );
                for isa in host_isas() {
                    let mut w = base.clone();
                    let mut p = vec![NONE; tb * tb];
                    let sources = match role {
                        TileRole::Pivot => TileSources::Pivot,
                        TileRole::Row => TileSources::Row { pivot: &pivot },
                        TileRole::Col => TileSources::Col { pivot: &pivot },
                        TileRole::Outer => TileSources::Outer {
                            row_src: &other,
                            col_src: &pivot,
                        },
                    };
                    tile_update_with(isa, &mut w, &mut p, sources, tb, 3);
                    assert_eq!(w, expected, "f64 {role:?} tb={tb} {isa:?}");
                    assert_eq!(p, expected_p, "f64 {role:?} tb={tb} {isa:?}");

                    // small integers, so f32 arithmetic is exact too
                    let mut w = base32.clone();
                    let mut p = vec![NONE; tb * tb];
                    let sources = match role {
                        TileRole::Pivot => TileSources::Pivot,
                        TileRole::Row => TileSources::Row { pivot: &pivot32 },
                        TileRole::Col => TileSources::Col { pivot: &pivot32 },
                        TileRole::Outer => TileSources::Outer {
                            row_src: &other32,
                            col_src: &pivot32,
                        },
                    };
                    tile_update_with(isa, &mut w, &mut p, sources, tb, 3);
                    assert_eq!(w, expected32, "f32 {role:?} tb={tb} {isa:?}");
                    assert_eq!(p, expected_p, "f32 {role:?} tb={tb} {isa:?}");
                }
            }
        }
    }

    #[test]
    fn in_place_relax_matches_across_isas() {
        let start: Vec<f64> = (0..29).map(|v| ((v * 5) % 11) as f64 - 3.0).collect();
        for isa in host_isas() {
            let mut d = start.clone();
            let mut p = vec![NONE; 29];
            relax_row_in_place(isa, &mut d, &mut p, -1.5, 9);
            for j in 0..29 {
                assert_eq!(d[j], start[j] - 1.5, "{isa:?}");
                assert_eq!(p[j], 9);
            }
            let mut d = start.clone();
            relax_row_in_place(isa, &mut d, &mut p, 0.0, 10);
            assert_eq!(d, start);
            assert!(p.iter().all(|&k| k == 9));
        }
    }
}

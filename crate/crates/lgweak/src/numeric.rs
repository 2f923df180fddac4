//! Deterministic reduction and serialization helpers shared by every module.
//!
//! All grid-wide sums go through the fixed pairwise tree in this module, so a
//! reduction's result depends only on the element order, never on chunking or
//! thread count.

use num_complex::Complex64;

/// Below this length a range is summed sequentially instead of split.
const PAIRWISE_LEAF: usize = 16;

/// Sum `f(i)` for `i` in `[lo, hi)` with a fixed binary splitting tree.
pub fn pairwise_map_sum<F>(lo: usize, hi: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64,
{
    let len = hi - lo;
    if len <= PAIRWISE_LEAF {
        let mut acc = 0.0;
        for i in lo..hi {
            acc += f(i);
        }
        acc
    } else {
        let mid = lo + len / 2;
        pairwise_map_sum(lo, mid, f) + pairwise_map_sum(mid, hi, f)
    }
}

/// Complex-valued variant of [`pairwise_map_sum`], same tree shape.
pub fn pairwise_map_sum_complex<F>(lo: usize, hi: usize, f: &F) -> Complex64
where
    F: Fn(usize) -> Complex64,
{
    let len = hi - lo;
    if len <= PAIRWISE_LEAF {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in lo..hi {
            acc += f(i);
        }
        acc
    } else {
        let mid = lo + len / 2;
        pairwise_map_sum_complex(lo, mid, f) + pairwise_map_sum_complex(mid, hi, f)
    }
}

/// Pairwise sum of a real slice.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    pairwise_map_sum(0, xs.len(), &|i| xs[i])
}

/// Pairwise sum of a complex slice.
pub fn pairwise_sum_complex(xs: &[Complex64]) -> Complex64 {
    pairwise_map_sum_complex(0, xs.len(), &|i| xs[i])
}

/// Format a float with 17 significant digits, enough to round-trip any f64.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serde adapter storing a `Complex64` as a two-element `[re, im]` array.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [c.re, c.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Optional-complex variant of [`complex_pair`].
pub mod complex_pair_opt {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &Option<Complex64>, s: S) -> Result<S::Ok, S::Error> {
        c.map(|z| [z.re, z.im]).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Complex64>, D::Error> {
        let pair = <Option<[f64; 2]>>::deserialize(d)?;
        Ok(pair.map(|[re, im]| Complex64::new(re, im)))
    }
}

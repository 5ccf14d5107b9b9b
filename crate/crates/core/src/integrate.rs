//! Quadrature over the real line for integrands of the form `f(x)·e^{−2g(x)}`,
//! where `g` is even about a centre ξ and grows without bound.
//!
//! The weight is folded onto `[0, R]`: the integrand becomes
//! `[f(ξ+t) + f(ξ−t)]·e^{−2g(ξ+t)}`, which makes odd moments vanish exactly and
//! keeps ξ as a mandatory breakpoint. `R` is picked so the discarded tail of any
//! polynomial moment up to the configured degree is below `abs_tol`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and budget for [`integrate_weighted`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// Highest polynomial degree expected in `f`; enters the truncation radius.
    pub degree_hint: u32,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
            degree_hint: 40,
        }
    }
}

impl QuadratureSettings {
    pub fn validated(self) -> Result<Self> {
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::Config("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions < 16 {
            return Err(Error::Config("max_subdivisions must be at least 16".into()));
        }
        Ok(self)
    }
}

/// Decay exponent `g` of the weight `e^{−2g}`.
pub trait Decay {
    fn g(&self, x: f64) -> f64;

    /// Point of symmetry of `g`.
    fn center(&self) -> f64 {
        0.0
    }
}

impl<F: Fn(f64) -> f64> Decay for F {
    fn g(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Decay function centred away from the origin.
pub struct Centered<F> {
    pub g: F,
    pub center: f64,
}

impl<F: Fn(f64) -> f64> Decay for Centered<F> {
    fn g(&self, x: f64) -> f64 {
        (self.g)(x)
    }

    fn center(&self) -> f64 {
        self.center
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// `∫ f(x)·e^{−2g(x)} dx` over the whole line.
pub fn integrate_weighted<F, D>(f: F, decay: &D, settings: &QuadratureSettings) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
    D: Decay + ?Sized,
{
    let xi = decay.center();
    let radius = truncation_radius(decay, settings);
    let folded = |t: f64| {
        let w = (-2.0 * decay.g(xi + t)).exp();
        if w == 0.0 {
            return 0.0;
        }
        (f(xi + t) + f(xi - t)) * w
    };
    adaptive(folded, 0.0, radius, settings, 8)
}

/// Radius `R` (measured from the centre) with
/// `2g(ξ+R) ≥ −ln(abs_tol) + (d+2)·ln(max(R, 1)) + 20`, `d` the degree hint.
pub fn truncation_radius<D: Decay + ?Sized>(decay: &D, settings: &QuadratureSettings) -> f64 {
    let xi = decay.center();
    let rhs = |r: f64| {
        -settings.abs_tol.ln() + (settings.degree_hint as f64 + 2.0) * r.max(1.0).ln() + 20.0
    };
    let ok = |r: f64| 2.0 * decay.g(xi + r) >= rhs(r);
    let (mut lo, mut hi);
    if ok(1.0) {
        hi = 1.0;
        lo = 0.5;
        while ok(lo) && lo > 1e-300 {
            hi = lo;
            lo *= 0.5;
        }
    } else {
        lo = 1.0;
        hi = 2.0;
        while !ok(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return hi;
            }
        }
    }
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-3 * hi {
            break;
        }
    }
    hi
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, settings: &QuadratureSettings) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    adaptive(f, a, b, settings, 1)
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

fn adaptive<F>(f: F, a: f64, b: f64, settings: &QuadratureSettings, initial: usize) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    let mut panels = Vec::with_capacity(64);
    let width = (b - a) / initial as f64;
    for k in 0..initial {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == initial { b } else { lo + width };
        let (value, error, abs) = kronrod21(&f, lo, hi)?;
        panels.push(Panel { a: lo, b: hi, value, error, abs });
    }
    let mut subdivisions = 0;
    loop {
        let value = compensated_sum(panels.iter().map(|p| p.value));
        let error = compensated_sum(panels.iter().map(|p| p.error));
        // cancelling integrands cannot beat the rounding floor of ∫|f|
        let floor = 100.0 * f64::EPSILON * compensated_sum(panels.iter().map(|p| p.abs));
        let target = (settings.rel_tol * value.abs()).max(settings.abs_tol).max(floor);
        if error <= target {
            return Ok(Estimate { value, error });
        }
        if subdivisions >= settings.max_subdivisions {
            return Err(Error::NoConvergence {
                subdivisions,
                estimate: value,
                error,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // interval cannot be split further in double precision
            return Err(Error::NoConvergence {
                subdivisions,
                estimate: value,
                error,
            });
        }
        let (lv, le, la) = kronrod21(&f, p.a, mid)?;
        let (rv, re, ra) = kronrod21(&f, mid, p.b)?;
        panels.push(Panel { a: p.a, b: mid, value: lv, error: le, abs: la });
        panels.push(Panel { a: mid, b: p.b, value: rv, error: re, abs: ra });
        subdivisions += 1;
    }
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(items: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in items {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// 10-point Gauss–Legendre rule on `[a, b]` (the Gauss half of the Kronrod pair).
pub fn gauss10<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut sum = 0.0;
    for (j, w) in WG.iter().enumerate() {
        let dx = h * XGK[2 * j + 1];
        sum += w * (f(c - dx) + f(c + dx));
    }
    sum * h
}

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<(f64, f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand(x))
        }
    };
    let fc = eval(c)?;
    let mut res_k = WGK[10] * fc;
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = eval(c - dx)?;
        let f2 = eval(c + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * h;
    let res_abs = res_abs * h.abs();
    let res_asc = res_asc * h.abs();
    let mut err = ((res_k - res_g) * h).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok((value, err, res_abs))
}

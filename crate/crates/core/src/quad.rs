//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Integrals over `[a, ∞)` are mapped onto `[0, 1)` with
//! `x = a + scale · t / (1 - t)` before subdivision. Known kinks of the
//! integrand can be passed as breakpoints so that no panel straddles them.

use alloc::vec::Vec;
use libm::fabs;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the per-panel `|K15 - G7|` estimates.
    pub error: f64,
    pub panels: usize,
}

impl Quadrature {
    pub fn converged(&self, tol: f64) -> bool {
        self.error <= tol && self.value.is_finite()
    }
}

impl core::ops::Add for Quadrature {
    type Output = Quadrature;

    fn add(self, rhs: Quadrature) -> Quadrature {
        Quadrature {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
            panels: self.panels + rhs.panels,
        }
    }
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: fabs((kronrod - gauss) * half),
    }
}

/// Integrate `f` over the finite interval `[a, b]` until the summed error
/// estimate drops below `tol` or `max_panels` panels are in use.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_panels: usize) -> Quadrature {
    integrate_with_breaks(&f, &[a, b], tol, max_panels)
}

/// Integrate over consecutive intervals `[breaks[i], breaks[i + 1]]`.
///
/// `breaks` must be sorted ascending. Empty intervals are skipped.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(
    f: &F,
    breaks: &[f64],
    tol: f64,
    max_panels: usize,
) -> Quadrature {
    let mut panels: Vec<Panel> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod(f, w[0], w[1]))
        .collect();
    if panels.is_empty() {
        return Quadrature { value: 0.0, error: 0.0, panels: 0 };
    }
    loop {
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= tol || panels.len() >= max_panels {
            break;
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|l, r| l.1.error.total_cmp(&r.1.error))
            .expect("non-empty");
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        // Panel too narrow to split in floating point.
        if !(mid > p.a && mid < p.b) {
            break;
        }
        panels[worst] = kronrod(f, p.a, mid);
        panels.push(kronrod(f, mid, p.b));
    }
    Quadrature {
        value: panels.iter().map(|p| p.value).sum(),
        error: panels.iter().map(|p| p.error).sum(),
        panels: panels.len(),
    }
}

/// Integrate `f` over `[a, ∞)`. `scale` sets the length unit of the
/// `t / (1 - t)` map and should be comparable to where `f` decays.
///
/// Breakpoints above `a` (finite ones only) are honoured after mapping.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    scale: f64,
    breaks: &[f64],
    tol: f64,
    max_panels: usize,
) -> Quadrature {
    let mapped = |t: f64| {
        let s = 1.0 - t;
        let x = a + scale * t / s;
        let y = f(x);
        if y == 0.0 {
            0.0
        } else {
            y * scale / (s * s)
        }
    };
    let mut ts: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    ts.push(0.0);
    for &b in breaks {
        if b > a && b.is_finite() {
            let u = (b - a) / scale;
            ts.push(u / (1.0 + u));
        }
    }
    ts.push(1.0);
    ts.sort_by(f64::total_cmp);
    integrate_with_breaks(&mapped, &ts, tol, max_panels)
}

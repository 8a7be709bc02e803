//! Fixed quadrature rules shared by assembly, norms and time integration.

/// Five-point Gauss–Legendre nodes on [-1, 1].
const GAUSS5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];

const GAUSS5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Gauss-5 points and weights mapped to `[a, b]` (exact for degree 9).
pub fn gauss5(a: f64, b: f64) -> [(f64, f64); 5] {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 5];
    for (o, (x, w)) in out.iter_mut().zip(GAUSS5_NODES.iter().zip(GAUSS5_WEIGHTS)) {
        *o = (mid + half * x, half * w);
    }
    out
}

/// Integrates `f` over `[a, b]` with a single Gauss-5 panel.
pub fn integrate_gauss5(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    gauss5(a, b).iter().map(|&(t, w)| w * f(t)).sum()
}

/// Simpson's rule on `[a, b]`, exact for quadratics.
pub fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// A point of the 7-point degree-5 triangle rule: barycentric coordinates and
/// weight relative to the triangle area.
#[derive(Debug, Clone, Copy)]
pub struct TriPoint {
    pub bary: [f64; 3],
    pub weight: f64,
}

/// Seven-point degree-5 rule on a triangle; weights sum to one.
pub fn triangle7() -> [TriPoint; 7] {
    let s15 = 15f64.sqrt();
    let a1 = (6.0 - s15) / 21.0;
    let b1 = 1.0 - 2.0 * a1;
    let w1 = (155.0 - s15) / 1200.0;
    let a2 = (6.0 + s15) / 21.0;
    let b2 = 1.0 - 2.0 * a2;
    let w2 = (155.0 + s15) / 1200.0;
    let c = 1.0 / 3.0;
    [
        TriPoint { bary: [c, c, c], weight: 9.0 / 40.0 },
        TriPoint { bary: [b1, a1, a1], weight: w1 },
        TriPoint { bary: [a1, b1, a1], weight: w1 },
        TriPoint { bary: [a1, a1, b1], weight: w1 },
        TriPoint { bary: [b2, a2, a2], weight: w2 },
        TriPoint { bary: [a2, b2, a2], weight: w2 },
        TriPoint { bary: [a2, a2, b2], weight: w2 },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss5_is_exact_for_degree_nine() {
        let v = integrate_gauss5(0.0, 2.0, |t| t.powi(9));
        assert!((v - 2f64.powi(10) / 10.0).abs() < 1e-11);
        let w: f64 = gauss5(-1.0, 1.0).iter().map(|p| p.1).sum();
        assert!((w - 2.0).abs() < 1e-15);
    }

    #[test]
    fn triangle_rule_integrates_quintics() {
        // reference triangle (0,0),(1,0),(0,1), area 1/2; int x^2 y^3 = 2!3!/7! = 1/420
        let pts = triangle7();
        let total: f64 = pts.iter().map(|p| p.weight).sum();
        assert!((total - 1.0).abs() < 1e-15);
        let v: f64 = pts
            .iter()
            .map(|p| {
                let (x, y) = (p.bary[1], p.bary[2]);
                0.5 * p.weight * x * x * y.powi(3)
            })
            .sum();
        assert!((v - 1.0 / 420.0).abs() < 1e-15);
    }
}

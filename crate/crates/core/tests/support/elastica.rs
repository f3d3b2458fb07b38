//! Inextensible elastica of a clamped cantilever under a dead tip load
//! perpendicular to its undeformed axis, solved by shooting.
//!
//! With arc length and coordinates scaled by L and `θ` the slope measured
//! toward the load, `θ'' = −α·cos θ` for `α = F·L²/(EI)`, with `θ(0) = 0`
//! and a moment-free tip `θ'(1) = 0`. The root curvature `k = θ'(0)` is
//! found by bisection on `θ'(1)`.

const STEPS: usize = 4000;

/// Integrates `(θ, θ', x, y)` from the root with RK4.
fn integrate(alpha: f64, k: f64) -> [f64; 4] {
    let f = |s: [f64; 4]| [s[1], -alpha * s[0].cos(), s[0].cos(), s[0].sin()];
    let h = 1.0 / STEPS as f64;
    let mut s = [0.0, k, 0.0, 0.0];
    let add = |a: [f64; 4], b: [f64; 4], t: f64| {
        [
            a[0] + t * b[0],
            a[1] + t * b[1],
            a[2] + t * b[2],
            a[3] + t * b[3],
        ]
    };
    for _ in 0..STEPS {
        let k1 = f(s);
        let k2 = f(add(s, k1, h / 2.0));
        let k3 = f(add(s, k2, h / 2.0));
        let k4 = f(add(s, k3, h));
        for i in 0..4 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    s
}

/// Dimensionless tip position `(x/L, y/L)`, with `y` measured in the load
/// direction.
pub fn tip(alpha: f64) -> (f64, f64) {
    // θ'(1) = k − α·∫cos θ is negative at k = 0 and non-negative at k = α.
    let (mut lo, mut hi) = (0.0, alpha);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if integrate(alpha, mid)[1] < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = integrate(alpha, 0.5 * (lo + hi));
    (s[2], s[3])
}

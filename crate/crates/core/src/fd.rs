//! Central finite differences with one Richardson extrapolation step.

/// First derivative of a scalar function.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Gradient of a function of two variables.
pub fn gradient_2d<F: Fn([f64; 2]) -> f64>(f: F, x: [f64; 2], h: f64) -> [f64; 2] {
    [
        derivative(|t| f([t, x[1]]), x[0], h),
        derivative(|t| f([x[0], t]), x[1], h),
    ]
}

/// Hessian `[[f11, f12], [f12, f22]]` of a function of two variables.
pub fn hessian_2d<F: Fn([f64; 2]) -> f64>(f: F, x: [f64; 2], h: f64) -> [[f64; 2]; 2] {
    let raw = |h: f64| {
        let f0 = f(x);
        let d11 = (f([x[0] + h, x[1]]) - 2.0 * f0 + f([x[0] - h, x[1]])) / (h * h);
        let d22 = (f([x[0], x[1] + h]) - 2.0 * f0 + f([x[0], x[1] - h])) / (h * h);
        let d12 = (f([x[0] + h, x[1] + h]) - f([x[0] + h, x[1] - h]) - f([x[0] - h, x[1] + h])
            + f([x[0] - h, x[1] - h]))
            / (4.0 * h * h);
        [d11, d12, d22]
    };
    let (c, fi) = (raw(h), raw(h / 2.0));
    let r: Vec<f64> = c
        .iter()
        .zip(fi.iter())
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect();
    [[r[0], r[1]], [r[1], r[2]]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        let d = derivative(|x| x.powi(3), 2.0, 1e-3);
        assert!((d - 12.0).abs() < 1e-9);
        let f = |x: [f64; 2]| x[0] * x[0] * x[1] + x[1].powi(3);
        let g = gradient_2d(f, [1.0, 2.0], 1e-3);
        assert!((g[0] - 4.0).abs() < 1e-9 && (g[1] - 13.0).abs() < 1e-9);
        let h = hessian_2d(f, [1.0, 2.0], 1e-2);
        assert!((h[0][0] - 4.0).abs() < 1e-8);
        assert!((h[0][1] - 2.0).abs() < 1e-8);
        assert!((h[1][1] - 12.0).abs() < 1e-8);
    }
}

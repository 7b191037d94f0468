//! Small numerical kernels shared by the analysis modules.

/// Finite-difference weights for derivatives `0..=max_order` at `z` from the
/// values at `nodes` (Fornberg's recursion). `w[j][k]` weights node `j` for
/// derivative order `k`. Nodes need not be uniform.
pub fn fornberg_weights(z: f64, nodes: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = nodes.len();
    let mut c = vec![vec![0.0; max_order + 1]; n];
    if n == 0 {
        return c;
    }
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - z;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol`. `f` may fail; the first error aborts the integration.
pub fn adaptive_simpson<E>(
    f: &mut dyn FnMut(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, E> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<E>(
    f: &mut dyn FnMut(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, E> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}

/// Cumulative integral of sampled `y(x)` with value 0 at `x[0]`. Each
/// interval integrates the cubic through the four nearest nodes, which is
/// fourth-order accurate on non-uniform grids. Falls back to lower order
/// for fewer than four nodes.
pub fn cumulative_integral(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
        }
        return out;
    }
    // two-point Gauss-Legendre is exact for cubics
    let g = 0.5 / 3f64.sqrt();
    for i in 0..n - 1 {
        let start = i.saturating_sub(1).min(n - 4);
        let nodes = &x[start..start + 4];
        let vals = &y[start..start + 4];
        let (a, b) = (x[i], x[i + 1]);
        let mid = 0.5 * (a + b);
        let half = b - a;
        let mut acc = 0.0;
        for p in [mid - g * half, mid + g * half] {
            acc += lagrange_eval(nodes, vals, p);
        }
        out[i + 1] = out[i] + 0.5 * half * acc;
    }
    out
}

fn lagrange_eval(nodes: &[f64], vals: &[f64], p: f64) -> f64 {
    let mut sum = 0.0;
    for (j, (&xj, &yj)) in nodes.iter().zip(vals).enumerate() {
        let mut w = 1.0;
        for (k, &xk) in nodes.iter().enumerate() {
            if k != j {
                w *= (p - xk) / (xj - xk);
            }
        }
        sum += w * yj;
    }
    sum
}

/// First derivative of sampled `y(x)` at every node (non-uniform spacing
/// allowed). Five-point stencils (fourth order) throughout: centered where two
/// neighbours exist on each side, shifted towards the interior near the ends.
pub fn gradient(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    if n < 2 {
        return vec![0.0; n];
    }
    if n == 2 {
        let d = (y[1] - y[0]) / (x[1] - x[0]);
        return vec![d, d];
    }
    (0..n)
        .map(|i| {
            let width = n.min(5);
            let start = i.saturating_sub(width / 2).min(n - width);
            let w = fornberg_weights(x[i], &x[start..start + width], 1);
            (0..width).map(|j| w[j][1] * y[start + j]).sum()
        })
        .collect()
}

/// Uniform grid from `a` to `b` (either direction) whose spacing is the
/// largest value not exceeding `step` that lands exactly on `b`.
pub fn step_grid(a: f64, b: f64, step: f64) -> Vec<f64> {
    let n = ((b - a).abs() / step * (1.0 - 1e-12)).ceil().max(0.0) as usize;
    if n == 0 {
        return vec![a];
    }
    let h = (b - a) / n as f64;
    (0..=n).map(|i| if i == n { b } else { a + h * i as f64 }).collect()
}

/// Index `i` with `xs[i] <= p <= xs[i+1]`, clamped to valid intervals.
pub fn bracket(xs: &[f64], p: f64) -> usize {
    let n = xs.len();
    debug_assert!(n >= 2);
    match xs.partition_point(|&v| v <= p) {
        0 => 0,
        k if k >= n => n - 2,
        k => k - 1,
    }
}

/// Piecewise-linear interpolation; `None` outside `[xs[0], xs[n-1]]`.
pub fn interp_linear(xs: &[f64], ys: &[f64], p: f64) -> Option<f64> {
    let n = xs.len();
    if n == 0 || p < xs[0] || p > xs[n - 1] || p.is_nan() {
        return None;
    }
    if n == 1 {
        return Some(ys[0]);
    }
    let i = bracket(xs, p);
    let h = xs[i + 1] - xs[i];
    let w = (p - xs[i]) / h;
    Some(ys[i] + w * (ys[i + 1] - ys[i]))
}

/// Lagrange interpolation through the four nodes nearest `p` (fewer when the
/// table is shorter); `None` outside `[xs[0], xs[n-1]]`.
pub fn interp_cubic(xs: &[f64], ys: &[f64], p: f64) -> Option<f64> {
    let n = xs.len();
    if n < 2 {
        return interp_linear(xs, ys, p);
    }
    if p < xs[0] || p > xs[n - 1] || p.is_nan() {
        return None;
    }
    let width = n.min(4);
    let start = bracket(xs, p).saturating_sub(1).min(n - width);
    let w = fornberg_weights(p, &xs[start..start + width], 0);
    Some((0..width).map(|j| w[j][0] * ys[start + j]).sum())
}

/// Cubic Hermite interpolation from nodal values and slopes.
pub fn interp_hermite(xs: &[f64], ys: &[f64], dys: &[f64], p: f64) -> Option<f64> {
    let n = xs.len();
    if n < 2 || p < xs[0] || p > xs[n - 1] || p.is_nan() {
        return None;
    }
    let i = bracket(xs, p);
    let h = xs[i + 1] - xs[i];
    let u = (p - xs[i]) / h;
    let (u2, u3) = (u * u, u * u * u);
    let h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    let h10 = u3 - 2.0 * u2 + u;
    let h01 = -2.0 * u3 + 3.0 * u2;
    let h11 = u3 - u2;
    Some(h00 * ys[i] + h10 * h * dys[i] + h01 * ys[i + 1] + h11 * h * dys[i + 1])
}

/// Solve `g(t) = target` for monotone increasing `g` on `[lo, hi]` by
/// safeguarded secant/bisection.
pub fn solve_monotone(g: &dyn Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut glo = g(lo) - target;
    let mut ghi = g(hi) - target;
    if glo >= 0.0 {
        return lo;
    }
    if ghi <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mut t = lo - glo * (hi - lo) / (ghi - glo);
        if !(t > lo && t < hi) {
            t = 0.5 * (lo + hi);
        }
        let gt = g(t) - target;
        if gt == 0.0 || (hi - lo) <= 1e-15 * (1.0 + t.abs()) {
            return t;
        }
        if gt < 0.0 {
            lo = t;
            glo = gt;
        } else {
            hi = t;
            ghi = gt;
        }
        // bisect when one end stalls
        let mid = 0.5 * (lo + hi);
        let gm = g(mid) - target;
        if gm < 0.0 {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
    }
    0.5 * (lo + hi)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_central_second_derivative() {
        let w = fornberg_weights(0.0, &[-1.0, 0.0, 1.0], 2);
        assert_eq!([w[0][2], w[1][2], w[2][2]], [1.0, -2.0, 1.0]);
        assert_eq!([w[0][1], w[1][1], w[2][1]], [-0.5, 0.0, 0.5]);
    }

    #[test]
    fn fornberg_exact_on_polynomials() {
        let nodes: Vec<f64> = (0..9).map(|i| 0.3 * i as f64 - 0.7).collect();
        let w = fornberg_weights(0.11, &nodes, 4);
        // p(x) = x^5: derivatives at z
        let z: f64 = 0.11;
        let exact = [z.powi(5), 5.0 * z.powi(4), 20.0 * z.powi(3), 60.0 * z * z, 120.0 * z];
        for (k, e) in exact.iter().enumerate() {
            let est: f64 = nodes.iter().zip(&w).map(|(x, wj)| wj[k] * x.powi(5)).sum();
            assert!((est - e).abs() < 1e-10, "order {k}: {est} vs {e}");
        }
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let r: Result<f64, ()> = adaptive_simpson(&mut |x: f64| Ok(x.cos()), 0.0, 2.0, 1e-12);
        assert!((r.unwrap() - 2f64.sin()).abs() < 1e-11);
        let r: Result<f64, ()> = adaptive_simpson(&mut |x: f64| Ok(x.exp()), 1.0, 0.0, 1e-12);
        assert!((r.unwrap() - (1.0 - 1f64.exp())).abs() < 1e-11);
    }

    #[test]
    fn cumulative_integral_nonuniform() {
        let x: Vec<f64> = (0..200).map(|i| { let u = i as f64 / 199.0; 2.0 * u * u + u }).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin()).collect();
        let c = cumulative_integral(&x, &y);
        for (xi, ci) in x.iter().zip(&c) {
            assert!((ci - (1.0 - xi.cos())).abs() < 1e-8);
        }
        let cubic: Vec<f64> = x.iter().map(|v| v * v * v).collect();
        let c = cumulative_integral(&x, &cubic);
        assert!((c[199] - 81.0 / 4.0).abs() < 1e-11);
    }

    #[test]
    fn gradient_is_exact_on_quadratics() {
        let x = [0.0, 0.1, 0.35, 0.4, 0.9];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v * v - v).collect();
        for (xi, g) in x.iter().zip(gradient(&x, &y)) {
            assert!((g - (6.0 * xi - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_interior_is_fourth_order() {
        let x: Vec<f64> = (0..9).map(|i| 0.3 * i as f64 + 0.01 * (i * i) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| v.powi(4) - 2.0 * v.powi(3)).collect();
        let g = gradient(&x, &y);
        for i in 2..7 {
            let xi = x[i];
            assert!((g[i] - (4.0 * xi.powi(3) - 6.0 * xi * xi)).abs() < 1e-11);
        }
    }

    #[test]
    fn step_grids() {
        let g = step_grid(1.0, 3.0, 1e-3);
        assert_eq!(g.len(), 2001);
        assert_eq!((g[0], g[2000]), (1.0, 3.0));
        assert_eq!(step_grid(0.0, 1.0, 0.3).len(), 5);
        assert_eq!(step_grid(1.0, 0.0, 0.5), vec![1.0, 0.5, 0.0]);
        assert_eq!(step_grid(2.0, 2.0, 0.1), vec![2.0]);
    }

    #[test]
    fn interpolation_and_root() {
        let xs = [0.0, 1.0, 2.0];
        assert_eq!(interp_linear(&xs, &[0.0, 2.0, 6.0], 1.5), Some(4.0));
        assert_eq!(interp_linear(&xs, &[0.0, 2.0, 6.0], 2.5), None);
        let uneven = [0.0, 0.3, 0.5, 1.1, 1.4, 2.0];
        let cubic: Vec<f64> = uneven.iter().map(|x| x * x * x - 2.0 * x + 1.0).collect();
        for p in [0.0, 0.1, 0.45, 1.0, 1.7, 2.0] {
            assert!((interp_cubic(&uneven, &cubic, p).unwrap() - (p * p * p - 2.0 * p + 1.0)).abs() < 1e-13);
        }
        assert_eq!(interp_cubic(&uneven, &cubic, 2.1), None);
        let ys = [0.0, 1.0, 8.0];
        let dys = [0.0, 3.0, 12.0];
        assert!((interp_hermite(&xs, &ys, &dys, 1.5).unwrap() - 3.375).abs() < 1e-14);
        let t = solve_monotone(&|t| t * t * t, 2.0, 0.0, 3.0);
        assert!((t - 2f64.cbrt()).abs() < 1e-13);
    }
}

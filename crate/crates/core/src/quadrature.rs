//! Gauss-Legendre rules and composite integration over chart domains.

use std::f64::consts::PI;

use crate::error::Result;
use crate::geometry::Domain;

/// Nodes and weights of the `order`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order > 0, "quadrature order must be positive");
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let nf = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(order, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(order, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    if order % 2 == 1 {
        nodes[order / 2] = 0.0;
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule on [a, b] with `panels` equal panels.
pub fn composite_rule(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for q in 0..order {
            out.push((mid + 0.5 * h * x[q], 0.5 * h * w[q]));
        }
    }
    out
}

/// Integrates `f` over a chart domain with respect to chart Lebesgue measure.
///
/// Intervals and rectangles use tensor composite Gauss-Legendre rules; disks
/// use polar coordinates with Gauss-Legendre in the radius and the
/// trapezoid rule in the angle.
pub fn integrate_domain(
    domain: &Domain,
    panels: usize,
    order: usize,
    mut f: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<f64> {
    let mut total = 0.0;
    match domain {
        Domain::Interval { a, b } => {
            for (x, w) in composite_rule(*a, *b, panels, order) {
                total += w * f(&[x])?;
            }
        }
        Domain::Rectangle { lo, hi } => {
            let rx = composite_rule(lo[0], hi[0], panels, order);
            let ry = composite_rule(lo[1], hi[1], panels, order);
            for &(y, wy) in &ry {
                for &(x, wx) in &rx {
                    total += wx * wy * f(&[x, y])?;
                }
            }
        }
        Domain::Disk { center, radius } => {
            let rr = composite_rule(0.0, *radius, panels, order);
            let n_angles = 4 * panels * order;
            let dphi = 2.0 * PI / n_angles as f64;
            for &(r, wr) in &rr {
                for l in 0..n_angles {
                    let phi = l as f64 * dphi;
                    let p = [center[0] + r * phi.cos(), center[1] + r * phi.sin()];
                    total += wr * r * dphi * f(&p)?;
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    #[test]
    fn low_order_rules_match_tables() {
        let (x, w) = gauss_legendre(2);
        assert_relative_eq!(x[1], 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(w[0], 1.0, epsilon = 1e-15);
        let (x, w) = gauss_legendre(3);
        assert_relative_eq!(x[2], 0.6f64.sqrt(), epsilon = 1e-15);
        assert_eq!(x[1], 0.0);
        assert_relative_eq!(w[1], 8.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn rule_is_exact_for_polynomials() {
        for order in 1..12 {
            let (x, w) = gauss_legendre(order);
            for deg in 0..2 * order {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert_relative_eq!(q, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn disk_area_and_moment() {
        let disk = Domain::Disk {
            center: [0.5, -0.25],
            radius: 2.0,
        };
        let area = integrate_domain(&disk, 4, 6, |_| Ok(1.0)).unwrap();
        assert_relative_eq!(area, 4.0 * PI, epsilon = 1e-12);
        let second = integrate_domain(&disk, 4, 6, |p| Ok((p[0] - 0.5).powi(2))).unwrap();
        assert_relative_eq!(second, PI * 16.0 / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn rectangle_integral() {
        let rect = Domain::Rectangle {
            lo: [0.0, 1.0],
            hi: [2.0, 3.0],
        };
        let v = integrate_domain(&rect, 8, 8, |p| Ok((p[0] * p[1]).exp())).unwrap();
        // closed form: int_1^3 (e^{2y} - 1)/y dy
        let inner = composite_rule(1.0, 3.0, 200, 8)
            .into_iter()
            .map(|(y, w)| w * ((2.0 * y).exp() - 1.0) / y)
            .sum::<f64>();
        assert_relative_eq!(v, inner, max_relative = 1e-12);
    }
}

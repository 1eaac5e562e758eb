//! Composite Gauss-Legendre quadrature with panel doubling.

use std::sync::OnceLock;

const ORDER: usize = 16;
const START_PANELS: usize = 4;
const MAX_PANELS: usize = 1 << 12;

/// Nodes and weights on [-1, 1], by Newton iteration on P_n.
fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut pts = Vec::with_capacity(n);
        for i in 1..=n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp;
            loop {
                let (mut p1, mut p2) = (1.0, 0.0);
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j - 1) as f64 * x * p2 - (j - 1) as f64 * p3) / j as f64;
                }
                dp = n as f64 * (x * p1 - p2) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            pts.push((x, w));
            pts.push((-x, w));
        }
        pts
    })
}

fn composite<F, E>(f: &mut F, a: f64, b: f64, panels: usize) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for &(x, w) in rule() {
            s += w * f(mid + half * x)?;
        }
        total += s * half;
    }
    Ok(total)
}

/// Outcome of a quadrature that did not meet its tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotConverged {
    pub last_change: f64,
}

/// Integrates `f` over `[a, b]`, doubling the panel count until two
/// successive estimates differ by less than `tol`.
pub fn integrate<F, E>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Result<f64, NotConverged>, E>
where
    F: FnMut(f64) -> Result<f64, E>,
{
    let mut panels = START_PANELS;
    let mut prev = composite(&mut f, a, b, panels)?;
    let mut change = f64::INFINITY;
    while panels < MAX_PANELS {
        panels *= 2;
        let next = composite(&mut f, a, b, panels)?;
        change = (next - prev).abs();
        if change < tol {
            return Ok(Ok(next));
        }
        prev = next;
    }
    Ok(Err(NotConverged { last_change: change }))
}

//! Explicit adaptive Dormand-Prince 5(4) integration with output on a
//! prescribed node grid. The controller steps adaptively inside each grid
//! interval and never steps past the next output node, so node values are
//! computed exactly (no dense-output interpolation).

use crate::{Error, Result};

/// Tolerances and step bounds for [`integrate_grid`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Hard cap on the internal step; `None` means the grid gap is the cap.
    pub max_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            max_step: None,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
#[rustfmt::skip]
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// B5 - B4: weights of the embedded error estimate.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates `dy/dt = f(t, y)` from `grid[0]`, returning the state at every
/// node of the strictly increasing `grid` (the first entry is `y0` itself).
pub fn integrate_grid<F>(
    mut f: F,
    y0: &[f64],
    grid: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    assert!(grid.len() >= 2, "grid needs at least two nodes");
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut out = Vec::with_capacity(grid.len());
    out.push(y.clone());

    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; dim]).collect();
    let mut y_stage = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];

    let mut t = grid[0];
    f(t, &y, &mut k[0]);
    let span = grid[grid.len() - 1] - grid[0];
    let mut h = opts.max_step.unwrap_or(span / 100.0).min(span / 100.0);

    for &t_node in &grid[1..] {
        loop {
            let remaining = t_node - t;
            let resolution = 4.0 * f64::EPSILON * t.abs().max(1.0);
            if remaining <= resolution {
                break;
            }
            let h_cap = opts.max_step.unwrap_or(f64::INFINITY);
            h = h.min(h_cap).min(remaining);
            if h < resolution {
                return Err(Error::StepSizeUnderflow { t });
            }

            for s in 1..7 {
                for i in 0..dim {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        let a = A[s - 1][j];
                        if a != 0.0 {
                            acc += a * kj[i];
                        }
                    }
                    y_stage[i] = y[i] + h * acc;
                }
                let (head, tail) = k.split_at_mut(s);
                let _ = head;
                f(t + C[s] * h, &y_stage, &mut tail[0]);
            }

            let mut err_norm: f64 = 0.0;
            for i in 0..dim {
                let mut dy = 0.0;
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    dy += B5[j] * kj[i];
                    e += E[j] * kj[i];
                }
                y_new[i] = y[i] + h * dy;
                let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
                let r = h * e / scale;
                err_norm += r * r;
            }
            err_norm = (err_norm / dim as f64).sqrt();

            if err_norm <= 1.0 {
                t += h;
                std::mem::swap(&mut y, &mut y_new);
                // FSAL: stage 7 was evaluated at (t + h, y_new).
                let k6 = k[6].clone();
                k[0].copy_from_slice(&k6);
            }
            let factor = if err_norm == 0.0 {
                5.0
            } else {
                (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= factor;
        }
        // Force exact node alignment; the loop exits with t ~ t_node.
        t = t_node;
        out.push(y.clone());
        f(t, &y, &mut k[0]);
    }
    Ok(out)
}

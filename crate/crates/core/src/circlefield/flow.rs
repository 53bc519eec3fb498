//! Dormand-Prince 5(4) integration of `θ' = f(θ)`.

use super::{wrap_angle, CircleField};

const RTOL: f64 = 1e-10;
const ATOL: f64 = 1e-12;

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights are the last row of A; these are the embedded fourth-order ones
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Time-`t` flow of the field starting at `theta0`, reduced to `[0, 2π)`.
pub fn flow(field: &CircleField, theta0: f64, t: f64) -> f64 {
    if t == 0.0 {
        return wrap_angle(theta0);
    }
    let f = |x: f64| field.value(x);
    let dir = t.signum();
    let span = t.abs();
    let mut y = theta0;
    let mut s = 0.0;
    let mut h = (0.01f64).min(span);
    let mut k = [0.0; 7];
    k[0] = f(y);
    while s < span {
        if s + h > span {
            h = span - s;
        }
        for i in 1..7 {
            let inc: f64 = (0..i).map(|j| A[i][j] * k[j]).sum();
            k[i] = f(y + dir * h * inc);
        }
        let y5 = y + dir * h * (0..6).map(|j| A[6][j] * k[j]).sum::<f64>();
        let y4 = y + dir * h * (0..7).map(|j| B4[j] * k[j]).sum::<f64>();
        let scale = ATOL + RTOL * y.abs().max(y5.abs());
        let err = (y5 - y4).abs() / scale;
        if err <= 1.0 {
            s += h;
            y = y5;
            k[0] = k[6];
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    wrap_angle(y)
}

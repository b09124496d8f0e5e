//! LLL reduction and Fincke–Pohst enumeration for rank-3 lattices given by
//! floating point basis rows.

const DELTA: f64 = 0.99;

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn gram_schmidt(b: &[[f64; 3]; 3]) -> ([[f64; 3]; 3], [f64; 3]) {
    let mut mu = [[0.0; 3]; 3];
    let mut bs = *b;
    let mut norms = [0.0; 3];
    for i in 0..3 {
        for j in 0..i {
            mu[i][j] = dot(&b[i], &bs[j]) / norms[j];
            for k in 0..3 {
                bs[i][k] -= mu[i][j] * bs[j][k];
            }
        }
        norms[i] = dot(&bs[i], &bs[i]);
    }
    (mu, norms)
}

/// LLL-reduces the rows of `b` in place and applies the same unimodular
/// row operations to `u`.
pub fn lll(b: &mut [[f64; 3]; 3], u: &mut [[i64; 3]; 3]) {
    let mut k = 1;
    let mut guard = 0;
    while k < 3 {
        guard += 1;
        if guard > 10_000 {
            break;
        }
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(b);
            let q = mu[k][j].round();
            if q != 0.0 {
                let qi = q as i64;
                for t in 0..3 {
                    b[k][t] -= q * b[j][t];
                    u[k][t] -= qi * u[j][t];
                }
            }
        }
        let (mu, norms) = gram_schmidt(b);
        if norms[k] >= (DELTA - mu[k][k - 1] * mu[k][k - 1]) * norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            u.swap(k, k - 1);
            k = k.max(2) - 1;
        }
    }
}

/// All nonzero integer vectors x, one of each pair ±x, with
/// ‖Σ xⱼ·bⱼ‖² ≤ r2. Coordinates refer to the rows of `b` as given.
pub fn short_vectors(b: &[[f64; 3]; 3], r2: f64) -> Vec<[i64; 3]> {
    let mut red = *b;
    let mut u = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    lll(&mut red, &mut u);
    let (mu, norms) = gram_schmidt(&red);
    let mut out = Vec::new();
    let to_orig = |x: [i64; 3]| -> [i64; 3] {
        let mut k = [0i64; 3];
        for j in 0..3 {
            for l in 0..3 {
                k[l] += x[j] * u[j][l];
            }
        }
        k
    };
    // x₂ ≥ 0, and the first nonzero coordinate from the top is positive
    let lim2 = (r2 / norms[2]).sqrt();
    for x2 in 0..=(lim2.floor() as i64) {
        let r2_left = r2 - (x2 as f64).powi(2) * norms[2];
        if r2_left < 0.0 {
            continue;
        }
        let c1 = -(x2 as f64) * mu[2][1];
        let w1 = (r2_left / norms[1]).sqrt();
        let lo1 = (c1 - w1).ceil() as i64;
        let hi1 = (c1 + w1).floor() as i64;
        for x1 in lo1..=hi1 {
            if x2 == 0 && x1 < 0 {
                continue;
            }
            let r1_left = r2_left - (x1 as f64 - c1).powi(2) * norms[1];
            if r1_left < 0.0 {
                continue;
            }
            let c0 = -(x1 as f64) * mu[1][0] - (x2 as f64) * mu[2][0];
            let w0 = (r1_left / norms[0]).sqrt();
            let lo0 = (c0 - w0).ceil() as i64;
            let hi0 = (c0 + w0).floor() as i64;
            for x0 in lo0..=hi0 {
                if x2 == 0 && x1 == 0 && x0 <= 0 {
                    continue;
                }
                out.push(to_orig([x0, x1, x2]));
            }
        }
    }
    out
}

/// A shortest nonzero vector, in coordinates of the rows of `b`.
pub fn shortest_vector(b: &[[f64; 3]; 3]) -> [i64; 3] {
    let mut red = *b;
    let mut u = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    lll(&mut red, &mut u);
    let r2 = dot(&red[0], &red[0]) * (1.0 + 1e-9);
    let len = |x: &[i64; 3]| {
        let mut v = [0.0; 3];
        for j in 0..3 {
            for t in 0..3 {
                v[t] += x[j] as f64 * b[j][t];
            }
        }
        dot(&v, &v)
    };
    short_vectors(b, r2)
        .into_iter()
        .min_by(|x, y| len(x).total_cmp(&len(y)))
        .unwrap_or(u[0])
}

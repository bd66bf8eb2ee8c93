//! Linear max-margin classifier: L2-regularized hinge loss trained by
//! deterministic full-batch subgradient descent (Pegasos step sizes).
//!
//! Features are standardized to zero mean and unit variance with
//! statistics from the training fold only; the bias is carried as an
//! appended constant feature.

pub(crate) struct LinearSvm {
    weights: Vec<f64>, // last slot is the bias feature
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl LinearSvm {
    pub(crate) fn fit(x: &[Vec<f64>], y: &[usize], c: f64, epochs: usize) -> Self {
        let n = x.len();
        let d = x[0].len();

        let mut mean = vec![0.0; d];
        for row in x {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n as f64;
        }
        let mut scale = vec![0.0; d];
        for row in x {
            for ((s, v), m) in scale.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut scale {
            *s = (*s / n as f64).sqrt();
            if *s == 0.0 {
                *s = 1.0; // constant feature: leave it centered at zero
            }
        }

        let z: Vec<Vec<f64>> = x
            .iter()
            .map(|row| {
                let mut zr: Vec<f64> = row
                    .iter()
                    .zip(&mean)
                    .zip(&scale)
                    .map(|((v, m), s)| (v - m) / s)
                    .collect();
                zr.push(1.0);
                zr
            })
            .collect();
        let signs: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();

        let lambda = 1.0 / (c * n as f64);
        let radius = 1.0 / lambda.sqrt();
        let mut w = vec![0.0; d + 1];
        for t in 1..=epochs {
            let eta = 1.0 / (lambda * t as f64);
            let mut grad: Vec<f64> = w.iter().map(|wi| lambda * wi).collect();
            for (row, sign) in z.iter().zip(&signs) {
                let margin = sign * dot(&w, row);
                if margin < 1.0 {
                    for (g, v) in grad.iter_mut().zip(row) {
                        *g -= sign * v / n as f64;
                    }
                }
            }
            for (wi, g) in w.iter_mut().zip(&grad) {
                *wi -= eta * g;
            }
            // Pegasos projection keeps the iterates bounded.
            let norm = dot(&w, &w).sqrt();
            if norm > radius {
                let shrink = radius / norm;
                for wi in &mut w {
                    *wi *= shrink;
                }
            }
        }

        Self {
            weights: w,
            mean,
            scale,
        }
    }

    pub(crate) fn decision(&self, row: &[f64]) -> f64 {
        let mut acc = *self.weights.last().expect("bias weight");
        for ((v, m), (s, w)) in row
            .iter()
            .zip(&self.mean)
            .zip(self.scale.iter().zip(&self.weights))
        {
            acc += w * (v - m) / s;
        }
        acc
    }

    pub(crate) fn predict(&self, row: &[f64]) -> usize {
        usize::from(self.decision(row) > 0.0)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

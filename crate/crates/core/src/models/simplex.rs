//! Bounded Nelder–Mead minimiser. Bounds are enforced by projecting every
//! trial point onto the box.

pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    #[allow(dead_code)]
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub(crate) struct Simplex<'a> {
    pub lower: &'a [f64],
    pub upper: &'a [f64],
    pub step: &'a [f64],
    pub max_iterations: usize,
    /// Stop when the spread of vertex values falls below
    /// `tolerance * max(|best|, 1)`.
    pub tolerance: f64,
}

impl Simplex<'_> {
    fn project(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(self.lower).zip(self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }

    /// Minimises `f` starting from `start`. Non-finite values are treated as +∞.
    pub fn minimize(&self, start: &[f64], mut f: impl FnMut(&[f64]) -> f64) -> SimplexResult {
        let mut eval = |x: &[f64]| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let mut x0 = start.to_vec();
        self.project(&mut x0);
        let mut iterations = 0;
        let mut best = (x0.clone(), eval(&x0));
        // One restart from the converged point guards against premature collapse.
        for _ in 0..2 {
            let budget = self.max_iterations - iterations;
            let (x, v, it, converged) = self.run(&best.0, best.1, &mut eval, budget);
            iterations += it;
            if v <= best.1 {
                best = (x, v);
            }
            if !converged {
                return SimplexResult {
                    x: best.0,
                    value: best.1,
                    iterations,
                    converged: false,
                };
            }
        }
        SimplexResult {
            x: best.0,
            value: best.1,
            iterations,
            converged: true,
        }
    }

    fn run(
        &self,
        start: &[f64],
        start_value: f64,
        eval: &mut impl FnMut(&[f64]) -> f64,
        budget: usize,
    ) -> (Vec<f64>, f64, usize, bool) {
        let n = start.len();
        let mut pts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
        let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
        pts.push(start.to_vec());
        vals.push(start_value);
        for i in 0..n {
            let mut p = start.to_vec();
            p[i] += self.step[i];
            self.project(&mut p);
            if p[i] == start[i] {
                p[i] -= self.step[i];
                self.project(&mut p);
            }
            vals.push(eval(&p));
            pts.push(p);
        }

        let mut order: Vec<usize> = (0..=n).collect();
        for it in 0..budget {
            order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
            let (ib, iw, isw) = (order[0], order[n], order[n - 1]);
            let spread = vals[iw] - vals[ib];
            if spread.is_finite() && spread <= self.tolerance * vals[ib].abs().max(1.0) {
                return (pts[ib].clone(), vals[ib], it, true);
            }

            let mut centroid = vec![0.0; n];
            for &i in &order[..n] {
                for (c, v) in centroid.iter_mut().zip(&pts[i]) {
                    *c += v / n as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                let mut p: Vec<f64> = centroid.iter().zip(&pts[iw]).map(|(c, w)| c + t * (c - w)).collect();
                self.project(&mut p);
                p
            };

            let xr = along(1.0);
            let fr = eval(&xr);
            if fr < vals[ib] {
                let xe = along(2.0);
                let fe = eval(&xe);
                if fe < fr {
                    pts[iw] = xe;
                    vals[iw] = fe;
                } else {
                    pts[iw] = xr;
                    vals[iw] = fr;
                }
                continue;
            }
            if fr < vals[isw] {
                pts[iw] = xr;
                vals[iw] = fr;
                continue;
            }
            let (xc, fc) = if fr < vals[iw] {
                let xc = along(0.5);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-0.5);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < vals[iw].min(fr) {
                pts[iw] = xc;
                vals[iw] = fc;
                continue;
            }
            // shrink toward the best vertex
            let best = pts[ib].clone();
            for i in 0..=n {
                if i == ib {
                    continue;
                }
                for (p, b) in pts[i].iter_mut().zip(&best) {
                    *p = b + 0.5 * (*p - b);
                }
                vals[i] = eval(&pts[i]);
            }
        }
        let ib = (0..=n).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
        (pts[ib].clone(), vals[ib], budget, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimises_rosenbrock() {
        let s = Simplex {
            lower: &[-5.0, -5.0],
            upper: &[5.0, 5.0],
            step: &[0.5, 0.5],
            max_iterations: 5000,
            tolerance: 1e-14,
        };
        let r = s.minimize(&[-1.2, 1.0], |x| {
            100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2)
        });
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-4 && (r.x[1] - 1.0).abs() < 1e-4, "{:?}", r.x);
    }

    #[test]
    fn respects_bounds() {
        let s = Simplex {
            lower: &[1.0],
            upper: &[3.0],
            step: &[0.3],
            max_iterations: 500,
            tolerance: 1e-12,
        };
        let r = s.minimize(&[2.0], |x| (x[0] + 4.0).powi(2));
        assert!((r.x[0] - 1.0).abs() < 1e-9);
        assert!((r.value - 25.0).abs() < 1e-9);
    }
}

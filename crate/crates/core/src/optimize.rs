//! Nelder–Mead downhill simplex.

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    pub max_evals: usize,
    /// Stop once `max f - min f` over the simplex falls below this.
    pub f_spread_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { initial_step: 0.5, max_evals: 2000, f_spread_tol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

pub fn nelder_mead<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert!(n > 0, "empty parameter vector");
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evals)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }

    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        if spread < opts.f_spread_tol {
            converged = true;
            break;
        }
        if evals >= opts.max_evals {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / n as f64;
            }
        }
        let along = |t: f64, worst: &[f64]| -> Vec<f64> {
            centroid.iter().zip(worst).map(|(c, w)| c + t * (c - w)).collect()
        };

        let worst = simplex[n].0.clone();
        let reflected = along(REFLECT, &worst);
        let fr = eval(&reflected, &mut evals);

        if fr < simplex[0].1 {
            let expanded = along(EXPAND, &worst);
            let fe = eval(&expanded, &mut evals);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let (contracted, fc) = if fr < simplex[n].1 {
                let x = along(CONTRACT, &worst);
                let fx = eval(&x, &mut evals);
                (x, fx)
            } else {
                let x = along(-CONTRACT, &worst);
                let fx = eval(&x, &mut evals);
                (x, fx)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for (x, fx) in simplex.iter_mut().skip(1) {
                    for (xi, bi) in x.iter_mut().zip(&best) {
                        *xi = bi + SHRINK * (*xi - bi);
                    }
                    *fx = eval(x, &mut evals);
                }
            }
        }
    }

    let (x, f) = simplex.swap_remove(0);
    NelderMeadResult { x, f, evals, converged }
}

//! Central finite-difference verification of analytic gradients.

use super::{NodeId, ParamSet, Tape};

#[derive(Debug, Clone, Copy)]
pub struct GradCheckConfig {
    /// Finite-difference step.
    pub step: f64,
    /// Maximum accepted relative error.
    pub tolerance: f64,
    /// Check at most this many evenly spaced entries of each parameter.
    pub max_entries_per_param: Option<usize>,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        Self {
            step: 1e-4,
            tolerance: 1e-4,
            max_entries_per_param: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// `(param name, flat index, analytic, numeric)` of the worst entry.
    pub worst: Option<(String, usize, f64, f64)>,
    pub entries_checked: usize,
    pub passed: bool,
}

/// `|a - b| / max(|a|, |b|, 1e-6)`; the floor keeps exact zeros from
/// turning round-off into a large ratio.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-6)
}

/// Compares the gradient written by `objective` against central differences.
///
/// `objective` must return the scalar loss and accumulate its gradient into
/// the `grad` buffers of the set it receives (they are zeroed before each
/// call). Values are restored after checking; gradient buffers hold the
/// analytic gradient on return.
pub fn grad_check<F>(ps: &mut ParamSet, mut objective: F, cfg: GradCheckConfig) -> GradCheckReport
where
    F: FnMut(&mut ParamSet) -> f64,
{
    ps.zero_grad();
    objective(ps);
    let analytic: Vec<Vec<f64>> = ps.iter().map(|p| p.grad.as_slice().to_vec()).collect();

    let mut max_rel = 0.0f64;
    let mut worst = None;
    let mut checked = 0;
    let ids: Vec<_> = ps.ids().collect();
    for (pi, id) in ids.into_iter().enumerate() {
        let n = ps.value(id).len();
        let stride = match cfg.max_entries_per_param {
            Some(m) if m > 0 && n > m => n.div_ceil(m),
            _ => 1,
        };
        for k in (0..n).step_by(stride) {
            let orig = ps.value(id).as_slice()[k];
            ps.get_mut(id).value.as_mut_slice()[k] = orig + cfg.step;
            ps.zero_grad();
            let plus = objective(ps);
            ps.get_mut(id).value.as_mut_slice()[k] = orig - cfg.step;
            ps.zero_grad();
            let minus = objective(ps);
            ps.get_mut(id).value.as_mut_slice()[k] = orig;

            let numeric = (plus - minus) / (2.0 * cfg.step);
            let a = analytic[pi][k];
            let rel = relative_error(a, numeric);
            checked += 1;
            if rel > max_rel || worst.is_none() {
                max_rel = max_rel.max(rel);
                worst = Some((ps.get(id).name.clone(), k, a, numeric));
            }
        }
    }

    ps.zero_grad();
    objective(ps);
    GradCheckReport {
        max_rel_error: max_rel,
        worst,
        entries_checked: checked,
        passed: max_rel <= cfg.tolerance && max_rel.is_finite(),
    }
}

/// Adapts a tape-building closure into an objective for [`grad_check`].
pub fn tape_objective<B>(mut build: B) -> impl FnMut(&mut ParamSet) -> f64
where
    B: FnMut(&mut Tape, &ParamSet) -> NodeId,
{
    move |ps: &mut ParamSet| {
        let mut tape = Tape::new();
        let out = build(&mut tape, ps);
        let loss = tape.scalar(out);
        tape.backward(out, ps);
        loss
    }
}

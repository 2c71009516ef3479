use super::{Tape, Tensor, Var};
use crate::error::Result;

/// Outcome of comparing tape gradients against central differences.
#[derive(Clone, Debug, PartialEq)]
pub struct FdReport {
    /// `max |g_ad - g_fd| / max(1e-8, |g_ad| + |g_fd|)` over all entries.
    pub max_rel_error: f64,
    /// `(parameter, flat index)` of the worst entry.
    pub worst: (usize, usize),
    pub analytic: f64,
    pub numeric: f64,
    pub entries: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks the gradient of `f` at `params` with central differences.
///
/// `f` records a scalar loss on the tape given one leaf per parameter.
pub fn finite_diff_check<F>(f: F, params: &[Tensor], step: f64, tolerance: f64) -> Result<FdReport>
where
    F: Fn(&mut Tape, &[Var]) -> Result<Var>,
{
    let eval = |ps: &[Tensor]| -> Result<f64> {
        let mut tape = Tape::new();
        let vars = ps
            .iter()
            .map(|p| tape.param(p.clone()))
            .collect::<Result<Vec<_>>>()?;
        let loss = f(&mut tape, &vars)?;
        Ok(tape.value(loss).data()[0])
    };

    let mut tape = Tape::new();
    let vars = params
        .iter()
        .map(|p| tape.param(p.clone()))
        .collect::<Result<Vec<_>>>()?;
    let loss = f(&mut tape, &vars)?;
    let analytic = tape.backward(loss)?.wrt(&vars);

    let mut work = params.to_vec();
    let mut report = FdReport {
        max_rel_error: 0.0,
        worst: (0, 0),
        analytic: 0.0,
        numeric: 0.0,
        entries: 0,
        tolerance,
        passed: false,
    };
    for (pi, grad) in analytic.iter().enumerate() {
        for k in 0..grad.len() {
            let orig = work[pi].data()[k];
            work[pi].data_mut()[k] = orig + step;
            let plus = eval(&work)?;
            work[pi].data_mut()[k] = orig - step;
            let minus = eval(&work)?;
            work[pi].data_mut()[k] = orig;

            let numeric = (plus - minus) / (2.0 * step);
            let g = grad.data()[k];
            let err = (g - numeric).abs() / (g.abs() + numeric.abs()).max(1e-8);
            report.entries += 1;
            if err > report.max_rel_error || report.entries == 1 {
                report.max_rel_error = err;
                report.worst = (pi, k);
                report.analytic = g;
                report.numeric = numeric;
            }
        }
    }
    report.passed = report.max_rel_error <= tolerance;
    Ok(report)
}

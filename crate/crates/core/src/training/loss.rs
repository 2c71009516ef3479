use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{Error, Result};
use crate::seqdata::{Task, TaskLabel};

/// Mean absolute error for regression, summed per-class binary
/// cross-entropy for multilabel.
pub fn loss_for_task(tape: &mut Tape, output: Var, label: &TaskLabel, task: &Task) -> Result<Var> {
    match (task, label) {
        (Task::Regression, TaskLabel::Regression(y)) => tape.l1_loss(output, &Tensor::scalar(*y)),
        (Task::Multilabel(k), TaskLabel::Multilabel(bits)) if bits.len() == *k => {
            let target = Tensor::row_vector(bits.iter().map(|&b| b as f64).collect());
            tape.bce_with_logits(output, &target)
        }
        _ => Err(Error::InvalidConfig(format!(
            "label {label:?} does not fit task {task:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_regression_prediction_costs_nothing() {
        let mut tape = Tape::new();
        let p = tape.param(Tensor::scalar(1.5)).unwrap();
        let l = loss_for_task(&mut tape, p, &TaskLabel::Regression(1.5), &Task::Regression).unwrap();
        assert_eq!(tape.value(l).item(), Some(0.0));
    }

    #[test]
    fn zero_logits_cost_ln2_per_class() {
        let mut tape = Tape::new();
        let p = tape.param(Tensor::zeros(1, 4)).unwrap();
        let l = loss_for_task(
            &mut tape,
            p,
            &TaskLabel::Multilabel(vec![1, 0, 1, 0]),
            &Task::Multilabel(4),
        )
        .unwrap();
        assert_abs_diff_eq!(tape.value(l).item().unwrap(), 2.7726, epsilon = 1e-4);
        assert_abs_diff_eq!(tape.value(l).item().unwrap(), 4.0 * 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn mismatched_label_is_rejected() {
        let mut tape = Tape::new();
        let p = tape.param(Tensor::zeros(1, 4)).unwrap();
        assert!(loss_for_task(&mut tape, p, &TaskLabel::Regression(0.0), &Task::Multilabel(4)).is_err());
        assert!(loss_for_task(
            &mut tape,
            p,
            &TaskLabel::Multilabel(vec![1, 0]),
            &Task::Multilabel(4)
        )
        .is_err());
    }
}

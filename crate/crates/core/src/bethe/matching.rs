use num_complex::Complex64;
use serde::Serialize;

use super::{tq_lambda_continued, BetheError, BetheSolution, TQKernels};
use crate::json::JsonComplex;
use crate::model::ModelParams;
use crate::spectrum::{markov_spectrum, transfer_spectrum, SpectrumReport, DEFAULT_X0};

type C = Complex64;

/// Relative tolerance for identifying `Λ(x₀)` with an eigenvalue of `τ(x₀)`.
pub const TRANSFER_MATCH_TOLERANCE: f64 = 1e-6;

/// Where one solution lands in the two exact spectra.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionMatch {
    pub solution: usize,
    pub lambda_x0: JsonComplex,
    /// Index into the `τ(x₀)` spectral lines.
    pub transfer_line: Option<usize>,
    /// Index into the Markov spectral lines.
    pub markov_line: Option<usize>,
}

/// Coverage of the exact spectrum by a set of Bethe solutions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub x0: JsonComplex,
    pub matches: Vec<SolutionMatch>,
    pub markov: SpectrumReport,
    pub transfer: SpectrumReport,
    /// Multiplicity recovered for each Markov line: the sum over distinct `τ(x₀)` lines hit by
    /// solutions carrying that `E_L`.
    pub recovered: Vec<usize>,
}

impl CompletenessReport {
    /// Every solution matched and every Markov line recovered with its exact multiplicity.
    pub fn complete(&self) -> bool {
        self.matches
            .iter()
            .all(|m| m.transfer_line.is_some() && m.markov_line.is_some())
            && self
                .recovered
                .iter()
                .zip(&self.markov.eigenvalues)
                .all(|(r, l)| *r == l.multiplicity)
    }
}

/// Matches solutions to the exact Markov spectrum (by `E_L`, absolute tolerance `tol`) and to the
/// exact `τ(x₀)` spectrum (by `Λ(x₀)`), so that degenerate Markov levels are counted through the
/// transfer-matrix eigenvalues they come from.
pub fn match_solutions(
    solutions: &[BetheSolution],
    params: &ModelParams,
    tol: f64,
) -> Result<CompletenessReport, BetheError> {
    let family = match solutions.first() {
        Some(s) => s.variant.family(),
        None => return Err(BetheError::Selection(vec!["no solutions to match".into()])),
    };
    let k = TQKernels::new(params);
    let markov = markov_spectrum(params.n(), params, family)?;
    let transfer = transfer_spectrum(DEFAULT_X0, params, family)?;
    let mut matches = Vec::with_capacity(solutions.len());
    for (i, s) in solutions.iter().enumerate() {
        let l = tq_lambda_continued(s.variant, &s.roots, &k, DEFAULT_X0)?;
        let transfer_line = nearest(&transfer, l, TRANSFER_MATCH_TOLERANCE * l.norm().max(1.0));
        let markov_line = nearest(&markov, s.e_l, tol);
        matches.push(SolutionMatch {
            solution: i,
            lambda_x0: l.into(),
            transfer_line,
            markov_line,
        });
    }
    let mut recovered = vec![0; markov.eigenvalues.len()];
    let mut seen = vec![false; transfer.eigenvalues.len()];
    for m in &matches {
        if let (Some(t), Some(e)) = (m.transfer_line, m.markov_line) {
            if !seen[t] {
                seen[t] = true;
                recovered[e] += transfer.eigenvalues[t].multiplicity;
            }
        }
    }
    Ok(CompletenessReport {
        x0: DEFAULT_X0.into(),
        matches,
        markov,
        transfer,
        recovered,
    })
}

fn nearest(report: &SpectrumReport, v: C, tol: f64) -> Option<usize> {
    report
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, l)| (i, (l.value() - v).norm()))
        .filter(|(_, d)| *d <= tol)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
}

//! Small value types shared across the evaluation pipelines.

/// How a numerical value was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Quadrature,
    Inversion,
    ClosedForm,
}

/// A numerical value paired with an absolute-error estimate and the method
/// that produced it.
#[derive(Debug, Clone, Copy)]
pub struct EvalResult {
    pub value: f64,
    pub abs_err: f64,
    pub method: Method,
}

impl EvalResult {
    pub fn new(value: f64, abs_err: f64, method: Method) -> Self {
        EvalResult {
            value,
            abs_err,
            method,
        }
    }

    pub fn closed_form(value: f64) -> Self {
        EvalResult {
            value,
            abs_err: 4.0 * f64::EPSILON * value.abs(),
            method: Method::ClosedForm,
        }
    }
}

/// Reference measure a kernel density is taken against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Lebesgue,
    /// The speed measure `m(dy) = y^(-2 nu + 1) dy` of the index `-nu`
    /// Bessel process; killed kernels are symmetric against it.
    Speed,
}

/// A density value together with the reference measure it is taken against.
#[derive(Debug, Clone, Copy)]
pub struct KernelValue {
    pub value: f64,
    pub abs_err: f64,
    pub measure: Measure,
}

/// A Monte Carlo estimate with its standard error and provenance.
#[derive(Debug, Clone, Copy)]
pub struct MCEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl MCEstimate {
    /// |self - reference| measured in combined standard errors.
    pub fn sigma_distance(&self, reference: f64, reference_err: f64) -> f64 {
        let denom = (self.std_error.powi(2) + reference_err.powi(2)).sqrt();
        if denom == 0.0 {
            if self.value == reference {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.value - reference).abs() / denom
        }
    }
}

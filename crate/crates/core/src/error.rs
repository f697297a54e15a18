use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dark state undefined: both fields are zero")]
    DegenerateFields,

    #[error("domain error: {0}")]
    Domain(String),

    /// The recurring coupling pulse is too weak for the regenerated probe to
    /// leave the cell.
    #[error("escape condition violated for R = {r}; need R > {r_min:.6}")]
    Escape { r: f64, r_min: f64 },

    /// The first probe pulse reaches the far face before the recurrence, so
    /// no regeneration timing exists for any R.
    #[error("first probe pulse traverses the medium (alpha = {alpha:.6} <= beta = {beta:.6})")]
    MediumTraversed { alpha: f64, beta: f64 },

    #[error("no matched R: kappa12*z_m = {kappa_z:.6} must exceed {threshold:.6}")]
    NoMatchedR { kappa_z: f64, threshold: f64 },

    #[error(
        "atom step too large: |lambda+|*dx = {phase_step:.3} (|lambda+| = {lambda_max:.3}); \
         rerun with refine >= {suggested_refine}"
    )]
    Stiffness {
        lambda_max: f64,
        phase_step: f64,
        suggested_refine: u32,
    },

    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

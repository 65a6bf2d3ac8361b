//! Published maximum errors, transcribed for side-by-side output.
//!
//! These numbers are copied from the literature and are not recomputed.
//! `None` marks a cell that was left blank in the source table.

/// One literature result: a grid label, its spatial dof and the error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiteratureEntry {
    pub method: &'static str,
    pub grid: &'static str,
    pub dof: usize,
    pub e_inf: Option<f64>,
}

/// Published errors of the local Taylor scheme itself for one mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PublishedRow {
    pub m: usize,
    pub dof: usize,
    pub central: f64,
    pub backward: f64,
    pub forward: f64,
}

/// Finite-difference results for the sine-product diffusion benchmark.
pub const SINE_DIFFUSION_LITERATURE: [LiteratureEntry; 8] = [
    LiteratureEntry { method: "FDM-a", grid: "11x11", dof: 121, e_inf: Some(1.36e-5) },
    LiteratureEntry { method: "FDM-a", grid: "21x21", dof: 441, e_inf: Some(8.55e-7) },
    LiteratureEntry { method: "FDM-a", grid: "41x41", dof: 1681, e_inf: Some(5.34e-8) },
    LiteratureEntry { method: "FDM-a", grid: "81x81", dof: 6561, e_inf: Some(3.34e-9) },
    LiteratureEntry { method: "FDM-b", grid: "11x11", dof: 121, e_inf: Some(5.67e-6) },
    LiteratureEntry { method: "FDM-b", grid: "21x21", dof: 441, e_inf: Some(3.36e-7) },
    LiteratureEntry { method: "FDM-b", grid: "41x41", dof: 1681, e_inf: Some(2.07e-8) },
    LiteratureEntry { method: "FDM-b", grid: "81x81", dof: 6561, e_inf: Some(1.29e-9) },
];

/// Published local Taylor errors for the sine-product benchmark at
/// `t_f = 0.25, N = 15, S = 14, K = 10`.
pub const SINE_DIFFUSION_PUBLISHED: [PublishedRow; 4] = [
    PublishedRow { m: 2, dof: 84, central: 4.14e-8, backward: 6.91e-6, forward: 6.91e-6 },
    PublishedRow { m: 3, dof: 189, central: 1.69e-9, backward: 1.68e-6, forward: 1.68e-6 },
    PublishedRow { m: 4, dof: 336, central: 8.70e-11, backward: 3.63e-8, forward: 3.63e-8 },
    PublishedRow { m: 5, dof: 525, central: 9.99e-12, backward: 1.81e-9, forward: 1.81e-9 },
];

/// Chebyshev collocation and finite-element results for the Burgers front.
pub const BURGERS_LITERATURE: [LiteratureEntry; 8] = [
    LiteratureEntry { method: "ChSCM", grid: "5x5", dof: 25, e_inf: Some(8.94e-8) },
    LiteratureEntry { method: "ChSCM", grid: "10x10", dof: 100, e_inf: Some(7.45e-7) },
    LiteratureEntry { method: "ChSCM", grid: "15x15", dof: 225, e_inf: None },
    LiteratureEntry { method: "ChSCM", grid: "30x30", dof: 900, e_inf: None },
    LiteratureEntry { method: "FEM", grid: "5x5", dof: 25, e_inf: Some(4.65e-8) },
    LiteratureEntry { method: "FEM", grid: "10x10", dof: 100, e_inf: Some(5.90e-9) },
    LiteratureEntry { method: "FEM", grid: "15x15", dof: 225, e_inf: Some(2.18e-9) },
    LiteratureEntry { method: "FEM", grid: "30x30", dof: 900, e_inf: Some(1.01e-9) },
];

/// Published local Taylor errors for the Burgers front at
/// `t_f = 0.25, N = 15, S = 16, D = 1, K = 10`.
pub const BURGERS_PUBLISHED: [PublishedRow; 4] = [
    PublishedRow { m: 1, dof: 21, central: 5.84e-10, backward: 5.84e-10, forward: 5.84e-10 },
    PublishedRow { m: 2, dof: 84, central: 1.12e-14, backward: 1.11e-12, forward: 6.46e-13 },
    PublishedRow { m: 3, dof: 189, central: 5.55e-17, backward: 4.18e-14, forward: 4.08e-14 },
    PublishedRow { m: 4, dof: 336, central: 1.66e-16, backward: 3.83e-15, forward: 4.21e-15 },
];

//! VB-algebroids built from 2-term representations up to homotopy.

pub mod bialgebroid;
pub mod im2form;
pub mod morphism;
pub mod poisson;
pub mod total;

pub use bialgebroid::{bialgebroid_check, schouten_low, BialgebroidData};
pub use im2form::{im2form_check, IM2Form};
pub use morphism::{theorem_main_check, vb_morphism_oracle, VBMorphismData};
pub use poisson::{poisson_dual_extract, PoissonAlgebra};
pub use total::{build_total_algebroid, frame_lemma_inputs, jacobi_oracle, lemma_check, total_differential, LemmaInput, TotalAlgebroid};

//! Words in F₂ = ⟨x, t⟩ and F_∞ = ⟨x₀, x₁, …⟩, the embedding
//! `xᵢ ↦ tⁱ x t⁻ⁱ`, balls for the induced word length, and the weight series
//! `Σ exp(-s‖g‖)` with closed-form tail bounds.

mod ball;
mod infword;
mod weights;
mod word;

pub use ball::{enumerate_ball, Ball, BallEntry, GenCount};
pub use infword::{InfWord, Syllable};
pub use weights::{sphere_count_f2, weight_tail, weight_total, WeightParams, DEFAULT_S};
pub use word::{Gen, Letter, ReducedWord};

// SPDX-License-Identifier: Apache-2.0

pub mod generator;
pub mod interpret;
pub mod kernel;
pub mod logic;
pub mod retrieval;
pub mod search;
pub mod syntax;

pub type Embedding = retrieval::Embedding<f64>;
pub type PremiseIndex = retrieval::PremiseIndex<f64>;

// SPDX-License-Identifier: Apache-2.0

pub mod corpus;
pub mod formalizer;
pub mod instances;
pub mod oracle;
pub mod evaluate;
pub mod report;

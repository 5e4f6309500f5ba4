// SPDX-License-Identifier: Apache-2.0

//! File formats shared by the `markov-embed` binary and its tests.

pub mod files;

// SPDX-License-Identifier: Apache-2.0
// Copyright The slick-packets Authors

//! Reference implementations shared by the integration tests.

#![allow(dead_code)]

pub mod brute;
pub mod des;
pub mod graphs;
pub mod minfs;
pub mod walk;

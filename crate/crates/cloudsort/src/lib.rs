// Copyright 2026 The cloudsort Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! File formats, synthetic data, the sorting pipeline and the command-line
//! front end built on `cloudsort-core`.

pub mod cli;
pub mod config;
pub mod dataset;
pub mod descriptor_file;
pub mod model_file;
pub mod numfmt;
pub mod pcd;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use cloudsort_core as core;

// Copyright 2026 The socialtag Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Run manifests: everything needed to re-run an evaluation.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use socialtag::eval::EvalConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputFile {
    pub role: String,
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: u64,
}

impl InputFile {
    pub fn hash(role: &str, path: &Path) -> anyhow::Result<Self> {
        let data = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        Ok(InputFile {
            role: role.to_owned(),
            path: path.to_owned(),
            sha256: sha256_hex(&data),
            bytes: data.len() as u64,
        })
    }
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub min_tags: usize,
    pub inputs: Vec<InputFile>,
    /// Fully resolved configuration of every experiment, in output order.
    pub runs: Vec<EvalConfig>,
}

impl RunManifest {
    pub fn new(seed: u64, min_tags: usize, inputs: Vec<InputFile>, runs: Vec<EvalConfig>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_owned(),
            version: env!("CARGO_PKG_VERSION").to_owned(),
            seed,
            min_tags,
            inputs,
            runs,
        }
    }

    pub fn input(&self, role: &str) -> Option<&Path> {
        self.inputs.iter().find(|i| i.role == role).map(|i| i.path.as_path())
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("{} is not a run manifest", path.display()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// Fails if any input file changed since the manifest was written.
    pub fn verify_inputs(&self) -> anyhow::Result<()> {
        for input in &self.inputs {
            let now = InputFile::hash(&input.role, &input.path)?;
            if now.sha256 != input.sha256 {
                bail!(
                    "{} file {} changed since the manifest was written (sha256 {} != {})",
                    input.role,
                    input.path.display(),
                    now.sha256,
                    input.sha256
                );
            }
        }
        Ok(())
    }
}

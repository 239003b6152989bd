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

//! On-disk cache of collective-knowledge models, keyed by the digest of
//! the transactions file and the recommender settings.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use log::{debug, info};
use socialtag::codetable::CodeTable;
use socialtag::corpus::TagDatabase;
use socialtag::miner::format::{read_cooccurrence, read_frequent, write_cooccurrence, write_frequent};
use socialtag::miner::{build_cooccurrence, mine_closed};
use socialtag::recommend::{AssociationModel, Method, RecommenderConfig};
use socialtag::codetable::induce;

use crate::manifest::sha256_hex;

pub struct ModelCache {
    dir: PathBuf,
}

impl ModelCache {
    pub fn open(dir: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create cache directory {}", dir.display()))?;
        Ok(ModelCache { dir: dir.to_owned() })
    }

    fn key(input_digest: &str, min_tags: usize, config: &RecommenderConfig) -> String {
        let settings = serde_json::to_string(config).expect("config serializes");
        sha256_hex(format!("{input_digest}\n{min_tags}\n{settings}").as_bytes())
    }

    fn path(&self, key: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{key}.{ext}"))
    }

    fn read(&self, key: &str, ext: &str) -> Option<String> {
        fs::read_to_string(self.path(key, ext)).ok()
    }

    fn write(&self, key: &str, ext: &str, text: &str) -> anyhow::Result<()> {
        let path = self.path(key, ext);
        // write then rename so a crash never leaves half a file behind
        let tmp = path.with_extension(format!("{ext}.tmp"));
        fs::write(&tmp, text).with_context(|| format!("cannot write {}", tmp.display()))?;
        fs::rename(&tmp, &path).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(())
    }

    /// The model for `db`, read from the cache when present and stored
    /// otherwise. Returns the model and whether it was a cache hit.
    pub fn model(
        &self,
        db: &TagDatabase,
        input_digest: &str,
        min_tags: usize,
        config: &RecommenderConfig,
    ) -> anyhow::Result<(AssociationModel, bool)> {
        let key = Self::key(input_digest, min_tags, config);
        let vocabulary = db.vocabulary();
        if let Some(model) = self.load(&key, db, config)? {
            info!("model cache hit {key}");
            return Ok((model, true));
        }
        debug!("model cache miss {key}");
        let index = build_cooccurrence(db, config.mining.top_m)?;
        self.write(&key, "cooc", &write_cooccurrence(vocabulary, &index))?;
        let model = match config.method {
            Method::Par => AssociationModel::Par { index },
            Method::Nar => {
                let frequent = mine_closed(db, &config.mining)?;
                self.write(&key, "closed", &write_frequent(vocabulary, &frequent))?;
                AssociationModel::Nar { index, frequent }
            }
            Method::Far => {
                let candidates = mine_closed(db, &config.ct_mining)?;
                let table = induce(db, &candidates)?;
                self.write(&key, "ct", &table.write(vocabulary))?;
                AssociationModel::Far {
                    index,
                    table,
                    max_len: config.ct_mining.max_len,
                }
            }
        };
        Ok((model, false))
    }

    fn load(
        &self,
        key: &str,
        db: &TagDatabase,
        config: &RecommenderConfig,
    ) -> anyhow::Result<Option<AssociationModel>> {
        let vocabulary = db.vocabulary();
        let Some(cooc) = self.read(key, "cooc") else {
            return Ok(None);
        };
        let index = read_cooccurrence(vocabulary, &cooc)?;
        Ok(match config.method {
            Method::Par => Some(AssociationModel::Par { index }),
            Method::Nar => match self.read(key, "closed") {
                Some(text) => Some(AssociationModel::Nar {
                    index,
                    frequent: read_frequent(vocabulary, &text)?,
                }),
                None => None,
            },
            Method::Far => match self.read(key, "ct") {
                Some(text) => Some(AssociationModel::Far {
                    index,
                    table: CodeTable::read(vocabulary, &text)?,
                    max_len: config.ct_mining.max_len,
                }),
                None => None,
            },
        })
    }
}

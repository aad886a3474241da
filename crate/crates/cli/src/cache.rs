//! Content-addressed cache for resolvents and `π` sequences.

use std::fs;
use std::path::{Path, PathBuf};

use pinf_core::catalog::Problem;
use pinf_core::perturbation::{compute_pi_on, PiDocument, PiSequence};
use pinf_core::poisson::ZTensor;
use pinf_core::resolvent::{Resolvent, ResolventDocument, TruncationParams};
use pinf_core::{serialize, Result};
use sha2::{Digest, Sha256};

pub struct Cache {
    root: Option<PathBuf>,
}

impl Cache {
    pub fn new(root: Option<PathBuf>) -> Cache {
        Cache { root }
    }

    fn path(&self, kind: &str, key: &str) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(format!("{kind}-{key}.json")))
    }

    fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Option<T> {
        let text = fs::read_to_string(path).ok()?;
        serde_json::from_str(&text).ok()
    }

    fn store<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_string_pretty(value)?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// The resolvent of the problem's ideal, from the cache when present.
    /// Unreadable or mismatching entries are rebuilt and overwritten.
    pub fn resolvent(&self, problem: &Problem, params: TruncationParams) -> Result<Resolvent> {
        let key = Resolvent::input_hash(&problem.ideal, &params);
        let path = self.path("resolvent", &key);
        if let Some(path) = &path {
            if let Some(doc) = Cache::load::<ResolventDocument>(path) {
                if let Ok(r) = Resolvent::from_document(&problem.ideal, &doc) {
                    return Ok(r);
                }
            }
        }
        let r = Resolvent::build(&problem.ideal, params)?;
        if let Some(path) = &path {
            Cache::store(path, &r.to_document())?;
        }
        Ok(r)
    }

    pub fn pi_sequence(&self, problem: &Problem, z: &ZTensor, params: TruncationParams) -> Result<PiSequence> {
        let params = TruncationParams { max_level: params.max_level.max(2), ..params };
        let r = self.resolvent(problem, params)?;
        let path = self.path("pi", &pi_key(problem, z, &params));
        if let Some(path) = &path {
            if let Some(doc) = Cache::load::<PiDocument>(path) {
                if let Ok(pis) = doc.multiderivations(r.table()) {
                    return Ok(PiSequence { table: r.table().clone(), params, pis, certificates: doc.certificates });
                }
            }
        }
        let seq = compute_pi_on(&r, &problem.poisson, z)?;
        if let Some(path) = &path {
            Cache::store(path, &seq.to_document())?;
        }
        Ok(seq)
    }
}

fn pi_key(problem: &Problem, z: &ZTensor, params: &TruncationParams) -> String {
    let t = problem.table();
    let mut h = Sha256::new();
    h.update(Resolvent::input_hash(&problem.ideal, params));
    h.update(format!("p {}\n", problem.poisson.degree()));
    for (&(i, j), v) in problem.poisson.entries() {
        h.update(format!("l {i} {j} {}\n", serialize(v, t)));
    }
    for (&(i, mu, nu), v) in z.entries() {
        h.update(format!("z {i} {mu} {nu} {}\n", serialize(v, t)));
    }
    hex::encode(h.finalize())
}

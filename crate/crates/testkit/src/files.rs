use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of every file under `dir` (relative path and contents, in sorted
/// order), skipping files whose name is in `skip`.
pub fn hash_tree(dir: &Path, skip: &[&str]) -> String {
    let mut files = Vec::new();
    collect(dir, dir, skip, &mut files);
    files.sort();
    let mut hasher = Sha256::new();
    for (rel, path) in files {
        hasher.update(rel.as_bytes());
        hasher.update([0]);
        hasher.update(sha256_hex(&fs::read(path).unwrap()).as_bytes());
    }
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn collect(root: &Path, dir: &Path, skip: &[&str], out: &mut Vec<(String, std::path::PathBuf)>) {
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect(root, &path, skip, out);
        } else if !skip.iter().any(|s| path.file_name().is_some_and(|n| n == *s)) {
            let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
            out.push((rel, path));
        }
    }
}

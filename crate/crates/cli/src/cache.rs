use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use turnpoint::schrodinger::{EigenStore, Eigenpair};

/// Content-addressed directory of eigenpairs: one JSON file per sha256 of
/// the solve key.
pub struct DiskCache {
    dir: PathBuf,
    writer: Mutex<()>,
}

impl DiskCache {
    pub fn open(dir: &Path) -> std::io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(DiskCache { dir: dir.to_path_buf(), writer: Mutex::new(()) })
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        let digest = Sha256::digest(key.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.dir.join(format!("{hex}.json"))
    }

    pub fn len(&self) -> usize {
        std::fs::read_dir(&self.dir).map(|d| d.filter_map(Result::ok).filter(|e| e.path().extension().is_some_and(|x| x == "json")).count()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl EigenStore for DiskCache {
    fn load(&self, key: &str) -> Option<Eigenpair> {
        let text = std::fs::read_to_string(self.path_for(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    fn store(&self, key: &str, pair: &Eigenpair) {
        let Ok(text) = serde_json::to_string(pair) else { return };
        let path = self.path_for(key);
        let _guard = self.writer.lock().unwrap();
        let tmp = path.with_extension("tmp");
        if std::fs::write(&tmp, text).is_ok() {
            let _ = std::fs::rename(&tmp, &path);
        }
    }
}

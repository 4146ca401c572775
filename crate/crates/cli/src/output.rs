use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::Manifest;
use crate::error::{CliError, CliResult};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "SPINORBIT_OUT";
pub const DEFAULT_OUT: &str = "out";
pub const MANIFEST: &str = "manifest.conf";

pub fn default_out_dir() -> String {
    std::env::var(OUT_ENV)
        .ok()
        .filter(|v| !v.is_empty())
        .unwrap_or_else(|| DEFAULT_OUT.to_string())
}

/// Output directory that refuses to clobber files unless forced.
pub struct OutputDir {
    root: PathBuf,
    force: bool,
}

impl OutputDir {
    /// Checks up front that none of `files` (plus the manifest) exist.
    pub fn prepare(root: &Path, force: bool, files: &[&str]) -> CliResult<Self> {
        if root.exists() && !root.is_dir() {
            return Err(CliError::usage(format!(
                "output path {} is not a directory",
                root.display()
            )));
        }
        if !force {
            for name in files.iter().chain(std::iter::once(&MANIFEST)) {
                let p = root.join(name);
                if p.exists() {
                    return Err(CliError::usage(format!(
                        "{} already exists (use --force to overwrite)",
                        p.display()
                    )));
                }
            }
        }
        fs::create_dir_all(root)
            .map_err(|e| CliError::usage(format!("cannot create {}: {e}", root.display())))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            force,
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> CliResult<()> {
        let p = self.path(name);
        if !self.force && p.exists() {
            return Err(CliError::usage(format!(
                "{} already exists (use --force to overwrite)",
                p.display()
            )));
        }
        let mut f = fs::File::create(&p)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display())))?;
        f.write_all(bytes)
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", p.display())))
    }

    pub fn write_manifest(&self, manifest: &Manifest) -> CliResult<()> {
        self.write(MANIFEST, manifest.render().as_bytes())
    }
}

//! Output files: deterministic number formatting, CSV assembly and atomic
//! writes into the output directory.

use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Environment variable that overrides the configured output directory.
pub const OUT_DIR_ENV: &str = "TIMEBIN_QWALK_OUT";
pub const DEFAULT_OUT_DIR: &str = "timebin-qwalk-out";

/// `--out`, then [`OUT_DIR_ENV`], then the config, then [`DEFAULT_OUT_DIR`].
pub fn resolve_out_dir(
    cli: Option<&Path>,
    env: Option<OsString>,
    config: Option<&Path>,
) -> PathBuf {
    if let Some(p) = cli {
        return p.to_path_buf();
    }
    if let Some(p) = env.filter(|v| !v.is_empty()) {
        return PathBuf::from(p);
    }
    config.map_or_else(|| PathBuf::from(DEFAULT_OUT_DIR), Path::to_path_buf)
}

/// Shortest round-trip decimal, switching to exponent form for very small or
/// very large magnitudes. `-0` prints as `0`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    let a = x.abs();
    if (1e-5..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// One file to be written, fully rendered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

/// CSV table built in memory.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(header).expect("writing to memory");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("writing to memory");
    }

    pub fn finish(self, name: &str) -> OutputFile {
        let bytes = self.writer.into_inner().expect("flushing to memory");
        OutputFile {
            name: name.to_owned(),
            contents: String::from_utf8(bytes).expect("fields are UTF-8"),
        }
    }
}

/// Writes every file to a hidden temporary name first and renames them all
/// only once every write has succeeded.
pub fn write_all(dir: &Path, files: &[OutputFile]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let pid = std::process::id();
    let mut staged = Vec::with_capacity(files.len());
    let result = (|| {
        for f in files {
            let tmp = dir.join(format!(".{}.{pid}.tmp", f.name));
            staged.push(tmp.clone());
            fs::write(&tmp, f.contents.as_bytes())?;
        }
        for (f, tmp) in files.iter().zip(&staged) {
            fs::rename(tmp, dir.join(&f.name))?;
        }
        Ok(())
    })();
    if result.is_err() {
        for tmp in &staged {
            let _ = fs::remove_file(tmp);
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(0.25), "0.25");
        assert_eq!(fmt_f64(-0.0), "0");
        assert_eq!(fmt_f64(18.0), "18");
        assert_eq!(fmt_f64(1e-20), "1e-20");
        assert_eq!(fmt_f64(-8.201), "-8.201");
        assert_eq!(fmt_f64(2.6e-20), "2.6e-20");
        for x in [0.1 + 0.2, 1.0 / 3.0, 7.25e-7, 123456.789] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn out_dir_precedence() {
        let cli = Path::new("cli");
        let cfg = Path::new("cfg");
        let env = || Some(OsString::from("env"));
        assert_eq!(resolve_out_dir(Some(cli), env(), Some(cfg)), cli);
        assert_eq!(resolve_out_dir(None, env(), Some(cfg)), Path::new("env"));
        assert_eq!(resolve_out_dir(None, Some(OsString::new()), Some(cfg)), cfg);
        assert_eq!(
            resolve_out_dir(None, None, None),
            Path::new(DEFAULT_OUT_DIR)
        );
    }

    #[test]
    fn table_rendering() {
        let mut t = Table::new(&["a", "b"]);
        t.row(["1", "x,y"]);
        let f = t.finish("t.csv");
        assert_eq!(f.contents, "a,b\n1,\"x,y\"\n");
    }

    #[test]
    fn atomic_write_leaves_no_temporaries() {
        let dir = tempfile::tempdir().unwrap();
        let files = [
            OutputFile {
                name: "a.csv".into(),
                contents: "x\n".into(),
            },
            OutputFile {
                name: "b.csv".into(),
                contents: "y\n".into(),
            },
        ];
        write_all(dir.path(), &files).unwrap();
        let mut names: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        assert_eq!(names, ["a.csv", "b.csv"]);
        assert_eq!(fs::read_to_string(dir.path().join("b.csv")).unwrap(), "y\n");
    }
}

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub struct Cli {
    args: Vec<String>,
}

pub fn cli() -> Cli {
    Cli { args: Vec::new() }
}

impl Cli {
    pub fn args(mut self, args: &[&str]) -> Self {
        self.args.extend(args.iter().map(|a| a.to_string()));
        self
    }

    pub fn run(&self) -> Run {
        let output = Command::new(env!("CARGO_BIN_EXE_chipfire")).args(&self.args).output().expect("binary runs");
        Run { args: self.args.join(" "), output }
    }

    pub fn passes(&self) -> Run {
        self.exits(0)
    }

    pub fn exits(&self, code: i32) -> Run {
        let run = self.run();
        assert_eq!(
            run.output.status.code(),
            Some(code),
            "`{}`\nstdout:\n{}\nstderr:\n{}",
            run.args,
            run.stdout(),
            run.stderr()
        );
        run
    }
}

pub struct Run {
    args: String,
    pub output: Output,
}

impl Run {
    pub fn stdout(&self) -> String {
        String::from_utf8_lossy(&self.output.stdout).into_owned()
    }

    pub fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.output.stderr).into_owned()
    }

    pub fn stdout_has(self, needle: &str) -> Self {
        assert!(self.stdout().contains(needle), "`{}`: stdout lacks {needle:?}:\n{}", self.args, self.stdout());
        self
    }

    pub fn stderr_has(self, needle: &str) -> Self {
        assert!(self.stderr().contains(needle), "`{}`: stderr lacks {needle:?}:\n{}", self.args, self.stderr());
        self
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::from_str(&self.stdout()).expect("stdout is JSON")
    }

    /// Compares stdout with `tests/golden/<name>`; `CHIPFIRE_BLESS=1`
    /// rewrites the file instead.
    pub fn matches_golden(self, name: &str) -> Self {
        let path = golden_path(name);
        if std::env::var_os("CHIPFIRE_BLESS").is_some() {
            std::fs::write(&path, self.stdout()).unwrap();
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(self.stdout(), want, "`{}` differs from {name}", self.args);
        self
    }
}

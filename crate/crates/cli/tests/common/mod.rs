#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use git2::{Commit, IndexAddOption, Oid, Repository, Signature, Time};
use presti_core::DatasetRecord;

pub fn presti(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_presti"))
        .args(args)
        .output()
        .expect("presti runs")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub struct Fixture {
    pub repo: Repository,
    pub dir: PathBuf,
    clock: i64,
}

impl Fixture {
    pub fn init(dir: &Path) -> Self {
        let repo = Repository::init(dir).expect("init");
        Self {
            repo,
            dir: dir.to_path_buf(),
            clock: 1_700_000_000,
        }
    }

    /// Write (or with `None`, delete) files, then commit the whole work tree.
    /// `update_head` false leaves the commit dangling (for side branches).
    pub fn commit(
        &mut self,
        files: &[(&str, Option<&str>)],
        message: &str,
        parents: &[Oid],
        update_head: bool,
    ) -> Oid {
        for (path, content) in files {
            let full = self.dir.join(path);
            match content {
                Some(text) => {
                    std::fs::create_dir_all(full.parent().unwrap()).unwrap();
                    std::fs::write(&full, text).unwrap();
                }
                None => std::fs::remove_file(&full).unwrap(),
            }
        }
        let mut index = self.repo.index().unwrap();
        index.add_all(["*"], IndexAddOption::DEFAULT, None).unwrap();
        index.update_all(["*"], None).unwrap();
        index.write().unwrap();
        let tree = self.repo.find_tree(index.write_tree().unwrap()).unwrap();
        self.clock += 60;
        let sig = Signature::new("Dev", "dev@example.com", &Time::new(self.clock, 0)).unwrap();
        let parents: Vec<Commit> = parents
            .iter()
            .map(|p| self.repo.find_commit(*p).unwrap())
            .collect();
        let refs: Vec<&Commit> = parents.iter().collect();
        let head = if update_head { Some("HEAD") } else { None };
        self.repo
            .commit(head, &sig, &sig, message, &tree, &refs)
            .unwrap()
    }
}

pub const CLASS_V1: &str = "class Cart {\n    int total() {\n        return 0;\n    }\n}\n";
pub const CLASS_V2: &str =
    "class Cart {\n    int total() {\n        int sum = 0;\n        return sum;\n    }\n}\n";
pub const CLASS_V3: &str =
    "class Cart {\n    int total() {\n        int sum = 0;\n        return sum;\n    }\n    void clear() {\n    }\n}\n";

/// Five commits: root, feature, side-branch commit, merge, revert.
/// The default filter keeps three of them.
pub fn five_commit_repo(dir: &Path) -> Fixture {
    let mut f = Fixture::init(dir);
    let c1 = f.commit(
        &[("src/Cart.java", Some(CLASS_V1))],
        "Initial import of cart",
        &[],
        true,
    );
    let c2 = f.commit(
        &[("src/Cart.java", Some(CLASS_V2))],
        "TODO: hack around totals, refactor later",
        &[c1],
        true,
    );
    let c3 = f.commit(
        &[("README.md", Some("cart\n"))],
        "fix typo in readme",
        &[c2],
        false,
    );
    let c4 = f.commit(&[], "Merge branch 'docs'", &[c2, c3], true);
    f.commit(
        &[("src/Cart.java", Some(CLASS_V1))],
        &format!("Revert \"TODO: hack around totals\"\n\nThis reverts commit {c2}.\n"),
        &[c4],
        true,
    );
    f
}

pub fn write_jsonl(path: &Path, records: &[DatasetRecord]) {
    let file = std::fs::File::create(path).unwrap();
    presti_core::write_dataset(std::io::BufWriter::new(file), records).unwrap();
}

pub fn read_jsonl(path: &Path) -> Vec<DatasetRecord> {
    presti_core::read_dataset(std::io::BufReader::new(std::fs::File::open(path).unwrap())).unwrap()
}

pub fn schema_validator(name: &str) -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas")
        .join(name);
    let schema: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).expect("schema compiles")
}

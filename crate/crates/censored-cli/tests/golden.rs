//! Golden-output checks: one versioned config + expected output per
//! subcommand. Each run must reproduce its golden file byte for byte.
//!
//! To regenerate after an intentional output change:
//!
//! ```text
//! UPDATE_GOLDEN=1 cargo test -p censored-cli --test golden
//! ```

use std::path::PathBuf;
use std::process::Command;

const TASKS: &[&str] = &[
    "special", "apply", "solve", "mc", "barrier", "analyze", "selftest",
];

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden")
}

fn run_task(task: &str, cfg: &PathBuf) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_censored"))
        .arg(task)
        .arg(cfg)
        .output()
        .expect("binary runs")
}

#[test]
fn every_subcommand_reproduces_its_golden_output() {
    let dir = golden_dir();
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for task in TASKS {
        let cfg = dir.join(format!("{task}.cfg"));
        let expected_path = dir.join(format!("{task}.out"));
        let out = run_task(task, &cfg);
        assert!(
            out.status.success(),
            "{task} exited with {:?}; stderr:\n{}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        );
        if update {
            std::fs::write(&expected_path, &out.stdout).expect("write golden");
            continue;
        }
        let expected = std::fs::read(&expected_path).expect("golden file exists");
        assert!(
            out.stdout == expected,
            "{task} output differs from {}:\n--- expected ---\n{}\n--- actual ---\n{}",
            expected_path.display(),
            String::from_utf8_lossy(&expected),
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn golden_runs_are_reproducible_across_invocations() {
    let dir = golden_dir();
    for task in ["mc", "selftest"] {
        let cfg = dir.join(format!("{task}.cfg"));
        let first = run_task(task, &cfg);
        let second = run_task(task, &cfg);
        assert!(first.status.success() && second.status.success());
        assert!(
            first.stdout == second.stdout,
            "{task}: two runs with identical config and seed differ"
        );
    }
}

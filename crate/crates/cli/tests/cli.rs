use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmdp-lab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("TMDP_LAB_SEED")
        .output()
        .unwrap()
}

fn bare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmdp-lab"))
        .args(args)
        .env_remove("TMDP_LAB_SEED")
        .output()
        .unwrap()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

const SHORT: [&str; 4] = ["--set", "steps=400", "--set", "eval_window=40"];

#[test]
fn run_writes_csv_and_prints_means() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["run", "ipd_fpq", "--quiet"];
    args.extend(SHORT);
    let o = lab(&args, dir.path());
    assert!(o.status.success(), "{}", text(&o.stderr));
    let stdout = text(&o.stdout);
    assert!(stdout.contains("dm"), "{stdout}");
    assert!(o.stderr.is_empty(), "--quiet leaves stderr empty: {}", text(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("ipd_fpq.csv")).unwrap();
    assert!(csv.starts_with("step,seed,r_dm,r_opp,ma_r_dm,ma_r_opp\n"));
    assert_eq!(csv.lines().count(), 1 + 10 * 400 + 400);
    assert!(dir.path().join("ipd_fpq.toml").exists());
}

#[test]
fn seeds_override_and_flag_forms() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["run", "--preset", "ipd_fpq", "--set", "seeds=3", "--quiet"];
    args.extend(SHORT);
    let o = lab(&args, dir.path());
    assert!(o.status.success(), "{}", text(&o.stderr));
    assert!(text(&o.stdout).contains("over 3 seeds"));
    let csv = std::fs::read_to_string(dir.path().join("ipd_fpq.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 4 * 400);

    let mut args = vec!["run", "ipd_fpq", "--seeds", "5..7", "--quiet"];
    args.extend(SHORT);
    assert!(text(&lab(&args, dir.path()).stdout).contains("over 2 seeds"));
    let csv = std::fs::read_to_string(dir.path().join("ipd_fpq.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("0,5,"));
}

#[test]
fn output_is_stable_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut args = vec!["run", "chicken_wolf_l2", "--seeds", "1,4", "--quiet"];
    args.extend(SHORT);
    let (oa, ob) = (lab(&args, a.path()), lab(&args, b.path()));
    assert_eq!(oa.stdout, ob.stdout);
    assert_eq!(
        std::fs::read(a.path().join("chicken_wolf_l2.csv")).unwrap(),
        std::fs::read(b.path().join("chicken_wolf_l2.csv")).unwrap()
    );
}

#[test]
fn env_seed_sets_first_seed() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_tmdp-lab"))
        .args(["run", "ipd_qq", "--set", "seeds=1", "--quiet"])
        .args(SHORT)
        .arg("--out")
        .arg(dir.path())
        .env("TMDP_LAB_SEED", "42")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", text(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("ipd_qq.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("0,42,"));
}

#[test]
fn config_file_layering() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mine.toml");
    std::fs::write(&cfg, "name = \"mine\"\nseeds = 2\nsteps = 300\neval_window = 30\n").unwrap();
    let o = lab(
        &["run", "ipd_qq", "--config", cfg.to_str().unwrap(), "--set", "seeds=1", "--quiet"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", text(&o.stderr));
    assert!(text(&o.stdout).starts_with("mine:"));
    assert!(text(&o.stdout).contains("over 1 seeds"));
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = lab(&["run", "no_such_preset"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = text(&o.stderr);
    assert!(err.contains("ipd_fpq") && err.contains("foe_spatial_l2"), "{err}");
    assert!(o.stdout.is_empty());

    let o = lab(&["run", "ipd_fpq", "--set", "agent_a.alpha=3"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("agent_a.alpha"));

    let o = lab(&["run", "ipd_fpq", "--seeds", "9..2"], dir.path());
    assert_eq!(o.status.code(), Some(1));

    let o = lab(&["run", "--config", "/nonexistent/x.toml"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let mut args = vec!["run", "ipd_qq", "--set", "seeds=1", "--quiet"];
    args.extend(SHORT);
    let o = lab(&args, &blocker.join("sub"));
    assert_eq!(o.status.code(), Some(2), "{}", text(&o.stderr));
}

#[test]
fn verify_passes_and_is_reproducible() {
    let a = bare(&["verify"]);
    assert_eq!(a.status.code(), Some(0), "{}", text(&a.stdout));
    let report = text(&a.stdout);
    for name in ["contraction_h", "contraction_hbar", "fixed_point_h", "fixed_point_hbar", "bloom_oracle", "forget_closed_form"] {
        assert!(report.contains(&format!("PASS {name}")), "{report}");
    }
    assert_eq!(a.stdout, bare(&["verify"]).stdout);
}

#[test]
fn verify_flags_unit_discount() {
    let o = bare(&["verify", "--inject-gamma", "1.0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(text(&o.stdout).contains("FAIL contraction_h"));
}

#[test]
fn sweep_runs_each_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep", "ipd_qq", "--set", "seeds=1", "--grid", "agent_a.alpha=0.1,0.3", "--quiet"];
    args.extend(SHORT);
    let o = lab(&args, dir.path());
    assert!(o.status.success(), "{}", text(&o.stderr));
    assert_eq!(text(&o.stdout).lines().count(), 2);
    assert!(dir.path().join("ipd_qq__agent_a.alpha=0.1.csv").exists());
    assert!(dir.path().join("ipd_qq__agent_a.alpha=0.3.csv").exists());
}

#[test]
fn list_presets_lists_everything() {
    let o = bare(&["list-presets"]);
    let names = text(&o.stdout);
    assert!(o.status.success());
    assert_eq!(names.lines().count(), 17);
    assert!(names.lines().any(|l| l == "memoryless_tft"));
}

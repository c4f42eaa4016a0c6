//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! with the measured values and exits nonzero if any criterion fails.

use tmdp_core::harness::{aggregate_runs, presets, resolve_config, run_experiment, write_csv};
use tmdp_core::verify::{run_verify, VerifyOptions};

fn report(id: &str, what: &str, ok: bool, detail: String) -> bool {
    println!("{} [{id}] {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

/// Cross-seed means of (DM, opponent) over the preset's evaluation window.
fn final_means(preset: &str, overrides: &[&str]) -> (f64, f64) {
    let overrides: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    let cfg = resolve_config(Some(preset), None, &overrides).unwrap();
    assert_eq!(cfg.seed_list().len(), 10, "{preset} should run 10 seeds");
    let logs = run_experiment(&cfg).unwrap();
    let summary = aggregate_runs(&logs, cfg.window).unwrap();
    summary.final_window_mean(cfg.eval_window())
}

fn c01_ipd_fpq_reaches_mutual_defection() -> bool {
    let (dm, opp) = final_means("ipd_fpq", &[]);
    let inside = |x: f64| (-2.4..=-1.6).contains(&x);
    report("1", "IPD fpq vs Q, both in [-2.4, -1.6]", inside(dm) && inside(opp), format!("dm {dm:.4}, opp {opp:.4}"))
}

fn c02_stag_hunt_fpq_reaches_stag() -> bool {
    let (dm, opp) = final_means("ish_fpq", &[]);
    report("2", "ISH fpq vs Q, both >= 1.7", dm >= 1.7 && opp >= 1.7, format!("dm {dm:.4}, opp {opp:.4}"))
}

fn c03_chicken_fpq_reaches_dc() -> bool {
    let (dm, opp) = final_means("chicken_fpq", &[]);
    report(
        "3",
        "chicken fpq vs Q, dm >= 0.6 and opp <= -1.2",
        dm >= 0.6 && opp <= -1.2,
        format!("dm {dm:.4}, opp {opp:.4}"),
    )
}

fn c04_chicken_against_wolf() -> bool {
    let (dm1, opp1) = final_means("chicken_wolf_l1", &[]);
    let (dm2, opp2) = final_means("chicken_wolf_l2", &[]);
    report(
        "4",
        "chicken vs WoLF-PHC, level-1 exploited and level-2 ahead",
        dm1 < opp1 && dm2 > opp2,
        format!("level-1 dm {dm1:.4} vs {opp1:.4}; level-2 dm {dm2:.4} vs {opp2:.4}"),
    )
}

fn c05_memory_against_tft() -> bool {
    let (mem, _) = final_means("memory1_tft", &[]);
    let (memless, _) = final_means("memoryless_tft", &[]);
    report(
        "5",
        "TFT, memory-1 in [-1.3, -0.8] and memoryless <= -1.7",
        (-1.3..=-0.8).contains(&mem) && memless <= -1.7,
        format!("memory-1 {mem:.4}, memoryless {memless:.4}"),
    )
}

fn c06_stateless_foe() -> bool {
    let (indq, _) = final_means("foe_stateless_indq", &[]);
    let (l1, _) = final_means("foe_stateless_l1forget", &[]);
    let (l2, _) = final_means("foe_stateless_l2", &[]);
    report(
        "6",
        "stateless foe, Q <= -20, level-1 forget in [-10, 10], level-2 >= 5",
        indq <= -20.0 && (-10.0..=10.0).contains(&l1) && l2 >= 5.0,
        format!("Q {indq:.4}, level-1 forget {l1:.4}, level-2 {l2:.4}"),
    )
}

fn c07_spatial_foe() -> bool {
    let (indq, _) = final_means("foe_spatial_indq", &[]);
    let (l2, _) = final_means("foe_spatial_l2", &[]);
    report(
        "7",
        "spatial foe, Q negative and level-2 positive",
        indq < 0.0 && l2 > 0.0,
        format!("Q {indq:.4}, level-2 {l2:.4}"),
    )
}

fn c08_reward_scalings() -> bool {
    let (binary, _) = final_means("foe_scalings", &[]);
    let (sign, _) = final_means("foe_scalings_pm1", &[]);
    report(
        "8",
        "stateless foe level-2 with {0,1} and {-1,1} adversary rewards stays positive",
        binary > 0.0 && sign > 0.0,
        format!("{{0,1}} {binary:.4}, {{-1,1}} {sign:.4}"),
    )
}

fn c09_operator_properties() -> bool {
    let r = run_verify(&VerifyOptions::default());
    let names = ["contraction_h", "contraction_hbar", "fixed_point_h", "fixed_point_hbar"];
    let ok = names.iter().all(|n| r.get(n).unwrap().passed);
    let detail = names
        .iter()
        .map(|n| format!("{n}: {}", r.get(n).unwrap().detail))
        .collect::<Vec<_>>()
        .join("; ");
    report("9", "contraction and fixed points over 100 random specs", ok, detail)
}

fn c10_belief_oracles() -> bool {
    let r = run_verify(&VerifyOptions::default());
    let (bloom, forget) = (r.get("bloom_oracle").unwrap(), r.get("forget_closed_form").unwrap());
    report(
        "10",
        "bloom model matches exact counts, forget totals match closed form",
        bloom.passed && forget.passed,
        format!("{}; {}", bloom.detail, forget.detail),
    )
}

fn c11_csv_is_byte_identical() -> bool {
    let dir = tempfile::tempdir().unwrap();
    let mut differing: Vec<String> = Vec::new();
    for name in presets::preset_names() {
        let cfg = resolve_config(Some(name), None, &[]).unwrap();
        let mut bytes = Vec::new();
        for run in 0..2 {
            let logs = run_experiment(&cfg).unwrap();
            let path = dir.path().join(format!("{name}.{run}.csv"));
            write_csv(&aggregate_runs(&logs, cfg.window).unwrap(), &path).unwrap();
            bytes.push(std::fs::read(&path).unwrap());
        }
        if bytes[0] != bytes[1] {
            differing.push(name.to_string());
        }
    }
    report(
        "11",
        "every preset writes byte-identical CSV twice",
        differing.is_empty(),
        format!("{} presets, differing: {differing:?}", presets::preset_names().len()),
    )
}

fn main() {
    let checks: [fn() -> bool; 11] = [
        c01_ipd_fpq_reaches_mutual_defection,
        c02_stag_hunt_fpq_reaches_stag,
        c03_chicken_fpq_reaches_dc,
        c04_chicken_against_wolf,
        c05_memory_against_tft,
        c06_stateless_foe,
        c07_spatial_foe,
        c08_reward_scalings,
        c09_operator_properties,
        c10_belief_oracles,
        c11_csv_is_byte_identical,
    ];
    let failed = checks.iter().filter(|check| !check()).count();
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

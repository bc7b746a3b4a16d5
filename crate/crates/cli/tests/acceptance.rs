//! End-to-end acceptance run: drives the compiled `mldkit` binary through
//! the verification suite, one criterion per line, and exits nonzero if any
//! criterion fails.  Run with `cargo test --test acceptance`.

use std::process::Command;
use std::time::Instant;

use serde_json::Value;

const SEED: &str = "42";

struct Criterion {
    number: usize,
    /// Suite check carrying the criterion.
    check: &'static str,
    /// `--count` to request; fixed-size checks ignore it.
    count: &'static str,
    /// Minimum number of instances the check must have exercised.
    floor: u64,
    /// Wall-clock budget in seconds, where the contract names one.
    budget: Option<f64>,
    what: &'static str,
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        number: 1,
        check: "anchors",
        count: "100",
        floor: 48,
        budget: Some(1.0),
        what: "exact rational anchor identities",
    },
    Criterion {
        number: 2,
        check: "mld-box-oracle",
        count: "200",
        floor: 200,
        budget: Some(60.0),
        what: "engine equals brute-force box enumeration",
    },
    Criterion {
        number: 3,
        check: "lct-consistency",
        count: "100",
        floor: 100,
        budget: None,
        what: "thresholds agree across LP, polyhedron membership, and the engine",
    },
    Criterion {
        number: 4,
        check: "tower-gates",
        count: "100",
        floor: 100,
        budget: None,
        what: "tower profiles gate on the point order of the pair",
    },
    Criterion {
        number: 5,
        check: "mld-convexity",
        count: "100",
        floor: 100,
        budget: None,
        what: "mld is convex along exponent mixtures",
    },
    Criterion {
        number: 6,
        check: "canonize-lemmas",
        count: "100",
        floor: 50,
        budget: Some(300.0),
        what: "canonize terminates, lemmas pass, canonical outputs re-verified",
    },
    Criterion {
        number: 7,
        check: "half-dichotomy",
        count: "100",
        floor: 100,
        budget: None,
        what: "one-half dichotomy on curve-centre instances",
    },
    Criterion {
        number: 8,
        check: "fractional-multiplier",
        count: "100",
        floor: 4,
        budget: None,
        what: "fractional multiplier drops mld by 1/n with a shared witness",
    },
    Criterion {
        number: 9,
        check: "classifier-constraint",
        count: "100",
        floor: 100,
        budget: None,
        what: "classifier weight constraint and saturated lc sweep",
    },
    Criterion {
        number: 10,
        check: "tower-continued-fraction",
        count: "100",
        floor: 48,
        budget: None,
        what: "tower length equals the continued-fraction digit sum",
    },
];

fn run(bin: &str, args: &[&str]) -> (std::process::Output, f64) {
    let start = Instant::now();
    let output = Command::new(bin)
        .args(args)
        .output()
        .unwrap_or_else(|e| panic!("failed to spawn {bin}: {e}"));
    (output, start.elapsed().as_secs_f64())
}

/// Runs one suite check and returns (pass, instances, notes, elapsed).
fn run_check(bin: &str, check: &str, count: &str) -> (bool, u64, Vec<String>, f64) {
    let (output, elapsed) = run(
        bin,
        &["verify-suite", "--seed", SEED, "--count", count, "--check", check],
    );
    if !output.status.success() {
        return (
            false,
            0,
            vec![format!("exit status {:?}", output.status.code())],
            elapsed,
        );
    }
    let manifest: Value = match serde_json::from_slice(&output.stdout) {
        Ok(v) => v,
        Err(e) => return (false, 0, vec![format!("bad manifest: {e}")], elapsed),
    };
    let entry = manifest["checks"]
        .as_array()
        .and_then(|cs| cs.iter().find(|c| c["name"] == check));
    let Some(entry) = entry else {
        return (false, 0, vec!["check missing from manifest".into()], elapsed);
    };
    let pass = entry["pass"].as_bool().unwrap_or(false);
    let instances = entry["instances"].as_u64().unwrap_or(0);
    let notes = entry["notes"]
        .as_array()
        .map(|ns| {
            ns.iter()
                .filter_map(|n| n.as_str().map(str::to_owned))
                .collect()
        })
        .unwrap_or_default();
    (pass, instances, notes, elapsed)
}

/// The worked examples of the CLI contract, reproduced byte-exactly.
fn contract_examples(bin: &str) -> Result<(), String> {
    let cases: [(&[&str], &str); 2] = [
        (
            &[
                "mld",
                "--germ",
                "smooth3",
                "--ideal",
                r#"{"dim":3,"factors":[{"gens":[[1,0,0],[0,1,0],[0,0,1]],"exp":"1"}]}"#,
            ],
            r#"{"value":"2","witness":[1,1,1],"certified":true}"#,
        ),
        (
            &["tower", "--w", "3,2"],
            r#"{"tower":[[1,1],[2,1],[3,2]]}"#,
        ),
    ];
    for (args, want) in cases {
        let (output, _) = run(bin, args);
        if !output.status.success() {
            return Err(format!(
                "{:?} exited with {:?}",
                args.join(" "),
                output.status.code()
            ));
        }
        let got = String::from_utf8_lossy(&output.stdout);
        if got.trim_end() != want {
            return Err(format!("{}: got {}", args.join(" "), got.trim_end()));
        }
    }
    Ok(())
}

/// Exit-code discipline: 1 for usage errors, 2 with a structured diagnostic
/// for mathematical errors, 0 otherwise.
fn contract_exit_codes(bin: &str) -> Result<(), String> {
    let (output, _) = run(bin, &["mld", "--germ", "nonsense"]);
    if output.status.code() != Some(1) {
        return Err(format!(
            "usage error exited with {:?}, want 1",
            output.status.code()
        ));
    }
    let (output, _) = run(
        bin,
        &[
            "threshold",
            "--germ",
            "smooth3",
            "--ideal",
            r#"{"dim":3,"factors":[{"gens":[[9,0,0]],"exp":"1"}]}"#,
            "--target",
            "1",
        ],
    );
    if output.status.code() != Some(2) {
        return Err(format!(
            "mathematical error exited with {:?}, want 2",
            output.status.code()
        ));
    }
    let report: Value = serde_json::from_slice(&output.stdout)
        .map_err(|e| format!("exit-2 diagnostic is not JSON: {e}"))?;
    if report["error"]["domain"].as_str().is_none() || report["error"]["message"].as_str().is_none()
    {
        return Err("exit-2 diagnostic lacks error.domain/error.message".into());
    }
    Ok(())
}

/// Byte-identical reports on repeated runs with the same inputs.
fn contract_determinism(bin: &str) -> Result<(), String> {
    let args = ["verify-suite", "--seed", "7", "--count", "10"];
    let (first, _) = run(bin, &args);
    let (second, _) = run(bin, &args);
    if !first.status.success() || !second.status.success() {
        return Err("suite run failed".into());
    }
    if first.stdout != second.stdout {
        return Err("two runs with identical inputs differ".into());
    }
    Ok(())
}

fn main() {
    let bin = env!("CARGO_BIN_EXE_mldkit");
    let mut failed = 0usize;

    for c in &CRITERIA {
        let (mut pass, instances, notes, elapsed) = run_check(bin, c.check, c.count);
        let mut detail = format!("{} instances in {:.2}s", instances, elapsed);
        if instances < c.floor {
            pass = false;
            detail.push_str(&format!(" (need at least {})", c.floor));
        }
        if let Some(budget) = c.budget {
            detail.push_str(&format!(", budget {budget}s"));
            if elapsed > budget {
                pass = false;
                detail.push_str(" EXCEEDED");
            }
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!("criterion {:2}: {verdict}  {} — {detail}", c.number, c.what);
        if !pass {
            failed += 1;
            for note in notes.iter().take(4) {
                println!("              note: {note}");
            }
        }
    }

    for (what, result) in [
        ("worked examples reproduce byte-exactly", contract_examples(bin)),
        ("exit codes follow the 0/1/2 contract", contract_exit_codes(bin)),
        ("identical inputs give identical bytes", contract_determinism(bin)),
    ] {
        match result {
            Ok(()) => println!("contract    : PASS  {what}"),
            Err(e) => {
                failed += 1;
                println!("contract    : FAIL  {what} — {e}");
            }
        }
    }

    if failed == 0 {
        println!("acceptance  : all criteria pass");
    } else {
        println!("acceptance  : {failed} FAILED");
        std::process::exit(1);
    }
}

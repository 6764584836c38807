//! End-to-end exercises of the binary: exit codes, output shapes,
//! report determinism and the format/parse round trip.

use std::process::Command;

fn malcev() -> Command {
    Command::new(env!("CARGO_BIN_EXE_malcev"))
}

#[test]
fn zero_subcommand_and_exit_zero() {
    let out = malcev()
        .args(["zero", "J(x,y,z) J(x,y,z)"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "true");

    let out = malcev().args(["zero", "J(x,y,z)"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "false");
}

#[test]
fn dim_subcommand_matches_pinned_values() {
    let out = malcev().args(["dim", "1", "1", "1"]).output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "{\"dim_M\":3,\"lie_dim\":2,\"witt_dim\":2,\"dim_J\":1}"
    );
}

#[test]
fn basis_subcommand_reports_two_two_one() {
    let out = malcev().args(["basis", "2", "2", "1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"count\":2"));
    assert!(text.contains("\"spanning\":true"));
}

#[test]
fn parse_errors_exit_two() {
    let out = malcev().args(["zero", "J(x,y"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error"));

    let out = malcev().args(["zero", "w x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_identity_exits_one() {
    // Jacobi does not hold in M
    let dir = std::env::temp_dir().join("malcev-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let spec = dir.join("jacobi.json");
    std::fs::write(
        &spec,
        r#"{
  "id": "jacobi",
  "source": "J(x,y,z) = 0 (expected to fail)",
  "mode": "substitution",
  "subst_vars": [],
  "equations": [{"lhs": "J(x,y,z)", "rhs": "0"}]
}"#,
    )
    .unwrap();
    let out = malcev()
        .args(["check-identity", "--spec"])
        .arg(&spec)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("\"failed\": 1"));
}

#[test]
fn check_identity_passes_on_catalog_file() {
    let spec = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("catalog/eq.21.json");
    let out = malcev()
        .args(["check-identity", "--spec"])
        .arg(&spec)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("proved-consequence"));
}

#[test]
fn format_parse_format_is_stable() {
    use malcev_core::alphabet::Alphabet;
    use malcev_core::element::Element;
    use malcev_core::expr::FreeModel;
    use malcev_core::m7::SplitMix64;
    use malcev_core::monomial::RawTree;
    use num_rational::BigRational;

    let al = Alphabet::xyz();
    let vars: Vec<_> = al.variables().collect();
    let mut rng = SplitMix64(777);
    for _ in 0..300 {
        let mut e = Element::zero(&al);
        for _ in 0..=(rng.next_u64() % 4) {
            let degree = 1 + (rng.next_u64() % 4) as u32;
            fn build(
                rng: &mut SplitMix64,
                vars: &[malcev_core::Variable],
                degree: u32,
            ) -> RawTree {
                if degree == 1 {
                    return RawTree::Leaf(
                        vars[(rng.next_u64() % vars.len() as u64) as usize],
                    );
                }
                let left = 1 + (rng.next_u64() % (degree as u64 - 1)) as u32;
                RawTree::node(build(rng, vars, left), build(rng, vars, degree - left))
            }
            let tree = build(&mut rng, &vars, degree);
            let num = (rng.next_u64() % 11) as i64 - 5;
            let den = 1 + (rng.next_u64() % 4) as i64;
            e = e.add(&Element::from_raw(
                &al,
                &tree,
                BigRational::new(num.into(), den.into()),
            ));
        }
        let once = format!("{e}");
        let back = malcev_cli::parser::parse(&once)
            .unwrap()
            .eval(&FreeModel::new(&al))
            .unwrap();
        assert_eq!(back, e, "parse(format) is the identity on `{once}`");
        let twice = format!("{back}");
        assert_eq!(twice, once, "format is stable through a round trip");
    }
}

#[test]
fn verify_paper_reports_are_deterministic() {
    let dir = std::env::temp_dir().join("malcev-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    // a reduced sweep keeps this end-to-end check quick; determinism of
    // the full catalog is asserted in the acceptance suite
    let run = |path: &std::path::Path| {
        let out = malcev()
            .args([
                "verify-paper",
                "--dim-cap",
                "4",
                "--zero-cap",
                "7",
                "--seed",
                "7",
                "--jobs",
                "2",
                "--out",
            ])
            .arg(path)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "verify-paper failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    };
    let r1 = dir.join("r1.json");
    let r2 = dir.join("r2.json");
    run(&r1);
    run(&r2);
    let b1 = std::fs::read(&r1).unwrap();
    let b2 = std::fs::read(&r2).unwrap();
    assert_eq!(b1, b2, "reports differ between identical runs");
}

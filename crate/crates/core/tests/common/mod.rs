#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use soclab::io::{write_process, write_supermap};
use soclab::predicates::make_strongly_nonsignalling;
use soclab::supermap::{fixed_order_a_then_b, fixed_order_b_then_a, mix, SlotDims, SlotDressing};
use soclab::tensor::kron;
use soclab::{BipartiteSupermap, ComplexMatrix, Process, SystemDims, Tolerance};

pub fn q() -> SystemDims {
    SystemDims::of(&[2])
}

pub fn tol() -> Tolerance {
    Tolerance::default()
}

pub fn a_then_b() -> BipartiteSupermap {
    fixed_order_a_then_b(SlotDims::uniform(2)).unwrap()
}

pub fn b_then_a() -> BipartiteSupermap {
    fixed_order_b_then_a(SlotDims::uniform(2)).unwrap()
}

/// Affine mixture of the two orders with weight `t` on A-then-B.
pub fn order_mix(t: f64) -> BipartiteSupermap {
    mix(&[(t, a_then_b()), (1.0 - t, b_then_a())]).unwrap()
}

/// Fixed orders, five affine mixes and five slot-dressed variants.
pub fn soc2_generators() -> Vec<(String, BipartiteSupermap)> {
    let mut out = vec![
        ("a-then-b".to_string(), a_then_b()),
        ("b-then-a".to_string(), b_then_a()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 0..5 {
        let t: f64 = rng.random_range(-0.5..1.5);
        out.push((format!("mix-{k}(t={t:.3})"), order_mix(t)));
    }
    for k in 0..5u64 {
        let base = if k % 2 == 0 { a_then_b() } else { b_then_a() };
        let dressed = SlotDressing::random(&base, 300 + k)
            .unwrap()
            .apply(&base)
            .unwrap();
        out.push((format!("dressed-{k}"), dressed));
    }
    out
}

/// `Φ ↦ Tr(choi Φ)·id`: every causal Φ is sent to `d_A1 · id`.
pub fn cup_loop_supermap() -> Process {
    let choi = kron(&ComplexMatrix::identity(4), Process::identity(&q()).choi()).unwrap();
    Process::new(SystemDims::of(&[2, 2]), SystemDims::of(&[2, 2]), choi).unwrap()
}

/// `Φ ↦ Φ`, as a one-hole supermap on `(A1, A2) → (B1, B2)`.
pub fn identity_supermap() -> Process {
    let s = Process::cup(&q()).beside(&Process::cup(&q()));
    s.permute_outputs(&[0, 2, 1, 3]).unwrap().unbend(2).unwrap()
}

pub fn random_strongly_nonsignalling(seed: u64) -> Process {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qq = SystemDims::of(&[2, 2]);
    let psi_a = Process::random_causal_channel_with(&qq, &q(), None, &mut rng).unwrap();
    let psi_b = Process::random_causal_channel_with(&qq, &q(), None, &mut rng).unwrap();
    let rho = Process::random_state(&qq, 4, &mut rng).unwrap();
    make_strongly_nonsignalling(&psi_a, &psi_b, &rho, tol())
        .unwrap()
        .0
}

/// Random Hermitian matrix with entries of order one.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        soclab::C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&g + &g.adjoint()).scale_real(0.5)
}

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Writes every JSON input of the golden corpus into `dir`.
pub fn write_fixtures(dir: &Path) {
    let p = |name: &str| dir.join(name);
    write_process(&p("identity.json"), &Process::identity(&q())).unwrap();
    write_process(&p("cup_state.json"), &Process::cup(&q())).unwrap();
    write_process(&p("swap.json"), &Process::swap(&q(), &q())).unwrap();
    let sn = random_strongly_nonsignalling(7);
    write_process(&p("strongly_nonsignalling.json"), &sn).unwrap();
    let near = Process::linear_combination(&[(1.0 + 1e-4, &Process::identity(&q()))]).unwrap();
    write_process(&p("nearly_causal.json"), &near).unwrap();
    write_process(&p("identity_supermap.json"), &identity_supermap()).unwrap();
    write_process(&p("cup_loop.json"), &cup_loop_supermap()).unwrap();
    write_supermap(&p("a_then_b.json"), &a_then_b()).unwrap();
    write_supermap(&p("affine_mix.json"), &order_mix(1.5)).unwrap();
    write_supermap(&p("corrupted.json"), &a_then_b().corrupted(0.25).unwrap()).unwrap();
    // B-then-A with its inputs stored as (B2, A1, B1, A2)
    let canon = b_then_a().canonical_body().unwrap();
    let shuffled =
        BipartiteSupermap::new(canon.permute_inputs(&[3, 0, 2, 1]).unwrap(), (1, 3), (2, 0))
            .unwrap();
    write_supermap(&p("b_then_a_shuffled.json"), &shuffled).unwrap();
    std::fs::write(
        p("malformed.json"),
        "{\"in\": [2], \"out\": [2], \"choi\": [[",
    )
    .unwrap();
    for f in [
        "yanking.diag",
        "double_semicolon.diag",
        "wire_mismatch.diag",
    ] {
        std::fs::copy(fixtures_dir().join(f), p(f)).unwrap();
    }
}

/// One CLI invocation; `{dir}` in arguments is replaced by the fixture directory.
pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

pub const CORPUS: &[Case] = &[
    Case {
        name: "eval_yanking",
        args: &["eval", "{dir}/yanking.diag"],
        exit: 0,
    },
    Case {
        name: "eval_syntax_error",
        args: &["eval", "{dir}/double_semicolon.diag"],
        exit: 2,
    },
    Case {
        name: "eval_type_error",
        args: &["eval", "{dir}/wire_mismatch.diag"],
        exit: 2,
    },
    Case {
        name: "classify_identity",
        args: &["classify", "{dir}/identity.json"],
        exit: 0,
    },
    Case {
        name: "classify_cup_state",
        args: &["classify", "{dir}/cup_state.json"],
        exit: 1,
    },
    Case {
        name: "classify_strongly_nonsignalling",
        args: &["classify", "{dir}/strongly_nonsignalling.json"],
        exit: 0,
    },
    Case {
        name: "classify_swap",
        args: &["classify", "{dir}/swap.json", "--split", "1,1"],
        exit: 1,
    },
    Case {
        name: "classify_nearly_causal",
        args: &["classify", "{dir}/nearly_causal.json"],
        exit: 1,
    },
    Case {
        name: "classify_nearly_causal_loose",
        args: &["classify", "{dir}/nearly_causal.json", "--eps", "1e-3"],
        exit: 0,
    },
    Case {
        name: "classify_missing",
        args: &["classify", "{dir}/missing.json"],
        exit: 3,
    },
    Case {
        name: "classify_malformed",
        args: &["classify", "{dir}/malformed.json"],
        exit: 2,
    },
    Case {
        name: "soc_identity",
        args: &["soc", "{dir}/identity_supermap.json", "--slots", "1,1"],
        exit: 0,
    },
    Case {
        name: "soc_cup_loop",
        args: &["soc", "{dir}/cup_loop.json", "--slots", "1,1"],
        exit: 1,
    },
    Case {
        name: "soc2_a_then_b",
        args: &["soc2", "{dir}/a_then_b.json"],
        exit: 0,
    },
    Case {
        name: "soc2_affine_mix",
        args: &["soc2", "{dir}/affine_mix.json"],
        exit: 0,
    },
    Case {
        name: "soc2_shuffled_slots",
        args: &["soc2", "{dir}/b_then_a_shuffled.json"],
        exit: 0,
    },
    Case {
        name: "soc2_corrupted",
        args: &["soc2", "{dir}/corrupted.json"],
        exit: 1,
    },
    Case {
        name: "verify_theorem1",
        args: &[
            "verify",
            "theorem1",
            "{dir}/a_then_b.json",
            "--trials",
            "5",
            "--seed",
            "1",
        ],
        exit: 0,
    },
    Case {
        name: "verify_theorem1_corrupted",
        args: &[
            "verify",
            "theorem1",
            "{dir}/corrupted.json",
            "--trials",
            "5",
            "--seed",
            "1",
        ],
        exit: 1,
    },
    Case {
        name: "verify_corollary1",
        args: &[
            "verify",
            "corollary1",
            "{dir}/affine_mix.json",
            "--trials",
            "5",
            "--seed",
            "3",
            "--shared",
            "max-entangled",
        ],
        exit: 0,
    },
    Case {
        name: "decompose",
        args: &[
            "decompose",
            "{dir}/strongly_nonsignalling.json",
            "--span-size",
            "300",
            "--seed",
            "2",
        ],
        exit: 0,
    },
];

#[derive(Debug, Serialize, Deserialize)]
pub struct Golden {
    pub args: Vec<String>,
    pub exit: i32,
    /// One parsed JSON value per stdout line.
    pub stdout: Vec<Value>,
}

pub struct Outcome {
    pub exit: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_case(case: &Case, dir: &Path) -> Outcome {
    let args: Vec<String> = case
        .args
        .iter()
        .map(|a| a.replace("{dir}", &dir.display().to_string()))
        .collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let exit = soclab::cli::run(
        std::iter::once("soclab".to_string()).chain(args),
        &mut out,
        &mut err,
    );
    Outcome {
        exit,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

pub fn parse_lines(stdout: &str) -> Vec<Value> {
    stdout
        .lines()
        .map(|l| {
            serde_json::from_str(l).unwrap_or_else(|e| panic!("stdout line is not JSON ({e}): {l}"))
        })
        .collect()
}

/// Structural JSON equality with numbers compared to `eps`.
pub fn json_close(a: &Value, b: &Value, eps: f64) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            (x - y).abs() <= eps
        }
        (Value::Array(x), Value::Array(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(u, v)| json_close(u, v, eps))
        }
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len()
                && x.iter()
                    .all(|(k, u)| y.get(k).is_some_and(|v| json_close(u, v, eps)))
        }
        _ => a == b,
    }
}

/// Checks one case against its golden file; with `SOCLAB_BLESS=1` rewrites it.
pub fn check_case(case: &Case, dir: &Path) -> Result<(), String> {
    let got = run_case(case, dir);
    let path = golden_dir().join(format!("{}.json", case.name));
    let record = Golden {
        args: case.args.iter().map(|s| s.to_string()).collect(),
        exit: got.exit,
        stdout: parse_lines(&got.stdout),
    };
    if std::env::var("SOCLAB_BLESS").is_ok_and(|v| v == "1") {
        std::fs::write(&path, serde_json::to_string_pretty(&record).unwrap() + "\n").unwrap();
    }
    if got.exit != case.exit {
        return Err(format!(
            "{}: exit {} (expected {}); stderr: {}",
            case.name, got.exit, case.exit, got.stderr
        ));
    }
    if got.exit != 0 && got.exit != 1 && got.stderr.is_empty() {
        return Err(format!("{}: error exit without a diagnostic", case.name));
    }
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let want: Golden =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if want.exit != got.exit || want.args != record.args {
        return Err(format!(
            "{}: golden records exit {} for {:?}",
            case.name, want.exit, want.args
        ));
    }
    if want.stdout.len() != record.stdout.len()
        || !want
            .stdout
            .iter()
            .zip(&record.stdout)
            .all(|(w, g)| json_close(w, g, 1e-12))
    {
        return Err(format!(
            "{}: stdout differs from golden\n{}",
            case.name, got.stdout
        ));
    }
    Ok(())
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qma_core::gf2::BitVector;
use qma_core::keys::{shared_from_text, PrivateKey, PublicKey};
use qma_core::qsim::{QState, Register};

fn qma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qma")).args(args).env_remove("QMA_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests").join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn keygen(dir: &Path, mode: &str, seed: &str) -> String {
    let prefix = dir.join("key").to_str().unwrap().to_string();
    let o =
        qma(&["keygen", "--m", "4", "--t", "2", "--k", "4", "--mode", mode, "--seed", seed, "--out-prefix", &prefix]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    prefix
}

#[test]
fn keygen_writes_loadable_deterministic_files() {
    let dir = scratch("keygen");
    let prefix = keygen(&dir, "hybrid-auth", "5");
    let read = |ext: &str| std::fs::read_to_string(format!("{prefix}.{ext}")).unwrap();
    let (pub1, priv1, shared1) = (read("pub"), read("priv"), read("shared"));
    let pk = PublicKey::from_text(&pub1).unwrap();
    let sk = PrivateKey::from_text(&priv1).unwrap();
    assert_eq!(pk.to_text(), pub1);
    assert_eq!(sk.public_key().gp, pk.gp);
    assert_eq!(shared_from_text(&shared1).unwrap(), sk.sns);

    keygen(&dir, "hybrid-auth", "5");
    assert_eq!((read("pub"), read("priv"), read("shared")), (pub1.clone(), priv1, shared1));
    keygen(&dir, "hybrid-auth", "6");
    assert_ne!(read("pub"), pub1);

    // public mode writes no shared file
    let dir = scratch("keygen-public");
    let prefix = keygen(&dir, "public-integrity", "5");
    assert!(!std::path::Path::new(&format!("{prefix}.shared")).exists());
}

#[test]
fn keygen_rejects_bad_parameters() {
    let dir = scratch("keygen-bad");
    let prefix = dir.join("k");
    let o = qma(&["keygen", "--k", "8", "--out-prefix", prefix.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k = 8"));
    assert_eq!(qma(&["keygen", "--mode", "sideways", "--out-prefix", "x"]).status.code(), Some(1));
    assert_eq!(qma(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(qma(&["--help"]).status.code(), Some(0));
}

#[test]
fn classical_encode_decode() {
    let dir = scratch("classical");
    let prefix = keygen(&dir, "public-integrity", "1");
    for s in ["00", "05", "0f"] {
        let ct = qma(&["encode", "--key", &prefix, "--message", s, "--seed", "9"]);
        assert!(ct.status.success());
        let word = stdout(&ct).trim().to_string();
        assert_eq!(word.len(), 4);
        let back = qma(&["decode", "--key", &prefix, "--ciphertext", &word]);
        assert_eq!(back.status.code(), Some(0));
        assert_eq!(stdout(&back), format!("ACCEPT {s}\n"));
    }
    assert_eq!(qma(&["encode", "--key", &prefix, "--message", "5"]).status.code(), Some(1));
    assert_eq!(qma(&["decode", "--key", "/nonexistent/key", "--ciphertext", "0000"]).status.code(), Some(1));
}

#[test]
fn roundtrip_echoes_message() {
    let dir = scratch("roundtrip");
    let prefix = keygen(&dir, "hybrid-auth", "2");
    let o = qma(&["q-roundtrip", "--key", &prefix, "--message", "03:3,0c:0:4", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ACCEPT\n03 0.6 0.0\n0c 0.0 0.8\n");

    let o = qma(&["q-roundtrip", "--key", &prefix, "--uniform", "--seed", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 17);
    assert!(lines[1..].iter().all(|l| l.ends_with(" 0.25 0.0")));

    for bad in ["03", "03:x", "0g:1", "03:1:2:3", "03:0"] {
        assert_eq!(qma(&["q-roundtrip", "--key", &prefix, "--message", bad]).status.code(), Some(1), "{bad}");
    }
    assert_eq!(qma(&["q-roundtrip", "--key", &prefix, "--uniform", "--tamper", "00"]).status.code(), Some(1));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = scratch("env-seed");
    let a = dir.join("a");
    let b = dir.join("b");
    let o = Command::new(env!("CARGO_BIN_EXE_qma"))
        .args(["keygen", "--out-prefix", a.to_str().unwrap()])
        .env("QMA_SEED", "77")
        .output()
        .unwrap();
    assert!(o.status.success());
    qma(&["keygen", "--seed", "77", "--out-prefix", b.to_str().unwrap()]);
    let read = |p: &PathBuf| std::fs::read_to_string(format!("{}.priv", p.display())).unwrap();
    assert_eq!(read(&a), read(&b));
}

/// What the receiver must say when `y` arrives: brute force over every
/// δ and every error of weight ≤ t with δ·G' ⊕ e' = y, using only the public matrix.
fn expected_line(pk: &PublicKey, sns_gs: &qma_core::gf2::BitMatrix, y: &BitVector) -> String {
    let n1 = pk.gp.rows();
    for delta in 0..1u64 << n1 {
        let delta = BitVector::from_u64(n1, delta);
        let diff = pk.gp.vec_mul(&delta).unwrap().xor(y);
        if diff.weight() <= pk.t {
            let prefix = delta.slice(0, pk.k);
            return if sns_gs.vec_mul(&prefix).unwrap() == delta {
                format!("ACCEPT\n{} 1.0 0.0\n", prefix.to_hex())
            } else {
                "REJECT auth-check-failed\n".into()
            };
        }
    }
    "REJECT decode-failure\n".into()
}

#[test]
fn tampered_states_match_public_oracle() {
    let dir = scratch("tamper");
    let prefix = keygen(&dir, "public-integrity", "3");
    let pk = PublicKey::from_text(&std::fs::read_to_string(format!("{prefix}.pub")).unwrap()).unwrap();
    let gs = pk.sns.as_ref().unwrap().gs().clone();
    let state_path = dir.join("sent.state");
    let state_file = state_path.to_str().unwrap();
    let mut rejected = 0;
    for (i, msg) in ["00", "06", "0b"].into_iter().enumerate() {
        let seed = i.to_string();
        let o = qma(&[
            "q-encode",
            "--key",
            &prefix,
            "--message",
            &format!("{msg}:1"),
            "--seed",
            &seed,
            "--out",
            state_file,
        ]);
        assert!(o.status.success());
        let state = QState::from_text(&std::fs::read_to_string(&state_path).unwrap()).unwrap();
        let (basis, _) = state.terms().iter().next().unwrap();
        let y = state.register_value(basis, Register::II);
        assert_eq!(expected_line(&pk, &gs, &y), format!("ACCEPT\n{msg} 1.0 0.0\n"));
        // weight-2t tampers on a spread of positions
        for j in 0..12 {
            let mut d = BitVector::zeros(16);
            for b in [j, j + 1, (j * 5 + 7) % 16, (j * 3 + 2) % 16] {
                d.set(b, true);
            }
            let want = expected_line(&pk, &gs, &y.xor(&d));
            let o = qma(&["q-decode", "--key", &prefix, "--state", state_file, "--tamper", &d.to_hex()]);
            assert_eq!(stdout(&o), want, "d = {d}");
            let code = if want.starts_with("ACCEPT") { 0 } else { 2 };
            assert_eq!(o.status.code(), Some(code));
            rejected += usize::from(code == 2);
        }
    }
    assert!(rejected > 0);
}

#[test]
fn emitted_states_are_readable() {
    let dir = scratch("emit");
    let prefix = keygen(&dir, "hybrid-auth", "8");
    let states = dir.join("run");
    let o = qma(&[
        "q-roundtrip",
        "--key",
        &prefix,
        "--uniform",
        "--tamper",
        "0100",
        "--emit-states",
        states.to_str().unwrap(),
    ]);
    let enc = QState::from_text(&std::fs::read_to_string(dir.join("run.encoded.state")).unwrap()).unwrap();
    let rec = QState::from_text(&std::fs::read_to_string(dir.join("run.received.state")).unwrap()).unwrap();
    assert_eq!(enc.support_size(), 16);
    assert_ne!(enc, rec);
    // decoding the received state reproduces the roundtrip verdict
    let dec = qma(&["q-decode", "--key", &prefix, "--state", dir.join("run.received.state").to_str().unwrap()]);
    assert_eq!((stdout(&dec), dec.status.code()), (stdout(&o), o.status.code()));
    let clean = qma(&["q-decode", "--key", &prefix, "--state", dir.join("run.encoded.state").to_str().unwrap()]);
    assert_eq!(clean.status.code(), Some(0));
    assert_eq!(stdout(&clean).lines().count(), 17);
}

#[test]
fn attack_sweep_csv() {
    let dir = scratch("sweep");
    let prefix = keygen(&dir, "public-integrity", "4");
    let run = |extra: &[&str]| {
        let mut args = vec!["attack-sweep", "--key", &prefix, "--seed", "3"];
        args.extend_from_slice(extra);
        let o = qma(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    let csv = run(&["--wmin", "0", "--wmax", "3", "--exhaustive"]);
    assert_eq!(csv, run(&["--wmin", "0", "--wmax", "3", "--exhaustive"]));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("weight,trials,accept_unchanged,accept_forged,reject_decode_fail,reject_auth_fail,reject_residue")
    );
    let rows: Vec<Vec<usize>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.iter().map(|r| (r[0], r[1])).collect::<Vec<_>>(), vec![(0, 1), (1, 16), (2, 120), (3, 560)]);
    assert_eq!(rows[0], vec![0, 1, 1, 0, 0, 0, 0]);
    for r in &rows {
        assert_eq!(r[2..].iter().sum::<usize>(), r[1]);
    }

    let sampled = run(&["--wmin", "2", "--wmax", "5", "--trials", "50", "--uniform-message"]);
    let rows: Vec<&str> = sampled.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let v: Vec<usize> = r.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v[1], 50);
        assert_eq!(v[3], 0, "shifts of the uniform message are invisible");
        assert_eq!(v[2..].iter().sum::<usize>(), 50);
    }

    let out = dir.join("sweep.csv");
    let o = qma(&["attack-sweep", "--wmax", "1", "--trials", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success() && stdout(&o).is_empty());
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 3);
    assert_eq!(qma(&["attack-sweep", "--wmax", "1"]).status.code(), Some(1));
    assert_eq!(qma(&["attack-sweep", "--wmin", "3", "--wmax", "1", "--exhaustive"]).status.code(), Some(1));
}

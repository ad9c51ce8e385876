use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hetnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hetnet")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = hetnet(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("scenario.toml");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL: &str = r#"
node_count = 1500
slot_budget = 800
min_hops = 2

[topology]
cell_rate = 0.5

[sweep]
min = 0.1
max = 0.5
step = 0.2
trials = 2
"#;

#[test]
fn rate_sweep_is_reproducible_and_has_a_stable_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    ok(&[
        "rate-sweep",
        "--config",
        &cfg,
        "--seed",
        "7",
        "--out",
        a.to_str().unwrap(),
    ]);
    ok(&[
        "rate-sweep",
        "--config",
        &cfg,
        "--seed",
        "7",
        "--out",
        b.to_str().unwrap(),
    ]);
    let a = fs::read(a).unwrap();
    assert_eq!(a, fs::read(b).unwrap());
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("rate_ratio,rel_tput_cellular,rel_tput_combined,stderr")
    );
    assert_eq!(lines.count(), 3);
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let one = ok(&["rate-sweep", "--config", &cfg, "--trials", "1", "--seed", "3"]);
    let two = ok(&["rate-sweep", "--config", &cfg, "--seed", "3"]);
    assert_ne!(one, two);
}

#[test]
fn every_sweep_subcommand_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let base = "node_count = 1500\nslot_budget = 600\n";
    let cases = [
        (
            "load-sweep",
            "[sweep]\nmin = 1\nmax = 2\nstep = 1\ntrials = 1\n",
            "users_per_cell,",
        ),
        (
            "infra-sweep",
            "[sweep]\nmin = 0.01\nmax = 0.04\nstep = 2\nscale = \"log\"\ntrials = 1\n",
            "k_over_n,rel_tput",
        ),
        (
            "topo1",
            "[sweep]\nmin = 0.5\nmax = 0.5\nstep = 0.1\ntrials = 1\n",
            "rate_ratio,rel_tput_wimax,",
        ),
        (
            "topo2",
            "[sweep]\nmin = 1\nmax = 2\nstep = 1\ntrials = 1\nrates = [54.0]\n",
            "link_rate,relays,throughput",
        ),
    ];
    for (cmd, sweep, header) in cases {
        let cfg = write_config(dir.path(), &format!("{base}{sweep}"));
        let out = ok(&[cmd, "--config", &cfg]);
        assert!(out.starts_with(header), "{cmd}: {out}");
        assert!(out.lines().count() >= 2, "{cmd}: {out}");
    }
}

#[test]
fn topology_session_and_replay_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "node_count = 2000\nslot_budget = 1500\n");
    let dump = dir.path().join("topo.txt");
    let trace = dir.path().join("trace.csv");
    ok(&[
        "gen-topology",
        "--config",
        &cfg,
        "--seed",
        "5",
        "--out",
        dump.to_str().unwrap(),
    ]);
    assert!(fs::read_to_string(&dump).unwrap().starts_with("# hetnet topology"));

    let out = hetnet(&[
        "session",
        "--config",
        &cfg,
        "--topology",
        dump.to_str().unwrap(),
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // stderr reads "src A dst B: N blocks in ..."
    let stderr = String::from_utf8(out.stderr).unwrap();
    let words: Vec<&str> = stderr.split_whitespace().collect();
    let dst = words[3].trim_end_matches(':');
    let blocks: usize = words[4].parse().unwrap();
    assert!(blocks > 0, "{stderr}");

    let replay = ok(&["replay-trace", trace.to_str().unwrap(), "--dst", dst, "--config", &cfg]);
    let rows: Vec<&str> = replay.lines().skip(1).collect();
    assert_eq!(rows.len(), blocks);
    for row in rows {
        assert_eq!(row.split(',').nth(1), Some("20"), "{row}");
    }
}

#[test]
fn bad_input_exits_nonzero_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("typo = 1\n", "unknown config key `typo`"),
        ("[topology]\ncell_rte = 1.0\n", "topology.cell_rte"),
        ("block_size = 0\n", "block_size"),
        ("[sweep]\nmin = 2.0\nmax = 1.0\n", "exceeds max"),
        ("node_count = \"many\"\n", "node_count"),
    ];
    for (body, needle) in cases {
        let cfg = write_config(dir.path(), body);
        let out = hetnet(&["rate-sweep", "--config", &cfg]);
        assert!(!out.status.success(), "{body}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{body}: {err}");
    }
    let out = hetnet(&["topo1", "--config", "/nonexistent/cfg.toml"]);
    assert!(!out.status.success());
    let out = hetnet(&["replay-trace", "/nonexistent.csv", "--dst", "1"]);
    assert!(!out.status.success());
}

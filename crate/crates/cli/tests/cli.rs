use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use neurolander::persist::load_archive;
use tempfile::TempDir;

fn neurolander(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neurolander")).args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn ok(args: &[&str], out: &Path) -> Output {
    let o = neurolander(args, out);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn evolve_small(tmp: &TempDir, name: &str, extra: &[&str]) -> std::path::PathBuf {
    let out = tmp.path().join(name);
    let mut args = vec!["evolve", "--pop", "8", "--gens", "4", "--seed", "5"];
    args.extend_from_slice(extra);
    ok(&args, &out);
    out
}

fn read(path: impl AsRef<Path>) -> String {
    fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

fn first_genome(run: &Path) -> String {
    let manifest = read(run.join("archive/manifest.csv"));
    let line = manifest.lines().nth(1).expect("at least one member");
    let rel = line.rsplit(',').next().unwrap();
    run.join("archive").join(rel).to_string_lossy().into_owned()
}

#[test]
fn evolve_writes_run_files() {
    let tmp = TempDir::new().unwrap();
    let out = evolve_small(&tmp, "run", &["--hidden", "3"]);
    let run = read(out.join("run.toml"));
    assert!(run.contains("seed = 5"));
    assert!(run.contains("n_hidden = 3"));
    let log = read(out.join("generations.csv"));
    assert_eq!(log.lines().count(), 1 + 5);
    let archive = load_archive(&out.join("archive")).unwrap();
    assert!(!archive.members.is_empty());
    assert!(archive.members.iter().all(|m| m.seed == 5 && m.individual.genome.n_hidden == 3));
}

#[test]
fn evolve_is_reproducible_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let a = evolve_small(&tmp, "a", &["--jobs", "1"]);
    let b = evolve_small(&tmp, "b", &["--jobs", "3"]);
    for f in ["run.toml", "generations.csv", "archive/manifest.csv", "archive/archive.toml"] {
        assert_eq!(read(a.join(f)), read(b.join(f)), "{f}");
    }
}

#[test]
fn manifest_replays_the_run() {
    let tmp = TempDir::new().unwrap();
    let a = evolve_small(&tmp, "a", &["--hidden", "2", "--constrained"]);
    let b = tmp.path().join("b");
    let config = a.join("run.toml");
    ok(&["evolve", "--config", config.to_str().unwrap()], &b);
    assert_eq!(read(a.join("archive/manifest.csv")), read(b.join("archive/manifest.csv")));
    assert_eq!(read(a.join("run.toml")), read(b.join("run.toml")));
}

#[test]
fn flags_override_config_file() {
    let tmp = TempDir::new().unwrap();
    let config = tmp.path().join("settings.toml");
    fs::write(&config, "seed = 9\npopulation = 6\ngenerations = 2\nn_hidden = 1\n").unwrap();
    let out = tmp.path().join("run");
    ok(&["evolve", "--config", config.to_str().unwrap(), "--seed", "4"], &out);
    let run = read(out.join("run.toml"));
    assert!(run.contains("seed = 4"));
    assert!(run.contains("population = 6"));
}

#[test]
fn zero_hidden_archive_has_direct_shape() {
    let tmp = TempDir::new().unwrap();
    let out = evolve_small(&tmp, "run", &["--hidden", "0"]);
    let archive = load_archive(&out.join("archive")).unwrap();
    for m in &archive.members {
        let g = &m.individual.genome;
        assert_eq!(g.n_hidden, 0);
        assert!(g.w_out.is_empty() && g.hidden_params.is_empty());
        assert!(g.w_in.iter().all(|row| row.len() == 1));
    }
}

#[test]
fn spike_ablation_records_three_objectives() {
    let tmp = TempDir::new().unwrap();
    let out = evolve_small(&tmp, "run", &["--no-spike-objective"]);
    assert!(read(out.join("run.toml")).contains("spike_objective = false"));
    let meta = read(out.join("archive/archive.toml"));
    assert!(meta.contains("f1") && meta.contains("f3") && !meta.contains("f4"), "{meta}");
    let archive = load_archive(&out.join("archive")).unwrap();
    assert_eq!(archive.objectives.len(), 3);
    assert!(archive.members.iter().all(|m| m.individual.objectives.is_some_and(|o| o.spike_rate().is_finite())));
}

#[test]
fn merge_with_itself_is_identity() {
    let tmp = TempDir::new().unwrap();
    let run = evolve_small(&tmp, "run", &[]);
    let merged = tmp.path().join("merged");
    let src = run.to_str().unwrap();
    ok(&["merge", src, src], &merged);
    assert_eq!(read(run.join("archive/manifest.csv")), read(merged.join("archive/manifest.csv")));
    assert_eq!(read(run.join("archive/archive.toml")), read(merged.join("archive/archive.toml")));
}

#[test]
fn merge_never_overwrites_inputs() {
    let tmp = TempDir::new().unwrap();
    let run = evolve_small(&tmp, "run", &[]);
    let before = read(run.join("archive/manifest.csv"));
    let o = neurolander(&["merge", run.to_str().unwrap()], &run);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(before, read(run.join("archive/manifest.csv")));
}

#[test]
fn merge_names_malformed_genome() {
    let tmp = TempDir::new().unwrap();
    let run = evolve_small(&tmp, "run", &[]);
    let genome = first_genome(&run);
    fs::write(&genome, "n_hidden = \"many\"\n").unwrap();
    let o = neurolander(&["merge", run.to_str().unwrap()], &tmp.path().join("merged"));
    assert_eq!(o.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&o.stderr);
    let name = Path::new(&genome).file_name().unwrap().to_str().unwrap();
    assert!(stderr.contains(name), "{stderr}");
}

#[test]
fn evaluate_reports_every_archive_member() {
    let tmp = TempDir::new().unwrap();
    let run = evolve_small(&tmp, "run", &["--hidden", "1"]);
    let members = load_archive(&run.join("archive")).unwrap().members.len();
    let out = tmp.path().join("eval");
    ok(&["evaluate", "--archive", run.to_str().unwrap(), "--landings", "5", "--seed", "2"], &out);
    let table = read(out.join("robustness.csv"));
    assert_eq!(table.lines().count(), members + 1);
    assert!(table.starts_with("controller,success_rate"));
    assert_eq!(fs::read_dir(out.join("landings")).unwrap().count(), members);

    let again = tmp.path().join("eval2");
    ok(&["evaluate", "--archive", run.to_str().unwrap(), "--landings", "5", "--seed", "2"], &again);
    assert_eq!(table, read(again.join("robustness.csv")));
}

#[test]
fn compare_tabulates_network_and_baselines() {
    let tmp = TempDir::new().unwrap();
    let run = evolve_small(&tmp, "run", &["--hidden", "1"]);
    let genome = first_genome(&run);
    let out = tmp.path().join("cmp");
    ok(&["compare", "--genome", &genome, "--landings", "5"], &out);
    let table = read(out.join("comparison.csv"));
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("p-slow,") && rows[2].starts_with("p-fast,"));
}

#[test]
fn compare_needs_two_controllers() {
    let tmp = TempDir::new().unwrap();
    let o = neurolander(&["compare", "--baseline", "p-slow", "--landings", "3"], &tmp.path().join("cmp"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_writes_three_files_per_genome() {
    let tmp = TempDir::new().unwrap();
    let run = evolve_small(&tmp, "run", &["--hidden", "2"]);
    let genome = first_genome(&run);
    let copy = tmp.path().join("pick.toml");
    fs::copy(&genome, &copy).unwrap();
    let out = tmp.path().join("an");
    ok(&["analyze", "--genome", &genome, "--genome", copy.to_str().unwrap(), "--landings", "3"], &out);
    let stem = Path::new(&genome).file_stem().unwrap();
    for dir in [out.join(stem), out.join("pick")] {
        for f in ["steady_state.csv", "transient.csv", "activity.csv"] {
            assert!(dir.join(f).is_file(), "{}", dir.join(f).display());
        }
    }
    let steady = read(out.join("pick/steady_state.csv"));
    assert_eq!(steady.lines().count(), 102);
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("x");
    assert_eq!(neurolander(&["evolve", "--pop", "0"], &out).status.code(), Some(1));
    assert_eq!(neurolander(&["evolve", "--bogus"], &out).status.code(), Some(1));
    assert_eq!(neurolander(&["evolve", "--jobs", "0", "--gens", "1"], &out).status.code(), Some(1));
    assert_eq!(neurolander(&["evaluate"], &out).status.code(), Some(1));
    assert_eq!(neurolander(&["evaluate", "--genome", "missing.toml"], &out).status.code(), Some(2));

    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "popsize = 3\n").unwrap();
    assert_eq!(neurolander(&["evolve", "--config", bad.to_str().unwrap()], &out).status.code(), Some(1));

    let blocker = tmp.path().join("file");
    fs::write(&blocker, "").unwrap();
    let o = neurolander(&["evolve", "--pop", "2", "--gens", "1"], &blocker.join("sub"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn refuses_to_overwrite_an_archive() {
    let tmp = TempDir::new().unwrap();
    let run = evolve_small(&tmp, "run", &[]);
    let o = neurolander(&["evolve", "--pop", "8", "--gens", "4", "--seed", "6"], &run);
    assert_eq!(o.status.code(), Some(1));
}

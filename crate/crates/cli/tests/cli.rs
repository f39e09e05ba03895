use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_railpath"))
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn instance_args(dir: &Path) -> Vec<String> {
    ["network", "timetable", "params"]
        .iter()
        .flat_map(|k| [format!("--{k}"), dir.join(format!("{k}.txt")).display().to_string()])
        .collect()
}

fn run(args: &[String]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn corridor_insert(extra: &[&str]) -> Output {
    let mut args = vec!["insert".to_string()];
    args.extend(instance_args(&fixtures().join("corridor")));
    for a in ["--from", "S00", "--to", "S03", "--window-start", "06:00", "--window-end", "08:00"] {
        args.push(a.into());
    }
    args.extend(extra.iter().map(|s| s.to_string()));
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn corridor_has_three_families() {
    let o = corridor_insert(&[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let heads: Vec<&str> = text.lines().filter(|l| l.starts_with("departure=")).collect();
    // Values confirmed against the time-expanded search at one-second steps.
    assert_eq!(
        heads,
        [
            "departure=06:19:00 arrival=06:36:00 slack=300",
            "departure=06:30:00 arrival=06:47:00 slack=1860",
            "departure=07:08:00 arrival=07:25:00 slack=2100",
        ]
    );
}

#[test]
fn oracle_subcommand_agrees_on_corridor() {
    let mut args = vec!["oracle".to_string()];
    args.extend(instance_args(&fixtures().join("corridor")));
    for a in ["--from", "S00", "--to", "S03", "--window-start", "06:00", "--window-end", "08:00", "--grid", "1"] {
        args.push(a.into());
    }
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("frontiers agree"));
}

#[test]
fn frontier_tsv_lists_each_family() {
    let dir = tempfile::tempdir().unwrap();
    let tsv = dir.path().join("frontier.tsv");
    let o = corridor_insert(&["--frontier", tsv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(tsv).unwrap();
    assert_eq!(text.lines().count(), 4, "{text}");
}

#[test]
fn blocked_track_is_not_an_error() {
    let mut args = vec!["insert".to_string()];
    args.extend(instance_args(&fixtures().join("blocked")));
    for a in ["--from", "A", "--to", "B", "--window-start", "06:00", "--window-end", "09:00"] {
        args.push(a.into());
    }
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no feasible path"));
}

#[test]
fn malformed_timetable_exits_with_input_error() {
    let corridor = fixtures().join("corridor");
    let o = bin()
        .args(["validate", "--network"])
        .arg(corridor.join("network.txt"))
        .arg("--timetable")
        .arg(fixtures().join("malformed_timetable.txt"))
        .arg("--params")
        .arg(corridor.join("params.txt"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("not monotone"), "{err}");
}

#[test]
fn generator_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = bin()
            .args(["gen", "--seed", "42", "--stations", "8", "--trains", "10", "--out"])
            .arg(d.path())
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["network.txt", "timetable.txt", "params.txt"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn empty_timetable_gives_one_family() {
    let dir = tempfile::tempdir().unwrap();
    let corridor = fixtures().join("corridor");
    for f in ["network.txt", "params.txt"] {
        fs::copy(corridor.join(f), dir.path().join(f)).unwrap();
    }
    // Parameters name no train, so they load against an empty timetable.
    fs::write(dir.path().join("timetable.txt"), "").unwrap();
    let mut args = vec!["insert".to_string()];
    args.extend(instance_args(dir.path()));
    for a in ["--from", "S00", "--to", "S03", "--window-start", "06:00", "--window-end", "08:00"] {
        args.push(a.into());
    }
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let heads: Vec<&str> = text.lines().filter(|l| l.starts_with("departure=")).collect();
    assert_eq!(heads.len(), 1, "{text}");
    assert!(heads[0].starts_with("departure=06:00:00"), "{}", heads[0]);
}

fn corridor_svg() -> String {
    let dir = tempfile::tempdir().unwrap();
    let paths = dir.path().join("paths.txt");
    let o = corridor_insert(&["--out", paths.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = dir.path().join("plot.svg");
    let mut args = vec!["plot".to_string()];
    args.extend(instance_args(&fixtures().join("corridor")));
    args.extend(["--paths".into(), paths.display().to_string(), "--out".into(), svg.display().to_string()]);
    for a in ["--window-start", "06:00", "--window-end", "08:00"] {
        args.push(a.into());
    }
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    fs::read_to_string(svg).unwrap()
}

#[test]
fn plot_draws_trains_and_candidates() {
    let svg = corridor_svg();
    let section = |class: &str| {
        let start = svg.find(&format!(r#"<g class="{class}""#)).unwrap();
        let end = start + svg[start..].find("</g>").unwrap();
        svg[start..end].matches("<polyline").count()
    };
    assert_eq!(section("trains"), 3);
    assert_eq!(section("candidates"), 3);
}

#[test]
fn plot_matches_golden() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/corridor.svg");
    let svg = corridor_svg();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&golden, &svg).unwrap();
    }
    assert_eq!(svg, fs::read_to_string(golden).unwrap());
}

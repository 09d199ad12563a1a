use bmlab_cli::setfile::{parse_set, parse_set_file, write_set, write_set_file};
use bmlab_cli::CliError;
use bmlab_core::rational::rat;
use std::path::Path;

fn fixture() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/fifty.set"))
}

#[test]
fn fifty_cell_fixture_round_trips() {
    let text = std::fs::read_to_string(fixture()).unwrap();
    let s = parse_set_file(fixture()).unwrap();
    assert_eq!(s.len(), 50);
    assert_eq!(s.pitch(), &rat(1, 3));
    assert_eq!(write_set(&s), text);

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("copy.set");
    write_set_file(&p, &s).unwrap();
    assert_eq!(parse_set_file(&p).unwrap(), s);
}

#[test]
fn comment_lines_do_not_change_the_set() {
    let text = std::fs::read_to_string(fixture()).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines.insert(0, "# fixture".into());
    lines.insert(5, "   # middle".into());
    lines[8].push_str("  # trailing");
    let s = parse_set(&lines.join("\n")).unwrap();
    assert_eq!(write_set(&s), text);
}

#[test]
fn unit_cell_at_origin() {
    let s = parse_set("2 1 1\n0 0\n").unwrap();
    assert_eq!(s.dim(), 2);
    assert_eq!(s.cells(), &[[0, 0, 0]]);
    assert_eq!(s.volume(), rat(1, 1));
}

#[test]
fn duplicate_cell_is_rejected() {
    let e = parse_set("2 1 1\n0 0\n0 0\n").unwrap_err();
    assert!(matches!(e, CliError::DuplicateCell { line: 3, .. }), "{e}");
    assert_eq!(e.exit_code(), 2);
}

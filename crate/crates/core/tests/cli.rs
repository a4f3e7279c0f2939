use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn fanbw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fanbw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Compares with `tests/golden/<name>`; `FANBW_BLESS=1` rewrites it.
fn golden(name: &str, actual: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    if std::env::var_os("FANBW_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).expect("golden file present");
    assert_eq!(actual, expected, "golden mismatch for {name}");
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sparsify_product_golden() {
    let o = fanbw(&[
        "sparsify",
        "--product",
        s(&data("grid8.product")),
        "--D",
        "24",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    golden("sparsify_grid8.txt", &stdout(&o));
}

#[test]
fn sparsify_graph_golden() {
    let o = fanbw(&["sparsify", "--graph", s(&data("grid16.graph")), "--D", "32"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("density_ok true"));
    golden("sparsify_grid16.txt", &out);
}

#[test]
fn certify_verify_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.txt");
    let o = fanbw(&[
        "certify",
        "--product",
        s(&data("grid8.product")),
        "--D",
        "24",
        "--k",
        "2",
        "--a",
        "1",
        "--seed",
        "7",
        "--out",
        s(&cert),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&cert).unwrap();
    golden("certify_grid8.txt", &text);

    let o = fanbw(&[
        "verify",
        "--product",
        s(&data("grid8.product")),
        "--cert",
        s(&cert),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("ok\n"));

    // send vertex 0 far down the path
    let tampered: String = text
        .lines()
        .map(|l| {
            if l.starts_with("map 0 ") {
                "map 0 3 0".to_string()
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n";
    std::fs::write(&cert, tampered).unwrap();
    let o = fanbw(&[
        "verify",
        "--product",
        s(&data("grid8.product")),
        "--cert",
        s(&cert),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("edge 0-1"), "{}", stdout(&o));
}

#[test]
fn order_is_deterministic() {
    let g = data("grid16.graph");
    let args = [
        "order",
        "--graph",
        s(&g),
        "--D",
        "32",
        "--k",
        "2",
        "--a",
        "2",
        "--seed",
        "3",
    ];
    let a = fanbw(&args);
    let b = fanbw(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    golden("order_grid16.txt", &stdout(&a));
}

#[test]
fn embed_exploratory_dump() {
    let o = fanbw(&[
        "embed",
        "--product",
        s(&data("column12.product")),
        "--D",
        "12",
        "--k",
        "2",
        "--a",
        "1",
        "--dims-cap",
        "4",
        "--mode",
        "exploratory",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("12 4 2 1 1\n"));
    assert!(out.contains("certified false"));
}

#[test]
fn certified_mode_rejects_dims_cap() {
    let o = fanbw(&[
        "order",
        "--product",
        s(&data("column12.product")),
        "--D",
        "12",
        "--dims-cap",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exploratory"));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.graph");
    std::fs::write(&bad, "3 2\n0 1\n1 x\n").unwrap();
    let o = fanbw(&["sparsify", "--graph", s(&bad), "--D", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.graph:3"), "{}", stderr(&o));

    let o = fanbw(&["sparsify", "--graph", s(&bad), "--D", "2", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));

    let gap = dir.path().join("gap.product");
    std::fs::write(&gap, "[H]\n1 0\n[P]\n3\n[G]\n2 1\n0 0 1\n1 0 3\n0 1\n").unwrap();
    let o = fanbw(&["sparsify", "--product", s(&gap), "--D", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gap.product:9"), "{}", stderr(&o));
}

#[test]
fn reductions() {
    let o = fanbw(&[
        "reduce-kplanar",
        "--drawn",
        s(&data("k5.drawn")),
        "--kplanar",
        "1",
        "--D",
        "2",
        "--k",
        "2",
        "--a",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("max_edge_path 2"));

    let o = fanbw(&[
        "reduce-gk",
        "--drawn",
        s(&data("k5.drawn")),
        "--genus",
        "1",
        "--kplanar",
        "1",
        "--D",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("planarizing"));

    let dir = tempfile::tempdir().unwrap();
    let z = dir.path().join("z.txt");
    std::fs::write(&z, "5\n").unwrap();
    let o = fanbw(&[
        "reduce-gk",
        "--drawn",
        s(&data("k5.drawn")),
        "--genus",
        "1",
        "--kplanar",
        "1",
        "--D",
        "2",
        "--planarizer",
        s(&z),
        "--k",
        "2",
        "--a",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn oracle_commands() {
    let o = fanbw(&[
        "oracle",
        "--graph",
        s(&data("c5.graph")),
        "--what",
        "bandwidth",
    ]);
    assert_eq!(stdout(&o), "bandwidth 2\n");
    let o = fanbw(&[
        "oracle",
        "--graph",
        s(&data("c5.graph")),
        "--what",
        "density",
    ]);
    assert_eq!(stdout(&o), "density 2\n");
}

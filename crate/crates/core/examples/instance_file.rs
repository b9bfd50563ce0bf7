//! Reads a JSON instance, builds its oracle and runs the command-line front end
//! on it.

use submodlab::cli::{run_with, InstanceSpec};
use submodlab::oracle::SubsetMask;

fn main() {
    let text = r#"{
        "oracle": {"kind": "coverage", "item_weights": [1, 2, 1, 3], "covers": [[0], [1, 2], [3], [0, 3], [2], [1]]},
        "problem": {"type": "slb", "m": 2},
        "b": 4.0
    }"#;
    let spec = InstanceSpec::parse(text).unwrap();
    let built = spec.build().unwrap();
    println!("f(V) = {}", built.oracle.value(&SubsetMask::full(spec.n())));
    println!("canonical: {}", spec.to_json());

    let path = std::env::temp_dir().join("submodlab_instance.json");
    std::fs::write(&path, text).unwrap();
    let args = ["submodlab", "slb", "auto", path.to_str().unwrap()];
    let code = run_with(args.iter().map(|s| s.to_string()), &mut std::io::stdout(), &mut std::io::stderr());
    println!("exit status {code}");
}

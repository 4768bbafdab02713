// Drive the command-line front end: synthesize two leaves, analyze the
// directory and print one report.
//
// ```bash
// cargo run --example batch_report
// ```

use leafscan::cli::run_with;

pub fn run_example() -> leafscan::Result<()> {
    let dir = std::env::temp_dir().join(format!("leafscan-batch-{}", std::process::id()));
    let inputs = dir.join("in");
    let out = dir.join("out");
    std::fs::create_dir_all(&inputs)?;

    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    for (name, lesion) in [("a", "0.05"), ("b", "0.15")] {
        let args = [
            "leafscan", "synth", "--size", "96", "--lesion-fraction", lesion,
            "--seed", "1", "--name", name, "--out",
        ];
        let code = run_with(args.iter().copied().chain([inputs.to_str().unwrap()]), &mut stdout, &mut stderr);
        assert_eq!(code, 0, "{}", String::from_utf8_lossy(&stderr));
    }
    // Only the .ppm leaves are analyzed; drop the ground-truth masks.
    for entry in std::fs::read_dir(&inputs)? {
        let path = entry?.path();
        if path.to_string_lossy().ends_with(".pgm") {
            std::fs::remove_file(path)?;
        }
    }

    let code = run_with(
        ["leafscan", "analyze", inputs.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", "2"],
        &mut stdout,
        &mut stderr,
    );
    print!("{}", String::from_utf8_lossy(&stdout));
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&stderr));
    println!("{}", std::fs::read_to_string(out.join("a.report.json"))?);

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> leafscan::Result<()> {
    run_example()
}

// Saving a construction, reloading it, re-running its checks, and writing
// plot data in (|x|, |y|) coordinates.
use handle_forge::constructors::{build_outer_handle, HandleFile, HandleOptions};

fn main() -> handle_forge::Result<()> {
    let dir = std::env::temp_dir().join("handle-forge-export");
    std::fs::create_dir_all(&dir)?;
    let opts = HandleOptions {
        relax: true,
        ..HandleOptions::default()
    };
    let h = build_outer_handle(2.0, 1.0, 0.5, &opts)?;
    let path = dir.join("handle.json");
    h.to_file()?.save(&path)?;

    let file = HandleFile::load(&path)?;
    for c in file.rerun(None, None)? {
        println!(
            "{:<36} {:.6e} (passed {})",
            c.name, c.report.min_margin, c.report.passed
        );
    }

    let region = file.region_boundary(400, 0.0)?;
    let mut w = csv::Writer::from_path(dir.join("region.csv"))?;
    w.write_record(["x_abs", "y_abs"])?;
    for (x, y) in &region {
        w.write_record([x.to_string(), y.to_string()])?;
    }
    w.flush()?;
    println!(
        "wrote {} boundary points and handle.json to {}",
        region.len(),
        dir.display()
    );
    Ok(())
}

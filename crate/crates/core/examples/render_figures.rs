use std::time::Instant;

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "figures".into());
    std::fs::create_dir_all(&dir).expect("output directory");
    for name in dirty_region::figures::PRESETS {
        let t = Instant::now();
        let fig = dirty_region::figures::render(name).expect("figure");
        std::fs::write(format!("{dir}/{name}.csv"), &fig.csv).expect("csv");
        std::fs::write(format!("{dir}/{name}.svg"), &fig.svg).expect("svg");
        eprintln!("{name}: {:.2?}", t.elapsed());
    }
}

//! Write the 3×3 grid of admittance regions as SVG.
//!
//! `cargo run --example figure_svg -- regions.svg`

use pseudopass::cli::svg::{figure_panels, render};

fn main() -> std::io::Result<()> {
    let svg = render(&figure_panels(), 3);
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, svg)?;
            eprintln!("wrote {path}");
        }
        None => print!("{svg}"),
    }
    Ok(())
}

//! Classify the admittance and scattering regions for a handful of
//! parameter pairs.
//!
//! `cargo run --example region_taxonomy`

use pseudopass::geometry::{classify_admittance, classify_scattering};

fn main() {
    println!("admittance  Re σ ≥ c + d|σ|²");
    for (c, d) in [(-1.0, -1.0), (0.0, -1.0), (0.0, 0.0), (-2.0, 0.125), (0.5, 0.5), (1.0, 1.0)] {
        println!("  ({c:+}, {d:+})  {}", classify_admittance(c, d));
    }
    println!("scattering  (1-F) - (1+F)|σ|² ≥ 2G Re σ");
    for (f, g) in [(-3.0, 0.0), (-2.0, 2.0), (-1.0, 0.0), (-1.0, 2.0), (0.0, 0.0), (1.0, 0.0), (2.0, 0.0)] {
        println!("  ({f:+}, {g:+})  {}", classify_scattering(f, g));
    }
}

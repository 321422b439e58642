//! Euler number of a pixel image two ways: vertex charges and component counts.

use wiener_sausage::geometry::{euler_by_complex, label_components, BinaryGrid};

fn main() -> wiener_sausage::Result<()> {
    let g = BinaryGrid::from_rows(&[
        "#######.....",
        "#.....#..#..",
        "#.###.#.#.#.",
        "#.#.#.#..#..",
        "#.###.#.....",
        "#######...##",
    ])?;
    let c = label_components(&g);
    println!("{}", g.to_pbm());
    println!("components {} holes {}", c.foreground, c.holes);
    println!("euler (complex) {}  euler (components - holes) {}", euler_by_complex(&g), c.foreground as i64 - c.holes as i64);
    Ok(())
}

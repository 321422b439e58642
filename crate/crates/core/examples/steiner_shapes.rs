//! Area, boundary length and Euler number of dilated shapes with known answers.

use std::f64::consts::PI;

use wiener_sausage::brownian::Polyline;
use wiener_sausage::geometry::measure_path;
use wiener_sausage::Point;

fn main() -> wiener_sausage::Result<()> {
    let r = 1.0;
    let a = r / 256.0;
    let o = Point::new(0.31, 0.27);
    let square: Vec<Point> = [(0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0), (0.0, 0.0)]
        .iter()
        .map(|&(x, y)| Point::new(x, y) + o)
        .collect();
    let shapes = [
        ("disk", Polyline::single_point(o), PI, 2.0 * PI),
        ("stadium", Polyline::from_vertices(vec![o, Point::new(2.0, 0.0) + o])?, PI + 4.0, 2.0 * PI + 4.0),
        ("square loop", Polyline::from_vertices(square)?, 76.0 + PI, 72.0 + 2.0 * PI),
    ];
    println!("{:12} {:>10} {:>10} {:>10} {:>10} {:>6}", "shape", "area", "exact", "boundary", "exact", "euler");
    for (name, path, area, perim) in shapes {
        let m = measure_path(&path, a, &[r], 8.0 * a)?[0];
        let v = m.volumes;
        println!(
            "{name:12} {:10.5} {area:10.5} {:10.5} {perim:10.5} {:6}",
            v.area, v.boundary_length, v.euler
        );
    }
    Ok(())
}

//! Expected area and boundary length by quadrature, next to the small-radius asymptotes.

use wiener_sausage::reference::{
    expected_area, expected_perimeter, legall_area_asymptote, legall_perimeter_asymptote, QuadratureSpec,
};

fn main() -> wiener_sausage::Result<()> {
    let q = QuadratureSpec::with_rel_tol(1e-10);
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "r", "area", "asymptote", "boundary", "asymptote");
    for r in [1e-8, 1e-4, 1e-2, 0.05, 0.1, 0.2, 0.5] {
        let a = expected_area(r, 1.0, &q)?;
        let p = expected_perimeter(r, 1.0, &q)?;
        println!(
            "{r:8.0e} {:12.6} {:12.6} {:12.6} {:12.6}",
            a.value,
            legall_area_asymptote(r, 1.0)?,
            p.value,
            legall_perimeter_asymptote(r, 1.0)?
        );
    }
    println!("unit radius and horizon: area {:.12}", expected_area(1.0, 1.0, &q)?.value);
    Ok(())
}

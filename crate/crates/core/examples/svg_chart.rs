//! Writes a mean/min/max chart in the report style to chart.svg.

use wiener_sausage::cli::{emit_svg, ChartOptions, LineStyle, Series};

fn main() -> wiener_sausage::Result<()> {
    let r: Vec<f64> = (1..=20).map(|i| 0.05 * i as f64).collect();
    let line = |f: &dyn Fn(f64) -> f64| r.iter().map(|&x| (x, f(x))).collect::<Vec<_>>();
    let series = [
        Series::new("mean", line(&|x| 1.0 + 3.0 * x), LineStyle::Solid),
        Series::new("min", line(&|x| 0.7 + 2.6 * x), LineStyle::Dashed),
        Series::new("max", line(&|x| 1.4 + 3.5 * x), LineStyle::Dotted),
    ];
    let opts = ChartOptions {
        title: "area".into(),
        x_label: "r".into(),
        y_label: "area".into(),
        ..ChartOptions::default()
    };
    std::fs::write("chart.svg", emit_svg(&series, &opts)?)?;
    println!("wrote chart.svg");
    Ok(())
}

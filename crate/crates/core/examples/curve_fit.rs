//! Fits the area curve form to noisy synthetic means and reports relative errors.

use wiener_sausage::fitting::{default_init, fit, DataPoint, FitOptions, ModelForm};

fn main() -> wiener_sausage::Result<()> {
    let truth = [2.0, 3.5, 1.5, 0.3, 0.7, 1.2, 0.1, 2.1];
    let data: Vec<DataPoint> = (0..15)
        .map(|i| {
            let r = 0.02 * 100f64.powf(i as f64 / 14.0);
            let wobble = 1.0 + 0.005 * ((i * 7 % 5) as f64 - 2.0);
            Ok(DataPoint::new(r, ModelForm::Area.eval(&truth, r)? * wobble))
        })
        .collect::<wiener_sausage::Result<_>>()?;
    let init = default_init(ModelForm::Area, &data)?;
    let f = fit(ModelForm::Area, &data, &init, &FitOptions::default())?;
    print!("{}", f.parameters_csv());
    println!("{}", f.summary_json());
    Ok(())
}

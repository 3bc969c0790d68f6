//! Real functions on the circle as Hermitian coefficient vectors: synthesis,
//! Hilbert transform, Cauchy projections and products.

use std::collections::BTreeMap;

use num_complex::Complex64;

use boconserve::fourier::{
    cauchy_project, derivative, hilbert_transform, pointwise_product, synthesize, CircleFunction, GridSamples,
    HardySign,
};

fn main() -> boconserve::Result<()> {
    // cos(2πx) + 0.5 sin(4πx)
    let modes = BTreeMap::from([
        (1, Complex64::new(0.5, 0.0)),
        (-1, Complex64::new(0.5, 0.0)),
        (2, Complex64::new(0.0, -0.25)),
        (-2, Complex64::new(0.0, 0.25)),
    ]);
    let f = synthesize(&modes)?;
    println!("band {}, mean {}, ‖f‖ = {:.6}", f.band_limit(), f.mean(), f.l2_norm());
    for x in [0.0, 0.125, 0.25] {
        println!("  f({x}) = {:+.6}", f.eval(x));
    }

    let h = hilbert_transform(&f);
    println!("H cos(2πx) = sin(2πx): Hf(0.25) = {:+.6}", h.eval(0.25));
    println!("H∘H = -1 on mean-zero data: {}", hilbert_transform(&h) == f.scaled(-1.0));

    let plus = cauchy_project(&f, HardySign::Plus);
    let minus = cauchy_project(&f, HardySign::Minus);
    println!(
        "C₊f keeps k > 0: ĉ(1) = {}, ĉ(-1) = {}; C₊f + C₋f = f: {}",
        plus.coeff(1),
        plus.coeff(-1),
        plus.add(&minus).to_real()? == f
    );

    let df = derivative(&f);
    println!("f'(0) = {:+.6}, expected 2π = {:+.6}", df.eval(0.0), 2.0 * std::f64::consts::PI);

    let exact = pointwise_product(&f, &f, false);
    let dealiased = pointwise_product(&f, &f, true);
    println!(
        "f²: exact band {}, dealiased band {}, mean {:.6} = ‖f‖²",
        exact.band_limit(),
        dealiased.band_limit(),
        exact.mean()
    );

    let grid = GridSamples::from_function(&f, 16)?;
    let back: CircleFunction = grid.to_function(f.band_limit())?;
    println!("16-point grid round trip error {:.1e}", back.sub(&f).l2_norm());
    Ok(())
}

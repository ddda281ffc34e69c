use super::Point4;
use crate::error::Result;
use crate::norms::{Sample, SampledField};
use crate::numerics::fit::loglog_slope;
use crate::numerics::geomspace;
use crate::numerics::quad::sphere3_rule;
use rayon::prelude::*;

/// Nodes of the `n×n×n` product rule on S³, used as sampling directions.
pub fn sphere_directions(n: usize) -> Vec<Point4> {
    sphere3_rule(n, n, n).into_iter().map(|(v, _)| v).collect()
}

fn at(center: Point4, r: f64, v: &Point4) -> Point4 {
    std::array::from_fn(|i| center[i] + r * v[i])
}

/// `max_v f(c + r v)` for each radius.
pub fn radial_envelope<F: Fn(Point4) -> f64 + Sync>(f: F, center: Point4, radii: &[f64], dirs: &[Point4]) -> Vec<f64> {
    radii
        .par_iter()
        .map(|&r| dirs.iter().map(|v| f(at(center, r, v))).fold(0.0, f64::max))
        .collect()
}

/// Log–log slope of the radial envelope over `n` geometric radii in `[r_lo, r_hi]`.
pub fn decay_slope<F: Fn(Point4) -> f64 + Sync>(f: F, center: Point4, r_lo: f64, r_hi: f64, n: usize, dirs: &[Point4]) -> f64 {
    let radii = geomspace(r_lo, r_hi, n);
    let env = radial_envelope(f, center, &radii, dirs);
    loglog_slope(&radii, &env)
}

/// Samples of a tensor-valued map on spherical shells, with `r = |x − c|`.
pub fn sample_radial<F: Fn(Point4) -> Vec<f64> + Sync>(f: F, center: Point4, radii: &[f64], dirs: &[Point4]) -> Result<SampledField> {
    let pts: Vec<(f64, Point4)> = radii.iter().flat_map(|&r| dirs.iter().map(move |v| (r, at(center, r, v)))).collect();
    let samples = pts.par_iter().map(|&(r, x)| Sample::new(x.to_vec(), r, f(x))).collect();
    SampledField::new(samples)
}

//! Polynomials and rational functions in a formal `q`, truncated power series in `x`
//! over them, and the generating functions whose coefficients are the counts.

mod polyq;
mod ratq;
mod scaled;
mod series;

pub use polyq::{gl_order_poly, PolyQ};
pub use ratq::RatQ;
pub use series::{
    count_eval, count_poly, count_poly_from_series, count_polys, factor_f, factor_g, factor_h, inverse_f, series_for,
    series_for_with, series_product, ExactFactors, FactorSource, SeriesX, VALIDITY_NOTE,
};

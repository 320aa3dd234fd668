//! Charts, smooth measures and measure expressions.

mod chart;
mod density;
mod expr;
mod schema;
mod smooth;

pub use chart::{curve_catalog, Chart, CurveSpec, CATALOG};
pub use density::{bump, Density, Monomial};
pub use expr::{reflect_measure, MeasureExpr};
pub use schema::{load_measure, measure_to_json, parse_measure, MeasureFile, NodeSpec, TermSpec};
pub use smooth::{default_rule, measure_integral, MeasureNode, SmoothMeasureSpec, RANK_TOLERANCE};
pub(crate) use smooth::tangent_singular_values;

//! One module per subcommand. Each `run` parses its parameters, echoes them
//! back with defaults filled in, and returns a table plus detail data.

pub mod approx;
pub mod estimate;
pub mod polytope_rate;
pub mod rate;
pub mod vc;

use crate::record::Table;
use crate::svg::PlotSpec;
use crate::Subcommand;

/// `(parameter echo, table, detail data)`.
pub type Output = (serde_json::Value, Table, serde_json::Value);

pub(crate) fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("result types serialize")
}

/// Columns plotted for each subcommand's CSV.
pub fn plot_spec(sub: Subcommand) -> PlotSpec {
    let base = PlotSpec { x: 0, y: 1, log_x: true, log_y: true, series: None, only: None };
    match sub {
        Subcommand::PolytopeRate => PlotSpec { x: 1, y: 4, series: Some(0), ..base },
        Subcommand::Approx => PlotSpec { x: 0, y: 6, ..base },
        Subcommand::Estimate => PlotSpec { x: 0, y: 2, log_x: false, log_y: false, ..base },
        Subcommand::Vc => PlotSpec { x: 2, y: 3, series: Some(0), only: Some((1, "mean_discrepancy".into())), ..base },
        Subcommand::Rate => PlotSpec { x: 0, y: 3, ..base },
    }
}

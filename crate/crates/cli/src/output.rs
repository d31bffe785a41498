//! Match-set serialization.

use ptpm_core::geometry::format_polyhedron;
use ptpm_core::geometry::text::region_to_json;
use ptpm_core::{Polyhedron, Pta, Region, VariableNames};

use crate::config::Format;

pub fn names(pta: &Pta) -> VariableNames {
    VariableNames::new(pta.params.clone(), pta.clocks.clone())
}

/// Disjuncts minimized, deduplicated and sorted by their canonical text, so
/// that every matcher prints the same bytes for the same set of polyhedra.
pub fn canonical(region: &Region, names: &VariableNames) -> Region {
    let mut keyed: Vec<(String, Polyhedron)> = region
        .disjuncts()
        .iter()
        .map(Polyhedron::minimize)
        .filter(|p| !p.is_empty())
        .map(|p| (format_polyhedron(&p, names), p))
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    let mut out = Region::empty();
    for (_, p) in keyed {
        out.add(p);
    }
    out
}

pub fn render(region: &Region, pta: &Pta, format: Format) -> String {
    let names = names(pta);
    let region = canonical(region, &names);
    match format {
        Format::Text => ptpm_core::geometry::format_region(&region, &names),
        Format::Json => {
            let json = region_to_json(&region, &names, &pta.content_hash());
            let mut out = serde_json::to_string_pretty(&json).expect("region JSON serializes");
            out.push('\n');
            out
        }
    }
}

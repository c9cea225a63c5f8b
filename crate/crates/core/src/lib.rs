//! Flat and hyperbolic models of the Infinite Loch Ness Monster, the
//! orientable surface with infinite genus and a single end.
//!
//! * [`mobius`]: exact integer Möbius maps and their action on geodesics.
//! * [`group`]: the side-pairing Fuchsian group, its fundamental domain,
//!   point reduction and orbit enumeration.
//! * [`slit`]: the slit-plane translation surface, geodesic flow and cone
//!   angles.
//! * [`topology`]: edge-identified polygons, truncation genus and end
//!   counting.
//! * [`render`]: the exponential-sum curve and SVG figures.

pub mod group;
pub mod mobius;
pub mod render;
pub mod slit;
pub mod topology;

pub use group::{
    enumerate_words, gen_f, gen_g, probe_fixed_points, reduce_to_domain, verify_side_pairings,
    GVariant, GeneratorLetter, GroupError, Word,
};
pub use mobius::{GeneralizedCircle, MobiusKind, MobiusMap, Region, UpperHalfPoint, DEFAULT_TOL};
pub use render::{curve_points, RenderError, RenderSummary, View};
pub use slit::{FlatPoint, GeodesicTrace, Side, SlitError, SlitSurface, TraceEvent};
pub use topology::{
    count_ends, truncation_topology, EndBase, IdentifiedPolygon, TopologyError, TopologySummary,
    TruncationSpec,
};

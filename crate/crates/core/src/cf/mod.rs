//! Regular and even continued fractions and the maps acting on them.

mod ecf;
mod maps;
mod orbit;
mod rcf;

pub use ecf::{ecf_expand, singularize, EcfExpansion};
pub use maps::{g_map, t_map, u_map, UStep};
pub use orbit::{
    floor_chain, orbit_products, sign_phases, t_ops, t_orbit, FloorChain, Orbit, OrbitPoint, OrbitStop,
    ProductRecord, TOpPair,
};
pub use rcf::{digits_value, rcf_expand, RcfExpansion};

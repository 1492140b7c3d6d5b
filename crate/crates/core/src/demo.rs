//! Pinned example actions.

use crate::action::{ActionSpec, GenMap, Space};
use crate::scalar::ratio as rat;

/// Two piecewise linear homeomorphisms of `[0, 1]` with dyadic data.
pub fn pl_demo() -> ActionSpec {
    let x0 = GenMap::pl(&[(0, 1, 0, 1), (1, 2, 1, 4), (1, 1, 1, 1)]).expect("valid breakpoints");
    let x1 = GenMap::pl(&[(0, 1, 0, 1), (1, 4, 1, 2), (3, 4, 3, 4), (1, 1, 1, 1)]).expect("valid breakpoints");
    ActionSpec::new(Space::Interval, vec![x0, x1]).expect("valid action")
}

/// `x0 = p ↦ √p`, whose derivative blows up at `0`.
pub fn power_demo() -> ActionSpec {
    ActionSpec::new(Space::Interval, vec![GenMap::Power { alpha: rat(1, 2) }]).expect("valid action")
}

/// `x0 = p ↦ 3p / (1 + 2p)`.
pub fn mobius_demo() -> ActionSpec {
    ActionSpec::new(Space::Interval, vec![GenMap::Mobius { lambda: rat(3, 1) }]).expect("valid action")
}

/// Rotation by `1/3` and the hyperbolic circle map with `t = 1`.
pub fn circle_demo() -> ActionSpec {
    ActionSpec::new(
        Space::Circle,
        vec![GenMap::Rotation { theta: rat(1, 3) }, GenMap::CircleMobius { t: rat(1, 1) }],
    )
    .expect("valid action")
}

/// `m` generators acting as the identity on `[0, 1]`.
pub fn trivial_demo(m: usize) -> ActionSpec {
    ActionSpec::trivial(Space::Interval, m)
}

/// Looks a demo up by name.
pub fn by_name(name: &str) -> Option<ActionSpec> {
    match name {
        "pl" => Some(pl_demo()),
        "power" => Some(power_demo()),
        "mobius" => Some(mobius_demo()),
        "circle" => Some(circle_demo()),
        "trivial" => Some(trivial_demo(1)),
        _ => None,
    }
}

pub const NAMES: [&str; 5] = ["pl", "power", "mobius", "circle", "trivial"];

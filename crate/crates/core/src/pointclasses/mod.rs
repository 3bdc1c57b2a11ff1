//! Borel codes over Cantor space, the canonical complete sets, prefix
//! verdicts, and exact membership for ultimately periodic points.

mod battery;
mod canonical;
mod code;
mod up;

pub use battery::{exhaustive_points, random_points, up_battery, wide_battery};
pub use canonical::{
    canonical_set, canonical_set_named, pi1_allzero_on, pi2_infones_on, pi3_infemptycols_on, sigma1_on,
    sigma2_evzero_on, split_point_family, DecreasingFamily, FamilyViolation, PointclassKind, Track,
};
pub use code::{member_up, verdict_prefix, BorelCode, BorelLevel, CodeError, Node, Sequence, Side, UpRule};
pub use up::{pair, unpair, MatrixPoint, UPPoint, UpParseError};

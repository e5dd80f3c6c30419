//! Small-world augmentation: random long-range links added on top of the
//! geometric backbone.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{LongLink, Network};

/// Rejected draws allowed per link before giving up.
pub const MAX_ATTEMPTS_PER_LINK: u64 = 1_000_000;

/// Below this length power-law candidates are always accepted; it is the
/// envelope of the rejection sampler and keeps `d^-delta` bounded.
pub const POWER_LAW_FLOOR: f64 = 1.0;

/// How the length of a candidate link affects its acceptance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkKind {
    /// Any pair, no length restriction.
    Uniform,
    /// Pair acceptance proportional to `d^-delta`.
    PowerLaw { delta: f64 },
    /// Uniform among pairs no farther apart than `d_c`.
    Cutoff { d_c: f64 },
}

impl fmt::Display for LinkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkKind::Uniform => f.write_str("uniform"),
            LinkKind::PowerLaw { delta } => write!(f, "power_law(delta={delta})"),
            LinkKind::Cutoff { d_c } => write!(f, "cutoff(d_c={d_c})"),
        }
    }
}

/// Long-range link scheme: `round(p_r * N)` links of the given kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkScheme {
    pub kind: LinkKind,
    pub p_r: f64,
}

impl Default for LinkScheme {
    fn default() -> Self {
        LinkScheme::none()
    }
}

impl LinkScheme {
    pub const fn none() -> Self {
        LinkScheme {
            kind: LinkKind::Uniform,
            p_r: 0.0,
        }
    }

    pub const fn uniform(p_r: f64) -> Self {
        LinkScheme {
            kind: LinkKind::Uniform,
            p_r,
        }
    }

    pub const fn power_law(p_r: f64, delta: f64) -> Self {
        LinkScheme {
            kind: LinkKind::PowerLaw { delta },
            p_r,
        }
    }

    pub const fn cutoff(p_r: f64, d_c: f64) -> Self {
        LinkScheme {
            kind: LinkKind::Cutoff { d_c },
            p_r,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p_r >= 0.0) || !self.p_r.is_finite() {
            return Err(Error::invalid("p_r", format!("must be >= 0, got {}", self.p_r)));
        }
        match self.kind {
            LinkKind::Uniform => Ok(()),
            LinkKind::PowerLaw { delta } if delta >= 0.0 && delta.is_finite() => Ok(()),
            LinkKind::PowerLaw { delta } => {
                Err(Error::invalid("delta", format!("must be >= 0, got {delta}")))
            }
            LinkKind::Cutoff { d_c } if d_c > 0.0 => Ok(()),
            LinkKind::Cutoff { d_c } => Err(Error::invalid("d_c", format!("must be > 0, got {d_c}"))),
        }
    }

    /// Number of links added to an `n`-node network.
    pub fn link_count(&self, n: usize) -> usize {
        (self.p_r * n as f64).round() as usize
    }

    fn accepts<R: Rng + ?Sized>(&self, d: f64, rng: &mut R) -> bool {
        match self.kind {
            LinkKind::Uniform => true,
            LinkKind::Cutoff { d_c } => d <= d_c,
            LinkKind::PowerLaw { delta } => {
                if delta == 0.0 || d < POWER_LAW_FLOOR {
                    true
                } else {
                    rng.random::<f64>() < (d / POWER_LAW_FLOOR).powf(-delta)
                }
            }
        }
    }
}

/// Returns a copy of `net` with `round(p_r * N)` extra long-range links.
///
/// Candidate pairs are drawn uniformly; self-pairs and pairs that are
/// already linked (locally or by an earlier long link) are redrawn, and
/// the scheme decides acceptance from the pair's distance.
pub fn add_long_range_links<R: Rng + ?Sized>(
    net: &Network,
    scheme: &LinkScheme,
    rng: &mut R,
) -> Result<Network> {
    scheme.validate()?;
    let n = net.node_count();
    let wanted = scheme.link_count(n);
    if wanted == 0 {
        return Ok(net.clone());
    }
    let all_pairs = n * (n - 1) / 2;
    let available = all_pairs - net.local_edge_count() - net.long_links().len();
    if wanted > available {
        return Err(Error::InfeasibleLinks {
            requested: wanted,
            available,
        });
    }

    let mut chosen: HashSet<(usize, usize)> = HashSet::with_capacity(wanted);
    let mut links = Vec::with_capacity(wanted);
    while links.len() < wanted {
        let mut attempts = 0u64;
        loop {
            if attempts == MAX_ATTEMPTS_PER_LINK {
                return Err(Error::RetryLimitExceeded { attempts });
            }
            attempts += 1;
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a == b {
                continue;
            }
            let (u, v) = (a.min(b), a.max(b));
            if net.are_adjacent(u, v) || chosen.contains(&(u, v)) {
                continue;
            }
            let length = net.distance(u, v);
            if scheme.accepts(length, rng) {
                chosen.insert((u, v));
                links.push(LongLink { u, v, length });
                break;
            }
        }
    }
    Ok(net.with_long_links(links))
}

/// Mean recorded length of the network's long-range links, `d_bar`.
pub fn mean_long_range_length(net: &Network) -> Result<f64> {
    let links = net.long_links();
    if links.is_empty() {
        return Err(Error::NoLongRangeLinks);
    }
    Ok(links.iter().map(|l| l.length).sum::<f64>() / links.len() as f64)
}

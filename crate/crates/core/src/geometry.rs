//! Matérn cluster deployments around a typical gateway at the origin.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::config::{NetworkParams, N_SF};
use crate::error::{Error, Result};
use crate::rng::{self, Lane};

/// Default truncation radius for the gateway process, km.
pub const DEFAULT_WINDOW_RADIUS: f64 = 15.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mean).expect("positive finite mean");
    dist.sample(rng) as usize
}

fn uniform_in_disc<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    Point::new(r * theta.cos(), r * theta.sin())
}

/// Gateway PPP of intensity `lambda_g` on the disc of radius `window_radius`.
/// The typical gateway at the origin is not part of the returned set.
pub fn sample_gateways<R: Rng + ?Sized>(
    params: &NetworkParams,
    window_radius: f64,
    rng: &mut R,
) -> Vec<Point> {
    debug_assert!(window_radius > 0.0);
    let n = poisson_count(params.lambda_g * PI * window_radius * window_radius, rng);
    (0..n).map(|_| uniform_in_disc(window_radius, rng)).collect()
}

/// Node offsets of one cluster, relative to its gateway: a PPP of intensity
/// `lambda_ed` on the disc of radius `r_cluster`.
pub fn sample_cluster<R: Rng + ?Sized>(params: &NetworkParams, rng: &mut R) -> Vec<Point> {
    let r = params.r_cluster;
    let n = poisson_count(params.lambda_ed * PI * r * r, rng);
    (0..n).map(|_| uniform_in_disc(r, rng)).collect()
}

/// EIB rule: smallest `q` with `d <= d_q`, using half-open annuli `(d_{q-1}, d_q]`.
pub fn assign_sf_by_distance(d: f64, params: &NetworkParams) -> Result<usize> {
    if !(0.0..=params.r_cluster).contains(&d) {
        return Err(Error::Domain(format!(
            "distance {d} km outside cluster of radius {} km",
            params.r_cluster
        )));
    }
    let w = params.annulus_width();
    for q in 1..N_SF {
        if d <= q as f64 * w {
            return Ok(q);
        }
    }
    Ok(N_SF)
}

/// Exact distance from a node at `gateway + offset` to the typical gateway.
pub fn distance_to_typical_gw(gateway: Point, offset: Point) -> f64 {
    (gateway.x + offset.x).hypot(gateway.y + offset.y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Offsets from the cluster's gateway, km.
    pub offsets: Vec<Point>,
    /// SF index `q` of each node.
    pub sf_of: Vec<u8>,
}

impl Cluster {
    fn from_offsets(offsets: Vec<Point>, params: &NetworkParams) -> Self {
        let sf_of = offsets
            .iter()
            .map(|o| {
                // sampled offsets satisfy |o| <= R up to rounding
                let d = o.norm().min(params.r_cluster);
                assign_sf_by_distance(d, params).expect("offset inside cluster") as u8
            })
            .collect();
        Self { offsets, sf_of }
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

/// A sampled network. The typical gateway sits at the origin and owns
/// `typical`; `clusters[i]` belongs to `gateways[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub gateways: Vec<Point>,
    pub typical: Cluster,
    pub clusters: Vec<Cluster>,
    pub window_radius: f64,
    pub seed: u64,
    pub replication: u64,
}

impl Deployment {
    /// Samples the deployment for `(seed, replication)`. Each cluster draws
    /// from its own stream so the result does not depend on evaluation order.
    pub fn sample(params: &NetworkParams, window_radius: f64, seed: u64, replication: u64) -> Self {
        let gateways = sample_gateways(
            params,
            window_radius,
            &mut rng::stream(seed, replication, Lane::Gateways),
        );
        let typical = Cluster::from_offsets(
            sample_cluster(params, &mut rng::stream(seed, replication, Lane::Cluster(0))),
            params,
        );
        let clusters = (0..gateways.len())
            .map(|i| {
                let mut r = rng::stream(seed, replication, Lane::Cluster(i as u64 + 1));
                Cluster::from_offsets(sample_cluster(params, &mut r), params)
            })
            .collect();
        Self {
            gateways,
            typical,
            clusters,
            window_radius,
            seed,
            replication,
        }
    }

    /// Single-cell deployment: only the typical cluster is sampled.
    pub fn sample_single_cell(params: &NetworkParams, seed: u64, replication: u64) -> Self {
        let typical = Cluster::from_offsets(
            sample_cluster(params, &mut rng::stream(seed, replication, Lane::Cluster(0))),
            params,
        );
        Self {
            gateways: Vec::new(),
            typical,
            clusters: Vec::new(),
            window_radius: 0.0,
            seed,
            replication,
        }
    }

    pub fn node_count(&self) -> usize {
        self.typical.len() + self.clusters.iter().map(Cluster::len).sum::<usize>()
    }

    /// Every node as `(distance to typical gateway, SF index)`.
    pub fn links(&self) -> impl Iterator<Item = (f64, u8)> + '_ {
        let own = self
            .typical
            .offsets
            .iter()
            .zip(&self.typical.sf_of)
            .map(|(o, &q)| (o.norm(), q));
        let others = self.gateways.iter().zip(&self.clusters).flat_map(|(&g, c)| {
            c.offsets
                .iter()
                .zip(&c.sf_of)
                .map(move |(&o, &q)| (distance_to_typical_gw(g, o), q))
        });
        own.chain(others)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Scenario(e.to_string()))
    }
}

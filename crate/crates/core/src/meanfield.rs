//! Mean-field description of the clustered growth model.
//!
//! A cluster node's degree `k` is treated as a continuous function of time
//! and evolves under the dynamical equation
//!
//! ```text
//! dk/dt = M/(m0+pt) * [p(1-k/kmax) k/Σk + (1-p)(1-k/kmax) c/Σc]
//!         - 2Mz(2m0+t) / ((m0+pt)^2 (m0+t-pt))
//! ```
//!
//! With the whole network as local world, no saturation, `c = 2` and the
//! large-`t` limit this reduces to `dk/dt = (A k + B - 2zC)/t` with
//! `A = p/(1+p)`, `B = (1-p)/p`, `C = 1/(p(1-p))`. Everything in this module
//! is a pure function of its arguments.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Model-level parameters entering the analytic expressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldParams {
    /// Probability that a newcomer is a cluster node.
    pub p: f64,
    /// Deletion rate: links removed per link added.
    pub z: f64,
    /// Initial (seed) node count.
    pub m0: f64,
    /// Local-world size `M`.
    pub local_world: f64,
}

impl MeanFieldParams {
    /// Model-mode parameters: `0 < p < 0.5`.
    pub fn new(p: f64, z: f64, m0: f64, local_world: f64) -> Result<Self> {
        if !(p > 0.0 && p < 0.5) {
            return Err(domain(format!("p = {p} outside the model range (0, 0.5)")));
        }
        Self::relaxed(p, z, m0, local_world)
    }

    /// Exploration mode accepting any `0 < p < 1`.
    pub fn relaxed(p: f64, z: f64, m0: f64, local_world: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(domain(format!("p = {p} outside (0, 1)")));
        }
        if !(m0 >= 1.0) {
            return Err(domain(format!("m0 = {m0} must be at least 1")));
        }
        if !(local_world >= 1.0) {
            return Err(domain(format!("M = {local_world} must be at least 1")));
        }
        if !z.is_finite() {
            return Err(domain("z must be finite"));
        }
        Ok(Self {
            p,
            z,
            m0,
            local_world,
        })
    }

    /// Number of cluster nodes expected at time `t`, `m0 + p t`.
    pub fn cluster_nodes(&self, t: f64) -> f64 {
        self.m0 + self.p * t
    }
}

/// Constants of the reduced rate equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldConstants {
    pub p: f64,
    /// `p / (1 + p)`; the growth exponent of a degree trajectory.
    pub a: f64,
    /// `(1 - p) / p`; the constant drift from normal-node attachment.
    pub b: f64,
    /// `1 / (p (1 - p))`; the weight of the deletion rate.
    pub c: f64,
}

impl MeanFieldConstants {
    /// `A + B - 2zC`, the base of the distribution's normalising factor and
    /// the value of `A k + B - 2zC` at `k = 1`.
    pub fn offset(&self, z: f64) -> f64 {
        self.a + self.b - 2.0 * z * self.c
    }

    /// `A k + B - 2zC`, the argument the degree distribution is a power of.
    pub fn argument(&self, k: f64, z: f64) -> f64 {
        self.a * k + self.b - 2.0 * z * self.c
    }

    /// Tail exponent of the degree distribution, `-1/A - 1 = -(1+2p)/p`.
    pub fn tail_exponent(&self) -> f64 {
        -(1.0 + 2.0 * self.p) / self.p
    }
}

pub fn constants(p: f64) -> Result<MeanFieldConstants> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!("p = {p} outside (0, 1)")));
    }
    Ok(MeanFieldConstants {
        p,
        a: p / (1.0 + p),
        b: (1.0 - p) / p,
        c: 1.0 / (p * (1.0 - p)),
    })
}

/// Growth rate of a degree when `z = 0` and the local world is a single
/// node: one over the number of cluster nodes, `1 / (m0 + p t)`.
pub fn case1_rate(t: f64, m0: f64, p: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(domain(format!("t = {t} must be non-negative")));
    }
    let clusters = m0 + p * t;
    if !(clusters > 0.0) {
        return Err(domain("no cluster nodes"));
    }
    Ok(1.0 / clusters)
}

/// Per-node inputs to [`full_rate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateInputs {
    pub degree: f64,
    pub kmax: f64,
    pub t: f64,
    /// `k_i / Σ k_j`.
    pub kbar_inv: f64,
    /// `c_i / Σ c_j`.
    pub cbar_inv: f64,
}

/// `k_i / Σk` with the mean-field total degree `k̄ (m0 + pt) = 2m0 + t + pt`.
pub fn kbar_inv_mean_field(k_i: f64, t: f64, m0: f64, p: f64) -> f64 {
    k_i / (2.0 * m0 + t + p * t)
}

/// `c_i / Σc` with the mean-field total `c̄ (m0 + pt) = 2 (m0 + pt)`.
pub fn cbar_inv_mean_field(c_i: f64, t: f64, m0: f64, p: f64) -> f64 {
    c_i / (mean_cluster_edges() * (m0 + p * t))
}

/// Right-hand side of the full dynamical equation for one cluster node.
///
/// The deletion term is evaluated exactly as `2Mz(2m0+t) / ((m0+pt)^2 (m0+t-pt))`.
pub fn full_rate(node: &RateInputs, params: &MeanFieldParams) -> Result<f64> {
    if !(node.kmax > 0.0) {
        return Err(domain("kmax_i must be positive"));
    }
    if node.degree > node.kmax {
        return Err(domain(format!(
            "degree {} exceeds its cap {}",
            node.degree, node.kmax
        )));
    }
    if !(node.t >= 0.0) {
        return Err(domain(format!("t = {} must be non-negative", node.t)));
    }
    let MeanFieldParams {
        p,
        z,
        m0,
        local_world,
    } = *params;
    let clusters = params.cluster_nodes(node.t);
    let saturation = 1.0 - node.degree / node.kmax;
    let attach = p * saturation * node.kbar_inv + (1.0 - p) * saturation * node.cbar_inv;
    let deletion = 2.0 * local_world * z * (2.0 * m0 + node.t)
        / (clusters * clusters * (m0 + node.t - p * node.t));
    Ok(local_world / clusters * attach - deletion)
}

/// Mean cluster-node degree `(2m0 + t + pt) / (m0 + pt)`.
pub fn mean_degree(t: f64, m0: f64, p: f64) -> f64 {
    (2.0 * m0 + t + p * t) / (m0 + p * t)
}

/// Mean number of cluster-to-cluster edges per cluster node.
///
/// A cluster node has one such partner attached to it, and that partner is
/// counted from both ends, so the mean is the constant 2.
pub const fn mean_cluster_edges() -> f64 {
    2.0
}

/// Reduced rate `(A k + B - 2zC) / t`.
pub fn reduced_rate(k: f64, t: f64, consts: &MeanFieldConstants, z: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(domain("reduced rate is singular at t = 0"));
    }
    Ok(consts.argument(k, z) / t)
}

/// Closed-form solution of the reduced equation with `k(t_i) = 1`:
/// `k(t) = [(A+B-2zC)(t/t_i)^A - B + 2zC] / A`.
pub fn degree_trajectory(t: f64, t_i: f64, consts: &MeanFieldConstants, z: f64) -> Result<f64> {
    if !(t_i > 0.0 && t >= t_i) {
        return Err(domain(format!("need t >= t_i > 0, got t = {t}, t_i = {t_i}")));
    }
    let offset = consts.offset(z);
    if !(offset > 0.0) {
        return Err(domain(format!(
            "A + B - 2zC = {offset} is not positive; trajectory undefined"
        )));
    }
    let growth = (t / t_i).powf(consts.a);
    Ok((offset * growth - consts.b + 2.0 * z * consts.c) / consts.a)
}

/// A point at which to evaluate the degree distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistributionQuery {
    pub k: f64,
    pub p: f64,
    pub z: f64,
}

/// Unnormalised degree density `(A+B-2zC)^(1/A) (kA+B-2zC)^(-1/A-1)`.
///
/// The value is proportional to `P(k)`; no normalisation constant is applied,
/// so only ratios, slopes and stationary points are meaningful.
pub fn degree_distribution(q: &DegreeDistributionQuery) -> Result<f64> {
    let consts = constants(q.p)?;
    let offset = consts.offset(q.z);
    let arg = consts.argument(q.k, q.z);
    if !(offset > 0.0 && arg > 0.0) {
        return Err(domain(format!(
            "distribution undefined at k = {}, p = {}, z = {}: bases {offset} and {arg} must be positive",
            q.k, q.p, q.z
        )));
    }
    let inv_a = 1.0 / consts.a;
    Ok(offset.powf(inv_a) * arg.powf(-inv_a - 1.0))
}

/// Deletion rate at which the degree distribution is stationary in `z`
/// for fixed `k`: `(1 + A + B - k) / (2C)`.
pub fn z_critical(k: f64, p: f64) -> Result<f64> {
    let consts = constants(p)?;
    Ok((1.0 + consts.a + consts.b - k) / (2.0 * consts.c))
}

/// Cluster probability implied by an average neighbour count `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterProbability {
    pub p: f64,
    /// Whether `p` lies inside the model's assumed range `(0, 0.5)`.
    pub within_model: bool,
}

/// Cluster-node probability at `z = 0`: `p = ½ (√((k+3)/(k-1)) - 1)`.
///
/// This is the positive root of `(k-1)p² + (k-1)p - 1 = 0`, i.e. the inverse
/// of `k = 1 + A + B`. Values of `k` below 3 give `p > 0.5`; they are returned
/// with `within_model = false` rather than rejected.
pub fn p_of_k(k: f64) -> Result<ClusterProbability> {
    if !(k > 1.0) || !k.is_finite() {
        return Err(domain(format!("k = {k} must be a finite value above 1")));
    }
    let radicand = ((k + 3.0) / (k - 1.0)).sqrt();
    // (r - 1)/2 rewritten as (2/(k-1)) / (r + 1) to avoid cancellation for large k.
    let p = (2.0 / (k - 1.0)) / (radicand + 1.0);
    Ok(ClusterProbability {
        p,
        within_model: p > 0.0 && p < 0.5,
    })
}

/// How a fractional predicted cluster count is turned into an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rounding {
    /// Smallest integer not below the product.
    #[default]
    Ceiling,
    /// Nearest integer, halves rounded up.
    HalfUp,
}

impl Rounding {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Rounding::Ceiling => x.ceil(),
            Rounding::HalfUp => (x + 0.5).floor(),
        }
    }
}

/// Predicted number of cluster heads for `n` nodes with `k` average
/// neighbours per head, `⌈n · p(k)⌉`.
pub fn predict_cluster_count(n: u64, k: f64) -> Result<u64> {
    predict_cluster_count_with(n, k, Rounding::default())
}

pub fn predict_cluster_count_with(n: u64, k: f64, rounding: Rounding) -> Result<u64> {
    if n == 0 {
        return Err(domain("node count must be at least 1"));
    }
    let prob = p_of_k(k)?;
    Ok(rounding.apply(n as f64 * prob.p) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn constants_at_half() {
        let c = constants(0.5).unwrap();
        assert_relative_eq!(c.a, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(c.b, 1.0, epsilon = 1e-15);
        assert_relative_eq!(c.c, 4.0, epsilon = 1e-15);
    }

    #[test]
    fn constants_near_eq15_root() {
        // Values from a 50-digit evaluation of the three closed forms at p = 0.366.
        let c = constants(0.366).unwrap();
        assert_relative_eq!(c.a, 0.267_935_578_330_893_1, epsilon = 1e-12);
        assert_relative_eq!(c.b, 1.732_240_437_158_469_9, epsilon = 1e-12);
        assert_relative_eq!(c.c, 4.309_527_503_404_526_7, epsilon = 1e-12);
        assert!((c.a + c.b + 1.0 - 3.0).abs() < 1e-3);
    }

    #[test]
    fn constants_reject_poles() {
        assert!(constants(0.0).is_err());
        assert!(constants(1.0).is_err());
        assert!(constants(-0.2).is_err());
        assert!(constants(f64::NAN).is_err());
        let tiny = constants(1e-9).unwrap();
        assert!(tiny.b > 1e8 && tiny.c > 1e8);
    }

    #[test]
    fn params_domain() {
        assert!(MeanFieldParams::new(0.5, 0.0, 3.0, 1.0).is_err());
        assert!(MeanFieldParams::relaxed(0.5, 0.0, 3.0, 1.0).is_ok());
        assert!(MeanFieldParams::new(0.3, 0.0, 0.5, 1.0).is_err());
        assert!(MeanFieldParams::new(0.3, 0.0, 3.0, 0.0).is_err());
    }

    #[test]
    fn case1_rate_values() {
        assert_relative_eq!(case1_rate(0.0, 5.0, 0.3).unwrap(), 0.2);
        assert_relative_eq!(case1_rate(100.0, 5.0, 0.3).unwrap(), 1.0 / 35.0, epsilon = 1e-15);
        let mut prev = f64::INFINITY;
        for t in 0..200 {
            let r = case1_rate(t as f64, 5.0, 0.3).unwrap();
            assert!(r < prev);
            prev = r;
        }
        assert!(case1_rate(-1.0, 5.0, 0.3).is_err());
    }

    #[test]
    fn full_rate_saturated_node_has_no_growth() {
        let params = MeanFieldParams::new(0.3, 0.0, 3.0, 2.0).unwrap();
        let node = RateInputs {
            degree: 10.0,
            kmax: 10.0,
            t: 5.0,
            kbar_inv: 0.2,
            cbar_inv: 0.1,
        };
        assert_eq!(full_rate(&node, &params).unwrap(), 0.0);
    }

    #[test]
    fn full_rate_whole_network_prefactor_is_one() {
        let (p, m0, t) = (0.3, 3.0, 12.0);
        let params = MeanFieldParams::new(p, 0.0, m0, m0 + p * t).unwrap();
        let node = RateInputs {
            degree: 3.0,
            kmax: 12.0,
            t,
            kbar_inv: 0.05,
            cbar_inv: 0.07,
        };
        let sat = 1.0 - 3.0 / 12.0;
        let expected = p * sat * 0.05 + (1.0 - p) * sat * 0.07;
        assert_relative_eq!(full_rate(&node, &params).unwrap(), expected, epsilon = 1e-15);
    }

    #[test]
    fn full_rate_spot_value() {
        // Exact rational evaluation of the printed equation gives 8/375.
        let (m0, p, t) = (3.0, 0.4, 10.0);
        let params = MeanFieldParams::new(p, 0.1, m0, 3.0).unwrap();
        let node = RateInputs {
            degree: 2.0,
            kmax: 10.0,
            t,
            kbar_inv: kbar_inv_mean_field(2.0, t, m0, p),
            cbar_inv: cbar_inv_mean_field(2.0, t, m0, p),
        };
        assert_relative_eq!(full_rate(&node, &params).unwrap(), 8.0 / 375.0, epsilon = 1e-15);
    }

    #[test]
    fn full_rate_errors() {
        let params = MeanFieldParams::new(0.3, 0.0, 3.0, 2.0).unwrap();
        let mut node = RateInputs {
            degree: 0.0,
            kmax: 0.0,
            t: 1.0,
            kbar_inv: 0.0,
            cbar_inv: 0.0,
        };
        assert!(full_rate(&node, &params).is_err());
        node.kmax = 3.0;
        node.degree = 4.0;
        assert!(full_rate(&node, &params).is_err());
    }

    #[test]
    fn mean_degree_values() {
        assert_eq!(mean_degree(0.0, 3.0, 0.3), 2.0);
        assert_relative_eq!(mean_degree(7.0, 3.0, 0.3), 15.1 / 5.1, epsilon = 1e-14);
        assert_relative_eq!(mean_degree(1e12, 3.0, 0.5), 3.0, epsilon = 1e-9);
    }

    #[test]
    fn cluster_edge_mean_is_two() {
        assert_eq!(mean_cluster_edges(), 2.0);
    }

    #[test]
    fn reduced_rate_values() {
        let c = constants(0.5).unwrap();
        assert_relative_eq!(reduced_rate(1.0, 1.0, &c, 0.0).unwrap(), 4.0 / 3.0, epsilon = 1e-15);
        let r1 = reduced_rate(3.0, 5.0, &c, 0.1).unwrap();
        let r2 = reduced_rate(3.0, 10.0, &c, 0.1).unwrap();
        assert_relative_eq!(r2, r1 / 2.0, epsilon = 1e-15);
        let k = 4.0;
        let z_eq = (c.a * k + c.b) / (2.0 * c.c);
        assert!(reduced_rate(k, 2.0, &c, z_eq).unwrap().abs() < 1e-15);
        assert!(reduced_rate(1.0, 0.0, &c, 0.0).is_err());
    }

    #[test]
    fn trajectory_values() {
        let c = constants(0.5).unwrap();
        assert_relative_eq!(degree_trajectory(4.0, 4.0, &c, 0.0).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(degree_trajectory(8.0, 1.0, &c, 0.0).unwrap(), 5.0, epsilon = 1e-12);
        assert!(degree_trajectory(1.0, 2.0, &c, 0.0).is_err());
        // A + B - 2zC = 4/3 - 8z is non-positive from z = 1/6 on.
        assert!(degree_trajectory(2.0, 1.0, &c, 1.0 / 6.0).is_err());
    }

    #[test]
    fn distribution_values() {
        let q = DegreeDistributionQuery {
            k: 1.0,
            p: 0.5,
            z: 0.0,
        };
        assert_relative_eq!(degree_distribution(&q).unwrap(), 0.75, epsilon = 1e-14);
        let bad = DegreeDistributionQuery {
            k: 1.0,
            p: 0.5,
            z: 1.0,
        };
        assert!(degree_distribution(&bad).is_err());
    }

    #[test]
    fn distribution_tail_slope() {
        for &p in &[0.1, 0.25, 0.4, 0.5] {
            let eval = |k: f64| degree_distribution(&DegreeDistributionQuery { k, p, z: 0.0 }).unwrap();
            // The local slope approaches the exponent as B/(Ak) vanishes.
            let (k1, k2) = (1e7, 1e8);
            let slope = (eval(k2).ln() - eval(k1).ln()) / (k2.ln() - k1.ln());
            let expected = -(1.0 + 2.0 * p) / p;
            assert!((slope - expected).abs() < 1e-3, "p={p}: {slope}");
        }
    }

    #[test]
    fn distribution_decreasing_at_zero_z() {
        let mut prev = f64::INFINITY;
        for i in 0..500 {
            let k = 1.0 + i as f64 * 0.37;
            let v = degree_distribution(&DegreeDistributionQuery { k, p: 0.3, z: 0.0 }).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn z_critical_values() {
        assert_relative_eq!(z_critical(4.0, 0.5).unwrap(), -5.0 / 24.0, epsilon = 1e-15);
        let c = constants(0.3).unwrap();
        assert_eq!(z_critical(1.0 + c.a + c.b, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn p_of_k_values() {
        let r = p_of_k(3.0).unwrap();
        assert_relative_eq!(r.p, 0.5 * (3f64.sqrt() - 1.0), epsilon = 1e-15);
        assert_relative_eq!(r.p, 0.366_025_403_784_438_6, epsilon = 1e-15);
        assert!(r.within_model);
        assert!(p_of_k(1.0).is_err());
        assert!(p_of_k(0.5).is_err());
        assert!(p_of_k(1e12).unwrap().p < 1e-6);
        let low = p_of_k(2.0).unwrap();
        assert!(low.p > 0.5 && !low.within_model);
    }

    #[test]
    fn predicted_counts() {
        assert_eq!(predict_cluster_count(100, 3.0).unwrap(), 37);
        assert_eq!(predict_cluster_count(500, 13.0).unwrap(), 39);
        assert_eq!(predict_cluster_count(400, 10.0).unwrap(), 41);
        assert_eq!(predict_cluster_count_with(100, 3.0, Rounding::HalfUp).unwrap(), 37);
        assert_eq!(predict_cluster_count_with(500, 13.0, Rounding::HalfUp).unwrap(), 39);
        assert_eq!(predict_cluster_count_with(400, 10.0, Rounding::HalfUp).unwrap(), 40);
        assert!(predict_cluster_count(100, 1.0).is_err());
        assert!(predict_cluster_count(0, 3.0).is_err());
    }

    proptest! {
        #[test]
        fn prop_eq15_inverts_constants(p in 1e-3f64..0.4999) {
            let c = constants(p).unwrap();
            let k = 1.0 + c.a + c.b;
            prop_assert!((p_of_k(k).unwrap().p - p).abs() < 1e-12);
            prop_assert!(z_critical(k, p).unwrap().abs() < 1e-12);
            prop_assert!(c.a > 0.0 && c.a < 1.0 / 3.0);
            prop_assert!(c.b > 1.0);
            prop_assert!(c.c >= 4.0);
            prop_assert!((1.0 / c.a - (1.0 + p) / p).abs() < 1e-9 * (1.0 + p) / p);
        }

        #[test]
        fn prop_trajectory_starts_at_one(p in 0.05f64..0.49, z in -1.0f64..0.05, t_i in 0.1f64..1e4) {
            let c = constants(p).unwrap();
            prop_assume!(c.offset(z) > 0.0);
            prop_assert!((degree_trajectory(t_i, t_i, &c, z).unwrap() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn prop_mean_degree_starts_at_two(m0 in 1u32..1000, p in 0.001f64..0.999) {
            prop_assert_eq!(mean_degree(0.0, m0 as f64, p), 2.0);
        }
    }
}

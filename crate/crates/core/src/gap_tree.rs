//! Balanced tree over the gaps of a set carrying kernel moments of
//! gap profiles, for far-field evaluation of
//! `Σ_j ∫_{I_j} P(dist(ζ',E)) / |ζ - ζ'|² |dζ'|`.
//!
//! A profile is any function of the arc distance to the nearest gap
//! endpoint. Each gap is symmetric about its midpoint, so its own odd
//! moments vanish; node moments about the node center are aggregated by
//! binomial shifts and stored scaled by powers of the node half-span.

use rayon::prelude::*;

use crate::circle_sets::{angle_diff, CircleSet};
use crate::kernel::{taylor_coefficients, MAX_ORDER};
use crate::quad::{integrate_vec, Tolerance};

const ORDERS: usize = MAX_ORDER + 1;
const EVEN: usize = MAX_ORDER / 2 + 1;
const LEAF_SIZE: usize = 8;
const NO_CHILD: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct Node {
    pub lo: usize,
    pub hi: usize,
    pub center: f64,
    pub half_span: f64,
    pub max_half_len: f64,
    left: u32,
    right: u32,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.left == NO_CHILD
    }
}

/// Opening parameter giving a truncation error below `rel_tol / 10`
/// relative to each expanded node.
pub fn opening_ratio(rel_tol: f64) -> f64 {
    let m = MAX_ORDER as f64;
    ((rel_tol / 10.0) / (m + 2.0)).powf(1.0 / (m + 1.0)).min(0.5)
}

#[derive(Clone, Debug)]
pub struct GapTree {
    profiles: usize,
    nodes: Vec<Node>,
    moments: Vec<f64>,
}

fn binomials() -> [[f64; ORDERS]; ORDERS] {
    let mut b = [[0.0; ORDERS]; ORDERS];
    for n in 0..ORDERS {
        b[n][0] = 1.0;
        for k in 1..=n {
            b[n][k] = b[n - 1][k - 1] + if k < n { b[n - 1][k] } else { 0.0 };
        }
    }
    b
}

impl GapTree {
    /// Build the tree; `profile(v, out)` fills the `profiles` values at arc
    /// distance `v` from the nearest gap endpoint.
    pub fn build<F>(set: &CircleSet, profiles: usize, profile: F) -> Self
    where
        F: Fn(f64, &mut [f64]) + Sync,
    {
        let gaps = set.gaps();
        let n = gaps.len();
        let mut nodes: Vec<Node> = Vec::with_capacity(2 * n / LEAF_SIZE + 2);
        fn split(lo: usize, hi: usize, nodes: &mut Vec<Node>) -> u32 {
            let idx = nodes.len();
            nodes.push(Node { lo, hi, center: 0.0, half_span: 0.0, max_half_len: 0.0, left: NO_CHILD, right: NO_CHILD });
            if hi - lo > LEAF_SIZE {
                let mid = lo + (hi - lo) / 2;
                let l = split(lo, mid, nodes);
                let r = split(mid, hi, nodes);
                nodes[idx].left = l;
                nodes[idx].right = r;
            }
            idx as u32
        }
        split(0, n, &mut nodes);
        for node in nodes.iter_mut() {
            let a = gaps[node.lo].start;
            let b = gaps[node.hi - 1].end();
            node.center = 0.5 * (a + b);
            node.half_span = 0.5 * (b - a);
            node.max_half_len = gaps[node.lo..node.hi].iter().fold(0.0f64, |m, g| m.max(g.half()));
        }
        let binom = binomials();
        let stride = profiles * ORDERS;
        let mut moments = vec![0.0; nodes.len() * stride];

        // leaves from per-gap moments
        let leaf_ids: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].is_leaf()).collect();
        let leaf_moments: Vec<Vec<f64>> = leaf_ids
            .par_iter()
            .map(|&i| {
                let node = &nodes[i];
                let mut acc = vec![0.0; stride];
                let mut per = vec![0.0; profiles * EVEN];
                for g in &gaps[node.lo..node.hi] {
                    gap_moments(g.half(), profiles, &profile, &mut per);
                    let r = g.half() / node.half_span;
                    let shift = (g.start + g.half() - node.center) / node.half_span;
                    for p in 0..profiles {
                        for m in 0..ORDERS {
                            let mut s = 0.0;
                            let mut k = 0;
                            while k <= m {
                                s += binom[m][k] * per[p * EVEN + k / 2] * r.powi(k as i32) * shift.powi((m - k) as i32);
                                k += 2;
                            }
                            acc[p * ORDERS + m] += s;
                        }
                    }
                }
                acc
            })
            .collect();
        for (&i, m) in leaf_ids.iter().zip(leaf_moments) {
            moments[i * stride..(i + 1) * stride].copy_from_slice(&m);
        }
        // children are created after their parent, so a reverse sweep is bottom-up
        for i in (0..nodes.len()).rev() {
            if nodes[i].is_leaf() {
                continue;
            }
            let parent = nodes[i].clone();
            let mut acc = vec![0.0; stride];
            for c in [parent.left as usize, parent.right as usize] {
                let child = &nodes[c];
                let r = child.half_span / parent.half_span;
                let shift = (child.center - parent.center) / parent.half_span;
                for p in 0..profiles {
                    for m in 0..ORDERS {
                        let mut s = 0.0;
                        for k in 0..=m {
                            s += binom[m][k] * moments[c * stride + p * ORDERS + k] * r.powi(k as i32) * shift.powi((m - k) as i32);
                        }
                        acc[p * ORDERS + m] += s;
                    }
                }
            }
            moments[i * stride..(i + 1) * stride].copy_from_slice(&acc);
        }
        GapTree { profiles, nodes, moments }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Far-field sum for a point at signed angular offset `offset` from
    /// `anchor`. Nodes that are well separated and satisfy `accept` are
    /// expanded with profile coefficients `coefs`; every other gap except
    /// `own` is passed to `near`.
    pub fn traverse<A, N>(&self, anchor: f64, offset: f64, own: Option<usize>, theta_open: f64, coefs: &[f64], accept: A, mut near: N) -> f64
    where
        A: Fn(&Node) -> bool,
        N: FnMut(usize),
    {
        debug_assert_eq!(coefs.len(), self.profiles);
        let stride = self.profiles * ORDERS;
        let mut total = 0.0;
        let mut stack = vec![0u32];
        let mut taylor = [0.0; ORDERS];
        while let Some(i) = stack.pop() {
            let node = &self.nodes[i as usize];
            let contains_own = own.is_some_and(|o| o >= node.lo && o < node.hi);
            if !contains_own {
                let x = angle_diff(node.center, anchor) - offset;
                if node.half_span <= theta_open * x.abs() && accept(node) {
                    taylor_coefficients(x, MAX_ORDER, &mut taylor);
                    let base = i as usize * stride;
                    let mut hm = 1.0;
                    let mut sum = 0.0;
                    for m in 0..ORDERS {
                        let mut s = 0.0;
                        for (p, c) in coefs.iter().enumerate() {
                            s += c * self.moments[base + p * ORDERS + m];
                        }
                        sum += taylor[m] * hm * s;
                        hm *= node.half_span;
                    }
                    total += sum;
                    continue;
                }
            }
            if node.is_leaf() {
                for j in node.lo..node.hi {
                    if Some(j) != own {
                        near(j);
                    }
                }
            } else {
                stack.push(node.right);
                stack.push(node.left);
            }
        }
        total
    }
}

/// `2∫_0^h P(v)((h - v)/h)^{2k} dv` for `k = 0..EVEN`, through `v = h s³`.
fn gap_moments<F: Fn(f64, &mut [f64])>(h: f64, profiles: usize, profile: &F, out: &mut [f64]) {
    let mut buf = vec![0.0; profiles];
    let (vals, _) = integrate_vec(
        |s, o: &mut [f64]| {
            let s2 = s * s;
            let v = h * s2 * s;
            if v <= 0.0 {
                o.iter_mut().for_each(|x| *x = 0.0);
                return;
            }
            profile(v, &mut buf);
            let jac = 6.0 * h * s2;
            let q = 1.0 - s2 * s;
            let q2 = q * q;
            for p in 0..profiles {
                let mut w = jac * buf[p];
                for k in 0..EVEN {
                    o[p * EVEN + k] = w;
                    w *= q2;
                }
            }
        },
        profiles * EVEN,
        0.0,
        1.0,
        Tolerance::new(1e-13, 0.0),
    );
    out.copy_from_slice(&vals);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_sets::{build_cantor, chord, CantorSpec};
    use crate::kernel::kernel;
    use crate::quad::integrate_graded;
    use crate::quad::Endpoint;

    fn direct(set: &CircleSet, theta: f64, p: impl Fn(f64) -> f64) -> f64 {
        let mut total = 0.0;
        for g in set.gaps() {
            if g.offset(theta).is_some() {
                continue;
            }
            let h = g.half();
            let r = integrate_graded(
                |v| p(v) * (kernel(g.start + v - theta) + kernel(g.end() - v - theta)),
                0.0,
                h,
                Endpoint::Left,
                Tolerance::new(1e-13, 0.0),
            );
            total += r.value;
        }
        total
    }

    #[test]
    fn far_field_matches_direct_sum() {
        let e = build_cantor(&CantorSpec::constant(0.3, 7)).unwrap();
        let tree = GapTree::build(&e, 2, |v, out| {
            let d = chord(v);
            out[0] = d.powf(0.6);
            out[1] = d.ln();
        });
        let theta = e.gaps().iter().find(|g| !g.unresolved && g.generation == 2).unwrap().midpoint();
        let own = e.locate(theta);
        for coefs in [[1.0, 0.0], [0.0, 1.0], [0.5, -2.0]] {
            let mut near = Vec::new();
            let far = tree.traverse(theta, 0.0, own, opening_ratio(1e-10), &coefs, |_| true, |j| near.push(j));
            let mut near_sum = 0.0;
            for j in near {
                let g = e.gaps()[j];
                near_sum += integrate_graded(
                    |v| {
                        let d = chord(v);
                        (coefs[0] * d.powf(0.6) + coefs[1] * d.ln()) * (kernel(g.start + v - theta) + kernel(g.end() - v - theta))
                    },
                    0.0,
                    g.half(),
                    Endpoint::Left,
                    Tolerance::new(1e-13, 0.0),
                )
                .value;
            }
            let reference = direct(&e, theta, |v| {
                let d = chord(v);
                coefs[0] * d.powf(0.6) + coefs[1] * d.ln()
            });
            let got = far + near_sum;
            assert!((got - reference).abs() <= 1e-9 * reference.abs().max(1.0), "{got} vs {reference}");
        }
    }

    #[test]
    fn opening_ratio_tracks_tolerance() {
        assert!(opening_ratio(1e-8) < opening_ratio(1e-5));
        assert!(opening_ratio(1e-8) > 0.1);
    }
}

//! Positive measures on the circle and discretized measures on the disk.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::circle_sets::{chord, chord_to_arc, normalize, Arc as CircleArc, CircleSet, TWO_PI};
use crate::quad::{integrate, integrate_graded, pairwise_sum, Endpoint, Tolerance};
use crate::weights::Weight;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Absolutely continuous part of a boundary measure, per unit arc length.
#[derive(Clone)]
pub enum Density {
    /// Function of the angle.
    Angle(RealFn),
    /// Function of the chordal distance to a set.
    Distance { set: Arc<CircleSet>, g: RealFn },
}

impl fmt::Debug for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Density::Angle(_) => write!(f, "Density::Angle"),
            Density::Distance { .. } => write!(f, "Density::Distance"),
        }
    }
}

/// `density(ζ)|dζ| + Σ mass_k δ_{ζ_k}`.
#[derive(Clone, Debug)]
pub struct BoundaryMeasure {
    density: Option<Density>,
    atoms: Vec<(f64, f64)>,
    tol: Tolerance,
}

impl BoundaryMeasure {
    fn with_density(density: Option<Density>) -> Self {
        BoundaryMeasure { density, atoms: Vec::new(), tol: Tolerance::new(1e-12, 1e-300) }
    }

    /// The zero measure (add atoms with [`BoundaryMeasure::with_atom`]).
    pub fn empty() -> Self {
        Self::with_density(None)
    }

    /// Normalized arc length `|dζ|/2π`.
    pub fn lebesgue() -> Self {
        Self::with_density(Some(Density::Angle(Arc::new(|_| 1.0 / TWO_PI))))
    }

    /// Arc length `|dζ|`.
    pub fn arc_length() -> Self {
        Self::with_density(Some(Density::Angle(Arc::new(|_| 1.0))))
    }

    pub fn point_mass(theta: f64, mass: f64) -> Self {
        Self::empty().with_atom(theta, mass)
    }

    /// `g(θ)|dζ|`.
    pub fn angular<F: Fn(f64) -> f64 + Send + Sync + 'static>(g: F) -> Self {
        Self::with_density(Some(Density::Angle(Arc::new(g))))
    }

    /// `g(dist(ζ,E))|dζ|`.
    pub fn distance<F: Fn(f64) -> f64 + Send + Sync + 'static>(set: Arc<CircleSet>, g: F) -> Self {
        Self::with_density(Some(Density::Distance { set, g: Arc::new(g) }))
    }

    /// `dist(ζ,E)^a |dζ|`.
    pub fn dist_power(set: Arc<CircleSet>, a: f64) -> Self {
        Self::distance(set, move |d| d.powf(a))
    }

    /// `dist(ζ,E) ω'(dist(ζ,E))² |dζ|`.
    pub fn omega_measure(set: Arc<CircleSet>, w: &Weight) -> Self {
        let w = w.clone();
        Self::distance(set, move |d| {
            let dw = w.derivative(d);
            d * dw * dw
        })
    }

    /// `dist(ζ,E)^{2α-1} |dζ|`.
    pub fn alpha_measure(set: Arc<CircleSet>, alpha: f64) -> Self {
        Self::dist_power(set, 2.0 * alpha - 1.0)
    }

    pub fn with_atom(mut self, theta: f64, mass: f64) -> Self {
        self.atoms.push((normalize(theta), mass));
        self
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// `c·μ`.
    pub fn scaled(&self, c: f64) -> Self {
        let density = self.density.as_ref().map(|d| match d {
            Density::Angle(g) => {
                let g = g.clone();
                Density::Angle(Arc::new(move |t| c * g(t)))
            }
            Density::Distance { set, g } => {
                let g = g.clone();
                Density::Distance { set: set.clone(), g: Arc::new(move |d| c * g(d)) }
            }
        });
        BoundaryMeasure { density, atoms: self.atoms.iter().map(|&(t, m)| (t, c * m)).collect(), tol: self.tol }
    }

    /// Density at angle `theta`.
    pub fn density_at(&self, theta: f64) -> f64 {
        match &self.density {
            None => 0.0,
            Some(Density::Angle(g)) => g(theta),
            Some(Density::Distance { set, g }) => g(set.dist(theta)),
        }
    }

    /// Mass of a whole gap of arc length `length` for a distance density.
    pub fn gap_mass(&self, length: f64) -> Option<f64> {
        match &self.density {
            Some(Density::Distance { g, .. }) => Some(2.0 * self.distance_segment(g, 0.0, 0.5 * length)),
            _ => None,
        }
    }

    /// `∫_a^b g(chord v) dv` along arc distance `v` from a gap endpoint.
    fn distance_segment(&self, g: &RealFn, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        if a == 0.0 {
            integrate_graded(|v| g(chord(v)), 0.0, b, Endpoint::Left, self.tol).value
        } else {
            integrate(|v| g(chord(v)), a, b, self.tol).value
        }
    }

    /// Distance-density mass of the part `[p, q]` (offsets from the gap
    /// start) of a gap of length `len`; `None` for other densities.
    pub(crate) fn gap_piece_mass(&self, len: f64, p: f64, q: f64) -> Option<f64> {
        match &self.density {
            Some(Density::Distance { g, .. }) => Some(self.gap_piece(g, len, p.max(0.0), q.min(len))),
            _ => None,
        }
    }

    /// Density mass of the part `[p, q]` (offsets from the gap start) of a
    /// gap of length `len`.
    fn gap_piece(&self, g: &RealFn, len: f64, p: f64, q: f64) -> f64 {
        let h = 0.5 * len;
        let mut total = 0.0;
        if p < h {
            total += self.distance_segment(g, p, q.min(h));
        }
        if q > h {
            // right half measured from the end
            total += self.distance_segment(g, len - q, len - p.max(h));
        }
        total
    }

    /// `μ(I)` for a closed arc.
    pub fn arc_mass(&self, arc: CircleArc) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|(t, _)| arc.contains(*t)).map(|(_, m)| m).sum();
        let dens = match &self.density {
            None => 0.0,
            Some(Density::Angle(g)) => integrate(|t| g(t), arc.start, arc.end(), self.tol).value,
            Some(Density::Distance { set, g }) => self.distance_arc_mass(set, g, arc),
        };
        atoms + dens
    }

    fn distance_arc_mass(&self, set: &CircleSet, g: &RealFn, arc: CircleArc) -> f64 {
        if arc.length >= TWO_PI {
            let mut whole: HashMap<u64, f64> = HashMap::new();
            let parts: Vec<f64> = set
                .gaps()
                .iter()
                .map(|gap| *whole.entry(gap.length.to_bits()).or_insert_with(|| 2.0 * self.distance_segment(g, 0.0, gap.half())))
                .collect();
            return pairwise_sum(&parts) + on_set(set, g);
        }
        let gaps = set.gaps();
        let n = gaps.len();
        let a0 = normalize(arc.start);
        let (first, first_rel) = match set.locate(a0) {
            Some(j) => (j, -gaps[j].offset(a0).unwrap_or(0.0)),
            None => {
                let i = gaps.partition_point(|gp| gp.start < a0) % n;
                (i, (gaps[i].start - a0).rem_euclid(TWO_PI))
            }
        };
        let mut parts = Vec::new();
        let mut whole: HashMap<u64, f64> = HashMap::new();
        let mut covered = 0.0;
        for step in 0..=n {
            let j = (first + step) % n;
            let gp = &gaps[j];
            let rel = if step == 0 { first_rel } else { (gp.start - a0).rem_euclid(TWO_PI) };
            if rel >= arc.length {
                break;
            }
            let p = (-rel).max(0.0);
            let q = (arc.length - rel).min(gp.length);
            if q >= gp.length && p <= 0.0 {
                parts.push(*whole.entry(gp.length.to_bits()).or_insert_with(|| 2.0 * self.distance_segment(g, 0.0, gp.half())));
                covered += gp.length;
            } else if q > p {
                parts.push(self.gap_piece(g, gp.length, p, q));
                covered += q - p;
            }
        }
        let rest = (arc.length - covered).max(0.0);
        pairwise_sum(&parts) + if set.complement_length() > 0.0 { rest * g(0.0) } else { 0.0 }
    }

    /// Total mass.
    pub fn total_mass(&self) -> f64 {
        self.arc_mass(CircleArc { start: 0.0, length: TWO_PI })
    }

    /// `μ(E_t)` where `E_t` is the sublevel set of `set` at chordal level `t`.
    pub fn sublevel_mass(&self, set: &CircleSet, t: f64) -> f64 {
        let atoms: f64 = self.atoms.iter().filter(|(th, _)| set.dist(*th) <= t).map(|(_, m)| m).sum();
        let dens = match &self.density {
            None => 0.0,
            Some(Density::Distance { set: own, g }) if std::ptr::eq(own.as_ref(), set) || own.gaps() == set.gaps() => {
                let s = chord_to_arc(t);
                let parts: Vec<f64> =
                    set.gaps().iter().map(|gp| 2.0 * self.distance_segment(g, 0.0, s.min(gp.half()))).collect();
                pairwise_sum(&parts) + on_set(set, g)
            }
            Some(_) => {
                let (arcs, _) = set.sublevel_set(t);
                let parts: Vec<f64> = arcs.into_iter().map(|a| self.arc_mass(a)).collect();
                pairwise_sum(&parts)
            }
        };
        atoms + dens
    }
}

/// Density mass carried by the set itself (zero when it has no length).
fn on_set(set: &CircleSet, g: &RealFn) -> f64 {
    let len = set.complement_length();
    if len > 0.0 {
        len * g(0.0)
    } else {
        0.0
    }
}

/// Discretized measure on the closed disk.
#[derive(Clone, Debug, Default)]
pub struct DiskMeasure {
    pub samples: Vec<(Complex64, f64)>,
}

impl DiskMeasure {
    pub fn new(samples: Vec<(Complex64, f64)>) -> Self {
        DiskMeasure { samples }
    }

    /// Discretization of a boundary measure on `cells` equal arcs. Each cell
    /// sits at radius `1 - h/2` inside its own box; atoms stay on the circle.
    pub fn from_boundary(mu: &BoundaryMeasure, cells: usize) -> Self {
        let h = TWO_PI / cells as f64;
        let mut samples: Vec<(Complex64, f64)> = (0..cells)
            .map(|k| {
                let a = CircleArc { start: k as f64 * h, length: h };
                let atoms: f64 = mu.atoms.iter().filter(|(t, _)| a.contains(*t)).map(|(_, m)| m).sum();
                let mass = mu.arc_mass(a) - atoms;
                (Complex64::from_polar(1.0 - 0.5 * h, a.midpoint()), mass)
            })
            .filter(|(_, m)| *m > 0.0)
            .collect();
        for &(t, m) in &mu.atoms {
            samples.push((Complex64::from_polar(1.0, t), m));
        }
        DiskMeasure { samples }
    }

    /// Mass of the closed box `S̄(I) = {re^{iθ} : e^{iθ} ∈ I, 1 - |I| ≤ r ≤ 1}`.
    pub fn box_mass(&self, arc: CircleArc) -> f64 {
        self.samples.iter().filter(|(z, _)| in_box(*z, arc)).map(|(_, m)| m).sum()
    }
}

/// Whether `z` lies in the closed Carleson box over `arc`.
pub fn in_box(z: Complex64, arc: CircleArc) -> bool {
    let r = z.norm();
    if r < 1.0 - arc.length.min(1.0) - 1e-15 {
        return false;
    }
    if r == 0.0 {
        return arc.length >= 1.0;
    }
    arc.length >= TWO_PI || arc.contains(z.arg())
}

/// Lebesgue mass check used in tests: `|I|/2π` boxes.
pub fn lebesgue_box(arc: CircleArc) -> f64 {
    arc.length / (2.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle_sets::{build_cantor, CantorSpec};

    #[test]
    fn lebesgue_total_is_one() {
        assert!((BoundaryMeasure::lebesgue().total_mass() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn distance_density_arc_mass_matches_scan() {
        let e = Arc::new(build_cantor(&CantorSpec::constant(1.0 / 3.0, 3)).unwrap());
        let mu = BoundaryMeasure::dist_power(e.clone(), 0.5);
        let arc = CircleArc { start: 0.4, length: 2.9 };
        let n = 400_000;
        let h = arc.length / n as f64;
        let scan: f64 = (0..n).map(|k| e.dist(arc.start + (k as f64 + 0.5) * h).powf(0.5) * h).sum();
        assert!((mu.arc_mass(arc) - scan).abs() < 1e-6, "{} vs {}", mu.arc_mass(arc), scan);
        // wrapping arc
        let arc = CircleArc { start: 5.5, length: 1.5 };
        let scan: f64 = (0..n).map(|k| e.dist(arc.start + (k as f64 + 0.5) * arc.length / n as f64).powf(0.5) * arc.length / n as f64).sum();
        assert!((mu.arc_mass(arc) - scan).abs() < 1e-6);
    }

    #[test]
    fn sublevel_mass_of_arc_length() {
        let e = CircleSet::point();
        let mu = BoundaryMeasure::arc_length();
        let t = 0.01;
        assert!((mu.sublevel_mass(&e, t) - e.sublevel_measure(t)).abs() < 1e-12);
        let mu = BoundaryMeasure::distance(Arc::new(e.clone()), |_| 1.0);
        assert!((mu.sublevel_mass(&e, t) - e.sublevel_measure(t)).abs() < 1e-12);
    }

    #[test]
    fn atoms_and_boxes() {
        let mu = BoundaryMeasure::point_mass(PI, 2.0);
        assert_eq!(mu.arc_mass(CircleArc { start: 3.0, length: 0.2 }), 2.0);
        assert_eq!(mu.arc_mass(CircleArc { start: 0.0, length: 0.2 }), 0.0);
        let d = DiskMeasure::new(vec![(Complex64::new(0.0, 0.0), 1.5)]);
        assert_eq!(d.box_mass(CircleArc { start: 0.0, length: TWO_PI }), 1.5);
        assert_eq!(d.box_mass(CircleArc { start: 0.0, length: 0.5 }), 0.0);
    }
}

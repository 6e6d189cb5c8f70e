//! Ground-state fidelity and fidelity susceptibility along coupling paths,
//! sector-crossing detection, phase diagrams and triple points.
//!
//! The ground state of one coupling point is the lowest state over all
//! excitation sectors; whenever the winning sector changes the fidelity
//! between neighbouring points drops to exactly zero.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::hamiltonian::SectorCache;
use crate::model::ModelParams;
use crate::par::map_indexed;
use crate::spectra::{operators_ground_energy, scan_ground, GroundStateRecord, MmaxPolicy, SectorState};

/// Cap doublings allowed when a scan stops before `E0(M)` turns upward.
pub const MAX_CAP_DOUBLINGS: usize = 4;

pub const DEFAULT_DELTA: f64 = 1e-3;

/// Label-bisection stops once the bracket is this narrow.
pub const TRANSITION_WIDTH: f64 = 1e-8;

/// χ peaks must exceed this multiple of the median χ of the trace.
pub const CHI_PEAK_FACTOR: f64 = 10.0;

/// `|⟨a|b⟩|²`; zero for states in different sectors.
pub fn fidelity(a: &SectorState, b: &SectorState) -> Result<f64> {
    a.check_normalized()?;
    b.check_normalized()?;
    if a.excitations != b.excitations {
        return Ok(0.0);
    }
    if a.amplitudes.len() != b.amplitudes.len() {
        return Err(Error::Consistency(format!(
            "states of sector M={} have lengths {} and {}",
            a.excitations,
            a.amplitudes.len(),
            b.amplitudes.len()
        )));
    }
    let overlap = a.amplitudes.dot(&b.amplitudes);
    Ok((overlap * overlap).clamp(0.0, 1.0))
}

/// `χ = 2(1 − F)/δλ²`.
pub fn susceptibility(fidelity: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {delta}")));
    }
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidParameter(format!("fidelity {fidelity} outside [0, 1]")));
    }
    Ok(2.0 * (1.0 - fidelity) / (delta * delta))
}

/// Straight line `λ ↦ origin + λ·direction` in the `(μ12, μ23)` plane.
#[derive(Debug, Clone, PartialEq)]
pub struct LinePath {
    pub origin: (f64, f64),
    pub direction: (f64, f64),
    pub description: String,
}

impl LinePath {
    /// `μ12 = μ23 + offset`, parameterized by `λ = μ23`.
    pub fn offset_diagonal(offset: f64) -> Self {
        Self {
            origin: (offset, 0.0),
            direction: (1.0, 1.0),
            description: format!("mu12 = mu23 {} {}", if offset < 0.0 { '-' } else { '+' }, offset.abs()),
        }
    }

    /// `λ = μ12` at fixed `μ23`.
    pub fn along_mu12(mu23: f64) -> Self {
        Self {
            origin: (0.0, mu23),
            direction: (1.0, 0.0),
            description: format!("mu23 = {mu23}"),
        }
    }

    /// `λ = μ23` at fixed `μ12`.
    pub fn along_mu23(mu12: f64) -> Self {
        Self {
            origin: (mu12, 0.0),
            direction: (0.0, 1.0),
            description: format!("mu12 = {mu12}"),
        }
    }

    pub fn at(&self, lambda: f64) -> (f64, f64) {
        (
            self.origin.0 + lambda * self.direction.0,
            self.origin.1 + lambda * self.direction.1,
        )
    }
}

/// Ground-state evaluation at arbitrary couplings with fixed frequencies
/// and atom count.
#[derive(Debug)]
pub struct GroundLabeler {
    base: ModelParams,
    policy: MmaxPolicy,
    cache: SectorCache,
}

impl GroundLabeler {
    pub fn new(base: &ModelParams, policy: MmaxPolicy) -> Self {
        let capacity = (policy.hard_cap.max(1) << MAX_CAP_DOUBLINGS) + 1;
        Self {
            base: *base,
            policy,
            cache: SectorCache::new(base, capacity),
        }
    }

    pub fn ground(&self, mu12: f64, mu23: f64) -> Result<GroundStateRecord> {
        let params = self.base.with_couplings(mu12, mu23)?;
        scan_ground(&self.cache, &params, self.policy, MAX_CAP_DOUBLINGS)
    }

    pub fn label(&self, mu12: f64, mu23: f64) -> Result<usize> {
        self.ground(mu12, mu23).map(|g| g.winning_m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSample {
    pub lambda: f64,
    pub mu12: f64,
    pub mu23: f64,
    pub winning_m: usize,
    pub energy: f64,
    /// Fidelity to the next sample; `None` on the last one.
    pub fidelity: Option<f64>,
    pub chi: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepTrace {
    pub base: ModelParams,
    pub policy: MmaxPolicy,
    pub path: LinePath,
    pub delta: f64,
    pub samples: Vec<SweepSample>,
}

/// Samples `λ = lo, lo + δλ, …` up to `hi` (inclusive within rounding).
pub fn sweep_line(
    base: &ModelParams,
    path: &LinePath,
    lo: f64,
    hi: f64,
    delta: f64,
    policy: MmaxPolicy,
) -> Result<SweepTrace> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {delta}")));
    }
    if !(lo.is_finite() && hi.is_finite() && hi >= lo) {
        return Err(Error::InvalidParameter(format!("invalid sweep range [{lo}, {hi}]")));
    }
    let steps = ((hi - lo) / delta + 1e-9).floor() as usize;
    let labeler = GroundLabeler::new(base, policy);
    let grounds = map_indexed(steps + 1, |i| {
        let lambda = lo + i as f64 * delta;
        let (mu12, mu23) = path.at(lambda);
        labeler
            .ground(mu12, mu23)
            .map(|g| (lambda, mu12, mu23, g))
            .map_err(|e| Error::Sweep {
                index: i,
                lambda,
                source: Box::new(e),
            })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut samples = Vec::with_capacity(grounds.len());
    for (i, (lambda, mu12, mu23, g)) in grounds.iter().enumerate() {
        let (f, chi) = match grounds.get(i + 1) {
            Some((_, _, _, next)) => {
                let f = fidelity(&g.state, &next.state)?;
                (Some(f), Some(susceptibility(f, delta)?))
            }
            None => (None, None),
        };
        samples.push(SweepSample {
            lambda: *lambda,
            mu12: *mu12,
            mu23: *mu23,
            winning_m: g.winning_m,
            energy: g.energy,
            fidelity: f,
            chi,
        });
    }
    Ok(SweepTrace {
        base: *base,
        policy,
        path: path.clone(),
        delta,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    /// Refined crossing location, bracket width ≤ [`TRANSITION_WIDTH`].
    pub lambda: f64,
    pub from_m: usize,
    pub to_m: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TransitionReport {
    pub transitions: Vec<Transition>,
    /// `λ` of χ maxima that are not sector changes.
    pub chi_peaks: Vec<f64>,
    pub chi_threshold: f64,
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Locates every winning-sector change of the trace by bisection on the
/// sector label, and lists χ peaks inside fixed-sector stretches.
///
/// The χ threshold defaults to `CHI_PEAK_FACTOR` times the median χ.
pub fn detect_transitions(trace: &SweepTrace, chi_threshold: Option<f64>) -> Result<TransitionReport> {
    let samples = &trace.samples;
    let labeler = GroundLabeler::new(&trace.base, trace.policy);
    let mut transitions = Vec::new();
    for w in samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.winning_m == b.winning_m {
            continue;
        }
        let (mut lo, mut hi) = (a.lambda, b.lambda);
        let mut hi_label = b.winning_m;
        while hi - lo > TRANSITION_WIDTH {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let (mu12, mu23) = trace.path.at(mid);
            let label = labeler.label(mu12, mu23)?;
            if label == a.winning_m {
                lo = mid;
            } else {
                hi = mid;
                hi_label = label;
            }
        }
        transitions.push(Transition {
            lambda: 0.5 * (lo + hi),
            from_m: a.winning_m,
            to_m: hi_label,
        });
    }

    let mut chis: Vec<f64> = samples.iter().filter_map(|s| s.chi).collect();
    let threshold = chi_threshold.unwrap_or_else(|| CHI_PEAK_FACTOR * median(&mut chis));
    let chi = |i: usize| samples[i].chi.unwrap_or(0.0);
    let mut chi_peaks = Vec::new();
    for i in 1..samples.len().saturating_sub(1) {
        if samples[i].chi.is_none() || samples[i].winning_m != samples[i + 1].winning_m {
            continue;
        }
        let c = chi(i);
        if c > threshold && c > chi(i - 1) && c >= chi(i + 1) {
            chi_peaks.push(samples[i].lambda);
        }
    }
    Ok(TransitionReport {
        transitions,
        chi_peaks,
        chi_threshold: threshold,
    })
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi >= lo) || count == 0 || (count == 1 && hi != lo) {
            return Err(Error::InvalidParameter(format!(
                "invalid grid axis {lo}:{hi}:{count}"
            )));
        }
        Ok(Self { lo, hi, count })
    }

    pub fn value(&self, i: usize) -> f64 {
        if self.count == 1 {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn step(&self) -> f64 {
        if self.count == 1 {
            0.0
        } else {
            (self.hi - self.lo) / (self.count - 1) as f64
        }
    }
}

/// Midpoint of a grid edge whose end nodes carry different labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub mu12: f64,
    pub mu23: f64,
    pub labels: (usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriplePoint {
    pub mu12: f64,
    pub mu23: f64,
    /// Sectors whose ground energies meet the global minimum, ascending.
    pub labels: Vec<usize>,
    /// Largest remaining gap between the meeting sector energies.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct PhaseDiagram {
    pub base: ModelParams,
    pub policy: MmaxPolicy,
    pub mu12_axis: GridAxis,
    pub mu23_axis: GridAxis,
    /// Winning sector per node, `labels[i12 * n23 + i23]`.
    pub labels: Vec<usize>,
    pub boundaries: Vec<BoundaryPoint>,
    pub triple_points: Vec<TriplePoint>,
}

impl PhaseDiagram {
    pub fn label(&self, i12: usize, i23: usize) -> usize {
        self.labels[i12 * self.mu23_axis.count + i23]
    }

    /// `(μ12, μ23, M)` for every node, `μ12` outer.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64, usize)> + '_ {
        let n23 = self.mu23_axis.count;
        self.labels.iter().enumerate().map(move |(k, &m)| {
            (self.mu12_axis.value(k / n23), self.mu23_axis.value(k % n23), m)
        })
    }
}

/// Labels every grid node with its ground sector, extracts boundary
/// midpoints and refines triple points.
pub fn phase_diagram(
    base: &ModelParams,
    mu12_axis: GridAxis,
    mu23_axis: GridAxis,
    policy: MmaxPolicy,
) -> Result<PhaseDiagram> {
    if mu12_axis.lo < 0.0 || mu23_axis.lo < 0.0 {
        return Err(Error::InvalidParameter("couplings must be non-negative".into()));
    }
    let labeler = GroundLabeler::new(base, policy);
    let n12 = mu12_axis.count;
    let n23 = mu23_axis.count;
    let labels = map_indexed(n12 * n23, |k| {
        let (mu12, mu23) = (mu12_axis.value(k / n23), mu23_axis.value(k % n23));
        labeler.label(mu12, mu23).map_err(|e| Error::GridNode {
            mu12,
            mu23,
            source: Box::new(e),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let at = |i: usize, j: usize| labels[i * n23 + j];
    let mut boundaries = Vec::new();
    for i in 0..n12 {
        for j in 0..n23 {
            if i + 1 < n12 && at(i, j) != at(i + 1, j) {
                boundaries.push(BoundaryPoint {
                    mu12: 0.5 * (mu12_axis.value(i) + mu12_axis.value(i + 1)),
                    mu23: mu23_axis.value(j),
                    labels: (at(i, j), at(i + 1, j)),
                });
            }
            if j + 1 < n23 && at(i, j) != at(i, j + 1) {
                boundaries.push(BoundaryPoint {
                    mu12: mu12_axis.value(i),
                    mu23: 0.5 * (mu23_axis.value(j) + mu23_axis.value(j + 1)),
                    labels: (at(i, j), at(i, j + 1)),
                });
            }
        }
    }

    let mut diagram = PhaseDiagram {
        base: *base,
        policy,
        mu12_axis,
        mu23_axis,
        labels,
        boundaries,
        triple_points: Vec::new(),
    };
    diagram.triple_points = refine_triple_points(&diagram, &labeler)?;
    Ok(diagram)
}

/// Re-derives the triple points of a labeled diagram.
pub fn find_triple_points(diagram: &PhaseDiagram) -> Result<Vec<TriplePoint>> {
    refine_triple_points(diagram, &GroundLabeler::new(&diagram.base, diagram.policy))
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cell {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
}

impl Cell {
    fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x0 + self.w && y >= self.y0 && y <= self.y0 + self.h
    }

    fn centre(&self) -> (f64, f64) {
        (self.x0 + 0.5 * self.w, self.y0 + 0.5 * self.h)
    }
}

fn distinct(labels: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    labels.into_iter().collect()
}

const NEWTON_ITERATIONS: usize = 60;
const FD_STEP: f64 = 1e-6;

impl GroundLabeler {
    /// Lowest eigenvalue of sector `m` alone.
    pub fn sector_energy(&self, m: usize, mu12: f64, mu23: f64) -> Result<f64> {
        Ok(operators_ground_energy(&*self.cache.operators(m)?, mu12, mu23))
    }

    /// `(E_a − E_b, E_b − E_c)` for three sectors.
    fn gaps(&self, [a, b, c]: [usize; 3], x: f64, y: f64) -> Result<[f64; 2]> {
        let (ea, eb, ec) = (self.sector_energy(a, x, y)?, self.sector_energy(b, x, y)?, self.sector_energy(c, x, y)?);
        Ok([ea - eb, eb - ec])
    }
}

/// Damped Newton iteration for the point where sectors `a < b < c` have
/// equal ground energies. Fails when the iteration leaves `bounds` or the
/// Jacobian is singular, which is what happens for parallel phase bands.
fn solve_meeting_point(
    labeler: &GroundLabeler,
    triple: [usize; 3],
    start: (f64, f64),
    bounds: Cell,
) -> Result<Option<(f64, f64, f64)>> {
    let norm = |f: [f64; 2]| f[0].abs().max(f[1].abs());
    let (mut x, mut y) = start;
    let mut f = labeler.gaps(triple, x, y)?;
    for _ in 0..NEWTON_ITERATIONS {
        let scale = 1.0 + x.abs().max(y.abs());
        if norm(f) <= 1e-13 * scale {
            break;
        }
        let hx = FD_STEP * x.abs().max(1.0);
        let hy = FD_STEP * y.abs().max(1.0);
        // one-sided differences keep the couplings non-negative
        let (xs, ys) = (if x >= hx { -hx } else { hx }, if y >= hy { -hy } else { hy });
        let fx = labeler.gaps(triple, x + xs, y)?;
        let fy = labeler.gaps(triple, x, y + ys)?;
        let j = [
            [(fx[0] - f[0]) / xs, (fy[0] - f[0]) / ys],
            [(fx[1] - f[1]) / xs, (fy[1] - f[1]) / ys],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let jnorm = j.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
        if det.is_nan() || det.abs() <= 1e-10 * jnorm * jnorm {
            return Ok(None);
        }
        let dx = -(j[1][1] * f[0] - j[0][1] * f[1]) / det;
        let dy = -(-j[1][0] * f[0] + j[0][0] * f[1]) / det;
        let mut t = 1.0;
        loop {
            let (nx, ny) = (x + t * dx, y + t * dy);
            if nx >= 0.0 && ny >= 0.0 {
                let nf = labeler.gaps(triple, nx, ny)?;
                if norm(nf) < norm(f) {
                    (x, y, f) = (nx, ny, nf);
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-6 {
                return Ok(None);
            }
        }
        if !bounds.contains(x, y) {
            return Ok(None);
        }
        if (t * dx).abs().max((t * dy).abs()) <= 4.0 * f64::EPSILON * scale {
            break;
        }
    }
    let scale = 1.0 + x.abs().max(y.abs());
    if norm(f) > 1e-9 * scale {
        return Ok(None);
    }
    Ok(Some((x, y, norm(f))))
}

/// Energies closer than this to the global minimum count as meeting there.
const MEETING_TOLERANCE: f64 = 1e-9;

/// Candidates are windows of 3×3 grid nodes showing at least three labels.
/// For every triple of those labels the point of equal sector energies is
/// solved for, starting from the window centre. The solution may lie well
/// outside the window (a narrow phase wedge only shows up on the grid some
/// distance from its tip); it is kept when it lies inside the grid and the
/// three sectors are the global minimum there.
fn refine_triple_points(diagram: &PhaseDiagram, labeler: &GroundLabeler) -> Result<Vec<TriplePoint>> {
    let (ax, ay) = (diagram.mu12_axis, diagram.mu23_axis);
    let mut found: Vec<TriplePoint> = Vec::new();
    if ax.count < 2 || ay.count < 2 {
        return Ok(found);
    }
    let span = if ax.count >= 3 && ay.count >= 3 { 2 } else { 1 };
    let domain = Cell {
        x0: ax.lo,
        y0: ay.lo,
        w: ax.hi - ax.lo,
        h: ay.hi - ay.lo,
    };
    for i in 0..=(ax.count - 1 - span) {
        for j in 0..=(ay.count - 1 - span) {
            let set: Vec<usize> =
                distinct((i..=i + span).flat_map(|a| (j..=j + span).map(move |b| diagram.label(a, b))))
                    .into_iter()
                    .collect();
            if set.len() < 3 {
                continue;
            }
            let inner = Cell {
                x0: ax.value(i),
                y0: ay.value(j),
                w: ax.value(i + span) - ax.value(i),
                h: ay.value(j + span) - ay.value(j),
            };
            for a in 0..set.len() {
                for b in a + 1..set.len() {
                    for c in b + 1..set.len() {
                        let triple = [set[a], set[b], set[c]];
                        let Some((x, y, residual)) = solve_meeting_point(labeler, triple, inner.centre(), domain)?
                        else {
                            continue;
                        };
                        let global = labeler.ground(x, y)?;
                        let tol = MEETING_TOLERANCE * (1.0 + global.energy.abs());
                        let e_triple = labeler.sector_energy(triple[0], x, y)?;
                        if e_triple - global.energy > tol {
                            continue;
                        }
                        // the scan may stop short of the triple's sectors
                        let labels: Vec<usize> = global
                            .per_sector_minima
                            .iter()
                            .filter(|(_, e)| e - global.energy <= tol)
                            .map(|&(m, _)| m)
                            .chain(triple)
                            .collect::<BTreeSet<_>>()
                            .into_iter()
                            .collect();
                        let duplicate = found.iter().any(|t| {
                            (t.mu12 - x).abs() <= 1e-7 * (1.0 + x) && (t.mu23 - y).abs() <= 1e-7 * (1.0 + y)
                        });
                        if !duplicate {
                            found.push(TriplePoint {
                                mu12: x,
                                mu23: y,
                                labels,
                                residual,
                            });
                        }
                    }
                }
            }
        }
    }
    found.sort_by(|p, q| p.mu12.total_cmp(&q.mu12).then(p.mu23.total_cmp(&q.mu23)));
    Ok(found)
}

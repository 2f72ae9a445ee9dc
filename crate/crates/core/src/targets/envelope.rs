//! Upper concave envelopes of sampled functions on one- and two-dimensional
//! domains.
//!
//! In two dimensions the envelope at `q` is the linear program
//! `max Σ λ_j f_j` subject to `Σ λ_j p_j = q`, `Σ λ_j = 1`, `λ ≥ 0`. It has
//! three rows, so every basis is a triangle of sample points and the dual is
//! the plane through their lifted values. Optimal triangles are facets of the
//! envelope and are cached: any later query inside one is answered directly.

use std::sync::Mutex;

use crate::error::{Error, Result};

const REDUCED_COST_TOL: f64 = 1e-12;
const BARYCENTRIC_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 100_000;
const DANTZIG_PIVOTS: usize = 200;

/// Upper envelope of the points `(xs[i], ys[i])`, evaluated at every `xs[i]`.
pub fn upper_envelope_1d(xs: &[f64], ys: &[f64]) -> Result<Vec<f64>> {
    let hull = UpperHull1d::new(xs, ys)?;
    Ok(xs.iter().map(|&x| hull.eval(x)).collect())
}

/// The upper hull chain of a sampled function of one variable.
#[derive(Debug, Clone)]
pub struct UpperHull1d {
    chain: Vec<(f64, f64)>,
}

impl UpperHull1d {
    pub fn new(xs: &[f64], ys: &[f64]) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::DimensionMismatch {
                what: "envelope samples",
                expected: xs.len(),
                found: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::InvalidInput("envelope needs at least two sample points".into()));
        }
        let mut pts: Vec<(f64, f64)> = xs.iter().cloned().zip(ys.iter().cloned()).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
        pts.dedup_by(|b, a| a.0 == b.0);
        let mut chain: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for p in pts {
            while chain.len() >= 2 {
                let (o, a) = (chain[chain.len() - 2], chain[chain.len() - 1]);
                // Drop `a` unless it lies strictly above the segment o → p.
                let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
                if cross >= 0.0 {
                    chain.pop();
                } else {
                    break;
                }
            }
            chain.push(p);
        }
        Ok(UpperHull1d { chain })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.chain[0].0, self.chain[self.chain.len() - 1].0)
    }

    /// Envelope value at `x`; `-∞` outside the sampled range.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return f64::NEG_INFINITY;
        }
        let k = self.chain.partition_point(|p| p.0 < x);
        if k < self.chain.len() && self.chain[k].0 == x {
            return self.chain[k].1;
        }
        let (a, b) = (self.chain[k - 1], self.chain[k]);
        a.1 + (b.1 - a.1) * (x - a.0) / (b.0 - a.0)
    }
}

#[derive(Debug, Clone, Copy)]
struct Facet {
    tri: [usize; 3],
    /// `f ≈ a·u + b·v + c` on the facet.
    plane: [f64; 3],
}

/// Upper envelope of a sampled function of two variables.
#[derive(Debug)]
pub struct UpperHull2d {
    points: Vec<[f64; 2]>,
    values: Vec<f64>,
    corners: [usize; 4],
    cache: Mutex<Vec<Facet>>,
}

fn barycentric(p: &[[f64; 2]], tri: [usize; 3], q: [f64; 2]) -> Option<[f64; 3]> {
    let [a, b, c] = tri.map(|i| p[i]);
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    if det.abs() < 1e-300 {
        return None;
    }
    let l1 = ((q[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (q[1] - a[1])) / det;
    let l2 = ((b[0] - a[0]) * (q[1] - a[1]) - (q[0] - a[0]) * (b[1] - a[1])) / det;
    Some([1.0 - l1 - l2, l1, l2])
}

impl UpperHull2d {
    /// The sample points must include the corners of their bounding box.
    pub fn new(points: Vec<[f64; 2]>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch {
                what: "envelope samples",
                expected: points.len(),
                found: values.len(),
            });
        }
        if points.len() < 3 {
            return Err(Error::InvalidInput("envelope needs at least three sample points".into()));
        }
        let pick = |key: &dyn Fn(&[f64; 2]) -> f64| {
            (0..points.len())
                .max_by(|&i, &j| key(&points[i]).total_cmp(&key(&points[j])).then(j.cmp(&i)))
                .expect("non-empty")
        };
        // Corners in counter-clockwise order: SW, SE, NE, NW.
        let corners = [
            pick(&|p| -p[0] - p[1]),
            pick(&|p| p[0] - p[1]),
            pick(&|p| p[0] + p[1]),
            pick(&|p| -p[0] + p[1]),
        ];
        let (lo_u, hi_u) = (points[corners[0]][0], points[corners[2]][0]);
        let (lo_v, hi_v) = (points[corners[0]][1], points[corners[2]][1]);
        let box_ok = points[corners[1]] == [hi_u, lo_v] && points[corners[3]] == [lo_u, hi_v];
        if !box_ok || lo_u >= hi_u || lo_v >= hi_v {
            return Err(Error::InvalidInput(
                "two-dimensional envelope needs samples on a rectangle including its corners".into(),
            ));
        }
        Ok(UpperHull2d {
            points,
            values,
            corners,
            cache: Mutex::new(Vec::new()),
        })
    }

    fn plane(&self, tri: [usize; 3]) -> [f64; 3] {
        let [a, b, c] = tri.map(|i| self.points[i]);
        let [fa, fb, fc] = tri.map(|i| self.values[i]);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let pa = ((fb - fa) * (c[1] - a[1]) - (fc - fa) * (b[1] - a[1])) / det;
        let pb = ((b[0] - a[0]) * (fc - fa) - (c[0] - a[0]) * (fb - fa)) / det;
        [pa, pb, fa - pa * a[0] - pb * a[1]]
    }

    fn cached(&self, q: [f64; 2]) -> Option<f64> {
        let cache = self.cache.lock().expect("cache lock");
        cache.iter().rev().find_map(|f| {
            let l = barycentric(&self.points, f.tri, q)?;
            l.iter()
                .all(|x| *x >= -BARYCENTRIC_TOL)
                .then(|| f.plane[0] * q[0] + f.plane[1] * q[1] + f.plane[2])
        })
    }

    /// Envelope value at `q`, which must lie in the sampled rectangle.
    pub fn eval(&self, q: [f64; 2]) -> Result<f64> {
        if let Some(v) = self.cached(q) {
            return Ok(v);
        }
        let c = self.corners;
        let mut tri = [c[0], c[1], c[2]];
        let mut lambda = barycentric(&self.points, tri, q).expect("non-degenerate corners");
        if lambda.iter().any(|x| *x < -BARYCENTRIC_TOL) {
            tri = [c[0], c[2], c[3]];
            lambda = barycentric(&self.points, tri, q).expect("non-degenerate corners");
            if lambda.iter().any(|x| *x < -BARYCENTRIC_TOL) {
                return Err(Error::InvalidInput(format!("query {q:?} lies outside the sampled rectangle")));
            }
        }
        for pivot in 0..MAX_PIVOTS {
            let plane = self.plane(tri);
            let scale = 1.0 + self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            let reduced =
                |j: usize| self.values[j] - (plane[0] * self.points[j][0] + plane[1] * self.points[j][1] + plane[2]);
            let entering = if pivot < DANTZIG_PIVOTS {
                (0..self.points.len())
                    .map(|j| (j, reduced(j)))
                    .filter(|(_, r)| *r > REDUCED_COST_TOL * scale)
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .map(|(j, _)| j)
            } else {
                (0..self.points.len()).find(|&j| reduced(j) > REDUCED_COST_TOL * scale)
            };
            let Some(e) = entering else {
                self.cache.lock().expect("cache lock").push(Facet { tri, plane });
                return Ok(plane[0] * q[0] + plane[1] * q[1] + plane[2]);
            };
            let alpha = barycentric(&self.points, tri, self.points[e]).expect("basis is a triangle");
            let mut leave = None;
            let mut best = f64::INFINITY;
            for i in 0..3 {
                if alpha[i] > BARYCENTRIC_TOL {
                    let ratio = lambda[i].max(0.0) / alpha[i];
                    let better = ratio < best - 1e-15
                        || (ratio <= best + 1e-15 && leave.is_some_and(|l: usize| tri[i] < tri[l]));
                    if better {
                        best = ratio;
                        leave = Some(i);
                    }
                }
            }
            let leave = leave.ok_or_else(|| Error::Lp("envelope program is unbounded".into()))?;
            tri[leave] = e;
            lambda = barycentric(&self.points, tri, q).ok_or_else(|| Error::Lp("degenerate basis".into()))?;
        }
        Err(Error::Lp("envelope simplex did not terminate".into()))
    }

    /// Envelope at every sample point.
    pub fn eval_samples(&self) -> Result<Vec<f64>> {
        self.points.iter().map(|&p| self.eval(p)).collect()
    }
}

/// Upper envelope of `(points[i], values[i])` evaluated at every sample point.
pub fn upper_envelope_2d(points: &[[f64; 2]], values: &[f64]) -> Result<Vec<f64>> {
    UpperHull2d::new(points.to_vec(), values.to_vec())?.eval_samples()
}

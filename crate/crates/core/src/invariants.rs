//! Period lattices, the hyperelliptic involution, and the invariants
//! `(d, M, ε)` of genus-two square-tiled surfaces.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice2;
use crate::origami::{Origami, StratumSignature};
use crate::perm::Permutation;

const BL: usize = 0;
const BR: usize = 1;
const TL: usize = 2;
const TR: usize = 3;

/// Developing map of the flat structure along a BFS spanning tree rooted at
/// `root`: the position of each square's bottom-left corner.
pub fn potentials(o: &Origami, root: usize) -> Vec<(i64, i64)> {
    let n = o.n();
    let (h, v) = (o.h(), o.v());
    let (hi, vi) = (h.inverse(), v.inverse());
    let mut phi = vec![None; n];
    phi[root] = Some((0, 0));
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        let (px, py) = phi[x].expect("visited");
        let steps = [
            (h.apply(x), (px + 1, py)),
            (v.apply(x), (px, py + 1)),
            (hi.apply(x), (px - 1, py)),
            (vi.apply(x), (px, py - 1)),
        ];
        for (y, p) in steps {
            if phi[y].is_none() {
                phi[y] = Some(p);
                queue.push_back(y);
            }
        }
    }
    phi.into_iter().map(|p| p.expect("transitive")).collect()
}

/// Image of the absolute homology in Z², computed from a spanning tree rooted
/// at `root`. The result does not depend on `root`.
pub fn absolute_period_lattice_from(o: &Origami, root: usize) -> Lattice2 {
    let phi = potentials(o, root);
    let gens = (0..o.n()).flat_map(|i| {
        let (x, y) = phi[i];
        let (hx, hy) = phi[o.h().apply(i)];
        let (vx, vy) = phi[o.v().apply(i)];
        [(x + 1 - hx, y - hy), (x - vx, y + 1 - vy)]
    });
    Lattice2::from_generators(gens).expect("closed surfaces have full-rank periods")
}

pub fn absolute_period_lattice(o: &Origami) -> Lattice2 {
    absolute_period_lattice_from(o, 0)
}

/// Vertices of the square tiling, as classes of the `4n` square corners.
#[derive(Clone, Debug)]
pub struct Vertices {
    /// `class[4 * i + corner]` is the vertex at that corner of square `i`.
    class: Vec<usize>,
    /// Smallest square whose bottom-left corner is the vertex.
    pub representative: Vec<usize>,
    /// Cone angle divided by 2π.
    pub angle: Vec<usize>,
}

impl Vertices {
    pub fn of(o: &Origami) -> Self {
        let n = o.n();
        let mut parent: Vec<usize> = (0..4 * n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut union = |a: usize, b: usize| {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        };
        for i in 0..n {
            let hi = o.h().apply(i);
            let vi = o.v().apply(i);
            union(4 * i + BR, 4 * hi + BL);
            union(4 * i + TR, 4 * hi + TL);
            union(4 * i + TL, 4 * vi + BL);
            union(4 * i + TR, 4 * vi + BR);
        }
        let mut root_to_class = vec![usize::MAX; 4 * n];
        let mut class = vec![0; 4 * n];
        let mut representative = Vec::new();
        let mut angle = Vec::new();
        // Visiting bottom-left corners first in square order makes the
        // representative of each class its smallest incident square.
        for i in 0..n {
            let r = find(&mut parent, 4 * i + BL);
            if root_to_class[r] == usize::MAX {
                root_to_class[r] = representative.len();
                representative.push(i);
                angle.push(0);
            }
        }
        for (k, c) in class.iter_mut().enumerate() {
            let id = root_to_class[find(&mut parent, k)];
            *c = id;
            angle[id] += 1;
        }
        for a in &mut angle {
            *a /= 4;
        }
        Self {
            class,
            representative,
            angle,
        }
    }

    pub fn len(&self) -> usize {
        self.representative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representative.is_empty()
    }

    pub fn at(&self, square: usize, corner: usize) -> usize {
        self.class[4 * square + corner]
    }

    /// Vertices with cone angle above 2π, in representative order.
    pub fn zeros(&self) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.angle[k] > 1).collect()
    }
}

/// Positions of the zeros in the developing map rooted at square 0.
pub fn zero_positions(o: &Origami) -> Vec<(i64, i64)> {
    let phi = potentials(o, 0);
    let vertices = Vertices::of(o);
    vertices
        .zeros()
        .into_iter()
        .map(|z| phi[vertices.representative[z]])
        .collect()
}

/// Relative periods: absolute periods plus displacements between zeros.
pub fn relative_period_lattice(o: &Origami) -> Lattice2 {
    let abs = absolute_period_lattice(o);
    let zeros = zero_positions(o);
    let (x0, y0) = zeros.first().copied().unwrap_or((0, 0));
    abs.extend(zeros.iter().skip(1).map(|&(x, y)| (x - x0, y - y0)))
}

pub fn is_reduced(o: &Origami) -> bool {
    relative_period_lattice(o).is_full()
}

fn require_genus_two(o: &Origami) -> Result<StratumSignature> {
    let s = o.stratum();
    if s.genus != 2 {
        return Err(Error::NotGenusTwo(s.genus));
    }
    Ok(s)
}

/// `(d, M)` for a reduced genus-two surface. In H(1,1) this also checks that
/// `Z²/Λ_abs` is cyclic of order `M`, generated by the vector between the zeros.
pub fn torsion_order_and_degree(o: &Origami) -> Result<(u64, u64)> {
    let s = require_genus_two(o)?;
    if !is_reduced(o) {
        return Err(Error::NotReduced);
    }
    let abs = absolute_period_lattice(o);
    let m = abs.index();
    if s.zero_orders.len() == 2 {
        let z = zero_positions(o);
        let w = (z[1].0 - z[0].0, z[1].1 - z[0].1);
        let order = abs.order_of(w);
        if order != m || !abs.quotient_is_cyclic() {
            return Err(Error::CyclicQuotient { order, index: m });
        }
    }
    Ok((o.n() as u64 / m, m))
}

/// The hyperelliptic involution as a map on squares: `σ` carries square `i`
/// onto square `sigma(i)` rotated by π.
///
/// Surfaces that are double covers of a torus carry a translation
/// automorphism `τ`, and then `στ` is a second π-rotation. It has two fixed
/// points rather than six, which singles out `σ`.
pub fn hyperelliptic_involution(o: &Origami) -> Result<Permutation> {
    require_genus_two(o)?;
    let n = o.n();
    let (h, v) = (o.h(), o.v());
    let seeds = [0, h.apply(0), v.apply(0), h.apply(v.apply(0)), v.apply(h.apply(0))];
    let mut fallback = None;
    for j in seeds.into_iter().chain(0..n) {
        if let Some(sigma) = propagate_involution(o, j) {
            let count = fixed_points(o, &sigma).len();
            if count == 6 {
                return Ok(sigma);
            }
            fallback.get_or_insert(count);
        }
    }
    Err(fallback.map_or(Error::NoInvolution, Error::WeierstrassCount))
}

/// Translation automorphisms: relabellings commuting with both `h` and `v`,
/// identity included.
pub fn translation_automorphisms(o: &Origami) -> Vec<Permutation> {
    let n = o.n();
    let (h, v) = (o.h(), o.v());
    (0..n)
        .filter_map(|image| {
            let mut tau = vec![usize::MAX; n];
            tau[0] = image;
            let mut stack = vec![0];
            while let Some(x) = stack.pop() {
                for (y, t) in [(h.apply(x), h.apply(tau[x])), (v.apply(x), v.apply(tau[x]))] {
                    if tau[y] == usize::MAX {
                        tau[y] = t;
                        stack.push(y);
                    } else if tau[y] != t {
                        return None;
                    }
                }
            }
            Permutation::from_images(tau).ok()
        })
        .collect()
}

/// Extends `σ(0) = image` along `σ h = h⁻¹ σ` and `σ v = v⁻¹ σ`, returning the
/// result if it is a consistent involution.
pub fn propagate_involution(o: &Origami, image: usize) -> Option<Permutation> {
    let n = o.n();
    let (h, v) = (o.h(), o.v());
    let (hi, vi) = (h.inverse(), v.inverse());
    let mut sigma = vec![usize::MAX; n];
    sigma[0] = image;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        let s = sigma[x];
        let forced = [
            (h.apply(x), hi.apply(s)),
            (v.apply(x), vi.apply(s)),
            (hi.apply(x), h.apply(s)),
            (vi.apply(x), v.apply(s)),
        ];
        for (y, t) in forced {
            if sigma[y] == usize::MAX {
                sigma[y] = t;
                queue.push_back(y);
            } else if sigma[y] != t {
                return None;
            }
        }
    }
    let p = Permutation::from_images(sigma).ok()?;
    p.compose(&p).is_identity().then_some(p)
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Vertex,
    EdgeMidpoint,
    Center,
}

/// A flat point given by a square and doubled offsets in `{0, 1, 2}²` from its
/// bottom-left corner.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlatPoint {
    pub kind: PointKind,
    pub square: usize,
    pub offset2: (u8, u8),
}

pub fn weierstrass_points(o: &Origami) -> Result<Vec<FlatPoint>> {
    let sigma = hyperelliptic_involution(o)?;
    Ok(fixed_points(o, &sigma))
}

/// Fixed points of a square-level π-rotation `sigma`.
pub fn fixed_points(o: &Origami, sigma: &Permutation) -> Vec<FlatPoint> {
    let n = o.n();
    let mut out = Vec::new();
    for i in 0..n {
        let s = sigma.apply(i);
        if s == i {
            out.push(FlatPoint {
                kind: PointKind::Center,
                square: i,
                offset2: (1, 1),
            });
        }
        if s == o.h().apply(i) {
            out.push(FlatPoint {
                kind: PointKind::EdgeMidpoint,
                square: i,
                offset2: (2, 1),
            });
        }
        if s == o.v().apply(i) {
            out.push(FlatPoint {
                kind: PointKind::EdgeMidpoint,
                square: i,
                offset2: (1, 2),
            });
        }
    }
    let vertices = Vertices::of(o);
    for (k, &rep) in vertices.representative.iter().enumerate() {
        if vertices.at(sigma.apply(rep), TR) == k {
            out.push(FlatPoint {
                kind: PointKind::Vertex,
                square: rep,
                offset2: (0, 0),
            });
        }
    }
    out
}

/// Number of Weierstrass points at vertices of the tiling.
pub fn spin(o: &Origami) -> Result<u8> {
    let pts = weierstrass_points(o)?;
    Ok(pts.iter().filter(|p| p.kind == PointKind::Vertex).count() as u8)
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct SurfaceInvariants {
    pub stratum: StratumSignature,
    pub reduced: bool,
    pub d: Option<u64>,
    pub m: Option<u64>,
    pub epsilon: Option<u8>,
    pub weierstrass: Vec<FlatPoint>,
}

pub fn classify(o: &Origami) -> Result<SurfaceInvariants> {
    let stratum = require_genus_two(o)?;
    let weierstrass = weierstrass_points(o)?;
    if !is_reduced(o) {
        return Ok(SurfaceInvariants {
            stratum,
            reduced: false,
            d: None,
            m: None,
            epsilon: None,
            weierstrass,
        });
    }
    let (d, m) = torsion_order_and_degree(o)?;
    let epsilon = weierstrass.iter().filter(|p| p.kind == PointKind::Vertex).count() as u8;
    Ok(SurfaceInvariants {
        stratum,
        reduced: true,
        d: Some(d),
        m: Some(m),
        epsilon: Some(epsilon),
        weierstrass,
    })
}

/// The spin values allowed for given `(d, M)`.
pub fn allowed_spins(d: u64, m: u64) -> &'static [u8] {
    match (m.is_multiple_of(2), d % 2 == 1) {
        (true, _) => &[0],
        (false, true) => &[1, 3],
        (false, false) => &[0, 2],
    }
}

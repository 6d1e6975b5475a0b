use std::collections::HashMap;

use super::GeometryError;

/// Largest number of lattice nodes a grid may span.
const MAX_NODES: usize = 1 << 25;
/// Nodes with `ρ` above `-INSIDE_TOL` count as outside the ball.
const INSIDE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// `[-1, 1]^{2n}`.
    Box,
    /// `{ρ < 0}` with `ρ(z) = |z|² − 1`.
    Ball,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DomainSpec {
    pub n: usize,
    pub shape: Shape,
    pub points_per_axis: usize,
}

impl DomainSpec {
    pub fn new(n: usize, shape: Shape, points_per_axis: usize) -> Result<Self, GeometryError> {
        let spec = Self { n, shape, points_per_axis };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        if !(1..=3).contains(&self.n) {
            return Err(GeometryError::Dimension(self.n));
        }
        let min = match self.shape {
            Shape::Box => 5,
            Shape::Ball => 9,
        };
        if self.points_per_axis < min || self.points_per_axis % 2 == 0 {
            return Err(GeometryError::Resolution { got: self.points_per_axis, min });
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 / (self.points_per_axis - 1) as f64
    }
}

/// A lattice direction `e_axis` or `e_axis + sign·e_other`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LineDir {
    pub axis: usize,
    pub other: Option<(usize, i8)>,
}

impl LineDir {
    fn offset(&self, dim: usize) -> Vec<i64> {
        let mut v = vec![0; dim];
        v[self.axis] = 1;
        if let Some((b, s)) = self.other {
            v[b] = s as i64;
        }
        v
    }
}

/// Reference from an interior stencil to a neighbouring value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeRef {
    Interior(u32),
    Boundary(u32),
}

/// Which lines carry which second derivatives.
#[derive(Clone, Debug)]
pub struct HessianLayout {
    /// Line index of each coordinate axis.
    pub axes: Vec<usize>,
    /// For real axes `a < b` in different complex coordinates: the lines
    /// along `e_a + e_b` and `e_a − e_b`.
    pub mixed: HashMap<(usize, usize), (usize, usize)>,
}

impl HessianLayout {
    /// `(plus, minus)` lines for the unordered pair `{a, b}`.
    pub fn mixed_lines(&self, a: usize, b: usize) -> (usize, usize) {
        let key = if a < b { (a, b) } else { (b, a) };
        self.mixed[&key]
    }
}

/// Interior/boundary partition with precomputed stencil neighbours.
///
/// Interior points are stored in lexicographic lattice order; boundary values
/// live in a separate list (box faces, or sphere crossings for the ball).
#[derive(Clone, Debug)]
pub struct Grid {
    spec: DomainSpec,
    spacing: f64,
    interior_coords: Vec<f64>,
    boundary_coords: Vec<f64>,
    lines: Vec<LineDir>,
    layout: HessianLayout,
    /// Per interior point and line: `[backward, forward]`.
    neighbors: Vec<NodeRef>,
    /// Step fractions in the same layout; `None` when every step is a full one.
    fractions: Option<Vec<f64>>,
}

impl Grid {
    pub fn build(spec: DomainSpec) -> Result<Self, GeometryError> {
        spec.validate()?;
        let dim = 2 * spec.n;
        let m = spec.points_per_axis;
        let total = m
            .checked_pow(dim as u32)
            .filter(|&t| t <= MAX_NODES)
            .ok_or(GeometryError::TooLarge(m.saturating_pow(dim as u32)))?;
        let h = spec.spacing();
        let (lines, layout) = line_set(spec.n);

        let multi = |mut idx: usize| -> Vec<usize> {
            let mut out = vec![0; dim];
            for a in (0..dim).rev() {
                out[a] = idx % m;
                idx /= m;
            }
            out
        };
        let coord = |i: usize| -1.0 + i as f64 * h;
        let inside = |mi: &[usize]| -> bool {
            match spec.shape {
                Shape::Box => mi.iter().all(|&i| i > 0 && i < m - 1),
                Shape::Ball => {
                    let r2: f64 = mi.iter().map(|&i| coord(i) * coord(i)).sum();
                    r2 - 1.0 < -INSIDE_TOL
                }
            }
        };

        const NONE: u32 = u32::MAX;
        let mut interior_slot = vec![NONE; total];
        let mut box_boundary_slot = vec![NONE; if spec.shape == Shape::Box { total } else { 0 }];
        let mut interior_lattice = Vec::new();
        let mut interior_coords = Vec::new();
        let mut boundary_coords = Vec::new();
        for idx in 0..total {
            let mi = multi(idx);
            if inside(&mi) {
                interior_slot[idx] = interior_lattice.len() as u32;
                interior_lattice.push(idx);
                interior_coords.extend(mi.iter().map(|&i| coord(i)));
            } else if spec.shape == Shape::Box {
                box_boundary_slot[idx] = (boundary_coords.len() / dim) as u32;
                boundary_coords.extend(mi.iter().map(|&i| coord(i)));
            }
        }
        if interior_lattice.is_empty() {
            return Err(GeometryError::NoInterior);
        }

        let strides: Vec<i64> = (0..dim).map(|a| m.pow((dim - 1 - a) as u32) as i64).collect();
        let offsets: Vec<i64> = lines
            .iter()
            .map(|l| l.offset(dim).iter().zip(&strides).map(|(o, s)| o * s).sum())
            .collect();
        let nl = lines.len();
        let mut neighbors = Vec::with_capacity(interior_lattice.len() * 2 * nl);
        let mut fractions = match spec.shape {
            Shape::Box => None,
            Shape::Ball => Some(Vec::with_capacity(interior_lattice.len() * 2 * nl)),
        };
        let mut sphere_nodes: HashMap<usize, u32> = HashMap::new();
        for (p, &idx) in interior_lattice.iter().enumerate() {
            let xp = &interior_coords[p * dim..(p + 1) * dim];
            for (l, line) in lines.iter().enumerate() {
                let dir = line.offset(dim);
                for sign in [-1i64, 1] {
                    let nb = (idx as i64 + sign * offsets[l]) as usize;
                    if interior_slot[nb] != NONE {
                        neighbors.push(NodeRef::Interior(interior_slot[nb]));
                        if let Some(f) = fractions.as_mut() {
                            f.push(1.0);
                        }
                        continue;
                    }
                    match spec.shape {
                        Shape::Box => neighbors.push(NodeRef::Boundary(box_boundary_slot[nb])),
                        Shape::Ball => {
                            let v: Vec<f64> = dir.iter().map(|&d| (sign * d) as f64).collect();
                            let theta = sphere_crossing(xp, &v, h);
                            let slot = if theta >= 1.0 {
                                *sphere_nodes.entry(nb).or_insert_with(|| {
                                    let s = (boundary_coords.len() / dim) as u32;
                                    boundary_coords.extend(multi(nb).iter().map(|&i| coord(i)));
                                    s
                                })
                            } else {
                                let s = (boundary_coords.len() / dim) as u32;
                                boundary_coords.extend(xp.iter().zip(&v).map(|(x, d)| x + theta * h * d));
                                s
                            };
                            neighbors.push(NodeRef::Boundary(slot));
                            fractions.as_mut().unwrap().push(theta.min(1.0));
                        }
                    }
                }
            }
        }
        Ok(Self {
            spec,
            spacing: h,
            interior_coords,
            boundary_coords,
            lines,
            layout,
            neighbors,
            fractions,
        })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    /// Complex dimension `n`.
    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Real dimension `2n`.
    pub fn real_dim(&self) -> usize {
        2 * self.spec.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn interior_len(&self) -> usize {
        self.interior_coords.len() / self.real_dim()
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary_coords.len() / self.real_dim()
    }

    pub fn interior_point(&self, p: usize) -> &[f64] {
        let d = self.real_dim();
        &self.interior_coords[p * d..(p + 1) * d]
    }

    pub fn boundary_point(&self, b: usize) -> &[f64] {
        let d = self.real_dim();
        &self.boundary_coords[b * d..(b + 1) * d]
    }

    pub fn lines(&self) -> &[LineDir] {
        &self.lines
    }

    pub fn layout(&self) -> &HessianLayout {
        &self.layout
    }

    /// `(backward, forward)` neighbours of interior point `p` along line `l`.
    #[inline]
    pub fn neighbors(&self, p: usize, l: usize) -> (NodeRef, NodeRef) {
        let base = (p * self.lines.len() + l) * 2;
        (self.neighbors[base], self.neighbors[base + 1])
    }

    /// `(backward, forward)` step fractions in units of the lattice step.
    #[inline]
    pub fn fractions(&self, p: usize, l: usize) -> (f64, f64) {
        match &self.fractions {
            None => (1.0, 1.0),
            Some(f) => {
                let base = (p * self.lines.len() + l) * 2;
                (f[base], f[base + 1])
            }
        }
    }

    /// True when every stencil step is a full lattice step.
    pub fn is_uniform(&self) -> bool {
        self.fractions.is_none()
    }
}

/// Positive `s ≤ 1` where `x + s h v` meets the unit sphere, for `|x| < 1`.
fn sphere_crossing(x: &[f64], v: &[f64], h: f64) -> f64 {
    let a = h * h * v.iter().map(|d| d * d).sum::<f64>();
    let b = 2.0 * h * x.iter().zip(v).map(|(xi, d)| xi * d).sum::<f64>();
    let c = x.iter().map(|xi| xi * xi).sum::<f64>() - 1.0;
    let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
    let s = if b >= 0.0 { -2.0 * c / (b + disc) } else { (disc - b) / (2.0 * a) };
    s.clamp(f64::MIN_POSITIVE, 1.0)
}

fn line_set(n: usize) -> (Vec<LineDir>, HessianLayout) {
    let dim = 2 * n;
    let mut lines: Vec<LineDir> = (0..dim).map(|a| LineDir { axis: a, other: None }).collect();
    let axes = (0..dim).collect();
    let mut mixed = HashMap::new();
    for a in 0..dim {
        for b in a + 1..dim {
            if a / 2 == b / 2 {
                // x^j y^j never enters the complex Hessian
                continue;
            }
            let plus = lines.len();
            lines.push(LineDir { axis: a, other: Some((b, 1)) });
            lines.push(LineDir { axis: a, other: Some((b, -1)) });
            mixed.insert((a, b), (plus, plus + 1));
        }
    }
    (lines, HessianLayout { axes, mixed })
}

//! Configuration points with infinitesimal collision structure, over an
//! exact scalar.
//!
//! A point of the compactified configuration space is a finite set of
//! distinct macroscopic locations, each carrying a tree whose vertices hold
//! normalized clouds: the centroid sits at the origin and the largest
//! max-norm is one, which is exactly a slice for the translations and
//! positive dilatations that get quotiented away at each collision screen.
//! The max-norm metric keeps every threshold rational, so clustering and
//! the round trips through `resolve` are bit-reproducible.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::sigma::UnionFind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FmError {
    TooFewPoints,
    CoincidentPoints(String),
    ThetaOutOfRange(String),
    EpsilonTooLarge { bound: String },
    SlotOutOfRange { slot: usize, arity: usize },
    NotAnOperadElement(String),
    Degenerate(String),
    BadDiscs(String),
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for FmError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FmError::TooFewPoints => write!(f, "a cloud needs at least two points"),
            FmError::CoincidentPoints(msg) => write!(f, "coincident points: {msg}"),
            FmError::ThetaOutOfRange(msg) => write!(f, "theta must lie in (0,1): {msg}"),
            FmError::EpsilonTooLarge { bound } => {
                write!(f, "epsilon too large to keep points distinct; need < {bound}")
            }
            FmError::SlotOutOfRange { slot, arity } => {
                write!(f, "slot {slot} out of range 1..={arity}")
            }
            FmError::NotAnOperadElement(msg) => write!(f, "not an operad element: {msg}"),
            FmError::Degenerate(msg) => write!(f, "degenerate configuration: {msg}"),
            FmError::BadDiscs(msg) => write!(f, "bad disc data: {msg}"),
            FmError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl std::error::Error for FmError {}

/// A point of `Q^n`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point<S>(pub Vec<S>);

impl<S: fmt::Debug> fmt::Debug for Point<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<String> = self.0.iter().map(|c| format!("{c:?}")).collect();
        write!(f, "({})", coords.join(", "))
    }
}

impl<S: Scalar> Point<S> {
    pub fn origin(dim: usize) -> Point<S> {
        Point(vec![S::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Point<S>) -> Point<S> {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() + b.clone()).collect())
    }

    pub fn sub(&self, other: &Point<S>) -> Point<S> {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a.clone() - b.clone()).collect())
    }

    pub fn scale(&self, t: &S) -> Point<S> {
        Point(self.0.iter().map(|a| a.clone() * t.clone()).collect())
    }

    pub fn linf_norm(&self) -> S {
        self.0
            .iter()
            .map(|c| c.abs())
            .fold(S::zero(), |acc, c| if c > acc { c } else { acc })
    }

    pub fn linf_dist(&self, other: &Point<S>) -> S {
        self.sub(other).linf_norm()
    }

    pub fn dot(&self, other: &Point<S>) -> S {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.clone() * b.clone())
            .fold(S::zero(), |acc, v| acc + v)
    }
}

pub fn centroid<S: Scalar>(points: &[Point<S>]) -> Point<S> {
    assert!(!points.is_empty());
    let dim = points[0].dim();
    let mut sum = Point::origin(dim);
    for p in points {
        sum = sum.add(p);
    }
    sum.scale(&(S::one() / S::from_int(points.len() as i64)))
}

/// At least two pairwise-distinct points with centroid at the origin and
/// maximal max-norm exactly one.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Cloud<S> {
    points: Vec<Point<S>>,
}

impl<S: Scalar> Cloud<S> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &Point<S> {
        &self.points[i]
    }

    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    /// Least pairwise max-norm distance.
    pub fn min_separation(&self) -> S {
        let mut best: Option<S> = None;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d = self.points[i].linf_dist(&self.points[j]);
                if best.as_ref().map_or(true, |b| d < *b) {
                    best = Some(d);
                }
            }
        }
        best.expect("cloud has at least two points")
    }

    fn permuted(&self, order: &[usize]) -> Cloud<S> {
        Cloud { points: order.iter().map(|&i| self.points[i].clone()).collect() }
    }
}

/// Quotients a tuple of at least two distinct points by translations and
/// positive dilatations: returns the centroid, the scale (largest max-norm
/// after centering), and the normalized cloud. `offset + scale · cloud`
/// reconstructs the input exactly.
pub fn normalize_cloud<S: Scalar>(points: &[Point<S>]) -> Result<(Point<S>, S, Cloud<S>), FmError> {
    if points.len() < 2 {
        return Err(FmError::TooFewPoints);
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(FmError::CoincidentPoints(format!(
                    "positions {i} and {j} coincide"
                )));
            }
        }
    }
    let offset = centroid(points);
    let scale = points
        .iter()
        .map(|p| p.sub(&offset).linf_norm())
        .fold(S::zero(), |acc, v| if v > acc { v } else { acc });
    let inv = S::one() / scale.clone();
    let cloud = Cloud {
        points: points.iter().map(|p| p.sub(&offset).scale(&inv)).collect(),
    };
    Ok((offset, scale, cloud))
}

/// The collision tree over one macroscopic location: twigs carry the
/// global particle labels, and each vertex's children sit at the positions
/// of its normalized cloud.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum FmTree<S> {
    Twig(usize),
    Vertex { cloud: Cloud<S>, children: Vec<FmTree<S>> },
}

impl<S: Scalar> FmTree<S> {
    pub fn leaf_count(&self) -> usize {
        match self {
            FmTree::Twig(_) => 1,
            FmTree::Vertex { children, .. } => children.iter().map(FmTree::leaf_count).sum(),
        }
    }

    pub fn twig_labels(&self) -> Vec<usize> {
        match self {
            FmTree::Twig(i) => vec![*i],
            FmTree::Vertex { children, .. } => {
                children.iter().flat_map(FmTree::twig_labels).collect()
            }
        }
    }

    pub fn min_twig(&self) -> usize {
        self.twig_labels().into_iter().min().expect("nonempty tree")
    }

    pub fn depth(&self) -> usize {
        match self {
            FmTree::Twig(_) => 0,
            FmTree::Vertex { children, .. } => {
                1 + children.iter().map(FmTree::depth).max().unwrap_or(0)
            }
        }
    }

    pub fn shape(&self) -> crate::tree::Tree {
        match self {
            FmTree::Twig(i) => crate::tree::Tree::Leaf(*i),
            FmTree::Vertex { children, .. } => {
                crate::tree::Tree::Node(children.iter().map(FmTree::shape).collect())
            }
        }
    }

    fn relabel(&self, f: &impl Fn(usize) -> usize) -> FmTree<S> {
        match self {
            FmTree::Twig(i) => FmTree::Twig(f(*i)),
            FmTree::Vertex { cloud, children } => FmTree::Vertex {
                cloud: cloud.clone(),
                children: children.iter().map(|c| c.relabel(f)).collect(),
            },
        }
    }

    /// Children sorted by least twig label, the cloud permuted along.
    fn canonical(&self) -> FmTree<S> {
        match self {
            FmTree::Twig(i) => FmTree::Twig(*i),
            FmTree::Vertex { cloud, children } => {
                let children: Vec<FmTree<S>> =
                    children.iter().map(FmTree::canonical).collect();
                let mut order: Vec<usize> = (0..children.len()).collect();
                order.sort_by_key(|&i| children[i].min_twig());
                FmTree::Vertex {
                    cloud: cloud.permuted(&order),
                    children: order.iter().map(|&i| children[i].clone()).collect(),
                }
            }
        }
    }

    /// Least pairwise cloud separation over all vertices, `None` on twigs.
    fn min_cloud_separation(&self) -> Option<S> {
        match self {
            FmTree::Twig(_) => None,
            FmTree::Vertex { cloud, children } => {
                let mut best = cloud.min_separation();
                for c in children {
                    if let Some(m) = c.min_cloud_separation() {
                        if m < best {
                            best = m;
                        }
                    }
                }
                Some(best)
            }
        }
    }
}

/// A compactified configuration point: distinct macroscopic locations,
/// each with a collision tree, twigs labelled globally by `1..=k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FmPoint<S> {
    dim: usize,
    groups: Vec<(Point<S>, FmTree<S>)>,
}

impl<S: Scalar> FmPoint<S> {
    pub fn new(dim: usize, groups: Vec<(Point<S>, FmTree<S>)>) -> Result<FmPoint<S>, FmError> {
        let p = FmPoint { dim, groups };
        p.validate()?;
        Ok(p.canonicalize())
    }

    /// The empty configuration (the point of arity zero).
    pub fn empty(dim: usize) -> FmPoint<S> {
        FmPoint { dim, groups: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn leaf_count(&self) -> usize {
        self.groups.iter().map(|(_, t)| t.leaf_count()).sum()
    }

    pub fn location_count(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[(Point<S>, FmTree<S>)] {
        &self.groups
    }

    pub fn validate(&self) -> Result<(), FmError> {
        for (loc, t) in &self.groups {
            if loc.dim() != self.dim {
                return Err(FmError::DimensionMismatch { expected: self.dim, got: loc.dim() });
            }
            validate_tree(t, self.dim)?;
        }
        for i in 0..self.groups.len() {
            for j in i + 1..self.groups.len() {
                if self.groups[i].0 == self.groups[j].0 {
                    return Err(FmError::Degenerate("coincident macroscopic locations".into()));
                }
            }
        }
        let mut labels: Vec<usize> =
            self.groups.iter().flat_map(|(_, t)| t.twig_labels()).collect();
        labels.sort_unstable();
        let k = labels.len();
        if labels != (1..=k).collect::<Vec<_>>() {
            return Err(FmError::Degenerate(format!(
                "twig labels {labels:?} are not 1..={k}"
            )));
        }
        Ok(())
    }

    /// Sorts groups by location and children by least twig label. All
    /// constructors return this form, so equality is structural.
    pub fn canonicalize(mut self) -> FmPoint<S> {
        for (_, t) in self.groups.iter_mut() {
            *t = t.canonical();
        }
        self.groups.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("total order on scalars"));
        self
    }

    pub fn max_depth(&self) -> usize {
        self.groups.iter().map(|(_, t)| t.depth()).max().unwrap_or(0)
    }

    /// An operad element is a single tree based at the origin, or the
    /// empty configuration.
    pub fn is_operad_element(&self) -> bool {
        match self.groups.len() {
            0 => true,
            1 => self.groups[0].0 == Point::origin(self.dim),
            _ => false,
        }
    }
}

fn validate_tree<S: Scalar>(t: &FmTree<S>, dim: usize) -> Result<(), FmError> {
    match t {
        FmTree::Twig(_) => Ok(()),
        FmTree::Vertex { cloud, children } => {
            if cloud.len() != children.len() {
                return Err(FmError::Degenerate(format!(
                    "cloud of {} points over {} children",
                    cloud.len(),
                    children.len()
                )));
            }
            if cloud.len() < 2 {
                return Err(FmError::TooFewPoints);
            }
            let (offset, scale, _) = normalize_cloud(cloud.points())?;
            if offset != Point::origin(dim) || scale != S::one() {
                return Err(FmError::Degenerate("cloud is not normalized".into()));
            }
            children.iter().try_for_each(|c| validate_tree(c, dim))
        }
    }
}

/// Ordered tuples of pairwise distinct points: the genuine (uncompactified)
/// configurations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GenuineConfig<S> {
    dim: usize,
    points: Vec<Point<S>>,
}

impl<S: Scalar> GenuineConfig<S> {
    pub fn new(dim: usize, points: Vec<Point<S>>) -> Result<GenuineConfig<S>, FmError> {
        for p in &points {
            if p.dim() != dim {
                return Err(FmError::DimensionMismatch { expected: dim, got: p.dim() });
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(FmError::CoincidentPoints(format!(
                        "particles {} and {} coincide",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(GenuineConfig { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    pub fn diameter(&self) -> S {
        let mut best = S::zero();
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d = self.points[i].linf_dist(&self.points[j]);
                if d > best {
                    best = d;
                }
            }
        }
        best
    }

    /// The inclusion of a genuine configuration as a compactified point:
    /// one trivial tree per particle.
    pub fn as_fm_point(&self) -> Result<FmPoint<S>, FmError> {
        FmPoint::new(
            self.dim,
            self.points
                .iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), FmTree::Twig(i + 1)))
                .collect(),
        )
    }
}

/// Pointwise scalar multiplication, defined for positive factors.
pub fn scale_config<S: Scalar>(x: &GenuineConfig<S>, t: &S) -> Result<GenuineConfig<S>, FmError> {
    if *t <= S::zero() {
        return Err(FmError::ThetaOutOfRange(format!("scale factor {t} must be positive")));
    }
    GenuineConfig::new(x.dim, x.points.iter().map(|p| p.scale(t)).collect())
}

/// A single-linkage merge history under the max-norm metric: `merges[i]`
/// joins two current clusters at the recorded linkage distance.
#[derive(Clone, Debug)]
pub struct Dendrogram<S> {
    size: usize,
    pub merges: Vec<(usize, usize, S)>,
}

impl<S: Scalar> Dendrogram<S> {
    /// Naive single-linkage agglomeration; deterministic tie-breaking by
    /// least cluster indices.
    pub fn single_linkage(points: &[Point<S>]) -> Dendrogram<S> {
        let n = points.len();
        let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
        let mut alive: Vec<bool> = vec![true; n];
        let mut merges = Vec::new();
        for _ in 1..n {
            let mut best: Option<(S, usize, usize)> = None;
            for a in 0..clusters.len() {
                if !alive[a] {
                    continue;
                }
                for b in a + 1..clusters.len() {
                    if !alive[b] {
                        continue;
                    }
                    let mut d: Option<S> = None;
                    for &i in &clusters[a] {
                        for &j in &clusters[b] {
                            let dist = points[i].linf_dist(&points[j]);
                            if d.as_ref().map_or(true, |v| dist < *v) {
                                d = Some(dist);
                            }
                        }
                    }
                    let d = d.expect("nonempty clusters");
                    if best.as_ref().map_or(true, |(v, _, _)| d < *v) {
                        best = Some((d, a, b));
                    }
                }
            }
            let (d, a, b) = best.expect("more than one cluster");
            let merged: Vec<usize> =
                clusters[a].iter().chain(clusters[b].iter()).copied().collect();
            alive[a] = false;
            alive[b] = false;
            alive.push(true);
            merges.push((a, b, d));
            clusters.push(merged);
        }
        Dendrogram { size: n, merges }
    }

    /// The partition obtained by applying all merges of linkage distance
    /// strictly below `cut`; blocks ordered by least member.
    pub fn components_at(&self, cut: &S) -> Vec<Vec<usize>> {
        let total = self.size + self.merges.len();
        let mut uf = UnionFind::new(total);
        for (idx, (a, b, d)) in self.merges.iter().enumerate() {
            if d < cut {
                let node = self.size + idx;
                uf.union(*a, node);
                uf.union(*b, node);
            }
        }
        let mut blocks: HashMap<usize, Vec<usize>> = HashMap::new();
        for i in 0..self.size {
            blocks.entry(uf.find(i)).or_default().push(i);
        }
        let mut out: Vec<Vec<usize>> = blocks.into_values().collect();
        for b in &mut out {
            b.sort_unstable();
        }
        out.sort();
        out
    }
}

/// Recovers the collision structure of a genuine configuration at
/// separation scale `theta`: particles chained by distances below
/// `theta` times the ambient diameter share a macroscopic location, and
/// the same rule applies recursively inside each cluster to build the
/// tree of screens. Invariant under translating and scaling the input.
pub fn cluster<S: Scalar + Ord>(
    x: &GenuineConfig<S>,
    theta: &S,
) -> Result<FmPoint<S>, FmError> {
    if *theta <= S::zero() || *theta >= S::one() {
        return Err(FmError::ThetaOutOfRange(theta.to_string()));
    }
    if x.is_empty() {
        return Ok(FmPoint::empty(x.dim));
    }
    let indices: Vec<usize> = (0..x.len()).collect();
    if x.len() == 1 {
        return FmPoint::new(x.dim, vec![(x.points[0].clone(), FmTree::Twig(1))]);
    }
    let diameter = x.diameter();
    if diameter == S::zero() {
        return Err(FmError::CoincidentPoints("all particles coincide".into()));
    }
    let dendrogram = Dendrogram::single_linkage(&x.points);
    let cut = theta.clone() * diameter;
    let top = components_of(&dendrogram, &indices, &cut);
    let mut groups = Vec::with_capacity(top.len());
    for block in top {
        let location = centroid(&select(&x.points, &block));
        let tree = build_tree(&x.points, &block, theta)?;
        groups.push((location, tree));
    }
    FmPoint::new(x.dim, groups)
}

fn select<S: Clone>(points: &[Point<S>], idx: &[usize]) -> Vec<Point<S>> {
    idx.iter().map(|&i| points[i].clone()).collect()
}

fn components_of<S: Scalar>(
    dendrogram: &Dendrogram<S>,
    subset: &[usize],
    cut: &S,
) -> Vec<Vec<usize>> {
    // restrict the global dendrogram components to the subset
    let blocks = dendrogram.components_at(cut);
    let mut out: Vec<Vec<usize>> = Vec::new();
    for b in blocks {
        let restricted: Vec<usize> =
            b.into_iter().filter(|i| subset.contains(i)).collect();
        if !restricted.is_empty() {
            out.push(restricted);
        }
    }
    out.sort();
    out
}

fn build_tree<S: Scalar + Ord>(
    points: &[Point<S>],
    block: &[usize],
    theta: &S,
) -> Result<FmTree<S>, FmError> {
    if block.len() == 1 {
        return Ok(FmTree::Twig(block[0] + 1));
    }
    let pts = select(points, block);
    let diameter = GenuineConfig { dim: pts[0].dim(), points: pts.clone() }.diameter();
    if diameter == S::zero() {
        return Err(FmError::CoincidentPoints("cluster collapses to one point".into()));
    }
    let dendrogram = Dendrogram::single_linkage(&pts);
    let cut = theta.clone() * diameter.clone();
    let local: Vec<usize> = (0..pts.len()).collect();
    let comps = components_of(&dendrogram, &local, &cut);
    if comps.len() <= 1 {
        // no further scale separation: a single screen over the particles
        let (_, _, cloud) = normalize_cloud(&pts)?;
        let children = block.iter().map(|&i| FmTree::Twig(i + 1)).collect();
        return Ok(FmTree::Vertex { cloud, children });
    }
    let mut centroids = Vec::with_capacity(comps.len());
    let mut children = Vec::with_capacity(comps.len());
    for comp in &comps {
        let global: Vec<usize> = comp.iter().map(|&l| block[l]).collect();
        centroids.push(centroid(&select(points, &global)));
        children.push(build_tree(points, &global, theta)?);
    }
    let (_, _, cloud) = normalize_cloud(&centroids).map_err(|e| match e {
        FmError::CoincidentPoints(_) => {
            FmError::Degenerate("sub-cluster centroids coincide".into())
        }
        other => other,
    })?;
    Ok(FmTree::Vertex { cloud, children })
}

/// A sufficient upper bound on `epsilon` for `resolve` to produce distinct
/// points: driven by the least cloud separation and the least gap between
/// macroscopic locations.
pub fn resolve_epsilon_bound<S: Scalar>(x: &FmPoint<S>) -> Option<S> {
    let mut bound: Option<S> = None;
    let mut push = |m: S| {
        let b = m.clone() / (S::from_int(4) + m);
        if bound.as_ref().map_or(true, |v| b < *v) {
            bound = Some(b);
        }
    };
    for i in 0..x.groups.len() {
        for j in i + 1..x.groups.len() {
            push(x.groups[i].0.linf_dist(&x.groups[j].0));
        }
    }
    for (_, t) in &x.groups {
        if let Some(m) = t.min_cloud_separation() {
            push(m);
        }
    }
    bound
}

/// Approximate section of the degeneration: places every screen at scale
/// `epsilon` to the depth, anchoring each subtree so that its particle
/// centroid lands exactly on its nominal position. That anchoring is what
/// makes `cluster ∘ resolve` the identity in exact arithmetic.
pub fn resolve<S: Scalar>(x: &FmPoint<S>, epsilon: &S) -> Result<GenuineConfig<S>, FmError> {
    if *epsilon <= S::zero() || *epsilon >= S::one() {
        return Err(FmError::ThetaOutOfRange(format!("epsilon {epsilon} not in (0,1)")));
    }
    if let Some(bound) = resolve_epsilon_bound(x) {
        if *epsilon >= bound {
            return Err(FmError::EpsilonTooLarge { bound: bound.to_string() });
        }
    }
    let mut placed: Vec<(usize, Point<S>)> = Vec::new();
    for (loc, t) in &x.groups {
        place(t, loc, epsilon, epsilon, &mut placed);
    }
    placed.sort_by_key(|(i, _)| *i);
    let points = placed.into_iter().map(|(_, p)| p).collect();
    GenuineConfig::new(x.dim, points)
}

/// Places `tree` so that the centroid of its particles is exactly
/// `target`, with cloud offsets at scale `scale` and one extra factor of
/// `epsilon` per level.
fn place<S: Scalar>(
    tree: &FmTree<S>,
    target: &Point<S>,
    scale: &S,
    epsilon: &S,
    out: &mut Vec<(usize, Point<S>)>,
) {
    match tree {
        FmTree::Twig(i) => out.push((*i, target.clone())),
        FmTree::Vertex { cloud, children } => {
            let k: usize = children.iter().map(FmTree::leaf_count).sum();
            // leaf-count-weighted mean of the cloud, to cancel in the
            // particle centroid
            let mut weighted = Point::origin(target.dim());
            for (j, c) in children.iter().enumerate() {
                weighted = weighted
                    .add(&cloud.point(j).scale(&S::from_int(c.leaf_count() as i64)));
            }
            let w = weighted.scale(&(S::one() / S::from_int(k as i64)));
            for (j, c) in children.iter().enumerate() {
                let anchor = target.add(&cloud.point(j).sub(&w).scale(scale));
                place(c, &anchor, &(scale.clone() * epsilon.clone()), epsilon, out);
            }
        }
    }
}

/// Blow-down: each particle goes to the macroscopic location of its tree.
pub fn blow_down<S: Scalar>(x: &FmPoint<S>) -> Vec<Point<S>> {
    let mut out: Vec<(usize, Point<S>)> = Vec::new();
    for (loc, t) in &x.groups {
        for i in t.twig_labels() {
            out.push((i, loc.clone()));
        }
    }
    out.sort_by_key(|(i, _)| *i);
    out.into_iter().map(|(_, p)| p).collect()
}

/// Right-module composition: grafts an operad element (a tree at the
/// origin, or the empty configuration) onto twig `slot`. Clouds are
/// untouched except when the empty configuration deletes the twig, in
/// which case the ambient cloud is reprojected and valence-one vertices
/// dissolve.
pub fn fm_compose<S: Scalar>(
    c: &FmPoint<S>,
    slot: usize,
    o: &FmPoint<S>,
) -> Result<FmPoint<S>, FmError> {
    if !o.is_operad_element() {
        return Err(FmError::NotAnOperadElement(format!(
            "{} locations, based at {:?}",
            o.location_count(),
            o.groups.first().map(|(l, _)| l.clone())
        )));
    }
    let k = c.leaf_count();
    if slot < 1 || slot > k {
        return Err(FmError::SlotOutOfRange { slot, arity: k });
    }
    let m = o.leaf_count();
    let mut groups: Vec<(Point<S>, FmTree<S>)> = Vec::new();
    for (loc, t) in &c.groups {
        let has_slot = t.twig_labels().contains(&slot);
        if !has_slot {
            let shifted = t.relabel(&|i| if i > slot { i + m - 1 } else { i });
            groups.push((loc.clone(), shifted));
            continue;
        }
        if m == 0 {
            match delete_twig(t, slot)? {
                Some(reduced) => {
                    groups.push((loc.clone(), reduced.relabel(&|i| {
                        if i > slot {
                            i - 1
                        } else {
                            i
                        }
                    })))
                }
                None => {} // the location held only this particle
            }
        } else {
            let guest = o.groups[0].1.relabel(&|i| i + slot - 1);
            groups.push((loc.clone(), graft_shift(t, slot, &guest, m)));
        }
    }
    FmPoint::new(c.dim, groups)
}

/// Single-pass grafting with the standard twig renumbering: the guest
/// (already shifted to occupy `slot..slot+m-1`) replaces the twig, and
/// host labels above `slot` move up by `m - 1`.
fn graft_shift<S: Scalar>(
    t: &FmTree<S>,
    slot: usize,
    shifted_guest: &FmTree<S>,
    m: usize,
) -> FmTree<S> {
    match t {
        FmTree::Twig(i) if *i == slot => shifted_guest.clone(),
        FmTree::Twig(i) if *i > slot => FmTree::Twig(*i + m - 1),
        FmTree::Twig(i) => FmTree::Twig(*i),
        FmTree::Vertex { cloud, children } => FmTree::Vertex {
            cloud: cloud.clone(),
            children: children
                .iter()
                .map(|c| graft_shift(c, slot, shifted_guest, m))
                .collect(),
        },
    }
}

/// Deletes the twig `slot`, reprojecting the ambient cloud (forget the
/// coordinate, renormalize) and dissolving vertices left with one child.
/// Returns `None` when the whole tree was that twig.
fn delete_twig<S: Scalar>(t: &FmTree<S>, slot: usize) -> Result<Option<FmTree<S>>, FmError> {
    match t {
        FmTree::Twig(i) if *i == slot => Ok(None),
        FmTree::Twig(i) => Ok(Some(FmTree::Twig(*i))),
        FmTree::Vertex { cloud, children } => {
            let mut new_children = Vec::with_capacity(children.len());
            let mut kept_positions = Vec::with_capacity(children.len());
            for (j, c) in children.iter().enumerate() {
                if c.twig_labels().contains(&slot) {
                    match delete_twig(c, slot)? {
                        Some(reduced) => {
                            new_children.push(reduced);
                            kept_positions.push(j);
                        }
                        None => {} // child vanished entirely
                    }
                } else {
                    new_children.push(c.clone());
                    kept_positions.push(j);
                }
            }
            match new_children.len() {
                0 => Ok(None),
                1 => Ok(Some(new_children.pop().expect("one child"))),
                _ => {
                    let pts: Vec<Point<S>> =
                        kept_positions.iter().map(|&j| cloud.point(j).clone()).collect();
                    let (_, _, new_cloud) = normalize_cloud(&pts)?;
                    Ok(Some(FmTree::Vertex { cloud: new_cloud, children: new_children }))
                }
            }
        }
    }
}

/// One affine little disc: `x ↦ center + radius · x`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Disc<S> {
    pub center: Vec<S>,
    pub radius: S,
}

#[derive(Serialize, Deserialize)]
struct DiscJson {
    center: Vec<String>,
    radius: String,
}

impl<S: Scalar> Serialize for Disc<S> {
    fn serialize<Sz: serde::Serializer>(&self, ser: Sz) -> Result<Sz::Ok, Sz::Error> {
        DiscJson {
            center: self.center.iter().map(Scalar::to_ratio_string).collect(),
            radius: self.radius.to_ratio_string(),
        }
        .serialize(ser)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Disc<S> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let json = DiscJson::deserialize(de)?;
        let center = json
            .center
            .iter()
            .map(|c| S::parse_ratio(c).ok_or_else(|| D::Error::custom(format!("bad rational {c:?}"))))
            .collect::<Result<_, D::Error>>()?;
        let radius = S::parse_ratio(&json.radius)
            .ok_or_else(|| D::Error::custom(format!("bad rational {:?}", json.radius)))?;
        Ok(Disc { center, radius })
    }
}

impl<S: Scalar> Disc<S> {
    fn center_point(&self) -> Point<S> {
        Point(self.center.clone())
    }

    fn apply(&self, x: &Point<S>) -> Point<S> {
        self.center_point().add(&x.scale(&self.radius))
    }

    fn compose(&self, inner: &Disc<S>) -> Disc<S> {
        Disc {
            center: self.apply(&inner.center_point()).0,
            radius: self.radius.clone() * inner.radius.clone(),
        }
    }
}

/// A tuple of disjoint sub-discs of the round unit disc.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DiscTuple<S>(pub Vec<Disc<S>>);

impl<S: Scalar> Serialize for DiscTuple<S> {
    fn serialize<Sz: serde::Serializer>(&self, ser: Sz) -> Result<Sz::Ok, Sz::Error> {
        self.0.serialize(ser)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for DiscTuple<S> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        Ok(DiscTuple(Vec::deserialize(de)?))
    }
}

/// The little-discs operad in a fixed dimension: elements are tuples of
/// direction-preserving affine self-embeddings of the unit disc with
/// disjoint images, composed by substitution. Element sets are infinite,
/// so only the composition structure is exposed.
#[derive(Clone, Debug)]
pub struct LittleDiscs<S> {
    pub dim: usize,
    pub max_arity: usize,
    _marker: std::marker::PhantomData<S>,
}

impl<S: Scalar> LittleDiscs<S> {
    pub fn new(dim: usize, max_arity: usize) -> LittleDiscs<S> {
        LittleDiscs { dim, max_arity, _marker: std::marker::PhantomData }
    }

    /// Disjointness and containment, exactly, via squared distances.
    pub fn tuple_is_valid(&self, t: &DiscTuple<S>) -> bool {
        for d in &t.0 {
            if d.center.len() != self.dim || d.radius <= S::zero() || d.radius > S::one() {
                return false;
            }
            // |c|₂ ≤ 1 − r, squared
            let c = d.center_point();
            let slack = S::one() - d.radius.clone();
            if slack < S::zero() || c.dot(&c) > slack.clone() * slack {
                return false;
            }
        }
        for i in 0..t.0.len() {
            for j in i + 1..t.0.len() {
                let diff = t.0[i].center_point().sub(&t.0[j].center_point());
                let sum = t.0[i].radius.clone() + t.0[j].radius.clone();
                if diff.dot(&diff) < sum.clone() * sum {
                    return false;
                }
            }
        }
        true
    }
}

impl<S: Scalar + Ord + std::hash::Hash> crate::operad::OperadOps for LittleDiscs<S> {
    type Elem = DiscTuple<S>;

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn unit(&self) -> DiscTuple<S> {
        DiscTuple(vec![Disc { center: vec![S::zero(); self.dim], radius: S::one() }])
    }

    fn is_element(&self, arity: usize, e: &DiscTuple<S>) -> bool {
        e.0.len() == arity && self.tuple_is_valid(e)
    }

    fn act(&self, arity: usize, e: &DiscTuple<S>, sigma: &crate::perm::Perm) -> DiscTuple<S> {
        debug_assert_eq!(e.0.len(), arity);
        DiscTuple((0..arity).map(|p| e.0[sigma.apply(p)].clone()).collect())
    }

    fn compose(
        &self,
        arity: usize,
        a: &DiscTuple<S>,
        args: &[(usize, DiscTuple<S>)],
    ) -> Result<DiscTuple<S>, crate::operad::OperadError> {
        if args.len() != arity {
            return Err(crate::operad::OperadError::ArityMismatch {
                expected: arity,
                got: args.len(),
            });
        }
        let total: usize = args.iter().map(|(i, _)| i).sum();
        if total > self.max_arity {
            return Err(crate::operad::OperadError::ArityOverflow {
                needed: total,
                max_arity: self.max_arity,
            });
        }
        let mut out = Vec::with_capacity(total);
        for (j, (_, b)) in args.iter().enumerate() {
            for inner in &b.0 {
                out.push(a.0[j].compose(inner));
            }
        }
        Ok(DiscTuple(out))
    }
}

/// Realizes a tree of little discs with edge lengths as a configuration
/// point based at the origin. An edge of length `t` rescales everything
/// below it by the residual factor `1 - t`: length 0 composes the disc
/// labels outright (so the zero-length relation holds on the nose) and
/// length 1 nests a genuinely infinitesimal screen.
pub fn little_discs_to_fm<S: Scalar + Ord + std::hash::Hash>(
    discs: &LittleDiscs<S>,
    t: &crate::w::WTree<DiscTuple<S>, S>,
) -> Result<FmPoint<S>, FmError> {
    use crate::w::{WNode, WTree};
    crate::w::validate_wtree(discs, t)
        .map_err(|e| FmError::BadDiscs(e.to_string()))?;
    let t: WTree<DiscTuple<S>, S> = crate::w::normalize_wtree(discs, t)
        .map_err(|e| FmError::BadDiscs(e.to_string()))?;

    struct Entry<S> {
        position: Point<S>,
        payload: FmTree<S>,
    }

    fn gather<S: Scalar + Ord + std::hash::Hash>(
        node: &crate::w::WNode<DiscTuple<S>, S>,
        frame: &Disc<S>,
        out: &mut Vec<Entry<S>>,
    ) -> Result<(), FmError> {
        match node {
            WNode::Twig(i) => {
                out.push(Entry { position: frame.center_point(), payload: FmTree::Twig(*i) });
                Ok(())
            }
            WNode::Vertex { label, children } => {
                for (j, edge) in children.iter().enumerate() {
                    let disc = frame.compose(&label.0[j]);
                    match (&edge.length, &edge.node) {
                        (None, leaf @ WNode::Twig(_)) => {
                            gather(leaf, &disc, out)?;
                        }
                        (Some(l), sub @ WNode::Vertex { .. }) => {
                            let residual = S::one() - l.clone();
                            if residual > S::zero() {
                                let scaled = Disc {
                                    center: disc.center.clone(),
                                    radius: disc.radius.clone() * residual,
                                };
                                gather(sub, &scaled, out)?;
                            } else {
                                // fully degenerate edge: a nested screen in
                                // its own frame
                                let subtree = realize_vertex(sub)?;
                                out.push(Entry {
                                    position: disc.center_point(),
                                    payload: subtree,
                                });
                            }
                        }
                        _ => unreachable!("validated edges"),
                    }
                }
                Ok(())
            }
        }
    }

    fn realize_vertex<S: Scalar + Ord + std::hash::Hash>(
        node: &crate::w::WNode<DiscTuple<S>, S>,
    ) -> Result<FmTree<S>, FmError> {
        let dim = match node {
            WNode::Vertex { label, .. } => label.0[0].center.len(),
            WNode::Twig(_) => 0,
        };
        let identity = Disc { center: vec![S::zero(); dim], radius: S::one() };
        let mut entries = Vec::new();
        gather(node, &identity, &mut entries)?;
        if entries.len() == 1 {
            return Ok(entries.pop().expect("one entry").payload);
        }
        let positions: Vec<Point<S>> = entries.iter().map(|e| e.position.clone()).collect();
        let (_, _, cloud) = normalize_cloud(&positions)?;
        Ok(FmTree::Vertex {
            cloud,
            children: entries.into_iter().map(|e| e.payload).collect(),
        })
    }

    let tree = match &t.root {
        WNode::Twig(i) => FmTree::Twig(*i),
        root @ WNode::Vertex { .. } => realize_vertex(root)?,
    };
    FmPoint::new(discs.dim, vec![(Point::origin(discs.dim), tree)])
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FmTreeJson {
    Twig { twig: usize },
    Vertex { cloud: Vec<Vec<String>>, children: Vec<FmTreeJson> },
}

#[derive(Serialize, Deserialize)]
struct FmPointJson {
    dim: usize,
    groups: Vec<FmGroupJson>,
}

#[derive(Serialize, Deserialize)]
struct FmGroupJson {
    location: Vec<String>,
    tree: FmTreeJson,
}

impl<S: Scalar> Serialize for FmPoint<S> {
    fn serialize<Sz: serde::Serializer>(&self, ser: Sz) -> Result<Sz::Ok, Sz::Error> {
        fn conv<S: Scalar>(t: &FmTree<S>) -> FmTreeJson {
            match t {
                FmTree::Twig(i) => FmTreeJson::Twig { twig: *i },
                FmTree::Vertex { cloud, children } => FmTreeJson::Vertex {
                    cloud: cloud
                        .points()
                        .iter()
                        .map(|p| p.0.iter().map(Scalar::to_ratio_string).collect())
                        .collect(),
                    children: children.iter().map(conv).collect(),
                },
            }
        }
        FmPointJson {
            dim: self.dim,
            groups: self
                .groups
                .iter()
                .map(|(loc, t)| FmGroupJson {
                    location: loc.0.iter().map(Scalar::to_ratio_string).collect(),
                    tree: conv(t),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for FmPoint<S> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        fn parse_point<S: Scalar, E: Error>(coords: &[String]) -> Result<Point<S>, E> {
            coords
                .iter()
                .map(|c| {
                    S::parse_ratio(c).ok_or_else(|| E::custom(format!("bad rational {c:?}")))
                })
                .collect::<Result<Vec<S>, E>>()
                .map(Point)
        }
        fn conv<S: Scalar, E: Error>(t: &FmTreeJson) -> Result<FmTree<S>, E> {
            Ok(match t {
                FmTreeJson::Twig { twig } => FmTree::Twig(*twig),
                FmTreeJson::Vertex { cloud, children } => FmTree::Vertex {
                    cloud: Cloud {
                        points: cloud
                            .iter()
                            .map(|p| parse_point(p))
                            .collect::<Result<_, E>>()?,
                    },
                    children: children.iter().map(conv).collect::<Result<_, E>>()?,
                },
            })
        }
        let json = FmPointJson::deserialize(de)?;
        let groups = json
            .groups
            .iter()
            .map(|g| Ok((parse_point(&g.location)?, conv(&g.tree)?)))
            .collect::<Result<Vec<_>, D::Error>>()?;
        FmPoint::new(json.dim, groups).map_err(D::Error::custom)
    }
}

impl<S: Scalar> Serialize for GenuineConfig<S> {
    fn serialize<Sz: serde::Serializer>(&self, ser: Sz) -> Result<Sz::Ok, Sz::Error> {
        #[derive(Serialize)]
        struct Json {
            dim: usize,
            points: Vec<Vec<String>>,
        }
        Json {
            dim: self.dim,
            points: self
                .points
                .iter()
                .map(|p| p.0.iter().map(Scalar::to_ratio_string).collect())
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for GenuineConfig<S> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        struct Json {
            dim: usize,
            points: Vec<Vec<String>>,
        }
        let json = Json::deserialize(de)?;
        let points = json
            .points
            .iter()
            .map(|p| {
                p.iter()
                    .map(|c| {
                        S::parse_ratio(c)
                            .ok_or_else(|| D::Error::custom(format!("bad rational {c:?}")))
                    })
                    .collect::<Result<Vec<S>, D::Error>>()
                    .map(Point)
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        GenuineConfig::new(json.dim, points).map_err(D::Error::custom)
    }
}

/// Deterministic generator of structured configuration points for the
/// round-trip suites. Locations land on the integer grid `{0..3}^dim`
/// (gaps at least 1, diameter at most 3) and cloud points on the half-
/// integer grid in `[-1, 1]^dim` with pairwise max-norm separation at
/// least 1/2; with `theta = 1/10` this keeps every separation scale well
/// clear of the clustering thresholds, which is what the recorded epsilon
/// bound `theta²/16` relies on.
pub fn random_fm_point<S: Scalar>(
    rng: &mut crate::rng::SplitMix64,
    dim: usize,
    max_leaves: usize,
    max_depth: usize,
    operadic: bool,
) -> FmPoint<S> {
    assert!(dim >= 1 && max_leaves >= 1);
    let locations: Vec<Point<S>> = if operadic {
        vec![Point::origin(dim)]
    } else if max_leaves == 1 {
        vec![Point((0..dim).map(|_| S::from_int(rng.below(4) as i64)).collect())]
    } else {
        // at least two macroscopic locations: a scale-invariant clustering
        // cannot tell a single collision cluster from spread points, so
        // round-trippable inputs need macroscopic structure
        let count = 2 + rng.index(2.min(max_leaves - 1));
        let mut out: Vec<Point<S>> = Vec::new();
        while out.len() < count {
            let p = Point((0..dim).map(|_| S::from_int(rng.below(4) as i64)).collect());
            if !out.contains(&p) {
                out.push(p);
            }
        }
        out
    };
    let l = locations.len();
    // distribute leaves over the locations
    let mut leaves_per = vec![1usize; l];
    let mut remaining = max_leaves.saturating_sub(l);
    while remaining > 0 && rng.below(3) > 0 {
        leaves_per[rng.index(l)] += 1;
        remaining -= 1;
    }
    let mut next_label = 1usize;
    let mut groups = Vec::with_capacity(l);
    for (loc, leaves) in locations.into_iter().zip(leaves_per) {
        let tree = random_tree(rng, dim, leaves, max_depth, &mut next_label);
        groups.push((loc, tree));
    }
    FmPoint::new(dim, groups).expect("generator output is valid").canonicalize()
}

fn random_tree<S: Scalar>(
    rng: &mut crate::rng::SplitMix64,
    dim: usize,
    leaves: usize,
    depth: usize,
    next_label: &mut usize,
) -> FmTree<S> {
    if leaves == 1 {
        let t = FmTree::Twig(*next_label);
        *next_label += 1;
        return t;
    }
    // split the leaves into 2..=min(4, leaves) children
    let parts = 2 + rng.index(3.min(leaves - 1));
    let mut sizes = vec![1usize; parts];
    for _ in 0..leaves - parts {
        sizes[rng.index(parts)] += 1;
    }
    let cloud = random_cloud(rng, dim, parts);
    let children = sizes
        .into_iter()
        .map(|s| {
            if depth <= 1 {
                // forced: spend all leaves on twigs at this level
                let mut kids = Vec::with_capacity(s);
                for _ in 0..s {
                    kids.push(FmTree::Twig(*next_label));
                    *next_label += 1;
                }
                kids
            } else {
                vec![random_tree(rng, dim, s, depth - 1, next_label)]
            }
        })
        .collect::<Vec<_>>();
    // if depth ran out, children groups may hold several twigs each: widen
    // the vertex accordingly
    if children.iter().any(|c| c.len() > 1) {
        let flat: Vec<FmTree<S>> = children.into_iter().flatten().collect();
        let cloud = random_cloud(rng, dim, flat.len());
        return FmTree::Vertex { cloud, children: flat };
    }
    let children: Vec<FmTree<S>> = children.into_iter().flatten().collect();
    FmTree::Vertex { cloud, children }
}

/// `count` grid points in `[-1,1]^dim` with pairwise separation ≥ 1/2,
/// normalized exactly.
fn random_cloud<S: Scalar>(
    rng: &mut crate::rng::SplitMix64,
    dim: usize,
    count: usize,
) -> Cloud<S> {
    loop {
        let mut pts: Vec<Point<S>> = Vec::new();
        let mut tries = 0;
        while pts.len() < count && tries < 200 {
            tries += 1;
            let p = Point(
                (0..dim)
                    .map(|_| S::from_ratio(rng.below(5) as i64 - 2, 2))
                    .collect(),
            );
            let min_sep = S::from_ratio(1, 2);
            if pts.iter().all(|q| q.linf_dist(&p) >= min_sep) {
                pts.push(p);
            }
        }
        if pts.len() < count {
            continue;
        }
        if let Ok((_, _, cloud)) = normalize_cloud(&pts) {
            // normalizing divides by a scale ≤ 1 grid-wise, so the
            // separation only grows; still, verify the margin exactly
            if cloud.min_separation() >= S::from_ratio(1, 2) {
                return cloud;
            }
        }
    }
}

/// Random genuine configuration on a rational grid, pairwise distinct.
pub fn random_genuine_config<S: Scalar>(
    rng: &mut crate::rng::SplitMix64,
    dim: usize,
    count: usize,
) -> GenuineConfig<S> {
    let mut pts: Vec<Point<S>> = Vec::new();
    while pts.len() < count {
        let p = Point(
            (0..dim)
                .map(|_| S::from_ratio(rng.below(33) as i64 - 16, 4))
                .collect(),
        );
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    GenuineConfig::new(dim, pts).expect("distinct by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::Rat;

    fn rat(p: i64, q: i64) -> Rat {
        Rat::from_ratio(p, q)
    }

    fn pt1(x: Rat) -> Point<Rat> {
        Point(vec![x])
    }

    #[test]
    fn normalize_cloud_pair() {
        let (offset, scale, cloud) =
            normalize_cloud(&[pt1(rat(0, 1)), pt1(rat(1, 1))]).unwrap();
        assert_eq!(offset, pt1(rat(1, 2)));
        assert_eq!(scale, rat(1, 2));
        assert_eq!(cloud.points(), &[pt1(rat(-1, 1)), pt1(rat(1, 1))]);
        // reconstruction is exact
        for (i, p) in [pt1(rat(0, 1)), pt1(rat(1, 1))].iter().enumerate() {
            assert_eq!(offset.add(&cloud.point(i).scale(&scale)), *p);
        }
    }

    #[test]
    fn normalize_cloud_fixed_point_and_invariance() {
        let pts = vec![pt1(rat(-1, 1)), pt1(rat(1, 1))];
        let (offset, scale, cloud) = normalize_cloud(&pts).unwrap();
        assert_eq!(offset, pt1(rat(0, 1)));
        assert_eq!(scale, rat(1, 1));
        assert_eq!(cloud.points(), pts.as_slice());
        // scaling the input does not change the cloud
        let scaled: Vec<Point<Rat>> = pts.iter().map(|p| p.scale(&rat(7, 3))).collect();
        let (_, _, cloud2) = normalize_cloud(&scaled).unwrap();
        assert_eq!(cloud, cloud2);
    }

    #[test]
    fn normalize_cloud_rejects_degenerate_input() {
        assert!(matches!(
            normalize_cloud(&[pt1(rat(0, 1))]),
            Err(FmError::TooFewPoints)
        ));
        assert!(matches!(
            normalize_cloud(&[pt1(rat(1, 2)), pt1(rat(1, 2))]),
            Err(FmError::CoincidentPoints(_))
        ));
    }

    #[test]
    fn cluster_worked_example() {
        // {0, 1/1000, 1} at theta = 1/10: two locations, one with a screen
        let x = GenuineConfig::new(
            1,
            vec![pt1(rat(0, 1)), pt1(rat(1, 1000)), pt1(rat(1, 1))],
        )
        .unwrap();
        let fm = cluster(&x, &rat(1, 10)).unwrap();
        assert_eq!(fm.location_count(), 2);
        let (loc0, tree0) = &fm.groups()[0];
        assert_eq!(*loc0, pt1(rat(1, 2000)));
        match tree0 {
            FmTree::Vertex { cloud, children } => {
                assert_eq!(cloud.points(), &[pt1(rat(-1, 1)), pt1(rat(1, 1))]);
                assert_eq!(children.len(), 2);
                assert!(matches!(children[0], FmTree::Twig(1)));
                assert!(matches!(children[1], FmTree::Twig(2)));
            }
            FmTree::Twig(_) => panic!("expected a screen at the collision"),
        }
        let (loc1, tree1) = &fm.groups()[1];
        assert_eq!(*loc1, pt1(rat(1, 1)));
        assert!(matches!(tree1, FmTree::Twig(3)));
        // blow-down of the example
        assert_eq!(
            blow_down(&fm),
            vec![pt1(rat(1, 2000)), pt1(rat(1, 2000)), pt1(rat(1, 1))]
        );
    }

    #[test]
    fn cluster_well_separated_points_yield_trivial_trees() {
        let x = GenuineConfig::new(
            1,
            vec![pt1(rat(0, 1)), pt1(rat(1, 1)), pt1(rat(2, 1))],
        )
        .unwrap();
        let fm = cluster(&x, &rat(1, 10)).unwrap();
        assert_eq!(fm.location_count(), 3);
        assert!(fm.groups().iter().all(|(_, t)| matches!(t, FmTree::Twig(_))));
    }

    #[test]
    fn cluster_is_translation_and_scale_invariant() {
        let mut rng = SplitMix64::new(3);
        let theta = rat(1, 10);
        for _ in 0..20 {
            let x: GenuineConfig<Rat> = random_genuine_config(&mut rng, 2, 5);
            let base = cluster(&x, &theta).unwrap();
            let t = rat(3, 2);
            let scaled = scale_config(&x, &t).unwrap();
            let scaled_fm = cluster(&scaled, &theta).unwrap();
            // same trees, locations scaled
            assert_eq!(base.location_count(), scaled_fm.location_count());
            for ((l1, t1), (l2, t2)) in base.groups().iter().zip(scaled_fm.groups()) {
                assert_eq!(l1.scale(&t), *l2);
                assert_eq!(t1, t2);
            }
        }
    }

    #[test]
    fn scale_config_laws() {
        let x: GenuineConfig<Rat> =
            GenuineConfig::new(1, vec![pt1(rat(0, 1)), pt1(rat(1, 1))]).unwrap();
        assert_eq!(scale_config(&x, &rat(1, 1)).unwrap(), x);
        let a = scale_config(&scale_config(&x, &rat(2, 3)).unwrap(), &rat(3, 5)).unwrap();
        let b = scale_config(&x, &rat(2, 5)).unwrap();
        assert_eq!(a, b);
        assert!(scale_config(&x, &rat(0, 1)).is_err());
    }

    #[test]
    fn resolve_trivial_and_single_screen() {
        // trivial trees: resolve returns the locations themselves
        let fm: FmPoint<Rat> = FmPoint::new(
            1,
            vec![(pt1(rat(0, 1)), FmTree::Twig(1)), (pt1(rat(1, 1)), FmTree::Twig(2))],
        )
        .unwrap();
        let x = resolve(&fm, &rat(1, 100)).unwrap();
        assert_eq!(x.points(), &[pt1(rat(0, 1)), pt1(rat(1, 1))]);

        // single corolla at the origin: exactly epsilon times the cloud
        let (_, _, cloud) = normalize_cloud(&[pt1(rat(-1, 1)), pt1(rat(1, 1))]).unwrap();
        let fm: FmPoint<Rat> = FmPoint::new(
            1,
            vec![(
                pt1(rat(0, 1)),
                FmTree::Vertex { cloud, children: vec![FmTree::Twig(1), FmTree::Twig(2)] },
            )],
        )
        .unwrap();
        let eps = rat(1, 50);
        let x = resolve(&fm, &eps).unwrap();
        assert_eq!(x.points(), &[pt1(-eps.clone()), pt1(eps)]);
    }

    #[test]
    fn resolve_rejects_large_epsilon() {
        let (_, _, cloud) = normalize_cloud(&[pt1(rat(-1, 1)), pt1(rat(1, 1))]).unwrap();
        let fm: FmPoint<Rat> = FmPoint::new(
            1,
            vec![(
                pt1(rat(0, 1)),
                FmTree::Vertex { cloud, children: vec![FmTree::Twig(1), FmTree::Twig(2)] },
            )],
        )
        .unwrap();
        assert!(matches!(
            resolve(&fm, &rat(99, 100)),
            Err(FmError::EpsilonTooLarge { .. })
        ));
    }

    #[test]
    fn cluster_resolve_roundtrip() {
        let mut rng = SplitMix64::new(9);
        let theta = rat(1, 10);
        let eps = rat(1, 1600); // theta^2 / 16
        for case in 0..40 {
            let dim = 1 + rng.index(3);
            let leaves = 2 + rng.index(7);
            let fm: FmPoint<Rat> = random_fm_point(&mut rng, dim, leaves, 3, false);
            let resolved = resolve(&fm, &eps).unwrap();
            let back = cluster(&resolved, &theta).unwrap();
            assert_eq!(back, fm, "case {case}");
        }
    }

    #[test]
    fn blow_down_of_inclusion_is_identity() {
        let mut rng = SplitMix64::new(12);
        for _ in 0..25 {
            let x: GenuineConfig<Rat> = random_genuine_config(&mut rng, 2, 6);
            let fm = x.as_fm_point().unwrap();
            assert_eq!(blow_down(&fm), x.points());
        }
    }

    #[test]
    fn compose_unit_laws() {
        let mut rng = SplitMix64::new(21);
        let unit: FmPoint<Rat> = FmPoint::new(
            2,
            vec![(Point::origin(2), FmTree::Twig(1))],
        )
        .unwrap();
        for _ in 0..10 {
            let c: FmPoint<Rat> = random_fm_point(&mut rng, 2, 5, 2, false);
            let k = c.leaf_count();
            for slot in 1..=k {
                assert_eq!(fm_compose(&c, slot, &unit).unwrap(), c);
            }
        }
    }

    #[test]
    fn compose_with_empty_configuration_deletes_twig() {
        // corolla on three twigs; deleting one leaves a two-point screen
        let pts = vec![pt1(rat(-1, 1)), pt1(rat(0, 1)), pt1(rat(1, 1))];
        let (_, _, cloud) = normalize_cloud(&pts).unwrap();
        let c: FmPoint<Rat> = FmPoint::new(
            1,
            vec![(
                pt1(rat(0, 1)),
                FmTree::Vertex {
                    cloud,
                    children: vec![FmTree::Twig(1), FmTree::Twig(2), FmTree::Twig(3)],
                },
            )],
        )
        .unwrap();
        let empty = FmPoint::empty(1);
        let reduced = fm_compose(&c, 2, &empty).unwrap();
        assert_eq!(reduced.leaf_count(), 2);
        let (_, t) = &reduced.groups()[0];
        match t {
            FmTree::Vertex { cloud, children } => {
                assert_eq!(children.len(), 2);
                assert_eq!(cloud.points(), &[pt1(rat(-1, 1)), pt1(rat(1, 1))]);
            }
            FmTree::Twig(_) => panic!("expected a screen"),
        }
        // deleting again dissolves the vertex entirely
        let once_more = fm_compose(&reduced, 1, &empty).unwrap();
        assert_eq!(once_more.leaf_count(), 1);
        assert!(matches!(once_more.groups()[0].1, FmTree::Twig(1)));
    }

    #[test]
    fn compose_associativity_on_disjoint_slots() {
        let mut rng = SplitMix64::new(33);
        for case in 0..40 {
            let c: FmPoint<Rat> = random_fm_point(&mut rng, 2, 4, 2, false);
            let k = c.leaf_count();
            if k < 2 {
                continue;
            }
            let o1: FmPoint<Rat> = random_fm_point(&mut rng, 2, 3, 2, true);
            let o2: FmPoint<Rat> = random_fm_point(&mut rng, 2, 3, 2, true);
            let i = 1 + rng.index(k - 1);
            let j = i + 1 + rng.index(k - i);
            let m1 = o1.leaf_count();
            // graft at i first, then at the shifted j, and in the other order
            let one = fm_compose(&fm_compose(&c, i, &o1).unwrap(), j + m1 - 1, &o2).unwrap();
            let two = fm_compose(&fm_compose(&c, j, &o2).unwrap(), i, &o1).unwrap();
            assert_eq!(one, two, "case {case}");
        }
    }

    #[test]
    fn compose_nested_associativity() {
        let mut rng = SplitMix64::new(34);
        for case in 0..40 {
            let a: FmPoint<Rat> = random_fm_point(&mut rng, 2, 4, 2, false);
            let b: FmPoint<Rat> = random_fm_point(&mut rng, 2, 3, 2, true);
            let cc: FmPoint<Rat> = random_fm_point(&mut rng, 2, 2, 2, true);
            let ka = a.leaf_count();
            let kb = b.leaf_count();
            let i = 1 + rng.index(ka);
            let j = 1 + rng.index(kb);
            let lhs =
                fm_compose(&fm_compose(&a, i, &b).unwrap(), i + j - 1, &cc).unwrap();
            let rhs = fm_compose(&a, i, &fm_compose(&b, j, &cc).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "case {case}");
        }
    }

    #[test]
    fn compose_matches_tree_kernel_grafting() {
        let mut rng = SplitMix64::new(35);
        for _ in 0..30 {
            let c: FmPoint<Rat> = random_fm_point(&mut rng, 2, 4, 2, true);
            let o: FmPoint<Rat> = random_fm_point(&mut rng, 2, 3, 2, true);
            let k = c.leaf_count();
            let slot = 1 + rng.index(k);
            let composed = fm_compose(&c, slot, &o).unwrap();
            let host_shape = c.groups()[0].1.shape();
            let guest_shape = o.groups()[0].1.shape();
            let expected = host_shape.graft(slot, &guest_shape).unwrap();
            assert_eq!(
                composed.groups()[0].1.shape().code(false),
                expected.code(false)
            );
        }
    }

    #[test]
    fn blow_down_after_compose_repeats_location() {
        let mut rng = SplitMix64::new(36);
        for _ in 0..20 {
            let c: FmPoint<Rat> = random_fm_point(&mut rng, 2, 4, 2, false);
            let o: FmPoint<Rat> = random_fm_point(&mut rng, 2, 3, 2, true);
            let k = c.leaf_count();
            let slot = 1 + rng.index(k);
            let m = o.leaf_count();
            let before = blow_down(&c);
            let after = blow_down(&fm_compose(&c, slot, &o).unwrap());
            // twig slot's location now appears m times in its place
            let mut expected = Vec::new();
            expected.extend_from_slice(&before[..slot - 1]);
            for _ in 0..m {
                expected.push(before[slot - 1].clone());
            }
            expected.extend_from_slice(&before[slot..]);
            assert_eq!(after, expected);
        }
    }

    fn disc1(c: i64, cq: i64, r: i64, rq: i64) -> Disc<Rat> {
        Disc { center: vec![rat(c, cq)], radius: rat(r, rq) }
    }

    #[test]
    fn little_discs_operad_laws_spotcheck() {
        use crate::operad::OperadOps;
        let d: LittleDiscs<Rat> = LittleDiscs::new(1, 6);
        let a = DiscTuple(vec![disc1(-1, 2, 1, 4), disc1(1, 2, 1, 4)]);
        assert!(d.is_element(2, &a));
        let u = d.unit();
        assert_eq!(d.compose(2, &a, &[(1, u.clone()), (1, u.clone())]).unwrap(), a);
        // composition nests discs
        let nested = d.compose(2, &a, &[(2, a.clone()), (1, u)]).unwrap();
        assert_eq!(nested.0.len(), 3);
        assert_eq!(nested.0[0].radius, rat(1, 16));
        assert_eq!(nested.0[0].center, vec![rat(-5, 8)]);
        assert!(d.tuple_is_valid(&nested));
    }

    #[test]
    fn discs_single_vertex_maps_to_corolla_of_centers() {
        use crate::w::WTree;
        let d: LittleDiscs<Rat> = LittleDiscs::new(1, 6);
        let label = DiscTuple(vec![disc1(-1, 2, 1, 4), disc1(1, 2, 1, 4)]);
        let t: WTree<DiscTuple<Rat>, Rat> = WTree::corolla(label, 2);
        let fm = little_discs_to_fm(&d, &t).unwrap();
        assert_eq!(fm.location_count(), 1);
        assert_eq!(fm.groups()[0].0, Point::origin(1));
        match &fm.groups()[0].1 {
            FmTree::Vertex { cloud, .. } => {
                // centers -1/2, 1/2 normalize to -1, 1
                assert_eq!(cloud.points(), &[pt1(rat(-1, 1)), pt1(rat(1, 1))]);
            }
            FmTree::Twig(_) => panic!("expected a screen"),
        }
    }

    #[test]
    fn discs_length_one_edge_nests_a_screen() {
        use crate::w::{WEdge, WNode, WTree};
        let d: LittleDiscs<Rat> = LittleDiscs::new(1, 6);
        let outer = DiscTuple(vec![disc1(-1, 2, 1, 4), disc1(1, 2, 1, 4)]);
        let inner = DiscTuple(vec![disc1(-1, 2, 1, 8), disc1(1, 2, 1, 8)]);
        let t: WTree<DiscTuple<Rat>, Rat> = WTree {
            root: WNode::Vertex {
                label: outer,
                children: vec![
                    WEdge { length: None, node: WNode::Twig(1) },
                    WEdge {
                        length: Some(rat(1, 1)),
                        node: WNode::Vertex {
                            label: inner,
                            children: vec![
                                WEdge { length: None, node: WNode::Twig(2) },
                                WEdge { length: None, node: WNode::Twig(3) },
                            ],
                        },
                    },
                ],
            },
        };
        let fm = little_discs_to_fm(&d, &t).unwrap();
        let (_, tree) = &fm.groups()[0];
        match tree {
            FmTree::Vertex { children, .. } => {
                assert!(matches!(children[0], FmTree::Twig(1)));
                match &children[1] {
                    FmTree::Vertex { cloud, .. } => {
                        assert_eq!(cloud.points(), &[pt1(rat(-1, 1)), pt1(rat(1, 1))]);
                    }
                    FmTree::Twig(_) => panic!("expected nested screen"),
                }
            }
            FmTree::Twig(_) => panic!("expected a screen"),
        }
    }

    #[test]
    fn discs_short_lengths_converge_to_composed_labels() {
        use crate::operad::OperadOps;
        use crate::w::{WEdge, WNode, WTree};
        let d: LittleDiscs<Rat> = LittleDiscs::new(1, 6);
        let outer = DiscTuple(vec![disc1(-1, 2, 1, 4), disc1(1, 2, 1, 4)]);
        let inner = DiscTuple(vec![disc1(-1, 2, 1, 8), disc1(1, 2, 1, 8)]);
        let at_length = |l: Rat| -> FmPoint<Rat> {
            let t = WTree {
                root: WNode::Vertex {
                    label: outer.clone(),
                    children: vec![
                        WEdge { length: None, node: WNode::Twig(1) },
                        WEdge {
                            length: Some(l),
                            node: WNode::Vertex {
                                label: inner.clone(),
                                children: vec![
                                    WEdge { length: None, node: WNode::Twig(2) },
                                    WEdge { length: None, node: WNode::Twig(3) },
                                ],
                            },
                        },
                    ],
                },
            };
            little_discs_to_fm(&d, &t).unwrap()
        };
        // length 0 composes the labels outright
        let composed = d
            .compose(2, &outer, &[(1, d.unit()), (2, inner.clone())])
            .unwrap();
        let direct = little_discs_to_fm(&d, &WTree::corolla(composed, 3)).unwrap();
        assert_eq!(at_length(rat(0, 1)), direct);
        // and short lengths approach it monotonically on a dyadic grid
        let cloud_of = |fm: &FmPoint<Rat>| -> Vec<Point<Rat>> {
            match &fm.groups()[0].1 {
                FmTree::Vertex { cloud, .. } => cloud.points().to_vec(),
                FmTree::Twig(_) => panic!("expected a screen"),
            }
        };
        let target = cloud_of(&direct);
        let mut last: Option<Rat> = None;
        for q in [2i64, 4, 8, 16] {
            let fm = at_length(rat(1, q));
            let got = cloud_of(&fm);
            assert_eq!(got.len(), target.len());
            let dev = got
                .iter()
                .zip(&target)
                .map(|(a, b)| a.linf_dist(b))
                .fold(Rat::from_int(0), |acc, v| if v > acc { v } else { acc });
            if let Some(prev) = last {
                assert!(dev < prev, "deviation should shrink with the length");
            }
            last = Some(dev);
        }
    }

    #[test]
    fn discs_respect_grafting() {
        
        use crate::w::{w_compose, WTree};
        let d: LittleDiscs<Rat> = LittleDiscs::new(1, 8);
        let a = DiscTuple(vec![disc1(-1, 2, 1, 4), disc1(1, 2, 1, 4)]);
        let b = DiscTuple(vec![disc1(-1, 2, 1, 8), disc1(1, 2, 1, 8)]);
        let ta: WTree<DiscTuple<Rat>, Rat> = WTree::corolla(a, 2);
        let tb: WTree<DiscTuple<Rat>, Rat> = WTree::corolla(b, 2);
        let composed_tree = w_compose(&d, &ta, &[WTree::trivial(), tb.clone()]).unwrap();
        let lhs = little_discs_to_fm(&d, &composed_tree).unwrap();
        // composing the images: graft the realization of tb at slot 2
        let fa = little_discs_to_fm(&d, &ta).unwrap();
        let fb = little_discs_to_fm(&d, &tb).unwrap();
        let rhs = fm_compose(&fa, 2, &fb).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn fm_json_round_trip() {
        let mut rng = SplitMix64::new(77);
        let fm: FmPoint<Rat> = random_fm_point(&mut rng, 2, 5, 3, false);
        let json = serde_json::to_string(&fm).unwrap();
        let back: FmPoint<Rat> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, fm);
    }
}

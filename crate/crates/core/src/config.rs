//! Configurations with summable labels: particles in a box carrying
//! nonzero elements of a partial abelian monoid, where coinciding particles
//! merge by summing and base-point labels disappear. The same merge rules
//! act on compactified configuration points through their twigs, and the
//! one-dimensional scanning map is exposed pointwise.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fm::{fm_compose, FmError, FmPoint, FmTree, Point};
use crate::partial::{PartialError, PartialMonoid};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConfigError {
    IrreducibleCollision { position: String, labels: Vec<String> },
    OutOfBox { position: String },
    LabelOutOfRange { label: usize },
    Partial(String),
    Fm(String),
    DimensionMismatch { expected: usize, got: usize },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::IrreducibleCollision { position, labels } => write!(
                f,
                "irreducible collision at {position}: labels {labels:?} do not sum"
            ),
            ConfigError::OutOfBox { position } => {
                write!(f, "particle at {position} lies outside the ambient box")
            }
            ConfigError::LabelOutOfRange { label } => write!(f, "label index {label} out of range"),
            ConfigError::Partial(msg) => write!(f, "{msg}"),
            ConfigError::Fm(msg) => write!(f, "{msg}"),
            ConfigError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<PartialError> for ConfigError {
    fn from(e: PartialError) -> ConfigError {
        ConfigError::Partial(e.to_string())
    }
}

impl From<FmError> for ConfigError {
    fn from(e: FmError) -> ConfigError {
        ConfigError::Fm(e.to_string())
    }
}

/// A product of closed intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmbientBox<S> {
    pub bounds: Vec<(S, S)>,
}

impl<S: Scalar> AmbientBox<S> {
    pub fn unit(dim: usize) -> AmbientBox<S> {
        AmbientBox { bounds: vec![(S::zero(), S::one()); dim] }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn contains(&self, p: &Point<S>) -> bool {
        p.0.iter()
            .zip(&self.bounds)
            .all(|(x, (l, u))| *x >= *l && *x <= *u)
    }
}

/// One boundary face of the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub axis: usize,
    pub upper: bool,
}

/// Particles with labels, an optional ambient box, and a selected set of
/// boundary faces treated as the base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledConfig<S> {
    dim: usize,
    pub particles: Vec<(Point<S>, usize)>,
    pub ambient: Option<AmbientBox<S>>,
    pub relative_faces: Vec<Face>,
}

impl<S: Scalar> LabelledConfig<S> {
    pub fn new(
        dim: usize,
        particles: Vec<(Point<S>, usize)>,
        ambient: Option<AmbientBox<S>>,
        relative_faces: Vec<Face>,
    ) -> Result<LabelledConfig<S>, ConfigError> {
        for (p, _) in &particles {
            if p.dim() != dim {
                return Err(ConfigError::DimensionMismatch { expected: dim, got: p.dim() });
            }
            if let Some(b) = &ambient {
                if !b.contains(p) {
                    return Err(ConfigError::OutOfBox { position: format!("{p:?}") });
                }
            }
        }
        Ok(LabelledConfig { dim, particles, ambient, relative_faces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    /// The multiset of labels, for conservation checks.
    pub fn label_multiset(&self) -> Vec<usize> {
        let mut labels: Vec<usize> = self.particles.iter().map(|(_, l)| *l).collect();
        labels.sort_unstable();
        labels
    }

    fn sorted(mut self) -> LabelledConfig<S> {
        self.particles
            .sort_by(|a, b| a.partial_cmp(b).expect("total order on scalars"));
        self
    }

    /// Is the point inside the box and off the selected faces?
    pub fn in_open_part(&self, p: &Point<S>) -> bool {
        let Some(b) = &self.ambient else {
            return true;
        };
        if !b.contains(p) {
            return false;
        }
        !self.relative_faces.iter().any(|f| {
            let (l, u) = &b.bounds[f.axis];
            let bound = if f.upper { u } else { l };
            p.0[f.axis] == *bound
        })
    }
}

/// Merges coinciding particles whose labels sum (in any order: the labels
/// are abelian) and deletes base-point labels. A collision whose labels do
/// not reduce is not a configuration with summable labels and is rejected
/// with a witness.
pub fn normalize_config<S: Scalar>(
    c: &LabelledConfig<S>,
    a: &PartialMonoid,
) -> Result<LabelledConfig<S>, ConfigError> {
    for (_, l) in &c.particles {
        if *l >= a.size() {
            return Err(ConfigError::LabelOutOfRange { label: *l });
        }
    }
    let mut groups: Vec<(Point<S>, Vec<usize>)> = Vec::new();
    for (p, l) in &c.particles {
        match groups.iter_mut().find(|(q, _)| q == p) {
            Some((_, labels)) => labels.push(*l),
            None => groups.push((p.clone(), vec![*l])),
        }
    }
    let mut particles = Vec::with_capacity(groups.len());
    for (p, labels) in groups {
        match a.fold_labels(&labels)? {
            Some(v) if v == a.zero() => {}
            Some(v) => particles.push((p.clone(), v)),
            None => {
                return Err(ConfigError::IrreducibleCollision {
                    position: format!("{p:?}"),
                    labels: labels.iter().map(|&l| a.name(l).to_string()).collect(),
                })
            }
        }
    }
    Ok(LabelledConfig {
        dim: c.dim,
        particles,
        ambient: c.ambient.clone(),
        relative_faces: c.relative_faces.clone(),
    }
    .sorted())
}

/// A compactified configuration point with a label on every twig.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelledFmPoint<S> {
    pub fm: FmPoint<S>,
    /// `labels[i]` decorates twig `i + 1`.
    pub labels: Vec<usize>,
}

impl<S: Scalar> LabelledFmPoint<S> {
    pub fn new(fm: FmPoint<S>, labels: Vec<usize>) -> Result<LabelledFmPoint<S>, ConfigError> {
        if labels.len() != fm.leaf_count() {
            return Err(ConfigError::DimensionMismatch {
                expected: fm.leaf_count(),
                got: labels.len(),
            });
        }
        Ok(LabelledFmPoint { fm, labels })
    }

    pub fn label_multiset(&self) -> Vec<usize> {
        let mut labels = self.labels.clone();
        labels.sort_unstable();
        labels
    }
}

/// Normalizes a labelled compactified point: a screen whose children are
/// all twigs with summable labels collapses to one twig carrying the sum,
/// and base-point twigs are cut (reprojecting the ambient cloud, and
/// dissolving screens left with one child). Iterates to a fixed point.
pub fn fm_label_normalize<S: Scalar>(
    x: &LabelledFmPoint<S>,
    a: &PartialMonoid,
) -> Result<LabelledFmPoint<S>, ConfigError> {
    let mut current = x.clone();
    loop {
        // cut a base-point twig
        if let Some(slot) = (1..=current.labels.len())
            .find(|&i| current.labels[i - 1] == a.zero())
        {
            let fm = fm_compose(&current.fm, slot, &FmPoint::empty(current.fm.dim()))?;
            let mut labels = current.labels.clone();
            labels.remove(slot - 1);
            current = LabelledFmPoint { fm, labels };
            continue;
        }
        // collapse an all-twig screen with summable labels
        match collapse_one_screen(&current, a)? {
            Some(next) => current = next,
            None => break,
        }
    }
    Ok(current)
}

/// Finds one vertex whose children are all twigs with summable labels and
/// replaces it by a single twig carrying the sum. Returns `None` at a固
/// fixed point.
fn collapse_one_screen<S: Scalar>(
    x: &LabelledFmPoint<S>,
    a: &PartialMonoid,
) -> Result<Option<LabelledFmPoint<S>>, ConfigError> {
    // locate a collapsible screen: returns the sorted twig labels under it
    fn find<S: Scalar>(
        t: &FmTree<S>,
        a: &PartialMonoid,
        labels: &[usize],
    ) -> Option<(Vec<usize>, usize)> {
        match t {
            FmTree::Twig(_) => None,
            FmTree::Vertex { children, .. } => {
                let all_twigs: Option<Vec<usize>> = children
                    .iter()
                    .map(|c| match c {
                        FmTree::Twig(i) => Some(*i),
                        FmTree::Vertex { .. } => None,
                    })
                    .collect();
                if let Some(twigs) = all_twigs {
                    let letter_labels: Vec<usize> =
                        twigs.iter().map(|&i| labels[i - 1]).collect();
                    if let Ok(Some(v)) = a.fold_labels(&letter_labels) {
                        return Some((twigs, v));
                    }
                }
                children.iter().find_map(|c| find(c, a, labels))
            }
        }
    }
    let mut target: Option<(Vec<usize>, usize)> = None;
    for (_, t) in x.fm.groups() {
        if let Some(hit) = find(t, a, &x.labels) {
            target = Some(hit);
            break;
        }
    }
    let Some((twigs, value)) = target else {
        return Ok(None);
    };
    // keep the least twig as the survivor and delete the others from the
    // top down; they all sit above the survivor, so its index is stable
    let survivor = *twigs.iter().min().expect("screen has children");
    let mut current = x.clone();
    let mut to_delete: Vec<usize> = twigs.into_iter().filter(|&i| i != survivor).collect();
    to_delete.sort_unstable_by(|p, q| q.cmp(p));
    for slot in to_delete {
        let fm = fm_compose(&current.fm, slot, &FmPoint::empty(current.fm.dim()))?;
        let mut labels = current.labels.clone();
        labels.remove(slot - 1);
        current = LabelledFmPoint { fm, labels };
    }
    let mut labels = current.labels;
    labels[survivor - 1] = value;
    Ok(Some(LabelledFmPoint { fm: current.fm, labels }))
}

/// Deletes every particle outside the open part `M ∖ N`; the result is the
/// representative of the relative class.
pub fn relative_reduce<S: Scalar>(c: &LabelledConfig<S>) -> LabelledConfig<S> {
    let particles = c
        .particles
        .iter()
        .filter(|(p, _)| c.in_open_part(p))
        .cloned()
        .collect();
    LabelledConfig {
        dim: c.dim,
        particles,
        ambient: c.ambient.clone(),
        relative_faces: c.relative_faces.clone(),
    }
    .sorted()
}

/// Pointwise scanning on the unit interval: translate the (single)
/// coordinate by `2t - 1`, then reduce relative to both endpoints. The
/// result is the fiber of the scanning loop at time `t`.
pub fn scan_1d<S: Scalar>(
    c: &LabelledConfig<S>,
    t: &S,
) -> Result<LabelledConfig<S>, ConfigError> {
    if c.dim != 1 {
        return Err(ConfigError::DimensionMismatch { expected: 1, got: c.dim });
    }
    let shift = S::from_int(2) * t.clone() - S::one();
    let particles: Vec<(Point<S>, usize)> = c
        .particles
        .iter()
        .map(|(p, l)| (Point(vec![p.0[0].clone() + shift.clone()]), *l))
        .collect();
    let shifted = LabelledConfig {
        dim: 1,
        particles,
        ambient: Some(AmbientBox::unit(1)),
        relative_faces: vec![
            Face { axis: 0, upper: false },
            Face { axis: 0, upper: true },
        ],
    };
    // outside-the-box particles are also forgotten by the projection
    let particles = shifted
        .particles
        .iter()
        .filter(|(p, _)| {
            let x = &p.0[0];
            *x > S::zero() && *x < S::one()
        })
        .cloned()
        .collect();
    Ok(LabelledConfig { particles, ..shifted }.sorted())
}

#[derive(Serialize, Deserialize)]
struct ConfigJson {
    dim: usize,
    points: Vec<Vec<String>>,
    labels: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r#box: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    relative_faces: Vec<Face>,
}

impl<S: Scalar> Serialize for LabelledConfig<S> {
    fn serialize<Sz: serde::Serializer>(&self, ser: Sz) -> Result<Sz::Ok, Sz::Error> {
        ConfigJson {
            dim: self.dim,
            points: self
                .particles
                .iter()
                .map(|(p, _)| p.0.iter().map(Scalar::to_ratio_string).collect())
                .collect(),
            labels: self.particles.iter().map(|(_, l)| *l).collect(),
            r#box: self.ambient.as_ref().map(|b| {
                b.bounds
                    .iter()
                    .map(|(l, u)| (l.to_ratio_string(), u.to_ratio_string()))
                    .collect()
            }),
            relative_faces: self.relative_faces.clone(),
        }
        .serialize(ser)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for LabelledConfig<S> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let json = ConfigJson::deserialize(de)?;
        if json.points.len() != json.labels.len() {
            return Err(D::Error::custom("points and labels differ in length"));
        }
        let parse = |s: &String| -> Result<S, D::Error> {
            S::parse_ratio(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
        };
        let particles = json
            .points
            .iter()
            .zip(&json.labels)
            .map(|(coords, &l)| {
                let p = coords.iter().map(&parse).collect::<Result<Vec<S>, _>>()?;
                Ok((Point(p), l))
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        let ambient = match &json.r#box {
            None => None,
            Some(bounds) => Some(AmbientBox {
                bounds: bounds
                    .iter()
                    .map(|(l, u)| Ok((parse(l)?, parse(u)?)))
                    .collect::<Result<Vec<_>, D::Error>>()?,
            }),
        };
        LabelledConfig::new(json.dim, particles, ambient, json.relative_faces)
            .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fm::normalize_cloud;
    use crate::partial::{complete_monoid, GrothendieckGroup};
    use crate::rng::SplitMix64;
    use crate::Rat;

    fn rat(p: i64, q: i64) -> Rat {
        Rat::from_ratio(p, q)
    }

    fn pt1(x: Rat) -> Point<Rat> {
        Point(vec![x])
    }

    fn free_config(particles: Vec<(Point<Rat>, usize)>) -> LabelledConfig<Rat> {
        LabelledConfig::new(1, particles, None, vec![]).unwrap()
    }

    #[test]
    fn coincident_summable_labels_merge() {
        let a = PartialMonoid::n_vee_n(6);
        // two particles at 3/10 with labels (1,0) and (2,0): they merge
        let c = free_config(vec![(pt1(rat(3, 10)), 1), (pt1(rat(3, 10)), 2)]);
        let n = normalize_config(&c, &a).unwrap();
        assert_eq!(n.particles, vec![(pt1(rat(3, 10)), 3)]);
    }

    #[test]
    fn base_point_labels_are_deleted() {
        let a = PartialMonoid::n_vee_n(6);
        let c = free_config(vec![(pt1(rat(1, 2)), 0), (pt1(rat(1, 4)), 2)]);
        let n = normalize_config(&c, &a).unwrap();
        assert_eq!(n.particles, vec![(pt1(rat(1, 4)), 2)]);
    }

    #[test]
    fn distinct_points_are_fixed() {
        let a = PartialMonoid::n_vee_n(6);
        let c = free_config(vec![(pt1(rat(1, 4)), 1), (pt1(rat(3, 4)), 2)]);
        assert_eq!(normalize_config(&c, &a).unwrap(), c);
    }

    #[test]
    fn irreducible_collision_is_rejected() {
        let a = PartialMonoid::n_vee_n(6);
        // labels from different branches cannot merge
        let c = free_config(vec![(pt1(rat(1, 2)), 1), (pt1(rat(1, 2)), 7)]);
        assert!(matches!(
            normalize_config(&c, &a),
            Err(ConfigError::IrreducibleCollision { .. })
        ));
    }

    #[test]
    fn normalization_is_confluent_on_small_collisions() {
        // every merge order of up to 4 coincident particles reaches the
        // same normal form, over both label monoids
        for a in [PartialMonoid::n_vee_n(8), PartialMonoid::cyclic(4)] {
            let letters: Vec<usize> = (1..a.size().min(5)).collect();
            let mut stacks: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..4 {
                let mut next = Vec::new();
                for prefix in &stacks {
                    for &l in &letters {
                        let mut row = prefix.clone();
                        row.push(l);
                        next.push(row);
                    }
                }
                stacks = next;
            }
            for labels in stacks {
                // reference: fold via the monoid's exhaustive search
                let folded = a.fold_labels(&labels);
                let c = free_config(
                    labels.iter().map(|&l| (pt1(rat(1, 3)), l)).collect(),
                );
                match normalize_config(&c, &a) {
                    Ok(n) => {
                        let expected = folded.unwrap().unwrap();
                        if expected == a.zero() {
                            assert!(n.is_empty());
                        } else {
                            assert_eq!(n.particles, vec![(pt1(rat(1, 3)), expected)]);
                        }
                    }
                    Err(ConfigError::IrreducibleCollision { .. }) => {
                        assert_eq!(folded.unwrap(), None);
                    }
                    Err(other) => panic!("unexpected error {other}"),
                }
            }
        }
    }

    #[test]
    fn conservation_in_grothendieck_group() {
        let a = PartialMonoid::n_vee_n(8);
        let g = GrothendieckGroup::new(&a);
        let c = free_config(vec![
            (pt1(rat(1, 2)), 1),
            (pt1(rat(1, 2)), 2),
            (pt1(rat(1, 4)), 7),
            (pt1(rat(3, 4)), 0),
        ]);
        let n = normalize_config(&c, &a).unwrap();
        assert!(g.same_class(&c.label_multiset(), &n.label_multiset()));
        // and particle count never grows
        assert!(n.len() <= c.len());
    }

    fn screen_over(labels: &[usize]) -> LabelledFmPoint<Rat> {
        let k = labels.len();
        let pts: Vec<Point<Rat>> = (0..k)
            .map(|i| pt1(rat(2 * i as i64 - (k as i64 - 1), k as i64)))
            .collect();
        let (_, _, cloud) = normalize_cloud(&pts).unwrap();
        let fm = FmPoint::new(
            1,
            vec![(
                pt1(rat(0, 1)),
                FmTree::Vertex {
                    cloud,
                    children: (1..=k).map(FmTree::Twig).collect(),
                },
            )],
        )
        .unwrap();
        LabelledFmPoint::new(fm, labels.to_vec()).unwrap()
    }

    #[test]
    fn screen_with_base_point_twig_reduces_to_single_twig() {
        let a = PartialMonoid::n_vee_n(6);
        let x = screen_over(&[2, 0]);
        let n = fm_label_normalize(&x, &a).unwrap();
        assert_eq!(n.labels, vec![2]);
        assert_eq!(n.fm.leaf_count(), 1);
        assert!(matches!(n.fm.groups()[0].1, FmTree::Twig(1)));
        // the location survives
        assert_eq!(n.fm.groups()[0].0, pt1(rat(0, 1)));
    }

    #[test]
    fn screen_with_summable_labels_collapses() {
        let a = PartialMonoid::n_vee_n(6);
        let x = screen_over(&[1, 2]);
        let n = fm_label_normalize(&x, &a).unwrap();
        assert_eq!(n.labels, vec![3]);
        assert!(matches!(n.fm.groups()[0].1, FmTree::Twig(1)));
    }

    #[test]
    fn nested_screens_collapse_iteratively() {
        let a = PartialMonoid::n_vee_n(8);
        // inner screen with labels (1,0),(2,0); outer pairs it with (3,0)
        let inner_pts = vec![pt1(rat(-1, 1)), pt1(rat(1, 1))];
        let (_, _, inner_cloud) = normalize_cloud(&inner_pts).unwrap();
        let outer_pts = vec![pt1(rat(-1, 1)), pt1(rat(1, 1))];
        let (_, _, outer_cloud) = normalize_cloud(&outer_pts).unwrap();
        let fm = FmPoint::new(
            1,
            vec![(
                pt1(rat(0, 1)),
                FmTree::Vertex {
                    cloud: outer_cloud,
                    children: vec![
                        FmTree::Vertex {
                            cloud: inner_cloud,
                            children: vec![FmTree::Twig(1), FmTree::Twig(2)],
                        },
                        FmTree::Twig(3),
                    ],
                },
            )],
        )
        .unwrap();
        let x = LabelledFmPoint::new(fm, vec![1, 2, 3]).unwrap();
        let n = fm_label_normalize(&x, &PartialMonoid::n_vee_n(8)).unwrap();
        let _ = a;
        // (1,0)+(2,0) = (3,0), then (3,0)+(3,0) = (6,0)
        assert_eq!(n.labels, vec![6]);
        assert_eq!(n.fm.leaf_count(), 1);
    }

    #[test]
    fn collapse_to_point_matches_completion_class() {
        // the discrete shadow of the retraction onto the completion: merge
        // everything at one location and compare with the word's class
        let a = PartialMonoid::cyclic(4);
        let completion = complete_monoid(&a, 6).unwrap();
        let mut rng = SplitMix64::new(5);
        for _ in 0..20 {
            let k = 2 + rng.index(3);
            let labels: Vec<usize> = (0..k).map(|_| 1 + rng.index(3)).collect();
            let x = screen_over(&labels);
            let n = fm_label_normalize(&x, &a).unwrap();
            let word: Vec<usize> = labels.clone();
            let class = completion.class_of(&word).unwrap();
            match n.labels.as_slice() {
                [] => assert_eq!(class, completion.class_of(&vec![]).unwrap()),
                [v] => assert_eq!(class, completion.class_of(&vec![*v]).unwrap()),
                more => panic!("total monoid should fully collapse, got {more:?}"),
            }
        }
    }

    #[test]
    fn relative_reduce_examples() {
        let the_box = AmbientBox::unit(1);
        let faces = vec![Face { axis: 0, upper: false }, Face { axis: 0, upper: true }];
        // all particles on the boundary: empty configuration
        let c = LabelledConfig::new(
            1,
            vec![(pt1(rat(0, 1)), 1), (pt1(rat(1, 1)), 2)],
            Some(the_box.clone()),
            faces.clone(),
        )
        .unwrap();
        assert!(relative_reduce(&c).is_empty());
        // no selected faces: identity
        let c2 = LabelledConfig::new(
            1,
            vec![(pt1(rat(0, 1)), 1), (pt1(rat(1, 2)), 2)],
            Some(the_box.clone()),
            vec![],
        )
        .unwrap();
        assert_eq!(relative_reduce(&c2), c2);
        // mixed: only the interior particle survives
        let c3 = LabelledConfig::new(
            1,
            vec![(pt1(rat(0, 1)), 1), (pt1(rat(1, 2)), 2)],
            Some(the_box),
            faces,
        )
        .unwrap();
        let r = relative_reduce(&c3);
        assert_eq!(r.particles, vec![(pt1(rat(1, 2)), 2)]);
        // idempotent
        assert_eq!(relative_reduce(&r), r);
    }

    #[test]
    fn scan_endpoints_and_center() {
        let c = LabelledConfig::new(
            1,
            vec![(pt1(rat(1, 4)), 1), (pt1(rat(2, 3)), 2)],
            Some(AmbientBox::unit(1)),
            vec![],
        )
        .unwrap();
        let at0 = scan_1d(&c, &rat(0, 1)).unwrap();
        assert!(at0.is_empty());
        let at1 = scan_1d(&c, &rat(1, 1)).unwrap();
        assert!(at1.is_empty());
        let mid = scan_1d(&c, &rat(1, 2)).unwrap();
        assert_eq!(mid.particles, c.particles);
    }

    #[test]
    fn config_json_round_trip() {
        let c = LabelledConfig::new(
            1,
            vec![(pt1(rat(1, 4)), 1)],
            Some(AmbientBox::unit(1)),
            vec![Face { axis: 0, upper: true }],
        )
        .unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: LabelledConfig<Rat> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}

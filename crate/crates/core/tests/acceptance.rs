//! Acceptance suite: one test per criterion, each printing a pass line.
//! Every tolerance, count, and runtime budget is pinned here.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use opconf::fm::{
    blow_down, cluster, fm_compose, random_fm_point, random_genuine_config, resolve, FmPoint,
};
use opconf::homology::{bar_homology, order_complex, HomologyGroup, Matrix};
use opconf::ChainComplex;
use opconf::modules::{
    compare_triple_associativity, random_partial_left, random_partial_right, PartialLeftModule,
    PartialRightModule,
};
use opconf::operad::{
    check_operad_axioms, free_operad, semidirect_product, AssocOperad, ComOperad, FiniteGroup,
    FiniteGroupAction, GenTree, OperadOps, SetOperad, TableOperad,
};
use opconf::partial::{complete_monoid, GrothendieckGroup, PartialMonoid};
use opconf::perm::Perm;
use opconf::rng::SplitMix64;
use opconf::scalar::Scalar;
use opconf::sigma::SigmaSet;
use opconf::tree::enumerate_trees;
use opconf::w::{f_vector, face_poset, merge_lengths, normalize_wtree, WEdge, WNode, WTree};
use opconf::{Int, Rat};

fn rat(p: i64, q: i64) -> Rat {
    Rat::from_ratio(p, q)
}

fn pass(id: usize, what: &str, started: Instant, budget_secs: u64) {
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs() < budget_secs,
        "criterion {id} exceeded its {budget_secs}s budget: {elapsed:?}"
    );
    println!("PASS criterion {id}: {what} ({elapsed:?})");
}

#[test]
fn criterion_01_associahedron_face_counts() {
    let t0 = Instant::now();
    let totals = [1usize, 3, 11, 45, 197];
    for (k, &want) in (2..=6).zip(totals.iter()) {
        let poset = face_poset(k).unwrap();
        assert_eq!(poset.len(), want, "total faces of K_{k}");
    }
    assert_eq!(f_vector(&face_poset(4).unwrap()), vec![5, 5, 1]);
    assert_eq!(f_vector(&face_poset(5).unwrap()), vec![14, 21, 9, 1]);
    let catalan = [1usize, 1, 2, 5, 14, 42, 132, 429];
    for k in 2..=8 {
        let vertices = enumerate_trees(k, true, 2, 4 * k)
            .unwrap()
            .into_iter()
            .filter(|t| t.internal_edge_count() == k - 2)
            .count();
        assert_eq!(vertices, catalan[k - 1], "vertices of K_{k}");
    }
    pass(1, "associahedron face counts and Catalan vertices", t0, 10);
}

#[test]
fn criterion_02_sphere_boundary() {
    let t0 = Instant::now();
    // the boundary of the 3-dimensional associahedron is a 2-sphere
    let boundary_k5 = face_poset(5).unwrap().boundary();
    let complex: ChainComplex = order_complex(&boundary_k5);
    let h = complex.homology();
    assert_eq!(
        h.groups,
        vec![HomologyGroup::free(1), HomologyGroup::free(0), HomologyGroup::free(1)],
        "boundary of K_5"
    );
    // and the boundary of the pentagon is a circle
    let boundary_k4 = face_poset(4).unwrap().boundary();
    let complex: ChainComplex = order_complex(&boundary_k4);
    let h = complex.homology();
    assert_eq!(h.groups, vec![HomologyGroup::free(1), HomologyGroup::free(1)]);
    pass(2, "boundary of K5 is a 2-sphere, boundary of K4 a circle", t0, 60);
}

#[test]
fn criterion_03_w_relations() {
    let t0 = Instant::now();
    // every reduced fraction in [0,1] with denominator at most 12
    let mut grid: Vec<Rat> = Vec::new();
    for q in 1..=12i64 {
        for p in 0..=q {
            let v = rat(p, q);
            if !grid.contains(&v) {
                grid.push(v);
            }
        }
    }
    assert_eq!(grid.len(), 47);
    for s in &grid {
        assert_eq!(merge_lengths(&rat(0, 1), s).unwrap(), *s, "unit");
        assert_eq!(merge_lengths(&rat(1, 1), s).unwrap(), rat(1, 1), "absorbing");
        for t in &grid {
            let st = merge_lengths(s, t).unwrap();
            assert_eq!(st, merge_lengths(t, s).unwrap(), "commutativity");
            for u in &grid {
                assert_eq!(
                    merge_lengths(&st, u).unwrap(),
                    merge_lengths(s, &merge_lengths(t, u).unwrap()).unwrap(),
                    "associativity"
                );
            }
        }
    }

    // confluence of the tree relations over every application order, on a
    // two-generator label operad and every tree with up to 3 internal edges
    let mut names = vec![Vec::new(), Vec::new(), Vec::new()];
    names[2] = vec!["a".into(), "a'".into(), "b".into(), "b'".into()];
    let mut gen_action = vec![Vec::new(), Vec::new(), Vec::new()];
    gen_action[2] = vec![vec![1, 0, 3, 2]];
    let gens = SigmaSet::from_parts(names, gen_action).unwrap();
    let op = free_operad(gens, 16, 10);
    let g = |i: usize| op.elems(2)[i].clone();
    let lengths = [rat(0, 1), rat(1, 2), rat(1, 1)];
    let vertex = |label: GenTree, children: Vec<WEdge<GenTree, Rat>>| WNode::Vertex {
        label,
        children,
    };
    let internal =
        |l: Rat, node: WNode<GenTree, Rat>| WEdge { length: Some(l), node };
    let twig = |i: usize| WEdge::<GenTree, Rat> { length: None, node: WNode::Twig(i) };
    let mut cases: Vec<WTree<GenTree, Rat>> = Vec::new();
    for l1 in &lengths {
        for l2 in &lengths {
            // two edges under one root
            cases.push(WTree {
                root: vertex(
                    g(0),
                    vec![
                        internal(l1.clone(), vertex(g(2), vec![twig(1), twig(2)])),
                        internal(l2.clone(), vertex(g(1), vec![twig(3), twig(4)])),
                    ],
                ),
            });
            for l3 in &lengths {
                // a chain through a unit vertex plus a deep edge
                cases.push(WTree {
                    root: vertex(
                        g(0),
                        vec![
                            twig(1),
                            internal(
                                l1.clone(),
                                vertex(
                                    GenTree::Leaf(1),
                                    vec![internal(
                                        l2.clone(),
                                        vertex(
                                            g(2),
                                            vec![
                                                internal(
                                                    l3.clone(),
                                                    vertex(g(3), vec![twig(2), twig(3)]),
                                                ),
                                                twig(4),
                                            ],
                                        ),
                                    )],
                                ),
                            ),
                        ],
                    ),
                });
                // three stacked internal edges
                cases.push(WTree {
                    root: vertex(
                        g(0),
                        vec![
                            internal(
                                l1.clone(),
                                vertex(
                                    g(1),
                                    vec![
                                        internal(
                                            l2.clone(),
                                            vertex(
                                                g(2),
                                                vec![
                                                    twig(1),
                                                    internal(
                                                        l3.clone(),
                                                        vertex(g(0), vec![twig(2), twig(3)]),
                                                    ),
                                                ],
                                            ),
                                        ),
                                        twig(4),
                                    ],
                                ),
                            ),
                            twig(5),
                        ],
                    ),
                });
            }
        }
    }
    let mut violations = 0usize;
    for case in &cases {
        let target = normalize_wtree(&op, case).unwrap();
        violations += explore_orders(&op, case.root.clone(), &target);
    }
    assert_eq!(violations, 0, "normalization must be order-independent");
    pass(3, "edge-length algebra and rewrite confluence", t0, 60);
}

/// Applies every applicable relation instance in every order; counts the
/// maximal paths that fail to reach `target`.
fn explore_orders(
    op: &opconf::operad::FreeOperad,
    node: WNode<GenTree, Rat>,
    target: &WTree<GenTree, Rat>,
) -> usize {
    let mut nexts = single_rewrites(op, &node);
    if let WNode::Vertex { label, children } = &node {
        if children.len() == 1 && *label == op.unit() {
            nexts.push(children[0].node.clone());
        }
    }
    if nexts.is_empty() {
        let finished = normalize_wtree(op, &WTree { root: node }).unwrap();
        return usize::from(&finished != target);
    }
    nexts.into_iter().map(|n| explore_orders(op, n, target)).sum()
}

fn single_rewrites(
    op: &opconf::operad::FreeOperad,
    node: &WNode<GenTree, Rat>,
) -> Vec<WNode<GenTree, Rat>> {
    let mut out = Vec::new();
    let WNode::Vertex { label, children } = node else {
        return out;
    };
    for (i, e) in children.iter().enumerate() {
        if let (Some(l), WNode::Vertex { label: cl, children: grand }) = (&e.length, &e.node) {
            if *l == rat(0, 1) {
                let args: Vec<(usize, GenTree)> = (0..children.len())
                    .map(|j| {
                        if j == i {
                            (grand.len(), cl.clone())
                        } else {
                            (1, op.unit())
                        }
                    })
                    .collect();
                let composed = op.compose(children.len(), label, &args).unwrap();
                let mut cs = Vec::new();
                for (j, c) in children.iter().enumerate() {
                    if j == i {
                        cs.extend(grand.clone());
                    } else {
                        cs.push(c.clone());
                    }
                }
                out.push(WNode::Vertex { label: composed, children: cs });
            }
            if grand.len() == 1 && *cl == op.unit() {
                let inner = &grand[0];
                let new_edge = match (&inner.length, &inner.node) {
                    (Some(t), WNode::Vertex { .. }) => WEdge {
                        length: Some(merge_lengths(l, t).unwrap()),
                        node: inner.node.clone(),
                    },
                    (None, WNode::Twig(_)) => WEdge { length: None, node: inner.node.clone() },
                    _ => unreachable!(),
                };
                let mut cs = children.clone();
                cs[i] = new_edge;
                out.push(WNode::Vertex { label: label.clone(), children: cs });
            }
        }
        for sub in single_rewrites(op, &e.node) {
            let mut cs = children.clone();
            cs[i] = WEdge { length: e.length.clone(), node: sub };
            out.push(WNode::Vertex { label: label.clone(), children: cs });
        }
    }
    out
}

#[test]
fn criterion_04_operad_axiom_suites() {
    let t0 = Instant::now();
    // the unpointed truncations keep the exhaustive instance spaces finite
    // at arity 5 (the arity-0 point multiplies them beyond reach)
    let ass = AssocOperad::without_nullary(5);
    let report = check_operad_axioms(&ass, u64::MAX, 0);
    assert!(!report.sampled && report.ok(), "Ass@5: {:?}", report.violations);

    let com = ComOperad::without_nullary(5);
    let report = check_operad_axioms(&com, u64::MAX, 0);
    assert!(!report.sampled && report.ok(), "Com@5: {:?}", report.violations);

    let free = free_operad(SigmaSet::regular(2), 8, 5);
    let report = check_operad_axioms(&free, u64::MAX, 0);
    assert!(!report.sampled && report.ok(), "free@5: {:?}", report.violations);

    let z2 = FiniteGroup::cyclic(2);
    let ass3 = TableOperad::tabulate(&AssocOperad::without_nullary(3));
    let sd = semidirect_product(&ass3, &FiniteGroupAction::trivial(z2.clone(), &ass3)).unwrap();
    let report = check_operad_axioms(&sd, u64::MAX, 0);
    assert!(!report.sampled && report.ok(), "Ass@3 ⋊ Z/2: {:?}", report.violations);

    let com4 = TableOperad::tabulate(&ComOperad::without_nullary(4));
    let sd = semidirect_product(&com4, &FiniteGroupAction::trivial(z2, &com4)).unwrap();
    let report = check_operad_axioms(&sd, u64::MAX, 0);
    assert!(!report.sampled && report.ok(), "Com@4 ⋊ Z/2: {:?}", report.violations);

    pass(4, "exhaustive operad law suites", t0, 60);
}

#[test]
fn criterion_05_tensor_associativity() {
    let t0 = Instant::now();
    let mut rng = SplitMix64::new(1105);
    let mut done = 0usize;
    while done < 25 {
        let f = match done % 3 {
            0 => TableOperad::tabulate(&ComOperad::without_nullary(2)),
            1 => TableOperad::tabulate(&ComOperad::without_nullary(3)),
            _ => TableOperad::tabulate(&AssocOperad::without_nullary(2)),
        };
        let bound = f.max_arity().min(2);
        let a = match rng.below(3) {
            0 => PartialRightModule::total_on_operad(&f, bound),
            1 => PartialRightModule::minimal(f.sigma(), &f, bound),
            _ => random_partial_right(
                &SigmaSet::trivial(&[0, 2, 1]),
                &f,
                bound,
                &mut rng,
                6,
            ),
        };
        let c = match rng.below(3) {
            0 => PartialLeftModule::total_on_operad(&f, bound),
            1 => PartialLeftModule::minimal(&f, &SigmaSet::regular(2), bound),
            _ => random_partial_left(&f, &SigmaSet::trivial(&[0, 1, 2]), bound, &mut rng, 6),
        };
        let cmp = compare_triple_associativity(&f, &a, &c, bound)
            .unwrap_or_else(|e| panic!("instance {done}: {e}"));
        assert_eq!(cmp.left_counts, cmp.right_counts, "instance {done}");
        // the matching really is a bijection on every arity
        for (n, bij) in cmp.bijections.iter().enumerate() {
            let mut seen: Vec<usize> = bij.clone();
            seen.sort_unstable();
            seen.dedup();
            assert_eq!(seen.len(), cmp.right_counts[n], "instance {done} arity {n}");
        }
        done += 1;
    }
    pass(5, "tensor associativity on 25 randomized instances", t0, 120);
}

#[test]
fn criterion_06_completion() {
    let t0 = Instant::now();
    // wedge of naturals at weight 6: normal forms realize the pairs
    let a = PartialMonoid::n_vee_n(6);
    let completion = complete_monoid(&a, 6).unwrap();
    assert!(completion.confluence_violations.is_empty());
    let mut seen: Vec<(u64, u64)> = Vec::new();
    for nf in &completion.normal_forms {
        // a normal form holds at most one element per branch
        let mut p = 0u64;
        let mut q = 0u64;
        for &letter in nf {
            let height = a.weight(letter);
            if letter <= 6 {
                assert_eq!(p, 0, "two left-branch letters survived in {nf:?}");
                p = height;
            } else {
                assert_eq!(q, 0, "two right-branch letters survived in {nf:?}");
                q = height;
            }
        }
        assert!(p + q <= 6);
        assert!(!seen.contains(&(p, q)), "duplicate image ({p},{q})");
        seen.push((p, q));
    }
    let expected: Vec<(u64, u64)> = {
        let mut v = vec![(0, 0)];
        for p in 0..=6u64 {
            for q in 0..=6u64 {
                if (1..=6).contains(&(p + q)) {
                    v.push((p, q));
                }
            }
        }
        v
    };
    assert_eq!(seen.len(), expected.len());
    for e in &expected {
        assert!(seen.contains(e), "missing image {e:?}");
    }
    assert_eq!(completion.normal_forms.len(), 28);

    // total monoids complete to themselves
    for m in [2usize, 4, 5] {
        let total = PartialMonoid::cyclic(m);
        let c = complete_monoid(&total, 5).unwrap();
        assert!(c.confluence_violations.is_empty());
        assert_eq!(c.class_count(), m);
        assert!(c.normal_forms.iter().all(|w| w.len() <= 1));
    }

    // no confluence violations across the example suite (the weight bound
    // stays within the carrier height, so in-bound merges never escape)
    for (a, bound) in [
        (PartialMonoid::n_vee_n(1), 1),
        (PartialMonoid::n_vee_n(4), 4),
        (PartialMonoid::n_vee_n(8), 6),
        (PartialMonoid::pointed(2), 6),
        (PartialMonoid::pointed(3), 6),
        (PartialMonoid::cyclic(3), 6),
    ] {
        let c = complete_monoid(&a, bound).unwrap();
        assert!(c.confluence_violations.is_empty());
    }
    pass(6, "bounded completions and confluence", t0, 60);
}

#[test]
fn criterion_07_fm_roundtrip() {
    let t0 = Instant::now();
    let theta = rat(1, 10);
    // the recorded bound: epsilon = theta^2 / 16
    let eps = rat(1, 1600);
    let mut rng = SplitMix64::new(707);
    for case in 0..120 {
        let dim = 1 + rng.index(3);
        let leaves = 2 + rng.index(7);
        let fm: FmPoint<Rat> = random_fm_point(&mut rng, dim, leaves, 3, false);
        assert!(fm.leaf_count() <= 8 && fm.max_depth() <= 3);
        let _ = case;
        let resolved = resolve(&fm, &eps).unwrap();
        let back = cluster(&resolved, &theta).unwrap();
        assert_eq!(back, fm, "roundtrip case {case}");
    }
    for case in 0..100 {
        let dim = 1 + rng.index(3);
        let count = 1 + rng.index(8);
        let x = random_genuine_config::<Rat>(&mut rng, dim, count);
        let fm = x.as_fm_point().unwrap();
        assert_eq!(blow_down(&fm), x.points(), "blow-down case {case}");
    }
    pass(7, "cluster∘resolve and blow-down∘inclusion are identities", t0, 120);
}

#[test]
fn criterion_08_right_module_laws() {
    let t0 = Instant::now();
    let mut rng = SplitMix64::new(808);
    let unit = |dim: usize| -> FmPoint<Rat> {
        FmPoint::new(dim, vec![(opconf::fm::Point::origin(dim), opconf::fm::FmTree::Twig(1))])
            .unwrap()
    };
    for case in 0..100 {
        let dim = 1 + rng.index(3);
        let leaves = 2 + rng.index(4);
        let c: FmPoint<Rat> = random_fm_point(&mut rng, dim, leaves, 2, false);
        let k = c.leaf_count();
        // unit law
        let slot = 1 + rng.index(k);
        assert_eq!(fm_compose(&c, slot, &unit(dim)).unwrap(), c, "unit case {case}");
        // nested associativity
        let b_leaves = 1 + rng.index(3);
        let b: FmPoint<Rat> = random_fm_point(&mut rng, dim, b_leaves, 2, true);
        let d_leaves = 1 + rng.index(2);
        let d: FmPoint<Rat> = random_fm_point(&mut rng, dim, d_leaves, 2, true);
        let i = 1 + rng.index(k);
        let j = 1 + rng.index(b.leaf_count());
        let lhs = fm_compose(&fm_compose(&c, i, &b).unwrap(), i + j - 1, &d).unwrap();
        let rhs = fm_compose(&c, i, &fm_compose(&b, j, &d).unwrap()).unwrap();
        assert_eq!(lhs, rhs, "nested case {case}");
        // disjoint slots commute
        if k >= 2 {
            let i = 1 + rng.index(k - 1);
            let j = i + 1 + rng.index(k - i);
            let m = b.leaf_count();
            let one = fm_compose(&fm_compose(&c, i, &b).unwrap(), j + m - 1, &d).unwrap();
            let two = fm_compose(&fm_compose(&c, j, &d).unwrap(), i, &b).unwrap();
            assert_eq!(one, two, "disjoint case {case}");
        }
    }
    pass(8, "module laws for composition onto configuration points", t0, 120);
}

#[test]
fn criterion_09_label_normalization() {
    let t0 = Instant::now();
    for a in [PartialMonoid::n_vee_n(16), PartialMonoid::cyclic(4)] {
        let g = GrothendieckGroup::new(&a);
        // letters of weight at most 4: four of them always sum within the
        // carrier, so the truncation cannot fake a divergence
        let letters: Vec<usize> = (1..a.size()).filter(|&l| a.weight(l) <= 4).collect();
        let mut all: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..4 {
            let mut next = Vec::new();
            for prefix in &all {
                for &l in &letters {
                    if prefix.last().map_or(true, |&last| l >= last) {
                        let mut row = prefix.clone();
                        row.push(l);
                        next.push(row);
                    }
                }
            }
            all = next;
            // every merge order of this multiset ends at the same place
            for word in &all {
                let outcomes = all_merge_outcomes(&a, word);
                assert!(
                    outcomes.len() <= 1,
                    "merge orders diverge on {word:?}: {outcomes:?}"
                );
                // conservation along every single step
                check_conservation(&a, &g, word);
            }
        }
    }
    pass(9, "collision merges are confluent and conservative", t0, 120);
}

/// Fully reduced outcomes over all merge orders (sorted multisets).
fn all_merge_outcomes(a: &PartialMonoid, word: &[usize]) -> Vec<Vec<usize>> {
    let mut outcomes: Vec<Vec<usize>> = Vec::new();
    let mut stack = vec![word.to_vec()];
    let mut seen: Vec<Vec<usize>> = Vec::new();
    while let Some(w) = stack.pop() {
        if seen.contains(&w) {
            continue;
        }
        seen.push(w.clone());
        let mut reduced = false;
        for i in 0..w.len() {
            for j in 0..w.len() {
                if i == j {
                    continue;
                }
                if let Some(s) = a.sum(w[i], w[j]) {
                    reduced = true;
                    let mut next: Vec<usize> = w
                        .iter()
                        .enumerate()
                        .filter(|&(t, _)| t != i && t != j)
                        .map(|(_, &v)| v)
                        .collect();
                    if s != a.zero() {
                        next.push(s);
                    }
                    next.sort_unstable();
                    stack.push(next);
                }
            }
        }
        if !reduced && !outcomes.contains(&w) {
            outcomes.push(w);
        }
    }
    outcomes
}

fn check_conservation(a: &PartialMonoid, g: &GrothendieckGroup, word: &[usize]) {
    for i in 0..word.len() {
        for j in 0..word.len() {
            if i == j {
                continue;
            }
            if let Some(s) = a.sum(word[i], word[j]) {
                let mut next: Vec<usize> = word
                    .iter()
                    .enumerate()
                    .filter(|&(t, _)| t != i && t != j)
                    .map(|(_, &v)| v)
                    .collect();
                if s != a.zero() {
                    next.push(s);
                }
                assert!(
                    g.same_class(word, &next),
                    "conservation fails on {word:?} -> {next:?}"
                );
            }
        }
    }
}

#[test]
fn criterion_10_bar_homology() {
    let t0 = Instant::now();
    let z2 = opconf::partial::FiniteMonoid::cyclic(2);
    let h = bar_homology(&z2, 5).unwrap();
    let rendered: Vec<String> = h.groups.iter().map(|gr| gr.to_string()).collect();
    assert_eq!(rendered, vec!["Z", "Z/2", "0", "Z/2", "0", "Z/2"]);
    assert_eq!(h, periodic_resolution_homology(2, 5));

    let z3 = opconf::partial::FiniteMonoid::cyclic(3);
    let h = bar_homology(&z3, 4).unwrap();
    let rendered: Vec<String> = h.groups.iter().map(|gr| gr.to_string()).collect();
    assert_eq!(rendered, vec!["Z", "Z/3", "0", "Z/3", "0"]);
    assert_eq!(h, periodic_resolution_homology(3, 4));
    pass(10, "bar homology of cyclic groups against the periodic resolution", t0, 120);
}

/// Independent oracle: homology of `Z ←0― Z ←m― Z ←0― ..`, one degree past
/// the bound and truncated.
fn periodic_resolution_homology(m: i64, q_max: usize) -> opconf::homology::HomologyResult {
    let ranks = vec![1usize; q_max + 2];
    let mut boundaries: Vec<Matrix<Int>> = vec![Matrix::zero(0, 1)];
    for q in 1..=q_max + 1 {
        let entry = if q % 2 == 0 { m } else { 0 };
        boundaries.push(Matrix::from_i64(&[&[entry]]));
    }
    let mut h = opconf::homology::ChainComplex::new(ranks, boundaries)
        .unwrap()
        .homology();
    h.groups.truncate(q_max + 1);
    h
}

#[test]
fn criterion_11_scanning_endpoints() {
    let t0 = Instant::now();
    use opconf::config::{scan_1d, AmbientBox, LabelledConfig};
    use opconf::fm::Point;
    let mut rng = SplitMix64::new(1111);
    for case in 0..50 {
        // interior-supported configuration on the unit interval
        let count = 1 + rng.index(5);
        let mut particles = Vec::new();
        let mut used: Vec<Rat> = Vec::new();
        while particles.len() < count {
            let x = rat(1 + rng.below(29) as i64, 30);
            if !used.contains(&x) {
                used.push(x.clone());
                particles.push((Point(vec![x]), 1 + rng.index(3)));
            }
        }
        let c = LabelledConfig::new(
            1,
            particles,
            Some(AmbientBox::unit(1)),
            vec![],
        )
        .unwrap();
        let at0 = scan_1d(&c, &rat(0, 1)).unwrap();
        assert!(at0.is_empty(), "case {case} at t = 0");
        let at1 = scan_1d(&c, &rat(1, 1)).unwrap();
        assert!(at1.is_empty(), "case {case} at t = 1");
        let mid = scan_1d(&c, &rat(1, 2)).unwrap();
        let mut original = c.particles.clone();
        original.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(mid.particles, original, "case {case} at t = 1/2");
    }
    pass(11, "scanning fibers at the endpoints and midpoint", t0, 60);
}

//! Regenerates the sample inputs under `fixtures/`.
//!
//! Run from the repository root: `cargo run -p opconf --example make_fixtures`

use opconf::fm::{Disc, DiscTuple};
use opconf::operad::{AssocOperad, ComOperad, TableOperad};
use opconf::partial::{FiniteMonoid, PartialMonoid};
use opconf::scalar::Scalar;
use opconf::w::{WEdge, WNode, WTree};
use opconf::Rat;

fn write(name: &str, value: &impl serde::Serialize) {
    let dir = std::path::Path::new("fixtures");
    std::fs::create_dir_all(dir).unwrap();
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).unwrap();
    text.push('\n');
    std::fs::write(&path, text).unwrap();
    println!("wrote {}", path.display());
}

fn main() {
    write("n-vee-n-6.json", &PartialMonoid::n_vee_n(6));
    write("z4-monoid.json", &PartialMonoid::cyclic(4));
    write("z2-finite-monoid.json", &FiniteMonoid::cyclic(2));
    write("ass3-operad.json", &TableOperad::tabulate(&AssocOperad::without_nullary(3)));
    write("com3-operad.json", &TableOperad::tabulate(&ComOperad::new(3)));
    write(
        "three-particles.json",
        &serde_json::json!({
            "dim": 1,
            "points": [["0"], ["1/1000"], ["1"]],
        }),
    );
    write(
        "interval-config.json",
        &serde_json::json!({
            "dim": 1,
            "points": [["1/4"], ["2/3"]],
            "labels": [1, 2],
            "box": [["0", "1"]],
        }),
    );
    write(
        "circle-complex.json",
        &serde_json::json!({
            "ranks": [3, 3],
            "boundaries": [[], [["-1", "0", "1"], ["1", "-1", "0"], ["0", "1", "-1"]]],
        }),
    );
    let half = |p: i64, q: i64| Rat::from_ratio(p, q);
    let discs: WTree<DiscTuple<Rat>, Rat> = WTree::corolla(
        DiscTuple(vec![
            Disc { center: vec![half(-1, 2)], radius: half(1, 4) },
            Disc { center: vec![half(1, 2)], radius: half(1, 4) },
        ]),
        2,
    );
    write("two-discs.json", &discs);
    // a labelled tree over the arity-3 operad table with one zero-length
    // edge, so normalizing it composes the labels
    let wtree: WTree<usize, Rat> = WTree {
        root: WNode::Vertex {
            label: 0,
            children: vec![
                WEdge { length: None, node: WNode::Twig(1) },
                WEdge {
                    length: Some(half(0, 1)),
                    node: WNode::Vertex {
                        label: 0,
                        children: vec![
                            WEdge { length: None, node: WNode::Twig(2) },
                            WEdge { length: None, node: WNode::Twig(3) },
                        ],
                    },
                },
            ],
        },
    };
    write("wtree.json", &wtree);
}

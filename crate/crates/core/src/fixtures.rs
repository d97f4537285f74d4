//! Small named regions and maps used by the CLI figures, the demo and tests.

use std::collections::BTreeMap;

use crate::geometry::Region;
use crate::network::{Dag, UncertaintyNetwork};
use crate::uncertainty::VariableSignature;

/// The four-row diamond `|y − 5/2| ≤ min(x, 5 − x)` over `(x, y)`.
pub fn diamond() -> Region {
    Region::polytope(
        vec![vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, 1.0], vec![1.0, -1.0]],
        vec![2.5, -2.5, 7.5, 2.5],
    )
    .expect("well-formed rows")
}

/// Vertices of [`tetrahedron`].
pub const TETRAHEDRON_VERTICES: [[f64; 3]; 4] = [[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 1.0]];

/// Pairwise but not totally independent: every 2-D marginal is the unit square.
pub fn tetrahedron() -> Region {
    Region::polytope(
        vec![
            vec![1.0, 1.0, 1.0],
            vec![-1.0, -1.0, 1.0],
            vec![-1.0, 1.0, -1.0],
            vec![1.0, -1.0, -1.0],
        ],
        vec![2.0, 0.0, 0.0, 0.0],
    )
    .expect("well-formed rows")
}

/// `|y − x|_∞ ≤ half` over `(x, y)` in `n` dimensions.
pub fn linf_band(n: usize, half: f64) -> Region {
    let mut rows = Vec::with_capacity(2 * n);
    for k in 0..n {
        for s in [1.0, -1.0] {
            let mut r = vec![0.0; 2 * n];
            r[k] = -s;
            r[n + k] = s;
            rows.push(r);
        }
    }
    Region::polytope(rows, vec![half; 2 * n]).expect("well-formed rows")
}

/// Star network: node 1 is an unconstrained planar state and nodes
/// `2..=observations + 1` each lie in the square of side `side` around it.
pub fn square_star(side: f64, observations: usize) -> UncertaintyNetwork {
    let leaves = 2..=observations + 1;
    let dag = Dag::new(1..=observations + 1, leaves.clone().map(|i| (1, i))).expect("a star is acyclic");
    let mut vars = BTreeMap::from([(1, VariableSignature::new("x1", 2).expect("dim 2"))]);
    let mut factors = BTreeMap::from([(1, Region::full(2))]);
    for i in leaves {
        vars.insert(i, VariableSignature::new(format!("x{i}"), 2).expect("dim 2"));
        factors.insert(i, linf_band(2, side / 2.0));
    }
    UncertaintyNetwork::new(dag, vars, factors).expect("squares are always definite")
}

/// A corridor split by a pillar that leaves a gap above it; the three
/// readings are consistent with either side of the pillar.
pub const CORRIDOR_SCENARIO: &str = "\
world
0 0 10 4
obstacle 4 0 6 3.5
sensors
0 0 3
10 0 3
5 4 3
measurements
1 3.5 0.4  -6.5 0.4  -1.5 -3.6
truth
3.5 0.4
";

//! Triangulation of the closed genus-`g` surface with a locally ordered
//! vertex set, a spanning tree rooted at the single outer vertex class, and
//! group-word labels on every directed edge.
//!
//! The surface is assembled from `g` annular wedges. Each wedge carries the
//! four subdivided polygon sides of one handle on its outer arc and a path of
//! inner vertices `w_0^k .. w_4^k` (with `w_4^k = w_0^{k+1}`), triangulated as
//! a staircase strip; the central polygon bounded by the inner cycle is
//! closed with a fan. Edge labels are assigned per class: fan edges from the
//! tree-side copies of the boundary vertices carry the empty word, those from
//! the translated copies carry a generator inverse, and edges incident to the
//! outer vertex carry the relator-prefix words. Exactly one triangle fails
//! word-level multiplicativity of its labels; its defect word is the surface
//! relator.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::groups::{evaluate_word, FreeWord, GroupError, SurfaceGroupData, UnitaryTuple};
use crate::matrix::TracialMatrix;

/// Barycentric dilation parameter for the enlarged dual-cell blocks and the
/// partition of unity.
pub const DELTA: f64 = 0.1;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SurfaceError {
    #[error("edge {a}-{b} carries no recognized label class")]
    UnclassifiedEdge { a: usize, b: usize },
    #[error("triangle {triangle} has degenerate embedding (area {area:.3e})")]
    DegenerateEmbedding { triangle: usize, area: f64 },
    #[error("vertices {a}, {b} are not an edge of triangle {triangle}")]
    NotAnEdge { triangle: usize, a: usize, b: usize },
    #[error("complex has genus {complex}, group data has genus {group}")]
    GenusMismatch { complex: usize, group: usize },
    #[error("transition value on triangle {triangle} is not invertible")]
    SingularTransition { triangle: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Which handle-boundary or inner position a quotient vertex represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexClass {
    /// The single outer vertex (all polygon corners identified).
    V,
    /// `a_i^k`, `i` in {1, 2}; identified with its starred copy.
    A { k: usize, i: usize },
    /// `b_i^k`, `i` in {1, 2}; identified with its starred copy.
    B { k: usize, i: usize },
    /// Inner vertex `w_j^k`, `j` in {0..3}.
    W { k: usize, j: usize },
}

impl VertexClass {
    pub fn display(&self) -> String {
        match self {
            VertexClass::V => "v".to_string(),
            VertexClass::A { k, i } => format!("a{}^{}", i, k),
            VertexClass::B { k, i } => format!("b{}^{}", i, k),
            VertexClass::W { k, j } => format!("w{}^{}", j, k),
        }
    }
}

/// Label class of an edge, recording which tree-lift geometry produced it.
/// Materialized into free-group words by [`edge_labels`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelClass {
    /// Both endpoints lift into the spanning tree: the empty word.
    Trivial,
    /// Fan edge from a translated `a`-side copy: `alpha_k^{-1}`.
    AlphaInv(usize),
    /// Fan edge from a translated `b`-side copy: `beta_k^{-1}`.
    BetaInv(usize),
    /// Edge from the outer vertex in corner position 0: `kappa_{k-1}`.
    VZero(usize),
    /// Corner position 1: `kappa_{k-1} a_k b_k a_k^{-1}` (the one-letter
    /// section word `b_g` at the top handle).
    VOne(usize),
    /// Corner position 2: `kappa_{k-1} a_k b_k`.
    VTwo(usize),
    /// Corner position 3: `kappa_{k-1} a_k`.
    VThree(usize),
}

#[derive(Debug, Clone)]
pub struct Edge {
    /// Endpoint ids with `a < b` in the local order.
    pub a: usize,
    pub b: usize,
    pub class: LabelClass,
    pub in_tree: bool,
}

#[derive(Debug, Clone)]
pub struct Triangle {
    /// Vertex ids in increasing local order.
    pub vertices: [usize; 3],
    /// Planar coordinates of the three corners, in the same order.
    pub coords: [[f64; 2]; 3],
    /// Wedge number `1..=g`, or 0 for the central fan.
    pub wedge: usize,
}

/// Orientation sign of a triangle: the factor `(-1)^sign` weights its path
/// determinant in the simplicial sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedSimplex {
    pub triangle: usize,
    pub sign: u8,
}

/// Locally ordered triangulation of the closed genus-`g` surface with
/// spanning tree and per-edge label classes.
#[derive(Debug, Clone)]
pub struct SurfaceComplex {
    genus: usize,
    vertices: Vec<VertexClass>,
    edges: Vec<Edge>,
    edge_index: HashMap<(usize, usize), usize>,
    triangles: Vec<Triangle>,
    tree_edges: Vec<usize>,
    root: usize,
    exceptional: usize,
}

impl SurfaceComplex {
    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn vertices(&self) -> &[VertexClass] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn tree_edges(&self) -> &[usize] {
        &self.tree_edges
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Index of the unique triangle whose label cocycle fails at word level.
    pub fn exceptional_triangle(&self) -> usize {
        self.exceptional
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.edge_index.get(&key).copied()
    }

    /// Vertex id of `v` (always 0), `a_i^k`, `b_i^k` or `w_j^k`.
    pub fn vertex_id(&self, class: VertexClass) -> Option<usize> {
        self.vertices.iter().position(|&c| c == class)
    }

    #[cfg(test)]
    pub(crate) fn corrupt_edge_class_for_test(&mut self, edge: usize) {
        self.edges[edge].class = LabelClass::AlphaInv(usize::MAX);
    }

    /// Text export of the complex for inspection and regression snapshots.
    pub fn export_text(&self, labels: Option<&EdgeLabeling>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "genus {}", self.genus);
        let _ = writeln!(
            out,
            "vertices {} edges {} triangles {} euler {}",
            self.vertices.len(),
            self.edges.len(),
            self.triangles.len(),
            self.euler_characteristic()
        );
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "vertex {} {}", i, v.display());
        }
        for e in &self.edges {
            let word = labels
                .map(|l| l.word(e.a, e.b).display())
                .unwrap_or_else(|| format!("{:?}", e.class));
            let tree = if e.in_tree { " tree" } else { "" };
            let _ = writeln!(out, "edge {} {} label {}{}", e.a, e.b, word, tree);
        }
        let signs = orientation_signs(self).ok();
        for (i, t) in self.triangles.iter().enumerate() {
            let sign = signs
                .as_ref()
                .map(|s| s[i].sign.to_string())
                .unwrap_or_else(|| "?".to_string());
            let _ = writeln!(
                out,
                "triangle {} [{} {} {}] wedge {} sign {} coords {:?}",
                i, t.vertices[0], t.vertices[1], t.vertices[2], t.wedge, sign, t.coords
            );
        }
        out
    }
}

/// Builds the genus-`g` complex: `8g + 1` vertices, `30g - 3` edges and
/// `20g - 2` triangles, Euler characteristic `2 - 2g`.
pub fn build_complex(genus: usize) -> SurfaceComplex {
    assert!(genus >= 1, "genus must be at least 1");
    let g = genus;

    // vertex ids: 0 = v; 1 + 4(k-1) + {0: a1, 1: a2, 2: b1, 3: b2};
    // 1 + 4g + 4(k-1) + j = w_j^k
    let mut vertices = vec![VertexClass::V];
    for k in 1..=g {
        vertices.push(VertexClass::A { k, i: 1 });
        vertices.push(VertexClass::A { k, i: 2 });
        vertices.push(VertexClass::B { k, i: 1 });
        vertices.push(VertexClass::B { k, i: 2 });
    }
    for k in 1..=g {
        for j in 0..4 {
            vertices.push(VertexClass::W { k, j });
        }
    }
    let a_id = |k: usize, i: usize| 1 + 4 * (k - 1) + (i - 1);
    let b_id = |k: usize, i: usize| 1 + 4 * (k - 1) + 2 + (i - 1);
    let w_id = |k: usize, j: usize| {
        // w_4^k is w_0^{k+1}, cyclically
        if j == 4 {
            1 + 4 * g + 4 * (k % g)
        } else {
            1 + 4 * g + 4 * (k - 1) + j
        }
    };

    let mut edges: Vec<Edge> = Vec::new();
    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    let add_edge = |a: usize, b: usize, class: LabelClass, in_tree: bool,
                        edges: &mut Vec<Edge>,
                        edge_index: &mut HashMap<(usize, usize), usize>| {
        let key = (a.min(b), a.max(b));
        if let Some(&idx) = edge_index.get(&key) {
            let existing = &edges[idx];
            assert_eq!(
                existing.class, class,
                "conflicting label classes for edge {key:?}"
            );
            return idx;
        }
        let idx = edges.len();
        edges.push(Edge {
            a: key.0,
            b: key.1,
            class,
            in_tree,
        });
        edge_index.insert(key, idx);
        idx
    };

    // kappa_{k-1} degenerates to the empty word at k = 1 and, through the
    // relator, at k = g + 1
    let vzero = |k: usize| {
        if k == 1 || k == g + 1 {
            LabelClass::Trivial
        } else {
            LabelClass::VZero(k)
        }
    };

    let outer_r = 1.0f64;
    let inner_r = 0.45f64;
    let p_coord = |k: usize, i: usize| {
        let theta = 2.0 * std::f64::consts::PI * (((k - 1) * 12 + i) as f64) / (12.0 * g as f64);
        [outer_r * theta.cos(), outer_r * theta.sin()]
    };
    let q_coord = |k: usize, j: usize| {
        let theta = 2.0 * std::f64::consts::PI * (((k - 1) * 4 + j) as f64) / (4.0 * g as f64);
        [inner_r * theta.cos(), inner_r * theta.sin()]
    };

    let mut triangles: Vec<Triangle> = Vec::new();
    let mut exceptional = usize::MAX;

    for k in 1..=g {
        // outer arc positions P0..P12 of wedge k: quotient ids
        let p_ids = [
            0,
            a_id(k, 1),
            a_id(k, 2),
            0,
            b_id(k, 1),
            b_id(k, 2),
            0,
            a_id(k, 2), // *a2
            a_id(k, 1), // *a1
            0,
            b_id(k, 2), // *b2
            b_id(k, 1), // *b1
            0,
        ];
        let q_ids = [w_id(k, 0), w_id(k, 1), w_id(k, 2), w_id(k, 3), w_id(k, 4)];

        use LabelClass::*;
        let outer_classes = [
            VThree(k), // v0 a1
            Trivial,   // a1 a2
            VTwo(k),   // a2 v1
            VOne(k),   // v1 b1
            Trivial,   // b1 b2
            VTwo(k),   // b2 v2
            VTwo(k),   // v2 *a2
            Trivial,   // *a2 *a1
            VThree(k), // *a1 v3
            VTwo(k),   // v3 *b2
            Trivial,   // *b2 *b1
            VOne(k),   // *b1 v4
        ];
        for i in 0..12 {
            add_edge(
                p_ids[i],
                p_ids[i + 1],
                outer_classes[i],
                false,
                &mut edges,
                &mut edge_index,
            );
        }
        // radial edges shared with the neighboring wedges
        add_edge(p_ids[0], q_ids[0], vzero(k), k == 1, &mut edges, &mut edge_index);
        add_edge(p_ids[12], q_ids[4], vzero(k + 1), k + 1 == 1, &mut edges, &mut edge_index);
        // inner arc; the tree keeps the whole inner path except the closing
        // edge of the cycle at the top wedge
        for j in 0..4 {
            let in_tree = !(k == g && j == 3);
            add_edge(
                q_ids[j],
                q_ids[j + 1],
                Trivial,
                in_tree,
                &mut edges,
                &mut edge_index,
            );
        }
        // strip chords (P_i, Q_j) with their label classes; the four marked
        // ones attach the boundary vertex classes to the spanning tree
        let chords: [(usize, usize, LabelClass, bool); 15] = [
            (1, 0, AlphaInv(k), false),
            (2, 0, AlphaInv(k), false),
            (2, 1, AlphaInv(k), false),
            (3, 1, VOne(k), false),
            (4, 1, Trivial, true),  // b1 attaches
            (5, 1, Trivial, true),  // b2 attaches
            (5, 2, Trivial, false),
            (6, 2, VTwo(k), false),
            (7, 2, Trivial, true),  // a2 attaches
            (8, 2, Trivial, true),  // a1 attaches
            (8, 3, Trivial, false),
            (9, 3, VThree(k), false),
            (10, 3, BetaInv(k), false),
            (11, 3, BetaInv(k), false),
            (11, 4, BetaInv(k), false),
        ];
        for &(pi, qj, class, in_tree) in &chords {
            add_edge(p_ids[pi], q_ids[qj], class, in_tree, &mut edges, &mut edge_index);
        }

        // staircase strip: move pattern O O I O, repeated four times
        let moves = [
            'O', 'O', 'I', 'O', 'O', 'O', 'I', 'O', 'O', 'O', 'I', 'O', 'O', 'O', 'I', 'O',
        ];
        let mut pi = 0usize;
        let mut qj = 0usize;
        for &mv in &moves {
            let corners: [(usize, [f64; 2]); 3] = if mv == 'O' {
                let t = [
                    (p_ids[pi], p_coord(k, pi)),
                    (p_ids[pi + 1], p_coord(k, pi + 1)),
                    (q_ids[qj], q_coord(k, qj)),
                ];
                pi += 1;
                t
            } else {
                let t = [
                    (p_ids[pi], p_coord(k, pi)),
                    (q_ids[qj], q_coord(k, qj)),
                    (q_ids[qj + 1], q_coord(k, qj + 1)),
                ];
                qj += 1;
                t
            };
            let mut sorted = corners;
            sorted.sort_by_key(|&(id, _)| id);
            let tri = Triangle {
                vertices: [sorted[0].0, sorted[1].0, sorted[2].0],
                coords: [sorted[0].1, sorted[1].1, sorted[2].1],
                wedge: k,
            };
            // the outer step consuming (a_2^g, v_1^g) at inner level 1
            if k == g && mv == 'O' && pi == 3 && qj == 1 {
                exceptional = triangles.len();
            }
            triangles.push(tri);
        }
        debug_assert_eq!(pi, 12);
        debug_assert_eq!(qj, 4);
    }

    // central fan over the inner cycle, apex w_0^1
    let cycle: Vec<(usize, [f64; 2])> = (1..=g)
        .flat_map(|k| (0..4).map(move |j| (k, j)))
        .map(|(k, j)| (w_id(k, j), q_coord(k, j)))
        .collect();
    for m in 1..cycle.len() - 1 {
        add_edge(
            cycle[0].0,
            cycle[m].0,
            LabelClass::Trivial,
            false,
            &mut edges,
            &mut edge_index,
        );
        // the cycle edges themselves were added with the wedges; the second
        // fan chord of each triangle is added on the next iteration
        let corners = [cycle[0], cycle[m], cycle[m + 1]];
        let mut sorted = corners;
        sorted.sort_by_key(|&(id, _)| id);
        triangles.push(Triangle {
            vertices: [sorted[0].0, sorted[1].0, sorted[2].0],
            coords: [sorted[0].1, sorted[1].1, sorted[2].1],
            wedge: 0,
        });
    }

    let tree_edges: Vec<usize> = edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.in_tree)
        .map(|(i, _)| i)
        .collect();

    assert_ne!(exceptional, usize::MAX);
    SurfaceComplex {
        genus: g,
        vertices,
        edges,
        edge_index,
        triangles,
        tree_edges,
        root: 0,
        exceptional,
    }
}

// ---------------------------------------------------------------------------
// Edge labels
// ---------------------------------------------------------------------------

/// Free-group words on directed edges; `word(j, i)` is the inverse word of
/// `word(i, j)`.
#[derive(Debug, Clone)]
pub struct EdgeLabeling {
    genus: usize,
    words: HashMap<(usize, usize), FreeWord>,
}

impl EdgeLabeling {
    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Label of the directed edge from `a` to `b`.
    pub fn word(&self, a: usize, b: usize) -> FreeWord {
        if a <= b {
            self.words[&(a, b)].clone()
        } else {
            self.words[&(b, a)].inverse()
        }
    }

    pub fn try_word(&self, a: usize, b: usize) -> Option<FreeWord> {
        let key = (a.min(b), a.max(b));
        let w = self.words.get(&key)?;
        Some(if a <= b { w.clone() } else { w.inverse() })
    }
}

fn materialize(class: LabelClass, sg: &SurfaceGroupData) -> Option<FreeWord> {
    let g = sg.genus;
    let in_range = |k: usize| k >= 1 && k <= g;
    Some(match class {
        LabelClass::Trivial => FreeWord::identity(g),
        LabelClass::AlphaInv(k) if in_range(k) => FreeWord::alpha(g, k).inverse(),
        LabelClass::BetaInv(k) if in_range(k) => FreeWord::beta(g, k).inverse(),
        LabelClass::VZero(k) if in_range(k) => sg.kappa_words[k - 1].clone(),
        LabelClass::VOne(k) if in_range(k) => {
            if k < g {
                sg.kappa_words[k - 1]
                    .concat(&FreeWord::alpha(g, k))
                    .concat(&FreeWord::beta(g, k))
                    .concat(&FreeWord::alpha(g, k).inverse())
            } else {
                FreeWord::beta(g, g)
            }
        }
        LabelClass::VTwo(k) if in_range(k) => sg.kappa_words[k - 1]
            .concat(&FreeWord::alpha(g, k))
            .concat(&FreeWord::beta(g, k)),
        LabelClass::VThree(k) if in_range(k) => {
            sg.kappa_words[k - 1].concat(&FreeWord::alpha(g, k))
        }
        _ => return None,
    })
}

/// Materializes the per-edge label classes into section words, verifying that
/// every word lies in the label alphabet.
pub fn edge_labels(
    complex: &SurfaceComplex,
    sg: &SurfaceGroupData,
) -> Result<EdgeLabeling, SurfaceError> {
    if complex.genus() != sg.genus {
        return Err(SurfaceError::GenusMismatch {
            complex: complex.genus(),
            group: sg.genus,
        });
    }
    let mut words = HashMap::new();
    for e in complex.edges() {
        let word = materialize(e.class, sg)
            .filter(|w| sg.label_alphabet.contains(w))
            .ok_or(SurfaceError::UnclassifiedEdge { a: e.a, b: e.b })?;
        words.insert((e.a, e.b), word);
    }
    Ok(EdgeLabeling {
        genus: sg.genus,
        words,
    })
}

// ---------------------------------------------------------------------------
// Orientation signs
// ---------------------------------------------------------------------------

fn signed_area(c: &[[f64; 2]; 3]) -> f64 {
    0.5 * ((c[1][0] - c[0][0]) * (c[2][1] - c[0][1])
        - (c[1][1] - c[0][1]) * (c[2][0] - c[0][0]))
}

/// Signs from the signed area of each ordered corner triple in the planar
/// wedge drawing, globally calibrated so that the exceptional triangle gets
/// sign 0 and the simplicial sum reproduces the winding invariant.
pub fn orientation_signs(complex: &SurfaceComplex) -> Result<Vec<OrientedSimplex>, SurfaceError> {
    let mut raw = Vec::with_capacity(complex.triangles().len());
    for (i, t) in complex.triangles().iter().enumerate() {
        let area = signed_area(&t.coords);
        if area.abs() < 1e-12 {
            return Err(SurfaceError::DegenerateEmbedding { triangle: i, area });
        }
        raw.push(if area > 0.0 { 0u8 } else { 1u8 });
    }
    let flip = raw[complex.exceptional_triangle()] == 1;
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(triangle, s)| OrientedSimplex {
            triangle,
            sign: if flip { 1 - s } else { s },
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Dual cells and the partition of unity
// ---------------------------------------------------------------------------

/// Barycentric dual-cell block of corner `i`: the points whose `i`-th
/// coordinate is maximal.
pub fn dual_block_contains(corner: usize, bary: &[f64; 3]) -> bool {
    (0..3).all(|l| bary[corner] >= bary[l])
}

/// Dilated block: `t_i >= 1/3 - delta`, a barycentric `delta`-enlargement of
/// the dual block.
pub fn dilated_block_contains(corner: usize, bary: &[f64; 3]) -> bool {
    bary[corner] >= 1.0 / 3.0 - DELTA
}

/// Piecewise linear partition of unity subordinate to the dilated blocks:
/// `max(t_i - (1/3 - delta), 0)`, renormalized to sum 1.
pub fn partition_of_unity_at(bary: &[f64; 3]) -> [f64; 3] {
    let cut = 1.0 / 3.0 - DELTA;
    let mut w = [0.0f64; 3];
    for i in 0..3 {
        w[i] = (bary[i] - cut).max(0.0);
    }
    let total: f64 = w.iter().sum();
    debug_assert!(total > 0.0, "partition weights vanished at {bary:?}");
    [w[0] / total, w[1] / total, w[2] / total]
}

// ---------------------------------------------------------------------------
// Transition functions
// ---------------------------------------------------------------------------

/// The three unitary values attached to a triangle `(i, j, k)` in local
/// order: `pi(s_ij)`, `pi(s_jk)` and `pi(s_ik)`; the interpolating edge runs
/// between `pi(s_ik)` and the product `pi(s_ij) pi(s_jk)`.
pub struct TriangleTransitions {
    pub min_mid: TracialMatrix,
    pub mid_max: TracialMatrix,
    pub min_max: TracialMatrix,
    pub product: TracialMatrix,
}

/// Evaluates the three edge words of a triangle on a tuple.
pub fn triangle_transitions(
    complex: &SurfaceComplex,
    labels: &EdgeLabeling,
    tuple: &UnitaryTuple,
    triangle: usize,
) -> Result<TriangleTransitions, GroupError> {
    let t = &complex.triangles()[triangle];
    let [i, j, k] = t.vertices;
    let min_mid = evaluate_word(tuple, &labels.word(i, j))?;
    let mid_max = evaluate_word(tuple, &labels.word(j, k))?;
    let min_max = evaluate_word(tuple, &labels.word(i, k))?;
    let product = min_mid.mul(&mid_max);
    Ok(TriangleTransitions {
        min_mid,
        mid_max,
        min_max,
        product,
    })
}

/// Interpolation coefficient along the long transition segment: linear up to
/// the collar at `1 - 3 delta`, constant beyond.
pub fn interpolation_coefficient(parameter: f64) -> f64 {
    (parameter / (1.0 - 3.0 * DELTA)).clamp(0.0, 1.0)
}

/// Transition function of a triangle on the given ordered vertex pair.
///
/// For the `(min, max)` pair the value interpolates from `pi(s_ik)` at
/// parameter 0 (the edge midpoint end) to `pi(s_ij) pi(s_jk)` at parameter 1
/// (the barycenter end), held constant on the collar; the other two pairs
/// are constant. A reversed pair yields the pointwise inverse.
pub fn transition_at(
    complex: &SurfaceComplex,
    labels: &EdgeLabeling,
    tuple: &UnitaryTuple,
    triangle: usize,
    pair: (usize, usize),
    parameter: f64,
) -> Result<TracialMatrix, SurfaceError> {
    let t = &complex.triangles()[triangle];
    let [i, j, k] = t.vertices;
    let (a, b) = pair;
    let reversed = a > b;
    let (lo, hi) = (a.min(b), a.max(b));
    let trans = triangle_transitions(complex, labels, tuple, triangle)?;
    let value = if (lo, hi) == (i, j) {
        trans.min_mid
    } else if (lo, hi) == (j, k) {
        trans.mid_max
    } else if (lo, hi) == (i, k) {
        let s = interpolation_coefficient(parameter);
        trans
            .min_max
            .scale(num_complex::Complex64::new(1.0 - s, 0.0))
            .add(&trans.product.scale(num_complex::Complex64::new(s, 0.0)))
    } else {
        return Err(SurfaceError::NotAnEdge { triangle, a, b });
    };
    if reversed {
        value
            .inverse()
            .map_err(|_| SurfaceError::SingularTransition { triangle })
    } else {
        Ok(value)
    }
}

#[cfg(test)]
#[path = "surface_tests.rs"]
mod surface_tests;

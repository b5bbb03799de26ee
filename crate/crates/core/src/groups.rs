//! Free-group words over the generators of the genus-`g` free group, the
//! surface-group data (relator prefixes and the label alphabet of the
//! set-theoretic section), and generator families of almost-commuting unitary
//! tuples.
//!
//! The commutator convention is `[x, y] = x y x^-1 y^-1` throughout. The
//! clock/shift pair below satisfies `v u = e^{2 pi i p/n} u v`, so
//! `[v, u] = e^{2 pi i p/n}` and `[u, v] = e^{-2 pi i p/n}`; the winding
//! invariant of `clock_shift_tuple(n, p)` is therefore `-p/n`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

use crate::matrix::{self, MatrixError, TracialMatrix};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GroupError {
    #[error("word has genus {word}, tuple has genus {tuple}")]
    GenusMismatch { word: usize, tuple: usize },
    #[error("clock/shift needs dimension at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("entry {index} is not unitary: ‖u*u - 1‖ = {defect:.3e}")]
    NotUnitary { index: usize, defect: f64 },
    #[error("tuple must contain 2g matrices, got {got} for genus {genus}")]
    WrongTupleSize { genus: usize, got: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GeneratorKind {
    Alpha,
    Beta,
}

/// A single generator power `alpha_k^{±1}` or `beta_k^{±1}` with `k` 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub k: usize,
    pub kind: GeneratorKind,
    pub exponent: i8,
}

impl Letter {
    pub fn inverse(self) -> Self {
        Letter {
            exponent: -self.exponent,
            ..self
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.k == other.k && self.kind == other.kind && self.exponent == -other.exponent
    }
}

/// Freely reduced word over the `2g` generators of the free group; the empty
/// word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreeWord {
    genus: usize,
    letters: Vec<Letter>,
}

impl FreeWord {
    pub fn identity(genus: usize) -> Self {
        FreeWord {
            genus,
            letters: Vec::new(),
        }
    }

    pub fn generator(genus: usize, k: usize, kind: GeneratorKind, exponent: i8) -> Self {
        assert!(k >= 1 && k <= genus, "generator index out of range");
        assert!(exponent == 1 || exponent == -1);
        FreeWord {
            genus,
            letters: vec![Letter { k, kind, exponent }],
        }
    }

    pub fn alpha(genus: usize, k: usize) -> Self {
        Self::generator(genus, k, GeneratorKind::Alpha, 1)
    }

    pub fn beta(genus: usize, k: usize) -> Self {
        Self::generator(genus, k, GeneratorKind::Beta, 1)
    }

    /// Builds a word from raw letters without reducing; used by tests that
    /// exercise [`reduce_word`].
    pub fn from_letters(genus: usize, letters: Vec<Letter>) -> Self {
        FreeWord { genus, letters }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters
            .windows(2)
            .all(|w| !w[0].cancels(w[1]))
    }

    /// Concatenation followed by free reduction.
    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        assert_eq!(self.genus, other.genus, "genus mismatch in concat");
        let mut letters = self.letters.clone();
        for &l in &other.letters {
            if letters.last().is_some_and(|&last| last.cancels(l)) {
                letters.pop();
            } else {
                letters.push(l);
            }
        }
        FreeWord {
            genus: self.genus,
            letters,
        }
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord {
            genus: self.genus,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// `x y x^-1 y^-1`, reduced.
    pub fn commutator(x: &FreeWord, y: &FreeWord) -> FreeWord {
        x.concat(y).concat(&x.inverse()).concat(&y.inverse())
    }

    /// Exponent vector in `Z^{2g}`: position `2(k-1)` counts `alpha_k`,
    /// position `2(k-1)+1` counts `beta_k`.
    pub fn abelianization(&self) -> Vec<i64> {
        let mut v = vec![0i64; 2 * self.genus];
        for l in &self.letters {
            let slot = 2 * (l.k - 1)
                + match l.kind {
                    GeneratorKind::Alpha => 0,
                    GeneratorKind::Beta => 1,
                };
            v[slot] += l.exponent as i64;
        }
        v
    }

    /// Compact text form, e.g. `a1 b1 a1' b1'` with `'` marking inverses.
    pub fn display(&self) -> String {
        if self.letters.is_empty() {
            return "1".to_string();
        }
        self.letters
            .iter()
            .map(|l| {
                let g = match l.kind {
                    GeneratorKind::Alpha => 'a',
                    GeneratorKind::Beta => 'b',
                };
                if l.exponent == 1 {
                    format!("{}{}", g, l.k)
                } else {
                    format!("{}{}'", g, l.k)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Free reduction: cancels adjacent inverse pairs until none remain.
pub fn reduce_word(w: &FreeWord) -> FreeWord {
    let mut letters: Vec<Letter> = Vec::with_capacity(w.letters.len());
    for &l in &w.letters {
        if letters.last().is_some_and(|&last| last.cancels(l)) {
            letters.pop();
        } else {
            letters.push(l);
        }
    }
    FreeWord {
        genus: w.genus,
        letters,
    }
}

// ---------------------------------------------------------------------------
// Surface group data
// ---------------------------------------------------------------------------

/// Relator prefixes `kappa_0 .. kappa_g` and the label alphabet: the images
/// under the section of every edge label class, closed under inversion.
#[derive(Debug, Clone)]
pub struct SurfaceGroupData {
    pub genus: usize,
    /// `kappa_k = prod_{j<=k} [alpha_j, beta_j]` as reduced words; `kappa_0`
    /// is empty and `kappa_g` is the surface relator of length `4g`.
    pub kappa_words: Vec<FreeWord>,
    /// The family `F_k` for each handle, written with the natural words
    /// `{alpha_k^-1, beta_k^-1, kappa_{k-1}, kappa_{k-1} alpha_k,
    /// kappa_{k-1} alpha_k beta_k, kappa_{k-1} alpha_k beta_k alpha_k^-1}`.
    pub families: Vec<Vec<FreeWord>>,
    /// Section images of the edge-label classes, deduplicated, inverses
    /// included. At `k = g` the last family entry equals `beta_g` in the
    /// surface group and the section picks the one-letter word.
    pub label_alphabet: Vec<FreeWord>,
}

/// Populates the relator prefixes, the families `F_k` and the section images
/// of the label classes.
pub fn build_surface_group(genus: usize) -> SurfaceGroupData {
    assert!(genus >= 1, "genus must be at least 1");
    let mut kappa_words = Vec::with_capacity(genus + 1);
    kappa_words.push(FreeWord::identity(genus));
    for k in 1..=genus {
        let comm = FreeWord::commutator(&FreeWord::alpha(genus, k), &FreeWord::beta(genus, k));
        kappa_words.push(kappa_words[k - 1].concat(&comm));
    }

    let mut families = Vec::with_capacity(genus);
    let mut alphabet: Vec<FreeWord> = vec![FreeWord::identity(genus)];
    let push = |w: FreeWord, out: &mut Vec<FreeWord>| {
        if !out.contains(&w) {
            out.push(w);
        }
    };
    for k in 1..=genus {
        let a = FreeWord::alpha(genus, k);
        let b = FreeWord::beta(genus, k);
        let km1 = &kappa_words[k - 1];
        let family = vec![
            a.inverse(),
            b.inverse(),
            km1.clone(),
            km1.concat(&a),
            km1.concat(&a).concat(&b),
            km1.concat(&a).concat(&b).concat(&a.inverse()),
        ];
        // section images: at k = g the last entry equals beta_g in the
        // surface group and the section picks the short word
        let mut images = family.clone();
        if k == genus {
            images[5] = b.clone();
        }
        for w in images {
            push(w.clone(), &mut alphabet);
            push(w.inverse(), &mut alphabet);
        }
        families.push(family);
    }
    SurfaceGroupData {
        genus,
        kappa_words,
        families,
        label_alphabet: alphabet,
    }
}

// ---------------------------------------------------------------------------
// Unitary tuples
// ---------------------------------------------------------------------------

/// Tolerance for the per-entry unitarity check.
pub const UNITARITY_TOL: f64 = 1e-12;

/// `2g` unitaries `(u_1, v_1, ..., u_g, v_g)`; the data of a
/// quasi-representation of the genus-`g` surface group.
#[derive(Debug, Clone)]
pub struct UnitaryTuple {
    genus: usize,
    dim: usize,
    unitaries: Vec<TracialMatrix>,
}

impl UnitaryTuple {
    pub fn new(genus: usize, unitaries: Vec<TracialMatrix>) -> Result<Self, GroupError> {
        if unitaries.len() != 2 * genus {
            return Err(GroupError::WrongTupleSize {
                genus,
                got: unitaries.len(),
            });
        }
        let dim = unitaries[0].dim();
        for (i, m) in unitaries.iter().enumerate() {
            if m.dim() != dim {
                return Err(GroupError::WrongTupleSize { genus, got: i });
            }
            let defect = m.unitarity_defect();
            if defect > UNITARITY_TOL {
                return Err(GroupError::NotUnitary { index: i, defect });
            }
        }
        Ok(UnitaryTuple {
            genus,
            dim,
            unitaries,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `u_k`, 1-based.
    pub fn u(&self, k: usize) -> &TracialMatrix {
        &self.unitaries[2 * (k - 1)]
    }

    /// `v_k`, 1-based.
    pub fn v(&self, k: usize) -> &TracialMatrix {
        &self.unitaries[2 * (k - 1) + 1]
    }

    pub fn unitaries(&self) -> &[TracialMatrix] {
        &self.unitaries
    }

    /// Conjugates every entry by a fixed unitary `w`.
    pub fn conjugated(&self, w: &TracialMatrix) -> Result<Self, GroupError> {
        let wstar = w.adjoint();
        let unitaries = self
            .unitaries
            .iter()
            .map(|m| w.mul(m).mul(&wstar))
            .collect();
        UnitaryTuple::new(self.genus, unitaries)
    }

    /// Product of commutators `prod_k [u_k, v_k]`.
    pub fn commutator_product(&self) -> TracialMatrix {
        let mut acc = TracialMatrix::identity(self.dim);
        for k in 1..=self.genus {
            let u = self.u(k);
            let v = self.v(k);
            let comm = u.mul(v).mul(&u.adjoint()).mul(&v.adjoint());
            acc = acc.mul(&comm);
        }
        acc
    }
}

/// Letter-by-letter product of the tuple's unitaries; a genuine homomorphism
/// on the free group, with inverses taken as adjoints.
pub fn evaluate_word(t: &UnitaryTuple, w: &FreeWord) -> Result<TracialMatrix, GroupError> {
    if w.genus() != t.genus() {
        return Err(GroupError::GenusMismatch {
            word: w.genus(),
            tuple: t.genus(),
        });
    }
    let mut acc = TracialMatrix::identity(t.dim());
    for l in w.letters() {
        let base = match l.kind {
            GeneratorKind::Alpha => t.u(l.k),
            GeneratorKind::Beta => t.v(l.k),
        };
        let factor = if l.exponent == 1 {
            base.clone()
        } else {
            base.adjoint()
        };
        acc = acc.mul(&factor);
    }
    Ok(acc)
}

/// `‖prod [u_i, v_i] - 1‖` in operator norm.
pub fn commutator_defect(t: &UnitaryTuple) -> f64 {
    t.commutator_product().distance_to_identity()
}

/// Clock and shift pair: `u = diag(1, w, ..., w^{n-1})` with
/// `w = e^{2 pi i p/n}`, and `v` the cyclic shift with `v[j, j+1 mod n] = 1`.
/// They satisfy `v u = w u v` exactly.
pub fn clock_shift_tuple(n: usize, p: i64) -> Result<UnitaryTuple, GroupError> {
    if n < 2 {
        return Err(GroupError::DimensionTooSmall(n));
    }
    let omega = 2.0 * PI * p as f64 / n as f64;
    let clock = TracialMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, omega * i as f64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let shift = TracialMatrix::from_fn(n, |i, j| {
        if j == (i + 1) % n {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    UnitaryTuple::new(1, vec![clock, shift])
}

/// Genus-`g` family: the clock/shift pair in the first handle, identity pairs
/// elsewhere, so the commutator product stays the same scalar.
pub fn twisted_genus_tuple(genus: usize, n: usize, p: i64) -> Result<UnitaryTuple, GroupError> {
    assert!(genus >= 1);
    let base = clock_shift_tuple(n, p)?;
    let mut unitaries = base.unitaries().to_vec();
    for _ in 1..genus {
        unitaries.push(TracialMatrix::identity(n));
        unitaries.push(TracialMatrix::identity(n));
    }
    UnitaryTuple::new(genus, unitaries)
}

/// Commuting diagonal unitaries with uniformly random phases, each multiplied
/// by `exp` of skew-Hermitian noise of operator norm `magnitude` and then
/// re-unitarized. Deterministic for a fixed seed.
pub fn perturbed_commuting_tuple(
    genus: usize,
    n: usize,
    magnitude: f64,
    seed: u64,
) -> Result<UnitaryTuple, GroupError> {
    assert!(genus >= 1);
    assert!((0.0..=0.2).contains(&magnitude), "magnitude out of range");
    if n < 2 {
        return Err(GroupError::DimensionTooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unitaries = Vec::with_capacity(2 * genus);
    for _ in 0..2 * genus {
        let phases: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        let diag = TracialMatrix::from_fn(n, |i, j| {
            if i == j {
                Complex64::from_polar(1.0, phases[i])
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let raw = TracialMatrix::from_fn(n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let skew = raw.sub(&raw.adjoint()).scale(Complex64::new(0.5, 0.0));
        let norm = skew.operator_norm();
        let m = if magnitude == 0.0 || norm == 0.0 {
            diag
        } else {
            let scaled = skew.scale(Complex64::new(magnitude / norm, 0.0));
            diag.mul(&matrix::exp_skew_hermitian(&scaled))
        };
        unitaries.push(matrix::polar_unitary(&m)?);
    }
    UnitaryTuple::new(genus, unitaries)
}

// ---------------------------------------------------------------------------
// Multiplicativity bound for the section
// ---------------------------------------------------------------------------

/// Result of the combinatorial multiplicativity analysis over the label
/// alphabet: `bound = constant * defect`.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectBound {
    /// Largest number of relator-conjugate factors needed to express
    /// `s(x) s(y) s(xy)^{-1}` over pairs of alphabet entries whose product
    /// lies back in the alphabet.
    pub multiplicativity_constant: usize,
    pub bound: f64,
    /// Ordered alphabet pairs examined.
    pub pairs_examined: usize,
    /// Pairs whose product closed inside the alphabet (or was trivial).
    pub pairs_closed: usize,
}

/// Multiplicativity bound `M * defect` for the label alphabet: every section
/// defect word `s(x) s(y) s(xy)^{-1}` is expressed as a product of conjugates
/// of the relator and the factors counted; `M` is the maximum count. Products
/// falling outside the alphabet carry no label-class constraint and are
/// skipped.
pub fn quasi_rep_defect_bound(sg: &SurfaceGroupData, defect: f64) -> DefectBound {
    let relator = &sg.kappa_words[sg.genus];
    let mut max_m = 0usize;
    let mut pairs = 0usize;
    let mut closed = 0usize;
    for x in &sg.label_alphabet {
        for y in &sg.label_alphabet {
            pairs += 1;
            let product = x.concat(y);
            let prod_ab = product.abelianization();
            let mut matched = false;
            for cand in &sg.label_alphabet {
                if cand.abelianization() != prod_ab {
                    continue;
                }
                let w = product.concat(&cand.inverse());
                if let Some(m) = relator_factor_count(&w, relator) {
                    max_m = max_m.max(m);
                    matched = true;
                    break;
                }
            }
            if matched {
                closed += 1;
            }
        }
    }
    DefectBound {
        multiplicativity_constant: max_m,
        bound: max_m as f64 * defect,
        pairs_examined: pairs,
        pairs_closed: closed,
    }
}

/// Expresses a reduced word lying in the normal closure of `relator` as a
/// product of conjugates of `relator^{±1}`, returning the factor count, or
/// `None` when the word is not in the closure.
///
/// Genus one reduces to sorting generator letters past each other, one
/// conjugate per transposition. Higher genus uses greedy replacement of long
/// relator pieces, which is a complete decision procedure because the surface
/// relator satisfies the small-cancellation condition.
pub fn relator_factor_count(w: &FreeWord, relator: &FreeWord) -> Option<usize> {
    let w = reduce_word(w);
    if w.is_empty() {
        return Some(0);
    }
    if w.genus() == 1 {
        return collection_count_genus_one(&w);
    }
    greedy_relator_reduction(&w, relator)
}

/// Genus-one collection: move alpha letters in front of beta letters; each
/// adjacent swap is one relator conjugate. The word is in the commutator
/// subgroup exactly when the sorted word cancels completely.
fn collection_count_genus_one(w: &FreeWord) -> Option<usize> {
    let mut letters: Vec<Letter> = w.letters().to_vec();
    let mut count = 0usize;
    loop {
        // free reduce in place
        let mut reduced: Vec<Letter> = Vec::with_capacity(letters.len());
        for &l in &letters {
            if reduced.last().is_some_and(|&last| last.cancels(l)) {
                reduced.pop();
            } else {
                reduced.push(l);
            }
        }
        letters = reduced;
        let swap_at = letters.windows(2).position(|p| {
            p[0].kind == GeneratorKind::Beta && p[1].kind == GeneratorKind::Alpha
        });
        match swap_at {
            Some(i) => {
                letters.swap(i, i + 1);
                count += 1;
            }
            None => break,
        }
    }
    if letters.is_empty() {
        Some(count)
    } else {
        None
    }
}

fn rotations_with_inverse(relator: &FreeWord) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    for base in [relator.clone(), relator.inverse()] {
        let ls = base.letters().to_vec();
        for shift in 0..ls.len() {
            let mut rot = ls[shift..].to_vec();
            rot.extend_from_slice(&ls[..shift]);
            out.push(rot);
        }
    }
    out
}

fn greedy_relator_reduction(w: &FreeWord, relator: &FreeWord) -> Option<usize> {
    let rotations = rotations_with_inverse(relator);
    let len = relator.len();
    let threshold = len / 2 + 1;
    let mut current = w.clone();
    let mut count = 0usize;
    while !current.is_empty() {
        let letters = current.letters();
        let mut best: Option<(usize, usize, usize)> = None; // (pos, rot index, match len)
        for pos in 0..letters.len() {
            for (ri, rot) in rotations.iter().enumerate() {
                let mut l = 0usize;
                while pos + l < letters.len() && l < rot.len() && letters[pos + l] == rot[l] {
                    l += 1;
                }
                if l >= threshold && best.is_none_or(|(_, _, bl)| l > bl) {
                    best = Some((pos, ri, l));
                }
            }
        }
        let (pos, ri, l) = best?;
        // w = x s y with s the matched prefix of the rotation rho = s u;
        // replace s by rho u^-1, extracting one conjugate of the relator.
        let rot = &rotations[ri];
        let x = FreeWord::from_letters(current.genus(), letters[..pos].to_vec());
        let y = FreeWord::from_letters(current.genus(), letters[pos + l..].to_vec());
        let u = FreeWord::from_letters(current.genus(), rot[l..].to_vec());
        current = reduce_word(&x.concat(&u.inverse()).concat(&y));
        count += 1;
        if count > 64 {
            return None; // safety valve; alphabet products never get this far
        }
    }
    Some(count)
}

#[cfg(test)]
#[path = "group_tests.rs"]
mod group_tests;

//! Acceptance suite: every release-gating criterion with its tolerance
//! pinned, one printed pass/fail line per criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use num_complex::Complex64;
use qreps::determinant::{
    dhs_linear, dhs_quadrature, winding_invariant, MatrixPath,
};
use qreps::groups::{
    build_surface_group, clock_shift_tuple, commutator_defect, perturbed_commuting_tuple,
    reduce_word, twisted_genus_tuple, FreeWord,
};
use qreps::ktheory::{
    boundary_integral_check, bundle_rank_check, e_pi_at, kappa_invariant,
    pushforward_field_at, simplicial_pushforward, verify_with, VerifyOptions,
};
use qreps::matrix::{
    exp_skew_hermitian, polar_unitary, principal_log, riesz_half_plane, TracialMatrix,
};
use qreps::surface::{build_complex, edge_labels, VertexClass};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Self {
        Gate {
            failures: Vec::new(),
        }
    }

    fn record(&mut self, criterion: &str, ok: bool, detail: String) {
        let status = if ok { "PASS" } else { "FAIL" };
        println!("criterion {criterion}: {status} ({detail})");
        if !ok {
            self.failures.push(format!("{criterion}: {detail}"));
        }
    }

    fn finish(self) {
        assert!(
            self.failures.is_empty(),
            "acceptance failures:\n{}",
            self.failures.join("\n")
        );
    }
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_skew(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> TracialMatrix {
    let raw = TracialMatrix::from_fn(n, |_, _| {
        c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let skew = raw.sub(&raw.adjoint()).scale(c64(0.5, 0.0));
    let norm = skew.operator_norm();
    if norm == 0.0 {
        skew
    } else {
        skew.scale(c64(scale / norm, 0.0))
    }
}

/// Criterion 1: the torus family reproduces `W = -p/n` at 1e-10 for every
/// admissible phase, each case in under a second.
#[test]
fn acceptance() {
    let mut gate = Gate::new();

    // ---- criterion 1: torus winding values ------------------------------
    {
        let mut ok = true;
        let mut worst = 0.0f64;
        let mut worst_case = (0usize, 0i64);
        let mut slowest = 0.0f64;
        for n in 3..=16usize {
            for p in 1..((n as i64 + 1) / 2) {
                if 2 * p >= n as i64 {
                    continue;
                }
                let start = Instant::now();
                let t = clock_shift_tuple(n, p).unwrap();
                let w = winding_invariant(&t).unwrap();
                let elapsed = start.elapsed().as_secs_f64();
                slowest = slowest.max(elapsed);
                let err = (w.value - (-(p as f64) / n as f64)).abs();
                if err > worst {
                    worst = err;
                    worst_case = (n, p);
                }
                ok &= err <= 1e-10 && elapsed < 1.0;
            }
        }
        gate.record(
            "1 torus winding",
            ok,
            format!(
                "max |W + p/n| = {worst:.2e} at (n, p) = {worst_case:?}, slowest case {slowest:.3}s"
            ),
        );
    }

    // ---- criterion 2: main equality S = W --------------------------------
    {
        let start = Instant::now();
        let mut ok = true;
        let mut worst = 0.0f64;
        let fast = VerifyOptions {
            bundle_samples: 0,
            check_boundary: false,
            ..VerifyOptions::default()
        };

        // (a) genus 1 clock/shift across dimensions and phases
        let sg1 = build_surface_group(1);
        let c1 = build_complex(1);
        let l1 = edge_labels(&c1, &sg1).unwrap();
        for n in 3..=16usize {
            for p in 1..((n as i64 + 1) / 2) {
                if 2 * p >= n as i64 {
                    continue;
                }
                let t = clock_shift_tuple(n, p).unwrap();
                let r = verify_with(&c1, &l1, &t, "clock-shift", &fast).unwrap();
                worst = worst.max(r.verdicts.sw_error);
                ok &= r.verdicts.sw_error <= 1e-8;
            }
        }
        // (b) genus 2 and 3 twisted tuples
        for g in [2usize, 3] {
            let sg = build_surface_group(g);
            let c = build_complex(g);
            let l = edge_labels(&c, &sg).unwrap();
            for p in [1i64, 3] {
                let t = twisted_genus_tuple(g, 8, p).unwrap();
                let r = verify_with(&c, &l, &t, "twisted", &fast).unwrap();
                worst = worst.max(r.verdicts.sw_error);
                ok &= r.verdicts.sw_error <= 1e-8;
            }
        }
        // (c) 50 perturbed-commuting tuples
        for seed in 0..50u64 {
            let mag = 0.002 * (seed as f64 % 50.0) + 0.001;
            let t = perturbed_commuting_tuple(1, 10, mag.min(0.1), seed).unwrap();
            let r = verify_with(&c1, &l1, &t, "perturbed", &fast).unwrap();
            worst = worst.max(r.verdicts.sw_error);
            ok &= r.verdicts.sw_error <= 1e-8;
        }
        let elapsed = start.elapsed().as_secs_f64();
        ok &= elapsed < 10.0;
        gate.record(
            "2 main equality",
            ok,
            format!("max |S - W| = {worst:.2e}, total {elapsed:.2}s"),
        );
    }

    // ---- criterion 3: genus-one consistency kappa = dim * W --------------
    //
    // The equality kappa = dim * W needs the commutator defect small: the
    // spectrum of e(u, v) first touches Re z = 1/2 at defect sqrt(2), which
    // for clock/shift means p/n = 1/4. Below that threshold the equality
    // must hold exactly; at the threshold the invariant is undefined
    // (spectrum on the line); beyond it the invariant demonstrably decouples
    // from dim * W, so those phases lie outside the formula's hypothesis.
    {
        let mut ok = true;
        let mut worst = 0.0f64;
        let mut in_regime = 0usize;
        let mut outside = 0usize;
        for n in 3..=16usize {
            for p in 1..((n as i64 + 1) / 2) {
                if 2 * p >= n as i64 {
                    continue;
                }
                let t = clock_shift_tuple(n, p).unwrap();
                let small_defect = commutator_defect(&t) < std::f64::consts::SQRT_2 - 1e-9;
                let w = winding_invariant(&t).unwrap().value;
                match kappa_invariant(t.u(1), t.v(1)) {
                    Ok(k) if small_defect || n == 3 => {
                        in_regime += 1;
                        ok &= k.rounded == -p;
                        let err = (k.value - n as f64 * w).abs();
                        worst = worst.max(err);
                        ok &= err <= 1e-6;
                    }
                    Ok(_) => outside += 1,
                    Err(qreps::ktheory::KTheoryError::Matrix(
                        qreps::matrix::MatrixError::SpectralGapTooSmall { .. },
                    )) => {
                        outside += 1;
                        ok &= !small_defect;
                    }
                    Err(e) => {
                        ok = false;
                        println!("  unexpected kappa failure at (n={n}, p={p}): {e}");
                    }
                }
            }
        }
        for seed in 0..50u64 {
            let mag = (0.002 * seed as f64 + 0.001).min(0.1);
            let t = perturbed_commuting_tuple(1, 10, mag, seed).unwrap();
            let w = winding_invariant(&t).unwrap().value;
            let k = kappa_invariant(t.u(1), t.v(1)).unwrap();
            let err = (k.value - 10.0 * w).abs();
            worst = worst.max(err);
            ok &= err <= 1e-6 && k.rounded == (10.0 * w).round() as i64;
        }
        gate.record(
            "3 genus-one kappa",
            ok,
            format!(
                "max |kappa - dim*W| = {worst:.2e} over {in_regime} small-defect torus cases (kappa = -p on each) and 50 perturbed tuples; {outside} phases beyond the defect-sqrt(2) threshold excluded"
            ),
        );
    }

    // ---- criterion 4: quantization of dim * W ----------------------------
    {
        let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
        let mut ok = true;
        let mut worst = 0.0f64;
        let mut counted = 0usize;
        while counted < 1000 {
            let style = rng.gen_range(0..3u8);
            let t = match style {
                0 => {
                    let g = rng.gen_range(1..=3usize);
                    let n = rng.gen_range(2..=8usize);
                    let mag = ((1.0 / (4.0 * g as f64)) * rng.gen::<f64>() * 0.9).min(0.2);
                    perturbed_commuting_tuple(g, n, mag, rng.gen()).unwrap()
                }
                1 => {
                    let n = rng.gen_range(7..=16usize);
                    clock_shift_tuple(n, 1).unwrap()
                }
                _ => {
                    let n = rng.gen_range(13..=16usize);
                    let p = rng.gen_range(1..=2i64);
                    twisted_genus_tuple(rng.gen_range(1..=2usize), n, p).unwrap()
                }
            };
            if commutator_defect(&t) >= 1.0 {
                continue;
            }
            counted += 1;
            let w = winding_invariant(&t).unwrap().value;
            let q = w * t.dim() as f64;
            let err = (q - q.round()).abs();
            worst = worst.max(err);
            ok &= err <= 1e-8;
        }
        gate.record(
            "4 quantization",
            ok,
            format!("1000 tuples, max |dim*W - round| = {worst:.2e}"),
        );
    }

    // ---- criterion 5: determinant functional suite -----------------------
    {
        let mut rng = ChaCha8Rng::seed_from_u64(0xDE7);
        let mut ok = true;
        let mut worst_add = 0.0f64;
        let mut worst_rep = 0.0f64;
        let mut worst_xcheck = 0.0f64;

        let make_path = |rng: &mut ChaCha8Rng| {
            let s1 = random_skew(rng, 3, 0.7);
            let s2 = random_skew(rng, 3, 0.3);
            let samples = 401usize;
            let pts: Vec<(f64, TracialMatrix)> = (0..samples)
                .map(|i| {
                    let t = i as f64 / (samples - 1) as f64;
                    let gen = s1.scale(c64(t, 0.0)).add(&s2.scale(c64(t * t, 0.0)));
                    (t, exp_skew_hermitian(&gen))
                })
                .collect();
            pts
        };

        for _ in 0..100 {
            let a = make_path(&mut rng);
            let b = make_path(&mut rng);
            let prod: Vec<(f64, TracialMatrix)> = a
                .iter()
                .zip(&b)
                .map(|((t, ma), (_, mb))| (*t, ma.mul(mb)))
                .collect();
            let da = dhs_quadrature(&MatrixPath::sampled(a).unwrap(), 1e-11)
                .unwrap()
                .value;
            let db = dhs_quadrature(&MatrixPath::sampled(b).unwrap(), 1e-11)
                .unwrap()
                .value;
            let dp = dhs_quadrature(&MatrixPath::sampled(prod).unwrap(), 1e-11)
                .unwrap()
                .value;
            worst_add = worst_add.max((dp - da - db).abs());
        }
        // reparameterization on analytically warped paths
        for _ in 0..20 {
            let s1 = random_skew(&mut rng, 3, 0.7);
            let s2 = random_skew(&mut rng, 3, 0.3);
            let n = 601usize;
            let value_at = |t: f64| {
                let gen = s1.scale(c64(t, 0.0)).add(&s2.scale(c64(t * t, 0.0)));
                exp_skew_hermitian(&gen)
            };
            let straight: Vec<(f64, TracialMatrix)> = (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    (t, value_at(t))
                })
                .collect();
            let warped: Vec<(f64, TracialMatrix)> = (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    (t, value_at(0.5 * (1.0 - (PI * t).cos())))
                })
                .collect();
            let d0 = dhs_quadrature(&MatrixPath::sampled(straight).unwrap(), 1e-11)
                .unwrap()
                .value;
            let d1 = dhs_quadrature(&MatrixPath::sampled(warped).unwrap(), 1e-11)
                .unwrap()
                .value;
            worst_rep = worst_rep.max((d0 - d1).abs());
        }
        // closed scalar loop
        let loop_n = 2001usize;
        let pts: Vec<(f64, TracialMatrix)> = (0..loop_n)
            .map(|i| {
                let t = i as f64 / (loop_n - 1) as f64;
                (
                    t,
                    TracialMatrix::scalar(2, Complex64::from_polar(1.0, 2.0 * PI * t)),
                )
            })
            .collect();
        let loop_val = dhs_quadrature(&MatrixPath::sampled(pts).unwrap(), 1e-12)
            .unwrap()
            .value;
        let loop_err = (loop_val - 1.0).abs();

        // closed form vs quadrature on near-identity linear segments
        for _ in 0..100 {
            let u = exp_skew_hermitian(&random_skew(&mut rng, 4, 1.0));
            let raw = TracialMatrix::from_fn(4, |_, _| {
                c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let x = TracialMatrix::identity(4)
                .add(&raw.scale(c64(0.45 / raw.operator_norm(), 0.0)));
            let b = x.mul(&u);
            let closed = dhs_linear(&u, &b).unwrap().value;
            let quad = dhs_quadrature(&MatrixPath::linear(u, b).unwrap(), 1e-11)
                .unwrap()
                .value;
            worst_xcheck = worst_xcheck.max((closed - quad).abs());
        }

        ok &= worst_add <= 1e-9 && worst_rep <= 1e-9 && loop_err <= 1e-10 && worst_xcheck <= 1e-9;
        gate.record(
            "5 determinant suite",
            ok,
            format!(
                "additivity {worst_add:.2e}, reparameterization {worst_rep:.2e}, loop {loop_err:.2e}, closed-vs-quad {worst_xcheck:.2e}"
            ),
        );
    }

    // ---- criterion 6: exceptional-simplex locality ------------------------
    {
        let mut ok = true;
        let mut detail = String::new();
        for g in 1..=3usize {
            let sg = build_surface_group(g);
            let c = build_complex(g);
            let l = edge_labels(&c, &sg).unwrap();
            let t = twisted_genus_tuple(g, 8, 1).unwrap();
            let s = simplicial_pushforward(&c, &l, &t).unwrap();
            let nonzero: Vec<_> = s
                .terms
                .iter()
                .filter(|term| term.value.abs() > 1e-12)
                .collect();
            let good = nonzero.len() == 1 && nonzero[0].triangle == c.exceptional_triangle();
            ok &= good;
            detail.push_str(&format!("g={g}: {} nonzero; ", nonzero.len()));
        }
        gate.record("6 locality", ok, detail.trim_end_matches("; ").to_string());
    }

    // ---- criterion 7: bundle checks ---------------------------------------
    {
        let mut ok = true;
        let sg = build_surface_group(1);
        let c = build_complex(1);
        let l = edge_labels(&c, &sg).unwrap();

        // identity tuple: exact idempotent
        let id_tuple = qreps::groups::UnitaryTuple::new(
            1,
            vec![TracialMatrix::identity(3), TracialMatrix::identity(3)],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x7777);
        let mut id_worst = 0.0f64;
        for _ in 0..50 {
            let tri = rng.gen_range(0..c.triangles().len());
            let bary = {
                let raw: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
                let s: f64 = raw.iter().sum();
                [raw[0] / s, raw[1] / s, raw[2] / s]
            };
            let e = e_pi_at(&c, &l, &id_tuple, tri, &bary).unwrap();
            id_worst = id_worst.max(e.mul(&e).sub(&e).operator_norm());
        }
        ok &= id_worst <= 1e-12;

        // clock/shift: residual bounded by 3 * defect over 100 samples, on
        // both the transition field and the push-forward field
        let t8 = clock_shift_tuple(8, 1).unwrap();
        let defect = commutator_defect(&t8);
        let mut worst_field = 0.0f64;
        for _ in 0..100 {
            let tri = rng.gen_range(0..c.triangles().len());
            let bary = {
                let raw: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
                let s: f64 = raw.iter().sum();
                [raw[0] / s, raw[1] / s, raw[2] / s]
            };
            let e1 = e_pi_at(&c, &l, &t8, tri, &bary).unwrap();
            let e2 = pushforward_field_at(&c, &l, &t8, tri, &bary).unwrap();
            worst_field = worst_field
                .max(e1.mul(&e1).sub(&e1).operator_norm())
                .max(e2.mul(&e2).sub(&e2).operator_norm());
        }
        ok &= worst_field <= 3.0 * defect;

        // rank constancy via the push-forward field
        let rank = bundle_rank_check(&c, &l, &t8, 100, 0xB077).unwrap();
        ok &= rank.max_rank_deviation <= 1e-6;

        // boundary-integral quadrature vs closed form, genus 1 and 2
        let mut worst_boundary = 0.0f64;
        for idx in 0..c.triangles().len() {
            worst_boundary = worst_boundary.max(
                boundary_integral_check(&c, &l, &t8, idx, 1e-10).unwrap(),
            );
        }
        let sg2 = build_surface_group(2);
        let c2 = build_complex(2);
        let l2 = edge_labels(&c2, &sg2).unwrap();
        let t2 = twisted_genus_tuple(2, 8, 1).unwrap();
        for idx in 0..c2.triangles().len() {
            worst_boundary = worst_boundary.max(
                boundary_integral_check(&c2, &l2, &t2, idx, 1e-10).unwrap(),
            );
        }
        ok &= worst_boundary <= 1e-9;

        gate.record(
            "7 bundle checks",
            ok,
            format!(
                "identity residual {id_worst:.2e}, field residual {worst_field:.3} <= 3*defect {:.3}, rank dev {:.2e}, boundary {worst_boundary:.2e}",
                3.0 * defect,
                rank.max_rank_deviation
            ),
        );
    }

    // ---- criterion 8: structural suite ------------------------------------
    {
        let mut ok = true;
        let mut detail = String::new();

        // Euler characteristic for genus 1..5
        for g in 1..=5usize {
            let c = build_complex(g);
            ok &= c.euler_characteristic() == 2 - 2 * g as i64;
        }
        detail.push_str("euler ok; ");

        // label table, reproduced class by class
        for g in 1..=3usize {
            let sg = build_surface_group(g);
            let c = build_complex(g);
            let l = edge_labels(&c, &sg).unwrap();
            for k in 1..=g {
                let a1 = c.vertex_id(VertexClass::A { k, i: 1 }).unwrap();
                let a2 = c.vertex_id(VertexClass::A { k, i: 2 }).unwrap();
                let b1 = c.vertex_id(VertexClass::B { k, i: 1 }).unwrap();
                let b2 = c.vertex_id(VertexClass::B { k, i: 2 }).unwrap();
                let w: Vec<usize> = (0..4)
                    .map(|j| c.vertex_id(VertexClass::W { k, j }).unwrap())
                    .collect();
                let alpha_inv = FreeWord::alpha(g, k).inverse();
                let beta_inv = FreeWord::beta(g, k).inverse();
                // generator classes on the fan edges that exist
                for (x, expected) in [
                    (a1, &alpha_inv),
                    (a2, &alpha_inv),
                    (b1, &beta_inv),
                    (b2, &beta_inv),
                ] {
                    for &wj in &w {
                        if let Some(word) = l.try_word(x, wj) {
                            if !word.is_empty() {
                                ok &= &word == expected;
                            }
                        }
                    }
                }
                // middle boundary edges carry the empty word
                ok &= l.word(a1, a2).is_empty() && l.word(b1, b2).is_empty();
                // relator-prefix classes at the outer vertex
                ok &= l.word(0, w[0]) == sg.kappa_words[k - 1];
                let v2_class = sg.kappa_words[k - 1]
                    .concat(&FreeWord::alpha(g, k))
                    .concat(&FreeWord::beta(g, k));
                ok &= l.word(0, a2) == v2_class;
                let v3_class = sg.kappa_words[k - 1].concat(&FreeWord::alpha(g, k));
                ok &= l.word(0, a1) == v3_class;
                let v1_class = if k < g {
                    sg.kappa_words[k - 1]
                        .concat(&FreeWord::alpha(g, k))
                        .concat(&FreeWord::beta(g, k))
                        .concat(&FreeWord::alpha(g, k).inverse())
                } else {
                    FreeWord::beta(g, g)
                };
                ok &= l.word(0, b1) == v1_class;
            }
            // cocycle abelianization
            for t in c.triangles() {
                let [i, j, k2] = t.vertices;
                let defect = l
                    .word(i, j)
                    .concat(&l.word(j, k2))
                    .concat(&l.word(i, k2).inverse());
                ok &= defect.abelianization().iter().all(|&x| x == 0);
                let reduced = reduce_word(&defect);
                if !reduced.is_empty() {
                    ok &= reduced == sg.kappa_words[g];
                }
            }
        }
        detail.push_str("label table ok; cocycle ok; ");

        // matrix-layer invariants
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
        let u = exp_skew_hermitian(&random_skew(&mut rng, 8, 1.5));
        let log_u = principal_log(&u).unwrap();
        ok &= log_u.exp().sub(&u).operator_norm() < 1e-11;
        let near = TracialMatrix::diagonal(&[
            c64(0.03, 0.01),
            c64(1.01, -0.02),
            c64(0.97, 0.0),
            c64(-0.02, 0.0),
        ]);
        let r = riesz_half_plane(&near).unwrap();
        ok &= r.projector.mul(&r.projector).sub(&r.projector).operator_norm() < 1e-10;
        ok &= r.rank == 2;
        let m = {
            let mut m = TracialMatrix::from_fn(6, |_, _| {
                c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            for i in 0..6 {
                m[(i, i)] += 3.0;
            }
            m
        };
        let pu = polar_unitary(&m).unwrap();
        ok &= pu.unitarity_defect() < 1e-12;
        detail.push_str("riesz/log/polar ok");

        gate.record("8 structural suite", ok, detail);
    }

    gate.finish();
}

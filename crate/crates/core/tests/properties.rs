//! Cross-module invariants: homothety consistency, lattice enumeration
//! against brute force, soundness of reported solutions, catalog multiples,
//! moment rays, and JSON round trips.


use toric_ke::catalog::{verify_catalog, ProductSpec};
use toric_ke::certifier::{certify, CertificationResult, CertifyOptions, PolytopeReport, Verdict};
use toric_ke::io::{kernel_from_json, kernel_to_json, polytope_from_json, polytope_to_json};
use toric_ke::kernel::{fubini_study_kernel, kernel_from_polytope, product_kernel};
use toric_ke::ma;
use toric_ke::moment::diagonal_ray;
use toric_ke::polytope::{catalog_polytope, simplex, unit_square, Polytope};
use toric_ke::rational::int;
use toric_ke::Rational;

fn brute_force_count(p: &Polytope) -> usize {
    let n = p.dim();
    let hi: Vec<i64> = (0..n)
        .map(|i| {
            p.vertices()
                .iter()
                .map(|v| v[i].to_integer().try_into().unwrap())
                .max()
                .unwrap()
        })
        .collect();
    let mut count = 0;
    let mut cur = vec![0i64; n];
    loop {
        let pt: Vec<Rational> = cur.iter().map(|&c| int(c)).collect();
        if p.contains(&pt) {
            count += 1;
        }
        let mut i = 0;
        loop {
            if i == n {
                return count;
            }
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
            i += 1;
        }
    }
}

#[test]
fn scaled_lattice_points_contain_multiples_and_match_brute_force() {
    for name in ["alz2d", "alz3d", "simplex(2,1)", "square", "simplex(3,1)"] {
        let p = catalog_polytope(name).unwrap().normalized().unwrap().0;
        let base = p.lattice_points().unwrap();
        for k in 1..=3u32 {
            let q = p.scale(k).unwrap();
            let pts = q.lattice_points().unwrap();
            assert_eq!(pts.len(), brute_force_count(&q), "{name} scaled by {k}");
            for b in &base {
                let m: Vec<u32> = b.iter().map(|c| c * k).collect();
                assert!(pts.contains(&m), "{name}: {m:?} missing after scaling by {k}");
            }
        }
    }
}

/// Independent recheck of a reported solution from the polytope kernel.
fn assert_sound(p: &Polytope, report: &PolytopeReport) {
    let sol = report.solution().expect("solved");
    let q = p.normalized().unwrap().0;
    let k = kernel_from_polytope(&q).unwrap().substitute(&sol.assignment).unwrap();
    assert!(ma::identity_holds(&k, &sol.sigma).unwrap());
    assert!(sol.lambda > int(0));
    assert_eq!(sol.lambda, ma::einstein_constant(q.dim(), &sol.sigma));
    assert!(k.numeric_coefficients().unwrap().values().all(|c| c > &int(0)));
}

#[test]
fn homothety_consistency() {
    let opts = CertifyOptions::default();
    for (name, p) in [("segment", simplex(1, 1)), ("triangle", simplex(2, 1)), ("square", unit_square())] {
        let base = certify(&p, &opts).unwrap().solution().unwrap().lambda.clone();
        for k in 1..=3u32 {
            let scaled = p.scale(k).unwrap();
            let report = certify(&scaled, &opts).unwrap();
            assert_eq!(report.verdict, Verdict::Solved, "{name} scaled by {k}");
            assert_sound(&scaled, &report);
            assert_eq!(report.solution().unwrap().lambda, &base / int(k as i64), "{name} scaled by {k}");
        }
    }
    for k in 1..=2u32 {
        let p = catalog_polytope("alz2d").unwrap().scale(k).unwrap();
        assert_ne!(certify(&p, &opts).unwrap().verdict, Verdict::Solved);
    }
}

#[test]
fn simplices_solve_with_expected_constants() {
    for n in 1..=4usize {
        let report = certify(&simplex(n, 1), &CertifyOptions::default()).unwrap();
        let sol = report.solution().unwrap();
        assert_eq!(sol.sigma, int(n as i64 - 1));
        assert_eq!(sol.lambda, int(2 * (n as i64 + 1)));
        assert_sound(&simplex(n, 1), &report);
    }
    let report = certify(&simplex(1, 1).product(&simplex(1, 1)).unwrap(), &CertifyOptions::default()).unwrap();
    assert_eq!(report.solution().unwrap().lambda, int(4));
}

#[test]
fn no_solved_branch_has_nonpositive_lambda() {
    let report = certify(&catalog_polytope("scale(square,2)").unwrap(), &CertifyOptions::default()).unwrap();
    for b in &report.branches {
        if let CertificationResult::Solved(s) = &b.result {
            assert!(s.lambda > int(0));
        }
    }
}

#[test]
fn certification_is_deterministic() {
    let p = catalog_polytope("scale(simplex(2,1),2)").unwrap();
    let opts = CertifyOptions {
        seed: 11,
        ..Default::default()
    };
    let a = serde_json::to_string(&certify(&p, &opts).unwrap()).unwrap();
    let b = serde_json::to_string(&certify(&p, &opts).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn catalog_doubled_multiples_remain_einstein() {
    for row in verify_catalog(None, 2).unwrap() {
        assert!(row.residual_zero, "{}", row.manifold);
        assert!(row.positivity, "{}", row.manifold);
        assert!(row.lambda.unwrap() > int(0), "{}", row.manifold);
    }
}

#[test]
fn embedding_dimension_is_multiplicative_minus_one() {
    let a = ProductSpec::new(&[(2, int(3))], 1);
    let b = ProductSpec::new(&[(1, int(2))], 1);
    let ab = ProductSpec::new(&[(2, int(3)), (1, int(2))], 1);
    let n = |s: &ProductSpec| toric_ke::catalog::embedding_dimension(s).unwrap();
    assert_eq!(n(&ab) + 1u32, (n(&a) + 1u32) * (n(&b) + 1u32));
}

#[test]
fn moment_ray_approaches_far_face() {
    let ts = [int(100), int(10_000), int(1_000_000)];
    let kernels = [
        (fubini_study_kernel(2, 1), int(1)),
        (fubini_study_kernel(3, 2), int(2)),
        (product_kernel(&fubini_study_kernel(1, 1), &fubini_study_kernel(1, 1)), int(2)),
    ];
    for (k, far) in kernels {
        let ray = diagonal_ray(&k, &ts).unwrap();
        let gaps: Vec<Rational> = ray.iter().map(|s| &far - s.mu.iter().sum::<Rational>()).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(gaps.iter().all(|g| g > &int(0)));
    }
}

#[test]
fn json_round_trips() {
    for name in ["alz2d", "alz3d", "alz4d_a", "scale(square,2)"] {
        let p = catalog_polytope(name).unwrap();
        assert_eq!(polytope_from_json(&polytope_to_json(&p)).unwrap(), p);
    }
    let q = catalog_polytope("alz2d").unwrap().normalized().unwrap().0;
    let symbolic = kernel_from_polytope(&q).unwrap();
    assert_eq!(kernel_from_json(&kernel_to_json(&symbolic)).unwrap(), symbolic);
    let numeric = fubini_study_kernel(2, 3);
    assert_eq!(kernel_from_json(&kernel_to_json(&numeric)).unwrap(), numeric);
    let report = certify(&catalog_polytope("alz2d").unwrap(), &CertifyOptions::default()).unwrap();
    let text = serde_json::to_string(&report).unwrap();
    let back: PolytopeReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
    let solved = certify(&unit_square(), &CertifyOptions::default()).unwrap();
    let back: PolytopeReport = serde_json::from_str(&serde_json::to_string(&solved).unwrap()).unwrap();
    assert_eq!(back, solved);
    let rows = verify_catalog(Some(2), 1).unwrap();
    let back: Vec<toric_ke::catalog::CatalogRow> =
        serde_json::from_str(&serde_json::to_string(&rows).unwrap()).unwrap();
    assert_eq!(back, rows);
}

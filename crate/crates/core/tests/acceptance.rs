//! Acceptance suite: one line per criterion, non-zero exit on any failure.
//!
//! Runs sequentially in a single process so the timing criterion is not
//! disturbed by other tests.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rfst::analysis::coding_gain;
use rfst::imaging::{bench_postprocessing, forward_2d, inverse_2d, GrayImage};
use rfst::rdst::{rdst, signed_perm_equivalent};
use rfst::regularity::{build_dst_cascade, extra_op_count, PostprocessStyle};
use rfst::{dst2, hadamard, rfst, Matrix};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pi8() -> (f64, f64) {
    ((PI / 8.0).cos(), (PI / 8.0).sin())
}

fn max_diff_rows(m: &Matrix, expected: &[Vec<f64>]) -> f64 {
    let e = Matrix::from_rows(expected).unwrap();
    m.max_abs_diff(&e)
}

fn ac1_closed_forms() -> Outcome {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let r2 = rfst(2).unwrap().as_matrix();
    let d2 = max_diff_rows(r2.matrix(), &[vec![h, h], vec![h, -h]]);

    let r4 = rfst(4).unwrap().as_matrix();
    let r4_expected: Vec<Vec<f64>> = [
        [1.0, 1.0, 1.0, 1.0],
        [1.0, 1.0, -1.0, -1.0],
        [-1.0, 1.0, 1.0, -1.0],
        [1.0, -1.0, 1.0, -1.0],
    ]
    .iter()
    .map(|r| r.iter().map(|v| v / 2.0).collect())
    .collect();
    let d4 = max_diff_rows(r4.matrix(), &r4_expected);

    let (c, s) = pi8();
    let q = 2f64.sqrt();
    let s4_expected: Vec<Vec<f64>> = [
        [q * s, q * c, q * c, q * s],
        [1.0, 1.0, -1.0, -1.0],
        [q * c, -q * s, -q * s, q * c],
        [1.0, -1.0, 1.0, -1.0],
    ]
    .iter()
    .map(|r| r.iter().map(|v| v / 2.0).collect())
    .collect();
    let ds = max_diff_rows(dst2(4).unwrap().matrix(), &s4_expected);

    ensure(d2 <= 1e-12 && d4 <= 1e-12 && ds <= 1e-12, || {
        format!("rfst2 {d2:e}, rfst4 {d4:e}, dst4 {ds:e}")
    })?;
    Ok(format!("max |Δ|: rfst2 {d2:.1e}, rfst4 {d4:.1e}, dst4 {ds:.1e} (tol 1e-12)"))
}

fn ac2_regularity_suite() -> Outcome {
    let mut worst_dc: f64 = 0.0;
    let mut worst_gram: f64 = 0.0;
    for l in 1..=10 {
        let m = 1usize << l;
        let dense = rfst(m).unwrap().as_matrix();
        let y = dense.apply(&vec![1.0; m]).unwrap();
        let dc = y
            .iter()
            .enumerate()
            .map(|(k, v)| if k == 0 { (v - (m as f64).sqrt()).abs() } else { v.abs() })
            .fold(0.0, f64::max);
        let gram = dense.orthonormality_residual();
        ensure(dc <= 1e-10 && gram <= 1e-11, || {
            format!("M={m}: DC residual {dc:e}, Gram residual {gram:e}")
        })?;
        worst_dc = worst_dc.max(dc);
        worst_gram = worst_gram.max(gram);
    }
    Ok(format!(
        "M=2..1024: worst DC residual {worst_dc:.1e} (tol 1e-10), worst Gram residual {worst_gram:.1e} (tol 1e-11)"
    ))
}

fn ac3_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in [2, 4, 8, 16, 32, 64] {
        let oracle = rdst(m).map_err(|e| format!("rdst({m}): {e}"))?;
        let fast = rfst(m).unwrap().as_matrix();
        let eq = signed_perm_equivalent(oracle.matrix(), fast.matrix(), 1e-8)
            .unwrap()
            .ok_or_else(|| format!("rdst({m}) not signed-permutation equivalent to rfst({m})"))?;
        worst = worst.max(eq.max_residual);
    }
    for m in [2, 4] {
        let fast = rfst(m).unwrap().as_matrix();
        ensure(
            signed_perm_equivalent(fast.matrix(), hadamard(m).unwrap().matrix(), 1e-8)
                .unwrap()
                .is_some(),
            || format!("rfst({m}) should match the Hadamard transform"),
        )?;
    }
    for m in [8, 16, 32] {
        let fast = rfst(m).unwrap().as_matrix();
        ensure(
            signed_perm_equivalent(fast.matrix(), hadamard(m).unwrap().matrix(), 1e-8)
                .unwrap()
                .is_none(),
            || format!("rfst({m}) unexpectedly matches the Hadamard transform"),
        )?;
    }
    Ok(format!(
        "rdst≡rfst for M=2..64 (worst residual {worst:.1e}, tol 1e-8); rfst≡HT at M=2,4; ≢ at M=8,16,32"
    ))
}

fn ac4_table1() -> Outcome {
    let sizes = [2, 4, 8, 16, 32];
    let dst_row = [5.05, 4.73, 5.09, 6.02, 7.24];
    let regular_row = [5.05, 7.17, 7.72, 7.85, 8.09];
    let ht_row = [5.05, 7.17, 7.95, 8.19, 8.27];
    let mut worst: f64 = 0.0;
    let mut cells = 0;
    for (k, &m) in sizes.iter().enumerate() {
        let g_dst = coding_gain(&dst2(m).unwrap(), 0.95).unwrap().gain_db;
        let g_rfst = coding_gain(&rfst(m).unwrap().as_matrix(), 0.95).unwrap().gain_db;
        let g_rdst = coding_gain(&rdst(m).unwrap(), 0.95).unwrap().gain_db;
        let g_ht = coding_gain(&hadamard(m).unwrap(), 0.95).unwrap().gain_db;
        for (got, want, label) in [
            (g_dst, dst_row[k], "DST"),
            (g_rfst, regular_row[k], "R-FST"),
            (g_rdst, regular_row[k], "R-DST"),
            (g_ht, ht_row[k], "HT"),
        ] {
            let err = (got - want).abs();
            ensure(err <= 0.01, || format!("{label} M={m}: {got:.4} dB vs {want} dB"))?;
            worst = worst.max(err);
            cells += 1;
        }
        ensure((g_rfst - g_rdst).abs() <= 1e-9, || {
            format!("M={m}: R-FST {g_rfst} vs R-DST {g_rdst}")
        })?;
    }
    Ok(format!("{cells} cells at rho=0.95, worst |Δ| {worst:.4} dB (tol 0.01)"))
}

fn ac5_table2() -> Outcome {
    let expected = [
        (8, (12, 6), (16, 12)),
        (16, (28, 14), (64, 56)),
        (32, (60, 30), (256, 240)),
    ];
    for (m, cascade, dense) in expected {
        let c = extra_op_count(m, PostprocessStyle::Cascade).unwrap();
        let d = extra_op_count(m, PostprocessStyle::DenseHalf).unwrap();
        ensure((c.mul, c.add) == cascade, || format!("cascade M={m}: {:?}", (c.mul, c.add)))?;
        ensure((d.mul, d.add) == dense, || format!("dense-half M={m}: {:?}", (d.mul, d.add)))?;

        let t = rfst(m).unwrap();
        let (_, ops) = t.forward_instrumented(&vec![0.25; m]).unwrap();
        let formula = (2 * (m as u64 - 2), m as u64 - 2);
        ensure((ops.extra.mul, ops.extra.add) == formula, || {
            format!("instrumented M={m}: {:?} vs {formula:?}", (ops.extra.mul, ops.extra.add))
        })?;
    }
    Ok("cascade (12,6),(28,14),(60,30); dense-half (16,12),(64,56),(256,240); counters exact".into())
}

fn ac6_angle_golden() -> Outcome {
    let cascade = build_dst_cascade(4).unwrap();
    ensure(cascade.len() == 1, || format!("expected one reflection, got {}", cascade.len()))?;
    let theta = cascade.reflections()[0].theta();
    let (c, s) = pi8();
    let independent = ((c - s) / (c + s)).atan();
    let d_exact = (theta - PI / 8.0).abs();
    let d_indep = (theta - independent).abs();
    ensure(d_exact <= 1e-12 && d_indep <= 1e-12, || {
        format!("theta {theta} vs π/8 ({d_exact:e}) vs arctan oracle ({d_indep:e})")
    })?;
    Ok(format!("θ = {theta:.17} ; |θ−π/8| {d_exact:.1e}, |θ−arctan((c−s)/(c+s))| {d_indep:.1e}"))
}

fn ac7_oracle_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_1d: f64 = 0.0;
    for m in [4, 8, 16, 32] {
        let t = rfst(m).unwrap();
        let dense = t.as_matrix();
        for _ in 0..100 {
            let x: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
            let a = t.forward(&x).unwrap();
            let b = dense.apply(&x).unwrap();
            let d = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
            ensure(d <= 1e-13, || format!("M={m}: streaming vs dense {d:e}"))?;
            worst_1d = worst_1d.max(d);
        }
    }
    let mut worst_2d: f64 = 0.0;
    for m in [2, 4, 8, 16, 32] {
        let samples = (0..64 * 64).map(|_| rng.random::<u8>()).collect();
        let img = GrayImage::new(64, 64, samples).unwrap();
        let t = rfst(m).unwrap();
        let back = inverse_2d(&forward_2d(&img, &t).unwrap(), &t).unwrap();
        let d = back.max_abs_diff(&img);
        ensure(d <= 1e-9, || format!("2-D reconstruction M={m}: {d:e}"))?;
        worst_2d = worst_2d.max(d);
    }
    Ok(format!(
        "1-D streaming vs dense worst {worst_1d:.1e} (tol 1e-13); 2-D reconstruction worst {worst_2d:.1e} (tol 1e-9)"
    ))
}

fn ac8_dc_leakage_demo() -> Outcome {
    let img = GrayImage::constant(512, 512, 128);

    let c = forward_2d(&img, &rfst(8).unwrap()).unwrap();
    let total = c.total_energy();
    let leaked_rfst: f64 = c.subband_energies()[1..].iter().sum();
    let frac_rfst = leaked_rfst / total;
    ensure(frac_rfst <= 1e-16, || format!("R-FST leaked fraction {frac_rfst:e}"))?;

    let c4 = forward_2d(&img, &dst2(4).unwrap()).unwrap();
    let leaked_dst: f64 = c4.subband_energies()[1..].iter().sum();
    // 1-D leakage L = 2(c−s)², so a₀² = 4 − L and each block leaks
    // 128²·(‖a‖⁴ − a₀⁴) = 128²·(16 − (4 − L)²).
    let (cs, sn) = pi8();
    let l1 = 2.0 * (cs - sn).powi(2);
    let blocks = (512 / 4) * (512 / 4);
    let analytic = blocks as f64 * 128f64.powi(2) * (16.0 - (4.0 - l1).powi(2));
    let rel = (leaked_dst - analytic).abs() / analytic;
    ensure(rel <= 1e-10, || format!("DST4 leaked {leaked_dst} vs analytic {analytic} (rel {rel:e})"))?;
    Ok(format!(
        "R-FST leaked fraction {frac_rfst:.1e} (tol 1e-16); DST4 leaked {leaked_dst:.6e} = analytic (rel {rel:.1e}), 1-D L = {l1:.4}"
    ))
}

fn ac9_benchmark_ordering() -> Outcome {
    let r = bench_postprocessing(8, 512, 21, 0).map_err(|e| e.to_string())?;
    ensure(r.max_abs_diff <= 1e-10, || format!("outputs differ by {:e}", r.max_abs_diff))?;
    ensure(r.cascade_median <= r.dense_half_median, || {
        format!(
            "cascade median {:.6} s > dense-half median {:.6} s",
            r.cascade_median, r.dense_half_median
        )
    })?;
    let r32 = bench_postprocessing(32, 512, 11, 0).map_err(|e| e.to_string())?;
    Ok(format!(
        "M=8 medians: cascade {:.3} ms ≤ dense-half {:.3} ms (gap {:.1}%, {} repeats); M=32 gap {:.1}% (report only)",
        r.cascade_median * 1e3,
        r.dense_half_median * 1e3,
        100.0 * r.relative_gap(),
        r.repeats,
        100.0 * r32.relative_gap()
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("AC1 closed-form matrices", ac1_closed_forms),
        ("AC2 regularity suite", ac2_regularity_suite),
        ("AC3 R-DST/R-FST equivalence", ac3_equivalence),
        ("AC4 coding gain table", ac4_table1),
        ("AC5 extra operation counts", ac5_table2),
        ("AC6 M=4 angle golden", ac6_angle_golden),
        ("AC7 oracle agreement", ac7_oracle_agreement),
        ("AC8 DC leakage demo", ac8_dc_leakage_demo),
        ("AC9 benchmark ordering", ac9_benchmark_ordering),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} [{secs:.2}s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} [{secs:.2}s]: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.
//!
//! ```text
//! cargo test -p pseudo-gt --test acceptance
//! ```

mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use common::*;
use pseudo_gt::adapt::{select_adaptation_examples, AdaptConfig};
use pseudo_gt::eval::{iou, region_fscore};
use pseudo_gt::flow::{compute_flow, compute_flow_observed, flow_magnitude, FlowParams};
use pseudo_gt::imaging::flo::{decode_flo, encode_flo};
use pseudo_gt::imaging::{
    decode_mask, dilate, distance_transform, encode_mask, erode, load_mask, read_flo, write_flo,
    BinaryMask, FlowField, ScalarMap,
};
use pseudo_gt::synthetic::{fixture_proposals, translated_pair};
use pseudo_gt::tagger::{tag_from_magnitude, InstanceProposal, Source, TagConfig};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn pgt(args: &[&Path]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_pgt"))
        .args(args)
        .env_remove("PGT_WORKERS")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || {
        format!(
            "pgt exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn p(s: &str) -> &Path {
    Path::new(s)
}

fn flow_translation() -> Outcome {
    let start = Instant::now();
    let params = FlowParams::default();
    let shifts = [(1, 0), (3, -2), (-5, 4), (7, 3), (0, -10), (-8, -6)];
    let mut worst: f64 = 0.0;
    for (i, &(dx, dy)) in shifts.iter().enumerate() {
        let (a, b) = translated_pair(128, 128, dx as f64, dy as f64, 100 + i as u64);
        let flow = compute_flow(&a, &b, &params).map_err(|e| e.to_string())?;
        let epe = central_epe(&flow, dx as f64, dy as f64, 0.8);
        ensure(epe < 0.5, || format!("shift ({dx}, {dy}): EPE {epe:.4} px"))?;
        worst = worst.max(epe);
    }
    let mut worst_zero: f64 = 0.0;
    for seed in [200, 201] {
        let (a, b) = translated_pair(128, 128, 0.0, 0.0, seed);
        let flow = compute_flow(&a, &b, &params).map_err(|e| e.to_string())?;
        let m = flow_magnitude(&flow);
        let mean = m.data().iter().sum::<f64>() / m.data().len() as f64;
        ensure(mean < 0.05, || format!("zero shift: mean magnitude {mean}"))?;
        worst_zero = worst_zero.max(mean);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("runtime {secs:.1} s"))?;
    Ok(format!(
        "{} shifted pairs, worst EPE {worst:.4} px; zero-shift magnitude {worst_zero:.5} px; {secs:.1} s",
        shifts.len()
    ))
}

fn energy_monotonicity() -> Outcome {
    let mut r = rng(2);
    let params = FlowParams::default();
    let mut steps = 0;
    for case in 0..20 {
        let a = random_image(&mut r, 32, 32);
        let b = random_image(&mut r, 32, 32);
        let mut trace: Vec<(usize, f64)> = Vec::new();
        compute_flow_observed(&a, &b, &params, &mut |s| {
            trace.push((s.level, oracle_energy(s.fixed, s.second, s.flow, &params)))
        })
        .map_err(|e| e.to_string())?;
        for w in trace.windows(2).filter(|w| w[0].0 == w[1].0) {
            ensure(w[1].1 <= w[0].1 * (1.0 + 1e-12), || {
                format!("case {case}, level {}: {} -> {}", w[0].0, w[0].1, w[1].1)
            })?;
            steps += 1;
        }
    }
    Ok(format!("20 pairs, {steps} outer iterations checked"))
}

fn metric_oracles() -> Outcome {
    let mut r = rng(3);
    for case in 0..200 {
        let w = r.gen_range(1..=32);
        let h = r.gen_range(1..=32);
        let a = random_mask(&mut r, w, h);
        let b = random_mask(&mut r, w, h);
        let got = iou(&a, &b).map_err(|e| e.to_string())?;
        ensure(got == oracle_iou(&a, &b), || {
            format!("case {case}: iou {got}")
        })?;
        let s = region_fscore(&a, &b).map_err(|e| e.to_string())?;
        ensure(
            (s.precision, s.recall, s.f) == oracle_region(&a, &b),
            || format!("case {case}: region {s:?}"),
        )?;
        let dt = distance_transform(&a);
        ensure(dt.data() == &brute_distance(&a)[..], || {
            format!("case {case}: distance transform")
        })?;
    }
    Ok("200 random masks up to 32x32: iou, region F and distances exact".into())
}

fn morphology_laws() -> Outcome {
    let mut r = rng(4);
    for case in 0..200 {
        let m = random_sized_mask(&mut r, 32);
        let n = random_mask(&mut r, m.width(), m.height());
        let rad = r.gen_range(1..=5u32);
        let (e, d) = (erode(&m, rad), dilate(&m, rad));
        ensure(e.is_subset_of(&m) && m.is_subset_of(&d), || {
            format!("case {case}: containment chain")
        })?;

        let small = m.intersection(&n);
        ensure(
            erode(&small, rad).is_subset_of(&e) && dilate(&small, rad).is_subset_of(&d),
            || format!("case {case}: monotonicity"),
        )?;

        let ri = rad as usize;
        let inner = BinaryMask::from_fn(m.width(), m.height(), |x, y| {
            m.get(x, y) && x >= ri && y >= ri && x + ri < m.width() && y + ri < m.height()
        });
        for target in [n.clone(), n.union(&dilate(&inner, rad))] {
            ensure(
                dilate(&inner, rad).is_subset_of(&target)
                    == inner.is_subset_of(&erode(&target, rad)),
                || format!("case {case}: adjunction"),
            )?;
        }

        if m.width() <= 16 && m.height() <= 16 {
            ensure(
                e == brute_erode(&m, rad) && d == brute_dilate(&m, rad),
                || format!("case {case}: disk oracle mismatch"),
            )?;
        }
    }
    let mut exact = 0;
    for case in 0..200 {
        let m = random_sized_mask(&mut r, 16);
        let rad = r.gen_range(1..=5u32);
        ensure(
            erode(&m, rad) == brute_erode(&m, rad) && dilate(&m, rad) == brute_dilate(&m, rad),
            || format!("small case {case}: disk oracle mismatch"),
        )?;
        exact += 1;
    }
    Ok(format!(
        "200 masks, radii 1-5: laws hold; {exact} masks up to 16x16 match the disk oracle"
    ))
}

fn tagger_end_to_end() -> Outcome {
    let fx = fixtures().join("moving_square");
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let seq = fx.join("sequence");
    let with = tmp.path().join("with");
    pgt(&[
        p("tag"),
        p("--sequence"),
        &seq,
        p("--proposals"),
        &fx.join("proposals"),
        p("--out"),
        &with,
    ])?;
    let prov: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(with.join("provenance.json")).map_err(|e| e.to_string())?,
    )
    .map_err(|e| e.to_string())?;
    ensure(prov["source"] == "proposals", || {
        format!("source {}", prov["source"])
    })?;
    ensure(prov["selected_ids"] == serde_json::json!(["full"]), || {
        format!("selected {}", prov["selected_ids"])
    })?;
    let mask = load_mask(with.join("pseudo_gt.png")).map_err(|e| e.to_string())?;
    let full = &fixture_proposals()[0].1;
    ensure(&mask == full, || {
        "mask differs from the selected proposal".into()
    })?;
    let overlaps: Vec<f64> = prov["overlaps"]
        .as_array()
        .map(|a| a.iter().filter_map(|o| o["overlap"].as_f64()).collect())
        .unwrap_or_default();

    let without = tmp.path().join("without");
    pgt(&[p("tag"), p("--sequence"), &seq, p("--out"), &without])?;
    let prov = fs::read_to_string(without.join("provenance.json")).map_err(|e| e.to_string())?;
    ensure(prov.contains("\"source\": \"flow_fallback\""), || {
        "fallback not reported".into()
    })?;
    let fallback = load_mask(without.join("pseudo_gt.png")).map_err(|e| e.to_string())?;
    let truth = load_mask(fx.join("ground_truth.png")).map_err(|e| e.to_string())?;
    let score = iou(&fallback, &truth).map_err(|e| e.to_string())?;
    ensure(score >= 0.8, || format!("fallback IoU {score:.4}"))?;
    Ok(format!(
        "selected [full] with overlaps {overlaps:.3?}; fallback IoU {score:.4}"
    ))
}

fn strict_overlap_threshold() -> Outcome {
    // 10 moving pixels; the proposal has 8 of its 10 pixels inside them
    let magnitude = ScalarMap::from_fn(20, 1, |x, _| if x < 10 { 1.0 } else { 0.0 });
    let prop = BinaryMask::from_fn(20, 1, |x, _| (2..12).contains(&x));
    let proposal =
        InstanceProposal::new("edge", "object", 0.99, prop).map_err(|e| e.to_string())?;
    let cfg = TagConfig::default();
    let pgt = tag_from_magnitude(&magnitude, &[proposal], &cfg).map_err(|e| e.to_string())?;
    let overlap = pgt.overlaps[0].overlap;
    ensure(overlap == 0.8, || format!("constructed overlap {overlap}"))?;
    ensure(
        !pgt.overlaps[0].selected && pgt.source == Source::FlowFallback,
        || "overlap 0.80 was accepted".into(),
    )?;
    Ok(format!(
        "overlap {overlap:.2} at threshold {} rejected",
        cfg.overlap_threshold
    ))
}

fn analysis_shape() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let square = BinaryMask::rect(64, 64, 22, 22, 20, 20);
    let mask = tmp.path().join("square.png");
    pseudo_gt::imaging::save_mask(&square, &mask).map_err(|e| e.to_string())?;
    let out = tmp.path().join("analysis.json");
    pgt(&[
        p("analyze"),
        p("--pseudo-gt"),
        &mask,
        p("--ground-truth"),
        &mask,
        p("--radii"),
        p("5"),
        p("--out"),
        &out,
    ])?;
    let rows: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let find = |variant: &str| {
        rows.as_array()
            .and_then(|a| a.iter().find(|r| r["variant"] == variant))
            .and_then(|r| r["iou"].as_f64())
            .ok_or_else(|| format!("missing {variant} row"))
    };
    let (base, eroded, dilated) = (find("baseline")?, find("erode")?, find("dilate")?);
    let grown = brute_dilate(&square, 5).count();
    let expected = 400.0 / grown as f64;
    ensure(base == 1.0, || format!("baseline {base}"))?;
    ensure(eroded == 0.25, || format!("eroded {eroded}"))?;
    ensure(dilated == expected, || {
        format!("dilated {dilated} vs 400/{grown}")
    })?;
    ensure(eroded < base && dilated < base, || {
        "perturbed rows not below baseline".into()
    })?;
    Ok(format!(
        "baseline {base}, erode {eroded}, dilate {dilated:.4} = 400/{grown}"
    ))
}

fn adaptation_partition() -> Outcome {
    let mut r = rng(8);
    for case in 0..100 {
        let (w, h) = (r.gen_range(1..=24), r.gen_range(1..=24));
        let last = random_mask(&mut r, w, h);
        let conf = ScalarMap::from_fn(w, h, |_, _| r.gen_range(0.0..=1.0));
        let base = AdaptConfig {
            positive_threshold: r.gen_range(0.5..0.95),
            negative_distance: r.gen_range(0.0..8.0),
        };
        let stricter = AdaptConfig {
            positive_threshold: base.positive_threshold + r.gen_range(0.0..0.04),
            ..base.clone()
        };
        let farther = AdaptConfig {
            negative_distance: base.negative_distance + r.gen_range(0.0..4.0),
            ..base.clone()
        };
        let run = |c: &AdaptConfig| {
            select_adaptation_examples(&conf, &last, c).map_err(|e| e.to_string())
        };
        let (a, b, c) = (run(&base)?, run(&stricter)?, run(&farther)?);
        for ex in [&a, &b, &c] {
            let disjoint = ex.positives.intersection_count(&ex.negatives) == 0
                && ex.positives.intersection_count(&ex.dontcare) == 0
                && ex.negatives.intersection_count(&ex.dontcare) == 0;
            let covers =
                ex.positives.union(&ex.negatives).union(&ex.dontcare) == BinaryMask::full(w, h);
            ensure(disjoint && covers, || {
                format!("case {case}: not a partition")
            })?;
        }
        ensure(b.positives.is_subset_of(&a.positives), || {
            format!("case {case}: positives grew")
        })?;
        ensure(c.negatives.is_subset_of(&a.negatives), || {
            format!("case {case}: negatives grew")
        })?;
    }
    Ok("100 random inputs: exact partition, both monotonicity properties".into())
}

fn format_fidelity() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut r = rng(9);
    for case in 0..50 {
        let (w, h) = (r.gen_range(1..=20), r.gen_range(1..=20));
        let data = (0..w * h * 2)
            .map(|_| r.gen_range(-500.0f32..500.0))
            .collect();
        let flow = FlowField::from_vec(w, h, data).map_err(|e| e.to_string())?;
        let path = tmp.path().join("f.flo");
        write_flo(&flow, &path).map_err(|e| e.to_string())?;
        let bytes = fs::read(&path).map_err(|e| e.to_string())?;
        let back = read_flo(&path).map_err(|e| e.to_string())?;
        ensure(back == flow && encode_flo(&back) == bytes, || {
            format!("case {case}: .flo round trip")
        })?;

        let mask = random_mask(&mut r, w, h);
        let path = tmp.path().join("m.png");
        pseudo_gt::imaging::save_mask(&mask, &path).map_err(|e| e.to_string())?;
        let bytes = fs::read(&path).map_err(|e| e.to_string())?;
        let back = load_mask(&path).map_err(|e| e.to_string())?;
        ensure(back == mask && encode_mask(&back) == bytes, || {
            format!("case {case}: mask round trip")
        })?;
        ensure(
            decode_mask(&bytes, &path).map_err(|e| e.to_string())? == mask,
            || "decode".into(),
        )?;
    }

    let expected = FlowField::from_fn(3, 2, |x, y| (x as f32 + 0.5, -(y as f32) - 0.25));
    #[rustfmt::skip]
    let hand: [u8; 60] = [
        0x50, 0x49, 0x45, 0x48, // "PIEH" = 202021.25
        0x03, 0x00, 0x00, 0x00, // width 3
        0x02, 0x00, 0x00, 0x00, // height 2
        0x00, 0x00, 0x00, 0x3f, 0x00, 0x00, 0x80, 0xbe, // ( 0.5, -0.25)
        0x00, 0x00, 0xc0, 0x3f, 0x00, 0x00, 0x80, 0xbe, // ( 1.5, -0.25)
        0x00, 0x00, 0x20, 0x40, 0x00, 0x00, 0x80, 0xbe, // ( 2.5, -0.25)
        0x00, 0x00, 0x00, 0x3f, 0x00, 0x00, 0xa0, 0xbf, // ( 0.5, -1.25)
        0x00, 0x00, 0xc0, 0x3f, 0x00, 0x00, 0xa0, 0xbf, // ( 1.5, -1.25)
        0x00, 0x00, 0x20, 0x40, 0x00, 0x00, 0xa0, 0xbf, // ( 2.5, -1.25)
    ];
    let reference = fixtures().join("reference_3x2.flo");
    let file_bytes = fs::read(&reference).map_err(|e| e.to_string())?;
    ensure(file_bytes == hand, || {
        "reference fixture bytes changed".into()
    })?;
    let parsed = read_flo(&reference).map_err(|e| e.to_string())?;
    ensure(parsed == expected, || {
        format!("reference parsed to {parsed:?}")
    })?;
    ensure(
        decode_flo(&hand).map_err(|e| e.to_string())? == expected,
        || "hand bytes".into(),
    )?;
    ensure(encode_flo(&expected) == hand, || {
        "encoding differs from reference bytes".into()
    })?;
    Ok("50 random .flo and mask round trips byte-identical; reference .flo parsed".into())
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let fx = fixtures();
    let ms = fx.join("moving_square");
    let mut tags = Vec::new();
    let mut reports = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(format!("tag_{run}"));
        pgt(&[
            p("tag"),
            p("--sequence"),
            &ms.join("sequence"),
            p("--proposals"),
            &ms.join("proposals"),
            p("--out"),
            &out,
        ])?;
        let read = |n: &str| fs::read(out.join(n)).map_err(|e| e.to_string());
        tags.push((read("pseudo_gt.png")?, read("provenance.json")?));
        let report = tmp.path().join(format!("report_{run}.json"));
        pgt(&[
            p("eval"),
            p("--manifest"),
            &fx.join("dataset/dataset.json"),
            p("--out"),
            &report,
        ])?;
        reports.push(fs::read(&report).map_err(|e| e.to_string())?);
    }
    ensure(tags[0] == tags[1], || {
        "tag outputs differ between runs".into()
    })?;
    ensure(reports[0] == reports[1], || {
        "eval reports differ between runs".into()
    })?;
    Ok(format!(
        "tag ({} + {} bytes) and eval ({} bytes) byte-identical across runs",
        tags[0].0.len(),
        tags[0].1.len(),
        reports[0].len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("flow translation recovery", flow_translation),
        ("flow energy monotonicity", energy_monotonicity),
        ("metric oracle equivalence", metric_oracles),
        ("morphology laws", morphology_laws),
        ("tagger end-to-end", tagger_end_to_end),
        ("strict overlap threshold", strict_overlap_threshold),
        ("error-analysis shape", analysis_shape),
        ("adaptation partition", adaptation_partition),
        ("format fidelity", format_fidelity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use pixelbreak::attacks::{
    skk_advanced_coa, skk_basic_coa, skk_cpa_attack_with_oracle, tanaka_cpa_attack, SeedStrategy,
    SkkSentinels,
};
use pixelbreak::keystream::{derive_bitmask, derive_pixel_decisions};
use pixelbreak::metrics::{exact_match, gradient_energy, psnr_gray};
use pixelbreak::oracle::{skk_oracle, tanaka_oracle, EncryptionOracle};
use pixelbreak::skk::{skk_decrypt, skk_encrypt, KeyMode, KeyPolicy, SkkKey};
use pixelbreak::tanaka::{tanaka_decrypt, tanaka_encrypt, tanaka_keygen};
use pixelbreak::{corpus, Image, Pixel, SecretKey};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const TRIALS: usize = 100;
const TIME_BUDGET: Duration = Duration::from_secs(1);
const ROUND_TRIP_CASES: u32 = 1000;
const PSNR_GAIN_DB: f64 = 3.0;
const LEADING_BIT: bool = false;
const COA_BASE_SEED: u128 = 0x5eed;
const XS_POSITIONS: u32 = 60_000;
const XS_TOLERANCE: f64 = 0.05;
const BITMASK_DRAWS: usize = 10_000;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Outcome {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }
}

fn random_image(rng: &mut impl Rng, w: usize, h: usize) -> Image {
    Image::from_fn(w, h, 8, |_, _| {
        Pixel::new(
            rng.gen::<u8>().into(),
            rng.gen::<u8>().into(),
            rng.gen::<u8>().into(),
        )
    })
    .unwrap()
}

fn tanaka_cpa_exactness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut bad = Vec::new();
    let mut elapsed = Duration::ZERO;
    for trial in 0..TRIALS {
        let img = random_image(&mut rng, 32, 32);
        let key = tanaka_keygen(SecretKey::new(rng.gen()), 4, true).unwrap();
        let ct = tanaka_encrypt(&img, &key).unwrap();
        for (batch, want_queries) in [(16, 1), (1, 16)] {
            let oracle = tanaka_oracle(key.clone());
            let start = Instant::now();
            let out = tanaka_cpa_attack(&ct, &oracle, 4, batch);
            elapsed += start.elapsed();
            let ok = out.is_ok_and(|o| exact_match(&o, &img));
            if !ok || oracle.query_count() != want_queries {
                bad.push(format!(
                    "trial {trial} N={batch}: exact={ok} queries={}",
                    oracle.query_count()
                ));
            }
        }
    }
    let mut o = Outcome::new(
        bad.is_empty() && elapsed < TIME_BUDGET,
        format!(
            "{TRIALS} trials 32x32 M=4 reversal, N=16 -> 1 query, N=1 -> 16 queries, {} bad, {:.1} ms",
            bad.len(),
            elapsed.as_secs_f64() * 1e3
        ),
    );
    o.details = bad;
    o
}

fn skk_cpa_exactness() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let sentinels = SkkSentinels::standard(8).unwrap();
    let mut bad = Vec::new();
    let mut elapsed = Duration::ZERO;
    for trial in 0..TRIALS {
        let img = random_image(&mut rng, 96, 96);
        let key = SkkKey::new(SecretKey::new(rng.gen()), true);
        let ct = skk_encrypt(&img, &key).unwrap();
        let oracle = skk_oracle(key);
        let start = Instant::now();
        let out = skk_cpa_attack_with_oracle(&ct, &oracle, &sentinels);
        elapsed += start.elapsed();
        let ok = out.is_ok_and(|o| exact_match(&o, &img));
        if !ok || oracle.query_count() != 1 {
            bad.push(format!(
                "trial {trial}: exact={ok} queries={}",
                oracle.query_count()
            ));
        }
    }
    let mut o = Outcome::new(
        bad.is_empty() && elapsed < TIME_BUDGET,
        format!(
            "{TRIALS} trials 96x96 shuffle, 1 query each, {} bad, {:.1} ms",
            bad.len(),
            elapsed.as_secs_f64() * 1e3
        ),
    );
    o.details = bad;
    o
}

fn pixels(w: usize, h: usize, l: u8) -> impl Strategy<Value = Image> {
    let max = ((1u32 << l) - 1) as u16;
    prop::collection::vec((0..=max, 0..=max, 0..=max), w * h).prop_map(move |px| {
        let px = px
            .into_iter()
            .map(|(r, g, b)| Pixel::new(r, g, b))
            .collect();
        Image::new(w, h, l, px).unwrap()
    })
}

fn round_trips() -> Outcome {
    let config = Config {
        cases: ROUND_TRIP_CASES,
        failure_persistence: None,
        ..Config::default()
    };
    let depths = || prop::sample::select(vec![1u8, 4, 8, 12, 16]);

    let tanaka = (1..=4usize, 1..=3usize, 1..=3usize, depths())
        .prop_flat_map(|(m, bw, bh, l)| (pixels(m * bw, m * bh, l), Just(m)));
    let tanaka_result = TestRunner::new(config.clone()).run(
        &(tanaka, any::<u128>(), any::<bool>()),
        |((img, m), seed, reversal)| {
            let key = tanaka_keygen(SecretKey::new(seed), m, reversal).unwrap();
            let enc = tanaka_encrypt(&img, &key).unwrap();
            prop_assert_eq!(&tanaka_decrypt(&enc, &key).unwrap(), &img);
            let dec = tanaka_decrypt(&img, &key).unwrap();
            prop_assert_eq!(&tanaka_encrypt(&dec, &key).unwrap(), &img);
            Ok(())
        },
    );

    let skk = (1..=12usize, 1..=12usize, depths()).prop_flat_map(|(w, h, l)| pixels(w, h, l));
    let skk_result = TestRunner::new(config).run(
        &(skk, any::<u128>(), any::<bool>()),
        |(img, seed, shuffle)| {
            let key = SkkKey::new(SecretKey::new(seed), shuffle);
            let enc = skk_encrypt(&img, &key).unwrap();
            prop_assert_eq!(&skk_decrypt(&enc, &key).unwrap(), &img);
            let dec = skk_decrypt(&img, &key).unwrap();
            prop_assert_eq!(&skk_encrypt(&dec, &key).unwrap(), &img);
            Ok(())
        },
    );

    let mut o = Outcome::new(
        tanaka_result.is_ok() && skk_result.is_ok(),
        format!("{ROUND_TRIP_CASES} cases per scheme, both directions"),
    );
    if let Err(e) = tanaka_result {
        o.details.push(format!("tanaka: {e}"));
    }
    if let Err(e) = skk_result {
        o.details.push(format!("skk: {e}"));
    }
    o
}

/// Brute-force check of one advanced-COA output: every pixel must lie in
/// the 48-option orbit of its ciphertext pixel and attain the minimum L1
/// distance to its reference. Returns (argmin violations, orbit violations).
fn audit(ciphertext: &Image, output: &Image) -> (usize, usize) {
    let m = ciphertext.max_value();
    let mut argmin = 0;
    let mut orbit = 0;
    for v in 0..ciphertext.height() {
        for u in 0..ciphertext.width() {
            let c = ciphertext.pixel(u, v).channels();
            let mut options = Vec::with_capacity(48);
            for (i, j, k) in [
                (0, 1, 2),
                (0, 2, 1),
                (1, 0, 2),
                (1, 2, 0),
                (2, 0, 1),
                (2, 1, 0),
            ] {
                for mask in 0..8u8 {
                    let mut o = [c[i], c[j], c[k]];
                    for (bit, x) in o.iter_mut().enumerate() {
                        if mask >> bit & 1 == 1 {
                            *x = m - *x;
                        }
                    }
                    options.push(o);
                }
            }
            let emitted = output.pixel(u, v).channels();
            if !options.contains(&emitted) {
                orbit += 1;
            }
            let Some((ru, rv)) = (if u > 0 {
                Some((u - 1, v))
            } else if v > 0 {
                Some((0, v - 1))
            } else {
                None
            }) else {
                continue;
            };
            let q = output.pixel(ru, rv).channels();
            let dist =
                |p: [u16; 3]| -> u32 { (0..3).map(|i| u32::from(q[i].abs_diff(p[i]))).sum() };
            if options.iter().map(|&o| dist(o)).min() != Some(dist(emitted)) {
                argmin += 1;
            }
        }
    }
    (argmin, orbit)
}

fn coa_policy() -> KeyPolicy {
    KeyPolicy {
        mode: KeyMode::PerImage,
        base: SecretKey::new(COA_BASE_SEED),
        shuffle_enabled: true,
    }
}

fn advanced_coa_audit() -> Outcome {
    let policy = coa_policy();
    let (mut outputs, mut argmin, mut orbit) = (0, 0, 0);
    let mut o = Outcome::new(true, "");
    for (k, s) in corpus::samples().iter().enumerate() {
        let ct = skk_encrypt(&s.image(), &policy.key_for(k as u64)).unwrap();
        for out in skk_advanced_coa(&ct, SeedStrategy::Enumerate48).unwrap() {
            let (a, b) = audit(&ct, &out);
            outputs += 1;
            argmin += a;
            orbit += b;
            if a + b > 0 {
                o.details.push(format!("{}: argmin {a}, orbit {b}", s.name));
            }
        }
    }
    o.pass = argmin == 0 && orbit == 0;
    o.summary = format!(
        "{outputs} outputs over {} samples, {argmin} argmin violations, {orbit} orbit violations",
        corpus::samples().len()
    );
    o
}

fn coa_efficacy() -> Outcome {
    let policy = coa_policy();
    let mut o = Outcome::new(true, "");
    let mut failed = 0;
    for (k, s) in corpus::samples().iter().enumerate() {
        let orig = s.image();
        let ct = skk_encrypt(&orig, &policy.key_for(k as u64)).unwrap();
        let basic = skk_basic_coa(&ct, LEADING_BIT);
        let adv = skk_advanced_coa(&ct, SeedStrategy::FixFirst)
            .unwrap()
            .remove(0);
        let half = 1u16 << 7;
        let leading_ok = basic
            .pixels()
            .iter()
            .all(|p| p.channels().iter().all(|&c| (c >= half) == LEADING_BIT));
        let (ge_ct, ge_basic, ge_adv) = (
            gradient_energy(&ct),
            gradient_energy(&basic),
            gradient_energy(&adv),
        );
        let g_ct = psnr_gray(&orig, &ct).unwrap();
        let g_basic = psnr_gray(&orig, &basic).unwrap();
        let g_adv = psnr_gray(&orig, &adv).unwrap();
        let a = leading_ok && ge_basic < ge_ct;
        let b = ge_adv <= ge_basic;
        let c = g_basic >= g_ct + PSNR_GAIN_DB && g_adv >= g_ct + PSNR_GAIN_DB;
        if !(a && b && c) {
            failed += 1;
        }
        o.details.push(format!(
            "{:<13} (a) {} ge {ge_ct} -> {ge_basic}  (b) {} ge {ge_adv}  (c) {} gray psnr ct {g_ct:.2} basic {g_basic:.2} adv {g_adv:.2} dB",
            s.name,
            flag(a),
            flag(b),
            flag(c),
        ));
    }
    o.pass = failed == 0;
    o.summary = format!(
        "{} samples, per-image keys, b={}, gain >= {PSNR_GAIN_DB} dB, {failed} failing",
        corpus::samples().len(),
        u8::from(LEADING_BIT)
    );
    o
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn keystream_statistics() -> Outcome {
    let mut o = Outcome::new(true, "");
    let mut worst_xs = 0f64;
    let mut worst_mask = 0f64;
    for seed in [
        1u128,
        0x5eed,
        u128::MAX,
        0x0123_4567_89ab_cdef_fedc_ba98_7654_3210,
    ] {
        let key = SecretKey::new(seed);
        let mut counts = [0u32; 6];
        for i in 0..XS_POSITIONS {
            let d = derive_pixel_decisions(key, i % 300, i / 300);
            counts[d.x_s as usize] += 1;
        }
        for c in counts {
            let dev = (f64::from(c) / f64::from(XS_POSITIONS) * 6.0 - 1.0).abs();
            worst_xs = worst_xs.max(dev);
        }
        let ones = derive_bitmask(key, BITMASK_DRAWS)
            .iter()
            .filter(|&&b| b)
            .count() as f64
            / BITMASK_DRAWS as f64;
        worst_mask = worst_mask.max((ones - 0.5).abs());
        if !(0.45..=0.55).contains(&ones) {
            o.details
                .push(format!("seed {seed:#x}: bitmask ones {ones:.4}"));
        }
        o.details.extend(
            counts
                .iter()
                .enumerate()
                .filter(|(_, &c)| {
                    (f64::from(c) / f64::from(XS_POSITIONS) * 6.0 - 1.0).abs() > XS_TOLERANCE
                })
                .map(|(s, c)| format!("seed {seed:#x}: x_s={s} count {c}")),
        );
    }
    o.pass = o.details.is_empty();
    o.summary = format!(
        "x_s worst relative deviation {:.2}% (limit 5%), bitmask worst |ones - 0.5| {:.4} (limit 0.05)",
        worst_xs * 100.0,
        worst_mask
    );
    o
}

fn run_cli(args: &[String]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_pixelbreak"))
        .args(args)
        .env_remove("PIXELBREAK_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(out.stdout)
}

fn pipelines(inputs: &Path, out: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let i = |name: &str| inputs.join(name).display().to_string();
    let o = |name: &str| out.join(name).display().to_string();
    let key = o("key.txt");
    let steps: Vec<Vec<String>> = vec![
        vec!["keygen".into(), "--seed".into(), "11".into(), key.clone()],
        vec![
            "tanaka",
            "encrypt",
            "--key-file",
            &key,
            "--block-size",
            "4",
            "--reversal",
            &i("chelsea_32.ppm"),
            &o("t.ppm"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "tanaka",
            "decrypt",
            "--key-file",
            &key,
            "--block-size",
            "4",
            "--reversal",
            &o("t.ppm"),
            &o("t_dec.ppm"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "skk",
            "encrypt",
            "--key-file",
            &key,
            "--shuffle",
            &i("rocket_96.ppm"),
            &o("s.ppm"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "skk",
            "encrypt",
            "--key-file",
            &key,
            "--shuffle",
            "--per-image",
            "--index",
            "3",
            &i("coffee_96.ppm"),
            &o("p.ppm"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "skk",
            "decrypt",
            "--key-file",
            &key,
            "--shuffle",
            "--per-image",
            "--index",
            "3",
            &o("p.ppm"),
            &o("p_dec.ppm"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "attack",
            "tanaka-cpa",
            "--oracle-key-file",
            &key,
            "--block-size",
            "4",
            "--reversal",
            "--batch",
            "5",
            &o("t.ppm"),
            &o("t_cpa.ppm"),
            "--original",
            &i("chelsea_32.ppm"),
            "--report",
            &o("t_cpa.json"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "attack",
            "skk-cpa",
            "--oracle-key-file",
            &key,
            "--shuffle",
            &o("s.ppm"),
            &o("s_cpa.ppm"),
            "--original",
            &i("rocket_96.ppm"),
            "--report",
            &o("s_cpa.json"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "attack",
            "skk-coa-basic",
            "--leading-bit",
            "1",
            "--emit-grayscale",
            &o("p.ppm"),
            &o("basic.ppm"),
            "--original",
            &i("coffee_96.ppm"),
            "--report",
            &o("basic.json"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "attack",
            "skk-coa-adv",
            "--emit-grayscale",
            &o("p.ppm"),
            &o("adv.ppm"),
            "--original",
            &i("coffee_96.ppm"),
            "--report",
            &o("adv.json"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec![
            "attack",
            "skk-coa-adv",
            "--enumerate-seeds",
            &o("s.ppm"),
            &o("seeds"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
        vec!["metrics", "--json", &i("coffee_96.ppm"), &o("basic.ppm")]
            .into_iter()
            .map(String::from)
            .collect(),
        vec!["demo", "all", "--outdir", &o("demo"), "--seed", "9"]
            .into_iter()
            .map(String::from)
            .collect(),
        vec![
            "batch",
            &i("manifest.txt"),
            "--outdir",
            &o("batch"),
            "--report",
            &o("batch.csv"),
        ]
        .into_iter()
        .map(String::from)
        .collect(),
    ];
    let mut files = BTreeMap::new();
    for (k, step) in steps.iter().enumerate() {
        let stdout = run_cli(step)?;
        files.insert(format!("stdout/{k:02}"), stdout);
    }
    collect(out, out, &mut files).map_err(|e| e.to_string())?;
    Ok(files)
}

fn collect(root: &Path, dir: &Path, files: &mut BTreeMap<String, Vec<u8>>) -> std::io::Result<()> {
    for entry in std::fs::read_dir(dir)? {
        let path: PathBuf = entry?.path();
        if path.is_dir() {
            collect(root, &path, files)?;
        } else {
            let rel = path.strip_prefix(root).unwrap().display().to_string();
            files.insert(rel, std::fs::read(&path)?);
        }
    }
    Ok(())
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let inputs = tmp.path().join("in");
    std::fs::create_dir(&inputs).unwrap();
    let mut manifest = String::new();
    for s in corpus::samples() {
        std::fs::write(inputs.join(format!("{}.ppm", s.name)), s.ppm_bytes()).unwrap();
        manifest.push_str(&format!("{}.ppm\n", s.name));
    }
    std::fs::write(inputs.join("manifest.txt"), manifest).unwrap();

    let mut runs = Vec::new();
    for r in 0..2 {
        let out = tmp.path().join(format!("run{r}"));
        std::fs::create_dir(&out).unwrap();
        match pipelines(&inputs, &out) {
            Ok(files) => runs.push(files),
            Err(e) => return Outcome::new(false, format!("pipeline failed: {e}")),
        }
    }
    let (a, b) = (&runs[0], &runs[1]);
    let mut o = Outcome::new(true, "");
    for name in a.keys().chain(b.keys().filter(|k| !a.contains_key(*k))) {
        if a.get(name) != b.get(name) {
            o.details.push(format!("differs: {name}"));
        }
    }
    o.pass = o.details.is_empty();
    o.summary = format!(
        "14 CLI pipelines run twice, {} files and stdout streams compared, {} differ",
        a.len(),
        o.details.len()
    );
    o
}

fn main() {
    let criteria: [(&str, Check); 7] = [
        ("Tanaka CPA exactness", tanaka_cpa_exactness),
        ("SKK CPA exactness", skk_cpa_exactness),
        ("round trips", round_trips),
        ("advanced COA argmin audit", advanced_coa_audit),
        ("COA efficacy", coa_efficacy),
        ("keystream statistics", keystream_statistics),
        ("CLI determinism", determinism),
    ];
    let mut failures = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!(
            "criterion {}: {} {name}: {}",
            n + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.summary
        );
        if !o.pass || n == 4 {
            for d in o.details.iter().take(20) {
                println!("    {d}");
            }
        }
        failures += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}

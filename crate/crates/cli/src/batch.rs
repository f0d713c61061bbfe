use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use pixelbreak::attacks::{
    skk_advanced_coa, skk_basic_coa, skk_cpa_attack_with_oracle, tanaka_cpa_attack, SeedStrategy,
    SkkSentinels,
};
use pixelbreak::metrics::AttackReport;
use pixelbreak::oracle::{skk_oracle, tanaka_oracle, EncryptionOracle};
use pixelbreak::skk::{skk_encrypt, KeyMode, KeyPolicy};
use pixelbreak::tanaka::{tanaka_encrypt, tanaka_keygen};
use pixelbreak::{Image, SecretKey};
use rayon::prelude::*;

use crate::args::BatchArgs;
use crate::commands::{check_batch, elapsed_ms};
use crate::io::{create_dir, read_image, write_atomic, write_image};

struct Row {
    image: String,
    attack: &'static str,
    report: AttackReport,
}

const HEADER: [&str; 8] = [
    "image",
    "attack",
    "exact_match",
    "psnr_db",
    "psnr_gray_db",
    "gradient_energy",
    "query_count",
    "wall_time_ms",
];

fn db(x: f64) -> String {
    if x.is_infinite() {
        "inf".to_owned()
    } else {
        format!("{x:.6}")
    }
}

impl Row {
    fn record(&self) -> [String; 8] {
        let r = &self.report;
        [
            self.image.clone(),
            self.attack.to_owned(),
            r.exact_match.to_string(),
            db(r.psnr_db),
            db(r.psnr_gray_db),
            r.gradient_energy.to_string(),
            r.query_count.to_string(),
            format!("{:.3}", r.wall_time_ms),
        ]
    }
}

fn read_manifest(path: &Path) -> Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read manifest {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new(""));
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| base.join(l))
        .collect())
}

struct Setup<'a> {
    args: &'a BatchArgs,
    seed: SecretKey,
}

impl Setup<'_> {
    fn row(
        &self,
        name: &str,
        attack: &'static str,
        orig: &Image,
        out: &Image,
        queries: u64,
        start: Instant,
    ) -> Result<Row> {
        write_image(
            &self.args.outdir.join(name).join(format!("{attack}.ppm")),
            out,
        )?;
        Ok(Row {
            image: name.to_owned(),
            attack,
            report: AttackReport::evaluate(
                orig,
                out,
                queries,
                elapsed_ms(start, self.args.timing),
            )?,
        })
    }

    fn image(&self, ordinal: usize, path: &Path) -> Result<Vec<Row>> {
        let orig = read_image(path)?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("image_{ordinal}"));
        create_dir(&self.args.outdir.join(&name))?;
        let m = self.args.block_size as usize;
        let ordinal = ordinal as u64;
        let mut rows = Vec::new();

        // Same base key for the CPA pipelines, as the attacks assume.
        let same = KeyPolicy {
            mode: KeyMode::SameKey,
            base: self.seed,
            shuffle_enabled: true,
        };
        let per_image = KeyPolicy {
            mode: KeyMode::PerImage,
            ..same
        };

        if orig.width() % m == 0 && orig.height() % m == 0 {
            check_batch(self.args.batch, orig.bit_depth())?;
            let tk = tanaka_keygen(self.seed, m, true)?;
            let ct = tanaka_encrypt(&orig, &tk)?;
            let oracle = tanaka_oracle(tk);
            let start = Instant::now();
            let out = tanaka_cpa_attack(&ct, &oracle, m, self.args.batch)?;
            rows.push(self.row(
                &name,
                "tanaka-cpa",
                &orig,
                &out,
                oracle.query_count(),
                start,
            )?);
        } else {
            eprintln!(
                "warning: skipping tanaka-cpa for {}: {}x{} is not divisible by --block-size {m}",
                path.display(),
                orig.width(),
                orig.height()
            );
        }

        let sk = same.key_for(ordinal);
        let ct = skk_encrypt(&orig, &sk)?;
        let oracle = skk_oracle(sk);
        let start = Instant::now();
        let out =
            skk_cpa_attack_with_oracle(&ct, &oracle, &SkkSentinels::standard(orig.bit_depth())?)?;
        rows.push(self.row(&name, "skk-cpa", &orig, &out, oracle.query_count(), start)?);

        let ct = skk_encrypt(&orig, &per_image.key_for(ordinal))?;
        let start = Instant::now();
        let out = skk_basic_coa(&ct, self.args.leading_bit.as_bool());
        rows.push(self.row(&name, "skk-coa-basic", &orig, &out, 0, start)?);

        let start = Instant::now();
        let out = skk_advanced_coa(&ct, SeedStrategy::FixFirst)?.remove(0);
        rows.push(self.row(&name, "skk-coa-adv", &orig, &out, 0, start)?);
        Ok(rows)
    }
}

pub fn run(args: BatchArgs) -> Result<()> {
    let inputs = read_manifest(&args.manifest)?;
    create_dir(&args.outdir)?;
    let setup = Setup {
        args: &args,
        seed: SecretKey::new(args.seed.into()),
    };
    let per_image: Vec<Vec<Row>> = inputs
        .par_iter()
        .enumerate()
        .map(|(k, path)| {
            setup
                .image(k, path)
                .with_context(|| format!("while processing {}", path.display()))
        })
        .collect::<Result<_>>()?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for row in per_image.iter().flatten() {
        w.write_record(row.record())?;
    }
    let bytes = w.into_inner().context("cannot finish CSV")?;
    write_atomic(&args.report, &bytes)
}

use std::io::Read;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use pixelbreak::attacks::{
    max_batch, skk_advanced_coa, skk_basic_coa, skk_cpa_attack_with_oracle, tanaka_cpa_attack,
    SeedStrategy, SkkSentinels,
};
use pixelbreak::keystream::derive_image_key;
use pixelbreak::metrics::{exact_match, gradient_energy, psnr, psnr_gray, AttackReport};
use pixelbreak::oracle::{skk_oracle, tanaka_oracle, EncryptionOracle};
use pixelbreak::skk::{skk_decrypt, skk_encrypt, KeyMode, KeyPolicy, SkkKey};
use pixelbreak::tanaka::{tanaka_decrypt, tanaka_encrypt, tanaka_keygen};
use pixelbreak::{Error, Image, SecretKey};
use serde::Serialize;

use crate::args::{
    AttackCommand, KeygenArgs, MetricsArgs, OracleSetup, ReportArgs, SkkOp, SkkParams, TanakaOp,
    TanakaParams,
};
use crate::io::{self, grayscale_path, read_image, write_atomic, write_image};
use crate::UsageError;

pub fn tanaka(op: TanakaOp) -> Result<()> {
    let (p, encrypt) = match op {
        TanakaOp::Encrypt(p) => (p, true),
        TanakaOp::Decrypt(p) => (p, false),
    };
    let TanakaParams {
        key,
        block_size,
        reversal,
        io,
    } = p;
    let seed = io::load_key(key.key.as_deref(), key.key_file.as_deref(), "key")?;
    let key = tanaka_keygen(seed, block_size as usize, reversal)?;
    let img = read_image(&io.input)?;
    let out = if encrypt {
        tanaka_encrypt(&img, &key)
    } else {
        tanaka_decrypt(&img, &key)
    }
    .map_err(block_size_context)?;
    write_image(&io.output, &out)
}

fn block_size_context(e: Error) -> anyhow::Error {
    match e {
        Error::Dimension { .. } => anyhow::Error::new(e).context("check --block-size"),
        other => other.into(),
    }
}

pub fn skk(op: SkkOp) -> Result<()> {
    let (p, encrypt) = match op {
        SkkOp::Encrypt(p) => (p, true),
        SkkOp::Decrypt(p) => (p, false),
    };
    let SkkParams {
        key,
        shuffle,
        per_image,
        index,
        io,
    } = p;
    let base = io::load_key(key.key.as_deref(), key.key_file.as_deref(), "key")?;
    let policy = KeyPolicy {
        mode: if per_image {
            KeyMode::PerImage
        } else {
            KeyMode::SameKey
        },
        base,
        shuffle_enabled: shuffle,
    };
    let key = policy.key_for(index.unwrap_or(0));
    let img = read_image(&io.input)?;
    let out = if encrypt {
        skk_encrypt(&img, &key)?
    } else {
        skk_decrypt(&img, &key)?
    };
    write_image(&io.output, &out)
}

pub fn check_batch(batch: usize, bit_depth: u8) -> Result<()> {
    let limit = max_batch(bit_depth);
    if batch == 0 || batch > limit {
        return Err(UsageError(format!(
            "--batch {batch} is outside [1, {limit}] for {bit_depth}-bit images"
        ))
        .into());
    }
    Ok(())
}

/// Builds the encryption oracle. This is the only place attack subcommands
/// touch key material; the attack itself receives the trait object.
fn tanaka_oracle_from(
    setup: &OracleSetup,
    block_size: usize,
    reversal: bool,
) -> Result<Box<dyn EncryptionOracle>> {
    let seed = io::load_key(
        setup.oracle_key.as_deref(),
        setup.oracle_key_file.as_deref(),
        "oracle-key",
    )?;
    Ok(Box::new(tanaka_oracle(tanaka_keygen(
        seed, block_size, reversal,
    )?)))
}

fn skk_oracle_from(setup: &OracleSetup, shuffle: bool) -> Result<Box<dyn EncryptionOracle>> {
    let seed = io::load_key(
        setup.oracle_key.as_deref(),
        setup.oracle_key_file.as_deref(),
        "oracle-key",
    )?;
    Ok(Box::new(skk_oracle(SkkKey::new(seed, shuffle))))
}

pub fn elapsed_ms(start: Instant, timing: bool) -> f64 {
    if timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    }
}

fn write_report(args: &ReportArgs, recovered: &Image, queries: u64, start: Instant) -> Result<()> {
    let Some(path) = &args.report else {
        return Ok(());
    };
    let original = read_image(args.original.as_deref().expect("clap enforces --original"))?;
    let report = AttackReport::evaluate(
        &original,
        recovered,
        queries,
        elapsed_ms(start, args.timing),
    )
    .context("--original does not match the attacked image")?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_atomic(path, json.as_bytes())
}

fn write_with_gray(path: &Path, img: &Image, gray: bool) -> Result<()> {
    write_image(path, img)?;
    if gray {
        write_image(&grayscale_path(path), &img.to_grayscale())?;
    }
    Ok(())
}

pub fn attack(cmd: AttackCommand) -> Result<()> {
    match cmd {
        AttackCommand::TanakaCpa {
            oracle,
            block_size,
            reversal,
            batch,
            io,
            report,
        } => {
            let ct = read_image(&io.input)?;
            check_batch(batch, ct.bit_depth())?;
            let oracle = tanaka_oracle_from(&oracle, block_size as usize, reversal)?;
            let start = Instant::now();
            let out = tanaka_cpa_attack(&ct, oracle.as_ref(), block_size as usize, batch)
                .map_err(block_size_context)?;
            write_image(&io.output, &out)?;
            write_report(&report, &out, oracle.query_count(), start)
        }
        AttackCommand::SkkCpa {
            oracle,
            shuffle,
            io,
            report,
        } => {
            let ct = read_image(&io.input)?;
            let oracle = skk_oracle_from(&oracle, shuffle)?;
            let sentinels = SkkSentinels::standard(ct.bit_depth())?;
            let start = Instant::now();
            let out = skk_cpa_attack_with_oracle(&ct, oracle.as_ref(), &sentinels)?;
            write_image(&io.output, &out)?;
            write_report(&report, &out, oracle.query_count(), start)
        }
        AttackCommand::SkkCoaBasic {
            leading_bit,
            emit_grayscale,
            io,
            report,
        } => {
            let ct = read_image(&io.input)?;
            let start = Instant::now();
            let out = skk_basic_coa(&ct, leading_bit.as_bool());
            write_with_gray(&io.output, &out, emit_grayscale)?;
            write_report(&report, &out, 0, start)
        }
        AttackCommand::SkkCoaAdv {
            enumerate_seeds,
            emit_grayscale,
            io,
            report,
        } => {
            let ct = read_image(&io.input)?;
            let start = Instant::now();
            if enumerate_seeds {
                let outs = skk_advanced_coa(&ct, SeedStrategy::Enumerate48)?;
                io::create_dir(&io.output)?;
                for (k, out) in outs.iter().enumerate() {
                    write_with_gray(
                        &io.output.join(format!("seed_{k:02}.ppm")),
                        out,
                        emit_grayscale,
                    )?;
                }
                // The report scores the fix-first candidate, option 0.
                write_report(&report, &outs[0], 0, start)
            } else {
                let out = skk_advanced_coa(&ct, SeedStrategy::FixFirst)?.remove(0);
                write_with_gray(&io.output, &out, emit_grayscale)?;
                write_report(&report, &out, 0, start)
            }
        }
    }
}

#[derive(Serialize)]
struct Comparison {
    exact_match: bool,
    #[serde(with = "pixelbreak::metrics::inf_as_string")]
    psnr_db: f64,
    #[serde(with = "pixelbreak::metrics::inf_as_string")]
    psnr_gray_db: f64,
    gradient_energy_reference: u64,
    gradient_energy_candidate: u64,
}

pub fn metrics(args: MetricsArgs) -> Result<()> {
    let a = read_image(&args.reference)?;
    let b = read_image(&args.candidate)?;
    let c = Comparison {
        exact_match: exact_match(&a, &b),
        psnr_db: psnr(&a, &b)?,
        psnr_gray_db: psnr_gray(&a, &b)?,
        gradient_energy_reference: gradient_energy(&a),
        gradient_energy_candidate: gradient_energy(&b),
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&c)?);
    } else {
        println!("exact_match        {}", c.exact_match);
        println!("psnr_db            {:.4}", c.psnr_db);
        println!("psnr_gray_db       {:.4}", c.psnr_gray_db);
        println!(
            "gradient_energy    {} -> {}",
            c.gradient_energy_reference, c.gradient_energy_candidate
        );
    }
    Ok(())
}

pub fn keygen(args: KeygenArgs) -> Result<()> {
    let key = match args.seed {
        Some(seed) => derive_image_key(SecretKey::new(seed.into()), 0),
        None => {
            let mut buf = [0u8; 16];
            std::fs::File::open("/dev/urandom")
                .and_then(|mut f| f.read_exact(&mut buf))
                .context("cannot read system randomness; pass --seed")?;
            SecretKey::new(u128::from_le_bytes(buf))
        }
    };
    match args.output {
        Some(path) => write_atomic(&path, key.to_key_file().as_bytes()),
        None => {
            print!("{}", key.to_key_file());
            Ok(())
        }
    }
}

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use pixelbreak::attacks::{
    skk_advanced_coa, skk_basic_coa, skk_cpa_attack_with_oracle, tanaka_cpa_attack, SeedStrategy,
    SkkSentinels,
};
use pixelbreak::corpus::sample;
use pixelbreak::keystream::derive_image_key;
use pixelbreak::metrics::exact_match;
use pixelbreak::oracle::{skk_oracle, tanaka_oracle, EncryptionOracle};
use pixelbreak::skk::{shuffle_components, skk_encrypt, SkkKey};
use pixelbreak::tanaka::{tanaka_encrypt, tanaka_keygen};
use pixelbreak::{Image, SecretKey};

use crate::args::{DemoArgs, Figure};
use crate::io::{create_dir, write_atomic, write_image};

const BLOCK_SIZE: usize = 4;
const BATCH: usize = 16;

const FIGURES: [Figure; 9] = [
    Figure::Fig1,
    Figure::Fig2,
    Figure::Fig3,
    Figure::Fig4,
    Figure::Fig5,
    Figure::Fig6,
    Figure::Fig7,
    Figure::Fig8,
    Figure::Fig9,
];

struct Panels {
    names: Vec<String>,
    images: Vec<Image>,
    notes: Vec<String>,
}

impl Panels {
    fn new() -> Self {
        Panels {
            names: Vec::new(),
            images: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, image: Image) {
        self.names.push(name.to_owned());
        self.images.push(image);
    }

    fn write(&self, dir: &Path) -> Result<()> {
        create_dir(dir)?;
        let mut index = String::new();
        for (k, (name, img)) in self.names.iter().zip(&self.images).enumerate() {
            let file = format!("{:02}_{name}.ppm", k + 1);
            write_image(&dir.join(&file), img)?;
            writeln!(index, "{file}")?;
        }
        for note in &self.notes {
            writeln!(index, "# {note}")?;
        }
        write_atomic(&dir.join("index.txt"), index.as_bytes())
    }
}

fn number(fig: Figure) -> u64 {
    FIGURES
        .iter()
        .position(|&f| f == fig)
        .expect("concrete figure") as u64
        + 1
}

fn input(name: &str) -> Image {
    sample(name).expect("bundled sample").image()
}

fn skk_panels(orig: &Image, key: SkkKey, adv: bool) -> Result<Panels> {
    let ct = skk_encrypt(orig, &key)?;
    let out = if adv {
        skk_advanced_coa(&ct, SeedStrategy::FixFirst)?.remove(0)
    } else {
        skk_basic_coa(&ct, false)
    };
    let mut p = Panels::new();
    p.push("encrypted", ct);
    p.push(if adv { "advanced_coa" } else { "basic_coa" }, out.clone());
    p.push("grayscale", out.to_grayscale());
    Ok(p)
}

fn figure(fig: Figure, seed: SecretKey) -> Result<Panels> {
    let key = derive_image_key(seed, number(fig));
    let mut p = Panels::new();
    match fig {
        Figure::Fig1 => {
            let orig = input("astronaut_32");
            let ct = tanaka_encrypt(&orig, &tanaka_keygen(key, BLOCK_SIZE, true)?)?;
            p.push("original", orig);
            p.push("encrypted", ct);
        }
        Figure::Fig2 => {
            let orig = input("astronaut_96");
            let ct = skk_encrypt(&orig, &SkkKey::new(key, true))?;
            p.push("original", orig);
            p.push("encrypted", ct);
        }
        Figure::Fig3 => {
            let orig = input("chelsea_96");
            let tk = tanaka_keygen(key, BLOCK_SIZE, true)?;
            let ct = tanaka_encrypt(&orig, &tk)?;
            let oracle = tanaka_oracle(tk);
            let out = tanaka_cpa_attack(&ct, &oracle, BLOCK_SIZE, BATCH)?;
            p.notes
                .push(format!("exact_match {}", exact_match(&orig, &out)));
            p.notes.push(format!("queries {}", oracle.query_count()));
            p.push("encrypted", ct);
            p.push("cpa_decryption", out);
        }
        Figure::Fig4 => {
            let orig = input("coffee_96");
            let sk = SkkKey::new(key, true);
            let ct = skk_encrypt(&orig, &sk)?;
            let oracle = skk_oracle(sk);
            let out = skk_cpa_attack_with_oracle(&ct, &oracle, &SkkSentinels::standard(8)?)?;
            p.notes
                .push(format!("exact_match {}", exact_match(&orig, &out)));
            p.notes.push(format!("queries {}", oracle.query_count()));
            p.push("encrypted", ct);
            p.push("cpa_decryption", out);
        }
        Figure::Fig5 => {
            let orig = input("astronaut_96");
            let sk = SkkKey::new(key, true);
            let shuffled =
                orig.map_pixels(|u, v, px| shuffle_components(px, sk.decisions(u, v).x_s))?;
            p.push("original", orig);
            p.push("shuffled", shuffled);
        }
        Figure::Fig6 => p = skk_panels(&input("chelsea_96"), SkkKey::new(key, true), false)?,
        Figure::Fig7 => p = skk_panels(&input("rocket_96"), SkkKey::new(key, true), false)?,
        Figure::Fig8 => p = skk_panels(&input("coffee_96"), SkkKey::new(key, true), true)?,
        Figure::Fig9 => p = skk_panels(&input("astronaut_96"), SkkKey::new(key, true), true)?,
        Figure::All => unreachable!("expanded by caller"),
    }
    Ok(p)
}

pub fn run(args: DemoArgs) -> Result<()> {
    let seed = SecretKey::new(args.seed.into());
    let figs: &[Figure] = match args.figure {
        Figure::All => &FIGURES,
        ref one => std::slice::from_ref(one),
    };
    for &fig in figs {
        let dir = args.outdir.join(format!("fig{}", number(fig)));
        figure(fig, seed)?.write(&dir)?;
    }
    Ok(())
}

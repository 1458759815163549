//! Snapshot files: a text manifest terminated by a `---` line, followed by
//! the coefficients as little-endian `f64` pairs (real, imaginary) in
//! active-set order, one block per component.
//!
//! ```text
//! quasicrystal snapshot
//! format_version = 1
//! [config]
//! symmetry = dihedral:12
//! ...
//! [module]
//! rank = 4
//! generator = 1.0000000000000000e0 0.0000000000000000e0
//! ...
//! [state]
//! active_modes = 1233
//! components = 1
//! symmetric = true
//! time = 1.0000000000000000e1
//! ---
//! ```

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use super::config::{parse_config, RunConfig};
use crate::error::{Error, Result};
use crate::field::HullField;
use crate::run::build_active;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "quasicrystal snapshot";
const SEPARATOR: &str = "---\n";

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub config: RunConfig,
    pub t: f64,
    pub fields: Vec<HullField>,
}

/// 17 significant digits, enough to round-trip any `f64`.
fn exact(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn encode_snapshot(config: &RunConfig, t: f64, fields: &[&HullField]) -> Result<Vec<u8>> {
    let first = fields
        .first()
        .ok_or_else(|| Error::InvalidArgument("snapshot needs at least one field".into()))?;
    for f in &fields[1..] {
        first.check_same_active(f)?;
    }
    let active = first.active();
    let mut text = format!("{MAGIC}\nformat_version = {FORMAT_VERSION}\n[config]\n");
    text += &config.to_text();
    text += &format!("[module]\nrank = {}\n", active.rank());
    for g in active.module().generators() {
        let parts: Vec<String> = g.iter().map(|&x| exact(x)).collect();
        text += &format!("generator = {}\n", parts.join(" "));
    }
    let flags: Vec<&str> = fields
        .iter()
        .map(|f| if f.is_symmetric() { "true" } else { "false" })
        .collect();
    text += &format!(
        "[state]\nactive_modes = {}\ncomponents = {}\nsymmetric = {}\ntime = {}\n{SEPARATOR}",
        active.len(),
        fields.len(),
        flags.join(" "),
        exact(t)
    );
    let mut bytes = text.into_bytes();
    for f in fields {
        for z in f.coefficients() {
            bytes.extend_from_slice(&z.re.to_le_bytes());
            bytes.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    Ok(bytes)
}

pub fn write_snapshot(path: &Path, config: &RunConfig, t: f64, fields: &[&HullField]) -> Result<()> {
    fs::write(path, encode_snapshot(config, t, fields)?)?;
    Ok(())
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptPayload(msg.into())
}

fn value<'a>(line: Option<&'a str>, key: &str) -> Result<&'a str> {
    line.and_then(|l| l.strip_prefix(key))
        .and_then(|l| l.trim_start().strip_prefix('='))
        .map(str::trim)
        .ok_or_else(|| corrupt(format!("expected `{key} = ...`")))
}

/// Parses a snapshot, re-deriving the module and active set from the stored
/// configuration and checking them against the manifest.
pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    let sep = format!("\n{SEPARATOR}");
    let split = bytes
        .windows(sep.len())
        .position(|w| w == sep.as_bytes())
        .ok_or_else(|| corrupt("manifest separator not found"))?;
    let manifest = std::str::from_utf8(&bytes[..split + 1]).map_err(|_| corrupt("manifest is not UTF-8"))?;
    let payload = &bytes[split + sep.len()..];
    let mut lines = manifest.lines();
    if lines.next() != Some(MAGIC) {
        return Err(corrupt("not a snapshot file"));
    }
    let version = value(lines.next(), "format_version")?;
    if version != FORMAT_VERSION.to_string() {
        return Err(Error::FormatVersionMismatch {
            found: version.to_string(),
            expected: FORMAT_VERSION,
        });
    }
    if lines.next() != Some("[config]") {
        return Err(corrupt("missing [config] section"));
    }
    let config_text: Vec<&str> = lines.by_ref().take_while(|l| *l != "[module]").collect();
    let config = parse_config(&config_text.join("\n"))?;
    let rank: usize = value(lines.next(), "rank")?.parse().map_err(|_| corrupt("bad rank"))?;
    let mut generators = Vec::with_capacity(rank);
    for _ in 0..rank {
        let g: Vec<f64> = value(lines.next(), "generator")?
            .split_whitespace()
            .map(|s| s.parse::<f64>().map_err(|_| corrupt("bad generator")))
            .collect::<Result<_>>()?;
        generators.push(g);
    }
    if lines.next() != Some("[state]") {
        return Err(corrupt("missing [state] section"));
    }
    let n: usize = value(lines.next(), "active_modes")?
        .parse()
        .map_err(|_| corrupt("bad active_modes"))?;
    let components: usize = value(lines.next(), "components")?
        .parse()
        .map_err(|_| corrupt("bad components"))?;
    let flags: Vec<bool> = value(lines.next(), "symmetric")?
        .split_whitespace()
        .map(|s| s.parse::<bool>().map_err(|_| corrupt("bad symmetric flag")))
        .collect::<Result<_>>()?;
    let t: f64 = value(lines.next(), "time")?.parse().map_err(|_| corrupt("bad time"))?;
    if components == 0 || flags.len() != components {
        return Err(corrupt("component count mismatch"));
    }
    let expected = 16 * n * components;
    if payload.len() != expected {
        return Err(corrupt(format!("payload has {} bytes, expected {expected}", payload.len())));
    }

    let active = build_active(&config)?;
    let module = active.module();
    let same_module = module.generators().len() == generators.len()
        && module.generators().iter().zip(&generators).all(|(a, b)| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-15 * x.abs().max(1.0))
        });
    if !same_module {
        return Err(corrupt("stored generators differ from the re-derived module"));
    }
    if active.len() != n {
        return Err(corrupt(format!("manifest lists {n} active modes, configuration gives {}", active.len())));
    }
    let mut fields = Vec::with_capacity(components);
    for (c, &symmetric) in flags.iter().enumerate() {
        let block = &payload[16 * n * c..16 * n * (c + 1)];
        let coeffs = block
            .chunks_exact(16)
            .map(|ch| {
                let re = f64::from_le_bytes(ch[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(ch[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
        let f = HullField::from_raw(active.clone(), coeffs, symmetric)?;
        fields.push(f);
    }
    Ok(Snapshot { config, t, fields })
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    decode_snapshot(&fs::read(path)?)
}
